//! The Lie algebra `g(V) = V̂ / D V̂` of modes, with brackets computed in a
//! normal form modulo the derivation relation `(L(-1)v)(m) = -m v(m-1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::linalg::{solve, zeros, Echelon, Matrix, Vector};
use crate::rat::{binom, fmt_rat, Rat};
use crate::voa::VoaPresentation;
use crate::{Error, Result};

/// `v(m)` for a basis vector `v` of the chosen section of `V / L(-1)V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeSymbol {
    pub v: usize,
    pub m: i64,
}

/// A finite linear combination of mode symbols in normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieElem(pub BTreeMap<ModeSymbol, Rat>);

impl LieElem {
    pub fn zero() -> Self {
        LieElem(BTreeMap::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, s: ModeSymbol, c: &Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(s).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&s);
        }
    }

    pub fn add_scaled(&mut self, c: &Rat, other: &LieElem) {
        for (s, d) in &other.0 {
            self.add_term(*s, &(c * d));
        }
    }

    pub fn scaled(&self, c: &Rat) -> LieElem {
        let mut out = LieElem::zero();
        out.add_scaled(c, self);
        out
    }
}

/// An ordered product of mode symbols with a coefficient, acting on a base
/// vector; used for display.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieWord {
    pub coeff: Rat,
    pub symbols: Vec<ModeSymbol>,
}

pub struct LieAlgebra {
    pub voa: Arc<VoaPresentation>,
    /// per weight: echelon form of `L(-1) V_{k-1}` inside `V_k`
    image: Vec<Echelon>,
    /// per weight: matrix whose columns are `L(-1)` of the weight `k-1` basis
    lminus1: Vec<Matrix>,
    section: Vec<usize>,
}

impl LieAlgebra {
    pub fn new(voa: Arc<VoaPresentation>) -> Result<Self> {
        let mut image = Vec::new();
        let mut lminus1 = Vec::new();
        let mut section = Vec::new();
        let d = voa.dim();
        for k in 0..=voa.cutoff {
            let prev = voa.range(k - 1);
            let cols: Vec<Vector> = prev.clone().map(|j| voa.l_op(-1, &voa.unit(j))).collect::<Result<_>>()?;
            let order: Vec<usize> = voa.range(k).rev().chain((0..d).filter(|i| !voa.range(k).contains(i))).collect();
            let ech = Echelon::with_order(cols.clone(), order);
            for i in voa.range(k) {
                if !ech.pivots().contains(&i) {
                    section.push(i);
                }
            }
            image.push(ech);
            lminus1.push(Matrix::from_cols(&cols, d));
        }
        Ok(LieAlgebra { voa, image, lminus1, section })
    }

    /// Basis vectors of `V` chosen as representatives of `V / L(-1)V`.
    pub fn section(&self) -> &[usize] {
        &self.section
    }

    pub fn degree(&self, s: ModeSymbol) -> i64 {
        self.voa.weight(s.v) - s.m - 1
    }

    /// Normal form of `v(m)` for a homogeneous `v`.
    pub fn normalize(&self, v: &[Rat], m: i64) -> Result<LieElem> {
        let mut out = LieElem::zero();
        let Some(k) = self.voa.weight_of(v) else {
            if v.iter().all(Zero::is_zero) {
                return Ok(out);
            }
            return Err(Error::Domain("mode symbols need homogeneous vectors".into()));
        };
        let ech = &self.image[k as usize];
        let rem = ech.reduce(v);
        for (i, c) in rem.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k == 0 && m != -1 {
                continue;
            }
            out.add_term(ModeSymbol { v: i, m }, c);
        }
        let diff: Vector = v.iter().zip(&rem).map(|(a, b)| a - b).collect();
        if diff.iter().any(|c| !c.is_zero()) {
            let u = solve(&self.lminus1[k as usize], &diff).ok_or_else(|| Error::Domain("L(-1) preimage not found".into()))?;
            let prev = self.voa.range(k - 1);
            let mut uvec = zeros(self.voa.dim());
            for (j, c) in prev.zip(u) {
                uvec[j] = c;
            }
            // (L(-1)u)(m) = -m u(m-1)
            if m != 0 {
                let tail = self.normalize(&uvec, m - 1)?;
                out.add_scaled(&Rat::from_integer((-m).into()), &tail);
            }
        }
        Ok(out)
    }

    /// Rewrites `(L(-1)v)(m)` into normal form.
    pub fn d_normalize(&self, v: &[Rat], m: i64) -> Result<LieElem> {
        let lv = self.voa.l_op(-1, v)?;
        self.normalize(&lv, m)
    }

    /// `[u(m), v(n)] = Σ_i C(m, i) (u_i v)(m + n - i)`.
    pub fn bracket_symbols(&self, a: ModeSymbol, b: ModeSymbol) -> Result<LieElem> {
        let voa = &self.voa;
        let mut out = LieElem::zero();
        for i in 0..(voa.weight(a.v) + voa.weight(b.v)) {
            let c = binom(a.m, i);
            if c.is_zero() {
                continue;
            }
            let uv = voa.mode(a.v, i, b.v)?;
            out.add_scaled(&c, &self.normalize(&uv, a.m + b.m - i)?);
        }
        Ok(out)
    }

    pub fn bracket(&self, x: &LieElem, y: &LieElem) -> Result<LieElem> {
        let mut out = LieElem::zero();
        for (a, c) in &x.0 {
            for (b, d) in &y.0 {
                out.add_scaled(&(c * d), &self.bracket_symbols(*a, *b)?);
            }
        }
        Ok(out)
    }

    pub fn symbol(&self, s: ModeSymbol) -> LieElem {
        let mut e = LieElem::zero();
        e.add_term(s, &Rat::one());
        e
    }

    /// The central element `1(-1)`.
    pub fn central(&self) -> LieElem {
        self.symbol(ModeSymbol { v: self.voa.vacuum, m: -1 })
    }

    pub fn format_elem(&self, e: &LieElem) -> String {
        if e.is_zero() {
            return "0".into();
        }
        e.0.iter()
            .map(|(s, c)| {
                let sym = format!("[{}]({})", self.voa.basis[s.v].label, s.m);
                if c.is_one() {
                    sym
                } else {
                    format!("{}·{}", fmt_rat(c), sym)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for LieWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.coeff.is_one() {
            write!(f, "{}·", fmt_rat(&self.coeff))?;
        }
        for s in &self.symbols {
            write!(f, "v{}({})", s.v, s.m)?;
        }
        Ok(())
    }
}

/// Outcome of the exhaustive bracket checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct LieReport {
    pub antisymmetry_checked: usize,
    pub jacobi_checked: usize,
    pub virasoro_checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl LieReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn escaped<T>(r: Result<T>, skipped: &mut usize) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::CutoffEscape { .. }) => {
            *skipped += 1;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

impl LieAlgebra {
    /// Symbols `v(m)` with `v` in the section and `|degree| ≤ max_degree`.
    pub fn symbols(&self, max_weight: i64, max_degree: i64) -> Vec<ModeSymbol> {
        let mut out = Vec::new();
        for &v in &self.section {
            let w = self.voa.weight(v);
            if w > max_weight {
                continue;
            }
            for m in (w - 1 - max_degree)..=(w - 1 + max_degree) {
                if v == self.voa.vacuum && m != -1 {
                    continue;
                }
                out.push(ModeSymbol { v, m });
            }
        }
        out
    }

    /// Antisymmetry and the Jacobi identity over all triples of symbols of
    /// bounded weight and degree, plus the Virasoro relations when `V` has a
    /// conformal vector.
    pub fn check(&self, max_weight: i64, max_degree: i64) -> Result<LieReport> {
        let mut rep = LieReport::default();
        let syms = self.symbols(max_weight, max_degree);
        for (i, &a) in syms.iter().enumerate() {
            for &b in &syms[i..] {
                let Some(ab) = escaped(self.bracket_symbols(a, b), &mut rep.skipped)? else {
                    continue;
                };
                let Some(ba) = escaped(self.bracket_symbols(b, a), &mut rep.skipped)? else {
                    continue;
                };
                rep.antisymmetry_checked += 1;
                let mut s = ab.clone();
                s.add_scaled(&Rat::one(), &ba);
                if !s.is_zero() {
                    rep.failures.push(format!("antisymmetry {a:?} {b:?}"));
                }
            }
        }
        for (i, &a) in syms.iter().enumerate() {
            for (j, &b) in syms.iter().enumerate().skip(i) {
                for &c in &syms[j..] {
                    let (x, y, z) = (self.symbol(a), self.symbol(b), self.symbol(c));
                    let mut total = LieElem::zero();
                    let mut ok = true;
                    for (p, q, r) in [(&x, &y, &z), (&y, &z, &x), (&z, &x, &y)] {
                        let Some(qr) = escaped(self.bracket(q, r), &mut rep.skipped)? else {
                            ok = false;
                            break;
                        };
                        let Some(t) = escaped(self.bracket(p, &qr), &mut rep.skipped)? else {
                            ok = false;
                            break;
                        };
                        total.add_scaled(&Rat::one(), &t);
                    }
                    if !ok {
                        continue;
                    }
                    rep.jacobi_checked += 1;
                    if !total.is_zero() {
                        rep.failures.push(format!("jacobi {a:?} {b:?} {c:?}"));
                    }
                }
            }
        }
        self.check_virasoro(3, &mut rep)?;
        Ok(rep)
    }

    /// `[L(m), L(n)] = (m - n) L(m + n) + δ_{m+n,0} (m³ - m)/12 · c · 1(-1)`.
    pub fn check_virasoro(&self, bound: i64, rep: &mut LieReport) -> Result<()> {
        let voa = &self.voa;
        if voa.cutoff < 2 || voa.omega.iter().all(Zero::is_zero) {
            return Ok(());
        }
        let c = &voa.central_charge;
        for m in -bound..=bound {
            for n in -bound..=bound {
                let Some(lm) = escaped(self.normalize(&voa.omega, m + 1), &mut rep.skipped)? else {
                    continue;
                };
                let Some(ln) = escaped(self.normalize(&voa.omega, n + 1), &mut rep.skipped)? else {
                    continue;
                };
                let Some(lhs) = escaped(self.bracket(&lm, &ln), &mut rep.skipped)? else {
                    continue;
                };
                let mut rhs = self.normalize(&voa.omega, m + n + 1)?.scaled(&Rat::from_integer((m - n).into()));
                if m + n == 0 {
                    let k = Rat::from_integer((m * m * m - m).into()) / Rat::from_integer(12.into()) * c;
                    rhs.add_scaled(&k, &self.central());
                }
                rep.virasoro_checked += 1;
                if lhs != rhs {
                    rep.failures.push(format!("virasoro L({m}) L({n})"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use crate::voa::{make_heisenberg, make_virasoro};

    #[test]
    fn heisenberg_central_bracket() {
        let v = Arc::new(make_heisenberg(4));
        let g = LieAlgebra::new(v.clone()).unwrap();
        let a = v.generator_index(0).unwrap();
        let r = g.bracket_symbols(ModeSymbol { v: a, m: 1 }, ModeSymbol { v: a, m: -1 }).unwrap();
        assert_eq!(r, g.central());
        let one = ModeSymbol { v: v.vacuum, m: -1 };
        assert!(g.bracket_symbols(one, ModeSymbol { v: a, m: 2 }).unwrap().is_zero());
    }

    #[test]
    fn virasoro_l1_lminus1() {
        let v = Arc::new(make_virasoro(rat(1, 2), 4));
        let g = LieAlgebra::new(v.clone()).unwrap();
        let w = v.generator_index(0).unwrap();
        let r = g.bracket_symbols(ModeSymbol { v: w, m: 2 }, ModeSymbol { v: w, m: 0 }).unwrap();
        assert_eq!(r, g.symbol(ModeSymbol { v: w, m: 1 }).scaled(&int(2)));
        assert_eq!(g.d_normalize(&v.unit(w), 2).unwrap(), g.symbol(ModeSymbol { v: w, m: 1 }).scaled(&int(-2)));
        assert!(g.d_normalize(&v.unit(w), 0).unwrap().is_zero());
        let l2 = v.l_op(-1, &v.l_op(-1, &v.unit(w)).unwrap()).unwrap();
        assert_eq!(g.normalize(&l2, 3).unwrap(), g.symbol(ModeSymbol { v: w, m: 1 }).scaled(&int(6)));
    }

    #[test]
    fn exhaustive_checks_pass() {
        let v = Arc::new(make_virasoro(rat(26, 1), 6));
        let g = LieAlgebra::new(v).unwrap();
        let rep = g.check(4, 3).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.virasoro_checked, 49);
        assert!(rep.jacobi_checked > 100 && rep.antisymmetry_checked > 30, "{rep:?}");
    }
}
