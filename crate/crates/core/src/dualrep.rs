//! Functionals `f: W → U` with rational matrix coefficients against `Y°`,
//! the actions `Y^L`, `Y^R` they carry, and the induced module `Ind U`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::formal::{iota_expand, recompose, RationalForm, Region, WindowedSeries};
use crate::linalg::{axpy, is_zero, zeros, Echelon, Matrix, Vector};
use crate::rat::{binom, pow, Rat};
use crate::voa::ops::y_opposite;
use crate::voa::ModulePresentation;
use crate::zhu::{left_action, o_element, right_action, theta, Bimodule};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    L,
    R,
}

/// A `U`-valued functional on the levels `0..=domain` of `W`, stored as a
/// `dim U × dim W` matrix whose columns above the domain are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DualElement {
    pub f: Matrix,
    pub domain: i64,
    /// `v -> (k, l)`: `x^l (x - z)^k f Y°(v, x)` is polynomial
    pub certs: BTreeMap<usize, (i64, i64)>,
}

impl DualElement {
    pub fn u_dim(&self) -> usize {
        self.f.rows
    }

    pub fn apply(&self, w: &[Rat]) -> Vector {
        self.f.apply(w)
    }

    /// Restriction to a smaller domain.
    pub fn restrict(&self, m: &ModulePresentation, domain: i64) -> DualElement {
        let mut f = self.f.clone();
        for j in 0..m.dim() {
            if m.level(j) > domain {
                for i in 0..f.rows {
                    f[(i, j)] = Rat::zero();
                }
            }
        }
        DualElement {
            f,
            domain: domain.min(self.domain),
            certs: BTreeMap::new(),
        }
    }

    /// Flattened entries on levels `0..=domain`, for span computations.
    pub fn flatten(&self, m: &ModulePresentation, domain: i64) -> Vector {
        let mut out = Vec::new();
        for j in 0..m.dim() {
            if m.level(j) <= domain {
                out.extend((0..self.f.rows).map(|i| self.f[(i, j)].clone()));
            }
        }
        out
    }
}

/// Coefficient functionals of `Y^L(v, x) f` or `Y^R(v, x) f` on a reduced domain.
#[derive(Clone, Debug)]
pub struct ModeActionResult {
    pub side: Side,
    pub v: usize,
    pub domain: i64,
    /// exponent of `x` -> coefficient functional
    pub coeffs: BTreeMap<i64, Matrix>,
}

impl ModeActionResult {
    pub fn element(&self, e: i64) -> Option<DualElement> {
        self.coeffs.get(&e).map(|f| DualElement {
            f: f.clone(),
            domain: self.domain,
            certs: BTreeMap::new(),
        })
    }
}

/// `D_{P(z)}(W, U)` at a cutoff: caches `Y°(v, x) w` for basis vectors.
pub struct DualSpace {
    pub module: Arc<ModulePresentation>,
    pub z: Rat,
    yopp: Vec<Vec<WindowedSeries<Vector>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipWitness {
    pub v: usize,
    pub w: usize,
    pub exponent: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub witness: Option<MembershipWitness>,
    pub vanishes_on_o: bool,
}

impl Membership {
    pub fn consistent(&self) -> bool {
        self.member == self.vanishes_on_o
    }
}

fn shift_poly(g: &BTreeMap<i64, Vector>, z: &Rat, zero: &Vector) -> BTreeMap<i64, Vector> {
    let mut out: BTreeMap<i64, Vector> = BTreeMap::new();
    for (d, c) in g {
        for j in 0..=*d {
            let s = binom(*d, j) * pow(z, d - j);
            let slot = out.entry(j).or_insert_with(|| zero.clone());
            axpy(slot, &s, c);
        }
    }
    out.retain(|_, c| !is_zero(c));
    out
}

impl DualSpace {
    pub fn new(module: Arc<ModulePresentation>, z: Rat) -> Result<Self> {
        if z.is_zero() {
            return Err(Error::Domain("z must be nonzero".into()));
        }
        let voa = module.voa.clone();
        let yopp = (0..voa.dim())
            .into_par_iter()
            .map(|v| {
                (0..module.dim())
                    .map(|w| y_opposite(&module, &voa.unit(v), &module.unit(w)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DualSpace { module, z, yopp })
    }

    pub fn voa_weight(&self, v: usize) -> i64 {
        self.module.voa.weight(v)
    }

    /// `f Y°(v, x) w` on the exponents where `f` is known.
    pub fn f_yopp(&self, f: &DualElement, v: usize, w: usize) -> WindowedSeries<Vector> {
        let m = &self.module;
        let (wv, lw) = (self.voa_weight(v), m.level(w));
        let s = self.yopp[v][w].restrict(lw - wv - f.domain, lw - wv);
        s.map(zeros(f.u_dim()), |c| f.apply(c))
    }

    /// Largest level of `w` on which the `(k, l)` certificate for a weight
    /// `wt v` vector can be checked.
    pub fn reduced_domain(&self, f: &DualElement, v: usize, k: i64, l: i64) -> i64 {
        f.domain + self.voa_weight(v) - k - l
    }

    pub fn rational_form(&self, f: &DualElement, v: usize, w: usize, k: i64, l: i64) -> Result<RationalForm<Vector>> {
        recompose(&self.f_yopp(f, v, w), l, k, &self.z)
    }

    /// Coefficients `e ∈ [lo, hi]` of `Y^side(v, x) f`, evaluated on the
    /// reduced domain of the certificate `(k, l)`.
    pub fn dual_act_with(&self, side: Side, v: usize, f: &DualElement, k: i64, l: i64, lo: i64, hi: i64) -> Result<ModeActionResult> {
        let m = &self.module;
        let domain = self.reduced_domain(f, v, k, l).min(m.cutoff);
        if domain < 0 {
            return Err(Error::Window {
                exponent: lo,
                lo: 0,
                hi: domain,
            });
        }
        let zero = zeros(f.u_dim());
        let mut coeffs: BTreeMap<i64, Matrix> = (lo..=hi).map(|e| (e, Matrix::zeros(f.u_dim(), m.dim()))).collect();
        for w in 0..m.dim() {
            if m.level(w) > domain {
                continue;
            }
            let rf = self.rational_form(f, v, w, k, l)?;
            let series = match side {
                Side::R => iota_expand(&rf, Region::AtZero, lo, hi)?,
                Side::L => {
                    let shifted = RationalForm {
                        g: shift_poly(&rf.g, &self.z, &zero),
                        l: k,
                        k: l,
                        z: -self.z.clone(),
                        zero: zero.clone(),
                    };
                    iota_expand(&shifted, Region::AtZero, lo, hi)?
                }
            };
            for e in lo..=hi {
                let c = series.coeff(e)?;
                let mat = coeffs.get_mut(&e).expect("exponent in range");
                for (i, x) in c.into_iter().enumerate() {
                    mat[(i, w)] = x;
                }
            }
        }
        Ok(ModeActionResult { side, v, domain, coeffs })
    }

    /// `dual_act_with` using the stored certificate for `v`.
    pub fn dual_act(&self, side: Side, v: usize, f: &DualElement, lo: i64, hi: i64) -> Result<ModeActionResult> {
        let &(k, l) = f.certs.get(&v).ok_or_else(|| Error::Domain(format!("no certificate for basis vector {v}")))?;
        self.dual_act_with(side, v, f, k, l, lo, hi)
    }

    /// Checks a candidate certificate on every `w` of the reduced domain.
    pub fn certificate_holds(&self, f: &DualElement, v: usize, k: i64, l: i64) -> Result<std::result::Result<(), MembershipWitness>> {
        let m = &self.module;
        let domain = self.reduced_domain(f, v, k, l);
        for w in 0..m.dim() {
            if m.level(w) > domain {
                continue;
            }
            match self.rational_form(f, v, w, k, l) {
                Ok(_) => {}
                Err(Error::Certificate { exponent, .. }) => return Ok(Err(MembershipWitness { v, w, exponent })),
                Err(e) => return Err(e),
            }
        }
        Ok(Ok(()))
    }

    /// Smallest certificate `(k, l)` with `k + l ≤ bound` valid on a reduced
    /// domain of at least `min_domain` levels.
    pub fn find_certificate(&self, f: &DualElement, v: usize, bound: i64, min_domain: i64) -> Result<Option<(i64, i64)>> {
        for total in 0..=bound {
            for k in 0..=total {
                let l = total - k;
                if self.reduced_domain(f, v, k, l) < min_domain {
                    continue;
                }
                if self.certificate_holds(f, v, k, l)?.is_ok() {
                    return Ok(Some((k, l)));
                }
            }
        }
        Ok(None)
    }

    /// Regularity of `x^{wt v} (x - z)^{wt v} f Y°(v, x)` for every basis `v`
    /// with a nonempty reduced domain, cross-checked against vanishing on
    /// the computed `O(W, z)`.
    pub fn omega_membership(&self, f: &DualElement) -> Result<Membership> {
        let voa = &self.module.voa;
        let mut witness = None;
        for v in 0..voa.dim() {
            let wv = voa.weight(v);
            if self.reduced_domain(f, v, wv, wv) < 0 {
                continue;
            }
            if let Err(w) = self.certificate_holds(f, v, wv, wv)? {
                witness = Some(w);
                break;
            }
        }
        let vanishes_on_o = self.vanishes_on_o(f)?;
        Ok(Membership {
            member: witness.is_none(),
            witness,
            vanishes_on_o,
        })
    }

    /// Whether `f` kills every `O(W, z)` generator lying in its domain.
    pub fn vanishes_on_o(&self, f: &DualElement) -> Result<bool> {
        let m = &self.module;
        let voa = &m.voa;
        for v in 0..voa.dim() {
            for w in 0..m.dim() {
                if voa.weight(v) + m.level(w) + 1 > f.domain {
                    continue;
                }
                let g = o_element(m, &voa.unit(v), &m.unit(w), &self.z)?;
                if !is_zero(&f.apply(&g)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `f = φ ∘ proj` for `φ: A(W, z) → U`, with certificates `(wt v, wt v)`
    /// validated on the window.
    pub fn lift_functional(&self, bimodule: &Bimodule, phi: &Matrix) -> Result<DualElement> {
        let m = &self.module;
        let p = bimodule.quotient.projection_matrix();
        let f = phi.mul(&p);
        let mut el = DualElement {
            f,
            domain: m.cutoff,
            certs: BTreeMap::new(),
        };
        for v in 0..m.voa.dim() {
            let wv = m.voa.weight(v);
            if self.reduced_domain(&el, v, wv, wv) < 0 {
                continue;
            }
            if let Err(w) = self.certificate_holds(&el, v, wv, wv)? {
                return Err(Error::Certificate {
                    k: wv,
                    l: wv,
                    exponent: w.exponent,
                });
            }
            el.certs.insert(v, (wv, wv));
        }
        Ok(el)
    }
}

/// Tally of the identities
/// `Res_x x^{wt v - 1} (Y^R(v,x) f)(w) = f(θ(v) *_{P(z)} w)` and
/// `Res_x x^{wt v - 1} (Y^L(v,x) f)(w) = f(w *_{P(z)} v)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResidueReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

pub fn residue_identities(space: &DualSpace, f: &DualElement, max_weight: i64) -> Result<ResidueReport> {
    let m = &space.module;
    let voa = m.voa.clone();
    let mut rep = ResidueReport::default();
    for v in 0..voa.dim() {
        let wv = voa.weight(v);
        if wv > max_weight || !f.certs.contains_key(&v) {
            continue;
        }
        let r = space.dual_act(Side::R, v, f, -wv, -wv)?;
        let l = space.dual_act(Side::L, v, f, -wv, -wv)?;
        let tv = theta(&voa, &voa.unit(v))?;
        for w in 0..m.dim() {
            if m.level(w) > r.domain {
                continue;
            }
            let lhs_r = r.coeffs[&-wv].col(w);
            let rhs_r = f.apply(&left_action(m, &tv, &m.unit(w), &space.z)?);
            let lhs_l = l.coeffs[&-wv].col(w);
            let rhs_l = f.apply(&right_action(m, &m.unit(w), &voa.unit(v), &space.z)?);
            rep.checked += 2;
            if lhs_r != rhs_r {
                rep.failures.push(format!("R v={v} w={w}"));
            }
            if lhs_l != rhs_l {
                rep.failures.push(format!("L v={v} w={w}"));
            }
        }
    }
    Ok(rep)
}

/// Bicoefficients of
/// `x0^{-1} δ((x - z)/x0) fY°(v, x) - x0^{-1} δ((z - x)/(-x0)) Y^R(v, x) f = z^{-1} δ((x - x0)/z) Y^L(v, x0) f`
/// at `x^a x0^b` for `a ∈ a_range`, `b ∈ b_range`, on every `w` of the reduced domain.
pub fn three_term_check(space: &DualSpace, f: &DualElement, v: usize, a_range: (i64, i64), b_range: (i64, i64)) -> Result<ResidueReport> {
    let m = &space.module;
    let z = &space.z;
    let &(k, l) = f.certs.get(&v).ok_or_else(|| Error::Domain("missing certificate".into()))?;
    let mut rep = ResidueReport::default();
    let (a0, a1) = a_range;
    let (b0, b1) = b_range;
    // exponents of Y^R needed: a - i for i ≥ 0 down to its lowest term -l;
    // exponents of Y^L needed: b - i down to -k
    let r = space.dual_act_with(Side::R, v, f, k, l, -l, a1)?;
    let lam = space.dual_act_with(Side::L, v, f, k, l, -k, b1)?;
    for w in 0..m.dim() {
        if m.level(w) > r.domain {
            continue;
        }
        let s = space.f_yopp(f, v, w);
        let top = s.max_support().unwrap_or(s.lo);
        for a in a0..=a1 {
            for b in b0..=b1 {
                let n = -b - 1;
                if a - n < s.lo {
                    continue;
                }
                let mut t1 = zeros(f.u_dim());
                for i in 0..=(top - (a - n)).max(-1) {
                    axpy(&mut t1, &(binom(n, i) * pow(&-z.clone(), i)), &s.coeff(a - n + i)?);
                }
                let mut t2 = zeros(f.u_dim());
                for i in 0..=(a + l).max(-1) {
                    let c = binom(n, i) * pow(&-Rat::one(), i) * pow(z, n - i);
                    axpy(&mut t2, &c, &r.coeffs[&(a - i)].col(w));
                }
                let t2 = crate::linalg::scaled(&t2, &pow(&-Rat::one(), n));
                let mut rhs = zeros(f.u_dim());
                for i in 0..=(b + k).max(-1) {
                    let c = binom(a + i, i) * pow(&-Rat::one(), i) * pow(z, -a - i - 1);
                    axpy(&mut rhs, &c, &lam.coeffs[&(b - i)].col(w));
                }
                rep.checked += 1;
                if crate::linalg::sub(&t1, &t2) != rhs {
                    rep.failures
                        .push(format!("v={v} w={w} a={a} b={b} lhs={:?} rhs={:?}", crate::linalg::sub(&t1, &t2), rhs));
                }
            }
        }
    }
    Ok(rep)
}

/// Compares, as matrices `Hom(A(W, z), U) → Hom(W_{≤N'}, U)`, the degree-zero
/// dual actions of each quotient basis element `a` with
/// `((a1, a2) f)(w) = f(θ(a2) w a1)` for `(a, 1)` and `(1, a)`.
pub fn module_structure_match(space: &DualSpace, bimodule: &Bimodule, zhu: &crate::zhu::ZhuAlgebra, u_dim: usize) -> Result<ResidueReport> {
    let m = &space.module;
    let voa = &m.voa;
    let k = bimodule.dim();
    let mut rep = ResidueReport::default();
    let basis: Vec<DualElement> = (0..u_dim * k)
        .map(|idx| {
            let mut phi = Matrix::zeros(u_dim, k);
            phi[(idx % u_dim, idx / u_dim)] = Rat::one();
            space.lift_functional(bimodule, &phi)
        })
        .collect::<Result<_>>()?;
    for &a in &zhu.quotient.reps {
        let wv = voa.weight(a);
        let domain = m.cutoff - wv;
        if domain < 0 {
            continue;
        }
        let tv = theta(voa, &voa.unit(a))?;
        let ws: Vec<usize> = (0..m.dim()).filter(|&w| m.level(w) <= domain).collect();
        let images_r: Vec<Vector> = ws.iter().map(|&w| left_action(m, &tv, &m.unit(w), &space.z)).collect::<Result<_>>()?;
        let images_l: Vec<Vector> = ws.iter().map(|&w| right_action(m, &m.unit(w), &voa.unit(a), &space.z)).collect::<Result<_>>()?;
        let mut dual = [Vec::new(), Vec::new()];
        let mut formula = [Vec::new(), Vec::new()];
        for f in &basis {
            for (slot, side, images) in [(0, Side::L, &images_l), (1, Side::R, &images_r)] {
                let act = space.dual_act(side, a, f, -wv, -wv)?;
                let g = DualElement {
                    f: act.coeffs[&-wv].clone(),
                    domain,
                    certs: BTreeMap::new(),
                };
                dual[slot].push(g.flatten(m, domain));
                formula[slot].push(images.iter().flat_map(|x| f.apply(x)).collect::<Vector>());
            }
        }
        for slot in 0..2 {
            let n = formula[slot].first().map_or(0, |c| c.len());
            rep.checked += 1;
            if Matrix::from_cols(&dual[slot], n) != Matrix::from_cols(&formula[slot], n) {
                rep.failures.push(format!("{} a={a}", if slot == 0 { "(a,1)" } else { "(1,a)" }));
            }
        }
    }
    Ok(rep)
}

/// `Y^R(u, x1)` and `Y^L(v, x2)` coefficients applied in both orders, the
/// intermediate elements certified by search up to `bound`.
pub fn commutativity_check(
    space: &DualSpace,
    f: &DualElement,
    u: usize,
    v: usize,
    e1: (i64, i64),
    e2: (i64, i64),
    bound: i64,
    min_domain: i64,
) -> Result<ResidueReport> {
    let m = &space.module;
    let mut rep = ResidueReport::default();
    let one_way = |first: Side, a: usize, second: Side, b: usize, ea: (i64, i64), eb: (i64, i64)| -> Result<BTreeMap<(i64, i64), DualElement>> {
        let mut out = BTreeMap::new();
        let r1 = space.dual_act(first, a, f, ea.0, ea.1)?;
        for (&x, c) in &r1.coeffs {
            let g = DualElement {
                f: c.clone(),
                domain: r1.domain,
                certs: BTreeMap::new(),
            };
            let Some((k, l)) = space.find_certificate(&g, b, bound, min_domain)? else {
                continue;
            };
            let r2 = space.dual_act_with(second, b, &g, k, l, eb.0, eb.1)?;
            for (&y, c2) in &r2.coeffs {
                out.insert(
                    (x, y),
                    DualElement {
                        f: c2.clone(),
                        domain: r2.domain,
                        certs: BTreeMap::new(),
                    },
                );
            }
        }
        Ok(out)
    };
    let lr = one_way(Side::L, v, Side::R, u, e2, e1)?;
    let rl = one_way(Side::R, u, Side::L, v, e1, e2)?;
    for ((y, x), g) in &lr {
        let Some(h) = rl.get(&(*x, *y)) else { continue };
        let d = g.domain.min(h.domain);
        if d < 0 {
            continue;
        }
        rep.checked += 1;
        if g.flatten(m, d) != h.flatten(m, d) {
            rep.failures.push(format!("u={u} v={v} x1^{x} x2^{y} d={d}"));
        }
    }
    Ok(rep)
}

/// `dual_act` with the certificate `(k, l)` against `(k + 1, l + 1)`.
pub fn certificate_independence(space: &DualSpace, f: &DualElement, v: usize, lo: i64, hi: i64) -> Result<ResidueReport> {
    let m = &space.module;
    let &(k, l) = f.certs.get(&v).ok_or_else(|| Error::Domain("missing certificate".into()))?;
    let mut rep = ResidueReport::default();
    for side in [Side::L, Side::R] {
        let a = space.dual_act_with(side, v, f, k, l, lo, hi)?;
        let b = match space.dual_act_with(side, v, f, k + 1, l + 1, lo, hi) {
            Ok(b) => b,
            Err(Error::Window { .. }) => continue,
            Err(e) => return Err(e),
        };
        for e in lo..=hi {
            rep.checked += 1;
            let ga = DualElement {
                f: a.coeffs[&e].clone(),
                domain: a.domain,
                certs: BTreeMap::new(),
            };
            let gb = DualElement {
                f: b.coeffs[&e].clone(),
                domain: b.domain,
                certs: BTreeMap::new(),
            };
            if ga.flatten(m, b.domain) != gb.flatten(m, b.domain) {
                rep.failures.push(format!("{side:?} v={v} e={e}"));
            }
        }
    }
    Ok(rep)
}

/// Depth-one data of `Ind U` for a module `U` of `A(V)` given by action
/// matrices on the quotient basis.
#[derive(Clone, Debug, Serialize)]
pub struct InducedReport {
    pub u_dim: usize,
    pub u_in_omega: bool,
    pub lowering_vanish: bool,
    /// dimension of the span of depth-one images at each degree
    pub level_dims: BTreeMap<i64, usize>,
    pub omega_images: usize,
    pub omega_images_lifted: bool,
    pub closes_immediately: bool,
}

/// The embedding `u ↦ f_u`, `f_u(w) = ρ([w]) u`, on `W = V` at `z = -1`.
pub fn embed_u(space: &DualSpace, bimodule: &Bimodule, rho: &[Matrix]) -> Result<Vec<DualElement>> {
    let u_dim = rho.first().map_or(0, |r| r.rows);
    let p = bimodule.quotient.projection_matrix();
    let mut out = Vec::new();
    for u in 0..u_dim {
        let mut phi = Matrix::zeros(u_dim, bimodule.dim());
        for (a, r) in rho.iter().enumerate() {
            for i in 0..u_dim {
                phi[(i, a)] = r[(i, u)].clone();
            }
        }
        let _ = &p;
        out.push(space.lift_functional(bimodule, &phi)?);
    }
    Ok(out)
}

/// Applies every `Y^L` mode once to the embedded `U` and checks the
/// sandwich `U ⊂ Ω(Ind U) ⊂ Hom(A(V), U)` at depth one.
pub fn induced_generate(space: &DualSpace, bimodule: &Bimodule, rho: &[Matrix], max_degree: i64) -> Result<InducedReport> {
    let m = &space.module;
    let voa = m.voa.clone();
    let u_dim = rho.first().map_or(0, |r| r.rows);
    let us = embed_u(space, bimodule, rho)?;
    let mut u_in_omega = true;
    for f in &us {
        let mem = space.omega_membership(f)?;
        u_in_omega &= mem.member && mem.vanishes_on_o;
    }
    let mut lowering_vanish = true;
    let mut by_degree: BTreeMap<i64, Vec<DualElement>> = BTreeMap::new();
    let mut images = Vec::new();
    for f in &us {
        for v in 0..voa.dim() {
            let wv = voa.weight(v);
            let Some(&(k, l)) = f.certs.get(&v) else { continue };
            // modes v_n with n ≥ wt v sit at x^{-n-1}, exponents ≤ -wt v - 1
            let res = space.dual_act_with(Side::L, v, f, k, l, -k - l - 1, -wv + max_degree)?;
            for (&e, c) in &res.coeffs {
                let deg = e + wv;
                if deg < 0 {
                    lowering_vanish &= c.is_zero();
                    continue;
                }
                let el = DualElement {
                    f: c.clone(),
                    domain: res.domain,
                    certs: BTreeMap::new(),
                };
                by_degree.entry(deg).or_default().push(el.clone());
                images.push(el);
            }
        }
    }
    let mut level_dims = BTreeMap::new();
    for (deg, els) in &by_degree {
        let d = els.iter().map(|e| e.domain).min().unwrap_or(0);
        let rows: Vec<Vector> = els.iter().map(|e| e.flatten(m, d)).collect();
        let len = rows.first().map_or(0, |r| r.len());
        level_dims.insert(*deg, Echelon::from_rows(rows, len).rank());
    }
    let p = bimodule.quotient.projection_matrix();
    let mut omega_images = 0;
    let mut omega_images_lifted = true;
    for g in &images {
        if g.f.is_zero() {
            continue;
        }
        let mem = space.omega_membership(g)?;
        if mem.member {
            omega_images += 1;
            omega_images_lifted &= lies_in_lifted_span(m, &p, g, u_dim);
        }
    }
    let closes_immediately = by_degree.iter().filter(|(d, _)| **d > 0).all(|(_, els)| els.iter().all(|e| e.f.is_zero()));
    Ok(InducedReport {
        u_dim,
        u_in_omega,
        lowering_vanish,
        level_dims,
        omega_images,
        omega_images_lifted,
        closes_immediately,
    })
}

/// Whether `g = φ ∘ proj` on its domain for some `φ: A(V) → U`.
pub fn lies_in_lifted_span(m: &ModulePresentation, p: &Matrix, g: &DualElement, u_dim: usize) -> bool {
    let cols: Vec<usize> = (0..m.dim()).filter(|&j| m.level(j) <= g.domain).collect();
    let k = p.rows;
    // unknown φ (u_dim × k), equations g[:, j] = φ p[:, j]
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &j in &cols {
        for i in 0..u_dim {
            let mut row = zeros(u_dim * k);
            for a in 0..k {
                row[i * k + a] = p[(a, j)].clone();
            }
            rows.push(row);
            rhs.push(g.f[(i, j)].clone());
        }
    }
    if rows.is_empty() {
        return true;
    }
    let mat = Matrix::from_rows(rows, u_dim * k);
    crate::linalg::solve(&mat, &rhs).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use crate::voa::{make_heisenberg, make_virasoro};
    use crate::zhu::ZhuAlgebra;

    fn setup(z: Rat) -> (Arc<ModulePresentation>, ZhuAlgebra, Bimodule, DualSpace) {
        setup_at(z, 4)
    }

    fn setup_at(z: Rat, n: i64) -> (Arc<ModulePresentation>, ZhuAlgebra, Bimodule, DualSpace) {
        let v = Arc::new(make_virasoro(rat(1, 2), n));
        let a = ZhuAlgebra::build(&v).unwrap();
        let w = Arc::new(ModulePresentation::adjoint(&v));
        let b = Bimodule::build(&w, &z, &a).unwrap();
        let s = DualSpace::new(w.clone(), z).unwrap();
        (w, a, b, s)
    }

    #[test]
    fn lifted_functionals_satisfy_residue_identities() {
        for z in [int(-1), int(2)] {
            let (_, _, b, s) = setup(z);
            let mut phi = Matrix::zeros(1, b.dim());
            for a in 0..b.dim() {
                phi[(0, a)] = int(a as i64 + 2);
            }
            let f = s.lift_functional(&b, &phi).unwrap();
            assert!(s.omega_membership(&f).unwrap().member);
            let rep = residue_identities(&s, &f, 3).unwrap();
            assert!(rep.failures.is_empty(), "{:?}", rep.failures);
            assert!(rep.checked > 0);
        }
    }

    #[test]
    fn vacuum_acts_trivially() {
        let (w, _, b, s) = setup(int(2));
        let phi = Matrix::from_rows(vec![(0..b.dim()).map(|i| int(i as i64 + 1)).collect()], b.dim());
        let f = s.lift_functional(&b, &phi).unwrap();
        let vac = w.voa.vacuum;
        for side in [Side::L, Side::R] {
            let r = s.dual_act(side, vac, &f, -2, 2).unwrap();
            for (e, c) in &r.coeffs {
                if *e == 0 {
                    assert_eq!(*c, f.restrict(&w, r.domain).f);
                } else {
                    assert!(c.is_zero());
                }
            }
        }
    }

    #[test]
    fn random_functional_fails_membership() {
        let (w, _, _, s) = setup(int(-1));
        let mut f = Matrix::zeros(1, w.dim());
        for j in 0..w.dim() {
            f[(0, j)] = int(j as i64 * j as i64 + 1);
        }
        let el = DualElement {
            f,
            domain: w.cutoff,
            certs: BTreeMap::new(),
        };
        let mem = s.omega_membership(&el).unwrap();
        assert!(!mem.member && mem.witness.is_some());
        assert!(mem.consistent());
    }

    #[test]
    fn three_term_identity() {
        let (_, _, b, s) = setup(int(2));
        let phi = Matrix::from_rows(vec![(0..b.dim()).map(|i| rat(i as i64 + 1, 3)).collect()], b.dim());
        let f = s.lift_functional(&b, &phi).unwrap();
        let v = s.module.voa.generator_index(0).unwrap();
        let rep = three_term_check(&s, &f, v, (-4, 2), (-4, 2)).unwrap();
        assert!(rep.failures.is_empty(), "{:#?}", rep.failures);
        assert!(rep.checked > 20);
    }

    #[test]
    fn degree_zero_actions_match_bimodule_formula() {
        for (v, z) in [(Arc::new(make_heisenberg(4)), int(2)), (Arc::new(make_virasoro(rat(1, 2), 4)), int(-1))] {
            let a = ZhuAlgebra::build(&v).unwrap();
            let w = Arc::new(ModulePresentation::adjoint(&v));
            let b = Bimodule::build(&w, &z, &a).unwrap();
            let s = DualSpace::new(w, z).unwrap();
            let rep = module_structure_match(&s, &b, &a, 2).unwrap();
            assert!(rep.failures.is_empty(), "{:?}", rep.failures);
            assert!(rep.checked >= 4);
        }
    }

    #[test]
    fn left_and_right_commute() {
        let (w, _, b, s) = setup_at(int(2), 5);
        let phi = Matrix::from_rows(vec![(0..b.dim()).map(|i| rat(2 * i as i64 + 1, 5)).collect()], b.dim());
        let f = s.lift_functional(&b, &phi).unwrap();
        let om = w.voa.generator_index(0).unwrap();
        let vac = w.voa.vacuum;
        let rep = commutativity_check(&s, &f, om, om, (-2, 0), (-2, 0), 6, 1).unwrap();
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        assert!(rep.checked > 0);
        let rep = commutativity_check(&s, &f, vac, om, (-1, 1), (-2, 0), 6, 1).unwrap();
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
    }

    #[test]
    fn larger_certificate_gives_same_action() {
        let (w, _, b, s) = setup(int(-1));
        let phi = Matrix::from_rows(vec![(0..b.dim()).map(|i| int(3 - i as i64)).collect()], b.dim());
        let f = s.lift_functional(&b, &phi).unwrap();
        let om = w.voa.generator_index(0).unwrap();
        let rep = certificate_independence(&s, &f, om, -3, 1).unwrap();
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        assert!(rep.checked > 0);
    }

    #[test]
    fn induced_depth_one_virasoro() {
        let v = Arc::new(make_virasoro(rat(2, 3), 6));
        let a = ZhuAlgebra::build(&v).unwrap();
        let w = Arc::new(ModulePresentation::adjoint(&v));
        let z = -Rat::one();
        let b = Bimodule::build(&w, &z, &a).unwrap();
        let s = DualSpace::new(w, z).unwrap();
        let rho = a.one_dim_rep(&v.omega, &rat(3, 7)).unwrap();
        let rep = induced_generate(&s, &b, &rho, 2).unwrap();
        assert!(rep.u_in_omega && rep.lowering_vanish, "{rep:?}");
        assert_eq!(rep.level_dims.get(&0), Some(&1));
        assert_eq!(rep.level_dims.get(&1), Some(&1), "{rep:?}");
        assert!(rep.omega_images > 0 && rep.omega_images_lifted, "{rep:?}");
    }

    #[test]
    fn induced_over_unit_algebra_closes() {
        let v = Arc::new(make_virasoro(int(1), 0));
        let a = ZhuAlgebra::build(&v).unwrap();
        let w = Arc::new(ModulePresentation::adjoint(&v));
        let z = -Rat::one();
        let b = Bimodule::build(&w, &z, &a).unwrap();
        let s = DualSpace::new(w, z).unwrap();
        let rho = vec![Matrix::identity(1)];
        let rep = induced_generate(&s, &b, &rho, 2).unwrap();
        assert!(rep.closes_immediately && rep.u_in_omega, "{rep:?}");
    }
}
