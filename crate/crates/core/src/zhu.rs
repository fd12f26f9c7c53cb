//! Zhu's algebra `A(V) = V/O(V)`, the bimodules `A(W, z) = W/O(W, z)` and
//! the lowest-weight functor `Ω`.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::linalg::{axpy, is_zero, sub, zeros, Echelon, Matrix, Vector};
use crate::rat::{fmt_rat, pow, sign, Rat};
use crate::voa::ops::{l1_exponential_terms, res_binomial};
use crate::voa::{ModulePresentation, VoaPresentation};
use crate::{Error, Result};

/// Splits a VOA vector into homogeneous pieces.
pub fn split_weights(voa: &VoaPresentation, v: &[Rat]) -> Vec<(i64, Vector)> {
    let mut out = Vec::new();
    for w in 0..=voa.cutoff {
        let r = voa.range(w);
        if v[r.clone()].iter().all(Zero::is_zero) {
            continue;
        }
        let mut part = zeros(voa.dim());
        for i in r {
            part[i] = v[i].clone();
        }
        out.push((w, part));
    }
    out
}

/// `Res_x x^{-2} (1 - z x)^{wt v} Y(v, x) w`.
pub fn o_element(m: &ModulePresentation, v: &[Rat], w: &[Rat], z: &Rat) -> Result<Vector> {
    let mut out = zeros(m.dim());
    for (wt, part) in split_weights(&m.voa, v) {
        axpy(&mut out, &Rat::one(), &res_binomial(m, &part, w, -2, wt, &-z.clone())?);
    }
    Ok(out)
}

/// `u * v = Res_x x^{-1} (1 + x)^{wt u} Y(u, x) v`.
pub fn star(voa: &Arc<VoaPresentation>, u: &[Rat], v: &[Rat]) -> Result<Vector> {
    let m = ModulePresentation::adjoint(voa);
    left_action(&m, u, v, &-Rat::one())
}

/// `v *_{P(z)} w = Res_x (-z)^{-wt v} x^{-1} (1 - z x)^{wt v} Y(v, x) w`.
pub fn left_action(m: &ModulePresentation, v: &[Rat], w: &[Rat], z: &Rat) -> Result<Vector> {
    let mut out = zeros(m.dim());
    let mz = -z.clone();
    for (wt, part) in split_weights(&m.voa, v) {
        axpy(&mut out, &pow(&mz, -wt), &res_binomial(m, &part, w, -1, wt, &mz)?);
    }
    Ok(out)
}

/// `w *_{P(z)} v = Res_x (-z)^{-wt v} x^{-1} (1 - z x)^{wt v - 1} Y(v, x) w`.
pub fn right_action(m: &ModulePresentation, w: &[Rat], v: &[Rat], z: &Rat) -> Result<Vector> {
    let mut out = zeros(m.dim());
    let mz = -z.clone();
    for (wt, part) in split_weights(&m.voa, v) {
        axpy(&mut out, &pow(&mz, -wt), &res_binomial(m, &part, w, -1, wt - 1, &mz)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZhuMode {
    Star,
    LeftPz,
    RightPz,
}

/// Bilinear residue products: `u * v`, `u *_{P(z)} w` or `w *_{P(z)} u`.
pub fn zhu_mul(m: &ModulePresentation, a: &[Rat], b: &[Rat], mode: ZhuMode, z: &Rat) -> Result<Vector> {
    match mode {
        ZhuMode::Star => left_action(m, a, b, &-Rat::one()),
        ZhuMode::LeftPz => left_action(m, a, b, z),
        ZhuMode::RightPz => right_action(m, a, b, z),
    }
}

/// `θ(v) = e^{L(1)} (-1)^{L(0)} v`.
pub fn theta(voa: &Arc<VoaPresentation>, v: &[Rat]) -> Result<Vector> {
    let m = ModulePresentation::adjoint(voa);
    let mut out = zeros(voa.dim());
    for (wt, part) in split_weights(voa, v) {
        for t in l1_exponential_terms(&m, &part)? {
            axpy(&mut out, &sign(wt), &t);
        }
    }
    Ok(out)
}

fn top_weight(n: usize, wt: impl Fn(usize) -> i64, v: &[Rat]) -> i64 {
    (0..n).filter(|&i| !v[i].is_zero()).map(wt).max().unwrap_or(0)
}

fn descending_order(dim: usize) -> Vec<usize> {
    (0..dim).rev().collect()
}

/// Spanning elements of `O(W, z)` whose terms all stay inside the cutoff.
pub fn o_generators(m: &ModulePresentation, z: &Rat) -> Result<Vec<Vector>> {
    if z.is_zero() {
        return Err(Error::Domain("O(W, z) needs z != 0".into()));
    }
    let voa = &m.voa;
    let mut gens = Vec::new();
    for v in 0..voa.dim() {
        for w in 0..m.dim() {
            if voa.weight(v) + m.level(w) + 1 > m.cutoff {
                continue;
            }
            let g = o_element(m, &voa.unit(v), &m.unit(w), z)?;
            if !is_zero(&g) {
                gens.push(g);
            }
        }
    }
    Ok(gens)
}

/// `O(W, z) ∩ W_{≤N}` in reduced echelon form, pivots taken from the top
/// weight down so that low-weight basis vectors represent the quotient.
pub fn o_subspace(m: &ModulePresentation, z: &Rat) -> Result<Echelon> {
    Ok(Echelon::with_order(o_generators(m, z)?, descending_order(m.dim())))
}

/// Quotient of a graded space by a subspace given in echelon form.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub o_space: Echelon,
    /// basis indices representing the quotient
    pub reps: Vec<usize>,
}

impl Quotient {
    pub fn new(o_space: Echelon) -> Self {
        let reps = o_space.free_columns();
        Quotient { o_space, reps }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn project(&self, v: &[Rat]) -> Vector {
        let r = self.o_space.reduce(v);
        self.reps.iter().map(|&i| r[i].clone()).collect()
    }

    pub fn lift(&self, coords: &[Rat]) -> Vector {
        let mut v = zeros(self.o_space.dim());
        for (c, &i) in coords.iter().zip(&self.reps) {
            v[i] = c.clone();
        }
        v
    }

    pub fn projection_matrix(&self) -> Matrix {
        let n = self.o_space.dim();
        let cols: Vec<Vector> = (0..n).map(|j| self.project(&crate::linalg::unit(n, j))).collect();
        Matrix::from_cols(&cols, self.dim())
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.o_space.contains(v)
    }
}

/// Pass/skip/fail tally of one family of checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub checked: usize,
    pub skipped: usize,
    pub failed: usize,
    pub beyond: usize,
    pub witness: Option<String>,
}

impl CheckTally {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn coverage(&self) -> f64 {
        let total = self.checked + self.skipped;
        if total == 0 {
            1.0
        } else {
            self.checked as f64 / total as f64
        }
    }

    /// `inside` marks checks whose inputs lie within the cutoff; escapes
    /// there count as skips, escapes elsewhere are simply out of range.
    fn record(&mut self, inside: bool, r: Result<bool>, witness: impl FnOnce() -> String) -> Result<()> {
        match r {
            Ok(true) => self.checked += 1,
            Ok(false) => {
                self.checked += 1;
                self.failed += 1;
                if self.witness.is_none() {
                    self.witness = Some(witness());
                }
            }
            Err(Error::CutoffEscape { .. }) if inside => self.skipped += 1,
            Err(Error::CutoffEscape { .. }) => self.beyond += 1,
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

/// Structure constants of `A(V)` at a cutoff. Products whose representative
/// would escape the cutoff are unknown.
#[derive(Clone, Debug)]
pub struct ZhuAlgebra {
    pub voa: Arc<VoaPresentation>,
    pub quotient: Quotient,
    /// `mult[i][j]`: coordinates of `[r_i] * [r_j]`
    pub mult: Vec<Vec<Option<Vector>>>,
    pub unit: Vector,
    pub omega: Vector,
    pub theta: Matrix,
}

impl ZhuAlgebra {
    pub fn build(voa: &Arc<VoaPresentation>) -> Result<Self> {
        let m = ModulePresentation::adjoint(voa);
        let quotient = Quotient::new(o_subspace(&m, &-Rat::one())?);
        let k = quotient.dim();
        let mut mult = vec![vec![None; k]; k];
        for (i, &ri) in quotient.reps.iter().enumerate() {
            for (j, &rj) in quotient.reps.iter().enumerate() {
                if voa.weight(ri) + voa.weight(rj) > voa.cutoff {
                    continue;
                }
                mult[i][j] = Some(quotient.project(&star(voa, &voa.unit(ri), &voa.unit(rj))?));
            }
        }
        let unit = quotient.project(&voa.vacuum_vec());
        let omega = quotient.project(&voa.omega);
        let cols: Vec<Vector> = quotient
            .reps
            .iter()
            .map(|&r| theta(voa, &voa.unit(r)).map(|t| quotient.project(&t)))
            .collect::<Result<_>>()?;
        let theta = Matrix::from_cols(&cols, k);
        Ok(ZhuAlgebra {
            voa: voa.clone(),
            quotient,
            mult,
            unit,
            omega,
            theta,
        })
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn rep_vec(&self, i: usize) -> Vector {
        self.voa.unit(self.quotient.reps[i])
    }

    pub fn project(&self, v: &[Rat]) -> Vector {
        self.quotient.project(v)
    }

    pub fn lift(&self, c: &[Rat]) -> Vector {
        self.quotient.lift(c)
    }

    /// Product of quotient elements when every needed structure constant is known.
    pub fn mul(&self, a: &[Rat], b: &[Rat]) -> Option<Vector> {
        let mut out = zeros(self.dim());
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                axpy(&mut out, &(x * y), self.mult[i][j].as_ref()?);
            }
        }
        Some(out)
    }

    /// Fraction of quotient-basis products that are known.
    pub fn known_fraction(&self) -> f64 {
        let k = self.dim();
        if k == 0 {
            return 1.0;
        }
        let known = self.mult.iter().flatten().filter(|x| x.is_some()).count();
        known as f64 / (k * k) as f64
    }

    /// Rank of the projections of `g^{*0}, g^{*1}, ...` computed in `V` up to
    /// the cutoff; equals the quotient dimension when `[g]` generates.
    pub fn power_rank(&self, g: &[Rat]) -> Result<(usize, Vec<Vector>)> {
        let voa = &self.voa;
        let wg = voa.weight_of(g).ok_or_else(|| Error::Domain("generator must be homogeneous".into()))?;
        let mut p = voa.vacuum_vec();
        let mut powers = vec![self.project(&p)];
        let mut wt = 0;
        while wt + wg <= voa.cutoff && wg > 0 {
            p = star(voa, g, &p)?;
            wt += wg;
            powers.push(self.project(&p));
        }
        let rank = Matrix::from_rows(powers.clone(), self.dim()).rank();
        Ok((rank, powers))
    }

    /// The one-dimensional representation with `[g] ↦ value`, as `1 × 1`
    /// matrices on the quotient basis; needs `[g]` to generate.
    pub fn one_dim_rep(&self, g: &[Rat], value: &Rat) -> Result<Vec<Matrix>> {
        let (rank, powers) = self.power_rank(g)?;
        if rank < self.dim() {
            return Err(Error::Domain(format!("[g] generates only {rank} of {} dimensions", self.dim())));
        }
        let basis = Matrix::from_cols(&powers, self.dim());
        (0..self.dim())
            .map(|i| {
                let c = crate::linalg::solve(&basis, &crate::linalg::unit(self.dim(), i)).ok_or_else(|| Error::Domain("power basis is singular".into()))?;
                let mut x = Rat::zero();
                for (k, ck) in c.iter().enumerate() {
                    x += ck * pow(value, k as i64);
                }
                Ok(Matrix::from_rows(vec![vec![x]], 1))
            })
            .collect()
    }

    pub fn checks(&self) -> Result<ZhuChecks> {
        let voa = &self.voa;
        let q = &self.quotient;
        let n = voa.dim();
        let nc = voa.cutoff;
        let mut c = ZhuChecks::default();
        let basis: Vec<Vector> = (0..n).map(|i| voa.unit(i)).collect();
        let in_o = |v: Result<Vector>| v.map(|x| q.contains(&x));
        for u in 0..n {
            for (r, o) in q.o_space.rows().iter().enumerate() {
                c.ideal.record(
                    voa.weight(u) + top_weight(voa.dim(), |i| voa.weight(i), o) <= nc,
                    in_o(star(voa, &basis[u], o)),
                    || format!("u={u} * O-row {r}"),
                )?;
                c.ideal.record(
                    voa.weight(u) + top_weight(voa.dim(), |i| voa.weight(i), o) <= nc,
                    in_o(star(voa, o, &basis[u])),
                    || format!("O-row {r} * u={u}"),
                )?;
            }
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    let r = (|| {
                        let uv = star(voa, &basis[u], &basis[v])?;
                        let lhs = star(voa, &uv, &basis[w])?;
                        let vw = star(voa, &basis[v], &basis[w])?;
                        let rhs = star(voa, &basis[u], &vw)?;
                        Ok(q.contains(&sub(&lhs, &rhs)))
                    })();
                    c.assoc
                        .record(voa.weight(u) + voa.weight(v) + voa.weight(w) <= nc, r, || format!("({u}*{v})*{w}"))?;
                }
            }
        }
        for v in 0..n {
            c.identity
                .record(true, star(voa, &voa.vacuum_vec(), &basis[v]).map(|x| x == basis[v]), || format!("1*{v}"))?;
            c.identity
                .record(true, star(voa, &basis[v], &voa.vacuum_vec()).map(|x| q.contains(&sub(&x, &basis[v]))), || {
                    format!("{v}*1")
                })?;
            let r = (|| Ok(q.contains(&sub(&star(voa, &voa.omega, &basis[v])?, &star(voa, &basis[v], &voa.omega)?))))();
            c.central.record(voa.weight(v) + 2 <= nc, r, || format!("omega*{v}"))?;
            let tt = theta(voa, &theta(voa, &basis[v])?)?;
            c.theta.record(true, Ok(tt == basis[v]), || format!("theta^2 {v}"))?;
        }
        for (r, o) in q.o_space.rows().iter().enumerate() {
            c.theta.record(true, theta(voa, o).map(|t| q.contains(&t)), || format!("theta(O-row {r})"))?;
        }
        for u in 0..n {
            for v in 0..n {
                let r = (|| {
                    let lhs = theta(voa, &star(voa, &basis[u], &basis[v])?)?;
                    let rhs = star(voa, &theta(voa, &basis[v])?, &theta(voa, &basis[u])?)?;
                    Ok(q.contains(&sub(&lhs, &rhs)))
                })();
                c.theta.record(voa.weight(u) + voa.weight(v) <= nc, r, || format!("theta({u}*{v})"))?;
            }
        }
        Ok(c)
    }

    pub fn report_json(&self, checks: &ZhuChecks) -> Value {
        let mut sc = Vec::new();
        for (i, row) in self.mult.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if let Some(p) = p {
                    for (k, c) in p.iter().enumerate() {
                        if !c.is_zero() {
                            sc.push(json!([i, j, k, fmt_rat(c)]));
                        }
                    }
                }
            }
        }
        let labels: Vec<&str> = self.quotient.reps.iter().map(|&r| self.voa.basis[r].label.as_str()).collect();
        json!({
            "cutoff": self.voa.cutoff,
            "quotientDims": self.dim(),
            "quotientBasis": labels,
            "structureConstants": sc,
            "checks": serde_json::to_value(checks).expect("serializable"),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ZhuChecks {
    pub ideal: CheckTally,
    pub assoc: CheckTally,
    pub identity: CheckTally,
    pub central: CheckTally,
    pub theta: CheckTally,
}

impl ZhuChecks {
    pub fn passed(&self) -> bool {
        [&self.ideal, &self.assoc, &self.identity, &self.central, &self.theta]
            .iter()
            .all(|t| t.passed())
    }
}

/// `A(W, z)` with left and right `A(V)`-actions on a representative basis.
/// A column of an action matrix is `None` when the product escapes the cutoff.
#[derive(Clone, Debug)]
pub struct Bimodule {
    pub module: Arc<ModulePresentation>,
    pub z: Rat,
    pub quotient: Quotient,
    pub left: Vec<Vec<Option<Vector>>>,
    pub right: Vec<Vec<Option<Vector>>>,
}

impl Bimodule {
    pub fn build(m: &Arc<ModulePresentation>, z: &Rat, a: &ZhuAlgebra) -> Result<Self> {
        let quotient = Quotient::new(o_subspace(m, z)?);
        let voa = &m.voa;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for &ra in &a.quotient.reps {
            let (mut lc, mut rc) = (Vec::new(), Vec::new());
            for &rw in &quotient.reps {
                let (v, w) = (voa.unit(ra), m.unit(rw));
                lc.push(opt(left_action(m, &v, &w, z))?.map(|x| quotient.project(&x)));
                rc.push(opt(right_action(m, &w, &v, z))?.map(|x| quotient.project(&x)));
            }
            left.push(lc);
            right.push(rc);
        }
        Ok(Bimodule {
            module: m.clone(),
            z: z.clone(),
            quotient,
            left,
            right,
        })
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    /// Action matrix of the `a`-th algebra basis element, if fully known.
    pub fn left_matrix(&self, a: usize) -> Option<Matrix> {
        let cols: Option<Vec<Vector>> = self.left[a].iter().cloned().collect();
        cols.map(|c| Matrix::from_cols(&c, self.dim()))
    }

    pub fn right_matrix(&self, a: usize) -> Option<Matrix> {
        let cols: Option<Vec<Vector>> = self.right[a].iter().cloned().collect();
        cols.map(|c| Matrix::from_cols(&c, self.dim()))
    }

    /// Bimodule axioms checked on representatives in `W`, modulo `O(W, z)`.
    pub fn checks(&self, a: &ZhuAlgebra) -> Result<BimoduleChecks> {
        let m = &self.module;
        let voa = &m.voa;
        let z = &self.z;
        let q = &self.quotient;
        let nc = m.cutoff.min(voa.cutoff);
        let mut c = BimoduleChecks::default();
        let nv = voa.dim();
        let nw = m.dim();
        let vb: Vec<Vector> = (0..nv).map(|i| voa.unit(i)).collect();
        let wb: Vec<Vector> = (0..nw).map(|i| m.unit(i)).collect();
        for w in 0..nw {
            c.unit
                .record(true, left_action(m, &voa.vacuum_vec(), &wb[w], z).map(|x| q.contains(&sub(&x, &wb[w]))), || {
                    format!("1.w{w}")
                })?;
            c.unit.record(
                true,
                right_action(m, &wb[w], &voa.vacuum_vec(), z).map(|x| q.contains(&sub(&x, &wb[w]))),
                || format!("w{w}.1"),
            )?;
        }
        for u in 0..nv {
            for v in 0..nv {
                for w in 0..nw {
                    let r = (|| {
                        let uv = star(voa, &vb[u], &vb[v])?;
                        let lhs = left_action(m, &uv, &wb[w], z)?;
                        let rhs = left_action(m, &vb[u], &left_action(m, &vb[v], &wb[w], z)?, z)?;
                        Ok(q.contains(&sub(&lhs, &rhs)))
                    })();
                    c.left_assoc
                        .record(voa.weight(u) + voa.weight(v) + m.level(w) <= nc, r, || format!("({u}*{v}).w{w}"))?;
                    let r = (|| {
                        let uv = star(voa, &vb[u], &vb[v])?;
                        let lhs = right_action(m, &wb[w], &uv, z)?;
                        let rhs = right_action(m, &right_action(m, &wb[w], &vb[u], z)?, &vb[v], z)?;
                        Ok(q.contains(&sub(&lhs, &rhs)))
                    })();
                    c.right_assoc
                        .record(voa.weight(u) + voa.weight(v) + m.level(w) <= nc, r, || format!("w{w}.({u}*{v})"))?;
                    let r = (|| {
                        let lhs = right_action(m, &left_action(m, &vb[u], &wb[w], z)?, &vb[v], z)?;
                        let rhs = left_action(m, &vb[u], &right_action(m, &wb[w], &vb[v], z)?, z)?;
                        Ok(q.contains(&sub(&lhs, &rhs)))
                    })();
                    c.commute
                        .record(voa.weight(u) + voa.weight(v) + m.level(w) <= nc, r, || format!("({u}.w{w}).{v}"))?;
                }
            }
        }
        for u in 0..nv {
            for (r, o) in q.o_space.rows().iter().enumerate() {
                c.descends.record(
                    voa.weight(u) + top_weight(nw, |i| m.level(i), o) <= nc,
                    left_action(m, &vb[u], o, z).map(|x| q.contains(&x)),
                    || format!("{u}.O-row {r}"),
                )?;
                c.descends.record(
                    voa.weight(u) + top_weight(nw, |i| m.level(i), o) <= nc,
                    right_action(m, o, &vb[u], z).map(|x| q.contains(&x)),
                    || format!("O-row {r}.{u}"),
                )?;
            }
        }
        for (r, o) in a.quotient.o_space.rows().iter().enumerate() {
            for w in 0..nw {
                c.descends.record(
                    top_weight(nv, |i| voa.weight(i), o) + m.level(w) <= nc,
                    left_action(m, o, &wb[w], z).map(|x| q.contains(&x)),
                    || format!("O(V)-row {r}.w{w}"),
                )?;
                c.descends.record(
                    top_weight(nv, |i| voa.weight(i), o) + m.level(w) <= nc,
                    right_action(m, &wb[w], o, z).map(|x| q.contains(&x)),
                    || format!("w{w}.O(V)-row {r}"),
                )?;
            }
        }
        Ok(c)
    }

    pub fn report_json(&self, checks: &BimoduleChecks) -> Value {
        let mat = |t: &Vec<Vec<Option<Vector>>>| -> Vec<Value> {
            t.iter()
                .map(|cols| {
                    Value::Array(
                        cols.iter()
                            .map(|c| match c {
                                Some(c) => Value::Array(c.iter().map(|x| Value::String(fmt_rat(x))).collect()),
                                None => Value::Null,
                            })
                            .collect(),
                    )
                })
                .collect()
        };
        let labels: Vec<&str> = self.quotient.reps.iter().map(|&r| self.module.basis[r].label.as_str()).collect();
        json!({
            "z": fmt_rat(&self.z),
            "cutoff": self.module.cutoff,
            "quotientDims": self.dim(),
            "quotientBasis": labels,
            "left": mat(&self.left),
            "right": mat(&self.right),
            "checks": serde_json::to_value(checks).expect("serializable"),
        })
    }
}

fn opt<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::CutoffEscape { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BimoduleChecks {
    pub unit: CheckTally,
    pub left_assoc: CheckTally,
    pub right_assoc: CheckTally,
    pub commute: CheckTally,
    pub descends: CheckTally,
}

impl BimoduleChecks {
    pub fn passed(&self) -> bool {
        [&self.unit, &self.left_assoc, &self.right_assoc, &self.commute, &self.descends]
            .iter()
            .all(|t| t.passed())
    }
}

/// `Ω(W)` together with the `A(V)`-action `o(v) = v_{wt v - 1}`.
#[derive(Clone, Debug)]
pub struct OmegaSpace {
    pub basis: Vec<Vector>,
    pub space: Echelon,
}

/// Kernel of `v_n` for `n ≥ wt v`, over the given homogeneous vectors `vs`
/// of `V` (all basis vectors when `None`).
pub fn omega_subspace_for(m: &ModulePresentation, vs: Option<&[Vector]>) -> Result<OmegaSpace> {
    let voa = &m.voa;
    let all: Vec<Vector>;
    let vs = match vs {
        Some(v) => v,
        None => {
            all = (0..voa.dim()).map(|i| voa.unit(i)).collect();
            &all
        }
    };
    let mut basis = Vec::new();
    for lvl in 0..=m.cutoff {
        let range = m.range(lvl);
        let mut rows: Vec<Vector> = Vec::new();
        for v in vs {
            let Some(wv) = voa.weight_of(v) else { continue };
            for n in wv..(wv + lvl) {
                let cols: Vec<Vector> = range.clone().map(|j| m.act(v, n, &m.unit(j))).collect::<Result<_>>()?;
                for r in 0..m.dim() {
                    let row: Vector = cols.iter().map(|c| c[r].clone()).collect();
                    if !is_zero(&row) {
                        rows.push(row);
                    }
                }
            }
        }
        let k = Matrix::from_rows(rows, range.len()).nullspace();
        for kv in k {
            let mut full = zeros(m.dim());
            for (j, c) in range.clone().zip(kv) {
                full[j] = c;
            }
            basis.push(full);
        }
    }
    let space = Echelon::from_rows(basis.clone(), m.dim());
    Ok(OmegaSpace { basis, space })
}

pub fn omega_subspace(m: &ModulePresentation) -> Result<OmegaSpace> {
    omega_subspace_for(m, None)
}

impl OmegaSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Matrix of `o(v)` in the stored basis; errors if `Ω` is not preserved.
    pub fn action_matrix(&self, m: &ModulePresentation, v: &[Rat]) -> Result<Matrix> {
        let mut cols = Vec::new();
        let coords = Matrix::from_cols(&self.basis, m.dim());
        for b in &self.basis {
            let mut img = zeros(m.dim());
            for (wt, part) in split_weights(&m.voa, v) {
                axpy(&mut img, &Rat::one(), &m.act(&part, wt - 1, b)?);
            }
            let c = crate::linalg::solve(&coords, &img).ok_or_else(|| Error::Domain("Ω(W) not preserved by o(v)".into()))?;
            cols.push(c);
        }
        Ok(Matrix::from_cols(&cols, self.dim()))
    }

    /// `A(V)`-action matrices for each quotient basis element of `a`.
    pub fn zhu_action(&self, m: &ModulePresentation, a: &ZhuAlgebra) -> Result<Vec<Matrix>> {
        (0..a.dim()).map(|i| self.action_matrix(m, &a.rep_vec(i))).collect()
    }
}

/// Coordinates of `x` in the span of `basis`.
pub fn coords_in(basis: &[Vector], x: &[Rat]) -> Option<Vector> {
    if basis.is_empty() {
        return if is_zero(x) { Some(vec![]) } else { None };
    }
    crate::linalg::solve(&Matrix::from_cols(basis, x.len()), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scaled;
    use crate::rat::{int, rat};
    use crate::voa::{make_heisenberg, make_virasoro};

    #[test]
    fn virasoro_o_element_and_product() {
        let v = Arc::new(make_virasoro(rat(1, 2), 6));
        let m = ModulePresentation::adjoint(&v);
        let w = v.omega.clone();
        let g = o_element(&m, &w, &v.vacuum_vec(), &int(-1)).unwrap();
        let lw = v.l_op(-1, &w).unwrap();
        let expect: Vector = lw.iter().zip(&w).map(|(a, b)| a + b * int(2)).collect();
        assert_eq!(g, expect);
        let ww = star(&v, &w, &w).unwrap();
        let l2w = v.l_op(-2, &w).unwrap();
        let mut e = l2w;
        axpy(&mut e, &int(2), &lw);
        axpy(&mut e, &int(2), &w);
        assert_eq!(ww, e);
        assert_eq!(theta(&v, &w).unwrap(), w);
    }

    #[test]
    fn zhu_dims() {
        let h = Arc::new(make_heisenberg(5));
        let a = ZhuAlgebra::build(&h).unwrap();
        assert_eq!(a.dim(), 6);
        let g = h.unit(h.generator_index(0).unwrap());
        assert_eq!(a.power_rank(&g).unwrap().0, 6);
        assert_eq!(theta(&h, &g).unwrap(), scaled(&g, &int(-1)));
        let v = Arc::new(make_virasoro(int(1), 6));
        let b = ZhuAlgebra::build(&v).unwrap();
        assert_eq!(b.dim(), 4);
        assert_eq!(b.power_rank(&v.omega).unwrap().0, 4);
        let t = Arc::new(make_virasoro(int(1), 0));
        assert_eq!(ZhuAlgebra::build(&t).unwrap().dim(), 1);
    }

    #[test]
    fn zhu_checks_pass() {
        let v = Arc::new(make_virasoro(rat(1, 2), 6));
        let a = ZhuAlgebra::build(&v).unwrap();
        let c = a.checks().unwrap();
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn left_action_on_vacuum() {
        let v = Arc::new(make_virasoro(rat(1, 2), 5));
        let m = ModulePresentation::adjoint(&v);
        let z = rat(1, 3);
        let r = left_action(&m, &v.omega, &v.vacuum_vec(), &z).unwrap();
        assert_eq!(r, scaled(&v.omega, &pow(&-z, -2)));
    }

    #[test]
    fn heisenberg_omega_is_vacuum_line() {
        let h = Arc::new(make_heisenberg(3));
        let o = omega_subspace(&ModulePresentation::adjoint(&h)).unwrap();
        assert_eq!(o.dim(), 1);
        assert_eq!(o.basis[0], h.vacuum_vec());
    }

    #[test]
    fn bimodule_axioms_and_rescaling() {
        let v = Arc::new(make_virasoro(rat(1, 2), 5));
        let a = ZhuAlgebra::build(&v).unwrap();
        let w = Arc::new(ModulePresentation::adjoint(&v));
        for z in [int(-1), int(2), rat(1, 3)] {
            let b = Bimodule::build(&w, &z, &a).unwrap();
            let c = b.checks(&a).unwrap();
            assert!(c.passed(), "{z} {c:?}");
            let r = Arc::new(crate::voa::rescale_module(&w, &(-Rat::one() / &z)).unwrap());
            let b2 = Bimodule::build(&r, &int(-1), &a).unwrap();
            assert!(b.quotient.o_space == b2.quotient.o_space);
            assert_eq!(b.left, b2.left);
            assert_eq!(b.right, b2.right);
            eprintln!("z={z} dim={} {:?}", b.dim(), c);
        }
    }
}
