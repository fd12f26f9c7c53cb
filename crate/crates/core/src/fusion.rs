//! Structure-constant algebras, modules and bimodules, the tensor product
//! over an algebra and the fusion dimension
//! `dim Hom_A(B ⊗_A U1, U2)`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::linalg::{axpy, commutant_dim, unit, zeros, Echelon, Matrix, Vector};
use crate::rat::{fmt_rat, parse_rat, rat, Rat};
use crate::zhu::{Bimodule, ZhuAlgebra};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FinAlgebra {
    pub dim: usize,
    /// `mult[i][j] = e_i e_j` where known
    pub mult: Vec<Vec<Option<Vector>>>,
    pub unit: Vector,
    pub theta: Option<Matrix>,
}

/// A left module; matrices may be missing for elements whose action is unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct FinModule {
    pub dim: usize,
    pub action: Vec<Option<Matrix>>,
}

/// A square matrix some of whose columns may be unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialMatrix {
    pub rows: usize,
    pub cols: Vec<Option<Vector>>,
}

impl PartialMatrix {
    pub fn from_matrix(m: &Matrix) -> Self {
        PartialMatrix {
            rows: m.rows,
            cols: (0..m.cols).map(|j| Some(m.col(j))).collect(),
        }
    }

    pub fn full(&self) -> Option<Matrix> {
        let cols: Option<Vec<Vector>> = self.cols.iter().cloned().collect();
        cols.map(|c| Matrix::from_cols(&c, self.rows))
    }

    /// `P⁻¹ M P`, column `j` known when every column it needs is.
    pub fn conjugate(&self, p: &Matrix, p_inv: &Matrix) -> PartialMatrix {
        let cols = (0..p.cols)
            .map(|j| {
                let mut acc = zeros(self.rows);
                for k in 0..p.rows {
                    let c = &p[(k, j)];
                    if !c.is_zero() {
                        axpy(&mut acc, c, self.cols[k].as_ref()?);
                    }
                }
                Some(p_inv.apply(&acc))
            })
            .collect();
        PartialMatrix { rows: self.rows, cols }
    }
}

fn combine_partial(ms: &[PartialMatrix], x: &[Rat], n: usize) -> PartialMatrix {
    let cols = (0..n)
        .map(|j| {
            let mut acc = zeros(n);
            for (m, c) in ms.iter().zip(x) {
                if !c.is_zero() {
                    axpy(&mut acc, c, m.cols[j].as_ref()?);
                }
            }
            Some(acc)
        })
        .collect();
    PartialMatrix { rows: n, cols }
}

fn full_partials(ms: Vec<Matrix>) -> Vec<PartialMatrix> {
    ms.iter().map(PartialMatrix::from_matrix).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinBimodule {
    pub dim: usize,
    pub left: Vec<PartialMatrix>,
    /// `right[a] b = b · e_a`
    pub right: Vec<PartialMatrix>,
}

fn combine(ms: &[Option<Matrix>], x: &[Rat], n: usize) -> Option<Matrix> {
    let mut out = Matrix::zeros(n, n);
    for (m, c) in ms.iter().zip(x) {
        if !c.is_zero() {
            out = out.add(&m.as_ref()?.scale(c));
        }
    }
    Some(out)
}

impl FinAlgebra {
    pub fn unit_algebra() -> Self {
        FinAlgebra {
            dim: 1,
            mult: vec![vec![Some(vec![Rat::one()])]],
            unit: vec![Rat::one()],
            theta: Some(Matrix::identity(1)),
        }
    }

    /// `ℚ^k` with orthogonal idempotents.
    pub fn split(k: usize) -> Self {
        let mult = (0..k)
            .map(|i| (0..k).map(|j| Some(if i == j { unit(k, i) } else { zeros(k) })).collect())
            .collect();
        FinAlgebra {
            dim: k,
            mult,
            unit: vec![Rat::one(); k],
            theta: Some(Matrix::identity(k)),
        }
    }

    /// `ℚ[x]/(x^k)` on the basis `1, x, ..., x^{k-1}`.
    pub fn truncated_poly(k: usize) -> Self {
        let mult = (0..k)
            .map(|i| (0..k).map(|j| Some(if i + j < k { unit(k, i + j) } else { zeros(k) })).collect())
            .collect();
        FinAlgebra {
            dim: k,
            mult,
            unit: unit(k, 0),
            theta: Some(Matrix::identity(k)),
        }
    }

    /// `M_2(ℚ)` on `E11, E12, E21, E22` with `θ` the transpose.
    pub fn matrix2() -> Self {
        let idx = |a: usize, b: usize| 2 * a + b;
        let mut mult = vec![vec![None; 4]; 4];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        mult[idx(a, b)][idx(c, d)] = Some(if b == c { unit(4, idx(a, d)) } else { zeros(4) });
                    }
                }
            }
        }
        let mut theta = Matrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                theta[(idx(b, a), idx(a, b))] = Rat::one();
            }
        }
        let mut u = zeros(4);
        u[0] = Rat::one();
        u[3] = Rat::one();
        FinAlgebra {
            dim: 4,
            mult,
            unit: u,
            theta: Some(theta),
        }
    }

    pub fn mul(&self, x: &[Rat], y: &[Rat]) -> Option<Vector> {
        let mut out = zeros(self.dim);
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                axpy(&mut out, &(a * b), self.mult[i][j].as_ref()?);
            }
        }
        Some(out)
    }

    /// Unit laws, associativity, and `θ` an involutive anti-automorphism,
    /// on every product that is known.
    pub fn is_valid(&self) -> bool {
        let e = |i| unit(self.dim, i);
        for i in 0..self.dim {
            for side in [self.mul(&self.unit, &e(i)), self.mul(&e(i), &self.unit)] {
                if side.is_some_and(|p| p != e(i)) {
                    return false;
                }
            }
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let l = self.mul(&e(i), &e(j)).and_then(|p| self.mul(&p, &e(k)));
                    let r = self.mul(&e(j), &e(k)).and_then(|p| self.mul(&e(i), &p));
                    if let (Some(l), Some(r)) = (l, r) {
                        if l != r {
                            return false;
                        }
                    }
                }
                if let (Some(t), Some(p)) = (&self.theta, self.mult[i][j].as_ref()) {
                    let lhs = t.apply(p);
                    if self.mul(&t.col(j), &t.col(i)).is_some_and(|r| r != lhs) {
                        return false;
                    }
                }
            }
        }
        if let Some(t) = &self.theta {
            if t.mul(t) != Matrix::identity(self.dim) {
                return false;
            }
        }
        true
    }

    pub fn regular_bimodule(&self) -> FinBimodule {
        let n = self.dim;
        let left = (0..n)
            .map(|a| PartialMatrix {
                rows: n,
                cols: (0..n).map(|b| self.mult[a][b].clone()).collect(),
            })
            .collect();
        let right = (0..n)
            .map(|a| PartialMatrix {
                rows: n,
                cols: (0..n).map(|b| self.mult[b][a].clone()).collect(),
            })
            .collect();
        FinBimodule { dim: n, left, right }
    }

    pub fn from_zhu(a: &ZhuAlgebra) -> Self {
        FinAlgebra {
            dim: a.dim(),
            mult: a.mult.clone(),
            unit: a.unit.clone(),
            theta: Some(a.theta.clone()),
        }
    }
}

impl FinModule {
    pub fn new(action: Vec<Matrix>) -> Self {
        let dim = action.first().map_or(0, |m| m.rows);
        FinModule {
            dim,
            action: action.into_iter().map(Some).collect(),
        }
    }

    pub fn zero(a: &FinAlgebra) -> Self {
        FinModule {
            dim: 0,
            action: vec![Some(Matrix::zeros(0, 0)); a.dim],
        }
    }

    pub fn act(&self, x: &[Rat]) -> Option<Matrix> {
        combine(&self.action, x, self.dim)
    }

    /// `ρ(1) = id` and `ρ(e_i)ρ(e_j) = ρ(e_i e_j)` wherever everything is known.
    pub fn is_module(&self, a: &FinAlgebra) -> bool {
        if self.act(&a.unit).is_some_and(|u| u != Matrix::identity(self.dim)) {
            return false;
        }
        for i in 0..a.dim {
            for j in 0..a.dim {
                let (Some(x), Some(y), Some(p)) = (&self.action[i], &self.action[j], &a.mult[i][j]) else {
                    continue;
                };
                if self.act(p).is_some_and(|r| x.mul(y) != r) {
                    return false;
                }
            }
        }
        true
    }

    pub fn direct_sum(&self, other: &FinModule) -> FinModule {
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(x, y)| Some(x.as_ref()?.direct_sum(y.as_ref()?)))
            .collect();
        FinModule {
            dim: self.dim + other.dim,
            action,
        }
    }

    /// `ρ'(a) = P⁻¹ ρ(a) P` for the permutation sending basis `i` to `perm[i]`.
    pub fn conjugate(&self, p: &Matrix, p_inv: &Matrix) -> FinModule {
        FinModule {
            dim: self.dim,
            action: self.action.iter().map(|m| m.as_ref().map(|m| p_inv.mul(m).mul(p))).collect(),
        }
    }

    /// Re-expresses the module over the algebra basis `e'_i = Σ_j q[j][i] e_j`.
    pub fn rebase_algebra(&self, q: &Matrix) -> FinModule {
        let action = (0..q.cols).map(|i| combine(&self.action, &q.col(i), self.dim)).collect();
        FinModule { dim: self.dim, action }
    }
}

impl FinBimodule {
    pub fn identity_actions(a: &FinAlgebra, dim: usize) -> FinBimodule {
        let m: Vec<PartialMatrix> = (0..a.dim)
            .map(|i| PartialMatrix::from_matrix(&Matrix::identity(dim).scale(&a.unit[i])))
            .collect();
        FinBimodule {
            dim,
            left: m.clone(),
            right: m,
        }
    }

    pub fn left_module(&self) -> FinModule {
        FinModule {
            dim: self.dim,
            action: self.left.iter().map(PartialMatrix::full).collect(),
        }
    }

    /// Left and right actions commute, and each is a module structure, on
    /// the fully known matrices.
    pub fn is_bimodule(&self, a: &FinAlgebra) -> bool {
        if !self.left_module().is_module(a) {
            return false;
        }
        let right: Vec<Option<Matrix>> = self.right.iter().map(PartialMatrix::full).collect();
        let left: Vec<Option<Matrix>> = self.left.iter().map(PartialMatrix::full).collect();
        for i in 0..a.dim {
            for j in 0..a.dim {
                let (Some(x), Some(y), Some(p)) = (&right[i], &right[j], &a.mult[i][j]) else {
                    continue;
                };
                // (b e_i) e_j = b (e_i e_j)
                if combine(&right, p, self.dim).is_some_and(|r| y.mul(x) != r) {
                    return false;
                }
            }
            for j in 0..a.dim {
                if let (Some(l), Some(r)) = (&left[i], &right[j]) {
                    if l.mul(r) != r.mul(l) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `M ⊗ N` with `a` acting on the left through `M` and on the right
    /// through `N` twisted by `θ`.
    pub fn from_modules(a: &FinAlgebra, m: &FinModule, n: &FinModule) -> Result<FinBimodule> {
        let theta = a.theta.as_ref().ok_or_else(|| Error::Domain("θ required".into()))?;
        let miss = || Error::Domain("module actions must be fully known".into());
        let left = m
            .action
            .iter()
            .map(|x| x.as_ref().map(|x| x.kron(&Matrix::identity(n.dim))).ok_or_else(miss))
            .collect::<Result<Vec<_>>>()?;
        let right = (0..a.dim)
            .map(|i| n.act(&theta.col(i)).map(|y| Matrix::identity(m.dim).kron(&y)).ok_or_else(miss))
            .collect::<Result<Vec<_>>>()?;
        Ok(FinBimodule {
            dim: m.dim * n.dim,
            left: full_partials(left),
            right: full_partials(right),
        })
    }

    pub fn conjugate(&self, p: &Matrix, p_inv: &Matrix) -> FinBimodule {
        let c = |v: &Vec<PartialMatrix>| v.iter().map(|m| m.conjugate(p, p_inv)).collect();
        FinBimodule {
            dim: self.dim,
            left: c(&self.left),
            right: c(&self.right),
        }
    }

    pub fn rebase_algebra(&self, q: &Matrix) -> FinBimodule {
        let r = |v: &Vec<PartialMatrix>| (0..q.cols).map(|i| combine_partial(v, &q.col(i), self.dim)).collect();
        FinBimodule {
            dim: self.dim,
            left: r(&self.left),
            right: r(&self.right),
        }
    }

    pub fn from_bimodule(b: &Bimodule) -> Self {
        let k = b.dim();
        let conv = |v: &Vec<Vec<Option<Vector>>>| v.iter().map(|cols| PartialMatrix { rows: k, cols: cols.clone() }).collect();
        FinBimodule {
            dim: k,
            left: conv(&b.left),
            right: conv(&b.right),
        }
    }
}

/// `B ⊗_A U1 = (B ⊗ U1) / span{b·a ⊗ u − b ⊗ a·u}` with the induced left
/// action; relations and actions use only the known columns.
pub fn tensor_over_algebra(b: &FinBimodule, u: &FinModule) -> FinModule {
    let n = b.dim * u.dim;
    if n == 0 {
        return FinModule {
            dim: 0,
            action: vec![Some(Matrix::zeros(0, 0)); b.left.len()],
        };
    }
    let put = |x: &[Rat], y: &[Rat]| -> Vector {
        let mut out = zeros(n);
        for (i, p) in x.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
            for (j, q) in y.iter().enumerate().filter(|(_, q)| !q.is_zero()) {
                out[i * u.dim + j] = p * q;
            }
        }
        out
    };
    let mut rels = Vec::new();
    for (r, l) in b.right.iter().zip(&u.action) {
        let Some(l) = l else { continue };
        for (bi, col) in r.cols.iter().enumerate() {
            let Some(col) = col else { continue };
            for ui in 0..u.dim {
                let rel = crate::linalg::sub(&put(col, &unit(u.dim, ui)), &put(&unit(b.dim, bi), &l.col(ui)));
                rels.push(rel);
            }
        }
    }
    let known = |j: usize| b.left.iter().filter(|l| l.cols[j / u.dim].is_some()).count();
    let mut order: Vec<usize> = (0..n).rev().collect();
    order.sort_by_key(|&j| known(j));
    let ech = Echelon::with_order(rels, order);
    let reps = ech.free_columns();
    let k = reps.len();
    let project = |x: &[Rat]| -> Vector {
        let r = ech.reduce(x);
        reps.iter().map(|&j| r[j].clone()).collect()
    };
    let action = b
        .left
        .iter()
        .map(|l| {
            let cols: Option<Vec<Vector>> = reps
                .iter()
                .map(|&j| Some(project(&put(l.cols[j / u.dim].as_ref()?, &unit(u.dim, j % u.dim)))))
                .collect();
            cols.map(|c| Matrix::from_cols(&c, k))
        })
        .collect();
    FinModule { dim: k, action }
}

/// `dim Hom_A(M1, M2)`, using every element whose action is known on both sides.
pub fn hom_dim(m1: &FinModule, m2: &FinModule) -> usize {
    let pairs: Vec<(Matrix, Matrix)> = m1.action.iter().zip(&m2.action).filter_map(|(x, y)| Some((x.clone()?, y.clone()?))).collect();
    commutant_dim(&pairs, m1.dim, m2.dim)
}

pub fn fusion_dim(b: &FinBimodule, u1: &FinModule, u2: &FinModule) -> usize {
    hom_dim(&tensor_over_algebra(b, u1), u2)
}

/// `(a f)(u) = f(θ(a) u)`, i.e. `ρ*(a) = ρ(θ(a))ᵀ`.
pub fn dual_module(a: &FinAlgebra, u: &FinModule) -> Result<FinModule> {
    let theta = a.theta.as_ref().ok_or_else(|| Error::Domain("dual module needs θ".into()))?;
    let action = (0..a.dim).map(|i| u.act(&theta.col(i)).map(|m| m.transpose())).collect();
    Ok(FinModule { dim: u.dim, action })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DIsoReport {
    pub lhs: usize,
    pub rhs: usize,
    pub equal: bool,
}

/// `dim Hom_A(B ⊗_A U1, U2)` against `dim Hom_{A⊗A}(U1 ⊗ U2*, B*)`, where
/// `((a1, a2) f)(b) = f(θ(a2) b a1)` on `B*`.
pub fn d_iso_check(a: &FinAlgebra, b: &FinBimodule, u1: &FinModule, u2: &FinModule) -> Result<DIsoReport> {
    let lhs = fusion_dim(b, u1, u2);
    let theta = a.theta.as_ref().ok_or_else(|| Error::Domain("d-isomorphism needs θ".into()))?;
    let u2d = dual_module(a, u2)?;
    let mut pairs = Vec::new();
    for i in 0..a.dim {
        // (e_i, 1)
        if let (Some(x), Some(r)) = (&u1.action[i], b.right[i].full()) {
            pairs.push((x.kron(&Matrix::identity(u2.dim)), r.transpose()));
        }
        // (1, e_i)
        let tl = combine_partial(&b.left, &theta.col(i), b.dim).full();
        if let (Some(y), Some(l)) = (&u2d.action[i], tl) {
            pairs.push((Matrix::identity(u1.dim).kron(y), l.transpose()));
        }
    }
    let rhs = commutant_dim(&pairs, u1.dim * u2.dim, b.dim);
    Ok(DIsoReport { lhs, rhs, equal: lhs == rhs })
}

/// `dim Hom_A(A(V) ⊗_A U1, Ω(V))` computed from the zhu outputs, with
/// `U1` the module `[ω] ↦ h` and `A(V)` the bimodule at `z = -1`.
pub fn zhu_fusion_pipeline(voa: &std::sync::Arc<crate::voa::VoaPresentation>, h: &Rat) -> Result<usize> {
    let a = ZhuAlgebra::build(voa)?;
    let w = std::sync::Arc::new(crate::voa::ModulePresentation::adjoint(voa));
    let b = Bimodule::build(&w, &-Rat::one(), &a)?;
    let u1 = FinModule::new(a.one_dim_rep(&voa.omega, h)?);
    let om = crate::zhu::omega_subspace(&w)?;
    let u2 = FinModule::new(om.zhu_action(&w, &a)?);
    Ok(fusion_dim(&FinBimodule::from_bimodule(&b), &u1, &u2))
}

fn rat_json(x: &Rat) -> Value {
    Value::String(fmt_rat(x))
}

fn matrices_json(ms: &[Option<Matrix>]) -> Value {
    let mut out = Vec::new();
    for (a, m) in ms.iter().enumerate() {
        let Some(m) = m else { continue };
        for (i, j, c) in m.entries() {
            if !c.is_zero() {
                out.push(json!([a, i, j, fmt_rat(c)]));
            }
        }
    }
    Value::Array(out)
}

fn known_json(ms: &[Option<Matrix>]) -> Value {
    json!(ms.iter().enumerate().filter(|(_, m)| m.is_some()).map(|(a, _)| a).collect::<Vec<_>>())
}

fn parse_entry(e: &Value, n: usize) -> Result<(Vec<usize>, Rat)> {
    let arr = e
        .as_array()
        .filter(|a| a.len() == n + 1)
        .ok_or_else(|| Error::Parse(format!("expected an entry of length {}", n + 1)))?;
    let idx = arr[..n]
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse("index must be a nonnegative integer".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let c = match &arr[n] {
        Value::String(s) => parse_rat(s)?,
        Value::Number(x) => Rat::from_integer(x.as_i64().ok_or_else(|| Error::Parse("coefficient".into()))?.into()),
        _ => return Err(Error::Parse("coefficient must be a string or integer".into())),
    };
    Ok((idx, c))
}

fn parse_matrices(v: Option<&Value>, known: Option<&Value>, count: usize, dim: usize) -> Result<Vec<Option<Matrix>>> {
    let mut ms: Vec<Option<Matrix>> = match known.and_then(Value::as_array) {
        Some(ks) => {
            let mut out = vec![None; count];
            for k in ks {
                let k = k.as_u64().ok_or_else(|| Error::Parse("known index".into()))? as usize;
                *out.get_mut(k).ok_or_else(|| Error::Parse("known index out of range".into()))? = Some(Matrix::zeros(dim, dim));
            }
            out
        }
        None => vec![Some(Matrix::zeros(dim, dim)); count],
    };
    for e in v.and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
        let (idx, c) = parse_entry(e, 3)?;
        let (a, i, j) = (idx[0], idx[1], idx[2]);
        if i >= dim || j >= dim {
            return Err(Error::Parse(format!("entry ({i}, {j}) outside dimension {dim}")));
        }
        let m = ms.get_mut(a).ok_or_else(|| Error::Parse(format!("algebra index {a} out of range")))?;
        let m = m.as_mut().ok_or_else(|| Error::Parse(format!("entry for unknown element {a}")))?;
        m[(i, j)] = c;
    }
    Ok(ms)
}

fn get_dim(v: &Value) -> Result<usize> {
    v.get("dim")
        .and_then(Value::as_u64)
        .map(|d| d as usize)
        .ok_or_else(|| Error::Parse("missing dim".into()))
}

impl FinAlgebra {
    pub fn to_json(&self) -> Value {
        let mut c = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if let Some(p) = &self.mult[i][j] {
                    for (k, x) in p.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                        c.push(json!([i, j, k, fmt_rat(x)]));
                    }
                }
            }
        }
        let known: Vec<Value> = (0..self.dim)
            .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
            .filter(|&(i, j)| self.mult[i][j].is_some())
            .map(|(i, j)| json!([i, j]))
            .collect();
        let mut out = json!({
            "dim": self.dim,
            "unit": self.unit.iter().map(rat_json).collect::<Vec<_>>(),
            "c": c,
        });
        if known.len() < self.dim * self.dim {
            out["known"] = Value::Array(known);
        }
        if let Some(t) = &self.theta {
            out["theta"] = Value::Array(
                t.entries()
                    .filter(|(_, _, x)| !x.is_zero())
                    .map(|(i, j, x)| json!([i, j, fmt_rat(x)]))
                    .collect(),
            );
        }
        out
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dim = get_dim(v)?;
        let mut mult: Vec<Vec<Option<Vector>>> = match v.get("known").and_then(Value::as_array) {
            Some(ks) => {
                let mut m = vec![vec![None; dim]; dim];
                for k in ks {
                    let (idx, _) = parse_entry(&json!([k[0], k[1], "0"]), 2)?;
                    if idx[0] >= dim || idx[1] >= dim {
                        return Err(Error::Parse("known pair out of range".into()));
                    }
                    m[idx[0]][idx[1]] = Some(zeros(dim));
                }
                m
            }
            None => vec![vec![Some(zeros(dim)); dim]; dim],
        };
        for e in v.get("c").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
            let (idx, c) = parse_entry(e, 3)?;
            if idx.iter().any(|&i| i >= dim) {
                return Err(Error::Parse("structure constant index out of range".into()));
            }
            let slot = mult[idx[0]][idx[1]]
                .as_mut()
                .ok_or_else(|| Error::Parse("constant for an unknown product".into()))?;
            slot[idx[2]] = c;
        }
        let unit = match v.get("unit") {
            Some(Value::Number(n)) => unit(dim, n.as_u64().ok_or_else(|| Error::Parse("unit index".into()))? as usize),
            Some(Value::Array(xs)) if xs.len() == dim => xs
                .iter()
                .map(|x| x.as_str().ok_or_else(|| Error::Parse("unit entry".into())).and_then(parse_rat))
                .collect::<Result<_>>()?,
            _ => return Err(Error::Parse("unit must be an index or a vector".into())),
        };
        let theta = match v.get("theta").and_then(Value::as_array) {
            Some(es) => {
                let mut t = Matrix::zeros(dim, dim);
                for e in es {
                    let (idx, c) = parse_entry(e, 2)?;
                    if idx[0] >= dim || idx[1] >= dim {
                        return Err(Error::Parse("theta index out of range".into()));
                    }
                    t[(idx[0], idx[1])] = c;
                }
                Some(t)
            }
            None => None,
        };
        Ok(FinAlgebra { dim, mult, unit, theta })
    }
}

impl FinModule {
    pub fn to_json(&self) -> Value {
        let mut out = json!({"dim": self.dim, "action": matrices_json(&self.action)});
        if self.action.iter().any(Option::is_none) {
            out["known"] = known_json(&self.action);
        }
        out
    }

    pub fn from_json(v: &Value, algebra_dim: usize) -> Result<Self> {
        let dim = get_dim(v)?;
        Ok(FinModule {
            dim,
            action: parse_matrices(v.get("action"), v.get("known"), algebra_dim, dim)?,
        })
    }
}

fn partials_json(ms: &[PartialMatrix]) -> (Value, Value) {
    let mut out = Vec::new();
    let mut unknown = Vec::new();
    for (a, m) in ms.iter().enumerate() {
        for (j, c) in m.cols.iter().enumerate() {
            match c {
                Some(c) => {
                    for (i, x) in c.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                        out.push(json!([a, i, j, fmt_rat(x)]));
                    }
                }
                None => unknown.push(json!([a, j])),
            }
        }
    }
    (Value::Array(out), Value::Array(unknown))
}

fn parse_partials(v: Option<&Value>, unknown: Option<&Value>, count: usize, dim: usize) -> Result<Vec<PartialMatrix>> {
    let mut ms: Vec<PartialMatrix> = (0..count)
        .map(|_| PartialMatrix {
            rows: dim,
            cols: vec![Some(zeros(dim)); dim],
        })
        .collect();
    for e in unknown.and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
        let (idx, _) = parse_entry(&json!([e[0], e[1], "0"]), 2)?;
        let m = ms
            .get_mut(idx[0])
            .ok_or_else(|| Error::Parse("unknown column: algebra index out of range".into()))?;
        *m.cols.get_mut(idx[1]).ok_or_else(|| Error::Parse("unknown column out of range".into()))? = None;
    }
    for e in v.and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
        let (idx, c) = parse_entry(e, 3)?;
        let (a, i, j) = (idx[0], idx[1], idx[2]);
        if i >= dim || j >= dim {
            return Err(Error::Parse(format!("entry ({i}, {j}) outside dimension {dim}")));
        }
        let m = ms.get_mut(a).ok_or_else(|| Error::Parse(format!("algebra index {a} out of range")))?;
        let col = m.cols[j].as_mut().ok_or_else(|| Error::Parse(format!("entry in unknown column ({a}, {j})")))?;
        col[i] = c;
    }
    Ok(ms)
}

impl FinBimodule {
    pub fn to_json(&self) -> Value {
        let (l, lu) = partials_json(&self.left);
        let (r, ru) = partials_json(&self.right);
        let mut out = json!({"dim": self.dim, "left": l, "right": r});
        if lu.as_array().is_some_and(|a| !a.is_empty()) || ru.as_array().is_some_and(|a| !a.is_empty()) {
            out["unknownLeft"] = lu;
            out["unknownRight"] = ru;
        }
        out
    }

    pub fn from_json(v: &Value, algebra_dim: usize) -> Result<Self> {
        let dim = get_dim(v)?;
        Ok(FinBimodule {
            dim,
            left: parse_partials(v.get("left"), v.get("unknownLeft"), algebra_dim, dim)?,
            right: parse_partials(v.get("right"), v.get("unknownRight"), algebra_dim, dim)?,
        })
    }
}

fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

/// A random invertible matrix: unit lower times unit upper triangular.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> (Matrix, Matrix) {
    let mut l = Matrix::identity(n);
    let mut u = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = random_rat(rng);
            u[(j, i)] = random_rat(rng);
        }
    }
    let p = l.mul(&u);
    let cols: Vec<Vector> = (0..n)
        .map(|i| crate::linalg::solve(&p, &unit(n, i)).expect("unipotent factors are invertible"))
        .collect();
    (p.clone(), Matrix::from_cols(&cols, n))
}

fn random_module(rng: &mut ChaCha8Rng, a: &FinAlgebra, kind: usize, max_dim: usize) -> FinModule {
    let m = match kind {
        0 => {
            // sum of characters of ℚ^k
            let d = rng.gen_range(0..=max_dim.min(3));
            let chars: Vec<usize> = (0..d).map(|_| rng.gen_range(0..a.dim)).collect();
            FinModule::new(
                (0..a.dim)
                    .map(|i| {
                        let mut m = Matrix::zeros(d, d);
                        for (r, &c) in chars.iter().enumerate() {
                            if c == i {
                                m[(r, r)] = Rat::one();
                            }
                        }
                        m
                    })
                    .collect(),
            )
        }
        1 => {
            // nilpotent x with x^k = 0, as a sum of Jordan blocks
            let d = rng.gen_range(1..=max_dim.min(3));
            let mut n = Matrix::zeros(d, d);
            let mut start = 0;
            while start < d {
                let len = rng.gen_range(1..=(d - start).min(a.dim));
                for r in start..start + len - 1 {
                    n[(r, r + 1)] = Rat::one();
                }
                start += len;
            }
            let mut powers = vec![Matrix::identity(d)];
            for _ in 1..a.dim {
                let next = powers.last().unwrap().mul(&n);
                powers.push(next);
            }
            FinModule::new(powers)
        }
        _ => {
            let copies = if max_dim >= 4 { rng.gen_range(0..=2) } else { rng.gen_range(0..=1) };
            let d = 2 * copies;
            FinModule::new(
                (0..4)
                    .map(|e| {
                        let (r, c) = (e / 2, e % 2);
                        let mut m = Matrix::zeros(d, d);
                        for k in 0..copies {
                            m[(2 * k + r, 2 * k + c)] = Rat::one();
                        }
                        m
                    })
                    .collect(),
            )
        }
    };
    let (p, pi) = random_invertible(rng, m.dim);
    m.conjugate(&p, &pi)
}

/// A seeded instance `(A, B, U1, U2)` with every dimension at most 4.
pub fn random_instance(seed: u64) -> (FinAlgebra, FinBimodule, FinModule, FinModule) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = rng.gen_range(0..3);
    let a = match kind {
        0 => FinAlgebra::split(rng.gen_range(1..=3)),
        1 => FinAlgebra::truncated_poly(rng.gen_range(1..=3)),
        _ => FinAlgebra::matrix2(),
    };
    let b = if rng.gen_bool(0.3) || kind == 2 && rng.gen_bool(0.5) {
        a.regular_bimodule()
    } else {
        let m = random_module(&mut rng, &a, kind, 2);
        let n = random_module(&mut rng, &a, kind, if m.dim <= 1 { 4 } else { 4 / m.dim.max(1) });
        FinBimodule::from_modules(&a, &m, &n).expect("θ present")
    };
    let (p, pi) = random_invertible(&mut rng, b.dim);
    let b = b.conjugate(&p, &pi);
    let u1 = random_module(&mut rng, &a, kind, 4);
    let u2 = random_module(&mut rng, &a, kind, 4);
    (a, b, u1, u2)
}

/// `d_iso_check` over seeds `0..count`; returns the first unequal seed.
pub fn d_iso_sweep(count: u64) -> Result<(usize, Option<u64>)> {
    let mut checked = 0;
    for seed in 0..count {
        let (a, b, u1, u2) = random_instance(seed);
        let r = d_iso_check(&a, &b, &u1, &u2)?;
        checked += 1;
        if !r.equal {
            return Ok((checked, Some(seed)));
        }
    }
    Ok((checked, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    fn line(k: usize, i: usize) -> FinModule {
        FinModule::new((0..k).map(|j| Matrix::from_rows(vec![vec![if i == j { int(1) } else { int(0) }]], 1)).collect())
    }

    #[test]
    fn unit_algebra_closed_form() {
        let a = FinAlgebra::unit_algebra();
        let b = FinBimodule::identity_actions(&a, 3);
        let u1 = FinModule::new(vec![Matrix::identity(2)]);
        let u2 = FinModule::new(vec![Matrix::identity(2)]);
        assert_eq!(tensor_over_algebra(&b, &u1).dim, 6);
        assert_eq!(fusion_dim(&b, &u1, &u2), 12);
        let r = d_iso_check(&a, &b, &u1, &u2).unwrap();
        assert_eq!((r.lhs, r.rhs), (12, 12));
    }

    #[test]
    fn split_algebra_examples() {
        let a = FinAlgebra::split(2);
        assert!(a.is_valid());
        let b = a.regular_bimodule();
        assert!(b.is_bimodule(&a));
        let e1 = line(2, 0);
        assert_eq!(tensor_over_algebra(&b, &e1).dim, 1);
        let r = d_iso_check(&a, &b, &e1, &e1).unwrap();
        assert_eq!((r.lhs, r.rhs), (1, 1));
        assert_eq!(fusion_dim(&b, &e1, &line(2, 1)), 0);
        assert_eq!(dual_module(&a, &e1).unwrap(), e1);
        let zero = FinBimodule::identity_actions(&a, 0);
        assert_eq!(tensor_over_algebra(&zero, &e1).dim, 0);
    }

    #[test]
    fn schur_for_matrix_algebra() {
        let a = FinAlgebra::matrix2();
        assert!(a.is_valid());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let std = random_module(&mut rng, &a, 2, 2);
        if std.dim == 2 {
            assert!(std.is_module(&a));
            assert_eq!(hom_dim(&std, &std), 1);
            let dd = dual_module(&a, &dual_module(&a, &std).unwrap()).unwrap();
            assert_eq!(hom_dim(&dd, &std), 1);
        }
        let s = FinAlgebra::split(2);
        assert_eq!(hom_dim(&line(2, 0), &line(2, 1)), 0);
        assert!(s.is_valid());
    }

    #[test]
    fn random_instances_are_valid_and_satisfy_d_iso() {
        for seed in 0..60 {
            let (a, b, u1, u2) = random_instance(seed);
            assert!(a.is_valid());
            assert!(b.is_bimodule(&a), "seed {seed}");
            assert!(u1.is_module(&a) && u2.is_module(&a));
            assert!(b.dim <= 4 && u1.dim <= 4 && u2.dim <= 4);
            let r = d_iso_check(&a, &b, &u1, &u2).unwrap();
            assert!(r.equal, "seed {seed}: {r:?}");
        }
    }

    #[test]
    fn additivity() {
        let a = FinAlgebra::truncated_poly(2);
        let b = a.regular_bimodule();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_module(&mut rng, &a, 1, 2);
        let v = random_module(&mut rng, &a, 1, 2);
        let w = random_module(&mut rng, &a, 1, 2);
        assert_eq!(fusion_dim(&b, &u.direct_sum(&v), &w), fusion_dim(&b, &u, &w) + fusion_dim(&b, &v, &w));
        assert_eq!(fusion_dim(&b, &w, &u.direct_sum(&v)), fusion_dim(&b, &w, &u) + fusion_dim(&b, &w, &v));
    }

    #[test]
    fn pipeline_ignores_basis_order() {
        let v = std::sync::Arc::new(crate::voa::make_virasoro(rat(1, 2), 6));
        let n = v.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        for w in 0..=v.cutoff {
            let r = v.range(w);
            let mut idx: Vec<usize> = r.clone().collect();
            idx.reverse();
            for (k, j) in r.zip(idx) {
                perm[k] = j;
            }
        }
        let p = std::sync::Arc::new(v.permuted(&perm).unwrap());
        for h in [int(0), rat(1, 3)] {
            let d = zhu_fusion_pipeline(&v, &h).unwrap();
            assert_eq!(d, zhu_fusion_pipeline(&p, &h).unwrap());
            assert_eq!(d, usize::from(h == int(0)));
        }
    }

    #[test]
    fn json_round_trip() {
        let (a, b, u1, _) = random_instance(5);
        assert_eq!(FinAlgebra::from_json(&a.to_json()).unwrap(), a);
        assert_eq!(FinBimodule::from_json(&b.to_json(), a.dim).unwrap(), b);
        assert_eq!(FinModule::from_json(&u1.to_json(), a.dim).unwrap(), u1);
    }
}
