//! The induced modules `F(U)` and `L(U)` level by level, and the Frobenius
//! reciprocity dimension check.

use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{axpy, commutant_dim, is_zero, zeros, Echelon, Matrix, Vector};
use crate::rat::{binom, Rat};
use crate::voa::{Base, GenSystem, ModeEngine, ModeTable, ModulePresentation, VoaPresentation};
use crate::zhu::{omega_subspace, ZhuAlgebra};
use crate::{Error, Result};

/// A module for `A(V)`: one action matrix per quotient basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct ZhuModule {
    pub dim: usize,
    pub action: Vec<Matrix>,
}

impl ZhuModule {
    pub fn zero(a: &ZhuAlgebra) -> Self {
        ZhuModule {
            dim: 0,
            action: vec![Matrix::zeros(0, 0); a.dim()],
        }
    }

    /// `[ω] ↦ h`, extended through the powers of `[ω]`.
    pub fn lowest_weight(a: &ZhuAlgebra, h: &Rat) -> Result<Self> {
        Ok(ZhuModule {
            dim: 1,
            action: a.one_dim_rep(&a.voa.omega, h)?,
        })
    }

    /// `[g] ↦ value` for the vector `g`, extended through its powers.
    pub fn generated_by(a: &ZhuAlgebra, g: &[Rat], value: &Rat) -> Result<Self> {
        Ok(ZhuModule {
            dim: 1,
            action: a.one_dim_rep(g, value)?,
        })
    }

    pub fn direct_sum(&self, other: &ZhuModule) -> ZhuModule {
        ZhuModule {
            dim: self.dim + other.dim,
            action: self.action.iter().zip(&other.action).map(|(x, y)| x.direct_sum(y)).collect(),
        }
    }

    /// `ρ(x)` for a quotient element in coordinates.
    pub fn act(&self, x: &[Rat]) -> Matrix {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for (m, c) in self.action.iter().zip(x) {
            if !c.is_zero() {
                out = out.add(&m.scale(c));
            }
        }
        out
    }

    /// Unit acts as the identity and `ρ(a)ρ(b) = ρ(a * b)` on every known product.
    pub fn is_module(&self, a: &ZhuAlgebra) -> bool {
        if self.act(&a.unit) != Matrix::identity(self.dim) {
            return false;
        }
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let Some(p) = a.mult[i][j].as_ref() else { continue };
                if self.action[i].mul(&self.action[j]) != self.act(p) {
                    return false;
                }
            }
        }
        true
    }

    /// Scalar by which `[ω]` acts, when it is one.
    pub fn omega_scalar(&self, a: &ZhuAlgebra) -> Option<Rat> {
        let w = self.act(&a.omega);
        let h = if self.dim == 0 { Rat::zero() } else { w[(0, 0)].clone() };
        (w == Matrix::identity(self.dim).scale(&h)).then_some(h)
    }
}

/// Counts of the Jacobi-relation residuals evaluated while building `F(U)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RelationLog {
    pub checked: usize,
    pub nonzero: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug)]
pub struct InducedModule {
    pub module: ModulePresentation,
    pub u_dim: usize,
    pub depth: i64,
    pub relations: RelationLog,
}

impl InducedModule {
    pub fn level_dims(&self) -> Vec<usize> {
        self.module.dims_by_level()
    }
}

/// Degree-zero generator modes `g_{wt g - 1}` acting on `U` by `ρ([g])`.
pub fn generator_zero_modes(a: &ZhuAlgebra, u: &ZhuModule) -> Result<Vec<Matrix>> {
    let origin = a
        .voa
        .origin
        .as_ref()
        .ok_or_else(|| Error::Config("induction needs an engine-built VOA".into()))?;
    origin
        .generators
        .iter()
        .map(|&g| {
            if g == usize::MAX {
                return Err(Error::CutoffEscape {
                    weight: 1,
                    cutoff: a.voa.cutoff,
                });
            }
            Ok(u.act(&a.project(&a.voa.unit(g))))
        })
        .collect()
}

/// `F(U)` from the degree-zero action of the generators, levels `0..=depth`.
pub fn f_module_from_zero_modes(voa: &Arc<VoaPresentation>, dim: usize, zero_modes: Vec<Matrix>, h: Rat, depth: i64) -> Result<InducedModule> {
    let origin = voa.origin.as_ref().ok_or_else(|| Error::Config("induction needs an engine-built VOA".into()))?;
    let engine = ModeEngine::new(origin.sys.clone(), Base::Induced { dim, zero_modes });
    let labels: Vec<String> = (0..dim).map(|i| format!("|u{i}⟩")).collect();
    let free = ModulePresentation::from_engine(voa, &engine, &labels, h, depth);
    let (residuals, relations) = relation_residuals(&free, depth)?;
    let module = if residuals.is_empty() {
        free
    } else {
        let sub = submodule_closure(&free, residuals)?;
        quotient_module(&free, &sub)?
    };
    Ok(InducedModule {
        module,
        u_dim: dim,
        depth,
        relations,
    })
}

/// `F(U)` for an `A(V)`-module `U`.
pub fn f_module(a: &ZhuAlgebra, u: &ZhuModule, depth: i64) -> Result<InducedModule> {
    if !u.is_module(a) {
        return Err(Error::Domain("action matrices do not define an A(V)-module".into()));
    }
    let h = u.omega_scalar(a).unwrap_or_else(Rat::zero);
    f_module_from_zero_modes(&a.voa, u.dim, generator_zero_modes(a, u)?, h, depth)
}

/// Residuals of `u_p v_q w = Σ C(p-k,i) C(k,j) (u_{p-k-i+j} v)_{q+k+i-j} w`
/// for basis `u, v` of weight at most `max_weight` and every basis `w`.
pub fn relation_residuals(m: &ModulePresentation, max_weight: i64) -> Result<(Vec<Vector>, RelationLog)> {
    let voa = m.voa.clone();
    let vs: Vec<usize> = (0..voa.dim()).filter(|&v| voa.weight(v) <= max_weight).collect();
    let triples: Vec<(usize, usize, usize)> = vs
        .iter()
        .flat_map(|&u| vs.iter().flat_map(move |&v| (0..m.dim()).map(move |w| (u, v, w))))
        .collect();
    let parts: Vec<(Vec<Vector>, RelationLog)> = triples
        .par_iter()
        .map(|&(u, v, w)| {
            let mut out = Vec::new();
            let mut log = RelationLog::default();
            let (wu, wv, lw) = (voa.weight(u), voa.weight(v), m.level(w));
            for q in (wv + lw - m.cutoff - 1)..=(wv + lw - 1) {
                let lvw = wv + lw - q - 1;
                for p in (wu + lvw - m.cutoff - 1)..=(wu + lvw - 1) {
                    match residual(m, u, v, w, p, q) {
                        Ok(r) => {
                            log.checked += 1;
                            if !is_zero(&r) {
                                log.nonzero += 1;
                                out.push(r);
                            }
                        }
                        Err(Error::CutoffEscape { .. }) => log.skipped += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok((out, log))
        })
        .collect::<Result<_>>()?;
    let mut all = Vec::new();
    let mut log = RelationLog::default();
    for (r, l) in parts {
        all.extend(r);
        log.checked += l.checked;
        log.nonzero += l.nonzero;
        log.skipped += l.skipped;
    }
    Ok((all, log))
}

fn residual(m: &ModulePresentation, u: usize, v: usize, w: usize, p: i64, q: i64) -> Result<Vector> {
    let voa = &m.voa;
    let (wu, wv, lw) = (voa.weight(u), voa.weight(v), m.level(w));
    let k = lw + wu;
    let n = (lw + wv - q - 1).max(0);
    let vw = m.mode(v, q, w)?;
    let lhs = m.act(&voa.unit(u), p, &vw)?;
    let mut rhs = zeros(m.dim());
    for i in 0..=n {
        let ci = binom(p - k, i);
        for j in 0..=k {
            let c = &ci * binom(k, j);
            if c.is_zero() {
                continue;
            }
            let uv = voa.mode(u, p - k - i + j, v)?;
            axpy(&mut rhs, &c, &m.act(&uv, q + k + i - j, &m.unit(w))?);
        }
    }
    Ok(crate::linalg::sub(&lhs, &rhs))
}

/// Per-level echelon forms of the smallest graded submodule containing `gens`
/// (split into homogeneous parts), closed under every in-window mode.
pub fn submodule_closure(m: &ModulePresentation, gens: Vec<Vector>) -> Result<Vec<Echelon>> {
    let levels = (m.cutoff + 1) as usize;
    let mut spaces: Vec<Echelon> = (0..levels).map(|_| Echelon::empty(m.dim())).collect();
    let mut queue: Vec<Vector> = Vec::new();
    for g in gens {
        queue.extend(crate::voa::ops::split_levels(m, &g).into_iter().map(|(_, part)| part));
    }
    let voa = m.voa.clone();
    while let Some(x) = queue.pop() {
        let Some(lvl) = m.level_of(&x) else { continue };
        let sp = &mut spaces[lvl as usize];
        if sp.contains(&x) {
            continue;
        }
        *sp = sp.extend([x.clone()]);
        for v in 0..voa.dim() {
            let wv = voa.weight(v);
            for out in 0..=m.cutoff {
                let n = wv + lvl - out - 1;
                let y = m.act(&voa.unit(v), n, &x)?;
                if !is_zero(&y) {
                    queue.push(y);
                }
            }
        }
    }
    Ok(spaces)
}

/// `M / K` for a graded submodule given per level; levels keep their
/// representatives among the basis vectors of `M`.
pub fn quotient_module(m: &ModulePresentation, sub: &[Echelon]) -> Result<ModulePresentation> {
    let mut reps: Vec<usize> = Vec::new();
    let mut basis = Vec::new();
    let mut index = vec![usize::MAX; m.dim()];
    for lvl in 0..=m.cutoff {
        let range = m.range(lvl);
        let order: Vec<usize> = range.clone().rev().chain((0..m.dim()).filter(|j| !range.contains(j))).collect();
        let ech = Echelon::with_order(sub[lvl as usize].rows().to_vec(), order);
        let pivots = ech.pivots().to_vec();
        for j in range {
            if !pivots.contains(&j) {
                index[j] = reps.len();
                reps.push(j);
                basis.push(m.basis[j].clone());
            }
        }
    }
    let all = sub.iter().flat_map(|e| e.rows().to_vec()).collect::<Vec<_>>();
    let order: Vec<usize> = (0..m.dim()).rev().collect();
    let full = Echelon::with_order(all, order);
    let project = |x: &[Rat]| -> Vec<(usize, Rat)> {
        let r = full.reduce(x);
        r.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (index[j], c)).collect()
    };
    let voa = m.voa.clone();
    let mut action = ModeTable::default();
    for (new_w, &w) in reps.iter().enumerate() {
        let lw = m.level(w);
        for v in 0..voa.dim() {
            let wv = voa.weight(v);
            for out in 0..=m.cutoff {
                let n = wv + lw - out - 1;
                let img = m.mode(v, n, w)?;
                let p = project(&img);
                if p.iter().any(|(i, _)| *i == usize::MAX) {
                    return Err(Error::Domain("submodule rows do not reduce onto the chosen representatives".into()));
                }
                action.insert(v, new_w, n, p);
            }
        }
    }
    ModulePresentation::from_parts(voa, m.cutoff, m.lowest_weight.clone(), basis, action)
}

fn embed(m: &ModulePresentation, range: std::ops::Range<usize>, k: Vector) -> Vector {
    let mut f = zeros(m.dim());
    for (j, c) in range.zip(k) {
        f[j] = c;
    }
    f
}

/// `K_n = {w ∈ F_n : v_m w ∈ K_{n'} for every lowering mode into level n' < n}`,
/// with `K_0 = 0`: the maximal graded submodule meeting level zero trivially.
pub fn k_spaces(m: &ModulePresentation) -> Result<Vec<Echelon>> {
    let voa = &m.voa;
    let mut out: Vec<Echelon> = Vec::new();
    for lvl in 0..=m.cutoff {
        let range = m.range(lvl);
        if lvl == 0 || range.is_empty() {
            out.push(Echelon::empty(m.dim()));
            continue;
        }
        let mut rows = Vec::new();
        for (target, k) in out.iter().enumerate() {
            let target = target as i64;
            let trange = m.range(target);
            for v in 0..voa.dim() {
                let n = voa.weight(v) + lvl - target - 1;
                let cols: Vec<Vector> = range.clone().map(|j| m.mode(v, n, j).map(|x| k.reduce(&x))).collect::<Result<_>>()?;
                for r in trange.clone() {
                    rows.push(cols.iter().map(|c| c[r].clone()).collect::<Vector>());
                }
            }
        }
        let kernel = Matrix::from_rows(rows, range.len()).nullspace();
        out.push(Echelon::from_rows(kernel.into_iter().map(|k| embed(m, range.clone(), k)).collect(), m.dim()));
    }
    Ok(out)
}

/// `K_n = {w ∈ F_n : v_{wt v + n - 1} w = 0 for every basis v}`; exact only
/// when `V_{≤N}` holds enough vectors to reach level zero in one step.
pub fn k_spaces_single_mode(m: &ModulePresentation) -> Result<Vec<Echelon>> {
    let voa = &m.voa;
    let mut out = Vec::new();
    for lvl in 0..=m.cutoff {
        let range = m.range(lvl);
        let mut rows = Vec::new();
        for v in 0..voa.dim() {
            let n = voa.weight(v) + lvl - 1;
            let cols: Vec<Vector> = range.clone().map(|j| m.mode(v, n, j)).collect::<Result<_>>()?;
            for r in m.range(0) {
                rows.push(cols.iter().map(|c| c[r].clone()).collect::<Vector>());
            }
        }
        let kernel = if range.is_empty() {
            Vec::new()
        } else {
            Matrix::from_rows(rows, range.len()).nullspace()
        };
        let full: Vec<Vector> = kernel
            .into_iter()
            .map(|k| {
                let mut f = zeros(m.dim());
                for (j, c) in range.clone().zip(k) {
                    f[j] = c;
                }
                f
            })
            .collect();
        out.push(Echelon::from_rows(full, m.dim()));
    }
    Ok(out)
}

/// Whether per-level subspaces are stable under every in-window mode.
pub fn is_submodule(m: &ModulePresentation, sub: &[Echelon]) -> Result<bool> {
    let voa = &m.voa;
    for (lvl, sp) in sub.iter().enumerate() {
        for x in sp.rows() {
            for v in 0..voa.dim() {
                for out in 0..=m.cutoff {
                    let n = voa.weight(v) + lvl as i64 - out - 1;
                    let y = m.act(&voa.unit(v), n, x)?;
                    if !sub[out as usize].contains(&y) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// `L(U) = F(U) / ⊕ K_n`.
pub fn l_module(f: &InducedModule) -> Result<InducedModule> {
    let k = k_spaces(&f.module)?;
    let module = quotient_module(&f.module, &k)?;
    Ok(InducedModule {
        module,
        u_dim: f.u_dim,
        depth: f.depth,
        relations: f.relations.clone(),
    })
}

/// `L(0)` acts on level `n` as `(h + n)` times the identity.
pub fn l0_is_graded(m: &ModulePresentation) -> Result<bool> {
    let voa = &m.voa;
    for j in 0..m.dim() {
        let got = m.act(&voa.omega, 1, &m.unit(j))?;
        let expect = crate::linalg::scaled(&m.unit(j), &(&m.lowest_weight + Rat::from_integer(m.level(j).into())));
        if got != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusReport {
    pub dim1: usize,
    pub dim2: usize,
    pub equal: bool,
}

/// Maps `F(U)_{≤D} → W` shifting levels by `s` that commute with every mode
/// whose source and target lie in the window; modes leaving `F` below level
/// zero must kill the image.
fn maps_with_shift(f: &ModulePresentation, w: &ModulePresentation, s: i64, depth: i64) -> Result<usize> {
    let top = depth.min(w.cutoff - s).min(f.cutoff);
    if top < 0 {
        return Ok(0);
    }
    let voa = &f.voa;
    let fcols: Vec<usize> = (0..f.dim()).filter(|&j| f.level(j) <= top).collect();
    let mut var = vec![usize::MAX; f.dim()];
    // unknown X[i][j] = coefficient of W basis i in the image of F basis j
    let mut nvars = 0;
    let mut offsets = vec![0usize; f.dim()];
    for &j in &fcols {
        var[j] = 0;
        offsets[j] = nvars;
        nvars += w.range(f.level(j) + s).len();
    }
    if nvars == 0 {
        return Ok(0);
    }
    let image_of = |x: &[Rat], row: &mut Vector, target: usize, sign: &Rat| {
        for (j, c) in x.iter().enumerate() {
            if c.is_zero() || var[j] == usize::MAX {
                continue;
            }
            let r = w.range(f.level(j) + s);
            if r.contains(&target) {
                row[offsets[j] + (target - r.start)] += sign * c;
            }
        }
    };
    let mut rows: Vec<Vector> = Vec::new();
    for &j in &fcols {
        let lj = f.level(j);
        for v in 0..voa.dim() {
            let wv = voa.weight(v);
            for wout in 0..=w.cutoff {
                let n = wv + lj + s - wout - 1;
                let fout = wout - s;
                if fout > top {
                    continue;
                }
                let fimg = if fout < 0 { zeros(f.dim()) } else { f.mode(v, n, j)? };
                // X(v_n e_j) - v_n X(e_j) = 0, one equation per W basis vector at level wout
                let src = w.range(lj + s);
                let mut cols_w: Vec<Vector> = Vec::new();
                for t in src.clone() {
                    cols_w.push(w.mode(v, n, t)?);
                }
                for target in w.range(wout) {
                    let mut row = zeros(nvars);
                    image_of(&fimg, &mut row, target, &Rat::one());
                    for (k, t) in src.clone().enumerate() {
                        let c = &cols_w[k][target];
                        if !c.is_zero() {
                            row[offsets[j] + (t - src.start)] -= c;
                        }
                    }
                    if !is_zero(&row) {
                        rows.push(row);
                    }
                }
            }
        }
    }
    let rank = Matrix::from_rows(rows, nvars).rank();
    Ok(nvars - rank)
}

/// `dim Hom_V(F(U), W)` at depth `D` against `dim Hom_{A(V)}(U, Ω(W))`.
pub fn frobenius_check(a: &ZhuAlgebra, u: &ZhuModule, f: &InducedModule, w: &ModulePresentation, depth: i64) -> Result<FrobeniusReport> {
    let mut dim1 = 0;
    for s in 0..=w.cutoff {
        dim1 += maps_with_shift(&f.module, w, s, depth)?;
    }
    let om = omega_subspace(w)?;
    let sigma = om.zhu_action(w, a)?;
    let pairs: Vec<(Matrix, Matrix)> = u.action.iter().cloned().zip(sigma).collect();
    let dim2 = commutant_dim(&pairs, u.dim, om.dim());
    Ok(FrobeniusReport {
        dim1,
        dim2,
        equal: dim1 == dim2,
    })
}

/// `F` over `V1 ⊗ V2` induced from `U1 ⊗ U2`, built from the tensor generator system.
pub fn tensor_f_module(a1: &ZhuAlgebra, u1: &ZhuModule, a2: &ZhuAlgebra, u2: &ZhuModule, depth: i64) -> Result<InducedModule> {
    let o1 = a1.voa.origin.as_ref().ok_or_else(|| Error::Config("engine-built VOA required".into()))?;
    let o2 = a2.voa.origin.as_ref().ok_or_else(|| Error::Config("engine-built VOA required".into()))?;
    let sys = Arc::new(GenSystem::tensor(&o1.sys, &o2.sys));
    let v12 = Arc::new(VoaPresentation::from_system(sys, depth.max(2)));
    let z1 = generator_zero_modes(a1, u1)?;
    let z2 = generator_zero_modes(a2, u2)?;
    let mut zero_modes: Vec<Matrix> = z1.iter().map(|m| m.kron(&Matrix::identity(u2.dim))).collect();
    zero_modes.extend(z2.iter().map(|m| Matrix::identity(u1.dim).kron(m)));
    let h = u1.omega_scalar(a1).unwrap_or_else(Rat::zero) + u2.omega_scalar(a2).unwrap_or_else(Rat::zero);
    f_module_from_zero_modes(&v12, u1.dim * u2.dim, zero_modes, h, depth)
}

pub fn convolve(a: &[usize], b: &[usize]) -> Vec<usize> {
    let n = a.len().min(b.len());
    (0..n).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use crate::voa::axioms::axiom_check;
    use crate::voa::{make_heisenberg, make_virasoro};

    fn vir(c: Rat, n: i64) -> ZhuAlgebra {
        ZhuAlgebra::build(&Arc::new(make_virasoro(c, n))).unwrap()
    }

    #[test]
    fn verma_level_dims() {
        let a = vir(rat(3, 5), 6);
        let u = ZhuModule::lowest_weight(&a, &rat(7, 11)).unwrap();
        let f = f_module(&a, &u, 4).unwrap();
        assert_eq!(f.level_dims(), vec![1, 1, 2, 3, 5]);
        assert_eq!(f.relations.nonzero, 0);
        assert!(f.relations.checked > 100);
        assert!(l0_is_graded(&f.module).unwrap());
        assert!(axiom_check(&f.module, 1, 60).unwrap().passed());
    }

    #[test]
    fn fock_space_level_dims() {
        let v = Arc::new(make_heisenberg(5));
        let a = ZhuAlgebra::build(&v).unwrap();
        let g = v.unit(v.generator_index(0).unwrap());
        let u = ZhuModule::generated_by(&a, &g, &rat(2, 3)).unwrap();
        let f = f_module(&a, &u, 4).unwrap();
        assert_eq!(f.level_dims(), vec![1, 1, 2, 3, 5]);
    }

    #[test]
    fn zero_module_induces_zero() {
        let a = vir(int(1), 4);
        let f = f_module(&a, &ZhuModule::zero(&a), 3).unwrap();
        assert_eq!(f.level_dims(), vec![0, 0, 0, 0]);
        assert_eq!(l_module(&f).unwrap().level_dims(), vec![0, 0, 0, 0]);
    }

    #[test]
    fn irreducible_quotients() {
        let a = vir(rat(1, 2), 6);
        let f0 = f_module(&a, &ZhuModule::lowest_weight(&a, &int(0)).unwrap(), 3).unwrap();
        let k = k_spaces(&f0.module).unwrap();
        assert!(is_submodule(&f0.module, &k).unwrap());
        let l0 = l_module(&f0).unwrap();
        assert_eq!(l0.level_dims()[1], 0);
        assert!(axiom_check(&l0.module, 2, 60).unwrap().passed());
        let fh = f_module(&a, &ZhuModule::lowest_weight(&a, &rat(5, 13)).unwrap(), 3).unwrap();
        let lh = l_module(&fh).unwrap();
        assert_eq!(lh.level_dims(), fh.level_dims());
    }

    fn partitions(n: usize) -> usize {
        let mut p = vec![0usize; n + 1];
        p[0] = 1;
        for k in 1..=n {
            for m in k..=n {
                p[m] += p[m - k];
            }
        }
        p[n]
    }

    #[test]
    fn irreducible_quotient_reaches_the_top_level() {
        let a = vir(rat(1, 3), 6);
        let f = f_module(&a, &ZhuModule::lowest_weight(&a, &rat(1, 7)).unwrap(), 5).unwrap();
        let verma: Vec<usize> = (0..=5).map(partitions).collect();
        assert_eq!(f.level_dims(), verma);
        assert_eq!(l_module(&f).unwrap().level_dims(), verma);
    }

    #[test]
    fn degenerate_weights_lose_singular_vectors() {
        let a = vir(rat(1, 3), 6);
        let f = f_module(&a, &ZhuModule::lowest_weight(&a, &rat(1, 12)).unwrap(), 4).unwrap();
        assert_eq!(l_module(&f).unwrap().level_dims(), vec![1, 1, 2, 3, 4]);
        let f0 = f_module(&a, &ZhuModule::lowest_weight(&a, &int(0)).unwrap(), 5).unwrap();
        let vacuum: Vec<usize> = (0..=5).map(|n| partitions(n) - if n > 0 { partitions(n - 1) } else { 0 }).collect();
        assert_eq!(l_module(&f0).unwrap().level_dims(), vacuum);
    }

    #[test]
    fn single_modes_agree_with_lowering_closure_at_large_cutoff() {
        let a = vir(rat(1, 3), 8);
        for h in [int(0), rat(1, 12), rat(1, 7)] {
            let f = f_module(&a, &ZhuModule::lowest_weight(&a, &h).unwrap(), 4).unwrap();
            assert_eq!(k_spaces(&f.module).unwrap(), k_spaces_single_mode(&f.module).unwrap(), "h={h}");
        }
    }

    #[test]
    fn frobenius_fixtures() {
        let a = vir(rat(2, 7), 6);
        let h = rat(3, 10);
        let u = ZhuModule::lowest_weight(&a, &h).unwrap();
        let f = f_module(&a, &u, 3).unwrap();
        let r = frobenius_check(&a, &u, &f, &f.module, 3).unwrap();
        assert!(r.equal && r.dim1 >= 1, "{r:?}");
        let other = f_module(&a, &ZhuModule::lowest_weight(&a, &(&h + int(1) / int(3))).unwrap(), 3).unwrap();
        let r = frobenius_check(&a, &u, &f, &other.module, 3).unwrap();
        assert_eq!((r.dim1, r.dim2), (0, 0));
        let z = ZhuModule::zero(&a);
        let fz = f_module(&a, &z, 3).unwrap();
        let r = frobenius_check(&a, &z, &fz, &f.module, 3).unwrap();
        assert_eq!((r.dim1, r.dim2), (0, 0));
    }

    #[test]
    fn sums_and_tensors() {
        let a = vir(rat(1, 3), 6);
        let u1 = ZhuModule::lowest_weight(&a, &rat(1, 7)).unwrap();
        let u2 = ZhuModule::lowest_weight(&a, &rat(4, 9)).unwrap();
        let s = f_module(&a, &u1.direct_sum(&u2), 3).unwrap();
        let d1 = f_module(&a, &u1, 3).unwrap().level_dims();
        let d2 = f_module(&a, &u2, 3).unwrap().level_dims();
        let sum: Vec<usize> = d1.iter().zip(&d2).map(|(x, y)| x + y).collect();
        assert_eq!(s.level_dims(), sum);
        let hz = ZhuAlgebra::build(&Arc::new(make_heisenberg(4))).unwrap();
        let g = hz.voa.unit(hz.voa.generator_index(0).unwrap());
        let uh = ZhuModule::generated_by(&hz, &g, &rat(1, 2)).unwrap();
        let t = tensor_f_module(&a, &u1, &hz, &uh, 3).unwrap();
        let dh = f_module(&hz, &uh, 3).unwrap().level_dims();
        assert_eq!(t.level_dims(), convolve(&d1, &dh));
    }
}
