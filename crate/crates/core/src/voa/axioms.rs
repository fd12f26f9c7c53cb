//! Sampled checks of the module axioms inside the cutoff.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::presentation::ModulePresentation;
use crate::linalg::{axpy, scaled, sub, zeros};
use crate::rat::{binom, Rat};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub check: String,
    pub u: usize,
    pub v: usize,
    pub w: usize,
    pub p: i64,
    pub q: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checked: usize,
    pub skipped: usize,
    pub failure: Option<Witness>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Triples are enumerated exhaustively when both bases have at most this
/// many elements.
pub const EXHAUSTIVE_LIMIT: usize = 12;

fn escape<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::CutoffEscape { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `[u_p, v_q] w = Σ_i C(p,i) (u_i v)_{p+q-i} w`.
pub fn commutator_holds(m: &ModulePresentation, u: usize, v: usize, w: usize, p: i64, q: i64) -> Result<Option<bool>> {
    let voa = &m.voa;
    let Some(vw) = escape(m.mode(v, q, w))? else { return Ok(None) };
    let Some(uw) = escape(m.mode(u, p, w))? else { return Ok(None) };
    let Some(a) = escape(m.act(&voa.unit(u), p, &vw))? else { return Ok(None) };
    let Some(b) = escape(m.act(&voa.unit(v), q, &uw))? else { return Ok(None) };
    let lhs = sub(&a, &b);
    let mut rhs = zeros(m.dim());
    for i in 0..(voa.weight(u) + voa.weight(v)) {
        let Some(uv) = escape(voa.mode(u, i, v))? else { return Ok(None) };
        let Some(t) = escape(m.act(&uv, p + q - i, &m.unit(w)))? else {
            return Ok(None);
        };
        axpy(&mut rhs, &binom(p, i), &t);
    }
    Ok(Some(lhs == rhs))
}

/// Associativity in the finite form
/// `u_p v_q w = Σ_{i≤n} Σ_{j≤k} C(p-k,i) C(k,j) (u_{p-k-i+j} v)_{q+k+i-j} w`,
/// valid for `k ≥ level(w) + wt u` and `n ≥ level(w) + wt v - q - 1`.
pub fn associator_holds(m: &ModulePresentation, u: usize, v: usize, w: usize, p: i64, q: i64, k: i64, n: i64) -> Result<Option<bool>> {
    let voa = &m.voa;
    let Some(vw) = escape(m.mode(v, q, w))? else { return Ok(None) };
    let Some(lhs) = escape(m.act(&voa.unit(u), p, &vw))? else { return Ok(None) };
    let mut rhs = zeros(m.dim());
    for i in 0..=n {
        let ci = binom(p - k, i);
        for j in 0..=k {
            let c = &ci * binom(k, j);
            if num_traits::Zero::is_zero(&c) {
                continue;
            }
            let Some(uv) = escape(voa.mode(u, p - k - i + j, v))? else { return Ok(None) };
            let Some(t) = escape(m.act(&uv, q + k + i - j, &m.unit(w)))? else {
                return Ok(None);
            };
            axpy(&mut rhs, &c, &t);
        }
    }
    Ok(Some(lhs == rhs))
}

fn vacuum_and_derivative(m: &ModulePresentation, v: usize, w: usize, n: i64) -> Result<Option<bool>> {
    let voa = &m.voa;
    let Some(one) = escape(m.mode(voa.vacuum, n, w))? else { return Ok(None) };
    let expect = if n == -1 { m.unit(w) } else { zeros(m.dim()) };
    if one != expect {
        return Ok(Some(false));
    }
    let Some(dv) = escape(voa.l_op(-1, &voa.unit(v)))? else { return Ok(None) };
    let Some(lhs) = escape(m.act(&dv, n, &m.unit(w)))? else { return Ok(None) };
    let Some(r) = escape(m.mode(v, n - 1, w))? else { return Ok(None) };
    Ok(Some(lhs == scaled(&r, &Rat::from_integer((-n).into()))))
}

fn creation(m: &ModulePresentation, v: usize) -> Result<Option<bool>> {
    let voa = &m.voa;
    let vac = voa.vacuum;
    let Some(c) = escape(voa.mode(v, -1, vac))? else { return Ok(None) };
    if c != voa.unit(v) {
        return Ok(Some(false));
    }
    for n in 0..voa.weight(v).max(1) {
        if escape(voa.mode(v, n, vac))?.is_some_and(|x| x.iter().any(|c| !num_traits::Zero::is_zero(c))) {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

fn triples(m: &ModulePresentation, seed: u64, samples: usize) -> Vec<(usize, usize, usize)> {
    let (dv, dw) = (m.voa.dim(), m.dim());
    let mut all = Vec::new();
    if dv <= EXHAUSTIVE_LIMIT && dw <= EXHAUSTIVE_LIMIT {
        for u in 0..dv {
            for v in 0..dv {
                for w in 0..dw {
                    all.push((u, v, w));
                }
            }
        }
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let us: Vec<usize> = (0..dv).collect();
    let ws: Vec<usize> = (0..dw).collect();
    for _ in 0..samples {
        all.push((*us.choose(&mut rng).unwrap(), *us.choose(&mut rng).unwrap(), *ws.choose(&mut rng).unwrap()));
    }
    all
}

/// Runs the commutator, associator, vacuum, derivative and creation checks.
pub fn axiom_check(m: &ModulePresentation, seed: u64, samples: usize) -> Result<AxiomReport> {
    let mut rep = AxiomReport::default();
    let n_cut = m.cutoff;
    let record = |rep: &mut AxiomReport, r: Option<bool>, check: &str, t: (usize, usize, usize), p: i64, q: i64| match r {
        None => rep.skipped += 1,
        Some(true) => rep.checked += 1,
        Some(false) => {
            rep.checked += 1;
            if rep.failure.is_none() {
                rep.failure = Some(Witness {
                    check: check.into(),
                    u: t.0,
                    v: t.1,
                    w: t.2,
                    p,
                    q,
                });
            }
        }
    };
    for v in 0..m.voa.dim() {
        let r = creation(m, v)?;
        record(&mut rep, r, "creation", (v, v, 0), -1, 0);
    }
    for t @ (u, v, w) in triples(m, seed, samples) {
        let (wu, wv, lw) = (m.voa.weight(u), m.voa.weight(v), m.level(w));
        for n in (wv + lw - n_cut - 1)..=(wv + lw) {
            let r = vacuum_and_derivative(m, v, w, n)?;
            record(&mut rep, r, "vacuum-derivative", t, n, 0);
        }
        // modes whose result lands at levels 0..=cutoff, plus one annihilating mode
        for q in (wv + lw - n_cut - 1)..=(wv + lw) {
            let lvw = wv + lw - q - 1;
            for p in (wu + lvw - n_cut - 1)..=(wu + lvw.max(lw)) {
                let r = commutator_holds(m, u, v, w, p, q)?;
                record(&mut rep, r, "commutator", t, p, q);
                let k0 = lw + wu;
                let n0 = (lw + wv - q - 1).max(0);
                for (k, n) in [(k0, n0), (k0 + 1, n0), (k0, n0 + 1)] {
                    let r = associator_holds(m, u, v, w, p, q, k, n)?;
                    record(&mut rep, r, "associator", t, p, q);
                }
            }
        }
        if rep.failure.is_some() {
            break;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;
    use crate::voa::presentation::{make_heisenberg, make_virasoro, ModulePresentation};
    use std::sync::Arc;

    #[test]
    fn heisenberg_adjoint_passes() {
        let v = Arc::new(make_heisenberg(4));
        let m = ModulePresentation::adjoint(&v);
        let rep = axiom_check(&m, 7, 40).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.checked > 100);
    }

    #[test]
    fn corrupted_entry_is_caught() {
        let v = Arc::new(make_virasoro(int(1), 4));
        let mut m = ModulePresentation::adjoint(&v);
        let w = v.generator_index(0).unwrap();
        let e = m.action.entry_mut(w, w, 1).unwrap();
        e[0].1 += int(1);
        let rep = axiom_check(&m, 1, 60).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn virasoro_and_tensor_pass() {
        let v = Arc::new(make_virasoro(crate::rat::rat(1, 2), 5));
        let rep = axiom_check(&ModulePresentation::adjoint(&v), 3, 80).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let h = Arc::new(make_heisenberg(3));
        let t = Arc::new(crate::voa::tensor_voa(&h, &h, 3).unwrap());
        assert_eq!(t.dims_by_weight(), vec![1, 2, 5, 10]);
        let rep = axiom_check(&ModulePresentation::adjoint(&t), 5, 120).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
