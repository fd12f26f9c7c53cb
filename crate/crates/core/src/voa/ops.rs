//! Vertex operators, the opposite operator and residue helpers.

use num_traits::Zero;

use super::presentation::ModulePresentation;
use crate::formal::{Region, WindowedSeries};
use crate::linalg::{axpy, is_zero, scaled, zeros, Vector};
use crate::rat::{binom, factorial, pow, sign, Rat};
use crate::{Error, Result};

/// Splits a module vector into its homogeneous components, by level.
pub fn split_levels(m: &ModulePresentation, w: &[Rat]) -> Vec<(i64, Vector)> {
    let mut out = Vec::new();
    for lvl in 0..=m.cutoff {
        let r = m.range(lvl);
        if w[r.clone()].iter().all(Zero::is_zero) {
            continue;
        }
        let mut part = zeros(m.dim());
        for i in r {
            part[i] = w[i].clone();
        }
        out.push((lvl, part));
    }
    out
}

fn homogeneous_weight(m: &ModulePresentation, v: &[Rat]) -> Result<Option<i64>> {
    if is_zero(v) {
        return Ok(None);
    }
    m.voa
        .weight_of(v)
        .map(Some)
        .ok_or_else(|| Error::Domain("vector of the VOA must be homogeneous".into()))
}

/// `Y(v, x) w = Σ_m v_m w x^{-m-1}` for homogeneous `v`, on the exponents
/// whose coefficients stay inside the cutoff.
pub fn vertex_act(m: &ModulePresentation, v: &[Rat], w: &[Rat]) -> Result<WindowedSeries<Vector>> {
    let zero = zeros(m.dim());
    let Some(wv) = homogeneous_weight(m, v)? else {
        return Ok(WindowedSeries::new(Region::AtZero, 0, -1, true, zero));
    };
    let mut acc: Option<WindowedSeries<Vector>> = None;
    for (lw, part) in split_levels(m, w) {
        let (lo, hi) = (-wv - lw, m.cutoff - wv - lw);
        let mut s = WindowedSeries::new(Region::AtZero, lo, hi, true, zero.clone());
        for e in lo..=hi {
            s.set(e, m.act(v, -e - 1, &part)?);
        }
        acc = Some(match acc {
            None => s,
            Some(a) => a.add(&s)?,
        });
    }
    Ok(acc.unwrap_or_else(|| WindowedSeries::new(Region::AtZero, 0, -1, true, zero)))
}

/// `L(1)^i v / i!` for `i = 0, 1, ...` until it vanishes.
pub fn l1_exponential_terms(m: &ModulePresentation, v: &[Rat]) -> Result<Vec<Vector>> {
    let voa = &m.voa;
    let mut terms = vec![v.to_vec()];
    let mut cur = v.to_vec();
    let mut i = 1i64;
    while !is_zero(&cur) {
        cur = voa.l_op(1, &cur)?;
        if is_zero(&cur) {
            break;
        }
        terms.push(scaled(&cur, &(Rat::from_integer(1.into()) / factorial(i as u64))));
        i += 1;
    }
    Ok(terms)
}

/// `Y°(v, x) w = Y(e^{x L(1)} (-x^{-2})^{L(0)} v, x^{-1}) w` for homogeneous
/// `v`. The coefficient of `x^e` on a level-`l` vector `w` sits at level
/// `l - wt v - e`, so the series is closed above.
pub fn y_opposite(m: &ModulePresentation, v: &[Rat], w: &[Rat]) -> Result<WindowedSeries<Vector>> {
    let zero = zeros(m.dim());
    let Some(wv) = homogeneous_weight(m, v)? else {
        return Ok(WindowedSeries::new(Region::AtInfinity, 0, -1, true, zero));
    };
    let terms = l1_exponential_terms(m, v)?;
    let mut acc: Option<WindowedSeries<Vector>> = None;
    for (lw, part) in split_levels(m, w) {
        let (lo, hi) = (lw - wv - m.cutoff, lw - wv);
        let mut s = WindowedSeries::new(Region::AtInfinity, lo, hi, true, zero.clone());
        for e in lo..=hi {
            let mut c = zeros(m.dim());
            for (i, u) in terms.iter().enumerate() {
                let n = e + 2 * wv - 1 - i as i64;
                axpy(&mut c, &Rat::from_integer(1.into()), &m.act(u, n, &part)?);
            }
            s.set(e, scaled(&c, &sign(wv)));
        }
        acc = Some(match acc {
            None => s,
            Some(a) => a.add(&s)?,
        });
    }
    Ok(acc.unwrap_or_else(|| WindowedSeries::new(Region::AtInfinity, 0, -1, true, zero)))
}

/// `(Y°)°(v, x) w`, obtained by twisting `Y°` once more.
pub fn y_double_opposite(m: &ModulePresentation, v: &[Rat], w: &[Rat]) -> Result<WindowedSeries<Vector>> {
    let zero = zeros(m.dim());
    let Some(wv) = homogeneous_weight(m, v)? else {
        return Ok(WindowedSeries::new(Region::AtZero, 0, -1, true, zero));
    };
    let terms = l1_exponential_terms(m, v)?;
    let mut acc: Option<WindowedSeries<Vector>> = None;
    for (lw, part) in split_levels(m, w) {
        let (lo, hi) = (-wv - lw, m.cutoff - wv - lw);
        let mut s = WindowedSeries::new(Region::AtZero, lo, hi, true, zero.clone());
        let opp: Vec<WindowedSeries<Vector>> = terms.iter().map(|u| y_opposite(m, u, &part)).collect::<Result<_>>()?;
        for d in lo..=hi {
            let mut c = zeros(m.dim());
            for (i, (u, ser)) in terms.iter().zip(&opp).enumerate() {
                if is_zero(u) {
                    continue;
                }
                let i = i as i64;
                let e = -2 * wv + i - d;
                axpy(&mut c, &sign(wv), &ser.coeff(e)?);
            }
            s.set(d, c);
        }
        acc = Some(match acc {
            None => s,
            Some(a) => a.add(&s)?,
        });
    }
    Ok(acc.unwrap_or_else(|| WindowedSeries::new(Region::AtZero, 0, -1, true, zero)))
}

/// `Res_x x^m (1 + a x)^n Y(v, x) w = Σ_i C(n, i) a^i v_{m+i} w`.
pub fn res_binomial(m: &ModulePresentation, v: &[Rat], w: &[Rat], mm: i64, n: i64, a: &Rat) -> Result<Vector> {
    let mut out = zeros(m.dim());
    let Some(wv) = homogeneous_weight(m, v)? else { return Ok(out) };
    for (lw, part) in split_levels(m, w) {
        let top = wv + lw - mm - 1;
        for i in 0..=top.max(-1) {
            let c = binom(n, i) * pow(a, i);
            if c.is_zero() {
                continue;
            }
            axpy(&mut out, &c, &m.act(v, mm + i, &part)?);
        }
    }
    Ok(out)
}

/// Both sides of the rescaling residue identity
/// `Res_x (-z)^{-wt v} x^m (1-zx)^n Y(v,x) w = (-z)^{-m-1} Res_x x^m (1+x)^n Y^{(-1/z)}(v,x) w`,
/// where `rescaled` is the module with `Y^{(-1/z)}`.
pub fn rescale_residue_sides(
    w_mod: &ModulePresentation,
    rescaled: &ModulePresentation,
    v: &[Rat],
    w: &[Rat],
    mm: i64,
    n: i64,
    z: &Rat,
) -> Result<(Vector, Vector)> {
    let wv = homogeneous_weight(w_mod, v)?.unwrap_or(0);
    let mz = -z.clone();
    let lhs = scaled(&res_binomial(w_mod, v, w, mm, n, &mz)?, &pow(&mz, -wv));
    let rhs = scaled(&res_binomial(rescaled, v, w, mm, n, &Rat::from_integer(1.into()))?, &pow(&mz, -mm - 1));
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use crate::voa::presentation::{make_heisenberg, make_virasoro, rescale_module};
    use std::sync::Arc;

    #[test]
    fn vacuum_operators_are_trivial() {
        let v = Arc::new(make_virasoro(rat(1, 2), 5));
        let m = ModulePresentation::adjoint(&v);
        let one = v.vacuum_vec();
        for j in 0..v.dim() {
            let w = m.unit(j);
            let y = vertex_act(&m, &one, &w).unwrap();
            let o = y_opposite(&m, &one, &w).unwrap();
            for e in y.lo..=y.hi {
                let expect = if e == 0 { w.clone() } else { zeros(m.dim()) };
                assert_eq!(y.coeff(e).unwrap(), expect);
                assert_eq!(o.coeff(-e).unwrap_or_else(|_| expect.clone()), expect);
            }
        }
    }

    #[test]
    fn opposite_of_omega_on_vacuum() {
        let v = Arc::new(make_virasoro(int(1), 5));
        let m = ModulePresentation::adjoint(&v);
        let w = v.generator_index(0).unwrap();
        let o = y_opposite(&m, &v.unit(w), &v.vacuum_vec()).unwrap();
        assert_eq!(o.coeff(-4).unwrap(), v.unit(w));
        assert_eq!(o.coeff(-5).unwrap(), v.l_op(-1, &v.unit(w)).unwrap());
        assert!(o.coeff(-3).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn heisenberg_vertex_coefficients() {
        let v = Arc::new(make_heisenberg(4));
        let m = ModulePresentation::adjoint(&v);
        let a = v.unit(v.generator_index(0).unwrap());
        let y = vertex_act(&m, &a, &a).unwrap();
        assert!(is_zero(&y.coeff(-1).unwrap()));
        assert_eq!(y.coeff(-2).unwrap(), v.vacuum_vec());
    }

    #[test]
    fn double_opposite_is_identity() {
        let v = Arc::new(make_virasoro(rat(1, 2), 5));
        let m = ModulePresentation::adjoint(&v);
        for i in 0..v.dim() {
            for j in 0..v.dim() {
                if v.weight(i) + v.weight(j) > 4 {
                    continue;
                }
                let (a, b) = (v.unit(i), v.unit(j));
                let y = vertex_act(&m, &a, &b).unwrap();
                let yy = y_double_opposite(&m, &a, &b).unwrap();
                for e in y.lo..=y.hi {
                    assert_eq!(y.coeff(e).unwrap(), yy.coeff(e).unwrap(), "{i} {j} {e}");
                }
            }
        }
    }

    #[test]
    fn rescale_residue_identity() {
        let v = Arc::new(make_heisenberg(4));
        let m = ModulePresentation::adjoint(&v);
        let z = rat(2, 3);
        let r = rescale_module(&m, &(-Rat::from_integer(1.into()) / &z)).unwrap();
        for i in 0..v.dim() {
            for j in 0..v.dim() {
                for mm in -3..=3 {
                    for n in -3..=3 {
                        let Ok((l, rr)) = rescale_residue_sides(&m, &r, &v.unit(i), &v.unit(j), mm, n, &z) else {
                            continue;
                        };
                        assert_eq!(l, rr);
                    }
                }
            }
        }
    }
}
