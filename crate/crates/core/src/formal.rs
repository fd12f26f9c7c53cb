//! Formal calculus in one variable: Laurent polynomials, windowed series with
//! an expansion region, the binomial expansion conventions, the two ι-maps and
//! their certified inverse.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::linalg::Vector;
use crate::rat::{binom, fmt_rat, parse_rat, pow, Rat};
use crate::{Error, Result};

/// Coefficient types a series may carry.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    /// `self += s * other`
    fn add_scaled(&mut self, s: &Rat, other: &Self);

    fn scaled(&self, s: &Rat) -> Self {
        let mut out = self.zero_like();
        out.add_scaled(s, self);
        out
    }
}

impl Coeff for Rat {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn add_scaled(&mut self, s: &Rat, other: &Self) {
        *self += s * other;
    }
}

impl Coeff for Vector {
    fn is_zero(&self) -> bool {
        self.iter().all(Zero::is_zero)
    }
    fn zero_like(&self) -> Self {
        vec![Rat::zero(); self.len()]
    }
    fn add_scaled(&mut self, s: &Rat, other: &Self) {
        crate::linalg::axpy(self, s, other);
    }
}

/// Finite Laurent polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly(pub BTreeMap<i64, Rat>);

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly(BTreeMap::new())
    }

    pub fn monomial(e: i64, c: Rat) -> Self {
        let mut p = Self::zero();
        p.add_term(e, &c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Rat)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    pub fn add_term(&mut self, e: i64, c: &Rat) {
        if Zero::is_zero(c) {
            return;
        }
        let slot = self.0.entry(e).or_insert_with(Rat::zero);
        *slot += c;
        if Zero::is_zero(slot) {
            self.0.remove(&e);
        }
    }

    pub fn coeff(&self, e: i64) -> Rat {
        self.0.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.0.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.0.keys().next_back().copied()
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (a, x) in &self.0 {
            for (b, y) in &other.0 {
                out.add_term(a + b, &(x * y));
            }
        }
        out
    }

    /// `(x - z)^k` for `k >= 0`.
    pub fn x_minus(z: &Rat, k: i64) -> LaurentPoly {
        assert!(k >= 0);
        LaurentPoly::from_terms((0..=k).map(|i| (k - i, binom(k, i) * pow(&-z, i))))
    }
}

impl Coeff for LaurentPoly {
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn zero_like(&self) -> Self {
        LaurentPoly::zero()
    }
    fn add_scaled(&mut self, s: &Rat, other: &Self) {
        for (e, c) in &other.0 {
            self.add_term(*e, &(s * c));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    AtZero,
    AtInfinity,
    LaurentPoly,
}

/// A bilateral formal series known exactly on the window `[lo, hi]`.
///
/// When `closed` is set the series also vanishes beyond the window on its
/// truncated side: above `hi` for `AtInfinity`, below `lo` for `AtZero`, and on
/// both sides for `LaurentPoly`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedSeries<C: Coeff> {
    pub region: Region,
    pub lo: i64,
    pub hi: i64,
    pub closed: bool,
    coeffs: BTreeMap<i64, C>,
    zero: C,
}

impl<C: Coeff> WindowedSeries<C> {
    pub fn new(region: Region, lo: i64, hi: i64, closed: bool, zero: C) -> Self {
        WindowedSeries {
            region,
            lo,
            hi,
            closed: closed || region == Region::LaurentPoly,
            coeffs: BTreeMap::new(),
            zero: zero.zero_like(),
        }
    }

    /// Builds a series from a coefficient function on the window.
    pub fn from_fn(region: Region, lo: i64, hi: i64, closed: bool, zero: C, mut f: impl FnMut(i64) -> C) -> Self {
        let mut s = Self::new(region, lo, hi, closed, zero);
        for e in lo..=hi {
            s.set(e, f(e));
        }
        s
    }

    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }

    pub fn set(&mut self, e: i64, c: C) {
        assert!(e >= self.lo && e <= self.hi, "exponent {e} outside window");
        if c.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, c);
        }
    }

    /// Bounds of the exponents whose coefficients are known; `None` means the
    /// series is known (to vanish) all the way out on that side.
    pub fn known_range(&self) -> (Option<i64>, Option<i64>) {
        match (self.region, self.closed) {
            (Region::LaurentPoly, _) => (None, None),
            (Region::AtInfinity, true) => (Some(self.lo), None),
            (Region::AtZero, true) => (None, Some(self.hi)),
            _ => (Some(self.lo), Some(self.hi)),
        }
    }

    pub fn knows(&self, e: i64) -> bool {
        let (a, b) = self.known_range();
        a.is_none_or(|a| e >= a) && b.is_none_or(|b| e <= b)
    }

    pub fn coeff(&self, e: i64) -> Result<C> {
        if !self.knows(e) {
            return Err(Error::Window {
                exponent: e,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(self.coeffs.get(&e).cloned().unwrap_or_else(|| self.zero.clone()))
    }

    /// Nonzero coefficients in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_support(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_support(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    fn with_range(region: Region, range: (Option<i64>, Option<i64>), zero: C, mut f: impl FnMut(i64) -> C, support: (i64, i64)) -> Self {
        let (lo, closed_lo) = match range.0 {
            Some(a) => (a, false),
            None => (support.0, true),
        };
        let (hi, closed_hi) = match range.1 {
            Some(b) => (b, false),
            None => (support.1, true),
        };
        let region = if closed_lo && closed_hi { Region::LaurentPoly } else { region };
        let closed = match region {
            Region::LaurentPoly => true,
            Region::AtInfinity => closed_hi,
            Region::AtZero => closed_lo,
        };
        WindowedSeries::from_fn(region, lo, hi.max(lo - 1), closed, zero, &mut f)
    }

    fn combined_region(&self, other: Region) -> Result<Region> {
        match (self.region, other) {
            (a, b) if a == b => Ok(a),
            (Region::LaurentPoly, b) => Ok(b),
            (a, Region::LaurentPoly) => Ok(a),
            (a, b) => Err(Error::Domain(format!("cannot combine series expanded {a:?} and {b:?}"))),
        }
    }

    fn support_bounds(&self) -> (i64, i64) {
        (self.min_support().unwrap_or(self.lo), self.max_support().unwrap_or(self.lo - 1))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let region = self.combined_region(other.region)?;
        let (a1, b1) = self.known_range();
        let (a2, b2) = other.known_range();
        let lo = match (a1, a2) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        let hi = match (b1, b2) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        let (s1, t1) = self.support_bounds();
        let (s2, t2) = other.support_bounds();
        let support = (s1.min(s2), t1.max(t2));
        Ok(Self::with_range(
            region,
            (lo, hi),
            self.zero.clone(),
            |e| {
                let mut c = self.coeff(e).unwrap_or_else(|_| self.zero.clone());
                if let Ok(d) = other.coeff(e) {
                    c.add_scaled(&Rat::one(), &d);
                }
                c
            },
            support,
        ))
    }

    pub fn scale(&self, s: &Rat) -> Self {
        let mut out = self.clone();
        out.coeffs = self.coeffs.iter().map(|(e, c)| (*e, c.scaled(s))).filter(|(_, c)| !c.is_zero()).collect();
        out
    }

    /// Multiplication by a Laurent polynomial.
    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        let (Some(pl), Some(ph)) = (p.min_exp(), p.max_exp()) else {
            return Self::new(Region::LaurentPoly, 0, -1, true, self.zero.clone());
        };
        let (a, b) = self.known_range();
        let range = (a.map(|a| a + ph), b.map(|b| b + pl));
        let (s0, s1) = self.support_bounds();
        Self::with_range(
            self.region,
            range,
            self.zero.clone(),
            |e| {
                let mut c = self.zero.clone();
                for (d, pc) in &p.0 {
                    if let Ok(sc) = self.coeff(e - d) {
                        c.add_scaled(pc, &sc);
                    }
                }
                c
            },
            (s0 + pl, s1 + ph),
        )
    }

    /// Multiplication by a scalar series expanded in a compatible region.
    /// Both factors must be closed on the truncated side unless one of them
    /// is a Laurent polynomial.
    pub fn mul_series(&self, other: &WindowedSeries<Rat>) -> Result<Self> {
        if other.region == Region::LaurentPoly {
            return Ok(self.mul_poly(&LaurentPoly(other.coeffs.clone())));
        }
        let region = self.combined_region(other.region)?;
        let closed_ok = |s: &Self| s.closed || s.region == Region::LaurentPoly;
        if !closed_ok(self) || !other.closed {
            return Err(Error::Domain("product of series needs both factors closed on the truncated side".into()));
        }
        let (s0, s1) = self.support_bounds();
        let (o0, o1) = (other.min_support().unwrap_or(other.lo), other.max_support().unwrap_or(other.lo - 1));
        match region {
            Region::AtInfinity => {
                let (sl, _) = self.known_range();
                let sl = sl.unwrap_or(s0);
                let lo = (sl + o1.max(other.lo)).max(other.lo + s1.max(sl));
                Ok(Self::with_range(
                    region,
                    (Some(lo), None),
                    self.zero.clone(),
                    |e| {
                        let mut c = self.zero.clone();
                        for (d, oc) in other.terms() {
                            if let Ok(sc) = self.coeff(e - d) {
                                c.add_scaled(oc, &sc);
                            }
                        }
                        c
                    },
                    (s0 + o0, s1 + o1),
                ))
            }
            Region::AtZero => {
                let (_, sh) = self.known_range();
                let sh = sh.unwrap_or(s1);
                let hi = (sh + o0.min(other.hi)).min(other.hi + s0.min(sh));
                Ok(Self::with_range(
                    region,
                    (None, Some(hi)),
                    self.zero.clone(),
                    |e| {
                        let mut c = self.zero.clone();
                        for (d, oc) in other.terms() {
                            if let Ok(sc) = self.coeff(e - d) {
                                c.add_scaled(oc, &sc);
                            }
                        }
                        c
                    },
                    (s0 + o0, s1 + o1),
                ))
            }
            Region::LaurentPoly => unreachable!(),
        }
    }

    /// Substitutes `x -> x + z0` in a series closed above, expanding in
    /// nonnegative powers of `z0`. The window is preserved.
    pub fn shift_argument(&self, z0: &Rat) -> Result<Self> {
        if !(self.closed && matches!(self.region, Region::AtInfinity | Region::LaurentPoly)) {
            return Err(Error::Domain("argument shift needs a series closed above".into()));
        }
        let top = self.max_support().unwrap_or(self.lo - 1);
        let lo = if self.region == Region::LaurentPoly {
            self.min_support().unwrap_or(0).min(0)
        } else {
            self.lo
        };
        let region = if self.region == Region::LaurentPoly && self.min_support().is_none_or(|m| m >= 0) {
            Region::LaurentPoly
        } else {
            Region::AtInfinity
        };
        let mut out = Self::new(region, lo, top.max(lo - 1), true, self.zero.clone());
        for d in lo..=top {
            let mut c = self.zero.clone();
            for (e, sc) in self.coeffs.range(d..) {
                c.add_scaled(&(binom(*e, e - d) * pow(z0, e - d)), sc);
            }
            out.set(d, c);
        }
        Ok(out)
    }

    /// Restricts to a sub-window, opening the tail if the new window cuts support.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        let (a, b) = self.known_range();
        let lo = a.map_or(lo, |a| lo.max(a));
        let hi = b.map_or(hi, |b| hi.min(b));
        let closed = match self.region {
            Region::AtInfinity | Region::LaurentPoly => self.closed && self.max_support().is_none_or(|m| m <= hi),
            Region::AtZero => self.closed && self.min_support().is_none_or(|m| m >= lo),
        } && (self.region != Region::LaurentPoly || self.min_support().is_none_or(|m| m >= lo));
        let region = if self.region == Region::LaurentPoly && !closed {
            Region::AtInfinity
        } else {
            self.region
        };
        let mut out = Self::new(region, lo, hi, closed, self.zero.clone());
        for (e, c) in self.coeffs.range(lo..=hi.max(lo)) {
            if *e <= hi {
                out.set(*e, c.clone());
            }
        }
        out
    }

    pub fn map<D: Coeff>(&self, zero: D, f: impl Fn(&C) -> D) -> WindowedSeries<D> {
        let mut out = WindowedSeries::new(self.region, self.lo, self.hi, self.closed, zero);
        for (e, c) in &self.coeffs {
            out.set(*e, f(c));
        }
        out
    }
}

impl WindowedSeries<Rat> {
    pub fn scalar(region: Region, lo: i64, hi: i64, closed: bool) -> Self {
        Self::new(region, lo, hi, closed, Rat::zero())
    }

    pub fn to_json(&self) -> Value {
        let coeffs: serde_json::Map<String, Value> = self.coeffs.iter().map(|(e, c)| (e.to_string(), Value::String(fmt_rat(c)))).collect();
        json!({
            "region": self.region,
            "window": [self.lo, self.hi],
            "closed": self.closed,
            "coeffs": coeffs,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("series json: {m}"));
        let region: Region = serde_json::from_value(v.get("region").cloned().ok_or_else(|| bad("region"))?)?;
        let window = v.get("window").and_then(Value::as_array).ok_or_else(|| bad("window"))?;
        let lo = window.first().and_then(Value::as_i64).ok_or_else(|| bad("window lo"))?;
        let hi = window.get(1).and_then(Value::as_i64).ok_or_else(|| bad("window hi"))?;
        let closed = v.get("closed").and_then(Value::as_bool).unwrap_or(region == Region::LaurentPoly);
        let mut s = Self::scalar(region, lo, hi, closed);
        if let Some(map) = v.get("coeffs").and_then(Value::as_object) {
            for (k, c) in map {
                let e: i64 = k.parse().map_err(|_| bad("exponent"))?;
                let c = parse_rat(c.as_str().ok_or_else(|| bad("coefficient"))?)?;
                if e < lo || e > hi {
                    return Err(bad("coefficient outside window"));
                }
                s.set(e, c);
            }
        }
        Ok(s)
    }
}

impl<C: Coeff> fmt::Display for WindowedSeries<C>
where
    C: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.coeffs.iter().map(|(e, c)| format!("{c:?}·x^{e}")).collect();
        write!(
            f,
            "[{:?} {}..{}{}] {}",
            self.region,
            self.lo,
            self.hi,
            if self.closed { " closed" } else { "" },
            terms.join(" + ")
        )
    }
}

/// `x^{-l} (x - z)^{-k} g(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm<C: Coeff> {
    pub g: BTreeMap<i64, C>,
    pub l: i64,
    pub k: i64,
    pub z: Rat,
    pub zero: C,
}

impl RationalForm<Rat> {
    pub fn scalar(g: LaurentPoly, l: i64, k: i64, z: Rat) -> Self {
        RationalForm {
            g: g.0,
            l,
            k,
            z,
            zero: Rat::zero(),
        }
    }

    pub fn numerator(&self) -> LaurentPoly {
        LaurentPoly(self.g.clone())
    }

    pub fn to_json(&self) -> Value {
        let g: serde_json::Map<String, Value> = self.g.iter().map(|(e, c)| (e.to_string(), Value::String(fmt_rat(c)))).collect();
        json!({"g": g, "l": self.l, "k": self.k, "z": fmt_rat(&self.z)})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("rational form json: {m}"));
        let mut g = LaurentPoly::zero();
        for (k, c) in v.get("g").and_then(Value::as_object).ok_or_else(|| bad("g"))? {
            let e: i64 = k.parse().map_err(|_| bad("exponent"))?;
            g.add_term(e, &parse_rat(c.as_str().ok_or_else(|| bad("coefficient"))?)?);
        }
        let l = v.get("l").and_then(Value::as_i64).ok_or_else(|| bad("l"))?;
        let k = v.get("k").and_then(Value::as_i64).ok_or_else(|| bad("k"))?;
        let z = parse_rat(v.get("z").and_then(Value::as_str).ok_or_else(|| bad("z"))?)?;
        Ok(Self::scalar(g, l, k, z))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binomial {
    /// `(x - z)^n`, expanded in nonnegative powers of `z`.
    XMinusZ,
    /// `(z - x)^n`, expanded in nonnegative powers of `x`.
    ZMinusX,
}

/// Expansion of `(x - z)^n` or `(z - x)^n` on the window `[lo, hi]`.
pub fn binom_expand(base: Binomial, n: i64, z: &Rat, lo: i64, hi: i64) -> Result<WindowedSeries<Rat>> {
    if Zero::is_zero(z) && n < 0 {
        return Err(Error::Domain("negative power of a binomial with z = 0".into()));
    }
    Ok(match base {
        Binomial::XMinusZ => {
            let region = if n >= 0 { Region::LaurentPoly } else { Region::AtInfinity };
            let (lo, hi) = if n >= 0 { (0, n) } else { (lo, hi) };
            WindowedSeries::from_fn(region, lo, hi, hi >= n, Rat::zero(), |e| {
                let i = n - e;
                if i < 0 {
                    Rat::zero()
                } else {
                    binom(n, i) * pow(&-z, i)
                }
            })
        }
        Binomial::ZMinusX => {
            let region = if n >= 0 { Region::LaurentPoly } else { Region::AtZero };
            let (lo, hi) = if n >= 0 { (0, n) } else { (lo, hi) };
            WindowedSeries::from_fn(region, lo, hi, lo <= 0, Rat::zero(), |i| {
                if i < 0 || (n >= 0 && i > n) {
                    Rat::zero()
                } else {
                    crate::rat::sign(i) * binom(n, i) * pow(z, n - i)
                }
            })
        }
    })
}

/// `(x1 - x2)^n` as a series in `x1` whose coefficients are monomials in `x2`.
pub fn binom_expand_symbolic(n: i64, lo: i64, hi: i64) -> WindowedSeries<LaurentPoly> {
    let region = if n >= 0 { Region::LaurentPoly } else { Region::AtInfinity };
    let (lo, hi) = if n >= 0 { (0, n) } else { (lo, hi) };
    WindowedSeries::from_fn(region, lo, hi, hi >= n, LaurentPoly::zero(), |e| {
        let i = n - e;
        if i < 0 {
            LaurentPoly::zero()
        } else {
            LaurentPoly::monomial(i, binom(n, i) * crate::rat::sign(i))
        }
    })
}

/// ι-expansion of a rational form at `x = 0` or `x = ∞` on `[lo, hi]`.
pub fn iota_expand<C: Coeff>(rf: &RationalForm<C>, region: Region, lo: i64, hi: i64) -> Result<WindowedSeries<C>> {
    let (k, l, z) = (rf.k, rf.l, &rf.z);
    if k > 0 && Zero::is_zero(z) {
        return Err(Error::Domain("rational form with a pole at z = 0 counted twice".into()));
    }
    let dmin = rf.g.keys().next().copied();
    let dmax = rf.g.keys().next_back().copied();
    if k == 0 {
        // a Laurent polynomial: both expansions agree
        let top = dmax.map_or(lo - 1, |d| d - l);
        let bottom = dmin.map_or(lo, |d| d - l);
        let covers = lo <= bottom && hi >= top;
        let region = if covers { Region::LaurentPoly } else { region };
        let closed = covers
            || match region {
                Region::AtInfinity => hi >= top,
                Region::AtZero => lo <= bottom,
                Region::LaurentPoly => true,
            };
        return Ok(WindowedSeries::from_fn(region, lo, hi, closed, rf.zero.clone(), |e| {
            rf.g.get(&(e + l)).cloned().unwrap_or_else(|| rf.zero.clone())
        }));
    }
    match region {
        Region::AtInfinity | Region::LaurentPoly => {
            let top = dmax.map_or(lo - 1, |d| d - l - k);
            Ok(WindowedSeries::from_fn(Region::AtInfinity, lo, hi, hi >= top, rf.zero.clone(), |e| {
                let mut c = rf.zero.clone();
                for (d, gd) in &rf.g {
                    let i = d - l - k - e;
                    if i >= 0 {
                        c.add_scaled(&(binom(-k, i) * pow(&-z, i)), gd);
                    }
                }
                c
            }))
        }
        Region::AtZero => {
            let bottom = dmin.map_or(hi + 1, |d| d - l);
            Ok(WindowedSeries::from_fn(Region::AtZero, lo, hi, lo <= bottom, rf.zero.clone(), |e| {
                let mut c = rf.zero.clone();
                for (d, gd) in &rf.g {
                    let i = e - d + l;
                    if i >= 0 {
                        c.add_scaled(&(binom(-k, i) * pow(&-z, -k - i)), gd);
                    }
                }
                c
            }))
        }
    }
}

/// Inverts `ι_{x;∞}` on a series closed above, given a certificate `(l, k)`:
/// `x^l (x - z)^k s` must be a polynomial.
pub fn recompose<C: Coeff>(s: &WindowedSeries<C>, l: i64, k: i64, z: &Rat) -> Result<RationalForm<C>> {
    if l < 0 || k < 0 {
        return Err(Error::Domain("certificate exponents must be nonnegative".into()));
    }
    if !(s.closed && matches!(s.region, Region::AtInfinity | Region::LaurentPoly)) {
        return Err(Error::Domain("recompose needs a series expanded at infinity and closed above".into()));
    }
    let p = LaurentPoly::x_minus(z, k);
    let lo = if s.region == Region::LaurentPoly {
        s.min_support().unwrap_or(0).min(s.lo)
    } else {
        s.lo
    };
    if lo + l + k > 0 {
        return Err(Error::Window {
            exponent: -1,
            lo: lo + l + k,
            hi: s.hi + l + k,
        });
    }
    let top = s.max_support().map_or(-1, |t| t + l + k);
    let mut g = BTreeMap::new();
    for e in (lo + l + k)..=top {
        let mut c = s.zero_coeff().clone();
        for (j, pj) in &p.0 {
            if let Ok(sc) = s.coeff(e - l - j) {
                c.add_scaled(pj, &sc);
            }
        }
        if c.is_zero() {
            continue;
        }
        if e < 0 {
            return Err(Error::Certificate { k, l, exponent: e });
        }
        g.insert(e, c);
    }
    Ok(RationalForm {
        g,
        l,
        k,
        z: z.clone(),
        zero: s.zero_coeff().clone(),
    })
}

/// Coefficient of `x^{-1}`.
pub fn residue<C: Coeff>(s: &WindowedSeries<C>) -> Result<C> {
    s.coeff(-1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn binomial_conventions() {
        let s = binom_expand(Binomial::XMinusZ, -1, &int(1), -6, -1).unwrap();
        for e in -6..=-1 {
            assert_eq!(s.coeff(e).unwrap(), int(1));
        }
        assert_eq!(s.coeff(0).unwrap(), int(0));
        assert!(s.coeff(-7).is_err());

        let t = binom_expand(Binomial::ZMinusX, -1, &int(2), 0, 4).unwrap();
        for i in 0..=4 {
            assert_eq!(t.coeff(i).unwrap(), pow(&rat(1, 2), i + 1));
        }
        let sq = binom_expand(Binomial::XMinusZ, 2, &int(3), 0, 0).unwrap();
        assert_eq!(sq.region, Region::LaurentPoly);
        assert_eq!(sq.coeff(1).unwrap(), int(-6));
        assert!(binom_expand(Binomial::ZMinusX, -2, &int(0), 0, 3).is_err());
    }

    #[test]
    fn iota_maps_and_residue() {
        let rf = RationalForm::scalar(LaurentPoly::monomial(0, int(1)), 0, 1, int(1));
        let inf = iota_expand(&rf, Region::AtInfinity, -4, -1).unwrap();
        assert_eq!(residue(&inf).unwrap(), int(1));
        let at0 = iota_expand(&rf, Region::AtZero, 0, 3).unwrap();
        assert_eq!(at0.coeff(2).unwrap(), int(-1));
        assert_eq!(residue(&at0).unwrap(), int(0));
        let mono = RationalForm::scalar(LaurentPoly::monomial(0, int(1)), 1, 0, int(5));
        assert_eq!(iota_expand(&mono, Region::AtZero, -3, 3).unwrap().coeff(-1).unwrap(), int(1));
    }

    #[test]
    fn recompose_round_trip() {
        let g = LaurentPoly::from_terms([(3, int(1)), (0, int(1))]);
        let rf = RationalForm::scalar(g.clone(), 2, 1, int(2));
        let s = iota_expand(&rf, Region::AtInfinity, -12, 5).unwrap();
        let back = recompose(&s, 2, 1, &int(2)).unwrap();
        assert_eq!(back.numerator(), g);
        assert!(matches!(recompose(&s, 1, 1, &int(2)), Err(Error::Certificate { .. })));
    }

    #[test]
    fn shift_of_polynomial() {
        let s = WindowedSeries::from_fn(Region::LaurentPoly, 0, 2, true, Rat::zero(), |e| if e == 2 { int(1) } else { int(0) });
        let t = s.shift_argument(&int(3)).unwrap();
        assert_eq!(t.coeff(0).unwrap(), int(9));
        assert_eq!(t.coeff(1).unwrap(), int(6));
    }

    #[test]
    fn json_round_trip() {
        let s = binom_expand(Binomial::XMinusZ, -2, &rat(1, 3), -5, -2).unwrap();
        assert_eq!(WindowedSeries::from_json(&s.to_json()).unwrap(), s);
        let rf = RationalForm::scalar(LaurentPoly::from_terms([(1, rat(2, 7))]), 1, 2, int(-1));
        assert_eq!(RationalForm::from_json(&rf.to_json()).unwrap(), rf);
    }
}
