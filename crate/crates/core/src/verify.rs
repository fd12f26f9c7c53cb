//! The property suite behind `zhukit verify`: numbered criteria plus the
//! remaining module invariants, assembled into a deterministic report.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dualrep::{self, DualElement, DualSpace};
use crate::formal::{binom_expand, iota_expand, recompose, Binomial, LaurentPoly, RationalForm, Region};
use crate::fusion::{self, FinAlgebra, FinBimodule, FinModule};
use crate::induce::{self, ZhuModule};
use crate::liealg::LieAlgebra;
use crate::linalg::{axpy, is_zero, zeros, Echelon, Matrix, Vector};
use crate::rat::{factorial, int, rat, sign, Rat};
use crate::voa::axioms::{associator_holds, axiom_check};
use crate::voa::ops::rescale_residue_sides;
use crate::voa::{make_heisenberg, make_virasoro, rescale_module, tensor_factor_index, tensor_module, tensor_voa, ModulePresentation, VoaPresentation};
use crate::zhu::{o_subspace, omega_subspace, omega_subspace_for, Bimodule, ZhuAlgebra};
use crate::{Error, Result};

/// Outcome of one criterion or invariant suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    pub skipped: usize,
    pub witness: Option<String>,
    pub details: BTreeMap<String, Value>,
}

/// Running tally for a check.
#[derive(Default)]
struct Tally {
    instances: usize,
    skipped: usize,
    failed: bool,
    witness: Option<String>,
    details: BTreeMap<String, Value>,
}

impl Tally {
    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        self.require(ok, witness);
    }

    /// A condition that must hold but is not counted as an instance.
    fn require(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if !ok {
            self.failed = true;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    fn at_least(&mut self, what: &str, got: usize, min: usize) {
        self.require(got >= min, || format!("{what}: {got} < {min}"));
    }

    fn detail(&mut self, key: &str, v: impl Serialize) {
        self.details.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    fn finish(self, id: &str, name: &str) -> Check {
        Check {
            id: id.into(),
            name: name.into(),
            passed: !self.failed,
            instances: self.instances,
            skipped: self.skipped,
            witness: self.witness,
            details: self.details,
        }
    }
}

fn escape<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::CutoffEscape { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

fn nonzero_rat(rng: &mut ChaCha8Rng) -> Rat {
    loop {
        let r = small_rat(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = small_rat(rng);
        }
    }
    m
}

fn vir(c: Rat, n: i64) -> Arc<VoaPresentation> {
    Arc::new(make_virasoro(c, n))
}

fn heis(n: i64) -> Arc<VoaPresentation> {
    Arc::new(make_heisenberg(n))
}

fn adjoint(v: &Arc<VoaPresentation>) -> Arc<ModulePresentation> {
    Arc::new(ModulePresentation::adjoint(v))
}

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "formal calculus laws"),
    (2, "Zhu algebra structure"),
    (3, "generalized bimodule and rescaling"),
    (4, "O-membership of residue elements"),
    (5, "residue identities of the dual actions"),
    (6, "Omega coincidence for dual elements"),
    (7, "three-term identity"),
    (8, "Borcherds Lie algebra"),
    (9, "associator reduction"),
    (10, "induced modules"),
    (11, "depth-one sandwich for Ind U"),
    (12, "fusion layer"),
];

pub const INVARIANTS: [&str; 6] = [
    "axioms",
    "commutativity",
    "certificate-independence",
    "module-structure",
    "omega-tensor",
    "stabilization",
];

pub fn run_criterion(id: u32, seed: u64) -> Result<Check> {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .ok_or_else(|| Error::Config(format!("unknown criterion {id}")))?;
    let t = match id {
        1 => formal_laws(seed)?,
        2 => zhu_structure()?,
        3 => bimodule_and_rescaling()?,
        4 => o_membership()?,
        5 => residue_suite(seed)?,
        6 => omega_coincidence(seed)?,
        7 => three_term_suite(seed)?,
        8 => lie_suite()?,
        9 => associator_suite(seed)?,
        10 => induction_suite(seed)?,
        11 => sandwich_suite(seed)?,
        _ => fusion_suite()?,
    };
    Ok(t.finish(&id.to_string(), name))
}

pub fn run_invariant(name: &str, seed: u64) -> Result<Check> {
    let t = match name {
        "axioms" => axiom_suite(seed)?,
        "commutativity" => commutativity_suite(seed)?,
        "certificate-independence" => certificate_suite(seed)?,
        "module-structure" => module_structure_suite()?,
        "omega-tensor" => omega_tensor_suite()?,
        "stabilization" => stabilization_suite()?,
        _ => return Err(Error::Config(format!("unknown invariant {name}"))),
    };
    Ok(t.finish(name, name))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<Check>,
    pub invariants: Vec<Check>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,name,passed,instances,skipped,witness\n");
        for c in self.criteria.iter().chain(&self.invariants) {
            let w = c.witness.as_deref().unwrap_or("").replace('"', "\"\"");
            out.push_str(&format!("{},\"{}\",{},{},{},\"{}\"\n", c.id, c.name, c.passed, c.instances, c.skipped, w));
        }
        out
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.criteria.iter().chain(&self.invariants).find(|c| !c.passed)
    }
}

/// Every criterion and invariant suite, evaluated in parallel and reported in
/// a fixed order.
pub fn run_all(seed: u64) -> Result<Report> {
    let criteria = CRITERIA.par_iter().map(|(id, _)| run_criterion(*id, seed)).collect::<Result<Vec<_>>>()?;
    let invariants = INVARIANTS.par_iter().map(|n| run_invariant(n, seed)).collect::<Result<Vec<_>>>()?;
    let passed = criteria.iter().chain(&invariants).all(|c| c.passed);
    Ok(Report {
        seed,
        passed,
        criteria,
        invariants,
    })
}

// criterion 1

fn random_form(rng: &mut ChaCha8Rng) -> RationalForm<Rat> {
    let mut g = LaurentPoly::zero();
    while g.0.is_empty() {
        for e in 0..=3 {
            if rng.gen_bool(0.6) {
                g.add_term(e, &small_rat(rng));
            }
        }
    }
    RationalForm::scalar(g, rng.gen_range(0..=2), rng.gen_range(0..=3), nonzero_rat(rng))
}

/// `(x - z)^n rf` as a rational form.
fn times_power(rf: &RationalForm<Rat>, n: i64) -> RationalForm<Rat> {
    if n <= rf.k {
        RationalForm::scalar(rf.numerator(), rf.l, rf.k - n, rf.z.clone())
    } else {
        RationalForm::scalar(rf.numerator().mul(&LaurentPoly::x_minus(&rf.z, n - rf.k)), rf.l, 0, rf.z.clone())
    }
}

fn region_law(rf: &RationalForm<Rat>, n: i64) -> Result<(bool, usize)> {
    let z = &rf.z;
    let moved = times_power(rf, n);
    let mut compared = 0;
    let mut ok = true;
    // at zero: ι_{x;0}((x-z)^n rf) = (-z+x)^n ι_{x;0}(rf)
    let lhs = iota_expand(&moved, Region::AtZero, -rf.l, 6)?;
    let s = iota_expand(rf, Region::AtZero, -rf.l, 10)?;
    let b = binom_expand(Binomial::ZMinusX, n, z, 0, 12)?.scale(&sign(n));
    let prod = s.mul_series(&b)?;
    for e in -rf.l..=6 {
        if prod.knows(e) {
            compared += 1;
            ok &= lhs.coeff(e)? == prod.coeff(e)?;
        }
    }
    // at infinity: ι_{x;∞}((x-z)^n rf) = (x-z)^n ι_{x;∞}(rf)
    let lhs = iota_expand(&moved, Region::AtInfinity, -12, 6)?;
    let top = rf.g.keys().next_back().copied().unwrap_or(0) - rf.l - rf.k;
    let s = iota_expand(rf, Region::AtInfinity, -18, top)?;
    let b = binom_expand(Binomial::XMinusZ, n, z, -18, n.max(0))?;
    let prod = s.mul_series(&b)?;
    for e in -12..=6 {
        if prod.knows(e) {
            compared += 1;
            ok &= lhs.coeff(e)? == prod.coeff(e)?;
        }
    }
    Ok((ok, compared))
}

fn formal_laws(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 1);
    let mut compared = 0;
    for i in 0..200 {
        let rf = random_form(&mut rng);
        let n = rng.gen_range(-3..=3);
        let (ok, c) = region_law(&rf, n)?;
        compared += c;
        t.record(ok && c > 0, || format!("region law, instance {i}, n={n}"));
        let top = rf.g.keys().next_back().copied().unwrap_or(0) - rf.l - rf.k;
        let s = iota_expand(&rf, Region::AtInfinity, -16, top)?;
        let back = recompose(&s, rf.l, rf.k, &rf.z)?;
        t.record(back.numerator() == rf.numerator(), || format!("round trip, instance {i}"));
    }
    // support confinement: f = ι_{x;∞}((x-z)^{-k} g) has f_n in span{g_m : m ≥ n}
    let dim = 4;
    for i in 0..200 {
        let k = rng.gen_range(1..=3);
        let z = nonzero_rat(&mut rng);
        let sub_dim = rng.gen_range(1..=3);
        let span: Vec<Vector> = (0..sub_dim).map(|_| (0..dim).map(|_| small_rat(&mut rng)).collect()).collect();
        let mut g: BTreeMap<i64, Vector> = BTreeMap::new();
        for e in 0..=3 {
            let mut v = zeros(dim);
            for s in &span {
                axpy(&mut v, &small_rat(&mut rng), s);
            }
            if !is_zero(&v) {
                g.insert(e, v);
            }
        }
        let sub = Echelon::from_rows(span, dim);
        let rf = RationalForm {
            g: g.clone(),
            l: 0,
            k,
            z,
            zero: zeros(dim),
        };
        let f = iota_expand(&rf, Region::AtInfinity, -14, 3 - k)?;
        let mut ok = true;
        for e in -14..=(3 - k) {
            let c = f.coeff(e)?;
            let tail = Echelon::from_rows(g.range(e..).map(|(_, v)| v.clone()).collect(), dim);
            ok &= sub.contains(&c) && tail.contains(&c);
        }
        t.record(ok, || format!("support confinement, instance {i}"));
    }
    t.detail("regionCoefficientsCompared", compared);
    t.at_least("instances", t.instances, 600);
    Ok(t)
}

// criterion 2

fn zhu_structure() -> Result<Tally> {
    let mut t = Tally::default();
    let cases: Vec<(&str, Arc<VoaPresentation>, usize)> = vec![
        ("heisenberg N=5", heis(5), 6),
        ("virasoro c=1/2 N=6", vir(rat(1, 2), 6), 4),
        ("virasoro c=1 N=6", vir(int(1), 6), 4),
        ("virasoro c=26 N=6", vir(int(26), 6), 4),
    ];
    let results = cases
        .par_iter()
        .map(|(label, v, expect)| -> Result<(String, Value, bool, Option<String>, usize, usize)> {
            let a = ZhuAlgebra::build(v)?;
            let c = a.checks()?;
            let g = if v.generator_index(0).is_some() && v.central_charge.is_zero() && v.omega.iter().all(Zero::is_zero) {
                v.vacuum_vec()
            } else {
                v.unit(v.generator_index(0).expect("generator"))
            };
            let (power, _) = a.power_rank(&g)?;
            let tallies = [&c.ideal, &c.assoc, &c.identity, &c.central, &c.theta];
            let coverage_ok = tallies.iter().all(|x| x.coverage() >= 0.9);
            let ok = c.passed() && coverage_ok && a.dim() == *expect && power == *expect;
            let witness = (!ok).then(|| format!("{label}: dim {} power rank {power} checks {c:?}", a.dim()));
            let checked: usize = tallies.iter().map(|x| x.checked).sum();
            let skipped: usize = tallies.iter().map(|x| x.skipped).sum();
            let coverage: BTreeMap<&str, String> = [
                ("ideal", &c.ideal),
                ("assoc", &c.assoc),
                ("identity", &c.identity),
                ("central", &c.central),
                ("theta", &c.theta),
            ]
            .into_iter()
            .map(|(k, x)| (k, format!("{}/{}", x.checked, x.checked + x.skipped)))
            .collect();
            Ok((
                label.to_string(),
                json!({"dim": a.dim(), "powerRank": power, "coverage": coverage}),
                ok,
                witness,
                checked,
                skipped,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    for (label, d, ok, w, checked, skipped) in results {
        t.instances += checked;
        t.skipped += skipped;
        t.require(ok, || w.unwrap_or_default());
        t.detail(&label, d);
    }
    Ok(t)
}

// criterion 3

fn bimodule_and_rescaling() -> Result<Tally> {
    let mut t = Tally::default();
    let v = vir(rat(1, 2), 5);
    let a = ZhuAlgebra::build(&v)?;
    let w = adjoint(&v);
    for z in [int(-1), int(2), rat(1, 3)] {
        let b = Bimodule::build(&w, &z, &a)?;
        let c = b.checks(&a)?;
        let tallies = [&c.unit, &c.left_assoc, &c.right_assoc, &c.commute, &c.descends];
        t.instances += tallies.iter().map(|x| x.checked).sum::<usize>();
        t.skipped += tallies.iter().map(|x| x.skipped).sum::<usize>();
        t.require(c.passed(), || format!("bimodule axioms at z={z}: {c:?}"));
        let r = Arc::new(rescale_module(&w, &(-Rat::one() / &z))?);
        let b2 = Bimodule::build(&r, &int(-1), &a)?;
        let same = b.quotient.o_space == b2.quotient.o_space && b.left == b2.left && b.right == b2.right;
        t.record(same, || format!("rescaled bimodule differs at z={z}"));
        t.detail(&format!("dim z={z}"), b.dim());
        for i in 0..v.dim() {
            for j in 0..w.dim() {
                for mm in -3..=3 {
                    for n in -3..=3 {
                        match escape(rescale_residue_sides(&w, &r, &v.unit(i), &w.unit(j), mm, n, &z))? {
                            Some((lhs, rhs)) => t.record(lhs == rhs, || format!("rescaling residue z={z} v={i} w={j} m={mm} n={n}")),
                            None => t.skipped += 1,
                        }
                    }
                }
            }
        }
    }
    Ok(t)
}

// criterion 4

fn l1_power(voa: &VoaPresentation, v: &[Rat], i: usize) -> Result<Vector> {
    let mut x = v.to_vec();
    for _ in 0..i {
        x = voa.l_op(1, &x)?;
    }
    Ok(x)
}

fn o_membership() -> Result<Tally> {
    let mut t = Tally::default();
    let cases = [(vir(rat(1, 2), 6), int(-1)), (vir(rat(1, 2), 6), int(2)), (heis(5), rat(1, 3))];
    let mut plain = 0;
    let mut twisted = 0;
    for (v, z) in &cases {
        let w = adjoint(v);
        let o = o_subspace(&w, z)?;
        let mz = -z.clone();
        for i in 0..v.dim() {
            let wv = v.weight(i);
            for j in 0..w.dim() {
                let lw = w.level(j);
                for n in 0..=2 {
                    if wv + lw + n + 1 > w.cutoff {
                        continue;
                    }
                    for m in 0..=n {
                        let (vi, wj) = (v.unit(i), w.unit(j));
                        let Some(x) = escape(crate::voa::ops::res_binomial(&w, &vi, &wj, -n - 2, wv + m, &mz))? else {
                            t.skipped += 1;
                            continue;
                        };
                        plain += 1;
                        t.record(o.contains(&x), || format!("plain residue z={z} v={i} w={j} n={n} m={m}"));
                        let mut y = zeros(w.dim());
                        let mut ok = true;
                        for p in 0..=wv.max(0) as usize {
                            let lv = l1_power(v, &vi, p)?;
                            if is_zero(&lv) {
                                continue;
                            }
                            match escape(crate::voa::ops::res_binomial(&w, &lv, &wj, -n - p as i64 - 2, wv + m, &mz))? {
                                Some(r) => axpy(&mut y, &(Rat::one() / factorial(p as u64)), &r),
                                None => ok = false,
                            }
                        }
                        if !ok {
                            t.skipped += 1;
                            continue;
                        }
                        twisted += 1;
                        t.record(o.contains(&y), || format!("L(1)-twisted residue z={z} v={i} w={j} n={n} m={m}"));
                    }
                }
            }
        }
    }
    t.detail("plain", plain);
    t.detail("twisted", twisted);
    t.at_least("instances", t.instances, 100);
    Ok(t)
}

// criteria 5, 6, 7 share lifted functionals

struct DualFixture {
    label: String,
    bimodule: Bimodule,
    space: DualSpace,
}

fn dual_fixture(label: &str, v: Arc<VoaPresentation>, z: Rat) -> Result<DualFixture> {
    let a = ZhuAlgebra::build(&v)?;
    let w = adjoint(&v);
    let bimodule = Bimodule::build(&w, &z, &a)?;
    let space = DualSpace::new(w, z.clone())?;
    Ok(DualFixture {
        label: format!("{label} z={z}"),
        bimodule,
        space,
    })
}

fn dual_fixtures(zs: &[Rat]) -> Result<Vec<DualFixture>> {
    let mut jobs = Vec::new();
    for z in zs {
        jobs.push(("virasoro c=1/2 N=4", vir(rat(1, 2), 4), z.clone()));
        jobs.push(("heisenberg N=4", heis(4), z.clone()));
    }
    jobs.into_par_iter().map(|(l, v, z)| dual_fixture(l, v, z)).collect()
}

fn random_lift(rng: &mut ChaCha8Rng, fx: &DualFixture) -> Result<DualElement> {
    let u_dim = rng.gen_range(1..=2);
    let phi = random_matrix(rng, u_dim, fx.bimodule.dim());
    fx.space.lift_functional(&fx.bimodule, &phi)
}

fn residue_suite(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let fixtures = dual_fixtures(&[int(-1), int(2)])?;
    let per = 13;
    let outcomes = fixtures
        .par_iter()
        .enumerate()
        .map(|(fi, fx)| -> Result<Vec<(usize, Vec<String>)>> {
            let mut rng = rng_for(seed, 50 + fi as u64);
            (0..per)
                .map(|_| {
                    let f = random_lift(&mut rng, fx)?;
                    let r = dualrep::residue_identities(&fx.space, &f, 3)?;
                    Ok((r.checked, r.failures.into_iter().map(|s| format!("{}: {s}", fx.label)).collect()))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut identities = 0;
    for (fx, rows) in fixtures.iter().zip(outcomes) {
        for (checked, failures) in rows {
            identities += checked;
            t.record(checked > 0 && failures.is_empty(), || {
                failures.first().cloned().unwrap_or_else(|| format!("{}: nothing checked", fx.label))
            });
        }
    }
    t.detail("identitiesChecked", identities);
    t.at_least("functionals", t.instances, 50);
    Ok(t)
}

fn omega_coincidence(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let fixtures = dual_fixtures(&[int(-1), int(2)])?;
    let per = 13;
    let outcomes = fixtures
        .par_iter()
        .enumerate()
        .map(|(fi, fx)| -> Result<Vec<(bool, bool, bool, String)>> {
            let mut rng = rng_for(seed, 60 + fi as u64);
            let m = &fx.space.module;
            let o = o_subspace(m, &fx.space.z)?;
            let mut out = Vec::new();
            for i in 0..2 * per {
                let lifted = random_lift(&mut rng, fx)?;
                let f = if i % 2 == 0 {
                    lifted
                } else {
                    let delta = random_matrix(&mut rng, lifted.u_dim(), m.dim());
                    DualElement {
                        f: lifted.f.add(&delta),
                        domain: lifted.domain,
                        certs: BTreeMap::new(),
                    }
                };
                let truth = o.rows().iter().all(|r| is_zero(&f.f.apply(r)));
                let mem = fx.space.omega_membership(&f)?;
                out.push((truth, mem.member, mem.consistent(), format!("{} functional {i}", fx.label)));
            }
            let zero = DualElement {
                f: Matrix::zeros(1, m.dim()),
                domain: m.cutoff,
                certs: BTreeMap::new(),
            };
            let mem = fx.space.omega_membership(&zero)?;
            out.push((true, mem.member, mem.consistent(), format!("{} zero functional", fx.label)));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut members, mut violators) = (0, 0);
    for (truth, member, consistent, label) in outcomes.into_iter().flatten() {
        if truth {
            members += 1;
        } else {
            violators += 1;
        }
        t.record(truth == member && consistent, || format!("misclassified {label}"));
    }
    t.detail("members", members);
    t.detail("violators", violators);
    t.at_least("functionals", t.instances, 100);
    t.at_least("violators", violators, 20);
    Ok(t)
}

fn three_term_suite(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let fixtures = dual_fixtures(&[int(2), int(-1)])?;
    let outcomes = fixtures
        .par_iter()
        .enumerate()
        .map(|(fi, fx)| -> Result<Vec<(usize, Vec<String>)>> {
            let mut rng = rng_for(seed, 70 + fi as u64);
            let voa = &fx.space.module.voa;
            let mut out = Vec::new();
            for _ in 0..2 {
                let f = random_lift(&mut rng, fx)?;
                for v in 0..voa.dim() {
                    if voa.weight(v) > 2 || !f.certs.contains_key(&v) {
                        continue;
                    }
                    let r = dualrep::three_term_check(&fx.space, &f, v, (-4, 2), (-4, 2))?;
                    out.push((r.checked, r.failures.into_iter().map(|s| format!("{}: {s}", fx.label)).collect()));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bicoefficients = 0;
    for (checked, failures) in outcomes.into_iter().flatten() {
        bicoefficients += checked;
        t.record(checked > 0 && failures.is_empty(), || {
            failures.first().cloned().unwrap_or_else(|| "no bicoefficient checked".into())
        });
    }
    t.detail("bicoefficients", bicoefficients);
    t.at_least("samples", t.instances, 20);
    Ok(t)
}

// criterion 8

fn lie_suite() -> Result<Tally> {
    let mut t = Tally::default();
    for (label, v, vir_expected) in [
        ("heisenberg N=5", heis(5), 49),
        ("virasoro c=1/2 N=6", vir(rat(1, 2), 6), 49),
        ("virasoro c=26 N=6", vir(int(26), 6), 49),
    ] {
        let g = LieAlgebra::new(v)?;
        let rep = g.check(4, 3)?;
        t.instances += rep.antisymmetry_checked + rep.jacobi_checked + rep.virasoro_checked;
        t.skipped += rep.skipped;
        t.require(rep.passed(), || format!("{label}: {}", rep.failures.first().cloned().unwrap_or_default()));
        t.require(rep.virasoro_checked == vir_expected, || {
            format!("{label}: {} Virasoro relations checked", rep.virasoro_checked)
        });
        t.require(rep.jacobi_checked > 0, || format!("{label}: no Jacobi triple"));
        t.detail(
            label,
            json!({"antisymmetry": rep.antisymmetry_checked, "jacobi": rep.jacobi_checked, "virasoro": rep.virasoro_checked}),
        );
    }
    Ok(t)
}

// criterion 9

fn associator_suite(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let va = vir(rat(1, 2), 6);
    let a = ZhuAlgebra::build(&va)?;
    let f = induce::f_module(&a, &ZhuModule::lowest_weight(&a, &rat(2, 5))?, 4)?;
    let modules: Vec<(&str, Arc<ModulePresentation>)> = vec![
        ("heisenberg adjoint N=5", adjoint(&heis(5))),
        ("virasoro adjoint N=6", adjoint(&va)),
        ("virasoro F(C_h) depth 4", Arc::new(f.module)),
    ];
    let mut rng = rng_for(seed, 9);
    for (label, m) in &modules {
        let voa = &m.voa;
        let mut found = 0;
        let mut attempts = 0;
        while found < 100 && attempts < 20000 {
            attempts += 1;
            let (u, v, w) = (rng.gen_range(0..voa.dim()), rng.gen_range(0..voa.dim()), rng.gen_range(0..m.dim()));
            let (wu, wv, lw) = (voa.weight(u), voa.weight(v), m.level(w));
            let q = rng.gen_range((wv + lw - m.cutoff - 1)..=(wv + lw));
            let lvw = wv + lw - q - 1;
            let p = rng.gen_range((wu + lvw - m.cutoff - 1)..=(wu + lvw));
            let k = lw + wu + rng.gen_range(0..=1);
            let n = (lw + wv - q - 1).max(0) + rng.gen_range(0..=1);
            match associator_holds(m, u, v, w, p, q, k, n)? {
                Some(ok) => {
                    found += 1;
                    t.record(ok, || format!("{label}: u={u} v={v} w={w} p={p} q={q} k={k} n={n}"));
                }
                None => t.skipped += 1,
            }
        }
        t.detail(label, found);
    }
    t.at_least("instances", t.instances, 200);
    Ok(t)
}

// criterion 10

/// A seeded rational `n/p` with `p` a prime between 101 and 113.
pub fn generic_rat(rng: &mut ChaCha8Rng) -> Rat {
    const PRIMES: [i64; 5] = [101, 103, 107, 109, 113];
    let d = PRIMES[rng.gen_range(0..PRIMES.len())];
    let mut n = rng.gen_range(1..=4 * d);
    if n % d == 0 {
        n += 1;
    }
    rat(n, d)
}

fn induction_suite(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 10);
    let (c, h) = (generic_rat(&mut rng), generic_rat(&mut rng));
    t.detail("c", crate::rat::fmt_rat(&c));
    t.detail("h", crate::rat::fmt_rat(&h));
    let a = ZhuAlgebra::build(&vir(c.clone(), 6))?;
    let u = ZhuModule::lowest_weight(&a, &h)?;
    let f = induce::f_module(&a, &u, 4)?;
    t.record(f.level_dims() == vec![1, 1, 2, 3, 5], || format!("Verma dims {:?}", f.level_dims()));
    t.record(induce::l0_is_graded(&f.module)?, || "L(0) not h + n on F(C_h)".into());
    let f3 = induce::f_module(&a, &u, 3)?;
    let lh = induce::l_module(&f3)?;
    t.record(lh.level_dims().get(1) == Some(&1), || format!("generic L(U) dims {:?}", lh.level_dims()));
    let f0 = induce::f_module(&a, &ZhuModule::lowest_weight(&a, &int(0))?, 3)?;
    let l0 = induce::l_module(&f0)?;
    t.record(l0.level_dims().get(1) == Some(&0), || format!("h=0 L(U) dims {:?}", l0.level_dims()));
    t.detail("verma", f.level_dims());
    t.detail("lGeneric", lh.level_dims());
    t.detail("lZero", l0.level_dims());

    let h2 = &h + rat(1, 3);
    let other = induce::f_module(&a, &ZhuModule::lowest_weight(&a, &h2)?, 3)?;
    let z = ZhuModule::zero(&a);
    let fz = induce::f_module(&a, &z, 3)?;
    let fixtures = [
        ("W = F(U)", &u, &f3, &f3.module, true),
        ("W = F(C_h')", &u, &f3, &other.module, false),
        ("U = 0", &z, &fz, &f3.module, false),
    ];
    let mut frob = Vec::new();
    for (label, uu, ff, w, nonzero) in fixtures {
        let r = induce::frobenius_check(&a, uu, ff, w, 3)?;
        let ok = r.equal && if nonzero { r.dim1 >= 1 } else { r.dim1 == 0 };
        t.record(ok, || format!("Frobenius {label}: {r:?}"));
        frob.push(json!({"fixture": label, "dim1": r.dim1, "dim2": r.dim2}));
    }
    t.detail("frobenius", frob);

    let u2 = ZhuModule::lowest_weight(&a, &generic_rat(&mut rng))?;
    let s = induce::f_module(&a, &u.direct_sum(&u2), 3)?;
    let d2 = induce::f_module(&a, &u2, 3)?.level_dims();
    let d1 = f3.level_dims();
    let sum: Vec<usize> = d1.iter().zip(&d2).map(|(x, y)| x + y).collect();
    t.record(s.level_dims() == sum, || format!("direct sum {:?} vs {sum:?}", s.level_dims()));
    let hz = ZhuAlgebra::build(&heis(4))?;
    let g = hz.voa.unit(hz.voa.generator_index(0).expect("generator"));
    let uh = ZhuModule::generated_by(&hz, &g, &generic_rat(&mut rng))?;
    let tf = induce::tensor_f_module(&a, &u, &hz, &uh, 3)?;
    let dh = induce::f_module(&hz, &uh, 3)?.level_dims();
    let conv = induce::convolve(&d1, &dh);
    t.record(tf.level_dims() == conv, || format!("tensor {:?} vs {conv:?}", tf.level_dims()));
    Ok(t)
}

// criterion 11

fn sandwich_suite(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let mut rng = rng_for(seed, 11);
    let fixtures = vec![(rat(2, 3), rat(3, 7)), (generic_rat(&mut rng), generic_rat(&mut rng))];
    let results = fixtures
        .par_iter()
        .map(|(c, h)| -> Result<(String, dualrep::InducedReport, usize)> {
            let v = vir(c.clone(), 6);
            let a = ZhuAlgebra::build(&v)?;
            let w = adjoint(&v);
            let z = -Rat::one();
            let b = Bimodule::build(&w, &z, &a)?;
            let s = DualSpace::new(w, z)?;
            let rho = a.one_dim_rep(&v.omega, h)?;
            let rep = dualrep::induced_generate(&s, &b, &rho, 2)?;
            let f = induce::f_module(&a, &ZhuModule::lowest_weight(&a, h)?, 2)?;
            let label = format!("c={} h={}", crate::rat::fmt_rat(c), crate::rat::fmt_rat(h));
            Ok((label, rep, f.level_dims()[1]))
        })
        .collect::<Result<Vec<_>>>()?;
    for (label, rep, f1) in results {
        t.record(rep.u_in_omega, || format!("{label}: U not in Omega"));
        t.record(rep.lowering_vanish, || format!("{label}: lowering modes act on U"));
        t.record(rep.omega_images > 0 && rep.omega_images_lifted, || format!("{label}: Omega images {rep:?}"));
        t.record(rep.level_dims.get(&1) == Some(&f1), || {
            format!("{label}: level 1 {:?} vs F {f1}", rep.level_dims.get(&1))
        });
        t.detail(&label, json!({"levelDims": rep.level_dims, "omegaImages": rep.omega_images}));
    }
    let v = vir(int(1), 0);
    let a = ZhuAlgebra::build(&v)?;
    let w = adjoint(&v);
    let b = Bimodule::build(&w, &-Rat::one(), &a)?;
    let s = DualSpace::new(w, -Rat::one())?;
    let rep = dualrep::induced_generate(&s, &b, &[Matrix::identity(1)], 2)?;
    t.record(rep.closes_immediately && rep.u_in_omega, || format!("unit algebra: {rep:?}"));
    Ok(t)
}

// criterion 12

fn fusion_suite() -> Result<Tally> {
    let mut t = Tally::default();
    let count = 120;
    let results = (0..count)
        .into_par_iter()
        .map(|seed| -> Result<(u64, fusion::DIsoReport, bool)> {
            let (a, b, u1, u2) = fusion::random_instance(seed);
            let small = b.dim <= 4 && u1.dim <= 4 && u2.dim <= 4 && a.dim <= 4;
            Ok((seed, fusion::d_iso_check(&a, &b, &u1, &u2)?, small))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut nonzero = 0;
    for (seed, r, small) in results {
        nonzero += usize::from(r.lhs > 0);
        t.record(r.equal && small, || format!("d-isomorphism seed {seed}: {r:?}"));
    }
    t.detail("nonzeroInstances", nonzero);
    let a = FinAlgebra::unit_algebra();
    for db in 0..=3 {
        for d1 in 0..=2 {
            for d2 in 0..=2 {
                let b = FinBimodule::identity_actions(&a, db);
                let u1 = FinModule::new(vec![Matrix::identity(d1)]);
                let u2 = FinModule::new(vec![Matrix::identity(d2)]);
                let r = fusion::d_iso_check(&a, &b, &u1, &u2)?;
                let want = db * d1 * d2;
                t.record(r.lhs == want && r.rhs == want, || format!("unit algebra ({db},{d1},{d2}): {r:?}"));
            }
        }
    }
    for (label, v) in [("virasoro c=1/2 N=6", vir(rat(1, 2), 6)), ("virasoro c=1/3 N=6", vir(rat(1, 3), 6))] {
        let mut perm: Vec<usize> = (0..v.dim()).collect();
        for w in 0..=v.cutoff {
            let r = v.range(w);
            for (k, j) in r.clone().zip(r.rev()) {
                perm[k] = j;
            }
        }
        let p = Arc::new(v.permuted(&perm)?);
        for h in [int(0), rat(1, 3)] {
            let d = fusion::zhu_fusion_pipeline(&v, &h)?;
            let dp = fusion::zhu_fusion_pipeline(&p, &h)?;
            t.record(d == dp && d == usize::from(h.is_zero()), || format!("{label} h={h}: {d} vs permuted {dp}"));
        }
    }
    Ok(t)
}

// further invariants

fn axiom_suite(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let va = vir(rat(1, 2), 6);
    let a = ZhuAlgebra::build(&va)?;
    let f = induce::f_module(&a, &ZhuModule::lowest_weight(&a, &int(0))?, 3)?;
    let l = induce::l_module(&f)?;
    let hh = heis(3);
    let tv = Arc::new(tensor_voa(&hh, &hh, 3)?);
    let cases: Vec<(&str, ModulePresentation)> = vec![
        ("heisenberg N=4", ModulePresentation::adjoint(&heis(4))),
        ("virasoro c=1/2 N=6", ModulePresentation::adjoint(&va)),
        ("rescaled z=2", rescale_module(&ModulePresentation::adjoint(&vir(rat(1, 2), 4)), &int(2))?),
        ("rescaled z=1/3", rescale_module(&ModulePresentation::adjoint(&vir(rat(1, 2), 4)), &rat(1, 3))?),
        ("tensor heisenberg", ModulePresentation::adjoint(&tv)),
        ("L(C_0) depth 3", l.module),
    ];
    for (label, m) in &cases {
        let rep = axiom_check(m, seed, 80)?;
        t.instances += rep.checked;
        t.skipped += rep.skipped;
        t.require(rep.passed(), || format!("{label}: {:?}", rep.failure));
    }
    Ok(t)
}

fn lifted_on_vir(seed: u64, stream: u64, z: Rat, n: i64) -> Result<(DualFixture, DualElement)> {
    let fx = dual_fixture("virasoro c=1/2", vir(rat(1, 2), n), z)?;
    let mut rng = rng_for(seed, stream);
    let f = random_lift(&mut rng, &fx)?;
    Ok((fx, f))
}

fn commutativity_suite(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let (fx, f) = lifted_on_vir(seed, 20, int(2), 5)?;
    let voa = &fx.space.module.voa;
    let om = voa.generator_index(0).expect("generator");
    for (u, v, e1, e2) in [
        (om, om, (-2, 0), (-2, 0)),
        (voa.vacuum, om, (-1, 1), (-2, 0)),
        (om, voa.vacuum, (-2, 0), (-1, 1)),
    ] {
        let r = dualrep::commutativity_check(&fx.space, &f, u, v, e1, e2, 6, 1)?;
        t.instances += r.checked;
        t.require(r.failures.is_empty(), || r.failures.first().cloned().unwrap_or_default());
    }
    t.at_least("instances", t.instances, 1);
    Ok(t)
}

fn certificate_suite(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    for (stream, z) in [(21, int(-1)), (22, int(2))] {
        let (fx, f) = lifted_on_vir(seed, stream, z, 4)?;
        let voa = fx.space.module.voa.clone();
        for v in 0..voa.dim() {
            if voa.weight(v) > 2 || !f.certs.contains_key(&v) {
                continue;
            }
            let r = dualrep::certificate_independence(&fx.space, &f, v, -3, 1)?;
            t.instances += r.checked;
            t.require(r.failures.is_empty(), || {
                format!("{}: {}", fx.label, r.failures.first().cloned().unwrap_or_default())
            });
        }
    }
    t.at_least("instances", t.instances, 1);
    Ok(t)
}

fn module_structure_suite() -> Result<Tally> {
    let mut t = Tally::default();
    for (v, z) in [(heis(4), int(2)), (vir(rat(1, 2), 4), int(-1)), (vir(rat(1, 2), 4), rat(1, 3))] {
        let a = ZhuAlgebra::build(&v)?;
        let w = adjoint(&v);
        let b = Bimodule::build(&w, &z, &a)?;
        let s = DualSpace::new(w, z.clone())?;
        let r = dualrep::module_structure_match(&s, &b, &a, 2)?;
        t.instances += r.checked;
        t.require(r.failures.is_empty(), || format!("z={z}: {:?}", r.failures));
    }
    t.at_least("instances", t.instances, 4);
    Ok(t)
}

fn omega_tensor_suite() -> Result<Tally> {
    let mut t = Tally::default();
    let v1 = vir(rat(1, 2), 4);
    let v2 = heis(4);
    let a = ZhuAlgebra::build(&v1)?;
    let f = induce::f_module(&a, &ZhuModule::lowest_weight(&a, &int(0))?, 4)?;
    let pairs: Vec<(&str, ModulePresentation, ModulePresentation)> = vec![
        ("adjoint x adjoint", ModulePresentation::adjoint(&v1), ModulePresentation::adjoint(&v2)),
        ("F(C_0) x adjoint", f.module, ModulePresentation::adjoint(&v2)),
    ];
    let v12 = Arc::new(tensor_voa(&v1, &v2, 4)?);
    for (label, w1, w2) in pairs {
        let e = tensor_module(&w1, &w2, &v12, 4)?;
        let full = omega_subspace(&e)?;
        let left: Vec<Vector> = (0..v1.dim()).filter_map(|i| tensor_factor_index(&v12, true, i)).map(|k| v12.unit(k)).collect();
        let right: Vec<Vector> = (0..v2.dim()).filter_map(|i| tensor_factor_index(&v12, false, i)).map(|k| v12.unit(k)).collect();
        let o1 = omega_subspace_for(&e, Some(&left))?;
        let o2 = omega_subspace_for(&e, Some(&right))?;
        let meet = o1.space.intersect(&o2.space);
        t.record(full.space == meet, || format!("{label}: Omega {} vs intersection {}", full.dim(), meet.rank()));
        let prod = omega_subspace(&w1)?.dim() * omega_subspace(&w2)?.dim();
        t.record(full.dim() >= prod, || format!("{label}: Omega {} below product {prod}", full.dim()));
        t.detail(label, json!({"omega": full.dim(), "product": prod}));
    }
    Ok(t)
}

/// Rank of `V_{≤k}` modulo the computed `O(V)`.
fn filtered_rank(a: &ZhuAlgebra, k: i64) -> usize {
    let v = &a.voa;
    let o = &a.quotient.o_space;
    let low: Vec<Vector> = (0..=k.min(v.cutoff)).flat_map(|w| v.range(w)).map(|i| v.unit(i)).collect();
    o.extend(low).rank() - o.rank()
}

fn stabilization_suite() -> Result<Tally> {
    let mut t = Tally::default();
    let top = 7;
    for (label, is_heis) in [("heisenberg", true), ("virasoro c=1/2", false)] {
        let algebras = (0..=top)
            .into_par_iter()
            .map(|n| ZhuAlgebra::build(&if is_heis { heis(n) } else { vir(rat(1, 2), n) }))
            .collect::<Result<Vec<_>>>()?;
        let dims: Vec<usize> = algebras.iter().map(ZhuAlgebra::dim).collect();
        t.record(dims.windows(2).all(|w| w[0] <= w[1]), || format!("{label}: dims {dims:?} not monotone"));
        let mut filtered = BTreeMap::new();
        for k in 0..=3 {
            let ranks: Vec<usize> = algebras.iter().map(|a| filtered_rank(a, k)).collect();
            let tail = &ranks[(k as usize + 2).min(ranks.len() - 1)..];
            t.record(tail.iter().all(|r| *r == tail[0]), || {
                format!("{label}: filtered ranks at k={k} {ranks:?} do not settle")
            });
            filtered.insert(k.to_string(), ranks);
        }
        t.detail(label, json!({"dims": dims, "filteredRanks": filtered}));
    }
    Ok(t)
}
