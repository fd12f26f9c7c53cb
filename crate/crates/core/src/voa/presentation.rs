//! Weight-truncated presentations: a graded basis and the table of mode
//! products `u_n v` landing inside the cutoff.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use super::engine::{Base, GenSystem, Key, Letter, ModeEngine, State};
use crate::linalg::{unit, zeros, Matrix, Vector};
use crate::rat::{fmt_rat, parse_rat, pow, Rat};
use crate::{Error, Result};

pub type SparseVec = Vec<(usize, Rat)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisEntry {
    pub label: String,
    /// Weight for a VOA, level (weight minus the lowest weight) for a module.
    pub weight: i64,
}

/// Nonzero mode products keyed by `(v, w, n)`. Every product whose result
/// lies inside the cutoff is either stored or zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModeTable {
    map: BTreeMap<(usize, usize, i64), SparseVec>,
}

impl ModeTable {
    pub fn get(&self, v: usize, w: usize, n: i64) -> Option<&SparseVec> {
        self.map.get(&(v, w, n))
    }

    pub fn insert(&mut self, v: usize, w: usize, n: i64, r: SparseVec) {
        if r.is_empty() {
            self.map.remove(&(v, w, n));
        } else {
            self.map.insert((v, w, n), r);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize, i64), &SparseVec)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn entry_mut(&mut self, v: usize, w: usize, n: i64) -> Option<&mut SparseVec> {
        self.map.get_mut(&(v, w, n))
    }
}

fn to_sparse(v: &[Rat]) -> SparseVec {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

fn offsets_of(basis: &[BasisEntry], cutoff: i64) -> Result<Vec<usize>> {
    let mut offsets = vec![0usize; (cutoff.max(-1) + 2) as usize];
    let mut last = 0;
    for b in basis {
        if b.weight < last || b.weight < 0 || b.weight > cutoff {
            return Err(Error::Parse(format!("basis must be sorted by weight within [0, {cutoff}]")));
        }
        last = b.weight;
    }
    for w in 0..=cutoff.max(-1) + 1 {
        offsets[w as usize] = basis.iter().filter(|b| b.weight < w).count();
    }
    Ok(offsets)
}

/// Where an engine-built VOA came from: its generator system and the PBW
/// word behind every basis vector.
#[derive(Clone, Debug)]
pub struct VoaOrigin {
    pub sys: Arc<GenSystem>,
    pub words: Vec<Vec<Letter>>,
    /// basis index of `g_{-1} 1` for each generator `g`
    pub generators: Vec<usize>,
}

/// Factor data of a tensor-product presentation.
#[derive(Clone, Debug)]
pub struct TensorOrigin {
    pub left: Arc<VoaPresentation>,
    pub right: Arc<VoaPresentation>,
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct VoaPresentation {
    pub cutoff: i64,
    pub basis: Vec<BasisEntry>,
    pub products: ModeTable,
    pub vacuum: usize,
    pub omega: Vector,
    pub central_charge: Rat,
    pub origin: Option<VoaOrigin>,
    pub tensor: Option<TensorOrigin>,
    offsets: Vec<usize>,
}

impl PartialEq for VoaPresentation {
    fn eq(&self, o: &Self) -> bool {
        self.cutoff == o.cutoff
            && self.basis == o.basis
            && self.products == o.products
            && self.vacuum == o.vacuum
            && self.omega == o.omega
            && self.central_charge == o.central_charge
    }
}

fn state_to_vec(s: &State, index: &HashMap<Key, usize>, dim: usize) -> Vector {
    let mut v = zeros(dim);
    for (k, c) in s {
        let i = *index.get(k).unwrap_or_else(|| panic!("state word {k:?} missing from basis"));
        v[i] += c;
    }
    v
}

fn word_label(sys: &GenSystem, word: &[Letter]) -> String {
    word.iter().map(|&l| sys.letter_label(l)).collect::<String>()
}

impl VoaPresentation {
    pub fn from_system(sys: Arc<GenSystem>, cutoff: i64) -> Self {
        let letters = sys.vacuum_letters(cutoff);
        let mut words: Vec<Vec<Letter>> = Vec::new();
        let mut basis = Vec::new();
        for wt in 0..=cutoff {
            let ws = if wt == 0 { vec![vec![]] } else { sys.words_of_degree(&letters, wt) };
            for w in ws {
                basis.push(BasisEntry {
                    label: format!("{}1", word_label(&sys, &w)),
                    weight: wt,
                });
                words.push(w);
            }
        }
        let index: HashMap<Key, usize> = words.iter().enumerate().map(|(i, w)| (Key { word: w.clone(), base: 0 }, i)).collect();
        let dim = basis.len();
        let engine = ModeEngine::new(sys.clone(), Base::Vacuum);
        let mut products = ModeTable::default();
        for u in 0..dim {
            for v in 0..dim {
                let (wu, wv) = (basis[u].weight, basis[v].weight);
                for out in 0..=cutoff {
                    let n = wu + wv - out - 1;
                    let s = engine.apply_word_mode(
                        &words[u],
                        n,
                        &Key {
                            word: words[v].clone(),
                            base: 0,
                        },
                    );
                    products.insert(u, v, n, to_sparse(&state_to_vec(&s, &index, dim)));
                }
            }
        }
        let omega = if cutoff >= 2 { state_to_vec(&sys.omega, &index, dim) } else { zeros(dim) };
        let generators = sys
            .gens
            .iter()
            .enumerate()
            .map(|(g, _)| index.get(&Key { word: vec![(g, -1)], base: 0 }).copied().unwrap_or(usize::MAX))
            .collect();
        let offsets = offsets_of(&basis, cutoff).expect("engine basis sorted");
        VoaPresentation {
            cutoff,
            basis,
            products,
            vacuum: 0,
            omega,
            central_charge: sys.central_charge.clone(),
            origin: Some(VoaOrigin { sys, words, generators }),
            tensor: None,
            offsets,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.basis[i].weight
    }

    /// Index range of the weight-`w` basis vectors.
    pub fn range(&self, w: i64) -> Range<usize> {
        if w < 0 || w > self.cutoff {
            return 0..0;
        }
        self.offsets[w as usize]..self.offsets[w as usize + 1]
    }

    /// The same VOA with basis vector `i` moved to position `perm[i]`;
    /// `perm` must preserve weights.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dim();
        let mut seen = vec![false; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n || seen[p] || self.weight(p) != self.weight(i) {
                return Err(Error::Config("permutation must be a bijection within weight classes".into()));
            }
            seen[p] = true;
        }
        if perm.len() != n {
            return Err(Error::Config("permutation has the wrong length".into()));
        }
        let mut basis = self.basis.clone();
        for (i, &p) in perm.iter().enumerate() {
            basis[p] = self.basis[i].clone();
        }
        let mut products = ModeTable::default();
        for ((u, v, k), r) in self.products.iter() {
            products.insert(perm[*u], perm[*v], *k, r.iter().map(|(i, c)| (perm[*i], c.clone())).collect());
        }
        let mut omega = zeros(n);
        for (i, c) in self.omega.iter().enumerate() {
            omega[perm[i]] = c.clone();
        }
        Ok(VoaPresentation {
            cutoff: self.cutoff,
            basis,
            products,
            vacuum: perm[self.vacuum],
            omega,
            central_charge: self.central_charge.clone(),
            origin: None,
            tensor: None,
            offsets: self.offsets.clone(),
        })
    }

    pub fn dims_by_weight(&self) -> Vec<usize> {
        (0..=self.cutoff).map(|w| self.range(w).len()).collect()
    }

    pub fn unit(&self, i: usize) -> Vector {
        unit(self.dim(), i)
    }

    pub fn vacuum_vec(&self) -> Vector {
        self.unit(self.vacuum)
    }

    /// `u_n v` for basis vectors.
    pub fn mode(&self, u: usize, n: i64, v: usize) -> Result<Vector> {
        let out = self.weight(u) + self.weight(v) - n - 1;
        if out < 0 {
            return Ok(zeros(self.dim()));
        }
        if out > self.cutoff {
            return Err(Error::CutoffEscape {
                weight: out,
                cutoff: self.cutoff,
            });
        }
        let mut r = zeros(self.dim());
        if let Some(sv) = self.products.get(u, v, n) {
            for (i, c) in sv {
                r[*i] = c.clone();
            }
        }
        Ok(r)
    }

    /// Bilinear extension of `mode`.
    pub fn mode_vec(&self, u: &[Rat], n: i64, v: &[Rat]) -> Result<Vector> {
        let mut r = zeros(self.dim());
        for (i, a) in u.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in v.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let out = self.weight(i) + self.weight(j) - n - 1;
                if out < 0 {
                    continue;
                }
                if out > self.cutoff {
                    return Err(Error::CutoffEscape {
                        weight: out,
                        cutoff: self.cutoff,
                    });
                }
                if let Some(sv) = self.products.get(i, j, n) {
                    let ab = a * b;
                    for (k, c) in sv {
                        r[*k] += &ab * c;
                    }
                }
            }
        }
        Ok(r)
    }

    /// `L(n) v`.
    pub fn l_op(&self, n: i64, v: &[Rat]) -> Result<Vector> {
        self.mode_vec(&self.omega, n + 1, v)
    }

    /// Weight of a nonzero homogeneous vector.
    pub fn weight_of(&self, v: &[Rat]) -> Option<i64> {
        let mut w = None;
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                match w {
                    None => w = Some(self.weight(i)),
                    Some(x) if x != self.weight(i) => return None,
                    _ => {}
                }
            }
        }
        w
    }

    /// Matrix of `L(n)` restricted to the weights where it stays inside the cutoff.
    pub fn l_matrix(&self, n: i64) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for j in 0..d {
            if self.weight(j) - n > self.cutoff {
                continue;
            }
            if let Ok(col) = self.l_op(n, &self.unit(j)) {
                for (i, c) in col.into_iter().enumerate() {
                    m[(i, j)] = c;
                }
            }
        }
        m
    }

    pub fn label_vec(&self, v: &[Rat]) -> String {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                if c.is_one() {
                    self.basis[i].label.clone()
                } else {
                    format!("{}·{}", fmt_rat(c), self.basis[i].label)
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn generator_index(&self, g: usize) -> Option<usize> {
        self.origin.as_ref().and_then(|o| o.generators.get(g).copied()).filter(|&i| i != usize::MAX)
    }

    pub fn to_json(&self) -> Value {
        let basis: Vec<Value> = self.basis.iter().map(|b| json!({"label": b.label, "weight": b.weight})).collect();
        let products: Vec<Value> = self
            .products
            .iter()
            .map(|((u, v, n), r)| json!({"u": u, "v": v, "n": n, "result": sparse_json(r)}))
            .collect();
        let nz: Vec<(usize, &Rat)> = self.omega.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let omega = match nz.as_slice() {
            [(i, c)] if c.is_one() => json!(i),
            _ => sparse_json(&to_sparse(&self.omega)),
        };
        json!({
            "cutoff": self.cutoff,
            "basis": basis,
            "modeProducts": products,
            "vacuum": self.vacuum,
            "omega": omega,
            "centralCharge": fmt_rat(&self.central_charge),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("presentation json: {m}"));
        let cutoff = v.get("cutoff").and_then(Value::as_i64).ok_or_else(|| bad("cutoff"))?;
        let basis = parse_basis(v.get("basis").ok_or_else(|| bad("basis"))?, "weight")?;
        let dim = basis.len();
        let products = parse_products(v.get("modeProducts").ok_or_else(|| bad("modeProducts"))?, "u", "v", dim, dim)?;
        let vacuum = v.get("vacuum").and_then(Value::as_u64).ok_or_else(|| bad("vacuum"))? as usize;
        if vacuum >= dim || basis[vacuum].weight != 0 {
            return Err(bad("vacuum must be a weight-0 basis index"));
        }
        let omega = match v.get("omega") {
            Some(Value::Number(n)) => {
                let i = n.as_u64().ok_or_else(|| bad("omega"))? as usize;
                if i >= dim {
                    return Err(bad("omega index"));
                }
                unit(dim, i)
            }
            Some(o @ Value::Object(_)) => dense_from_json(o, dim)?,
            _ => return Err(bad("omega")),
        };
        let central_charge = parse_rat(v.get("centralCharge").and_then(Value::as_str).ok_or_else(|| bad("centralCharge"))?)?;
        let offsets = offsets_of(&basis, cutoff)?;
        Ok(VoaPresentation {
            cutoff,
            basis,
            products,
            vacuum,
            omega,
            central_charge,
            origin: None,
            tensor: None,
            offsets,
        })
    }
}

fn sparse_json(r: &SparseVec) -> Value {
    let m: Map<String, Value> = r.iter().map(|(i, c)| (i.to_string(), Value::String(fmt_rat(c)))).collect();
    Value::Object(m)
}

fn dense_from_json(v: &Value, dim: usize) -> Result<Vector> {
    let mut out = zeros(dim);
    for (k, c) in v.as_object().ok_or_else(|| Error::Parse("expected an object of coefficients".into()))? {
        let i: usize = k.parse().map_err(|_| Error::Parse(format!("bad index {k:?}")))?;
        if i >= dim {
            return Err(Error::Parse(format!("index {i} out of range")));
        }
        out[i] = parse_rat(c.as_str().ok_or_else(|| Error::Parse("coefficient must be a string".into()))?)?;
    }
    Ok(out)
}

fn parse_basis(v: &Value, weight_key: &str) -> Result<Vec<BasisEntry>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("basis must be an array".into()))?;
    arr.iter()
        .map(|b| {
            Ok(BasisEntry {
                label: b.get("label").and_then(Value::as_str).unwrap_or("").to_string(),
                weight: b
                    .get(weight_key)
                    .and_then(Value::as_i64)
                    .ok_or_else(|| Error::Parse(format!("basis entry needs {weight_key}")))?,
            })
        })
        .collect()
}

fn parse_products(v: &Value, a: &str, b: &str, da: usize, db: usize) -> Result<ModeTable> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("modeProducts must be an array".into()))?;
    let mut t = ModeTable::default();
    for p in arr {
        let get = |k: &str| p.get(k).and_then(Value::as_i64).ok_or_else(|| Error::Parse(format!("product entry needs {k}")));
        let (u, w, n) = (get(a)? as usize, get(b)? as usize, get("n")?);
        if u >= da || w >= db {
            return Err(Error::Parse("product index out of range".into()));
        }
        let mut r: SparseVec = Vec::new();
        for (k, c) in p
            .get("result")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("product needs result".into()))?
        {
            let i: usize = k.parse().map_err(|_| Error::Parse(format!("bad index {k:?}")))?;
            r.push((i, parse_rat(c.as_str().ok_or_else(|| Error::Parse("coefficient must be a string".into()))?)?));
        }
        r.sort_by_key(|(i, _)| *i);
        t.insert(u, w, n, r);
    }
    Ok(t)
}

pub fn make_heisenberg(cutoff: i64) -> VoaPresentation {
    VoaPresentation::from_system(Arc::new(GenSystem::heisenberg()), cutoff)
}

pub fn make_virasoro(c: Rat, cutoff: i64) -> VoaPresentation {
    VoaPresentation::from_system(Arc::new(GenSystem::virasoro(c)), cutoff)
}

/// Engine data of a module induced from generator zero modes.
#[derive(Clone, Debug)]
pub struct ModuleOrigin {
    pub keys: Vec<Key>,
}

/// A weak module over a presented VOA, truncated at a maximal level.
#[derive(Clone, Debug)]
pub struct ModulePresentation {
    pub voa: Arc<VoaPresentation>,
    pub cutoff: i64,
    pub lowest_weight: Rat,
    pub basis: Vec<BasisEntry>,
    pub action: ModeTable,
    pub origin: Option<ModuleOrigin>,
    offsets: Vec<usize>,
}

impl PartialEq for ModulePresentation {
    fn eq(&self, o: &Self) -> bool {
        self.cutoff == o.cutoff && self.lowest_weight == o.lowest_weight && self.basis == o.basis && self.action == o.action && *self.voa == *o.voa
    }
}

impl ModulePresentation {
    /// `V` as a module over itself.
    pub fn adjoint(voa: &Arc<VoaPresentation>) -> Self {
        ModulePresentation {
            voa: voa.clone(),
            cutoff: voa.cutoff,
            lowest_weight: Rat::zero(),
            basis: voa.basis.clone(),
            action: voa.products.clone(),
            origin: None,
            offsets: voa.offsets.clone(),
        }
    }

    /// Builds a module from an engine whose base carries the degree-zero
    /// action, keeping levels `0..=cutoff`.
    pub fn from_engine(voa: &Arc<VoaPresentation>, engine: &ModeEngine, base_labels: &[String], lowest_weight: Rat, cutoff: i64) -> Self {
        let origin = voa.origin.as_ref().expect("engine-built VOA required");
        let sys = &engine.sys;
        let dim_base = match &engine.base {
            Base::Induced { dim, .. } => *dim,
            Base::Vacuum => 1,
        };
        let letters = sys.induced_letters(cutoff);
        let mut keys = Vec::new();
        let mut basis = Vec::new();
        for lvl in 0..=cutoff {
            let words = if lvl == 0 { vec![vec![]] } else { sys.words_of_degree(&letters, lvl) };
            for w in &words {
                for b in 0..dim_base {
                    basis.push(BasisEntry {
                        label: format!("{}{}", word_label(sys, w), base_labels[b]),
                        weight: lvl,
                    });
                    keys.push(Key { word: w.clone(), base: b });
                }
            }
        }
        let index: HashMap<Key, usize> = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        let dim = keys.len();
        let mut action = ModeTable::default();
        for v in 0..voa.dim() {
            let wv = voa.weight(v);
            for (w, key) in keys.iter().enumerate() {
                let lw = basis[w].weight;
                for out in 0..=cutoff {
                    let n = wv + lw - out - 1;
                    let s = engine.apply_word_mode(&origin.words[v], n, key);
                    action.insert(v, w, n, to_sparse(&state_to_vec(&s, &index, dim)));
                }
            }
        }
        let offsets = offsets_of(&basis, cutoff).expect("sorted");
        ModulePresentation {
            voa: voa.clone(),
            cutoff,
            lowest_weight,
            basis,
            action,
            origin: Some(ModuleOrigin { keys }),
            offsets,
        }
    }

    pub fn from_parts(voa: Arc<VoaPresentation>, cutoff: i64, lowest_weight: Rat, basis: Vec<BasisEntry>, action: ModeTable) -> Result<Self> {
        let offsets = offsets_of(&basis, cutoff)?;
        Ok(ModulePresentation {
            voa,
            cutoff,
            lowest_weight,
            basis,
            action,
            origin: None,
            offsets,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn level(&self, i: usize) -> i64 {
        self.basis[i].weight
    }

    pub fn range(&self, lvl: i64) -> Range<usize> {
        if lvl < 0 || lvl > self.cutoff {
            return 0..0;
        }
        self.offsets[lvl as usize]..self.offsets[lvl as usize + 1]
    }

    pub fn dims_by_level(&self) -> Vec<usize> {
        (0..=self.cutoff).map(|l| self.range(l).len()).collect()
    }

    pub fn unit(&self, i: usize) -> Vector {
        unit(self.dim(), i)
    }

    /// `v_n w` for basis vectors.
    pub fn mode(&self, v: usize, n: i64, w: usize) -> Result<Vector> {
        let out = self.voa.weight(v) + self.level(w) - n - 1;
        if out < 0 {
            return Ok(zeros(self.dim()));
        }
        if out > self.cutoff {
            return Err(Error::CutoffEscape {
                weight: out,
                cutoff: self.cutoff,
            });
        }
        let mut r = zeros(self.dim());
        if let Some(sv) = self.action.get(v, w, n) {
            for (i, c) in sv {
                r[*i] = c.clone();
            }
        }
        Ok(r)
    }

    pub fn act(&self, v: &[Rat], n: i64, w: &[Rat]) -> Result<Vector> {
        let mut r = zeros(self.dim());
        for (i, a) in v.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            let wi = self.voa.weight(i);
            for (j, b) in w.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let out = wi + self.level(j) - n - 1;
                if out < 0 {
                    continue;
                }
                if out > self.cutoff {
                    return Err(Error::CutoffEscape {
                        weight: out,
                        cutoff: self.cutoff,
                    });
                }
                if let Some(sv) = self.action.get(i, j, n) {
                    let ab = a * b;
                    for (k, c) in sv {
                        r[*k] += &ab * c;
                    }
                }
            }
        }
        Ok(r)
    }

    /// Matrix of `v_n` on the whole truncated module; columns whose image
    /// would escape the cutoff are left empty and reported by the flag.
    pub fn mode_matrix(&self, v: &[Rat], n: i64) -> (Matrix, bool) {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        let mut escaped = false;
        for j in 0..d {
            match self.act(v, n, &self.unit(j)) {
                Ok(col) => {
                    for (i, c) in col.into_iter().enumerate() {
                        m[(i, j)] = c;
                    }
                }
                Err(_) => escaped = true,
            }
        }
        (m, escaped)
    }

    pub fn l_op(&self, n: i64, w: &[Rat]) -> Result<Vector> {
        self.act(&self.voa.omega, n + 1, w)
    }

    pub fn level_of(&self, w: &[Rat]) -> Option<i64> {
        let mut l = None;
        for (i, c) in w.iter().enumerate() {
            if !c.is_zero() {
                match l {
                    None => l = Some(self.level(i)),
                    Some(x) if x != self.level(i) => return None,
                    _ => {}
                }
            }
        }
        l
    }

    pub fn to_json(&self) -> Value {
        let basis: Vec<Value> = self.basis.iter().map(|b| json!({"label": b.label, "level": b.weight})).collect();
        let products: Vec<Value> = self
            .action
            .iter()
            .map(|((v, w, n), r)| json!({"v": v, "w": w, "n": n, "result": sparse_json(r)}))
            .collect();
        json!({
            "cutoff": self.cutoff,
            "lowestWeight": fmt_rat(&self.lowest_weight),
            "basis": basis,
            "modeProducts": products,
            "voa": self.voa.to_json(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("module json: {m}"));
        let voa = Arc::new(VoaPresentation::from_json(v.get("voa").ok_or_else(|| bad("voa"))?)?);
        let cutoff = v.get("cutoff").and_then(Value::as_i64).ok_or_else(|| bad("cutoff"))?;
        let h = parse_rat(v.get("lowestWeight").and_then(Value::as_str).ok_or_else(|| bad("lowestWeight"))?)?;
        let basis = parse_basis(v.get("basis").ok_or_else(|| bad("basis"))?, "level")?;
        let action = parse_products(v.get("modeProducts").ok_or_else(|| bad("modeProducts"))?, "v", "w", voa.dim(), basis.len())?;
        Self::from_parts(voa, cutoff, h, basis, action)
    }
}

/// `Y^{(z)}(v, x) = Y(z^{L(0)} v, z x)`: the mode `v_m` is scaled by `z^{wt v - m - 1}`.
pub fn rescale_module(w: &ModulePresentation, z: &Rat) -> Result<ModulePresentation> {
    if z.is_zero() {
        return Err(Error::Domain("rescaling needs z != 0".into()));
    }
    let mut out = w.clone();
    out.origin = None;
    let mut table = ModeTable::default();
    for ((v, ww, n), r) in w.action.iter() {
        let s = pow(z, w.voa.weight(*v) - n - 1);
        table.insert(*v, *ww, *n, r.iter().map(|(i, c)| (*i, c * &s)).collect());
    }
    out.action = table;
    Ok(out)
}

/// Graded tensor product of two presented VOAs, truncated at `cutoff`.
pub fn tensor_voa(a: &Arc<VoaPresentation>, b: &Arc<VoaPresentation>, cutoff: i64) -> Result<VoaPresentation> {
    if a.cutoff < cutoff || b.cutoff < cutoff {
        return Err(Error::Config(format!("factor cutoffs must be at least {cutoff}")));
    }
    let wa = ModulePresentation::adjoint(a);
    let wb = ModulePresentation::adjoint(b);
    let (pairs, basis) = tensor_basis(&a.basis, &b.basis, cutoff);
    let dummy = Arc::new(VoaPresentation {
        cutoff,
        basis: basis.clone(),
        products: ModeTable::default(),
        vacuum: 0,
        omega: vec![],
        central_charge: Rat::zero(),
        origin: None,
        tensor: Some(TensorOrigin {
            left: a.clone(),
            right: b.clone(),
            pairs: pairs.clone(),
        }),
        offsets: offsets_of(&basis, cutoff)?,
    });
    let m = tensor_module(&wa, &wb, &dummy, cutoff)?;
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let dim = pairs.len();
    let mut omega = zeros(dim);
    for (i, c) in a.omega.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        if let Some(&k) = index.get(&(i, b.vacuum)) {
            omega[k] += c;
        }
    }
    for (j, c) in b.omega.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        if let Some(&k) = index.get(&(a.vacuum, j)) {
            omega[k] += c;
        }
    }
    Ok(VoaPresentation {
        cutoff,
        basis,
        products: m.action,
        vacuum: index[&(a.vacuum, b.vacuum)],
        omega,
        central_charge: &a.central_charge + &b.central_charge,
        origin: None,
        tensor: Some(TensorOrigin {
            left: a.clone(),
            right: b.clone(),
            pairs,
        }),
        offsets: dummy.offsets.clone(),
    })
}

fn tensor_basis(a: &[BasisEntry], b: &[BasisEntry], cutoff: i64) -> (Vec<(usize, usize)>, Vec<BasisEntry>) {
    let mut pairs = Vec::new();
    for total in 0..=cutoff {
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if x.weight + y.weight == total {
                    pairs.push((i, j));
                }
            }
        }
    }
    let basis = pairs
        .iter()
        .map(|&(i, j)| BasisEntry {
            label: format!("{}⊗{}", a[i].label, b[j].label),
            weight: a[i].weight + b[j].weight,
        })
        .collect();
    (pairs, basis)
}

/// `W1 ⊗ W2` as a module over `V1 ⊗ V2` with
/// `(u1⊗u2)_n (w1⊗w2) = Σ_{i+j=n-1} u1_i w1 ⊗ u2_j w2`.
pub fn tensor_module(w1: &ModulePresentation, w2: &ModulePresentation, v12: &Arc<VoaPresentation>, cutoff: i64) -> Result<ModulePresentation> {
    let t = v12
        .tensor
        .as_ref()
        .ok_or_else(|| Error::Config("tensor module needs a tensor-product VOA".into()))?;
    if w1.cutoff < cutoff || w2.cutoff < cutoff {
        return Err(Error::Config(format!("factor module cutoffs must be at least {cutoff}")));
    }
    let (wpairs, basis) = tensor_basis(&w1.basis, &w2.basis, cutoff);
    let windex: HashMap<(usize, usize), usize> = wpairs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut action = ModeTable::default();
    for (vi, &(u1, u2)) in t.pairs.iter().enumerate() {
        let (wu1, wu2) = (w1.voa.weight(u1), w2.voa.weight(u2));
        for (wi, &(x1, x2)) in wpairs.iter().enumerate() {
            let (l1, l2) = (w1.level(x1), w2.level(x2));
            for out in 0..=cutoff {
                let n = wu1 + wu2 + l1 + l2 - out - 1;
                let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
                // i ranges so that both factors stay at nonnegative levels
                for i in (n - wu2 - l2)..=(wu1 + l1 - 1) {
                    let j = n - 1 - i;
                    let o1 = wu1 + l1 - i - 1;
                    let o2 = wu2 + l2 - j - 1;
                    if o1 < 0 || o2 < 0 || o1 + o2 != out {
                        continue;
                    }
                    let (Some(a), Some(b)) = (w1.action.get(u1, x1, i), w2.action.get(u2, x2, j)) else {
                        continue;
                    };
                    for (p, c) in a {
                        for (q, d) in b {
                            let k = windex[&(*p, *q)];
                            let slot = acc.entry(k).or_insert_with(Rat::zero);
                            *slot += c * d;
                        }
                    }
                }
                let r: SparseVec = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                action.insert(vi, wi, n, r);
            }
        }
    }
    let mut m = ModulePresentation::from_parts(v12.clone(), cutoff, &w1.lowest_weight + &w2.lowest_weight, basis, action)?;
    m.origin = None;
    Ok(m)
}

/// Embeds `v1 ⊗ 1` (left) or `1 ⊗ v2` (right) into the tensor VOA basis.
pub fn tensor_factor_index(v12: &VoaPresentation, left: bool, i: usize) -> Option<usize> {
    let t = v12.tensor.as_ref()?;
    let target = if left { (i, t.right.vacuum) } else { (t.left.vacuum, i) };
    t.pairs.iter().position(|p| *p == target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn heisenberg_dims_and_products() {
        let v = make_heisenberg(4);
        assert_eq!(v.dims_by_weight(), vec![1, 1, 2, 3, 5]);
        let a = v.generator_index(0).unwrap();
        assert_eq!(v.mode(a, 1, a).unwrap(), v.vacuum_vec());
        assert_eq!(v.mode(a, -1, v.vacuum).unwrap(), v.unit(a));
    }

    #[test]
    fn virasoro_dims() {
        let v = make_virasoro(rat(1, 2), 6);
        assert_eq!(v.dims_by_weight(), vec![1, 0, 1, 1, 2, 2, 4]);
        let w = v.generator_index(0).unwrap();
        assert_eq!(v.mode(w, 1, w).unwrap(), crate::linalg::scaled(&v.unit(w), &int(2)));
        assert_eq!(v.mode(w, 3, w).unwrap(), crate::linalg::scaled(&v.vacuum_vec(), &rat(1, 4)));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let v = make_virasoro(rat(-22, 5), 5);
        let j = v.to_json();
        let back = VoaPresentation::from_json(&j).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.to_json().to_string(), j.to_string());
    }
}
