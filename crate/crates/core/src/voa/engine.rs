//! Normal-ordering engine for modules generated by free-field style
//! generators (Heisenberg `a`, Virasoro `ω`, and tensor products of these).
//!
//! States are finite sums of PBW words in generator modes applied to a base
//! vector. Composite modes `(g_m v)_k` reduce to generator modes through the
//! iterate formula, and out-of-order letters are straightened with the
//! commutator formula.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::linalg::Matrix;
use crate::rat::{binom, int, rat, sign, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gen {
    pub name: String,
    pub weight: i64,
    pub factor: usize,
}

/// `(generator index, mode index)`.
pub type Letter = (usize, i64);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key {
    pub word: Vec<Letter>,
    pub base: usize,
}

impl Key {
    pub fn base(base: usize) -> Self {
        Key { word: Vec::new(), base }
    }
}

pub type State = BTreeMap<Key, Rat>;

pub fn single(key: Key) -> State {
    let mut s = State::new();
    s.insert(key, Rat::one());
    s
}

fn add_into(acc: &mut State, s: &Rat, other: &State) {
    if s.is_zero() {
        return;
    }
    for (k, c) in other {
        let slot = acc.entry(k.clone()).or_insert_with(Rat::zero);
        *slot += s * c;
        if slot.is_zero() {
            acc.remove(k);
        }
    }
}

/// Generators together with their singular OPE data `g_j g'` for `j >= 0`,
/// expressed as states of the vacuum module.
#[derive(Clone, Debug)]
pub struct GenSystem {
    pub gens: Vec<Gen>,
    ope: BTreeMap<(usize, usize), Vec<(i64, State)>>,
    pub central_charge: Rat,
    pub omega: State,
}

impl GenSystem {
    pub fn heisenberg() -> Self {
        let mut ope = BTreeMap::new();
        ope.insert((0, 0), vec![(1, single(Key::base(0)))]);
        let mut omega = State::new();
        omega.insert(
            Key {
                word: vec![(0, -1), (0, -1)],
                base: 0,
            },
            rat(1, 2),
        );
        GenSystem {
            gens: vec![Gen {
                name: "a".into(),
                weight: 1,
                factor: 0,
            }],
            ope,
            central_charge: int(1),
            omega,
        }
    }

    pub fn virasoro(c: Rat) -> Self {
        let w = |m: i64| Key { word: vec![(0, m)], base: 0 };
        let mut two_omega = single(w(-1));
        two_omega.insert(w(-1), int(2));
        let mut central = State::new();
        central.insert(Key::base(0), &c / int(2));
        let ope = BTreeMap::from([((0, 0), vec![(0, single(w(-2))), (1, two_omega), (3, central)])]);
        GenSystem {
            gens: vec![Gen {
                name: "L".into(),
                weight: 2,
                factor: 0,
            }],
            ope,
            central_charge: c,
            omega: single(w(-1)),
        }
    }

    /// Generators of both systems, mutually local with vanishing OPE.
    pub fn tensor(a: &GenSystem, b: &GenSystem) -> Self {
        let shift = a.gens.len();
        let factor_shift = a.gens.iter().map(|g| g.factor + 1).max().unwrap_or(0);
        let mut gens = a.gens.clone();
        gens.extend(b.gens.iter().map(|g| Gen {
            name: g.name.clone(),
            weight: g.weight,
            factor: g.factor + factor_shift,
        }));
        let names: Vec<String> = gens.iter().map(|g| g.name.clone()).collect();
        for (i, g) in gens.iter_mut().enumerate() {
            if names.iter().filter(|n| **n == g.name).count() > 1 {
                g.name = format!("{}{}", g.name, i + 1);
            }
        }
        let reindex = |s: &State| -> State {
            s.iter()
                .map(|(k, c)| {
                    (
                        Key {
                            word: k.word.iter().map(|&(g, m)| (g + shift, m)).collect(),
                            base: k.base,
                        },
                        c.clone(),
                    )
                })
                .collect()
        };
        let mut ope = a.ope.clone();
        for ((x, y), list) in &b.ope {
            ope.insert((x + shift, y + shift), list.iter().map(|(j, s)| (*j, reindex(s))).collect());
        }
        let mut omega = a.omega.clone();
        add_into(&mut omega, &Rat::one(), &reindex(&b.omega));
        GenSystem {
            gens,
            ope,
            central_charge: &a.central_charge + &b.central_charge,
            omega,
        }
    }

    pub fn degree(&self, (g, m): Letter) -> i64 {
        self.gens[g].weight - m - 1
    }

    pub fn word_degree(&self, word: &[Letter]) -> i64 {
        word.iter().map(|&l| self.degree(l)).sum()
    }

    /// PBW order: higher degree first, ties broken by generator index.
    pub fn order_key(&self, l: Letter) -> (i64, usize) {
        (-self.degree(l), l.0)
    }

    pub fn ope(&self, a: usize, b: usize) -> &[(i64, State)] {
        self.ope.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn letter_label(&self, (g, m): Letter) -> String {
        let gen = &self.gens[g];
        if gen.weight == 2 && gen.name.starts_with('L') {
            format!("{}({})", gen.name, m - 1)
        } else {
            format!("{}({})", gen.name, m)
        }
    }

    /// Creation letters of the vacuum module with degree at most `max_degree`.
    pub fn vacuum_letters(&self, max_degree: i64) -> Vec<Letter> {
        let mut out = Vec::new();
        for (g, gen) in self.gens.iter().enumerate() {
            for d in gen.weight..=max_degree {
                out.push((g, gen.weight - d - 1));
            }
        }
        out.sort_by_key(|&l| self.order_key(l));
        out
    }

    /// Creation letters (positive degree) of an induced module.
    pub fn induced_letters(&self, max_degree: i64) -> Vec<Letter> {
        let mut out = Vec::new();
        for (g, gen) in self.gens.iter().enumerate() {
            for d in 1..=max_degree {
                out.push((g, gen.weight - d - 1));
            }
        }
        out.sort_by_key(|&l| self.order_key(l));
        out
    }

    /// All PBW words over `letters` (sorted by order key) of total degree
    /// exactly `degree`.
    pub fn words_of_degree(&self, letters: &[Letter], degree: i64) -> Vec<Vec<Letter>> {
        fn rec(sys: &GenSystem, letters: &[Letter], start: usize, left: i64, cur: &mut Vec<Letter>, out: &mut Vec<Vec<Letter>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for i in start..letters.len() {
                let d = sys.degree(letters[i]);
                if d <= left && d > 0 {
                    cur.push(letters[i]);
                    rec(sys, letters, i, left - d, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(self, letters, 0, degree, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Clone, Debug)]
pub enum Base {
    /// The vacuum module: nonnegative modes kill the vacuum.
    Vacuum,
    /// Induced from a module over the degree-zero modes: `zero_modes[g]` is the
    /// action of `g_{wt g - 1}` on the base, negative-degree modes kill it.
    Induced { dim: usize, zero_modes: Vec<Matrix> },
}

pub struct ModeEngine {
    pub sys: Arc<GenSystem>,
    pub base: Base,
    letter_cache: RefCell<HashMap<(Letter, Key), State>>,
    word_cache: RefCell<HashMap<(Vec<Letter>, i64, Key), State>>,
}

impl ModeEngine {
    pub fn new(sys: Arc<GenSystem>, base: Base) -> Self {
        ModeEngine {
            sys,
            base,
            letter_cache: RefCell::new(HashMap::new()),
            word_cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn level(&self, key: &Key) -> i64 {
        self.sys.word_degree(&key.word)
    }

    fn creates(&self, l: Letter) -> bool {
        match self.base {
            Base::Vacuum => l.1 <= -1,
            Base::Induced { .. } => self.sys.degree(l) > 0,
        }
    }

    fn on_base(&self, l: Letter, b: usize) -> State {
        let deg = self.sys.degree(l);
        match &self.base {
            Base::Vacuum => {
                if l.1 <= -1 {
                    single(Key { word: vec![l], base: b })
                } else {
                    State::new()
                }
            }
            Base::Induced { zero_modes, .. } => {
                if deg > 0 {
                    single(Key { word: vec![l], base: b })
                } else if deg == 0 {
                    let m = &zero_modes[l.0];
                    (0..m.rows)
                        .filter(|&i| !m[(i, b)].is_zero())
                        .map(|i| (Key::base(i), m[(i, b)].clone()))
                        .collect()
                } else {
                    State::new()
                }
            }
        }
    }

    /// Applies a generator mode to a basis state.
    pub fn apply_letter(&self, l: Letter, key: &Key) -> State {
        if self.level(key) + self.sys.degree(l) < 0 {
            return State::new();
        }
        let ck = (l, key.clone());
        if let Some(s) = self.letter_cache.borrow().get(&ck) {
            return s.clone();
        }
        let out = if key.word.is_empty() {
            self.on_base(l, key.base)
        } else {
            let y = key.word[0];
            if self.creates(l) && self.sys.order_key(l) <= self.sys.order_key(y) {
                let mut word = Vec::with_capacity(key.word.len() + 1);
                word.push(l);
                word.extend_from_slice(&key.word);
                single(Key { word, base: key.base })
            } else {
                let rest = Key {
                    word: key.word[1..].to_vec(),
                    base: key.base,
                };
                let inner = self.apply_letter(l, &rest);
                let mut out = self.apply_letter_state(y, &inner);
                let (m, n) = (l.1, y.1);
                for (i, st) in self.sys.ope(l.0, y.0) {
                    let c = binom(m, *i);
                    if c.is_zero() {
                        continue;
                    }
                    let part = self.apply_vacuum_state(st, m + n - i, &single(rest.clone()));
                    add_into(&mut out, &c, &part);
                }
                out
            }
        };
        self.letter_cache.borrow_mut().insert(ck, out.clone());
        out
    }

    pub fn apply_letter_state(&self, l: Letter, s: &State) -> State {
        let mut out = State::new();
        for (k, c) in s {
            add_into(&mut out, c, &self.apply_letter(l, k));
        }
        out
    }

    /// `(v)_k w` where `v` is the vacuum-module vector `vword · 1`.
    pub fn apply_word_mode(&self, vword: &[Letter], k: i64, key: &Key) -> State {
        if vword.is_empty() {
            return if k == -1 { single(key.clone()) } else { State::new() };
        }
        let lw = self.level(key);
        let wt = self.sys.word_degree(vword);
        if lw + wt - k - 1 < 0 {
            return State::new();
        }
        let ck = (vword.to_vec(), k, key.clone());
        if let Some(s) = self.word_cache.borrow().get(&ck) {
            return s.clone();
        }
        let (h, rest) = (vword[0], &vword[1..]);
        let (g, n) = h;
        let wt_rest = self.sys.word_degree(rest);
        let wt_h = self.sys.gens[g].weight;
        let w = single(key.clone());
        let mut out = State::new();
        // (h_n r)_k w = sum_j (-1)^j C(n,j) [h_{n-j} r_{k+j} w - (-1)^n r_{n+k-j} h_j w]
        let j1 = lw + wt_rest - k - 1;
        let j2 = lw + wt_h - 1;
        let jmax = j1.max(j2);
        for j in 0..=jmax {
            let c = sign(j) * binom(n, j);
            if c.is_zero() {
                continue;
            }
            if j <= j1 {
                let r = self.apply_word_state(rest, k + j, &w);
                let t = self.apply_letter_state((g, n - j), &r);
                add_into(&mut out, &c, &t);
            }
            if j <= j2 {
                let t = self.apply_letter((g, j), key);
                let r = self.apply_word_state(rest, n + k - j, &t);
                add_into(&mut out, &(-&c * sign(n)), &r);
            }
        }
        self.word_cache.borrow_mut().insert(ck, out.clone());
        out
    }

    pub fn apply_word_state(&self, vword: &[Letter], k: i64, s: &State) -> State {
        let mut out = State::new();
        for (key, c) in s {
            add_into(&mut out, c, &self.apply_word_mode(vword, k, key));
        }
        out
    }

    /// `(v)_k s` for a vacuum-module state `v`.
    pub fn apply_vacuum_state(&self, v: &State, k: i64, s: &State) -> State {
        let mut out = State::new();
        for (vk, c) in v {
            add_into(&mut out, c, &self.apply_word_state(&vk.word, k, s));
        }
        out
    }

    pub fn cache_len(&self) -> usize {
        self.letter_cache.borrow().len() + self.word_cache.borrow().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vac(sys: &Arc<GenSystem>) -> ModeEngine {
        ModeEngine::new(sys.clone(), Base::Vacuum)
    }

    #[test]
    fn heisenberg_bracket() {
        let sys = Arc::new(GenSystem::heisenberg());
        let e = vac(&sys);
        let a = Key { word: vec![(0, -1)], base: 0 };
        let s = e.apply_letter((0, 1), &a);
        assert_eq!(s, single(Key::base(0)));
        let aa = Key {
            word: vec![(0, -1), (0, -1)],
            base: 0,
        };
        let s = e.apply_letter((0, 1), &aa);
        assert_eq!(s.get(&a), Some(&int(2)));
    }

    #[test]
    fn virasoro_l2_omega() {
        let c = rat(1, 2);
        let sys = Arc::new(GenSystem::virasoro(c.clone()));
        let e = vac(&sys);
        let om = Key { word: vec![(0, -1)], base: 0 };
        // omega_3 omega = c/2
        let s = e.apply_word_mode(&om.word, 3, &om);
        assert_eq!(s.get(&Key::base(0)), Some(&(c / int(2))));
        // L(-1) omega = L(-3) 1
        let s = e.apply_letter((0, 0), &om);
        assert_eq!(s, single(Key { word: vec![(0, -2)], base: 0 }));
        // L(0) on L(-2)L(-2)1 is 4
        let w = Key {
            word: vec![(0, -1), (0, -1)],
            base: 0,
        };
        let s = e.apply_letter((0, 1), &w);
        assert_eq!(s.get(&w), Some(&int(4)));
    }
}
