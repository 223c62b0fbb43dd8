//! The factor language of `W(2^h)`: dimension counts and membership.
//!
//! For `2^(k-1) < l <= 2^k`, every length-`l` factor of a `W(2^h)` word either
//! straddles the middle of an aligned `W(2^k)` block, or straddles the boundary
//! between `c` and the rest inside `c w` with `c` in `C(2^j)`, `k <= j < h`. In
//! the second case the two sides are a suffix of the last `2^k`-chunk of `c`
//! and a prefix of the first `2^k`-chunk of `w`. Each split position gives an
//! exact product of two deduplicated sets.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::ceil_log2;
use super::sets::{Bound, Counter, WSet};
use super::state::ConstructionState;
use crate::error::{Error, Result};

/// Left side of a split: suffixes of a set of `W_m` codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Left {
    /// `C_t` itself.
    C(usize),
    /// Last `2^m`-chunks of `C_j` words.
    Tails(usize, usize),
}

/// Right side of a split: prefixes of a word set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Right {
    /// All of `W_m`.
    W(usize),
    /// First `2^k`-chunks of `C_j` words.
    Heads(usize, usize),
}

#[derive(Clone, Debug)]
pub enum Class {
    /// Single letters (`l = 1`).
    Letters,
    Split { left: Left, right: Right, s_lo: usize, s_hi: usize },
}

/// The split classes covering all length-`l` factors of `W(2^h)` words.
pub fn classes(h: usize, l: usize) -> Vec<Class> {
    let k = ceil_log2(l as u64);
    if l == 0 || k > h {
        return Vec::new();
    }
    if k == 0 {
        return vec![Class::Letters];
    }
    let half = 1usize << (k - 1);
    let mut out = vec![Class::Split {
        left: Left::C(k - 1),
        right: Right::W(k - 1),
        s_lo: l - half,
        s_hi: half,
    }];
    if h > k {
        out.push(Class::Split {
            left: Left::C(k),
            right: Right::W(k),
            s_lo: 1,
            s_hi: l - 1,
        });
    }
    for j in k + 1..h {
        out.push(Class::Split {
            left: Left::Tails(j, k),
            right: Right::Heads(j - 1, k),
            s_lo: 1,
            s_hi: l - 1,
        });
    }
    out
}

/// A dimension value: exact, or certified to lie in `[lower, upper]`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DimValue {
    pub length: u64,
    pub horizon: usize,
    pub lower: BigUint,
    pub upper: BigUint,
    pub exact: bool,
    /// Smallest horizon at which the exact count reached its final value.
    pub grew_at: Option<usize>,
}

impl DimValue {
    pub fn value(&self) -> Option<&BigUint> {
        self.exact.then_some(&self.lower)
    }
}

/// Dimension queries over one state.
pub struct DimEngine<'a> {
    pub counter: Counter<'a>,
}

impl<'a> DimEngine<'a> {
    pub fn new(st: &'a ConstructionState) -> Self {
        DimEngine {
            counter: Counter::new(st),
        }
    }

    pub fn state(&self) -> &ConstructionState {
        self.counter.st
    }

    fn left_counts(&self, left: Left) -> Result<std::sync::Arc<Vec<Bound>>> {
        match left {
            Left::C(t) => self.counter.suf_c(t),
            Left::Tails(j, m) => self.counter.suf_tails(j, m),
        }
    }

    fn right_counts(&self, right: Right) -> Result<std::sync::Arc<Vec<Bound>>> {
        match right {
            Right::W(m) => self.counter.pre_w(m, None),
            Right::Heads(j, k) => self.counter.pre_heads(j, k),
        }
    }

    /// Sum and max of the class sizes.
    pub fn bracket(&self, h: usize, l: usize) -> Result<(BigUint, BigUint)> {
        let mut upper = BigUint::zero();
        let mut lower = BigUint::zero();
        for class in classes(h, l) {
            match class {
                Class::Letters => {
                    let a = BigUint::from(self.state().alphabet);
                    upper += &a;
                    lower = lower.max(a);
                }
                Class::Split { left, right, s_lo, s_hi } => {
                    let lc = self.left_counts(left)?;
                    let rc = self.right_counts(right)?;
                    for s in s_lo..=s_hi {
                        let b = lc[s - 1].mul(&rc[l - s - 1]);
                        upper += &b.hi;
                        if b.lo > lower {
                            lower = b.lo;
                        }
                    }
                }
            }
        }
        Ok((lower, upper))
    }

    fn left_set(&self, left: Left) -> Result<WSet> {
        match left {
            Left::C(t) => self.counter.c_as_wset(t),
            Left::Tails(j, m) => self.counter.c_tails(j, m),
        }
    }

    fn right_strings(&self, right: Right, q: usize, cap: u64) -> Result<Vec<Vec<u8>>> {
        match right {
            Right::W(m) => self.counter.prefix_strings_w(m, q, cap),
            Right::Heads(j, k) => {
                let set = self.counter.c_heads(j, k)?;
                self.counter.prefix_strings(&set, q)
            }
        }
    }

    /// The set of length-`l` factors of `W(2^h)` words, materialized.
    pub fn factor_set(&self, h: usize, l: usize) -> Result<HashSet<Vec<u8>>> {
        let cap = self.state().limits.exact_bytes / (l as u64 + 48).max(1);
        let (_, upper) = self.bracket(h, l)?;
        if upper > BigUint::from(cap) {
            return Err(Error::Capacity(format!(
                "up to {upper} factors of length {l}; exact listing is over budget"
            )));
        }
        let mut out: HashSet<Vec<u8>> = HashSet::with_capacity(upper.to_usize().unwrap_or(0));
        for class in classes(h, l) {
            match class {
                Class::Letters => {
                    for x in 0..self.state().alphabet {
                        out.insert(vec![x]);
                    }
                }
                Class::Split { left, right, s_lo, s_hi } => {
                    let lset = self.left_set(left)?;
                    for s in s_lo..=s_hi {
                        let xs = self.counter.suffix_strings(&lset, s, cap)?;
                        let ys = self.right_strings(right, l - s, cap)?;
                        for x in &xs {
                            for y in &ys {
                                let mut w = Vec::with_capacity(l);
                                w.extend_from_slice(x);
                                w.extend_from_slice(y);
                                out.insert(w);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact count if it fits the budget.
    pub fn exact(&self, h: usize, l: usize) -> Result<Option<BigUint>> {
        match self.factor_set(h, l) {
            Ok(s) => Ok(Some(BigUint::from(s.len()))),
            Err(Error::Capacity(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// `dim(l)` at horizon `h`, exact when affordable and bracketed otherwise.
    pub fn dim_at(&self, h: usize, l: usize) -> Result<DimValue> {
        let (lower, upper) = self.bracket(h, l)?;
        if lower == upper {
            return Ok(DimValue {
                length: l as u64,
                horizon: h,
                lower,
                upper,
                exact: true,
                grew_at: None,
            });
        }
        if let Some(v) = self.exact(h, l)? {
            return Ok(DimValue {
                length: l as u64,
                horizon: h,
                lower: v.clone(),
                upper: v,
                exact: true,
                grew_at: None,
            });
        }
        Ok(DimValue {
            length: l as u64,
            horizon: h,
            lower,
            upper,
            exact: false,
            grew_at: None,
        })
    }

    /// `dim(l)` at the full horizon, with the level at which an exact value was reached.
    pub fn dim(&self, l: usize) -> Result<DimValue> {
        let n = self.state().depth();
        check_len(n, l)?;
        let mut v = self.dim_at(n, l)?;
        if v.exact {
            let k = ceil_log2(l as u64);
            for h in k..=n {
                let w = self.dim_at(h, l)?;
                if w.exact && w.lower == v.lower {
                    v.grew_at = Some(h);
                    break;
                }
            }
        }
        Ok(v)
    }

    /// Dimensions for many lengths, in parallel when enabled.
    pub fn dims(&self, lengths: &[usize]) -> Result<Vec<DimValue>> {
        let n = self.state().depth();
        crate::par::map(lengths, |&l| {
            check_len(n, l)?;
            self.dim_at(n, l)
        })
        .into_iter()
        .collect()
    }
}

fn check_len(n: usize, l: usize) -> Result<()> {
    if l == 0 || n >= 63 || l as u64 > 1u64 << n {
        return Err(Error::Invalid(format!("length {l} is outside 1..=2^{n}")));
    }
    Ok(())
}

/// `dim(l)` at the state's horizon.
pub fn dim(st: &ConstructionState, l: usize) -> Result<DimValue> {
    DimEngine::new(st).dim(l)
}

/// All length-`l` factors of `W(2^upto)` words, sorted.
pub fn subwords(st: &ConstructionState, l: usize, upto: usize) -> Result<Vec<Vec<u8>>> {
    if upto > st.depth() {
        return Err(Error::Invalid(format!("level {upto} is not built")));
    }
    check_len(upto, l)?;
    let set = DimEngine::new(st).factor_set(upto, l)?;
    let mut v: Vec<Vec<u8>> = set.into_iter().collect();
    v.sort_unstable();
    Ok(v)
}

/// Membership in the factor language, with cached string sets.
pub struct FactorIndex<'a> {
    counter: Counter<'a>,
    suffixes: HashMap<(Left, usize), HashSet<Vec<u8>>>,
    prefixes: HashMap<(usize, usize, usize), HashSet<Vec<u8>>>,
    cap: u64,
}

impl<'a> FactorIndex<'a> {
    pub fn new(st: &'a ConstructionState) -> Self {
        let cap = st.limits.exact_bytes / 64;
        FactorIndex {
            counter: Counter::new(st),
            suffixes: HashMap::new(),
            prefixes: HashMap::new(),
            cap,
        }
    }

    pub fn state(&self) -> &ConstructionState {
        self.counter.st
    }

    fn has_suffix(&mut self, left: Left, x: &[u8]) -> Result<bool> {
        let key = (left, x.len());
        if !self.suffixes.contains_key(&key) {
            let set = match left {
                Left::C(t) => self.counter.c_as_wset(t)?,
                Left::Tails(j, m) => self.counter.c_tails(j, m)?,
            };
            let strings = self.counter.suffix_strings(&set, x.len(), self.cap)?;
            self.suffixes.insert(key, strings.into_iter().collect());
        }
        Ok(self.suffixes[&key].contains(x))
    }

    fn has_head_prefix(&mut self, j: usize, k: usize, y: &[u8]) -> Result<bool> {
        let key = (j, k, y.len());
        if !self.prefixes.contains_key(&key) {
            let set = self.counter.c_heads(j, k)?;
            let strings = self.counter.prefix_strings(&set, y.len())?;
            self.prefixes.insert(key, strings.into_iter().collect());
        }
        Ok(self.prefixes[&key].contains(y))
    }

    /// Whether `y` is a prefix of some `W_m` word.
    fn is_w_prefix(&mut self, m: usize, y: &[u8]) -> Result<bool> {
        if m == 0 {
            return Ok(y.len() == 1 && y[0] < self.state().alphabet);
        }
        let half = 1usize << (m - 1);
        if y.len() <= half {
            return self.has_head_prefix(m - 1, m - 1, y);
        }
        if !self.is_c_member(m - 1, &y[..half])? {
            return Ok(false);
        }
        self.is_w_prefix(m - 1, &y[half..])
    }

    fn is_c_member(&mut self, t: usize, y: &[u8]) -> Result<bool> {
        if self.state().explicit(t).is_some() {
            Ok(self.state().is_c_word(t, y))
        } else {
            self.has_head_prefix(t, t, y)
        }
    }

    fn right_has(&mut self, right: Right, y: &[u8]) -> Result<bool> {
        match right {
            Right::W(m) => self.is_w_prefix(m, y),
            Right::Heads(j, k) => self.has_head_prefix(j, k, y),
        }
    }

    /// Whether `w` is a factor of some `W(2^h)` word.
    pub fn is_factor_at(&mut self, h: usize, w: &[u8]) -> Result<bool> {
        let l = w.len();
        if l == 0 {
            return Ok(true);
        }
        for class in classes(h, l) {
            match class {
                Class::Letters => {
                    if w[0] < self.state().alphabet {
                        return Ok(true);
                    }
                }
                Class::Split { left, right, s_lo, s_hi } => {
                    for s in s_lo..=s_hi {
                        if self.has_suffix(left, &w[..s])? && self.right_has(right, &w[s..])? {
                            return Ok(true);
                        }
                    }
                }
            }
        }
        Ok(false)
    }

    /// Smallest level `h` such that `w` is a factor of a `W(2^h)` word, or
    /// `None` when `w` is zero as witnessed at the horizon.
    pub fn witness_level(&mut self, w: &[u8]) -> Result<Option<usize>> {
        let n = self.state().depth();
        check_len(n, w.len())?;
        for h in ceil_log2(w.len() as u64)..=n {
            if self.is_factor_at(h, w)? {
                return Ok(Some(h));
            }
        }
        Ok(None)
    }

    /// Whether `w` is nonzero at the horizon.
    pub fn is_nonzero(&mut self, w: &[u8]) -> Result<bool> {
        let n = self.state().depth();
        check_len(n, w.len())?;
        self.is_factor_at(n, w)
    }
}

/// Whether `w` is nonzero, with the smallest witnessing level.
pub fn is_nonzero(st: &ConstructionState, w: &[u8]) -> Result<Option<usize>> {
    FactorIndex::new(st).witness_level(w)
}
