//! Sets of codes that appear in the factor decomposition, with exact or
//! bracketed prefix/suffix counts and optional materialization.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::build::first_of_product;
use super::state::{CSet, ConstructionState};
use crate::error::{Error, Result};

/// An integer known to lie in `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub lo: BigUint,
    pub hi: BigUint,
}

impl Bound {
    pub fn exact(v: BigUint) -> Self {
        Bound { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mul(&self, other: &Bound) -> Bound {
        Bound {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
        }
    }

    pub fn scale(&self, k: &BigUint) -> Bound {
        Bound {
            lo: &self.lo * k,
            hi: &self.hi * k,
        }
    }

    /// The count of a subset of size `count` of a set bounded by `self`.
    fn cap(&self, count: &BigUint) -> Bound {
        Bound {
            lo: if count.is_zero() { BigUint::zero() } else { BigUint::one() },
            hi: (&self.hi).min(count).clone(),
        }
    }
}

/// A set of `W_m` codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WSet {
    /// Sorted distinct codes of stride `m + 1`.
    Codes { m: usize, data: Vec<u32> },
    /// The first `count` words of `W_m` (final letter other than `exclude`) in lex order.
    LexPrefix {
        m: usize,
        count: BigUint,
        exclude: Option<u8>,
    },
}

/// A set of `C_k` elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CIdx {
    List { k: usize, idx: Vec<u32> },
    /// The first `count` elements of `C_k`.
    Prefix { k: usize, count: BigUint },
}

impl WSet {
    pub fn level(&self) -> usize {
        match self {
            WSet::Codes { m, .. } | WSet::LexPrefix { m, .. } => *m,
        }
    }

    pub fn len(&self) -> BigUint {
        match self {
            WSet::Codes { m, data } => BigUint::from(data.len() / (m + 1)),
            WSet::LexPrefix { count, .. } => count.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len().is_zero()
    }
}

impl CIdx {
    pub fn level(&self) -> usize {
        match self {
            CIdx::List { k, .. } | CIdx::Prefix { k, .. } => *k,
        }
    }
}

/// Common suffix length of two `W_m` words given by code.
pub fn common_suffix(st: &ConstructionState, m: usize, a: &[u32], b: &[u32]) -> usize {
    if a[m] != b[m] {
        return 0;
    }
    let mut acc = 1usize;
    for t in 0..m {
        let (ia, ib) = (a[m - 1 - t], b[m - 1 - t]);
        if ia == ib {
            acc += 1 << t;
        } else {
            return acc + common_suffix(st, t, st.code(t, ia as usize), st.code(t, ib as usize));
        }
    }
    acc
}

/// Common prefix length of two `W_m` words given by code.
pub fn common_prefix(st: &ConstructionState, m: usize, a: &[u32], b: &[u32]) -> usize {
    let mut acc = 0usize;
    for p in 0..m {
        let t = m - 1 - p;
        if a[p] == b[p] {
            acc += 1 << t;
        } else {
            return acc + common_prefix(st, t, st.code(t, a[p] as usize), st.code(t, b[p] as usize));
        }
    }
    acc + (a[m] == b[m]) as usize
}

/// Distinct-count array from adjacent common lengths of a sorted list of `len` words:
/// `out[s-1]` is the number of distinct length-`s` pieces.
fn counts_from_common(n_items: usize, commons: impl Iterator<Item = usize>, len: usize) -> Vec<u64> {
    if n_items == 0 {
        return vec![0; len];
    }
    let mut hist = vec![0u64; len + 1];
    for c in commons {
        if c < len {
            hist[c] += 1;
        }
    }
    let mut out = Vec::with_capacity(len);
    let mut acc = 1u64;
    for s in 1..=len {
        acc += hist[s - 1];
        out.push(acc);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum CountKey {
    SufC(usize),
    SufTails(usize, usize),
    SufW(usize, Option<u8>),
    PreHeads(usize, usize),
    PreW(usize, Option<u8>),
}

/// Memoized prefix/suffix count arrays for one state. Safe to share across threads.
pub struct Counter<'a> {
    pub st: &'a ConstructionState,
    memo: Mutex<HashMap<CountKey, Arc<Vec<Bound>>>>,
    rev_rank: Mutex<HashMap<usize, Arc<Vec<u32>>>>,
}

impl<'a> Counter<'a> {
    pub fn new(st: &'a ConstructionState) -> Self {
        Counter {
            st,
            memo: Mutex::new(HashMap::new()),
            rev_rank: Mutex::new(HashMap::new()),
        }
    }

    fn cached<F: FnOnce() -> Result<Vec<Bound>>>(&self, key: CountKey, f: F) -> Result<Arc<Vec<Bound>>> {
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(f()?);
        self.memo.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// `C_t` viewed as a set of `W_t` codes.
    pub fn c_as_wset(&self, t: usize) -> Result<WSet> {
        match self.st.levels[t].c.as_ref() {
            Some(CSet::Explicit(v)) => Ok(WSet::Codes { m: t, data: v.clone() }),
            Some(CSet::Segment { count, exclude }) => Ok(WSet::LexPrefix {
                m: t,
                count: count.clone(),
                exclude: *exclude,
            }),
            None => Err(Error::Capacity(format!("C at level {t} is not built"))),
        }
    }

    /// Distinct last `2^p`-chunks of the words of a set.
    pub fn tails(&self, set: &WSet, p: usize) -> WSet {
        match set {
            WSet::Codes { m, data } => {
                let stride = m + 1;
                let cut = m - p;
                let mut v: Vec<&[u32]> = data.chunks_exact(stride).map(|c| &c[cut..]).collect();
                v.sort_unstable();
                v.dedup();
                WSet::Codes {
                    m: p,
                    data: v.concat(),
                }
            }
            WSet::LexPrefix { count, exclude, .. } => {
                let full = self.st.filtered_w_size(p, *exclude);
                WSet::LexPrefix {
                    m: p,
                    count: count.min(&full).clone(),
                    exclude: *exclude,
                }
            }
        }
    }

    /// Last `2^m`-chunks of the words of `C_j`.
    pub fn c_tails(&self, j: usize, m: usize) -> Result<WSet> {
        let c = self.c_as_wset(j)?;
        Ok(if m == j { c } else { self.tails(&c, m) })
    }

    /// Distinct first-chunk indices one level down.
    pub fn head_step(&self, set: &CIdx) -> Result<CIdx> {
        match set {
            CIdx::List { k, idx } => {
                let t = *k;
                if t == 0 {
                    return Err(Error::Invalid("no level below 0".into()));
                }
                let mut v: Vec<u32> = idx.iter().map(|&i| self.st.code(t, i as usize)[0]).collect();
                v.sort_unstable();
                v.dedup();
                Ok(CIdx::List { k: t - 1, idx: v })
            }
            CIdx::Prefix { k, count } => {
                let t = *k;
                match self.st.levels[t].c.as_ref() {
                    Some(CSet::Explicit(_)) => {
                        let n = count.to_u32().unwrap();
                        self.head_step(&CIdx::List { k: t, idx: (0..n).collect() })
                    }
                    Some(CSet::Segment { exclude, .. }) => {
                        let block = self.st.filtered_w_size(t - 1, *exclude);
                        let (q, r) = count.div_rem(&block);
                        let heads = if r.is_zero() { q } else { q + 1u32 };
                        self.prefix_or_list(t - 1, heads)
                    }
                    None => Err(Error::Capacity(format!("C at level {t} is not built"))),
                }
            }
        }
    }

    fn prefix_or_list(&self, k: usize, count: BigUint) -> Result<CIdx> {
        Ok(match self.st.explicit(k) {
            Some(_) => CIdx::List {
                k,
                idx: (0..count.to_u32().unwrap()).collect(),
            },
            None => CIdx::Prefix { k, count },
        })
    }

    /// Distinct first `2^k`-chunks of the words of `C_j`, as indices into `C_k`.
    pub fn c_heads(&self, j: usize, k: usize) -> Result<CIdx> {
        let mut cur = self.prefix_or_list(j, self.st.c_len(j))?;
        for _ in k..j {
            cur = self.head_step(&cur)?;
        }
        Ok(cur)
    }

    /// Ranks of the `C_t` elements ordered by their reversed words.
    pub fn rev_rank(&self, t: usize) -> Result<Arc<Vec<u32>>> {
        if let Some(v) = self.rev_rank.lock().unwrap().get(&t) {
            return Ok(v.clone());
        }
        let lower: Vec<Arc<Vec<u32>>> = (0..t).map(|s| self.rev_rank(s)).collect::<Result<_>>()?;
        let codes = self.st.explicit_or_err(t)?;
        let stride = t + 1;
        let n = codes.len() / stride;
        let key = |i: usize| -> Vec<u32> {
            let c = &codes[i * stride..(i + 1) * stride];
            let mut k = Vec::with_capacity(stride);
            k.push(c[t]);
            for s in 0..t {
                k.push(lower[s][c[t - 1 - s] as usize]);
            }
            k
        };
        let mut order: Vec<usize> = (0..n).collect();
        let keys: Vec<Vec<u32>> = (0..n).map(key).collect();
        order.sort_unstable_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut rank = vec![0u32; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as u32;
        }
        let rank = Arc::new(rank);
        self.rev_rank.lock().unwrap().insert(t, rank.clone());
        Ok(rank)
    }

    fn rev_cmp(&self, ranks: &[Arc<Vec<u32>>], m: usize, a: &[u32], b: &[u32]) -> Ordering {
        a[m].cmp(&b[m]).then_with(|| {
            for t in 0..m {
                let o = ranks[t][a[m - 1 - t] as usize].cmp(&ranks[t][b[m - 1 - t] as usize]);
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }

    /// Exact distinct-suffix counts of an explicit code set.
    pub fn suffix_counts_exact(&self, m: usize, data: &[u32]) -> Result<Vec<u64>> {
        let stride = m + 1;
        let ranks: Vec<Arc<Vec<u32>>> = (0..m).map(|t| self.rev_rank(t)).collect::<Result<_>>()?;
        let mut items: Vec<&[u32]> = data.chunks_exact(stride).collect();
        items.sort_unstable_by(|a, b| self.rev_cmp(&ranks, m, a, b));
        let commons = items.windows(2).map(|w| common_suffix(self.st, m, w[0], w[1]));
        Ok(counts_from_common(items.len(), commons, 1 << m))
    }

    /// Exact distinct-prefix counts of a sorted explicit code set.
    pub fn prefix_counts_exact(&self, m: usize, data: &[u32]) -> Vec<u64> {
        let stride = m + 1;
        let items: Vec<&[u32]> = data.chunks_exact(stride).collect();
        let commons = items.windows(2).map(|w| common_prefix(self.st, m, w[0], w[1]));
        counts_from_common(items.len(), commons, 1 << m)
    }

    /// `|Suf_s(set)|` for `s = 1..=2^m`.
    pub fn suffix_counts(&self, set: &WSet) -> Result<Vec<Bound>> {
        match set {
            WSet::Codes { m, data } => Ok(self
                .suffix_counts_exact(*m, data)?
                .into_iter()
                .map(|x| Bound::exact(BigUint::from(x)))
                .collect()),
            WSet::LexPrefix { m, count, exclude } => {
                let full = self.suf_w(*m, *exclude)?;
                if count >= &self.st.filtered_w_size(*m, *exclude) {
                    Ok(full.to_vec())
                } else {
                    Ok(self.lex_prefix_suffixes(&full, *m, count, *exclude))
                }
            }
        }
    }

    /// Suffix counts of the first `count` codes of the filtered `W_m` product.
    /// At length `2^j` the suffixes are the trailing codes, so there are exactly
    /// `min(count, |trailing product|)`, and longer suffixes are at least as many.
    fn lex_prefix_suffixes(&self, full: &[Bound], m: usize, count: &BigUint, exclude: Option<u8>) -> Vec<Bound> {
        let mut out: Vec<Bound> = full.iter().map(|b| b.cap(count)).collect();
        for j in 0..=m {
            let seen = self.st.filtered_w_size(j, exclude).min(count.clone());
            let end = if j == m { 1 << j } else { (1 << (j + 1)) - 1 };
            for b in &mut out[(1 << j) - 1..end] {
                b.lo = (&b.lo).max(&seen).clone();
            }
            out[(1 << j) - 1].hi = seen;
        }
        out
    }

    /// Prefix counts of the first `count` codes of the filtered `W_k` product.
    /// The prefix of length `2^k - 2^j` is the leading code down to level `j`,
    /// taking `ceil(count / |trailing product|)` values.
    fn lex_prefix_prefixes(&self, full: &[Bound], k: usize, count: &BigUint, exclude: Option<u8>) -> Vec<Bound> {
        let mut out: Vec<Bound> = full.iter().map(|b| b.cap(count)).collect();
        let total = 1usize << k;
        let mut marks: Vec<(usize, BigUint)> = (0..k)
            .rev()
            .map(|j| {
                let p = self.st.filtered_w_size(j, exclude);
                (total - (1 << j), (count + &p - 1u32) / p)
            })
            .collect();
        marks.push((total, count.clone()));
        for (i, (q, seen)) in marks.iter().enumerate() {
            let end = marks.get(i + 1).map_or(total, |m| m.0 - 1);
            for b in &mut out[q - 1..end] {
                b.lo = (&b.lo).max(seen).clone();
            }
            out[q - 1].hi = seen.clone();
        }
        out
    }

    pub fn suf_c(&self, t: usize) -> Result<Arc<Vec<Bound>>> {
        self.cached(CountKey::SufC(t), || {
            let set = self.c_as_wset(t)?;
            self.suffix_counts(&set)
        })
    }

    pub fn suf_tails(&self, j: usize, m: usize) -> Result<Arc<Vec<Bound>>> {
        if j == m {
            return self.suf_c(j);
        }
        self.cached(CountKey::SufTails(j, m), || {
            let set = self.c_tails(j, m)?;
            self.suffix_counts(&set)
        })
    }

    /// Suffix counts of all of `W_m` restricted by `exclude`.
    pub fn suf_w(&self, m: usize, exclude: Option<u8>) -> Result<Arc<Vec<Bound>>> {
        self.cached(CountKey::SufW(m, exclude), || {
            if m == 0 {
                let letters = self.st.alphabet as u32 - exclude.map_or(0, |_| 1);
                return Ok(vec![Bound::exact(BigUint::from(letters))]);
            }
            let half = 1usize << (m - 1);
            let lower = self.suf_w(m - 1, exclude)?;
            let sc = self.suf_c(m - 1)?;
            let block = self.st.filtered_w_size(m - 1, exclude);
            let mut out = lower.to_vec();
            for s in half + 1..=2 * half {
                out.push(sc[s - half - 1].scale(&block));
            }
            Ok(out)
        })
    }

    /// `|Pre_q|` of a set of `C_k` elements for `q = 1..=2^k`.
    pub fn prefix_counts(&self, set: &CIdx) -> Result<Vec<Bound>> {
        match set {
            CIdx::List { k, idx } => {
                let codes: Vec<u32> = idx
                    .iter()
                    .flat_map(|&i| self.st.code(*k, i as usize).iter().copied())
                    .collect();
                Ok(self
                    .prefix_counts_exact(*k, &codes)
                    .into_iter()
                    .map(|x| Bound::exact(BigUint::from(x)))
                    .collect())
            }
            CIdx::Prefix { k, count } => {
                let exclude = match self.st.levels[*k].c.as_ref() {
                    Some(CSet::Segment { exclude, .. }) => *exclude,
                    _ => return self.prefix_counts(&self.prefix_or_list(*k, count.clone())?),
                };
                let full = self.pre_w(*k, exclude)?;
                if count >= &self.st.filtered_w_size(*k, exclude) {
                    Ok(full.to_vec())
                } else {
                    Ok(self.lex_prefix_prefixes(&full, *k, count, exclude))
                }
            }
        }
    }

    pub fn pre_heads(&self, j: usize, k: usize) -> Result<Arc<Vec<Bound>>> {
        self.cached(CountKey::PreHeads(j, k), || {
            let set = self.c_heads(j, k)?;
            self.prefix_counts(&set)
        })
    }

    /// Prefix counts of all of `W_m` restricted by `exclude`.
    pub fn pre_w(&self, m: usize, exclude: Option<u8>) -> Result<Arc<Vec<Bound>>> {
        self.cached(CountKey::PreW(m, exclude), || {
            if m == 0 {
                let letters = self.st.alphabet as u32 - exclude.map_or(0, |_| 1);
                return Ok(vec![Bound::exact(BigUint::from(letters))]);
            }
            let half = 1usize << (m - 1);
            let heads = self.pre_heads(m - 1, m - 1)?;
            let lower = self.pre_w(m - 1, exclude)?;
            let c = self.st.c_len(m - 1);
            let mut out = heads.to_vec();
            for q in half + 1..=2 * half {
                out.push(lower[q - half - 1].scale(&c));
            }
            Ok(out)
        })
    }

    /// Lists the codes of a lex-prefix set (small sets over explicit levels only).
    pub fn expand_lex_prefix(&self, m: usize, count: &BigUint, exclude: Option<u8>, cap: u64) -> Result<Vec<u32>> {
        if count > &BigUint::from(cap) || !self.st.explicit_below(m) {
            return Err(Error::Capacity(format!(
                "cannot list {count} symbolic words of level {m}"
            )));
        }
        let domains = self.st.filtered_domains(m, exclude)?;
        Ok(first_of_product(&domains, count.to_usize().unwrap(), |_| false))
    }

    /// Codes of a `WSet`, listing lex prefixes if small.
    pub fn codes_of(&self, set: &WSet, cap: u64) -> Result<(usize, Vec<u32>)> {
        match set {
            WSet::Codes { m, data } => Ok((*m, data.clone())),
            WSet::LexPrefix { m, count, exclude } => Ok((*m, self.expand_lex_prefix(*m, count, *exclude, cap)?)),
        }
    }

    /// Index list of a `CIdx`, listing prefixes of explicit levels.
    pub fn idx_of(&self, set: &CIdx) -> Result<(usize, Vec<u32>)> {
        match set {
            CIdx::List { k, idx } => Ok((*k, idx.clone())),
            CIdx::Prefix { k, count } => match self.st.explicit(*k) {
                Some(_) => Ok((*k, (0..count.to_u32().unwrap()).collect())),
                None => Err(Error::Capacity(format!("C at level {k} is symbolic"))),
            },
        }
    }

    /// Distinct length-`s` suffixes of the words of a set.
    pub fn suffix_strings(&self, set: &WSet, s: usize, cap: u64) -> Result<Vec<Vec<u8>>> {
        let p = super::ceil_log2(s as u64).min(set.level());
        let tails = self.tails(set, p);
        let (m, data) = self.codes_of(&tails, cap)?;
        let mut out: Vec<Vec<u8>> = data
            .chunks_exact(m + 1)
            .map(|c| {
                let mut v = Vec::with_capacity(s);
                self.st.write_code_suffix(m, c, s, &mut v);
                v
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Distinct length-`q` prefixes of the words of a set of `C_k` elements.
    pub fn prefix_strings(&self, set: &CIdx, q: usize) -> Result<Vec<Vec<u8>>> {
        let p = super::ceil_log2(q as u64).min(set.level());
        let mut cur = set.clone();
        while cur.level() > p {
            cur = self.head_step(&cur)?;
        }
        let (k, idx) = self.idx_of(&cur)?;
        let mut out: Vec<Vec<u8>> = idx
            .iter()
            .map(|&i| {
                let mut v = Vec::with_capacity(q);
                self.st.write_c_prefix(k, i as usize, q, &mut v);
                v
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Distinct length-`q` prefixes of all `W_m` words.
    pub fn prefix_strings_w(&self, m: usize, q: usize, cap: u64) -> Result<Vec<Vec<u8>>> {
        if m == 0 {
            return Ok((0..self.st.alphabet).map(|x| vec![x]).collect());
        }
        let half = 1usize << (m - 1);
        let all = self.prefix_or_list(m - 1, self.st.c_len(m - 1))?;
        if q <= half {
            return self.prefix_strings(&all, q);
        }
        let heads = self.prefix_strings(&all, half)?;
        let rest = self.prefix_strings_w(m - 1, q - half, cap)?;
        if (heads.len() as u64).saturating_mul(rest.len() as u64) > cap {
            return Err(Error::Capacity(format!(
                "{} x {} prefixes of W at level {m}",
                heads.len(),
                rest.len()
            )));
        }
        let mut out = Vec::with_capacity(heads.len() * rest.len());
        for h in &heads {
            for r in &rest {
                let mut v = h.clone();
                v.extend_from_slice(r);
                out.push(v);
            }
        }
        Ok(out)
    }
}
