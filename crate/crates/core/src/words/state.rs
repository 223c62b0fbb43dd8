use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::build::StrategySpec;
use crate::error::{Error, Result};
use crate::growth::GrowthSpec;

/// Resource limits for builds and queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Bytes a single explicit `C` level may occupy before it is kept symbolic.
    pub mem_bytes: u64,
    /// Bytes an exact factor-set materialization may use.
    pub exact_bytes: u64,
    /// Letters a witness scan may read before giving up.
    pub scan_letters: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            mem_bytes: 1 << 30,
            exact_bytes: 1 << 28,
            scan_letters: 1 << 32,
        }
    }
}

/// The prefix-extension set of one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CSet {
    /// Sorted, distinct codes of stride `n + 1`.
    Explicit(Vec<u32>),
    /// The first `count` words, in lexicographic order, of the product
    /// `C_{n-1} ... C_0 x` restricted to final letters other than `exclude`.
    /// Every lower level must lie entirely inside the same restriction.
    Segment {
        count: BigUint,
        exclude: Option<u8>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub n: usize,
    /// `|C(2^n)|`; at the top level this is the table value and `c` is `None`.
    pub c_size: BigUint,
    /// `|W(2^n)|`.
    pub w_size: BigUint,
    pub c: Option<CSet>,
}

/// A built construction: alphabet, growth function, strategy and levels `0..=depth`.
#[derive(Clone, Debug)]
pub struct ConstructionState {
    pub alphabet: u8,
    pub growth: GrowthSpec,
    pub strategy: StrategySpec,
    pub levels: Vec<Level>,
    pub log: Vec<String>,
    pub limits: Limits,
    /// Per level, the letters of all `C` words back to back, when small enough.
    cache: Vec<Option<Vec<u8>>>,
}

const CACHE_BYTES: usize = 1 << 25;

impl PartialEq for ConstructionState {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.growth == other.growth
            && self.strategy == other.strategy
            && self.levels == other.levels
    }
}

impl ConstructionState {
    pub fn new(alphabet: u8, growth: GrowthSpec, strategy: StrategySpec, limits: Limits) -> Self {
        ConstructionState {
            alphabet,
            growth,
            strategy,
            levels: vec![Level {
                n: 0,
                c_size: BigUint::zero(),
                w_size: BigUint::from(alphabet),
                c: None,
            }],
            log: Vec::new(),
            limits,
            cache: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n]
    }

    /// Number of letters of a word of level `m`.
    pub fn len_of(m: usize) -> usize {
        1usize << m
    }

    /// Explicit codes of `C_n`, if `C_n` is stored explicitly.
    pub fn explicit(&self, n: usize) -> Option<&[u32]> {
        match self.levels.get(n)?.c.as_ref()? {
            CSet::Explicit(v) => Some(v),
            CSet::Segment { .. } => None,
        }
    }

    pub fn explicit_or_err(&self, n: usize) -> Result<&[u32]> {
        self.explicit(n).ok_or_else(|| {
            Error::Capacity(format!("C at level {n} is not stored explicitly"))
        })
    }

    /// Actual `|C_n|` as stored (may differ from the size table for extended systems).
    pub fn c_len(&self, n: usize) -> BigUint {
        match self.levels[n].c.as_ref() {
            Some(CSet::Explicit(v)) => BigUint::from(v.len() / (n + 1)),
            Some(CSet::Segment { count, .. }) => count.clone(),
            None => self.levels[n].c_size.clone(),
        }
    }

    pub fn c_count(&self, n: usize) -> Result<usize> {
        let codes = self.explicit_or_err(n)?;
        Ok(codes.len() / (n + 1))
    }

    /// Code of `C_n[i]` (as a `W_n` code).
    pub fn code(&self, n: usize, i: usize) -> &[u32] {
        let codes = self.explicit(n).expect("explicit level");
        &codes[i * (n + 1)..(i + 1) * (n + 1)]
    }

    /// True when levels `0..n` are all explicit.
    pub fn explicit_below(&self, n: usize) -> bool {
        (0..n).all(|t| self.explicit(t).is_some())
    }

    /// The lowest level whose `C` is symbolic.
    pub fn first_symbolic(&self) -> Option<usize> {
        (0..self.depth()).find(|&t| self.explicit(t).is_none())
    }

    pub(crate) fn push_level(&mut self, c: CSet, c_size: BigUint) {
        let n = self.depth();
        let count = match &c {
            CSet::Explicit(v) => BigUint::from(v.len() / (n + 1)),
            CSet::Segment { count, .. } => count.clone(),
        };
        let w_next = &count * &self.levels[n].w_size;
        self.levels[n].c = Some(c);
        self.levels[n].c_size = c_size;
        self.levels.push(Level {
            n: n + 1,
            c_size: BigUint::zero(),
            w_size: w_next,
            c: None,
        });
        self.refresh_cache_level(n);
    }

    /// Rebuilds the letter cache (after loading or editing levels).
    pub fn refresh_cache(&mut self) {
        self.cache.clear();
        for n in 0..self.depth() {
            self.refresh_cache_level(n);
        }
    }

    fn refresh_cache_level(&mut self, n: usize) {
        self.cache.truncate(n);
        while self.cache.len() < n {
            self.cache.push(None);
        }
        let entry = match self.explicit(n) {
            Some(codes) => {
                let count = codes.len() / (n + 1);
                if count.saturating_mul(1 << n) <= CACHE_BYTES {
                    let mut out = Vec::with_capacity(count << n);
                    for i in 0..count {
                        self.write_code(n, &codes[i * (n + 1)..(i + 1) * (n + 1)], &mut out);
                    }
                    Some(out)
                } else {
                    None
                }
            }
            None => None,
        };
        self.cache.push(entry);
    }

    /// Appends the letters of `C_n[i]`.
    pub fn write_c(&self, n: usize, i: usize, out: &mut Vec<u8>) {
        if let Some(Some(buf)) = self.cache.get(n) {
            let l = 1usize << n;
            out.extend_from_slice(&buf[i * l..(i + 1) * l]);
        } else {
            let code = self.code(n, i);
            self.write_code(n, code, out);
        }
    }

    /// Letters of `C_n[i]`.
    pub fn c_word(&self, n: usize, i: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 << n);
        self.write_c(n, i, &mut out);
        out
    }

    /// Appends the letters of the `W_m` word with the given code.
    pub fn write_code(&self, m: usize, code: &[u32], out: &mut Vec<u8>) {
        for (p, &digit) in code[..m].iter().enumerate() {
            self.write_c(m - 1 - p, digit as usize, out);
        }
        out.push(code[m] as u8);
    }

    pub fn code_word(&self, m: usize, code: &[u32]) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 << m);
        self.write_code(m, code, &mut out);
        out
    }

    /// Appends the last `s` letters of the `W_m` word with this code.
    pub fn write_code_suffix(&self, m: usize, code: &[u32], s: usize, out: &mut Vec<u8>) {
        debug_assert!(s <= 1 << m);
        if s == 0 {
            return;
        }
        if m == 0 {
            out.push(code[0] as u8);
            return;
        }
        let half = 1usize << (m - 1);
        if s <= half {
            self.write_code_suffix(m - 1, &code[1..], s, out);
        } else {
            let head = code[0] as usize;
            if let Some(Some(buf)) = self.cache.get(m - 1) {
                out.extend_from_slice(&buf[(head + 1) * half - (s - half)..(head + 1) * half]);
            } else {
                self.write_code_suffix(m - 1, self.code(m - 1, head), s - half, out);
            }
            self.write_code(m - 1, &code[1..], out);
        }
    }

    /// Appends the first `q` letters of the `W_m` word with this code.
    pub fn write_code_prefix(&self, m: usize, code: &[u32], q: usize, out: &mut Vec<u8>) {
        debug_assert!(q <= 1 << m);
        if q == 0 {
            return;
        }
        if m == 0 {
            out.push(code[0] as u8);
            return;
        }
        let half = 1usize << (m - 1);
        let head = code[0] as usize;
        if q <= half {
            self.write_c_prefix(m - 1, head, q, out);
        } else {
            self.write_c(m - 1, head, out);
            self.write_code_prefix(m - 1, &code[1..], q - half, out);
        }
    }

    /// Appends the first `q` letters of `C_n[i]`.
    pub fn write_c_prefix(&self, n: usize, i: usize, q: usize, out: &mut Vec<u8>) {
        if let Some(Some(buf)) = self.cache.get(n) {
            let l = 1usize << n;
            out.extend_from_slice(&buf[i * l..i * l + q]);
        } else {
            self.write_code_prefix(n, self.code(n, i), q, out);
        }
    }

    /// Index of a `W_n` code inside `C_n`, if it is a member.
    pub fn c_index_of(&self, n: usize, code: &[u32]) -> Option<usize> {
        let codes = self.explicit(n)?;
        let stride = n + 1;
        let count = codes.len() / stride;
        let (mut lo, mut hi) = (0usize, count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match codes[mid * stride..(mid + 1) * stride].cmp(code) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Code of a word of length `2^m` as an element of `W_m`, if it is one.
    /// Requires levels below `m` to be explicit.
    pub fn parse(&self, m: usize, letters: &[u8]) -> Option<Vec<u32>> {
        if letters.len() != 1 << m {
            return None;
        }
        let mut code = Vec::with_capacity(m + 1);
        let mut rest = letters;
        for t in (0..m).rev() {
            let half = 1usize << t;
            let head = self.parse(t, &rest[..half])?;
            let idx = self.c_index_of(t, &head)?;
            code.push(idx as u32);
            rest = &rest[half..];
        }
        if rest[0] >= self.alphabet {
            return None;
        }
        code.push(rest[0] as u32);
        Some(code)
    }

    /// Whether a word of length `2^n` is a member of `C_n`.
    pub fn is_c_word(&self, n: usize, letters: &[u8]) -> bool {
        match self.parse(n, letters) {
            Some(code) => self.c_index_of(n, &code).is_some(),
            None => false,
        }
    }

    /// Digit radices of `W_m` codes: `[|C_{m-1}|, ..., |C_0|, alphabet]`.
    pub fn radices(&self, m: usize) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(m + 1);
        for t in (0..m).rev() {
            let c = self.c_len(t);
            out.push(c.to_u32().ok_or_else(|| {
                Error::Capacity(format!("C at level {t} has more than 2^32 words"))
            })?);
        }
        out.push(self.alphabet as u32);
        Ok(out)
    }

    /// Calls `visit` with every `W_m` word, in lexicographic order.
    pub fn for_each_w<F: FnMut(&[u32], &[u8]) -> bool>(&self, m: usize, mut visit: F) -> Result<()> {
        if !self.explicit_below(m) {
            return Err(Error::Capacity(format!("levels below {m} are not all explicit")));
        }
        let radix = self.radices(m)?;
        if radix.iter().any(|&r| r == 0) {
            return Ok(());
        }
        let mut code = vec![0u32; m + 1];
        let mut buf = Vec::with_capacity(1 << m);
        loop {
            buf.clear();
            self.write_code(m, &code, &mut buf);
            if !visit(&code, &buf) {
                return Ok(());
            }
            if !odometer_step(&mut code, &radix) {
                return Ok(());
            }
        }
    }

    /// All `W_m` words (small levels only).
    pub fn w_words(&self, m: usize) -> Result<Vec<Vec<u8>>> {
        let total = &self.levels[m].w_size << m;
        if total > BigUint::from(self.limits.exact_bytes) {
            return Err(Error::Capacity(format!("W at level {m} is too large to list")));
        }
        let mut out = Vec::new();
        self.for_each_w(m, |_, w| {
            out.push(w.to_vec());
            true
        })?;
        Ok(out)
    }

    /// Letters of all `C_n` words.
    pub fn c_words(&self, n: usize) -> Result<Vec<Vec<u8>>> {
        let count = self.c_count(n)?;
        Ok((0..count).map(|i| self.c_word(n, i)).collect())
    }

    /// `|W_m|` restricted to final letters other than `exclude` (all `C` levels
    /// are assumed to avoid it already).
    pub fn filtered_w_size(&self, m: usize, exclude: Option<u8>) -> BigUint {
        let mut total = BigUint::from(self.alphabet as u32 - exclude.map_or(0, |_| 1));
        for t in 0..m {
            total *= self.c_len(t);
        }
        total
    }

    /// A stable summary of the state used in report hashes.
    pub fn describe(&self) -> String {
        format!(
            "alphabet={} growth={} strategy={} depth={}",
            self.alphabet,
            self.growth,
            self.strategy,
            self.depth()
        )
    }

    /// Sets `|C|` recorded at the top level, where no `C` list is stored.
    pub(crate) fn set_top_c_size(&mut self, c_size: BigUint) {
        let n = self.depth();
        self.levels[n].c_size = c_size;
    }

    pub(crate) fn clear_top(&mut self) {
        let n = self.depth();
        self.levels[n].c = None;
    }
}

/// Advances a mixed-radix counter (last digit fastest). Returns false on wraparound.
pub fn odometer_step(code: &mut [u32], radix: &[u32]) -> bool {
    for p in (0..code.len()).rev() {
        code[p] += 1;
        if code[p] < radix[p] {
            return true;
        }
        code[p] = 0;
    }
    false
}

/// The mixed-radix digits of `rank` (most significant first).
pub fn unrank(rank: &BigUint, radix: &[BigUint]) -> Vec<BigUint> {
    let mut r = rank.clone();
    let mut out = vec![BigUint::zero(); radix.len()];
    for p in (0..radix.len()).rev() {
        out[p] = &r % &radix[p];
        r /= &radix[p];
    }
    out
}

/// Product of radices.
pub fn radix_product(radix: &[BigUint]) -> BigUint {
    radix.iter().fold(BigUint::one(), |a, b| a * b)
}
