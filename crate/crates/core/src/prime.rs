//! Prime modification of the construction, the non-prime example, the pairwise
//! witness search, and disjoint-occurrence counting.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::{level_sizes, mu_table, GrowthSpec, SizeTable};
use crate::report::{ClaimRecord, VerificationReport};
use crate::words::automata::{Dfa, Transfer};
use crate::words::build::{first_of_product, fits_explicit, lex_first};
use crate::words::factors::DimEngine;
use crate::words::verify::verify_entropy;
use crate::words::{build, ceil_log2, render, CSet, ConstructionState, Limits, StrategySpec};

/// Selection for the prime strategy at level `n`. If `n = mu(j)`, the result
/// contains, for each `t` in `W_j`, the least word of `W_n` ending in `t`;
/// the rest is lex-first padding.
pub fn prime_select(
    st: &ConstructionState,
    n: usize,
    k: &BigUint,
    sizes: &SizeTable,
    mu: &[usize],
) -> Result<CSet> {
    let Some(j) = mu.iter().position(|&m| m == n) else {
        return lex_first(st, n, k, None);
    };
    let targets = &st.level(j).w_size;
    if k < targets {
        return Err(Error::Assertion(format!(
            "level {n} = mu({j}) has room for {k} words but must project onto {targets} words of level {j}"
        )));
    }
    debug_assert!(sizes.w_size.len() > j);
    if !fits_explicit(st, n, k) {
        // The least preimages are the first |W_j| words of W_n, so a lex-first
        // segment of size k >= |W_j| already contains them.
        return lex_first(st, n, k, None);
    }
    let radix = st.radices(j)?;
    let mut pre: Vec<u32> = Vec::new();
    let mut code = vec![0u32; j + 1];
    let mut chosen: HashSet<Vec<u32>> = HashSet::new();
    loop {
        let mut full = vec![0u32; n - j];
        full.extend_from_slice(&code);
        chosen.insert(full.clone());
        pre.extend_from_slice(&full);
        if !crate::words::state::odometer_step(&mut code, &radix) {
            break;
        }
    }
    let k = k.to_usize().unwrap();
    let domains = st.filtered_domains(n, None)?;
    let pad = first_of_product(&domains, k - chosen.len(), |c| chosen.contains(c));
    let mut all: Vec<&[u32]> = pre.chunks_exact(n + 1).chain(pad.chunks_exact(n + 1)).collect();
    all.sort_unstable();
    Ok(CSet::Explicit(all.concat()))
}

/// Builds with the prime strategy, but with a caller-supplied `mu` table.
pub fn prime_strategy_with_mu(growth: &GrowthSpec, depth: usize, mu: &[usize], limits: &Limits) -> Result<ConstructionState> {
    let sizes = level_sizes(growth, depth)?;
    let mut st = ConstructionState::new(growth.d() as u8, growth.clone(), StrategySpec::Prime, limits.clone());
    for n in 0..depth {
        let k = sizes.c_size[n].clone();
        let c = prime_select(&st, n, &k, &sizes, mu)?;
        st.push_level(c, k);
    }
    Ok(st)
}

/// Packs a word of at most 15 letters into a `u64` key.
fn key(w: &[u8]) -> u64 {
    let mut k = (w.len() as u64) << 60;
    for (i, &x) in w.iter().enumerate() {
        k |= (x as u64) << (4 * i);
    }
    k
}

/// Nonzero words of length `1..=max_len` at the horizon, sorted by length then lex.
pub fn nonzero_words(st: &ConstructionState, max_len: usize) -> Result<Vec<Vec<u8>>> {
    let eng = DimEngine::new(st);
    let mut out = Vec::new();
    for l in 1..=max_len.min(1 << st.depth().min(20)) {
        let mut v: Vec<Vec<u8>> = eng.factor_set(st.depth(), l)?.into_iter().collect();
        v.sort_unstable();
        out.extend(v);
    }
    Ok(out)
}


#[derive(Clone, Debug, Serialize)]
pub struct PairWitness {
    pub u: String,
    pub u2: String,
    /// The word between `u` and `u2`; absent when existence was decided without scanning.
    pub v: Option<String>,
    pub level: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairFailure {
    pub u: String,
    pub u2: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimenessReport {
    pub max_len: usize,
    pub horizon: usize,
    /// Largest level at which witnesses are accepted.
    pub level_bound: usize,
    pub words: usize,
    pub pairs: usize,
    pub witnessed: Vec<PairWitness>,
    /// Pairs whose first witness lies above `level_bound`.
    pub late: Vec<PairWitness>,
    pub failures: Vec<PairFailure>,
    pub letters_scanned: u64,
    /// Levels below this were read word by word; the rest were decided symbolically.
    pub scanned_levels: usize,
}

impl PrimenessReport {
    pub fn pass(&self) -> bool {
        self.late.is_empty() && self.failures.is_empty()
    }

    pub fn witness_for(&self, u: &str, u2: &str) -> Option<&PairWitness> {
        self.witnessed.iter().chain(&self.late).find(|p| p.u == u && p.u2 == u2)
    }

    pub fn failed(&self, u: &str, u2: &str) -> bool {
        self.failures.iter().any(|f| f.u == u && f.u2 == u2)
    }

    /// Highest first-witness level over all witnessed pairs.
    pub fn max_level(&self) -> Option<usize> {
        self.witnessed.iter().chain(&self.late).map(|p| p.level).max()
    }
}

/// For the prime strategy, `mu(n*) + 1` with `2^(n*) >= max_len`; otherwise the horizon.
pub fn witness_level_bound(st: &ConstructionState, max_len: usize) -> Result<usize> {
    let n = st.depth();
    if st.strategy != StrategySpec::Prime {
        return Ok(n);
    }
    let n_star = ceil_log2(max_len as u64);
    let sizes = level_sizes(&st.growth, n)?;
    let (mu, _) = mu_table(&st.growth, &sizes, n)?;
    match mu.get(n_star) {
        Some(&m) => Ok(m + 1),
        None => Err(Error::HorizonExhausted(format!(
            "mu({n_star}) is beyond depth {n}; build deeper to check words of length {max_len}"
        ))),
    }
}

/// Finds, for every ordered pair of the given words, the first level with a word
/// containing `u` and later a disjoint `u2`. Levels are scanned in order while
/// the letter budget lasts; the remaining pairs are decided by [`pair_bounds`].
pub fn find_pair_witnesses(
    st: &ConstructionState,
    words: &[Vec<u8>],
    level_bound: usize,
    scan_budget: u64,
) -> Result<PrimenessReport> {
    let max_len = words.iter().map(|w| w.len()).max().unwrap_or(0);
    if max_len > 15 {
        return Err(Error::Invalid("pair search supports words of length at most 15".into()));
    }
    let ids: HashMap<u64, usize> = words.iter().enumerate().map(|(i, w)| (key(w), i)).collect();
    let p = words.len();
    // remaining[u] = second words not yet witnessed for u
    let mut remaining: Vec<Vec<u32>> = (0..p).map(|_| (0..p as u32).collect()).collect();
    let mut open = p * p;
    let mut found_at: Vec<PairWitness> = Vec::new();
    let mut scanned = 0u64;
    let mut scanned_levels = 0;
    for m in 0..=st.depth() {
        if open == 0 {
            break;
        }
        let len = 1u64 << m;
        let total = match st.level(m).w_size.to_u64() {
            Some(t) if t.checked_mul(len).is_some_and(|x| scanned.saturating_add(x) <= scan_budget) => t,
            _ => break,
        };
        scanned += total * len;
        scanned_levels = m + 1;
        let radix = st.radices(m)?;
        let chunk = (1u64 << 20) / len + 1;
        let mut start = 0u64;
        while start < total && open > 0 {
            let count = chunk.min(total - start);
            let parts = 8u64.min(count);
            let ranges: Vec<(u64, u64)> = (0..parts)
                .map(|i| (start + count * i / parts, start + count * (i + 1) / parts))
                .collect();
            let found = crate::par::map(&ranges, |&(a, b)| {
                scan_range(st, m, &radix, a, b, &ids, p, max_len, &remaining)
            });
            for hits in found {
                for (u, u2, v) in hits {
                    if let Some(pos) = remaining[u].iter().position(|&x| x as usize == u2) {
                        remaining[u].swap_remove(pos);
                        open -= 1;
                        found_at.push(PairWitness {
                            u: render(&words[u]),
                            u2: render(&words[u2]),
                            v: Some(render(&v)),
                            level: m,
                        });
                    }
                }
            }
            start += count;
        }
    }
    let mut rest: Vec<(usize, usize)> = Vec::new();
    for (u, r) in remaining.iter().enumerate() {
        rest.extend(r.iter().map(|&u2| (u, u2 as usize)));
    }
    rest.sort_unstable();
    let decided = crate::par::map(&rest, |&(u, u2)| first_pair_level(st, &words[u], &words[u2], scanned_levels));
    let mut failures = Vec::new();
    for (&(u, u2), d) in rest.iter().zip(decided) {
        let (u, u2) = (render(&words[u]), render(&words[u2]));
        match d? {
            PairLevel::At(level) => found_at.push(PairWitness { u, u2, v: None, level }),
            PairLevel::Absent => failures.push(PairFailure { u, u2, reason: "no word up to the horizon contains u followed by u2".into() }),
            PairLevel::Undecided => failures.push(PairFailure { u, u2, reason: "undecided: only the upper bound admits the pair".into() }),
        }
    }
    let (witnessed, late) = found_at.into_iter().partition(|w| w.level <= level_bound);
    Ok(PrimenessReport {
        max_len,
        horizon: st.depth(),
        level_bound,
        words: p,
        pairs: p * p,
        witnessed,
        late,
        failures,
        letters_scanned: scanned,
        scanned_levels,
    })
}

enum PairLevel {
    At(usize),
    Absent,
    Undecided,
}

fn first_pair_level(st: &ConstructionState, u: &[u8], u2: &[u8], from: usize) -> Result<PairLevel> {
    let (_, hi) = pair_bounds(st, u, u2, st.depth())?;
    if !hi {
        return Ok(PairLevel::Absent);
    }
    for m in from..=st.depth() {
        if pair_bounds(st, u, u2, m)?.0 {
            return Ok(PairLevel::At(m));
        }
    }
    Ok(PairLevel::Undecided)
}

fn unrank_u64(mut r: u64, radix: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; radix.len()];
    for p in (0..radix.len()).rev() {
        out[p] = (r % radix[p] as u64) as u32;
        r /= radix[p] as u64;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn scan_range(
    st: &ConstructionState,
    m: usize,
    radix: &[u32],
    a: u64,
    b: u64,
    ids: &HashMap<u64, usize>,
    p: usize,
    max_len: usize,
    remaining: &[Vec<u32>],
) -> Vec<(usize, usize, Vec<u8>)> {
    let mut out = Vec::new();
    let mut done: HashSet<(usize, usize)> = HashSet::new();
    let mut first_end = vec![usize::MAX; p];
    let mut last_start = vec![usize::MAX; p];
    let mut seen: Vec<usize> = Vec::new();
    let mut code = unrank_u64(a, radix);
    let mut buf = Vec::with_capacity(1 << m);
    for _ in a..b {
        buf.clear();
        st.write_code(m, &code, &mut buf);
        for &i in &seen {
            first_end[i] = usize::MAX;
            last_start[i] = usize::MAX;
        }
        seen.clear();
        for pos in 0..buf.len() {
            for l in 1..=max_len.min(buf.len() - pos) {
                if let Some(&i) = ids.get(&key(&buf[pos..pos + l])) {
                    if first_end[i] == usize::MAX {
                        first_end[i] = pos + l;
                        seen.push(i);
                    }
                    last_start[i] = pos;
                }
            }
        }
        for &u in &seen {
            for &u2 in &remaining[u] {
                let u2 = u2 as usize;
                if last_start[u2] != usize::MAX
                    && first_end[u] <= last_start[u2]
                    && done.insert((u, u2))
                {
                    out.push((u, u2, buf[first_end[u]..last_start[u2]].to_vec()));
                }
            }
        }
        crate::words::state::odometer_step(&mut code, radix);
    }
    out
}

/// The primeness check over all nonzero words of length at most `max_len`.
pub fn check_prime(st: &ConstructionState, max_len: usize) -> Result<PrimenessReport> {
    let bound = witness_level_bound(st, max_len)?;
    let words = nonzero_words(st, max_len)?;
    find_pair_witnesses(st, &words, bound, st.limits.scan_letters)
}

/// Converts a primeness report into claim records.
pub fn primeness_claims(rep: &PrimenessReport, subject: &str, config: &str) -> VerificationReport {
    let mut out = VerificationReport::new(subject, config, rep.horizon);
    out.push(ClaimRecord::new(
        format!("every pair of nonzero words of length <= {} has a witness at level <= {}", rep.max_len, rep.level_bound),
        format!("{} witnessed in bound", rep.witnessed.len()),
        format!("{} pairs", rep.pairs),
        rep.pass(),
    ));
    for p in rep.late.iter().take(50) {
        out.push(
            ClaimRecord::new("pair witness level", p.level, rep.level_bound, false)
                .with_witness(format!("{} .. {}", p.u, p.u2)),
        );
    }
    for f in rep.failures.iter().take(50) {
        out.push(ClaimRecord::new("pair witness", &f.u, &f.u2, false).with_witness(&f.reason));
    }
    if let Some(m) = rep.max_level() {
        out.note(format!("highest first-witness level: {m}"));
    }
    if rep.scanned_levels <= rep.horizon {
        out.note(format!(
            "levels from {} on were decided by transfer matrices instead of scanning",
            rep.scanned_levels
        ));
    }
    out
}

/// `(lo, hi)` bounds on the maximum number of pairwise disjoint occurrences of
/// `g` in a word of `W(2^h)`; equal whenever every `C` level below `h` is explicit
/// or a letter-excluding segment that `g` cannot meet.
pub fn max_disjoint_occurrences(st: &ConstructionState, g: &[u8], h: usize) -> Result<(u64, u64)> {
    if g.is_empty() || h > st.depth() {
        return Err(Error::Invalid("need a nonempty word and a built level".into()));
    }
    Ok(Transfer::new(st, Dfa::greedy(g, st.alphabet), h)?.bounds())
}

/// Whether some word of `W(2^h)` contains `u` and later a disjoint `u2`: a
/// certified lower answer and an upper answer.
pub fn pair_bounds(st: &ConstructionState, u: &[u8], u2: &[u8], h: usize) -> Result<(bool, bool)> {
    if u.is_empty() || u2.is_empty() || h > st.depth() {
        return Err(Error::Invalid("need nonempty words and a built level".into()));
    }
    let (lo, hi) = Transfer::new(st, Dfa::chain(u, u2, st.alphabet), h)?.bounds();
    Ok((lo > 0, hi > 0))
}

/// Prime build of a near-one exponential and the entropy checks on it.
pub fn verify_entropy_corollary(growth: &GrowthSpec, depth: usize, limits: &Limits) -> Result<VerificationReport> {
    let st = build(growth, depth, &StrategySpec::Prime, limits)?;
    let mut rep = crate::words::verify::verify_growth_bounds(&st)?;
    rep.subject = "entropy corollary".into();
    let (p, q) = match &growth.family {
        crate::growth::Family::NearOneExp { eps, .. } => (*eps.numer() as u32, *eps.denom() as u32),
        _ => return Err(Error::Invalid("the entropy corollary needs a near-one exponential".into())),
    };
    let top = 1usize << depth;
    let samples: Vec<usize> = (0..4).map(|i| top - i).chain([top / 2, top / 4]).collect();
    let ceiling = ((q + p) * (q + p), q * q);
    let (erep, samples) = verify_entropy(&st, &samples, ceiling)?;
    rep.merge(erep);
    for s in samples {
        rep.note(format!("dim({})^(1/{}) in [{}, {}]", s.n, s.n, s.root_lower, s.root_upper));
    }
    Ok(rep)
}

/// Claims of the letter-avoiding example: `x` occurs at most once in every
/// `W(2^h)`, and no word holds `x` twice, so `x B x = 0` at the horizon.
pub fn verify_nonprime_example(st: &ConstructionState, x: u8) -> Result<VerificationReport> {
    let top = st.depth();
    let xs = render(&[x]);
    let mut rep = VerificationReport::new("letter-avoiding example", &st.describe(), top);
    for h in 1..=top {
        let (_, hi) = max_disjoint_occurrences(st, &[x], h)?;
        rep.push(ClaimRecord::new(format!("{xs} occurs at most once in W(2^h)"), hi, 1, hi <= 1).at_level(h));
    }
    let (_, hi) = pair_bounds(st, &[x], &[x], top)?;
    rep.push(ClaimRecord::new(format!("{xs} B {xs} = 0"), if hi { "possible" } else { "no word" }, "no word", !hi).at_level(top));
    Ok(rep)
}
