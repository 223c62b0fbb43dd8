//! The extra-letter construction. Levels are lex-first `C` sets avoiding the
//! last letter `z`; at levels `2^nu(i)` the lex-min preimages of `W(2^i)` are
//! added, so that `z` can sit inside words. Also the `z`-degree bounds and a
//! search for nilpotency degrees of finite sets of words containing `z`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::{level_sizes, GrowthSpec};
use crate::prime::{check_prime, nonzero_words, primeness_claims, PrimenessReport};
use crate::primitive::EpsSeq;
use crate::report::{ClaimRecord, VerificationReport};
use crate::words::build::lex_first;
use crate::words::factors::{DimEngine, FactorIndex};
use crate::words::verify::check_onto_words;
use crate::words::{build, ceil_log2, render, CSet, ConstructionState, Limits, StrategySpec};

/// One insertion of preimages at level `2^nu`.
#[derive(Clone, Debug, Serialize)]
pub struct Insertion {
    pub i: usize,
    pub nu: usize,
    pub level: usize,
    pub eps: String,
    /// `|X_i| = |W(2^i)|`.
    pub x_size: usize,
    /// Words of `X_i` that were not already in `C`.
    pub added: usize,
    pub c_base: BigUint,
    pub c_tilde: BigUint,
    #[serde(skip)]
    pub words: Vec<Vec<u8>>,
}

#[derive(Clone, Debug)]
pub struct TildeSystem {
    /// Same sizes, `z`-free `C` sets, no insertions.
    pub base: ConstructionState,
    pub state: ConstructionState,
    pub eps: EpsSeq,
    /// Certified bound on `prod (1 + eps_i)`.
    pub l: BigRational,
    pub insertions: Vec<Insertion>,
}

impl TildeSystem {
    /// The extra letter.
    pub fn letter(&self) -> u8 {
        self.state.alphabet - 1
    }

    pub fn insertion_at(&self, n: usize) -> Option<&Insertion> {
        self.insertions.iter().find(|x| x.level == n)
    }
}

fn ratio_le(a: &BigUint, r: &BigRational, b: &BigUint) -> bool {
    // a <= r * b
    let a = BigInt::from(a.clone()) * r.denom();
    let b = BigInt::from(b.clone()) * r.numer();
    a <= b
}

fn show_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Builds levels `0..=depth` over `d + 1` letters for base growth `f` with `d` letters.
/// `nu(i)` is the least admissible exponent with `|W(2^i)| <= eps_i |C(2^(2^nu))|`.
pub fn build_tilde(f: &GrowthSpec, depth: usize, eps: &EpsSeq, limits: &Limits) -> Result<TildeSystem> {
    let ft = f.plus_letter();
    let z = f.d() as u8;
    let sizes = level_sizes(&ft, depth)?;
    let base = build(&ft, depth, &StrategySpec::NonPrime { letter: z }, limits)?;
    let mut st = ConstructionState::new(z + 1, ft, StrategySpec::Tilde { shift: eps.shift }, limits.clone());
    let l = eps.product_bound();
    let mut insertions: Vec<Insertion> = Vec::new();
    for n in 0..depth {
        let k = &sizes.c_size[n];
        let c = lex_first(&st, n, k, Some(z))?;
        let i = insertions.len();
        let nu = n.trailing_zeros() as usize;
        let due = n.is_power_of_two()
            && insertions.last().is_none_or(|p| nu > p.nu)
            && (&st.level(i).w_size << (i + eps.shift as usize)) <= *k;
        if !due {
            st.push_level(c, k.clone());
            continue;
        }
        let CSet::Explicit(codes) = c else {
            return Err(Error::Capacity(format!("insertion level {n} must be stored explicitly")));
        };
        let mut all: Vec<Vec<u32>> = codes.chunks_exact(n + 1).map(|c| c.to_vec()).collect();
        let before = all.len();
        let mut words = Vec::new();
        st.for_each_w(i, |code, _| {
            let mut full = vec![0u32; n - i];
            full.extend_from_slice(code);
            all.push(full);
            true
        })?;
        for code in &all[before..] {
            words.push(st.code_word(n, code));
        }
        all.sort_unstable();
        all.dedup();
        let c_tilde = BigUint::from(all.len());
        let e = eps.at(i);
        if !ratio_le(&c_tilde, &(BigRational::one() + &e), k) {
            return Err(Error::Assertion(format!("|C~| = {c_tilde} exceeds (1 + {e})|C| at level {n}")));
        }
        st.log.push(format!("level {n}: nu({i}) = {nu}, |X| = {}, |C~| = {c_tilde}", words.len()));
        insertions.push(Insertion {
            i,
            nu,
            level: n,
            eps: show_ratio(&e),
            x_size: words.len(),
            added: all.len() - before,
            c_base: k.clone(),
            c_tilde: c_tilde.clone(),
            words,
        });
        st.push_level(CSet::Explicit(all.concat()), c_tilde);
    }
    st.set_top_c_size(sizes.c_size[depth].clone());
    st.clear_top();
    if insertions.is_empty() {
        return Err(Error::HorizonExhausted(format!(
            "nu(0) is not reached at or below level {depth} for eps = {}",
            show_ratio(&eps.at(0))
        )));
    }
    for n in 0..=depth {
        if !ratio_le(&st.c_len(n), &l, &base.c_len(n)) || !ratio_le(&st.level(n).w_size, &l, &base.level(n).w_size) {
            return Err(Error::Assertion(format!("level {n} exceeds l = {} times the base sizes", show_ratio(&l))));
        }
    }
    Ok(TildeSystem {
        base,
        state: st,
        eps: *eps,
        l,
        insertions,
    })
}

/// For every level, the index of each base `C` word inside the extended `C`
/// list, or the first base word that is missing.
fn base_index_maps(sys: &TildeSystem) -> Result<std::result::Result<Vec<Vec<u32>>, (usize, String)>> {
    let (b, st) = (&sys.base, &sys.state);
    let mut maps: Vec<Vec<u32>> = Vec::new();
    for t in 0..b.depth() {
        let codes = b.explicit_or_err(t)?;
        let mut map = Vec::with_capacity(codes.len() / (t + 1));
        for code in codes.chunks_exact(t + 1) {
            let mapped: Vec<u32> = code
                .iter()
                .enumerate()
                .map(|(p, &dig)| if p < t { maps[t - 1 - p][dig as usize] } else { dig })
                .collect();
            match st.c_index_of(t, &mapped) {
                Some(idx) => map.push(idx as u32),
                None => return Ok(Err((t, render(&b.code_word(t, code))))),
            }
        }
        maps.push(map);
    }
    Ok(Ok(maps))
}

/// Structural checks: `z`-free levels, the insertion budgets, the onto
/// property of each `X_i`, containment of the base `C` sets, and the
/// cumulative size factor `l`.
pub fn verify_tilde_structure(sys: &TildeSystem) -> Result<VerificationReport> {
    let st = &sys.state;
    let top = st.depth();
    let z = sys.letter();
    let zs = render(&[z]);
    let mut rep = VerificationReport::new("extra-letter structure", &st.describe(), top);
    let counts = st.letter_counts(z, top)?;
    for n in 0..top {
        match sys.insertion_at(n) {
            Some(ins) => {
                let e = sys.eps.at(ins.i);
                rep.push(
                    ClaimRecord::new(
                        "|C~(2^n)| <= (1+eps_i)|C(2^n)|",
                        &ins.c_tilde,
                        format!("(1+{})*{}", show_ratio(&e), ins.c_base),
                        ratio_le(&ins.c_tilde, &(BigRational::one() + e), &ins.c_base),
                    )
                    .at_level(n),
                );
                let lower = st.w_words(ins.i)?;
                let onto = check_onto_words(&ins.words, &lower, ins.i);
                let mut c = ClaimRecord::new(
                    format!("suffixes of length 2^{} of X_{} are exactly W~(2^{})", ins.i, ins.i, ins.i),
                    ins.words.len(),
                    lower.len(),
                    onto.pass && ins.words.len() == lower.len(),
                )
                .at_level(n);
                if let Some(w) = onto.witness {
                    c = c.with_witness(w);
                }
                rep.push(c);
            }
            None => {
                let bad = counts[n].iter().position(|&c| c > 0);
                let mut c = ClaimRecord::new(format!("C~(2^n) avoids {zs}"), bad.map_or(0, |_| 1), 0, bad.is_none()).at_level(n);
                if let Some(i) = bad {
                    c = c.with_witness(render(&st.c_word(n, i)));
                }
                rep.push(c);
            }
        }
    }
    match base_index_maps(sys)? {
        Ok(_) => rep.push(ClaimRecord::new("C(2^n) of the base lies in C~(2^n) for all n", "all", "all", true)),
        Err((t, w)) => rep.push(
            ClaimRecord::new("C(2^n) of the base lies in C~(2^n) for all n", "missing", "none", false)
                .at_level(t)
                .with_witness(w),
        ),
    }
    let l = &sys.l;
    for n in 0..=top {
        let (ct, cb) = (st.c_len(n), sys.base.c_len(n));
        rep.push(
            ClaimRecord::new("|C~(2^n)| <= l|C(2^n)|", &ct, format!("{}*{cb}", show_ratio(l)), ratio_le(&ct, l, &cb))
                .at_level(n),
        );
        let (wt, wb) = (&st.level(n).w_size, &sys.base.level(n).w_size);
        rep.push(
            ClaimRecord::new("|W~(2^n)| <= l|W(2^n)|", wt, format!("{}*{wb}", show_ratio(l)), ratio_le(wt, l, wb))
                .at_level(n),
        );
    }
    let used = sys
        .insertions
        .iter()
        .fold(BigRational::one(), |acc, ins| acc * (BigRational::one() + sys.eps.at(ins.i)));
    rep.push(ClaimRecord::new("prod (1+eps_i) over insertions <= l", show_ratio(&used), show_ratio(l), &used <= l));
    rep.note(format!(
        "insertions at levels {:?}; later ones lie beyond the horizon",
        sys.insertions.iter().map(|x| x.level).collect::<Vec<_>>()
    ));
    Ok(rep)
}

/// Occurrences of `letter` in `w`.
pub fn lambda_word(w: &[u8], letter: u8) -> usize {
    w.iter().filter(|&&x| x == letter).count()
}

/// Maxima of the `z`-count.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaStats {
    pub letter: String,
    /// Over `C(2^t)`, `t < N`.
    pub c_max: Vec<u64>,
    /// Over `W(2^m)`, `m <= N`.
    pub level: Vec<u64>,
    /// `window[n]`: over nonzero words of length at most `n`, `n <= 2^N`.
    pub window: Vec<u64>,
}

/// Per-length maxima over prefixes, suffixes and factors of a word set.
struct Profile {
    pre: Vec<u64>,
    suf: Vec<u64>,
    inner: Vec<u64>,
}

impl Profile {
    fn zero(len: usize) -> Self {
        Profile {
            pre: vec![0; len + 1],
            suf: vec![0; len + 1],
            inner: vec![0; len + 1],
        }
    }
}

fn c_profile(st: &ConstructionState, t: usize, letter: u8) -> Result<Profile> {
    let len = 1usize << t;
    let mut p = Profile::zero(len);
    match st.level(t).c.as_ref() {
        Some(CSet::Explicit(codes)) => {
            let mut buf = Vec::with_capacity(len);
            for i in 0..codes.len() / (t + 1) {
                buf.clear();
                st.write_c(t, i, &mut buf);
                if !buf.contains(&letter) {
                    continue;
                }
                let mut sums = vec![0u64; len + 1];
                for (j, &x) in buf.iter().enumerate() {
                    sums[j + 1] = sums[j] + (x == letter) as u64;
                }
                for s in 1..=len {
                    p.pre[s] = p.pre[s].max(sums[s]);
                    p.suf[s] = p.suf[s].max(sums[len] - sums[len - s]);
                    let best = (0..=len - s).map(|j| sums[j + s] - sums[j]).max().unwrap_or(0);
                    p.inner[s] = p.inner[s].max(best);
                }
            }
            Ok(p)
        }
        Some(CSet::Segment { exclude: Some(e), .. }) if *e == letter => Ok(p),
        _ => Err(Error::Capacity(format!("C at level {t} is symbolic and may contain the letter"))),
    }
}

/// Exact maxima through `W(2^(m+1)) = C(2^m) W(2^m)`: every pair occurs, so
/// maxima over a concatenation add.
pub fn lambda_stats(st: &ConstructionState, letter: u8) -> Result<LambdaStats> {
    let top = st.depth();
    let one = (letter < st.alphabet) as u64;
    let mut w = Profile {
        pre: vec![0, one],
        suf: vec![0, one],
        inner: vec![0, one],
    };
    let mut c_max = Vec::new();
    let mut level = vec![one];
    for m in 0..top {
        let c = c_profile(st, m, letter)?;
        let h = 1usize << m;
        c_max.push(c.pre[h]);
        let mut next = Profile::zero(2 * h);
        for s in 1..=2 * h {
            next.pre[s] = if s <= h { c.pre[s] } else { c.pre[h] + w.pre[s - h] };
            next.suf[s] = if s <= h { w.suf[s] } else { c.suf[s - h] + w.suf[h] };
        }
        let lengths: Vec<usize> = (1..=2 * h).collect();
        let cross = crate::par::map(&lengths, |&s| {
            let lo = s.saturating_sub(h).max(1);
            let hi = (s - 1).min(h);
            (lo..=hi).map(|a| c.suf[a] + w.pre[s - a]).max().unwrap_or(0)
        });
        for s in 1..=2 * h {
            let own = if s <= h { c.inner[s].max(w.inner[s]) } else { 0 };
            next.inner[s] = own.max(cross[s - 1]);
        }
        level.push(next.pre[2 * h]);
        w = next;
    }
    let mut window = vec![0u64; w.inner.len()];
    for s in 1..window.len() {
        window[s] = window[s - 1].max(w.inner[s]);
    }
    Ok(LambdaStats {
        letter: render(&[letter]),
        c_max,
        level,
        window,
    })
}

/// The degree recursion at every level, `lambda(W~(2^m)) <= 2^ceil(log2 m) <= 2m`
/// for `m >= 1`, and `lambda(n) <= 2(ceil(log2 n) + 2)` for every `n <= 2^N`.
pub fn verify_lambda(sys: &TildeSystem) -> Result<(VerificationReport, LambdaStats)> {
    let st = &sys.state;
    let top = st.depth();
    let stats = lambda_stats(st, sys.letter())?;
    let mut rep = VerificationReport::new("degree in the extra letter", &st.describe(), top);
    for m in 0..top {
        let (a, b) = (stats.level[m], stats.level[m + 1]);
        let c = if sys.insertion_at(m).is_some() {
            ClaimRecord::new("lambda(W~(2^(m+1))) <= 2 lambda(W~(2^m))", b, 2 * a, b <= 2 * a)
        } else {
            ClaimRecord::new("lambda(W~(2^(m+1))) = lambda(W~(2^m))", b, a, a == b)
        };
        rep.push(c.at_level(m));
    }
    for m in 1..=top {
        let closed = 1u64 << ceil_log2(m as u64);
        let v = stats.level[m];
        rep.push(
            ClaimRecord::new("lambda(W~(2^m)) <= 2^ceil(log2 m) <= 2m", v, format!("{closed} <= {}", 2 * m), v <= closed)
                .at_level(m),
        );
    }
    for n in 1..stats.window.len() {
        let bound = 2 * (ceil_log2(n as u64) as u64 + 2);
        let v = stats.window[n];
        if v > bound || n.is_power_of_two() {
            rep.push(ClaimRecord::new("lambda(n) <= 2(ceil(log2 n) + 2)", v, bound, v <= bound).at_length(n as u64));
        }
    }
    rep.note(format!(
        "lambda(n) checked at every n in 1..={}; passing non-dyadic n are not listed individually",
        stats.window.len() - 1
    ));
    Ok((rep, stats))
}

/// Least `e` with `e > 2(ceil(log2(m e)) + 2)`: no nonzero word of length at
/// most `m e` holds `e` copies of the letter.
pub fn a_priori_degree(m: usize) -> usize {
    (1..).find(|&e| e > 2 * (ceil_log2((m * e) as u64) + 2)).unwrap()
}

/// Outcome of a nilpotency search for one finite set.
#[derive(Clone, Debug, Serialize)]
pub struct NilpotencyRecord {
    pub gens: Vec<String>,
    /// Least `e` with every product of `e` generators zero at the horizon.
    pub degree: Option<usize>,
    pub a_priori: usize,
    pub max_deg: usize,
    /// A longest nonzero product found.
    pub longest_nonzero: String,
    pub products_tested: usize,
    pub pass: bool,
    pub reason: Option<String>,
}

/// Finds the nilpotency degree of the set `gens`, each of which must contain
/// the extra letter and be nonzero.
pub fn check_locally_nilpotent(st: &ConstructionState, gens: &[Vec<u8>], max_deg: usize) -> Result<NilpotencyRecord> {
    let mut fi = FactorIndex::new(st);
    nilpotency_search(&mut fi, gens, max_deg)
}

fn nilpotency_search(fi: &mut FactorIndex, gens: &[Vec<u8>], max_deg: usize) -> Result<NilpotencyRecord> {
    let st = fi.state();
    let z = st.alphabet - 1;
    let horizon_len = 1usize << st.depth();
    if gens.is_empty() {
        return Err(Error::Precondition("empty generator set".into()));
    }
    for g in gens {
        if !g.contains(&z) {
            return Err(Error::Precondition(format!("{} does not contain {}", render(g), render(&[z]))));
        }
        if g.len() > horizon_len || !fi.is_nonzero(g)? {
            return Err(Error::Precondition(format!("{} is zero at the horizon", render(g))));
        }
    }
    let m = gens.iter().map(|g| g.len()).max().unwrap_or(1);
    let a_priori = a_priori_degree(m);
    let mut frontier: BTreeSet<Vec<u8>> = gens.iter().cloned().collect();
    let mut longest = frontier.iter().next().cloned().unwrap_or_default();
    let mut tested = 0;
    let mut k = 1;
    let (degree, reason) = loop {
        if k >= max_deg {
            break (None, Some(format!("products of {max_deg} generators are not all zero")));
        }
        let mut next = BTreeSet::new();
        let mut beyond = false;
        for p in &frontier {
            for g in gens {
                let w = [p.as_slice(), g].concat();
                if w.len() > horizon_len {
                    beyond = true;
                    continue;
                }
                tested += 1;
                if fi.is_nonzero(&w)? {
                    next.insert(w);
                }
            }
        }
        if beyond {
            break (None, Some(format!("products of {} generators are longer than the horizon", k + 1)));
        }
        k += 1;
        if next.is_empty() {
            break (Some(k), None);
        }
        longest = next.iter().next().cloned().unwrap_or_default();
        frontier = next;
    };
    let pass = degree.is_some_and(|e| e <= a_priori);
    let reason = reason.or_else(|| (!pass).then(|| format!("degree exceeds the a priori bound {a_priori}")));
    Ok(NilpotencyRecord {
        gens: gens.iter().map(|g| render(g)).collect(),
        degree,
        a_priori,
        max_deg,
        longest_nonzero: render(&longest),
        products_tested: tested,
        pass,
        reason,
    })
}

/// Summary of the exhaustive nilpotency run.
#[derive(Clone, Debug, Serialize)]
pub struct LocNilSummary {
    pub max_len: usize,
    pub max_set: usize,
    pub generators: usize,
    pub sets: usize,
    pub max_degree: usize,
    pub failures: Vec<NilpotencyRecord>,
}

/// Runs the search for every set of at most `max_set` (1 or 2) distinct
/// nonzero words of length at most `max_len` containing the extra letter.
pub fn verify_locnil(
    sys: &TildeSystem,
    max_len: usize,
    max_set: usize,
    max_deg: usize,
) -> Result<(VerificationReport, LocNilSummary)> {
    let st = &sys.state;
    if !(1..=2).contains(&max_set) {
        return Err(Error::Invalid("sets of one or two generators only".into()));
    }
    let z = sys.letter();
    let words: Vec<Vec<u8>> = nonzero_words(st, max_len)?.into_iter().filter(|w| w.contains(&z)).collect();
    let mut sets: Vec<Vec<Vec<u8>>> = words.iter().map(|w| vec![w.clone()]).collect();
    if max_set == 2 {
        for (a, u) in words.iter().enumerate() {
            for v in &words[a + 1..] {
                sets.push(vec![u.clone(), v.clone()]);
            }
        }
    }
    let chunk = sets.len().div_ceil(64).max(1);
    let chunks: Vec<&[Vec<Vec<u8>>]> = sets.chunks(chunk).collect();
    let results = crate::par::map(&chunks, |part| -> Result<Vec<NilpotencyRecord>> {
        let mut fi = FactorIndex::new(st);
        part.iter().map(|s| nilpotency_search(&mut fi, s, max_deg)).collect()
    });
    let mut max_degree = 0;
    let mut failures = Vec::new();
    for r in results {
        for rec in r? {
            max_degree = max_degree.max(rec.degree.unwrap_or(0));
            if !rec.pass {
                failures.push(rec);
            }
        }
    }
    let mut rep = VerificationReport::new("local nilpotence", &st.describe(), st.depth());
    rep.push(ClaimRecord::new(
        format!(
            "every set of <= {max_set} nonzero words of length <= {max_len} containing {} is nilpotent within the a priori degree",
            render(&[z])
        ),
        format!("{} of {} sets, max degree {max_degree}", sets.len() - failures.len(), sets.len()),
        format!("a priori {} for length {max_len}", a_priori_degree(max_len)),
        failures.is_empty() && !sets.is_empty(),
    ));
    for f in failures.iter().take(20) {
        rep.push(
            ClaimRecord::new("generator set is nilpotent", f.degree.map_or("none".into(), |e| e.to_string()), f.a_priori, false)
                .with_witness(format!("{{{}}}: {}", f.gens.join(","), f.reason.clone().unwrap_or_default())),
        );
    }
    rep.note(format!("{} generator words, {} sets", words.len(), sets.len()));
    Ok((
        rep,
        LocNilSummary {
            max_len,
            max_set,
            generators: words.len(),
            sets: sets.len(),
            max_degree,
            failures,
        },
    ))
}

/// Pair witnesses over the extended words plus the onto property at every
/// insertion level.
pub fn check_prime_tilde(sys: &TildeSystem, max_len: usize) -> Result<(VerificationReport, PrimenessReport)> {
    let st = &sys.state;
    let pr = check_prime(st, max_len)?;
    let mut rep = primeness_claims(&pr, "extra-letter primeness", &st.describe());
    for ins in &sys.insertions {
        let lower = st.w_words(ins.i)?;
        let onto = check_onto_words(&ins.words, &lower, ins.i);
        let mut c = ClaimRecord::new(format!("X_{} projects onto W~(2^{})", ins.i, ins.i), ins.words.len(), lower.len(), onto.pass)
            .at_level(ins.level);
        if let Some(w) = onto.witness {
            c = c.with_witness(w);
        }
        rep.push(c);
    }
    Ok((rep, pr))
}

/// Size bounds of the extended system against the base, and factor-language
/// inclusion of the base in the extended system for short lengths.
pub fn verify_growth_tilde(sys: &TildeSystem, short_len: usize) -> Result<VerificationReport> {
    let st = &sys.state;
    let top = st.depth();
    let mut rep = VerificationReport::new("extra-letter growth", &st.describe(), top);
    let eng = DimEngine::new(st);
    let lengths: Vec<usize> = (0..=top).map(|n| 1usize << n).collect();
    let dims = eng.dims(&lengths)?;
    let l2 = &sys.l * &sys.l;
    let (num, den) = (l2.numer().abs().to_biguint().unwrap(), l2.denom().to_biguint().unwrap());
    for (n, d) in dims.iter().enumerate() {
        let (wt, ct) = (&st.level(n).w_size, st.c_len(n));
        let (wb, cb) = (&sys.base.level(n).w_size, sys.base.c_len(n));
        let shown = if d.exact { d.upper.to_string() } else { format!("[{}, {}]", d.lower, d.upper) };
        let finer = BigUint::from(2u32) * ((BigUint::one() << n) + 1u32) * wt * &ct;
        rep.push(ClaimRecord::new("dim(2^n) <= 2(2^n+1)|W~(2^n)||C~(2^n)|", &shown, &finer, d.upper <= finer).at_level(n));
        let prod = wt * &ct;
        let base = wb * &cb;
        rep.push(
            ClaimRecord::new(
                "|W~(2^n)||C~(2^n)| <= l^2 |W(2^n)||C(2^n)|",
                &prod,
                format!("{}*{base}", show_ratio(&l2)),
                &prod * &den <= &num * &base,
            )
            .at_level(n),
        );
        let cap = (BigUint::one() << (2 * n + 3)) * st.growth.at_pow2(n + 1)?;
        rep.push(
            ClaimRecord::new(
                "dim(2^n) <= l^2 2^(2n+3) f(2^(n+1))",
                &shown,
                format!("{}*{cap}", show_ratio(&l2)),
                &d.upper * &den <= &num * &cap,
            )
            .at_level(n),
        );
    }
    let base_eng = DimEngine::new(&sys.base);
    for len in 1..=short_len.min(1 << top) {
        let small = base_eng.factor_set(top, len)?;
        let big = eng.factor_set(top, len)?;
        let missing = small.iter().find(|w| !big.contains(*w));
        let mut c = ClaimRecord::new("dim_B0(l) <= dim_B(l) by factor inclusion", small.len(), big.len(), missing.is_none())
            .at_length(len as u64);
        if let Some(w) = missing {
            c = c.with_witness(format!("{} is a base factor only", render(w)));
        }
        rep.push(c);
    }
    rep.note(format!("l = {} bounds prod (1 + eps_i)", show_ratio(&sys.l)));
    Ok(rep)
}

/// Rebuilds the system behind a state of the extra-letter strategy and checks
/// that it reproduces the state.
pub fn rebuild_tilde(st: &ConstructionState) -> Result<TildeSystem> {
    let StrategySpec::Tilde { shift } = st.strategy else {
        return Err(Error::Invalid(format!("strategy {} is not the extra-letter construction", st.strategy)));
    };
    let crate::growth::Family::PlusLetter(inner) = &st.growth.family else {
        return Err(Error::Invalid("growth of an extra-letter state must be plusletter(..)".into()));
    };
    let f = GrowthSpec::new((**inner).clone())?.with_bit_budget(st.growth.bit_budget);
    let sys = build_tilde(&f, st.depth(), &EpsSeq::pow2(shift), &st.limits)?;
    if sys.state != *st {
        return Err(Error::Assertion("the state differs from a fresh extra-letter build".into()));
    }
    Ok(sys)
}
