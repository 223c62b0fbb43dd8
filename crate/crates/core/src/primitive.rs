//! Power insertion. One extension pass adds, at level `n`, the powers
//! `v^(2^t)` of chosen container words `v`; passes repeat with a shrinking
//! `eps` until nothing new appears below the horizon.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::{short_word_count, theta_of};
use crate::prime::{find_pair_witnesses, nonzero_words, PrimenessReport};
use crate::report::{ClaimRecord, VerificationReport};
use crate::words::automata::{Dfa, Transfer};
use crate::words::factors::{DimEngine, FactorIndex};
use crate::words::{contains, render, CSet, ConstructionState, StrategySpec};

/// `eps_a = 1 / 2^(a + shift)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EpsSeq {
    pub shift: u32,
}

impl EpsSeq {
    pub fn pow2(shift: u32) -> Self {
        EpsSeq { shift }
    }

    pub fn at(&self, a: usize) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::one() << (a + self.shift as usize))
    }

    /// `prod (1 + eps_a) <= exp(sum eps_a) = exp(2^(1 - shift))`, which is at
    /// most 2 once the sum is at most 1/2.
    pub fn product_certified(&self) -> bool {
        self.shift >= 2
    }

    /// A rational `l >= prod_a (1 + eps_a)`: the first eight factors exactly,
    /// the tail through `prod (1 + x) <= 1 / (1 - sum x)`.
    pub fn product_bound(&self) -> BigRational {
        const HEAD: usize = 8;
        let one = BigRational::one();
        let mut l = one.clone();
        for a in 0..HEAD {
            l *= &one + self.at(a);
        }
        let tail = self.at(HEAD) * BigRational::from_integer(BigInt::from(2));
        l / (one - tail)
    }
}

/// The container chosen for one word.
#[derive(Clone, Debug, Serialize)]
pub struct Assignment {
    pub w: String,
    pub i: usize,
    pub theta: usize,
    pub v: String,
}

/// What one extension pass did.
#[derive(Clone, Debug, Serialize)]
pub struct PassRecord {
    pub alpha: usize,
    pub eps: String,
    /// `(i, theta(i))` for every `i` inserted below the horizon.
    pub thetas: Vec<(usize, usize)>,
    pub assignments: Vec<Assignment>,
    /// `|X_n|` per level.
    pub x_sizes: Vec<usize>,
    /// Words of `X_n` not already in `C_n`, per level.
    pub inserted: Vec<Vec<String>>,
    pub c_before: Vec<BigUint>,
    pub c_after: Vec<BigUint>,
    pub log: Vec<String>,
}

impl PassRecord {
    pub fn added(&self) -> usize {
        self.inserted.iter().map(|v| v.len()).sum()
    }
}

/// Result of iterating extensions from a base state.
#[derive(Clone, Debug)]
pub struct HatSystem {
    pub base: ConstructionState,
    pub state: ConstructionState,
    pub eps: EpsSeq,
    pub passes: Vec<PassRecord>,
    pub fixpoint: bool,
}

impl HatSystem {
    /// The base state viewed as a system with no insertions.
    pub fn unextended(base: &ConstructionState) -> Self {
        HatSystem {
            base: base.clone(),
            state: base.clone(),
            eps: EpsSeq::pow2(2),
            passes: Vec::new(),
            fixpoint: false,
        }
    }

    pub fn iterations(&self) -> usize {
        self.passes.len()
    }
}

fn pow2_word(v: &[u8], t: usize) -> Vec<u8> {
    v.repeat(1 << t)
}

/// The least word of `W(2^theta)` containing `w`.
pub fn choose_v(st: &ConstructionState, w: &[u8], theta: usize) -> Result<Vec<u8>> {
    let tr = Transfer::new(st, Dfa::contains(w, st.alphabet), theta)?;
    match tr.lex_min_positive(theta)? {
        Some(code) => Ok(st.code_word(theta, &code)),
        None => Err(Error::Assertion(format!(
            "no container at level {theta} for {}",
            render(w)
        ))),
    }
}

/// Words mapped at index `i`: factors of `W(2^theta)` with length in `(2^(i-1), 2^i]`.
fn domain(st: &ConstructionState, i: usize, theta: usize) -> Result<Vec<Vec<u8>>> {
    let eng = DimEngine::new(st);
    let lo = if i == 0 { 1 } else { (1usize << (i - 1)) + 1 };
    let mut out = Vec::new();
    for l in lo..=(1usize << i).min(1 << theta) {
        let mut v: Vec<Vec<u8>> = eng.factor_set(theta, l)?.into_iter().collect();
        v.sort_unstable();
        out.extend(v);
    }
    Ok(out)
}

/// The sets `X_n` for `n < depth`, with the assignments that produced them.
pub fn build_x(st: &ConstructionState, eps: &BigRational) -> Result<(Vec<BTreeSet<Vec<u8>>>, Vec<(usize, usize)>, Vec<Assignment>, Vec<String>)> {
    let top = st.depth();
    let mut x: Vec<BTreeSet<Vec<u8>>> = vec![BTreeSet::new(); top];
    let mut thetas = Vec::new();
    let mut assignments = Vec::new();
    let mut log = Vec::new();
    for i in 0.. {
        if i > top {
            break;
        }
        let theta = match theta_of(&st.growth, st.alphabet as u32, eps, i, top) {
            Ok(t) if t < top => t,
            Ok(t) => {
                log.push(format!("theta({i}) = {t} leaves no level below the horizon; skipped"));
                break;
            }
            Err(Error::HorizonExhausted(_)) => {
                log.push(format!("theta({i}) lies beyond the horizon; skipped"));
                break;
            }
            Err(e) => return Err(e),
        };
        thetas.push((i, theta));
        let dom = domain(st, i, theta)?;
        let vs: Vec<Result<Vec<u8>>> = crate::par::map(&dom, |w| choose_v(st, w, theta));
        for (w, v) in dom.iter().zip(vs) {
            let v = v?;
            for n in theta..top {
                x[n].insert(pow2_word(&v, n - theta));
            }
            assignments.push(Assignment {
                w: render(w),
                i,
                theta,
                v: render(&v),
            });
        }
    }
    // |X_n| against the count of all words of length at most 2^i for the largest i in play
    for (n, xn) in x.iter().enumerate() {
        if let Some(&(i, _)) = thetas.iter().rev().find(|&&(_, th)| th <= n) {
            let bound = short_word_count(st.alphabet as u32, i)?;
            if BigUint::from(xn.len()) > bound {
                return Err(Error::Assertion(format!("|X_{n}| = {} exceeds {bound}", xn.len())));
            }
        }
    }
    Ok((x, thetas, assignments, log))
}

/// One extension pass `W -> W'` with parameter `eps`.
pub fn extend(st: &ConstructionState, eps: &BigRational, alpha: usize) -> Result<(ConstructionState, PassRecord)> {
    let top = st.depth();
    if !st.explicit_below(top) {
        return Err(Error::Capacity("power insertion needs every C level stored explicitly".into()));
    }
    let (x, thetas, assignments, log) = build_x(st, eps)?;
    let (p, q) = (eps.numer().to_biguint().unwrap(), eps.denom().to_biguint().unwrap());
    let mut out = ConstructionState::new(st.alphabet, st.growth.clone(), st.strategy.clone(), st.limits.clone());
    let mut remap: Vec<Vec<u32>> = Vec::new();
    let mut inserted = Vec::new();
    let mut x_sizes = Vec::new();
    for n in 0..top {
        let old = st.explicit(n).unwrap();
        let stride = n + 1;
        let mut codes: Vec<Vec<u32>> = old
            .chunks_exact(stride)
            .map(|c| {
                let mut c = c.to_vec();
                for (pos, d) in c[..n].iter_mut().enumerate() {
                    *d = remap[n - 1 - pos][*d as usize];
                }
                c
            })
            .collect();
        let before = codes.len();
        let have: HashSet<Vec<u32>> = codes.iter().cloned().collect();
        let mut new_words = Vec::new();
        for w in &x[n] {
            let code = out.parse(n, w).ok_or_else(|| {
                Error::Assertion(format!("inserted power {} is not a word of the extended level {n}", render(w)))
            })?;
            if !have.contains(&code) {
                codes.push(code);
                new_words.push(render(w));
            }
        }
        codes.sort_unstable();
        codes.dedup();
        if q.clone() * BigUint::from(codes.len()) > (&p + &q) * BigUint::from(before) {
            return Err(Error::Budget(format!(
                "|C'_{n}| = {} exceeds (1 + {eps}) * {before}",
                codes.len()
            )));
        }
        let index: std::collections::HashMap<&[u32], u32> =
            codes.iter().enumerate().map(|(i, c)| (c.as_slice(), i as u32)).collect();
        let map: Vec<u32> = old
            .chunks_exact(stride)
            .map(|c| {
                let mut c = c.to_vec();
                for (pos, d) in c[..n].iter_mut().enumerate() {
                    *d = remap[n - 1 - pos][*d as usize];
                }
                index[c.as_slice()]
            })
            .collect();
        remap.push(map);
        x_sizes.push(x[n].len());
        inserted.push(new_words);
        let c_size = BigUint::from(codes.len());
        out.push_level(CSet::Explicit(codes.concat()), c_size);
    }
    out.set_top_c_size(st.level(top).c_size.clone());
    for n in 0..=top {
        // |W'_n| <= (1 + eps)^n |W_n|
        let lhs = q.pow(n as u32) * &out.level(n).w_size;
        let rhs = (&p + &q).pow(n as u32) * &st.level(n).w_size;
        if lhs > rhs {
            return Err(Error::Budget(format!("|W'_{n}| exceeds (1 + {eps})^{n} |W_{n}|")));
        }
    }
    let rec = PassRecord {
        alpha,
        eps: eps.to_string(),
        thetas,
        assignments,
        x_sizes,
        inserted,
        c_before: (0..top).map(|n| st.c_len(n)).collect(),
        c_after: (0..top).map(|n| out.c_len(n)).collect(),
        log,
    };
    Ok((out, rec))
}

/// Repeats [`extend`] with `eps_0, eps_1, ...` until a pass adds nothing.
pub fn iterate_to_fixpoint(base: &ConstructionState, eps: &EpsSeq, cap: usize) -> Result<HatSystem> {
    let mut cur = base.clone();
    cur.strategy = StrategySpec::Primitive { shift: eps.shift };
    let mut passes = Vec::new();
    let mut product = BigRational::one();
    for alpha in 0..cap {
        let e = eps.at(alpha);
        product *= BigRational::one() + &e;
        if product > BigRational::from_integer(BigInt::from(2)) {
            return Err(Error::Budget(format!("partial product of (1 + eps) exceeds 2 at pass {alpha}")));
        }
        let (next, rec) = extend(&cur, &e, alpha)?;
        let done = rec.added() == 0;
        passes.push(rec);
        cur = next;
        if done {
            cur.log.push(format!("fixpoint after {} passes", passes.len()));
            return Ok(HatSystem {
                base: base.clone(),
                state: cur,
                eps: *eps,
                passes,
                fixpoint: true,
            });
        }
    }
    Err(Error::Budget(format!("no fixpoint within {cap} passes")))
}

/// Every `C` word, grouped by its primitive dyadic root.
pub struct PowerIndex {
    /// `(root, exponents a with root^(2^a) a C word)`, most exponents first
    roots: Vec<(Vec<u8>, BTreeSet<usize>)>,
}

impl PowerIndex {
    pub fn new(st: &ConstructionState) -> Result<Self> {
        let mut roots: BTreeMap<Vec<u8>, BTreeSet<usize>> = BTreeMap::new();
        for n in 0..st.depth() {
            for z in st.c_words(n)? {
                let (mut u, mut a) = (&z[..], 0);
                while u.len() % 2 == 0 && u[..u.len() / 2] == u[u.len() / 2..] {
                    u = &u[..u.len() / 2];
                    a += 1;
                }
                roots.entry(u.to_vec()).or_default().insert(a);
            }
        }
        let mut roots: Vec<_> = roots.into_iter().collect();
        roots.sort_by(|x, y| y.1.len().cmp(&x.1.len()).then_with(|| x.0.len().cmp(&y.0.len())).then_with(|| x.0.cmp(&y.0)));
        Ok(PowerIndex { roots })
    }

    /// Whether `z` is a `C` word of some level.
    pub fn in_c(&self, st: &ConstructionState, z: &[u8]) -> bool {
        let n = z.len().trailing_zeros() as usize;
        z.len().is_power_of_two() && n < st.depth() && st.is_c_word(n, z)
    }

    /// The `v` containing `w` with the most exponents `t` such that `v^(2^t)`
    /// is a `C` word; ties go to the shorter, then lexicographically least, `v`.
    pub fn best_v(&self, w: &[u8]) -> Option<(Vec<u8>, Vec<usize>)> {
        let mut best: Option<(Vec<u8>, Vec<usize>)> = None;
        for (u, exps) in &self.roots {
            if best.as_ref().is_some_and(|b| exps.len() < b.1.len()) {
                break;
            }
            let top = *exps.iter().next_back().unwrap();
            let Some(b) = (0..=top).find(|&b| contains(&pow2_word(u, b), w)) else {
                continue;
            };
            let ts: Vec<usize> = exps.iter().filter(|&&a| a >= b).map(|&a| a - b).collect();
            let v = pow2_word(u, b);
            let better = match &best {
                None => true,
                Some((bv, bt)) => (ts.len(), std::cmp::Reverse(v.len()), std::cmp::Reverse(&v)) > (bt.len(), std::cmp::Reverse(bv.len()), std::cmp::Reverse(bv)),
            };
            if better {
                best = Some((v, ts));
            }
        }
        best
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyRecord {
    pub w: String,
    pub v: Option<String>,
    /// `t` with `v^(2^t)` a `C` word, every one up to the horizon.
    pub exponents: Vec<usize>,
    pub pass: bool,
}

/// Whether `w` lies in some `v` with at least `min_witnesses` dyadic powers in the `C` sets.
pub fn check_property(index: &PowerIndex, w: &[u8], min_witnesses: usize) -> PropertyRecord {
    let found = index.best_v(w);
    let (v, exponents) = match found {
        Some((v, t)) => (Some(render(&v)), t),
        None => (None, Vec::new()),
    };
    PropertyRecord {
        w: render(w),
        pass: exponents.len() >= min_witnesses,
        v,
        exponents,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NonNilpotentRecord {
    pub w: String,
    pub v: Option<String>,
    /// `(t, level)` with `v^(2^t)` a factor of some `W(2^level)` word.
    pub powers: Vec<(usize, usize)>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Longest power tested through the factor index when no `C` word certifies it.
const DIRECT_TEST_LEN: usize = 64;

/// Exhibits `v` containing `w` with `v^(2^t)` nonzero for every `t` that fits
/// the horizon. A power is certified by a `C` word `u^(2^a)` it is a prefix
/// of, by parsing it as a `W` word, otherwise by the factor index if it is short.
pub fn check_nonnilpotent_witness(hat: &HatSystem, index: &PowerIndex, w: &[u8]) -> Result<NonNilpotentRecord> {
    let st = &hat.state;
    let Some((v, exps)) = index.best_v(w) else {
        let reason = Some("no C word power contains w".to_string());
        return Ok(NonNilpotentRecord { w: render(w), v: None, powers: Vec::new(), pass: false, reason });
    };
    let top_exp = exps.iter().copied().max().unwrap_or(0);
    let mut fi = FactorIndex::new(st);
    let mut powers = Vec::new();
    let mut reason = None;
    let mut t = 0;
    while v.len() << t <= 1 << st.depth() {
        let len = v.len() << t;
        let level = if t <= top_exp {
            // prefix of the C word v^(2^top_exp)
            Some(ceil_level(v.len() << top_exp))
        } else if len.is_power_of_two() && st.parse(ceil_level(len), &pow2_word(&v, t)).is_some() {
            Some(ceil_level(len))
        } else if len <= DIRECT_TEST_LEN {
            fi.witness_level(&pow2_word(&v, t))?
        } else {
            reason = Some(format!("v^(2^{t}) has no C word certificate and is too long to test directly"));
            break;
        };
        match level {
            Some(m) => powers.push((t, m)),
            None => {
                reason = Some(format!("v^(2^{t}) is zero at the horizon"));
                break;
            }
        }
        t += 1;
    }
    Ok(NonNilpotentRecord { w: render(w), v: Some(render(&v)), powers, pass: reason.is_none(), reason })
}

fn ceil_level(len: usize) -> usize {
    crate::words::ceil_log2(len as u64)
}

/// For every factor `w` of length at most `max_len` of `W(2^n)`, some level
/// `n' > n` below the horizon has a `C` word containing `w`.
pub fn check_promotion(st: &ConstructionState, max_len: usize) -> Result<VerificationReport> {
    let top = st.depth();
    let mut rep = VerificationReport::new("factor promotion", &st.describe(), top);
    let mut c_factors: Vec<HashSet<Vec<u8>>> = Vec::new();
    for n in 0..top {
        let mut set = HashSet::new();
        for z in st.c_words(n)? {
            for l in 1..=max_len.min(z.len()) {
                for win in z.windows(l) {
                    set.insert(win.to_vec());
                }
            }
        }
        c_factors.push(set);
    }
    let eng = DimEngine::new(st);
    // levels with a higher C level below the horizon
    for n in 0..top.saturating_sub(1) {
        let mut missing = Vec::new();
        let mut total = 0usize;
        for l in 1..=max_len.min(1 << n) {
            for w in eng.factor_set(n, l)? {
                total += 1;
                if !(n + 1..top).any(|m| c_factors[m].contains(&w)) {
                    missing.push(render(&w));
                }
            }
        }
        missing.sort();
        let mut c = ClaimRecord::new(
            "factors of W(2^n) reappear inside a higher C level",
            format!("{} of {total} promoted", total - missing.len()),
            format!("levels {}..{}", n + 1, top - 1),
            missing.is_empty(),
        )
        .at_level(n);
        if let Some(w) = missing.first() {
            c = c.with_witness(format!("{w} (and {} more)", missing.len() - 1));
        }
        rep.push(c);
    }
    rep.note("the top two levels have no higher C level inside the horizon and are not checked");
    Ok(rep)
}

/// Factor promotion plus the pairwise witness search over the extended system.
pub fn check_prime_hat(hat: &HatSystem, max_len: usize) -> Result<(VerificationReport, PrimenessReport)> {
    let st = &hat.state;
    let rep = check_promotion(st, max_len)?;
    let words = nonzero_words(st, max_len)?;
    let pairs = find_pair_witnesses(st, &words, st.depth(), st.limits.scan_letters)?;
    Ok((rep, pairs))
}

/// The size and dimension bounds of the extended system against its base.
pub fn verify_growth_hat(hat: &HatSystem) -> Result<VerificationReport> {
    let (st, base) = (&hat.state, &hat.base);
    let top = st.depth();
    let mut rep = VerificationReport::new("extended growth", &st.describe(), top);
    for n in 0..top {
        let (c, c0) = (st.c_len(n), base.c_len(n));
        rep.push(ClaimRecord::new("|C^(2^n)| <= 2|C(2^n)|", &c, 2u32 * &c0, c <= 2u32 * &c0).at_level(n));
    }
    let eng = DimEngine::new(st);
    let lengths: Vec<usize> = (0..=top).map(|n| 1usize << n).collect();
    let dims = eng.dims(&lengths)?;
    for (n, d) in dims.iter().enumerate() {
        let (w, w0) = (&st.level(n).w_size, &base.level(n).w_size);
        let cap = (BigUint::one() << n) * w0;
        rep.push(ClaimRecord::new("|W^(2^n)| <= 2^n |W(2^n)|", w, &cap, w <= &cap).at_level(n));
        let upper = (BigUint::one() << (3 * n + 4)) * st.growth.at_pow2(n + 1)?;
        let shown = if d.exact { d.lower.to_string() } else { format!("[{}, {}]", d.lower, d.upper) };
        rep.push(ClaimRecord::new("dim(2^n) <= 2^(3n+4) f(2^(n+1))", &shown, &upper, d.upper <= upper).at_level(n));
        let f = st.growth.at_pow2(n)?;
        rep.push(ClaimRecord::new("f(2^n) <= dim(2^n)", &f, &shown, f <= d.lower).at_level(n));
    }
    Ok(rep)
}

/// Fixpoint, size bounds, and the per-factor properties for all nonzero words
/// of length at most `max_len`.
pub fn verify_primitive(hat: &HatSystem, max_len: usize, min_witnesses: usize) -> Result<VerificationReport> {
    let st = &hat.state;
    let mut rep = VerificationReport::new("primitive system", &st.describe(), st.depth());
    rep.push(ClaimRecord::new(
        "iteration reaches a fixpoint",
        format!("{} passes", hat.iterations()),
        if hat.fixpoint { "fixpoint" } else { "no fixpoint" },
        hat.fixpoint,
    ));
    rep.merge(verify_growth_hat(hat)?);
    let index = PowerIndex::new(st)?;
    let words = nonzero_words(st, max_len)?;
    let props: Vec<PropertyRecord> = words.iter().map(|w| check_property(&index, w, min_witnesses)).collect();
    let bad: Vec<&PropertyRecord> = props.iter().filter(|p| !p.pass).collect();
    rep.push(ClaimRecord::new(
        format!("every nonzero word of length <= {max_len} lies in some v with >= {min_witnesses} dyadic powers in the C sets"),
        format!("{} of {}", props.len() - bad.len(), props.len()),
        props.len(),
        bad.is_empty(),
    ));
    for p in bad.iter().take(20) {
        rep.push(
            ClaimRecord::new("dyadic powers", p.exponents.len(), min_witnesses, false)
                .with_witness(format!("w = {}, v = {}", p.w, p.v.as_deref().unwrap_or("-"))),
        );
    }
    let nn: Vec<Result<NonNilpotentRecord>> = crate::par::map(&words, |w| check_nonnilpotent_witness(hat, &index, w));
    let mut nn_bad = Vec::new();
    for r in nn {
        let r = r?;
        if !r.pass {
            nn_bad.push(r);
        }
    }
    rep.push(ClaimRecord::new(
        format!("every nonzero word of length <= {max_len} lies in a non-nilpotent v"),
        format!("{} of {}", words.len() - nn_bad.len(), words.len()),
        words.len(),
        nn_bad.is_empty(),
    ));
    for r in nn_bad.iter().take(20) {
        rep.push(
            ClaimRecord::new("non-nilpotent witness", &r.w, r.v.as_deref().unwrap_or("-"), false)
                .with_witness(r.reason.clone().unwrap_or_default()),
        );
    }
    rep.note("infinitely many exponents are certified as every exponent up to the horizon; only dyadic exponents are produced by the construction");
    Ok(rep)
}

/// Rebuilds the extension passes behind a state of the primitive strategy and
/// checks that they reproduce it.
pub fn rebuild_hat(st: &ConstructionState, cap: usize) -> Result<HatSystem> {
    let StrategySpec::Primitive { shift } = st.strategy else {
        return Err(Error::Invalid(format!("strategy {} is not the power extension", st.strategy)));
    };
    let base = crate::words::build(&st.growth, st.depth(), &StrategySpec::LexFirst, &st.limits)?;
    let hat = iterate_to_fixpoint(&base, &EpsSeq::pow2(shift), cap)?;
    if hat.state != *st {
        return Err(Error::Assertion("the state differs from a fresh power extension".into()));
    }
    Ok(hat)
}
