//! Growth sandwich, entropy samples and projection checks for built states.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::factors::{DimEngine, DimValue};
use super::state::ConstructionState;
use crate::error::Result;
use crate::report::{ClaimRecord, VerificationReport};

/// `f(2^n) <= dim(2^n) <= 2^(2n+3) f(2^(n+1))` and
/// `dim(2^n) <= 2 (2^n + 1) |W(2^n)| |C(2^n)|` for every `n <= N`.
pub fn verify_growth_bounds(st: &ConstructionState) -> Result<VerificationReport> {
    let n_max = st.depth();
    let mut rep = VerificationReport::new("growth bounds", &st.describe(), n_max);
    let eng = DimEngine::new(st);
    let lengths: Vec<usize> = (0..=n_max).map(|n| 1usize << n).collect();
    let dims = eng.dims(&lengths)?;
    for (n, d) in dims.iter().enumerate() {
        push_bounds(st, &mut rep, n, d)?;
    }
    rep.note("dimensions are exact where listed as such, otherwise certified brackets [lower, upper] from the split decomposition");
    Ok(rep)
}

fn show(d: &DimValue) -> String {
    if d.exact {
        d.lower.to_string()
    } else {
        format!("[{}, {}]", d.lower, d.upper)
    }
}

fn push_bounds(st: &ConstructionState, rep: &mut VerificationReport, n: usize, d: &DimValue) -> Result<()> {
    let f = st.growth.at_pow2(n)?;
    rep.push(ClaimRecord::new("f(2^n) <= dim(2^n)", &f, show(d), f <= d.lower).at_level(n));
    let upper = (BigUint::one() << (2 * n + 3)) * st.growth.at_pow2(n + 1)?;
    rep.push(ClaimRecord::new("dim(2^n) <= 2^(2n+3) f(2^(n+1))", show(d), &upper, d.upper <= upper).at_level(n));
    let finer = BigUint::from(2u32) * ((BigUint::one() << n) + 1u32) * &st.level(n).w_size * st.c_len(n);
    rep.push(ClaimRecord::new("dim(2^n) <= 2(2^n+1)|W(2^n)||C(2^n)|", show(d), &finer, d.upper <= finer).at_level(n));
    Ok(())
}

/// One sampled root `dim(n)^(1/n)`, as decimal bounds with six places.
#[derive(Clone, Debug, Serialize)]
pub struct EntropySample {
    pub n: u64,
    pub root_lower: String,
    pub root_upper: String,
    pub exact_dim: bool,
}

const DIGITS: u32 = 6;

fn decimal_root(x: &BigUint, n: u32, round_up: bool) -> String {
    let scale = BigUint::from(10u32).pow(DIGITS);
    let big = x * scale.pow(n);
    let mut r = big.nth_root(n);
    if round_up && r.pow(n) != big {
        r += 1u32;
    }
    let int = &r / &scale;
    let frac = &r % &scale;
    format!("{int}.{:0>width$}", frac.to_string(), width = DIGITS as usize)
}

/// `dim(n)^(1/n)` enclosures for the given lengths.
pub fn entropy_samples(st: &ConstructionState, lengths: &[usize]) -> Result<Vec<EntropySample>> {
    let eng = DimEngine::new(st);
    let dims = eng.dims(lengths)?;
    Ok(dims
        .iter()
        .map(|d| EntropySample {
            n: d.length,
            root_lower: decimal_root(&d.lower, d.length as u32, false),
            root_upper: decimal_root(&d.upper, d.length as u32, true),
            exact_dim: d.exact,
        })
        .collect())
}

/// The entropy checks: `f(n) <= dim(2n)` at every `n` with `2n <= 2^N`, and
/// `1 < dim(l)^(1/l) <= (p/q)` at the sampled lengths.
pub fn verify_entropy(
    st: &ConstructionState,
    sample_lengths: &[usize],
    ceiling: (u32, u32),
) -> Result<(VerificationReport, Vec<EntropySample>)> {
    let n_max = st.depth();
    let mut rep = VerificationReport::new("entropy", &st.describe(), n_max);
    let eng = DimEngine::new(st);
    let half = 1usize << n_max.saturating_sub(1);
    let chain: Vec<usize> = (1..=half).map(|n| 2 * n).collect();
    let dims = eng.dims(&chain)?;
    for (i, d) in dims.iter().enumerate() {
        let n = i + 1;
        let f = st.growth.eval(n as u64)?;
        let ok = f <= d.lower;
        if !ok || n.is_power_of_two() {
            rep.push(ClaimRecord::new("f(n) <= dim(2n)", &f, show(d), ok).at_length(n as u64));
        }
    }
    rep.note(format!("f(n) <= dim(2n) checked at every n in 1..={half}; passing non-dyadic n are not listed individually"));
    let samples = entropy_samples(st, sample_lengths)?;
    let sdims = eng.dims(sample_lengths)?;
    let (p, q) = ceiling;
    for d in &sdims {
        let l = d.length as u32;
        let above_one = d.lower > BigUint::one();
        let below = BigUint::from(q).pow(l) * &d.upper <= BigUint::from(p).pow(l);
        rep.push(
            ClaimRecord::new(
                format!("1 < dim(l)^(1/l) <= {p}/{q}"),
                show(d),
                format!("(1, ({p}/{q})^{l}]"),
                above_one && below,
            )
            .at_length(d.length),
        );
    }
    rep.note("the limsup defining the entropy is only sampled up to the horizon; no limit is certified");
    Ok((rep, samples))
}

/// Outcome of a projection-onto check.
#[derive(Clone, Debug, Serialize)]
pub struct OntoVerdict {
    pub pass: bool,
    /// A word of the lower level with no preimage, or a projected word outside it.
    pub witness: Option<String>,
}

/// Whether the suffixes of length `2^m` of `upper` are exactly `lower`.
pub fn check_onto_words(upper: &[Vec<u8>], lower: &[Vec<u8>], m: usize) -> OntoVerdict {
    let l = 1usize << m;
    let image: HashSet<&[u8]> = upper.iter().map(|w| &w[w.len() - l..]).collect();
    let target: HashSet<&[u8]> = lower.iter().map(|w| w.as_slice()).collect();
    if let Some(w) = target.iter().find(|w| !image.contains(*w)) {
        return OntoVerdict {
            pass: false,
            witness: Some(format!("{} has no preimage", super::render(w))),
        };
    }
    if let Some(w) = image.iter().find(|w| !target.contains(*w)) {
        return OntoVerdict {
            pass: false,
            witness: Some(format!("{} is not in the lower level", super::render(w))),
        };
    }
    OntoVerdict { pass: true, witness: None }
}

/// Projection from level `m_prime` onto level `m`. Lists words, so only small levels.
pub fn check_pi_onto(st: &ConstructionState, m_prime: usize, m: usize) -> Result<OntoVerdict> {
    if m > m_prime {
        return Ok(OntoVerdict {
            pass: false,
            witness: Some(format!("m = {m} exceeds m' = {m_prime}")),
        });
    }
    if m == m_prime {
        return Ok(OntoVerdict { pass: true, witness: None });
    }
    if (m..m_prime).any(|t| st.c_len(t).is_zero()) {
        return Ok(OntoVerdict {
            pass: false,
            witness: Some("an intermediate C level is empty".into()),
        });
    }
    let upper = st.w_words(m_prime)?;
    let lower = st.w_words(m)?;
    Ok(check_onto_words(&upper, &lower, m))
}
