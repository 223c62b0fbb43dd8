use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, RandBigInt};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::state::{radix_product, unrank, CSet, ConstructionState, Limits};
use crate::error::{Error, Result};
use crate::growth::{level_sizes, GrowthSpec, SizeTable};

/// How `C(2^n)` is picked from `W(2^n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategySpec {
    LexFirst,
    SeededRandom { seed: u64 },
    /// Lex-first, except that at level `mu(j)` the set also projects onto `W(2^j)`.
    Prime,
    /// Lex-first among words that do not end in (and so never contain) `letter`.
    NonPrime { letter: u8 },
    /// Iterated power-root extension of a lex-first build; `eps_a = 1/2^(a + shift)`.
    Primitive { shift: u32 },
    /// Extra-letter construction over a lex-first base; `eps_i = 1/2^(i + shift)`.
    Tilde { shift: u32 },
}

impl StrategySpec {
    pub fn is_base(&self) -> bool {
        !matches!(self, StrategySpec::Primitive { .. } | StrategySpec::Tilde { .. })
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::LexFirst => write!(f, "lex-first"),
            StrategySpec::SeededRandom { seed } => write!(f, "seeded-random:seed={seed}"),
            StrategySpec::Prime => write!(f, "prime"),
            StrategySpec::NonPrime { letter } => write!(f, "nonprime:letter={}", letter + 1),
            StrategySpec::Primitive { shift } => write!(f, "primitive:eps=pow2:{shift}"),
            StrategySpec::Tilde { shift } => write!(f, "tilde:eps=pow2:{shift}"),
        }
    }
}

fn param<'a>(rest: Option<&'a str>, key: &str) -> Option<&'a str> {
    rest?
        .split(',')
        .filter_map(|kv| kv.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim())
}

fn parse_shift(rest: Option<&str>, default: u32) -> Result<u32> {
    match param(rest, "eps") {
        None => Ok(default),
        Some(v) => v
            .strip_prefix("pow2:")
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::Parse(format!("eps sequence must look like pow2:<k>, got {v:?}"))),
    }
}

impl FromStr for StrategySpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r)),
            None => (s.trim(), None),
        };
        match kind {
            "lex-first" | "plain" => Ok(StrategySpec::LexFirst),
            "seeded-random" | "random" => {
                let seed = param(rest, "seed").unwrap_or("0");
                Ok(StrategySpec::SeededRandom {
                    seed: seed.parse().map_err(|_| Error::Parse(format!("bad seed {seed:?}")))?,
                })
            }
            "prime" => Ok(StrategySpec::Prime),
            "nonprime" => {
                let l = param(rest, "letter").unwrap_or("1");
                let l: u8 = l.parse().map_err(|_| Error::Parse(format!("bad letter {l:?}")))?;
                if l == 0 {
                    return Err(Error::Parse("letters are numbered from 1".into()));
                }
                Ok(StrategySpec::NonPrime { letter: l - 1 })
            }
            "primitive" => Ok(StrategySpec::Primitive {
                shift: parse_shift(rest, 2)?,
            }),
            "tilde" => Ok(StrategySpec::Tilde {
                shift: parse_shift(rest, 0)?,
            }),
            other => Err(Error::Parse(format!("unknown strategy {other:?}"))),
        }
    }
}

/// Builds levels `0..=depth`. Primitive and tilde strategies are delegated to
/// their modules.
pub fn build(
    growth: &GrowthSpec,
    depth: usize,
    strategy: &StrategySpec,
    limits: &Limits,
) -> Result<ConstructionState> {
    match strategy {
        StrategySpec::Primitive { shift } => {
            let base = build(growth, depth, &StrategySpec::LexFirst, limits)?;
            let sys = crate::primitive::iterate_to_fixpoint(&base, &crate::primitive::EpsSeq::pow2(*shift), 64)?;
            return Ok(sys.state);
        }
        StrategySpec::Tilde { shift } => {
            let sys = crate::locnil::build_tilde(growth, depth, &crate::primitive::EpsSeq::pow2(*shift), limits)?;
            return Ok(sys.state);
        }
        _ => {}
    }
    let alphabet = growth.d() as u8;
    let mut state = ConstructionState::new(alphabet, growth.clone(), strategy.clone(), limits.clone());
    extend(&mut state, depth)?;
    Ok(state)
}

/// Extends a base-strategy state to a larger depth. The result equals a direct
/// build at that depth.
pub fn extend(state: &mut ConstructionState, depth: usize) -> Result<()> {
    if !state.strategy.is_base() {
        return Err(Error::Invalid(format!(
            "strategy {} cannot be extended in place; rebuild instead",
            state.strategy
        )));
    }
    if depth < state.depth() {
        return Err(Error::Invalid("cannot shrink a state".into()));
    }
    let sizes = level_sizes(&state.growth, depth)?;
    let mu = match state.strategy {
        StrategySpec::Prime => Some(crate::growth::mu_table(&state.growth, &sizes, depth)?.0),
        _ => None,
    };
    while state.depth() < depth {
        let n = state.depth();
        let k = sizes.c_size[n].clone();
        let c = select(state, n, &k, &sizes, mu.as_deref())?;
        state.push_level(c, k.clone());
        state.log.push(format!("level {n}: |C| = {k}"));
    }
    let top = state.depth();
    state.levels[top].c_size = sizes.c_size[top].clone();
    state.clear_top();
    Ok(())
}

fn select(
    state: &ConstructionState,
    n: usize,
    k: &BigUint,
    sizes: &SizeTable,
    mu: Option<&[usize]>,
) -> Result<CSet> {
    match &state.strategy {
        StrategySpec::LexFirst => lex_first(state, n, k, None),
        StrategySpec::SeededRandom { seed } => seeded_random(state, n, k, *seed),
        StrategySpec::Prime => crate::prime::prime_select(state, n, k, sizes, mu.unwrap_or(&[])),
        StrategySpec::NonPrime { letter } => lex_first(state, n, k, Some(*letter)),
        _ => unreachable!("extended strategies are built elsewhere"),
    }
}

/// Whether `k` codes of level `n` fit in the explicit-level memory budget.
pub fn fits_explicit(state: &ConstructionState, n: usize, k: &BigUint) -> bool {
    let bytes = k * BigUint::from((n as u64 + 1) * 4);
    bytes <= BigUint::from(state.limits.mem_bytes) && state.explicit_below(n)
}

/// The first `k` words of `W_n` in lexicographic order, skipping words that
/// contain `exclude`.
pub fn lex_first(state: &ConstructionState, n: usize, k: &BigUint, exclude: Option<u8>) -> Result<CSet> {
    let available = state.filtered_count(n, exclude)?;
    if k > &available {
        return Err(Error::Infeasible {
            level: n,
            need: k.to_string(),
            available: available.to_string(),
        });
    }
    if !fits_explicit(state, n, k) {
        state.check_segment_filter(n, exclude)?;
        return Ok(CSet::Segment {
            count: k.clone(),
            exclude,
        });
    }
    let domains = state.filtered_domains(n, exclude)?;
    let k = k.to_usize().unwrap();
    Ok(CSet::Explicit(first_of_product(&domains, k, |_| false)))
}

/// The first `k` tuples of the product of `domains`, in lex order, skipping
/// those for which `skip` holds.
pub fn first_of_product<F: Fn(&[u32]) -> bool>(domains: &[Vec<u32>], k: usize, skip: F) -> Vec<u32> {
    let stride = domains.len();
    let mut out = Vec::with_capacity(k * stride);
    if k == 0 || domains.iter().any(|d| d.is_empty()) {
        return out;
    }
    let mut pos = vec![0usize; stride];
    let mut code: Vec<u32> = domains.iter().map(|d| d[0]).collect();
    let mut taken = 0;
    loop {
        if !skip(&code) {
            out.extend_from_slice(&code);
            taken += 1;
            if taken == k {
                break;
            }
        }
        let mut p = stride;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            pos[p] += 1;
            if pos[p] < domains[p].len() {
                code[p] = domains[p][pos[p]];
                break;
            }
            pos[p] = 0;
            code[p] = domains[p][0];
        }
    }
    out
}

/// `k` distinct words of `W_n` chosen uniformly with a per-level ChaCha stream.
pub fn seeded_random(state: &ConstructionState, n: usize, k: &BigUint, seed: u64) -> Result<CSet> {
    let available = state.filtered_count(n, None)?;
    if k > &available {
        return Err(Error::Infeasible {
            level: n,
            need: k.to_string(),
            available: available.to_string(),
        });
    }
    if !fits_explicit(state, n, k) {
        return Err(Error::Capacity(format!(
            "seeded-random selection at level {n} needs {k} explicit words"
        )));
    }
    let k = k.to_usize().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    // Floyd's sampling of k distinct ranks below `available`.
    let mut chosen: HashSet<BigUint> = HashSet::with_capacity(k);
    let mut j = &available - BigUint::from(k);
    while j < available {
        let t = rng.gen_biguint_below(&(&j + 1u32));
        if !chosen.insert(t) {
            chosen.insert(j.clone());
        }
        j += 1u32;
    }
    let mut ranks: Vec<BigUint> = chosen.into_iter().collect();
    ranks.sort();
    let radix: Vec<BigUint> = state.radices(n)?.into_iter().map(BigUint::from).collect();
    let mut out = Vec::with_capacity(k * (n + 1));
    for r in &ranks {
        for d in unrank(r, &radix) {
            out.push(d.to_u32().unwrap());
        }
    }
    Ok(CSet::Explicit(out))
}

impl ConstructionState {
    /// Number of `W_n` words avoiding `exclude`.
    pub fn filtered_count(&self, n: usize, exclude: Option<u8>) -> Result<BigUint> {
        if exclude.is_none() {
            return Ok(self.levels[n].w_size.clone());
        }
        if self.explicit_below(n) {
            let d = self.filtered_domains(n, exclude)?;
            let radix: Vec<BigUint> = d.iter().map(|x| BigUint::from(x.len())).collect();
            return Ok(radix_product(&radix));
        }
        self.check_segment_filter(n, exclude)?;
        Ok(self.filtered_w_size(n, exclude))
    }

    /// Per digit, the allowed values of a `W_n` code avoiding `exclude`.
    pub fn filtered_domains(&self, n: usize, exclude: Option<u8>) -> Result<Vec<Vec<u32>>> {
        let counts = match exclude {
            Some(x) => Some(self.letter_counts(x, n)?),
            None => None,
        };
        let mut out = Vec::with_capacity(n + 1);
        for t in (0..n).rev() {
            let len = self.c_count(t)? as u32;
            out.push(match &counts {
                Some(c) => (0..len).filter(|&i| c[t][i as usize] == 0).collect(),
                None => (0..len).collect(),
            });
        }
        out.push(
            (0..self.alphabet as u32)
                .filter(|&x| Some(x as u8) != exclude)
                .collect(),
        );
        Ok(out)
    }

    /// For levels `0..n`, the number of occurrences of `letter` in each `C` word.
    pub fn letter_counts(&self, letter: u8, n: usize) -> Result<Vec<Vec<u32>>> {
        let mut out: Vec<Vec<u32>> = Vec::new();
        for t in 0..n {
            let codes = self.explicit_or_err(t)?;
            let v: Vec<u32> = codes
                .chunks_exact(t + 1)
                .map(|code| {
                    let mut c = (code[t] as u8 == letter) as u32;
                    for (p, &d) in code[..t].iter().enumerate() {
                        c += out[t - 1 - p][d as usize];
                    }
                    c
                })
                .collect();
            out.push(v);
        }
        Ok(out)
    }

    /// A symbolic segment over a restricted product is only well defined when
    /// every lower `C` level already avoids the excluded letter.
    pub(crate) fn check_segment_filter(&self, n: usize, exclude: Option<u8>) -> Result<()> {
        let Some(x) = exclude else { return Ok(()) };
        for t in 0..n {
            match self.levels[t].c.as_ref() {
                Some(CSet::Explicit(codes)) => {
                    let counts = self.letter_counts(x, t + 1)?;
                    if counts[t].iter().any(|&c| c > 0) || codes.is_empty() {
                        return Err(Error::Capacity(format!(
                            "level {n} must be symbolic but C at level {t} uses the excluded letter"
                        )));
                    }
                }
                Some(CSet::Segment { exclude: e, .. }) if *e == exclude => {}
                _ => {
                    return Err(Error::Capacity(format!(
                        "level {n} must be symbolic but level {t} is incompatible"
                    )))
                }
            }
        }
        Ok(())
    }
}
