//! Prescribed growth functions, their admissibility checks, and the index
//! functions derived from them (level sizes, `mu`, `theta`, regularization).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest value (in bits) any single evaluation may produce.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 22;

/// The supported families of growth functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `d^ceil(n^beta)`.
    ExpRoot { d: u32, beta: Ratio<u64> },
    /// `ceil((1+eps)^n)`; `d` must equal `ceil(1+eps)`.
    NearOneExp { d: u32, eps: Ratio<u64> },
    /// `f(1) = d`, `f(n) = (d-1)^n` for `n >= 2`.
    TruncatedExp { d: u32 },
    /// Explicit values `f(1), f(2), ...`.
    Table(Vec<BigUint>),
    /// The base family with one extra letter: `f(1) + 1` at `n = 1`, unchanged elsewhere.
    PlusLetter(Box<Family>),
}

/// An evaluable growth function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthSpec {
    pub family: Family,
    pub bit_budget: u64,
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

pub(crate) fn rat(x: BigUint) -> BigRational {
    BigRational::from_integer(x.into())
}

/// `ceil(x^(1/k))` for a nonnegative integer `x`.
pub fn ceil_root(x: &BigUint, k: u32) -> BigUint {
    let r = x.nth_root(k);
    if &r.pow(k) == x {
        r
    } else {
        r + 1u32
    }
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

impl GrowthSpec {
    pub fn new(family: Family) -> Result<Self> {
        let spec = GrowthSpec {
            family,
            bit_budget: DEFAULT_BIT_BUDGET,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn exp_root(d: u32, beta: (u64, u64)) -> Result<Self> {
        Self::new(Family::ExpRoot {
            d,
            beta: Ratio::new(beta.0, beta.1),
        })
    }

    pub fn near_one_exp(d: u32, eps: (u64, u64)) -> Result<Self> {
        Self::new(Family::NearOneExp {
            d,
            eps: Ratio::new(eps.0, eps.1),
        })
    }

    pub fn truncated_exp(d: u32) -> Result<Self> {
        Self::new(Family::TruncatedExp { d })
    }

    pub fn table(values: Vec<BigUint>) -> Result<Self> {
        Self::new(Family::Table(values))
    }

    /// The same function with one extra letter at `n = 1`.
    pub fn plus_letter(&self) -> Self {
        GrowthSpec {
            family: Family::PlusLetter(Box::new(self.family.clone())),
            bit_budget: self.bit_budget,
        }
    }

    pub fn with_bit_budget(mut self, bits: u64) -> Self {
        self.bit_budget = bits;
        self
    }

    fn validate(&self) -> Result<()> {
        fn check(f: &Family) -> Result<()> {
            match f {
                Family::ExpRoot { d, beta } => {
                    if *d < 2 {
                        return Err(Error::Invalid("exproot needs d >= 2".into()));
                    }
                    if beta.numer().is_zero() || beta.denom().is_zero() {
                        return Err(Error::Invalid("exproot needs beta > 0".into()));
                    }
                    if *beta.denom() > u32::MAX as u64 || *beta.numer() > u32::MAX as u64 {
                        return Err(Error::Invalid("beta terms too large".into()));
                    }
                }
                Family::NearOneExp { d, eps } => {
                    if eps.numer().is_zero() {
                        return Err(Error::Invalid("nearexp needs eps > 0".into()));
                    }
                    let one_plus = Ratio::from_integer(1u64) + *eps;
                    if one_plus.ceil().to_integer() != *d as u64 {
                        return Err(Error::Invalid(format!(
                            "nearexp needs d = ceil(1+eps) = {}",
                            one_plus.ceil().to_integer()
                        )));
                    }
                }
                Family::TruncatedExp { d } => {
                    if *d < 3 {
                        return Err(Error::Invalid("truncexp needs d >= 3".into()));
                    }
                }
                Family::Table(v) => {
                    if v.is_empty() {
                        return Err(Error::Invalid("empty table".into()));
                    }
                    if v[0] < big(2) || v[0] > big(16) {
                        return Err(Error::Invalid("table must start with d in 2..=16".into()));
                    }
                    if v.iter().any(|x| x.is_zero()) {
                        return Err(Error::Invalid("table values must be >= 1".into()));
                    }
                }
                Family::PlusLetter(inner) => check(inner)?,
            }
            Ok(())
        }
        check(&self.family)?;
        if self.d() > 16 {
            return Err(Error::Invalid("alphabets are limited to 16 letters".into()));
        }
        Ok(())
    }

    /// Alphabet size, equal to `f(1)`.
    pub fn d(&self) -> u32 {
        fn d_of(f: &Family) -> u32 {
            match f {
                Family::ExpRoot { d, .. }
                | Family::NearOneExp { d, .. }
                | Family::TruncatedExp { d } => *d,
                Family::Table(v) => v[0].to_u32().unwrap_or(0),
                Family::PlusLetter(inner) => d_of(inner) + 1,
            }
        }
        d_of(&self.family)
    }

    /// `f(n)` for `n >= 1`.
    pub fn eval(&self, n: u64) -> Result<BigUint> {
        if n == 0 {
            return Err(Error::Invalid("growth functions are evaluated at n >= 1".into()));
        }
        self.eval_family(&self.family, n)
    }

    fn bits_ok(&self, bits: f64, n: u64) -> Result<()> {
        if bits > self.bit_budget as f64 {
            Err(Error::Budget(format!(
                "f({n}) needs about {bits:.0} bits, budget is {}",
                self.bit_budget
            )))
        } else {
            Ok(())
        }
    }

    fn eval_family(&self, fam: &Family, n: u64) -> Result<BigUint> {
        match fam {
            Family::ExpRoot { d, beta } => {
                let p = *beta.numer() as u32;
                let q = *beta.denom() as u32;
                let approx = (n as f64).powf(p as f64 / q as f64) * (*d as f64).log2();
                self.bits_ok(approx, n)?;
                let e = ceil_root(&big(n).pow(p), q);
                let e = e
                    .to_u32()
                    .ok_or_else(|| Error::Budget(format!("exponent of f({n}) too large")))?;
                Ok(big(*d as u64).pow(e))
            }
            Family::NearOneExp { eps, .. } => {
                let p = big(*eps.numer());
                let q = big(*eps.denom());
                let approx = n as f64 * (1.0 + *eps.numer() as f64 / *eps.denom() as f64).log2();
                self.bits_ok(approx + 1.0, n)?;
                let e = u32::try_from(n).map_err(|_| Error::Budget(format!("n = {n} too large")))?;
                let num = (&q + &p).pow(e);
                let den = q.pow(e);
                Ok(ceil_div(&num, &den))
            }
            Family::TruncatedExp { d } => {
                if n == 1 {
                    return Ok(big(*d as u64));
                }
                self.bits_ok(n as f64 * ((*d - 1) as f64).log2(), n)?;
                let e = u32::try_from(n).map_err(|_| Error::Budget(format!("n = {n} too large")))?;
                Ok(big((*d - 1) as u64).pow(e))
            }
            Family::Table(v) => v.get((n - 1) as usize).cloned().ok_or_else(|| {
                Error::HorizonExhausted(format!("table has {} values, f({n}) requested", v.len()))
            }),
            Family::PlusLetter(inner) => {
                let base = self.eval_family(inner, n)?;
                Ok(if n == 1 { base + 1u32 } else { base })
            }
        }
    }

    /// `f(2^m)`.
    pub fn at_pow2(&self, m: usize) -> Result<BigUint> {
        if m >= 63 {
            return Err(Error::Budget(format!("f(2^{m}) out of range")));
        }
        self.eval(1u64 << m)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::ExpRoot { d, beta } => write!(f, "exproot:d={d},beta={beta}"),
            Family::NearOneExp { d, eps } => write!(f, "nearexp:d={d},eps={eps}"),
            Family::TruncatedExp { d } => write!(f, "truncexp:d={d}"),
            Family::Table(v) => {
                write!(f, "table:")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            Family::PlusLetter(inner) => write!(f, "plusletter({inner})"),
        }
    }
}

impl fmt::Display for GrowthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(a, b))
        }
        None => Ok(Ratio::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn parse_family(s: &str) -> Result<Family> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("plusletter(").and_then(|r| r.strip_suffix(')')) {
        return Ok(Family::PlusLetter(Box::new(parse_family(inner)?)));
    }
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected <family>:<params>, got {s:?}")))?;
    if kind == "table" {
        let vals = rest
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<BigUint>()
                    .map_err(|_| Error::Parse(format!("bad table value {x:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(Family::Table(vals));
    }
    let mut d = None;
    let mut beta = None;
    let mut eps = None;
    for kv in rest.split(',') {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {kv:?}")))?;
        match k.trim() {
            "d" => {
                d = Some(
                    v.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad d {v:?}")))?,
                )
            }
            "beta" => beta = Some(parse_ratio(v)?),
            "eps" => eps = Some(parse_ratio(v)?),
            other => return Err(Error::Parse(format!("unknown parameter {other:?}"))),
        }
    }
    let d = d.ok_or_else(|| Error::Parse("missing d".into()))?;
    match kind {
        "exproot" => Ok(Family::ExpRoot {
            d,
            beta: beta.ok_or_else(|| Error::Parse("missing beta".into()))?,
        }),
        "nearexp" => Ok(Family::NearOneExp {
            d,
            eps: eps.ok_or_else(|| Error::Parse("missing eps".into()))?,
        }),
        "truncexp" => Ok(Family::TruncatedExp { d }),
        other => Err(Error::Parse(format!("unknown family {other:?}"))),
    }
}

impl FromStr for GrowthSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GrowthSpec::new(parse_family(s)?)
    }
}

/// Result of one admissibility property.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyVerdict {
    pub pass: bool,
    /// Human-readable reproduction of the first violation, if any.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub growth: String,
    pub range: (u64, u64),
    pub c: u64,
    /// Nondecreasing on the whole range.
    pub monotone: PropertyVerdict,
    /// Strictly increasing along powers of two. Informational.
    pub strict_at_powers_of_two: PropertyVerdict,
    pub submultiplicative: PropertyVerdict,
    pub doubling_superlinear: PropertyVerdict,
    /// Minimum of `f(2^(n+1)) / f(2^n)` over the upper half of the dyadic range, as `p/q`.
    pub min_tail_ratio: String,
    pub tail_start: usize,
    pub note: String,
}

impl AdmissibilityReport {
    /// Monotone, submultiplicative and doubling-superlinear. Strictness along
    /// powers of two is reported separately: `d^ceil(sqrt n)` already has `f(2) = f(4)`.
    pub fn all_pass(&self) -> bool {
        self.monotone.pass
            && self.submultiplicative.pass
            && self.doubling_superlinear.pass
    }
}

/// Checks the hypotheses on `f` over `[1..n_max]`. Values `f(c*n)` beyond the
/// range are evaluated as needed.
pub fn check_admissible(f: &GrowthSpec, c: u64, n_max: u64) -> Result<AdmissibilityReport> {
    if n_max < 4 {
        return Err(Error::Invalid("admissibility range must be at least 4".into()));
    }
    let vals: Vec<BigUint> = (1..=n_max).map(|n| f.eval(n)).collect::<Result<_>>()?;
    let v = |n: u64| &vals[(n - 1) as usize];

    let monotone = match (1..n_max).find(|&n| v(n + 1) < v(n)) {
        Some(n) => PropertyVerdict {
            pass: false,
            witness: Some(format!("f({}) = {} < f({n}) = {}", n + 1, v(n + 1), v(n))),
        },
        None => PropertyVerdict { pass: true, witness: None },
    };

    let mut strict = PropertyVerdict { pass: true, witness: None };
    let mut p = 1u64;
    while 2 * p <= n_max {
        if v(2 * p) <= v(p) {
            strict = PropertyVerdict {
                pass: false,
                witness: Some(format!("f({}) = {} <= f({p}) = {}", 2 * p, v(2 * p), v(p))),
            };
            break;
        }
        p *= 2;
    }

    let mut sub = PropertyVerdict { pass: true, witness: None };
    'outer: for s in 2..=n_max {
        for m in 1..=s / 2 {
            let n = s - m;
            if v(s) > &(v(m) * v(n)) {
                sub = PropertyVerdict {
                    pass: false,
                    witness: Some(format!(
                        "f({m}+{n}) = {} > f({m})*f({n}) = {}",
                        v(s),
                        v(m) * v(n)
                    )),
                };
                break 'outer;
            }
        }
    }

    let mut doubling = PropertyVerdict { pass: true, witness: None };
    for n in 1..=n_max {
        let lhs = f.eval(c * n)?;
        let rhs = big(n) * v(n);
        if lhs < rhs {
            doubling = PropertyVerdict {
                pass: false,
                witness: Some(format!("n = {n}: f({}) = {lhs} < {n}*f({n}) = {rhs}", c * n)),
            };
            break;
        }
    }

    let top = 63 - n_max.leading_zeros() as usize; // largest m with 2^m <= n_max
    let tail_start = top / 2;
    let mut best: Option<BigRational> = None;
    for m in tail_start..top {
        let r = rat(v(1 << (m + 1)).clone()) / rat(v(1 << m).clone());
        if best.as_ref().map_or(true, |b| &r < b) {
            best = Some(r);
        }
    }
    let min_tail_ratio = best.map_or_else(|| "n/a".to_string(), |r| r.to_string());

    Ok(AdmissibilityReport {
        growth: f.to_string(),
        range: (1, n_max),
        c,
        monotone,
        strict_at_powers_of_two: strict,
        submultiplicative: sub,
        doubling_superlinear: doubling,
        min_tail_ratio,
        tail_start,
        note: format!(
            "finite horizon: properties certified on [1..{n_max}] only; strict increase is required along powers of two"
        ),
    })
}

/// Exact per-level sizes: `c_size[n] = ceil(f(2^(n+1)) / f(2^n))`, `w_size[0] = d`,
/// `w_size[n+1] = c_size[n] * w_size[n]`, for `n` in `0..=depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeTable {
    pub c_size: Vec<BigUint>,
    pub w_size: Vec<BigUint>,
}

impl SizeTable {
    pub fn depth(&self) -> usize {
        self.c_size.len() - 1
    }
}

/// Builds the size table and checks `c_size(n) <= w_size(n)` and `w_size(n) >= f(2^n)`.
pub fn level_sizes(f: &GrowthSpec, depth: usize) -> Result<SizeTable> {
    let mut c_size = Vec::with_capacity(depth + 1);
    let mut w_size = Vec::with_capacity(depth + 1);
    let mut w = big(f.d() as u64);
    let mut prev = f.at_pow2(0)?;
    for n in 0..=depth {
        let next = f.at_pow2(n + 1)?;
        let c = ceil_div(&next, &prev);
        if c > w {
            return Err(Error::Infeasible {
                level: n,
                need: c.to_string(),
                available: w.to_string(),
            });
        }
        if w < prev {
            return Err(Error::Assertion(format!(
                "|W(2^{n})| = {w} is below f(2^{n}) = {prev}"
            )));
        }
        let w_next = &c * &w;
        c_size.push(c);
        w_size.push(w);
        w = w_next;
        prev = next;
    }
    Ok(SizeTable { c_size, w_size })
}

/// `mu(0), mu(1), ...` for as long as they fit below `horizon`. The second
/// component is the first index whose value would exceed the horizon.
pub fn mu_table(f: &GrowthSpec, sizes: &SizeTable, horizon: usize) -> Result<(Vec<usize>, usize)> {
    let mut out: Vec<usize> = Vec::new();
    for n in 0..sizes.w_size.len() {
        let lo = match out.last() {
            Some(&p) => p.max(n) + 1,
            None => n + 1,
        };
        let mut found = None;
        for m in lo..=horizon {
            if f.at_pow2(m + 1)? >= &sizes.w_size[n] * f.at_pow2(m)? {
                found = Some(m);
                break;
            }
        }
        match found {
            Some(m) => out.push(m),
            None => return Ok((out, n)),
        }
    }
    let next = out.len();
    Ok((out, next))
}

/// `mu(n)`: the least `m > max(n, mu(n-1))` with `f(2^(m+1)) >= |W(2^n)| f(2^m)`.
pub fn mu_of(f: &GrowthSpec, sizes: &SizeTable, n: usize, horizon: usize) -> Result<usize> {
    if n >= sizes.w_size.len() {
        return Err(Error::Invalid(format!("size table has no level {n}")));
    }
    let (table, _) = mu_table(f, sizes, horizon)?;
    table.get(n).copied().ok_or_else(|| {
        Error::HorizonExhausted(format!("mu({n}) does not exist at or below level {horizon}"))
    })
}

/// `sum_{j=0}^{2^i} d^j`: the number of words of length at most `2^i`, counting the empty word.
pub fn short_word_count(d: u32, i: usize) -> Result<BigUint> {
    if i > 20 {
        return Err(Error::Budget(format!("2^{i} too large a word length")));
    }
    let d = big(d as u64);
    let top = d.pow((1u32 << i) + 1);
    Ok((top - 1u32) / (d - 1u32))
}

/// `theta(i)`: the least `t >= i` such that `S(i) <= eps * f(2^(m+1)) / f(2^m)`
/// holds for every `m` in `[t, horizon]`.
pub fn theta_of(
    f: &GrowthSpec,
    d: u32,
    eps: &BigRational,
    i: usize,
    horizon: usize,
) -> Result<usize> {
    let (p, q) = rational_parts(eps)?;
    let s = short_word_count(d, i)?;
    let mut theta = i;
    let mut holds_at_top = false;
    for m in 0..=horizon {
        let ok = &s * &q * f.at_pow2(m)? <= &p * f.at_pow2(m + 1)?;
        if !ok && m >= theta {
            theta = m + 1;
        }
        if m == horizon {
            holds_at_top = ok;
        }
    }
    if !holds_at_top || theta > horizon {
        return Err(Error::HorizonExhausted(format!(
            "theta({i}) is not reached at or below level {horizon}"
        )));
    }
    Ok(theta)
}

pub(crate) fn rational_parts(r: &BigRational) -> Result<(BigUint, BigUint)> {
    let p = r
        .numer()
        .to_biguint()
        .ok_or_else(|| Error::Invalid("rational must be nonnegative".into()))?;
    let q = r
        .denom()
        .to_biguint()
        .ok_or_else(|| Error::Invalid("rational must be positive".into()))?;
    if p.is_zero() {
        return Err(Error::Invalid("rational must be positive".into()));
    }
    Ok((p, q))
}

/// Parses `p/q` or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let r = parse_ratio(s)?;
    Ok(BigRational::new(BigUint::from(*r.numer()).into(), BigUint::from(*r.denom()).into()))
}

/// The regularized function `f'(n) = sum_{i<t} n^(-i/t) f(2^i n)` with `t` the least
/// integer such that `2^t >= C`. Values are irrational in general; they are
/// returned as rational intervals `[lo, hi]` of width about `2^-precision` relative.
#[derive(Clone, Debug)]
pub struct Regularized {
    pub f: GrowthSpec,
    pub t: u32,
    pub precision: u32,
}

/// `f'` for a constant `C >= 2`. `C = 1` gives `t = 0` and an empty sum, which is rejected.
pub fn regularize(f: &GrowthSpec, c: u64) -> Result<Regularized> {
    if c < 2 {
        return Err(Error::Invalid("regularization needs C >= 2 (t = 0 gives an empty sum)".into()));
    }
    let t = 64 - (c - 1).leading_zeros();
    Ok(Regularized {
        f: f.clone(),
        t,
        precision: 64,
    })
}

impl Regularized {
    /// Rational enclosure of `f'(n)`.
    pub fn eval_interval(&self, n: u64) -> Result<(BigRational, BigRational)> {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        let p = self.precision;
        for i in 0..self.t {
            let fv = rat(self.f.eval(n << i)?);
            if i == 0 {
                lo += &fv;
                hi += &fv;
                continue;
            }
            // r <= n^(i/t) * 2^p < r + 1
            let x = big(n).pow(i) << (p as usize * self.t as usize);
            let r = x.nth_root(self.t);
            let scale = rat(BigUint::one() << p as usize);
            let r_lo = rat(r.clone());
            let r_hi = rat(r + 1u32);
            lo += &fv * &scale / r_hi;
            hi += &fv * &scale / r_lo;
        }
        Ok((lo, hi))
    }

    /// `ceil(f'(n))` when the enclosure determines it.
    pub fn ceil_at(&self, n: u64) -> Result<Option<BigUint>> {
        let (lo, hi) = self.eval_interval(n)?;
        let a = lo.ceil().to_integer();
        let b = hi.ceil().to_integer();
        Ok(if a == b { a.to_biguint() } else { None })
    }

    /// Checks `f(n) <= f'(n) <= t f(2^(t-1) n)` on `[1..n_max]`.
    pub fn sandwich(&self, n_max: u64) -> Result<PropertyVerdict> {
        for n in 1..=n_max {
            let (lo, hi) = self.eval_interval(n)?;
            let fv = rat(self.f.eval(n)?);
            if lo < fv {
                return Ok(PropertyVerdict {
                    pass: false,
                    witness: Some(format!("f'({n}) < f({n}) = {fv}")),
                });
            }
            let up = rat(big(self.t as u64) * self.f.eval(n << (self.t - 1))?);
            if hi > up {
                return Ok(PropertyVerdict {
                    pass: false,
                    witness: Some(format!("f'({n}) may exceed t f(2^(t-1) {n}) = {up}")),
                });
            }
        }
        Ok(PropertyVerdict { pass: true, witness: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn er() -> GrowthSpec {
        "exproot:d=2,beta=1/2".parse().unwrap()
    }

    #[test]
    fn parse_round_trips() {
        for s in ["exproot:d=2,beta=1/2", "nearexp:d=2,eps=1/2", "truncexp:d=3", "table:2,4,4,8"] {
            let g: GrowthSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        let t = er().plus_letter();
        assert_eq!(t.to_string().parse::<GrowthSpec>().unwrap(), t);
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!("exproot:d=1,beta=1/2".parse::<GrowthSpec>().is_err());
        assert!("nearexp:d=3,eps=1/2".parse::<GrowthSpec>().is_err());
        assert!("bogus:d=2".parse::<GrowthSpec>().is_err());
        assert!("exproot:d=2".parse::<GrowthSpec>().is_err());
    }

    #[test]
    fn ceil_root_is_exact() {
        assert_eq!(ceil_root(&big(16), 2), big(4));
        assert_eq!(ceil_root(&big(17), 2), big(5));
        assert_eq!(ceil_root(&big(0), 3), big(0));
    }

    #[test]
    fn budget_is_enforced() {
        let g = er().with_bit_budget(100);
        assert!(matches!(g.eval(1 << 20), Err(Error::Budget(_))));
    }

    #[test]
    fn plus_letter_changes_only_first_value() {
        let t = er().plus_letter();
        assert_eq!(t.eval(1).unwrap(), big(3));
        assert_eq!(t.eval(2).unwrap(), big(4));
        assert_eq!(t.d(), 3);
    }

    #[test]
    fn table_runs_out() {
        let g: GrowthSpec = "table:2,4".parse().unwrap();
        assert!(g.eval(3).is_err());
    }
}
