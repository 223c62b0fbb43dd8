//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero when a verdict differs from the expected one.

mod common;

use std::time::Instant;

use common::{exproot, lex, naive_factors, naive_levels, w};
use monalg::growth::GrowthSpec;
use monalg::locnil::{build_tilde, check_prime_tilde, verify_growth_tilde, verify_lambda, verify_locnil, verify_tilde_structure};
use monalg::prime::{check_prime, nonzero_words, verify_entropy_corollary, verify_nonprime_example};
use monalg::primitive::{check_property, iterate_to_fixpoint, verify_primitive, EpsSeq, PowerIndex};
use monalg::report::VerificationReport;
use monalg::words::factors::{DimEngine, FactorIndex};
use monalg::words::persist::{from_bytes, to_bytes};
use monalg::words::{build, extend, ConstructionState, Limits, StrategySpec};
use monalg::Result;

/// Criteria known to fail at this horizon, with the reason printed next to them.
const EXPECTED_FAIL: &[(usize, &str)] = &[
    (3, "some pairs first meet one level above the stated bound"),
    (7, "three length-3/4 words with the extra letter have no prime witness at depth 12"),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_report(rep: &VerificationReport, what: &str) -> Outcome {
    let bad: Vec<String> = rep.failures().take(3).map(|c| c.claim.clone()).collect();
    Outcome {
        pass: rep.pass(),
        detail: if bad.is_empty() {
            format!("{what}: {} claims", rep.claims.len())
        } else {
            format!("{what}: {} failing claims, e.g. {}", rep.failures().count(), bad.join("; "))
        },
    }
}

fn growth_sandwich() -> Result<Outcome> {
    let st = lex(&exproot(), 10);
    Ok(from_report(&monalg::words::verify::verify_growth_bounds(&st)?, "depth 10"))
}

fn oracle() -> Result<Outcome> {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for depth in 0..=6 {
        for s in [StrategySpec::LexFirst, StrategySpec::Prime, StrategySpec::SeededRandom { seed: 3 }] {
            let st = build(&exproot(), depth, &s, &Limits::default())?;
            let top = naive_levels(&st).pop().unwrap();
            let eng = DimEngine::new(&st);
            for l in 1..=16usize.min(1 << depth) {
                let got = eng.dim(l)?;
                let naive = naive_factors(&top, l).len();
                checked += 1;
                if !(got.exact && got.lower == naive.into()) {
                    mismatches.push(format!("{s} depth {depth} l={l}"));
                }
            }
        }
    }
    Ok(Outcome {
        pass: mismatches.is_empty(),
        detail: format!("{checked} lengths compared, mismatches: {mismatches:?}"),
    })
}

fn primeness() -> Result<Outcome> {
    let st = build(&exproot(), 8, &StrategySpec::Prime, &Limits::default())?;
    let rep = check_prime(&st, 8)?;
    let np = build(&"truncexp:d=3".parse()?, 8, &StrategySpec::NonPrime { letter: 0 }, &Limits::default())?;
    let control = check_prime(&np, 1)?.failed("a", "a");
    Ok(Outcome {
        pass: rep.pass() && control,
        detail: format!(
            "{} pairs, {} late (bound {}, max level {:?}), {} unwitnessed; control (a, a) fails: {control}",
            rep.pairs,
            rep.late.len(),
            rep.level_bound,
            rep.max_level(),
            rep.failures.len()
        ),
    })
}

fn nonprime_example() -> Result<Outcome> {
    let st = build(&"truncexp:d=3".parse()?, 8, &StrategySpec::NonPrime { letter: 0 }, &Limits::default())?;
    let mut idx = FactorIndex::new(&st);
    let mut nonzero = true;
    for h in 0..=8 {
        nonzero &= idx.is_factor_at(h, &w("a"))?;
    }
    let mut out = from_report(&verify_nonprime_example(&st, 0)?, "depth 8");
    out.pass &= nonzero;
    out.detail += &format!(", a nonzero at every level: {nonzero}");
    Ok(out)
}

fn entropy() -> Result<Outcome> {
    let g: GrowthSpec = "nearexp:d=2,eps=1/2".parse()?;
    let rep = verify_entropy_corollary(&g, 10, &Limits::default())?;
    let mut out = from_report(&rep, "depth 10");
    if let Some(n) = rep.notes.iter().find(|n| n.starts_with("dim(")) {
        out.detail += &format!(", {n}");
    }
    Ok(out)
}

fn primitive() -> Result<Outcome> {
    let base = lex(&exproot(), 11);
    let hat = iterate_to_fixpoint(&base, &EpsSeq::pow2(2), 64)?;
    let mut out = from_report(&verify_primitive(&hat, 4, 3)?, "depth 11");
    let plain = PowerIndex::new(&base)?;
    let words = nonzero_words(&base, 4)?;
    let control = words.iter().any(|x| !check_property(&plain, x, 3).pass);
    out.pass &= control;
    out.detail += &format!(", {} passes; control fails on the base: {control}", hat.iterations());
    Ok(out)
}

fn locally_nilpotent() -> Result<Outcome> {
    let sys = build_tilde(&exproot(), 12, &EpsSeq::pow2(0), &Limits::default())?;
    let mut parts = Vec::new();
    let mut pass = true;
    let mut add = |tag: &str, rep: VerificationReport| {
        let o = from_report(&rep, tag);
        pass &= o.pass;
        parts.push(format!("[{}] {}", if o.pass { "ok" } else { "fail" }, o.detail));
    };
    add("structure", verify_tilde_structure(&sys)?);
    add("a,b lambda", verify_lambda(&sys)?.0);
    add("c nilpotency", verify_locnil(&sys, 6, 2, 32)?.0);
    let (promo, pr) = check_prime_tilde(&sys, 4)?;
    add("d primeness", promo);
    add("e growth", verify_growth_tilde(&sys, 16)?);
    parts.push(format!("(c, c) witnessed: {}", !pr.failed("c", "c")));
    Ok(Outcome {
        pass,
        detail: parts.join(" "),
    })
}

fn persistence() -> Result<Outcome> {
    let mut ok = true;
    let mut n = 0;
    for (g, s) in [
        (exproot(), StrategySpec::LexFirst),
        (exproot(), StrategySpec::Prime),
        ("truncexp:d=3".parse()?, StrategySpec::NonPrime { letter: 0 }),
    ] {
        let fresh = build(&g, 8, &s, &Limits::default())?;
        let bytes = to_bytes(&fresh);
        let back: ConstructionState = from_bytes(&bytes)?;
        let mut resumed = from_bytes(&to_bytes(&build(&g, 6, &s, &Limits::default())?))?;
        extend(&mut resumed, 8)?;
        ok &= to_bytes(&back) == bytes && to_bytes(&resumed) == bytes;
        n += 1;
    }
    Ok(Outcome {
        pass: ok,
        detail: format!("{n} strategies round-tripped and resumed 6 -> 8"),
    })
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 8] = [
        ("growth sandwich", growth_sandwich),
        ("oracle equivalence", oracle),
        ("primeness", primeness),
        ("non-prime example", nonprime_example),
        ("entropy", entropy),
        ("primitive system", primitive),
        ("locally nilpotent construction", locally_nilpotent),
        ("determinism and persistence", persistence),
    ];
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let k = i + 1;
        let t = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let known = EXPECTED_FAIL.iter().find(|(c, _)| *c == k);
        let tag = match (pass, known) {
            (false, Some((_, why))) => format!(" (expected: {why})"),
            (true, Some(_)) => {
                unexpected += 1;
                " (unexpected pass)".to_string()
            }
            (false, None) => {
                unexpected += 1;
                String::new()
            }
            (true, None) => String::new(),
        };
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {k} {name}: {verdict}{tag} [{:.1}s] {detail}", t.elapsed().as_secs_f64());
    }
    if unexpected > 0 {
        println!("{unexpected} criteria differ from the expected verdicts");
        std::process::exit(1);
    }
}
