mod common;

use common::*;
use monalg::growth::GrowthSpec;
use monalg::words::factors::{dim, is_nonzero, subwords, DimEngine, FactorIndex};
use monalg::words::{build, extend, project, CSet, Limits, StrategySpec};
use num_bigint::BigUint;
use proptest::prelude::*;

fn strs(v: Vec<Vec<u8>>) -> Vec<String> {
    v.iter().map(|x| r(x)).collect()
}

#[test]
fn build_example() {
    let st = lex(&exproot(), 2);
    assert_eq!(strs(st.c_words(0).unwrap()), ["a", "b"]);
    assert_eq!(strs(st.c_words(1).unwrap()), ["aa"]);
    assert_eq!(strs(st.w_words(1).unwrap()), ["aa", "ab", "ba", "bb"]);
    assert_eq!(strs(st.w_words(2).unwrap()), ["aaaa", "aaab", "aaba", "aabb"]);
    let st0 = lex(&exproot(), 0);
    assert_eq!(st0.depth(), 0);
    assert_eq!(strs(st0.w_words(0).unwrap()), ["a", "b"]);
    let te = GrowthSpec::truncated_exp(3).unwrap();
    assert_eq!(lex(&te, 1).level(1).w_size, BigUint::from(6u32));
}

#[test]
fn project_examples() {
    assert_eq!(project(&w("aaba"), 2, 1).unwrap(), w("ba"));
    assert_eq!(project(&w("aaba"), 2, 2).unwrap(), w("aaba"));
    assert_eq!(project(&w("aaab"), 2, 0).unwrap(), w("b"));
    assert!(project(&w("aab"), 2, 0).is_err());
}

#[test]
fn subword_and_dim_examples() {
    let st = lex(&exproot(), 2);
    assert_eq!(strs(subwords(&st, 2, 2).unwrap()), ["aa", "ab", "ba", "bb"]);
    assert_eq!(strs(subwords(&st, 1, 2).unwrap()), ["a", "b"]);
    assert_eq!(strs(subwords(&st, 4, 2).unwrap()), strs(st.w_words(2).unwrap()));
    assert_eq!(dim(&st, 1).unwrap().lower, BigUint::from(2u32));
    assert_eq!(dim(&st, 2).unwrap().lower, BigUint::from(4u32));
    assert_eq!(dim(&st, 4).unwrap().lower, BigUint::from(4u32));
}

#[test]
fn nonzero_examples() {
    let st = lex(&exproot(), 2);
    assert_eq!(is_nonzero(&st, &w("a")).unwrap(), Some(0));
    assert_eq!(is_nonzero(&st, &w("bb")).unwrap(), Some(1));
    assert_eq!(is_nonzero(&st, &w("bbb")).unwrap(), None);
    assert!(is_nonzero(&st, &w("aaaaa")).is_err());
}

#[test]
fn engine_matches_naive_recount() {
    let cases: Vec<(GrowthSpec, StrategySpec, usize)> = vec![
        (exproot(), StrategySpec::LexFirst, 6),
        (exproot(), StrategySpec::SeededRandom { seed: 7 }, 6),
        (GrowthSpec::truncated_exp(3).unwrap(), StrategySpec::LexFirst, 4),
        ("nearexp:d=2,eps=1/2".parse().unwrap(), StrategySpec::LexFirst, 4),
        (exproot(), StrategySpec::Prime, 6),
    ];
    for (g, s, depth) in cases {
        let st = build(&g, depth, &s, &Limits::default()).unwrap();
        let levels = naive_levels(&st);
        let eng = DimEngine::new(&st);
        for h in 0..=depth {
            for l in 1..=16usize.min(1 << h) {
                let naive = naive_factors(&levels[h], l);
                let got = eng.factor_set(h, l).unwrap();
                assert_eq!(got, naive, "{g} {s} h={h} l={l}");
                let (lo, hi) = eng.bracket(h, l).unwrap();
                let n = BigUint::from(naive.len());
                assert!(lo <= n && n <= hi, "bracket {lo}..{hi} misses {n}");
            }
        }
        let mut idx = FactorIndex::new(&st);
        let top = naive_factors(&levels[depth], 5);
        for x in 0..32u32 {
            let word: Vec<u8> = (0..5).map(|i| ((x >> i) & 1) as u8).collect();
            assert_eq!(idx.is_nonzero(&word).unwrap(), top.contains(&word));
        }
    }
}

#[test]
fn chaining_and_size_law() {
    let st = lex(&exproot(), 5);
    let levels = naive_levels(&st);
    for n in 0..5 {
        assert_eq!(BigUint::from(levels[n + 1].len()), st.level(n + 1).w_size);
        let set: std::collections::HashSet<_> = levels[n + 1].iter().collect();
        assert_eq!(set.len(), levels[n + 1].len(), "concatenation is injective");
        for c in st.c_words(n).unwrap() {
            assert!(levels[n].contains(&c), "C is a subset of W");
        }
    }
}

#[test]
fn symbolic_levels_under_small_budget() {
    let limits = Limits {
        mem_bytes: 4096,
        ..Limits::default()
    };
    let st = build(&exproot(), 10, &StrategySpec::LexFirst, &limits).unwrap();
    let first = st.first_symbolic().unwrap();
    assert!(matches!(st.level(first).c, Some(CSet::Segment { .. })));
    let full = lex(&exproot(), 10);
    for l in [1usize, 2, 3, 4, 8, 16, 64, 256, 1024] {
        let a = DimEngine::new(&st).dim_at(10, l).unwrap();
        let b = DimEngine::new(&full).dim_at(10, l).unwrap();
        assert!(a.lower <= b.lower && b.upper <= a.upper || a.lower <= b.upper && b.lower <= a.upper);
        if b.exact {
            assert!(a.lower <= b.lower && b.lower <= a.upper, "l={l}");
        }
    }
}

#[test]
fn segment_brackets_enclose_exact_counts() {
    let cases = [
        (exproot(), 8, StrategySpec::LexFirst, 256, 96),
        ("truncexp:d=3".parse().unwrap(), 5, StrategySpec::NonPrime { letter: 0 }, 2048, 16),
    ];
    for (g, depth, s, mem_bytes, max_len) in cases {
        let small = Limits {
            mem_bytes,
            ..Limits::default()
        };
        let sym = build(&g, depth, &s, &small).unwrap();
        assert!(sym.first_symbolic().is_some());
        let full = build(&g, depth, &s, &Limits::default()).unwrap();
        let (es, ef) = (DimEngine::new(&sym), DimEngine::new(&full));
        for l in 1..=max_len {
            let (lo, hi) = es.bracket(depth, l).unwrap();
            let exact = ef.exact(depth, l).unwrap().unwrap_or_else(|| panic!("{g} l={l} over budget"));
            assert!(lo <= exact && exact <= hi, "{g} l={l}: {lo} {exact} {hi}");
        }
    }
}

#[test]
fn extend_equals_direct_build() {
    for s in [StrategySpec::LexFirst, StrategySpec::Prime, StrategySpec::SeededRandom { seed: 3 }] {
        let mut a = build(&exproot(), 4, &s, &Limits::default()).unwrap();
        extend(&mut a, 7).unwrap();
        let b = build(&exproot(), 7, &s, &Limits::default()).unwrap();
        assert!(a == b, "{s}");
    }
}

#[test]
fn seeded_random_is_deterministic() {
    let s = StrategySpec::SeededRandom { seed: 11 };
    let a = build(&exproot(), 7, &s, &Limits::default()).unwrap();
    let b = build(&exproot(), 7, &s, &Limits::default()).unwrap();
    assert!(a == b);
    let c = build(&exproot(), 7, &StrategySpec::SeededRandom { seed: 12 }, &Limits::default()).unwrap();
    assert!(a != c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_builds_match_oracle(seed in 0u64..1000, l in 1usize..=16) {
        let st = build(&exproot(), 5, &StrategySpec::SeededRandom { seed }, &Limits::default()).unwrap();
        let levels = naive_levels(&st);
        let got = DimEngine::new(&st).factor_set(5, l).unwrap();
        prop_assert_eq!(got, naive_factors(&levels[5], l));
    }

    #[test]
    fn factors_are_monotone_in_level(l in 1usize..=8) {
        let st = lex(&exproot(), 6);
        let eng = DimEngine::new(&st);
        let mut prev = std::collections::HashSet::new();
        for h in common_levels(l)..=6 {
            let cur = eng.factor_set(h, l).unwrap();
            prop_assert!(prev.is_subset(&cur));
            prev = cur;
        }
    }
}

fn common_levels(l: usize) -> usize {
    monalg::words::ceil_log2(l as u64)
}
