mod common;

use common::{exproot, r, w};
use monalg::growth::{level_sizes, mu_table, GrowthSpec};
use monalg::prime::{
    check_prime, find_pair_witnesses, max_disjoint_occurrences, prime_strategy_with_mu, verify_entropy_corollary,
};
use monalg::words::factors::is_nonzero;
use monalg::words::verify::check_pi_onto;
use monalg::words::{build, Limits, StrategySpec};
use monalg::Error;

fn truncexp() -> GrowthSpec {
    "truncexp:d=3".parse().unwrap()
}

fn nonprime(depth: usize) -> monalg::words::ConstructionState {
    build(&truncexp(), depth, &StrategySpec::NonPrime { letter: 0 }, &Limits::default()).unwrap()
}

#[test]
fn constrained_level_projects_onto_lower_words() {
    let st = build(&exproot(), 4, &StrategySpec::Prime, &Limits::default()).unwrap();
    let ends: Vec<u8> = st.c_words(2).unwrap().iter().map(|c| *c.last().unwrap()).collect();
    assert_eq!(st.c_words(2).unwrap().len(), 2);
    assert!(ends.contains(&0) && ends.contains(&1));
    let sizes = level_sizes(&exproot(), 8).unwrap();
    let (mu, _) = mu_table(&exproot(), &sizes, 8).unwrap();
    for (j, &m) in mu.iter().enumerate() {
        if m <= 6 {
            let st = build(&exproot(), m + 1, &StrategySpec::Prime, &Limits::default()).unwrap();
            assert_eq!(st.c_len(m), sizes.c_size[m]);
            // every W_j word is a suffix of some chosen C word
            let tails: std::collections::HashSet<Vec<u8>> = st
                .c_words(m)
                .unwrap()
                .iter()
                .map(|c| c[c.len() - (1 << j)..].to_vec())
                .collect();
            for t in st.w_words(j).unwrap() {
                assert!(tails.contains(&t[..]), "mu({j}) = {m} misses {}", r(&t));
            }
        }
    }
    assert!(check_pi_onto(&st, 4, 2).unwrap().pass);
}

#[test]
fn corrupted_mu_trips_the_assertion() {
    let e = prime_strategy_with_mu(&exproot(), 3, &[1], &Limits::default()).unwrap_err();
    assert!(matches!(e, Error::Assertion(_)), "{e}");
}

#[test]
fn prime_pairs_have_witnesses() {
    let st = build(&exproot(), 7, &StrategySpec::Prime, &Limits::default()).unwrap();
    let rep = check_prime(&st, 2).unwrap();
    assert_eq!(rep.level_bound, 5);
    assert!(rep.pass(), "{:?} {:?}", rep.late, rep.failures);
    let rep = check_prime(&st, 4).unwrap();
    assert!(rep.failures.is_empty());
    assert_eq!(rep.pairs, rep.witnessed.len() + rep.late.len());
    for p in rep.witnessed.iter().chain(&rep.late) {
        let word = w(&format!("{}{}{}", p.u, p.v.as_deref().unwrap(), p.u2));
        assert!(is_nonzero(&st, &word).unwrap().is_some_and(|m| m <= p.level));
    }
    assert!(rep.witness_for("b", "b").is_some());
    assert_eq!(rep.witness_for("ba", "ba").unwrap().v.as_deref(), Some("a"));
    // with lex-min preimages some pairs first meet one level above mu(2) + 1
    assert_eq!(rep.level_bound, 6);
    assert_eq!(rep.max_level(), Some(7));
    assert!(rep.late.iter().any(|p| p.u == "baab" && p.u2 == "aa"));
}

#[test]
fn symbolic_pair_decision_matches_scan() {
    let st = build(&exproot(), 6, &StrategySpec::Prime, &Limits::default()).unwrap();
    let words = monalg::prime::nonzero_words(&st, 3).unwrap();
    let scanned = find_pair_witnesses(&st, &words, 6, u64::MAX).unwrap();
    let decided = find_pair_witnesses(&st, &words, 6, 0).unwrap();
    assert_eq!(decided.scanned_levels, 0);
    let levels = |r: &monalg::prime::PrimenessReport| {
        let mut v: Vec<_> = r.witnessed.iter().map(|p| (p.u.clone(), p.u2.clone(), p.level)).collect();
        v.sort();
        v
    };
    assert_eq!(levels(&scanned), levels(&decided));
}

#[test]
fn nonprime_first_letter_never_repeats() {
    let st = nonprime(8);
    assert_eq!(st.c_words(0).unwrap(), vec![w("b"), w("c")]);
    let rep = check_prime(&st, 1).unwrap();
    assert!(rep.failed("a", "a"));
    assert!(rep.witness_for("b", "a").is_some());
    for h in 0..=8 {
        assert!(is_nonzero(&st, &w("a")).unwrap().is_some());
        assert_eq!(max_disjoint_occurrences(&st, &w("a"), h).unwrap(), (1, 1));
    }
}

#[test]
fn nonprime_sizes_are_exactly_feasible() {
    let st = nonprime(3);
    assert_eq!(st.c_len(2), 16u32.into());
    assert_eq!(st.filtered_w_size(2, Some(0)), 16u32.into());
    let pow2: Vec<String> = (1..=16).map(|n| (1u32 << n).to_string()).collect();
    let g: GrowthSpec = format!("table:{}", pow2.join(",")).parse().unwrap();
    assert_eq!(g.d(), 2);
    let e = build(&g, 3, &StrategySpec::NonPrime { letter: 0 }, &Limits::default()).unwrap_err();
    assert!(matches!(e, Error::Infeasible { .. }), "{e}");
}

#[test]
fn disjoint_counts() {
    let st = build(&exproot(), 6, &StrategySpec::Prime, &Limits::default()).unwrap();
    let counts: Vec<u64> = (1..=6).map(|h| max_disjoint_occurrences(&st, &w("a"), h).unwrap().1).collect();
    assert!(counts.windows(2).all(|p| p[0] < p[1]), "{counts:?}");
    let top = st.w_words(6).unwrap()[0].clone();
    assert_eq!(max_disjoint_occurrences(&st, &top, 6).unwrap(), (1, 1));
    // brute force on the whole top level
    let g = w("ab");
    let best = st
        .w_words(6)
        .unwrap()
        .iter()
        .map(|x| {
            let (mut i, mut c) = (0, 0);
            while i + 2 <= x.len() {
                if x[i..i + 2] == g[..] {
                    c += 1;
                    i += 2;
                } else {
                    i += 1;
                }
            }
            c
        })
        .max()
        .unwrap();
    assert_eq!(max_disjoint_occurrences(&st, &g, 6).unwrap(), (best, best));
}

#[test]
fn entropy_corollary_small() {
    let g: GrowthSpec = "nearexp:d=2,eps=1/2".parse().unwrap();
    let rep = verify_entropy_corollary(&g, 6, &Limits::default()).unwrap();
    assert!(rep.pass(), "{}", rep.to_text());
}
