mod common;

use std::collections::BTreeSet;

use common::{exproot, lex, naive_levels, w};
use monalg::growth::{theta_of, GrowthSpec};
use monalg::primitive::*;
use monalg::words::contains;
use num_bigint::BigInt;
use num_rational::BigRational;

fn eps(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn words_of(st: &monalg::words::ConstructionState, n: usize) -> BTreeSet<Vec<u8>> {
    st.c_words(n).unwrap().into_iter().collect()
}

#[test]
fn eps_sequence() {
    let e = EpsSeq::pow2(2);
    assert_eq!(e.at(0), eps(1, 4));
    assert_eq!(e.at(3), eps(1, 32));
    assert!(e.product_certified());
    assert!(!EpsSeq::pow2(1).product_certified());
}

#[test]
fn container_choice_is_lex_min() {
    let st = lex(&exproot(), 7);
    let all = naive_levels(&st);
    for (word, theta) in [("a", 6), ("b", 6), ("bb", 6), ("abba", 7)] {
        let x = w(word);
        let v = choose_v(&st, &x, theta).unwrap();
        let mut cands: Vec<&Vec<u8>> = all[theta].iter().filter(|z| contains(z, &x)).collect();
        cands.sort();
        assert_eq!(&v, cands[0], "{word}");
    }
    let err = choose_v(&st, &w("bbb"), 6).unwrap_err();
    assert!(matches!(err, monalg::Error::Assertion(_)), "{err}");
}

#[test]
fn insertion_sets() {
    let st = lex(&exproot(), 8);
    let (x, thetas, _, _) = build_x(&st, &eps(1, 4)).unwrap();
    assert_eq!(thetas[0], (0, 6));
    assert!(x[..6].iter().all(|s| s.is_empty()));
    let va = choose_v(&st, &w("a"), 6).unwrap();
    let vb = choose_v(&st, &w("b"), 6).unwrap();
    assert_eq!(x[6], [va.clone(), vb.clone()].into_iter().collect());
    assert!(x[7].contains(&va.repeat(2)) && x[7].contains(&vb.repeat(2)));
    assert!(x.iter().enumerate().all(|(n, s)| s.iter().all(|z| z.len() == 1 << n)));
}

#[test]
fn one_extension() {
    let st = lex(&exproot(), 7);
    let (next, rec) = extend(&st, &eps(1, 4), 0).unwrap();
    assert!(rec.x_sizes[6] > 0);
    assert!(next.c_len(6) <= 20u32.into());
    let (old, new) = (naive_levels(&st), naive_levels(&next));
    for n in 0..=7 {
        let bigger: BTreeSet<&Vec<u8>> = new[n].iter().collect();
        assert!(old[n].iter().all(|z| bigger.contains(z)), "level {n}");
    }
    // far too small an eps puts every theta beyond the horizon
    let (same, rec) = extend(&st, &eps(1, 1 << 20), 0).unwrap();
    assert_eq!(rec.added(), 0);
    assert_eq!(same.levels, st.levels);
    let hat = iterate_to_fixpoint(&st, &EpsSeq::pow2(20), 8).unwrap();
    assert_eq!(hat.iterations(), 1);
}

/// Re-derives the fixpoint from word sets only.
fn naive_fixpoint(g: &GrowthSpec, depth: usize, shift: u32) -> Vec<BTreeSet<Vec<u8>>> {
    let base = lex(g, depth);
    let d = base.alphabet;
    let mut c: Vec<BTreeSet<Vec<u8>>> = (0..depth).map(|n| words_of(&base, n)).collect();
    for alpha in 0.. {
        let e = EpsSeq::pow2(shift).at(alpha);
        // W levels by concatenation
        let mut wl: Vec<Vec<Vec<u8>>> = vec![(0..d).map(|x| vec![x]).collect()];
        for n in 0..depth - 1 {
            let mut next = Vec::new();
            for a in &c[n] {
                for b in &wl[n] {
                    next.push([a.clone(), b.clone()].concat());
                }
            }
            next.sort();
            wl.push(next);
        }
        let mut added = 0;
        let mut new_c = c.clone();
        for i in 0..=depth {
            let Ok(theta) = theta_of(g, d as u32, &e, i, depth) else { break };
            if theta >= depth {
                break;
            }
            let lo = if i == 0 { 1 } else { (1 << (i - 1)) + 1 };
            for l in lo..=1usize << i {
                // first container of each factor, scanning in lex order
                let mut first = std::collections::BTreeMap::new();
                for z in &wl[theta] {
                    for x in z.windows(l) {
                        first.entry(x.to_vec()).or_insert(z);
                    }
                }
                for v in first.into_values() {
                    for n in theta..depth {
                        if new_c[n].insert(v.repeat(1 << (n - theta))) {
                            added += 1;
                        }
                    }
                }
            }
        }
        c = new_c;
        if added == 0 {
            break;
        }
    }
    c
}

#[test]
fn fixpoint_matches_naive_rederivation() {
    let g: GrowthSpec = "truncexp:d=3".parse().unwrap();
    let base = lex(&g, 5);
    let hat = iterate_to_fixpoint(&base, &EpsSeq::pow2(2), 16).unwrap();
    assert!(hat.fixpoint);
    assert!(hat.passes[0].added() > 0);
    let naive = naive_fixpoint(&g, 5, 2);
    for n in 0..5 {
        assert_eq!(words_of(&hat.state, n), naive[n], "level {n}");
    }
    let again = extend(&hat.state, &EpsSeq::pow2(2).at(hat.iterations()), hat.iterations()).unwrap().1;
    assert_eq!(again.added(), 0);
}

#[test]
fn extended_system_checks() {
    let base = lex(&exproot(), 11);
    let hat = iterate_to_fixpoint(&base, &EpsSeq::pow2(2), 64).unwrap();
    assert!(verify_growth_hat(&hat).unwrap().pass());
    let index = PowerIndex::new(&hat.state).unwrap();
    for x in ["a", "b"] {
        let p = check_property(&index, &w(x), 3);
        assert!(p.pass && p.exponents[..3] == [0, 1, 2], "{p:?}");
        let nn = check_nonnilpotent_witness(&hat, &index, &w(x)).unwrap();
        assert!(nn.pass, "{nn:?}");
    }
    assert!(check_property(&index, &w("bb"), 0).pass);
    let plain = PowerIndex::new(&base).unwrap();
    assert!(!check_property(&plain, &w("b"), 3).pass);
    assert!(!check_nonnilpotent_witness(&HatSystem::unextended(&base), &plain, &w("b")).unwrap().pass);
}

#[test]
fn promotion_and_pairs() {
    let base = lex(&exproot(), 9);
    let hat = iterate_to_fixpoint(&base, &EpsSeq::pow2(2), 64).unwrap();
    let (promo, pairs) = check_prime_hat(&hat, 1).unwrap();
    assert!(promo.pass(), "{}", promo.to_text());
    assert!(pairs.pass());
}
