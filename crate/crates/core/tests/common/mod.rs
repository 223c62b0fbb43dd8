#![allow(dead_code)]

use std::collections::HashSet;

use monalg::growth::GrowthSpec;
use monalg::words::{build, ConstructionState, Limits, StrategySpec};

pub fn exproot() -> GrowthSpec {
    "exproot:d=2,beta=1/2".parse().unwrap()
}

pub fn lex(g: &GrowthSpec, depth: usize) -> ConstructionState {
    build(g, depth, &StrategySpec::LexFirst, &Limits::default()).unwrap()
}

pub fn w(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'a').collect()
}

pub fn r(v: &[u8]) -> String {
    v.iter().map(|&x| (b'a' + x) as char).collect()
}

/// All words of every level, rebuilt from the C lists by plain concatenation.
pub fn naive_levels(st: &ConstructionState) -> Vec<Vec<Vec<u8>>> {
    let mut levels: Vec<Vec<Vec<u8>>> = vec![(0..st.alphabet).map(|x| vec![x]).collect()];
    for n in 0..st.depth() {
        let cs = st.c_words(n).unwrap();
        let mut next = Vec::new();
        for c in &cs {
            for t in &levels[n] {
                let mut v = c.clone();
                v.extend_from_slice(t);
                next.push(v);
            }
        }
        levels.push(next);
    }
    levels
}

/// Length-`l` factors of the top-level words by sliding windows.
pub fn naive_factors(words: &[Vec<u8>], l: usize) -> HashSet<Vec<u8>> {
    let mut out = HashSet::new();
    for w in words {
        if w.len() >= l {
            for x in w.windows(l) {
                out.insert(x.to_vec());
            }
        }
    }
    out
}
