mod common;

use common::{exproot, lex, w};
use monalg::words::persist::*;
use monalg::words::{build, extend, CSet, Limits, StrategySpec};
use monalg::Error;

fn truncexp() -> monalg::growth::GrowthSpec {
    "truncexp:d=3".parse().unwrap()
}

fn states() -> Vec<monalg::words::ConstructionState> {
    let g = exproot();
    let small = Limits {
        mem_bytes: 4096,
        ..Limits::default()
    };
    vec![
        lex(&g, 0),
        lex(&g, 8),
        build(&g, 9, &StrategySpec::Prime, &Limits::default()).unwrap(),
        build(&truncexp(), 12, &StrategySpec::NonPrime { letter: 0 }, &small).unwrap(),
        build(&g, 7, &StrategySpec::SeededRandom { seed: 7 }, &Limits::default()).unwrap(),
        build(&g, 9, &"tilde".parse().unwrap(), &Limits::default()).unwrap(),
    ]
}

#[test]
fn round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (i, st) in states().into_iter().enumerate() {
        let path = dir.path().join(format!("s{i}.state"));
        save(&st, &path).unwrap();
        let back = load(&path).unwrap();
        assert_eq!(back, st, "{}", st.describe());
        assert_eq!(back.limits, st.limits);
        assert_eq!(to_bytes(&back), std::fs::read(&path).unwrap());
        assert_eq!(back.c_words(0).ok(), st.c_words(0).ok());
    }
    let segs = &states()[3];
    assert!(segs.levels.iter().any(|l| matches!(l.c, Some(CSet::Segment { .. }))));
}

#[test]
fn corrupt_files_are_rejected() {
    let bytes = to_bytes(&lex(&exproot(), 8));
    let cut = &bytes[..bytes.len() - 5];
    assert!(matches!(from_bytes(cut), Err(Error::Checksum)));
    let mut flipped = bytes.clone();
    let last = flipped.len() - 1;
    flipped[last] ^= 1;
    assert!(matches!(from_bytes(&flipped), Err(Error::Checksum)));
    let v2 = String::from_utf8_lossy(&bytes[..40]).replacen("v1", "v2", 1);
    let mut other = v2.into_bytes();
    other.extend_from_slice(&bytes[40..]);
    assert!(matches!(from_bytes(&other), Err(Error::Format(_))));
    assert!(matches!(from_bytes(b"MONALG-STATE v1\nalph"), Err(Error::Format(_))));
}

#[test]
fn resumed_build_equals_fresh_build() {
    let g = exproot();
    let cases = [
        (g.clone(), StrategySpec::LexFirst),
        (g.clone(), StrategySpec::Prime),
        (truncexp(), StrategySpec::NonPrime { letter: 0 }),
    ];
    for (g, strategy) in cases {
        let shallow = build(&g, 6, &strategy, &Limits::default()).unwrap();
        let mut resumed = from_bytes(&to_bytes(&shallow)).unwrap();
        extend(&mut resumed, 7).unwrap();
        let fresh = build(&g, 7, &strategy, &Limits::default()).unwrap();
        assert_eq!(to_bytes(&resumed), to_bytes(&fresh), "{strategy}");
    }
    let mut tilde = build(&g, 9, &"tilde".parse().unwrap(), &Limits::default()).unwrap();
    assert!(matches!(extend(&mut tilde, 10), Err(Error::Invalid(_))));
}

#[test]
fn dumps() {
    let st = lex(&exproot(), 4);
    let text = dump_level(&st, 2, 1000).unwrap();
    let (c, words) = parse_dump(&text).unwrap();
    assert_eq!(words, ["aaaa", "aaab", "aaba", "aabb"].map(w));
    assert!(c.unwrap().iter().all(|x| x.starts_with(&w("aa"))));
    for n in 0..=4 {
        let (c, words) = parse_dump(&dump_level(&st, n, 1 << 20).unwrap()).unwrap();
        assert_eq!(words, st.w_words(n).unwrap());
        assert_eq!(c, (n < 4).then(|| st.c_words(n).unwrap()));
    }
    assert!(matches!(dump_level(&st, 5, 1000), Err(Error::Invalid(_))));
}
