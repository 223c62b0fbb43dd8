use monalg::growth::*;
use num_bigint::BigUint;
use proptest::prelude::*;

fn b(v: u64) -> BigUint {
    BigUint::from(v)
}

fn bs(v: &[u64]) -> Vec<BigUint> {
    v.iter().map(|&x| b(x)).collect()
}

fn exproot() -> GrowthSpec {
    "exproot:d=2,beta=1/2".parse().unwrap()
}

#[test]
fn eval_examples() {
    assert_eq!(exproot().eval(1).unwrap(), b(2));
    assert_eq!(exproot().eval(4).unwrap(), b(4));
    let ne: GrowthSpec = "nearexp:d=2,eps=1/2".parse().unwrap();
    assert_eq!(ne.eval(4).unwrap(), b(6));
    assert_eq!(ne.eval(1).unwrap(), b(2));
}

#[test]
fn admissibility_of_exp_root() {
    let r = check_admissible(&exproot(), 16, 64).unwrap();
    assert!(r.all_pass(), "{r:?}");
    // With C = 4 the doubling inequality only starts to hold at n = 16:
    // f(20) = 2^5 < 5 * f(5) = 5 * 2^3.
    let r = check_admissible(&exproot(), 4, 64).unwrap();
    assert!(r.monotone.pass && r.submultiplicative.pass);
    assert!(r.doubling_superlinear.witness.as_ref().unwrap().starts_with("n = 5:"));
    assert!(!r.strict_at_powers_of_two.pass);
}

#[test]
fn linear_growth_fails_doubling() {
    let vals: Vec<u64> = (1..=512).map(|n| 2 * n).collect();
    let g = GrowthSpec::table(bs(&vals)).unwrap();
    let r = check_admissible(&g, 4, 64).unwrap();
    assert!(!r.doubling_superlinear.pass);
    // first violation: f(20) = 40 < 5 * f(5) = 50
    assert!(r.doubling_superlinear.witness.as_ref().unwrap().starts_with("n = 5:"));
}

#[test]
fn near_one_exp_is_monotone() {
    let ne: GrowthSpec = "nearexp:d=2,eps=1/2".parse().unwrap();
    let r = check_admissible(&ne, 1, 8).unwrap();
    assert!(r.monotone.pass);
}

#[test]
fn size_table_examples() {
    let t = level_sizes(&exproot(), 3).unwrap();
    assert_eq!(t.c_size, bs(&[2, 1, 2, 2]));
    assert_eq!(t.w_size, bs(&[2, 4, 4, 8]));
    let te = GrowthSpec::truncated_exp(3).unwrap();
    let t = level_sizes(&te, 3).unwrap();
    assert_eq!(t.c_size, bs(&[2, 4, 16, 256]));
    assert_eq!(t.w_size, bs(&[3, 6, 24, 384]));
}

#[test]
fn size_table_dominates_f() {
    let g = exproot();
    let t = level_sizes(&g, 12).unwrap();
    for n in 0..=12 {
        assert!(t.w_size[n] >= g.at_pow2(n).unwrap());
        assert!(t.c_size[n] <= t.w_size[n]);
    }
}

#[test]
fn mu_examples() {
    let g = exproot();
    let t = level_sizes(&g, 10).unwrap();
    let mus: Vec<usize> = (0..4).map(|n| mu_of(&g, &t, n, 10).unwrap()).collect();
    assert_eq!(mus, vec![2, 4, 5, 6]);
    let (all, _) = mu_table(&g, &t, 10).unwrap();
    for w in all.windows(2) {
        assert!(w[0] < w[1]);
    }
    for (n, m) in all.iter().enumerate() {
        assert!(*m > n);
    }
}

#[test]
fn mu_of_linear_growth_exhausts() {
    let vals: Vec<u64> = (1..=1 << 12).map(|n| 2 * n).collect();
    let g = GrowthSpec::table(bs(&vals)).unwrap();
    let t = level_sizes(&g, 8).unwrap();
    assert!(matches!(mu_of(&g, &t, 3, 10), Err(monalg::Error::HorizonExhausted(_))));
}

#[test]
fn theta_examples() {
    let g = exproot();
    let q = parse_rational("1/4").unwrap();
    assert_eq!(theta_of(&g, 2, &q, 0, 12).unwrap(), 6);
    let one = parse_rational("1").unwrap();
    assert_eq!(theta_of(&g, 2, &one, 0, 12).unwrap(), 4);
    assert!(matches!(
        theta_of(&g, 2, &q, 6, 12),
        Err(monalg::Error::HorizonExhausted(_))
    ));
}

#[test]
fn theta_monotonicity_grid() {
    let g = exproot();
    let eps: Vec<_> = ["1/8", "1/4", "1/2", "1", "2"]
        .iter()
        .map(|s| parse_rational(s).unwrap())
        .collect();
    for i in 0..3 {
        for w in eps.windows(2) {
            let a = theta_of(&g, 2, &w[0], i, 13).unwrap();
            let c = theta_of(&g, 2, &w[1], i, 13).unwrap();
            assert!(a >= c, "theta must not increase with eps");
        }
    }
    for e in &eps {
        let a = theta_of(&g, 2, e, 0, 13).unwrap();
        let c = theta_of(&g, 2, e, 1, 13).unwrap();
        assert!(a <= c, "theta must not decrease with i");
    }
}

#[test]
fn regularize_examples() {
    let g = exproot();
    assert!(regularize(&g, 1).is_err());
    let r2 = regularize(&g, 2).unwrap();
    assert_eq!(r2.t, 1);
    for n in 1..20 {
        assert_eq!(r2.ceil_at(n).unwrap(), Some(g.eval(n).unwrap()));
    }
    let r = regularize(&g, 4).unwrap();
    assert_eq!(r.t, 2);
    assert_eq!(r.ceil_at(4).unwrap(), Some(b(8)));
    assert!(r.sandwich(64).unwrap().pass);
}

proptest! {
    #[test]
    fn exp_root_is_nondecreasing(n in 1u64..2000) {
        let g = exproot();
        prop_assert!(g.eval(n).unwrap() <= g.eval(n + 1).unwrap());
    }

    #[test]
    fn near_one_exp_matches_float(n in 1u64..60) {
        let g: GrowthSpec = "nearexp:d=2,eps=1/2".parse().unwrap();
        let v = g.eval(n).unwrap();
        let approx = 1.5f64.powi(n as i32);
        let vf: f64 = v.to_string().parse().unwrap();
        prop_assert!(vf >= approx * (1.0 - 1e-12) && vf <= approx + 1.0 + approx * 1e-12);
    }

    #[test]
    fn table_spec_round_trips(vals in proptest::collection::vec(1u64..1000, 1..10)) {
        let mut v = vec![2u64];
        v.extend(vals);
        let g = GrowthSpec::table(bs(&v)).unwrap();
        let back: GrowthSpec = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }
}
