use std::f64::consts::TAU;
use twisted_moments::lattice::*;
use twisted_moments::special_functions::{zeta_real, EvalConfig};

fn zeta(s: f64) -> f64 {
    zeta_real(s, &EvalConfig::constants()).unwrap()
}

/// Coefficient triples covering a = 1, a | b, a | c, no divisibility and A > 1.
const TRIPLES: &[(u32, u32, u32)] = &[
    (1, 1, 1), (1, 2, 1), (1, 3, 2), (1, 4, 4), (2, 4, 3), (2, 3, 4), (2, 5, 3),
    (2, 3, 3), (2, 1, 1), (3, 6, 4), (3, 5, 4), (3, 2, 2), (3, 4, 5), (4, 6, 3),
    (4, 6, 5), (4, 3, 5), (5, 3, 2), (6, 4, 3), (6, 5, 7), (6, 2, 3), (6, 8, 9),
    (10, 4, 5), (12, 8, 9), (2, 7, 5),
];

#[test]
fn threshold_examples() {
    let bx = BoxSpec::new(1, 2, 3, 0.5, 1e4).unwrap();
    assert!((weight_threshold(&LatticeTriple::new(1, 1, 1), &bx) - TAU).abs() < 1e-12);
    assert!((weight_threshold(&LatticeTriple::new(4, 1, 1), &bx) - 32.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn small_box_example() {
    // Q = 5 and n2, n3 <= 100 at T = 2π·2500
    let t = TAU * 2500.0;
    let theta = 5f64.ln() / 5000f64.ln();
    let bx = BoxSpec::new(2, 4, 3, theta, t * (1.0 + 1e-12)).unwrap();
    assert_eq!(bx.n1_max(), 5);
    assert_eq!(bx.n2_max(), 100);
    let s = enumerate_bruteforce(&bx).unwrap();
    assert_eq!(s.triples, vec![LatticeTriple::new(1, 1, 1), LatticeTriple::new(4, 2, 1)]);
    assert!(enumerate_parametrized(&bx).unwrap().same_triples(&s));
}

#[test]
fn empty_box_and_a_equal_one() {
    let bx = BoxSpec::new(1, 2, 3, 0.5, 5.0).unwrap();
    assert!(enumerate_bruteforce(&bx).unwrap().triples.is_empty());
    let bx = BoxSpec::new(1, 2, 3, 0.5, TAU * 400.0).unwrap();
    let s = enumerate_bruteforce(&bx).unwrap();
    for t in &s.triples {
        assert_eq!(t.n1, t.n2.pow(2) * t.n3.pow(3));
    }
    let expected = (1..=20u64)
        .flat_map(|n2| (1..=20u64).map(move |n3| (n2, n3)))
        .filter(|&(n2, n3)| n2 * n2 * n3 * n3 * n3 <= 20)
        .count();
    assert_eq!(s.triples.len(), expected);
}

#[test]
fn parametrized_matches_bruteforce() {
    for &(a, b, c) in TRIPLES {
        for &(theta, t) in &[(0.5, 3e5), (0.9, 2e4), (0.3, 1e6)] {
            let bx = BoxSpec::new(a, b, c, theta, t).unwrap();
            let brute = enumerate_bruteforce(&bx).unwrap();
            let par = enumerate_parametrized(&bx).unwrap();
            assert_eq!(brute.triples, par.triples, "({a},{b},{c}) θ={theta} T={t}");
            for s in &par.triples {
                assert!(is_solution(a, b, c, s));
            }
        }
    }
}

#[test]
fn alpha_unique() {
    for &(a, b, c) in TRIPLES {
        let pd = ParametrizationData::new(a, b, c).unwrap();
        assert_eq!(pd.alpha.len() as u32, pd.big_a.saturating_sub(1));
    }
    assert!(ParametrizationData::new(2, 4, 6).is_err());
}

#[test]
fn sigma_closed_forms() {
    let s = sigma_trunc(2, 4, 3, 1e-10).unwrap();
    assert!((s.value - zeta(1.5) * zeta(2.5)).abs() < 1e-10, "{s:?}");
    let s = sigma_trunc(2, 5, 3, 1e-10).unwrap();
    let want = zeta(3.5) * zeta(2.5) * zeta(3.0) / zeta(6.0);
    assert!((s.value - want).abs() < 1e-10, "{} vs {want}", s.value);
    let s = sigma_trunc(1, 3, 2, 1e-10).unwrap();
    assert!((s.value - zeta(2.0) * zeta(1.5)).abs() < 1e-10);
}

#[test]
fn sigma_partial_is_monotone_and_bounded() {
    for &(a, b, c) in &[(2, 4, 3), (2, 5, 3), (3, 5, 4)] {
        let mut prev: Option<SigmaTrunc> = None;
        for m in [4u64, 16, 64, 256, 1024, 4096] {
            let s = sigma_partial(a, b, c, m).unwrap();
            if let Some(p) = prev {
                assert!(s.partial >= p.partial);
                assert!(s.partial - p.partial <= p.partial_tail_bound);
            }
            prev = Some(s);
        }
    }
}

#[test]
fn j_identity() {
    for &(a, b, c, theta, t) in &[
        (1, 3, 2, 0.5, TAU * 1e4),
        (2, 4, 3, 0.5, TAU * 1e4),
        (2, 5, 3, 0.5, TAU * 1e5),
        (1, 2, 2, 0.4, 5e4),
        (3, 5, 4, 0.7, 1e6),
    ] {
        let bx = BoxSpec::new(a, b, c, theta, t).unwrap();
        let j = j_terms(&bx).unwrap();
        assert!(j.relative_residual <= 1e-8, "{j:?}");
        assert!(j.j1 > 0.0 && j.j3 > 0.0 && j.j4 > 0.0);
    }
    let bx = BoxSpec::new(2, 3, 4, 0.5, 1e4).unwrap();
    assert!(j_terms(&bx).is_err());
}

#[test]
fn s_sums_examples() {
    assert_eq!(s_sums(SKind::Sb { b: 2 }, 0.5), 0.0);
    assert_eq!(s_sums(SKind::Sb { b: 2 }, 1.0), 1.0);
    let mut direct = 0.0;
    for m3 in 1..=10u64 {
        for m2 in 1..=10u64 {
            if m2 * m2 * m3 <= 10 {
                direct += 1.0 / m3 as f64 * (m2 as f64).powf(-1.5);
            }
        }
    }
    assert!((s_sums(SKind::Sb { b: 2 }, 10.0) - direct).abs() < 1e-14);
    let mut direct = 0.0;
    for r2 in 1..=50u64 {
        for r3 in 1..=50u64 {
            for r4 in 1..=50u64 {
                if r2.pow(3) * r3.pow(2) * r4 <= 50 {
                    direct += 1.0 / r4 as f64 * (r2 as f64).powf(-2.0) * (r3 as f64).powf(-1.5);
                }
            }
        }
    }
    assert!((s_sums(SKind::Sbc { b: 3, c: 2 }, 50.0) - direct).abs() < 1e-13);
}

#[test]
fn scan_examples() {
    let rows = conjecture_scan(2, 4, 3, 3, 0.01, 1000).unwrap();
    assert!(rows.iter().all(|r| r.d != 0));
    let r = rows.iter().find(|r| (r.n1, r.n2, r.n3) == (3, 1, 1)).unwrap();
    assert_eq!(r.d, 8);
    assert!((r.ratio - 8.0 / 3f64.powf(0.99)).abs() < 1e-12);
    let one = conjecture_scan(1, 1, 1, 1, 0.0, 10).unwrap();
    assert!(one.is_empty());
    let a = conjecture_scan(2, 5, 3, 60, 0.01, 20).unwrap();
    let b = conjecture_scan(2, 5, 3, 60, 0.01, 20).unwrap();
    assert_eq!(a, b);
    assert!(a.windows(2).all(|w| w[0].ratio <= w[1].ratio));
}
