use proptest::prelude::*;
use std::f64::consts::TAU;
use twisted_moments::constants::{eval_constant, ConstantId, Predictor, Regime, ENVELOPE_EPSILON};
use twisted_moments::dirichlet::{dirichlet_d, CutoffRule};
use twisted_moments::lattice::{enumerate_bruteforce, enumerate_parametrized, is_solution, BoxSpec, ParametrizationData};
use twisted_moments::moment::{oscillatory_primitive, Variant};
use twisted_moments::special_functions::{zeta_real, EvalConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parametrized_equals_bruteforce(
        a in 1u32..7, b in 1u32..9, c in 1u32..9,
        theta in 0.2f64..0.95, log_t in 2.0f64..10.0,
    ) {
        prop_assume!(ParametrizationData::new(a, b, c).is_ok());
        let bx = BoxSpec::new(a, b, c, theta, log_t.exp()).unwrap();
        let brute = enumerate_bruteforce(&bx).unwrap();
        let par = enumerate_parametrized(&bx).unwrap();
        prop_assert_eq!(&brute.triples, &par.triples);
        for t in &par.triples {
            prop_assert!(is_solution(a, b, c, t) && bx.contains(t));
        }
    }

    #[test]
    fn cutoff_agrees_with_breakpoints(theta in 0.1f64..1.0, twist in 1u32..12, n in 1usize..2000) {
        let r = CutoffRule::new(theta, twist).unwrap();
        let bp = r.breakpoint(n);
        prop_assert_eq!(r.cutoff(bp), n);
        prop_assert_eq!(r.cutoff(bp * (1.0 - 1e-12)), n - 1);
    }

    #[test]
    fn dirichlet_conjugate_symmetry(theta in 0.2f64..1.0, twist in 1u32..5, t in 1.0f64..5e4) {
        let r = CutoffRule::new(theta, twist).unwrap();
        let x = dirichlet_d(&r, 0.5, t);
        let y = dirichlet_d(&r, 0.5, -t);
        prop_assert_eq!(x.cutoff_integer, y.cutoff_integer);
        prop_assert!((x.value - y.value.conj()).norm() <= 1e-12 * (1.0 + x.value.norm()));
    }

    #[test]
    fn primitive_of_reciprocal_is_conjugate(x in 0.01f64..100.0, t0 in 0.0f64..1e3, len in 0.0f64..1e3) {
        let p = oscillatory_primitive(x, t0, t0 + len);
        let q = oscillatory_primitive(1.0 / x, t0, t0 + len);
        prop_assert!((p - q.conj()).norm() <= 1e-9 * (1.0 + len));
        prop_assert!(p.norm() <= len * (1.0 + 1e-12));
    }

    #[test]
    fn dominance_matches_closed_form(
        a in 1u32..5, b in 1u32..12, c in 1u32..12, theta in 0.05f64..0.95, squared in any::<bool>(),
    ) {
        let v = if squared { Variant::SquaredTwist } else { Variant::SingleTwist };
        if let Ok(p) = Predictor::new(a, b, c, theta, v) {
            let (hi, lo) = (b.max(c) as f64, b.min(c) as f64);
            let af = a as f64;
            // theta below which every secondary exponent clears every envelope exponent
            let cap = match p.regime {
                Regime::UnitDistinct | Regime::UnitEqual => hi / (2.0 * hi - 1.0),
                Regime::SquaredDistinct | Regime::SquaredEqual => hi / (3.0 * hi - 1.0),
                Regime::UnitLog => f64::INFINITY,
                Regime::UnitQuadratic | Regime::TwistedCoprime => f64::NAN,
                Regime::TwistedDivisible => {
                    let r = if b.max(c) % a == 0 { hi } else { lo };
                    let k = 1.0 - af / (2.0 * r);
                    (0.5 / k).min((1.0 - ENVELOPE_EPSILON) / (k + 3.0 * af / (2.0 * lo)))
                }
            };
            let rep = p.report(1e6);
            if cap.is_nan() {
                prop_assert!(rep.secondary.is_empty());
            } else {
                prop_assume!((theta - cap).abs() > 1e-9);
                prop_assert_eq!(rep.dominance_ok(), theta < cap);
            }
            let q = Predictor::new(a, c, b, theta, v).unwrap();
            prop_assert_eq!(rep, q.report(1e6));
        }
    }

    #[test]
    fn c_scales_through_q(a in 1u32..4, dr in 1u32..6, s in 1u32..9, theta in 0.1f64..0.9, log_t in 3.0f64..14.0) {
        let r = a + dr;
        prop_assume!(!(a == 1 && r == s));
        let t = log_t.exp();
        let (af, rf, sf) = (a as f64, r as f64, s as f64);
        let lam = 2.0 / theta - 1.0;
        let lhs = eval_constant(ConstantId::Cars { a, r, s }, theta).unwrap() * t.powf(1.0 - theta * (0.5 - af / (2.0 * rf)));
        let q = (af * t / TAU).powf(theta);
        let z = zeta_real(af * sf / (2.0 * rf) + af / 2.0, &EvalConfig::constants()).unwrap();
        let rhs = 4.0 * rf * af / (theta * (rf - af) * (lam * rf + af)) * z * t * q.powf(-0.5 + af / (2.0 * rf));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }

    #[test]
    fn h_families_are_sums(r in 2u32..20, theta in 0.05f64..0.95) {
        use ConstantId::*;
        let e = |id| eval_constant(id, theta).unwrap();
        prop_assert_eq!(e(H0 { r }), e(E0 { r }) + e(F0 { r }));
        prop_assert_eq!(e(H1 { r }), e(E1 { r }) + e(F1 { r }));
        prop_assert_eq!(e(H0Prime { r }), e(E0Prime { r }) + e(F0Prime { r }));
        prop_assert_eq!(e(H1Prime { r }), e(E1Prime { r }) + e(F1Prime { r }));
    }
}

#[test]
fn kabc_equals_sigma_when_a_divides() {
    for (a, b, c) in [(2, 4, 3), (2, 3, 4), (3, 6, 4), (3, 9, 5), (4, 8, 5)] {
        let k = eval_constant(ConstantId::Kabc { a, b, c }, 0.5).unwrap();
        let s = eval_constant(ConstantId::SigmaAbc { a, b, c }, 0.5).unwrap();
        assert!((k - s).abs() <= 1e-9 * k, "({a},{b},{c}): {k} vs {s}");
    }
}

#[test]
fn dominance_can_fail_inside_the_hypotheses() {
    // 1 - θ/4 < 1/2 + θ/2 once θ > 2/3
    let p = Predictor::new(1, 2, 2, 0.71, Variant::SingleTwist).unwrap();
    assert!(!p.report(1e6).dominance_ok());
    assert!(Predictor::new(1, 2, 2, 0.6, Variant::SingleTwist).unwrap().report(1e6).dominance_ok());
}
