#![allow(clippy::excessive_precision)]

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use twisted_moments::special_functions::*;

/// ζ(1/2 + it) from a 30-digit reference implementation.
const ZETA_REF: &[(f64, f64, f64)] = &[
    (0.0, -1.4603545088095868129, 0.0),
    (1.0, 0.14393642707718906032, -0.72209974353167308913),
    (7.5, 1.1291091838090642166, 0.392406583197541295),
    (14.134725142, -3.3083717770208576853e-11, 2.0781392243499655959e-10),
    (21.0, -0.0051620646381019009048, -0.024546964575121902878),
    (50.0, -0.081712108320979975048, 0.33079219403866129559),
    (100.0, 2.6926198856813240905, -0.020386029602598161771),
    (333.3, 0.048510892409074267922, -0.99575665973303066364),
    (1000.0, 0.35633436719439605507, 0.93199783123299366512),
    (2500.0, 0.59088389683917756309, 0.40540444247931333476),
    (4999.0, 0.96802177626487623525, -1.0851866384514952442),
    (5001.0, -0.23131057644918343796, 0.67035380408209675289),
    (12345.678, 0.87775548256339308583, -0.037627073720102788411),
    (50000.0, 2.5406587127591122067, 1.5382492420720108027),
    (99999.5, 2.0932412983850437973, 1.6395033255833794078),
    (250000.0, 0.71761377863815055207, -0.31960099884577270389),
    (1000000.0, 0.076089069738227100006, 2.8051021010192989554),
];

#[test]
fn zeta_critical_matches_reference() {
    let cfg = EvalConfig::default();
    for &(t, re, im) in ZETA_REF {
        let z = zeta_critical(t, &cfg).unwrap();
        let err = (z - Complex64::new(re, im)).norm();
        assert!(err < 1e-9, "t={t}: got {z}, error {err:e}");
    }
}

#[test]
fn zeta_critical_reflection() {
    let cfg = EvalConfig::default();
    for &t in &[3.3, 77.0, 6000.0] {
        let a = zeta_critical(t, &cfg).unwrap();
        let b = zeta_critical(-t, &cfg).unwrap();
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-15);
        assert_abs_diff_eq!(a.im, -b.im, epsilon = 1e-15);
    }
}

#[test]
fn first_zero() {
    let z = zeta_critical(14.134725142, &EvalConfig::default()).unwrap();
    assert!(z.norm() < 1e-6);
}

#[test]
fn tail_estimate_is_monotone_in_cap() {
    for &t in &[40.0, 900.0, 4000.0, 20000.0] {
        let mut prev = f64::INFINITY;
        for cap in [16usize, 24, 32, 64, 128, 256, 512, 1024, 2048, 4096] {
            let cfg = EvalConfig::new(1e-8, cap).unwrap();
            let e = zeta_critical_estimate(t, &cfg).error;
            assert!(e <= prev, "t={t} cap={cap}: {e:e} > {prev:e}");
            prev = e;
        }
    }
}

#[test]
fn small_cap_is_reported() {
    let cfg = EvalConfig::new(1e-10, 16).unwrap();
    assert!(matches!(
        zeta_critical(3000.0, &cfg),
        Err(twisted_moments::Error::AccuracyUnreachable { .. })
    ));
}

#[test]
fn chi_special_values() {
    let c0 = chi_half(0.0);
    assert_abs_diff_eq!(c0.re, 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(c0.im, 0.0, epsilon = 1e-14);
    // (2π/t)^{it} e^{it + iπ/4} for large t
    let t = 100.0f64;
    let approx = Complex64::from_polar(1.0, t * (std::f64::consts::TAU / t).ln() + t + std::f64::consts::FRAC_PI_4);
    assert!((chi_half(t) - approx).norm() < 1e-2);
}

#[test]
fn theta_reference_values() {
    // θ(t) from a 30-digit reference
    let refs = [
        (1.0, -1.76754795281229038830),
        (10.0, -3.06707439628989529170),
        (100.0, 87.9721652317872196255),
        (1000.0, 2034.54642803803160870),
    ];
    for (t, v) in refs {
        assert!((riemann_siegel_theta(t) - v).abs() < 1e-11 * v.abs().max(1.0), "t={t}");
    }
}

#[test]
fn real_zeta_reference() {
    let cfg = EvalConfig::constants();
    let cases = [
        (2.0, std::f64::consts::PI.powi(2) / 6.0),
        (1.5, 2.61237534868548834334856756792),
        (0.75, -3.44128538694522289439513996071),
        (1.25, 4.59511182584294338068537803969),
        (5.0 / 6.0, -5.43505323737082086425812431268),
    ];
    for (s, v) in cases {
        assert_abs_diff_eq!(zeta_real(s, &cfg).unwrap(), v, epsilon = 1e-12);
    }
    assert!(zeta_real(1.0, &cfg).is_err());
    assert!(zeta_real(0.0, &cfg).is_err());
}

#[test]
fn real_zeta_derivative_reference() {
    let cfg = EvalConfig::constants();
    let cases = [
        (2.0, -0.937548254315843753702574094568),
        (1.5, -3.93223973743110151070638857841),
        (0.75, -15.9248319286904863632305139377),
    ];
    for (s, v) in cases {
        assert_abs_diff_eq!(zeta_real_deriv(s, &cfg).unwrap(), v, epsilon = 1e-11);
    }
    let big = zeta_real_deriv(24.0, &cfg).unwrap();
    let lead = -std::f64::consts::LN_2 * 2f64.powi(-24);
    assert!((big / lead - 1.0).abs() < 0.01);
    let h = 1e-5;
    let fd = (zeta_real(1.5 + h, &cfg).unwrap() - zeta_real(1.5 - h, &cfg).unwrap()) / (2.0 * h);
    assert_abs_diff_eq!(fd, zeta_real_deriv(1.5, &cfg).unwrap(), epsilon = 1e-6);
}

#[test]
fn euler_and_stieltjes() {
    let (g, g1) = gamma_constants();
    assert_abs_diff_eq!(g, 0.577215664901532860606512090082, epsilon = 1e-14);
    assert_abs_diff_eq!(g1, 0.0728158454836767248605863758749, epsilon = 1e-13);
    assert!(g1 > 0.0);
}
