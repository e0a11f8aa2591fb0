use num_complex::Complex64;
use std::f64::consts::PI;

use crate::arith::Dd;

/// Even-index Bernoulli numbers B_2, B_4, ..., B_50.
pub(crate) const BERNOULLI_EVEN: [f64; 25] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -15116315767.092157,
    429614643061.1667,
    -13711655205088.332,
    488332318973593.2,
    -1.9296579341940068e16,
    8.416930475736826e17,
    -4.0338071854059454e19,
    2.1150748638081993e21,
    -1.2086626522296526e23,
    7.500866746076964e24,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for (k, b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        let k = (k + 1) as f64;
        corr += p * (b / (2.0 * k * (2.0 * k - 1.0)));
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + corr
}

/// Logarithm of Γ(z).
///
/// For `Re z > 0` the result is the branch continuous from the positive
/// real axis; for `Re z <= 0` it is some logarithm of Γ(z), which is all the
/// callers exponentiate.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re <= 0.0 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let w = z * PI;
        let ln_sin = if w.im >= 0.0 {
            -Complex64::i() * w + ((Complex64::i() * w * 2.0).exp() - 1.0).ln()
                - Complex64::new(0.0, 2.0).ln()
        } else {
            Complex64::i() * w + (1.0 - (-Complex64::i() * w * 2.0).exp()).ln()
                - Complex64::new(0.0, 2.0).ln()
        };
        return Complex64::new(PI.ln(), 0.0) - ln_sin - ln_gamma(1.0 - z);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 12.0 {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

/// Riemann–Siegel theta function θ(t) = arg Γ(1/4 + it/2) − (t/2) log π.
///
/// Odd in t.  The large-t branch keeps the leading terms in double-double so
/// that `θ(t) mod 2π` stays accurate to ~1e-15 at t ~ 1e6.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    if t < 0.0 {
        return -riemann_siegel_theta(-t);
    }
    if t < 24.0 {
        return ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln();
    }
    theta_asymptotic(t).to_f64()
}

/// θ(t) reduced modulo 2π, for phase factors at large heights.
pub(crate) fn theta_mod_2pi(t: f64) -> f64 {
    if t.abs() < 24.0 {
        let th = riemann_siegel_theta(t);
        return th - (th / std::f64::consts::TAU).round() * std::f64::consts::TAU;
    }
    let th = theta_asymptotic(t.abs()).rem_two_pi();
    if t < 0.0 {
        -th
    } else {
        th
    }
}

fn theta_asymptotic(t: f64) -> Dd {
    // (t/2) log(t/2π) - t/2 - π/8 + Σ c_k / t^(2k-1)
    let ln_t = Dd::ln_f64(t);
    let ln_2pi = Dd {
        hi: 1.837_877_066_409_345_6,
        lo: -7.756_588_316_134_483e-17,
    };
    let main = ln_t.sub(ln_2pi).sub(Dd::new(1.0)).mul_f64(0.5 * t);
    let r = 1.0 / t;
    let r2 = r * r;
    let tail = r
        * (1.0 / 48.0
            + r2 * (7.0 / 5760.0
                + r2 * (31.0 / 80640.0
                    + r2 * (127.0 / 430080.0 + r2 * (511.0 / 1216512.0 + r2 * 1414477.0 / 1476034560.0)))));
    main.add(Dd::new(-PI / 8.0)).add(Dd::new(tail))
}

/// χ(1/2 + it) = exp(−2iθ(t)).
pub fn chi_half(t: f64) -> Complex64 {
    let th = theta_mod_2pi(t);
    let (s, c) = (2.0 * th).sin_cos();
    Complex64::new(c, -s)
}

/// χ(s) = 2^{s−1} π^s sec(πs/2) / Γ(s) for general complex s, via log-Gamma.
///
/// Used as an independent cross-check of [`chi_half`].
pub fn chi_general(s: Complex64) -> Complex64 {
    // sec(πs/2) = 2 / (e^{iπs/2} + e^{-iπs/2}), evaluated in log form
    let w = s * (PI / 2.0);
    let ln_cos = if w.im >= 0.0 {
        -Complex64::i() * w + ((Complex64::i() * w * 2.0).exp() + 1.0).ln() - 2f64.ln()
    } else {
        Complex64::i() * w + ((-Complex64::i() * w * 2.0).exp() + 1.0).ln() - 2f64.ln()
    };
    let ln_chi = (s - 1.0) * 2f64.ln() + s * PI.ln() - ln_cos - ln_gamma(s);
    ln_chi.exp()
}
