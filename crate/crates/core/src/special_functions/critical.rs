use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use super::gamma::{chi_half, theta_mod_2pi, BERNOULLI_EVEN};
use super::EvalConfig;
use crate::arith::{half_line_sum, phase, Dd};
use crate::error::{Error, Result};

/// Heights above this use the Riemann–Siegel formula.
pub const RS_THRESHOLD: f64 = 5000.0;

/// A value together with an estimate of its absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// ζ(1/2+it) split along the approximate functional equation.
///
/// `zeta = d + chi * conj(d) + remainder` where `d = Σ_{n ≤ √(t/2π)} n^{-1/2-it}`.
#[derive(Clone, Copy, Debug)]
pub struct CriticalParts {
    pub zeta: Complex64,
    pub d: Complex64,
    pub chi: Complex64,
    pub error: f64,
}

const POLY_DEGREE: usize = 64;
const CAUCHY_POINTS: usize = 256;

/// Taylor coefficients (in x = p − 1/2) of the Riemann–Siegel corrections C0..C4.
fn rs_polys() -> &'static [[f64; POLY_DEGREE]; 5] {
    static P: OnceLock<[[f64; POLY_DEGREE]; 5]> = OnceLock::new();
    P.get_or_init(|| {
        // Ψ(1/2 + x) = −cos(2πx² − 5π/8) / cos(2πx), entire in x
        let m = CAUCHY_POINTS;
        let mut buf: Vec<Complex64> = (0..m)
            .map(|j| {
                let x = Complex64::from_polar(1.0, TAU * j as f64 / m as f64);
                -(x * x * TAU - 5.0 * PI / 8.0).cos() / (x * TAU).cos()
            })
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        // radius 1, so coefficient n is buf[n] / m
        let psi: Vec<f64> = buf.iter().map(|z| z.re / m as f64).collect();

        // coefficients of the k-th derivative as a power series in x
        let deriv = |k: usize| -> [f64; POLY_DEGREE] {
            let mut out = [0.0; POLY_DEGREE];
            for (n, o) in out.iter_mut().enumerate() {
                if n + k >= m / 2 {
                    break;
                }
                let mut f = 1.0;
                for j in 1..=k {
                    f *= (n + j) as f64;
                }
                *o = psi[n + k] * f;
            }
            out
        };
        let p2 = PI * PI;
        let p4 = p2 * p2;
        let p6 = p4 * p2;
        let p8 = p4 * p4;
        let combos: [Vec<(usize, f64)>; 5] = [
            vec![(0, 1.0)],
            vec![(3, -1.0 / (96.0 * p2))],
            vec![(2, 1.0 / (64.0 * p2)), (6, 1.0 / (18432.0 * p4))],
            vec![
                (1, -1.0 / (64.0 * p2)),
                (5, -1.0 / (3840.0 * p4)),
                (9, -1.0 / (5308416.0 * p6)),
            ],
            vec![
                (0, 1.0 / (128.0 * p2)),
                (4, 19.0 / (24576.0 * p4)),
                (8, 11.0 / (5898240.0 * p6)),
                (12, 1.0 / (2038431744.0 * p8)),
            ],
        ];
        let mut out = [[0.0; POLY_DEGREE]; 5];
        for (k, combo) in combos.iter().enumerate() {
            for &(d, w) in combo {
                let c = deriv(d);
                for n in 0..POLY_DEGREE {
                    out[k][n] += w * c[n];
                }
            }
        }
        out
    })
}

#[cfg(test)]
fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// Riemann–Siegel remainder with `n = ⌊√(t/2π)⌋` and its truncation error.
///
/// The caller multiplies by `exp(−iθ(t))`.  `n` may sit one off the floor at
/// segment ends; the correction polynomials are entire, so this stays continuous.
pub(crate) fn rs_remainder(t: f64, n: usize) -> (f64, f64) {
    let tau = t / TAU;
    let a = tau.sqrt();
    let x = a - n as f64 - 0.5;
    let (len, table) = rs_table();
    let mut acc = [0.0f64; 5];
    for row in table[..*len].iter().rev() {
        for k in 0..5 {
            acc[k] = acc[k] * x + row[k];
        }
    }
    let inv = 1.0 / a;
    let mut r = 0.0;
    let mut pw = 1.0;
    let mut last = 0.0;
    for v in acc {
        last = v * pw;
        r += last;
        pw *= inv;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let scale = 1.0 / a.sqrt();
    // next correction is roughly an order of magnitude below C4 at τ^{-5/2}
    let trunc = scale * (last.abs() + 1e-6 * pw) * inv;
    (sign * scale * r, trunc)
}

/// Coefficients of C0..C4 interleaved by degree, trimmed for |x| <= 0.55
/// and heights above the Riemann–Siegel threshold.
fn rs_table() -> &'static (usize, Vec<[f64; 5]>) {
    static T: OnceLock<(usize, Vec<[f64; 5]>)> = OnceLock::new();
    T.get_or_init(|| {
        let polys = rs_polys();
        let a_min = (RS_THRESHOLD / TAU).sqrt();
        let len = (0..5)
            .map(|k| {
                let p = &polys[k];
                let mut n = POLY_DEGREE;
                while n > 1 && p[n - 1].abs() * 0.55f64.powi(n as i32 - 1) < 1e-17 * a_min.powi(k as i32) {
                    n -= 1;
                }
                n
            })
            .max()
            .unwrap();
        let table = (0..POLY_DEGREE).map(|n| std::array::from_fn(|k| polys[k][n])).collect();
        (len, table)
    })
}

pub(crate) fn rs_rounding(n: usize) -> f64 {
    4.0 * f64::EPSILON * (1.0 + (n as f64).sqrt()) * (1.0 + (n as f64).ln())
}

/// Riemann–Siegel evaluation for t > 0 large enough that N ≥ 1.
fn riemann_siegel(t: f64) -> CriticalParts {
    let n = (t / TAU).sqrt().floor() as usize;
    let (remainder, trunc) = rs_remainder(t, n);
    let d = half_line_sum(t, n);
    let th = theta_mod_2pi(t);
    let (s1, c1) = th.sin_cos();
    let e_minus = Complex64::new(c1, -s1);
    let chi = e_minus * e_minus;
    let zeta = d + chi * d.conj() + e_minus * remainder;
    CriticalParts {
        zeta,
        d,
        chi,
        error: trunc + rs_rounding(n),
    }
}

/// Euler–Maclaurin at s = 1/2 + it with `n` main terms.
fn euler_maclaurin(t: f64, n: usize) -> Estimate<Complex64> {
    let head = half_line_sum(t, n - 1);
    let nf = n as f64;
    let ph = phase(t, Dd::ln_f64(nf));
    let n_pow = Complex64::from_polar(nf.powf(-0.5), -ph); // N^{-s}
    let tail = em_tail(t, n, n_pow);
    Estimate {
        value: head + tail.value,
        error: tail.error,
    }
}

/// Everything past the head sum `Σ_{m<n} m^{-s}`, given `n_pow = n^{-s}`.
pub(crate) fn em_tail(t: f64, n: usize, n_pow: Complex64) -> Estimate<Complex64> {
    let s = Complex64::new(0.5, t);
    let nf = n as f64;
    let mut value = n_pow * nf / (s - 1.0) + n_pow * 0.5;

    let inv_n2 = 1.0 / (nf * nf);
    let mut poch = s; // s (s+1) ... (s+2k-2)
    let mut npow = n_pow / nf; // N^{-s-2k+1}
    let mut fact = 2.0; // (2k)!
    let mut best = f64::INFINITY;
    let mut prev_bound = f64::INFINITY;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut best_acc = acc;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = k + 1;
        let term = poch * npow * (b / fact);
        let tm = term.norm();
        let kk = 2.0 * k as f64;
        // remainder after k-1 corrections is bounded by the k-th term times this factor
        let bound = tm * (s + kk - 1.0).norm() / (0.5 + kk - 1.0);
        if bound < best {
            best = bound;
            best_acc = acc;
        }
        if bound > prev_bound || bound < 1e-20 {
            break;
        }
        prev_bound = bound;
        acc += term;
        poch *= (s + kk - 1.0) * (s + kk);
        npow *= inv_n2;
        fact *= (kk + 1.0) * (kk + 2.0);
    }
    if best < 1e-20 {
        best = 0.0;
    }
    value += best_acc;
    Estimate { value, error: best }
}

/// Number of Euler–Maclaurin main terms used when the budget allows it.
pub(crate) fn em_terms(t: f64) -> usize {
    (t.abs() / PI).ceil() as usize + 16
}

pub(crate) fn rounding_floor(t: f64) -> f64 {
    let n = em_terms(t) as f64;
    4.0 * f64::EPSILON * (1.0 + n.sqrt()) * (1.0 + n.ln())
}

/// Estimate of ζ(1/2+it) that never fails; the error may exceed any tolerance.
pub fn zeta_critical_estimate(t: f64, cfg: &EvalConfig) -> Estimate<Complex64> {
    if t < 0.0 {
        let e = zeta_critical_estimate(-t, cfg);
        return Estimate {
            value: e.value.conj(),
            error: e.error,
        };
    }
    let cap = cfg.series_terms_cap;
    if t > RS_THRESHOLD {
        let n_rs = (t / TAU).sqrt().floor() as usize;
        if n_rs <= cap {
            let p = riemann_siegel(t);
            return Estimate {
                value: p.zeta,
                error: p.error,
            };
        }
    }
    let n = em_terms(t).min(cap);
    let e = euler_maclaurin(t, n);
    Estimate {
        value: e.value,
        error: e.error + rounding_floor(t),
    }
}

/// ζ(1/2 + it) to the absolute tolerance of `cfg`.
pub fn zeta_critical(t: f64, cfg: &EvalConfig) -> Result<Complex64> {
    let e = zeta_critical_estimate(t, cfg);
    if e.error > cfg.target_abs_error || !e.value.re.is_finite() || !e.value.im.is_finite() {
        return Err(Error::AccuracyUnreachable {
            requested: cfg.target_abs_error,
            achieved: e.error,
        });
    }
    Ok(e.value)
}

/// ζ(1/2+iu), D_{1/2}(1/2+iu) and χ(1/2+iu) from one evaluation, u ≥ 0.
pub fn critical_parts(u: f64, cfg: &EvalConfig) -> Result<CriticalParts> {
    if u < 0.0 {
        return Err(Error::DomainViolation(format!(
            "critical_parts expects u >= 0, got {u}"
        )));
    }
    let n_rs = (u / TAU).sqrt().floor() as usize;
    let parts = if u > RS_THRESHOLD && n_rs <= cfg.series_terms_cap {
        riemann_siegel(u)
    } else {
        let z = zeta_critical_estimate(u, cfg);
        CriticalParts {
            zeta: z.value,
            d: half_line_sum(u, n_rs),
            chi: chi_half(u),
            error: z.error,
        }
    };
    if parts.error > cfg.target_abs_error {
        return Err(Error::AccuracyUnreachable {
            requested: cfg.target_abs_error,
            achieved: parts.error,
        });
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trimmed_table_is_short() {
        let (len, _) = rs_table();
        assert!(*len < POLY_DEGREE);
    }

    #[test]
    fn c0_at_centre() {
        // Ψ(1/2) = −cos(5π/8)
        let v = horner(&rs_polys()[0], 0.0);
        assert!((v + (5.0 * PI / 8.0).cos()).abs() < 1e-15);
    }

    #[test]
    fn c0_matches_closed_form() {
        for &p in &[0.05, 0.2, 0.33, 0.61, 0.9] {
            let psi = (TAU * (p * p - p - 1.0 / 16.0)).cos() / (TAU * p).cos();
            let v = horner(&rs_polys()[0], p - 0.5);
            assert!((v - psi).abs() < 1e-13, "p={p}");
        }
    }

    #[test]
    fn methods_agree_near_threshold() {
        let cfg = EvalConfig::default();
        for &t in &[5200.0, 7777.7, 10001.0] {
            let rs = riemann_siegel(t).zeta;
            let em = euler_maclaurin(t, em_terms(t)).value;
            assert!((rs - em).norm() < 1e-9, "t={t}: {rs} vs {em}");
            let _ = &cfg;
        }
    }
}
