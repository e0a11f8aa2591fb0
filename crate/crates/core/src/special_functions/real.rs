use super::gamma::BERNOULLI_EVEN;
use super::EvalConfig;
use crate::error::{Error, Result};

const BORWEIN_N: usize = 48;

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::DomainViolation(format!(
            "real zeta needs sigma > 0, got {sigma}"
        )));
    }
    if sigma == 1.0 {
        return Err(Error::DomainViolation("pole of zeta at sigma = 1".into()));
    }
    Ok(())
}

/// Borwein weights e_k = (d_n − d_k) / d_n for the accelerated eta series.
fn borwein_weights() -> &'static [f64; BORWEIN_N] {
    static W: std::sync::OnceLock<[f64; BORWEIN_N]> = std::sync::OnceLock::new();
    W.get_or_init(|| {
        let n = BORWEIN_N;
        // d_k = n Σ_{i≤k} (n+i−1)! 4^i / ((n−i)! (2i)!)
        let mut d = [0.0f64; BORWEIN_N + 1];
        let mut term = 1.0 / n as f64; // i = 0: (n−1)!/n! = 1/n
        let mut sum = term;
        d[0] = n as f64 * sum;
        for i in 1..=n {
            let fi = i as f64;
            term *= (n as f64 + fi - 1.0) * 4.0 * (n as f64 - fi + 1.0) / ((2.0 * fi - 1.0) * 2.0 * fi);
            sum += term;
            d[i] = n as f64 * sum;
        }
        let dn = d[n];
        let mut w = [0.0; BORWEIN_N];
        for k in 0..n {
            w[k] = (dn - d[k]) / dn;
        }
        w
    })
}

/// Accelerated η(σ) and η′(σ).
fn eta_and_deriv(sigma: f64) -> (f64, f64) {
    let w = borwein_weights();
    let (mut eta, mut deta) = (0.0, 0.0);
    for (k, wk) in w.iter().enumerate() {
        let x = (k + 1) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let v = sign * wk * x.powf(-sigma);
        eta += v;
        deta -= v * x.ln();
    }
    (eta, deta)
}

/// Euler–Maclaurin for ζ(σ) and ζ′(σ), valid for any real σ ≠ 1 with σ > −1.
fn em_real(sigma: f64) -> (f64, f64) {
    let n = 16usize;
    let nf = n as f64;
    let ln_n = nf.ln();
    let (mut z, mut dz) = (0.0, 0.0);
    for k in 1..n {
        let x = k as f64;
        let v = x.powf(-sigma);
        z += v;
        dz -= v * x.ln();
    }
    let np = nf.powf(-sigma);
    z += np * nf / (sigma - 1.0) + 0.5 * np;
    dz += -ln_n * np * nf / (sigma - 1.0) - np * nf / ((sigma - 1.0) * (sigma - 1.0)) - 0.5 * ln_n * np;
    let mut poch = sigma;
    let mut dpoch = 1.0;
    let mut pw = np / nf;
    let mut fact = 2.0;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(12) {
        let kk = 2.0 * (k + 1) as f64;
        let c = b / fact;
        z += c * poch * pw;
        dz += c * pw * (dpoch - ln_n * poch);
        let f = (sigma + kk - 1.0) * (sigma + kk);
        dpoch = dpoch * f + poch * (2.0 * sigma + 2.0 * kk - 1.0);
        poch *= f;
        pw /= nf * nf;
        fact *= (kk + 1.0) * (kk + 2.0);
    }
    (z, dz)
}

/// ζ(σ) for real σ > 0, σ ≠ 1.
pub fn zeta_real(sigma: f64, cfg: &EvalConfig) -> Result<f64> {
    check_sigma(sigma)?;
    let v = if sigma > 1.0 {
        em_real(sigma).0
    } else {
        let (eta, _) = eta_and_deriv(sigma);
        eta / (1.0 - 2f64.powf(1.0 - sigma))
    };
    within_reach(v, sigma, cfg)
}

/// Both evaluators are good to a few ulps, amplified near the pole.
fn within_reach(v: f64, sigma: f64, cfg: &EvalConfig) -> Result<f64> {
    let achievable = 16.0 * f64::EPSILON * v.abs().max(1.0) / (sigma - 1.0).abs().min(1.0);
    if cfg.target_abs_error < achievable {
        return Err(Error::AccuracyUnreachable {
            requested: cfg.target_abs_error,
            achieved: achievable,
        });
    }
    Ok(v)
}

/// ζ′(σ) for real σ > 0, σ ≠ 1.
pub fn zeta_real_deriv(sigma: f64, cfg: &EvalConfig) -> Result<f64> {
    check_sigma(sigma)?;
    let v = if sigma > 1.0 {
        em_real(sigma).1
    } else {
        let (eta, deta) = eta_and_deriv(sigma);
        let q = 1.0 - 2f64.powf(1.0 - sigma);
        let dq = 2f64.powf(1.0 - sigma) * std::f64::consts::LN_2;
        deta / q - eta * dq / (q * q)
    };
    within_reach(v, sigma, cfg)
}

/// Euler's constant and γ₁ with the sign convention `(s−1)ζ(s) = 1 + γ(s−1) + γ₁(s−1)² + …`,
/// i.e. the negated Stieltjes constant.
pub fn gamma_constants() -> (f64, f64) {
    let n = 10usize;
    let nf = n as f64;
    let ln_n = nf.ln();
    let mut h = 0.0;
    let mut s1 = 0.0;
    for k in 1..n {
        let x = k as f64;
        h += 1.0 / x;
        s1 += x.ln() / x;
    }
    let mut gamma = h + 0.5 / nf - ln_n;
    let mut st1 = s1 + 0.5 * ln_n / nf - 0.5 * ln_n * ln_n;
    let mut harmonic = 0.0; // H_{2j−1}
    for (j, b) in BERNOULLI_EVEN.iter().enumerate().take(10) {
        let two_j = 2.0 * (j + 1) as f64;
        harmonic += 1.0 / (two_j - 1.0);
        if j > 0 {
            harmonic += 1.0 / (two_j - 2.0);
        }
        let denom = two_j * nf.powf(two_j);
        gamma += b / denom;
        st1 += b * (ln_n - harmonic) / denom;
    }
    (gamma, -st1)
}
