//! Twisted moments by quadrature and the semi-analytic lattice form of I₁.
//!
//! Integrals start at 0.  Segments are cut at every jump of `D_θ` and of the
//! Riemann–Siegel main sums of both zeta factors, so each segment sees
//! constant truncation lengths.

mod cache;
mod integrand;

pub use cache::ZetaCache;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::dirichlet::CutoffRule;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_marks, QuadratureConfig, QuadratureResult};
use crate::special_functions::EvalConfig;
use integrand::{MomentIntegrand, SLOTS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `D_θ(1/2+iat) ζ(1/2−ibt) ζ(1/2−ict)`
    #[default]
    SingleTwist,
    /// `|D_θ(1/2+iat)|² ζ(1/2−ibt) ζ(1/2−ict)`
    SquaredTwist,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub theta: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(default)]
    pub variant: Variant,
}

impl MomentSpec {
    pub fn new(a: u32, b: u32, c: u32, theta: f64, t: f64, variant: Variant) -> Result<Self> {
        let s = MomentSpec { a, b, c, theta, t, variant };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == 0 || self.b == 0 || self.c == 0 {
            return Err(Error::DomainViolation("a, b, c must be positive".into()));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::DomainViolation(format!(
                "theta must lie in (0, 1), got {}",
                self.theta
            )));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::DomainViolation(format!("T must be positive, got {}", self.t)));
        }
        Ok(())
    }

    /// `D_θ` cutoff rule with twist `a`.
    pub fn rule(&self) -> CutoffRule {
        CutoffRule {
            theta: self.theta,
            twist: self.a,
        }
    }

    /// `Q = (aT/2π)^θ`.
    pub fn q(&self) -> f64 {
        self.rule().q(self.t)
    }

    pub fn with_t(&self, t: f64) -> Self {
        MomentSpec { t, ..*self }
    }
}

/// Quadrature of the moment and of its split along the approximate
/// functional equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IComponents {
    #[serde(rename = "T")]
    pub t: f64,
    pub m: QuadratureResult,
    pub i1: QuadratureResult,
    pub i2: QuadratureResult,
    pub i3: QuadratureResult,
    /// `∫ D_θ P(−bt) P(−ct)`, equal to `I1 + I2 + I3` up to rounding.
    pub afe: QuadratureResult,
}

/// `∫_{t0}^{t1} x^{it} dt`; exact at `x = 1`.
pub fn oscillatory_primitive(x: f64, t0: f64, t1: f64) -> Complex64 {
    primitive_log(x.ln(), t0, t1)
}

/// `∫_{t0}^{t1} e^{iLt} dt` written as `Δ sinc(LΔ/2) e^{iL(t0+t1)/2}`, which
/// stays accurate as `L → 0`.
pub(crate) fn primitive_log(l: f64, t0: f64, t1: f64) -> Complex64 {
    let len = t1 - t0;
    let z = 0.5 * l * len;
    let sinc = if z == 0.0 { 1.0 } else { z.sin() / z };
    Complex64::from_polar(len * sinc, l * 0.5 * (t0 + t1))
}

fn all_breakpoints(spec: &MomentSpec, top: f64) -> Vec<f64> {
    let mut bps = spec.rule().breakpoints(0.0, top);
    for r in [spec.b, spec.c] {
        let r = r as f64;
        let mut n = 1.0f64;
        while TAU * n * n / r < top {
            bps.push(TAU * n * n / r);
            n += 1.0;
        }
    }
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.dedup();
    bps
}

fn check_heights(heights: &[f64], cfg: &QuadratureConfig) -> Result<()> {
    if heights.is_empty() || heights.iter().any(|&t| !(t > 0.0)) || heights.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("heights must be positive and increasing".into()));
    }
    let top = *heights.last().unwrap();
    if top > cfg.max_height * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "T = {top} exceeds the configured ceiling {}",
            cfg.max_height
        )));
    }
    Ok(())
}

fn run(
    spec: &MomentSpec,
    heights: &[f64],
    cfg: &QuadratureConfig,
    cache: Option<&ZetaCache>,
    components: bool,
) -> Result<Vec<[QuadratureResult; SLOTS]>> {
    spec.validate()?;
    check_heights(heights, cfg)?;
    let f = MomentIntegrand {
        spec: *spec,
        rule: spec.rule(),
        components,
        cache,
        tol: EvalConfig::default().target_abs_error,
    };
    let top = *heights.last().unwrap();
    integrate_marks(&f, 0.0, heights, &all_breakpoints(spec, top), cfg)
}

/// `M(T)` for the variant in `spec`.
pub fn compute_m(spec: &MomentSpec, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    Ok(run(spec, &[spec.t], cfg, None, false)?[0][0])
}

/// [`compute_m`] with ζ values read from and written to `cache`.
pub fn compute_m_cached(spec: &MomentSpec, cfg: &QuadratureConfig, cache: &ZetaCache) -> Result<QuadratureResult> {
    Ok(run(spec, &[spec.t], cfg, Some(cache), false)?[0][0])
}

/// `M` at each increasing height in one pass; `spec.t` is ignored.
pub fn moment_sweep(
    spec: &MomentSpec,
    heights: &[f64],
    cfg: &QuadratureConfig,
    cache: Option<&ZetaCache>,
) -> Result<Vec<QuadratureResult>> {
    Ok(run(spec, heights, cfg, cache, false)?
        .into_iter()
        .map(|r| r[0])
        .collect())
}

pub fn compute_i_components(spec: &MomentSpec, cfg: &QuadratureConfig) -> Result<IComponents> {
    Ok(components_sweep(spec, &[spec.t], cfg)?[0])
}

/// [`IComponents`] at each increasing height in one pass; `spec.t` is ignored.
pub fn components_sweep(spec: &MomentSpec, heights: &[f64], cfg: &QuadratureConfig) -> Result<Vec<IComponents>> {
    Ok(run(spec, heights, cfg, None, true)?
        .into_iter()
        .zip(heights)
        .map(|(r, &t)| IComponents {
            t,
            m: r[0],
            i1: r[1],
            i2: r[2],
            i3: r[3],
            afe: r[4],
        })
        .collect())
}

/// Candidate limit for the semi-analytic lattice sum.
pub const LATTICE_SUM_CAP: f64 = 1e8;

fn ipow(n: u64, e: u32) -> Option<u128> {
    (n as u128).checked_pow(e)
}

/// `I1(T)` as a finite sum of closed-form primitives over the box.
pub fn compute_i1_semianalytic(spec: &MomentSpec) -> Result<Complex64> {
    spec.validate()?;
    let rule = spec.rule();
    let t = spec.t;
    let (a, b, c) = (spec.a, spec.b, spec.c);
    let q = rule.cutoff(t);
    let n2max = (b as f64 * t / TAU).sqrt().floor() as usize;
    let n3max = (c as f64 * t / TAU).sqrt().floor() as usize;
    let squared = spec.variant == Variant::SquaredTwist;
    let n4max = if squared { q } else { 1 };
    let candidates = q as f64 * n2max as f64 * n3max as f64 * n4max as f64;
    if candidates > LATTICE_SUM_CAP {
        return Err(Error::InvalidInput(format!(
            "box too large: {candidates:e} candidates exceed {LATTICE_SUM_CAP:e}"
        )));
    }
    let ln: Vec<f64> = (0..=q.max(n2max).max(n3max)).map(|n| (n.max(1) as f64).ln()).collect();
    let (af, bf, cf) = (a as f64, b as f64, c as f64);
    let mut acc = Complex64::new(0.0, 0.0);
    for n1 in 1..=q {
        let lim1 = rule.breakpoint(n1);
        for n4 in 1..=n4max {
            let lim4 = if squared { rule.breakpoint(n4) } else { 0.0 };
            for n2 in 1..=n2max {
                let lim2 = TAU * (n2 * n2) as f64 / bf;
                for n3 in 1..=n3max {
                    let lim3 = TAU * (n3 * n3) as f64 / cf;
                    let lo = lim1.max(lim2).max(lim3).max(lim4);
                    if lo >= t {
                        continue;
                    }
                    let lhs = ipow(n1 as u64, a);
                    let rhs = ipow(n2 as u64, b)
                        .zip(ipow(n3 as u64, c))
                        .and_then(|(x, y)| x.checked_mul(y))
                        .zip(if squared { ipow(n4 as u64, a) } else { Some(1) })
                        .and_then(|(x, y)| x.checked_mul(y));
                    let l = match (lhs, rhs) {
                        (Some(x), Some(y)) if x == y => 0.0,
                        _ => {
                            bf * ln[n2] + cf * ln[n3] - af * ln[n1] + if squared { af * ln[n4] } else { 0.0 }
                        }
                    };
                    let w = 1.0 / ((n1 * n2 * n3 * n4) as f64).sqrt();
                    acc += primitive_log(l, lo, t) * w;
                }
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_limits() {
        assert_eq!(oscillatory_primitive(1.0, 0.0, 7.5), Complex64::new(7.5, 0.0));
        assert!(oscillatory_primitive(TAU.exp(), 0.0, 1.0).norm() < 1e-14);
        let l = 1e-13;
        let v = primitive_log(l, 2.0, 5.0);
        assert!((v - Complex64::new(3.0, l * 10.5)).norm() < 1e-20 + 1e-15);
    }
}
