//! Truncated Dirichlet polynomials and their mean square.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::ops::Range;

use crate::arith::{half_line_sum, phase_sum};
use crate::error::{Error, Result};
use crate::kernel::PhaseLanes;
use crate::quadrature::{integrate_marks, PanelIntegrand, QuadratureConfig, SegmentView};
use crate::special_functions::{chi_half, gamma_constants};

/// Cutoff `n <= (twist * t / 2π)^θ`, equality included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffRule {
    pub theta: f64,
    pub twist: u32,
}

impl CutoffRule {
    pub fn new(theta: f64, twist: u32) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::DomainViolation(format!("theta must lie in (0, 1], got {theta}")));
        }
        if twist == 0 {
            return Err(Error::DomainViolation("twist must be at least 1".into()));
        }
        Ok(CutoffRule { theta, twist })
    }

    /// Height at which term `n` enters, `(2π/twist) n^{1/θ}`.
    pub fn breakpoint(&self, n: usize) -> f64 {
        TAU / self.twist as f64 * (n as f64).powf(1.0 / self.theta)
    }

    /// Number of terms at height `t`; agrees exactly with [`Self::breakpoint`].
    pub fn cutoff(&self, t: f64) -> usize {
        let t = t.abs();
        let x = (self.twist as f64 * t / TAU).powf(self.theta);
        if !x.is_finite() || x < 0.5 {
            return if self.breakpoint(1) <= t { 1 } else { 0 };
        }
        let mut n = x.floor() as usize;
        while self.breakpoint(n + 1) <= t {
            n += 1;
        }
        while n > 0 && self.breakpoint(n) > t {
            n -= 1;
        }
        n
    }

    /// Cutoff jumps strictly inside `(t0, t1)`.
    pub fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut n = self.cutoff(t0) + 1;
        loop {
            let b = self.breakpoint(n);
            if b >= t1 {
                break;
            }
            if b > t0 {
                out.push(b);
            }
            n += 1;
        }
        out
    }

    /// `Q = (twist T / 2π)^θ`.
    pub fn q(&self, t: f64) -> f64 {
        (self.twist as f64 * t / TAU).powf(self.theta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletValue {
    pub value: Complex64,
    pub cutoff_integer: usize,
}

/// `Σ_{n <= (twist |t| / 2π)^θ} n^{-σ - i twist t}`.
pub fn dirichlet_d(rule: &CutoffRule, sigma: f64, t: f64) -> DirichletValue {
    let n = rule.cutoff(t);
    let u = rule.twist as f64 * t.abs();
    let mut value = if sigma == 0.5 {
        half_line_sum(u, n)
    } else {
        phase_sum(u, n, |k| (k as f64).powf(-sigma))
    };
    if t < 0.0 {
        value = value.conj();
    }
    DirichletValue {
        value,
        cutoff_integer: n,
    }
}

/// `D(1/2+it) + χ(1/2+it) D(1/2−it)` with `D` cut at `√(|t|/2π)`.
pub fn combined_p(t: f64) -> Complex64 {
    let n = (t.abs() / TAU).sqrt().floor() as usize;
    let d = half_line_sum(t.abs(), n);
    let d = if t < 0.0 { d.conj() } else { d };
    d + chi_half(t) * d.conj()
}

/// Divisors `m | n` with `m <= cutoff` and `n/m <= cutoff`.
pub fn divisor_dt(n: u64, cutoff: f64) -> u64 {
    let mut count = 0;
    let mut m = 1u64;
    while m * m <= n {
        if n.is_multiple_of(m) {
            let q = n / m;
            if m as f64 <= cutoff && q as f64 <= cutoff {
                count += if m == q { 1 } else { 2 };
            }
        }
        m += 1;
    }
    count
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondMoment {
    #[serde(rename = "T")]
    pub t: f64,
    pub numeric: f64,
    pub formula: f64,
    pub deviation: f64,
    pub est_error: f64,
}

/// `|D_θ(1/2 + i·twist·t)|²`, marched across equal panels.
struct SquareIntegrand {
    rule: CutoffRule,
}

impl PanelIntegrand<1> for SquareIntegrand {
    fn phase_rate(&self, t: f64) -> f64 {
        let a = self.rule.twist as f64;
        a * (self.rule.cutoff(t).max(1) as f64).ln() + 0.5
    }

    fn eval_panels(
        &self,
        seg: &SegmentView,
        panels: Range<usize>,
        x: &[f64],
        out: &mut [[Complex64; 1]],
    ) -> Result<f64> {
        let n = self.rule.cutoff(seg.mid());
        let zero = Complex64::new(0.0, 0.0);
        if n == 0 {
            out.fill([zero]);
            return Ok(0.0);
        }
        let a = self.rule.twist as f64;
        let mut lanes = PhaseLanes::new(n, 0.5, x.len(), a * seg.h);
        for (j, xj) in x.iter().enumerate() {
            lanes.seed(j, a * (seg.lo + (panels.start as f64 + xj) * seg.h));
        }
        let mut s = [zero];
        for (i, _) in panels.enumerate() {
            for j in 0..x.len() {
                lanes.sum_and_advance(j, &[n], &mut s);
                out[i * x.len() + j] = [Complex64::new(s[0].norm_sqr(), 0.0)];
            }
        }
        // one ulp per term and per marching step
        let drift = (crate::quadrature::PANELS_PER_BLOCK as f64 + 8.0) * f64::EPSILON;
        Ok(drift * (n as f64) * 2.0 * (n as f64).sqrt())
    }
}

/// Mean square of `D_θ` over `[0, T]` for each increasing `T` in `heights`,
/// compared with `T log Q + (γ − θ) T`.
pub fn second_moment_sweep(
    rule: &CutoffRule,
    heights: &[f64],
    quad: &QuadratureConfig,
) -> Result<Vec<SecondMoment>> {
    if heights.iter().any(|&t| !(t > 0.0)) || heights.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("heights must be positive and increasing".into()));
    }
    let (gamma, _) = gamma_constants();
    let start = rule.breakpoint(1);
    let live: Vec<f64> = heights.iter().copied().filter(|&t| t > start).collect();
    let top = live.last().copied().unwrap_or(start);
    let rows = if live.is_empty() {
        Vec::new()
    } else {
        integrate_marks(
            &SquareIntegrand { rule: *rule },
            start,
            &live,
            &rule.breakpoints(start, top),
            quad,
        )?
    };
    let mut it = rows.iter();
    Ok(heights
        .iter()
        .map(|&t| {
            let (numeric, est_error) = if t > start {
                let r = &it.next().unwrap()[0];
                (r.value.re, r.est_error)
            } else {
                (0.0, 0.0)
            };
            let formula = t * rule.q(t).ln() + (gamma - rule.theta) * t;
            SecondMoment {
                t,
                numeric,
                formula,
                deviation: numeric - formula,
                est_error,
            }
        })
        .collect())
}

/// [`second_moment_sweep`] at a single height.
pub fn second_moment_d(rule: &CutoffRule, t: f64, quad: &QuadratureConfig) -> Result<SecondMoment> {
    Ok(second_moment_sweep(rule, &[t], quad)?[0])
}
