//! Sweeps over T-grids and checks of numeric moments against predictions.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::constants::{ls_slope, residual_analysis, select_regime, Predictor, Regime, ResidualKind};
use crate::error::{Error, Result};
use crate::moment::{components_sweep, moment_sweep, MomentSpec, Variant, ZetaCache};
use crate::quadrature::{QuadratureConfig, QuadratureResult};

/// Log-spaced heights from `min` to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl TGrid {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidInput("grid count must be at least 1".into()));
        }
        if !(self.min > 0.0) || (self.count > 1 && !(self.min < self.max)) {
            return Err(Error::InvalidInput(format!(
                "grid needs 0 < min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let (l0, l1) = (self.min.ln(), self.max.ln());
        let n = (self.count - 1) as f64;
        let mut v: Vec<f64> = (0..self.count).map(|i| (l0 + (l1 - l0) * i as f64 / n).exp()).collect();
        v[0] = self.min;
        v[self.count - 1] = self.max;
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub envelope_constant: f64,
    /// Allowed excess of the residual slope over `1 − θ/2`.
    pub slope_slack: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            envelope_constant: 50.0,
            slope_slack: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub theta: f64,
    pub variant: Variant,
    pub grid: TGrid,
    pub quadrature: QuadratureConfig,
    pub cache_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub seed: u64,
    pub thresholds: Thresholds,
}

impl RunConfig {
    pub fn spec(&self) -> Result<MomentSpec> {
        MomentSpec::new(self.a, self.b, self.c, self.theta, self.grid.max, self.variant)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.quadrature.validate()?;
        self.spec()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub numeric_re: f64,
    pub numeric_im: f64,
    pub predicted_main: f64,
    pub predicted_with_secondary: f64,
    pub residual_main_only: f64,
    pub residual_full: f64,
    pub envelope: f64,
    pub est_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub theorem: Regime,
    pub secondary_exponents: Vec<f64>,
    pub envelope_exponents: Vec<f64>,
    pub epsilon: Option<f64>,
    pub envelope_constant: f64,
    pub envelope_constant_im: f64,
    pub fitted_slope: Option<f64>,
    pub slope_limit: f64,
    pub max_residual_full: f64,
    pub max_residual_main_only: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub rows: Vec<SweepRow>,
    pub summary: VerifySummary,
}

/// `M` at every grid height, through the cache at `cfg.cache_path` if set.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<(f64, QuadratureResult)>> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let heights = cfg.grid.points();
    let cache = cfg.cache_path.as_ref().map(ZetaCache::open).transpose()?;
    let res = moment_sweep(&spec, &heights, &cfg.quadrature, cache.as_ref())?;
    if let Some(c) = &cache {
        c.save()?;
    }
    Ok(heights.into_iter().zip(res).collect())
}

/// Compares numeric moments with the prediction for their regime.
///
/// With `expected` set, a parameter set that selects another regime is a
/// hypothesis violation.
pub fn verify(cfg: &RunConfig, expected: Option<Regime>) -> Result<VerifyReport> {
    let regime = select_regime(cfg.a, cfg.b, cfg.c, cfg.theta, cfg.variant)?;
    if let Some(want) = expected {
        if want != regime {
            return Err(Error::HypothesisViolated(format!(
                "({}, {}, {}) with theta = {} falls in regime {}, not {}",
                cfg.a,
                cfg.b,
                cfg.c,
                cfg.theta,
                regime.name(),
                want.name()
            )));
        }
    }
    let predictor = Predictor::new(cfg.a, cfg.b, cfg.c, cfg.theta, cfg.variant)?;
    let numeric = sweep(cfg)?;
    evaluate(cfg, &predictor, &numeric)
}

/// Builds rows and summary from precomputed `(T, M)` pairs.
pub fn evaluate(cfg: &RunConfig, predictor: &Predictor, numeric: &[(f64, QuadratureResult)]) -> Result<VerifyReport> {
    let rows: Vec<SweepRow> = numeric
        .iter()
        .map(|&(t, q)| {
            let rep = predictor.report(t);
            let full = rep.with_secondary();
            SweepRow {
                t,
                numeric_re: q.value.re,
                numeric_im: q.value.im,
                predicted_main: rep.main,
                predicted_with_secondary: full,
                residual_main_only: q.value.re - rep.main,
                residual_full: q.value.re - full,
                envelope: rep.envelope_value(),
                est_error: q.est_error,
            }
        })
        .collect();
    let report = |t: f64| Ok(predictor.report(t));
    let re: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.numeric_re)).collect();
    let full = residual_analysis(&re, report, ResidualKind::Full)?;
    let envelope_constant_im = rows
        .iter()
        .map(|r| r.numeric_im.abs() / r.envelope)
        .fold(0.0, f64::max);
    let max_abs = |f: fn(&SweepRow) -> f64| rows.iter().map(|r| f(r).abs()).fold(0.0, f64::max);
    let max_residual_full = max_abs(|r| r.residual_full);
    let max_residual_main_only = max_abs(|r| r.residual_main_only);
    let rep = predictor.report(cfg.grid.max);
    let th = &cfg.thresholds;
    let slope_limit = 1.0 - cfg.theta / 2.0 + th.slope_slack;

    let mut checks = vec![
        Check {
            name: "envelope".into(),
            passed: full.envelope_constant <= th.envelope_constant,
            detail: format!("{:.4} <= {}", full.envelope_constant, th.envelope_constant),
        },
        Check {
            name: "slope".into(),
            passed: full.fitted_slope.is_none_or(|s| s <= slope_limit),
            detail: format!("{:?} <= {slope_limit:.4}", full.fitted_slope),
        },
        Check {
            name: "imaginary_envelope".into(),
            passed: envelope_constant_im <= th.envelope_constant,
            detail: format!("{envelope_constant_im:.4} <= {}", th.envelope_constant),
        },
        Check {
            name: "dominance".into(),
            passed: rep.dominance_ok(),
            detail: "secondary exponents above envelope exponents".into(),
        },
    ];
    if !rep.secondary.is_empty() {
        checks.push(Check {
            name: "secondary_improves".into(),
            passed: max_residual_full < max_residual_main_only,
            detail: format!("{max_residual_full:.6e} < {max_residual_main_only:.6e}"),
        });
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        config: cfg.clone(),
        rows,
        summary: VerifySummary {
            theorem: predictor.regime,
            secondary_exponents: rep.secondary.iter().map(|s| s.exponent).collect(),
            envelope_exponents: rep.envelope.iter().map(|e| e.exponent).collect(),
            epsilon: rep.epsilon,
            envelope_constant: full.envelope_constant,
            envelope_constant_im,
            fitted_slope: full.fitted_slope,
            slope_limit,
            max_residual_full,
            max_residual_main_only,
            checks,
            passed,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub m_re: f64,
    pub m_im: f64,
    pub i1_re: f64,
    pub i1_im: f64,
    /// `|I2| / (T^{1/2} Q^{1/2})`
    pub i2_ratio: f64,
    /// `|I3| / (T^{1/2} Q^{1/2})`
    pub i3_ratio: f64,
    /// `|I1 + I2 + I3 − ∫ D_θ P P|`
    pub split_gap: f64,
    /// `|M − ∫ D_θ P P| / (T^{3/4} log T)`
    pub afe_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub sup_i2_ratio: f64,
    pub sup_i3_ratio: f64,
    pub i2_slope: Option<f64>,
    pub i3_slope: Option<f64>,
    pub i2_monotone: bool,
    pub i3_monotone: bool,
    pub max_afe_ratio: f64,
    /// No ratio both grows monotonically and has slope above 0.1.
    pub bounded: bool,
}

fn increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

/// Component split of the moment on a grid with the bound ratios.
pub fn component_bounds(
    spec: &MomentSpec,
    heights: &[f64],
    cfg: &QuadratureConfig,
) -> Result<(Vec<ComponentRow>, ComponentSummary)> {
    let comps = components_sweep(spec, heights, cfg)?;
    let rows: Vec<ComponentRow> = comps
        .iter()
        .map(|c| {
            let scale = (c.t * spec.with_t(c.t).q()).sqrt();
            let sum = c.i1.value + c.i2.value + c.i3.value;
            ComponentRow {
                t: c.t,
                m_re: c.m.value.re,
                m_im: c.m.value.im,
                i1_re: c.i1.value.re,
                i1_im: c.i1.value.im,
                i2_ratio: c.i2.value.norm() / scale,
                i3_ratio: c.i3.value.norm() / scale,
                split_gap: (sum - c.afe.value).norm(),
                afe_ratio: (c.m.value - c.afe.value).norm() / (c.t.powf(0.75) * c.t.ln()),
            }
        })
        .collect();
    let series = |f: fn(&ComponentRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let slope = |v: &[f64]| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .zip(v)
            .filter(|(_, y)| **y > 0.0)
            .map(|(r, y)| (r.t.ln(), y.ln()))
            .collect();
        ls_slope(&pts)
    };
    let (i2, i3) = (series(|r| r.i2_ratio), series(|r| r.i3_ratio));
    let (i2_slope, i3_slope) = (slope(&i2), slope(&i3));
    let grows = |v: &[f64], s: Option<f64>| increasing(v) && s.is_some_and(|s| s > 0.1);
    let summary = ComponentSummary {
        sup_i2_ratio: i2.iter().copied().fold(0.0, f64::max),
        sup_i3_ratio: i3.iter().copied().fold(0.0, f64::max),
        i2_slope,
        i3_slope,
        i2_monotone: increasing(&i2),
        i3_monotone: increasing(&i3),
        max_afe_ratio: rows.iter().map(|r| r.afe_ratio).fold(0.0, f64::max),
        bounded: !grows(&i2, i2_slope) && !grows(&i3, i3_slope),
    };
    Ok((rows, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = TGrid {
            min: 6e3,
            max: 6e5,
            count: 3,
        };
        let p = g.points();
        assert_eq!(p[0], 6e3);
        assert_eq!(p[2], 6e5);
        assert!((p[1] - 6e4).abs() < 1e-6);
        assert_eq!(TGrid { count: 1, ..g }.points(), vec![6e3]);
        assert!(TGrid { count: 0, ..g }.validate().is_err());
        assert!(TGrid { min: 7e5, ..g }.validate().is_err());
    }
}
