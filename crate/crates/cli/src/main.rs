mod config;
mod report;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::ExitCode;

use config::{usage, FileConfig, UsageError};
use report::{emit, Format};
use twisted_moments::constants::{constants_table, predict, Regime};
use twisted_moments::dirichlet::{second_moment_sweep, CutoffRule};
use twisted_moments::exec::{set_threads, ExecMode};
use twisted_moments::harness::{component_bounds, verify, OutputFormat, RunConfig, TGrid, Thresholds};
use twisted_moments::lattice::{
    conjecture_scan, enumerate_bruteforce, enumerate_parametrized, weight_threshold, BoxSpec, SolutionSet,
};
use twisted_moments::moment::{compute_m, compute_m_cached, MomentSpec, Variant, ZetaCache};
use twisted_moments::quadrature::QuadratureConfig;

#[derive(Parser, Debug)]
#[command(name = "tmoments", version, about = "Twisted mixed moments of the Riemann zeta function")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Sweep a T-grid and check the moment against its asymptotic prediction.
    Verify {
        /// Expected regime, or `auto` to accept whichever the parameters select.
        #[arg(long, env = "TMOMENTS_THEOREM")]
        theorem: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Table of every closed-form constant for (a, b, c, θ).
    Constants {
        #[command(flatten)]
        common: Common,
    },
    /// Solutions of n1^a = n2^b n3^c inside the box at height T.
    Lattice {
        /// brute, parametrized or both (both fails on any mismatch).
        #[arg(long, env = "TMOMENTS_METHOD")]
        method: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Smallest normalized gaps |n1^a − n2^b n3^c|.
    Scan {
        #[arg(long, env = "TMOMENTS_LIMIT")]
        limit: Option<u64>,
        #[arg(long, env = "TMOMENTS_EPSILON")]
        epsilon: Option<f64>,
        /// Number of rows kept.
        #[arg(long, env = "TMOMENTS_KEEP")]
        keep: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// The moment at a single height.
    Moment {
        /// Also report the split along the approximate functional equation.
        #[arg(long, env = "TMOMENTS_COMPONENTS")]
        components: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Mean square of the Dirichlet polynomial on a T-grid.
    SecondMoment {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Flat key = value file with long flag names as keys.
    #[arg(long, env = "TMOMENTS_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, env = "TMOMENTS_A")]
    a: Option<u32>,
    #[arg(long, env = "TMOMENTS_B")]
    b: Option<u32>,
    #[arg(long, env = "TMOMENTS_C")]
    c: Option<u32>,
    #[arg(long, env = "TMOMENTS_THETA")]
    theta: Option<f64>,
    #[arg(long = "T", env = "TMOMENTS_T")]
    t: Option<f64>,
    #[arg(long, env = "TMOMENTS_TMIN")]
    tmin: Option<f64>,
    #[arg(long, env = "TMOMENTS_TMAX")]
    tmax: Option<f64>,
    #[arg(long, env = "TMOMENTS_POINTS")]
    points: Option<usize>,
    /// single_twist or squared_twist.
    #[arg(long, env = "TMOMENTS_VARIANT")]
    variant: Option<String>,
    /// Zeta value cache file, created if missing.
    #[arg(long, env = "TMOMENTS_CACHE")]
    cache: Option<PathBuf>,
    #[arg(long, env = "TMOMENTS_OUT")]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, env = "TMOMENTS_FORMAT")]
    format: Option<String>,
    /// Absolute tolerance on each quadrature result.
    #[arg(long, env = "TMOMENTS_TOL")]
    tol: Option<f64>,
    #[arg(long, env = "TMOMENTS_THREADS")]
    threads: Option<usize>,
    /// Gauss nodes per panel.
    #[arg(long, env = "TMOMENTS_NODES")]
    nodes: Option<usize>,
    /// Phase budget per panel in radians.
    #[arg(long = "max-phase", env = "TMOMENTS_MAX_PHASE")]
    max_phase: Option<f64>,
    /// parallel or sequential.
    #[arg(long, env = "TMOMENTS_EXEC")]
    exec: Option<String>,
    #[arg(long, env = "TMOMENTS_SEED")]
    seed: Option<u64>,
    #[arg(long = "envelope-max", env = "TMOMENTS_ENVELOPE_MAX")]
    envelope_max: Option<f64>,
    #[arg(long = "slope-slack", env = "TMOMENTS_SLOPE_SLACK")]
    slope_slack: Option<f64>,
}

/// `Common` after merging the config file and defaults.
struct Resolved {
    file: FileConfig,
    c: Common,
}

impl Resolved {
    fn new(c: Common) -> Result<Self> {
        let file = FileConfig::load(c.config.as_deref())?;
        Ok(Resolved { file, c })
    }

    fn abc(&self) -> Result<(u32, u32, u32)> {
        Ok((
            self.file.require("a", self.c.a)?,
            self.file.require("b", self.c.b)?,
            self.file.require("c", self.c.c)?,
        ))
    }

    fn theta(&self) -> Result<f64> {
        self.file.pick_or("theta", self.c.theta, 0.5)
    }

    fn t(&self) -> Result<f64> {
        self.file.require("T", self.c.t)
    }

    fn variant(&self) -> Result<Variant> {
        match self.file.pick_or("variant", self.c.variant.clone(), "single_twist".into())?.as_str() {
            "single_twist" | "single" => Ok(Variant::SingleTwist),
            "squared_twist" | "squared" => Ok(Variant::SquaredTwist),
            v => Err(usage(format!("unknown variant '{v}'"))),
        }
    }

    fn format(&self) -> Result<Format> {
        match self.file.pick_or("format", self.c.format.clone(), "csv".into())?.as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            f => Err(usage(format!("unknown format '{f}'"))),
        }
    }

    fn out(&self) -> Result<Option<PathBuf>> {
        self.file.pick("out", self.c.out.clone())
    }

    fn cache(&self) -> Result<Option<PathBuf>> {
        self.file.pick("cache", self.c.cache.clone())
    }

    fn grid(&self, default: TGrid) -> Result<TGrid> {
        let g = TGrid {
            min: self.file.pick_or("tmin", self.c.tmin, default.min)?,
            max: self.file.pick_or("tmax", self.c.tmax, default.max)?,
            count: self.file.pick_or("points", self.c.points, default.count)?,
        };
        g.validate().map_err(|e| usage(e.to_string()))?;
        Ok(g)
    }

    fn quadrature(&self) -> Result<QuadratureConfig> {
        let d = QuadratureConfig::default();
        let exec = match self.file.pick_or("exec", self.c.exec.clone(), "parallel".into())?.as_str() {
            "parallel" => ExecMode::Parallel,
            "sequential" => ExecMode::Sequential,
            e => return Err(usage(format!("unknown exec mode '{e}'"))),
        };
        let q = QuadratureConfig {
            nodes_per_panel: self.file.pick_or("nodes", self.c.nodes, d.nodes_per_panel)?,
            max_phase_per_panel: self.file.pick_or("max-phase", self.c.max_phase, d.max_phase_per_panel)?,
            abs_tol: self.file.pick_or("tol", self.c.tol, d.abs_tol)?,
            exec,
            ..d
        };
        q.validate().map_err(|e| usage(e.to_string()))?;
        Ok(q)
    }

    fn thresholds(&self) -> Result<Thresholds> {
        let d = Thresholds::default();
        Ok(Thresholds {
            envelope_constant: self.file.pick_or("envelope-max", self.c.envelope_max, d.envelope_constant)?,
            slope_slack: self.file.pick_or("slope-slack", self.c.slope_slack, d.slope_slack)?,
        })
    }

    fn apply_threads(&self) -> Result<()> {
        if let Some(n) = self.file.pick("threads", self.c.threads)? {
            if n == 0 {
                return Err(usage("--threads must be positive"));
            }
            set_threads(n)?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Verify { theorem, common } => {
            let r = Resolved::new(common)?;
            r.apply_threads()?;
            let expected = match r.file.pick_or("theorem", theorem, "auto".into())?.as_str() {
                "auto" => None,
                name => Some(Regime::from_name(name).ok_or_else(|| {
                    let names: Vec<&str> = Regime::ALL.iter().map(|r| r.name()).collect();
                    usage(format!("unknown theorem '{name}'; expected auto or one of {}", names.join(", ")))
                })?),
            };
            let (a, b, c) = r.abc()?;
            let format = r.format()?;
            let cfg = RunConfig {
                a,
                b,
                c,
                theta: r.theta()?,
                variant: r.variant()?,
                grid: r.grid(TGrid {
                    min: TAU * 1e3,
                    max: TAU * 1e4,
                    count: 8,
                })?,
                quadrature: r.quadrature()?,
                cache_path: r.cache()?,
                output_format: match format {
                    Format::Csv => OutputFormat::Csv,
                    Format::Json => OutputFormat::Json,
                },
                seed: r.file.pick_or("seed", r.c.seed, 0)?,
                thresholds: r.thresholds()?,
            };
            let rep = verify(&cfg, expected)?;
            for ch in &rep.summary.checks {
                eprintln!("{} {}: {}", if ch.passed { "PASS" } else { "FAIL" }, ch.name, ch.detail);
            }
            emit(r.out()?.as_deref(), format, &rep.config, &rep.rows, &rep.summary)?;
            Ok(rep.summary.passed)
        }
        Cmd::Constants { common } => {
            let r = Resolved::new(common)?;
            let (a, b, c) = r.abc()?;
            let theta = r.theta()?;
            let rows = constants_table(a, b, c, theta);
            let failed = rows.iter().filter(|x| x.error.is_some()).count();
            let config = serde_json::json!({"a": a, "b": b, "c": c, "theta": theta});
            let summary = serde_json::json!({"rows": rows.len(), "domain_violations": failed});
            emit(r.out()?.as_deref(), r.format()?, &config, &rows, &summary)?;
            Ok(true)
        }
        Cmd::Lattice { method, common } => {
            let r = Resolved::new(common)?;
            r.apply_threads()?;
            let (a, b, c) = r.abc()?;
            let theta = r.theta()?;
            let t = r.t()?;
            let bx = BoxSpec::new(a, b, c, theta, t)?;
            let method = r.file.pick_or("method", method, "parametrized".into())?;
            let set: SolutionSet = match method.as_str() {
                "brute" => enumerate_bruteforce(&bx)?,
                "parametrized" => enumerate_parametrized(&bx)?,
                "both" => {
                    let p = enumerate_parametrized(&bx)?;
                    if !p.same_triples(&enumerate_bruteforce(&bx)?) {
                        eprintln!("FAIL: parametrized and brute-force solution sets differ");
                        return Ok(false);
                    }
                    p
                }
                m => return Err(usage(format!("unknown method '{m}'"))),
            };
            #[derive(Serialize)]
            struct Row {
                n1: u64,
                n2: u64,
                n3: u64,
                weight: f64,
                lower_limit: f64,
            }
            let rows: Vec<Row> = set
                .triples
                .iter()
                .map(|p| Row {
                    n1: p.n1,
                    n2: p.n2,
                    n3: p.n3,
                    weight: 1.0 / p.product().sqrt(),
                    lower_limit: weight_threshold(p, &bx),
                })
                .collect();
            let config = serde_json::json!({"a": a, "b": b, "c": c, "theta": theta, "T": t, "method": method});
            let summary = serde_json::json!({"Q": bx.q(), "solutions": rows.len()});
            emit(r.out()?.as_deref(), r.format()?, &config, &rows, &summary)?;
            Ok(true)
        }
        Cmd::Scan {
            limit,
            epsilon,
            keep,
            common,
        } => {
            let r = Resolved::new(common)?;
            let (a, b, c) = r.abc()?;
            let limit = r.file.require("limit", limit)?;
            let epsilon = r.file.pick_or("epsilon", epsilon, 0.01)?;
            let keep = r.file.pick_or("keep", keep, 20)?;
            let rows = conjecture_scan(a, b, c, limit, epsilon, keep)?;
            let min_ratio = rows.first().map(|x| x.ratio);
            let config = serde_json::json!({"a": a, "b": b, "c": c, "limit": limit, "epsilon": epsilon, "keep": keep});
            let summary = serde_json::json!({"rows": rows.len(), "min_ratio": min_ratio});
            emit(r.out()?.as_deref(), r.format()?, &config, &rows, &summary)?;
            Ok(true)
        }
        Cmd::Moment { components, common } => {
            let r = Resolved::new(common)?;
            r.apply_threads()?;
            let (a, b, c) = r.abc()?;
            let components = components || r.file.pick_or("components", None, false)?;
            let spec = MomentSpec::new(a, b, c, r.theta()?, r.t()?, r.variant()?)?;
            let quad = r.quadrature()?;
            let format = r.format()?;
            let prediction = predict(a, b, c, spec.theta, spec.variant, spec.t).ok();
            let config = serde_json::json!({"spec": spec, "quadrature": quad, "cache": r.cache()?});
            if components {
                let (rows, summary) = component_bounds(&spec, &[spec.t], &quad)?;
                let summary = serde_json::json!({"components": summary, "prediction": prediction});
                emit(r.out()?.as_deref(), format, &config, &rows, &summary)?;
                return Ok(true);
            }
            let res = match r.cache()? {
                Some(path) => {
                    let cache = ZetaCache::open(&path)?;
                    let res = compute_m_cached(&spec, &quad, &cache)?;
                    cache.save()?;
                    res
                }
                None => compute_m(&spec, &quad)?,
            };
            #[derive(Serialize)]
            struct Row {
                #[serde(rename = "T")]
                t: f64,
                numeric_re: f64,
                numeric_im: f64,
                est_error: f64,
                panels: usize,
                predicted_with_secondary: Option<f64>,
            }
            let rows = [Row {
                t: spec.t,
                numeric_re: res.value.re,
                numeric_im: res.value.im,
                est_error: res.est_error,
                panels: res.panels,
                predicted_with_secondary: prediction.as_ref().map(|p| p.with_secondary()),
            }];
            emit(r.out()?.as_deref(), format, &config, &rows, &serde_json::json!({"prediction": prediction}))?;
            Ok(true)
        }
        Cmd::SecondMoment { common } => {
            let r = Resolved::new(common)?;
            r.apply_threads()?;
            let a = r.file.pick_or("a", r.c.a, 1)?;
            let theta = r.theta()?;
            let grid = r.grid(TGrid {
                min: TAU * 1e3,
                max: TAU * 1e4,
                count: 5,
            })?;
            let rule = CutoffRule::new(theta, a)?;
            let quad = r.quadrature()?;
            let rows = second_moment_sweep(&rule, &grid.points(), &quad)?;
            // |numeric − formula| against T/Q + Q
            let worst = rows
                .iter()
                .map(|x| x.deviation.abs() / (x.t / rule.q(x.t) + rule.q(x.t)))
                .fold(0.0, f64::max);
            let config = serde_json::json!({"a": a, "theta": theta, "grid": grid, "quadrature": quad});
            let summary = serde_json::json!({"max_scaled_deviation": worst, "passed": worst <= 10.0});
            emit(r.out()?.as_deref(), r.format()?, &config, &rows, &summary)?;
            Ok(worst <= 10.0)
        }
    }
}

/// 2 for problems with the invocation, 1 for failed computations.
fn exit_code(e: &anyhow::Error) -> u8 {
    use twisted_moments::Error as E;
    if e.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<E>() {
        Some(E::DomainViolation(_) | E::HypothesisViolated(_) | E::InvalidInput(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
