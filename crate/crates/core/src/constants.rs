//! Closed-form constants, secondary-term polynomials and asymptotic predictions.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::lattice::sigma_trunc;
use crate::moment::Variant;
use crate::special_functions::{gamma_constants, zeta_real, zeta_real_deriv, EvalConfig};

/// Fixed ε in the third envelope term of the twisted regimes.
pub const ENVELOPE_EPSILON: f64 = 0.01;

fn zeta(s: f64) -> Result<f64> {
    zeta_real(s, &EvalConfig::constants())
}

fn zeta_d(s: f64) -> Result<f64> {
    zeta_real_deriv(s, &EvalConfig::constants())
}

fn ln_2pi() -> f64 {
    TAU.ln()
}

fn gcd(mut x: u32, mut y: u32) -> u32 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum ConstantId {
    LambdaTheta,
    Cars { a: u32, r: u32, s: u32 },
    Kabc { a: u32, b: u32, c: u32 },
    SigmaAbc { a: u32, b: u32, c: u32 },
    Drs { r: u32, s: u32 },
    Ars { r: u32, s: u32 },
    E0 { r: u32 },
    E1 { r: u32 },
    F0 { r: u32 },
    F1 { r: u32 },
    H0 { r: u32 },
    H1 { r: u32 },
    K1bc { b: u32, c: u32 },
    Eb { b: u32 },
    Brs { r: u32, s: u32 },
    C0,
    C1,
    ArsPrime { r: u32, s: u32 },
    DrsPrime { r: u32, s: u32 },
    C1rsPrime { r: u32, s: u32 },
    E0Prime { r: u32 },
    E1Prime { r: u32 },
    F0Prime { r: u32 },
    F1Prime { r: u32 },
    H0Prime { r: u32 },
    H1Prime { r: u32 },
}

impl ConstantId {
    /// Short label used in tables.
    pub fn label(&self) -> String {
        use ConstantId::*;
        match *self {
            LambdaTheta => "lambda_theta".into(),
            Cars { a, r, s } => format!("C_{{{a},{r},{s}}}"),
            Kabc { a, b, c } => format!("K_{{{a},{b},{c}}}"),
            SigmaAbc { a, b, c } => format!("sigma_{{{a},{b},{c}}}"),
            Drs { r, s } => format!("D_{{{r},{s}}}"),
            Ars { r, s } => format!("A_{{{r},{s}}}"),
            E0 { r } => format!("E_{{0,{r}}}"),
            E1 { r } => format!("E_{{1,{r}}}"),
            F0 { r } => format!("F_{{0,{r}}}"),
            F1 { r } => format!("F_{{1,{r}}}"),
            H0 { r } => format!("H_{{0,{r}}}"),
            H1 { r } => format!("H_{{1,{r}}}"),
            K1bc { b, c } => format!("K_{{1,{b},{c}}}"),
            Eb { b } => format!("E_{{{b}}}"),
            Brs { r, s } => format!("B_{{{r},{s}}}"),
            C0 => "c_0".into(),
            C1 => "c_1".into(),
            ArsPrime { r, s } => format!("A'_{{{r},{s}}}"),
            DrsPrime { r, s } => format!("D'_{{{r},{s}}}"),
            C1rsPrime { r, s } => format!("C'_{{1,{r},{s}}}"),
            E0Prime { r } => format!("E'_{{0,{r}}}"),
            E1Prime { r } => format!("E'_{{1,{r}}}"),
            F0Prime { r } => format!("F'_{{0,{r}}}"),
            F1Prime { r } => format!("F'_{{1,{r}}}"),
            H0Prime { r } => format!("H'_{{0,{r}}}"),
            H1Prime { r } => format!("H'_{{1,{r}}}"),
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainViolation(format!("theta must lie in (0, 1), got {theta}")))
    }
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::DomainViolation(msg()))
    }
}

fn positive(vals: &[u32]) -> Result<()> {
    need(vals.iter().all(|&v| v > 0), || "indices must be positive".into())
}

/// Value of a constant at the given θ.
pub fn eval_constant(id: ConstantId, theta: f64) -> Result<f64> {
    use ConstantId::*;
    check_theta(theta)?;
    let lam = 2.0 / theta - 1.0;
    let (gamma, gamma1) = gamma_constants();
    let need_r_gt_1 = |r: u32| need(r > 1, || format!("r must exceed 1, got {r}"));
    let zp = |r: u32| zeta(0.5 + 0.5 / r as f64);
    let zpd = |r: u32| zeta_d(0.5 + 0.5 / r as f64);
    Ok(match id {
        LambdaTheta => lam,
        Cars { a, r, s } => {
            positive(&[a, r, s])?;
            need(r > a, || format!("C_{{a,r,s}} needs r > a, got a={a}, r={r}"))?;
            need(!(a == 1 && r == s), || format!("C_{{1,r,s}} is undefined for r = s = {r}"))?;
            let (af, rf, sf) = (a as f64, r as f64, s as f64);
            4.0 * rf * af / (theta * (rf - af) * (lam * rf + af))
                * zeta(af * sf / (2.0 * rf) + af / 2.0)?
                * (TAU / af).powf(theta * (0.5 - af / (2.0 * rf)))
        }
        Kabc { a, b, c } => {
            positive(&[a, b, c])?;
            let (gb, gc) = (gcd(a, b), gcd(a, c));
            zeta((a / gb + b / gb) as f64 / 2.0)? * zeta((a / gc + c / gc) as f64 / 2.0)?
        }
        SigmaAbc { a, b, c } => sigma_trunc(a, b, c, 1e-10)?.value,
        Drs { r, s } => {
            positive(&[r, s])?;
            2.0 * zeta(s as f64 / (2.0 * r as f64) + 0.5)? / (lam * r as f64 + 1.0)
        }
        Ars { r, s } => {
            positive(&[s])?;
            need_r_gt_1(r)?;
            2.0 * zeta(s as f64 / (2.0 * r as f64) + 0.5)? / (r as f64 - 1.0)
        }
        E0 { r } => {
            need_r_gt_1(r)?;
            let d = r as f64 - 1.0;
            4.0 * gamma / d + 4.0 / (d * d)
        }
        E1 { r } => {
            need_r_gt_1(r)?;
            2.0 / (r as f64 * (r as f64 - 1.0))
        }
        F0 { r } => {
            positive(&[r])?;
            let d = lam * r as f64 + 1.0;
            4.0 * gamma / d - 4.0 / (d * d)
        }
        F1 { r } => {
            positive(&[r])?;
            2.0 / (r as f64 * (lam * r as f64 + 1.0))
        }
        H0 { r } => eval_constant(E0 { r }, theta)? + eval_constant(F0 { r }, theta)?,
        H1 { r } => eval_constant(E1 { r }, theta)? + eval_constant(F1 { r }, theta)?,
        K1bc { b, c } => {
            positive(&[b, c])?;
            zeta((1 + b) as f64 / 2.0)? * zeta((1 + c) as f64 / 2.0)?
        }
        Eb { b } => {
            need(b > 1, || format!("E_b needs b > 1, got {b}"))?;
            let x = (b + 1) as f64 / 2.0;
            zeta(x)? * gamma + b as f64 * zeta_d(x)?
        }
        Brs { r, s } => {
            need(r > 1 && s > 1, || format!("B_{{r,s}} needs r, s > 1, got {r}, {s}"))?;
            let (xr, xs) = ((1 + r) as f64 / 2.0, (1 + s) as f64 / 2.0);
            r as f64 * zeta_d(xr)? * zeta(xs)? + s as f64 * zeta_d(xs)? * zeta(xr)? + zeta(xr)? * zeta(xs)? * gamma
        }
        C1 => theta * (2.0 * gamma - eval_constant(F1 { r: 1 }, theta)?) - theta * theta * ln_2pi(),
        C0 => {
            let l = ln_2pi();
            gamma * gamma + 2.0 * gamma1 - eval_constant(F0 { r: 1 }, theta)?
                - theta * (2.0 * gamma - eval_constant(F1 { r: 1 }, theta)?) * l
                + 0.5 * theta * theta * l * l
        }
        ArsPrime { r, s } => zp(r)? * eval_constant(Ars { r, s }, theta)?,
        DrsPrime { r, s } => {
            need_r_gt_1(r)?;
            zp(r)? * eval_constant(Drs { r, s }, theta)?
        }
        C1rsPrime { r, s } => zp(r)? * eval_constant(Cars { a: 1, r, s }, theta)?,
        E0Prime { r } => {
            let e0 = eval_constant(E0 { r }, theta)?;
            let rf = r as f64;
            zp(r)? * e0 + 2.0 * zpd(r)? / (rf * (rf - 1.0))
        }
        E1Prime { r } => zp(r)? * eval_constant(E1 { r }, theta)?,
        F0Prime { r } => {
            need_r_gt_1(r)?;
            let f0 = eval_constant(F0 { r }, theta)?;
            let rf = r as f64;
            zp(r)? * f0 + 2.0 * zpd(r)? / (rf * (lam * rf + 1.0))
        }
        F1Prime { r } => {
            need_r_gt_1(r)?;
            zp(r)? * eval_constant(F1 { r }, theta)?
        }
        H0Prime { r } => eval_constant(E0Prime { r }, theta)? + eval_constant(F0Prime { r }, theta)?,
        H1Prime { r } => eval_constant(E1Prime { r }, theta)? + eval_constant(F1Prime { r }, theta)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum PolynomialId {
    /// `(2π)^{θ(1/2−1/2r)} (θ H_{1,r} x + H_{0,r} − θ H_{1,r} log 2π)`
    Hr { r: u32 },
    /// `θ ζ((b+1)/2) x + E_b − D_{1,b} − θ ζ((b+1)/2) log 2π`
    Kb { b: u32 },
    /// `(2π)^{θ(1/2−1/2r)} (θ H'_{1,r} x + H'_{0,r} − θ H'_{1,r} log 2π)`
    Gr { r: u32 },
    /// `θ K_{1,r,s} x + B_{r,s} − θ K_{1,r,s} − θ K_{1,r,s} log 2π`
    Krs { r: u32, s: u32 },
    /// `(θ²/2) x² + c_1 x + c_0`
    QuadraticB1,
}

/// Coefficients `[p0, p1, p2]` of `p0 + p1 x + p2 x²`.
pub fn polynomial_coefficients(id: PolynomialId, theta: f64) -> Result<[f64; 3]> {
    use ConstantId as C;
    check_theta(theta)?;
    let l = ln_2pi();
    Ok(match id {
        PolynomialId::Hr { r } => {
            let k = TAU.powf(theta * (0.5 - 0.5 / r as f64));
            let (h0, h1) = (eval_constant(C::H0 { r }, theta)?, eval_constant(C::H1 { r }, theta)?);
            [k * (h0 - theta * h1 * l), k * theta * h1, 0.0]
        }
        PolynomialId::Kb { b } => {
            let z = zeta((b + 1) as f64 / 2.0)?;
            let eb = eval_constant(C::Eb { b }, theta)?;
            let d = eval_constant(C::Drs { r: 1, s: b }, theta)?;
            [eb - d - theta * z * l, theta * z, 0.0]
        }
        PolynomialId::Gr { r } => {
            let k = TAU.powf(theta * (0.5 - 0.5 / r as f64));
            let (h0, h1) = (
                eval_constant(C::H0Prime { r }, theta)?,
                eval_constant(C::H1Prime { r }, theta)?,
            );
            [k * (h0 - theta * h1 * l), k * theta * h1, 0.0]
        }
        PolynomialId::Krs { r, s } => {
            let k1 = eval_constant(C::K1bc { b: r, c: s }, theta)?;
            let b = eval_constant(C::Brs { r, s }, theta)?;
            [b - theta * k1 - theta * k1 * l, theta * k1, 0.0]
        }
        PolynomialId::QuadraticB1 => [
            eval_constant(C::C0, theta)?,
            eval_constant(C::C1, theta)?,
            0.5 * theta * theta,
        ],
    })
}

pub fn eval_polynomial(id: PolynomialId, theta: f64, x: f64) -> Result<f64> {
    let p = polynomial_coefficients(id, theta)?;
    Ok(p[0] + x * (p[1] + x * p[2]))
}

/// Parameter regime selecting the shape of the asymptotic expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `a >= 2`, `a` divides `b` or `c`.
    TwistedDivisible,
    /// `a >= 2`, no divisibility.
    TwistedCoprime,
    /// `a = 1`, `1 < c < b`.
    UnitDistinct,
    /// `a = 1`, `b = c > 1`.
    UnitEqual,
    /// `a = 1`, `c = 1 < b`.
    UnitLog,
    /// `a = b = c = 1`.
    UnitQuadratic,
    /// Squared twist, `a = 1`, `1 < c < b`.
    SquaredDistinct,
    /// Squared twist, `a = 1`, `b = c > 1`.
    SquaredEqual,
}

impl Regime {
    pub const ALL: [Regime; 8] = [
        Regime::TwistedDivisible,
        Regime::TwistedCoprime,
        Regime::UnitDistinct,
        Regime::UnitEqual,
        Regime::UnitLog,
        Regime::UnitQuadratic,
        Regime::SquaredDistinct,
        Regime::SquaredEqual,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::TwistedDivisible => "twisted-divisible",
            Regime::TwistedCoprime => "twisted-coprime",
            Regime::UnitDistinct => "unit-distinct",
            Regime::UnitEqual => "unit-equal",
            Regime::UnitLog => "unit-log",
            Regime::UnitQuadratic => "unit-quadratic",
            Regime::SquaredDistinct => "squared-distinct",
            Regime::SquaredEqual => "squared-equal",
        }
    }

    pub fn from_name(s: &str) -> Option<Regime> {
        Regime::ALL.into_iter().find(|r| r.name() == s)
    }
}

/// `coefficient · T^exponent · (log T)^log_power`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondaryTerm {
    pub coefficient: f64,
    pub exponent: f64,
    pub log_power: i32,
}

/// `T^exponent · (log T)^log_power`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeTerm {
    pub exponent: f64,
    pub log_power: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub theorem: Regime,
    #[serde(rename = "T")]
    pub t: f64,
    pub main: f64,
    pub secondary: Vec<SecondaryTerm>,
    pub envelope: Vec<EnvelopeTerm>,
    pub epsilon: Option<f64>,
}

impl PredictionReport {
    pub fn secondary_value(&self) -> f64 {
        let lt = self.t.ln();
        self.secondary
            .iter()
            .map(|s| s.coefficient * self.t.powf(s.exponent) * lt.powi(s.log_power))
            .sum()
    }

    pub fn with_secondary(&self) -> f64 {
        self.main + self.secondary_value()
    }

    /// Sum of the envelope terms at `T`.
    pub fn envelope_value(&self) -> f64 {
        let lt = self.t.ln();
        self.envelope
            .iter()
            .map(|e| self.t.powf(e.exponent) * lt.powf(e.log_power))
            .sum()
    }

    /// Whether every secondary exponent exceeds every envelope exponent.
    pub fn dominance_ok(&self) -> bool {
        let top = self.envelope.iter().map(|e| e.exponent).fold(f64::NEG_INFINITY, f64::max);
        self.secondary.iter().all(|s| s.exponent > top)
    }
}

/// Parameters of a prediction with every constant evaluated once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predictor {
    pub regime: Regime,
    pub a: u32,
    /// Canonical order `b >= c`; the moments are symmetric in `(b, c)`.
    pub b: u32,
    pub c: u32,
    pub theta: f64,
    pub variant: Variant,
    /// Main term is `T · (m0 + m1 log T + m2 log² T)`.
    main_poly: [f64; 3],
    secondary: Vec<SecondaryTerm>,
    envelope: Vec<EnvelopeTerm>,
    epsilon: Option<f64>,
}

fn violated(msg: String) -> Error {
    Error::HypothesisViolated(msg)
}

/// Secondary exponent `1 − θ(1/2 − a/2r)`.
fn sec_exp(theta: f64, a: u32, r: u32) -> f64 {
    1.0 - theta * (0.5 - a as f64 / (2.0 * r as f64))
}

/// The regime `(a, b, c, variant)` falls into, with `b`, `c` in any order.
pub fn select_regime(a: u32, b: u32, c: u32, theta: f64, variant: Variant) -> Result<Regime> {
    let (b, c) = (b.max(c), b.min(c));
    if a == 0 || c == 0 {
        return Err(violated("a, b, c must be positive".into()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(violated(format!("theta must lie in (0, 1), got {theta}")));
    }
    match variant {
        Variant::SquaredTwist => {
            if a != 1 {
                return Err(violated(format!("squared twist is covered only for a = 1, got a = {a}")));
            }
            if theta > 0.5 {
                return Err(violated(format!("squared twist needs theta <= 1/2, got {theta}")));
            }
            if c == 1 {
                return Err(violated("squared twist needs b, c > 1".into()));
            }
            Ok(if b == c { Regime::SquaredEqual } else { Regime::SquaredDistinct })
        }
        Variant::SingleTwist if a == 1 => {
            if c == 1 {
                if theta > 0.5 {
                    return Err(violated(format!("c = 1 needs theta <= 1/2, got {theta}")));
                }
                Ok(if b == 1 { Regime::UnitQuadratic } else { Regime::UnitLog })
            } else if b == c {
                Ok(Regime::UnitEqual)
            } else {
                Ok(Regime::UnitDistinct)
            }
        }
        Variant::SingleTwist => {
            if !(a < c && c < b) {
                return Err(violated(format!("a >= 2 needs a < c < b, got ({a}, {b}, {c})")));
            }
            if gcd(gcd(a, b), c) != 1 {
                return Err(violated(format!("gcd({a}, {b}, {c}) != 1")));
            }
            let cap = (c as f64 / (2.0 * a as f64)).min(1.0);
            if theta >= cap {
                return Err(violated(format!("theta must be below min(c/2a, 1) = {cap}, got {theta}")));
            }
            Ok(if b % a == 0 || c % a == 0 {
                Regime::TwistedDivisible
            } else {
                Regime::TwistedCoprime
            })
        }
    }
}

impl Predictor {
    pub fn new(a: u32, b: u32, c: u32, theta: f64, variant: Variant) -> Result<Self> {
        use ConstantId as C;
        let regime = select_regime(a, b, c, theta, variant)?;
        let (b, c) = (b.max(c), b.min(c));
        let tail = |coef: f64, r: u32| SecondaryTerm {
            coefficient: -coef,
            exponent: sec_exp(theta, a, r),
            log_power: 0,
        };
        let env = |exponent: f64, log_power: f64| EnvelopeTerm { exponent, log_power };
        let linear = |k: f64| [k, 0.0, 0.0];
        let mut epsilon = None;
        let (main_poly, secondary, envelope) = match regime {
            Regime::TwistedDivisible | Regime::TwistedCoprime => {
                epsilon = Some(ENVELOPE_EPSILON);
                let envelope = vec![
                    env(1.0 - theta / 2.0, 0.0),
                    env(0.5 + theta / 2.0, 0.0),
                    env(theta / 2.0 + 3.0 * a as f64 * theta / (2.0 * c as f64) + ENVELOPE_EPSILON, 0.0),
                ];
                if regime == Regime::TwistedDivisible {
                    let (r, s) = if b % a == 0 { (b, c) } else { (c, b) };
                    let k = eval_constant(C::Kabc { a, b, c }, theta)?;
                    let cr = eval_constant(C::Cars { a, r, s }, theta)?;
                    (linear(k), vec![tail(cr, r)], envelope)
                } else {
                    let sigma = eval_constant(C::SigmaAbc { a, b, c }, theta)?;
                    (linear(sigma), Vec::new(), envelope)
                }
            }
            Regime::UnitDistinct | Regime::UnitEqual => {
                let k = eval_constant(C::K1bc { b, c }, theta)?;
                let envelope = vec![env(1.0 - theta / 2.0, 2.0), env(0.5 + theta / 2.0, 0.0)];
                let secondary = if regime == Regime::UnitDistinct {
                    vec![
                        tail(eval_constant(C::Cars { a: 1, r: c, s: b }, theta)?, c),
                        tail(eval_constant(C::Cars { a: 1, r: b, s: c }, theta)?, b),
                    ]
                } else {
                    poly_tail(polynomial_coefficients(PolynomialId::Hr { r: b }, theta)?, sec_exp(theta, 1, b))
                };
                (linear(k), secondary, envelope)
            }
            Regime::UnitLog => {
                let p = polynomial_coefficients(PolynomialId::Kb { b }, theta)?;
                let cr = eval_constant(C::Cars { a: 1, r: b, s: 1 }, theta)?;
                (p, vec![tail(cr, b)], vec![env(1.0 - theta / 2.0, 2.0)])
            }
            Regime::UnitQuadratic => (
                polynomial_coefficients(PolynomialId::QuadraticB1, theta)?,
                Vec::new(),
                vec![env(1.0 - theta / 2.0, 2.0)],
            ),
            Regime::SquaredDistinct | Regime::SquaredEqual => {
                let p = polynomial_coefficients(PolynomialId::Krs { r: b, s: c }, theta)?;
                let secondary = if regime == Regime::SquaredDistinct {
                    vec![
                        tail(eval_constant(C::C1rsPrime { r: c, s: b }, theta)?, c),
                        tail(eval_constant(C::C1rsPrime { r: b, s: c }, theta)?, b),
                    ]
                } else {
                    poly_tail(polynomial_coefficients(PolynomialId::Gr { r: b }, theta)?, sec_exp(theta, 1, b))
                };
                (p, secondary, vec![env(1.0 - theta / 2.0, 13.0 / 4.0), env(0.5 + theta, 0.0)])
            }
        };
        Ok(Predictor {
            regime,
            a,
            b,
            c,
            theta,
            variant,
            main_poly,
            secondary,
            envelope,
            epsilon,
        })
    }

    pub fn report(&self, t: f64) -> PredictionReport {
        let x = t.ln();
        let p = &self.main_poly;
        PredictionReport {
            theorem: self.regime,
            t,
            main: t * (p[0] + x * (p[1] + x * p[2])),
            secondary: self.secondary.clone(),
            envelope: self.envelope.clone(),
            epsilon: self.epsilon,
        }
    }
}

/// `−P(log T) T^e` split into its constant and linear parts.
fn poly_tail(p: [f64; 3], exponent: f64) -> Vec<SecondaryTerm> {
    vec![
        SecondaryTerm {
            coefficient: -p[1],
            exponent,
            log_power: 1,
        },
        SecondaryTerm {
            coefficient: -p[0],
            exponent,
            log_power: 0,
        },
    ]
}

/// Prediction for one parameter set at one height.
pub fn predict(a: u32, b: u32, c: u32, theta: f64, variant: Variant, t: f64) -> Result<PredictionReport> {
    Ok(Predictor::new(a, b, c, theta, variant)?.report(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualKind {
    Full,
    MainOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualAnalysis {
    pub residuals: Vec<f64>,
    pub envelope_constant: f64,
    /// Least-squares slope of `log|residual|` against `log T`; `None` when
    /// fewer than two residuals are above the noise floor.
    pub fitted_slope: Option<f64>,
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx).powi(2), b + (p.0 - mx) * (p.1 - my)));
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Residuals of `(T, numeric)` samples against the reports of `report_fn`.
pub fn residual_analysis(
    samples: &[(f64, f64)],
    report_fn: impl Fn(f64) -> Result<PredictionReport>,
    kind: ResidualKind,
) -> Result<ResidualAnalysis> {
    if samples.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "insufficient samples: need at least 5, got {}",
            samples.len()
        )));
    }
    let mut residuals = Vec::with_capacity(samples.len());
    let mut envelope_constant = 0.0f64;
    let mut pts = Vec::new();
    for &(t, numeric) in samples {
        let rep = report_fn(t)?;
        let predicted = match kind {
            ResidualKind::Full => rep.with_secondary(),
            ResidualKind::MainOnly => rep.main,
        };
        let r = numeric - predicted;
        residuals.push(r);
        envelope_constant = envelope_constant.max(r.abs() / rep.envelope_value());
        if r.abs() > 1e-12 * rep.main.abs() {
            pts.push((t.ln(), r.abs().ln()));
        }
    }
    Ok(ResidualAnalysis {
        residuals,
        envelope_constant,
        fitted_slope: ls_slope(&pts),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub id: String,
    pub params: String,
    pub value: Option<f64>,
    pub error: Option<String>,
}

/// Every constant meaningful for `(a, b, c, θ)`; failures are reported per row.
pub fn constants_table(a: u32, b: u32, c: u32, theta: f64) -> Vec<ConstantRow> {
    use ConstantId::*;
    let mut ids = vec![
        LambdaTheta,
        Cars { a, r: b, s: c },
        Cars { a, r: c, s: b },
        Kabc { a, b, c },
        SigmaAbc { a, b, c },
        K1bc { b, c },
        C0,
        C1,
    ];
    for (r, s) in [(b, c), (c, b)] {
        ids.extend([
            Drs { r, s },
            Ars { r, s },
            Brs { r, s },
            ArsPrime { r, s },
            DrsPrime { r, s },
            C1rsPrime { r, s },
        ]);
    }
    for r in [b, c] {
        ids.extend([
            E0 { r },
            E1 { r },
            F0 { r },
            F1 { r },
            H0 { r },
            H1 { r },
            Eb { b: r },
            E0Prime { r },
            E1Prime { r },
            F0Prime { r },
            F1Prime { r },
            H0Prime { r },
            H1Prime { r },
        ]);
    }
    let mut seen = std::collections::HashSet::new();
    ids.retain(|id| seen.insert(*id));
    let params = format!("a={a};b={b};c={c};theta={theta}");
    ids.into_iter()
        .map(|id| {
            let v = eval_constant(id, theta);
            ConstantRow {
                id: id.label(),
                params: params.clone(),
                value: v.as_ref().ok().copied(),
                error: v.err().map(|e| e.to_string()),
            }
        })
        .collect()
}
