//! Diagonal solutions of `n1^a = n2^b n3^c` and the lattice sums built on them.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::dirichlet::CutoffRule;
use crate::error::{Error, Result};
use crate::exec::{map_blocks, ExecMode};
use crate::special_functions::gamma::BERNOULLI_EVEN;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeTriple {
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
}

impl LatticeTriple {
    pub fn new(n1: u64, n2: u64, n3: u64) -> Self {
        LatticeTriple { n1, n2, n3 }
    }

    /// `P = n1 n2 n3`.
    pub fn product(&self) -> f64 {
        self.n1 as f64 * self.n2 as f64 * self.n3 as f64
    }
}

/// Region `n1 <= Q`, `n2 <= √(bT/2π)`, `n3 <= √(cT/2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub theta: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

impl BoxSpec {
    pub fn new(a: u32, b: u32, c: u32, theta: f64, t: f64) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::DomainViolation("a, b, c must be positive".into()));
        }
        if !(theta > 0.0 && theta < 1.0) || !(t > 0.0 && t.is_finite()) {
            return Err(Error::DomainViolation(format!(
                "need 0 < theta < 1 and T > 0, got theta={theta}, T={t}"
            )));
        }
        Ok(BoxSpec { a, b, c, theta, t })
    }

    fn rule(&self) -> CutoffRule {
        CutoffRule {
            theta: self.theta,
            twist: self.a,
        }
    }

    /// `Q = (aT/2π)^θ`.
    pub fn q(&self) -> f64 {
        self.rule().q(self.t)
    }

    /// Largest admissible `n1`.
    pub fn n1_max(&self) -> u64 {
        self.rule().cutoff(self.t) as u64
    }

    pub fn n2_max(&self) -> u64 {
        square_limit(self.b, self.t)
    }

    pub fn n3_max(&self) -> u64 {
        square_limit(self.c, self.t)
    }

    pub fn contains(&self, p: &LatticeTriple) -> bool {
        p.n1 >= 1 && p.n2 >= 1 && p.n3 >= 1 && weight_threshold(p, self) <= self.t
    }
}

/// Largest `n` with `2π n² / r <= t`.
fn square_limit(r: u32, t: f64) -> u64 {
    let lim = |n: u64| TAU * (n as f64) * (n as f64) / r as f64;
    let mut n = (r as f64 * t / TAU).sqrt().floor() as u64;
    while lim(n + 1) <= t {
        n += 1;
    }
    while n > 0 && lim(n) > t {
        n -= 1;
    }
    n
}

/// `N = 2π max(n1^{1/θ}/a, n2²/b, n3²/c)`; the triple lies in the box iff `N <= T`.
pub fn weight_threshold(p: &LatticeTriple, bx: &BoxSpec) -> f64 {
    let w1 = bx.rule().breakpoint(p.n1 as usize);
    let w2 = TAU * (p.n2 as f64).powi(2) / bx.b as f64;
    let w3 = TAU * (p.n3 as f64).powi(2) / bx.c as f64;
    w1.max(w2).max(w3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Parametrized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub triples: Vec<LatticeTriple>,
    pub method: Method,
}

impl SolutionSet {
    fn new(mut triples: Vec<LatticeTriple>, method: Method) -> Self {
        triples.sort();
        triples.dedup();
        SolutionSet { triples, method }
    }

    pub fn same_triples(&self, other: &SolutionSet) -> bool {
        self.triples == other.triples
    }
}

fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

fn pow_u128(n: u64, e: u32) -> Option<u128> {
    (n as u128).checked_pow(e)
}

/// Exact `a`-th root of `v`, if it is a perfect power.
fn exact_root(v: u128, a: u32) -> Option<u64> {
    if a == 1 {
        return u64::try_from(v).ok();
    }
    let guess = (v as f64).powf(1.0 / a as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| pow_u128(r, a) == Some(v))
}

/// Candidate `(n2, n3)` pairs allowed in a brute-force scan.
pub const BRUTE_FORCE_CAP: u64 = 100_000_000;

/// All solutions in the box by testing every `(n2, n3)` for a perfect power.
pub fn enumerate_bruteforce(bx: &BoxSpec) -> Result<SolutionSet> {
    let (n1m, n2m, n3m) = (bx.n1_max(), bx.n2_max(), bx.n3_max());
    if n2m.saturating_mul(n3m) > BRUTE_FORCE_CAP {
        return Err(Error::InvalidInput(format!(
            "box too large: {} candidate pairs exceed {BRUTE_FORCE_CAP}",
            n2m as u128 * n3m as u128
        )));
    }
    let bound = pow_u128(n1m, bx.a);
    let strips = map_blocks(n2m as usize, ExecMode::default(), |i| {
        let n2 = i as u64 + 1;
        let mut out = Vec::new();
        let Some(p2) = pow_u128(n2, bx.b) else {
            return out;
        };
        for n3 in 1..=n3m {
            let v = match pow_u128(n3, bx.c).and_then(|p3| p3.checked_mul(p2)) {
                Some(v) if bound.is_none_or(|b| v <= b) => v,
                _ => break,
            };
            if let Some(n1) = exact_root(v, bx.a) {
                let t = LatticeTriple::new(n1, n2, n3);
                if n1 <= n1m && bx.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    });
    Ok(SolutionSet::new(strips.concat(), Method::Brute))
}

/// Exponent data of the parametrization of diagonal solutions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParametrizationData {
    pub a2: u32,
    pub b2: u32,
    pub a3: u32,
    pub c3: u32,
    #[serde(rename = "A")]
    pub big_a: u32,
    /// `alpha[j - 1] = α_j` for `1 <= j <= A - 1`.
    pub alpha: Vec<u32>,
    gab: u32,
    gac: u32,
}

impl ParametrizationData {
    pub fn new(a: u32, b: u32, c: u32) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::DomainViolation("a, b, c must be positive".into()));
        }
        let (gab, gac) = (gcd(a as u64, b as u64) as u32, gcd(a as u64, c as u64) as u32);
        if gcd(gab as u64, c as u64) != 1 {
            return Err(Error::DomainViolation(format!(
                "unsupported coefficients: gcd({a}, {b}, {c}) != 1"
            )));
        }
        let big_a = a / (gab * gac);
        let (b2, c3) = (b / gab, c / gac);
        let mut alpha = Vec::with_capacity(big_a.saturating_sub(1) as usize);
        for j in 1..big_a {
            let sols: Vec<u32> = (1..big_a)
                .filter(|&al| (j as u64 * b2 as u64 + al as u64 * c3 as u64).is_multiple_of(big_a as u64))
                .collect();
            if sols.len() != 1 {
                return Err(Error::DomainViolation(format!(
                    "congruence for j={j} has {} solutions",
                    sols.len()
                )));
            }
            alpha.push(sols[0]);
        }
        Ok(ParametrizationData {
            a2: a / gab,
            b2,
            a3: a / gac,
            c3,
            big_a,
            alpha,
            gab,
            gac,
        })
    }

    /// Exponents of `d_j` in `(n1, n2, n3)`.
    pub fn d_exponents(&self, j: u32) -> (u32, u32, u32) {
        let al = self.alpha[j as usize - 1];
        ((j * self.b2 + al * self.c3) / self.big_a, j * self.gac, al * self.gab)
    }
}

fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

/// All solutions in the box from the generators `r2, r3, d_1..d_{A-1}`.
pub fn enumerate_parametrized(bx: &BoxSpec) -> Result<SolutionSet> {
    let pd = ParametrizationData::new(bx.a, bx.b, bx.c)?;
    let lim = [bx.n1_max(), bx.n2_max(), bx.n3_max()];
    let mut out = Vec::new();
    // partial products of the d-factors in (n1, n2, n3)
    let mut stack: Vec<u64> = Vec::new();
    fn mul_pow(x: u64, base: u64, e: u32, cap: u64) -> Option<u64> {
        let v = (x as u128).checked_mul(pow_u128(base, e)?)?;
        (v <= cap as u128).then_some(v as u64)
    }
    fn rec(
        j: u32,
        acc: [u64; 3],
        pd: &ParametrizationData,
        lim: &[u64; 3],
        chosen: &mut Vec<u64>,
        out: &mut Vec<LatticeTriple>,
        bx: &BoxSpec,
    ) {
        if j == pd.big_a.max(1) {
            let mut r2 = 1u64;
            while let (Some(x1), Some(x2)) = (
                mul_pow(acc[0], r2, pd.b2, lim[0]),
                mul_pow(acc[1], r2, pd.a2, lim[1]),
            ) {
                let mut r3 = 1u64;
                while let (Some(y1), Some(y3)) = (
                    mul_pow(x1, r3, pd.c3, lim[0]),
                    mul_pow(acc[2], r3, pd.a3, lim[2]),
                ) {
                    let t = LatticeTriple::new(y1, x2, y3);
                    if bx.contains(&t) {
                        out.push(t);
                    }
                    r3 += 1;
                }
                r2 += 1;
            }
            return;
        }
        let (e1, e2, e3) = pd.d_exponents(j);
        let mut d = 1u64;
        loop {
            let next = if d == 1 {
                Some(acc)
            } else {
                match (
                    mul_pow(acc[0], d, e1, lim[0]),
                    mul_pow(acc[1], d, e2, lim[1]),
                    mul_pow(acc[2], d, e3, lim[2]),
                ) {
                    (Some(x), Some(y), Some(z)) => Some([x, y, z]),
                    _ => None,
                }
            };
            // every factor is at least d once d > 1, so the first miss ends the loop
            let Some(next) = next else { break };
            if d == 1 || (is_squarefree(d) && chosen.iter().all(|&o| gcd(o, d) == 1)) {
                chosen.push(d);
                rec(j + 1, next, pd, lim, chosen, out, bx);
                chosen.pop();
            }
            d += 1;
        }
    }
    rec(1, [1, 1, 1], &pd, &lim, &mut stack, &mut out, bx);
    for t in &out {
        debug_assert!(is_solution(bx.a, bx.b, bx.c, t));
    }
    Ok(SolutionSet::new(out, Method::Parametrized))
}

/// `n1^a == n2^b n3^c` in exact arithmetic.
pub fn is_solution(a: u32, b: u32, c: u32, t: &LatticeTriple) -> bool {
    let lhs = pow_u128(t.n1, a);
    let rhs = pow_u128(t.n2, b)
        .zip(pow_u128(t.n3, c))
        .and_then(|(x, y)| x.checked_mul(y));
    match (lhs, rhs) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// `Σ_{n > m} n^{-s}` by Euler–Maclaurin, with a bound on the remainder.
fn power_tail(s: f64, m: u64) -> (f64, f64) {
    let mf = m as f64;
    let mut v = mf.powf(1.0 - s) / (s - 1.0) - 0.5 * mf.powf(-s);
    // derivative factors s (s+1) ... (s+2k-2) and (2k)!
    let mut poch = s;
    let mut fact = 2.0;
    let mut term = 0.0;
    for (k, b) in BERNOULLI_EVEN.iter().take(4).enumerate() {
        let kk = 2.0 * (k + 1) as f64;
        term = b / fact * poch * mf.powf(-s - kk + 1.0);
        v += term;
        poch *= (s + kk - 1.0) * (s + kk);
        fact *= (kk + 1.0) * (kk + 2.0);
    }
    (v, 4.0 * term.abs())
}

fn primes_upto(n: usize) -> Vec<u64> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i as u64);
            let mut k = i * i;
            while k <= n {
                sieve[k] = false;
                k += i;
            }
        }
    }
    out
}

/// Truncation of `σ_{a,b,c} = Σ_{diagonal} (n1 n2 n3)^{-1/2}` over the
/// parametrization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaTrunc {
    /// Plain sum over generators `r2, r3 <= limit` and `d`-primes `<= limit`.
    pub partial: f64,
    /// Upper bound on `σ − partial` by integral comparison.
    pub partial_tail_bound: f64,
    /// `partial` with the `r`-sum tails added in closed form.
    pub value: f64,
    /// Bound on `|σ − value|`.
    pub tail_bound: f64,
    pub limit: u64,
}

/// Exponents `(s2, s3, [s_j])` in `P^{-1/2} = r2^{-s2} r3^{-s3} Π d_j^{-s_j}`.
fn sigma_exponents(pd: &ParametrizationData) -> (f64, f64, Vec<f64>) {
    let s2 = (pd.a2 + pd.b2) as f64 / 2.0;
    let s3 = (pd.a3 + pd.c3) as f64 / 2.0;
    let sd = (1..pd.big_a)
        .map(|j| {
            let (e1, e2, e3) = pd.d_exponents(j);
            (e1 + e2 + e3) as f64 / 2.0
        })
        .collect();
    (s2, s3, sd)
}

/// `σ` truncated at `limit`; see [`SigmaTrunc`].
pub fn sigma_partial(a: u32, b: u32, c: u32, limit: u64) -> Result<SigmaTrunc> {
    let pd = ParametrizationData::new(a, b, c)?;
    let (s2, s3, sd) = sigma_exponents(&pd);
    if s2 <= 1.0 || s3 <= 1.0 {
        return Err(Error::DomainViolation(format!(
            "σ diverges for ({a}, {b}, {c}): exponents {s2}, {s3}"
        )));
    }
    let limit = limit.max(2);
    let sum = |s: f64| (1..=limit).rev().map(|r| (r as f64).powf(-s)).sum::<f64>();
    let (p2, p3) = (sum(s2), sum(s3));
    let mut euler = 1.0;
    let mut log_tail = 0.0;
    if !sd.is_empty() {
        for p in primes_upto(limit as usize) {
            euler *= 1.0 + sd.iter().map(|&s| (p as f64).powf(-s)).sum::<f64>();
        }
        log_tail = sd.iter().map(|&s| (limit as f64).powf(1.0 - s) / (s - 1.0)).sum();
    }
    let raw = |s: f64| (limit as f64).powf(1.0 - s) / (s - 1.0);
    let partial = p2 * p3 * euler;
    let upper = (p2 + raw(s2)) * (p3 + raw(s3)) * euler * log_tail.exp();
    let (t2, e2) = power_tail(s2, limit);
    let (t3, e3) = power_tail(s3, limit);
    let (q2, q3) = (p2 + t2, p3 + t3);
    let value = q2 * q3 * euler;
    let tail_bound = ((q2 + e2) * (q3 + e3) * euler * log_tail.exp_m1().max(0.0))
        + (e2 * (q3 + e3) + e3 * q2) * euler
        + 16.0 * f64::EPSILON * value * (limit as f64).ln();
    Ok(SigmaTrunc {
        partial,
        partial_tail_bound: upper - partial,
        value,
        tail_bound,
        limit,
    })
}

/// `σ` to absolute tolerance `tol`, doubling the truncation as needed.
pub fn sigma_trunc(a: u32, b: u32, c: u32, tol: f64) -> Result<SigmaTrunc> {
    let mut limit = 1024u64;
    loop {
        let s = sigma_partial(a, b, c, limit)?;
        if s.tail_bound <= tol {
            return Ok(s);
        }
        if limit >= 1 << 24 {
            return Err(Error::AccuracyUnreachable {
                requested: tol,
                achieved: s.tail_bound,
            });
        }
        limit *= 4;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JTerms {
    pub j1: f64,
    pub j3: f64,
    pub j4: f64,
    pub sigma_trunc: f64,
    /// `|J1 − (σ T − J3 − J4)| / (σ T)` from separately accumulated sums.
    pub relative_residual: f64,
    pub solutions: usize,
}

/// Diagonal lattice sums over the box for `a < c <= b`.
pub fn j_terms(bx: &BoxSpec) -> Result<JTerms> {
    if !(bx.a < bx.c && bx.c <= bx.b) {
        return Err(Error::HypothesisViolated(format!(
            "lattice identity needs a < c <= b, got ({}, {}, {})",
            bx.a, bx.b, bx.c
        )));
    }
    let sig = sigma_trunc(bx.a, bx.b, bx.c, 1e-10)?;
    let sols = enumerate_parametrized(bx)?;
    let t = bx.t;
    let (mut j1, mut j4, mut inside) = (0.0, 0.0, 0.0);
    for p in &sols.triples {
        let w = 1.0 / p.product().sqrt();
        let n = weight_threshold(p, bx);
        j1 += (t - n) * w;
        j4 += n * w;
        inside += w;
    }
    let j3 = t * (sig.value - inside);
    let rhs = sig.value * t - j3 - j4;
    Ok(JTerms {
        j1,
        j3,
        j4,
        sigma_trunc: sig.value,
        relative_residual: (j1 - rhs).abs() / (sig.value * t),
        solutions: sols.triples.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SKind {
    /// `Σ_{m2^b m3 <= Q} m3^{-1} m2^{-(1+b)/2}`
    Sb { b: u32 },
    /// `Σ_{r2^b r3^c r4 <= Q} r4^{-1} r2^{-(1+b)/2} r3^{-(1+c)/2}`
    Sbc { b: u32, c: u32 },
}

/// Diagonal sums of the `a = 1` twisted moments, truncated at `Q`.
pub fn s_sums(kind: SKind, q: f64) -> f64 {
    if q < 1.0 {
        return 0.0;
    }
    let qn = q.floor() as u64;
    let harmonic = |m: u64| (1..=m).rev().map(|k| 1.0 / k as f64).sum::<f64>();
    match kind {
        SKind::Sb { b } => {
            let mut s = 0.0;
            let mut m2 = 1u64;
            while let Some(p) = pow_u128(m2, b).filter(|&p| p <= qn as u128) {
                s += (m2 as f64).powf(-(1.0 + b as f64) / 2.0) * harmonic(qn / p as u64);
                m2 += 1;
            }
            s
        }
        SKind::Sbc { b, c } => {
            let mut s = 0.0;
            let mut r2 = 1u64;
            while let Some(p2) = pow_u128(r2, b).filter(|&p| p <= qn as u128) {
                let mut r3 = 1u64;
                while let Some(p) = pow_u128(r3, c)
                    .and_then(|p3| p3.checked_mul(p2))
                    .filter(|&p| p <= qn as u128)
                {
                    s += (r2 as f64).powf(-(1.0 + b as f64) / 2.0)
                        * (r3 as f64).powf(-(1.0 + c as f64) / 2.0)
                        * harmonic(qn / p as u64);
                    r3 += 1;
                }
                r2 += 1;
            }
            s
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
    #[serde(rename = "D")]
    pub d: i128,
    pub ratio: f64,
}

/// The `keep` smallest ratios `|D| n2 n3 / n1^{a−1−ε}`, `D = n1^a − n2^b n3^c ≠ 0`,
/// over `1 <= n1, n2, n3 <= limit`, ordered by ratio then triple.
pub fn conjecture_scan(a: u32, b: u32, c: u32, limit: u64, epsilon: f64, keep: usize) -> Result<Vec<ScanRow>> {
    if a == 0 || b == 0 || c == 0 || limit == 0 || !(epsilon >= 0.0) {
        return Err(Error::InvalidInput("need positive a, b, c, limit and epsilon >= 0".into()));
    }
    let pw = |e: u32| -> Result<Vec<i128>> {
        (0..=limit)
            .map(|n| {
                pow_u128(n, e)
                    .filter(|&v| v < (i128::MAX as u128) >> 1)
                    .map(|v| v as i128)
                    .ok_or_else(|| Error::InvalidInput(format!("limit {limit} overflows {n}^{e}")))
            })
            .collect()
    };
    let (p1, p2, p3) = (pw(a)?, pw(b)?, pw(c)?);
    if p2[limit as usize].checked_mul(p3[limit as usize]).is_none() {
        return Err(Error::InvalidInput(format!("limit {limit} overflows n2^b n3^c")));
    }
    let expo = a as f64 - 1.0 - epsilon;
    let order = |x: &ScanRow, y: &ScanRow| {
        x.ratio
            .total_cmp(&y.ratio)
            .then((x.n1, x.n2, x.n3).cmp(&(y.n1, y.n2, y.n3)))
    };
    let strips = map_blocks(limit as usize, ExecMode::default(), |i| {
        let n1 = i as u64 + 1;
        let scale = (n1 as f64).powf(-expo);
        let mut best: Vec<ScanRow> = Vec::new();
        let mut worst = f64::INFINITY;
        for n2 in 1..=limit {
            for n3 in 1..=limit {
                let d = p1[n1 as usize] - p2[n2 as usize] * p3[n3 as usize];
                if d == 0 {
                    continue;
                }
                let ratio = d.unsigned_abs() as f64 * (n2 * n3) as f64 * scale;
                if best.len() >= keep && ratio > worst {
                    continue;
                }
                best.push(ScanRow { n1, n2, n3, d, ratio });
                if best.len() > 2 * keep.max(16) {
                    best.sort_by(order);
                    best.truncate(keep);
                    worst = best.last().map_or(f64::INFINITY, |r| r.ratio);
                }
            }
        }
        best.sort_by(order);
        best.truncate(keep);
        best
    });
    let mut all = strips.concat();
    all.sort_by(order);
    all.truncate(keep);
    Ok(all)
}
