//! Marching evaluation of Dirichlet sums on equally spaced abscissae.
//!
//! Quadrature panels inside a segment share one width, so node `j` of panel
//! `k + 1` sits a fixed distance above node `j` of panel `k`.  Each term
//! `n^{-iu}` therefore advances by a constant unimodular factor, which costs
//! one complex multiply instead of a trigonometric call.  Lanes are reseeded
//! exactly at the start of every block of panels, which bounds the drift.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::arith::{phase, tables, Dd, TABLE_LIMIT};

fn ln_dd(n: usize) -> Dd {
    if n <= TABLE_LIMIT {
        tables().ln[n]
    } else {
        Dd::ln_f64(n as f64)
    }
}

/// Terms `c_n exp(-i u ln n)`, `1 <= n <= len`, tracked on several lanes.
pub(crate) struct PhaseLanes {
    coef: Vec<f64>,
    sr: Vec<f64>,
    si: Vec<f64>,
    wr: Vec<Vec<f64>>,
    wi: Vec<Vec<f64>>,
}

impl PhaseLanes {
    /// `len` terms with weights `n^{-sigma}`, advancing `u` by `du` per step.
    pub fn new(len: usize, sigma: f64, lanes: usize, du: f64) -> Self {
        let coef: Vec<f64> = (1..=len)
            .map(|n| {
                if sigma == 0.5 && n <= TABLE_LIMIT {
                    tables().inv_sqrt[n]
                } else {
                    (n as f64).powf(-sigma)
                }
            })
            .collect();
        let mut sr = Vec::with_capacity(len);
        let mut si = Vec::with_capacity(len);
        for n in 1..=len {
            let (s, c) = phase(du, ln_dd(n)).sin_cos();
            sr.push(c);
            si.push(-s);
        }
        PhaseLanes {
            coef,
            sr,
            si,
            wr: vec![vec![0.0; len]; lanes],
            wi: vec![vec![0.0; len]; lanes],
        }
    }

    pub fn len(&self) -> usize {
        self.coef.len()
    }

    /// Sets lane values to `exp(-i u ln n)`.
    pub fn seed(&mut self, lane: usize, u: f64) {
        let len = self.len();
        let (wr, wi) = (&mut self.wr[lane], &mut self.wi[lane]);
        if len == 0 {
            return;
        }
        wr[0] = 1.0;
        wi[0] = 0.0;
        let t = tables();
        for n in 2..=len {
            let i = n - 1;
            if n <= TABLE_LIMIT && (t.spf[n] as usize) != n {
                let p = t.spf[n] as usize;
                let q = n / p;
                let (ar, ai) = (wr[p - 1], wi[p - 1]);
                let (br, bi) = (wr[q - 1], wi[q - 1]);
                wr[i] = ar * br - ai * bi;
                wi[i] = ar * bi + ai * br;
            } else {
                let (s, c) = phase(u, ln_dd(n)).sin_cos();
                wr[i] = c;
                wi[i] = -s;
            }
        }
    }

    /// Current value of term `n` (1-based) on a lane, without its weight.
    pub fn peek(&self, lane: usize, n: usize) -> Complex64 {
        Complex64::new(self.wr[lane][n - 1], self.wi[lane][n - 1])
    }

    /// Writes the partial sums up to each increasing `cuts[c]` into `out[c]`,
    /// then advances the lane by one step.
    pub fn sum_and_advance(&mut self, lane: usize, cuts: &[usize], out: &mut [Complex64]) {
        let (wr, wi) = (&mut self.wr[lane], &mut self.wi[lane]);
        let (coef, sr, si) = (&self.coef, &self.sr, &self.si);
        let mut start = 0usize;
        let (mut tr, mut ti) = (0.0, 0.0);
        for (c, &cut) in cuts.iter().enumerate() {
            let cut = cut.min(coef.len());
            if cut > start {
                let (r, i) = dot_advance(
                    &coef[start..cut],
                    &mut wr[start..cut],
                    &mut wi[start..cut],
                    &sr[start..cut],
                    &si[start..cut],
                );
                tr += r;
                ti += i;
                start = cut;
            }
            out[c] = Complex64::new(tr, ti);
        }
        if start < coef.len() {
            let len = coef.len();
            advance(&mut wr[start..len], &mut wi[start..len], &sr[start..len], &si[start..len]);
        }
    }
}

#[inline]
fn dot_advance(c: &[f64], wr: &mut [f64], wi: &mut [f64], sr: &[f64], si: &[f64]) -> (f64, f64) {
    let mut ar = [0.0f64; 4];
    let mut ai = [0.0f64; 4];
    let mut cc = c.chunks_exact(4);
    let mut rr = wr.chunks_exact_mut(4);
    let mut ii = wi.chunks_exact_mut(4);
    let mut pr = sr.chunks_exact(4);
    let mut pi = si.chunks_exact(4);
    for ((((c4, r4), i4), s4), t4) in (&mut cc).zip(&mut rr).zip(&mut ii).zip(&mut pr).zip(&mut pi) {
        for l in 0..4 {
            let (xr, xi) = (r4[l], i4[l]);
            ar[l] += c4[l] * xr;
            ai[l] += c4[l] * xi;
            r4[l] = xr * s4[l] - xi * t4[l];
            i4[l] = xr * t4[l] + xi * s4[l];
        }
    }
    let tail = cc
        .remainder()
        .iter()
        .zip(rr.into_remainder())
        .zip(ii.into_remainder())
        .zip(pr.remainder())
        .zip(pi.remainder());
    for ((((c, r), i), s), t) in tail {
        let (xr, xi) = (*r, *i);
        ar[0] += c * xr;
        ai[0] += c * xi;
        *r = xr * s - xi * t;
        *i = xr * t + xi * s;
    }
    ((ar[0] + ar[1]) + (ar[2] + ar[3]), (ai[0] + ai[1]) + (ai[2] + ai[3]))
}

#[inline]
fn advance(wr: &mut [f64], wi: &mut [f64], sr: &[f64], si: &[f64]) {
    for i in 0..wr.len() {
        let (xr, xi) = (wr[i], wi[i]);
        wr[i] = xr * sr[i] - xi * si[i];
        wi[i] = xr * si[i] + xi * sr[i];
    }
}

/// θ(u) near a reference height, from one accurate evaluation at `u0`.
pub(crate) struct ThetaTracker {
    u0: f64,
    th0: f64,
    l0: f64,
    tail0: f64,
}

fn theta_tail(u: f64) -> f64 {
    let r = 1.0 / u;
    let r2 = r * r;
    r * (1.0 / 48.0 + r2 * (7.0 / 5760.0 + r2 * (31.0 / 80640.0 + r2 * 127.0 / 430080.0)))
}

impl ThetaTracker {
    /// Valid for `u0 >= 24`; small heights fall back to direct evaluation.
    pub fn new(u0: f64) -> Self {
        ThetaTracker {
            u0,
            th0: crate::special_functions::gamma::theta_mod_2pi(u0),
            l0: (u0 / TAU).ln(),
            tail0: theta_tail(u0),
        }
    }

    /// θ(u0 + du) modulo 2π (not reduced).
    pub fn at(&self, du: f64) -> f64 {
        if self.u0 < 24.0 {
            return crate::special_functions::gamma::theta_mod_2pi(self.u0 + du);
        }
        let u = self.u0 + du;
        let d = 0.5 * u * (du / self.u0).ln_1p() + 0.5 * du * (self.l0 - 1.0) + (theta_tail(u) - self.tail0);
        self.th0 + d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::half_line_sum;

    #[test]
    fn marching_matches_direct_sums() {
        let (u0, du) = (123456.75, 0.375);
        let mut lanes = PhaseLanes::new(200, 0.5, 2, du);
        lanes.seed(0, u0);
        lanes.seed(1, u0 + 0.125);
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for k in 0..40 {
            let u = u0 + k as f64 * du;
            lanes.sum_and_advance(0, &[77, 200], &mut out);
            assert!((out[0] - half_line_sum(u, 77)).norm() < 1e-12);
            assert!((out[1] - half_line_sum(u, 200)).norm() < 1e-12);
            lanes.sum_and_advance(1, &[200], &mut out);
            assert!((out[0] - half_line_sum(u + 0.125, 200)).norm() < 1e-12);
        }
    }

    #[test]
    fn theta_tracker_matches_direct() {
        let tr = ThetaTracker::new(600000.0);
        for &du in &[0.0, 0.5, 13.0, 200.0] {
            let a = tr.at(du).rem_euclid(TAU);
            let b = crate::special_functions::gamma::theta_mod_2pi(600000.0 + du).rem_euclid(TAU);
            let d = (a - b).abs();
            assert!(d.min(TAU - d) < 1e-9, "du={du}: {a} vs {b}");
        }
    }
}
