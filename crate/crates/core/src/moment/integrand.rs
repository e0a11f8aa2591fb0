use num_complex::Complex64;
use std::f64::consts::TAU;
use std::ops::Range;

use super::cache::{BlockKey, ZetaCache};
use super::{MomentSpec, Variant};
use crate::dirichlet::CutoffRule;
use crate::error::{Error, Result};
use crate::kernel::{PhaseLanes, ThetaTracker};
use crate::quadrature::{PanelIntegrand, SegmentView};
use crate::special_functions::critical::{em_tail, em_terms, rounding_floor, rs_remainder, rs_rounding};
use crate::special_functions::{chi_half, RS_THRESHOLD};

/// Output slots: M, I1, I2, I3 and ∫ D_θ P(−bt) P(−ct).
pub(crate) const SLOTS: usize = 5;

pub(crate) struct MomentIntegrand<'a> {
    pub spec: MomentSpec,
    pub rule: CutoffRule,
    pub components: bool,
    pub cache: Option<&'a ZetaCache>,
    pub tol: f64,
}

/// ζ, D and χ at `u = r t` for every node of a block, in output order.
struct Track {
    zeta: Vec<Complex64>,
    d: Vec<Complex64>,
    chi: Vec<Complex64>,
    err: Vec<f64>,
}

fn block_heights(r: f64, seg: &SegmentView, panels: &Range<usize>, x: &[f64]) -> (f64, f64, Vec<f64>) {
    let u0 = r * (seg.lo + panels.start as f64 * seg.h);
    let du = r * seg.h;
    let mut us = Vec::with_capacity(panels.len() * x.len());
    for i in 0..panels.len() {
        for xj in x {
            us.push(u0 + du * (i as f64 + xj));
        }
    }
    (u0, du, us)
}

fn track(r: f64, seg: &SegmentView, panels: &Range<usize>, x: &[f64], parts: bool) -> Track {
    let nq = x.len();
    let total = panels.len() * nq;
    let (u0, du, us) = block_heights(r, seg, panels, x);
    let n_rs = (r * seg.mid() / TAU).sqrt().floor() as usize;
    let zero = Complex64::new(0.0, 0.0);
    let mut tr = Track {
        zeta: Vec::with_capacity(total),
        d: Vec::with_capacity(total),
        chi: Vec::with_capacity(total),
        err: Vec::with_capacity(total),
    };
    let mut s = [zero; 2];
    if r * seg.hi <= RS_THRESHOLD {
        let n_em = em_terms(r * seg.hi);
        let w_em = (n_em as f64).powf(-0.5);
        let mut lanes = PhaseLanes::new(n_em, 0.5, nq, du);
        for (j, xj) in x.iter().enumerate() {
            lanes.seed(j, u0 + du * xj);
        }
        for (idx, &u) in us.iter().enumerate() {
            let j = idx % nq;
            let n_pow = lanes.peek(j, n_em) * w_em;
            lanes.sum_and_advance(j, &[n_rs, n_em - 1], &mut s);
            let tail = em_tail(u, n_em, n_pow);
            tr.zeta.push(s[1] + tail.value);
            tr.err.push(tail.error + rounding_floor(u));
            tr.d.push(s[0]);
            tr.chi.push(if parts { chi_half(u) } else { zero });
        }
    } else {
        let mut lanes = PhaseLanes::new(n_rs, 0.5, nq, du);
        for (j, xj) in x.iter().enumerate() {
            lanes.seed(j, u0 + du * xj);
        }
        let theta = ThetaTracker::new(u0);
        let round = rs_rounding(n_rs);
        for (idx, &u) in us.iter().enumerate() {
            let j = idx % nq;
            lanes.sum_and_advance(j, &[n_rs], &mut s);
            let d = s[0];
            let (sn, cs) = theta.at(u - u0).sin_cos();
            let e = Complex64::new(cs, -sn);
            let chi = e * e;
            let (rem, trunc) = rs_remainder(u, n_rs);
            tr.zeta.push(d + chi * d.conj() + e * rem);
            tr.err.push(trunc + round);
            tr.d.push(d);
            tr.chi.push(chi);
        }
    }
    tr
}

impl MomentIntegrand<'_> {
    fn zeta_track(&self, r: u32, seg: &SegmentView, panels: &Range<usize>, x: &[f64]) -> Result<Track> {
        let r = r as f64;
        let tr = match (self.cache, self.components) {
            (Some(cache), false) => {
                let key = BlockKey::new(
                    r * (seg.lo + panels.start as f64 * seg.h),
                    r * seg.h,
                    x.len(),
                    panels.len(),
                );
                match cache.get(&key, self.tol) {
                    Some(v) => Track {
                        zeta: v.iter().map(|p| p.0).collect(),
                        err: v.iter().map(|p| p.1).collect(),
                        d: Vec::new(),
                        chi: Vec::new(),
                    },
                    None => {
                        let tr = track(r, seg, panels, x, false);
                        cache.insert(key, tr.zeta.iter().copied().zip(tr.err.iter().copied()).collect());
                        tr
                    }
                }
            }
            _ => track(r, seg, panels, x, self.components),
        };
        if let Some(e) = tr.err.iter().copied().find(|&e| !(e <= self.tol)) {
            return Err(Error::AccuracyUnreachable {
                requested: self.tol,
                achieved: e,
            });
        }
        Ok(tr)
    }
}

impl PanelIntegrand<SLOTS> for MomentIntegrand<'_> {
    fn phase_rate(&self, t: f64) -> f64 {
        let lnp = |v: f64| v.max(1.0).ln();
        let (a, b, c) = (self.spec.a as f64, self.spec.b as f64, self.spec.c as f64);
        a * (self.rule.cutoff(t).max(1) as f64).ln()
            + b * lnp(b * t / TAU)
            + c * lnp(c * t / TAU)
            + 1.0
    }

    fn eval_panels(
        &self,
        seg: &SegmentView,
        panels: Range<usize>,
        x: &[f64],
        out: &mut [[Complex64; SLOTS]],
    ) -> Result<f64> {
        let zero = Complex64::new(0.0, 0.0);
        let n_theta = self.rule.cutoff(seg.mid());
        if n_theta == 0 {
            out.fill([zero; SLOTS]);
            return Ok(0.0);
        }
        let nq = x.len();
        let a = self.spec.a as f64;
        let mut dl = PhaseLanes::new(n_theta, 0.5, nq, a * seg.h);
        let t0 = seg.lo + panels.start as f64 * seg.h;
        for (j, xj) in x.iter().enumerate() {
            dl.seed(j, a * (t0 + xj * seg.h));
        }
        let tb = self.zeta_track(self.spec.b, seg, &panels, x)?;
        let tc_own;
        let tc = if self.spec.c == self.spec.b {
            &tb
        } else {
            tc_own = self.zeta_track(self.spec.c, seg, &panels, x)?;
            &tc_own
        };
        let squared = self.spec.variant == Variant::SquaredTwist;
        let mut s = [zero];
        let mut worst = 0.0f64;
        for (idx, o) in out.iter_mut().enumerate() {
            dl.sum_and_advance(idx % nq, &[n_theta], &mut s);
            let w = if squared { Complex64::new(s[0].norm_sqr(), 0.0) } else { s[0] };
            let (zb, zc) = (tb.zeta[idx], tc.zeta[idx]);
            let (eb, ec) = (tb.err[idx], tc.err[idx]);
            worst = worst.max(w.norm() * (eb * (zc.norm() + ec) + ec * zb.norm()));
            o[0] = w * zb.conj() * zc.conj();
            if self.components {
                let (db, dc) = (tb.d[idx], tc.d[idx]);
                let (xb, xc) = (tb.chi[idx].conj(), tc.chi[idx].conj());
                let (cb, cc) = (db.conj(), dc.conj());
                o[1] = w * cb * cc;
                o[2] = w * (xb * db * cc + xc * dc * cb);
                o[3] = w * xb * xc * db * dc;
                o[4] = w * (cb + xb * db) * (cc + xc * dc);
            } else {
                o[1..].fill(zero);
            }
        }
        Ok(worst)
    }
}
