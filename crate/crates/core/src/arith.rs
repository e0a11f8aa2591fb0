//! Low level arithmetic shared by the zeta and Dirichlet evaluators.
//!
//! Phases `u * ln n` reach 1e7 radians at the heights the moment engine
//! visits, so they are formed in double-double arithmetic and reduced
//! modulo 2π before the trigonometric call.  Composite `n` reuse the
//! prime phases through a smallest-prime-factor sieve.

use num_complex::Complex64;
use std::cell::RefCell;
use std::sync::OnceLock;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};
const TWO_PI: Dd = Dd {
    hi: std::f64::consts::TAU,
    lo: 2.449_293_598_294_706_4e-16,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn new(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::new(q3))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Natural logarithm of a positive double, accurate to ~1e-31 relative.
    pub fn ln_f64(x: f64) -> Dd {
        debug_assert!(x > 0.0 && x.is_finite());
        let mut k = x.log2().floor() as i32;
        let mut m = x / 2f64.powi(k);
        if m < 1.0 {
            m *= 2.0;
            k -= 1;
        }
        if m > std::f64::consts::SQRT_2 {
            m /= 2.0;
            k += 1;
        }
        // ln m = 2 atanh((m - 1) / (m + 1)), |z| < 0.172
        let z = Dd::new(m - 1.0).div(Dd::new(m + 1.0));
        let z2 = z.mul(z);
        let mut term = z;
        let mut acc = z;
        let mut j = 1.0;
        loop {
            term = term.mul(z2);
            j += 2.0;
            let c = term.div(Dd::new(j));
            acc = acc.add(c);
            if c.hi.abs() <= 1e-34 * acc.hi.abs() {
                break;
            }
        }
        acc.mul_f64(2.0).add(LN2.mul_f64(k as f64))
    }

    /// Reduction into `[-π, π)`, returned as a plain double.
    pub fn rem_two_pi(self) -> f64 {
        let k = (self.hi / TWO_PI.hi).round();
        self.sub(TWO_PI.mul_f64(k)).to_f64()
    }
}

/// Sieve and per-integer double-double logarithms up to a fixed bound.
pub(crate) struct Tables {
    pub spf: Vec<u32>,
    pub ln: Vec<Dd>,
    pub inv_sqrt: Vec<f64>,
}

/// Integers up to this bound use the tabulated fast path.
pub(crate) const TABLE_LIMIT: usize = 1 << 17;

pub(crate) fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let n = TABLE_LIMIT;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let mut ln = vec![Dd::new(0.0); n + 1];
        for i in 2..=n {
            let p = spf[i] as usize;
            ln[i] = if p == i {
                Dd::ln_f64(i as f64)
            } else {
                ln[p].add(ln[i / p])
            };
        }
        let inv_sqrt = (0..=n)
            .map(|i| if i == 0 { 0.0 } else { 1.0 / (i as f64).sqrt() })
            .collect();
        Tables { spf, ln, inv_sqrt }
    })
}

/// `u * ln n` reduced modulo 2π with double-double intermediate precision.
#[inline]
pub(crate) fn phase(u: f64, ln_n: Dd) -> f64 {
    ln_n.mul_f64(u).rem_two_pi()
}

thread_local! {
    static SCRATCH: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

/// Sum of `weight(n) * exp(-i u ln n)` for `1 <= n <= n_max`.
///
/// Prime phases are evaluated directly; composite phases are products of
/// the phases of their factors.
pub(crate) fn phase_sum(u: f64, n_max: usize, weight: impl Fn(usize) -> f64) -> Complex64 {
    if n_max == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let t = tables();
    let fast = n_max.min(TABLE_LIMIT);
    let mut acc = SCRATCH.with(|cell| {
        let mut w = cell.borrow_mut();
        w.clear();
        w.resize(fast + 1, Complex64::new(0.0, 0.0));
        w[1] = Complex64::new(1.0, 0.0);
        let (mut re, mut im) = (weight(1), 0.0);
        for n in 2..=fast {
            let p = t.spf[n] as usize;
            let z = if p == n {
                let (s, c) = phase(u, t.ln[n]).sin_cos();
                Complex64::new(c, -s)
            } else {
                w[p] * w[n / p]
            };
            w[n] = z;
            let wt = weight(n);
            re += wt * z.re;
            im += wt * z.im;
        }
        Complex64::new(re, im)
    });
    for n in (fast + 1)..=n_max {
        let (s, c) = phase(u, Dd::ln_f64(n as f64)).sin_cos();
        acc += Complex64::new(c, -s) * weight(n);
    }
    acc
}

/// `sum_{n <= n_max} n^{-1/2 - iu}`.
pub(crate) fn half_line_sum(u: f64, n_max: usize) -> Complex64 {
    let t = tables();
    if n_max <= TABLE_LIMIT {
        phase_sum(u, n_max, |n| t.inv_sqrt[n])
    } else {
        phase_sum(u, n_max, |n| 1.0 / (n as f64).sqrt())
    }
}
