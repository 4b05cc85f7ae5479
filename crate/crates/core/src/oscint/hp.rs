//! Minimal high-precision complex arithmetic for vertical-line contour
//! work, where Gamma-ratio cancellation eats digits at large imaginary
//! height. Backed by `astro_float`; precision is a runtime parameter with
//! everything ≥ 166 bits accepted.
//!
//! Log-gamma uses argument shifting plus the Stirling series with exact
//! Bernoulli coefficients; walking a uniform contour grid should use
//! [`Ctx::ln_increment`] so each step costs a short series instead of a
//! full logarithm.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cell::RefCell;

const RM: RoundingMode = RoundingMode::ToEven;
/// Stirling series length; with |z| ≥ 40 the tail is below 2^-192.
const STIRLING_TERMS: usize = 30;
const STIRLING_RADIUS: f64 = 40.0;

/// Precision context. One per thread: the constants cache is not shareable.
pub struct Ctx {
    pub prec: usize,
    cc: RefCell<Consts>,
    stirling: Vec<BigFloat>,
    pi: BigFloat,
    ln_pi: BigFloat,
    half_ln_two_pi: BigFloat,
}

impl Ctx {
    pub fn new(prec: usize) -> Self {
        assert!(prec >= 64, "precision below 64 bits defeats the point");
        let mut cc = Consts::new().expect("constants cache");
        let pi = cc.pi(prec, RM);
        let ln_pi = pi.ln(prec, RM, &mut cc);
        let two_pi = pi.mul(&BigFloat::from_f64(2.0, prec), prec, RM);
        let half_ln_two_pi =
            two_pi.ln(prec, RM, &mut cc).mul(&BigFloat::from_f64(0.5, prec), prec, RM);
        let stirling = stirling_coefficients(prec, &mut cc);
        Ctx { prec, cc: RefCell::new(cc), stirling, pi, ln_pi, half_ln_two_pi }
    }

    pub fn big(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.prec)
    }

    pub fn pi(&self) -> BigFloat {
        self.pi.clone()
    }

    pub fn ln_pi(&self) -> BigFloat {
        self.ln_pi.clone()
    }

    pub fn half_ln_two_pi(&self) -> BigFloat {
        self.half_ln_two_pi.clone()
    }

    /// First `n` Stirling coefficients B_{2k}/(2k(2k−1)), k = 1..n.
    pub fn stirling_coeffs(&self, n: usize) -> &[BigFloat] {
        &self.stirling[..n.min(self.stirling.len())]
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec, RM)
    }
    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec, RM)
    }
    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec, RM)
    }
    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.prec, RM)
    }
    pub fn exp(&self, a: &BigFloat) -> BigFloat {
        a.exp(self.prec, RM, &mut self.cc.borrow_mut())
    }
    pub fn ln(&self, a: &BigFloat) -> BigFloat {
        a.ln(self.prec, RM, &mut self.cc.borrow_mut())
    }
    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.prec, RM)
    }
    pub fn sin(&self, a: &BigFloat) -> BigFloat {
        a.sin(self.prec, RM, &mut self.cc.borrow_mut())
    }
    pub fn cos(&self, a: &BigFloat) -> BigFloat {
        a.cos(self.prec, RM, &mut self.cc.borrow_mut())
    }
    pub fn atan(&self, a: &BigFloat) -> BigFloat {
        a.atan(self.prec, RM, &mut self.cc.borrow_mut())
    }
    pub fn powf(&self, a: &BigFloat, e: &BigFloat) -> BigFloat {
        a.pow(e, self.prec, RM, &mut self.cc.borrow_mut())
    }

    pub fn atan2(&self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            let half_pi = self.mul(&self.pi, &self.big(0.5));
            return if y.is_negative() { half_pi.neg() } else { half_pi };
        }
        let base = self.atan(&self.div(y, x));
        if x.is_positive() {
            base
        } else if y.is_negative() {
            self.sub(&base, &self.pi)
        } else {
            self.add(&base, &self.pi)
        }
    }

    /// ln(1 + w) by plain series; callers guarantee |w| ≪ 1.
    pub fn ln_one_plus(&self, w: &HComplex) -> HComplex {
        debug_assert!(to_f64(&w.abs2(self)) < 0.25);
        let mut term = w.clone();
        let mut acc = w.clone();
        let mut k = 1i32;
        loop {
            k += 1;
            term = term.mul(w, self);
            let next = term.scale(&self.div(&self.big(if k % 2 == 0 { -1.0 } else { 1.0 }), &self.big(k as f64)), self);
            acc = acc.add(&next, self);
            if next.abs2_exponent() < acc.abs2_exponent() - 2 * self.prec as i64 - 8 || k > 400 {
                break;
            }
        }
        acc
    }

    /// ln(z + d) from a known ln(z), for |d| ≪ |z|.
    pub fn ln_increment(&self, z: &HComplex, ln_z: &HComplex, d: &HComplex) -> HComplex {
        let w = d.div(z, self);
        ln_z.add(&self.ln_one_plus(&w), self)
    }

    /// Principal-branch log-gamma by shift-and-Stirling.
    pub fn ln_gamma(&self, z: &HComplex) -> HComplex {
        let mut zz = z.clone();
        let mut correction = HComplex::zero(self);
        // shift right until Stirling applies; near the negative real axis
        // the series is unusable, so shifting also rescues small |Im|
        loop {
            let a = to_f64(&zz.re);
            let b = to_f64(&zz.im);
            let r = (a * a + b * b).sqrt();
            if r >= STIRLING_RADIUS && (a >= 0.5 || b.abs() >= STIRLING_RADIUS) {
                break;
            }
            correction = correction.add(&zz.ln(self), self);
            zz = zz.add(&HComplex::from_f64(1.0, 0.0, self), self);
        }
        let ln_z = zz.ln(self);
        let half = HComplex::from_f64(0.5, 0.0, self);
        // (z − 1/2) ln z − z + ln(2π)/2
        let mut acc = zz.sub(&half, self).mul(&ln_z, self).sub(&zz, self);
        acc.re = self.add(&acc.re, &self.half_ln_two_pi);
        // Σ c_n z^{1−2n}
        let inv = HComplex::from_f64(1.0, 0.0, self).div(&zz, self);
        let inv2 = inv.mul(&inv, self);
        let mut zpow = inv.clone();
        for c in &self.stirling {
            acc = acc.add(&zpow.scale(c, self), self);
            zpow = zpow.mul(&inv2, self);
        }
        acc.sub(&correction, self)
    }
}

/// Rectangular high-precision complex number.
#[derive(Debug, Clone)]
pub struct HComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl HComplex {
    pub fn zero(ctx: &Ctx) -> Self {
        HComplex { re: ctx.big(0.0), im: ctx.big(0.0) }
    }

    pub fn from_f64(re: f64, im: f64, ctx: &Ctx) -> Self {
        HComplex { re: ctx.big(re), im: ctx.big(im) }
    }

    pub fn add(&self, o: &Self, ctx: &Ctx) -> Self {
        HComplex { re: ctx.add(&self.re, &o.re), im: ctx.add(&self.im, &o.im) }
    }

    pub fn sub(&self, o: &Self, ctx: &Ctx) -> Self {
        HComplex { re: ctx.sub(&self.re, &o.re), im: ctx.sub(&self.im, &o.im) }
    }

    pub fn mul(&self, o: &Self, ctx: &Ctx) -> Self {
        let re = ctx.sub(&ctx.mul(&self.re, &o.re), &ctx.mul(&self.im, &o.im));
        let im = ctx.add(&ctx.mul(&self.re, &o.im), &ctx.mul(&self.im, &o.re));
        HComplex { re, im }
    }

    pub fn div(&self, o: &Self, ctx: &Ctx) -> Self {
        let denom = o.abs2(ctx);
        let num = self.mul(&o.conj(), ctx);
        HComplex { re: ctx.div(&num.re, &denom), im: ctx.div(&num.im, &denom) }
    }

    pub fn conj(&self) -> Self {
        HComplex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn neg(&self) -> Self {
        HComplex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn scale(&self, s: &BigFloat, ctx: &Ctx) -> Self {
        HComplex { re: ctx.mul(&self.re, s), im: ctx.mul(&self.im, s) }
    }

    pub fn abs2(&self, ctx: &Ctx) -> BigFloat {
        ctx.add(&ctx.mul(&self.re, &self.re), &ctx.mul(&self.im, &self.im))
    }

    pub fn abs(&self, ctx: &Ctx) -> BigFloat {
        ctx.sqrt(&self.abs2(ctx))
    }

    /// Binary exponent of |z|², for cheap magnitude gates.
    pub fn abs2_exponent(&self) -> i64 {
        let er = self.re.exponent().unwrap_or(i32::MIN);
        let ei = self.im.exponent().unwrap_or(i32::MIN);
        2 * er.max(ei) as i64
    }

    pub fn exp(&self, ctx: &Ctx) -> Self {
        let r = ctx.exp(&self.re);
        HComplex { re: ctx.mul(&r, &ctx.cos(&self.im)), im: ctx.mul(&r, &ctx.sin(&self.im)) }
    }

    pub fn ln(&self, ctx: &Ctx) -> Self {
        let half = ctx.big(0.5);
        HComplex {
            re: ctx.mul(&ctx.ln(&self.abs2(ctx)), &half),
            im: ctx.atan2(&self.im, &self.re),
        }
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}

/// Unit phase e^{iθ}.
pub fn unit_phase(theta: &BigFloat, ctx: &Ctx) -> HComplex {
    HComplex { re: ctx.cos(theta), im: ctx.sin(theta) }
}

/// Lossy conversion back to f64 through the raw parts.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (words, _len, sign, exp, _) = x.as_raw_parts().expect("finite number has parts");
    let top = *words.last().expect("nonzero mantissa") as f64;
    // words are little-endian; the top word is normalized (high bit set)
    let mag = top * (exp as f64 - 64.0).exp2();
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

/// Exact Bernoulli numbers B_{2n} via the defining recurrence, packaged as
/// the Stirling coefficients B_{2n} / (2n(2n−1)).
fn stirling_coefficients(prec: usize, cc: &mut Consts) -> Vec<BigFloat> {
    let nmax = 2 * STIRLING_TERMS;
    let mut bern: Vec<BigRational> = Vec::with_capacity(nmax + 1);
    bern.push(BigRational::one());
    for m in 1..=nmax {
        // B_m = −1/(m+1) Σ_{k<m} C(m+1, k) B_k
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (k, b) in bern.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * b;
            // C(m+1, k+1) = C(m+1, k)·(m+1−k)/(k+1)
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        let m1 = BigRational::from_integer(BigInt::from(m + 1));
        bern.push(-acc / m1);
    }
    (1..=STIRLING_TERMS)
        .map(|n| {
            let c = &bern[2 * n] / BigRational::from_integer(BigInt::from(2 * n * (2 * n - 1)));
            big_from_rational(&c, prec, cc)
        })
        .collect()
}

fn big_from_rational(r: &BigRational, prec: usize, cc: &mut Consts) -> BigFloat {
    let num = BigFloat::parse(
        &r.numer().abs().to_string(),
        astro_float::Radix::Dec,
        prec,
        RM,
        cc,
    );
    let den = BigFloat::parse(&r.denom().to_string(), astro_float::Radix::Dec, prec, RM, cc);
    let mag = num.div(&den, prec, RM);
    if r.numer().is_negative() {
        mag.neg()
    } else {
        mag
    }
}
