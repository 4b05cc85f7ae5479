//! Exact discrete realization of the Kronecker delta by additive characters
//! over moduli up to a cutoff Q, its refinement over powers of a fixed odd
//! prime, and the smooth kernel g(q,x) tied to the same expansion.
//!
//! The identity used everywhere here is the exact sum form
//!   δ(n) = Σ_{q≥1} Σ*_{a mod q} e(na/q) Δ_q(n),
//!   Δ_q(u) = Σ_{r≥1} (qr)^{-1} (w(qr) − w(|u|/(qr))),
//! with w a C∞ bump on [Q/2, Q] normalized so Σ_{m≥1} w(m) = 1. The kernel
//! g(q,x) enters only through property checks; identities never depend on
//! quadrature.

use crate::expsums::RootsTable;
use crate::modarith::{gcd, reduce};
use num_complex::Complex64;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DeltaError {
    #[error("|n| = {0} outside the support guarantee (< {1})")]
    OutOfRange(i64, f64),
    #[error("p^lambda = {0} does not divide n = {1}")]
    NotDivisible(u64, i64),
    #[error("quadrature error estimate {0} exceeds tolerance {1}")]
    QuadratureFailure(f64, f64),
}

/// The delta expansion at cutoff Q, optionally refined at the prime power
/// p^lambda. Immutable after construction.
#[derive(Debug, Clone)]
pub struct DeltaExpansion {
    pub q_cutoff: f64,
    /// Discrete normalization constant: Σ_{m≥1} w(m) = 1.
    norm: f64,
    pub p: Option<u64>,
    pub lambda: Option<u32>,
}

impl DeltaExpansion {
    pub fn new(q_cutoff: f64) -> Self {
        assert!(q_cutoff >= 4.0, "cutoff below 4 leaves no integer in [Q/2, Q]");
        let mut sum = 0.0;
        let mut m = (q_cutoff / 2.0).ceil() as i64;
        while (m as f64) <= q_cutoff {
            sum += raw_bump(m as f64, q_cutoff);
            m += 1;
        }
        assert!(sum > 0.0);
        Self { q_cutoff, norm: 1.0 / sum, p: None, lambda: None }
    }

    pub fn with_padic(q_cutoff: f64, p: u64, lambda: u32) -> Self {
        assert!(lambda >= 1);
        let mut e = Self::new(q_cutoff);
        e.p = Some(p);
        e.lambda = Some(lambda);
        e
    }

    /// The normalized bump w, supported in [Q/2, Q].
    pub fn weight(&self, x: f64) -> f64 {
        self.norm * raw_bump(x, self.q_cutoff)
    }

    /// Δ_q(u) for real u.
    pub fn delta_kernel(&self, q: u64, u: f64) -> f64 {
        let q_f = q as f64;
        let big_q = self.q_cutoff;
        let ua = u.abs();
        let mut acc = 0.0;
        // first part: qr in [Q/2, Q]
        let mut r = (big_q / (2.0 * q_f)).ceil().max(1.0) as u64;
        while (q * r) as f64 <= big_q {
            acc += self.weight((q * r) as f64) / (q * r) as f64;
            r += 1;
        }
        // second part: |u|/(qr) in [Q/2, Q], i.e. r in [|u|/(qQ), 2|u|/(qQ)]
        if ua > 0.0 {
            let lo = (ua / (q_f * big_q)).floor().max(1.0) as u64;
            let hi = (2.0 * ua / (q_f * big_q)).ceil() as u64;
            for r in lo..=hi.max(lo) {
                let y = ua / ((q * r) as f64);
                if y >= big_q / 2.0 && y <= big_q {
                    acc -= self.weight(y) / (q * r) as f64;
                }
            }
        }
        acc
    }

    /// Exact-sum evaluation of δ(n): 1 for n = 0 and 0 otherwise, up to
    /// accumulated roundoff. Requires |n| < Q²/4.
    pub fn delta_exact(&self, n: i64) -> Result<f64, DeltaError> {
        let support = self.q_cutoff * self.q_cutoff / 4.0;
        if (n.abs() as f64) >= support {
            return Err(DeltaError::OutOfRange(n, support));
        }
        let qmax = self.q_cutoff.floor() as u64;
        let mut acc = 0.0;
        for q in 1..=qmax {
            let kernel = self.delta_kernel(q, n as f64);
            if kernel == 0.0 {
                continue;
            }
            acc += ramanujan_real(q, n) * kernel;
        }
        Ok(acc)
    }

    /// The same expansion split into the coprime-modulus family (inner sums
    /// over a mod q·p^{λ−r}, r = 0..λ) and the p-divisible family (a mod
    /// q·p^{λ+s}, s ≥ 1), exactly as the refined decomposition states.
    /// Requires p^λ | n; evaluates to delta_exact(n / p^λ).
    pub fn delta_padic(&self, n: i64) -> Result<f64, DeltaError> {
        let p = self.p.expect("p must be set for the p-adic form");
        let lambda = self.lambda.expect("lambda must be set");
        let plam = p.pow(lambda) as i64;
        if n.rem_euclid(plam) != 0 {
            return Err(DeltaError::NotDivisible(plam as u64, n));
        }
        let n_red = n / plam;
        let support = (self.q_cutoff * plam as f64).powi(2) / 4.0;
        if (n.abs() as f64) >= support {
            return Err(DeltaError::OutOfRange(n, support));
        }
        let qmax = self.q_cutoff.floor() as u64;
        let scale = 1.0 / plam as f64;
        let mut acc = 0.0;
        // coprime family
        for q in 1..=qmax {
            if q % p == 0 {
                continue;
            }
            let kernel = self.delta_kernel(q, n_red as f64);
            if kernel == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for r in 0..=lambda {
                let cop = if r < lambda { q * p } else { q };
                inner += coprime_exponential_real(q * p.pow(lambda - r), cop, n);
            }
            acc += scale * kernel * inner;
        }
        // p-divisible family
        let smax = (self.q_cutoff.ln() / (p as f64).ln()).floor() as u32;
        for s in 1..=smax {
            let ps = p.pow(s);
            let qmax_s = (self.q_cutoff / ps as f64).floor() as u64;
            for q in 1..=qmax_s {
                if q % p == 0 {
                    continue;
                }
                let kernel = self.delta_kernel(ps * q, n_red as f64);
                if kernel == 0.0 {
                    continue;
                }
                let inner = coprime_exponential_real(q * p.pow(lambda + s), q * p, n);
                acc += scale * kernel * inner;
            }
        }
        Ok(acc)
    }
}

/// The unnormalized C∞ bump exp(−1/(1−s²)) with s the affine map of
/// [Q/2, Q] onto (−1, 1); 0 outside.
fn raw_bump(x: f64, big_q: f64) -> f64 {
    let s = (x - 0.75 * big_q) / (0.25 * big_q);
    if s.abs() >= 1.0 {
        return 0.0;
    }
    (-1.0 / (1.0 - s * s)).exp()
}

/// c_q(n) as a real number (the sum is conjugation-symmetric).
fn ramanujan_real(q: u64, n: i64) -> f64 {
    let nr = reduce(n, q);
    let mut acc = 0.0;
    for a in 0..q {
        if gcd(a, q) != 1 {
            continue;
        }
        acc += (TAU * ((nr * a % q) as f64) / q as f64).cos();
    }
    acc
}

/// Σ_{c mod M, (c, cop) = 1} e(nc/M), real part form (imaginary part cancels
/// pairwise); `cop` divides M.
fn coprime_exponential_real(m: u64, cop: u64, n: i64) -> f64 {
    let nr = reduce(n, m);
    let mut acc = 0.0;
    for c in 0..m {
        if gcd(c, cop) != 1 {
            continue;
        }
        acc += (TAU * ((nr as u128 * c as u128 % m as u128) as f64) / m as f64).cos();
    }
    acc
}

/// Both sides of the residue recombination identity
///   Σ_{c mod q·p^λ, (c,q)=1} e(nc/(qp^λ)) = Σ_{r=0}^{λ} Σ*_{c mod qp^{λ−r}} e(nc/(qp^{λ−r})),
/// each by direct enumeration.
pub fn residue_recombination_check(q: u64, p: u64, lambda: u32, n: i64) -> (Complex64, Complex64) {
    assert!(gcd(q, p) == 1 && lambda >= 1);
    let m = q * p.pow(lambda);
    let roots = RootsTable::new(m);
    let nr = reduce(n, m);
    let mut lhs = Complex64::new(0.0, 0.0);
    for c in 0..m {
        if gcd(c, q) != 1 {
            continue;
        }
        lhs += roots.at_u((nr as u128 * c as u128 % m as u128) as u64);
    }
    let mut rhs = Complex64::new(0.0, 0.0);
    for r in 0..=lambda {
        let mr = q * p.pow(lambda - r);
        let roots_r = RootsTable::new(mr);
        let nrr = reduce(n, mr);
        for c in 0..mr {
            if gcd(c, mr) != 1 {
                continue;
            }
            rhs += roots_r.at_u((nrr as u128 * c as u128 % mr as u128) as u64);
        }
    }
    (lhs, rhs)
}

/// Batched max |lhs − rhs| of the recombination identity over |n| ≤ q·p^λ.
pub fn residue_recombination_max_err(q: u64, p: u64, lambda: u32) -> f64 {
    assert!(gcd(q, p) == 1 && lambda >= 1);
    let m = q * p.pow(lambda);
    let roots = RootsTable::new(m);
    // lhs spectrum: one pass per n over units-mod-q residues
    let units: Vec<u64> = (0..m).filter(|&c| gcd(c, q) == 1).collect();
    let mut sub_moduli = Vec::new();
    for r in 0..=lambda {
        let mr = q * p.pow(lambda - r);
        let us: Vec<u64> = (0..mr).filter(|&c| gcd(c, mr) == 1).collect();
        sub_moduli.push((mr, us));
    }
    let mut worst = 0.0f64;
    for n in -(m as i64)..=(m as i64) {
        let nr = reduce(n, m);
        let mut lhs = Complex64::new(0.0, 0.0);
        for &c in &units {
            lhs += roots.at_u((nr as u128 * c as u128 % m as u128) as u64);
        }
        let mut rhs = Complex64::new(0.0, 0.0);
        for (mr, us) in &sub_moduli {
            let nrr = reduce(n, *mr);
            let step = m / mr;
            for &c in us {
                // reuse the m-th root table: e(nc/mr) = e((n c (m/mr))/m)
                rhs += roots.at_u((nrr as u128 * c as u128 % *mr as u128) as u64 * step);
            }
        }
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

/// Numerically computed Fourier kernel g(q,x) with a two-resolution error
/// estimate. The zero-frequency plateau of Δ_q is removed before
/// transforming so the finite window does not leak a spurious 1/x tail.
pub fn g_kernel(exp: &DeltaExpansion, q: u64, x: f64, tol: f64) -> Result<f64, DeltaError> {
    let (v, err) = g_kernel_raw(exp, q, x);
    if err > tol {
        return Err(DeltaError::QuadratureFailure(err, tol));
    }
    Ok(v)
}

/// g(q,x) and its error estimate, no tolerance gate.
pub fn g_kernel_raw(exp: &DeltaExpansion, q: u64, x: f64) -> (f64, f64) {
    let coarse = g_kernel_quad(exp, q, x, 24);
    let fine = g_kernel_quad(exp, q, x, 48);
    (fine, (fine - coarse).abs())
}

/// Mean of the oscillating tail of Δ_q: c₀(q) − (1/q)∫ w(y)/y dy.
fn delta_kernel_dc(exp: &DeltaExpansion, q: u64) -> f64 {
    let big_q = exp.q_cutoff;
    let q_f = q as f64;
    let mut c0 = 0.0;
    let mut r = (big_q / (2.0 * q_f)).ceil().max(1.0) as u64;
    while (q * r) as f64 <= big_q {
        c0 += exp.weight((q * r) as f64) / (q * r) as f64;
        r += 1;
    }
    // ∫ w/y over [Q/2, Q] by Gauss-Legendre panels
    let integral = gauss_panels(big_q / 2.0, big_q, 8, |y| exp.weight(y) / y);
    c0 - integral / q_f
}

fn g_kernel_quad(exp: &DeltaExpansion, q: u64, x: f64, panels_per_unit: usize) -> f64 {
    let big_q = exp.q_cutoff;
    let dc = delta_kernel_dc(exp, q);
    let w_max = 6.0;
    // integrand in the scaled variable v = u/(qQ); even in v
    let f = |v: f64| {
        let taper = smooth_step((w_max - v.abs()) / (0.25 * w_max));
        (exp.delta_kernel(q, v * q as f64 * big_q) - dc) * taper
    };
    // resolve both the e(−vx) turns and the kernel features
    let turns = x.abs() + 4.0;
    let n_panels = ((turns * w_max / 4.0).ceil() as usize * panels_per_unit).max(16);
    let h = 2.0 * w_max / n_panels as f64;
    let mut acc = 0.0;
    for i in 0..n_panels {
        let a = -w_max + i as f64 * h;
        acc += gauss16(a, a + h, |v| f(v) * (TAU * v * x).cos());
    }
    q as f64 * big_q * acc
}

/// C∞ step: 0 for t ≤ 0, 1 for t ≥ 1.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

const GL16_NODES: [f64; 8] = [
    0.09501250983763744,
    0.2816035507792589,
    0.45801677765722737,
    0.6178762444026438,
    0.755404408355003,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL16_WEIGHTS: [f64; 8] = [
    0.189450610455069,
    0.18260341504492358,
    0.16915651939500254,
    0.14959598881657674,
    0.12462897125553388,
    0.09515851168249279,
    0.062253523938647894,
    0.027152459411754096,
];

/// 16-point Gauss-Legendre on [a, b].
pub fn gauss16<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        let dx = h * GL16_NODES[i];
        acc += GL16_WEIGHTS[i] * (f(c - dx) + f(c + dx));
    }
    acc * h
}

fn gauss_panels<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| gauss16(a + i as f64 * h, a + (i + 1) as f64 * h, &f)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_normalization_and_support() {
        for big_q in [4.0, 20.0, 50.0] {
            let e = DeltaExpansion::new(big_q);
            let mut sum = 0.0;
            for m in 1..=(big_q as i64) {
                sum += e.weight(m as f64);
            }
            assert!((sum - 1.0).abs() < 1e-14);
            assert_eq!(e.weight(big_q / 2.0 - 0.01), 0.0);
            assert_eq!(e.weight(big_q + 0.01), 0.0);
        }
    }

    #[test]
    fn delta_exact_examples() {
        let e = DeltaExpansion::new(20.0);
        assert!((e.delta_exact(0).unwrap() - 1.0).abs() < 1e-10);
        assert!(e.delta_exact(7).unwrap().abs() < 1e-10);
        let e30 = DeltaExpansion::new(30.0);
        assert!(e30.delta_exact(-12).unwrap().abs() < 1e-10);
        assert_eq!(e.delta_exact(100), Err(DeltaError::OutOfRange(100, 100.0)));
    }

    #[test]
    fn delta_exact_small_grid() {
        let e = DeltaExpansion::new(20.0);
        for n in -60i64..=60 {
            let expect = if n == 0 { 1.0 } else { 0.0 };
            assert!(
                (e.delta_exact(n).unwrap() - expect).abs() < 1e-10,
                "n = {n}"
            );
        }
    }

    #[test]
    fn recombination_examples() {
        let (lhs, rhs) = residue_recombination_check(1, 3, 2, 0);
        assert!((lhs.re - 9.0).abs() < 1e-10 && (rhs.re - 9.0).abs() < 1e-10);
        let (lhs, rhs) = residue_recombination_check(2, 3, 1, 1);
        assert!(lhs.norm() < 1e-10 && rhs.norm() < 1e-10);
        let (lhs, rhs) = residue_recombination_check(4, 5, 2, 10);
        assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn recombination_batched_matches_pointwise() {
        assert!(residue_recombination_max_err(3, 5, 1) < 1e-9);
        let m = 2 * 3u64.pow(2);
        for n in [-(m as i64), -5, 0, 7, m as i64] {
            let (l, r) = residue_recombination_check(2, 3, 2, n);
            assert!((l - r).norm() < 1e-9);
        }
    }

    #[test]
    fn padic_examples() {
        let e = DeltaExpansion::with_padic(15.0, 3, 2);
        assert!((e.delta_padic(0).unwrap() - 1.0).abs() < 1e-9);
        assert!(e.delta_padic(9).unwrap().abs() < 1e-9);
        assert_eq!(e.delta_padic(15), Err(DeltaError::NotDivisible(9, 15)));
        // 9 | 18: evaluates delta_exact(2) = 0
        assert!(e.delta_padic(18).unwrap().abs() < 1e-9);
    }

    #[test]
    fn padic_equals_exact_on_window() {
        for (p, lam) in [(3u64, 1u32), (3, 2), (5, 1)] {
            let e = DeltaExpansion::with_padic(21.0, p, lam);
            let plam = p.pow(lam) as i64;
            for n_red in -20i64..=20 {
                let lhs = e.delta_padic(n_red * plam).unwrap();
                let rhs = e.delta_exact(n_red).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-9,
                    "p={p} lam={lam} n_red={n_red}: {lhs} vs {rhs}"
                );
            }
        }
    }
}
