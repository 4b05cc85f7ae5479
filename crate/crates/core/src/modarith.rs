//! Exact arithmetic in (ℤ/p^kℤ)* and Dirichlet characters of prime-power modulus.
//!
//! A character χ mod p^k (p odd) is represented through a full discrete-log
//! table base a fixed primitive root g: χ_j(u) = e(j·ind_g(u)/φ(p^k)).
//! χ_j is primitive exactly when p ∤ j.

use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;
use thiserror::Error;

/// Hard cap on p^k; the dlog table is O(p^k) memory.
pub const MODULUS_CAP: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModArithError {
    #[error("{0} is not invertible modulo {1}")]
    NonInvertible(i64, u64),
    #[error("{0} is divisible by p = {1}, not a unit")]
    NotAUnit(i64, u64),
    #[error("modulus {0}^{1} = {2} exceeds cap {MODULUS_CAP}")]
    ModulusTooLarge(u64, u32, u64),
    #[error("p = {0} must be an odd prime")]
    BadPrime(u64),
    #[error("index {0} shares a factor with p; character mod {1} is imprimitive")]
    ImprimitiveIndex(u64, u64),
}

/// Euclidean reduction of a possibly negative integer into [0, m).
pub fn reduce(x: i64, m: u64) -> u64 {
    debug_assert!(m > 0);
    let r = x.rem_euclid(m as i64);
    r as u64
}

/// gcd for u64.
pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Modular inverse via extended Euclid. Errors when gcd(x, m) ≠ 1.
pub fn mod_inv(x: i64, m: u64) -> Result<u64, ModArithError> {
    if m == 1 {
        return Ok(0);
    }
    let a = reduce(x, m) as i64;
    let (mut r0, mut r1) = (m as i64, a);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(ModArithError::NonInvertible(x, m));
    }
    Ok(reduce(t0, m))
}

/// x^e mod m with u128 intermediates.
pub fn mod_pow(x: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = (x % m) as u128;
    let mm = m as u128;
    let mut acc = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % mm;
        }
        base = base * base % mm;
        e >>= 1;
    }
    acc as u64
}

/// Deterministic primality check by trial division; fine at desk scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The pair (p, k) with q = p^k, φ(q), and the smallest primitive root.
///
/// Immutable after construction; cheap to clone (the dlog table is shared).
#[derive(Debug, Clone)]
pub struct PrimePowerModulus {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    pub phi: u64,
    pub g: u64,
    dlog: Arc<Vec<u32>>,
}

const DLOG_NONE: u32 = u32::MAX;

impl PrimePowerModulus {
    pub fn new(p: u64, k: u32) -> Result<Self, ModArithError> {
        if p < 3 || !is_prime(p) {
            return Err(ModArithError::BadPrime(p));
        }
        if k == 0 {
            return Err(ModArithError::ModulusTooLarge(p, k, 0));
        }
        let mut q: u64 = 1;
        for _ in 0..k {
            q = q.checked_mul(p).ok_or(ModArithError::ModulusTooLarge(p, k, u64::MAX))?;
            if q > MODULUS_CAP {
                return Err(ModArithError::ModulusTooLarge(p, k, q));
            }
        }
        let phi = q / p * (p - 1);
        let g = smallest_primitive_root(p, k, q, phi);
        // One pass g^0, g^1, ... fills the whole unit group.
        let mut dlog = vec![DLOG_NONE; q as usize];
        let mut acc = 1u64;
        for i in 0..phi {
            dlog[acc as usize] = i as u32;
            acc = acc * g % q;
        }
        debug_assert_eq!(acc, 1);
        Ok(Self { p, k, q, phi, g, dlog: Arc::new(dlog) })
    }

    /// Discrete log base g of u, via the table. Errors when p | u.
    pub fn discrete_log(&self, u: i64) -> Result<u64, ModArithError> {
        let r = reduce(u, self.q);
        let v = self.dlog[r as usize];
        if v == DLOG_NONE {
            return Err(ModArithError::NotAUnit(u, self.p));
        }
        Ok(v as u64)
    }

    pub fn is_unit(&self, u: i64) -> bool {
        reduce(u, self.q) % self.p != 0
    }
}

/// Smallest g ≥ 2 of multiplicative order φ(p^k) mod p^k.
///
/// Order checks use the factorization of φ; candidates are tiny in practice.
pub fn smallest_primitive_root(p: u64, _k: u32, q: u64, phi: u64) -> u64 {
    let factors = distinct_prime_factors(phi);
    'cand: for g in 2..q {
        if g % p == 0 {
            continue;
        }
        for &f in &factors {
            if mod_pow(g, phi / f, q) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("every (ℤ/p^kℤ)* with p odd is cyclic");
}

/// A Dirichlet character mod p^k given by its index j in [0, φ).
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    pub modulus: PrimePowerModulus,
    pub j: u64,
}

impl DirichletCharacter {
    /// Any character, primitive or not.
    pub fn new(modulus: PrimePowerModulus, j: u64) -> Self {
        Self { j: j % modulus.phi, modulus }
    }

    /// Constructor enforcing primitivity (p ∤ j).
    pub fn primitive(modulus: PrimePowerModulus, j: u64) -> Result<Self, ModArithError> {
        let j = j % modulus.phi;
        if j % modulus.p == 0 {
            return Err(ModArithError::ImprimitiveIndex(j, modulus.q));
        }
        Ok(Self { modulus, j })
    }

    pub fn is_primitive(&self) -> bool {
        self.j % self.modulus.p != 0
    }

    /// Exact phase of χ(n) as the pair (num, den) with χ(n) = e(num/den),
    /// or None when χ(n) = 0. Consumers needing more than f64 precision
    /// evaluate the root of unity themselves.
    pub fn phase(&self, n: i64) -> Option<(u64, u64)> {
        let r = reduce(n, self.modulus.q);
        if r % self.modulus.p == 0 {
            return None;
        }
        let d = self.modulus.dlog[r as usize] as u64;
        let num = (self.j as u128 * d as u128 % self.modulus.phi as u128) as u64;
        Some((num, self.modulus.phi))
    }

    /// χ(n) in f64 complex; exactly 0 on non-units.
    pub fn eval(&self, n: i64) -> Complex64 {
        match self.phase(n) {
            None => Complex64::new(0.0, 0.0),
            Some((num, den)) => Complex64::from_polar(1.0, TAU * num as f64 / den as f64),
        }
    }

    /// conj(χ)(n) = χ̄(n).
    pub fn eval_conj(&self, n: i64) -> Complex64 {
        self.eval(n).conj()
    }
}

/// Free-function form matching the operation name used by the batch driver.
pub fn char_eval(chi: &DirichletCharacter, n: i64) -> Complex64 {
    chi.eval(n)
}

/// Smallest primitive root as a standalone operation.
pub fn primitive_root(m: &PrimePowerModulus) -> u64 {
    m.g
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mod_inv_examples() {
        assert_eq!(mod_inv(3, 10).unwrap(), 7);
        assert_eq!(mod_inv(1, 97).unwrap(), 1);
        assert_eq!(mod_inv(2, 9).unwrap(), 5);
        assert_eq!(mod_inv(6, 9), Err(ModArithError::NonInvertible(6, 9)));
    }

    #[test]
    fn mod_inv_involution_on_units() {
        let m = 3u64.pow(5);
        for x in 1..m {
            if x % 3 == 0 {
                continue;
            }
            let y = mod_inv(x as i64, m).unwrap();
            assert_eq!(mod_inv(y as i64, m).unwrap(), x);
        }
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(PrimePowerModulus::new(3, 2).unwrap().g, 2);
        assert_eq!(PrimePowerModulus::new(5, 1).unwrap().g, 2);
        assert_eq!(PrimePowerModulus::new(3, 3).unwrap().g, 2);
        // exhaustive order check oracle
        let m = PrimePowerModulus::new(7, 2).unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut acc = 1u64;
        for _ in 0..m.phi {
            seen.insert(acc);
            acc = acc * m.g % m.q;
        }
        assert_eq!(seen.len() as u64, m.phi);
    }

    #[test]
    fn discrete_log_examples() {
        let m = PrimePowerModulus::new(3, 2).unwrap();
        assert_eq!(m.discrete_log(1).unwrap(), 0);
        assert_eq!(m.discrete_log(m.g as i64).unwrap(), 1);
        assert_eq!(m.discrete_log(7).unwrap(), 4); // 2^4 = 16 ≡ 7 mod 9
        assert_eq!(m.discrete_log(6), Err(ModArithError::NotAUnit(6, 3)));
    }

    #[test]
    fn char_eval_examples() {
        let m = PrimePowerModulus::new(3, 2).unwrap();
        let chi = DirichletCharacter::primitive(m, 1).unwrap();
        assert_abs_diff_eq!(chi.eval(1).re, 1.0, epsilon = 1e-15);
        assert_eq!(chi.eval(3).norm(), 0.0);
        let expect = Complex64::from_polar(1.0, TAU * 4.0 / 6.0);
        assert_abs_diff_eq!(chi.eval(7).re, expect.re, epsilon = 1e-12);
        assert_abs_diff_eq!(chi.eval(7).im, expect.im, epsilon = 1e-12);
    }

    #[test]
    fn char_multiplicative_and_periodic() {
        let m = PrimePowerModulus::new(5, 2).unwrap();
        let chi = DirichletCharacter::primitive(m.clone(), 3).unwrap();
        for u in 1..m.q as i64 {
            if !m.is_unit(u) {
                continue;
            }
            for v in 1..m.q as i64 {
                if !m.is_unit(v) {
                    continue;
                }
                let lhs = chi.eval(u * v);
                let rhs = chi.eval(u) * chi.eval(v);
                assert!((lhs - rhs).norm() < 1e-12);
            }
            // periodicity is exact: same table entry
            assert_eq!(chi.phase(u), chi.phase(u + m.q as i64));
        }
    }

    #[test]
    fn primitivity_witness() {
        // primitive χ: some z with χ(1 + z p^{k-1}) ≠ 1; imprimitive: none.
        for (p, k) in [(3u64, 3u32), (5, 2), (7, 2)] {
            let m = PrimePowerModulus::new(p, k).unwrap();
            let step = m.q / p; // p^{k-1}
            let prim = DirichletCharacter::primitive(m.clone(), 1).unwrap();
            let imprim = DirichletCharacter::new(m.clone(), p);
            let mut witness = false;
            let mut imprim_witness = false;
            for z in 0..p {
                let arg = 1 + (z * step) as i64;
                if (prim.eval(arg) - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
                    witness = true;
                }
                if (imprim.eval(arg) - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
                    imprim_witness = true;
                }
            }
            assert!(witness, "primitive character must move on 1 + zp^(k-1)");
            assert!(!imprim_witness, "index divisible by p must be trivial there");
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(PrimePowerModulus::new(2, 5).is_err());
        assert!(PrimePowerModulus::new(9, 1).is_err());
        assert!(PrimePowerModulus::new(3, 15).is_err()); // 3^15 > cap
    }
}
