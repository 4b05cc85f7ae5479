//! Complete exponential sums by direct summation: Ramanujan c_q(n),
//! Gauss sums τ(χ), Kloosterman sums S(a,b;c).
//!
//! Everything is O(modulus) on purpose; the analytic bound carried in the
//! result acts as a sanity rail on each computed instance.

use crate::modarith::{gcd, mod_inv, reduce, DirichletCharacter};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Precomputed M-th roots of unity: `at(j)` = e(j/M) for any integer j.
pub struct RootsTable {
    pub m: u64,
    table: Vec<Complex64>,
}

impl RootsTable {
    pub fn new(m: u64) -> Self {
        assert!(m >= 1);
        let table = (0..m)
            .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / m as f64))
            .collect();
        Self { m, table }
    }

    #[inline]
    pub fn at(&self, j: i64) -> Complex64 {
        self.table[reduce(j, self.m) as usize]
    }

    #[inline]
    pub fn at_u(&self, j: u64) -> Complex64 {
        self.table[(j % self.m) as usize]
    }
}

/// Number of divisors by trial division.
pub fn divisor_count(n: u64) -> u64 {
    let mut count = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            count += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    count
}

/// Value of a complete exponential sum plus its termwise metadata.
#[derive(Debug, Clone, Copy)]
pub struct ExpSumResult {
    pub value: Complex64,
    /// Number of summands actually accumulated (full enumeration check).
    pub terms: u64,
    /// Applicable analytic bound for |value|; f64::INFINITY when none.
    pub abs_bound: f64,
}

impl ExpSumResult {
    pub fn bound_ok(&self, slack: f64) -> bool {
        !self.abs_bound.is_finite() || self.value.norm() <= self.abs_bound + slack
    }
}

/// Ramanujan sum c_q(n) = Σ*_{a mod q} e(na/q).
pub fn ramanujan_sum(q: u64, n: i64) -> ExpSumResult {
    assert!(q >= 1);
    let roots = RootsTable::new(q);
    ramanujan_sum_with(&roots, n)
}

/// Same, reusing a roots table with modulus q.
pub fn ramanujan_sum_with(roots: &RootsTable, n: i64) -> ExpSumResult {
    let q = roots.m;
    let nr = reduce(n, q);
    let mut value = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for a in 0..q {
        if gcd(a, q) != 1 {
            continue;
        }
        value += roots.at_u(nr * a % q);
        terms += 1;
    }
    let g = if nr == 0 { q } else { gcd(nr, q) };
    let abs_bound = (g * divisor_count(q)) as f64;
    ExpSumResult { value, terms, abs_bound }
}

/// Gauss sum τ(χ) = Σ_{a mod p^k} χ(a) e(a/p^k).
pub fn gauss_sum(chi: &DirichletCharacter) -> ExpSumResult {
    let q = chi.modulus.q;
    let roots = RootsTable::new(q);
    let mut value = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for a in 0..q {
        let c = chi.eval(a as i64);
        if c.norm_sqr() != 0.0 {
            value += c * roots.at_u(a);
        }
        terms += 1;
    }
    let abs_bound = if chi.is_primitive() { (q as f64).sqrt() } else { f64::INFINITY };
    ExpSumResult { value, terms, abs_bound }
}

/// Kloosterman sum S(a,b;c) = Σ*_{x mod c} e((ax + b·x̄)/c). S(·,·;1) = 1.
pub fn kloosterman(a: i64, b: i64, c: u64) -> ExpSumResult {
    assert!(c >= 1);
    let roots = RootsTable::new(c);
    kloosterman_with(&roots, a, b)
}

/// Same, reusing a roots table with modulus c.
pub fn kloosterman_with(roots: &RootsTable, a: i64, b: i64) -> ExpSumResult {
    let c = roots.m;
    if c == 1 {
        return ExpSumResult { value: Complex64::new(1.0, 0.0), terms: 1, abs_bound: 1.0 };
    }
    let ar = reduce(a, c);
    let br = reduce(b, c);
    let mut value = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for x in 1..c {
        if gcd(x, c) != 1 {
            continue;
        }
        let xinv = mod_inv(x as i64, c).expect("x is a unit");
        value += roots.at_u(ar * x % c + br * xinv % c);
        terms += 1;
    }
    let g = gcd(gcd(ar.max(1), br.max(1)), c).min(c);
    // For a ≡ b ≡ 0 the sum is φ(c); cover it by the degenerate gcd = c.
    let g = if ar == 0 && br == 0 { c } else { g };
    let abs_bound = divisor_count(c) as f64 * (g as f64).sqrt() * (c as f64).sqrt();
    ExpSumResult { value, terms, abs_bound }
}

/// All-arguments Kloosterman table mod c: entry [x][y] = S(x, y; c).
/// Built in O(c·φ(c)); used by the composite character sums.
pub fn kloosterman_table(c: u64) -> Vec<Vec<Complex64>> {
    let roots = RootsTable::new(c);
    let mut table = vec![vec![Complex64::new(0.0, 0.0); c as usize]; c as usize];
    if c == 1 {
        table[0][0] = Complex64::new(1.0, 0.0);
        return table;
    }
    for x in 0..c {
        if gcd(x, c) != 1 {
            continue;
        }
        let xinv = mod_inv(x as i64, c).expect("unit");
        for s in 0..c {
            for t in 0..c {
                // accumulate e((s x + t x̄)/c) into entry (s, t)
                table[s as usize][t as usize] += roots.at_u(s * x % c + t * xinv % c);
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::PrimePowerModulus;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ramanujan_examples() {
        assert_abs_diff_eq!(ramanujan_sum(6, 1).value.re, 1.0, epsilon = 1e-12); // μ(6)
        assert_abs_diff_eq!(ramanujan_sum(3, 3).value.re, 2.0, epsilon = 1e-12); // φ(3)
        assert_abs_diff_eq!(ramanujan_sum(4, 2).value.re, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ramanujan_sum(6, 1).value.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gauss_sum_modulus_law() {
        for (p, k) in [(3u64, 3u32), (5, 3), (7, 3)] {
            let m = PrimePowerModulus::new(p, k).unwrap();
            for j in 1..m.phi {
                if j % p == 0 {
                    continue;
                }
                let chi = DirichletCharacter::primitive(m.clone(), j).unwrap();
                let tau = gauss_sum(&chi);
                assert_abs_diff_eq!(
                    tau.value.norm_sqr(),
                    m.q as f64,
                    epsilon = 1e-9 * m.q as f64
                );
                assert_eq!(tau.terms, m.q);
            }
        }
    }

    #[test]
    fn gauss_sum_imprimitive_matches_enumeration_oracle() {
        let m = PrimePowerModulus::new(3, 3).unwrap();
        let chi = DirichletCharacter::new(m.clone(), 3); // conductor 9
        let tau = gauss_sum(&chi);
        // independent oracle: the raw definition, no table reuse
        let mut oracle = Complex64::new(0.0, 0.0);
        for a in 0..m.q {
            oracle += chi.eval(a as i64)
                * Complex64::from_polar(1.0, TAU * a as f64 / m.q as f64);
        }
        assert!((tau.value - oracle).norm() < 1e-10);
        // imprimitive mod p^k: the sum collapses to 0
        assert!(tau.value.norm() < 1e-10);
    }

    #[test]
    fn kloosterman_examples() {
        assert_abs_diff_eq!(kloosterman(1, 1, 3).value.re, -1.0, epsilon = 1e-12);
        let s = kloosterman(1, 2, 5);
        assert_abs_diff_eq!(s.value.re, -(1.0 + 5f64.sqrt()), epsilon = 1e-9);
        assert_abs_diff_eq!(s.value.im, 0.0, epsilon = 1e-12);
        // a = 0 degenerates to the Ramanujan sum
        for (n, c) in [(1i64, 6u64), (2, 4), (5, 12)] {
            let k = kloosterman(0, n, c).value;
            let r = ramanujan_sum(c, n).value;
            assert!((k - r).norm() < 1e-10);
        }
    }

    #[test]
    fn kloosterman_symmetry_and_weil() {
        for c in 1..=60u64 {
            for (a, b) in [(1i64, 1i64), (2, 3), (0, 4), (5, 0), (6, 10)] {
                let s1 = kloosterman(a, b, c);
                let s2 = kloosterman(b, a, c);
                assert!((s1.value - s2.value).norm() < 1e-10, "symmetry at c={c}");
                assert!(s1.bound_ok(1e-9), "Weil bound at ({a},{b};{c})");
            }
        }
    }

    #[test]
    fn kloosterman_table_agrees_with_direct() {
        let c = 9u64;
        let t = kloosterman_table(c);
        for a in 0..c {
            for b in 0..c {
                let direct = kloosterman(a as i64, b as i64, c).value;
                assert!((t[a as usize][b as usize] - direct).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn twisted_multiplicativity_small() {
        // S(a,b;c1 c2) = S(a c̄2, b c̄2; c1) S(a c̄1, b c̄1; c2) for (c1,c2)=1
        for c1 in 2..=12u64 {
            for c2 in 2..=12u64 {
                if gcd(c1, c2) != 1 {
                    continue;
                }
                for (a, b) in [(1i64, 1i64), (2, 5)] {
                    let lhs = kloosterman(a, b, c1 * c2).value;
                    let c2inv = mod_inv(c2 as i64, c1).unwrap() as i64;
                    let c1inv = mod_inv(c1 as i64, c2).unwrap() as i64;
                    let rhs = kloosterman(a * c2inv, b * c2inv, c1).value
                        * kloosterman(a * c1inv, b * c1inv, c2).value;
                    assert!((lhs - rhs).norm() < 1e-9, "c1={c1} c2={c2}");
                }
            }
        }
    }
}
