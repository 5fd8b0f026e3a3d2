//! q-integers, q-factorials, Gaussian binomials, and the q-binomial basis of
//! quantum integer-valued polynomials, evaluated exactly at a fixed base.
//!
//! The base may be negative or a perfect square of a prime power: the unitary
//! and symplectic interpolation variables are (-q)^n and (q^2)^n, and both are
//! handled by ordinary integer arithmetic at base -q resp. q^2.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interp::{RationalPoly, VarTag};

/// Evaluation base for q-quantities. `|q| >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QValue(i64);

impl QValue {
    pub fn new(q: i64) -> Result<Self> {
        if q.unsigned_abs() < 2 {
            return Err(Error::InvalidInput(format!("|q| must be >= 2, got {q}")));
        }
        Ok(QValue(q))
    }

    pub fn get(self) -> i64 {
        self.0
    }

    /// q^e as an integer, e >= 0.
    pub fn pow(self, e: u64) -> BigInt {
        BigInt::from(self.0).pow(e as u32)
    }

    /// q^e as a rational, any integer e.
    pub fn pow_rat(self, e: i64) -> BigRational {
        let p = BigRational::from_integer(self.pow(e.unsigned_abs()));
        if e >= 0 {
            p
        } else {
            p.recip()
        }
    }
}

impl std::fmt::Display for QValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The q-integer [n]_q = 1 + q + ... + q^(n-1) for n >= 0.
pub fn q_int_z(n: u64, q: QValue) -> BigInt {
    let mut acc = BigInt::zero();
    let mut pw = BigInt::one();
    let qq = BigInt::from(q.get());
    for _ in 0..n {
        acc += &pw;
        pw *= &qq;
    }
    acc
}

/// The q-integer (q^n - 1)/(q - 1) for any integer n, as an exact rational.
pub fn q_int(n: i64, q: QValue) -> BigRational {
    let num = q.pow_rat(n) - BigRational::one();
    let den = BigRational::from_integer(BigInt::from(q.get() - 1));
    num / den
}

/// [n]_q! = [n]_q [n-1]_q ... [1]_q.
pub fn q_factorial(n: u64, q: QValue) -> BigInt {
    let mut acc = BigInt::one();
    for i in 1..=n {
        acc *= q_int_z(i, q);
    }
    acc
}

/// Gaussian binomial coefficient, zero when k > n, asserted integral.
pub fn q_binomial(n: u64, k: u64, q: QValue) -> Result<BigInt> {
    if k > n {
        return Ok(BigInt::zero());
    }
    // prod_{i=1}^{k} [n-k+i]_q / [i]_q, as an exact rational.
    let mut acc = BigRational::one();
    for i in 1..=k {
        let num = q_int_z(n - k + i, q);
        let den = q_int_z(i, q);
        acc *= BigRational::new(num, den);
    }
    rational_to_int(&acc)
        .ok_or_else(|| Error::NonIntegral(format!("[{n} choose {k}]_{q} not integral")))
}

fn rational_to_int(r: &BigRational) -> Option<BigInt> {
    if r.is_integer() {
        Some(r.to_integer())
    } else {
        None
    }
}

/// The Gaussian binomial as a polynomial in q with nonnegative integer
/// coefficients, computed by exact polynomial division of
/// prod (q^(n-k+i) - 1) by prod (q^i - 1).
pub fn gauss_poly(n: u64, k: u64) -> Result<RationalPoly> {
    if k > n {
        return Err(Error::InvalidInput(format!("gauss_poly requires k <= n, got ({n},{k})")));
    }
    let one = || RationalPoly::constant(BigRational::one(), VarTag::Q);
    let mut num = one();
    let mut den = one();
    for i in 1..=k {
        num = num.mul(&cyclo_like(n - k + i));
        den = den.mul(&cyclo_like(i));
    }
    let (quot, rem) = num.divmod(&den)?;
    debug_assert!(rem.is_zero(), "gaussian binomial division must be exact");
    for c in quot.coeffs() {
        debug_assert!(c.is_integer() && !c.is_negative());
    }
    Ok(quot)
}

/// q^j - 1 as a polynomial in q.
fn cyclo_like(j: u64) -> RationalPoly {
    let mut coeffs = vec![BigRational::zero(); j as usize + 1];
    coeffs[0] = -BigRational::one();
    coeffs[j as usize] = BigRational::one();
    RationalPoly::new(coeffs, VarTag::Q)
}

/// Evaluates the basis element
/// qbinom(x, k) = x (x - [1]_q) ... (x - [k-1]_q) / (q^C(k,2) [k]_q!)
/// at a rational point x. At x = [n]_q this equals the Gaussian binomial.
pub fn rq_basis_eval(k: u64, x: &BigRational, q: QValue) -> BigRational {
    let mut num = BigRational::one();
    for j in 0..k {
        num *= x - BigRational::from_integer(q_int_z(j, q));
    }
    let den = q.pow_rat((k as i64) * (k as i64 - 1) / 2)
        * BigRational::from_integer(q_factorial(k, q));
    num / den
}

/// Checks the shifted-binomial identity: [m+d choose h]_q equals the basis
/// element qbinom(q^d x + [d]_q, h) evaluated at x = [m]_q. Requires m+d >= 0.
pub fn shifted_qbinom_check(d: i64, h: u64, m: u64, q: QValue) -> Result<bool> {
    let md = m as i64 + d;
    if md < 0 {
        return Err(Error::InvalidInput(format!("m + d must be >= 0, got {md}")));
    }
    let lhs = BigRational::from_integer(q_binomial(md as u64, h, q)?);
    let x = BigRational::from_integer(q_int_z(m, q));
    let arg = q.pow_rat(d) * x + q_int(d, q);
    let rhs = rq_basis_eval(h, &arg, q);
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> QValue {
        QValue::new(v).unwrap()
    }

    #[test]
    fn q_int_small_values() {
        assert_eq!(q_int_z(3, q(2)), BigInt::from(7));
        assert_eq!(q_int_z(0, q(5)), BigInt::zero());
        assert_eq!(q_int_z(2, q(-2)), BigInt::from(-1));
        // negative n agrees with the closed form
        assert_eq!(q_int(-1, q(2)), BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(
            q_int(3, q(2)),
            BigRational::from_integer(BigInt::from(7))
        );
    }

    /// Brute-force count of k-dimensional subspaces of F_q^n for prime q:
    /// counts ordered independent k-tuples and divides.
    fn subspace_count(n: u32, k: u32, p: u64) -> u64 {
        let tuples = |d: u32| -> u64 {
            let total = p.pow(d);
            (0..k).map(|i| total - p.pow(i)).product()
        };
        if k == 0 {
            return 1;
        }
        tuples(n) / tuples(k)
    }

    #[test]
    fn q_binomial_counts_subspaces() {
        // [4 choose 2]_2 = number of 2-dim subspaces of F_2^4
        assert_eq!(q_binomial(4, 2, q(2)).unwrap(), BigInt::from(subspace_count(4, 2, 2)));
        assert_eq!(subspace_count(4, 2, 2), 35);
        for n in 0..=6u64 {
            for k in 0..=n {
                assert_eq!(
                    q_binomial(n, k, q(3)).unwrap(),
                    BigInt::from(subspace_count(n as u32, k as u32, 3))
                );
            }
        }
    }

    #[test]
    fn q_binomial_edge_cases() {
        assert_eq!(q_binomial(5, 0, q(7)).unwrap(), BigInt::one());
        assert_eq!(q_binomial(2, 3, q(2)).unwrap(), BigInt::zero());
        assert_eq!(q_binomial(2, 1, q(-2)).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn q_binomial_symmetry_and_pascal() {
        let bases = [2i64, 3, 4, 5, -2, -3, 9];
        for &b in &bases {
            let qq = q(b);
            for n in 0..=12u64 {
                for k in 0..=n {
                    let a = q_binomial(n, k, qq).unwrap();
                    assert_eq!(a, q_binomial(n, n - k, qq).unwrap());
                    if n > 0 && k > 0 {
                        // q-Pascal: C(n,k) = C(n-1,k-1) + q^k C(n-1,k)
                        let rhs = q_binomial(n - 1, k - 1, qq).unwrap()
                            + qq.pow(k) * q_binomial(n - 1, k, qq).unwrap();
                        assert_eq!(a, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn gauss_poly_examples() {
        let g = gauss_poly(2, 1).unwrap();
        assert_eq!(g.coeffs().len(), 2);
        assert!(g.coeffs().iter().all(|c| c == &BigRational::one()));
        let g = gauss_poly(7, 3).unwrap();
        // at q = 1 the ordinary binomial coefficient
        assert_eq!(
            g.eval(&BigRational::one()),
            BigRational::from_integer(BigInt::from(35))
        );
        let g42 = gauss_poly(4, 2).unwrap();
        let want: Vec<i64> = vec![1, 1, 2, 1, 1];
        let got: Vec<BigRational> = g42.coeffs().to_vec();
        assert_eq!(
            got,
            want.iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect::<Vec<_>>()
        );
        assert_eq!(gauss_poly(5, 0).unwrap().coeffs().len(), 1);
    }

    #[test]
    fn gauss_poly_at_q_equals_binomial_evaluation() {
        for n in 0..=8u64 {
            for k in 0..=n {
                let g = gauss_poly(n, k).unwrap();
                for base in [2i64, 3, -2] {
                    let v = g.eval(&BigRational::from_integer(BigInt::from(base)));
                    assert_eq!(v.to_integer(), q_binomial(n, k, q(base)).unwrap());
                }
            }
        }
    }

    #[test]
    fn rq_basis_identity() {
        // qbinom([n]_q, k) = [n choose k]_q, exhaustively for 0 <= k <= n <= 10
        for &b in &[2i64, 3, -2, 4] {
            let qq = q(b);
            for n in 0..=10u64 {
                let x = BigRational::from_integer(q_int_z(n, qq));
                for k in 0..=n {
                    assert_eq!(
                        rq_basis_eval(k, &x, qq),
                        BigRational::from_integer(q_binomial(n, k, qq).unwrap())
                    );
                }
            }
        }
        // spot values
        let x = BigRational::from_integer(BigInt::from(7));
        assert_eq!(
            rq_basis_eval(2, &x, q(2)),
            BigRational::from_integer(BigInt::from(7))
        );
        assert_eq!(rq_basis_eval(0, &x, q(5)), BigRational::one());
        let x = BigRational::new(BigInt::from(5), BigInt::from(3));
        assert_eq!(rq_basis_eval(1, &x, q(2)), x);
    }

    #[test]
    fn shifted_identity_exhaustive() {
        for &b in &[2i64, 3] {
            let qq = q(b);
            for d in -4i64..=4 {
                for h in 0..=4u64 {
                    for m in 0..=8u64 {
                        if m as i64 + d < 0 {
                            continue;
                        }
                        assert!(
                            shifted_qbinom_check(d, h, m, qq).unwrap(),
                            "failed at d={d} h={h} m={m} q={b}"
                        );
                    }
                }
            }
        }
    }
}
