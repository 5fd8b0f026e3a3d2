//! Closed-form group orders, centralizer sizes, and centralizer ratios for
//! the classical families, evaluated with exact rational arithmetic and
//! asserted integral where integrality is claimed.

use num::{BigInt, BigRational, One, Signed};

use crate::error::{Error, Result};
use crate::fqpoly;
use crate::gf::Field;
use crate::types::{witt_add, Multipartition, PolyKey, WittClass};

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

fn pow(base: &BigInt, e: u64) -> BigInt {
    base.pow(e as u32)
}

/// |GL_n(F_q)| = (q^n - 1)(q^n - q) ... (q^n - q^(n-1)).
pub fn gl_order(n: u64, q: u64) -> BigInt {
    let qn = pow(&big(q), n);
    let mut acc = BigInt::one();
    for i in 0..n {
        acc *= &qn - pow(&big(q), i);
    }
    acc
}

/// |U_n(F_q)| = q^C(n,2) prod_{i=1}^n (q^i - (-1)^i).
pub fn u_order(n: u64, q: u64) -> BigInt {
    let mut acc = pow(&big(q), n * (n.saturating_sub(1)) / 2);
    for i in 1..=n {
        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        acc *= pow(&big(q), i) - sign;
    }
    acc
}

/// |Sp_dim(F_q)| for even dim = 2n: q^(n^2) prod_{i=1}^n (q^2i - 1).
pub fn sp_order(dim: u64, q: u64) -> Result<BigInt> {
    if dim % 2 != 0 {
        return Err(Error::BadParity);
    }
    let n = dim / 2;
    let mut acc = pow(&big(q), n * n);
    for i in 1..=n {
        acc *= pow(&big(q), 2 * i) - BigInt::one();
    }
    Ok(acc)
}

/// Order of the symmetry group of the symmetric form of the given germ on
/// F_q^dim, q odd. The germ's dimension parity must match dim.
pub fn o_order(dim: u64, germ: WittClass, q: u64) -> Result<BigInt> {
    if q % 2 == 0 {
        return Err(Error::IncompatibleFamily(
            "orthogonal groups need odd characteristic".into(),
        ));
    }
    if germ.dim_parity() != (dim % 2) as usize {
        return Err(Error::IncompatibleFamily(format!(
            "germ {} has wrong parity for dimension {dim}",
            germ.name()
        )));
    }
    if dim == 0 {
        return Ok(BigInt::one());
    }
    if dim % 2 == 1 {
        let n = (dim - 1) / 2;
        let mut acc = big(2) * pow(&big(q), n * n);
        for i in 1..=n {
            acc *= pow(&big(q), 2 * i) - BigInt::one();
        }
        Ok(acc)
    } else {
        let n = dim / 2;
        let eps = germ.sign()?; // +1 for germ 0, -1 for omega
        let mut acc = big(2) * pow(&big(q), n * n - n);
        acc *= pow(&big(q), n) - BigInt::from(eps);
        for i in 1..n {
            acc *= pow(&big(q), 2 * i) - BigInt::one();
        }
        Ok(acc)
    }
}

/// phi_k(x) = prod_{i=1}^k (1 - x^i).
fn phi(k: u32, x: &BigRational) -> BigRational {
    let mut acc = BigRational::one();
    let mut xi = BigRational::one();
    for _ in 1..=k {
        xi *= x;
        acc *= BigRational::one() - &xi;
    }
    acc
}

/// Centralizer size in GL_n(F_q) of an element of the given type:
/// prod_r q_r^(|mu(r)| + 2 n(mu(r))) prod_i phi_{m_i(mu(r))}(q_r^-1).
pub fn gl_centralizer_size(mu: &Multipartition, q: u64) -> Result<BigInt> {
    let mut acc = BigRational::one();
    for (key, part) in mu.iter() {
        let qr = pow(&big(q), key.deg() as u64);
        let qr_rat = BigRational::from_integer(qr.clone());
        acc *= num::pow::pow(qr_rat.clone(), (part.size() + 2 * part.n_stat()) as usize);
        let inv = qr_rat.recip();
        let stats = crate::types::partition_stats(part);
        for (_, &m) in stats.mult.iter() {
            acc *= phi(m, &inv);
        }
    }
    if !acc.is_integer() || !acc.is_positive() {
        return Err(Error::NonIntegral(format!("centralizer size for {mu}")));
    }
    Ok(acc.to_integer())
}

/// k = l(mu(t-1)) and h = m_1(mu(t-1)) of a type.
pub fn kh_of(mu: &Multipartition, tm1: &PolyKey) -> (u64, u64) {
    let p = mu.part_at(tm1);
    (p.len() as u64, p.mult(1) as u64)
}

/// Centralizer ratio under the block-identity embedding by d:
/// q^(d(2k+d)) prod_{i=h+1}^{h+d} (1 - q^-i).
pub fn gl_centralizer_ratio(mu: &Multipartition, tm1: &PolyKey, d: u64, q: u64) -> BigRational {
    let (k, h) = kh_of(mu, tm1);
    let mut acc = BigRational::from_integer(pow(&big(q), d * (2 * k + d)));
    let qinv = BigRational::from_integer(big(q)).recip();
    for i in h + 1..=h + d {
        acc *= BigRational::one() - num::pow::pow(qinv.clone(), i as usize);
    }
    acc
}

/// Centralizer size in U_n(F_q) of an element whose GL_n(F_q^2)-type is mu
/// (which must be invariant under the star involution): the product of
/// B(r) = Q^(sum_{i<j} 2 i m_i m_j + sum_i (i-1) m_i^2) prod_i A(r, i)
/// with A(r,i) = |U_m(F_Q)| when r = r*, and star-pairs merged so the
/// square-root GL factors combine integrally.
pub fn unitary_centralizer_size(
    mu: &Multipartition,
    field: &Field,
    q: u64,
) -> Result<BigInt> {
    if !mu.star_symmetric(field, true) {
        return Err(Error::StarAsymmetric);
    }
    let mut acc = BigInt::one();
    for (key, part) in mu.iter() {
        let r = key.to_poly(field);
        let rstar = PolyKey::from_poly(&fqpoly::star(&r, true)?);
        let qr = pow(&big(q), key.deg() as u64);
        let stats = crate::types::partition_stats(part);
        let mults: Vec<(u32, u32)> = stats.mult.iter().map(|(&i, &m)| (i, m)).collect();
        let mut exp: u64 = 0;
        for (ai, &(i, mi)) in mults.iter().enumerate() {
            exp += (i as u64 - 1) * (mi as u64) * (mi as u64);
            for &(_, mj) in &mults[ai + 1..] {
                exp += 2 * i as u64 * mi as u64 * mj as u64;
            }
        }
        if *key == rstar {
            acc *= pow(&qr, exp);
            for &(_, m) in &mults {
                acc *= u_order_base(m as u64, &qr);
            }
        } else if *key < rstar {
            // merge the pair {r, r*}: both have the same partition data
            acc *= pow(&qr, 2 * exp);
            for &(_, m) in &mults {
                acc *= gl_order_base(m as u64, &(&qr * &qr));
            }
        }
    }
    Ok(acc)
}

/// |GL_n| over a field of the given (possibly composite-power) size.
fn gl_order_base(n: u64, size: &BigInt) -> BigInt {
    let qn = size.pow(n as u32);
    let mut acc = BigInt::one();
    for i in 0..n {
        acc *= &qn - size.pow(i as u32);
    }
    acc
}

/// |U_n| over a field of the given size.
fn u_order_base(n: u64, size: &BigInt) -> BigInt {
    let mut acc = size.pow((n * n.saturating_sub(1) / 2) as u32);
    for i in 1..=n {
        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        acc *= size.pow(i as u32) - sign;
    }
    acc
}

/// Unitary centralizer ratio under embedding by d:
/// q^(2d(k-h)) |U_(h+d)(F_q)| / |U_h(F_q)|.
pub fn unitary_ratio(mu: &Multipartition, tm1: &PolyKey, d: u64, q: u64) -> BigRational {
    let (k, h) = kh_of(mu, tm1);
    BigRational::from_integer(pow(&big(q), 2 * d * (k - h)))
        * BigRational::new(u_order(h + d, q), u_order(h, q))
}

/// Symplectic centralizer ratio under embedding by even d:
/// q^(d(k-h)) |Sp_(h+d)(F_q)| / |Sp_h(F_q)|.
pub fn sp_ratio(mu: &Multipartition, tm1: &PolyKey, d: u64, q: u64) -> Result<BigRational> {
    if d % 2 != 0 {
        return Err(Error::BadParity);
    }
    let (k, h) = kh_of(mu, tm1);
    Ok(BigRational::from_integer(pow(&big(q), d * (k - h)))
        * BigRational::new(sp_order(h + d, q)?, sp_order(h, q)?))
}

/// Germs admissible as the epsilon_1 Wall invariant for h parts of size 1.
pub fn admissible_eps1(h: u64) -> Vec<WittClass> {
    if h == 0 {
        vec![WittClass::Zero]
    } else if h % 2 == 0 {
        vec![WittClass::Zero, WittClass::Omega]
    } else {
        vec![WittClass::One, WittClass::Delta]
    }
}

/// Orthogonal centralizer ratio under embedding by d coordinates carrying a
/// form of germ rho: q^(d(k-h)) |O_(h+d)^(eps1 + rho)| / |O_h^(eps1)|.
/// The Wall invariant eps1 is not determined by the GL-type; callers try the
/// admissible values.
pub fn orth_ratio(
    mu: &Multipartition,
    tm1: &PolyKey,
    d: u64,
    q: u64,
    rho: WittClass,
    eps1: WittClass,
) -> Result<BigRational> {
    let (k, h) = kh_of(mu, tm1);
    let combined = witt_add(eps1, rho, q)?;
    Ok(BigRational::from_integer(pow(&big(q), d * (k - h)))
        * BigRational::new(o_order(h + d, combined, q)?, o_order(h, eps1, q)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;
    use crate::types::Partition;

    #[test]
    fn small_orders() {
        assert_eq!(gl_order(2, 2), big(6));
        assert_eq!(gl_order(4, 3), BigInt::from(24_261_120u64));
        assert_eq!(gl_order(1, 7), big(6));
        assert_eq!(u_order(2, 2), big(18));
        assert_eq!(u_order(1, 2), big(3));
        assert_eq!(u_order(4, 2), big(77_760));
        assert_eq!(sp_order(2, 2).unwrap(), big(6));
        assert_eq!(sp_order(4, 2).unwrap(), big(720));
        assert_eq!(sp_order(6, 2).unwrap(), big(1_451_520));
        assert_eq!(o_order(3, WittClass::One, 3).unwrap(), big(48));
        assert_eq!(o_order(5, WittClass::One, 3).unwrap(), big(103_680));
        assert_eq!(o_order(2, WittClass::Zero, 3).unwrap(), big(4));
        assert_eq!(o_order(2, WittClass::Omega, 3).unwrap(), big(8));
        assert_eq!(o_order(4, WittClass::Zero, 3).unwrap(), big(1152));
        assert_eq!(o_order(4, WittClass::Omega, 3).unwrap(), big(1440));
        assert_eq!(o_order(0, WittClass::Zero, 3).unwrap(), BigInt::one());
        assert!(o_order(2, WittClass::One, 3).is_err());
        assert!(o_order(2, WittClass::Zero, 2).is_err());
    }

    fn tm1_q(q: u64) -> PolyKey {
        let f = field_make(q, 1).unwrap();
        PolyKey::t_minus_one(&f)
    }

    #[test]
    fn gl_centralizer_examples() {
        let tm1 = tm1_q(2);
        // identity of GL_2(F_2): centralizer is the whole group
        let mut mu = Multipartition::new();
        mu.insert(tm1.clone(), Partition::new(vec![1, 1]));
        assert_eq!(gl_centralizer_size(&mu, 2).unwrap(), big(6));
        // transvection type (2): centralizer size 2
        let mut mu = Multipartition::new();
        mu.insert(tm1.clone(), Partition::new(vec![2]));
        assert_eq!(gl_centralizer_size(&mu, 2).unwrap(), big(2));
        // order-3 element of GL_2(F_2): type (1) at t^2+t+1, centralizer 3
        let f2 = field_make(2, 1).unwrap();
        let r = PolyKey::from_poly(&crate::fqpoly::PolyFq::new(f2, vec![1, 1, 1]));
        let mut mu = Multipartition::new();
        mu.insert(r, Partition::new(vec![1]));
        assert_eq!(gl_centralizer_size(&mu, 2).unwrap(), big(3));
    }

    #[test]
    fn gl_ratio_consistency() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        // formula self-consistency: ratio * |C(mu)| = |C(mu + 1^d)| for random mu
        for q in [2u64, 3, 4] {
            let tm1 = tm1_q(if q == 4 { 2 } else { q });
            let tm1 = if q == 4 {
                // over F_4 the key t-1 is t+1 with coefficient 1
                PolyKey::t_minus_one(&field_make(2, 2).unwrap())
            } else {
                tm1
            };
            for _ in 0..100 {
                let mut mu = Multipartition::new();
                let nparts = rng.gen_range(0..4);
                let parts: Vec<u32> = (0..nparts).map(|_| rng.gen_range(1..5)).collect();
                mu.insert(tm1.clone(), Partition::new(parts));
                let d = rng.gen_range(0..=3u64);
                let lhs = gl_centralizer_ratio(&mu, &tm1, d, q)
                    * BigRational::from_integer(gl_centralizer_size(&mu, q).unwrap());
                let big_mu = mu.union_t_minus_1(&tm1, d as usize);
                let rhs =
                    BigRational::from_integer(gl_centralizer_size(&big_mu, q).unwrap());
                assert_eq!(lhs, rhs, "mu={mu} d={d} q={q}");
            }
        }
    }

    #[test]
    fn gl_ratio_d_zero_is_one() {
        let tm1 = tm1_q(2);
        let mut mu = Multipartition::new();
        mu.insert(tm1.clone(), Partition::new(vec![2]));
        assert_eq!(gl_centralizer_ratio(&mu, &tm1, 0, 2), BigRational::one());
        // transvection type (2), d=1, q=2: k=1, h=0 -> 2^3 * (1 - 1/2) = 4
        assert_eq!(
            gl_centralizer_ratio(&mu, &tm1, 1, 2),
            BigRational::from_integer(big(4))
        );
    }

    #[test]
    fn unitary_centralizer_identity_is_group_order() {
        let f4 = field_make(2, 2).unwrap();
        let tm1 = PolyKey::t_minus_one(&f4);
        for n in 1..=4u64 {
            let mut mu = Multipartition::new();
            mu.insert(tm1.clone(), Partition::new(vec![1; n as usize]));
            assert_eq!(
                unitary_centralizer_size(&mu, &f4, 2).unwrap(),
                u_order(n, 2),
                "identity centralizer in U_{n}"
            );
        }
    }

    #[test]
    fn sp_orth_ratio_identity_cases() {
        // identity of Sp_2(F_2), d=2: k=h=2 -> |Sp_4|/|Sp_2| = 120
        let tm1 = tm1_q(2);
        let mut mu = Multipartition::new();
        mu.insert(tm1.clone(), Partition::new(vec![1, 1]));
        assert_eq!(
            sp_ratio(&mu, &tm1, 2, 2).unwrap(),
            BigRational::from_integer(big(120))
        );
        assert!(sp_ratio(&mu, &tm1, 1, 2).is_err());
        // identity of O_3(F_3), d=2, rho = 0: |O_5|/|O_3| = 2160
        let tm1 = tm1_q(3);
        let mut mu = Multipartition::new();
        mu.insert(tm1.clone(), Partition::new(vec![1, 1, 1]));
        for eps in admissible_eps1(3) {
            assert_eq!(
                orth_ratio(&mu, &tm1, 2, 3, WittClass::Zero, eps).unwrap(),
                BigRational::new(big(103_680), big(48))
            );
        }
    }
}
