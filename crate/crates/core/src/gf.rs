//! Finite fields GF(p^k) with table-driven arithmetic and the order-2
//! Frobenius x -> x^q on GF(q^2) used for Hermitian forms.
//!
//! Elements are indices 0..p^k; the base-p digits of an index are the
//! coefficients (constant term first) of the representative polynomial
//! modulo a fixed monic irreducible.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Scalar of a finite field, stored as an index into the field's tables.
pub type Scalar = u16;

/// Fields above this size get no multiplication tables (slow digit path).
const TABLE_LIMIT: u64 = 1024;
/// Hard cap on field size.
const SIZE_LIMIT: u64 = 1 << 16;

#[derive(Debug)]
pub struct FieldSpec {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    /// monic modulus of degree k, constant term first, length k+1
    pub modulus: Vec<u64>,
    add_t: Vec<Scalar>,
    mul_t: Vec<Scalar>,
    inv_t: Vec<Scalar>,
    neg_t: Vec<Scalar>,
    /// x -> x^(p^(k/2)) when k is even
    frob: Option<Vec<Scalar>>,
    /// p^(k/2) when k is even: the "q" of GF(q^2)
    pub sigma_base: Option<u64>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k
    }
}
impl Eq for FieldSpec {}

pub type Field = Arc<FieldSpec>;

fn field_cache() -> &'static Mutex<HashMap<(u64, u32), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Deterministic field with the lexicographically least monic irreducible
/// modulus (coefficients compared from the constant term up). Shared and
/// cached per (p, k).
pub fn field_make(p: u64, k: u32) -> Result<Field> {
    if let Some(f) = field_cache().lock().unwrap().get(&(p, k)) {
        return Ok(f.clone());
    }
    let f = Arc::new(FieldSpec::build(p, k)?);
    field_cache()
        .lock()
        .unwrap()
        .entry((p, k))
        .or_insert_with(|| f.clone());
    Ok(f)
}

/// GF(q^2) for q = p^j, with the Frobenius x -> x^q available.
pub fn field_make_quadratic(q0: u64) -> Result<Field> {
    let (p, j) = split_prime_power(q0)
        .ok_or_else(|| Error::InvalidInput(format!("{q0} is not a prime power")))?;
    field_make(p, 2 * j)
}

/// Factors a prime power into (p, k), if it is one.
pub fn split_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut m = q;
            let mut k = 0;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            return (m == 1).then_some((p, k));
        }
        p += 1;
    }
    Some((q, 1))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomial helpers over Z/p used only during construction (digit vectors,
// constant term first).
fn pmod_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pmod_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    pmod_trim(&mut r);
    let db = b.len() - 1;
    let lb_inv = mod_inv(b[db], p);
    while r.len() > db {
        let k = r.len() - 1;
        let c = (r[k] * lb_inv) % p;
        if c != 0 {
            for j in 0..=db {
                let idx = k - db + j;
                let sub = (c * b[j]) % p;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        pmod_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat; p prime and a != 0 mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

fn index_to_digits(mut x: u64, p: u64, k: u32) -> Vec<u64> {
    let mut d = Vec::with_capacity(k as usize);
    for _ in 0..k {
        d.push(x % p);
        x /= p;
    }
    d
}

fn digits_to_index(d: &[u64], p: u64) -> u64 {
    let mut x = 0;
    for &c in d.iter().rev() {
        x = x * p + c;
    }
    x
}

impl FieldSpec {
    fn build(p: u64, k: u32) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be >= 1".into()));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= SIZE_LIMIT)
            .ok_or_else(|| Error::LimitExceeded(format!("field size {p}^{k} over limit")))?;
        let modulus = least_irreducible(p, k);
        let mut f = FieldSpec {
            p,
            k,
            q,
            modulus,
            add_t: vec![],
            mul_t: vec![],
            inv_t: vec![],
            neg_t: vec![],
            frob: None,
            sigma_base: (k % 2 == 0).then(|| p.pow(k / 2)),
        };
        if q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add_t = vec![0 as Scalar; n * n];
            let mut mul_t = vec![0 as Scalar; n * n];
            let mut neg_t = vec![0 as Scalar; n];
            let mut inv_t = vec![0 as Scalar; n];
            for a in 0..q {
                neg_t[a as usize] = f.neg_raw(a) as Scalar;
                for b in 0..q {
                    add_t[(a * q + b) as usize] = f.add_raw(a, b) as Scalar;
                    mul_t[(a * q + b) as usize] = f.mul_raw(a, b) as Scalar;
                }
            }
            for a in 1..q {
                // q - 2 >= 0 since q >= 2
                inv_t[a as usize] = f.pow_raw(a, q - 2) as Scalar;
                debug_assert_eq!(mul_t[(a * q + inv_t[a as usize] as u64) as usize], 1);
            }
            f.add_t = add_t;
            f.mul_t = mul_t;
            f.inv_t = inv_t;
            f.neg_t = neg_t;
            if f.sigma_base.is_some() {
                let e = f.sigma_base.unwrap();
                let mut frob = vec![0 as Scalar; n];
                for a in 0..q {
                    frob[a as usize] = f.pow_raw(a, e) as Scalar;
                }
                f.frob = Some(frob);
            }
        }
        Ok(f)
    }

    fn add_raw(&self, a: u64, b: u64) -> u64 {
        let da = index_to_digits(a, self.p, self.k);
        let db = index_to_digits(b, self.p, self.k);
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        digits_to_index(&s, self.p)
    }

    fn neg_raw(&self, a: u64) -> u64 {
        let da = index_to_digits(a, self.p, self.k);
        let s: Vec<u64> = da.iter().map(|x| (self.p - x) % self.p).collect();
        digits_to_index(&s, self.p)
    }

    fn mul_raw(&self, a: u64, b: u64) -> u64 {
        let da = index_to_digits(a, self.p, self.k);
        let db = index_to_digits(b, self.p, self.k);
        let mut prod = vec![0u64; 2 * self.k as usize];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let r = pmod_rem(&prod, &self.modulus, self.p);
        digits_to_index(&r, self.p)
    }

    fn pow_raw(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        if self.add_t.is_empty() {
            self.add_raw(a as u64, b as u64) as Scalar
        } else {
            self.add_t[a as usize * self.q as usize + b as usize]
        }
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        if self.mul_t.is_empty() {
            self.mul_raw(a as u64, b as u64) as Scalar
        } else {
            self.mul_t[a as usize * self.q as usize + b as usize]
        }
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        if self.neg_t.is_empty() {
            self.neg_raw(a as u64) as Scalar
        } else {
            self.neg_t[a as usize]
        }
    }

    pub fn inv(&self, a: Scalar) -> Result<Scalar> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        if self.inv_t.is_empty() {
            Ok(self.pow_raw(a as u64, self.q - 2) as Scalar)
        } else {
            Ok(self.inv_t[a as usize])
        }
    }

    pub fn pow(&self, a: Scalar, e: u64) -> Scalar {
        let mut acc: Scalar = 1;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The order-2 Frobenius x -> x^q on GF(q^2); errors unless the extension
    /// degree is even.
    pub fn frobenius_q(&self, a: Scalar) -> Result<Scalar> {
        let e = self.sigma_base.ok_or(Error::WrongField)?;
        if let Some(t) = &self.frob {
            Ok(t[a as usize])
        } else {
            Ok(self.pow_raw(a as u64, e) as Scalar)
        }
    }

    /// sigma(x): Frobenius when `hermitian`, identity otherwise.
    pub fn sigma(&self, a: Scalar, hermitian: bool) -> Scalar {
        if hermitian {
            self.frobenius_q(a).expect("hermitian sigma needs even degree")
        } else {
            a
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Scalar> {
        (0..self.q as Scalar).map(|x| x as Scalar)
    }

    /// Nonzero square test, odd characteristic.
    pub fn is_square(&self, a: Scalar) -> bool {
        if a == 0 {
            return true;
        }
        self.pow(a, (self.q - 1) / 2) == 1
    }

    /// Least field index that is not a square (odd q only).
    pub fn least_nonsquare(&self) -> Result<Scalar> {
        if self.p == 2 {
            return Err(Error::IncompatibleFamily(
                "no non-squares in characteristic 2".into(),
            ));
        }
        self.elements()
            .find(|&a| a != 0 && !self.is_square(a))
            .ok_or_else(|| Error::InvalidInput("no non-square found".into()))
    }

    /// Smallest x with x + sigma(x) = target, on GF(q^2).
    pub fn solve_trace(&self, target: Scalar) -> Result<Scalar> {
        for x in self.elements() {
            if self.add(x, self.frobenius_q(x)?) == target {
                return Ok(x);
            }
        }
        Err(Error::InvalidInput("trace equation unsolvable".into()))
    }
}

/// Lexicographically least monic irreducible of degree k over GF(p),
/// coefficients ordered from the constant term up; t itself is eligible only
/// when nothing smaller exists (degree 1 starts at t).
fn least_irreducible(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1]; // t is the least monic irreducible of degree 1
    }
    let lower: Vec<Vec<u64>> = (1..=k / 2)
        .flat_map(|d| monic_of_degree(p, d))
        .filter(|f| poly_is_irreducible(f, p))
        .collect();
    for cand in monic_of_degree(p, k) {
        if cand[0] == 0 {
            continue; // divisible by t
        }
        if lower.iter().all(|f| !pmod_rem(&cand, f, p).is_empty()) {
            return cand;
        }
    }
    unreachable!("an irreducible of every degree exists")
}

fn monic_of_degree(p: u64, d: u32) -> Vec<Vec<u64>> {
    let total = p.pow(d);
    (0..total)
        .map(|i| {
            let mut c = index_to_digits(i, p, d);
            c.push(1);
            c
        })
        .collect()
}

fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 1 {
        return true;
    }
    for e in 1..=d / 2 {
        for g in monic_of_degree(p, e as u32) {
            if pmod_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_choices() {
        assert_eq!(field_make(2, 1).unwrap().modulus, vec![0, 1]); // t
        assert_eq!(field_make(2, 2).unwrap().modulus, vec![1, 1, 1]); // t^2+t+1
        assert_eq!(field_make(3, 2).unwrap().modulus, vec![1, 0, 1]); // t^2+1
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(field_make(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(field_make(2, 17), Err(Error::LimitExceeded(_))));
    }

    #[test]
    fn gf4_generator_arithmetic() {
        let f = field_make(2, 2).unwrap();
        let g: Scalar = 2; // class of t
        assert_eq!(f.mul(g, g), 3); // t^2 = t + 1
        assert_eq!(f.inv(2).unwrap(), 3);
    }

    #[test]
    fn gf3_inverse() {
        let f = field_make(3, 1).unwrap();
        assert_eq!(f.inv(2).unwrap(), 2);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for (p, k) in [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3), (5, 2), (2, 4), (7, 1)] {
            let f = field_make(p, k).unwrap();
            let q = f.q as Scalar;
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.pow(a, f.q), a, "x^q = x fails in GF({})", f.q);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c)),
                            "distributivity fails in GF({})",
                            f.q
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_order_two_automorphism() {
        for (p, k) in [(2u64, 2u32), (3, 2), (5, 2)] {
            let f = field_make(p, k).unwrap();
            let q0 = f.sigma_base.unwrap();
            let mut fixed = 0;
            for a in f.elements() {
                let fa = f.frobenius_q(a).unwrap();
                assert_eq!(f.frobenius_q(fa).unwrap(), a);
                if fa == a {
                    fixed += 1;
                }
                for b in f.elements() {
                    assert_eq!(
                        f.frobenius_q(f.add(a, b)).unwrap(),
                        f.add(fa, f.frobenius_q(b).unwrap())
                    );
                    assert_eq!(
                        f.frobenius_q(f.mul(a, b)).unwrap(),
                        f.mul(fa, f.frobenius_q(b).unwrap())
                    );
                }
            }
            assert_eq!(fixed as u64, q0, "fixed field size");
        }
        assert_eq!(field_make(2, 2).unwrap().frobenius_q(2).unwrap(), 3); // sigma(g) = g+1
        assert!(field_make(3, 1).unwrap().frobenius_q(1).is_err());
    }

    #[test]
    fn trace_image_is_fixed_subfield() {
        for (p, k) in [(2u64, 2u32), (3, 2)] {
            let f = field_make(p, k).unwrap();
            let mut traces: Vec<Scalar> = f
                .elements()
                .map(|x| f.add(x, f.frobenius_q(x).unwrap()))
                .collect();
            traces.sort_unstable();
            traces.dedup();
            let mut fixed: Vec<Scalar> = f
                .elements()
                .filter(|&x| f.frobenius_q(x).unwrap() == x)
                .collect();
            fixed.sort_unstable();
            assert_eq!(traces, fixed);
        }
    }

    #[test]
    fn nonsquares() {
        let f = field_make(3, 1).unwrap();
        assert_eq!(f.least_nonsquare().unwrap(), 2);
        let f = field_make(5, 1).unwrap();
        assert_eq!(f.least_nonsquare().unwrap(), 2);
        assert!(field_make(2, 2).unwrap().least_nonsquare().is_err());
    }
}
