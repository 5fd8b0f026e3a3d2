//! Univariate polynomials over a finite field: arithmetic, the sieve of monic
//! irreducibles (the index set of multipartitions, excluding t), trial-division
//! factorization, and the star involution r -> r*.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldSpec, Scalar};

/// Polynomial with coefficients in a finite field, constant term first,
/// no trailing zeros; the zero polynomial has an empty coefficient list.
#[derive(Clone)]
pub struct PolyFq {
    pub field: Field,
    coeffs: Vec<Scalar>,
}

impl PartialEq for PolyFq {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}
impl Eq for PolyFq {}

impl std::fmt::Debug for PolyFq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PolyFq[{}]({})", self.field.q, self)
    }
}

impl PolyFq {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyFq { field, coeffs }
    }

    pub fn zero(field: Field) -> Self {
        PolyFq { field, coeffs: vec![] }
    }

    pub fn one(field: Field) -> Self {
        PolyFq { field, coeffs: vec![1] }
    }

    /// The monomial t.
    pub fn t(field: Field) -> Self {
        PolyFq { field, coeffs: vec![0, 1] }
    }

    /// t - 1 in the field (t + 1 in characteristic 2).
    pub fn t_minus_one(field: Field) -> Self {
        let m1 = field.neg(1);
        PolyFq { field, coeffs: vec![m1, 1] }
    }

    pub fn constant(field: Field, c: Scalar) -> Self {
        Self::new(field, vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0; n];
        for (i, o) in out.iter_mut().enumerate() {
            *o = f.add(self.coeff(i), other.coeff(i));
        }
        Self::new(self.field.clone(), out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        Self::new(
            self.field.clone(),
            self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        )
    }

    pub fn scale(&self, c: Scalar) -> Self {
        let f = &self.field;
        Self::new(
            self.field.clone(),
            self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field.clone());
        }
        let f = &self.field;
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(self.field.clone(), out)
    }

    pub fn divmod(&self, div: &Self) -> Result<(Self, Self)> {
        if div.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        let dd = div.degree();
        let inv_lead = f.inv(div.leading())?;
        let mut rem = self.coeffs.clone();
        while rem.last() == Some(&0) {
            rem.pop();
        }
        let mut quot = vec![0; rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = f.mul(rem[k], inv_lead);
            if c != 0 {
                quot[k - dd] = c;
                for j in 0..=dd {
                    let s = f.mul(c, div.coeff(j));
                    rem[k - dd + j] = f.sub(rem[k - dd + j], s);
                }
            }
            rem.pop();
            while rem.last() == Some(&0) {
                rem.pop();
            }
        }
        Ok((
            Self::new(self.field.clone(), quot),
            Self::new(self.field.clone(), rem),
        ))
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.divmod(self).map(|(_, r)| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn make_monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.field.inv(self.leading()).unwrap())
    }

    pub fn eval(&self, x: Scalar) -> Scalar {
        let f = &self.field;
        let mut acc = 0;
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.field.clone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Applies a coefficientwise field automorphism.
    pub fn map_coeffs(&self, f: impl Fn(&FieldSpec, Scalar) -> Scalar) -> Self {
        let fld = &self.field;
        Self::new(
            self.field.clone(),
            self.coeffs.iter().map(|&c| f(fld, c)).collect(),
        )
    }
}

/// Canonical print form: `t^k` terms descending, coefficients as decimal
/// field indices, e.g. `t^2+t+1`. This string is embedded in class labels.
impl std::fmt::Display for PolyFq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = self.coeffs[i];
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}t")?,
                (k, 1) => write!(f, "t^{k}")?,
                (k, c) => write!(f, "{c}t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Parses the canonical print form back into a polynomial.
pub fn parse_poly(field: &Field, s: &str) -> Result<PolyFq> {
    let err = |pos: usize, msg: &str| Error::ParseError { pos, msg: msg.to_string() };
    let mut coeffs: Vec<Scalar> = vec![];
    if s.is_empty() {
        return Err(err(0, "empty polynomial"));
    }
    let mut pos = 0;
    for term in s.split('+') {
        if term.is_empty() {
            return Err(err(pos, "empty term"));
        }
        let (cstr, k) = match term.find('t') {
            None => (term, 0usize),
            Some(ti) => {
                let rest = &term[ti + 1..];
                let k = if rest.is_empty() {
                    1
                } else {
                    let caret = rest
                        .strip_prefix('^')
                        .ok_or_else(|| err(pos + ti + 1, "expected ^ after t"))?;
                    caret
                        .parse::<usize>()
                        .map_err(|_| err(pos + ti + 2, "bad exponent"))?
                };
                (&term[..ti], k)
            }
        };
        let c: Scalar = if cstr.is_empty() {
            1
        } else {
            cstr.parse()
                .map_err(|_| err(pos, "bad coefficient index"))?
        };
        if (c as u64) >= field.q {
            return Err(err(pos, "coefficient index out of field range"));
        }
        if coeffs.len() <= k {
            coeffs.resize(k + 1, 0);
        }
        if coeffs[k] != 0 {
            return Err(err(pos, "duplicate term"));
        }
        coeffs[k] = c;
        pos += term.len() + 1;
    }
    Ok(PolyFq::new(field.clone(), coeffs))
}

/// All monic irreducibles of degree <= d over the field, excluding t, sorted
/// by degree then coefficient vector (constant term first).
pub fn irreducibles_up_to(d: usize, field: &Field) -> Result<Vec<PolyFq>> {
    if field
        .q
        .checked_pow(d as u32)
        .is_none_or(|x| x > (1 << 24))
    {
        return Err(Error::LimitExceeded(format!("q^{d} too large for sieve")));
    }
    let mut out: Vec<PolyFq> = Vec::new();
    for deg in 1..=d {
        let mut found: Vec<PolyFq> = Vec::new();
        let total = field.q.pow(deg as u32);
        'cand: for idx in 0..total {
            let mut c: Vec<Scalar> = Vec::with_capacity(deg + 1);
            let mut x = idx;
            for _ in 0..deg {
                c.push((x % field.q) as Scalar);
                x /= field.q;
            }
            c.push(1);
            if c[0] == 0 {
                continue; // divisible by t (also excludes t itself)
            }
            let p = PolyFq::new(field.clone(), c);
            for r in out.iter() {
                if r.degree() > deg / 2 {
                    break;
                }
                if r.divides(&p) {
                    continue 'cand;
                }
            }
            found.push(p);
        }
        out.append(&mut found);
    }
    Ok(out)
}

/// Trial-division factorization into monic irreducibles (t included when it
/// divides). Returns (leading unit, sorted factors with multiplicities).
pub fn factor(f: &PolyFq) -> Result<(Scalar, Vec<(PolyFq, u32)>)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let unit = f.leading();
    let mut rest = f.make_monic();
    let mut factors: Vec<(PolyFq, u32)> = Vec::new();
    // t first
    let t = PolyFq::t(f.field.clone());
    let mut me = 0;
    while rest.degree() >= 1 && t.divides(&rest) {
        rest = rest.divmod(&t).unwrap().0;
        me += 1;
    }
    if me > 0 {
        factors.push((t, me));
    }
    if rest.degree() >= 1 {
        for r in irreducibles_up_to(rest.degree(), &f.field)? {
            if r.degree() > rest.degree() {
                break;
            }
            let mut m = 0;
            while r.divides(&rest) {
                rest = rest.divmod(&r).unwrap().0;
                m += 1;
            }
            if m > 0 {
                factors.push((r, m));
            }
            if rest.degree() == 0 {
                break;
            }
        }
    }
    debug_assert_eq!(rest.degree(), 0);
    Ok((unit, factors))
}

/// The star involution on monic irreducibles other than t:
/// r*(t) = t^deg(r) / sigma(r(0)) * sum_i sigma(a_i) t^(-i),
/// with sigma the Frobenius for the Hermitian case and the identity otherwise.
pub fn star(r: &PolyFq, hermitian: bool) -> Result<PolyFq> {
    if !r.is_monic() || r.degree() == 0 || r.coeff(0) == 0 {
        return Err(Error::InvalidInput(
            "star requires a monic irreducible different from t".into(),
        ));
    }
    let f = &r.field;
    let n = r.degree();
    let c0 = f.sigma(r.coeff(0), hermitian);
    let c0_inv = f.inv(c0)?;
    let coeffs: Vec<Scalar> = (0..=n)
        .map(|j| f.mul(f.sigma(r.coeff(n - j), hermitian), c0_inv))
        .collect();
    Ok(PolyFq::new(r.field.clone(), coeffs))
}

/// Companion matrix columns of a monic polynomial; used by matfq to build
/// class representatives.
pub fn companion_columns(p: &PolyFq) -> Vec<Vec<Scalar>> {
    let n = p.degree();
    let f = &p.field;
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut col = vec![0; n];
        if j + 1 < n {
            col[j + 1] = 1;
        } else {
            for (i, c) in col.iter_mut().enumerate() {
                *c = f.neg(p.coeff(i));
            }
        }
        cols.push(col);
    }
    cols
}

/// Number of monic irreducibles of degree exactly d over F_q by the necklace
/// formula; test oracle for the sieve.
pub fn necklace_count(q: u64, d: u64) -> u64 {
    let mobius = |n: u64| -> i64 {
        let mut n = n;
        let mut m = 1i64;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                m = -m;
            }
            p += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    };
    let mut acc: i64 = 0;
    for e in 1..=d {
        if d % e == 0 {
            acc += mobius(e) * (q.pow((d / e) as u32) as i64);
        }
    }
    (acc as u64) / d
}

pub fn field_of(ps: &[PolyFq]) -> Option<Arc<FieldSpec>> {
    ps.first().map(|p| p.field.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;

    fn f2() -> Field {
        field_make(2, 1).unwrap()
    }
    fn f3() -> Field {
        field_make(3, 1).unwrap()
    }
    fn f4() -> Field {
        field_make(2, 2).unwrap()
    }

    #[test]
    fn char2_square() {
        let tp1 = PolyFq::new(f2(), vec![1, 1]);
        let sq = tp1.mul(&tp1);
        assert_eq!(sq.coeffs(), &[1, 0, 1]); // t^2 + 1
    }

    #[test]
    fn gcd_monic() {
        // gcd(t^2 - 1, t - 1) over F_3 = t - 1 = t + 2
        let a = PolyFq::new(f3(), vec![2, 0, 1]);
        let b = PolyFq::new(f3(), vec![2, 1]);
        assert_eq!(a.gcd(&b), b.make_monic());
    }

    #[test]
    fn divmod_t_cubed() {
        let t3 = PolyFq::new(f2(), vec![0, 0, 0, 1]);
        let t = PolyFq::t(f2());
        let (q, r) = t3.divmod(&t).unwrap();
        assert_eq!(q.coeffs(), &[0, 0, 1]);
        assert!(r.is_zero());
    }

    #[test]
    fn sieve_small() {
        let irr = irreducibles_up_to(2, &f2()).unwrap();
        let strs: Vec<String> = irr.iter().map(|p| p.to_string()).collect();
        assert_eq!(strs, vec!["t+1", "t^2+t+1"]);
        let irr3 = irreducibles_up_to(3, &f2()).unwrap();
        let strs: Vec<String> = irr3.iter().map(|p| p.to_string()).collect();
        assert_eq!(strs, vec!["t+1", "t^2+t+1", "t^3+t+1", "t^3+t^2+1"]);
        let irr = irreducibles_up_to(1, &f3()).unwrap();
        let strs: Vec<String> = irr.iter().map(|p| p.to_string()).collect();
        assert_eq!(strs, vec!["t+1", "t+2"]);
    }

    #[test]
    fn sieve_matches_necklace_counts() {
        for q in [2u64, 3, 4] {
            let field = match q {
                2 => f2(),
                3 => f3(),
                _ => f4(),
            };
            let irr = irreducibles_up_to(5, &field).unwrap();
            for d in 1..=5u64 {
                let got = irr.iter().filter(|p| p.degree() == d as usize).count() as u64;
                let want = necklace_count(q, d) - if d == 1 { 1 } else { 0 }; // t excluded
                assert_eq!(got, want, "irreducible count q={q} d={d}");
            }
        }
    }

    #[test]
    fn factor_examples() {
        // t^2+1 over F_2 = (t+1)^2
        let (u, fs) = factor(&PolyFq::new(f2(), vec![1, 0, 1])).unwrap();
        assert_eq!(u, 1);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].0.to_string(), "t+1");
        assert_eq!(fs[0].1, 2);
        // t^2+1 irreducible over F_3
        let (_, fs) = factor(&PolyFq::new(f3(), vec![1, 0, 1])).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].1, 1);
        assert_eq!(fs[0].0.degree(), 2);
        // t^3 - 1 = (t-1)^3 over F_3
        let (_, fs) = factor(&PolyFq::new(f3(), vec![2, 0, 0, 1])).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].0.to_string(), "t+2");
        assert_eq!(fs[0].1, 3);
        assert!(factor(&PolyFq::zero(f2())).is_err());
    }

    #[test]
    fn factor_roundtrip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for field in [f2(), f3(), f4()] {
            for _ in 0..1000 {
                let deg = rng.gen_range(1..=8);
                let mut c: Vec<Scalar> =
                    (0..deg).map(|_| rng.gen_range(0..field.q) as Scalar).collect();
                c.push(1);
                let lead = 1 + rng.gen_range(0..field.q - 1) as Scalar;
                let p = PolyFq::new(field.clone(), c).scale(lead);
                let (unit, fs) = factor(&p).unwrap();
                let mut prod = PolyFq::constant(field.clone(), unit);
                for (r, m) in &fs {
                    assert!(r.is_monic());
                    prod = prod.mul(&r.pow(*m));
                }
                assert_eq!(prod, p);
            }
        }
    }

    #[test]
    fn star_fixes_t_minus_one() {
        for field in [f2(), f3()] {
            let tm1 = PolyFq::t_minus_one(field);
            assert_eq!(star(&tm1, false).unwrap(), tm1);
        }
        let tm1 = PolyFq::t_minus_one(f4());
        assert_eq!(star(&tm1, true).unwrap(), tm1);
    }

    #[test]
    fn star_is_involution() {
        // plain star on F_3 irreducibles
        for r in irreducibles_up_to(4, &f3()).unwrap() {
            let s = star(&r, false).unwrap();
            assert!(s.is_monic());
            assert_eq!(s.degree(), r.degree());
            assert_eq!(star(&s, false).unwrap(), r);
        }
        // hermitian star over F_4 (exhaustive over quadratics too)
        for r in irreducibles_up_to(4, &f4()).unwrap() {
            let s = star(&r, true).unwrap();
            assert_eq!(star(&s, true).unwrap(), r, "star^2 != id at {r}");
        }
        let tp1 = PolyFq::new(f3(), vec![1, 1]);
        assert_eq!(star(&tp1, false).unwrap(), tp1);
    }

    #[test]
    fn print_parse_roundtrip() {
        for field in [f2(), f3(), f4()] {
            for p in irreducibles_up_to(3, &field).unwrap() {
                let s = p.to_string();
                assert_eq!(parse_poly(&field, &s).unwrap(), p, "roundtrip {s}");
            }
        }
        assert!(parse_poly(&f2(), "t^2+5").is_err());
        assert!(parse_poly(&f2(), "").is_err());
    }
}
