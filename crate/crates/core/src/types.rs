//! Partitions, multipartitions, modified types, the Witt ring W(F_q), and the
//! stable class labels used to identify conjugacy classes across ranks.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fqpoly::PolyFq;
use crate::gf::{Field, Scalar};

/// Weakly decreasing list of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(vec![])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.0.iter().map(|&p| p as u64).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Number of parts equal to i.
    pub fn mult(&self, i: u32) -> u32 {
        self.0.iter().filter(|&&p| p == i).count() as u32
    }

    /// n(lambda) = sum (i-1) lambda_i.
    pub fn n_stat(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &p)| i as u64 * p as u64)
            .sum()
    }

    /// Partition whose conjugate has the given column counts c_1 >= c_2 >= ...
    pub fn conjugate_of(cols: &[u32]) -> Self {
        let max = cols.first().copied().unwrap_or(0);
        let parts: Vec<u32> = (1..=max)
            .map(|i| cols.iter().filter(|&&c| c >= i).count() as u32)
            .collect();
        Partition::new(parts)
    }

    /// Appends `d` parts of size 1.
    pub fn with_ones(&self, d: usize) -> Self {
        let mut v = self.0.clone();
        v.extend(std::iter::repeat_n(1, d));
        Partition::new(v)
    }

    /// Subtracts 1 from every part, dropping zeros (first column deletion).
    pub fn strip_column(&self) -> Self {
        Partition::new(self.0.iter().map(|&p| p - 1).collect())
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Summary statistics of one partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionStats {
    pub size: u64,
    pub length: usize,
    pub mult: BTreeMap<u32, u32>,
    pub n_stat: u64,
}

pub fn partition_stats(p: &Partition) -> PartitionStats {
    let mut mult = BTreeMap::new();
    for &x in p.parts() {
        *mult.entry(x).or_insert(0) += 1;
    }
    PartitionStats { size: p.size(), length: p.len(), mult, n_stat: p.n_stat() }
}

/// Canonical key of a monic irreducible polynomial other than t: the
/// coefficient vector (constant term first), ordered by degree then
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyKey {
    coeffs: Vec<Scalar>,
}

impl PolyKey {
    pub fn from_poly(p: &PolyFq) -> Self {
        debug_assert!(p.is_monic() && p.degree() >= 1 && p.coeff(0) != 0);
        PolyKey { coeffs: p.coeffs().to_vec() }
    }

    pub fn t_minus_one(field: &Field) -> Self {
        PolyKey::from_poly(&PolyFq::t_minus_one(field.clone()))
    }

    pub fn to_poly(&self, field: &Field) -> PolyFq {
        PolyFq::new(field.clone(), self.coeffs.clone())
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }
}

impl PartialOrd for PolyKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PolyKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.coeffs.len(), &self.coeffs).cmp(&(other.coeffs.len(), &other.coeffs))
    }
}

impl std::fmt::Display for PolyKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
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

/// Finitely supported map from monic irreducibles (other than t) to
/// partitions; empty partitions are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Multipartition(BTreeMap<PolyKey, Partition>);

impl Multipartition {
    pub fn new() -> Self {
        Multipartition(BTreeMap::new())
    }

    pub fn insert(&mut self, key: PolyKey, part: Partition) {
        if !part.is_empty() {
            self.0.insert(key, part);
        } else {
            self.0.remove(&key);
        }
    }

    pub fn get(&self, key: &PolyKey) -> Option<&Partition> {
        self.0.get(key)
    }

    pub fn part_at(&self, key: &PolyKey) -> Partition {
        self.0.get(key).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PolyKey, &Partition)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of deg(r) * |mu(r)|.
    pub fn size(&self) -> u64 {
        self.0
            .iter()
            .map(|(k, p)| k.deg() as u64 * p.size())
            .sum()
    }

    /// Deletes the first column of the partition at t-1.
    pub fn to_modified(&self, tm1: &PolyKey) -> Multipartition {
        let mut out = self.clone();
        let stripped = out.part_at(tm1).strip_column();
        out.insert(tm1.clone(), stripped);
        out
    }

    /// The unique type of size n with this modified type, when it exists:
    /// adds 1 to each of n - |nu| parts of nu(t-1) (padding with zeros).
    pub fn from_modified(&self, tm1: &PolyKey, n: u64) -> Option<Multipartition> {
        let nu_size = self.size();
        if nu_size > n {
            return None;
        }
        let slots = (n - nu_size) as usize;
        let at_tm1 = self.part_at(tm1);
        if at_tm1.len() > slots {
            return None;
        }
        let mut parts: Vec<u32> = at_tm1.parts().to_vec();
        parts.resize(slots, 0);
        for p in parts.iter_mut() {
            *p += 1;
        }
        let mut out = self.clone();
        out.insert(tm1.clone(), Partition::new(parts));
        Some(out)
    }

    /// Appends d parts of size 1 at t-1.
    pub fn union_t_minus_1(&self, tm1: &PolyKey, d: usize) -> Multipartition {
        let mut out = self.clone();
        let extended = out.part_at(tm1).with_ones(d);
        out.insert(tm1.clone(), extended);
        out
    }

    /// True when mu(r) = mu(r*) for every r in the support.
    pub fn star_symmetric(&self, field: &Field, hermitian: bool) -> bool {
        self.0.iter().all(|(k, p)| {
            let r = k.to_poly(field);
            let rs = crate::fqpoly::star(&r, hermitian).expect("valid key");
            self.part_at(&PolyKey::from_poly(&rs)) == *p
        })
    }
}

impl PartialOrd for Multipartition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Multipartition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.iter().cmp(other.0.iter())
    }
}

impl std::fmt::Display for Multipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, p) in &self.0 {
            if !first {
                write!(f, ";")?;
            }
            first = false;
            write!(f, "{k}:{p}")?;
        }
        Ok(())
    }
}

/// One of the five classical families, or the general linear family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    Gl,
    U,
    Sp,
    OPlus,
    OMinus,
    OOdd,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Gl => "gl",
            Family::U => "u",
            Family::Sp => "sp",
            Family::OPlus => "o+",
            Family::OMinus => "o-",
            Family::OOdd => "oodd",
        }
    }

    pub fn from_tag(s: &str) -> Result<Family> {
        Ok(match s {
            "gl" => Family::Gl,
            "u" => Family::U,
            "sp" => Family::Sp,
            "o+" => Family::OPlus,
            "o-" => Family::OMinus,
            "oodd" => Family::OOdd,
            _ => {
                return Err(Error::ParseError {
                    pos: 0,
                    msg: format!("unknown family tag {s}"),
                })
            }
        })
    }

    /// Matrix dimension of the level-n group.
    pub fn dim_of_level(self, n: usize) -> usize {
        match self {
            Family::Gl | Family::U => n,
            Family::Sp | Family::OPlus | Family::OMinus => 2 * n,
            Family::OOdd => 2 * n + 1,
        }
    }

    /// Dimension increment per level (the block-embed delta).
    pub fn level_dim_step(self) -> usize {
        match self {
            Family::Gl | Family::U => 1,
            _ => 2,
        }
    }

    /// Smallest level at which the standard form exists.
    pub fn base_level(self) -> usize {
        match self {
            Family::OMinus => 1,
            _ => 0,
        }
    }

    pub fn is_hermitian(self) -> bool {
        self == Family::U
    }

    /// Size of the field the matrices live over (q^2 for unitary).
    pub fn matrix_field_size(self, q: u64) -> u64 {
        if self.is_hermitian() {
            q * q
        } else {
            q
        }
    }

    pub fn all() -> [Family; 6] {
        [Family::Gl, Family::U, Family::Sp, Family::OPlus, Family::OMinus, Family::OOdd]
    }
}

/// Element of the Witt ring W(F_q) = {0, 1, delta, omega} of anisotropic
/// germs of symmetric bilinear forms, q odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum WittClass {
    Zero,
    One,
    Delta,
    Omega,
}

impl WittClass {
    /// Dimension mod 2 of the anisotropic space.
    pub fn dim_parity(self) -> usize {
        match self {
            WittClass::Zero | WittClass::Omega => 0,
            WittClass::One | WittClass::Delta => 1,
        }
    }

    /// Germ dimension (0, 1, or 2).
    pub fn germ_dim(self) -> usize {
        match self {
            WittClass::Zero => 0,
            WittClass::One | WittClass::Delta => 1,
            WittClass::Omega => 2,
        }
    }

    /// +1 / -1 convention for even-dimensional germs: the order formula for
    /// O_2n^eps carries the factor (q^n - eps).
    pub fn sign(self) -> Result<i64> {
        match self {
            WittClass::Zero => Ok(1),
            WittClass::Omega => Ok(-1),
            _ => Err(Error::InvalidInput("odd-dimensional germ has no sign".into())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WittClass::Zero => "0",
            WittClass::One => "1",
            WittClass::Delta => "delta",
            WittClass::Omega => "omega",
        }
    }
}

/// Witt-ring addition for a fixed odd q: Klein four-group when q = 1 mod 4,
/// cyclic of order 4 (with 1 + 1 = omega) when q = 3 mod 4.
pub fn witt_add(a: WittClass, b: WittClass, q: u64) -> Result<WittClass> {
    if q % 2 == 0 {
        return Err(Error::IncompatibleFamily("Witt ring needs odd q".into()));
    }
    use WittClass::*;
    if q % 4 == 1 {
        Ok(match (a, b) {
            (Zero, x) | (x, Zero) => x,
            (One, One) | (Delta, Delta) | (Omega, Omega) => Zero,
            (One, Delta) | (Delta, One) => Omega,
            (One, Omega) | (Omega, One) => Delta,
            (Delta, Omega) | (Omega, Delta) => One,
        })
    } else {
        // cyclic: 0 -> 0, 1 -> 1, omega -> 2, delta -> 3
        let idx = |x: WittClass| match x {
            Zero => 0,
            One => 1,
            Omega => 2,
            Delta => 3,
        };
        let back = [Zero, One, Omega, Delta];
        Ok(back[(idx(a) + idx(b)) % 4])
    }
}

/// Stable identifier of a conjugacy class across ranks: family, base q, the
/// modified GL-type, and a disambiguation index for classical-group classes
/// sharing a GL-type (always 0 in the GL family).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StableLabel {
    pub family: Family,
    pub q: u64,
    pub modified: Multipartition,
    pub index: u32,
}

impl StableLabel {
    pub fn new(family: Family, q: u64, modified: Multipartition, index: u32) -> Self {
        debug_assert!(family != Family::Gl || index == 0);
        StableLabel { family, q, modified, index }
    }
}

impl std::fmt::Display for StableLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},q={};{}", self.family.tag(), self.q, self.modified)?;
        if self.index > 0 {
            write!(f, "#{}", self.index)?;
        }
        Ok(())
    }
}

/// Parses the label grammar `family,q=Q;poly:(p1,p2,...);...[#k]`.
pub fn label_parse(s: &str) -> Result<StableLabel> {
    let err = |pos: usize, msg: &str| Error::ParseError { pos, msg: msg.to_string() };
    let semi = s.find(';').ok_or_else(|| err(s.len(), "missing ';' after header"))?;
    let header = &s[..semi];
    let comma = header.find(',').ok_or_else(|| err(0, "missing ',' in header"))?;
    let family = Family::from_tag(&header[..comma])?;
    let qpart = &header[comma + 1..];
    let q: u64 = qpart
        .strip_prefix("q=")
        .ok_or_else(|| err(comma + 1, "expected q="))?
        .parse()
        .map_err(|_| err(comma + 3, "bad q"))?;
    let mut rest = &s[semi + 1..];
    let mut index = 0u32;
    if let Some(hash) = rest.rfind('#') {
        index = rest[hash + 1..]
            .parse()
            .map_err(|_| err(semi + 1 + hash + 1, "bad disambiguation index"))?;
        rest = &rest[..hash];
    }
    let field_size = family.matrix_field_size(q);
    let mut modified = Multipartition::new();
    if !rest.is_empty() {
        for entry in rest.split(';') {
            let colon = entry
                .find(':')
                .ok_or_else(|| err(semi + 1, "missing ':' in entry"))?;
            let coeffs = parse_poly_key(&entry[..colon], field_size)?;
            let ptxt = &entry[colon + 1..];
            let inner = ptxt
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| err(semi + 1 + colon, "partition must be parenthesized"))?;
            let parts: Vec<u32> = if inner.is_empty() {
                vec![]
            } else {
                inner
                    .split(',')
                    .map(|t| t.parse().map_err(|_| err(semi + 1, "bad part")))
                    .collect::<Result<_>>()?
            };
            modified.insert(coeffs, Partition::new(parts));
        }
    }
    Ok(StableLabel { family, q, modified, index })
}

/// Parses a canonical polynomial string into a key, validating coefficient
/// indices against the field size.
fn parse_poly_key(s: &str, field_size: u64) -> Result<PolyKey> {
    let err = |msg: &str| Error::ParseError { pos: 0, msg: msg.to_string() };
    let mut coeffs: Vec<Scalar> = vec![];
    for term in s.split('+') {
        let (cstr, k) = match term.find('t') {
            None => (term, 0usize),
            Some(ti) => {
                let rest = &term[ti + 1..];
                let k = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(|| err("expected ^"))?
                        .parse::<usize>()
                        .map_err(|_| err("bad exponent"))?
                };
                (&term[..ti], k)
            }
        };
        let c: Scalar = if cstr.is_empty() {
            1
        } else {
            cstr.parse().map_err(|_| err("bad coefficient"))?
        };
        if (c as u64) >= field_size {
            return Err(err("coefficient out of range"));
        }
        if coeffs.len() <= k {
            coeffs.resize(k + 1, 0);
        }
        coeffs[k] = c;
    }
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    if coeffs.len() < 2 || coeffs.last() != Some(&1) || coeffs[0] == 0 {
        return Err(err("not a monic irreducible key different from t"));
    }
    Ok(PolyKey { coeffs })
}
