//! Centre of the integral group algebra at fixed rank: class sums, products
//! of class sums, and the structure constants a_{mu nu}^lambda(n).
//!
//! Two routes compute a product expansion. The table route loops over the
//! smaller class with the dense element-to-class array. The type route (GL
//! only) enumerates one class by conjugation-orbit closure and tests
//! membership by type equality, which scales to ranks where the full table
//! is out of budget; the two routes are pinned against each other at small
//! rank.

use std::collections::{BTreeMap, HashSet};

use num::{BigInt, One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::centrformulas::{gl_centralizer_size, gl_order};
use crate::error::{Error, Result};
use crate::fqpoly;
use crate::gf::{Field, Scalar};
use crate::groups::{GroupCtx, GroupKey, GroupTable};
use crate::matfq::{representative_of_type, MatFq, TypeCtx};
use crate::types::{Family, Multipartition, Partition, PolyKey, StableLabel};

/// Sparse vector in the centre, coordinates over class sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentreVector {
    pub key: GroupKey,
    pub coeffs: BTreeMap<u32, BigInt>,
}

impl CentreVector {
    pub fn zero(key: GroupKey) -> Self {
        CentreVector { key, coeffs: BTreeMap::new() }
    }

    pub fn single(key: GroupKey, cid: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(cid, BigInt::one());
        CentreVector { key, coeffs }
    }

    pub fn coeff(&self, cid: u32) -> BigInt {
        self.coeffs.get(&cid).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }
}

/// Sparse vector in the full group algebra, coordinates over elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraVector {
    pub key: GroupKey,
    pub coeffs: BTreeMap<u32, BigInt>,
}

impl GroupAlgebraVector {
    pub fn zero(key: GroupKey) -> Self {
        GroupAlgebraVector { key, coeffs: BTreeMap::new() }
    }

    pub fn add_to(&mut self, idx: u32, c: &BigInt) {
        let e = self.coeffs.entry(idx).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&idx);
        }
    }

    /// Convolution product in the group algebra.
    pub fn mul(&self, other: &Self, table: &GroupTable) -> Self {
        let mut out = GroupAlgebraVector::zero(self.key);
        for (&i, a) in &self.coeffs {
            let gi = table.el(i);
            for (&j, b) in &other.coeffs {
                let gj = table.el(j);
                let k = table.index_of(gi.mul(&gj).pack_u64()).expect("closure");
                out.add_to(k, &(a * b));
            }
        }
        out
    }

    /// Projects onto the class-sum basis; None if not constant on classes.
    pub fn to_class_vector(&self, ctx: &GroupCtx) -> Result<Option<CentreVector>> {
        let ct = ctx.classes(self.key.family, self.key.q, self.key.level)?;
        let mut per_class: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (&i, c) in &self.coeffs {
            let cid = ct.class_of[i as usize];
            match per_class.get(&cid) {
                None => {
                    per_class.insert(cid, c.clone());
                }
                Some(prev) if prev == c => {}
                Some(_) => return Ok(None),
            }
        }
        // classes partially covered are not class-sum combinations
        for (&cid, _) in per_class.iter() {
            let size = ct.classes[cid as usize].size;
            let covered = self
                .coeffs
                .iter()
                .filter(|(&i, _)| ct.class_of[i as usize] == cid)
                .count() as u64;
            if covered != size {
                return Ok(None);
            }
        }
        Ok(Some(CentreVector { key: self.key, coeffs: per_class }))
    }

    /// Checks v g = g v for `samples` deterministically seeded random g.
    pub fn verify_central(&self, table: &GroupTable, samples: usize, seed: u64) -> bool {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let gi = rng.gen_range(0..table.order()) as u32;
            let g = table.el(gi);
            let mut left: BTreeMap<u32, BigInt> = BTreeMap::new();
            let mut right: BTreeMap<u32, BigInt> = BTreeMap::new();
            for (&i, c) in &self.coeffs {
                let x = table.el(i);
                let xg = table.index_of(x.mul(&g).pack_u64()).unwrap();
                let gx = table.index_of(g.mul(&x).pack_u64()).unwrap();
                *left.entry(xg).or_insert_with(BigInt::zero) += c;
                *right.entry(gx).or_insert_with(BigInt::zero) += c;
            }
            if left != right {
                return false;
            }
        }
        true
    }
}

/// The class sum of the class realizing `label` at the given level, or the
/// zero vector when no class matches (including when the modified type does
/// not fit at this rank).
pub fn class_sum(ctx: &GroupCtx, label: &StableLabel, level: usize) -> Result<CentreVector> {
    let key = GroupKey { family: label.family, q: label.q, level };
    let ct = ctx.classes(label.family, label.q, level)?;
    match ct.by_label(label) {
        Some(cid) => Ok(CentreVector::single(key, cid)),
        None => Ok(CentreVector::zero(key)),
    }
}

/// Product of two class sums by the counting rule: the coefficient of class
/// gamma with representative z is |{x in alpha : x^-1 z in beta}|.
pub fn centre_product(
    ctx: &GroupCtx,
    family: Family,
    q: u64,
    level: usize,
    a: u32,
    b: u32,
) -> Result<CentreVector> {
    let table = ctx.group(family, q, level)?;
    let ct = ctx.classes(family, q, level)?;
    let key = GroupKey { family, q, level };
    // loop over the smaller factor; valid because the centre is commutative
    let (small, other) = if ct.classes[a as usize].size <= ct.classes[b as usize].size {
        (a, b)
    } else {
        (b, a)
    };
    let members = ct.members(small);
    let reps: Vec<MatFq> = ct
        .classes
        .iter()
        .map(|c| MatFq::unpack_u64(table.field.clone(), table.dim, table.dim, c.min_rep))
        .collect();
    let ncl = ct.classes.len();
    let tallies: Vec<u64> = members
        .par_chunks(512)
        .map(|chunk| {
            let mut t = vec![0u64; ncl];
            for &xi in chunk {
                let x = table.el(xi);
                let xinv = x.inv().expect("group element");
                for (g, z) in reps.iter().enumerate() {
                    let y = xinv.mul(z);
                    let yi = table.index_of(y.pack_u64()).expect("closure");
                    if ct.class_of[yi as usize] == other {
                        t[g] += 1;
                    }
                }
            }
            t
        })
        .reduce(
            || vec![0u64; ncl],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );
    // mass check: sum of coeff * |class| = |alpha| * |beta|
    let mass: u64 = tallies
        .iter()
        .zip(&ct.classes)
        .map(|(&c, info)| c * info.size)
        .sum();
    if mass != ct.classes[a as usize].size * ct.classes[b as usize].size {
        return Err(Error::InvalidInput("mass check failed in centre product".into()));
    }
    let mut coeffs = BTreeMap::new();
    for (g, &c) in tallies.iter().enumerate() {
        if c > 0 {
            coeffs.insert(g as u32, BigInt::from(c));
        }
    }
    Ok(CentreVector { key, coeffs })
}

/// Bilinear product of centre vectors.
pub fn centre_vector_product(
    ctx: &GroupCtx,
    v: &CentreVector,
    w: &CentreVector,
) -> Result<CentreVector> {
    let key = v.key;
    let mut out: BTreeMap<u32, BigInt> = BTreeMap::new();
    for (&a, ca) in &v.coeffs {
        for (&b, cb) in &w.coeffs {
            let p = centre_product(ctx, key.family, key.q, key.level, a, b)?;
            for (g, c) in p.coeffs {
                let e = out.entry(g).or_insert_with(BigInt::zero);
                *e += c * ca * cb;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(CentreVector { key, coeffs: out })
}

/// One term of a product expansion.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionTerm {
    pub lambda: String,
    pub coeff: String,
}

/// JSON-facing product expansion.
#[derive(Debug, Clone, Serialize)]
pub struct ProductExpansion {
    pub mu: String,
    pub nu: String,
    pub n: usize,
    pub terms: Vec<ExpansionTerm>,
}

/// Full expansion of X_mu X_nu at a rank, keyed by stable labels of the
/// support. Dispatches to the table route or the GL type route depending on
/// the group order.
pub fn expansion(
    ctx: &GroupCtx,
    family: Family,
    q: u64,
    level: usize,
    mu: &StableLabel,
    nu: &StableLabel,
) -> Result<BTreeMap<StableLabel, BigInt>> {
    use num::ToPrimitive;
    if family == Family::Gl {
        let order = gl_order(level as u64, q);
        if order.to_u64().is_none_or(|o| o > ctx.table_threshold) {
            return gl_expansion_typed(ctx, q, level, mu, nu);
        }
    }
    let ct = ctx.classes(family, q, level)?;
    let (Some(a), Some(b)) = (ct.by_label(mu), ct.by_label(nu)) else {
        return Ok(BTreeMap::new()); // an empty factor kills the product
    };
    let prod = centre_product(ctx, family, q, level, a, b)?;
    let mut out = BTreeMap::new();
    for (cid, c) in prod.coeffs {
        out.insert(ct.classes[cid as usize].label.clone(), c);
    }
    Ok(out)
}

/// The single structure constant a_{mu nu}^lambda(level).
pub fn structure_constant(
    ctx: &GroupCtx,
    mu: &StableLabel,
    nu: &StableLabel,
    lambda: &StableLabel,
    level: usize,
) -> Result<BigInt> {
    let exp = expansion(ctx, mu.family, mu.q, level, mu, nu)?;
    Ok(exp.get(lambda).cloned().unwrap_or_else(BigInt::zero))
}

/// Whether the label resolves to a (possibly empty) class at this rank; for
/// fits this distinguishes "coefficient is zero" from "basis vector absent".
pub fn label_realized(
    ctx: &GroupCtx,
    label: &StableLabel,
    level: usize,
) -> Result<bool> {
    if label.family == Family::Gl {
        let field = ctx.matrix_field(Family::Gl, label.q)?;
        let tm1 = PolyKey::t_minus_one(&field);
        Ok(label.index == 0
            && label
                .modified
                .from_modified(&tm1, level as u64)
                .is_some())
    } else {
        let ct = ctx.classes(label.family, label.q, level)?;
        Ok(ct.by_label(label).is_some())
    }
}

// ---------------------------------------------------------------------------
// GL type route
// ---------------------------------------------------------------------------

/// Standard generating set of GL_n(F_q): a primitive diagonal, the cycle
/// permutation, and one elementary transvection.
fn gl_generators(field: &Field, n: usize) -> Vec<MatFq> {
    let mut gens = Vec::new();
    let prim = (2..field.q as Scalar)
        .chain(std::iter::once(1))
        .find(|&g| {
            // multiplicative order q-1
            let mut ord = 1u64;
            let mut x = g;
            while x != 1 {
                x = field.mul(x, g);
                ord += 1;
            }
            ord == field.q - 1
        })
        .unwrap();
    let mut d = MatFq::identity(field.clone(), n);
    d.set(0, 0, prim);
    gens.push(d);
    if n >= 2 {
        let mut p = MatFq::zero(field.clone(), n, n);
        for i in 0..n {
            p.set(i, (i + 1) % n, 1);
        }
        gens.push(p);
        let mut e = MatFq::identity(field.clone(), n);
        e.set(0, 1, 1);
        gens.push(e);
    }
    gens
}

/// Conjugation-orbit closure from a representative; the caller must check the
/// resulting size against the centralizer formula.
fn class_orbit(field: &Field, n: usize, rep: &MatFq) -> Vec<u64> {
    let gens: Vec<(MatFq, MatFq)> = gl_generators(field, n)
        .into_iter()
        .map(|g| {
            let gi = g.inv().unwrap();
            (g, gi)
        })
        .collect();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut stack = vec![rep.pack_u64()];
    seen.insert(rep.pack_u64());
    while let Some(w) = stack.pop() {
        let x = MatFq::unpack_u64(field.clone(), n, n, w);
        for (g, gi) in &gens {
            let y = g.mul(&x).mul(gi).pack_u64();
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    let mut v: Vec<u64> = seen.into_iter().collect();
    v.sort_unstable();
    v
}

/// All partitions of m.
pub fn partitions_of(m: u64) -> Vec<Partition> {
    fn rec(remaining: u64, max: u64, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition::new(cur.clone()));
            return;
        }
        let top = remaining.min(max);
        for p in (1..=top).rev() {
            cur.push(p as u32);
            rec(remaining - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

/// All types (multipartitions) of total size n over the field.
pub fn enumerate_types(field: &Field, n: usize) -> Result<Vec<Multipartition>> {
    let irr = fqpoly::irreducibles_up_to(n.max(1), field)?;
    let keys: Vec<PolyKey> = irr.iter().map(PolyKey::from_poly).collect();
    let mut out = Vec::new();
    fn rec(
        keys: &[PolyKey],
        idx: usize,
        remaining: u64,
        cur: &mut Multipartition,
        out: &mut Vec<Multipartition>,
    ) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        if idx == keys.len() {
            return;
        }
        let d = keys[idx].deg() as u64;
        // empty partition at this key
        rec(keys, idx + 1, remaining, cur, out);
        if d <= remaining {
            for m in 1..=remaining / d {
                for p in partitions_of(m) {
                    cur.insert(keys[idx].clone(), p);
                    rec(keys, idx + 1, remaining - m * d, cur, out);
                }
                cur.insert(keys[idx].clone(), Partition::empty());
            }
        }
    }
    rec(&keys, 0, n as u64, &mut Multipartition::new(), &mut out);
    out.sort();
    Ok(out)
}

/// Type-route expansion for GL at ranks beyond the table budget: enumerate
/// the smaller factor class by orbit closure, test membership by type.
pub fn gl_expansion_typed(
    ctx: &GroupCtx,
    q: u64,
    level: usize,
    mu: &StableLabel,
    nu: &StableLabel,
) -> Result<BTreeMap<StableLabel, BigInt>> {
    let field = ctx.matrix_field(Family::Gl, q)?;
    let tm1 = PolyKey::t_minus_one(&field);
    let n = level as u64;
    let (Some(tmu), Some(tnu)) = (
        mu.modified.from_modified(&tm1, n),
        nu.modified.from_modified(&tm1, n),
    ) else {
        return Ok(BTreeMap::new());
    };
    let order = gl_order(n, q);
    let size = |t: &Multipartition| -> Result<BigInt> {
        Ok(&order / gl_centralizer_size(t, q)?)
    };
    let (size_mu, size_nu) = (size(&tmu)?, size(&tnu)?);
    // enumerate the smaller class
    let (small_t, other_t, small_size) = if size_mu <= size_nu {
        (&tmu, &tnu, size_mu.clone())
    } else {
        (&tnu, &tmu, size_nu.clone())
    };
    let rep = representative_of_type(&field, small_t);
    let alpha = class_orbit(&field, level, &rep);
    if BigInt::from(alpha.len() as u64) != small_size {
        return Err(Error::InvalidInput(
            "orbit closure disagrees with the centralizer formula".into(),
        ));
    }
    let type_ctx = TypeCtx::new(field.clone(), level)?;
    let candidates = enumerate_types(&field, level)?;
    let reps: Vec<MatFq> = candidates
        .iter()
        .map(|t| representative_of_type(&field, t))
        .collect();
    let tallies: Vec<u64> = alpha
        .par_chunks(512)
        .map(|chunk| {
            let mut t = vec![0u64; candidates.len()];
            for &w in chunk {
                let x = MatFq::unpack_u64(field.clone(), level, level, w);
                let xinv = x.inv().expect("invertible");
                for (i, z) in reps.iter().enumerate() {
                    let y = xinv.mul(z);
                    if y.det() != 0 && type_ctx.type_of_fast(&y) == *other_t {
                        t[i] += 1;
                    }
                }
            }
            t
        })
        .reduce(
            || vec![0u64; candidates.len()],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );
    // mass check against the closed-form class sizes
    let mut mass = BigInt::zero();
    for (t, &c) in candidates.iter().zip(&tallies) {
        mass += BigInt::from(c) * size(t)?;
    }
    if mass != &size_mu * &size_nu {
        return Err(Error::InvalidInput("mass check failed in typed product".into()));
    }
    let mut out = BTreeMap::new();
    for (t, &c) in candidates.iter().zip(&tallies) {
        if c > 0 {
            let label = StableLabel::new(Family::Gl, q, t.to_modified(&tm1), 0);
            out.insert(label, BigInt::from(c));
        }
    }
    Ok(out)
}

/// Every structure constant of the level at once:
/// table[gamma][alpha][beta] = a_{alpha beta}^gamma, computed by one sweep of
/// the group per target class gamma.
pub fn full_constants_table(
    ctx: &GroupCtx,
    family: Family,
    q: u64,
    level: usize,
) -> Result<Vec<Vec<Vec<u64>>>> {
    let table = ctx.group(family, q, level)?;
    let ct = ctx.classes(family, q, level)?;
    let ncl = ct.classes.len();
    let inv_idx: Vec<u32> = table
        .els
        .par_iter()
        .map(|&w| {
            let g = MatFq::unpack_u64(table.field.clone(), table.dim, table.dim, w);
            table.index_of(g.inv().expect("group element").pack_u64()).unwrap()
        })
        .collect();
    let mut out = Vec::with_capacity(ncl);
    for gamma in 0..ncl {
        let z = MatFq::unpack_u64(
            table.field.clone(),
            table.dim,
            table.dim,
            ct.classes[gamma].min_rep,
        );
        let tallies: Vec<u64> = (0..table.order() as u32)
            .into_par_iter()
            .fold(
                || vec![0u64; ncl * ncl],
                |mut t, xi| {
                    let xinv = table.el(inv_idx[xi as usize]);
                    let y = xinv.mul(&z);
                    let yi = table.index_of(y.pack_u64()).expect("closure");
                    let a = ct.class_of[xi as usize] as usize;
                    let b = ct.class_of[yi as usize] as usize;
                    t[a * ncl + b] += 1;
                    t
                },
            )
            .reduce(
                || vec![0u64; ncl * ncl],
                |mut x, y| {
                    for (a, b) in x.iter_mut().zip(y) {
                        *a += b;
                    }
                    x
                },
            );
        let rows: Vec<Vec<u64>> =
            (0..ncl).map(|a| tallies[a * ncl..(a + 1) * ncl].to_vec()).collect();
        out.push(rows);
    }
    // mass check for every pair
    for a in 0..ncl {
        for b in 0..ncl {
            let mass: u64 = (0..ncl).map(|g| out[g][a][b] * ct.classes[g].size).sum();
            if mass != ct.classes[a].size * ct.classes[b].size {
                return Err(Error::InvalidInput("mass check failed in full table".into()));
            }
        }
    }
    Ok(out)
}

/// Coefficient independence of the representative choice: recompute the
/// counting rule with alternative representatives of the target class.
pub fn representative_independence_check(
    ctx: &GroupCtx,
    family: Family,
    q: u64,
    level: usize,
    a: u32,
    b: u32,
    g: u32,
    alternates: usize,
    seed: u64,
) -> Result<bool> {
    use rand::{Rng, SeedableRng};
    let table = ctx.group(family, q, level)?;
    let ct = ctx.classes(family, q, level)?;
    let members_g = ct.members(g);
    let members_a = ct.members(a);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let count_with = |z: &MatFq| -> u64 {
        members_a
            .iter()
            .filter(|&&xi| {
                let x = table.el(xi);
                let y = x.inv().unwrap().mul(z);
                let yi = table.index_of(y.pack_u64()).unwrap();
                ct.class_of[yi as usize] == b
            })
            .count() as u64
    };
    let base = count_with(&table.el(members_g[0]));
    for _ in 0..alternates {
        let zi = members_g[rng.gen_range(0..members_g.len())];
        if count_with(&table.el(zi)) != base {
            return Ok(false);
        }
    }
    Ok(true)
}
