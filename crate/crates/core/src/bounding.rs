//! Bounding triples (GL) and bounding pairs (classical groups) at finite
//! truncation: products, conjugation, standard shape, the specialization maps
//! Psi_n, and brute-force verification of the closed-form orbit counts that
//! drive the interpolation theorems.
//!
//! A triple (W, g, V) at truncation m stands for (W + tail, g + Id, V + tail)
//! in the infinite picture, where tail is the span of e_{m+1}, e_{m+2}, ...;
//! a pair (g, V) at level n stands likewise with the tail V_n^perp.

use std::collections::{BTreeMap, HashMap};

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::Serialize;

use crate::classalg::GroupAlgebraVector;
use crate::error::{Error, Result};
use crate::forms::{form_perp, witt_decompose, FormSpec};
use crate::gf::Scalar;
use crate::groups::{GroupCtx, GroupKey, GroupTable};
use crate::matfq::{enumerate_subspaces, representative_of_type, type_of, MatFq, Subspace};
use crate::qcombinat::{q_binomial, QValue};
use crate::types::{witt_add, Family, Multipartition, PolyKey, WittClass};

// ---------------------------------------------------------------------------
// bounding triples
// ---------------------------------------------------------------------------

/// (W, g, V) at truncation m: g fixes V pointwise, g^T fixes W pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundingTriple {
    pub m: usize,
    pub w: Subspace,
    pub g: MatFq,
    pub v: Subspace,
}

pub type TripleKey = ((usize, Vec<Scalar>), u64, (usize, Vec<Scalar>));

impl BoundingTriple {
    pub fn new(w: Subspace, g: MatFq, v: Subspace) -> Result<Self> {
        let m = g.nrows;
        if w.ambient != m || v.ambient != m || !g.is_square() {
            return Err(Error::DimensionMismatch("triple pieces disagree".into()));
        }
        let gt = g.transpose();
        for row in v.basis_rows() {
            if g.mul_vec(&row) != row {
                return Err(Error::InvalidInput("g does not fix V pointwise".into()));
            }
        }
        for row in w.basis_rows() {
            if gt.mul_vec(&row) != row {
                return Err(Error::InvalidInput("g^T does not fix W pointwise".into()));
            }
        }
        Ok(BoundingTriple { m, w, g, v })
    }

    /// The unique tight triple of g: V = ker(g - 1), W = ker(g^T - 1).
    pub fn tight(g: &MatFq) -> Result<Self> {
        if g.det() == 0 {
            return Err(Error::Singular);
        }
        let id = MatFq::identity(g.field.clone(), g.nrows);
        let v = g.sub(&id).kernel();
        let w = g.transpose().sub(&id).kernel();
        BoundingTriple::new(w, g.clone(), v)
    }

    pub fn key(&self) -> TripleKey {
        (self.w.key(), self.g.pack_u64(), self.v.key())
    }

    /// Membership in BT_n: the tail from n is contained in both subspaces and
    /// g is an identity extension beyond n.
    pub fn in_btn(&self, n: usize) -> bool {
        if n > self.m {
            return false;
        }
        let tail = Subspace::coordinate_tail(self.g.field.clone(), self.m, n);
        self.g.is_identity_beyond(n)
            && self.w.contains_subspace(&tail)
            && self.v.contains_subspace(&tail)
    }

    /// Smallest n with membership in BT_n.
    pub fn min_level(&self) -> usize {
        (0..=self.m).find(|&n| self.in_btn(n)).expect("in BT_m by construction")
    }

    /// Re-expresses the triple at a larger truncation.
    pub fn express_at(&self, m2: usize) -> Self {
        assert!(m2 >= self.m);
        BoundingTriple {
            m: m2,
            w: self.w.extend_ambient(m2, true),
            g: self.g.block_embed(m2 - self.m),
            v: self.v.extend_ambient(m2, true),
        }
    }

    /// Re-expresses at a smaller truncation n (requires membership in BT_n).
    pub fn shrink_to(&self, n: usize) -> Result<Self> {
        if !self.in_btn(n) {
            return Err(Error::NotInBTn(n));
        }
        let shrink = |s: &Subspace| {
            let head = s.restrict_to_first(n);
            let rows: Vec<Vec<Scalar>> = head
                .basis_rows()
                .into_iter()
                .map(|r| r[..n].to_vec())
                .collect();
            Subspace::from_rows(self.g.field.clone(), n, rows)
        };
        BoundingTriple::new(shrink(&self.w), self.g.block_restrict(n)?, shrink(&self.v))
    }

    pub fn normalize_truncation(&self, m: usize) -> Result<Self> {
        if m >= self.m {
            Ok(self.express_at(m))
        } else {
            self.shrink_to(m)
        }
    }

    /// (W1 cap W2, g1 g2, V1 cap V2) at the common truncation.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let m = self.m.max(other.m);
        let a = self.express_at(m);
        let b = other.express_at(m);
        BoundingTriple::new(a.w.intersect(&b.w), a.g.mul(&b.g), a.v.intersect(&b.v))
    }

    /// Conjugation x . (W, g, V) = (x^-T W, x g x^-1, x V).
    pub fn conjugate(&self, x: &MatFq) -> Result<Self> {
        let xi = x.inv()?;
        BoundingTriple::new(
            self.w.map_by(&xi.transpose()),
            x.mul(&self.g).mul(&xi),
            self.v.map_by(x),
        )
    }

    /// Invariants of Proposition-4.8 shape at level n.
    pub fn invariants(&self, n: usize) -> Result<TripleInvariants> {
        if !self.in_btn(n) {
            return Err(Error::NotInBTn(n));
        }
        let a = self.w.intersect(&self.v.perp_dot()).dim();
        let b = self.v.intersect(&self.w.perp_dot()).dim();
        let wn = self.w.restrict_to_first(n);
        let vn = self.v.restrict_to_first(n);
        let c = pairing_rank(&wn, &vn);
        let essential = n - c;
        let g_n = self.g.block_restrict(n)?;
        let type_n = type_of(&g_n)?;
        let tm1 = PolyKey::t_minus_one(&self.g.field);
        let type_ess = remove_ones(&type_n, &tm1, c)?;
        let (k, h) = crate::centrformulas::kh_of(&type_ess, &tm1);
        Ok(TripleInvariants {
            a,
            b,
            c,
            level: n,
            essential,
            k,
            h,
            type_ess: type_ess.clone(),
            modified: type_ess.to_modified(&tm1),
        })
    }

    /// The conjugator of Proposition 4.8: x in GL_n with x . triple in
    /// standard shape.
    pub fn standard_shape_conjugator(&self, n: usize) -> Result<MatFq> {
        if !self.in_btn(n) {
            return Err(Error::NotInBTn(n));
        }
        let field = self.g.field.clone();
        let m = self.m;
        // U2 = V cap W^perp, U3 = complement of U2 in V containing the tail,
        // U1 = complement of V inside F^n
        let u2 = self.v.intersect(&self.w.perp_dot());
        let mut acc = EchBasis::new(field.clone(), m);
        for r in u2.basis_rows() {
            acc.insert(&r);
        }
        let mut u3: Vec<Vec<Scalar>> = Vec::new();
        for i in n..m {
            let mut e = vec![0; m];
            e[i] = 1;
            if acc.insert(&e) {
                u3.push(e);
            }
        }
        for r in self.v.basis_rows() {
            if acc.insert(&r) {
                u3.push(r);
            }
        }
        let mut accv = EchBasis::new(field.clone(), m);
        for r in self.v.basis_rows() {
            accv.insert(&r);
        }
        let mut u1: Vec<Vec<Scalar>> = Vec::new();
        for i in 0..n {
            let mut e = vec![0; m];
            e[i] = 1;
            if accv.insert(&e) {
                u1.push(e);
            }
        }
        // x'' = inverse of [U1 | U2 | U3-head | tail] as columns; U3's rows
        // are the tail units first, so reorder: head vectors then tail
        let mut cols: Vec<Vec<Scalar>> = Vec::new();
        cols.extend(u1.iter().cloned());
        cols.extend(u2.basis_rows());
        let (u3_tail, u3_head): (Vec<_>, Vec<_>) =
            u3.into_iter().partition(|r| r.iter().take(n).all(|&x| x == 0));
        cols.extend(u3_head);
        cols.extend(u3_tail);
        if cols.len() != m {
            return Err(Error::InvalidInput("basis assembly failed".into()));
        }
        let mmat = MatFq::from_fn(field.clone(), m, m, |i, j| cols[j][i]);
        let x2 = mmat.inv()?;
        // after x'': V'' = span(e_{r+1},...), W'' = x''^-T W
        let w2 = self.w.map_by(&x2.inv_t()?);
        let r = u1.len();
        let a = self.w.intersect(&self.v.perp_dot()).dim();
        // Y = (x')^-T: block upper wrt r, maps W'' head to E1 and the rest
        // of W'' cap F^n to E4's head
        let w2_r = {
            let s = w2.restrict_to_first(r);
            s.basis_rows()
        };
        if w2_r.len() != a {
            return Err(Error::InvalidInput("standard shape: a mismatch".into()));
        }
        let w2_n = w2.restrict_to_first(n);
        let mut acc2 = EchBasis::new(field.clone(), m);
        let mut w_head = Vec::new();
        for rrow in &w2_r {
            acc2.insert(rrow);
            w_head.push(rrow.clone());
        }
        let mut w_rest = Vec::new();
        for rrow in w2_n.basis_rows() {
            if acc2.insert(&rrow) {
                w_rest.push(rrow);
            }
        }
        let c = w_rest.len();
        // assemble Y^-1 columns
        let mut ycols: Vec<Option<Vec<Scalar>>> = vec![None; m];
        for (i, wv) in w_head.iter().enumerate() {
            ycols[i] = Some(wv.clone());
        }
        for (i, wv) in w_rest.iter().enumerate() {
            ycols[n - c + i] = Some(wv.clone());
        }
        // fill columns a..r with F^r completions, r..n-c with F^n completions,
        // beyond n with units
        let mut acc3 = EchBasis::new(field.clone(), m);
        for col in ycols.iter().flatten() {
            acc3.insert(col);
        }
        for j in a..r {
            let mut found = None;
            for cand in 0..r {
                let mut e = vec![0; m];
                e[cand] = 1;
                if acc3.insert(&e) {
                    found = Some(e);
                    break;
                }
            }
            ycols[j] = Some(found.ok_or_else(|| {
                Error::InvalidInput("cannot complete F^r basis".into())
            })?);
        }
        for j in r..n - c {
            let mut found = None;
            for cand in 0..n {
                let mut e = vec![0; m];
                e[cand] = 1;
                if acc3.insert(&e) {
                    found = Some(e);
                    break;
                }
            }
            ycols[j] = Some(found.ok_or_else(|| {
                Error::InvalidInput("cannot complete F^n basis".into())
            })?);
        }
        for (j, yc) in ycols.iter_mut().enumerate().take(m).skip(n) {
            let mut e = vec![0; m];
            e[j] = 1;
            *yc = Some(e);
        }
        let yinv = MatFq::from_fn(field.clone(), m, m, |i, j| ycols[j].as_ref().unwrap()[i]);
        let x1 = yinv.transpose(); // x' = (Y^-1)^T since Y = (x')^-T
        Ok(x1.mul(&x2))
    }
}

/// Standard-shape invariants (a, b, c at the level) plus the essential level
/// n - c and the (h, k) data of the type there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleInvariants {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub level: usize,
    pub essential: usize,
    pub k: u64,
    pub h: u64,
    pub type_ess: Multipartition,
    pub modified: Multipartition,
}

impl TripleInvariants {
    /// The exponent 2k - a - b - h, asserted nonnegative elsewhere.
    pub fn exponent(&self) -> i64 {
        2 * self.k as i64 - self.a as i64 - self.b as i64 - self.h as i64
    }
}

fn pairing_rank(w: &Subspace, v: &Subspace) -> usize {
    if w.dim() == 0 || v.dim() == 0 {
        return 0;
    }
    let wb = w.basis();
    let vb = v.basis();
    let pairing = wb.mul(&vb.transpose());
    pairing.rank()
}

fn remove_ones(mp: &Multipartition, tm1: &PolyKey, c: usize) -> Result<Multipartition> {
    let part = mp.part_at(tm1);
    if (part.mult(1) as usize) < c {
        return Err(Error::InvalidInput(
            "cannot remove more unit parts than present".into(),
        ));
    }
    let mut parts: Vec<u32> = part.parts().to_vec();
    for _ in 0..c {
        let pos = parts.iter().rposition(|&p| p == 1).unwrap();
        parts.remove(pos);
    }
    let mut out = mp.clone();
    out.insert(tm1.clone(), crate::types::Partition::new(parts));
    Ok(out)
}

/// Incremental echelon basis for extending independent sets.
struct EchBasis {
    field: crate::gf::Field,
    rows: Vec<Vec<Scalar>>,
    #[allow(dead_code)]
    ambient: usize,
}

impl EchBasis {
    fn new(field: crate::gf::Field, ambient: usize) -> Self {
        EchBasis { field, rows: vec![], ambient }
    }

    fn insert(&mut self, v: &[Scalar]) -> bool {
        let f = &self.field;
        let mut v = v.to_vec();
        for row in &self.rows {
            let lead = row.iter().position(|&x| x != 0).unwrap();
            if v[lead] != 0 {
                let c = f.mul(v[lead], f.inv(row[lead]).unwrap());
                for (a, b) in v.iter_mut().zip(row) {
                    *a = f.sub(*a, f.mul(c, *b));
                }
            }
        }
        if v.iter().any(|&x| x != 0) {
            self.rows.push(v);
            true
        } else {
            false
        }
    }
}

// ---------------------------------------------------------------------------
// triple orbit counting: brute force and the closed-form prediction
// ---------------------------------------------------------------------------

/// Exact size of the orbit of (W, V) under the centralizer of g in GL_m, the
/// coefficient P of the class sum in Psi_m of the orbit indicator. For
/// truncations below the essential level the orbit is verified empty by
/// exhaustive search.
pub fn orbit_count_triple(ctx: &GroupCtx, triple: &BoundingTriple, m: usize) -> Result<u64> {
    let q = triple.g.field.q;
    let n0 = triple.min_level();
    let inv = triple.invariants(n0)?;
    // P is an orbit invariant; put the triple in standard shape first so it
    // lives in BT_essential literally and can be re-truncated anywhere
    let std_triple = triple.conjugate(&triple.standard_shape_conjugator(n0)?)?;
    debug_assert!(std_triple.in_btn(inv.essential));
    if m >= inv.essential {
        let t = std_triple.normalize_truncation(m)?;
        let table = ctx.group(Family::Gl, q, m)?;
        let cent = table.centralizer_elements(&t.g)?;
        let mut seen: std::collections::HashSet<(
            (usize, Vec<Scalar>),
            (usize, Vec<Scalar>),
        )> = std::collections::HashSet::new();
        let mut stack = vec![(t.w.clone(), t.v.clone())];
        seen.insert((t.w.key(), t.v.key()));
        let xs: Vec<(MatFq, MatFq)> = cent
            .iter()
            .map(|&i| {
                let x = table.el(i);
                let xit = x.inv().unwrap().transpose();
                (x, xit)
            })
            .collect();
        while let Some((w, v)) = stack.pop() {
            for (x, xit) in &xs {
                let nw = w.map_by(xit);
                let nv = v.map_by(x);
                if seen.insert((nw.key(), nv.key())) {
                    stack.push((nw, nv));
                }
            }
        }
        Ok(seen.len() as u64)
    } else {
        // zero case: exhaustively confirm no conjugate lands in BT_m
        let tm1 = PolyKey::t_minus_one(&triple.g.field);
        let drop = inv.essential - m;
        let Ok(type_m) = remove_ones(&inv.type_ess, &tm1, drop) else {
            return Ok(0); // the class itself is empty at rank m
        };
        let field = triple.g.field.clone();
        let z = representative_of_type(&field, &type_m);
        let zt = z.transpose();
        let id = MatFq::identity(field.clone(), m);
        let vmax = z.sub(&id).kernel();
        let wmax = zt.sub(&id).kernel();
        let subs = enumerate_subspaces(&field, m);
        let mbig = m.max(std_triple.m);
        let reference = std_triple.express_at(mbig);
        let table = ctx.group(Family::Gl, q, mbig)?;
        let mut count = 0;
        for wcand in subs.iter().filter(|s| wmax.contains_subspace(s)) {
            for vcand in subs.iter().filter(|s| vmax.contains_subspace(s)) {
                let cand = BoundingTriple::new(wcand.clone(), z.clone(), vcand.clone())?;
                let ci = cand.invariants(m)?;
                if (ci.a, ci.b, ci.essential, &ci.type_ess)
                    != (inv.a, inv.b, inv.essential, &inv.type_ess)
                {
                    continue;
                }
                // full conjugacy test at the common truncation
                let cbig = cand.express_at(mbig);
                if triples_conjugate(&cbig, &reference, &table) {
                    count += 1;
                }
            }
        }
        Ok(count)
    }
}

/// Exhaustive conjugacy test of two same-truncation triples under a group
/// table.
pub fn triples_conjugate(a: &BoundingTriple, b: &BoundingTriple, table: &GroupTable) -> bool {
    if a.m != b.m {
        return false;
    }
    use rayon::prelude::*;
    (0..table.order() as u32).into_par_iter().any(|i| {
        let x = table.el(i);
        a.conjugate(&x).map(|c| c == *b).unwrap_or(false)
    })
}

/// The closed-form coefficient K [m - n + c + h choose h]_q
/// q^((m - n + c)(2k - h - a - b)) of the orbit's class sum at rank m, with
/// the vanishing conventions for small m. n - c is the essential level.
pub fn predicted_p_gl(inv: &TripleInvariants, kcal: &BigInt, m: usize, q: u64) -> Result<BigInt> {
    let qv = QValue::new(q as i64)?;
    let shift = m as i64 - inv.essential as i64 + inv.h as i64;
    if shift < 0 {
        return Ok(BigInt::zero()); // the class is empty at rank m
    }
    let binom = q_binomial(shift as u64, inv.h, qv)?;
    if binom.is_zero() {
        return Ok(BigInt::zero());
    }
    let e = inv.exponent();
    if e < 0 {
        return Err(Error::InvalidInput("negative exponent 2k-a-b-h".into()));
    }
    let delta = m as i64 - inv.essential as i64;
    debug_assert!(delta >= 0, "nonzero binomial forces m >= essential when h = 0");
    let power = BigInt::from(q).pow((delta as u64 * e as u64) as u32);
    Ok(kcal * binom * power)
}

/// Calibrates K at the smallest valid truncation (the essential level) and
/// returns it with the calibration point.
pub fn calibrate_k_triple(ctx: &GroupCtx, triple: &BoundingTriple) -> Result<(BigInt, usize)> {
    let inv = triple.invariants(triple.min_level())?;
    let m0 = inv.essential;
    let p0 = orbit_count_triple(ctx, triple, m0)?;
    let qv = QValue::new(triple.g.field.q as i64)?;
    let rest = q_binomial(inv.h, inv.h, qv)?; // = 1; the exponent vanishes at m0
    debug_assert!(rest.is_one());
    if p0 == 0 {
        return Err(Error::InvalidInput("orbit empty at its essential level".into()));
    }
    Ok((BigInt::from(p0), m0))
}

// ---------------------------------------------------------------------------
// BT_n enumeration, orbits, Psi
// ---------------------------------------------------------------------------

/// All bounding triples at truncation n (i.e. all of BT_n in the finite
/// model).
pub fn enumerate_bt(ctx: &GroupCtx, q: u64, n: usize) -> Result<Vec<BoundingTriple>> {
    let table = ctx.group(Family::Gl, q, n)?;
    let subs = enumerate_subspaces(&table.field, n);
    let id = MatFq::identity(table.field.clone(), n);
    let mut out = Vec::new();
    for i in 0..table.order() as u32 {
        let g = table.el(i);
        let vmax = g.sub(&id).kernel();
        let wmax = g.transpose().sub(&id).kernel();
        for w in subs.iter().filter(|s| wmax.contains_subspace(s)) {
            for v in subs.iter().filter(|s| vmax.contains_subspace(s)) {
                out.push(BoundingTriple::new(w.clone(), g.clone(), v.clone())?);
            }
        }
    }
    Ok(out)
}

/// Partition of BT_n into GL_n-conjugation orbits; returns orbit index per
/// triple plus one representative index per orbit.
pub fn bt_orbits(
    ctx: &GroupCtx,
    q: u64,
    n: usize,
    triples: &[BoundingTriple],
) -> Result<(Vec<u32>, Vec<usize>)> {
    let table = ctx.group(Family::Gl, q, n)?;
    let index: HashMap<TripleKey, usize> =
        triples.iter().enumerate().map(|(i, t)| (t.key(), i)).collect();
    let mut orbit = vec![u32::MAX; triples.len()];
    let mut reps = Vec::new();
    for start in 0..triples.len() {
        if orbit[start] != u32::MAX {
            continue;
        }
        let oid = reps.len() as u32;
        reps.push(start);
        let mut stack = vec![start];
        orbit[start] = oid;
        while let Some(i) = stack.pop() {
            for gi in 0..table.order() as u32 {
                let x = table.el(gi);
                let c = triples[i].conjugate(&x)?;
                let j = *index.get(&c.key()).expect("orbit stays in BT_n");
                if orbit[j] == u32::MAX {
                    orbit[j] = oid;
                    stack.push(j);
                }
            }
        }
    }
    Ok((orbit, reps))
}

/// Psi_n of a finitely supported function on BT_n.
pub fn psi_triples(
    key: GroupKey,
    table: &GroupTable,
    f: &HashMap<TripleKey, BigInt>,
    triples: &[BoundingTriple],
) -> GroupAlgebraVector {
    let mut out = GroupAlgebraVector::zero(key);
    for t in triples {
        if let Some(c) = f.get(&t.key()) {
            let gi = table.index_of(t.g.pack_u64()).expect("g in GL_n");
            out.add_to(gi, c);
        }
    }
    out
}

/// Convolution (f1 * f2)(T) = sum over factorizations T1 x T2 = T within
/// BT_n.
pub fn convolve_triples(
    f1: &HashMap<TripleKey, BigInt>,
    f2: &HashMap<TripleKey, BigInt>,
    triples: &[BoundingTriple],
) -> Result<HashMap<TripleKey, BigInt>> {
    let by_key: HashMap<TripleKey, &BoundingTriple> =
        triples.iter().map(|t| (t.key(), t)).collect();
    let mut out: HashMap<TripleKey, BigInt> = HashMap::new();
    for (k1, c1) in f1 {
        let t1 = by_key
            .get(k1)
            .ok_or_else(|| Error::InvalidInput("support outside BT_n".into()))?;
        for (k2, c2) in f2 {
            let t2 = by_key
                .get(k2)
                .ok_or_else(|| Error::InvalidInput("support outside BT_n".into()))?;
            let p = t1.product(t2)?;
            let e = out.entry(p.key()).or_insert_with(BigInt::zero);
            *e += c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Indicator function of one orbit, as a map on BT_n.
pub fn orbit_indicator(
    orbit: &[u32],
    triples: &[BoundingTriple],
    oid: u32,
) -> HashMap<TripleKey, BigInt> {
    triples
        .iter()
        .enumerate()
        .filter(|(i, _)| orbit[*i] == oid)
        .map(|(_, t)| (t.key(), BigInt::one()))
        .collect()
}

// ---------------------------------------------------------------------------
// bounding pairs
// ---------------------------------------------------------------------------

/// (g, V) at a level of one of the classical families: g an isometry fixing V
/// pointwise.
#[derive(Debug, Clone)]
pub struct BoundingPair {
    pub form: FormSpec,
    pub g: MatFq,
    pub v: Subspace,
}

pub type PairKey = (u64, (usize, Vec<Scalar>));

impl BoundingPair {
    pub fn new(form: FormSpec, g: MatFq, v: Subspace) -> Result<Self> {
        if g.nrows != form.dim || v.ambient != form.dim {
            return Err(Error::DimensionMismatch("pair pieces disagree".into()));
        }
        if !crate::forms::is_isometry(&g, &form) {
            return Err(Error::InvalidInput("g is not an isometry".into()));
        }
        for row in v.basis_rows() {
            if g.mul_vec(&row) != row {
                return Err(Error::InvalidInput("g does not fix V pointwise".into()));
            }
        }
        Ok(BoundingPair { form, g, v })
    }

    pub fn tight(form: FormSpec, g: &MatFq) -> Result<Self> {
        let id = MatFq::identity(g.field.clone(), g.nrows);
        let v = g.sub(&id).kernel();
        BoundingPair::new(form, g.clone(), v)
    }

    pub fn key(&self) -> PairKey {
        (self.g.pack_u64(), self.v.key())
    }

    pub fn level(&self) -> usize {
        self.form.level
    }

    /// Membership in BP_k for k <= level.
    pub fn in_bpn(&self, k: usize) -> bool {
        let dk = self.form.family.dim_of_level(k);
        if dk > self.form.dim {
            return false;
        }
        let tail = Subspace::coordinate_tail(self.g.field.clone(), self.form.dim, dk);
        self.g.is_identity_beyond(dk) && self.v.contains_subspace(&tail)
    }

    pub fn min_level(&self) -> usize {
        (self.form.family.base_level()..=self.level())
            .find(|&k| self.in_bpn(k))
            .expect("in BP at its own level")
    }

    pub fn express_at(&self, level2: usize) -> Result<Self> {
        assert!(level2 >= self.level());
        let form = crate::forms::standard_gram(self.form.family, level2, self.form.q)?;
        let d = form.dim - self.form.dim;
        BoundingPair::new(
            form.clone(),
            self.g.block_embed(d),
            self.v.extend_ambient(form.dim, true),
        )
    }

    pub fn shrink_to(&self, k: usize) -> Result<Self> {
        if !self.in_bpn(k) {
            return Err(Error::NotInBTn(k));
        }
        let form = crate::forms::standard_gram(self.form.family, k, self.form.q)?;
        let dk = form.dim;
        let head = self.v.restrict_to_first(dk);
        let rows: Vec<Vec<Scalar>> =
            head.basis_rows().into_iter().map(|r| r[..dk].to_vec()).collect();
        BoundingPair::new(
            form.clone(),
            self.g.block_restrict(dk)?,
            Subspace::from_rows(self.g.field.clone(), dk, rows),
        )
    }

    pub fn conjugate(&self, x: &MatFq) -> Result<Self> {
        let xi = x.inv()?;
        BoundingPair::new(self.form.clone(), x.mul(&self.g).mul(&xi), self.v.map_by(x))
    }

    /// (g, V) x (g', V') = (g g', V cap V').
    pub fn product(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.form.dim, other.form.dim);
        BoundingPair::new(
            self.form.clone(),
            self.g.mul(&other.g),
            self.v.intersect(&other.v),
        )
    }

    /// Invariants of the sesquilinear standard shape: a = dim(V cap V^perp),
    /// r = codim(V) + a, and (h, k) of the type of g at dimension r; for
    /// symmetric forms also the germ of B restricted to V (the epsilon_2
    /// datum).
    pub fn invariants(&self) -> Result<PairInvariants> {
        let vperp = form_perp(&self.form, &self.v);
        let a = self.v.intersect(&vperp).dim();
        let codim = self.form.dim - self.v.dim();
        let r = codim + a;
        let type_full = type_of(&self.g)?;
        let tm1 = PolyKey::t_minus_one(&self.g.field);
        let type_r = remove_ones(&type_full, &tm1, self.form.dim - r)?;
        let (k, h) = crate::centrformulas::kh_of(&type_r, &tm1);
        let germ_v = if self.form.kind == crate::forms::FormKind::Symmetric {
            let d = witt_decompose(&self.form, &self.v)?;
            if d.radical_dim != a {
                return Err(Error::InvalidInput(
                    "radical of B|V disagrees with V cap V^perp".into(),
                ));
            }
            d.germ
        } else {
            None
        };
        Ok(PairInvariants {
            a,
            r,
            k,
            h,
            type_r: type_r.clone(),
            modified: type_r.to_modified(&tm1),
            germ_v,
        })
    }
}

/// Standard-shape invariants of a bounding pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairInvariants {
    pub a: usize,
    /// r = codim(V) + a = dim(W1 + W2 + W3)
    pub r: usize,
    pub k: u64,
    pub h: u64,
    pub type_r: Multipartition,
    pub modified: Multipartition,
    /// germ of B restricted to V (epsilon_2 for the orthogonal formulas)
    pub germ_v: Option<WittClass>,
}

impl PairInvariants {
    /// k - h/2 - a as twice the value, guaranteed nonnegative.
    pub fn exponent2(&self) -> i64 {
        2 * self.k as i64 - self.h as i64 - 2 * self.a as i64
    }
}

/// Orbit of V under the centralizer of g in the level-m group.
pub fn orbit_count_pair(ctx: &GroupCtx, pair: &BoundingPair, level: usize) -> Result<u64> {
    let p = if level >= pair.level() {
        pair.express_at(level)?
    } else {
        pair.shrink_to(level)?
    };
    let table = ctx.group(pair.form.family, pair.form.q, level)?;
    let cent = table.centralizer_elements(&p.g)?;
    let mut seen: std::collections::HashSet<(usize, Vec<Scalar>)> =
        std::collections::HashSet::new();
    let mut stack = vec![p.v.clone()];
    seen.insert(p.v.key());
    let xs: Vec<MatFq> = cent.iter().map(|&i| table.el(i)).collect();
    while let Some(v) = stack.pop() {
        for x in &xs {
            let nv = v.map_by(x);
            if seen.insert(nv.key()) {
                stack.push(nv);
            }
        }
    }
    Ok(seen.len() as u64)
}

/// Unitary orbit-count prediction:
/// K (-1)^(h(m-r)) q^(2(m-r)(k-h/2-a)) [m-r+h choose h]_{-q}.
/// The sign compensates the rewriting of prod (q^i - (-1)^i) ratios as a
/// (-q)-binomial and makes the count positive; it merges with the binomial
/// into a polynomial in (-q)^m.
pub fn predicted_p_unitary(
    inv: &PairInvariants,
    kcal: &BigRational,
    level: usize,
    q: u64,
) -> Result<BigRational> {
    let m = level as i64;
    let r = inv.r as i64;
    let shift = m - r + inv.h as i64;
    if shift < 0 {
        return Ok(BigRational::zero());
    }
    let qv = QValue::new(-(q as i64))?;
    let binom = q_binomial(shift as u64, inv.h, qv)?;
    if binom.is_zero() {
        return Ok(BigRational::zero());
    }
    let e = inv.exponent2();
    if e < 0 || m < r {
        return Err(Error::InvalidInput("invalid unitary prediction range".into()));
    }
    let power = BigInt::from(q).pow(((m - r) as u64 * e as u64) as u32);
    let sign = if (inv.h as i64 * (m - r)) % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    Ok(kcal * BigRational::from_integer(sign * binom * power))
}

/// Symplectic orbit-count prediction:
/// K q^((2m-r)(k-h/2-a)) [m - r/2 + h/2 choose h/2]_{q^2}.
pub fn predicted_p_sp(
    inv: &PairInvariants,
    kcal: &BigRational,
    level: usize,
    q: u64,
) -> Result<BigRational> {
    if inv.r % 2 != 0 || inv.h % 2 != 0 {
        return Err(Error::BadParity);
    }
    let m = level as i64;
    let shift = m - (inv.r as i64) / 2 + (inv.h as i64) / 2;
    if shift < 0 {
        return Ok(BigRational::zero());
    }
    let qv = QValue::new((q * q) as i64)?;
    let binom = q_binomial(shift as u64, inv.h / 2, qv)?;
    if binom.is_zero() {
        return Ok(BigRational::zero());
    }
    let e = inv.exponent2(); // 2k - h - 2a, even here
    if e < 0 {
        return Err(Error::InvalidInput("negative exponent".into()));
    }
    let dimdiff = 2 * m - inv.r as i64; // dim V_m - r
    if dimdiff < 0 {
        return Ok(BigRational::zero());
    }
    let power = BigInt::from(q).pow((dimdiff as u64 * e as u64 / 2) as u32);
    Ok(kcal * BigRational::from_integer(binom * power))
}

/// Orthogonal orbit-count prediction for a hypothesised Wall germ eps1:
/// K q^((M-r)(k-h-a)) |O_(h+M-r)^(eps1+eps2)| / (|O_h^eps1| |O_(M-r)^eps2|),
/// the form behind the four parity cases.
pub fn predicted_p_orth(
    inv: &PairInvariants,
    kcal: &BigRational,
    family: Family,
    level: usize,
    q: u64,
    eps1: WittClass,
) -> Result<BigRational> {
    let bigm = family.dim_of_level(level) as i64;
    let r = inv.r as i64;
    if bigm < r {
        return Ok(BigRational::zero());
    }
    let eps2 = inv
        .germ_v
        .ok_or_else(|| Error::InvalidInput("orthogonal pair missing germ".into()))?;
    if eps1.dim_parity() != (inv.h % 2) as usize {
        return Err(Error::InvalidInput("eps1 parity mismatch".into()));
    }
    let eps3 = witt_add(eps1, eps2, q)?;
    let e = inv.k as i64 - inv.h as i64 - inv.a as i64;
    let power = if e >= 0 {
        BigRational::from_integer(BigInt::from(q).pow(((bigm - r) as u64 * e as u64) as u32))
    } else {
        BigRational::from_integer(BigInt::from(q).pow(((bigm - r) as u64 * (-e) as u64) as u32))
            .recip()
    };
    let num = crate::centrformulas::o_order((inv.h as i64 + bigm - r) as u64, eps3, q)?;
    let den1 = crate::centrformulas::o_order(inv.h, eps1, q)?;
    let den2 = crate::centrformulas::o_order((bigm - r) as u64, eps2, q)?;
    Ok(kcal * power * BigRational::new(num, den1 * den2))
}

/// Calibration result for one pair orbit: for each admissible eps1 (only one
/// entry for unitary/symplectic, keyed by None) the calibrated K, which must
/// be a positive integer.
pub struct PairCalibration {
    pub level0: usize,
    pub candidates: Vec<(Option<WittClass>, BigInt)>,
}

pub fn calibrate_k_pair(ctx: &GroupCtx, pair: &BoundingPair) -> Result<PairCalibration> {
    let inv = pair.invariants()?;
    let level0 = pair.min_level();
    let p0 = BigRational::from_integer(BigInt::from(orbit_count_pair(ctx, pair, level0)?));
    let one = BigRational::one();
    let q = pair.form.q;
    let fam = pair.form.family;
    let mut candidates = Vec::new();
    match fam {
        Family::U => {
            let rest = predicted_p_unitary(&inv, &one, level0, q)?;
            let k = &p0 / rest;
            if k.is_integer() && k.is_positive() {
                candidates.push((None, k.to_integer()));
            }
        }
        Family::Sp => {
            let rest = predicted_p_sp(&inv, &one, level0, q)?;
            let k = &p0 / rest;
            if k.is_integer() && k.is_positive() {
                candidates.push((None, k.to_integer()));
            }
        }
        Family::OPlus | Family::OMinus | Family::OOdd => {
            for eps1 in crate::centrformulas::admissible_eps1(inv.h) {
                let rest = predicted_p_orth(&inv, &one, fam, level0, q, eps1)?;
                if rest.is_zero() {
                    continue;
                }
                let k = &p0 / rest;
                if k.is_integer() && k.is_positive() {
                    candidates.push((Some(eps1), k.to_integer()));
                }
            }
        }
        Family::Gl => return Err(Error::IncompatibleFamily("pairs are classical".into())),
    }
    if candidates.is_empty() {
        return Err(Error::InvalidInput(
            "no admissible calibration for pair orbit".into(),
        ));
    }
    Ok(PairCalibration { level0, candidates })
}

// ---------------------------------------------------------------------------
// BP_n enumeration, orbits, Psi
// ---------------------------------------------------------------------------

pub fn enumerate_bp(ctx: &GroupCtx, family: Family, q: u64, level: usize) -> Result<Vec<BoundingPair>> {
    let table = ctx.group(family, q, level)?;
    let form = ctx.form(family, q, level)?;
    let subs = enumerate_subspaces(&table.field, form.dim);
    let id = MatFq::identity(table.field.clone(), form.dim);
    let mut out = Vec::new();
    for i in 0..table.order() as u32 {
        let g = table.el(i);
        let vmax = g.sub(&id).kernel();
        for v in subs.iter().filter(|s| vmax.contains_subspace(s)) {
            out.push(BoundingPair::new(form.clone(), g.clone(), v.clone())?);
        }
    }
    Ok(out)
}

pub fn bp_orbits(
    ctx: &GroupCtx,
    family: Family,
    q: u64,
    level: usize,
    pairs: &[BoundingPair],
) -> Result<(Vec<u32>, Vec<usize>)> {
    let table = ctx.group(family, q, level)?;
    let index: HashMap<PairKey, usize> =
        pairs.iter().enumerate().map(|(i, p)| (p.key(), i)).collect();
    let mut orbit = vec![u32::MAX; pairs.len()];
    let mut reps = Vec::new();
    for start in 0..pairs.len() {
        if orbit[start] != u32::MAX {
            continue;
        }
        let oid = reps.len() as u32;
        reps.push(start);
        let mut stack = vec![start];
        orbit[start] = oid;
        while let Some(i) = stack.pop() {
            for gi in 0..table.order() as u32 {
                let x = table.el(gi);
                let c = pairs[i].conjugate(&x)?;
                let j = *index.get(&c.key()).expect("orbit stays in BP_n");
                if orbit[j] == u32::MAX {
                    orbit[j] = oid;
                    stack.push(j);
                }
            }
        }
    }
    Ok((orbit, reps))
}

pub fn pairs_conjugate(a: &BoundingPair, b: &BoundingPair, table: &GroupTable) -> bool {
    use rayon::prelude::*;
    if a.form.dim != b.form.dim {
        return false;
    }
    (0..table.order() as u32).into_par_iter().any(|i| {
        let x = table.el(i);
        a.conjugate(&x)
            .map(|c| c.key() == b.key())
            .unwrap_or(false)
    })
}

pub fn psi_pairs(
    key: GroupKey,
    table: &GroupTable,
    f: &HashMap<PairKey, BigInt>,
    pairs: &[BoundingPair],
) -> GroupAlgebraVector {
    let mut out = GroupAlgebraVector::zero(key);
    for p in pairs {
        if let Some(c) = f.get(&p.key()) {
            let gi = table.index_of(p.g.pack_u64()).expect("g in group");
            out.add_to(gi, c);
        }
    }
    out
}

pub fn convolve_pairs(
    f1: &HashMap<PairKey, BigInt>,
    f2: &HashMap<PairKey, BigInt>,
    pairs: &[BoundingPair],
) -> Result<HashMap<PairKey, BigInt>> {
    let by_key: HashMap<PairKey, &BoundingPair> = pairs.iter().map(|p| (p.key(), p)).collect();
    let mut out: HashMap<PairKey, BigInt> = HashMap::new();
    for (k1, c1) in f1 {
        let p1 = by_key
            .get(k1)
            .ok_or_else(|| Error::InvalidInput("support outside BP_n".into()))?;
        for (k2, c2) in f2 {
            let p2 = by_key
                .get(k2)
                .ok_or_else(|| Error::InvalidInput("support outside BP_n".into()))?;
            let p = p1.product(p2)?;
            let e = out.entry(p.key()).or_insert_with(BigInt::zero);
            *e += c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

pub fn pair_orbit_indicator(
    orbit: &[u32],
    pairs: &[BoundingPair],
    oid: u32,
) -> HashMap<PairKey, BigInt> {
    pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| orbit[*i] == oid)
        .map(|(_, p)| (p.key(), BigInt::one()))
        .collect()
}

// ---------------------------------------------------------------------------
// verification reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct OrbitCountCheck {
    pub level: usize,
    pub brute: u64,
    pub predicted: String,
    pub matched: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub family: String,
    pub q: u64,
    pub invariants: BTreeMap<String, String>,
    pub k_calibrated: String,
    pub calibration_level: usize,
    /// admissible Wall-sign assignments that survive all levels (orthogonal)
    pub surviving_signs: Vec<String>,
    pub ambiguous: bool,
    pub checks: Vec<OrbitCountCheck>,
    pub all_matched: bool,
}

/// Runs calibrated-prediction checks for a triple orbit at the given
/// truncations.
pub fn verify_triple_orbit(
    ctx: &GroupCtx,
    triple: &BoundingTriple,
    levels: &[usize],
) -> Result<OrbitReport> {
    let q = triple.g.field.q;
    let inv = triple.invariants(triple.min_level())?;
    let (kcal, m0) = calibrate_k_triple(ctx, triple)?;
    let mut checks = Vec::new();
    let mut all = true;
    for &m in levels {
        let brute = orbit_count_triple(ctx, triple, m)?;
        let pred = predicted_p_gl(&inv, &kcal, m, q)?;
        let matched = BigInt::from(brute) == pred;
        all &= matched;
        checks.push(OrbitCountCheck { level: m, brute, predicted: pred.to_string(), matched });
    }
    let mut invariants = BTreeMap::new();
    invariants.insert("a".into(), inv.a.to_string());
    invariants.insert("b".into(), inv.b.to_string());
    invariants.insert("essential".into(), inv.essential.to_string());
    invariants.insert("h".into(), inv.h.to_string());
    invariants.insert("k".into(), inv.k.to_string());
    invariants.insert("type".into(), inv.type_ess.to_string());
    invariants.insert("exponent".into(), inv.exponent().to_string());
    Ok(OrbitReport {
        family: "gl".into(),
        q,
        invariants,
        k_calibrated: kcal.to_string(),
        calibration_level: m0,
        surviving_signs: vec![],
        ambiguous: false,
        checks,
        all_matched: all,
    })
}

/// Runs calibrated-prediction checks for a pair orbit; for orthogonal
/// families every admissible Wall sign is tried and survivors are reported.
pub fn verify_pair_orbit(
    ctx: &GroupCtx,
    pair: &BoundingPair,
    levels: &[usize],
) -> Result<OrbitReport> {
    let q = pair.form.q;
    let fam = pair.form.family;
    let inv = pair.invariants()?;
    let cal = calibrate_k_pair(ctx, pair)?;
    let brutes: Vec<(usize, u64)> = levels
        .iter()
        .map(|&l| Ok((l, orbit_count_pair(ctx, pair, l)?)))
        .collect::<Result<_>>()?;
    // keep sign assignments whose predictions match at every level
    let mut survivors: Vec<(Option<WittClass>, BigInt, Vec<OrbitCountCheck>)> = Vec::new();
    for (eps1, k) in &cal.candidates {
        let kr = BigRational::from_integer(k.clone());
        let mut checks = Vec::new();
        let mut ok = true;
        for &(l, brute) in &brutes {
            let pred = match fam {
                Family::U => predicted_p_unitary(&inv, &kr, l, q)?,
                Family::Sp => predicted_p_sp(&inv, &kr, l, q)?,
                _ => predicted_p_orth(&inv, &kr, fam, l, q, eps1.unwrap())?,
            };
            let matched = BigRational::from_integer(BigInt::from(brute)) == pred;
            ok &= matched;
            checks.push(OrbitCountCheck {
                level: l,
                brute,
                predicted: pred.to_string(),
                matched,
            });
        }
        if ok {
            survivors.push((*eps1, k.clone(), checks));
        }
    }
    let mut invariants = BTreeMap::new();
    invariants.insert("a".into(), inv.a.to_string());
    invariants.insert("r".into(), inv.r.to_string());
    invariants.insert("h".into(), inv.h.to_string());
    invariants.insert("k".into(), inv.k.to_string());
    invariants.insert("type".into(), inv.type_r.to_string());
    invariants.insert("exponent2".into(), inv.exponent2().to_string());
    if let Some(g) = inv.germ_v {
        invariants.insert("germ_v".into(), g.name().into());
    }
    let all_matched = !survivors.is_empty();
    let (signs, k_str, checks) = match survivors.first() {
        Some((_e, k, c)) => (
            survivors
                .iter()
                .map(|(e, _, _)| e.map(|w| w.name().to_string()).unwrap_or_default())
                .collect::<Vec<_>>(),
            k.to_string(),
            c.clone(),
        ),
        None => (vec![], "none".into(), vec![]),
    };
    Ok(OrbitReport {
        family: fam.tag().into(),
        q,
        invariants,
        k_calibrated: k_str,
        calibration_level: cal.level0,
        ambiguous: signs.len() > 1,
        surviving_signs: signs,
        checks,
        all_matched,
    })
}
