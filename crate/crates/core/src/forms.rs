//! Standard sesquilinear forms, isometry testing, backtracking enumeration of
//! isometry groups, hyperbolic-plane completion, and Witt decomposition.
//!
//! Coordinate layout: passing from level n to n+1 appends coordinates at the
//! end (one for U, a hyperbolic pair for Sp/O), so the level-n Gram matrix is
//! the leading principal block of the level-(n+1) Gram and the block-identity
//! embedding is the group embedding.

use rayon::prelude::*;

use crate::centrformulas::{o_order, sp_order, u_order};
use crate::error::{Error, Result};
use crate::gf::{field_make, field_make_quadratic, Field, Scalar};
use crate::matfq::{MatFq, Subspace};
use crate::types::{Family, WittClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    Hermitian,
    Alternating,
    Symmetric,
}

/// A fixed nondegenerate sesquilinear form on F^dim.
#[derive(Debug, Clone)]
pub struct FormSpec {
    pub family: Family,
    pub kind: FormKind,
    /// field the matrices live over (GF(q^2) for Hermitian forms)
    pub field: Field,
    /// base parameter q
    pub q: u64,
    pub level: usize,
    pub dim: usize,
    pub gram: MatFq,
}

impl FormSpec {
    pub fn is_hermitian(&self) -> bool {
        self.kind == FormKind::Hermitian
    }

    pub fn sigma(&self, x: Scalar) -> Scalar {
        self.field.sigma(x, self.is_hermitian())
    }

    /// B(u, v) = u^T M sigma(v).
    pub fn eval(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        let f = &self.field;
        let sv: Vec<Scalar> = v.iter().map(|&x| self.sigma(x)).collect();
        let mv = self.gram.mul_vec(&sv);
        let mut acc = 0;
        for (a, b) in u.iter().zip(&mv) {
            acc = f.add(acc, f.mul(*a, *b));
        }
        acc
    }

    /// Germ of the whole standard space.
    pub fn ambient_germ(&self) -> Option<WittClass> {
        match self.family {
            Family::OPlus => Some(WittClass::Zero),
            Family::OMinus => Some(WittClass::Omega),
            Family::OOdd => Some(WittClass::One),
            _ => None,
        }
    }

    /// Predicted group order from the closed-form formulas.
    pub fn group_order(&self) -> Result<num::BigInt> {
        match self.family {
            Family::U => Ok(u_order(self.dim as u64, self.q)),
            Family::Sp => sp_order(self.dim as u64, self.q),
            Family::OPlus | Family::OMinus | Family::OOdd => {
                o_order(self.dim as u64, self.ambient_germ().unwrap(), self.q)
            }
            Family::Gl => Err(Error::IncompatibleFamily("GL carries no form".into())),
        }
    }
}

/// The standard form of Definition-7.1 shape for the family at level n over
/// the base field of size q (matrices over GF(q^2) in the unitary case; the
/// negative-symmetric form uses the least non-square).
pub fn standard_gram(family: Family, n: usize, q: u64) -> Result<FormSpec> {
    let (p, k) = crate::gf::split_prime_power(q)
        .ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
    let sym_ok = p != 2;
    match family {
        Family::Gl => Err(Error::IncompatibleFamily("GL carries no form".into())),
        Family::U => {
            let field = field_make_quadratic(q)?;
            let gram = MatFq::identity(field.clone(), n);
            Ok(FormSpec { family, kind: FormKind::Hermitian, field, q, level: n, dim: n, gram })
        }
        Family::Sp => {
            let field = field_make(p, k)?;
            let mut gram = MatFq::zero(field.clone(), 2 * n, 2 * n);
            for i in 0..n {
                gram.set(2 * i, 2 * i + 1, 1);
                gram.set(2 * i + 1, 2 * i, field.neg(1));
            }
            Ok(FormSpec {
                family,
                kind: FormKind::Alternating,
                field,
                q,
                level: n,
                dim: 2 * n,
                gram,
            })
        }
        Family::OPlus | Family::OMinus | Family::OOdd => {
            if !sym_ok {
                return Err(Error::IncompatibleFamily(
                    "symmetric forms need odd characteristic".into(),
                ));
            }
            let field = field_make(p, k)?;
            match family {
                Family::OPlus => {
                    let mut gram = MatFq::zero(field.clone(), 2 * n, 2 * n);
                    for i in 0..n {
                        gram.set(2 * i, 2 * i + 1, 1);
                        gram.set(2 * i + 1, 2 * i, 1);
                    }
                    Ok(FormSpec {
                        family,
                        kind: FormKind::Symmetric,
                        field,
                        q,
                        level: n,
                        dim: 2 * n,
                        gram,
                    })
                }
                Family::OMinus => {
                    if n == 0 {
                        return Err(Error::IncompatibleFamily(
                            "negative form needs dimension >= 2".into(),
                        ));
                    }
                    let m = field.least_nonsquare()?;
                    let mut gram = MatFq::zero(field.clone(), 2 * n, 2 * n);
                    gram.set(0, 0, 1);
                    gram.set(1, 1, field.neg(m));
                    for i in 1..n {
                        gram.set(2 * i, 2 * i + 1, 1);
                        gram.set(2 * i + 1, 2 * i, 1);
                    }
                    Ok(FormSpec {
                        family,
                        kind: FormKind::Symmetric,
                        field,
                        q,
                        level: n,
                        dim: 2 * n,
                        gram,
                    })
                }
                _ => {
                    let mut gram = MatFq::zero(field.clone(), 2 * n + 1, 2 * n + 1);
                    gram.set(0, 0, 1);
                    for i in 0..n {
                        gram.set(2 * i + 1, 2 * i + 2, 1);
                        gram.set(2 * i + 2, 2 * i + 1, 1);
                    }
                    Ok(FormSpec {
                        family,
                        kind: FormKind::Symmetric,
                        field,
                        q,
                        level: n,
                        dim: 2 * n + 1,
                        gram,
                    })
                }
            }
        }
    }
}

/// g^T M sigma(g) = M, checked exactly.
pub fn is_isometry(g: &MatFq, form: &FormSpec) -> bool {
    if g.nrows != form.dim || g.ncols != form.dim {
        return false;
    }
    let sg = if form.is_hermitian() {
        g.frobenius_map().expect("hermitian field")
    } else {
        g.clone()
    };
    g.transpose().mul(&form.gram).mul(&sg) == form.gram
}

/// Row-echelon accumulator for incremental independence checks.
#[derive(Clone)]
struct EchelonAcc {
    field: Field,
    rows: Vec<Vec<Scalar>>, // echelon, leading entries normalized
}

impl EchelonAcc {
    fn new(field: Field) -> Self {
        EchelonAcc { field, rows: vec![] }
    }

    /// Reduces v; returns false (no change) if v is dependent, otherwise
    /// inserts and returns true.
    fn insert(&mut self, v: &[Scalar]) -> bool {
        let f = &self.field;
        let mut v = v.to_vec();
        for row in &self.rows {
            let lead = row.iter().position(|&x| x != 0).unwrap();
            if v[lead] != 0 {
                let c = v[lead];
                for (a, b) in v.iter_mut().zip(row) {
                    *a = f.sub(*a, f.mul(c, *b));
                }
            }
        }
        if let Some(lead) = v.iter().position(|&x| x != 0) {
            let inv = f.inv(v[lead]).unwrap();
            for a in v.iter_mut() {
                *a = f.mul(*a, inv);
            }
            self.rows.push(v);
            true
        } else {
            false
        }
    }
}

/// Complete duplicate-free enumeration of the isometry group, as sorted
/// packed matrices. Depth-first extension of partial isometric tuples: the
/// image of e_k is constrained by k linear equations against the previously
/// chosen images plus the diagonal (norm) condition.
pub fn enumerate_isometry_group(form: &FormSpec, limit: u64) -> Result<Vec<u64>> {
    use num::ToPrimitive;
    let order = form.group_order()?;
    if order.to_u64().is_none_or(|o| o > limit) {
        return Err(Error::LimitExceeded(format!(
            "|{}_{}(F_{})| = {order} over element limit {limit}",
            form.family.tag(),
            form.dim,
            form.q
        )));
    }
    let n = form.dim;
    if n == 0 {
        return Ok(vec![0]);
    }
    // candidates for the first column
    let first: Vec<Vec<Scalar>> = all_vectors(&form.field, n)
        .into_iter()
        .filter(|v| v.iter().any(|&x| x != 0) && form.eval(v, v) == form.gram.get(0, 0))
        .collect();
    let results: Vec<Vec<u64>> = first
        .into_par_iter()
        .map(|v0| {
            let mut acc = EchelonAcc::new(form.field.clone());
            acc.insert(&v0);
            let mut cols = vec![v0];
            let mut out = Vec::new();
            extend_isometry(form, &mut cols, &mut acc, &mut out);
            out
        })
        .collect();
    let mut all: Vec<u64> = results.into_iter().flatten().collect();
    all.sort_unstable();
    all.dedup();
    if num::BigInt::from(all.len() as u64) != order {
        return Err(Error::InvalidInput(format!(
            "enumerated {} elements but formula gives {order}",
            all.len()
        )));
    }
    Ok(all)
}

fn all_vectors(field: &Field, n: usize) -> Vec<Vec<Scalar>> {
    let q = field.q;
    let total = q.pow(n as u32);
    (0..total)
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let d = (code % q) as Scalar;
                    code /= q;
                    d
                })
                .collect()
        })
        .collect()
}

fn extend_isometry(
    form: &FormSpec,
    cols: &mut Vec<Vec<Scalar>>,
    acc: &mut EchelonAcc,
    out: &mut Vec<u64>,
) {
    let n = form.dim;
    let k = cols.len();
    if k == n {
        let g = MatFq::from_fn(form.field.clone(), n, n, |i, j| cols[j][i]);
        out.push(g.pack_u64());
        return;
    }
    // linear constraints: B(x, v_j) = gram[k][j] for j < k, i.e.
    // (M sigma(v_j))^T x = gram[k][j]
    let mut rows = Vec::with_capacity(k);
    let mut rhs = Vec::with_capacity(k);
    for (j, vj) in cols.iter().enumerate() {
        let svj: Vec<Scalar> = vj.iter().map(|&x| form.sigma(x)).collect();
        rows.push(form.gram.mul_vec(&svj));
        rhs.push(form.gram.get(k, j));
    }
    // plus the mirrored constraints B(v_j, x) = gram[j][k]; for hermitian and
    // symmetric forms these are equivalent, for alternating they are too, but
    // including them costs nothing and keeps the system honest
    let sys = MatFq::from_rows(form.field.clone(), &rows);
    let Some((part, kernel)) = sys.solve_affine(&rhs) else {
        return;
    };
    let f = &form.field;
    let free = kernel.len();
    let q = f.q;
    let total = q.pow(free as u32);
    let want_diag = form.gram.get(k, k);
    for mut code in 0..total {
        let mut x = part.clone();
        for b in &kernel {
            let c = (code % q) as Scalar;
            code /= q;
            if c != 0 {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi = f.add(*xi, f.mul(c, *bi));
                }
            }
        }
        if form.kind != FormKind::Alternating && form.eval(&x, &x) != want_diag {
            continue;
        }
        let mut acc2 = acc.clone();
        if !acc2.insert(&x) {
            continue;
        }
        cols.push(x);
        extend_isometry(form, cols, &mut acc2, out);
        cols.pop();
    }
}

/// Enumerates the centralizer of g inside the isometry group of the form
/// without touching the rest of the group: the depth-first column extension
/// additionally enforces the linear commuting constraints x g = g x, each
/// applied as soon as all columns it involves are on the stack. Errors with
/// LimitExceeded once more than `limit` elements are found.
pub fn enumerate_centralizer(form: &FormSpec, g: &MatFq, limit: u64) -> Result<Vec<u128>> {
    let n = form.dim;
    if !is_isometry(g, form) {
        return Err(Error::NotInGroup);
    }
    if n == 0 {
        return Ok(vec![0]);
    }
    // column t of xg = gx involves columns {j : g[j][t] != 0} plus t; it can
    // be enforced once the largest such index is chosen
    let done_at: Vec<usize> = (0..n)
        .map(|t| (0..n).filter(|&j| g.get(j, t) != 0).fold(t, usize::max))
        .collect();

    struct Ctx<'a> {
        form: &'a FormSpec,
        g: &'a MatFq,
        done_at: &'a [usize],
        limit: u64,
        found: std::sync::atomic::AtomicU64,
    }

    fn constraint_system(
        ctx: &Ctx,
        cols: &[Vec<Scalar>],
    ) -> (Vec<Vec<Scalar>>, Vec<Scalar>) {
        let form = ctx.form;
        let g = ctx.g;
        let f = &form.field;
        let n = form.dim;
        let k = cols.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (j, vj) in cols.iter().enumerate() {
            let svj: Vec<Scalar> = vj.iter().map(|&x| form.sigma(x)).collect();
            rows.push(form.gram.mul_vec(&svj));
            rhs.push(form.gram.get(k, j));
        }
        for t in 0..=k {
            if ctx.done_at[t] != k {
                continue;
            }
            if t == k {
                // (g - g[k][k] I) v_k = sum_{j<k} g[j][k] v_j
                let gkk = g.get(k, k);
                let mut target = vec![0; n];
                for (j, vj) in cols.iter().enumerate() {
                    let c = g.get(j, k);
                    if c != 0 {
                        for (ti, x) in target.iter_mut().zip(vj) {
                            *ti = f.add(*ti, f.mul(c, *x));
                        }
                    }
                }
                for r in 0..n {
                    let mut row: Vec<Scalar> = (0..n).map(|c| g.get(r, c)).collect();
                    row[r] = f.sub(row[r], gkk);
                    rows.push(row);
                    rhs.push(target[r]);
                }
            } else {
                // g[k][t] v_k = g v_t - sum_{j<k} g[j][t] v_j
                let gkt = g.get(k, t);
                debug_assert_ne!(gkt, 0);
                let mut target = ctx.g.mul_vec(&cols[t]);
                for (j, vj) in cols.iter().enumerate() {
                    let c = g.get(j, t);
                    if c != 0 {
                        for (ti, x) in target.iter_mut().zip(vj) {
                            *ti = f.sub(*ti, f.mul(c, *x));
                        }
                    }
                }
                for (r, t_r) in target.iter().enumerate() {
                    let mut row = vec![0; n];
                    row[r] = gkt;
                    rows.push(row);
                    rhs.push(*t_r);
                }
            }
        }
        (rows, rhs)
    }

    fn extend(
        ctx: &Ctx,
        cols: &mut Vec<Vec<Scalar>>,
        acc: &mut EchelonAcc,
        out: &mut Vec<u128>,
    ) -> Result<()> {
        let form = ctx.form;
        let n = form.dim;
        let k = cols.len();
        if k == n {
            let m = MatFq::from_fn(form.field.clone(), n, n, |i, j| cols[j][i]);
            out.push(m.pack_u128());
            let total = ctx
                .found
                .fetch_add(1, std::sync::atomic::Ordering::Relaxed)
                + 1;
            if total > ctx.limit {
                return Err(Error::LimitExceeded("centralizer enumeration".into()));
            }
            return Ok(());
        }
        let (rows, rhs) = constraint_system(ctx, cols);
        let (part, kernel) = if rows.is_empty() {
            // unconstrained column
            let basis = (0..n)
                .map(|i| {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    e
                })
                .collect();
            (vec![0; n], basis)
        } else {
            let sys = MatFq::from_rows(form.field.clone(), &rows);
            match sys.solve_affine(&rhs) {
                Some(s) => s,
                None => return Ok(()),
            }
        };
        let f = &form.field;
        let q = f.q;
        let total = q.pow(kernel.len() as u32);
        let want_diag = form.gram.get(k, k);
        for mut code in 0..total {
            let mut x = part.clone();
            for b in &kernel {
                let c = (code % q) as Scalar;
                code /= q;
                if c != 0 {
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi = f.add(*xi, f.mul(c, *bi));
                    }
                }
            }
            if form.kind != FormKind::Alternating && form.eval(&x, &x) != want_diag {
                continue;
            }
            let mut acc2 = acc.clone();
            if !acc2.insert(&x) {
                continue;
            }
            cols.push(x);
            extend(ctx, cols, &mut acc2, out)?;
            cols.pop();
        }
        Ok(())
    }

    let ctx = Ctx {
        form,
        g,
        done_at: &done_at,
        limit,
        found: std::sync::atomic::AtomicU64::new(0),
    };
    // first-column candidates, then parallel subtree walks
    let (rows, rhs) = constraint_system(&ctx, &[]);
    let firsts: Vec<Vec<Scalar>> = if rows.is_empty() {
        all_vectors(&form.field, n)
    } else {
        let sys = MatFq::from_rows(form.field.clone(), &rows);
        match sys.solve_affine(&rhs) {
            None => vec![],
            Some((part, kernel)) => {
                let f = &form.field;
                let q = f.q;
                let total = q.pow(kernel.len() as u32);
                (0..total)
                    .map(|mut code| {
                        let mut x = part.clone();
                        for b in &kernel {
                            let c = (code % q) as Scalar;
                            code /= q;
                            if c != 0 {
                                for (xi, bi) in x.iter_mut().zip(b) {
                                    *xi = f.add(*xi, f.mul(c, *bi));
                                }
                            }
                        }
                        x
                    })
                    .collect()
            }
        }
    };
    let want_diag = form.gram.get(0, 0);
    let results: Vec<Result<Vec<u128>>> = firsts
        .into_par_iter()
        .filter(|x| {
            (form.kind == FormKind::Alternating || form.eval(x, x) == want_diag)
                && x.iter().any(|&v| v != 0)
        })
        .map(|v0| {
            let mut acc = EchelonAcc::new(form.field.clone());
            acc.insert(&v0);
            let mut cols = vec![v0];
            let mut out = Vec::new();
            extend(&ctx, &mut cols, &mut acc, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
        if out.len() as u64 > limit {
            return Err(Error::LimitExceeded("centralizer enumeration".into()));
        }
    }
    out.par_sort_unstable();
    out.dedup();
    Ok(out)
}

/// Given isotropic u1 != 0, finds u2 with B(u1,u2) = 1 and B(u2,u2) = 0,
/// searching within the row space of `within` (defaults to the whole space).
pub fn hyperbolic_complete(
    u1: &[Scalar],
    form: &FormSpec,
    within: Option<&Subspace>,
) -> Result<Vec<Scalar>> {
    let f = &form.field;
    if u1.iter().all(|&x| x == 0) {
        return Err(Error::ZeroVector);
    }
    if form.eval(u1, u1) != 0 {
        return Err(Error::NotIsotropic);
    }
    // find any v in the search space with B(u1, v) != 0
    let candidates: Vec<Vec<Scalar>> = match within {
        Some(s) => s.basis_rows(),
        None => (0..form.dim)
            .map(|i| {
                let mut v = vec![0; form.dim];
                v[i] = 1;
                v
            })
            .collect(),
    };
    let mut v = candidates
        .into_iter()
        .find(|v| form.eval(u1, v) != 0)
        .ok_or(Error::NotIsotropic)?;
    // rescale: B(u1, c v) = sigma(c) B(u1, v), and sigma is an involution
    let b = form.eval(u1, &v);
    let c = form.sigma(f.inv(b)?);
    for x in v.iter_mut() {
        *x = f.mul(c, *x);
    }
    debug_assert_eq!(form.eval(u1, &v), 1);
    let u2 = match form.kind {
        FormKind::Alternating => v,
        FormKind::Hermitian => {
            let x = f.solve_trace(form.eval(&v, &v))?;
            sub_scaled(f, &v, u1, x)
        }
        FormKind::Symmetric => {
            let half = f.inv(f.add(1, 1))?;
            let x = f.mul(half, form.eval(&v, &v));
            sub_scaled(f, &v, u1, x)
        }
    };
    debug_assert_eq!(form.eval(u1, &u2), 1);
    debug_assert_eq!(form.eval(&u2, &u2), 0);
    Ok(u2)
}

fn sub_scaled(f: &Field, v: &[Scalar], u: &[Scalar], c: Scalar) -> Vec<Scalar> {
    v.iter().zip(u).map(|(&a, &b)| f.sub(a, f.mul(c, b))).collect()
}

/// Orthogonal complement {u : B(u, w) = 0 for all w in the space}.
pub fn form_perp(form: &FormSpec, space: &Subspace) -> Subspace {
    if space.dim() == 0 {
        return Subspace::full(form.field.clone(), form.dim);
    }
    let rows: Vec<Vec<Scalar>> = space
        .basis_rows()
        .into_iter()
        .map(|v| {
            let sv: Vec<Scalar> = v.iter().map(|&x| form.sigma(x)).collect();
            form.gram.mul_vec(&sv)
        })
        .collect();
    MatFq::from_rows(form.field.clone(), &rows).kernel()
}

/// Witt decomposition data of the form restricted to a subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittDecomp {
    pub radical_dim: usize,
    pub polar_rank: usize,
    pub germ_dim: usize,
    /// classified germ for symmetric forms
    pub germ: Option<WittClass>,
}

/// Splits `space` as radical + hyperbolic planes + anisotropic germ.
pub fn witt_decompose(form: &FormSpec, space: &Subspace) -> Result<WittDecomp> {
    let radical = space.intersect(&form_perp(form, space));
    let radical_dim = radical.dim();
    // complement of the radical inside space
    let mut acc = EchelonAcc::new(form.field.clone());
    for r in radical.basis_rows() {
        acc.insert(&r);
    }
    let mut working: Vec<Vec<Scalar>> = Vec::new();
    for r in space.basis_rows() {
        if acc.insert(&r) {
            working.push(r);
        }
    }
    let mut polar_rank = 0;
    let mut current = Subspace::from_rows(form.field.clone(), form.dim, working);
    loop {
        if current.dim() == 0 {
            break;
        }
        let Some(u1) = find_isotropic(form, &current) else {
            break;
        };
        let u2 = hyperbolic_complete(&u1, form, Some(&current))?;
        polar_rank += 1;
        let plane = Subspace::from_rows(form.field.clone(), form.dim, vec![u1, u2]);
        current = current.intersect(&form_perp(form, &plane));
    }
    let germ_dim = current.dim();
    let max_germ = match form.kind {
        FormKind::Alternating => 0,
        FormKind::Hermitian => 1,
        FormKind::Symmetric => 2,
    };
    if germ_dim > max_germ {
        return Err(Error::InvalidInput(format!(
            "anisotropic part of dimension {germ_dim} exceeds the classification"
        )));
    }
    let germ = if form.kind == FormKind::Symmetric {
        Some(match germ_dim {
            0 => WittClass::Zero,
            1 => {
                let v = current.basis_rows().remove(0);
                if form.field.is_square(form.eval(&v, &v)) {
                    WittClass::One
                } else {
                    WittClass::Delta
                }
            }
            _ => WittClass::Omega,
        })
    } else {
        None
    };
    Ok(WittDecomp { radical_dim, polar_rank, germ_dim, germ })
}

/// Exhaustive isotropic-vector search inside a subspace (by span coordinates).
fn find_isotropic(form: &FormSpec, space: &Subspace) -> Option<Vec<Scalar>> {
    let d = space.dim();
    let q = form.field.q;
    let f = &form.field;
    let basis = space.basis_rows();
    let total = q.pow(d as u32);
    for code in 1..total {
        let mut v = vec![0; form.dim];
        let mut c = code;
        for b in &basis {
            let coef = (c % q) as Scalar;
            c /= q;
            if coef != 0 {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = f.add(*vi, f.mul(coef, *bi));
                }
            }
        }
        if form.eval(&v, &v) == 0 && v.iter().any(|&x| x != 0) {
            return Some(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    #[test]
    fn standard_gram_shapes() {
        let sp1 = standard_gram(Family::Sp, 1, 2).unwrap();
        assert_eq!(sp1.gram.row(0), &[0, 1]);
        assert_eq!(sp1.gram.row(1), &[1, 0]); // -1 = 1 in char 2
        let u2 = standard_gram(Family::U, 2, 2).unwrap();
        assert!(u2.gram.is_identity());
        assert_eq!(u2.field.q, 4);
        let o1 = standard_gram(Family::OOdd, 1, 3).unwrap();
        assert_eq!(o1.dim, 3);
        assert_eq!(o1.gram.get(0, 0), 1);
        assert_eq!(o1.gram.get(1, 2), 1);
        assert_eq!(o1.gram.get(2, 1), 1);
        assert!(standard_gram(Family::OPlus, 1, 2).is_err());
        assert!(standard_gram(Family::OMinus, 0, 3).is_err());
    }

    #[test]
    fn grams_nest_by_leading_blocks() {
        for family in [Family::U, Family::Sp, Family::OPlus, Family::OMinus, Family::OOdd] {
            let q = if family == Family::U || family == Family::Sp { 2 } else { 3 };
            let base = family.base_level();
            for n in base..4 {
                let a = standard_gram(family, n, q).unwrap();
                let b = standard_gram(family, n + 1, q).unwrap();
                for i in 0..a.dim {
                    for j in 0..a.dim {
                        assert_eq!(a.gram.get(i, j), b.gram.get(i, j));
                    }
                }
                // gram symmetry sanity
                let g = &a.gram;
                match a.kind {
                    FormKind::Symmetric => assert_eq!(g.transpose(), *g),
                    FormKind::Alternating => {
                        assert_eq!(g.transpose(), {
                            let mut m = g.clone();
                            for i in 0..a.dim {
                                for j in 0..a.dim {
                                    m.set(i, j, a.field.neg(g.get(i, j)));
                                }
                            }
                            m
                        });
                        for i in 0..a.dim {
                            assert_eq!(g.get(i, i), 0);
                        }
                    }
                    FormKind::Hermitian => {
                        assert_eq!(g.conj_transpose().unwrap(), *g)
                    }
                }
                assert_ne!(a.gram.det(), 0, "gram must be nondegenerate");
            }
        }
    }

    #[test]
    fn isometry_examples() {
        let sp1q3 = standard_gram(Family::Sp, 1, 3).unwrap();
        let id = MatFq::identity(sp1q3.field.clone(), 2);
        assert!(is_isometry(&id, &sp1q3));
        // -identity
        let mut mi = MatFq::zero(sp1q3.field.clone(), 2, 2);
        mi.set(0, 0, 2);
        mi.set(1, 1, 2);
        assert!(is_isometry(&mi, &sp1q3));
        // transvection against sp n=1 q=2
        let sp1 = standard_gram(Family::Sp, 1, 2).unwrap();
        let tv = MatFq::from_rows(sp1.field.clone(), &[vec![1, 1], vec![0, 1]]);
        assert!(is_isometry(&tv, &sp1));
    }

    #[test]
    fn enumerate_small_groups() {
        let check = |family, n, q, want: u64| {
            let form = standard_gram(family, n, q).unwrap();
            let els = enumerate_isometry_group(&form, 10_000_000).unwrap();
            assert_eq!(els.len() as u64, want, "{:?} n={n} q={q}", family);
            assert_eq!(form.group_order().unwrap(), BigInt::from(want));
        };
        check(Family::Sp, 1, 2, 6);
        check(Family::U, 2, 2, 18);
        check(Family::U, 1, 2, 3);
        check(Family::OOdd, 1, 3, 48);
        check(Family::OPlus, 1, 3, 4);
        check(Family::OMinus, 1, 3, 8);
        check(Family::Sp, 2, 3, 720 * 72); // |Sp_4(F_3)| = 51840
    }

    #[test]
    fn group_closure_spot_check() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for (family, n, q) in [
            (Family::Sp, 1, 2u64),
            (Family::Sp, 2, 2),
            (Family::U, 2, 2),
            (Family::U, 2, 3),
            (Family::OOdd, 1, 3),
            (Family::OMinus, 2, 3),
        ] {
            let form = standard_gram(family, n, q).unwrap();
            let els = enumerate_isometry_group(&form, 10_000_000).unwrap();
            let dim = form.dim;
            let unpack =
                |w: u64| MatFq::unpack_u64(form.field.clone(), dim, dim, w);
            for _ in 0..300 {
                let a = unpack(els[rng.gen_range(0..els.len())]);
                let b = unpack(els[rng.gen_range(0..els.len())]);
                let ab = a.mul(&b).pack_u64();
                assert!(els.binary_search(&ab).is_ok(), "closed under product");
                let ai = a.inv().unwrap().pack_u64();
                assert!(els.binary_search(&ai).is_ok(), "closed under inverse");
                assert!(is_isometry(&a, &form));
            }
        }
    }

    #[test]
    fn centralizer_dfs_matches_scan() {
        use crate::groups::GroupCtx;
        let ctx = GroupCtx::in_memory();
        for (family, q, level) in [
            (Family::Sp, 2u64, 1usize),
            (Family::Sp, 3, 1),
            (Family::Sp, 2, 2),
            (Family::U, 2, 2),
            (Family::OOdd, 3, 1),
            (Family::OMinus, 3, 1),
        ] {
            let form = standard_gram(family, level, q).unwrap();
            let table = ctx.group(family, q, level).unwrap();
            let ct = ctx.classes(family, q, level).unwrap();
            for info in &ct.classes {
                let g = MatFq::unpack_u64(form.field.clone(), form.dim, form.dim, info.min_rep);
                let fast = enumerate_centralizer(&form, &g, 10_000_000).unwrap();
                let slow = table.centralizer_elements(&g).unwrap();
                assert_eq!(fast.len() as u64, info.centralizer);
                let slow_packed: Vec<u128> = slow
                    .iter()
                    .map(|&i| table.el(i).pack_u128())
                    .collect();
                assert_eq!(fast, slow_packed, "{family:?} q={q} level={level}");
            }
        }
        // the limit is enforced (the identity's centralizer is the group)
        let form = standard_gram(Family::Sp, 1, 2).unwrap();
        let id = MatFq::identity(form.field.clone(), 2);
        assert!(matches!(
            enumerate_centralizer(&form, &id, 3),
            Err(Error::LimitExceeded(_))
        ));
    }

    #[test]
    fn hyperbolic_completion_cases() {
        // sp n=1: e1 completes to e2
        let sp1 = standard_gram(Family::Sp, 1, 2).unwrap();
        let u2 = hyperbolic_complete(&[1, 0], &sp1, None).unwrap();
        assert_eq!(sp1.eval(&[1, 0], &u2), 1);
        // oodd n=1 q=3: e2 is isotropic
        let o1 = standard_gram(Family::OOdd, 1, 3).unwrap();
        let u2 = hyperbolic_complete(&[0, 1, 0], &o1, None).unwrap();
        assert_eq!(o1.eval(&[0, 1, 0], &u2), 1);
        assert_eq!(o1.eval(&u2, &u2), 0);
        // hermitian q=2: search an isotropic vector first
        let h2 = standard_gram(Family::U, 2, 2).unwrap();
        let full = Subspace::full(h2.field.clone(), 2);
        let iso = find_isotropic(&h2, &full).unwrap();
        let u2 = hyperbolic_complete(&iso, &h2, None).unwrap();
        assert_eq!(h2.eval(&iso, &u2), 1);
        assert_eq!(h2.eval(&u2, &u2), 0);
        // errors
        assert!(matches!(
            hyperbolic_complete(&[0, 0], &sp1, None),
            Err(Error::ZeroVector)
        ));
        let o1b = standard_gram(Family::OOdd, 1, 3).unwrap();
        assert!(matches!(
            hyperbolic_complete(&[1, 0, 0], &o1b, None),
            Err(Error::NotIsotropic)
        ));
    }

    #[test]
    fn witt_decomposition_cases() {
        // full standard alternating space: (0, n, zero germ)
        let sp2 = standard_gram(Family::Sp, 2, 3).unwrap();
        let full = Subspace::full(sp2.field.clone(), 4);
        let d = witt_decompose(&sp2, &full).unwrap();
        assert_eq!((d.radical_dim, d.polar_rank, d.germ_dim), (0, 2, 0));
        // symmetric diag(1) over F_3 inside oodd: germ one
        let o1 = standard_gram(Family::OOdd, 1, 3).unwrap();
        let line = Subspace::from_rows(o1.field.clone(), 3, vec![vec![1, 0, 0]]);
        let d = witt_decompose(&o1, &line).unwrap();
        assert_eq!((d.radical_dim, d.polar_rank), (0, 0));
        assert_eq!(d.germ, Some(WittClass::One));
        // the negative-symmetric plane diag(1, -m): anisotropic, germ omega
        let om = standard_gram(Family::OMinus, 1, 3).unwrap();
        let plane = Subspace::full(om.field.clone(), 2);
        let d = witt_decompose(&om, &plane).unwrap();
        assert_eq!((d.radical_dim, d.polar_rank, d.germ_dim), (0, 0, 2));
        assert_eq!(d.germ, Some(WittClass::Omega));
        // ambient germs match the family tags
        for (family, n, q) in [(Family::OPlus, 2, 3u64), (Family::OMinus, 2, 3), (Family::OOdd, 2, 3)] {
            let form = standard_gram(family, n, q).unwrap();
            let full = Subspace::full(form.field.clone(), form.dim);
            let d = witt_decompose(&form, &full).unwrap();
            assert_eq!(d.germ, form.ambient_germ(), "{family:?}");
            assert_eq!(d.radical_dim, 0);
        }
    }

    #[test]
    fn witt_decomposition_isometry_invariant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let form = standard_gram(Family::OOdd, 1, 3).unwrap();
        let els = enumerate_isometry_group(&form, 1_000_000).unwrap();
        let subs = crate::matfq::enumerate_subspaces(&form.field, 3);
        for s in subs.iter().filter(|s| s.dim() > 0) {
            let base = witt_decompose(&form, s).unwrap();
            for _ in 0..20 {
                let g = MatFq::unpack_u64(
                    form.field.clone(),
                    3,
                    3,
                    els[rng.gen_range(0..els.len())],
                );
                let moved = s.map_by(&g);
                let d = witt_decompose(&form, &moved).unwrap();
                assert_eq!(d, base, "witt data is an isometry invariant");
            }
        }
    }
}
