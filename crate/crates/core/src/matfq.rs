//! Dense matrices over a finite field, reduced-row-echelon subspaces, Smith
//! normal form of tI - M over F_q[t], and extraction of the conjugacy type of
//! an invertible matrix.
//!
//! Two independent routes compute the type: the Smith-form route (elementary
//! divisors of the characteristic matrix) and a fast route via the
//! characteristic polynomial and kernel filtrations. The group tables use the
//! fast route; tests pin the two against each other.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fqpoly::{self, PolyFq};
use crate::gf::{Field, Scalar};
use crate::types::{Multipartition, Partition, PolyKey};

/// Row-major dense matrix over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct MatFq {
    pub field: Field,
    pub nrows: usize,
    pub ncols: usize,
    a: Vec<Scalar>,
}

impl std::fmt::Debug for MatFq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "MatFq {}x{} over GF({})", self.nrows, self.ncols, self.field.q)?;
        for i in 0..self.nrows {
            writeln!(f, "  {:?}", &self.a[i * self.ncols..(i + 1) * self.ncols])?;
        }
        Ok(())
    }
}

impl MatFq {
    pub fn zero(field: Field, nrows: usize, ncols: usize) -> Self {
        MatFq { field, nrows, ncols, a: vec![0; nrows * ncols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<Scalar>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut a = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols);
            a.extend_from_slice(r);
        }
        MatFq { field, nrows, ncols, a }
    }

    pub fn from_fn(field: Field, nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut m = Self::zero(field, nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.a[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.a[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.a[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.a
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.nrows)
                .all(|i| (0..self.ncols).all(|j| self.get(i, j) == u16::from(i == j)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let f = &self.field;
        let mut out = Self::zero(self.field.clone(), self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let aik = self.get(i, k);
                if aik == 0 {
                    continue;
                }
                for j in 0..other.ncols {
                    let v = f.mul(aik, other.get(k, j));
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, v));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let f = &self.field;
        let mut out = self.clone();
        for (o, b) in out.a.iter_mut().zip(&other.a) {
            *o = f.add(*o, *b);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let f = &self.field;
        let mut out = self.clone();
        for (o, b) in out.a.iter_mut().zip(&other.a) {
            *o = f.sub(*o, *b);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.field.clone(), self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Entrywise Frobenius then transpose; requires a quadratic extension.
    pub fn conj_transpose(&self) -> Result<Self> {
        let mut out = Self::zero(self.field.clone(), self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(j, i, self.field.frobenius_q(self.get(i, j))?);
            }
        }
        Ok(out)
    }

    /// Entrywise Frobenius.
    pub fn frobenius_map(&self) -> Result<Self> {
        let mut out = self.clone();
        for v in out.a.iter_mut() {
            *v = self.field.frobenius_q(*v)?;
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.ncols);
        let f = &self.field;
        (0..self.nrows)
            .map(|i| {
                let mut acc = 0;
                for j in 0..self.ncols {
                    acc = f.add(acc, f.mul(self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.nrows);
        let f = &self.field;
        (0..self.ncols)
            .map(|j| {
                let mut acc = 0;
                for i in 0..self.nrows {
                    acc = f.add(acc, f.mul(v[i], self.get(i, j)));
                }
                acc
            })
            .collect()
    }

    /// In-place row reduction to RREF; returns pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == self.nrows {
                break;
            }
            let Some(pr) = (r..self.nrows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.ncols {
                    let (x, y) = (self.get(r, j), self.get(pr, j));
                    self.set(r, j, y);
                    self.set(pr, j, x);
                }
            }
            let inv = f.inv(self.get(r, c)).unwrap();
            for j in 0..self.ncols {
                self.set(r, j, f.mul(self.get(r, j), inv));
            }
            for i in 0..self.nrows {
                if i != r && self.get(i, c) != 0 {
                    let factor = self.get(i, c);
                    for j in 0..self.ncols {
                        let v = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    pub fn det(&self) -> Scalar {
        assert!(self.is_square());
        let f = self.field.clone();
        let n = self.nrows;
        let mut m = self.clone();
        let mut det: Scalar = 1;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| m.get(i, c) != 0) else {
                return 0;
            };
            if pr != c {
                det = f.neg(det);
                for j in 0..n {
                    let (x, y) = (m.get(c, j), m.get(pr, j));
                    m.set(c, j, y);
                    m.set(pr, j, x);
                }
            }
            let piv = m.get(c, c);
            det = f.mul(det, piv);
            let inv = f.inv(piv).unwrap();
            for i in c + 1..n {
                if m.get(i, c) != 0 {
                    let factor = f.mul(m.get(i, c), inv);
                    for j in c..n {
                        let v = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                        m.set(i, j, v);
                    }
                }
            }
        }
        det
    }

    pub fn inv(&self) -> Result<Self> {
        assert!(self.is_square());
        let f = self.field.clone();
        let n = self.nrows;
        let mut m = self.clone();
        let mut out = Self::identity(self.field.clone(), n);
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| m.get(i, c) != 0) else {
                return Err(Error::Singular);
            };
            if pr != c {
                for j in 0..n {
                    let (x, y) = (m.get(c, j), m.get(pr, j));
                    m.set(c, j, y);
                    m.set(pr, j, x);
                    let (x, y) = (out.get(c, j), out.get(pr, j));
                    out.set(c, j, y);
                    out.set(pr, j, x);
                }
            }
            let inv = f.inv(m.get(c, c))?;
            for j in 0..n {
                m.set(c, j, f.mul(m.get(c, j), inv));
                out.set(c, j, f.mul(out.get(c, j), inv));
            }
            for i in 0..n {
                if i != c && m.get(i, c) != 0 {
                    let factor = m.get(i, c);
                    for j in 0..n {
                        let v = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                        m.set(i, j, v);
                        let v = f.sub(out.get(i, j), f.mul(factor, out.get(c, j)));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Inverse transpose, the dual action.
    pub fn inv_t(&self) -> Result<Self> {
        Ok(self.inv()?.transpose())
    }

    /// Solves Mx = rhs: returns a particular solution and a kernel basis,
    /// or None when inconsistent.
    pub fn solve_affine(&self, rhs: &[Scalar]) -> Option<(Vec<Scalar>, Vec<Vec<Scalar>>)> {
        assert_eq!(rhs.len(), self.nrows);
        let f = &self.field;
        let mut aug = MatFq::zero(self.field.clone(), self.nrows, self.ncols + 1);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.ncols, rhs[i]);
        }
        let pivots = aug.rref_in_place();
        if pivots.contains(&self.ncols) {
            return None; // pivot in the augmented column
        }
        let mut part = vec![0; self.ncols];
        for (ri, &p) in pivots.iter().enumerate() {
            part[p] = aug.get(ri, self.ncols);
        }
        let mut pivset = vec![false; self.ncols];
        for &p in &pivots {
            pivset[p] = true;
        }
        let mut kernel = Vec::new();
        for free in 0..self.ncols {
            if pivset[free] {
                continue;
            }
            let mut v = vec![0; self.ncols];
            v[free] = 1;
            for (ri, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(aug.get(ri, free));
            }
            kernel.push(v);
        }
        Some((part, kernel))
    }

    /// Kernel {x : Mx = 0} as a canonical subspace of F^ncols.
    pub fn kernel(&self) -> Subspace {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let f = &self.field;
        let mut rows = Vec::new();
        let pivset: Vec<bool> = {
            let mut v = vec![false; self.ncols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        for free in 0..self.ncols {
            if pivset[free] {
                continue;
            }
            let mut v = vec![0; self.ncols];
            v[free] = 1;
            for (ri, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(m.get(ri, free));
            }
            rows.push(v);
        }
        Subspace::from_rows(self.field.clone(), self.ncols, rows)
    }

    /// Block sum with the d x d identity.
    pub fn block_embed(&self, d: usize) -> Self {
        assert!(self.is_square());
        let n = self.nrows;
        let mut out = Self::identity(self.field.clone(), n + d);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Leading principal block, asserting the rest is the identity pattern.
    pub fn block_restrict(&self, n: usize) -> Result<Self> {
        assert!(self.is_square() && n <= self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                if (i >= n || j >= n) && self.get(i, j) != u16::from(i == j) {
                    return Err(Error::InvalidInput(
                        "matrix is not an identity extension".into(),
                    ));
                }
            }
        }
        let mut out = Self::zero(self.field.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(i, j));
            }
        }
        Ok(out)
    }

    /// True when the matrix agrees with the identity outside the leading
    /// n x n block.
    pub fn is_identity_beyond(&self, n: usize) -> bool {
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                if (i >= n || j >= n) && self.get(i, j) != u16::from(i == j) {
                    return false;
                }
            }
        }
        true
    }

    pub fn block_diag(field: Field, blocks: &[MatFq]) -> Self {
        let n: usize = blocks.iter().map(|b| b.nrows).sum();
        let mut out = Self::zero(field, n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.nrows {
                for j in 0..b.ncols {
                    out.set(off + i, off + j, b.get(i, j));
                }
            }
            off += b.nrows;
        }
        out
    }

    pub fn companion(p: &PolyFq) -> Self {
        let cols = fqpoly::companion_columns(p);
        let n = cols.len();
        let mut m = Self::zero(p.field.clone(), n, n);
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// p(M) by Horner evaluation.
    pub fn eval_poly(&self, p: &PolyFq) -> Self {
        assert!(self.is_square());
        let n = self.nrows;
        let mut acc = Self::zero(self.field.clone(), n, n);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul(self);
            for i in 0..n {
                acc.set(i, i, self.field.add(acc.get(i, i), c));
            }
        }
        acc
    }

    pub fn pow(&self, e: u64) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.field.clone(), self.nrows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Bits per entry in the packed layout.
    pub fn bits_per_entry(q: u64) -> u32 {
        64 - (q - 1).leading_zeros() as u32
    }

    /// Packs into a little-endian bit stream, row-major, padded to 64-bit
    /// words. Matrices used by the group tables fit one word.
    pub fn pack_words(&self) -> Vec<u64> {
        let bits = Self::bits_per_entry(self.field.q) as usize;
        let total = bits * self.a.len();
        let mut out = vec![0u64; total.div_ceil(64).max(1)];
        for (idx, &v) in self.a.iter().enumerate() {
            let off = idx * bits;
            let (w, b) = (off / 64, off % 64);
            out[w] |= (v as u64) << b;
            if b + bits > 64 {
                out[w + 1] |= (v as u64) >> (64 - b);
            }
        }
        out
    }

    pub fn pack_u64(&self) -> u64 {
        let bits = Self::bits_per_entry(self.field.q) as usize;
        assert!(bits * self.a.len() <= 64, "matrix does not fit one word");
        let mut out = 0u64;
        for (idx, &v) in self.a.iter().enumerate() {
            out |= (v as u64) << (idx * bits);
        }
        out
    }

    /// Wider packing for matrices beyond 64 bits (e.g. 6x6 over F_3).
    pub fn pack_u128(&self) -> u128 {
        let bits = Self::bits_per_entry(self.field.q) as usize;
        assert!(bits * self.a.len() <= 128, "matrix does not fit two words");
        let mut out = 0u128;
        for (idx, &v) in self.a.iter().enumerate() {
            out |= (v as u128) << (idx * bits);
        }
        out
    }

    pub fn unpack_u128(field: Field, nrows: usize, ncols: usize, w: u128) -> Self {
        let bits = Self::bits_per_entry(field.q) as usize;
        let mask = (1u128 << bits) - 1;
        let mut m = Self::zero(field, nrows, ncols);
        for idx in 0..nrows * ncols {
            m.a[idx] = ((w >> (idx * bits)) & mask) as Scalar;
        }
        m
    }

    pub fn unpack_u64(field: Field, nrows: usize, ncols: usize, w: u64) -> Self {
        let bits = Self::bits_per_entry(field.q) as usize;
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        let mut m = Self::zero(field, nrows, ncols);
        for idx in 0..nrows * ncols {
            m.a[idx] = ((w >> (idx * bits)) & mask) as Scalar;
        }
        m
    }
}

/// Subspace of F^ambient in canonical reduced row echelon form. Two subspaces
/// are equal iff their representations are identical.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    pub field: Field,
    pub ambient: usize,
    rows: MatFq,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace dim {} of F^{}: {:?}", self.dim(), self.ambient, self.rows)
    }
}

impl Subspace {
    pub fn from_rows(field: Field, ambient: usize, rows: Vec<Vec<Scalar>>) -> Self {
        let mut m = MatFq::from_rows(field.clone(), &rows);
        if rows.is_empty() {
            m = MatFq::zero(field.clone(), 0, ambient);
        }
        let pivots = m.rref_in_place();
        let dim = pivots.len();
        let mut basis = MatFq::zero(field.clone(), dim, ambient);
        for i in 0..dim {
            for j in 0..ambient {
                basis.set(i, j, m.get(i, j));
            }
        }
        Subspace { field, ambient, rows: basis }
    }

    pub fn zero_space(field: Field, ambient: usize) -> Self {
        Subspace { field: field.clone(), ambient, rows: MatFq::zero(field, 0, ambient) }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Subspace { field: field.clone(), ambient, rows: MatFq::identity(field, ambient) }
    }

    /// Span of standard basis vectors e_{from+1}, ..., e_{ambient}.
    pub fn coordinate_tail(field: Field, ambient: usize, from: usize) -> Self {
        let rows: Vec<Vec<Scalar>> = (from..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Self::from_rows(field, ambient, rows)
    }

    pub fn dim(&self) -> usize {
        self.rows.nrows
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    pub fn basis(&self) -> &MatFq {
        &self.rows
    }

    pub fn basis_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim()).map(|i| self.rows.row(i).to_vec()).collect()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        // reduce v against the RREF basis
        let f = &self.field;
        let mut v = v.to_vec();
        for i in 0..self.dim() {
            let pivot = (0..self.ambient).find(|&j| self.rows.get(i, j) != 0).unwrap();
            if v[pivot] != 0 {
                let c = v[pivot];
                for j in 0..self.ambient {
                    v[j] = f.sub(v[j], f.mul(c, self.rows.get(i, j)));
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        (0..other.dim()).all(|i| self.contains(other.rows.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Subspace::from_rows(self.field.clone(), self.ambient, rows)
    }

    /// Intersection by the Zassenhaus block trick.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let n = self.ambient;
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for r in self.basis_rows() {
            let mut v = r.clone();
            v.extend_from_slice(&r);
            rows.push(v);
        }
        for r in other.basis_rows() {
            let mut v = r.clone();
            v.extend(vec![0; n]);
            rows.push(v);
        }
        if rows.is_empty() {
            return Subspace::zero_space(self.field.clone(), n);
        }
        let mut m = MatFq::from_rows(self.field.clone(), &rows);
        m.rref_in_place();
        let mut out = Vec::new();
        for i in 0..m.nrows {
            let left_zero = (0..n).all(|j| m.get(i, j) == 0);
            let right = (n..2 * n).map(|j| m.get(i, j)).collect::<Vec<_>>();
            if left_zero && right.iter().any(|&x| x != 0) {
                out.push(right);
            }
        }
        Subspace::from_rows(self.field.clone(), n, out)
    }

    /// Orthogonal complement for the standard dot pairing <e_i, e_j> = delta.
    pub fn perp_dot(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.field.clone(), self.ambient);
        }
        self.rows.kernel()
    }

    /// Image under an invertible matrix acting on column vectors.
    pub fn map_by(&self, g: &MatFq) -> Subspace {
        let rows: Vec<Vec<Scalar>> = (0..self.dim())
            .map(|i| g.mul_vec(self.rows.row(i)))
            .collect();
        Subspace::from_rows(self.field.clone(), self.ambient, rows)
    }

    /// Subspace of vectors supported on the first k coordinates.
    pub fn restrict_to_first(&self, k: usize) -> Subspace {
        let head = Subspace::from_rows(
            self.field.clone(),
            self.ambient,
            (0..k)
                .map(|i| {
                    let mut v = vec![0; self.ambient];
                    v[i] = 1;
                    v
                })
                .collect(),
        );
        self.intersect(&head)
    }

    /// Same basis inside a larger ambient space; `with_tail` also adjoins the
    /// unit vectors e_{old+1}..e_{new} (the smooth-subspace convention).
    pub fn extend_ambient(&self, new_ambient: usize, with_tail: bool) -> Subspace {
        assert!(new_ambient >= self.ambient);
        let mut rows: Vec<Vec<Scalar>> = self
            .basis_rows()
            .into_iter()
            .map(|mut r| {
                r.resize(new_ambient, 0);
                r
            })
            .collect();
        if with_tail {
            for i in self.ambient..new_ambient {
                let mut v = vec![0; new_ambient];
                v[i] = 1;
                rows.push(v);
            }
        }
        Subspace::from_rows(self.field.clone(), new_ambient, rows)
    }

    /// Canonical dedup key.
    pub fn key(&self) -> (usize, Vec<Scalar>) {
        (self.dim(), self.rows.entries().to_vec())
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if k > n {
        return vec![];
    }
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        out.push(combo.clone());
        // advance rightmost index that can still move
        let mut i = k;
        while i > 0 {
            i -= 1;
            if combo[i] < n - (k - i) {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return out;
            }
        }
    }
}

/// All subspaces of F^n, enumerated by RREF shape; deterministic order.
pub fn enumerate_subspaces(field: &Field, n: usize) -> Vec<Subspace> {
    let mut out = Vec::new();
    let q = field.q;
    for k in 0..=n {
        for combo in combinations(n, k) {
            // free positions: (row i, col j) with j > pivot[i], j not a pivot
            let mut free_pos = Vec::new();
            for i in 0..k {
                for j in combo[i] + 1..n {
                    if !combo.contains(&j) {
                        free_pos.push((i, j));
                    }
                }
            }
            let total = q.pow(free_pos.len() as u32);
            for mut code in 0..total {
                let mut rows = vec![vec![0 as Scalar; n]; k];
                for i in 0..k {
                    rows[i][combo[i]] = 1;
                }
                for &(i, j) in &free_pos {
                    rows[i][j] = (code % q) as Scalar;
                    code /= q;
                }
                out.push(Subspace::from_rows(field.clone(), n, rows));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Smith normal form of tI - M over F_q[t]
// ---------------------------------------------------------------------------

/// Invariant factors d_1 | d_2 | ... | d_n of the characteristic matrix
/// tI - M, normalized monic; units are returned as the constant 1.
pub fn smith_invariant_factors(m: &MatFq) -> Vec<PolyFq> {
    assert!(m.is_square());
    let n = m.nrows;
    let field = m.field.clone();
    // A = tI - M as a polynomial matrix
    let mut a: Vec<Vec<PolyFq>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mij = field.neg(m.get(i, j));
                    if i == j {
                        PolyFq::new(field.clone(), vec![mij, 1])
                    } else {
                        PolyFq::new(field.clone(), vec![mij])
                    }
                })
                .collect()
        })
        .collect();

    let mut out: Vec<PolyFq> = Vec::with_capacity(n);
    for top in 0..n {
        'reduce: loop {
            // deterministic pivot: lowest degree nonzero entry, ties by
            // row-major position
            let mut best: Option<(usize, usize, usize)> = None;
            for i in top..n {
                for j in top..n {
                    if !a[i][j].is_zero() {
                        let d = a[i][j].degree();
                        if best.is_none_or(|(bd, _, _)| d < bd) {
                            best = Some((d, i, j));
                        }
                    }
                }
            }
            let Some((_, pi, pj)) = best else {
                // all-zero submatrix
                for _ in top..n {
                    out.push(PolyFq::zero(field.clone()));
                }
                return out;
            };
            a.swap(top, pi);
            for row in a.iter_mut() {
                row.swap(top, pj);
            }
            // clear column
            let mut dirty = false;
            for i in top + 1..n {
                if !a[i][top].is_zero() {
                    let (q, _) = a[i][top].divmod(&a[top][top]).unwrap();
                    for j in top..n {
                        let s = q.mul(&a[top][j]);
                        a[i][j] = a[i][j].sub(&s);
                    }
                    if !a[i][top].is_zero() {
                        dirty = true;
                    }
                }
            }
            // clear row
            for j in top + 1..n {
                if !a[top][j].is_zero() {
                    let (q, _) = a[top][j].divmod(&a[top][top]).unwrap();
                    for i in top..n {
                        let s = q.mul(&a[i][top]);
                        a[i][j] = a[i][j].sub(&s);
                    }
                    if !a[top][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'reduce;
            }
            // divisibility fixup: pivot must divide every remaining entry
            for i in top + 1..n {
                for j in top + 1..n {
                    if !a[i][j].is_zero() && !a[top][top].divides(&a[i][j]) {
                        // add row i to row top and restart reduction
                        for jj in top..n {
                            a[top][jj] = a[top][jj].add(&a[i][jj]);
                        }
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        out.push(a[top][top].make_monic());
    }
    out
}

// ---------------------------------------------------------------------------
// Characteristic polynomial (Hessenberg route) and fast type extraction
// ---------------------------------------------------------------------------

/// det(tI - M) by Hessenberg reduction; works over any finite field.
pub fn char_poly(m: &MatFq) -> PolyFq {
    assert!(m.is_square());
    let n = m.nrows;
    let field = m.field.clone();
    if n == 0 {
        return PolyFq::one(field);
    }
    let f = field.clone();
    let mut h = m.clone();
    for c in 0..n.saturating_sub(2) {
        let Some(pr) = (c + 1..n).find(|&i| h.get(i, c) != 0) else {
            continue;
        };
        if pr != c + 1 {
            // swap rows and columns (similarity)
            for j in 0..n {
                let (x, y) = (h.get(c + 1, j), h.get(pr, j));
                h.set(c + 1, j, y);
                h.set(pr, j, x);
            }
            for i in 0..n {
                let (x, y) = (h.get(i, c + 1), h.get(i, pr));
                h.set(i, c + 1, y);
                h.set(i, pr, x);
            }
        }
        let inv = f.inv(h.get(c + 1, c)).unwrap();
        for i in c + 2..n {
            if h.get(i, c) != 0 {
                let factor = f.mul(h.get(i, c), inv);
                // row_i -= factor * row_{c+1}
                for j in 0..n {
                    let v = f.sub(h.get(i, j), f.mul(factor, h.get(c + 1, j)));
                    h.set(i, j, v);
                }
                // col_{c+1} += factor * col_i
                for r in 0..n {
                    let v = f.add(h.get(r, c + 1), f.mul(factor, h.get(r, i)));
                    h.set(r, c + 1, v);
                }
            }
        }
    }
    // p_k = (t - h[k-1][k-1]) p_{k-1}
    //       - sum_m h[k-1-m][k-1] (prod subdiag) p_{k-1-m}
    let mut ps: Vec<PolyFq> = vec![PolyFq::one(field.clone())];
    for k in 1..=n {
        let lin = PolyFq::new(field.clone(), vec![f.neg(h.get(k - 1, k - 1)), 1]);
        let mut p = ps[k - 1].mul(&lin);
        let mut subdiag: Scalar = 1;
        for mstep in 1..k {
            subdiag = f.mul(subdiag, h.get(k - mstep, k - mstep - 1));
            if subdiag == 0 {
                break;
            }
            let coef = f.mul(h.get(k - 1 - mstep, k - 1), subdiag);
            if coef != 0 {
                p = p.sub(&ps[k - 1 - mstep].scale(coef));
            }
        }
        ps.push(p);
    }
    ps.pop().unwrap()
}

/// Shared context for fast type extraction: factorizations of all candidate
/// characteristic polynomials of invertible matrices up to a given size.
pub struct TypeCtx {
    pub field: Field,
    pub nmax: usize,
    fact: HashMap<Vec<Scalar>, Vec<(PolyFq, u32)>>,
}

impl TypeCtx {
    pub fn new(field: Field, nmax: usize) -> Result<TypeCtx> {
        let mut fact = HashMap::new();
        // all monic degree-nmax polynomials with nonzero constant term
        let total = field
            .q
            .checked_pow(nmax as u32)
            .ok_or_else(|| Error::LimitExceeded("type context too large".into()))?;
        for idx in 0..total {
            let mut c: Vec<Scalar> = Vec::with_capacity(nmax + 1);
            let mut x = idx;
            for _ in 0..nmax {
                c.push((x % field.q) as Scalar);
                x /= field.q;
            }
            c.push(1);
            if c[0] == 0 {
                continue;
            }
            let p = PolyFq::new(field.clone(), c.clone());
            let (_, fs) = fqpoly::factor(&p)?;
            fact.insert(c, fs);
        }
        Ok(TypeCtx { field, nmax, fact })
    }

    /// Type of an invertible nmax x nmax matrix via characteristic polynomial
    /// and kernel filtrations.
    pub fn type_of_fast(&self, m: &MatFq) -> Multipartition {
        debug_assert_eq!(m.nrows, self.nmax);
        let cp = char_poly(m);
        let mut key = cp.coeffs().to_vec();
        key.resize(self.nmax + 1, 0);
        let factors = self
            .fact
            .get(&key)
            .expect("characteristic polynomial of invertible matrix");
        let mut mp = Multipartition::new();
        for (r, e) in factors {
            if *e == 1 {
                mp.insert(PolyKey::from_poly(r), Partition::new(vec![1]));
                continue;
            }
            let d = r.degree();
            let rm = m.eval_poly(r);
            // conj[j] = (dim ker r(M)^j - dim ker r(M)^(j-1)) / deg r
            let mut conj: Vec<u32> = Vec::new();
            let mut prev = 0usize;
            let mut pw = rm.clone();
            loop {
                let dk = m.nrows - pw.rank();
                let c = (dk - prev) / d;
                if c == 0 {
                    break;
                }
                conj.push(c as u32);
                prev = dk;
                if (dk / d) as u32 >= *e {
                    break;
                }
                pw = pw.mul(&rm);
            }
            mp.insert(PolyKey::from_poly(r), Partition::conjugate_of(&conj));
        }
        mp
    }
}

/// Type of an invertible matrix from the Smith normal form of tI - M: the
/// multipartition recording multiplicities of elementary divisors r^i.
pub fn type_of(m: &MatFq) -> Result<Multipartition> {
    if m.det() == 0 {
        return Err(Error::Singular);
    }
    let inv = smith_invariant_factors(m);
    let mut per_poly: HashMap<PolyKey, Vec<u32>> = HashMap::new();
    for d in &inv {
        if d.degree() == 0 {
            continue;
        }
        let (_, fs) = fqpoly::factor(d)?;
        for (r, e) in fs {
            per_poly.entry(PolyKey::from_poly(&r)).or_default().push(e);
        }
    }
    let mut mp = Multipartition::new();
    for (k, mut parts) in per_poly {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        mp.insert(k, Partition::new(parts));
    }
    Ok(mp)
}

/// Canonical representative of a type: block-diagonal companion matrices of
/// the elementary divisors, in multipartition key order, largest parts first.
pub fn representative_of_type(field: &Field, mp: &Multipartition) -> MatFq {
    let mut blocks = Vec::new();
    for (key, part) in mp.iter() {
        let r = key.to_poly(field);
        for &e in part.parts() {
            blocks.push(MatFq::companion(&r.pow(e)));
        }
    }
    MatFq::block_diag(field.clone(), &blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;
    use rand::{Rng, SeedableRng};

    fn f2() -> Field {
        field_make(2, 1).unwrap()
    }
    fn f3() -> Field {
        field_make(3, 1).unwrap()
    }
    fn f4() -> Field {
        field_make(2, 2).unwrap()
    }

    fn rand_mat(field: &Field, n: usize, rng: &mut impl Rng) -> MatFq {
        let rows: Vec<Vec<Scalar>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(0..field.q) as Scalar).collect())
            .collect();
        MatFq::from_rows(field.clone(), &rows)
    }

    fn rand_invertible(field: &Field, n: usize, rng: &mut impl Rng) -> MatFq {
        loop {
            let m = rand_mat(field, n, rng);
            if m.det() != 0 {
                return m;
            }
        }
    }

    #[test]
    fn det_and_inverse() {
        assert_eq!(MatFq::identity(f3(), 3).det(), 1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for field in [f2(), f3(), f4()] {
            for n in 1..=4 {
                for _ in 0..100 {
                    let m = rand_invertible(&field, n, &mut rng);
                    assert!(m.inv().unwrap().mul(&m).is_identity());
                }
            }
        }
    }

    #[test]
    fn kernel_of_transvection() {
        let g = MatFq::from_rows(f2(), &[vec![1, 1], vec![0, 1]]);
        let gm1 = g.sub(&MatFq::identity(f2(), 2));
        let k = gm1.kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[1, 0]));
    }

    #[test]
    fn subspace_count_matches_gaussian_binomial() {
        // F_2^4: total subspaces = sum over k of [4 choose k]_2 = 67
        let subs = enumerate_subspaces(&f2(), 4);
        assert_eq!(subs.len(), 67);
        let mut keys: Vec<_> = subs.iter().map(|s| s.key()).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 67);
        let subs = enumerate_subspaces(&f3(), 3);
        // 1 + 13 + 13 + 1
        assert_eq!(subs.len(), 28);
    }

    #[test]
    fn zassenhaus_intersect_sum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for field in [f2(), f3()] {
            for _ in 0..200 {
                let n = rng.gen_range(1..=4);
                let d1 = rng.gen_range(0..=n);
                let d2 = rng.gen_range(0..=n);
                let mk = |d: usize, rng: &mut rand_chacha::ChaCha8Rng| {
                    let rows: Vec<Vec<Scalar>> = (0..d)
                        .map(|_| (0..n).map(|_| rng.gen_range(0..field.q) as Scalar).collect())
                        .collect();
                    Subspace::from_rows(field.clone(), n, rows)
                };
                let a = mk(d1, &mut rng);
                let b = mk(d2, &mut rng);
                let i = a.intersect(&b);
                let s = a.sum(&b);
                assert_eq!(i.dim() + s.dim(), a.dim() + b.dim());
                assert!(a.contains_subspace(&i));
                assert!(b.contains_subspace(&i));
                assert!(s.contains_subspace(&a));
                // perp duality
                let pa = a.perp_dot();
                assert_eq!(pa.dim(), n - a.dim());
                assert_eq!(pa.perp_dot(), a);
            }
        }
    }

    #[test]
    fn smith_basics() {
        // identity_2 over F_2: tI - I has invariant factors (t+1, t+1)
        let inv = smith_invariant_factors(&MatFq::identity(f2(), 2));
        assert_eq!(inv.len(), 2);
        assert_eq!(inv[0].to_string(), "t+1");
        assert_eq!(inv[1].to_string(), "t+1");
        // companion of t^2+t+1 over F_2: invariant factors (1, t^2+t+1)
        let c = MatFq::companion(&PolyFq::new(f2(), vec![1, 1, 1]));
        let inv = smith_invariant_factors(&c);
        assert_eq!(inv[0].to_string(), "1");
        assert_eq!(inv[1].to_string(), "t^2+t+1");
    }

    #[test]
    fn smith_jordan_blocks_merge() {
        // J_3(1) + I_2 over F_3: elementary divisors (t-1)^3, (t-1), (t-1),
        // so the invariant factor chain is 1, 1, t-1, t-1, (t-1)^3
        let tm1 = PolyFq::t_minus_one(f3());
        let j3 = MatFq::companion(&tm1.pow(3));
        let m = MatFq::block_diag(f3(), &[j3, MatFq::identity(f3(), 2)]);
        let inv = smith_invariant_factors(&m);
        let strs: Vec<String> = inv.iter().map(|p| p.to_string()).collect();
        assert_eq!(strs, vec!["1", "1", "t+2", "t+2", "t^3+2"]);
        // the top factor is (t-1)^3 = t^3 - 1 in characteristic 3
        assert_eq!(inv[4], tm1.pow(3));
        // and the resulting type is (3,1,1) at t-1
        let mp = type_of(&m).unwrap();
        assert_eq!(
            mp.get(&PolyKey::from_poly(&tm1)).unwrap().parts(),
            &[3, 1, 1]
        );
    }

    #[test]
    fn smith_product_is_char_poly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for field in [f2(), f3(), f4()] {
            for n in 1..=4 {
                for _ in 0..50 {
                    let m = rand_mat(&field, n, &mut rng);
                    let inv = smith_invariant_factors(&m);
                    let mut prod = PolyFq::one(field.clone());
                    for d in &inv {
                        prod = prod.mul(d);
                    }
                    assert_eq!(prod, char_poly(&m), "invariant factor product");
                    // divisibility chain
                    for w in inv.windows(2) {
                        if !w[0].is_zero() && !w[1].is_zero() {
                            assert!(w[0].divides(&w[1]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn char_poly_matches_eigen_structure() {
        // companion matrix of p has char poly p
        for field in [f2(), f3()] {
            for p in crate::fqpoly::irreducibles_up_to(3, &field).unwrap() {
                let c = MatFq::companion(&p);
                assert_eq!(char_poly(&c), p);
            }
        }
    }

    #[test]
    fn type_examples() {
        // identity_n has type (1^n) at t-1
        let mp = type_of(&MatFq::identity(f2(), 3)).unwrap();
        let tm1 = PolyKey::from_poly(&PolyFq::t_minus_one(f2()));
        assert_eq!(mp.iter().count(), 1);
        assert_eq!(mp.get(&tm1).unwrap().parts(), &[1, 1, 1]);
        // transvection has type (2) at t-1
        let g = MatFq::from_rows(f2(), &[vec![1, 1], vec![0, 1]]);
        let mp = type_of(&g).unwrap();
        assert_eq!(mp.get(&tm1).unwrap().parts(), &[2]);
        // companion of (t^2+t+1)^2 over F_2 has type (2) at t^2+t+1
        let r = PolyFq::new(f2(), vec![1, 1, 1]);
        let c = MatFq::companion(&r.pow(2));
        let mp = type_of(&c).unwrap();
        assert_eq!(mp.get(&PolyKey::from_poly(&r)).unwrap().parts(), &[2]);
        // block_embed appends parts of size 1 at t-1
        let e = g.block_embed(1);
        let mp = type_of(&e).unwrap();
        assert_eq!(mp.get(&tm1).unwrap().parts(), &[2, 1]);
    }

    #[test]
    fn example_matrix_mod3_type() {
        // the 11x11 example matrix reduced mod 3: type (3,1,1) at t-1 and
        // (2,1) at t^2+1 (irreducible over F_3)
        let f = f3();
        let tm1 = PolyFq::t_minus_one(f.clone());
        let t2p1 = PolyFq::new(f.clone(), vec![1, 0, 1]);
        let j3 = MatFq::from_rows(f.clone(), &[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]);
        let c4 = MatFq::companion(&t2p1.pow(2));
        let c2 = MatFq::companion(&t2p1);
        let m = MatFq::block_diag(
            f.clone(),
            &[j3, MatFq::identity(f.clone(), 2), c4, c2],
        );
        assert_eq!(m.nrows, 11);
        let mp = type_of(&m).unwrap();
        assert_eq!(mp.get(&PolyKey::from_poly(&tm1)).unwrap().parts(), &[3, 1, 1]);
        assert_eq!(mp.get(&PolyKey::from_poly(&t2p1)).unwrap().parts(), &[2, 1]);
        assert_eq!(mp.size(), 11);
    }

    #[test]
    fn fast_type_agrees_with_smith_type() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for field in [f2(), f3(), f4()] {
            for n in 1..=4 {
                let ctx = TypeCtx::new(field.clone(), n).unwrap();
                for _ in 0..150 {
                    let m = rand_invertible(&field, n, &mut rng);
                    assert_eq!(ctx.type_of_fast(&m), type_of(&m).unwrap());
                }
            }
        }
    }

    #[test]
    fn type_is_conjugation_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for field in [f2(), f3()] {
            for n in 1..=4 {
                for _ in 0..125 {
                    let g = rand_invertible(&field, n, &mut rng);
                    let x = rand_invertible(&field, n, &mut rng);
                    let c = x.mul(&g).mul(&x.inv().unwrap());
                    assert_eq!(type_of(&g).unwrap(), type_of(&c).unwrap());
                }
            }
        }
    }

    #[test]
    fn representative_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for field in [f2(), f3()] {
            for n in 1..=4 {
                for _ in 0..50 {
                    let m = rand_invertible(&field, n, &mut rng);
                    let mp = type_of(&m).unwrap();
                    let rep = representative_of_type(&field, &mp);
                    assert_eq!(rep.nrows, n);
                    assert_eq!(type_of(&rep).unwrap(), mp);
                }
            }
        }
    }

    #[test]
    fn pack_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for field in [f2(), f3(), f4(), field_make(5, 1).unwrap()] {
            for n in 1..=4 {
                for _ in 0..50 {
                    let m = rand_mat(&field, n, &mut rng);
                    let w = m.pack_u64();
                    let back = MatFq::unpack_u64(field.clone(), n, n, w);
                    assert_eq!(m, back);
                    assert_eq!(m.pack_words()[0], w);
                }
            }
        }
    }

    #[test]
    fn conj_transpose_involution() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let field = f4();
        for _ in 0..50 {
            let m = rand_mat(&field, 3, &mut rng);
            let ct = m.conj_transpose().unwrap();
            assert_eq!(ct.conj_transpose().unwrap(), m);
        }
        let g = MatFq::from_rows(field.clone(), &[vec![2]]);
        assert_eq!(g.conj_transpose().unwrap().get(0, 0), 3); // sigma(g)=g+1
    }
}
