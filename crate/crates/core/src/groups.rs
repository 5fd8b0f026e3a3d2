//! Group tables for GL and the classical families: exhaustive enumeration,
//! conjugacy-class partitions, centralizers, cross-rank stable matching of
//! classes, and the on-disk cache.
//!
//! GL conjugacy classes are type fibers (no orbit computation); classical
//! groups get a full conjugation sweep, since a GL-type fiber may split into
//! several classes there. Classical class labels carry a disambiguation index
//! assigned stably along the embedding chain from the smallest rank up.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use num::ToPrimitive;
use rayon::prelude::*;

use crate::centrformulas::gl_order;
use crate::error::{Error, Result};
use crate::forms::{enumerate_isometry_group, standard_gram, FormSpec};
use crate::gf::{field_make, Field, Scalar};
use crate::matfq::{MatFq, TypeCtx};
use crate::types::{Family, Multipartition, PolyKey, StableLabel};

pub const CACHE_VERSION: u32 = 1;
pub const DEFAULT_LIMIT: u64 = 30_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupKey {
    pub family: Family,
    pub q: u64,
    pub level: usize,
}

impl std::fmt::Display for GroupKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}_q{}_n{}", self.family.tag(), self.q, self.level)
    }
}

/// Sorted table of all group elements in packed form.
pub struct GroupTable {
    pub key: GroupKey,
    pub dim: usize,
    pub field: Field,
    pub els: Vec<u64>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.els.len()
    }

    pub fn index_of(&self, packed: u64) -> Option<u32> {
        self.els.binary_search(&packed).ok().map(|i| i as u32)
    }

    pub fn el(&self, i: u32) -> MatFq {
        MatFq::unpack_u64(self.field.clone(), self.dim, self.dim, self.els[i as usize])
    }

    pub fn identity_index(&self) -> u32 {
        let id = MatFq::identity(self.field.clone(), self.dim).pack_u64();
        self.index_of(id).expect("identity in group")
    }

    /// The matrix field's t-1 key.
    pub fn tm1(&self) -> PolyKey {
        PolyKey::t_minus_one(&self.field)
    }

    /// Brute-force centralizer size of g by full scan.
    pub fn centralizer_size_scan(&self, g: &MatFq) -> Result<u64> {
        if self.index_of(g.pack_u64()).is_none() {
            return Err(Error::NotInGroup);
        }
        let count = self
            .els
            .par_iter()
            .filter(|&&w| {
                let x = MatFq::unpack_u64(self.field.clone(), self.dim, self.dim, w);
                x.mul(g) == g.mul(&x)
            })
            .count();
        Ok(count as u64)
    }

    /// Centralizer members by full scan.
    pub fn centralizer_elements(&self, g: &MatFq) -> Result<Vec<u32>> {
        if self.index_of(g.pack_u64()).is_none() {
            return Err(Error::NotInGroup);
        }
        let v: Vec<u32> = self
            .els
            .par_iter()
            .enumerate()
            .filter_map(|(i, &w)| {
                let x = MatFq::unpack_u64(self.field.clone(), self.dim, self.dim, w);
                (x.mul(g) == g.mul(&x)).then_some(i as u32)
            })
            .collect();
        Ok(v)
    }
}

/// Per-class data: minimal representative, size, centralizer size, GL-type,
/// modified type, and the stable label.
#[derive(Debug, Clone)]
pub struct ClassInfo {
    pub min_rep: u64,
    pub size: u64,
    pub centralizer: u64,
    pub gl_type: Multipartition,
    pub modified: Multipartition,
    pub label: StableLabel,
}

pub struct ClassTable {
    pub key: GroupKey,
    /// class id per element ordinal
    pub class_of: Vec<u32>,
    pub classes: Vec<ClassInfo>,
}

impl ClassTable {
    pub fn by_label(&self, label: &StableLabel) -> Option<u32> {
        self.classes
            .iter()
            .position(|c| c.label == *label)
            .map(|i| i as u32)
    }

    pub fn members(&self, cid: u32) -> Vec<u32> {
        self.class_of
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c == cid).then_some(i as u32))
            .collect()
    }
}

/// Shared context: memoized group/class tables, cache directory, limits.
pub struct GroupCtx {
    pub cache_dir: Option<PathBuf>,
    pub limit: u64,
    /// largest GL order that still gets a full table in products; beyond it
    /// the type-driven route is used
    pub table_threshold: u64,
    groups: Mutex<HashMap<GroupKey, Arc<GroupTable>>>,
    classes: Mutex<HashMap<GroupKey, Arc<ClassTable>>>,
}

impl GroupCtx {
    pub fn new(cache_dir: Option<PathBuf>, limit: u64) -> Self {
        GroupCtx {
            cache_dir,
            limit,
            table_threshold: 1_000_000,
            groups: Mutex::new(HashMap::new()),
            classes: Mutex::new(HashMap::new()),
        }
    }

    pub fn in_memory() -> Self {
        Self::new(None, DEFAULT_LIMIT)
    }

    pub fn matrix_field(&self, family: Family, q: u64) -> Result<Field> {
        let size = family.matrix_field_size(q);
        let (p, k) = crate::gf::split_prime_power(size)
            .ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        field_make(p, k)
    }

    pub fn form(&self, family: Family, q: u64, level: usize) -> Result<FormSpec> {
        standard_gram(family, level, q)
    }

    /// Builds (or loads) the full element table.
    pub fn group(&self, family: Family, q: u64, level: usize) -> Result<Arc<GroupTable>> {
        let key = GroupKey { family, q, level };
        if let Some(t) = self.groups.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let field = self.matrix_field(family, q)?;
        let dim = family.dim_of_level(level);
        let table = match self.load_group(&key, &field, dim) {
            Some(t) => t,
            None => {
                let els = match family {
                    Family::Gl => enumerate_gl(&field, level, self.limit)?,
                    _ => {
                        let form = self.form(family, q, level)?;
                        enumerate_isometry_group(&form, self.limit)?
                    }
                };
                let t = GroupTable { key, dim, field, els };
                self.store_group(&t);
                t
            }
        };
        let arc = Arc::new(table);
        self.groups.lock().unwrap().insert(key, arc.clone());
        Ok(arc)
    }

    /// Conjugacy classes with embedding-chain stable labels. Classical
    /// families build all levels from the family base upward.
    pub fn classes(&self, family: Family, q: u64, level: usize) -> Result<Arc<ClassTable>> {
        let key = GroupKey { family, q, level };
        if let Some(t) = self.classes.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let group = self.group(family, q, level)?;
        if let Some(t) = self.load_classes(&key, &group) {
            let arc = Arc::new(t);
            self.classes.lock().unwrap().insert(key, arc.clone());
            return Ok(arc);
        }
        let table = if family == Family::Gl {
            gl_classes(&group)?
        } else {
            let prev = if level > family.base_level() {
                Some(self.classes(family, q, level - 1)?)
            } else {
                None
            };
            classical_classes(&group, prev.as_deref())?
        };
        self.store_classes(&table, &group);
        let arc = Arc::new(table);
        self.classes.lock().unwrap().insert(key, arc.clone());
        Ok(arc)
    }

    /// Maps each class of the level-n group to the class of the level-(n+1)
    /// group containing the block-embedded representative.
    pub fn stable_match(&self, family: Family, q: u64, level: usize) -> Result<Vec<u32>> {
        let lo = self.classes(family, q, level)?;
        let hi = self.classes(family, q, level + 1)?;
        let hi_group = self.group(family, q, level + 1)?;
        let step = family.dim_of_level(level + 1) - family.dim_of_level(level);
        let mut out = Vec::with_capacity(lo.classes.len());
        for info in &lo.classes {
            let lo_group = self.group(family, q, level)?;
            let rep = MatFq::unpack_u64(
                lo_group.field.clone(),
                lo_group.dim,
                lo_group.dim,
                info.min_rep,
            );
            let emb = rep.block_embed(step);
            let idx = hi_group
                .index_of(emb.pack_u64())
                .ok_or(Error::EmbeddingNotInGroup)?;
            out.push(hi.class_of[idx as usize]);
        }
        // injectivity
        let mut seen = vec![false; hi.classes.len()];
        for &c in &out {
            if seen[c as usize] {
                return Err(Error::InvalidInput("stable match not injective".into()));
            }
            seen[c as usize] = true;
        }
        Ok(out)
    }

    // ------------------------------------------------------------------
    // cache files
    // ------------------------------------------------------------------

    fn group_path(&self, key: &GroupKey) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(format!("{key}.grp")))
    }

    fn class_path(&self, key: &GroupKey) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(format!("{key}.cls")))
    }

    fn load_group(&self, key: &GroupKey, field: &Field, dim: usize) -> Option<GroupTable> {
        let path = self.group_path(key)?;
        match read_group_file(&path, key, field, dim) {
            Ok(t) => Some(t),
            Err(_) => None, // corrupt or stale caches are rebuilt
        }
    }

    fn store_group(&self, t: &GroupTable) {
        if let Some(path) = self.group_path(&t.key) {
            let _ = write_group_file(&path, t);
        }
    }

    fn load_classes(&self, key: &GroupKey, group: &GroupTable) -> Option<ClassTable> {
        let path = self.class_path(key)?;
        match read_class_file(&path, key, group) {
            Ok(t) => Some(t),
            Err(_) => None,
        }
    }

    fn store_classes(&self, t: &ClassTable, group: &GroupTable) {
        if let Some(path) = self.class_path(&t.key) {
            let _ = write_class_file(&path, t, group);
        }
    }
}

// ---------------------------------------------------------------------------
// GL enumeration: depth-first choice of rows outside the span so far
// ---------------------------------------------------------------------------

fn enumerate_gl(field: &Field, n: usize, limit: u64) -> Result<Vec<u64>> {
    let order = gl_order(n as u64, field.q);
    if order.to_u64().is_none_or(|o| o > limit) {
        return Err(Error::LimitExceeded(format!(
            "|GL_{n}(F_{})| = {order} over element limit {limit}",
            field.q
        )));
    }
    if n == 0 {
        return Ok(vec![0]);
    }
    let q = field.q;
    let nrows = q.pow(n as u32) as usize;
    // row codes are base-q digit strings; precompute addition and the packed
    // bit image of each row
    let code_digits = |mut c: usize| -> Vec<Scalar> {
        (0..n)
            .map(|_| {
                let d = (c % q as usize) as Scalar;
                c /= q as usize;
                d
            })
            .collect()
    };
    let mut add = vec![0u32; nrows * nrows];
    let mut scale = vec![0u32; nrows * q as usize];
    for a in 0..nrows {
        let da = code_digits(a);
        for b in 0..nrows {
            let db = code_digits(b);
            let mut code = 0usize;
            for i in (0..n).rev() {
                code = code * q as usize + field.add(da[i], db[i]) as usize;
            }
            add[a * nrows + b] = code as u32;
        }
        for s in 0..q as usize {
            let mut code = 0usize;
            for i in (0..n).rev() {
                code = code * q as usize + field.mul(da[i], s as Scalar) as usize;
            }
            scale[a * q as usize + s] = code as u32;
        }
    }
    let bits = MatFq::bits_per_entry(q) as usize;
    let row_bits: Vec<u64> = (0..nrows)
        .map(|c| {
            let d = code_digits(c);
            let mut w = 0u64;
            for (j, &v) in d.iter().enumerate() {
                w |= (v as u64) << (j * bits);
            }
            w
        })
        .collect();
    let row_stride = n * bits;

    struct DfsCtx<'a> {
        nrows: usize,
        n: usize,
        q: usize,
        add: &'a [u32],
        scale: &'a [u32],
        row_bits: &'a [u64],
        row_stride: usize,
    }

    fn dfs(
        ctx: &DfsCtx,
        depth: usize,
        packed: u64,
        span: &mut Vec<bool>,
        span_list: &mut Vec<u32>,
        out: &mut Vec<u64>,
    ) {
        if depth == ctx.n {
            out.push(packed);
            return;
        }
        for cand in 0..ctx.nrows {
            if span[cand] {
                continue;
            }
            let new_packed = packed | (ctx.row_bits[cand] << (depth * ctx.row_stride));
            // grow the span: add c*cand to every existing element
            let start = span_list.len();
            for s in 1..ctx.q {
                let sc = ctx.scale[cand * ctx.q + s] as usize;
                for i in 0..start {
                    let e = ctx.add[span_list[i] as usize * ctx.nrows + sc];
                    if !span[e as usize] {
                        span[e as usize] = true;
                        span_list.push(e);
                    }
                }
            }
            dfs(ctx, depth + 1, new_packed, span, span_list, out);
            for &e in &span_list[start..] {
                span[e as usize] = false;
            }
            span_list.truncate(start);
        }
    }

    let ctx = DfsCtx { nrows, n, q: q as usize, add: &add, scale: &scale, row_bits: &row_bits, row_stride };
    // parallelize over the first row
    let firsts: Vec<usize> = (1..nrows).collect();
    let mut all: Vec<u64> = firsts
        .par_iter()
        .map(|&r0| {
            let mut span = vec![false; nrows];
            let mut span_list: Vec<u32> = vec![0];
            span[0] = true;
            for s in 1..q as usize {
                let e = scale[r0 * q as usize + s] as usize;
                if !span[e] {
                    span[e] = true;
                    span_list.push(e as u32);
                }
            }
            let mut out = Vec::new();
            dfs(&ctx, 1, row_bits[r0], &mut span, &mut span_list, &mut out);
            out
        })
        .reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    all.par_sort_unstable();
    debug_assert_eq!(num::BigInt::from(all.len() as u64), order);
    Ok(all)
}

// ---------------------------------------------------------------------------
// conjugacy classes
// ---------------------------------------------------------------------------

/// GL classes are exactly the fibers of the type map.
fn gl_classes(group: &GroupTable) -> Result<ClassTable> {
    let tm1 = group.tm1();
    let type_ctx = TypeCtx::new(group.field.clone(), group.dim)?;
    let chunk = 1usize << 14;
    let maps: Vec<HashMap<Multipartition, Vec<u32>>> = group
        .els
        .par_chunks(chunk)
        .enumerate()
        .map(|(ci, els)| {
            let mut m: HashMap<Multipartition, Vec<u32>> = HashMap::new();
            for (i, &w) in els.iter().enumerate() {
                let g = MatFq::unpack_u64(group.field.clone(), group.dim, group.dim, w);
                let ty = type_ctx.type_of_fast(&g);
                m.entry(ty).or_default().push((ci * chunk + i) as u32);
            }
            m
        })
        .collect();
    let mut merged: HashMap<Multipartition, Vec<u32>> = HashMap::new();
    for m in maps {
        for (k, mut v) in m {
            merged.entry(k).or_default().append(&mut v);
        }
    }
    let mut types: Vec<Multipartition> = merged.keys().cloned().collect();
    types.sort();
    let mut class_of = vec![0u32; group.order()];
    let mut classes = Vec::with_capacity(types.len());
    for (cid, ty) in types.into_iter().enumerate() {
        let mut members = merged.remove(&ty).unwrap();
        members.sort_unstable();
        for &m in &members {
            class_of[m as usize] = cid as u32;
        }
        let size = members.len() as u64;
        let centralizer = group.order() as u64 / size;
        let modified = ty.to_modified(&tm1);
        let label = StableLabel::new(Family::Gl, group.key.q, modified.clone(), 0);
        classes.push(ClassInfo {
            min_rep: group.els[members[0] as usize],
            size,
            centralizer,
            gl_type: ty,
            modified,
            label,
        });
    }
    Ok(ClassTable { key: group.key, class_of, classes })
}

/// Classical classes by full conjugation sweep; labels inherit disambiguation
/// indices from the previous level through the block embedding, and new
/// classes get the next free index per modified type in min-rep order.
fn classical_classes(group: &GroupTable, prev: Option<&ClassTable>) -> Result<ClassTable> {
    let n = group.order();
    let dim = group.dim;
    let field = group.field.clone();
    let tm1 = group.tm1();
    // precompute inverses as indices
    let inv_idx: Vec<u32> = group
        .els
        .par_iter()
        .map(|&w| {
            let g = MatFq::unpack_u64(field.clone(), dim, dim, w);
            group.index_of(g.inv().expect("group element").pack_u64()).unwrap()
        })
        .collect();
    let mut class_of = vec![u32::MAX; n];
    let mut reps: Vec<u32> = Vec::new();
    let mut member_lists: Vec<Vec<u32>> = Vec::new();
    for r in 0..n as u32 {
        if class_of[r as usize] != u32::MAX {
            continue;
        }
        let x = group.el(r);
        let mut members: Vec<u32> = group
            .els
            .par_iter()
            .enumerate()
            .map(|(gi, &gw)| {
                let g = MatFq::unpack_u64(field.clone(), dim, dim, gw);
                let ginv = group.el(inv_idx[gi]);
                let y = g.mul(&x).mul(&ginv);
                group.index_of(y.pack_u64()).expect("conjugate in group")
            })
            .collect();
        members.par_sort_unstable();
        members.dedup();
        let cid = reps.len() as u32;
        for &m in &members {
            class_of[m as usize] = cid;
        }
        reps.push(r);
        member_lists.push(members);
    }
    // class data
    let type_ctx = TypeCtx::new(field.clone(), dim)?;
    let mut infos: Vec<(u64, u64, Multipartition, Multipartition)> = Vec::new();
    for (cid, &r) in reps.iter().enumerate() {
        let rep = group.el(r);
        let size = member_lists[cid].len() as u64;
        if group.order() as u64 % size != 0 {
            return Err(Error::InvalidInput("orbit size does not divide group order".into()));
        }
        let ty = type_ctx.type_of_fast(&rep);
        let modified = ty.to_modified(&tm1);
        infos.push((group.els[r as usize], size, ty, modified));
    }
    // label assignment: inherited indices first
    let mut label_index: Vec<Option<u32>> = vec![None; reps.len()];
    if let Some(prev) = prev {
        let step = dim - prev_dim(group.key.family, group.key.level);
        for pinfo in &prev.classes {
            let prev_field = field.clone();
            let rep = MatFq::unpack_u64(prev_field, dim - step, dim - step, pinfo.min_rep);
            let emb = rep.block_embed(step);
            let idx = group
                .index_of(emb.pack_u64())
                .ok_or(Error::EmbeddingNotInGroup)?;
            let cid = class_of[idx as usize] as usize;
            if infos[cid].3 != pinfo.modified {
                return Err(Error::InvalidInput(
                    "embedding does not preserve the modified type".into(),
                ));
            }
            if label_index[cid].is_some_and(|i| i != pinfo.label.index) {
                return Err(Error::InvalidInput("conflicting inherited label".into()));
            }
            label_index[cid] = Some(pinfo.label.index);
        }
    }
    // new classes: next free index per modified type, in min-rep order
    let mut used: HashMap<Multipartition, Vec<u32>> = HashMap::new();
    for (cid, li) in label_index.iter().enumerate() {
        if let Some(i) = li {
            used.entry(infos[cid].3.clone()).or_default().push(*i);
        }
    }
    let mut order_new: Vec<usize> = (0..reps.len()).filter(|&c| label_index[c].is_none()).collect();
    order_new.sort_by_key(|&c| infos[c].0);
    for cid in order_new {
        let taken = used.entry(infos[cid].3.clone()).or_default();
        let mut i = 0u32;
        while taken.contains(&i) {
            i += 1;
        }
        taken.push(i);
        label_index[cid] = Some(i);
    }
    let classes: Vec<ClassInfo> = infos
        .into_iter()
        .enumerate()
        .map(|(cid, (min_rep, size, gl_type, modified))| ClassInfo {
            min_rep,
            size,
            centralizer: group.order() as u64 / size,
            gl_type,
            modified: modified.clone(),
            label: StableLabel::new(
                group.key.family,
                group.key.q,
                modified,
                label_index[cid].unwrap(),
            ),
        })
        .collect();
    Ok(ClassTable { key: group.key, class_of, classes })
}

fn prev_dim(family: Family, level: usize) -> usize {
    family.dim_of_level(level) - (family.dim_of_level(level) - family.dim_of_level(level - 1))
}

// ---------------------------------------------------------------------------
// cache file format
// ---------------------------------------------------------------------------

const MAGIC: &[u8; 4] = b"FHQC";

fn fnv64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

struct ByteWriter {
    buf: Vec<u8>,
}

impl ByteWriter {
    fn new() -> Self {
        ByteWriter { buf: Vec::new() }
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u64(s.len() as u64);
        self.buf.extend_from_slice(s.as_bytes());
    }
}

struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        ByteReader { buf, pos: 0 }
    }
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::CacheCorrupt("truncated".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn str(&mut self) -> Result<String> {
        let n = self.u64()? as usize;
        let s = self.take(n)?;
        String::from_utf8(s.to_vec()).map_err(|_| Error::CacheCorrupt("bad utf8".into()))
    }
}

fn group_payload(t: &GroupTable) -> Vec<u8> {
    let mut w = ByteWriter::new();
    w.buf.extend_from_slice(MAGIC);
    w.u32(CACHE_VERSION);
    w.str(t.key.family.tag());
    w.u64(t.key.q);
    w.u64(t.key.level as u64);
    w.u64(t.dim as u64);
    w.u32(MatFq::bits_per_entry(t.field.q));
    w.u64(t.els.len() as u64);
    for &e in &t.els {
        w.u64(e);
    }
    w.buf
}

pub fn group_file_checksum(t: &GroupTable) -> u64 {
    fnv64(&group_payload(t))
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_group_file(path: &Path, t: &GroupTable) -> Result<()> {
    let mut payload = group_payload(t);
    let sum = fnv64(&payload);
    payload.extend_from_slice(&sum.to_le_bytes());
    atomic_write(path, &payload)
}

pub fn read_group_file(
    path: &Path,
    key: &GroupKey,
    field: &Field,
    dim: usize,
) -> Result<GroupTable> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 {
        return Err(Error::CacheCorrupt("too short".into()));
    }
    let (payload, sumb) = bytes.split_at(bytes.len() - 8);
    let sum = u64::from_le_bytes(sumb.try_into().unwrap());
    if fnv64(payload) != sum {
        return Err(Error::CacheCorrupt(path.display().to_string()));
    }
    let mut r = ByteReader::new(payload);
    if r.take(4)? != MAGIC {
        return Err(Error::CacheCorrupt("bad magic".into()));
    }
    let ver = r.u32()?;
    if ver != CACHE_VERSION {
        return Err(Error::VersionMismatch { got: ver, want: CACHE_VERSION });
    }
    let family = Family::from_tag(&r.str()?)?;
    let q = r.u64()?;
    let level = r.u64()? as usize;
    let fdim = r.u64()? as usize;
    let bits = r.u32()?;
    if family != key.family || q != key.q || level != key.level || fdim != dim
        || bits != MatFq::bits_per_entry(field.q)
    {
        return Err(Error::CacheCorrupt("header mismatch".into()));
    }
    let count = r.u64()? as usize;
    let mut els = Vec::with_capacity(count);
    for _ in 0..count {
        els.push(r.u64()?);
    }
    Ok(GroupTable { key: *key, dim, field: field.clone(), els })
}

pub fn write_class_file(path: &Path, t: &ClassTable, group: &GroupTable) -> Result<()> {
    let mut w = ByteWriter::new();
    w.buf.extend_from_slice(MAGIC);
    w.u32(CACHE_VERSION);
    w.u64(group_file_checksum(group));
    w.u64(t.class_of.len() as u64);
    for &c in &t.class_of {
        w.u32(c);
    }
    w.u64(t.classes.len() as u64);
    for c in &t.classes {
        w.u64(c.min_rep);
        w.u64(c.size);
        w.u64(c.centralizer);
        w.str(&c.gl_type.to_string());
        w.str(&c.label.to_string());
    }
    let sum = fnv64(&w.buf);
    w.buf.extend_from_slice(&sum.to_le_bytes());
    atomic_write(path, &w.buf)
}

pub fn read_class_file(path: &Path, key: &GroupKey, group: &GroupTable) -> Result<ClassTable> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 {
        return Err(Error::CacheCorrupt("too short".into()));
    }
    let (payload, sumb) = bytes.split_at(bytes.len() - 8);
    if fnv64(payload) != u64::from_le_bytes(sumb.try_into().unwrap()) {
        return Err(Error::CacheCorrupt(path.display().to_string()));
    }
    let mut r = ByteReader::new(payload);
    if r.take(4)? != MAGIC {
        return Err(Error::CacheCorrupt("bad magic".into()));
    }
    let ver = r.u32()?;
    if ver != CACHE_VERSION {
        return Err(Error::VersionMismatch { got: ver, want: CACHE_VERSION });
    }
    if r.u64()? != group_file_checksum(group) {
        return Err(Error::CacheCorrupt("class file references another group file".into()));
    }
    let n = r.u64()? as usize;
    if n != group.order() {
        return Err(Error::CacheCorrupt("element count mismatch".into()));
    }
    let mut class_of = Vec::with_capacity(n);
    for _ in 0..n {
        class_of.push(r.u32()?);
    }
    let ncl = r.u64()? as usize;
    let mut classes = Vec::with_capacity(ncl);
    let tm1 = group.tm1();
    for _ in 0..ncl {
        let min_rep = r.u64()?;
        let size = r.u64()?;
        let centralizer = r.u64()?;
        let gl_type = parse_multipartition(&r.str()?, group.field.q)?;
        let label = crate::types::label_parse(&r.str()?)?;
        let modified = gl_type.to_modified(&tm1);
        classes.push(ClassInfo { min_rep, size, centralizer, gl_type, modified, label });
    }
    Ok(ClassTable { key: *key, class_of, classes })
}

/// Parses the `poly:(parts);...` rendering of a multipartition.
pub fn parse_multipartition(s: &str, field_size: u64) -> Result<Multipartition> {
    let mut mp = Multipartition::new();
    if s.is_empty() {
        return Ok(mp);
    }
    // reuse the label parser on a synthetic GL label
    let lbl = crate::types::label_parse(&format!("gl,q={field_size};{s}"))?;
    for (k, p) in lbl.modified.iter() {
        mp.insert(k.clone(), p.clone());
    }
    Ok(mp)
}
