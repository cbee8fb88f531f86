//! Sparse exact linear algebra over a [`Field`].
//!
//! Two elimination engines live here. [`rank`] is the bulk path used for Betti
//! numbers: it splits a matrix into the connected components of its
//! row/column incidence graph and runs Markowitz-pivoted elimination on each
//! block. [`Echelon`] is the incremental path used whenever explicit subspaces
//! are needed (quotients, kernels, homology classes, spectral-sequence pages);
//! it keeps a semi-reduced echelon basis whose pivots are leading entries and
//! can track, for every basis row, the combination of inserted vectors that
//! produced it.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rayon::prelude::*;

use crate::scalar::{Field, Scalar};

/// A sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> SparseVec {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize, field: Field) -> SparseVec {
        SparseVec {
            entries: vec![(i, field.one())],
        }
    }

    /// Builds a vector from unsorted terms, summing repeated indices.
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Scalar)>) -> SparseVec {
        let mut terms: Vec<(usize, Scalar)> = terms.into_iter().collect();
        terms.sort_by_key(|t| t.0);
        let mut entries: Vec<(usize, Scalar)> = Vec::with_capacity(terms.len());
        for (i, c) in terms {
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc = &*acc + &c,
                _ => entries.push((i, c)),
            }
        }
        entries.retain(|(_, c)| !c.is_zero());
        SparseVec { entries }
    }

    /// Wraps already sorted, zero-free entries.
    pub fn from_sorted(entries: Vec<(usize, Scalar)>) -> SparseVec {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(_, c)| !c.is_zero()));
        SparseVec { entries }
    }

    pub fn from_dense(dense: &[Scalar]) -> SparseVec {
        SparseVec {
            entries: dense
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize, field: Field) -> Vec<Scalar> {
        let mut out = vec![field.zero(); len];
        for (i, c) in &self.entries {
            out[*i] = c.clone();
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> + '_ {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Scalar)> {
        self.entries
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn leading(&self) -> Option<&(usize, Scalar)> {
        self.entries.first()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, -x)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &SparseVec, c: &Scalar) -> SparseVec {
        if c.is_zero() || other.is_empty() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let s = x + &(y * c);
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        match other.entries.first() {
            None => self.clone(),
            Some((_, c)) => self.add_scaled(other, &c.field().one()),
        }
    }

    /// Re-indexes entries through `f`, dropping those mapped to `None`.
    pub fn reindex(&self, f: impl Fn(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_terms(self.entries.iter().filter_map(|(i, c)| f(*i).map(|j| (j, c.clone()))))
    }

    pub fn dot(&self, other: &SparseVec) -> Option<Scalar> {
        let mut acc: Option<Scalar> = None;
        for (i, x) in &self.entries {
            if let Some(y) = other.get(*i) {
                let t = x * y;
                acc = Some(match acc {
                    None => t,
                    Some(a) => &a + &t,
                });
            }
        }
        acc
    }
}

/// A sparse matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> SparseMatrix {
        SparseMatrix {
            nrows,
            cols: vec![SparseVec::new(); ncols],
        }
    }

    pub fn identity(n: usize, field: Field) -> SparseMatrix {
        SparseMatrix {
            nrows: n,
            cols: (0..n).map(|i| SparseVec::unit(i, field)).collect(),
        }
    }

    pub fn from_cols(nrows: usize, cols: Vec<SparseVec>) -> SparseMatrix {
        debug_assert!(cols.iter().all(|c| c.max_index().is_none_or(|m| m < nrows)));
        SparseMatrix { nrows, cols }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(SparseVec::is_empty)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (j, c) in v.iter() {
            for (i, x) in self.cols[*j].iter() {
                let t = x * c;
                match acc.get_mut(i) {
                    Some(s) => *s = &*s + &t,
                    None => {
                        acc.insert(*i, t);
                    }
                }
            }
        }
        SparseVec::from_sorted(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), rhs.nrows, "composing incompatible matrices");
        SparseMatrix {
            nrows: self.nrows,
            cols: rhs.cols.par_iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                rows[*i].push((j, x.clone()));
            }
        }
        SparseMatrix {
            nrows: self.ncols(),
            cols: rows.into_iter().map(SparseVec::from_sorted).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        rank(&self.cols, self.nrows)
    }

    /// Sub-matrix on the given row and column index lists (both re-indexed
    /// densely in the given order).
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let row_pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        SparseMatrix {
            nrows: rows.len(),
            cols: cols
                .iter()
                .map(|&c| self.cols[c].reindex(|i| row_pos.get(&i).copied()))
                .collect(),
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Groups nodes `0..n` into connected components under `edges`. Components
/// come out ordered by their smallest member; members are increasing.
pub fn components(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(n);
    for (a, b) in edges {
        uf.union(a, b);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        let r = uf.find(x);
        groups.entry(r).or_default().push(x);
    }
    groups.into_values().collect()
}

/// Column blocks of a matrix: each block lists its columns and the rows they
/// touch. Zero columns are dropped.
fn blocks(cols: &[SparseVec], nrows: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let ncols = cols.len();
    let edges = cols
        .iter()
        .enumerate()
        .flat_map(|(j, c)| c.iter().map(move |(i, _)| (*i, nrows + j)));
    components(nrows + ncols, edges)
        .into_iter()
        .filter_map(|members| {
            let (rows, cs): (Vec<usize>, Vec<usize>) = members.into_iter().partition(|&x| x < nrows);
            let cs: Vec<usize> = cs.into_iter().map(|x| x - nrows).collect();
            (!cs.is_empty() && !rows.is_empty()).then_some((cs, rows))
        })
        .collect()
}

/// Rank of the matrix with the given columns.
pub fn rank(cols: &[SparseVec], nrows: usize) -> usize {
    let bl = blocks(cols, nrows);
    bl.par_iter()
        .map(|(cs, rows)| {
            let row_pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
            let local: Vec<SparseVec> = cs
                .iter()
                .map(|&c| cols[c].reindex(|i| row_pos.get(&i).copied()))
                .collect();
            markowitz_rank(local, rows.len())
        })
        .sum()
}

/// Rank broken down by a grading of the columns. The matrix must be
/// homogeneous: every block is assigned the degree of its first column.
pub fn rank_by_degree(cols: &[SparseVec], nrows: usize, col_degree: &[i64]) -> BTreeMap<i64, usize> {
    let bl = blocks(cols, nrows);
    let ranks: Vec<(i64, usize)> = bl
        .par_iter()
        .map(|(cs, rows)| {
            let row_pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
            let local: Vec<SparseVec> = cs
                .iter()
                .map(|&c| cols[c].reindex(|i| row_pos.get(&i).copied()))
                .collect();
            (col_degree[cs[0]], markowitz_rank(local, rows.len()))
        })
        .collect();
    let mut out = BTreeMap::new();
    for (t, r) in ranks {
        *out.entry(t).or_insert(0) += r;
    }
    out.retain(|_, r| *r > 0);
    out
}

/// Markowitz-pivoted elimination on the vectors `vecs` (treated as the rows
/// being eliminated; their entries index `width` coordinates).
fn markowitz_rank(mut vecs: Vec<SparseVec>, width: usize) -> usize {
    vecs.retain(|v| !v.is_empty());
    if vecs.len() <= 1 {
        return vecs.len();
    }
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); width];
    let mut col_count = vec![0usize; width];
    for (r, v) in vecs.iter().enumerate() {
        for (c, _) in v.iter() {
            col_rows[*c].push(r);
            col_count[*c] += 1;
        }
    }
    let mut active = vec![true; vecs.len()];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        vecs.iter().enumerate().map(|(r, v)| Reverse((v.nnz(), r))).collect();
    let mut rank = 0;
    while let Some(Reverse((nnz, r))) = heap.pop() {
        if !active[r] || vecs[r].nnz() != nnz {
            continue;
        }
        active[r] = false;
        if nnz == 0 {
            continue;
        }
        rank += 1;
        let pivot_row = std::mem::take(&mut vecs[r]);
        let (pc, pval) = pivot_row
            .iter()
            .min_by_key(|(c, _)| (col_count[*c], *c))
            .cloned()
            .unwrap();
        for (c, _) in pivot_row.iter() {
            col_count[*c] -= 1;
        }
        let pinv = pval.inv();
        let touching = std::mem::take(&mut col_rows[pc]);
        for r2 in touching {
            if !active[r2] {
                continue;
            }
            let Some(x) = vecs[r2].get(pc).cloned() else {
                continue;
            };
            let factor = -&(&x * &pinv);
            let old = std::mem::take(&mut vecs[r2]);
            let new = old.add_scaled(&pivot_row, &factor);
            // Maintain column incidence for entries that appeared or vanished.
            {
                let (mut a, mut b) = (old.iter().peekable(), new.iter().peekable());
                loop {
                    match (a.peek().map(|e| e.0), b.peek().map(|e| e.0)) {
                        (Some(i), Some(j)) if i == j => {
                            a.next();
                            b.next();
                        }
                        (Some(i), Some(j)) if i < j => {
                            col_count[i] -= 1;
                            a.next();
                        }
                        (Some(_), Some(j)) | (None, Some(j)) => {
                            col_count[j] += 1;
                            col_rows[j].push(r2);
                            b.next();
                        }
                        (Some(i), None) => {
                            col_count[i] -= 1;
                            a.next();
                        }
                        (None, None) => break,
                    }
                }
            }
            heap.push(Reverse((new.nnz(), r2)));
            vecs[r2] = new;
        }
    }
    rank
}

/// A subspace held as a semi-reduced echelon basis. Every basis row has its
/// pivot as leading (smallest) index with coefficient one.
///
/// When built through [`Echelon::insert_tagged`] each row remembers which
/// combination of inserted tags it equals, which turns reductions into
/// coordinate computations.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    rows: Vec<SparseVec>,
    tags: Vec<SparseVec>,
    pivots: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new(field: Field) -> Echelon {
        Echelon {
            field,
            rows: Vec::new(),
            tags: Vec::new(),
            pivots: HashMap::new(),
        }
    }

    pub fn spanned_by<'a>(field: Field, vs: impl IntoIterator<Item = &'a SparseVec>) -> Echelon {
        let mut e = Echelon::new(field);
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.pivots.contains_key(&i)
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    /// Reduces `v` against the basis. Returns the residual (which has no entry
    /// at any pivot) and `tag - Σ c_k tag_k` for the subtracted rows.
    pub fn reduce_tracked(&self, v: &SparseVec, tag: &SparseVec) -> (SparseVec, SparseVec) {
        let mut acc: BTreeMap<usize, Scalar> = v.iter().cloned().collect();
        let mut tag_terms: Vec<(usize, Scalar)> = tag.iter().cloned().collect();
        let mut cursor = 0usize;
        loop {
            let next = acc
                .range(cursor..)
                .find(|(k, _)| self.pivots.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = next else { break };
            let ri = self.pivots[&k];
            for (j, x) in self.rows[ri].iter() {
                let t = x * &c;
                match acc.get_mut(j) {
                    Some(s) => {
                        *s = &*s - &t;
                        if s.is_zero() {
                            acc.remove(j);
                        }
                    }
                    None => {
                        acc.insert(*j, -t);
                    }
                }
            }
            for (j, x) in self.tags[ri].iter() {
                tag_terms.push((*j, -&(x * &c)));
            }
            cursor = k + 1;
        }
        (
            SparseVec::from_sorted(acc.into_iter().collect()),
            SparseVec::from_terms(tag_terms),
        )
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_tracked(v, &SparseVec::new()).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span. Returns whether the dimension grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        self.insert_tagged(v, SparseVec::new()).is_none()
    }

    /// Adds `v` carrying `tag`. If `v` is already in the span, returns the
    /// tag combination that reduces to zero (a kernel relation among tags).
    pub fn insert_tagged(&mut self, v: &SparseVec, tag: SparseVec) -> Option<SparseVec> {
        let (res, tag) = self.reduce_tracked(v, &tag);
        match res.leading() {
            None => Some(tag),
            Some((p, lead)) => {
                let inv = lead.inv();
                let p = *p;
                self.pivots.insert(p, self.rows.len());
                self.rows.push(res.scale(&inv));
                self.tags.push(tag.scale(&inv));
                None
            }
        }
    }

    /// Coordinates of `v` in terms of the tags, if `v` lies in the span.
    pub fn coordinates(&self, v: &SparseVec) -> Option<SparseVec> {
        let (res, tag) = self.reduce_tracked(v, &SparseVec::new());
        res.is_empty().then(|| tag.neg())
    }
}

/// Basis of the kernel of the matrix with columns `cols` (vectors indexed by
/// column position).
pub fn kernel(field: Field, cols: &[SparseVec]) -> Vec<SparseVec> {
    let mut e = Echelon::new(field);
    let mut out = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        if let Some(rel) = e.insert_tagged(c, SparseVec::unit(j, field)) {
            out.push(rel);
        }
    }
    out
}

/// Indices `0..n` that are not pivots of `sub`: the standard complement basis
/// of a quotient by `sub`.
pub fn complement_indices(sub: &Echelon, n: usize) -> Vec<usize> {
    (0..n).filter(|i| !sub.is_pivot(*i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Scalar {
        Field::Rationals.from_i64(n)
    }

    fn dense_rank(rows: &[Vec<i64>]) -> usize {
        // Plain fraction-based Gaussian elimination as an oracle.
        let f = Field::Rationals;
        let mut m: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| f.from_i64(x)).collect())
            .collect();
        let ncols = m.first().map_or(0, |r| r.len());
        let mut r = 0;
        for c in 0..ncols {
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].inv();
            for i in 0..m.len() {
                if i != r && !m[i][c].is_zero() {
                    let fac = &m[i][c] * &inv;
                    for k in 0..ncols {
                        let t = &m[r][k] * &fac;
                        m[i][k] = &m[i][k] - &t;
                    }
                }
            }
            r += 1;
        }
        r
    }

    fn cols_of(rows: &[Vec<i64>]) -> Vec<SparseVec> {
        let ncols = rows.first().map_or(0, |r| r.len());
        (0..ncols)
            .map(|j| SparseVec::from_terms(rows.iter().enumerate().map(|(i, r)| (i, q(r[j])))))
            .collect()
    }

    #[test]
    fn small_ranks() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(rank(&cols_of(&m), 3), 2);
        assert_eq!(rank(&[], 4), 0);
        let id = SparseMatrix::identity(5, Field::Rationals);
        assert_eq!(id.rank(), 5);
    }

    #[test]
    fn kernel_and_coordinates() {
        let m = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let cols = cols_of(&m);
        let ker = kernel(Field::Rationals, &cols);
        assert_eq!(ker.len(), 1);
        let mat = SparseMatrix::from_cols(2, cols.clone());
        assert!(mat.apply(&ker[0]).is_empty());

        let mut e = Echelon::new(Field::Rationals);
        e.insert_tagged(&cols[0], SparseVec::unit(0, Field::Rationals));
        e.insert_tagged(&cols[1], SparseVec::unit(1, Field::Rationals));
        let target = cols[0].add_scaled(&cols[1], &q(3));
        assert_eq!(
            e.coordinates(&target).unwrap(),
            SparseVec::from_terms([(0, q(1)), (1, q(3))])
        );
    }

    #[test]
    fn prime_field_rank_differs() {
        // [[1,1],[1,-1]] has determinant -2: full rank over Q, rank 1 over F_2.
        let cols = vec![
            SparseVec::from_terms([(0, Field::Prime(2).one()), (1, Field::Prime(2).one())]),
            SparseVec::from_terms([(0, Field::Prime(2).one()), (1, Field::Prime(2).from_i64(-1))]),
        ];
        assert_eq!(rank(&cols, 2), 1);
    }

    proptest! {
        #[test]
        fn markowitz_matches_dense(rows in prop::collection::vec(prop::collection::vec(-2i64..3, 7), 1..8)) {
            let cols = cols_of(&rows);
            let expected = dense_rank(&rows);
            prop_assert_eq!(rank(&cols, rows.len()), expected);
            prop_assert_eq!(Echelon::spanned_by(Field::Rationals, cols.iter()).dim(), expected);
            prop_assert_eq!(kernel(Field::Rationals, &cols).len(), 7 - expected);
        }

        #[test]
        fn reduction_kills_pivots(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 6), 1..6),
                                  v in prop::collection::vec(-3i64..4, 6)) {
            let vecs: Vec<SparseVec> = rows
                .iter()
                .map(|r| SparseVec::from_terms(r.iter().enumerate().map(|(i, &x)| (i, q(x)))))
                .collect();
            let e = Echelon::spanned_by(Field::Rationals, vecs.iter());
            let w = SparseVec::from_terms(v.iter().enumerate().map(|(i, &x)| (i, q(x))));
            let r = e.reduce(&w);
            prop_assert!(r.iter().all(|(i, _)| !e.is_pivot(*i)));
        }
    }
}
