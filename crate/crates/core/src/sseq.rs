//! Spectral sequence of the column filtration of a double complex.
//!
//! Pages are computed from the standard subquotients
//! `E^r_p = Z^r_p / (Z^{r-1}_{p-1} + d Z^{r-1}_{p+r-1})` with
//! `Z^r_p = {x ∈ F_p : dx ∈ F_{p-r}}`, inside each connected component of
//! the total differential separately.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::chains::{ChainComplex, DoubleComplex};
use crate::error::{Error, Result};
use crate::linalg::{components, kernel, Echelon, SparseVec};
use crate::scalar::Field;

/// `(p, q, t)`: filtration degree, complementary degree, internal degree.
pub type Bidegree = (usize, usize, i64);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PageDifferential {
    pub source: Bidegree,
    pub target: Bidegree,
    /// Columns: images of the chosen source representatives in the
    /// coordinates of the target representatives.
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralSequencePage {
    pub r: usize,
    pub dims: BTreeMap<String, usize>,
    pub differentials: Vec<PageDifferential>,
    #[serde(skip)]
    raw: BTreeMap<Bidegree, usize>,
}

impl SpectralSequencePage {
    pub fn dim(&self, p: usize, q: usize, t: i64) -> usize {
        self.raw.get(&(p, q, t)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Bidegree, usize)> + '_ {
        self.raw.iter().map(|(k, v)| (*k, *v))
    }

    /// Sum of `dim E_{p,q,t}` over `p + q = n`, split by `t`.
    pub fn total_by_t(&self, n: usize) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (&(p, q, t), &d) in &self.raw {
            if p + q == n {
                *out.entry(t).or_insert(0) += d;
            }
        }
        out
    }
}

/// One connected summand of the total complex in local coordinates.
struct Block {
    /// `gens[n]` = global indices at total level `n`, sorted by filtration.
    gens: Vec<Vec<usize>>,
    filt: Vec<Vec<usize>>,
    /// `d[n][i]` = differential of local generator `i` at level `n`, local coordinates at `n-1`.
    d: Vec<Vec<SparseVec>>,
    t: i64,
}

struct Pieces<'a> {
    field: Field,
    block: &'a Block,
}

impl Pieces<'_> {
    fn apply_d(&self, n: usize, v: &SparseVec) -> SparseVec {
        let mut terms = Vec::new();
        for (i, c) in v.iter() {
            terms.extend(self.block.d[n][*i].iter().map(|(k, x)| (*k, x * c)));
        }
        SparseVec::from_terms(terms)
    }

    fn level_len(&self, n: usize) -> usize {
        self.block.gens.get(n).map_or(0, Vec::len)
    }

    /// Basis of `Z^r_p` at level `n` (with `Z^r_p = F_p` for `r ≤ 0`).
    fn z(&self, r: i64, p: i64, n: usize) -> Vec<SparseVec> {
        let filt = match self.block.filt.get(n) {
            Some(f) => f,
            None => return Vec::new(),
        };
        let members: Vec<usize> = (0..filt.len()).filter(|&i| (filt[i] as i64) <= p).collect();
        if r <= 0 {
            return members.iter().map(|&i| SparseVec::unit(i, self.field)).collect();
        }
        let bound = p - r;
        let below = self.block.filt.get(n.wrapping_sub(1));
        let cols: Vec<SparseVec> = members
            .iter()
            .map(|&i| {
                if n == 0 {
                    return SparseVec::new();
                }
                let below = below.expect("level below exists");
                SparseVec::from_terms(
                    self.block.d[n][i]
                        .iter()
                        .filter(|(k, _)| below[*k] as i64 > bound)
                        .cloned(),
                )
            })
            .collect();
        kernel(self.field, &cols)
            .into_iter()
            .map(|v| v.reindex(|j| Some(members[j])))
            .collect()
    }

    fn b(&self, r: i64, p: i64, n: usize) -> Vec<SparseVec> {
        let mut out = self.z(r - 1, p - 1, n);
        if n + 1 < self.block.gens.len() {
            out.extend(self.z(r - 1, p + r - 1, n + 1).iter().map(|x| self.apply_d(n + 1, x)));
        }
        out
    }

    /// Chosen representatives of `E^r_{p}` at level `n` and the echelon of
    /// `B` extended by them with coordinate tags.
    fn page(&self, r: i64, p: i64, n: usize) -> (Vec<SparseVec>, Echelon) {
        let mut ech = Echelon::new(self.field);
        for v in self.b(r, p, n) {
            ech.insert(&v);
        }
        let mut reps = Vec::new();
        for v in self.z(r, p, n) {
            if ech.insert_tagged(&v, SparseVec::unit(reps.len(), self.field)).is_none() {
                reps.push(v);
            }
        }
        (reps, ech)
    }
}

fn blocks(tot: &ChainComplex, dc: &DoubleComplex, n_max: usize) -> Vec<Block> {
    // global node ids over levels 0..=n_max+1
    let levels = (n_max + 2).min(tot.num_levels());
    let mut start = vec![0usize; levels + 1];
    for n in 0..levels {
        start[n + 1] = start[n] + tot.rank_at(n);
    }
    let mut edges = Vec::new();
    for n in 1..levels {
        for (i, col) in tot.differential(n).iter().enumerate() {
            for (k, _) in col.iter() {
                edges.push((start[n] + i, start[n - 1] + k));
            }
        }
    }
    let filts: Vec<Vec<usize>> = (0..levels).map(|n| dc.filtration(n)).collect();
    let mut out = Vec::new();
    for comp in components(start[levels], edges) {
        let mut gens = vec![Vec::new(); levels];
        for g in comp {
            let n = start.partition_point(|&s| s <= g) - 1;
            gens[n].push(g - start[n]);
        }
        let mut t_val = 0;
        for (n, g) in gens.iter_mut().enumerate() {
            g.sort_by_key(|&i| (filts[n][i], i));
            if let Some(&i) = g.first() {
                t_val = tot.degrees(n)[i];
            }
        }
        let local: Vec<BTreeMap<usize, usize>> = gens
            .iter()
            .map(|g| g.iter().enumerate().map(|(l, &i)| (i, l)).collect())
            .collect();
        let d = (0..levels)
            .map(|n| {
                gens[n]
                    .iter()
                    .map(|&i| {
                        if n == 0 {
                            SparseVec::new()
                        } else {
                            tot.differential(n)[i].reindex(|k| local[n - 1].get(&k).copied())
                        }
                    })
                    .collect()
            })
            .collect();
        let filt = gens
            .iter()
            .enumerate()
            .map(|(n, g)| g.iter().map(|&i| filts[n][i]).collect())
            .collect();
        out.push(Block {
            gens,
            filt,
            d,
            t: t_val,
        });
    }
    out
}

fn fmt_matrix(cols: &[SparseVec], rows: usize, field: Field) -> Vec<Vec<String>> {
    cols.iter()
        .map(|c| {
            c.to_dense(rows, field)
                .iter()
                .map(|x| x.to_canonical_string())
                .collect()
        })
        .collect()
}

/// Pages `E^0 … E^{r_max}` restricted to total degrees `p + q ≤ s_valid`.
pub fn sseq_pages(dc: &DoubleComplex, r_max: usize) -> Result<Vec<SpectralSequencePage>> {
    let n_max = dc.s_valid().min(dc.top());
    if dc.cells().is_empty() {
        return Ok((0..=r_max).map(empty_page).collect());
    }
    let field = dc.field();
    let tot = dc.total_complex();
    if tot.num_levels() < n_max + 2 && dc.s_valid() < dc.top() {
        return Err(Error::range("double complex lacks the level above its window", n_max));
    }
    let blocks = blocks(&tot, dc, n_max);
    // per block, per page: dims and differentials
    let per_block: Vec<
        Vec<(
            BTreeMap<Bidegree, usize>,
            Vec<(Bidegree, Bidegree, Vec<SparseVec>, usize)>,
        )>,
    > = blocks
        .par_iter()
        .map(|block| {
            let pieces = Pieces { field, block };
            let ps: Vec<usize> = block.filt.iter().flatten().copied().collect();
            let (pmin, pmax) = match (ps.iter().min(), ps.iter().max()) {
                (Some(&a), Some(&b)) => (a as i64, b as i64),
                _ => return vec![(BTreeMap::new(), Vec::new()); r_max + 1],
            };
            (0..=r_max as i64)
                .map(|r| {
                    let mut dims = BTreeMap::new();
                    let mut diffs = Vec::new();
                    let mut reps_cache: BTreeMap<(i64, usize), (Vec<SparseVec>, Echelon)> = BTreeMap::new();
                    for n in 0..=n_max.min(block.gens.len().saturating_sub(1)) {
                        if pieces.level_len(n) == 0 {
                            continue;
                        }
                        for p in pmin..=pmax.min(n as i64) {
                            let (reps, ech) = pieces.page(r, p, n);
                            if !reps.is_empty() {
                                dims.insert((p as usize, n - p as usize, block.t), reps.len());
                            }
                            reps_cache.insert((p, n), (reps, ech));
                        }
                    }
                    for (&(p, n), (reps, _)) in &reps_cache {
                        if reps.is_empty() || n == 0 || p - r < pmin {
                            continue;
                        }
                        let Some((treps, tech)) = reps_cache.get(&(p - r, n - 1)) else {
                            continue;
                        };
                        if treps.is_empty() {
                            continue;
                        }
                        let cols: Vec<SparseVec> = reps
                            .iter()
                            .map(|x| {
                                let (res, tag) = tech.reduce_tracked(&pieces.apply_d(n, x), &SparseVec::new());
                                debug_assert!(res.is_empty());
                                tag.neg()
                            })
                            .collect();
                        if cols.iter().all(SparseVec::is_empty) {
                            continue;
                        }
                        let src = (p as usize, n - p as usize, block.t);
                        let tgt = ((p - r) as usize, n - 1 - (p - r) as usize, block.t);
                        diffs.push((src, tgt, cols, treps.len()));
                    }
                    (dims, diffs)
                })
                .collect()
        })
        .collect();
    let mut pages = Vec::new();
    for r in 0..=r_max {
        let mut raw: BTreeMap<Bidegree, usize> = BTreeMap::new();
        let mut grouped: BTreeMap<(Bidegree, Bidegree), (Vec<SparseVec>, usize)> = BTreeMap::new();
        for block in &per_block {
            let (dims, diffs) = &block[r];
            for (k, v) in dims {
                *raw.entry(*k).or_insert(0) += v;
            }
            for (src, tgt, cols, rows) in diffs {
                grouped.entry((*src, *tgt)).or_insert_with(|| (Vec::new(), 0));
                let e = grouped.get_mut(&(*src, *tgt)).unwrap();
                let shift = e.1;
                e.0.extend(cols.iter().map(|c| c.reindex(|k| Some(k + shift))));
                e.1 += rows;
            }
        }
        let differentials = grouped
            .into_iter()
            .map(|((source, target), (cols, rows))| PageDifferential {
                source,
                target,
                matrix: fmt_matrix(&cols, rows, field),
            })
            .collect();
        pages.push(SpectralSequencePage {
            r,
            dims: raw.iter().map(|(&(p, q, t), &d)| (format!("{p},{q},{t}"), d)).collect(),
            differentials,
            raw,
        });
    }
    Ok(pages)
}

fn empty_page(r: usize) -> SpectralSequencePage {
    SpectralSequencePage {
        r,
        dims: BTreeMap::new(),
        differentials: Vec::new(),
        raw: BTreeMap::new(),
    }
}

/// The stable page, reached once `r` exceeds the filtration span.
pub fn sseq_infinity(dc: &DoubleComplex) -> Result<SpectralSequencePage> {
    let span = dc.cells().keys().map(|k| k.0).max().unwrap_or(0) - dc.cells().keys().map(|k| k.0).min().unwrap_or(0);
    let mut pages = sseq_pages(dc, span + 1)?;
    Ok(pages.pop().expect("at least one page"))
}

/// `Σ_{p+q=n} dim E^∞_{p,q,t} = dim H_{n,t}(Tot)` for every `n` in the window.
pub fn converges(dc: &DoubleComplex) -> Result<bool> {
    let einf = sseq_infinity(dc)?;
    let n_max = dc.s_valid().min(dc.top());
    let h = dc.total_complex().homology(n_max)?;
    for n in 0..=n_max {
        let lhs = einf.total_by_t(n);
        let rhs: BTreeMap<i64, usize> = h
            .entries()
            .filter(|(s, _, _)| *s == n)
            .map(|(_, t, d)| (t, d))
            .collect();
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}
