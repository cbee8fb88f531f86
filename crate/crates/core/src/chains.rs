//! Bigraded chain complexes (homological `s`, internal `t`) with sparse
//! exact differentials, and their Betti tables.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rank_by_degree, SparseVec};
use crate::scalar::Field;

/// Marks a complex whose homology is exact in every degree.
pub const COMPLETE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    field: Field,
    /// `gens[s][i]` is the internal degree of generator `i` at level `s`.
    gens: Vec<Vec<i64>>,
    /// `diffs[s][i]` is `d` of generator `i` at level `s` (empty at level 0).
    diffs: Vec<Vec<SparseVec>>,
    s_valid: usize,
}

impl ChainComplex {
    pub fn new(field: Field, gens: Vec<Vec<i64>>, diffs: Vec<Vec<SparseVec>>, s_valid: usize) -> Result<ChainComplex> {
        if gens.len() != diffs.len() {
            return Err(Error::invalid("levels of generators and differentials differ"));
        }
        for (s, (g, d)) in gens.iter().zip(&diffs).enumerate() {
            if g.len() != d.len() {
                return Err(Error::invalid(format!(
                    "level {s}: {} generators, {} differential columns",
                    g.len(),
                    d.len()
                )));
            }
            for (i, col) in d.iter().enumerate() {
                if s == 0 {
                    if !col.is_empty() {
                        return Err(Error::invalid("differential out of level 0"));
                    }
                    continue;
                }
                for (k, _) in col.iter() {
                    let Some(&t) = gens[s - 1].get(*k) else {
                        return Err(Error::invalid(format!("level {s}: differential leaves the complex")));
                    };
                    if t != g[i] {
                        return Err(Error::invalid(format!(
                            "level {s}: differential changes internal degree"
                        )));
                    }
                }
            }
        }
        let c = ChainComplex {
            field,
            gens,
            diffs,
            s_valid,
        };
        for s in 2..c.gens.len() {
            let bad = c.diffs[s].par_iter().any(|col| !c.apply_d(s - 1, col).is_empty());
            if bad {
                return Err(Error::invalid(format!("d∘d ≠ 0 at level {s}")));
            }
        }
        Ok(c)
    }

    /// Applies `d_s` to a vector at level `s`.
    pub fn apply_d(&self, s: usize, v: &SparseVec) -> SparseVec {
        if s == 0 {
            return SparseVec::new();
        }
        let mut terms = Vec::new();
        for (i, c) in v.iter() {
            terms.extend(self.diffs[s][*i].iter().map(|(k, x)| (*k, x * c)));
        }
        SparseVec::from_terms(terms)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Highest level present.
    pub fn top(&self) -> usize {
        self.gens.len().saturating_sub(1)
    }

    pub fn num_levels(&self) -> usize {
        self.gens.len()
    }

    pub fn s_valid(&self) -> usize {
        self.s_valid
    }

    pub fn with_s_valid(mut self, s_valid: usize) -> ChainComplex {
        self.s_valid = s_valid;
        self
    }

    pub fn rank_at(&self, s: usize) -> usize {
        self.gens.get(s).map_or(0, Vec::len)
    }

    pub fn degrees(&self, s: usize) -> &[i64] {
        self.gens.get(s).map_or(&[], Vec::as_slice)
    }

    pub fn differential(&self, s: usize) -> &[SparseVec] {
        self.diffs.get(s).map_or(&[], Vec::as_slice)
    }

    /// Generator counts per internal degree at level `s`.
    pub fn dims_by_t(&self, s: usize) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for &t in self.degrees(s) {
            *out.entry(t).or_insert(0) += 1;
        }
        out
    }

    fn ranks(&self, s: usize) -> BTreeMap<i64, usize> {
        if s == 0 || s > self.top() {
            return BTreeMap::new();
        }
        rank_by_degree(&self.diffs[s], self.gens[s - 1].len(), &self.gens[s])
    }

    /// `dim H_{s,t}` for `s ≤ s_max`.
    pub fn homology(&self, s_max: usize) -> Result<BettiTable> {
        if s_max > self.s_valid {
            return Err(Error::range(
                format!("homology requested through s = {s_max}"),
                self.s_valid,
            ));
        }
        let mut table = BettiTable::new("homology", s_max);
        let levels: Vec<usize> = (0..=s_max.min(self.top())).collect();
        let ranks: Vec<(BTreeMap<i64, usize>, BTreeMap<i64, usize>)> =
            levels.par_iter().map(|&s| (self.ranks(s), self.ranks(s + 1))).collect();
        for (&s, (out, inc)) in levels.iter().zip(ranks) {
            for (t, n) in self.dims_by_t(s) {
                let dim = n - out.get(&t).unwrap_or(&0) - inc.get(&t).unwrap_or(&0);
                table.set(s, t, dim);
            }
        }
        Ok(table)
    }

    /// Restricts to levels `0..=top`.
    pub fn truncate(&self, top: usize) -> ChainComplex {
        let n = (top + 1).min(self.gens.len());
        ChainComplex {
            field: self.field,
            gens: self.gens[..n].to_vec(),
            diffs: self.diffs[..n].to_vec(),
            s_valid: self.s_valid.min(top.saturating_sub(1)),
        }
    }

    /// Reorders generators: `perms[s][i]` is the new index of old generator `i`.
    pub fn permuted(&self, perms: &[Vec<usize>]) -> Result<ChainComplex> {
        let mut gens = Vec::new();
        let mut diffs = Vec::new();
        for s in 0..self.gens.len() {
            let p = &perms[s];
            let mut g = vec![0; p.len()];
            let mut d = vec![SparseVec::new(); p.len()];
            for (i, &j) in p.iter().enumerate() {
                g[j] = self.gens[s][i];
                d[j] = if s == 0 {
                    SparseVec::new()
                } else {
                    self.diffs[s][i].reindex(|k| Some(perms[s - 1][k]))
                };
            }
            gens.push(g);
            diffs.push(d);
        }
        ChainComplex::new(self.field, gens, diffs, self.s_valid)
    }

    /// The field in degree 0, internal degree 0.
    pub fn unit(field: Field) -> ChainComplex {
        ChainComplex {
            field,
            gens: vec![vec![0]],
            diffs: vec![vec![SparseVec::new()]],
            s_valid: COMPLETE,
        }
    }
}

/// A chain map between two complexes.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    /// `maps[s][i]` is the image of generator `i` at level `s`.
    maps: Vec<Vec<SparseVec>>,
}

impl ChainMap {
    pub fn new(source: ChainComplex, target: ChainComplex, maps: Vec<Vec<SparseVec>>) -> Result<ChainMap> {
        if source.field != target.field {
            return Err(Error::invalid("chain map between different fields"));
        }
        let levels = source.num_levels().min(target.num_levels());
        if maps.len() != levels {
            return Err(Error::invalid(format!(
                "chain map needs {levels} levels, has {}",
                maps.len()
            )));
        }
        for s in 0..levels {
            if maps[s].len() != source.rank_at(s) {
                return Err(Error::invalid(format!(
                    "chain map level {s} has the wrong number of columns"
                )));
            }
            for (i, col) in maps[s].iter().enumerate() {
                if col
                    .iter()
                    .any(|(k, _)| target.degrees(s).get(*k) != Some(&source.degrees(s)[i]))
                {
                    return Err(Error::invalid(format!(
                        "chain map does not preserve internal degree at level {s}"
                    )));
                }
            }
        }
        let f = ChainMap { source, target, maps };
        for s in 1..levels {
            let bad = (0..f.source.rank_at(s)).into_par_iter().any(|i| {
                let e = SparseVec::unit(i, f.source.field);
                f.apply(s - 1, &f.source.apply_d(s, &e)) != f.target.apply_d(s, &f.maps[s][i])
            });
            if bad {
                return Err(Error::invalid(format!(
                    "chain map does not commute with d at level {s}"
                )));
            }
        }
        Ok(f)
    }

    pub fn identity(c: &ChainComplex) -> ChainMap {
        let maps = (0..c.num_levels())
            .map(|s| (0..c.rank_at(s)).map(|i| SparseVec::unit(i, c.field)).collect())
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            maps,
        }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Result<ChainMap> {
        let levels = source.num_levels().min(target.num_levels());
        let maps = (0..levels).map(|s| vec![SparseVec::new(); source.rank_at(s)]).collect();
        ChainMap::new(source.clone(), target.clone(), maps)
    }

    pub fn levels(&self) -> usize {
        self.maps.len()
    }

    pub fn column(&self, s: usize, i: usize) -> &SparseVec {
        &self.maps[s][i]
    }

    pub fn apply(&self, s: usize, v: &SparseVec) -> SparseVec {
        let mut terms = Vec::new();
        for (i, c) in v.iter() {
            terms.extend(self.maps[s][*i].iter().map(|(k, x)| (*k, x * c)));
        }
        SparseVec::from_terms(terms)
    }

    /// `cone_n = D_n ⊕ C_{n-1}` with `d(y, x) = (dy + f x, −dx)`.
    pub fn mapping_cone(&self) -> ChainComplex {
        let (c, d) = (&self.source, &self.target);
        let levels = self.levels();
        let dsize = |n: usize| if n < levels { d.rank_at(n) } else { 0 };
        let mut gens = Vec::new();
        let mut diffs = Vec::new();
        for n in 0..=levels {
            let mut g: Vec<i64> = d.degrees(n)[..dsize(n)].to_vec();
            let mut cols: Vec<SparseVec> = d.differential(n)[..dsize(n)].to_vec();
            if n >= 1 {
                for i in 0..c.rank_at(n - 1) {
                    g.push(c.degrees(n - 1)[i]);
                    let dx = c.differential(n - 1)[i].neg();
                    let shift = dsize(n - 1);
                    cols.push(self.maps[n - 1][i].add(&dx.reindex(|k| Some(k + shift))));
                }
            }
            gens.push(g);
            diffs.push(cols);
        }
        let s_valid = c.s_valid.saturating_add(1).min(d.s_valid).min(levels.saturating_sub(1));
        ChainComplex::new(c.field, gens, diffs, s_valid).expect("mapping cone of a chain map is a complex")
    }
}

/// True iff the mapping cone is acyclic through `s_max`.
pub fn is_quasi_iso(f: &ChainMap, s_max: usize) -> Result<bool> {
    let bound = f.source.s_valid.min(f.target.s_valid);
    if s_max > bound {
        return Err(Error::range(
            format!("quasi-isomorphism test through s = {s_max}"),
            bound,
        ));
    }
    let cone = f.mapping_cone();
    let h = cone.homology(s_max.min(cone.s_valid))?;
    Ok(h.is_zero())
}

/// `(C ⊗ D)_s = ⊕_{a+b=s} C_a ⊗ D_b`, `d(x⊗y) = dx⊗y + (−1)^a x⊗dy`.
pub fn tensor_complexes(c: &ChainComplex, d: &ChainComplex) -> Result<ChainComplex> {
    if c.field != d.field {
        return Err(Error::invalid(format!("field mismatch: {} vs {}", c.field, d.field)));
    }
    let s_valid = c.s_valid.min(d.s_valid);
    let top = (c.top() + d.top()).min(s_valid.saturating_add(1));
    // offsets[s][a] = start of the C_a ⊗ D_{s-a} block at level s
    let mut offsets: Vec<BTreeMap<usize, usize>> = Vec::new();
    let mut gens = Vec::new();
    for s in 0..=top {
        let mut off = BTreeMap::new();
        let mut g = Vec::new();
        for a in 0..=s.min(c.top()) {
            let b = s - a;
            if b > d.top() {
                continue;
            }
            off.insert(a, g.len());
            for &tc in c.degrees(a) {
                for &td in d.degrees(b) {
                    g.push(tc + td);
                }
            }
        }
        offsets.push(off);
        gens.push(g);
    }
    let mut diffs = Vec::new();
    for s in 0..=top {
        let mut cols = Vec::with_capacity(gens[s].len());
        for &a in offsets[s].keys() {
            let b = s - a;
            let nb = d.rank_at(b);
            for i in 0..c.rank_at(a) {
                for j in 0..nb {
                    let mut terms = Vec::new();
                    if a >= 1 {
                        if let Some(&o) = offsets[s - 1].get(&(a - 1)) {
                            for (k, x) in c.differential(a)[i].iter() {
                                terms.push((o + k * nb + j, x.clone()));
                            }
                        }
                    }
                    if b >= 1 {
                        if let Some(&o) = offsets[s - 1].get(&a) {
                            let sign = c.field.sign(a % 2 == 1);
                            let nb1 = d.rank_at(b - 1);
                            for (k, x) in d.differential(b)[j].iter() {
                                terms.push((o + i * nb1 + k, x * &sign));
                            }
                        }
                    }
                    cols.push(SparseVec::from_terms(terms));
                }
            }
        }
        diffs.push(cols);
    }
    ChainComplex::new(c.field, gens, diffs, s_valid)
}

/// Bigraded dimensions with a declared validity range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub provenance: String,
    pub s_valid: usize,
    entries: BTreeMap<(usize, i64), usize>,
}

#[derive(Serialize, Deserialize)]
struct BettiEntry {
    s: usize,
    t: i64,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct BettiFile {
    provenance: String,
    s_valid: usize,
    entries: Vec<BettiEntry>,
}

impl Serialize for BettiTable {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        BettiFile {
            provenance: self.provenance.clone(),
            s_valid: self.s_valid,
            entries: self
                .entries
                .iter()
                .map(|(&(s, t), &dim)| BettiEntry { s, t, dim })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BettiTable {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let f = BettiFile::deserialize(de)?;
        let mut t = BettiTable::new(f.provenance, f.s_valid);
        for e in f.entries {
            if e.s > f.s_valid {
                return Err(serde::de::Error::custom(format!("entry at s = {} beyond s_valid", e.s)));
            }
            t.set(e.s, e.t, e.dim);
        }
        Ok(t)
    }
}

/// The first entry where two tables differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub s: usize,
    pub t: i64,
    pub left: usize,
    pub right: usize,
}

impl BettiTable {
    pub fn new(provenance: impl Into<String>, s_valid: usize) -> BettiTable {
        BettiTable {
            provenance: provenance.into(),
            s_valid,
            entries: BTreeMap::new(),
        }
    }

    /// A table from total dimensions per `s`, all in internal degree 0.
    pub fn from_dims(provenance: impl Into<String>, dims: &[usize]) -> BettiTable {
        let mut t = BettiTable::new(provenance, dims.len().saturating_sub(1));
        for (s, &d) in dims.iter().enumerate() {
            t.set(s, 0, d);
        }
        t
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> BettiTable {
        self.provenance = provenance.into();
        self
    }

    pub fn set(&mut self, s: usize, t: i64, dim: usize) {
        if dim == 0 {
            self.entries.remove(&(s, t));
        } else {
            self.entries.insert((s, t), dim);
        }
    }

    pub fn get(&self, s: usize, t: i64) -> usize {
        self.entries.get(&(s, t)).copied().unwrap_or(0)
    }

    /// Total dimension at homological degree `s`.
    pub fn dims_at(&self, s: usize) -> usize {
        self.entries.range((s, i64::MIN)..=(s, i64::MAX)).map(|(_, d)| d).sum()
    }

    /// Total dimension at `s + t = n`.
    pub fn total_degree(&self, n: i64) -> usize {
        self.entries
            .iter()
            .filter(|((s, t), _)| *s as i64 + t == n)
            .map(|(_, d)| d)
            .sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, i64, usize)> + '_ {
        self.entries.iter().map(|(&(s, t), &d)| (s, t, d))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries with `s ≤ s_max`.
    pub fn window(&self, s_max: usize) -> BettiTable {
        let s_valid = self.s_valid.min(s_max);
        BettiTable {
            provenance: self.provenance.clone(),
            s_valid,
            entries: self
                .entries
                .iter()
                .filter(|((s, _), _)| *s <= s_valid)
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }

    /// The table of a tensor product of complexes with these homologies.
    pub fn convolve(&self, other: &BettiTable, provenance: impl Into<String>) -> BettiTable {
        let s_valid = self.s_valid.min(other.s_valid);
        let mut out = BettiTable::new(provenance, s_valid);
        for (&(s1, t1), &d1) in &self.entries {
            for (&(s2, t2), &d2) in &other.entries {
                if s1 + s2 <= s_valid {
                    let cur = out.get(s1 + s2, t1 + t2);
                    out.set(s1 + s2, t1 + t2, cur + d1 * d2);
                }
            }
        }
        out
    }

    /// First disagreement for `s ≤ s_max`, in `(s, t)` order.
    pub fn first_mismatch(&self, other: &BettiTable, s_max: usize) -> Option<Mismatch> {
        let keys: std::collections::BTreeSet<(usize, i64)> = self
            .entries
            .keys()
            .chain(other.entries.keys())
            .filter(|(s, _)| *s <= s_max)
            .copied()
            .collect();
        keys.into_iter().find_map(|(s, t)| {
            let (l, r) = (self.get(s, t), other.get(s, t));
            (l != r).then_some(Mismatch {
                s,
                t,
                left: l,
                right: r,
            })
        })
    }

    /// Equal entries for `s ≤ s_max`.
    pub fn agrees(&self, other: &BettiTable, s_max: usize) -> bool {
        self.first_mismatch(other, s_max).is_none()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tables serialize");
        s.push('\n');
        s
    }

    /// Aligned text rendering: one row per `s`, one column per `t`.
    pub fn render(&self) -> String {
        let ts: std::collections::BTreeSet<i64> = self.entries.keys().map(|(_, t)| *t).collect();
        let ts: Vec<i64> = if ts.is_empty() {
            vec![0]
        } else {
            ts.into_iter().collect()
        };
        let mut out = format!("{} (s ≤ {})\n", self.provenance, self.s_valid);
        let width = 6;
        out.push_str(&format!("{:>4}", "s\\t"));
        for t in &ts {
            out.push_str(&format!("{t:>width$}"));
        }
        out.push('\n');
        for s in 0..=self.s_valid.min(
            self.entries
                .keys()
                .map(|k| k.0)
                .max()
                .unwrap_or(0)
                .max(self.s_valid.min(64)),
        ) {
            out.push_str(&format!("{s:>4}"));
            for t in &ts {
                out.push_str(&format!("{:>width$}", self.get(s, *t)));
            }
            out.push('\n');
        }
        out
    }
}

/// Generators at `(p, q)` with internal degrees; `d^h: (p,q) → (p−1,q)`,
/// `d^v: (p,q) → (p,q−1)`, anticommuting.
#[derive(Clone, Debug, Default)]
pub struct DoubleComplex {
    field: Option<Field>,
    cells: BTreeMap<(usize, usize), Vec<i64>>,
    dh: BTreeMap<(usize, usize), Vec<SparseVec>>,
    dv: BTreeMap<(usize, usize), Vec<SparseVec>>,
    s_valid: usize,
}

impl DoubleComplex {
    /// `dh`/`dv` entries missing for a cell are taken to be zero.
    pub fn new(
        field: Field,
        cells: BTreeMap<(usize, usize), Vec<i64>>,
        mut dh: BTreeMap<(usize, usize), Vec<SparseVec>>,
        mut dv: BTreeMap<(usize, usize), Vec<SparseVec>>,
        s_valid: usize,
    ) -> Result<DoubleComplex> {
        for (&(p, q), g) in &cells {
            for (map, target, name) in [
                (&mut dh, p.checked_sub(1).map(|p| (p, q)), "horizontal"),
                (&mut dv, q.checked_sub(1).map(|q| (p, q)), "vertical"),
            ] {
                let cols = map.entry((p, q)).or_insert_with(|| vec![SparseVec::new(); g.len()]);
                if cols.len() != g.len() {
                    return Err(Error::invalid(format!(
                        "{name} differential at ({p},{q}) has the wrong width"
                    )));
                }
                let tg = target.and_then(|k| cells.get(&k));
                for (i, col) in cols.iter().enumerate() {
                    for (k, _) in col.iter() {
                        if tg.and_then(|tg| tg.get(*k)) != Some(&g[i]) {
                            return Err(Error::invalid(format!(
                                "{name} differential at ({p},{q}) leaves the complex or changes t"
                            )));
                        }
                    }
                }
            }
        }
        let dc = DoubleComplex {
            field: Some(field),
            cells,
            dh,
            dv,
            s_valid,
        };
        for (&(p, q), g) in &dc.cells {
            for i in 0..g.len() {
                let e = SparseVec::unit(i, field);
                let h = dc.apply_h((p, q), &e);
                let v = dc.apply_v((p, q), &e);
                if p >= 2 && !dc.apply_h((p - 1, q), &h).is_empty() {
                    return Err(Error::invalid(format!("d^h d^h ≠ 0 at ({p},{q})")));
                }
                if q >= 2 && !dc.apply_v((p, q - 1), &v).is_empty() {
                    return Err(Error::invalid(format!("d^v d^v ≠ 0 at ({p},{q})")));
                }
                if p >= 1 && q >= 1 {
                    let hv = dc.apply_h((p, q - 1), &v);
                    let vh = dc.apply_v((p - 1, q), &h);
                    if !hv.add(&vh).is_empty() {
                        return Err(Error::invalid(format!("d^h d^v + d^v d^h ≠ 0 at ({p},{q})")));
                    }
                }
            }
        }
        Ok(dc)
    }

    fn apply_in(map: &BTreeMap<(usize, usize), Vec<SparseVec>>, at: (usize, usize), v: &SparseVec) -> SparseVec {
        let Some(cols) = map.get(&at) else {
            return SparseVec::new();
        };
        let mut terms = Vec::new();
        for (i, c) in v.iter() {
            terms.extend(cols[*i].iter().map(|(k, x)| (*k, x * c)));
        }
        SparseVec::from_terms(terms)
    }

    pub fn apply_h(&self, at: (usize, usize), v: &SparseVec) -> SparseVec {
        Self::apply_in(&self.dh, at, v)
    }

    pub fn apply_v(&self, at: (usize, usize), v: &SparseVec) -> SparseVec {
        Self::apply_in(&self.dv, at, v)
    }

    pub fn field(&self) -> Field {
        self.field.unwrap_or(Field::Rationals)
    }

    pub fn s_valid(&self) -> usize {
        self.s_valid
    }

    pub fn cells(&self) -> &BTreeMap<(usize, usize), Vec<i64>> {
        &self.cells
    }

    pub fn rank_at(&self, p: usize, q: usize) -> usize {
        self.cells.get(&(p, q)).map_or(0, Vec::len)
    }

    /// Highest total degree with generators.
    pub fn top(&self) -> usize {
        self.cells.keys().map(|(p, q)| p + q).max().unwrap_or(0)
    }

    /// Start of each `(p, q)` block inside total level `p + q`, ordered by `p`.
    pub fn total_offsets(&self) -> BTreeMap<(usize, usize), usize> {
        let mut next = vec![0usize; self.top() + 1];
        let mut out = BTreeMap::new();
        for (&(p, q), g) in &self.cells {
            // BTreeMap order is by p, so offsets grow with p inside each level
            out.insert((p, q), next[p + q]);
            next[p + q] += g.len();
        }
        out
    }

    /// Filtration degree `p` of each generator of total level `n`.
    pub fn filtration(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (&(p, q), g) in &self.cells {
            if p + q == n {
                out.extend(std::iter::repeat_n(p, g.len()));
            }
        }
        out
    }

    pub fn total_complex(&self) -> ChainComplex {
        let field = self.field();
        let top = self.top();
        let off = self.total_offsets();
        let mut gens: Vec<Vec<i64>> = vec![Vec::new(); top + 1];
        let mut diffs: Vec<Vec<SparseVec>> = vec![Vec::new(); top + 1];
        for (&(p, q), g) in &self.cells {
            gens[p + q].extend(g);
            for i in 0..g.len() {
                let e = SparseVec::unit(i, field);
                let mut col = SparseVec::new();
                if p >= 1 {
                    if let Some(&o) = off.get(&(p - 1, q)) {
                        col = col.add(&self.apply_h((p, q), &e).reindex(|k| Some(k + o)));
                    }
                }
                if q >= 1 {
                    if let Some(&o) = off.get(&(p, q - 1)) {
                        col = col.add(&self.apply_v((p, q), &e).reindex(|k| Some(k + o)));
                    }
                }
                diffs[p + q].push(col);
            }
        }
        ChainComplex::new(field, gens, diffs, self.s_valid).expect("anticommuting squares give d² = 0")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use proptest::prelude::*;

    fn q(n: i64) -> Scalar {
        Field::Rationals.from_i64(n)
    }

    fn vecq(terms: &[(usize, i64)]) -> SparseVec {
        SparseVec::from_terms(terms.iter().map(|&(i, c)| (i, q(c))))
    }

    fn two_term(c: i64) -> ChainComplex {
        ChainComplex::new(
            Field::Rationals,
            vec![vec![0], vec![0]],
            vec![vec![SparseVec::new()], vec![vecq(&[(0, c)])]],
            COMPLETE,
        )
        .unwrap()
    }

    #[test]
    fn homology_examples() {
        let zero = ChainComplex::new(
            Field::Rationals,
            vec![vec![0, 1], vec![0]],
            vec![vec![SparseVec::new(); 2], vec![SparseVec::new()]],
            COMPLETE,
        )
        .unwrap();
        let h = zero.homology(1).unwrap();
        assert_eq!((h.get(0, 0), h.get(0, 1), h.get(1, 0)), (1, 1, 1));
        let h = two_term(1).homology(1).unwrap();
        assert!(h.is_zero());
        let h = two_term(0).homology(1).unwrap();
        assert_eq!((h.dims_at(0), h.dims_at(1)), (1, 1));
    }

    #[test]
    fn refuses_beyond_valid_range() {
        let c = two_term(1).with_s_valid(0);
        assert!(matches!(c.homology(1), Err(Error::Range { achievable: 0, .. })));
    }

    #[test]
    fn rejects_bad_complexes() {
        // d∘d ≠ 0: Q → Q → Q with both maps 1
        let bad = ChainComplex::new(
            Field::Rationals,
            vec![vec![0], vec![0], vec![0]],
            vec![vec![SparseVec::new()], vec![vecq(&[(0, 1)])], vec![vecq(&[(0, 1)])]],
            COMPLETE,
        );
        assert!(bad.is_err());
        let shifts_t = ChainComplex::new(
            Field::Rationals,
            vec![vec![0], vec![1]],
            vec![vec![SparseVec::new()], vec![vecq(&[(0, 1)])]],
            COMPLETE,
        );
        assert!(shifts_t.is_err());
    }

    #[test]
    fn quasi_isos() {
        let c = two_term(0);
        assert!(is_quasi_iso(&ChainMap::identity(&c), 1).unwrap());
        let a = two_term(1);
        let z = ChainMap::zero(&a, &two_term(2)).unwrap();
        assert!(is_quasi_iso(&z, 1).unwrap());
        let z = ChainMap::zero(&c, &c).unwrap();
        assert!(!is_quasi_iso(&z, 1).unwrap());
        // not a chain map: Q→Q (1) to Q→Q (1) with f_0 = 1, f_1 = 0
        let bad = ChainMap::new(
            a.clone(),
            a.clone(),
            vec![vec![vecq(&[(0, 1)])], vec![SparseVec::new()]],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn tensor_examples() {
        let c = two_term(0);
        let unit = ChainComplex::unit(Field::Rationals);
        let cu = tensor_complexes(&c, &unit).unwrap();
        assert_eq!(
            cu.homology(1).unwrap().entries().collect::<Vec<_>>(),
            c.homology(1).unwrap().entries().collect::<Vec<_>>()
        );
        let a = two_term(1);
        assert!(tensor_complexes(&a, &a).unwrap().homology(2).unwrap().is_zero());
        let f2 = ChainComplex::unit(Field::Prime(2));
        assert!(tensor_complexes(&a, &f2).is_err());
    }

    #[test]
    fn total_complex_examples() {
        let f = Field::Rationals;
        // a single column (p = 0): the column itself
        let cells = BTreeMap::from([((0, 0), vec![0]), ((0, 1), vec![0])]);
        let dv = BTreeMap::from([((0, 1), vec![vecq(&[(0, 1)])])]);
        let d = DoubleComplex::new(f, cells, BTreeMap::new(), dv, COMPLETE).unwrap();
        assert!(d.total_complex().homology(1).unwrap().is_zero());
        // a single row
        let cells = BTreeMap::from([((0, 0), vec![0]), ((1, 0), vec![0])]);
        let dh = BTreeMap::from([((1, 0), vec![vecq(&[(0, 0)])])]);
        let d = DoubleComplex::new(f, cells, dh, BTreeMap::new(), COMPLETE).unwrap();
        assert_eq!(d.total_complex().homology(1).unwrap().dims_at(1), 1);
        // the square with identities, signs making it anticommute
        let cells = BTreeMap::from([
            ((0, 0), vec![0]),
            ((1, 0), vec![0]),
            ((0, 1), vec![0]),
            ((1, 1), vec![0]),
        ]);
        let dh = BTreeMap::from([((1, 0), vec![vecq(&[(0, 1)])]), ((1, 1), vec![vecq(&[(0, 1)])])]);
        let dv = BTreeMap::from([((0, 1), vec![vecq(&[(0, 1)])]), ((1, 1), vec![vecq(&[(0, -1)])])]);
        let d = DoubleComplex::new(f, cells.clone(), dh.clone(), dv, COMPLETE).unwrap();
        assert!(d.total_complex().homology(2).unwrap().is_zero());
        let dv = BTreeMap::from([((0, 1), vec![vecq(&[(0, 1)])]), ((1, 1), vec![vecq(&[(0, 1)])])]);
        assert!(DoubleComplex::new(f, cells, dh, dv, COMPLETE).is_err());
    }

    #[test]
    fn betti_json_is_sorted_and_round_trips() {
        let mut t = BettiTable::new("loday", 3);
        t.set(2, 0, 1);
        t.set(0, 1, 2);
        t.set(0, 0, 2);
        let text = t.to_json();
        let back: BettiTable = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        let order: Vec<(usize, i64)> = back.entries().map(|(s, t, _)| (s, t)).collect();
        assert_eq!(order, vec![(0, 0), (0, 1), (2, 0)]);
        assert!(serde_json::from_str::<BettiTable>(
            r#"{"provenance":"x","s_valid":0,"entries":[{"s":1,"t":0,"dim":1}]}"#
        )
        .is_err());
    }

    #[test]
    fn convolution_and_mismatch() {
        let a = BettiTable::from_dims("a", &[2, 1, 1]);
        let b = BettiTable::from_dims("b", &[1, 1, 0]);
        let c = a.convolve(&b, "c");
        assert_eq!((0..=2).map(|s| c.dims_at(s)).collect::<Vec<_>>(), vec![2, 3, 2]);
        assert_eq!(
            a.first_mismatch(&b, 2),
            Some(Mismatch {
                s: 0,
                t: 0,
                left: 2,
                right: 1
            })
        );
        assert!(a.agrees(&a.clone().with_provenance("z"), 2));
    }

    /// A three-term complex: `d2` random, `d1 = R ∘ (reduction modulo im d2)`.
    fn random_complex(seed: Vec<(usize, usize, i64)>, n0: usize, n1: usize, n2: usize) -> ChainComplex {
        let f = Field::Rationals;
        let mut d2: Vec<SparseVec> = vec![SparseVec::new(); n2];
        let mut r: Vec<SparseVec> = vec![SparseVec::new(); n1];
        for (k, &(i, j, c)) in seed.iter().enumerate() {
            if k % 2 == 0 {
                d2[i % n2] = d2[i % n2].add(&vecq(&[(j % n1, c)]));
            } else {
                r[i % n1] = r[i % n1].add(&vecq(&[(j % n0, c)]));
            }
        }
        let ech = crate::linalg::Echelon::spanned_by(f, d2.iter());
        let d1 = (0..n1)
            .map(|row| {
                let red = ech.reduce(&SparseVec::unit(row, f));
                red.iter()
                    .fold(SparseVec::new(), |acc, (k, x)| acc.add_scaled(&r[*k], x))
            })
            .collect();
        ChainComplex::new(
            f,
            vec![vec![0; n0], vec![0; n1], vec![0; n2]],
            vec![vec![SparseVec::new(); n0], d1, d2],
            COMPLETE,
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn homology_independent_of_basis_order(
            seed in proptest::collection::vec((0usize..8, 0usize..8, -3i64..4), 0..24),
            n0 in 1usize..5, n1 in 1usize..6, n2 in 1usize..5, rot in 0usize..7,
        ) {
            let c = random_complex(seed, n0, n1, n2);
            let perms: Vec<Vec<usize>> = [n0, n1, n2].iter().map(|&n| (0..n).map(|i| (i * (rot + 1) + rot) % n).collect::<Vec<_>>()).collect();
            // only bijective rotations
            prop_assume!(perms.iter().all(|p| { let mut s = p.clone(); s.sort(); s.dedup(); s.len() == p.len() }));
            let d = c.permuted(&perms).unwrap();
            prop_assert_eq!(c.homology(2).unwrap(), d.homology(2).unwrap());
        }

        #[test]
        fn kunneth(
            s1 in proptest::collection::vec((0usize..8, 0usize..8, -3i64..4), 0..16),
            s2 in proptest::collection::vec((0usize..8, 0usize..8, -3i64..4), 0..16),
            n in 1usize..4,
        ) {
            let c = random_complex(s1, n, n + 1, n);
            let d = random_complex(s2, n + 1, n, 2);
            let cd = tensor_complexes(&c, &d).unwrap();
            let hc = c.homology(4).unwrap();
            let hd = d.homology(4).unwrap();
            let conv = hc.convolve(&hd, "conv");
            let h = cd.homology(4).unwrap();
            prop_assert!(h.agrees(&conv, 4));
        }

        #[test]
        fn euler_characteristic(seed in proptest::collection::vec((0usize..8, 0usize..8, -3i64..4), 0..24)) {
            let c = random_complex(seed, 3, 4, 2);
            let h = c.homology(2).unwrap();
            let chi = |f: &dyn Fn(usize) -> usize| f(0) as i64 - f(1) as i64 + f(2) as i64;
            prop_assert_eq!(chi(&|s| h.dims_at(s)), chi(&|s| c.rank_at(s)));
        }
    }
}
