//! The simplicial module `[n] ↦ A^{⊗X_n}` and its homology.
//!
//! Tensor words at level `n` are indexed in mixed radix, position 0 most
//! significant, positions following the order of `level_simplices`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::algebra::{is_etale, odd, AlgebraMap, GradedAlgebra};
use crate::chains::{BettiTable, ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::linalg::{complement_indices, Echelon, SparseVec};
use crate::simplicial::{fold_map, Levels, SimplicialMap, SimplicialSet};

/// Raw levels beyond this many basis words are refused.
pub const MAX_LEVEL_DIM: usize = 1 << 22;

/// Tensor-word arithmetic over one algebra.
#[derive(Clone, Debug)]
pub(crate) struct Words<'a> {
    pub alg: &'a GradedAlgebra,
}

impl Words<'_> {
    fn base(&self) -> usize {
        self.alg.dim()
    }

    pub fn count(&self, len: usize) -> Result<usize> {
        let mut n: usize = 1;
        for _ in 0..len {
            n = n
                .checked_mul(self.base())
                .filter(|&n| n <= MAX_LEVEL_DIM)
                .ok_or_else(|| Error::range(format!("tensor power of length {len} is too large"), 0))?;
        }
        Ok(n)
    }

    pub fn decode(&self, mut idx: usize, len: usize) -> Vec<usize> {
        let b = self.base();
        let mut w = vec![0; len];
        for k in (0..len).rev() {
            w[k] = idx % b;
            idx /= b;
        }
        w
    }

    pub fn degree(&self, w: &[usize]) -> i64 {
        w.iter().map(|&x| self.alg.degree(x)).sum()
    }

    /// Tensor product of one vector per position.
    pub fn expand(&self, factors: &[SparseVec]) -> SparseVec {
        let f = self.alg.field();
        let mut acc: Vec<(usize, crate::scalar::Scalar)> = vec![(0, f.one())];
        for v in factors {
            if v.is_empty() {
                return SparseVec::new();
            }
            let mut next = Vec::with_capacity(acc.len() * v.nnz());
            for (i, c) in &acc {
                for (k, x) in v.iter() {
                    next.push((i * self.base() + k, c * x));
                }
            }
            acc = next;
        }
        SparseVec::from_terms(acc)
    }

    /// Pushforward of a word along `f: positions → 0..target_len`: factors
    /// landing together are multiplied in source order, empty targets get
    /// the unit, and the Koszul sign of the regrouping is applied.
    pub fn pushforward(&self, w: &[usize], f: &[usize], target_len: usize) -> SparseVec {
        let field = self.alg.field();
        let mut negative = false;
        for j in 0..w.len() {
            if !odd(self.alg.degree(w[j])) {
                continue;
            }
            for j2 in j + 1..w.len() {
                if f[j] > f[j2] && odd(self.alg.degree(w[j2])) {
                    negative = !negative;
                }
            }
        }
        let mut factors: Vec<Option<SparseVec>> = vec![None; target_len];
        for (j, &x) in w.iter().enumerate() {
            let slot = &mut factors[f[j]];
            *slot = Some(match slot.take() {
                None => SparseVec::unit(x, field),
                Some(v) => self.alg.mul_basis_right(&v, x),
            });
        }
        let factors: Vec<SparseVec> = factors
            .into_iter()
            .map(|v| v.unwrap_or_else(|| self.alg.unit().clone()))
            .collect();
        let out = self.expand(&factors);
        if negative {
            out.neg()
        } else {
            out
        }
    }

    /// Linear extension of [`Words::pushforward`] to a vector of words.
    pub fn push_vec(&self, v: &SparseVec, len: usize, f: &[usize], target_len: usize) -> SparseVec {
        let mut terms = Vec::new();
        for (i, c) in v.iter() {
            terms.extend(
                self.pushforward(&self.decode(*i, len), f, target_len)
                    .into_entries()
                    .into_iter()
                    .map(|(k, x)| (k, &x * c)),
            );
        }
        SparseVec::from_terms(terms)
    }

    /// Positionwise product `(a_1⊗…)(b_1⊗…) = ± a_1b_1 ⊗ …`, the sign from
    /// moving each `b_i` past `a_j`, `j > i`.
    pub fn pointwise(&self, a: &[usize], b: &[usize]) -> SparseVec {
        let mut negative = false;
        let mut odd_after = 0usize;
        for i in (0..a.len()).rev() {
            if odd(self.alg.degree(b[i])) && odd_after % 2 == 1 {
                negative = !negative;
            }
            if odd(self.alg.degree(a[i])) {
                odd_after += 1;
            }
        }
        let factors: Vec<SparseVec> = a.iter().zip(b).map(|(&x, &y)| self.alg.product(x, y).clone()).collect();
        let out = self.expand(&factors);
        if negative {
            out.neg()
        } else {
            out
        }
    }
}

/// A Loday complex, possibly relative to a base and possibly normalized,
/// presented as a quotient of the raw tensor levels.
#[derive(Clone, Debug)]
pub struct LodayComplex {
    algebra: GradedAlgebra,
    space: SimplicialSet,
    base: Option<AlgebraMap>,
    normalized: bool,
    levels: Levels,
    /// Raw dimension per level.
    raw: Vec<usize>,
    /// Subspace divided out at each level.
    zero: Vec<Echelon>,
    /// Raw indices forming the quotient basis.
    basis: Vec<Vec<usize>>,
    pos: Vec<HashMap<usize, usize>>,
    complex: ChainComplex,
}

fn check_base(a: &GradedAlgebra, phi: &AlgebraMap) -> Result<()> {
    if phi.target != *a {
        return Err(Error::invalid("base map does not land in the algebra"));
    }
    let t = &phi.source;
    if !t.is_commutative() || !t.is_ungraded() || !is_etale(t)? {
        return Err(Error::invalid(
            "base algebra must be commutative, étale and concentrated in degree 0",
        ));
    }
    let (dt, da) = (t.dim(), a.dim());
    if da % dt != 0 {
        return Err(Error::invalid(format!(
            "algebra of dimension {da} is not free over a base of dimension {dt}"
        )));
    }
    let words = Words { alg: a };
    let ech = relations(&words, phi, 2)?;
    let tensor_dim = da * da - ech.dim();
    if tensor_dim * dt != da * da {
        return Err(Error::invalid(
            "algebra is not free over the base (rank of A ⊗_T A is wrong)",
        ));
    }
    Ok(())
}

/// Balancing relations `φ(t)·₀ w − φ(t)·ⱼ w` on words of length `len`.
fn relations(words: &Words, phi: &AlgebraMap, len: usize) -> Result<Echelon> {
    let a = words.alg;
    let count = words.count(len)?;
    let mut ech = Echelon::new(a.field());
    if len < 2 {
        return Ok(ech);
    }
    let images: Vec<SparseVec> = (0..phi.source.dim())
        .map(|t| phi.apply(&SparseVec::unit(t, a.field())))
        .collect();
    let rels: Vec<SparseVec> = (0..count)
        .into_par_iter()
        .flat_map_iter(|idx| {
            let w = words.decode(idx, len);
            let mut out = Vec::new();
            for img in &images {
                let act = |pos: usize| -> SparseVec {
                    let factors: Vec<SparseVec> = w
                        .iter()
                        .enumerate()
                        .map(|(k, &x)| {
                            if k == pos {
                                a.mul(img, &SparseVec::unit(x, a.field()))
                            } else {
                                SparseVec::unit(x, a.field())
                            }
                        })
                        .collect();
                    words.expand(&factors)
                };
                let first = act(0);
                for j in 1..len {
                    let r = first.add(&act(j).neg());
                    if !r.is_empty() {
                        out.push(r);
                    }
                }
            }
            out
        })
        .collect();
    for r in &rels {
        ech.insert(r);
    }
    Ok(ech)
}

impl LodayComplex {
    fn build(
        algebra: &GradedAlgebra,
        space: &SimplicialSet,
        n_levels: usize,
        base: Option<&AlgebraMap>,
        normalized: bool,
    ) -> Result<LodayComplex> {
        if !algebra.is_commutative() {
            return Err(Error::invalid("the Loday construction needs a commutative algebra"));
        }
        if n_levels < 1 {
            return Err(Error::usage("level bound must be at least 1"));
        }
        if let Some(phi) = base {
            check_base(algebra, phi)?;
        }
        let words = Words { alg: algebra };
        let levels = space.levels(n_levels);
        let field = algebra.field();
        let raw: Vec<usize> = (0..=n_levels)
            .map(|n| words.count(levels.len(n)))
            .collect::<Result<_>>()?;
        let mut zero = Vec::with_capacity(n_levels + 1);
        for n in 0..=n_levels {
            let len = levels.len(n);
            let mut ech = match base {
                Some(phi) => relations(&words, phi, len)?,
                None => Echelon::new(field),
            };
            if normalized && n >= 1 {
                let prev = levels.len(n - 1);
                let images: Vec<SparseVec> = (0..=n - 1)
                    .into_par_iter()
                    .flat_map_iter(|j| {
                        let f = &levels.degeneracies[n - 1][j];
                        let words = &words;
                        (0..raw[n - 1]).map(move |idx| words.pushforward(&words.decode(idx, prev), f, len))
                    })
                    .collect();
                for v in &images {
                    ech.insert(v);
                }
            }
            zero.push(ech);
        }
        let basis: Vec<Vec<usize>> = (0..=n_levels).map(|n| complement_indices(&zero[n], raw[n])).collect();
        let pos: Vec<HashMap<usize, usize>> = basis
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, &r)| (r, i)).collect())
            .collect();
        let gens: Vec<Vec<i64>> = (0..=n_levels)
            .map(|n| {
                basis[n]
                    .iter()
                    .map(|&r| words.degree(&words.decode(r, levels.len(n))))
                    .collect()
            })
            .collect();
        let diffs: Vec<Vec<SparseVec>> = (0..=n_levels)
            .map(|n| {
                if n == 0 {
                    return vec![SparseVec::new(); basis[0].len()];
                }
                basis[n]
                    .par_iter()
                    .map(|&r| {
                        let w = words.decode(r, levels.len(n));
                        let mut terms = Vec::new();
                        for i in 0..=n {
                            let img = words.pushforward(&w, &levels.faces[n][i], levels.len(n - 1));
                            let sign = field.sign(i % 2 == 1);
                            terms.extend(img.into_entries().into_iter().map(|(k, x)| (k, &x * &sign)));
                        }
                        let raw_d = SparseVec::from_terms(terms);
                        zero[n - 1].reduce(&raw_d).reindex(|k| pos[n - 1].get(&k).copied())
                    })
                    .collect()
            })
            .collect();
        let complex = ChainComplex::new(field, gens, diffs, n_levels - 1)?;
        Ok(LodayComplex {
            algebra: algebra.clone(),
            space: space.clone(),
            base: base.cloned(),
            normalized,
            levels,
            raw,
            zero,
            basis,
            pos,
            complex,
        })
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn space(&self) -> &SimplicialSet {
        &self.space
    }

    pub fn levels(&self) -> &Levels {
        &self.levels
    }

    pub fn n_levels(&self) -> usize {
        self.raw.len() - 1
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Dimension of the raw tensor power at level `n`.
    pub fn raw_dim(&self, n: usize) -> usize {
        self.raw[n]
    }

    /// Dimension of level `n` after quotients.
    pub fn dim(&self, n: usize) -> usize {
        self.basis[n].len()
    }

    /// The same data with degenerate elements divided out.
    pub fn normalized(&self) -> Result<LodayComplex> {
        if self.normalized {
            return Ok(self.clone());
        }
        LodayComplex::build(&self.algebra, &self.space, self.n_levels(), self.base.as_ref(), true)
    }

    fn words(&self) -> Words<'_> {
        Words { alg: &self.algebra }
    }

    /// Raw vector of a quotient-basis vector.
    pub fn lift(&self, n: usize, v: &SparseVec) -> SparseVec {
        v.reindex(|i| Some(self.basis[n][i]))
    }

    /// Quotient coordinates of a raw vector.
    pub fn project(&self, n: usize, raw: &SparseVec) -> SparseVec {
        self.zero[n].reduce(raw).reindex(|k| self.pos[n].get(&k).copied())
    }

    /// The unit `1 ⊗ … ⊗ 1` at level `n`.
    pub fn unit(&self, n: usize) -> SparseVec {
        self.project(n, &self.words().pushforward(&[], &[], self.levels.len(n)))
    }

    fn raw_degeneracy(&self, n: usize, j: usize, v: &SparseVec) -> SparseVec {
        self.words().push_vec(
            v,
            self.levels.len(n),
            &self.levels.degeneracies[n][j],
            self.levels.len(n + 1),
        )
    }

    /// Shuffle product of basis vectors `(p, i)` and `(q, j)`, in quotient
    /// coordinates at level `p + q`.
    pub fn shuffle_basis(&self, p: usize, i: usize, q: usize, j: usize) -> Result<SparseVec> {
        let e = |k| SparseVec::unit(k, self.algebra.field());
        self.shuffle(p, &e(i), q, &e(j))
    }

    /// Eilenberg–Zilber shuffle followed by the positionwise product:
    /// `(−1)^{q·t_a} Σ sgn(μ,ν) s_ν a · s_μ b`.
    pub fn shuffle(&self, p: usize, a: &SparseVec, q: usize, b: &SparseVec) -> Result<SparseVec> {
        let n = p + q;
        if n > self.n_levels() {
            return Err(Error::range(format!("product lands in level {n}"), self.n_levels()));
        }
        let field = self.algebra.field();
        let words = self.words();
        let len_p = self.levels.len(p);
        // (−1)^{q·t_a} taken termwise on a
        let ra = SparseVec::from_terms(self.lift(p, a).into_entries().into_iter().map(|(x, c)| {
            if q % 2 == 1 && odd(words.degree(&words.decode(x, len_p))) {
                (x, -c)
            } else {
                (x, c)
            }
        }));
        let rb = self.lift(q, b);
        let len = self.levels.len(n);
        let mut total = SparseVec::new();
        for mu in combinations(n, p) {
            let nu: Vec<usize> = (0..n).filter(|k| !mu.contains(k)).collect();
            let inversions: usize = mu.iter().map(|&m| nu.iter().filter(|&&x| x < m).count()).sum();
            let mut sa = ra.clone();
            for (lvl, &k) in (p..).zip(&nu) {
                sa = self.raw_degeneracy(lvl, k, &sa);
            }
            let mut sb = rb.clone();
            for (lvl, &k) in (q..).zip(&mu) {
                sb = self.raw_degeneracy(lvl, k, &sb);
            }
            let mut terms = Vec::new();
            for (x, c) in sa.iter() {
                let wx = words.decode(*x, len);
                for (y, d) in sb.iter() {
                    let wy = words.decode(*y, len);
                    let cd = c * d;
                    terms.extend(
                        words
                            .pointwise(&wx, &wy)
                            .into_entries()
                            .into_iter()
                            .map(|(k, v)| (k, &v * &cd)),
                    );
                }
            }
            total = total.add(&SparseVec::from_terms(terms).scale(&field.sign(inversions % 2 == 1)));
        }
        Ok(self.project(n, &total))
    }

    /// Level 0 sent to `A` by multiplying all factors; zero above level 0.
    pub fn augmentation(&self) -> Vec<SparseVec> {
        let words = self.words();
        let len = self.levels.len(0);
        let fold = vec![0; len];
        self.basis[0]
            .iter()
            .map(|&r| words.pushforward(&words.decode(r, len), &fold, 1))
            .collect()
    }

    pub fn is_cycle(&self, s: usize, v: &SparseVec) -> bool {
        self.complex.apply_d(s, v).is_empty()
    }

    /// Whether `v` at level `s` is a boundary.
    pub fn is_boundary(&self, s: usize, v: &SparseVec) -> Result<bool> {
        if s + 1 > self.complex.top() {
            return Err(Error::range(
                format!("boundary test at s = {s}"),
                self.complex.s_valid(),
            ));
        }
        let ech = Echelon::spanned_by(self.algebra.field(), self.complex.differential(s + 1).iter());
        Ok(ech.contains(v))
    }

    /// A basis of the cycles at level `s`.
    pub fn cycles(&self, s: usize) -> Vec<SparseVec> {
        crate::linalg::kernel(self.algebra.field(), self.complex.differential(s))
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// The unnormalized complex with levels `0..=n_levels`; homology is valid
/// through `n_levels − 1`.
pub fn loday_complex(
    a: &GradedAlgebra,
    x: &SimplicialSet,
    n_levels: usize,
    base: Option<&AlgebraMap>,
) -> Result<LodayComplex> {
    LodayComplex::build(a, x, n_levels, base, false)
}

/// The normalized chain complex.
pub fn normalize(l: &LodayComplex) -> Result<ChainComplex> {
    Ok(l.normalized()?.complex)
}

/// Higher Hochschild homology through `s_max`.
pub fn hh(a: &GradedAlgebra, x: &SimplicialSet, s_max: usize, base: Option<&AlgebraMap>) -> Result<BettiTable> {
    let l = LodayComplex::build(a, x, s_max + 1, base, true)?;
    Ok(l.complex.homology(s_max)?.with_provenance("loday"))
}

/// The chain map induced by a simplicial map on unnormalized complexes.
pub fn induced_map(f: &SimplicialMap, a: &GradedAlgebra, n_levels: usize) -> Result<ChainMap> {
    let src = loday_complex(a, &f.source, n_levels, None)?;
    let tgt = loday_complex(a, &f.target, n_levels, None)?;
    induced_between(f, &src, &tgt)
}

/// The chain map induced by a simplicial map on normalized complexes.
pub fn induced_map_normalized(f: &SimplicialMap, a: &GradedAlgebra, n_levels: usize) -> Result<ChainMap> {
    let src = LodayComplex::build(a, &f.source, n_levels, None, true)?;
    let tgt = LodayComplex::build(a, &f.target, n_levels, None, true)?;
    induced_between(f, &src, &tgt)
}

/// Chain map between two Loday complexes of the same algebra along `f`.
pub fn induced_between(f: &SimplicialMap, src: &LodayComplex, tgt: &LodayComplex) -> Result<ChainMap> {
    if src.n_levels() != tgt.n_levels() {
        return Err(Error::usage("level bounds differ"));
    }
    if src.algebra != tgt.algebra {
        return Err(Error::usage("algebras differ"));
    }
    let words = src.words();
    let maps = (0..=src.n_levels())
        .map(|n| {
            let fmap = f.level_map(&src.levels, &tgt.levels, n);
            src.basis[n]
                .par_iter()
                .map(|&r| {
                    let img = words.pushforward(&words.decode(r, src.levels.len(n)), &fmap, tgt.levels.len(n));
                    tgt.project(n, &img)
                })
                .collect()
        })
        .collect();
    ChainMap::new(src.complex.clone(), tgt.complex.clone(), maps)
}

/// Homology class of the product of two cycles.
pub fn shuffle_product(l: &LodayComplex, s1: usize, z1: &SparseVec, s2: usize, z2: &SparseVec) -> Result<SparseVec> {
    if !l.normalized {
        return Err(Error::usage("shuffle products are taken in the normalized complex"));
    }
    if s1 + s2 > l.complex.s_valid() {
        return Err(Error::range(
            format!("product in degree {}", s1 + s2),
            l.complex.s_valid(),
        ));
    }
    if !l.is_cycle(s1, z1) || !l.is_cycle(s2, z2) {
        return Err(Error::invalid("shuffle product of a non-cycle"));
    }
    l.shuffle(s1, z1, s2, z2)
}

/// The fold map `X ⊔ X → X` applied on Loday complexes; exposed for the
/// product on `H_0` of a disjoint union.
pub fn fold_induced(a: &GradedAlgebra, x: &SimplicialSet, n_levels: usize) -> Result<ChainMap> {
    induced_map(&fold_map(x), a, n_levels)
}

/// The classical Hochschild complex `A^{⊗(n+1)}` with the cyclic bar
/// differential, levels `0..=n_levels`.
pub fn cyclic_bar_oracle(a: &GradedAlgebra, n_levels: usize) -> Result<ChainComplex> {
    let words = Words { alg: a };
    let field = a.field();
    let mut gens = Vec::new();
    let mut diffs = Vec::new();
    for n in 0..=n_levels {
        let count = words.count(n + 1)?;
        gens.push((0..count).map(|i| words.degree(&words.decode(i, n + 1))).collect());
        let cols: Vec<SparseVec> = (0..count)
            .into_par_iter()
            .map(|idx| {
                if n == 0 {
                    return SparseVec::new();
                }
                let w = words.decode(idx, n + 1);
                let mut terms = Vec::new();
                let basis_vecs =
                    |w: &[usize]| -> Vec<SparseVec> { w.iter().map(|&x| SparseVec::unit(x, field)).collect() };
                for i in 0..n {
                    let mut factors = basis_vecs(&w[..i]);
                    factors.push(a.product(w[i], w[i + 1]).clone());
                    factors.extend(basis_vecs(&w[i + 2..]));
                    let sign = field.sign(i % 2 == 1);
                    terms.extend(
                        words
                            .expand(&factors)
                            .into_entries()
                            .into_iter()
                            .map(|(k, x)| (k, &x * &sign)),
                    );
                }
                let last = w[n];
                let rest: i64 = w[..n].iter().map(|&x| a.degree(x)).sum();
                let koszul = odd(a.degree(last)) && odd(rest);
                let mut factors = vec![a.product(last, w[0]).clone()];
                factors.extend(basis_vecs(&w[1..n]));
                let sign = field.sign((n % 2 == 1) != koszul);
                terms.extend(
                    words
                        .expand(&factors)
                        .into_entries()
                        .into_iter()
                        .map(|(k, x)| (k, &x * &sign)),
                );
                SparseVec::from_terms(terms)
            })
            .collect();
        diffs.push(cols);
    }
    ChainComplex::new(field, gens, diffs, n_levels.saturating_sub(1))
}

/// Hochschild homology from [`cyclic_bar_oracle`].
pub fn oracle_hh(a: &GradedAlgebra, s_max: usize) -> Result<BettiTable> {
    Ok(cyclic_bar_oracle(a, s_max + 1)?
        .homology(s_max)?
        .with_provenance("oracle"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::is_quasi_iso;
    use crate::corpus;
    use crate::simplicial::{circle_min, circle_subdiv, disjoint_union, point, polygon_collapse, sphere_min};

    fn dims(t: &BettiTable, s_max: usize) -> Vec<usize> {
        (0..=s_max).map(|s| t.dims_at(s)).collect()
    }

    #[test]
    fn rational_field_on_circle() {
        let q = corpus::rational_field();
        let l = loday_complex(&q, &circle_min(), 5, None).unwrap();
        for n in 0..=5 {
            assert_eq!(l.dim(n), 1);
        }
        assert_eq!(dims(&l.complex().homology(4).unwrap(), 4), vec![1, 0, 0, 0, 0]);
        let nl = l.normalized().unwrap();
        assert_eq!((0..=5).map(|n| nl.dim(n)).collect::<Vec<_>>(), vec![1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn dual_numbers_levels_and_homology() {
        let d = corpus::dual_numbers();
        let l = loday_complex(&d, &circle_min(), 5, None).unwrap();
        for n in 0..=5 {
            assert_eq!(l.dim(n), 1 << (n + 1));
        }
        let h = hh(&d, &circle_min(), 4, None).unwrap();
        assert_eq!(h.provenance, "loday");
        assert_eq!(dims(&h, 4), vec![2, 1, 1, 1, 1]);
        assert!(h.entries().all(|(_, t, _)| t == 0));
        // normalization keeps homology and shrinks levels
        let raw = l.complex().homology(4).unwrap();
        assert!(raw.agrees(&h, 4));
        let nl = l.normalized().unwrap();
        for n in 1..=5 {
            assert!(nl.dim(n) < l.dim(n));
        }
    }

    #[test]
    fn point_gives_the_algebra() {
        for (_, a) in corpus::commutative() {
            let h = hh(&a, &point(), 3, None).unwrap();
            for (t, n) in a.dims_by_degree() {
                assert_eq!(h.get(0, t), n);
            }
            assert_eq!((1..=3).map(|s| h.dims_at(s)).sum::<usize>(), 0);
        }
    }

    #[test]
    fn etale_sphere() {
        let h = hh(&corpus::q_times_q(), &sphere_min(2).unwrap(), 3, None).unwrap();
        assert_eq!(dims(&h, 3), vec![2, 0, 0, 0]);
    }

    #[test]
    fn oracle_agrees_with_loday_on_circle() {
        for (name, a) in corpus::commutative() {
            let l = hh(&a, &circle_min(), 3, None).unwrap();
            let o = oracle_hh(&a, 3).unwrap();
            assert!(l.agrees(&o, 3), "{name}: {l:?} vs {o:?}");
        }
    }

    #[test]
    fn oracle_on_matrices_has_trace_quotient() {
        let o = oracle_hh(&corpus::matrices_2x2(), 2).unwrap();
        assert_eq!(dims(&o, 2), vec![1, 0, 0]);
        let o = oracle_hh(&corpus::rational_field(), 3).unwrap();
        assert_eq!(dims(&o, 3), vec![1, 0, 0, 0]);
    }

    #[test]
    fn oracle_differential_matches_loday_for_dual_numbers() {
        // circle_min at level n lists the basepoint first, then s_{n-1}…σ
        // words; both complexes have the same Betti numbers and level sizes
        let d = corpus::dual_numbers();
        let l = loday_complex(&d, &circle_min(), 4, None).unwrap();
        let o = cyclic_bar_oracle(&d, 4).unwrap();
        for n in 0..=4 {
            assert_eq!(l.complex().rank_at(n), o.rank_at(n));
        }
        assert!(l.complex().homology(3).unwrap().agrees(&o.homology(3).unwrap(), 3));
    }

    #[test]
    fn model_independence_small_window() {
        let d = corpus::dual_numbers();
        let a = hh(&d, &circle_min(), 2, None).unwrap();
        let b = hh(&d, &circle_subdiv(3).unwrap(), 2, None).unwrap();
        assert!(a.agrees(&b, 2));
    }

    #[test]
    fn kunneth_for_disjoint_unions() {
        let d = corpus::dual_numbers();
        let x = disjoint_union(&[circle_min(), point()]);
        let h = hh(&d, &x, 3, None).unwrap();
        let conv = hh(&d, &circle_min(), 3, None)
            .unwrap()
            .convolve(&hh(&d, &point(), 3, None).unwrap(), "conv");
        assert!(h.agrees(&conv, 3));
    }

    #[test]
    fn relative_level_dims() {
        let phi = corpus::relative_unit_map();
        let a = corpus::relative_algebra();
        let l = loday_complex(&a, &circle_min(), 3, Some(&phi)).unwrap();
        for n in 0..=3 {
            // rank 2^{n+1} over T = Q×Q
            assert_eq!(l.dim(n), 2 * (1 << (n + 1)));
        }
        let abs = hh(&a, &circle_min(), 2, None).unwrap();
        let rel = hh(&a, &circle_min(), 2, Some(&phi)).unwrap();
        assert!(abs.agrees(&rel, 2));
    }

    #[test]
    fn non_commutative_rejected() {
        assert!(loday_complex(&corpus::matrices_2x2(), &circle_min(), 2, None).is_err());
        assert!(loday_complex(&corpus::dual_numbers(), &circle_min(), 0, None).is_err());
    }

    #[test]
    fn induced_identity_and_fold() {
        let d = corpus::dual_numbers();
        let x = circle_min();
        let id = induced_map(&SimplicialMap::identity(&x), &d, 3).unwrap();
        assert!(is_quasi_iso(&id, 2).unwrap());
        for n in 0..=3 {
            for i in 0..id.source.rank_at(n) {
                assert_eq!(id.column(n, i), &SparseVec::unit(i, d.field()));
            }
        }
        // H_0 of pt ⊔ pt → pt is multiplication A ⊗ A → A
        let f = fold_induced(&d, &point(), 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(f.column(0, i * 2 + j), d.product(i, j));
            }
        }
    }

    #[test]
    fn polygon_collapse_is_a_quasi_iso() {
        let f = polygon_collapse(3).unwrap();
        let m = induced_map_normalized(&f, &corpus::dual_numbers(), 4).unwrap();
        assert!(is_quasi_iso(&m, 3).unwrap());
    }

    #[test]
    fn shuffle_unit_and_products() {
        let d = corpus::dual_numbers();
        let l = LodayComplex::build(&d, &circle_min(), 5, None, true).unwrap();
        let unit = l.unit(0);
        // z: a nonzero class in degree 1
        let z1 = l.cycles(1).into_iter().find(|z| !l.is_boundary(1, z).unwrap()).unwrap();
        let p = shuffle_product(&l, 0, &unit, 1, &z1).unwrap();
        assert_eq!(p, z1);
        let zz = shuffle_product(&l, 1, &z1, 1, &z1).unwrap();
        assert!(l.is_boundary(2, &zz).unwrap());
        // Q×Q: H_0 product is the algebra product
        let qq = corpus::q_times_q();
        let l = LodayComplex::build(&qq, &circle_min(), 2, None, true).unwrap();
        let e1 = l.project(0, &SparseVec::unit(0, qq.field()));
        let p = shuffle_product(&l, 0, &e1, 0, &e1).unwrap();
        assert!(l.is_boundary(0, &p.add(&e1.neg())).unwrap());
        // non-cycle input is refused
        let l = LodayComplex::build(&d, &circle_min(), 3, None, true).unwrap();
        let non_cycle = (0..l.dim(1))
            .map(|i| SparseVec::unit(i, d.field()))
            .find(|v| !l.is_cycle(1, v));
        if let Some(v) = non_cycle {
            assert!(shuffle_product(&l, 1, &v, 0, &l.unit(0)).is_err());
        }
    }

    fn classes(l: &LodayComplex, s: usize) -> Vec<SparseVec> {
        let ech = Echelon::spanned_by(l.algebra().field(), l.complex().differential(s + 1).iter());
        let mut e = ech.clone();
        l.cycles(s).into_iter().filter(|z| e.insert(z)).collect()
    }

    #[test]
    fn shuffle_commutative_associative_on_dual_numbers() {
        let d = corpus::dual_numbers();
        let l = LodayComplex::build(&d, &circle_min(), 4, None, true).unwrap();
        let field = d.field();
        let all: Vec<(usize, SparseVec)> = (0..=3)
            .flat_map(|s| classes(&l, s).into_iter().map(move |z| (s, z)))
            .collect();
        for (s1, z1) in &all {
            for (s2, z2) in &all {
                if s1 + s2 > 3 {
                    continue;
                }
                let ab = l.shuffle(*s1, z1, *s2, z2).unwrap();
                let ba = l.shuffle(*s2, z2, *s1, z1).unwrap();
                let sign = field.sign(odd(*s1 as i64) && odd(*s2 as i64));
                assert!(l.is_boundary(s1 + s2, &ab.add(&ba.scale(&sign).neg())).unwrap());
                for (s3, z3) in &all {
                    if s1 + s2 + s3 > 3 {
                        continue;
                    }
                    let left = l.shuffle(s1 + s2, &ab, *s3, z3).unwrap();
                    let bc = l.shuffle(*s2, z2, *s3, z3).unwrap();
                    let right = l.shuffle(*s1, z1, s2 + s3, &bc).unwrap();
                    assert!(l.is_boundary(s1 + s2 + s3, &left.add(&right.neg())).unwrap());
                }
            }
        }
    }

    #[test]
    fn shuffle_leibniz_and_graded_commutativity_on_exterior() {
        // chain-level Leibniz on all basis pairs, with total degree s + t
        let e = corpus::exterior();
        let l = LodayComplex::build(&e, &circle_min(), 4, None, true).unwrap();
        let c = l.complex();
        let field = e.field();
        for p in 0..=2 {
            for q in 0..=2 {
                for i in 0..l.dim(p) {
                    for j in 0..l.dim(q) {
                        let (x, y) = (SparseVec::unit(i, field), SparseVec::unit(j, field));
                        let xy = l.shuffle(p, &x, q, &y).unwrap();
                        let lhs = c.apply_d(p + q, &xy);
                        let deg_x = p as i64 + c.degrees(p)[i];
                        let mut rhs = SparseVec::new();
                        if p > 0 {
                            rhs = rhs.add(&l.shuffle(p - 1, &c.apply_d(p, &x), q, &y).unwrap());
                        }
                        if q > 0 {
                            let t = l.shuffle(p, &x, q - 1, &c.apply_d(q, &y)).unwrap();
                            rhs = rhs.add(&t.scale(&field.sign(odd(deg_x))));
                        }
                        assert_eq!(lhs, rhs, "Leibniz at ({p},{i}) ({q},{j})");
                    }
                }
            }
        }
        let all: Vec<(usize, SparseVec)> = (0..=3)
            .flat_map(|s| classes(&l, s).into_iter().map(move |z| (s, z)))
            .collect();
        for (s1, z1) in &all {
            for (s2, z2) in &all {
                if s1 + s2 > 3 {
                    continue;
                }
                let t1 = c.degrees(*s1)[z1.leading().unwrap().0];
                let t2 = c.degrees(*s2)[z2.leading().unwrap().0];
                let ab = l.shuffle(*s1, z1, *s2, z2).unwrap();
                let ba = l.shuffle(*s2, z2, *s1, z1).unwrap();
                let sign = field.sign(odd(*s1 as i64 + t1) && odd(*s2 as i64 + t2));
                assert!(l.is_boundary(s1 + s2, &ab.add(&ba.scale(&sign).neg())).unwrap());
            }
        }
    }
}
