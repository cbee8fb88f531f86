//! Two-sided bar and cobar constructions.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{odd, tensor_algebras, BasisElement, GradedAlgebra};
use crate::chains::{BettiTable, ChainComplex, DoubleComplex, COMPLETE};
use crate::error::{Error, Result};
use crate::linalg::{rank_by_degree, SparseVec};
use crate::loday::{loday_complex, LodayComplex};
use crate::scalar::Field;
use crate::simplicial::sphere_min;

/// Bar complexes with more generators than this are refused.
pub const MAX_BAR_GENERATORS: usize = 4_000_000;

/// Bilinear map on levels: `table[p][q][i * dim_q + j]` lands in level `p + q`.
type LevelTable = Vec<Vec<Vec<SparseVec>>>;

fn apply_bilinear(
    table: &LevelTable,
    dims: (&ChainComplex, &ChainComplex),
    p: usize,
    x: &SparseVec,
    q: usize,
    y: &SparseVec,
) -> SparseVec {
    let Some(block) = table.get(p).and_then(|r| r.get(q)) else {
        return SparseVec::new();
    };
    let w = dims.1.rank_at(q);
    let mut terms = Vec::new();
    for (i, c) in x.iter() {
        for (j, d) in y.iter() {
            let cd = c * d;
            terms.extend(block[i * w + j].iter().map(|(k, v)| (*k, v * &cd)));
        }
    }
    SparseVec::from_terms(terms)
}

fn level_dim(c: &ChainComplex, s: usize) -> usize {
    if s < c.num_levels() {
        c.rank_at(s)
    } else {
        0
    }
}

/// Total degree of generator `i` at level `s`.
fn total(c: &ChainComplex, s: usize, i: usize) -> i64 {
    s as i64 + c.degrees(s)[i]
}

/// A chain complex with an associative, unital chain-level product.
#[derive(Clone, Debug)]
pub struct DgAlgebra {
    complex: ChainComplex,
    mult: LevelTable,
    unit: SparseVec,
    commutative: bool,
}

impl DgAlgebra {
    /// `mult[p][q]` for `p + q ≤ top`; checks Leibniz, unit and associativity
    /// on basis elements.
    pub fn new(complex: ChainComplex, mult: LevelTable, unit: SparseVec, commutative: bool) -> Result<DgAlgebra> {
        let b = DgAlgebra {
            complex,
            mult,
            unit,
            commutative,
        };
        b.validate()?;
        Ok(b)
    }

    /// An ordinary algebra placed in level 0.
    pub fn from_algebra(a: &GradedAlgebra) -> DgAlgebra {
        let field = a.field();
        let degrees: Vec<i64> = (0..a.dim()).map(|i| a.degree(i)).collect();
        let complex = ChainComplex::new(field, vec![degrees], vec![vec![SparseVec::new(); a.dim()]], COMPLETE)
            .expect("one level with zero differential");
        let block = (0..a.dim())
            .flat_map(|i| (0..a.dim()).map(move |j| (i, j)))
            .map(|(i, j)| a.product(i, j).clone())
            .collect();
        DgAlgebra {
            complex,
            mult: vec![vec![block]],
            unit: a.unit().clone(),
            commutative: a.is_commutative(),
        }
    }

    /// Normalized Loday chains with the shuffle product.
    pub fn from_loday(l: &LodayComplex) -> Result<DgAlgebra> {
        if !l.is_normalized() {
            return Err(Error::usage("the shuffle product needs the normalized complex"));
        }
        let c = l.complex().clone();
        let top = c.top();
        let mult = (0..=top)
            .map(|p| {
                (0..=top - p)
                    .map(|q| {
                        let pairs: Vec<(usize, usize)> =
                            (0..l.dim(p)).flat_map(|i| (0..l.dim(q)).map(move |j| (i, j))).collect();
                        pairs
                            .par_iter()
                            .map(|&(i, j)| l.shuffle_basis(p, i, q, j))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        DgAlgebra::new(c, mult, l.unit(0), true)
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn unit(&self) -> &SparseVec {
        &self.unit
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn multiply(&self, p: usize, x: &SparseVec, q: usize, y: &SparseVec) -> SparseVec {
        apply_bilinear(&self.mult, (&self.complex, &self.complex), p, x, q, y)
    }

    fn validate(&self) -> Result<()> {
        let c = &self.complex;
        let field = c.field();
        let top = c.top();
        if self.mult.len() != top + 1 || (0..=top).any(|p| self.mult[p].len() != top - p + 1) {
            return Err(Error::invalid("product table does not cover the levels"));
        }
        for p in 0..=top {
            for q in 0..=top - p {
                if self.mult[p][q].len() != c.rank_at(p) * c.rank_at(q) {
                    return Err(Error::invalid(format!("product block ({p},{q}) has the wrong size")));
                }
            }
        }
        if !c.apply_d(0, &self.unit).is_empty() || c.rank_at(0) == 0 {
            return Err(Error::invalid("missing unit cycle"));
        }
        let e = |i| SparseVec::unit(i, field);
        for p in 0..=top {
            for i in 0..c.rank_at(p) {
                let x = e(i);
                if self.multiply(0, &self.unit, p, &x) != x || self.multiply(p, &x, 0, &self.unit) != x {
                    return Err(Error::invalid(format!("unit does not act as identity on ({p},{i})")));
                }
                for q in 0..=top - p {
                    for j in 0..c.rank_at(q) {
                        let y = e(j);
                        let xy = self.multiply(p, &x, q, &y);
                        if xy
                            .iter()
                            .any(|(k, _)| c.degrees(p + q)[*k] != c.degrees(p)[i] + c.degrees(q)[j])
                        {
                            return Err(Error::invalid(format!(
                                "product ({p},{i})·({q},{j}) changes internal degree"
                            )));
                        }
                        let lhs = c.apply_d(p + q, &xy);
                        let mut rhs = SparseVec::new();
                        if p > 0 {
                            rhs = rhs.add(&self.multiply(p - 1, &c.apply_d(p, &x), q, &y));
                        }
                        if q > 0 {
                            let t = self.multiply(p, &x, q - 1, &c.apply_d(q, &y));
                            rhs = rhs.add(&t.scale(&field.sign(odd(total(c, p, i)))));
                        }
                        if lhs != rhs {
                            return Err(Error::invalid(format!("Leibniz rule fails at ({p},{i})·({q},{j})")));
                        }
                        for r in 0..=top - p - q {
                            for k in 0..c.rank_at(r) {
                                let z = e(k);
                                let left = self.multiply(p + q, &xy, r, &z);
                                let right = self.multiply(p, &x, q + r, &self.multiply(q, &y, r, &z));
                                if left != right {
                                    return Err(Error::invalid(format!(
                                        "product not associative at ({p},{i}),({q},{j}),({r},{k})"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A DG module over a [`DgAlgebra`]; `act[p][q][i * dim_q + j]` is `b·m`
/// (left) or `m·b` (right) for `b` at `(p, i)` and `m` at `(q, j)`.
#[derive(Clone, Debug)]
pub struct DgModule {
    complex: ChainComplex,
    act: LevelTable,
    side: Side,
}

impl DgModule {
    pub fn new(algebra: &DgAlgebra, complex: ChainComplex, act: LevelTable, side: Side) -> Result<DgModule> {
        let m = DgModule { complex, act, side };
        m.validate(algebra)?;
        Ok(m)
    }

    /// `A` in level 0 with `B` acting through `eps`, given on level-0
    /// generators of `B` and zero above.
    pub fn augmented(algebra: &DgAlgebra, a: &GradedAlgebra, eps: &[SparseVec], side: Side) -> Result<DgModule> {
        let bc = algebra.complex();
        if eps.len() != bc.rank_at(0) {
            return Err(Error::invalid("augmentation needs one image per level-0 generator"));
        }
        let field = a.field();
        let complex = ChainComplex::new(
            field,
            vec![(0..a.dim()).map(|i| a.degree(i)).collect()],
            vec![vec![SparseVec::new(); a.dim()]],
            COMPLETE,
        )?;
        let block: Vec<SparseVec> = eps
            .iter()
            .flat_map(|img| {
                (0..a.dim()).map(move |m| {
                    let mv = SparseVec::unit(m, field);
                    match side {
                        Side::Left => a.mul(img, &mv),
                        Side::Right => a.mul(&mv, img),
                    }
                })
            })
            .collect();
        let act = (0..=bc.top())
            .map(|p| {
                if p == 0 {
                    vec![block.clone()]
                } else {
                    vec![vec![SparseVec::new(); bc.rank_at(p) * a.dim()]]
                }
            })
            .collect();
        DgModule::new(algebra, complex, act, side)
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// `b·m` or `m·b` according to the side; `b` at level `p`, `m` at `q`.
    pub fn act(&self, p: usize, b: &SparseVec, q: usize, m: &SparseVec) -> SparseVec {
        let Some(block) = self.act.get(p).and_then(|r| r.get(q)) else {
            return SparseVec::new();
        };
        let w = self.complex.rank_at(q);
        let mut terms = Vec::new();
        for (i, c) in b.iter() {
            for (j, d) in m.iter() {
                let cd = c * d;
                terms.extend(block[i * w + j].iter().map(|(k, v)| (*k, v * &cd)));
            }
        }
        SparseVec::from_terms(terms)
    }

    fn validate(&self, b: &DgAlgebra) -> Result<()> {
        let (bc, mc) = (b.complex(), &self.complex);
        let field = mc.field();
        let e = |i| SparseVec::unit(i, field);
        let bad = |what: &str, at: String| Err(Error::invalid(format!("module action {what} at {at}")));
        for q in 0..mc.num_levels() {
            for j in 0..mc.rank_at(q) {
                let m = e(j);
                if self.act(0, b.unit(), q, &m) != m {
                    return bad("is not unital", format!("({q},{j})"));
                }
                for p in 0..bc.num_levels() {
                    for i in 0..bc.rank_at(p) {
                        let x = e(i);
                        let xm = self.act(p, &x, q, &m);
                        if xm.iter().any(|(k, _)| {
                            p + q >= mc.num_levels() || mc.degrees(p + q)[*k] != bc.degrees(p)[i] + mc.degrees(q)[j]
                        }) {
                            return bad("leaves the module or changes degree", format!("({p},{i})·({q},{j})"));
                        }
                        if p + q >= mc.num_levels() {
                            continue;
                        }
                        // Leibniz, with the sign carried by whichever factor is on the left
                        let lhs = mc.apply_d(p + q, &xm);
                        let (db, dm) = (
                            if p > 0 {
                                self.act(p - 1, &bc.apply_d(p, &x), q, &m)
                            } else {
                                SparseVec::new()
                            },
                            if q > 0 {
                                self.act(p, &x, q - 1, &mc.apply_d(q, &m))
                            } else {
                                SparseVec::new()
                            },
                        );
                        let rhs = match self.side {
                            Side::Left => db.add(&dm.scale(&field.sign(odd(total(bc, p, i))))),
                            Side::Right => dm.add(&db.scale(&field.sign(odd(total(mc, q, j))))),
                        };
                        if lhs != rhs {
                            return bad("fails the Leibniz rule", format!("({p},{i})·({q},{j})"));
                        }
                        for r in 0..bc.num_levels() {
                            if p + q + r >= mc.num_levels() || p + r > bc.top() {
                                continue;
                            }
                            for k in 0..bc.rank_at(r) {
                                let y = e(k);
                                let (two_step, product) = match self.side {
                                    Side::Left => (
                                        self.act(p, &x, q + r, &self.act(r, &y, q, &m)),
                                        self.act(p + r, &b.multiply(p, &x, r, &y), q, &m),
                                    ),
                                    Side::Right => (
                                        self.act(r, &y, p + q, &xm),
                                        self.act(p + r, &b.multiply(p, &x, r, &y), q, &m),
                                    ),
                                };
                                if two_step != product {
                                    return bad("is not associative", format!("({p},{i}),({r},{k}),({q},{j})"));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A factor of a bar generator: (level, index).
type Factor = (usize, usize);

/// Level compositions of `q` into `parts` pieces bounded by `tops`.
fn compositions(q: usize, tops: &[usize]) -> Vec<Vec<usize>> {
    fn rec(rem: usize, tops: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == tops.len() {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for l in 0..=rem.min(tops[cur.len()]) {
            cur.push(l);
            rec(rem - l, tops, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(q, tops, &mut Vec::new(), &mut out);
    out
}

struct BarShape<'a> {
    factors: Vec<&'a ChainComplex>,
}

impl BarShape<'_> {
    fn tops(&self) -> Vec<usize> {
        self.factors.iter().map(|c| c.num_levels() - 1).collect()
    }

    fn count(&self, q: usize) -> usize {
        compositions(q, &self.tops())
            .iter()
            .map(|ls| {
                ls.iter()
                    .zip(&self.factors)
                    .fold(1usize, |acc, (&l, c)| acc.saturating_mul(level_dim(c, l)))
            })
            .fold(0usize, usize::saturating_add)
    }

    fn generators(&self, q: usize) -> Vec<Vec<Factor>> {
        let mut out = Vec::new();
        for ls in compositions(q, &self.tops()) {
            let sizes: Vec<usize> = ls.iter().zip(&self.factors).map(|(&l, c)| level_dim(c, l)).collect();
            if sizes.contains(&0) {
                continue;
            }
            let total: usize = sizes.iter().product();
            for mut idx in 0..total {
                let mut g = vec![(0, 0); ls.len()];
                for k in (0..ls.len()).rev() {
                    g[k] = (ls[k], idx % sizes[k]);
                    idx /= sizes[k];
                }
                out.push(g);
            }
        }
        out
    }
}

/// Number of generators of total degree ≤ `bound` in the bar complex.
fn bar_size(m: &DgModule, b: &DgAlgebra, n: &DgModule, p_max: usize, bound: usize) -> usize {
    let mut total = 0usize;
    for p in 0..=p_max.min(bound) {
        let mut factors = vec![m.complex()];
        factors.extend(std::iter::repeat_n(b.complex(), p));
        factors.push(n.complex());
        let shape = BarShape { factors };
        for q in 0..=bound - p {
            total = total.saturating_add(shape.count(q));
        }
    }
    total
}

/// `B(M, B, N)` with columns `p ≤ p_max`; only the generators needed for
/// homology in the valid range are built.
pub fn two_sided_bar(m: &DgModule, b: &DgAlgebra, n: &DgModule, p_max: usize) -> Result<DoubleComplex> {
    if m.side != Side::Right || n.side != Side::Left {
        return Err(Error::usage(
            "the bar construction takes a right module and a left module",
        ));
    }
    if p_max < 1 {
        return Err(Error::usage("p_max must be at least 1"));
    }
    let field = b.complex().field();
    let s_valid = [
        p_max - 1,
        b.complex().s_valid(),
        m.complex().s_valid(),
        n.complex().s_valid(),
    ]
    .into_iter()
    .min()
    .unwrap();
    let bound = s_valid + 1;
    let size = bar_size(m, b, n, p_max, bound);
    if size > MAX_BAR_GENERATORS {
        let achievable = (0..s_valid)
            .rev()
            .find(|&s| bar_size(m, b, n, p_max, s + 1) <= MAX_BAR_GENERATORS)
            .unwrap_or(0);
        return Err(Error::range(
            format!("bar complex would need {size} generators"),
            achievable,
        ));
    }
    let mut gens: BTreeMap<(usize, usize), Vec<Vec<Factor>>> = BTreeMap::new();
    for p in 0..=p_max.min(bound) {
        let mut factors = vec![m.complex()];
        factors.extend(std::iter::repeat_n(b.complex(), p));
        factors.push(n.complex());
        let shape = BarShape { factors };
        for q in 0..=bound - p {
            let g = shape.generators(q);
            if !g.is_empty() {
                gens.insert((p, q), g);
            }
        }
    }
    let empty = HashMap::new();
    let index: HashMap<(usize, usize), HashMap<&[Factor], usize>> = gens
        .iter()
        .map(|(k, g)| (*k, g.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect()))
        .collect();
    let complex_of = |p: usize, k: usize| -> &ChainComplex {
        if k == 0 {
            m.complex()
        } else if k == p + 1 {
            n.complex()
        } else {
            b.complex()
        }
    };
    // expand a generator with factor `k` replaced by a vector at level `l`
    let substitute =
        |g: &[Factor], k: usize, l: usize, v: &SparseVec, target: &HashMap<&[Factor], usize>| -> SparseVec {
            SparseVec::from_terms(v.iter().map(|(x, c)| {
                let mut h = g.to_vec();
                h[k] = (l, *x);
                (target[h.as_slice()], c.clone())
            }))
        };
    let merge = |g: &[Factor], k: usize, l: usize, v: &SparseVec, target: &HashMap<&[Factor], usize>| -> SparseVec {
        SparseVec::from_terms(v.iter().map(|(x, c)| {
            let mut h: Vec<Factor> = g[..k].to_vec();
            h.push((l, *x));
            h.extend_from_slice(&g[k + 2..]);
            (target[h.as_slice()], c.clone())
        }))
    };
    let mut cells = BTreeMap::new();
    let mut dh = BTreeMap::new();
    let mut dv = BTreeMap::new();
    for (&(p, q), g) in &gens {
        let degs: Vec<i64> = g
            .iter()
            .map(|w| {
                w.iter()
                    .enumerate()
                    .map(|(k, &(l, i))| complex_of(p, k).degrees(l)[i])
                    .sum()
            })
            .collect();
        cells.insert((p, q), degs);
        let h_cols: Vec<SparseVec> = if p == 0 {
            vec![SparseVec::new(); g.len()]
        } else {
            let target = index.get(&(p - 1, q)).unwrap_or(&empty);
            g.par_iter()
                .map(|w| {
                    let mut col = SparseVec::new();
                    for i in 0..=p {
                        let (l1, x1) = w[i];
                        let (l2, x2) = w[i + 1];
                        let e1 = SparseVec::unit(x1, field);
                        let e2 = SparseVec::unit(x2, field);
                        let prod = if i == 0 {
                            m.act(l2, &e2, l1, &e1)
                        } else if i == p {
                            n.act(l1, &e1, l2, &e2)
                        } else {
                            b.multiply(l1, &e1, l2, &e2)
                        };
                        let term = merge(w, i, l1 + l2, &prod, target);
                        col = col.add(&term.scale(&field.sign(i % 2 == 1)));
                    }
                    col
                })
                .collect()
        };
        dh.insert((p, q), h_cols);
        if q > 0 {
            let target = index.get(&(p, q - 1)).unwrap_or(&empty);
            let v_cols: Vec<SparseVec> = g
                .par_iter()
                .map(|w| {
                    let mut col = SparseVec::new();
                    let mut before = p as i64;
                    for (k, &(l, x)) in w.iter().enumerate() {
                        let c = complex_of(p, k);
                        if l > 0 {
                            let dx = c.apply_d(l, &SparseVec::unit(x, field));
                            col = col.add(&substitute(w, k, l - 1, &dx, target).scale(&field.sign(odd(before))));
                        }
                        before += total(c, l, x);
                    }
                    col
                })
                .collect();
            dv.insert((p, q), v_cols);
        }
    }
    DoubleComplex::new(field, cells, dh, dv, s_valid)
}

fn suspension_input(a: &GradedAlgebra, d: usize, s_max: usize) -> Result<(DgAlgebra, Vec<SparseVec>)> {
    if d == 1 {
        let aa = tensor_algebras(a, a)?;
        let eps = (0..a.dim())
            .flat_map(|i| (0..a.dim()).map(move |j| (i, j)))
            .map(|(i, j)| a.product(i, j).clone())
            .collect();
        return Ok((DgAlgebra::from_algebra(&aa), eps));
    }
    let l = loday_complex(a, &sphere_min(d - 1)?, s_max + 1, None)?.normalized()?;
    let eps = l.augmentation();
    Ok((DgAlgebra::from_loday(&l)?, eps))
}

/// The bar complex `B(A, HH^{S^{d−1}}(A), A)` whose total homology is
/// `HH^{S^d}(A)` through `s_max`.
pub fn suspension_bar(a: &GradedAlgebra, d: usize, s_max: usize) -> Result<DoubleComplex> {
    if d == 0 {
        return Err(Error::usage("sphere dimension must be at least 1"));
    }
    if !a.is_commutative() {
        return Err(Error::invalid("the suspension recursion needs a commutative algebra"));
    }
    let (b, eps) = suspension_input(a, d, s_max)?;
    let m = DgModule::augmented(&b, a, &eps, Side::Right)?;
    let n = DgModule::augmented(&b, a, &eps, Side::Left)?;
    two_sided_bar(&m, &b, &n, s_max + 1)
}

/// `HH^{S^d}(A)` through `s_max` by iterated bar constructions.
pub fn hh_via_suspension(a: &GradedAlgebra, d: usize, s_max: usize) -> Result<BettiTable> {
    let dc = suspension_bar(a, d, s_max)?;
    Ok(dc.total_complex().homology(s_max)?.with_provenance("bar-suspension"))
}

/// On-disk left module description; `action[a][m]` is the coordinate
/// vector of `e_a · m_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    pub basis: Vec<BasisElement>,
    pub action: Vec<Vec<Vec<String>>>,
}

/// A finite-dimensional graded left module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeftModule {
    algebra: GradedAlgebra,
    basis: Vec<BasisElement>,
    action: Vec<Vec<SparseVec>>,
}

impl LeftModule {
    pub fn new(algebra: GradedAlgebra, basis: Vec<BasisElement>, action: Vec<Vec<SparseVec>>) -> Result<LeftModule> {
        let m = LeftModule { algebra, basis, action };
        m.validate()?;
        Ok(m)
    }

    pub fn regular(a: &GradedAlgebra) -> LeftModule {
        let action = (0..a.dim())
            .map(|i| (0..a.dim()).map(|j| a.product(i, j).clone()).collect())
            .collect();
        LeftModule {
            algebra: a.clone(),
            basis: a.basis().to_vec(),
            action,
        }
    }

    /// `A` as a left module over `A ⊗ A°`: `(a ⊗ b)·m = (−1)^{|b||m|} a m b`.
    pub fn bimodule(a: &GradedAlgebra) -> Result<LeftModule> {
        let env = tensor_algebras(a, &a.opposite())?;
        let field = a.field();
        let n = a.dim();
        let action = (0..n * n)
            .map(|ab| {
                let (x, y) = (ab / n, ab % n);
                (0..n)
                    .map(|m| {
                        let xm = a.product(x, m);
                        let v = a.mul(xm, &SparseVec::unit(y, field));
                        v.scale(&field.sign(odd(a.degree(y)) && odd(a.degree(m))))
                    })
                    .collect()
            })
            .collect();
        LeftModule::new(env, a.basis().to_vec(), action)
    }

    pub fn from_spec(spec: &ModuleSpec, algebra: GradedAlgebra) -> Result<LeftModule> {
        let field = algebra.field();
        if spec.action.len() != algebra.dim() {
            return Err(Error::invalid("module action needs one row per algebra basis element"));
        }
        let action = spec
            .action
            .iter()
            .map(|row| {
                if row.len() != spec.basis.len() {
                    return Err(Error::invalid("module action row has the wrong length"));
                }
                row.iter()
                    .map(|v| {
                        if v.len() != spec.basis.len() {
                            return Err(Error::invalid("module action vector has the wrong length"));
                        }
                        Ok(SparseVec::from_dense(
                            &v.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>()?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        LeftModule::new(algebra, spec.basis.clone(), action)
    }

    /// Reads a module file; a relative `algebra` path is resolved against
    /// the file's directory unless `algebra` is supplied.
    pub fn from_json(
        text: &str,
        dir: &Path,
        algebra: Option<GradedAlgebra>,
        field: Option<Field>,
    ) -> Result<LeftModule> {
        let spec: ModuleSpec = serde_json::from_str(text)?;
        let alg = match (algebra, &spec.algebra) {
            (Some(a), _) => a,
            (None, Some(path)) => GradedAlgebra::from_json(&std::fs::read_to_string(dir.join(path))?, field)?,
            (None, None) => return Err(Error::invalid("module file names no algebra")),
        };
        LeftModule::from_spec(&spec, alg)
    }

    pub fn to_spec(&self) -> ModuleSpec {
        let n = self.dim();
        ModuleSpec {
            algebra: None,
            basis: self.basis.clone(),
            action: self
                .action
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| {
                            v.to_dense(n, self.algebra.field())
                                .iter()
                                .map(|c| c.to_canonical_string())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn act(&self, a: usize, m: usize) -> &SparseVec {
        &self.action[a][m]
    }

    /// `v · m` for a general algebra element `v`.
    pub fn act_vec(&self, v: &SparseVec, m: &SparseVec) -> SparseVec {
        let mut terms = Vec::new();
        for (i, c) in v.iter() {
            for (j, d) in m.iter() {
                let cd = c * d;
                terms.extend(self.action[*i][*j].iter().map(|(k, x)| (*k, x * &cd)));
            }
        }
        SparseVec::from_terms(terms)
    }

    fn validate(&self) -> Result<()> {
        let a = &self.algebra;
        let field = a.field();
        let n = self.dim();
        if self.action.len() != a.dim() || self.action.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("module action has the wrong shape"));
        }
        for i in 0..a.dim() {
            for j in 0..n {
                let v = &self.action[i][j];
                if v.iter()
                    .any(|(k, _)| *k >= n || self.degree(*k) != a.degree(i) + self.degree(j))
                {
                    return Err(Error::invalid(format!(
                        "invalid module action: {}·{} has the wrong degree",
                        a.name(i),
                        self.basis[j].name
                    )));
                }
            }
        }
        for j in 0..n {
            let m = SparseVec::unit(j, field);
            if self.act_vec(a.unit(), &m) != m {
                return Err(Error::invalid(format!(
                    "invalid module action: unit does not fix {}",
                    self.basis[j].name
                )));
            }
            for x in 0..a.dim() {
                for y in 0..a.dim() {
                    let lhs = self.act_vec(a.product(x, y), &m);
                    let rhs = self.act_vec(&SparseVec::unit(x, field), &self.action[y][j]);
                    if lhs != rhs {
                        return Err(Error::invalid(format!(
                            "invalid module action: not associative at ({},{},{})",
                            a.name(x),
                            a.name(y),
                            self.basis[j].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Cochains `C^n = Hom(A^{⊗n} ⊗ M, N)` for `n ≤ n_max`. A basis map is a
/// pair (input word, output basis element), indexed `word · dim N + out`.
#[derive(Clone, Debug)]
pub struct CobarComplex {
    degrees: Vec<Vec<i64>>,
    /// `delta[n]` sends `C^n` to `C^{n+1}`, for `n < n_max`.
    delta: Vec<Vec<SparseVec>>,
}

impl CobarComplex {
    pub fn n_max(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn dim(&self, n: usize) -> usize {
        self.degrees[n].len()
    }

    pub fn degrees(&self, n: usize) -> &[i64] {
        &self.degrees[n]
    }

    pub fn delta(&self, n: usize) -> &[SparseVec] {
        &self.delta[n]
    }

    /// `H^n` for `n < n_max`, graded by the internal degree of maps.
    pub fn cohomology(&self) -> BettiTable {
        let top = self.n_max();
        let ranks: Vec<BTreeMap<i64, usize>> = (0..top)
            .into_par_iter()
            .map(|n| rank_by_degree(&self.delta[n], self.dim(n + 1), &self.degrees[n]))
            .collect();
        let mut out = BettiTable::new("cobar", top - 1);
        for n in 0..top {
            let mut by_t: BTreeMap<i64, usize> = BTreeMap::new();
            for &t in &self.degrees[n] {
                *by_t.entry(t).or_default() += 1;
            }
            for (t, dim) in by_t {
                let out_rank = ranks[n].get(&t).copied().unwrap_or(0);
                let in_rank = if n > 0 {
                    ranks[n - 1].get(&t).copied().unwrap_or(0)
                } else {
                    0
                };
                out.set(n, t, dim - out_rank - in_rank);
            }
        }
        out
    }
}

/// The cobar complex computing `RHom_A(M, N)`; cohomology is valid for
/// `n < n_max`.
pub fn cobar(m: &LeftModule, a: &GradedAlgebra, n: &LeftModule, n_max: usize) -> Result<CobarComplex> {
    if m.algebra() != a || n.algebra() != a {
        return Err(Error::invalid("modules are over a different algebra"));
    }
    if n_max < 1 {
        return Err(Error::usage("n_max must be at least 1"));
    }
    let field = a.field();
    let (da, dm, dn) = (a.dim(), m.dim(), n.dim());
    let mut words = vec![dm];
    for k in 1..=n_max {
        let w = words[k - 1]
            .checked_mul(da)
            .filter(|&w| w.saturating_mul(dn) <= crate::loday::MAX_LEVEL_DIM)
            .ok_or_else(|| Error::range(format!("cochains of length {k} are too large"), k.saturating_sub(2)))?;
        words.push(w);
    }
    // an input word of length k: (a_1..a_k, m) packed as ((a_1·da + a_2)…)·dm + m
    let decode = |mut w: usize, k: usize| -> (Vec<usize>, usize) {
        let mm = w % dm;
        w /= dm;
        let mut xs = vec![0; k];
        for i in (0..k).rev() {
            xs[i] = w % da;
            w /= da;
        }
        (xs, mm)
    };
    let encode = |xs: &[usize], mm: usize| -> usize { xs.iter().fold(0, |acc, &x| acc * da + x) * dm + mm };
    let in_degree = |xs: &[usize], mm: usize| -> i64 { xs.iter().map(|&x| a.degree(x)).sum::<i64>() + m.degree(mm) };
    let degrees: Vec<Vec<i64>> = (0..=n_max)
        .map(|k| {
            (0..words[k])
                .flat_map(|w| {
                    let (xs, mm) = decode(w, k);
                    let din = in_degree(&xs, mm);
                    (0..dn).map(move |o| n.degree(o) - din)
                })
                .collect()
        })
        .collect();
    let mut delta = Vec::with_capacity(n_max);
    for k in 0..n_max {
        // rows of δ: (input word u of length k+1, output o'); gather
        // (column, row, coefficient) triples from each u
        let triples: Vec<(usize, usize, crate::scalar::Scalar)> = (0..words[k + 1])
            .into_par_iter()
            .flat_map_iter(|u| {
                let (xs, mm) = decode(u, k + 1);
                let mut out = Vec::new();
                // a_1 · f(a_2..a_{k+1}, m)
                let rest = encode(&xs[1..], mm);
                let rest_deg = in_degree(&xs[1..], mm);
                for o in 0..dn {
                    let f_deg = n.degree(o) - rest_deg;
                    let sign = field.sign(odd(a.degree(xs[0])) && odd(f_deg));
                    for (o2, c) in n.act(xs[0], o).iter() {
                        out.push((rest * dn + o, u * dn + o2, c * &sign));
                    }
                }
                // f(.., a_i a_{i+1}, ..)
                for i in 0..k {
                    let sign = field.sign((i + 1) % 2 == 1);
                    for (z, c) in a.product(xs[i], xs[i + 1]).iter() {
                        let mut ys = xs[..i].to_vec();
                        ys.push(*z);
                        ys.extend_from_slice(&xs[i + 2..]);
                        let w = encode(&ys, mm);
                        for o in 0..dn {
                            out.push((w * dn + o, u * dn + o, c * &sign));
                        }
                    }
                }
                // f(a_1..a_k, a_{k+1} m)
                let sign = field.sign((k + 1) % 2 == 1);
                for (m2, c) in m.act(xs[k], mm).iter() {
                    let w = encode(&xs[..k], *m2);
                    for o in 0..dn {
                        out.push((w * dn + o, u * dn + o, c * &sign));
                    }
                }
                out
            })
            .collect();
        let mut cols: Vec<Vec<(usize, crate::scalar::Scalar)>> = vec![Vec::new(); words[k] * dn];
        for (col, row, c) in triples {
            cols[col].push((row, c));
        }
        delta.push(cols.into_iter().map(SparseVec::from_terms).collect::<Vec<_>>());
    }
    for k in 1..n_max {
        for (i, col) in delta[k - 1].iter().enumerate() {
            let mut terms = Vec::new();
            for (r, c) in col.iter() {
                terms.extend(delta[k][*r].iter().map(|(x, v)| (*x, v * c)));
            }
            if !SparseVec::from_terms(terms).is_empty() {
                return Err(Error::invalid(format!(
                    "cobar differential squares to nonzero at C^{} column {i}",
                    k - 1
                )));
            }
        }
    }
    Ok(CobarComplex { degrees, delta })
}

/// `H^n` of `RHom_A(M, N)` for `n < n_max`.
pub fn rhom(m: &LeftModule, a: &GradedAlgebra, n: &LeftModule, n_max: usize) -> Result<BettiTable> {
    Ok(cobar(m, a, n, n_max)?.cohomology())
}

/// Hochschild cohomology `HH^n(A, M)` for `n < n_max`; `M` defaults to `A`.
pub fn hochschild_cohomology(a: &GradedAlgebra, m: Option<&LeftModule>, n_max: usize) -> Result<BettiTable> {
    let source = LeftModule::bimodule(a)?;
    let target = match m {
        Some(m) => m.clone(),
        None => source.clone(),
    };
    let env = source.algebra().clone();
    Ok(cobar(&source, &env, &target, n_max)?
        .cohomology()
        .with_provenance("hochschild-cohomology"))
}
