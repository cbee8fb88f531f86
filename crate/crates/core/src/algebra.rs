//! Finite-dimensional graded algebras presented by structure constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel, rank, SparseVec};
use crate::scalar::{Field, FieldSpec, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
}

impl BasisElement {
    pub fn new(name: impl Into<String>, degree: i64) -> Self {
        BasisElement {
            name: name.into(),
            degree,
        }
    }
}

/// The on-disk algebra description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub field: FieldSpec,
    pub basis: Vec<BasisElement>,
    pub unit: Vec<String>,
    pub table: Vec<Vec<Vec<String>>>,
    pub commutative: bool,
}

/// A validated graded algebra. `table[i][j]` is the product `e_i e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    field: Field,
    basis: Vec<BasisElement>,
    unit: SparseVec,
    table: Vec<Vec<SparseVec>>,
    commutative: bool,
}

#[inline]
pub(crate) fn odd(d: i64) -> bool {
    d.rem_euclid(2) == 1
}

impl GradedAlgebra {
    /// Validates the structure constants exhaustively.
    pub fn new(
        field: Field,
        basis: Vec<BasisElement>,
        unit: SparseVec,
        table: Vec<Vec<SparseVec>>,
        commutative: bool,
    ) -> Result<GradedAlgebra> {
        let a = GradedAlgebra {
            field,
            basis,
            unit,
            table,
            commutative,
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::invalid("algebra has an empty basis"));
        }
        if self.table.len() != n || self.table.iter().any(|r| r.len() != n) {
            return Err(Error::invalid(format!("structure-constant table must be {n}x{n}")));
        }
        let in_range = |v: &SparseVec| v.max_index().is_none_or(|m| m < n);
        if !in_range(&self.unit) || self.table.iter().flatten().any(|v| !in_range(v)) {
            return Err(Error::invalid("coefficient vector longer than the basis"));
        }
        for i in 0..n {
            for j in 0..n {
                let want = self.degree(i) + self.degree(j);
                if self.table[i][j].iter().any(|(k, _)| self.degree(*k) != want) {
                    return Err(Error::invalid(format!(
                        "degree additivity violated at ({},{})",
                        self.name(i),
                        self.name(j)
                    )));
                }
            }
        }
        if self.unit.iter().any(|(k, _)| self.degree(*k) != 0) {
            return Err(Error::invalid("unit is not of degree 0"));
        }
        for i in 0..n {
            let e = SparseVec::unit(i, self.field);
            if self.mul(&self.unit, &e) != e || self.mul(&e, &self.unit) != e {
                return Err(Error::invalid(format!(
                    "missing unit: 1·{0} or {0}·1 differs from {0}",
                    self.name(i)
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = self.mul(&self.table[i][j], &SparseVec::unit(k, self.field));
                    let right = self.mul(&SparseVec::unit(i, self.field), &self.table[j][k]);
                    if left != right {
                        return Err(Error::invalid(format!(
                            "associativity violated at ({},{},{})",
                            self.name(i),
                            self.name(j),
                            self.name(k)
                        )));
                    }
                }
            }
        }
        if self.commutative {
            for i in 0..n {
                for j in i..n {
                    let sign = self.field.sign(odd(self.degree(i)) && odd(self.degree(j)));
                    if self.table[i][j] != self.table[j][i].scale(&sign) {
                        return Err(Error::invalid(format!(
                            "graded commutativity (Koszul sign rule) violated at ({},{})",
                            self.name(i),
                            self.name(j)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Parses and validates a description, optionally re-reducing every
    /// coefficient into `field_override`.
    pub fn from_spec(spec: &AlgebraSpec, field_override: Option<Field>) -> Result<GradedAlgebra> {
        let field = match field_override {
            Some(f) => f,
            None => spec.field.to_field()?,
        };
        let n = spec.basis.len();
        let parse_vec = |v: &[String], what: &str| -> Result<SparseVec> {
            if v.len() != n {
                return Err(Error::invalid(format!("{what} has {} entries, basis has {n}", v.len())));
            }
            let dense = v.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>()?;
            Ok(SparseVec::from_dense(&dense))
        };
        let unit = parse_vec(&spec.unit, "unit")?;
        if spec.table.len() != n {
            return Err(Error::invalid(format!(
                "table has {} rows, basis has {n}",
                spec.table.len()
            )));
        }
        let mut table = Vec::with_capacity(n);
        for (i, row) in spec.table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!("table row {i} has {} entries", row.len())));
            }
            table.push(
                row.iter()
                    .enumerate()
                    .map(|(j, v)| parse_vec(v, &format!("table[{i}][{j}]")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        GradedAlgebra::new(field, spec.basis.clone(), unit, table, spec.commutative)
    }

    pub fn from_json(text: &str, field_override: Option<Field>) -> Result<GradedAlgebra> {
        let spec: AlgebraSpec = serde_json::from_str(text)?;
        GradedAlgebra::from_spec(&spec, field_override)
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        let n = self.dim();
        let dense = |v: &SparseVec| {
            v.to_dense(n, self.field)
                .iter()
                .map(Scalar::to_canonical_string)
                .collect()
        };
        AlgebraSpec {
            field: self.field.into(),
            basis: self.basis.clone(),
            unit: dense(&self.unit),
            table: self.table.iter().map(|r| r.iter().map(dense).collect()).collect(),
            commutative: self.commutative,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn unit(&self) -> &SparseVec {
        &self.unit
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    /// `e_i e_j`.
    pub fn product(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i][j]
    }

    /// True when every basis element has internal degree 0.
    pub fn is_ungraded(&self) -> bool {
        self.basis.iter().all(|b| b.degree == 0)
    }

    pub fn dims_by_degree(&self) -> std::collections::BTreeMap<i64, usize> {
        let mut out = std::collections::BTreeMap::new();
        for b in &self.basis {
            *out.entry(b.degree).or_insert(0) += 1;
        }
        out
    }

    /// Bilinear product of coefficient vectors, without dimension checks.
    pub(crate) fn mul(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut terms = Vec::new();
        for (i, a) in u.iter() {
            for (j, b) in v.iter() {
                let ab = a * b;
                terms.extend(self.table[*i][*j].iter().map(|(k, c)| (*k, c * &ab)));
            }
        }
        SparseVec::from_terms(terms)
    }

    /// Right multiplication of a vector by the basis element `e_j`.
    pub(crate) fn mul_basis_right(&self, u: &SparseVec, j: usize) -> SparseVec {
        let mut terms = Vec::new();
        for (i, a) in u.iter() {
            terms.extend(self.table[*i][j].iter().map(|(k, c)| (*k, c * a)));
        }
        SparseVec::from_terms(terms)
    }

    /// Product of two coefficient vectors (dense or sparse lengths must not
    /// exceed the basis).
    pub fn multiply(&self, u: &SparseVec, v: &SparseVec) -> Result<SparseVec> {
        for w in [u, v] {
            if let Some(m) = w.max_index() {
                if m >= self.dim() {
                    return Err(Error::Dimension {
                        expected: self.dim(),
                        got: m + 1,
                    });
                }
            }
        }
        Ok(self.mul(u, v))
    }

    /// Product of dense coefficient vectors.
    pub fn multiply_dense(&self, u: &[Scalar], v: &[Scalar]) -> Result<Vec<Scalar>> {
        for w in [u, v] {
            if w.len() != self.dim() {
                return Err(Error::Dimension {
                    expected: self.dim(),
                    got: w.len(),
                });
            }
        }
        Ok(self
            .mul(&SparseVec::from_dense(u), &SparseVec::from_dense(v))
            .to_dense(self.dim(), self.field))
    }

    /// Whether a vector is homogeneous of the given degree.
    pub fn is_homogeneous(&self, v: &SparseVec, degree: i64) -> bool {
        v.iter().all(|(k, _)| self.degree(*k) == degree)
    }

    /// The opposite algebra: `a ·op b = (−1)^{|a||b|} b a`.
    pub fn opposite(&self) -> GradedAlgebra {
        let n = self.dim();
        let table = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let s = self.field.sign(odd(self.degree(i)) && odd(self.degree(j)));
                        self.table[j][i].scale(&s)
                    })
                    .collect()
            })
            .collect();
        GradedAlgebra {
            field: self.field,
            basis: self
                .basis
                .iter()
                .map(|b| BasisElement::new(format!("{}°", b.name), b.degree))
                .collect(),
            unit: self.unit.clone(),
            table,
            commutative: self.commutative,
        }
    }
}

/// `A ⊗ B` with basis the ordered pairs `(i, j) ↦ i·dim B + j` and product
/// `(a⊗b)(a'⊗b') = (−1)^{|b||a'|} aa' ⊗ bb'`.
pub fn tensor_algebras(a: &GradedAlgebra, b: &GradedAlgebra) -> Result<GradedAlgebra> {
    if a.field != b.field {
        return Err(Error::invalid(format!("field mismatch: {} vs {}", a.field, b.field)));
    }
    let (na, nb) = (a.dim(), b.dim());
    let idx = |i: usize, j: usize| i * nb + j;
    let basis = (0..na)
        .flat_map(|i| (0..nb).map(move |j| (i, j)))
        .map(|(i, j)| BasisElement::new(format!("{}⊗{}", a.name(i), b.name(j)), a.degree(i) + b.degree(j)))
        .collect();
    let pair = |u: &SparseVec, v: &SparseVec| -> SparseVec {
        let mut terms = Vec::new();
        for (i, x) in u.iter() {
            for (j, y) in v.iter() {
                terms.push((idx(*i, *j), x * y));
            }
        }
        SparseVec::from_terms(terms)
    };
    let unit = pair(&a.unit, &b.unit);
    let mut table = vec![vec![SparseVec::new(); na * nb]; na * nb];
    for i in 0..na {
        for j in 0..nb {
            for i2 in 0..na {
                for j2 in 0..nb {
                    let s = a.field.sign(odd(b.degree(j)) && odd(a.degree(i2)));
                    table[idx(i, j)][idx(i2, j2)] = pair(&a.table[i][i2], &b.table[j][j2]).scale(&s);
                }
            }
        }
    }
    GradedAlgebra::new(a.field, basis, unit, table, a.commutative && b.commutative)
}

/// Trace-form criterion for separability of a commutative algebra in degree 0.
pub fn is_etale(a: &GradedAlgebra) -> Result<bool> {
    if !a.is_commutative() {
        return Err(Error::invalid("is_etale requires a commutative algebra"));
    }
    if !a.is_ungraded() {
        return Err(Error::invalid("is_etale requires an algebra concentrated in degree 0"));
    }
    Ok(rank(&trace_form(a), a.dim()) == a.dim())
}

/// Columns of the matrix `tr(L_{e_i e_j})`.
pub fn trace_form(a: &GradedAlgebra) -> Vec<SparseVec> {
    let n = a.dim();
    let zero = a.field.zero();
    // tr(L_{e_k}) = Σ_m coefficient of e_m in e_k e_m
    let traces: Vec<Scalar> = (0..n)
        .map(|k| (0..n).fold(zero.clone(), |acc, m| &acc + a.table[k][m].get(m).unwrap_or(&zero)))
        .collect();
    (0..n)
        .map(|j| {
            SparseVec::from_terms((0..n).map(|i| {
                let v = a.table[i][j]
                    .iter()
                    .fold(zero.clone(), |acc, (k, c)| &acc + &(c * &traces[*k]));
                (i, v)
            }))
        })
        .collect()
}

/// Basis of the graded center `{z : z u = (−1)^{|z||u|} u z}`.
pub fn center(a: &GradedAlgebra) -> Vec<SparseVec> {
    let n = a.dim();
    let mut out = Vec::new();
    for &d in a.dims_by_degree().keys() {
        let members: Vec<usize> = (0..n).filter(|&i| a.degree(i) == d).collect();
        let cols: Vec<SparseVec> = members
            .iter()
            .map(|&i| {
                let mut terms = Vec::new();
                for u in 0..n {
                    let s = a.field.sign(odd(d) && odd(a.degree(u)));
                    terms.extend(a.table[i][u].iter().map(|(k, c)| (u * n + k, c.clone())));
                    terms.extend(a.table[u][i].iter().map(|(k, c)| (u * n + k, -&(c * &s))));
                }
                SparseVec::from_terms(terms)
            })
            .collect();
        for kv in kernel(a.field, &cols) {
            out.push(kv.reindex(|j| Some(members[j])));
        }
    }
    out
}

/// A degree-preserving algebra homomorphism given by the images of the
/// source basis.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    pub source: GradedAlgebra,
    pub target: GradedAlgebra,
    pub images: Vec<SparseVec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraMapSpec {
    /// Source algebra file, relative to the map file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    /// `matrix[i]` is the image of source basis element `i` in target coordinates.
    pub matrix: Vec<Vec<String>>,
}

impl AlgebraMap {
    pub fn new(source: GradedAlgebra, target: GradedAlgebra, images: Vec<SparseVec>) -> Result<AlgebraMap> {
        let m = AlgebraMap { source, target, images };
        m.validate()?;
        Ok(m)
    }

    pub fn from_spec(source: GradedAlgebra, target: GradedAlgebra, spec: &AlgebraMapSpec) -> Result<AlgebraMap> {
        if spec.matrix.len() != source.dim() {
            return Err(Error::invalid("algebra map needs one image per source basis element"));
        }
        let f = target.field();
        let images = spec
            .matrix
            .iter()
            .map(|row| {
                if row.len() != target.dim() {
                    return Err(Error::invalid("algebra map image has the wrong length"));
                }
                Ok(SparseVec::from_dense(
                    &row.iter().map(|s| f.parse(s)).collect::<Result<Vec<_>>>()?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        AlgebraMap::new(source, target, images)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut terms = Vec::new();
        for (i, c) in v.iter() {
            terms.extend(self.images[*i].iter().map(|(k, x)| (*k, x * c)));
        }
        SparseVec::from_terms(terms)
    }

    fn validate(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        if s.field() != t.field() {
            return Err(Error::invalid("algebra map between different fields"));
        }
        if self.images.len() != s.dim() {
            return Err(Error::invalid("algebra map needs one image per source basis element"));
        }
        for (i, img) in self.images.iter().enumerate() {
            if img.max_index().is_some_and(|m| m >= t.dim()) || !t.is_homogeneous(img, s.degree(i)) {
                return Err(Error::invalid(format!(
                    "image of {} is not of degree {}",
                    s.name(i),
                    s.degree(i)
                )));
            }
        }
        if self.apply(s.unit()) != *t.unit() {
            return Err(Error::invalid("algebra map does not preserve the unit"));
        }
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                if self.apply(s.product(i, j)) != t.mul(&self.images[i], &self.images[j]) {
                    return Err(Error::invalid(format!(
                        "algebra map is not multiplicative at ({},{})",
                        s.name(i),
                        s.name(j)
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn q(n: i64) -> Scalar {
        Field::Rationals.from_i64(n)
    }

    fn e(i: usize) -> SparseVec {
        SparseVec::unit(i, Field::Rationals)
    }

    #[test]
    fn corpus_algebras_validate() {
        let d = corpus::dual_numbers();
        assert!(d.is_commutative());
        assert_eq!(d.dims_by_degree().get(&0), Some(&2));
        assert!(corpus::q_times_q().is_commutative());
    }

    #[test]
    fn degree_violation_reported() {
        let basis = vec![BasisElement::new("1", 0), BasisElement::new("x", 1)];
        let table = vec![vec![e(0), e(1)], vec![e(1), e(1)]];
        let err = GradedAlgebra::new(Field::Rationals, basis, e(0), table, true).unwrap_err();
        assert_eq!(err.to_string(), "degree additivity violated at (x,x)");
    }

    #[test]
    fn non_associative_and_missing_unit() {
        let basis = vec![BasisElement::new("a", 0), BasisElement::new("b", 0)];
        // a unital on the left but not on the right
        let table = vec![vec![e(0), e(1)], vec![e(0), e(0)]];
        let err = GradedAlgebra::new(Field::Rationals, basis.clone(), e(0), table, false).unwrap_err();
        assert!(err.to_string().starts_with("missing unit"), "{err}");
        // b·b = a + b is fine; so is b·b = a
        let table = vec![
            vec![e(0), e(1)],
            vec![e(1), SparseVec::from_terms([(0, q(1)), (1, q(1))])],
        ];
        assert!(GradedAlgebra::new(Field::Rationals, basis.clone(), e(0), table, true).is_ok());
        let table = vec![vec![e(0), e(1)], vec![e(1), e(0)]];
        let good = GradedAlgebra::new(Field::Rationals, basis, e(0), table, true).unwrap();
        assert_eq!(good.dim(), 2);
        // (aa)a = ba = a but a(aa) = ab = 0
        let basis = vec![
            BasisElement::new("1", 0),
            BasisElement::new("a", 0),
            BasisElement::new("b", 0),
        ];
        let table = vec![
            vec![e(0), e(1), e(2)],
            vec![e(1), e(2), SparseVec::new()],
            vec![e(2), e(1), SparseVec::new()],
        ];
        let err = GradedAlgebra::new(Field::Rationals, basis, e(0), table, false).unwrap_err();
        assert_eq!(err.to_string(), "associativity violated at (a,a,a)");
    }

    #[test]
    fn sign_rule_violation() {
        // y, z odd with yz = zy = w
        let basis = vec![
            BasisElement::new("1", 0),
            BasisElement::new("y", 1),
            BasisElement::new("z", 1),
            BasisElement::new("w", 2),
        ];
        let mut table = vec![vec![SparseVec::new(); 4]; 4];
        for i in 0..4 {
            table[0][i] = e(i);
            table[i][0] = e(i);
        }
        table[1][2] = e(3);
        table[2][1] = e(3);
        let err = GradedAlgebra::new(Field::Rationals, basis, e(0), table, true).unwrap_err();
        assert!(err.to_string().contains("Koszul"), "{err}");
    }

    #[test]
    fn multiplication_examples() {
        let d = corpus::dual_numbers();
        assert!(d.multiply(&e(1), &e(1)).unwrap().is_empty());
        let qq = corpus::q_times_q();
        let one = SparseVec::from_terms([(0, q(1)), (1, q(1))]);
        assert_eq!(qq.multiply(&e(0), &one).unwrap(), e(0));
        let ext = corpus::exterior();
        assert!(ext.multiply(&e(1), &e(1)).unwrap().is_empty());
        assert!(matches!(d.multiply(&e(2), &e(0)), Err(Error::Dimension { .. })));
        assert!(d.multiply_dense(&[q(1)], &[q(1), q(0)]).is_err());
    }

    #[test]
    fn tensor_examples() {
        let d = corpus::dual_numbers();
        let dd = tensor_algebras(&d, &d).unwrap();
        assert_eq!(dd.dim(), 4);
        assert!(dd.is_commutative());
        // (x⊗1)(1⊗x) = x⊗x
        assert_eq!(dd.mul(&e(2), &e(1)), e(3));

        let ext = corpus::exterior();
        let ee = tensor_algebras(&ext, &ext).unwrap();
        // (x⊗1)(1⊗y) = x⊗y, (1⊗y)(x⊗1) = −x⊗y
        assert_eq!(ee.mul(&e(2), &e(1)), e(3));
        assert_eq!(ee.mul(&e(1), &e(2)), e(3).neg());

        // Q×Q ⊗ Q×Q: four orthogonal idempotents, checked against a hand table.
        let qq = corpus::q_times_q();
        let q4 = tensor_algebras(&qq, &qq).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { e(i) } else { SparseVec::new() };
                assert_eq!(q4.product(i, j), &expected);
            }
        }
        assert_eq!(q4.unit(), &SparseVec::from_terms((0..4).map(|i| (i, q(1)))));
        assert!(tensor_algebras(&qq, &corpus::f4()).is_err());
    }

    #[test]
    fn tensor_is_associative_up_to_reindexing() {
        let (a, b, c) = (corpus::exterior(), corpus::dual_numbers(), corpus::exterior());
        let left = tensor_algebras(&tensor_algebras(&a, &b).unwrap(), &c).unwrap();
        let right = tensor_algebras(&a, &tensor_algebras(&b, &c).unwrap()).unwrap();
        // Both use lexicographic triples, so the indices coincide.
        assert_eq!(left.dim(), right.dim());
        for i in 0..left.dim() {
            assert_eq!(left.degree(i), right.degree(i));
            for j in 0..left.dim() {
                assert_eq!(left.product(i, j), right.product(i, j));
            }
        }
    }

    #[test]
    fn etale_examples() {
        assert!(is_etale(&corpus::q_times_q()).unwrap());
        assert!(!is_etale(&corpus::dual_numbers()).unwrap());
        // F4 over F2: trace matrix [[0,1],[1,1]], determinant 1.
        let f4 = corpus::f4();
        let tf = trace_form(&f4);
        let f2 = Field::Prime(2);
        assert_eq!(tf[0].to_dense(2, f2), vec![f2.from_i64(0), f2.from_i64(1)]);
        assert_eq!(tf[1].to_dense(2, f2), vec![f2.from_i64(1), f2.from_i64(1)]);
        assert!(is_etale(&f4).unwrap());
        assert!(is_etale(&corpus::exterior()).is_err());
        assert!(is_etale(&corpus::matrices_2x2()).is_err());
    }

    #[test]
    fn etale_of_tensor_is_conjunction() {
        let algs = [
            corpus::q_times_q(),
            corpus::dual_numbers(),
            corpus::q_cubed(),
            corpus::rational_field(),
        ];
        for a in &algs {
            for b in &algs {
                let ab = tensor_algebras(a, b).unwrap();
                assert_eq!(is_etale(&ab).unwrap(), is_etale(a).unwrap() && is_etale(b).unwrap());
            }
        }
    }

    #[test]
    fn center_examples() {
        assert_eq!(center(&corpus::dual_numbers()).len(), 2);
        let m = corpus::matrices_2x2();
        let z = center(&m);
        assert_eq!(z.len(), 1);
        // the identity spans the center
        let ech = crate::linalg::Echelon::spanned_by(Field::Rationals, z.iter());
        assert!(ech.contains(m.unit()));
        let qm = tensor_algebras(&corpus::q_times_q(), &m).unwrap();
        assert_eq!(center(&qm).len(), 2);
        // exterior algebra on one odd generator: x anticommutes with itself
        // only up to x² = 0, so the graded center is everything.
        assert_eq!(center(&corpus::exterior()).len(), 2);
    }

    #[test]
    fn center_is_subalgebra_with_unit() {
        for a in [
            corpus::matrices_2x2(),
            tensor_algebras(&corpus::q_times_q(), &corpus::matrices_2x2()).unwrap(),
        ] {
            let z = center(&a);
            let ech = crate::linalg::Echelon::spanned_by(a.field(), z.iter());
            assert!(ech.contains(a.unit()));
            for u in &z {
                for v in &z {
                    assert!(ech.contains(&a.mul(u, v)));
                }
            }
        }
    }

    #[test]
    fn spec_round_trip_and_field_override() {
        let d = corpus::dual_numbers();
        let spec = d.to_spec();
        assert_eq!(GradedAlgebra::from_spec(&spec, None).unwrap(), d);
        let d5 = GradedAlgebra::from_spec(&spec, Some(Field::Prime(5))).unwrap();
        assert_eq!(d5.field(), Field::Prime(5));
    }

    #[test]
    fn algebra_map_checks() {
        let t = corpus::q_times_q();
        let a = corpus::relative_algebra();
        let good = corpus::relative_unit_map();
        assert_eq!(good.source.dim(), 2);
        let bad = AlgebraMap::new(t, a, vec![e(0), e(0)]);
        assert!(bad.is_err());
    }
}
