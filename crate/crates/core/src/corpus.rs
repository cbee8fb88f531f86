//! The shipped example algebras, embedded at compile time.

use crate::algebra::{AlgebraMap, AlgebraMapSpec, GradedAlgebra};

pub const RATIONAL_FIELD: &str = include_str!("../../../corpus/q.json");
pub const DUAL_NUMBERS: &str = include_str!("../../../corpus/dual.json");
pub const Q_TIMES_Q: &str = include_str!("../../../corpus/qxq.json");
pub const Q_CUBED: &str = include_str!("../../../corpus/q3.json");
pub const F4: &str = include_str!("../../../corpus/f4.json");
pub const EXTERIOR: &str = include_str!("../../../corpus/exterior.json");
pub const MATRICES_2X2: &str = include_str!("../../../corpus/mat2.json");
pub const DUAL_X_DUAL: &str = include_str!("../../../corpus/dual_x_dual.json");
pub const DUAL_X_DUAL_OVER_QXQ: &str = include_str!("../../../corpus/dual_x_dual_over_qxq.json");

fn load(text: &str) -> GradedAlgebra {
    GradedAlgebra::from_json(text, None).expect("shipped corpus algebra is valid")
}

pub fn rational_field() -> GradedAlgebra {
    load(RATIONAL_FIELD)
}

pub fn dual_numbers() -> GradedAlgebra {
    load(DUAL_NUMBERS)
}

pub fn q_times_q() -> GradedAlgebra {
    load(Q_TIMES_Q)
}

pub fn q_cubed() -> GradedAlgebra {
    load(Q_CUBED)
}

/// The field with four elements as an algebra over F2.
pub fn f4() -> GradedAlgebra {
    load(F4)
}

/// Exterior algebra on one generator of degree 1.
pub fn exterior() -> GradedAlgebra {
    load(EXTERIOR)
}

pub fn matrices_2x2() -> GradedAlgebra {
    load(MATRICES_2X2)
}

/// `Q[x]/x² × Q[x]/x²`, an algebra over `Q×Q` via [`relative_unit_map`].
pub fn relative_algebra() -> GradedAlgebra {
    load(DUAL_X_DUAL)
}

pub fn relative_unit_map() -> AlgebraMap {
    let spec: AlgebraMapSpec = serde_json::from_str(DUAL_X_DUAL_OVER_QXQ).expect("shipped map parses");
    AlgebraMap::from_spec(q_times_q(), relative_algebra(), &spec).expect("shipped map is valid")
}

/// Every commutative corpus algebra with a short label.
pub fn commutative() -> Vec<(&'static str, GradedAlgebra)> {
    vec![
        ("Q", rational_field()),
        ("dual", dual_numbers()),
        ("QxQ", q_times_q()),
        ("Q3", q_cubed()),
        ("exterior", exterior()),
        ("F4", f4()),
    ]
}

/// Every associative corpus algebra with a short label.
pub fn associative() -> Vec<(&'static str, GradedAlgebra)> {
    let mut v = commutative();
    v.push(("mat2", matrices_2x2()));
    v
}
