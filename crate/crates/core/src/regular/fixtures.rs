//! The representations shipped in `fixtures/`.

use super::io::{representation_from_json, transducer_from_json};
use super::{LinearRepresentation, Transducer};

pub const NAF_WEIGHT: &str = include_str!("../../../../fixtures/naf_weight.json");
pub const OPTIMAL_REPS: &str = include_str!("../../../../fixtures/opt_reps.json");
pub const POW_DIGIT_SUM: &str = include_str!("../../../../fixtures/pow_digit_sum.json");
pub const POW_DIGIT_SUM_NONMINIMAL: &str = include_str!("../../../../fixtures/pow_digit_sum_nonminimal.json");
pub const NAF_WEIGHT_TRANSDUCER: &str = include_str!("../../../../fixtures/naf_weight_transducer.json");

/// 4-dimensional representation of `(hn(n), hn(n+1), hn(2n+1), 1)`.
pub fn naf_weight() -> LinearRepresentation {
    representation_from_json(NAF_WEIGHT).expect("shipped fixture parses")
}

/// 6-dimensional representation whose first coordinate counts optimal representations.
pub fn optimal_reps() -> LinearRepresentation {
    representation_from_json(OPTIMAL_REPS).expect("shipped fixture parses")
}

/// `2^{s_2(n)}` with `M_0 = 1, M_1 = 2`.
pub fn pow_digit_sum() -> LinearRepresentation {
    representation_from_json(POW_DIGIT_SUM).expect("shipped fixture parses")
}

/// A zero-insensitive but non-minimal representation of `2^{s_2(n)}`.
pub fn pow_digit_sum_nonminimal() -> LinearRepresentation {
    representation_from_json(POW_DIGIT_SUM_NONMINIMAL).expect("shipped fixture parses")
}

pub fn naf_weight_transducer() -> Transducer {
    transducer_from_json(NAF_WEIGHT_TRANSDUCER).expect("shipped fixture parses")
}
