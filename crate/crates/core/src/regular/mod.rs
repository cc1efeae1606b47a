//! q-regular sequences over exact rationals: linear representations, minimization,
//! the quasimultiplicativity and quasiadditivity decision procedures, and transducers.

mod closure;
pub mod fixtures;
pub mod io;
pub mod linalg;
mod representation;
mod transducer;

pub use closure::{
    affine_closure, check_quasiadditive, check_quasiadditive_minimized, AffineClosure, QuasiadditiveReport, Side,
};
pub use representation::LinearRepresentation;
pub use transducer::{Transducer, TransducerReport};
