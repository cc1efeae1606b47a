use std::collections::VecDeque;

use num_traits::Zero;
use serde::Serialize;

use super::linalg::{dot, sub_vec, Matrix, Rational, Span, Vector};
use super::LinearRepresentation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// The smallest space `U` (left) or `V` (right) such that every `u^t M_w` lies in `u^t + U^t`,
/// respectively every `M_w v` lies in `v + V`.
#[derive(Debug, Clone)]
pub struct AffineClosure {
    side: Side,
    base: Vector,
    span: Span,
}

impl AffineClosure {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn base_point(&self) -> &[Rational] {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    /// Generators in discovery order; linearly independent.
    pub fn basis(&self) -> &[Vector] {
        self.span.basis()
    }

    pub fn contains_direction(&self, x: &[Rational]) -> bool {
        self.span.contains(x)
    }

    pub fn contains_point(&self, p: &[Rational]) -> bool {
        self.span.contains(&sub_vec(p, &self.base))
    }
}

pub fn affine_closure(rep: &LinearRepresentation, side: Side) -> AffineClosure {
    let base: Vector = match side {
        Side::Left => rep.u().to_vec(),
        Side::Right => rep.v().to_vec(),
    };
    let apply = |m: &Matrix, x: &[Rational]| match side {
        Side::Left => m.vec_mul(x),
        Side::Right => m.mul_vec(x),
    };
    let mut span = Span::new(rep.dim());
    // affine points whose images still have to be explored
    let mut queue = VecDeque::from([base.clone()]);
    while let Some(p) = queue.pop_front() {
        for m in rep.matrices() {
            let image = apply(m, &p);
            if span.insert(&sub_vec(&image, &base)) {
                queue.push_back(image);
            }
        }
    }
    AffineClosure { side, base, span }
}

/// Outcome of the four quasiadditivity conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiadditiveReport {
    pub r: u32,
    pub uv_zero: bool,
    pub left_orthogonal: bool,
    pub right_orthogonal: bool,
    pub cross_zero: bool,
    pub dim_u: usize,
    pub dim_v: usize,
}

impl QuasiadditiveReport {
    pub fn holds(&self) -> bool {
        self.uv_zero && self.left_orthogonal && self.right_orthogonal && self.cross_zero
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.uv_zero {
            out.push("u^t v = 0");
        }
        if !self.left_orthogonal {
            out.push("U^t (M_0^r - I) v = 0");
        }
        if !self.right_orthogonal {
            out.push("u^t (M_0^r - I) V = 0");
        }
        if !self.cross_zero {
            out.push("U^t M_0^r V = 0");
        }
        out
    }
}

/// Decides q-quasiadditivity with parameter `r` for a zero-insensitive representation.
pub fn check_quasiadditive(rep: &LinearRepresentation, r: u32) -> Result<QuasiadditiveReport> {
    if !rep.is_zero_insensitive() {
        return Err(Error::NotZeroInsensitive);
    }
    let left = affine_closure(rep, Side::Left);
    let right = affine_closure(rep, Side::Right);
    let power = rep.matrix(0).pow(r);
    let shifted = &power - &Matrix::identity(rep.dim());
    let shifted_v = shifted.mul_vec(rep.v());
    let u_shifted = shifted.vec_mul(rep.u());
    let uv_zero = dot(rep.u(), rep.v()).is_zero();
    let left_orthogonal = left.basis().iter().all(|x| dot(x, &shifted_v).is_zero());
    let right_orthogonal = right.basis().iter().all(|y| dot(&u_shifted, y).is_zero());
    let cross_zero = left.basis().iter().all(|x| {
        let row = power.vec_mul(x);
        right.basis().iter().all(|y| dot(&row, y).is_zero())
    });
    Ok(QuasiadditiveReport {
        r,
        uv_zero,
        left_orthogonal,
        right_orthogonal,
        cross_zero,
        dim_u: left.dim(),
        dim_v: right.dim(),
    })
}

/// Same conditions evaluated on the minimized representation.
pub fn check_quasiadditive_minimized(rep: &LinearRepresentation, r: u32) -> Result<QuasiadditiveReport> {
    check_quasiadditive(&rep.canonical()?, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regular::fixtures;
    use crate::regular::linalg::rat;

    fn stable(rep: &LinearRepresentation, c: &AffineClosure) -> bool {
        let mut points = vec![c.base_point().to_vec()];
        for b in c.basis() {
            points.push(c.base_point().iter().zip(b).map(|(x, y)| x + y).collect());
        }
        points.iter().all(|p| {
            rep.matrices().iter().all(|m| {
                let image = match c.side() {
                    Side::Left => m.vec_mul(p),
                    Side::Right => m.mul_vec(p),
                };
                c.contains_point(&image)
            })
        })
    }

    #[test]
    fn naf_weight_closures() {
        let hn = fixtures::naf_weight();
        let (m0, m1) = (hn.matrix(0), hn.matrix(1));
        let left = affine_closure(&hn, Side::Left);
        assert_eq!(left.dim(), 3);
        let u = hn.u();
        let m1m0m1 = &(m1 * m0) * m1;
        for w in [m1.clone(), m1.pow(2), m1m0m1.clone()] {
            assert!(left.contains_direction(&sub_vec(&w.vec_mul(u), u)));
        }
        let right = affine_closure(&hn, Side::Right);
        assert_eq!(right.dim(), 3);
        let v = hn.v();
        for w in [m1.clone(), m1.pow(2), m1m0m1] {
            assert!(right.contains_direction(&sub_vec(&w.mul_vec(v), v)));
        }
        assert!(stable(&hn, &left) && stable(&hn, &right));
        let rho = fixtures::optimal_reps();
        assert!(stable(&rho, &affine_closure(&rho, Side::Left)));
        assert!(stable(&rho, &affine_closure(&rho, Side::Right)));
    }

    #[test]
    fn constant_representation_has_trivial_closure() {
        let one = LinearRepresentation::constant(2, rat(1)).unwrap();
        assert_eq!(affine_closure(&one, Side::Left).dim(), 0);
        assert_eq!(affine_closure(&one, Side::Right).dim(), 0);
    }

    #[test]
    fn naf_weight_conditions() {
        let hn = fixtures::naf_weight();
        let report = check_quasiadditive(&hn, 2).unwrap();
        assert!(report.holds(), "{report:?}");
        assert_eq!((report.dim_u, report.dim_v), (3, 3));
        assert!(!check_quasiadditive(&hn, 0).unwrap().holds());
        assert!(!check_quasiadditive(&hn, 1).unwrap().holds());
        assert!(check_quasiadditive(&hn, 3).unwrap().holds());
        assert!(check_quasiadditive_minimized(&hn, 2).unwrap().holds());
    }

    #[test]
    fn zero_sequence_is_additive() {
        let zero = LinearRepresentation::zero(2, 2).unwrap();
        assert!(check_quasiadditive(&zero, 0).unwrap().holds());
        let bad = LinearRepresentation::new(
            2,
            vec![rat(1)],
            vec![Matrix::from_i64(&[&[2]]), Matrix::from_i64(&[&[1]])],
            vec![rat(1)],
        )
        .unwrap();
        assert_eq!(check_quasiadditive(&bad, 1), Err(Error::NotZeroInsensitive));
    }
}
