//! Geometry of the operator ball `{W: H- -> H+, ‖W‖ < 1}`.
//!
//! J-unitary operators act on the ball by `φ_U(W) = (U21 + U22 W)(U11 + U12 W)⁻¹`,
//! which is the action of `U` on graph subspaces `L_W`. The Möbius map `μ_A`
//! is the action of the J-unitary `M_A` and moves `0` to `A`; the hyperbolic
//! distance `ρ(A, B) = atanh ‖μ_{-A}(B)‖` is invariant under every `φ_U`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::space::{BallPoint, BlockOperator, DEFAULT_MAX_COND};

const SQRT_FLOOR: f64 = 1e-14;

fn same_space(a: &BallPoint, b: &BallPoint) -> Result<()> {
    if a.space != b.space {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", a.space),
            found: format!("{:?}", b.space),
        });
    }
    Ok(())
}

/// `(I - A A*)^{-1/2}` on H+ and `(I - A* A)^{-1/2}` on H-.
fn defect_inverse_roots(a: &CMat) -> (CMat, CMat) {
    let (m, k) = a.shape();
    let plus = linalg::identity(m) - a * a.adjoint();
    let minus = linalg::identity(k) - a.adjoint() * a;
    (
        linalg::hermitian_power(&plus, -0.5, SQRT_FLOOR),
        linalg::hermitian_power(&minus, -0.5, SQRT_FLOOR),
    )
}

/// `μ_A(X) = (I - AA*)^{-1/2} (A + X) (I + A*X)⁻¹ (I - A*A)^{1/2}`.
pub fn mobius_apply(a: &BallPoint, x: &BallPoint) -> Result<BallPoint> {
    same_space(a, x)?;
    a.ensure_strict()?;
    x.ensure_strict()?;
    let am = &a.matrix;
    let k = a.space.n_minus();
    let m = a.space.n_plus();
    let left =
        linalg::hermitian_power(&(linalg::identity(m) - am * am.adjoint()), -0.5, SQRT_FLOOR);
    let right = linalg::hermitian_power(&(linalg::identity(k) - am.adjoint() * am), 0.5, 0.0);
    let denom = linalg::identity(k) + am.adjoint() * &x.matrix;
    let numer = am + &x.matrix;
    // Y denom = numer  <=>  denom* Y* = numer*
    let y_adj = linalg::solve_guarded(&denom.adjoint(), &numer.adjoint(), DEFAULT_MAX_COND)
        .map_err(|cond| Error::SingularDenominator { cond })?;
    BallPoint::new(a.space, left * y_adj.adjoint() * right)
}

/// The J-unitary `M_A` with `φ_{M_A} = μ_A`, in (H-, H+) block order:
///
/// ```text
/// [ (I - A*A)^{-1/2}     A* (I - AA*)^{-1/2} ]
/// [ A (I - A*A)^{-1/2}   (I - AA*)^{-1/2}    ]
/// ```
pub fn mobius_matrix(a: &BallPoint) -> Result<BlockOperator> {
    a.ensure_strict()?;
    let (plus_root, minus_root) = defect_inverse_roots(&a.matrix);
    let am = &a.matrix;
    BlockOperator::from_blocks(
        a.space,
        &minus_root,
        &(am.adjoint() * &plus_root),
        &(am * &minus_root),
        &plus_root,
    )
}

/// `φ_U(W) = (U21 + U22 W)(U11 + U12 W)⁻¹`.
pub fn fractional_linear(u: &BlockOperator, w: &BallPoint, max_cond: f64) -> Result<BallPoint> {
    if u.space != w.space {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", u.space),
            found: format!("{:?}", w.space),
        });
    }
    let denom = u.a11() + u.a12() * &w.matrix;
    let numer = u.a21() + u.a22() * &w.matrix;
    let y_adj = linalg::solve_guarded(&denom.adjoint(), &numer.adjoint(), max_cond)
        .map_err(|cond| Error::SingularDenominator { cond })?;
    BallPoint::new(u.space, y_adj.adjoint())
}

/// `ρ(A, B) = atanh ‖μ_{-A}(B)‖`.
pub fn hyperbolic_distance(a: &BallPoint, b: &BallPoint) -> Result<f64> {
    let moved = mobius_apply(&a.neg(), b)?;
    let r = moved.norm().min(1.0 - f64::EPSILON);
    Ok(r.atanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusNorm {
    pub norm: f64,
    /// `sqrt((1 + r) / (1 - r))`, `r = ‖A‖`.
    pub upper_bound: f64,
    /// `sqrt((1 + r²) / (1 - r²))`.
    pub lower_bound: f64,
}

pub fn mobius_norm(a: &BallPoint) -> Result<MobiusNorm> {
    let m = mobius_matrix(a)?;
    let r = a.norm();
    Ok(MobiusNorm {
        norm: m.norm(),
        upper_bound: ((1.0 + r) / (1.0 - r)).sqrt(),
        lower_bound: ((1.0 + r * r) / (1.0 - r * r)).sqrt(),
    })
}

/// `sqrt((C² - 1) / (C² + 1))`: the largest `‖φ_U(0)‖` possible for a
/// J-unitary `U` with `‖U‖ <= C`.
pub fn radius_from_norm(c: f64) -> Result<f64> {
    // computed norms of unitaries land a few ulps below 1
    if !(c >= 1.0 - 1e-12) {
        return Err(Error::NormBelowOne(c));
    }
    let c2 = c.max(1.0).powi(2);
    Ok(((c2 - 1.0) / (c2 + 1.0)).sqrt())
}
