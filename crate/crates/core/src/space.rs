//! Finite-dimensional indefinite-metric spaces.
//!
//! Coordinates are ordered with the `n_minus` negative directions first and
//! the `n_plus` positive directions last, so the fundamental symmetry is
//! `J = diag(-1, ..., -1, +1, ..., +1)`. Block index 1 always refers to `H-`
//! and index 2 to `H+`.
//!
//! The form is `[x, y] = (Jx, y) = y* J x`: linear in the first argument and
//! conjugate-linear in the second. With that convention the J-adjoint
//! (`[Ax, y] = [x, A♯y]`) is `A♯ = J A* J`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, CVec, Inertia};

/// Default threshold for the operator-class predicates.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Condition-number guard for every inversion that can fail.
pub const DEFAULT_MAX_COND: f64 = 1e12;
/// Points with `‖W‖ >= 1 - STRICT_MARGIN` are not accepted as open-ball points.
pub const STRICT_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpace")]
pub struct IndefiniteSpace {
    n_minus: usize,
    n_plus: usize,
}

#[derive(Deserialize)]
struct RawSpace {
    n_minus: usize,
    n_plus: usize,
}

impl TryFrom<RawSpace> for IndefiniteSpace {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        IndefiniteSpace::new(raw.n_minus, raw.n_plus)
    }
}

impl IndefiniteSpace {
    pub fn new(n_minus: usize, n_plus: usize) -> Result<Self> {
        if n_minus + n_plus == 0 {
            return Err(Error::InvalidDimensions(
                "an indefinite space needs at least one dimension".into(),
            ));
        }
        Ok(IndefiniteSpace { n_minus, n_plus })
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn dim(&self) -> usize {
        self.n_minus + self.n_plus
    }

    /// Sign of the i-th diagonal entry of J.
    pub fn sign(&self, i: usize) -> f64 {
        if i < self.n_minus {
            -1.0
        } else {
            1.0
        }
    }

    pub fn j(&self) -> CMat {
        let n = self.dim();
        CMat::from_fn(n, n, |r, c| {
            if r == c {
                c64(self.sign(r), 0.0)
            } else {
                c64(0.0, 0.0)
            }
        })
    }

    /// Left multiplication by J (row sign flip) without forming J.
    pub fn apply_j_left(&self, m: &CMat) -> CMat {
        let mut out = m.clone();
        for r in 0..self.n_minus {
            out.row_mut(r).neg_mut();
        }
        out
    }

    /// Right multiplication by J (column sign flip).
    pub fn apply_j_right(&self, m: &CMat) -> CMat {
        let mut out = m.clone();
        for c in 0..self.n_minus {
            out.column_mut(c).neg_mut();
        }
        out
    }

    /// `[x, y] = (Jx, y)`.
    pub fn product(&self, x: &CVec, y: &CVec) -> Result<Complex64> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("vectors of length {n}"),
                found: format!("lengths {} and {}", x.len(), y.len()),
            });
        }
        Ok((0..n).map(|i| x[i] * y[i].conj() * self.sign(i)).sum())
    }

    /// Gram matrix `Z* J Z` of the columns of `z`.
    pub fn gram(&self, z: &CMat) -> CMat {
        z.adjoint() * self.apply_j_left(z)
    }

    fn check_square(&self, m: &CMat) -> Result<()> {
        let n = self.dim();
        if m.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        Ok(())
    }
}

/// A square operator on an [`IndefiniteSpace`] with (H-, H+) block access.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOperator {
    pub space: IndefiniteSpace,
    #[serde(with = "crate::json::cmat")]
    pub matrix: CMat,
}

/// Result of [`BlockOperator::classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorClass {
    pub j_selfadjoint: bool,
    pub j_dissipative: bool,
    pub strongly_j_dissipative: bool,
    pub j_unitary: bool,
    pub j_expanding: bool,
}

impl BlockOperator {
    pub fn new(space: IndefiniteSpace, matrix: CMat) -> Result<Self> {
        space.check_square(&matrix)?;
        Ok(BlockOperator { space, matrix })
    }

    pub fn identity(space: IndefiniteSpace) -> Self {
        BlockOperator {
            space,
            matrix: linalg::identity(space.dim()),
        }
    }

    pub fn j(space: IndefiniteSpace) -> Self {
        BlockOperator {
            space,
            matrix: space.j(),
        }
    }

    pub fn from_blocks(
        space: IndefiniteSpace,
        a11: &CMat,
        a12: &CMat,
        a21: &CMat,
        a22: &CMat,
    ) -> Result<Self> {
        let (k, m) = (space.n_minus, space.n_plus);
        let shapes = [a11.shape(), a12.shape(), a21.shape(), a22.shape()];
        if shapes != [(k, k), (k, m), (m, k), (m, m)] {
            return Err(Error::DimensionMismatch {
                expected: format!("blocks {k}x{k}, {k}x{m}, {m}x{k}, {m}x{m}"),
                found: format!("{shapes:?}"),
            });
        }
        let mut matrix = CMat::zeros(k + m, k + m);
        matrix.view_mut((0, 0), (k, k)).copy_from(a11);
        matrix.view_mut((0, k), (k, m)).copy_from(a12);
        matrix.view_mut((k, 0), (m, k)).copy_from(a21);
        matrix.view_mut((k, k), (m, m)).copy_from(a22);
        Ok(BlockOperator { space, matrix })
    }

    /// `P- A P-`.
    pub fn a11(&self) -> CMat {
        let k = self.space.n_minus;
        self.matrix.view((0, 0), (k, k)).into_owned()
    }

    /// `P- A P+`.
    pub fn a12(&self) -> CMat {
        let (k, m) = (self.space.n_minus, self.space.n_plus);
        self.matrix.view((0, k), (k, m)).into_owned()
    }

    /// `P+ A P-`.
    pub fn a21(&self) -> CMat {
        let (k, m) = (self.space.n_minus, self.space.n_plus);
        self.matrix.view((k, 0), (m, k)).into_owned()
    }

    /// `P+ A P+`.
    pub fn a22(&self) -> CMat {
        let (k, m) = (self.space.n_minus, self.space.n_plus);
        self.matrix.view((k, k), (m, m)).into_owned()
    }

    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }

    /// `A♯ = J A* J`.
    pub fn j_adjoint(&self) -> BlockOperator {
        let adj = self.matrix.adjoint();
        BlockOperator {
            space: self.space,
            matrix: self.space.apply_j_right(&self.space.apply_j_left(&adj)),
        }
    }

    /// The Hermitian matrix `(JA - A*J) / 2i`, whose quadratic form is
    /// `Im [Ax, x]`.
    pub fn dissipativity_form(&self) -> CMat {
        let ja = self.space.apply_j_left(&self.matrix);
        let diff = &ja - ja.adjoint();
        linalg::hermitian_part(&(diff * c64(0.0, -0.5)))
    }

    /// Smallest eigenvalue of the dissipativity form.
    pub fn dissipativity_margin(&self) -> f64 {
        linalg::min_eigenvalue_hermitian(&self.dissipativity_form())
    }

    /// `A* J A - J`; zero for J-unitary, positive semidefinite for J-expanding.
    pub fn expansion_form(&self) -> CMat {
        let jaa = self.matrix.adjoint() * self.space.apply_j_left(&self.matrix);
        linalg::hermitian_part(&(jaa - self.space.j()))
    }

    pub fn classify(&self, tol: f64) -> OperatorClass {
        let margin = self.dissipativity_margin();
        let expansion = self.expansion_form();
        let sa_defect = linalg::op_norm(&(&self.matrix - self.j_adjoint().matrix));
        OperatorClass {
            j_selfadjoint: sa_defect <= tol,
            j_dissipative: margin >= -tol,
            strongly_j_dissipative: margin > tol,
            j_unitary: linalg::op_norm(&expansion) <= tol,
            j_expanding: linalg::min_eigenvalue_hermitian(&expansion) >= -tol,
        }
    }

    /// `‖A* J A - J‖`.
    pub fn j_unitarity_defect(&self) -> f64 {
        linalg::op_norm(&self.expansion_form())
    }
}

/// An `n+ x n-` operator `W: H- -> H+`; the angular operator of the graph
/// subspace `L_W = {x + Wx}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    pub space: IndefiniteSpace,
    #[serde(with = "crate::json::cmat")]
    pub matrix: CMat,
}

impl BallPoint {
    /// Shape-checked constructor with no norm requirement.
    pub fn new(space: IndefiniteSpace, matrix: CMat) -> Result<Self> {
        if matrix.shape() != (space.n_plus, space.n_minus) {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", space.n_plus, space.n_minus),
                found: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(BallPoint { space, matrix })
    }

    /// Infers the signature from the shape: rows = n+, cols = n-.
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        let space = IndefiniteSpace::new(matrix.ncols(), matrix.nrows())?;
        BallPoint::new(space, matrix)
    }

    /// A point of the closed unit ball (`‖W‖ <= 1 + tol`).
    pub fn closed(space: IndefiniteSpace, matrix: CMat, tol: f64) -> Result<Self> {
        let p = BallPoint::new(space, matrix)?;
        let norm = p.norm();
        if norm > 1.0 + tol {
            return Err(Error::OutsideBall { norm });
        }
        Ok(p)
    }

    /// A point of the open unit ball.
    pub fn strict(space: IndefiniteSpace, matrix: CMat) -> Result<Self> {
        let p = BallPoint::new(space, matrix)?;
        p.ensure_strict()?;
        Ok(p)
    }

    pub fn zero(space: IndefiniteSpace) -> Self {
        BallPoint {
            space,
            matrix: CMat::zeros(space.n_plus, space.n_minus),
        }
    }

    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }

    pub fn is_strict(&self) -> bool {
        self.norm() < 1.0 - STRICT_MARGIN
    }

    pub fn ensure_strict(&self) -> Result<()> {
        let norm = self.norm();
        if !(norm < 1.0 - STRICT_MARGIN) {
            return Err(Error::OutsideBall { norm });
        }
        Ok(())
    }

    pub fn neg(&self) -> BallPoint {
        BallPoint {
            space: self.space,
            matrix: -&self.matrix,
        }
    }

    /// Basis `[I; W]` of the graph subspace `L_W`.
    pub fn graph(&self) -> Subspace {
        let (k, m) = (self.space.n_minus, self.space.n_plus);
        let mut z = CMat::zeros(k + m, k);
        z.view_mut((0, 0), (k, k)).fill_with_identity();
        z.view_mut((k, 0), (m, k)).copy_from(&self.matrix);
        Subspace {
            space: self.space,
            basis: z,
        }
    }
}

/// A subspace given by a full-column-rank basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    pub space: IndefiniteSpace,
    #[serde(with = "crate::json::cmat")]
    pub basis: CMat,
}

impl Subspace {
    pub fn new(space: IndefiniteSpace, basis: CMat) -> Result<Self> {
        if basis.nrows() != space.dim() || basis.ncols() > space.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows and at most {} columns", space.dim(), space.dim()),
                found: format!("{}x{}", basis.nrows(), basis.ncols()),
            });
        }
        if basis.ncols() > 0 {
            let sigma_min = linalg::min_singular(&basis);
            if !(sigma_min > DEFAULT_TOL * linalg::op_norm(&basis)) {
                return Err(Error::RankDeficient { sigma_min });
            }
        }
        Ok(Subspace { space, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Inertia of `Z* J Z`; eigenvalues within `tol * ‖Z‖²` of zero count as
    /// null, which makes the threshold independent of the basis scaling.
    pub fn signature(&self, tol: f64) -> Inertia {
        if self.dim() == 0 {
            return Inertia::default();
        }
        let scale = linalg::op_norm(&self.basis).powi(2);
        linalg::inertia(&self.space.gram(&self.basis), tol * scale)
    }

    /// Recovers `W` with `span(Z) = L_W`; fails when the H- part of the basis
    /// has condition number above `max_cond`.
    pub fn to_ball_point(&self, max_cond: f64) -> Result<BallPoint> {
        let (k, m) = (self.space.n_minus, self.space.n_plus);
        if self.dim() != k {
            return Err(Error::InvalidDimensions(format!(
                "graph subspaces have dimension n- = {k}, got {}",
                self.dim()
            )));
        }
        let z_minus = self.basis.view((0, 0), (k, k)).into_owned();
        let z_plus = self.basis.view((k, 0), (m, k)).into_owned();
        // W Z- = Z+  <=>  Z-* W* = Z+*
        let w_adj = linalg::solve_guarded(&z_minus.adjoint(), &z_plus.adjoint(), max_cond)
            .map_err(|cond| Error::NotAGraph { cond })?;
        BallPoint::new(self.space, w_adj.adjoint())
    }
}

impl Inertia {
    pub fn is_negative(&self) -> bool {
        self.n_pos == 0 && self.n_null == 0
    }

    pub fn is_positive(&self) -> bool {
        self.n_neg == 0 && self.n_null == 0
    }

    pub fn is_nonpositive(&self) -> bool {
        self.n_pos == 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.n_neg == 0
    }

    pub fn is_neutral(&self) -> bool {
        self.n_pos == 0 && self.n_neg == 0
    }
}

/// `‖W A11 + W A12 W - A21 - A22 W‖`; zero exactly when `L_W` is
/// `A`-invariant.
pub fn invariance_residual(a: &BlockOperator, w: &BallPoint) -> Result<f64> {
    if a.space != w.space {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", a.space),
            found: format!("{:?}", w.space),
        });
    }
    let wm = &w.matrix;
    let r = wm * a.a11() + wm * a.a12() * wm - a.a21() - a.a22() * wm;
    Ok(linalg::op_norm(&r))
}
