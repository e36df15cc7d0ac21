//! Dense complex linear algebra helpers shared by every module.
//!
//! Everything here works on `DMatrix<Complex64>`. Hermitian eigen-solves and
//! SVDs delegate to nalgebra; the eigenvalue reordering of the complex Schur
//! form is done here with Givens swaps.

use nalgebra::{Cholesky, DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Singular values in descending order. Empty matrices have none.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Spectral (operator 2-) norm.
pub fn op_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a matrix with at least as many rows as columns.
pub fn min_singular(m: &CMat) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// 2-norm condition number; infinite for singular input. Empty matrices are
/// perfectly conditioned.
pub fn cond(m: &CMat) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn eigh(h: &CMat) -> HermitianEigen {
    let n = h.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: CMat::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

pub fn min_eigenvalue_hermitian(h: &CMat) -> f64 {
    eigh(h).values.first().copied().unwrap_or(f64::INFINITY)
}

/// `h^p` for Hermitian positive semidefinite `h`; eigenvalues are floored at
/// `floor` before the power is taken.
pub fn hermitian_power(h: &CMat, p: f64, floor: f64) -> CMat {
    let n = h.nrows();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let HermitianEigen { values, vectors } = eigh(h);
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let s = lambda.max(floor).powf(p);
        scaled.column_mut(j).scale_mut(s);
    }
    &scaled * vectors.adjoint()
}

/// Counts of positive, negative and null eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct Inertia {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_null: usize,
}

impl Inertia {
    pub fn of_values(values: &[f64], threshold: f64) -> Self {
        let mut out = Inertia::default();
        for &v in values {
            if v > threshold {
                out.n_pos += 1;
            } else if v < -threshold {
                out.n_neg += 1;
            } else {
                out.n_null += 1;
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n_pos + self.n_neg + self.n_null
    }
}

pub fn inertia(h: &CMat, threshold: f64) -> Inertia {
    Inertia::of_values(&eigh(h).values, threshold)
}

/// Complex Schur form `A = Q T Q*` whose leading `selected` diagonal entries
/// of `T` are exactly the eigenvalues picked by the selector.
#[derive(Debug, Clone)]
pub struct OrderedSchur {
    pub q: CMat,
    pub t: CMat,
    pub selected: usize,
}

impl OrderedSchur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Orthonormal basis of the invariant subspace of the selected eigenvalues.
    pub fn leading_basis(&self) -> CMat {
        self.q.columns(0, self.selected).into_owned()
    }
}

pub fn schur(a: &CMat) -> Result<(CMat, CMat)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((CMat::zeros(0, 0), CMat::zeros(0, 0)));
    }
    let s = Schur::try_new(a.clone(), f64::EPSILON, 100 * n.max(10))
        .ok_or(Error::NoConvergence("complex Schur iteration"))?;
    let (q, mut t) = s.unpack();
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((q, t))
}

/// Reorders an upper-triangular Schur pair so that the selected eigenvalues
/// lead the diagonal.
pub fn reorder_schur(mut q: CMat, mut t: CMat, select: impl Fn(Complex64) -> bool) -> OrderedSchur {
    let n = t.nrows();
    let mut ks = 0;
    for j in 0..n {
        if select(t[(j, j)]) {
            for i in (ks..j).rev() {
                swap_adjacent(&mut q, &mut t, i);
            }
            ks += 1;
        }
    }
    OrderedSchur { q, t, selected: ks }
}

pub fn ordered_schur(a: &CMat, select: impl Fn(Complex64) -> bool) -> Result<OrderedSchur> {
    let (q, t) = schur(a)?;
    Ok(reorder_schur(q, t, select))
}

// Swaps the diagonal entries at positions i and i+1 with a unitary rotation
// whose first column is the eigenvector of the 2x2 block for t[i+1,i+1].
fn swap_adjacent(q: &mut CMat, t: &mut CMat, i: usize) {
    let n = t.nrows();
    let a = t[(i, i)];
    let b = t[(i + 1, i + 1)];
    let x = t[(i, i + 1)];
    let y = b - a;
    let r = x.norm().hypot(y.norm());
    if r == 0.0 {
        return;
    }
    let cs = x / r;
    let sn = y / r;
    for col in i..n {
        let u = t[(i, col)];
        let v = t[(i + 1, col)];
        t[(i, col)] = cs.conj() * u + sn.conj() * v;
        t[(i + 1, col)] = -sn * u + cs * v;
    }
    for row in 0..=(i + 1) {
        let u = t[(row, i)];
        let v = t[(row, i + 1)];
        t[(row, i)] = u * cs + v * sn;
        t[(row, i + 1)] = -u * sn.conj() + v * cs.conj();
    }
    for row in 0..n {
        let u = q[(row, i)];
        let v = q[(row, i + 1)];
        q[(row, i)] = u * cs + v * sn;
        q[(row, i + 1)] = -u * sn.conj() + v * cs.conj();
    }
    t[(i, i)] = b;
    t[(i + 1, i + 1)] = a;
    t[(i + 1, i)] = Complex64::new(0.0, 0.0);
}

/// Solves `a x = b` after checking that `cond(a) <= max_cond`.
pub fn solve_guarded(a: &CMat, b: &CMat, max_cond: f64) -> std::result::Result<CMat, f64> {
    if a.nrows() == 0 {
        return Ok(CMat::zeros(0, b.ncols()));
    }
    let k = cond(a);
    if !(k <= max_cond) {
        return Err(k);
    }
    a.clone().lu().solve(b).ok_or(f64::INFINITY)
}

/// Inverse of a square matrix after a condition check.
pub fn inverse_guarded(a: &CMat, max_cond: f64) -> std::result::Result<CMat, f64> {
    solve_guarded(a, &identity(a.nrows()), max_cond)
}

/// Orthonormal basis for the column span of `z`, dropping directions with
/// singular value below `rel_tol * sigma_max`.
pub fn orthonormal_basis(z: &CMat, rel_tol: f64) -> CMat {
    if z.ncols() == 0 || z.nrows() == 0 {
        return CMat::zeros(z.nrows(), 0);
    }
    let svd = z.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * smax && smax > 0.0)
        .collect();
    CMat::from_fn(z.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis of the null space of `m` (columns `x` with `m x = 0`),
/// keeping right singular vectors with singular value at most
/// `rel_tol * sigma_max`.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    // zero rows make the matrix at least square so that V is complete
    let rows = m.nrows().max(n);
    let mut padded = CMat::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..n)
        .filter(|&i| svd.singular_values[i] <= rel_tol * smax)
        .collect();
    CMat::from_fn(n, keep.len(), |r, c| v_t[(keep[c], r)].conj())
}

/// Sine of the largest principal angle between two column spans of equal
/// dimension.
pub fn subspace_gap(z1: &CMat, z2: &CMat) -> f64 {
    let q1 = orthonormal_basis(z1, 1e-12);
    let q2 = orthonormal_basis(z2, 1e-12);
    if q1.ncols() != q2.ncols() {
        return 1.0;
    }
    if q1.ncols() == 0 {
        return 0.0;
    }
    let proj = &q1 * (q1.adjoint() * &q2);
    op_norm(&(&q2 - proj))
}

/// `‖(I - P) A Z‖` where `P` projects orthogonally onto span(Z); zero iff the
/// span is `A`-invariant.
pub fn invariance_defect(a: &CMat, z: &CMat) -> f64 {
    if z.ncols() == 0 {
        return 0.0;
    }
    let q = orthonormal_basis(z, 1e-14);
    let az = a * &q;
    let proj = &q * (q.adjoint() * &az);
    op_norm(&(az - proj))
}

pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (m1, n1) = a.shape();
    let (m2, n2) = b.shape();
    let mut out = CMat::zeros(m1 + m2, n1 + n2);
    out.view_mut((0, 0), (m1, n1)).copy_from(a);
    out.view_mut((m1, n1), (m2, n2)).copy_from(b);
    out
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky_lower(b: &CMat) -> Result<CMat> {
    if b.nrows() == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    Cholesky::new(hermitian_part(b))
        .map(|c| c.l())
        .ok_or(Error::NotPositiveDefinite)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
