//! Invariant maximal non-positive subspaces of J-dissipative matrices.
//!
//! For strongly J-dissipative `A` no eigenvalue is real, and the spectral
//! subspace of the lower half-plane is negative of dimension `n-`; it is the
//! graph `L_W` of a strict contraction. A merely dissipative `A` is handled by
//! regularizing to `A + itJ` and shrinking `t` until the graph certifies
//! against the original `A`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, Inertia};
use crate::space::{
    invariance_residual, BallPoint, BlockOperator, IndefiniteSpace, Subspace, DEFAULT_MAX_COND,
    DEFAULT_TOL,
};

/// Solver knobs. `t0 = None` means `1e-2 * max(1, ‖A‖)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MnpsOptions {
    pub t0: Option<f64>,
    pub shrink: f64,
    /// Stop once the invariance residual is at most `tol_res * ‖A‖`.
    pub tol_res: f64,
    pub max_iter: usize,
    /// Dissipativity check: margin must be at least `-dissipative_tol * max(1, ‖A‖)`.
    pub dissipative_tol: f64,
    /// Bound on `‖W‖ - 1` accepted in a certificate.
    pub norm_tol: f64,
    /// Relative distance of the spectrum from the real axis below which a
    /// split is refused.
    pub axis_tol: f64,
    pub max_cond: f64,
}

impl Default for MnpsOptions {
    fn default() -> Self {
        MnpsOptions {
            t0: None,
            shrink: 0.5,
            tol_res: 1e-9,
            max_iter: 40,
            dissipative_tol: DEFAULT_TOL,
            norm_tol: 1e-8,
            axis_tol: 1e-13,
            max_cond: DEFAULT_MAX_COND,
        }
    }
}

impl MnpsOptions {
    /// Multiplies every tolerance by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.tol_res *= factor;
        self.dissipative_tol *= factor;
        self.norm_tol *= factor;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnpsReport {
    pub w: BallPoint,
    /// Invariance residual against the un-regularized operator.
    pub residual: f64,
    pub w_norm: f64,
    pub subspace_inertia: Inertia,
    pub regularization_t: f64,
    pub iterations: usize,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Spectral subspaces of the open lower and upper half-planes.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub minus: Subspace,
    pub plus: Subspace,
    pub min_axis_distance: f64,
}

/// `A + itJ`. The dissipativity form gains exactly `t * I`.
pub fn strongify(a: &BlockOperator, t: f64, tol: f64) -> Result<BlockOperator> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "regularization t must be positive, got {t}"
        )));
    }
    let margin = a.dissipativity_margin();
    if margin < -tol * a.norm().max(1.0) {
        return Err(Error::NotDissipative { margin });
    }
    Ok(regularize(a, t))
}

fn regularize(a: &BlockOperator, t: f64) -> BlockOperator {
    let mut m = a.matrix.clone();
    let space = a.space;
    for i in 0..space.dim() {
        m[(i, i)] += c64(0.0, t * space.sign(i));
    }
    BlockOperator { space, matrix: m }
}

/// Splits the spectrum of `A` across the real axis.
pub fn spectral_split(a: &BlockOperator, axis_tol: f64) -> Result<SpectralSplit> {
    let (q, t) = linalg::schur(&a.matrix)?;
    let n = a.space.dim();
    let min_axis_distance = (0..n)
        .map(|i| t[(i, i)].im.abs())
        .fold(f64::INFINITY, f64::min);
    if n > 0 && !(min_axis_distance > axis_tol) {
        return Err(Error::SpectrumOnAxis {
            distance: min_axis_distance,
        });
    }
    let lower = linalg::reorder_schur(q.clone(), t.clone(), |z| z.im < 0.0);
    let upper = linalg::reorder_schur(q, t, |z| z.im > 0.0);
    Ok(SpectralSplit {
        minus: Subspace {
            space: a.space,
            basis: lower.leading_basis(),
        },
        plus: Subspace {
            space: a.space,
            basis: upper.leading_basis(),
        },
        min_axis_distance,
    })
}

fn inertia_tol(opts: &MnpsOptions) -> f64 {
    2.0 * opts.norm_tol
}

// Solves on `b` (possibly regularized) and certifies against `a`.
fn solve_on(
    a: &BlockOperator,
    b: &BlockOperator,
    t: f64,
    opts: &MnpsOptions,
) -> Result<MnpsReport> {
    let split = spectral_split(b, opts.axis_tol * b.norm().max(1.0))?;
    let k = a.space.n_minus();
    if split.minus.dim() != k {
        return Err(Error::SplitDimension {
            expected: k,
            found: split.minus.dim(),
        });
    }
    let w = split.minus.to_ball_point(opts.max_cond)?;
    Ok(certify(a, w, t, opts))
}

fn certify(a: &BlockOperator, w: BallPoint, t: f64, opts: &MnpsOptions) -> MnpsReport {
    let residual = invariance_residual(a, &w).expect("shapes checked");
    let w_norm = w.norm();
    let subspace_inertia = w.graph().signature(inertia_tol(opts));
    let certified = residual <= opts.tol_res * a.norm()
        && w_norm <= 1.0 + opts.norm_tol
        && subspace_inertia.n_pos == 0;
    MnpsReport {
        w,
        residual,
        w_norm,
        subspace_inertia,
        regularization_t: t,
        iterations: 0,
        certified,
        message: None,
    }
}

/// Invariant MNPS of a strongly J-dissipative operator, read off its lower
/// half-plane spectral subspace.
pub fn mnps_strong(a: &BlockOperator, opts: &MnpsOptions) -> Result<MnpsReport> {
    let margin = a.dissipativity_margin();
    if !(margin > opts.dissipative_tol * a.norm().max(1.0)) {
        return Err(Error::NotDissipative { margin });
    }
    solve_on(a, a, 0.0, opts)
}

/// Invariant MNPS of a J-dissipative operator.
///
/// The unregularized split is tried first; if it does not certify, the solver
/// walks `t = t0 * shrink^j` and keeps the first graph whose residual against
/// `A` is below `tol_res * ‖A‖`. When the budget runs out the best report is
/// returned with `certified = false`.
pub fn mnps(a: &BlockOperator, opts: &MnpsOptions) -> Result<MnpsReport> {
    let norm = a.norm();
    let margin = a.dissipativity_margin();
    if margin < -opts.dissipative_tol * norm.max(1.0) {
        return Err(Error::NotDissipative { margin });
    }

    let mut best: Option<MnpsReport> = None;
    let mut last_err = None;
    let keep = |r: MnpsReport, best: &mut Option<MnpsReport>| {
        if best.as_ref().is_none_or(|b| r.residual < b.residual) {
            *best = Some(r);
        }
    };

    match solve_on(a, a, 0.0, opts) {
        Ok(r) if r.certified => return Ok(r),
        Ok(r) => keep(r, &mut best),
        Err(e) => last_err = Some(e),
    }

    let t0 = opts.t0.unwrap_or(1e-2 * norm.max(1.0));
    let mut t = t0;
    for j in 0..opts.max_iter {
        let b = regularize(a, t);
        match solve_on(a, &b, t, opts) {
            Ok(mut r) => {
                r.iterations = j + 1;
                if r.certified {
                    return Ok(r);
                }
                keep(r, &mut best);
            }
            Err(e @ Error::SpectrumOnAxis { .. }) => {
                // smaller t only moves the spectrum closer to the axis
                last_err = Some(e);
                break;
            }
            Err(e) => last_err = Some(e),
        }
        t *= opts.shrink;
    }

    match best {
        Some(mut r) => {
            r.message = Some(format!(
                "failed to certify; spectrum may be degenerate near real axis (best residual {:e})",
                r.residual
            ));
            Ok(r)
        }
        None => Err(last_err.unwrap_or(Error::NoConvergence("MNPS regularization"))),
    }
}

/// Certificate for a candidate `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MnpsVerification {
    pub maximal_nonpositive: bool,
    pub invariant: bool,
    pub residual: f64,
    pub inertia: Inertia,
}

pub fn verify_mnps(a: &BlockOperator, w: &BallPoint, tol: f64) -> Result<MnpsVerification> {
    let residual = invariance_residual(a, w)?;
    let inertia = w.graph().signature(2.0 * tol);
    Ok(MnpsVerification {
        maximal_nonpositive: w.norm() <= 1.0 + tol,
        invariant: residual <= tol * a.norm().max(1.0),
        residual,
        inertia,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderLevel {
    pub k_minus: usize,
    pub k_plus: usize,
    /// `W_k` zero-padded to `n+ x n-`.
    #[serde(with = "crate::json::cmat")]
    pub w: CMat,
    /// Residual against the truncated operator of this level.
    pub residual: f64,
    pub certified: bool,
    pub delta_to_previous: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub levels: Vec<LadderLevel>,
    pub final_w: BallPoint,
    pub all_certified: bool,
}

/// Compression `P A P` onto the first `k_minus` negative and first `k_plus`
/// positive coordinates.
pub fn compress(a: &BlockOperator, k_minus: usize, k_plus: usize) -> Result<BlockOperator> {
    let (n_minus, n_plus) = (a.space.n_minus(), a.space.n_plus());
    if k_minus > n_minus || k_plus > n_plus {
        return Err(Error::InvalidArgument(format!(
            "level ({k_minus}, {k_plus}) exceeds signature ({n_minus}, {n_plus})"
        )));
    }
    let idx: Vec<usize> = (0..k_minus).chain(n_minus..n_minus + k_plus).collect();
    let m = CMat::from_fn(idx.len(), idx.len(), |r, c| a.matrix[(idx[r], idx[c])]);
    BlockOperator::new(IndefiniteSpace::new(k_minus, k_plus)?, m)
}

/// Solves the MNPS problem on a sequence of growing compressions and reports
/// how far consecutive graphs move.
pub fn approximation_ladder(
    a: &BlockOperator,
    levels: &[(usize, usize)],
    opts: &MnpsOptions,
) -> Result<LadderReport> {
    let (n_minus, n_plus) = (a.space.n_minus(), a.space.n_plus());
    if levels.last() != Some(&(n_minus, n_plus)) {
        return Err(Error::InvalidArgument(format!(
            "the last ladder level must be the full signature ({n_minus}, {n_plus})"
        )));
    }
    for pair in levels.windows(2) {
        let ((a0, b0), (a1, b1)) = (pair[0], pair[1]);
        if a1 < a0 || b1 < b0 || a1 + b1 <= a0 + b0 {
            return Err(Error::InvalidArgument(format!(
                "ladder levels must increase: {:?} then {:?}",
                pair[0], pair[1]
            )));
        }
    }
    let margin = a.dissipativity_margin();
    if margin < -opts.dissipative_tol * a.norm().max(1.0) {
        return Err(Error::NotDissipative { margin });
    }

    let solved: Vec<Result<LadderLevel>> = levels
        .par_iter()
        .map(|&(km, kp)| {
            let sub = compress(a, km, kp)?;
            let mut w = CMat::zeros(n_plus, n_minus);
            let level = match mnps(&sub, opts) {
                Ok(r) => {
                    w.view_mut((0, 0), (kp, km)).copy_from(&r.w.matrix);
                    LadderLevel {
                        k_minus: km,
                        k_plus: kp,
                        w,
                        residual: r.residual,
                        certified: r.certified,
                        delta_to_previous: None,
                        message: r.message,
                    }
                }
                Err(e) => LadderLevel {
                    k_minus: km,
                    k_plus: kp,
                    w,
                    residual: f64::INFINITY,
                    certified: false,
                    delta_to_previous: None,
                    message: Some(e.to_string()),
                },
            };
            Ok(level)
        })
        .collect();
    let mut out: Vec<LadderLevel> = solved.into_iter().collect::<Result<_>>()?;
    for i in 1..out.len() {
        let d = linalg::op_norm(&(&out[i].w - &out[i - 1].w));
        out[i].delta_to_previous = Some(d);
    }
    let last = out.last().expect("at least one level");
    let final_w = BallPoint::new(a.space, last.w.clone())?;
    let all_certified = out.iter().all(|l| l.certified);
    Ok(LadderReport {
        levels: out,
        final_w,
        all_certified,
    })
}
