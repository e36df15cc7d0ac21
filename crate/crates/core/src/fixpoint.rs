//! Common fixed points of bounded J-unitary representations on the operator
//! ball, invariant dual pairs, and unitarization.
//!
//! For a finite group the averaged metric `B = (1/m) Σ π(g)* π(g)` is
//! invariant, so `B⁻¹J` commutes with every `π(g)` and the negative
//! eigenspace of the pencil `J v = λ B v` is a π-invariant maximal negative
//! subspace. Its angular operator `K` is the common fixed point of the maps
//! `φ_{π(g)}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{self, c64, CMat};
use crate::space::{BallPoint, BlockOperator, IndefiniteSpace, Subspace, DEFAULT_MAX_COND};

/// A representation of a finite group by matrices on an indefinite space.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRep {
    pub group: FiniteGroup,
    pub space: IndefiniteSpace,
    pub matrices: Vec<CMat>,
}

/// On-disk form of a representation; the group lives in its own file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepFile {
    pub space: IndefiniteSpace,
    #[serde(with = "crate::json::cmat_vec")]
    pub matrices: Vec<CMat>,
}

impl GroupRep {
    pub fn new(group: FiniteGroup, space: IndefiniteSpace, matrices: Vec<CMat>) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::InvalidArgument(format!(
                "group of order {} but {} matrices",
                group.order(),
                matrices.len()
            )));
        }
        let n = space.dim();
        if let Some(bad) = matrices.iter().find(|m| m.shape() != (n, n)) {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", bad.nrows(), bad.ncols()),
            });
        }
        Ok(GroupRep {
            group,
            space,
            matrices,
        })
    }

    pub fn from_file(group: FiniteGroup, file: RepFile) -> Result<Self> {
        GroupRep::new(group, file.space, file.matrices)
    }

    pub fn to_file(&self) -> RepFile {
        RepFile {
            space: self.space,
            matrices: self.matrices.clone(),
        }
    }

    /// `‖π‖ = max_g ‖π(g)‖`.
    pub fn norm(&self) -> f64 {
        self.matrices
            .iter()
            .map(linalg::op_norm)
            .fold(0.0, f64::max)
    }

    pub fn operator(&self, g: usize) -> BlockOperator {
        BlockOperator {
            space: self.space,
            matrix: self.matrices[g].clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixpointOptions {
    /// Bound on `max_g ‖φ_{π(g)}(K) - K‖` and the invariance residuals.
    pub residual_tol: f64,
    /// Slack allowed on `‖K‖ <= radius_from_norm(‖π‖)`.
    pub radius_slack: f64,
    /// Pencil eigenvalues with `|λ| <= zero_guard · ‖B⁻¹‖` are an error.
    pub zero_guard: f64,
    pub unitarity_tol: f64,
    pub max_cond: f64,
    /// Word length cap for generator sets.
    pub word_length: usize,
    pub max_words: usize,
}

impl Default for FixpointOptions {
    fn default() -> Self {
        FixpointOptions {
            residual_tol: 1e-8,
            radius_slack: 1e-8,
            zero_guard: 1e-10,
            unitarity_tol: 1e-8,
            max_cond: DEFAULT_MAX_COND,
            word_length: 12,
            max_words: 4096,
        }
    }
}

impl FixpointOptions {
    /// Multiplies every tolerance by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        FixpointOptions {
            residual_tol: self.residual_tol * factor,
            radius_slack: self.radius_slack * factor,
            zero_guard: self.zero_guard * factor,
            unitarity_tol: self.unitarity_tol * factor,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepDiagnostics {
    pub homomorphism_defect: f64,
    pub identity_defect: f64,
    pub j_unitarity_defect: f64,
    pub rep_norm: f64,
    pub pairs_checked: usize,
    pub valid: bool,
}

const EXHAUSTIVE_PAIRS: usize = 64;
const SAMPLED_PAIRS: usize = 4096;

/// Worst defects of the homomorphism law, `π(e) = I` and J-unitarity.
/// `valid` compares them with `tol · max(1, ‖π‖²)`.
pub fn rep_validate(rep: &GroupRep, tol: f64) -> RepDiagnostics {
    let g = &rep.group;
    let m = g.order();
    let pairs: Vec<(usize, usize)> = if m <= EXHAUSTIVE_PAIRS {
        (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect()
    } else {
        // deterministic stride through the pairs
        let total = m * m;
        let step = (total / SAMPLED_PAIRS).max(1);
        (0..total).step_by(step).map(|x| (x / m, x % m)).collect()
    };
    let homomorphism_defect = pairs
        .par_iter()
        .map(|&(a, b)| {
            linalg::max_abs_diff(
                &rep.matrices[g.mul(a, b)],
                &(&rep.matrices[a] * &rep.matrices[b]),
            )
        })
        .reduce(|| 0.0, f64::max);
    let identity_defect = linalg::max_abs_diff(
        &rep.matrices[g.identity()],
        &linalg::identity(rep.space.dim()),
    );
    let j_unitarity_defect = (0..m)
        .into_par_iter()
        .map(|x| rep.operator(x).j_unitarity_defect())
        .reduce(|| 0.0, f64::max);
    let rep_norm = rep.norm();
    let threshold = tol * rep_norm.powi(2).max(1.0);
    RepDiagnostics {
        homomorphism_defect,
        identity_defect,
        j_unitarity_defect,
        rep_norm,
        pairs_checked: pairs.len(),
        valid: homomorphism_defect <= threshold
            && identity_defect <= threshold
            && j_unitarity_defect <= threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitRadius {
    /// `max_g ‖φ_{π(g)}(0)‖`.
    pub radius: f64,
    /// `radius_from_norm(‖π‖)`.
    pub bound: f64,
    pub within_bound: bool,
}

pub fn orbit_radius(rep: &GroupRep) -> Result<OrbitRadius> {
    orbit_radius_of(rep.space, &rep.matrices, DEFAULT_MAX_COND)
}

fn orbit_radius_of(
    space: IndefiniteSpace,
    elements: &[CMat],
    max_cond: f64,
) -> Result<OrbitRadius> {
    let zero = BallPoint::zero(space);
    let radius = elements
        .par_iter()
        .map(|u| {
            let op = BlockOperator {
                space,
                matrix: u.clone(),
            };
            ball::fractional_linear(&op, &zero, max_cond).map(|p| p.norm())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let norm = elements.iter().map(linalg::op_norm).fold(0.0, f64::max);
    let bound = ball::radius_from_norm(norm)?;
    Ok(OrbitRadius {
        radius,
        bound,
        within_bound: radius <= bound + 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageMetric {
    #[serde(with = "crate::json::cmat")]
    pub b: CMat,
    /// `max_g ‖π(g)* B π(g) - B‖` over the averaged elements.
    pub invariance_defect: f64,
    pub elements: usize,
}

fn average(elements: &[CMat]) -> AverageMetric {
    let n = elements.first().map_or(0, |u| u.nrows());
    let mut b = CMat::zeros(n, n);
    // fixed summation order keeps runs reproducible
    for u in elements {
        b += u.adjoint() * u;
    }
    b /= c64(elements.len().max(1) as f64, 0.0);
    let b = linalg::hermitian_part(&b);
    let invariance_defect = elements
        .par_iter()
        .map(|u| linalg::op_norm(&(u.adjoint() * &b * u - &b)))
        .reduce(|| 0.0, f64::max);
    AverageMetric {
        b,
        invariance_defect,
        elements: elements.len(),
    }
}

/// `B = (1/m) Σ_g π(g)* π(g)`.
pub fn group_average_metric(rep: &GroupRep) -> AverageMetric {
    average(&rep.matrices)
}

/// All distinct products of at most `max_len` generators and their inverses
/// (inverses taken as `J U* J`), breadth first, capped at `max_words`.
/// Returns the elements and whether the enumeration closed up (found no new
/// element at the last length), in which case they form the whole group.
pub fn word_closure(
    space: IndefiniteSpace,
    generators: &[CMat],
    max_len: usize,
    max_words: usize,
) -> (Vec<CMat>, bool) {
    let n = space.dim();
    let mut letters: Vec<CMat> = Vec::new();
    for u in generators {
        letters.push(u.clone());
        letters.push(space.apply_j_right(&space.apply_j_left(&u.adjoint())));
    }
    let same = |a: &CMat, b: &CMat| {
        let scale = linalg::op_norm(a).max(1.0);
        linalg::max_abs_diff(a, b) <= 1e-9 * scale
    };
    let mut all = vec![linalg::identity(n)];
    let mut frontier = all.clone();
    let mut closed = false;
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in &letters {
                let p = l * w;
                if !all.iter().any(|x| same(x, &p)) && !next.iter().any(|x| same(x, &p)) {
                    next.push(p);
                }
            }
        }
        if next.is_empty() {
            closed = true;
            break;
        }
        all.extend(next.iter().cloned());
        if all.len() >= max_words {
            all.truncate(max_words);
            break;
        }
        frontier = next;
    }
    (all, closed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub k: BallPoint,
    pub k_norm: f64,
    /// `max_g ‖φ_{π(g)}(K) - K‖`.
    pub max_map_residual: f64,
    /// `max_g invariance_residual(π(g), K)`.
    pub max_invariance_residual: f64,
    /// `max_g ‖φ_{π(g)}(0)‖`.
    pub orbit_radius: f64,
    /// `radius_from_norm(‖π‖)`.
    pub radius_bound: f64,
    pub rep_norm: f64,
    pub metric_invariance_defect: f64,
    /// `max_g ‖B⁻¹J π(g) - π(g) B⁻¹J‖`.
    pub commutation_defect: f64,
    pub pencil_eigenvalues: Vec<f64>,
    pub exact: bool,
    pub certified: bool,
    pub message: String,
}

fn fixed_point_from_elements(
    space: IndefiniteSpace,
    elements: &[CMat],
    exact: bool,
    opts: &FixpointOptions,
) -> Result<FixedPointReport> {
    let k_dim = space.n_minus();
    let metric = average(elements);
    let b = &metric.b;
    let l = linalg::cholesky_lower(b)?;
    let l_inv = linalg::inverse_guarded(&l, opts.max_cond).map_err(|cond| {
        Error::NotInvertible(format!("metric factor has condition number {cond:e}"))
    })?;
    let c = linalg::hermitian_part(&(&l_inv * space.apply_j_left(&l_inv.adjoint())));
    let eig = linalg::eigh(&c);

    let b_inv = l_inv.adjoint() * &l_inv;
    let guard = opts.zero_guard * linalg::op_norm(&b_inv);
    if let Some(&lambda) = eig.values.iter().find(|v| v.abs() <= guard) {
        return Err(Error::DegeneratePencil { eigenvalue: lambda });
    }
    let negatives = eig.values.iter().filter(|&&v| v < 0.0).count();
    if negatives != k_dim {
        return Err(Error::NoConvergence(
            "pencil inertia differs from the signature",
        ));
    }

    // J v = λ B v with v = L^{-*} y and y an eigenvector of L⁻¹ J L^{-*}
    let y = eig.vectors.columns(0, k_dim).into_owned();
    let z = l_inv.adjoint() * y;
    let gram = space.gram(&z);
    if !linalg::inertia(&gram, 0.0).is_negative() {
        return Err(Error::NoConvergence(
            "pencil eigenvectors are not a negative subspace",
        ));
    }
    let k = Subspace::new(space, z)?.to_ball_point(opts.max_cond)?;

    let b_inv_j = space.apply_j_right(&b_inv);
    let per_element: Vec<(f64, f64, f64)> = elements
        .par_iter()
        .map(|u| {
            let op = BlockOperator {
                space,
                matrix: u.clone(),
            };
            let moved = ball::fractional_linear(&op, &k, opts.max_cond)?;
            let map = linalg::op_norm(&(&moved.matrix - &k.matrix));
            let inv = crate::space::invariance_residual(&op, &k)?;
            let comm = linalg::op_norm(&(&b_inv_j * u - u * &b_inv_j));
            Ok((map, inv, comm))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_map_residual = per_element.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_invariance_residual = per_element.iter().map(|r| r.1).fold(0.0, f64::max);
    let commutation_defect = per_element.iter().map(|r| r.2).fold(0.0, f64::max);

    let orbit = orbit_radius_of(space, elements, opts.max_cond)?;
    let rep_norm = elements.iter().map(linalg::op_norm).fold(0.0, f64::max);
    let k_norm = k.norm();

    let mut problems = Vec::new();
    if max_map_residual > opts.residual_tol {
        problems.push(format!(
            "map residual {max_map_residual:.3e} above {:.1e}",
            opts.residual_tol
        ));
    }
    if max_invariance_residual > opts.residual_tol {
        problems.push(format!(
            "invariance residual {max_invariance_residual:.3e} above {:.1e}",
            opts.residual_tol
        ));
    }
    if k_norm > orbit.bound + opts.radius_slack {
        problems.push(format!(
            "‖K‖ = {k_norm:.6} exceeds the orbit bound {:.6}",
            orbit.bound
        ));
    }
    let certified = problems.is_empty();
    let message = if certified {
        "certified".to_string()
    } else {
        problems.join("; ")
    };
    Ok(FixedPointReport {
        k,
        k_norm,
        max_map_residual,
        max_invariance_residual,
        orbit_radius: orbit.radius,
        radius_bound: orbit.bound,
        rep_norm,
        metric_invariance_defect: metric.invariance_defect,
        commutation_defect,
        pencil_eigenvalues: eig.values,
        exact,
        certified,
        message,
    })
}

/// Fixed point of all `φ_{π(g)}` for a finite group.
pub fn common_fixed_point(rep: &GroupRep, opts: &FixpointOptions) -> Result<FixedPointReport> {
    fixed_point_from_elements(rep.space, &rep.matrices, true, opts)
}

/// Approximate mode for a group given by generators: averages over the word
/// closure up to `opts.word_length`. If the closure terminates the group is
/// finite and the average is exact; otherwise only the residuals certify.
pub fn common_fixed_point_generated(
    space: IndefiniteSpace,
    generators: &[CMat],
    opts: &FixpointOptions,
) -> Result<FixedPointReport> {
    let (elements, closed) = word_closure(space, generators, opts.word_length, opts.max_words);
    let mut report = fixed_point_from_elements(space, &elements, closed, opts)?;
    if !closed {
        report.message = format!(
            "{} (word closure truncated at {} elements)",
            report.message,
            elements.len()
        );
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPair {
    /// `{(K* y, y)}`, the J-orthogonal complement of the negative part.
    pub positive: Subspace,
    /// Graph of `K`.
    pub negative: Subspace,
    pub max_projection_residual: f64,
    pub positive_ok: bool,
    pub negative_ok: bool,
}

/// The pair `(L_K^{[⊥]}, L_K)` for a fixed point `K` of the representation.
pub fn dual_pair_from_fixed_point(rep: &GroupRep, k: &BallPoint) -> Result<DualPair> {
    k.ensure_strict()?;
    let (nk, m) = (rep.space.n_minus(), rep.space.n_plus());
    let negative = k.graph();
    let mut pos = CMat::zeros(nk + m, m);
    pos.view_mut((0, 0), (nk, m)).copy_from(&k.matrix.adjoint());
    pos.view_mut((nk, 0), (m, m)).fill_with_identity();
    let positive = Subspace::new(rep.space, pos)?;
    let max_projection_residual = rep
        .matrices
        .par_iter()
        .map(|u| {
            linalg::invariance_defect(u, &negative.basis)
                .max(linalg::invariance_defect(u, &positive.basis))
        })
        .reduce(|| 0.0, f64::max);
    let sig_tol = 1e-9;
    let ps = positive.signature(sig_tol);
    let ns = negative.signature(sig_tol);
    Ok(DualPair {
        positive_ok: m == 0 || (ps.is_positive() && ps.n_pos == m),
        negative_ok: nk == 0 || (ns.is_negative() && ns.n_neg == nk),
        positive,
        negative,
        max_projection_residual,
    })
}

pub fn invariant_dual_pair(rep: &GroupRep, opts: &FixpointOptions) -> Result<DualPair> {
    let fp = common_fixed_point(rep, opts)?;
    dual_pair_from_fixed_point(rep, &fp.k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitarizationReport {
    pub fixed_point: FixedPointReport,
    /// `V = M_{-K}`, which moves `K` to `0`.
    #[serde(with = "crate::json::cmat")]
    pub v: CMat,
    #[serde(with = "crate::json::cmat")]
    pub v_inv: CMat,
    /// `U(g) = V π(g) V⁻¹`.
    #[serde(with = "crate::json::cmat_vec")]
    pub u: Vec<CMat>,
    pub max_unitarity_defect: f64,
    /// `‖V‖ ‖V⁻¹‖`.
    pub cond: f64,
    /// `2 ‖π‖² + 1`.
    pub bound: f64,
    /// `(1 + ‖K‖) / (1 - ‖K‖)`.
    pub sharper_bound: f64,
    pub certified: bool,
    pub message: String,
}

/// Similarity `V` with every `V π(g) V⁻¹` unitary, built from the common
/// fixed point `K`.
pub fn unitarize(rep: &GroupRep, opts: &FixpointOptions) -> Result<UnitarizationReport> {
    let fixed_point = common_fixed_point(rep, opts)?;
    let k = &fixed_point.k;
    k.ensure_strict()?;
    // μ_K sends 0 to K, so M_{-K} = M_K⁻¹ sends L_K back to H-.
    let v = ball::mobius_matrix(&k.neg())?.matrix;
    let v_inv = ball::mobius_matrix(k)?.matrix;
    let u: Vec<CMat> = rep.matrices.par_iter().map(|p| &v * p * &v_inv).collect();
    let n = rep.space.dim();
    let max_unitarity_defect = u
        .par_iter()
        .map(|x| linalg::op_norm(&(x.adjoint() * x - linalg::identity(n))))
        .reduce(|| 0.0, f64::max);
    let cond = linalg::op_norm(&v) * linalg::op_norm(&v_inv);
    let bound = 2.0 * fixed_point.rep_norm.powi(2) + 1.0;
    let r = fixed_point.k_norm;
    let sharper_bound = (1.0 + r) / (1.0 - r);

    let mut problems = Vec::new();
    if !fixed_point.certified {
        problems.push(format!("fixed point uncertified: {}", fixed_point.message));
    }
    if max_unitarity_defect > opts.unitarity_tol {
        problems.push(format!("unitarity defect {max_unitarity_defect:.3e}"));
    }
    if cond > sharper_bound + opts.radius_slack {
        problems.push(format!(
            "cond {cond:.6} above (1+‖K‖)/(1-‖K‖) = {sharper_bound:.6}"
        ));
    }
    if cond > bound + 1e-6 {
        problems.push(format!("cond {cond:.6} above 2‖π‖²+1 = {bound:.6}"));
    }
    let certified = problems.is_empty();
    Ok(UnitarizationReport {
        fixed_point,
        v,
        v_inv,
        u,
        max_unitarity_defect,
        cond,
        bound,
        sharper_bound,
        certified,
        message: if certified {
            "certified".into()
        } else {
            problems.join("; ")
        },
    })
}

/// `π(g) = M_A diag(u-(g), u+(g)) M_{-A}`: a J-unitary representation whose
/// orbit of `0` is moved to be centred at `A`.
pub fn fixture_conjugated_rep(
    group: &FiniteGroup,
    u_plus: &[CMat],
    u_minus: &[CMat],
    a: &BallPoint,
) -> Result<GroupRep> {
    let space = a.space;
    let m = group.order();
    if u_plus.len() != m || u_minus.len() != m {
        return Err(Error::InvalidArgument(
            "one unitary block per group element expected".into(),
        ));
    }
    if u_minus
        .iter()
        .any(|x| x.shape() != (space.n_minus(), space.n_minus()))
        || u_plus
            .iter()
            .any(|x| x.shape() != (space.n_plus(), space.n_plus()))
    {
        return Err(Error::DimensionMismatch {
            expected: format!("blocks of sizes {} and {}", space.n_minus(), space.n_plus()),
            found: "other block sizes".into(),
        });
    }
    let ma = ball::mobius_matrix(a)?.matrix;
    let ma_inv = ball::mobius_matrix(&a.neg())?.matrix;
    let matrices = (0..m)
        .map(|g| &ma * linalg::block_diag(&u_minus[g], &u_plus[g]) * &ma_inv)
        .collect();
    GroupRep::new(group.clone(), space, matrices)
}

/// Gram matrix `[[0, I], [I, 0]]` of the form `[x1⊕y1, x2⊕y2] = (x1,y2) + (y1,x2)`.
pub fn double_form(n: usize) -> CMat {
    let mut g = CMat::zeros(2 * n, 2 * n);
    g.view_mut((0, n), (n, n)).fill_with_identity();
    g.view_mut((n, 0), (n, n)).fill_with_identity();
    g
}

/// `τ(g) = diag(π(g), π(g⁻¹)*)` on `H ⊕ H`, as raw `x⊕y` matrices.
pub fn double_rep_matrices(group: &FiniteGroup, matrices: &[CMat]) -> Result<Vec<CMat>> {
    if matrices.len() != group.order() {
        return Err(Error::InvalidArgument(
            "one matrix per group element expected".into(),
        ));
    }
    (0..group.order())
        .map(|g| {
            let inv = &matrices[group.inverse(g)];
            if linalg::min_singular(inv) <= 1e-12 * linalg::op_norm(inv).max(1.0) {
                return Err(Error::NotInvertible(format!(
                    "π of element {g} is singular"
                )));
            }
            Ok(linalg::block_diag(&matrices[g], &inv.adjoint()))
        })
        .collect()
}

/// The doubled representation written in coordinates where the doubled form
/// is `J` for the signature `(n, n)`: minus basis `x⊕(-x)/√2`, plus basis
/// `x⊕x/√2`.
pub fn fixture_double_rep(group: &FiniteGroup, matrices: &[CMat]) -> Result<GroupRep> {
    let n = matrices.first().map_or(0, |x| x.nrows());
    let raw = double_rep_matrices(group, matrices)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut q = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        q[(i, i)] = c64(s, 0.0);
        q[(n + i, i)] = c64(-s, 0.0);
        q[(i, n + i)] = c64(s, 0.0);
        q[(n + i, n + i)] = c64(s, 0.0);
    }
    let space = IndefiniteSpace::new(n, n)?;
    let converted = raw.iter().map(|t| q.adjoint() * t * &q).collect();
    GroupRep::new(group.clone(), space, converted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::max_abs_diff;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rotation_blocks(m: usize, dim: usize, shift: usize) -> Vec<CMat> {
        // u(g) = diag(ω^{g(shift + i)}) for Z_m
        (0..m)
            .map(|g| {
                CMat::from_fn(dim, dim, |r, c| {
                    if r != c {
                        return c64(0.0, 0.0);
                    }
                    let angle = 2.0 * std::f64::consts::PI * (g * (shift + r)) as f64 / m as f64;
                    c64(angle.cos(), angle.sin())
                })
            })
            .collect()
    }

    #[test]
    fn unitary_block_rep_fixes_zero() {
        let group = FiniteGroup::cyclic(4).unwrap();
        let space = IndefiniteSpace::new(1, 2).unwrap();
        let a = BallPoint::zero(space);
        let rep = fixture_conjugated_rep(
            &group,
            &rotation_blocks(4, 2, 1),
            &rotation_blocks(4, 1, 0),
            &a,
        )
        .unwrap();
        let diag = rep_validate(&rep, 1e-12);
        assert!(diag.valid, "{diag:?}");
        assert!(orbit_radius(&rep).unwrap().radius < 1e-14);
        let metric = group_average_metric(&rep);
        assert!(max_abs_diff(&metric.b, &linalg::identity(3)) < 1e-12);
        let fp = common_fixed_point(&rep, &FixpointOptions::default()).unwrap();
        assert!(fp.certified && fp.k_norm < 1e-12, "{fp:?}");
        let un = unitarize(&rep, &FixpointOptions::default()).unwrap();
        assert!(un.certified);
        assert!((un.cond - 1.0).abs() < 1e-12);
        assert!((un.bound - 3.0).abs() < 1e-12);
        let pair = dual_pair_from_fixed_point(&rep, &fp.k).unwrap();
        assert!(pair.positive_ok && pair.negative_ok);
        assert!(max_abs_diff(&pair.negative.basis, &BallPoint::zero(space).graph().basis) < 1e-12);
    }

    #[test]
    fn z4_rotation_conjugated_by_mobius() {
        let group = FiniteGroup::cyclic(4).unwrap();
        let space = IndefiniteSpace::new(1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = fixtures::random_ball_point(space, 0.5, &mut rng);
        // H- carries the trivial character, H+ the characters 1 and 2
        let rep = fixture_conjugated_rep(
            &group,
            &rotation_blocks(4, 2, 1),
            &rotation_blocks(4, 1, 0),
            &a,
        )
        .unwrap();
        let diag = rep_validate(&rep, 1e-10);
        assert!(diag.valid, "{diag:?}");
        let bound = ball::mobius_norm(&a).unwrap().norm.powi(2);
        assert!(rep.norm() <= bound + 1e-10);

        let orbit = orbit_radius(&rep).unwrap();
        assert!(orbit.within_bound);

        let metric = group_average_metric(&rep);
        assert!(metric.invariance_defect < 1e-10);
        let p2 = rep.norm().powi(2);
        assert!(linalg::min_eigenvalue_hermitian(&metric.b) >= 1.0 / p2 - 1e-10);
        assert!(linalg::op_norm(&metric.b) <= p2 + 1e-10);

        let fp = common_fixed_point(&rep, &FixpointOptions::default()).unwrap();
        assert!(fp.certified, "{}", fp.message);
        assert!(fp.commutation_defect <= 1e-9 * p2);
        assert!(max_abs_diff(&fp.k.matrix, &a.matrix) < 1e-6);
        assert_eq!(
            fp.pencil_eigenvalues.iter().filter(|v| **v < 0.0).count(),
            1
        );

        let pair = invariant_dual_pair(&rep, &FixpointOptions::default()).unwrap();
        assert!(pair.max_projection_residual < 1e-8);
        assert!(pair.positive_ok && pair.negative_ok);
        // the pair is M_A applied to the coordinate subspaces
        let ma = ball::mobius_matrix(&a).unwrap().matrix;
        let image_minus = ma.columns(0, 1).into_owned();
        let image_plus = ma.columns(1, 2).into_owned();
        assert!(linalg::subspace_gap(&image_minus, &pair.negative.basis) < 1e-8);
        assert!(linalg::subspace_gap(&image_plus, &pair.positive.basis) < 1e-8);

        let un = unitarize(&rep, &FixpointOptions::default()).unwrap();
        assert!(un.certified, "{}", un.message);
        assert!(un.cond <= 3.0 + 1e-8);
    }

    #[test]
    fn conjugated_fixture_with_radius_point_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let group = FiniteGroup::by_name("S3").unwrap();
        let space = IndefiniteSpace::new(2, 3).unwrap();
        let (rep, a) = fixtures::conjugated_rep_fixture(&group, space, 0.6, &mut rng).unwrap();
        let un = unitarize(&rep, &FixpointOptions::default()).unwrap();
        assert!(un.certified, "{}", un.message);
        assert!(un.cond <= 4.0 + 1e-8);
        assert!(max_abs_diff(&un.fixed_point.k.matrix, &a.matrix) < 1e-6);
        for x in &un.u {
            assert!(max_abs_diff(&(x.adjoint() * x), &linalg::identity(5)) < 1e-8);
        }
    }

    #[test]
    fn trivial_group_metric_is_identity() {
        let group = FiniteGroup::cyclic(1).unwrap();
        let space = IndefiniteSpace::new(2, 2).unwrap();
        let rep = GroupRep::new(group, space, vec![linalg::identity(4)]).unwrap();
        assert!(max_abs_diff(&group_average_metric(&rep).b, &linalg::identity(4)) < 1e-15);
    }

    #[test]
    fn corrupted_table_breaks_homomorphism() {
        let good = FiniteGroup::cyclic(4).unwrap();
        let space = IndefiniteSpace::new(1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = fixtures::random_ball_point(space, 0.3, &mut rng);
        let rep = fixture_conjugated_rep(
            &good,
            &rotation_blocks(4, 1, 1),
            &rotation_blocks(4, 1, 0),
            &a,
        )
        .unwrap();
        let mut table = good.table().to_vec();
        table[1][1] = 3;
        table[1][2] = 2;
        let bad = FiniteGroup::from_table_unchecked(good.elements().to_vec(), table, 0);
        let broken = GroupRep { group: bad, ..rep };
        let diag = rep_validate(&broken, 1e-9);
        assert!(!diag.valid);
        assert!(diag.homomorphism_defect > 0.1);
    }

    #[test]
    fn cyclic_group_generated_by_one_element() {
        // U = M_A diag(ω, ω²) M_{-A} with ω a primitive 7th root: the word
        // closure recovers all seven powers.
        let space = IndefiniteSpace::new(1, 1).unwrap();
        let a = BallPoint::new(space, CMat::from_element(1, 1, c64(0.3, 0.4))).unwrap();
        let w = |p: f64| {
            let t = 2.0 * std::f64::consts::PI * p / 7.0;
            c64(t.cos(), t.sin())
        };
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![w(1.0), w(2.0)]));
        let u = ball::mobius_matrix(&a).unwrap().matrix
            * d
            * ball::mobius_matrix(&a.neg()).unwrap().matrix;
        let (elements, closed) = word_closure(space, std::slice::from_ref(&u), 12, 4096);
        assert!(closed);
        assert_eq!(elements.len(), 7);
        let fp = common_fixed_point_generated(space, &[u], &FixpointOptions::default()).unwrap();
        assert!(fp.exact && fp.certified, "{}", fp.message);
        assert!(fp.max_map_residual <= 1e-8);
        assert!(max_abs_diff(&fp.k.matrix, &a.matrix) < 1e-8);
    }

    #[test]
    fn infinite_cyclic_group_is_not_certified_by_invariance() {
        let space = IndefiniteSpace::new(1, 1).unwrap();
        let a = BallPoint::new(space, CMat::from_element(1, 1, c64(0.5, 0.0))).unwrap();
        let t: f64 = 2.0_f64.sqrt();
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c64(1.0, 0.0),
            c64(t.cos(), t.sin()),
        ]));
        let u = ball::mobius_matrix(&a).unwrap().matrix
            * d
            * ball::mobius_matrix(&a.neg()).unwrap().matrix;
        let fp = common_fixed_point_generated(space, &[u], &FixpointOptions::default()).unwrap();
        assert!(!fp.exact);
        assert!(fp.metric_invariance_defect > 1e-6);
        assert_eq!(
            fp.certified,
            fp.max_map_residual <= 1e-8 && fp.max_invariance_residual <= 1e-8
        );
    }

    #[test]
    fn double_rep_preserves_the_doubled_form() {
        // a non-unitary involution S (S² = I) represents Z2
        let group = FiniteGroup::cyclic(2).unwrap();
        let s = CMat::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(3.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)],
        );
        let pi = vec![linalg::identity(2), s];
        let raw = double_rep_matrices(&group, &pi).unwrap();
        let form = double_form(2);
        for t in &raw {
            assert!(max_abs_diff(&(t.adjoint() * &form * t), &form) < 1e-12);
        }
        let tau = fixture_double_rep(&group, &pi).unwrap();
        let diag = rep_validate(&tau, 1e-10);
        assert!(diag.valid, "{diag:?}");
        assert!(diag.rep_norm > 1.0);
        let un = unitarize(&tau, &FixpointOptions::default()).unwrap();
        assert!(un.certified, "{}", un.message);
    }

    #[test]
    fn double_of_unitary_rep_is_unitary() {
        let group = FiniteGroup::cyclic(3).unwrap();
        let pi = rotation_blocks(3, 2, 1);
        let tau = fixture_double_rep(&group, &pi).unwrap();
        for t in &tau.matrices {
            assert!(max_abs_diff(&(t.adjoint() * t), &linalg::identity(4)) < 1e-12);
        }
    }

    #[test]
    fn diagonal_scaling_double_rep_preserves_form() {
        // π(g) = diag(2^ε, 2^-ε) for g = s^ε in Z2 acting by swapping:
        // T = [[0, 2], [1/2, 0]] satisfies T² = I.
        let group = FiniteGroup::cyclic(2).unwrap();
        let t = CMat::from_row_slice(
            2,
            2,
            &[c64(0.0, 0.0), c64(2.0, 0.0), c64(0.5, 0.0), c64(0.0, 0.0)],
        );
        let raw = double_rep_matrices(&group, &[linalg::identity(2), t]).unwrap();
        let form = double_form(2);
        for m in &raw {
            assert!(max_abs_diff(&(m.adjoint() * &form * m), &form) < 1e-12);
        }
        let singular = CMat::zeros(2, 2);
        assert!(double_rep_matrices(&group, &[linalg::identity(2), singular]).is_err());
    }
}
