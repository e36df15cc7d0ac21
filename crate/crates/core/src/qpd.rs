//! Quasi-positive-definite functions on finite groups.
//!
//! A function `φ` with `φ(g⁻¹) = conj φ(g)` defines the form
//! `[f1, f2] = Σ_{g,h} f1(h) conj f2(g) φ(g⁻¹h) = f2* Φ f1` on functions of
//! the group, where `Φ_ij = φ(g_i⁻¹ g_j)`. With this placement of conjugates
//! `[ε_e, ε_e] = φ(e)` and `[T_g ε_e, ε_e] = φ(g)`. Left translations
//! preserve the form, so they descend to a J-unitary representation on the
//! nondegenerate quotient, a Pontryagin space with `k` negative squares.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixpoint::{self, FixpointOptions, GroupRep};
use crate::group::FiniteGroup;
use crate::linalg::{self, c64, CMat, CVec};
use crate::space::IndefiniteSpace;

/// Relative threshold below which Gram eigenvalues count as zero.
pub const KERNEL_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    pub group: FiniteGroup,
    pub values: Vec<Complex64>,
}

/// On-disk form of a group function; the group lives in its own file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValuesFile {
    #[serde(with = "crate::json::complex_vec")]
    pub values: Vec<Complex64>,
}

impl GroupFunction {
    /// Checks the length and `φ(g⁻¹) = conj φ(g)` to `1e-12 · max(1, max|φ|)`.
    pub fn new(group: FiniteGroup, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::InvalidArgument(format!(
                "group of order {} but {} values",
                group.order(),
                values.len()
            )));
        }
        let f = GroupFunction { group, values };
        let defect = f.symmetry_defect();
        if defect > SYMMETRY_TOL * f.max_abs().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "function is not Hermitian symmetric (defect {defect:.3e})"
            )));
        }
        Ok(f)
    }

    pub fn from_file(group: FiniteGroup, file: ValuesFile) -> Result<Self> {
        GroupFunction::new(group, file.values)
    }

    pub fn to_file(&self) -> ValuesFile {
        ValuesFile {
            values: self.values.clone(),
        }
    }

    pub fn zero(group: &FiniteGroup) -> Self {
        GroupFunction {
            group: group.clone(),
            values: vec![c64(0.0, 0.0); group.order()],
        }
    }

    /// `max_g |φ(g⁻¹) - conj φ(g)|`.
    pub fn symmetry_defect(&self) -> f64 {
        (0..self.values.len())
            .map(|g| (self.values[self.group.inverse(g)] - self.values[g].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `Φ_ij = φ(g_i⁻¹ g_j)`, evaluated on the symmetrization
    /// `(φ(g) + conj φ(g⁻¹)) / 2` so that the result is Hermitian and
    /// translation invariant exactly.
    pub fn gram_matrix(&self, elements: &[usize]) -> CMat {
        let g = &self.group;
        let sym: Vec<Complex64> = (0..self.values.len())
            .map(|x| (self.values[x] + self.values[g.inverse(x)].conj()) * 0.5)
            .collect();
        CMat::from_fn(elements.len(), elements.len(), |i, j| {
            sym[g.mul(g.inverse(elements[i]), elements[j])]
        })
    }

    /// Gram matrix over the whole group in element order.
    pub fn gram_full(&self) -> CMat {
        let all: Vec<usize> = (0..self.group.order()).collect();
        self.gram_matrix(&all)
    }

    fn scaled(&self, c: f64) -> GroupFunction {
        GroupFunction {
            group: self.group.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// Inertia of the full Gram matrix with eigenvalues within
/// `tol · scale` of zero counted as null.
fn gram_inertia(phi: &GroupFunction, tol: f64, scale: f64) -> linalg::Inertia {
    let gram = phi.gram_full();
    linalg::inertia(&gram, tol * scale)
}

fn gram_scale(phi: &GroupFunction) -> f64 {
    linalg::op_norm(&phi.gram_full())
}

/// Number of Gram eigenvalues below `-KERNEL_TOL · ‖Φ‖`.
pub fn negative_squares(phi: &GroupFunction) -> usize {
    gram_inertia(phi, KERNEL_TOL, gram_scale(phi)).n_neg
}

/// Rank of the Gram matrix of a positive definite function.
pub fn finite_type_rank(phi: &GroupFunction) -> Result<usize> {
    let inertia = gram_inertia(phi, KERNEL_TOL, gram_scale(phi));
    if inertia.n_neg > 0 {
        return Err(Error::NotPd {
            negatives: inertia.n_neg,
        });
    }
    Ok(inertia.n_pos)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub order: usize,
    pub negative_squares: usize,
    pub positive_squares: usize,
    pub rank: usize,
    pub positive_definite: bool,
    /// Present when the function is positive definite.
    pub finite_type_rank: Option<usize>,
    pub gram_eigenvalues: Vec<f64>,
}

pub fn classify(phi: &GroupFunction) -> Classification {
    let gram = phi.gram_full();
    let eig = linalg::eigh(&gram);
    let inertia = linalg::Inertia::of_values(&eig.values, KERNEL_TOL * linalg::op_norm(&gram));
    let pd = inertia.n_neg == 0;
    Classification {
        order: phi.group.order(),
        negative_squares: inertia.n_neg,
        positive_squares: inertia.n_pos,
        rank: inertia.n_neg + inertia.n_pos,
        positive_definite: pd,
        finite_type_rank: pd.then_some(inertia.n_pos),
        gram_eigenvalues: eig.values,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnsResult {
    /// Dimension of the nondegenerate quotient.
    pub p: usize,
    /// Signs of the kept Gram eigenvalues, negatives first.
    pub signs: Vec<i8>,
    /// `p x m` map from functions on the group to quotient coordinates.
    #[serde(with = "crate::json::cmat")]
    pub coords: CMat,
    /// `U(g)`, the compressed left translations.
    #[serde(with = "crate::json::cmat_vec")]
    pub u: Vec<CMat>,
    /// `f = C ε_e`.
    #[serde(with = "crate::json::cmat")]
    pub f: CMat,
    /// `(k, p - k)`; absent when `p = 0`.
    pub space: Option<IndefiniteSpace>,
    pub homomorphism_defect: f64,
    pub j_unitarity_defect: f64,
    pub reconstruction_defect: f64,
}

impl GnsResult {
    pub fn negative_squares(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    /// `[x, y] = y* J' x` in quotient coordinates.
    pub fn form(&self, x: &CVec, y: &CVec) -> Complex64 {
        x.iter()
            .zip(y.iter())
            .zip(&self.signs)
            .map(|((a, b), &s)| a * b.conj() * s as f64)
            .sum()
    }

    pub fn rep(&self, group: &FiniteGroup) -> Result<Option<GroupRep>> {
        match self.space {
            Some(space) => GroupRep::new(group.clone(), space, self.u.clone()).map(Some),
            None => Ok(None),
        }
    }
}

/// The quotient of the translation-invariant form by its kernel, with the
/// left-regular representation compressed to it.
pub fn gns_construct(phi: &GroupFunction) -> GnsResult {
    let group = &phi.group;
    let m = group.order();
    let gram = phi.gram_full();
    let eig = linalg::eigh(&gram);
    let threshold = KERNEL_TOL * linalg::op_norm(&gram);
    // eigh is ascending, so negatives come first
    let kept: Vec<usize> = (0..m)
        .filter(|&i| eig.values[i].abs() > threshold)
        .collect();
    let p = kept.len();
    let signs: Vec<i8> = kept
        .iter()
        .map(|&i| if eig.values[i] < 0.0 { -1 } else { 1 })
        .collect();
    let k = signs.iter().filter(|&&s| s < 0).count();

    let mut v_p = CMat::zeros(m, p);
    let mut right = CMat::zeros(m, p);
    let mut coords = CMat::zeros(p, m);
    for (c, &i) in kept.iter().enumerate() {
        let root = eig.values[i].abs().sqrt();
        v_p.set_column(c, &eig.vectors.column(i));
        right.set_column(c, &(eig.vectors.column(i) / c64(root, 0.0)));
        coords.set_row(c, &(eig.vectors.column(i).adjoint() * c64(root, 0.0)));
    }
    let u: Vec<CMat> = (0..m)
        .map(|g| &coords * group.left_regular(g) * &right)
        .collect();
    let f = coords.columns(group.identity(), 1).into_owned();

    let j_diag = CMat::from_diagonal(&CVec::from_iterator(
        p,
        signs.iter().map(|&s| c64(s as f64, 0.0)),
    ));
    let mut homomorphism_defect: f64 = 0.0;
    let mut j_unitarity_defect: f64 = 0.0;
    let mut reconstruction_defect: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let d = linalg::max_abs_diff(&u[group.mul(a, b)], &(&u[a] * &u[b]));
            homomorphism_defect = homomorphism_defect.max(d);
        }
        let ju = linalg::max_abs_diff(&(u[a].adjoint() * &j_diag * &u[a]), &j_diag);
        j_unitarity_defect = j_unitarity_defect.max(ju);
        let value = if p == 0 {
            c64(0.0, 0.0)
        } else {
            (f.adjoint() * &j_diag * &u[a] * &f)[(0, 0)]
        };
        reconstruction_defect = reconstruction_defect.max((value - phi.values[a]).norm());
    }

    GnsResult {
        p,
        signs,
        coords,
        u,
        f,
        space: if p == 0 {
            None
        } else {
            IndefiniteSpace::new(k, p - k).ok()
        },
        homomorphism_defect,
        j_unitarity_defect,
        reconstruction_defect,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCertificate {
    /// `max_g |φ(g) - φ1(g) + φ2(g)|`.
    pub reconstruction_error: f64,
    /// The same divided by `max_g |φ(g)|` (or 1 when `φ = 0`).
    pub relative_reconstruction_error: f64,
    pub negative_squares: usize,
    pub phi1_negative_squares: usize,
    pub phi2_negative_squares: usize,
    pub phi2_rank: usize,
    pub passed: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub phi1: GroupFunction,
    pub phi2: GroupFunction,
    pub gns: GnsResult,
    pub certificate: DecompositionCertificate,
}

/// Checks `φ = φ1 - φ2` to `reconstruction_tol` relative to `max|φ|`, that
/// both parts are positive definite and that `rank(φ2) = negative_squares(φ)`.
/// All three Gram matrices share one zero threshold, set by the largest of
/// their norms.
pub fn verify_decomposition(
    phi: &GroupFunction,
    phi1: &GroupFunction,
    phi2: &GroupFunction,
    reconstruction_tol: f64,
) -> Result<DecompositionCertificate> {
    if phi.group != phi1.group || phi.group != phi2.group {
        return Err(Error::InvalidArgument(
            "functions live on different groups".into(),
        ));
    }
    let reconstruction_error = (0..phi.values.len())
        .map(|g| (phi.values[g] - phi1.values[g] + phi2.values[g]).norm())
        .fold(0.0, f64::max);
    let reference = if phi.max_abs() > 0.0 {
        phi.max_abs()
    } else {
        1.0
    };
    let relative_reconstruction_error = reconstruction_error / reference;
    let scale = gram_scale(phi).max(gram_scale(phi1)).max(gram_scale(phi2));
    let k = gram_inertia(phi, KERNEL_TOL, scale).n_neg;
    let i1 = gram_inertia(phi1, KERNEL_TOL, scale);
    let i2 = gram_inertia(phi2, KERNEL_TOL, scale);

    let mut problems = Vec::new();
    if relative_reconstruction_error > reconstruction_tol {
        problems.push(format!(
            "reconstruction error {relative_reconstruction_error:.3e}"
        ));
    }
    if i1.n_neg > 0 {
        problems.push(format!("φ1 has {} negative squares", i1.n_neg));
    }
    if i2.n_neg > 0 {
        problems.push(format!("φ2 has {} negative squares", i2.n_neg));
    }
    if i2.n_pos > k {
        problems.push(format!("rank of φ2 is {} > k = {k}", i2.n_pos));
    }
    if k > i2.n_pos {
        problems.push(format!("k = {k} exceeds the rank {} of φ2", i2.n_pos));
    }
    let passed = problems.is_empty();
    Ok(DecompositionCertificate {
        reconstruction_error,
        relative_reconstruction_error,
        negative_squares: k,
        phi1_negative_squares: i1.n_neg,
        phi2_negative_squares: i2.n_neg,
        phi2_rank: i2.n_pos,
        passed,
        message: if passed {
            "certified".into()
        } else {
            problems.join("; ")
        },
    })
}

/// `φ = φ1 - φ2` with `φ1` positive definite and `φ2` positive definite of
/// rank `k = negative_squares(φ)`, from an invariant dual pair of the GNS
/// representation.
pub fn decompose(
    phi: &GroupFunction,
    opts: &FixpointOptions,
    reconstruction_tol: f64,
) -> Result<Decomposition> {
    let group = &phi.group;
    let gns = gns_construct(phi);
    let (phi1, phi2) = match gns.space {
        None => (GroupFunction::zero(group), GroupFunction::zero(group)),
        Some(space) if space.n_minus() == 0 => (phi.clone(), GroupFunction::zero(group)),
        Some(space) if space.n_plus() == 0 => (GroupFunction::zero(group), phi.scaled(-1.0)),
        Some(space) => {
            let rep = GroupRep::new(group.clone(), space, gns.u.clone())?;
            let fp = fixpoint::common_fixed_point(&rep, opts)?;
            let pair = fixpoint::dual_pair_from_fixed_point(&rep, &fp.k)?;
            let k = space.n_minus();
            let mut basis = CMat::zeros(gns.p, gns.p);
            basis
                .view_mut((0, 0), (gns.p, k))
                .copy_from(&pair.negative.basis);
            basis
                .view_mut((0, k), (gns.p, gns.p - k))
                .copy_from(&pair.positive.basis);
            let coeff = linalg::solve_guarded(&basis, &gns.f, opts.max_cond).map_err(|cond| {
                Error::NotInvertible(format!("dual pair basis, condition {cond:e}"))
            })?;
            let f_minus = &pair.negative.basis * coeff.rows(0, k);
            let f_plus = &pair.positive.basis * coeff.rows(k, gns.p - k);
            let j = space.j();
            let coefficient = |x: &CMat, g: usize| (x.adjoint() * &j * &gns.u[g] * x)[(0, 0)];
            let m = group.order();
            let v1 = (0..m).map(|g| coefficient(&f_plus, g)).collect();
            let v2 = (0..m).map(|g| -coefficient(&f_minus, g)).collect();
            (
                GroupFunction {
                    group: group.clone(),
                    values: v1,
                },
                GroupFunction {
                    group: group.clone(),
                    values: v2,
                },
            )
        }
    };
    let certificate = verify_decomposition(phi, &phi1, &phi2, reconstruction_tol)?;
    Ok(Decomposition {
        phi1,
        phi2,
        gns,
        certificate,
    })
}
