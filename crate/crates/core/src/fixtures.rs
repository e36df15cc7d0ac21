//! Seeded random fixtures: dissipative operators, ball points, J-unitary
//! maps, unitary group representations and quasi-positive-definite
//! functions. Every generator draws only from the supplied RNG, so a seed
//! determines the output bit for bit.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ball;
use crate::error::{Error, Result};
use crate::fixpoint::GroupRep;
use crate::group::FiniteGroup;
use crate::linalg::{self, c64, CMat};
use crate::qpd::GroupFunction;
use crate::space::{BallPoint, BlockOperator, IndefiniteSpace, DEFAULT_TOL};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = gaussian_matrix(n, n, rng);
    linalg::hermitian_part(&g) * c64(1.0 / (n as f64).sqrt(), 0.0)
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let qr = gaussian_matrix(n, n, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `A = J S` with `S` Hermitian: J-selfadjoint, dissipativity form zero.
pub fn random_j_selfadjoint<R: Rng + ?Sized>(space: IndefiniteSpace, rng: &mut R) -> BlockOperator {
    let s = random_hermitian(space.dim(), rng);
    BlockOperator {
        space,
        matrix: space.apply_j_left(&s),
    }
}

/// `A = J (S + iP)` with `S` Hermitian and `P = H H* / n`, `H` of `rank`
/// columns. The dissipativity form of `A` is exactly `P`, so every draw is
/// J-dissipative; rank `n` draws are strongly so almost surely.
pub fn random_dissipative<R: Rng + ?Sized>(
    space: IndefiniteSpace,
    rank: usize,
    rng: &mut R,
) -> BlockOperator {
    let n = space.dim();
    loop {
        let s = random_hermitian(n, rng);
        let h = gaussian_matrix(n, rank, rng);
        let p = &h * h.adjoint() * c64(1.0 / n as f64, 0.0);
        let a = BlockOperator {
            space,
            matrix: space.apply_j_left(&(s + p * c64(0.0, 1.0))),
        };
        if a.classify(DEFAULT_TOL).j_dissipative {
            return a;
        }
    }
}

/// Like [`random_dissipative`] with `P = H H*/n + I/10`, margin at least 0.1.
pub fn random_strongly_dissipative<R: Rng + ?Sized>(
    space: IndefiniteSpace,
    rng: &mut R,
) -> BlockOperator {
    let n = space.dim();
    let s = random_hermitian(n, rng);
    let h = gaussian_matrix(n, n, rng);
    let p = &h * h.adjoint() * c64(1.0 / n as f64, 0.0) + linalg::identity(n) * c64(0.1, 0.0);
    BlockOperator {
        space,
        matrix: space.apply_j_left(&(s + p * c64(0.0, 1.0))),
    }
}

/// `A = S D S⁻¹` where `D` has `k_lower` eigenvalues in the open lower
/// half-plane followed by upper half-plane ones; returns `A` and the two
/// spectral subspaces `S[:, ..k_lower]`, `S[:, k_lower..]`.
pub fn conjugated_diagonal<R: Rng + ?Sized>(
    space: IndefiniteSpace,
    k_lower: usize,
    rng: &mut R,
) -> (BlockOperator, CMat, CMat) {
    let n = space.dim();
    let s = linalg::identity(n) + gaussian_matrix(n, n, rng) * c64(0.3 / (n as f64).sqrt(), 0.0);
    let d = CMat::from_fn(n, n, |r, c| {
        if r != c {
            return c64(0.0, 0.0);
        }
        let re = (r as f64) * 0.37 - 1.0;
        let im = 0.5 + 0.1 * r as f64;
        if r < k_lower {
            c64(re, -im)
        } else {
            c64(re, im)
        }
    });
    let s_inv = s
        .clone()
        .try_inverse()
        .expect("near-identity matrix is invertible");
    let a = BlockOperator {
        space,
        matrix: &s * d * s_inv,
    };
    let lower = s.columns(0, k_lower).into_owned();
    let upper = s.columns(k_lower, n - k_lower).into_owned();
    (a, lower, upper)
}

/// J-selfadjoint operator containing the nilpotent block `[[1, 1], [-1, -1]]`
/// on the first negative and first positive coordinates, whose only
/// eigenvector `(1, -1)` is neutral. Remaining coordinates get distinct real
/// diagonal entries.
pub fn neutral_jordan(space: IndefiniteSpace) -> Result<BlockOperator> {
    let (k, m) = (space.n_minus(), space.n_plus());
    if k == 0 || m == 0 {
        return Err(Error::InvalidDimensions("need n- >= 1 and n+ >= 1".into()));
    }
    let n = space.dim();
    let mut a = CMat::zeros(n, n);
    let mut value = 2.0;
    for i in 0..n {
        if i != 0 && i != k {
            a[(i, i)] = c64(value, 0.0);
            value += 1.0;
        }
    }
    a[(0, 0)] = c64(1.0, 0.0);
    a[(0, k)] = c64(1.0, 0.0);
    a[(k, 0)] = c64(-1.0, 0.0);
    a[(k, k)] = c64(-1.0, 0.0);
    BlockOperator::new(space, a)
}

/// Strongly dissipative `A = J(S + i/2)` whose couplings decay
/// geometrically along the positive coordinates: `S_ij = g_ij w_i w_j` with
/// `w = 1` on H- and `w = q^p` for the p-th positive coordinate.
pub fn decaying_corner<R: Rng + ?Sized>(
    space: IndefiniteSpace,
    q: f64,
    rng: &mut R,
) -> BlockOperator {
    let n = space.dim();
    let k = space.n_minus();
    let weight = |i: usize| if i < k { 1.0 } else { q.powi((i - k) as i32) };
    let g = gaussian_matrix(n, n, rng);
    let mut s = CMat::from_fn(n, n, |r, c| g[(r, c)] * weight(r) * weight(c));
    for i in 0..n {
        s[(i, i)] = c64(rng.random::<f64>() * 4.0 - 2.0, 0.0);
    }
    let s = linalg::hermitian_part(&s) + linalg::identity(n) * c64(0.0, 0.5);
    BlockOperator {
        space,
        matrix: space.apply_j_left(&s),
    }
}

/// Point of the open ball with norm exactly `radius`.
pub fn random_ball_point<R: Rng + ?Sized>(
    space: IndefiniteSpace,
    radius: f64,
    rng: &mut R,
) -> BallPoint {
    let g = gaussian_matrix(space.n_plus(), space.n_minus(), rng);
    let norm = linalg::op_norm(&g);
    let matrix = if norm > 0.0 {
        g * c64(radius / norm, 0.0)
    } else {
        g
    };
    BallPoint { space, matrix }
}

/// Point with norm drawn uniformly from `[0, max_radius)`.
pub fn random_ball_point_within<R: Rng + ?Sized>(
    space: IndefiniteSpace,
    max_radius: f64,
    rng: &mut R,
) -> BallPoint {
    let r = rng.random::<f64>() * max_radius;
    random_ball_point(space, r, rng)
}

/// `M_A diag(U-, U+)` with `‖A‖ < max_radius` and Haar unitaries: a generic
/// J-unitary operator.
pub fn random_j_unitary<R: Rng + ?Sized>(
    space: IndefiniteSpace,
    max_radius: f64,
    rng: &mut R,
) -> BlockOperator {
    let a = random_ball_point_within(space, max_radius, rng);
    let m = ball::mobius_matrix(&a).expect("strict by construction");
    let u = linalg::block_diag(
        &random_unitary(space.n_minus(), rng),
        &random_unitary(space.n_plus(), rng),
    );
    BlockOperator {
        space,
        matrix: m.matrix * u,
    }
}

/// An irreducible unitary representation in some orthonormal basis.
#[derive(Debug, Clone)]
pub struct Irrep {
    pub dim: usize,
    pub matrices: Vec<CMat>,
    pub character: Vec<Complex64>,
}

/// One representative of every irreducible unitary representation of a
/// finite group.
///
/// A generic Hermitian element of the commutant of the left-regular
/// representation has eigenspaces that are irreducible invariant subspaces;
/// compressing the regular representation onto them and deduplicating by
/// character gives the irreps in random bases.
pub fn irreps<R: Rng + ?Sized>(group: &FiniteGroup, rng: &mut R) -> Vec<Irrep> {
    let m = group.order();
    let regular: Vec<CMat> = (0..m).map(|g| group.left_regular(g)).collect();
    let x = random_hermitian(m, rng);
    let mut comm = CMat::zeros(m, m);
    for l in &regular {
        comm += l * &x * l.adjoint();
    }
    let eig = linalg::eigh(&comm);
    let scale = eig
        .values
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);

    let mut found: Vec<Irrep> = Vec::new();
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && eig.values[end] - eig.values[end - 1] < 1e-8 * scale {
            end += 1;
        }
        let basis = eig.vectors.columns(start, end - start).into_owned();
        let matrices: Vec<CMat> = regular
            .iter()
            .map(|l| basis.adjoint() * l * &basis)
            .collect();
        let character: Vec<Complex64> = matrices.iter().map(|u| u.trace()).collect();
        let dup = found.iter().any(|f| {
            f.dim == end - start
                && f.character
                    .iter()
                    .zip(&character)
                    .all(|(a, b)| (a - b).norm() < 1e-6)
        });
        if !dup {
            found.push(Irrep {
                dim: end - start,
                matrices,
                character,
            });
        }
        start = end;
    }
    found.sort_by_key(|i| i.dim);
    found
}

/// Direct sum of the listed irreps, conjugated by a Haar unitary.
pub fn unitary_rep_from<R: Rng + ?Sized>(
    group: &FiniteGroup,
    parts: &[&Irrep],
    rng: &mut R,
) -> Vec<CMat> {
    let dim: usize = parts.iter().map(|p| p.dim).sum();
    let q = random_unitary(dim, rng);
    (0..group.order())
        .map(|g| {
            let mut blocks = CMat::zeros(dim, dim);
            let mut off = 0;
            for p in parts {
                blocks
                    .view_mut((off, off), (p.dim, p.dim))
                    .copy_from(&p.matrices[g]);
                off += p.dim;
            }
            &q * blocks * q.adjoint()
        })
        .collect()
}

// Fills `dim` with random irreps from `pool`; the pool must contain a 1-dim
// irrep so every dimension is reachable.
fn fill_dimension<'a, R: Rng + ?Sized>(
    pool: &[&'a Irrep],
    dim: usize,
    rng: &mut R,
) -> Vec<&'a Irrep> {
    let mut out = Vec::new();
    let mut left = dim;
    while left > 0 {
        let fits: Vec<&Irrep> = pool.iter().copied().filter(|p| p.dim <= left).collect();
        let pick = fits[rng.random_range(0..fits.len())];
        left -= pick.dim;
        out.push(pick);
    }
    out
}

/// Conjugated-representation fixture `π(g) = M_A diag(u-(g), u+(g)) M_{-A}`
/// with unitary blocks drawn from disjoint sets of irreps, so that the
/// common fixed point of the induced ball maps is exactly `A`.
pub fn conjugated_rep_fixture<R: Rng + ?Sized>(
    group: &FiniteGroup,
    space: IndefiniteSpace,
    radius: f64,
    rng: &mut R,
) -> Result<(GroupRep, BallPoint)> {
    let all = irreps(group, rng);
    let linear: Vec<&Irrep> = all.iter().filter(|i| i.dim == 1).collect();
    if linear.len() < 2 {
        return Err(Error::InvalidGroup(
            "fixture needs at least two one-dimensional irreps".into(),
        ));
    }
    // Split the irreps into two classes, each holding a 1-dim irrep.
    let pivot = rng.random_range(1..linear.len());
    let mut minus_pool: Vec<&Irrep> = vec![linear[0]];
    let mut plus_pool: Vec<&Irrep> = vec![linear[pivot]];
    for (i, irrep) in all.iter().enumerate() {
        if std::ptr::eq(irrep, linear[0]) || std::ptr::eq(irrep, linear[pivot]) {
            continue;
        }
        if (i + rng.random_range(0..2)) % 2 == 0 {
            minus_pool.push(irrep);
        } else {
            plus_pool.push(irrep);
        }
    }
    let minus_parts = fill_dimension(&minus_pool, space.n_minus(), rng);
    let plus_parts = fill_dimension(&plus_pool, space.n_plus(), rng);
    let u_minus = unitary_rep_from(group, &minus_parts, rng);
    let u_plus = unitary_rep_from(group, &plus_parts, rng);
    let a = random_ball_point(space, radius, rng);
    let rep = crate::fixpoint::fixture_conjugated_rep(group, &u_plus, &u_minus, &a)?;
    Ok((rep, a))
}

/// `φ(g) = (u(g)x, x)` for a random vector of the left-regular
/// representation: a positive-definite function whose Gram matrix is
/// generically of full rank.
pub fn random_pd_function<R: Rng + ?Sized>(group: &FiniteGroup, rng: &mut R) -> GroupFunction {
    let m = group.order();
    let x = gaussian_matrix(m, 1, rng);
    matrix_coefficient(
        group,
        &(0..m).map(|g| group.left_regular(g)).collect::<Vec<_>>(),
        &x,
    )
}

/// `φ(g) = (u(g)x, x) = x* u(g) x`.
pub fn matrix_coefficient(group: &FiniteGroup, rep: &[CMat], x: &CMat) -> GroupFunction {
    let values = rep.iter().map(|u| (x.adjoint() * u * x)[(0, 0)]).collect();
    GroupFunction {
        group: group.clone(),
        values,
    }
}

// Positions of a subset of `dims` adding up to `target`, preferring early
// positions.
fn subset_with_sum(dims: &[usize], target: usize) -> Option<Vec<usize>> {
    // reachable[i][t]: some subset of dims[i..] sums to t
    let n = dims.len();
    let mut reachable = vec![vec![false; target + 1]; n + 1];
    reachable[n][0] = true;
    for i in (0..n).rev() {
        for t in 0..=target {
            reachable[i][t] =
                reachable[i + 1][t] || (dims[i] <= t && reachable[i + 1][t - dims[i]]);
        }
    }
    if !reachable[0][target] {
        return None;
    }
    let mut picked = Vec::new();
    let mut left = target;
    for i in 0..n {
        if dims[i] <= left && reachable[i + 1][left - dims[i]] {
            picked.push(i);
            left -= dims[i];
        }
    }
    Some(picked)
}

/// `φ = φ_pd - c φ_k` where `φ_k` is a matrix coefficient of a sum of
/// distinct irreps of total dimension `k` (Gram rank exactly `k`) and `c`
/// is large enough that the difference has exactly `k` negative squares.
pub fn qpd_fixture<R: Rng + ?Sized>(
    group: &FiniteGroup,
    k: usize,
    rng: &mut R,
) -> Result<(GroupFunction, GroupFunction, GroupFunction)> {
    let pd = random_pd_function(group, rng);
    let all = irreps(group, rng);
    // choose distinct irreps whose dimensions add up to k
    let mut order: Vec<usize> = (0..all.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let dims: Vec<usize> = order.iter().map(|&i| all[i].dim).collect();
    let picked = subset_with_sum(&dims, k).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "cannot build a rank-{k} function from distinct irreps of this group"
        ))
    })?;
    let chosen: Vec<&Irrep> = picked.iter().map(|&p| &all[order[p]]).collect();
    let v = unitary_rep_from(group, &chosen, rng);
    let y = gaussian_matrix(k, 1, rng);
    let low = matrix_coefficient(group, &v, &y);
    let pd_norm = linalg::op_norm(&pd.gram_full());
    let low_eigs = linalg::eigh(&low.gram_full()).values;
    let smallest_nonzero = low_eigs
        .iter()
        .copied()
        .filter(|&v| v > 1e-9)
        .fold(f64::INFINITY, f64::min);
    let c = if k == 0 {
        0.0
    } else {
        2.0 * pd_norm / smallest_nonzero + 1.0
    };
    let scaled = GroupFunction {
        group: group.clone(),
        values: low.values.iter().map(|v| v * c).collect(),
    };
    let phi = GroupFunction {
        group: group.clone(),
        values: pd
            .values
            .iter()
            .zip(&scaled.values)
            .map(|(a, b)| a - b)
            .collect(),
    };
    Ok((phi, pd, scaled))
}
