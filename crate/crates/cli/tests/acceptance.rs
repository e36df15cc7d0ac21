//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any of them fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use kreinkit::ball;
use kreinkit::fixpoint::{self, FixpointOptions};
use kreinkit::fixtures;
use kreinkit::group::FiniteGroup;
use kreinkit::linalg::{c64, identity, op_norm};
use kreinkit::mnps::{self, MnpsOptions};
use kreinkit::qpd::{self, GroupFunction};
use kreinkit::{
    invariance_residual, BallPoint, BlockOperator, CMat, Complex64, Error, IndefiniteSpace,
    Subspace,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn space(k: usize, m: usize) -> IndefiniteSpace {
    IndefiniteSpace::new(k, m).unwrap()
}

fn within(elapsed: Duration, budget_secs: u64) -> Outcome {
    if elapsed.as_secs_f64() < budget_secs as f64 {
        Ok(format!("{:.2}s of {budget_secs}s", elapsed.as_secs_f64()))
    } else {
        Err(format!(
            "took {:.2}s, budget {budget_secs}s",
            elapsed.as_secs_f64()
        ))
    }
}

fn first_failure<T>(failures: Vec<(T, String)>) -> Outcome
where
    T: std::fmt::Debug,
{
    match failures.first() {
        None => Ok(String::new()),
        Some((id, why)) => Err(format!("{} failures, first {id:?}: {why}", failures.len())),
    }
}

// Eigenvalues of the Hermitian part of the Gram matrix `φ(g_i⁻¹ g_j)`,
// built straight from the Cayley table.
fn gram_eigenvalues(phi: &GroupFunction) -> (Vec<f64>, f64) {
    let g = &phi.group;
    let m = g.order();
    let gram = CMat::from_fn(m, m, |i, j| phi.values[g.mul(g.inverse(i), j)]);
    let herm = (&gram + gram.adjoint()) * c64(0.5, 0.0);
    let norm = op_norm(&herm);
    (
        herm.symmetric_eigen().eigenvalues.iter().copied().collect(),
        norm,
    )
}

fn crit1_mnps_suite() -> Outcome {
    let start = Instant::now();
    let signatures = [(1, 5), (2, 10), (3, 50), (5, 100)];
    let cases: Vec<(usize, u64)> = (0..signatures.len())
        .flat_map(|s| (0..200).map(move |i| (s, i)))
        .collect();
    let opts = MnpsOptions::default();
    let failures: Vec<((usize, usize, u64), String)> = cases
        .par_iter()
        .filter_map(|&(s, i)| {
            let (k, m) = signatures[s];
            let sp = space(k, m);
            let mut r = rng(1_000 * (s as u64 + 1) + i);
            let rank = r.random_range(1..=sp.dim());
            let a = fixtures::random_dissipative(sp, rank, &mut r);
            let id = (k, m, i);
            let report = match mnps::mnps(&a, &opts) {
                Ok(rep) => rep,
                Err(e) => return Some((id, format!("rank {rank}: {e}"))),
            };
            let w = &report.w;
            let residual = invariance_residual(&a, w).unwrap();
            let inertia = w.graph().signature(2e-8);
            let bad = !report.certified
                || w.norm() > 1.0 + 1e-8
                || residual > 1e-8 * a.norm().max(1.0)
                || inertia.n_pos != 0
                || inertia.dim() != k;
            bad.then(|| {
                (
                    id,
                    format!(
                        "rank {rank}: ‖W‖ {:.3e}, residual {residual:.3e}, inertia {inertia:?}",
                        w.norm()
                    ),
                )
            })
        })
        .collect();
    let detail = first_failure(failures)?;
    within(start.elapsed(), 60).map(|t| format!("800 matrices certified, {t}{detail}"))
}

fn crit2_spectral_definiteness() -> Outcome {
    let signatures = [(1, 5), (2, 10), (3, 50), (5, 100)];
    let failures: Vec<(u64, String)> = (0..100u64)
        .into_par_iter()
        .filter_map(|i| {
            let (k, m) = signatures[i as usize % signatures.len()];
            let a = fixtures::random_strongly_dissipative(space(k, m), &mut rng(20_000 + i));
            let split = match mnps::spectral_split(&a, 1e-13 * a.norm()) {
                Ok(s) => s,
                Err(e) => return Some((i, e.to_string())),
            };
            let tol = 1e-9 * a.norm();
            let minus = split.minus.signature(tol);
            let plus = split.plus.signature(tol);
            let ok = minus.n_neg == k && minus.dim() == k && plus.n_pos == m && plus.dim() == m;
            (!ok).then(|| (i, format!("Z_minus {minus:?}, Z_plus {plus:?}")))
        })
        .collect();
    first_failure(failures).map(|d| format!("100 strongly dissipative splits definite{d}"))
}

fn crit3_mobius_algebra() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for i in 0..500u64 {
        let mut r = rng(30_000 + i);
        let sp = space(r.random_range(1..=4), r.random_range(1..=20));
        let a = fixtures::random_ball_point_within(sp, 0.95, &mut r);
        let x = fixtures::random_ball_point_within(sp, 0.95, &mut r);
        let check = || -> kreinkit::Result<(f64, f64, f64)> {
            let y = ball::mobius_apply(&a, &x)?;
            let back = ball::mobius_apply(&a.neg(), &y)?;
            let m = ball::mobius_matrix(&a)?;
            let via_matrix = ball::fractional_linear(&m, &x, 1e12)?;
            Ok((
                op_norm(&(back.matrix - &x.matrix)),
                op_norm(&(via_matrix.matrix - &y.matrix)),
                m.j_unitarity_defect(),
            ))
        };
        match check() {
            Ok((inv, mat, unit)) if inv <= 1e-10 && mat <= 1e-10 && unit <= 1e-10 => {}
            Ok(d) => failures.push((
                i,
                format!(
                    "inverse {:.3e}, φ_M {:.3e}, J-unitarity {:.3e}",
                    d.0, d.1, d.2
                ),
            )),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    let detail = first_failure(failures)?;
    within(start.elapsed(), 10).map(|t| format!("500 pairs, {t}{detail}"))
}

fn crit4_norm_anchor() -> Outcome {
    let mut failures = Vec::new();
    for i in 0..500u64 {
        let mut r = rng(40_000 + i);
        let sp = space(r.random_range(1..=4), r.random_range(1..=20));
        let a = fixtures::random_ball_point_within(sp, 0.99, &mut r);
        let rad = a.norm();
        let norm = ball::mobius_matrix(&a).map_err(|e| e.to_string())?.norm();
        let lower = ((1.0 + rad * rad) / (1.0 - rad * rad)).sqrt();
        let upper = ((1.0 + rad) / (1.0 - rad)).sqrt();
        if !(lower - 1e-10 <= norm && norm <= upper + 1e-10) {
            failures.push((i, format!("r {rad}: {lower} <= {norm} <= {upper} fails")));
        }
    }
    first_failure(failures)?;
    // scalar points sit on the upper bound
    for (rad, angle) in [(0.6, 0.0), (0.6, 2.1), (0.1, 0.7), (0.35, -1.3), (0.9, 3.0)] {
        let z = Complex64::from_polar(rad, angle);
        let a = BallPoint::new(space(1, 1), CMat::from_element(1, 1, z)).unwrap();
        let norm = ball::mobius_matrix(&a).map_err(|e| e.to_string())?.norm();
        let upper = ((1.0 + rad) / (1.0 - rad)).sqrt();
        if (norm - upper).abs() > 1e-12 {
            return Err(format!("scalar r {rad}: ‖M_A‖ {norm} vs {upper}"));
        }
    }
    let six = BallPoint::new(space(1, 1), CMat::from_element(1, 1, c64(0.6, 0.0))).unwrap();
    let two = ball::mobius_matrix(&six).unwrap().norm();
    if (two - 2.0).abs() > 1e-12 {
        return Err(format!("r = 0.6 gives ‖M_A‖ = {two}"));
    }
    Ok(format!("500 sandwiches hold, r = 0.6 gives {two:.15}"))
}

fn crit5_metric_invariance() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..300u64 {
        let mut r = rng(50_000 + i);
        let sp = space(r.random_range(1..=4), r.random_range(1..=12));
        let u = fixtures::random_j_unitary(sp, 0.9, &mut r);
        let a = fixtures::random_ball_point_within(sp, 0.9, &mut r);
        let b = fixtures::random_ball_point_within(sp, 0.9, &mut r);
        let check = || -> kreinkit::Result<f64> {
            let ua = ball::fractional_linear(&u, &a, 1e12)?;
            let ub = ball::fractional_linear(&u, &b, 1e12)?;
            Ok((ball::hyperbolic_distance(&ua, &ub)? - ball::hyperbolic_distance(&a, &b)?).abs())
        };
        match check() {
            Ok(d) if d <= 1e-8 => worst = worst.max(d),
            Ok(d) => failures.push((i, format!("distance moved by {d:.3e}"))),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    first_failure(failures).map(|d| format!("300 triples, worst {worst:.2e}{d}"))
}

fn crit6_unitarization() -> Outcome {
    let start = Instant::now();
    let groups = ["Z2", "Z4", "S3", "D4", "Q8"];
    let opts = FixpointOptions::default();
    let failures: Vec<(String, String)> = (0..50u64)
        .into_par_iter()
        .filter_map(|i| {
            let name = groups[i as usize % groups.len()];
            let g = FiniteGroup::by_name(name).unwrap();
            let mut r = rng(60_000 + i);
            let k = 1 + (i as usize / groups.len()) % 3;
            let m = r.random_range(1..=4);
            let radius = r.random_range(0.1..0.8);
            let id = format!("{name} ({k},{m}) seed {i}");
            let (rep, a) = match fixtures::conjugated_rep_fixture(&g, space(k, m), radius, &mut r) {
                Ok(f) => f,
                Err(e) => return Some((id, format!("fixture: {e}"))),
            };
            let report = match fixpoint::unitarize(&rep, &opts) {
                Ok(u) => u,
                Err(e) => return Some((id, e.to_string())),
            };
            let k_point = &report.fixed_point.k;
            let k_norm = k_point.norm();
            let rep_norm = rep.norm();
            // recomputed from the returned matrices
            let cond = op_norm(&report.v) * op_norm(&report.v_inv);
            let n = k + m;
            let unitarity = report
                .u
                .iter()
                .map(|u| op_norm(&(u.adjoint() * u - identity(n))))
                .fold(0.0, f64::max);
            let map_residual = (0..g.order())
                .map(|x| {
                    ball::fractional_linear(&rep.operator(x), k_point, 1e12)
                        .map(|y| op_norm(&(y.matrix - &k_point.matrix)))
                        .unwrap_or(f64::INFINITY)
                })
                .fold(0.0, f64::max);
            let radius_bound = ball::radius_from_norm(rep_norm).unwrap() + 1e-8;
            let sharper = (1.0 + k_norm) / (1.0 - k_norm) + 1e-8;
            let distance_to_a = op_norm(&(&k_point.matrix - &a.matrix));
            let ok = report.certified
                && unitarity <= 1e-8
                && cond <= 2.0 * rep_norm * rep_norm + 1.0
                && cond <= sharper
                && map_residual <= 1e-8
                && k_norm <= radius_bound
                && distance_to_a <= 1e-6;
            (!ok).then(|| {
                (
                    id,
                    format!(
                        "certified {}, unitarity {unitarity:.2e}, cond {cond:.4} (‖π‖ {rep_norm:.4}, sharper {sharper:.4}), \
                         residual {map_residual:.2e}, ‖K‖ {k_norm:.4} vs {radius_bound:.4}, ‖K-A‖ {distance_to_a:.2e}",
                        report.certified
                    ),
                )
            })
        })
        .collect();
    let detail = first_failure(failures)?;
    within(start.elapsed(), 30).map(|t| format!("50 fixtures certified, {t}{detail}"))
}

fn crit7_qpd_round_trip() -> Outcome {
    let groups = [
        "Z2", "Z3", "Z4", "Z2xZ2", "Z6", "S3", "D4", "Q8", "Z2xZ2xZ2", "D6", "Z12", "Z2xS3",
        "Q8xZ3", "D12", "S4", "Z24",
    ];
    let opts = FixpointOptions::default();
    let failures: Vec<(String, String)> = (0..100u64)
        .into_par_iter()
        .filter_map(|i| {
            let name = groups[i as usize % groups.len()];
            let g = FiniteGroup::by_name(name).unwrap();
            let mut r = rng(70_000 + i);
            let k = r.random_range(0..=3usize).min(g.order());
            let id = format!("{name} k={k} seed {i}");
            let (phi, _, _) = match fixtures::qpd_fixture(&g, k, &mut r) {
                Ok(f) => f,
                Err(e) => return Some((id, format!("fixture: {e}"))),
            };
            let (eig, norm) = gram_eigenvalues(&phi);
            let zero = 1e-9 * norm.max(1.0);
            let kappa = eig.iter().filter(|&&l| l < -zero).count();
            if kappa != k {
                return Some((id, format!("fixture has {kappa} negative squares")));
            }
            let d = match qpd::decompose(&phi, &opts, 1e-8) {
                Ok(d) => d,
                Err(e) => return Some((id, e.to_string())),
            };
            let (eig1, n1) = gram_eigenvalues(&d.phi1);
            let (eig2, n2) = gram_eigenvalues(&d.phi2);
            let zero = 1e-9 * norm.max(n1).max(n2).max(1.0);
            let pd1 = eig1.iter().all(|&l| l >= -zero);
            let pd2 = eig2.iter().all(|&l| l >= -zero);
            let rank2 = eig2.iter().filter(|&&l| l > zero).count();
            let recon = (0..g.order())
                .map(|x| (phi.values[x] - d.phi1.values[x] + d.phi2.values[x]).norm())
                .fold(0.0, f64::max);
            let ok = d.certificate.passed && pd1 && pd2 && rank2 <= kappa && recon <= 1e-8;
            (!ok).then(|| {
                (
                    id,
                    format!(
                        "certificate {}, φ1 PD {pd1}, φ2 PD {pd2}, rank φ2 {rank2}, reconstruction {recon:.2e}",
                        d.certificate.passed
                    ),
                )
            })
        })
        .collect();
    first_failure(failures)?;

    let z2 = FiniteGroup::cyclic(2).unwrap();
    let phi = GroupFunction::new(z2, vec![c64(1.0, 0.0), c64(2.0, 0.0)]).unwrap();
    let d = qpd::decompose(&phi, &opts, 1e-8).map_err(|e| e.to_string())?;
    let expect = [(&d.phi1.values, [1.5, 1.5]), (&d.phi2.values, [0.5, -0.5])];
    for (got, want) in expect {
        for (z, w) in got.iter().zip(want) {
            if (z - c64(w, 0.0)).norm() > 1e-12 {
                return Err(format!("Z2 example: got {got:?}"));
            }
        }
    }
    Ok("100 fixtures decompose, Z2 example gives (1.5, 1.5) and (0.5, -0.5)".into())
}

fn crit8_ladder() -> Outcome {
    let start = Instant::now();
    let sp = space(4, 396);
    let a = fixtures::decaying_corner(sp, 0.98, &mut rng(80_000));
    let levels: Vec<(usize, usize)> = (1..=9).map(|i| (4, 44 * i)).collect();
    let opts = MnpsOptions::default();
    let ladder = mnps::approximation_ladder(&a, &levels, &opts).map_err(|e| e.to_string())?;
    let deltas: Vec<f64> = ladder
        .levels
        .iter()
        .filter_map(|l| l.delta_to_previous)
        .collect();
    let last3 = &deltas[deltas.len() - 3..];
    let shown: Vec<String> = last3.iter().map(|d| format!("{d:.3e}")).collect();
    let shown = shown.join(", ");
    let full = mnps::verify_mnps(&a, &ladder.final_w, 1e-8).map_err(|e| e.to_string())?;
    let residual = invariance_residual(&a, &ladder.final_w).unwrap();
    let certified = ladder.levels.last().unwrap().certified
        && full.maximal_nonpositive
        && full.inertia.n_pos == 0
        && ladder.final_w.norm() <= 1.0 + 1e-8
        && residual <= 1e-8 * a.norm().max(1.0);
    if !(last3[0] >= last3[1] && last3[1] >= last3[2]) {
        return Err(format!("last deltas [{shown}] are not non-increasing"));
    }
    if !certified {
        return Err(format!(
            "final W does not certify: residual {residual:.3e}, {full:?}"
        ));
    }
    within(start.elapsed(), 120).map(|t| format!("last deltas [{shown}], {t}"))
}

fn kreinkit(args: &[&str]) -> (Option<i32>, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_kreinkit"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code(),
        serde_json::from_slice(&out.stdout).unwrap_or(Value::Null),
    )
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn crit9_negative_controls() -> Outcome {
    // library level
    let sp = space(1, 1);
    let not_dissipative = BlockOperator::new(sp, sp.j() * c64(0.0, -1.0)).unwrap();
    match mnps::mnps(&not_dissipative, &MnpsOptions::default()) {
        Err(Error::NotDissipative { .. }) => {}
        other => return Err(format!("-iJ accepted: {other:?}")),
    }
    let sp2 = space(2, 2);
    let mut basis = CMat::zeros(4, 2);
    basis[(0, 0)] = c64(1.0, 0.0);
    basis[(2, 0)] = c64(0.5, 0.0);
    basis[(3, 1)] = c64(1.0, 0.0);
    let deficient = Subspace::new(sp2, basis).unwrap();
    if deficient.to_ball_point(1e12).is_ok() {
        return Err("graph conversion accepted a singular Z-".into());
    }
    let boundary = BallPoint::new(sp, CMat::from_element(1, 1, c64(1.0, 0.0))).unwrap();
    let zero = BallPoint::zero(sp);
    if ball::mobius_apply(&boundary, &zero).is_ok()
        || ball::mobius_matrix(&boundary).is_ok()
        || ball::mobius_norm(&boundary).is_ok()
    {
        return Err("a boundary point was accepted by a Möbius operation".into());
    }
    let table = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 2, 1]];
    if FiniteGroup::from_table(vec!["e".into(), "a".into(), "b".into()], table, 0).is_ok() {
        return Err("corrupted Cayley table accepted".into());
    }

    // command line
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let op = |re: f64, im: f64| {
        json!({ "space": { "n_minus": 1, "n_plus": 1 }, "matrix": { "rows": 2, "cols": 2,
            "data": [[-re, -im], [0.0, 0.0], [0.0, 0.0], [re, im]] } })
        .to_string()
    };
    let scalar = |x: f64| json!({ "rows": 1, "cols": 1, "data": [[x, 0.0]] }).to_string();
    let good = write(d, "good.json", &op(0.0, 1.0));
    let bad = write(d, "bad.json", &op(0.0, -1.0));
    let garbage = write(d, "garbage.json", "{ \"space\": ");
    let edge = write(d, "edge.json", &scalar(1.0));
    let origin = write(d, "origin.json", &scalar(0.0));
    let group = write(
        d,
        "group.json",
        &json!({ "order": 3, "elements": ["e", "a", "b"], "table": [[0, 1, 2], [1, 2, 0], [2, 2, 1]], "identity": 0 })
            .to_string(),
    );
    let values = write(
        d,
        "values.json",
        &json!({ "values": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]] }).to_string(),
    );

    let checks: Vec<(&str, Vec<&str>, i32)> = vec![
        ("certified mnps", vec!["mnps", "--input", &good], 0),
        ("non-dissipative mnps", vec!["mnps", "--input", &bad], 1),
        ("malformed JSON", vec!["mnps", "--input", &garbage], 2),
        (
            "boundary Möbius apply",
            vec!["ball", "apply", "--a", &edge, "--x", &origin],
            1,
        ),
        (
            "boundary Möbius matrix",
            vec!["ball", "matrix", "--a", &edge],
            1,
        ),
        (
            "corrupted Cayley table",
            vec!["qpd", "classify", "--group", &group, "--input", &values],
            2,
        ),
    ];
    for (what, args, want) in checks {
        let (code, v) = kreinkit(&args);
        if code != Some(want) {
            return Err(format!("{what}: exit {code:?}, expected {want}"));
        }
        if what == "non-dissipative mnps" && v["report"]["reason"] != json!("not J-dissipative") {
            return Err(format!("{what}: reason {}", v["report"]["reason"]));
        }
    }
    Ok("library rejections and exit codes 0/1/2 as expected".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("MNPS certification suite", crit1_mnps_suite),
        ("spectral definiteness", crit2_spectral_definiteness),
        ("Möbius algebra", crit3_mobius_algebra),
        ("Möbius norm anchor", crit4_norm_anchor),
        ("metric invariance", crit5_metric_invariance),
        ("unitarization", crit6_unitarization),
        ("QPD round trip", crit7_qpd_round_trip),
        ("ladder stability", crit8_ladder),
        ("negative controls", crit9_negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} of {} acceptance criteria failed", criteria.len());
        std::process::exit(1);
    }
}
