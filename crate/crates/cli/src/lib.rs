//! Command-line front end for `kreinkit`.
//!
//! Every subcommand reads JSON, writes one JSON document and exits with
//! 0 (certified), 1 (uncertified or rejected by the solver) or 2 (input
//! error).

pub mod args;
mod input;

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use kreinkit::ball;
use kreinkit::fixpoint::{self, FixpointOptions};
use kreinkit::fixtures;
use kreinkit::mnps::{self, MnpsOptions};
use kreinkit::qpd;

use args::{BallCommand, Cli, Command, GenCommand, MnpsTolArgs, QpdCommand};

pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_UNCERTIFIED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// What a command produced. Reports get wrapped in an envelope; generated
/// fixtures are written as they are.
#[derive(Debug)]
pub enum Outcome {
    Report { certified: bool, body: Value },
    Fixture(Value),
}

impl Outcome {
    fn report<T: Serialize>(certified: bool, body: &T) -> Result<Outcome> {
        Ok(Outcome::Report {
            certified,
            body: serde_json::to_value(body)?,
        })
    }

    fn rejected(err: &kreinkit::Error) -> Outcome {
        let reason = match err {
            kreinkit::Error::NotDissipative { .. } => "not J-dissipative".to_string(),
            other => other.to_string(),
        };
        Outcome::Report {
            certified: false,
            body: json!({ "reason": reason, "error": err.to_string() }),
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Mnps(_) => "mnps",
        Command::Ladder(_) => "ladder",
        Command::Ball(BallCommand::Apply { .. }) => "ball apply",
        Command::Ball(BallCommand::Distance { .. }) => "ball distance",
        Command::Ball(BallCommand::Matrix { .. }) => "ball matrix",
        Command::Ball(BallCommand::Norm { .. }) => "ball norm",
        Command::Fixpoint(_) => "fixpoint",
        Command::Unitarize(_) => "unitarize",
        Command::Qpd(QpdCommand::Classify(_)) => "qpd classify",
        Command::Qpd(QpdCommand::Decompose(_)) => "qpd decompose",
        Command::Gen(_) => "gen",
    }
}

/// Runs the command, writes its output and returns the exit code.
pub fn execute(cli: &Cli) -> i32 {
    let outcome = match run(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_INPUT;
        }
    };
    let (document, code) = match outcome {
        Outcome::Fixture(v) => (v, EXIT_CERTIFIED),
        Outcome::Report { certified, body } => {
            let mut doc = json!({
                "command": command_name(&cli.command),
                "certified": certified,
                "report": body,
            });
            if !cli.no_timestamp {
                let secs = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs());
                doc["timestamp"] = json!(secs);
            }
            (
                doc,
                if certified {
                    EXIT_CERTIFIED
                } else {
                    EXIT_UNCERTIFIED
                },
            )
        }
    };
    if let Err(e) = emit(&document, cli.out.as_deref()) {
        eprintln!("error: {e:#}");
        return EXIT_INPUT;
    }
    code
}

fn emit(doc: &Value, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn mnps_options(cli: &Cli, t: &MnpsTolArgs) -> MnpsOptions {
    let mut o = MnpsOptions::default().scaled(cli.tol);
    if let Some(v) = t.tol_res {
        o.tol_res = v;
    }
    if let Some(v) = t.norm_tol {
        o.norm_tol = v;
    }
    if let Some(v) = t.dissipative_tol {
        o.dissipative_tol = v;
    }
    if t.t0.is_some() {
        o.t0 = t.t0;
    }
    if let Some(v) = t.max_iter {
        o.max_iter = v;
    }
    o
}

fn fixpoint_options(cli: &Cli, residual: Option<f64>, unitarity: Option<f64>) -> FixpointOptions {
    let mut o = FixpointOptions::default().scaled(cli.tol);
    if let Some(v) = residual {
        o.residual_tol = v;
    }
    if let Some(v) = unitarity {
        o.unitarity_tol = v;
    }
    o
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Mnps(a) => {
            let op = input::read_operator(&a.input, a.signature.as_deref())?;
            let opts = mnps_options(cli, &a.tols);
            match mnps::mnps(&op, &opts) {
                Ok(r) => Outcome::report(r.certified, &r),
                Err(e) => Ok(Outcome::rejected(&e)),
            }
        }
        Command::Ladder(a) => {
            let op = input::read_operator(&a.input, a.signature.as_deref())?;
            let levels = input::parse_levels(&a.levels, op.space)?;
            let opts = mnps_options(cli, &a.tols);
            match mnps::approximation_ladder(&op, &levels, &opts) {
                Ok(r) => {
                    let check = mnps::verify_mnps(&op, &r.final_w, opts.norm_tol)?;
                    let final_ok = r.levels.last().is_some_and(|l| l.certified)
                        && check.maximal_nonpositive
                        && check.inertia.n_pos == 0
                        && check.residual <= opts.tol_res * op.norm();
                    let deltas: Vec<Option<f64>> =
                        r.levels.iter().map(|l| l.delta_to_previous).collect();
                    Outcome::report(
                        final_ok,
                        &json!({ "ladder": r, "deltas": deltas, "final_check": check }),
                    )
                }
                Err(e) => Ok(Outcome::rejected(&e)),
            }
        }
        Command::Ball(b) => run_ball(cli, b),
        Command::Fixpoint(a) | Command::Unitarize(a) => {
            let group = input::read_group(&a.group)?;
            let rep = input::read_rep(&a.input, group)?;
            let opts = fixpoint_options(cli, a.residual_tol, a.unitarity_tol);
            let diagnostics = fixpoint::rep_validate(&rep, 1e-9 * cli.tol);
            if !diagnostics.valid {
                return Outcome::report(
                    false,
                    &json!({
                        "reason": "representation is not a J-unitary homomorphism",
                        "diagnostics": diagnostics,
                    }),
                );
            }
            let unitarize = matches!(cli.command, Command::Unitarize(_));
            let result = if unitarize {
                fixpoint::unitarize(&rep, &opts).map(|r| (r.certified, serde_json::to_value(r)))
            } else {
                fixpoint::common_fixed_point(&rep, &opts)
                    .map(|r| (r.certified, serde_json::to_value(r)))
            };
            match result {
                Ok((certified, report)) => {
                    let report = report?;
                    Outcome::report(
                        certified,
                        &json!({ "diagnostics": diagnostics, "result": report }),
                    )
                }
                Err(e) => Ok(Outcome::rejected(&e)),
            }
        }
        Command::Qpd(QpdCommand::Classify(a)) => {
            let group = input::read_group(&a.group)?;
            let phi = input::read_function(&a.input, group)?;
            Outcome::report(true, &qpd::classify(&phi))
        }
        Command::Qpd(QpdCommand::Decompose(a)) => {
            let group = input::read_group(&a.group)?;
            let phi = input::read_function(&a.input, group)?;
            let opts = fixpoint_options(cli, None, None);
            let tol = a.reconstruction_tol.unwrap_or(1e-8 * cli.tol);
            match qpd::decompose(&phi, &opts, tol) {
                Ok(d) => Outcome::report(
                    d.certificate.passed,
                    &json!({
                        "phi1": d.phi1.to_file(),
                        "phi2": d.phi2.to_file(),
                        "certificate": d.certificate,
                        "gns_dimension": d.gns.p,
                        "signs": d.gns.signs,
                    }),
                ),
                Err(e) => Ok(Outcome::rejected(&e)),
            }
        }
        Command::Gen(g) => run_gen(cli, g),
    }
}

fn run_ball(cli: &Cli, cmd: &BallCommand) -> Result<Outcome> {
    let checked = |r: kreinkit::Result<Outcome>| -> Result<Outcome> {
        Ok(r.unwrap_or_else(|e| Outcome::rejected(&e)))
    };
    match cmd {
        BallCommand::Apply { a, x } => {
            let (a, x) = (input::read_ball_point(a)?, input::read_ball_point(x)?);
            checked(ball::mobius_apply(&a, &x).map(|p| {
                let norm = p.norm();
                Outcome::Report {
                    certified: true,
                    body: json!({ "result": p, "norm": norm }),
                }
            }))
        }
        BallCommand::Distance { a, b } => {
            let (a, b) = (input::read_ball_point(a)?, input::read_ball_point(b)?);
            checked(ball::hyperbolic_distance(&a, &b).map(|d| Outcome::Report {
                certified: true,
                body: json!({ "distance": d }),
            }))
        }
        BallCommand::Matrix { a } => {
            let a = input::read_ball_point(a)?;
            checked(ball::mobius_matrix(&a).map(|m| {
                let defect = m.j_unitarity_defect();
                let ok = defect <= 1e-9 * cli.tol * m.norm().powi(2).max(1.0);
                Outcome::Report {
                    certified: ok,
                    body: json!({ "matrix": m, "j_unitarity_defect": defect }),
                }
            }))
        }
        BallCommand::Norm { a } => {
            let a = input::read_ball_point(a)?;
            checked(ball::mobius_norm(&a).map(|n| {
                let slack = 1e-10 * cli.tol;
                let ok = n.lower_bound - slack <= n.norm && n.norm <= n.upper_bound + slack;
                Outcome::Report {
                    certified: ok,
                    body: json!(n),
                }
            }))
        }
    }
}

fn run_gen(cli: &Cli, cmd: &GenCommand) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let value = match cmd {
        GenCommand::Dissipative { signature, rank } => {
            let space = input::parse_signature(signature)?;
            let rank = rank.unwrap_or(space.dim());
            anyhow::ensure!(
                rank <= space.dim(),
                "rank {rank} exceeds the dimension {}",
                space.dim()
            );
            serde_json::to_value(fixtures::random_dissipative(space, rank, &mut rng))?
        }
        GenCommand::Decaying { signature, q } => {
            let space = input::parse_signature(signature)?;
            anyhow::ensure!(*q > 0.0 && *q <= 1.0, "q must lie in (0, 1]");
            serde_json::to_value(fixtures::decaying_corner(space, *q, &mut rng))?
        }
        GenCommand::ConjugatedRep {
            group,
            signature,
            radius,
            group_out,
        } => {
            let g = input::read_group(group)?;
            let space = input::parse_signature(signature)?;
            anyhow::ensure!((0.0..1.0).contains(radius), "radius must lie in [0, 1)");
            let (rep, a) = fixtures::conjugated_rep_fixture(&g, space, *radius, &mut rng)?;
            if let Some(path) = group_out {
                write_atomic(path, (serde_json::to_string_pretty(&g)? + "\n").as_bytes())?;
            }
            let mut v = serde_json::to_value(rep.to_file())?;
            v["fixed_point"] = serde_json::to_value(a)?;
            v
        }
        GenCommand::Qpd {
            group,
            k,
            group_out,
        } => {
            let g = input::read_group(group)?;
            let (phi, _, _) = fixtures::qpd_fixture(&g, *k, &mut rng)?;
            if let Some(path) = group_out {
                write_atomic(path, (serde_json::to_string_pretty(&g)? + "\n").as_bytes())?;
            }
            let mut v = serde_json::to_value(phi.to_file())?;
            v["negative_squares"] = json!(qpd::negative_squares(&phi));
            v
        }
        GenCommand::Group { name } => {
            serde_json::to_value(kreinkit::group::FiniteGroup::by_name(name)?)?
        }
    };
    Ok(Outcome::Fixture(value))
}
