use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "kreinkit",
    version,
    about = "Certified computations in indefinite-metric spaces"
)]
pub struct Cli {
    /// Multiplies every tolerance; individual tolerance flags win over it.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tol: f64,

    /// Seed for fixture generation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Leave the timestamp out of the report.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariant maximal non-positive subspace of a J-dissipative matrix.
    Mnps(MnpsArgs),
    /// MNPS of growing compressions of a matrix.
    Ladder(LadderArgs),
    /// Möbius maps and hyperbolic distance on the operator ball.
    #[command(subcommand)]
    Ball(BallCommand),
    /// Common fixed point of a J-unitary group representation.
    Fixpoint(RepArgs),
    /// Similarity making a J-unitary group representation unitary.
    Unitarize(RepArgs),
    /// Quasi-positive-definite functions on a finite group.
    #[command(subcommand)]
    Qpd(QpdCommand),
    /// Seeded input fixtures.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Args)]
pub struct MnpsTolArgs {
    /// Relative invariance residual accepted by the certificate.
    #[arg(long)]
    pub tol_res: Option<f64>,
    /// Accepted excess of ‖W‖ over 1.
    #[arg(long)]
    pub norm_tol: Option<f64>,
    /// Accepted negativity of the dissipativity form, relative to ‖A‖.
    #[arg(long)]
    pub dissipative_tol: Option<f64>,
    /// First regularization parameter.
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MnpsArgs {
    /// Operator JSON (`{"space", "matrix"}`) or a bare matrix with --signature.
    #[arg(long)]
    pub input: PathBuf,
    /// `n_minus,n_plus`, required for bare matrices.
    #[arg(long)]
    pub signature: Option<String>,
    #[command(flatten)]
    pub tols: MnpsTolArgs,
}

#[derive(Debug, Args)]
pub struct LadderArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub signature: Option<String>,
    /// A level count (evenly spaced) or an explicit list `k,m;k,m;...`.
    #[arg(long, default_value = "4")]
    pub levels: String,
    #[command(flatten)]
    pub tols: MnpsTolArgs,
}

#[derive(Debug, Subcommand)]
pub enum BallCommand {
    /// μ_A(X).
    Apply {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        x: PathBuf,
    },
    /// ρ(A, B).
    Distance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// The J-unitary M_A.
    Matrix {
        #[arg(long)]
        a: PathBuf,
    },
    /// ‖M_A‖ with its two-sided bounds.
    Norm {
        #[arg(long)]
        a: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct RepArgs {
    /// Group JSON file, or a name such as Z4, D4, S3, Q8.
    #[arg(long)]
    pub group: String,
    /// Representation JSON (`{"space", "matrices"}`).
    #[arg(long)]
    pub input: PathBuf,
    /// Bound on the fixed-point map residual.
    #[arg(long)]
    pub residual_tol: Option<f64>,
    #[arg(long)]
    pub unitarity_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum QpdCommand {
    /// Negative squares and Gram rank.
    Classify(QpdArgs),
    /// φ = φ1 - φ2 with certificates.
    Decompose(QpdArgs),
}

#[derive(Debug, Args)]
pub struct QpdArgs {
    #[arg(long)]
    pub group: String,
    /// Values JSON (`{"values": [[re, im], ...]}`).
    #[arg(long)]
    pub input: PathBuf,
    /// Relative pointwise reconstruction tolerance.
    #[arg(long)]
    pub reconstruction_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Random J-dissipative matrix `J(S + iP)` with `rank P = rank`.
    Dissipative {
        #[arg(long)]
        signature: String,
        /// Rank of the dissipative part; defaults to full.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Strongly dissipative matrix with geometrically decaying couplings.
    Decaying {
        #[arg(long)]
        signature: String,
        #[arg(long, default_value_t = 0.98)]
        q: f64,
    },
    /// J-unitary representation conjugated by a Möbius matrix.
    ConjugatedRep {
        #[arg(long)]
        group: String,
        #[arg(long)]
        signature: String,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        /// Also write the group JSON here.
        #[arg(long)]
        group_out: Option<PathBuf>,
    },
    /// Function with exactly `k` negative squares.
    Qpd {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        group_out: Option<PathBuf>,
    },
    /// Cayley table of a named group.
    Group {
        #[arg(long)]
        name: String,
    },
}
