use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fgl_cli::{run, Command, Format, JobSpec, DEFAULT_SEED};

/// Formal group laws of elliptic curves over small finite fields.
#[derive(Parser)]
#[command(name = "fgl", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Series precision: terms of total degree below this are kept.
    #[arg(long, global = true)]
    prec: Option<usize>,
    /// Multiplier for mult-by-n.
    #[arg(long, global = true, allow_hyphen_values = true)]
    n: Option<i64>,
    /// Degree of the solve field over the base field (default: grown until
    /// every Artin-Schreier step splits).
    #[arg(long = "solve-degree", global = true)]
    solve_degree: Option<u32>,
    /// Number of relations to solve.
    #[arg(long, global = true)]
    bound: Option<usize>,
    /// Seed for sampled runs.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Expansion of the formal group law F(X,Y) of a curve.
    GroupLaw { curve: PathBuf },
    /// Check identity, commutativity and associativity of F.
    VerifyAxioms { curve: PathBuf },
    /// The multiplication-by-n series [n](t); needs --n.
    MultByN { curve: PathBuf },
    /// The formal inverse i(t).
    Negate { curve: PathBuf },
    /// Ordinary or supersingular, from the height of [p].
    Classify { curve: PathBuf },
    /// Trace of Frobenius modulo p, from the formal group.
    TraceModP { curve: PathBuf },
    /// Exhaustive point count with the formal-group invariants.
    CountPoints { curve: PathBuf },
    /// Power series of an isogeny given as (f1, f2, f3) in X, Y, Z.
    ExpandIsogeny { isogeny: PathBuf },
    /// Enumerate the truncations (u_1, .., u_bound) of homomorphisms from
    /// the source law to the target law (default: the source itself).
    CouveignesSolve {
        source: PathBuf,
        target: Option<PathBuf>,
    },
    /// Extend and check every solution of a couveignes-solve document to
    /// degree --prec.
    CouveignesCertify {
        source: PathBuf,
        /// Target curve, then the solutions document; with a single file the
        /// target is the source.
        #[arg(num_args = 1..=2, required = true)]
        files: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, files) = match cli.command {
        Cmd::GroupLaw { curve } => (Command::GroupLaw, vec![curve]),
        Cmd::VerifyAxioms { curve } => (Command::VerifyAxioms, vec![curve]),
        Cmd::MultByN { curve } => (Command::MultByN, vec![curve]),
        Cmd::Negate { curve } => (Command::Negate, vec![curve]),
        Cmd::Classify { curve } => (Command::Classify, vec![curve]),
        Cmd::TraceModP { curve } => (Command::TraceModP, vec![curve]),
        Cmd::CountPoints { curve } => (Command::CountPoints, vec![curve]),
        Cmd::ExpandIsogeny { isogeny } => (Command::ExpandIsogeny, vec![isogeny]),
        Cmd::CouveignesSolve { source, target } => (
            Command::CouveignesSolve,
            std::iter::once(source).chain(target).collect(),
        ),
        Cmd::CouveignesCertify { source, files } => (
            Command::CouveignesCertify,
            std::iter::once(source).chain(files).collect(),
        ),
    };
    let o = cli.opts;
    let spec = JobSpec {
        command,
        files,
        prec: o.prec,
        n: o.n,
        solve_degree: o.solve_degree,
        bound: o.bound,
        seed: o.seed,
        threads: o.threads,
        format: match o.format {
            Fmt::Json => Format::Json,
            Fmt::Text => Format::Text,
        },
        out: o.out,
    };
    let outcome = run(&spec);
    if spec.out.is_none() {
        let _ = std::io::stdout().write_all(outcome.output.as_bytes());
    }
    if let Some(msg) = &outcome.diagnostic {
        eprintln!("fgl: {msg}");
    }
    ExitCode::from(outcome.code as u8)
}
