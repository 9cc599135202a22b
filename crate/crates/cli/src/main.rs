//! `lieforge` command-line interface. Every subcommand prints one JSON
//! document (`"schema": 1`) on stdout; files are written only where a path is
//! given.
//!
//! Exit codes: 0 on success, 2 when a verification fails, 1 on usage or
//! runtime errors.

mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "lieforge",
    version,
    about = "Lie point symmetries and travelling-wave reductions of the complex Burgers hierarchy"
)]
struct Cli {
    /// Seed for randomised zero tests (also read from LIEFORGE_SEED; default 42).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print wall-clock time to stderr.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a hierarchy member from the recursion operators, optionally
    /// split into the real system for u = v + i w.
    Member {
        /// Member index, starting at 1 for u_t = -u_x.
        #[arg(long)]
        k: usize,
        #[arg(long)]
        split: bool,
    },
    /// Compare the generated real system of member k with the published one,
    /// term by term. Exits 2 when they differ.
    Audit {
        #[arg(long)]
        k: usize,
    },
    /// Find or verify point symmetries of the hierarchy members and of the
    /// reduced wave systems.
    #[command(subcommand)]
    Symmetries(SymmetryCommand),
    /// Structure constants of the published generators, with closure and
    /// Jacobi checks and a comparison against the published bracket tables.
    Brackets(AlgebraArgs),
    /// Derived and lower central series, centre and abelian summand of the
    /// generator algebra.
    Classify(AlgebraArgs),
    /// Travelling-wave reduction x - c t of a member, optionally lowered to
    /// first derivatives and, for member 2, eliminated to one equation in F.
    Reduce {
        #[arg(long)]
        member: usize,
        /// Wave speed: a number or an expression in the parameter c.
        #[arg(long, default_value = "c")]
        c: String,
        #[arg(long)]
        order_reduce: bool,
        /// Eliminate G from the first-order member 2 system.
        #[arg(long)]
        eliminate: bool,
    },
    /// Substitute a closed-form solution into a reduced system, exactly or at
    /// sample points. Exits 2 when the residual is not zero.
    VerifySolution(VerifySolutionArgs),
    /// Integrate a reduced system with fixed-step RK4 from the initial values
    /// of a closed-form solution, reporting the deviation from it.
    Integrate(IntegrateArgs),
    /// Sample the rational-exponential wave profiles for several F1 and
    /// check their period and oscillation count; one CSV per F1.
    Fig1(Fig1Args),
}

#[derive(Subcommand, Debug)]
enum SymmetryCommand {
    /// Solve the determining equations over a finite ansatz of polynomial,
    /// trigonometric and exponential coefficients. Exits 2 when a basis
    /// field fails verification.
    Find {
        #[arg(long)]
        member: usize,
        /// Total degree of the polynomial part.
        #[arg(long)]
        degree: Option<usize>,
        /// Highest trigonometric harmonic in v.
        #[arg(long)]
        trig: Option<usize>,
        /// Highest exponential power in w.
        #[arg(long)]
        expw: Option<usize>,
        /// Also use the trigonometric and exponential factors on the xi slots.
        #[arg(long)]
        trig_on_xi: Option<bool>,
    },
    /// Check generators by prolongation and by characteristics. Without
    /// --field the published generators of the target are used. Exits 2
    /// when any generator fails.
    Verify {
        #[command(flatten)]
        target: Target,
        /// Generator text, e.g. "xi_t = t; xi_x = x/2" (repeatable).
        #[arg(long)]
        field: Vec<String>,
        /// Use the infinite family of member 2 or 3 instead.
        #[arg(long)]
        family: bool,
    },
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct Target {
    /// Hierarchy member 1 to 4.
    #[arg(long)]
    member: Option<usize>,
    /// Reduced system: member2-wave, member2-first-order, member3-wave,
    /// member3-reduced, member4-wave or second-order-f.
    #[arg(long)]
    system: Option<String>,
}

#[derive(Args, Debug)]
struct AlgebraArgs {
    #[arg(long)]
    member: usize,
    /// Use the generators of the travelling-wave system instead.
    #[arg(long)]
    reduced: bool,
}

/// Numeric parameter bindings shared by the solution commands.
#[derive(Args, Debug, Clone, Default)]
struct Params {
    #[arg(long)]
    c: Option<f64>,
    #[arg(long = "F0")]
    f0_upper: Option<f64>,
    #[arg(long = "F1")]
    f1_upper: Option<f64>,
    #[arg(long = "G0")]
    g0_upper: Option<f64>,
    #[arg(long = "G1")]
    g1_upper: Option<f64>,
    /// Phase of the tangent solution.
    #[arg(long)]
    s0: Option<f64>,
    /// Elliptic modulus.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    f0: Option<f64>,
    #[arg(long)]
    f1: Option<f64>,
    #[arg(long)]
    g0: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifySolutionArgs {
    /// tan, rational-exp, rational-trig, sn or linear.
    #[arg(long)]
    solution: String,
    /// Reduced system; defaults to the one the solution belongs to.
    #[arg(long)]
    system: Option<String>,
    /// symbolic or numeric; defaults to symbolic when the solution has no
    /// special functions or reciprocals.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Sample interval `lo:hi` (default 0:2pi).
    #[arg(long)]
    range: Option<String>,
    #[command(flatten)]
    params: Params,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    #[arg(long)]
    system: String,
    /// Closed-form solution supplying the initial values.
    #[arg(long)]
    from: String,
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Interval `a:b`.
    #[arg(long, default_value = "0:2")]
    range: String,
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
    #[command(flatten)]
    params: Params,
}

#[derive(Args, Debug)]
struct Fig1Args {
    #[arg(long)]
    c: f64,
    #[arg(long = "F0", default_value_t = 1.0)]
    f0: f64,
    #[arg(long = "F1", value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0])]
    f1: Vec<f64>,
    /// Base path; one file `<stem>_F1_<value>.csv` is written per F1.
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
    /// Number of periods 2 pi/c to sample.
    #[arg(long, default_value_t = 2.0)]
    periods: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(seed) = cli.seed {
        std::env::set_var("LIEFORGE_SEED", seed.to_string());
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let start = Instant::now();
    let outcome = commands::run(&cli.command);
    if cli.timings {
        eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    }
    match outcome {
        Ok(out) => {
            match serde_json::to_string_pretty(&out.json) {
                Ok(text) => {
                    let mut stdout = std::io::stdout().lock();
                    if let Err(e) = writeln!(stdout, "{text}") {
                        if e.kind() != std::io::ErrorKind::BrokenPipe {
                            eprintln!("error: {e}");
                            return ExitCode::from(1);
                        }
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            if out.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
