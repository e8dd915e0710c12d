use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qkul::commands::{EXIT_OK, EXIT_PARSE};
use qkul::{parse_input, run_command, Command, JordanChoice, Settings};
use qkul_core::quat::parse_literal;

#[derive(Parser)]
#[command(name = "qkul", version, about = "Classify PSL(n+1, H) elements and compute their Kulkarni limit sets")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Jordan analysis: numeric, or exact from the declared blocks
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Angle tolerance for rationality detection
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Largest denominator for rational angles
    #[arg(long = "max-den", global = true)]
    max_den: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Orbit length and pushforward exponent
    #[arg(long, global = true)]
    iters: Option<u64>,
    /// Random compact samples pushed forward during verification
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Containment tolerance (default depends on the class)
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Accept unit eigenvalues other than 1 where the catalog states eigenvalue 1
    #[arg(long = "assume-extension", global = true)]
    assume_extension: bool,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Numeric,
    Exact,
}

#[derive(Subcommand)]
enum Cmd {
    /// Catalog row, Jordan blocks and normalization (JSON)
    Classify { input: PathBuf },
    /// Limit set in the input's coordinates (JSON)
    Limitset { input: PathBuf },
    /// Numerical verification report (JSON)
    Verify { input: PathBuf },
    /// Orbit of a point (CSV)
    Orbit {
        input: PathBuf,
        /// Starting point as space-separated quaternion literals (default: random from the seed)
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long)]
        backward: bool,
    },
    /// Limit of normalized powers (JSON)
    Powerlimit {
        input: PathBuf,
        #[arg(long)]
        backward: bool,
    },
}

fn fail(code: i32, msg: &str) -> ExitCode {
    eprintln!("qkul: {msg}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE as u8 } else { EXIT_OK as u8 });
        }
    };
    let (cmd, path, start, backward) = match &cli.command {
        Cmd::Classify { input } => (Command::Classify, input, None, false),
        Cmd::Limitset { input } => (Command::Limitset, input, None, false),
        Cmd::Verify { input } => (Command::Verify, input, None, false),
        Cmd::Orbit { input, start, backward } => (Command::Orbit, input, start.as_deref(), *backward),
        Cmd::Powerlimit { input, backward } => (Command::Powerlimit, input, None, *backward),
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_PARSE, &format!("{}: {e}", path.display())),
    };
    let spec = match parse_input(&text) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_PARSE, &format!("{}: {e}", path.display())),
    };
    let start = match start.map(|s| s.split_whitespace().map(parse_literal).collect::<Result<Vec<_>, _>>()) {
        None => None,
        Some(Ok(v)) => Some(v),
        Some(Err(e)) => return fail(EXIT_PARSE, &format!("--start: {e}")),
    };
    let settings = Settings {
        mode: cli.mode.map(|m| match m {
            Mode::Numeric => JordanChoice::Numeric,
            Mode::Exact => JordanChoice::Exact,
        }),
        tol: cli.tol,
        max_den: cli.max_den,
        seed: cli.seed,
        iters: cli.iters,
        samples: cli.samples,
        eps: cli.eps,
        assume_extension: cli.assume_extension,
        backward,
        start,
    };
    let outcome = run_command(cmd, &spec, &settings);
    if let Some(d) = &outcome.diagnostic {
        eprintln!("qkul: {d}");
    }
    if !outcome.output.is_empty() {
        let written = match &cli.out {
            Some(p) => std::fs::write(p, &outcome.output),
            None => std::io::stdout().write_all(&outcome.output),
        };
        if let Err(e) = written {
            return fail(EXIT_PARSE, &format!("cannot write output: {e}"));
        }
    }
    ExitCode::from(outcome.exit as u8)
}
