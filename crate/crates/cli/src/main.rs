use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use presym::defs::Definition;
use presym::pipeline::{self, Direction, Suite};
use presym::{fixtures, Error};

/// Exact verification of pre-symplectic algebroids and related structures.
#[derive(Parser)]
#[command(name = "presym", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites on a definition file.
    Check {
        path: PathBuf,
        /// lsa, algebroid, presym, exact, parakahler or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Write the JSON report to this path (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Include wall time per check.
        #[arg(long)]
        timings: bool,
    },
    /// Emit the definition file of a derived structure.
    Derive {
        path: PathBuf,
        /// to-star, to-bracket, pseudo-semidirect or twist.
        #[arg(long)]
        direction: String,
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Dimensions of the restricted cochain complex.
    Cohomology {
        path: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Maximal total degree of polynomial coefficients on a chart.
        #[arg(long)]
        truncate: Option<u32>,
        /// Dimension of the trivial coefficient module (default: the rank).
        #[arg(long)]
        values: Option<usize>,
        /// Allow degrees above 3.
        #[arg(long)]
        full: bool,
    },
    /// List built-in fixtures, or write one.
    Examples {
        name: Option<String>,
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

/// An error carrying its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure { code: 2, err }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure {
            code: 2,
            err: err.into(),
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Definition> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Definition::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        _ => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn check(path: &Path, suite: &str, json: Option<&Path>, timings: bool) -> Result<u8, Failure> {
    let suite: Suite = suite.parse()?;
    let def = load(path)?;
    let rep = pipeline::run(&def, suite)?;
    match json {
        Some(p) => {
            emit(Some(p), &rep.to_json(timings))?;
            if p != Path::new("-") {
                print!("{}", rep.to_text(timings));
            }
        }
        None => print!("{}", rep.to_text(timings)),
    }
    Ok(if rep.passed() { 0 } else { 1 })
}

fn derive(path: &Path, direction: &str, output: Option<&Path>) -> Result<u8, Failure> {
    let dir: Direction = direction.parse()?;
    let def = load(path)?;
    if !pipeline::applicable(&def, dir) {
        return Err(anyhow!("direction {dir} does not apply to {}", path.display()).into());
    }
    match pipeline::derive(&def, dir) {
        Ok(out) => {
            emit(output, &out.to_psa())?;
            Ok(0)
        }
        Err(e @ Error::Precondition(_)) => Err(Failure {
            code: 1,
            err: e.into(),
        }),
        Err(e) => Err(e.into()),
    }
}

fn cohomology(
    path: &Path,
    degree: usize,
    truncate: Option<u32>,
    values: Option<usize>,
    full: bool,
) -> Result<u8, Failure> {
    if degree == 0 || (degree > 3 && !full) {
        return Err(anyhow!("degree must be 1, 2 or 3 (pass --full for higher degrees)").into());
    }
    let def = load(path)?;
    let lsa = pipeline::poly_lsa(&def)?;
    let d = match (lsa.coords, truncate) {
        (0, t) => t.unwrap_or(0),
        (_, Some(t)) => t,
        (_, None) => return Err(anyhow!("a chart needs --truncate <degree>").into()),
    };
    let k = values.unwrap_or(lsa.rank);
    let dims = lsa.restricted_dims(degree, k, d);
    println!(
        "degree {}: cochains {}, ker {}, im {}, H~ {}{}",
        dims.degree,
        dims.cochains,
        dims.kernel,
        dims.image,
        dims.cohomology,
        if dims.subcomplex {
            ""
        } else {
            " (coboundary leaves the restricted space)"
        }
    );
    Ok(0)
}

fn examples(name: Option<&str>, output: Option<&Path>) -> Result<u8, Failure> {
    match name {
        None => {
            for n in fixtures::NAMES {
                println!("{n}");
            }
        }
        Some(n) => {
            let Some(text) = fixtures::get(n) else {
                return Err(
                    anyhow!("unknown fixture `{n}`; run `presym examples` for the list").into(),
                );
            };
            emit(output, &text)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check {
            path,
            suite,
            json,
            timings,
        } => check(path, suite, json.as_deref(), *timings),
        Command::Derive {
            path,
            direction,
            output,
        } => derive(path, direction, output.as_deref()),
        Command::Cohomology {
            path,
            degree,
            truncate,
            values,
            full,
        } => cohomology(path, *degree, *truncate, *values, *full),
        Command::Examples { name, output } => examples(name.as_deref(), output.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
