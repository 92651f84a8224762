use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hyperwidth::approx::{approx_entry, ApproxOutcome, Mode};
use hyperwidth::cover::{edge_cover_number, fractional_cover_number, CoverMeasure};
use hyperwidth::decomposition::{fhw_width, ghw_width, validate};
use hyperwidth::io::{generate_random, parse_decomposition, parse_hypergraph, parse_rational, serialize_decomposition, serialize_hypergraph};
use hyperwidth::oracle::{exact_fhw, exact_ghw, OracleBudget};
use hyperwidth::ratlp::integer;
use hyperwidth::{Certificate, Error, Hypergraph, Rational};

#[derive(Parser)]
#[command(name = "hyperwidth", version, about = "Approximate and exact hypertree width tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproxMode {
    Ghw4,
    Ghw6,
    Fhw,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactMode {
    Ghw,
    Fhw,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Approximate a decomposition or refuse (width above k).
    Approx {
        #[arg(long, value_parser = rational_arg)]
        k: Rational,
        #[arg(long, value_enum)]
        mode: ApproxMode,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Print recursion statistics to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Compute the exact width of a small hypergraph.
    Exact {
        #[arg(long, value_enum)]
        mode: ExactMode,
        #[arg(long)]
        input: PathBuf,
    },
    /// Check a decomposition against a hypergraph.
    Validate {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        decomposition: PathBuf,
        /// Also require the width to be at most this value.
        #[arg(long, value_parser = rational_arg)]
        check_width: Option<Rational>,
        /// Measure width with fractional covers.
        #[arg(long)]
        fractional: bool,
    },
    /// Edge cover number of a vertex set.
    Cover {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated vertex names.
        #[arg(long)]
        set: String,
        #[arg(long)]
        fractional: bool,
        #[arg(long, value_parser = rational_arg)]
        at_most: Option<Rational>,
    },
    /// Generate a seeded random connected hypergraph.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    /// A negative answer: refusal, invalid decomposition, bound exceeded.
    No,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Hypergraph, Failure> {
    parse_hypergraph(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render_certificate(c: &Certificate) -> String {
    match c {
        Certificate::Integral(c) => c.edges.join(" "),
        Certificate::Fractional(f) => f.weights.iter().map(|(l, w)| format!("{l}={w}")).collect::<Vec<_>>().join(" "),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Approx { k, mode, input, output, stats } => {
            let h = load(&input)?;
            let mode = match mode {
                ApproxMode::Ghw4 => Mode::Ghw4,
                ApproxMode::Ghw6 => Mode::Ghw6,
                ApproxMode::Fhw => Mode::Fhw,
            };
            let (outcome, run_stats) = approx_entry(&h, &k, mode)?;
            if stats {
                eprintln!("{{invocations: {}, depth: {}}}", run_stats.invocations, run_stats.max_depth);
            }
            match outcome {
                ApproxOutcome::Decomposition { td, width, certificates } => {
                    let text = serialize_decomposition(&h, &td, &width, Some(&certificates))?;
                    emit(&text, output.as_deref())
                }
                ApproxOutcome::Refusal { witness, .. } => {
                    println!("NO {}", h.labels_of(&witness).join(" "));
                    Err(Failure::No)
                }
            }
        }
        Command::Exact { mode, input } => {
            let h = load(&input)?;
            let budget = OracleBudget::default();
            let (width, td) = match mode {
                ExactMode::Ghw => {
                    let (w, td) = exact_ghw(&h, &budget)?;
                    (integer(w as i64), td)
                }
                ExactMode::Fhw => exact_fhw(&h, &budget)?,
            };
            emit(&serialize_decomposition(&h, &td, &width, None)?, None)
        }
        Command::Validate { hypergraph, decomposition, check_width, fractional } => {
            let h = load(&hypergraph)?;
            let file = parse_decomposition(&h, &read(&decomposition)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", decomposition.display())))?;
            let report = validate(&h, &file.td);
            if !report.is_valid() {
                print!("invalid\n{}", report.describe(&h));
                return Err(Failure::No);
            }
            let width = if fractional {
                fhw_width(&h, &file.td)?.0
            } else {
                integer(ghw_width(&h, &file.td)?.0 as i64)
            };
            println!("valid width {width}");
            match check_width {
                Some(bound) if width > bound => {
                    println!("width {width} exceeds {bound}");
                    Err(Failure::No)
                }
                _ => Ok(()),
            }
        }
        Command::Cover { input, set, fractional, at_most } => {
            let h = load(&input)?;
            let labels: Vec<&str> = set.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let s = h.set_of(labels)?;
            let (value, cert) = if fractional {
                let (v, w) = fractional_cover_number(&h, &s)?;
                (v, Certificate::Fractional(w))
            } else {
                let (v, c) = edge_cover_number(&h, &s)?;
                (integer(v as i64), Certificate::Integral(c))
            };
            match at_most {
                Some(bound) => {
                    let measure = if fractional { CoverMeasure::Fractional } else { CoverMeasure::Integral };
                    let ok = measure.at_most(&h, &s, &bound)?;
                    println!("{ok}");
                    if ok {
                        Ok(())
                    } else {
                        Err(Failure::No)
                    }
                }
                None => {
                    println!("{value} {}", render_certificate(&cert));
                    Ok(())
                }
            }
        }
        Command::Gen { n, m, rank, seed, output } => {
            let h = generate_random(n, m, rank, seed)?;
            emit(&serialize_hypergraph(&h), output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::No) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
