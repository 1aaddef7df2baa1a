use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use chp_core::bench::{bench, write_csv, BenchConfig};
use chp_core::census::{count_states_formula, enumerate_states};
use chp_core::synth::{canonical_synthesize, minimize, tableau_of};
use chp_core::{inner_product, parse, run_seeded, CircuitProgram, Engine, Error, RunOptions};

#[derive(Parser)]
#[command(name = "chp", version, about = "Stabilizer circuit simulator and synthesis tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Tableau,
    Mixed,
    Beyond,
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Run a CHP program and print the measurement outcomes.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "tableau")]
        engine: EngineArg,
        /// Number of qubits starting in |0> under the mixed engine; the rest
        /// start maximally mixed. Defaults to all of them.
        #[arg(long)]
        rank: Option<usize>,
        /// Measurement limit for product initial states.
        #[arg(long, default_value_t = chp_core::beyond::DEFAULT_MAX_MEASUREMENTS)]
        max_measurements: usize,
        /// Term limit for Pauli-sum simulation.
        #[arg(long, default_value_t = chp_core::beyond::DEFAULT_TERM_CAP)]
        term_cap: usize,
        #[arg(short, long)]
        verbose: bool,
    },
    /// Random-circuit measurement benchmark, written as CSV.
    Bench {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        step: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; standard output when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Rewrite a unitary program in the 11-round H-C-P-C-P-C-H-P-C-P-C form.
    Canonicalize { file: PathBuf },
    /// Canonical form with compressed CNOT and single-qubit rounds.
    Minimize { file: PathBuf },
    /// |<psi|phi>| for the states two unitary programs prepare from |0...0>.
    Innerprod { first: PathBuf, second: PathBuf },
    /// Number of n-qubit pure stabilizer states.
    CountStates { n: usize },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Parse { .. }) => 2,
            Failure::Core(Error::ResourceCap(_)) => 3,
            Failure::Core(Error::Numerical(_)) => 4,
            _ => 1,
        }
    }
}

fn load(path: &Path) -> Result<CircuitProgram, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(parse(&text)?)
}

fn unitary_tableau(path: &Path) -> Result<chp_core::Tableau, Failure> {
    let prog = load(path)?;
    Ok(tableau_of(prog.num_qubits(), &prog.unitary_gates()?)?)
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: io::Error| Failure::Io(e.to_string());
    match cmd {
        Command::Run {
            file,
            seed,
            engine,
            rank,
            max_measurements,
            term_cap,
            verbose,
        } => {
            let prog = load(&file)?;
            let engine = match engine {
                EngineArg::Tableau => Engine::Tableau,
                EngineArg::Mixed => Engine::Mixed {
                    rank: rank.unwrap_or(prog.num_qubits()),
                },
                EngineArg::Beyond => Engine::Beyond,
                EngineArg::Oracle => Engine::Oracle,
            };
            let opts = RunOptions {
                max_measurements,
                term_cap,
            };
            let t = run_seeded(&prog, engine, seed, &opts)?;
            writeln!(out, "{}", t.bits()).map_err(io)?;
            if verbose {
                write!(out, "{}", t.verbose()).map_err(io)?;
            }
        }
        Command::Bench {
            beta,
            n_min,
            n_max,
            step,
            trials,
            seed,
            csv,
        } => {
            let rows = bench(&BenchConfig {
                n_min,
                n_max,
                step,
                beta,
                trials,
                seed,
            })?;
            match csv {
                Some(path) => {
                    let f = fs::File::create(&path)
                        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                    write_csv(&rows, f)?;
                }
                None => write_csv(&rows, out)?,
            }
        }
        Command::Canonicalize { file } => {
            let c = canonical_synthesize(&unitary_tableau(&file)?)?;
            write!(out, "{}", c.to_chp()).map_err(io)?;
        }
        Command::Minimize { file } => {
            let prog = load(&file)?;
            let c = minimize(prog.num_qubits(), &prog.unitary_gates()?)?;
            write!(out, "{}", c.to_chp()).map_err(io)?;
        }
        Command::Innerprod { first, second } => {
            let r = inner_product(&unitary_tableau(&first)?, &unitary_tableau(&second)?)?;
            if r.is_zero {
                writeln!(out, "0").map_err(io)?;
            } else {
                writeln!(out, "{} (2^-{}/2)", r.value, r.s).map_err(io)?;
            }
        }
        Command::CountStates { n } => {
            match count_states_formula(n) {
                Some(v) => writeln!(out, "formula: {v}"),
                None => writeln!(out, "formula: overflow"),
            }
            .map_err(io)?;
            if (1..=3).contains(&n) {
                writeln!(out, "enumerated: {}", enumerate_states(n)?).map_err(io)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(cli.command, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
