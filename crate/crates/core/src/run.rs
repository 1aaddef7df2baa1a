//! Executes a [`CircuitProgram`] on one of the simulation engines.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beyond::{PauliSumState, ProductSimulator, ProductState, DEFAULT_MAX_MEASUREMENTS, DEFAULT_TERM_CAP};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::mixed::MixedTableau;
use crate::oracle::{sample_outcome, DenseState, DensityMatrix};
use crate::program::{CircuitProgram, Instruction};
use crate::tableau::{MeasurementRecord, Tableau};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Pure-state tableau.
    Tableau,
    /// Mixed-state tableau whose first `rank` qubits start in `|0⟩` and the
    /// rest maximally mixed.
    Mixed { rank: usize },
    /// Product-state or Pauli-sum simulation, chosen from the program.
    Beyond,
    /// Dense state vector or density matrix.
    Oracle,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tableau" => Ok(Engine::Tableau),
            "mixed" => Ok(Engine::Mixed { rank: 0 }),
            "beyond" => Ok(Engine::Beyond),
            "oracle" => Ok(Engine::Oracle),
            _ => Err(Error::InvalidInput(format!("unknown engine `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub max_measurements: usize,
    pub term_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_measurements: DEFAULT_MAX_MEASUREMENTS,
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub record: MeasurementRecord,
    /// Probability of reading 0, when the engine computes it.
    pub probability_zero: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Transcript {
    pub steps: Vec<Step>,
}

impl Transcript {
    pub fn outcomes(&self) -> Vec<bool> {
        self.steps.iter().map(|s| s.record.outcome).collect()
    }

    /// Outcome bits as a string of `0`/`1`.
    pub fn bits(&self) -> String {
        self.steps
            .iter()
            .map(|s| if s.record.outcome { '1' } else { '0' })
            .collect()
    }

    /// One line per measurement: `m <qubit> -> <bit> (random|determinate)`.
    pub fn verbose(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            let r = s.record;
            writeln!(
                f,
                "m {} -> {} ({})",
                r.qubit,
                r.outcome as u8,
                if r.deterministic { "determinate" } else { "random" }
            )?;
        }
        Ok(())
    }
}

trait Backend {
    fn gate(&mut self, g: &Gate) -> Result<()>;
    fn unitary(&mut self, u: &DMatrix<Complex64>, qubits: &[usize]) -> Result<()>;
    fn measure(&mut self, a: usize, rng: &mut dyn RngCore) -> Result<Step>;
}

fn no_unitaries() -> Error {
    Error::EngineMismatch("named gates need the beyond or oracle engine".into())
}

impl Backend for Tableau {
    fn gate(&mut self, g: &Gate) -> Result<()> {
        self.apply(g)
    }
    fn unitary(&mut self, _: &DMatrix<Complex64>, _: &[usize]) -> Result<()> {
        Err(no_unitaries())
    }
    fn measure(&mut self, a: usize, rng: &mut dyn RngCore) -> Result<Step> {
        let record = Tableau::measure(self, a, rng)?;
        Ok(Step {
            record,
            probability_zero: None,
        })
    }
}

impl Backend for MixedTableau {
    fn gate(&mut self, g: &Gate) -> Result<()> {
        self.apply(g)
    }
    fn unitary(&mut self, _: &DMatrix<Complex64>, _: &[usize]) -> Result<()> {
        Err(no_unitaries())
    }
    fn measure(&mut self, a: usize, rng: &mut dyn RngCore) -> Result<Step> {
        let record = MixedTableau::measure(self, a, rng)?;
        Ok(Step {
            record,
            probability_zero: None,
        })
    }
}

impl Backend for ProductSimulator {
    fn gate(&mut self, g: &Gate) -> Result<()> {
        self.apply(g)
    }
    fn unitary(&mut self, _: &DMatrix<Complex64>, _: &[usize]) -> Result<()> {
        Err(Error::EngineMismatch(
            "initial product blocks cannot be combined with named gates".into(),
        ))
    }
    fn measure(&mut self, a: usize, rng: &mut dyn RngCore) -> Result<Step> {
        let (record, p0) = ProductSimulator::measure(self, a, rng)?;
        Ok(Step {
            record,
            probability_zero: Some(p0),
        })
    }
}

impl Backend for PauliSumState {
    fn gate(&mut self, g: &Gate) -> Result<()> {
        self.apply_gate(g)
    }
    fn unitary(&mut self, u: &DMatrix<Complex64>, qubits: &[usize]) -> Result<()> {
        self.apply_unitary(u, qubits)
    }
    fn measure(&mut self, a: usize, rng: &mut dyn RngCore) -> Result<Step> {
        let (record, p0) = PauliSumState::measure(self, a, rng)?;
        Ok(Step {
            record,
            probability_zero: Some(p0),
        })
    }
}

impl Backend for DenseState {
    fn gate(&mut self, g: &Gate) -> Result<()> {
        self.apply_gate(g)
    }
    fn unitary(&mut self, u: &DMatrix<Complex64>, qubits: &[usize]) -> Result<()> {
        self.apply_unitary(u, qubits)
    }
    fn measure(&mut self, a: usize, rng: &mut dyn RngCore) -> Result<Step> {
        let p0 = self.probability_zero(a)?;
        let (outcome, deterministic) = sample_outcome(p0, rng);
        self.collapse(a, outcome)?;
        Ok(Step {
            record: MeasurementRecord {
                qubit: a,
                outcome,
                deterministic,
            },
            probability_zero: Some(p0),
        })
    }
}

impl Backend for DensityMatrix {
    fn gate(&mut self, g: &Gate) -> Result<()> {
        self.apply_gate(g)
    }
    fn unitary(&mut self, u: &DMatrix<Complex64>, qubits: &[usize]) -> Result<()> {
        self.apply_unitary(u, qubits)
    }
    fn measure(&mut self, a: usize, rng: &mut dyn RngCore) -> Result<Step> {
        let p0 = self.probability_zero(a)?;
        let (outcome, deterministic) = sample_outcome(p0, rng);
        self.collapse(a, outcome)?;
        Ok(Step {
            record: MeasurementRecord {
                qubit: a,
                outcome,
                deterministic,
            },
            probability_zero: Some(p0),
        })
    }
}

fn execute(
    program: &CircuitProgram,
    backend: &mut dyn Backend,
    rng: &mut dyn RngCore,
) -> Result<Transcript> {
    let mut transcript = Transcript::default();
    for ins in program.instructions() {
        let ins = match ins {
            Instruction::Conditional {
                record,
                instruction,
            } => {
                if !transcript.steps[*record].record.outcome {
                    continue;
                }
                instruction.as_ref()
            }
            other => other,
        };
        match ins {
            Instruction::Measure(a) => transcript.steps.push(backend.measure(*a, rng)?),
            Instruction::Unitary { name, qubits } => {
                let u = program
                    .gate(name)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown gate `{name}`")))?;
                backend.unitary(&u, qubits)?;
            }
            other => backend.gate(&other.as_gate().expect("validated program"))?,
        }
    }
    Ok(transcript)
}

pub fn run<R: Rng>(program: &CircuitProgram, engine: Engine, rng: &mut R) -> Result<Transcript> {
    run_with(program, engine, rng, &RunOptions::default())
}

pub fn run_with<R: Rng>(
    program: &CircuitProgram,
    engine: Engine,
    rng: &mut R,
    options: &RunOptions,
) -> Result<Transcript> {
    let n = program.num_qubits();
    let stabilizer_only = || {
        if !program.blocks().is_empty() {
            Err(Error::EngineMismatch(
                "initial product blocks need the beyond or oracle engine".into(),
            ))
        } else if program.has_named_unitaries() {
            Err(no_unitaries())
        } else {
            Ok(())
        }
    };
    match engine {
        Engine::Tableau => {
            stabilizer_only()?;
            execute(program, &mut Tableau::new(n)?, rng)
        }
        Engine::Mixed { rank } => {
            stabilizer_only()?;
            execute(program, &mut MixedTableau::new(n, rank)?, rng)
        }
        Engine::Beyond => {
            if !program.blocks().is_empty() {
                let state = ProductState::new(program.blocks().to_vec())?;
                let mut sim = ProductSimulator::new(state, options.max_measurements);
                execute(program, &mut sim, rng)
            } else {
                let mut s = PauliSumState::zero(n)?.with_cap(options.term_cap);
                execute(program, &mut s, rng)
            }
        }
        Engine::Oracle => {
            if !program.blocks().is_empty() {
                execute(program, &mut DensityMatrix::from_blocks(program.blocks())?, rng)
            } else {
                execute(program, &mut DenseState::zero(n)?, rng)
            }
        }
    }
}

/// [`run_with`] driven by a ChaCha8 generator seeded with `seed`.
pub fn run_seeded(
    program: &CircuitProgram,
    engine: Engine,
    seed: u64,
    options: &RunOptions,
) -> Result<Transcript> {
    run_with(program, engine, &mut ChaCha8Rng::seed_from_u64(seed), options)
}
