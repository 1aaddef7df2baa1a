//! Random-circuit measurement benchmark.
//!
//! Each trial applies `⌊β n log₂ n⌋` gates drawn uniformly from CNOT, H and P
//! (operands uniform, CNOT operands distinct) to `|0…0⟩` and then measures
//! every qubit in order. The rowsum count per measurement is the
//! machine-independent cost; wall time is reported alongside it.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::tableau::Tableau;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub step: usize,
    pub beta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidInput(format!("beta must be positive, got {}", self.beta)));
        }
        if self.n_min < 2 || self.n_min > self.n_max {
            return Err(Error::InvalidInput(format!(
                "need 2 <= n-min <= n-max, got {}..{}",
                self.n_min, self.n_max
            )));
        }
        if self.step == 0 || self.trials == 0 {
            return Err(Error::InvalidInput("step and trials must be positive".into()));
        }
        Ok(())
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> {
        (self.n_min..=self.n_max).step_by(self.step.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub beta: f64,
    pub trial: usize,
    pub seed: u64,
    pub gates: usize,
    /// Seconds spent in the `n` measurements.
    pub total_meas_time: f64,
    pub rowsums_per_meas: f64,
    pub time_per_meas: f64,
}

/// `⌊β n log₂ n⌋`.
pub fn gate_count(n: usize, beta: f64) -> usize {
    if n < 2 {
        return 0;
    }
    (beta * n as f64 * (n as f64).log2()).floor() as usize
}

pub fn random_circuit<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<Gate> {
    (0..count)
        .map(|_| match rng.gen_range(0..3) {
            0 => {
                let a = rng.gen_range(0..n);
                let mut b = rng.gen_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                Gate::cnot(a, b)
            }
            1 => Gate::Hadamard(rng.gen_range(0..n)),
            _ => Gate::Phase(rng.gen_range(0..n)),
        })
        .collect()
}

pub fn run_trial(n: usize, beta: f64, trial: usize, seed: u64) -> Result<BenchRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gates = random_circuit(n, gate_count(n, beta), &mut rng);
    let mut t = Tableau::new(n)?;
    t.apply_all(&gates)?;
    t.reset_rowsum_count();
    let start = Instant::now();
    for a in 0..n {
        t.measure(a, &mut rng)?;
    }
    let total = start.elapsed().as_secs_f64();
    Ok(BenchRow {
        n,
        beta,
        trial,
        seed,
        gates: gates.len(),
        total_meas_time: total,
        rowsums_per_meas: t.rowsum_count() as f64 / n as f64,
        time_per_meas: total / n as f64,
    })
}

/// Runs every size and trial; trial `k` uses seed `config.seed + k`.
pub fn bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for n in config.sizes() {
        for trial in 0..config.trials {
            rows.push(run_trial(n, config.beta, trial, config.seed.wrapping_add(trial as u64))?);
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "beta",
        "trial",
        "seed",
        "gates",
        "total_meas_time",
        "rowsums_per_meas",
        "time_per_meas",
    ])
    .map_err(io)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.beta.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.gates.to_string(),
            format!("{:.9}", r.total_meas_time),
            r.rowsums_per_meas.to_string(),
            format!("{:.9}", r.time_per_meas),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(())
}

/// Mean rowsums per measurement over the rows with size `n`.
pub fn mean_rowsums(rows: &[BenchRow], n: usize) -> Option<f64> {
    let v: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.rowsums_per_meas).collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}
