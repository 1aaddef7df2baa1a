//! Simulation past the stabilizer formalism.
//!
//! * [`ProductSimulator`] starts from a tensor product of small arbitrary
//!   blocks and runs stabilizer gates. The probability of `k` measurement
//!   outcomes is `Tr(Π̃_1⋯Π̃_k⋯Π̃_1 ρ)`, where each projector has been pulled
//!   back through the preceding gates; expanding the product gives at most
//!   `2^k` Pauli words whose traces factor over the blocks.
//! * [`PauliSumState`] starts from a stabilizer state and admits arbitrary
//!   few-qubit unitaries. The density matrix is kept as
//!   `ρ = Σ c_t W_t Π_{e_t}`, where `W_t` is a Pauli word and `Π_e` projects
//!   onto the common eigenstate of the stabilizer generators with signs
//!   `(-1)^{e_j}`. Each `b`-qubit gate multiplies the term count by at most
//!   `4^{2b}`; measurements never increase it.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::bits;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::oracle::{is_unitary, sample_outcome, DensityMatrix};
use crate::pauli::{Letter, PauliOperator};
use crate::tableau::{MeasurementRecord, Tableau};

/// Coefficients smaller than this are dropped after every update.
pub const PRUNE_TOLERANCE: f64 = 1e-14;
/// Largest allowed deviation of a trace or probability from its exact range.
pub const NUMERICAL_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_MEASUREMENTS: usize = 16;
pub const DEFAULT_TERM_CAP: usize = 1 << 20;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Moves the phase of `p` into a complex factor and clears it.
fn split_phase(mut p: PauliOperator) -> (PauliOperator, Complex64) {
    let f = i_pow(p.phase());
    p.set_phase(0);
    (p, f)
}

fn local_letter(code: usize) -> Letter {
    match code & 3 {
        0 => Letter::I,
        1 => Letter::X,
        2 => Letter::Y,
        _ => Letter::Z,
    }
}

/// Writes `U = Σ c_i P_i` with `c_i = 2^-b Tr(P_i† U)`. Pauli letter `l`
/// acts on local qubit `l`. Terms with `|c_i| < 1e-14` are omitted.
pub fn nonstab_expand(u: &DMatrix<Complex64>) -> Result<Vec<(PauliOperator, Complex64)>> {
    let d = u.nrows();
    if !u.is_square() || !d.is_power_of_two() || d < 2 {
        return Err(Error::InvalidInput("gate dimension must be 2^b with b >= 1".into()));
    }
    if !is_unitary(u, 1e-10) {
        return Err(Error::InvalidInput("gate matrix is not unitary".into()));
    }
    let b = d.trailing_zeros() as usize;
    let mut out = Vec::new();
    for code in 0..(1usize << (2 * b)) {
        let letters: Vec<Letter> = (0..b).map(|l| local_letter(code >> (2 * l))).collect();
        let p = PauliOperator::from_letters(0, &letters);
        let (flip, zmask, base) = crate::oracle::pauli_action(&p);
        // Tr(P† U) = Σ_k conj(c_k) U[k ^ flip, k] where P|k⟩ = c_k |k ^ flip⟩.
        let mut acc = ZERO;
        for k in 0..d {
            let c = if (zmask & k).count_ones() % 2 == 1 { -base } else { base };
            acc += c.conj() * u[(k ^ flip, k)];
        }
        let c = acc / d as f64;
        if c.norm() >= PRUNE_TOLERANCE {
            out.push((p, c));
        }
    }
    Ok(out)
}

/// A product of density-matrix blocks on consecutive qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    blocks: Vec<DMatrix<Complex64>>,
    offsets: Vec<usize>,
    sizes: Vec<usize>,
    n: usize,
}

impl ProductState {
    /// Validates each block: dimension `2^b`, Hermitian, unit trace and
    /// positive semidefinite, all within `1e-10`.
    pub fn new(blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        const TOL: f64 = 1e-10;
        if blocks.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let mut offsets = Vec::new();
        let mut sizes = Vec::new();
        let mut n = 0;
        for (k, b) in blocks.iter().enumerate() {
            let d = b.nrows();
            if !b.is_square() || !d.is_power_of_two() || d < 2 {
                return Err(Error::InvalidInput(format!("block {k} is not 2^b x 2^b")));
            }
            if (b - b.adjoint()).iter().any(|e| e.norm() > TOL) {
                return Err(Error::InvalidInput(format!("block {k} is not Hermitian")));
            }
            let tr = b.trace();
            if (tr - Complex64::new(1.0, 0.0)).norm() > TOL {
                return Err(Error::InvalidInput(format!("block {k} has trace {tr}")));
            }
            let min_eig = b
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if min_eig < -TOL {
                return Err(Error::InvalidInput(format!(
                    "block {k} has negative eigenvalue {min_eig}"
                )));
            }
            offsets.push(n);
            sizes.push(d.trailing_zeros() as usize);
            n += d.trailing_zeros() as usize;
        }
        Ok(ProductState {
            blocks,
            offsets,
            sizes,
            n,
        })
    }

    /// `|0…0⟩⟨0…0|` as `n` one-qubit blocks.
    pub fn zero(n: usize) -> Result<Self> {
        let mut b = DMatrix::from_element(2, 2, ZERO);
        b[(0, 0)] = Complex64::new(1.0, 0.0);
        ProductState::new(vec![b; n])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    /// `Tr(P ρ)`, the product of the per-block traces times the phase of `P`.
    pub fn trace_pauli(&self, p: &PauliOperator) -> Result<Complex64> {
        Error::check_dims(self.n, p.num_qubits())?;
        let mut acc = i_pow(p.phase());
        for ((b, &off), &size) in self.blocks.iter().zip(&self.offsets).zip(&self.sizes) {
            let mut flip = 0usize;
            let mut zmask = 0usize;
            let mut ys = 0u8;
            for l in 0..size {
                let (x, z) = (p.x_bit(off + l), p.z_bit(off + l));
                flip |= (x as usize) << l;
                zmask |= (z as usize) << l;
                ys += (x && z) as u8;
            }
            if flip == 0 && zmask == 0 {
                continue;
            }
            let mut t = ZERO;
            for k in 0..(1usize << size) {
                let v = b[(k, k ^ flip)];
                t += if (zmask & k).count_ones() % 2 == 1 { -v } else { v };
            }
            acc *= i_pow(ys) * t;
            if acc.norm() == 0.0 {
                break;
            }
        }
        Ok(acc)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_blocks(&self.blocks)
    }
}

/// Stabilizer gates and measurements on a [`ProductState`].
#[derive(Debug, Clone)]
pub struct ProductSimulator {
    state: ProductState,
    gates: Vec<Gate>,
    factors: Vec<PauliOperator>,
    prefix_probability: f64,
    max_measurements: usize,
}

impl ProductSimulator {
    pub fn new(state: ProductState, max_measurements: usize) -> Self {
        ProductSimulator {
            state,
            gates: Vec::new(),
            factors: Vec::new(),
            prefix_probability: 1.0,
            max_measurements,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    pub fn apply(&mut self, g: &Gate) -> Result<()> {
        g.validate(self.num_qubits())?;
        self.gates.push(*g);
        Ok(())
    }

    /// `U† Z_a U` for the gates applied so far.
    fn pulled_back_z(&self, a: usize) -> Result<PauliOperator> {
        let mut q = PauliOperator::single(self.num_qubits(), a, Letter::Z);
        for g in self.gates.iter().rev() {
            q.conjugate_by_inverse(g)?;
        }
        Ok(q)
    }

    /// `Tr(Π_1⋯Π_k⋯Π_1 ρ)` for `Π_j = (I + F_j)/2`.
    fn joint_probability(&self, factors: &[PauliOperator]) -> Result<f64> {
        let n = self.num_qubits();
        let words = bits::words_for(n);
        let mut terms: HashMap<(Vec<u64>, Vec<u64>), Complex64> = HashMap::new();
        terms.insert((vec![0; words], vec![0; words]), Complex64::new(1.0, 0.0));
        let seq = factors.iter().chain(factors.iter().rev().skip(1));
        for f in seq {
            let mut next: HashMap<(Vec<u64>, Vec<u64>), Complex64> = HashMap::with_capacity(terms.len() * 2);
            for ((x, z), c) in terms {
                let p = PauliOperator::from_words(n, 0, x.clone(), z.clone());
                let (prod, phase) = split_phase(p.multiply(f)?);
                *next.entry((x, z)).or_insert(ZERO) += c * 0.5;
                *next
                    .entry((prod.x_words().to_vec(), prod.z_words().to_vec()))
                    .or_insert(ZERO) += c * phase * 0.5;
            }
            next.retain(|_, c| c.norm() >= PRUNE_TOLERANCE);
            terms = next;
        }
        let mut total = ZERO;
        for ((x, z), c) in terms {
            total += c * self.state.trace_pauli(&PauliOperator::from_words(n, 0, x, z))?;
        }
        if total.im.abs() > NUMERICAL_TOLERANCE {
            return Err(Error::Numerical(format!("probability {total} is not real")));
        }
        Ok(total.re)
    }

    /// Probability that measuring qubit `a` next gives 0, given the outcomes
    /// so far.
    pub fn probability_zero(&self, a: usize) -> Result<f64> {
        Error::check_qubit(a, self.num_qubits())?;
        let mut f = self.factors.clone();
        f.push(self.pulled_back_z(a)?);
        let p0 = self.joint_probability(&f)? / self.prefix_probability;
        if !(-NUMERICAL_TOLERANCE..=1.0 + NUMERICAL_TOLERANCE).contains(&p0) {
            return Err(Error::Numerical(format!("probability {p0} outside [0, 1]")));
        }
        Ok(p0.clamp(0.0, 1.0))
    }

    /// Measures qubit `a`; returns the record and the probability of 0.
    pub fn measure<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> Result<(MeasurementRecord, f64)> {
        if self.factors.len() >= self.max_measurements {
            return Err(Error::ResourceCap(format!(
                "more than {} measurements on a product initial state",
                self.max_measurements
            )));
        }
        let p0 = self.probability_zero(a)?;
        let (outcome, deterministic) = sample_outcome(p0, rng);
        let mut q = self.pulled_back_z(a)?;
        if outcome {
            q.set_phase((q.phase() + 2) % 4);
        }
        self.prefix_probability *= if outcome { 1.0 - p0 } else { p0 };
        self.factors.push(q);
        Ok((
            MeasurementRecord {
                qubit: a,
                outcome,
                deterministic,
            },
            p0,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coef: Complex64,
    /// Letters only; the phase is always `+1`.
    pub word: PauliOperator,
    /// Bit `j` set means generator `j` has eigenvalue `-1` in this term.
    pub eig: Vec<u64>,
}

type TermKey = (Vec<u64>, Vec<u64>, Vec<u64>);

/// A density matrix `Σ c_t W_t Π_{e_t}` over a stabilizer basis.
#[derive(Debug, Clone)]
pub struct PauliSumState {
    n: usize,
    destab: Vec<PauliOperator>,
    stab: Vec<PauliOperator>,
    terms: Vec<PauliTerm>,
    cap: usize,
    /// Exponent `k` of the bound `4^k` on the term count.
    bound_exponent: u32,
}

impl PauliSumState {
    pub fn new(t: &Tableau) -> Self {
        let n = t.num_qubits();
        PauliSumState {
            n,
            destab: t.destabilizer_generators(),
            stab: t.stabilizer_generators(),
            terms: vec![PauliTerm {
                coef: Complex64::new(1.0, 0.0),
                word: PauliOperator::identity(n),
                eig: vec![0; bits::words_for(n)],
            }],
            cap: DEFAULT_TERM_CAP,
            bound_exponent: 0,
        }
    }

    pub fn zero(n: usize) -> Result<Self> {
        Ok(Self::new(&Tableau::new(n)?))
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn stabilizer_generators(&self) -> &[PauliOperator] {
        &self.stab
    }

    /// `log4` of the term-count bound `4^{2bd}` accumulated so far.
    pub fn bound_exponent(&self) -> u32 {
        self.bound_exponent
    }

    fn eig_flips(&self, p: &PauliOperator) -> Vec<u64> {
        let mut v = vec![0; bits::words_for(self.n)];
        for (j, m) in self.stab.iter().enumerate() {
            if p.anticommutes_unchecked(m) {
                bits::set(&mut v, j, true);
            }
        }
        v
    }

    fn merge(&mut self, items: impl IntoIterator<Item = (PauliOperator, Vec<u64>, Complex64)>) {
        let mut map: HashMap<TermKey, Complex64> = HashMap::new();
        let mut order: Vec<TermKey> = Vec::new();
        for (w, e, c) in items {
            let key = (w.x_words().to_vec(), w.z_words().to_vec(), e);
            match map.get_mut(&key) {
                Some(v) => *v += c,
                None => {
                    order.push(key.clone());
                    map.insert(key, c);
                }
            }
        }
        let n = self.n;
        self.terms = order
            .into_iter()
            .filter_map(|key| {
                let c = map[&key];
                (c.norm() >= PRUNE_TOLERANCE).then(|| PauliTerm {
                    coef: c,
                    word: PauliOperator::from_words(n, 0, key.0, key.1),
                    eig: key.2,
                })
            })
            .collect();
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        g.validate(self.n)?;
        for row in self.stab.iter_mut().chain(self.destab.iter_mut()) {
            row.conjugate_by(g)?;
        }
        for t in &mut self.terms {
            t.word.conjugate_by(g)?;
            if t.word.phase() == 2 {
                t.coef = -t.coef;
            }
            t.word.set_phase(0);
        }
        Ok(())
    }

    /// Applies the unitary `u` to `qubits` (local bit `l` is `qubits[l]`).
    pub fn apply_unitary(&mut self, u: &DMatrix<Complex64>, qubits: &[usize]) -> Result<()> {
        let expansion = nonstab_expand(u)?;
        let b = qubits.len();
        if u.nrows() != 1 << b {
            return Err(Error::Dimension {
                left: u.nrows(),
                right: 1 << b,
            });
        }
        for (i, &q) in qubits.iter().enumerate() {
            Error::check_qubit(q, self.n)?;
            if qubits[..i].contains(&q) {
                return Err(Error::InvalidInput(format!("qubit {q} repeated")));
            }
        }
        let embedded: Vec<(PauliOperator, Complex64, Vec<u64>)> = expansion
            .into_iter()
            .map(|(p, c)| {
                let mut full = PauliOperator::identity(self.n);
                for (l, &q) in qubits.iter().enumerate() {
                    full.set_letter(q, p.letter(l));
                }
                let flips = self.eig_flips(&full);
                (full, c, flips)
            })
            .collect();
        let projected = self.terms.len() * embedded.len() * embedded.len();
        let bound_exponent = self.bound_exponent + 2 * b as u32;
        let mut items = Vec::with_capacity(projected.min(self.cap));
        for t in &self.terms {
            for (pi, ci, _) in &embedded {
                let left = pi.multiply(&t.word)?;
                for (pk, ck, sk) in &embedded {
                    let (w, phase) = split_phase(left.multiply(pk)?);
                    let mut e = t.eig.clone();
                    bits::xor_into(&mut e, sk);
                    items.push((w, e, t.coef * ci * ck.conj() * phase));
                }
            }
        }
        self.merge(items);
        self.bound_exponent = bound_exponent;
        let bound = 4f64.powi(bound_exponent as i32);
        if self.terms.len() > self.cap || self.terms.len() as f64 > bound {
            return Err(Error::ResourceCap(format!(
                "{} terms exceed the cap of {} (4^(2bd) bound is 4^{})",
                self.terms.len(),
                self.cap,
                bound_exponent
            )));
        }
        Ok(())
    }

    /// `⟨ψ_e| P |ψ_e⟩` for the stabilizer eigenstate with sign bits `e`.
    fn eigen_expectation(&self, p: &PauliOperator, e: &[u64]) -> Complex64 {
        if self.stab.iter().any(|m| p.anticommutes_unchecked(m)) {
            return ZERO;
        }
        let mut prod = PauliOperator::identity(self.n);
        let mut sign = false;
        for (j, d) in self.destab.iter().enumerate() {
            if p.anticommutes_unchecked(d) {
                prod = prod.multiply(&self.stab[j]).expect("same size");
                sign ^= bits::get(e, j);
            }
        }
        debug_assert_eq!(prod.x_words(), p.x_words());
        debug_assert_eq!(prod.z_words(), p.z_words());
        let lambda = i_pow((4 + p.phase() - prod.phase()) % 4);
        if sign {
            -lambda
        } else {
            lambda
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coef * self.eigen_expectation(&t.word, &t.eig))
            .sum()
    }

    /// `Tr(P ρ)`.
    pub fn expectation(&self, p: &PauliOperator) -> Result<Complex64> {
        Error::check_dims(self.n, p.num_qubits())?;
        let mut acc = ZERO;
        for t in &self.terms {
            acc += t.coef * self.eigen_expectation(&p.multiply(&t.word)?, &t.eig);
        }
        Ok(acc)
    }

    fn check_trace(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > NUMERICAL_TOLERANCE {
            return Err(Error::Numerical(format!("trace {tr} deviates from 1")));
        }
        Ok(())
    }

    /// Probability of the `+1` eigenvalue (outcome 0) when measuring the
    /// Hermitian Pauli `q`.
    pub fn outcome_probability(&self, q: &PauliOperator) -> Result<f64> {
        Error::check_dims(self.n, q.num_qubits())?;
        if !q.is_hermitian() || q.is_identity_letters() {
            return Err(Error::InvalidInput(format!("{q} is not a measurable Pauli")));
        }
        self.check_trace()?;
        let p = ((self.trace() + self.expectation(q)?) * 0.5).re;
        if !(-NUMERICAL_TOLERANCE..=1.0 + NUMERICAL_TOLERANCE).contains(&p) {
            return Err(Error::Numerical(format!("probability {p} outside [0, 1]")));
        }
        Ok(p.clamp(0.0, 1.0))
    }

    /// Projects onto the `(-1)^outcome` eigenspace of `q` and renormalizes.
    /// Returns the probability of that outcome.
    pub fn collapse(&mut self, q: &PauliOperator, outcome: bool) -> Result<f64> {
        let p0 = self.outcome_probability(q)?;
        let p = if outcome { 1.0 - p0 } else { p0 };
        if p < 1e-12 {
            return Err(Error::Numerical(format!(
                "outcome {} has probability {p}",
                outcome as u8
            )));
        }
        let target = if outcome { 2 } else { 0 };
        let mut q = q.clone();
        q.set_phase(target);
        let (q_plain, _) = split_phase(q.clone());

        match self.stab.iter().position(|m| m.anticommutes_unchecked(&q_plain)) {
            None => {
                // q is ± a stabilizer element: keep terms whose eigenstate has
                // the requested eigenvalue and whose word commutes with q.
                let kept: Vec<PauliTerm> = self
                    .terms
                    .iter()
                    .filter(|t| {
                        !t.word.anticommutes_unchecked(&q_plain)
                            && self.eigen_expectation(&q, &t.eig).re > 0.0
                    })
                    .cloned()
                    .collect();
                self.terms = kept;
            }
            Some(p_idx) => {
                let mp = self.stab[p_idx].clone();
                for j in 0..self.n {
                    if j != p_idx && self.stab[j].anticommutes_unchecked(&q_plain) {
                        self.stab[j] = mp.multiply(&self.stab[j])?;
                        for t in &mut self.terms {
                            if bits::get(&t.eig, p_idx) {
                                bits::flip(&mut t.eig, j);
                            }
                        }
                    }
                    if j != p_idx && self.destab[j].anticommutes_unchecked(&q_plain) {
                        self.destab[j] = mp.multiply(&self.destab[j])?;
                    }
                }
                self.destab[p_idx] = mp.clone();
                self.stab[p_idx] = q_plain.clone();
                let half = Complex64::new(0.5, 0.0);
                let mut items = Vec::with_capacity(self.terms.len());
                for t in &self.terms {
                    let mut e = t.eig.clone();
                    let sign_p = bits::get(&e, p_idx);
                    bits::set(&mut e, p_idx, outcome);
                    if t.word.anticommutes_unchecked(&q_plain) {
                        let (w, phase) = split_phase(t.word.multiply(&mp)?);
                        let s = if sign_p { -half } else { half };
                        items.push((w, e, t.coef * phase * s));
                    } else {
                        items.push((t.word.clone(), e, t.coef * half));
                    }
                }
                self.merge(items);
            }
        }
        let tr = self.trace();
        if tr.norm() < 1e-300 {
            return Err(Error::Numerical("state vanished after projection".into()));
        }
        for t in &mut self.terms {
            t.coef /= tr;
        }
        Ok(p)
    }

    /// Measures the Pauli `q`; returns `(outcome, determinate, p0)`.
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        q: &PauliOperator,
        rng: &mut R,
    ) -> Result<(bool, bool, f64)> {
        let p0 = self.outcome_probability(q)?;
        let (outcome, det) = sample_outcome(p0, rng);
        self.collapse(q, outcome)?;
        Ok((outcome, det, p0))
    }

    /// Measures qubit `a` in the standard basis.
    pub fn measure<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> Result<(MeasurementRecord, f64)> {
        Error::check_qubit(a, self.n)?;
        let z = PauliOperator::single(self.n, a, Letter::Z);
        let (outcome, deterministic, p0) = self.measure_pauli(&z, rng)?;
        Ok((
            MeasurementRecord {
                qubit: a,
                outcome,
                deterministic,
            },
            p0,
        ))
    }

    /// Whether every term `(W, e)` is matched by `(W, e ⊕ s(W))` with the
    /// conjugate coefficient, i.e. whether `ρ = ρ†`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let map: HashMap<TermKey, Complex64> = self
            .terms
            .iter()
            .map(|t| ((t.word.x_words().to_vec(), t.word.z_words().to_vec(), t.eig.clone()), t.coef))
            .collect();
        self.terms.iter().all(|t| {
            let mut e = t.eig.clone();
            bits::xor_into(&mut e, &self.eig_flips(&t.word));
            let key = (t.word.x_words().to_vec(), t.word.z_words().to_vec(), e);
            let partner = map.get(&key).copied().unwrap_or(ZERO);
            (partner - t.coef.conj()).norm() <= tol
        })
    }

    /// Dense density matrix (small `n` only).
    pub fn to_density_matrix(&self) -> Result<DMatrix<Complex64>> {
        let n = self.n;
        let d = 1usize << n;
        let mut out = DMatrix::from_element(d, d, ZERO);
        for t in &self.terms {
            let gens: Vec<PauliOperator> = self
                .stab
                .iter()
                .enumerate()
                .map(|(j, m)| {
                    let mut m = m.clone();
                    if bits::get(&t.eig, j) {
                        m.set_phase((m.phase() + 2) % 4);
                    }
                    m
                })
                .collect();
            let proj = DensityMatrix::from_stabilizers(n, &gens)?.to_matrix();
            let w = crate::oracle::pauli_matrix(&t.word);
            out += (w * proj) * t.coef;
        }
        Ok(out)
    }
}
