//! Dense reference simulator.
//!
//! Statevectors hold `2^n` amplitudes and density matrices `4^n` entries, so
//! both are capped at small `n`. Qubit `j` is bit `j` of a basis-state index;
//! a local unitary on qubits `[q_0, …, q_{k-1}]` acts on the index formed by
//! bits `q_0` (least significant) through `q_{k-1}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::pauli::PauliOperator;
use crate::tableau::Tableau;

pub const MAX_STATEVECTOR_QUBITS: usize = 12;
pub const MAX_DENSITY_QUBITS: usize = 10;
pub const MAX_GROUP_QUBITS: usize = 6;
pub const TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `(flip mask, mask of z bits, base factor)` with `P|k⟩ = base · (-1)^{popcount(z & k)} |k ^ flip⟩`.
pub(crate) fn pauli_action(p: &PauliOperator) -> (usize, usize, Complex64) {
    let mut flip = 0usize;
    let mut zmask = 0usize;
    let mut ys = 0u32;
    for j in 0..p.num_qubits() {
        let (x, z) = (p.x_bit(j), p.z_bit(j));
        if x {
            flip |= 1 << j;
        }
        if z {
            zmask |= 1 << j;
        }
        if x && z {
            ys += 1;
        }
    }
    (flip, zmask, i_pow(p.phase() as u32 + ys))
}

fn parity(v: usize) -> bool {
    v.count_ones() & 1 == 1
}

/// Dense matrix of `p` (dimension `2^n`), row index = output basis state.
pub fn pauli_matrix(p: &PauliOperator) -> DMatrix<Complex64> {
    let d = 1usize << p.num_qubits();
    let (flip, zmask, base) = pauli_action(p);
    let mut m = DMatrix::from_element(d, d, ZERO);
    for k in 0..d {
        let s = if parity(zmask & k) { -base } else { base };
        m[(k ^ flip, k)] = s;
    }
    m
}

/// Matrix of a stabilizer gate on `n` qubits.
pub fn gate_matrix(g: &Gate, n: usize) -> DMatrix<Complex64> {
    let d = 1usize << n;
    let mut m = DMatrix::from_element(d, d, ZERO);
    for k in 0..d {
        let mut v = vec![ZERO; d];
        v[k] = ONE;
        apply_gate_vec(&mut v, g);
        for (r, a) in v.into_iter().enumerate() {
            m[(r, k)] = a;
        }
    }
    m
}

fn apply_gate_vec(v: &mut [Complex64], g: &Gate) {
    let d = v.len();
    match *g {
        Gate::Hadamard(a) => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let bit = 1 << a;
            for k in 0..d {
                if k & bit == 0 {
                    let (p, q) = (v[k], v[k | bit]);
                    v[k] = (p + q) * s;
                    v[k | bit] = (p - q) * s;
                }
            }
        }
        Gate::Phase(a) => {
            let bit = 1 << a;
            for (k, amp) in v.iter_mut().enumerate() {
                if k & bit != 0 {
                    *amp *= Complex64::new(0.0, 1.0);
                }
            }
        }
        Gate::Cnot { control, target } => {
            let (c, t) = (1 << control, 1 << target);
            for k in 0..d {
                if k & c != 0 && k & t == 0 {
                    v.swap(k, k | t);
                }
            }
        }
    }
}

/// `v := U v` where `U` acts on `qubits` (local bit `l` is `qubits[l]`).
fn apply_local_vec(v: &mut [Complex64], u: &DMatrix<Complex64>, qubits: &[usize]) {
    let k = qubits.len();
    let dl = 1usize << k;
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    let spread = |local: usize| -> usize {
        (0..k).filter(|&l| local >> l & 1 == 1).map(|l| 1 << qubits[l]).sum()
    };
    let offsets: Vec<usize> = (0..dl).map(spread).collect();
    let mut buf = vec![ZERO; dl];
    for base in 0..v.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, &o) in offsets.iter().enumerate() {
            buf[l] = v[base | o];
        }
        for (r, &o) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, b) in buf.iter().enumerate() {
                acc += u[(r, c)] * b;
            }
            v[base | o] = acc;
        }
    }
}

fn check_local(u: &DMatrix<Complex64>, qubits: &[usize], n: usize) -> Result<()> {
    let d = 1usize << qubits.len();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::Dimension {
            left: u.nrows(),
            right: d,
        });
    }
    for (i, &q) in qubits.iter().enumerate() {
        Error::check_qubit(q, n)?;
        if qubits[..i].contains(&q) {
            return Err(Error::InvalidInput(format!("qubit {q} repeated")));
        }
    }
    Ok(())
}

/// Whether `u` is unitary within `tol` (max-entry deviation of `U U†` from `I`).
pub fn is_unitary(u: &DMatrix<Complex64>, tol: f64) -> bool {
    if !u.is_square() {
        return false;
    }
    let prod = u * u.adjoint();
    let id = DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
    (prod - id).iter().all(|e| e.norm() <= tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        if n > MAX_STATEVECTOR_QUBITS {
            return Err(Error::ResourceCap(format!(
                "dense statevector limited to {MAX_STATEVECTOR_QUBITS} qubits"
            )));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n == 0 || n > MAX_STATEVECTOR_QUBITS {
            return Err(Error::InvalidInput("amplitude count must be 2^n, 1 <= n <= 12".into()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::Numerical(format!("state norm {norm} is not 1")));
        }
        Ok(DenseState { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        g.validate(self.n)?;
        apply_gate_vec(&mut self.amps, g);
        Ok(())
    }

    pub fn apply_unitary(&mut self, u: &DMatrix<Complex64>, qubits: &[usize]) -> Result<()> {
        check_local(u, qubits, self.n)?;
        apply_local_vec(&mut self.amps, u, qubits);
        Ok(())
    }

    pub fn apply_pauli(&self, p: &PauliOperator) -> Result<DenseState> {
        Error::check_dims(self.n, p.num_qubits())?;
        let (flip, zmask, base) = pauli_action(p);
        let mut out = vec![ZERO; self.amps.len()];
        for (k, &a) in self.amps.iter().enumerate() {
            let s = if parity(zmask & k) { -base } else { base };
            out[k ^ flip] = s * a;
        }
        Ok(DenseState { n: self.n, amps: out })
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &DenseState) -> Result<Complex64> {
        Error::check_dims(self.n, other.n)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn expectation(&self, p: &PauliOperator) -> Result<Complex64> {
        self.inner_product(&self.apply_pauli(p)?)
    }

    pub fn approx_eq(&self, other: &DenseState, tol: f64) -> bool {
        self.n == other.n
            && self
                .amps
                .iter()
                .zip(&other.amps)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Whether `P|ψ⟩ = |ψ⟩` within [`TOLERANCE`], phase included.
    pub fn is_stabilized_by(&self, p: &PauliOperator) -> Result<bool> {
        Ok(self.apply_pauli(p)?.approx_eq(self, TOLERANCE))
    }

    /// Probability that measuring qubit `a` gives 0.
    pub fn probability_zero(&self, a: usize) -> Result<f64> {
        Error::check_qubit(a, self.n)?;
        let bit = 1 << a;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(k, _)| k & bit == 0)
            .map(|(_, x)| x.norm_sqr())
            .sum())
    }

    /// Projects qubit `a` onto `outcome` and renormalizes; returns the
    /// probability of that outcome.
    pub fn collapse(&mut self, a: usize, outcome: bool) -> Result<f64> {
        let p0 = self.probability_zero(a)?;
        let p = if outcome { 1.0 - p0 } else { p0 };
        if p <= TOLERANCE {
            return Err(Error::Numerical(format!(
                "outcome {} on qubit {a} has probability {p}",
                outcome as u8
            )));
        }
        let bit = 1 << a;
        let scale = 1.0 / p.sqrt();
        for (k, amp) in self.amps.iter_mut().enumerate() {
            if (k & bit != 0) == outcome {
                *amp *= scale;
            } else {
                *amp = ZERO;
            }
        }
        Ok(p)
    }

    /// Samples a measurement of qubit `a` with [`sample_outcome`].
    pub fn measure<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> Result<(bool, bool)> {
        let p0 = self.probability_zero(a)?;
        let (outcome, det) = sample_outcome(p0, rng);
        self.collapse(a, outcome)?;
        Ok((outcome, det))
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        if self.n > MAX_DENSITY_QUBITS {
            return Err(Error::ResourceCap(format!(
                "density matrices limited to {MAX_DENSITY_QUBITS} qubits"
            )));
        }
        let d = self.amps.len();
        let mut rho = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                rho[i * d + j] = self.amps[i] * self.amps[j].conj();
            }
        }
        Ok(DensityMatrix { n: self.n, rho })
    }
}

/// Draws a standard-basis outcome from the probability `p0` of reading 0.
///
/// Returns `(outcome, determinate)`. Outcomes within `1e-12` of certain
/// consume no randomness; unbiased ones consume one `bool` (the same draw a
/// tableau measurement makes), anything else one `f64`.
pub fn sample_outcome<R: Rng + ?Sized>(p0: f64, rng: &mut R) -> (bool, bool) {
    const EPS: f64 = 1e-12;
    if p0 >= 1.0 - EPS {
        (false, true)
    } else if p0 <= EPS {
        (true, true)
    } else if (p0 - 0.5).abs() <= EPS {
        (rng.gen::<bool>(), false)
    } else {
        (rng.gen::<f64>() >= p0, false)
    }
}

/// All `2^n` signed Pauli operators stabilizing `state` (for `n <= 6`), found
/// by testing every operator with every phase.
pub fn stabilizer_group_of(state: &DenseState) -> Result<Vec<PauliOperator>> {
    let n = state.n;
    if n > MAX_GROUP_QUBITS {
        return Err(Error::ResourceCap(format!(
            "group extraction limited to {MAX_GROUP_QUBITS} qubits"
        )));
    }
    let mut out = Vec::new();
    for code in 0..(1usize << (2 * n)) {
        let mut p = PauliOperator::identity(n);
        for j in 0..n {
            let letter = match (code >> (2 * j)) & 3 {
                0 => crate::pauli::Letter::I,
                1 => crate::pauli::Letter::X,
                2 => crate::pauli::Letter::Y,
                _ => crate::pauli::Letter::Z,
            };
            p.set_letter(j, letter);
        }
        for phase in 0..4 {
            p.set_phase(phase);
            if state.is_stabilized_by(&p)? {
                out.push(p.clone());
            }
        }
    }
    Ok(out)
}

/// Every element of the group generated by `gens` (which must commute).
pub fn group_elements(n: usize, gens: &[PauliOperator]) -> Result<Vec<PauliOperator>> {
    if gens.len() > 20 {
        return Err(Error::ResourceCap("too many generators to enumerate".into()));
    }
    let mut out = Vec::with_capacity(1 << gens.len());
    for mask in 0usize..(1 << gens.len()) {
        let mut p = PauliOperator::identity(n);
        for (k, g) in gens.iter().enumerate() {
            if mask >> k & 1 == 1 {
                p = p.multiply(g)?;
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// The dense state stabilized by the tableau's stabilizer rows, obtained by
/// projecting a random-ish reference vector with `∏ (I + M_i)/2` and
/// normalizing. The global phase is fixed so the first nonzero amplitude is
/// real and positive.
pub fn state_of_tableau(t: &Tableau) -> Result<DenseState> {
    let n = t.num_qubits();
    if n > MAX_STATEVECTOR_QUBITS {
        return Err(Error::ResourceCap(format!(
            "dense statevector limited to {MAX_STATEVECTOR_QUBITS} qubits"
        )));
    }
    let d = 1usize << n;
    // Any vector works as long as its projection is nonzero; a generic one
    // guarantees that.
    let mut v: Vec<Complex64> = (0..d)
        .map(|k| Complex64::new(1.0 + (k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
        .collect();
    for m in t.stabilizer_generators() {
        let (flip, zmask, base) = pauli_action(&m);
        let mut w = v.clone();
        for (k, &a) in v.iter().enumerate() {
            let s = if parity(zmask & k) { -base } else { base };
            w[k ^ flip] += s * a;
        }
        for x in w.iter_mut() {
            *x *= 0.5;
        }
        v = w;
    }
    let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-6 {
        return Err(Error::Numerical("stabilizer projection vanished".into()));
    }
    let lead = v.iter().find(|a| a.norm() > 1e-9).copied().unwrap_or(ONE);
    let phase = lead.conj() / lead.norm();
    for a in v.iter_mut() {
        *a *= phase / norm;
    }
    Ok(DenseState { n, amps: v })
}

/// Density matrix, row-major, `2^n × 2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    rho: Vec<Complex64>,
}

impl DensityMatrix {
    fn check_size(n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        if n > MAX_DENSITY_QUBITS {
            return Err(Error::ResourceCap(format!(
                "density matrices limited to {MAX_DENSITY_QUBITS} qubits"
            )));
        }
        Ok(())
    }

    pub fn zero(n: usize) -> Result<Self> {
        DenseState::zero(n)?.to_density()
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        Self::check_size(n)?;
        let d = 1usize << n;
        let mut rho = vec![ZERO; d * d];
        for i in 0..d {
            rho[i * d + i] = Complex64::new(1.0 / d as f64, 0.0);
        }
        Ok(DensityMatrix { n, rho })
    }

    /// `2^-n ∏ (I + M_i)` for commuting independent generators.
    pub fn from_stabilizers(n: usize, gens: &[PauliOperator]) -> Result<Self> {
        Self::check_size(n)?;
        let d = 1usize << n;
        let mut rho = vec![ZERO; d * d];
        for i in 0..d {
            rho[i * d + i] = Complex64::new(1.0 / d as f64, 0.0);
        }
        for m in gens {
            Error::check_dims(n, m.num_qubits())?;
            // rho := rho (I + M): (rho M)_{ij} = rho_{i, j^x} c_j.
            let (flip, zmask, base) = pauli_action(m);
            let mut next = rho.clone();
            for i in 0..d {
                for j in 0..d {
                    let c = if parity(zmask & j) { -base } else { base };
                    next[i * d + j] += rho[i * d + (j ^ flip)] * c;
                }
            }
            rho = next;
        }
        Ok(DensityMatrix { n, rho })
    }

    /// Tensor product of blocks; block `k` occupies the next `log2(dim)` qubits.
    pub fn from_blocks(blocks: &[DMatrix<Complex64>]) -> Result<Self> {
        let mut sizes = Vec::new();
        for b in blocks {
            let k = b.nrows().trailing_zeros() as usize;
            if b.nrows() != 1 << k || !b.is_square() {
                return Err(Error::InvalidInput("block dimension must be 2^b".into()));
            }
            sizes.push(k);
        }
        let n: usize = sizes.iter().sum();
        Self::check_size(n)?;
        let d = 1usize << n;
        let mut rho = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = ONE;
                let mut shift = 0;
                for (b, &k) in blocks.iter().zip(&sizes) {
                    let mask = (1 << k) - 1;
                    acc *= b[((i >> shift) & mask, (j >> shift) & mask)];
                    shift += k;
                }
                rho[i * d + j] = acc;
            }
        }
        Ok(DensityMatrix { n, rho })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.rho[i * self.dim() + j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    pub fn apply_unitary(&mut self, u: &DMatrix<Complex64>, qubits: &[usize]) -> Result<()> {
        check_local(u, qubits, self.n)?;
        let d = self.dim();
        let mut col = vec![ZERO; d];
        for j in 0..d {
            for (i, c) in col.iter_mut().enumerate() {
                *c = self.rho[i * d + j];
            }
            apply_local_vec(&mut col, u, qubits);
            for (i, c) in col.iter().enumerate() {
                self.rho[i * d + j] = *c;
            }
        }
        let uc = u.map(|e| e.conj());
        for i in 0..d {
            apply_local_vec(&mut self.rho[i * d..(i + 1) * d], &uc, qubits);
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        g.validate(self.n)?;
        let d = self.dim();
        let mut col = vec![ZERO; d];
        for j in 0..d {
            for (i, c) in col.iter_mut().enumerate() {
                *c = self.rho[i * d + j];
            }
            apply_gate_vec(&mut col, g);
            for (i, c) in col.iter().enumerate() {
                self.rho[i * d + j] = *c;
            }
        }
        // Right multiplication by G† acts on each row as conj(G).
        for i in 0..d {
            let row = &mut self.rho[i * d..(i + 1) * d];
            for a in row.iter_mut() {
                *a = a.conj();
            }
            apply_gate_vec(row, g);
            for a in row.iter_mut() {
                *a = a.conj();
            }
        }
        Ok(())
    }

    /// `Tr(P ρ)`.
    pub fn expectation(&self, p: &PauliOperator) -> Result<Complex64> {
        Error::check_dims(self.n, p.num_qubits())?;
        let (flip, zmask, base) = pauli_action(p);
        let d = self.dim();
        // Tr(P rho) = sum_k c_k rho_{k, k^x}.
        Ok((0..d)
            .map(|k| {
                let c = if parity(zmask & k) { -base } else { base };
                c * self.rho[k * d + (k ^ flip)]
            })
            .sum())
    }

    pub fn probability_zero(&self, a: usize) -> Result<f64> {
        Error::check_qubit(a, self.n)?;
        let bit = 1 << a;
        Ok((0..self.dim())
            .filter(|k| k & bit == 0)
            .map(|k| self.entry(k, k).re)
            .sum())
    }

    pub fn collapse(&mut self, a: usize, outcome: bool) -> Result<f64> {
        let p0 = self.probability_zero(a)?;
        let p = if outcome { 1.0 - p0 } else { p0 };
        if p <= TOLERANCE {
            return Err(Error::Numerical(format!(
                "outcome {} on qubit {a} has probability {p}",
                outcome as u8
            )));
        }
        let bit = 1 << a;
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let keep = ((i & bit != 0) == outcome) && ((j & bit != 0) == outcome);
                let e = &mut self.rho[i * d + j];
                *e = if keep { *e / p } else { ZERO };
            }
        }
        Ok(p)
    }

    pub fn measure<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> Result<(bool, bool)> {
        let p0 = self.probability_zero(a)?;
        let (outcome, det) = sample_outcome(p0, rng);
        self.collapse(a, outcome)?;
        Ok((outcome, det))
    }

    /// Traces out qubit `a`; higher qubits shift down by one.
    pub fn partial_trace(&self, a: usize) -> Result<DensityMatrix> {
        Error::check_qubit(a, self.n)?;
        if self.n == 1 {
            return Err(Error::InvalidInput("cannot trace out the only qubit".into()));
        }
        let dn = self.dim() / 2;
        let low = (1usize << a) - 1;
        let insert = |v: usize, s: usize| (v & low) | (s << a) | ((v & !low) << 1);
        let mut rho = vec![ZERO; dn * dn];
        for i in 0..dn {
            for j in 0..dn {
                rho[i * dn + j] = self.entry(insert(i, 0), insert(j, 0)) + self.entry(insert(i, 1), insert(j, 1));
            }
        }
        Ok(DensityMatrix { n: self.n - 1, rho })
    }

    pub fn approx_eq(&self, other: &DensityMatrix, tol: f64) -> bool {
        self.n == other.n
            && self
                .rho
                .iter()
                .zip(&other.rho)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.entry(i, j))
    }
}
