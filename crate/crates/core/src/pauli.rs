//! The n-qubit Pauli group with exact phase tracking.
//!
//! An operator is `i^phase · P_0 ⊗ … ⊗ P_{n-1}`, with qubit `j` encoded by the
//! bit pair `(x_j, z_j)`: `00 → I`, `10 → X`, `11 → Y`, `01 → Z`. A `Y` is
//! stored as the letter itself, not as the product `XZ`.

use std::fmt;
use std::str::FromStr;

use crate::bits;
use crate::error::{Error, Result};
use crate::gate::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Exponent of `i` picked up when the single-qubit Paulis `(x1, z1)` and
/// `(x2, z2)` are multiplied in that order. Always in `{-1, 0, 1}`.
pub fn phase_g(x1: bool, z1: bool, x2: bool, z2: bool) -> i8 {
    let (x2, z2) = (x2 as i8, z2 as i8);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    phase: u8,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        let w = bits::words_for(n);
        PauliOperator {
            n,
            phase: 0,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    /// Builds `i^phase · letters`.
    pub fn from_letters(phase: u8, letters: &[Letter]) -> Self {
        let mut p = PauliOperator::identity(letters.len());
        for (j, &l) in letters.iter().enumerate() {
            p.set_letter(j, l);
        }
        p.phase = phase % 4;
        p
    }

    /// `±` single-qubit operator on `qubit` of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = PauliOperator::identity(n);
        p.set_letter(qubit, letter);
        p
    }

    pub(crate) fn from_words(n: usize, phase: u8, x: Vec<u64>, z: Vec<u64>) -> Self {
        debug_assert_eq!(x.len(), bits::words_for(n));
        debug_assert_eq!(z.len(), bits::words_for(n));
        PauliOperator {
            n,
            phase: phase % 4,
            x,
            z,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Exponent `k` of the global factor `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase % 4;
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, j: usize) -> bool {
        bits::get(&self.x, j)
    }

    pub fn z_bit(&self, j: usize) -> bool {
        bits::get(&self.z, j)
    }

    pub fn letter(&self, j: usize) -> Letter {
        Letter::from_bits(self.x_bit(j), self.z_bit(j))
    }

    pub fn set_letter(&mut self, j: usize, letter: Letter) {
        let (x, z) = letter.bits();
        bits::set(&mut self.x, j, x);
        bits::set(&mut self.z, j, z);
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|j| self.letter(j)).collect()
    }

    /// True for phases `±1`, i.e. the operator is Hermitian.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// True when every letter is `I` (the phase is ignored).
    pub fn is_identity_letters(&self) -> bool {
        bits::is_zero(&self.x) && bits::is_zero(&self.z)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Same letters, phase reset to `+1`.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.phase = 0;
        p
    }

    /// The Hermitian adjoint: same letters, conjugated phase.
    pub fn adjoint(&self) -> Self {
        let mut p = self.clone();
        p.phase = (4 - p.phase) % 4;
        p
    }

    /// Exact product `self · other`.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        Error::check_dims(self.n, other.n)?;
        let g = bits::product_phase(&self.x, &self.z, &other.x, &other.z);
        let phase = (self.phase as i64 + other.phase as i64 + g).rem_euclid(4) as u8;
        let mut x = self.x.clone();
        let mut z = self.z.clone();
        bits::xor_into(&mut x, &other.x);
        bits::xor_into(&mut z, &other.z);
        Ok(PauliOperator {
            n: self.n,
            phase,
            x,
            z,
        })
    }

    /// In-place `self := other · self`. Panics on a length mismatch.
    pub(crate) fn left_multiply_by(&mut self, other: &PauliOperator) {
        assert_eq!(self.n, other.n);
        let g = bits::product_phase(&other.x, &other.z, &self.x, &self.z);
        self.phase = (self.phase as i64 + other.phase as i64 + g).rem_euclid(4) as u8;
        bits::xor_into(&mut self.x, &other.x);
        bits::xor_into(&mut self.z, &other.z);
    }

    /// Symplectic inner product: `true` iff the operators anticommute.
    pub fn symplectic_product(&self, other: &PauliOperator) -> Result<bool> {
        Error::check_dims(self.n, other.n)?;
        Ok(bits::symplectic(&self.x, &self.z, &other.x, &other.z))
    }

    pub fn commutes_with(&self, other: &PauliOperator) -> Result<bool> {
        Ok(!self.symplectic_product(other)?)
    }

    pub(crate) fn anticommutes_unchecked(&self, other: &PauliOperator) -> bool {
        bits::symplectic(&self.x, &self.z, &other.x, &other.z)
    }

    /// Replaces `self` by `G · self · G†`.
    pub fn conjugate_by(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n)?;
        match *gate {
            Gate::Hadamard(a) => {
                let (x, z) = (self.x_bit(a), self.z_bit(a));
                if x && z {
                    self.phase = (self.phase + 2) % 4;
                }
                bits::set(&mut self.x, a, z);
                bits::set(&mut self.z, a, x);
            }
            Gate::Phase(a) => {
                let (x, z) = (self.x_bit(a), self.z_bit(a));
                if x && z {
                    self.phase = (self.phase + 2) % 4;
                }
                bits::set(&mut self.z, a, z ^ x);
            }
            Gate::Cnot { control, target } => {
                let xa = self.x_bit(control);
                let za = self.z_bit(control);
                let xb = self.x_bit(target);
                let zb = self.z_bit(target);
                if xa && zb && !(xb ^ za) {
                    self.phase = (self.phase + 2) % 4;
                }
                bits::set(&mut self.x, target, xb ^ xa);
                bits::set(&mut self.z, control, za ^ zb);
            }
        }
        Ok(())
    }

    /// Replaces `self` by `G† · self · G`.
    pub fn conjugate_by_inverse(&mut self, gate: &Gate) -> Result<()> {
        for g in gate.inverse() {
            self.conjugate_by(&g)?;
        }
        Ok(())
    }

    /// Drops qubit `a`, shifting higher qubits down by one. The letter on `a`
    /// is discarded.
    pub fn remove_qubit(&self, a: usize) -> Result<PauliOperator> {
        Error::check_qubit(a, self.n)?;
        let mut out = PauliOperator::identity(self.n - 1);
        out.phase = self.phase;
        for j in (0..self.n).filter(|&j| j != a) {
            let k = if j < a { j } else { j - 1 };
            out.set_letter(k, self.letter(j));
        }
        Ok(out)
    }

    /// Tensor product `self ⊗ other` (other occupies the higher qubits).
    pub fn tensor(&self, other: &PauliOperator) -> PauliOperator {
        let mut out = PauliOperator::identity(self.n + other.n);
        for j in 0..self.n {
            out.set_letter(j, self.letter(j));
        }
        for j in 0..other.n {
            out.set_letter(self.n + j, other.letter(j));
        }
        out.phase = (self.phase + other.phase) % 4;
        out
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for j in 0..self.n {
            write!(f, "{}", self.letter(j).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        let letters = rest
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                other => Err(Error::InvalidInput(format!(
                    "invalid Pauli letter {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidInput(format!("empty Pauli string {s:?}")));
        }
        Ok(PauliOperator::from_letters(phase, &letters))
    }
}

/// Reduced row-echelon form of a generating set, with phases carried through
/// the row products. Two commuting generating sets produce the same output iff
/// they generate the same signed group. Identity rows (phase `+1`) are dropped.
pub fn reduce_generators(gens: &[PauliOperator]) -> Vec<PauliOperator> {
    let Some(first) = gens.first() else {
        return Vec::new();
    };
    let n = first.n;
    let mut rows: Vec<PauliOperator> = gens.to_vec();
    let mut pivot_row = 0;
    // Column order: x_0..x_{n-1}, then z_0..z_{n-1}.
    for col in 0..2 * n {
        let bit = |p: &PauliOperator| {
            if col < n {
                p.x_bit(col)
            } else {
                p.z_bit(col - n)
            }
        };
        let Some(found) = (pivot_row..rows.len()).find(|&r| bit(&rows[r])) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && bit(row) {
                row.left_multiply_by(&pivot);
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.retain(|p| !(p.is_identity_letters() && p.phase == 0));
    rows
}
