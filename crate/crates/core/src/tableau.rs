//! Destabilizer/stabilizer tableau simulation of stabilizer circuits.
//!
//! A state on `n` qubits is held as `2n + 1` Pauli rows. Rows `0..n` are the
//! destabilizer generators, rows `n..2n` the stabilizer generators, and row
//! `2n` is scratch space for determinate measurements. Each row is packed as
//! an x word array, a z word array and one sign bit, so composing two rows is
//! a word-wise XOR plus a popcount-based phase sum.
//!
//! Unitary gates cost `O(n)`; measurements cost `O(n^2)` whether the outcome
//! is random or determinate.
//!
//! # Snapshot format
//!
//! [`Tableau::to_bytes`] writes, all integers little-endian:
//!
//! | field   | size                              |
//! |---------|-----------------------------------|
//! | magic   | 4 bytes, `b"CHPT"`                |
//! | version | `u32`, currently 1                |
//! | n       | `u64`                             |
//! | x       | `(2n+1) * ceil(n/64)` `u64` words, row-major |
//! | z       | same layout as x                  |
//! | phases  | `ceil((2n+1)/64)` `u64` words, bit `i` = sign of row `i` |
//!
//! Unused high bits of every word are zero.

use std::fmt;

use rand::Rng;

use crate::bits;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::pauli::PauliOperator;

pub(crate) const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub qubit: usize,
    pub outcome: bool,
    pub deterministic: bool,
}

#[derive(Clone)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
    rowsums: u64,
}

impl Tableau {
    /// The standard initial tableau for `|0…0⟩`: destabilizers `X_j`,
    /// stabilizers `Z_j`, all signs positive.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        let words = bits::words_for(n);
        let rows = 2 * n + 1;
        let mut t = Tableau {
            n,
            words,
            x: vec![0; rows * words],
            z: vec![0; rows * words],
            r: vec![false; rows],
            rowsums: 0,
        };
        for j in 0..n {
            bits::set(t.x_row_mut(j), j, true);
            bits::set(t.z_row_mut(n + j), j, true);
        }
        Ok(t)
    }

    /// Builds a tableau from explicit destabilizer and stabilizer rows.
    ///
    /// All rows must be Hermitian and satisfy the destabilizer/stabilizer
    /// commutation pattern (see [`Tableau::check_invariants`]).
    pub fn from_generators(
        destabilizers: &[PauliOperator],
        stabilizers: &[PauliOperator],
    ) -> Result<Self> {
        let n = stabilizers.len();
        if destabilizers.len() != n {
            return Err(Error::InvalidTableau(format!(
                "{} destabilizers for {} stabilizers",
                destabilizers.len(),
                n
            )));
        }
        let mut t = Tableau::new(n)?;
        for (i, row) in destabilizers.iter().chain(stabilizers).enumerate() {
            t.set_row(i, row)?;
        }
        t.check_invariants()?;
        Ok(t)
    }

    /// Builds a tableau for the pure state stabilized by `stabilizers`,
    /// solving for a matching set of destabilizers.
    pub fn from_stabilizers(stabilizers: &[PauliOperator]) -> Result<Self> {
        let n = stabilizers.len();
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        let basis = crate::mixed::complete_basis(n, stabilizers)?;
        Tableau::from_generators(&basis.destabilizers, stabilizers)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn x_row(&self, i: usize) -> &[u64] {
        &self.x[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub(crate) fn z_row(&self, i: usize) -> &[u64] {
        &self.z[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    fn x_row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.x[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    fn z_row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.z[i * self.words..(i + 1) * self.words]
    }

    /// x bit of row `i`, qubit `j`.
    pub fn x(&self, i: usize, j: usize) -> bool {
        bits::get(self.x_row(i), j)
    }

    /// z bit of row `i`, qubit `j`.
    pub fn z(&self, i: usize, j: usize) -> bool {
        bits::get(self.z_row(i), j)
    }

    /// Sign bit of row `i` (`true` means a `-1` phase).
    pub fn phase_bit(&self, i: usize) -> bool {
        self.r[i]
    }

    /// Row `i` as a Pauli operator.
    pub fn row(&self, i: usize) -> PauliOperator {
        PauliOperator::from_words(
            self.n,
            if self.r[i] { 2 } else { 0 },
            self.x_row(i).to_vec(),
            self.z_row(i).to_vec(),
        )
    }

    pub(crate) fn set_row(&mut self, i: usize, p: &PauliOperator) -> Result<()> {
        Error::check_dims(self.n, p.num_qubits())?;
        if !p.is_hermitian() {
            return Err(Error::InvalidTableau(format!(
                "row {p} has an imaginary phase"
            )));
        }
        self.x_row_mut(i).copy_from_slice(p.x_words());
        self.z_row_mut(i).copy_from_slice(p.z_words());
        self.r[i] = p.phase() == 2;
        Ok(())
    }

    pub(crate) fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.x.copy_within(src * w..(src + 1) * w, dst * w);
        self.z.copy_within(src * w..(src + 1) * w, dst * w);
        self.r[dst] = self.r[src];
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.words {
            self.x.swap(a * self.words + k, b * self.words + k);
            self.z.swap(a * self.words + k, b * self.words + k);
        }
        self.r.swap(a, b);
    }

    pub(crate) fn clear_row(&mut self, i: usize) {
        self.x_row_mut(i).fill(0);
        self.z_row_mut(i).fill(0);
        self.r[i] = false;
    }

    pub fn destabilizer_generators(&self) -> Vec<PauliOperator> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    pub fn stabilizer_generators(&self) -> Vec<PauliOperator> {
        (self.n..2 * self.n).map(|i| self.row(i)).collect()
    }

    /// Number of rowsum calls performed so far.
    pub fn rowsum_count(&self) -> u64 {
        self.rowsums
    }

    pub fn reset_rowsum_count(&mut self) {
        self.rowsums = 0;
    }

    /// Mod-4 phase sum for composing row `i` into row `h`.
    fn rowsum_phase(&self, h: usize, i: usize) -> u8 {
        let g = bits::product_phase(self.x_row(i), self.z_row(i), self.x_row(h), self.z_row(h));
        (2 * self.r[h] as i64 + 2 * self.r[i] as i64 + g).rem_euclid(4) as u8
    }

    fn rowsum_apply(&mut self, h: usize, i: usize, sum: u8) {
        self.r[h] = sum == 2;
        let w = self.words;
        let (xs, zs) = (&mut self.x, &mut self.z);
        for k in 0..w {
            xs[h * w + k] ^= xs[i * w + k];
            zs[h * w + k] ^= zs[i * w + k];
        }
        self.rowsums += 1;
    }

    /// Sets row `h` to the product `R_i · R_h`, tracking the sign.
    ///
    /// Fails with [`Error::PhaseIntegrity`] when the phase sum is odd, which
    /// happens only if the two rows anticommute.
    pub fn rowsum(&mut self, h: usize, i: usize) -> Result<()> {
        let rows = 2 * self.n + 1;
        Error::check_qubit(h, rows)?;
        Error::check_qubit(i, rows)?;
        if h == i {
            return Err(Error::InvalidInput("rowsum needs two distinct rows".into()));
        }
        let sum = self.rowsum_phase(h, i);
        if sum % 2 == 1 {
            return Err(Error::PhaseIntegrity(sum));
        }
        self.rowsum_apply(h, i, sum);
        Ok(())
    }

    /// Internal rowsum; an odd phase sum means the tableau is corrupt.
    pub(crate) fn rowsum_checked(&mut self, h: usize, i: usize) {
        let sum = self.rowsum_phase(h, i);
        assert!(
            sum.is_multiple_of(2),
            "rowsum({h}, {i}) phase sum {sum} is odd: tableau invariants violated"
        );
        self.rowsum_apply(h, i, sum);
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n)?;
        match *gate {
            Gate::Cnot { control, target } => self.cnot_unchecked(control, target),
            Gate::Hadamard(a) => self.hadamard_unchecked(a),
            Gate::Phase(a) => self.phase_unchecked(a),
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.apply(&Gate::cnot(control, target))
    }

    pub fn apply_hadamard(&mut self, a: usize) -> Result<()> {
        self.apply(&Gate::Hadamard(a))
    }

    pub fn apply_phase(&mut self, a: usize) -> Result<()> {
        self.apply(&Gate::Phase(a))
    }

    pub(crate) fn cnot_unchecked(&mut self, a: usize, b: usize) {
        let (wa, ma) = bits::locate(a);
        let (wb, mb) = bits::locate(b);
        let (sa, sb) = (a % 64, b % 64);
        let w = self.words;
        for i in 0..2 * self.n {
            let (xa, za) = ((self.x[i * w + wa] >> sa) & 1, (self.z[i * w + wa] >> sa) & 1);
            let (xb, zb) = ((self.x[i * w + wb] >> sb) & 1, (self.z[i * w + wb] >> sb) & 1);
            self.r[i] ^= xa & zb & (xb ^ za ^ 1) != 0;
            self.x[i * w + wb] ^= mb & xa.wrapping_neg();
            self.z[i * w + wa] ^= ma & zb.wrapping_neg();
        }
    }

    pub(crate) fn hadamard_unchecked(&mut self, a: usize) {
        let (wa, ma) = bits::locate(a);
        let w = self.words;
        for i in 0..2 * self.n {
            let (xw, zw) = (self.x[i * w + wa], self.z[i * w + wa]);
            let swap = (xw ^ zw) & ma;
            self.r[i] ^= xw & zw & ma != 0;
            self.x[i * w + wa] = xw ^ swap;
            self.z[i * w + wa] = zw ^ swap;
        }
    }

    pub(crate) fn phase_unchecked(&mut self, a: usize) {
        let (wa, ma) = bits::locate(a);
        let w = self.words;
        for i in 0..2 * self.n {
            let (xw, zw) = (self.x[i * w + wa], self.z[i * w + wa]);
            self.r[i] ^= xw & zw & ma != 0;
            self.z[i * w + wa] = zw ^ (xw & ma);
        }
    }

    /// Whether measuring qubit `a` in the standard basis has a determinate
    /// outcome: no stabilizer row has an x bit on `a`.
    pub fn is_deterministic(&self, a: usize) -> Result<bool> {
        Error::check_qubit(a, self.n)?;
        Ok(self.first_x_row(a, self.n..2 * self.n).is_none())
    }

    pub(crate) fn first_x_row(&self, a: usize, rows: std::ops::Range<usize>) -> Option<usize> {
        let (wa, ma) = bits::locate(a);
        rows.into_iter()
            .find(|&p| self.x[p * self.words + wa] & ma != 0)
    }

    /// Random-outcome update: row `p` anticommutes with `Z_a`; every other
    /// row with an x bit on `a` is multiplied by row `p`, row `p`'s old value
    /// moves to `partner`, and row `p` becomes `(-1)^outcome Z_a`.
    ///
    /// `partner` is overwritten, so it is skipped in the multiplication pass.
    pub(crate) fn collapse(&mut self, p: usize, partner: usize, a: usize, outcome: bool) {
        let (wa, ma) = bits::locate(a);
        for i in 0..2 * self.n {
            if i != p && i != partner && self.x[i * self.words + wa] & ma != 0 {
                self.rowsum_checked(i, p);
            }
        }
        self.copy_row(partner, p);
        self.clear_row(p);
        bits::set(self.z_row_mut(p), a, true);
        self.r[p] = outcome;
    }

    /// Determinate-outcome evaluation: accumulates into the scratch row the
    /// stabilizer rows `i + n` for every destabilizer `i` in `destab` with an x
    /// bit on `a`, and returns the resulting sign.
    pub(crate) fn determinate_outcome(&mut self, a: usize, destab: std::ops::Range<usize>) -> bool {
        let scratch = 2 * self.n;
        self.clear_row(scratch);
        let (wa, ma) = bits::locate(a);
        for i in destab {
            if self.x[i * self.words + wa] & ma != 0 {
                self.rowsum_checked(scratch, i + self.n);
            }
        }
        self.r[scratch]
    }

    /// Measures qubit `a` in the standard basis. Random outcomes draw one
    /// unbiased bit from `rng`.
    pub fn measure<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> Result<MeasurementRecord> {
        self.measure_with(a, || rng.gen::<bool>())
    }

    /// Like [`Tableau::measure`], but random outcomes come from `coin`.
    pub fn measure_with(
        &mut self,
        a: usize,
        coin: impl FnOnce() -> bool,
    ) -> Result<MeasurementRecord> {
        Error::check_qubit(a, self.n)?;
        let n = self.n;
        match self.first_x_row(a, n..2 * n) {
            Some(p) => {
                let outcome = coin();
                self.collapse(p, p - n, a, outcome);
                Ok(MeasurementRecord {
                    qubit: a,
                    outcome,
                    deterministic: false,
                })
            }
            None => {
                let outcome = self.determinate_outcome(a, 0..n);
                Ok(MeasurementRecord {
                    qubit: a,
                    outcome,
                    deterministic: true,
                })
            }
        }
    }

    /// Checks the destabilizer/stabilizer structure:
    ///
    /// * every row has a real sign (stored by construction),
    /// * destabilizers pairwise commute, stabilizers pairwise commute,
    /// * destabilizer `h` anticommutes with stabilizer `h`,
    /// * destabilizer `i` commutes with stabilizer `h` for `i != h`.
    ///
    /// Together these imply the `2n` rows are independent and generate the
    /// whole Pauli group.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        for i in 0..2 * n {
            for j in (i + 1)..2 * n {
                let anti = bits::symplectic(
                    self.x_row(i),
                    self.z_row(i),
                    self.x_row(j),
                    self.z_row(j),
                );
                let expected = j == i + n;
                if anti != expected {
                    return Err(Error::InvalidTableau(format!(
                        "rows {i} and {j} {} but should {}",
                        if anti { "anticommute" } else { "commute" },
                        if expected { "anticommute" } else { "commute" }
                    )));
                }
            }
        }
        Ok(())
    }

    /// Bits of tableau storage actually allocated (x, z and sign arrays).
    pub fn storage_bits(&self) -> usize {
        (self.x.len() + self.z.len()) * 64 + self.r.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_snapshot(&mut out, b"CHPT", self, None);
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let (t, rank) = read_snapshot(data, b"CHPT")?;
        debug_assert!(rank.is_none());
        t.check_invariants()?;
        Ok(t)
    }
}

pub(crate) fn write_snapshot(out: &mut Vec<u8>, magic: &[u8; 4], t: &Tableau, rank: Option<usize>) {
    out.extend_from_slice(magic);
    out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    out.extend_from_slice(&(t.n as u64).to_le_bytes());
    if let Some(r) = rank {
        out.extend_from_slice(&(r as u64).to_le_bytes());
    }
    for w in t.x.iter().chain(&t.z) {
        out.extend_from_slice(&w.to_le_bytes());
    }
    let mut phases = vec![0u64; bits::words_for(t.r.len())];
    for (i, &b) in t.r.iter().enumerate() {
        bits::set(&mut phases, i, b);
    }
    for w in phases {
        out.extend_from_slice(&w.to_le_bytes());
    }
}

pub(crate) fn read_snapshot(data: &[u8], magic: &[u8; 4]) -> Result<(Tableau, Option<usize>)> {
    let with_rank = magic == b"CHPM";
    let mut cursor = 0usize;
    let mut take = |len: usize| -> Result<&[u8]> {
        let s = data
            .get(cursor..cursor + len)
            .ok_or_else(|| Error::Snapshot("truncated data".into()))?;
        cursor += len;
        Ok(s)
    };
    if take(4)? != magic {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(4)?.try_into().unwrap());
    if version != SNAPSHOT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
    let rank = if with_rank {
        Some(u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize)
    } else {
        None
    };
    let mut t = Tableau::new(n)?;
    let count = t.x.len();
    let mut read_words = |dst: &mut Vec<u64>, k: usize| -> Result<()> {
        dst.clear();
        for _ in 0..k {
            dst.push(u64::from_le_bytes(take(8)?.try_into().unwrap()));
        }
        Ok(())
    };
    let mut x = Vec::new();
    let mut z = Vec::new();
    let mut phases = Vec::new();
    read_words(&mut x, count)?;
    read_words(&mut z, count)?;
    read_words(&mut phases, bits::words_for(2 * n + 1))?;
    if cursor != data.len() {
        return Err(Error::Snapshot("trailing bytes".into()));
    }
    let tail = bits::tail_mask(n);
    for row in x.chunks(t.words).chain(z.chunks(t.words)) {
        if row[t.words - 1] & !tail != 0 {
            return Err(Error::Snapshot("nonzero padding bits".into()));
        }
    }
    t.x = x;
    t.z = z;
    for i in 0..2 * n + 1 {
        t.r[i] = bits::get(&phases, i);
    }
    Ok((t, rank))
}

/// Equality over the `2n` generator rows; the scratch row and the rowsum
/// counter are ignored.
impl PartialEq for Tableau {
    fn eq(&self, other: &Self) -> bool {
        let live = 2 * self.n * self.words;
        self.n == other.n
            && self.x[..live] == other.x[..live]
            && self.z[..live] == other.z[..live]
            && self.r[..2 * self.n] == other.r[..2 * self.n]
    }
}

impl Eq for Tableau {}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..2 * self.n {
            if i == self.n {
                writeln!(f, "{}", "-".repeat(self.n + 1))?;
            }
            writeln!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}
