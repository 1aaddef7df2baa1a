//! Canonical-form synthesis of unitary stabilizer circuits.
//!
//! Every unitary stabilizer circuit is equivalent to one made of eleven
//! rounds `H-C-P-C-P-C-H-P-C-P-C`, where each round holds gates of a single
//! type. [`canonical_synthesize`] finds that form for any valid tableau, and
//! [`minimize`] re-synthesizes the CNOT rounds with the block-pattern
//! elimination of [`cnot_synth_logdepth`], which needs only
//! `O(n^2 / log n)` gates per round.
//!
//! Reduction runs on a column-packed copy of the tableau so each gate costs
//! `O(n / 64)` word operations instead of `O(n)` bit operations.

use std::fmt;

use crate::bits;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::gf2::BinaryMatrix;
use crate::pauli::PauliOperator;
use crate::program::CircuitProgram;
use crate::tableau::Tableau;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundKind {
    Hadamard,
    Cnot,
    Phase,
}

impl RoundKind {
    pub fn letter(self) -> char {
        match self {
            RoundKind::Hadamard => 'H',
            RoundKind::Cnot => 'C',
            RoundKind::Phase => 'P',
        }
    }

    pub fn admits(self, gate: &Gate) -> bool {
        matches!(
            (self, gate),
            (RoundKind::Hadamard, Gate::Hadamard(_))
                | (RoundKind::Cnot, Gate::Cnot { .. })
                | (RoundKind::Phase, Gate::Phase(_))
        )
    }
}

pub const ROUND_KINDS: [RoundKind; 11] = {
    use RoundKind::*;
    [
        Hadamard, Cnot, Phase, Cnot, Phase, Cnot, Hadamard, Phase, Cnot, Phase, Cnot,
    ]
};

/// A unitary circuit split into the eleven canonical rounds. Empty rounds
/// are kept so the shape is always the same.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalCircuit {
    n: usize,
    rounds: Vec<Vec<Gate>>,
}

impl CanonicalCircuit {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> &[Vec<Gate>] {
        &self.rounds
    }

    pub fn gates(&self) -> Vec<Gate> {
        self.rounds.iter().flatten().copied().collect()
    }

    pub fn gate_count(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }

    pub fn cnot_count(&self) -> usize {
        self.rounds
            .iter()
            .zip(ROUND_KINDS)
            .filter(|(_, k)| *k == RoundKind::Cnot)
            .map(|(r, _)| r.len())
            .sum()
    }

    /// Whether every round only holds gates of its designated type.
    pub fn is_well_formed(&self) -> bool {
        self.rounds.len() == 11
            && self
                .rounds
                .iter()
                .zip(ROUND_KINDS)
                .all(|(r, k)| r.iter().all(|g| k.admits(g) && g.validate(self.n).is_ok()))
    }

    /// The tableau produced by running the circuit on `|0…0⟩`.
    pub fn to_tableau(&self) -> Tableau {
        let mut w = Work::identity(self.n);
        for g in self.rounds.iter().flatten() {
            w.apply(g);
        }
        w.to_tableau()
    }

    /// CHP text with a `# round k: H|C|P` comment before each round.
    pub fn to_chp(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CanonicalCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (round, kind)) in self.rounds.iter().zip(ROUND_KINDS).enumerate() {
            writeln!(f, "# round {}: {}", k + 1, kind.letter())?;
            for g in round {
                writeln!(f, "{g}")?;
            }
        }
        Ok(())
    }
}

/// Column-packed working tableau: for each qubit, the x and z bits of all
/// `2n` rows, plus the sign bits of all rows.
struct Work {
    n: usize,
    w: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<u64>,
    rounds: Vec<Vec<Gate>>,
}

impl Work {
    fn identity(n: usize) -> Self {
        let w = bits::words_for(2 * n);
        let mut work = Work {
            n,
            w,
            x: vec![0; n * w],
            z: vec![0; n * w],
            r: vec![0; w],
            rounds: Vec::new(),
        };
        for j in 0..n {
            bits::set(&mut work.x[j * w..(j + 1) * w], j, true);
            bits::set(&mut work.z[j * w..(j + 1) * w], n + j, true);
        }
        work
    }

    fn from_tableau(t: &Tableau) -> Self {
        let n = t.num_qubits();
        let mut work = Work::identity(n);
        work.x.fill(0);
        work.z.fill(0);
        let w = work.w;
        for i in 0..2 * n {
            for j in 0..n {
                if t.x(i, j) {
                    bits::set(&mut work.x[j * w..(j + 1) * w], i, true);
                }
                if t.z(i, j) {
                    bits::set(&mut work.z[j * w..(j + 1) * w], i, true);
                }
            }
            bits::set(&mut work.r, i, t.phase_bit(i));
        }
        work
    }

    fn to_tableau(&self) -> Tableau {
        let n = self.n;
        let mut t = Tableau::new(n).expect("n >= 1");
        for i in 0..2 * n {
            let mut row = PauliOperator::identity(n);
            for j in 0..n {
                row.set_letter(j, crate::pauli::Letter::from_bits(self.xb(i, j), self.zb(i, j)));
            }
            if bits::get(&self.r, i) {
                row.set_phase(2);
            }
            t.set_row(i, &row).expect("rows are Hermitian");
        }
        t
    }

    #[inline]
    fn xb(&self, row: usize, col: usize) -> bool {
        bits::get(&self.x[col * self.w..(col + 1) * self.w], row)
    }

    #[inline]
    fn zb(&self, row: usize, col: usize) -> bool {
        bits::get(&self.z[col * self.w..(col + 1) * self.w], row)
    }

    fn sign(&self, row: usize) -> bool {
        bits::get(&self.r, row)
    }

    /// The n×n x or z block of rows `offset..offset+n`.
    fn block(&self, offset: usize, x_part: bool) -> BinaryMatrix {
        BinaryMatrix::from_fn(self.n, self.n, |i, j| {
            if x_part {
                self.xb(offset + i, j)
            } else {
                self.zb(offset + i, j)
            }
        })
    }

    fn begin_round(&mut self) {
        self.rounds.push(Vec::new());
    }

    fn record(&mut self, g: Gate) {
        if let Some(r) = self.rounds.last_mut() {
            r.push(g);
        }
    }

    fn apply(&mut self, g: &Gate) {
        match *g {
            Gate::Cnot { control, target } => self.cnot(control, target),
            Gate::Hadamard(a) => self.h(a),
            Gate::Phase(a) => self.p(a),
        }
    }

    fn cnot(&mut self, a: usize, b: usize) {
        let w = self.w;
        for k in 0..w {
            let xa = self.x[a * w + k];
            let xb = self.x[b * w + k];
            let za = self.z[a * w + k];
            let zb = self.z[b * w + k];
            self.r[k] ^= xa & zb & !(xb ^ za);
            self.x[b * w + k] = xb ^ xa;
            self.z[a * w + k] = za ^ zb;
        }
        self.record(Gate::cnot(a, b));
    }

    fn h(&mut self, a: usize) {
        let w = self.w;
        for k in 0..w {
            let xa = self.x[a * w + k];
            let za = self.z[a * w + k];
            self.r[k] ^= xa & za;
            self.x[a * w + k] = za;
            self.z[a * w + k] = xa;
        }
        self.record(Gate::Hadamard(a));
    }

    fn p(&mut self, a: usize) {
        let w = self.w;
        for k in 0..w {
            let xa = self.x[a * w + k];
            let za = self.z[a * w + k];
            self.r[k] ^= xa & za;
            self.z[a * w + k] = za ^ xa;
        }
        self.record(Gate::Phase(a));
    }

    /// CNOTs turning the x block of rows `offset..offset+n` into the identity.
    fn eliminate_x_block(&mut self, offset: usize) -> Result<()> {
        let ops = gauss_jordan_ops(&self.block(offset, true).transpose())?;
        for (c, t) in ops {
            self.cnot(c, t);
        }
        Ok(())
    }

    /// Phase gates fixing the signs of rows `offset..offset+n` once their x
    /// block is invertible and their z block has just been cleared by a phase
    /// on every qubit: `Z` on the qubits `s` with `X s = signs`.
    fn clear_signs(&mut self, offset: usize) -> Result<()> {
        let xs = self.block(offset, true);
        let signs: Vec<bool> = (0..self.n).map(|i| self.sign(offset + i)).collect();
        let s = xs.solve(&signs)?.ok_or(Error::Singular)?;
        for (j, flip) in s.into_iter().enumerate() {
            if flip {
                self.p(j);
                self.p(j);
            }
        }
        Ok(())
    }

    fn is_identity(&self) -> bool {
        let n = self.n;
        bits::is_zero(&self.r)
            && (0..n).all(|j| {
                (0..2 * n).all(|i| self.xb(i, j) == (i == j) && self.zb(i, j) == (i == n + j))
            })
    }
}

/// Row operations `(control, target)`, each meaning `row_target ^= row_control`,
/// that Gauss–Jordan reduce `m` to the identity, in the order performed.
pub fn gauss_jordan_ops(m: &BinaryMatrix) -> Result<Vec<(usize, usize)>> {
    if !m.is_square() {
        return Err(Error::Dimension {
            left: m.rows(),
            right: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut ops = Vec::new();
    for c in 0..n {
        if !a.get(c, c) {
            let p = (c + 1..n).find(|&r| a.get(r, c)).ok_or(Error::Singular)?;
            a.add_row(c, p);
            ops.push((p, c));
        }
        for r in 0..n {
            if r != c && a.get(r, c) {
                a.add_row(r, c);
                ops.push((c, r));
            }
        }
    }
    Ok(ops)
}

pub fn gf2_rank(m: &BinaryMatrix) -> usize {
    m.rank()
}

/// Reduced row echelon form and the pivot columns.
pub fn gf2_gaussian_eliminate(m: &BinaryMatrix) -> (BinaryMatrix, Vec<usize>) {
    let mut r = m.clone();
    let pivots = r.row_reduce();
    (r, pivots)
}

pub fn gf2_invert(m: &BinaryMatrix) -> Result<BinaryMatrix> {
    m.inverse()
}

/// Splits a symmetric `a` as `a + Λ = M Mᵀ` with `M` unit lower triangular
/// and `Λ` diagonal. Returns `(M, Λ)`.
pub fn gf2_cholesky(a: &BinaryMatrix) -> Result<(BinaryMatrix, BinaryMatrix)> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    let mut m = BinaryMatrix::identity(n);
    for j in 0..n {
        for i in j + 1..n {
            // Row i holds only columns < j at this point, row j only columns <= j.
            let dot = bits::and_parity(m.row(i), m.row(j));
            if a.get(i, j) ^ dot {
                m.set(i, j, true);
            }
        }
    }
    let mut lambda = BinaryMatrix::zeros(n, n);
    for i in 0..n {
        let diag = m.row(i).iter().map(|w| w.count_ones()).sum::<u32>() % 2 == 1;
        if diag != a.get(i, i) {
            lambda.set(i, i, true);
        }
    }
    Ok((m, lambda))
}

/// Qubits whose Hadamards give the stabilizer x block of `t` full rank.
///
/// Row-reducing the stabilizer rows leaves `k` rows with independent x parts
/// and `n - k` rows without x part. The pivot columns of those remaining z
/// parts are returned; swapping them into the x block completes its rank.
pub fn hadamard_fix_rank(t: &Tableau) -> Vec<usize> {
    let n = t.num_qubits();
    let mut s = BinaryMatrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            t.x(n + i, j)
        } else {
            t.z(n + i, j - n)
        }
    });
    s.row_reduce()
        .into_iter()
        .filter(|&c| c >= n)
        .map(|c| c - n)
        .collect()
}

/// Gates reducing `t` to the identity tableau, grouped in the eleven
/// canonical rounds. The concatenated circuit is the inverse of any circuit
/// preparing `t`.
fn reduce(t: &Tableau) -> Result<Vec<Vec<Gate>>> {
    let n = t.num_qubits();
    let mut w = Work::from_tableau(t);

    w.begin_round();
    for q in hadamard_fix_rank(t) {
        w.h(q);
    }

    w.begin_round();
    w.eliminate_x_block(n)?;

    w.begin_round();
    let (m, lambda) = gf2_cholesky(&w.block(n, false))?;
    for j in 0..n {
        if lambda.get(j, j) {
            w.p(j);
        }
    }

    w.begin_round();
    let ops = gauss_jordan_ops(&m.transpose())?;
    for &(c, t) in ops.iter().rev() {
        w.cnot(c, t);
    }

    w.begin_round();
    for j in 0..n {
        w.p(j);
    }
    w.clear_signs(n)?;

    w.begin_round();
    w.eliminate_x_block(n)?;

    w.begin_round();
    for j in 0..n {
        w.h(j);
    }

    w.begin_round();
    let (nn, lambda) = gf2_cholesky(&w.block(0, false))?;
    for j in 0..n {
        if lambda.get(j, j) {
            w.p(j);
        }
    }

    w.begin_round();
    let ops = gauss_jordan_ops(&nn.transpose())?;
    for &(c, t) in ops.iter().rev() {
        w.cnot(c, t);
    }

    w.begin_round();
    for j in 0..n {
        w.p(j);
    }
    w.clear_signs(0)?;

    w.begin_round();
    w.eliminate_x_block(0)?;

    if !w.is_identity() {
        return Err(Error::InvalidTableau("reduction did not reach the identity".into()));
    }
    Ok(w.rounds)
}

/// The canonical 11-round circuit that prepares `t` from the standard
/// initial tableau.
pub fn canonical_synthesize(t: &Tableau) -> Result<CanonicalCircuit> {
    t.check_invariants()?;
    let n = t.num_qubits();
    // The reduction of t is a circuit V with V·U = 1 for any U preparing t.
    // Reducing V's own tableau yields V⁻¹ = U, already in round order.
    let v = reduce(t)?;
    let mut tv = Work::identity(n);
    for g in v.iter().flatten() {
        tv.apply(g);
    }
    let rounds = reduce(&tv.to_tableau())?;
    Ok(CanonicalCircuit { n, rounds })
}

/// The circuit that maps the state held by `t` to `|0…0⟩`, in canonical
/// round order.
pub fn inverse_canonical(t: &Tableau) -> Result<CanonicalCircuit> {
    t.check_invariants()?;
    Ok(CanonicalCircuit {
        n: t.num_qubits(),
        rounds: reduce(t)?,
    })
}

/// Runs `gates` on `t` using the column-packed representation.
pub(crate) fn apply_fast(t: &Tableau, gates: &[Gate]) -> Tableau {
    let mut w = Work::from_tableau(t);
    for g in gates {
        w.apply(g);
    }
    w.to_tableau()
}

/// Tableau of a unitary circuit applied to `|0…0⟩`.
pub fn tableau_of(n: usize, gates: &[Gate]) -> Result<Tableau> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    for g in gates {
        g.validate(n)?;
    }
    let mut w = Work::identity(n);
    for g in gates {
        w.apply(g);
    }
    Ok(w.to_tableau())
}

/// Whether two measurement-free circuits implement the same unitary up to a
/// global phase, decided by comparing their tableaus bit for bit.
pub fn circuits_equivalent(a: &CircuitProgram, b: &CircuitProgram) -> Result<bool> {
    Error::check_dims(a.num_qubits(), b.num_qubits())?;
    let n = a.num_qubits().max(1);
    Ok(tableau_of(n, &a.unitary_gates()?)? == tableau_of(n, &b.unitary_gates()?)?)
}

/// The GF(2) map `x -> A x` of a CNOT-only circuit: CNOT `a -> b` adds row `a`
/// into row `b`.
pub fn linear_map(n: usize, gates: &[Gate]) -> Result<BinaryMatrix> {
    let mut m = BinaryMatrix::identity(n);
    for g in gates {
        g.validate(n)?;
        match *g {
            Gate::Cnot { control, target } => m.add_row(target, control),
            _ => return Err(Error::InvalidInput(format!("`{g}` is not a CNOT"))),
        }
    }
    Ok(m)
}

/// CNOTs realizing `m` by plain Gauss–Jordan elimination.
pub fn cnot_synth_gaussian(m: &BinaryMatrix) -> Result<Vec<Gate>> {
    Ok(gauss_jordan_ops(m)?
        .into_iter()
        .rev()
        .map(|(c, t)| Gate::cnot(c, t))
        .collect())
}

/// Section width used by [`cnot_synth_logdepth`] for an `n`-qubit map.
pub fn section_width(n: usize) -> usize {
    let log = (n.max(2) as f64).log2();
    ((log / 2.0).ceil() as usize).max(1)
}

/// Row operations making `a` upper triangular, processing columns in
/// sections of width `m` and first cancelling rows that repeat a section
/// pattern.
fn lower_synth(a: &mut BinaryMatrix, m: usize) -> Vec<(usize, usize)> {
    let n = a.rows();
    let mut ops = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + m).min(n);
        let mut seen: Vec<Option<usize>> = vec![None; 1 << (end - start)];
        for row in start..n {
            let key = (start..end).fold(0usize, |k, c| k | (a.get(row, c) as usize) << (c - start));
            if key == 0 {
                continue;
            }
            match seen[key] {
                Some(p) => {
                    a.add_row(row, p);
                    ops.push((p, row));
                }
                None => seen[key] = Some(row),
            }
        }
        for col in start..end {
            let mut diag = a.get(col, col);
            for row in col + 1..n {
                if a.get(row, col) {
                    if !diag {
                        a.add_row(col, row);
                        ops.push((row, col));
                        diag = true;
                    }
                    a.add_row(row, col);
                    ops.push((col, row));
                }
            }
        }
        start = end;
    }
    ops
}

/// CNOTs realizing the invertible map `m` (applied as row operations to the
/// identity, they produce `m`) using `O(n^2 / log n)` gates. Maps on fewer
/// than eight qubits use plain elimination.
pub fn cnot_synth_logdepth(m: &BinaryMatrix) -> Result<Vec<Gate>> {
    if !m.is_square() {
        return Err(Error::Dimension {
            left: m.rows(),
            right: m.cols(),
        });
    }
    let n = m.rows();
    if m.rank() != n {
        return Err(Error::Singular);
    }
    if n < 8 {
        return cnot_synth_gaussian(m);
    }
    let width = section_width(n);
    let mut a = m.clone();
    let lower = lower_synth(&mut a, width);
    let mut at = a.transpose();
    let upper = lower_synth(&mut at, width);
    debug_assert!(at.is_identity());
    Ok(upper
        .iter()
        .map(|&(c, t)| Gate::cnot(t, c))
        .chain(lower.iter().rev().map(|&(c, t)| Gate::cnot(c, t)))
        .collect())
}

/// Drops repeated gates inside a single-qubit round: `H^k -> H^(k mod 2)`
/// and `P^k -> P^(k mod 4)` per qubit, keeping first-appearance order.
fn compress_round(kind: RoundKind, round: &[Gate], n: usize) -> Vec<Gate> {
    let modulus = match kind {
        RoundKind::Hadamard => 2,
        RoundKind::Phase => 4,
        RoundKind::Cnot => return round.to_vec(),
    };
    let mut count = vec![0usize; n];
    let mut order = Vec::new();
    for g in round {
        let (Gate::Hadamard(a) | Gate::Phase(a)) = *g else {
            unreachable!("single-qubit round")
        };
        if count[a] == 0 {
            order.push(a);
        }
        count[a] += 1;
    }
    let mut out = Vec::new();
    for a in order {
        for _ in 0..count[a] % modulus {
            out.push(match kind {
                RoundKind::Hadamard => Gate::Hadamard(a),
                _ => Gate::Phase(a),
            });
        }
    }
    out
}

/// Puts `gates` in canonical form, then re-synthesizes each CNOT round with
/// [`cnot_synth_logdepth`], keeping whichever of the two is shorter, and
/// trims single-qubit rounds.
pub fn minimize(n: usize, gates: &[Gate]) -> Result<CanonicalCircuit> {
    let canon = canonical_synthesize(&tableau_of(n, gates)?)?;
    minimize_canonical(&canon)
}

pub fn minimize_canonical(canon: &CanonicalCircuit) -> Result<CanonicalCircuit> {
    let n = canon.n;
    let rounds = canon
        .rounds
        .iter()
        .zip(ROUND_KINDS)
        .map(|(round, kind)| match kind {
            RoundKind::Cnot => {
                // Small maps can come out longer than the original round.
                let fast = cnot_synth_logdepth(&linear_map(n, round)?)?;
                Ok(if fast.len() < round.len() { fast } else { round.clone() })
            }
            _ => Ok(compress_round(kind, round, n)),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CanonicalCircuit { n, rounds })
}
