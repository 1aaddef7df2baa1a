//! Mixed stabilizer states.
//!
//! A rank-`r` mixed state on `n` qubits is `ρ = 2^-n ∏_{i<r} (I + M_i)`. It
//! is stored in an ordinary [`Tableau`] whose rows are arranged as
//!
//! | rows        | contents                         |
//! |-------------|----------------------------------|
//! | `0..r`      | destabilizer partners of the `M_i` |
//! | `r..n`      | logical `X̄` operators             |
//! | `n..n+r`    | stabilizer generators `M_i`       |
//! | `n+r..2n`   | logical `Z̄` operators             |
//!
//! Row `i` anticommutes with row `i ± n` and commutes with every other row,
//! so the pure-state invariant checks apply unchanged.

use rand::Rng;

use crate::bits;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::pauli::PauliOperator;
use crate::tableau::{read_snapshot, write_snapshot, MeasurementRecord, Tableau};

/// A symplectic basis extending a set of stabilizer generators.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticBasis {
    pub destabilizers: Vec<PauliOperator>,
    pub x_logicals: Vec<PauliOperator>,
    pub z_logicals: Vec<PauliOperator>,
}

#[derive(Clone, PartialEq, Eq)]
struct SymVec {
    x: Vec<u64>,
    z: Vec<u64>,
}

impl SymVec {
    fn zero(words: usize) -> Self {
        SymVec {
            x: vec![0; words],
            z: vec![0; words],
        }
    }

    fn of(p: &PauliOperator) -> Self {
        SymVec {
            x: p.x_words().to_vec(),
            z: p.z_words().to_vec(),
        }
    }

    fn dot(&self, o: &SymVec) -> bool {
        bits::symplectic(&self.x, &self.z, &o.x, &o.z)
    }

    fn add(&mut self, o: &SymVec) {
        bits::xor_into(&mut self.x, &o.x);
        bits::xor_into(&mut self.z, &o.z);
    }

    fn is_zero(&self) -> bool {
        bits::is_zero(&self.x) && bits::is_zero(&self.z)
    }

    fn into_pauli(self, n: usize) -> PauliOperator {
        PauliOperator::from_words(n, 0, self.x, self.z)
    }
}

/// Completes commuting, independent, Hermitian `stabilizers` on `n` qubits
/// to a full symplectic basis: one destabilizer per stabilizer plus `n - r`
/// logical pairs. New rows carry a `+` sign.
pub fn complete_basis(n: usize, stabilizers: &[PauliOperator]) -> Result<SymplecticBasis> {
    let r = stabilizers.len();
    if r > n {
        return Err(Error::InvalidTableau(format!(
            "{r} generators for {n} qubits"
        )));
    }
    for (i, s) in stabilizers.iter().enumerate() {
        Error::check_dims(n, s.num_qubits())?;
        if !s.is_hermitian() {
            return Err(Error::InvalidTableau(format!("generator {s} is not Hermitian")));
        }
        for t in &stabilizers[..i] {
            if t.anticommutes_unchecked(s) {
                return Err(Error::InvalidTableau(format!("generators {t} and {s} anticommute")));
            }
        }
    }
    let words = bits::words_for(n);
    let stabs: Vec<SymVec> = stabilizers.iter().map(SymVec::of).collect();

    // Row j of `dual` is the symplectic dual (z_j | x_j) of stabilizer j, so
    // dual · (x | z) gives the symplectic products with every generator.
    let mut dual = crate::gf2::BinaryMatrix::zeros(r, 2 * n);
    for (j, s) in stabs.iter().enumerate() {
        for q in 0..n {
            dual.set(j, q, bits::get(&s.z, q));
            dual.set(j, n + q, bits::get(&s.x, q));
        }
    }
    let mut transform = crate::gf2::BinaryMatrix::identity(r);
    let pivots = dual.row_reduce_tracking(Some(&mut transform));
    if pivots.len() != r {
        return Err(Error::InvalidTableau("generators are not independent".into()));
    }

    let mut destabs: Vec<SymVec> = (0..r)
        .map(|i| {
            let mut d = SymVec::zero(words);
            for (k, &c) in pivots.iter().enumerate() {
                if transform.get(k, i) {
                    if c < n {
                        bits::flip(&mut d.x, c);
                    } else {
                        bits::flip(&mut d.z, c - n);
                    }
                }
            }
            d
        })
        .collect();
    for j in 0..r {
        for i in 0..j {
            if destabs[i].dot(&destabs[j]) {
                let s = stabs[i].clone();
                destabs[j].add(&s);
            }
        }
    }

    let mut pool: Vec<SymVec> = Vec::with_capacity(2 * n);
    for q in 0..n {
        for is_x in [true, false] {
            let mut e = SymVec::zero(words);
            if is_x {
                bits::set(&mut e.x, q, true);
            } else {
                bits::set(&mut e.z, q, true);
            }
            let mut v = e.clone();
            for i in 0..r {
                if e.dot(&destabs[i]) {
                    v.add(&stabs[i]);
                }
                if e.dot(&stabs[i]) {
                    v.add(&destabs[i]);
                }
            }
            pool.push(v);
        }
    }

    let mut xl = Vec::new();
    let mut zl = Vec::new();
    let mut k = 0;
    while xl.len() < n - r {
        while pool[k].is_zero() {
            k += 1;
        }
        let v = pool[k].clone();
        let w_idx = (k + 1..pool.len())
            .find(|&j| v.dot(&pool[j]))
            .expect("symplectic complement is nondegenerate");
        let w = pool[w_idx].clone();
        pool[k] = SymVec::zero(words);
        pool[w_idx] = SymVec::zero(words);
        for u in pool.iter_mut().skip(k + 1) {
            let (a, b) = (u.dot(&w), u.dot(&v));
            if a {
                u.add(&v);
            }
            if b {
                u.add(&w);
            }
        }
        xl.push(v);
        zl.push(w);
    }

    Ok(SymplecticBasis {
        destabilizers: destabs.into_iter().map(|d| d.into_pauli(n)).collect(),
        x_logicals: xl.into_iter().map(|d| d.into_pauli(n)).collect(),
        z_logicals: zl.into_iter().map(|d| d.into_pauli(n)).collect(),
    })
}

#[derive(Clone, PartialEq, Eq)]
pub struct MixedTableau {
    t: Tableau,
    rank: usize,
}

impl MixedTableau {
    /// `|0…0⟩⟨0…0|` on the first `r` qubits tensored with the maximally mixed
    /// state on the remaining `n - r`.
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if r > n {
            return Err(Error::InvalidInput(format!("rank {r} exceeds {n} qubits")));
        }
        Ok(MixedTableau {
            t: Tableau::new(n)?,
            rank: r,
        })
    }

    /// The pure state held by `t`, viewed as a rank-`n` mixed state.
    pub fn from_pure(t: Tableau) -> Self {
        let rank = t.num_qubits();
        MixedTableau { t, rank }
    }

    /// The mixed state whose stabilizer group is generated by `stabilizers`.
    pub fn from_stabilizers(n: usize, stabilizers: &[PauliOperator]) -> Result<Self> {
        let basis = complete_basis(n, stabilizers)?;
        let destab: Vec<PauliOperator> = basis
            .destabilizers
            .iter()
            .chain(&basis.x_logicals)
            .cloned()
            .collect();
        let stab: Vec<PauliOperator> = stabilizers
            .iter()
            .chain(&basis.z_logicals)
            .cloned()
            .collect();
        Ok(MixedTableau {
            t: Tableau::from_generators(&destab, &stab)?,
            rank: stabilizers.len(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.t.num_qubits()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The underlying rows in the layout documented at module level.
    pub fn tableau(&self) -> &Tableau {
        &self.t
    }

    /// Converts to a pure tableau when the rank is full.
    pub fn into_pure(self) -> Option<Tableau> {
        (self.rank == self.t.num_qubits()).then_some(self.t)
    }

    pub fn stabilizer_generators(&self) -> Vec<PauliOperator> {
        let n = self.num_qubits();
        (n..n + self.rank).map(|i| self.t.row(i)).collect()
    }

    pub fn destabilizer_generators(&self) -> Vec<PauliOperator> {
        (0..self.rank).map(|i| self.t.row(i)).collect()
    }

    pub fn x_logicals(&self) -> Vec<PauliOperator> {
        (self.rank..self.num_qubits()).map(|i| self.t.row(i)).collect()
    }

    pub fn z_logicals(&self) -> Vec<PauliOperator> {
        let n = self.num_qubits();
        (n + self.rank..2 * n).map(|i| self.t.row(i)).collect()
    }

    pub fn check_invariants(&self) -> Result<()> {
        self.t.check_invariants()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        self.t.apply(gate)
    }

    pub fn is_deterministic(&self, a: usize) -> Result<bool> {
        Error::check_qubit(a, self.num_qubits())?;
        let n = self.num_qubits();
        Ok(self.t.first_x_row(a, self.rank..2 * n).is_none())
    }

    pub fn measure<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> Result<MeasurementRecord> {
        self.measure_with(a, || rng.gen::<bool>())
    }

    pub fn measure_with(
        &mut self,
        a: usize,
        coin: impl FnOnce() -> bool,
    ) -> Result<MeasurementRecord> {
        let n = self.num_qubits();
        Error::check_qubit(a, n)?;
        let r = self.rank;
        if let Some(p) = self.t.first_x_row(a, n..n + r) {
            let outcome = coin();
            self.t.collapse(p, p - n, a, outcome);
            return Ok(MeasurementRecord {
                qubit: a,
                outcome,
                deterministic: false,
            });
        }
        let logical = self
            .t
            .first_x_row(a, r..n)
            .or_else(|| self.t.first_x_row(a, n + r..2 * n));
        let Some(m) = logical else {
            let outcome = self.t.determinate_outcome(a, 0..r);
            return Ok(MeasurementRecord {
                qubit: a,
                outcome,
                deterministic: true,
            });
        };
        let partner = if m < n { m + n } else { m - n };
        let outcome = coin();
        self.t.collapse(m, partner, a, outcome);
        // Z_a now sits in row m and its partner in row `partner`; move the
        // pair into the first logical slot with Z_a on the stabilizer side.
        let lo = m.min(partner);
        let hi = lo + n;
        if m == lo {
            self.t.swap_rows(lo, hi);
        }
        self.t.swap_rows(hi, n + r);
        self.t.swap_rows(lo, r);
        self.rank += 1;
        Ok(MeasurementRecord {
            qubit: a,
            outcome,
            deterministic: false,
        })
    }

    /// Traces out qubit `a`, returning a state on `n - 1` qubits whose
    /// stabilizer group is the set of old stabilizers acting trivially on `a`.
    pub fn discard_qubit(&self, a: usize) -> Result<MixedTableau> {
        let n = self.num_qubits();
        Error::check_qubit(a, n)?;
        if n < 2 {
            return Err(Error::InvalidInput("cannot discard the only qubit".into()));
        }
        let mut gens = self.stabilizer_generators();
        for pick_x in [true, false] {
            let hit = |g: &PauliOperator| {
                if pick_x {
                    g.x_bit(a)
                } else {
                    g.z_bit(a)
                }
            };
            if let Some(p) = gens.iter().position(hit) {
                let pivot = gens.remove(p);
                for g in gens.iter_mut() {
                    if hit(g) {
                        *g = pivot.multiply(g)?;
                    }
                }
            }
        }
        let reduced = gens
            .iter()
            .map(|g| g.remove_qubit(a))
            .collect::<Result<Vec<_>>>()?;
        MixedTableau::from_stabilizers(n - 1, &reduced)
    }

    /// A pure state on `2n - r` qubits whose reduced state on the first `n`
    /// qubits is this mixed state. Logical pair `i` is entangled with the new
    /// qubit `n + i` through the stabilizers `Z̄_i Z_{n+i}` and `X̄_i X_{n+i}`.
    pub fn purify(&self) -> Result<Tableau> {
        let n = self.num_qubits();
        let k = n - self.rank;
        let pad = |p: &PauliOperator| {
            if k == 0 {
                p.clone()
            } else {
                p.tensor(&PauliOperator::identity(k))
            }
        };
        let mut destab: Vec<PauliOperator> = self.destabilizer_generators().iter().map(pad).collect();
        let mut stab: Vec<PauliOperator> = self.stabilizer_generators().iter().map(pad).collect();
        let xs = self.x_logicals();
        let zs = self.z_logicals();
        for i in 0..k {
            let anc = |letter| PauliOperator::single(n + k, n + i, letter);
            stab.push(pad(&zs[i]).multiply(&anc(crate::pauli::Letter::Z))?);
            destab.push(anc(crate::pauli::Letter::X));
            stab.push(pad(&xs[i]).multiply(&anc(crate::pauli::Letter::X))?);
            destab.push(pad(&zs[i]));
        }
        Tableau::from_generators(&destab, &stab)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_snapshot(&mut out, b"CHPM", &self.t, Some(self.rank));
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let (t, rank) = read_snapshot(data, b"CHPM")?;
        let rank = rank.unwrap_or_default();
        if rank > t.num_qubits() {
            return Err(Error::Snapshot(format!("rank {rank} exceeds qubit count")));
        }
        t.check_invariants()?;
        Ok(MixedTableau { t, rank })
    }
}

impl std::fmt::Debug for MixedTableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "rank {}", self.rank)?;
        write!(f, "{}", self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::reduce_generators;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn ps(v: &[&str]) -> Vec<PauliOperator> {
        v.iter().map(|s| p(s)).collect()
    }

    fn same_group(a: &[PauliOperator], b: &[PauliOperator]) -> bool {
        reduce_generators(a) == reduce_generators(b)
    }

    fn random_gate(rng: &mut ChaCha8Rng, n: usize) -> Gate {
        match rng.gen_range(0..if n > 1 { 3 } else { 2 }) {
            0 => Gate::Hadamard(rng.gen_range(0..n)),
            1 => Gate::Phase(rng.gen_range(0..n)),
            _ => {
                let a = rng.gen_range(0..n);
                let b = (a + rng.gen_range(1..n)) % n;
                Gate::cnot(a, b)
            }
        }
    }

    #[test]
    fn new_mixed_layout() {
        let m = MixedTableau::new(2, 1).unwrap();
        assert_eq!(m.stabilizer_generators(), ps(&["+ZI"]));
        assert_eq!(m.destabilizer_generators(), ps(&["+XI"]));
        assert_eq!(m.x_logicals(), ps(&["+IX"]));
        assert_eq!(m.z_logicals(), ps(&["+IZ"]));
        let full = MixedTableau::new(3, 3).unwrap();
        assert_eq!(full.into_pure().unwrap(), Tableau::new(3).unwrap());
        let empty = MixedTableau::new(1, 0).unwrap();
        assert!(empty.stabilizer_generators().is_empty());
        assert!(MixedTableau::new(2, 3).is_err());
    }

    #[test]
    fn cnot_moves_logicals() {
        let mut m = MixedTableau::new(2, 1).unwrap();
        m.apply(&Gate::cnot(0, 1)).unwrap();
        assert_eq!(m.x_logicals(), ps(&["+IX"]));
        assert_eq!(m.z_logicals(), ps(&["+ZZ"]));
    }

    #[test]
    fn measuring_mixed_qubit_gains_rank() {
        for coin in [false, true] {
            let mut m = MixedTableau::new(1, 0).unwrap();
            let rec = m.measure_with(0, || coin).unwrap();
            assert!(!rec.deterministic);
            assert_eq!(rec.outcome, coin);
            assert_eq!(m.rank(), 1);
            let want = if coin { "-Z" } else { "+Z" };
            assert_eq!(m.stabilizer_generators(), ps(&[want]));
            m.check_invariants().unwrap();
        }
    }

    #[test]
    fn zero_state_measures_determinately() {
        let mut m = MixedTableau::new(1, 1).unwrap();
        let rec = m.measure_with(0, || unreachable!()).unwrap();
        assert!(rec.deterministic);
        assert!(!rec.outcome);
    }

    #[test]
    fn full_rank_matches_pure_tableau() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut t = Tableau::new(5).unwrap();
        let mut m = MixedTableau::new(5, 5).unwrap();
        for step in 0..300 {
            if step % 7 == 0 {
                let a = rng.gen_range(0..5);
                let coin: bool = rng.gen();
                let r1 = t.measure_with(a, || coin).unwrap();
                let r2 = m.measure_with(a, || coin).unwrap();
                assert_eq!(r1, r2);
            } else {
                let g = random_gate(&mut rng, 5);
                t.apply(&g).unwrap();
                m.apply(&g).unwrap();
            }
            assert_eq!(&t, m.tableau());
        }
    }

    #[test]
    fn random_walk_keeps_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=7 {
            for r in 0..=n {
                let mut m = MixedTableau::new(n, r).unwrap();
                for _ in 0..200 {
                    if rng.gen_bool(0.25) {
                        let before = m.rank();
                        let rec = m.measure(rng.gen_range(0..n), &mut rng).unwrap();
                        assert!(m.rank() == before || (m.rank() == before + 1 && !rec.deterministic));
                    } else {
                        let g = random_gate(&mut rng, n);
                        m.apply(&g).unwrap();
                    }
                    m.check_invariants().unwrap();
                }
            }
        }
    }

    #[test]
    fn complete_basis_is_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=70 {
            let mut t = Tableau::new(n).unwrap();
            for _ in 0..(4 * n) {
                t.apply(&random_gate(&mut rng, n)).unwrap();
            }
            let r = rng.gen_range(0..=n);
            let stabs = t.stabilizer_generators()[..r].to_vec();
            let m = MixedTableau::from_stabilizers(n, &stabs).unwrap();
            m.check_invariants().unwrap();
            assert_eq!(m.stabilizer_generators(), stabs);
        }
    }

    #[test]
    fn complete_basis_rejects_bad_generators() {
        assert!(complete_basis(1, &ps(&["X", "Z"])).is_err());
        assert!(complete_basis(2, &ps(&["ZZ", "ZZ"])).is_err());
        assert!(complete_basis(2, &ps(&["iZZ"])).is_err());
        assert!(complete_basis(1, &ps(&["Z", "-Z"])).is_err());
    }

    #[test]
    fn from_stabilizers_pure() {
        let t = Tableau::from_stabilizers(&ps(&["XX", "ZZ"])).unwrap();
        assert_eq!(t.stabilizer_generators(), ps(&["XX", "ZZ"]));
        t.check_invariants().unwrap();
    }

    #[test]
    fn discard_examples() {
        let bell = MixedTableau::from_stabilizers(2, &ps(&["XX", "ZZ"])).unwrap();
        for a in 0..2 {
            let d = bell.discard_qubit(a).unwrap();
            assert_eq!(d.rank(), 0);
            assert_eq!(d.num_qubits(), 1);
        }
        let zero = MixedTableau::new(2, 2).unwrap();
        let d = zero.discard_qubit(1).unwrap();
        assert_eq!(d.rank(), 1);
        assert_eq!(d.stabilizer_generators(), ps(&["+Z"]));
        let mixed = MixedTableau::from_stabilizers(3, &ps(&["-XXI", "ZZZ"])).unwrap();
        let d = mixed.discard_qubit(2).unwrap();
        assert_eq!(d.stabilizer_generators(), ps(&["-XX"]));
        let d = mixed.discard_qubit(0).unwrap();
        assert_eq!(d.rank(), 0);
        let ghz = MixedTableau::from_stabilizers(3, &ps(&["XXX", "ZZI", "IZZ"])).unwrap();
        let d = ghz.discard_qubit(0).unwrap();
        assert!(same_group(&d.stabilizer_generators(), &ps(&["ZZ"])));
        assert!(MixedTableau::new(1, 1).unwrap().discard_qubit(0).is_err());
    }

    #[test]
    fn purify_examples() {
        let m = MixedTableau::new(1, 0).unwrap();
        let t = m.purify().unwrap();
        assert!(same_group(&t.stabilizer_generators(), &ps(&["XX", "ZZ"])));
        let pure = MixedTableau::new(3, 3).unwrap();
        assert_eq!(pure.purify().unwrap(), Tableau::new(3).unwrap());
    }

    #[test]
    fn purify_then_discard_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 1..=5 {
            for r in 0..=n {
                let mut m = MixedTableau::new(n, r).unwrap();
                for _ in 0..30 {
                    m.apply(&random_gate(&mut rng, n)).unwrap();
                }
                let pure = m.purify().unwrap();
                let mut back = MixedTableau::from_pure(pure);
                for q in (n..back.num_qubits()).rev() {
                    back = back.discard_qubit(q).unwrap();
                }
                assert!(same_group(
                    &back.stabilizer_generators(),
                    &m.stabilizer_generators()
                ));
            }
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let mut m = MixedTableau::new(4, 2).unwrap();
        m.apply(&Gate::Hadamard(3)).unwrap();
        let bytes = m.to_bytes();
        assert_eq!(&bytes[..4], b"CHPM");
        assert_eq!(MixedTableau::from_bytes(&bytes).unwrap(), m);
        assert!(Tableau::from_bytes(&bytes).is_err());
    }
}
