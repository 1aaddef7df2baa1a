//! Magnitude of the inner product between two stabilizer states.
//!
//! The circuit `V` that maps `|ψ⟩` to `|0…0⟩` is applied to `|φ⟩`; then
//! `|⟨ψ|φ⟩| = |⟨0…0|Vφ⟩|`. After row-reducing the stabilizer of `V|φ⟩`, the
//! rows without an x part are `±Z`-type. A negative one means `V|φ⟩` is
//! orthogonal to `|0…0⟩`; otherwise the overlap is `2^{-s/2}` where `s` is
//! the number of rows with an x part.

use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::reduce_generators;
use crate::synth::{apply_fast, inverse_canonical};
use crate::tableau::Tableau;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult {
    pub is_zero: bool,
    /// Exponent in `2^{-s/2}`; 0 when the overlap vanishes.
    pub s: usize,
    pub value: f64,
}

impl fmt::Display for OverlapResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            write!(f, "zero 0")
        } else {
            write!(f, "2^-{}/2 {}", self.s, self.value)
        }
    }
}

pub fn inner_product(psi: &Tableau, phi: &Tableau) -> Result<OverlapResult> {
    Error::check_dims(psi.num_qubits(), phi.num_qubits())?;
    phi.check_invariants()?;
    let v = inverse_canonical(psi)?.gates();
    let moved = apply_fast(phi, &v);
    let rows = reduce_generators(&moved.stabilizer_generators());
    let n = psi.num_qubits();
    let has_x = |p: &crate::pauli::PauliOperator| (0..n).any(|j| p.x_bit(j));
    let s = rows.iter().filter(|p| has_x(p)).count();
    let conflict = rows.iter().any(|p| !has_x(p) && p.phase() == 2);
    Ok(if conflict {
        OverlapResult {
            is_zero: true,
            s: 0,
            value: 0.0,
        }
    } else {
        OverlapResult {
            is_zero: false,
            s,
            value: 2f64.powf(-(s as f64) / 2.0),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::Gate;
    use crate::oracle::state_of_tableau;
    use crate::synth::tableau_of;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_gates(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Gate> {
        (0..count)
            .map(|_| match rng.gen_range(0..if n > 1 { 3 } else { 2 }) {
                0 => Gate::Hadamard(rng.gen_range(0..n)),
                1 => Gate::Phase(rng.gen_range(0..n)),
                _ => {
                    let a = rng.gen_range(0..n);
                    Gate::cnot(a, (a + rng.gen_range(1..n)) % n)
                }
            })
            .collect()
    }

    #[test]
    fn self_overlap_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=8 {
            let t = tableau_of(n, &random_gates(&mut rng, n, 30)).unwrap();
            let r = inner_product(&t, &t).unwrap();
            assert_eq!((r.is_zero, r.s, r.value), (false, 0, 1.0));
        }
    }

    #[test]
    fn orthogonal_basis_states() {
        let zero = Tableau::new(1).unwrap();
        let one = tableau_of(1, &[Gate::Hadamard(0), Gate::Phase(0), Gate::Phase(0), Gate::Hadamard(0)]).unwrap();
        let r = inner_product(&zero, &one).unwrap();
        assert!(r.is_zero);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn bell_versus_zero() {
        let bell = Tableau::from_stabilizers(&["XX".parse().unwrap(), "ZZ".parse().unwrap()]).unwrap();
        let zero = Tableau::new(2).unwrap();
        let r = inner_product(&bell, &zero).unwrap();
        assert_eq!(r.s, 1);
        assert!((r.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn matches_dense_oracle_and_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let a = tableau_of(n, &random_gates(&mut rng, n, 25)).unwrap();
            let b = tableau_of(n, &random_gates(&mut rng, n, 25)).unwrap();
            let r = inner_product(&a, &b).unwrap();
            let dense = state_of_tableau(&a)
                .unwrap()
                .inner_product(&state_of_tableau(&b).unwrap())
                .unwrap()
                .norm();
            assert!((r.value - dense).abs() < 1e-12, "{} vs {dense}", r.value);
            assert_eq!(inner_product(&b, &a).unwrap(), r);
            let extra = random_gates(&mut rng, n, 10);
            let (mut a2, mut b2) = (a.clone(), b.clone());
            a2.apply_all(&extra).unwrap();
            b2.apply_all(&extra).unwrap();
            assert_eq!(inner_product(&a2, &b2).unwrap(), r);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let a = Tableau::new(2).unwrap();
        let b = Tableau::new(3).unwrap();
        assert!(matches!(inner_product(&a, &b), Err(Error::Dimension { .. })));
    }
}
