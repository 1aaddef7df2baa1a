//! Counting pure stabilizer states.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::pauli::{reduce_generators, PauliOperator};
use crate::tableau::Tableau;

/// Largest `n` accepted by [`enumerate_states`].
pub const MAX_ENUMERATION_QUBITS: usize = 4;

/// `2^n ∏_{k=0}^{n-1} (2^{n-k} + 1)`, or `None` on overflow.
pub fn count_states_formula(n: usize) -> Option<u128> {
    let mut acc: u128 = 1u128.checked_shl(n as u32)?;
    for k in 0..n {
        let f = 1u128.checked_shl((n - k) as u32)?.checked_add(1)?;
        acc = acc.checked_mul(f)?;
    }
    Some(acc)
}

/// Row-reduced signed stabilizer generators; equal for two tableaus exactly
/// when they describe the same state.
pub fn state_key(t: &Tableau) -> Vec<PauliOperator> {
    reduce_generators(&t.stabilizer_generators())
}

fn all_gates(n: usize) -> Vec<Gate> {
    let mut g = Vec::new();
    for a in 0..n {
        g.push(Gate::Hadamard(a));
        g.push(Gate::Phase(a));
        for b in 0..n {
            if a != b {
                g.push(Gate::cnot(a, b));
            }
        }
    }
    g
}

/// Breadth-first search from `|0…0⟩` over single gates, counting distinct
/// states.
pub fn enumerate_states(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    if n > MAX_ENUMERATION_QUBITS {
        return Err(Error::ResourceCap(format!(
            "enumeration is limited to {MAX_ENUMERATION_QUBITS} qubits"
        )));
    }
    let gates = all_gates(n);
    let start = Tableau::new(n)?;
    let mut seen = HashSet::new();
    seen.insert(state_key(&start));
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for g in &gates {
            let mut u = t.clone();
            u.apply(g)?;
            if seen.insert(state_key(&u)) {
                queue.push_back(u);
            }
        }
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        let want = [6u128, 60, 1080, 36720];
        for (n, w) in (1..=4).zip(want) {
            assert_eq!(count_states_formula(n), Some(w));
        }
        assert!(count_states_formula(200).is_none());
    }

    #[test]
    fn enumeration_matches_formula() {
        for n in 1..=3 {
            assert_eq!(enumerate_states(n).unwrap() as u128, count_states_formula(n).unwrap());
        }
    }

    #[test]
    fn limits() {
        assert!(enumerate_states(0).is_err());
        assert!(matches!(enumerate_states(9), Err(Error::ResourceCap(_))));
    }
}
