use std::fmt;

use crate::error::{Error, Result};

/// One of the three unitary stabilizer gates. Qubits are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    Hadamard(usize),
    Phase(usize),
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    /// Largest qubit index touched.
    pub fn max_qubit(&self) -> usize {
        match *self {
            Gate::Cnot { control, target } => control.max(target),
            Gate::Hadamard(a) | Gate::Phase(a) => a,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            Gate::Cnot { control, target } => {
                Error::check_qubit(control, n)?;
                Error::check_qubit(target, n)?;
                if control == target {
                    return Err(Error::SameQubit(control));
                }
                Ok(())
            }
            Gate::Hadamard(a) | Gate::Phase(a) => Error::check_qubit(a, n),
        }
    }

    /// Gates whose product is the inverse of this gate.
    pub fn inverse(&self) -> Vec<Gate> {
        match *self {
            Gate::Phase(a) => vec![Gate::Phase(a); 3],
            g => vec![g],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Cnot { control, target } => write!(f, "c {control} {target}"),
            Gate::Hadamard(a) => write!(f, "h {a}"),
            Gate::Phase(a) => write!(f, "p {a}"),
        }
    }
}
