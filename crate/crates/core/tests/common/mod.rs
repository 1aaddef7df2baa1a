#![allow(dead_code)]

use chp_core::{Gate, Tableau};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub fn random_gate<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Gate {
    let kinds = if n > 1 { 3 } else { 2 };
    match rng.gen_range(0..kinds) {
        0 => Gate::Hadamard(rng.gen_range(0..n)),
        1 => Gate::Phase(rng.gen_range(0..n)),
        _ => {
            let a = rng.gen_range(0..n);
            Gate::cnot(a, (a + rng.gen_range(1..n)) % n)
        }
    }
}

pub fn random_gates<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> Vec<Gate> {
    (0..count).map(|_| random_gate(rng, n)).collect()
}

pub fn random_tableau<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> Tableau {
    let mut t = Tableau::new(n).unwrap();
    t.apply_all(&random_gates(rng, n, count)).unwrap();
    t
}

pub fn t_gate() -> DMatrix<Complex64> {
    let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    DMatrix::from_row_slice(2, 2, &[o, z, z, w])
}

/// A random full-rank density matrix on `b` qubits.
pub fn random_block<R: Rng + ?Sized>(rng: &mut R, b: usize) -> DMatrix<Complex64> {
    let d = 1 << b;
    let m = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let rho = &m * m.adjoint();
    let tr = rho.trace();
    rho / tr
}
