#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use rydpump::{ComplexMatrix, StateVector, C64};

pub fn ginibre(rng: &mut StdRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Random full-rank density matrix `GG†/tr(GG†)`.
pub fn random_density(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

pub fn random_pure(rng: &mut StdRng, n: usize) -> StateVector {
    let v = StateVector::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

pub fn random_hermitian(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Random unitary from the QR factor of a complex Ginibre matrix.
pub fn random_unitary(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    ginibre(rng, n, n).qr().q()
}

/// Right-hand side of the master equation evaluated directly with dense
/// matrix products.
pub fn master_rhs(h: &ComplexMatrix, lindblads: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    let mut out = (rho * h - h * rho) * i;
    for l in lindblads {
        let ld = l.adjoint();
        let ldl = &ld * l;
        out += l * rho * &ld - (&ldl * rho + rho * &ldl) * C64::new(0.5, 0.0);
    }
    out
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Two-atom basis ket `|m n⟩` for local dimensions `(da, db)`.
pub fn ket(da: usize, db: usize, m: usize, n: usize) -> StateVector {
    let mut v = StateVector::zeros(da * db);
    v[m * db + n] = C64::new(1.0, 0.0);
    v
}

pub fn outer(a: &StateVector, b: &StateVector) -> ComplexMatrix {
    a * b.adjoint()
}
