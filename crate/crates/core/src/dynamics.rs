//! Liouvillian construction, time evolution and steady states.
//!
//! Density matrices are vectorized by column stacking, so
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. The generator is
//!
//! ```text
//! dρ/dt = i[ρ, H] + Σ_k ( L_k ρ L_k† − ½ {L_k† L_k, ρ} )
//! ```
//!
//! and is time independent, so propagation over a fixed interval reduces to
//! one precomputed matrix exponential applied repeatedly.

use std::collections::HashMap;

use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};
use crate::linalg::{
    c, check_density_matrix, hermiticity_defect, kron, trace, trace_distance, unvectorize, vectorize,
    ComplexMatrix, DensityTolerance, StateVector, C64,
};
use crate::models::SystemModel;

/// Sparse superoperator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    superop: CsrMatrix<C64>,
    frobenius: f64,
    decay_rate: Option<f64>,
}

pub fn build_liouvillian(model: &SystemModel) -> Liouvillian {
    Liouvillian::from_operators(&model.hamiltonian, &model.lindblads)
}

impl Liouvillian {
    pub fn from_operators(hamiltonian: &ComplexMatrix, lindblads: &[ComplexMatrix]) -> Self {
        let n = hamiltonian.nrows();
        let id = ComplexMatrix::identity(n, n);
        let i = c(0.0, 1.0);
        // i ρ H − i H ρ
        let mut dense = kron(&hamiltonian.transpose(), &id) * i - kron(&id, hamiltonian) * i;
        let mut decay = ComplexMatrix::zeros(n, n);
        for l in lindblads {
            let ldl = l.adjoint() * l;
            dense += kron(&l.conjugate(), l);
            dense -= (kron(&id, &ldl) + kron(&ldl.transpose(), &id)) * c(0.5, 0.0);
            decay += ldl;
        }
        // Smallest non-zero single-excitation loss rate: γ for both schemes.
        let decay_rate = decay
            .diagonal()
            .iter()
            .map(|z| z.re)
            .filter(|r| *r > 0.0)
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r))));
        Self::from_dense(&dense, decay_rate)
    }

    fn from_dense(dense: &ComplexMatrix, decay_rate: Option<f64>) -> Self {
        let side = dense.nrows();
        let mut coo = CooMatrix::new(side, side);
        for col in 0..side {
            for row in 0..side {
                let v = dense[(row, col)];
                if v.re != 0.0 || v.im != 0.0 {
                    coo.push(row, col, v);
                }
            }
        }
        let dim = (side as f64).sqrt().round() as usize;
        Self {
            dim,
            superop: CsrMatrix::from(&coo),
            frobenius: dense.norm(),
            decay_rate,
        }
    }

    /// Side of the density matrices this generator acts on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn superop(&self) -> &CsrMatrix<C64> {
        &self.superop
    }

    pub fn nnz(&self) -> usize {
        self.superop.nnz()
    }

    /// Frobenius norm of the superoperator.
    pub fn norm(&self) -> f64 {
        self.frobenius
    }

    /// Slowest single-excitation decay rate (γ for both schemes), if any
    /// dissipator is present.
    pub fn decay_rate(&self) -> Option<f64> {
        self.decay_rate
    }

    pub fn apply_vec(&self, v: &StateVector) -> StateVector {
        let (offsets, cols, vals) = self.superop.csr_data();
        StateVector::from_fn(self.superop.nrows(), |row, _| {
            let (start, end) = (offsets[row], offsets[row + 1]);
            cols[start..end]
                .iter()
                .zip(&vals[start..end])
                .map(|(&j, &a)| a * v[j])
                .sum()
        })
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: rho.nrows() });
        }
        unvectorize(&self.apply_vec(&vectorize(rho)), self.dim)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let side = self.superop.nrows();
        let mut m = ComplexMatrix::zeros(side, side);
        for (i, j, v) in self.superop.triplet_iter() {
            m[(i, j)] = *v;
        }
        m
    }

    /// `‖L vec ρ‖ / (‖L‖_F ‖vec ρ‖)`.
    pub fn relative_residual(&self, rho: &ComplexMatrix) -> Result<f64> {
        let v = vectorize(rho);
        let denom = self.frobenius * v.norm();
        if denom == 0.0 {
            return Ok(0.0);
        }
        Ok(self.apply_vec(&v).norm() / denom)
    }

    pub fn propagator(&self, dt: f64) -> Propagator {
        Propagator { dt, matrix: (self.to_dense() * c(dt, 0.0)).exp() }
    }
}

/// `exp(L·dt)` as a dense matrix.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub dt: f64,
    pub matrix: ComplexMatrix,
}

impl Propagator {
    pub fn apply_vec(&self, v: &StateVector) -> StateVector {
        &self.matrix * v
    }

    /// Propagator over twice the interval.
    pub fn squared(&self) -> Propagator {
        Propagator { dt: 2.0 * self.dt, matrix: &self.matrix * &self.matrix }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Exact propagation with cached `exp(L·Δt)` for every distinct grid
    /// interval.
    Propagator,
    /// Dormand–Prince 5(4) with the sparse generator.
    AdaptiveRk,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { method: Method::Propagator, rtol: 1e-8, atol: 1e-10 }
    }
}

/// Time series of an evolution. Full states are kept unless a reducer was
/// supplied, in which case `records` holds its output at every time.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
    pub records: Vec<Vec<f64>>,
    pub retained_full: bool,
    /// Minimum eigenvalue of every stored state.
    pub min_eigenvalues: Vec<f64>,
    /// `|tr ρ − 1|` of every stored state.
    pub trace_errors: Vec<f64>,
}

fn validate_grid(times: &[f64]) -> Result<()> {
    match times.first() {
        Some(t) if *t == 0.0 => {}
        _ => return Err(Error::InvalidArgument("time grid must start at 0".into())),
    }
    if times.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Evolves `rho0` over `times` and keeps every state.
pub fn evolve(l: &Liouvillian, rho0: &ComplexMatrix, times: &[f64], opts: &EvolveOptions) -> Result<Trajectory> {
    run_evolution(l, rho0, times, opts, None::<fn(&ComplexMatrix) -> Vec<f64>>)
}

/// Evolves `rho0` and records `reduce(ρ(t))` instead of the states.
pub fn evolve_reduced<F>(
    l: &Liouvillian,
    rho0: &ComplexMatrix,
    times: &[f64],
    opts: &EvolveOptions,
    reduce: F,
) -> Result<Trajectory>
where
    F: Fn(&ComplexMatrix) -> Vec<f64>,
{
    run_evolution(l, rho0, times, opts, Some(reduce))
}

fn run_evolution<F>(
    l: &Liouvillian,
    rho0: &ComplexMatrix,
    times: &[f64],
    opts: &EvolveOptions,
    reduce: Option<F>,
) -> Result<Trajectory>
where
    F: Fn(&ComplexMatrix) -> Vec<f64>,
{
    if rho0.nrows() != l.dim() || rho0.ncols() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), actual: rho0.nrows() });
    }
    check_density_matrix(rho0, DensityTolerance::STRICT)?;
    validate_grid(times)?;

    let mut traj = Trajectory {
        times: times.to_vec(),
        states: Vec::new(),
        records: Vec::new(),
        retained_full: reduce.is_none(),
        min_eigenvalues: Vec::with_capacity(times.len()),
        trace_errors: Vec::with_capacity(times.len()),
    };
    let mut store = |rho: &ComplexMatrix| -> Result<()> {
        let defect = hermiticity_defect(rho);
        let tol = DensityTolerance::PROPAGATED;
        if defect > tol.hermiticity {
            return Err(Error::IntegrationFailure {
                what: "Hermiticity",
                achieved: defect,
                required: tol.hermiticity,
            });
        }
        let tr_err = (trace(rho) - c(1.0, 0.0)).norm();
        if tr_err > tol.trace {
            return Err(Error::IntegrationFailure { what: "trace preservation", achieved: tr_err, required: tol.trace });
        }
        let min = check_density_matrix(rho, tol).map_err(|_| Error::IntegrationFailure {
            what: "positivity",
            achieved: min_eigenvalue(rho),
            required: tol.positivity,
        })?;
        traj.min_eigenvalues.push(min);
        traj.trace_errors.push(tr_err);
        match &reduce {
            Some(f) => traj.records.push(f(rho)),
            None => traj.states.push(rho.clone()),
        }
        Ok(())
    };

    let mut v = vectorize(rho0);
    store(rho0)?;
    let mut cache: HashMap<u64, Propagator> = HashMap::new();
    let mut reference: Vec<f64> = Vec::new();
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        v = match opts.method {
            Method::Propagator => {
                // Grid intervals equal to 1e-12 relative share one propagator.
                let key = match reference.iter().find(|r| ((*r - dt) / dt).abs() < 1e-12) {
                    Some(r) => r.to_bits(),
                    None => {
                        reference.push(dt);
                        dt.to_bits()
                    }
                };
                cache.entry(key).or_insert_with(|| l.propagator(f64::from_bits(key))).apply_vec(&v)
            }
            Method::AdaptiveRk => dormand_prince(l, v, dt, opts.rtol, opts.atol)?,
        };
        store(&unvectorize(&v, l.dim())?)?;
    }
    Ok(traj)
}

fn min_eigenvalue(rho: &ComplexMatrix) -> f64 {
    let sym = (rho + rho.adjoint()) * c(0.5, 0.0);
    sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `dv/dt = L v` over `span` with adaptive Dormand–Prince steps.
fn dormand_prince(l: &Liouvillian, mut v: StateVector, span: f64, rtol: f64, atol: f64) -> Result<StateVector> {
    let scale = l.norm().max(f64::MIN_POSITIVE);
    let mut h = (0.1 / scale).min(span);
    let mut t = 0.0;
    let mut k1 = l.apply_vec(&v);
    let mut rejected = 0usize;
    while t < span {
        if t + h > span {
            h = span - t;
        }
        let mut k: Vec<StateVector> = Vec::with_capacity(7);
        k.push(k1.clone());
        for row in &DP_A[1..] {
            let mut y = v.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = row[j];
                if a != 0.0 {
                    y.axpy(c(h * a, 0.0), kj, c(1.0, 0.0));
                }
            }
            k.push(l.apply_vec(&y));
        }
        let mut next = v.clone();
        for (j, kj) in k.iter().enumerate().take(6) {
            let b = DP_A[6][j];
            if b != 0.0 {
                next.axpy(c(h * b, 0.0), kj, c(1.0, 0.0));
            }
        }
        let mut err = StateVector::zeros(v.len());
        for (j, kj) in k.iter().enumerate() {
            if DP_E[j] != 0.0 {
                err.axpy(c(h * DP_E[j], 0.0), kj, c(1.0, 0.0));
            }
        }
        let err_norm = (err
            .iter()
            .zip(v.iter().zip(next.iter()))
            .map(|(e, (a, b))| {
                let sc = atol + rtol * a.norm().max(b.norm());
                (e.norm() / sc).powi(2)
            })
            .sum::<f64>()
            / v.len() as f64)
            .sqrt();
        if err_norm <= 1.0 {
            t += h;
            v = next;
            // FSAL: the last stage is the derivative at the accepted point.
            k1 = k.pop().expect("seven stages");
            rejected = 0;
        } else {
            rejected += 1;
            if rejected > 50 || h < 1e-300 {
                return Err(Error::IntegrationFailure { what: "local error", achieved: err_norm, required: 1.0 });
            }
        }
        let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyBackend {
    /// Null vector of the superoperator with the trace condition replacing
    /// one redundant equation.
    NullSpace,
    /// Propagation until the state stops changing.
    LongTime,
}

impl SteadyBackend {
    pub fn name(self) -> &'static str {
        match self {
            SteadyBackend::NullSpace => "null-space",
            SteadyBackend::LongTime => "long-time",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    pub backend: SteadyBackend,
    /// Also run the other backend and fail on disagreement.
    pub cross_check: bool,
    /// Relative residual `‖Lρ‖/(‖L‖‖ρ‖)` a solution must reach.
    pub residual_tol: f64,
    /// Smallest-to-largest singular value ratio of the bordered generator
    /// below which the steady state is reported as non-unique.
    pub degeneracy_tol: f64,
    /// Trace distance above which cross-checked backends count as disagreeing.
    pub cross_check_tol: f64,
    /// Long-time backend: sampling interval in units of 1/γ.
    pub sample_interval: f64,
    /// Long-time backend: model-time cap in units of 1/γ.
    pub max_time: f64,
    /// Long-time backend: bound on the extrapolated remaining trace distance.
    pub tail_tol: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            backend: SteadyBackend::NullSpace,
            cross_check: false,
            residual_tol: 1e-8,
            degeneracy_tol: 1e-13,
            cross_check_tol: 1e-4,
            sample_interval: 1.0,
            max_time: 1e5,
            tail_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: ComplexMatrix,
    pub residual: f64,
    pub backend: SteadyBackend,
    /// Model time the long-time backend needed.
    pub convergence_time: Option<f64>,
}

pub fn steady_state(l: &Liouvillian, opts: &SteadyOptions) -> Result<SteadyState> {
    let primary = match opts.backend {
        SteadyBackend::NullSpace => null_space_steady_state(l, opts)?,
        SteadyBackend::LongTime => long_time_steady_state(l, opts)?,
    };
    if opts.cross_check {
        let other = match opts.backend {
            SteadyBackend::NullSpace => long_time_steady_state(l, opts)?,
            SteadyBackend::LongTime => null_space_steady_state(l, opts)?,
        };
        let d = trace_distance(&primary.rho, &other.rho)?;
        if d > opts.cross_check_tol {
            return Err(Error::NonUniqueSteadyState(format!(
                "backends disagree by trace distance {d:.3e}"
            )));
        }
    }
    Ok(primary)
}

/// Generator with its first row replaced by the (scaled) trace functional.
fn bordered_generator(l: &Liouvillian) -> ComplexMatrix {
    let n = l.dim();
    let mut a = l.to_dense();
    let scale = l.norm() / (n as f64).sqrt();
    a.row_mut(0).fill(c(0.0, 0.0));
    for i in 0..n {
        a[(0, i * n + i)] = c(scale, 0.0);
    }
    a
}

/// Ratio of the two smallest singular values of the generator to its
/// largest. A second vanishing singular value means more than one
/// stationary state.
pub fn null_space_gap(l: &Liouvillian) -> f64 {
    let sv = l.to_dense().singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    let max = s.last().copied().unwrap_or(0.0);
    if max == 0.0 || s.len() < 2 {
        return 0.0;
    }
    s[1] / max
}

pub fn null_space_steady_state(l: &Liouvillian, opts: &SteadyOptions) -> Result<SteadyState> {
    let n = l.dim();
    if l.norm() == 0.0 {
        return Err(Error::NonUniqueSteadyState("the generator vanishes identically".into()));
    }
    let gap = null_space_gap(l);
    if gap < opts.degeneracy_tol {
        return Err(Error::NonUniqueSteadyState(format!(
            "second singular value of the generator is {gap:.3e} relative to the largest"
        )));
    }
    let a = bordered_generator(l);
    let mut rhs = StateVector::zeros(n * n);
    rhs[0] = a[(0, 0)];
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NonUniqueSteadyState("bordered generator is singular".into()))?;
    let rho = finalize(&unvectorize(&sol, n)?);
    let residual = l.relative_residual(&rho)?;
    if residual > opts.residual_tol {
        return Err(Error::IntegrationFailure { what: "steady-state residual", achieved: residual, required: opts.residual_tol });
    }
    Ok(SteadyState { rho, residual, backend: SteadyBackend::NullSpace, convergence_time: None })
}

/// Hermitian part, trace renormalized to exactly one.
fn finalize(rho: &ComplexMatrix) -> ComplexMatrix {
    let h = (rho + rho.adjoint()) * c(0.5, 0.0);
    let tr = trace(&h).re;
    h / c(tr, 0.0)
}

pub fn long_time_steady_state(l: &Liouvillian, opts: &SteadyOptions) -> Result<SteadyState> {
    let n = l.dim();
    let gamma = l.decay_rate().ok_or_else(|| {
        Error::NonUniqueSteadyState("no dissipation: every diagonal state in the eigenbasis of H is stationary".into())
    })?;
    let dt = opts.sample_interval / gamma;
    let max_time = opts.max_time / gamma;
    let step = l.propagator(dt);
    let mut rho = ComplexMatrix::identity(n, n) / c(n as f64, 0.0);
    let mut v = vectorize(&rho);
    let mut t = 0.0;
    let mut prev_change: Option<f64> = None;
    let mut residual = l.relative_residual(&rho)?;
    while t < max_time {
        let next_v = step.apply_vec(&v);
        t += dt;
        let next = unvectorize(&next_v, n)?;
        let change = trace_distance(&finalize(&next), &finalize(&rho))?;
        residual = l.relative_residual(&next)?;
        rho = next;
        v = next_v;
        // Geometric tail estimate of the distance still to travel.
        let tail = match prev_change {
            Some(p) if p > 0.0 && change < p => change * (change / p) / (1.0 - change / p),
            Some(_) => f64::INFINITY,
            None => f64::INFINITY,
        };
        if residual <= opts.residual_tol && (change == 0.0 || tail <= opts.tail_tol) {
            let rho = finalize(&rho);
            let residual = l.relative_residual(&rho)?;
            return Ok(SteadyState { rho, residual, backend: SteadyBackend::LongTime, convergence_time: Some(t) });
        }
        prev_change = Some(change);
    }
    Err(Error::NotConverged { max_time, residual })
}
