//! Hamiltonians, jump operators and named states of the two pumping schemes.
//!
//! The Bell scheme uses three levels per atom, `{f, a, r}`. The qutrit
//! scheme gives atom 1 the levels `{f, a, g, r_L, r_R}` and atom 2 the levels
//! `{f, a, g, r}`. Both Rydberg states of atom 1 interact with the Rydberg
//! state of atom 2 with the same strength.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{c, kron, projector, BipartiteDims, ComplexMatrix, StateVector, C64};

/// Physical parameters in angular-frequency units (rad/s) and plain rates (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Optical Rabi frequency Ω driving ground → Rydberg.
    pub rabi_optical: C64,
    /// Microwave Rabi frequency of atom 1 (and of both atoms in the Bell scheme).
    pub rabi_microwave_1: C64,
    /// Microwave Rabi frequency magnitude of atom 2 in the qutrit scheme; its
    /// sign is set by the target variant.
    pub rabi_microwave_2: C64,
    pub detuning: f64,
    pub rydberg_u: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("detuning", self.detuning),
            ("rydberg_u", self.rydberg_u),
            ("gamma", self.gamma),
        ];
        for (name, v) in reals {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        for (name, z) in [
            ("rabi_optical", self.rabi_optical),
            ("rabi_microwave_1", self.rabi_microwave_1),
            ("rabi_microwave_2", self.rabi_microwave_2),
        ] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// `U_rr = 2Δ` to relative precision 1e-9.
    pub fn is_resonant_pumping(&self) -> bool {
        (self.rydberg_u - 2.0 * self.detuning).abs() <= 1e-9 * self.detuning
    }
}

/// How the microwave Rabi frequency is quoted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Microwave {
    /// ω/Ω, dimensionless.
    Relative(f64),
    /// ω/2π in kHz.
    Khz(f64),
}

/// Parameters in laboratory units: `X/2π` in MHz, ω either
/// relative to Ω or as `ω/2π` in kHz, γ in kHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabParams {
    pub rabi_mhz: f64,
    pub microwave: Microwave,
    /// Magnitude of the atom-2 microwave in the qutrit scheme; `None` reuses
    /// `microwave`.
    pub microwave_2: Option<Microwave>,
    pub delta_mhz: f64,
    pub urr_mhz: f64,
    pub gamma_khz: f64,
    /// Read γ as an angular rate (multiply by 2π) instead of a plain rate.
    pub gamma_angular: bool,
}

const TWO_PI_MHZ: f64 = 2.0 * PI * 1e6;

impl LabParams {
    pub fn to_model_params(&self) -> ModelParams {
        let rabi = TWO_PI_MHZ * self.rabi_mhz;
        let angular = |m: Microwave| match m {
            Microwave::Relative(rel) => rel * rabi,
            Microwave::Khz(khz) => 2.0 * PI * 1e3 * khz,
        };
        let mw = angular(self.microwave);
        let mw2 = self.microwave_2.map_or(mw, angular);
        let gamma_scale = if self.gamma_angular { 2.0 * PI } else { 1.0 };
        ModelParams {
            rabi_optical: c(rabi, 0.0),
            rabi_microwave_1: c(mw, 0.0),
            rabi_microwave_2: c(mw2, 0.0),
            detuning: TWO_PI_MHZ * self.delta_mhz,
            rydberg_u: TWO_PI_MHZ * self.urr_mhz,
            gamma: gamma_scale * 1e3 * self.gamma_khz,
        }
    }

    pub fn microwave_khz(&self) -> f64 {
        match self.microwave {
            Microwave::Relative(rel) => rel * self.rabi_mhz * 1e3,
            Microwave::Khz(khz) => khz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Bell,
    Qutrit,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Bell => "bell",
            Scheme::Qutrit => "qutrit",
        }
    }

    pub fn dims(self) -> BipartiteDims {
        match self {
            Scheme::Bell => BipartiteDims::new(3, 3),
            Scheme::Qutrit => BipartiteDims::new(5, 4),
        }
    }

    pub fn default_target(self) -> Target {
        match self {
            Scheme::Bell => Target::Singlet,
            Scheme::Qutrit => Target::Phi,
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bell" => Ok(Scheme::Bell),
            "qutrit" | "3d" => Ok(Scheme::Qutrit),
            _ => Err(Error::InvalidArgument(format!("unknown scheme `{s}` (expected bell or qutrit)"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Entangled state the dissipation is engineered to prepare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    /// `(|fa⟩ − |af⟩)/√2`
    Singlet,
    /// `(|fa⟩ + |af⟩)/√2`, prepared by a π phase on the microwave of atom 2.
    Triplet,
    /// `(|ff⟩ + |aa⟩ + |gg⟩)/√3`, prepared with ω₁ = −ω₂.
    Phi,
    /// `(|ff⟩ − |aa⟩ + |gg⟩)/√3`, prepared with ω₁ = ω₂.
    PhiPrime,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Singlet => "singlet",
            Target::Triplet => "triplet",
            Target::Phi => "phi",
            Target::PhiPrime => "phi-prime",
        }
    }

    pub fn scheme(self) -> Scheme {
        match self {
            Target::Singlet | Target::Triplet => Scheme::Bell,
            Target::Phi | Target::PhiPrime => Scheme::Qutrit,
        }
    }

    /// Key of the target in [`SystemModel::named_states`].
    pub fn state_name(self) -> &'static str {
        match self {
            Target::Singlet => "S",
            Target::Triplet => "T",
            Target::Phi => "phi",
            Target::PhiPrime => "phi_prime",
        }
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "singlet" | "S" => Ok(Target::Singlet),
            "triplet" | "T" => Ok(Target::Triplet),
            "phi" => Ok(Target::Phi),
            "phi-prime" | "phi_prime" | "phiprime" => Ok(Target::PhiPrime),
            _ => Err(Error::InvalidArgument(format!(
                "unknown target `{s}` (expected singlet, triplet, phi or phi-prime)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemeVariant {
    pub scheme: Scheme,
    pub target: Target,
}

impl SchemeVariant {
    pub fn new(scheme: Scheme, target: Target) -> Result<Self> {
        if target.scheme() != scheme {
            return Err(Error::InvalidArgument(format!(
                "target {} does not belong to the {} scheme",
                target.name(),
                scheme.name()
            )));
        }
        Ok(Self { scheme, target })
    }

    pub fn of(target: Target) -> Self {
        Self { scheme: target.scheme(), target }
    }
}

/// A fully assembled two-atom model.
#[derive(Debug, Clone)]
pub struct SystemModel {
    pub dims: BipartiteDims,
    pub hamiltonian: ComplexMatrix,
    pub lindblads: Vec<ComplexMatrix>,
    /// Single-atom level names of atom 1 and atom 2.
    pub basis_labels: [Vec<&'static str>; 2],
    pub named_states: BTreeMap<String, StateVector>,
    pub variant: SchemeVariant,
    pub params: ModelParams,
}

impl SystemModel {
    pub fn state(&self, name: &str) -> Result<&StateVector> {
        self.named_states.get(name).ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn target_state(&self) -> &StateVector {
        &self.named_states[self.variant.target.state_name()]
    }

    /// Two-atom product basis vector `|m⟩₁|n⟩₂` by level names.
    pub fn product_state(&self, m: &str, n: &str) -> Result<StateVector> {
        let i = level_index(&self.basis_labels[0], m)?;
        let j = level_index(&self.basis_labels[1], n)?;
        Ok(basis_vector(self.dims.total(), self.dims.index(i, j)))
    }

    /// Orthonormal ground-subspace basis whose populations the figures plot.
    pub fn population_basis(&self) -> Vec<(String, StateVector)> {
        let names: &[&str] = match self.variant.target {
            Target::Singlet | Target::Triplet => &["ff", "S", "T", "aa"],
            Target::Phi => &["fa", "fg", "af", "ag", "gf", "ga", "phi", "varphi", "psi"],
            Target::PhiPrime => &["fa", "fg", "af", "ag", "gf", "ga", "phi_prime", "varphi_prime", "psi"],
        };
        names
            .iter()
            .map(|n| (n.to_string(), self.named_states[*n].clone()))
            .collect()
    }
}

fn level_index(labels: &[&str], name: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| *l == name)
        .ok_or_else(|| Error::UnknownState(name.to_string()))
}

pub fn basis_vector(n: usize, i: usize) -> StateVector {
    let mut v = StateVector::zeros(n);
    v[i] = c(1.0, 0.0);
    v
}

/// `|i⟩⟨j|` on an `n`-level atom.
fn transition(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = c(1.0, 0.0);
    m
}

/// Sets `m[i][j] = z` and `m[j][i] = z*`.
fn couple(m: &mut ComplexMatrix, i: usize, j: usize, z: C64) {
    m[(i, j)] = z;
    m[(j, i)] = z.conj();
}

fn two_atom(h1: &ComplexMatrix, h2: &ComplexMatrix) -> ComplexMatrix {
    let i1 = ComplexMatrix::identity(h1.nrows(), h1.nrows());
    let i2 = ComplexMatrix::identity(h2.nrows(), h2.nrows());
    kron(h1, &i2) + kron(&i1, h2)
}

fn superpose(dim: usize, dims: BipartiteDims, terms: &[((usize, usize), f64)]) -> StateVector {
    let mut v = StateVector::zeros(dim);
    for &((m, n), amp) in terms {
        v[dims.index(m, n)] += c(amp, 0.0);
    }
    let norm = v.norm();
    v / c(norm, 0.0)
}

const BELL_LEVELS: [&str; 3] = ["f", "a", "r"];
const QUTRIT_ATOM1_LEVELS: [&str; 5] = ["f", "a", "g", "r_L", "r_R"];
const QUTRIT_ATOM2_LEVELS: [&str; 4] = ["f", "a", "g", "r"];

/// Single-atom Hamiltonian of the Bell scheme in the basis `{f, a, r}`.
pub fn bell_atom_hamiltonian(rabi: C64, microwave: C64, detuning: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(3, 3);
    couple(&mut h, 0, 1, microwave * 0.5);
    couple(&mut h, 0, 2, rabi * 0.5);
    h[(2, 2)] = c(-detuning, 0.0);
    h
}

pub fn build_bell_model(params: &ModelParams, variant: SchemeVariant) -> Result<SystemModel> {
    if variant.scheme != Scheme::Bell {
        return Err(Error::WrongScheme { expected: "bell", actual: variant.scheme.name() });
    }
    params.validate()?;
    let dims = Scheme::Bell.dims();
    let n = dims.total();
    let (f, a, r) = (0, 1, 2);

    let mw1 = params.rabi_microwave_1;
    // e^{iπ} on the microwave of atom 2 selects the triplet as dark state.
    let mw2 = match variant.target {
        Target::Triplet => -mw1,
        _ => mw1,
    };
    let h1 = bell_atom_hamiltonian(params.rabi_optical, mw1, params.detuning);
    let h2 = bell_atom_hamiltonian(params.rabi_optical, mw2, params.detuning);
    let rr = kron(&transition(3, r, r), &transition(3, r, r));
    let hamiltonian = two_atom(&h1, &h2) + rr * c(params.rydberg_u, 0.0);

    let amp = c((params.gamma / 2.0).sqrt(), 0.0);
    let id = ComplexMatrix::identity(3, 3);
    let lindblads = vec![
        kron(&transition(3, f, r), &id) * amp,
        kron(&transition(3, a, r), &id) * amp,
        kron(&id, &transition(3, f, r)) * amp,
        kron(&id, &transition(3, a, r)) * amp,
    ];

    let mut named_states = BTreeMap::new();
    for (i, x) in BELL_LEVELS.iter().enumerate() {
        for (j, y) in BELL_LEVELS.iter().enumerate() {
            named_states.insert(format!("{x}{y}"), basis_vector(n, dims.index(i, j)));
        }
    }
    named_states.insert("S".into(), superpose(n, dims, &[((f, a), 1.0), ((a, f), -1.0)]));
    named_states.insert("T".into(), superpose(n, dims, &[((f, a), 1.0), ((a, f), 1.0)]));

    Ok(SystemModel {
        dims,
        hamiltonian,
        lindblads,
        basis_labels: [BELL_LEVELS.to_vec(), BELL_LEVELS.to_vec()],
        named_states,
        variant,
        params: *params,
    })
}

/// Atom-1 Hamiltonian of the qutrit scheme in the basis `{f, a, g, r_L, r_R}`.
pub fn qutrit_atom1_hamiltonian(rabi: C64, microwave: C64, detuning: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(5, 5);
    couple(&mut h, 0, 1, microwave * 0.5);
    couple(&mut h, 1, 2, microwave * 0.5);
    couple(&mut h, 0, 3, rabi * 0.5);
    couple(&mut h, 1, 4, rabi * 0.5);
    h[(3, 3)] = c(-detuning, 0.0);
    h[(4, 4)] = c(-detuning, 0.0);
    h
}

/// Atom-2 Hamiltonian of the qutrit scheme in the basis `{f, a, g, r}`.
pub fn qutrit_atom2_hamiltonian(rabi: C64, microwave: C64, detuning: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(4, 4);
    couple(&mut h, 0, 1, microwave * 0.5);
    couple(&mut h, 1, 2, microwave * 0.5);
    couple(&mut h, 2, 3, rabi * 0.5);
    h[(3, 3)] = c(-detuning, 0.0);
    h
}

pub fn build_qutrit_model(params: &ModelParams, variant: SchemeVariant) -> Result<SystemModel> {
    if variant.scheme != Scheme::Qutrit {
        return Err(Error::WrongScheme { expected: "qutrit", actual: variant.scheme.name() });
    }
    params.validate()?;
    let dims = Scheme::Qutrit.dims();
    let n = dims.total();
    let (f, a, g) = (0, 1, 2);
    let (r_l, r_r, r) = (3, 4, 3);

    let mw1 = params.rabi_microwave_1;
    let mw2 = match variant.target {
        Target::PhiPrime => params.rabi_microwave_2,
        _ => -params.rabi_microwave_2,
    };
    let h1 = qutrit_atom1_hamiltonian(params.rabi_optical, mw1, params.detuning);
    let h2 = qutrit_atom2_hamiltonian(params.rabi_optical, mw2, params.detuning);
    let rydberg_pair = kron(&transition(5, r_l, r_l), &transition(4, r, r))
        + kron(&transition(5, r_r, r_r), &transition(4, r, r));
    let hamiltonian = two_atom(&h1, &h2) + rydberg_pair * c(params.rydberg_u, 0.0);

    let amp = c((params.gamma / 3.0).sqrt(), 0.0);
    let id1 = ComplexMatrix::identity(5, 5);
    let id2 = ComplexMatrix::identity(4, 4);
    let mut lindblads = Vec::with_capacity(9);
    for source in [r_l, r_r] {
        for ground in [f, a, g] {
            lindblads.push(kron(&transition(5, ground, source), &id2) * amp);
        }
    }
    for ground in [f, a, g] {
        lindblads.push(kron(&id1, &transition(4, ground, r)) * amp);
    }

    let mut named_states = BTreeMap::new();
    for (i, x) in QUTRIT_ATOM1_LEVELS.iter().enumerate() {
        for (j, y) in QUTRIT_ATOM2_LEVELS.iter().enumerate() {
            named_states.insert(format!("{x}{y}"), basis_vector(n, dims.index(i, j)));
        }
    }
    named_states.insert("phi".into(), superpose(n, dims, &[((f, f), 1.0), ((a, a), 1.0), ((g, g), 1.0)]));
    named_states.insert("phi_prime".into(), superpose(n, dims, &[((f, f), 1.0), ((a, a), -1.0), ((g, g), 1.0)]));
    named_states.insert("varphi".into(), superpose(n, dims, &[((f, f), 1.0), ((a, a), -2.0), ((g, g), 1.0)]));
    named_states.insert("varphi_prime".into(), superpose(n, dims, &[((f, f), 1.0), ((a, a), 2.0), ((g, g), 1.0)]));
    named_states.insert("psi".into(), superpose(n, dims, &[((f, f), FRAC_1_SQRT_2), ((g, g), -FRAC_1_SQRT_2)]));

    Ok(SystemModel {
        dims,
        hamiltonian,
        lindblads,
        basis_labels: [QUTRIT_ATOM1_LEVELS.to_vec(), QUTRIT_ATOM2_LEVELS.to_vec()],
        named_states,
        variant,
        params: *params,
    })
}

pub fn build_model(params: &ModelParams, variant: SchemeVariant) -> Result<SystemModel> {
    match variant.scheme {
        Scheme::Bell => build_bell_model(params, variant),
        Scheme::Qutrit => build_qutrit_model(params, variant),
    }
}

/// Initial density matrix choices.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// `|ff⟩⟨ff|`
    GroundFF,
    /// Equal mixture of the populations basis of the scheme: four triplet-singlet
    /// states for the Bell scheme, nine ground states for the qutrit scheme.
    BasisMixture,
    /// Pure state by name from [`SystemModel::named_states`], or `target`.
    Pure(String),
    /// Explicit density matrix.
    Matrix(ComplexMatrix),
}

impl InitialState {
    pub fn id(&self) -> String {
        match self {
            InitialState::GroundFF => "ground-ff".into(),
            InitialState::BasisMixture => "mixture".into(),
            InitialState::Pure(name) => name.clone(),
            InitialState::Matrix(_) => "matrix".into(),
        }
    }

    /// Parses an identifier; `singlet`/`triplet` are accepted as aliases of
    /// `S`/`T`.
    pub fn parse(id: &str) -> Self {
        match id {
            "ground-ff" => InitialState::GroundFF,
            "mixture" | "bell-mixture" | "qutrit-mixture" => InitialState::BasisMixture,
            "singlet" => InitialState::Pure("S".into()),
            "triplet" => InitialState::Pure("T".into()),
            "phi-prime" => InitialState::Pure("phi_prime".into()),
            other => InitialState::Pure(other.into()),
        }
    }

    pub fn density(&self, model: &SystemModel) -> Result<ComplexMatrix> {
        let n = model.dims.total();
        match self {
            InitialState::GroundFF => Ok(projector(model.state("ff")?)),
            InitialState::BasisMixture => {
                let basis = model.population_basis();
                let w = c(1.0 / basis.len() as f64, 0.0);
                Ok(basis
                    .iter()
                    .fold(ComplexMatrix::zeros(n, n), |acc, (_, v)| acc + projector(v) * w))
            }
            InitialState::Pure(name) if name == "target" => Ok(projector(model.target_state())),
            InitialState::Pure(name) => Ok(projector(model.state(name)?)),
            InitialState::Matrix(m) => {
                if m.nrows() != n || m.ncols() != n {
                    return Err(Error::DimensionMismatch { expected: n, actual: m.nrows() });
                }
                Ok(m.clone())
            }
        }
    }
}
