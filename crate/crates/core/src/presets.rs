//! Parameter sets of the published figures.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::models::{InitialState, LabParams, Microwave, SchemeVariant, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PresetId {
    Fig2,
    Fig2Inset,
    Fig3,
    Fig5,
    Fig5Inset,
    Fig6Point,
    Fig8a,
    Fig8b,
    Fig8c,
    Fig8d,
    Fig9a,
    Fig9b,
    Fig9c,
}

impl PresetId {
    pub const ALL: [PresetId; 13] = [
        PresetId::Fig2,
        PresetId::Fig2Inset,
        PresetId::Fig3,
        PresetId::Fig5,
        PresetId::Fig5Inset,
        PresetId::Fig6Point,
        PresetId::Fig8a,
        PresetId::Fig8b,
        PresetId::Fig8c,
        PresetId::Fig8d,
        PresetId::Fig9a,
        PresetId::Fig9b,
        PresetId::Fig9c,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetId::Fig2 => "fig2",
            PresetId::Fig2Inset => "fig2-inset",
            PresetId::Fig3 => "fig3",
            PresetId::Fig5 => "fig5",
            PresetId::Fig5Inset => "fig5-inset",
            PresetId::Fig6Point => "fig6-point",
            PresetId::Fig8a => "fig8a",
            PresetId::Fig8b => "fig8b",
            PresetId::Fig8c => "fig8c",
            PresetId::Fig8d => "fig8d",
            PresetId::Fig9a => "fig9a",
            PresetId::Fig9b => "fig9b",
            PresetId::Fig9c => "fig9c",
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
    }
}

impl FromStr for PresetId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset { name: s.to_string(), valid: Self::valid_names() })
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: PresetId,
    pub lab: LabParams,
    pub variant: SchemeVariant,
    pub initial: InitialState,
}

/// Bell scheme: Ω/2π = 0.036 MHz, ω = 0.004Ω, γ = 1.673 kHz, Δ/2π = 3.435 MHz, U_rr = 2Δ.
const BELL_NOMINAL: LabParams = LabParams {
    rabi_mhz: 0.036,
    microwave: Microwave::Relative(0.004),
    microwave_2: None,
    delta_mhz: 3.435,
    urr_mhz: 2.0 * 3.435,
    gamma_khz: 1.673,
    gamma_angular: false,
};

/// Bell robustness maps over (Ω, ω): γ = 1 kHz, U_rr/2π = 4 MHz.
const BELL_OMEGA_MAP: LabParams = LabParams { delta_mhz: 2.0, urr_mhz: 4.0, gamma_khz: 1.0, ..BELL_NOMINAL };

/// Qutrit scheme: Ω/2π = 0.055 MHz, ω = 0.0075Ω, γ = 1 kHz, Δ/2π = 2 MHz.
const QUTRIT_NOMINAL: LabParams = LabParams {
    rabi_mhz: 0.055,
    microwave: Microwave::Relative(0.0075),
    microwave_2: None,
    delta_mhz: 2.0,
    urr_mhz: 4.0,
    gamma_khz: 1.0,
    gamma_angular: false,
};

const QUTRIT_NEGATIVITY_PEAK: LabParams =
    LabParams { delta_mhz: 4.8705, urr_mhz: 2.0 * 4.8705, gamma_khz: 1.033, ..QUTRIT_NOMINAL };

/// Qutrit robustness maps over (Ω, ω): γ = 1 kHz, U_rr/2π = 6 MHz.
const QUTRIT_OMEGA_MAP: LabParams = LabParams { delta_mhz: 3.0, urr_mhz: 6.0, ..QUTRIT_NOMINAL };

pub fn preset(id: PresetId) -> Preset {
    use PresetId::*;
    let (lab, target, initial) = match id {
        Fig2 => (BELL_NOMINAL, Target::Singlet, InitialState::GroundFF),
        Fig2Inset | Fig3 => (BELL_NOMINAL, Target::Singlet, InitialState::BasisMixture),
        Fig8a | Fig8c => (BELL_OMEGA_MAP, Target::Singlet, InitialState::GroundFF),
        Fig8b | Fig8d => (BELL_NOMINAL, Target::Singlet, InitialState::GroundFF),
        Fig5 | Fig5Inset => (QUTRIT_NOMINAL, Target::Phi, InitialState::BasisMixture),
        Fig6Point => (QUTRIT_NEGATIVITY_PEAK, Target::Phi, InitialState::BasisMixture),
        Fig9a | Fig9c => (QUTRIT_OMEGA_MAP, Target::Phi, InitialState::BasisMixture),
        Fig9b => (QUTRIT_NOMINAL, Target::Phi, InitialState::BasisMixture),
    };
    Preset { id, lab, variant: SchemeVariant::of(target), initial }
}

pub fn preset_by_name(name: &str) -> Result<Preset> {
    Ok(preset(name.parse()?))
}
