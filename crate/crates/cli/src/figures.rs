//! Figure reproduction: each figure id maps to an evolution or a sweep
//! whose table holds the data to re-plot it.

use crate::commands;
use crate::error::{CliError, CliResult};
use crate::spec::{Axis, Measure, RunSpec, Settings, SweepParam, SweepSpec};
use crate::table::Table;

pub const FIGURES: [&str; 13] = [
    "fig2", "fig2-inset", "fig3", "fig5", "fig5-inset", "fig6", "fig8a", "fig8b", "fig8c", "fig8d", "fig9a", "fig9b",
    "fig9c",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Evolve(Settings),
    Sweep { settings: Settings, axes: Vec<Axis>, reduce: Measure },
}

fn axis(param: SweepParam, min: f64, max: f64, steps: usize) -> Axis {
    Axis { param, min, max, steps }
}

fn preset(name: &str) -> Settings {
    Settings { preset: Some(name.into()), ..Default::default() }
}

/// What to compute for a figure; `steps` sets the grid resolution per axis.
pub fn plan(figure: &str, steps: usize) -> CliResult<Plan> {
    use SweepParam::*;
    let urr = |lo| axis(UrrMhz, lo, 8.0, steps);
    let gamma = axis(GammaKhz, 0.5, 2.5, steps);
    let p = match figure {
        "fig2-inset" | "fig3" | "fig5-inset" => {
            let mut s = preset(figure);
            s.measures = Some(match figure {
                "fig3" => vec![Measure::Chsh],
                _ => vec![Measure::Populations],
            });
            Plan::Evolve(s)
        }
        "fig2" => Plan::Sweep { settings: preset("fig2"), axes: vec![urr(1.0)], reduce: Measure::Fidelity },
        "fig5" => Plan::Sweep { settings: preset("fig5"), axes: vec![urr(1.0)], reduce: Measure::Fidelity },
        "fig6" => Plan::Sweep {
            settings: preset("fig6-point"),
            axes: vec![axis(UrrMhz, 4.0, 12.0, steps), gamma],
            reduce: Measure::Negativity,
        },
        "fig8a" | "fig8c" => Plan::Sweep {
            settings: preset(figure),
            axes: vec![axis(RabiMhz, 0.01, 0.06, steps), axis(MicrowaveKhz, 0.05, 0.25, steps)],
            reduce: if figure == "fig8a" { Measure::Fidelity } else { Measure::Chsh },
        },
        "fig8b" | "fig8d" => Plan::Sweep {
            settings: preset(figure),
            axes: vec![urr(1.0), gamma],
            reduce: if figure == "fig8b" { Measure::Fidelity } else { Measure::Chsh },
        },
        "fig9a" | "fig9c" => Plan::Sweep {
            settings: preset(figure),
            axes: vec![axis(RabiMhz, 0.02, 0.08, steps), axis(MicrowaveKhz, 0.1, 0.6, steps)],
            reduce: if figure == "fig9a" { Measure::Fidelity } else { Measure::Negativity },
        },
        "fig9b" => Plan::Sweep { settings: preset("fig9b"), axes: vec![urr(1.0), gamma], reduce: Measure::Fidelity },
        other => {
            return Err(CliError::invalid(
                "figure",
                format!("unknown figure `{other}` (valid: {})", FIGURES.join(", ")),
            ))
        }
    };
    Ok(p)
}

/// Runs a figure plan. Sweeps use `workers` threads.
pub fn reproduce(figure: &str, steps: usize, workers: usize) -> CliResult<Table> {
    if steps < 2 {
        return Err(CliError::invalid("steps", "at least 2 grid steps are needed"));
    }
    match plan(figure, steps)? {
        Plan::Evolve(s) => Ok(commands::evolve(&RunSpec::resolve(&s)?)?.table),
        Plan::Sweep { settings, axes, reduce } => {
            commands::sweep(&SweepSpec::resolve(&settings, axes, reduce, workers)?)
        }
    }
}
