//! Subcommand implementations. Each returns a [`Table`]; writing it out is
//! left to the caller.

use std::cell::RefCell;

use rayon::prelude::*;

use rydpump::{
    build_liouvillian, build_model, evolve_reduced, fidelity, populations, steady_state, ComplexMatrix,
    EvolveOptions, LabParams, negativity, ObservableChsh, SchemeVariant, SteadyOptions, SystemModel, Target,
};

use crate::error::{CliError, CliResult};
use crate::spec::{Measure, RunSpec, SweepSpec};
use crate::table::{Cell, Table};

pub fn build(lab: &LabParams, variant: SchemeVariant) -> CliResult<SystemModel> {
    let params = lab.to_model_params();
    Ok(build_model(&params, variant)?)
}

/// Column names produced by a list of measures.
pub fn measure_columns(model: &SystemModel, measures: &[Measure]) -> Vec<String> {
    let mut cols = Vec::new();
    for m in measures {
        match m {
            Measure::Populations => {
                cols.extend(model.population_basis().into_iter().map(|(label, _)| format!("pop_{label}")))
            }
            other => cols.push(other.name().to_string()),
        }
    }
    cols
}

/// Evaluates measures on one density matrix.
pub struct Evaluator<'a> {
    model: &'a SystemModel,
    measures: Vec<Measure>,
    basis: Vec<(String, rydpump::StateVector)>,
    chsh: Option<ObservableChsh>,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a SystemModel, measures: &[Measure]) -> CliResult<Self> {
        let chsh = if measures.contains(&Measure::Chsh) {
            let target = model.variant.target;
            if !matches!(target, Target::Singlet | Target::Triplet) {
                return Err(CliError::invalid("measures", "chsh is only defined for the bell scheme"));
            }
            Some(ObservableChsh::for_target(target)?)
        } else {
            None
        };
        Ok(Evaluator { model, measures: measures.to_vec(), basis: model.population_basis(), chsh })
    }

    pub fn eval(&self, rho: &ComplexMatrix) -> CliResult<Vec<f64>> {
        let mut out = Vec::new();
        for m in &self.measures {
            match m {
                Measure::Populations => out.extend(populations(rho, self.basis.iter().map(|(_, v)| v))?),
                Measure::Fidelity => out.push(fidelity(self.model.target_state(), rho)?),
                Measure::Chsh => out.push(self.chsh.as_ref().expect("checked in new").expectation(rho)?),
                Measure::Negativity => out.push(negativity(rho, self.model.dims)?),
            }
        }
        Ok(out)
    }
}

/// Time series together with the state checks made along it.
#[derive(Debug, Clone)]
pub struct EvolveOutput {
    pub table: Table,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
}

pub fn evolve(spec: &RunSpec) -> CliResult<EvolveOutput> {
    let model = build(&spec.lab, spec.variant)?;
    let rho0 = spec.initial.density(&model)?;
    let l = build_liouvillian(&model);
    let evaluator = Evaluator::new(&model, &spec.outputs)?;
    let times = spec.time_grid();
    let opts = EvolveOptions { method: spec.method, ..EvolveOptions::default() };
    let failure: RefCell<Option<CliError>> = RefCell::new(None);
    let traj = evolve_reduced(&l, &rho0, &times, &opts, |rho| match evaluator.eval(rho) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Vec::new()
        }
    })?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut columns = vec!["time_ms".to_string()];
    columns.extend(measure_columns(&model, &spec.outputs));
    let mut table = Table::new(columns);
    for (t, rec) in traj.times.iter().zip(&traj.records) {
        let mut row = vec![Cell::Num(t * 1e3)];
        row.extend(rec.iter().map(|x| Cell::Num(*x)));
        table.push(row);
    }
    Ok(EvolveOutput {
        table,
        max_trace_error: traj.trace_errors.iter().copied().fold(0.0, f64::max),
        min_eigenvalue: traj.min_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

pub fn steady_options(spec: &RunSpec, cross_check: bool) -> SteadyOptions {
    SteadyOptions { backend: spec.backend, cross_check, ..SteadyOptions::default() }
}

pub fn steady(spec: &RunSpec, cross_check: bool) -> CliResult<Table> {
    let model = build(&spec.lab, spec.variant)?;
    let l = build_liouvillian(&model);
    let ss = steady_state(&l, &steady_options(spec, cross_check))?;
    let evaluator = Evaluator::new(&model, &spec.outputs)?;
    let values = evaluator.eval(&ss.rho)?;
    let mut columns = measure_columns(&model, &spec.outputs);
    columns.push("residual".into());
    columns.push("backend".into());
    let mut table = Table::new(columns);
    let mut row: Vec<Cell> = values.into_iter().map(Cell::Num).collect();
    row.push(Cell::Num(ss.residual));
    row.push(Cell::Text(ss.backend.name().into()));
    table.push(row);
    Ok(table)
}

fn sweep_point(spec: &SweepSpec, point: &[f64]) -> CliResult<f64> {
    let lab = spec.params_at(point);
    let model = build(&lab, spec.base.variant)?;
    let l = build_liouvillian(&model);
    let ss = steady_state(&l, &steady_options(&spec.base, false))?;
    let v = Evaluator::new(&model, &[spec.reduce])?.eval(&ss.rho)?;
    Ok(v[0])
}

/// Steady-state measure over the grid. Failed points carry NaN and a
/// message in the `error` column.
pub fn sweep(spec: &SweepSpec) -> CliResult<Table> {
    let grid = spec.grid();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| CliError::Output(format!("cannot start worker pool: {e}")))?;
    let results: Vec<CliResult<f64>> = pool.install(|| grid.par_iter().map(|p| sweep_point(spec, p)).collect());
    let mut columns: Vec<String> = spec.axes.iter().map(|a| a.param.column()).collect();
    columns.push(spec.reduce.name().into());
    columns.push("error".into());
    let mut table = Table::new(columns);
    for (point, res) in grid.iter().zip(results) {
        let mut row: Vec<Cell> = point.iter().map(|x| Cell::Num(*x)).collect();
        match res {
            Ok(v) => {
                row.push(Cell::Num(v));
                row.push(Cell::Text(String::new()));
            }
            Err(e) => {
                row.push(Cell::Num(f64::NAN));
                row.push(Cell::Text(e.to_string()));
            }
        }
        table.push(row);
    }
    Ok(table)
}
