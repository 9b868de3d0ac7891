//! Command-line front end: single evolutions, steady-state solves,
//! parameter sweeps and figure reproduction, written as CSV or JSON tables.

pub mod args;
pub mod commands;
pub mod error;
pub mod figures;
pub mod spec;
pub mod table;

use args::{Cli, Command};
use error::{CliError, CliResult};
use spec::{Axis, Format, Measure, RunSpec, SweepSpec};

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Evolve(a) => {
            let spec = RunSpec::resolve(&a.settings()?)?;
            let out = commands::evolve(&spec)?;
            out.table.emit(spec.out_path.as_deref(), spec.format, spec.timestamp)
        }
        Command::Steady(a) => {
            let spec = RunSpec::resolve(&a.run.settings()?)?;
            commands::steady(&spec, a.cross_check)?.emit(spec.out_path.as_deref(), spec.format, spec.timestamp)
        }
        Command::Sweep(a) => {
            let axes = a.axes.iter().map(|s| s.parse::<Axis>()).collect::<CliResult<Vec<_>>>()?;
            let reduce: Measure = a.reduce.parse()?;
            let spec = SweepSpec::resolve(&a.run.settings()?, axes, reduce, a.workers)?;
            commands::sweep(&spec)?.emit(spec.base.out_path.as_deref(), spec.base.format, spec.base.timestamp)
        }
        Command::Reproduce(a) => {
            let table = figures::reproduce(&a.figure, a.steps, a.workers)?;
            std::fs::create_dir_all(&a.out_dir)
                .map_err(|source| CliError::Io { path: a.out_dir.display().to_string(), source })?;
            let path = a.out_dir.join(format!("{}.csv", a.figure));
            table.emit(Some(&path), Format::Csv, !a.no_timestamp)
        }
    }
}
