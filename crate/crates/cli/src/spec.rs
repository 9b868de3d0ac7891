//! Run and sweep specifications, resolved from presets, config files and
//! command-line flags (in increasing precedence).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rydpump::dynamics::Method;
use rydpump::{
    preset_by_name, ComplexMatrix, InitialState, LabParams, Microwave, Scheme, SchemeVariant, SteadyBackend, Target,
    C64,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Populations,
    Fidelity,
    Chsh,
    Negativity,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Populations => "populations",
            Measure::Fidelity => "fidelity",
            Measure::Chsh => "chsh",
            Measure::Negativity => "negativity",
        }
    }

    pub fn defaults_for(scheme: Scheme) -> Vec<Measure> {
        match scheme {
            Scheme::Bell => vec![Measure::Populations, Measure::Fidelity, Measure::Chsh, Measure::Negativity],
            Scheme::Qutrit => vec![Measure::Populations, Measure::Fidelity, Measure::Negativity],
        }
    }
}

impl FromStr for Measure {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim() {
            "populations" | "pop" => Ok(Measure::Populations),
            "fidelity" => Ok(Measure::Fidelity),
            "chsh" => Ok(Measure::Chsh),
            "negativity" => Ok(Measure::Negativity),
            other => Err(CliError::invalid(
                "measures",
                format!("unknown measure `{other}` (expected populations, fidelity, chsh, negativity)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::invalid("format", format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

/// Parameters that can be swept, named by their flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    RabiMhz,
    MicrowaveRel,
    MicrowaveKhz,
    DeltaMhz,
    UrrMhz,
    GammaKhz,
}

impl SweepParam {
    pub fn flag(self) -> &'static str {
        match self {
            SweepParam::RabiMhz => "rabi-mhz",
            SweepParam::MicrowaveRel => "microwave-rel",
            SweepParam::MicrowaveKhz => "microwave-khz",
            SweepParam::DeltaMhz => "delta-mhz",
            SweepParam::UrrMhz => "urr-mhz",
            SweepParam::GammaKhz => "gamma-khz",
        }
    }

    /// Column name in output tables.
    pub fn column(self) -> String {
        self.flag().replace('-', "_")
    }
}

impl FromStr for SweepParam {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match normalize_key(s).as_str() {
            "rabimhz" | "rabioptical" => Ok(SweepParam::RabiMhz),
            "microwaverel" | "microwave" => Ok(SweepParam::MicrowaveRel),
            "microwavekhz" | "rabimicrowave1" => Ok(SweepParam::MicrowaveKhz),
            "deltamhz" | "detuning" => Ok(SweepParam::DeltaMhz),
            "urrmhz" | "rydbergu" => Ok(SweepParam::UrrMhz),
            "gammakhz" | "gamma" => Ok(SweepParam::GammaKhz),
            _ => Err(CliError::invalid(
                "axis",
                format!("`{s}` is not a sweepable parameter (rabi-mhz, microwave-rel, microwave-khz, delta-mhz, urr-mhz, gamma-khz)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let span = self.max - self.min;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.max } else { self.min + span * i as f64 / (self.steps - 1) as f64 })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = CliError;
    /// `name:min:max:steps`
    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(CliError::invalid("axis", format!("`{s}` is not of the form name:min:max:steps")));
        }
        let num = |v: &str| v.parse::<f64>().map_err(|_| CliError::invalid("axis", format!("`{v}` is not a number")));
        let steps: usize = parts[3]
            .parse()
            .map_err(|_| CliError::invalid("axis", format!("`{}` is not a step count", parts[3])))?;
        let axis = Axis { param: parts[0].parse()?, min: num(parts[1])?, max: num(parts[2])?, steps };
        if axis.steps < 2 {
            return Err(CliError::invalid("axis", format!("{} needs at least 2 steps", axis.param.flag())));
        }
        Ok(axis)
    }
}

/// Every setting a run may take, each optional until resolved.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub preset: Option<String>,
    pub scheme: Option<String>,
    pub target: Option<String>,
    pub rabi_mhz: Option<f64>,
    pub microwave_rel: Option<f64>,
    pub microwave_khz: Option<f64>,
    pub microwave2_khz: Option<f64>,
    pub delta_mhz: Option<f64>,
    pub urr_mhz: Option<f64>,
    pub gamma_khz: Option<f64>,
    pub gamma_angular: Option<bool>,
    pub initial: Option<String>,
    pub t_max_ms: Option<f64>,
    pub samples: Option<usize>,
    pub measures: Option<Vec<Measure>>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub method: Option<String>,
    pub backend: Option<String>,
    pub timestamp: Option<bool>,
}

/// Lower-case, with `-` and `_` removed, so `rabi-mhz`, `rabi_mhz` and
/// `rabimhz` are the same key.
pub fn normalize_key(k: &str) -> String {
    k.chars().filter(|c| *c != '-' && *c != '_').flat_map(char::to_lowercase).collect()
}

fn parse_num<T: FromStr>(field: &str, v: &str) -> CliResult<T> {
    v.trim().parse().map_err(|_| CliError::invalid(field, format!("`{v}` is not a valid value")))
}

fn parse_bool(field: &str, v: &str) -> CliResult<bool> {
    match v.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::invalid(field, format!("`{v}` is not a boolean"))),
    }
}

pub fn parse_measures(v: &str) -> CliResult<Vec<Measure>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

impl Settings {
    /// Parses flat `key = value` text. Keys are flag names (dashes optional)
    /// or model parameter field names; `#` starts a comment.
    pub fn from_config_str(text: &str) -> CliResult<Self> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| CliError::invalid("config", format!("line {}: expected key = value", lineno + 1)))?;
            s.set(key.trim(), value.trim())?;
        }
        Ok(s)
    }

    pub fn from_config_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::from_config_str(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let field = key.to_string();
        match normalize_key(key).as_str() {
            "preset" => self.preset = Some(value.to_string()),
            "scheme" => self.scheme = Some(value.to_string()),
            "target" => self.target = Some(value.to_string()),
            "rabimhz" | "rabioptical" => self.rabi_mhz = Some(parse_num(&field, value)?),
            "microwaverel" | "microwave" => self.microwave_rel = Some(parse_num(&field, value)?),
            "microwavekhz" => self.microwave_khz = Some(parse_num(&field, value)?),
            // field names carry MHz like the other frequencies
            "rabimicrowave1" => self.microwave_khz = Some(1e3 * parse_num::<f64>(&field, value)?),
            "rabimicrowave2" => self.microwave2_khz = Some(1e3 * parse_num::<f64>(&field, value)?),
            "microwave2khz" => self.microwave2_khz = Some(parse_num(&field, value)?),
            "deltamhz" | "detuning" => self.delta_mhz = Some(parse_num(&field, value)?),
            "urrmhz" | "rydbergu" => self.urr_mhz = Some(parse_num(&field, value)?),
            "gammakhz" | "gamma" => self.gamma_khz = Some(parse_num(&field, value)?),
            "gammaangular" => self.gamma_angular = Some(parse_bool(&field, value)?),
            "initial" => self.initial = Some(value.to_string()),
            "tmaxms" => self.t_max_ms = Some(parse_num(&field, value)?),
            "samples" => self.samples = Some(parse_num(&field, value)?),
            "measures" => self.measures = Some(parse_measures(value)?),
            "format" => self.format = Some(value.parse()?),
            "out" => self.out = Some(PathBuf::from(value)),
            "method" => self.method = Some(value.to_string()),
            "backend" => self.backend = Some(value.to_string()),
            "notimestamp" => self.timestamp = Some(!parse_bool(&field, value)?),
            "timestamp" => self.timestamp = Some(parse_bool(&field, value)?),
            _ => return Err(CliError::invalid("config", format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Values set in `other` replace those in `self`.
    pub fn overlay(mut self, other: Settings) -> Settings {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            preset, scheme, target, rabi_mhz, microwave_rel, microwave_khz, microwave2_khz, delta_mhz, urr_mhz,
            gamma_khz, gamma_angular, initial, t_max_ms, samples, measures, format, out, method, backend, timestamp
        );
        self
    }

    /// Physical parameters on top of `base`. Of Δ and U_rr, a value given
    /// alone fixes the other through U_rr = 2Δ.
    pub fn apply_params(&self, base: LabParams) -> LabParams {
        let mut lab = base;
        if let Some(v) = self.rabi_mhz {
            lab.rabi_mhz = v;
        }
        if let Some(v) = self.microwave_rel {
            lab.microwave = Microwave::Relative(v);
        }
        if let Some(v) = self.microwave_khz {
            lab.microwave = Microwave::Khz(v);
        }
        if let Some(v) = self.microwave2_khz {
            lab.microwave_2 = Some(Microwave::Khz(v));
        }
        match (self.delta_mhz, self.urr_mhz) {
            (Some(d), Some(u)) => {
                lab.delta_mhz = d;
                lab.urr_mhz = u;
            }
            (Some(d), None) => {
                lab.delta_mhz = d;
                lab.urr_mhz = 2.0 * d;
            }
            (None, Some(u)) => {
                lab.urr_mhz = u;
                lab.delta_mhz = u / 2.0;
            }
            (None, None) => {}
        }
        if let Some(v) = self.gamma_khz {
            lab.gamma_khz = v;
        }
        if let Some(v) = self.gamma_angular {
            lab.gamma_angular = v;
        }
        lab
    }
}

/// A fully resolved single-point run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub preset: Option<String>,
    pub variant: SchemeVariant,
    pub lab: LabParams,
    pub initial: InitialState,
    pub t_max: f64,
    pub sample_count: usize,
    pub outputs: Vec<Measure>,
    pub out_path: Option<PathBuf>,
    pub format: Format,
    pub method: Method,
    pub backend: SteadyBackend,
    pub timestamp: bool,
}

const DEFAULT_T_MAX_MS: f64 = 10.0;
const DEFAULT_SAMPLES: usize = 101;

/// Evolution window and sample count of the time-series presets.
pub fn preset_window(preset: &str) -> Option<(f64, usize)> {
    match preset {
        "fig2-inset" | "fig3" => Some((800.0, 401)),
        "fig5-inset" => Some((200.0, 201)),
        _ => None,
    }
}

pub fn load_initial(id: &str) -> CliResult<InitialState> {
    let path = Path::new(id);
    if path.is_file() {
        return Ok(InitialState::Matrix(read_matrix_file(path)?));
    }
    Ok(InitialState::parse(id))
}

/// Density matrix text file: one row per line, `re im` pairs separated by
/// whitespace or commas.
pub fn read_matrix_file(path: &Path) -> CliResult<ComplexMatrix> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| parse_num::<f64>("initial", t))
            .collect::<CliResult<_>>()?;
        if !nums.len().is_multiple_of(2) {
            return Err(CliError::invalid("initial", "matrix rows must hold re im pairs"));
        }
        rows.push(nums.chunks(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::invalid("initial", "matrix file must describe a square matrix"));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn resolve_variant(settings: &Settings, preset_variant: Option<SchemeVariant>) -> CliResult<SchemeVariant> {
    let scheme = match &settings.scheme {
        Some(s) => Some(s.parse::<Scheme>()?),
        None => None,
    };
    let target = match &settings.target {
        Some(t) => Some(t.parse::<Target>()?),
        None => None,
    };
    let variant = match (scheme, target, preset_variant) {
        (Some(s), Some(t), _) => SchemeVariant::new(s, t)?,
        (None, Some(t), _) => SchemeVariant::of(t),
        (Some(s), None, Some(p)) if p.scheme == s => p,
        (Some(s), None, _) => SchemeVariant::of(s.default_target()),
        (None, None, Some(p)) => p,
        (None, None, None) => SchemeVariant::of(Target::Singlet),
    };
    Ok(variant)
}

/// Preset parameters, or the scheme's nominal set when no preset applies.
fn preset_lab(settings: &Settings, variant: SchemeVariant) -> CliResult<LabParams> {
    if let Some(name) = &settings.preset {
        let p = preset_by_name(name)?;
        if p.variant.scheme == variant.scheme {
            return Ok(p.lab);
        }
    }
    let nominal = if variant.scheme == Scheme::Bell { "fig2" } else { "fig5" };
    Ok(preset_by_name(nominal)?.lab)
}

impl RunSpec {
    pub fn resolve(settings: &Settings) -> CliResult<RunSpec> {
        let preset = match &settings.preset {
            Some(name) => Some(preset_by_name(name)?),
            None => None,
        };
        let variant = resolve_variant(settings, preset.as_ref().map(|p| p.variant))?;
        let lab = settings.apply_params(preset_lab(settings, variant)?);
        for (name, v) in [
            ("rabi-mhz", lab.rabi_mhz),
            ("delta-mhz", lab.delta_mhz),
            ("urr-mhz", lab.urr_mhz),
            ("gamma-khz", lab.gamma_khz),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(CliError::invalid(name, format!("must be finite and non-negative, got {v}")));
            }
        }
        let initial = match &settings.initial {
            Some(id) => load_initial(id)?,
            None => match &preset {
                Some(p) => p.initial.clone(),
                None => InitialState::GroundFF,
            },
        };
        let window = settings.preset.as_deref().and_then(preset_window);
        let t_max_ms = settings.t_max_ms.or(window.map(|w| w.0)).unwrap_or(DEFAULT_T_MAX_MS);
        let sample_count = settings.samples.or(window.map(|w| w.1)).unwrap_or(DEFAULT_SAMPLES);
        if !t_max_ms.is_finite() || t_max_ms < 0.0 {
            return Err(CliError::invalid("t-max-ms", "must be finite and non-negative"));
        }
        if t_max_ms > 0.0 && sample_count < 2 {
            return Err(CliError::invalid("samples", "at least 2 samples are needed when t-max-ms > 0"));
        }
        let outputs = settings.measures.clone().unwrap_or_else(|| Measure::defaults_for(variant.scheme));
        if outputs.is_empty() {
            return Err(CliError::invalid("measures", "no measure requested"));
        }
        if variant.scheme != Scheme::Bell && outputs.contains(&Measure::Chsh) {
            return Err(CliError::invalid("measures", "chsh is only defined for the bell scheme"));
        }
        let method = match settings.method.as_deref() {
            None | Some("propagator") => Method::Propagator,
            Some("rk45") | Some("adaptive") => Method::AdaptiveRk,
            Some(other) => {
                return Err(CliError::invalid("method", format!("unknown method `{other}` (propagator or rk45)")))
            }
        };
        let backend = match settings.backend.as_deref() {
            None | Some("null-space") => SteadyBackend::NullSpace,
            Some("long-time") => SteadyBackend::LongTime,
            Some(other) => {
                return Err(CliError::invalid("backend", format!("unknown backend `{other}` (null-space or long-time)")))
            }
        };
        Ok(RunSpec {
            preset: settings.preset.clone(),
            variant,
            lab,
            initial,
            t_max: t_max_ms * 1e-3,
            sample_count,
            outputs,
            out_path: settings.out.clone(),
            format: settings.format.unwrap_or(Format::Csv),
            method,
            backend,
            timestamp: settings.timestamp.unwrap_or(true),
        })
    }

    pub fn time_grid(&self) -> Vec<f64> {
        if self.t_max == 0.0 {
            return vec![0.0];
        }
        let n = self.sample_count;
        (0..n).map(|k| self.t_max * k as f64 / (n - 1) as f64).collect()
    }

    /// Key-value rendering accepted back by [`Settings::from_config_str`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("scheme", self.variant.scheme.name().into());
        kv.insert("target", self.variant.target.name().into());
        kv.insert("rabi-mhz", self.lab.rabi_mhz.to_string());
        match self.lab.microwave {
            Microwave::Relative(r) => kv.insert("microwave-rel", r.to_string()),
            Microwave::Khz(k) => kv.insert("microwave-khz", k.to_string()),
        };
        if let Some(m2) = self.lab.microwave_2 {
            let khz = match m2 {
                Microwave::Relative(r) => r * self.lab.rabi_mhz * 1e3,
                Microwave::Khz(k) => k,
            };
            kv.insert("microwave2-khz", khz.to_string());
        }
        kv.insert("delta-mhz", self.lab.delta_mhz.to_string());
        kv.insert("urr-mhz", self.lab.urr_mhz.to_string());
        kv.insert("gamma-khz", self.lab.gamma_khz.to_string());
        kv.insert("gamma-angular", self.lab.gamma_angular.to_string());
        if !matches!(self.initial, InitialState::Matrix(_)) {
            kv.insert("initial", self.initial.id());
        }
        kv.insert("t-max-ms", (self.t_max * 1e3).to_string());
        kv.insert("samples", self.sample_count.to_string());
        kv.insert("measures", self.outputs.iter().map(|m| m.name()).collect::<Vec<_>>().join(","));
        for (k, v) in kv {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: RunSpec,
    /// Base settings; each grid point overlays its axis values on these.
    pub settings: Settings,
    pub axes: Vec<Axis>,
    pub reduce: Measure,
    pub workers: usize,
    /// Parameters before any flag or config override.
    pub preset_lab: LabParams,
}

impl SweepSpec {
    pub fn resolve(settings: &Settings, axes: Vec<Axis>, reduce: Measure, workers: usize) -> CliResult<SweepSpec> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(CliError::invalid("axis", "a sweep takes one or two axes"));
        }
        if axes.len() == 2 && axes[0].param == axes[1].param {
            return Err(CliError::invalid("axis", "the two axes must differ"));
        }
        if reduce == Measure::Populations {
            return Err(CliError::invalid("reduce", "a sweep reduces to fidelity, chsh or negativity"));
        }
        let mut base_settings = settings.clone();
        base_settings.measures = Some(vec![reduce]);
        let base = RunSpec::resolve(&base_settings)?;
        let preset_lab = preset_lab(&base_settings, base.variant)?;
        Ok(SweepSpec { base, settings: base_settings, axes, reduce, workers: workers.max(1), preset_lab })
    }

    /// Grid points in row-major axis order (last axis fastest).
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut points: Vec<Vec<f64>> = vec![vec![]];
        for axis in &self.axes {
            let values = axis.values();
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(*v);
                        q
                    })
                })
                .collect();
        }
        points
    }

    pub fn params_at(&self, point: &[f64]) -> LabParams {
        let mut s = self.settings.clone();
        for (axis, v) in self.axes.iter().zip(point) {
            let v = Some(*v);
            match axis.param {
                SweepParam::RabiMhz => s.rabi_mhz = v,
                SweepParam::MicrowaveRel => {
                    s.microwave_rel = v;
                    s.microwave_khz = None;
                }
                SweepParam::MicrowaveKhz => s.microwave_khz = v,
                SweepParam::DeltaMhz => s.delta_mhz = v,
                SweepParam::UrrMhz => s.urr_mhz = v,
                SweepParam::GammaKhz => s.gamma_khz = v,
            }
        }
        s.apply_params(self.preset_lab)
    }
}
