//! Command-line front end: sweeps, matching, noise, stability and oracle runs over a
//! config file or a named preset.

pub mod config;
pub mod output;
pub mod presets;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::devices::{make_device, waveguide_scattering, DeviceParams, ReferenceCurves};
use crate::directionality::{numeric_match, CouplingParameters, MatchOptions, ObjectiveTerm};
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, EvolveOptions, HilbertSpec, MasterEquation};
use crate::langevin::{
    coherent_moments, drift_matrix, evolve_moments, stability, Basis, ChannelComponent, DriftSystem, ScatteringResult,
};
use crate::network::{LinearNetwork, C64};
use crate::noise::{added_noise_from, spectrum_from, AmplifierMode, Quadrature};
use crate::ode::OdeOptions;

pub use config::{load_network, NetworkConfig};
pub use output::{Cell, Format, Table};
pub use presets::{apply_assignments, ParamAssignment, Preset, Selector, PRESETS};

const MAX_POINTS: usize = 10_000_000;

#[derive(Debug, Parser)]
#[command(name = "direktor", version, about = "Design and analysis of nonreciprocal linear photonic networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scattering elements over a frequency range
    Sweep(SweepArgs),
    /// Numerically solve for free couplings that satisfy scattering objectives
    Match(MatchArgs),
    /// Gain, added noise and output spectra over a frequency range
    Noise(NoiseArgs),
    /// Drift eigenvalues and stability margin
    Stability(StabilityArgs),
    /// Compare truncated-Fock evolution against the linear engine
    Oracle(OracleArgs),
    /// List presets and their parameters
    Presets,
    /// Print the config document of a network
    Export(ExportArgs),
}

#[derive(Debug, Args, Clone)]
pub struct NetworkArgs {
    /// Network config file (TOML)
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Named device preset (see `direktor presets`)
    #[arg(long)]
    pub preset: Option<String>,
    /// Override a preset parameter or network entry, e.g. `C=0.9`, `J[d1,d2]=0,0.5`, `n[d2]=2`
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    pub format: Format,
    /// Write to a file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct SweepRange {
    /// Lowest frequency, in units of the reference rate
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub wmin: f64,
    /// Highest frequency, in units of the reference rate
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub wmax: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Logarithmic spacing (requires wmin > 0)
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub range: SweepRange,
    /// doubled or quadrature
    #[arg(long, default_value = "doubled")]
    pub basis: Basis,
    /// Element OUT:IN; components are `LABEL`, `LABEL+` (creation), `LABEL.X`, `LABEL.P`
    #[arg(long = "select", value_name = "OUT:IN")]
    pub select: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Free parameter name, e.g. `J[d1,d2]`, `L[d1,d2]`, `PX[d1,d2]`, `rate[0]`, `kappa[d1]`
    #[arg(long = "free", value_name = "NAME", required = true)]
    pub free: Vec<String>,
    /// Objective `OUT:IN@OMEGA[=TARGET][*WEIGHT]`; a zero target pins the amplitude, others |s|²
    #[arg(long = "objective", value_name = "SPEC", required = true)]
    pub objective: Vec<String>,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub range: SweepRange,
    /// Signal input channel label
    #[arg(long)]
    pub signal: Option<String>,
    /// Output channel label
    #[arg(long)]
    pub output_channel: Option<String>,
    /// Phase-sensitive mode `IN:OUT` quadratures, e.g. `P:P`; phase preserving when absent
    #[arg(long)]
    pub quadrature: Option<String>,
    /// Force phase-preserving mode for presets that default to phase-sensitive
    #[arg(long, conflicts_with = "quadrature")]
    pub phase_preserving: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Fock cutoff n_max for every mode
    #[arg(long, default_value_t = 6)]
    pub cutoff: usize,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    /// Initial coherent amplitude `LABEL=RE[,IM]`; defaults to 0.3 on the first mode
    #[arg(long = "alpha", value_name = "LABEL=VALUE")]
    pub alpha: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A network together with the preset it came from, if any.
struct Resolved {
    network: LinearNetwork,
    preset: Option<Preset>,
    label: String,
}

fn resolve(args: &NetworkArgs) -> Result<Resolved> {
    let assignments = args
        .params
        .iter()
        .map(|s| s.parse::<ParamAssignment>())
        .collect::<Result<Vec<_>>>()?;
    match (&args.config, &args.preset) {
        (Some(path), None) => {
            let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let net = load_network(&src).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
                other => other,
            })?;
            Ok(Resolved {
                network: apply_assignments(&net, &assignments)?,
                preset: None,
                label: path.display().to_string(),
            })
        }
        (None, Some(name)) => {
            let preset = Preset::new(name, &assignments)?;
            let network = apply_assignments(&preset.network, &preset.extra)?;
            Ok(Resolved {
                network,
                label: name.clone(),
                preset: Some(preset),
            })
        }
        _ => Err(Error::InvalidValue {
            what: "network".into(),
            reason: "give exactly one of --config or --preset".into(),
        }),
    }
}

fn describe(table: &mut Table, r: &Resolved) {
    table.meta("network", r.label.as_str());
    table.meta("reference_rate", r.network.reference_rate_name());
    if let Some(p) = &r.preset {
        let params: serde_json::Map<String, serde_json::Value> =
            p.values.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        table.meta("parameters", serde_json::Value::Object(params));
        table.meta("matched", p.matched);
        table.meta("matching_conditions", presets::matching_conditions(p));
    }
    let extra: Vec<String> = match &r.preset {
        Some(p) => p.extra.iter().map(|a| format!("{}={}", a.name, fmt_c(a.value))).collect(),
        None => Vec::new(),
    };
    if !extra.is_empty() {
        table.meta("overrides", extra);
    }
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

impl SweepRange {
    pub fn frequencies(&self) -> Result<Vec<f64>> {
        let bad = |reason: String| Error::InvalidValue {
            what: "sweep".into(),
            reason,
        };
        if !(self.wmin < self.wmax) {
            return Err(bad(format!("wmin = {} must be below wmax = {}", self.wmin, self.wmax)));
        }
        if self.points < 2 || self.points > MAX_POINTS {
            return Err(bad(format!("points = {} must lie in [2, {MAX_POINTS}]", self.points)));
        }
        let n = self.points - 1;
        if self.log {
            if self.wmin <= 0.0 {
                return Err(bad("a log sweep needs wmin > 0".into()));
            }
            let (a, b) = (self.wmin.ln(), self.wmax.ln());
            Ok((0..=n).map(|k| (a + (b - a) * k as f64 / n as f64).exp()).collect())
        } else {
            Ok((0..=n).map(|k| self.wmin + (self.wmax - self.wmin) * k as f64 / n as f64).collect())
        }
    }
}

fn channel_labels(channels: &[crate::langevin::ChannelInfo]) -> Vec<String> {
    channels.iter().map(|c| c.label.clone()).collect()
}

fn find_channel(labels: &[String], name: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == name)
        .or_else(|| name.parse::<usize>().ok().filter(|&i| i < labels.len()))
        .ok_or_else(|| Error::InvalidValue {
            what: "channel".into(),
            reason: format!("unknown channel `{name}` (channels: {})", labels.join(", ")),
        })
}

/// Parses `LABEL`, `LABEL+`, `LABEL.X` or `LABEL.P`.
fn parse_component(s: &str, labels: &[String]) -> Result<ChannelComponent> {
    let s = s.trim();
    if let Some(l) = s.strip_suffix(".X") {
        Ok(ChannelComponent::X(find_channel(labels, l)?))
    } else if let Some(l) = s.strip_suffix(".P") {
        Ok(ChannelComponent::P(find_channel(labels, l)?))
    } else if let Some(l) = s.strip_suffix('+') {
        Ok(ChannelComponent::Creation(find_channel(labels, l)?))
    } else {
        Ok(ChannelComponent::Annihilation(find_channel(labels, s)?))
    }
}

fn component_name(c: ChannelComponent, labels: &[String]) -> String {
    match c {
        ChannelComponent::Annihilation(k) => labels[k].clone(),
        ChannelComponent::Creation(k) => format!("{}+", labels[k]),
        ChannelComponent::X(k) => format!("{}.X", labels[k]),
        ChannelComponent::P(k) => format!("{}.P", labels[k]),
    }
}

pub fn parse_selector(s: &str, labels: &[String]) -> Result<Selector> {
    let (o, i) = s.split_once(':').ok_or_else(|| Error::InvalidValue {
        what: format!("selector `{s}`"),
        reason: "expected OUT:IN".into(),
    })?;
    Ok(Selector {
        output: parse_component(o, labels)?,
        input: parse_component(i, labels)?,
    })
}

/// Parses `OUT:IN@OMEGA[=TARGET][*WEIGHT]`.
pub fn parse_objective(s: &str, labels: &[String]) -> Result<ObjectiveTerm> {
    let bad = |reason: &str| Error::InvalidValue {
        what: format!("objective `{s}`"),
        reason: reason.into(),
    };
    let (sel, rest) = s.split_once('@').ok_or_else(|| bad("expected OUT:IN@OMEGA"))?;
    let sel = parse_selector(sel, labels)?;
    if sel.output.basis() != sel.input.basis() {
        return Err(bad("output and input must be in the same basis"));
    }
    let (rest, weight) = match rest.split_once('*') {
        Some((r, w)) => (r, w.trim().parse::<f64>().map_err(|_| bad("weight is not a number"))?),
        None => (rest, 1.0),
    };
    let (omega, target) = match rest.split_once('=') {
        Some((w, t)) => (w, t.trim().parse::<f64>().map_err(|_| bad("target is not a number"))?),
        None => (rest, 0.0),
    };
    let omega = omega.trim().parse::<f64>().map_err(|_| bad("frequency is not a number"))?;
    Ok(ObjectiveTerm {
        output: sel.output,
        input: sel.input,
        omega,
        target,
        weight,
    })
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("DIREKTOR_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Error::InvalidValue {
            what: "DIREKTOR_THREADS".into(),
            reason: format!("`{v}` is not a positive integer"),
        })?;
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(|e| Error::Io(e.to_string()))
}

fn reference_value(curves: &ReferenceCurves, forward: bool, w: f64) -> f64 {
    if forward {
        curves.forward_gain(w)
    } else {
        curves.reverse_gain(w)
    }
}

enum Scatterer {
    Linear(DriftSystem),
    Waveguide(DeviceParams),
}

impl Scatterer {
    fn at(&self, w: f64, basis: Basis) -> Result<ScatteringResult> {
        match self {
            Scatterer::Linear(sys) => sys.scattering(w, basis),
            Scatterer::Waveguide(p) => waveguide_scattering(p, w).map(|s| s.to_basis(basis)),
        }
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Table> {
    let r = resolve(&args.network)?;
    let freqs = args.range.frequencies()?;
    // the waveguide preset sweeps the exact delayed scattering, not its Markovian network
    let scatterer = match &r.preset {
        Some(p) if matches!(p.device, DeviceParams::WaveguidePair { .. }) && p.extra.is_empty() => {
            Scatterer::Waveguide(p.device)
        }
        _ => Scatterer::Linear(drift_matrix(&r.network)),
    };
    let labels = match &scatterer {
        Scatterer::Linear(sys) => channel_labels(&sys.channels),
        Scatterer::Waveguide(p) => channel_labels(&waveguide_scattering(p, 0.0)?.channels),
    };
    let selectors = args
        .select
        .iter()
        .map(|s| parse_selector(s, &labels))
        .collect::<Result<Vec<_>>>()?;
    for s in &selectors {
        if s.output.basis() != args.basis || s.input.basis() != args.basis {
            return Err(Error::InvalidValue {
                what: "selector".into(),
                reason: format!(
                    "`{}:{}` does not belong to the {} basis",
                    component_name(s.output, &labels),
                    component_name(s.input, &labels),
                    args.basis
                ),
            });
        }
    }
    let stab = stability(&r.network);
    let reference = r.preset.as_ref().and_then(|p| p.reference().map(|c| (c, p.reference_elements())));

    let mut table = Table::new("sweep");
    describe(&mut table, &r);
    table.meta("basis", args.basis.to_string());
    table.meta("stable", stab.stable);
    table.meta("stability_margin", stab.margin);
    table.meta("channels", labels.clone());
    table.column("omega", "frequency in units of the reference rate");
    for s in &selectors {
        let name = format!("{}<-{}", component_name(s.output, &labels), component_name(s.input, &labels));
        table.column(format!("abs2[{name}]"), "power |s|²");
        table.column(format!("phase[{name}]"), "arg s in radians");
    }
    let ref_cols = !selectors.is_empty() && reference.is_some();
    if ref_cols {
        let (_, elems) = reference.as_ref().unwrap();
        let desc = |fwd: bool| match elems {
            Some((f, b)) => {
                let s = if fwd { f } else { b };
                format!(
                    "closed-form |s[{}<-{}]|² of the matched device",
                    component_name(s.output, &labels),
                    component_name(s.input, &labels)
                )
            }
            None => "closed-form reference".into(),
        };
        table.column("ref_forward", desc(true));
        table.column("ref_reverse", desc(false));
    }
    table.column("flag", "ok, unstable (network has growing modes) or singular");
    if selectors.is_empty() {
        return Ok(table);
    }

    let pool = thread_pool()?;
    let rows: Vec<Vec<Cell>> = pool.install(|| {
        freqs
            .par_iter()
            .map(|&w| {
                let mut row = vec![Cell::Num(w)];
                let flag = match scatterer.at(w, args.basis) {
                    Ok(s) => {
                        for sel in &selectors {
                            let z = s.element(sel.output, sel.input).unwrap_or(C64::new(f64::NAN, f64::NAN));
                            row.push(Cell::Num(z.norm_sqr()));
                            row.push(Cell::Num(z.arg()));
                        }
                        if stab.stable {
                            "ok"
                        } else {
                            "unstable"
                        }
                    }
                    Err(_) => {
                        for _ in &selectors {
                            row.push(Cell::Num(f64::NAN));
                            row.push(Cell::Num(f64::NAN));
                        }
                        "singular"
                    }
                };
                if ref_cols {
                    let (curves, _) = reference.as_ref().unwrap();
                    row.push(Cell::Num(reference_value(curves, true, w)));
                    row.push(Cell::Num(reference_value(curves, false, w)));
                }
                row.push(Cell::Text(flag.into()));
                row
            })
            .collect()
    });
    table.rows = rows;
    Ok(table)
}

pub fn cmd_match(args: &MatchArgs) -> Result<Table> {
    let mut net_args = args.network.clone();
    let r = {
        // a preset starts from its dissipative part unless the caller says otherwise
        if net_args.preset.is_some() && !net_args.params.iter().any(|p| p.starts_with("matched=")) {
            net_args.params.insert(0, "matched=0".into());
        }
        resolve(&net_args)?
    };
    let sys = drift_matrix(&r.network);
    let labels = channel_labels(&sys.channels);
    let objective = args
        .objective
        .iter()
        .map(|s| parse_objective(s, &labels))
        .collect::<Result<Vec<_>>>()?;
    let family = CouplingParameters::from_names(r.network.clone(), &args.free)?;
    let sol = numeric_match(
        &family,
        &objective,
        &MatchOptions {
            tolerance: args.tolerance,
            max_iterations: args.max_iterations,
        },
    )?;

    // analytic values: the same entries of the matched preset
    let analytic = match &r.preset {
        Some(p) => make_device(&p.device, true)
            .ok()
            .map(|m| family.free.iter().map(|f| f.get(&m)).collect::<Vec<_>>()),
        None => None,
    };

    let mut table = Table::new("match");
    describe(&mut table, &r);
    table.meta("residual", sol.residual);
    table.meta("converged", sol.converged);
    table.meta("iterations", sol.iterations as u64);
    table.meta("objective", args.objective.clone());
    table.column("parameter", "free parameter");
    table.column("re", "real part of the solution");
    table.column("im", "imaginary part of the solution");
    if analytic.is_some() {
        table.column("analytic_re", "matched-preset value, real part");
        table.column("analytic_im", "matched-preset value, imaginary part");
    }
    for (k, (name, v)) in sol.parameter_values.iter().enumerate() {
        let mut row = vec![Cell::Text(name.clone()), Cell::Num(v.re), Cell::Num(v.im)];
        if let Some(a) = &analytic {
            row.push(Cell::Num(a[k].re));
            row.push(Cell::Num(a[k].im));
        }
        table.rows.push(row);
    }
    if !sol.converged {
        return Err(Error::NotConverged {
            residual: sol.residual,
            iterations: sol.iterations,
        });
    }
    Ok(table)
}

fn parse_quadratures(s: &str) -> Result<AmplifierMode> {
    let (i, o) = s.split_once(':').ok_or_else(|| Error::InvalidValue {
        what: "--quadrature".into(),
        reason: "expected IN:OUT, e.g. P:P".into(),
    })?;
    Ok(AmplifierMode::PhaseSensitive {
        input: i.trim().parse::<Quadrature>()?,
        output: o.trim().parse::<Quadrature>()?,
    })
}

pub fn cmd_noise(args: &NoiseArgs) -> Result<Table> {
    let r = resolve(&args.network)?;
    let freqs = args.range.frequencies()?;
    let stab = stability(&r.network);
    if !stab.stable {
        return Err(Error::UnstableNetwork { margin: stab.margin });
    }
    let sys = drift_matrix(&r.network);
    let labels = channel_labels(&sys.channels);
    let (def_sig, def_out, def_mode) = match &r.preset {
        Some(p) => {
            let (s, o, m) = p.noise_defaults();
            (Some(s), Some(o), m)
        }
        None => (None, None, AmplifierMode::PhasePreserving),
    };
    let pick = |given: &Option<String>, default: Option<usize>, what: &str| -> Result<usize> {
        match (given, default) {
            (Some(name), _) => find_channel(&labels, name),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::InvalidValue {
                what: what.into(),
                reason: "required for config networks".into(),
            }),
        }
    };
    let signal = pick(&args.signal, def_sig, "--signal")?;
    let output = pick(&args.output_channel, def_out, "--output-channel")?;
    let mode = match (&args.quadrature, args.phase_preserving) {
        (Some(q), _) => parse_quadratures(q)?,
        (None, true) => AmplifierMode::PhasePreserving,
        (None, false) => def_mode,
    };
    let reference = r.preset.as_ref().and_then(|p| p.reference());
    let occupations = |label: &str| {
        r.network
            .mode_index(label)
            .and_then(|m| r.network.port_on_mode(m))
            .map(|p| r.network.ports()[p].occupation)
            .unwrap_or(0.0)
    };

    let mut table = Table::new("noise");
    describe(&mut table, &r);
    table.meta("signal", labels[signal].as_str());
    table.meta("output", labels[output].as_str());
    table.meta(
        "mode",
        match mode {
            AmplifierMode::PhasePreserving => "phase-preserving".to_string(),
            AmplifierMode::PhaseSensitive { input, output } => format!("phase-sensitive {input}:{output}"),
        },
    );
    table.column("omega", "frequency in units of the reference rate");
    table.column("gain", "power gain from signal to output");
    table.column("n_add", "added noise referred to the input, in quanta");
    table.column("S_out", "symmetrized spectrum of the selected output component");
    for l in &labels {
        table.column(format!("n_out[{l}]"), "output occupancy S − 1/2");
    }
    let with_ref = reference.as_ref().is_some_and(|c| c.added_noise(0.0, 0.0, 0.0).is_some());
    if with_ref {
        table.column("ref_n_add", "closed-form added noise (empty where unavailable)");
    }

    let pool = thread_pool()?;
    let n2 = occupations("d2");
    let nc = occupations("c");
    let rows: Vec<Result<Vec<Cell>>> = pool.install(|| {
        freqs
            .par_iter()
            .map(|&w| {
                let s = sys.scattering(w, Basis::Doubled)?;
                let (gain, n_add) = added_noise_from(&s, signal, output, mode)?;
                let out_comp = match mode {
                    AmplifierMode::PhasePreserving => ChannelComponent::Annihilation(output),
                    AmplifierMode::PhaseSensitive { output: q, .. } => q.component(output),
                };
                let mut row = vec![
                    Cell::Num(w),
                    Cell::Num(gain),
                    Cell::Num(n_add),
                    Cell::Num(spectrum_from(&s, out_comp)?),
                ];
                for c in 0..labels.len() {
                    row.push(Cell::Num(spectrum_from(&s, ChannelComponent::Annihilation(c))? - 0.5));
                }
                if with_ref {
                    let v = reference.as_ref().unwrap().added_noise(w, n2, nc);
                    row.push(v.map(Cell::Num).unwrap_or(Cell::Text(String::new())));
                }
                Ok(row)
            })
            .collect()
    });
    table.rows = rows.into_iter().collect::<Result<_>>()?;
    Ok(table)
}

pub fn cmd_stability(args: &StabilityArgs) -> Result<Table> {
    let r = resolve(&args.network)?;
    let rep = stability(&r.network);
    let mut table = Table::new("stability");
    describe(&mut table, &r);
    table.meta("stable", rep.stable);
    table.meta("margin", rep.margin);
    table.column("index", "eigenvalue index, by decreasing real part");
    table.column("re", "real part (growth rate if positive)");
    table.column("im", "imaginary part");
    for (k, e) in rep.eigenvalues.iter().enumerate() {
        table.rows.push(vec![Cell::Int(k as i64), Cell::Num(e.re), Cell::Num(e.im)]);
    }
    Ok(table)
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<Table> {
    let r = resolve(&args.network)?;
    let n = r.network.num_modes();
    let mut alpha = vec![C64::new(0.0, 0.0); n];
    if args.alpha.is_empty() {
        alpha[0] = C64::new(0.3, 0.0);
    }
    for a in &args.alpha {
        let p: ParamAssignment = a.parse()?;
        let m = r
            .network
            .mode_index(&p.name)
            .ok_or_else(|| Error::InvalidValue {
                what: "--alpha".into(),
                reason: format!("unknown mode `{}`", p.name),
            })?;
        alpha[m] = p.value;
    }
    if args.points < 2 || !(args.t_end > 0.0) {
        return Err(Error::InvalidValue {
            what: "oracle".into(),
            reason: "need t_end > 0 and at least two points".into(),
        });
    }
    let times: Vec<f64> = (0..args.points)
        .map(|k| args.t_end * k as f64 / (args.points - 1) as f64)
        .collect();
    let spec = HilbertSpec::uniform(n, args.cutoff)?;
    let rho0 = DensityMatrix::coherent(&spec, &alpha)?;
    let traj = MasterEquation::from_network(&r.network).evolve(&rho0, &times, &EvolveOptions::default())?;
    let fock = traj.moments()?;
    let linear = evolve_moments(&drift_matrix(&r.network), &coherent_moments(&alpha), &times, &OdeOptions::default())?;

    let mut table = Table::new("oracle");
    describe(&mut table, &r);
    table.meta("cutoff", args.cutoff as u64);
    table.meta("max_trace_drift", traj.max_trace_drift);
    table.meta("max_top_level_population", traj.max_leak);
    table.column("t", "time in units of 1/reference rate");
    let labels: Vec<String> = r.network.modes().iter().map(|m| m.label.clone()).collect();
    for l in &labels {
        table.column(format!("re<{l}>"), "oracle mean, real part");
        table.column(format!("im<{l}>"), "oracle mean, imaginary part");
        table.column(format!("n[{l}]"), "oracle occupation");
    }
    table.column("max_dev_mean", "largest |oracle − linear| over first moments");
    table.column("max_dev_second", "largest |oracle − linear| over ordered second moments");
    let mut worst: f64 = 0.0;
    for (k, &t) in times.iter().enumerate() {
        let (f, l) = (&fock[k], &linear[k]);
        let mut row = vec![Cell::Num(t)];
        for j in 0..n {
            row.push(Cell::Num(f.amplitude(j).re));
            row.push(Cell::Num(f.amplitude(j).im));
            row.push(Cell::Num(f.normal(j, j).re));
        }
        let dm = (&f.mean - &l.mean).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let ds = (&f.second - &l.second).iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(dm).max(ds);
        row.push(Cell::Num(dm));
        row.push(Cell::Num(ds));
        table.rows.push(row);
    }
    table.meta("max_deviation", worst);
    Ok(table)
}

fn cmd_presets() -> Table {
    let mut table = Table::new("presets");
    table.column("preset", "name for --preset");
    table.column("parameter", "name for --param");
    table.column("default", "default value (empty: derived from the matching conditions)");
    table.column("description", "meaning");
    for p in PRESETS {
        table.rows.push(vec![
            Cell::Text(p.name.into()),
            Cell::Text(String::new()),
            Cell::Text(String::new()),
            Cell::Text(p.description.into()),
        ]);
        for &(name, default, desc) in p.params.iter().chain([("matched", Some(1.0), "1 adds the balancing coherent couplings, 0 omits them")].iter()) {
            table.rows.push(vec![
                Cell::Text(p.name.into()),
                Cell::Text(name.into()),
                default.map(Cell::Num).unwrap_or(Cell::Text(String::new())),
                Cell::Text(desc.into()),
            ]);
        }
    }
    table
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Runs a parsed command line, writing its complete output only on success.
pub fn execute(cli: &Cli) -> Result<()> {
    let (table, output) = match &cli.command {
        Command::Sweep(a) => (cmd_sweep(a)?, &a.output),
        Command::Match(a) => (cmd_match(a)?, &a.output),
        Command::Noise(a) => (cmd_noise(a)?, &a.output),
        Command::Stability(a) => (cmd_stability(a)?, &a.output),
        Command::Oracle(a) => (cmd_oracle(a)?, &a.output),
        Command::Presets => return emit(&cmd_presets().render(Format::Csv)?, &None),
        Command::Export(a) => {
            let r = resolve(&a.network)?;
            return emit(&NetworkConfig::from_network(&r.network).to_toml()?, &a.out);
        }
    };
    emit(&table.render(output.format)?, &output.out)
}

/// Entry point of the `direktor` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
