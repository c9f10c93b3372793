//! Declarative experiment front-end: TOML configs describing a hop chain
//! and an SNR sweep, analytical + Monte-Carlo outage reports, and
//! plot-ready CSV output.
//!
//! A config either uses the symmetric shorthand (`alpha`, `beta`, `hops`,
//! `inr_db`, any of the first three a scalar or a list — lists expand to
//! one series per combination) or lists the chain hop by hop under
//! `[[system.chain]]`. All dB values are relative to unit noise variance
//! and are converted to linear ratios at this boundary only.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{self, GainReport, OutageQuery};
use crate::channel::{self, HopParams, InterfererSpec, SystemConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{self, McConfig};
use crate::sir;

/// 10^(x/10): dB to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// A scalar or a list; lists in the symmetric shorthand expand to one
/// series per value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Copy> OneOrMany<T> {
    fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(vs) => vs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub system: SystemSpec,
    pub sweep: SweepSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// Transmit power P in dB (linear P = 10^(dB/10)).
    #[serde(default)]
    pub power_db: f64,
    /// Constellation constant l (2 for BPSK).
    #[serde(default = "default_mod_const")]
    pub mod_const: f64,

    // symmetric shorthand
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<OneOrMany<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<OneOrMany<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hops: Option<OneOrMany<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inr_db: Option<f64>,

    // explicit non-symmetric chain
    #[serde(default, rename = "chain", skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<HopSpec>,
}

fn default_mod_const() -> f64 {
    2.0
}

/// One hop of an explicit chain. The interferer is given either directly
/// as (`beta`, `inr_db`) or as a list of `[[system.chain.interferer]]`
/// groups that are aggregated into the single equivalent interferer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopSpec {
    pub alpha: f64,
    /// Per-hop offset added to the swept desired-channel SNR (dB).
    #[serde(default)]
    pub snr_offset_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inr_db: Option<f64>,
    #[serde(default, rename = "interferer", skip_serializing_if = "Vec::is_empty")]
    pub interferer: Vec<InterfererGroupSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfererGroupSpec {
    pub shape: f64,
    pub inr_db: f64,
    #[serde(default = "default_count")]
    pub count: u32,
}

fn default_count() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Desired-channel SNR points in dB, strictly increasing.
    pub snr_db: Vec<f64>,
    /// Outage threshold γ_th in dB.
    #[serde(default)]
    pub threshold_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_chunk")]
    pub chunk: u64,
}

fn default_chunk() -> u64 {
    65_536
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: String,
    #[serde(default = "default_format")]
    pub format: String,
}

fn default_format() -> String {
    "csv".into()
}

/// Command-line overrides applied on top of a parsed config.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub analysis_only: bool,
    /// Worker threads for the Monte-Carlo chunks; 0 means all cores. Has
    /// no effect on results, only on wall time.
    pub workers: usize,
    pub out: Option<PathBuf>,
}

/// One expanded parameter combination of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// Hop templates; the swept SNR plus the per-hop offset fills in
    /// `snr_desired` at each sweep point.
    pub hops: Vec<SeriesHop>,
    pub symmetric: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesHop {
    pub alpha: f64,
    pub beta: f64,
    pub inr: f64,
    pub snr_offset_db: f64,
}

impl Series {
    /// Instantiate the chain at one sweep point.
    pub fn config_at(&self, snr_db: f64, power: f64, mod_const: f64) -> Result<SystemConfig> {
        let hops = self
            .hops
            .iter()
            .map(|h| {
                HopParams::new(
                    h.alpha,
                    h.beta,
                    db_to_linear(snr_db + h.snr_offset_db),
                    h.inr,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        SystemConfig::new(hops, power, mod_const)
    }
}

/// Per-sweep-point outage numbers. The closed-form bracket is
/// [`outage_low`, `outage_high`]; `asymptote` is the small-outage limit
/// curve; the worst-hop columns are only present for non-symmetric chains.
#[derive(Debug, Clone, PartialEq)]
pub struct OutagePoint {
    pub snr_db: f64,
    pub outage_low: f64,
    pub outage_high: f64,
    pub outage_mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub asymptote: f64,
    pub worst_hop_low: Option<f64>,
    pub worst_hop_high: Option<f64>,
    /// Set when the Monte-Carlo estimate falls outside the closed-form
    /// bracket by more than three standard errors.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    pub label: String,
    pub symmetric: bool,
    pub gains: GainReport,
    pub points: Vec<OutagePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageReport {
    pub threshold_db: f64,
    pub series: Vec<SeriesReport>,
}

impl OutageReport {
    pub fn flag_count(&self) -> usize {
        self.series
            .iter()
            .map(|s| s.points.iter().filter(|p| p.flagged).count())
            .sum()
    }

    /// Process exit code the CLI maps a finished report to: 2 when any
    /// point was flagged, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.flag_count() > 0 {
            2
        } else {
            0
        }
    }
}

/// Built-in experiment configs, shipped as ordinary files and embedded
/// verbatim. Returns (name, one-line summary, TOML text).
pub fn presets() -> &'static [(&'static str, &'static str, &'static str)] {
    &[
        (
            "fig2",
            "3-hop chain, Rayleigh interferers, desired-channel shapes 1.2 and 2.3",
            include_str!("../examples/fig2.toml"),
        ),
        (
            "fig3",
            "2- and 6-hop chains, Rayleigh desired channels, interferer shapes 0.8 and 1.0",
            include_str!("../examples/fig3.toml"),
        ),
    ]
}

pub fn preset(name: &str) -> Option<&'static str> {
    presets().iter().find(|(n, _, _)| *n == name).map(|(_, _, t)| *t)
}

/// Parse and validate a TOML experiment.
pub fn parse_experiment(text: &str) -> Result<Experiment> {
    let exp: Experiment =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    validate(&exp)?;
    Ok(exp)
}

/// Load an experiment from a file path, or from a preset name when no such
/// file exists.
pub fn load_experiment(path_or_preset: &str) -> Result<Experiment> {
    let path = Path::new(path_or_preset);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path_or_preset.into(),
            source,
        })?;
        return parse_experiment(&text);
    }
    if let Some(text) = preset(path_or_preset) {
        return parse_experiment(text);
    }
    Err(Error::Config(format!(
        "'{path_or_preset}' is neither a readable file nor a preset name (try `presets list`)"
    )))
}

fn validate(exp: &Experiment) -> Result<()> {
    let sweep = &exp.sweep;
    if sweep.snr_db.is_empty() {
        return Err(Error::Config("sweep.snr_db: must not be empty".into()));
    }
    if sweep.snr_db.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("sweep.snr_db: values must be finite".into()));
    }
    if sweep.snr_db.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "sweep.snr_db: values must be strictly increasing".into(),
        ));
    }
    if !sweep.threshold_db.is_finite() {
        return Err(Error::Config("sweep.threshold_db: must be finite".into()));
    }

    let sys = &exp.system;
    if !sys.power_db.is_finite() {
        return Err(Error::Config("system.power_db: must be finite".into()));
    }
    if !sys.mod_const.is_finite() || sys.mod_const <= 0.0 {
        return Err(Error::Config("system.mod_const: must be positive".into()));
    }

    let shorthand_fields =
        [sys.alpha.is_some(), sys.beta.is_some(), sys.hops.is_some(), sys.inr_db.is_some()];
    let any_shorthand = shorthand_fields.iter().any(|&b| b);
    let all_shorthand = shorthand_fields.iter().all(|&b| b);
    match (any_shorthand, sys.chain.is_empty()) {
        (true, false) => {
            return Err(Error::Config(
                "system: give either the symmetric shorthand or [[system.chain]], not both"
                    .into(),
            ))
        }
        (false, true) => {
            return Err(Error::Config(
                "system: missing chain; give alpha/beta/hops/inr_db or [[system.chain]]".into(),
            ))
        }
        (true, true) if !all_shorthand => {
            return Err(Error::Config(
                "system: symmetric shorthand needs all of alpha, beta, hops, inr_db".into(),
            ))
        }
        _ => {}
    }

    if any_shorthand {
        for (name, values) in [
            ("system.alpha", sys.alpha.as_ref().unwrap().values()),
            ("system.beta", sys.beta.as_ref().unwrap().values()),
        ] {
            if values.is_empty() {
                return Err(Error::Config(format!("{name}: must not be empty")));
            }
            if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(Error::Config(format!("{name}: values must be positive")));
            }
        }
        let ks = sys.hops.as_ref().unwrap().values();
        if ks.is_empty() {
            return Err(Error::Config("system.hops: must not be empty".into()));
        }
        if ks.iter().any(|&k| k == 0) {
            return Err(Error::Config("system.hops: hop counts must be >= 1".into()));
        }
        if !sys.inr_db.unwrap().is_finite() {
            return Err(Error::Config("system.inr_db: must be finite".into()));
        }
    }

    for (i, hop) in sys.chain.iter().enumerate() {
        let at = |field: &str| format!("system.chain[{i}].{field}");
        if !hop.alpha.is_finite() || hop.alpha <= 0.0 {
            return Err(Error::Config(format!("{}: must be positive", at("alpha"))));
        }
        if !hop.snr_offset_db.is_finite() {
            return Err(Error::Config(format!("{}: must be finite", at("snr_offset_db"))));
        }
        match (hop.beta, hop.inr_db, hop.interferer.is_empty()) {
            (Some(beta), Some(inr_db), true) => {
                if !beta.is_finite() || beta <= 0.0 {
                    return Err(Error::Config(format!("{}: must be positive", at("beta"))));
                }
                if !inr_db.is_finite() {
                    return Err(Error::Config(format!("{}: must be finite", at("inr_db"))));
                }
            }
            (None, None, false) => {
                for (j, g) in hop.interferer.iter().enumerate() {
                    let at = |field: &str| format!("system.chain[{i}].interferer[{j}].{field}");
                    if !g.shape.is_finite() || g.shape <= 0.0 {
                        return Err(Error::Config(format!("{}: must be positive", at("shape"))));
                    }
                    if !g.inr_db.is_finite() {
                        return Err(Error::Config(format!("{}: must be finite", at("inr_db"))));
                    }
                    if g.count == 0 {
                        return Err(Error::Config(format!("{}: must be >= 1", at("count"))));
                    }
                }
            }
            _ => {
                return Err(Error::Config(format!(
                    "system.chain[{i}]: give either beta + inr_db or [[system.chain.interferer]]"
                )));
            }
        }
    }

    if let Some(mc) = &exp.mc {
        if mc.trials == 0 {
            return Err(Error::Config("mc.trials: must be >= 1".into()));
        }
        if mc.chunk == 0 {
            return Err(Error::Config("mc.chunk: must be >= 1".into()));
        }
    }

    if let Some(out) = &exp.output {
        if out.format != "csv" {
            return Err(Error::Config(format!(
                "output.format: only \"csv\" is supported, got \"{}\"",
                out.format
            )));
        }
        if out.path.is_empty() {
            return Err(Error::Config("output.path: must not be empty".into()));
        }
    }

    Ok(())
}

/// Expand a validated system spec into its series, enumerated hop-count
/// first, then alpha, then beta.
pub fn expand_series(sys: &SystemSpec) -> Result<Vec<Series>> {
    if !sys.chain.is_empty() {
        let mut hops = Vec::with_capacity(sys.chain.len());
        for spec in &sys.chain {
            let (beta, inr) = match (spec.beta, spec.inr_db) {
                (Some(beta), Some(inr_db)) => (beta, db_to_linear(inr_db)),
                _ => {
                    let groups = spec
                        .interferer
                        .iter()
                        .map(|g| InterfererSpec::new(g.shape, db_to_linear(g.inr_db), g.count))
                        .collect::<Result<Vec<_>>>()?;
                    channel::aggregate_nonidentical_interferers(&groups)?
                }
            };
            hops.push(SeriesHop {
                alpha: spec.alpha,
                beta,
                inr,
                snr_offset_db: spec.snr_offset_db,
            });
        }
        let symmetric = hops.windows(2).all(|w| w[0] == w[1]);
        return Ok(vec![Series { label: format!("chain K={}", hops.len()), hops, symmetric }]);
    }

    let alphas = sys.alpha.as_ref().unwrap().values();
    let betas = sys.beta.as_ref().unwrap().values();
    let ks = sys.hops.as_ref().unwrap().values();
    let inr = db_to_linear(sys.inr_db.unwrap());

    let mut series = Vec::with_capacity(ks.len() * alphas.len() * betas.len());
    for &k in &ks {
        for &alpha in &alphas {
            for &beta in &betas {
                let mut label = String::new();
                if ks.len() > 1 {
                    let _ = write!(label, "K={k} ");
                }
                let _ = write!(label, "alpha={alpha} beta={beta}");
                let hop = SeriesHop { alpha, beta, inr, snr_offset_db: 0.0 };
                series.push(Series {
                    label: label.trim().to_string(),
                    hops: vec![hop; k as usize],
                    symmetric: true,
                });
            }
        }
    }
    Ok(series)
}

/// Flag rule: the estimate must stay within three standard errors of the
/// closed-form bracket. Deep in the tail the estimate can be exactly zero
/// with a zero sample stderr, so the binomial error implied by the bracket
/// edge is used as a floor.
fn violates_bracket(low: f64, high: f64, mean: f64, stderr: f64, trials: u64) -> bool {
    let n = trials as f64;
    let sigma_low = (low * (1.0 - low) / n).sqrt().max(stderr);
    let sigma_high = (high * (1.0 - high) / n).sqrt().max(stderr);
    mean < low - 3.0 * sigma_low || mean > high + 3.0 * sigma_high
}

/// Run the sweep: closed-form bounds and asymptote at every point, plus a
/// Monte-Carlo estimate when the config (and flags) ask for one. Writes
/// the CSV to `opts.out`, falling back to the config's `output.path`;
/// returns the report and the path written, if any.
pub fn run_experiment(
    exp: &Experiment,
    opts: &RunOptions,
) -> Result<(OutageReport, Option<PathBuf>)> {
    validate(exp)?;
    let power = db_to_linear(exp.system.power_db);
    let mod_const = exp.system.mod_const;
    let threshold = db_to_linear(exp.sweep.threshold_db);
    let query = OutageQuery::new(threshold)?;

    let mc = if opts.analysis_only || (exp.mc.is_none() && opts.trials.is_none()) {
        None
    } else {
        let trials = opts.trials.or(exp.mc.as_ref().map(|s| s.trials)).unwrap();
        let seed = opts.seed.unwrap_or_else(|| exp.mc.as_ref().map_or(0, |s| s.seed));
        let chunk = exp.mc.as_ref().map_or_else(default_chunk, |s| s.chunk);
        Some(McConfig::new(trials, seed, chunk.min(trials))?)
    };

    let series_specs = expand_series(&exp.system)?;
    let mut series_reports = Vec::with_capacity(series_specs.len());
    for (si, series) in series_specs.iter().enumerate() {
        let k = series.hops.len();
        let mut points = Vec::with_capacity(exp.sweep.snr_db.len());
        for (pi, &snr_db) in exp.sweep.snr_db.iter().enumerate() {
            let config = series.config_at(snr_db, power, mod_const)?;
            let (outage_low, outage_high) = analysis::outage_bounds(&config, &query)?;

            let asym_hop = worst_hop_params(&config);
            let asymptote =
                analysis::asymptotic_params(&asym_hop, power, k)?.cdf(threshold);

            let (worst_hop_low, worst_hop_high) = if series.symmetric {
                (None, None)
            } else {
                (
                    Some(analysis::upper_bound_cdf_worst_hop(&config, threshold)?),
                    Some(analysis::lower_bound_cdf_worst_hop(&config, threshold)?),
                )
            };

            let (outage_mc, mc_stderr, flagged) = match &mc {
                Some(base) => {
                    let sub = McConfig {
                        seed: montecarlo::derive_seed(base.seed, &[si as u64, pi as u64]),
                        ..*base
                    };
                    let est = montecarlo::simulate_outage(&config, &query, &sub, opts.workers);
                    let flagged = violates_bracket(
                        outage_low,
                        outage_high,
                        est.mean,
                        est.stderr,
                        est.trials,
                    );
                    (Some(est.mean), Some(est.stderr), flagged)
                }
                None => (None, None, false),
            };

            points.push(OutagePoint {
                snr_db,
                outage_low,
                outage_high,
                outage_mc,
                mc_stderr,
                asymptote,
                worst_hop_low,
                worst_hop_high,
                flagged,
            });
        }

        // gains of the series; non-symmetric chains are characterized by
        // their worst hop, evaluated at the first sweep point
        let gain_config = series.config_at(exp.sweep.snr_db[0], power, mod_const)?;
        let gain_hop = worst_hop_params(&gain_config);
        let gains = analysis::gains(&gain_hop, power, k, mod_const)?;

        series_reports.push(SeriesReport {
            label: series.label.clone(),
            symmetric: series.symmetric,
            gains,
            points,
        });
    }

    let report = OutageReport { threshold_db: exp.sweep.threshold_db, series: series_reports };

    let out_path = opts
        .out
        .clone()
        .or_else(|| exp.output.as_ref().map(|o| PathBuf::from(&o.path)));
    if let Some(path) = &out_path {
        emit_csv(&report, path)?;
    }
    Ok((report, out_path))
}

fn worst_hop_params(config: &SystemConfig) -> HopParams {
    config.hops[sir::worst_hop(config)]
}

/// Fixed CSV header; non-symmetric runs append the worst-hop columns.
pub const CSV_HEADER: &str = "snr_db,outage_low,outage_high,outage_mc,mc_stderr,asymptote";

/// Render the report as CSV: one row per sweep point, series stacked in
/// order, floats at 17 significant digits so values round-trip exactly,
/// missing Monte-Carlo fields as empty cells.
pub fn render_csv(report: &OutageReport) -> String {
    let with_worst_hop = report.series.iter().any(|s| !s.symmetric);
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    if with_worst_hop {
        out.push_str(",outage_low_worsthop,outage_high_worsthop");
    }
    out.push('\n');
    for series in &report.series {
        for p in &series.points {
            let _ = write!(out, "{}", fmt_field(p.snr_db));
            for v in [Some(p.outage_low), Some(p.outage_high), p.outage_mc, p.mc_stderr] {
                out.push(',');
                if let Some(v) = v {
                    let _ = write!(out, "{}", fmt_field(v));
                }
            }
            out.push(',');
            let _ = write!(out, "{}", fmt_field(p.asymptote));
            if with_worst_hop {
                for v in [p.worst_hop_low, p.worst_hop_high] {
                    out.push(',');
                    if let Some(v) = v {
                        let _ = write!(out, "{}", fmt_field(v));
                    }
                }
            }
            out.push('\n');
        }
    }
    out
}

fn fmt_field(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn emit_csv(report: &OutageReport, path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(report)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
