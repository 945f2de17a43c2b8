//! Run configuration: TOML with one section per concern, or the `config` object of a
//! previous run's manifest.

use anyhow::{bail, Context, Result};
use orient_core::{AxisKind, AxisRange, Branch, DesignPoint, RotorModel, StepControl, SweepConfig, SweepMode, Target, UnitSystem};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: RotorModel,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default = "default_target")]
    pub target: Target,
    #[serde(default)]
    pub design: DesignSection,
    #[serde(default)]
    pub propagation: StepControl,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSection>,
}

fn default_target() -> Target {
    Target::Condition { branch: Branch::First, winding: 0 }
}

/// Pulse-pair parameters. Plain keys are internal units (Δ absolute, Δω in 1/τ′,
/// τ₀ in τ′); the suffixed keys are physical overrides converted through `[units]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    /// Δ in units of ω01.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning_relative: Option<f64>,
    /// Δ/2π in GHz.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    /// Δω/2π in GHz.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_ghz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_ps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub trace_points: usize,
    /// Trace length in revival periods after the pulses end.
    pub trace_revivals: f64,
    pub field_points: usize,
    pub trajectory: bool,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            trace_points: 2001,
            trace_revivals: 1.0,
            field_points: 4001,
            trajectory: false,
            svg: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_mode")]
    pub mode: SweepMode,
    pub axes: Vec<AxisRange>,
}

fn default_mode() -> SweepMode {
    SweepMode::Both
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    pub axis: AxisKind,
    pub values: Vec<f64>,
}

#[derive(Deserialize)]
struct Manifest {
    config: RunConfig,
}

impl RunConfig {
    /// Read a `.toml`/`.cfg` file, or the config snapshot inside a `.json` manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        if path.extension().is_some_and(|e| e == "json") {
            let m: Manifest = serde_json::from_str(&text)
                .with_context(|| format!("{}: not a run manifest", path.display()))?;
            return Ok(m.config);
        }
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Replace every physical override by its internal-unit value and fill defaults,
    /// so the result is the exact parameter set a run uses.
    pub fn resolve(&self) -> Result<Self> {
        let design = self.design_point()?;
        let mut out = self.clone();
        out.design = DesignSection {
            detuning: Some(design.detuning),
            bandwidth: Some(design.bandwidth),
            delay: Some(design.delay),
            phase1: Some(design.phase1),
            phase2: Some(design.phase2),
            ..DesignSection::default()
        };
        Ok(out)
    }

    pub fn design_point(&self) -> Result<DesignPoint> {
        let (m, u, d) = (&self.model, &self.units, &self.design);
        let defaults = DesignPoint::default();
        let tp = m.tau_prime();
        let detuning = one_of(
            "detuning",
            &[
                ("detuning", d.detuning),
                ("detuning_relative", d.detuning_relative.map(|x| x * m.omega01())),
                ("detuning_ghz", d.detuning_ghz.map(|x| u.ghz_to_angular(m, x))),
            ],
        )?
        .unwrap_or(defaults.detuning);
        let bandwidth = one_of(
            "bandwidth",
            &[("bandwidth", d.bandwidth), ("bandwidth_ghz", d.bandwidth_ghz.map(|x| u.ghz_to_angular(m, x) * tp))],
        )?
        .unwrap_or(defaults.bandwidth);
        let delay = one_of("delay", &[("delay", d.delay), ("delay_ps", d.delay_ps.map(|x| u.ps_to_time(m, x) / tp))])?
            .unwrap_or(defaults.delay);
        Ok(DesignPoint {
            detuning,
            bandwidth,
            delay,
            phase1: d.phase1.unwrap_or(defaults.phase1),
            phase2: d.phase2.unwrap_or(defaults.phase2),
        })
    }

    pub fn sweep_config(&self, mode: Option<SweepMode>) -> Result<SweepConfig> {
        let Some(s) = &self.sweep else {
            bail!("config has no [sweep] section");
        };
        Ok(SweepConfig {
            target: self.target,
            mode: mode.unwrap_or(s.mode),
            axes: s.axes.clone(),
            base: self.design_point()?,
            step: self.propagation,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

fn one_of(group: &str, options: &[(&str, Option<f64>)]) -> Result<Option<f64>> {
    let set: Vec<_> = options.iter().filter(|(_, v)| v.is_some()).collect();
    match set.as_slice() {
        [] => Ok(None),
        [(_, v)] => Ok(*v),
        _ => bail!(
            "[design] sets {} more than once ({})",
            group,
            set.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", ")
        ),
    }
}
