//! Grid scans of the two-pulse design over bandwidth, detuning and delay, evaluated
//! by exact propagation, by the first-order analytic packet, or both.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{self, Write};

use crate::error::{invalid, Result};
use crate::field::{pulses_from_targets, theta_integrals, FieldConfig, ThetaPair};
use crate::magnus::first_order_wavepacket;
use crate::model::RotorModel;
use crate::observables::{max_orientation_over_revival, population_phase_report};
use crate::optimum::{condition_amplitudes, Branch};
use crate::propagator::{propagate_exact, StepControl, WavePacket};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// Δω in units of 1/τ′.
    Bandwidth,
    /// Δ in internal angular-frequency units.
    Detuning,
    /// Δ in units of ω01.
    DetuningRelative,
    /// τ₀ in units of τ′.
    Delay,
}

impl AxisKind {
    fn slot(self) -> u8 {
        match self {
            AxisKind::Bandwidth => 0,
            AxisKind::Detuning | AxisKind::DetuningRelative => 1,
            AxisKind::Delay => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AxisKind::Bandwidth => "bandwidth",
            AxisKind::Detuning => "detuning",
            AxisKind::DetuningRelative => "detuning_relative",
            AxisKind::Delay => "delay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub kind: AxisKind,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl AxisRange {
    pub fn new(kind: AxisKind, min: f64, max: f64, n: usize) -> Self {
        Self { kind, min, max, n }
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.max } else { self.min + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Exact,
    Analytic,
    Both,
}

impl SweepMode {
    pub fn record_modes(self) -> &'static [RecordMode] {
        match self {
            SweepMode::Exact => &[RecordMode::Exact],
            SweepMode::Analytic => &[RecordMode::Analytic],
            SweepMode::Both => &[RecordMode::Exact, RecordMode::Analytic],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordMode {
    Exact,
    Analytic,
}

impl fmt::Display for RecordMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordMode::Exact => "exact",
            RecordMode::Analytic => "analytic",
        })
    }
}

/// Which overlap magnitudes the pulses are scaled to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Target {
    Condition {
        branch: Branch,
        #[serde(default)]
        winding: u32,
    },
    /// Magnitudes in radians.
    Custom { theta1: f64, theta2: f64 },
}

impl Target {
    pub fn resolve(&self) -> Result<ThetaPair> {
        match *self {
            Target::Condition { branch, winding } => Ok(condition_amplitudes(branch, winding)?.targets()),
            Target::Custom { theta1, theta2 } => {
                if !(theta1.is_finite() && theta2.is_finite() && theta1 >= 0.0 && theta2 >= 0.0) {
                    return Err(invalid("target", "custom magnitudes must be finite and >= 0"));
                }
                Ok(ThetaPair::new(theta1.into(), theta2.into()))
            }
        }
    }
}

/// Pulse parameters in design units: Δ absolute, Δω in 1/τ′, τ₀ in τ′.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignPoint {
    pub detuning: f64,
    pub bandwidth: f64,
    pub delay: f64,
    pub phase1: f64,
    pub phase2: f64,
}

impl Default for DesignPoint {
    fn default() -> Self {
        Self {
            detuning: 0.0,
            bandwidth: 0.02,
            delay: 0.0,
            phase1: -std::f64::consts::FRAC_PI_2,
            phase2: -std::f64::consts::FRAC_PI_2,
        }
    }
}

impl DesignPoint {
    pub fn with_axis(mut self, kind: AxisKind, value: f64, model: &RotorModel) -> Self {
        match kind {
            AxisKind::Bandwidth => self.bandwidth = value,
            AxisKind::Detuning => self.detuning = value,
            AxisKind::DetuningRelative => self.detuning = value * model.omega01(),
            AxisKind::Delay => self.delay = value,
        }
        self
    }

    pub fn field(&self, targets: &ThetaPair, model: &RotorModel) -> Result<FieldConfig> {
        let tp = model.tau_prime();
        pulses_from_targets(
            targets,
            model,
            self.detuning,
            self.bandwidth / tp,
            self.delay * tp,
            self.phase1,
            self.phase2,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub target: Target,
    pub mode: SweepMode,
    /// One axis for a line cut, two for a map (first axis outermost).
    pub axes: Vec<AxisRange>,
    #[serde(default)]
    pub base: DesignPoint,
    #[serde(default)]
    pub step: StepControl,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(invalid("axes", format!("need one or two axes, got {}", self.axes.len())));
        }
        if self.axes.len() == 2 && self.axes[0].kind.slot() == self.axes[1].kind.slot() {
            return Err(invalid("axes", "the two axes must sweep different parameters"));
        }
        for a in &self.axes {
            if a.n < 2 {
                return Err(invalid("axes", format!("{} needs n >= 2, got {}", a.kind.name(), a.n)));
            }
            if !(a.min.is_finite() && a.max.is_finite()) {
                return Err(invalid("axes", format!("{} range must be finite", a.kind.name())));
            }
            if a.kind == AxisKind::Bandwidth && a.min.min(a.max) <= 0.0 {
                return Err(invalid("axes", "bandwidth range must be positive"));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub axis_values: Vec<f64>,
    pub mode: RecordMode,
    pub max_orientation: f64,
    pub populations: [f64; 3],
    pub phases: [f64; 3],
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axes: Vec<AxisKind>,
    pub shape: Vec<usize>,
    pub modes: Vec<RecordMode>,
    /// Row-major over the grid; each point contributes one record per mode in `modes`.
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }

    /// Records of one mode in grid order.
    pub fn mode(&self, mode: RecordMode) -> impl Iterator<Item = &SweepRecord> {
        self.records.iter().filter(move |r| r.mode == mode)
    }

    /// `max_orientation` of one mode in grid order.
    pub fn orientation(&self, mode: RecordMode) -> Vec<f64> {
        self.mode(mode).map(|r| r.max_orientation).collect()
    }

    /// Long-format CSV: `axis1,axis2,mode,max_orientation,p0,p1,p2,phase0,phase1,phase2`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "axis1,axis2,mode,max_orientation,p0,p1,p2,phase0,phase1,phase2")?;
        for r in &self.records {
            let a2 = r.axis_values.get(1).map(|v| format!("{v:?}")).unwrap_or_default();
            writeln!(
                w,
                "{:?},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                r.axis_values[0],
                a2,
                r.mode,
                r.max_orientation,
                r.populations[0],
                r.populations[1],
                r.populations[2],
                r.phases[0],
                r.phases[1],
                r.phases[2]
            )?;
        }
        Ok(())
    }
}

fn first_three(v: &[f64]) -> [f64; 3] {
    [v[0], v.get(1).copied().unwrap_or(0.0), v.get(2).copied().unwrap_or(0.0)]
}

fn evaluate(
    mode: RecordMode,
    field: &FieldConfig,
    model: &RotorModel,
    three_state: &RotorModel,
    step: &StepControl,
) -> Result<(f64, [f64; 3], [f64; 3])> {
    let (packet, orientation_model) = match mode {
        RecordMode::Exact => {
            let run = propagate_exact(&WavePacket::ground(model.dim(), field.t_start), field, model, step)?;
            (run.final_state, model)
        }
        RecordMode::Analytic => {
            let thetas = theta_integrals(field, model, field.t_end)?;
            (first_order_wavepacket(&thetas), three_state)
        }
    };
    let (max, _) = max_orientation_over_revival(&packet, orientation_model);
    let report = population_phase_report(&packet);
    Ok((max, first_three(&report.populations), first_three(&report.phases)))
}

/// Evaluate every grid point; per-point failures are kept in the record's `error`.
///
/// Points run in parallel and are gathered in grid order, so the output is
/// independent of scheduling.
pub fn run_sweep(config: &SweepConfig, model: &RotorModel) -> Result<SweepResult> {
    config.validate()?;
    let targets = config.target.resolve()?;
    let three_state = RotorModel::new(model.b(), model.mu(), 2)?;
    let axis_values: Vec<Vec<f64>> = config.axes.iter().map(AxisRange::values).collect();
    let shape = config.shape();
    let total: usize = shape.iter().product();
    let modes = config.mode.record_modes();

    let records: Vec<Vec<SweepRecord>> = (0..total)
        .into_par_iter()
        .map(|index| {
            let mut coords = Vec::with_capacity(shape.len());
            let mut rest = index;
            for (k, n) in shape.iter().enumerate().rev() {
                coords.push((k, rest % n));
                rest /= n;
            }
            coords.reverse();
            let mut point = config.base;
            let mut values = Vec::with_capacity(coords.len());
            for &(k, i) in &coords {
                let v = axis_values[k][i];
                point = point.with_axis(config.axes[k].kind, v, model);
                values.push(v);
            }
            let field = point.field(&targets, model);
            modes
                .iter()
                .map(|&mode| {
                    let outcome = field
                        .clone()
                        .and_then(|f| evaluate(mode, &f, model, &three_state, &config.step));
                    match outcome {
                        Ok((max, populations, phases)) => SweepRecord {
                            axis_values: values.clone(),
                            mode,
                            max_orientation: max,
                            populations,
                            phases,
                            error: None,
                        },
                        Err(e) => SweepRecord {
                            axis_values: values.clone(),
                            mode,
                            max_orientation: f64::NAN,
                            populations: [f64::NAN; 3],
                            phases: [f64::NAN; 3],
                            error: Some(e.to_string()),
                        },
                    }
                })
                .collect()
        })
        .collect();

    Ok(SweepResult {
        axes: config.axes.iter().map(|a| a.kind).collect(),
        shape,
        modes: modes.to_vec(),
        records: records.into_iter().flatten().collect(),
    })
}
