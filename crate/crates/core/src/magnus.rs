//! First-order Magnus wave packet from `|00⟩` and its comparison with exact propagation.
//!
//! With `S⁽¹⁾ = −i∫H_I dt` the three-state exponential closes in terms of θ₁, θ₂:
//! `c₀ = (|θ₂|² + |θ₁|² cos θ₁₂)/θ₁₂²`, `c₁ = iθ₁ sin θ₁₂/θ₁₂`,
//! `c₂ = θ₁θ₂ (cos θ₁₂ − 1)/θ₁₂²`.

use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::Result;
use crate::field::{theta_integrals, FieldConfig, ThetaPair};
use crate::model::RotorModel;
use crate::observables::{max_orientation_over_revival, population_phase_report, PopulationPhaseReport};
use crate::propagator::{propagate_exact, StepControl, WavePacket};

/// Below this θ₁₂ the trigonometric ratios switch to their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// `sin x / x`.
fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `(cos x − 1)/x²`.
fn cosm1_over_sq(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        -0.5 + x2 / 24.0 - x2 * x2 / 720.0
    } else {
        let s = (0.5 * x).sin();
        -2.0 * s * s / (x * x)
    }
}

/// Three-state packet `U⁽¹⁾|00⟩` for the given overlaps, referenced to `thetas.time`.
pub fn first_order_wavepacket(thetas: &ThetaPair) -> WavePacket {
    let x = thetas.theta12();
    let g = cosm1_over_sq(x);
    let (t1, t2) = (thetas.theta1, thetas.theta2);
    let c0 = C64::new(1.0 + t1.norm_sqr() * g, 0.0);
    let c1 = C64::i() * t1 * sinc(x);
    let c2 = t1 * t2 * g;
    WavePacket::from_raw(vec![c0, c1, c2], thetas.time)
}

/// Wrap an angle into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Exact versus first-order analytic outcome for one field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRecord {
    /// Exact populations/phases of `J = 0, 1, 2`.
    pub exact: PopulationPhaseReport,
    pub analytic: PopulationPhaseReport,
    /// `exact − analytic` per state.
    pub population_diff: [f64; 3],
    /// Wrapped `exact − analytic` phase per state.
    pub phase_diff: [f64; 3],
    pub exact_orientation: f64,
    pub analytic_orientation: f64,
    /// Exact population outside `J ≤ 2` (zero for the three-state model).
    pub leakage: f64,
    pub norm_drift: f64,
    #[serde(skip)]
    pub thetas: ThetaPair,
}

impl ComparisonRecord {
    pub fn max_population_diff(&self) -> f64 {
        self.population_diff.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn max_phase_diff(&self) -> f64 {
        self.phase_diff.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

pub fn magnus_vs_exact_report(config: &FieldConfig, model: &RotorModel, control: &StepControl) -> Result<ComparisonRecord> {
    let exact_run = propagate_exact(&WavePacket::ground(model.dim(), config.t_start), config, model, control)?;
    let thetas = theta_integrals(config, model, config.t_end)?;
    let analytic_packet = first_order_wavepacket(&thetas);

    let exact_full = population_phase_report(&exact_run.final_state);
    let exact = PopulationPhaseReport {
        populations: exact_full.populations[..3].to_vec(),
        phases: exact_full.phases[..3].to_vec(),
    };
    let analytic = population_phase_report(&analytic_packet);
    let mut population_diff = [0.0; 3];
    let mut phase_diff = [0.0; 3];
    for j in 0..3 {
        population_diff[j] = exact.populations[j] - analytic.populations[j];
        phase_diff[j] = wrap_phase(exact.phases[j] - analytic.phases[j]);
    }
    let analytic_model = RotorModel::new(model.b(), model.mu(), 2)?;
    Ok(ComparisonRecord {
        exact,
        analytic,
        population_diff,
        phase_diff,
        exact_orientation: max_orientation_over_revival(&exact_run.final_state, model).0,
        analytic_orientation: max_orientation_over_revival(&analytic_packet, &analytic_model).0,
        leakage: exact_full.populations[3..].iter().sum(),
        norm_drift: exact_run.norm_drift,
        thetas,
    })
}
