//! Exact propagation of the interaction-picture Schrödinger equation
//! `i dc/dt = H_I(t) c` with fixed-step classical Runge–Kutta.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};
use crate::field::{field_time, FieldConfig};
use crate::model::RotorModel;

/// Tolerance on `Σ|c_J|² = 1` for a packet to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Default number of RK4 steps per period of the ω12 transition.
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 200.0;

/// Rotational wave packet: interaction-picture coefficients `c_J` at `reference_time`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    coeffs: Vec<C64>,
    reference_time: f64,
}

impl WavePacket {
    pub fn new(coeffs: Vec<C64>, reference_time: f64) -> Result<Self> {
        let packet = Self {
            coeffs,
            reference_time,
        };
        let n = packet.norm_sqr();
        if packet.coeffs.is_empty() || (n - 1.0).abs().is_nan() || (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(packet)
    }

    /// `|J=0, M⟩` in a basis of `dim` states.
    pub fn ground(dim: usize, reference_time: f64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); dim.max(1)];
        coeffs[0] = C64::new(1.0, 0.0);
        Self {
            coeffs,
            reference_time,
        }
    }

    pub(crate) fn from_raw(coeffs: Vec<C64>, reference_time: f64) -> Self {
        Self {
            coeffs,
            reference_time,
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn reference_time(&self) -> f64 {
        self.reference_time
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(C64::norm_sqr).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.coeffs.iter().map(C64::norm_sqr).collect()
    }

    /// Raw `arg c_J` in (−π, π].
    pub fn phases(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.arg()).collect()
    }
}

/// Step-size and tolerance controls for [`propagate_exact`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepControl {
    /// Upper bound on the RK4 step; `None` means `(2π/ω12)/200`.
    pub dt: Option<f64>,
    pub norm_tolerance: f64,
    /// Record the state every this many steps (plus the final state).
    pub record_every: Option<usize>,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            dt: None,
            norm_tolerance: NORM_TOLERANCE,
            record_every: None,
        }
    }
}

impl StepControl {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt: Some(dt),
            ..Self::default()
        }
    }

    pub fn max_step(&self, model: &RotorModel) -> f64 {
        self.dt
            .unwrap_or(TAU / model.omega12() / DEFAULT_STEPS_PER_PERIOD)
    }
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub final_state: WavePacket,
    pub trajectory: Vec<(f64, WavePacket)>,
    /// Maximum `|1 − Σ|c_J|²|` seen over the run.
    pub norm_drift: f64,
    pub steps: usize,
    pub dt: f64,
}

/// Right-hand side `dc/dt = −i H_I(t) c` for the tridiagonal rotor coupling.
struct Rhs<'a> {
    config: &'a FieldConfig,
    couplings: Vec<f64>,
    two_b: f64,
}

impl<'a> Rhs<'a> {
    fn new(config: &'a FieldConfig, model: &RotorModel) -> Self {
        Self {
            config,
            couplings: (0..model.j_max()).map(|j| model.dipole_coupling(j)).collect(),
            two_b: 2.0 * model.b(),
        }
    }

    fn eval(&self, t: f64, c: &[C64], out: &mut [C64]) {
        let e = field_time(self.config, t);
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        if e == 0.0 {
            return;
        }
        // ω_J = 2B(J+1), so e^{−iω_J t} = base^{J+1}
        let base = C64::from_polar(1.0, -self.two_b * t);
        let mut rot = base;
        for (j, &mu) in self.couplings.iter().enumerate() {
            // H_{J,J+1} = −μ E e^{−iω t}, H_{J+1,J} = −μ E e^{+iω t}; dc/dt = −i H c
            let g = C64::new(0.0, e * mu);
            out[j] += g * rot * c[j + 1];
            out[j + 1] += g * rot.conj() * c[j];
            rot *= base;
        }
    }
}

/// Propagate `initial` through the field window `[t_start, t_end]`.
///
/// The initial coefficients are taken at `config.t_start`; the result is referenced to
/// `config.t_end`.
pub fn propagate_exact(
    initial: &WavePacket,
    config: &FieldConfig,
    model: &RotorModel,
    control: &StepControl,
) -> Result<PropagationResult> {
    propagate_between(initial, config, model, config.t_start, config.t_end, control)
}

/// Propagate from `t_from` to `t_to`; `t_to < t_from` integrates backward in time.
pub fn propagate_between(
    initial: &WavePacket,
    config: &FieldConfig,
    model: &RotorModel,
    t_from: f64,
    t_to: f64,
    control: &StepControl,
) -> Result<PropagationResult> {
    if initial.dim() != model.dim() {
        return Err(invalid(
            "initial",
            format!("packet has {} states, model has {}", initial.dim(), model.dim()),
        ));
    }
    let n0 = initial.norm_sqr();
    if (n0 - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr: n0 });
    }
    let max_step = control.max_step(model);
    if !(max_step.is_finite() && max_step > 0.0) {
        return Err(invalid("dt", format!("step must be > 0, got {max_step}")));
    }
    let span = t_to - t_from;
    let steps = ((span.abs() / max_step).ceil() as usize).max(1);
    let h = span / steps as f64;

    let rhs = Rhs::new(config, model);
    let n = model.dim();
    let mut c = initial.coeffs().to_vec();
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut trajectory = Vec::new();
    let mut drift: f64 = 0.0;

    if control.record_every.is_some() {
        trajectory.push((t_from, WavePacket::from_raw(c.clone(), t_from)));
    }

    for step in 0..steps {
        let t = t_from + h * step as f64;
        rhs.eval(t, &c, &mut k1);
        for i in 0..n {
            tmp[i] = c[i] + 0.5 * h * k1[i];
        }
        rhs.eval(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = c[i] + 0.5 * h * k2[i];
        }
        rhs.eval(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = c[i] + h * k3[i];
        }
        rhs.eval(t + h, &tmp, &mut k4);
        for i in 0..n {
            c[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let norm: f64 = c.iter().map(C64::norm_sqr).sum();
        drift = drift.max((1.0 - norm).abs());
        if drift > control.norm_tolerance {
            return Err(Error::NormDrift {
                drift,
                tolerance: control.norm_tolerance,
                dt: h.abs(),
                steps: step + 1,
            });
        }
        if let Some(every) = control.record_every {
            let t_next = if step + 1 == steps { t_to } else { t + h };
            if (step + 1) % every.max(1) == 0 || step + 1 == steps {
                trajectory.push((t_next, WavePacket::from_raw(c.clone(), t_next)));
            }
        }
    }

    Ok(PropagationResult {
        final_state: WavePacket::from_raw(c, t_to),
        trajectory,
        norm_drift: drift,
        steps,
        dt: h.abs(),
    })
}

/// Advance a packet by `t` under the field-free rotor: `c_J → c_J e^{−iE_J t}`.
pub fn free_evolve(packet: &WavePacket, model: &RotorModel, t: f64) -> WavePacket {
    let coeffs = packet
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| c * C64::from_polar(1.0, -model.energy(j) * t))
        .collect();
    WavePacket::from_raw(coeffs, packet.reference_time() + t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PulseSpec, DEFAULT_N_SIGMA};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn weak_pulse(model: &RotorModel) -> FieldConfig {
        let p1 = PulseSpec::new(0.6, model.omega01(), 0.3, 0.2, 0.0).unwrap();
        let p2 = PulseSpec::new(0.4, model.omega12(), 0.3, -0.5, 1.0).unwrap();
        FieldConfig::new([p1, p2], DEFAULT_N_SIGMA).unwrap()
    }

    #[test]
    fn packet_validation() {
        assert!(WavePacket::new(vec![C64::new(1.0, 0.0), C64::new(0.1, 0.0)], 0.0).is_err());
        assert!(WavePacket::new(vec![], 0.0).is_err());
        let p = WavePacket::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)], 0.0).unwrap();
        assert_abs_diff_eq!(p.populations()[1], 0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(p.phases()[1], PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_field_is_identity() {
        let model = RotorModel::default();
        let p = PulseSpec::new(0.0, 2.0, 0.3, 0.0, 0.0).unwrap();
        let cfg = FieldConfig::new([p, p], DEFAULT_N_SIGMA).unwrap();
        let init = WavePacket::ground(3, cfg.t_start);
        let res = propagate_exact(&init, &cfg, &model, &StepControl::default()).unwrap();
        assert_eq!(res.final_state.coeffs(), init.coeffs());
        assert_eq!(res.norm_drift, 0.0);
    }

    #[test]
    fn norm_is_preserved() {
        let model = RotorModel::default();
        let cfg = weak_pulse(&model);
        let res = propagate_exact(&WavePacket::ground(3, 0.0), &cfg, &model, &StepControl::default()).unwrap();
        assert!(res.norm_drift <= 1e-10, "drift {}", res.norm_drift);
        assert!(res.final_state.populations()[1] > 1e-3);
    }

    #[test]
    fn coarse_step_reports_drift() {
        let model = RotorModel::default();
        let cfg = weak_pulse(&model);
        let err = propagate_exact(&WavePacket::ground(3, 0.0), &cfg, &model, &StepControl::with_dt(0.4)).unwrap_err();
        assert!(matches!(err, Error::NormDrift { .. }), "{err}");
    }

    #[test]
    fn trajectory_sampling() {
        let model = RotorModel::default();
        let cfg = weak_pulse(&model);
        let control = StepControl {
            record_every: Some(100),
            ..StepControl::default()
        };
        let res = propagate_exact(&WavePacket::ground(3, 0.0), &cfg, &model, &control).unwrap();
        assert_eq!(res.trajectory.first().unwrap().0, cfg.t_start);
        assert_eq!(res.trajectory.last().unwrap().0, cfg.t_end);
        assert_eq!(res.trajectory.last().unwrap().1, res.final_state);
        assert_eq!(res.trajectory.len(), 1 + res.steps.div_ceil(100));
    }

    #[test]
    fn backward_propagation_inverts() {
        let model = RotorModel::default();
        let cfg = weak_pulse(&model);
        let init = WavePacket::ground(3, cfg.t_start);
        let control = StepControl::default();
        let fwd = propagate_exact(&init, &cfg, &model, &control).unwrap();
        let back = propagate_between(&fwd.final_state, &cfg, &model, cfg.t_end, cfg.t_start, &control).unwrap();
        for (a, b) in back.final_state.coeffs().iter().zip(init.coeffs()) {
            assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn free_evolution() {
        let model = RotorModel::default();
        let s = 1.0 / 3.0f64.sqrt();
        let p = WavePacket::new(
            vec![C64::new(s, 0.0), C64::from_polar(s, 0.7), C64::from_polar(s, -1.1)],
            0.0,
        )
        .unwrap();
        assert_eq!(free_evolve(&p, &model, 0.0).coeffs(), p.coeffs());
        let later = free_evolve(&p, &model, 3.7);
        for (a, b) in later.populations().iter().zip(p.populations()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let revived = free_evolve(&p, &model, model.revival_period());
        for (a, b) in revived.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let model = RotorModel::new(1.0, 1.0, 4).unwrap();
        let cfg = weak_pulse(&model);
        assert!(propagate_exact(&WavePacket::ground(3, 0.0), &cfg, &model, &StepControl::default()).is_err());
    }
}
