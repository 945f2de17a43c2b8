//! Two-pulse terahertz field: Gaussian pulses in time and frequency, and the
//! dipole-weighted spectral overlaps θ₁, θ₂ that drive the ladder transitions.
//!
//! Two Fourier conventions meet here and are kept separate on purpose:
//! the spectrum uses `E(ω) = ∫ 𝓔(t) e^{−iωt} dt`, while the overlaps use
//! `θ_k(t) = μ_k ∫ 𝓔(t′) e^{+iω_k t′} dt′`. At the end of the pulse they are
//! related by `θ_k*(t_f) = μ_k E(ω_k)`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Error, Result};
use crate::model::RotorModel;

/// Window half-width, in pulse durations, on each side of every pulse center.
pub const DEFAULT_N_SIGMA: f64 = 6.0;

/// Trapezoid steps per period of the fastest ladder transition.
pub const QUADRATURE_STEPS_PER_PERIOD: f64 = 40.0;

/// Relative agreement demanded between a quadrature and its doubled-resolution rerun.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;

/// A spectral lobe above this fraction of its peak at the other transition
/// frequency flags the configuration as spectrally overlapping.
pub const OVERLAP_THRESHOLD: f64 = 1e-3;

const MAX_REFINEMENTS: usize = 8;

/// One Gaussian terahertz pulse.
///
/// Spectrum `A e^{−(ω−ω_i)²/(2Δω²)} e^{iφ} e^{−iωτ_i}`; in time
/// `√(2/π) A Δω e^{−(t−τ_i)²Δω²/2} cos(ω_i (t−τ_i) + φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub amplitude: f64,
    pub center_freq: f64,
    pub bandwidth: f64,
    pub phase: f64,
    pub center_time: f64,
}

impl PulseSpec {
    pub fn new(amplitude: f64, center_freq: f64, bandwidth: f64, phase: f64, center_time: f64) -> Result<Self> {
        let pulse = Self {
            amplitude,
            center_freq,
            bandwidth,
            phase,
            center_time,
        };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(invalid("amplitude", format!("must be finite and >= 0, got {}", self.amplitude)));
        }
        if !(self.center_freq.is_finite() && self.center_freq > 0.0) {
            return Err(invalid("center_freq", format!("must be > 0, got {}", self.center_freq)));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(invalid("bandwidth", format!("must be > 0, got {}", self.bandwidth)));
        }
        if !self.phase.is_finite() || !self.center_time.is_finite() {
            return Err(invalid("phase", "phase and center time must be finite"));
        }
        Ok(())
    }

    /// τ = 1/Δω.
    pub fn duration(&self) -> f64 {
        1.0 / self.bandwidth
    }

    /// Envelope maximum √(2/π)·A/τ.
    pub fn peak(&self) -> f64 {
        (2.0 / PI).sqrt() * self.amplitude * self.bandwidth
    }

    pub fn field(&self, t: f64) -> f64 {
        let u = t - self.center_time;
        let x = u * self.bandwidth;
        self.peak() * (-0.5 * x * x).exp() * (self.center_freq * u + self.phase).cos()
    }

    /// Positive-frequency lobe of the designed spectrum.
    pub fn spectrum(&self, omega: f64) -> C64 {
        let d = (omega - self.center_freq) / self.bandwidth;
        self.amplitude * (-0.5 * d * d).exp() * C64::from_polar(1.0, self.phase - omega * self.center_time)
    }

    /// Full Fourier transform of [`PulseSpec::field`], including the mirror lobe at −ω_i.
    pub fn fourier(&self, omega: f64) -> C64 {
        let d = (omega + self.center_freq) / self.bandwidth;
        let mirror =
            self.amplitude * (-0.5 * d * d).exp() * C64::from_polar(1.0, -self.phase - omega * self.center_time);
        self.spectrum(omega) + mirror
    }

    /// Spectral shape factor `e^{−(ω−ω_i)²/(2Δω²)}` (lobe height relative to its peak).
    pub fn lobe_fraction(&self, omega: f64) -> f64 {
        let d = (omega - self.center_freq) / self.bandwidth;
        (-0.5 * d * d).exp()
    }
}

/// A pair of pulses together with the simulation window `[t_start, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub pulses: [PulseSpec; 2],
    pub t_start: f64,
    pub t_end: f64,
    /// Set when the two spectral lobes overlap at the transition frequencies.
    #[serde(default)]
    pub overlap_warning: bool,
}

impl FieldConfig {
    /// Window covering `n_sigma` durations on both sides of each pulse center.
    pub fn new(pulses: [PulseSpec; 2], n_sigma: f64) -> Result<Self> {
        for p in &pulses {
            p.validate()?;
        }
        if !(n_sigma.is_finite() && n_sigma > 0.0) {
            return Err(invalid("n_sigma", format!("must be > 0, got {n_sigma}")));
        }
        let t_start = pulses
            .iter()
            .map(|p| p.center_time - n_sigma * p.duration())
            .fold(f64::INFINITY, f64::min);
        let t_end = pulses
            .iter()
            .map(|p| p.center_time + n_sigma * p.duration())
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            pulses,
            t_start,
            t_end,
            overlap_warning: false,
        })
    }

    pub fn with_window(pulses: [PulseSpec; 2], t_start: f64, t_end: f64) -> Result<Self> {
        for p in &pulses {
            p.validate()?;
        }
        if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
            return Err(invalid("window", format!("need t_start < t_end, got [{t_start}, {t_end}]")));
        }
        Ok(Self {
            pulses,
            t_start,
            t_end,
            overlap_warning: false,
        })
    }

    /// Largest cross-lobe fraction: pulse 1 at ω12 or pulse 2 at ω01.
    pub fn spectral_overlap(&self, model: &RotorModel) -> f64 {
        let [p1, p2] = &self.pulses;
        p1.lobe_fraction(model.omega12()).max(p2.lobe_fraction(model.omega01()))
    }

    /// Largest envelope peak across the pulses.
    pub fn peak(&self) -> f64 {
        self.pulses.iter().map(PulseSpec::peak).fold(0.0, f64::max)
    }

    /// Closed-form time integral of the field over the whole real line.
    pub fn area(&self) -> f64 {
        self.pulses.iter().map(|p| p.fourier(0.0).re).sum()
    }
}

pub fn field_time(config: &FieldConfig, t: f64) -> f64 {
    config.pulses.iter().map(|p| p.field(t)).sum()
}

/// Designed spectrum `E(ω) = Σ_i A_i e^{−(ω−ω_i)²/(2Δω_i²)} e^{iφ_i} e^{−iωτ_i}`.
pub fn spectral_field(config: &FieldConfig, omega: f64) -> C64 {
    config.pulses.iter().map(|p| p.spectrum(omega)).sum()
}

/// Exact transform `∫ 𝓔(t) e^{−iωt} dt` of [`field_time`], negative-frequency tails included.
pub fn fourier_transform(config: &FieldConfig, omega: f64) -> C64 {
    config.pulses.iter().map(|p| p.fourier(omega)).sum()
}

/// Spectral overlap integrals of the field at the two ladder transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPair {
    pub theta1: C64,
    pub theta2: C64,
    /// Time at which the running integrals were evaluated.
    pub time: f64,
}

impl ThetaPair {
    pub fn new(theta1: C64, theta2: C64) -> Self {
        Self {
            theta1,
            theta2,
            time: 0.0,
        }
    }

    pub fn from_polar(mag1: f64, arg1: f64, mag2: f64, arg2: f64) -> Self {
        Self::new(C64::from_polar(mag1, arg1), C64::from_polar(mag2, arg2))
    }

    pub fn at(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// θ₁₂ = √(|θ₁|² + |θ₂|²).
    pub fn theta12(&self) -> f64 {
        self.theta1.norm().hypot(self.theta2.norm())
    }

    /// s = |θ₂|/|θ₁|, undefined when θ₁ vanishes.
    pub fn ratio(&self) -> Option<f64> {
        let m1 = self.theta1.norm();
        (m1 > 0.0).then(|| self.theta2.norm() / m1)
    }
}

/// Trapezoid sums of `𝓔(t) e^{iω t}` for both transitions on `steps` panels over `[a, b]`.
fn trapezoid(config: &FieldConfig, model: &RotorModel, a: f64, b: f64, steps: usize) -> (C64, C64) {
    let h = (b - a) / steps as f64;
    let (w1, w2) = (model.omega01(), model.omega12());
    let mut s1 = C64::new(0.0, 0.0);
    let mut s2 = C64::new(0.0, 0.0);
    for i in 0..=steps {
        let t = a + h * i as f64;
        let weight = if i == 0 || i == steps { 0.5 } else { 1.0 };
        let e = weight * field_time(config, t);
        s1 += e * C64::from_polar(1.0, w1 * t);
        s2 += e * C64::from_polar(1.0, w2 * t);
    }
    (s1 * h, s2 * h)
}

/// Running overlaps θ₁(t), θ₂(t) from `t_start` to `t` by composite trapezoid
/// quadrature, refined until a doubled grid agrees to [`QUADRATURE_TOLERANCE`].
pub fn theta_integrals(config: &FieldConfig, model: &RotorModel, t: f64) -> Result<ThetaPair> {
    let slack = 1e-9 * (config.t_end - config.t_start);
    if !(t >= config.t_start - slack && t <= config.t_end + slack) {
        return Err(invalid(
            "t",
            format!("{t} outside the field window [{}, {}]", config.t_start, config.t_end),
        ));
    }
    let span = t - config.t_start;
    if span <= 0.0 {
        return Ok(ThetaPair::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).at(t));
    }
    let h_max = TAU / model.omega12() / QUADRATURE_STEPS_PER_PERIOD;
    let mut steps = ((span / h_max).ceil() as usize).max(2);
    // overlaps far below the on-resonance size Σ A_i are converged in absolute terms
    let floor = 1e-6 * config.pulses.iter().map(|p| p.amplitude).sum::<f64>();
    let mut coarse = trapezoid(config, model, config.t_start, t, steps);
    let mut change = f64::INFINITY;
    for _ in 0..MAX_REFINEMENTS {
        steps *= 2;
        let fine = trapezoid(config, model, config.t_start, t, steps);
        let scale = fine.0.norm().max(fine.1.norm()).max(floor);
        let diff = (fine.0 - coarse.0).norm().max((fine.1 - coarse.1).norm());
        change = if scale > 0.0 { diff / scale } else { diff };
        if change <= QUADRATURE_TOLERANCE {
            let (mu1, mu2) = (model.mu10(), model.mu21());
            return Ok(ThetaPair::new(mu1 * fine.0, mu2 * fine.1).at(t));
        }
        coarse = fine;
    }
    Err(Error::QuadratureNotConverged {
        steps,
        relative_change: change,
    })
}

/// θ₁(t_f), θ₂(t_f) through the spectral identity `θ_k* = μ_k E(ω_k)`.
pub fn theta_from_spectrum(config: &FieldConfig, model: &RotorModel) -> ThetaPair {
    let e1 = fourier_transform(config, model.omega01());
    let e2 = fourier_transform(config, model.omega12());
    ThetaPair::new((model.mu10() * e1).conj(), (model.mu21() * e2).conj()).at(config.t_end)
}

/// Two-pulse design whose overlaps at the ladder transitions have the target
/// magnitudes `|θ₁|`, `|θ₂|`.
///
/// The first pulse is centered at `t = 0` with carrier `ω01 + detuning`, the second
/// at `delay` with twice that carrier. Both share `bandwidth` (absolute units).
pub fn pulses_from_targets(
    targets: &ThetaPair,
    model: &RotorModel,
    detuning: f64,
    bandwidth: f64,
    delay: f64,
    phase1: f64,
    phase2: f64,
) -> Result<FieldConfig> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(invalid("bandwidth", format!("must be > 0, got {bandwidth}")));
    }
    if !(detuning.is_finite() && detuning.abs() < model.omega01()) {
        return Err(invalid("detuning", format!("|{detuning}| must stay below ω01 = {}", model.omega01())));
    }
    let (m1, m2) = (targets.theta1.norm(), targets.theta2.norm());
    if !(m1.is_finite() && m2.is_finite()) {
        return Err(invalid("targets", "overlap targets must be finite"));
    }
    let carrier = model.omega01() + detuning;
    let first = PulseSpec::new(m1 / model.mu10(), carrier, bandwidth, phase1, 0.0)?;
    let second = PulseSpec::new(m2 / model.mu21(), 2.0 * carrier, bandwidth, phase2, delay)?;
    let mut config = FieldConfig::new([first, second], DEFAULT_N_SIGMA)?;
    config.overlap_warning = config.spectral_overlap(model) > OVERLAP_THRESHOLD;
    Ok(config)
}
