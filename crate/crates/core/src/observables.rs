//! Field-free orientation `⟨cos θ⟩(t)` of a rotational wave packet, its revival
//! maximum, and population/phase summaries.

use serde::Serialize;

use crate::model::RotorModel;
use crate::propagator::WavePacket;

/// States below this population have their phase reported as zero.
pub const PHASE_POPULATION_FLOOR: f64 = 1e-4;

/// Grid points per revival period scanned before golden-section refinement.
pub const REVIVAL_SCAN_POINTS: usize = 4096;

const REFINE_TOLERANCE: f64 = 1e-8;

/// `⟨cos θ⟩(t) = Σ_J 2M_{J+1,J}|c_J||c_{J+1}| cos(ω_J t − φ_{J,J+1})` for the free packet
/// `Σ c_J e^{−iE_J t}|J⟩`.
pub fn orientation_at(packet: &WavePacket, model: &RotorModel, t: f64) -> f64 {
    let c = packet.coeffs();
    let n = c.len().min(model.dim());
    (0..n.saturating_sub(1))
        .map(|j| {
            let coherence = c[j].conj() * c[j + 1] * num_complex::Complex64::from_polar(1.0, -model.transition_frequency(j) * t);
            2.0 * model.cos_element(j) * coherence.re
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationTrace {
    pub samples: Vec<(f64, f64)>,
    pub max_value: f64,
    pub argmax_time: f64,
}

/// Sample `⟨cos θ⟩` on `n` uniform points over `[t_begin, t_end]`; the maximum is of `|⟨cos θ⟩|`.
pub fn orientation_trace(packet: &WavePacket, model: &RotorModel, t_begin: f64, t_end: f64, n: usize) -> OrientationTrace {
    let n = n.max(2);
    let h = (t_end - t_begin) / (n - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = t_begin + h * i as f64;
            (t, orientation_at(packet, model, t))
        })
        .collect();
    let (argmax_time, max_value) = samples
        .iter()
        .fold((t_begin, 0.0f64), |best, &(t, v)| if v.abs() > best.1 { (t, v.abs()) } else { best });
    OrientationTrace {
        samples,
        max_value,
        argmax_time,
    }
}

/// Maximum of `|⟨cos θ⟩|` over one revival period starting at the packet's reference
/// time, and the time where it occurs.
pub fn max_orientation_over_revival(packet: &WavePacket, model: &RotorModel) -> (f64, f64) {
    let t0 = packet.reference_time();
    let period = model.revival_period();
    let h = period / REVIVAL_SCAN_POINTS as f64;
    let g = |t: f64| orientation_at(packet, model, t).abs();

    let mut best_t = t0;
    let mut best = g(t0);
    for i in 1..REVIVAL_SCAN_POINTS {
        let t = t0 + h * i as f64;
        let v = g(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    if best == 0.0 {
        return (0.0, t0);
    }

    // golden-section search on the bracket around the best grid point
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_t - h, best_t + h);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    while b - a > REFINE_TOLERANCE {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = g(x2);
        }
    }
    let t_star = 0.5 * (a + b);
    let refined = g(t_star);
    if refined >= best {
        // keep t* inside the scanned period
        let t_star = t0 + (t_star - t0).rem_euclid(period);
        (refined, t_star)
    } else {
        (best, best_t)
    }
}

/// Populations and phases per state, phases of near-empty states set to zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationPhaseReport {
    pub populations: Vec<f64>,
    pub phases: Vec<f64>,
}

pub fn population_phase_report(packet: &WavePacket) -> PopulationPhaseReport {
    let populations = packet.populations();
    let phases = packet
        .coeffs()
        .iter()
        .zip(&populations)
        .map(|(c, &p)| if p < PHASE_POPULATION_FLOOR { 0.0 } else { c.arg() })
        .collect();
    PopulationPhaseReport { populations, phases }
}
