//! Linear rigid rotor: energies, `cos θ` matrix elements and the interaction-picture
//! coupling to a linearly polarized field.
//!
//! Internal units use ħ = 1. With the default model (B = 1, μ = 1) the two ladder
//! transitions sit at ω01 = 2 and ω12 = 4, the characteristic time is τ′ = π/4 and
//! the field-free revival period is π.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// `⟨J′M|cos θ|JM⟩` for a linear rotor.
///
/// Non-zero only for |J − J′| = 1 and symmetric under exchange of `j` and `j_prime`.
pub fn cos_matrix_element(j: i64, j_prime: i64, m: i64) -> Result<f64> {
    if j < 0 || j_prime < 0 || m.abs() > j.min(j_prime) {
        return Err(Error::QuantumNumbers { j, j_prime, m });
    }
    if (j - j_prime).abs() != 1 {
        return Ok(0.0);
    }
    let lower = j.min(j_prime) as f64;
    let m = m as f64;
    let num = (lower + 1.0).powi(2) - m * m;
    let den = (2.0 * lower + 1.0) * (2.0 * lower + 3.0);
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy, Deserialize)]
struct RawRotorModel {
    #[serde(default = "one")]
    b: f64,
    #[serde(default = "one")]
    mu: f64,
    #[serde(default = "two")]
    j_max: usize,
    #[serde(default)]
    m: i64,
}

fn one() -> f64 {
    1.0
}

fn two() -> usize {
    2
}

impl TryFrom<RawRotorModel> for RotorModel {
    type Error = Error;

    fn try_from(raw: RawRotorModel) -> Result<Self> {
        RotorModel::with_m(raw.b, raw.mu, raw.j_max, raw.m)
    }
}

/// Rigid linear rotor truncated to `J ≤ j_max` at fixed magnetic quantum number `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRotorModel")]
pub struct RotorModel {
    b: f64,
    mu: f64,
    j_max: usize,
    m: i64,
}

impl Default for RotorModel {
    fn default() -> Self {
        Self {
            b: 1.0,
            mu: 1.0,
            j_max: 2,
            m: 0,
        }
    }
}

impl RotorModel {
    pub fn new(b: f64, mu: f64, j_max: usize) -> Result<Self> {
        Self::with_m(b, mu, j_max, 0)
    }

    pub fn with_m(b: f64, mu: f64, j_max: usize, m: i64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(invalid("b", format!("rotational constant must be positive, got {b}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(invalid("mu", format!("dipole moment must be positive, got {mu}")));
        }
        if j_max < 2 {
            return Err(invalid("j_max", format!("basis needs j_max >= 2, got {j_max}")));
        }
        if m.unsigned_abs() as usize > j_max.saturating_sub(1) {
            return Err(invalid("m", format!("|m| = {} leaves no coupled ladder", m.abs())));
        }
        Ok(Self { b, mu, j_max, m })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    /// Number of basis states `J = 0..=j_max`.
    pub fn dim(&self) -> usize {
        self.j_max + 1
    }

    pub fn energy(&self, j: usize) -> f64 {
        let j = j as f64;
        self.b * j * (j + 1.0)
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.energy(j)).collect()
    }

    /// Ladder transition frequency `E_{J+1} − E_J = 2B(J+1)`.
    pub fn transition_frequency(&self, j: usize) -> f64 {
        2.0 * self.b * (j as f64 + 1.0)
    }

    pub fn omega01(&self) -> f64 {
        self.transition_frequency(0)
    }

    pub fn omega12(&self) -> f64 {
        self.transition_frequency(1)
    }

    /// `M_{J+1,J} = ⟨J+1 M|cos θ|J M⟩` for the model's `m`; zero below the ladder start.
    pub fn cos_element(&self, j: usize) -> f64 {
        cos_matrix_element(j as i64, j as i64 + 1, self.m).unwrap_or(0.0)
    }

    /// Dipole coupling `μ_{J+1,J} = μ·M_{J+1,J}`.
    pub fn dipole_coupling(&self, j: usize) -> f64 {
        self.mu * self.cos_element(j)
    }

    pub fn mu10(&self) -> f64 {
        self.dipole_coupling(0)
    }

    pub fn mu21(&self) -> f64 {
        self.dipole_coupling(1)
    }

    /// τ′ = π/(2 ω01); `1/τ′` is the bandwidth unit used for pulse design.
    pub fn tau_prime(&self) -> f64 {
        PI / (2.0 * self.omega01())
    }

    /// Full revival period of the field-free rotor, π/B.
    pub fn revival_period(&self) -> f64 {
        PI / self.b
    }
}

/// Interaction-picture Hamiltonian for a field value `field_value` sampled at time `t`.
///
/// Tridiagonal with zero diagonal; entry `(J, J+1)` is `−μ_{J+1,J} 𝓔 e^{−i ω_{J,J+1} t}`
/// and `(J+1, J)` its conjugate. No rotating-wave approximation is made.
pub fn interaction_hamiltonian(model: &RotorModel, field_value: f64, t: f64) -> DMatrix<C64> {
    let n = model.dim();
    let mut h = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for j in 0..model.j_max() {
        let coupling = -model.dipole_coupling(j) * field_value;
        let phase = C64::from_polar(1.0, -model.transition_frequency(j) * t);
        h[(j, j + 1)] = coupling * phase;
        h[(j + 1, j)] = coupling * phase.conj();
    }
    h
}

/// Physical scales for reporting. Internal results never depend on these.
///
/// The defaults are HCN's spectroscopic constants (B ≈ 44.3 GHz, μ ≈ 2.985 D),
/// taken from standard molecular tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnitSystem {
    /// Rotational constant B in GHz (frequency units, E = h·B).
    pub energy_scale_ghz: f64,
    /// Permanent dipole moment in Debye.
    pub dipole_scale_debye: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self {
            energy_scale_ghz: 44.316,
            dipole_scale_debye: 2.985,
        }
    }
}

const PLANCK: f64 = 6.626_070_15e-34;
const DEBYE: f64 = 3.335_640_95e-30;

impl UnitSystem {
    /// Seconds per internal time unit for the given model: ħ/(internal energy unit).
    fn seconds_per_time_unit(&self, model: &RotorModel) -> f64 {
        // internal energy unit = (h·B_phys)/model.b, ħ = h/2π
        let energy_unit_hz = self.energy_scale_ghz * 1e9 / model.b();
        1.0 / (2.0 * PI * energy_unit_hz)
    }

    pub fn time_to_ps(&self, model: &RotorModel, t: f64) -> f64 {
        t * self.seconds_per_time_unit(model) * 1e12
    }

    pub fn ps_to_time(&self, model: &RotorModel, ps: f64) -> f64 {
        ps * 1e-12 / self.seconds_per_time_unit(model)
    }

    /// Angular frequency in internal units to ordinary frequency in GHz.
    pub fn angular_to_ghz(&self, model: &RotorModel, omega: f64) -> f64 {
        omega / (2.0 * PI * self.seconds_per_time_unit(model)) * 1e-9
    }

    pub fn ghz_to_angular(&self, model: &RotorModel, ghz: f64) -> f64 {
        ghz * 1e9 * 2.0 * PI * self.seconds_per_time_unit(model)
    }

    /// Field strength in internal units to kV/cm.
    pub fn field_to_kv_per_cm(&self, model: &RotorModel, field: f64) -> f64 {
        let energy_unit_j = PLANCK * self.energy_scale_ghz * 1e9 / model.b();
        let dipole_unit_cm = self.dipole_scale_debye * DEBYE / model.mu();
        field * energy_unit_j / dipole_unit_cm * 1e-5
    }
}
