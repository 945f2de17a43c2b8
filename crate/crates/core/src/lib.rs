//! Design and verification of two-pulse terahertz fields that drive a linear rotor
//! from `|J=0, M=0⟩` into the three-state wave packet of maximal field-free
//! orientation, `|⟨cos θ⟩|_max = √(M₁₀² + M₂₁²) ≈ 0.7746`.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: rotor energies, `cos θ` matrix elements and the interaction-picture Hamiltonian.
//! - [`field`]: Gaussian pulse pairs in time and frequency and the overlaps θ₁, θ₂.
//! - [`propagator`]: exact RK4 propagation and free evolution of wave packets.
//! - [`magnus`]: the first-order Magnus packet and exact-versus-analytic comparisons.
//! - [`optimum`]: the Lagrange maximum, the amplitude-ratio quartic and the design conditions.
//! - [`observables`]: orientation traces, revival maxima and population/phase reports.
//! - [`sweep`]: parallel parameter scans over bandwidth, detuning and delay.

pub mod error;
pub mod field;
pub mod magnus;
pub mod model;
pub mod observables;
pub mod optimum;
pub mod propagator;
pub mod sweep;

pub use error::{Error, Result};
pub use field::{
    field_time, fourier_transform, pulses_from_targets, spectral_field, theta_from_spectrum, theta_integrals,
    FieldConfig, PulseSpec, ThetaPair,
};
pub use magnus::{first_order_wavepacket, magnus_vs_exact_report, ComparisonRecord};
pub use model::{cos_matrix_element, interaction_hamiltonian, RotorModel, UnitSystem};
pub use observables::{
    max_orientation_over_revival, orientation_at, orientation_trace, population_phase_report, OrientationTrace,
    PopulationPhaseReport,
};
pub use optimum::{
    condition_amplitudes, lagrange_optimum, phase_residual, solve_ratio_quartic, Branch, LagrangeSolution,
    OptimalCondition,
};
pub use propagator::{free_evolve, propagate_exact, PropagationResult, StepControl, WavePacket};
pub use sweep::{run_sweep, AxisKind, AxisRange, DesignPoint, RecordMode, SweepConfig, SweepMode, SweepRecord, SweepResult, Target};

pub use num_complex::Complex64;
