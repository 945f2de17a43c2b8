//! Maximum three-state orientation and the amplitude/phase conditions on θ₁, θ₂
//! that realize it through first-order ladder climbing.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{invalid, Error, Result};
use crate::field::ThetaPair;

/// Coefficients `a_0..a_4` of the amplitude-ratio quartic `Σ a_ℓ s^ℓ = 0`.
pub fn ratio_quartic_coefficients() -> [f64; 5] {
    let odd = -2.0 * SQRT_2 / 3.0;
    [2.0 / 9.0, odd, 17.0 / 18.0, odd, 13.0 / 18.0]
}

/// Dense real polynomial with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut p = Self { coeffs: coeffs.into() };
        p.trim(0.0);
        p
    }

    fn trim(&mut self, tol: f64) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.abs() <= tol) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::new(vec![0.0]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect::<Vec<_>>(),
        )
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Remainder of `self / divisor`; coefficients below `tol` are dropped.
    fn rem(&self, divisor: &Self, tol: f64) -> Self {
        let mut r = self.coeffs.clone();
        let d = &divisor.coeffs;
        let lead = *d.last().unwrap();
        while r.len() >= d.len() && !r.is_empty() {
            let q = r.last().unwrap() / lead;
            let shift = r.len() - d.len();
            for (i, &dc) in d.iter().enumerate() {
                r[shift + i] -= q * dc;
            }
            r.pop();
        }
        let mut out = Self { coeffs: r };
        out.trim(tol);
        for c in out.coeffs.iter_mut() {
            if c.abs() <= tol {
                *c = 0.0;
            }
        }
        out
    }

    /// Sturm chain `p, p′, −rem(p, p′), …`.
    fn sturm_chain(&self) -> Vec<Self> {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let tol = 1e-13 * scale.max(1.0);
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].degree() == 0 {
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1], tol);
            if r.is_zero() {
                break;
            }
            chain.push(Self::new(r.coeffs.iter().map(|c| -c).collect::<Vec<_>>()));
        }
        chain
    }

    fn sign_changes(chain: &[Self], x: f64) -> usize {
        let signs: Vec<f64> = chain.iter().map(|p| p.eval(x)).filter(|v| *v != 0.0).collect();
        signs.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
    }

    /// Number of distinct real roots in `(lo, hi]`.
    pub fn count_roots(&self, lo: f64, hi: f64) -> usize {
        let chain = self.sturm_chain();
        Self::sign_changes(&chain, lo).saturating_sub(Self::sign_changes(&chain, hi))
    }

    /// All distinct real roots in `(lo, hi]`, ascending, isolated by Sturm counts and
    /// polished by safeguarded Newton iteration.
    pub fn real_roots(&self, lo: f64, hi: f64) -> Vec<f64> {
        let chain = self.sturm_chain();
        let count = |a: f64, b: f64| Self::sign_changes(&chain, a).saturating_sub(Self::sign_changes(&chain, b));
        let mut stack = vec![(lo, hi, 0usize)];
        let mut roots = Vec::new();
        while let Some((a, b, depth)) = stack.pop() {
            match count(a, b) {
                0 => {}
                1 => roots.push(self.polish(a, b)),
                _ if depth > 80 => roots.push(self.polish(a, b)),
                _ => {
                    let mid = 0.5 * (a + b);
                    stack.push((mid, b, depth + 1));
                    stack.push((a, mid, depth + 1));
                }
            }
        }
        roots.sort_by(f64::total_cmp);
        roots
    }

    /// Root in a bracket holding exactly one simple root: Newton steps that stay inside
    /// the bracket, bisection otherwise.
    fn polish(&self, mut a: f64, mut b: f64) -> f64 {
        let dp = self.derivative();
        let fb = self.eval(b);
        if fb == 0.0 {
            return b;
        }
        let mut fa = self.eval(a);
        if fa == 0.0 {
            // root sits on the open end; the bracket is (a, b]
            a += (b - a) * 1e-12;
            fa = self.eval(a);
        }
        let mut x = 0.5 * (a + b);
        for _ in 0..200 {
            let fx = self.eval(x);
            if fx == 0.0 {
                return x;
            }
            if fx.signum() == fa.signum() {
                a = x;
                fa = fx;
            } else {
                b = x;
            }
            let d = dp.eval(x);
            let newton = x - fx / d;
            let next = if d != 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                return next;
            }
            x = next;
        }
        x
    }
}

/// Stationary point of the orientation amplitude on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagrangeSolution {
    pub m10: f64,
    pub m21: f64,
    /// Largest multiplier, equal to the maximum revival amplitude f.
    pub lambda_max: f64,
    pub coeff_magnitudes: [f64; 3],
    pub populations: [f64; 3],
}

impl LagrangeSolution {
    /// Revival amplitude `f = 2M₁₀|c₀c₁| + 2M₂₁|c₁c₂|`.
    pub fn objective(&self, mags: [f64; 3]) -> f64 {
        revival_amplitude(self.m10, self.m21, mags)
    }

    /// Residuals of the three stationarity equations at the solution.
    pub fn stationarity_residuals(&self) -> [f64; 3] {
        let [c0, c1, c2] = self.coeff_magnitudes;
        let l = self.lambda_max;
        [
            self.m10 * c1 - l * c0,
            self.m21 * c2 + self.m10 * c0 - l * c1,
            self.m21 * c1 - l * c2,
        ]
    }
}

pub fn revival_amplitude(m10: f64, m21: f64, mags: [f64; 3]) -> f64 {
    2.0 * m10 * mags[0] * mags[1] + 2.0 * m21 * mags[1] * mags[2]
}

/// Maximize `2M₁₀|c₀c₁| + 2M₂₁|c₁c₂|` subject to `Σ|c_J|² = 1`.
///
/// Stationarity gives `λ² = M₁₀² + M₂₁²`, `|c₁|² = 1/2`, `|c₀| = M₁₀/(λ√2)`,
/// `|c₂| = M₂₁/(λ√2)`.
pub fn lagrange_optimum(m10: f64, m21: f64) -> Result<LagrangeSolution> {
    if !(m10.is_finite() && m10 > 0.0) {
        return Err(invalid("m10", format!("must be > 0, got {m10}")));
    }
    if !(m21.is_finite() && m21 >= 0.0) {
        return Err(invalid("m21", format!("must be >= 0, got {m21}")));
    }
    let lambda = m10.hypot(m21);
    let mags = [m10 / (lambda * SQRT_2), 1.0 / SQRT_2, m21 / (lambda * SQRT_2)];
    Ok(LagrangeSolution {
        m10,
        m21,
        lambda_max: lambda,
        coeff_magnitudes: mags,
        populations: mags.map(|c| c * c),
    })
}

/// The two positive real roots `(s₁, s₂)` of the amplitude-ratio quartic, `s₁ > s₂`.
pub fn solve_ratio_quartic() -> Result<(f64, f64)> {
    let poly = Polynomial::new(ratio_quartic_coefficients());
    let roots = poly.real_roots(0.0, 2.0);
    if roots.len() != 2 {
        return Err(Error::Consistency(format!(
            "expected two ratio roots in (0, 2], found {}: {roots:?}",
            roots.len()
        )));
    }
    for &s in &roots {
        let r = poly.eval(s).abs();
        if r >= 1e-12 {
            return Err(Error::Consistency(format!("ratio root {s} has residual {r:.3e}")));
        }
    }
    Ok((roots[1], roots[0]))
}

/// Which root of the ratio quartic a condition uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Branch {
    /// s₁ ≈ 0.9967
    First,
    /// s₂ ≈ 0.3087
    Second,
}

impl TryFrom<u8> for Branch {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Branch::First),
            2 => Ok(Branch::Second),
            _ => Err(invalid("branch", format!("must be 1 or 2, got {v}"))),
        }
    }
}

impl From<Branch> for u8 {
    fn from(b: Branch) -> u8 {
        match b {
            Branch::First => 1,
            Branch::Second => 2,
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Target overlap magnitudes and phase relation for maximal orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalCondition {
    pub branch: Branch,
    /// Winding `j` of the arccos solution.
    pub winding: u32,
    /// Amplitude ratio `s = |θ₂|/|θ₁|` of this branch.
    pub ratio: f64,
    pub theta1_mag: f64,
    pub theta2_mag: f64,
    /// Phase winding `k` in `2 arg θ₁ − arg θ₂ = (k + 1/2)π`.
    pub phase_winding: i32,
}

impl OptimalCondition {
    pub fn phase_target(&self) -> f64 {
        (self.phase_winding as f64 + 0.5) * PI
    }

    /// Overlaps with these magnitudes and `arg θ₁ = arg θ₂ = π/2`, which meets the
    /// phase relation; this is what `φ₁ = φ₂ = −π/2` pulses at zero delay produce.
    pub fn targets(&self) -> ThetaPair {
        ThetaPair::from_polar(self.theta1_mag, FRAC_PI_2, self.theta2_mag, FRAC_PI_2)
    }
}

/// Amplitude condition for `branch` at winding `j`:
/// `|θ₁| = |arccos(1 − √2/(3s) − √2 s/3) + 2jπ| / √(1+s²)`, `|θ₂| = s|θ₁|`.
pub fn condition_amplitudes(branch: Branch, winding: u32) -> Result<OptimalCondition> {
    let (s1, s2) = solve_ratio_quartic()?;
    let s = match branch {
        Branch::First => s1,
        Branch::Second => s2,
    };
    let x = 1.0 - SQRT_2 / (3.0 * s) - SQRT_2 * s / 3.0;
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Consistency(format!("arccos argument {x} out of range for s = {s}")));
    }
    let theta1 = (x.acos() + 2.0 * PI * winding as f64).abs() / (1.0 + s * s).sqrt();
    Ok(OptimalCondition {
        branch,
        winding,
        ratio: s,
        theta1_mag: theta1,
        theta2_mag: s * theta1,
        phase_winding: 0,
    })
}

/// `2 arg θ₁ − arg θ₂`.
pub fn phase_combination(theta: &ThetaPair) -> f64 {
    2.0 * theta.theta1.arg() - theta.theta2.arg()
}

/// Distance in `[0, π/2]` from `2 arg θ₁ − arg θ₂` to the nearest `(k ± 1/2)π`.
pub fn phase_residual(theta: &ThetaPair) -> Result<f64> {
    if theta.theta1.norm() == 0.0 || theta.theta2.norm() == 0.0 {
        return Err(Error::UndefinedPhase("phase residual needs non-zero θ₁ and θ₂"));
    }
    let r = (phase_combination(theta) - FRAC_PI_2).rem_euclid(PI);
    Ok(r.min(PI - r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_basics() {
        let p = Polynomial::new(vec![-2.0, 0.0, 1.0, 0.0]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(3.0), 7.0);
        assert_eq!(p.derivative().coeffs(), &[0.0, 2.0]);
        assert_eq!(p.count_roots(-10.0, 10.0), 2);
        let r = p.real_roots(0.0, 10.0);
        assert_eq!(r.len(), 1);
        assert_abs_diff_eq!(r[0], SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn cubic_with_close_roots() {
        // (x − 0.5)(x − 0.5001)(x + 3)
        let roots = [0.5, 0.5001, -3.0];
        let mut c = vec![1.0];
        for r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            c = next;
        }
        let p = Polynomial::new(c);
        let found = p.real_roots(-5.0, 5.0);
        assert_eq!(found.len(), 3);
        assert_abs_diff_eq!(found[0], -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(found[1], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(found[2], 0.5001, epsilon = 1e-10);
    }

    #[test]
    fn quartic_roots_match_reported_values() {
        let (s1, s2) = solve_ratio_quartic().unwrap();
        assert_abs_diff_eq!(s1, 0.9967, epsilon = 5e-4);
        assert_abs_diff_eq!(s2, 0.3087, epsilon = 5e-4);
        let p = Polynomial::new(ratio_quartic_coefficients());
        assert!(p.eval(s1).abs() < 1e-12);
        assert!(p.eval(s2).abs() < 1e-12);
        // the remaining pair is complex
        assert_eq!(p.count_roots(-1e3, 1e3), 2);
    }

    #[test]
    fn lagrange_reference_values() {
        let sol = lagrange_optimum((1.0f64 / 3.0).sqrt(), (4.0f64 / 15.0).sqrt()).unwrap();
        assert_abs_diff_eq!(sol.lambda_max, 0.7746, epsilon = 1e-4);
        assert_abs_diff_eq!(sol.coeff_magnitudes[0], 10.0f64.sqrt() / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.coeff_magnitudes[1], SQRT_2 / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.coeff_magnitudes[2], SQRT_2 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.populations[0], 0.278, epsilon = 1e-3);
        assert_abs_diff_eq!(sol.populations[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.populations[2], 0.222, epsilon = 1e-3);
        assert_abs_diff_eq!(sol.populations[0] + sol.populations[2], sol.populations[1], epsilon = 1e-12);
        assert_abs_diff_eq!(sol.objective(sol.coeff_magnitudes), sol.lambda_max, epsilon = 1e-12);
        for r in sol.stationarity_residuals() {
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn lagrange_two_level_limit() {
        let sol = lagrange_optimum(0.4, 0.0).unwrap();
        assert_abs_diff_eq!(sol.lambda_max, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(sol.coeff_magnitudes[0], SQRT_2 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sol.coeff_magnitudes[1], SQRT_2 / 2.0, epsilon = 1e-15);
        assert_eq!(sol.coeff_magnitudes[2], 0.0);
        assert!(lagrange_optimum(0.0, 0.3).is_err());
        assert!(lagrange_optimum(0.3, -0.1).is_err());
    }

    #[test]
    fn condition_values() {
        let c1 = condition_amplitudes(Branch::First, 0).unwrap();
        assert_abs_diff_eq!(c1.theta1_mag / PI, 0.3412, epsilon = 1e-3);
        assert_abs_diff_eq!(c1.theta2_mag / PI, 0.3401, epsilon = 1e-3);
        let c2 = condition_amplitudes(Branch::Second, 0).unwrap();
        assert_abs_diff_eq!(c2.theta1_mag / PI, 0.7021, epsilon = 1e-3);
        assert_abs_diff_eq!(c2.theta2_mag / PI, 0.2167, epsilon = 1e-3);
        let w1 = condition_amplitudes(Branch::First, 1).unwrap();
        assert!(w1.theta1_mag > c1.theta1_mag);
        assert_abs_diff_eq!(w1.theta2_mag, w1.ratio * w1.theta1_mag, epsilon = 1e-15);
    }

    #[test]
    fn branch_conversions() {
        assert_eq!(Branch::try_from(1).unwrap(), Branch::First);
        assert_eq!(Branch::try_from(2).unwrap(), Branch::Second);
        assert!(Branch::try_from(3).is_err());
        assert_eq!(u8::from(Branch::Second), 2);
    }

    #[test]
    fn phase_residual_cases() {
        let t = ThetaPair::from_polar(1.0, FRAC_PI_2, 1.0, FRAC_PI_2);
        assert_abs_diff_eq!(phase_residual(&t).unwrap(), 0.0, epsilon = 1e-15);
        let t = ThetaPair::from_polar(1.0, 0.0, 1.0, 0.0);
        assert_abs_diff_eq!(phase_residual(&t).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        // φ₁ = φ₂ = 0 with τ₀ = 0.5τ′ gives arg θ₂ = ω12 τ₀ = π/2
        let t = ThetaPair::from_polar(1.0, 0.0, 1.0, 4.0 * (0.5 * PI / 4.0));
        assert_abs_diff_eq!(phase_residual(&t).unwrap(), 0.0, epsilon = 1e-15);
        let t = ThetaPair::from_polar(1.0, 0.3, 1.0, 0.6 - 1.5 * PI);
        assert_abs_diff_eq!(phase_residual(&t).unwrap(), 0.0, epsilon = 1e-14);
        assert!(phase_residual(&ThetaPair::from_polar(0.0, 0.0, 1.0, 0.0)).is_err());
    }
}
