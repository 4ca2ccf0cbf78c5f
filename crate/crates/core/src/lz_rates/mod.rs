//! Dephasing-broadened multiphoton Landau-Zener transition rates.
//!
//! ```text
//! W = (Δ²/2) · Σ_n  Γ₂·J_n(A/ω)² / ((ε − nω)² + Γ₂²)
//! ```
//!
//! Every quantity is in ordinary-frequency GHz, so any global 2π from an
//! angular-frequency derivation is absorbed into the overall rate scale.
//! Ratios of rates and the resonance positions ε = nω are unaffected.

mod bessel;

pub use bessel::{bessel_j, bessel_j_table, MAX_ARG, MAX_ORDER};

use crate::error::{Error, Result};

/// Number of photon orders kept on each side of n = 0 for Bessel argument `x`.
///
/// `J_n(x)` decays super-exponentially once `n` exceeds `x` by a few `x^(1/3)`,
/// so the retained sum is exact to well below 1e-12 relative.
pub fn truncation_order(x: f64) -> usize {
    (x + 10.0 * x.cbrt() + 20.0).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    /// Avoided-crossing gap Δ, GHz.
    pub gap: f64,
    /// Static energy detuning ε, GHz (signed).
    pub epsilon: f64,
    /// Energy drive amplitude A, GHz.
    pub amplitude: f64,
    pub omega: f64,
    pub gamma2: f64,
}

impl RateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) {
            return Err(Error::invalid(
                "omega",
                format!("{} must be > 0", self.omega),
            ));
        }
        if !(self.gamma2 > 0.0) {
            return Err(Error::invalid(
                "gamma2",
                format!("{} must be > 0", self.gamma2),
            ));
        }
        if !(self.amplitude >= 0.0) {
            return Err(Error::invalid(
                "amplitude",
                format!("{} must be ≥ 0", self.amplitude),
            ));
        }
        if !(self.gap >= 0.0) {
            return Err(Error::invalid("gap", format!("{} must be ≥ 0", self.gap)));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "not finite"));
        }
        if self.amplitude / self.omega > MAX_ARG {
            return Err(Error::Domain(format!(
                "Bessel argument A/ω = {} exceeds {MAX_ARG}",
                self.amplitude / self.omega
            )));
        }
        Ok(())
    }
}

/// Squared Bessel weights `J_n(A/ω)²`, n = 0..N, for one drive amplitude.
///
/// A sweep row shares one amplitude across every detuning, so the table is
/// built once per row and reused.
#[derive(Debug, Clone)]
pub struct PhotonWeights {
    omega: f64,
    squares: Vec<f64>,
}

impl PhotonWeights {
    pub fn new(amplitude: f64, omega: f64) -> Self {
        let x = amplitude / omega;
        Self::with_order(amplitude, omega, truncation_order(x))
    }

    pub fn with_order(amplitude: f64, omega: f64, order: usize) -> Self {
        let x = amplitude / omega;
        let squares = bessel_j_table(order, x)
            .into_iter()
            .map(|j| j * j)
            .collect();
        PhotonWeights { omega, squares }
    }

    pub fn order(&self) -> usize {
        self.squares.len() - 1
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Rate for one crossing; `gap` and `epsilon` in GHz.
    pub fn rate(&self, gap: f64, epsilon: f64, gamma2: f64) -> f64 {
        let g2 = gamma2 * gamma2;
        let lorentz = |d: f64| gamma2 / (d * d + g2);
        // n and −n share J_n², so pair them; summed from the tail inwards.
        let mut sum = 0.0;
        for (n, &w) in self.squares.iter().enumerate().skip(1).rev() {
            let shift = n as f64 * self.omega;
            sum += w * (lorentz(epsilon - shift) + lorentz(epsilon + shift));
        }
        sum += self.squares[0] * lorentz(epsilon);
        0.5 * gap * gap * sum
    }
}

/// Transition rate W for one crossing, GHz.
pub fn lz_rate(params: &RateParams) -> f64 {
    PhotonWeights::new(params.amplitude, params.omega).rate(
        params.gap,
        params.epsilon,
        params.gamma2,
    )
}

/// [`lz_rate`] with an explicit photon cutoff `|n| ≤ order`.
pub fn lz_rate_truncated(params: &RateParams, order: usize) -> f64 {
    PhotonWeights::with_order(params.amplitude, params.omega, order).rate(
        params.gap,
        params.epsilon,
        params.gamma2,
    )
}
