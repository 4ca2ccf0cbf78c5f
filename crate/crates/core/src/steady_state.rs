//! Rate-equation models over the lowest four levels and their stationary
//! populations.
//!
//! Three models nest inside each other:
//!
//! * first diamond: levels 0,1,2 with W₀₂, W₁₂, Γ₁₀, Γ₂₀;
//! * second diamond: levels 0..3 with W₀₃, W₁₂, Γ₁₀, Γ₂₀, Γ₃₂;
//! * combined: every channel plus thermal excitation Γ₀₂.
//!
//! LZ rates are symmetric (Wᵢⱼ = Wⱼᵢ); relaxation is one-way.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    FirstDiamond,
    SecondDiamond,
    Combined,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::FirstDiamond, Model::SecondDiamond, Model::Combined];

    pub fn name(self) -> &'static str {
        match self {
            Model::FirstDiamond => "first_diamond",
            Model::SecondDiamond => "second_diamond",
            Model::Combined => "combined",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown model `{s}` (first_diamond, second_diamond, combined)"))
    }
}

/// Occupations p₀..p₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationVector(pub [f64; 4]);

impl PopulationVector {
    pub const GROUND: PopulationVector = PopulationVector([1.0, 0.0, 0.0, 0.0]);

    pub fn p(&self) -> &[f64; 4] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// p₂ + p₃.
    pub fn left_well(&self) -> f64 {
        self.0[2] + self.0[3]
    }

    pub fn max_abs_diff(&self, other: &PopulationVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Accepts a vector summing to 1 within 1e-9 with entries ≥ −1e-12.
    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|&p| !(p >= -1e-12)) {
            return Err(Error::invalid(
                "population",
                format!("{:?} has a negative entry", self.0),
            ));
        }
        if (self.total() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "population",
                format!("{:?} does not sum to 1", self.0),
            ));
        }
        Ok(())
    }

    fn clipped(mut self) -> Self {
        for p in self.0.iter_mut() {
            if *p < 0.0 && *p >= -1e-12 {
                *p = 0.0;
            }
        }
        self
    }
}

/// Every rate entering the combined model, GHz.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransitionRates {
    pub w02: f64,
    pub w12: f64,
    pub w03: f64,
    pub w13: f64,
    pub g10: f64,
    pub g20: f64,
    pub g32: f64,
    pub g02: f64,
}

impl TransitionRates {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("w02", self.w02),
            ("w12", self.w12),
            ("w03", self.w03),
            ("w13", self.w13),
            ("g10", self.g10),
            ("g20", self.g20),
            ("g32", self.g32),
            ("g02", self.g02),
        ];
        for (name, v) in all {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(
                    name,
                    format!("rate {v} must be finite and ≥ 0"),
                ));
            }
        }
        Ok(())
    }
}

/// Markov generator `G` over up to four levels: `dp/dt = G·p`.
///
/// `G[to][from]` holds the rate from `from` to `to`; each column sums to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateMatrix {
    dim: usize,
    g: [[f64; 4]; 4],
}

impl RateMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=4).contains(&dim), "generator dimension {dim}");
        RateMatrix {
            dim,
            g: [[0.0; 4]; 4],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, to: usize, from: usize) -> f64 {
        self.g[to][from]
    }

    pub fn add_transition(&mut self, from: usize, to: usize, rate: f64) {
        assert!(from < self.dim && to < self.dim && from != to);
        self.g[to][from] += rate;
        self.g[from][from] -= rate;
    }

    /// Adds `rate` in both directions between `a` and `b`.
    pub fn add_exchange(&mut self, a: usize, b: usize, rate: f64) {
        self.add_transition(a, b, rate);
        self.add_transition(b, a, rate);
    }

    pub fn from_rows(dim: usize, rows: [[f64; 4]; 4]) -> Self {
        let mut m = RateMatrix::zeros(dim);
        m.g = rows;
        m
    }

    pub fn rows(&self) -> [[f64; 4]; 4] {
        self.g
    }

    /// Largest total outflow rate of any level.
    pub fn max_outflow(&self) -> f64 {
        (0..self.dim).map(|j| -self.g[j][j]).fold(0.0, f64::max)
    }

    pub fn max_rate(&self) -> f64 {
        self.g[..self.dim]
            .iter()
            .flat_map(|row| row[..self.dim].iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Smallest nonzero off-diagonal rate.
    pub fn min_nonzero_rate(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for to in 0..self.dim {
            for from in 0..self.dim {
                let r = self.g[to][from];
                if to != from && r > 0.0 {
                    best = Some(best.map_or(r, |b| b.min(r)));
                }
            }
        }
        best
    }

    /// Largest absolute column sum; zero for an exact generator.
    pub fn column_sum_defect(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.g[i][j]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, p: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = (0..self.dim).map(|j| self.g[i][j] * p[j]).sum();
        }
        out
    }

    /// ∞-norm of `G·p`.
    pub fn residual(&self, p: &PopulationVector) -> f64 {
        self.apply(&p.0).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn first_diamond(w02: f64, w12: f64, g10: f64, g20: f64) -> Self {
        let mut m = RateMatrix::zeros(3);
        m.add_exchange(0, 2, w02);
        m.add_exchange(1, 2, w12);
        m.add_transition(1, 0, g10);
        m.add_transition(2, 0, g20);
        m
    }

    pub fn second_diamond(w03: f64, w12: f64, g10: f64, g20: f64, g32: f64) -> Self {
        let mut m = RateMatrix::zeros(4);
        m.add_exchange(0, 3, w03);
        m.add_exchange(1, 2, w12);
        m.add_transition(1, 0, g10);
        m.add_transition(2, 0, g20);
        m.add_transition(3, 2, g32);
        m
    }

    pub fn combined(r: &TransitionRates) -> Self {
        let mut m = RateMatrix::zeros(4);
        m.add_exchange(0, 2, r.w02);
        m.add_exchange(0, 3, r.w03);
        m.add_exchange(1, 2, r.w12);
        m.add_exchange(1, 3, r.w13);
        m.add_transition(0, 2, r.g02);
        m.add_transition(1, 0, r.g10);
        m.add_transition(2, 0, r.g20);
        m.add_transition(3, 2, r.g32);
        m
    }

    pub fn for_model(model: Model, r: &TransitionRates) -> Self {
        match model {
            Model::FirstDiamond => RateMatrix::first_diamond(r.w02, r.w12, r.g10, r.g20),
            Model::SecondDiamond => RateMatrix::second_diamond(r.w03, r.w12, r.g10, r.g20, r.g32),
            Model::Combined => RateMatrix::combined(r),
        }
    }
}

/// Stationary state of `G`: solves `G·p = 0` with the last balance equation
/// replaced by `Σp = 1`, by Gaussian elimination with partial pivoting.
pub fn stationary_solve(generator: &RateMatrix) -> Result<PopulationVector> {
    let n = generator.dim;
    let scale = generator.max_rate();
    if scale == 0.0 {
        return Err(Error::DegenerateSystem(
            "all rates vanish; every state is stationary".into(),
        ));
    }
    let mut a = [[0.0f64; 5]; 4];
    for (i, row) in a.iter_mut().enumerate().take(n - 1) {
        for (j, v) in row.iter_mut().enumerate().take(n) {
            *v = generator.g[i][j] / scale;
        }
    }
    for v in a[n - 1].iter_mut().take(n) {
        *v = 1.0;
    }
    a[n - 1][4] = 1.0;

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()).then(y.cmp(&x)))
            .expect("non-empty range");
        if a[pivot_row][col].abs() <= 1e-15 {
            return Err(Error::DegenerateSystem(format!(
                "stationary state not unique (rank deficient at column {col})"
            )));
        }
        a.swap(col, pivot_row);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                // Columns n..4 are zero padding except the right-hand side.
                let pivot = a[col];
                for (x, p) in a[r][col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let mut p = [0.0; 4];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r][c] * p[c]).sum();
        p[r] = (a[r][4] - tail) / a[r][r];
    }
    Ok(PopulationVector(p).clipped())
}

/// Exact stationary p₂ of the first-diamond model:
///
/// ```text
/// p₂ = W₀₂(W₁₂+Γ₁₀) / (Γ₁₀Γ₂₀ + 2Γ₁₀W₀₂ + Γ₁₀W₁₂ + Γ₂₀W₁₂ + 3W₀₂W₁₂)
/// ```
pub fn first_diamond_closed_form(w02: f64, w12: f64, g10: f64, g20: f64) -> Result<f64> {
    check_rates(&[w02, w12, g10, g20])?;
    let den = g10 * g20 + 2.0 * g10 * w02 + g10 * w12 + g20 * w12 + 3.0 * w02 * w12;
    if den <= 0.0 {
        return Err(Error::DegenerateSystem(
            "first-diamond denominator vanishes".into(),
        ));
    }
    Ok(w02 * (w12 + g10) / den)
}

/// The first-diamond closed form as it is usually quoted,
/// `W₀₂(W₁₂+Γ₁₀) / [W₁₂(2W₁₂+W₀₂+Γ₂₀) + Γ₁₀(2W₀₂+W₁₂+Γ₂₀)]`.
///
/// It differs from the exact solution by `2W₁₂(W₁₂ − W₀₂)` in the
/// denominator, which is negligible while Γ₁₀ ≫ W₁₂. Kept for comparison.
pub fn first_diamond_printed_form(w02: f64, w12: f64, g10: f64, g20: f64) -> Result<f64> {
    check_rates(&[w02, w12, g10, g20])?;
    let den = w12 * (2.0 * w12 + w02 + g20) + g10 * (2.0 * w02 + w12 + g20);
    if den <= 0.0 {
        return Err(Error::DegenerateSystem(
            "first-diamond denominator vanishes".into(),
        ));
    }
    Ok(w02 * (w12 + g10) / den)
}

pub fn first_diamond_solve(w02: f64, w12: f64, g10: f64, g20: f64) -> Result<PopulationVector> {
    check_rates(&[w02, w12, g10, g20])?;
    stationary_solve(&RateMatrix::first_diamond(w02, w12, g10, g20))
}

pub fn second_diamond_solve(
    w03: f64,
    w12: f64,
    g10: f64,
    g20: f64,
    g32: f64,
) -> Result<PopulationVector> {
    check_rates(&[w03, w12, g10, g20, g32])?;
    stationary_solve(&RateMatrix::second_diamond(w03, w12, g10, g20, g32))
}

/// `p_L ≈ W₀₃/(W₀₃+W₁₂+Γ₂₀)`, valid when Γ₁₀, Γ₃₂ ≫ W₀₃, W₁₂.
pub fn second_diamond_approx(w03: f64, w12: f64, g20: f64) -> Result<f64> {
    check_rates(&[w03, w12, g20])?;
    let den = w03 + w12 + g20;
    if den <= 0.0 {
        return Err(Error::DegenerateSystem(
            "second-diamond denominator vanishes".into(),
        ));
    }
    Ok(w03 / den)
}

pub fn combined_solve(rates: &TransitionRates) -> Result<PopulationVector> {
    rates.validate()?;
    stationary_solve(&RateMatrix::combined(rates))
}

pub fn solve_model(model: Model, rates: &TransitionRates) -> Result<PopulationVector> {
    rates.validate()?;
    stationary_solve(&RateMatrix::for_model(model, rates))
}

fn check_rates(rates: &[f64]) -> Result<()> {
    if rates.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(Error::invalid(
            "rate",
            format!("{rates:?} must be finite and ≥ 0"),
        ));
    }
    if rates.iter().all(|&r| r == 0.0) {
        return Err(Error::DegenerateSystem("all rates are zero".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// W₀₂ off: nothing reaches the left well.
    Closed,
    /// W₀₂ on, W₁₂ off: an effective two-level system.
    TwoLevel,
    /// Both on: population is pumped back through |1⟩.
    PumpedBack,
}

/// A channel counts as on once its rate reaches `on_threshold` (conventionally Γ₂₀).
pub fn classify_regime(w02: f64, w12: f64, on_threshold: f64) -> Regime {
    match (w02 >= on_threshold, w12 >= on_threshold) {
        (false, _) => Regime::Closed,
        (true, false) => Regime::TwoLevel,
        (true, true) => Regime::PumpedBack,
    }
}
