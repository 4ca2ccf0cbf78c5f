//! Population maps over (static flux detuning, drive amplitude) grids.

use log::{debug, warn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lz_rates::{PhotonWeights, MAX_ARG};
use crate::qubit::{DriveSpec, QubitSpec, CROSSING_PAIRS};
use crate::steady_state::{solve_model, Model, PopulationVector, TransitionRates};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dphi_min: f64,
    pub dphi_max: f64,
    pub dphi_steps: usize,
    pub phi_rf_min: f64,
    pub phi_rf_max: f64,
    pub phi_rf_steps: usize,
}

impl GridSpec {
    pub fn new(
        (dphi_min, dphi_max, dphi_steps): (f64, f64, usize),
        (phi_rf_min, phi_rf_max, phi_rf_steps): (f64, f64, usize),
    ) -> Result<Self> {
        let g = GridSpec {
            dphi_min,
            dphi_max,
            dphi_steps,
            phi_rf_min,
            phi_rf_max,
            phi_rf_steps,
        };
        g.validate()?;
        Ok(g)
    }

    /// Default extents: [0,10]×[0,12] mΦ₀ for the first diamond, [0,10]×[0,25]
    /// otherwise, 401×401 nodes.
    pub fn default_for(model: Model) -> Self {
        let phi_rf_max = match model {
            Model::FirstDiamond => 12.0,
            Model::SecondDiamond | Model::Combined => 25.0,
        };
        GridSpec {
            dphi_min: 0.0,
            dphi_max: 10.0,
            dphi_steps: 401,
            phi_rf_min: 0.0,
            phi_rf_max,
            phi_rf_steps: 401,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dphi_steps < 2 {
            return Err(Error::invalid("grid.dphi_steps", "need at least 2 nodes"));
        }
        if self.phi_rf_steps < 2 {
            return Err(Error::invalid("grid.phi_rf_steps", "need at least 2 nodes"));
        }
        if !(self.dphi_max > self.dphi_min)
            || !self.dphi_min.is_finite()
            || !self.dphi_max.is_finite()
        {
            return Err(Error::invalid("grid.dphi_max", "must exceed grid.dphi_min"));
        }
        if !(self.phi_rf_max > self.phi_rf_min)
            || !self.phi_rf_min.is_finite()
            || !self.phi_rf_max.is_finite()
        {
            return Err(Error::invalid(
                "grid.phi_rf_max",
                "must exceed grid.phi_rf_min",
            ));
        }
        if self.phi_rf_min < 0.0 {
            return Err(Error::invalid(
                "grid.phi_rf_min",
                "drive amplitude must be ≥ 0",
            ));
        }
        Ok(())
    }

    pub fn dphi_step(&self) -> f64 {
        (self.dphi_max - self.dphi_min) / (self.dphi_steps - 1) as f64
    }

    pub fn phi_rf_step(&self) -> f64 {
        (self.phi_rf_max - self.phi_rf_min) / (self.phi_rf_steps - 1) as f64
    }

    pub fn dphi(&self, ix: usize) -> f64 {
        if ix + 1 == self.dphi_steps {
            self.dphi_max
        } else {
            self.dphi_min + ix as f64 * self.dphi_step()
        }
    }

    pub fn phi_rf(&self, iy: usize) -> f64 {
        if iy + 1 == self.phi_rf_steps {
            self.phi_rf_max
        } else {
            self.phi_rf_min + iy as f64 * self.phi_rf_step()
        }
    }

    pub fn len(&self) -> usize {
        self.dphi_steps * self.phi_rf_steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Left-well population over a grid.
///
/// `values` is row-major with one row per drive amplitude:
/// `values[iy * dphi_steps + ix]` sits at (`dphi(ix)`, `phi_rf(iy)`).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub spec: GridSpec,
    pub model: Model,
    pub qubit: QubitSpec,
    pub omega: f64,
    pub gamma2: f64,
    pub values: Vec<f64>,
    /// Nodes where the solver was degenerate and the ground state was used.
    pub fallbacks: usize,
}

impl SweepGrid {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.spec.dphi_steps + ix]
    }

    pub fn row(&self, iy: usize) -> &[f64] {
        let n = self.spec.dphi_steps;
        &self.values[iy * n..(iy + 1) * n]
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Bessel tables for every crossing at one drive amplitude.
struct RowWeights {
    omega: f64,
    gamma2: f64,
    phi_rf: f64,
    weights: [PhotonWeights; 4],
}

impl RowWeights {
    fn new(qubit: &QubitSpec, omega: f64, gamma2: f64, phi_rf: f64) -> Result<Self> {
        let mut weights = Vec::with_capacity(4);
        for (i, j) in CROSSING_PAIRS {
            let amplitude = qubit.combined_slope(i, j)? * phi_rf;
            if amplitude / omega > MAX_ARG {
                return Err(Error::Domain(format!(
                    "drive amplitude {phi_rf} mΦ₀ gives Bessel argument {} > {MAX_ARG} on crossing ({i},{j})",
                    amplitude / omega
                )));
            }
            weights.push(PhotonWeights::new(amplitude, omega));
        }
        Ok(RowWeights {
            omega,
            gamma2,
            phi_rf,
            weights: weights.try_into().expect("four crossings"),
        })
    }

    fn rates(&self, qubit: &QubitSpec, dphi_dc: f64) -> Result<TransitionRates> {
        let drive = DriveSpec::new(self.omega, self.phi_rf, dphi_dc, self.gamma2)?;
        let mut w = [0.0; 4];
        for (k, (i, j)) in CROSSING_PAIRS.into_iter().enumerate() {
            let ch = qubit.channel(&drive, i, j)?;
            w[k] = self.weights[k].rate(ch.crossing.gap, ch.epsilon, self.gamma2);
        }
        let relax = qubit.relaxation();
        Ok(TransitionRates {
            w02: w[0],
            w12: w[1],
            w03: w[2],
            w13: w[3],
            g10: relax.gamma10,
            g20: relax.gamma20,
            g32: relax.gamma32,
            g02: qubit.thermal_rate(dphi_dc)?,
        })
    }
}

/// All rates at one drive point. Γ₀₂ is always filled in; models that do not
/// use it ignore it.
pub fn point_rates(qubit: &QubitSpec, drive: &DriveSpec) -> Result<TransitionRates> {
    RowWeights::new(qubit, drive.omega, drive.gamma2, drive.phi_rf)?.rates(qubit, drive.dphi_dc)
}

/// Rates at every detuning in `dphis` for one drive amplitude, sharing the
/// Bessel tables across the cut.
pub fn cut_rates(
    qubit: &QubitSpec,
    omega: f64,
    gamma2: f64,
    phi_rf: f64,
    dphis: &[f64],
) -> Result<Vec<TransitionRates>> {
    DriveSpec::new(omega, phi_rf, 0.0, gamma2)?;
    let row = RowWeights::new(qubit, omega, gamma2, phi_rf)?;
    dphis.iter().map(|&x| row.rates(qubit, x)).collect()
}

/// p₂ for the first diamond, p₂ + p₃ otherwise.
pub fn left_population(model: Model, p: &PopulationVector) -> f64 {
    match model {
        Model::FirstDiamond => p.0[2],
        Model::SecondDiamond | Model::Combined => p.left_well(),
    }
}

fn solve_point(model: Model, rates: &TransitionRates) -> (f64, bool) {
    match solve_model(model, rates) {
        Ok(p) => (left_population(model, &p).clamp(0.0, 1.0), false),
        Err(e) => {
            debug!("degenerate point ({e}); using the ground state");
            (0.0, true)
        }
    }
}

/// Left-well population at one point: p₂ for the first diamond, p₂+p₃ otherwise.
/// A degenerate rate system falls back to the ground state (p_L = 0).
pub fn evaluate_point(qubit: &QubitSpec, drive: &DriveSpec, model: Model) -> Result<f64> {
    let rates = point_rates(qubit, drive)?;
    let (p, fell_back) = solve_point(model, &rates);
    if fell_back {
        warn!("degenerate rate system at {drive:?}; reporting ground state");
    }
    Ok(p)
}

/// Evaluates every node of `grid`. Rows run in parallel on the current rayon
/// pool and are assembled by position, so the result does not depend on the
/// thread count.
pub fn sweep_grid(
    qubit: &QubitSpec,
    omega: f64,
    gamma2: f64,
    grid: &GridSpec,
    model: Model,
) -> Result<SweepGrid> {
    grid.validate()?;
    DriveSpec::new(omega, grid.phi_rf_min, grid.dphi_min, gamma2)?;
    let rows: Vec<(Vec<f64>, usize)> = (0..grid.phi_rf_steps)
        .into_par_iter()
        .map(|iy| -> Result<(Vec<f64>, usize)> {
            let row = RowWeights::new(qubit, omega, gamma2, grid.phi_rf(iy))?;
            let mut out = Vec::with_capacity(grid.dphi_steps);
            let mut fallbacks = 0;
            for ix in 0..grid.dphi_steps {
                let rates = row.rates(qubit, grid.dphi(ix))?;
                let (p, fell_back) = solve_point(model, &rates);
                fallbacks += fell_back as usize;
                out.push(p);
            }
            Ok((out, fallbacks))
        })
        .collect::<Result<_>>()?;
    let fallbacks = rows.iter().map(|r| r.1).sum();
    if fallbacks > 0 {
        warn!("{fallbacks} degenerate grid nodes reported as ground state");
    }
    Ok(SweepGrid {
        spec: *grid,
        model,
        qubit: qubit.clone(),
        omega,
        gamma2,
        values: rows.into_iter().flat_map(|r| r.0).collect(),
        fallbacks,
    })
}

/// Fringe visibility between the n- and (n+1)-photon resonances of one
/// crossing at fixed drive amplitude: `(W_max − W_min)/(W_max + W_min)` of the
/// rate over ε ∈ [nω, (n+1)ω].
pub fn resonance_contrast(
    qubit: &QubitSpec,
    omega: f64,
    gamma2: f64,
    crossing: (usize, usize),
    phi_rf: f64,
    n: u32,
) -> Result<f64> {
    const SAMPLES: usize = 2000;
    if n < 1 {
        return Err(Error::Domain("resonance index must be ≥ 1".into()));
    }
    DriveSpec::new(omega, phi_rf, 0.0, gamma2)?;
    let (i, j) = crossing;
    let slope = qubit.combined_slope(i, j)?;
    let amplitude = slope * phi_rf;
    let far_edge = (n + 1) as f64 * omega;
    if amplitude < far_edge * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "amplitude {amplitude} GHz does not reach the {}-photon resonance at {far_edge} GHz",
            n + 1
        )));
    }
    if amplitude / omega > MAX_ARG {
        return Err(Error::Domain(format!(
            "Bessel argument {} > {MAX_ARG}",
            amplitude / omega
        )));
    }
    let weights = PhotonWeights::new(amplitude, omega);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 0..=SAMPLES {
        let eps = (n as f64 + k as f64 / SAMPLES as f64) * omega;
        // Δ² cancels in the ratio.
        let w = weights.rate(1.0, eps, gamma2);
        lo = lo.min(w);
        hi = hi.max(w);
    }
    if hi + lo == 0.0 {
        return Ok(0.0);
    }
    Ok((hi - lo) / (hi + lo))
}

/// One sweep per (Γ₂, ω) pair, Γ₂ outer and ω inner.
pub fn study_matrix(
    qubit: &QubitSpec,
    omegas: &[f64],
    gamma2s: &[f64],
    grid: &GridSpec,
    model: Model,
) -> Result<Vec<SweepGrid>> {
    if omegas.is_empty() || gamma2s.is_empty() {
        return Err(Error::invalid("study", "need at least one ω and one Γ₂"));
    }
    let mut out = Vec::with_capacity(omegas.len() * gamma2s.len());
    for &g2 in gamma2s {
        for &w in omegas {
            out.push(sweep_grid(qubit, w, g2, grid, model)?);
        }
    }
    Ok(out)
}
