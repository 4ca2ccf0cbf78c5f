//! Static four-level geometry of the flux qubit and the flux → energy mapping.
//!
//! Levels |0⟩,|1⟩ sit in the right well (negative diabatic slope), |2⟩,|3⟩ in
//! the left well (positive slope). Each level is a straight line
//! `E_i(Φ) = slope_i·Φ + intercept_i` in GHz over flux detuning Φ in mΦ₀.

use crate::error::{Error, Result};

/// Boltzmann constant over Planck constant, GHz per kelvin.
pub const BOLTZMANN_GHZ_PER_KELVIN: f64 = 20.8366;

/// The four crossings between a right-well and a left-well level.
pub const CROSSING_PAIRS: [(usize, usize); 4] = [(0, 2), (1, 2), (0, 3), (1, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Well {
    Right,
    Left,
}

impl Well {
    pub fn of_level(index: usize) -> Well {
        if index < 2 {
            Well::Right
        } else {
            Well::Left
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiabaticLevel {
    index: usize,
    slope: f64,
    intercept: f64,
    well: Well,
}

impl DiabaticLevel {
    pub fn new(index: usize, slope: f64, intercept: f64) -> Result<Self> {
        if index > 3 {
            return Err(Error::Domain(format!("level index {index} > 3")));
        }
        if !slope.is_finite() || !intercept.is_finite() {
            return Err(Error::invalid(
                "slope",
                format!("level {index} is not finite"),
            ));
        }
        let well = Well::of_level(index);
        let ok = match well {
            Well::Right => slope < 0.0,
            Well::Left => slope > 0.0,
        };
        if !ok {
            return Err(Error::invalid(
                "slope",
                format!("level {index} slope {slope} has the wrong sign for the {well:?} well"),
            ));
        }
        Ok(DiabaticLevel {
            index,
            slope,
            intercept,
            well,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn well(&self) -> Well {
        self.well
    }

    pub fn energy(&self, dphi: f64) -> f64 {
        self.slope * dphi + self.intercept
    }
}

/// Flux detuning at which diabatic levels `i` and `j` are degenerate.
pub fn crossing_location(levels: &[DiabaticLevel; 4], i: usize, j: usize) -> Result<f64> {
    if i > 3 || j > 3 {
        return Err(Error::Domain(format!("level pair ({i},{j})")));
    }
    let (a, b) = (&levels[i], &levels[j]);
    let dslope = a.slope - b.slope;
    if dslope == 0.0 {
        return Err(Error::DegenerateGeometry {
            i,
            j,
            slope: a.slope,
        });
    }
    Ok((b.intercept - a.intercept) / dslope)
}

/// Builds the four levels from signed slopes and the locations of the Δ₀₂ and
/// Δ₁₂ crossings, using the mirror-symmetric double well: level 0 is the
/// energy reference (intercept 0) and the left-well excitation energy equals
/// the right-well one, `e3 − e2 = e1 − e0`.
pub fn levels_from_locations(
    slopes: [f64; 4],
    loc02: f64,
    loc12: f64,
) -> Result<[DiabaticLevel; 4]> {
    let [m0, m1, m2, _] = slopes;
    let e0 = 0.0;
    let e2 = e0 + (m0 - m2) * loc02;
    let e1 = e2 + (m2 - m1) * loc12;
    let e3 = e2 + (e1 - e0);
    levels_from_intercepts(slopes, [e0, e1, e2, e3])
}

pub fn levels_from_intercepts(
    slopes: [f64; 4],
    intercepts: [f64; 4],
) -> Result<[DiabaticLevel; 4]> {
    Ok([
        DiabaticLevel::new(0, slopes[0], intercepts[0])?,
        DiabaticLevel::new(1, slopes[1], intercepts[1])?,
        DiabaticLevel::new(2, slopes[2], intercepts[2])?,
        DiabaticLevel::new(3, slopes[3], intercepts[3])?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingSpec {
    pub i: usize,
    pub j: usize,
    /// Avoided-crossing gap Δᵢⱼ, GHz.
    pub gap: f64,
}

impl CrossingSpec {
    pub fn new(i: usize, j: usize, gap: f64) -> Result<Self> {
        if !(i < 2 && (2..4).contains(&j)) {
            return Err(Error::Domain(format!(
                "crossing ({i},{j}) must join a right-well and a left-well level"
            )));
        }
        if !(gap >= 0.0 && gap.is_finite()) {
            return Err(Error::invalid(
                "gap",
                format!("Δ{i}{j} = {gap} must be ≥ 0"),
            ));
        }
        Ok(CrossingSpec { i, j, gap })
    }
}

/// Avoided-crossing gaps Δ₀₂, Δ₁₂, Δ₀₃, Δ₁₃ in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaps {
    pub d02: f64,
    pub d12: f64,
    pub d03: f64,
    pub d13: f64,
}

/// Relaxation rates in GHz and bath temperature in kelvin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    /// Intra-well, right well (|1⟩ → |0⟩).
    pub gamma10: f64,
    /// Inter-well (|2⟩ → |0⟩).
    pub gamma20: f64,
    /// Intra-well, left well (|3⟩ → |2⟩).
    pub gamma32: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitSpec {
    levels: [DiabaticLevel; 4],
    crossings: [CrossingSpec; 4],
    relaxation: Relaxation,
}

impl QubitSpec {
    pub fn new(levels: [DiabaticLevel; 4], gaps: Gaps, relaxation: Relaxation) -> Result<Self> {
        for (k, level) in levels.iter().enumerate() {
            if level.index != k {
                return Err(Error::Domain(format!(
                    "level slot {k} holds level {}",
                    level.index
                )));
            }
        }
        let Relaxation {
            gamma10,
            gamma20,
            gamma32,
            temperature,
        } = relaxation;
        for (name, v) in [
            ("gamma10", gamma10),
            ("gamma20", gamma20),
            ("gamma32", gamma32),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("{v} must be ≥ 0")));
            }
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::invalid(
                "temperature",
                format!("{temperature} must be > 0"),
            ));
        }
        let crossings = [
            CrossingSpec::new(0, 2, gaps.d02)?,
            CrossingSpec::new(1, 2, gaps.d12)?,
            CrossingSpec::new(0, 3, gaps.d03)?,
            CrossingSpec::new(1, 3, gaps.d13)?,
        ];
        for c in &crossings {
            crossing_location(&levels, c.i, c.j)?;
        }
        Ok(QubitSpec {
            levels,
            crossings,
            relaxation,
        })
    }

    pub fn levels(&self) -> &[DiabaticLevel; 4] {
        &self.levels
    }

    pub fn crossings(&self) -> &[CrossingSpec; 4] {
        &self.crossings
    }

    pub fn relaxation(&self) -> Relaxation {
        self.relaxation
    }

    pub fn gaps(&self) -> Gaps {
        Gaps {
            d02: self.crossings[0].gap,
            d12: self.crossings[1].gap,
            d03: self.crossings[2].gap,
            d13: self.crossings[3].gap,
        }
    }

    /// Copy with one crossing gap replaced.
    pub fn with_gap(&self, i: usize, j: usize, gap: f64) -> Result<Self> {
        let mut out = self.clone();
        let k = self.crossing_slot(i, j)?;
        out.crossings[k] = CrossingSpec::new(i, j, gap)?;
        Ok(out)
    }

    pub fn with_relaxation(&self, relaxation: Relaxation) -> Result<Self> {
        QubitSpec::new(self.levels, self.gaps(), relaxation)
    }

    fn crossing_slot(&self, i: usize, j: usize) -> Result<usize> {
        self.crossings
            .iter()
            .position(|c| c.i == i && c.j == j)
            .ok_or(Error::UnknownCrossing { i, j })
    }

    pub fn crossing(&self, i: usize, j: usize) -> Result<&CrossingSpec> {
        Ok(&self.crossings[self.crossing_slot(i, j)?])
    }

    pub fn location(&self, i: usize, j: usize) -> Result<f64> {
        self.crossing(i, j)?;
        crossing_location(&self.levels, i, j)
    }

    /// `|m_i| + |m_j|`, GHz per mΦ₀.
    pub fn combined_slope(&self, i: usize, j: usize) -> Result<f64> {
        self.crossing(i, j)?;
        Ok(self.levels[i].slope.abs() + self.levels[j].slope.abs())
    }

    pub fn channel(&self, drive: &DriveSpec, i: usize, j: usize) -> Result<CrossingChannel> {
        let crossing = *self.crossing(i, j)?;
        let location = crossing_location(&self.levels, i, j)?;
        let combined_slope = self.levels[i].slope.abs() + self.levels[j].slope.abs();
        Ok(CrossingChannel {
            crossing,
            location,
            combined_slope,
            epsilon: combined_slope * (drive.dphi_dc - location),
            amplitude: combined_slope * drive.phi_rf,
        })
    }

    /// Diabatic energy separation of a crossing's two levels at static flux
    /// `dphi_dc`. The avoided-crossing hybridization is neglected.
    pub fn energy_gap(&self, i: usize, j: usize, dphi_dc: f64) -> Result<f64> {
        let s = self.combined_slope(i, j)?;
        let loc = crossing_location(&self.levels, i, j)?;
        Ok((s * (dphi_dc - loc)).abs())
    }

    /// Thermal excitation Γ₀₂ at static flux `dphi_dc`.
    pub fn thermal_rate(&self, dphi_dc: f64) -> Result<f64> {
        let e02 = self.energy_gap(0, 2, dphi_dc)?;
        Ok(thermal_rate(
            self.relaxation.gamma20,
            e02,
            self.relaxation.temperature,
        ))
    }
}

/// `Γ₀₂ = Γ₂₀·exp(−E₀₂ / k_B T)` with everything in GHz.
pub fn thermal_rate(gamma20: f64, e02: f64, temperature: f64) -> f64 {
    gamma20 * (-e02 / (BOLTZMANN_GHZ_PER_KELVIN * temperature)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Drive frequency ω/2π, GHz.
    pub omega: f64,
    /// Drive amplitude, mΦ₀.
    pub phi_rf: f64,
    /// Static flux detuning, mΦ₀.
    pub dphi_dc: f64,
    /// Dephasing rate Γ₂/2π, GHz.
    pub gamma2: f64,
}

impl DriveSpec {
    pub fn new(omega: f64, phi_rf: f64, dphi_dc: f64, gamma2: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", format!("{omega} must be > 0")));
        }
        if !(phi_rf >= 0.0 && phi_rf.is_finite()) {
            return Err(Error::invalid("phi_rf", format!("{phi_rf} must be ≥ 0")));
        }
        if !dphi_dc.is_finite() {
            return Err(Error::invalid("dphi_dc", "not finite"));
        }
        if !(gamma2 > 0.0 && gamma2.is_finite()) {
            return Err(Error::invalid("gamma2", format!("{gamma2} must be > 0")));
        }
        Ok(DriveSpec {
            omega,
            phi_rf,
            dphi_dc,
            gamma2,
        })
    }
}

/// Per-crossing quantities at one drive point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingChannel {
    pub crossing: CrossingSpec,
    /// mΦ₀.
    pub location: f64,
    /// GHz per mΦ₀.
    pub combined_slope: f64,
    /// Static energy detuning ε_ij, GHz.
    pub epsilon: f64,
    /// Energy drive amplitude A_ij, GHz.
    pub amplitude: f64,
}
