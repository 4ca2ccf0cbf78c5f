//! Time-domain integration of `dp/dt = G·p`, used as an independent check on
//! the stationary solver.
//!
//! Classical fixed-step RK4. Because the system is linear, one step is the
//! matrix `S = I + hG + (hG)²/2 + (hG)³/6 + (hG)⁴/24`; [`converge`] advances
//! by repeated squaring of `S`, which is the same integration over 2ᵏ steps.

use crate::error::{Error, Result};
use crate::steady_state::{PopulationVector, RateMatrix};

/// `dt · max_outflow` may not exceed this.
pub const STABILITY_FACTOR: f64 = 0.1;
/// Hard cap on integration steps.
pub const MAX_STEPS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// ns
    pub times: Vec<f64>,
    pub states: Vec<PopulationVector>,
}

impl Trajectory {
    pub fn last(&self) -> &PopulationVector {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

/// Largest stable step for `generator`, ns.
pub fn max_step(generator: &RateMatrix) -> f64 {
    let out = generator.max_outflow();
    if out > 0.0 {
        STABILITY_FACTOR / out
    } else {
        f64::INFINITY
    }
}

fn rk4_step(g: &RateMatrix, p: &[f64; 4], h: f64) -> [f64; 4] {
    let axpy = |a: &[f64; 4], s: f64, b: &[f64; 4]| {
        let mut o = *a;
        for k in 0..4 {
            o[k] += s * b[k];
        }
        o
    };
    let k1 = g.apply(p);
    let k2 = g.apply(&axpy(p, 0.5 * h, &k1));
    let k3 = g.apply(&axpy(p, 0.5 * h, &k2));
    let k4 = g.apply(&axpy(p, h, &k3));
    let mut out = *p;
    for k in 0..4 {
        out[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    out
}

/// Integrates from `p_init` to `t_max`, recording every step. The final step
/// is shortened so the trajectory ends exactly at `t_max`.
pub fn integrate(
    generator: &RateMatrix,
    p_init: &PopulationVector,
    dt: f64,
    t_max: f64,
) -> Result<Trajectory> {
    p_init.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("{dt} must be > 0")));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::invalid("t_max", format!("{t_max} must be ≥ 0")));
    }
    let limit = max_step(generator);
    if dt > limit {
        return Err(Error::StepSize { dt, limit });
    }
    let steps = (t_max / dt).ceil();
    if steps > MAX_STEPS as f64 {
        return Err(Error::Domain(format!(
            "{steps} steps requested, cap is {MAX_STEPS}"
        )));
    }
    let steps = steps as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut p = p_init.0;
    times.push(0.0);
    states.push(*p_init);
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * dt;
        let t = if k == steps { t_max } else { k as f64 * dt };
        p = rk4_step(generator, &p, t - t_prev);
        times.push(t);
        states.push(PopulationVector(p));
    }
    Ok(Trajectory { times, states })
}

type Mat = [[f64; 4]; 4];

fn mat_mul(a: &Mat, b: &Mat, n: usize) -> Mat {
    let mut c = [[0.0; 4]; 4];
    for i in 0..n {
        for j in 0..n {
            c[i][j] = (0..n).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn mat_vec(a: &Mat, v: &[f64; 4], n: usize) -> [f64; 4] {
    let mut o = [0.0; 4];
    for i in 0..n {
        o[i] = (0..n).map(|k| a[i][k] * v[k]).sum();
    }
    o
}

/// One RK4 step of length `h` as a matrix.
pub fn step_matrix(generator: &RateMatrix, h: f64) -> [[f64; 4]; 4] {
    let n = generator.dim();
    let mut hg = generator.rows();
    for row in hg.iter_mut() {
        for v in row.iter_mut() {
            *v *= h;
        }
    }
    let mut out = [[0.0; 4]; 4];
    let mut power = [[0.0; 4]; 4];
    for i in 0..n {
        out[i][i] = 1.0;
        power[i][i] = 1.0;
    }
    for coeff in [1.0, 1.0 / 2.0, 1.0 / 6.0, 1.0 / 24.0] {
        power = mat_mul(&power, &hg, n);
        for i in 0..n {
            for j in 0..n {
                out[i][j] += coeff * power[i][j];
            }
        }
    }
    out
}

/// Integrates until `‖G·p‖∞ < tol · max_rate` and returns the final state.
pub fn converge(
    generator: &RateMatrix,
    p_init: &PopulationVector,
    tol: f64,
) -> Result<PopulationVector> {
    p_init.validate()?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("{tol} must be > 0")));
    }
    let scale = generator.max_rate();
    if scale == 0.0 {
        return Ok(*p_init);
    }
    let n = generator.dim();
    let threshold = tol * scale;
    let mut propagator = step_matrix(generator, max_step(generator));
    let mut p = p_init.0;
    let mut steps: u64 = 0;
    let mut stride: u64 = 1;
    loop {
        let residual = generator.residual(&PopulationVector(p));
        if residual < threshold {
            return Ok(PopulationVector(p));
        }
        if steps + stride > MAX_STEPS {
            return Err(Error::Convergence { steps, residual });
        }
        p = mat_vec(&propagator, &p, n);
        steps += stride;
        propagator = mat_mul(&propagator, &propagator, n);
        stride *= 2;
    }
}
