//! Integer-order Bessel functions of the first kind.
//!
//! Small arguments use the power series directly. Otherwise the whole table
//! `J_0..J_N` comes from Miller's downward recurrence, normalized with
//! `J_0² + 2·Σ J_k² = 1` and signed with `J_0 + 2·Σ J_2k = 1`.

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 2000;
pub const MAX_ARG: f64 = 1000.0;

const SERIES_CUTOFF: f64 = 1.0;
const RESCALE_AT: f64 = 1e100;
const RESCALE_BY: f64 = 1e-100;

/// `J_n(x)` for `|n| ≤ 2000`, `0 ≤ x ≤ 1000`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    let order = n.unsigned_abs();
    if order > MAX_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {n} outside ±{MAX_ORDER}"
        )));
    }
    if !(0.0..=MAX_ARG).contains(&x) {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside [0, {MAX_ARG}]"
        )));
    }
    let j = bessel_j_table(order as usize, x)[order as usize];
    Ok(if n < 0 && order % 2 == 1 { -j } else { j })
}

/// `[J_0(x), …, J_nmax(x)]` for `x ≥ 0`.
///
/// Callers are responsible for the argument range; this is the hot path of
/// every rate evaluation and does no validation beyond a debug assertion.
pub fn bessel_j_table(n_max: usize, x: f64) -> Vec<f64> {
    debug_assert!(x >= 0.0 && x.is_finite());
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < SERIES_CUTOFF {
        for (n, slot) in out.iter_mut().enumerate() {
            *slot = series(n, x);
        }
        return out;
    }
    miller(&mut out, x);
    out
}

fn series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for m in 1..=n {
        term *= half / m as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn start_order(n_max: usize, x: f64) -> usize {
    let reach = x + 12.0 * x.cbrt() + 30.0;
    let m = n_max.max(reach.ceil() as usize) + 30;
    m + (m & 1)
}

fn miller(out: &mut [f64], x: f64) {
    let n_max = out.len() - 1;
    let start = start_order(n_max, x);
    let two_over_x = 2.0 / x;

    let mut upper = 0.0; // J_{k+1}
    let mut current = 1e-30; // J_k, arbitrary scale
    let mut sum_sq = 0.0;
    let mut even_sum = 0.0;

    let mut k = start;
    loop {
        if k <= n_max {
            out[k] = current;
        }
        if k == 0 {
            sum_sq += current * current;
            even_sum += current;
            break;
        }
        sum_sq += 2.0 * current * current;
        if k.is_multiple_of(2) {
            even_sum += 2.0 * current;
        }
        let lower = k as f64 * two_over_x * current - upper;
        upper = current;
        current = lower;
        k -= 1;
        if current.abs() > RESCALE_AT {
            current *= RESCALE_BY;
            upper *= RESCALE_BY;
            sum_sq *= RESCALE_BY * RESCALE_BY;
            even_sum *= RESCALE_BY;
            for v in out.iter_mut().skip(k + 1) {
                *v *= RESCALE_BY;
            }
        }
    }

    let scale = sum_sq.sqrt().recip().copysign(even_sum);
    for v in out.iter_mut() {
        *v *= scale;
    }
}
