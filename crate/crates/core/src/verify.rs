//! Built-in oracle suite: the rate kernel and the solvers checked against
//! independent computations.
//!
//! * stationary solve vs RK4 relaxation, every model;
//! * closed forms vs the linear solve;
//! * Bessel recurrence vs an exact rational power series, plus the
//!   photon-cutoff tail bound.
//!
//! Every check is seeded, so a report is reproducible.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::converge;
use crate::error::Result;
use crate::lz_rates::{bessel_j, bessel_j_table, lz_rate_truncated, truncation_order, RateParams};
use crate::steady_state::{
    first_diamond_closed_form, first_diamond_solve, second_diamond_approx, second_diamond_solve,
    solve_model, Model, PopulationVector, RateMatrix, TransitionRates,
};

const SEED: u64 = 0x1a5_2024;

pub const DYNAMICS_CASES: usize = 200;
pub const DYNAMICS_TOL: f64 = 1e-6;
pub const CLOSED_FORM_CASES: usize = 1000;
pub const CLOSED_FORM_TOL: f64 = 1e-10;
pub const APPROX_TOL: f64 = 0.05;
pub const SERIES_TOL: f64 = 1e-12;
pub const TAIL_CASES: usize = 100;
pub const TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_rates(rng: &mut ChaCha8Rng) -> TransitionRates {
    let mut r = || log_uniform(rng, 1e-3, 1.0);
    TransitionRates {
        w02: r(),
        w12: r(),
        w03: r(),
        w13: r(),
        g10: r(),
        g20: r(),
        g32: r(),
        g02: r(),
    }
}

/// Relaxation from the ground state against the linear solve, per model.
pub fn check_dynamics_oracle() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (k, model) in Model::ALL.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + k as u64);
        let mut worst = 0.0f64;
        for _ in 0..DYNAMICS_CASES {
            let rates = random_rates(&mut rng);
            let g = RateMatrix::for_model(model, &rates);
            let stationary = solve_model(model, &rates)?;
            let relaxed = converge(&g, &PopulationVector::GROUND, 1e-12)?;
            worst = worst.max(stationary.max_abs_diff(&relaxed));
        }
        out.push(check(
            format!("dynamics oracle ({model})"),
            worst < DYNAMICS_TOL,
            format!("{DYNAMICS_CASES} rate sets, max |Δp| = {worst:.3e} (limit {DYNAMICS_TOL:e})"),
        ));
    }
    Ok(out)
}

/// Closed forms against the linear solve.
pub fn check_closed_forms() -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut worst = 0.0f64;
    for _ in 0..CLOSED_FORM_CASES {
        let w02 = log_uniform(&mut rng, 1e-6, 1.0);
        let w12 = log_uniform(&mut rng, 1e-6, 1.0);
        let g10 = log_uniform(&mut rng, 1e-3, 1.0);
        let g20 = log_uniform(&mut rng, 1e-6, 1e-2);
        let exact = first_diamond_closed_form(w02, w12, g10, g20)?;
        let solved = first_diamond_solve(w02, w12, g10, g20)?.0[2];
        worst = worst.max((exact - solved).abs() / exact.abs().max(f64::MIN_POSITIVE));
    }
    let first = check(
        "first-diamond closed form",
        worst < CLOSED_FORM_TOL,
        format!(
            "{CLOSED_FORM_CASES} cases, max relative error {worst:.3e} (limit {CLOSED_FORM_TOL:e})"
        ),
    );

    // Fast intra-well relaxation: Γ₁₀, Γ₃₂ ≥ 100·(W₀₃+W₁₂), Γ₂₀ ≤ W₀₃+W₁₂.
    let mut worst = 0.0f64;
    for _ in 0..CLOSED_FORM_CASES {
        let w03 = log_uniform(&mut rng, 1e-4, 1e-1);
        let w12 = log_uniform(&mut rng, 1e-4, 1e-1);
        let sum = w03 + w12;
        let g10 = sum * log_uniform(&mut rng, 100.0, 1e4);
        let g32 = sum * log_uniform(&mut rng, 100.0, 1e4);
        let g20 = log_uniform(&mut rng, 1e-6, sum);
        let approx = second_diamond_approx(w03, w12, g20)?;
        let solved = second_diamond_solve(w03, w12, g10, g20, g32)?.left_well();
        worst = worst.max((approx - solved).abs() / solved);
    }
    let second = check(
        "second-diamond approximation",
        worst < APPROX_TOL,
        format!("{CLOSED_FORM_CASES} cases, max relative error {worst:.3e} (limit {APPROX_TOL})"),
    );
    Ok(vec![first, second])
}

/// `J_n(x)` from its power series in exact rational arithmetic, rounded once.
///
/// With `x/2 = a/b` the series is summed by Horner's rule over integers,
/// `1 + r₀(1 + r₁(1 + …))` with `r_k = −a²/(b²(k+1)(n+k+1))`, so nothing is
/// reduced until the final division.
pub fn bessel_series_exact(n: u32, x: f64) -> f64 {
    const TERMS: u32 = 80;
    let half = BigRational::from_float(x).expect("finite argument") / BigInt::from(2);
    let (a, b) = (half.numer().clone(), half.denom().clone());
    let (a2, b2) = (&a * &a, &b * &b);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in (0..TERMS).rev() {
        let v = &b2 * BigInt::from((k + 1) * (n + k + 1));
        num = &v * &den - &a2 * &num;
        den *= v;
    }
    let mut lead_den = BigInt::one();
    for m in 1..=n {
        lead_den *= BigInt::from(m) * &b;
    }
    num *= a.pow(n);
    den *= lead_den;
    BigRational::new(num, den).to_f64().expect("representable")
}

pub fn check_bessel() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let j0 = bessel_j(0, 0.0)?;
    out.push(check("J0(0) = 1", j0 == 1.0, format!("got {j0:e}")));
    let z = bessel_j(0, 2.404826)?;
    out.push(check(
        "J0 first zero",
        z.abs() < 1e-6,
        format!("|J0(2.404826)| = {:.3e}", z.abs()),
    ));

    let mut worst = 0.0f64;
    let mut count = 0;
    for sixteenths in (4..=320).step_by(7) {
        let x = sixteenths as f64 / 16.0;
        let table = bessel_j_table(50, x);
        for (n, &j) in table.iter().enumerate() {
            let exact = bessel_series_exact(n as u32, x);
            worst = worst.max((j - exact).abs());
            count += 1;
        }
    }
    out.push(check(
        "Bessel recurrence vs exact series",
        worst < SERIES_TOL,
        format!("{count} values, n ≤ 50, x ≤ 20, max |Δ| = {worst:.3e} (limit {SERIES_TOL:e})"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 20);
    let mut worst = 0.0f64;
    for _ in 0..TAIL_CASES {
        let omega = log_uniform(&mut rng, 0.05, 2.0);
        let x = rng.gen_range(0.0..200.0);
        let amplitude = x * omega;
        let p = RateParams {
            gap: log_uniform(&mut rng, 1e-3, 0.5),
            epsilon: rng.gen_range(-1.2..1.2) * amplitude.max(omega),
            amplitude,
            omega,
            gamma2: log_uniform(&mut rng, 0.01, 0.5),
        };
        p.validate()?;
        let n = truncation_order(x);
        let a = lz_rate_truncated(&p, n);
        let b = lz_rate_truncated(&p, 2 * n);
        worst = worst.max((a - b).abs() / b);
    }
    out.push(check(
        "photon cutoff tail",
        worst < TAIL_TOL,
        format!("{TAIL_CASES} cases, doubling the cutoff changes W by ≤ {worst:.3e} relative (limit {TAIL_TOL:e})"),
    ));
    Ok(out)
}

/// Runs every check. An error inside a check is reported as a failure.
pub fn run_all() -> Report {
    type Group = fn() -> Result<Vec<CheckResult>>;
    let groups: [(&str, Group); 3] = [
        ("dynamics oracle", check_dynamics_oracle),
        ("closed forms", check_closed_forms),
        ("Bessel kernel", check_bessel),
    ];
    let mut checks = Vec::new();
    for (name, f) in groups {
        match f() {
            Ok(mut c) => checks.append(&mut c),
            Err(e) => checks.push(check(name, false, format!("error: {e}"))),
        }
    }
    Report { checks }
}
