//! Log-gamma, underflow-safe Poisson weights and fixed-order summation
//! helpers shared by the closed-form kernels.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use num_complex::Complex64;

/// Lanczos coefficients, g = 7, 9 terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of the gamma function for `x > 0`.
///
/// Lanczos approximation with g = 7; relative error below 1e-13 over the
/// range used here (arguments up to a few thousand). Factorials and Poisson
/// weights are always assembled from this in log space so that S ~ 100 cases
/// never overflow.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// ln(n!) via [`ln_gamma`].
pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Poisson pmf e^{-lambda} lambda^n / n! evaluated in log space.
pub fn poisson_pmf(n: u32, lambda: f64) -> f64 {
    debug_assert!(lambda >= 0.0);
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-lambda + n as f64 * lambda.ln() - ln_factorial(n)).exp()
}

/// Upper bound on the Poisson tail mass P(X > n_cut) for X ~ Poisson(lambda).
///
/// Uses the geometric-ratio bound pmf(n_cut+1) / (1 - lambda/(n_cut+2)),
/// valid whenever the successive-term ratio has dropped below one; returns
/// 1.0 when the cutoff is still inside the bulk of the distribution.
pub fn poisson_tail_bound(lambda: f64, n_cut: usize) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let ratio = lambda / (n_cut as f64 + 2.0);
    if ratio >= 1.0 {
        return 1.0;
    }
    poisson_pmf(n_cut as u32 + 1, lambda) / (1.0 - ratio)
}

/// Pairwise (cascade) summation with a fixed reduction tree.
///
/// Gives run-to-run deterministic results independent of chunking choices
/// made by callers, with error growth O(log n) instead of O(n).
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= 32 {
        let mut acc = Complex64::new(0.0, 0.0);
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Reduce `theta` to `[0, 2*pi)` returning `(theta_reduced, wraps)`.
///
/// The deep-lattice phase factors e^{-i k^2 theta/2} and
/// e^{-i k(k-1) theta/2} are exactly periodic under theta -> theta + 2*pi up
/// to the global sign (-1)^{kS}; reducing the argument first keeps the
/// trigonometric evaluations well conditioned for large theta.
pub fn reduce_theta(theta: f64) -> (f64, i64) {
    let two_pi = core::f64::consts::TAU;
    let wraps = (theta / two_pi).floor();
    let reduced = theta - two_pi * wraps;
    if reduced >= two_pi {
        (reduced - two_pi, wraps as i64 + 1)
    } else {
        (reduced, wraps as i64)
    }
}

/// Table of z_k = e^{-i k^2 theta / 2} for k = 0..=k_max.
///
/// Built by the two-term unit-modulus recurrence z_{k+1} = z_k w_k,
/// w_{k+1} = w_k q with q = e^{-i theta}, which keeps the phase error at
/// O(k eps) instead of the O(k^2 theta eps) of direct argument evaluation.
pub fn phase_table_sq(k_max: usize, theta: f64) -> Vec<Complex64> {
    let mut table = Vec::with_capacity(k_max + 1);
    let q = Complex64::from_polar(1.0, -theta);
    let mut w = Complex64::from_polar(1.0, -theta / 2.0);
    let mut z = Complex64::new(1.0, 0.0);
    table.push(z);
    for _ in 0..k_max {
        z *= w;
        w *= q;
        table.push(z);
    }
    table
}

/// Table of z_k = e^{-i k(k-1) theta / 2} for k = 0..=k_max (same recurrence
/// idea as [`phase_table_sq`], ratio z_{k+1}/z_k = e^{-i k theta}).
pub fn phase_table_nn1(k_max: usize, theta: f64) -> Vec<Complex64> {
    let mut table = Vec::with_capacity(k_max + 1);
    let q = Complex64::from_polar(1.0, -theta);
    let mut w = Complex64::new(1.0, 0.0);
    let mut z = Complex64::new(1.0, 0.0);
    table.push(z);
    for _ in 0..k_max {
        z *= w;
        w *= q;
        table.push(z);
    }
    table
}
