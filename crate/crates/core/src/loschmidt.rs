//! GCS autocorrelation (Loschmidt amplitude) by exact enumeration and by the
//! generating-function method, plus the dynamical free-energy density and
//! its spike structure.
//!
//! Amplitudes use the n^2 phase convention
//! `A(theta) = S! sum_{[n]=S} prod_i |xi_i|^{2 n_i} / n_i! e^{-i n_i^2 theta/2}`,
//! which differs from evolution under (U/2) n(n-1) by the global phase
//! e^{-i S theta / 2}; only |A| is physical. Under theta -> theta + 2*pi the
//! amplitude picks up the global sign (-1)^S, so arguments are reduced to
//! [0, 2*pi) before any trigonometric work.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{convolve, power_product, ConvolutionBackend, ScaledPolynomial};
use crate::special::{ln_factorial, phase_table_sq, reduce_theta};
use crate::states::{hilbert_dim, GcsState, TimeGrid};

/// Default Fock-dimension guard for the enumeration path.
pub const ENUM_DIM_GUARD: u64 = 2_000_000;

/// |A|^2 below this floor is clamped and flagged as saturated, so exact
/// Loschmidt zeros stay distinguishable from merely small values.
pub const SATURATION_FLOOR: f64 = 1e-300;

/// Sign picked up by A when theta wraps `w` times around 2*pi: (-1)^{S w}.
fn wrap_sign(s: u32, wraps: i64) -> f64 {
    if s % 2 == 1 && wraps.rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Loschmidt amplitude by direct summation over the restricted compositions
/// `n_1 + ... + n_M = S`, with the multinomial weight assembled in log
/// space. Refuses sectors larger than [`ENUM_DIM_GUARD`]; use
/// [`autocorr_genfun`] beyond that.
pub fn autocorr_enumerated(state: &GcsState, theta: f64) -> Result<Complex64> {
    autocorr_enumerated_guarded(state, theta, ENUM_DIM_GUARD)
}

/// [`autocorr_enumerated`] with an explicit dimension guard.
pub fn autocorr_enumerated_guarded(
    state: &GcsState,
    theta: f64,
    max_dim: u64,
) -> Result<Complex64> {
    let s = state.s();
    let m = state.modes();
    match hilbert_dim(s, m as u32) {
        Ok(dim) if dim <= max_dim => {}
        Ok(dim) => return Err(Error::DimensionGuard { dim, max: max_dim }),
        Err(Error::Overflow) => {
            return Err(Error::DimensionGuard {
                dim: u64::MAX,
                max: max_dim,
            })
        }
        Err(e) => return Err(e),
    }
    if s == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let (theta_r, wraps) = reduce_theta(theta);
    let phases = phase_table_sq(s as usize, theta_r);
    let ln_s_fact = ln_factorial(s);
    // per-mode log population densities, NaN-free for empty modes
    let ln_pop: Vec<Option<f64>> = state
        .xi()
        .iter()
        .map(|z| {
            let p = z.norm_sqr();
            if p > 0.0 {
                Some(p.ln())
            } else {
                None
            }
        })
        .collect();

    struct Ctx<'a> {
        ln_pop: &'a [Option<f64>],
        phases: &'a [Complex64],
        ln_s_fact: f64,
        sum: Complex64,
    }

    fn descend(ctx: &mut Ctx<'_>, mode: usize, remaining: u32, log_w: f64, phase: Complex64) {
        let last = mode == ctx.ln_pop.len() - 1;
        if last {
            let n = remaining;
            let term = match (ctx.ln_pop[mode], n) {
                (_, 0) => (ctx.ln_s_fact + log_w).exp() * phase,
                (None, _) => return,
                (Some(lp), n) => {
                    let lw = log_w + n as f64 * lp - ln_factorial(n);
                    (ctx.ln_s_fact + lw).exp() * phase * ctx.phases[n as usize]
                }
            };
            ctx.sum += term;
            return;
        }
        for n in 0..=remaining {
            match (ctx.ln_pop[mode], n) {
                (_, 0) => descend(ctx, mode + 1, remaining, log_w, phase),
                (None, _) => continue,
                (Some(lp), n) => descend(
                    ctx,
                    mode + 1,
                    remaining - n,
                    log_w + n as f64 * lp - ln_factorial(n),
                    phase * ctx.phases[n as usize],
                ),
            }
        }
    }

    let mut ctx = Ctx {
        ln_pop: &ln_pop,
        phases: &phases,
        ln_s_fact,
        sum: Complex64::new(0.0, 0.0),
    };
    descend(&mut ctx, 0, s, 0.0, Complex64::new(1.0, 0.0));
    Ok(wrap_sign(s, wraps) * ctx.sum)
}

/// Loschmidt amplitude as the x^S coefficient of a product of per-mode
/// polynomials.
///
/// The paper's raw 1/k! coefficients pair a ~1e-158 coefficient with
/// S! ~ 1e157 at S = 100; instead each mode carries Poisson-rescaled
/// coefficients `w_i(k) = pois(k; S |xi_i|^2) e^{-i k^2 theta/2}` which stay
/// O(1), leaving the final prefactor exp(ln S! + S - S ln S) ~ sqrt(2 pi S).
/// Truncation at degree S is exact (higher degrees cannot reach x^S).
pub fn autocorr_genfun(state: &GcsState, theta: f64) -> Complex64 {
    autocorr_genfun_with(state, theta, ConvolutionBackend::Auto)
}

/// [`autocorr_genfun`] with an explicit convolution backend.
pub fn autocorr_genfun_with(
    state: &GcsState,
    theta: f64,
    backend: ConvolutionBackend,
) -> Complex64 {
    let s = state.s();
    if s == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let (theta_r, wraps) = reduce_theta(theta);
    let phases = phase_table_sq(s as usize, theta_r);
    let d_max = s as usize;

    let mode_poly = |pop: f64| -> ScaledPolynomial {
        let lambda = s as f64 * pop;
        let mut coeffs = Vec::with_capacity(d_max + 1);
        let mut pmf = (-lambda).exp();
        coeffs.push(Complex64::new(pmf, 0.0));
        for k in 1..=d_max {
            pmf *= lambda / k as f64;
            coeffs.push(pmf * phases[k]);
        }
        ScaledPolynomial::new(coeffs, 0.0)
    };

    let product = if state.is_homogeneous() {
        let f = mode_poly(state.xi()[0].norm_sqr());
        power_product(&f, state.modes() as u32, d_max, backend)
    } else {
        let mut acc: Option<ScaledPolynomial> = None;
        for z in state.xi() {
            let f = mode_poly(z.norm_sqr());
            acc = Some(match acc {
                None => f,
                Some(p) => convolve(&p, &f, d_max, backend),
            });
        }
        acc.expect("M >= 1")
    };

    let (c, log_scale) = product.coeff_scaled(d_max);
    let s_f = s as f64;
    let prefactor = (ln_factorial(s) + s_f - s_f * s_f.ln() + log_scale).exp();
    wrap_sign(s, wraps) * prefactor * c
}

/// Dynamical free-energy density value at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergy {
    /// L = -(1/M) log |A|^2.
    pub value: f64,
    /// True when |A|^2 hit [`SATURATION_FLOOR`] and the value is clamped;
    /// marks an exact (or unresolvably deep) Loschmidt zero.
    pub saturated: bool,
}

/// L = -(1/M) log |A|^2, clamped at the saturation floor.
pub fn free_energy(amplitude: Complex64, m: usize) -> FreeEnergy {
    debug_assert!(m >= 1);
    let mag_sq = amplitude.norm_sqr();
    if mag_sq < SATURATION_FLOOR {
        FreeEnergy {
            value: -SATURATION_FLOOR.ln() / m as f64,
            saturated: true,
        }
    } else {
        FreeEnergy {
            value: -mag_sq.ln() / m as f64,
            saturated: false,
        }
    }
}

/// A located local maximum of the free-energy curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub theta: f64,
    pub value: f64,
    /// Height above the deepest intervening valley toward the nearest
    /// taller curve point (standard topographic prominence on the grid).
    pub prominence: f64,
}

/// Free-energy density sampled on a theta grid, with its local maxima.
///
/// `peaks` holds every interior three-point discrete maximum refined by
/// parabolic interpolation; [`FreeEnergyCurve::dominant_peaks`] filters them
/// by prominence and merges near-coincident spikes.
#[derive(Debug, Clone)]
pub struct FreeEnergyCurve {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub saturated: Vec<bool>,
    pub peaks: Vec<Peak>,
}

impl FreeEnergyCurve {
    /// Assemble from precomputed L values (callers may evaluate the grid in
    /// parallel; results are order-preserving).
    pub fn from_values(thetas: Vec<f64>, values: Vec<f64>, saturated: Vec<bool>) -> Self {
        let peaks = locate_peaks(&thetas, &values, &saturated);
        Self {
            thetas,
            values,
            saturated,
            peaks,
        }
    }

    /// Peaks with prominence at least `min_prominence`, deduplicated so no
    /// two returned peaks lie within `min_separation` of each other (the
    /// taller wins). Returned tallest-first.
    ///
    /// Near-zeros of the Loschmidt amplitude produce clusters of grid-scale
    /// maxima on one physical spike; the separation merge reports each
    /// spike once.
    pub fn dominant_peaks(&self, min_prominence: f64, min_separation: f64) -> Vec<Peak> {
        let mut by_height: Vec<Peak> = self
            .peaks
            .iter()
            .copied()
            .filter(|p| p.prominence >= min_prominence)
            .collect();
        by_height.sort_by(|a, b| {
            b.value
                .partial_cmp(&a.value)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.theta.partial_cmp(&b.theta).unwrap_or(core::cmp::Ordering::Equal))
        });
        let mut kept: Vec<Peak> = Vec::new();
        for p in by_height {
            if kept.iter().all(|q| (q.theta - p.theta).abs() >= min_separation) {
                kept.push(p);
            }
        }
        kept
    }
}

/// Evaluate the free-energy curve of a GCS over a time grid via the
/// generating-function amplitude.
pub fn free_energy_curve(state: &GcsState, grid: &TimeGrid) -> FreeEnergyCurve {
    let m = state.modes();
    let mut values = Vec::with_capacity(grid.len());
    let mut saturated = Vec::with_capacity(grid.len());
    for &theta in grid.values() {
        let fe = free_energy(autocorr_genfun(state, theta), m);
        values.push(fe.value);
        saturated.push(fe.saturated);
    }
    FreeEnergyCurve::from_values(grid.values().to_vec(), values, saturated)
}

fn locate_peaks(thetas: &[f64], values: &[f64], saturated: &[bool]) -> Vec<Peak> {
    let n = values.len();
    let mut peaks = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(values[i] >= values[i - 1] && values[i] > values[i + 1]) {
            continue;
        }
        let (theta, value) = if saturated[i - 1] || saturated[i] || saturated[i + 1] {
            // clamped values carry no curvature information
            (thetas[i], values[i])
        } else {
            refine_parabolic(
                (thetas[i - 1], values[i - 1]),
                (thetas[i], values[i]),
                (thetas[i + 1], values[i + 1]),
            )
        };
        peaks.push(Peak {
            theta,
            value,
            prominence: prominence_at(values, i),
        });
    }
    peaks
}

/// Vertex of the parabola through three points; falls back to the middle
/// point for degenerate (collinear) samples.
fn refine_parabolic(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> (f64, f64) {
    let (x0, y0) = a;
    let (x1, y1) = b;
    let (x2, y2) = c;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if !(curv < 0.0) || !curv.is_finite() {
        return (x1, y1);
    }
    // Newton form p(x) = y1 + d01 (x - x1) + curv (x - x0)(x - x1);
    // p'(xv) = 0 at xv = (x0 + x1)/2 - d01/(2 curv)
    let xv = 0.5 * (x0 + x1) - 0.5 * d01 / curv;
    let yv = y1 + d01 * (xv - x1) + curv * (xv - x0) * (xv - x1);
    (xv, yv)
}

fn prominence_at(values: &[f64], idx: usize) -> f64 {
    let peak = values[idx];
    let mut left_min = peak;
    for &v in values[..idx].iter().rev() {
        left_min = left_min.min(v);
        if v > peak {
            break;
        }
    }
    let mut right_min = peak;
    for &v in &values[idx + 1..] {
        right_min = right_min.min(v);
        if v > peak {
            break;
        }
    }
    (peak - left_min).min(peak - right_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn homogeneous_closed_form_s2_m2(theta: f64) -> Complex64 {
        // hand enumeration of (2,0), (0,2), (1,1)
        0.5 * Complex64::from_polar(1.0, -2.0 * theta) + 0.5 * Complex64::from_polar(1.0, -theta)
    }

    #[test]
    fn single_particle_feels_no_interaction() {
        for m in [1u32, 3, 7] {
            let st = GcsState::homogeneous(1, m).unwrap();
            for theta in [0.0, 0.9, 4.0] {
                let a = autocorr_enumerated(&st, theta).unwrap();
                let want = Complex64::from_polar(1.0, -theta / 2.0);
                assert!((a - want).norm() < 1e-12, "M={m} theta={theta}");
                assert!((a.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_mode_is_eigenstate() {
        let st = GcsState::homogeneous(2, 1).unwrap();
        for theta in [0.0, 1.7, 5.2] {
            let a = autocorr_enumerated(&st, theta).unwrap();
            let want = Complex64::from_polar(1.0, -2.0 * theta);
            assert!((a - want).norm() < 1e-12);
            let g = autocorr_genfun(&st, theta);
            assert!((g - want).norm() < 1e-12);
        }
    }

    #[test]
    fn s2_m2_closed_form() {
        let st = GcsState::homogeneous(2, 2).unwrap();
        for theta in [0.0, 0.4, PI / 2.0, PI, 2.9, 5.0] {
            let a = autocorr_enumerated(&st, theta).unwrap();
            let want = homogeneous_closed_form_s2_m2(theta);
            assert!((a - want).norm() < 1e-13, "theta={theta}");
            // |A|^2 = cos^2(theta/2)
            let prob = a.norm_sqr();
            assert!((prob - (theta / 2.0).cos().powi(2)).abs() < 1e-13);
            let g = autocorr_genfun(&st, theta);
            assert!((g - want).norm() < 1e-12, "genfun theta={theta}");
        }
        // theta = pi is an exact Loschmidt zero
        let a = autocorr_genfun(&st, PI);
        assert!(a.norm_sqr() < 1e-25);
    }

    #[test]
    fn genfun_matches_enumeration_inhomogeneous() {
        let st = GcsState::normalized(
            5,
            alloc::vec![
                Complex64::new(0.9, 0.3),
                Complex64::new(-0.4, 0.2),
                Complex64::new(0.1, -0.8),
                Complex64::new(0.35, 0.0),
            ],
        )
        .unwrap();
        for theta in [0.0, 0.31, 1.8, PI, 4.9, 11.0] {
            let e = autocorr_enumerated(&st, theta).unwrap();
            let g = autocorr_genfun(&st, theta);
            assert!((e - g).norm() < 1e-12, "theta={theta}");
        }
    }

    #[test]
    fn genfun_handles_empty_modes() {
        // a zero amplitude never receives particles
        let st = GcsState::new(
            3,
            alloc::vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.6, 0.0),
                Complex64::new(0.0, 0.8),
            ],
        )
        .unwrap();
        for theta in [0.2, 2.4] {
            let e = autocorr_enumerated(&st, theta).unwrap();
            let g = autocorr_genfun(&st, theta);
            assert!((e - g).norm() < 1e-12);
            assert!(e.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn normalization_at_t0() {
        for (s, m) in [(0u32, 3u32), (4, 3), (30, 5), (100, 100)] {
            let st = GcsState::homogeneous(s, m).unwrap();
            let g = autocorr_genfun(&st, 0.0);
            assert!((g - 1.0).norm() < 1e-12, "S={s} M={m}");
        }
    }

    #[test]
    fn unitarity_time_reversal_periodicity() {
        let st = GcsState::homogeneous(9, 4).unwrap();
        for theta in [0.05, 0.8, 2.1, 3.9, 6.0] {
            let a = autocorr_genfun(&st, theta);
            assert!(a.norm() <= 1.0 + 1e-9);
            let rev = autocorr_genfun(&st, -theta);
            assert!((rev - a.conj()).norm() < 1e-11);
            let per = autocorr_genfun(&st, theta + 2.0 * PI);
            // global sign (-1)^S leaves the modulus unchanged
            assert!((per.norm() - a.norm()).abs() < 1e-11);
            assert!((per - a * wrap_sign(st.s(), 1)).norm() < 1e-11);
        }
    }

    #[test]
    fn dimension_guard_names_alternative() {
        let st = GcsState::homogeneous(200, 5).unwrap();
        match autocorr_enumerated(&st, 0.1) {
            Err(Error::DimensionGuard { dim, max }) => {
                assert!(dim > max);
                assert_eq!(max, ENUM_DIM_GUARD);
            }
            other => panic!("expected dimension guard, got {other:?}"),
        }
        assert!(autocorr_enumerated_guarded(&st, 0.1, u64::MAX / 2).is_ok());
    }

    #[test]
    fn free_energy_values() {
        let m = 4;
        let fe = free_energy(Complex64::new(1.0, 0.0), m);
        assert_eq!(fe.value, 0.0);
        assert!(!fe.saturated);
        // |A|^2 = e^{-M} gives L = 1
        let fe = free_energy(Complex64::new((-(m as f64) / 2.0).exp(), 0.0), m);
        assert!((fe.value - 1.0).abs() < 1e-12);
        // an exact zero saturates and is flagged; the S=2 M=2 theta=pi
        // Loschmidt zero computes to |A|^2 ~ 1e-34, above the 1e-300 floor,
        // so it reports a finite (huge) rate instead
        let fe = free_energy(Complex64::new(0.0, 0.0), 2);
        assert!(fe.saturated);
        assert!((fe.value - (-SATURATION_FLOOR.ln() / 2.0)).abs() < 1e-9);
        let st = GcsState::homogeneous(2, 2).unwrap();
        let fe = free_energy(autocorr_genfun(&st, PI), 2);
        assert!(fe.value > 30.0);
    }

    #[test]
    fn curve_periodicity_and_zero_at_origin() {
        let st = GcsState::homogeneous(30, 6).unwrap();
        let grid = TimeGrid::linspace(0.0, 4.0 * PI, 257).unwrap();
        let curve = free_energy_curve(&st, &grid);
        assert!(curve.values[0].abs() < 1e-10); // L(0) = 0
        for i in 0..128 {
            // theta_i + 2 pi is theta_{i + 128} on this grid
            assert!(
                (curve.values[i] - curve.values[i + 128]).abs() < 1e-9,
                "i={i}"
            );
            assert!(curve.values[i] >= -1e-12);
        }
    }

    #[test]
    fn peak_refinement_on_synthetic_parabola() {
        // L(x) = 1 - (x - 0.613)^2 sampled off-vertex
        let thetas: Vec<f64> = (0..64).map(|i| i as f64 * 0.05).collect();
        let values: Vec<f64> = thetas.iter().map(|&x| 1.0 - (x - 0.613) * (x - 0.613)).collect();
        let saturated = alloc::vec![false; 64];
        let curve = FreeEnergyCurve::from_values(thetas, values, saturated);
        assert_eq!(curve.peaks.len(), 1);
        let p = curve.peaks[0];
        assert!((p.theta - 0.613).abs() < 1e-12);
        assert!((p.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dominant_peaks_filter_and_merge() {
        let thetas: Vec<f64> = (0..200).map(|i| i as f64 * 0.01).collect();
        // two tall spikes 0.02 apart plus a distant small bump
        let values: Vec<f64> = thetas
            .iter()
            .map(|&x| {
                let spike = |c: f64, h: f64, w: f64| h * (-(x - c) * (x - c) / (w * w)).exp();
                spike(1.00, 5.0, 0.01) + spike(1.02, 4.5, 0.01) + spike(1.8, 0.004, 0.05)
            })
            .collect();
        let curve = FreeEnergyCurve::from_values(thetas, values, alloc::vec![false; 200]);
        assert!(curve.peaks.len() >= 3);
        let dom = curve.dominant_peaks(0.01, 0.05);
        assert_eq!(dom.len(), 1, "spike pair merges, bump filtered: {dom:?}");
        assert!((dom[0].theta - 1.0).abs() < 0.02);
    }
}
