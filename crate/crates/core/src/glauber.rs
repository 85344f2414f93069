//! MMGS survival and cross-correlation amplitudes, the G(x,t) overlap
//! function, and the two Fourier relations (Stirling-approximate and exact
//! projection) that recover the GCS autocorrelation from Glauber-state
//! dynamics.
//!
//! MMGS amplitudes evolve under the physical on-site phases
//! e^{-i n(n-1) theta/2}; the Fourier extractions convert to the n^2
//! convention of [`crate::loschmidt`] with the exact global phase
//! e^{-i S theta/2}, so both routes return the same complex amplitude.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{ComplexSeries, GridUnit};
use crate::special::{pairwise_sum, phase_table_nn1, poisson_tail_bound, reduce_theta};
use crate::states::MmgsState;

/// Per-mode occupation cutoff plus the Poisson tail mass it is allowed to
/// discard. The paper's sums run to infinity; this is the truncation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub n_cut: usize,
    pub tail_tol: f64,
}

impl TruncationSpec {
    /// Default desk-scale policy: `n_cut = ceil(lambda + 12 sqrt(lambda) + 25)`,
    /// `tail_tol = 1e-14`; tail-safe in double precision for lambda <= ~34.
    pub fn for_lambda(lambda: f64) -> Self {
        let lam = lambda.max(0.0);
        Self {
            n_cut: (lam + 12.0 * lam.sqrt() + 25.0).ceil() as usize,
            tail_tol: 1e-14,
        }
    }

    /// Check the cutoff against a concrete Poisson intensity.
    pub fn validate(&self, lambda: f64) -> Result<()> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidInput("Poisson intensity must be >= 0"));
        }
        if lambda > 700.0 {
            // e^{-lambda} underflows; the series cannot be summed in doubles
            return Err(Error::InvalidInput(
                "Poisson intensity too large for double precision",
            ));
        }
        let tail = poisson_tail_bound(lambda, self.n_cut);
        if tail >= self.tail_tol {
            return Err(Error::TailTolerance {
                lambda,
                n_cut: self.n_cut,
                tail,
                tol: self.tail_tol,
            });
        }
        Ok(())
    }
}

/// Equispaced nodes x_k = k / N on [0, 1); the uniform rectangle rule on
/// these nodes is the exact DFT coefficient extractor for trigonometric
/// polynomials of degree below N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XGrid {
    n: usize,
}

impl XGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("x grid needs at least 2 nodes"));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.node(k))
    }
}

/// Margin of the aliasing rule: per-mode occupations contribute up to
/// `M * ceil(10 sqrt(lambda) + 20)` to the trigonometric degree of G beyond
/// the extracted coefficient.
fn aliasing_required(s: u32, m: u32, lambda: f64) -> usize {
    let margin = (10.0 * lambda.max(0.0).sqrt() + 20.0).ceil() as usize;
    s as usize + m as usize * margin
}

fn check_aliasing(grid: &XGrid, s: u32, m: u32, lambda: f64) -> Result<()> {
    let required = aliasing_required(s, m, lambda);
    if grid.len() < required {
        return Err(Error::Aliasing {
            n_x: grid.len(),
            required,
        });
    }
    Ok(())
}

/// Survival amplitude of an MMGS under the deep lattice:
/// `prod_i e^{-|alpha_i|^2} sum_n |alpha_i|^{2n}/n! e^{-i n(n-1) theta/2}`.
/// Factorized over modes; no constraint on the total particle number.
pub fn survival_mmgs(
    state: &MmgsState,
    theta: f64,
    trunc: &TruncationSpec,
) -> Result<Complex64> {
    let (theta_r, _) = reduce_theta(theta); // n(n-1) phases are exactly 2 pi periodic
    let phases = phase_table_nn1(trunc.n_cut, theta_r);
    let mut total = Complex64::new(1.0, 0.0);
    for a in state.alpha() {
        let lambda = a.norm_sqr();
        trunc.validate(lambda)?;
        total *= mode_sum(lambda, &phases, trunc.n_cut);
    }
    Ok(total)
}

/// e^{-lambda} sum_{n <= n_cut} lambda^n / n! phases[n], by the stable
/// Poisson pmf recurrence.
fn mode_sum(lambda: f64, phases: &[Complex64], n_cut: usize) -> Complex64 {
    let mut pmf = (-lambda).exp();
    let mut acc = pmf * phases[0];
    for n in 1..=n_cut {
        pmf *= lambda / n as f64;
        acc += pmf * phases[n];
    }
    acc
}

/// Single-site cross-correlation `<beta| e^{-i h theta/U} |alpha>`:
/// `e^{-(|alpha|^2+|beta|^2)/2} sum_n (alpha beta^*)^n / n! e^{-i n(n-1) theta/2}`.
///
/// Summed as `e^{-(|alpha|-|beta|)^2/2} sum_n pmf-scaled terms`, which never
/// underflows prematurely: the stored term magnitudes are Poisson pmf values
/// at intensity |alpha beta^*|.
pub fn cross_corr_single(
    beta: Complex64,
    alpha: Complex64,
    theta: f64,
    trunc: &TruncationSpec,
) -> Result<Complex64> {
    let z = alpha * beta.conj();
    let intensity = z.norm();
    trunc.validate(intensity)?;
    let (theta_r, _) = reduce_theta(theta);
    let phases = phase_table_nn1(trunc.n_cut, theta_r);
    // e^{-(|a|^2+|b|^2)/2} = e^{-(|a|-|b|)^2/2} * e^{-|z|}
    let na = alpha.norm();
    let nb = beta.norm();
    let outer = (-0.5 * (na - nb) * (na - nb)).exp();
    let mut term = Complex64::new((-intensity).exp(), 0.0);
    let mut acc = term * phases[0];
    for n in 1..=trunc.n_cut {
        term *= z / n as f64;
        acc += term * phases[n];
    }
    Ok(outer * acc)
}

/// The overlap function
/// `G(x, theta) = [sum_n lambda^n e^{-lambda}/n! e^{-i n(n-1) theta/2 + i 2 pi x n}]^M`,
/// the cross-correlation of the evolved homogeneous MMGS with its
/// phase-shifted copy `alpha' = sqrt(lambda) e^{-i 2 pi x}`.
pub fn g_of_x(
    x: f64,
    theta: f64,
    lambda: f64,
    m: u32,
    trunc: &TruncationSpec,
) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::InvalidInput("G(x, theta) needs M >= 1"));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidInput("filling factor must be >= 0"));
    }
    trunc.validate(lambda)?;
    let (theta_r, _) = reduce_theta(theta);
    let phases = phase_table_nn1(trunc.n_cut, theta_r);
    let shift = Complex64::from_polar(1.0, core::f64::consts::TAU * x);
    let mut pmf = (-lambda).exp();
    let mut rot = Complex64::new(1.0, 0.0);
    let mut acc = pmf * phases[0] * rot;
    for n in 1..=trunc.n_cut {
        pmf *= lambda / n as f64;
        rot *= shift;
        acc += pmf * phases[n] * rot;
    }
    Ok(acc.powu(m))
}

/// GCS autocorrelation from the Fourier coefficient of G(x, theta) with the
/// Stirling prefactor `sqrt(2 pi S)`:
/// exact only as S -> infinity, with relative error following the Stirling
/// series (about 1/(12 S) at theta = 0).
pub fn fourier_autocorr_stirling(
    s: u32,
    m: u32,
    theta: f64,
    grid: &XGrid,
    trunc: &TruncationSpec,
) -> Result<Complex64> {
    if m == 0 || s == 0 {
        return Err(Error::InvalidInput(
            "Stirling Fourier relation needs S >= 1 and M >= 1",
        ));
    }
    let lambda = s as f64 / m as f64;
    check_aliasing(grid, s, m, lambda)?;
    let quad = fourier_quadrature(s, grid, |x| g_of_x(x, theta, lambda, m, trunc))?;
    let prefactor = (core::f64::consts::TAU * s as f64).sqrt();
    Ok(convention_phase(s, theta) * prefactor * quad)
}

/// GCS autocorrelation by exact particle-number projection:
/// `e^{ntilde} S!/ntilde^S integral_0^1 dx e^{-i 2 pi x S} <alpha e^{-i 2 pi x}|e^{-iHt}|alpha>`.
///
/// Exact for every S (no large-S step). The provider abstracts the
/// cross-correlation amplitude so the relation runs against both the
/// deep-lattice closed form and oracle-assembled amplitudes of any
/// number-conserving Hamiltonian. `theta` is U t at the provider's
/// evaluation time (pass 0 when U = 0); it fixes the returned amplitude's
/// n^2 phase convention so the result is directly comparable to
/// [`crate::loschmidt::autocorr_genfun`].
pub fn fourier_autocorr_exact<F>(
    s: u32,
    state: &MmgsState,
    theta: f64,
    grid: &XGrid,
    mut provider: F,
) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let ntilde = state.ntilde();
    if ntilde == 0.0 && s > 0 {
        return Err(Error::InvalidInput(
            "vacuum MMGS has no S > 0 component to project",
        ));
    }
    let m = state.modes() as u32;
    let lambda = ntilde / m as f64;
    check_aliasing(grid, s, m, lambda)?;
    let quad = fourier_quadrature(s, grid, &mut provider)?;
    let log_prefactor = if s == 0 {
        ntilde
    } else {
        ntilde + crate::special::ln_factorial(s) - s as f64 * ntilde.ln()
    };
    Ok(convention_phase(s, theta) * log_prefactor.exp() * quad)
}

/// The integrand `F(x, theta) = e^{-i 2 pi x S} G(x, theta)` tabulated over
/// the x grid, for cancellation analysis and plotting.
pub fn f_integrand_profile(
    s: u32,
    lambda: f64,
    m: u32,
    theta: f64,
    grid: &XGrid,
    trunc: &TruncationSpec,
) -> Result<ComplexSeries> {
    let mut xs = Vec::with_capacity(grid.len());
    let mut values = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let x = grid.node(k);
        let g = g_of_x(x, theta, lambda, m, trunc)?;
        xs.push(x);
        values.push(extraction_twiddle(k, s, grid.len()) * g);
    }
    Ok(ComplexSeries::new(xs, values, GridUnit::X))
}

/// e^{-i 2 pi (k S / N)} with the angle reduced through the exact integer
/// residue, so large k S never loses precision.
fn extraction_twiddle(k: usize, s: u32, n: usize) -> Complex64 {
    let residue = (k as u64 * s as u64) % n as u64;
    Complex64::from_polar(
        1.0,
        -core::f64::consts::TAU * residue as f64 / n as f64,
    )
}

/// (1/N) sum_k e^{-i 2 pi x_k S} f(x_k) with a fixed pairwise reduction.
fn fourier_quadrature<F>(s: u32, grid: &XGrid, mut f: F) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let n = grid.len();
    let mut terms = Vec::with_capacity(n);
    for k in 0..n {
        terms.push(extraction_twiddle(k, s, n) * f(grid.node(k))?);
    }
    Ok(pairwise_sum(&terms) / n as f64)
}

/// Global phase e^{-i S theta / 2} converting the physical n(n-1) evolution
/// into the n^2 convention (exact on a fixed-S sector).
fn convention_phase(s: u32, theta: f64) -> Complex64 {
    let (theta_r, wraps) = reduce_theta(theta);
    let sign = if s % 2 == 1 && wraps.rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    };
    sign * Complex64::from_polar(1.0, -0.5 * s as f64 * theta_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loschmidt::autocorr_genfun;
    use crate::states::GcsState;
    use core::f64::consts::PI;

    #[test]
    fn truncation_spec_default_is_tail_safe() {
        for lambda in [0.0, 0.5, 1.0, 10.0, 100.0 / 3.0] {
            let t = TruncationSpec::for_lambda(lambda);
            t.validate(lambda).unwrap();
        }
        let tight = TruncationSpec {
            n_cut: 3,
            tail_tol: 1e-14,
        };
        assert!(matches!(
            tight.validate(10.0),
            Err(Error::TailTolerance { .. })
        ));
    }

    #[test]
    fn survival_normalization_and_period() {
        let st = MmgsState::homogeneous(2.0, 5).unwrap();
        let trunc = TruncationSpec::for_lambda(2.0);
        let a0 = survival_mmgs(&st, 0.0, &trunc).unwrap();
        assert!((a0 - 1.0).norm() < 1e-12);
        // n(n-1) is always even: exact revival at theta = 2 pi
        let a2pi = survival_mmgs(&st, 2.0 * PI, &trunc).unwrap();
        assert!((a2pi - 1.0).norm() < 1e-12);
        for theta in [0.3, 1.1, PI, 5.0] {
            let a = survival_mmgs(&st, theta, &trunc).unwrap();
            assert!(a.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn survival_rate_shape_lambda_2() {
        // per-site rate of the homogeneous state: minima at multiples of
        // 2 pi, strictly positive in between (frozen midpoint value from the
        // series oracle)
        let st = MmgsState::homogeneous(2.0, 1).unwrap();
        let trunc = TruncationSpec::for_lambda(2.0);
        let rate = |theta: f64| {
            let a = survival_mmgs(&st, theta, &trunc).unwrap();
            -a.norm_sqr().ln()
        };
        assert!(rate(0.0).abs() < 1e-12);
        assert!(rate(2.0 * PI).abs() < 1e-10);
        assert!((rate(PI) - 5.413881).abs() < 1e-5);
        assert!(rate(1.0) > 0.1 && rate(5.0) > 0.1);
    }

    #[test]
    fn cross_corr_normalization_and_cat_state() {
        let trunc = TruncationSpec::for_lambda(100.0 / 3.0);
        let alpha = Complex64::new((100.0f64 / 3.0).sqrt(), 0.0);
        let c = cross_corr_single(alpha, alpha, 0.0, &trunc).unwrap();
        assert!((c - 1.0).norm() < 1e-12);

        // theta = pi, beta = +/- i |beta|, alpha = |beta|: closed form
        // e^{-(|a|^2+|b|^2)/2}[cosh(a|b|) -/+ i sinh(a|b|)] ~ 1/2 -/+ i/2
        for sign in [1.0, -1.0] {
            let beta = Complex64::new(0.0, sign * alpha.re);
            let c = cross_corr_single(beta, alpha, PI, &trunc).unwrap();
            let want = Complex64::new(0.5, -sign * 0.5);
            assert!((c - want).norm() < 1e-3, "sign={sign}: {c}");
            // and against the exact closed form, far below the cat tolerance
            let ab = alpha.re * beta.norm();
            let pref = (-(alpha.norm_sqr() + beta.norm_sqr()) / 2.0).exp();
            let exact = pref * Complex64::new(ab.cosh(), -sign * ab.sinh());
            assert!((c - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn g_identity_with_cross_correlation() {
        // G(x, theta) = cross_corr(sqrt(lambda) e^{-i 2 pi x}, sqrt(lambda))^M
        let cases = [
            (0.13, 0.9, 1.0, 5u32),
            (0.77, 2.3, 4.0, 3),
            (0.0, 0.0, 2.5, 7),
            (0.5, PI, 0.25, 50),
        ];
        for (x, theta, lambda, m) in cases {
            let trunc = TruncationSpec::for_lambda(lambda);
            let g = g_of_x(x, theta, lambda, m, &trunc).unwrap();
            let beta = Complex64::from_polar(lambda.sqrt(), -core::f64::consts::TAU * x);
            let alpha = Complex64::new(lambda.sqrt(), 0.0);
            let c = cross_corr_single(beta, alpha, theta, &trunc).unwrap().powu(m);
            assert!((g - c).norm() < 1e-12, "x={x} theta={theta}");
        }
    }

    #[test]
    fn g_at_t0_is_poisson_characteristic_function() {
        let trunc = TruncationSpec::for_lambda(1.5);
        for (x, m) in [(0.2, 4u32), (0.9, 2)] {
            let g = g_of_x(x, 0.0, 1.5, m, &trunc).unwrap();
            let want = (m as f64
                * 1.5
                * (Complex64::from_polar(1.0, core::f64::consts::TAU * x) - 1.0))
                .exp();
            assert!((g - want).norm() < 1e-12);
        }
        let g = g_of_x(0.0, 0.0, 3.0, 6, &trunc).unwrap();
        assert!((g - 1.0).norm() < 1e-12);
    }

    #[test]
    fn stirling_ratio_at_t0() {
        // frozen from mpmath: sqrt(2 pi S) e^-S S^S / S!
        let cases = [(10u32, 0.9917040395560615), (100, 0.9991670165678430)];
        for (s, want) in cases {
            let grid = XGrid::new(4096).unwrap();
            let trunc = TruncationSpec::for_lambda(1.0);
            let got = fourier_autocorr_stirling(s, s, 0.0, &grid, &trunc).unwrap();
            assert!((got.re - want).abs() < 1e-9, "S={s}: {got}");
            assert!(got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn aliasing_rule_enforced() {
        let grid = XGrid::new(64).unwrap();
        let trunc = TruncationSpec::for_lambda(1.0);
        match fourier_autocorr_stirling(100, 100, 0.0, &grid, &trunc) {
            Err(Error::Aliasing { n_x, required }) => {
                assert_eq!(n_x, 64);
                assert_eq!(required, 100 + 100 * 30);
            }
            other => panic!("expected aliasing guard, got {other:?}"),
        }
    }

    #[test]
    fn exact_projection_matches_genfun_small_case() {
        // deep-lattice provider: G built from the closed-form cross corr
        let (s, m, lambda) = (6u32, 3u32, 2.0);
        let state = MmgsState::homogeneous(lambda, m).unwrap();
        let trunc = TruncationSpec::for_lambda(lambda);
        let grid = XGrid::new(512).unwrap();
        let gcs = GcsState::homogeneous(s, m).unwrap();
        for theta in [0.0, 0.7, 2.9, PI, 7.0] {
            let ex = fourier_autocorr_exact(s, &state, theta, &grid, |x| {
                g_of_x(x, theta, lambda, m, &trunc)
            })
            .unwrap();
            let gf = autocorr_genfun(&gcs, theta);
            assert!((ex - gf).norm() < 1e-10, "theta={theta}: {ex} vs {gf}");
        }
    }

    #[test]
    fn exact_projection_t0_is_exact() {
        let (s, m, lambda) = (20u32, 2u32, 10.0);
        let state = MmgsState::homogeneous(lambda, m).unwrap();
        let trunc = TruncationSpec::for_lambda(lambda);
        let grid = XGrid::new(1024).unwrap();
        let ex = fourier_autocorr_exact(s, &state, 0.0, &grid, |x| {
            g_of_x(x, 0.0, lambda, m, &trunc)
        })
        .unwrap();
        assert!((ex - 1.0).norm() < 1e-11, "{ex}");
    }

    #[test]
    fn dft_doubling_stability() {
        let (s, m, lambda) = (12u32, 4u32, 3.0);
        let state = MmgsState::homogeneous(lambda, m).unwrap();
        let trunc = TruncationSpec::for_lambda(lambda);
        let theta = 1.3;
        let base = XGrid::new(1024).unwrap();
        let doubled = XGrid::new(2048).unwrap();
        let a = fourier_autocorr_exact(s, &state, theta, &base, |x| {
            g_of_x(x, theta, lambda, m, &trunc)
        })
        .unwrap();
        let b = fourier_autocorr_exact(s, &state, theta, &doubled, |x| {
            g_of_x(x, theta, lambda, m, &trunc)
        })
        .unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn f_profile_t0_closed_form() {
        let (s, lambda, m) = (8u32, 2.0, 4u32);
        let trunc = TruncationSpec::for_lambda(lambda);
        let grid = XGrid::new(128).unwrap();
        let prof = f_integrand_profile(s, lambda, m, 0.0, &grid, &trunc).unwrap();
        for (k, (&x, &v)) in prof.grid.iter().zip(&prof.values).enumerate() {
            let phase = Complex64::from_polar(1.0, -core::f64::consts::TAU * x * s as f64);
            let g = (m as f64
                * lambda
                * (Complex64::from_polar(1.0, core::f64::consts::TAU * x) - 1.0))
                .exp();
            assert!((v - phase * g).norm() < 1e-11, "k={k}");
        }
        assert_eq!(prof.unit, GridUnit::X);
    }

    #[test]
    fn xgrid_validation() {
        assert!(XGrid::new(1).is_err());
        let g = XGrid::new(4).unwrap();
        let nodes: Vec<f64> = g.iter().collect();
        assert_eq!(nodes, alloc::vec![0.0, 0.25, 0.5, 0.75]);
    }
}
