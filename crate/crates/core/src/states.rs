//! Domain types for the two coherent-state families, the lattice models and
//! the mappings between them.
//!
//! All types are immutable after construction and safe to share across
//! threads; normalization invariants are enforced by the constructors and
//! never re-checked in hot loops.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{ln_factorial, ln_gamma};

/// Normalization tolerance accepted by the strict constructors.
pub const NORM_TOL: f64 = 1e-12;

/// Generalized (SU(M)) coherent state: `S` bosons distributed over `M` modes
/// with complex amplitudes `xi`, `sum_j |xi_j|^2 = 1`.
///
/// `|xi_j|^2` is the normalized population density of mode `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GcsState {
    s: u32,
    xi: Vec<Complex64>,
}

impl GcsState {
    /// Build from amplitudes that already satisfy the unit-norm constraint
    /// to within [`NORM_TOL`].
    pub fn new(s: u32, xi: Vec<Complex64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::InvalidInput("GCS needs at least one mode"));
        }
        let norm_sq: f64 = xi.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() >= NORM_TOL {
            return Err(Error::InvalidInput("GCS amplitudes are not unit-norm"));
        }
        Ok(Self { s, xi })
    }

    /// Build from an arbitrary nonzero amplitude vector, rescaling it to
    /// unit norm.
    pub fn normalized(s: u32, xi: Vec<Complex64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::InvalidInput("GCS needs at least one mode"));
        }
        let norm_sq: f64 = xi.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidInput("GCS amplitude vector is zero"));
        }
        let inv = norm_sq.sqrt().recip();
        Ok(Self {
            s,
            xi: xi.into_iter().map(|z| z * inv).collect(),
        })
    }

    /// The homogeneous state `xi_j = 1/sqrt(M)` for all `j` (the
    /// zero-quasi-momentum condensate).
    pub fn homogeneous(s: u32, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("homogeneous GCS needs M >= 1"));
        }
        let amp = Complex64::new((m as f64).sqrt().recip(), 0.0);
        Ok(Self {
            s,
            xi: vec![amp; m as usize],
        })
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Number of modes `M`.
    pub fn modes(&self) -> usize {
        self.xi.len()
    }

    pub fn xi(&self) -> &[Complex64] {
        &self.xi
    }

    /// True when every `|xi_j|^2` is bit-identical (constructor-built
    /// homogeneous states qualify); enables the `f^M` fast path in the
    /// generating-function evaluation.
    pub fn is_homogeneous(&self) -> bool {
        let first = self.xi[0].norm_sqr();
        self.xi.iter().all(|z| z.norm_sqr() == first)
    }
}

/// Multi-mode Glauber coherent state: a product of single-mode displacement
/// states with amplitudes `alpha`, mean particle number
/// `ntilde = sum_i |alpha_i|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmgsState {
    alpha: Vec<Complex64>,
    ntilde: f64,
}

impl MmgsState {
    pub fn new(alpha: Vec<Complex64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidInput("MMGS needs at least one mode"));
        }
        let ntilde = alpha.iter().map(|z| z.norm_sqr()).sum();
        Ok(Self { alpha, ntilde })
    }

    /// The homogeneous state `alpha_j = sqrt(lambda)` with filling factor
    /// `lambda`, so `ntilde = M * lambda`.
    pub fn homogeneous(lambda: f64, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("homogeneous MMGS needs M >= 1"));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidInput("filling factor must be >= 0"));
        }
        let amp = Complex64::new(lambda.sqrt(), 0.0);
        Ok(Self {
            alpha: vec![amp; m as usize],
            ntilde: lambda * m as f64,
        })
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn modes(&self) -> usize {
        self.alpha.len()
    }

    /// Mean total particle number.
    pub fn ntilde(&self) -> f64 {
        self.ntilde
    }
}

/// Deep-lattice (on-site Kerr) Hamiltonian H = (U/2) sum_i n_i (n_i - 1):
/// the zero-hopping limit of the Bose-Hubbard model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrLattice {
    pub u: f64,
    pub m: u32,
}

impl KerrLattice {
    pub fn new(u: f64, m: u32) -> Result<Self> {
        if !(u > 0.0) {
            return Err(Error::InvalidInput("Kerr lattice needs U > 0"));
        }
        if m == 0 {
            return Err(Error::InvalidInput("Kerr lattice needs M >= 1"));
        }
        Ok(Self { u, m })
    }

    /// Dimensionless time theta = U t.
    pub fn theta(&self, t: f64) -> f64 {
        self.u * t
    }
}

/// Boundary condition of the hopping chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

/// Bose-Hubbard model: on-site interaction `U`, nearest-neighbour hopping
/// `J` on an `M`-site chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoseHubbardModel {
    pub u: f64,
    pub j: f64,
    pub m: u32,
    pub boundary: Boundary,
}

impl BoseHubbardModel {
    pub fn new(u: f64, j: f64, m: u32, boundary: Boundary) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("Bose-Hubbard model needs M >= 1"));
        }
        if !(j >= 0.0) {
            return Err(Error::InvalidInput("hopping amplitude must be >= 0"));
        }
        if !(u >= 0.0) {
            return Err(Error::InvalidInput("on-site strength must be >= 0"));
        }
        Ok(Self { u, j, m, boundary })
    }
}

/// Strictly increasing grid of dimensionless times theta = U t.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    values: Vec<f64>,
}

impl TimeGrid {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("time grid must be non-empty"));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("time grid must be strictly increasing"));
        }
        Ok(Self { values })
    }

    /// `n` equispaced points covering `[start, end]` inclusively.
    pub fn linspace(start: f64, end: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("time grid must be non-empty"));
        }
        if n == 1 {
            return Ok(Self { values: vec![start] });
        }
        if !(end > start) {
            return Err(Error::InvalidInput("time grid must be strictly increasing"));
        }
        let step = (end - start) / (n - 1) as f64;
        Ok(Self {
            values: (0..n).map(|i| start + step * i as f64).collect(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Fock-space dimension of the `S`-particle sector on `M` modes:
/// binomial(M+S-1, M-1), the number of ways to place S identical balls in
/// M boxes. Overflow is reported distinctly from invalid input.
pub fn hilbert_dim(s: u32, m: u32) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidInput("hilbert_dim needs M >= 1"));
    }
    let n = (m as u64 + s as u64) - 1;
    let k = (m as u64 - 1).min(s as u64);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul((n - k + i) as u128).ok_or(Error::Overflow)?;
        acc /= i as u128; // exact: prefix products of binomials divide evenly
    }
    u64::try_from(acc).map_err(|_| Error::Overflow)
}

/// Project an MMGS onto the `S`-particle subspace: the GCS with
/// `xi_i = alpha_i / sqrt(ntilde)` together with the Poisson weight
/// `P(S) = e^{-ntilde} ntilde^S / S!` (computed in log space).
pub fn gcs_from_mmgs(state: &MmgsState, s: u32) -> Result<(GcsState, f64)> {
    let ntilde = state.ntilde();
    if ntilde == 0.0 {
        if s > 0 {
            return Err(Error::InvalidInput(
                "vacuum MMGS has no S > 0 component",
            ));
        }
        // The S = 0 sector is the bare vacuum; any unit xi parameterizes it.
        let mut xi = vec![Complex64::new(0.0, 0.0); state.modes()];
        xi[0] = Complex64::new(1.0, 0.0);
        return Ok((GcsState::new(0, xi)?, 1.0));
    }
    let inv = ntilde.sqrt().recip();
    let xi: Vec<Complex64> = state.alpha().iter().map(|a| a * inv).collect();
    let log_w = -ntilde + s as f64 * ntilde.ln() - ln_factorial(s);
    Ok((GcsState::new(s, xi)?, log_w.exp()))
}

/// log of the Poisson weight used by [`gcs_from_mmgs`], exposed for callers
/// that need to stay in log space.
pub fn ln_poisson_weight(ntilde: f64, s: u32) -> f64 {
    if ntilde == 0.0 {
        return if s == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -ntilde + s as f64 * ntilde.ln() - ln_gamma(s as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_gcs_values() {
        let st = GcsState::homogeneous(2, 2).unwrap();
        for z in st.xi() {
            assert!((z - Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
        }
        let st = GcsState::homogeneous(100, 100).unwrap();
        for z in st.xi() {
            assert!((z.re - 0.1).abs() < 1e-15);
            assert_eq!(z.im, 0.0);
        }
        // S = 0 is a valid vacuum-sector state
        let st = GcsState::homogeneous(0, 3).unwrap();
        assert_eq!(st.s(), 0);
        assert!((st.xi()[0].re - (3.0f64).sqrt().recip()).abs() < 1e-15);
        assert!(GcsState::homogeneous(2, 0).is_err());
    }

    #[test]
    fn gcs_norm_invariant() {
        for (s, m) in [(0u32, 1u32), (5, 3), (100, 7), (2, 100)] {
            let st = GcsState::homogeneous(s, m).unwrap();
            let n: f64 = st.xi().iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12, "S={s} M={m}");
        }
        let st = GcsState::normalized(3, vec![Complex64::new(3.0, 1.0), Complex64::new(0.0, -2.0)])
            .unwrap();
        let n: f64 = st.xi().iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gcs_new_rejects_unnormalized() {
        let bad = vec![Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)];
        assert!(GcsState::new(2, bad).is_err());
        assert!(GcsState::new(2, vec![]).is_err());
    }

    #[test]
    fn homogeneous_mmgs_values() {
        let st = MmgsState::homogeneous(1.0, 50).unwrap();
        assert!((st.ntilde() - 50.0).abs() < 1e-12);
        assert!(st.alpha().iter().all(|a| (a.re - 1.0).abs() < 1e-15));

        // Cat-state working point: alpha = sqrt(100/3)
        let st = MmgsState::homogeneous(100.0 / 3.0, 3).unwrap();
        assert!((st.alpha()[0].re - 5.773502691896258).abs() < 1e-12);
        assert!((st.ntilde() - 100.0).abs() < 1e-10);

        let st = MmgsState::homogeneous(0.0, 2).unwrap();
        assert_eq!(st.ntilde(), 0.0);
        assert!(MmgsState::homogeneous(-1.0, 2).is_err());
    }

    #[test]
    fn mmgs_ntilde_consistent() {
        let st = MmgsState::new(vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25)])
            .unwrap();
        let recomputed: f64 = st.alpha().iter().map(|a| a.norm_sqr()).sum();
        assert!((st.ntilde() - recomputed).abs() < 1e-12);
    }

    #[test]
    fn gcs_from_mmgs_examples() {
        let st = MmgsState::new(vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let (gcs, _) = gcs_from_mmgs(&st, 5).unwrap();
        for z in gcs.xi() {
            assert!((z.re - 0.5f64.sqrt()).abs() < 1e-15);
        }

        let st = MmgsState::new(vec![Complex64::new(1.0, 0.0)]).unwrap();
        let (_, w) = gcs_from_mmgs(&st, 0).unwrap();
        assert!((w - (-1.0f64).exp()).abs() < 1e-15);

        // frozen from mpmath: Poisson pmf at S = ntilde = 100
        let st = MmgsState::homogeneous(1.0, 100).unwrap();
        let (_, w) = gcs_from_mmgs(&st, 100).unwrap();
        assert!((w - 0.039860996809147135).abs() < 1e-13);

        let vac = MmgsState::homogeneous(0.0, 2).unwrap();
        assert!(gcs_from_mmgs(&vac, 1).is_err());
        let (g0, w0) = gcs_from_mmgs(&vac, 0).unwrap();
        assert_eq!(g0.s(), 0);
        assert_eq!(w0, 1.0);
    }

    #[test]
    fn poisson_weights_sum_to_one() {
        let st = MmgsState::homogeneous(2.5, 4).unwrap(); // ntilde = 10
        let mut total = 0.0;
        for s in 0..60 {
            total += gcs_from_mmgs(&st, s).unwrap().1;
        }
        let tail = crate::special::poisson_tail_bound(st.ntilde(), 59);
        assert!((total - 1.0).abs() < tail + 1e-12);
    }

    #[test]
    fn hilbert_dim_values() {
        assert_eq!(hilbert_dim(2, 2).unwrap(), 3);
        assert_eq!(hilbert_dim(100, 3).unwrap(), 5151);
        assert_eq!(hilbert_dim(0, 5).unwrap(), 1);
        assert_eq!(hilbert_dim(7, 1).unwrap(), 1);
        assert!(hilbert_dim(3, 0).is_err());
        assert_eq!(hilbert_dim(1_000_000, 2).unwrap(), 1_000_001);
        assert!(matches!(hilbert_dim(1000, 1000), Err(Error::Overflow)));
    }

    #[test]
    fn hilbert_dim_pascal_recurrence() {
        for s in 1..20u32 {
            for m in 2..12u32 {
                let lhs = hilbert_dim(s, m).unwrap();
                let rhs = hilbert_dim(s - 1, m).unwrap() + hilbert_dim(s, m - 1).unwrap();
                assert_eq!(lhs, rhs, "S={s} M={m}");
            }
        }
    }

    #[test]
    fn time_grid_validation() {
        assert!(TimeGrid::from_values(vec![]).is_err());
        assert!(TimeGrid::from_values(vec![0.0, 0.0]).is_err());
        assert!(TimeGrid::from_values(vec![0.0, -1.0]).is_err());
        let g = TimeGrid::linspace(0.0, 1.0, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert!((g.values()[4] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kerr_lattice_theta() {
        let lat = KerrLattice::new(2.0, 4).unwrap();
        assert!((lat.theta(0.75) - 1.5).abs() < 1e-15);
        assert!(KerrLattice::new(0.0, 4).is_err());
    }
}
