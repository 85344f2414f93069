use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by state constructors and numerical guards.
///
/// The guard variants ([`Error::DimensionGuard`], [`Error::TailTolerance`],
/// [`Error::Aliasing`]) signal that a computation was refused because its
/// accuracy or cost budget would be violated; they are distinct from plain
/// input validation so callers can map them to a dedicated exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Precondition violation on user input (bad state, index, grid, ...).
    InvalidInput(&'static str),
    /// Integer overflow in an exact combinatorial quantity.
    Overflow,
    /// Fock-space dimension exceeds the enumeration guard; use the
    /// generating-function path instead.
    DimensionGuard { dim: u64, max: u64 },
    /// Poisson tail mass beyond the occupation cutoff exceeds the admitted
    /// tolerance; raise `n_cut` or loosen `tail_tol`.
    TailTolerance {
        lambda: f64,
        n_cut: usize,
        tail: f64,
        tol: f64,
    },
    /// Fourier grid too small for the requested coefficient: aliased terms
    /// would carry non-negligible weight.
    Aliasing { n_x: usize, required: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Overflow => write!(f, "integer overflow in combinatorial quantity"),
            Error::DimensionGuard { dim, max } => write!(
                f,
                "dimension guard: Fock sector dimension {dim} exceeds {max}; \
                 use the generating-function path"
            ),
            Error::TailTolerance {
                lambda,
                n_cut,
                tail,
                tol,
            } => write!(
                f,
                "tail-tolerance guard: Poisson(lambda={lambda}) tail beyond \
                 n_cut={n_cut} is {tail:.3e} > {tol:.3e}"
            ),
            Error::Aliasing { n_x, required } => write!(
                f,
                "aliasing guard: N_x={n_x} nodes are fewer than the {required} \
                 required for the requested Fourier coefficient"
            ),
        }
    }
}

impl core::error::Error for Error {}
