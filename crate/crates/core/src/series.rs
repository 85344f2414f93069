use alloc::vec::Vec;
use num_complex::Complex64;

/// What the abscissa of a [`ComplexSeries`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridUnit {
    /// Dimensionless time theta = U t.
    ThetaU,
    /// Dimensionless time J t (used when U = 0 leaves no Kerr timescale).
    ThetaJ,
    /// Phase-shift variable x on [0, 1).
    X,
}

/// A grid-indexed sequence of complex amplitudes with its axis metadata.
#[derive(Debug, Clone)]
pub struct ComplexSeries {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub unit: GridUnit,
}

impl ComplexSeries {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>, unit: GridUnit) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values, unit }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}
