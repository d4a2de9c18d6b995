//! Time evolution: the closed-form two-site mean-correlation series and a
//! general spectral propagator.
//!
//! The propagator expands the initial state over a complete eigenbasis and
//! advances each coefficient by its phase, `|psi(t)> = sum_k e^{-i w_k t}
//! <v_k|psi(0)> |v_k>`; it is exact up to the accuracy of the
//! decomposition. This is the only place complex amplitudes appear —
//! operators themselves stay real.

use nalgebra::{DVector, DVectorView};
use num_complex::Complex64;
use thiserror::Error;

use crate::hamiltonian::{HamiltonianError, HermitianOperator};
use crate::spectra::Spectrum;

/// Allowed squared-norm deviation of states entering or leaving evolution.
pub const NORM_TOL: f64 = 1e-10;

/// Errors from time grids and propagation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("time grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("time span must satisfy 0 <= start < end with finite bounds, got [{start}, {end}]")]
    InvalidSpan { start: f64, end: f64 },
    #[error("time-unit frequency must be positive and finite, got {0}")]
    InvalidUnitFrequency(f64),
    #[error("state dimension {state} does not match expected dimension {expected}")]
    DimensionMismatch { state: usize, expected: usize },
    #[error("initial state is not normalized: squared norm deviates by {defect:.3e}")]
    NotNormalized { defect: f64 },
    #[error("need a complete eigenbasis: spectrum has {len} of {dim} states")]
    IncompleteSpectrum { len: usize, dim: usize },
    #[error("evolved state norm drifted by {defect:.3e} at grid point {index}")]
    NormDrift { index: usize, defect: f64 },
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

/// The unit the grid's time values are expressed in. Each variant carries
/// the frequency that converts displayed values back to absolute time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeUnit {
    /// Values are `J * t` (time in units of the inverse coupling).
    InverseCoupling { j: f64 },
    /// Values are `omega0 * t` (time in units of the inverse bare frequency).
    InverseBareFrequency { omega0: f64 },
}

impl TimeUnit {
    pub fn inverse_coupling(j: f64) -> Result<Self, DynamicsError> {
        if !j.is_finite() || j <= 0.0 {
            return Err(DynamicsError::InvalidUnitFrequency(j));
        }
        Ok(TimeUnit::InverseCoupling { j })
    }

    pub fn inverse_bare_frequency(omega0: f64) -> Result<Self, DynamicsError> {
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(DynamicsError::InvalidUnitFrequency(omega0));
        }
        Ok(TimeUnit::InverseBareFrequency { omega0 })
    }

    /// The frequency dividing displayed values to recover absolute time.
    pub fn frequency(&self) -> f64 {
        match self {
            TimeUnit::InverseCoupling { j } => *j,
            TimeUnit::InverseBareFrequency { omega0 } => *omega0,
        }
    }

    /// Axis label for plots.
    pub fn label(&self) -> &'static str {
        match self {
            TimeUnit::InverseCoupling { .. } => "Jt",
            TimeUnit::InverseBareFrequency { .. } => "omega0*t",
        }
    }
}

/// A uniform time grid with an explicit unit declaration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    start: f64,
    end: f64,
    n_points: usize,
    unit: TimeUnit,
}

/// Displayed span of the default grid, chosen to cover several coupling
/// periods of the two-site exchange.
pub const DEFAULT_SPAN: f64 = 7.0;
/// Point count of the default grid.
pub const DEFAULT_POINTS: usize = 1000;

impl TimeGrid {
    /// A grid of `n_points` values uniformly covering `[start, end]`,
    /// expressed in the given unit.
    pub fn new(start: f64, end: f64, n_points: usize, unit: TimeUnit) -> Result<Self, DynamicsError> {
        if n_points < 2 {
            return Err(DynamicsError::TooFewPoints(n_points));
        }
        if !start.is_finite() || !end.is_finite() || start < 0.0 || end <= start {
            return Err(DynamicsError::InvalidSpan { start, end });
        }
        Ok(Self {
            start,
            end,
            n_points,
            unit,
        })
    }

    /// The default grid: 1000 points over `J t` in `[0, 7]`.
    pub fn default_for_coupling(j: f64) -> Result<Self, DynamicsError> {
        Self::new(0.0, DEFAULT_SPAN, DEFAULT_POINTS, TimeUnit::inverse_coupling(j)?)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn unit(&self) -> TimeUnit {
        self.unit
    }

    /// Displayed value of grid point `i` (in the declared unit).
    pub fn value(&self, i: usize) -> f64 {
        let frac = i as f64 / (self.n_points - 1) as f64;
        self.start + frac * (self.end - self.start)
    }

    /// Absolute time of grid point `i`.
    pub fn absolute(&self, i: usize) -> f64 {
        self.value(i) / self.unit.frequency()
    }

    /// All displayed values.
    pub fn values(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.value(i)).collect()
    }
}

/// Site-resolved mean-correlation series `<sigma_n^dag><sigma_n>` of the
/// two-site model.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCorrelationSeries {
    pub grid: TimeGrid,
    pub site1: Vec<f64>,
    pub site2: Vec<f64>,
}

/// Closed-form mean correlations of the two-site model with
/// counter-rotating terms:
///
/// `site1(t) = f(t) cos^2(J t)`, `site2(t) = f(t) sin^2(J t)`, with the
/// envelope `f(t) = cos^2(wr t) + (omega0/wr)^2 sin^2(wr t)` and the
/// renormalized frequency `wr = sqrt(omega0^2 + J^2)`. The envelope is what
/// distinguishes the ultrastrong regime from plain excitation exchange: for
/// `J << omega0` it stays within `(omega0/wr)^2` of 1 and the series reduce
/// to `cos^2`/`sin^2`.
pub fn dimer_mean_correlations(
    omega0: f64,
    j: f64,
    grid: &TimeGrid,
) -> Result<MeanCorrelationSeries, DynamicsError> {
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(HamiltonianError::InvalidOmega0(omega0).into());
    }
    if !j.is_finite() || j < 0.0 {
        return Err(HamiltonianError::InvalidCoupling(j).into());
    }
    let renormalized = omega0.hypot(j);
    let depth = (omega0 / renormalized).powi(2);
    let n = grid.n_points();
    let mut site1 = Vec::with_capacity(n);
    let mut site2 = Vec::with_capacity(n);
    for i in 0..n {
        let t = grid.absolute(i);
        let envelope = (renormalized * t).cos().powi(2) + depth * (renormalized * t).sin().powi(2);
        site1.push(envelope * (j * t).cos().powi(2));
        site2.push(envelope * (j * t).sin().powi(2));
    }
    Ok(MeanCorrelationSeries {
        grid: *grid,
        site1,
        site2,
    })
}

/// A state trajectory sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSeries {
    grid: TimeGrid,
    states: Vec<DVector<Complex64>>,
}

impl StateSeries {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &DVector<Complex64> {
        &self.states[i]
    }

    pub fn states(&self) -> &[DVector<Complex64>] {
        &self.states
    }
}

/// Propagate a real initial state through a complete eigendecomposition,
/// sampling `|psi(t)>` on the grid. Norm conservation is enforced to
/// `1e-10` at every point.
pub fn evolve(
    spectrum: &Spectrum,
    initial: DVectorView<'_, f64>,
    grid: &TimeGrid,
) -> Result<StateSeries, DynamicsError> {
    if spectrum.len() != spectrum.dim() {
        return Err(DynamicsError::IncompleteSpectrum {
            len: spectrum.len(),
            dim: spectrum.dim(),
        });
    }
    if initial.len() != spectrum.dim() {
        return Err(DynamicsError::DimensionMismatch {
            state: initial.len(),
            expected: spectrum.dim(),
        });
    }
    let norm_defect = (initial.norm_squared() - 1.0).abs();
    if norm_defect > NORM_TOL {
        return Err(DynamicsError::NotNormalized {
            defect: norm_defect,
        });
    }

    let basis_change = spectrum.eigenvectors();
    let amplitudes = basis_change.transpose() * initial;
    let n = grid.n_points();
    let mut states = Vec::with_capacity(n);
    for i in 0..n {
        let t = grid.absolute(i);
        // e^{-i w t} a splits into real and imaginary coefficient vectors,
        // so the transform back needs two real matrix products.
        let mut re_coeff = DVector::zeros(spectrum.len());
        let mut im_coeff = DVector::zeros(spectrum.len());
        for (k, &w) in spectrum.eigenvalues().iter().enumerate() {
            let phase = w * t;
            re_coeff[k] = amplitudes[k] * phase.cos();
            im_coeff[k] = -amplitudes[k] * phase.sin();
        }
        let re = basis_change * re_coeff;
        let im = basis_change * im_coeff;
        let state = DVector::from_fn(spectrum.dim(), |r, _| Complex64::new(re[r], im[r]));
        let defect = (state.norm_squared() - 1.0).abs();
        if defect > NORM_TOL {
            return Err(DynamicsError::NormDrift { index: i, defect });
        }
        states.push(state);
    }
    Ok(StateSeries {
        grid: *grid,
        states,
    })
}

/// Expectation `<psi(t)| O |psi(t)>` along a trajectory. For a real
/// symmetric operator the value is identically real, computed as
/// `x' O x + y' O y` on the real and imaginary parts.
pub fn expectation_series(
    series: &StateSeries,
    operator: &HermitianOperator,
) -> Result<Vec<f64>, DynamicsError> {
    let mut out = Vec::with_capacity(series.len());
    for state in series.states() {
        if state.len() != operator.dim() {
            return Err(DynamicsError::DimensionMismatch {
                state: state.len(),
                expected: operator.dim(),
            });
        }
        let re = state.map(|c| c.re);
        let im = state.map(|c| c.im);
        let value = re.dot(&operator.apply(&re)) + im.dot(&operator.apply(&im));
        out.push(value);
    }
    Ok(out)
}
