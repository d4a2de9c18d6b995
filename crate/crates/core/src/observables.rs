//! Per-eigenstate and ground-state diagnostics: participation ratio,
//! edge / anti-edge localization weights, bare-state fidelity maps, and
//! ground-state occupancy.
//!
//! All weights are probabilities of a normalized state on distinguished
//! bare-state masks: the edge masks carry a single excitation on the first
//! or last site, the anti-edge masks a single hole there.

use nalgebra::{DMatrix, DVectorView};
use thiserror::Error;

use crate::basis::{BasisIndex, SectorTable};
use crate::spectra::Spectrum;

/// Allowed squared-norm deviation of input states.
pub const NORM_TOL: f64 = 1e-10;

/// Errors from diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservablesError {
    #[error("state is not normalized: squared norm deviates from 1 by {defect:.3e}")]
    NotNormalized { defect: f64 },
    #[error("state dimension {state} does not match basis dimension {basis}")]
    DimensionMismatch { state: usize, basis: usize },
    #[error("need a complete eigenbasis: spectrum has {len} of {dim} states")]
    IncompleteSpectrum { len: usize, dim: usize },
}

fn check_normalized(state: DVectorView<'_, f64>) -> Result<(), ObservablesError> {
    let defect = (state.norm_squared() - 1.0).abs();
    if defect > NORM_TOL {
        Err(ObservablesError::NotNormalized { defect })
    } else {
        Ok(())
    }
}

fn check_dimension(
    state: DVectorView<'_, f64>,
    basis: &SectorTable,
) -> Result<(), ObservablesError> {
    if state.len() != basis.dim() {
        Err(ObservablesError::DimensionMismatch {
            state: state.len(),
            basis: basis.dim(),
        })
    } else {
        Ok(())
    }
}

/// Inverse participation ratio `1 / sum_i |c_i|^4` of a normalized state:
/// 1 for a single bare state, up to `2^N` for a uniform superposition.
pub fn participation_ratio(state: DVectorView<'_, f64>) -> Result<f64, ObservablesError> {
    check_normalized(state)?;
    let quartic: f64 = state.iter().map(|&c| {
        let p = c * c;
        p * p
    }).sum();
    Ok(1.0 / quartic)
}

/// Probability on the masks with a single excitation sitting on the first
/// or last site.
pub fn edge_weight(
    state: DVectorView<'_, f64>,
    basis: &SectorTable,
) -> Result<f64, ObservablesError> {
    edge_region_weight(state, basis, 1)
}

/// Probability on the masks with a single excitation within the first
/// `region` or last `region` sites. `region = 1` is the plain edge weight.
pub fn edge_region_weight(
    state: DVectorView<'_, f64>,
    basis: &SectorTable,
    region: usize,
) -> Result<f64, ObservablesError> {
    check_dimension(state, basis)?;
    check_normalized(state)?;
    let n = basis.n_sites();
    let region = region.min(n);
    let mut weight = 0.0;
    for site in 0..n {
        if site < region || site >= n - region {
            let mask = 1usize << site;
            weight += state[mask] * state[mask];
        }
    }
    Ok(weight)
}

/// Probability on the masks with a single hole sitting on the first or
/// last site (all sites excited but one end).
pub fn anti_edge_weight(
    state: DVectorView<'_, f64>,
    basis: &SectorTable,
) -> Result<f64, ObservablesError> {
    check_dimension(state, basis)?;
    check_normalized(state)?;
    let n = basis.n_sites();
    let full = (1usize << n) - 1;
    let first_hole = full & !1;
    let last_hole = full & !(1 << (n - 1));
    let mut weight = state[first_hole] * state[first_hole];
    if last_hole != first_hole {
        weight += state[last_hole] * state[last_hole];
    }
    Ok(weight)
}

/// The excitation sector holding the largest share of a state's
/// probability, with that share. Ties break toward the lower sector.
pub fn dominant_sector(
    state: DVectorView<'_, f64>,
    basis: &SectorTable,
) -> Result<(usize, f64), ObservablesError> {
    check_dimension(state, basis)?;
    check_normalized(state)?;
    let mut best = (0, -1.0);
    for sector in 0..=basis.n_sites() {
        let share: f64 = basis
            .sector_members(sector)
            .iter()
            .map(|m| {
                let c = state[m.mask() as usize];
                c * c
            })
            .sum();
        if share > best.1 {
            best = (sector, share);
        }
    }
    Ok((best.0, best.1))
}

/// Ground-state occupancy measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupancy {
    /// Mean total excitation number of the lowest eigenstate.
    pub mean_excitations: f64,
    /// `1 - |<vacuum | ground>|^2`.
    pub vacuum_deficit: f64,
}

impl Occupancy {
    /// Mean excitations per site, the default plotted normalization.
    pub fn mean_per_site(&self, n_sites: usize) -> f64 {
        self.mean_excitations / n_sites as f64
    }
}

/// Occupancy of the lowest eigenstate of a spectrum: the mean excitation
/// number and the probability that has left the bare vacuum.
pub fn ground_state_occupancy(
    spectrum: &Spectrum,
    basis: &SectorTable,
) -> Result<Occupancy, ObservablesError> {
    let ground = spectrum.ground_state();
    check_dimension(ground, basis)?;
    check_normalized(ground)?;
    let mean_excitations = basis
        .states()
        .map(|m| {
            let c = ground[m.mask() as usize];
            m.excitations() as f64 * c * c
        })
        .sum();
    let vacuum_amp = ground[0];
    Ok(Occupancy {
        mean_excitations,
        vacuum_deficit: 1.0 - vacuum_amp * vacuum_amp,
    })
}

/// The squared-overlap table between bare states and eigenstates.
///
/// Rows are bare masks ordered by sector then mask value; columns are
/// eigenstates in ascending-energy order. For a complete orthonormal
/// eigenbasis the table is doubly stochastic: every row and every column
/// sums to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityMap {
    rows: Vec<BasisIndex>,
    cells: DMatrix<f64>,
}

impl FidelityMap {
    /// Bare-state row labels, sector-then-mask ordered.
    pub fn rows(&self) -> &[BasisIndex] {
        &self.rows
    }

    /// Overlap-squared entries; `(r, k)` is bare row `r` against
    /// eigenstate `k`.
    pub fn cells(&self) -> &DMatrix<f64> {
        &self.cells
    }

    pub fn n_rows(&self) -> usize {
        self.cells.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.cells.ncols()
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn stochasticity_defect(&self) -> f64 {
        let mut defect = 0.0f64;
        for r in 0..self.cells.nrows() {
            defect = defect.max((self.cells.row(r).sum() - 1.0).abs());
        }
        for c in 0..self.cells.ncols() {
            defect = defect.max((self.cells.column(c).sum() - 1.0).abs());
        }
        defect
    }
}

/// Build the fidelity map of a complete spectrum.
pub fn fidelity_map(
    spectrum: &Spectrum,
    basis: &SectorTable,
) -> Result<FidelityMap, ObservablesError> {
    if spectrum.dim() != basis.dim() {
        return Err(ObservablesError::DimensionMismatch {
            state: spectrum.dim(),
            basis: basis.dim(),
        });
    }
    if spectrum.len() != basis.dim() {
        return Err(ObservablesError::IncompleteSpectrum {
            len: spectrum.len(),
            dim: basis.dim(),
        });
    }
    let rows: Vec<BasisIndex> = basis.sector_sorted_states().collect();
    let cells = DMatrix::from_fn(rows.len(), spectrum.len(), |r, k| {
        let amp = spectrum.eigenvector(k)[rows[r].mask() as usize];
        amp * amp
    });
    Ok(FidelityMap { rows, cells })
}

/// Full diagnostic row for one eigenstate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    /// 1-based position in the ascending-energy ladder.
    pub state_index: usize,
    pub eigenvalue: f64,
    pub participation_ratio: f64,
    pub edge_weight: f64,
    pub anti_edge_weight: f64,
    pub dominant_sector: usize,
    /// Probability share held by the dominant sector.
    pub sector_fraction: f64,
}

/// Diagnose every eigenstate of a spectrum. Works on sector-restricted
/// spectra too (their eigenvectors are embedded in the full dimension).
pub fn diagnose_spectrum(
    spectrum: &Spectrum,
    basis: &SectorTable,
) -> Result<Vec<StateDiagnostics>, ObservablesError> {
    (0..spectrum.len())
        .map(|k| {
            let state = spectrum.eigenvector(k);
            let (sector, fraction) = dominant_sector(state, basis)?;
            Ok(StateDiagnostics {
                state_index: k + 1,
                eigenvalue: spectrum.eigenvalues()[k],
                participation_ratio: participation_ratio(state)?,
                edge_weight: edge_weight(state, basis)?,
                anti_edge_weight: anti_edge_weight(state, basis)?,
                dominant_sector: sector,
                sector_fraction: fraction,
            })
        })
        .collect()
}
