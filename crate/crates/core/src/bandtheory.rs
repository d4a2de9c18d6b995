//! Continuum band theory for the infinite dimerized chain and comparison
//! utilities against finite-chain spectra.
//!
//! Under the rotating-wave approximation the one-excitation problem on a
//! two-site unit cell diagonalizes into two bands
//! `w(q) = omega0 +- sqrt(J1^2 + J2^2 + 2 J1 J2 cos(q d))`. Sweeping the
//! dimerization traces four band edges — outer `omega0 +- jbar`, inner
//! `omega0 +- |eps| jbar` — whose crossing pattern draws a bow-tie shape;
//! edge states of the open chain show up inside the gap between the inner
//! edges.

use std::f64::consts::PI;

use thiserror::Error;

use crate::basis::SectorTable;
use crate::hamiltonian::{Boundary, ChainSpec, Coupling, HamiltonianError};
use crate::observables::{dominant_sector, ObservablesError};
use crate::spectra::Spectrum;

/// Relative tolerance on band-interval boundaries when classifying finite
/// eigenvalues.
pub const CONTAINMENT_TOL: f64 = 1e-9;

/// Errors from band-theory utilities.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BandError {
    #[error("momentum grid needs at least 2 points, got {0}")]
    TooFewMomentumPoints(usize),
    #[error("lattice period must be positive and finite, got {0}")]
    InvalidPeriod(f64),
    #[error("band comparison requires an excitation-conserving spectrum")]
    NotConserving,
    #[error("band comparison requires a periodic chain")]
    NotPeriodic,
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Observables(#[from] ObservablesError),
}

/// Parameters of a dispersion calculation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSpec {
    omega0: f64,
    coupling: Coupling,
    lattice_period: f64,
    n_momentum_points: usize,
}

impl DispersionSpec {
    /// Dispersion over `n_momentum_points` uniformly covering
    /// `q d` in `[-pi, pi]`, with unit lattice period.
    pub fn new(
        omega0: f64,
        coupling: Coupling,
        n_momentum_points: usize,
    ) -> Result<Self, BandError> {
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(HamiltonianError::InvalidOmega0(omega0).into());
        }
        if n_momentum_points < 2 {
            return Err(BandError::TooFewMomentumPoints(n_momentum_points));
        }
        Ok(Self {
            omega0,
            coupling,
            lattice_period: 1.0,
            n_momentum_points,
        })
    }

    /// Same dispersion with a different lattice period.
    pub fn with_lattice_period(self, d: f64) -> Result<Self, BandError> {
        if !d.is_finite() || d <= 0.0 {
            return Err(BandError::InvalidPeriod(d));
        }
        Ok(Self {
            lattice_period: d,
            ..self
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn lattice_period(&self) -> f64 {
        self.lattice_period
    }

    pub fn n_momentum_points(&self) -> usize {
        self.n_momentum_points
    }
}

/// The two one-excitation bands sampled on a momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Dispersion {
    /// Dimensionless momenta `q d`, ascending over `[-pi, pi]`.
    pub qd: Vec<f64>,
    /// Lower band `omega0 - sqrt(...)` per momentum.
    pub lower: Vec<f64>,
    /// Upper band `omega0 + sqrt(...)` per momentum.
    pub upper: Vec<f64>,
    /// Lattice period converting `qd` back to wavenumbers.
    pub lattice_period: f64,
}

impl Dispersion {
    /// Wavenumbers `q = qd / d`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        self.qd.iter().map(|x| x / self.lattice_period).collect()
    }
}

/// Band splitting at a given dimensionless momentum.
fn band_half_width(coupling: Coupling, qd: f64) -> f64 {
    let (j1, j2) = (coupling.j1(), coupling.j2());
    (j1 * j1 + j2 * j2 + 2.0 * j1 * j2 * qd.cos()).sqrt()
}

/// Sample both bands of the infinite chain on the requested momentum grid.
pub fn dispersion(spec: &DispersionSpec) -> Dispersion {
    let n = spec.n_momentum_points();
    let mut qd = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for i in 0..n {
        let x = -PI + 2.0 * PI * i as f64 / (n - 1) as f64;
        let half = band_half_width(spec.coupling(), x);
        qd.push(x);
        lower.push(spec.omega0() - half);
        upper.push(spec.omega0() + half);
    }
    Dispersion {
        qd,
        lower,
        upper,
        lattice_period: spec.lattice_period(),
    }
}

/// The four band edges in descending order:
/// `omega0 + jbar`, `omega0 + |eps| jbar`, `omega0 - |eps| jbar`,
/// `omega0 - jbar`. Swept over the dimerization these trace the bow-tie
/// outline; the middle two enclose the gap.
pub fn bowtie_boundaries(
    epsilon: f64,
    jbar: f64,
    omega0: f64,
) -> Result<[f64; 4], BandError> {
    if !omega0.is_finite() || omega0 <= 0.0 {
        return Err(HamiltonianError::InvalidOmega0(omega0).into());
    }
    // Validation of the (epsilon, jbar) pair is shared with the couplings.
    let _ = Coupling::from_dimerization(epsilon, jbar)?;
    let inner = epsilon.abs() * jbar;
    Ok([
        omega0 + jbar,
        omega0 + inner,
        omega0 - inner,
        omega0 - jbar,
    ])
}

/// Where a finite-chain eigenvalue falls relative to the infinite-chain
/// bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandPlacement {
    /// Inside the lower or upper band interval (within tolerance).
    InBand,
    /// Strictly between the inner band edges: the gap hosting edge states.
    InGap,
    /// Outside the outer band edges.
    OutOfRange,
}

/// One classified eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifiedLevel {
    /// 1-based position in the input spectrum's ascending ladder.
    pub state_index: usize,
    pub eigenvalue: f64,
    pub placement: BandPlacement,
    /// Distance to the nearest band edge.
    pub margin: f64,
}

/// Classification counts and per-level details for the one-excitation part
/// of a finite spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport {
    pub levels: Vec<ClassifiedLevel>,
    pub in_band: usize,
    pub in_gap: usize,
    pub out_of_range: usize,
}

/// Classify every one-excitation eigenvalue of a conserving spectrum
/// against the bow-tie band intervals of the chain's parameters.
///
/// Accepts either a full spectrum (one-excitation states are found by their
/// dominant sector) or a sector-restricted one. The boundary tolerance is
/// `1e-9 * omega0`; exponentially split edge doublets straddling the gap
/// center remain in-gap as long as the gap itself is wider than the
/// tolerance.
pub fn finite_vs_continuum(
    spectrum: &Spectrum,
    basis: &SectorTable,
    spec: &ChainSpec,
) -> Result<ContainmentReport, BandError> {
    if !spectrum.provenance().conserves_excitations() {
        return Err(BandError::NotConserving);
    }
    let omega0 = spec.omega0();
    let jbar = spec.coupling().jbar();
    let inner = spec.coupling().epsilon().abs() * jbar;
    let edges = [
        omega0 - jbar,
        omega0 - inner,
        omega0 + inner,
        omega0 + jbar,
    ];
    let tol = CONTAINMENT_TOL * omega0;

    let mut levels = Vec::new();
    let (mut in_band, mut in_gap, mut out_of_range) = (0, 0, 0);
    for k in 0..spectrum.len() {
        let (sector, _) = dominant_sector(spectrum.eigenvector(k), basis)?;
        if sector != 1 {
            continue;
        }
        let w = spectrum.eigenvalues()[k];
        let in_lower = w >= edges[0] - tol && w <= edges[1] + tol;
        let in_upper = w >= edges[2] - tol && w <= edges[3] + tol;
        let placement = if in_lower || in_upper {
            BandPlacement::InBand
        } else if w > edges[1] && w < edges[2] {
            BandPlacement::InGap
        } else {
            BandPlacement::OutOfRange
        };
        match placement {
            BandPlacement::InBand => in_band += 1,
            BandPlacement::InGap => in_gap += 1,
            BandPlacement::OutOfRange => out_of_range += 1,
        }
        let margin = edges
            .iter()
            .map(|e| (w - e).abs())
            .fold(f64::INFINITY, f64::min);
        levels.push(ClassifiedLevel {
            state_index: k + 1,
            eigenvalue: w,
            placement,
            margin,
        });
    }
    Ok(ContainmentReport {
        levels,
        in_band,
        in_gap,
        out_of_range,
    })
}

/// Allowed dimensionless momenta `q d = 2 pi m / n_cells` of a periodic
/// chain with `n_cells` unit cells, shifted into `(-pi, pi]` and sorted
/// ascending.
pub fn allowed_momenta(n_cells: usize) -> Vec<f64> {
    let mut qd: Vec<f64> = (0..n_cells)
        .map(|m| {
            let x = 2.0 * PI * m as f64 / n_cells as f64;
            if x > PI { x - 2.0 * PI } else { x }
        })
        .collect();
    qd.sort_by(f64::total_cmp);
    qd
}

/// Analytic one-excitation eigenvalues of a periodic chain: both bands
/// evaluated on the allowed discrete momenta, ascending. Matches the
/// numerically diagonalized one-excitation sector of the same chain under
/// the rotating-wave approximation.
pub fn periodic_one_excitation_frequencies(spec: &ChainSpec) -> Result<Vec<f64>, BandError> {
    if spec.boundary() != Boundary::Periodic {
        return Err(BandError::NotPeriodic);
    }
    let mut freqs = Vec::with_capacity(spec.n_sites());
    for qd in allowed_momenta(spec.n_sites() / 2) {
        let half = band_half_width(spec.coupling(), qd);
        freqs.push(spec.omega0() - half);
        freqs.push(spec.omega0() + half);
    }
    freqs.sort_by(f64::total_cmp);
    Ok(freqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_basis;
    use crate::hamiltonian::build_chain;
    use crate::spectra::{diagonalize, diagonalize_sector};
    use approx::assert_abs_diff_eq;

    fn chain_spec(n: usize, eps: f64, jbar: f64, boundary: Boundary) -> ChainSpec {
        let c = Coupling::from_dimerization(eps, jbar).unwrap();
        ChainSpec::new(n, 1.0, c, true, boundary).unwrap()
    }

    #[test]
    fn band_extremes_sit_at_zone_center_and_edge() {
        let c = Coupling::from_pair(0.2, 0.3).unwrap();
        let spec = DispersionSpec::new(1.0, c, 5).unwrap();
        let d = dispersion(&spec);
        // Center of the grid is qd = 0: perfect-square width J1 + J2.
        assert_abs_diff_eq!(d.qd[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.upper[2], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.lower[2], 0.5, epsilon = 1e-12);
        // Zone edge qd = +-pi: width |J1 - J2|.
        assert_abs_diff_eq!(d.upper[0], 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(d.lower[0], 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(d.upper[4], 1.1, epsilon = 1e-12);
    }

    #[test]
    fn single_bond_gives_flat_bands() {
        let c = Coupling::from_pair(0.4, 0.0).unwrap();
        let spec = DispersionSpec::new(1.0, c, 17).unwrap();
        let d = dispersion(&spec);
        for i in 0..17 {
            assert_abs_diff_eq!(d.upper[i], 1.4, epsilon = 1e-12);
            assert_abs_diff_eq!(d.lower[i], 0.6, epsilon = 1e-12);
        }
    }

    #[test]
    fn upper_band_is_monotone_in_momentum_cosine() {
        let c = Coupling::from_pair(0.25, 0.15).unwrap();
        let spec = DispersionSpec::new(1.0, c, 101).unwrap();
        let d = dispersion(&spec);
        // cos(qd) falls from qd=0 out to the zone edges, so the upper band
        // must fall monotonically along both half-zones.
        for w in d.upper[50..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        for w in d.upper[..51].windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn wavenumbers_scale_with_the_period() {
        let c = Coupling::from_pair(0.2, 0.3).unwrap();
        let spec = DispersionSpec::new(1.0, c, 3)
            .unwrap()
            .with_lattice_period(2.0)
            .unwrap();
        let d = dispersion(&spec);
        let q = d.wavenumbers();
        assert_abs_diff_eq!(q[0], -PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q[2], PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bowtie_edges_descend_and_match_arithmetic() {
        let edges = bowtie_boundaries(0.5, 0.3, 1.0).unwrap();
        let expect = [1.3, 1.15, 0.85, 0.7];
        for (a, b) in edges.iter().zip(expect) {
            assert_abs_diff_eq!(a, &b, epsilon = 1e-14);
        }
        for w in edges.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn gap_closes_at_zero_dimerization() {
        let edges = bowtie_boundaries(0.0, 0.4, 1.0).unwrap();
        assert_eq!(edges[1], edges[2]);
        assert_abs_diff_eq!(edges[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn full_dimerization_collapses_bands_to_lines() {
        for eps in [-1.0, 1.0] {
            let edges = bowtie_boundaries(eps, 0.4, 1.0).unwrap();
            assert_abs_diff_eq!(edges[0], edges[1], epsilon = 1e-14);
            assert_abs_diff_eq!(edges[2], edges[3], epsilon = 1e-14);
        }
    }

    #[test]
    fn bowtie_rejects_bad_parameters() {
        assert!(bowtie_boundaries(1.5, 0.3, 1.0).is_err());
        assert!(bowtie_boundaries(0.5, -0.3, 1.0).is_err());
        assert!(bowtie_boundaries(0.5, 0.3, 0.0).is_err());
    }

    #[test]
    fn discrete_momenta_cover_the_zone_once() {
        let qd = allowed_momenta(4);
        let expect = [-PI / 2.0, 0.0, PI / 2.0, PI];
        assert_eq!(qd.len(), 4);
        for (a, b) in qd.iter().zip(expect) {
            assert_abs_diff_eq!(a, &b, epsilon = 1e-12);
        }
    }

    #[test]
    fn periodic_chain_matches_discrete_band_theory() {
        let basis = build_basis(6).unwrap();
        let spec = chain_spec(6, -0.4, 0.35, Boundary::Periodic);
        let op = build_chain(&spec, &basis).unwrap();
        let numeric = diagonalize_sector(&op, &basis, 1).unwrap();
        let analytic = periodic_one_excitation_frequencies(&spec).unwrap();
        assert_eq!(analytic.len(), 6);
        for (a, b) in analytic.iter().zip(numeric.eigenvalues()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn analytic_frequencies_require_a_periodic_chain() {
        let spec = chain_spec(6, -0.4, 0.35, Boundary::Open);
        assert_eq!(
            periodic_one_excitation_frequencies(&spec).unwrap_err(),
            BandError::NotPeriodic
        );
    }

    #[test]
    fn deep_negative_dimerization_traps_two_gap_states() {
        let basis = build_basis(8).unwrap();
        let spec = chain_spec(8, -0.8, 0.3, Boundary::Open);
        let op = build_chain(&spec, &basis).unwrap();
        let s = diagonalize_sector(&op, &basis, 1).unwrap();
        let report = finite_vs_continuum(&s, &basis, &spec).unwrap();
        assert_eq!(report.levels.len(), 8);
        assert_eq!(report.in_gap, 2);
        assert_eq!(report.in_band, 6);
        assert_eq!(report.out_of_range, 0);
    }

    #[test]
    fn positive_dimerization_leaves_the_gap_empty() {
        let basis = build_basis(8).unwrap();
        let spec = chain_spec(8, 0.8, 0.3, Boundary::Open);
        let op = build_chain(&spec, &basis).unwrap();
        let s = diagonalize_sector(&op, &basis, 1).unwrap();
        let report = finite_vs_continuum(&s, &basis, &spec).unwrap();
        assert_eq!(report.in_gap, 0);
        assert_eq!(report.in_band, 8);
        assert_eq!(report.out_of_range, 0);
    }

    #[test]
    fn full_spectrum_classification_matches_sector_classification() {
        let basis = build_basis(6).unwrap();
        let spec = chain_spec(6, -0.5, 0.25, Boundary::Open);
        let op = build_chain(&spec, &basis).unwrap();
        let full = finite_vs_continuum(&diagonalize(&op).unwrap(), &basis, &spec).unwrap();
        let sector = finite_vs_continuum(
            &diagonalize_sector(&op, &basis, 1).unwrap(),
            &basis,
            &spec,
        )
        .unwrap();
        assert_eq!(full.levels.len(), 6);
        assert_eq!(full.in_band, sector.in_band);
        assert_eq!(full.in_gap, sector.in_gap);
        let mut a: Vec<f64> = full.levels.iter().map(|l| l.eigenvalue).collect();
        let mut b: Vec<f64> = sector.levels.iter().map(|l| l.eigenvalue).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn one_excitation_levels_pair_symmetrically_about_the_bare_frequency() {
        let basis = build_basis(6).unwrap();
        let spec = chain_spec(6, 0.3, 0.5, Boundary::Open);
        let op = build_chain(&spec, &basis).unwrap();
        let s = diagonalize_sector(&op, &basis, 1).unwrap();
        let w = s.eigenvalues();
        for k in 0..w.len() / 2 {
            let below = 1.0 - w[k];
            let above = w[w.len() - 1 - k] - 1.0;
            assert_abs_diff_eq!(below, above, epsilon = 1e-10);
        }
    }

    #[test]
    fn nonconserving_spectra_are_rejected() {
        let basis = build_basis(4).unwrap();
        let c = Coupling::from_dimerization(-0.4, 0.3).unwrap();
        let spec = ChainSpec::new(4, 1.0, c, false, Boundary::Open).unwrap();
        let op = build_chain(&spec, &basis).unwrap();
        let s = diagonalize(&op).unwrap();
        assert_eq!(
            finite_vs_continuum(&s, &basis, &spec).unwrap_err(),
            BandError::NotConserving
        );
    }
}
