//! Parameter sweeps over (dimerization, total coupling) grids, producing
//! long-format records behind the spectra, occupancy, and fidelity plots.
//!
//! Grid points are independent work items run on a worker pool; records
//! come back in a canonical order (coupling axis outer, dimerization axis
//! inner, then state index) so repeated runs and parallel/serial runs are
//! directly comparable. A failed point is reported with its grid
//! coordinates and never aborts the rest of the grid.

use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use thiserror::Error;

use crate::basis::{build_basis, SectorTable};
use crate::hamiltonian::{build_chain, Boundary, ChainSpec, Coupling};
use crate::observables::{
    diagnose_spectrum, fidelity_map, ground_state_occupancy, NORM_TOL,
};
use crate::spectra::{diagonalize, DEGENERACY_TOL, PRESENTATION_TOL};

/// Environment variable overriding the worker-pool size.
pub const THREADS_ENV: &str = "USCTOPO_THREADS";

/// Errors detected while constructing a sweep plan.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("{axis} axis holds a non-finite value")]
    NonFiniteAxisValue { axis: &'static str },
    #[error("dimerization grid value {0} lies outside [-1, 1]")]
    EpsilonOutOfRange(f64),
    #[error("coupling grid value {0} is negative")]
    NegativeCoupling(f64),
}

/// Which record families a sweep should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOutputs {
    /// Per-eigenstate rows: eigenvalue and localization diagnostics.
    pub spectrum: bool,
    /// Per-grid-point ground-state occupancy rows.
    pub occupancy: bool,
    /// Per-(bare state, eigenstate) overlap rows.
    pub fidelity: bool,
}

impl SweepOutputs {
    pub fn spectrum_only() -> Self {
        Self {
            spectrum: true,
            occupancy: false,
            fidelity: false,
        }
    }

    pub fn occupancy_only() -> Self {
        Self {
            spectrum: false,
            occupancy: true,
            fidelity: false,
        }
    }

    pub fn fidelity_only() -> Self {
        Self {
            spectrum: false,
            occupancy: false,
            fidelity: true,
        }
    }
}

/// A validated sweep: a chain template plus the two grid axes.
///
/// Every grid point reuses the template's size, bare frequency, boundary,
/// and approximation flag, replacing only the couplings. An axis may hold
/// a single value (effectively un-swept) or be empty (an empty sweep).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    template: ChainSpec,
    eps_values: Vec<f64>,
    jbar_values: Vec<f64>,
    outputs: SweepOutputs,
}

/// The default dimerization axis: 201 uniform points covering [-1, 1].
pub fn default_eps_grid() -> Vec<f64> {
    (0..201).map(|i| -1.0 + i as f64 / 100.0).collect()
}

/// The default coupling axis, as fractions of the bare frequency.
pub fn default_jbar_values(omega0: f64) -> Vec<f64> {
    [0.1, 0.3, 0.5].iter().map(|f| f * omega0).collect()
}

impl SweepPlan {
    pub fn new(
        template: ChainSpec,
        eps_values: Vec<f64>,
        jbar_values: Vec<f64>,
        outputs: SweepOutputs,
    ) -> Result<Self, SweepError> {
        for &e in &eps_values {
            if !e.is_finite() {
                return Err(SweepError::NonFiniteAxisValue {
                    axis: "dimerization",
                });
            }
            if !(-1.0..=1.0).contains(&e) {
                return Err(SweepError::EpsilonOutOfRange(e));
            }
        }
        for &j in &jbar_values {
            if !j.is_finite() {
                return Err(SweepError::NonFiniteAxisValue { axis: "coupling" });
            }
            if j < 0.0 {
                return Err(SweepError::NegativeCoupling(j));
            }
        }
        Ok(Self {
            template,
            eps_values,
            jbar_values,
            outputs,
        })
    }

    pub fn template(&self) -> &ChainSpec {
        &self.template
    }

    pub fn eps_values(&self) -> &[f64] {
        &self.eps_values
    }

    pub fn jbar_values(&self) -> &[f64] {
        &self.jbar_values
    }

    pub fn outputs(&self) -> SweepOutputs {
        self.outputs
    }

    /// Number of grid points.
    pub fn grid_len(&self) -> usize {
        self.eps_values.len() * self.jbar_values.len()
    }
}

/// One eigenstate at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRecord {
    pub epsilon: f64,
    pub jbar: f64,
    /// 1-based position in the ascending ladder.
    pub state_index: usize,
    pub eigenvalue: f64,
    pub participation_ratio: f64,
    pub edge_weight: f64,
    pub anti_edge_weight: f64,
    pub dominant_sector: usize,
    pub sector_fraction: f64,
}

/// Ground-state occupancy at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupancyRecord {
    pub epsilon: f64,
    pub jbar: f64,
    pub mean_excitations: f64,
    pub vacuum_deficit: f64,
}

/// One bare-state / eigenstate overlap at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityRecord {
    pub epsilon: f64,
    pub jbar: f64,
    pub bare_mask: u32,
    pub bare_sector: usize,
    /// 1-based eigenstate index.
    pub state_index: usize,
    pub probability: f64,
}

/// A grid point that could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub epsilon: f64,
    pub jbar: f64,
    pub message: String,
}

/// Numerical tolerances in force during a sweep, echoed into metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSummary {
    pub presentation: f64,
    pub degeneracy: f64,
    pub normalization: f64,
}

impl Default for ToleranceSummary {
    fn default() -> Self {
        Self {
            presentation: PRESENTATION_TOL,
            degeneracy: DEGENERACY_TOL,
            normalization: NORM_TOL,
        }
    }
}

/// Provenance metadata accompanying sweep records.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMeta {
    pub n_sites: usize,
    pub omega0: f64,
    pub rwa: bool,
    pub boundary: Boundary,
    pub eps_values: Vec<f64>,
    pub jbar_values: Vec<f64>,
    pub grid_points: usize,
    pub timestamp_unix: u64,
    pub version: &'static str,
    pub tolerances: ToleranceSummary,
}

/// All records and metadata from one sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spectrum: Vec<SpectrumRecord>,
    pub occupancy: Vec<OccupancyRecord>,
    pub fidelity: Vec<FidelityRecord>,
    pub failures: Vec<SweepFailure>,
    pub meta: SweepMeta,
}

/// Records produced at a single grid point.
struct PointRecords {
    spectrum: Vec<SpectrumRecord>,
    occupancy: Option<OccupancyRecord>,
    fidelity: Vec<FidelityRecord>,
}

fn evaluate_point(
    template: &ChainSpec,
    basis: &SectorTable,
    epsilon: f64,
    jbar: f64,
    outputs: SweepOutputs,
) -> Result<PointRecords, String> {
    let coupling = Coupling::from_dimerization(epsilon, jbar).map_err(|e| e.to_string())?;
    let spec = template.with_coupling(coupling);
    let op = build_chain(&spec, basis).map_err(|e| e.to_string())?;
    let s = diagonalize(&op).map_err(|e| e.to_string())?;

    let spectrum = if outputs.spectrum {
        diagnose_spectrum(&s, basis)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|d| SpectrumRecord {
                epsilon,
                jbar,
                state_index: d.state_index,
                eigenvalue: d.eigenvalue,
                participation_ratio: d.participation_ratio,
                edge_weight: d.edge_weight,
                anti_edge_weight: d.anti_edge_weight,
                dominant_sector: d.dominant_sector,
                sector_fraction: d.sector_fraction,
            })
            .collect()
    } else {
        Vec::new()
    };

    let occupancy = if outputs.occupancy {
        let occ = ground_state_occupancy(&s, basis).map_err(|e| e.to_string())?;
        Some(OccupancyRecord {
            epsilon,
            jbar,
            mean_excitations: occ.mean_excitations,
            vacuum_deficit: occ.vacuum_deficit,
        })
    } else {
        None
    };

    let fidelity = if outputs.fidelity {
        let map = fidelity_map(&s, basis).map_err(|e| e.to_string())?;
        let mut rows = Vec::with_capacity(map.n_rows() * map.n_cols());
        for (r, bare) in map.rows().iter().enumerate() {
            for k in 0..map.n_cols() {
                rows.push(FidelityRecord {
                    epsilon,
                    jbar,
                    bare_mask: bare.mask(),
                    bare_sector: bare.excitations(),
                    state_index: k + 1,
                    probability: map.cells()[(r, k)],
                });
            }
        }
        rows
    } else {
        Vec::new()
    };

    Ok(PointRecords {
        spectrum,
        occupancy,
        fidelity,
    })
}

/// Worker-count override from the environment, if set to a parsable
/// positive integer.
pub fn thread_override() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
}

/// Run a sweep with the worker count taken from `USCTOPO_THREADS`, or the
/// logical CPU count when unset.
pub fn run_sweep(plan: &SweepPlan) -> SweepResult {
    run_sweep_with_threads(plan, thread_override())
}

/// Run a sweep with an explicit worker count. `Some(1)` executes serially
/// on the calling thread; `None` uses the global worker pool.
pub fn run_sweep_with_threads(plan: &SweepPlan, threads: Option<usize>) -> SweepResult {
    let template = plan.template();
    let basis = build_basis(template.n_sites())
        .expect("chain size was validated when the template was built");
    // Grid traversal: coupling axis outer, dimerization axis inner.
    let points: Vec<(f64, f64)> = plan
        .jbar_values()
        .iter()
        .flat_map(|&j| plan.eps_values().iter().map(move |&e| (e, j)))
        .collect();

    let evaluate = |&(e, j): &(f64, f64)| {
        evaluate_point(template, &basis, e, j, plan.outputs()).map_err(|message| SweepFailure {
            epsilon: e,
            jbar: j,
            message,
        })
    };

    // An indexed parallel map preserves input order on collect, so the
    // outcome vector is already in grid-traversal order for every mode.
    let outcomes: Vec<Result<PointRecords, SweepFailure>> = match threads {
        Some(1) => points.iter().map(evaluate).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(|| points.par_iter().map(evaluate).collect()))
            .unwrap_or_else(|_| points.iter().map(evaluate).collect()),
        None => points.par_iter().map(evaluate).collect(),
    };

    let mut result = SweepResult {
        spectrum: Vec::new(),
        occupancy: Vec::new(),
        fidelity: Vec::new(),
        failures: Vec::new(),
        meta: SweepMeta {
            n_sites: template.n_sites(),
            omega0: template.omega0(),
            rwa: template.rwa(),
            boundary: template.boundary(),
            eps_values: plan.eps_values().to_vec(),
            jbar_values: plan.jbar_values().to_vec(),
            grid_points: plan.grid_len(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            version: env!("CARGO_PKG_VERSION"),
            tolerances: ToleranceSummary::default(),
        },
    };
    for outcome in outcomes {
        match outcome {
            Ok(point) => {
                result.spectrum.extend(point.spectrum);
                result.occupancy.extend(point.occupancy);
                result.fidelity.extend(point.fidelity);
            }
            Err(failure) => result.failures.push(failure),
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::participation_ratio;
    use crate::spectra::Spectrum;
    use approx::assert_abs_diff_eq;

    fn template(n: usize, rwa: bool) -> ChainSpec {
        let c = Coupling::from_pair(0.0, 0.0).unwrap();
        ChainSpec::new(n, 1.0, c, rwa, Boundary::Open).unwrap()
    }

    fn full_spectrum(n: usize, eps: f64, jbar: f64, rwa: bool) -> Spectrum {
        let basis = build_basis(n).unwrap();
        let c = Coupling::from_dimerization(eps, jbar).unwrap();
        let spec = ChainSpec::new(n, 1.0, c, rwa, Boundary::Open).unwrap();
        diagonalize(&build_chain(&spec, &basis).unwrap()).unwrap()
    }

    #[test]
    fn plan_validation_rejects_bad_axes() {
        let t = template(4, true);
        assert!(matches!(
            SweepPlan::new(t, vec![1.5], vec![0.1], SweepOutputs::spectrum_only()),
            Err(SweepError::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            SweepPlan::new(t, vec![0.0], vec![-0.1], SweepOutputs::spectrum_only()),
            Err(SweepError::NegativeCoupling(_))
        ));
        assert!(matches!(
            SweepPlan::new(
                t,
                vec![f64::NAN],
                vec![0.1],
                SweepOutputs::spectrum_only()
            ),
            Err(SweepError::NonFiniteAxisValue { .. })
        ));
    }

    #[test]
    fn default_axes_match_documented_shapes() {
        let eps = default_eps_grid();
        assert_eq!(eps.len(), 201);
        assert_eq!(eps[0], -1.0);
        assert_eq!(eps[200], 1.0);
        assert_abs_diff_eq!(eps[100], 0.0, epsilon = 1e-15);
        assert_eq!(default_jbar_values(2.0), vec![0.2, 0.6, 1.0]);
    }

    #[test]
    fn empty_axes_give_an_empty_sweep() {
        let plan = SweepPlan::new(
            template(3, true),
            vec![],
            vec![0.1],
            SweepOutputs::spectrum_only(),
        )
        .unwrap();
        let result = run_sweep_with_threads(&plan, Some(1));
        assert_eq!(plan.grid_len(), 0);
        assert!(result.spectrum.is_empty());
        assert!(result.failures.is_empty());
        assert_eq!(result.meta.grid_points, 0);
    }

    #[test]
    fn single_point_sweep_matches_direct_module_calls() {
        let (eps, jbar) = (-0.4, 0.35);
        let plan = SweepPlan::new(
            template(4, false),
            vec![eps],
            vec![jbar],
            SweepOutputs {
                spectrum: true,
                occupancy: true,
                fidelity: true,
            },
        )
        .unwrap();
        let result = run_sweep_with_threads(&plan, Some(1));
        assert!(result.failures.is_empty());

        let basis = build_basis(4).unwrap();
        let s = full_spectrum(4, eps, jbar, false);
        assert_eq!(result.spectrum.len(), 16);
        for (k, rec) in result.spectrum.iter().enumerate() {
            assert_eq!(rec.state_index, k + 1);
            assert_eq!(rec.eigenvalue, s.eigenvalues()[k]);
            assert_eq!(
                rec.participation_ratio,
                participation_ratio(s.eigenvector(k)).unwrap()
            );
        }
        let occ = ground_state_occupancy(&s, &basis).unwrap();
        assert_eq!(result.occupancy.len(), 1);
        assert_eq!(result.occupancy[0].mean_excitations, occ.mean_excitations);
        assert_eq!(result.occupancy[0].vacuum_deficit, occ.vacuum_deficit);
        let map = fidelity_map(&s, &basis).unwrap();
        assert_eq!(result.fidelity.len(), 256);
        assert_eq!(
            result.fidelity[0].probability,
            map.cells()[(0, 0)]
        );
    }

    #[test]
    fn record_count_scales_with_grid_and_dimension() {
        let eps: Vec<f64> = (0..201).map(|i| -1.0 + i as f64 / 100.0).collect();
        let plan = SweepPlan::new(
            template(4, false),
            eps,
            vec![0.5],
            SweepOutputs::spectrum_only(),
        )
        .unwrap();
        let result = run_sweep(&plan);
        assert!(result.failures.is_empty());
        assert_eq!(result.spectrum.len(), 201 * 16);
    }

    #[test]
    fn records_arrive_in_grid_traversal_order() {
        let plan = SweepPlan::new(
            template(2, true),
            vec![-0.5, 0.0, 0.5],
            vec![0.1, 0.3],
            SweepOutputs::spectrum_only(),
        )
        .unwrap();
        let result = run_sweep_with_threads(&plan, Some(4));
        assert_eq!(result.spectrum.len(), 2 * 3 * 4);
        let coords: Vec<(f64, f64, usize)> = result
            .spectrum
            .iter()
            .map(|r| (r.jbar, r.epsilon, r.state_index))
            .collect();
        let mut expect = Vec::new();
        for &j in &[0.1, 0.3] {
            for &e in &[-0.5, 0.0, 0.5] {
                for n in 1..=4 {
                    expect.push((j, e, n));
                }
            }
        }
        assert_eq!(coords, expect);
    }

    #[test]
    fn parallel_and_serial_runs_agree_exactly() {
        let eps: Vec<f64> = (0..21).map(|i| -1.0 + i as f64 / 10.0).collect();
        let plan = SweepPlan::new(
            template(5, false),
            eps,
            vec![0.1, 0.4],
            SweepOutputs {
                spectrum: true,
                occupancy: true,
                fidelity: false,
            },
        )
        .unwrap();
        let serial = run_sweep_with_threads(&plan, Some(1));
        let parallel = run_sweep_with_threads(&plan, Some(4));
        assert_eq!(serial.spectrum, parallel.spectrum);
        assert_eq!(serial.occupancy, parallel.occupancy);
    }

    #[test]
    fn weak_coupling_keeps_conserving_and_full_ladders_close() {
        let full = full_spectrum(8, -0.3, 0.1, false);
        let conserving = full_spectrum(8, -0.3, 0.1, true);
        for (a, b) in full
            .eigenvalues()
            .iter()
            .zip(conserving.eigenvalues())
            .filter(|(&a, _)| a <= 2.0)
        {
            assert!(
                (a - b).abs() < 0.01,
                "ladders diverge at weak coupling: {a} vs {b}"
            );
        }
    }

    #[test]
    fn ground_occupancy_grows_with_coupling() {
        let jbars: Vec<f64> = (1..=9).map(|i| 0.1 * i as f64).collect();
        let plan = SweepPlan::new(
            template(2, false),
            vec![0.0],
            jbars,
            SweepOutputs::occupancy_only(),
        )
        .unwrap();
        let result = run_sweep_with_threads(&plan, Some(1));
        let series: Vec<f64> = result
            .occupancy
            .iter()
            .map(|r| r.mean_excitations)
            .collect();
        for w in series.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "occupancy not monotone: {series:?}");
        }
    }

    #[test]
    fn meta_captures_the_plan_shape() {
        let plan = SweepPlan::new(
            template(3, true),
            vec![-0.2, 0.2],
            vec![0.1],
            SweepOutputs::spectrum_only(),
        )
        .unwrap();
        let result = run_sweep_with_threads(&plan, Some(1));
        assert_eq!(result.meta.n_sites, 3);
        assert_eq!(result.meta.grid_points, 2);
        assert_eq!(result.meta.eps_values, vec![-0.2, 0.2]);
        assert!(result.meta.rwa);
        assert_eq!(result.meta.version, env!("CARGO_PKG_VERSION"));
        assert_eq!(result.meta.tolerances, ToleranceSummary::default());
    }

    #[test]
    fn thread_override_parses_only_positive_integers() {
        // The parser itself; the environment is not mutated here because
        // tests run concurrently.
        assert_eq!("4".trim().parse::<usize>().ok().filter(|&n| n >= 1), Some(4));
        assert_eq!("0".trim().parse::<usize>().ok().filter(|&n| n >= 1), None);
        assert_eq!(
            "abc".trim().parse::<usize>().ok().filter(|&n| n >= 1),
            None
        );
    }
}
