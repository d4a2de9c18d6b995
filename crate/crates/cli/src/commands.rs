//! Subcommand implementations: resolve flags into validated model
//! parameters, run the library, and shape the results into tables, plots,
//! and configuration echoes for the sidecar metadata.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use usctopo::bandtheory::{bowtie_boundaries, dispersion, DispersionSpec};
use usctopo::basis::build_basis;
use usctopo::dynamics::{dimer_mean_correlations, TimeGrid, TimeUnit};
use usctopo::hamiltonian::{build_chain, build_dimer, Boundary, ChainSpec, Coupling};
use usctopo::observables::fidelity_map;
use usctopo::spectra::diagonalize;
use usctopo::sweep::{run_sweep, SweepOutputs, SweepPlan, SweepResult};

use crate::args::{
    ChainArgs, DimerDynamicsArgs, DimerSpectrumArgs, DispersionArgs, PointArgs, SweepArgs,
};
use crate::error::CliError;
use crate::svg::{HeatmapPlot, LinePlot, Plot, ScatterPanel, ScatterPlot, Series};
use crate::table::{Field, Table};

/// Everything one output file needs: records, an optional plot view, and
/// the resolved configuration for the metadata sidecar.
pub struct Rendered {
    pub table: Table,
    pub plot: Option<Plot>,
    pub config: Value,
}

/// Site count accepted for dense work from the command line.
const MAX_CLI_SITES: usize = 12;

fn check_sites(n: usize) -> Result<(), CliError> {
    if n == 0 || n > MAX_CLI_SITES {
        return Err(CliError::validation(format!(
            "site count {n} outside 1..={MAX_CLI_SITES} (dense diagonalization)"
        )));
    }
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn placeholder_coupling() -> Coupling {
    Coupling::from_pair(0.0, 0.0).expect("zero couplings are always valid")
}

/// Resolved sweep axes: grid values plus the flag-level (ratio) couplings
/// used for labels.
struct ChainAxes {
    template: ChainSpec,
    eps_values: Vec<f64>,
    jbar_physical: Vec<f64>,
    jbar_ratios: Vec<f64>,
}

fn resolve_chain(a: &ChainArgs) -> Result<ChainAxes, CliError> {
    check_sites(a.n)?;
    let (eps_values, jbar_ratios) = if let (Some(j1), Some(j2)) = (a.j1, a.j2) {
        let coupling = Coupling::from_pair(j1 * a.omega0, j2 * a.omega0)
            .map_err(CliError::validation)?;
        (vec![coupling.epsilon()], vec![coupling.jbar() / a.omega0])
    } else {
        let eps = match a.eps {
            Some(e) => vec![e],
            None => {
                if a.eps_grid < 2 {
                    return Err(CliError::validation(
                        "--eps-grid needs at least 2 points; use --eps for a single value",
                    ));
                }
                linspace(-1.0, 1.0, a.eps_grid)
            }
        };
        (eps, a.jbar.clone())
    };
    let template = ChainSpec::new(
        a.n,
        a.omega0,
        placeholder_coupling(),
        a.rwa_resolved(),
        a.boundary.to_model(),
    )
    .map_err(CliError::validation)?;
    let jbar_physical: Vec<f64> = jbar_ratios.iter().map(|r| r * a.omega0).collect();
    Ok(ChainAxes {
        template,
        eps_values,
        jbar_physical,
        jbar_ratios,
    })
}

/// Run a sweep and refuse to emit anything if any grid point failed.
fn run_sweep_checked(plan: &SweepPlan) -> Result<SweepResult, CliError> {
    let result = run_sweep(plan);
    if let Some(first) = result.failures.first() {
        return Err(CliError::runtime(format!(
            "{} grid point(s) failed; first at eps={}, jbar={}: {}",
            result.failures.len(),
            first.epsilon,
            first.jbar,
            first.message
        )));
    }
    Ok(result)
}

fn chain_config(command: &str, a: &ChainArgs, axes: &ChainAxes) -> Value {
    json!({
        "command": command,
        "n": a.n,
        "omega0": a.omega0,
        "jbar_over_omega0": axes.jbar_ratios,
        "eps_points": axes.eps_values.len(),
        "eps_first": axes.eps_values.first(),
        "eps_last": axes.eps_values.last(),
        "rwa": a.rwa_resolved(),
        "boundary": a.boundary.as_str(),
        "cut_over_omega0": a.cut,
    })
}

/// Scatter panels of (eps, frequency, participation ratio), one per
/// coupling, with the frequency axis cut from above.
fn spectrum_panels(result: &SweepResult, axes: &ChainAxes, omega0: f64, cut: f64) -> Plot {
    let panels = axes
        .jbar_physical
        .iter()
        .zip(&axes.jbar_ratios)
        .map(|(&phys, &ratio)| ScatterPanel {
            heading: format!("jbar = {ratio}"),
            points: result
                .spectrum
                .iter()
                .filter(|r| r.jbar == phys && r.eigenvalue / omega0 <= cut)
                .map(|r| (r.epsilon, r.eigenvalue / omega0, r.participation_ratio))
                .collect(),
        })
        .collect();
    Plot::Scatter(ScatterPlot {
        title: "eigenvalue ladder vs dimerization".into(),
        x_label: "ε".into(),
        y_label: "ω/ω₀".into(),
        color_label: "PR".into(),
        panels,
    })
}

pub fn chain_spectrum(a: &ChainArgs) -> Result<Rendered, CliError> {
    let axes = resolve_chain(a)?;
    let plan = SweepPlan::new(
        axes.template,
        axes.eps_values.clone(),
        axes.jbar_physical.clone(),
        SweepOutputs::spectrum_only(),
    )
    .map_err(CliError::validation)?;
    let result = run_sweep_checked(&plan)?;

    let mut table = Table::new(vec![
        "epsilon",
        "jbar",
        "n",
        "eigenvalue",
        "participation_ratio",
        "edge_weight",
        "anti_edge_weight",
        "dominant_sector",
        "sector_fraction",
    ]);
    for r in &result.spectrum {
        table.push(vec![
            Field::Float(r.epsilon),
            Field::Float(r.jbar / a.omega0),
            Field::Int(r.state_index as u64),
            Field::Float(r.eigenvalue / a.omega0),
            Field::Float(r.participation_ratio),
            Field::Float(r.edge_weight),
            Field::Float(r.anti_edge_weight),
            Field::Int(r.dominant_sector as u64),
            Field::Float(r.sector_fraction),
        ]);
    }
    let plot = spectrum_panels(&result, &axes, a.omega0, a.cut);
    Ok(Rendered {
        table,
        plot: Some(plot),
        config: chain_config("chain-spectrum", a, &axes),
    })
}

pub fn pr_map(a: &ChainArgs) -> Result<Rendered, CliError> {
    let axes = resolve_chain(a)?;
    let plan = SweepPlan::new(
        axes.template,
        axes.eps_values.clone(),
        axes.jbar_physical.clone(),
        SweepOutputs::spectrum_only(),
    )
    .map_err(CliError::validation)?;
    let result = run_sweep_checked(&plan)?;

    let mut table = Table::new(vec![
        "epsilon",
        "jbar",
        "n",
        "eigenvalue",
        "participation_ratio",
    ]);
    for r in &result.spectrum {
        table.push(vec![
            Field::Float(r.epsilon),
            Field::Float(r.jbar / a.omega0),
            Field::Int(r.state_index as u64),
            Field::Float(r.eigenvalue / a.omega0),
            Field::Float(r.participation_ratio),
        ]);
    }
    let plot = spectrum_panels(&result, &axes, a.omega0, a.cut);
    Ok(Rendered {
        table,
        plot: Some(plot),
        config: chain_config("pr-map", a, &axes),
    })
}

pub fn occupancy(a: &ChainArgs) -> Result<Rendered, CliError> {
    let axes = resolve_chain(a)?;
    let plan = SweepPlan::new(
        axes.template,
        axes.eps_values.clone(),
        axes.jbar_physical.clone(),
        SweepOutputs::occupancy_only(),
    )
    .map_err(CliError::validation)?;
    let result = run_sweep_checked(&plan)?;

    let mut table = Table::new(vec!["epsilon", "jbar", "mean_excitations", "vacuum_deficit"]);
    for r in &result.occupancy {
        table.push(vec![
            Field::Float(r.epsilon),
            Field::Float(r.jbar / a.omega0),
            Field::Float(r.mean_excitations),
            Field::Float(r.vacuum_deficit),
        ]);
    }
    let series = axes
        .jbar_physical
        .iter()
        .zip(&axes.jbar_ratios)
        .map(|(&phys, &ratio)| Series {
            label: format!("jbar = {ratio}"),
            points: result
                .occupancy
                .iter()
                .filter(|r| r.jbar == phys)
                .map(|r| (r.epsilon, r.mean_excitations / a.n as f64))
                .collect(),
        })
        .collect();
    let plot = Plot::Lines(LinePlot {
        title: "ground-state occupancy".into(),
        x_label: "ε".into(),
        y_label: "⟨N⟩/N".into(),
        series,
    });
    Ok(Rendered {
        table,
        plot: Some(plot),
        config: chain_config("occupancy", a, &axes),
    })
}

fn ket(mask: u32, n: usize) -> String {
    let mut s = String::with_capacity(n + 2);
    s.push('|');
    for site in 1..=n {
        s.push(if mask & (1 << (site - 1)) != 0 { '1' } else { '0' });
    }
    s.push('>');
    s
}

pub fn eigenstate_map(a: &PointArgs) -> Result<Rendered, CliError> {
    check_sites(a.n)?;
    let coupling =
        Coupling::from_dimerization(a.eps, a.jbar * a.omega0).map_err(CliError::validation)?;
    let spec = ChainSpec::new(a.n, a.omega0, coupling, a.rwa, a.boundary.to_model())
        .map_err(CliError::validation)?;
    let basis = build_basis(a.n).map_err(CliError::validation)?;
    let op = build_chain(&spec, &basis).map_err(CliError::runtime)?;
    let spectrum = diagonalize(&op).map_err(CliError::runtime)?;
    let map = fidelity_map(&spectrum, &basis).map_err(CliError::runtime)?;

    let mut table = Table::new(vec![
        "bare_mask",
        "bare_label",
        "bare_sector",
        "state_index",
        "probability",
    ]);
    for (r, bare) in map.rows().iter().enumerate() {
        for k in 0..map.n_cols() {
            table.push(vec![
                Field::Int(u64::from(bare.mask())),
                Field::Text(ket(bare.mask(), a.n)),
                Field::Int(bare.excitations() as u64),
                Field::Int((k + 1) as u64),
                Field::Float(map.cells()[(r, k)]),
            ]);
        }
    }
    let plot = Plot::Heatmap(HeatmapPlot {
        title: "bare-state weights across the eigenbasis".into(),
        x_label: "eigenstate index n".into(),
        y_label: "bare state".into(),
        row_labels: map.rows().iter().map(|b| ket(b.mask(), a.n)).collect(),
        cells: (0..map.n_rows())
            .map(|r| (0..map.n_cols()).map(|k| map.cells()[(r, k)]).collect())
            .collect(),
        color_label: "probability".into(),
    });
    let config = json!({
        "command": "eigenstate-map",
        "n": a.n,
        "omega0": a.omega0,
        "jbar_over_omega0": a.jbar,
        "eps": a.eps,
        "rwa": a.rwa,
        "boundary": a.boundary.as_str(),
    });
    Ok(Rendered {
        table,
        plot: Some(plot),
        config,
    })
}

pub fn dispersion_command(a: &DispersionArgs) -> Result<Rendered, CliError> {
    let coupling =
        Coupling::from_dimerization(a.eps, a.jbar * a.omega0).map_err(CliError::validation)?;
    let spec =
        DispersionSpec::new(a.omega0, coupling, a.points).map_err(CliError::validation)?;
    let bands = dispersion(&spec);
    let boundaries = bowtie_boundaries(a.eps, a.jbar * a.omega0, a.omega0)
        .map_err(CliError::validation)?;

    let mut table = Table::new(vec!["qd", "omega_lower", "omega_upper"]);
    for i in 0..bands.qd.len() {
        table.push(vec![
            Field::Float(bands.qd[i]),
            Field::Float(bands.lower[i] / a.omega0),
            Field::Float(bands.upper[i] / a.omega0),
        ]);
    }
    let series = vec![
        Series {
            label: "lower band".into(),
            points: bands
                .qd
                .iter()
                .zip(&bands.lower)
                .map(|(&q, &w)| (q, w / a.omega0))
                .collect(),
        },
        Series {
            label: "upper band".into(),
            points: bands
                .qd
                .iter()
                .zip(&bands.upper)
                .map(|(&q, &w)| (q, w / a.omega0))
                .collect(),
        },
    ];
    let plot = Plot::Lines(LinePlot {
        title: "continuum dispersion".into(),
        x_label: "qd".into(),
        y_label: "ω/ω₀".into(),
        series,
    });
    let config = json!({
        "command": "dispersion",
        "omega0": a.omega0,
        "jbar_over_omega0": a.jbar,
        "eps": a.eps,
        "momentum_points": a.points,
        "bowtie_over_omega0": boundaries.iter().map(|b| b / a.omega0).collect::<Vec<_>>(),
    });
    Ok(Rendered {
        table,
        plot: Some(plot),
        config,
    })
}

pub fn dimer_spectrum(a: &DimerSpectrumArgs) -> Result<Rendered, CliError> {
    let ratios = match a.j {
        Some(j) => vec![j],
        None => {
            if a.j_grid < 2 {
                return Err(CliError::validation(
                    "--j-grid needs at least 2 points; use --j for a single value",
                ));
            }
            if !a.j_max.is_finite() || a.j_max <= 0.0 {
                return Err(CliError::validation(format!(
                    "--j-max must be positive and finite, got {}",
                    a.j_max
                )));
            }
            linspace(0.0, a.j_max, a.j_grid)
        }
    };

    let mut ladders: Vec<Vec<f64>> = Vec::with_capacity(ratios.len());
    for &ratio in &ratios {
        let op = build_dimer(a.omega0, ratio * a.omega0, a.rwa).map_err(CliError::validation)?;
        let spectrum = diagonalize(&op).map_err(CliError::runtime)?;
        ladders.push(spectrum.eigenvalues().iter().map(|w| w / a.omega0).collect());
    }

    let single = a.j.is_some();
    let mut table = if single {
        Table::new(vec!["n", "eigenvalue"])
    } else {
        Table::new(vec!["j", "n", "eigenvalue"])
    };
    for (ratio, ladder) in ratios.iter().zip(&ladders) {
        for (k, w) in ladder.iter().enumerate() {
            let mut row = Vec::with_capacity(3);
            if !single {
                row.push(Field::Float(*ratio));
            }
            row.push(Field::Int((k + 1) as u64));
            row.push(Field::Float(*w));
            table.push(row);
        }
    }

    let series = (0..4)
        .map(|k| Series {
            label: format!("n = {}", k + 1),
            points: ratios
                .iter()
                .zip(&ladders)
                .map(|(&ratio, ladder)| (ratio, ladder[k]))
                .collect(),
        })
        .collect();
    let plot = Plot::Lines(LinePlot {
        title: "dimer spectrum".into(),
        x_label: "J/ω₀".into(),
        y_label: "ω/ω₀".into(),
        series,
    });
    let config = json!({
        "command": "dimer-spectrum",
        "omega0": a.omega0,
        "j_over_omega0": a.j,
        "j_max_over_omega0": if single { None } else { Some(a.j_max) },
        "j_points": ratios.len(),
        "rwa": a.rwa,
    });
    Ok(Rendered {
        table,
        plot: Some(plot),
        config,
    })
}

pub fn dimer_dynamics(a: &DimerDynamicsArgs) -> Result<Rendered, CliError> {
    let unit = TimeUnit::inverse_coupling(a.j * a.omega0).map_err(CliError::validation)?;
    let grid =
        TimeGrid::new(0.0, a.t_max, a.points, unit).map_err(CliError::validation)?;
    let series = dimer_mean_correlations(a.omega0, a.j * a.omega0, &grid)
        .map_err(CliError::validation)?;

    let mut table = Table::new(vec!["jt", "site1", "site2"]);
    for i in 0..grid.n_points() {
        table.push(vec![
            Field::Float(grid.value(i)),
            Field::Float(series.site1[i]),
            Field::Float(series.site2[i]),
        ]);
    }
    let to_points = |values: &[f64]| -> Vec<(f64, f64)> {
        (0..grid.n_points()).map(|i| (grid.value(i), values[i])).collect()
    };
    let plot = Plot::Lines(LinePlot {
        title: "dimer excitation exchange".into(),
        x_label: "Jt".into(),
        y_label: "⟨σ†σ⟩".into(),
        series: vec![
            Series {
                label: "site 1".into(),
                points: to_points(&series.site1),
            },
            Series {
                label: "site 2".into(),
                points: to_points(&series.site2),
            },
        ],
    });
    let config = json!({
        "command": "dimer-dynamics",
        "omega0": a.omega0,
        "j_over_omega0": a.j,
        "t_max_jt": a.t_max,
        "points": a.points,
    });
    Ok(Rendered {
        table,
        plot: Some(plot),
        config,
    })
}

/// Keys accepted at the top level of a sweep plan file.
const PLAN_KEYS: [&str; 7] = ["n", "omega0", "rwa", "boundary", "eps", "jbar", "outputs"];

fn plan_object(value: &Value) -> Result<&Map<String, Value>, CliError> {
    let object = value
        .as_object()
        .ok_or_else(|| CliError::validation("sweep plan must be a JSON object"))?;
    for key in object.keys() {
        if !PLAN_KEYS.contains(&key.as_str()) {
            return Err(CliError::validation(format!(
                "unknown plan key {key:?}; expected one of {PLAN_KEYS:?}"
            )));
        }
    }
    Ok(object)
}

fn plan_f64_array(value: &Value, key: &str) -> Result<Vec<f64>, CliError> {
    value
        .as_array()
        .ok_or_else(|| CliError::validation(format!("plan key {key:?} must be an array")))?
        .iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| CliError::validation(format!("plan key {key:?} holds a non-number")))
        })
        .collect()
}

pub fn sweep_command(a: &SweepArgs) -> Result<Vec<(PathBuf, Rendered)>, CliError> {
    let text = std::fs::read_to_string(&a.plan)
        .map_err(|e| CliError::runtime(format!("reading {}: {e}", a.plan.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("parsing {}: {e}", a.plan.display())))?;
    let plan_json = plan_object(&value)?;

    let n = plan_json
        .get("n")
        .ok_or_else(|| CliError::validation("sweep plan misses required key \"n\""))?
        .as_u64()
        .ok_or_else(|| CliError::validation("plan key \"n\" must be a positive integer"))?
        as usize;
    check_sites(n)?;
    let omega0 = match plan_json.get("omega0") {
        Some(v) => v
            .as_f64()
            .ok_or_else(|| CliError::validation("plan key \"omega0\" must be a number"))?,
        None => 1.0,
    };
    let rwa = match plan_json.get("rwa") {
        Some(v) => v
            .as_bool()
            .ok_or_else(|| CliError::validation("plan key \"rwa\" must be a boolean"))?,
        None => false,
    };
    let boundary = match plan_json.get("boundary").and_then(Value::as_str) {
        None => Boundary::Open,
        Some("open") => Boundary::Open,
        Some("periodic") => Boundary::Periodic,
        Some(other) => {
            return Err(CliError::validation(format!(
                "plan key \"boundary\" must be \"open\" or \"periodic\", got {other:?}"
            )))
        }
    };
    let eps_values = match plan_json.get("eps") {
        None => usctopo::sweep::default_eps_grid(),
        Some(Value::Array(_)) => plan_f64_array(&plan_json["eps"], "eps")?,
        Some(Value::Object(o)) => {
            let grid = o
                .get("grid")
                .and_then(Value::as_u64)
                .ok_or_else(|| CliError::validation("plan key \"eps\" object needs \"grid\": <int>"))?;
            if grid < 2 {
                return Err(CliError::validation("plan eps grid needs at least 2 points"));
            }
            linspace(-1.0, 1.0, grid as usize)
        }
        Some(_) => {
            return Err(CliError::validation(
                "plan key \"eps\" must be an array of values or {\"grid\": <int>}",
            ))
        }
    };
    let jbar_ratios = match plan_json.get("jbar") {
        None => vec![0.1, 0.3, 0.5],
        Some(v) => plan_f64_array(v, "jbar")?,
    };
    let outputs = match plan_json.get("outputs") {
        None => SweepOutputs::spectrum_only(),
        Some(v) => {
            let names = v
                .as_array()
                .ok_or_else(|| CliError::validation("plan key \"outputs\" must be an array"))?;
            let mut outputs = SweepOutputs {
                spectrum: false,
                occupancy: false,
                fidelity: false,
            };
            for name in names {
                match name.as_str() {
                    Some("spectrum") => outputs.spectrum = true,
                    Some("occupancy") => outputs.occupancy = true,
                    Some("fidelity") => outputs.fidelity = true,
                    _ => {
                        return Err(CliError::validation(format!(
                            "unknown output {name}; expected \"spectrum\", \"occupancy\", or \"fidelity\""
                        )))
                    }
                }
            }
            if !(outputs.spectrum || outputs.occupancy || outputs.fidelity) {
                return Err(CliError::validation("plan requests no outputs"));
            }
            outputs
        }
    };

    let template = ChainSpec::new(n, omega0, placeholder_coupling(), rwa, boundary)
        .map_err(CliError::validation)?;
    let jbar_physical: Vec<f64> = jbar_ratios.iter().map(|r| r * omega0).collect();
    let plan = SweepPlan::new(template, eps_values.clone(), jbar_physical, outputs)
        .map_err(CliError::validation)?;
    let result = run_sweep_checked(&plan)?;

    let config = |records: &str| {
        json!({
            "command": "sweep",
            "plan_file": a.plan.display().to_string(),
            "records": records,
            "n": n,
            "omega0": omega0,
            "rwa": rwa,
            "boundary": match boundary { Boundary::Open => "open", Boundary::Periodic => "periodic" },
            "eps_points": eps_values.len(),
            "jbar_over_omega0": jbar_ratios,
        })
    };

    let mut files: Vec<(PathBuf, Rendered)> = Vec::new();
    if outputs.spectrum {
        let mut table = Table::new(vec![
            "epsilon",
            "jbar",
            "n",
            "eigenvalue",
            "participation_ratio",
            "edge_weight",
            "anti_edge_weight",
            "dominant_sector",
            "sector_fraction",
        ]);
        for r in &result.spectrum {
            table.push(vec![
                Field::Float(r.epsilon),
                Field::Float(r.jbar / omega0),
                Field::Int(r.state_index as u64),
                Field::Float(r.eigenvalue / omega0),
                Field::Float(r.participation_ratio),
                Field::Float(r.edge_weight),
                Field::Float(r.anti_edge_weight),
                Field::Int(r.dominant_sector as u64),
                Field::Float(r.sector_fraction),
            ]);
        }
        files.push((
            a.out.clone(),
            Rendered {
                table,
                plot: None,
                config: config("spectrum"),
            },
        ));
    }
    if outputs.occupancy {
        let mut table =
            Table::new(vec!["epsilon", "jbar", "mean_excitations", "vacuum_deficit"]);
        for r in &result.occupancy {
            table.push(vec![
                Field::Float(r.epsilon),
                Field::Float(r.jbar / omega0),
                Field::Float(r.mean_excitations),
                Field::Float(r.vacuum_deficit),
            ]);
        }
        files.push((
            derived_path(&a.out, "occupancy", !files.is_empty())?,
            Rendered {
                table,
                plot: None,
                config: config("occupancy"),
            },
        ));
    }
    if outputs.fidelity {
        let mut table = Table::new(vec![
            "epsilon",
            "jbar",
            "bare_mask",
            "bare_sector",
            "state_index",
            "probability",
        ]);
        for r in &result.fidelity {
            table.push(vec![
                Field::Float(r.epsilon),
                Field::Float(r.jbar / omega0),
                Field::Int(u64::from(r.bare_mask)),
                Field::Int(r.bare_sector as u64),
                Field::Int(r.state_index as u64),
                Field::Float(r.probability),
            ]);
        }
        files.push((
            derived_path(&a.out, "fidelity", !files.is_empty())?,
            Rendered {
                table,
                plot: None,
                config: config("fidelity"),
            },
        ));
    }
    Ok(files)
}

/// Sibling path for a secondary record family: `out.csv` becomes
/// `out.<kind>.csv`. The primary family keeps `--out` itself.
fn derived_path(out: &Path, kind: &str, taken: bool) -> Result<PathBuf, CliError> {
    if !taken {
        return Ok(out.to_path_buf());
    }
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CliError::validation("output path must name a file"))?;
    let ext = out.extension().and_then(|e| e.to_str()).unwrap_or("csv");
    Ok(out.with_file_name(format!("{stem}.{kind}.{ext}")))
}

/// The analytic-oracle self-test behind `--seed-check`: a fixed-seed batch
/// of random dimers, each compared against the closed-form eigensystem.
pub fn seed_check() -> Result<Value, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c8ec);
    for draw in 0..50 {
        let omega0: f64 = rng.gen_range(0.5..2.0);
        let j: f64 = rng.gen_range(0.0..5.0) * omega0;
        let op = build_dimer(omega0, j, false).map_err(CliError::runtime)?;
        let spectrum = diagonalize(&op).map_err(CliError::runtime)?;
        let exact = usctopo::spectra::dimer_exact(omega0, j).map_err(CliError::runtime)?;
        for k in 0..4 {
            let dw = (spectrum.eigenvalues()[k] - exact.eigenvalues()[k]).abs();
            if dw > 1e-12 {
                return Err(CliError::runtime(format!(
                    "seed check failed at draw {draw}: eigenvalue {k} off by {dw}"
                )));
            }
            let numeric = spectrum.eigenvector(k);
            let reference = exact.eigenvector(k);
            let sign = if numeric.dot(&reference) >= 0.0 { 1.0 } else { -1.0 };
            let dv = (0..4)
                .map(|i| (numeric[i] - sign * reference[i]).abs())
                .fold(0.0f64, f64::max);
            if dv > 1e-10 {
                return Err(CliError::runtime(format!(
                    "seed check failed at draw {draw}: eigenvector {k} off by {dv}"
                )));
            }
        }
    }
    Ok(json!({
        "seed_check": "ok",
        "draws": 50,
        "eigenvalue_tolerance": 1e-12,
        "eigenvector_tolerance": 1e-10,
    }))
}
