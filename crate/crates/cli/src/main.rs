//! Batch front end for the `usctopo` library: each subcommand resolves its
//! flags into model parameters, runs the corresponding computation, and
//! writes one table (CSV or JSON) or plot (SVG) per output path, plus a
//! `<path>.meta.json` sidecar recording the resolved configuration.

mod args;
mod commands;
mod error;
mod svg;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde_json::json;

use args::{resolve_format, Cli, Command, FormatArg};
use commands::Rendered;
use error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_stderr_line());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.seed_check {
        if cli.command.is_some() {
            return Err(CliError::validation(
                "--seed-check runs alone; drop the subcommand",
            ));
        }
        let report = commands::seed_check()?;
        println!("{report}");
        return Ok(());
    }
    let command = cli.command.as_ref().ok_or_else(|| {
        CliError::validation("missing subcommand; see --help for the list")
    })?;
    match command {
        Command::DimerSpectrum(a) => emit(&a.out, a.format, &commands::dimer_spectrum(a)?),
        Command::DimerDynamics(a) => emit(&a.out, a.format, &commands::dimer_dynamics(a)?),
        Command::ChainSpectrum(a) => emit(&a.out, a.format, &commands::chain_spectrum(a)?),
        Command::EigenstateMap(a) => emit(&a.out, a.format, &commands::eigenstate_map(a)?),
        Command::PrMap(a) => emit(&a.out, a.format, &commands::pr_map(a)?),
        Command::Occupancy(a) => emit(&a.out, a.format, &commands::occupancy(a)?),
        Command::Dispersion(a) => emit(&a.out, a.format, &commands::dispersion_command(a)?),
        Command::Sweep(a) => {
            if a.format == Some(FormatArg::Svg) {
                return Err(CliError::validation(
                    "sweep emits record tables only; use csv or json",
                ));
            }
            for (path, rendered) in commands::sweep_command(a)? {
                emit(&path, a.format, &rendered)?;
            }
            Ok(())
        }
    }
}

/// Write one rendered result to `out` in the resolved format, then its
/// metadata sidecar. Output bodies carry no timestamps, so repeated runs
/// with the same flags are byte-identical; the timestamp lives in the
/// sidecar only.
fn emit(out: &Path, format: Option<FormatArg>, rendered: &Rendered) -> Result<(), CliError> {
    let format = resolve_format(format, out);
    let context = |e: std::io::Error| CliError::runtime(format!("writing {}: {e}", out.display()));
    match format {
        FormatArg::Csv => {
            let file = File::create(out).map_err(context)?;
            let mut writer = BufWriter::new(file);
            rendered.table.write_csv(&mut writer).map_err(context)?;
            writer.flush().map_err(context)?;
        }
        FormatArg::Json => {
            let file = File::create(out).map_err(context)?;
            let mut writer = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut writer, &rendered.table.to_json())
                .map_err(|e| CliError::runtime(format!("writing {}: {e}", out.display())))?;
            writer.write_all(b"\n").map_err(context)?;
            writer.flush().map_err(context)?;
        }
        FormatArg::Svg => {
            let plot = rendered.plot.as_ref().ok_or_else(|| {
                CliError::validation("this output has no plot view; use csv or json")
            })?;
            std::fs::write(out, svg::render(plot)).map_err(context)?;
        }
    }
    write_sidecar(out, format, rendered)
}

fn write_sidecar(out: &Path, format: FormatArg, rendered: &Rendered) -> Result<(), CliError> {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "config": rendered.config,
        "out": out.display().to_string(),
        "format": format.as_str(),
        "rows": rendered.table.n_rows(),
        "library_version": usctopo::VERSION,
        "cli_version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix": timestamp,
    });
    let path = PathBuf::from(format!("{}.meta.json", out.display()));
    let body = format!("{:#}\n", meta);
    std::fs::write(&path, body)
        .map_err(|e| CliError::runtime(format!("writing {}: {e}", path.display())))
}
