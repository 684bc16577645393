//! Command-line front end: runs simulations, experiments, spectra, ratio
//! curves, sweeps, and scaling fits, writing JSON or CSV artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use starwalk::error::{Error, Result};
use starwalk::experiments::{
    metadata_json, ratio_csv, ratio_curve, run_path_experiment, run_simulation, scaling_fit, sweep,
    sweep_csv, ExperimentConfig, SweepConfig,
};
use starwalk::graph::{build_three_star, GraphFamily};
use starwalk::reduced::{derive_reduced_matrix, three_star_basis};
use starwalk::spectral::exact_spectrum;

#[derive(Parser)]
#[command(
    name = "starwalk",
    version,
    about = "Quantum-walk transport on chains of star graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the canonical initial state a fixed number of steps and dump
    /// the full probability read-out as JSON.
    Simulate {
        /// Number of stars in the chain: 2 or 3.
        #[arg(long)]
        stars: usize,
        /// Prongs per star (N).
        #[arg(long)]
        prongs: usize,
        /// Shared vertices per junction plus one (m); three-star only.
        #[arg(long)]
        shared: Option<usize>,
        /// Steps to evolve; odd counts are permitted.
        #[arg(long)]
        steps: usize,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a localization experiment and write the report as JSON.
    Experiment {
        #[arg(long)]
        stars: usize,
        #[arg(long)]
        prongs: usize,
        #[arg(long)]
        shared: Option<usize>,
        /// Even cap on evolved steps; defaults to twice the predicted step.
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive the three-star reduced matrix and write its spectrum as JSON.
    Spectrum {
        #[arg(long)]
        prongs: usize,
        #[arg(long)]
        shared: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure the path-state ratio across a sharing range; CSV output.
    RatioCurve {
        #[arg(long)]
        prongs: usize,
        /// Inclusive sharing range, written a:b.
        #[arg(long, value_parser = parse_range)]
        shared_range: (usize, usize),
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every (prongs, shared) cell of a grid; CSV output.
    Sweep {
        #[arg(long)]
        stars: usize,
        /// Comma-separated prong counts.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        prongs_list: Vec<usize>,
        /// Comma-separated sharing parameters; three-star only.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        shared_list: Option<Vec<usize>>,
        /// Worker threads; defaults to the global pool.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the growth exponent of the optimal step across sizes; JSON.
    Scaling {
        #[arg(long)]
        stars: usize,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        prongs_list: Vec<usize>,
        #[arg(long)]
        shared: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected a:b, got {s}"))?;
    let lo = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

fn family_of(stars: usize) -> Result<GraphFamily> {
    match stars {
        2 => Ok(GraphFamily::TwoStar),
        3 => Ok(GraphFamily::ThreeStar),
        other => Err(Error::invalid(format!(
            "--stars must be 2 or 3, got {other}"
        ))),
    }
}

fn write_json(path: &Path, metadata: serde_json::Value, report: impl Serialize) -> Result<()> {
    let document = json!({ "metadata": metadata, "report": report });
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, &document)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

fn write_text(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            stars,
            prongs,
            shared,
            steps,
            out,
        } => {
            let family = family_of(stars)?;
            let dump = run_simulation(family, prongs, shared, steps)?;
            let meta = metadata_json(
                "simulate",
                json!({ "stars": stars, "prongs": prongs, "shared": shared, "steps": steps }),
            );
            write_json(&out, meta, dump)
        }
        Command::Experiment {
            stars,
            prongs,
            shared,
            max_steps,
            out,
        } => {
            let family = family_of(stars)?;
            let config = ExperimentConfig {
                family,
                prongs,
                shared,
                max_steps,
            };
            let report = run_path_experiment(&config)?;
            let meta = metadata_json(
                "experiment",
                json!({
                    "stars": stars,
                    "prongs": prongs,
                    "shared": shared,
                    "max_steps": max_steps,
                }),
            );
            write_json(&out, meta, report)
        }
        Command::Spectrum {
            prongs,
            shared,
            out,
        } => {
            let graph = build_three_star(prongs, shared)?;
            let basis = three_star_basis(&graph)?;
            let model = derive_reduced_matrix(&graph, &basis)?;
            let report = exact_spectrum(&model)?;
            let meta = metadata_json("spectrum", json!({ "prongs": prongs, "shared": shared }));
            write_json(&out, meta, report)
        }
        Command::RatioCurve {
            prongs,
            shared_range,
            out,
        } => {
            let points = ratio_curve(prongs, shared_range)?;
            write_text(&out, &ratio_csv(prongs, shared_range, &points))
        }
        Command::Sweep {
            stars,
            prongs_list,
            shared_list,
            jobs,
            out,
        } => {
            let config = SweepConfig {
                family: family_of(stars)?,
                prongs_list,
                shared_list: shared_list.unwrap_or_default(),
                jobs,
            };
            let rows = sweep(&config)?;
            write_text(&out, &sweep_csv(&config, &rows))
        }
        Command::Scaling {
            stars,
            prongs_list,
            shared,
            out,
        } => {
            let family = family_of(stars)?;
            let fit = scaling_fit(family, &prongs_list, shared)?;
            let meta = metadata_json(
                "scaling",
                json!({ "stars": stars, "prongs_list": prongs_list, "shared": shared }),
            );
            write_json(&out, meta, fit)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(cli) {
        Ok(()) => {
            eprintln!("done in {:.2?}", started.elapsed());
        }
        Err(error) => {
            eprintln!("error: {error}");
            std::process::exit(error.exit_code().into());
        }
    }
}
