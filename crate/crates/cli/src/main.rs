//! `rhombic`: check, build, optimize and draw rhombic embeddings of quad
//! meshes.
//!
//! Exit status is 0 on a positive result, 1 when the answer is negative
//! (not embeddable, not converged, invalid embedding) and 2 when the input
//! could not be processed.

mod commands;
mod render;
mod report;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rhombic::OptimizeOptions;

use commands::{Output, ThetaSource};
use render::RenderOptions;
use report::{sha256_hex, RunReport};

#[derive(Parser, Debug)]
#[command(name = "rhombic", version, about = "Rhombic embeddings of quad meshes")]
struct Cli {
    /// Seed for every random choice (random optimizer start).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Criticality tolerance for the optimizer.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Add wall time to the report. Off by default so output is reproducible.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a mesh has a rhombic embedding.
    Check { mesh: PathBuf },
    /// List train tracks, crossing numbers and the crossing digraph.
    Tracks { mesh: PathBuf },
    /// Build and validate a rhombic embedding.
    Embed {
        mesh: PathBuf,
        /// JSON object mapping track ids to transversal angles in radians.
        #[arg(long, conflicts_with_all = ["chord", "default"])]
        theta: Option<PathBuf>,
        /// Boundary-chord angles (planar meshes).
        #[arg(long, conflicts_with = "default")]
        chord: bool,
        /// Homology-derived angles (torus meshes).
        #[arg(long)]
        default: bool,
    },
    /// Maximize the area of a torus embedding.
    Optimize {
        mesh: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        /// Write the accepted iterates as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Enumerate extreme points of the embedding space.
    Extremes {
        mesh: PathBuf,
        /// Label the quotient digraph of a torus mesh with +, - and 0.
        #[arg(long)]
        periodic: bool,
        /// Also emit height functions based at this vertex.
        #[arg(long, value_name = "BASE")]
        heights: Option<usize>,
    },
    /// Diamond graph of a planar map.
    Diamond {
        map: PathBuf,
        /// Also embed the diamond and read off the isoradial primal.
        #[arg(long)]
        isoradial: bool,
    },
    /// Draw an embedding produced by `embed` as SVG.
    Render {
        embedding: PathBuf,
        /// Pixels per unit edge length.
        #[arg(long, default_value_t = 40.0)]
        scale: f64,
        /// Fill faces, colored by their pair of tracks.
        #[arg(long)]
        faces: bool,
    },
    /// check, embed, validate and optionally optimize in one report.
    Pipeline {
        mesh: PathBuf,
        #[arg(long)]
        optimize: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Tracks { .. } => "tracks",
            Command::Embed { .. } => "embed",
            Command::Optimize { .. } => "optimize",
            Command::Extremes { .. } => "extremes",
            Command::Diamond { .. } => "diamond",
            Command::Render { .. } => "render",
            Command::Pipeline { .. } => "pipeline",
        }
    }

    fn input(&self) -> &Path {
        match self {
            Command::Check { mesh }
            | Command::Tracks { mesh }
            | Command::Embed { mesh, .. }
            | Command::Optimize { mesh, .. }
            | Command::Extremes { mesh, .. }
            | Command::Pipeline { mesh, .. } => mesh,
            Command::Diamond { map, .. } => map,
            Command::Render { embedding, .. } => embedding,
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let path = cli.command.input();
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let svg = cli.format == Format::Svg;
    if svg && !matches!(cli.command, Command::Embed { .. } | Command::Render { .. }) {
        bail!("--format svg is only available for embed and render");
    }
    if !(cli.tol > 0.0) {
        bail!("--tol must be positive");
    }
    let opts = |max_iter| OptimizeOptions {
        tol: cli.tol,
        max_iter,
        ..OptimizeOptions::default()
    };

    let clock = Instant::now();
    let outcome = match &cli.command {
        Command::Check { .. } => commands::check(&text)?,
        Command::Tracks { .. } => commands::tracks(&text)?,
        Command::Embed {
            theta,
            chord,
            default,
            ..
        } => {
            let source = match (chord, default) {
                (true, _) => ThetaSource::Chord,
                (_, true) => ThetaSource::Default,
                _ => ThetaSource::Auto,
            };
            commands::embed(&text, theta.as_deref(), source, svg)?
        }
        Command::Optimize { max_iter, trace, .. } => {
            commands::optimize(&text, cli.seed, &opts(*max_iter), trace.as_deref())?
        }
        Command::Extremes { periodic, heights, .. } => commands::extremes(&text, *periodic, *heights)?,
        Command::Diamond { isoradial, .. } => commands::diamond(&text, *isoradial)?,
        Command::Render { scale, faces, .. } => {
            if !(*scale > 0.0) {
                bail!("--scale must be positive");
            }
            commands::render(&text, &RenderOptions { scale: *scale, faces: *faces })?
        }
        Command::Pipeline { optimize, .. } => {
            commands::pipeline(&text, cli.seed, &opts(100_000), *optimize)?
        }
    };
    let elapsed = clock.elapsed();

    let rendered = match outcome.output {
        Output::Svg(s) => s,
        Output::Json(result) => {
            let report = RunReport {
                command: cli.command.name(),
                version: env!("CARGO_PKG_VERSION"),
                input_sha256: sha256_hex(&bytes),
                seed: cli.seed,
                result,
                wall_time_ms: cli.timing.then_some(elapsed.as_secs_f64() * 1e3),
            };
            serde_json::to_string_pretty(&report)? + "\n"
        }
    };
    match &cli.output {
        Some(p) => fs::write(p, rendered).with_context(|| format!("cannot write {}", p.display()))?,
        None => std::io::stdout().write_all(rendered.as_bytes())?,
    }
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
