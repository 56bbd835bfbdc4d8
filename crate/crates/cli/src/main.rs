use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use snowlab_core::driver::{self, AnalyzeOptions, Suite};
use snowlab_core::subdivision::{BaseKind, DEFAULT_MAX_LEVEL};
use snowlab_core::{Error, Result};

/// Circle packings, walks and capacities on subdivision graphs.
#[derive(Parser)]
#[command(name = "snowlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a level graph and its complex sidecar.
    Generate {
        #[arg(long)]
        kind: BaseKind,
        #[arg(long)]
        level: u32,
        /// Allow levels past the resource guard.
        #[arg(long)]
        unsafe_level: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Circle-pack a graph (barycenter-triangulating it when needed).
    Pack {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = snowlab_core::packing::DEFAULT_TOL)]
        tol: f64,
        /// Also write packing.svg.
        #[arg(long)]
        svg: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run analysis suites and write CSV reports.
    Analyze {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        packing: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated radii; defaults to dyadic radii up to half the eccentricity.
        #[arg(long)]
        radii: Option<String>,
        /// Center vertex; defaults to the sidecar's base point.
        #[arg(long)]
        center: Option<usize>,
        #[arg(long, default_value_t = driver::DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = driver::DEFAULT_HEAT_STEPS)]
        heat_steps: usize,
        /// Write the final heat-kernel distribution as heat_kernel.bin.
        #[arg(long)]
        dump: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Rerun a manifest and compare output bytes.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<()> {
    let summary = match cli.command {
        Command::Generate {
            kind,
            level,
            unsafe_level,
            out,
        } => {
            let max_level = if unsafe_level { level.max(DEFAULT_MAX_LEVEL) } else { DEFAULT_MAX_LEVEL };
            driver::generate(kind, level, max_level, &out)?
        }
        Command::Pack { graph, tol, svg, out } => driver::pack(&graph, tol, svg, &out)?,
        Command::Analyze {
            graph,
            packing,
            suite,
            seed,
            radii,
            center,
            trials,
            heat_steps,
            dump,
            out,
        } => {
            let opts = AnalyzeOptions {
                suite,
                seed,
                radii: radii.as_deref().map(driver::parse_radii).transpose()?,
                center,
                trials,
                heat_steps,
                dump,
            };
            driver::analyze(&graph, packing.as_deref(), &opts, &out)?
        }
        Command::Replay { manifest, out } => {
            let report = driver::replay(&manifest, &out)?;
            if !report.mismatched.is_empty() {
                return Err(Error::invalid(format!("outputs differ: {}", report.mismatched.join(", "))));
            }
            println!("replay reproduced every output; manifest {}", report.manifest_path.display());
            return Ok(());
        }
    };
    for line in &summary.lines {
        println!("{line}");
    }
    println!("manifest {} (run {})", summary.manifest_path.display(), summary.manifest.run_hash());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("snowlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
