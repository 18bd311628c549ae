//! `systole-lab`: batch front-end for spectral-geometry experiments.

mod commands;
mod docs;
mod error;
mod manifest;
mod output;
mod plot;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::{Failure, Outcome, EXIT_VIOLATED};
use output::OutDir;

#[derive(Parser, Debug)]
#[command(name = "systole-lab", version, about = "Dirichlet eigenvalues, systoles and their inequalities on meshed surfaces")]
struct Cli {
    /// Worker threads; `SYSTOLE_LAB_JOBS` takes precedence.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SceneArgs {
    /// Scene JSON file.
    #[arg(long)]
    scene: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "systole-lab-out")]
    out: PathBuf,
    /// Eigensolver tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First Dirichlet eigenvalue over successive mesh refinements.
    Spectrum {
        #[command(flatten)]
        scene: SceneArgs,
        /// Number of resolutions, each doubling the previous one.
        #[arg(long, default_value_t = 1)]
        refinements: usize,
    },
    /// Shortest essential loop of a closed surface.
    Systole {
        #[command(flatten)]
        scene: SceneArgs,
    },
    /// Upper bound for the analytic systole from candidate subsurfaces.
    Lambda {
        #[command(flatten)]
        scene: SceneArgs,
    },
    /// Chains of the cyclic cover cut along the shortest loop.
    Cover {
        #[command(flatten)]
        scene: SceneArgs,
        /// Largest number of sheets is `2^refinements`.
        #[arg(long, default_value_t = 3)]
        refinements: usize,
    },
    /// Runs every experiment of a manifest and writes the report bundle.
    Verify {
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory; defaults to the manifest's.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the manifest seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// SVG charts of result files.
    Plot {
        /// Result JSON files written by the other commands.
        results: Vec<PathBuf>,
        #[arg(long, default_value = "systole-lab-out")]
        out: PathBuf,
    },
}

fn jobs(flag: Option<usize>) -> Outcome<Option<usize>> {
    match std::env::var("SYSTOLE_LAB_JOBS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Failure::input(format!("SYSTOLE_LAB_JOBS must be a positive integer, got {v:?}"))),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli) -> Outcome<bool> {
    if let Some(n) = jobs(cli.jobs)? {
        if n == 0 {
            return Err(Failure::input("the number of jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Solver(e.into()))?;
    }
    match cli.command {
        Command::Spectrum { scene, refinements } => commands::spectrum(&scene.scene, refinements, scene.tol, &OutDir::new(&scene.out))?,
        Command::Systole { scene } => commands::systole(&scene.scene, &OutDir::new(&scene.out))?,
        Command::Lambda { scene } => commands::lambda(&scene.scene, scene.tol, &OutDir::new(&scene.out))?,
        Command::Cover { scene, refinements } => commands::cover(&scene.scene, refinements, scene.tol, &OutDir::new(&scene.out))?,
        Command::Verify { manifest, out, seed } => return commands::verify(&manifest, seed, out.as_deref()),
        Command::Plot { results, out } => commands::plot(&results, &OutDir::new(&out))?,
    }
    Ok(false)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_VIOLATED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
