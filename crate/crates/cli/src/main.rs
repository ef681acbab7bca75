//! `crooked`: disjointness checks, foliation synthesis and OBJ export for
//! crooked planes.
//!
//! Results go to stdout as JSON; failures go to stderr as a one-line JSON
//! object and are reflected in the exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{debug, info, LevelFilter};
use serde_json::json;

use crooked_core::disjoint::DISJOINT_TOL;
use crooked_core::io::{export_obj, parse_foliation, parse_scene};
use crooked_core::{
    build_foliation, crooked_disjoint, crooked_intersect_oracle, mesh_crooked_plane, validate_foliation, CrookedPlane,
    Error, FoliationFile, FormatError, SolverOptions,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_NO_FOLIATION: u8 = 4;

#[derive(Parser)]
#[command(name = "crooked", version, about = "Crooked planes in Minkowski 3-space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the first two planes of a scene are disjoint.
    Check {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value_t = DISJOINT_TOL)]
        tol: f64,
    },
    /// Build and validate a foliation between planes 0 and 1.
    Foliate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long = "n-max", default_value_t = 60)]
        n_max: u32,
    },
    /// Export every sampled leaf of a foliation file as OBJ.
    Mesh {
        #[arg(long)]
        foliation: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
        #[arg(long, default_value_t = 32)]
        resolution: usize,
    },
    /// Search for an intersection point by brute-force mesh overlap.
    Oracle {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value_t = 20.0)]
        radius: f64,
        #[arg(long, default_value_t = 128)]
        resolution: usize,
    },
}

/// A failure with its exit code and the name reported on stderr.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Failure { code, kind, message: message.into() }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        let code = match e {
            FormatError::Io(_) => EXIT_FAILURE,
            _ => EXIT_INPUT,
        };
        Failure::new(code, e.kind(), e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match e {
            Error::Infeasible { .. } => (EXIT_NO_FOLIATION, "Infeasible"),
            Error::NotDisjoint => (EXIT_NO_FOLIATION, "NotDisjoint"),
            Error::DegenerateCase => (EXIT_NO_FOLIATION, "DegenerateCase"),
            Error::InvalidParams(_) => (EXIT_INPUT, "InvalidParams"),
            _ => (EXIT_FAILURE, "KernelError"),
        };
        Failure::new(code, kind, e.to_string())
    }
}

fn init_logging() {
    let level = match std::env::var("CROOKED_LOG").as_deref() {
        Ok("debug") => LevelFilter::Debug,
        Ok("info") => LevelFilter::Info,
        _ => LevelFilter::Off,
    };
    env_logger::Builder::new().filter_level(level).target(env_logger::Target::Stderr).init();
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(EXIT_FAILURE, "IoError", format!("{}: {e}", path.display())))
}

/// The first two planes of a scene file.
fn scene_pair(path: &Path) -> Result<(CrookedPlane, CrookedPlane), Failure> {
    let scene = parse_scene(&read(path)?)?;
    if scene.planes.len() < 2 {
        return Err(Failure::new(
            EXIT_INPUT,
            "SchemaError",
            format!("scene needs at least two planes, found {}", scene.planes.len()),
        ));
    }
    let planes = scene.crooked_planes()?;
    Ok((planes[0], planes[1]))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Check { scene, tol } => {
            let (p, q) = scene_pair(&scene)?;
            let verdict = crooked_disjoint(&p, &q, tol);
            println!("{}", json!({ "verdict": verdict.as_str() }));
        }
        Command::Foliate { scene, out, samples, tol, n_max } => {
            let (p, q) = scene_pair(&scene)?;
            let opts = SolverOptions { solver_tol: tol, n_max, ..SolverOptions::default() };
            let fol = build_foliation(&p, &q, &opts)?;
            let basis = fol.curve().basis();
            info!("solver: n = {}, residual = {:e}", basis.n, fol.solver_residual());
            let report = validate_foliation(&fol, samples);
            debug!("validation: {report:?}");
            if !report.passed() {
                return Err(Failure::new(
                    EXIT_VALIDATION,
                    "ValidationFailure",
                    format!(
                        "{} of {} pairs failed, {} derivative violations, endpoint residual {:e}",
                        report.failures.len(),
                        report.pairwise_disjoint_pairs,
                        report.derivative_cone_violations.len(),
                        report.endpoint_residual
                    ),
                ));
            }
            FoliationFile::from_foliation(&fol, samples)?.write(&out)?;
            println!(
                "{}",
                json!({
                    "status": "ok",
                    "samples": samples.max(2),
                    "pairs_checked": report.pairwise_disjoint_pairs,
                    "n": basis.n,
                    "residual": fol.solver_residual(),
                })
            );
        }
        Command::Mesh { foliation, out, radius, resolution } => {
            let file = parse_foliation(&read(&foliation)?)?;
            let meshes = file
                .samples
                .iter()
                .map(|s| Ok(mesh_crooked_plane(&s.plane()?, radius, resolution)?))
                .collect::<Result<Vec<_>, Failure>>()?;
            let files = export_obj(&meshes, &out)?;
            info!("wrote {} OBJ files to {}", files.len(), out.display());
            let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
            println!("{}", json!({ "files": names }));
        }
        Command::Oracle { scene, radius, resolution } => {
            let (p, q) = scene_pair(&scene)?;
            if radius.is_nan() || radius <= 0.0 || resolution < 2 {
                return Err(Failure::new(EXIT_INPUT, "InvalidParams", "radius must be positive and resolution at least 2"));
            }
            let witness = crooked_intersect_oracle(&p, &q, radius, resolution);
            println!("{}", json!({ "witness": witness }));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}
