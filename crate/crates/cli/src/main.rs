//! `motionscene` command-line tool.
//!
//! File-based subcommands run locally. `serve` starts the HTTP service and
//! `remote` drives a running one.

mod failure;
mod offline;
mod remote;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "motionscene", version, about = "Sphere-and-envelope motion scenes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a scene document from a track file and a pose file.
    Curate(offline::CurateArgs),
    /// Motion score of one or more clips, each a directory of flow files.
    Score(offline::ScoreArgs),
    /// Drop low-motion clips from a score manifest.
    Filter(offline::FilterArgs),
    /// Render the sphere and envelope layers of a scene.
    Render(offline::RenderArgs),
    /// Generate a camera move as a pose file.
    Camgen(offline::CamgenArgs),
    /// Keep a seeded random subset of salient or fast spheres.
    Sparsify(offline::SparsifyArgs),
    /// Add a sphere from a drawn 2D or 3D trajectory.
    Lift(offline::LiftArgs),
    /// Move a scene's object motion onto another image.
    Transfer(offline::TransferArgs),
    /// Apply masked edits to a scene.
    Edit(offline::EditArgs),
    /// Camera rotation and translation error between two pose files.
    EvalCam(offline::EvalCamArgs),
    /// Start the HTTP service.
    Serve(ServeArgs),
    /// Talk to a running service.
    Remote(remote::RemoteArgs),
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Listen port.
    #[arg(long, env = motionscene_service::PORT_ENV, default_value_t = motionscene_service::DEFAULT_PORT)]
    port: u16,
    /// Listen address.
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
}

fn serve(args: ServeArgs) -> Result<(), Failure> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .init();
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port)).await?;
        motionscene_service::serve(listener).await
    })?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Curate(a) => offline::curate(a),
        Command::Score(a) => offline::score(a),
        Command::Filter(a) => offline::filter(a),
        Command::Render(a) => offline::render(a),
        Command::Camgen(a) => offline::camgen(a),
        Command::Sparsify(a) => offline::sparsify(a),
        Command::Lift(a) => offline::lift(a),
        Command::Transfer(a) => offline::transfer(a),
        Command::Edit(a) => offline::edit(a),
        Command::EvalCam(a) => offline::eval_cam(a),
        Command::Serve(a) => serve(a),
        Command::Remote(a) => remote::run(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json_line());
            ExitCode::FAILURE
        }
    }
}

pub(crate) fn output_or_stdout(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
