use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Subcommand};
use motionscene::io::raster::read_depth;
use motionscene_client::{
    CameraUpdate, Client, DepthUpload, DrawnTrajectory, JobStatus, LayerKind,
};
use serde::Serialize;

use crate::failure::Failure;
use crate::offline::parse_move;
use crate::output_or_stdout;

#[derive(Debug, Args)]
pub struct RemoteArgs {
    /// Service base URL.
    #[arg(long, env = "MOTION_SERVICE_URL", default_value = "http://127.0.0.1:8080")]
    pub url: String,
    #[command(subcommand)]
    pub command: RemoteCommand,
}

#[derive(Debug, Subcommand)]
pub enum RemoteCommand {
    /// Open a session on a reference image.
    Create {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        depth: Option<PathBuf>,
        #[arg(long)]
        frames: usize,
    },
    /// Session summary.
    Info { session: u64 },
    /// Set the camera from one move, or two composed moves.
    Camera {
        session: u64,
        /// `kind` or `kind:magnitude`; at most two.
        #[arg(long = "move", required = true, num_args = 1)]
        moves: Vec<String>,
    },
    /// Add a sphere from pixel points `u,v`.
    Draw {
        session: u64,
        #[arg(long = "point", required = true, value_parser = parse_point)]
        points: Vec<[f64; 2]>,
        #[arg(long)]
        depth_hint: Option<f64>,
    },
    /// Render a frame range and wait for it.
    Render {
        session: u64,
        #[arg(long)]
        first: usize,
        #[arg(long)]
        last: usize,
    },
    /// Fetch one layer as PNG.
    Fetch {
        session: u64,
        frame: usize,
        #[arg(long, default_value = "spheres")]
        layer: String,
        #[arg(long)]
        opacity: Option<f64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Download the scene document.
    Export {
        session: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Close a session.
    Delete { session: u64 },
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let (u, v) = s
        .split_once(',')
        .ok_or_else(|| format!("expected u,v, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok([parse(u)?, parse(v)?])
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

pub fn run(a: RemoteArgs) -> Result<(), Failure> {
    let client = Client::new(&a.url)?;
    let rt = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()?;
    rt.block_on(dispatch(&client, a.command))
}

async fn dispatch(client: &Client, cmd: RemoteCommand) -> Result<(), Failure> {
    match cmd {
        RemoteCommand::Create {
            reference,
            depth,
            frames,
        } => {
            let png = std::fs::read(&reference).map_err(|e| Failure::io(&reference, e))?;
            let depth = match depth {
                Some(p) => {
                    let d = read_depth(&p)?;
                    Some(DepthUpload {
                        width: d.width(),
                        height: d.height(),
                        values: d.values().to_vec(),
                    })
                }
                None => None,
            };
            print_json(&client.create_session(&png, depth, frames).await?)
        }
        RemoteCommand::Info { session } => print_json(&client.session(session).await?),
        RemoteCommand::Camera { session, moves } => {
            let frames = client.session(session).await?.frames;
            let update = match moves.as_slice() {
                [one] => CameraUpdate::Preset {
                    spec: parse_move(one, frames)?,
                },
                [first, second] => CameraUpdate::Compose {
                    first: parse_move(first, frames)?,
                    second: parse_move(second, frames)?,
                },
                _ => return Err(Failure::invalid("give one or two --move values")),
            };
            let state = client.set_camera(session, &update).await?;
            print_json(&serde_json::json!({ "version": state.version }))
        }
        RemoteCommand::Draw {
            session,
            points,
            depth_hint,
        } => {
            let drawn = DrawnTrajectory { points, depth_hint };
            print_json(&client.draw_sphere(session, &drawn).await?)
        }
        RemoteCommand::Render {
            session,
            first,
            last,
        } => {
            let job = client.start_render(session, first, last).await?;
            let job = client
                .wait_job(session, job.id, Duration::from_secs(600))
                .await?;
            if job.status == JobStatus::Failed {
                if let Some(detail) = job.error {
                    return Err(Failure(detail));
                }
            }
            print_json(&job)
        }
        RemoteCommand::Fetch {
            session,
            frame,
            layer,
            opacity,
            output,
        } => {
            let layer: LayerKind = layer.parse().map_err(Failure::invalid)?;
            let png = client.frame(session, frame, layer, opacity).await?;
            std::fs::write(&output, &png.png).map_err(|e| Failure::io(&output, e))?;
            print_json(&serde_json::json!({
                "version": png.version,
                "cache_hit": png.cache_hit,
            }))
        }
        RemoteCommand::Export { session, output } => {
            let text = client.export_scene(session).await?;
            output_or_stdout(&output, &text)
        }
        RemoteCommand::Delete { session } => {
            client.delete_session(session).await?;
            Ok(())
        }
    }
}
