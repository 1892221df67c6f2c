//! `resection` — camera position from two known points plus gravity.
//!
//! Subcommands: `solve` observation files, `simulate` synthetic
//! observations, `bench` the two solver backends against each other,
//! `eval` the embedded challenge fixtures, `p3p` for the three-point
//! solver, and `gravity-vp` for vanishing-point gravity estimation.
//!
//! Exit codes: 0 success, 1 input error, 2 geometric/degenerate failure.

mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use format::{
    FieldSpec, GravityOutput, HeightRangeSpec, ObservationFile, P3PFile, P3POutput, SolveOutput,
    SolveRow, FORMAT_VERSION,
};
use resection::eval::{bench_table, error_table, evaluate, run_bench, BenchReport, ErrorStats};
use resection::fixtures::{
    imu_rows, visual_rows, PUBLISHED_HEIGHT_RANGE, PUBLISHED_VISUAL_MAE, PUBLISHED_VISUAL_STD,
};
use resection::gravity::{default_down_hint, gravity_from_vp, vanishing_point};
use resection::scene::{builtin_field_names, make_observation, CameraPose, GravityMode, NoiseSpec};
use resection::solver::{height_filter, local_from_observation, to_world, Backend};
use resection::{CameraIntrinsics, ImageSegment, PoseEstimate, Vec3};

#[derive(Parser)]
#[command(name = "resection", version, about = "Camera position from two known ground points and gravity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Frame {
    Local,
    World,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Rational,
    Classical,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Rational => Backend::Rational,
            BackendArg::Classical => Backend::Classical,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GravityModeArg {
    Direct,
    Verticals,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every observation in a JSON observation file.
    Solve {
        /// Path to the observation file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "rational")]
        backend: BackendArg,
        /// Coordinate frame of the reported pose: the world frame of the
        /// field, or the local frame anchored at the first landmark.
        #[arg(long, value_enum, default_value = "world")]
        frame: Frame,
        #[arg(long, value_enum, default_value = "table")]
        format: OutputFormat,
    },
    /// Generate an observation file for a camera at the given pose.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        h: f64,
        /// Built-in field name.
        #[arg(long, default_value = "spl_center")]
        field: String,
        /// The two landmark ids, comma separated; order is significant.
        #[arg(long, default_value = "x1,x2")]
        landmarks: String,
        /// Gaussian pixel noise standard deviation.
        #[arg(long, default_value_t = 0.0)]
        noise_std: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report gravity directly or via projected goal-post segments.
        #[arg(long, value_enum, default_value = "direct")]
        gravity_mode: GravityModeArg,
    },
    /// Time both solver backends on identical random measurement sets.
    Bench {
        /// Run counts, comma separated (e.g. 50,500,5000).
        #[arg(long, default_value = "50")]
        runs: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "table")]
        format: OutputFormat,
    },
    /// Error statistics over the embedded challenge fixtures.
    Eval {
        /// Fixture selector: `paper-visual` (visual-gravity rows, with the
        /// published statistics alongside) or `paper-imu` (IMU rows).
        selector: String,
        #[arg(long, value_enum, default_value = "table")]
        format: OutputFormat,
    },
    /// Solve a three-point distance problem from a JSON input file.
    P3p {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: OutputFormat,
    },
    /// Gravity direction from the vanishing point of two image segments.
    #[command(allow_negative_numbers = true)]
    GravityVp {
        /// First segment as u1,v1,u2,v2 in pixels.
        #[arg(long)]
        seg1: String,
        /// Second segment as u1,v1,u2,v2 in pixels.
        #[arg(long)]
        seg2: String,
        #[arg(long, default_value_t = 600.0)]
        fx: f64,
        #[arg(long, default_value_t = 600.0)]
        fy: f64,
        #[arg(long, default_value_t = 320.0)]
        cx: f64,
        #[arg(long, default_value_t = 240.0)]
        cy: f64,
        /// Camera-frame hint for which way is down, as x,y,z.
        #[arg(long)]
        hint: Option<String>,
    },
}

/// CLI failure carrying its exit class.
enum CliError {
    Input(String),
    Geometric(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(1),
            CliError::Geometric(_) => ExitCode::from(2),
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Geometric(m) => m,
        }
    }
}

fn lift(context: &str, e: resection::Error) -> CliError {
    let msg = format!("{context}: {e}");
    if e.is_geometric() {
        CliError::Geometric(msg)
    } else {
        CliError::Input(msg)
    }
}

fn main() -> ExitCode {
    // Usage mistakes are input errors (exit 1); clap's default of 2 is
    // reserved for geometric failures here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Solve {
            input,
            backend,
            frame,
            format,
        } => cmd_solve(&input, backend.into(), frame, format),
        Command::Simulate {
            x,
            y,
            h,
            field,
            landmarks,
            noise_std,
            seed,
            gravity_mode,
        } => cmd_simulate(x, y, h, &field, &landmarks, noise_std, seed, gravity_mode),
        Command::Bench { runs, seed, format } => cmd_bench(&runs, seed, format),
        Command::Eval { selector, format } => cmd_eval(&selector, format),
        Command::P3p { input, format } => cmd_p3p(&input, format),
        Command::GravityVp {
            seg1,
            seg2,
            fx,
            fy,
            cx,
            cy,
            hint,
        } => cmd_gravity_vp(&seg1, &seg2, fx, fy, cx, cy, hint.as_deref()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{} is not valid: {e}", path.display())))
}

fn check_version(version: u32, what: &str) -> Result<(), CliError> {
    if version != FORMAT_VERSION {
        return Err(CliError::Input(format!(
            "{what} has version {version}, this build reads version {FORMAT_VERSION}"
        )));
    }
    Ok(())
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("serialization failed: {e}")))?;
    println!("{text}");
    Ok(())
}

fn cmd_solve(
    input: &PathBuf,
    backend: Backend,
    frame: Frame,
    format: OutputFormat,
) -> Result<ExitCode, CliError> {
    let file: ObservationFile = read_json(input)?;
    check_version(file.version, "observation file")?;
    let field = file
        .field
        .resolve()
        .map_err(|e| lift("field", e))?;
    let range = file
        .height_range
        .unwrap_or(HeightRangeSpec {
            min: PUBLISHED_HEIGHT_RANGE.0,
            max: PUBLISHED_HEIGHT_RANGE.1,
        })
        .to_range()
        .map_err(|e| lift("height_range", e))?;

    let mut rows = Vec::new();
    let mut any_degenerate = false;
    for (index, obs) in file.observations.iter().enumerate() {
        let context = format!("observation {index}");
        let solved = local_from_observation(obs, &field, backend).and_then(|(local, p1, p2)| {
            let pose = match frame {
                Frame::World => to_world(&local, p1, p2)?,
                Frame::Local => {
                    let [x, y, h] = local.local_position();
                    PoseEstimate {
                        x,
                        y,
                        h,
                        backend: local.backend,
                        height_ok: true,
                    }
                }
            };
            Ok(height_filter(pose, &range))
        });
        match solved {
            Ok(pose) => rows.push(SolveRow {
                index,
                landmarks: obs.landmark_ids.clone(),
                pose: Some(pose),
                error: None,
            }),
            Err(e) if e.is_geometric() => {
                any_degenerate = true;
                rows.push(SolveRow {
                    index,
                    landmarks: obs.landmark_ids.clone(),
                    pose: None,
                    error: Some(e.to_string()),
                });
            }
            Err(e) => return Err(lift(&context, e)),
        }
    }

    match format {
        OutputFormat::Json => print_json(&SolveOutput {
            version: FORMAT_VERSION,
            results: rows,
        })?,
        OutputFormat::Table => {
            println!(
                "{:<6}{:<20}{:>12}{:>12}{:>12}  height_ok",
                "idx", "landmarks", "x", "y", "h"
            );
            for row in &rows {
                let ids = format!("{},{}", row.landmarks[0], row.landmarks[1]);
                match (&row.pose, &row.error) {
                    (Some(p), _) => println!(
                        "{:<6}{:<20}{:>12.6}{:>12.6}{:>12.6}  {}",
                        row.index, ids, p.x, p.y, p.h, p.height_ok
                    ),
                    (None, Some(e)) => {
                        println!("{:<6}{:<20}  degenerate: {e}", row.index, ids)
                    }
                    _ => unreachable!("row has either a pose or an error"),
                }
            }
        }
    }
    Ok(if any_degenerate {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    x: f64,
    y: f64,
    h: f64,
    field_name: &str,
    landmarks: &str,
    noise_std: f64,
    seed: u64,
    gravity_mode: GravityModeArg,
) -> Result<ExitCode, CliError> {
    if h <= 0.0 {
        return Err(CliError::Input("camera height must be positive".into()));
    }
    let field = resection::scene::builtin_field(field_name).ok_or_else(|| {
        CliError::Input(format!(
            "unknown field `{field_name}` (built-ins: {})",
            builtin_field_names().join(", ")
        ))
    })?;
    let ids: Vec<&str> = landmarks.split(',').collect();
    if ids.len() != 2 {
        return Err(CliError::Input(
            "landmarks must be two comma-separated ids".into(),
        ));
    }
    let p1 = field
        .landmark(ids[0])
        .map_err(|e| lift("landmarks", e))?;
    let p2 = field
        .landmark(ids[1])
        .map_err(|e| lift("landmarks", e))?;
    let target = (p1 + p2) * 0.5;
    let pose = CameraPose::looking_at(Vec3::new(x, y, h), target)
        .map_err(|e| lift("camera pose", e))?;
    let noise = NoiseSpec {
        pixel_std: noise_std,
        gravity_mode: match gravity_mode {
            GravityModeArg::Direct => GravityMode::Direct,
            GravityModeArg::Verticals => GravityMode::Verticals,
        },
    };
    let k = CameraIntrinsics::default();
    let obs = make_observation(&pose, [ids[0], ids[1]], &field, &k, &noise, seed)
        .map_err(|e| lift("simulate", e))?;
    let file = ObservationFile {
        version: FORMAT_VERSION,
        field: FieldSpec::Builtin(field_name.to_string()),
        height_range: Some(HeightRangeSpec {
            min: PUBLISHED_HEIGHT_RANGE.0,
            max: PUBLISHED_HEIGHT_RANGE.1,
        }),
        observations: vec![obs],
    };
    print_json(&file)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(runs: &str, seed: u64, format: OutputFormat) -> Result<ExitCode, CliError> {
    let counts: Vec<u64> = runs
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Input(format!("bad run count `{s}`")))
                .and_then(|n| {
                    if n == 0 {
                        Err(CliError::Input("run count must be at least 1".into()))
                    } else {
                        Ok(n)
                    }
                })
        })
        .collect::<Result<_, _>>()?;
    let reports: Vec<BenchReport> = counts.iter().map(|&n| run_bench(n, seed)).collect();
    match format {
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct BenchOutput {
                version: u32,
                reports: Vec<BenchReport>,
            }
            print_json(&BenchOutput {
                version: FORMAT_VERSION,
                reports,
            })?;
        }
        OutputFormat::Table => print!("{}", bench_table(&reports)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(selector: &str, format: OutputFormat) -> Result<ExitCode, CliError> {
    let (rows, published) = match selector {
        "paper-visual" => (
            visual_rows(),
            Some((PUBLISHED_VISUAL_MAE, PUBLISHED_VISUAL_STD)),
        ),
        "paper-imu" => (imu_rows(), None),
        other => {
            return Err(CliError::Input(format!(
                "unknown selector `{other}` (expected paper-visual or paper-imu)"
            )))
        }
    };
    let stats = evaluate(&rows.0, &rows.1).map_err(|e| lift("eval", e))?;
    match format {
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct EvalOutput {
                version: u32,
                selector: String,
                recomputed: ErrorStats,
                #[serde(skip_serializing_if = "Option::is_none")]
                published_mae: Option<[f64; 3]>,
                #[serde(skip_serializing_if = "Option::is_none")]
                published_std: Option<[f64; 3]>,
            }
            print_json(&EvalOutput {
                version: FORMAT_VERSION,
                selector: selector.to_string(),
                recomputed: stats,
                published_mae: published.map(|p| p.0),
                published_std: published.map(|p| p.1),
            })?;
        }
        OutputFormat::Table => print!("{}", error_table(&stats, published)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_p3p(input: &PathBuf, format: OutputFormat) -> Result<ExitCode, CliError> {
    let file: P3PFile = read_json(input)?;
    check_version(file.version, "three-point input")?;
    let solutions = resection::p3p::solve_p3p(&file.input).map_err(|e| lift("p3p", e))?;
    match format {
        OutputFormat::Json => print_json(&P3POutput {
            version: FORMAT_VERSION,
            solutions,
        })?,
        OutputFormat::Table => {
            println!(
                "{:<6}{:>14}{:>14}{:>14}{:>14}",
                "#", "dist1", "dist2", "dist3", "residual"
            );
            for (i, s) in solutions.iter().enumerate() {
                println!(
                    "{:<6}{:>14.9}{:>14.9}{:>14.9}{:>14.3e}",
                    i, s.dist1, s.dist2, s.dist3, s.residual
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(CliError::Input(format!(
            "{what} must be {n} comma-separated numbers, got `{s}`"
        ))),
    }
}

fn cmd_gravity_vp(
    seg1: &str,
    seg2: &str,
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    hint: Option<&str>,
) -> Result<ExitCode, CliError> {
    let a = parse_floats(seg1, 4, "--seg1")?;
    let b = parse_floats(seg2, 4, "--seg2")?;
    let s1 = ImageSegment::new([a[0], a[1]], [a[2], a[3]]).map_err(|e| lift("--seg1", e))?;
    let s2 = ImageSegment::new([b[0], b[1]], [b[2], b[3]]).map_err(|e| lift("--seg2", e))?;
    let k = CameraIntrinsics::new(fx, fy, cx, cy).map_err(|e| lift("intrinsics", e))?;
    let down = match hint {
        Some(text) => {
            let v = parse_floats(text, 3, "--hint")?;
            Vec3::new(v[0], v[1], v[2])
        }
        None => default_down_hint(),
    };
    let vp = vanishing_point(&s1, &s2).map_err(|e| lift("vanishing point", e))?;
    let g = gravity_from_vp(vp, &k, down).map_err(|e| lift("gravity", e))?;
    print_json(&GravityOutput {
        version: FORMAT_VERSION,
        vanishing_point: vp,
        gravity: g.vector().into(),
    })?;
    Ok(ExitCode::SUCCESS)
}
