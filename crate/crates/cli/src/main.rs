use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use plasmodium_core::field::{build_attractant, build_obstacles, build_phi};
use plasmodium_core::geometry::{concave_hull, convex_hull_jarvis, polygon_metrics};
use plasmodium_core::io::{self, IoError};
use plasmodium_core::scenario::{execute, write_outcome};
use plasmodium_core::shape::BinaryImage;
use plasmodium_core::{
    generate, FieldError, GenError, GenShape, GeometryError, PointSet, Polygon, Scenario,
    ScenarioError, SimError,
};

const EXIT_RUNTIME: u8 = 1;
const EXIT_GEOMETRY: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "plasmodium", version, about = "Plasmodium hull simulator and exact hull tools")]
struct Cli {
    /// Directory for output files (default: current directory, or the
    /// scenario's output.dir for simulate)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Seed for point generation; overrides sim.rng_seed for simulate
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Only print errors
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic point set
    Gen {
        count: usize,
        #[arg(value_parser = parse_shape)]
        shape: GenShape,
        /// Output file (default: <out-dir>/points.csv)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the exact convex and concave hulls of a point file
    Exact {
        points: PathBuf,
        #[arg(long)]
        carving_radius: f64,
    },
    /// Run a scenario end to end
    Simulate { scenario: PathBuf },
    /// Compare two polygon files
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        sampling_step: f64,
    },
    /// Render a scenario's attractant, excitability and obstacle fields
    Render { scenario: PathBuf },
}

fn parse_shape(s: &str) -> Result<GenShape, String> {
    s.parse()
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn geometry_code(e: &GeometryError) -> u8 {
    match e {
        GeometryError::Disconnected { .. }
        | GeometryError::Degenerate
        | GeometryError::NonManifold { .. }
        | GeometryError::DegeneratePolygon => EXIT_GEOMETRY,
        _ => EXIT_USAGE,
    }
}

fn io_code(e: &IoError) -> u8 {
    match e {
        IoError::Io { .. } => EXIT_RUNTIME,
        IoError::Parse { .. } | IoError::Format(_) => EXIT_USAGE,
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        Self {
            code: geometry_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Self {
            code: io_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        let code = match e {
            FieldError::NonFinite { .. } => EXIT_RUNTIME,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        let code = match &e {
            GenError::Geometry(g) => geometry_code(g),
            GenError::TooFew(_) => EXIT_USAGE,
            GenError::Crowded { .. } => EXIT_RUNTIME,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = match &e {
            ScenarioError::Parse { .. } | ScenarioError::Invalid(_) => EXIT_USAGE,
            ScenarioError::Io(io) => io_code(io),
            ScenarioError::Geometry(g) => geometry_code(g),
            ScenarioError::Field(FieldError::NonFinite { .. }) => EXIT_RUNTIME,
            ScenarioError::Field(_) => EXIT_USAGE,
            ScenarioError::Sim(SimError::NumericBlowup { .. } | SimError::NonFiniteKinetics { .. }) => {
                EXIT_RUNTIME
            }
            ScenarioError::Sim(SimError::Field(FieldError::NonFinite { .. })) => EXIT_RUNTIME,
            ScenarioError::Sim(_) => EXIT_USAGE,
            ScenarioError::Generate(g) => match g {
                GenError::Crowded { .. } => EXIT_RUNTIME,
                _ => EXIT_USAGE,
            },
            ScenarioError::Json(_) => EXIT_RUNTIME,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: e.to_string(),
        }
    }
}

fn out_dir(cli: &Cli) -> Result<PathBuf, Failure> {
    let dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| Failure::from(IoError::io(&dir, e)))?;
    Ok(dir)
}

fn read_point_set(path: &Path) -> Result<PointSet, Failure> {
    let pts = io::parse_points(&io::read_to_string(path)?)?;
    Ok(PointSet::new(pts)?)
}

fn read_polygon(path: &Path) -> Result<Polygon, Failure> {
    let verts = io::parse_polygon(&io::read_to_string(path)?)?;
    Polygon::new(verts).map_err(|e| Failure {
        code: EXIT_GEOMETRY,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_scenario(cli: &Cli, path: &Path) -> Result<Scenario, Failure> {
    let mut sc = Scenario::from_file(path)?;
    if let Some(seed) = cli.seed {
        sc.sim.rng_seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        sc.output_dir = dir.clone();
    }
    Ok(sc)
}

fn polygon_summary(p: &Polygon) -> serde_json::Value {
    json!({
        "area": p.area(),
        "perimeter": p.perimeter(),
        "vertices": p.len(),
    })
}

fn say(cli: &Cli, line: &str) {
    if !cli.quiet {
        println!("{line}");
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Gen { count, shape, out } => {
            if *count < 3 {
                return Err(Failure::usage(format!("need at least 3 points, got {count}")));
            }
            let ps = generate(*shape, *count, cli.seed.unwrap_or(0))?;
            let path = match out {
                Some(p) => p.clone(),
                None => out_dir(cli)?.join("points.csv"),
            };
            io::write_atomic(&path, io::format_points(ps.points()).as_bytes())?;
            say(cli, &path.display().to_string());
        }
        Command::Exact {
            points,
            carving_radius,
        } => {
            let ps = read_point_set(points)?;
            let dir = out_dir(cli)?;
            let convex = convex_hull_jarvis(&ps);
            let concave = concave_hull(&ps, *carving_radius);
            io::write_atomic(&dir.join("convex.csv"), io::format_polygon(&convex).as_bytes())?;
            let mut summary = json!({
                "carving_radius": carving_radius,
                "convex": polygon_summary(&convex),
                "points": ps.len(),
            });
            match &concave {
                Ok(h) => {
                    io::write_atomic(&dir.join("concave.csv"), io::format_polygon(h).as_bytes())?;
                    summary["concave"] = polygon_summary(h);
                }
                Err(e) => summary["concave_error"] = json!(e.to_string()),
            }
            let text = io::to_canonical_json(&summary)?;
            io::write_atomic(&dir.join("exact.json"), format!("{text}\n").as_bytes())?;
            say(cli, &text);
            concave?;
        }
        Command::Simulate { scenario } => {
            let sc = load_scenario(cli, scenario)?;
            let outcome = execute(&sc, 0, |_, _| {})?;
            let manifest = write_outcome(&sc, &outcome, &sc.output_dir)?;
            say(cli, &manifest.to_json()?);
        }
        Command::Compare {
            a,
            b,
            sampling_step,
        } => {
            let (pa, pb) = (read_polygon(a)?, read_polygon(b)?);
            let metrics = polygon_metrics(&pa, &pb, *sampling_step)?;
            let text = io::to_canonical_json(&metrics)?;
            let dir = out_dir(cli)?;
            io::write_atomic(&dir.join("compare.json"), format!("{text}\n").as_bytes())?;
            say(cli, &text);
        }
        Command::Render { scenario } => {
            let sc = load_scenario(cli, scenario)?;
            let ps = sc.load_points()?;
            sc.field.validate_for(&ps)?;
            let eta = build_attractant(&ps, &sc.grid, &sc.field)?;
            let phi = build_phi(&eta, &sc.field)?;
            let mask = build_obstacles(&ps, &sc.grid, &sc.field)?;
            let obstacles = BinaryImage::from_fn(sc.grid, |x, y| mask.is_blocked(x, y));
            let dir = &sc.output_dir;
            std::fs::create_dir_all(dir).map_err(|e| Failure::from(IoError::io(dir, e)))?;
            for (name, bytes) in [
                ("attractant.pgm", io::render_normalized(&eta)),
                ("phi.pgm", io::render_normalized(&phi)),
                ("obstacles.pgm", io::render_binary(&obstacles)),
            ] {
                let path = dir.join(name);
                io::write_atomic(&path, &bytes)?;
                say(cli, &path.display().to_string());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
