//! Scenario files and the end-to-end simulate pipeline.
//!
//! A scenario is flat `key = value` text with dotted keys, `#` comments and
//! blank lines. Unknown and repeated keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::field::{FieldConfig, FieldError, GradientProfile, Grid};
use crate::generate::{generate, GenError, GenShape};
use crate::geometry::{
    concave_hull, convex_hull_jarvis, polygon_metrics, GeometryError, HullMetrics, Point,
    PointSet, Polygon,
};
use crate::io::{self, IoError};
use crate::shape::enclosure_check;
use crate::sim::{run_observed, HaltReport, SimConfig, SimError, SimResult, SimState};
use crate::ObstacleMask;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error("manifest encoding: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointSource {
    File(PathBuf),
    Generated { shape: GenShape, count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderFlags {
    pub u: bool,
    pub trail: bool,
    pub skeleton: bool,
}

impl Default for RenderFlags {
    fn default() -> Self {
        Self {
            u: true,
            trail: true,
            skeleton: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub points: PointSource,
    pub grid: Grid,
    pub field: FieldConfig,
    pub sim: SimConfig,
    /// Carving radius of the exact concave hull the trail is compared with.
    /// `None` uses twice the point-set diameter.
    pub carving_radius: Option<f64>,
    pub sampling_step: f64,
    /// Relative paths resolve against the scenario file.
    pub output_dir: PathBuf,
    pub render: RenderFlags,
}

const KEYS: &[&str] = &[
    "id",
    "points.file",
    "points.generator",
    "points.count",
    "points.seed",
    "grid.width",
    "grid.height",
    "grid.dx",
    "grid.origin_x",
    "grid.origin_y",
    "field.gradient_amplitude",
    "field.gradient_profile",
    "field.gradient_length_scale",
    "field.repellent_radius",
    "field.phi0",
    "sim.dt",
    "sim.epsilon",
    "sim.f",
    "sim.q",
    "sim.du",
    "sim.threshold",
    "sim.inoculation_x",
    "sim.inoculation_y",
    "sim.inoculation_size",
    "sim.max_steps",
    "sim.quiet_window",
    "sim.envelope_interval",
    "sim.rng_seed",
    "exact.carving_radius",
    "metrics.sampling_step",
    "output.dir",
    "render.u",
    "render.trail",
    "render.skeleton",
];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, ScenarioError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some((line, raw)) => raw.parse::<T>().map(Some).map_err(|_| ScenarioError::Parse {
                line,
                message: format!("invalid value '{raw}' for {key}"),
            }),
        }
    }

    fn take_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T, ScenarioError> {
        Ok(self.take(key)?.unwrap_or(default))
    }
}

impl Scenario {
    /// Parses scenario text. Relative point files resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ScenarioError> {
        let mut map = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ScenarioError::Parse {
                    line,
                    message: format!("expected 'key = value', found '{content}'"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ScenarioError::Parse {
                    line,
                    message: format!("unknown key '{key}'"),
                });
            }
            if map.insert(key.to_string(), (line, value.to_string())).is_some() {
                return Err(ScenarioError::Parse {
                    line,
                    message: format!("duplicate key '{key}'"),
                });
            }
        }
        let mut e = Entries { map };

        let file: Option<String> = e.take("points.file")?;
        let generator: Option<String> = e.take("points.generator")?;
        let points = match (file, generator) {
            (Some(f), None) => PointSource::File(base_dir.join(f)),
            (None, Some(g)) => PointSource::Generated {
                shape: g.parse().map_err(ScenarioError::Invalid)?,
                count: e
                    .take("points.count")?
                    .ok_or_else(|| ScenarioError::Invalid("points.count is required with points.generator".into()))?,
                seed: e.take_or("points.seed", 0)?,
            },
            (Some(_), Some(_)) => {
                return Err(ScenarioError::Invalid(
                    "give either points.file or points.generator, not both".into(),
                ))
            }
            (None, None) => {
                return Err(ScenarioError::Invalid(
                    "points.file or points.generator is required".into(),
                ))
            }
        };

        let width = e.take_or("grid.width", 300usize)?;
        let height = e.take_or("grid.height", 300usize)?;
        let dx = e.take_or("grid.dx", 0.25)?;
        let origin = Point::new(e.take_or("grid.origin_x", 0.0)?, e.take_or("grid.origin_y", 0.0)?);
        let grid = Grid::new(width, height, dx, origin)?;

        let fd = FieldConfig::default();
        let profile: String = e.take_or("field.gradient_profile", fd.gradient_profile.as_str().to_string())?;
        let field = FieldConfig {
            gradient_amplitude: e.take_or("field.gradient_amplitude", fd.gradient_amplitude)?,
            gradient_profile: profile
                .parse::<GradientProfile>()
                .map_err(ScenarioError::Invalid)?,
            gradient_length_scale: e.take_or("field.gradient_length_scale", fd.gradient_length_scale)?,
            repellent_radius: e.take_or("field.repellent_radius", fd.repellent_radius)?,
            phi0: e.take_or("field.phi0", fd.phi0)?,
        };

        let sd = SimConfig::default();
        let ix: usize = e
            .take("sim.inoculation_x")?
            .ok_or_else(|| ScenarioError::Invalid("sim.inoculation_x is required".into()))?;
        let iy: usize = e
            .take("sim.inoculation_y")?
            .ok_or_else(|| ScenarioError::Invalid("sim.inoculation_y is required".into()))?;
        let sim = SimConfig {
            dt: e.take_or("sim.dt", sd.dt)?,
            epsilon: e.take_or("sim.epsilon", sd.epsilon)?,
            f: e.take_or("sim.f", sd.f)?,
            q: e.take_or("sim.q", sd.q)?,
            du: e.take_or("sim.du", sd.du)?,
            threshold: e.take_or("sim.threshold", sd.threshold)?,
            inoculation_center: (ix, iy),
            inoculation_size: e.take_or("sim.inoculation_size", sd.inoculation_size)?,
            max_steps: e.take_or("sim.max_steps", sd.max_steps)?,
            quiet_window: e.take_or("sim.quiet_window", sd.quiet_window)?,
            envelope_interval: e.take_or("sim.envelope_interval", sd.envelope_interval)?,
            rng_seed: e.take_or("sim.rng_seed", sd.rng_seed)?,
        };

        let carving_radius = e.take("exact.carving_radius")?;
        let sampling_step = e.take_or("metrics.sampling_step", 0.05)?;
        let output_dir = base_dir.join(e.take_or("output.dir", "out".to_string())?);
        let render = RenderFlags {
            u: e.take_or("render.u", true)?,
            trail: e.take_or("render.trail", true)?,
            skeleton: e.take_or("render.skeleton", true)?,
        };
        let id = e.take_or("id", "scenario".to_string())?;
        if let Some(key) = e.map.keys().next() {
            return Err(ScenarioError::Invalid(format!("'{key}' is not used with this point source")));
        }

        let scenario = Self {
            id,
            points,
            grid,
            field,
            sim,
            carving_radius,
            sampling_step,
            output_dir,
            render,
        };
        scenario.validate_static()?;
        Ok(scenario)
    }

    pub fn from_file(path: &Path) -> Result<Self, ScenarioError> {
        let text = io::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn validate_static(&self) -> Result<(), ScenarioError> {
        self.field.validate()?;
        self.sim.validate(&self.grid)?;
        if let Some(r) = self.carving_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(GeometryError::InvalidRadius(r).into());
            }
        }
        if !(self.sampling_step > 0.0 && self.sampling_step.is_finite()) {
            return Err(GeometryError::InvalidSamplingStep(self.sampling_step).into());
        }
        Ok(())
    }

    pub fn load_points(&self) -> Result<PointSet, ScenarioError> {
        let ps = match &self.points {
            PointSource::File(path) => {
                let text = io::read_to_string(path)?;
                PointSet::new(io::parse_points(&text)?)?
            }
            PointSource::Generated { shape, count, seed } => generate(*shape, *count, *seed)?,
        };
        Ok(ps.with_id(self.id.clone()))
    }

    /// Semantic settings as canonical strings. Output location and render
    /// flags are excluded; the point source is replaced by the points.
    pub fn canonical_entries(&self, ps: &PointSet) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("id", self.id.clone());
        put("points", io::format_points(ps.points()).trim_end().replace('\n', ";"));
        put("grid.width", self.grid.width.to_string());
        put("grid.height", self.grid.height.to_string());
        put("grid.dx", self.grid.dx.to_string());
        put("grid.origin_x", self.grid.origin.x.to_string());
        put("grid.origin_y", self.grid.origin.y.to_string());
        let f = &self.field;
        put("field.gradient_amplitude", f.gradient_amplitude.to_string());
        put("field.gradient_profile", f.gradient_profile.as_str().to_string());
        put("field.gradient_length_scale", f.gradient_length_scale.to_string());
        put("field.repellent_radius", f.repellent_radius.to_string());
        put("field.phi0", f.phi0.to_string());
        let s = &self.sim;
        put("sim.dt", s.dt.to_string());
        put("sim.epsilon", s.epsilon.to_string());
        put("sim.f", s.f.to_string());
        put("sim.q", s.q.to_string());
        put("sim.du", s.du.to_string());
        put("sim.threshold", s.threshold.to_string());
        put("sim.inoculation_x", s.inoculation_center.0.to_string());
        put("sim.inoculation_y", s.inoculation_center.1.to_string());
        put("sim.inoculation_size", s.inoculation_size.to_string());
        put("sim.max_steps", s.max_steps.to_string());
        put("sim.quiet_window", s.quiet_window.to_string());
        put("sim.envelope_interval", s.envelope_interval.to_string());
        put("sim.rng_seed", s.rng_seed.to_string());
        put(
            "exact.carving_radius",
            self.carving_radius.map_or("auto".to_string(), |r| r.to_string()),
        );
        put("metrics.sampling_step", self.sampling_step.to_string());
        m
    }

    /// SHA-256 over the canonical entries, hex encoded.
    pub fn config_hash(&self, ps: &PointSet) -> String {
        let mut hasher = Sha256::new();
        for (k, v) in self.canonical_entries(ps) {
            hasher.update(k.as_bytes());
            hasher.update(b"=");
            hasher.update(v.as_bytes());
            hasher.update(b"\n");
        }
        hex::encode(hasher.finalize())
    }

    /// Carving radius used for the exact concave hull.
    pub fn effective_carving_radius(&self, ps: &PointSet) -> f64 {
        self.carving_radius.unwrap_or_else(|| 2.0 * ps.diameter().max(1.0))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestMetrics {
    pub concave: Option<HullMetrics>,
    pub concave_error: Option<String>,
    pub convex: Option<HullMetrics>,
    pub carving_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NetworkSummary {
    pub cycles: usize,
    pub junctions: usize,
    pub skeleton_cells: usize,
    pub encloses_points: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub id: String,
    pub scenario: BTreeMap<String, String>,
    pub config_hash: String,
    pub halt: HaltReport,
    pub envelop_step: Option<u64>,
    pub enclosure: bool,
    pub trail_cells: usize,
    pub metrics: ManifestMetrics,
    pub network: Option<NetworkSummary>,
    pub wall_clock_ms: u64,
    pub artifacts: Vec<String>,
}

impl RunManifest {
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        io::to_canonical_json(self)
    }
}

/// Everything a simulate run produced, before anything is written.
pub struct Outcome {
    pub points: PointSet,
    pub result: SimResult,
    pub manifest: RunManifest,
    pub concave: Result<Polygon, GeometryError>,
    pub convex: Polygon,
}

/// Runs a scenario and computes the comparison against the exact hulls.
/// The observer sees the state every `every` steps (0 disables it).
pub fn execute(
    scenario: &Scenario,
    every: u64,
    observer: impl FnMut(&SimState, &ObstacleMask),
) -> Result<Outcome, ScenarioError> {
    let started = Instant::now();
    let ps = scenario.load_points()?;
    scenario.field.validate_for(&ps)?;
    let result = run_observed(&ps, &scenario.grid, &scenario.field, &scenario.sim, every, observer)?;

    let radius = scenario.effective_carving_radius(&ps);
    let concave = concave_hull(&ps, radius);
    let convex = convex_hull_jarvis(&ps);
    let compare = |exact: &Polygon| {
        result
            .hull
            .as_ref()
            .and_then(|h| polygon_metrics(h, exact, scenario.sampling_step).ok())
    };
    let metrics = ManifestMetrics {
        concave: concave.as_ref().ok().and_then(compare),
        concave_error: concave.as_ref().err().map(|e| e.to_string()),
        convex: compare(&convex),
        carving_radius: radius,
    };
    let network = result.network.as_ref().map(|n| NetworkSummary {
        cycles: n.cycles,
        junctions: n.junctions.len(),
        skeleton_cells: n.skeleton.count(),
        encloses_points: n.encloses(&ps),
    });
    let manifest = RunManifest {
        id: scenario.id.clone(),
        scenario: scenario.canonical_entries(&ps),
        config_hash: scenario.config_hash(&ps),
        halt: result.report,
        envelop_step: result.report.envelop_step,
        enclosure: enclosure_check(&result.state.trail, &ps),
        trail_cells: result.state.trail.count(),
        metrics,
        network,
        wall_clock_ms: started.elapsed().as_millis() as u64,
        artifacts: Vec::new(),
    };
    Ok(Outcome {
        points: ps,
        result,
        manifest,
        concave,
        convex,
    })
}

/// Writes the artifacts of an outcome into `out_dir` and returns the final
/// manifest (also written as `manifest.json`).
pub fn write_outcome(
    scenario: &Scenario,
    outcome: &Outcome,
    out_dir: &Path,
) -> Result<RunManifest, ScenarioError> {
    std::fs::create_dir_all(out_dir).map_err(|e| IoError::io(out_dir, e))?;
    let mut artifacts = Vec::new();
    let mut emit = |name: &str, bytes: &[u8]| -> Result<(), ScenarioError> {
        io::write_atomic(&out_dir.join(name), bytes)?;
        artifacts.push(name.to_string());
        Ok(())
    };
    let state = &outcome.result.state;
    if scenario.render.trail {
        emit("trail.pgm", &io::render_binary(&state.trail))?;
    }
    if scenario.render.u {
        emit("u.pgm", &io::render_u(&state.u))?;
    }
    if scenario.render.skeleton {
        if let Some(net) = &outcome.result.network {
            emit("skeleton.pgm", &io::render_binary(&net.skeleton))?;
        }
    }
    if let Some(h) = &outcome.result.hull {
        emit("hull.csv", io::format_polygon(h).as_bytes())?;
    }
    if let Ok(c) = &outcome.concave {
        emit("exact_concave.csv", io::format_polygon(c).as_bytes())?;
    }
    if !outcome.convex.is_degenerate() {
        emit("exact_convex.csv", io::format_polygon(&outcome.convex).as_bytes())?;
    }
    artifacts.push("manifest.json".to_string());
    let mut manifest = outcome.manifest.clone();
    manifest.artifacts = artifacts;
    let mut json = manifest.to_json()?;
    json.push('\n');
    io::write_atomic(&out_dir.join("manifest.json"), json.as_bytes())?;
    Ok(manifest)
}

/// Parse, run and write in one go.
pub fn simulate(scenario: &Scenario, out_dir: &Path) -> Result<RunManifest, ScenarioError> {
    let outcome = execute(scenario, 0, |_, _| {})?;
    write_outcome(scenario, &outcome, out_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "\
# tiny run
id = tiny
points.generator = uniform
points.count = 4
points.seed = 3
grid.width = 64
grid.height = 64
sim.inoculation_x = 10
sim.inoculation_y = 10
sim.max_steps = 0
";

    #[test]
    fn parses_with_defaults() {
        let s = Scenario::parse(BASIC, Path::new(".")).unwrap();
        assert_eq!(s.id, "tiny");
        assert_eq!(s.grid.dx, 0.25);
        assert_eq!(s.field, FieldConfig::default());
        assert_eq!(s.sim.inoculation_center, (10, 10));
        assert_eq!(s.sim.max_steps, 0);
        assert_eq!(
            s.points,
            PointSource::Generated {
                shape: GenShape::Uniform,
                count: 4,
                seed: 3
            }
        );
    }

    #[test]
    fn rejects_bad_lines() {
        let err = Scenario::parse("id = a\nbogus.key = 1\n", Path::new(".")).unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 2, .. }));
        let err = Scenario::parse(&format!("{BASIC}grid.dx = 0.25\ngrid.dx = 0.5\n"), Path::new(".")).unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 12, .. }));
        let err = Scenario::parse(&format!("{BASIC}sim.dt = fast\n"), Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("sim.dt"));
        let err = Scenario::parse("id = a\nno equals sign\n", Path::new(".")).unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 2, .. }));
    }

    #[test]
    fn validates_before_compute() {
        let err = Scenario::parse(&BASIC.replace("sim.inoculation_x = 10", "sim.inoculation_x = 2"), Path::new("."))
            .unwrap_err();
        assert!(matches!(err, ScenarioError::Sim(SimError::InoculationOutOfBounds { .. })));
        let err = Scenario::parse(&format!("{BASIC}sim.dt = 0.05\n"), Path::new(".")).unwrap_err();
        assert!(matches!(err, ScenarioError::Sim(SimError::InvalidConfig(_))));
    }

    #[test]
    fn hash_tracks_semantic_fields_only() {
        let a = Scenario::parse(BASIC, Path::new(".")).unwrap();
        let ps = a.load_points().unwrap();
        let h = a.config_hash(&ps);
        assert_eq!(h.len(), 64);
        let mut b = a.clone();
        b.output_dir = PathBuf::from("elsewhere");
        b.render.u = false;
        assert_eq!(b.config_hash(&ps), h);
        let mut c = a.clone();
        c.field.phi0 = 0.0867;
        assert_ne!(c.config_hash(&ps), h);
        let mut d = a.clone();
        d.sim.max_steps = 1;
        assert_ne!(d.config_hash(&ps), h);
        let moved = PointSet::new(ps.points().iter().map(|p| p.translated(0.5, 0.0)).collect()).unwrap();
        assert_ne!(a.config_hash(&moved), h);
    }
}
