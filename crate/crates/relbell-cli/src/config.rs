//! Scenario configuration: TOML schema, defaults, flag overrides, validation.
//!
//! Angles cross the CLI boundary in degrees and are converted to radians at
//! the point of use. All fields have defaults, so every scenario runs without
//! a config file; a file plus flag overrides refine the defaults. The
//! effective configuration (after overrides) is serialized back to TOML and
//! hashed, and that hash is stamped into the output header so every CSV is
//! traceable to its exact parameters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Which scenario a config file is intended for, as an optional sanity tag.
///
/// Serialized in snake_case (`scenario = "cone_sweep"`); the corresponding
/// subcommands use kebab-case per command-line convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    SphereSweep,
    ConeSweep,
    BoostedConeSweep,
    Optimize,
    Compensate,
}

impl Scenario {
    /// Kebab-case name as used for the subcommand and the CSV header.
    pub fn name(self) -> &'static str {
        match self {
            Scenario::SphereSweep => "sphere-sweep",
            Scenario::ConeSweep => "cone-sweep",
            Scenario::BoostedConeSweep => "boosted-cone-sweep",
            Scenario::Optimize => "optimize",
            Scenario::Compensate => "compensate",
        }
    }
}

/// How cone averages are reduced when a scenario needs a single number
/// (the optimizer objective). Sweeps always emit both columns.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Average the CHSH combination pointwise over the cone.
    #[default]
    Literal,
    /// Average the four correlators first, then combine.
    Correlator,
}

/// A one-dimensional sweep grid: either an explicit list of values or a
/// uniformly spaced span. In TOML a list is written as an array
/// (`theta_deg = [0.0, 45.0, 90.0]`) and a span as an inline table
/// (`theta_deg = { start = 0.0, stop = 180.0, count = 181 }`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Linspace { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn linspace(start: f64, stop: f64, count: usize) -> Self {
        Grid::Linspace { start, stop, count }
    }

    /// Materialize the grid, checking it is non-empty, finite, and strictly
    /// increasing. `label` names the grid in error messages.
    pub fn points(&self, label: &str) -> Result<Vec<f64>, CliError> {
        let pts = match self {
            Grid::List(v) => v.clone(),
            Grid::Linspace { start, stop, count } => {
                if *count == 0 {
                    return Err(CliError::config(format!("{label}: count must be >= 1")));
                }
                if *count == 1 {
                    vec![*start]
                } else {
                    let step = (stop - start) / (*count as f64 - 1.0);
                    (0..*count).map(|i| start + step * i as f64).collect()
                }
            }
        };
        if pts.is_empty() {
            return Err(CliError::config(format!("{label}: grid must be non-empty")));
        }
        if pts.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config(format!(
                "{label}: grid values must be finite"
            )));
        }
        if pts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::config(format!(
                "{label}: grid must be strictly increasing"
            )));
        }
        Ok(pts)
    }

    /// Drop grid points above `max`, preserving at least the points at or
    /// below it. Used by the `--theta-prime-max` override.
    fn truncate_above(&mut self, max: f64, label: &str) -> Result<(), CliError> {
        let kept: Vec<f64> = self
            .points(label)?
            .into_iter()
            .filter(|&x| x <= max + 1e-12)
            .collect();
        if kept.is_empty() {
            return Err(CliError::config(format!(
                "{label}: no grid points remain at or below {max}"
            )));
        }
        *self = Grid::List(kept);
        Ok(())
    }

    /// Replace the point count, keeping the span of the current grid.
    fn with_count(&mut self, count: usize, label: &str) -> Result<(), CliError> {
        let pts = self.points(label)?;
        let (start, stop) = (pts[0], pts[pts.len() - 1]);
        if count >= 2 && start == stop {
            return Err(CliError::config(format!(
                "{label}: cannot spread {count} points over the degenerate span [{start}, {stop}]"
            )));
        }
        *self = Grid::linspace(start, stop, count);
        Ok(())
    }
}

/// Measurement directions for both particles, as lab-frame vectors.
/// Magnitudes are ignored (the library normalizes), so `[1, 1, 0]` is a
/// valid way to write the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SettingsSection {
    pub a1: [f64; 3],
    pub a2: [f64; 3],
    pub b1: [f64; 3],
    pub b2: [f64; 3],
}

impl Default for SettingsSection {
    fn default() -> Self {
        SettingsSection {
            a1: [1.0, 0.0, 0.0],
            a2: [0.0, 1.0, 0.0],
            b1: [1.0, 1.0, 0.0],
            b2: [1.0, -1.0, 0.0],
        }
    }
}

/// Kinematic parameters shared by all scenarios (units with c = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsSection {
    /// Speed of particle b in the observer frame, in (0, 1).
    pub speed_b: f64,
    /// Observer boost magnitude along +z relative to the source rest frame.
    pub beta: f64,
    /// Mass of particle b (scales momentum only; directions are mass-free).
    pub mass_b: f64,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        PhysicsSection {
            speed_b: 0.99,
            beta: 0.0,
            mass_b: 1.0,
        }
    }
}

/// Sweep grids, all angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Polar grid for `sphere-sweep`.
    pub theta_deg: Grid,
    /// Azimuthal grid for `sphere-sweep`.
    pub phi_deg: Grid,
    /// Acceptance-angle grid for the cone sweeps.
    pub theta_prime_deg: Grid,
    /// Particle-b speed list for `cone-sweep`.
    pub speeds: Vec<f64>,
    /// Observer boost list for `boosted-cone-sweep`.
    pub betas: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            theta_deg: Grid::linspace(0.0, 180.0, 181),
            phi_deg: Grid::linspace(0.0, 360.0, 361),
            theta_prime_deg: Grid::linspace(0.0, 180.0, 181),
            speeds: vec![0.5, 0.9, 0.99, 0.9999],
            betas: vec![0.0, 0.7, 0.9, 0.99],
        }
    }
}

/// Quadrature resolution for cone averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSection {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = relbell::QuadratureSpec::default();
        QuadratureSection {
            n_theta: q.n_theta,
            n_phi: q.n_phi,
        }
    }
}

/// Parameters for the `optimize` scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    /// Direction of particle b's velocity; magnitude is ignored and
    /// `physics.speed_b` supplies the speed.
    pub v_dir: [f64; 3],
    /// Optional acceptance half-angle in degrees. Absent means optimize the
    /// pointwise value at `v_dir`; present means optimize the cone average.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone_theta_prime_deg: Option<f64>,
    /// Convergence tolerance on the objective across restart rounds.
    pub tol: f64,
    /// Iteration budget per simplex start.
    pub max_iter: usize,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        OptimizeSection {
            v_dir: [0.0, 0.0, 1.0],
            cone_theta_prime_deg: None,
            tol: 1e-9,
            max_iter: 400,
        }
    }
}

/// Parameters for the `compensate` scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompensateSection {
    /// Full velocity vector of the particle whose motion is compensated
    /// (magnitude is the speed, unlike `optimize.v_dir`).
    pub v_com: [f64; 3],
    /// Desired rest-frame quantization axes; magnitudes are normalized away.
    pub targets: Vec<[f64; 3]>,
}

impl Default for CompensateSection {
    fn default() -> Self {
        CompensateSection {
            v_com: [0.99, 0.0, 0.0],
            targets: vec![[1.0, 1.0, 0.0], [1.0, -1.0, 0.0]],
        }
    }
}

/// Where and how results are written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Output file path; absent means stdout.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// Cone-average reduction used where a single objective is needed.
    pub mode: Mode,
}

#[allow(clippy::derivable_impls)]
impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            path: None,
            mode: Mode::Literal,
        }
    }
}

/// Complete scenario configuration. Every section is optional in the file
/// and falls back to its documented default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Optional tag declaring which scenario the file is meant for. When
    /// present it must match the subcommand, catching copy-paste mistakes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    pub settings: SettingsSection,
    pub physics: PhysicsSection,
    pub sweep: SweepSection,
    pub quadrature: QuadratureSection,
    pub optimize: OptimizeSection,
    pub compensate: CompensateSection,
    pub output: OutputSection,
}

/// Flag overrides layered on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub speed_b: Option<f64>,
    pub beta: Option<f64>,
    pub theta_prime_max: Option<f64>,
    pub grid_theta: Option<usize>,
    pub grid_phi: Option<usize>,
    pub quad_theta: Option<usize>,
    pub quad_phi: Option<usize>,
    pub mode: Option<Mode>,
    pub out: Option<String>,
}

impl ScenarioConfig {
    /// Parse a TOML document into a config. Unknown keys are rejected so
    /// typos fail loudly instead of silently using defaults.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config parse error: {e}")))
    }

    /// Serialize the effective config back to TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    /// Apply flag overrides, tag the config with the scenario being run, and
    /// validate the fields every scenario depends on. Grid contents are
    /// validated where they are materialized.
    pub fn finalize(mut self, scenario: Scenario, overrides: &Overrides) -> Result<Self, CliError> {
        if let Some(tagged) = self.scenario {
            if tagged != scenario {
                return Err(CliError::config(format!(
                    "config is tagged for scenario '{}' but subcommand '{}' was invoked",
                    tagged.name(),
                    scenario.name()
                )));
            }
        }
        self.scenario = Some(scenario);

        if let Some(s) = overrides.speed_b {
            self.physics.speed_b = s;
            // The cone sweep draws its speeds from a list; overriding the
            // speed means sweeping at exactly that one speed.
            if scenario == Scenario::ConeSweep {
                self.sweep.speeds = vec![s];
            }
            // Compensation carries the speed inside the velocity vector, so
            // rescale its magnitude and keep the configured direction.
            if scenario == Scenario::Compensate {
                let [x, y, z] = self.compensate.v_com;
                let norm = (x * x + y * y + z * z).sqrt();
                if norm == 0.0 {
                    return Err(CliError::config(
                        "--speed-b needs a direction, but compensate.v_com is the zero vector",
                    ));
                }
                let scale = s / norm;
                self.compensate.v_com = [x * scale, y * scale, z * scale];
            }
        }
        if let Some(b) = overrides.beta {
            self.physics.beta = b;
            if scenario == Scenario::BoostedConeSweep {
                self.sweep.betas = vec![b];
            }
        }
        if let Some(max) = overrides.theta_prime_max {
            if !max.is_finite() || max < 0.0 {
                return Err(CliError::config(format!(
                    "--theta-prime-max must be a finite angle in degrees, got {max}"
                )));
            }
            // The optimizer has a single cone angle rather than a grid; the
            // flag sets it directly (zero means the pointwise problem).
            if scenario == Scenario::Optimize {
                self.optimize.cone_theta_prime_deg = Some(max);
            } else {
                self.sweep
                    .theta_prime_deg
                    .truncate_above(max, "sweep.theta_prime_deg")?;
            }
        }
        if let Some(n) = overrides.grid_theta {
            // The polar-like grid is theta for the sphere sweep and
            // theta-prime for the cone sweeps.
            match scenario {
                Scenario::ConeSweep | Scenario::BoostedConeSweep => self
                    .sweep
                    .theta_prime_deg
                    .with_count(n, "sweep.theta_prime_deg")?,
                _ => self.sweep.theta_deg.with_count(n, "sweep.theta_deg")?,
            }
        }
        if let Some(n) = overrides.grid_phi {
            self.sweep.phi_deg.with_count(n, "sweep.phi_deg")?;
        }
        if let Some(n) = overrides.quad_theta {
            self.quadrature.n_theta = n;
        }
        if let Some(n) = overrides.quad_phi {
            self.quadrature.n_phi = n;
        }
        if let Some(m) = overrides.mode {
            self.output.mode = m;
        }
        if let Some(path) = &overrides.out {
            self.output.path = Some(path.clone());
        }

        let p = &self.physics;
        if !(p.speed_b > 0.0 && p.speed_b < 1.0) {
            return Err(CliError::config(format!(
                "physics.speed_b must lie in (0, 1), got {}",
                p.speed_b
            )));
        }
        if !(p.beta >= 0.0 && p.beta < 1.0) {
            return Err(CliError::config(format!(
                "physics.beta must lie in [0, 1), got {}",
                p.beta
            )));
        }
        if !(p.mass_b > 0.0 && p.mass_b.is_finite()) {
            return Err(CliError::config(format!(
                "physics.mass_b must be positive and finite, got {}",
                p.mass_b
            )));
        }
        Ok(self)
    }

    /// SHA-256 of the serialized effective config, as lowercase hex. Stamped
    /// into the CSV header so outputs are traceable to exact parameters.
    ///
    /// The output path is cleared before hashing: it decides where the data
    /// goes, not what the data is, and the same sweep written to two places
    /// should carry the same hash.
    pub fn sha256(&self) -> String {
        let mut hashed = self.clone();
        hashed.output.path = None;
        let digest = Sha256::digest(hashed.to_toml().as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
        }
        hex
    }
}

/// Convert a polar angle from degrees to radians, clamped into [0, pi] to
/// absorb the rounding of the degree-to-radian conversion at the endpoints
/// (e.g. 180 degrees must map to exactly pi, not one ulp past it).
pub fn polar_deg_to_rad(deg: f64) -> f64 {
    (deg * (PI / 180.0)).clamp(0.0, PI)
}

/// Convert an azimuthal angle from degrees to radians (no clamping; any
/// finite azimuth is meaningful).
pub fn azimuth_deg_to_rad(deg: f64) -> f64 {
    deg * (PI / 180.0)
}
