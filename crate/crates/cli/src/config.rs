//! Run configuration: defaults, JSON config file, command-line overrides.

use std::path::Path;

use aim_dirac::aim::DEFAULT_DEPTH;
use aim_dirac::fd::{RadialGrid, DEFAULT_H, DEFAULT_R_MAX, DEFAULT_R_MIN};
use aim_dirac::spectrum::KummerMode;
use aim_dirac::{PhysicalSetup, SpinorComponent};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum Engine {
    ClosedForm,
    Aim,
    FdOracle,
    All,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::ClosedForm => "closed-form",
            Engine::Aim => "aim",
            Engine::FdOracle => "fd-oracle",
            Engine::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// FD grid as the user states it; the solver adjusts `h` so that the cells
/// tile `[rMin, rMax]` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub h: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { r_min: DEFAULT_R_MIN, r_max: DEFAULT_R_MAX, h: DEFAULT_H }
    }
}

impl GridSpec {
    pub fn build(&self) -> aim_dirac::Result<RadialGrid> {
        RadialGrid::new(self.r_min, self.r_max, self.h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct RunConfig {
    pub schema_version: u32,
    pub setup: PhysicalSetup,
    pub component: SpinorComponent,
    pub n_max: usize,
    pub engine: Engine,
    pub aim_depth: usize,
    pub aim_point: Option<f64>,
    pub grid: Option<GridSpec>,
    pub output_format: OutputFormat,
    pub kummer_mode: KummerMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            setup: PhysicalSetup { m0: 1.0, v0: -0.5, b: 2.0, k: -1 },
            component: SpinorComponent::Upper,
            n_max: 3,
            engine: Engine::ClosedForm,
            aim_depth: DEFAULT_DEPTH,
            aim_point: None,
            grid: None,
            output_format: OutputFormat::Csv,
            kummer_mode: KummerMode::OdeConsistent,
        }
    }
}

/// Values given on the command line; `None` leaves the lower layer alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub m0: Option<f64>,
    pub v0: Option<f64>,
    pub b: Option<f64>,
    pub k: Option<i64>,
    pub component: Option<SpinorComponent>,
    pub n_max: Option<usize>,
    pub engine: Option<Engine>,
    pub aim_depth: Option<usize>,
    pub aim_point: Option<f64>,
    pub grid_r_min: Option<f64>,
    pub grid_r_max: Option<f64>,
    pub grid_h: Option<f64>,
    pub format: Option<OutputFormat>,
    pub kummer_mode: Option<KummerMode>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let config: Self = serde_json::from_str(text).map_err(|e| format!("config: {e}"))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "config: schemaVersion {} is not supported (expected {SCHEMA_VERSION})",
                config.schema_version
            ));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        let s = &mut self.setup;
        s.m0 = o.m0.unwrap_or(s.m0);
        s.v0 = o.v0.unwrap_or(s.v0);
        s.b = o.b.unwrap_or(s.b);
        s.k = o.k.unwrap_or(s.k);
        self.component = o.component.unwrap_or(self.component);
        self.n_max = o.n_max.unwrap_or(self.n_max);
        self.engine = o.engine.unwrap_or(self.engine);
        self.aim_depth = o.aim_depth.unwrap_or(self.aim_depth);
        if o.aim_point.is_some() {
            self.aim_point = o.aim_point;
        }
        if o.grid_r_min.is_some() || o.grid_r_max.is_some() || o.grid_h.is_some() {
            let mut g = self.grid.unwrap_or_default();
            g.r_min = o.grid_r_min.unwrap_or(g.r_min);
            g.r_max = o.grid_r_max.unwrap_or(g.r_max);
            g.h = o.grid_h.unwrap_or(g.h);
            self.grid = Some(g);
        }
        self.output_format = o.format.unwrap_or(self.output_format);
        self.kummer_mode = o.kummer_mode.unwrap_or(self.kummer_mode);
    }

    /// Checks ranges; errors here are usage errors.
    pub fn validate(&self) -> Result<(), String> {
        self.setup.validate().map_err(|e| e.to_string())?;
        if self.aim_depth == 0 {
            return Err("aimDepth must be >= 1".into());
        }
        if let Some(r0) = self.aim_point {
            if !(r0 > 0.0 && r0.is_finite()) {
                return Err(format!("aimPoint must be > 0, got {r0}"));
            }
        }
        self.radial_grid().map(|_| ()).map_err(|e| e.to_string())
    }

    pub fn radial_grid(&self) -> aim_dirac::Result<RadialGrid> {
        self.grid.unwrap_or_default().build()
    }
}
