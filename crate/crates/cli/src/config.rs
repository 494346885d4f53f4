use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stmeta::{AngleGrid, ArrayGeometry, ElementPatternModel, Mode, ModulationConfig};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub rows: usize,
    pub cols: usize,
    pub spacing_wavelengths: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            rows: 8,
            cols: 8,
            spacing_wavelengths: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub theta_deg: f64,
    pub phi_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub cut_step_deg: f64,
    pub hemi_theta_step_deg: f64,
    pub hemi_phi_step_deg: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            cut_step_deg: AngleGrid::DEFAULT_CUT_STEP_DEG,
            hemi_theta_step_deg: AngleGrid::DEFAULT_HEMI_THETA_STEP_DEG,
            hemi_phi_step_deg: AngleGrid::DEFAULT_HEMI_PHI_STEP_DEG,
        }
    }
}

/// Everything a command needs, as read from the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub carrier_hz: f64,
    pub modulation_hz: f64,
    pub clock_hz: f64,
    /// Exponent of the `cos^q` element pattern.
    pub element_q: f64,
    pub scan: ScanConfig,
    pub sll_target_db: f64,
    pub mode: Mode,
    pub harmonic: i32,
    pub grid: GridConfig,
    /// Read from files but never written, so outputs do not depend on where
    /// they were written.
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
    pub seed: u64,
    pub verify_count: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            carrier_hz: 5.5e9,
            modulation_hz: 1e6,
            clock_hz: 64e6,
            element_q: ElementPatternModel::default().exponent,
            scan: ScanConfig::default(),
            sll_target_db: -30.0,
            mode: Mode::AmpPhase,
            harmonic: 1,
            grid: GridConfig::default(),
            out_dir: PathBuf::from("out"),
            seed: 1,
            verify_count: 1000,
        }
    }
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub theta_deg: Option<f64>,
    pub mode: Option<Mode>,
    pub sll_db: Option<f64>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Flag > file > default.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(t) = o.theta_deg {
            self.scan.theta_deg = t;
        }
        if let Some(m) = o.mode {
            self.mode = m;
        }
        if let Some(s) = o.sll_db {
            self.sll_target_db = s;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.out_dir {
            self.out_dir = d.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(CliError::Config(format!("{field}: {msg}")));
        if self.geometry.rows == 0 || self.geometry.cols == 0 {
            return bad("geometry", "rows and cols must be at least 1".into());
        }
        if !(self.geometry.spacing_wavelengths > 0.0 && self.geometry.spacing_wavelengths.is_finite()) {
            return bad(
                "geometry.spacing_wavelengths",
                format!("must be positive, got {}", self.geometry.spacing_wavelengths),
            );
        }
        let modulation = self
            .modulation()
            .map_err(|e| CliError::Config(format!("clock_hz/modulation_hz: {e}")))?;
        if modulation.ticks_per_period() % 4 != 0 {
            return bad(
                "clock_hz",
                format!(
                    "{} ticks per period do not fill whole hex digits of the FPGA bitmask",
                    modulation.ticks_per_period()
                ),
            );
        }
        if !(self.element_q >= 0.0 && self.element_q.is_finite()) {
            return bad("element_q", format!("must be non-negative, got {}", self.element_q));
        }
        if self.scan.theta_deg.is_nan() || self.scan.theta_deg.abs() > 90.0 || !self.scan.phi_deg.is_finite() {
            return bad(
                "scan",
                format!("theta_deg must lie in [-90, 90], got {}", self.scan.theta_deg),
            );
        }
        if !(self.sll_target_db < 0.0 && self.sll_target_db.is_finite()) {
            return bad("sll_target_db", format!("must be negative, got {}", self.sll_target_db));
        }
        if self.mode != Mode::Static && self.harmonic == 0 {
            return bad("harmonic", "time-modulated modes radiate on a nonzero harmonic".into());
        }
        AngleGrid::cut(0.0, self.grid.cut_step_deg).map_err(|e| CliError::Config(format!("grid.cut_step_deg: {e}")))?;
        AngleGrid::hemisphere(self.grid.hemi_theta_step_deg, self.grid.hemi_phi_step_deg)
            .map_err(|e| CliError::Config(format!("grid: {e}")))?;
        Ok(())
    }

    pub fn modulation(&self) -> stmeta::Result<ModulationConfig> {
        ModulationConfig::new(self.carrier_hz, self.modulation_hz, self.clock_hz)
    }

    pub fn geometry(&self) -> stmeta::Result<ArrayGeometry> {
        ArrayGeometry::new(
            self.geometry.rows,
            self.geometry.cols,
            self.geometry.spacing_wavelengths,
        )
    }

    pub fn element_model(&self) -> stmeta::Result<ElementPatternModel> {
        ElementPatternModel::new(self.element_q, ElementPatternModel::DEFAULT_GAIN_DB)
    }

    /// Harmonic carrying the beam for the configured mode.
    pub fn beam_harmonic(&self) -> i32 {
        match self.mode {
            Mode::Static => 0,
            _ => self.harmonic,
        }
    }

    pub fn cut_grid(&self) -> stmeta::Result<AngleGrid> {
        AngleGrid::cut(self.scan.phi_deg.to_radians(), self.grid.cut_step_deg)
    }

    pub fn hemisphere_grid(&self) -> stmeta::Result<AngleGrid> {
        AngleGrid::hemisphere(self.grid.hemi_theta_step_deg, self.grid.hemi_phi_step_deg)
    }
}
