use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use stmeta::oracle::{extract_harmonics_dft, sample_baseband};
use stmeta::pattern::metrics::{self, DEFAULT_MAIN_LOBE_GUARD_DEG};
use stmeta::{
    first_harmonic, harmonic_pattern, route_error, schedule_to_bitmask, static_pattern, sweep_measurement,
    synthesize_schedules, uniform_excitation, AngleGrid, ArrayGeometry, ElementPatternModel, Excitation,
    FarFieldPattern, Mode, ModulationConfig, Provenance, Schedule, ScheduleSet, TickSchedule,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::format::g9;

pub const SCHEDULES_FILE: &str = "schedules.json";
pub const FPGA_TABLE_FILE: &str = "fpga_table.txt";
pub const PATTERN_FILE: &str = "pattern_cut.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const VERIFY_FILE: &str = "verify_report.json";
pub const FAILING_FILE: &str = "failing_schedule.json";
pub const FIGURES_INDEX_FILE: &str = "figures_index.json";

pub const ORACLE_THRESHOLD: f64 = 1e-12;
pub const ROUTE_THRESHOLD: f64 = 1e-9;
pub const VERIFY_K_MAX: usize = 10;
pub const FIGURE_ANGLES_DEG: [f64; 4] = [0.0, 15.0, 30.0, 45.0];

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_file(path, &text)
}

fn prepare_out_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out_dir).map_err(|source| CliError::Io {
        path: cfg.out_dir.clone(),
        source,
    })?;
    Ok(&cfg.out_dir)
}

/// Element set-up shared by every command.
struct Aperture {
    geometry: ArrayGeometry,
    excitation: Excitation,
    model: ElementPatternModel,
    modulation: ModulationConfig,
}

impl Aperture {
    fn from_config(cfg: &RunConfig) -> Result<Self> {
        let geometry = cfg.geometry()?;
        Ok(Self {
            excitation: uniform_excitation(&geometry),
            geometry,
            model: cfg.element_model()?,
            modulation: cfg.modulation()?,
        })
    }
}

/// Quantized schedules for the configured scan and mode.
pub fn synthesize(cfg: &RunConfig) -> Result<ScheduleSet> {
    let ap = Aperture::from_config(cfg)?;
    Ok(synthesize_schedules(
        &ap.geometry,
        &ap.excitation,
        cfg.sll_target_db,
        cfg.scan.theta_deg.to_radians(),
        cfg.scan.phi_deg.to_radians(),
        cfg.mode,
        &ap.modulation,
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub row: usize,
    pub col: usize,
    pub tau_on_ticks: u32,
    pub tau_off_ticks: u32,
    pub delay_ticks: u32,
    pub alpha1_magnitude: f64,
    pub alpha1_phase_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub config: RunConfig,
    pub ticks_per_period: u32,
    pub harmonic_hz: f64,
    pub elements: Vec<ElementRecord>,
}

impl ScheduleFile {
    fn from_set(cfg: &RunConfig, set: &ScheduleSet) -> Result<Self> {
        let ticks = set.tick_schedules()?;
        let elements = ticks
            .iter()
            .zip(set.schedules())
            .enumerate()
            .map(|(e, (t, s))| {
                let a = first_harmonic(s);
                ElementRecord {
                    row: e / set.cols(),
                    col: e % set.cols(),
                    tau_on_ticks: t.on,
                    tau_off_ticks: t.off,
                    delay_ticks: t.delay,
                    alpha1_magnitude: a.norm(),
                    alpha1_phase_deg: a.arg().to_degrees(),
                }
            })
            .collect();
        Ok(Self {
            config: cfg.clone(),
            ticks_per_period: set.config().ticks_per_period(),
            harmonic_hz: set.config().harmonic_frequency(cfg.beam_harmonic()),
            elements,
        })
    }

    fn to_set(&self) -> Result<ScheduleSet> {
        let cfg = &self.config;
        cfg.validate()?;
        let modulation = cfg.modulation()?;
        if modulation.ticks_per_period() != self.ticks_per_period {
            return Err(CliError::Config(format!(
                "ticks_per_period {} does not match the stored clock ({} ticks)",
                self.ticks_per_period,
                modulation.ticks_per_period()
            )));
        }
        let (rows, cols) = (cfg.geometry.rows, cfg.geometry.cols);
        if self.elements.len() != rows * cols {
            return Err(CliError::Config(format!(
                "elements: {} records for a {rows}x{cols} array",
                self.elements.len()
            )));
        }
        let schedules = self
            .elements
            .iter()
            .enumerate()
            .map(|(e, r)| {
                if (r.row, r.col) != (e / cols, e % cols) {
                    return Err(CliError::Config(format!(
                        "elements[{e}]: expected row {} col {}, found row {} col {}",
                        e / cols,
                        e % cols,
                        r.row,
                        r.col
                    )));
                }
                let t = TickSchedule {
                    on: r.tau_on_ticks,
                    off: r.tau_off_ticks,
                    delay: r.delay_ticks,
                };
                Schedule::from_ticks(t, &modulation).map_err(|err| CliError::Config(format!("elements[{e}]: {err}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let provenance = Provenance {
            scan_theta: cfg.scan.theta_deg.to_radians(),
            scan_phi: cfg.scan.phi_deg.to_radians(),
            sll_db: cfg.sll_target_db,
            mode: cfg.mode,
        };
        Ok(ScheduleSet::new(rows, cols, modulation, schedules, provenance)?)
    }
}

fn fpga_table(set: &ScheduleSet) -> Result<String> {
    let mut out = String::new();
    for (e, s) in set.schedules().iter().enumerate() {
        let mask = schedule_to_bitmask(s, set.config())?;
        writeln!(out, "{} {} 0x{}", e / set.cols(), e % set.cols(), mask.to_hex()).expect("string write");
    }
    Ok(out)
}

/// Synthesizes and writes `schedules.json` and `fpga_table.txt`.
pub fn run_synthesize(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let set = synthesize(cfg)?;
    let dir = prepare_out_dir(cfg)?;
    let schedules = dir.join(SCHEDULES_FILE);
    let table = dir.join(FPGA_TABLE_FILE);
    write_json(&schedules, &ScheduleFile::from_set(cfg, &set)?)?;
    write_file(&table, &fpga_table(&set)?)?;
    Ok(vec![schedules, table])
}

/// Reads a `schedules.json` back into its config and schedule set.
pub fn load_schedules(path: &Path) -> Result<(RunConfig, ScheduleSet)> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: ScheduleFile =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let set = file.to_set()?;
    Ok((file.config, set))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternMetrics {
    pub sll_db: f64,
    pub hpbw_deg: f64,
    pub pointing_deg: f64,
    pub directivity_dbi: f64,
    pub harmonic_hz: f64,
}

#[derive(Debug, Clone)]
pub struct PatternOutcome {
    pub cut: FarFieldPattern,
    pub metrics: PatternMetrics,
}

fn beam_pattern(cfg: &RunConfig, ap: &Aperture, set: &ScheduleSet, grid: &AngleGrid) -> Result<FarFieldPattern> {
    let pattern = match set.provenance().mode {
        Mode::Static => {
            let code = set
                .static_code()
                .ok_or_else(|| CliError::Config("static mode needs constant schedules".into()))?;
            static_pattern(&ap.geometry, &ap.excitation, &code, &ap.model, grid)?
        }
        _ => {
            let k = cfg.beam_harmonic();
            let spectrum = set.spectrum(k.unsigned_abs() as usize);
            harmonic_pattern(&ap.geometry, &ap.excitation, &spectrum, &ap.model, grid, k)?
        }
    };
    Ok(pattern)
}

/// Cut at the scan azimuth plus its metrics; directivity uses the hemisphere.
pub fn compute_pattern(cfg: &RunConfig, set: &ScheduleSet) -> Result<PatternOutcome> {
    let ap = Aperture::from_config(cfg)?;
    let cut = beam_pattern(cfg, &ap, set, &cfg.cut_grid()?)?;
    let hemi = beam_pattern(cfg, &ap, set, &cfg.hemisphere_grid()?)?;
    let metrics = PatternMetrics {
        sll_db: metrics::sll(&cut, DEFAULT_MAIN_LOBE_GUARD_DEG)?,
        hpbw_deg: metrics::hpbw(&cut)?,
        pointing_deg: metrics::pointing(&cut)?,
        directivity_dbi: metrics::directivity(&hemi)?,
        harmonic_hz: ap.modulation.harmonic_frequency(cfg.beam_harmonic()),
    };
    Ok(PatternOutcome { cut, metrics })
}

fn cut_csv(pattern: &FarFieldPattern) -> String {
    let theta = pattern.grid.cut_angles().expect("cut grid");
    let mut out = String::from("theta_deg,power_db\n");
    for (t, p) in theta.iter().zip(pattern.power_db()) {
        writeln!(out, "{},{}", g9(t.to_degrees()), g9(p)).expect("string write");
    }
    out
}

/// Writes `pattern_cut.csv` and `metrics.json`, synthesizing inline unless
/// a schedule set is supplied.
pub fn run_pattern(cfg: &RunConfig, schedules: Option<&ScheduleSet>) -> Result<(PatternOutcome, Vec<PathBuf>)> {
    let owned;
    let set = match schedules {
        Some(s) => s,
        None => {
            owned = synthesize(cfg)?;
            &owned
        }
    };
    let outcome = compute_pattern(cfg, set)?;
    let dir = prepare_out_dir(cfg)?;
    let csv = dir.join(PATTERN_FILE);
    let json = dir.join(METRICS_FILE);
    write_file(&csv, &cut_csv(&outcome.cut))?;
    write_json(&json, &outcome.metrics)?;
    Ok((outcome, vec![csv, json]))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Negative control: flips the exponent sign of the analytic
    /// coefficients so the oracle must reject them.
    pub inject_sign_bug: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailingSchedule {
    pub index: usize,
    pub seed: u64,
    pub tau_on_ticks: u32,
    pub tau_off_ticks: u32,
    pub delay_ticks: u32,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub schedule_count: usize,
    pub k_max: usize,
    pub samples_per_period: usize,
    pub max_oracle_error: f64,
    pub oracle_threshold: f64,
    pub route_max_relative_error: f64,
    pub route_threshold: f64,
    pub pass: bool,
    pub warnings: Vec<String>,
    pub failing_schedule: Option<FailingSchedule>,
}

fn random_tick_schedules(rng: &mut ChaCha8Rng, n: usize, cfg: &ModulationConfig) -> Vec<Schedule> {
    let ticks = cfg.ticks_per_period();
    (0..n)
        .map(|_| {
            let a = rng.gen_range(0..=ticks);
            let b = rng.gen_range(0..=ticks);
            let t = TickSchedule {
                on: a.min(b),
                off: a.max(b),
                delay: rng.gen_range(0..ticks),
            };
            Schedule::from_ticks(t, cfg).expect("ticks in range")
        })
        .collect()
}

/// Per-schedule max |analytic − DFT| over `|k| <= k_max`.
fn oracle_errors(
    schedules: &[Schedule],
    cfg: &ModulationConfig,
    samples: usize,
    opts: VerifyOptions,
) -> Result<Vec<f64>> {
    if schedules.is_empty() {
        return Ok(Vec::new());
    }
    let provenance = Provenance {
        scan_theta: 0.0,
        scan_phi: 0.0,
        sll_db: -30.0,
        mode: Mode::AmpPhase,
    };
    let set = ScheduleSet::new(schedules.len(), 1, *cfg, schedules.to_vec(), provenance)?;
    let oracle = extract_harmonics_dft(&sample_baseband(&set, samples)?, VERIFY_K_MAX)?;
    let mut analytic = set.spectrum(VERIFY_K_MAX);
    if opts.inject_sign_bug {
        for row in analytic.coefficients_mut() {
            row.iter_mut().for_each(|a: &mut Complex64| *a = a.conj());
        }
    }
    Ok(analytic
        .coefficients()
        .iter()
        .zip(oracle.coefficients())
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
        .collect())
}

fn route_errors(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<f64> {
    let ap = Aperture::from_config(cfg)?;
    let mut worst: f64 = 0.0;

    let set = synthesize(cfg)?;
    let k = cfg.beam_harmonic();
    let grid = cfg.cut_grid()?;
    let spectrum = set.spectrum(k.unsigned_abs() as usize);
    let p = harmonic_pattern(&ap.geometry, &ap.excitation, &spectrum, &ap.model, &grid, k)?;
    let s = sweep_measurement(&set, &ap.geometry, &ap.excitation, &ap.model, &grid, k)?;
    worst = worst.max(route_error(&s, &p)?);

    let random = random_tick_schedules(rng, ap.geometry.len(), &ap.modulation);
    let set = ScheduleSet::new(
        ap.geometry.rows(),
        ap.geometry.cols(),
        ap.modulation,
        random,
        *set.provenance(),
    )?;
    let grid = cfg.hemisphere_grid()?;
    let p = harmonic_pattern(&ap.geometry, &ap.excitation, &set.spectrum(1), &ap.model, &grid, 1)?;
    if p.peak().1 > 0.0 {
        let s = sweep_measurement(&set, &ap.geometry, &ap.excitation, &ap.model, &grid, 1)?;
        worst = worst.max(route_error(&s, &p)?);
    }
    Ok(worst)
}

/// Checks analytic coefficients against the DFT oracle on seeded random
/// schedules, and analytic patterns against the simulated sweep.
///
/// The report is always written; a failing schedule is also written to
/// `failing_schedule.json`. The caller decides the exit status from
/// [`VerifyReport::pass`].
pub fn run_verify(cfg: &RunConfig, opts: VerifyOptions) -> Result<(VerifyReport, Vec<PathBuf>)> {
    let modulation = cfg.modulation()?;
    let samples = modulation.ticks_per_period() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let schedules = random_tick_schedules(&mut rng, cfg.verify_count, &modulation);
    let errors = oracle_errors(&schedules, &modulation, samples, opts)?;

    let mut warnings = Vec::new();
    if schedules.is_empty() {
        warnings.push("no random schedules requested; oracle check passes vacuously".to_string());
    }
    let worst = errors
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &e)| match best {
            Some((_, b)) if b >= e => best,
            _ => Some((i, e)),
        });
    let max_oracle_error = worst.map_or(0.0, |(_, e)| e);
    let route = route_errors(cfg, &mut rng)?;

    let oracle_ok = max_oracle_error <= ORACLE_THRESHOLD;
    let failing_schedule = match worst {
        Some((index, error)) if !oracle_ok => {
            let t = schedules[index].to_ticks(&modulation)?;
            Some(FailingSchedule {
                index,
                seed: cfg.seed,
                tau_on_ticks: t.on,
                tau_off_ticks: t.off,
                delay_ticks: t.delay,
                error,
            })
        }
        _ => None,
    };
    let report = VerifyReport {
        seed: cfg.seed,
        schedule_count: schedules.len(),
        k_max: VERIFY_K_MAX,
        samples_per_period: samples,
        max_oracle_error,
        oracle_threshold: ORACLE_THRESHOLD,
        route_max_relative_error: route,
        route_threshold: ROUTE_THRESHOLD,
        pass: oracle_ok && route <= ROUTE_THRESHOLD,
        warnings,
        failing_schedule,
    };

    let dir = prepare_out_dir(cfg)?;
    let path = dir.join(VERIFY_FILE);
    write_json(&path, &report)?;
    let mut written = vec![path];
    if let Some(f) = &report.failing_schedule {
        let path = dir.join(FAILING_FILE);
        write_json(&path, f)?;
        written.push(path);
    }
    Ok((report, written))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureEntry {
    pub file: String,
    pub mode: Mode,
    pub theta_deg: f64,
    pub harmonic: i32,
    pub harmonic_hz: f64,
    pub sll_db: Option<f64>,
    pub hpbw_deg: Option<f64>,
    pub pointing_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureIndex {
    pub phi_deg: f64,
    pub entries: Vec<FigureEntry>,
}

pub fn figure_file_name(mode: Mode, theta_deg: f64) -> String {
    format!("cut_{}_{}deg.csv", mode.as_str(), g9(theta_deg))
}

/// Cuts for every scan angle and mode, plus an index.
pub fn run_figures(cfg: &RunConfig) -> Result<(FigureIndex, Vec<PathBuf>)> {
    let ap = Aperture::from_config(cfg)?;
    let dir = prepare_out_dir(cfg)?.to_path_buf();
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for theta in FIGURE_ANGLES_DEG {
        for mode in Mode::ALL {
            let mut c = cfg.clone();
            c.scan.theta_deg = theta;
            c.mode = mode;
            let set = synthesize(&c)?;
            let cut = beam_pattern(&c, &ap, &set, &c.cut_grid()?)?;
            let file = figure_file_name(mode, theta);
            let path = dir.join(&file);
            write_file(&path, &cut_csv(&cut))?;
            written.push(path);
            entries.push(FigureEntry {
                file,
                mode,
                theta_deg: theta,
                harmonic: c.beam_harmonic(),
                harmonic_hz: ap.modulation.harmonic_frequency(c.beam_harmonic()),
                sll_db: metrics::sll(&cut, DEFAULT_MAIN_LOBE_GUARD_DEG).ok(),
                hpbw_deg: metrics::hpbw(&cut).ok(),
                pointing_deg: metrics::pointing(&cut).ok(),
            });
        }
    }
    let index = FigureIndex {
        phi_deg: cfg.scan.phi_deg,
        entries,
    };
    let path = dir.join(FIGURES_INDEX_FILE);
    write_json(&path, &index)?;
    written.push(path);
    Ok((index, written))
}
