//! Time-domain validation route.
//!
//! Instead of the closed-form coefficients, this module samples the actual
//! ±1 switching waveforms, forms received signals, and extracts harmonics
//! by a DFT. Samples are taken at segment midpoints, and every schedule
//! edge sits on a segment boundary, so each sample is the exact value over
//! its segment. The continuous Fourier coefficient of such a
//! piecewise-constant signal equals the midpoint DFT bin times the segment
//! hold response `sin(πk/S) / (πk/S)`, which is applied here. The result
//! is exact up to rounding with no windowing involved.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::array::{ArrayGeometry, ElementPatternModel, Excitation};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::modulation::{waveform_at, HarmonicSpectrum, ModulationConfig, Schedule};
use crate::pattern::{steering_vector, AngleGrid, FarFieldPattern};
use crate::synthesis::ScheduleSet;

/// One modulation period of baseband samples per element.
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandRecord {
    samples_per_period: usize,
    samples: Vec<Vec<Complex64>>,
}

impl BasebandRecord {
    pub fn samples_per_period(&self) -> usize {
        self.samples_per_period
    }

    pub fn element_count(&self) -> usize {
        self.samples.len()
    }

    pub fn element(&self, e: usize) -> &[Complex64] {
        &self.samples[e]
    }
}

fn check_sample_count(samples_per_period: usize, config: &ModulationConfig) -> Result<()> {
    let ticks = config.ticks_per_period() as usize;
    if samples_per_period == 0 || !samples_per_period.is_multiple_of(ticks) {
        return Err(Error::InvalidArgument(format!(
            "samples per period ({samples_per_period}) must be a positive multiple of {ticks} ticks"
        )));
    }
    Ok(())
}

/// Midpoint samples of one schedule over one period, as `±1 + 0j`.
pub fn sample_schedule(
    schedule: &Schedule,
    samples_per_period: usize,
    config: &ModulationConfig,
) -> Result<Vec<Complex64>> {
    check_sample_count(samples_per_period, config)?;
    let period = config.period();
    let s = samples_per_period as f64;
    Ok((0..samples_per_period)
        .map(|i| Complex64::new(waveform_at(schedule, (i as f64 + 0.5) / s * period), 0.0))
        .collect())
}

pub fn sample_baseband(set: &ScheduleSet, samples_per_period: usize) -> Result<BasebandRecord> {
    let samples = set
        .schedules()
        .iter()
        .map(|s| sample_schedule(s, samples_per_period, set.config()))
        .collect::<Result<Vec<_>>>()?;
    Ok(BasebandRecord {
        samples_per_period,
        samples,
    })
}

/// `sin(πk/S) / (πk/S)`: average of `e^{-jkWt}` over one sample segment
/// relative to its midpoint value.
fn hold_response(k: i32, samples: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let x = PI * k as f64 / samples as f64;
    x.sin() / x
}

/// `e^{-j 2π k (i + 1/2) / S}` for `i = 0..S`, scaled by the hold response
/// and `1/S`.
fn dft_kernel(k: i32, samples: usize) -> Vec<Complex64> {
    let two_s = 2 * samples as i64;
    let scale = hold_response(k, samples) / samples as f64;
    (0..samples as i64)
        .map(|i| {
            let m = (k as i64 * (2 * i + 1)).rem_euclid(two_s);
            Complex64::from_polar(scale, -PI * m as f64 / samples as f64)
        })
        .collect()
}

fn check_nyquist(k_max: usize, samples: usize) -> Result<()> {
    if k_max + 1 > samples / 2 {
        return Err(Error::InvalidArgument(format!(
            "harmonic {k_max} is beyond Nyquist for {samples} samples per period"
        )));
    }
    Ok(())
}

fn dft_bin(samples: &[Complex64], kernel: &[Complex64]) -> Complex64 {
    samples.iter().zip(kernel).map(|(s, w)| s * w).sum()
}

/// Harmonic coefficients `α^k`, `|k| ≤ k_max`, recovered from samples.
pub fn extract_harmonics_dft(record: &BasebandRecord, k_max: usize) -> Result<HarmonicSpectrum> {
    let s = record.samples_per_period;
    check_nyquist(k_max, s)?;
    let k = k_max as i32;
    let kernels: Vec<Vec<Complex64>> = (-k..=k).map(|h| dft_kernel(h, s)).collect();
    let coefficients = record
        .samples
        .iter()
        .map(|x| kernels.iter().map(|kern| dft_bin(x, kern)).collect())
        .collect();
    HarmonicSpectrum::new(k_max, coefficients)
}

/// Largest coefficient difference between two spectra.
pub fn compare_spectra(analytic: &HarmonicSpectrum, oracle: &HarmonicSpectrum) -> Result<f64> {
    if analytic.k_max() != oracle.k_max() || analytic.element_count() != oracle.element_count() {
        return Err(Error::InvalidArgument(format!(
            "spectra differ in shape: {} elements ±{} vs {} elements ±{}",
            analytic.element_count(),
            analytic.k_max(),
            oracle.element_count(),
            oracle.k_max()
        )));
    }
    Ok(analytic
        .coefficients()
        .iter()
        .zip(oracle.coefficients())
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max))
}

/// Analytic-vs-DFT error for every schedule, in input order.
pub fn oracle_errors_with(
    exec: Execution,
    schedules: &[Schedule],
    k_max: usize,
    samples_per_period: usize,
    config: &ModulationConfig,
) -> Result<Vec<f64>> {
    check_sample_count(samples_per_period, config)?;
    check_nyquist(k_max, samples_per_period)?;
    let k = k_max as i32;
    let kernels: Vec<Vec<Complex64>> = (-k..=k).map(|h| dft_kernel(h, samples_per_period)).collect();
    let errors = exec.map(schedules.len(), |i| {
        let s = &schedules[i];
        let x = sample_schedule(s, samples_per_period, config).expect("sample count checked");
        (-k..=k)
            .zip(&kernels)
            .map(|(h, kern)| (crate::modulation::harmonic_coefficient(s, h) - dft_bin(&x, kern)).norm())
            .fold(0.0, f64::max)
    });
    Ok(errors)
}

/// Received harmonic versus angle from a simulated turntable sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: AngleGrid,
    pub harmonic: i32,
    pub frequency_hz: f64,
    pub received: Vec<Complex64>,
}

impl SweepResult {
    pub fn magnitude(&self) -> Vec<f64> {
        self.received.iter().map(|r| r.norm()).collect()
    }

    pub fn into_pattern(self) -> FarFieldPattern {
        FarFieldPattern {
            grid: self.grid,
            field: self.received,
            harmonic: self.harmonic,
        }
    }
}

pub fn sweep_measurement(
    set: &ScheduleSet,
    geometry: &ArrayGeometry,
    excitation: &Excitation,
    model: &ElementPatternModel,
    grid: &AngleGrid,
    k: i32,
) -> Result<SweepResult> {
    sweep_measurement_with(Execution::default(), set, geometry, excitation, model, grid, k)
}

/// For every angle: sum the element basebands with their feed and
/// geometric phases into one received period, then read DFT bin `k`.
pub fn sweep_measurement_with(
    exec: Execution,
    set: &ScheduleSet,
    geometry: &ArrayGeometry,
    excitation: &Excitation,
    model: &ElementPatternModel,
    grid: &AngleGrid,
    k: i32,
) -> Result<SweepResult> {
    if set.len() != geometry.len() || excitation.len() != geometry.len() {
        return Err(Error::InvalidArgument(format!(
            "{} schedules and {} feed entries for {} elements",
            set.len(),
            excitation.len(),
            geometry.len()
        )));
    }
    set.tick_schedules()?;
    let samples = set.config().ticks_per_period() as usize;
    check_nyquist(k.unsigned_abs() as usize, samples)?;
    let record = sample_baseband(set, samples)?;
    let kernel = dft_kernel(k, samples);
    let feed: Vec<Complex64> = excitation
        .amplitude()
        .iter()
        .zip(excitation.phase())
        .map(|(&a, &p)| Complex64::from_polar(a, p))
        .collect();

    let received = exec.map(grid.len(), |i| {
        let (theta, phi) = grid.direction(i);
        let ef = model.factor(theta);
        let gains: Vec<Complex64> = steering_vector(geometry, theta, phi)
            .zip(&feed)
            .map(|(s, f)| s * f * ef)
            .collect();
        let mut signal = vec![Complex64::new(0.0, 0.0); samples];
        for (g, x) in gains.iter().zip(&record.samples) {
            for (acc, v) in signal.iter_mut().zip(x) {
                *acc += g * v;
            }
        }
        dft_bin(&signal, &kernel)
    });
    Ok(SweepResult {
        grid: grid.clone(),
        harmonic: k,
        frequency_hz: set.config().harmonic_frequency(k),
        received,
    })
}

/// Largest pointwise magnitude difference between a sweep and a pattern,
/// relative to the pattern peak.
pub fn route_error(sweep: &SweepResult, pattern: &FarFieldPattern) -> Result<f64> {
    if sweep.received.len() != pattern.field.len() || sweep.grid != pattern.grid {
        return Err(Error::InvalidArgument("sweep and pattern use different grids".into()));
    }
    let (_, peak) = pattern.peak();
    if peak <= 0.0 {
        return Err(Error::InvalidArgument("reference pattern is identically zero".into()));
    }
    Ok(sweep
        .received
        .iter()
        .zip(&pattern.field)
        .map(|(s, p)| (s.norm() - p.norm()).abs() / peak)
        .fold(0.0, f64::max))
}
