//! Periodic binary-phase switching: waveforms, exact harmonic coefficients,
//! duty-cycle and delay mappings, and clock-grid quantization.
//!
//! A [`Schedule`] drives one element between its two phase states. The
//! π state maps to `+1` on `(tau_on, tau_off]` of each period and the 0
//! state to `-1` elsewhere; the whole waveform is then cyclically delayed
//! by `delay`. The +1st harmonic of that waveform is what the aperture
//! radiates at `f_c + 1/T_p`.

use std::f64::consts::{FRAC_2_PI, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Timing shared by every element: modulation period, carrier and FPGA clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationConfig {
    carrier_hz: f64,
    modulation_hz: f64,
    clock_hz: f64,
    ticks_per_period: u32,
}

impl ModulationConfig {
    pub fn new(carrier_hz: f64, modulation_hz: f64, clock_hz: f64) -> Result<Self> {
        for (name, v) in [
            ("carrier_hz", carrier_hz),
            ("modulation_hz", modulation_hz),
            ("clock_hz", clock_hz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        let ratio = clock_hz / modulation_hz;
        let ticks = ratio.round();
        if (ratio - ticks).abs() > 1e-9 * ratio {
            return Err(Error::InvalidArgument(format!(
                "clock_hz ({clock_hz}) must be an integer multiple of modulation_hz ({modulation_hz})"
            )));
        }
        if !(2.0..=u32::MAX as f64).contains(&ticks) {
            return Err(Error::InvalidArgument(format!(
                "a modulation period must span at least 2 clock ticks, got {ticks}"
            )));
        }
        Ok(Self {
            carrier_hz,
            modulation_hz,
            clock_hz,
            ticks_per_period: ticks as u32,
        })
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn modulation_hz(&self) -> f64 {
        self.modulation_hz
    }

    pub fn clock_hz(&self) -> f64 {
        self.clock_hz
    }

    pub fn ticks_per_period(&self) -> u32 {
        self.ticks_per_period
    }

    /// `T_p` in seconds.
    pub fn period(&self) -> f64 {
        1.0 / self.modulation_hz
    }

    /// `W_p = 2π / T_p` in rad/s.
    pub fn angular_rate(&self) -> f64 {
        TAU * self.modulation_hz
    }

    pub fn tick(&self) -> f64 {
        self.period() / self.ticks_per_period as f64
    }

    /// Frequency at which harmonic `k` radiates.
    pub fn harmonic_frequency(&self, k: i32) -> f64 {
        self.carrier_hz + k as f64 * self.modulation_hz
    }

    /// Smallest delay-phase step on the +1st harmonic (`2π / ticks`).
    pub fn phase_step(&self) -> f64 {
        TAU / self.ticks_per_period as f64
    }

    fn ticks_to_seconds(&self, ticks: u32) -> f64 {
        self.period() * (ticks as f64 / self.ticks_per_period as f64)
    }
}

impl Default for ModulationConfig {
    /// 5.5 GHz carrier, 1 MHz modulation, 64 MHz clock.
    fn default() -> Self {
        Self::new(5.5e9, 1e6, 64e6).expect("default timing is consistent")
    }
}

/// One element's periodic switching law, all times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    tau_on: f64,
    tau_off: f64,
    delay: f64,
    period: f64,
}

impl Schedule {
    pub fn new(tau_on: f64, tau_off: f64, delay: f64, config: &ModulationConfig) -> Result<Self> {
        let period = config.period();
        let ok = tau_on.is_finite()
            && tau_off.is_finite()
            && delay.is_finite()
            && 0.0 <= tau_on
            && tau_on <= tau_off
            && tau_off <= period
            && 0.0 <= delay
            && delay < period;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "schedule needs 0 <= tau_on <= tau_off <= T_p and 0 <= delay < T_p \
                 (tau_on={tau_on}, tau_off={tau_off}, delay={delay}, T_p={period})"
            )));
        }
        Ok(Self {
            tau_on,
            tau_off,
            delay,
            period,
        })
    }

    pub fn from_ticks(ticks: TickSchedule, config: &ModulationConfig) -> Result<Self> {
        let n = config.ticks_per_period();
        if ticks.on > ticks.off || ticks.off > n || ticks.delay >= n {
            return Err(Error::InvalidArgument(format!(
                "tick schedule {ticks:?} is inconsistent with {n} ticks per period"
            )));
        }
        Ok(Self {
            tau_on: config.ticks_to_seconds(ticks.on),
            tau_off: config.ticks_to_seconds(ticks.off),
            delay: config.ticks_to_seconds(ticks.delay),
            period: config.period(),
        })
    }

    pub fn tau_on(&self) -> f64 {
        self.tau_on
    }

    pub fn tau_off(&self) -> f64 {
        self.tau_off
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    /// Time spent in the π state per period.
    pub fn duty(&self) -> f64 {
        self.tau_off - self.tau_on
    }

    /// Timings expressed in clock ticks; fails unless every timing sits on
    /// the clock grid.
    pub fn to_ticks(&self, config: &ModulationConfig) -> Result<TickSchedule> {
        let n = config.ticks_per_period() as f64;
        let conv = |name: &str, t: f64| -> Result<u32> {
            let x = t / self.period * n;
            let r = x.round();
            if (x - r).abs() > 1e-6 {
                return Err(Error::NotQuantized(format!(
                    "{name} = {x} ticks is not an integer tick count"
                )));
            }
            Ok(r as u32)
        };
        Ok(TickSchedule {
            on: conv("tau_on", self.tau_on)?,
            off: conv("tau_off", self.tau_off)?,
            delay: conv("delay", self.delay)?,
        })
    }
}

/// A schedule on the clock grid, counted in ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TickSchedule {
    pub on: u32,
    pub off: u32,
    pub delay: u32,
}

/// Waveform value (`+1` in the π state, `-1` in the 0 state) at time `t`.
pub fn waveform_at(schedule: &Schedule, t: f64) -> f64 {
    let mut local = (t - schedule.delay).rem_euclid(schedule.period);
    // g is defined on (0, T_p]; t = 0 is the end of the previous period.
    if local == 0.0 {
        local = schedule.period;
    }
    if schedule.tau_on < local && local <= schedule.tau_off {
        1.0
    } else {
        -1.0
    }
}

/// Exact Fourier coefficient `α^k` of the delayed switching waveform.
///
/// For `k ≠ 0`: `(j / πk)(e^{-jkW τ_off} - e^{-jkW τ_on}) e^{-jkW u}`;
/// for `k = 0` the mean value `2(τ_off - τ_on)/T_p - 1`.
pub fn harmonic_coefficient(schedule: &Schedule, k: i32) -> Complex64 {
    let period = schedule.period;
    if k == 0 {
        return Complex64::new(2.0 * (schedule.tau_off - schedule.tau_on) / period - 1.0, 0.0);
    }
    let kf = k as f64;
    let arg = |t: f64| -TAU * kf * (t / period);
    let edges = Complex64::cis(arg(schedule.tau_off)) - Complex64::cis(arg(schedule.tau_on));
    Complex64::new(0.0, 1.0 / (PI * kf)) * edges * Complex64::cis(arg(schedule.delay))
}

/// `α^{+1}`, the coefficient that carries the synthesized weights.
pub fn first_harmonic(schedule: &Schedule) -> Complex64 {
    harmonic_coefficient(schedule, 1)
}

/// π-state duration that yields a first-harmonic magnitude of `beta_norm`.
pub fn duty_for_amplitude(beta_norm: f64, config: &ModulationConfig) -> Result<f64> {
    if !(beta_norm >= 0.0 && beta_norm.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "normalized amplitude must be finite and non-negative, got {beta_norm}"
        )));
    }
    if beta_norm > FRAC_2_PI * (1.0 + 1e-12) {
        return Err(Error::UnreachableAmplitude { beta_norm });
    }
    let s = (PI * beta_norm / 2.0).min(1.0);
    Ok(2.0 / config.angular_rate() * s.asin())
}

/// Cyclic delay that puts the element's total +1st-harmonic phase
/// (feed phase plus waveform phase) at `desired_phase`.
///
/// Solves `-W u - W τ/2 + initial_phase ≡ desired_phase (mod 2π)` for a
/// waveform whose π state occupies `(0, τ]`.
pub fn delay_for_phase(desired_phase: f64, tau: f64, initial_phase: f64, config: &ModulationConfig) -> f64 {
    let period = config.period();
    let cycles = (initial_phase - desired_phase) / TAU - tau / period / 2.0;
    let frac = cycles.rem_euclid(1.0);
    if frac >= 1.0 {
        0.0
    } else {
        frac * period
    }
}

fn round_half_up(x: f64) -> f64 {
    // The slack keeps exact half-tick inputs from dropping below the tie
    // after the seconds -> ticks conversion.
    (x + 0.5 + 1e-9).floor()
}

/// Snaps a schedule onto the clock grid.
///
/// `tau_on` and `tau_off` are rounded to the nearest tick (ties up). The
/// delay is rounded so that the waveform's phase centre
/// `(tau_on + tau_off)/2 + delay` lands on the nearest half-tick grid point
/// reachable after the edge rounding, which bounds the +1st-harmonic phase
/// error by `π / ticks_per_period`. When both edges are already on the grid
/// this is plain nearest-tick rounding of the delay.
pub fn quantize_schedule(schedule: &Schedule, config: &ModulationConfig) -> Schedule {
    let n = config.ticks_per_period();
    let nf = n as f64;
    let to_ticks = |t: f64| t / schedule.period * nf;
    let on = round_half_up(to_ticks(schedule.tau_on)).clamp(0.0, nf);
    let off = round_half_up(to_ticks(schedule.tau_off)).clamp(on, nf);
    let centre = (to_ticks(schedule.tau_on) + to_ticks(schedule.tau_off)) / 2.0 + to_ticks(schedule.delay);
    let delay = round_half_up(centre - (on + off) / 2.0).rem_euclid(nf);
    let ticks = TickSchedule {
        on: on as u32,
        off: off as u32,
        delay: (delay as u32) % n,
    };
    Schedule::from_ticks(ticks, config).expect("rounded ticks stay inside the period")
}

/// Per-tick π-state table; bit 0 is the first tick after `t = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TickMask {
    bits: Vec<bool>,
}

impl TickMask {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Upper-case hex with bit 0 as the least significant bit, one digit per
    /// four ticks (16 digits for a 64-tick period), no prefix.
    pub fn to_hex(&self) -> String {
        let digits = self.bits.len().div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (0..4)
                    .filter(|b| self.bits.get(4 * d + b).copied().unwrap_or(false))
                    .fold(0u32, |acc, b| acc | (1 << b));
                char::from_digit(nibble, 16).unwrap().to_ascii_uppercase()
            })
            .collect()
    }

    pub fn from_hex(hex: &str, ticks: usize) -> Result<Self> {
        let hex = hex.trim_start_matches("0x").trim_start_matches("0X");
        if hex.len() != ticks.div_ceil(4) {
            return Err(Error::InvalidArgument(format!(
                "expected {} hex digits for {ticks} ticks, got {}",
                ticks.div_ceil(4),
                hex.len()
            )));
        }
        let mut bits = vec![false; ticks];
        for (d, ch) in hex.chars().rev().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::InvalidArgument(format!("bad hex digit {ch:?}")))?;
            for b in 0..4 {
                if nibble & (1 << b) != 0 {
                    let i = 4 * d + b;
                    if i >= ticks {
                        return Err(Error::InvalidArgument(format!(
                            "bit {i} set beyond the {ticks}-tick period"
                        )));
                    }
                    bits[i] = true;
                }
            }
        }
        Ok(Self { bits })
    }

    /// Rotates the table so the bit at index `i` moves to `i + shift`.
    pub fn rotated(&self, shift: usize) -> Self {
        let n = self.bits.len();
        let mut bits = vec![false; n];
        for (i, &b) in self.bits.iter().enumerate() {
            bits[(i + shift) % n] = b;
        }
        Self { bits }
    }
}

/// Samples the schedule at the midpoint of every clock tick.
pub fn schedule_to_bitmask(schedule: &Schedule, config: &ModulationConfig) -> Result<TickMask> {
    schedule.to_ticks(config)?;
    let tick = schedule.period / config.ticks_per_period() as f64;
    let bits = (0..config.ticks_per_period())
        .map(|i| waveform_at(schedule, (i as f64 + 0.5) * tick) > 0.0)
        .collect();
    Ok(TickMask { bits })
}

/// Inverse of [`schedule_to_bitmask`] for masks with one cyclic run of
/// π-state ticks. The result starts its run at `tau_on = 0` and carries
/// the run start in the delay, so it has the same harmonic coefficients as
/// any schedule that produced the mask.
pub fn bitmask_to_schedule(mask: &TickMask, config: &ModulationConfig) -> Result<Schedule> {
    let n = config.ticks_per_period() as usize;
    if mask.len() != n {
        return Err(Error::InvalidArgument(format!(
            "mask has {} ticks, config expects {n}",
            mask.len()
        )));
    }
    let ones = mask.count_ones();
    if ones == 0 || ones == n {
        let ticks = TickSchedule {
            on: 0,
            off: ones as u32,
            delay: 0,
        };
        return Schedule::from_ticks(ticks, config);
    }
    let starts: Vec<usize> = (0..n)
        .filter(|&i| mask.bits[i] && !mask.bits[(i + n - 1) % n])
        .collect();
    if starts.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "mask has {} separate pi-state runs; a schedule has exactly one",
            starts.len()
        )));
    }
    let ticks = TickSchedule {
        on: 0,
        off: ones as u32,
        delay: starts[0] as u32,
    };
    Schedule::from_ticks(ticks, config)
}

/// Complex harmonic coefficients `α^k`, `k ∈ [-K, K]`, for every element.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    k_max: usize,
    coefficients: Vec<Vec<Complex64>>,
}

impl HarmonicSpectrum {
    /// `coefficients[e][k + k_max]` holds `α^k` of element `e`.
    pub fn new(k_max: usize, coefficients: Vec<Vec<Complex64>>) -> Result<Self> {
        if let Some((e, row)) = coefficients
            .iter()
            .enumerate()
            .find(|(_, row)| row.len() != 2 * k_max + 1)
        {
            return Err(Error::InvalidArgument(format!(
                "element {e} has {} coefficients, expected {}",
                row.len(),
                2 * k_max + 1
            )));
        }
        Ok(Self { k_max, coefficients })
    }

    /// Closed-form spectrum of a set of schedules.
    pub fn analytic(schedules: &[Schedule], k_max: usize) -> Self {
        let k = k_max as i32;
        let coefficients = schedules
            .iter()
            .map(|s| (-k..=k).map(|h| harmonic_coefficient(s, h)).collect())
            .collect();
        Self { k_max, coefficients }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn element_count(&self) -> usize {
        self.coefficients.len()
    }

    pub fn covers(&self, k: i32) -> bool {
        k.unsigned_abs() as usize <= self.k_max
    }

    pub fn get(&self, element: usize, k: i32) -> Option<Complex64> {
        if !self.covers(k) {
            return None;
        }
        let idx = (k + self.k_max as i32) as usize;
        self.coefficients.get(element).map(|row| row[idx])
    }

    /// `α^k` for every element; `None` when `k` is outside the stored range.
    pub fn harmonic(&self, k: i32) -> Option<Vec<Complex64>> {
        if !self.covers(k) {
            return None;
        }
        let idx = (k + self.k_max as i32) as usize;
        Some(self.coefficients.iter().map(|row| row[idx]).collect())
    }

    pub fn coefficients(&self) -> &[Vec<Complex64>] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.coefficients
    }
}
