//! Low-sidelobe steered weights and their realization as switching schedules.
//!
//! The amplitude taper is a separable Dolph-Chebyshev design, the phase is a
//! progressive (equiphase-surface) steering gradient. Both are mapped onto
//! the +1st harmonic: amplitude through the π-state duration, phase through
//! a cyclic delay of the switching waveform.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{progressive_phase, static_code_pattern, ArrayGeometry, BinaryCodeMatrix, CodeState, Excitation};
use crate::error::{Error, Result};
use crate::modulation::{
    delay_for_phase, duty_for_amplitude, first_harmonic, quantize_schedule, HarmonicSpectrum, ModulationConfig,
    Schedule, TickSchedule,
};

/// Chebyshev polynomial of the first kind, valid for any real argument.
fn chebyshev_t(order: usize, x: f64) -> f64 {
    let n = order as f64;
    if x.abs() <= 1.0 {
        (n * x.acos()).cos()
    } else if x > 1.0 {
        (n * x.acosh()).cosh()
    } else {
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * (n * (-x).acosh()).cosh()
    }
}

/// Dolph-Chebyshev weights for an `n`-element linear array whose sidelobes
/// all sit at `sll_db` (negative) relative to the main beam. Max weight is 1.
pub fn chebyshev_taper(n: usize, sll_db: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a Chebyshev taper needs at least 2 elements, got {n}"
        )));
    }
    if !(sll_db < 0.0 && sll_db.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sidelobe level must be a negative dB value, got {sll_db}"
        )));
    }
    let order = n - 1;
    let ratio = 10f64.powf(-sll_db / 20.0);
    let x0 = (ratio.acosh() / order as f64).cosh();

    // Sample the pattern polynomial at n equispaced points of ψ and invert
    // the (symmetric) length-n DFT.
    let nf = n as f64;
    let samples: Vec<Complex64> = (0..n)
        .map(|k| {
            let p = chebyshev_t(order, x0 * (PI * k as f64 / nf).cos());
            if n.is_multiple_of(2) {
                Complex64::from_polar(p, PI * k as f64 / nf)
            } else {
                Complex64::new(p, 0.0)
            }
        })
        .collect();
    let spectrum: Vec<f64> = (0..n)
        .map(|m| {
            samples
                .iter()
                .enumerate()
                .map(|(k, s)| s * Complex64::cis(-TAU * ((k * m) % n) as f64 / nf))
                .sum::<Complex64>()
                .re
        })
        .collect();

    let mut w = if n % 2 == 1 {
        let half = n.div_ceil(2);
        let mut w: Vec<f64> = spectrum[1..half].iter().rev().copied().collect();
        w.extend_from_slice(&spectrum[..half]);
        w
    } else {
        let half = n / 2 + 1;
        let mut w: Vec<f64> = spectrum[1..half].iter().rev().copied().collect();
        w.extend_from_slice(&spectrum[1..half]);
        w
    };
    let max = w.iter().cloned().fold(f64::MIN, f64::max);
    w.iter_mut().for_each(|v| *v /= max);
    Ok(w)
}

/// Separable planar taper, row-major. A length-1 axis is left untapered.
pub fn planar_taper(rows: usize, cols: usize, sll_db: f64) -> Result<Vec<f64>> {
    let axis = |n: usize| -> Result<Vec<f64>> {
        if n == 1 {
            Ok(vec![1.0])
        } else {
            chebyshev_taper(n, sll_db)
        }
    };
    let (wr, wc) = (axis(rows)?, axis(cols)?);
    let mut w: Vec<f64> = wr.iter().flat_map(|r| wc.iter().map(move |c| r * c)).collect();
    let max = w.iter().cloned().fold(f64::MIN, f64::max);
    w.iter_mut().for_each(|v| *v /= max);
    Ok(w)
}

/// Progressive phase `-k0 (x sinθ0 cosφ0 + y sinθ0 sinφ0)` steering the beam
/// to `(theta0, phi0)`.
pub fn scan_phases(geometry: &ArrayGeometry, theta0: f64, phi0: f64) -> Result<Vec<f64>> {
    if theta0.abs() > FRAC_PI_2 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "scan angle {theta0} rad is outside [-pi/2, pi/2]"
        )));
    }
    Ok(progressive_phase(geometry, theta0, phi0))
}

/// Desired aperture amplitude `γ` and phase `ϕ`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetWeights {
    pub rows: usize,
    pub cols: usize,
    pub gamma: Vec<f64>,
    pub phi: Vec<f64>,
}

impl TargetWeights {
    pub fn new(rows: usize, cols: usize, gamma: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if gamma.len() != rows * cols || phi.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "target weights must have {} entries (got gamma {}, phi {})",
                rows * cols,
                gamma.len(),
                phi.len()
            )));
        }
        if gamma.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
            return Err(Error::InvalidArgument("target amplitudes must be non-negative".into()));
        }
        Ok(Self { rows, cols, gamma, phi })
    }
}

/// Feed-compensated amplitudes: `β = γ / a` and `β'` scaled so max `β' = 2/π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompensatedWeights {
    pub beta: Vec<f64>,
    pub beta_norm: Vec<f64>,
}

pub fn compensate_amplitudes(target: &TargetWeights, excitation: &Excitation) -> Result<CompensatedWeights> {
    if excitation.len() != target.gamma.len() {
        return Err(Error::InvalidArgument(format!(
            "excitation has {} entries, target has {}",
            excitation.len(),
            target.gamma.len()
        )));
    }
    let mut beta = Vec::with_capacity(target.gamma.len());
    for (e, (&g, &a)) in target.gamma.iter().zip(excitation.amplitude()).enumerate() {
        if a == 0.0 {
            return Err(Error::ZeroExcitation {
                row: e / target.cols,
                col: e % target.cols,
            });
        }
        beta.push(g / a);
    }
    let max = beta.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::InvalidArgument("all target amplitudes are zero".into()));
    }
    let beta_norm = beta.iter().map(|b| b * FRAC_2_PI / max).collect();
    Ok(CompensatedWeights { beta, beta_norm })
}

/// How aperture weights are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// No time modulation: each element is held in its quantized 1-bit state.
    Static,
    /// Uniform 50% duty, delay-only phase weighting.
    PhaseOnly,
    /// Duty-cycle amplitude weighting plus delay phase weighting.
    AmpPhase,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Static, Mode::PhaseOnly, Mode::AmpPhase];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Static => "static",
            Mode::PhaseOnly => "phase-only",
            Mode::AmpPhase => "amp-phase",
        }
    }

    /// Harmonic that carries the synthesized beam.
    pub fn harmonic(self) -> i32 {
        match self {
            Mode::Static => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode {s:?} (static, phase-only, amp-phase)")))
    }
}

/// Where a schedule set came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub scan_theta: f64,
    pub scan_phi: f64,
    pub sll_db: f64,
    pub mode: Mode,
}

/// One schedule per element under a shared timing configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSet {
    rows: usize,
    cols: usize,
    config: ModulationConfig,
    schedules: Vec<Schedule>,
    provenance: Provenance,
}

impl ScheduleSet {
    pub fn new(
        rows: usize,
        cols: usize,
        config: ModulationConfig,
        schedules: Vec<Schedule>,
        provenance: Provenance,
    ) -> Result<Self> {
        if schedules.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} schedules for a {rows}x{cols} array",
                schedules.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            config,
            schedules,
            provenance,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn config(&self) -> &ModulationConfig {
        &self.config
    }

    pub fn schedules(&self) -> &[Schedule] {
        &self.schedules
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.schedules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schedules.is_empty()
    }

    pub fn tick_schedules(&self) -> Result<Vec<TickSchedule>> {
        self.schedules.iter().map(|s| s.to_ticks(&self.config)).collect()
    }

    pub fn is_quantized(&self) -> bool {
        self.tick_schedules().is_ok()
    }

    pub fn quantized(&self) -> Self {
        Self {
            schedules: self
                .schedules
                .iter()
                .map(|s| quantize_schedule(s, &self.config))
                .collect(),
            ..self.clone()
        }
    }

    pub fn first_harmonics(&self) -> Vec<Complex64> {
        self.schedules.iter().map(first_harmonic).collect()
    }

    pub fn spectrum(&self, k_max: usize) -> HarmonicSpectrum {
        HarmonicSpectrum::analytic(&self.schedules, k_max)
    }

    /// The 1-bit code held by an unmodulated set, `None` if any element
    /// actually switches.
    pub fn static_code(&self) -> Option<BinaryCodeMatrix> {
        let period = self.config.period();
        let states = self
            .schedules
            .iter()
            .map(|s| {
                if s.duty() == 0.0 {
                    Some(CodeState::Zero)
                } else if (s.duty() - period).abs() <= 1e-12 * period {
                    Some(CodeState::Pi)
                } else {
                    None
                }
            })
            .collect::<Option<Vec<_>>>()?;
        BinaryCodeMatrix::new(self.rows, self.cols, states).ok()
    }
}

/// Unmodulated schedules holding each element in its code state: the π
/// state is a constant `+1` waveform, the 0 state a constant `-1`.
pub fn static_schedules(
    code: &BinaryCodeMatrix,
    config: &ModulationConfig,
    provenance: Provenance,
) -> Result<ScheduleSet> {
    let n = config.ticks_per_period();
    let schedules = code
        .states()
        .iter()
        .map(|s| {
            let off = match s {
                CodeState::Zero => 0,
                CodeState::Pi => n,
            };
            Schedule::from_ticks(TickSchedule { on: 0, off, delay: 0 }, config)
        })
        .collect::<Result<Vec<_>>>()?;
    ScheduleSet::new(code.rows(), code.cols(), *config, schedules, provenance)
}

/// Steered, tapered target weights for the given mode.
pub fn target_weights(
    geometry: &ArrayGeometry,
    sll_db: f64,
    theta0: f64,
    phi0: f64,
    mode: Mode,
) -> Result<TargetWeights> {
    let phi = scan_phases(geometry, theta0, phi0)?;
    let gamma = match mode {
        Mode::AmpPhase => planar_taper(geometry.rows(), geometry.cols(), sll_db)?,
        Mode::PhaseOnly | Mode::Static => vec![1.0; geometry.len()],
    };
    TargetWeights::new(geometry.rows(), geometry.cols(), gamma, phi)
}

/// Schedules realizing the target weights exactly, before clock rounding.
///
/// The element with the largest `β'` (first in row-major order on ties)
/// is the phase reference: it keeps its natural waveform phase with zero
/// delay, and every other element is delayed relative to it.
pub fn synthesize_ideal(
    geometry: &ArrayGeometry,
    excitation: &Excitation,
    sll_db: f64,
    theta0: f64,
    phi0: f64,
    mode: Mode,
    config: &ModulationConfig,
) -> Result<ScheduleSet> {
    excitation.check_matches(geometry)?;
    let provenance = Provenance {
        scan_theta: theta0,
        scan_phi: phi0,
        sll_db,
        mode,
    };
    if mode == Mode::Static {
        let code = static_code_pattern(geometry, theta0, phi0)?;
        return static_schedules(&code, config, provenance);
    }

    let target = target_weights(geometry, sll_db, theta0, phi0, mode)?;
    let comp = compensate_amplitudes(&target, excitation)?;
    let period = config.period();
    let taus = match mode {
        Mode::PhaseOnly => vec![period / 2.0; geometry.len()],
        _ => comp
            .beta_norm
            .iter()
            .map(|&b| duty_for_amplitude(b, config))
            .collect::<Result<Vec<_>>>()?,
    };

    let reference = comp
        .beta_norm
        .iter()
        .enumerate()
        .fold(0, |best, (e, &b)| if b > comp.beta_norm[best] { e } else { best });
    let natural = |e: usize| excitation.phase()[e] - PI * taus[e] / period;
    let offset = natural(reference) - target.phi[reference];

    let schedules = (0..geometry.len())
        .map(|e| {
            let desired = target.phi[e] + offset;
            let u = delay_for_phase(desired, taus[e], excitation.phase()[e], config);
            Schedule::new(0.0, taus[e], u, config)
        })
        .collect::<Result<Vec<_>>>()?;
    ScheduleSet::new(geometry.rows(), geometry.cols(), *config, schedules, provenance)
}

/// Full synthesis: target weights, feed compensation, duty and delay
/// mapping, then clock quantization of every schedule.
pub fn synthesize_schedules(
    geometry: &ArrayGeometry,
    excitation: &Excitation,
    sll_db: f64,
    theta0: f64,
    phi0: f64,
    mode: Mode,
    config: &ModulationConfig,
) -> Result<ScheduleSet> {
    Ok(synthesize_ideal(geometry, excitation, sll_db, theta0, phi0, mode, config)?.quantized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{build_geometry, uniform_excitation};
    use approx::assert_abs_diff_eq;

    /// Brute-force linear array factor in dB over ψ ∈ [0, π], with the
    /// sidelobe peaks (interior local maxima beyond the first null).
    fn sidelobe_peaks_db(w: &[f64], samples: usize) -> Vec<f64> {
        let n = w.len();
        let af: Vec<f64> = (0..=samples)
            .map(|i| {
                let psi = PI * i as f64 / samples as f64;
                w.iter()
                    .enumerate()
                    .map(|(m, &a)| Complex64::from_polar(a, psi * (m as f64 - (n as f64 - 1.0) / 2.0)))
                    .sum::<Complex64>()
                    .norm()
            })
            .collect();
        let peak = af[0];
        let mut first_null = 0;
        while first_null + 1 < af.len() && af[first_null + 1] <= af[first_null] {
            first_null += 1;
        }
        let mut peaks: Vec<f64> = (first_null + 1..af.len() - 1)
            .filter(|&i| af[i] >= af[i - 1] && af[i] >= af[i + 1])
            .map(|i| 20.0 * (af[i] / peak).log10())
            .collect();
        // ψ = π is a lobe peak by symmetry when the pattern rises into it.
        let last = af.len() - 1;
        if af[last] >= af[last - 1] {
            peaks.push(20.0 * (af[last] / peak).log10());
        }
        peaks
    }

    #[test]
    fn two_element_taper_is_flat() {
        for sll in [-10.0, -30.0, -60.0] {
            assert_eq!(chebyshev_taper(2, sll).unwrap(), vec![1.0, 1.0]);
        }
    }

    #[test]
    fn three_element_closed_form() {
        // T2(x0 cos(ψ/2)) with x0² = (cosh(acosh 10) + 1)/2 = 5.5 gives
        // 4.5 + 5.5 cos ψ, i.e. weights [2.75, 4.5, 2.75].
        let w = chebyshev_taper(3, -20.0).unwrap();
        let expected = [2.75 / 4.5, 1.0, 2.75 / 4.5];
        for (a, b) in w.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn equiripple_sidelobes() {
        for (n, sll) in [(8, -30.0), (5, -25.0), (12, -40.0), (7, -20.0)] {
            let w = chebyshev_taper(n, sll).unwrap();
            let peaks = sidelobe_peaks_db(&w, 10_000);
            assert!(!peaks.is_empty());
            for p in peaks {
                assert!((p - sll).abs() <= 0.1, "n={n}: sidelobe {p} dB vs {sll}");
            }
        }
    }

    #[test]
    fn taper_symmetric_and_normalized() {
        for n in 2..16 {
            let w = chebyshev_taper(n, -30.0).unwrap();
            assert_eq!(w.len(), n);
            for i in 0..n {
                assert_abs_diff_eq!(w[i], w[n - 1 - i], epsilon = 1e-12);
                assert!(w[i] > 0.0);
            }
            assert_abs_diff_eq!(w.iter().cloned().fold(0.0, f64::max), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn taper_argument_errors() {
        assert!(chebyshev_taper(1, -30.0).is_err());
        assert!(chebyshev_taper(8, 3.0).is_err());
        assert!(chebyshev_taper(8, f64::NAN).is_err());
    }

    #[test]
    fn planar_tapers() {
        assert_eq!(planar_taper(2, 2, -25.0).unwrap(), vec![1.0; 4]);
        let w3 = chebyshev_taper(3, -20.0).unwrap();
        let p = planar_taper(3, 3, -20.0).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                assert_abs_diff_eq!(p[r * 3 + c], w3[r] * w3[c], epsilon = 1e-12);
            }
        }
        let p8 = planar_taper(8, 8, -30.0).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                assert_abs_diff_eq!(p8[r * 8 + c], p8[(7 - r) * 8 + c], epsilon = 1e-12);
                assert_abs_diff_eq!(p8[r * 8 + c], p8[r * 8 + 7 - c], epsilon = 1e-12);
                assert_abs_diff_eq!(p8[r * 8 + c], p8[c * 8 + r], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn scan_phase_gradients() {
        let g = build_geometry(8, 8, 0.5).unwrap();
        assert!(scan_phases(&g, 0.0, 0.0).unwrap().iter().all(|p| *p == 0.0));
        for (deg, step) in [(30.0, -90.0), (45.0, -127.279)] {
            let ph = scan_phases(&g, f64::to_radians(deg), 0.0).unwrap();
            for c in 1..8 {
                assert_abs_diff_eq!((ph[c] - ph[c - 1]).to_degrees(), step, epsilon = 1e-3);
                // rows share the column gradient
                assert_abs_diff_eq!(ph[8 + c], ph[c], epsilon = 1e-15);
            }
        }
        assert!(scan_phases(&g, 1.7, 0.0).is_err());
    }

    #[test]
    fn compensation_examples() {
        let g = build_geometry(8, 8, 0.5).unwrap();
        let ex = uniform_excitation(&g);
        let flat = TargetWeights::new(8, 8, vec![1.0; 64], vec![0.0; 64]).unwrap();
        let c = compensate_amplitudes(&flat, &ex).unwrap();
        assert!(c.beta_norm.iter().all(|b| (b - FRAC_2_PI).abs() < 1e-15));

        let taper = TargetWeights::new(8, 8, planar_taper(8, 8, -30.0).unwrap(), vec![0.0; 64]).unwrap();
        let c = compensate_amplitudes(&taper, &ex).unwrap();
        let max = c.beta_norm.iter().cloned().fold(0.0, f64::max);
        assert_eq!(max, FRAC_2_PI);
        for (r, col) in [(3, 3), (3, 4), (4, 3), (4, 4)] {
            assert_abs_diff_eq!(c.beta_norm[r * 8 + col], FRAC_2_PI, epsilon = 1e-12);
        }

        let mut amp = vec![1.0; 4];
        amp[2] = 2.0;
        let ex2 = Excitation::new(amp, vec![0.0; 4]).unwrap();
        let t = TargetWeights::new(2, 2, vec![1.0; 4], vec![0.0; 4]).unwrap();
        let c = compensate_amplitudes(&t, &ex2).unwrap();
        assert_eq!(c.beta[2], 0.5);
        assert_eq!(c.beta[0], 1.0);
    }

    #[test]
    fn zero_feed_names_the_element() {
        let mut amp = vec![1.0; 6];
        amp[4] = 0.0;
        let ex = Excitation::new(amp, vec![0.0; 6]).unwrap();
        let t = TargetWeights::new(2, 3, vec![1.0; 6], vec![0.0; 6]).unwrap();
        assert_eq!(
            compensate_amplitudes(&t, &ex),
            Err(Error::ZeroExcitation { row: 1, col: 1 })
        );
    }

    fn default_setup() -> (ArrayGeometry, Excitation, ModulationConfig) {
        let g = build_geometry(8, 8, 0.5).unwrap();
        let ex = uniform_excitation(&g);
        (g, ex, ModulationConfig::default())
    }

    #[test]
    fn broadside_phase_only_is_uniform() {
        let (g, ex, cfg) = default_setup();
        let set = synthesize_schedules(&g, &ex, -30.0, 0.0, 0.0, Mode::PhaseOnly, &cfg).unwrap();
        for t in set.tick_schedules().unwrap() {
            assert_eq!(
                t,
                TickSchedule {
                    on: 0,
                    off: 32,
                    delay: 0
                }
            );
        }
    }

    #[test]
    fn thirty_degree_phase_only_delays_advance_sixteen_ticks_per_column() {
        let (g, ex, cfg) = default_setup();
        let set = synthesize_schedules(&g, &ex, -30.0, 30f64.to_radians(), 0.0, Mode::PhaseOnly, &cfg).unwrap();
        let ticks = set.tick_schedules().unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let t = ticks[r * 8 + c];
                assert_eq!(t.off, 32);
                assert_eq!(t.delay, (16 * c as u32) % 64, "row {r} col {c}");
            }
        }
        let mags: Vec<f64> = set.first_harmonics().iter().map(|a| a.norm()).collect();
        assert!(mags.iter().all(|m| (m - FRAC_2_PI).abs() < 1e-12));
    }

    #[test]
    fn realization_fidelity_before_quantization() {
        let (g, ex, cfg) = default_setup();
        for deg in [0.0, 15.0, 30.0, 45.0] {
            let th = f64::to_radians(deg);
            let set = synthesize_ideal(&g, &ex, -30.0, th, 0.0, Mode::AmpPhase, &cfg).unwrap();
            let target = target_weights(&g, -30.0, th, 0.0, Mode::AmpPhase).unwrap();
            let a1 = set.first_harmonics();
            let amax = a1.iter().map(|a| a.norm()).fold(0.0, f64::max);
            let gmax = target.gamma.iter().cloned().fold(0.0, f64::max);
            let offset = a1[0].arg() - target.phi[0];
            for (e, a) in a1.iter().enumerate() {
                assert_abs_diff_eq!(a.norm() / amax, target.gamma[e] / gmax, epsilon = 1e-9);
                let d = crate::array::wrap_phase(a.arg() - target.phi[e] - offset);
                assert!(d.abs() <= 1e-9, "element {e} phase off by {d}");
            }
        }
    }

    #[test]
    fn feed_phase_is_compensated() {
        let g = build_geometry(2, 3, 0.5).unwrap();
        let feed_phase = vec![0.0, 0.4, -1.1, 2.0, 0.3, -2.9];
        let ex = Excitation::new(vec![1.0, 0.8, 1.2, 0.9, 1.0, 1.1], feed_phase.clone()).unwrap();
        let cfg = ModulationConfig::default();
        let th = 20f64.to_radians();
        let set = synthesize_ideal(&g, &ex, -20.0, th, 0.0, Mode::AmpPhase, &cfg).unwrap();
        let target = target_weights(&g, -20.0, th, 0.0, Mode::AmpPhase).unwrap();
        let total: Vec<Complex64> = set
            .first_harmonics()
            .iter()
            .enumerate()
            .map(|(e, a)| a * Complex64::from_polar(ex.amplitude()[e], feed_phase[e]))
            .collect();
        let offset = total[0].arg() - target.phi[0];
        for e in 0..6 {
            assert_abs_diff_eq!(
                total[e].norm() / total[1].norm(),
                target.gamma[e] / target.gamma[1],
                epsilon = 1e-9
            );
            let d = crate::array::wrap_phase(total[e].arg() - target.phi[e] - offset);
            assert!(d.abs() <= 1e-9);
        }
    }

    #[test]
    fn quantized_sets_are_on_the_clock_grid() {
        let (g, ex, cfg) = default_setup();
        for mode in Mode::ALL {
            let set = synthesize_schedules(&g, &ex, -30.0, 0.4, 0.3, mode, &cfg).unwrap();
            assert!(set.is_quantized());
            assert_eq!(set.provenance().mode, mode);
        }
    }

    #[test]
    fn static_mode_holds_code_states() {
        let (g, ex, cfg) = default_setup();
        let th = 30f64.to_radians();
        let set = synthesize_schedules(&g, &ex, -30.0, th, 0.0, Mode::Static, &cfg).unwrap();
        let code = static_code_pattern(&g, th, 0.0).unwrap();
        assert_eq!(set.static_code().unwrap(), code);
        let dyn_set = synthesize_schedules(&g, &ex, -30.0, th, 0.0, Mode::PhaseOnly, &cfg).unwrap();
        assert!(dyn_set.static_code().is_none());
    }

    #[test]
    fn mode_strings() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        }
        assert!("both".parse::<Mode>().is_err());
    }
}
