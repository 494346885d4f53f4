//! Far-field patterns of the time-modulated aperture.
//!
//! A harmonic pattern is the planar array factor evaluated with each
//! element's complex weight `a·e^{jφ}·α^k`, times the element factor. The
//! carrier wavenumber is used for every harmonic: the modulation offset
//! (MHz against GHz) is far below the angular resolution of any grid here.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::array::{ArrayGeometry, BinaryCodeMatrix, ElementPatternModel, Excitation};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::modulation::HarmonicSpectrum;

pub mod metrics;

pub use metrics::{directivity, hpbw, peak_direction, pointing, sll, DEFAULT_MAIN_LOBE_GUARD_DEG};

/// Observation directions.
#[derive(Debug, Clone, PartialEq)]
pub enum AngleGrid {
    /// Principal-plane cut at azimuth `phi`; `theta` is signed so that
    /// negative values look toward `phi + π`.
    Cut { phi: f64, theta: Vec<f64> },
    /// Front hemisphere, `theta ∈ [0, π/2]` × `phi ∈ [0, 2π)`, theta-major.
    Hemisphere { theta: Vec<f64>, phi: Vec<f64> },
}

fn uniform_samples(start_deg: f64, stop_deg: f64, step_deg: f64, inclusive: bool) -> Result<Vec<f64>> {
    if !(step_deg > 0.0 && step_deg.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid step must be positive, got {step_deg}"
        )));
    }
    let span = (stop_deg - start_deg) / step_deg;
    let n = span.round();
    if (span - n).abs() > 1e-9 * span.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "grid step {step_deg} deg does not divide the {} deg span",
            stop_deg - start_deg
        )));
    }
    let count = n as usize + usize::from(inclusive);
    Ok((0..count)
        .map(|i| (start_deg + i as f64 * step_deg).to_radians())
        .collect())
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

impl AngleGrid {
    /// Finest step allowed on uniform cuts.
    pub const MAX_CUT_STEP_DEG: f64 = 0.25;
    pub const DEFAULT_CUT_STEP_DEG: f64 = 0.1;
    pub const DEFAULT_HEMI_THETA_STEP_DEG: f64 = 1.0;
    pub const DEFAULT_HEMI_PHI_STEP_DEG: f64 = 2.0;

    /// Uniform cut over `[-90°, +90°]` at azimuth `phi` (radians).
    pub fn cut(phi: f64, step_deg: f64) -> Result<Self> {
        if step_deg > Self::MAX_CUT_STEP_DEG {
            return Err(Error::InvalidArgument(format!(
                "cut step {step_deg} deg exceeds {} deg",
                Self::MAX_CUT_STEP_DEG
            )));
        }
        Ok(AngleGrid::Cut {
            phi,
            theta: uniform_samples(-90.0, 90.0, step_deg, true)?,
        })
    }

    /// H-plane (`phi = 0`) cut.
    pub fn h_plane(step_deg: f64) -> Result<Self> {
        Self::cut(0.0, step_deg)
    }

    pub fn cut_from_samples(phi: f64, theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() || !strictly_increasing(&theta) {
            return Err(Error::InvalidArgument("cut samples must be strictly increasing".into()));
        }
        Ok(AngleGrid::Cut { phi, theta })
    }

    pub fn hemisphere(theta_step_deg: f64, phi_step_deg: f64) -> Result<Self> {
        Ok(AngleGrid::Hemisphere {
            theta: uniform_samples(0.0, 90.0, theta_step_deg, true)?,
            phi: uniform_samples(0.0, 360.0, phi_step_deg, false)?,
        })
    }

    pub fn len(&self) -> usize {
        match self {
            AngleGrid::Cut { theta, .. } => theta.len(),
            AngleGrid::Hemisphere { theta, phi } => theta.len() * phi.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_cut(&self) -> bool {
        matches!(self, AngleGrid::Cut { .. })
    }

    /// `(theta, phi)` of grid point `i`.
    pub fn direction(&self, i: usize) -> (f64, f64) {
        match self {
            AngleGrid::Cut { phi, theta } => (theta[i], *phi),
            AngleGrid::Hemisphere { theta, phi } => (theta[i / phi.len()], phi[i % phi.len()]),
        }
    }

    /// Cut angles in radians, `None` for a hemisphere.
    pub fn cut_angles(&self) -> Option<&[f64]> {
        match self {
            AngleGrid::Cut { theta, .. } => Some(theta),
            AngleGrid::Hemisphere { .. } => None,
        }
    }
}

/// Complex far field over an angle grid at one harmonic.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldPattern {
    pub grid: AngleGrid,
    pub field: Vec<Complex64>,
    pub harmonic: i32,
}

impl FarFieldPattern {
    pub fn magnitude(&self) -> Vec<f64> {
        self.field.iter().map(|f| f.norm()).collect()
    }

    /// Index and magnitude of the strongest sample (first on ties).
    pub fn peak(&self) -> (usize, f64) {
        self.field
            .iter()
            .map(|f| f.norm())
            .enumerate()
            .fold((0, f64::MIN), |best, (i, m)| if m > best.1 { (i, m) } else { best })
    }

    /// Power relative to the peak in dB, floored at -300 dB.
    pub fn power_db(&self) -> Vec<f64> {
        let (_, peak) = self.peak();
        self.field
            .iter()
            .map(|f| {
                let r = if peak > 0.0 { f.norm() / peak } else { 0.0 };
                (20.0 * r.log10()).max(-300.0)
            })
            .collect()
    }
}

/// Geometric phasor `e^{j k0 (x u + y v)}` for every element.
pub(crate) fn steering_vector(geometry: &ArrayGeometry, theta: f64, phi: f64) -> impl Iterator<Item = Complex64> + '_ {
    let (u, v) = (theta.sin() * phi.cos(), theta.sin() * phi.sin());
    geometry
        .positions()
        .iter()
        .map(move |&(x, y)| Complex64::cis(TAU * (x * u + y * v)))
}

/// Element-factor-weighted array factor for arbitrary complex weights.
pub fn array_pattern_with(
    exec: Execution,
    geometry: &ArrayGeometry,
    weights: &[Complex64],
    model: &ElementPatternModel,
    grid: &AngleGrid,
) -> Result<Vec<Complex64>> {
    if weights.len() != geometry.len() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} elements",
            weights.len(),
            geometry.len()
        )));
    }
    Ok(exec.map(grid.len(), |i| {
        let (theta, phi) = grid.direction(i);
        let ef = model.factor(theta);
        let af: Complex64 = steering_vector(geometry, theta, phi)
            .zip(weights)
            .map(|(s, w)| s * w)
            .sum();
        af * ef
    }))
}

fn feed_weights(excitation: &Excitation) -> impl Iterator<Item = Complex64> + '_ {
    excitation
        .amplitude()
        .iter()
        .zip(excitation.phase())
        .map(|(&a, &p)| Complex64::from_polar(a, p))
}

pub fn harmonic_pattern(
    geometry: &ArrayGeometry,
    excitation: &Excitation,
    spectrum: &HarmonicSpectrum,
    model: &ElementPatternModel,
    grid: &AngleGrid,
    k: i32,
) -> Result<FarFieldPattern> {
    harmonic_pattern_with(Execution::default(), geometry, excitation, spectrum, model, grid, k)
}

pub fn harmonic_pattern_with(
    exec: Execution,
    geometry: &ArrayGeometry,
    excitation: &Excitation,
    spectrum: &HarmonicSpectrum,
    model: &ElementPatternModel,
    grid: &AngleGrid,
    k: i32,
) -> Result<FarFieldPattern> {
    excitation.check_matches(geometry)?;
    if spectrum.element_count() != geometry.len() {
        return Err(Error::InvalidArgument(format!(
            "spectrum covers {} elements, array has {}",
            spectrum.element_count(),
            geometry.len()
        )));
    }
    let alpha = spectrum.harmonic(k).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "harmonic {k} is outside the spectrum range ±{}",
            spectrum.k_max()
        ))
    })?;
    let weights: Vec<Complex64> = feed_weights(excitation).zip(alpha).map(|(f, a)| f * a).collect();
    Ok(FarFieldPattern {
        field: array_pattern_with(exec, geometry, &weights, model, grid)?,
        grid: grid.clone(),
        harmonic: k,
    })
}

/// Pattern of an unmodulated aperture holding a 1-bit code.
pub fn static_pattern(
    geometry: &ArrayGeometry,
    excitation: &Excitation,
    code: &BinaryCodeMatrix,
    model: &ElementPatternModel,
    grid: &AngleGrid,
) -> Result<FarFieldPattern> {
    static_pattern_with(Execution::default(), geometry, excitation, code, model, grid)
}

pub fn static_pattern_with(
    exec: Execution,
    geometry: &ArrayGeometry,
    excitation: &Excitation,
    code: &BinaryCodeMatrix,
    model: &ElementPatternModel,
    grid: &AngleGrid,
) -> Result<FarFieldPattern> {
    excitation.check_matches(geometry)?;
    if code.rows() != geometry.rows() || code.cols() != geometry.cols() {
        return Err(Error::InvalidArgument(format!(
            "{}x{} code for a {}x{} array",
            code.rows(),
            code.cols(),
            geometry.rows(),
            geometry.cols()
        )));
    }
    let weights: Vec<Complex64> = feed_weights(excitation)
        .zip(code.states())
        .map(|(f, s)| f * Complex64::cis(s.radians()))
        .collect();
    Ok(FarFieldPattern {
        field: array_pattern_with(exec, geometry, &weights, model, grid)?,
        grid: grid.clone(),
        harmonic: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{build_geometry, static_code_pattern, uniform_excitation, CodeState};
    use crate::modulation::ModulationConfig;
    use crate::synthesis::{synthesize_schedules, Mode};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_2_PI, PI};

    #[test]
    fn grids() {
        let g = AngleGrid::h_plane(0.1).unwrap();
        assert_eq!(g.len(), 1801);
        let th = g.cut_angles().unwrap();
        assert_abs_diff_eq!(th[0], -PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(th[1800], PI / 2.0, epsilon = 1e-15);
        assert!(strictly_increasing(th));
        assert!(AngleGrid::h_plane(0.5).is_err());
        assert!(AngleGrid::h_plane(0.07).is_err());
        let h = AngleGrid::hemisphere(1.0, 2.0).unwrap();
        assert_eq!(h.len(), 91 * 180);
        assert!(AngleGrid::cut_from_samples(0.0, vec![0.1, 0.1]).is_err());
    }

    #[test]
    fn single_element_is_the_element_factor() {
        let g = build_geometry(1, 1, 0.5).unwrap();
        let ex = uniform_excitation(&g);
        let cfg = ModulationConfig::default();
        let set = synthesize_schedules(&g, &ex, -30.0, 0.0, 0.0, Mode::PhaseOnly, &cfg).unwrap();
        let model = ElementPatternModel::default();
        let grid = AngleGrid::h_plane(0.25).unwrap();
        let p = harmonic_pattern(&g, &ex, &set.spectrum(1), &model, &grid, 1).unwrap();
        for (i, f) in p.field.iter().enumerate() {
            let (theta, _) = grid.direction(i);
            assert_abs_diff_eq!(f.norm(), model.factor(theta) * FRAC_2_PI, epsilon = 1e-14);
        }
    }

    #[test]
    fn missing_harmonic_rejected() {
        let g = build_geometry(2, 2, 0.5).unwrap();
        let ex = uniform_excitation(&g);
        let set =
            synthesize_schedules(&g, &ex, -30.0, 0.0, 0.0, Mode::PhaseOnly, &ModulationConfig::default()).unwrap();
        let grid = AngleGrid::h_plane(0.25).unwrap();
        let r = harmonic_pattern(&g, &ex, &set.spectrum(1), &ElementPatternModel::default(), &grid, 2);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn all_pi_code_matches_all_zero_magnitude() {
        let g = build_geometry(8, 8, 0.5).unwrap();
        let ex = uniform_excitation(&g);
        let grid = AngleGrid::h_plane(0.25).unwrap();
        let m = ElementPatternModel::default();
        let zero = static_pattern(&g, &ex, &BinaryCodeMatrix::filled(8, 8, CodeState::Zero), &m, &grid).unwrap();
        let pi = static_pattern(&g, &ex, &BinaryCodeMatrix::filled(8, 8, CodeState::Pi), &m, &grid).unwrap();
        for (a, b) in zero.magnitude().iter().zip(pi.magnitude()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        // single broadside pencil beam
        let (i, _) = zero.peak();
        assert_abs_diff_eq!(grid.direction(i).0, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn global_phase_and_superposition() {
        let g = build_geometry(4, 5, 0.5).unwrap();
        let m = ElementPatternModel::default();
        let grid = AngleGrid::hemisphere(5.0, 10.0).unwrap();
        let w1: Vec<Complex64> = (0..20)
            .map(|i| Complex64::from_polar(1.0 + 0.1 * i as f64, 0.3 * i as f64))
            .collect();
        let w2: Vec<Complex64> = (0..20).map(|i| Complex64::from_polar(0.5, -0.7 * i as f64)).collect();
        let p1 = array_pattern_with(Execution::Sequential, &g, &w1, &m, &grid).unwrap();
        let p2 = array_pattern_with(Execution::Sequential, &g, &w2, &m, &grid).unwrap();
        let rot = Complex64::cis(1.234);
        let wr: Vec<Complex64> = w1.iter().map(|w| w * rot).collect();
        let ws: Vec<Complex64> = w1.iter().zip(&w2).map(|(a, b)| a + b).collect();
        let pr = array_pattern_with(Execution::Sequential, &g, &wr, &m, &grid).unwrap();
        let ps = array_pattern_with(Execution::Sequential, &g, &ws, &m, &grid).unwrap();
        for i in 0..grid.len() {
            assert_abs_diff_eq!(pr[i].norm(), p1[i].norm(), epsilon = 1e-12);
            assert_abs_diff_eq!((ps[i] - p1[i] - p2[i]).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn execution_order_does_not_change_results() {
        let g = build_geometry(8, 8, 0.5).unwrap();
        let ex = uniform_excitation(&g);
        let set = synthesize_schedules(&g, &ex, -30.0, 0.5, 0.0, Mode::AmpPhase, &ModulationConfig::default()).unwrap();
        let grid = AngleGrid::hemisphere(3.0, 6.0).unwrap();
        let m = ElementPatternModel::default();
        let sp = set.spectrum(1);
        let a = harmonic_pattern_with(Execution::Sequential, &g, &ex, &sp, &m, &grid, 1).unwrap();
        let b = harmonic_pattern_with(Execution::Parallel, &g, &ex, &sp, &m, &grid, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mirror_symmetric_excitation_gives_symmetric_cut() {
        let g = build_geometry(8, 8, 0.5).unwrap();
        let ex = uniform_excitation(&g);
        let code = static_code_pattern(&g, 30f64.to_radians(), 0.0).unwrap();
        // The 30° code is palindromic along x.
        assert_eq!(code.mirror_columns(), code);
        let grid = AngleGrid::h_plane(0.1).unwrap();
        let p = static_pattern(&g, &ex, &code, &ElementPatternModel::default(), &grid).unwrap();
        let mag = p.magnitude();
        let n = mag.len();
        for i in 0..n {
            assert_abs_diff_eq!(mag[i], mag[n - 1 - i], epsilon = 1e-10);
        }
    }
}
