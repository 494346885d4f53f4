//! Aperture geometry, element radiation model, feed excitation and static
//! 1-bit coding.
//!
//! Positions are expressed in carrier wavelengths with the aperture centred
//! on the origin. Elements are stored row-major: element `e` sits at row
//! `e / cols`, column `e % cols`; columns run along `x`, rows along `y`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regular, origin-centred planar grid of elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    rows: usize,
    cols: usize,
    spacing: f64,
    positions: Vec<(f64, f64)>,
}

impl ArrayGeometry {
    pub fn new(rows: usize, cols: usize, spacing: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "array must have at least one row and column, got {rows}x{cols}"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "element spacing must be positive, got {spacing}"
            )));
        }
        let x0 = (cols as f64 - 1.0) / 2.0;
        let y0 = (rows as f64 - 1.0) / 2.0;
        let positions = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| ((c as f64 - x0) * spacing, (r as f64 - y0) * spacing)))
            .collect();
        Ok(Self {
            rows,
            cols,
            spacing,
            positions,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Element pitch in wavelengths.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `(x, y)` of every element in wavelengths, row-major.
    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn row_col(&self, element: usize) -> (usize, usize) {
        (element / self.cols, element % self.cols)
    }

    /// Physical aperture area in square wavelengths (pitch times count).
    pub fn aperture_area(&self) -> f64 {
        (self.rows as f64 * self.spacing) * (self.cols as f64 * self.spacing)
    }
}

/// Convenience wrapper matching the operation name used elsewhere.
pub fn build_geometry(rows: usize, cols: usize, spacing: f64) -> Result<ArrayGeometry> {
    ArrayGeometry::new(rows, cols, spacing)
}

/// Single-element pattern `cos^q(theta)` on the front hemisphere, zero behind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementPatternModel {
    pub exponent: f64,
    pub boresight_gain_db: f64,
}

impl ElementPatternModel {
    /// Realized boresight gain quoted for the meta-atom.
    pub const DEFAULT_GAIN_DB: f64 = 5.3;

    pub fn new(exponent: f64, boresight_gain_db: f64) -> Result<Self> {
        if !(exponent >= 0.0 && exponent.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "element exponent must be a finite non-negative number, got {exponent}"
            )));
        }
        Ok(Self {
            exponent,
            boresight_gain_db,
        })
    }

    /// Isotropic over the front hemisphere (`q = 0`).
    pub fn isotropic() -> Self {
        Self {
            exponent: 0.0,
            boresight_gain_db: 0.0,
        }
    }

    /// Fits `q` so the element's full half-power beamwidth equals `hpbw_deg`.
    pub fn from_hpbw_deg(hpbw_deg: f64) -> Result<Self> {
        if !(hpbw_deg > 0.0 && hpbw_deg < 180.0) {
            return Err(Error::InvalidArgument(format!(
                "element beamwidth must lie in (0, 180) degrees, got {hpbw_deg}"
            )));
        }
        let half = (hpbw_deg / 2.0).to_radians();
        let exponent = FRAC_1_SQRT_2.ln() / half.cos().ln();
        Self::new(exponent, Self::DEFAULT_GAIN_DB)
    }

    /// Amplitude pattern at polar angle `theta` (radians). Negative angles
    /// from signed cuts are folded onto `|theta|`.
    pub fn factor(&self, theta: f64) -> f64 {
        let t = theta.abs();
        if t > FRAC_PI_2 {
            return 0.0;
        }
        if self.exponent == 0.0 {
            return 1.0;
        }
        t.cos().max(0.0).powf(self.exponent)
    }
}

impl Default for ElementPatternModel {
    /// `q ≈ 0.784`, i.e. a 100° half-power beamwidth.
    fn default() -> Self {
        Self::from_hpbw_deg(100.0).expect("100 degrees is a valid beamwidth")
    }
}

pub fn element_factor(model: &ElementPatternModel, theta: f64) -> f64 {
    model.factor(theta)
}

/// Per-element feed amplitude and phase delivered by the distribution network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Excitation {
    amplitude: Vec<f64>,
    phase: Vec<f64>,
}

impl Excitation {
    pub fn new(amplitude: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        if amplitude.len() != phase.len() {
            return Err(Error::InvalidArgument(format!(
                "amplitude ({}) and phase ({}) lengths differ",
                amplitude.len(),
                phase.len()
            )));
        }
        if let Some(bad) = amplitude.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "feed amplitudes must be finite and non-negative, got {bad}"
            )));
        }
        Ok(Self { amplitude, phase })
    }

    /// Equal-split, equi-phase feed.
    pub fn uniform(geometry: &ArrayGeometry) -> Self {
        Self {
            amplitude: vec![1.0; geometry.len()],
            phase: vec![0.0; geometry.len()],
        }
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn len(&self) -> usize {
        self.amplitude.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitude.is_empty()
    }

    pub(crate) fn check_matches(&self, geometry: &ArrayGeometry) -> Result<()> {
        if self.len() != geometry.len() {
            return Err(Error::InvalidArgument(format!(
                "excitation has {} entries but the array has {} elements",
                self.len(),
                geometry.len()
            )));
        }
        Ok(())
    }
}

pub fn uniform_excitation(geometry: &ArrayGeometry) -> Excitation {
    Excitation::uniform(geometry)
}

/// One of the two programmable phase states of a meta-atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeState {
    Zero,
    Pi,
}

impl CodeState {
    pub fn radians(self) -> f64 {
        match self {
            CodeState::Zero => 0.0,
            CodeState::Pi => PI,
        }
    }

    /// Nearest state to an arbitrary phase; exact ±π/2 ties go to π.
    pub fn quantize(phase: f64) -> Self {
        let wrapped = wrap_phase(phase);
        if wrapped.abs() >= FRAC_PI_2 - 1e-12 {
            CodeState::Pi
        } else {
            CodeState::Zero
        }
    }
}

/// Static 1-bit code over the aperture, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryCodeMatrix {
    rows: usize,
    cols: usize,
    states: Vec<CodeState>,
}

impl BinaryCodeMatrix {
    pub fn new(rows: usize, cols: usize, states: Vec<CodeState>) -> Result<Self> {
        if states.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} code states supplied for a {rows}x{cols} array",
                states.len()
            )));
        }
        Ok(Self { rows, cols, states })
    }

    pub fn filled(rows: usize, cols: usize, state: CodeState) -> Self {
        Self {
            rows,
            cols,
            states: vec![state; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn states(&self) -> &[CodeState] {
        &self.states
    }

    pub fn get(&self, row: usize, col: usize) -> CodeState {
        self.states[row * self.cols + col]
    }

    /// Same code with the column order reversed.
    pub fn mirror_columns(&self) -> Self {
        let states = (0..self.rows)
            .flat_map(|r| (0..self.cols).rev().map(move |c| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            states,
        }
    }
}

/// Wraps a phase into `[-π, π)`.
pub fn wrap_phase(phase: f64) -> f64 {
    (phase + PI).rem_euclid(TAU) - PI
}

/// Ideal progressive phase `-k0 (x sinθ cosφ + y sinθ sinφ)` for each element.
pub(crate) fn progressive_phase(geometry: &ArrayGeometry, theta: f64, phi: f64) -> Vec<f64> {
    let (u, v) = (theta.sin() * phi.cos(), theta.sin() * phi.sin());
    geometry
        .positions()
        .iter()
        .map(|&(x, y)| -TAU * (x * u + y * v))
        .collect()
}

/// Quantizes the steering gradient toward `(scan_theta, scan_phi)` to the
/// nearer of the two element states.
pub fn static_code_pattern(geometry: &ArrayGeometry, scan_theta: f64, scan_phi: f64) -> Result<BinaryCodeMatrix> {
    if scan_theta.abs() > FRAC_PI_2 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "scan angle {scan_theta} rad is outside [-pi/2, pi/2]"
        )));
    }
    let states = progressive_phase(geometry, scan_theta, scan_phi)
        .into_iter()
        .map(CodeState::quantize)
        .collect();
    BinaryCodeMatrix::new(geometry.rows(), geometry.cols(), states)
}
