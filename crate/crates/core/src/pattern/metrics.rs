//! Pattern scoring: sidelobe level, half-power beamwidth, pointing and
//! directivity.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::error::{Error, Result};

use super::{AngleGrid, FarFieldPattern};

/// Minimum half-width of the main-lobe exclusion zone around the peak.
pub const DEFAULT_MAIN_LOBE_GUARD_DEG: f64 = 2.0;

fn cut_of(pattern: &FarFieldPattern) -> Result<(&[f64], Vec<f64>)> {
    let theta = pattern.grid.cut_angles().ok_or_else(|| {
        Error::InvalidArgument("this metric needs a principal-plane cut, not a hemisphere grid".into())
    })?;
    let mag = pattern.magnitude();
    if mag.len() < 3 {
        return Err(Error::InvalidArgument("cut has fewer than three samples".into()));
    }
    Ok((theta, mag))
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x > v[best] { i } else { best })
}

/// Highest level outside the main lobe, in dB relative to the peak.
///
/// The main lobe spans from the peak out to the first local minimum on each
/// side, and always covers at least `±main_lobe_exclusion_deg` around the
/// peak so that shallow ripples on a broad or null-filled beam are not
/// mistaken for its edge.
pub fn sll(pattern: &FarFieldPattern, main_lobe_exclusion_deg: f64) -> Result<f64> {
    let (theta, mag) = cut_of(pattern)?;
    let peak = argmax(&mag);
    if mag[peak] <= 0.0 {
        return Err(Error::InvalidArgument("pattern is identically zero".into()));
    }
    let mut lo = peak;
    while lo > 0 && mag[lo - 1] <= mag[lo] {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < mag.len() && mag[hi + 1] <= mag[hi] {
        hi += 1;
    }
    let guard = main_lobe_exclusion_deg.max(0.0).to_radians();
    let lo_angle = theta[lo].min(theta[peak] - guard);
    let hi_angle = theta[hi].max(theta[peak] + guard);
    let outside = theta
        .iter()
        .zip(&mag)
        .filter(|(t, _)| **t < lo_angle || **t > hi_angle)
        .map(|(_, m)| *m)
        .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.max(m))));
    match outside {
        Some(m) => Ok(20.0 * (m / mag[peak]).log10()),
        None => Err(Error::InvalidArgument(
            "no samples outside the main lobe; the pattern has no sidelobes".into(),
        )),
    }
}

/// Full width between the -3 dB crossings around the peak, in degrees.
pub fn hpbw(pattern: &FarFieldPattern) -> Result<f64> {
    let (theta, mag) = cut_of(pattern)?;
    let peak = argmax(&mag);
    let half = mag[peak] * FRAC_1_SQRT_2;
    let crossing = |a: usize, b: usize| {
        let f = (half - mag[a]) / (mag[b] - mag[a]);
        theta[a] + f * (theta[b] - theta[a])
    };

    let mut l = peak;
    while mag[l] >= half {
        if l == 0 {
            return Err(Error::Boundary("no -3 dB crossing below the peak".into()));
        }
        l -= 1;
    }
    let mut r = peak;
    while mag[r] >= half {
        if r + 1 == mag.len() {
            return Err(Error::Boundary("no -3 dB crossing above the peak".into()));
        }
        r += 1;
    }
    Ok((crossing(r - 1, r) - crossing(l, l + 1)).to_degrees())
}

/// Beam direction on a cut in degrees, refined by a parabola through the
/// peak sample and its neighbours.
pub fn pointing(pattern: &FarFieldPattern) -> Result<f64> {
    let (theta, mag) = cut_of(pattern)?;
    let i = argmax(&mag);
    if i == 0 || i + 1 == mag.len() {
        return Ok(theta[i].to_degrees());
    }
    let (a, b, c) = (mag[i - 1], mag[i], mag[i + 1]);
    let denom = a - 2.0 * b + c;
    let offset = if denom < 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    let step = if offset >= 0.0 {
        theta[i + 1] - theta[i]
    } else {
        theta[i] - theta[i - 1]
    };
    Ok((theta[i] + offset * step).to_degrees())
}

/// `(theta, phi)` of the strongest sample on any grid, in degrees.
pub fn peak_direction(pattern: &FarFieldPattern) -> (f64, f64) {
    let (i, _) = pattern.peak();
    let (t, p) = pattern.grid.direction(i);
    (t.to_degrees(), p.to_degrees())
}

/// Trapezoid weights on a sorted, possibly non-uniform axis.
fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { x[i] - x[i - 1] } else { 0.0 };
            let right = if i + 1 < n { x[i + 1] - x[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Trapezoid weights on a periodic axis covering `[0, 2π)`.
fn periodic_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let next = if i + 1 < n { x[i + 1] } else { x[0] + TAU };
            let prev = if i > 0 { x[i - 1] } else { x[n - 1] - TAU };
            0.5 * (next - prev)
        })
        .collect()
}

/// Peak directivity in dBi from a front-hemisphere grid.
///
/// `D = 4π |F_peak|² / ∫∫ |F|² sinθ dθ dφ`, trapezoidal in both angles.
/// The element factor vanishes behind the aperture, so the front hemisphere
/// carries all radiated power.
pub fn directivity(pattern: &FarFieldPattern) -> Result<f64> {
    let (theta, phi) = match &pattern.grid {
        AngleGrid::Hemisphere { theta, phi } => (theta, phi),
        AngleGrid::Cut { .. } => {
            return Err(Error::InvalidArgument(
                "directivity needs a full (theta, phi) grid, not a cut".into(),
            ))
        }
    };
    let wt = trapezoid_weights(theta);
    let wp = periodic_weights(phi);
    let np = phi.len();
    let mut total = 0.0;
    for (i, (&t, &w)) in theta.iter().zip(&wt).enumerate() {
        let ring: f64 = pattern.field[i * np..(i + 1) * np]
            .iter()
            .zip(&wp)
            .map(|(f, dp)| f.norm_sqr() * dp)
            .sum();
        total += ring * t.sin() * w;
    }
    let (_, peak) = pattern.peak();
    if total <= 0.0 {
        return Err(Error::InvalidArgument("pattern radiates no power".into()));
    }
    Ok(10.0 * (4.0 * PI * peak * peak / total).log10())
}
