//! Scalar diffraction engine: radiates the concentric array onto a plane by
//! direct spherical-wave summation, applies the lens phase screen, propagates
//! with the band-limited angular spectrum method, and provides the field
//! diagnostics (longitudinal power scan, focus finder, vortex charge).
//!
//! Time convention e^{+jωt}: forward propagation multiplies plane-wave
//! components by e^{-j k_z Δz}, matching the e^{-jkd} spherical phasor used
//! by the array module.

mod fft;

use crate::array::ConcentricArray;
use crate::lens::PhaseProfile;
use fft::{fft2, spatial_frequency, Direction};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;
use thiserror::Error;

/// Minimum number of spectral bin spacings the band limit must retain; below
/// this the window is too small for the requested propagation distance.
const BAND_LIMIT_MIN_BINS: f64 = 4.0;

/// Relative amplitude floor below which circle samples do not define a phase.
const CHARGE_AMPLITUDE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("grid dimensions {nx}x{ny} must be powers of two")]
    NonPowerOfTwo { nx: usize, ny: usize },
    #[error("plane at z = {z} m is closer than 10 wavelengths ({limit} m) to an element")]
    NearFieldViolation { z: f64, limit: f64 },
    #[error("grid geometry mismatch: {0}")]
    GridMismatch(String),
    #[error("propagation step {0} m must be non-negative")]
    NegativeStep(f64),
    #[error(
        "band limit {k_limit:.3} rad/m collapses below {min_required:.3} rad/m: the window is \
         too small to propagate {delta_z} m without wraparound aliasing"
    )]
    BandLimitViolation {
        k_limit: f64,
        min_required: f64,
        delta_z: f64,
    },
    #[error("position ({x}, {y}) m outside the grid window")]
    OutOfGrid { x: f64, y: f64 },
    #[error("sample circle leaves the grid window")]
    CircleOutsideGrid,
    #[error("{below_floor:.1}% of circle samples below the amplitude floor: charge undefined")]
    UndefinedCharge { below_floor: f64 },
    #[error("mode {0} is not present in the array")]
    UnknownMode(i32),
    #[error("invalid scan range: {0}")]
    BadScanRange(String),
}

/// Complex scalar field samples on a transverse plane.
///
/// Row-major layout, index `iy * nx + ix`; the axis crosses the grid at
/// sample (nx/2, ny/2). `z` is measured from the transmit-array center.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    samples: Vec<Complex64>,
    nx: usize,
    ny: usize,
    pitch: f64,
    z: f64,
    wavelength: f64,
}

impl FieldGrid {
    pub fn new(
        samples: Vec<Complex64>,
        nx: usize,
        ny: usize,
        pitch: f64,
        z: f64,
        wavelength: f64,
    ) -> Result<Self, FieldError> {
        if !nx.is_power_of_two() || !ny.is_power_of_two() {
            return Err(FieldError::NonPowerOfTwo { nx, ny });
        }
        assert_eq!(samples.len(), nx * ny);
        Ok(FieldGrid {
            samples,
            nx,
            ny,
            pitch,
            z,
            wavelength,
        })
    }

    /// Builds a synthetic field from a closure of physical (x, y).
    pub fn from_fn(
        nx: usize,
        ny: usize,
        pitch: f64,
        z: f64,
        wavelength: f64,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self, FieldError> {
        let half_x = (nx / 2) as f64;
        let half_y = (ny / 2) as f64;
        let samples = (0..nx * ny)
            .map(|i| {
                let ix = i % nx;
                let iy = i / nx;
                f((ix as f64 - half_x) * pitch, (iy as f64 - half_y) * pitch)
            })
            .collect();
        FieldGrid::new(samples, nx, ny, pitch, z, wavelength)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn pitch(&self) -> f64 {
        self.pitch
    }
    pub fn z(&self) -> f64 {
        self.z
    }
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.samples[iy * self.nx + ix]
    }
    pub fn x_at(&self, ix: usize) -> f64 {
        (ix as f64 - (self.nx / 2) as f64) * self.pitch
    }
    pub fn y_at(&self, iy: usize) -> f64 {
        (iy as f64 - (self.ny / 2) as f64) * self.pitch
    }

    /// Σ|u|²·pitch² over the whole grid, W.
    pub fn total_power(&self) -> f64 {
        self.samples.iter().map(|u| u.norm_sqr()).sum::<f64>() * self.pitch * self.pitch
    }

    /// Σ|u|²·pitch² over the disc r ≤ radius centered on the axis.
    pub fn captured_power(&self, radius: f64) -> f64 {
        let r2 = radius * radius;
        let mut acc = 0.0;
        for iy in 0..self.ny {
            let y = self.y_at(iy);
            if y.abs() > radius {
                continue;
            }
            let row = &self.samples[iy * self.nx..(iy + 1) * self.nx];
            for (ix, u) in row.iter().enumerate() {
                let x = self.x_at(ix);
                if x * x + y * y <= r2 {
                    acc += u.norm_sqr();
                }
            }
        }
        acc * self.pitch * self.pitch
    }

    /// On-axis intensity |u(0,0)|², W/m².
    pub fn on_axis_intensity(&self) -> f64 {
        self.at(self.nx / 2, self.ny / 2).norm_sqr()
    }

    /// Bilinear interpolation of the complex samples at physical (x, y).
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Result<Complex64, FieldError> {
        let fx = x / self.pitch + (self.nx / 2) as f64;
        let fy = y / self.pitch + (self.ny / 2) as f64;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= (self.nx - 1) as f64 && fy <= (self.ny - 1) as f64)
        {
            return Err(FieldError::OutOfGrid { x, y });
        }
        let ix = (fx.floor() as usize).min(self.nx - 2);
        let iy = (fy.floor() as usize).min(self.ny - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let v00 = self.at(ix, iy);
        let v10 = self.at(ix + 1, iy);
        let v01 = self.at(ix, iy + 1);
        let v11 = self.at(ix + 1, iy + 1);
        Ok(v00 * (1.0 - tx) * (1.0 - ty)
            + v10 * tx * (1.0 - ty)
            + v01 * (1.0 - tx) * ty
            + v11 * tx * ty)
    }
}

/// Captured power and on-axis intensity over a set of longitudinal planes.
#[derive(Debug, Clone, PartialEq)]
pub struct LongitudinalScan {
    /// Plane coordinates, m from the array center, strictly increasing.
    pub z_values: Vec<f64>,
    /// Power within the capture disc per plane, W.
    pub captured_power: Vec<f64>,
    /// |u|² on the axis per plane, W/m².
    pub on_axis_intensity: Vec<f64>,
    /// Radius of the capture disc, m.
    pub capture_radius: f64,
}

/// Result of locating the captured-power maximum of a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusResult {
    /// Plane of maximum captured power, m from the array center.
    pub z: f64,
    /// False when the maximum sits on a scan boundary (no interior focus).
    pub interior: bool,
}

/// Radiates the selected modes onto the plane at `z` by exact element-wise
/// spherical-wave summation u = Σ A e^{-jkd}/d.
///
/// `excitations` pairs each active mode with a complex weight; the ring's
/// per-element drive is weight·I_n·e^{jα_n}/√N, so a unit weight radiates
/// unit total element power per mode. Superposition over modes is linear.
pub fn radiate_to_plane(
    array: &ConcentricArray,
    excitations: &[(i32, Complex64)],
    z: f64,
    nx: usize,
    ny: usize,
    pitch: f64,
) -> Result<FieldGrid, FieldError> {
    if !nx.is_power_of_two() || !ny.is_power_of_two() {
        return Err(FieldError::NonPowerOfTwo { nx, ny });
    }
    let limit = 10.0 * array.wavelength;
    if z < limit {
        return Err(FieldError::NearFieldViolation { z, limit });
    }
    struct Element {
        x: f64,
        y: f64,
        drive: Complex64,
    }
    let mut elements = Vec::new();
    for &(mode, weight) in excitations {
        let ring = array
            .ring_for_mode(mode)
            .ok_or(FieldError::UnknownMode(mode))?;
        let norm = 1.0 / (ring.element_count as f64).sqrt();
        for (n, (ex, ey)) in ring.element_positions().into_iter().enumerate() {
            let drive = weight
                * Complex64::from_polar(
                    ring.excitation_amplitudes[n] * norm,
                    ring.excitation_phases[n],
                );
            elements.push(Element {
                x: ex,
                y: ey,
                drive,
            });
        }
    }
    let k = TAU / array.wavelength;
    let half_x = (nx / 2) as f64;
    let half_y = (ny / 2) as f64;
    let mut samples = vec![Complex64::new(0.0, 0.0); nx * ny];
    samples
        .par_chunks_mut(nx)
        .enumerate()
        .for_each(|(iy, row)| {
            let y = (iy as f64 - half_y) * pitch;
            for (ix, out) in row.iter_mut().enumerate() {
                let x = (ix as f64 - half_x) * pitch;
                let mut acc = Complex64::new(0.0, 0.0);
                for e in &elements {
                    let dx = x - e.x;
                    let dy = y - e.y;
                    let d = (dx * dx + dy * dy + z * z).sqrt();
                    acc += e.drive * Complex64::from_polar(1.0 / d, -k * d);
                }
                *out = acc;
            }
        });
    FieldGrid::new(samples, nx, ny, pitch, z, array.wavelength)
}

/// Zeroes the field outside the disc r > radius: the optional absorbing
/// stop around the lens aperture (off by default; the bare setup lets the
/// field pass unmodified).
pub fn apply_absorbing_stop(field: &FieldGrid, radius: f64) -> FieldGrid {
    let r2 = radius * radius;
    let samples = field
        .samples
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let x = field.x_at(i % field.nx);
            let y = field.y_at(i / field.nx);
            if x * x + y * y > r2 {
                Complex64::new(0.0, 0.0)
            } else {
                *u
            }
        })
        .collect();
    FieldGrid {
        samples,
        ..field.clone()
    }
}

/// Per-sample multiplication by e^{jφ(x,y)}. |u| is unchanged everywhere.
pub fn apply_phase_screen(
    field: &FieldGrid,
    profile: &PhaseProfile,
) -> Result<FieldGrid, FieldError> {
    if profile.nx() != field.nx || profile.ny() != field.ny {
        return Err(FieldError::GridMismatch(format!(
            "profile {}x{} vs field {}x{}",
            profile.nx(),
            profile.ny(),
            field.nx,
            field.ny
        )));
    }
    if (profile.pitch() - field.pitch).abs() > 1e-12 * field.pitch.max(1.0) {
        return Err(FieldError::GridMismatch(format!(
            "profile pitch {} vs field pitch {}",
            profile.pitch(),
            field.pitch
        )));
    }
    let samples = field
        .samples
        .iter()
        .zip(profile.samples())
        .map(|(u, &p)| u * Complex64::from_polar(1.0, p))
        .collect();
    Ok(FieldGrid {
        samples,
        ..field.clone()
    })
}

/// Forward spectrum of a field plus the constants needed to reuse it across
/// several propagation steps (one FFT for a whole longitudinal scan).
struct Spectrum {
    bins: Vec<Complex64>,
    nx: usize,
    ny: usize,
    pitch: f64,
    wavelength: f64,
    z: f64,
}

impl Spectrum {
    fn from_field(field: &FieldGrid) -> Self {
        let mut bins = field.samples.clone();
        fft2(&mut bins, field.nx, field.ny, Direction::Forward);
        Spectrum {
            bins,
            nx: field.nx,
            ny: field.ny,
            pitch: field.pitch,
            wavelength: field.wavelength,
            z: field.z,
        }
    }

    /// Applies the band-limited ASM kernel for step `delta_z` and returns
    /// the propagated field. The kernel zeroes evanescent components and
    /// spatial frequencies beyond k·R/√(Δz² + R²) (R = half window), which
    /// would otherwise wrap around the periodic window.
    fn propagate(&self, delta_z: f64) -> Result<FieldGrid, FieldError> {
        if delta_z < 0.0 {
            return Err(FieldError::NegativeStep(delta_z));
        }
        let k = TAU / self.wavelength;
        let half_window = 0.5 * self.nx.min(self.ny) as f64 * self.pitch;
        let k_limit = k * half_window / delta_z.hypot(half_window);
        let bin_spacing = TAU / (self.nx.max(self.ny) as f64 * self.pitch);
        let min_required = BAND_LIMIT_MIN_BINS * bin_spacing;
        if k_limit < min_required {
            return Err(FieldError::BandLimitViolation {
                k_limit,
                min_required,
                delta_z,
            });
        }
        let k_limit_sq = k_limit * k_limit;
        let k_sq = k * k;
        let mut bins = self.bins.clone();
        for iy in 0..self.ny {
            let ky = spatial_frequency(iy, self.ny, self.pitch);
            for ix in 0..self.nx {
                let kx = spatial_frequency(ix, self.nx, self.pitch);
                let kt_sq = kx * kx + ky * ky;
                let bin = &mut bins[iy * self.nx + ix];
                let kz_sq = k_sq - kt_sq;
                if kz_sq <= 0.0 || kt_sq > k_limit_sq {
                    // evanescent or beyond the anti-aliasing band: content
                    // that cannot reach the destination window physically
                    *bin = Complex64::new(0.0, 0.0);
                } else {
                    *bin *= Complex64::from_polar(1.0, -kz_sq.sqrt() * delta_z);
                }
            }
        }
        fft2(&mut bins, self.nx, self.ny, Direction::Inverse);
        FieldGrid::new(
            bins,
            self.nx,
            self.ny,
            self.pitch,
            self.z + delta_z,
            self.wavelength,
        )
    }
}

/// Propagates a field forward by `delta_z` with the band-limited angular
/// spectrum method. Energy of the propagating content is conserved.
pub fn angular_spectrum_propagate(
    field: &FieldGrid,
    delta_z: f64,
) -> Result<FieldGrid, FieldError> {
    Spectrum::from_field(field).propagate(delta_z)
}

/// Captured power (disc of `capture_radius`) and on-axis intensity on
/// `steps` planes evenly spaced over [z_start, z_end] (absolute z, forward
/// of the input field).
pub fn longitudinal_scan(
    field: &FieldGrid,
    z_start: f64,
    z_end: f64,
    steps: usize,
    capture_radius: f64,
) -> Result<LongitudinalScan, FieldError> {
    if steps < 2 || !(z_start < z_end) {
        return Err(FieldError::BadScanRange(format!(
            "need z_start < z_end and steps >= 2, got [{z_start}, {z_end}] x {steps}"
        )));
    }
    if z_start < field.z {
        return Err(FieldError::BadScanRange(format!(
            "scan starts at {z_start} m behind the field plane {} m",
            field.z
        )));
    }
    let half_window = 0.5 * field.nx.min(field.ny) as f64 * field.pitch;
    if capture_radius > half_window {
        return Err(FieldError::CircleOutsideGrid);
    }
    let spectrum = Spectrum::from_field(field);
    let z_values: Vec<f64> = (0..steps)
        .map(|i| z_start + (z_end - z_start) * i as f64 / (steps - 1) as f64)
        .collect();
    let planes: Result<Vec<(f64, f64)>, FieldError> = z_values
        .par_iter()
        .map(|&z| {
            let plane = spectrum.propagate(z - field.z)?;
            Ok((plane.captured_power(capture_radius), plane.on_axis_intensity()))
        })
        .collect();
    let planes = planes?;
    Ok(LongitudinalScan {
        z_values,
        captured_power: planes.iter().map(|p| p.0).collect(),
        on_axis_intensity: planes.iter().map(|p| p.1).collect(),
        capture_radius,
    })
}

/// z of maximum captured power; ties break toward smaller z. `interior` is
/// false when the maximum sits on a boundary of the scanned range.
pub fn find_focus(scan: &LongitudinalScan) -> Result<FocusResult, FieldError> {
    if scan.z_values.is_empty() {
        return Err(FieldError::BadScanRange("empty scan".into()));
    }
    let mut best = 0;
    for (i, &p) in scan.captured_power.iter().enumerate() {
        if p > scan.captured_power[best] {
            best = i;
        }
    }
    Ok(FocusResult {
        z: scan.z_values[best],
        interior: best > 0 && best + 1 < scan.z_values.len(),
    })
}

/// Winding number of the field phase around a circle: (1/2π)·Σ of unwrapped
/// phase increments over `samples` bilinear probes, rounded to the nearest
/// integer.
///
/// Errors if 5% or more of the circle samples fall below the amplitude
/// floor (default 1e-6 of the grid maximum).
pub fn vortex_charge(
    field: &FieldGrid,
    center: (f64, f64),
    radius: f64,
) -> Result<i32, FieldError> {
    let circumference_samples = (TAU * radius / field.pitch).ceil() as usize * 2;
    let samples = circumference_samples.clamp(360, 4096);
    let floor = CHARGE_AMPLITUDE_FLOOR
        * field
            .samples
            .iter()
            .map(|u| u.norm())
            .fold(0.0_f64, f64::max);
    let mut ring = Vec::with_capacity(samples);
    let mut below = 0usize;
    for i in 0..samples {
        let angle = TAU * i as f64 / samples as f64;
        let x = center.0 + radius * angle.cos();
        let y = center.1 + radius * angle.sin();
        let u = field
            .sample_bilinear(x, y)
            .map_err(|_| FieldError::CircleOutsideGrid)?;
        if u.norm() < floor {
            below += 1;
        }
        ring.push(u);
    }
    if below * 20 >= samples {
        return Err(FieldError::UndefinedCharge {
            below_floor: 100.0 * below as f64 / samples as f64,
        });
    }
    let mut winding = 0.0;
    for i in 0..samples {
        let a = ring[i];
        let b = ring[(i + 1) % samples];
        winding += (b * a.conj()).arg();
    }
    Ok((winding / TAU).round() as i32)
}
