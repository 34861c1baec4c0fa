//! Ring-shaped circular-Airy phase lens: binary Airy phase term, spherical
//! compensation, total wrapped phase over a sampled aperture, dielectric
//! thickness map, and the analytic focal predictions.

use crate::specfun::{self, SpecfunError};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LensError {
    #[error("pitch {pitch} m undersamples the profile: need pitch <= lambda/4 = {limit} m")]
    Undersampled { pitch: f64, limit: f64 },
    #[error("refractive index {0} <= 1 cannot realize a phase delay")]
    NonRefracting(f64),
    #[error("invalid lens parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Parameters of the circular-Airy compensation lens.
#[derive(Debug, Clone, PartialEq)]
pub struct AiryLensSpec {
    /// Initial radius parameter r0, m.
    pub r0: f64,
    /// Transverse scaling β, 1/m.
    pub beta: f64,
    /// Exponential decay α in (0, 1).
    pub alpha: f64,
    /// Array-to-lens distance d0, m.
    pub d0: f64,
    /// Physical aperture diameter, m.
    pub aperture_diameter: f64,
    /// Arbitrary fabrication phase constant φ0, rad.
    pub phi0: f64,
    /// Relative permittivity of the dielectric.
    pub epsilon_r: f64,
    /// Relative permeability of the dielectric.
    pub mu_r: f64,
}

impl Default for AiryLensSpec {
    /// The reference bench parameters: r0 = 0.04 m, β = 29 /m,
    /// d0 = 0.9 m, 0.6 m HDPE aperture (ε_r ≈ 2.9).
    fn default() -> Self {
        AiryLensSpec {
            r0: 0.04,
            beta: 29.0,
            alpha: 0.1,
            d0: 0.9,
            aperture_diameter: 0.6,
            phi0: 0.0,
            epsilon_r: 2.9,
            mu_r: 1.0,
        }
    }
}

impl AiryLensSpec {
    /// η = √(ε_r μ_r).
    pub fn refractive_index(&self) -> f64 {
        (self.epsilon_r * self.mu_r).sqrt()
    }

    pub fn validate(&self) -> Result<(), LensError> {
        let fail = |msg: String| Err(LensError::InvalidParameter(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(format!("alpha must lie in (0,1), got {}", self.alpha));
        }
        if !(self.beta > 0.0) {
            return fail(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.r0 >= 0.0) {
            return fail(format!("r0 must be non-negative, got {}", self.r0));
        }
        if !(self.d0 > 0.0) {
            return fail(format!("d0 must be positive, got {}", self.d0));
        }
        if !(self.aperture_diameter > 0.0) {
            return fail(format!(
                "aperture must be positive, got {}",
                self.aperture_diameter
            ));
        }
        if self.refractive_index() <= 1.0 {
            return Err(LensError::NonRefracting(self.refractive_index()));
        }
        if self.r0 + 1.0 / self.beta >= self.aperture_diameter / 2.0 {
            return fail(format!(
                "highest-intensity ring r0 + 1/beta = {} m does not fit inside the {} m aperture",
                self.r0 + 1.0 / self.beta,
                self.aperture_diameter
            ));
        }
        Ok(())
    }
}

/// Sampled wrapped phase over a square grid centered on the lens axis.
/// Samples are in [0, 2π); outside the aperture disc the phase is 0
/// (the field passes unmodified).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    samples: Vec<f64>,
    nx: usize,
    ny: usize,
    pitch: f64,
}

impl PhaseProfile {
    pub fn from_samples(samples: Vec<f64>, nx: usize, ny: usize, pitch: f64) -> Self {
        assert_eq!(samples.len(), nx * ny);
        PhaseProfile {
            samples,
            nx,
            ny,
            pitch,
        }
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
    /// Physical grid extent along x, m.
    pub fn extent(&self) -> f64 {
        self.nx as f64 * self.pitch
    }
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.samples[iy * self.nx + ix]
    }
    /// Physical coordinate of column ix (center at index nx/2).
    pub fn x_at(&self, ix: usize) -> f64 {
        (ix as f64 - (self.nx / 2) as f64) * self.pitch
    }
    pub fn y_at(&self, iy: usize) -> f64 {
        (iy as f64 - (self.ny / 2) as f64) * self.pitch
    }
}

/// Physical step-thickness map realizing a phase profile in a dielectric.
#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessMap {
    samples: Vec<f64>,
    nx: usize,
    ny: usize,
    pitch: f64,
    /// Refractive index the map was computed for.
    pub refractive_index: f64,
}

impl ThicknessMap {
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn pitch(&self) -> f64 {
        self.pitch
    }
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.samples[iy * self.nx + ix]
    }
}

/// Ai[β(r0 - r)] · exp[αβ(r0 - r)]: the circular Airy envelope at radius r.
pub fn circular_airy_envelope(r: f64, spec: &AiryLensSpec) -> Result<f64, LensError> {
    let arg = spec.beta * (spec.r0 - r);
    Ok(specfun::airy_ai(arg)? * (spec.alpha * arg).exp())
}

/// arg[Ψ(r)] for the real envelope: 0 where the envelope is ≥ 0, π where
/// it is negative (the exponential factor is always positive).
pub fn airy_phase(r: f64, spec: &AiryLensSpec) -> Result<f64, LensError> {
    let ai = specfun::airy_ai(spec.beta * (spec.r0 - r))?;
    Ok(if ai >= 0.0 { 0.0 } else { PI })
}

/// Spherical path-length compensation k(√(d0² + x² + y²) - d0), ≥ 0.
pub fn compensation_phase(x: f64, y: f64, d0: f64, wavenumber: f64) -> f64 {
    wavenumber * ((d0 * d0 + x * x + y * y).sqrt() - d0)
}

/// Samples φ_Airy + φ_compensation wrapped to [0, 2π) on an nx×ny grid.
/// Outside the aperture disc the profile is 0 (transparent).
pub fn total_phase_profile(
    spec: &AiryLensSpec,
    wavenumber: f64,
    pitch: f64,
    nx: usize,
    ny: usize,
) -> Result<PhaseProfile, LensError> {
    spec.validate()?;
    let wavelength = TAU / wavenumber;
    if pitch > wavelength / 4.0 {
        return Err(LensError::Undersampled {
            pitch,
            limit: wavelength / 4.0,
        });
    }
    let half_aperture = spec.aperture_diameter / 2.0;
    let mut samples = vec![0.0; nx * ny];
    for iy in 0..ny {
        let y = (iy as f64 - (ny / 2) as f64) * pitch;
        for ix in 0..nx {
            let x = (ix as f64 - (nx / 2) as f64) * pitch;
            let r = (x * x + y * y).sqrt();
            if r <= half_aperture {
                let phase = airy_phase(r, spec)?
                    + compensation_phase(x, y, spec.d0, wavenumber);
                samples[iy * nx + ix] = phase.rem_euclid(TAU);
            }
        }
    }
    Ok(PhaseProfile {
        samples,
        nx,
        ny,
        pitch,
    })
}

/// Δh = ((φ_total + φ0) mod 2π) / 2π · λ/(η-1) per sample.
pub fn thickness_map(
    profile: &PhaseProfile,
    wavelength: f64,
    eta: f64,
    phi0: f64,
) -> Result<ThicknessMap, LensError> {
    if eta <= 1.0 {
        return Err(LensError::NonRefracting(eta));
    }
    let scale = wavelength / (eta - 1.0) / TAU;
    let samples = profile
        .samples
        .iter()
        .map(|&p| (p + phi0).rem_euclid(TAU) * scale)
        .collect();
    Ok(ThicknessMap {
        samples,
        nx: profile.nx,
        ny: profile.ny,
        pitch: profile.pitch,
        refractive_index: eta,
    })
}

/// Thickness of a full 2π wrap: λ/(η-1). Upper bound for every Δh sample.
pub fn full_wrap_thickness(wavelength: f64, eta: f64) -> Result<f64, LensError> {
    if eta <= 1.0 {
        return Err(LensError::NonRefracting(eta));
    }
    Ok(wavelength / (eta - 1.0))
}

/// f_d = √(4k²(r0 + 1/β)/β³): auto-focusing distance of the ring-Airy beam.
pub fn predict_focal_length(spec: &AiryLensSpec, wavenumber: f64) -> f64 {
    (4.0 * wavenumber * wavenumber * (spec.r0 + 1.0 / spec.beta) / spec.beta.powi(3)).sqrt()
}

/// x_d = β³ f_d² / (4k²): main-lobe deflection accumulated over f_d.
pub fn predict_deflection(beta: f64, focal: f64, wavenumber: f64) -> f64 {
    beta.powi(3) * focal * focal / (4.0 * wavenumber * wavenumber)
}
