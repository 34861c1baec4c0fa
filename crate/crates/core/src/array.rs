//! Concentric UCA transmitter design: per-mode ring radii for co-divergent
//! main lobes, per-element phase excitations, DFT beamforming, and the
//! analytic far-field patterns (discrete sum and Bessel-integral limit).

use crate::specfun::{self, SpecfunError};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, TAU};
use thiserror::Error;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArrayError {
    #[error("mode 0 degenerates to a single center element, not a ring")]
    DegenerateRing,
    #[error("divergence angle {0} rad outside (0, pi/2)")]
    DivergenceOutOfRange(f64),
    #[error("{count} elements undersample mode {mode}: need at least 2|l|+1")]
    Undersampled { mode: i32, count: usize },
    #[error("DFT column {column} outside 1..={count}")]
    ColumnOutOfRange { column: usize, count: usize },
    #[error("symbol vector length {got} does not match plan modes {expected}")]
    ShapeMismatch { got: usize, expected: usize },
    #[error("no real divergence peak: chi_l = {chi} exceeds k*R = {kr}")]
    NoRealPeak { chi: f64, kr: f64 },
    #[error("invalid carrier or geometry: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// One uniform circular array ring carrying OAM mode `mode`.
#[derive(Debug, Clone, PartialEq)]
pub struct UcaRing {
    /// OAM mode l generated by this ring.
    pub mode: i32,
    /// Ring radius R_l in meters (0 for the mode-0 center element).
    pub radius: f64,
    /// Number of elements N.
    pub element_count: usize,
    /// Phase adjusting factor φ_l shared by every element.
    pub phase_offset: f64,
    /// Per-element amplitudes I_{l,n} (uniform by construction).
    pub excitation_amplitudes: Vec<f64>,
    /// Per-element phases α_{l,n} = l(2πn/N + φ_l), wrapped to [0, 2π).
    pub excitation_phases: Vec<f64>,
}

impl UcaRing {
    /// Ring for a nonzero mode. `element_count` must satisfy the ring
    /// sampling theorem N ≥ 2|l| + 1.
    pub fn new(
        mode: i32,
        radius: f64,
        element_count: usize,
        phase_offset: f64,
    ) -> Result<Self, ArrayError> {
        if mode == 0 {
            return Err(ArrayError::DegenerateRing);
        }
        if mode.abs() > specfun::MAX_ORDER {
            return Err(SpecfunError::OrderOutOfRange(mode).into());
        }
        if !(radius > 0.0) {
            return Err(ArrayError::InvalidParameter(format!(
                "ring radius must be positive, got {radius}"
            )));
        }
        let phases = excitation_phases(mode, element_count, phase_offset)?;
        Ok(UcaRing {
            mode,
            radius,
            element_count,
            phase_offset,
            excitation_amplitudes: vec![1.0; element_count],
            excitation_phases: phases,
        })
    }

    /// The mode-0 "ring": a single element at the array center.
    pub fn center_element() -> Self {
        UcaRing {
            mode: 0,
            radius: 0.0,
            element_count: 1,
            phase_offset: 0.0,
            excitation_amplitudes: vec![1.0],
            excitation_phases: vec![0.0],
        }
    }

    /// Element azimuths φ_{l,n} = 2πn/N.
    pub fn element_azimuths(&self) -> Vec<f64> {
        (0..self.element_count)
            .map(|n| TAU * n as f64 / self.element_count as f64)
            .collect()
    }

    /// Element (x, y) positions on the z = 0 transmit plane.
    pub fn element_positions(&self) -> Vec<(f64, f64)> {
        self.element_azimuths()
            .iter()
            .map(|&az| (self.radius * az.cos(), self.radius * az.sin()))
            .collect()
    }
}

/// The full concentric-ring transmitter sharing one carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentricArray {
    pub rings: Vec<UcaRing>,
    pub carrier_frequency: f64,
    pub wavelength: f64,
    pub wavenumber: f64,
    /// Design divergence angle θ shared by all nonzero modes, radians.
    pub target_divergence: f64,
}

impl ConcentricArray {
    /// Designs rings for `modes` so that every nonzero mode radiates its
    /// main lobe at `divergence`. Element counts default to 4|l| per ring
    /// (one center element for mode 0).
    pub fn design(
        carrier_frequency: f64,
        modes: &[i32],
        divergence: f64,
    ) -> Result<Self, ArrayError> {
        if !(carrier_frequency > 0.0) {
            return Err(ArrayError::InvalidParameter(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        let wavelength = SPEED_OF_LIGHT / carrier_frequency;
        let wavenumber = TAU / wavelength;
        let mut rings = Vec::with_capacity(modes.len());
        for &mode in modes {
            if mode == 0 {
                rings.push(UcaRing::center_element());
            } else {
                let radius = design_ring_radius(mode, divergence, wavenumber)?;
                let count = default_element_count(mode);
                rings.push(UcaRing::new(mode, radius, count, 0.0)?);
            }
        }
        Ok(ConcentricArray {
            rings,
            carrier_frequency,
            wavelength,
            wavenumber,
            target_divergence: divergence,
        })
    }

    pub fn ring_for_mode(&self, mode: i32) -> Option<&UcaRing> {
        self.rings.iter().find(|r| r.mode == mode)
    }
}

/// Default element count per ring: 4|l| (4 for |l|=1, 8 for |l|=2, the
/// reference bench layout), always ≥ 2|l| + 1.
pub fn default_element_count(mode: i32) -> usize {
    if mode == 0 {
        1
    } else {
        4 * mode.unsigned_abs() as usize
    }
}

/// R_l = χ_l / (k sin θ): the ring radius that puts mode l's main lobe at θ.
pub fn design_ring_radius(
    mode: i32,
    divergence: f64,
    wavenumber: f64,
) -> Result<f64, ArrayError> {
    if mode == 0 {
        return Err(ArrayError::DegenerateRing);
    }
    if !(divergence > 0.0 && divergence < FRAC_PI_2) {
        return Err(ArrayError::DivergenceOutOfRange(divergence));
    }
    if !(wavenumber > 0.0) {
        return Err(ArrayError::InvalidParameter(format!(
            "wavenumber must be positive, got {wavenumber}"
        )));
    }
    let chi = specfun::bessel_first_max(mode.unsigned_abs())?.abscissa;
    Ok(chi / (wavenumber * divergence.sin()))
}

/// Per-element phases α_{l,n} = l(2πn/N + φ_l) wrapped to [0, 2π).
pub fn excitation_phases(
    mode: i32,
    element_count: usize,
    phase_offset: f64,
) -> Result<Vec<f64>, ArrayError> {
    if element_count < 2 * mode.unsigned_abs() as usize + 1 {
        return Err(ArrayError::Undersampled {
            mode,
            count: element_count,
        });
    }
    Ok((0..element_count)
        .map(|n| {
            let az = TAU * n as f64 / element_count as f64;
            (mode as f64 * (az + phase_offset)).rem_euclid(TAU)
        })
        .collect())
}

/// Column `column` (1-based) of the unitary N-point DFT matrix:
/// entry m = exp(-j 2π (column-1)(m-1)/N) / √N.
pub fn dft_weights(element_count: usize, column: usize) -> Result<Vec<Complex64>, ArrayError> {
    if column == 0 || column > element_count {
        return Err(ArrayError::ColumnOutOfRange {
            column,
            count: element_count,
        });
    }
    let scale = 1.0 / (element_count as f64).sqrt();
    Ok((0..element_count)
        .map(|m| {
            let phase = -TAU * (column - 1) as f64 * m as f64 / element_count as f64;
            Complex64::from_polar(scale, phase)
        })
        .collect())
}

/// DFT beamforming plan: which unitary DFT column carries which OAM mode,
/// plus the per-mode power allocation diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingPlan {
    pub element_count: usize,
    /// Modes in symbol-vector order.
    pub modes: Vec<i32>,
    /// 1-based DFT column per mode.
    pub columns: Vec<usize>,
    /// Diagonal of the power allocation matrix P (all > 0).
    pub power_allocation: Vec<f64>,
}

impl BeamformingPlan {
    /// Uniform-power plan. The column for mode l is the one whose phase
    /// progression equals +l·2πm/N, i.e. column 1 + ((-l) mod N).
    pub fn new(element_count: usize, modes: &[i32]) -> Result<Self, ArrayError> {
        let mut columns = Vec::with_capacity(modes.len());
        for &mode in modes {
            if element_count < 2 * mode.unsigned_abs() as usize + 1 {
                return Err(ArrayError::Undersampled {
                    mode,
                    count: element_count,
                });
            }
            let n = element_count as i64;
            let col = 1 + (-(mode as i64)).rem_euclid(n) as usize;
            columns.push(col);
        }
        Ok(BeamformingPlan {
            element_count,
            modes: modes.to_vec(),
            columns,
            power_allocation: vec![1.0; modes.len()],
        })
    }

    pub fn with_power_allocation(mut self, allocation: &[f64]) -> Result<Self, ArrayError> {
        if allocation.len() != self.modes.len() {
            return Err(ArrayError::ShapeMismatch {
                got: allocation.len(),
                expected: self.modes.len(),
            });
        }
        if allocation.iter().any(|&p| !(p > 0.0)) {
            return Err(ArrayError::InvalidParameter(
                "power allocation entries must be positive".into(),
            ));
        }
        self.power_allocation = allocation.to_vec();
        Ok(self)
    }
}

/// s = W_N P x: per-element excitations for the given per-mode symbols.
pub fn beamform(plan: &BeamformingPlan, symbols: &[Complex64]) -> Result<Vec<Complex64>, ArrayError> {
    if symbols.len() != plan.modes.len() {
        return Err(ArrayError::ShapeMismatch {
            got: symbols.len(),
            expected: plan.modes.len(),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); plan.element_count];
    for ((&column, &p), &x) in plan
        .columns
        .iter()
        .zip(&plan.power_allocation)
        .zip(symbols)
    {
        let w = dft_weights(plan.element_count, column)?;
        for (s, wm) in out.iter_mut().zip(w) {
            *s += wm * p * x;
        }
    }
    Ok(out)
}

/// Discrete far-field sum of one ring:
/// (e^{-jkd}/d) Σ_n A_{l,n} e^{jkR_l sinθ cos(φ_{l,n} - φ)}.
///
/// Valid in the far field (distance ≫ wavelength); the 1/d spherical factor
/// is included.
pub fn array_factor(
    array: &ConcentricArray,
    ring: &UcaRing,
    distance: f64,
    theta: f64,
    phi: f64,
) -> Complex64 {
    let k = array.wavenumber;
    let radial = Complex64::from_polar(1.0 / distance, -k * distance);
    let projection = k * ring.radius * theta.sin();
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, az) in ring.element_azimuths().iter().enumerate() {
        let a = Complex64::from_polar(
            ring.excitation_amplitudes[n],
            ring.excitation_phases[n],
        );
        sum += a * Complex64::from_polar(1.0, projection * (az - phi).cos());
    }
    radial * sum
}

/// `array_factor` with a cos^q(θ) element factor for directive radiators.
/// q = 0 recovers the isotropic default.
pub fn array_factor_with_element(
    array: &ConcentricArray,
    ring: &UcaRing,
    distance: f64,
    theta: f64,
    phi: f64,
    element_exponent: f64,
) -> Complex64 {
    let element = theta.cos().max(0.0).powf(element_exponent);
    array_factor(array, ring, distance, theta, phi) * element
}

/// Continuous (N → ∞) limit of the ring pattern:
/// N j^l d^{-1} e^{-jkd} J_l(kR sinθ) e^{jlφ}.
pub fn bessel_pattern(
    mode: i32,
    radius: f64,
    wavenumber: f64,
    element_count: usize,
    distance: f64,
    theta: f64,
    phi: f64,
) -> Result<Complex64, ArrayError> {
    let bessel = specfun::bessel_j(mode, wavenumber * radius * theta.sin())?;
    let prefactor = Complex64::from_polar(
        element_count as f64 / distance,
        mode as f64 * FRAC_PI_2 - wavenumber * distance,
    );
    Ok(prefactor * bessel * Complex64::from_polar(1.0, mode as f64 * phi))
}

/// θ* = arcsin(χ_l / (kR)): the main-lobe elevation of a ring of radius R.
/// Inverse of `design_ring_radius`.
pub fn divergence_angle(mode: i32, radius: f64, wavenumber: f64) -> Result<f64, ArrayError> {
    if mode == 0 {
        return Err(ArrayError::DegenerateRing);
    }
    let chi = specfun::bessel_first_max(mode.unsigned_abs())?.abscissa;
    let kr = wavenumber * radius;
    if chi > kr {
        return Err(ArrayError::NoRealPeak { chi, kr });
    }
    Ok((chi / kr).asin())
}

/// Ring geometry and excitation table as CSV
/// (mode, element_index, x_m, y_m, amplitude, phase_rad).
pub fn geometry_csv(array: &ConcentricArray) -> String {
    let mut out = String::from("mode,element_index,x_m,y_m,amplitude,phase_rad\n");
    for ring in &array.rings {
        for (n, (x, y)) in ring.element_positions().into_iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                ring.mode, n, x, y, ring.excitation_amplitudes[n], ring.excitation_phases[n]
            ));
        }
    }
    out
}
