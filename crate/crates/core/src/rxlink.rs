//! Receiver and communication layer: point-probe sampling, 180° hybrid
//! combining, Tx-mode → Rx-port coupling matrices, power allocation, Gray
//! 16-QAM, SINR and seeded Monte-Carlo BER.

use crate::field::{FieldError, FieldGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkError {
    #[error("degenerate link: zero diagonal coupling for mode {0}")]
    DegenerateLink(i32),
    #[error("no receive port maps to mode {0}")]
    PortMapping(i32),
    #[error("power must be positive, got {0} W")]
    NonPositivePower(f64),
    #[error("invalid link parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The three receive ports of the bench receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RxPort {
    /// Single probe on the beam axis (mode 0).
    Center = 0,
    /// Hybrid sum port (a+b)/√2 (even modes).
    Sum = 1,
    /// Hybrid difference port (a-b)/√2 (odd modes).
    Diff = 2,
}

pub const RX_PORTS: [RxPort; 3] = [RxPort::Center, RxPort::Sum, RxPort::Diff];

impl RxPort {
    pub fn name(self) -> &'static str {
        match self {
            RxPort::Center => "center",
            RxPort::Sum => "sum",
            RxPort::Diff => "diff",
        }
    }
}

/// Intended port for a transmit mode: center ↔ 0, Δ ↔ odd, Σ ↔ even.
pub fn port_for_mode(mode: i32) -> RxPort {
    if mode == 0 {
        RxPort::Center
    } else if mode % 2 != 0 {
        RxPort::Diff
    } else {
        RxPort::Sum
    }
}

/// Receiving-probe geometry: two horns feeding the hybrid plus one center
/// probe, all in the focal plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub horn_a: (f64, f64, f64),
    pub horn_b: (f64, f64, f64),
    pub center_probe: (f64, f64, f64),
    pub spacing: f64,
}

impl ProbeConfig {
    /// Horns on the x-axis at ±spacing/2, center probe on the axis, all at
    /// plane z.
    pub fn symmetric(spacing: f64, z: f64) -> Self {
        ProbeConfig {
            horn_a: (spacing / 2.0, 0.0, z),
            horn_b: (-spacing / 2.0, 0.0, z),
            center_probe: (0.0, 0.0, z),
            spacing,
        }
    }

    /// Moves the horns onto the strongest ring of `field` (argmax of the
    /// azimuthally-averaged amplitude), keeping them diametrically opposed.
    pub fn auto_place(field: &FieldGrid, z: f64) -> Result<Self, LinkError> {
        let half = 0.45 * field.nx().min(field.ny()) as f64 * field.pitch();
        let mut best = (field.pitch(), 0.0);
        let mut radius = field.pitch();
        while radius < half {
            let mut acc = 0.0;
            let samples = 64;
            for i in 0..samples {
                let a = std::f64::consts::TAU * i as f64 / samples as f64;
                acc += field
                    .sample_bilinear(radius * a.cos(), radius * a.sin())?
                    .norm();
            }
            if acc > best.1 {
                best = (radius, acc);
            }
            radius += field.pitch();
        }
        Ok(ProbeConfig::symmetric(2.0 * best.0, z))
    }
}

/// Complex Tx-mode → Rx-port coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    /// Transmit modes in column order.
    pub tx_modes: Vec<i32>,
    /// entries[port][mode_index], port order = [center, sum, diff].
    entries: Vec<Vec<Complex64>>,
}

impl CouplingMatrix {
    pub fn from_entries(tx_modes: Vec<i32>, entries: Vec<Vec<Complex64>>) -> Self {
        assert_eq!(entries.len(), 3);
        for row in &entries {
            assert_eq!(row.len(), tx_modes.len());
        }
        CouplingMatrix { tx_modes, entries }
    }

    /// Identity-like coupling: each mode couples only into its own port.
    pub fn diagonal(tx_modes: &[i32]) -> Self {
        let mut entries = vec![vec![Complex64::new(0.0, 0.0); tx_modes.len()]; 3];
        for (i, &m) in tx_modes.iter().enumerate() {
            entries[port_for_mode(m) as usize][i] = Complex64::new(1.0, 0.0);
        }
        CouplingMatrix {
            tx_modes: tx_modes.to_vec(),
            entries,
        }
    }

    pub fn entry(&self, port: RxPort, mode_index: usize) -> Complex64 {
        self.entries[port as usize][mode_index]
    }

    pub fn mode_index(&self, mode: i32) -> Option<usize> {
        self.tx_modes.iter().position(|&m| m == mode)
    }

    /// Column index whose mode belongs to `port`.
    pub fn own_mode_index(&self, port: RxPort) -> Result<usize, LinkError> {
        self.tx_modes
            .iter()
            .position(|&m| port_for_mode(m) == port)
            .ok_or(LinkError::PortMapping(port as i32))
    }

    /// |H[port][own]| for each tx mode's own port.
    pub fn diagonal_magnitudes(&self) -> Vec<f64> {
        self.tx_modes
            .iter()
            .enumerate()
            .map(|(i, &m)| self.entry(port_for_mode(m), i).norm())
            .collect()
    }
}

/// Bilinear point-probe sample of a focal-plane field.
pub fn sample_field(field: &FieldGrid, position: (f64, f64)) -> Result<Complex64, LinkError> {
    Ok(field.sample_bilinear(position.0, position.1)?)
}

/// Disc-averaged probe: coherent mean of the field over a disc of
/// `radius` around `position`, approximating a finite horn aperture.
/// radius = 0 degenerates to the ideal point probe (the default model).
pub fn sample_field_disc(
    field: &FieldGrid,
    position: (f64, f64),
    radius: f64,
) -> Result<Complex64, LinkError> {
    if radius <= 0.0 {
        return sample_field(field, position);
    }
    let step = (field.pitch() / 2.0).min(radius / 4.0);
    let n = (radius / step).ceil() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut count = 0u64;
    for iy in -n..=n {
        for ix in -n..=n {
            let dx = ix as f64 * step;
            let dy = iy as f64 * step;
            if dx * dx + dy * dy <= radius * radius {
                acc += field.sample_bilinear(position.0 + dx, position.1 + dy)?;
                count += 1;
            }
        }
    }
    Ok(acc / count as f64)
}

/// 180° hybrid coupler: Σ = (a+b)/√2, Δ = (a-b)/√2. Power conserving.
pub fn hybrid_combine(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2)
}

/// Builds the coupling matrix by probing one focal field per transmitted
/// mode (equal transmit power assumed) and hybrid-combining the horns.
pub fn coupling_matrix(
    fields: &[(i32, &FieldGrid)],
    probes: &ProbeConfig,
) -> Result<CouplingMatrix, LinkError> {
    let mut entries: Vec<Vec<Complex64>> =
        (0..3).map(|_| Vec::with_capacity(fields.len())).collect();
    let mut tx_modes = Vec::with_capacity(fields.len());
    for &(mode, field) in fields {
        let a = sample_field(field, (probes.horn_a.0, probes.horn_a.1))?;
        let b = sample_field(field, (probes.horn_b.0, probes.horn_b.1))?;
        let center = sample_field(field, (probes.center_probe.0, probes.center_probe.1))?;
        let (sum, diff) = hybrid_combine(a, b);
        entries[RxPort::Center as usize].push(center);
        entries[RxPort::Sum as usize].push(sum);
        entries[RxPort::Diff as usize].push(diff);
        tx_modes.push(mode);
    }
    Ok(CouplingMatrix { tx_modes, entries })
}

/// isolation[p][m] = 20 log10(|H[p][p-mode]| / |H[p][m]|) for m ≠ p-mode;
/// diagonal entries are 0. Unbounded isolation (zero off-diagonal) is +∞.
pub fn isolation_db(h: &CouplingMatrix) -> Result<Vec<Vec<f64>>, LinkError> {
    let mut out = vec![vec![0.0; h.tx_modes.len()]; 3];
    for &port in &RX_PORTS {
        let own = h.own_mode_index(port)?;
        let own_mag = h.entry(port, own).norm();
        if own_mag == 0.0 {
            return Err(LinkError::DegenerateLink(h.tx_modes[own]));
        }
        for (m, iso) in out[port as usize].iter_mut().enumerate() {
            if m != own {
                *iso = 20.0 * (own_mag / h.entry(port, m).norm()).log10();
            }
        }
    }
    Ok(out)
}

/// 10 log10(power_with / power_without), dB.
pub fn lens_gain_db(power_with: f64, power_without: f64) -> Result<f64, LinkError> {
    if !(power_with > 0.0) {
        return Err(LinkError::NonPositivePower(power_with));
    }
    if !(power_without > 0.0) {
        return Err(LinkError::NonPositivePower(power_without));
    }
    Ok(10.0 * (power_with / power_without).log10())
}

/// Per-mode power weights p_m ∝ 1/|H[port(m)][m]|, normalized to max 1.
/// Equalizes the received per-mode powers under the linear model.
pub fn power_allocation(h: &CouplingMatrix) -> Result<Vec<f64>, LinkError> {
    let diags = h.diagonal_magnitudes();
    for (i, &d) in diags.iter().enumerate() {
        if d == 0.0 {
            return Err(LinkError::DegenerateLink(h.tx_modes[i]));
        }
    }
    let weakest = diags.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(diags.iter().map(|&d| weakest / d).collect())
}

/// RF chain constants for the noise floor.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    /// Receiver noise figure δ_NF, dB.
    pub noise_figure_db: f64,
    /// Baseband bandwidth B, Hz.
    pub bandwidth_hz: f64,
    /// Amplifier gain, dB.
    pub amplifier_gain_db: f64,
    /// Carrier frequency, Hz.
    pub carrier_hz: f64,
    /// Intermediate frequency, Hz.
    pub if_frequency_hz: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        LinkBudget {
            noise_figure_db: 6.5,
            bandwidth_hz: 1.0e6,
            amplifier_gain_db: 26.1,
            carrier_hz: 16.1e9,
            if_frequency_hz: 430.0e6,
        }
    }
}

/// Thermal noise floor: -174 dBm + δ_NF + 10 log10(B).
pub fn noise_power_dbm(budget: &LinkBudget) -> f64 {
    -174.0 + budget.noise_figure_db + 10.0 * budget.bandwidth_hz.log10()
}

/// Linear signal-to-interference-plus-noise ratio S/(N+I).
pub fn sinr(signal_w: f64, noise_w: f64, interference_w: f64) -> f64 {
    signal_w / (noise_w + interference_w)
}

const QAM_SCALE: f64 = 0.316_227_766_016_837_94; // 1/sqrt(10): unit mean energy

/// Gray-coded 4-PAM level for a 2-bit group: 00→-3, 01→-1, 11→+1, 10→+3.
fn gray_level(bits: u8) -> f64 {
    match bits & 0b11 {
        0b00 => -3.0,
        0b01 => -1.0,
        0b11 => 1.0,
        _ => 3.0,
    }
}

fn gray_slice(value: f64) -> u8 {
    if value < -2.0 * QAM_SCALE {
        0b00
    } else if value < 0.0 {
        0b01
    } else if value < 2.0 * QAM_SCALE {
        0b11
    } else {
        0b10
    }
}

/// Maps a 4-bit group to the Gray-coded 16-QAM constellation with unit
/// average symbol energy. High bit pair → I, low pair → Q.
pub fn qam16_map(bits: u8) -> Complex64 {
    Complex64::new(
        gray_level(bits >> 2) * QAM_SCALE,
        gray_level(bits) * QAM_SCALE,
    )
}

/// Minimum-Euclidean-distance demapping to the 4-bit group.
pub fn qam16_demap(symbol: Complex64) -> u8 {
    (gray_slice(symbol.re) << 2) | gray_slice(symbol.im)
}

/// One BER curve point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub ber: f64,
    pub bits: u64,
    /// 95% binomial confidence half-width.
    pub ci_halfwidth: f64,
}

/// Per-mode Monte-Carlo BER curves.
#[derive(Debug, Clone, PartialEq)]
pub struct BerReport {
    pub modes: Vec<i32>,
    /// points[mode_index][snr_index]
    pub points: Vec<Vec<BerPoint>>,
}

/// Monte-Carlo controls. Bits per point per mode =
/// frames · symbols_per_frame · 4.
#[derive(Debug, Clone, PartialEq)]
pub struct BerParams {
    pub snr_grid_db: Vec<f64>,
    pub frames: usize,
    pub symbols_per_frame: usize,
    pub seed: u64,
}

impl Default for BerParams {
    fn default() -> Self {
        BerParams {
            snr_grid_db: (0..=12).map(|i| 2.0 * i as f64).collect(),
            frames: 100,
            symbols_per_frame: 2500,
            seed: 1,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Counter-based per-frame seed: identical regardless of evaluation order.
fn frame_seed(seed: u64, snr_index: usize, frame: usize) -> u64 {
    let mut state = seed
        ^ (snr_index as u64).wrapping_mul(0xa076_1d64_78bd_642f)
        ^ (frame as u64).wrapping_mul(0xe703_7ed1_a0b4_28db);
    splitmix64(&mut state)
}

/// Simulates the multiplexed 16-QAM link: all modes transmit concurrently,
/// each port hears y_p = c·Σ_m H[p][m]·p_m·x_m + n with independent complex
/// Gaussian noise per port. `snr_db` is the received symbol SNR (Es/N0) of
/// each mode at its own port (power allocation equalizes them).
///
/// Deterministic for a fixed seed; frames use counter-based sub-seeds so
/// evaluation order cannot change results.
pub fn simulate_ber(
    h: &CouplingMatrix,
    allocation: &[f64],
    budget: &LinkBudget,
    params: &BerParams,
) -> Result<BerReport, LinkError> {
    let n_modes = h.tx_modes.len();
    if allocation.len() != n_modes {
        return Err(LinkError::InvalidParameter(format!(
            "allocation length {} vs {} modes",
            allocation.len(),
            n_modes
        )));
    }
    if params.frames * params.symbols_per_frame * 4 < 100_000 {
        return Err(LinkError::InvalidParameter(
            "need at least 1e5 bits per SNR point".into(),
        ));
    }
    // per-mode own-port complex gains under the allocation
    let ports: Vec<RxPort> = h.tx_modes.iter().map(|&m| port_for_mode(m)).collect();
    let gains: Vec<Complex64> = (0..n_modes)
        .map(|i| h.entry(ports[i], i) * allocation[i])
        .collect();
    for (i, g) in gains.iter().enumerate() {
        if g.norm() == 0.0 {
            return Err(LinkError::DegenerateLink(h.tx_modes[i]));
        }
    }
    let reference_gain = gains[0].norm();
    let noise_w = 10f64.powf((noise_power_dbm(budget) - 30.0) / 10.0);
    let noise_sigma = (noise_w / 2.0).sqrt();

    let mut points: Vec<Vec<BerPoint>> = (0..n_modes)
        .map(|_| Vec::with_capacity(params.snr_grid_db.len()))
        .collect();
    for (snr_index, &snr_db) in params.snr_grid_db.iter().enumerate() {
        let signal_amplitude = (noise_w * 10f64.powf(snr_db / 10.0)).sqrt();
        let scale = signal_amplitude / reference_gain;
        let mut errors = vec![0u64; n_modes];
        let mut symbols = vec![Complex64::new(0.0, 0.0); n_modes];
        let mut nibbles = vec![0u8; n_modes];
        for frame in 0..params.frames {
            let mut rng = ChaCha8Rng::seed_from_u64(frame_seed(params.seed, snr_index, frame));
            for _ in 0..params.symbols_per_frame {
                for m in 0..n_modes {
                    let nib: u8 = rng.gen_range(0..16);
                    nibbles[m] = nib;
                    symbols[m] = qam16_map(nib);
                }
                for m in 0..n_modes {
                    let port = ports[m];
                    let mut received = Complex64::new(0.0, 0.0);
                    for (j, &x) in symbols.iter().enumerate() {
                        received += h.entry(port, j) * allocation[j] * x;
                    }
                    received *= scale;
                    let n_re: f64 = rng.sample(StandardNormal);
                    let n_im: f64 = rng.sample(StandardNormal);
                    received += Complex64::new(n_re * noise_sigma, n_im * noise_sigma);
                    // coherent per-port scalar equalization by the known gain
                    let estimate = received / (gains[m] * scale);
                    let got = qam16_demap(estimate);
                    errors[m] += (got ^ nibbles[m]).count_ones() as u64;
                }
            }
        }
        let bits = (params.frames * params.symbols_per_frame * 4) as u64;
        for m in 0..n_modes {
            let ber = errors[m] as f64 / bits as f64;
            points[m].push(BerPoint {
                snr_db,
                ber,
                bits,
                ci_halfwidth: 1.96 * (ber * (1.0 - ber) / bits as f64).sqrt(),
            });
        }
    }
    Ok(BerReport {
        modes: h.tx_modes.clone(),
        points,
    })
}
