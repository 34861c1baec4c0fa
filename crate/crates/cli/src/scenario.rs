//! Scenario configuration: TOML-style sectioned key-value file with
//! reference-bench defaults, validation, and a stable content hash.

use oamlink::array::SPEED_OF_LIGHT;
use oamlink::lens::{self, AiryLensSpec};
use oamlink::rxlink::LinkBudget;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::TAU;

use crate::StageError;

fn err(key: &str, reason: impl std::fmt::Display) -> StageError {
    StageError::Validation(format!("{key}: {reason}"))
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioFile {
    pub carrier: CarrierSection,
    pub array: ArraySection,
    pub lens: LensSection,
    pub grid: GridSection,
    pub probes: ProbesSection,
    pub link: LinkSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CarrierSection {
    pub frequency_hz: f64,
}

impl Default for CarrierSection {
    fn default() -> Self {
        CarrierSection {
            frequency_hz: 16.1e9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArraySection {
    pub modes: Vec<i32>,
    pub divergence_deg: f64,
    pub phase_offset_rad: f64,
}

impl Default for ArraySection {
    fn default() -> Self {
        ArraySection {
            modes: vec![0, 1, 2],
            divergence_deg: 6.5,
            phase_offset_rad: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LensSection {
    pub r0_m: f64,
    pub beta_per_m: f64,
    pub alpha: f64,
    pub d0_m: f64,
    pub aperture_m: f64,
    pub phi0_rad: f64,
    pub epsilon_r: f64,
    pub mu_r: f64,
    /// Absorb the field outside the aperture disc (the bare bench setup
    /// has no stop, so this defaults off).
    pub absorbing_stop: bool,
}

impl Default for LensSection {
    fn default() -> Self {
        LensSection {
            r0_m: 0.04,
            beta_per_m: 29.0,
            alpha: 0.1,
            d0_m: 0.9,
            aperture_m: 0.6,
            phi0_rad: 0.0,
            epsilon_r: 2.9,
            mu_r: 1.0,
            absorbing_stop: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub samples: usize,
    pub pitch_m: f64,
    /// Optional consistency check; must equal samples * pitch_m when given.
    pub window_m: Option<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            samples: 1024,
            pitch_m: 0.004,
            window_m: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbesSection {
    pub spacing_m: f64,
    /// Focal-plane coordinate; defaults to d0 + f_d.
    pub z_m: Option<f64>,
    pub capture_radius_m: f64,
}

impl Default for ProbesSection {
    fn default() -> Self {
        ProbesSection {
            spacing_m: 0.26,
            z_m: None,
            capture_radius_m: 0.15,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSection {
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub amplifier_gain_db: f64,
    pub if_hz: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        LinkSection {
            bandwidth_hz: 1.0e6,
            noise_figure_db: 6.5,
            amplifier_gain_db: 26.1,
            if_hz: 430.0e6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
    /// "start:stop:step" in dB.
    pub snr_grid: String,
    pub frames: usize,
    pub symbols_per_frame: usize,
    /// Scan range, m beyond the lens.
    pub scan_start_m: f64,
    pub scan_end_m: f64,
    pub scan_steps: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seed: 1,
            snr_grid: "0:24:2".into(),
            frames: 100,
            symbols_per_frame: 2500,
            scan_start_m: 0.2,
            scan_end_m: 2.2,
            scan_steps: 81,
        }
    }
}

/// A validated scenario. Serializing it reproduces a parseable config file
/// with every optional resolved, so hash(validate(serialize(s))) == hash(s).
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub carrier: CarrierSection,
    pub array: ArraySection,
    pub lens: LensSection,
    pub grid: GridSection,
    pub probes: ProbesSection,
    pub link: LinkSection,
    pub run: RunSection,
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Self, StageError> {
        let mut s = Scenario {
            carrier: file.carrier,
            array: file.array,
            lens: file.lens,
            grid: file.grid,
            probes: file.probes,
            link: file.link,
            run: file.run,
        };
        s.validate_and_resolve()?;
        Ok(s)
    }

    pub fn defaults() -> Self {
        Scenario::from_file(ScenarioFile::default()).expect("defaults are valid")
    }

    pub fn parse_toml(text: &str) -> Result<Self, StageError> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| StageError::Validation(format!("config: {e}")))?;
        Scenario::from_file(file)
    }

    fn validate_and_resolve(&mut self) -> Result<(), StageError> {
        if !(self.carrier.frequency_hz > 0.0) {
            return Err(err("[carrier] frequency_hz", "must be positive"));
        }
        if self.array.modes.is_empty() {
            return Err(err("[array] modes", "must list at least one mode"));
        }
        for (i, &m) in self.array.modes.iter().enumerate() {
            if self.array.modes[..i].contains(&m) {
                return Err(err("[array] modes", format!("mode {m} listed twice")));
            }
            if m.abs() > 64 {
                return Err(err("[array] modes", format!("|{m}| exceeds 64")));
            }
        }
        if !(self.array.divergence_deg > 0.0 && self.array.divergence_deg < 90.0) {
            return Err(err("[array] divergence_deg", "must lie in (0, 90)"));
        }
        self.airy_spec()
            .validate()
            .map_err(|e| err("[lens]", e))?;
        if !self.grid.samples.is_power_of_two() {
            return Err(err("[grid] samples", "must be a power of two"));
        }
        if !(self.grid.pitch_m > 0.0) {
            return Err(err("[grid] pitch_m", "must be positive"));
        }
        let lambda = self.wavelength();
        if self.grid.pitch_m > lambda / 4.0 {
            return Err(err(
                "[grid] pitch_m",
                format!(
                    "{} m undersamples the profile: need pitch <= lambda/4 = {} m",
                    self.grid.pitch_m,
                    lambda / 4.0
                ),
            ));
        }
        let window = self.grid.samples as f64 * self.grid.pitch_m;
        match self.grid.window_m {
            Some(w) if (w - window).abs() > 1e-9 => {
                return Err(err(
                    "[grid] window_m",
                    format!("{w} inconsistent with samples*pitch = {window}"),
                ));
            }
            _ => self.grid.window_m = Some(window),
        }
        if !(self.probes.spacing_m > 0.0 && self.probes.spacing_m < window) {
            return Err(err("[probes] spacing_m", "must fit inside the window"));
        }
        if !(self.probes.capture_radius_m > 0.0 && self.probes.capture_radius_m <= window / 2.0)
        {
            return Err(err(
                "[probes] capture_radius_m",
                "must fit inside the window half-size",
            ));
        }
        let focal = self.lens.d0_m + self.predicted_focal_length();
        if self.probes.z_m.is_none() {
            self.probes.z_m = Some(focal);
        }
        if !(self.probes.z_m.unwrap() > self.lens.d0_m) {
            return Err(err("[probes] z_m", "must lie beyond the lens plane"));
        }
        if !(self.link.bandwidth_hz > 0.0) {
            return Err(err("[link] bandwidth_hz", "must be positive"));
        }
        if !(self.run.scan_start_m < self.run.scan_end_m) || self.run.scan_steps < 2 {
            return Err(err("[run] scan_*", "need scan_start_m < scan_end_m and >= 2 steps"));
        }
        if self.run.frames * self.run.symbols_per_frame * 4 < 100_000 {
            return Err(err(
                "[run] frames",
                "frames * symbols_per_frame must give at least 1e5 bits per SNR point",
            ));
        }
        self.snr_grid()?;
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier.frequency_hz
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength()
    }

    pub fn airy_spec(&self) -> AiryLensSpec {
        AiryLensSpec {
            r0: self.lens.r0_m,
            beta: self.lens.beta_per_m,
            alpha: self.lens.alpha,
            d0: self.lens.d0_m,
            aperture_diameter: self.lens.aperture_m,
            phi0: self.lens.phi0_rad,
            epsilon_r: self.lens.epsilon_r,
            mu_r: self.lens.mu_r,
        }
    }

    pub fn budget(&self) -> LinkBudget {
        LinkBudget {
            noise_figure_db: self.link.noise_figure_db,
            bandwidth_hz: self.link.bandwidth_hz,
            amplifier_gain_db: self.link.amplifier_gain_db,
            carrier_hz: self.carrier.frequency_hz,
            if_frequency_hz: self.link.if_hz,
        }
    }

    pub fn predicted_focal_length(&self) -> f64 {
        lens::predict_focal_length(&self.airy_spec(), self.wavenumber())
    }

    /// Absolute focal-plane coordinate (probes' plane).
    pub fn focal_plane_z(&self) -> f64 {
        self.probes
            .z_m
            .unwrap_or(self.lens.d0_m + self.predicted_focal_length())
    }

    /// Capture disc matched to mode l's focal structure, capped by the
    /// configured capture radius: r_l = capture * min(1/2 + |l|/3, 1).
    pub fn mode_capture_radius(&self, mode: i32) -> f64 {
        self.probes.capture_radius_m * (0.5 + mode.abs() as f64 / 3.0).min(1.0)
    }

    /// Parses "start:stop:step" into the dB grid.
    pub fn snr_grid(&self) -> Result<Vec<f64>, StageError> {
        parse_snr_grid(&self.run.snr_grid)
    }

    /// SHA-256 of the canonical serialized form.
    pub fn hash(&self) -> String {
        let text = toml::to_string(self).expect("scenario serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }
}

pub fn parse_snr_grid(text: &str) -> Result<Vec<f64>, StageError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(err("[run] snr_grid", "expected start:stop:step"));
    }
    let parse = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|_| err("[run] snr_grid", format!("unparseable number {p}")))
    };
    let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !(step > 0.0 && stop >= start) {
        return Err(err("[run] snr_grid", "need stop >= start and step > 0"));
    }
    let count = ((stop - start) / step).round() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_stable() {
        let s = Scenario::defaults();
        assert_eq!(s.grid.samples, 1024);
        assert!((s.predicted_focal_length() - 1.179).abs() < 2e-3);
        assert!((s.focal_plane_z() - (0.9 + s.predicted_focal_length())).abs() < 1e-12);
        assert_eq!(s.hash(), Scenario::defaults().hash());
    }

    #[test]
    fn round_trip_preserves_hash() {
        let s = Scenario::defaults();
        let text = s.to_toml();
        let reparsed = Scenario::parse_toml(&text).unwrap();
        assert_eq!(s.hash(), reparsed.hash());
    }

    #[test]
    fn pitch_validation_names_key() {
        let e = Scenario::parse_toml("[grid]\npitch_m = 0.01\n").unwrap_err();
        match e {
            StageError::Validation(msg) => {
                assert!(msg.contains("pitch_m"), "{msg}");
                assert!(msg.contains("undersample"), "{msg}");
            }
            other => panic!("wrong error kind {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_keys_and_duplicates() {
        assert!(Scenario::parse_toml("[grid]\nbogus = 1\n").is_err());
        assert!(Scenario::parse_toml("[array]\nmodes = [1, 1]\n").is_err());
    }

    #[test]
    fn window_consistency() {
        assert!(Scenario::parse_toml("[grid]\nsamples = 256\npitch_m = 0.004\nwindow_m = 1.024\n").is_ok());
        assert!(Scenario::parse_toml("[grid]\nsamples = 256\npitch_m = 0.004\nwindow_m = 1.0\n").is_err());
    }

    #[test]
    fn snr_grid_parsing() {
        assert_eq!(parse_snr_grid("0:8:2").unwrap(), vec![0.0, 2.0, 4.0, 6.0, 8.0]);
        assert_eq!(parse_snr_grid("5:5:1").unwrap(), vec![5.0]);
        assert!(parse_snr_grid("5:1:1").is_err());
        assert!(parse_snr_grid("1:2").is_err());
    }

    #[test]
    fn mode_capture_radii() {
        let s = Scenario::defaults();
        assert!((s.mode_capture_radius(0) - 0.075).abs() < 1e-12);
        assert!((s.mode_capture_radius(1) - 0.125).abs() < 1e-12);
        assert!((s.mode_capture_radius(2) - 0.15).abs() < 1e-12);
        assert!((s.mode_capture_radius(-5) - 0.15).abs() < 1e-12);
    }
}
