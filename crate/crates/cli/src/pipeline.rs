//! Run pipelines: design → propagate → isolation → BER, with artifact
//! emission and in-process caching so `all` computes each field once.

use std::collections::BTreeMap;
use std::path::Path;

use oamlink::array::{self, ConcentricArray};
use oamlink::dump;
use oamlink::field::{self, FieldGrid, LongitudinalScan};
use oamlink::lens::{self, PhaseProfile};
use oamlink::rxlink::{self, CouplingMatrix, ProbeConfig, RX_PORTS};
use oamlink::Complex64;

use crate::artifacts::{fmt, ArtifactSink};
use crate::scenario::Scenario;
use crate::StageError;

/// The FEC reference level quoted alongside every BER row.
pub const FEC_LIMIT: f64 = 3.8e-3;

pub struct Pipeline {
    scenario: Scenario,
    sink: ArtifactSink,
    array: Option<ConcentricArray>,
    profile: Option<PhaseProfile>,
    /// Focal-plane fields keyed by (mode, with_lens).
    focal: BTreeMap<(i32, bool), FieldGrid>,
    coupling: Option<(CouplingMatrix, CouplingMatrix)>,
}

impl Pipeline {
    pub fn new(scenario: Scenario, out_dir: &Path) -> Result<Self, StageError> {
        Ok(Pipeline {
            scenario,
            sink: ArtifactSink::new(out_dir)?,
            array: None,
            profile: None,
            focal: BTreeMap::new(),
            coupling: None,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    fn array(&mut self) -> Result<&ConcentricArray, StageError> {
        if self.array.is_none() {
            let s = &self.scenario;
            let designed = ConcentricArray::design(
                s.carrier.frequency_hz,
                &s.array.modes,
                s.array.divergence_deg.to_radians(),
            )
            .map_err(|e| StageError::Validation(format!("[array]: {e}")))?;
            self.array = Some(designed);
        }
        Ok(self.array.as_ref().unwrap())
    }

    fn profile(&mut self) -> Result<&PhaseProfile, StageError> {
        if self.profile.is_none() {
            let s = &self.scenario;
            let profile = lens::total_phase_profile(
                &s.airy_spec(),
                s.wavenumber(),
                s.grid.pitch_m,
                s.grid.samples,
                s.grid.samples,
            )
            .map_err(|e| StageError::Validation(format!("[lens]: {e}")))?;
            self.profile = Some(profile);
        }
        Ok(self.profile.as_ref().unwrap())
    }

    /// Field at the lens exit (or lens plane when `with_lens` is false).
    fn lens_plane_field(&mut self, mode: i32, with_lens: bool) -> Result<FieldGrid, StageError> {
        let s = self.scenario.clone();
        let array = self.array()?.clone();
        let radiated = field::radiate_to_plane(
            &array,
            &[(mode, Complex64::new(1.0, 0.0))],
            s.lens.d0_m,
            s.grid.samples,
            s.grid.samples,
            s.grid.pitch_m,
        )
        .map_err(numerical)?;
        if with_lens {
            let profile = self.profile()?;
            let screened = field::apply_phase_screen(&radiated, profile).map_err(numerical)?;
            Ok(if s.lens.absorbing_stop {
                field::apply_absorbing_stop(&screened, s.lens.aperture_m / 2.0)
            } else {
                screened
            })
        } else {
            Ok(radiated)
        }
    }

    fn focal_field(&mut self, mode: i32, with_lens: bool) -> Result<FieldGrid, StageError> {
        if let Some(cached) = self.focal.get(&(mode, with_lens)) {
            return Ok(cached.clone());
        }
        let exit = self.lens_plane_field(mode, with_lens)?;
        let focal_z = self.scenario.focal_plane_z();
        let focal = field::angular_spectrum_propagate(&exit, focal_z - exit.z())
            .map_err(numerical)?;
        self.focal.insert((mode, with_lens), focal.clone());
        Ok(focal)
    }

    /// design: ring geometry CSVs plus lens phase/thickness dumps.
    pub fn run_design(&mut self) -> Result<(), StageError> {
        let scenario = self.scenario.clone();
        let array = self.array()?.clone();
        let mut rings = String::from("mode,radius_m,element_count\n");
        for ring in &array.rings {
            rings.push_str(&format!(
                "{},{},{}\n",
                ring.mode,
                fmt(ring.radius),
                ring.element_count
            ));
        }
        self.sink.write("rings.csv", rings.as_bytes())?;
        self.sink
            .write("array_geometry.csv", array::geometry_csv(&array).as_bytes())?;

        let profile = self.profile()?.clone();
        let mut buffer = Vec::new();
        dump::write_phase_profile(&mut buffer, &profile)
            .map_err(|e| StageError::Io(e.to_string()))?;
        self.sink.write("lens_phase.bin", &buffer)?;

        let thickness = lens::thickness_map(
            &profile,
            scenario.wavelength(),
            scenario.airy_spec().refractive_index(),
            scenario.lens.phi0_rad,
        )
        .map_err(|e| StageError::Validation(format!("[lens]: {e}")))?;
        let mut buffer = Vec::new();
        dump::write_thickness_map(&mut buffer, &thickness)
            .map_err(|e| StageError::Io(e.to_string()))?;
        self.sink.write("lens_thickness.bin", &buffer)?;
        Ok(())
    }

    fn scan_for_mode(
        &mut self,
        mode: i32,
        with_lens: bool,
    ) -> Result<LongitudinalScan, StageError> {
        let s = self.scenario.clone();
        let exit = self.lens_plane_field(mode, with_lens)?;
        field::longitudinal_scan(
            &exit,
            s.lens.d0_m + s.run.scan_start_m,
            s.lens.d0_m + s.run.scan_end_m,
            s.run.scan_steps,
            s.mode_capture_radius(mode),
        )
        .map_err(numerical)
    }

    /// propagate: per-mode longitudinal scan CSV + focal field dump + meta.
    pub fn run_propagate(&mut self, with_lens: bool) -> Result<(), StageError> {
        let scenario = self.scenario.clone();
        let suffix = if with_lens { "" } else { "_nolens" };
        let mut meta = String::from(
            "mode,capture_radius_m,focus_z_m,interior_peak,vortex_charge,captured_at_focus_w\n",
        );
        for &mode in &scenario.array.modes {
            let scan = self.scan_for_mode(mode, with_lens)?;
            let mut csv = String::from("z_m,captured_power_w,on_axis_intensity\n");
            for i in 0..scan.z_values.len() {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt(scan.z_values[i]),
                    fmt(scan.captured_power[i]),
                    fmt(scan.on_axis_intensity[i])
                ));
            }
            self.sink
                .write(&format!("scan_mode{mode}{suffix}.csv"), csv.as_bytes())?;

            let focus = field::find_focus(&scan).map_err(numerical)?;
            let focal = self.focal_field(mode, with_lens)?;
            let charge = field::vortex_charge(
                &focal,
                (0.0, 0.0),
                scenario.probes.spacing_m / 2.0,
            );
            let charge_cell = match charge {
                Ok(q) => q.to_string(),
                Err(_) => String::from("undefined"),
            };
            let mut buffer = Vec::new();
            dump::write_field(&mut buffer, &focal).map_err(|e| StageError::Io(e.to_string()))?;
            self.sink
                .write(&format!("focal_mode{mode}{suffix}.bin"), &buffer)?;
            meta.push_str(&format!(
                "{},{},{},{},{},{}\n",
                mode,
                fmt(scan.capture_radius),
                fmt(focus.z),
                focus.interior,
                charge_cell,
                fmt(focal.captured_power(scan.capture_radius))
            ));
        }
        self.sink
            .write(&format!("propagate_meta{suffix}.csv"), meta.as_bytes())?;
        Ok(())
    }

    fn coupling(&mut self) -> Result<(CouplingMatrix, CouplingMatrix), StageError> {
        if let Some(cached) = &self.coupling {
            return Ok(cached.clone());
        }
        let scenario = self.scenario.clone();
        for &port in &RX_PORTS {
            let assigned = scenario
                .array
                .modes
                .iter()
                .filter(|&&m| rxlink::port_for_mode(m) == port)
                .count();
            if assigned != 1 {
                return Err(StageError::Validation(format!(
                    "[array] modes: isolation and ber need exactly one mode per receive port \
                     (center/sum/diff, e.g. [0, 2, 1]); {} modes map to the {} port",
                    assigned,
                    port.name()
                )));
            }
        }
        let probes = ProbeConfig::symmetric(scenario.probes.spacing_m, scenario.focal_plane_z());
        let mut with_fields = Vec::new();
        let mut without_fields = Vec::new();
        for &mode in &scenario.array.modes {
            with_fields.push((mode, self.focal_field(mode, true)?));
            without_fields.push((mode, self.focal_field(mode, false)?));
        }
        let h_with = rxlink::coupling_matrix(
            &with_fields.iter().map(|(m, f)| (*m, f)).collect::<Vec<_>>(),
            &probes,
        )
        .map_err(link_error)?;
        let h_without = rxlink::coupling_matrix(
            &without_fields.iter().map(|(m, f)| (*m, f)).collect::<Vec<_>>(),
            &probes,
        )
        .map_err(link_error)?;
        self.coupling = Some((h_with.clone(), h_without.clone()));
        Ok((h_with, h_without))
    }

    /// isolation: per-port power/isolation table plus per-mode lens gain.
    pub fn run_isolation(&mut self) -> Result<(), StageError> {
        let scenario = self.scenario.clone();
        let (h_with, _) = self.coupling()?;
        let iso = rxlink::isolation_db(&h_with).map_err(link_error)?;

        // per-mode lens gain: disc-captured power at the focal plane
        let mut gains = BTreeMap::new();
        for &mode in &scenario.array.modes {
            let radius = scenario.mode_capture_radius(mode);
            let with = self.focal_field(mode, true)?.captured_power(radius);
            let without = self.focal_field(mode, false)?.captured_power(radius);
            gains.insert(mode, rxlink::lens_gain_db(with, without).map_err(link_error)?);
        }

        let mut peak = 0.0_f64;
        for &p in &RX_PORTS {
            for m in 0..h_with.tx_modes.len() {
                peak = peak.max(h_with.entry(p, m).norm_sqr());
            }
        }
        let mut csv = String::from("rx_port,tx_mode,power_rel_db,isolation_db,lens_gain_db\n");
        for &port in &RX_PORTS {
            for (m, &mode) in h_with.tx_modes.iter().enumerate() {
                let power_rel = 10.0 * (h_with.entry(port, m).norm_sqr() / peak).log10();
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    port.name(),
                    mode,
                    fmt(power_rel),
                    fmt(iso[port as usize][m]),
                    fmt(gains[&mode])
                ));
            }
        }
        self.sink.write("isolation.csv", csv.as_bytes())?;
        Ok(())
    }

    /// ber: per-mode Monte-Carlo curves over the configured SNR grid.
    pub fn run_ber(&mut self, diagonal_override: bool) -> Result<(), StageError> {
        let scenario = self.scenario.clone();
        let h = if diagonal_override {
            CouplingMatrix::diagonal(&scenario.array.modes)
        } else {
            self.coupling()?.0
        };
        let allocation = rxlink::power_allocation(&h).map_err(link_error)?;
        let params = rxlink::BerParams {
            snr_grid_db: scenario.snr_grid()?,
            frames: scenario.run.frames,
            symbols_per_frame: scenario.run.symbols_per_frame,
            seed: scenario.run.seed,
        };
        let report = rxlink::simulate_ber(&h, &allocation, &scenario.budget(), &params)
            .map_err(link_error)?;
        let mut csv = String::from("mode,snr_db,ber,bits,ci_halfwidth,fec_limit\n");
        for (i, &mode) in report.modes.iter().enumerate() {
            for point in &report.points[i] {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    mode,
                    fmt(point.snr_db),
                    fmt(point.ber),
                    point.bits,
                    fmt(point.ci_halfwidth),
                    fmt(FEC_LIMIT)
                ));
            }
        }
        self.sink.write("ber.csv", csv.as_bytes())?;
        Ok(())
    }

    /// Writes the manifest covering everything emitted so far.
    pub fn finish(&self) -> Result<(), StageError> {
        self.sink
            .write_manifest(&self.scenario.hash(), self.scenario.run.seed)
    }
}

fn numerical(e: field::FieldError) -> StageError {
    StageError::Numerical(e.to_string())
}

fn link_error(e: rxlink::LinkError) -> StageError {
    StageError::Numerical(e.to_string())
}
