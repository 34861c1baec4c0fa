//! End-to-end CLI behavior on a reduced grid: artifact schemas, exit codes,
//! overrides, and design-stage numbers.

use std::fs;
use std::path::Path;
use std::process::Command;

use oamlink_cli::pipeline::Pipeline;
use oamlink_cli::scenario::Scenario;
use tempfile::TempDir;

const SMALL: &str = "[grid]\nsamples = 256\npitch_m = 0.004\n\n\
                     [run]\nframes = 10\nsnr_grid = \"4:16:4\"\nscan_steps = 11\n";

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oamlink"))
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn design_emits_ring_radii_with_chi_ratio() {
    let dir = TempDir::new().unwrap();
    let scenario = Scenario::parse_toml(SMALL).unwrap();
    let mut pipeline = Pipeline::new(scenario, dir.path()).unwrap();
    pipeline.run_design().unwrap();
    pipeline.finish().unwrap();

    let rings = read_csv(&dir.path().join("rings.csv"));
    assert_eq!(rings[0], vec!["mode", "radius_m", "element_count"]);
    let radius = |mode: &str| {
        rings
            .iter()
            .find(|r| r[0] == mode)
            .map(|r| r[1].parse::<f64>().unwrap())
            .unwrap()
    };
    assert_eq!(radius("0"), 0.0);
    let ratio = radius("2") / radius("1");
    assert!((ratio - 1.6589).abs() < 1e-4, "R2/R1 = {ratio}");

    let geometry = read_csv(&dir.path().join("array_geometry.csv"));
    assert_eq!(
        geometry[0],
        vec!["mode", "element_index", "x_m", "y_m", "amplitude", "phase_rad"]
    );
    assert_eq!(geometry.len(), 1 + 1 + 4 + 8);

    // lens dumps parse back
    let phase = fs::read(dir.path().join("lens_phase.bin")).unwrap();
    let dump = oamlink::dump::read_lens_grid(&mut phase.as_slice()).unwrap();
    assert_eq!(dump.nx, 256);
    assert_eq!(dump.quantity, oamlink::dump::LensQuantity::PhaseRad);
}

#[test]
fn design_with_only_mode_zero() {
    let dir = TempDir::new().unwrap();
    let config = format!("{SMALL}\n[array]\nmodes = [0]\n");
    let scenario = Scenario::parse_toml(&config).unwrap();
    let mut pipeline = Pipeline::new(scenario, dir.path()).unwrap();
    pipeline.run_design().unwrap();
    let geometry = read_csv(&dir.path().join("array_geometry.csv"));
    assert_eq!(geometry.len(), 2, "only the center element");
    assert_eq!(geometry[1][0], "0");
}

#[test]
fn invalid_pitch_exits_with_code_2() {
    let dir = TempDir::new().unwrap();
    let config_path = dir.path().join("bad.toml");
    fs::write(&config_path, "[grid]\npitch_m = 0.02\n").unwrap();
    let output = cli()
        .args(["design", "--config", config_path.to_str().unwrap()])
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("pitch_m"), "stderr: {stderr}");
}

#[test]
fn missing_config_exits_with_code_4() {
    let dir = TempDir::new().unwrap();
    let output = cli()
        .args(["design", "--config", "/nonexistent/path.toml"])
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn full_pipeline_schemas_and_manifest() {
    let dir = TempDir::new().unwrap();
    let config_path = dir.path().join("s.toml");
    fs::write(&config_path, SMALL).unwrap();
    let out = dir.path().join("out");
    let status = cli()
        .args(["all", "--config", config_path.to_str().unwrap()])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let scan = read_csv(&out.join("scan_mode1.csv"));
    assert_eq!(scan[0], vec!["z_m", "captured_power_w", "on_axis_intensity"]);
    assert_eq!(scan.len(), 1 + 11);
    // z strictly increasing and beyond the lens
    let z: Vec<f64> = scan[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(z.windows(2).all(|w| w[1] > w[0]));
    assert!(z[0] > 0.9);

    let iso = read_csv(&out.join("isolation.csv"));
    assert_eq!(
        iso[0],
        vec!["rx_port", "tx_mode", "power_rel_db", "isolation_db", "lens_gain_db"]
    );
    assert_eq!(iso.len(), 1 + 9);
    let ports: Vec<&str> = iso[1..].iter().map(|r| r[0].as_str()).collect();
    assert!(ports.contains(&"center") && ports.contains(&"sum") && ports.contains(&"diff"));

    let ber = read_csv(&out.join("ber.csv"));
    assert_eq!(
        ber[0],
        vec!["mode", "snr_db", "ber", "bits", "ci_halfwidth", "fec_limit"]
    );
    assert_eq!(ber.len(), 1 + 3 * 4);
    assert!(ber[1][5].parse::<f64>().unwrap() == 3.8e-3);

    // manifest lists every artifact with its checksum
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("scenario_hash"));
    for name in ["rings.csv", "ber.csv", "focal_mode2.bin", "scan_mode0_nolens.csv"] {
        assert!(manifest.contains(name), "manifest missing {name}");
    }

    // focal field dumps parse and carry the focal-plane coordinate
    let bin = fs::read(out.join("focal_mode1.bin")).unwrap();
    let field = oamlink::dump::read_field(&mut bin.as_slice()).unwrap();
    let scenario = Scenario::parse_toml(SMALL).unwrap();
    assert!((field.z() - scenario.focal_plane_z()).abs() < 1e-9);
}

#[test]
fn seed_override_changes_ber_but_rerun_matches() {
    let dir = TempDir::new().unwrap();
    let config_path = dir.path().join("s.toml");
    fs::write(&config_path, SMALL).unwrap();
    let run_ber = |out: &Path, seed: &str| {
        let status = cli()
            .args(["ber", "--diagonal-h", "--config", config_path.to_str().unwrap()])
            .args(["--seed", seed])
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(out.join("ber.csv")).unwrap()
    };
    let a = run_ber(&dir.path().join("a"), "5");
    let b = run_ber(&dir.path().join("b"), "5");
    let c = run_ber(&dir.path().join("c"), "6");
    assert_eq!(a, b, "same seed must reproduce bytes");
    assert_ne!(a, c, "different seed must change the Monte-Carlo stream");
}

#[test]
fn snr_grid_override() {
    let dir = TempDir::new().unwrap();
    let config_path = dir.path().join("s.toml");
    fs::write(&config_path, SMALL).unwrap();
    let out = dir.path().join("out");
    let status = cli()
        .args(["ber", "--diagonal-h", "--config", config_path.to_str().unwrap()])
        .args(["--snr-grid", "6:10:2"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let ber = read_csv(&out.join("ber.csv"));
    let snrs: Vec<f64> = ber[1..]
        .iter()
        .filter(|r| r[0] == "0")
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert_eq!(snrs, vec![6.0, 8.0, 10.0]);
}

#[test]
fn diagonal_override_has_no_floor() {
    let dir = TempDir::new().unwrap();
    let config = "[grid]\nsamples = 256\npitch_m = 0.004\n\n\
                  [run]\nframes = 100\nsnr_grid = \"20:24:2\"\nscan_steps = 11\n";
    let config_path = dir.path().join("s.toml");
    fs::write(&config_path, config).unwrap();
    let out = dir.path().join("out");
    let status = cli()
        .args(["ber", "--diagonal-h", "--config", config_path.to_str().unwrap()])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let ber = read_csv(&out.join("ber.csv"));
    for row in &ber[1..] {
        let value: f64 = row[2].parse().unwrap();
        assert!(value < 1e-5, "BER {value} at {} dB should be floor-free", row[1]);
    }
}

#[test]
fn isolation_requires_port_covering_modes() {
    let dir = TempDir::new().unwrap();
    let config = format!("{SMALL}\n[array]\nmodes = [0]\n");
    let config_path = dir.path().join("s.toml");
    fs::write(&config_path, config).unwrap();
    let output = cli()
        .args(["isolation", "--config", config_path.to_str().unwrap()])
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("receive port"), "stderr: {stderr}");
}

#[test]
fn band_limit_violation_exits_with_code_3() {
    // a 1.024 m window cannot carry a 60 m scan step without aliasing
    let dir = TempDir::new().unwrap();
    let config = "[grid]\nsamples = 256\npitch_m = 0.004\n\n\
                  [run]\nscan_start_m = 59.0\nscan_end_m = 60.0\nscan_steps = 2\n";
    let config_path = dir.path().join("s.toml");
    fs::write(&config_path, config).unwrap();
    let output = cli()
        .args(["propagate", "--config", config_path.to_str().unwrap()])
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("band limit"), "stderr: {stderr}");
}

#[test]
fn baseline_scan_has_boundary_peak() {
    let dir = TempDir::new().unwrap();
    let scenario = Scenario::parse_toml(SMALL).unwrap();
    let mut pipeline = Pipeline::new(scenario, dir.path()).unwrap();
    pipeline.run_propagate(false).unwrap();
    let meta = read_csv(&dir.path().join("propagate_meta_nolens.csv"));
    assert_eq!(
        meta[0],
        vec![
            "mode",
            "capture_radius_m",
            "focus_z_m",
            "interior_peak",
            "vortex_charge",
            "captured_at_focus_w"
        ]
    );
    let mode0 = meta[1..].iter().find(|r| r[0] == "0").unwrap();
    assert_eq!(mode0[3], "false", "free spreading has no interior focus");
}
