//! Binary dump formats for lens profiles and complex fields.
//!
//! Lens grids: text header `OAMLENS v1 <nx> <ny> <pitch_m> <quantity>`
//! (quantity is `phase_rad` or `thickness_m`) followed by row-major
//! little-endian f64 samples.
//!
//! Fields: text header `OAMFIELD v1 <nx> <ny> <pitch_m> <z_m> <lambda_m>`
//! followed by row-major little-endian interleaved (re, im) f64 pairs.
//!
//! Headers print floats with Rust's shortest round-trip representation, so
//! write → read → write is byte-identical.

use crate::field::FieldGrid;
use crate::lens::{PhaseProfile, ThicknessMap};
use num_complex::Complex64;
use std::io::{self, Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("payload truncated: expected {expected} samples, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LensQuantity {
    PhaseRad,
    ThicknessM,
}

impl LensQuantity {
    fn tag(self) -> &'static str {
        match self {
            LensQuantity::PhaseRad => "phase_rad",
            LensQuantity::ThicknessM => "thickness_m",
        }
    }
}

/// A parsed lens-grid dump.
#[derive(Debug, Clone, PartialEq)]
pub struct LensDump {
    pub nx: usize,
    pub ny: usize,
    pub pitch: f64,
    pub quantity: LensQuantity,
    pub samples: Vec<f64>,
}

pub fn write_phase_profile(w: &mut impl Write, profile: &PhaseProfile) -> Result<(), DumpError> {
    write_lens_grid(
        w,
        profile.nx(),
        profile.ny(),
        profile.pitch(),
        LensQuantity::PhaseRad,
        profile.samples(),
    )
}

pub fn write_thickness_map(w: &mut impl Write, map: &ThicknessMap) -> Result<(), DumpError> {
    write_lens_grid(
        w,
        map.nx(),
        map.ny(),
        map.pitch(),
        LensQuantity::ThicknessM,
        map.samples(),
    )
}

fn write_lens_grid(
    w: &mut impl Write,
    nx: usize,
    ny: usize,
    pitch: f64,
    quantity: LensQuantity,
    samples: &[f64],
) -> Result<(), DumpError> {
    writeln!(w, "OAMLENS v1 {} {} {} {}", nx, ny, pitch, quantity.tag())?;
    for &s in samples {
        w.write_all(&s.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_lens_grid(r: &mut impl Read) -> Result<LensDump, DumpError> {
    let header = read_header_line(r)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "OAMLENS" || fields[1] != "v1" {
        return Err(DumpError::BadHeader(header));
    }
    let nx: usize = parse(fields[2], &header)?;
    let ny: usize = parse(fields[3], &header)?;
    let pitch: f64 = parse(fields[4], &header)?;
    let quantity = match fields[5] {
        "phase_rad" => LensQuantity::PhaseRad,
        "thickness_m" => LensQuantity::ThicknessM,
        other => return Err(DumpError::BadHeader(format!("unknown quantity {other}"))),
    };
    let samples = read_f64s(r, nx * ny)?;
    Ok(LensDump {
        nx,
        ny,
        pitch,
        quantity,
        samples,
    })
}

pub fn write_field(w: &mut impl Write, field: &FieldGrid) -> Result<(), DumpError> {
    writeln!(
        w,
        "OAMFIELD v1 {} {} {} {} {}",
        field.nx(),
        field.ny(),
        field.pitch(),
        field.z(),
        field.wavelength()
    )?;
    for u in field.samples() {
        w.write_all(&u.re.to_le_bytes())?;
        w.write_all(&u.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field(r: &mut impl Read) -> Result<FieldGrid, DumpError> {
    let header = read_header_line(r)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 7 || fields[0] != "OAMFIELD" || fields[1] != "v1" {
        return Err(DumpError::BadHeader(header));
    }
    let nx: usize = parse(fields[2], &header)?;
    let ny: usize = parse(fields[3], &header)?;
    let pitch: f64 = parse(fields[4], &header)?;
    let z: f64 = parse(fields[5], &header)?;
    let wavelength: f64 = parse(fields[6], &header)?;
    let raw = read_f64s(r, 2 * nx * ny)?;
    let samples = raw
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    FieldGrid::new(samples, nx, ny, pitch, z, wavelength)
        .map_err(|e| DumpError::BadHeader(e.to_string()))
}

fn parse<T: std::str::FromStr>(token: &str, header: &str) -> Result<T, DumpError> {
    token
        .parse()
        .map_err(|_| DumpError::BadHeader(format!("unparseable token {token} in {header}")))
}

fn read_header_line(r: &mut impl Read) -> Result<String, DumpError> {
    let mut line = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        let n = r.read(&mut byte)?;
        if n == 0 {
            return Err(DumpError::BadHeader("missing newline".into()));
        }
        if byte[0] == b'\n' {
            break;
        }
        line.push(byte[0]);
        if line.len() > 256 {
            return Err(DumpError::BadHeader("header too long".into()));
        }
    }
    String::from_utf8(line).map_err(|_| DumpError::BadHeader("non-utf8 header".into()))
}

fn read_f64s(r: &mut impl Read, count: usize) -> Result<Vec<f64>, DumpError> {
    let mut bytes = vec![0u8; count * 8];
    let mut filled = 0;
    while filled < bytes.len() {
        let n = r.read(&mut bytes[filled..])?;
        if n == 0 {
            return Err(DumpError::Truncated {
                expected: count,
                got: filled / 8,
            });
        }
        filled += n;
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}
