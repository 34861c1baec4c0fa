//! Minimal 2-D FFT over row-major complex grids, built on rustfft.

use num_complex::Complex64;
use rustfft::FftPlanner;

pub enum Direction {
    Forward,
    Inverse,
}

/// In-place 2-D FFT of a row-major nx×ny grid (rows contiguous).
/// The inverse transform is normalized by 1/(nx·ny).
pub fn fft2(data: &mut [Complex64], nx: usize, ny: usize, direction: Direction) {
    assert_eq!(data.len(), nx * ny);
    let mut planner = FftPlanner::new();
    let (row_fft, col_fft) = match direction {
        Direction::Forward => (planner.plan_fft_forward(nx), planner.plan_fft_forward(ny)),
        Direction::Inverse => (planner.plan_fft_inverse(nx), planner.plan_fft_inverse(ny)),
    };
    for row in data.chunks_exact_mut(nx) {
        row_fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); ny];
    for ix in 0..nx {
        for iy in 0..ny {
            column[iy] = data[iy * nx + ix];
        }
        col_fft.process(&mut column);
        for iy in 0..ny {
            data[iy * nx + ix] = column[iy];
        }
    }
    if let Direction::Inverse = direction {
        let scale = 1.0 / (nx * ny) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// FFT bin index -> angular spatial frequency (rad/m) for an n-point axis.
pub fn spatial_frequency(index: usize, n: usize, pitch: f64) -> f64 {
    let signed = if index <= n / 2 {
        index as f64
    } else {
        index as f64 - n as f64
    };
    std::f64::consts::TAU * signed / (n as f64 * pitch)
}
