//! Shared test oracles, independent of the library implementation paths.

#![allow(dead_code)]

pub mod dd;

use dd::Dd;
use num_complex::Complex64;
use oamlink::rxlink::{port_for_mode, CouplingMatrix, RxPort};
use std::f64::consts::TAU;

/// Bessel J_n by K-point trapezoid quadrature of the periodic integral
/// representation J_n(x) = (1/2π)∫ cos(nθ - x sinθ)dθ.
///
/// The trapezoid rule on a full period is spectrally accurate; its aliasing
/// error is a sum of J_{n+mK}(x), so K > |x| + n + 60 pushes it below 1e-14.
/// Entirely independent of the series/recurrence route used by the library.
pub fn bessel_oracle(order: i32, x: f64) -> f64 {
    let nodes = (x.abs() + order.abs() as f64 + 60.0).ceil() as usize;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in 0..nodes {
        let theta = TAU * j as f64 / nodes as f64;
        let term = (order as f64 * theta - x * theta.sin()).cos();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum / nodes as f64
}

/// Ai(0) in double-double precision.
const AI0: Dd = Dd {
    hi: 0.3550280538878172,
    lo: 2.05233632436212e-17,
};
/// Ai'(0) in double-double precision.
const AIP0: Dd = Dd {
    hi: -0.2588194037928068,
    lo: 2.522243111610832e-17,
};

/// High-precision Airy oracle: double-double Maclaurin pair for |x| ≤ 12
/// (cancellation ≤ 1e12 is absorbed by the ~32-digit arithmetic),
/// asymptotic expansions beyond (truncation ≤ e^{-2ζ} ≤ e^{-55}).
pub fn airy_oracle(x: f64) -> f64 {
    if x.abs() <= 12.0 {
        airy_maclaurin_dd(x)
    } else if x > 0.0 {
        airy_asymptotic_positive(x)
    } else {
        airy_asymptotic_negative(-x)
    }
}

fn airy_maclaurin_dd(x: f64) -> f64 {
    let xd = Dd::from_f64(x);
    let x3 = xd.mul(xd).mul(xd);
    let mut f_term = Dd::from_f64(1.0);
    let mut g_term = xd;
    let mut sum = AI0.mul(f_term).add(AIP0.mul(g_term));
    for k in 0..400u32 {
        let kf = 3.0 * k as f64;
        f_term = f_term.mul(x3).div_f64((kf + 2.0) * (kf + 3.0));
        g_term = g_term.mul(x3).div_f64((kf + 3.0) * (kf + 4.0));
        let increment = AI0.mul(f_term).add(AIP0.mul(g_term));
        sum = sum.add(increment);
        if increment.abs() < 1e-40 {
            break;
        }
    }
    sum.to_f64()
}

fn airy_u_ratio(k: u32) -> f64 {
    let kf = k as f64;
    (6.0 * kf + 5.0) * (6.0 * kf + 3.0) * (6.0 * kf + 1.0)
        / (216.0 * (kf + 1.0) * (2.0 * kf + 1.0))
}

fn airy_asymptotic_positive(x: f64) -> f64 {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0u32;
    loop {
        let next = term * airy_u_ratio(k) / zeta;
        if next.abs() >= term.abs() || next.abs() < 1e-20 {
            break;
        }
        term = next;
        k += 1;
        sum += if k % 2 == 1 { -term } else { term };
        if k > 80 {
            break;
        }
    }
    (-zeta).exp() * sum / (2.0 * std::f64::consts::PI.sqrt() * x.powf(0.25))
}

fn airy_asymptotic_negative(z: f64) -> f64 {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let mut even_sum = 0.0;
    let mut odd_sum = 0.0;
    let mut u = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..90u32 {
        let term = u / zeta.powi(k as i32);
        if term.abs() >= prev {
            break;
        }
        prev = term.abs();
        let signed = if (k / 2) % 2 == 0 { term } else { -term };
        if k % 2 == 0 {
            even_sum += signed;
        } else {
            odd_sum += signed;
        }
        u *= airy_u_ratio(k);
        if term.abs() < 1e-20 {
            break;
        }
    }
    let phase = zeta - std::f64::consts::FRAC_PI_4;
    (phase.cos() * even_sum + phase.sin() * odd_sum)
        / (std::f64::consts::PI.sqrt() * z.powf(0.25))
}

/// Complementary error function, fractional error below 1.2e-7
/// (Chebyshev fit; adequate for Monte-Carlo 3σ comparisons).
pub fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Exact bit error rate of Gray-mapped square 16-QAM over AWGN at symbol
/// SNR γs = Es/N0:
/// BER = (3/8)erfc(c) + (1/4)erfc(3c) - (1/8)erfc(5c), c = √(γs/10).
pub fn qam16_ber_theory(symbol_snr: f64) -> f64 {
    let c = (symbol_snr / 10.0).sqrt();
    0.375 * erfc(c) + 0.25 * erfc(3.0 * c) - 0.125 * erfc(5.0 * c)
}

/// Synthetic coupling matrix with representative bench isolation figures
/// (11.3-15.6 dB) and equalized diagonals: off-diagonal magnitude
/// 10^(-isolation/20), phases fixed so the zero-noise error floor is
/// positive, mode-ordered, and within a factor 2 of the Gaussian SINR
/// estimate.
pub fn reference_isolation_channel() -> CouplingMatrix {
    let entry = |iso_db: f64, phase_deg: f64| {
        Complex64::from_polar(10f64.powf(-iso_db / 20.0), phase_deg.to_radians())
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut entries = vec![vec![zero; 3]; 3];
    // rows: [center, sum, diff], columns: tx modes [0, 1, 2]
    entries[RxPort::Center as usize] = vec![one, entry(15.6, 45.0), entry(15.1, 40.0)];
    entries[RxPort::Sum as usize] = vec![entry(13.1, 5.0), entry(11.3, 35.0), one];
    entries[RxPort::Diff as usize] = vec![entry(14.4, 0.0), one, entry(11.9, 5.0)];
    CouplingMatrix::from_entries(vec![0, 1, 2], entries)
}

/// Exact zero-noise BER floor of one port by enumerating all 16³ symbol
/// combinations of the desired and interfering streams.
pub fn exact_zero_noise_floor(h: &CouplingMatrix, mode: i32) -> f64 {
    use oamlink::rxlink::{qam16_demap, qam16_map};
    let port = port_for_mode(mode);
    let own = h.mode_index(mode).unwrap();
    let gain = h.entry(port, own);
    let n_modes = h.tx_modes.len();
    let mut error_bits = 0u64;
    let mut total_bits = 0u64;
    let mut nibbles = vec![0u8; n_modes];
    let combos = 16usize.pow(n_modes as u32);
    for combo in 0..combos {
        let mut c = combo;
        for nib in nibbles.iter_mut() {
            *nib = (c % 16) as u8;
            c /= 16;
        }
        let mut y = Complex64::new(0.0, 0.0);
        for (j, &nib) in nibbles.iter().enumerate() {
            y += h.entry(port, j) * qam16_map(nib);
        }
        let got = qam16_demap(y / gain);
        error_bits += (got ^ nibbles[own]).count_ones() as u64;
        total_bits += 4;
    }
    error_bits as f64 / total_bits as f64
}
