//! Zero-padded DFT helpers shared by the spectral reflector and the
//! band-limited input drive of the time-domain integrator.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::C64;

/// Ratio between the padded transform length and the signal length.
pub(crate) const PAD_FACTOR: usize = 4;

/// Largest tolerated fraction of spectral energy in the upper half of the
/// resolved band.
pub(crate) const ALIAS_TOLERANCE: f64 = 1e-8;

pub(crate) fn padded_len(n: usize) -> usize {
    (PAD_FACTOR * n).next_power_of_two()
}

/// DFT of `x` zero-padded to `len` (`len ≥ x.len()`), with `e^{-2πi kn/len}`.
pub(crate) fn forward(x: &[C64], len: usize) -> Vec<C64> {
    debug_assert!(len >= x.len());
    let mut buf = vec![C64::new(0.0, 0.0); len];
    buf[..x.len()].copy_from_slice(x);
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    buf
}

/// Inverse DFT including the `1/len` factor.
pub(crate) fn inverse(mut spectrum: Vec<C64>) -> Vec<C64> {
    let len = spectrum.len();
    FftPlanner::new().plan_fft_inverse(len).process(&mut spectrum);
    let scale = 1.0 / len as f64;
    spectrum.iter_mut().for_each(|z| *z *= scale);
    spectrum
}

/// Signed bin number of DFT index `k`.
fn signed_bin(k: usize, len: usize) -> f64 {
    if k <= len / 2 {
        k as f64
    } else {
        k as f64 - len as f64
    }
}

/// Detuning ω of bin `k` in the `e^{-iωt}` convention. The inverse DFT
/// synthesizes `e^{+2πi kn/len}`, hence the sign flip.
pub(crate) fn detuning(k: usize, len: usize, dt: f64) -> f64 {
    -2.0 * PI * signed_bin(k, len) / (len as f64 * dt)
}

/// Fraction of `Σ|X_k|²` carried by bins above half the Nyquist frequency.
pub(crate) fn upper_band_fraction(spectrum: &[C64]) -> f64 {
    let len = spectrum.len();
    let quarter = (len / 4) as f64;
    let (mut total, mut upper) = (0.0, 0.0);
    for (k, z) in spectrum.iter().enumerate() {
        let p = z.norm_sqr();
        total += p;
        if signed_bin(k, len).abs() > quarter {
            upper += p;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        upper / total
    }
}

/// Band-limited interpolation: returns `len · factor` samples of the periodic
/// trigonometric interpolant of the signal whose DFT is `spectrum`, with
/// output index `q` at input position `q / factor`.
pub(crate) fn upsample(spectrum: &[C64], factor: usize) -> Vec<C64> {
    let len = spectrum.len();
    let big = len * factor;
    let mut padded = vec![C64::new(0.0, 0.0); big];
    let half = len / 2;
    padded[..half].copy_from_slice(&spectrum[..half]);
    for k in half + 1..len {
        padded[big - (len - k)] = spectrum[k];
    }
    if len.is_multiple_of(2) {
        // split the Nyquist bin between ±half
        padded[half] = spectrum[half] * 0.5;
        padded[big - half] = spectrum[half] * 0.5;
    } else {
        padded[half] = spectrum[half];
    }
    let mut out = inverse(padded);
    out.iter_mut().for_each(|z| *z *= factor as f64);
    out
}
