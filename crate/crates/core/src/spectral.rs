//! FFT plumbing shared by the grid, Helmholtz and dynamics modules.
//!
//! Plans are cached per transform length behind a mutex; the cached plans are
//! `Arc<dyn Fft>` and therefore safe to use from any thread once handed out.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub(crate) struct Plans {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

fn cache() -> &'static Mutex<HashMap<usize, Plans>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Plans>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn plans(n: usize) -> Plans {
    let mut map = cache().lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Plans { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
        })
        .clone()
}

/// Whether a Fourier multiplier is even or odd in the wavenumber. Odd
/// multipliers have their Nyquist coefficient zeroed so the result stays real.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Parity {
    Even,
    Odd,
}

/// Angular wavenumbers in FFT order for `n` points of spacing `h`. The
/// Nyquist entry carries `+π/h`.
pub(crate) fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / (n as f64 * h);
    (0..n)
        .map(|j| {
            let signed = if j <= n / 2 { j as isize } else { j as isize - n as isize };
            signed as f64 * base
        })
        .collect()
}

pub(crate) fn forward(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plans(values.len()).forward.process(&mut buf);
    buf
}

/// Inverse transform returning the (normalised) real part.
pub(crate) fn inverse_real(mut spectrum: Vec<Complex64>) -> Vec<f64> {
    let n = spectrum.len();
    plans(n).inverse.process(&mut spectrum);
    let scale = 1.0 / n as f64;
    spectrum.into_iter().map(|z| z.re * scale).collect()
}

/// Applies `multiplier(κ)` to the spectrum of `values` sampled with spacing `h`.
pub(crate) fn apply_multiplier<F>(values: &[f64], h: f64, parity: Parity, multiplier: F) -> Vec<f64>
where
    F: Fn(f64) -> Complex64,
{
    let n = values.len();
    let kappa = wavenumbers(n, h);
    let mut spec = forward(values);
    for (j, z) in spec.iter_mut().enumerate() {
        if j == n / 2 {
            *z = match parity {
                Parity::Odd => Complex64::new(0.0, 0.0),
                Parity::Even => *z * multiplier(kappa[j]).re,
            };
        } else {
            *z *= multiplier(kappa[j]);
        }
    }
    inverse_real(spec)
}
