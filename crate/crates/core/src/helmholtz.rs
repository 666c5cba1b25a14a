//! Inverse Helmholtz operators `(a - ∂²)⁻¹` for `a ∈ {1, 4}`.
//!
//! Both are periodic spectral solves with multiplier `1/(a + κ²)`. Their
//! free-space Green kernels are `½e^{-|x|}` and `¼e^{-2|x|}`; on the periodic
//! box the kernels are the periodised versions returned by
//! [`HelmholtzKind::periodic_green`].

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::spectral::Parity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HelmholtzKind {
    /// `(1 - ∂²)⁻¹`, mapping momentum `y` to `u`.
    One,
    /// `(4 - ∂²)⁻¹`, mapping `u` to `v`.
    Four,
}

impl HelmholtzKind {
    pub fn from_shift(shift: f64) -> Result<Self> {
        if shift == 1.0 {
            Ok(Self::One)
        } else if shift == 4.0 {
            Ok(Self::Four)
        } else {
            Err(Error::UnsupportedShift(shift))
        }
    }

    pub fn shift(self) -> f64 {
        match self {
            Self::One => 1.0,
            Self::Four => 4.0,
        }
    }

    /// Free-space Green kernel: `½e^{-|x|}` or `¼e^{-2|x|}`.
    pub fn green(self, x: f64) -> f64 {
        let s = self.shift().sqrt();
        (-s * x.abs()).exp() / (2.0 * s)
    }

    /// Green kernel of `a - ∂²` on a circle of half width `half_width`,
    /// evaluated at a displacement `d ∈ [-L, L]`.
    pub fn periodic_green(self, d: f64, half_width: f64) -> f64 {
        let s = self.shift().sqrt();
        let r = d.abs().min(half_width);
        // cosh(s(L - r)) / (2 s sinh(sL)), rewritten to avoid overflow.
        let num = (-s * r).exp() + (-s * (2.0 * half_width - r)).exp();
        let den = 2.0 * s * (1.0 - (-2.0 * s * half_width).exp());
        num / den
    }
}

/// `(a - ∂²)⁻¹ f`.
pub fn inv_helmholtz(kind: HelmholtzKind, f: &GridFunction) -> GridFunction {
    let a = kind.shift();
    f.apply_multiplier(Parity::Even, |k| Complex64::new(1.0 / (a + k * k), 0.0))
}

/// `(a - ∂²)⁻¹ ∂x f` in a single pass; the multiplier `iκ/(a + κ²)` is bounded.
pub fn inv_helmholtz_dx(kind: HelmholtzKind, f: &GridFunction) -> GridFunction {
    let a = kind.shift();
    f.apply_multiplier(Parity::Odd, |k| Complex64::new(0.0, k / (a + k * k)))
}

/// The forward operator `(a - ∂²) f`, spectrally.
pub fn apply_helmholtz(kind: HelmholtzKind, f: &GridFunction) -> GridFunction {
    let a = kind.shift();
    f.apply_multiplier(Parity::Even, |k| Complex64::new(a + k * k, 0.0))
}

/// Max-norm of `(1-∂²)⁻¹(4-∂²)⁻¹f − ⅓(1-∂²)⁻¹f + ⅓(4-∂²)⁻¹f`.
pub fn resolvent_identity_residual(f: &GridFunction) -> f64 {
    let composed = inv_helmholtz(HelmholtzKind::One, &inv_helmholtz(HelmholtzKind::Four, f));
    let one = inv_helmholtz(HelmholtzKind::One, f);
    let four = inv_helmholtz(HelmholtzKind::Four, f);
    composed
        .values()
        .iter()
        .zip(one.values())
        .zip(four.values())
        .map(|((c, a), b)| (c - a / 3.0 + b / 3.0).abs())
        .fold(0.0, f64::max)
}

/// `v = (4-∂²)⁻¹u` together with `v_x` and `v_xx`.
///
/// `v_x` comes from the bounded multiplier and `v_xx` from the identity
/// `v_xx = 4v − u`, so neither differentiates a kinked `u`.
#[derive(Debug, Clone)]
pub struct SmoothedField {
    pub v: GridFunction,
    pub vx: GridFunction,
    pub vxx: GridFunction,
}

impl SmoothedField {
    pub fn from_u(u: &GridFunction) -> Self {
        let v = inv_helmholtz(HelmholtzKind::Four, u);
        let vx = inv_helmholtz_dx(HelmholtzKind::Four, u);
        let vxx = v.zip_with(u, |v, u| 4.0 * v - u).expect("v shares the grid of u");
        Self { v, vx, vxx }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;
    use crate::waves::{sample_peakon, sample_smooth_peakon};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn max_diff(a: &GridFunction, b: &GridFunction) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    pub(crate) fn random_band_limited(grid: UniformGrid, modes: usize, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = grid.half_width();
        let coeffs: Vec<(f64, f64)> =
            (0..modes).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        GridFunction::from_fn(grid, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(m, (a, b))| {
                    let k = PI * m as f64 / l;
                    a * (k * x).cos() + b * (k * x).sin()
                })
                .sum()
        })
    }

    #[test]
    fn shift_parsing() {
        assert_eq!(HelmholtzKind::from_shift(1.0).unwrap(), HelmholtzKind::One);
        assert_eq!(HelmholtzKind::from_shift(4.0).unwrap(), HelmholtzKind::Four);
        assert!(matches!(HelmholtzKind::from_shift(2.0), Err(Error::UnsupportedShift(_))));
    }

    #[test]
    fn kernels() {
        assert!((HelmholtzKind::One.green(0.0) - 0.5).abs() < 1e-15);
        assert!((HelmholtzKind::Four.green(1.0) - 0.25 * (-2.0f64).exp()).abs() < 1e-15);
        // The periodic kernel differs from the free one by e^{-2aL} terms.
        let l = 30.0;
        for d in [0.0, 1.0, 10.0] {
            for kind in [HelmholtzKind::One, HelmholtzKind::Four] {
                assert!((kind.periodic_green(d, l) - kind.green(d)).abs() < 1e-25 + 1e-12 * kind.green(d));
            }
        }
    }

    #[test]
    fn smooth_peakon_from_peakon() {
        let g = UniformGrid::default();
        for c in [1.0, 2.5] {
            let v = inv_helmholtz(HelmholtzKind::Four, &sample_peakon(&g, c, 0.0));
            let rho = sample_smooth_peakon(&g, c, 0.0, 0).unwrap();
            let err = max_diff(&v, &rho);
            // The sampled kink aliases mass h²/6·c into the low modes; the
            // resulting error is (h²/24)·c at the crest (see decisions).
            let h = g.spacing();
            assert!(err <= 1.05 * h * h / 24.0 * c, "c = {c}: {err}");
        }
        let fine = UniformGrid::new(30.0, 16384).unwrap();
        let v = inv_helmholtz(HelmholtzKind::Four, &sample_peakon(&fine, 1.0, 0.0));
        let err = max_diff(&v, &sample_smooth_peakon(&fine, 1.0, 0.0, 0).unwrap());
        assert!(err <= 1e-6, "{err}");
    }

    #[test]
    fn cosine_eigenfunction() {
        let g = UniformGrid::default();
        let k = 7.0 * PI / g.half_width();
        let f = GridFunction::from_fn(g, |x| (k * x).cos());
        let out = inv_helmholtz(HelmholtzKind::One, &f);
        let expect = f.scale(1.0 / (1.0 + k * k));
        assert!(max_diff(&out, &expect) < 1e-12);
    }

    #[test]
    fn zero_maps_to_zero() {
        let z = GridFunction::zeros(UniformGrid::default());
        assert_eq!(inv_helmholtz(HelmholtzKind::One, &z).max_abs(), 0.0);
        assert_eq!(resolvent_identity_residual(&z), 0.0);
    }

    #[test]
    fn dx_of_sine() {
        let g = UniformGrid::default();
        let k = 5.0 * PI / g.half_width();
        let f = GridFunction::from_fn(g, |x| (k * x).sin());
        for kind in [HelmholtzKind::One, HelmholtzKind::Four] {
            let out = inv_helmholtz_dx(kind, &f);
            let expect = GridFunction::from_fn(g, |x| k * (k * x).cos() / (kind.shift() + k * k));
            assert!(max_diff(&out, &expect) < 1e-12);
        }
    }

    #[test]
    fn dx_maps_even_to_odd() {
        let g = UniformGrid::new(30.0, 1024).unwrap();
        let f = GridFunction::from_fn(g, |x| (-(x - 0.0).powi(2)).exp() + 0.3 * (-x.abs()).exp());
        let out = inv_helmholtz_dx(HelmholtzKind::Four, &f);
        let n = g.len();
        // Node n/2 is x = 0; node n/2 + j mirrors n/2 - j.
        for j in 1..n / 2 {
            let a = out.values()[n / 2 + j];
            let b = out.values()[n / 2 - j];
            assert!((a + b).abs() < 1e-14, "{j}: {a} {b}");
        }
        assert!(out.values()[n / 2].abs() < 1e-14);
    }

    #[test]
    fn dx_matches_composition_on_peakon_square() {
        let g = UniformGrid::default();
        let phi = sample_peakon(&g, 1.0, 0.0);
        let sq = phi.mul(&phi).unwrap();
        for kind in [HelmholtzKind::One, HelmholtzKind::Four] {
            let direct = inv_helmholtz_dx(kind, &sq);
            let composed = inv_helmholtz(kind, &sq).spectral_derivative(1).unwrap();
            assert!(max_diff(&direct, &composed) < 1e-8);
        }
    }

    #[test]
    fn resolvent_identity_on_band_limited_and_peakon() {
        let g = UniformGrid::default();
        for seed in 0..5 {
            let f = random_band_limited(g, 64, seed);
            assert!(resolvent_identity_residual(&f) <= 1e-12);
        }
        assert!(resolvent_identity_residual(&sample_peakon(&g, 1.0, 0.0)) <= 1e-10);
    }

    #[test]
    fn forward_inverts_inverse() {
        let g = UniformGrid::default();
        let f = random_band_limited(g, 80, 11);
        let back = apply_helmholtz(HelmholtzKind::Four, &inv_helmholtz(HelmholtzKind::Four, &f));
        assert!(max_diff(&back, &f) <= 1e-10 * f.max_abs());
    }

    #[test]
    fn smoothed_field_matches_closed_form() {
        let g = UniformGrid::default();
        let field = SmoothedField::from_u(&sample_peakon(&g, 1.0, 0.0));
        for (order, got) in [(1, &field.vx), (2, &field.vxx)] {
            let exact = sample_smooth_peakon(&g, 1.0, 0.0, order).unwrap();
            assert!(max_diff(got, &exact) < 2e-5, "order {order}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn positivity(
            bumps in proptest::collection::vec((-20.0f64..20.0, 0.3f64..3.0, 0.0f64..2.0), 1..6),
        ) {
            let g = UniformGrid::new(30.0, 1024).unwrap();
            let f = GridFunction::from_fn(g, |x| {
                bumps.iter().map(|(c, w, a)| a * (-((x - c) / w).powi(2)).exp()).sum()
            });
            for kind in [HelmholtzKind::One, HelmholtzKind::Four] {
                prop_assert!(inv_helmholtz(kind, &f).min() >= -1e-12);
            }
        }

        #[test]
        fn self_adjoint(seed_f in 0u64..1000, seed_g in 1000u64..2000) {
            let g = UniformGrid::new(30.0, 1024).unwrap();
            let f = random_band_limited(g, 40, seed_f);
            let q = random_band_limited(g, 40, seed_g);
            for kind in [HelmholtzKind::One, HelmholtzKind::Four] {
                let a = q.mul(&inv_helmholtz(kind, &f)).unwrap().integrate();
                let b = f.mul(&inv_helmholtz(kind, &q)).unwrap().integrate();
                let scale = f.norms().l2 * q.norms().l2;
                prop_assert!((a - b).abs() <= 1e-10 * scale);
            }
        }
    }
}
