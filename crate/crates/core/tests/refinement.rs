//! Convergence under N → 2N at fixed continuous data. Kinks and the
//! modulation point sit on nodes of every level, so the sampled data agree.

use peakon_lab::admissible::{Atom, MeasureData};
use peakon_lab::functionals::{energy_e, energy_f};
use peakon_lab::helmholtz::{resolvent_identity_residual, SmoothedField};
use peakon_lab::stability::{analyze_gh, build_g, build_h, modulation_point, quadratic_identity_residual};
use peakon_lab::waves::sample_peakon;
use peakon_lab::{GridFunction, UniformGrid};

const LEVELS: [usize; 4] = [2048, 4096, 8192, 16384];

/// Spacing of the coarsest level, so multiples are nodes everywhere.
const H0: f64 = 60.0 / 2048.0;

fn grid(n: usize) -> UniformGrid {
    UniformGrid::new(30.0, n).unwrap()
}

fn assert_order(name: &str, errors: &[f64], min_ratio: f64) {
    for w in errors.windows(2) {
        assert!(w[0] / w[1] >= min_ratio, "{name}: {errors:?}");
    }
}

/// Peakon at 0 with a symmetric pair of atoms and a symmetric density, so
/// `v` is even and its maximum sits at the node `x = 0`.
fn symmetric_data(n: usize) -> GridFunction {
    let g = grid(n);
    let d = 40.0 * H0;
    let density =
        GridFunction::from_fn(g, |x| 0.01 * ((-(x - 2.0).powi(2) / 0.5).exp() + (-(x + 2.0).powi(2) / 0.5).exp()));
    let atoms = vec![Atom::new(0.0, 2.0), Atom::new(d, 0.01), Atom::new(-d, 0.01)];
    MeasureData::new(g, atoms, Some(density)).unwrap().synthesize_u().unwrap()
}

#[test]
fn peakon_energies_converge_at_second_order() {
    let (mut e, mut f) = (Vec::new(), Vec::new());
    for n in LEVELS {
        let u = sample_peakon(&grid(n), 1.0, 0.0);
        e.push((energy_e(&u).primary - 1.0 / 3.0).abs());
        f.push((energy_f(&u).primary - 2.0 / 3.0).abs());
    }
    assert_order("E", &e, 3.9);
    assert_order("F", &f, 3.9);
}

#[test]
fn quadratic_identity_converges() {
    let errors: Vec<f64> = LEVELS
        .iter()
        .map(|&n| quadratic_identity_residual(&sample_peakon(&grid(n), 1.3, 20.0 * H0), 1.3, -13.0 * H0).unwrap())
        .collect();
    assert_order("shifted pair", &errors, 3.9);

    let errors: Vec<f64> =
        LEVELS.iter().map(|&n| quadratic_identity_residual(&symmetric_data(n), 1.0, 0.0).unwrap()).collect();
    assert_order("symmetric data", &errors, 3.5);
}

/// Signed `∫g² − (E − 12M²)` and `∫hg² − (F − 144M³)` at `ξ = 0`.
fn signed_gh_residuals(u: &GridFunction) -> (f64, f64) {
    let field = SmoothedField::from_u(u);
    let m = field.v.interpolate(0.0);
    let g = build_g(&field.v, &field.vx, &field.vxx, 0.0);
    let h = build_h(&field.v, &field.vx, &field.vxx, 0.0);
    let g2 = g.mul(&g).unwrap();
    let rg = g2.integrate() - (energy_e(u).primary - 12.0 * m * m);
    let rh = h.mul(&g2).unwrap().integrate() - (energy_f(u).primary - 144.0 * m.powi(3));
    (rg, rh)
}

// The peakon crest contributes an O(h³) term of opposite sign to the O(h²)
// term from the perturbation, so |r| is not monotone on coarse levels. With
// r = Bh² + Ah³ the differences of r/h² halve under refinement.
#[test]
fn g_h_identities_are_second_order() {
    let levels = [2048, 4096, 8192, 16384, 32768];
    let (mut g, mut h) = (Vec::new(), Vec::new());
    for n in levels {
        let u = symmetric_data(n);
        assert!(modulation_point(&u).unwrap().xi.abs() < 1e-9);
        let (rg, rh) = signed_gh_residuals(&u);
        let h2 = grid(n).spacing().powi(2);
        g.push(rg / h2);
        h.push(rh / h2);
        let a = analyze_gh(&u, 0.0).unwrap();
        assert!((a.g_residual - rg.abs()).abs() < 1e-15 && (a.h_residual - rh.abs()).abs() < 1e-15);
    }
    for (name, q) in [("g", &g), ("h", &h)] {
        let d: Vec<f64> = q.windows(2).map(|w| w[1] - w[0]).collect();
        for w in d.windows(2) {
            assert!((w[0] / w[1] - 2.0).abs() < 0.2, "{name}: r/h² = {q:?}");
        }
        assert!(q.iter().all(|x| x.abs() < 1e-2), "{name}: {q:?}");
    }
}

#[test]
fn resolvent_identity_is_exact_at_every_level() {
    for n in LEVELS {
        let u = symmetric_data(n);
        assert!(resolvent_identity_residual(&u) <= 1e-13);
    }
}

// Off-node modulation points keep an O(h²) envelope whose constant depends on
// where ξ falls inside its cell, so successive levels need not shrink.
#[test]
fn off_node_modulation_point_stays_within_second_order_envelope() {
    for n in LEVELS {
        let g = grid(n);
        let atoms = vec![Atom::new(0.0, 2.0), Atom::new(1.0, 0.01)];
        let u = MeasureData::new(g, atoms, None).unwrap().synthesize_u().unwrap();
        let xi = modulation_point(&u).unwrap().xi;
        let a = analyze_gh(&u, xi).unwrap();
        let h2 = g.spacing().powi(2);
        assert!(a.g_residual <= 2e-3 * h2, "{n}: {}", a.g_residual / h2);
        assert!(a.h_residual <= 6e-3 * h2, "{n}: {}", a.h_residual / h2);
    }
}
