mod common;

use std::f64::consts::PI;

use common::{params, rng, subtracted_fock, uniform};
use num_complex::Complex64;
use tmsv_core::fock::{FockState2, SqueezeParams};
use tmsv_core::states::{subtracted_wavefunction, QuadraturePoint};
use tmsv_core::wigner::*;

fn random_point(g: &mut rand_chacha::ChaCha8Rng, half: f64) -> PhaseSpacePoint4 {
    PhaseSpacePoint4::new(uniform(g, half), uniform(g, half), uniform(g, half), uniform(g, half))
}

#[test]
fn closed_form_matches_fock_sum() {
    let mut g = rng(7);
    for &theta in &[PI / 2.0, 0.0, 1.1, -2.3] {
        for &r in &[0.3, 0.8] {
            for k in 0..=3 {
                let p = params(r, theta);
                let state = subtracted_fock(p, k);
                for _ in 0..25 {
                    let pt = random_point(&mut g, 1.5);
                    let a = wigner_tmsv(p, k, &pt);
                    let b = wigner_numeric_oracle(&state, &pt).unwrap();
                    assert!((a - b).abs() < 1e-7, "θ={theta} r={r} k={k} {pt:?}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn oracle_of_vacuum_and_superposition() {
    let vac = FockState2::vacuum(3);
    let pt = PhaseSpacePoint4::new(0.3, -0.4, 0.2, 0.9);
    let expect = 4.0 / (PI * PI) * (-2.0 * (pt.alpha().norm_sqr() + pt.beta().norm_sqr())).exp();
    assert!((wigner_numeric_oracle(&vac, &pt).unwrap() - expect).abs() < 1e-15);

    // (|0,0⟩ + e^{iφ}|1,0⟩)/√2 expands into two diagonal and two cross terms
    let phi = 0.7;
    let mut s = FockState2::zeros(2);
    let h = 0.5f64.sqrt();
    s.set(0, 0, Complex64::new(h, 0.0));
    s.set(1, 0, Complex64::from_polar(h, phi));
    let a = pt.alpha().conj();
    let w_b = wigner_fock_single(0, pt.beta());
    let expect = 0.5
        * w_b
        * (wigner_fock_single(0, pt.alpha())
            + wigner_fock_single(1, pt.alpha())
            + 2.0 * (Complex64::from_polar(1.0, phi) * wigner_fock_cross(1, 0, a)).re);
    assert!((wigner_numeric_oracle(&s, &pt).unwrap() - expect).abs() < 1e-14);
}

#[test]
fn single_mode_fock_wigner_integrates_to_one_and_cross_to_zero() {
    // ∫ d²α over the plane: polar Gauss–Legendre in u = |α|², exact angles
    let (u, w) = tmsv_core::quadrature::gauss_legendre_on(80, 0.0, 20.0);
    for n in 0..6 {
        let total: f64 = u
            .iter()
            .zip(&w)
            .map(|(&u, &w)| w * PI * wigner_fock_single(n, Complex64::new(u.sqrt(), 0.0)))
            .sum();
        assert!((total - 1.0).abs() < 1e-8, "n={n}: {total}");
    }
    // cross(0,1) ∝ α*: its angular average vanishes
    let mut total = Complex64::new(0.0, 0.0);
    let m = 64;
    for (&u, &w) in u.iter().zip(&w) {
        for j in 0..m {
            let a = Complex64::from_polar(u.sqrt(), 2.0 * PI * j as f64 / m as f64);
            total += wigner_fock_cross(0, 1, a) * (w * PI / m as f64);
        }
    }
    assert!(total.norm() < 1e-8);
}

#[test]
fn squeeze_map_preserves_bogoliubov_invariant() {
    let mut g = rng(11);
    for _ in 0..100 {
        let map = SqueezeMap { r: uniform(&mut g, 2.5).abs(), theta: uniform(&mut g, PI) };
        let pt = random_point(&mut g, 3.0);
        let (a, b) = squeeze_map(map, &pt);
        let lhs = a.norm_sqr() - b.norm_sqr();
        let rhs = pt.alpha().norm_sqr() - pt.beta().norm_sqr();
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + a.norm_sqr()), "{lhs} vs {rhs}");
    }
}

#[test]
fn bounded_by_peak() {
    let mut g = rng(3);
    let bound = 4.0 / (PI * PI) + 1e-12;
    for k in 0..=5 {
        for &r in &[0.0, 0.7, 1.6, 2.5] {
            let p = params(r, 0.9);
            for _ in 0..200 {
                let w = wigner_tmsv(p, k, &random_point(&mut g, 3.0));
                assert!(w.abs() <= bound);
            }
        }
    }
}

#[test]
fn normalization_and_marginals() {
    for k in 0..=3 {
        for &r in &[0.0, 0.4, 0.8, 1.2] {
            let p = params(r, PI / 2.0);
            let n = normalization_integral(p, k, 1e-8).unwrap();
            assert!((n - 1.0).abs() < 1e-6, "k={k} r={r}: {n}");
        }
    }
    // position units here are the wavefunction's divided by √2
    let s2 = 2f64.sqrt();
    for k in 0..=3 {
        let p = params(0.8, PI / 2.0);
        let psi = subtracted_wavefunction(p, k).normalized().unwrap();
        for i in 0..11 {
            for j in 0..11 {
                let (x, y) = (-1.5 + 0.3 * i as f64, -1.5 + 0.3 * j as f64);
                let m = position_marginal(p, k, x, y).unwrap();
                let d = 2.0 * psi.evaluate(QuadraturePoint::new(s2 * x, s2 * y)).norm_sqr();
                assert!((m - d).abs() < 1e-6, "k={k} ({x},{y}): {m} vs {d}");
            }
        }
    }
}

fn delta(p: SqueezeParams, k: usize) -> f64 {
    negativity_volume(p, k, NegativityDomain::phase_space()).unwrap().negative_volume
}

#[test]
fn negativity_volume_values() {
    assert_eq!(delta(params(0.9, 0.4), 0), 0.0);
    let single = 2.0 * (-0.5f64).exp() - 1.0;
    for &r in &[0.0, 0.4, 0.8] {
        let d = delta(params(r, PI / 2.0), 1);
        assert!((d - single).abs() < 1e-4, "r={r}: {d}");
    }
    for k in 2..=4 {
        let d0 = delta(params(0.0, 0.0), k);
        let d1 = delta(params(1.3, 0.6), k);
        assert!(d0 > 0.0 && (d0 - d1).abs() < 1e-6, "k={k}: {d0} vs {d1}");
    }
}

#[test]
fn xpy_fringes_are_bounded_by_order() {
    let grid = tmsv_core::grid::GridSpec::square(4.0, 201).unwrap();
    let spec = WignerSliceSpec::new(SlicePlane::XPy, grid);
    for &r in &[1.5, 2.1, 2.5, 3.5] {
        let f = slice_field(params(r, PI / 2.0), 4, &spec).unwrap();
        assert!((f.get(100, 100) - 4.0 / (PI * PI)).abs() < 1e-12);
        let (n, _) = converged_fringe_count(params(r, PI / 2.0), 4, &spec).unwrap();
        assert!(n <= 4, "r={r}: {n}");
    }
    let f = slice_field(params(2.1, PI / 2.0), 0, &spec).unwrap();
    assert_eq!(fringe_count(&f, FRINGE_THRESHOLD), 0);
}
