use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use tmsv_core::entanglement::{entanglement_entropy, log_negativity, NegativityFormula};
use tmsv_core::fock::*;
use tmsv_core::specfun::{laguerre, LaguerreOrder};
use tmsv_core::states::subtracted_wavefunction;
use tmsv_core::vortexmap::{enclosing_contour, total_charge};
use tmsv_core::wigner::*;

fn phase_point() -> impl Strategy<Value = PhaseSpacePoint4> {
    prop::array::uniform4(-3.0f64..3.0).prop_map(PhaseSpacePoint4::from_array)
}

fn small_state(cutoff: usize) -> impl Strategy<Value = FockState2> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), (cutoff + 1) * (cutoff + 1)).prop_filter_map(
        "nonzero",
        move |v| {
            let mut s = FockState2::zeros(cutoff);
            for (idx, (re, im)) in v.into_iter().enumerate() {
                s.set(idx / (cutoff + 1), idx % (cutoff + 1), Complex64::new(re, im));
            }
            s.normalize().ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wigner_is_bounded(r in 0.0f64..2.5, theta in -PI..PI, k in 0usize..=5, pt in phase_point()) {
        let w = wigner_tmsv(SqueezeParams::new(r, theta).unwrap(), k, &pt);
        prop_assert!(w.abs() <= 4.0 / (PI * PI) + 1e-12);
    }

    #[test]
    fn squeeze_map_invariant(r in 0.0f64..2.5, theta in -PI..PI, pt in phase_point()) {
        let (a, b) = squeeze_map(SqueezeMap { r, theta }, &pt);
        let lhs = a.norm_sqr() - b.norm_sqr();
        let rhs = pt.alpha().norm_sqr() - pt.beta().norm_sqr();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + a.norm_sqr() + b.norm_sqr()));
        let (a0, b0) = squeeze_map(SqueezeMap { r: 0.0, theta }, &pt);
        prop_assert_eq!(a0, pt.alpha());
        prop_assert_eq!(b0, pt.beta());
    }

    #[test]
    fn canonical_commutator(s in small_state(3), mode_b in any::<bool>()) {
        // a a† − a† a = 1 on states that stay below the cutoff
        let mode = if mode_b { Mode::B } else { Mode::A };
        let s = s.padded(4).unwrap();
        let up_down = apply_ladder(&apply_ladder(&s, mode, Ladder::Create, 1).unwrap(), mode, Ladder::Annihilate, 1).unwrap();
        let down_up = apply_ladder(&apply_ladder(&s, mode, Ladder::Annihilate, 1).unwrap(), mode, Ladder::Create, 1).unwrap();
        for (i, v) in s.amplitudes().iter().enumerate() {
            let d = up_down.amplitudes()[i] - down_up.amplitudes()[i] - v;
            prop_assert!(d.norm() < 1e-12);
        }
    }

    #[test]
    fn fidelity_is_a_probability(x in small_state(2), y in small_state(2)) {
        let f = fidelity(&x, &y).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((fidelity(&x, &x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn laguerre_raising_relation(n in 1usize..30, a in 0usize..6, x in 0.0f64..30.0) {
        // L_n^{(a)} = L_n^{(a+1)} − L_{n−1}^{(a+1)}
        let l = laguerre(LaguerreOrder::new(n, a), x).unwrap();
        let r = laguerre(LaguerreOrder::new(n, a + 1), x).unwrap() - laguerre(LaguerreOrder::new(n - 1, a + 1), x).unwrap();
        let scale = 1.0 + l.abs() + (0.5 * x).exp() * 1e-3 * (n as f64 + a as f64).powi(3);
        prop_assert!((l - r).abs() < 1e-10 * scale);
    }

    #[test]
    fn entropy_and_negativity_bounds(raw in prop::collection::vec(0.0f64..1.0, 1..12), ramp in 0.0f64..7.0) {
        let n2: f64 = raw.iter().map(|c| c * c).sum();
        prop_assume!(n2 > 1e-6);
        let c: Vec<f64> = raw.iter().map(|c| c / n2.sqrt()).collect();
        let phases: Vec<f64> = (0..c.len()).map(|m| ramp * m as f64).collect();
        let s = SchmidtState::new(0, c.clone(), phases, true);
        let nonzero = c.iter().filter(|&&x| x > 0.0).count();
        let e = log_negativity(&s, NegativityFormula::SummedAmplitude).unwrap();
        let h = entanglement_entropy(&s).unwrap();
        prop_assert!(e >= 0.0);
        prop_assert!(h <= (nonzero as f64).log2() + 1e-12);
        if nonzero == 1 {
            prop_assert!(e.abs() < 1e-12);
        }
    }

    #[test]
    fn conjugation_negates_charge(r in 0.3f64..1.3, theta in 0.3f64..2.8, k in 1usize..=3) {
        let pg = subtracted_wavefunction(SqueezeParams::new(r, theta).unwrap(), k);
        let c = total_charge(&pg, &enclosing_contour(&pg).unwrap()).unwrap();
        let conj = pg.conj();
        let d = total_charge(&conj, &enclosing_contour(&conj).unwrap()).unwrap();
        prop_assert_eq!(c, -d);
        prop_assert_eq!(c.abs(), k as i32);
    }
}
