//! Property tests for invariants that hold across the whole parameter
//! space, not just at hand-picked points.

use num_complex::Complex64;
use proptest::prelude::*;

use sgsim::measurement::{outcome_probabilities, Location, Setting, SpinLabel, StateForm};
use sgsim::numerics::{
    gaussian_overlap_analytic, integrate_complex, QuadratureSpec, RngStream,
};
use sgsim::protocol::{parse_records, serialize_records, Format, RunRecord};
use sgsim::wavefunction::{branch_overlap, position_pdf_z, PhysParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_linear(
        alpha_re in -2.0..2.0f64,
        alpha_im in -2.0..2.0f64,
        beta_re in -2.0..2.0f64,
        beta_im in -2.0..2.0f64,
        c1 in -2.0..2.0f64,
        c2 in -2.0..2.0f64,
        w1 in 0.2..2.0f64,
        w2 in 0.2..2.0f64,
    ) {
        let alpha = Complex64::new(alpha_re, alpha_im);
        let beta = Complex64::new(beta_re, beta_im);
        let f = move |z: f64| Complex64::new((-w1 * (z - c1) * (z - c1)).exp(), 0.0);
        let g = move |z: f64| Complex64::new(0.0, (-w2 * (z - c2) * (z - c2)).exp());
        let spec = QuadratureSpec::new(-30.0, 30.0);

        let combined = integrate_complex(|z| alpha * f(z) + beta * g(z), &spec).unwrap();
        let separate = alpha * integrate_complex(f, &spec).unwrap()
            + beta * integrate_complex(g, &spec).unwrap();
        let bound = 2.0 * spec.abs_tol.max(spec.rel_tol * combined.norm());
        prop_assert!((combined - separate).norm() <= bound.max(1e-9));
    }

    #[test]
    fn self_overlap_is_unity(
        c_re in -3.0..3.0f64,
        c_im in -1.0..1.0f64,
        w_re in 0.1..3.0f64,
        w_im in -2.0..2.0f64,
        k in -4.0..4.0f64,
    ) {
        let c = Complex64::new(c_re, c_im);
        let w = Complex64::new(w_re, w_im);
        let ov = gaussian_overlap_analytic(c, c, w, w, k, k).unwrap();
        prop_assert!((ov - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn overlap_respects_cauchy_schwarz(
        c1 in -4.0..4.0f64,
        c2 in -4.0..4.0f64,
        w1_re in 0.1..3.0f64,
        w1_im in -2.0..2.0f64,
        w2_re in 0.1..3.0f64,
        w2_im in -2.0..2.0f64,
        k1 in -5.0..5.0f64,
        k2 in -5.0..5.0f64,
    ) {
        let ov = gaussian_overlap_analytic(
            Complex64::new(c1, 0.0),
            Complex64::new(c2, 0.0),
            Complex64::new(w1_re, w1_im),
            Complex64::new(w2_re, w2_im),
            k1,
            k2,
        ).unwrap();
        prop_assert!(ov.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn rng_streams_replay(seed in any::<u64>(), stream in any::<u64>()) {
        let mut a = RngStream::new(seed, stream);
        let mut b = RngStream::new(seed, stream);
        for _ in 0..100 {
            prop_assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn pdf_parts_sum_and_stay_positive(z in -30.0..30.0f64, t in 0.0..5.0f64) {
        let p = PhysParams::default();
        let triple = position_pdf_z(z, t, &p);
        prop_assert!(triple.up_part >= 0.0);
        prop_assert!(triple.down_part >= 0.0);
        prop_assert!((triple.total - triple.up_part - triple.down_part).abs() < 1e-15);
    }

    #[test]
    fn probabilities_complete_for_all_times(t in 0.0..10.0f64) {
        let p = PhysParams::default();
        for setting in Setting::ALL {
            let sum: f64 = outcome_probabilities(setting, t, &p).iter().map(|(_, q)| q).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
        prop_assert!(branch_overlap(t, &p).norm() <= 1.0 + 1e-12);
    }
}

fn arb_setting() -> impl Strategy<Value = Setting> {
    prop_oneof![
        Just(Setting::PositionZ),
        Just(Setting::SpinZ),
        Just(Setting::SpinX),
        Just(Setting::MomentumZ),
    ]
}

fn arb_record() -> impl Strategy<Value = RunRecord> {
    (
        any::<u64>(),
        arb_setting(),
        any::<bool>(),
        proptest::option::of(-1e6..1e6f64),
        prop_oneof![
            Just(StateForm::PositionEigenstate),
            Just(StateForm::SingleBranchGaussian),
            Just(StateForm::BranchSuperposition),
            Just(StateForm::MomentumEigenstate),
        ],
        prop_oneof![
            Just(SpinLabel::UpZ),
            Just(SpinLabel::DownZ),
            Just(SpinLabel::UpX),
            Just(SpinLabel::DownX),
        ],
        prop_oneof![
            Just(Location::Tokyo),
            Just(Location::Paris),
            Just(Location::Delocalized),
        ],
        any::<u64>(),
    )
        .prop_map(
            |(atom_index, setting, alice_detected, alice_value, bob_form, bob_spin, bob_location, seq)| RunRecord {
                atom_index,
                setting,
                alice_detected,
                alice_value,
                bob_form,
                bob_spin,
                bob_location,
                seq_control: seq,
                seq_result: seq.wrapping_add(1),
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn record_streams_round_trip(records in proptest::collection::vec(arb_record(), 0..20)) {
        for format in [Format::Csv, Format::JsonLines] {
            let bytes = serialize_records(&records, format);
            let back = parse_records(&bytes, format).unwrap();
            prop_assert_eq!(&back, &records);
        }
    }
}
