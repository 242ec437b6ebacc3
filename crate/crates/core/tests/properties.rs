use dec_sim::blocks::{block_derivative, deadband};
use dec_sim::cli::{parse_config, to_config_string, Experiment, RunConfig};
use dec_sim::model::{validate, ControlParams, PlantParams};
use dec_sim::simulate::{rk4_integrate, DerivativePath};
use dec_sim::stability::{self, characteristic_cubic, cubic_roots, lemma1_check, routh_check, routh_margins};
use dec_sim::statespace::{build_coefficients, closed_loop_derivative, system};
use dec_sim::{Condition, InputSignal, Params, State};
use proptest::prelude::*;

fn gains() -> impl Strategy<Value = (f64, f64)> {
    (-3000.0..500.0, -3000.0..500.0)
}

fn params() -> impl Strategy<Value = Params> {
    (
        (40.0..120.0, 50.0..110.0, 9.0..10.0, 0.7..1.1, 0.0..300.0, 0.0..80.0),
        (gains(), 0.05..1.0, 0.001..0.1, 0.0..0.01),
    )
        .prop_map(|((j, m, g, h, kpp, kdp), ((kp, kd), kg, cl, th))| {
            let plant = PlantParams {
                inertia: j,
                mass: m,
                gravity: g,
                com_height: h,
                passive_stiffness: kpp,
                passive_damping: kdp,
            };
            let ctrl = ControlParams {
                kp,
                kd,
                gravity_fraction: kg,
                leak_rate: cl,
                threshold: th,
                alpha_ref: 0.0,
            };
            validate(plant, ctrl).unwrap()
        })
}

fn state() -> impl Strategy<Value = State> {
    (-1.0..1.0, -5.0..5.0, -1.0..1.0, -0.5..0.5).prop_map(|(a, b, c, d)| State::new(a, b, c, d))
}

proptest! {
    #[test]
    fn deadband_is_odd_lipschitz_and_flat(th in 0.0..0.5f64, u in -2.0..2.0f64, v in -2.0..2.0f64) {
        prop_assert_eq!(deadband(th, -u), -deadband(th, u));
        prop_assert!((deadband(th, u) - deadband(th, v)).abs() <= (u - v).abs() + 1e-15);
        if u.abs() <= th {
            prop_assert_eq!(deadband(th, u), 0.0);
        } else {
            prop_assert!((deadband(th, u).abs() - (u.abs() - th)).abs() <= 1e-15);
            prop_assert_eq!(deadband(th, u).signum(), u.signum());
        }
    }

    #[test]
    fn both_derivative_paths_agree(p in params(), s in state(), u in -0.05..0.05) {
        let a = block_derivative(&p.plant, &p.ctrl, &s, u).to_array();
        let b = closed_loop_derivative(&build_coefficients(&p), &p, &s, u).to_array();
        for (x, y) in a.iter().zip(b) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn config_round_trips_exactly(
        p in params(),
        x0 in state(),
        step in 1e-5..0.1,
        t_end in prop::option::of(1.0..100.0),
        input in prop_oneof![
            Just(InputSignal::Zero),
            (-1.0..1.0).prop_map(InputSignal::Constant),
            (0.0..1.0, 0.1..50.0, -3.0..3.0)
                .prop_map(|(amplitude, omega, phase)| InputSignal::Sinusoid { amplitude, omega, phase }),
        ],
        cond in prop_oneof![Just("1"), Just("2"), Just("3"), Just("custom")],
    ) {
        let cfg = RunConfig {
            params: p,
            step,
            t_end: t_end.filter(|t| *t >= step),
            experiment: Experiment::parse(cond).unwrap(),
            input,
            initial_state: x0,
            sweep_omega: 7.5,
            out: None,
        };
        let back = parse_config(&to_config_string(&cfg)).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn classification_is_invariant_under_positive_scaling((kp, kd) in gains(), k in 0.1..10.0) {
        let m = system(&Params::default().with_gains(kp, kd));
        if let Ok(c) = stability::classify(&m) {
            let margin = routh_margins(&characteristic_cubic(m.coefficients()))
                .iter()
                .fold(f64::INFINITY, |a, b| a.min(b.abs()));
            prop_assume!(margin > 1e-6);
            prop_assert_eq!(stability::classify(&m.scaled(k)), Ok(c));
        }
    }

    #[test]
    fn gain_conditions_make_every_coefficient_positive(p in params()) {
        if lemma1_check(&p).all_hold() {
            let c = characteristic_cubic(&build_coefficients(&p));
            prop_assert!(c.iter().all(|&v| v > 0.0), "{c:?}");
        }
    }

    #[test]
    fn routh_verdict_matches_roots((kp, kd) in gains()) {
        let c = characteristic_cubic(&build_coefficients(&Params::default().with_gains(kp, kd)));
        let margin = routh_margins(&c).iter().fold(f64::INFINITY, |a, b| a.min(b.abs()));
        prop_assume!(margin > 1e-6);
        let roots_left = cubic_roots(&c).iter().all(|z| z.re < 0.0);
        prop_assert_eq!(routh_check(&c), roots_left);
    }

    #[test]
    fn zoh_is_exact_under_step_halving(x0 in state(), u in -0.05..0.05, n in 10usize..200) {
        let m = system(&Params::default());
        let h = 0.01;
        let coarse = stability::zoh_solution(&m, x0, &vec![u; n], h).unwrap();
        let fine = stability::zoh_solution(&m, x0, &vec![u; 2 * n], h / 2.0).unwrap();
        let (a, b) = (coarse.last().to_array(), fine.last().to_array());
        for (x, y) in a.iter().zip(b) {
            prop_assert!((x - y).abs() <= 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn runs_are_bitwise_deterministic(p in params(), x0 in state(), amp in 0.0..0.2) {
        let input = InputSignal::cosine(amp, 10.0);
        let run = || rk4_integrate(DerivativePath::Blocks, &p, x0, &input, 0.5, 1e-3);
        match (run(), run()) {
            (Ok(a), Ok(b)) => prop_assert!(a == b),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false, "outcomes differ"),
        }
    }

    #[test]
    fn level_platform_keeps_estimate_exact(p in params(), a in -0.3..0.3, b in -0.5..0.5) {
        let x0 = State::new(a, b, a, 0.0);
        if let Ok(t) = rk4_integrate(DerivativePath::StateSpace, &p, x0, &InputSignal::Zero, 1.0, 1e-3) {
            for s in &t.states {
                prop_assert!((s.sway_estimate - s.sway).abs() <= 1e-12 * (1.0 + s.sway.abs()));
                prop_assert_eq!(s.platform_tilt, 0.0);
            }
        }
    }
}

#[test]
fn preset_conditions_parse_by_number() {
    for (n, c) in [("1", Condition::LevelFree), ("2", Condition::TiltedFree), ("3", Condition::Sinusoidal)] {
        assert_eq!(Experiment::parse(n), Some(Experiment::Preset(c)));
    }
    assert_eq!(Experiment::parse("4"), None);
}
