mod common;

use std::f64::consts::PI;

use common::{flat, trig, wavy};
use ikwave_core::diagnostics::*;
use ikwave_core::evolution::{construct_initial_data, run_simulation, NullSink};
use ikwave_core::field::inner_sum;
use ikwave_core::operators::{apply_l_matrix, DepthField, SolverOptions};
use ikwave_core::scenario::preset;
use ikwave_core::{Field, IkError, Model, State};
use proptest::prelude::*;

fn random_state(m: &Model, ce: &[(f64, f64)], cphi: &[Vec<(f64, f64)>]) -> State {
    let mut s = State::rest(m);
    s.eta = trig(&m.grid, ce).scale(0.1);
    s.phi = cphi.iter().map(|c| trig(&m.grid, c)).collect();
    s
}

fn coeff_list(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, 0.0f64..2.0 * PI), len)
}

#[test]
fn energy_of_simple_states() {
    let m = flat(&[0, 2], 64);
    assert_eq!(energy(&m, &State::rest(&m)).unwrap(), 0.0);
    let a = 0.03;
    let mut s = State::rest(&m);
    s.eta = Field::from_fn(&m.grid, |x, _| a * (2.0 * x).cos());
    let l = 2.0 * PI;
    let want = 0.5 * m.rho * m.g * a * a * l / 2.0;
    assert!((energy(&m, &s).unwrap() - want).abs() <= 1e-12 * want);
}

#[test]
fn residuals_of_compatible_and_rest_states() {
    let m = wavy(&[0, 1, 2], 128, 0.3);
    let rest = residuals(&m, &State::rest(&m)).unwrap();
    assert!(rest.r.iter().chain(&rest.r_tilde).all(|f| f.max_abs() == 0.0));

    let eta = trig(&m.grid, &[(0.05, 0.0), (0.02, 1.0)]);
    let surf = trig(&m.grid, &[(0.3, 0.5), (0.1, 2.0), (0.05, 0.1)]);
    let tol = 1e-10;
    let (s, _) = construct_initial_data(&m, eta, &surf, tol).unwrap();
    let res = residuals(&m, &s).unwrap();
    let snorm = surf.l2_norm();
    let depth = DepthField::from_state(&m, &s).unwrap();
    for (i, rt) in res.r_tilde.iter().enumerate() {
        assert!(rt.l2_norm() <= tol * snorm, "R~_{}: {:e}", i + 1, rt.l2_norm());
    }
    for (i, r) in res.r.iter().enumerate() {
        let hmax = depth.pow(m.p.as_slice()[i]).max();
        assert!(r.l2_norm() <= 10.0 * tol * snorm * hmax.max(1.0));
    }
}

#[test]
fn incompatible_data_keeps_the_identities() {
    let m = wavy(&[0, 2], 64, 0.2);
    let eta = trig(&m.grid, &[(0.05, 0.0)]);
    let surf = trig(&m.grid, &[(0.2, 0.5), (0.1, 1.0)]);
    let (mut s, _) = construct_initial_data(&m, eta, &surf, 1e-10).unwrap();
    s.phi[1] = &s.phi[1] + &trig(&m.grid, &[(0.0, 0.0), (0.01, 0.3)]);
    let res = residuals(&m, &s).unwrap();
    assert!(res.r_tilde[0].l2_norm() > 1e-4);
    let depth = DepthField::from_state(&m, &s).unwrap();
    let lhs = &res.r_tilde[0];
    let rhs = &(depth.pow(2) * &res.r[0]) - &res.r[1];
    assert!((lhs - &rhs).max_abs() <= 1e-9 * lhs.max_abs());
    assert!(res.tilde_identity_defect <= IDENTITY_TOL);
    assert!(res.q_identity_defect <= IDENTITY_TOL);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn energy_matches_operator_form(
        ce in coeff_list(3),
        cphi in prop::collection::vec(coeff_list(5), 3),
        amp in 0.0f64..0.4,
    ) {
        let m = wavy(&[0, 1, 2], 128, amp);
        let s = random_state(&m, &ce, &cphi);
        let d = DepthField::from_state(&m, &s).unwrap();
        let form = inner_sum(&apply_l_matrix(&m, &d, &s.phi), &s.phi);
        let want = 0.5 * m.rho * (form + m.g * s.eta.inner(&s.eta));
        let e = energy(&m, &s).unwrap();
        prop_assert!(e >= 0.0);
        prop_assert!((e - want).abs() <= 1e-8 * want, "{e} vs {want}");
    }

    #[test]
    fn residual_identities_hold_for_any_state(
        ce in coeff_list(3),
        cphi in prop::collection::vec(coeff_list(5), 3),
        amp in 0.0f64..0.4,
    ) {
        let m = wavy(&[0, 1, 3], 128, amp);
        let s = random_state(&m, &ce, &cphi);
        let res = residuals(&m, &s).unwrap();
        prop_assert!(res.tilde_identity_defect <= IDENTITY_TOL);
        prop_assert!(res.q_identity_defect <= IDENTITY_TOL);
        let d = DepthField::from_state(&m, &s).unwrap();
        let p = m.p.as_slice();
        for i in 1..p.len() {
            let rhs = &(d.pow(p[i]) * &res.r[0]) - &res.r[i];
            let diff = (&res.r_tilde[i - 1] - &rhs).max_abs();
            prop_assert!(diff <= 1e-9 * (1.0 + res.r_tilde[i - 1].max_abs()));
        }
    }
}

#[test]
fn sign_function_at_rest_is_gravity() {
    let m = wavy(&[0, 1, 2], 32, 0.3);
    let a = sign_condition_a(&m, &State::rest(&m), &SolverOptions::default()).unwrap();
    assert!(a.values().iter().all(|&v| v == m.g));
}

#[test]
fn diagnostics_csv_round_trips() {
    let sc = preset("variable-bottom").unwrap();
    let m = sc.build_model().unwrap();
    let (eta, surf) = sc.initial_fields(&m).unwrap();
    let (s, _) = construct_initial_data(&m, eta, &surf, 1e-10).unwrap();
    let mut cfg = sc.evolution.clone();
    cfg.t_end = 0.2;
    cfg.output_stride = 5;
    let out = run_simulation(&m, &s, &cfg, &mut NullSink).unwrap();
    let mut buf = Vec::new();
    write_csv(&out.series.records, m.n(), &mut buf).unwrap();
    let back = read_csv(&buf[..]).unwrap();
    assert_eq!(back, out.series.records);
    let header = String::from_utf8(buf)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(header.split(',').collect::<Vec<_>>(), csv_header(m.n()));
    assert!(matches!(
        read_csv("t,E\n1,2\n".as_bytes()),
        Err(IkError::Format(_))
    ));
}

#[test]
fn correlation_shift_recovers_translations() {
    let m = flat(&[0, 2], 128);
    let l = 2.0 * PI;
    let a = Field::from_fn(&m.grid, |x, _| (-(x - 2.0).powi(2) * 4.0).exp());
    for s in [0.013, -0.4, 1.7, -2.9] {
        let b = Field::from_fn(&m.grid, |x, _| {
            let mut y = x - s - 2.0;
            y -= l * (y / l).round();
            (-y * y * 4.0).exp()
        });
        let got = correlation_shift(&a, &b, 0);
        assert!((got - s).abs() < 1e-6, "{s}: {got}");
    }
}
