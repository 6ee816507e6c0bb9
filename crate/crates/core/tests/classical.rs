use std::f64::consts::PI;

use isocurve::integrator::{integrate, uniform_times, Sample};
use isocurve::verify::{closed_form_vs_integrator, ClassicalCase};
use isocurve::{
    ClassicalSetup, ClosedFormTrajectory, DynamicalState, IntegratorConfig, ModelParams, RegimeTag,
};

fn sphere() -> ModelParams {
    ModelParams::new(1.0, 2.0, 1.0).unwrap()
}

fn start_state(cf: &ClosedFormTrajectory, t: f64) -> DynamicalState {
    let st = cf.state_at(t);
    DynamicalState {
        t,
        r: st.r,
        v: st.dr_dt,
        phi: st.phi,
    }
}

fn run(setup: &ClassicalSetup, t_end: f64, samples: usize) -> (ClosedFormTrajectory, Vec<Sample>) {
    let cf = ClosedFormTrajectory::new(*setup).unwrap();
    let out = integrate(
        setup,
        start_state(&cf, 0.0),
        &uniform_times(0.0, t_end, samples),
        &IntegratorConfig::default(),
    )
    .unwrap();
    (cf, out)
}

#[test]
fn unit_angular_momentum_at_quoted_energy_is_forbidden() {
    // V_min for J = 1 is ½√2(4 − √2) ≈ 1.828, above 1.75.
    let s = ClassicalSetup::from_energy(sphere(), 1.0, 1.75).unwrap();
    assert_eq!(s.classify().regime.tag(), RegimeTag::Forbidden);
    let v_min = sphere().effective_minimum(1.0).unwrap().v_min;
    assert!((v_min - 0.5 * 2f64.sqrt() * (4.0 - 2f64.sqrt())).abs() < 1e-15);
}

#[test]
fn integrator_matches_closed_form_in_every_regime() {
    for (j, e) in [(0.0, 1.75), (1.0, 1.9), (0.0, 3.0), (1.0, 3.0), (0.0, 2.0), (1.0, 2.0)] {
        let setup = ClassicalSetup::from_energy(sphere(), j, e).unwrap();
        let case = ClassicalCase::new(setup, 5.0).unwrap();
        let dev = closed_form_vs_integrator(&case, 1000, 1e-10).unwrap();
        assert!(dev.absolute < 1e-6, "J={j} E={e}: {dev:?}");
    }
}

#[test]
fn integrated_angle_matches_closed_form() {
    for (j, e) in [(1.0, 1.9), (-1.0, 1.9), (1.0, 3.0), (2.0, 2.0)] {
        let setup = ClassicalSetup::from_energy(sphere(), j, e).unwrap();
        if setup.classify().regime.tag() == RegimeTag::Forbidden {
            continue;
        }
        let case = ClassicalCase::new(setup, 5.0).unwrap();
        let (cf, out) = run(&case.setup, case.t_end, 400);
        for s in &out {
            assert!(
                (s.state.phi - cf.phi_at(s.state.t)).abs() < 1e-6,
                "J={j} E={e} t={}",
                s.state.t
            );
            assert!((s.angular_momentum - j).abs() < 1e-12 * j.abs().max(1.0));
        }
    }
}

#[test]
fn energy_is_conserved_over_ten_periods() {
    for (p, j, e) in [
        (sphere(), 0.0, 1.75),
        (sphere(), 1.0, 1.9),
        (ModelParams::new(-1.0, 2f64.sqrt(), 1.0).unwrap(), 1.0, 6.0),
    ] {
        let setup = ClassicalSetup::from_energy(p, j, e).unwrap();
        let period = ClosedFormTrajectory::new(setup).unwrap().period().unwrap();
        let (_, out) = run(&setup, 10.0 * period, 2001);
        let e0 = out[0].energy;
        let worst = out
            .iter()
            .map(|s| ((s.energy - e0) / e0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "drift {worst}");
    }
}

#[test]
fn forward_then_backward_returns_to_start() {
    let setup = ClassicalSetup::from_energy(sphere(), 1.0, 1.9).unwrap();
    let cf = ClosedFormTrajectory::new(setup).unwrap();
    let t_end = 3.0 * cf.period().unwrap();
    let start = start_state(&cf, 0.0);
    let config = IntegratorConfig::default();
    let forward = integrate(&setup, start, &[t_end], &config).unwrap()[0].state;
    let one_way = (forward.r * forward.r - cf.r_squared_at(t_end)).abs();
    let back = integrate(&setup, forward, &[0.0], &config).unwrap()[0].state;
    let round_trip = (back.r - start.r)
        .abs()
        .max((back.v - start.v).abs())
        .max((back.phi - start.phi).abs());
    assert!(round_trip <= 10.0 * one_way.max(1e-13), "{round_trip} vs {one_way}");
}

#[test]
fn fixed_step_rk4_converges_at_fourth_order() {
    let setup = ClassicalSetup::from_energy(sphere(), 1.0, 1.9).unwrap();
    let cf = ClosedFormTrajectory::new(setup).unwrap();
    let t_end = cf.period().unwrap();
    let exact = cf.r_squared_at(t_end);
    let err = |step: f64| {
        let config = IntegratorConfig {
            method: isocurve::Method::FixedRk4 { step },
            ..IntegratorConfig::default()
        };
        let s = integrate(&setup, start_state(&cf, 0.0), &[t_end], &config).unwrap()[0].state;
        (s.r * s.r - exact).abs()
    };
    let ratio = err(0.02) / err(0.01);
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn hyperbolic_orbits_stay_inside_the_disk() {
    let p = ModelParams::new(-1.0, 3.0, 0.5).unwrap();
    for (j, de) in [(0.0, 0.5), (1.0, 5.0), (2.0, 100.0)] {
        let e = p.effective_minimum(j).unwrap().v_min + de;
        let setup = ClassicalSetup::from_energy(p, j, e).unwrap();
        let cf = ClosedFormTrajectory::new(setup).unwrap();
        let period = cf.period().unwrap();
        let max_u = uniform_times(0.0, period, 1000)
            .iter()
            .map(|&t| cf.r_squared_at(t))
            .fold(0.0, f64::max);
        assert!(max_u < 1.0, "J={j}: {max_u}");
        let (_, out) = run(&setup, period, 200);
        assert!(out.iter().all(|s| s.state.r * s.state.r < 1.0));
    }
}

#[test]
fn samples_stay_in_the_stated_range() {
    let cases = [
        (sphere(), 1.0, 1.9, 0.3),
        (sphere(), 0.0, 3.0, -2.0),
        (sphere(), 1.0, 2.0, -1.0),
        (ModelParams::new(-1.0, 2f64.sqrt(), 1.0).unwrap(), 1.0, 8.0, 1.1),
    ];
    for (p, j, e, phase) in cases {
        let setup = ClassicalSetup::from_energy(p, j, e).unwrap().with_phase(phase);
        let cf = ClosedFormTrajectory::new(setup).unwrap();
        let (lo, hi) = cf.r_squared_range();
        for t in uniform_times(0.0, 5.0, 1000) {
            let u = cf.r_squared_at(t);
            assert!(u >= lo - 1e-12 && u <= hi + 1e-12, "u = {u} outside [{lo}, {hi}]");
        }
    }
}

#[test]
fn bounded_orbits_repeat_with_constant_apsidal_advance() {
    let setup = ClassicalSetup::from_energy(sphere(), 1.0, 1.9)
        .unwrap()
        .with_phase(0.4)
        .with_angle_constant(0.2);
    let cf = ClosedFormTrajectory::new(setup).unwrap();
    let period = cf.period().unwrap();
    let advance = cf.apsidal_advance().unwrap();
    for t in uniform_times(-3.0, 7.0, 101) {
        assert!((cf.r_squared_at(t + period) - cf.r_squared_at(t)).abs() < 1e-12);
        assert!((cf.phi_at(t + period) - cf.phi_at(t) - advance).abs() < 1e-12);
    }
    assert!((advance - PI / 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn approach_to_the_limiting_energy() {
    // As E rises towards α²/(2λ) the period lengthens and the outer turning
    // point runs off to infinity.
    let asym = sphere().asymptote();
    let mut last_period = 0.0;
    let mut last_outer = 0.0;
    for gap in [0.2, 0.1, 0.05, 0.01, 0.001] {
        let setup = ClassicalSetup::from_energy(sphere(), 0.0, asym - gap).unwrap();
        let cf = ClosedFormTrajectory::new(setup).unwrap();
        let period = cf.period().unwrap();
        let outer = cf.r_squared_range().1;
        assert!(period > last_period && outer > last_outer);
        last_period = period;
        last_outer = outer;
    }
    // The inner turning point approaches the limiting vertex B = λs²/(α² − λ²s²).
    let limiting = ClosedFormTrajectory::new(ClassicalSetup::from_energy(sphere(), 0.0, asym).unwrap())
        .unwrap()
        .r_squared_range()
        .0;
    let mut last_gap = f64::INFINITY;
    for gap in [0.1, 0.01, 0.001] {
        let setup = ClassicalSetup::from_energy(sphere(), 0.0, asym - gap).unwrap();
        let inner = ClosedFormTrajectory::new(setup).unwrap().r_squared_range().0;
        let d = (inner - limiting).abs();
        assert!(d < last_gap);
        last_gap = d;
    }
    assert!((limiting - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn zero_angular_momentum_keeps_the_angle() {
    let setup = ClassicalSetup::from_energy(sphere(), 0.0, 3.0)
        .unwrap()
        .with_angle_constant(1.25);
    let (cf, out) = run(&setup, 2.0, 50);
    for s in out {
        assert_eq!(cf.phi_at(s.state.t), 1.25);
        assert_eq!(s.state.phi, 1.25);
    }
}
