use isocurve::oracle::{shooting_check, solve_eigenvalues, GridSpec};
use isocurve::spectrum::{energy_level, enumerate_bound_states, normalize, rayleigh_quotient};
use isocurve::verify::{
    gram_deviation, levels_by_m, normalization_error, oracle_levels, residual_max, truncated_growth,
};
use isocurve::{Error, ModelParams};

fn params(l: f64, a: f64, k: f64) -> ModelParams {
    ModelParams::new(l, a, k).unwrap()
}

fn desk_scale() -> [ModelParams; 4] {
    [
        params(1.0, 2.0, 1.0),
        params(1.0, 6.0, 0.5),
        params(-1.0, 2f64.sqrt(), 1.0),
        params(-1.0, 3.0, 0.5),
    ]
}

#[test]
fn oracle_reproduces_every_admitted_level() {
    for p in desk_scale() {
        let grid = GridSpec::default_for(&p);
        for levels in levels_by_m(&p) {
            for a in oracle_levels(&p, &levels, &grid).unwrap() {
                let tag = format!("{p:?} n_r={} m={}", a.level.n_r, a.level.m);
                assert!(a.matrix_error() < 1e-4, "{tag}: matrix {}", a.matrix_error());
                assert!(a.shooting_error() < 1e-6, "{tag}: shooting {}", a.shooting_error());
                assert!(a.cross_error() < 1e-6, "{tag}: cross {}", a.cross_error());
                assert!(a.overlap > 0.99999, "{tag}: overlap {}", a.overlap);
            }
        }
    }
}

#[test]
fn raw_eigenvalue_error_is_second_order() {
    // Three successive halvings of the step.
    for p in [params(-1.0, 2f64.sqrt(), 1.0), params(1.0, 6.0, 0.5)] {
        let level = energy_level(&p, 0, 1);
        let base = GridSpec::default_for(&p);
        let errors: Vec<f64> = [1250, 2500, 5000, 10_000]
            .iter()
            .map(|&n| {
                let mut g = base.with_points(n);
                g.refinement_tol = 1.0;
                let s = solve_eigenvalues(&p, level.mu, 1, &g).unwrap();
                (s[0].convergence.raw_eigenvalue - level.energy).abs()
            })
            .collect();
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.8..4.2).contains(&ratio), "{p:?}: ratios from {errors:?}");
        }
    }
}

#[test]
fn oracle_solution_has_the_expected_shape() {
    let p = params(-1.0, 2f64.sqrt(), 1.0);
    let sols = solve_eigenvalues(&p, 1.0, 2, &GridSpec::default_for(&p)).unwrap();
    assert_eq!(sols.len(), 2);
    for s in &sols {
        assert!(s.grid.windows(2).all(|w| w[1] > w[0]));
        assert!(*s.grid.last().unwrap() < 1.0);
        assert_eq!(s.values.len(), s.grid.len());
        let norm: f64 = s.values.iter().zip(&s.weights).map(|(v, w)| v * v * w).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
    // The ground state has no node, the first excitation one.
    let sign_changes = |v: &[f64]| v.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    assert_eq!(sign_changes(&sols[0].values), 0);
    assert_eq!(sign_changes(&sols[1].values), 1);
    assert!(sols[0].eigenvalue < sols[1].eigenvalue);
}

#[test]
fn shooting_defect_locates_eigenvalues() {
    for p in [params(1.0, 6.0, 0.5), params(-1.0, 2f64.sqrt(), 1.0)] {
        let level = energy_level(&p, 0, 0);
        assert!(shooting_check(&p, level.mu, level.energy).unwrap().abs() < 1e-6);
        let lo = shooting_check(&p, level.mu, level.energy - 0.1).unwrap();
        let hi = shooting_check(&p, level.mu, level.energy + 0.1).unwrap();
        assert!(lo * hi < 0.0);
        let off = shooting_check(&p, level.mu, level.energy + 0.5).unwrap();
        assert!(off.abs() > 1e-3, "{off}");
    }
    // Close to the continuum the bracket has to stay below the threshold.
    let p = params(1.0, 2.0, 1.0);
    let level = energy_level(&p, 0, 0);
    assert!(shooting_check(&p, 1.0, level.energy).unwrap().abs() < 1e-6);
    let lo = shooting_check(&p, 1.0, level.energy - 0.1).unwrap();
    let hi = shooting_check(&p, 1.0, level.energy + 0.001).unwrap();
    assert!(lo * hi < 0.0);
}

#[test]
fn shooting_above_the_continuum_is_rejected() {
    let p = params(1.0, 2.0, 1.0);
    // threshold α²/(2λ) + λ/8 = 2.125
    assert!(matches!(
        shooting_check(&p, 1.0, 2.2),
        Err(Error::ShootingWindow { .. })
    ));
}

#[test]
fn residuals_vanish_only_at_the_eigenvalue() {
    for p in desk_scale() {
        for levels in levels_by_m(&p) {
            for level in &levels {
                let on = residual_max(&p, level, 0.0).unwrap();
                let off = residual_max(&p, level, 0.1).unwrap();
                assert!(on < 1e-9, "{level:?}: {on}");
                assert!(off >= 1e4 * on, "{level:?}: {off} vs {on}");
            }
        }
    }
}

#[test]
fn same_mu_states_are_orthonormal() {
    for p in desk_scale() {
        for levels in levels_by_m(&p) {
            assert!(gram_deviation(&p, &levels).unwrap() < 1e-8);
            for level in &levels {
                assert!(normalization_error(&p, level).unwrap() < 1e-10);
            }
        }
    }
}

#[test]
fn rayleigh_quotient_reproduces_the_energy() {
    for p in desk_scale() {
        for level in enumerate_bound_states(&p, 2, 2) {
            let q = rayleigh_quotient(&normalize(&p, &level).unwrap());
            assert!(((q - level.energy) / level.energy).abs() < 1e-8, "{level:?}: {q}");
        }
    }
}

#[test]
fn levels_past_the_bound_have_divergent_norms() {
    let p = params(1.0, 2.0, 1.0);
    let admitted = enumerate_bound_states(&p, 5, 5);
    assert_eq!(admitted.len(), 1);
    assert_eq!((admitted[0].n_r, admitted[0].m), (0, 0));
    assert!(normalization_error(&p, &admitted[0]).unwrap() < 1e-10);

    let excluded = energy_level(&p, 0, 1);
    assert!(!excluded.normalizable);
    assert!(matches!(normalize(&p, &excluded), Err(Error::NotNormalizable { .. })));
    let (norms, ratio) = truncated_growth(&p, &excluded, 10.0);
    assert!(norms.windows(2).all(|w| w[1] > w[0]));
    assert!(ratio > 1.5, "{norms:?}");
}

#[test]
fn isotonic_term_switches_off_continuously() {
    let base = params(-1.0, 2f64.sqrt(), 0.0);
    for (n_r, m) in [(0, 1), (1, 2), (2, 1)] {
        let limit = energy_level(&base, n_r, m);
        assert_eq!(limit.mu, m as f64);
        let deltas: Vec<(f64, f64)> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&k| {
                let l = energy_level(&params(-1.0, 2f64.sqrt(), k), n_r, m);
                (l.mu - limit.mu, l.energy - limit.energy)
            })
            .collect();
        for w in deltas.windows(2) {
            // factor 100 in k gives factor 100 in both deltas
            assert!(((w[0].0 / w[1].0) / 100.0 - 1.0).abs() < 1e-2, "{deltas:?}");
            assert!(((w[0].1 / w[1].1) / 100.0 - 1.0).abs() < 1e-2, "{deltas:?}");
        }
    }
    // m = 0: μ = √k, so the energy shift divided by √k tends to dE/dn at
    // n = 0, which is β − λ/2.
    let limit = energy_level(&base, 0, 0);
    assert_eq!(limit.mu, 0.0);
    let slope = base.beta() - 0.5 * base.lambda();
    let mut last = f64::INFINITY;
    for k in [1e-2, 1e-4, 1e-6] {
        let level = energy_level(&params(-1.0, 2f64.sqrt(), k), 0, 0);
        assert_eq!(level.mu, k.sqrt());
        let gap = ((level.energy - limit.energy) / k.sqrt() - slope).abs();
        assert!(gap < last);
        last = gap;
    }
    assert!(last < 1e-3);
}

#[test]
fn oracle_agrees_near_zero_isotonic_coupling() {
    for k in [1e-2, 1e-4, 1e-6] {
        let p = params(-1.0, 2f64.sqrt(), k);
        let level = energy_level(&p, 0, 1);
        let s = solve_eigenvalues(&p, level.mu, 1, &GridSpec::default_for(&p)).unwrap();
        assert!(((s[0].eigenvalue - level.energy) / level.energy).abs() < 1e-6);
    }
}

#[test]
fn requesting_past_the_bound_sector_fails() {
    let p = params(1.0, 2.0, 1.0);
    let err = solve_eigenvalues(&p, 1.0, 2, &GridSpec::default_for(&p)).unwrap_err();
    assert!(matches!(err, Error::BeyondBoundSector { available: 1, .. }));
}
