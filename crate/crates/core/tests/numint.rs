use painleve_algebra::{parse_expr, Scope, Symbol};
use painleve_core::numint::{
    hamiltonian_drift, integrate, integrate_fixed, limit_probe, ode_residual, CompiledFlow, NumError, ParamValues, Trajectory, DEFAULT_EPS,
};
use painleve_core::Catalog;

fn cat() -> Catalog {
    Catalog::bundled().unwrap()
}

fn params(kv: &[(&str, f64)]) -> ParamValues {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// `y`, `y'`, `y''` from central differences of the dense output.
fn jet(traj: &Trajectory, t: f64) -> (f64, f64, f64) {
    let h = 1e-3;
    let y = |s: f64| traj.state_at(s).unwrap()[0];
    let (ym, y0, yp) = (y(t - h), y(t), y(t + h));
    let (ym2, yp2) = (y(t - 2.0 * h), y(t + 2.0 * h));
    let d1 = (ym2 - 8.0 * ym + 8.0 * yp - yp2) / (12.0 * h);
    let d2 = (-ym2 + 16.0 * ym - 30.0 * y0 + 16.0 * yp - yp2) / (12.0 * h * h);
    (y0, d1, d2)
}

#[test]
fn p1_and_p2_solve_their_equations() {
    let cat = cat();
    let p1 = integrate(&cat, "P1", &params(&[]), 0.0, 0.0, 0.0, 1.0, 1e-10).unwrap();
    assert!(!p1.truncated);
    let r = ode_residual(&cat, &p1, &cat.ode("P1").unwrap().rhs, &params(&[])).unwrap();
    assert!(r < 1e-6, "P1 residual {r:e}");

    let p2 = integrate(&cat, "P2", &params(&[("alpha", 0.5)]), 0.1, 0.0, 0.0, 1.0, 1e-10).unwrap();
    let r = ode_residual(&cat, &p2, &cat.ode("P2").unwrap().rhs, &params(&[("alpha", 0.5)])).unwrap();
    assert!(r < 1e-6, "P2 residual {r:e}");
    let wrong = ode_residual(&cat, &p2, &cat.ode("P1").unwrap().rhs, &params(&[])).unwrap();
    assert!(wrong > 1e-2, "P2 against P1 {wrong:e}");
}

#[test]
fn dense_output_satisfies_p1_and_p2_directly() {
    // Hand-written equations, differentiated through the dense output only.
    let cat = cat();
    let p1 = integrate(&cat, "P1", &params(&[]), 0.2, -0.3, 0.0, 1.0, 1e-12).unwrap();
    let p2 = integrate(&cat, "P2", &params(&[("alpha", 0.5)]), 0.1, 0.0, 0.0, 1.0, 1e-12).unwrap();
    for i in 1..20 {
        let t = 0.05 * i as f64;
        let (y, _, ypp) = jet(&p1, t);
        assert!((ypp - (6.0 * y * y + t)).abs() < 1e-5, "P1 at {t}");
        let (y, _, ypp) = jet(&p2, t);
        assert!((ypp - (2.0 * y.powi(3) + t * y + 0.5)).abs() < 1e-5, "P2 at {t}");
    }
}

#[test]
fn p2_solutions_map_to_p34() {
    // y ↦ y² + y' + t/2 sends P2(α) to P34((α + 1/2)²)
    let cat = cat();
    let alpha = 0.3;
    let tr = integrate(&cat, "P2", &params(&[("alpha", alpha)]), 0.4, 0.9, 0.0, 1.2, 1e-12).unwrap();
    let big = |t: f64| {
        let (y, yp, _) = jet(&tr, t);
        y * y + yp + t / 2.0
    };
    let a34 = (alpha + 0.5) * (alpha + 0.5);
    let h = 1e-2;
    for i in 2..10 {
        let t = 0.1 * i as f64;
        let s: Vec<f64> = (-2..=2).map(|k| big(t + k as f64 * h)).collect();
        let y = s[2];
        let d1 = (s[0] - 8.0 * s[1] + 8.0 * s[3] - s[4]) / (12.0 * h);
        let d2 = (-s[0] + 16.0 * s[1] - 30.0 * y + 16.0 * s[3] - s[4]) / (12.0 * h * h);
        let rhs = d1 * d1 / (2.0 * y) + 2.0 * y * y - t * y - a34 / (2.0 * y);
        assert!((d2 - rhs).abs() < 1e-5 * rhs.abs().max(1.0), "t = {t}: {d2} vs {rhs}");
    }
}

#[test]
fn fixed_step_self_convergence() {
    let cat = cat();
    let h = cat.family("P2").unwrap().h.clone();
    let values = [(Symbol::new("alpha"), 0.5)].into_iter().collect();
    let flow = CompiledFlow::new(&h, &values).unwrap();
    let f = |t: f64, u: &[f64; 2]| flow.field(t, u);
    let reference = integrate_fixed(&f, 0.0, [0.1, 0.0], 1.0, 1024);
    for n in [8, 16, 32] {
        let e1 = (integrate_fixed(&f, 0.0, [0.1, 0.0], 1.0, n)[0] - reference[0]).abs();
        let e2 = (integrate_fixed(&f, 0.0, [0.1, 0.0], 1.0, 2 * n)[0] - reference[0]).abs();
        let ratio = e1 / e2;
        assert!((16.0..=64.0).contains(&ratio), "n = {n}: ratio {ratio}");
    }
}

#[test]
fn adaptive_runs_agree_across_tolerances() {
    let cat = cat();
    let a = integrate(&cat, "P1", &params(&[]), 0.0, 0.0, 0.0, 1.0, 1e-10).unwrap();
    let b = integrate(&cat, "P1", &params(&[]), 0.0, 0.0, 0.0, 1.0, 1e-12).unwrap();
    assert!((a.end().y - b.end().y).abs() < 1e-8);
}

#[test]
fn hamiltonian_changes_at_the_rate_of_its_time_derivative() {
    let cat = cat();
    let tr = integrate(&cat, "P2", &params(&[("alpha", 0.5)]), 0.1, 0.0, 0.0, 1.0, 1e-12).unwrap();
    assert!(hamiltonian_drift(&cat, &tr).unwrap() < 1e-6);
}

#[test]
fn preconditions() {
    let cat = cat();
    let p6 = params(&[("theta_0", 0.1), ("theta_1", 0.2), ("theta_t", 0.3), ("kappa_inf", 0.4)]);
    assert!(matches!(
        integrate(&cat, "P6", &p6, 0.3, 0.1, 0.0, 0.5, 1e-10),
        Err(NumError::SingularInterval(..))
    ));
    assert!(matches!(
        integrate(&cat, "P1", &params(&[]), 0.0, 0.0, 0.0, 1.0, 1e-3),
        Err(NumError::BadTolerance(_))
    ));
    let still = integrate(&cat, "P1", &params(&[]), 0.5, 0.25, 0.3, 0.3, 1e-10).unwrap();
    assert_eq!(still.samples.len(), 1);
    assert_eq!((still.end().y, still.end().z), (0.5, 0.25));
}

#[test]
fn p1_reaches_a_pole() {
    let cat = cat();
    let tr = integrate(&cat, "P1", &params(&[]), 0.0, 0.0, 0.0, 10.0, 1e-10).unwrap();
    assert!(tr.truncated);
    assert!(tr.end().t < 10.0);
}

#[test]
fn csv_layout() {
    let cat = cat();
    let tr = integrate(&cat, "P1", &params(&[]), 0.0, 0.0, 0.0, 0.5, 1e-8).unwrap();
    let csv = tr.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,y,z"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 3);
    let mantissa = row[1].split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17);
    assert_eq!(csv.lines().count(), tr.samples.len() + 1);
}

#[test]
fn every_rule_meets_its_order_numerically() {
    let cat = cat();
    for r in &cat.rules {
        let tables = limit_probe(&cat, r, &DEFAULT_EPS, 7).unwrap_or_else(|e| panic!("{}: {e}", r.id));
        for tab in tables {
            for row in &tab.rows {
                assert!(row.passed, "{} {:?} {}: slope {:?} needed {}", r.id, tab.sigma, row.component, row.slope, row.needed);
            }
        }
    }
}

#[test]
fn named_probe_slopes() {
    let cat = cat();
    let slope = |rule: &str, comp: &str| {
        let tabs = limit_probe(&cat, cat.rule(rule).unwrap(), &DEFAULT_EPS, 3).unwrap();
        tabs[0].rows.iter().find(|r| r.component == comp).unwrap().slope
    };
    if let Some(s) = slope("P6_to_P5", "H") {
        assert!(s >= -0.1, "{s}");
    }
    for comp in ["p", "q", "a", "b", "H"] {
        if let Some(s) = slope("P5_to_degP5", comp) {
            assert!(s >= 0.9, "{comp}: {s}");
        }
    }
}

#[test]
fn probe_flags_a_wrong_exponent() {
    let cat = cat();
    let mut rule = cat.rule("P2_to_P1").unwrap().clone();
    let scope = Scope::with_symbols(["eps"]);
    rule.map.insert(Symbol::new("alpha"), parse_expr("4*eps^(-14)", &scope).unwrap());
    let tabs = limit_probe(&cat, &rule, &DEFAULT_EPS, 7).unwrap();
    assert!(tabs.iter().any(|t| !t.passed()));
}

#[test]
fn probe_rejects_bad_eps() {
    let cat = cat();
    let r = cat.rule("P2_to_P1").unwrap();
    for eps in [&[0.1, 0.2][..], &[0.1, 1e-4], &[0.1]] {
        assert_eq!(limit_probe(&cat, r, eps, 1).unwrap_err(), NumError::BadEps);
    }
}

#[test]
fn residual_shrinks_with_tolerance() {
    let cat = cat();
    let pa = params(&[("alpha", 0.5)]);
    let rhs = &cat.ode("P2").unwrap().rhs;
    let coarse = integrate(&cat, "P2", &pa, 0.1, 0.0, 0.0, 1.0, 1e-8).unwrap();
    let fine = integrate(&cat, "P2", &pa, 0.1, 0.0, 0.0, 1.0, 1e-11).unwrap();
    let (rc, rf) = (ode_residual(&cat, &coarse, rhs, &pa).unwrap(), ode_residual(&cat, &fine, rhs, &pa).unwrap());
    assert!(rf > 0.0 && rc > 10.0 * rf, "{rc:e} vs {rf:e}");
}
