mod common;

use painleve_algebra::{parse_expr, RationalExpr, Scope, Subst, Symbol};
use painleve_core::catalog::{vars, ScalingLaw};
use painleve_core::hamilton::{check_scaling, check_solution, check_transform, eliminate, p3_prime_map, specialize, HamiltonError};
use painleve_core::lincheck::Flow;
use painleve_core::Catalog;

fn cat() -> Catalog {
    Catalog::bundled().unwrap()
}

fn expr(s: &str, extra: &[&str]) -> RationalExpr {
    let mut names = vec!["x", "t", "y", "z", "yp"];
    names.extend_from_slice(extra);
    parse_expr(s, &Scope::with_symbols(names)).unwrap()
}

fn sym(s: &str) -> Symbol {
    Symbol::new(s)
}

#[test]
fn every_family_eliminates_to_its_equation() {
    let cat = cat();
    let mut rng = common::rng(21);
    let mut count = 0;
    for f in &cat.families {
        for i in f.instances() {
            let got = eliminate(&Flow::hamiltonian(&i.h), &vars::y()).unwrap();
            let want = specialize(cat.ode(&i.target).unwrap(), &i.param_map).unwrap();
            assert_eq!(got, want, "{}", i.label);
            let syms = common::free_symbols([&i.h, &want]);
            for _ in 0..3 {
                let pt = common::random_point(&syms, &mut rng);
                let r = common::elimination_residual(&i.h, &want, &pt);
                assert!(r < 1e-6, "{}: numeric residual {r:e}", i.label);
            }
        }
        count += 1;
    }
    assert_eq!(count, 17);
}

#[test]
fn sl_families_eliminate_to_their_equations() {
    let cat = cat();
    for f in &cat.sl_families {
        for i in f.instances() {
            let Some(target) = &i.target else { continue };
            let got = eliminate(&Flow::hamiltonian(&i.k), &vars::y()).unwrap();
            let want = specialize(cat.ode(target).unwrap(), &i.param_map).unwrap();
            assert_eq!(got, want, "{}", i.label);
        }
    }
}

#[test]
fn p2_elimination_from_its_hamiltonian() {
    let h = expr("z^2/2 - (y^2 + t/2)*z - (alpha + 1/2)*y", &["alpha"]);
    let f = eliminate(&Flow::hamiltonian(&h), &vars::y()).unwrap();
    assert_eq!(f, expr("2*y^3 + t*y + alpha", &["alpha"]));
}

#[test]
fn printed_p6_and_p5_maps_fail_elimination() {
    let cat = cat();
    for (fam, param, printed) in [("P6", "delta", "(1 - theta)^2/2"), ("P5", "gamma", "-(1 + theta)*eta")] {
        let i = cat.family(fam).unwrap().instances().remove(0);
        let mut map = i.param_map.clone();
        map.insert(sym(param), expr(printed, &["theta", "eta"]));
        let got = eliminate(&Flow::hamiltonian(&i.h), &vars::y()).unwrap();
        let want = specialize(cat.ode(&i.target).unwrap(), &map).unwrap();
        assert_ne!(got, want, "{fam} printed {param}");
    }
}

#[test]
fn equivalence_transforms_hold() {
    let cat = cat();
    assert_eq!(cat.transforms.len(), 13);
    for tr in &cat.transforms {
        check_transform(&cat, tr).unwrap_or_else(|e| panic!("{}: {e}", tr.id));
    }
}

#[test]
fn lemma1_with_wrong_exponent_fails() {
    let cat = cat();
    let mut tr = cat.transform("lemma1").unwrap().clone();
    let alpha = sym("alpha");
    tr.target_spec.insert(alpha, expr("4*beta^3/eps^14", &["beta", "eps"]));
    assert!(matches!(check_transform(&cat, &tr), Err(HamiltonError::ResidualNonzero(_))));
}

#[test]
fn p3_prime_substitution() {
    let cat = cat();
    p3_prime_map(&cat, &expr("t^2", &[])).unwrap();
    assert!(matches!(p3_prime_map(&cat, &expr("t", &[])), Err(HamiltonError::ResidualNonzero(_))));
}

#[test]
fn scaling_laws_hold() {
    let cat = cat();
    assert_eq!(cat.scalings.len(), 4);
    for law in &cat.scalings {
        check_scaling(&cat, law).unwrap_or_else(|e| panic!("{}: {e}", law.id));
    }
}

#[test]
fn p6_is_not_covariant_under_time_scaling() {
    let cat = cat();
    let c = sym("c");
    let law = ScalingLaw {
        id: "p6_scale".into(),
        ode: "P6".into(),
        params: vec![c.clone()],
        ode_spec: Subst::new(),
        map: [(vars::t(), &RationalExpr::var(&c) * &RationalExpr::var(&vars::t()))].into_iter().collect(),
        expect: Subst::new(),
        covariant: false,
    };
    assert!(matches!(check_scaling(&cat, &law), Err(HamiltonError::NotCovariant(_))));
}

#[test]
fn wrong_scaling_expectation_is_reported() {
    let cat = cat();
    let mut law = cat.scalings.iter().find(|s| s.id == "P5_scale").unwrap().clone();
    law.expect.insert(sym("delta"), expr("c*delta", &["c", "delta"]));
    assert!(matches!(check_scaling(&cat, &law), Err(HamiltonError::ScalingMismatch { .. })));
}

#[test]
fn particular_solution_of_p4_34() {
    let cat = cat();
    let s = &cat.solutions[0];
    let ode = cat.ode(&s.ode).unwrap();
    check_solution(ode, &s.ode_spec, &s.y).unwrap();
    let off = &s.y + &RationalExpr::var(&vars::t());
    assert!(check_solution(ode, &s.ode_spec, &off).is_err());
}
