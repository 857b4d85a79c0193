use std::collections::BTreeMap;

use painleve_algebra::{parse_expr, Scope, Symbol};
use painleve_core::degeneration::{
    apply_alternative, apply_rule, diagram_closure, family_types, rule_signs, verify_rule, DegenerationError, EXPECTED_ARROWS, EXPECTED_TYPES,
};
use painleve_core::Catalog;

fn cat() -> Catalog {
    Catalog::bundled().unwrap()
}

#[test]
fn all_rules_pass() {
    let cat = cat();
    assert_eq!(cat.rules.len(), 21);
    let algebraic = cat.rules.iter().filter(|r| r.algebraic).count();
    assert_eq!((cat.rules.len() - algebraic, algebraic), (17, 4));
    for r in &cat.rules {
        let reports = verify_rule(&cat, r).unwrap_or_else(|e| panic!("{e}"));
        for rep in reports {
            assert!(rep.passed(), "{} {:?}", r.id, rep.sigma);
            if r.algebraic {
                assert!(rep.components.iter().all(|c| c.valuation.is_none()), "{} not exact", r.id);
            }
        }
    }
}

#[test]
fn p2_to_p1_hamiltonian_vicinity_terms() {
    let cat = cat();
    let rule = cat.rule("P2_to_P1").unwrap();
    let rep = apply_rule(&cat, rule, None).unwrap();
    let h = rep.components.iter().find(|c| c.component == "H").unwrap();
    assert!(h.passed);
    assert!(h.valuation.map_or(true, |v| v >= 1));
    // without the ε⁻⁵/2 term the difference is of order ε⁻⁵
    let mut bad = rule.clone();
    let scope = Scope::with_symbols(["t", "Ht", "eps"]);
    bad.ham_target = parse_expr("Ht/eps^2 - 6*eps^(-20) + t/eps^8", &scope).unwrap();
    let rep = apply_rule(&cat, &bad, None).unwrap();
    let h = rep.components.iter().find(|c| c.component == "H").unwrap();
    assert_eq!(h.valuation, Some(-5));
    assert!(!h.passed);
}

#[test]
fn rejected_readings_fail() {
    let cat = cat();
    let mut seen = 0;
    for r in &cat.rules {
        for s in rule_signs(r) {
            let Some(rep) = apply_alternative(&cat, r, s) else { continue };
            let rep = rep.unwrap_or_else(|e| panic!("{}: {e}", r.id));
            assert!(!rep.passed(), "alternative of {} {:?} passes", r.id, s);
            seen += 1;
        }
    }
    assert!(seen >= 5, "{seen}");
}

#[test]
fn wrong_eps_exponent_is_caught() {
    let cat = cat();
    let mut rule = cat.rule("P2_to_P1").unwrap().clone();
    let scope = Scope::with_symbols(["eps"]);
    rule.map.insert(Symbol::new("alpha"), parse_expr("4*eps^(-14)", &scope).unwrap());
    match verify_rule(&cat, &rule) {
        Err(DegenerationError::ValuationTooLow { rule, component, needed, .. }) => {
            assert_eq!(rule, "P2_to_P1");
            assert_eq!(needed, 1);
            assert!(["p", "q", "a", "b", "H"].contains(&component.as_str()));
        }
        other => panic!("expected a valuation failure, got {other:?}"),
    }
}

#[test]
fn family_types_match_the_diagram() {
    let cat = cat();
    let types = family_types(&cat).unwrap();
    let expected: BTreeMap<&str, &str> = [
        ("P1", "(7/2)"),
        ("P1_2", "(4)"),
        ("P2", "(4)"),
        ("P34", "(1)(5/2)"),
        ("P3_D6", "(2)^2"),
        ("P3p_D6", "(2)^2"),
        ("P3_D7", "(2)(3/2)"),
        ("P3_D7_2", "(2)(3/2)"),
        ("P3_D8", "(3/2)^2"),
        ("P3p_D7", "(2)(3/2)"),
        ("P3p_D7_2", "(2)(3/2)"),
        ("P3p_D8", "(3/2)^2"),
        ("P4", "(1)(3)"),
        ("P4_34", "(1)(3)"),
        ("P5", "(1)^2(2)"),
        ("P6", "(1)^4"),
        ("degP5", "(1)^2(3/2)"),
    ]
    .into_iter()
    .collect();
    assert_eq!(types.len(), expected.len());
    for (fam, ty) in &types {
        assert_eq!(ty, expected[fam.as_str()], "{fam}");
    }
    let distinct: std::collections::BTreeSet<&String> = types.values().collect();
    assert_eq!(distinct.len(), 10);
    for t in EXPECTED_TYPES {
        assert!(distinct.iter().any(|d| d.as_str() == t), "{t}");
    }
}

#[test]
fn diagram_closes() {
    let cat = cat();
    let d = diagram_closure(&cat).unwrap();
    assert_eq!(d.types.len(), 10);
    assert_eq!(d.arrows.len(), EXPECTED_ARROWS.len());
    let dot = d.to_dot();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("[label=\"(").count(), 10);
    assert_eq!(dot.matches(" -> ").count(), 14);
}

#[test]
fn removing_a_rule_leaves_an_arrow_missing() {
    let mut cat = cat();
    cat.rules.retain(|r| r.id != "P34_to_P1");
    assert_eq!(
        diagram_closure(&cat).unwrap_err(),
        DegenerationError::MissingArrow("(1)(5/2)".into(), "(7/2)".into())
    );
}

#[test]
fn arrow_outside_the_diagram_is_rejected() {
    let mut cat = cat();
    let r = cat.rules.iter_mut().find(|r| r.id == "P2_to_P1").unwrap();
    r.target = "P6".into();
    assert!(matches!(diagram_closure(&cat), Err(DegenerationError::UnexpectedArrow(..))));
}
