use painleve_algebra::{parse_expr, RationalExpr as E, Scope, Subst, Symbol};
use painleve_core::catalog::vars;
use painleve_core::hamilton::{eliminate, specialize};
use painleve_core::lincheck::{canonical_compat, CompatStatus, Flow, LinearData};
use painleve_core::matrixlab::{
    double_cover_gauge, matrix_signature, residue_at, scalar_reduce_weighted, solve_flow, zero_curvature, Mat2, MatrixError,
};
use painleve_core::Catalog;

fn cat() -> Catalog {
    Catalog::bundled().unwrap()
}

fn expr(s: &str) -> E {
    parse_expr(s, &Scope::with_symbols(["w", "x", "t", "y", "z", "p", "q", "alpha"])).unwrap()
}

#[test]
fn fn_org_zero_curvature_gives_p2() {
    let cat = cat();
    let m = cat.matrix("fn_org").unwrap();
    let flow = solve_flow(&m.a, m.b.as_ref().unwrap(), &m.var, &vars::t(), &m.dynamic).unwrap();
    assert_eq!(flow, vec![(vars::y(), expr("z")), (vars::z(), expr("2*y^3 + t*y + alpha"))]);
    assert!(zero_curvature(&m.a, m.b.as_ref().unwrap(), &m.var, &vars::t(), &flow).is_zero());
}

#[test]
fn fn_org_with_a_perturbed_entry_is_inconsistent() {
    let cat = cat();
    let m = cat.matrix("fn_org").unwrap();
    let mut a = m.a.clone();
    a.0[0][0] = expr("-2*y + (1/2 - alpha - 1)/(2*w)");
    let stated: Vec<(Symbol, E)> = vec![(vars::y(), expr("z")), (vars::z(), expr("2*y^3 + t*y + alpha"))];
    assert!(!zero_curvature(&a, m.b.as_ref().unwrap(), &m.var, &vars::t(), &stated).is_zero());
    match solve_flow(&a, m.b.as_ref().unwrap(), &m.var, &vars::t(), &m.dynamic) {
        Ok(flow) => assert_ne!(flow, stated),
        Err(e) => assert!(matches!(e, MatrixError::Inconsistent(_)), "{e}"),
    }
}

#[test]
fn fn_form_is_compatible_with_p2() {
    let cat = cat();
    let m = cat.matrix("FN").unwrap();
    assert!(zero_curvature(&m.a, m.b.as_ref().unwrap(), &m.var, &vars::t(), &m.flow).is_zero());
}

#[test]
fn double_cover_reproduces_fn() {
    let cat = cat();
    let org = cat.matrix("fn_org").unwrap();
    let rho = vars::rho();
    let r = {
        let rv = E::var(&rho);
        Mat2::new(rv.clone(), rv.clone(), -(&E::one() / &rv), &E::one() / &rv)
    };
    assert_eq!(r.det(), E::int(2));
    let (ax, bx) = double_cover_gauge(&org.a, org.b.as_ref().unwrap(), &org.var, &r, &rho).unwrap();
    let fnm = cat.matrix("FN").unwrap();
    let at: Subst = [(vars::x(), E::var(&rho).pow(2).unwrap())].into_iter().collect();
    assert_eq!(ax, fnm.a.substitute(&at).unwrap());
    assert_eq!(bx, fnm.b.as_ref().unwrap().substitute(&at).unwrap());
}

#[test]
fn singular_gauge_is_rejected() {
    let cat = cat();
    let org = cat.matrix("fn_org").unwrap();
    let rho = vars::rho();
    let rv = E::var(&rho);
    let r = Mat2::new(rv.clone(), rv.clone(), rv.clone(), rv);
    assert_eq!(
        double_cover_gauge(&org.a, org.b.as_ref().unwrap(), &org.var, &r, &rho).unwrap_err(),
        MatrixError::SingularGauge
    );
}

#[test]
fn scalar_reduction_of_fn_pq() {
    let cat = cat();
    let m = cat.matrix("fn_pq").unwrap();
    let w = m.var.clone();
    let d = scalar_reduce_weighted(&m.a, m.b.as_ref().unwrap(), &w, &expr("1/4 - alpha/2")).unwrap();
    let h34 = expr("-q*p^2 + (alpha + 1/2)*p + q^2/2 - t*q/2");
    assert_eq!(d.p, expr("-1/(w - q) + (1/2 - alpha)/w"));
    let p2 = &expr("-w/2 + t/2 + p*q/(w*(w - q))") + &(&h34 / &E::var(&w));
    assert_eq!(d.q, p2);
    assert_eq!(d.a, expr("-w/(w - q)"));
    assert_eq!(d.b, expr("p*q/(w - q)"));
    assert_eq!(residue_at(&d.q, &w, &expr("q")).unwrap(), expr("p"));

    // The reduced system is an isomonodromic deformation along H34.
    let (p, q) = (Symbol::new("p"), Symbol::new("q"));
    let to_x: Subst = [(w.clone(), E::var(&vars::x())), (q.clone(), E::var(&vars::y())), (p.clone(), E::var(&vars::z()))]
        .into_iter()
        .collect();
    let sub = |e: &E| e.substitute(&to_x).unwrap();
    let data = LinearData {
        p: sub(&d.p),
        q: sub(&d.q),
        a: sub(&d.a),
        b: sub(&d.b),
    };
    assert_eq!(canonical_compat(&data, &Flow::hamiltonian(&sub(&h34))).status, CompatStatus::Exact);

    let flow = Flow::hamiltonian_in(&h34, &q, &p);
    let stated: Vec<(Symbol, E)> = m.flow.clone();
    assert_eq!(flow.fields, stated);
}

#[test]
fn eliminating_p_gives_p34() {
    let cat = cat();
    let m = cat.matrix("fn_pq").unwrap();
    let flow = Flow {
        t: vars::t(),
        fields: m.flow.clone(),
    };
    let got = eliminate(&flow, &Symbol::new("q")).unwrap();
    let spec: Subst = [(Symbol::new("alpha"), expr("(alpha + 1/2)^2"))].into_iter().collect();
    assert_eq!(got, specialize(cat.ode("P34").unwrap(), &spec).unwrap());
}

#[test]
fn mj_has_type_four() {
    let cat = cat();
    let mj = cat.matrix("MJ").unwrap();
    assert_eq!(matrix_signature(&mj.a, &mj.var).unwrap().label(), "(4)");
    let fnm = cat.matrix("FN").unwrap();
    assert_eq!(matrix_signature(&fnm.a, &fnm.var).unwrap().label(), "(1)(4)");
}
