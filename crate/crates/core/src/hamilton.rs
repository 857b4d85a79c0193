//! Elimination of Hamiltonian systems to scalar equations, and exact checks of
//! changes of variables between scalar equations.

use std::collections::HashMap;

use painleve_algebra::{q_frac, AlgebraError, RationalExpr, Subst, Symbol, Q};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::catalog::{vars, Catalog, CatalogError, EquivalenceTransform, ScalarOde, ScalingLaw, TransformKind};
use crate::lincheck::Flow;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HamiltonError {
    #[error("first flow equation of `{0}` is not affine in the other variable")]
    NotAffine(String),
    #[error("residual does not vanish: {0}")]
    ResidualNonzero(String),
    #[error("scaling does not preserve the form of {0}")]
    NotCovariant(String),
    #[error("scaling gives {found} for {param}, expected {expected}")]
    ScalingMismatch {
        param: String,
        found: String,
        expected: String,
    },
    #[error("{0}")]
    Catalog(#[from] CatalogError),
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
}

fn subst(pairs: &[(Symbol, RationalExpr)]) -> Subst {
    pairs.iter().cloned().collect()
}

/// Eliminates the partner of `keep` from a two-dimensional flow.
///
/// Returns `F(yp, y, t)` with `keep'' = F(keep', keep, t)`, written in the
/// symbols `y`, `yp`, `t`.
pub fn eliminate(flow: &Flow, keep: &Symbol) -> Result<RationalExpr, HamiltonError> {
    let (kept, other) = match flow.fields.as_slice() {
        [a, b] if a.0 == *keep => (a, b),
        [a, b] if b.0 == *keep => (b, a),
        _ => return Err(HamiltonError::NotAffine(keep.name().into())),
    };
    let other_sym = &other.0;
    let dk = &kept.1;
    let c1 = dk.diff(other_sym);
    if c1.is_zero() || c1.contains(other_sym) {
        return Err(HamiltonError::NotAffine(keep.name().into()));
    }
    let kp = Symbol::new("__kp");
    let c0 = dk.substitute_one(other_sym, &RationalExpr::zero())?;
    let solved = (&RationalExpr::var(&kp) - &c0).checked_div(&c1)?;
    let second = flow.derivative(dk).substitute_one(other_sym, &solved)?;
    let rename = subst(&[
        (keep.clone(), RationalExpr::var(&vars::y())),
        (kp, RationalExpr::var(&vars::yp())),
    ]);
    Ok(second.substitute(&rename)?)
}

/// `y'' = rhs` with its parameters replaced by `param_map`.
pub fn specialize(ode: &ScalarOde, param_map: &Subst) -> Result<RationalExpr, HamiltonError> {
    Ok(ode.rhs.substitute(param_map)?)
}

fn jet_derivative(f: &RationalExpr, ypp: &RationalExpr) -> RationalExpr {
    let (t, y, yp) = (vars::t(), vars::y(), vars::yp());
    &(&f.diff(&t) + &(&RationalExpr::var(&yp) * &f.diff(&y))) + &(ypp * &f.diff(&yp))
}

/// Equation satisfied by the new `y` when the old `y`, `t` are `m(y, t)`,
/// `tau(t)` and the old `y` solves `y'' = source`.
pub fn pullback(source: &RationalExpr, m: &RationalExpr, tau: &RationalExpr) -> Result<RationalExpr, HamiltonError> {
    let (t, y, yp) = (vars::t(), vars::y(), vars::yp());
    let ypp = Symbol::new("__ypp");
    let yppe = RationalExpr::var(&ypp);
    let dtau = tau.diff(&t);
    let first = jet_derivative(m, &yppe).checked_div(&dtau)?;
    let second = jet_derivative(&first, &yppe).checked_div(&dtau)?;
    let rhs = source.substitute(&subst(&[(t, tau.clone()), (y, m.clone()), (yp, first)]))?;
    let residual = &second - &rhs;
    let coeff = residual.diff(&ypp);
    if coeff.is_zero() || coeff.contains(&ypp) {
        return Err(HamiltonError::ResidualNonzero("pullback is not linear in the second derivative".into()));
    }
    let at0 = residual.substitute_one(&ypp, &RationalExpr::zero())?;
    Ok((-at0).checked_div(&coeff)?)
}

/// Residual of `phi(y, yp, t)` (at new time `tau(t)`) solving `y'' = target`
/// whenever `y` solves `y'' = source`.
pub fn jet_residual(source: &RationalExpr, target: &RationalExpr, phi: &RationalExpr, tau: &RationalExpr) -> Result<RationalExpr, HamiltonError> {
    let t = vars::t();
    let dtau = tau.diff(&t);
    let first = jet_derivative(phi, source).checked_div(&dtau)?;
    let second = jet_derivative(&first, source).checked_div(&dtau)?;
    let rhs = target.substitute(&subst(&[(t, tau.clone()), (vars::y(), phi.clone()), (vars::yp(), first)]))?;
    Ok(&second - &rhs)
}

/// Residual of `phi(y, z, t)` solving `y'' = target` along a flow.
pub fn flow_residual(flow: &Flow, target: &RationalExpr, phi: &RationalExpr, tau: &RationalExpr) -> Result<RationalExpr, HamiltonError> {
    let t = vars::t();
    let dtau = tau.diff(&t);
    let first = flow.derivative(phi).checked_div(&dtau)?;
    let second = flow.derivative(&first).checked_div(&dtau)?;
    let rhs = target.substitute(&subst(&[(t, tau.clone()), (vars::y(), phi.clone()), (vars::yp(), first)]))?;
    Ok(&second - &rhs)
}

fn require_zero(r: RationalExpr) -> Result<(), HamiltonError> {
    if r.is_zero() {
        Ok(())
    } else {
        Err(HamiltonError::ResidualNonzero(r.render()))
    }
}

fn rhs_of(cat: &Catalog, id: &str, spec: &Subst) -> Result<(RationalExpr, Option<RationalExpr>), HamiltonError> {
    if let Ok(ode) = cat.ode(id) {
        return Ok((specialize(ode, spec)?, None));
    }
    let fam = cat.family(id)?;
    Ok((RationalExpr::zero(), Some(fam.h.substitute(spec)?)))
}

/// Runs one catalog transform and returns `Ok(())` when its identity holds.
pub fn check_transform(cat: &Catalog, tr: &EquivalenceTransform) -> Result<(), HamiltonError> {
    let t = RationalExpr::var(&vars::t());
    let tau = tr.map.get(&vars::t()).cloned().unwrap_or(t);
    let y_img = || {
        tr.map
            .get(&vars::y())
            .cloned()
            .ok_or_else(|| HamiltonError::Catalog(CatalogError::UnknownId(format!("{}: map.y", tr.id))))
    };
    match tr.kind {
        TransformKind::Pullback => {
            let (src, _) = rhs_of(cat, &tr.source, &tr.source_spec)?;
            let (tgt, _) = rhs_of(cat, &tr.target, &tr.target_spec)?;
            let pulled = pullback(&src, &y_img()?, &tau)?;
            require_zero(&pulled - &tgt)
        }
        TransformKind::Jet => {
            let (src, _) = rhs_of(cat, &tr.source, &tr.source_spec)?;
            let (tgt, _) = rhs_of(cat, &tr.target, &tr.target_spec)?;
            require_zero(jet_residual(&src, &tgt, &y_img()?, &tau)?)
        }
        TransformKind::Flow => {
            let h = match &tr.hamiltonian {
                Some(h) => h.clone(),
                None => rhs_of(cat, &tr.source, &tr.source_spec)?
                    .1
                    .ok_or_else(|| CatalogError::UnknownId(tr.source.clone()))?,
            };
            let flow = Flow::hamiltonian(&h);
            let (tgt, _) = rhs_of(cat, &tr.target, &tr.target_spec)?;
            require_zero(flow_residual(&flow, &tgt, &y_img()?, &tau)?)
        }
        TransformKind::Hamiltonian => {
            let src = cat.family(&tr.source)?;
            let tgt = cat.family(&tr.target)?;
            let hs = src.h.substitute(&tr.map)?;
            let ht = tgt.h.substitute(&tr.target_spec)?;
            let m = subst(&[(Symbol::new("Hs"), hs), (Symbol::new("Ht"), ht)]);
            let lhs = tr.ham_source.clone().unwrap_or_else(|| RationalExpr::var(&Symbol::new("Hs")));
            let rhs = tr.ham_target.clone().unwrap_or_else(|| RationalExpr::var(&Symbol::new("Ht")));
            require_zero(&lhs.substitute(&m)? - &rhs.substitute(&m)?)
        }
    }
}

/// The map `x = t^2`, `q = t y` from the third equation to its primed form.
pub fn p3_prime_map(cat: &Catalog, tau: &RationalExpr) -> Result<(), HamiltonError> {
    let src = cat.ode("P3")?;
    let tgt = cat.ode("P3p")?;
    let phi = &RationalExpr::var(&vars::t()) * &RationalExpr::var(&vars::y());
    require_zero(jet_residual(&src.rhs, &tgt.rhs, &phi, tau)?)
}

/// Verifies a scaling law: pulls the equation back, solves for the induced
/// parameters and compares them with the expected ones.
pub fn check_scaling(cat: &Catalog, law: &ScalingLaw) -> Result<Subst, HamiltonError> {
    let base = cat.ode(&law.ode)?;
    let ode = &ScalarOde {
        id: base.id.clone(),
        params: base.params.iter().filter(|p| !law.ode_spec.contains_key(*p)).cloned().collect(),
        rhs: base.rhs.substitute(&law.ode_spec)?,
    };
    let t = RationalExpr::var(&vars::t());
    let tau = law.map.get(&vars::t()).cloned().unwrap_or(t);
    let m = law.map.get(&vars::y()).cloned().unwrap_or_else(|| RationalExpr::var(&vars::y()));
    let pulled = pullback(&ode.rhs, &m, &tau)?;
    let induced = induced_params(ode, &pulled)?;
    for (param, expected) in &law.expect {
        let found = induced
            .get(param)
            .cloned()
            .unwrap_or_else(|| RationalExpr::var(param));
        if &found != expected {
            return Err(HamiltonError::ScalingMismatch {
                param: param.name().into(),
                found: found.render(),
                expected: expected.render(),
            });
        }
    }
    Ok(induced)
}

/// Parameter values `P'` with `rhs(P') == f`, if the equation is affine in
/// its parameters and `f` lies in that family.
pub fn induced_params(ode: &ScalarOde, f: &RationalExpr) -> Result<Subst, HamiltonError> {
    let zero: Subst = ode.params.iter().map(|p| (p.clone(), RationalExpr::zero())).collect();
    let f0 = ode.rhs.substitute(&zero)?;
    let parts: Vec<RationalExpr> = ode.params.iter().map(|p| ode.rhs.diff(p)).collect();
    if parts.iter().any(|d| ode.params.iter().any(|p| d.contains(p))) {
        return Err(HamiltonError::NotCovariant(format!("{} is not affine in its parameters", ode.id)));
    }
    let target = f - &f0;
    let n = ode.params.len();
    let mut rng = StdRng::seed_from_u64(0x5ca1e);
    let mut rows: Vec<(Vec<Q>, RationalExpr)> = Vec::new();
    let mut attempts = 0;
    while rows.len() < 3 * n + 3 && attempts < 200 {
        attempts += 1;
        let pt: Subst = [vars::t(), vars::y(), vars::yp()]
            .into_iter()
            .map(|s| (s, RationalExpr::constant(q_frac(rng.gen_range(-40..40), rng.gen_range(1..9)))))
            .collect();
        let row: Result<Vec<Q>, _> = parts
            .iter()
            .map(|d| d.substitute(&pt).map(|v| v.as_constant().unwrap_or_else(|| Q::from_integer(0.into()))))
            .collect();
        let (Ok(row), Ok(rhs)) = (row, target.substitute(&pt)) else {
            continue;
        };
        rows.push((row, rhs));
    }
    let mut work = rows;
    let mut solution = vec![RationalExpr::zero(); n];
    let mut pivot_rows = Vec::new();
    for col in 0..n {
        let start = pivot_rows.len();
        let Some(r) = (start..work.len()).find(|&r| work[r].0[col] != Q::from_integer(0.into())) else {
            return Err(HamiltonError::NotCovariant(ode.id.clone()));
        };
        work.swap(start, r);
        let inv = work[start].0[col].recip();
        work[start].0.iter_mut().for_each(|c| *c *= &inv);
        work[start].1 = work[start].1.scale(&inv);
        for r2 in 0..work.len() {
            if r2 == start || work[r2].0[col] == Q::from_integer(0.into()) {
                continue;
            }
            let f = work[r2].0[col].clone();
            let pivot = work[start].clone();
            for (a, b) in work[r2].0.iter_mut().zip(&pivot.0) {
                *a -= &f * b;
            }
            work[r2].1 = &work[r2].1 - &pivot.1.scale(&f);
        }
        pivot_rows.push(col);
    }
    for (i, &col) in pivot_rows.iter().enumerate() {
        solution[col] = work[i].1.clone();
    }
    let induced: Subst = ode.params.iter().cloned().zip(solution).collect();
    if ode.rhs.substitute(&induced)? != *f {
        return Err(HamiltonError::NotCovariant(ode.id.clone()));
    }
    Ok(induced)
}

/// Residual of `y(t)` in `y'' = rhs` with the given parameter values.
pub fn check_solution(ode: &ScalarOde, spec: &Subst, y: &RationalExpr) -> Result<(), HamiltonError> {
    let t = vars::t();
    let rhs = ode.rhs.substitute(spec)?;
    let yp = y.diff(&t);
    let ypp = yp.diff(&t);
    let r = rhs.substitute(&subst(&[(vars::y(), y.clone()), (vars::yp(), yp)]))?;
    require_zero(&ypp - &r)
}

/// Numeric spot check of an identity at a handful of rational points.
pub fn vanishes_at_points(f: &RationalExpr, seed: u64) -> bool {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..8 {
        let pt: HashMap<Symbol, Q> = f
            .symbols()
            .into_iter()
            .filter(|s| !s.is_constant())
            .map(|s| (s, q_frac(rng.gen_range(-50..50), rng.gen_range(1..11))))
            .collect();
        if let Ok(v) = f.eval_q(&pt) {
            if v != Q::from_integer(0.into()) {
                return false;
            }
        }
    }
    true
}
