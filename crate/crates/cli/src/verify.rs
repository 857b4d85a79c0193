use painleve_algebra::RationalExpr;
use painleve_core::catalog::{vars, CanonicalFamily, EquivalenceTransform, MatrixSystem, ScalingLaw, SlFamily, SolutionCheck};
use painleve_core::catalog::{CatalogError, Entry};
use painleve_core::hamilton::{check_scaling, check_solution, check_transform, eliminate, specialize};
use painleve_core::lincheck::{canonical_compat, certify_apparent, signature, sl_compat, CompatReport, CompatStatus, Flow, LinearData};
use painleve_core::matrixlab::{matrix_signature, solve_flow, zero_curvature};
use painleve_core::Catalog;
use serde_json::json;

use crate::report::{Check, EntryReport};
use crate::CliError;

/// Longest rendered residual kept in a report.
const SHOWN: usize = 240;

pub enum Target<'a> {
    Family(&'a CanonicalFamily),
    Sl(&'a SlFamily),
    Matrix(&'a MatrixSystem),
    Transform(&'a EquivalenceTransform),
    Scaling(&'a ScalingLaw),
    Solution(&'a SolutionCheck),
}

pub fn resolve<'a>(cat: &'a Catalog, id: &str) -> Result<Target<'a>, CliError> {
    match cat.get(id) {
        Ok(Entry::Family(f)) => return Ok(Target::Family(f)),
        Ok(Entry::Sl(f)) => return Ok(Target::Sl(f)),
        Ok(Entry::Matrix(m)) => return Ok(Target::Matrix(m)),
        Ok(Entry::Rule(_)) => return Err(CliError::Usage(format!("`{id}` is a degeneration rule, run it with `degenerate`"))),
        Ok(Entry::Ode(_)) => return Err(CliError::Usage(format!("`{id}` is a scalar equation and has no checks of its own"))),
        Err(_) => {}
    }
    if let Ok(t) = cat.transform(id) {
        return Ok(Target::Transform(t));
    }
    if let Some(s) = cat.scalings.iter().find(|s| s.id == id) {
        return Ok(Target::Scaling(s));
    }
    if let Some(s) = cat.solutions.iter().find(|s| s.id == id) {
        return Ok(Target::Solution(s));
    }
    Err(CatalogError::UnknownId(id.into()).into())
}

pub fn all_ids(cat: &Catalog) -> Vec<String> {
    let mut ids: Vec<String> = cat.families.iter().map(|f| f.id.clone()).collect();
    ids.extend(cat.sl_families.iter().map(|f| f.id.clone()));
    ids.extend(cat.matrices.iter().map(|m| m.id.clone()));
    ids.extend(cat.transforms.iter().map(|t| t.id.clone()));
    ids.extend(cat.scalings.iter().map(|s| s.id.clone()));
    ids.extend(cat.solutions.iter().map(|s| s.id.clone()));
    ids
}

fn shown(e: &RationalExpr) -> String {
    let s = e.render();
    if s.chars().count() > SHOWN {
        format!("{}...", s.chars().take(SHOWN).collect::<String>())
    } else {
        s
    }
}

fn compat_check(subject: &str, rep: &CompatReport) -> Check {
    let detail = match rep.status {
        CompatStatus::Exact => "residuals vanish identically".to_string(),
        CompatStatus::ZeroModS => format!("only an x-free term survives: {}", shown(&rep.residuals[0])),
        CompatStatus::Fail => rep
            .residuals
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(i, r)| format!("r{} = {}", i + 1, shown(r)))
            .collect::<Vec<_>>()
            .join("; "),
    };
    Check::new("compat", subject, rep.status != CompatStatus::Fail, detail).with_data(json!({ "status": rep.status }))
}

fn elimination_check(cat: &Catalog, subject: &str, h: &RationalExpr, target: &str, map: &painleve_algebra::Subst) -> Check {
    let got = eliminate(&Flow::hamiltonian(h), &vars::y());
    let want = cat.ode(target).map_err(Into::into).and_then(|o| specialize(o, map));
    match (got, want) {
        (Ok(g), Ok(w)) if g == w => Check::new("elimination", subject, true, format!("reproduces {target}")),
        (Ok(g), Ok(w)) => Check::new("elimination", subject, false, format!("differs from {target} by {}", shown(&(&g - &w)))),
        (Err(e), _) | (_, Err(e)) => Check::new("elimination", subject, false, e.to_string()),
    }
}

fn apparent_check(subject: &str, p: &RationalExpr, q: &RationalExpr) -> Check {
    match certify_apparent(p, q, &RationalExpr::var(&vars::y())) {
        Ok(cert) => {
            let (a, b) = &cert.exponents;
            let detail = if cert.is_apparent() {
                format!("x = y apparent, exponents {a}, {b}")
            } else {
                format!("logarithmic obstruction {}", shown(&cert.obstruction))
            };
            Check::new("apparent", subject, cert.is_apparent(), detail).with_data(json!({ "exponents": [a.to_string(), b.to_string()] }))
        }
        Err(e) => Check::new("apparent", subject, false, e.to_string()),
    }
}

fn family(cat: &Catalog, f: &CanonicalFamily) -> Vec<Check> {
    let mut checks = Vec::new();
    for i in f.instances() {
        let data = LinearData {
            p: i.p.clone(),
            q: i.q.clone(),
            a: i.a.clone(),
            b: i.b.clone(),
        };
        checks.push(compat_check(&i.label, &canonical_compat(&data, &Flow::hamiltonian(&i.h))));
        checks.push(elimination_check(cat, &i.label, &i.h, &i.target, &i.param_map));
        checks.push(match signature(&i.p, &i.q, &RationalExpr::var(&vars::y())) {
            Ok(sig) => Check::new("signature", &i.label, true, sig.label()).with_data(&sig.points),
            Err(e) => Check::new("signature", &i.label, false, e.to_string()),
        });
        checks.push(apparent_check(&i.label, &i.p, &i.q));
    }
    checks
}

fn sl(cat: &Catalog, f: &SlFamily) -> Vec<Check> {
    let mut checks = Vec::new();
    for i in f.instances() {
        checks.push(compat_check(&i.label, &sl_compat(&i.p, &i.a, &Flow::hamiltonian(&i.k))));
        if let Some(target) = &i.target {
            checks.push(elimination_check(cat, &i.label, &i.k, target, &i.param_map));
        }
        checks.push(apparent_check(&i.label, &RationalExpr::zero(), &-i.p.clone()));
    }
    checks
}

fn matrix(m: &MatrixSystem) -> Vec<Check> {
    let mut checks = Vec::new();
    if let Some(b) = &m.b {
        if m.flow.is_empty() {
            checks.push(match solve_flow(&m.a, b, &m.var, &vars::t(), &m.dynamic) {
                Ok(flow) => {
                    let shown: Vec<String> = flow.iter().map(|(s, e)| format!("{}' = {}", s.name(), e.render())).collect();
                    Check::new("zero_curvature", &m.id, true, shown.join(", "))
                }
                Err(e) => Check::new("zero_curvature", &m.id, false, e.to_string()),
            });
        } else {
            let z = zero_curvature(&m.a, b, &m.var, &vars::t(), &m.flow);
            let bad: Vec<String> = z.entries().filter(|e| !e.is_zero()).map(shown).collect();
            let detail = if bad.is_empty() { "vanishes along the stated flow".to_string() } else { bad.join("; ") };
            checks.push(Check::new("zero_curvature", &m.id, bad.is_empty(), detail));
        }
    }
    checks.push(match matrix_signature(&m.a, &m.var) {
        Ok(sig) => Check::new("signature", &m.id, true, sig.label()).with_data(&sig.points),
        Err(e) => Check::new("signature", &m.id, false, e.to_string()),
    });
    checks
}

fn outcome<T, E: std::fmt::Display>(name: &str, id: &str, r: Result<T, E>, ok: &str) -> Check {
    match r {
        Ok(_) => Check::new(name, id, true, ok),
        Err(e) => Check::new(name, id, false, e.to_string()),
    }
}

pub fn run(cat: &Catalog, target: &Target) -> EntryReport {
    match target {
        Target::Family(f) => EntryReport::new(&f.id, "family", family(cat, f)),
        Target::Sl(f) => EntryReport::new(&f.id, "sl_family", sl(cat, f)),
        Target::Matrix(m) => EntryReport::new(&m.id, "matrix", matrix(m)),
        Target::Transform(t) => {
            let c = outcome("transform", &t.id, check_transform(cat, t), &format!("{} -> {} holds exactly", t.source, t.target));
            EntryReport::new(&t.id, "transform", vec![c])
        }
        Target::Scaling(s) => {
            let c = match check_scaling(cat, s) {
                Ok(found) => {
                    let shown: Vec<String> = found.iter().map(|(k, v)| format!("{} -> {}", k.name(), v.render())).collect();
                    Check::new("scaling", &s.id, true, shown.join(", "))
                }
                Err(e) => Check::new("scaling", &s.id, false, e.to_string()),
            };
            EntryReport::new(&s.id, "scaling", vec![c])
        }
        Target::Solution(s) => {
            let c = match cat.ode(&s.ode) {
                Ok(ode) => outcome("solution", &s.id, check_solution(ode, &s.ode_spec, &s.y), &format!("y = {} solves {}", s.y.render(), s.ode)),
                Err(e) => Check::new("solution", &s.id, false, e.to_string()),
            };
            EntryReport::new(&s.id, "solution", vec![c])
        }
    }
}
