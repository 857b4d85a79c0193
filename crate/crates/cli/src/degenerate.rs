use painleve_core::catalog::DegenerationRule;
use painleve_core::degeneration::{apply_alternative, rule_signs, verify_rule, ComponentCheck, DegenerationError, Diagram, RuleReport};
use painleve_core::numint::{limit_probe, DEFAULT_EPS};
use painleve_core::Catalog;

use crate::report::{Check, EntryReport};

fn sigma_label(rule: &DegenerationRule, sigma: Option<i64>) -> String {
    match sigma {
        Some(s) => format!("{}[sigma={s:+}]", rule.id),
        None => rule.id.clone(),
    }
}

fn component_text(c: &ComponentCheck) -> String {
    match c.valuation {
        None => format!("{} exact", c.component),
        Some(v) => format!("{} O(eps^{v}) need {}", c.component, c.needed),
    }
}

fn describe(rep: &RuleReport) -> String {
    let mut parts: Vec<String> = rep.components.iter().map(component_text).collect();
    if let Some(s) = &rep.scalar_map {
        parts.push(format!("scalar map {}", component_text(s).trim_start_matches(&s.component).trim()));
    }
    parts.join(", ")
}

pub fn run(cat: &Catalog, rule: &DegenerationRule, probe: bool, seed: u64) -> EntryReport {
    let mut checks = Vec::new();
    let name = if rule.algebraic { "algebraic" } else { "limit" };
    match verify_rule(cat, rule) {
        Ok(reports) => {
            for rep in reports {
                let subject = sigma_label(rule, rep.sigma);
                checks.push(Check::new(name, &subject, rep.passed(), describe(&rep)).with_data(&rep));
            }
        }
        Err(e) => checks.push(Check::new(name, &rule.id, false, e.to_string())),
    }
    if rule.alternative.is_some() {
        for s in rule_signs(rule) {
            let subject = sigma_label(rule, s);
            checks.push(match apply_alternative(cat, rule, s) {
                Some(Ok(rep)) => {
                    let verdict = if rep.passed() { "printed reading passes" } else { "printed reading rejected" };
                    Check::new("alternative", &subject, !rep.passed(), format!("{verdict}: {}", describe(&rep)))
                }
                Some(Err(e)) => Check::new("alternative", &subject, false, e.to_string()),
                None => continue,
            });
        }
    }
    if probe {
        match limit_probe(cat, rule, &DEFAULT_EPS, seed) {
            Ok(tables) => {
                for t in tables {
                    let subject = sigma_label(rule, t.sigma);
                    let rows: Vec<String> = t
                        .rows
                        .iter()
                        .map(|r| match r.slope {
                            Some(s) => format!("{} slope {s:.3} need {}", r.component, r.needed),
                            None => format!("{} exact", r.component),
                        })
                        .collect();
                    checks.push(Check::new("probe", &subject, t.passed(), rows.join(", ")).with_data(&t));
                }
            }
            Err(e) => checks.push(Check::new("probe", &rule.id, false, e.to_string())),
        }
    }
    EntryReport::new(&rule.id, "rule", checks)
}

pub fn diagram_entry(result: &Result<Diagram, DegenerationError>) -> EntryReport {
    let check = match result {
        Ok(d) => Check::new(
            "closure",
            "diagram",
            true,
            format!("{} types, {} arrows", d.types.len(), d.arrows.len()),
        )
        .with_data(d),
        Err(e) => Check::new("closure", "diagram", false, e.to_string()),
    };
    EntryReport::new("diagram", "diagram", vec![check])
}
