//! Catalog of families, scalar equations, transforms and degeneration rules.
//!
//! The catalog is a line-oriented text file. Sections start with
//! `[kind id]`; entries are `key = value`; `#` starts a comment and a line
//! beginning with whitespace continues the previous value. Values are either
//! expressions in the expression language or plain references, depending on
//! the key. Expression entries whose key is an identifier are bound as names
//! for the rest of the section.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use painleve_algebra::exprlang::{self, ExprError};
use painleve_algebra::{ConstantTower, RationalExpr, Scope, Subst, Symbol};

use crate::matrixlab::Mat2;

pub const BUNDLED: &str = include_str!("../data/catalog.txt");

pub const EXPECTED_FAMILIES: usize = 17;
pub const EXPECTED_SL: usize = 7;
pub const EXPECTED_ODES: usize = 11;
pub const EXPECTED_RULES: usize = 21;
pub const EXPECTED_MATRICES: usize = 4;

/// Canonical symbols shared by every section.
pub mod vars {
    use painleve_algebra::Symbol;

    pub fn x() -> Symbol {
        Symbol::new("x")
    }
    pub fn w() -> Symbol {
        Symbol::new("w")
    }
    pub fn rho() -> Symbol {
        Symbol::new("rho")
    }
    pub fn t() -> Symbol {
        Symbol::new("t")
    }
    pub fn y() -> Symbol {
        Symbol::new("y")
    }
    pub fn z() -> Symbol {
        Symbol::new("z")
    }
    pub fn yp() -> Symbol {
        Symbol::new("yp")
    }
    pub fn eps() -> Symbol {
        Symbol::new("eps")
    }
    pub fn sigma() -> Symbol {
        Symbol::new("sigma")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("line {line}: {source}")]
    Syntax {
        line: usize,
        source: painleve_algebra::SyntaxError,
    },
    #[error("line {line}: undeclared identifier `{name}` in [{section}]")]
    UndeclaredIdentifier {
        line: usize,
        section: String,
        name: String,
    },
    #[error("[{section}] refers to unknown {kind} `{reference}`")]
    DanglingReference {
        section: String,
        kind: &'static str,
        reference: String,
    },
    #[error("expected {expected} {kind}, found {found}")]
    CountMismatch {
        kind: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("cannot read catalog: {0}")]
    Io(String),
}

#[derive(Clone, Debug)]
pub struct ScalarOde {
    pub id: String,
    pub params: Vec<Symbol>,
    /// Right-hand side `F(yp, y, t)` of `y'' = F`.
    pub rhs: RationalExpr,
}

#[derive(Clone, Debug)]
pub struct CanonicalFamily {
    pub id: String,
    pub params: Vec<Symbol>,
    pub p: RationalExpr,
    pub q: RationalExpr,
    pub a: RationalExpr,
    pub b: RationalExpr,
    pub h: RationalExpr,
    /// Target equation (for `sigma = +1` when the family carries a sign).
    pub target: String,
    pub target_sigma_neg: Option<String>,
    /// Scalar-equation parameters in terms of family parameters.
    pub param_map: Subst,
    pub has_sigma: bool,
}

/// A family with its sign parameter instantiated.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub label: String,
    pub family: String,
    pub sigma: Option<i64>,
    pub p: RationalExpr,
    pub q: RationalExpr,
    pub a: RationalExpr,
    pub b: RationalExpr,
    pub h: RationalExpr,
    pub target: String,
    pub param_map: Subst,
}

#[derive(Clone, Debug)]
pub struct SlFamily {
    pub id: String,
    pub params: Vec<Symbol>,
    pub p: RationalExpr,
    pub a: RationalExpr,
    pub k: RationalExpr,
    pub target: Option<String>,
    pub param_map: Subst,
    pub has_sigma: bool,
    /// Named specializations: parameters set to zero.
    pub specializations: Vec<(String, Vec<Symbol>)>,
}

#[derive(Clone, Debug)]
pub struct SlInstance {
    pub label: String,
    pub family: String,
    pub p: RationalExpr,
    pub a: RationalExpr,
    pub k: RationalExpr,
    pub target: Option<String>,
    pub param_map: Subst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeStage {
    /// Applied in the source frame, before the change of variables.
    Pre,
    /// Applied in the target frame, after the change of variables.
    Post,
}

#[derive(Clone, Debug)]
pub struct GaugeSpec {
    pub gx: RationalExpr,
    pub gt: RationalExpr,
    pub stage: GaugeStage,
}

#[derive(Clone, Debug)]
pub struct RuleVariant {
    pub map: Subst,
    pub gauge: Option<GaugeSpec>,
    pub b_shift: Option<RationalExpr>,
    pub ham_source: RationalExpr,
    pub ham_target: RationalExpr,
}

#[derive(Clone, Debug)]
pub struct DegenerationRule {
    pub id: String,
    pub source: String,
    pub target: String,
    pub params: Vec<Symbol>,
    /// Source symbol -> image in target symbols.
    pub map: Subst,
    /// Parameter values of the target family at which the comparison is made.
    pub target_spec: Subst,
    pub gauge: Option<GaugeSpec>,
    /// Licensed additive change of `b` (a function of `t` and the dynamical
    /// variables only), applied after the change of variables.
    pub b_shift: Option<RationalExpr>,
    /// Expression in `Hs` (transformed source Hamiltonian) and `Ht` (target
    /// Hamiltonian) whose difference must vanish to `ham_order`.
    pub ham_source: RationalExpr,
    pub ham_target: RationalExpr,
    pub ham_order: i64,
    pub algebraic: bool,
    pub sigma: bool,
    /// Stated scalar-equation parameter map, checked at the equation level.
    pub scalar_map: Subst,
    /// Parameter values of the target equation for the equation-level check.
    pub scalar_target: Subst,
    pub scalar_t: Option<RationalExpr>,
    pub scalar_y: Option<RationalExpr>,
    /// A rejected reading of the printed rule and the recorded failure.
    pub alternative: Option<(RuleVariant, String)>,
}

#[derive(Clone, Debug)]
pub struct MatrixSystem {
    pub id: String,
    pub var: Symbol,
    pub params: Vec<Symbol>,
    pub dynamic: Vec<Symbol>,
    pub a: Mat2,
    pub b: Option<Mat2>,
    pub flow: Vec<(Symbol, RationalExpr)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    /// Old `y`, `t` written in the new variables.
    Pullback,
    /// New dependent and independent variables written on the jet of an old
    /// solution.
    Jet,
    /// New dependent variable written in the phase variables of a Hamiltonian.
    Flow,
    /// Hamiltonian relation under a change of variables (no limit).
    Hamiltonian,
}

#[derive(Clone, Debug)]
pub struct EquivalenceTransform {
    pub id: String,
    pub kind: TransformKind,
    pub params: Vec<Symbol>,
    pub source: String,
    pub target: String,
    pub source_spec: Subst,
    pub target_spec: Subst,
    /// `y`/`t` images (pullback, jet), `y` image (flow), or variable map
    /// (hamiltonian).
    pub map: Subst,
    pub hamiltonian: Option<RationalExpr>,
    pub ham_source: Option<RationalExpr>,
    pub ham_target: Option<RationalExpr>,
}

#[derive(Clone, Debug)]
pub struct ScalingLaw {
    pub id: String,
    pub ode: String,
    pub params: Vec<Symbol>,
    /// Parameters fixed before the law is applied.
    pub ode_spec: Subst,
    pub map: Subst,
    pub expect: Subst,
    pub covariant: bool,
}

#[derive(Clone, Debug)]
pub struct SolutionCheck {
    pub id: String,
    pub ode: String,
    pub params: Vec<Symbol>,
    pub ode_spec: Subst,
    pub y: RationalExpr,
}

#[derive(Clone, Debug)]
struct RawEntry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Clone, Debug)]
struct RawSection {
    kind: String,
    id: String,
    line: usize,
    entries: Vec<RawEntry>,
}

impl RawSection {
    fn label(&self) -> String {
        format!("{} {}", self.kind, self.id)
    }

    fn get(&self, key: &str) -> Option<&RawEntry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn list(&self, key: &str) -> Vec<String> {
        self.get(key)
            .map(|e| split_list(&e.value))
            .unwrap_or_default()
    }
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Loaded catalog plus the processed source text used by `render`.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    pub tower: ConstantTower,
    pub odes: Vec<ScalarOde>,
    pub families: Vec<CanonicalFamily>,
    pub sl_families: Vec<SlFamily>,
    pub rules: Vec<DegenerationRule>,
    pub matrices: Vec<MatrixSystem>,
    pub transforms: Vec<EquivalenceTransform>,
    pub scalings: Vec<ScalingLaw>,
    pub solutions: Vec<SolutionCheck>,
    rendered: Vec<(String, Vec<(String, String)>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    Family,
    Sl,
    Ode,
    Rule,
    Matrix,
}

pub enum Entry<'a> {
    Family(&'a CanonicalFamily),
    Sl(&'a SlFamily),
    Ode(&'a ScalarOde),
    Rule(&'a DegenerationRule),
    Matrix(&'a MatrixSystem),
}

const TEXT_KEYS: &[&str] = &[
    "params",
    "target",
    "target_sigma_neg",
    "source",
    "sigma",
    "algebraic",
    "ham.order",
    "gauge.stage",
    "alt.gauge.stage",
    "alt.result",
    "var",
    "dynamic",
    "degree",
    "kind",
    "ode",
    "covariant",
];

fn is_text_key(key: &str) -> bool {
    TEXT_KEYS.contains(&key) || key.starts_with("specialize.")
}

impl Catalog {
    pub fn bundled() -> Result<Catalog, CatalogError> {
        Catalog::parse(BUNDLED)
    }

    pub fn load(path: &std::path::Path) -> Result<Catalog, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io(format!("{}: {e}", path.display())))?;
        Catalog::parse(&text)
    }

    /// Parses and validates, including the entry counts.
    pub fn parse(text: &str) -> Result<Catalog, CatalogError> {
        let cat = Catalog::parse_unchecked(text)?;
        cat.check_counts()?;
        Ok(cat)
    }

    /// Parses and resolves references without checking entry counts.
    pub fn parse_unchecked(text: &str) -> Result<Catalog, CatalogError> {
        let sections = split_sections(text)?;
        let mut cat = Catalog::default();
        let order = ["constant", "ode", "family", "sl", "matrix", "rule", "transform", "scaling", "solution"];
        for s in &sections {
            if !order.contains(&s.kind.as_str()) {
                return Err(CatalogError::Malformed {
                    line: s.line,
                    message: format!("unknown section kind `{}`", s.kind),
                });
            }
        }
        let mut seen = HashSet::new();
        for s in &sections {
            if !seen.insert((s.kind.clone(), s.id.clone())) {
                return Err(CatalogError::Malformed {
                    line: s.line,
                    message: format!("duplicate section [{}]", s.label()),
                });
            }
        }
        let mut rendered: BTreeMap<usize, (String, Vec<(String, String)>)> = BTreeMap::new();
        for kind in order {
            for (idx, s) in sections.iter().enumerate().filter(|(_, s)| s.kind == kind) {
                let out = cat.build_section(s)?;
                rendered.insert(idx, (format!("[{}]", s.label()), out));
            }
        }
        cat.rendered = rendered.into_values().collect();
        cat.resolve_references()?;
        Ok(cat)
    }

    pub fn check_counts(&self) -> Result<(), CatalogError> {
        let checks: [(&'static str, usize, usize); 5] = [
            ("canonical families", EXPECTED_FAMILIES, self.families.len()),
            ("SL-type families", EXPECTED_SL, self.sl_families.len()),
            ("scalar equations", EXPECTED_ODES, self.odes.len()),
            ("degeneration rules", EXPECTED_RULES, self.rules.len()),
            ("matrix systems", EXPECTED_MATRICES, self.matrices.len()),
        ];
        for (kind, expected, found) in checks {
            if expected != found {
                return Err(CatalogError::CountMismatch { kind, expected, found });
            }
        }
        Ok(())
    }

    /// Canonical text: every expression re-rendered, comments dropped.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (header, entries)) in self.rendered.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "{header}");
            for (k, v) in entries {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }

    pub fn ode(&self, id: &str) -> Result<&ScalarOde, CatalogError> {
        self.odes.iter().find(|o| o.id == id).ok_or_else(|| CatalogError::UnknownId(id.into()))
    }

    pub fn family(&self, id: &str) -> Result<&CanonicalFamily, CatalogError> {
        self.families.iter().find(|o| o.id == id).ok_or_else(|| CatalogError::UnknownId(id.into()))
    }

    pub fn sl_family(&self, id: &str) -> Result<&SlFamily, CatalogError> {
        self.sl_families.iter().find(|o| o.id == id).ok_or_else(|| CatalogError::UnknownId(id.into()))
    }

    pub fn rule(&self, id: &str) -> Result<&DegenerationRule, CatalogError> {
        self.rules.iter().find(|o| o.id == id).ok_or_else(|| CatalogError::UnknownId(id.into()))
    }

    pub fn matrix(&self, id: &str) -> Result<&MatrixSystem, CatalogError> {
        self.matrices.iter().find(|o| o.id == id).ok_or_else(|| CatalogError::UnknownId(id.into()))
    }

    pub fn transform(&self, id: &str) -> Result<&EquivalenceTransform, CatalogError> {
        self.transforms.iter().find(|o| o.id == id).ok_or_else(|| CatalogError::UnknownId(id.into()))
    }

    /// Looks an id up across families, SL entries, equations, rules and matrices.
    pub fn get(&self, id: &str) -> Result<Entry<'_>, CatalogError> {
        if let Ok(f) = self.family(id) {
            return Ok(Entry::Family(f));
        }
        if let Ok(f) = self.sl_family(id) {
            return Ok(Entry::Sl(f));
        }
        if let Ok(f) = self.rule(id) {
            return Ok(Entry::Rule(f));
        }
        if let Ok(f) = self.matrix(id) {
            return Ok(Entry::Matrix(f));
        }
        if let Ok(f) = self.ode(id) {
            return Ok(Entry::Ode(f));
        }
        Err(CatalogError::UnknownId(id.into()))
    }

    /// Ids of one kind in file order.
    pub fn list(&self, kind: EntryKind) -> Vec<String> {
        match kind {
            EntryKind::Family => self.families.iter().map(|f| f.id.clone()).collect(),
            EntryKind::Sl => self.sl_families.iter().map(|f| f.id.clone()).collect(),
            EntryKind::Ode => self.odes.iter().map(|f| f.id.clone()).collect(),
            EntryKind::Rule => self.rules.iter().map(|f| f.id.clone()).collect(),
            EntryKind::Matrix => self.matrices.iter().map(|f| f.id.clone()).collect(),
        }
    }

    fn base_scope(&self) -> Scope {
        let mut scope = Scope::new();
        for c in self.tower.constants() {
            scope.insert_symbol(c.clone());
        }
        scope
    }

    fn build_section(&mut self, s: &RawSection) -> Result<Vec<(String, String)>, CatalogError> {
        let mut scope = self.base_scope();
        let params: Vec<Symbol> = s.list("params").iter().map(|n| scope.declare(n)).collect();
        for p in &params {
            if p.name().contains('.') {
                return Err(CatalogError::Malformed {
                    line: s.line,
                    message: format!("bad parameter name `{p}`"),
                });
            }
        }
        let base: &[&str] = match s.kind.as_str() {
            "constant" => &[],
            "ode" => &["t", "y", "yp"],
            "family" | "sl" => &["x", "t", "y", "z"],
            "matrix" => &["t"],
            "rule" => &["x", "t", "y", "z", "eps", "Hs", "Ht"],
            "transform" => &["t", "y", "yp", "z", "eps", "Hs", "Ht", "x"],
            "scaling" | "solution" => &["t", "y", "yp"],
            _ => &[],
        };
        for n in base {
            scope.declare(n);
        }
        // Rules and transforms see the parameters of the objects they connect.
        if matches!(s.kind.as_str(), "rule" | "transform" | "scaling" | "solution") {
            for key in ["source", "target", "ode"] {
                if let Some(e) = s.get(key) {
                    let id = e.value.trim();
                    for p in self.params_of(id) {
                        scope.insert_symbol(p);
                    }
                }
            }
        }
        if s.kind == "matrix" {
            let var = s.get("var").map(|e| e.value.trim().to_string()).unwrap_or_else(|| "x".into());
            scope.declare(&var);
            for d in s.list("dynamic") {
                scope.declare(&d);
            }
        }
        let mut values: Vec<(String, Option<RationalExpr>, String, usize)> = Vec::new();
        let mut out = Vec::new();
        for e in &s.entries {
            if is_text_key(&e.key) {
                out.push((e.key.clone(), e.value.trim().to_string()));
                values.push((e.key.clone(), None, e.value.trim().to_string(), e.line));
                continue;
            }
            let v = self.lower(&e.value, &scope, s, e.line)?;
            if is_identifier(&e.key) {
                scope.bind(&e.key, v.clone());
            }
            out.push((e.key.clone(), v.render()));
            values.push((e.key.clone(), Some(v), e.value.clone(), e.line));
        }
        let get = |key: &str| -> Option<RationalExpr> {
            values.iter().find(|(k, ..)| k == key).and_then(|(_, v, ..)| v.clone())
        };
        let need = |key: &str| -> Result<RationalExpr, CatalogError> {
            get(key).ok_or_else(|| CatalogError::Malformed {
                line: s.line,
                message: format!("[{}] is missing expression `{key}`", s.label()),
            })
        };
        let prefixed = |prefix: &str| -> Subst {
            let mut m = Subst::new();
            for (k, v, _, _) in &values {
                if let (Some(name), Some(v)) = (k.strip_prefix(prefix), v) {
                    if is_identifier(name) {
                        m.insert(Symbol::new(name), v.clone());
                    }
                }
            }
            m
        };
        let text = |key: &str| s.get(key).map(|e| e.value.trim().to_string());
        match s.kind.as_str() {
            "constant" => {
                let degree: u16 = text("degree")
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| CatalogError::Malformed {
                        line: s.line,
                        message: format!("[{}] needs an integer `degree`", s.label()),
                    })?;
                let value = need("value")?;
                if !value.is_polynomial() {
                    return Err(CatalogError::Malformed {
                        line: s.line,
                        message: format!("[{}] value must be polynomial", s.label()),
                    });
                }
                self.tower
                    .adjoin(&s.id, degree, value.num().clone())
                    .map_err(|e| CatalogError::Malformed {
                        line: s.line,
                        message: e.to_string(),
                    })?;
            }
            "ode" => self.odes.push(ScalarOde {
                id: s.id.clone(),
                params,
                rhs: need("F")?,
            }),
            "family" => {
                let has_sigma = params.iter().any(|p| p.name() == "sigma");
                self.families.push(CanonicalFamily {
                    id: s.id.clone(),
                    params,
                    p: need("p")?,
                    q: need("q")?,
                    a: need("a")?,
                    b: need("b")?,
                    h: need("H")?,
                    target: text("target").ok_or_else(|| missing(s, "target"))?,
                    target_sigma_neg: text("target_sigma_neg"),
                    param_map: prefixed("map."),
                    has_sigma,
                })
            }
            "sl" => {
                let has_sigma = params.iter().any(|p| p.name() == "sigma");
                let mut specializations = Vec::new();
                for e in &s.entries {
                    if let Some(name) = e.key.strip_prefix("specialize.") {
                        let syms = split_list(&e.value)
                            .iter()
                            .map(|n| {
                                scope.symbol(n).cloned().ok_or_else(|| CatalogError::UndeclaredIdentifier {
                                    line: e.line,
                                    section: s.label(),
                                    name: n.clone(),
                                })
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        specializations.push((name.to_string(), syms));
                    }
                }
                self.sl_families.push(SlFamily {
                    id: s.id.clone(),
                    params,
                    p: need("p")?,
                    a: need("A")?,
                    k: need("K")?,
                    target: text("target"),
                    param_map: prefixed("map."),
                    has_sigma,
                    specializations,
                })
            }
            "matrix" => {
                let var = Symbol::new(&text("var").unwrap_or_else(|| "x".into()));
                let mat = |prefix: &str| -> Option<Result<Mat2, CatalogError>> {
                    let keys = ["11", "12", "21", "22"].map(|k| format!("{prefix}{k}"));
                    if keys.iter().all(|k| get(k).is_none()) {
                        return None;
                    }
                    let e: Result<Vec<RationalExpr>, CatalogError> =
                        keys.iter().map(|k| Ok(get(k).unwrap_or_else(RationalExpr::zero))).collect();
                    Some(e.map(|e| Mat2::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone())))
                };
                let a = mat("A").ok_or_else(|| missing(s, "A11"))??;
                let b = mat("B").transpose()?;
                let flow = s
                    .entries
                    .iter()
                    .filter_map(|e| e.key.strip_prefix("flow.").map(|n| (Symbol::new(n), get(&e.key).unwrap())))
                    .collect();
                self.matrices.push(MatrixSystem {
                    id: s.id.clone(),
                    var,
                    params,
                    dynamic: s.list("dynamic").iter().map(|n| Symbol::new(n)).collect(),
                    a,
                    b,
                    flow,
                })
            }
            "rule" => {
                let stage = match text("gauge.stage").as_deref() {
                    Some("post") => GaugeStage::Post,
                    Some("pre") | None => GaugeStage::Pre,
                    Some(other) => {
                        return Err(CatalogError::Malformed {
                            line: s.line,
                            message: format!("gauge.stage must be pre or post, not `{other}`"),
                        })
                    }
                };
                let gauge = match (get("gauge.x"), get("gauge.t")) {
                    (None, None) => None,
                    (gx, gt) => Some(GaugeSpec {
                        gx: gx.unwrap_or_else(RationalExpr::zero),
                        gt: gt.unwrap_or_else(RationalExpr::zero),
                        stage,
                    }),
                };
                let map = prefixed("map.");
                let ham_source = get("ham.source").unwrap_or_else(|| RationalExpr::var(&Symbol::new("Hs")));
                let ham_target = need("ham.target")?;
                let alternative = text("alt.result").map(|note| {
                    let mut amap = map.clone();
                    for (k, v) in prefixed("alt.map.") {
                        amap.insert(k, v);
                    }
                    let astage = match text("alt.gauge.stage").as_deref() {
                        Some("post") => GaugeStage::Post,
                        Some("pre") => GaugeStage::Pre,
                        _ => stage,
                    };
                    let agauge = match (get("alt.gauge.x"), get("alt.gauge.t")) {
                        (None, None) => gauge.clone().map(|g| GaugeSpec { stage: astage, ..g }),
                        (gx, gt) => Some(GaugeSpec {
                            gx: gx.or_else(|| gauge.as_ref().map(|g| g.gx.clone())).unwrap_or_else(RationalExpr::zero),
                            gt: gt.or_else(|| gauge.as_ref().map(|g| g.gt.clone())).unwrap_or_else(RationalExpr::zero),
                            stage: astage,
                        }),
                    };
                    (
                        RuleVariant {
                            map: amap,
                            gauge: agauge,
                            b_shift: get("alt.shift.b").or_else(|| get("shift.b")),
                            ham_source: get("alt.ham.source").unwrap_or_else(|| ham_source.clone()),
                            ham_target: get("alt.ham.target").unwrap_or_else(|| ham_target.clone()),
                        },
                        note,
                    )
                });
                let ham_order = text("ham.order")
                    .map(|o| o.parse::<i64>())
                    .transpose()
                    .map_err(|_| CatalogError::Malformed {
                        line: s.line,
                        message: "ham.order must be an integer".into(),
                    })?
                    .unwrap_or(1);
                self.rules.push(DegenerationRule {
                    id: s.id.clone(),
                    source: text("source").ok_or_else(|| missing(s, "source"))?,
                    target: text("target").ok_or_else(|| missing(s, "target"))?,
                    params,
                    map,
                    target_spec: prefixed("target."),
                    gauge,
                    b_shift: get("shift.b"),
                    ham_source,
                    ham_target,
                    ham_order,
                    algebraic: text("algebraic").as_deref() == Some("true"),
                    sigma: text("sigma").as_deref() == Some("both"),
                    scalar_map: prefixed("scalar."),
                    scalar_target: prefixed("scalar_target."),
                    scalar_t: get("scalar_t"),
                    scalar_y: get("scalar_y"),
                    alternative,
                })
            }
            "transform" => {
                let kind = match text("kind").as_deref() {
                    Some("pullback") => TransformKind::Pullback,
                    Some("jet") => TransformKind::Jet,
                    Some("flow") => TransformKind::Flow,
                    Some("hamiltonian") => TransformKind::Hamiltonian,
                    other => {
                        return Err(CatalogError::Malformed {
                            line: s.line,
                            message: format!("unknown transform kind {other:?}"),
                        })
                    }
                };
                self.transforms.push(EquivalenceTransform {
                    id: s.id.clone(),
                    kind,
                    params,
                    source: text("source").unwrap_or_default(),
                    target: text("target").ok_or_else(|| missing(s, "target"))?,
                    source_spec: prefixed("source."),
                    target_spec: prefixed("target."),
                    map: prefixed("map."),
                    hamiltonian: get("H"),
                    ham_source: get("ham.source"),
                    ham_target: get("ham.target"),
                })
            }
            "scaling" => self.scalings.push(ScalingLaw {
                id: s.id.clone(),
                ode: text("ode").ok_or_else(|| missing(s, "ode"))?,
                params,
                ode_spec: prefixed("set."),
                map: prefixed("map."),
                expect: prefixed("expect."),
                covariant: text("covariant").as_deref() != Some("false"),
            }),
            "solution" => self.solutions.push(SolutionCheck {
                id: s.id.clone(),
                ode: text("ode").ok_or_else(|| missing(s, "ode"))?,
                params,
                ode_spec: prefixed("set."),
                y: need("y")?,
            }),
            _ => unreachable!("kinds validated"),
        }
        Ok(out)
    }

    /// Parameters of every entry named `id`; family and equation ids overlap.
    fn params_of(&self, id: &str) -> Vec<Symbol> {
        let mut out = Vec::new();
        if let Ok(f) = self.family(id) {
            out.extend(f.params.iter().cloned());
        }
        if let Ok(f) = self.sl_family(id) {
            out.extend(f.params.iter().cloned());
        }
        if let Ok(o) = self.ode(id) {
            out.extend(o.params.iter().cloned());
        }
        out
    }

    fn lower(&self, text: &str, scope: &Scope, s: &RawSection, line: usize) -> Result<RationalExpr, CatalogError> {
        exprlang::parse_expr(text, scope).map_err(|e| match e {
            ExprError::Syntax(source) => CatalogError::Syntax { line, source },
            ExprError::Undeclared(name) => CatalogError::UndeclaredIdentifier {
                line,
                section: s.label(),
                name,
            },
            ExprError::Algebra(a) => CatalogError::Malformed {
                line,
                message: a.to_string(),
            },
        })
    }

    fn resolve_references(&self) -> Result<(), CatalogError> {
        let dangling = |section: String, kind: &'static str, reference: &str| CatalogError::DanglingReference {
            section,
            kind,
            reference: reference.to_string(),
        };
        let ode_ok = |id: &str| self.ode(id).is_ok();
        let fam_ok = |id: &str| self.family(id).is_ok();
        for f in &self.families {
            for t in std::iter::once(&f.target).chain(f.target_sigma_neg.iter()) {
                if !ode_ok(t) {
                    return Err(dangling(format!("family {}", f.id), "scalar equation", t));
                }
            }
        }
        for f in &self.sl_families {
            if let Some(t) = &f.target {
                if !ode_ok(t) {
                    return Err(dangling(format!("sl {}", f.id), "scalar equation", t));
                }
            }
        }
        for r in &self.rules {
            for id in [&r.source, &r.target] {
                if !fam_ok(id) {
                    return Err(dangling(format!("rule {}", r.id), "family", id));
                }
            }
        }
        for t in &self.transforms {
            let ok = |id: &str| ode_ok(id) || fam_ok(id);
            if !t.source.is_empty() && !ok(&t.source) {
                return Err(dangling(format!("transform {}", t.id), "equation or family", &t.source));
            }
            if !ok(&t.target) {
                return Err(dangling(format!("transform {}", t.id), "equation or family", &t.target));
            }
        }
        for sc in &self.scalings {
            if !ode_ok(&sc.ode) {
                return Err(dangling(format!("scaling {}", sc.id), "scalar equation", &sc.ode));
            }
        }
        for sc in &self.solutions {
            if !ode_ok(&sc.ode) {
                return Err(dangling(format!("solution {}", sc.id), "scalar equation", &sc.ode));
            }
        }
        Ok(())
    }
}

fn missing(s: &RawSection, key: &str) -> CatalogError {
    CatalogError::Malformed {
        line: s.line,
        message: format!("[{}] is missing `{key}`", s.label()),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn split_sections(text: &str) -> Result<Vec<RawSection>, CatalogError> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        let continuation = line.starts_with(' ') || line.starts_with('\t');
        let trimmed = line.trim();
        if !continuation && trimmed.starts_with('[') {
            let Some(inner) = trimmed.strip_prefix('[').and_then(|r| r.strip_suffix(']')) else {
                return Err(CatalogError::Malformed {
                    line: line_no,
                    message: format!("bad section header `{trimmed}`"),
                });
            };
            let mut parts = inner.split_whitespace();
            let (Some(kind), Some(id), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(CatalogError::Malformed {
                    line: line_no,
                    message: format!("section header needs `[kind id]`, got `{trimmed}`"),
                });
            };
            sections.push(RawSection {
                kind: kind.to_string(),
                id: id.to_string(),
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(section) = sections.last_mut() else {
            return Err(CatalogError::Malformed {
                line: line_no,
                message: "entry outside of any section".into(),
            });
        };
        if continuation {
            if let Some(last) = section.entries.last_mut() {
                last.value.push(' ');
                last.value.push_str(trimmed);
                continue;
            }
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(CatalogError::Malformed {
                line: line_no,
                message: format!("expected `key = value`, got `{trimmed}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() || section.entries.iter().any(|e| e.key == key) {
            return Err(CatalogError::Malformed {
                line: line_no,
                message: format!("empty or repeated key `{key}`"),
            });
        }
        section.entries.push(RawEntry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line: line_no,
        });
    }
    Ok(sections)
}

fn sigma_subst(sigma: i64) -> Subst {
    let mut m = Subst::new();
    m.insert(vars::sigma(), RationalExpr::int(sigma));
    m
}

fn subst_all(e: &RationalExpr, m: &Subst) -> RationalExpr {
    e.substitute(m).expect("sign instantiation keeps denominators nonzero")
}

impl CanonicalFamily {
    /// One instance per sign value (or a single instance without a sign).
    pub fn instances(&self) -> Vec<FamilyInstance> {
        if !self.has_sigma {
            return vec![FamilyInstance {
                label: self.id.clone(),
                family: self.id.clone(),
                sigma: None,
                p: self.p.clone(),
                q: self.q.clone(),
                a: self.a.clone(),
                b: self.b.clone(),
                h: self.h.clone(),
                target: self.target.clone(),
                param_map: self.param_map.clone(),
            }];
        }
        [1i64, -1]
            .iter()
            .map(|&sg| {
                let m = sigma_subst(sg);
                let target = if sg < 0 {
                    self.target_sigma_neg.clone().unwrap_or_else(|| self.target.clone())
                } else {
                    self.target.clone()
                };
                FamilyInstance {
                    label: format!("{}[sigma={}]", self.id, if sg > 0 { "+1" } else { "-1" }),
                    family: self.id.clone(),
                    sigma: Some(sg),
                    p: subst_all(&self.p, &m),
                    q: subst_all(&self.q, &m),
                    a: subst_all(&self.a, &m),
                    b: subst_all(&self.b, &m),
                    h: subst_all(&self.h, &m),
                    target,
                    param_map: self.param_map.iter().map(|(k, v)| (k.clone(), subst_all(v, &m))).collect(),
                }
            })
            .collect()
    }

    pub fn instance(&self, sigma: Option<i64>) -> FamilyInstance {
        let all = self.instances();
        all.into_iter()
            .find(|i| i.sigma == sigma || sigma.is_none())
            .expect("instance exists")
    }
}

impl SlFamily {
    /// Sign instances, then every named specialization of each.
    pub fn instances(&self) -> Vec<SlInstance> {
        let signs: Vec<Option<i64>> = if self.has_sigma { vec![Some(1), Some(-1)] } else { vec![None] };
        let mut out = Vec::new();
        for sg in signs {
            let m = sg.map(sigma_subst).unwrap_or_default();
            let base = SlInstance {
                label: match sg {
                    Some(s) => format!("{}[sigma={}]", self.id, if s > 0 { "+1" } else { "-1" }),
                    None => self.id.clone(),
                },
                family: self.id.clone(),
                p: subst_all(&self.p, &m),
                a: subst_all(&self.a, &m),
                k: subst_all(&self.k, &m),
                target: self.target.clone(),
                param_map: self.param_map.iter().map(|(k, v)| (k.clone(), subst_all(v, &m))).collect(),
            };
            for (name, zeros) in &self.specializations {
                let mut z = Subst::new();
                for s in zeros {
                    z.insert(s.clone(), RationalExpr::zero());
                }
                out.push(SlInstance {
                    label: format!("{}[{}]", base.label, name),
                    family: self.id.clone(),
                    p: subst_all(&base.p, &z),
                    a: subst_all(&base.a, &z),
                    k: subst_all(&base.k, &z),
                    target: None,
                    param_map: Subst::new(),
                });
            }
            out.insert(out.len() - self.specializations.len(), base);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_continuations() {
        let text = "# header\n[ode P1]\nF = 6*y^2 # comment\n  + t\n";
        let cat = Catalog::parse_unchecked(text).unwrap();
        assert_eq!(cat.odes[0].rhs.render(), "6*y^2 + t");
    }

    #[test]
    fn undeclared_symbol_is_reported() {
        let err = Catalog::parse_unchecked("[ode P1]\nF = 6*y^2 + s\n").unwrap_err();
        assert!(matches!(err, CatalogError::UndeclaredIdentifier { ref name, .. } if name == "s"));
    }

    #[test]
    fn empty_file_has_wrong_counts() {
        assert!(matches!(Catalog::parse(""), Err(CatalogError::CountMismatch { .. })));
    }
}
