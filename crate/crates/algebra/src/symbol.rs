//! Symbols and the canonical variable order.
//!
//! Every identifier that can occur in an expression is a [`Symbol`]. Symbols are
//! ordered canonically: the independent and dynamical variables `x, w, rho, t, y,
//! z, eps` come first in that order, then every other identifier alphabetically,
//! then the algebraic constants of a [`ConstantTower`] in declaration order.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::poly::Poly;
use crate::AlgebraError;

const CORE_VARIABLES: [&str; 7] = ["x", "w", "rho", "t", "y", "z", "eps"];
const PARAM_RANK: u8 = 7;
const CONSTANT_RANK: u8 = 8;

/// Defining relation `symbol^degree = value` of an adjoined algebraic constant.
#[derive(Clone, Debug)]
pub struct Relation {
    pub degree: u16,
    pub value: Poly,
    /// Principal numeric value, used only by floating-point evaluation.
    pub numeric: num_complex::Complex64,
}

#[derive(Debug)]
struct SymbolData {
    name: String,
    rank: u8,
    level: u32,
    relation: Option<Relation>,
}

/// An interned-by-value identifier. Cloning is cheap.
#[derive(Clone)]
pub struct Symbol(Arc<SymbolData>);

impl Symbol {
    /// A variable or parameter. The rank is derived from the name.
    pub fn new(name: &str) -> Symbol {
        let rank = CORE_VARIABLES
            .iter()
            .position(|v| *v == name)
            .map(|i| i as u8)
            .unwrap_or(PARAM_RANK);
        Symbol(Arc::new(SymbolData {
            name: name.to_string(),
            rank,
            level: 0,
            relation: None,
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn relation(&self) -> Option<&Relation> {
        self.0.relation.as_ref()
    }

    pub fn is_constant(&self) -> bool {
        self.0.relation.is_some()
    }

    /// Position of a constant inside its tower (0 for ordinary symbols).
    pub fn level(&self) -> u32 {
        self.0.level
    }

    fn key(&self) -> (u8, u32, &str) {
        (self.0.rank, self.0.level, &self.0.name)
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.key() == other.key()
    }
}

impl Eq for Symbol {}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.key().cmp(&other.key())
    }
}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state);
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

/// An ordered list of adjoined algebraic constants.
///
/// Each relation may mention only constants declared earlier (and ordinary
/// parameters); stored powers of a constant are always below its degree.
#[derive(Clone, Debug, Default)]
pub struct ConstantTower {
    constants: Vec<Symbol>,
}

impl ConstantTower {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `name^degree = value`.
    pub fn adjoin(&mut self, name: &str, degree: u16, value: Poly) -> Result<Symbol, AlgebraError> {
        if degree < 2 {
            return Err(AlgebraError::InvalidTower(format!(
                "constant {name} needs degree >= 2"
            )));
        }
        if self.get(name).is_some() {
            return Err(AlgebraError::InvalidTower(format!("{name} declared twice")));
        }
        for v in value.vars() {
            if v.is_constant() && !self.constants.contains(v) {
                return Err(AlgebraError::InvalidTower(format!(
                    "relation of {name} refers to undeclared constant {v}"
                )));
            }
            if v.name() == name {
                return Err(AlgebraError::InvalidTower(format!(
                    "relation of {name} is recursive"
                )));
            }
        }
        let numeric = principal_root(&value, degree).ok_or_else(|| {
            AlgebraError::InvalidTower(format!(
                "relation of {name} has no numeric value (depends on a parameter)"
            ))
        });
        let numeric = match numeric {
            Ok(c) => c,
            // Parameter-dependent relations are legal; they just cannot be evaluated
            // numerically without a parameter value.
            Err(_) => num_complex::Complex64::new(f64::NAN, f64::NAN),
        };
        let sym = Symbol(Arc::new(SymbolData {
            name: name.to_string(),
            rank: CONSTANT_RANK,
            level: self.constants.len() as u32 + 1,
            relation: Some(Relation {
                degree,
                value,
                numeric,
            }),
        }));
        self.constants.push(sym.clone());
        Ok(sym)
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.constants.iter().find(|s| s.name() == name)
    }

    pub fn constants(&self) -> &[Symbol] {
        &self.constants
    }
}

fn principal_root(value: &Poly, degree: u16) -> Option<num_complex::Complex64> {
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for (exps, c) in value.terms() {
        let mut term = num_complex::Complex64::new(crate::rational::to_f64(c), 0.0);
        for (i, e) in exps.iter().enumerate() {
            if *e == 0 {
                continue;
            }
            let rel = value.vars()[i].relation()?;
            term *= rel.numeric.powu(*e as u32);
        }
        acc += term;
    }
    if acc.im == 0.0 && acc.re < 0.0 && degree % 2 == 1 {
        return Some(num_complex::Complex64::new(-(-acc.re).powf(1.0 / degree as f64), 0.0));
    }
    Some(acc.powf(1.0 / degree as f64))
}
