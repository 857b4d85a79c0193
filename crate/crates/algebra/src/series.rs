//! Truncated Laurent expansions of rational functions in one variable.

use crate::expr::RationalExpr;
use crate::symbol::Symbol;
use crate::AlgebraError;

/// `Σ coeffs[k] · s^(valuation + k)`, truncated.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub valuation: i64,
    pub coeffs: Vec<RationalExpr>,
}

impl Laurent {
    /// Coefficient of `s^k` (zero outside the computed window below it).
    pub fn coeff(&self, k: i64) -> RationalExpr {
        let i = k - self.valuation;
        if i < 0 {
            return RationalExpr::zero();
        }
        self.coeffs
            .get(i as usize)
            .cloned()
            .expect("coefficient beyond truncation order")
    }
}

/// Expansion of `f` about `s = 0` with `terms` coefficients. The zero function
/// expands with valuation 0 and all-zero coefficients.
pub fn laurent(f: &RationalExpr, s: &Symbol, terms: usize) -> Laurent {
    if f.is_zero() {
        return Laurent {
            valuation: 0,
            coeffs: vec![RationalExpr::zero(); terms],
        };
    }
    let vn = f.num().min_degree(s) as usize;
    let vd = f.den().min_degree(s) as usize;
    let n: Vec<RationalExpr> = f.num().coeffs(s).into_iter().skip(vn).map(RationalExpr::from).collect();
    let d: Vec<RationalExpr> = f.den().coeffs(s).into_iter().skip(vd).map(RationalExpr::from).collect();
    let d0_inv = d[0].recip().expect("lowest coefficient is nonzero");
    let mut c: Vec<RationalExpr> = Vec::with_capacity(terms);
    for k in 0..terms {
        let mut acc = n.get(k).cloned().unwrap_or_else(RationalExpr::zero);
        for j in 1..=k.min(d.len() - 1) {
            acc = &acc - &(&d[j] * &c[k - j]);
        }
        c.push(&acc * &d0_inv);
    }
    Laurent {
        valuation: vn as i64 - vd as i64,
        coeffs: c,
    }
}

/// Expansion of `f` in `var` about `var = point`, in the local coordinate `s`.
pub fn laurent_at(
    f: &RationalExpr,
    var: &Symbol,
    point: &RationalExpr,
    s: &Symbol,
    terms: usize,
) -> Result<Laurent, AlgebraError> {
    let shifted = f.substitute_one(var, &(point + &RationalExpr::var(s)))?;
    Ok(laurent(&shifted, s, terms))
}

/// Residue of `f` at `var = point`.
pub fn residue_at(f: &RationalExpr, var: &Symbol, point: &RationalExpr) -> Result<RationalExpr, AlgebraError> {
    let s = Symbol::new("__local");
    let shifted = f.substitute_one(var, &(point + &RationalExpr::var(&s)))?;
    if shifted.is_zero() {
        return Ok(RationalExpr::zero());
    }
    let val = shifted.num().min_degree(&s) as i64 - shifted.den().min_degree(&s) as i64;
    if val >= 0 {
        return Ok(RationalExpr::zero());
    }
    let series = laurent(&shifted, &s, (-val) as usize);
    Ok(series.coeff(-1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series() {
        let s = Symbol::new("s");
        let f = RationalExpr::one() / (&RationalExpr::one() - &RationalExpr::var(&s));
        let l = laurent(&f, &s, 4);
        assert_eq!(l.valuation, 0);
        assert!(l.coeffs.iter().all(|c| c.is_one()));
    }

    #[test]
    fn simple_pole_residue() {
        let w = Symbol::new("w");
        let q = RationalExpr::var(&Symbol::new("q"));
        let f = RationalExpr::one() / (&RationalExpr::var(&w) - &q);
        assert!(residue_at(&f, &w, &q).unwrap().is_one());
        let g = &RationalExpr::var(&w) * &RationalExpr::var(&w);
        assert!(residue_at(&g, &w, &RationalExpr::zero()).unwrap().is_zero());
    }
}
