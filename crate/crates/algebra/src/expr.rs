//! Reduced rational functions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::gcd::{cancel, gcd};
use crate::poly::Poly;
use crate::rational::{self, Q};
use crate::symbol::Symbol;
use crate::AlgebraError;

/// Simultaneous substitution map.
pub type Subst = BTreeMap<Symbol, RationalExpr>;

/// `num/den` with `gcd(num, den) = 1`, `den` free of tower constants and with
/// leading coefficient 1, and tower powers in `num` reduced.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalExpr {
    num: Poly,
    den: Poly,
}

/// Order of vanishing in a distinguished variable; `Infinite` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EpsOrder {
    Finite(i64),
    Infinite,
}

impl EpsOrder {
    pub fn at_least(self, k: i64) -> bool {
        match self {
            EpsOrder::Finite(v) => v >= k,
            EpsOrder::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            EpsOrder::Finite(v) => Some(v),
            EpsOrder::Infinite => None,
        }
    }
}

impl fmt::Display for EpsOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsOrder::Finite(v) => write!(f, "{v}"),
            EpsOrder::Infinite => f.write_str("inf"),
        }
    }
}

impl RationalExpr {
    pub fn zero() -> Self {
        RationalExpr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rational::q(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::constant(rational::q_frac(n, d))
    }

    pub fn constant(c: Q) -> Self {
        RationalExpr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn var(s: &Symbol) -> Self {
        Self::from_poly(Poly::var(s))
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalExpr {
            num: p.reduce_tower(),
            den: Poly::one(),
        }
    }

    /// Canonical form of `num/den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let mut num = num.reduce_tower();
        let mut den = den.reduce_tower();
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if den.has_tower_constants() {
            (num, den) = rationalize(num, den)?;
        }
        let (n, d) = cancel(&num, &den);
        Ok(Self::finish(n, d))
    }

    /// Scales so that the denominator is monic; inputs must already be coprime.
    fn finish(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let lc = den.leading_coeff();
        if den.is_constant() {
            return RationalExpr {
                num: num.scale(&(Q::one() / lc)),
                den: Poly::one(),
            };
        }
        if lc.is_one() {
            return RationalExpr { num, den };
        }
        let inv = Q::one() / lc;
        RationalExpr {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.num.contains(s) || self.den.contains(s)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.num.vars().iter().chain(self.den.vars()).cloned().collect()
    }

    fn has_tower(&self) -> bool {
        self.num.has_tower_constants()
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let n = &self.num + &other.num;
            if self.den.is_one() {
                return Self::finish(n, Poly::one());
            }
            let (n, d) = cancel(&n, &self.den);
            return Self::finish(n, d);
        }
        if self.den.is_one() {
            let n = &(&self.num * &other.den) + &other.num;
            return Self::finish(n, other.den.clone());
        }
        if other.den.is_one() {
            let n = &self.num + &(&other.num * &self.den);
            return Self::finish(n, self.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        if g.is_one() {
            let n = &(&self.num * &other.den) + &(&other.num * &self.den);
            return Self::finish(n, &self.den * &other.den);
        }
        let ad = self.den.div_exact(&g).expect("gcd divides");
        let bd = other.den.div_exact(&g).expect("gcd divides");
        let t = &(&self.num * &bd) + &(&other.num * &ad);
        if t.is_zero() {
            return Self::zero();
        }
        let h = gcd(&t, &g);
        let (t, bd_h) = if h.is_one() {
            (t, other.den.clone())
        } else {
            (
                t.div_exact(&h).expect("gcd divides"),
                other.den.div_exact(&h).expect("gcd divides"),
            )
        };
        Self::finish(t, &ad * &bd_h)
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(c) = other.as_constant() {
            return Self::finish(self.num.scale(&c), self.den.clone());
        }
        if let Some(c) = self.as_constant() {
            return Self::finish(other.num.scale(&c), other.den.clone());
        }
        let (an, bd) = cancel(&self.num, &other.den);
        let (bn, ad) = cancel(&other.num, &self.den);
        let num = &an * &bn;
        let den = &ad * &bd;
        if self.has_tower() && other.has_tower() {
            let num = num.reduce_tower();
            let (n, d) = cancel(&num, &den);
            return Self::finish(n, d);
        }
        Self::finish(num, den)
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul_ref(&other.recip()?))
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::finish(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, n: i64) -> Result<Self, AlgebraError> {
        if n < 0 {
            return self.recip()?.pow(-n);
        }
        let mut result = Self::one();
        let mut base = self.clone();
        let mut n = n as u64;
        if !self.has_tower() {
            // Powers of coprime polynomials stay coprime.
            return Ok(Self::finish(
                self.num.pow(n as u32),
                self.den.pow(n as u32),
            ));
        }
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_ref(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_ref(&base);
            }
        }
        Ok(result)
    }

    /// Partial derivative. Tower constants are not variables.
    pub fn differentiate(&self, v: &Symbol) -> Result<Self, AlgebraError> {
        if v.is_constant() {
            return Err(AlgebraError::UnknownVariable(v.name().to_string()));
        }
        if !self.contains(v) {
            return Ok(Self::zero());
        }
        let dn = self.num.derivative(v);
        if self.den.is_one() {
            return Ok(Self::finish(dn, Poly::one()));
        }
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            let (n, d) = cancel(&dn, &self.den);
            return Ok(Self::finish(n, d));
        }
        let g = gcd(&self.den, &dd);
        let dg = self.den.div_exact(&g).expect("gcd divides");
        let ddg = dd.div_exact(&g).expect("gcd divides");
        let num = &(&dn * &dg) - &(&self.num * &ddg);
        let den = &self.den * &dg;
        if g.is_one() {
            return Ok(Self::finish(num, den));
        }
        let (n, d) = cancel(&num, &den);
        Ok(Self::finish(n, d))
    }

    /// Partial derivative with respect to a variable (never a tower constant).
    pub fn diff(&self, v: &Symbol) -> Self {
        self.differentiate(v)
            .expect("differentiation with respect to a tower constant")
    }

    /// Exact simultaneous substitution.
    pub fn substitute(&self, map: &Subst) -> Result<Self, AlgebraError> {
        if !self.symbols().iter().any(|s| map.contains_key(s)) {
            return Ok(self.clone());
        }
        let (nn, nexp) = compose(&self.num, map);
        let (dn, dexp) = compose(&self.den, map);
        if dn.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let mut num = vec![nn];
        let mut den = vec![dn];
        for (s, image) in map {
            let en = nexp.get(s).copied().unwrap_or(0);
            let ed = dexp.get(s).copied().unwrap_or(0);
            if image.den.is_one() {
                continue;
            }
            if ed > en {
                num.extend(std::iter::repeat_n(image.den.clone(), (ed - en) as usize));
            } else if en > ed {
                den.extend(std::iter::repeat_n(image.den.clone(), (en - ed) as usize));
            }
        }
        Self::from_factors(num, den)
    }

    /// Canonical form of `∏ num / ∏ den`. Cancelling factor by factor keeps
    /// every gcd small; once each numerator factor is coprime to each
    /// denominator factor, the products are coprime too.
    fn from_factors(mut num: Vec<Poly>, mut den: Vec<Poly>) -> Result<Self, AlgebraError> {
        let product = |fs: &[Poly]| fs.iter().fold(Poly::one(), |acc, f| &acc * f);
        if num.iter().chain(&den).any(|f| f.has_tower_constants()) {
            return Self::new(product(&num), product(&den));
        }
        if den.iter().any(|f| f.is_zero()) {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.iter().any(|f| f.is_zero()) {
            return Ok(Self::zero());
        }
        for a in num.iter_mut() {
            for b in den.iter_mut() {
                if a.is_constant() {
                    break;
                }
                let (x, y) = cancel(a, b);
                *a = x;
                *b = y;
            }
        }
        Ok(Self::finish(product(&num), product(&den)))
    }

    pub fn substitute_one(&self, s: &Symbol, image: &Self) -> Result<Self, AlgebraError> {
        let mut m = Subst::new();
        m.insert(s.clone(), image.clone());
        self.substitute(&m)
    }

    /// Lowest exponent of `eps` in a Laurent expansion about `eps = 0`.
    pub fn eps_valuation(&self, eps: &Symbol) -> EpsOrder {
        if self.is_zero() {
            return EpsOrder::Infinite;
        }
        EpsOrder::Finite(self.num.min_degree(eps) as i64 - self.den.min_degree(eps) as i64)
    }

    /// Valuation together with the `eps`-free leading coefficient.
    pub fn eps_leading(&self, eps: &Symbol) -> Option<(i64, Self)> {
        if self.is_zero() {
            return None;
        }
        let vn = self.num.min_degree(eps);
        let vd = self.den.min_degree(eps);
        let cn = self.num.coeffs(eps).swap_remove(vn as usize);
        let cd = self.den.coeffs(eps).swap_remove(vd as usize);
        let lead = Self::new(cn, cd).expect("nonzero lowest coefficient");
        Some((vn as i64 - vd as i64, lead))
    }

    /// Exact value at a rational point. Every symbol must be assigned.
    pub fn eval_q(&self, point: &HashMap<Symbol, Q>) -> Result<Q, AlgebraError> {
        let n = eval_poly_q(&self.num, point)?;
        let d = eval_poly_q(&self.den, point)?;
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(n / d)
    }

    /// Floating-point value; tower constants take their principal values.
    pub fn eval_c64(&self, value: &dyn Fn(&Symbol) -> Option<Complex64>) -> Result<Complex64, AlgebraError> {
        let n = eval_poly_c64(&self.num, value)?;
        let d = eval_poly_c64(&self.den, value)?;
        Ok(n / d)
    }

    pub fn render(&self) -> String {
        crate::exprlang::render(self)
    }
}

pub(crate) fn eval_poly_q(p: &Poly, point: &HashMap<Symbol, Q>) -> Result<Q, AlgebraError> {
    let vals: Vec<&Q> = p
        .vars()
        .iter()
        .map(|s| {
            point
                .get(s)
                .ok_or_else(|| AlgebraError::UnknownVariable(s.name().to_string()))
        })
        .collect::<Result<_, _>>()?;
    let mut acc = Q::zero();
    for (e, c) in p.terms() {
        let mut t = c.clone();
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                t *= num_traits::pow::pow(vals[i].clone(), k as usize);
            }
        }
        acc += t;
    }
    Ok(acc)
}

pub(crate) fn symbol_c64(
    s: &Symbol,
    value: &dyn Fn(&Symbol) -> Option<Complex64>,
) -> Result<Complex64, AlgebraError> {
    if let Some(v) = value(s) {
        return Ok(v);
    }
    if let Some(rel) = s.relation() {
        if rel.numeric.re.is_finite() {
            return Ok(rel.numeric);
        }
        let base = eval_poly_c64(&rel.value, value)?;
        return Ok(base.powf(1.0 / rel.degree as f64));
    }
    Err(AlgebraError::UnknownVariable(s.name().to_string()))
}

pub(crate) fn eval_poly_c64(
    p: &Poly,
    value: &dyn Fn(&Symbol) -> Option<Complex64>,
) -> Result<Complex64, AlgebraError> {
    let vals: Vec<Complex64> = p
        .vars()
        .iter()
        .map(|s| symbol_c64(s, value))
        .collect::<Result<_, _>>()?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (e, c) in p.terms() {
        let mut t = Complex64::new(rational::to_f64(c), 0.0);
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                t *= vals[i].powu(k as u32);
            }
        }
        acc += t;
    }
    Ok(acc)
}

/// Substitutes into a polynomial. Returns the numerator and, for each mapped
/// symbol, the power of its image denominator that divides the result.
fn compose(p: &Poly, map: &Subst) -> (Poly, BTreeMap<Symbol, u32>) {
    let vars = p.vars();
    let mapped: Vec<(usize, &RationalExpr)> = vars
        .iter()
        .enumerate()
        .filter_map(|(i, s)| map.get(s).map(|img| (i, img)))
        .collect();
    let mut exps_out = BTreeMap::new();
    if mapped.is_empty() {
        return (p.clone(), exps_out);
    }
    let max_e: Vec<u32> = mapped.iter().map(|(i, _)| p.degree(&vars[*i])).collect();
    for ((i, _), e) in mapped.iter().zip(&max_e) {
        exps_out.insert(vars[*i].clone(), *e);
    }
    // Group terms by their exponents in the mapped variables.
    let mut groups: BTreeMap<Vec<u16>, Vec<(crate::poly::Exps, Q)>> = BTreeMap::new();
    for (e, c) in p.terms() {
        let key: Vec<u16> = mapped.iter().map(|(i, _)| e[*i]).collect();
        let mut rest: crate::poly::Exps = e.iter().copied().collect();
        for (i, _) in &mapped {
            rest[*i] = 0;
        }
        groups.entry(key).or_default().push((rest, c.clone()));
    }
    let mut num_pows: Vec<Vec<Poly>> = Vec::new();
    let mut den_pows: Vec<Vec<Poly>> = Vec::new();
    for ((_, img), &m) in mapped.iter().zip(&max_e) {
        let mut np = vec![Poly::one()];
        let mut dp = vec![Poly::one()];
        for k in 1..=m as usize {
            np.push(&np[k - 1] * &img.num);
            dp.push(if img.den.is_one() {
                Poly::one()
            } else {
                &dp[k - 1] * &img.den
            });
        }
        num_pows.push(np);
        den_pows.push(dp);
    }
    let mut acc = Poly::zero();
    for (key, rest) in groups {
        let mut factor = Poly::from_terms(vars.to_vec(), rest);
        for (j, &k) in key.iter().enumerate() {
            let k = k as usize;
            factor = &factor * &num_pows[j][k];
            let dk = max_e[j] as usize - k;
            if dk > 0 && !den_pows[j][dk].is_one() {
                factor = &factor * &den_pows[j][dk];
            }
        }
        acc = &acc + &factor;
    }
    (acc.reduce_tower(), exps_out)
}

/// Multiplies numerator and denominator by a cofactor that clears every tower
/// constant from the denominator.
fn rationalize(mut num: Poly, mut den: Poly) -> Result<(Poly, Poly), AlgebraError> {
    let mut consts: Vec<Symbol> = den.vars().iter().filter(|v| v.is_constant()).cloned().collect();
    consts.sort_by_key(|c| std::cmp::Reverse(c.level()));
    for c in consts {
        if !den.contains(&c) {
            continue;
        }
        let rel = c.relation().expect("tower constant").clone();
        let n = rel.degree as usize;
        let mut a = den.coeffs(&c);
        a.resize(n, Poly::zero());
        let r = &rel.value;
        let m: Vec<Vec<Poly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i >= j { a[i - j].clone() } else { r * &a[n + i - j] })
                    .collect()
            })
            .collect();
        // cofactor u_j = (-1)^j det(M without row 0 and column j)
        let mut u = Poly::zero();
        for j in 0..n {
            let minor: Vec<Vec<Poly>> = (1..n)
                .map(|i| (0..n).filter(|&k| k != j).map(|k| m[i][k].clone()).collect())
                .collect();
            let mut d = det(&minor);
            if j % 2 == 1 {
                d = -d;
            }
            u = &u + &(&d * &Poly::monomial(&c, j as u16, Q::one()));
        }
        let u = u.reduce_tower();
        let new_den = (&den * &u).reduce_tower();
        if new_den.contains(&c) || new_den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        num = (&num * &u).reduce_tower();
        den = new_den;
    }
    Ok((num, den))
}

fn det(m: &[Vec<Poly>]) -> Poly {
    match m.len() {
        0 => Poly::one(),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        n => {
            let mut acc = Poly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = (1..n)
                    .map(|i| (0..n).filter(|&k| k != j).map(|k| m[i][k].clone()).collect())
                    .collect();
                let t = &m[0][j] * &det(&minor);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalExpr({})", self.render())
    }
}

impl From<Poly> for RationalExpr {
    fn from(p: Poly) -> Self {
        RationalExpr::from_poly(p)
    }
}

impl From<i64> for RationalExpr {
    fn from(n: i64) -> Self {
        RationalExpr::int(n)
    }
}

impl From<Q> for RationalExpr {
    fn from(c: Q) -> Self {
        RationalExpr::constant(c)
    }
}

impl From<&Symbol> for RationalExpr {
    fn from(s: &Symbol) -> Self {
        RationalExpr::var(s)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&RationalExpr> for &RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: &RationalExpr) -> RationalExpr {
                let f: fn(&RationalExpr, &RationalExpr) -> RationalExpr = $body;
                f(self, rhs)
            }
        }
        impl $tr<RationalExpr> for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: RationalExpr) -> RationalExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalExpr> for RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: &RationalExpr) -> RationalExpr {
                (&self).$m(rhs)
            }
        }
        impl $tr<RationalExpr> for &RationalExpr {
            type Output = RationalExpr;
            fn $m(self, rhs: RationalExpr) -> RationalExpr {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_ref(b));
forward_binop!(Sub, sub, |a, b| a.add_ref(&-b));
forward_binop!(Mul, mul, |a, b| a.mul_ref(b));
// Panics on division by zero; use `checked_div` for a fallible variant.
forward_binop!(Div, div, |a, b| a.checked_div(b).expect("division by zero"));

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        RationalExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::ConstantTower;

    fn v(n: &str) -> RationalExpr {
        RationalExpr::var(&Symbol::new(n))
    }

    #[test]
    fn exact_cancellation() {
        let x = v("x");
        let one = RationalExpr::one();
        let f = (&(&x * &x) - &one) / (&x - &one);
        assert_eq!(f, &x + &one);
    }

    #[test]
    fn tower_square() {
        let mut tower = ConstantTower::new();
        let s = tower.adjoin("sqrt2", 2, Poly::int(2)).unwrap();
        let r = RationalExpr::var(&s);
        assert_eq!(&r * &r, RationalExpr::int(2));
        // 1/(1+sqrt2) = sqrt2 - 1
        let inv = RationalExpr::one() / (&RationalExpr::one() + &r);
        assert_eq!(inv, &r - &RationalExpr::one());
    }

    #[test]
    fn cube_root_tower_inverse() {
        let mut tower = ConstantTower::new();
        let c = tower.adjoin("cbrt2", 3, Poly::int(2)).unwrap();
        let r = RationalExpr::var(&c);
        let x = v("x");
        let f = &RationalExpr::one() / &(&x + &r);
        let back = &(&x + &r) * &f;
        assert_eq!(back, RationalExpr::one());
        assert!(!f.den().has_tower_constants());
    }

    #[test]
    fn quotient_rule() {
        let x = Symbol::new("x");
        let f = RationalExpr::one() / (&v("x") - &v("y"));
        let expected = -(RationalExpr::one() / (&(&v("x") - &v("y")) * &(&v("x") - &v("y"))));
        assert_eq!(f.diff(&x), expected);
    }

    #[test]
    fn substitution_with_negative_powers() {
        let eps = Symbol::new("eps");
        let e = RationalExpr::var(&eps);
        let img = &(&v("y") / &e) - &(&v("beta") / &e.pow(6).unwrap());
        let f = v("y").substitute_one(&Symbol::new("y"), &img).unwrap();
        assert_eq!(f.eps_valuation(&eps), EpsOrder::Finite(-6));
        assert_eq!(f.den().render(), "eps^6");
    }

    #[test]
    fn valuation_of_quotient() {
        let eps = Symbol::new("eps");
        let e = RationalExpr::var(&eps);
        let f = (&e.pow(2).unwrap() + &e.pow(3).unwrap()) / e.pow(5).unwrap();
        assert_eq!(f.eps_valuation(&eps), EpsOrder::Finite(-3));
        assert_eq!(RationalExpr::zero().eps_valuation(&eps), EpsOrder::Infinite);
    }

    #[test]
    fn henrici_addition_reduces() {
        let x = v("x");
        let one = RationalExpr::one();
        let a = &one / &(&x * &x);
        let b = &one / &x;
        let s = &(&a - &b) + &b;
        assert_eq!(s, a);
        let c = (&one / &(&x - &one)) - (&one / &(&x + &one));
        assert_eq!(c.render(), "2/(x^2 - 1)");
    }
}
