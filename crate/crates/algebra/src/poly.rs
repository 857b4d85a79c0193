//! Sparse multivariate polynomials over ℚ.
//!
//! Terms are kept sorted by descending graded-lexicographic order of their
//! exponent vectors, with variables in canonical [`Symbol`] order. Unused
//! variables are dropped, so structural equality is mathematical equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::rational::{self, Q};
use crate::symbol::Symbol;

pub type Exps = SmallVec<[u16; 8]>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: Arc<[Symbol]>,
    terms: Vec<(Exps, Q)>,
}

pub fn grlex(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Clone, PartialEq, Eq)]
struct Key(Exps);

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        grlex(&self.0, &other.0)
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn no_vars() -> Arc<[Symbol]> {
    Arc::from(Vec::<Symbol>::new())
}

fn same_vars(a: &Arc<[Symbol]>, b: &Arc<[Symbol]>) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

fn union_vars(a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl Poly {
    pub fn zero() -> Poly {
        Poly {
            vars: no_vars(),
            terms: Vec::new(),
        }
    }

    pub fn one() -> Poly {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            vars: no_vars(),
            terms: vec![(Exps::new(), c)],
        }
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(rational::q(n))
    }

    pub fn var(s: &Symbol) -> Poly {
        Poly::monomial(s, 1, Q::one())
    }

    pub fn monomial(s: &Symbol, e: u16, c: Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if e == 0 {
            return Poly::constant(c);
        }
        let mut ex = Exps::new();
        ex.push(e);
        Poly {
            vars: Arc::from(vec![s.clone()]),
            terms: vec![(ex, c)],
        }
    }

    /// Builds a polynomial from arbitrary (unsorted, possibly repeated) terms.
    /// `vars` must be sorted and free of duplicates.
    pub fn from_terms(vars: Vec<Symbol>, terms: Vec<(Exps, Q)>) -> Poly {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        Poly::collect(Arc::from(vars), terms)
    }

    fn collect(vars: Arc<[Symbol]>, mut terms: Vec<(Exps, Q)>) -> Poly {
        terms.sort_unstable_by(|a, b| grlex(&b.0, &a.0));
        let mut out: Vec<(Exps, Q)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { vars, terms: out }.trimmed()
    }

    /// Drops variables that no longer occur.
    fn trimmed(mut self) -> Poly {
        if self.terms.is_empty() {
            self.vars = no_vars();
            return self;
        }
        let n = self.vars.len();
        let used: Vec<bool> = (0..n)
            .map(|i| self.terms.iter().any(|(e, _)| e[i] != 0))
            .collect();
        if used.iter().all(|u| *u) {
            return self;
        }
        let vars: Vec<Symbol> = (0..n)
            .filter(|i| used[*i])
            .map(|i| self.vars[i].clone())
            .collect();
        let terms = self
            .terms
            .into_iter()
            .map(|(e, c)| {
                let ne: Exps = (0..n).filter(|i| used[*i]).map(|i| e[i]).collect();
                (ne, c)
            })
            .collect();
        Poly {
            vars: Arc::from(vars),
            terms,
        }
    }

    /// Terms re-expressed over the superset `vars`; order is preserved.
    fn remapped(&self, vars: &Arc<[Symbol]>) -> Vec<(Exps, Q)> {
        if same_vars(&self.vars, vars) {
            return self.terms.clone();
        }
        let idx: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.binary_search(v).expect("variable superset"))
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut ne: Exps = SmallVec::from_elem(0, vars.len());
                for (k, &i) in idx.iter().enumerate() {
                    ne[i] = e[k];
                }
                (ne, c.clone())
            })
            .collect()
    }

    fn common_vars(&self, other: &Poly) -> Arc<[Symbol]> {
        if same_vars(&self.vars, &other.vars) || other.terms.is_empty() || other.vars.is_empty() {
            self.vars.clone()
        } else if self.vars.is_empty() {
            other.vars.clone()
        } else {
            Arc::from(union_vars(&self.vars, &other.vars))
        }
    }

    pub fn vars(&self) -> &[Symbol] {
        &self.vars
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&[u16], &Q)> + '_ {
        self.terms.iter().map(|(e, c)| (&e[..], c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty() && self.terms.len() == 1 && self.terms[0].1.is_one()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 if self.vars.is_empty() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.vars.binary_search(s).is_ok()
    }

    fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.vars.binary_search(s).ok()
    }

    /// Leading coefficient under the graded-lex order; zero for the zero polynomial.
    pub fn leading_coeff(&self) -> Q {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Q::zero)
    }

    pub fn leading_exps(&self) -> Option<&[u16]> {
        self.terms.first().map(|t| &t.0[..])
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .first()
            .map(|(e, _)| e.iter().map(|&x| x as u32).sum())
            .unwrap_or(0)
    }

    pub fn degree(&self, s: &Symbol) -> u32 {
        match self.index_of(s) {
            Some(i) => self.terms.iter().map(|(e, _)| e[i] as u32).max().unwrap_or(0),
            None => 0,
        }
    }

    pub fn min_degree(&self, s: &Symbol) -> u32 {
        match self.index_of(s) {
            Some(i) => self.terms.iter().map(|(e, _)| e[i] as u32).min().unwrap_or(0),
            None => 0,
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -other } else { other.clone() };
        }
        let vars = self.common_vars(other);
        let a = self.remapped(&vars);
        let b = other.remapped(&vars);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut ia = a.into_iter().peekable();
        let mut ib = b.into_iter().peekable();
        loop {
            let ord = match (ia.peek(), ib.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (Some(x), Some(y)) => grlex(&x.0, &y.0),
            };
            match ord {
                Ordering::Greater => out.push(ia.next().unwrap()),
                Ordering::Less => {
                    let (e, c) = ib.next().unwrap();
                    out.push((e, if negate { -c } else { c }));
                }
                Ordering::Equal => {
                    let (e, c1) = ia.next().unwrap();
                    let (_, c2) = ib.next().unwrap();
                    let c = if negate { c1 - c2 } else { c1 + c2 };
                    if !c.is_zero() {
                        out.push((e, c));
                    }
                }
            }
        }
        Poly { vars, terms: out }.trimmed()
    }

    fn product(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let vars = self.common_vars(other);
        let a = self.remapped(&vars);
        let b = other.remapped(&vars);
        let mut acc: Vec<(Exps, Q)> = Vec::with_capacity(a.len() * b.len());
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Exps = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                acc.push((e, ca * cb));
            }
        }
        Poly::collect(vars, acc)
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&(Q::one() / c)));
        }
        // Every variable of d must occur in self.
        if d.vars.iter().any(|v| !self.contains(v)) {
            return None;
        }
        let vars = self.vars.clone();
        let dt = d.remapped(&vars);
        let (dl_e, dl_c) = dt[0].clone();
        let mut rem: BTreeMap<Key, Q> = self
            .terms
            .iter()
            .map(|(e, c)| (Key(e.clone()), c.clone()))
            .collect();
        let mut quot: Vec<(Exps, Q)> = Vec::new();
        while let Some((Key(le), lc)) = rem.pop_last() {
            if le.iter().zip(dl_e.iter()).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exps = le.iter().zip(dl_e.iter()).map(|(a, b)| a - b).collect();
            let qc = lc / &dl_c;
            for (e, c) in dt.iter().skip(1) {
                let ne: Exps = e.iter().zip(qe.iter()).map(|(a, b)| a + b).collect();
                let delta = c * &qc;
                let key = Key(ne);
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            quot.push((qe, qc));
        }
        Some(Poly { vars, terms: quot }.trimmed())
    }

    pub fn derivative(&self, s: &Symbol) -> Poly {
        let Some(i) = self.index_of(s) else {
            return Poly::zero();
        };
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] > 0)
            .map(|(e, c)| {
                let mut ne = e.clone();
                ne[i] -= 1;
                (ne, c * Q::from_integer(BigInt::from(e[i])))
            })
            .collect();
        Poly::collect(self.vars.clone(), terms)
    }

    /// Coefficients with respect to `s`, indexed by degree.
    pub fn coeffs(&self, s: &Symbol) -> Vec<Poly> {
        let Some(i) = self.index_of(s) else {
            return vec![self.clone()];
        };
        let deg = self.degree(s) as usize;
        let mut buckets: Vec<Vec<(Exps, Q)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[i] as usize;
            ne[i] = 0;
            buckets[k].push((ne, c.clone()));
        }
        // Zeroing one column keeps the relative grlex order within a bucket.
        buckets
            .into_iter()
            .map(|t| Poly { vars: self.vars.clone(), terms: t }.trimmed())
            .collect()
    }

    pub fn from_coeffs(s: &Symbol, coeffs: &[Poly]) -> Poly {
        let mut acc = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = &acc + &(c * &Poly::monomial(s, k as u16, Q::one()));
        }
        acc
    }

    /// Multiplies by `Π vars^shift` (the shift is given over `self.vars()`).
    pub fn shift_exps(&self, shift: &[u16]) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Componentwise minimum exponent vector, over `self.vars()`.
    pub fn min_exps(&self) -> Exps {
        let n = self.vars.len();
        let mut m: Exps = SmallVec::from_elem(u16::MAX, n);
        for (e, _) in &self.terms {
            for i in 0..n {
                m[i] = m[i].min(e[i]);
            }
        }
        if self.terms.is_empty() {
            m.iter_mut().for_each(|x| *x = 0);
        }
        m
    }

    /// Divides by the monomial `Π vars^m` (caller guarantees divisibility).
    pub fn unshift_exps(&self, m: &[u16]) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
        .trimmed()
    }

    pub fn monomial_from(vars: &[Symbol], e: &[u16]) -> Poly {
        Poly {
            vars: Arc::from(vars.to_vec()),
            terms: vec![(e.iter().copied().collect(), Q::one())],
        }
        .trimmed()
    }

    /// Splits into `(c, P)` with `self = c·P`, `P` having coprime integer
    /// coefficients and a positive leading coefficient.
    pub fn integer_primitive(&self) -> (Q, Poly) {
        if self.is_zero() {
            return (Q::one(), Poly::zero());
        }
        let l = rational::lcm_denominators(self.terms.iter().map(|t| &t.1));
        let scaled: Vec<BigInt> = self
            .terms
            .iter()
            .map(|(_, c)| c.numer() * (&l / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for n in &scaled {
            g = num_integer::Integer::gcd(&g, n);
            if g.is_one() {
                break;
            }
        }
        if self.terms[0].1.is_negative() {
            g = -g;
        }
        let terms = self
            .terms
            .iter()
            .zip(scaled)
            .map(|((e, _), n)| (e.clone(), Q::from_integer(n / &g)))
            .collect();
        let content = Q::new(g, l);
        (
            content,
            Poly {
                vars: self.vars.clone(),
                terms,
            },
        )
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.leading_coeff();
        if lc.is_one() {
            return self.clone();
        }
        self.scale(&(Q::one() / lc))
    }

    /// Replaces selected variables by rational numbers.
    pub fn eval_partial(&self, values: &[(Symbol, Q)]) -> Poly {
        let hits: Vec<(usize, &Q)> = values
            .iter()
            .filter_map(|(s, v)| self.index_of(s).map(|i| (i, v)))
            .collect();
        if hits.is_empty() {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne = e.clone();
                let mut k = c.clone();
                for &(i, v) in &hits {
                    if ne[i] > 0 {
                        k *= num_traits::pow::pow(v.clone(), ne[i] as usize);
                        ne[i] = 0;
                    }
                }
                (ne, k)
            })
            .collect();
        Poly::collect(self.vars.clone(), terms)
    }

    /// Rewrites powers of tower constants below their degrees.
    pub fn reduce_tower(&self) -> Poly {
        let mut cur = self.clone();
        let mut consts: Vec<Symbol> = cur.vars.iter().filter(|v| v.is_constant()).cloned().collect();
        if consts.is_empty() {
            return cur;
        }
        consts.sort_by_key(|c| std::cmp::Reverse(c.level()));
        for c in consts {
            let rel = c.relation().expect("tower constant");
            let n = rel.degree as u32;
            if cur.degree(&c) < n {
                continue;
            }
            let parts = cur.coeffs(&c);
            let mut acc = Poly::zero();
            let mut value_pows: Vec<Poly> = vec![Poly::one()];
            for (k, coef) in parts.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                let (qd, r) = (k as u32 / n, k as u32 % n);
                while value_pows.len() <= qd as usize {
                    let next = value_pows.last().unwrap() * &rel.value;
                    value_pows.push(next);
                }
                let term = &(coef * &value_pows[qd as usize]) * &Poly::monomial(&c, r as u16, Q::one());
                acc = &acc + &term;
            }
            cur = acc;
        }
        cur
    }

    pub fn has_tower_constants(&self) -> bool {
        self.vars.iter().any(|v| v.is_constant())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write_to(&mut s);
        s
    }

    fn write_to(&self, out: &mut String) {
        if self.terms.is_empty() {
            out.push('0');
            return;
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let has_mono = e.iter().any(|&x| x != 0);
            let mut first = true;
            if !a.is_one() || !has_mono {
                out.push_str(&rational::render(&a));
                first = false;
            }
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if !first {
                    out.push('*');
                }
                first = false;
                out.push_str(self.vars[i].name());
                if x > 1 {
                    out.push('^');
                    out.push_str(&x.to_string());
                }
            }
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self.render())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.merge(rhs, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.merge(rhs, true)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.product(rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        self.merge(&rhs, false)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self.merge(&rhs, true)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        self.product(&rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
