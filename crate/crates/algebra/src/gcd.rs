//! Multivariate polynomial gcd.
//!
//! Cheap structural reductions first (monomial content, variables present in
//! only one operand), then a modular degree bound per variable to detect
//! variables absent from the gcd, then a heuristic gcd by integer evaluation,
//! and as a fallback content/primitive-part splitting with a subresultant
//! remainder sequence in one variable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::modular::{self, PRIME};
use crate::poly::{Exps, Poly};
use crate::rational::{self, Q};
use crate::symbol::Symbol;

/// Greatest common divisor, normalized to coprime integer coefficients with a
/// positive leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.integer_primitive().1;
    }
    if b.is_zero() {
        return a.integer_primitive().1;
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.integer_primitive().1;
    }
    let (ma, a1) = strip_monomial(a);
    let (mb, b1) = strip_monomial(b);
    let mono = monomial_gcd(&ma, &mb);
    let g = gcd_stripped(&a1, &b1);
    (&mono * &g).integer_primitive().1
}

/// Gcd of a list; early exit once it becomes 1.
pub fn gcd_many<'a>(items: impl IntoIterator<Item = &'a Poly>) -> Poly {
    let mut g = Poly::zero();
    for p in items {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

fn strip_monomial(p: &Poly) -> (Poly, Poly) {
    let m = p.min_exps();
    if m.iter().all(|&e| e == 0) {
        return (Poly::one(), p.clone());
    }
    (Poly::monomial_from(p.vars(), &m), p.unshift_exps(&m))
}

fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_one() || b.is_one() {
        return Poly::one();
    }
    let mut result = Poly::one();
    for v in a.vars() {
        let e = a.degree(v).min(b.degree(v));
        if e > 0 {
            result = &result * &Poly::monomial(v, e as u16, Q::one());
        }
    }
    result
}

/// Both operands have trivial monomial content.
fn gcd_stripped(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    // A variable occurring in only one operand cannot occur in the gcd.
    if let Some(v) = a.vars().iter().find(|v| !b.contains(v)) {
        return gcd_with_coeffs(a, v, b);
    }
    if let Some(v) = b.vars().iter().find(|v| !a.contains(v)) {
        return gcd_with_coeffs(b, v, a);
    }
    let (_, a) = a.integer_primitive();
    let (_, b) = b.integer_primitive();
    if a == b {
        return a;
    }
    let vars: Vec<Symbol> = a.vars().to_vec();
    let bounds = degree_bounds(&a, &b, &vars);
    if bounds.iter().all(|&d| d == 0) {
        return Poly::one();
    }
    if let Some(i) = bounds.iter().position(|&d| d == 0) {
        // The gcd is free of this variable: it divides every coefficient.
        let v = &vars[i];
        let mut coeffs = a.coeffs(v);
        coeffs.extend(b.coeffs(v));
        coeffs.sort_by_key(|c| c.len());
        return gcd_many(coeffs.iter());
    }
    // Trial division when the bound says the smaller operand may be the gcd.
    if vars.iter().zip(&bounds).all(|(v, &d)| d == b.degree(v)) {
        if a.div_exact(&b).is_some() {
            return b;
        }
    }
    if vars.iter().zip(&bounds).all(|(v, &d)| d == a.degree(v)) {
        if b.div_exact(&a).is_some() {
            return a;
        }
    }
    let v = vars
        .iter()
        .min_by_key(|v| (a.degree(v).max(b.degree(v)), std::cmp::Reverse((*v).clone())))
        .unwrap()
        .clone();
    if let Some(g) = heuristic_gcd(&a, &b, &vars) {
        return g;
    }
    gcd_in_var(&a, &b, &v)
}

const HEURISTIC_TRIES: usize = 6;

/// Char-Geddes-Gonnet heuristic on primitive integer polynomials: evaluate
/// the last variable at a large integer, recurse, and read the candidate back
/// off in balanced base `xi`. Candidates are confirmed by exact division, so a
/// poor evaluation point costs time but never correctness.
fn heuristic_gcd(a: &Poly, b: &Poly, vars: &[Symbol]) -> Option<Poly> {
    // Inner levels need the full gcd of the images, integer content included.
    let (ca, a) = a.integer_primitive();
    let (cb, b) = b.integer_primitive();
    let content = Q::from_integer(ca.numer().gcd(cb.numer()));
    let Some((v, rest)) = vars.split_last() else {
        return Some(Poly::constant(content));
    };
    let (na, nb) = (max_norm(&a), max_norm(&b));
    let mut xi: BigInt = na.min(nb) * 2 + 29;
    for _ in 0..HEURISTIC_TRIES {
        let at = [(v.clone(), Q::from_integer(xi.clone()))];
        let (ea, eb) = (a.eval_partial(&at), b.eval_partial(&at));
        if !ea.is_zero() && !eb.is_zero() {
            let h = heuristic_gcd(&ea, &eb, rest)?;
            let candidates = [
                Some(lift(&h, v, &xi)),
                ea.div_exact(&h).and_then(|c| a.div_exact(&lift(&c, v, &xi))),
                eb.div_exact(&h).and_then(|c| b.div_exact(&lift(&c, v, &xi))),
            ];
            for c in candidates.into_iter().flatten() {
                let g = c.integer_primitive().1;
                if !g.is_zero() && a.div_exact(&g).is_some() && b.div_exact(&g).is_some() {
                    return Some(g.scale(&content));
                }
            }
        }
        xi = xi.clone() * 73794u32 * xi.sqrt().sqrt() / 27011u32;
    }
    None
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms().map(|(_, c)| c.numer().abs()).max().unwrap_or_default()
}

/// Expands every integer coefficient of `h` in balanced base `xi`, the k-th
/// digit becoming the coefficient of `v^k`.
fn lift(h: &Poly, v: &Symbol, xi: &BigInt) -> Poly {
    let mut vars: Vec<Symbol> = h.vars().to_vec();
    let slot = match vars.binary_search(v) {
        Ok(i) => i,
        Err(i) => {
            vars.insert(i, v.clone());
            i
        }
    };
    let half = xi / 2;
    let mut terms = Vec::new();
    for (e, c) in h.terms() {
        let mut n = c.numer().clone();
        let mut k: u16 = 0;
        while !n.is_zero() {
            let mut d = n.mod_floor(xi);
            if d > half {
                d -= xi;
            }
            n = (n - &d) / xi;
            if !d.is_zero() {
                let mut ne: Exps = SmallVec::with_capacity(vars.len());
                ne.extend(vars.iter().map(|s| match h.vars().binary_search(s) {
                    Ok(j) => e[j],
                    Err(_) => 0,
                }));
                ne[slot] = k;
                terms.push((ne, Q::from_integer(d)));
            }
            k += 1;
        }
    }
    Poly::from_terms(vars, terms)
}

/// gcd(a, b) where `v` occurs in `a` but not in `b`.
fn gcd_with_coeffs(a: &Poly, v: &Symbol, b: &Poly) -> Poly {
    let mut coeffs = a.coeffs(v);
    coeffs.retain(|c| !c.is_zero());
    coeffs.sort_by_key(|c| c.len());
    let mut g = b.clone();
    for c in &coeffs {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Upper bounds on `deg_v gcd(a, b)` for each variable, from univariate
/// images modulo a prime at random points where both leading coefficients
/// survive. Valid bounds: the image of the true gcd divides the image gcd.
fn degree_bounds(a: &Poly, b: &Poly, vars: &[Symbol]) -> Vec<u32> {
    let mut rng = StdRng::seed_from_u64(0x5eed_9c0d);
    let p = PRIME;
    let ca: Vec<u64> = a.terms().map(|(_, c)| rational::mod_p(c, p).unwrap()).collect();
    let cb: Vec<u64> = b.terms().map(|(_, c)| rational::mod_p(c, p).unwrap()).collect();
    let mut out = Vec::with_capacity(vars.len());
    for i in 0..vars.len() {
        let da = a.degree(&vars[i]) as usize;
        let db = b.degree(&vars[i]) as usize;
        let mut bound = da.min(db) as u32;
        for _attempt in 0..4 {
            let point: Vec<u64> = (0..vars.len()).map(|_| rng.gen_range(1..p)).collect();
            let ia = image(a, &ca, i, &point, p, da);
            let ib = image(b, &cb, i, &point, p, db);
            if ia[da] == 0 || ib[db] == 0 {
                continue;
            }
            bound = modular::gcd_degree(ia, ib, p).unwrap_or(0) as u32;
            break;
        }
        out.push(bound);
    }
    out
}

fn image(poly: &Poly, coeffs: &[u64], keep: usize, point: &[u64], p: u64, deg: usize) -> Vec<u64> {
    let mut out = vec![0u64; deg + 1];
    for ((exps, _), c) in poly.terms().zip(coeffs) {
        let mut val = *c;
        for (j, &e) in exps.iter().enumerate() {
            if j != keep && e > 0 {
                val = modular::mul_mod(val, modular::pow_mod(point[j], e as u64, p), p);
            }
        }
        let k = exps[keep] as usize;
        out[k] = modular::add_mod(out[k], val, p);
    }
    out
}

/// Content/primitive decomposition in `v`, then a subresultant sequence.
fn gcd_in_var(a: &Poly, b: &Poly, v: &Symbol) -> Poly {
    let ua = a.coeffs(v);
    let ub = b.coeffs(v);
    let ca = gcd_many(ua.iter().filter(|c| !c.is_zero()));
    let cb = gcd_many(ub.iter().filter(|c| !c.is_zero()));
    let content = gcd(&ca, &cb);
    let pa: Vec<Poly> = ua.iter().map(|c| c.div_exact(&ca).expect("content divides")).collect();
    let pb: Vec<Poly> = ub.iter().map(|c| c.div_exact(&cb).expect("content divides")).collect();
    let g = if pa.len() >= pb.len() {
        subresultant(pa, pb)
    } else {
        subresultant(pb, pa)
    };
    let gp = primitive_part(&g);
    (&content * &Poly::from_coeffs(v, &gp)).integer_primitive().1
}

fn primitive_part(u: &[Poly]) -> Vec<Poly> {
    let c = gcd_many(u.iter().filter(|c| !c.is_zero()));
    if c.is_one() || c.is_zero() {
        return u.to_vec();
    }
    u.iter().map(|x| x.div_exact(&c).expect("content divides")).collect()
}

fn trim(u: &mut Vec<Poly>) {
    while u.last().map(|c| c.is_zero()).unwrap_or(false) {
        u.pop();
    }
}

/// Pseudo-remainder of `a` by `b` (dense in the main variable).
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut steps = a.len() as i64 - b.len() as i64 + 1;
    while r.len() > db && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&lr * bc);
        }
        r.pop();
        trim(&mut r);
        steps -= 1;
    }
    if steps > 0 {
        let f = lb.pow(steps as u32);
        for c in r.iter_mut() {
            *c = &*c * &f;
        }
    }
    r
}

fn subresultant(mut a: Vec<Poly>, mut b: Vec<Poly>) -> Vec<Poly> {
    trim(&mut a);
    trim(&mut b);
    if b.is_empty() {
        return a;
    }
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = (a.len() - b.len()) as u32;
        let r = prem(&a, &b);
        if r.is_empty() {
            return b;
        }
        if r.len() == 1 {
            return vec![Poly::one()];
        }
        let divisor = &g * &h.pow(delta);
        let r: Vec<Poly> = r
            .iter()
            .map(|c| c.div_exact(&divisor).expect("subresultant division is exact"))
            .collect();
        a = b;
        b = r;
        g = a.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            let num = g.pow(delta);
            let den = h.pow(delta - 1);
            num.div_exact(&den).expect("subresultant h update is exact")
        };
    }
}

/// `a / b` as reduced rational function data: returns `(a/g, b/g)`.
pub fn cancel(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let g = gcd(a, b);
    if g.is_one() || g.is_zero() {
        return (a.clone(), b.clone());
    }
    (
        a.div_exact(&g).expect("gcd divides"),
        b.div_exact(&g).expect("gcd divides"),
    )
}
