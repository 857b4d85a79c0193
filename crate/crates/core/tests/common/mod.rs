//! Independent numeric oracles: every derivative here is a finite difference
//! of complex point evaluations, never the symbolic `diff`.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64 as C;
use painleve_algebra::{RationalExpr, Symbol};
use painleve_core::catalog::vars;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Pt = BTreeMap<Symbol, C>;

const H: f64 = 2e-3;

pub fn ev(e: &RationalExpr, pt: &Pt) -> C {
    e.eval_c64(&|s: &Symbol| pt.get(s).copied()).expect("numeric evaluation")
}

/// Five-point central difference in `s`.
pub fn d(f: &dyn Fn(&Pt) -> C, pt: &Pt, s: &Symbol) -> C {
    let at = |k: f64| {
        let mut p = pt.clone();
        *p.get_mut(s).expect("symbol in point") += k * H;
        f(&p)
    };
    (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * H)
}

pub fn free_symbols<'a>(es: impl IntoIterator<Item = &'a RationalExpr>) -> BTreeSet<Symbol> {
    es.into_iter()
        .flat_map(|e| e.symbols())
        .filter(|s| !s.is_constant())
        .collect()
}

/// Random complex point with the variables `x`, `y`, `t` kept apart from each
/// other and from 0, 1 so that finite differences stay away from poles.
pub fn random_point(syms: &BTreeSet<Symbol>, rng: &mut StdRng) -> Pt {
    loop {
        let pt: Pt = syms
            .iter()
            .map(|s| {
                let r = rng.gen_range(0.6..1.8);
                let th = rng.gen_range(0.0..std::f64::consts::TAU);
                (s.clone(), C::from_polar(r, th))
            })
            .collect();
        let mut special: Vec<C> = vec![C::new(0.0, 0.0), C::new(1.0, 0.0)];
        for s in [vars::x(), vars::y(), vars::t(), vars::w(), Symbol::new("q")] {
            if let Some(v) = pt.get(&s) {
                special.push(*v);
            }
        }
        let apart = special
            .iter()
            .enumerate()
            .all(|(i, a)| special[i + 1..].iter().all(|b| (a - b).norm() > 0.25));
        if apart {
            return pt;
        }
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// `f_t + H_z f_y − H_y f_z` by differences.
pub fn flow_d<'a>(h: &'a dyn Fn(&Pt) -> C, f: &'a dyn Fn(&Pt) -> C) -> impl Fn(&Pt) -> C + 'a {
    move |p: &Pt| {
        let (t, y, z) = (vars::t(), vars::y(), vars::z());
        d(f, p, &t) + d(h, p, &z) * d(f, p, &y) - d(h, p, &y) * d(f, p, &z)
    }
}

/// Residuals of the canonical compatibility conditions at `pt`, each divided
/// by the largest term that enters it.
pub fn canonical_residuals(p: &RationalExpr, q: &RationalExpr, a: &RationalExpr, b: &RationalExpr, h: &RationalExpr, pt: &Pt) -> (f64, f64) {
    let x = vars::x();
    let fp = |pt: &Pt| ev(p, pt);
    let fq = |pt: &Pt| ev(q, pt);
    let fa = |pt: &Pt| ev(a, pt);
    let fb = |pt: &Pt| ev(b, pt);
    let fh = |pt: &Pt| ev(h, pt);
    let pa = |pt: &Pt| ev(p, pt) * ev(a, pt);
    let ax = |pt: &Pt| d(&fa, pt, &x);
    let bx = |pt: &Pt| d(&fb, pt, &x);
    let dp = flow_d(&fh, &fp)(pt);
    let dq = flow_d(&fh, &fq)(pt);
    let t1 = [dp, -d(&pa, pt, &x), d(&ax, pt, &x), 2.0 * bx(pt)];
    let t2 = [
        dq,
        -2.0 * fq(pt) * ax(pt),
        -d(&fq, pt, &x) * fa(pt),
        fp(pt) * bx(pt),
        d(&bx, pt, &x),
    ];
    (relative(&t1), relative(&t2))
}

/// Residual of the SL compatibility condition at `pt`, relative.
pub fn sl_residual(p: &RationalExpr, a: &RationalExpr, k: &RationalExpr, pt: &Pt) -> f64 {
    let x = vars::x();
    let fp = |pt: &Pt| ev(p, pt);
    let fa = |pt: &Pt| ev(a, pt);
    let fk = |pt: &Pt| ev(k, pt);
    let ax = |pt: &Pt| d(&fa, pt, &x);
    let axx = |pt: &Pt| d(&ax, pt, &x);
    let terms = [
        flow_d(&fk, &fp)(pt),
        -2.0 * fp(pt) * ax(pt),
        -fa(pt) * d(&fp, pt, &x),
        0.5 * d(&axx, pt, &x),
    ];
    relative(&terms)
}

/// `y'' − F(y', y, t)` along the flow of `h`, relative. `rhs` already has
/// its parameters specialized.
pub fn elimination_residual(h: &RationalExpr, rhs: &RationalExpr, pt: &Pt) -> f64 {
    let (z, yp) = (vars::z(), vars::yp());
    let fh = |pt: &Pt| ev(h, pt);
    let hz = |pt: &Pt| d(&fh, pt, &z);
    let ypp = flow_d(&fh, &hz)(pt);
    let mut at = pt.clone();
    at.insert(yp, hz(pt));
    let f = ev(rhs, &at);
    relative(&[ypp, -f])
}

pub fn relative(terms: &[C]) -> f64 {
    let sum: C = terms.iter().sum();
    let scale = terms.iter().map(|t| t.norm()).fold(1.0, f64::max);
    sum.norm() / scale
}
