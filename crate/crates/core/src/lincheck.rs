//! Compatibility of linear problems with Hamiltonian flows, local singularity
//! data, apparent-singularity certificates and gauge changes.

use painleve_algebra::series::laurent_at;
use painleve_algebra::{AlgebraError, Q, RationalExpr, Subst, Symbol};

use crate::catalog::vars;

/// `u_xx + p u_x + q u = 0`, `u_t = a u_x + b u`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearData {
    pub p: RationalExpr,
    pub q: RationalExpr,
    pub a: RationalExpr,
    pub b: RationalExpr,
}

/// Vector field of a one-degree-of-freedom system.
#[derive(Clone, Debug)]
pub struct Flow {
    pub t: Symbol,
    pub fields: Vec<(Symbol, RationalExpr)>,
}

impl Flow {
    /// `y' = H_z`, `z' = -H_y`.
    pub fn hamiltonian(h: &RationalExpr) -> Flow {
        Flow::hamiltonian_in(h, &vars::y(), &vars::z())
    }

    pub fn hamiltonian_in(h: &RationalExpr, y: &Symbol, z: &Symbol) -> Flow {
        Flow {
            t: vars::t(),
            fields: vec![(y.clone(), h.diff(z)), (z.clone(), -h.diff(y))],
        }
    }

    /// Total derivative `f_t + Σ v' f_v`.
    pub fn derivative(&self, f: &RationalExpr) -> RationalExpr {
        crate::matrixlab::flow_derivative(f, &self.t, &self.fields)
    }
}

pub fn flow_derivative(f: &RationalExpr, flow: &Flow) -> RationalExpr {
    flow.derivative(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompatStatus {
    Exact,
    /// Only an `x`-free term survives in the first residual.
    ZeroModS,
    Fail,
}

#[derive(Clone, Debug)]
pub struct CompatReport {
    pub residuals: Vec<RationalExpr>,
    pub status: CompatStatus,
}

/// Residuals of the compatibility of `u_xx + p u_x + q u = 0` with
/// `u_t = a u_x + b u` along the flow:
///
/// `p_t − (p a)_x + a_xx + 2 b_x` and `q_t − 2 q a_x − q_x a + p b_x + b_xx`.
pub fn canonical_compat(data: &LinearData, flow: &Flow) -> CompatReport {
    let x = vars::x();
    let LinearData { p, q, a, b } = data;
    let ax = a.diff(&x);
    let bx = b.diff(&x);
    let r1 = &(&(&flow.derivative(p) - &(p * a).diff(&x)) + &ax.diff(&x)) + &(&RationalExpr::int(2) * &bx);
    let r2 = &(&(&flow.derivative(q) - &(&(&RationalExpr::int(2) * q) * &ax)) - &(&q.diff(&x) * a))
        + &(&(p * &bx) + &bx.diff(&x));
    let status = if r1.is_zero() && r2.is_zero() {
        CompatStatus::Exact
    } else if r2.is_zero() && !r1.contains(&x) {
        CompatStatus::ZeroModS
    } else {
        CompatStatus::Fail
    };
    CompatReport {
        residuals: vec![r1, r2],
        status,
    }
}

/// Residual `p_t − 2 p A_x − A p_x + ½ A_xxx` of `u_xx = p u`,
/// `u_t = A u_x − ½ A_x u`.
pub fn sl_compat(p: &RationalExpr, a: &RationalExpr, flow: &Flow) -> CompatReport {
    let x = vars::x();
    let ax = a.diff(&x);
    let r = &(&(&flow.derivative(p) - &(&(&RationalExpr::int(2) * p) * &ax)) - &(a * &p.diff(&x)))
        + &ax.diff(&x).diff(&x).scale(&painleve_algebra::q_frac(1, 2));
    let status = if r.is_zero() { CompatStatus::Exact } else { CompatStatus::Fail };
    CompatReport {
        residuals: vec![r],
        status,
    }
}

/// Gauge `u = f v` with `f_x/f = gx`, `f_t/f = gt`.
pub fn gauge(data: &LinearData, x: &Symbol, gx: &RationalExpr, gt: &RationalExpr) -> LinearData {
    let two = RationalExpr::int(2);
    LinearData {
        p: &data.p + &(&two * gx),
        q: &(&(&data.q + &(gx * gx)) + &gx.diff(x)) + &(&data.p * gx),
        a: data.a.clone(),
        b: &(&data.b + &(&data.a * gx)) - gt,
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinError {
    #[error("change of variables has vanishing x-derivative")]
    DegenerateMap,
    #[error("pole of {0} is not at a recognised location")]
    UnresolvedPole(String),
    #[error("wrong local shape at the apparent point: {0}")]
    WrongLocalShape(String),
    #[error("local exponents do not differ by a positive integer")]
    NonResonant,
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
}

/// Old `x = φ(x, t)` and old `t = ψ(t)` from `map`; every other mapped symbol
/// is substituted as well.
pub fn change_variables(data: &LinearData, map: &Subst) -> Result<LinearData, LinError> {
    let x = vars::x();
    let t = vars::t();
    let phi = map.get(&x).cloned().unwrap_or_else(|| RationalExpr::var(&x));
    let psi = map.get(&t).cloned().unwrap_or_else(|| RationalExpr::var(&t));
    if psi.contains(&x) {
        return Err(LinError::DegenerateMap);
    }
    let phi_x = phi.diff(&x);
    if phi_x.is_zero() {
        return Err(LinError::DegenerateMap);
    }
    let phi_xx = phi_x.diff(&x);
    let phi_t = phi.diff(&t);
    let psi_t = psi.diff(&t);
    let p = data.p.substitute(map)?;
    let q = data.q.substitute(map)?;
    let a = data.a.substitute(map)?;
    let b = data.b.substitute(map)?;
    Ok(LinearData {
        p: &(&p * &phi_x) - &phi_xx.checked_div(&phi_x)?,
        q: &q * &(&phi_x * &phi_x),
        a: (&phi_t + &(&psi_t * &a)).checked_div(&phi_x)?,
        b: &psi_t * &b,
    })
}

/// Twice the Poincaré order of a singular point (so `(3/2)` is stored as 3).
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SingularPoint {
    pub location: String,
    pub twice_order: i64,
}

impl SingularPoint {
    pub fn order_label(&self) -> String {
        if self.twice_order % 2 == 0 {
            format!("{}", self.twice_order / 2)
        } else {
            format!("{}/2", self.twice_order)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Signature {
    pub points: Vec<SingularPoint>,
}

impl Signature {
    /// Integers ascending, then half-integers ascending, with multiplicities
    /// as exponents: `(1)^2(3/2)`.
    pub fn label(&self) -> String {
        let mut orders: Vec<i64> = self.points.iter().map(|p| p.twice_order).collect();
        orders.sort_by_key(|o| (o % 2, *o));
        let mut out = String::new();
        let mut i = 0;
        while i < orders.len() {
            let o = orders[i];
            let mut n = 1;
            while i + n < orders.len() && orders[i + n] == o {
                n += 1;
            }
            let sp = SingularPoint {
                location: String::new(),
                twice_order: o,
            };
            out.push_str(&format!("({})", sp.order_label()));
            if n > 1 {
                out.push_str(&format!("^{n}"));
            }
            i += n;
        }
        out
    }
}

fn local_valuation(f: &RationalExpr, x: &Symbol, point: &RationalExpr) -> Result<Option<i64>, LinError> {
    if f.is_zero() {
        return Ok(None);
    }
    let s = Symbol::new("__s");
    let shifted = f.substitute_one(x, &(point + &RationalExpr::var(&s)))?;
    Ok(Some(shifted.num().min_degree(&s) as i64 - shifted.den().min_degree(&s) as i64))
}

/// Distinct finite poles of `f` in `x` and their orders. Poles are searched
/// among `0`, `±1`, the other symbols of the denominator, and `extra`.
pub fn finite_poles(f: &RationalExpr, x: &Symbol, extra: &[RationalExpr]) -> Result<Vec<(RationalExpr, i64)>, LinError> {
    let den = f.den();
    let total = den.degree(x) as i64;
    if total == 0 {
        return Ok(Vec::new());
    }
    let mut candidates: Vec<RationalExpr> = vec![RationalExpr::zero(), RationalExpr::one(), RationalExpr::int(-1)];
    candidates.extend(extra.iter().cloned());
    for v in den.vars() {
        if v != x && !v.is_constant() {
            candidates.push(RationalExpr::var(v));
        }
    }
    let mut found: Vec<(RationalExpr, i64)> = Vec::new();
    let mut accounted = 0;
    let den_e = RationalExpr::from(den.clone());
    for c in candidates {
        if found.iter().any(|(l, _)| *l == c) {
            continue;
        }
        let v = local_valuation(&den_e, x, &c)?.unwrap_or(0);
        if v > 0 {
            accounted += v;
            let order = -local_valuation(f, x, &c)?.unwrap_or(0);
            found.push((c, order.max(0)));
        }
    }
    if accounted != total {
        return Err(LinError::UnresolvedPole(f.render()));
    }
    Ok(found.into_iter().filter(|(_, o)| *o > 0).collect())
}

fn degree_at_infinity(f: &RationalExpr, x: &Symbol) -> Option<i64> {
    if f.is_zero() {
        None
    } else {
        Some(f.num().degree(x) as i64 - f.den().degree(x) as i64)
    }
}

fn point_label(c: &RationalExpr) -> String {
    c.render()
}

/// Poincaré orders of the singular points of `u_xx + p u_x + q u = 0`,
/// excluding the apparent point.
pub fn signature(p: &RationalExpr, q: &RationalExpr, apparent: &RationalExpr) -> Result<Signature, LinError> {
    let x = vars::x();
    let mut locs: Vec<RationalExpr> = Vec::new();
    let pp = finite_poles(p, &x, std::slice::from_ref(apparent))?;
    let qp = finite_poles(q, &x, std::slice::from_ref(apparent))?;
    for (l, _) in pp.iter().chain(&qp) {
        if l != apparent && !locs.contains(l) {
            locs.push(l.clone());
        }
    }
    let mut points = Vec::new();
    for l in locs {
        let k = pp.iter().find(|(c, _)| *c == l).map(|(_, o)| *o).unwrap_or(0);
        let lq = qp.iter().find(|(c, _)| *c == l).map(|(_, o)| *o).unwrap_or(0);
        let r2 = (2 * k - 2).max(lq - 2).max(0);
        points.push(SingularPoint {
            location: point_label(&l),
            twice_order: r2 + 2,
        });
    }
    let kp = degree_at_infinity(p, &x);
    let lq = degree_at_infinity(q, &x);
    let r2 = kp
        .map(|k| 2 * k + 2)
        .into_iter()
        .chain(lq.map(|l| l + 2))
        .fold(0, i64::max);
    if r2 > 0 {
        points.push(SingularPoint {
            location: "inf".into(),
            twice_order: r2 + 2,
        });
    } else {
        let two_over_x = RationalExpr::int(2) / RationalExpr::var(&x);
        let rest = degree_at_infinity(&(p - &two_over_x), &x);
        let ordinary = rest.map_or(true, |d| d <= -2) && lq.map_or(true, |d| d <= -4);
        if !ordinary {
            points.push(SingularPoint {
                location: "inf".into(),
                twice_order: 2,
            });
        }
    }
    points.sort_by(|a, b| a.location.cmp(&b.location));
    Ok(Signature { points })
}

#[derive(Clone, Debug)]
pub struct ApparentCertificate {
    pub exponents: (Q, Q),
    pub obstruction: RationalExpr,
}

impl ApparentCertificate {
    pub fn is_apparent(&self) -> bool {
        self.obstruction.is_zero()
    }
}

/// Frobenius obstruction at `x = point` for `u_xx + p u_x + q u = 0`.
///
/// The local exponents must be rational and differ by a positive integer `N`;
/// the point is apparent iff the recursion for the smaller exponent is
/// solvable at step `N`.
pub fn certify_apparent(p: &RationalExpr, q: &RationalExpr, point: &RationalExpr) -> Result<ApparentCertificate, LinError> {
    let x = vars::x();
    let s = Symbol::new("__s");
    let probe = 8;
    let lp = laurent_at(p, &x, point, &s, probe)?;
    let lq = laurent_at(q, &x, point, &s, probe)?;
    if lp.valuation < -1 || lq.valuation < -2 {
        return Err(LinError::WrongLocalShape("pole of p above 1 or of q above 2".into()));
    }
    let (Some(p0), Some(q0)) = (lp.coeff(-1).as_constant(), lq.coeff(-2).as_constant()) else {
        return Err(LinError::WrongLocalShape("leading coefficients are not constants".into()));
    };
    // ρ² + (p₋₁ − 1)ρ + q₋₂ = 0
    let b = &p0 - Q::from_integer(1.into());
    let disc = &b * &b - Q::from_integer(4.into()) * &q0;
    let root = rational_sqrt(&disc).ok_or(LinError::NonResonant)?;
    let two = Q::from_integer(2.into());
    let lo = (-&b - &root) / &two;
    let hi = (-&b + &root) / &two;
    if !root.is_integer() || root <= Q::from_integer(0.into()) {
        return Err(LinError::NonResonant);
    }
    let n: usize = root.to_integer().try_into().map_err(|_| LinError::NonResonant)?;
    let need = n + 2;
    let lp = laurent_at(p, &x, point, &s, need + 1)?;
    let lq = laurent_at(q, &x, point, &s, need + 2)?;
    let pc = |k: i64| lp.coeff(k);
    let qc = |k: i64| lq.coeff(k);
    let indicial = |r: &Q| r * r + &b * r + &q0;
    let mut c: Vec<RationalExpr> = vec![RationalExpr::one()];
    let mut obstruction = RationalExpr::zero();
    for k in 1..=n {
        let mut acc = RationalExpr::zero();
        for (j, cj) in c.iter().enumerate() {
            let rj = RationalExpr::constant(&lo + Q::from_integer((j as i64).into()));
            let term = &(&rj * &pc((k - j) as i64 - 1)) + &qc((k - j) as i64 - 2);
            acc = &acc + &(cj * &term);
        }
        if k == n {
            obstruction = acc;
        } else {
            let f = indicial(&(&lo + Q::from_integer((k as i64).into())));
            c.push(-(&acc.scale(&f.recip())));
        }
    }
    Ok(ApparentCertificate {
        exponents: (lo, hi),
        obstruction,
    })
}

fn rational_sqrt(v: &Q) -> Option<Q> {
    if *v < Q::from_integer(0.into()) {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(&n * &n) == v.numer() && &(&d * &d) == v.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Residual of the compatibility after applying `f` both ways; used to check
/// that gauges form a group action.
pub fn gauge_compose(data: &LinearData, x: &Symbol, g1: (&RationalExpr, &RationalExpr), g2: (&RationalExpr, &RationalExpr)) -> (LinearData, LinearData) {
    let twice = gauge(&gauge(data, x, g1.0, g1.1), x, g2.0, g2.1);
    let once = gauge(data, x, &(g1.0 + g2.0), &(g1.1 + g2.1));
    (twice, once)
}
