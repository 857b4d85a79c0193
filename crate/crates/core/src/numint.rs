//! Floating-point cross-checks: Hamiltonian flows integrated with an embedded
//! Runge–Kutta 5(4) pair, scalar-equation residuals along trajectories, and
//! numeric decay of degeneration residuals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use painleve_algebra::{Poly, RationalExpr, Symbol};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::catalog::{vars, Catalog, DegenerationRule};
use crate::degeneration::{apply_rule, DegenerationError};

pub const POLE_GUARD: f64 = 1e8;
pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-6;
const MAX_STEPS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("tolerance {0} outside [1e-13, 1e-6]")]
    BadTolerance(f64),
    #[error("interval [{0}, {1}] contains a fixed singularity at t = {2}")]
    SingularInterval(f64, f64, f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("too many steps")]
    TooManySteps,
    #[error("cannot evaluate numerically: {0}")]
    NotNumeric(String),
    #[error("eps values must be positive, decreasing and at least 1e-3")]
    BadEps,
    #[error("residual of {0} is badly conditioned at the probe point")]
    ConditioningFailure(String),
    #[error("{0}")]
    Degeneration(#[from] DegenerationError),
    #[error("{0}")]
    Catalog(#[from] crate::catalog::CatalogError),
}

/// Polynomial compiled to slot-indexed monomials with folded coefficients.
#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    fn new(p: &Poly, slots: &[Symbol], values: &BTreeMap<Symbol, f64>) -> Result<Self, NumError> {
        let mut terms = Vec::new();
        let vars = p.vars();
        for (exps, c) in p.terms() {
            let mut coef = painleve_algebra::rational::to_f64(c);
            let mut mono = Vec::new();
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = &vars[i];
                if let Some(slot) = slots.iter().position(|s| s == v) {
                    mono.push((slot, e as i32));
                } else if let Some(val) = values.get(v) {
                    coef *= val.powi(e as i32);
                } else if let Some(rel) = v.relation() {
                    if rel.numeric.im.abs() > 1e-300 || !rel.numeric.re.is_finite() {
                        return Err(NumError::NotNumeric(v.name().into()));
                    }
                    coef *= rel.numeric.re.powi(e as i32);
                } else {
                    return Err(NumError::NotNumeric(v.name().into()));
                }
            }
            terms.push((coef, mono));
        }
        Ok(CompiledPoly { terms })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, m)| m.iter().fold(*c, |acc, &(s, e)| acc * x[s].powi(e)))
            .sum()
    }
}

/// Real-valued evaluator of a rational expression in a few slot variables.
#[derive(Clone, Debug)]
pub struct Compiled {
    num: CompiledPoly,
    den: CompiledPoly,
}

impl Compiled {
    pub fn new(e: &RationalExpr, slots: &[Symbol], values: &BTreeMap<Symbol, f64>) -> Result<Self, NumError> {
        Ok(Compiled {
            num: CompiledPoly::new(e.num(), slots, values)?,
            den: CompiledPoly::new(e.den(), slots, values)?,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.num.eval(x) / self.den.eval(x)
    }
}

/// Hamiltonian vector field `y' = H_z`, `z' = -H_y` in slots `(t, y, z)`.
#[derive(Clone, Debug)]
pub struct CompiledFlow {
    pub dy: Compiled,
    pub dz: Compiled,
    /// Gradient of `dy` in the slots `t, y, z`.
    pub dy_grad: [Compiled; 3],
    pub h: Compiled,
    pub ht: Compiled,
}

pub fn slots() -> [Symbol; 3] {
    [vars::t(), vars::y(), vars::z()]
}

impl CompiledFlow {
    pub fn new(h: &RationalExpr, values: &BTreeMap<Symbol, f64>) -> Result<Self, NumError> {
        let flow = crate::lincheck::Flow::hamiltonian(h);
        let s = slots();
        let dy = &flow.fields[0].1;
        Ok(CompiledFlow {
            dy: Compiled::new(dy, &s, values)?,
            dz: Compiled::new(&flow.fields[1].1, &s, values)?,
            dy_grad: [
                Compiled::new(&dy.diff(&s[0]), &s, values)?,
                Compiled::new(&dy.diff(&s[1]), &s, values)?,
                Compiled::new(&dy.diff(&s[2]), &s, values)?,
            ],
            h: Compiled::new(h, &s, values)?,
            ht: Compiled::new(&h.diff(&vars::t()), &s, values)?,
        })
    }

    pub fn field(&self, t: f64, u: &[f64; 2]) -> [f64; 2] {
        let x = [t, u[0], u[1]];
        [self.dy.eval(&x), self.dz.eval(&x)]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub t: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Clone, Debug)]
struct DenseStep {
    t0: f64,
    h: f64,
    rcont: [[f64; 2]; 5],
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub samples: Vec<Sample>,
    pub stats: Stats,
    /// Set when the pole guard stopped the integration early.
    pub truncated: bool,
    #[serde(skip)]
    dense: Vec<DenseStep>,
}

impl Trajectory {
    /// Dense-output state at `t` inside the integrated range.
    pub fn state_at(&self, t: f64) -> Option<[f64; 2]> {
        let step = self.step_at(t)?;
        let th = (t - step.t0) / step.h;
        let th1 = 1.0 - th;
        let r = &step.rcont;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        Some(out)
    }

    /// Time derivative of the dense-output interpolant at `t`.
    pub fn derivative_at(&self, t: f64) -> Option<[f64; 2]> {
        let step = self.step_at(t)?;
        let th = (t - step.t0) / step.h;
        let th1 = 1.0 - th;
        let r = &step.rcont;
        let mut out = [0.0; 2];
        for i in 0..2 {
            let a = r[3][i] + th1 * r[4][i];
            let b = r[2][i] + th * a;
            let db = a - th * r[4][i];
            let c = r[1][i] + th1 * b;
            let dc = -b + th1 * db;
            out[i] = (c + th * dc) / step.h;
        }
        Some(out)
    }

    fn step_at(&self, t: f64) -> Option<&DenseStep> {
        self.dense.iter().find(|s| {
            let (a, b) = if s.h >= 0.0 { (s.t0, s.t0 + s.h) } else { (s.t0 + s.h, s.t0) };
            t >= a && t <= b
        })
    }

    pub fn end(&self) -> &Sample {
        self.samples.last().expect("at least the initial sample")
    }

    /// `t,y,z` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,y,z\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", s.t, s.y, s.z);
        }
        out
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

struct StepResult {
    y1: [f64; 2],
    err: [f64; 2],
    k: [[f64; 2]; 7],
}

fn dp_step(f: &dyn Fn(f64, &[f64; 2]) -> [f64; 2], t: f64, y: &[f64; 2], h: f64, k1: [f64; 2]) -> StepResult {
    let mut k = [[0.0; 2]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..2 {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y1 = *y;
    let mut err = [0.0; 2];
    for i in 0..2 {
        for s in 0..7 {
            y1[i] += h * A[6].get(s).copied().unwrap_or(0.0) * k[s][i];
            err[i] += h * E[s] * k[s][i];
        }
    }
    StepResult { y1, err, k }
}

fn dense_coeffs(y0: &[f64; 2], r: &StepResult, h: f64) -> [[f64; 2]; 5] {
    let mut rc = [[0.0; 2]; 5];
    for i in 0..2 {
        let ydiff = r.y1[i] - y0[i];
        let bspl = h * r.k[0][i] - ydiff;
        rc[0][i] = y0[i];
        rc[1][i] = ydiff;
        rc[2][i] = bspl;
        rc[3][i] = ydiff - h * r.k[6][i] - bspl;
        rc[4][i] = h * (0..7).map(|s| D[s] * r.k[s][i]).sum::<f64>();
    }
    rc
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: 1e-10,
            max_steps: MAX_STEPS,
        }
    }
}

/// Adaptive integration of a planar system from `t0` to `t1`.
pub fn integrate_field(
    f: &dyn Fn(f64, &[f64; 2]) -> [f64; 2],
    t0: f64,
    u0: [f64; 2],
    t1: f64,
    opts: Options,
) -> Result<(Vec<Sample>, Vec<DenseStepPublic>, Stats, bool), NumError> {
    if !(MIN_TOL..=MAX_TOL).contains(&opts.tol) {
        return Err(NumError::BadTolerance(opts.tol));
    }
    let mut samples = vec![Sample { t: t0, y: u0[0], z: u0[1] }];
    let mut dense = Vec::new();
    let mut stats = Stats::default();
    if t1 == t0 {
        return Ok((samples, dense, stats, false));
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut u = u0;
    let mut k1 = f(t, &u);
    stats.evaluations += 1;
    let mut h = dir * (span * 1e-3).min(1e-2);
    let tol = opts.tol;
    loop {
        if (t1 - t) * dir <= 0.0 {
            break;
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(NumError::TooManySteps);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(NumError::StepUnderflow(t));
        }
        let r = dp_step(f, t, &u, h, k1);
        stats.evaluations += 6;
        let mut norm = 0.0;
        for i in 0..2 {
            let sc = tol + tol * u[i].abs().max(r.y1[i].abs());
            norm += (r.err[i] / sc).powi(2);
        }
        let norm = (norm / 2.0).sqrt();
        if !norm.is_finite() || r.y1.iter().any(|v| !v.is_finite()) {
            if u.iter().any(|v| v.abs() > POLE_GUARD / 10.0) {
                return Ok((samples, dense, stats, true));
            }
            h *= 0.2;
            stats.rejected += 1;
            continue;
        }
        if norm <= 1.0 {
            let rc = dense_coeffs(&u, &r, h);
            dense.push(DenseStepPublic(DenseStep { t0: t, h, rcont: rc }));
            t = if (t + h - t1) * dir >= 0.0 { t1 } else { t + h };
            u = r.y1;
            k1 = r.k[6];
            stats.accepted += 1;
            if u.iter().any(|v| v.abs() > POLE_GUARD) {
                return Ok((samples, dense, stats, true));
            }
            samples.push(Sample { t, y: u[0], z: u[1] });
            let fac = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            stats.rejected += 1;
            h *= (0.9 * norm.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Ok((samples, dense, stats, false))
}

/// Opaque dense-output record.
#[derive(Clone, Debug)]
pub struct DenseStepPublic(DenseStep);

/// Fixed-step integration with `n` steps (no error control).
pub fn integrate_fixed(f: &dyn Fn(f64, &[f64; 2]) -> [f64; 2], t0: f64, u0: [f64; 2], t1: f64, n: usize) -> [f64; 2] {
    let h = (t1 - t0) / n as f64;
    let mut u = u0;
    let mut t = t0;
    for _ in 0..n {
        let k1 = f(t, &u);
        u = dp_step(f, t, &u, h, k1).y1;
        t += h;
    }
    u
}

/// Numeric parameter values keyed by symbol name.
pub type ParamValues = BTreeMap<String, f64>;

fn symbol_values(values: &ParamValues) -> BTreeMap<Symbol, f64> {
    values.iter().map(|(k, v)| (Symbol::new(k), *v)).collect()
}

/// Fixed singular times of `h`: `t = 0` and `t = 1` when the denominator
/// vanishes identically there.
pub fn fixed_singular_times(h: &RationalExpr) -> Vec<f64> {
    let t = vars::t();
    let mut out = Vec::new();
    for c in [0i64, 1] {
        if let Ok(d) = RationalExpr::from(h.den().clone()).substitute_one(&t, &RationalExpr::int(c)) {
            if d.is_zero() {
                out.push(c as f64);
            }
        }
    }
    out
}

/// Integrates the Hamiltonian flow of a canonical or SL-type family.
pub fn integrate(
    cat: &Catalog,
    family: &str,
    params: &ParamValues,
    y0: f64,
    z0: f64,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<Trajectory, NumError> {
    let h = match cat.family(family) {
        Ok(f) => f.h.clone(),
        Err(_) => cat.sl_family(family)?.k.clone(),
    };
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    for s in fixed_singular_times(&h) {
        if s >= lo && s <= hi {
            return Err(NumError::SingularInterval(t0, t1, s));
        }
    }
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(NumError::BadTolerance(tol));
    }
    let flow = CompiledFlow::new(&h, &symbol_values(params))?;
    let f = |t: f64, u: &[f64; 2]| flow.field(t, u);
    let (samples, dense, stats, truncated) = integrate_field(&f, t0, [y0, z0], t1, Options { tol, ..Options::default() })?;
    Ok(Trajectory {
        family: family.into(),
        params: params.clone(),
        samples,
        stats,
        truncated,
        dense: dense.into_iter().map(|d| d.0).collect(),
    })
}

/// Max of `|y'' − F(y', y, t)|` at 100 interior points of the trajectory.
///
/// `y'` is the derivative of the dense output. `y''` differentiates
/// `y' = H_z(t, y, z)` along the dense output, so every time derivative comes
/// from the trajectory rather than from the vector field.
pub fn ode_residual(cat: &Catalog, traj: &Trajectory, ode_rhs: &RationalExpr, ode_params: &ParamValues) -> Result<f64, NumError> {
    let h = match cat.family(&traj.family) {
        Ok(f) => f.h.clone(),
        Err(_) => cat.sl_family(&traj.family)?.k.clone(),
    };
    let flow = CompiledFlow::new(&h, &symbol_values(&traj.params))?;
    let f = Compiled::new(ode_rhs, &[vars::t(), vars::y(), vars::yp()], &symbol_values(ode_params))?;
    let (a, b) = (traj.samples[0].t, traj.end().t);
    let mut worst: f64 = 0.0;
    for i in 1..=100 {
        let t = a + (b - a) * i as f64 / 101.0;
        let (Some(u), Some(du)) = (traj.state_at(t), traj.derivative_at(t)) else { continue };
        let x = [t, u[0], u[1]];
        let yp = du[0];
        let [gt, gy, gz] = &flow.dy_grad;
        let ypp = gt.eval(&x) + gy.eval(&x) * du[0] + gz.eval(&x) * du[1];
        let r = (ypp - f.eval(&[t, u[0], yp])).abs();
        worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });
    }
    Ok(worst)
}

/// Max of `|dH/dt − ∂H/∂t|` along the trajectory, with `dH/dt` from central
/// differences of the dense output.
pub fn hamiltonian_drift(cat: &Catalog, traj: &Trajectory) -> Result<f64, NumError> {
    let h = cat.family(&traj.family)?.h.clone();
    let flow = CompiledFlow::new(&h, &symbol_values(&traj.params))?;
    let (a, b) = (traj.samples[0].t, traj.end().t);
    let d = 1e-4 * (b - a).abs();
    let mut worst: f64 = 0.0;
    for i in 1..20 {
        let t = a + (b - a) * i as f64 / 20.0;
        let (Some(up), Some(um), Some(u)) = (traj.state_at(t + d), traj.state_at(t - d), traj.state_at(t)) else {
            continue;
        };
        let dh = (flow.h.eval(&[t + d, up[0], up[1]]) - flow.h.eval(&[t - d, um[0], um[1]])) / (2.0 * d);
        worst = worst.max((dh - flow.ht.eval(&[t, u[0], u[1]])).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub component: String,
    pub values: Vec<(f64, f64)>,
    /// `None` for an exactly vanishing residual.
    pub slope: Option<f64>,
    pub needed: i64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeTable {
    pub rule: String,
    pub sigma: Option<i64>,
    pub rows: Vec<ProbeRow>,
}

impl ProbeTable {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

pub const DEFAULT_EPS: [f64; 3] = [0.1, 0.05, 0.025];

/// Base points per residual in [`limit_probe`].
pub const PROBE_POINTS: usize = 33;

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Evaluates the residuals of a rule at a random base point for each `eps`
/// and fits the log-log slope against the claimed order.
pub fn limit_probe(cat: &Catalog, rule: &DegenerationRule, eps_values: &[f64], seed: u64) -> Result<Vec<ProbeTable>, NumError> {
    if eps_values.len() < 2
        || eps_values.iter().any(|e| *e < 1e-3 || *e <= 0.0)
        || eps_values.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(NumError::BadEps);
    }
    let eps = vars::eps();
    let mut out = Vec::new();
    for sigma in crate::degeneration::rule_signs(rule) {
        let report = apply_rule(cat, rule, sigma)?;
        let mut rng = StdRng::seed_from_u64(seed);
        let mut rows = Vec::new();
        for (check, residual) in report.components.iter().zip(&report.residuals) {
            if residual.is_zero() {
                rows.push(ProbeRow {
                    component: check.component.clone(),
                    values: Vec::new(),
                    slope: None,
                    needed: check.needed,
                    passed: true,
                });
                continue;
            }
            // Complex base points rarely sit near a zero of the leading
            // coefficient. Each point gets its own slope; the median is
            // reported so a point close to a fixed singularity, where the
            // limit is not uniform, does not decide the row.
            let free: Vec<Symbol> = residual.symbols().into_iter().filter(|s| *s != eps && !s.is_constant()).collect();
            let mut slopes = Vec::new();
            let mut values = Vec::new();
            for k in 0..PROBE_POINTS {
                let point: BTreeMap<Symbol, Complex64> = free
                    .iter()
                    .map(|s| {
                        let r = rng.gen_range(0.5..1.5);
                        let th = rng.gen_range(0.0..std::f64::consts::TAU);
                        (s.clone(), Complex64::from_polar(r, th))
                    })
                    .collect();
                let mut row = Vec::new();
                for &e in eps_values {
                    let v = residual
                        .eval_c64(&|s: &Symbol| if *s == eps { Some(Complex64::new(e, 0.0)) } else { point.get(s).copied() })
                        .map_err(|err| NumError::NotNumeric(err.to_string()))?;
                    let m = v.norm();
                    if !m.is_finite() || m == 0.0 {
                        return Err(NumError::ConditioningFailure(format!("{} {}", rule.id, check.component)));
                    }
                    row.push((e, m));
                }
                slopes.push(fit_slope(&row));
                if k == 0 {
                    values = row;
                }
            }
            slopes.sort_by(|a, b| a.total_cmp(b));
            let slope = slopes[slopes.len() / 2];
            rows.push(ProbeRow {
                component: check.component.clone(),
                values,
                slope: Some(slope),
                needed: check.needed,
                passed: slope >= check.needed as f64 - 0.1,
            });
        }
        out.push(ProbeTable {
            rule: rule.id.clone(),
            sigma,
            rows,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let f = |_t: f64, u: &[f64; 2]| [u[0], -u[1]];
        let (samples, _, _, trunc) = integrate_field(&f, 0.0, [1.0, 1.0], 1.0, Options::default()).unwrap();
        let end = samples.last().unwrap();
        assert!(!trunc);
        assert!((end.y - 1f64.exp()).abs() < 1e-8);
        assert!((end.z - (-1f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn dense_output_is_accurate() {
        let f = |_t: f64, u: &[f64; 2]| [u[1], -u[0]];
        let (samples, dense, stats, _) = integrate_field(&f, 0.0, [0.0, 1.0], 3.0, Options::default()).unwrap();
        let traj = Trajectory {
            family: "osc".into(),
            params: BTreeMap::new(),
            samples,
            stats,
            truncated: false,
            dense: dense.into_iter().map(|d| d.0).collect(),
        };
        for i in 0..50 {
            let t = 3.0 * i as f64 / 50.0 + 0.013;
            let u = traj.state_at(t).unwrap();
            assert!((u[0] - t.sin()).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn fixed_step_order_is_five() {
        let f = |t: f64, u: &[f64; 2]| [u[1], -u[0] * (1.0 + t)];
        let reference = integrate_fixed(&f, 0.0, [1.0, 0.0], 1.0, 2048);
        let e1 = (integrate_fixed(&f, 0.0, [1.0, 0.0], 1.0, 16)[0] - reference[0]).abs();
        let e2 = (integrate_fixed(&f, 0.0, [1.0, 0.0], 1.0, 32)[0] - reference[0]).abs();
        let ratio = e1 / e2;
        assert!((16.0..=64.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn zero_length_interval() {
        let f = |_t: f64, u: &[f64; 2]| [u[1], u[0]];
        let (s, ..) = integrate_field(&f, 0.5, [1.0, 2.0], 0.5, Options::default()).unwrap();
        assert_eq!(s.len(), 1);
    }
}
