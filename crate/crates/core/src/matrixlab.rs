//! 2×2 matrix systems: zero curvature, gauge by a double cover, reduction to
//! a scalar second-order equation.

use painleve_algebra::{AlgebraError, RationalExpr, Subst, Symbol};

use crate::lincheck::{finite_poles, gauge, LinError, LinearData, Signature, SingularPoint};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat2(pub [[RationalExpr; 2]; 2]);

impl Mat2 {
    pub fn new(a11: RationalExpr, a12: RationalExpr, a21: RationalExpr, a22: RationalExpr) -> Mat2 {
        Mat2([[a11, a12], [a21, a22]])
    }

    pub fn zero() -> Mat2 {
        let z = RationalExpr::zero;
        Mat2::new(z(), z(), z(), z())
    }

    pub fn identity() -> Mat2 {
        Mat2::new(RationalExpr::one(), RationalExpr::zero(), RationalExpr::zero(), RationalExpr::one())
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalExpr {
        &self.0[i][j]
    }

    fn map(&self, f: impl Fn(&RationalExpr) -> RationalExpr) -> Mat2 {
        let e = &self.0;
        Mat2::new(f(&e[0][0]), f(&e[0][1]), f(&e[1][0]), f(&e[1][1]))
    }

    fn try_map(&self, f: impl Fn(&RationalExpr) -> Result<RationalExpr, AlgebraError>) -> Result<Mat2, AlgebraError> {
        let e = &self.0;
        Ok(Mat2::new(f(&e[0][0])?, f(&e[0][1])?, f(&e[1][0])?, f(&e[1][1])?))
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(&a[0][0] + &b[0][0], &a[0][1] + &b[0][1], &a[1][0] + &b[1][0], &a[1][1] + &b[1][1])
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        self.add(&o.scale(&RationalExpr::int(-1)))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn scale(&self, c: &RationalExpr) -> Mat2 {
        self.map(|e| e * c)
    }

    pub fn det(&self) -> RationalExpr {
        let a = &self.0;
        &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0])
    }

    pub fn trace(&self) -> RationalExpr {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn inverse(&self) -> Result<Mat2, AlgebraError> {
        let d = self.det().recip()?;
        let a = &self.0;
        Ok(Mat2::new(&a[1][1] * &d, -(&a[0][1] * &d), -(&a[1][0] * &d), &a[0][0] * &d))
    }

    pub fn diff(&self, v: &Symbol) -> Mat2 {
        self.map(|e| e.diff(v))
    }

    pub fn substitute(&self, m: &Subst) -> Result<Mat2, AlgebraError> {
        self.try_map(|e| e.substitute(m))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|e| e.is_zero())
    }

    pub fn entries(&self) -> impl Iterator<Item = &RationalExpr> {
        self.0.iter().flatten()
    }
}

/// Total `t`-derivative along a flow `v' = f_v`.
pub fn flow_derivative(e: &RationalExpr, t: &Symbol, flow: &[(Symbol, RationalExpr)]) -> RationalExpr {
    let mut acc = e.diff(t);
    for (v, fv) in flow {
        let d = e.diff(v);
        if !d.is_zero() {
            acc = &acc + &(&d * fv);
        }
    }
    acc
}

/// `∂_t A − ∂_x B + [A, B]` with `∂_t` taken along `flow`.
pub fn zero_curvature(a: &Mat2, b: &Mat2, x: &Symbol, t: &Symbol, flow: &[(Symbol, RationalExpr)]) -> Mat2 {
    let at = a.map(|e| flow_derivative(e, t, flow));
    let comm = a.mul(b).sub(&b.mul(a));
    at.sub(&b.diff(x)).add(&comm)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("zero-curvature condition does not determine the flow")]
    Underdetermined,
    #[error("zero-curvature condition is inconsistent: {0}")]
    Inconsistent(String),
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
}

/// Solves the zero-curvature condition for the time derivatives of `dynamic`.
///
/// The condition is linear in the unknown derivatives; the solution must be
/// free of the spectral variable and annihilate every entry.
pub fn solve_flow(a: &Mat2, b: &Mat2, x: &Symbol, t: &Symbol, dynamic: &[Symbol]) -> Result<Vec<(Symbol, RationalExpr)>, MatrixError> {
    let unknowns: Vec<Symbol> = dynamic.iter().map(|d| Symbol::new(&format!("__d_{}", d.name()))).collect();
    let flow: Vec<(Symbol, RationalExpr)> = dynamic
        .iter()
        .zip(&unknowns)
        .map(|(d, u)| (d.clone(), RationalExpr::var(u)))
        .collect();
    let res = zero_curvature(a, b, x, t, &flow);
    let mut zero_subst = Subst::new();
    for u in &unknowns {
        zero_subst.insert(u.clone(), RationalExpr::zero());
    }
    let mut rows: Vec<(Vec<RationalExpr>, RationalExpr)> = Vec::new();
    for e in res.entries() {
        let coeffs: Vec<RationalExpr> = unknowns.iter().map(|u| e.diff(u)).collect();
        let c0 = e.substitute(&zero_subst)?;
        rows.push((coeffs, -c0));
    }
    let n = unknowns.len();
    let mut solution = vec![RationalExpr::zero(); n];
    let mut pivots = Vec::new();
    let mut work = rows.clone();
    for col in 0..n {
        let Some(r) = (pivots.len()..work.len()).find(|&r| !work[r].0[col].is_zero()) else {
            return Err(MatrixError::Underdetermined);
        };
        work.swap(pivots.len(), r);
        let pr = pivots.len();
        let inv = work[pr].0[col].recip()?;
        let (pc, pv) = (work[pr].0.iter().map(|c| c * &inv).collect::<Vec<_>>(), &work[pr].1 * &inv);
        work[pr] = (pc, pv);
        for r2 in 0..work.len() {
            if r2 == pr || work[r2].0[col].is_zero() {
                continue;
            }
            let f = work[r2].0[col].clone();
            let row: Vec<RationalExpr> = work[r2].0.iter().zip(&work[pr].0).map(|(a, b)| a - &(&f * b)).collect();
            let rhs = &work[r2].1 - &(&f * &work[pr].1);
            work[r2] = (row, rhs);
        }
        pivots.push(col);
    }
    for (i, &col) in pivots.iter().enumerate() {
        solution[col] = work[i].1.clone();
    }
    let mut m = Subst::new();
    for (u, s) in unknowns.iter().zip(&solution) {
        if s.contains(x) {
            return Err(MatrixError::Inconsistent(format!("{u} depends on {x}")));
        }
        m.insert(u.clone(), s.clone());
    }
    for e in res.entries() {
        if !e.substitute(&m)?.is_zero() {
            return Err(MatrixError::Inconsistent("an entry survives the solved flow".into()));
        }
    }
    Ok(dynamic.iter().cloned().zip(solution).collect())
}

/// `Z = R Y` with `Z` a solution of `dZ/dw = A Z`, `w = rho^4`, and
/// `x = rho^2`. Returns the system in `x` (`A_x`, `B_x`) for comparison.
///
/// The `rho`-system is `R⁻¹ A(rho^4) 4 rho^3 R − R⁻¹ R_rho`; dividing by
/// `dx/drho = 2 rho` gives the `x`-system evaluated at `x = rho^2`.
pub fn double_cover_gauge(
    a: &Mat2,
    b: &Mat2,
    w: &Symbol,
    r: &Mat2,
    rho: &Symbol,
) -> Result<(Mat2, Mat2), MatrixError> {
    let rv = RationalExpr::var(rho);
    let mut m = Subst::new();
    m.insert(w.clone(), rv.pow(4)?);
    let a_rho = a.substitute(&m)?;
    let b_rho = b.substitute(&m)?;
    if r.det().is_zero() {
        return Err(MatrixError::SingularGauge);
    }
    let rinv = r.inverse()?;
    let jac = &RationalExpr::int(4) * &rv.pow(3)?;
    let ax = rinv
        .mul(&a_rho.scale(&jac))
        .mul(r)
        .sub(&rinv.mul(&r.diff(rho)))
        .scale(&(&RationalExpr::one() / &(&RationalExpr::int(2) * &rv)));
    let bx = rinv.mul(&b_rho).mul(r);
    Ok((ax, bx))
}

/// Eliminates the second component of `dZ/dw = A Z`, `dZ/dt = B Z` and
/// returns the linear data of the first component.
pub fn scalar_reduce(a: &Mat2, b: &Mat2, w: &Symbol) -> Result<LinearData, MatrixError> {
    let e = &a.0;
    let a12_log = e[0][1].diff(w).checked_div(&e[0][1])?;
    let s = &a12_log + &e[1][1];
    let p = -(&(&e[0][0] + &e[1][1]) + &a12_log);
    let q = -(&(&e[0][0].diff(w) + &(&e[0][1] * &e[1][0])) - &(&e[0][0] * &s));
    let bb = &b.0;
    let ratio = bb[0][1].checked_div(&e[0][1])?;
    let a_coef = ratio.clone();
    let b_coef = &bb[0][0] - &(&ratio * &e[0][0]);
    Ok(LinearData {
        p,
        q,
        a: a_coef,
        b: b_coef,
    })
}

/// Scalar reduction followed by the gauge `u_1 = f u` with `f_w / f = weight / w`.
pub fn scalar_reduce_weighted(
    a: &Mat2,
    b: &Mat2,
    w: &Symbol,
    weight: &RationalExpr,
) -> Result<LinearData, MatrixError> {
    let base = scalar_reduce(a, b, w)?;
    let gx = weight.checked_div(&RationalExpr::var(w))?;
    Ok(gauge(&base, w, &gx, &RationalExpr::zero()))
}

pub fn residue_at(f: &RationalExpr, var: &Symbol, point: &RationalExpr) -> Result<RationalExpr, AlgebraError> {
    painleve_algebra::series::residue_at(f, var, point)
}

/// Poincaré orders of `dY/dx = A Y`: a pole of order `k` has order `k`, and
/// `x = ∞` with `A ~ x^d` has order `d + 2`.
pub fn matrix_signature(a: &Mat2, x: &Symbol) -> Result<Signature, LinError> {
    let mut finite: Vec<(RationalExpr, i64)> = Vec::new();
    let mut deg: Option<i64> = None;
    for e in a.entries() {
        for (loc, k) in finite_poles(e, x, &[])? {
            match finite.iter_mut().find(|(l, _)| *l == loc) {
                Some(slot) => slot.1 = slot.1.max(k),
                None => finite.push((loc, k)),
            }
        }
        if !e.is_zero() {
            let d = e.num().degree(x) as i64 - e.den().degree(x) as i64;
            deg = Some(deg.map_or(d, |m| m.max(d)));
        }
    }
    let mut points: Vec<SingularPoint> = finite
        .into_iter()
        .map(|(l, k)| SingularPoint {
            location: l.render(),
            twice_order: 2 * k,
        })
        .collect();
    if let Some(d) = deg.filter(|d| *d >= -1) {
        points.push(SingularPoint {
            location: "inf".into(),
            twice_order: 2 * (d + 2),
        });
    }
    points.sort_by(|a, b| a.location.cmp(&b.location));
    Ok(Signature { points })
}
