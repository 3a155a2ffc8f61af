//! Weighted geometric means, the geodesic distance `delta_p`, arc length and
//! Γ-commutation on the cone of positive-definite matrices.
//!
//! The geodesic from `A` to `B` is `A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}` and its
//! length in the Schatten-p Finsler metric is `||log(A^{-1/2} B A^{-1/2})||_p`. For
//! commuting endpoints the curve reduces to `A^{1-t} B^t` and the distance to
//! `||log A - log B||_p`.

use crate::error::{Error, Result};
use crate::matcore::{
    mat_inv_sqrt, mat_sqrt, same_dim, CMatrix, HermitianMatrix, SpdMatrix,
};
use crate::schatten::{lp_norm, schatten_norm_hermitian};

/// Step for central-difference derivatives of curves without an analytic derivative.
pub const CENTRAL_DIFFERENCE_STEP: f64 = 1e-5;

/// Default normalized tolerance for [`gamma_commute`].
pub const GAMMA_COMMUTE_TOL: f64 = 1e-8;

/// Smallest `||log A||_p` that still defines a direction for sphere projection.
pub const MIN_DIRECTION_NORM: f64 = 1e-12;

/// `A^{-1/2} B A^{-1/2}` as an SPD matrix.
fn relative(inv_sqrt_a: &CMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    SpdMatrix::new(HermitianMatrix::symmetrized(
        inv_sqrt_a * b.matrix() * inv_sqrt_a,
    ))
}

/// The geodesic `t -> A #_t B` with its factors cached at construction.
#[derive(Debug, Clone)]
pub struct GeodesicCurve {
    endpoint_a: SpdMatrix,
    endpoint_b: SpdMatrix,
    sqrt_a: CMatrix,
    inv_sqrt_a: CMatrix,
    relative: SpdMatrix,
    log_relative: HermitianMatrix,
}

impl GeodesicCurve {
    pub fn new(a: &SpdMatrix, b: &SpdMatrix) -> Result<Self> {
        same_dim(a.dim(), b.dim())?;
        let sqrt_a = mat_sqrt(a)?.into_matrix();
        let inv_sqrt_a = mat_inv_sqrt(a)?.into_matrix();
        let relative = relative(&inv_sqrt_a, b)?;
        let log_relative = relative.log()?;
        Ok(Self {
            endpoint_a: a.clone(),
            endpoint_b: b.clone(),
            sqrt_a,
            inv_sqrt_a,
            relative,
            log_relative,
        })
    }

    pub fn endpoint_a(&self) -> &SpdMatrix {
        &self.endpoint_a
    }

    pub fn endpoint_b(&self) -> &SpdMatrix {
        &self.endpoint_b
    }

    /// `log(A^{-1/2} B A^{-1/2})`.
    pub fn log_relative(&self) -> &HermitianMatrix {
        &self.log_relative
    }

    /// `A^{-1/2}`.
    pub fn inv_sqrt_a(&self) -> &CMatrix {
        &self.inv_sqrt_a
    }

    fn sandwich(&self, inner: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix::symmetrized(&self.sqrt_a * inner.matrix() * &self.sqrt_a)
    }

    /// `gamma(t)`; any real `t` is accepted.
    pub fn eval(&self, t: f64) -> Result<SpdMatrix> {
        let inner = self.relative.eigen().apply(|l| l.powf(t))?;
        SpdMatrix::new(self.sandwich(&inner))
    }

    /// `gamma'(t) = A^{1/2} M^t log(M) A^{1/2}`.
    pub fn derivative(&self, t: f64) -> Result<HermitianMatrix> {
        let inner = self.relative.eigen().apply(|l| l.powf(t) * l.ln())?;
        Ok(self.sandwich(&inner))
    }
}

/// A smooth curve of SPD matrices parameterized over `[0, 1]`.
pub trait Curve {
    fn eval(&self, t: f64) -> Result<SpdMatrix>;

    /// Central difference with step [`CENTRAL_DIFFERENCE_STEP`] unless overridden.
    fn derivative(&self, t: f64) -> Result<HermitianMatrix> {
        let h = CENTRAL_DIFFERENCE_STEP;
        let forward = self.eval(t + h)?;
        let backward = self.eval(t - h)?;
        Ok(HermitianMatrix::symmetrized(
            (forward.matrix() - backward.matrix()).scale(0.5 / h),
        ))
    }
}

impl Curve for GeodesicCurve {
    fn eval(&self, t: f64) -> Result<SpdMatrix> {
        GeodesicCurve::eval(self, t)
    }

    fn derivative(&self, t: f64) -> Result<HermitianMatrix> {
        GeodesicCurve::derivative(self, t)
    }
}

/// The chord `(1 - t) A + t B`. Uses the central-difference derivative.
#[derive(Debug, Clone)]
pub struct LinearCurve {
    pub start: SpdMatrix,
    pub end: SpdMatrix,
}

impl Curve for LinearCurve {
    fn eval(&self, t: f64) -> Result<SpdMatrix> {
        same_dim(self.start.dim(), self.end.dim())?;
        SpdMatrix::new(HermitianMatrix::symmetrized(
            self.start.matrix().scale(1.0 - t) + self.end.matrix().scale(t),
        ))
    }
}

/// `||gamma^{-1/2} gamma' gamma^{-1/2}||_p` for an arbitrary curve.
pub fn curve_speed(curve: &impl Curve, t: f64, p: f64) -> Result<f64> {
    let point = curve.eval(t)?;
    let w = mat_inv_sqrt(&point)?.into_matrix();
    let d = curve.derivative(t)?;
    let tangent = HermitianMatrix::symmetrized(&w * d.matrix() * &w);
    schatten_norm_hermitian(&tangent, p)
}

/// Speed of the geodesic, constant in `t` and equal to `delta_p(A, B)`.
pub fn geodesic_speed(curve: &GeodesicCurve, t: f64, p: f64) -> Result<f64> {
    curve_speed(curve, t, p)
}

/// Composite Simpson rule on `[0, 1]` with an even number of intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimpsonGrid {
    intervals: usize,
}

impl SimpsonGrid {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < 2 || !intervals.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "Simpson grid needs an even interval count >= 2, got {intervals}"
            )));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
        let n = self.intervals;
        let h = 1.0 / n as f64;
        let mut acc = f(0.0)? + f(1.0)?;
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h)?;
        }
        Ok(acc * h / 3.0)
    }
}

impl Default for SimpsonGrid {
    fn default() -> Self {
        Self { intervals: 64 }
    }
}

/// Finsler arc length `int_0^1 ||gamma^{-1/2} gamma' gamma^{-1/2}||_p dt`.
pub fn arc_length(curve: &impl Curve, p: f64, grid: SimpsonGrid) -> Result<f64> {
    grid.integrate(|t| curve_speed(curve, t, p))
}

/// `A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`.
pub fn weighted_mean(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    GeodesicCurve::new(a, b)?.eval(t)
}

/// `A # B`, the geodesic midpoint.
pub fn geometric_mean(a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    weighted_mean(a, b, 0.5)
}

/// `delta_p(A, B) = ||log(A^{-1/2} B A^{-1/2})||_p`, `p` in `[1, inf]`.
pub fn delta_p(a: &SpdMatrix, b: &SpdMatrix, p: f64) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let inv_sqrt_a = mat_inv_sqrt(a)?.into_matrix();
    let m = relative(&inv_sqrt_a, b)?;
    let logs: Vec<f64> = m.eigen().eigenvalues.iter().map(|l| l.ln()).collect();
    lp_norm(&logs, p)
}

/// `||log A - log B||_p`, a lower bound for `delta_p` with equality iff `[A, B] = 0`.
pub fn log_euclidean_dist(a: &SpdMatrix, b: &SpdMatrix, p: f64) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    let diff = a.log()?.sub(&b.log()?)?;
    schatten_norm_hermitian(&diff, p)
}

/// Both characterizations of Γ-commutation for a triple, scale-normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCommuteReport {
    /// `||A B^{-1} C - C B^{-1} A||_F / (||A||_F ||B^{-1}||_F ||C||_F)`.
    pub defect_product: f64,
    /// `||[P, Q]||_F / (||P||_F ||Q||_F)` with `P = A^{-1/2} B A^{-1/2}`, `Q = A^{-1/2} C A^{-1/2}`.
    pub defect_bracket: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl GammaCommuteReport {
    pub fn product_holds(&self) -> bool {
        self.defect_product <= self.tolerance
    }

    pub fn bracket_holds(&self) -> bool {
        self.defect_bracket <= self.tolerance
    }

    /// The two characterizations disagree.
    pub fn split(&self) -> bool {
        self.product_holds() != self.bracket_holds()
    }
}

pub fn gamma_commute(
    a: &SpdMatrix,
    b: &SpdMatrix,
    c: &SpdMatrix,
    tol: Option<f64>,
) -> Result<GammaCommuteReport> {
    same_dim(a.dim(), b.dim())?;
    same_dim(a.dim(), c.dim())?;
    let tolerance = tol.unwrap_or(GAMMA_COMMUTE_TOL);
    let (am, cm) = (a.matrix(), c.matrix());
    let b_inv = b.inverse()?;
    let bi = b_inv.matrix();
    let product = am * bi * cm - cm * bi * am;
    let defect_product = product.norm() / (a.norm_fro() * b_inv.norm_fro() * c.norm_fro());

    let w = mat_inv_sqrt(a)?.into_matrix();
    let pm = &w * b.matrix() * &w;
    let qm = &w * cm * &w;
    let bracket = &pm * &qm - &qm * &pm;
    let defect_bracket = bracket.norm() / (pm.norm() * qm.norm());

    Ok(GammaCommuteReport {
        defect_product,
        defect_bracket,
        tolerance,
        holds: defect_product <= tolerance && defect_bracket <= tolerance,
    })
}

/// `|delta_p(U, I) - 1| <= tol`.
pub fn on_unit_sphere(u: &SpdMatrix, p: f64, tol: f64) -> Result<bool> {
    Ok((sphere_radius(u, p)? - 1.0).abs() <= tol)
}

/// `delta_p(U, I)`.
pub fn sphere_radius(u: &SpdMatrix, p: f64) -> Result<f64> {
    delta_p(u, &SpdMatrix::identity(u.dim())?, p)
}

/// `A^{1 / ||log A||_p}`, the point of the exponential unit sphere in the direction of `log A`.
pub fn project_to_unit_sphere(a: &SpdMatrix, p: f64) -> Result<SpdMatrix> {
    let r = schatten_norm_hermitian(&a.log()?, p)?;
    if r <= MIN_DIRECTION_NORM {
        return Err(Error::NoDirection);
    }
    a.pow(1.0 / r)
}
