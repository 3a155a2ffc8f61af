//! Oriented-gap evaluation of the Clarkson–McCarthy, 2-uniform convexity, Hanner and
//! geodesic convexity inequalities, plus the distance lower bound and the log-majorization
//! relation behind it.
//!
//! Every report stores `lhs` as the side asserted to be the larger one, so `gap = lhs - rhs`
//! is nonnegative exactly when the inequality holds. Checkers recompute every quantity from
//! their raw matrix inputs and refuse exponents outside the range where the inequality is a
//! theorem.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geodesic::{delta_p, gamma_commute, geometric_mean, log_euclidean_dist, sphere_radius};
use crate::matcore::{commutator_defect, mat_exp, CMatrix, HermitianMatrix, SpdMatrix};
use crate::schatten::{majorizes, schatten_norm, singular_values, MajorizationVerdict, Spectrum};

/// Relative tolerance behind [`InequalityReport::satisfied`].
pub const DEFAULT_TOL_REL: f64 = 1e-9;

/// How far a sphere-form argument may sit from `E_p`.
pub const SPHERE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: &'static str,
    pub p: f64,
    /// The side asserted to be larger.
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`.
    pub gap: f64,
    pub satisfied: bool,
    pub diagnostics: BTreeMap<String, f64>,
}

impl InequalityReport {
    pub fn new(name: &'static str, p: f64, lhs: f64, rhs: f64) -> Self {
        let gap = lhs - rhs;
        let mut report = Self {
            name,
            p,
            lhs,
            rhs,
            gap,
            satisfied: false,
            diagnostics: BTreeMap::new(),
        };
        report.satisfied = report.satisfied_at(DEFAULT_TOL_REL);
        report
    }

    /// `gap >= -tol_rel * max(1, |lhs|, |rhs|)`.
    pub fn satisfied_at(&self, tol_rel: f64) -> bool {
        self.gap >= -tol_rel * 1.0_f64.max(self.lhs.abs()).max(self.rhs.abs())
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }
}

fn require(checker: &'static str, p: f64, ok: bool, range: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange { checker, p, range })
    }
}

fn matrix_commutator(x: &CMatrix, y: &CMatrix) -> f64 {
    (x * y - y * x).norm()
}

fn check_shapes(x: &CMatrix, y: &CMatrix) -> Result<()> {
    if x.shape() == y.shape() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(x.nrows(), y.nrows()))
    }
}

fn gamma_diagnostics(
    report: InequalityReport,
    a: &SpdMatrix,
    b: &SpdMatrix,
    c: &SpdMatrix,
) -> Result<InequalityReport> {
    let g = gamma_commute(a, b, c, None)?;
    Ok(report
        .with("commutator_ab", commutator_defect(a.hermitian(), b.hermitian())?)
        .with("gamma_defect_product", g.defect_product)
        .with("gamma_defect_bracket", g.defect_bracket))
}

/// Clarkson–McCarthy: `2(||X||^p + ||Y||^p)` and `2^{p-1}(||X||^p + ||Y||^p)` bracket
/// `||X+Y||^p + ||X-Y||^p`, below and above respectively for `p >= 2`, swapped for `p <= 2`.
///
/// The first report compares against the constant-2 bound, the second against the
/// constant-`2^{p-1}` bound. Both orientations flip at `p = 2`.
pub fn check_clarkson_mccarthy(
    x: &CMatrix,
    y: &CMatrix,
    p: f64,
) -> Result<(InequalityReport, InequalityReport)> {
    require("clarkson_mccarthy", p, p >= 1.0 && p.is_finite(), "[1, inf)")?;
    check_shapes(x, y)?;
    let nx = schatten_norm(x, p)?.powf(p);
    let ny = schatten_norm(y, p)?.powf(p);
    let s = schatten_norm(&(x + y), p)?.powf(p) + schatten_norm(&(x - y), p)?.powf(p);
    let two = 2.0 * (nx + ny);
    let two_pow = 2.0_f64.powf(p - 1.0) * (nx + ny);
    let (lower, upper) = if p >= 2.0 {
        (
            InequalityReport::new("clarkson_mccarthy_lower", p, s, two),
            InequalityReport::new("clarkson_mccarthy_upper", p, two_pow, s),
        )
    } else {
        (
            InequalityReport::new("clarkson_mccarthy_lower", p, two, s),
            InequalityReport::new("clarkson_mccarthy_upper", p, s, two_pow),
        )
    };
    let comm = matrix_commutator(x, y);
    Ok((
        lower.with("commutator_xy", comm),
        upper.with("commutator_xy", comm),
    ))
}

/// `(||X+Y||^2 + ||X-Y||^2)/2 >= ||X||^2 + (p-1)||Y||^2` for `1 < p <= 2`.
pub fn check_two_uniform_convexity_norm(x: &CMatrix, y: &CMatrix, p: f64) -> Result<InequalityReport> {
    require("two_uniform_convexity", p, p > 1.0 && p <= 2.0, "(1, 2]")?;
    check_shapes(x, y)?;
    let sum = schatten_norm(&(x + y), p)?;
    let diff = schatten_norm(&(x - y), p)?;
    let nx = schatten_norm(x, p)?;
    let ny = schatten_norm(y, p)?;
    let lhs = 0.5 * (sum * sum + diff * diff);
    let rhs = nx * nx + (p - 1.0) * ny * ny;
    Ok(InequalityReport::new("two_uniform_convexity", p, lhs, rhs).with("commutator_xy", matrix_commutator(x, y)))
}

/// `delta_p(A, B) >= ||log A - log B||_p`, strict unless `[A, B] = 0`.
pub fn check_distance_lower_bound(a: &SpdMatrix, b: &SpdMatrix, p: f64) -> Result<InequalityReport> {
    require("distance_lower_bound", p, p > 1.0 && p.is_finite(), "(1, inf)")?;
    let d = delta_p(a, b, p)?;
    let le = log_euclidean_dist(a, b, p)?;
    Ok(InequalityReport::new("distance_lower_bound", p, d, le)
        .with("commutator_ab", commutator_defect(a.hermitian(), b.hermitian())?))
}

/// `½δ(A,C)² + ½δ(B,C)² >= δ(A#B, C)² + (p-1)/4 δ(A,B)²` for `1 < p <= 2`.
pub fn check_conde_2uc(a: &SpdMatrix, b: &SpdMatrix, c: &SpdMatrix, p: f64) -> Result<InequalityReport> {
    require("conde_2uc", p, p > 1.0 && p <= 2.0, "(1, 2]")?;
    let m = geometric_mean(a, b)?;
    let dac = delta_p(a, c, p)?;
    let dbc = delta_p(b, c, p)?;
    let dab = delta_p(a, b, p)?;
    let dmc = delta_p(&m, c, p)?;
    let lhs = 0.5 * dac * dac + 0.5 * dbc * dbc;
    let rhs = dmc * dmc + 0.25 * (p - 1.0) * dab * dab;
    gamma_diagnostics(InequalityReport::new("conde_2uc", p, lhs, rhs), a, b, c)
}

fn require_on_sphere(u: &SpdMatrix, p: f64) -> Result<()> {
    let off = (sphere_radius(u, p)? - 1.0).abs();
    if off <= SPHERE_TOL {
        Ok(())
    } else {
        Err(Error::OffSphere(off))
    }
}

fn sphere_inputs(a: &SpdMatrix, b: &SpdMatrix, p: f64) -> Result<(f64, f64)> {
    require_on_sphere(a, p)?;
    require_on_sphere(b, p)?;
    let id = SpdMatrix::identity(a.dim())?;
    let dmi = delta_p(&geometric_mean(a, b)?, &id, p)?;
    let dab = delta_p(a, b, p)?;
    Ok((dmi, dab))
}

/// `1 - δ(A#B, I) >= (p-1)/8 δ(A,B)²` for `A, B` on `E_p`, `1 < p <= 2`.
pub fn check_sphere_2uc(a: &SpdMatrix, b: &SpdMatrix, p: f64) -> Result<InequalityReport> {
    require("sphere_2uc", p, p > 1.0 && p <= 2.0, "(1, 2]")?;
    let (dmi, dab) = sphere_inputs(a, b, p)?;
    Ok(InequalityReport::new("sphere_2uc", p, 1.0 - dmi, (p - 1.0) / 8.0 * dab * dab)
        .with("commutator_ab", commutator_defect(a.hermitian(), b.hermitian())?))
}

/// `½(δ(A,C)^p + δ(B,C)^p) >= 2^{-p} δ(A,B)^p + δ(A#B, C)^p` for `p >= 2`.
pub fn check_p_convexity_high(a: &SpdMatrix, b: &SpdMatrix, c: &SpdMatrix, p: f64) -> Result<InequalityReport> {
    require("p_convexity_high", p, p >= 2.0 && p.is_finite(), "[2, inf)")?;
    let m = geometric_mean(a, b)?;
    let lhs = 0.5 * (delta_p(a, c, p)?.powf(p) + delta_p(b, c, p)?.powf(p));
    let rhs = 2.0_f64.powf(-p) * delta_p(a, b, p)?.powf(p) + delta_p(&m, c, p)?.powf(p);
    gamma_diagnostics(InequalityReport::new("p_convexity_high", p, lhs, rhs), a, b, c)
}

/// `1 - δ(A#B, I)^p >= 2^{-p} δ(A,B)^p` for `A, B` on `E_p`, `p >= 2`.
pub fn check_sphere_high(a: &SpdMatrix, b: &SpdMatrix, p: f64) -> Result<InequalityReport> {
    require("sphere_high", p, p >= 2.0 && p.is_finite(), "[2, inf)")?;
    let (dmi, dab) = sphere_inputs(a, b, p)?;
    Ok(InequalityReport::new("sphere_high", p, 1.0 - dmi.powf(p), 2.0_f64.powf(-p) * dab.powf(p))
        .with("commutator_ab", commutator_defect(a.hermitian(), b.hermitian())?))
}

/// `δ(A,C)^p + δ(B,C)^p >= ½δ(A,B)^p + 2^{p-1} δ(A#B, C)^p` for `1 < p <= 2`.
pub fn check_p_convexity_low(a: &SpdMatrix, b: &SpdMatrix, c: &SpdMatrix, p: f64) -> Result<InequalityReport> {
    require("p_convexity_low", p, p > 1.0 && p <= 2.0, "(1, 2]")?;
    let m = geometric_mean(a, b)?;
    let lhs = delta_p(a, c, p)?.powf(p) + delta_p(b, c, p)?.powf(p);
    let rhs = 0.5 * delta_p(a, b, p)?.powf(p) + 2.0_f64.powf(p - 1.0) * delta_p(&m, c, p)?.powf(p);
    gamma_diagnostics(InequalityReport::new("p_convexity_low", p, lhs, rhs), a, b, c)
}

/// `1 - 2^{p-2} δ(A#B, I)^p >= δ(A,B)^p / 4` for `A, B` on `E_p`, `1 < p <= 2`.
pub fn check_sphere_low(a: &SpdMatrix, b: &SpdMatrix, p: f64) -> Result<InequalityReport> {
    require("sphere_low", p, p > 1.0 && p <= 2.0, "(1, 2]")?;
    let (dmi, dab) = sphere_inputs(a, b, p)?;
    Ok(
        InequalityReport::new("sphere_low", p, 1.0 - 2.0_f64.powf(p - 2.0) * dmi.powf(p), 0.25 * dab.powf(p))
            .with("commutator_ab", commutator_defect(a.hermitian(), b.hermitian())?),
    )
}

/// `||X+Y||^p + ||X-Y||^p >= (||X|| + ||Y||)^p + | ||X|| - ||Y|| |^p`.
///
/// Accepted only where the matrix inequality is proven: `p` in `[1, 4/3]` or `p = 3/2`.
pub fn check_hanner_matrix(x: &CMatrix, y: &CMatrix, p: f64) -> Result<InequalityReport> {
    let proven = (1.0..=4.0 / 3.0).contains(&p) || (p - 1.5).abs() <= 1e-12;
    if !proven {
        return Err(Error::UnprovenRange(p));
    }
    check_shapes(x, y)?;
    let nx = schatten_norm(x, p)?;
    let ny = schatten_norm(y, p)?;
    let lhs = schatten_norm(&(x + y), p)?.powf(p) + schatten_norm(&(x - y), p)?.powf(p);
    let rhs = (nx + ny).powf(p) + (nx - ny).abs().powf(p);
    Ok(InequalityReport::new("hanner", p, lhs, rhs).with("commutator_xy", matrix_commutator(x, y)))
}

/// `λ(H + K) ≺ λ(log(e^{K/2} e^H e^{K/2}))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationLemmaReport {
    pub verdict: MajorizationVerdict,
    /// `λ(H + K)`, the majorized side.
    pub sum_spectrum: Spectrum,
    /// `λ(log(e^{K/2} e^H e^{K/2}))`.
    pub product_spectrum: Spectrum,
    /// `tr(log(e^{K/2} e^H e^{K/2})) - tr(H + K)`; vanishes since `det` is multiplicative.
    pub trace_difference: f64,
    pub commutator: f64,
}

impl MajorizationLemmaReport {
    /// Flattens into a report row: `gap` is the smallest prefix slack and `satisfied`
    /// follows the majorization verdict (which also requires equal totals).
    pub fn to_report(&self) -> InequalityReport {
        let mut r = InequalityReport::new(
            "log_majorization",
            f64::NAN,
            self.product_spectrum.sum(),
            self.sum_spectrum.sum(),
        );
        r.gap = self.verdict.min_slack();
        r.satisfied = self.verdict.holds;
        r.with("trace_difference", self.trace_difference)
            .with("commutator_hk", self.commutator)
    }
}

pub fn check_log_majorization_lemma(h: &HermitianMatrix, k: &HermitianMatrix) -> Result<MajorizationLemmaReport> {
    let sum = h.add(k)?;
    // e^{K/2} e^H e^{K/2} = G^* G with G = e^{H/2} e^{K/2}. Its log-spectrum is read off
    // the singular values of G, which keeps the small end accurate to eps·cond(G)
    // instead of eps·cond(G)^2.
    let g = mat_exp(&h.scale(0.5))?.into_matrix() * mat_exp(&k.scale(0.5))?.into_matrix();
    let log_sigma = singular_values(&g)?
        .values()
        .iter()
        .map(|&s| {
            let l = 2.0 * s.ln();
            if l.is_finite() { Ok(l) } else { Err(Error::Domain(s)) }
        })
        .collect::<Result<Vec<f64>>>()?;
    let sum_spectrum = Spectrum::of_hermitian(&sum)?;
    let product_spectrum = Spectrum::eigenvalues(log_sigma)?;
    let verdict = majorizes(&sum_spectrum, &product_spectrum)?;
    Ok(MajorizationLemmaReport {
        verdict,
        trace_difference: product_spectrum.sum() - sum.trace(),
        sum_spectrum,
        product_spectrum,
        commutator: commutator_defect(h, k)?,
    })
}

/// Every checker, addressable by its identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Inequality {
    ClarksonMcCarthyLower,
    ClarksonMcCarthyUpper,
    TwoUniformConvexity,
    DistanceLowerBound,
    Conde2uc,
    Sphere2uc,
    PConvexityHigh,
    SphereHigh,
    PConvexityLow,
    SphereLow,
    LogMajorization,
    Hanner,
}

impl Inequality {
    pub const ALL: [Inequality; 12] = [
        Inequality::ClarksonMcCarthyLower,
        Inequality::ClarksonMcCarthyUpper,
        Inequality::TwoUniformConvexity,
        Inequality::DistanceLowerBound,
        Inequality::Conde2uc,
        Inequality::Sphere2uc,
        Inequality::PConvexityHigh,
        Inequality::SphereHigh,
        Inequality::PConvexityLow,
        Inequality::SphereLow,
        Inequality::LogMajorization,
        Inequality::Hanner,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Inequality::ClarksonMcCarthyLower => "clarkson_mccarthy_lower",
            Inequality::ClarksonMcCarthyUpper => "clarkson_mccarthy_upper",
            Inequality::TwoUniformConvexity => "two_uniform_convexity",
            Inequality::DistanceLowerBound => "distance_lower_bound",
            Inequality::Conde2uc => "conde_2uc",
            Inequality::Sphere2uc => "sphere_2uc",
            Inequality::PConvexityHigh => "p_convexity_high",
            Inequality::SphereHigh => "sphere_high",
            Inequality::PConvexityLow => "p_convexity_low",
            Inequality::SphereLow => "sphere_low",
            Inequality::LogMajorization => "log_majorization",
            Inequality::Hanner => "hanner",
        }
    }

    /// Whether `p` lies in the range where this inequality is a theorem.
    pub fn accepts(self, p: f64) -> bool {
        match self {
            Inequality::ClarksonMcCarthyLower | Inequality::ClarksonMcCarthyUpper => p >= 1.0 && p.is_finite(),
            Inequality::DistanceLowerBound => p > 1.0 && p.is_finite(),
            Inequality::TwoUniformConvexity
            | Inequality::Conde2uc
            | Inequality::Sphere2uc
            | Inequality::PConvexityLow
            | Inequality::SphereLow => p > 1.0 && p <= 2.0,
            Inequality::PConvexityHigh | Inequality::SphereHigh => p >= 2.0 && p.is_finite(),
            Inequality::LogMajorization => !p.is_nan(),
            Inequality::Hanner => (1.0..=4.0 / 3.0).contains(&p) || (p - 1.5).abs() <= 1e-12,
        }
    }

    /// The range gate as an error, for harness validation before any sampling.
    pub fn validate(self, p: f64) -> Result<()> {
        if self.accepts(p) {
            return Ok(());
        }
        Err(match self {
            Inequality::Hanner => Error::UnprovenRange(p),
            _ => Error::OutOfRange {
                checker: self.id(),
                p,
                range: match self {
                    Inequality::ClarksonMcCarthyLower | Inequality::ClarksonMcCarthyUpper => "[1, inf)",
                    Inequality::DistanceLowerBound => "(1, inf)",
                    Inequality::PConvexityHigh | Inequality::SphereHigh => "[2, inf)",
                    Inequality::LogMajorization => "any real",
                    _ => "(1, 2]",
                },
            },
        })
    }

    /// Evaluates on a triple of SPD matrices. Matrix-norm inequalities take
    /// `X = log A`, `Y = log B`; sphere forms first project `A` and `B` onto `E_p`.
    pub fn evaluate(self, a: &SpdMatrix, b: &SpdMatrix, c: &SpdMatrix, p: f64) -> Result<InequalityReport> {
        self.validate(p)?;
        let logs = || -> Result<(HermitianMatrix, HermitianMatrix)> { Ok((a.log()?, b.log()?)) };
        let sphere = || -> Result<(SpdMatrix, SpdMatrix)> {
            Ok((
                crate::geodesic::project_to_unit_sphere(a, p)?,
                crate::geodesic::project_to_unit_sphere(b, p)?,
            ))
        };
        match self {
            Inequality::ClarksonMcCarthyLower | Inequality::ClarksonMcCarthyUpper => {
                let (x, y) = logs()?;
                let (lower, upper) = check_clarkson_mccarthy(x.matrix(), y.matrix(), p)?;
                Ok(if self == Inequality::ClarksonMcCarthyLower { lower } else { upper })
            }
            Inequality::TwoUniformConvexity => {
                let (x, y) = logs()?;
                check_two_uniform_convexity_norm(x.matrix(), y.matrix(), p)
            }
            Inequality::Hanner => {
                let (x, y) = logs()?;
                check_hanner_matrix(x.matrix(), y.matrix(), p)
            }
            Inequality::LogMajorization => {
                let (x, y) = logs()?;
                let mut r = check_log_majorization_lemma(&x, &y)?.to_report();
                r.p = p;
                Ok(r)
            }
            Inequality::DistanceLowerBound => check_distance_lower_bound(a, b, p),
            Inequality::Conde2uc => check_conde_2uc(a, b, c, p),
            Inequality::PConvexityHigh => check_p_convexity_high(a, b, c, p),
            Inequality::PConvexityLow => check_p_convexity_low(a, b, c, p),
            Inequality::Sphere2uc => {
                let (u, v) = sphere()?;
                check_sphere_2uc(&u, &v, p)
            }
            Inequality::SphereHigh => {
                let (u, v) = sphere()?;
                check_sphere_high(&u, &v, p)
            }
            Inequality::SphereLow => {
                let (u, v) = sphere()?;
                check_sphere_low(&u, &v, p)
            }
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Inequality::ALL
            .into_iter()
            .find(|i| i.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown inequality '{s}'")))
    }
}
