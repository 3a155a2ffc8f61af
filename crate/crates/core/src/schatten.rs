//! Singular spectra, Schatten norms and (log-)majorization predicates.

use nalgebra::SVD;

use crate::error::{Error, Result};
use crate::matcore::{eigh, CMatrix, HermitianMatrix, SVD_ITERATION_CAP};

/// Additive tolerance on prefix sums is `MAJORIZATION_TOL * (1 + ||b||_1)`.
pub const MAJORIZATION_TOL: f64 = 1e-10;

/// Additive tolerance on prefix sums of logarithms.
pub const LOG_MAJORIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Eigenvalue,
    Singular,
}

/// A real vector kept in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    kind: SpectrumKind,
}

impl Spectrum {
    /// Sorts `values` descending. Singular spectra must be nonnegative.
    pub fn new(mut values: Vec<f64>, kind: SpectrumKind) -> Result<Self> {
        if let Some(&v) = values.iter().find(|v| v.is_nan()) {
            return Err(Error::InvalidArgument(format!("spectrum entry {v}")));
        }
        if kind == SpectrumKind::Singular {
            if let Some(&v) = values.iter().find(|&&v| v < 0.0) {
                return Err(Error::NegativeEntry(v));
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values, kind })
    }

    pub fn eigenvalues(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SpectrumKind::Eigenvalue)
    }

    pub fn singular(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SpectrumKind::Singular)
    }

    /// Eigenvalues of a Hermitian matrix.
    pub fn of_hermitian(h: &HermitianMatrix) -> Result<Self> {
        Ok(Self {
            values: eigh(h)?.eigenvalues,
            kind: SpectrumKind::Eigenvalue,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `(sum |x_i|^p)^(1/p)`, or `max |x_i|` for `p = inf`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(&self.values, p)
    }
}

/// Scaled `l^p` norm of a real vector; `p` must be `>= 1` or `+inf`.
pub fn lp_norm(values: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    let s: f64 = values.iter().map(|v| (v.abs() / max).powf(p)).sum();
    Ok(max * s.powf(1.0 / p))
}

/// Singular values of a Hermitian matrix: sorted absolute eigenvalues.
pub fn singular_values_hermitian(h: &HermitianMatrix) -> Result<Spectrum> {
    let values = eigh(h)?.eigenvalues.iter().map(|v| v.abs()).collect();
    Spectrum::singular(values)
}

/// Singular values of any rectangular complex matrix.
pub fn singular_values(m: &CMatrix) -> Result<Spectrum> {
    if m.is_square() && m.nrows() > 0 {
        if let Ok(h) = HermitianMatrix::new(m.clone()) {
            return singular_values_hermitian(&h);
        }
    }
    if m.is_empty() {
        return Spectrum::singular(Vec::new());
    }
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, SVD_ITERATION_CAP).ok_or(
        Error::NoConvergence {
            cap: SVD_ITERATION_CAP,
        },
    )?;
    Spectrum::singular(svd.singular_values.iter().map(|v| v.max(0.0)).collect())
}

/// Schatten p-norm, `p` in `[1, inf]`.
pub fn schatten_norm(m: &CMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    singular_values(m)?.lp_norm(p)
}

pub fn schatten_norm_hermitian(h: &HermitianMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    singular_values_hermitian(h)?.lp_norm(p)
}

/// Outcome of a prefix-sum (or prefix-product) comparison of `a` against `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationVerdict {
    /// `a` is majorized by `b`: weak holds and the totals agree.
    pub holds: bool,
    /// Every prefix of `a` is at most the matching prefix of `b`.
    pub weak: bool,
    pub tight_at_end: bool,
    pub first_violation_index: Option<usize>,
    /// `prefix(b)_k - prefix(a)_k`.
    pub slack: Vec<f64>,
}

impl MajorizationVerdict {
    fn from_slack(slack: Vec<f64>, tol: f64) -> Self {
        let first_violation_index = slack.iter().position(|&s| s < -tol);
        let weak = first_violation_index.is_none();
        let tight_at_end = slack.last().is_none_or(|s| s.abs() <= tol);
        Self {
            holds: weak && tight_at_end,
            weak,
            tight_at_end,
            first_violation_index,
            slack,
        }
    }

    /// Every prefix agrees within `tol`.
    pub fn tight_everywhere(&self, tol: f64) -> bool {
        self.slack.iter().all(|s| s.abs() <= tol)
    }

    /// Smallest prefix slack; `+inf` for empty spectra.
    pub fn min_slack(&self) -> f64 {
        self.slack.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_lengths(a: &Spectrum, b: &Spectrum) -> Result<()> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch(a.len(), b.len()))
    }
}

fn linear_verdict(a: &Spectrum, b: &Spectrum) -> Result<MajorizationVerdict> {
    check_lengths(a, b)?;
    let tol = MAJORIZATION_TOL * (1.0 + b.values.iter().map(|v| v.abs()).sum::<f64>());
    let (mut pa, mut pb) = (0.0, 0.0);
    let slack = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| {
            pa += x;
            pb += y;
            pb - pa
        })
        .collect();
    Ok(MajorizationVerdict::from_slack(slack, tol))
}

/// `a ≺_w b`: read `.weak`. The same verdict also carries strict majorization in `.holds`.
pub fn weak_majorizes(a: &Spectrum, b: &Spectrum) -> Result<MajorizationVerdict> {
    linear_verdict(a, b)
}

/// `a ≺ b`: read `.holds`.
pub fn majorizes(a: &Spectrum, b: &Spectrum) -> Result<MajorizationVerdict> {
    linear_verdict(a, b)
}

fn log_verdict(a: &Spectrum, b: &Spectrum) -> Result<MajorizationVerdict> {
    check_lengths(a, b)?;
    if let Some(&v) = a.values.iter().chain(&b.values).find(|&&v| v < 0.0) {
        return Err(Error::NegativeEntry(v));
    }
    // Zeros sit at the tail of a descending nonnegative vector; once a prefix product
    // vanishes it stays zero, so the comparison is carried as -inf in log space.
    let (mut la, mut lb) = (0.0_f64, 0.0_f64);
    let slack = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| {
            la += x.ln();
            lb += y.ln();
            match (la.is_infinite(), lb.is_infinite()) {
                (true, true) => 0.0,
                (true, false) => f64::INFINITY,
                (false, true) => f64::NEG_INFINITY,
                (false, false) => lb - la,
            }
        })
        .collect();
    Ok(MajorizationVerdict::from_slack(slack, LOG_MAJORIZATION_TOL))
}

/// Weak log-majorization `a ≺_w(log) b` on nonnegative vectors: read `.weak`.
pub fn weak_log_majorizes(a: &Spectrum, b: &Spectrum) -> Result<MajorizationVerdict> {
    log_verdict(a, b)
}

/// Log-majorization `a ≺_(log) b`: read `.holds`.
pub fn log_majorizes(a: &Spectrum, b: &Spectrum) -> Result<MajorizationVerdict> {
    log_verdict(a, b)
}

/// `sum |a_i|^p`, the strictly convex sum used by the equality-case lemmas.
pub fn power_sum(a: &Spectrum, p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(a.values.iter().map(|v| v.abs().powf(p)).sum())
}

/// Sorted spectra are permutations of each other iff they agree elementwise.
pub fn is_permutation_of(a: &Spectrum, b: &Spectrum, tol: f64) -> bool {
    a.len() == b.len() && a.values.iter().zip(&b.values).all(|(x, y)| (x - y).abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::c64;

    fn eig(v: &[f64]) -> Spectrum {
        Spectrum::eigenvalues(v.to_vec()).unwrap()
    }

    fn sing(v: &[f64]) -> Spectrum {
        Spectrum::singular(v.to_vec()).unwrap()
    }

    #[test]
    fn singular_values_examples() {
        let h = HermitianMatrix::diag(&[3.0, -4.0]).unwrap();
        assert_eq!(singular_values(h.matrix()).unwrap().values(), &[4.0, 3.0]);
        assert_eq!(singular_values(&CMatrix::zeros(3, 3)).unwrap().values(), &[0.0; 3]);

        // Gram oracle: M^H M = diag(0, 4)
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c64::new(0.0, 0.0), c64::new(2.0, 0.0), c64::new(0.0, 0.0), c64::new(0.0, 0.0)],
        );
        let s = singular_values(&m).unwrap();
        assert!((s.values()[0] - 2.0).abs() < 1e-15 && s.values()[1].abs() < 1e-15);
        assert_eq!(s.kind(), SpectrumKind::Singular);
    }

    #[test]
    fn rectangular_singular_values() {
        let m = CMatrix::from_row_slice(
            2,
            3,
            &[
                c64::new(1.0, 0.0),
                c64::new(0.0, 0.0),
                c64::new(0.0, 0.0),
                c64::new(0.0, 0.0),
                c64::new(0.0, 2.0),
                c64::new(0.0, 0.0),
            ],
        );
        let s = singular_values(&m).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.values()[0] - 2.0).abs() < 1e-14 && (s.values()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn schatten_examples() {
        let h = HermitianMatrix::diag(&[3.0, -4.0]).unwrap();
        let m = h.matrix();
        assert!((schatten_norm(m, 1.0).unwrap() - 7.0).abs() < 1e-14);
        assert!((schatten_norm(m, 2.0).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(schatten_norm(m, f64::INFINITY).unwrap(), 4.0);
        for p in [1.0, 1.5, 3.0, 7.0] {
            let n = schatten_norm_hermitian(&HermitianMatrix::identity(4).unwrap(), p).unwrap();
            assert!((n - 4.0_f64.powf(1.0 / p)).abs() < 1e-14);
        }
        assert!(matches!(schatten_norm(m, 0.5), Err(Error::InvalidExponent(_))));
        assert!(matches!(schatten_norm(m, f64::NAN), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn schatten_two_is_frobenius() {
        let h = HermitianMatrix::new(CMatrix::from_row_slice(
            3,
            3,
            &[
                c64::new(0.3, 0.0),
                c64::new(-1.2, 0.4),
                c64::new(0.5, -0.7),
                c64::new(-1.2, -0.4),
                c64::new(2.1, 0.0),
                c64::new(0.05, 0.9),
                c64::new(0.5, 0.7),
                c64::new(0.05, -0.9),
                c64::new(-0.8, 0.0),
            ],
        ))
        .unwrap();
        let oracle: f64 = h.matrix().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let got = schatten_norm(h.matrix(), 2.0).unwrap();
        assert!((got - oracle).abs() <= 1e-12 * oracle);
    }

    #[test]
    fn majorization_examples() {
        let v = majorizes(&sing(&[3.0, 1.0]), &sing(&[4.0, 0.0])).unwrap();
        assert!(v.holds && v.weak && v.tight_at_end);
        assert_eq!(v.slack, vec![1.0, 0.0]);

        let v = weak_majorizes(&sing(&[4.0, 0.0]), &sing(&[3.0, 1.0])).unwrap();
        assert!(!v.weak && !v.holds);
        assert_eq!(v.first_violation_index, Some(0));

        // weak but not strict
        let v = majorizes(&eig(&[1.0, -1.0]), &eig(&[2.0, 0.0])).unwrap();
        assert!(v.weak && !v.tight_at_end && !v.holds);

        assert!(matches!(
            majorizes(&eig(&[1.0]), &eig(&[1.0, 0.0])),
            Err(Error::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn log_majorization_examples() {
        let v = log_majorizes(&sing(&[4.0, 1.0]), &sing(&[8.0, 0.5])).unwrap();
        assert!(v.holds);

        let a = sing(&[5.0, 2.0, 0.3]);
        let v = log_majorizes(&a, &a).unwrap();
        assert!(v.holds && v.tight_everywhere(0.0));

        let v = weak_log_majorizes(&sing(&[5.0, 2.0]), &sing(&[6.0, 2.0])).unwrap();
        assert!(v.weak && !v.holds);

        let neg = eig(&[1.0, -1.0]);
        assert!(matches!(log_majorizes(&neg, &neg), Err(Error::NegativeEntry(_))));
    }

    #[test]
    fn log_majorization_trailing_zeros() {
        let v = log_majorizes(&sing(&[2.0, 0.0]), &sing(&[3.0, 0.0])).unwrap();
        assert!(v.holds);
        let v = weak_log_majorizes(&sing(&[2.0, 1.0]), &sing(&[3.0, 0.0])).unwrap();
        assert!(!v.weak);
        assert_eq!(v.first_violation_index, Some(1));
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sum(&eig(&[2.0, -2.0]), 2.0).unwrap(), 8.0);
        assert_eq!(power_sum(&eig(&[1.0, 1.0, 1.0]), 3.0).unwrap(), 3.0);
        assert!(power_sum(&eig(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn power_sum_matches_compensated_oracle() {
        // Neumaier-compensated sum of the same terms, independent of iterator summation.
        let xs: Vec<f64> = (0..40).map(|i| ((i * 37 % 17) as f64 - 8.3) * 0.173).collect();
        let p = 2.7;
        let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
        for x in &xs {
            let t = x.abs().powf(p);
            let s = sum + t;
            comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
            sum = s;
        }
        let oracle = sum + comp;
        let got = power_sum(&eig(&xs), p).unwrap();
        assert!((got - oracle).abs() <= 1e-12 * oracle);
    }

    #[test]
    fn permutation_examples() {
        assert!(is_permutation_of(&eig(&[3.0, 1.0]), &eig(&[1.0, 3.0]), 0.0));
        assert!(is_permutation_of(&eig(&[3.0, 1.0]), &eig(&[3.0, 1.0 + 2e-9]), 1e-8));
        assert!(!is_permutation_of(&eig(&[3.0, 1.0]), &eig(&[2.0, 2.0]), 1e-8));
    }

    #[test]
    fn spectrum_rejects_negative_singular_values() {
        assert!(Spectrum::singular(vec![1.0, -0.1]).is_err());
        assert_eq!(eig(&[1.0, 3.0, 2.0]).values(), &[3.0, 2.0, 1.0]);
    }
}
