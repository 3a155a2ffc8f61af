//! Dense Hermitian and positive-definite matrices with spectral functional calculus.
//!
//! Every matrix is complex; real symmetric inputs are simply complex matrices with zero
//! imaginary parts. [`HermitianMatrix`] stores its entries exactly symmetrized, and
//! [`SpdMatrix`] carries the eigendecomposition computed by its positivity gate so that
//! roots, powers and logarithms reuse it.

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

/// Double-precision complex scalar.
#[allow(non_camel_case_types)]
pub type c64 = Complex<f64>;

/// Dense complex matrix.
pub type CMatrix = DMatrix<c64>;

/// Iteration cap handed to the Hermitian eigensolver.
pub const EIGH_ITERATION_CAP: usize = 10_000;

/// Iteration cap handed to the SVD.
pub const SVD_ITERATION_CAP: usize = 10_000;

/// Relative asymmetry accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Positivity gate: `lambda_min > SPD_RATIO * lambda_max`.
pub const SPD_RATIO: f64 = 1e-10;

/// Largest condition estimate accepted by [`conjugate`].
pub const MAX_CONJUGATOR_CONDITION: f64 = 1e12;

/// A self-adjoint square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: CMatrix,
}

impl HermitianMatrix {
    /// Validates self-adjointness within `1e-12 * max|entry|` and stores `(M + M^H) / 2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NotSquare(rows, cols));
        }
        if rows == 0 {
            return Err(Error::Empty);
        }
        let max_abs = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut asymmetry: f64 = 0.0;
        for i in 0..rows {
            for j in i..cols {
                asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        let tolerance = HERMITIAN_TOL * max_abs;
        if asymmetry > tolerance {
            return Err(Error::NotHermitian {
                asymmetry,
                tolerance,
            });
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without validation. Used for results that are Hermitian up to roundoff.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let adjoint = m.adjoint();
        Self {
            entries: (m + adjoint).scale(0.5),
        }
    }

    /// Builds a Hermitian matrix from real row-major rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare(n, rows.first().map_or(0, |r| r.len())));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| c64::new(rows[i][j], 0.0)))
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        let n = values.len();
        Ok(Self {
            entries: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    c64::new(values[i], 0.0)
                } else {
                    c64::new(0.0, 0.0)
                }
            }),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::diag(&vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::diag(&vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.entries.norm()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self::symmetrized(&self.entries + &other.entries))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self::symmetrized(&self.entries - &other.entries))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            entries: self.entries.map(|z| z * s),
        }
    }

    /// `U diag(f(lambda_i)) U^H` for any real function, failing if `f` leaves the reals.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        eigh(self)?.apply(f)
    }
}

/// A Hermitian matrix with strictly positive spectrum, `lambda_min > 1e-10 * lambda_max`.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    base: HermitianMatrix,
    eig: EigenDecomposition,
}

impl SpdMatrix {
    pub fn new(base: HermitianMatrix) -> Result<Self> {
        let eig = eigh(&base)?;
        let max = eig.eigenvalues[0];
        let min = eig.eigenvalues[eig.eigenvalues.len() - 1];
        if !(max > 0.0 && min > SPD_RATIO * max) {
            return Err(Error::NotPositiveDefinite { min, max });
        }
        Ok(Self { base, eig })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_rows(rows)?)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::diag(values)?)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(HermitianMatrix::identity(n)?)
    }

    /// `exp(H)` for a Hermitian `H`.
    pub fn exp_of(h: &HermitianMatrix) -> Result<Self> {
        Self::new(mat_exp(h)?)
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn norm_fro(&self) -> f64 {
        self.base.norm_fro()
    }

    /// `lambda_max / lambda_min`.
    pub fn condition(&self) -> f64 {
        self.eig.eigenvalues[0] / self.eig.eigenvalues[self.eig.eigenvalues.len() - 1]
    }

    /// `A^t` for any real `t`.
    pub fn pow(&self, t: f64) -> Result<SpdMatrix> {
        SpdMatrix::new(mat_pow(self, t)?)
    }

    pub fn sqrt(&self) -> Result<SpdMatrix> {
        self.pow(0.5)
    }

    pub fn inverse(&self) -> Result<SpdMatrix> {
        self.pow(-1.0)
    }

    pub fn log(&self) -> Result<HermitianMatrix> {
        mat_fn(self, f64::ln)
    }
}

/// Eigenvalues in descending order together with a unitary whose columns are the
/// matching eigenvectors.
///
/// Each eigenvector's largest-magnitude component (first one on ties) is rotated to be
/// real and positive, so identical input bits give identical output bits.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub unitary: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.assemble(&self.eigenvalues)
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
        let values = self
            .eigenvalues
            .iter()
            .map(|&l| {
                let v = f(l);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Domain(l))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.assemble(&values))
    }

    fn assemble(&self, values: &[f64]) -> HermitianMatrix {
        let mut scaled = self.unitary.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        HermitianMatrix::symmetrized(scaled * self.unitary.adjoint())
    }
}

/// Hermitian eigendecomposition with descending eigenvalues and fixed eigenvector phases.
pub fn eigh(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    let raw = SymmetricEigen::try_new(h.matrix().clone(), f64::EPSILON, EIGH_ITERATION_CAP)
        .ok_or(Error::NoConvergence {
            cap: EIGH_ITERATION_CAP,
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw.eigenvalues[j].total_cmp(&raw.eigenvalues[i]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&i| raw.eigenvalues[i]).collect();
    let mut unitary = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = raw.eigenvectors.column(src);
        let mut pivot = 0;
        let mut best = -1.0;
        for (k, z) in col.iter().enumerate() {
            if z.norm() > best {
                best = z.norm();
                pivot = k;
            }
        }
        let phase = col[pivot].conj() / col[pivot].norm();
        unitary.set_column(dst, &(col * phase));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        unitary,
    })
}

/// `U diag(f(lambda_i)) U^H` on the spectrum of an SPD matrix.
pub fn mat_fn(a: &SpdMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    a.eig.apply(f)
}

/// Principal logarithm; requires a strictly positive spectrum.
pub fn mat_log(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    eigh(h)?.apply(|l| if l > 0.0 { l.ln() } else { f64::NAN })
}

pub fn mat_exp(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    h.apply(f64::exp)
}

pub fn mat_pow(a: &SpdMatrix, t: f64) -> Result<HermitianMatrix> {
    mat_fn(a, |l| l.powf(t))
}

pub fn mat_sqrt(a: &SpdMatrix) -> Result<HermitianMatrix> {
    mat_fn(a, f64::sqrt)
}

pub fn mat_inv_sqrt(a: &SpdMatrix) -> Result<HermitianMatrix> {
    mat_fn(a, |l| 1.0 / l.sqrt())
}

/// Ratio of extreme singular values of a general square matrix.
pub fn condition_estimate(x: &CMatrix) -> Result<f64> {
    let (rows, cols) = x.shape();
    if rows != cols {
        return Err(Error::NotSquare(rows, cols));
    }
    let svd = SVD::try_new(x.clone(), false, false, f64::EPSILON, SVD_ITERATION_CAP).ok_or(
        Error::NoConvergence {
            cap: SVD_ITERATION_CAP,
        },
    )?;
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

/// The congruence `X A X^H`.
pub fn conjugate(x: &CMatrix, a: &SpdMatrix) -> Result<SpdMatrix> {
    let (rows, cols) = x.shape();
    if rows != cols {
        return Err(Error::NotSquare(rows, cols));
    }
    same_dim(rows, a.dim())?;
    let cond = condition_estimate(x)?;
    if !(cond < MAX_CONJUGATOR_CONDITION) {
        return Err(Error::Singular(cond));
    }
    SpdMatrix::new(HermitianMatrix::symmetrized(x * a.matrix() * x.adjoint()))
}

/// `||AB - BA||_F`.
pub fn commutator_defect(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    let (a, b) = (a.matrix(), b.matrix());
    Ok((a * b - b * a).norm())
}

/// Default tolerance for [`is_commuting`], scaled as `1e-9 * ||A||_F * ||B||_F`.
pub const COMMUTING_TOL: f64 = 1e-9;

/// `commutator_defect(A, B) <= tol * ||A||_F * ||B||_F`, with `tol` defaulting to 1e-9.
pub fn is_commuting(a: &HermitianMatrix, b: &HermitianMatrix, tol: Option<f64>) -> Result<bool> {
    let tol = tol.unwrap_or(COMMUTING_TOL) * a.norm_fro() * b.norm_fro();
    Ok(commutator_defect(a, b)? <= tol)
}

pub(crate) fn same_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(left, right))
    }
}

/// Relative Frobenius distance `||X - Y||_F / max(||Y||_F, tiny)`.
pub fn rel_fro_diff(x: &CMatrix, y: &CMatrix) -> f64 {
    (x - y).norm() / y.norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a0() -> SpdMatrix {
        SpdMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap()
    }

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * (1.0 + y.abs())
    }

    #[test]
    fn eigh_identity() {
        let e = eigh(&HermitianMatrix::identity(3).unwrap()).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert!(rel_fro_diff(&e.unitary, &CMatrix::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn eigh_diagonal_sorted_descending() {
        let e = eigh(&HermitianMatrix::diag(&[1.0, 3.0]).unwrap()).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 1.0]);
    }

    #[test]
    fn eigh_two_by_two_matches_characteristic_polynomial() {
        // lambda^2 - tr*lambda + det = 0 with tr = 4, det = 3
        let (tr, det) = (4.0_f64, 3.0_f64);
        let disc = (tr * tr - 4.0 * det).sqrt();
        let expected = [(tr + disc) / 2.0, (tr - disc) / 2.0];
        let e = eigh(a0().hermitian()).unwrap();
        for (got, want) in e.eigenvalues.iter().zip(expected) {
            assert!(close(*got, want, 1e-14), "{got} vs {want}");
        }
        let uuh = &e.unitary * e.unitary.adjoint();
        assert!((uuh - CMatrix::identity(2, 2)).norm() < 1e-12);
        assert!(rel_fro_diff(e.reconstruct().matrix(), a0().matrix()) < 1e-14);
    }

    #[test]
    fn eigh_phase_rule() {
        let h = HermitianMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[
                c64::new(1.0, 0.0),
                c64::new(0.0, 2.0),
                c64::new(0.0, -2.0),
                c64::new(3.0, 0.0),
            ],
        ))
        .unwrap();
        let e = eigh(&h).unwrap();
        for j in 0..2 {
            let col = e.unitary.column(j);
            let pivot = col
                .iter()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap();
            assert!(pivot.im.abs() < 1e-15 && pivot.re > 0.0);
        }
        assert_eq!(eigh(&h).unwrap(), e);
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c64::new(1.0, 0.0), c64::new(1.0, 0.0), c64::new(0.0, 0.0), c64::new(1.0, 0.0)],
        );
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            HermitianMatrix::new(CMatrix::zeros(2, 3)),
            Err(Error::NotSquare(2, 3))
        ));
        assert!(matches!(HermitianMatrix::new(CMatrix::zeros(0, 0)), Err(Error::Empty)));
    }

    #[test]
    fn spd_gate() {
        assert!(matches!(
            SpdMatrix::diag(&[1.0, 1e-11]),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            SpdMatrix::diag(&[1.0, -1.0]),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(SpdMatrix::diag(&[1.0, 1e-9]).is_ok());
    }

    #[test]
    fn sqrt_of_diagonal() {
        let r = mat_sqrt(&SpdMatrix::diag(&[4.0, 9.0]).unwrap()).unwrap();
        assert!(rel_fro_diff(r.matrix(), HermitianMatrix::diag(&[2.0, 3.0]).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let r = mat_log(&HermitianMatrix::identity(4).unwrap()).unwrap();
        assert_eq!(r.norm_fro(), 0.0);
    }

    #[test]
    fn log_rejects_nonpositive_spectrum() {
        let h = HermitianMatrix::diag(&[1.0, -2.0]).unwrap();
        assert!(matches!(mat_log(&h), Err(Error::Domain(l)) if l == -2.0));
    }

    #[test]
    fn half_power_two_by_two() {
        // Spectral oracle: eigenvalues (3, 1), eigenvectors (1,1)/sqrt2 and (1,-1)/sqrt2,
        // so A^{1/2} = ((sqrt3 + 1)/2) I-part + ((sqrt3 - 1)/2) off-diagonal.
        let s3 = 3.0_f64.sqrt();
        let diag = (s3 + 1.0) / 2.0;
        let off = (s3 - 1.0) / 2.0;
        let expected = HermitianMatrix::from_real_rows(&[&[diag, off], &[off, diag]]).unwrap();
        let got = mat_pow(&a0(), 0.5).unwrap();
        assert!(rel_fro_diff(got.matrix(), expected.matrix()) < 1e-15);
        let e = eigh(&got).unwrap();
        assert!(close(e.eigenvalues[0], s3, 1e-15) && close(e.eigenvalues[1], 1.0, 1e-15));
        // frozen from the 60-digit oracle
        assert!(close(got.matrix()[(0, 0)].re, 1.366_025_403_784_438_6, 1e-15));
        assert!(close(got.matrix()[(0, 1)].re, 0.366_025_403_784_438_65, 1e-15));
    }

    #[test]
    fn conjugate_cases() {
        let a = a0();
        let id = CMatrix::identity(2, 2);
        assert!(rel_fro_diff(conjugate(&id, &a).unwrap().matrix(), a.matrix()) < 1e-15);

        let x = HermitianMatrix::diag(&[2.0, 1.0]).unwrap().into_matrix();
        let r = conjugate(&x, &SpdMatrix::identity(2).unwrap()).unwrap();
        assert!(rel_fro_diff(r.matrix(), HermitianMatrix::diag(&[4.0, 1.0]).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn conjugate_matches_triple_product_oracle() {
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[c64::new(1.0, 0.5), c64::new(-0.3, 0.2), c64::new(0.7, -1.1), c64::new(2.0, 0.0)],
        );
        let a = a0();
        let got = conjugate(&x, &a).unwrap();
        let am = a.matrix();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = c64::new(0.0, 0.0);
                for k in 0..2 {
                    for l in 0..2 {
                        s += x[(i, k)] * am[(k, l)] * x[(j, l)].conj();
                    }
                }
                assert!((got.matrix()[(i, j)] - s).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn conjugate_rejects_singular() {
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[c64::new(1.0, 0.0), c64::new(2.0, 0.0), c64::new(2.0, 0.0), c64::new(4.0, 0.0)],
        );
        assert!(matches!(conjugate(&x, &a0()), Err(Error::Singular(_))));
    }

    #[test]
    fn commutator_examples() {
        let d1 = HermitianMatrix::diag(&[1.0, 2.0, 3.0]).unwrap();
        let d2 = HermitianMatrix::diag(&[-1.0, 5.0, 0.5]).unwrap();
        assert_eq!(commutator_defect(&d1, &d2).unwrap(), 0.0);

        let b = HermitianMatrix::diag(&[1.0, 4.0]).unwrap();
        let defect = commutator_defect(a0().hermitian(), &b).unwrap();
        assert!(close(defect, 3.0 * 2.0_f64.sqrt(), 1e-15));
        assert!(!is_commuting(a0().hermitian(), &b, None).unwrap());

        let id = HermitianMatrix::identity(2).unwrap();
        assert_eq!(commutator_defect(a0().hermitian(), &id).unwrap(), 0.0);
        assert!(matches!(
            commutator_defect(&d1, &id),
            Err(Error::DimensionMismatch(3, 2))
        ));
    }
}
