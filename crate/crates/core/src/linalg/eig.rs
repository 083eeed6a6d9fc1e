use std::ops::Deref;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::convex_catalog::ScalarFunction;
use crate::error::{Error, Result};

/// Relative size of the anti-Hermitian part that hermitization absorbs.
pub const HERMITIZE_REJECT: f64 = 1e-8;
const JACOBI_REL_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// A square matrix equal to its adjoint (after hermitization).
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Replaces `m` by (m + m*)/2; rejects non-square input and anti-Hermitian parts
    /// larger than 1e-8·‖m‖_F.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dim(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let correction = 0.5 * m.hermiticity_defect();
        let norm = m.frobenius_norm();
        if correction > HERMITIZE_REJECT * norm {
            return Err(Error::Argument(format!(
                "matrix is not Hermitian: anti-Hermitian part {correction:.3e} vs norm {norm:.3e}"
            )));
        }
        Ok(Self(m.hermitian_part()))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_rows(rows))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(ComplexMatrix::diag_real(values))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn eig(&self) -> Result<SpectralDecomposition> {
        hermitian_eig(self)
    }

    /// Real trace.
    pub fn trace_re(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.try_add(&other.0)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.try_sub(&other.0)?))
    }

    /// Applies `g` to the spectrum.
    pub fn map_spectrum(&self, g: impl Fn(f64) -> f64) -> Result<Self> {
        Ok(self.eig()?.apply(g))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.min())
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.max())
    }

    /// Compresses by `b`: b* self b, kept Hermitian.
    pub fn congruence(&self, b: &ComplexMatrix) -> Result<Self> {
        let inner = self.0.try_matmul(b)?;
        Self::new(b.adjoint().try_matmul(&inner)?)
    }
}

impl Deref for HermitianMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl std::fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        HermitianMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix (columns).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// max |λ|, the operator norm of the decomposed matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// U g(Λ) U*.
    pub fn apply(&self, g: impl Fn(f64) -> f64) -> HermitianMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        self.assemble(&values)
    }

    /// U diag(values) U*, with the output Hermitian by construction.
    pub(crate) fn assemble(&self, values: &[f64]) -> HermitianMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for (k, &v) in values.iter().enumerate() {
                    if v != 0.0 {
                        acc += u[(i, k)] * u[(j, k)].conj() * v;
                    }
                }
                if i == j {
                    out[(i, i)] = C64::new(acc.re, 0.0);
                } else {
                    out[(i, j)] = acc;
                    out[(j, i)] = acc.conj();
                }
            }
        }
        HermitianMatrix(out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.assemble(&self.eigenvalues)
    }

    /// Projection onto the span of the eigenvectors selected by `keep`.
    pub(crate) fn projection_where(&self, keep: impl Fn(usize) -> bool) -> ComplexMatrix {
        let indicator: Vec<f64> = (0..self.dim())
            .map(|k| if keep(k) { 1.0 } else { 0.0 })
            .collect();
        self.assemble(&indicator).into_matrix()
    }
}

/// Cyclic complex Jacobi eigensolver with row-major (p, q) sweep order.
pub fn hermitian_eig(m: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::dim("empty matrix"));
    }
    let mut a: Vec<C64> = m.as_slice().to_vec();
    let mut v = ComplexMatrix::identity(n);
    let norm = m.frobenius_norm();
    let threshold = JACOBI_REL_TOL * norm;

    let off = |a: &[C64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[i * n + j].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = false;
    for _sweep in 0..=JACOBI_MAX_SWEEPS {
        if off(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps (dim {n})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let eigenvalues = order.iter().map(|&i| a[i * n + i].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(a: &mut [C64], v: &mut ComplexMatrix, n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let g = apq.norm();
    if g <= f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / g;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J = D·R where D removes the phase of a_pq and R is the real rotation.
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * jpp + akq * jqp;
        a[k * n + q] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
        a[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = C64::new(a[q * n + q].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// f(M) = U f(Λ) U*. Eigenvalues within 1e-12·max(1,|λ|) of a closed domain endpoint
/// are clamped onto it; anything else outside the domain is an error.
pub fn matrix_function(m: &HermitianMatrix, f: &ScalarFunction) -> Result<HermitianMatrix> {
    let spec = m.eig()?;
    spectral_apply(&spec, f)
}

pub(crate) fn spectral_apply(
    spec: &SpectralDecomposition,
    f: &ScalarFunction,
) -> Result<HermitianMatrix> {
    let values = spec
        .eigenvalues
        .iter()
        .map(|&l| f.eval_on_spectrum(l))
        .collect::<Result<Vec<f64>>>()?;
    Ok(spec.assemble(&values))
}

/// Operator norm via the largest eigenvalue of A*A.
pub fn op_norm(a: &ComplexMatrix) -> Result<f64> {
    let gram = HermitianMatrix::new(a.adjoint().try_matmul(a)?)?;
    Ok(gram.max_eigenvalue()?.max(0.0).sqrt())
}

/// Square root of a positive semidefinite matrix; tiny negative eigenvalues are zeroed.
pub fn psd_sqrt(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    m.map_spectrum(|l| l.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_x_has_eigenvalues_minus_one_and_one() {
        let x = HermitianMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let spec = x.eig().unwrap();
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_input_yields_permutation() {
        let spec = HermitianMatrix::diag(&[3.0, -2.0]).eig().unwrap();
        assert_eq!(spec.eigenvalues, vec![-2.0, 3.0]);
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(spec.eigenvectors.approx_eq(&expected, 0.0));
    }

    #[test]
    fn non_square_and_non_hermitian_inputs_are_rejected() {
        assert!(matches!(
            HermitianMatrix::new(ComplexMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
        let skew = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(matches!(HermitianMatrix::new(skew), Err(Error::Argument(_))));
    }

    #[test]
    fn small_drift_is_absorbed() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0 + 1e-12], &[2.0, 1.0]]);
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn complex_offdiagonal_converges() {
        let m = ComplexMatrix::from_rows(&[
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0)],
            &[C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        ]);
        let spec = HermitianMatrix::new(m.clone()).unwrap().eig().unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!(spec.reconstruct().approx_eq(&m, 1e-14));
    }

    #[test]
    fn zero_matrix_is_already_diagonal() {
        let spec = HermitianMatrix::zeros(3).eig().unwrap();
        assert_eq!(spec.eigenvalues, vec![0.0; 3]);
    }
}
