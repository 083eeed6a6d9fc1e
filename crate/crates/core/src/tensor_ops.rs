//! Two-factor tensor products M_{d1} ⊗ M_{d2}, weighted partial traces and slice maps.
//!
//! The first factor is always the slow index: basis vector (i1, i2) sits at
//! position `i1 * d2 + i2`. Every formula below depends on this convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, HermitianMatrix, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSpace {
    pub d1: usize,
    pub d2: usize,
}

impl TensorSpace {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::dim(format!("tensor factors must be nonzero, got ({d1}, {d2})")));
        }
        Ok(Self { d1, d2 })
    }

    pub fn dim(&self) -> usize {
        self.d1 * self.d2
    }

    #[inline]
    fn idx(&self, i1: usize, i2: usize) -> usize {
        i1 * self.d2 + i2
    }

    fn check_full(&self, x: &ComplexMatrix, what: &str) -> Result<()> {
        let n = self.dim();
        if x.shape() != (n, n) {
            return Err(Error::dim(format!(
                "{what} must be {n}x{n} on {}⊗{}, got {}x{}",
                self.d1,
                self.d2,
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }
}

/// Which tensor factor an operator or functional acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceSide {
    TraceFirst,
    TraceSecond,
}

/// Direct sum ⊕_k M_{n_k} with trace τ(x) = Σ_k w_k·Tr(x_k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockAlgebra {
    block_dims: Vec<usize>,
    trace_weights: Vec<f64>,
}

impl BlockAlgebra {
    /// Off-block entries larger than this (relative to the largest entry) are a mismatch.
    const BLOCK_TOL: f64 = 1e-10;

    pub fn new(block_dims: Vec<usize>, trace_weights: Vec<f64>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.len() != trace_weights.len() {
            return Err(Error::Argument(format!(
                "{} block dims vs {} trace weights",
                block_dims.len(),
                trace_weights.len()
            )));
        }
        if block_dims.contains(&0) {
            return Err(Error::dim("block dimensions must be positive"));
        }
        if let Some(w) = trace_weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Argument(format!("trace weights must be positive, got {w}")));
        }
        Ok(Self {
            block_dims,
            trace_weights,
        })
    }

    /// A single matrix factor M_d with trace w·Tr.
    pub fn single(dim: usize, weight: f64) -> Result<Self> {
        Self::new(vec![dim], vec![weight])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn trace_weights(&self) -> &[f64] {
        &self.trace_weights
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.block_dims
            .iter()
            .scan(0, |acc, &d| {
                let start = *acc;
                *acc += d;
                Some(start)
            })
            .collect()
    }

    /// Trace weight of the block containing basis index `i`.
    pub fn weight_at(&self, i: usize) -> f64 {
        let mut end = 0;
        for (d, w) in self.block_dims.iter().zip(&self.trace_weights) {
            end += d;
            if i < end {
                return *w;
            }
        }
        panic!("index {i} outside algebra of dim {}", self.dim())
    }

    fn check_dim(&self, x: &ComplexMatrix) -> Result<()> {
        let n = self.dim();
        if x.shape() != (n, n) {
            return Err(Error::dim(format!(
                "algebra of dim {n} received a {}x{} matrix",
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// Diagonal blocks of `x`; errors if `x` has mass outside them.
    pub fn blocks(&self, x: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
        self.check_dim(x)?;
        let offsets = self.offsets();
        let tol = Self::BLOCK_TOL * x.max_abs().max(1.0);
        let block_of = |i: usize| offsets.iter().rposition(|&o| o <= i).unwrap_or(0);
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                if block_of(i) != block_of(j) && x[(i, j)].norm() > tol {
                    return Err(Error::BlockMismatch(format!(
                        "entry ({i}, {j}) = {:.3e} couples blocks {} and {}",
                        x[(i, j)].norm(),
                        block_of(i),
                        block_of(j)
                    )));
                }
            }
        }
        Ok(offsets
            .iter()
            .zip(&self.block_dims)
            .map(|(&o, &d)| x.submatrix(o, o, d, d))
            .collect())
    }

    pub fn hermitian_blocks(&self, x: &HermitianMatrix) -> Result<Vec<HermitianMatrix>> {
        self.blocks(x)?.into_iter().map(HermitianMatrix::new).collect()
    }

    /// Block-diagonal matrix from its blocks.
    pub fn assemble(&self, blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        if blocks.len() != self.num_blocks() {
            return Err(Error::dim(format!(
                "{} blocks for an algebra with {}",
                blocks.len(),
                self.num_blocks()
            )));
        }
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for ((b, &o), &d) in blocks.iter().zip(&self.offsets()).zip(&self.block_dims) {
            if b.shape() != (d, d) {
                return Err(Error::dim(format!("block of shape {:?}, expected {d}x{d}", b.shape())));
            }
            out.set_submatrix(o, o, b);
        }
        Ok(out)
    }

    /// Central projections onto each block.
    pub fn block_projections(&self) -> Vec<ComplexMatrix> {
        let n = self.dim();
        self.offsets()
            .iter()
            .zip(&self.block_dims)
            .map(|(&o, &d)| {
                let mut p = ComplexMatrix::zeros(n, n);
                for i in o..o + d {
                    p[(i, i)] = C64::new(1.0, 0.0);
                }
                p
            })
            .collect()
    }

    /// τ(x) = Σ_k w_k·Tr(x_k) for block-diagonal x.
    pub fn trace(&self, x: &ComplexMatrix) -> Result<C64> {
        let blocks = self.blocks(x)?;
        Ok(blocks
            .iter()
            .zip(&self.trace_weights)
            .map(|(b, &w)| b.trace() * w)
            .sum())
    }

    pub fn trace_re(&self, x: &HermitianMatrix) -> Result<f64> {
        Ok(self.trace(x)?.re)
    }
}

/// ω(y) = τ(density*·y) on a block algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFunctional {
    algebra: BlockAlgebra,
    density: ComplexMatrix,
}

impl LinearFunctional {
    pub fn new(algebra: BlockAlgebra, density: ComplexMatrix) -> Result<Self> {
        algebra.blocks(&density)?;
        Ok(Self { algebra, density })
    }

    /// Tr(·)/d on a single factor with trace weight 1.
    pub fn normalized_trace(dim: usize) -> Result<Self> {
        Self::new(
            BlockAlgebra::single(dim, 1.0)?,
            ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        )
    }

    /// The state y ↦ Tr(D y).
    pub fn state(rho: &DensityMatrix) -> Result<Self> {
        Self::new(BlockAlgebra::single(rho.dim(), 1.0)?, rho.as_matrix().clone())
    }

    /// ω_{τ₁,a}(y) = τ₁(a* y a) = w1·Tr(a a* y).
    pub fn compressed_trace(a: &ComplexMatrix, w1: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dim("compressing element must be square"));
        }
        let aa = a.try_matmul(&a.adjoint())?;
        Self::new(BlockAlgebra::single(a.rows(), w1)?, aa)
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn eval(&self, y: &ComplexMatrix) -> Result<C64> {
        let prod = self.density.adjoint().try_matmul(y)?;
        let mut acc = ZERO;
        for i in 0..prod.rows() {
            acc += prod[(i, i)] * self.algebra.weight_at(i);
        }
        Ok(acc)
    }

    /// ω(e_{kl}) for the matrix unit e_{kl}.
    #[inline]
    fn on_unit(&self, k: usize, l: usize) -> C64 {
        self.density[(k, l)].conj() * self.algebra.weight_at(k)
    }

    pub fn is_positive(&self) -> Result<bool> {
        let h = HermitianMatrix::new(self.density.clone());
        match h {
            Ok(h) => Ok(h.min_eigenvalue()? >= -1e-12 * h.frobenius_norm().max(1.0)),
            Err(Error::Argument(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

/// left → a⊗1, right → 1⊗a.
pub fn embed(a: &ComplexMatrix, side: Side, space: TensorSpace) -> Result<ComplexMatrix> {
    let expected = match side {
        Side::Left => space.d1,
        Side::Right => space.d2,
    };
    if a.shape() != (expected, expected) {
        return Err(Error::dim(format!(
            "{side:?} factor expects {expected}x{expected}, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(match side {
        Side::Left => a.kron(&ComplexMatrix::identity(space.d2)),
        Side::Right => ComplexMatrix::identity(space.d1).kron(a),
    })
}

/// (a*⊗1) X (a⊗1).
pub fn conjugate_compress(
    x: &ComplexMatrix,
    a: &ComplexMatrix,
    space: TensorSpace,
) -> Result<ComplexMatrix> {
    space.check_full(x, "X")?;
    let a1 = embed(a, Side::Left, space)?;
    a1.adjoint().try_matmul(&x.try_matmul(&a1)?)
}

/// Hermitian-preserving form of [`conjugate_compress`].
pub fn conjugate_compress_hermitian(
    x: &HermitianMatrix,
    a: &ComplexMatrix,
    space: TensorSpace,
) -> Result<HermitianMatrix> {
    HermitianMatrix::new(conjugate_compress(x, a, space)?)
}

/// (τ₁⊗id)(X) or (id⊗τ₂)(X) with the single-factor trace weights `(w1, w2)`.
pub fn partial_trace(
    x: &ComplexMatrix,
    side: TraceSide,
    space: TensorSpace,
    weights: (f64, f64),
) -> Result<ComplexMatrix> {
    space.check_full(x, "X")?;
    let (d1, d2) = (space.d1, space.d2);
    Ok(match side {
        TraceSide::TraceFirst => ComplexMatrix::from_fn(d2, d2, |j, k| {
            let s: C64 = (0..d1).map(|i| x[(space.idx(i, j), space.idx(i, k))]).sum();
            s * weights.0
        }),
        TraceSide::TraceSecond => ComplexMatrix::from_fn(d1, d1, |j, k| {
            let s: C64 = (0..d2).map(|i| x[(space.idx(j, i), space.idx(k, i))]).sum();
            s * weights.1
        }),
    })
}

pub fn partial_trace_hermitian(
    x: &HermitianMatrix,
    side: TraceSide,
    space: TensorSpace,
    weights: (f64, f64),
) -> Result<HermitianMatrix> {
    HermitianMatrix::new(partial_trace(x, side, space, weights)?)
}

/// Slice maps: `Right` gives R_ω(a⊗b) = a·ω(b) with ω on the second factor,
/// `Left` gives L_ω(a⊗b) = ω(a)·b with ω on the first.
pub fn slice(
    x: &ComplexMatrix,
    functional: &LinearFunctional,
    side: Side,
    space: TensorSpace,
) -> Result<ComplexMatrix> {
    space.check_full(x, "X")?;
    let sliced = match side {
        Side::Left => space.d1,
        Side::Right => space.d2,
    };
    if functional.dim() != sliced {
        return Err(Error::dim(format!(
            "functional of dim {} cannot slice a factor of dim {sliced}",
            functional.dim()
        )));
    }
    let (d1, d2) = (space.d1, space.d2);
    Ok(match side {
        Side::Right => ComplexMatrix::from_fn(d1, d1, |i, j| {
            let mut acc = ZERO;
            for k in 0..d2 {
                for l in 0..d2 {
                    let w = functional.on_unit(k, l);
                    if w != ZERO {
                        acc += x[(space.idx(i, k), space.idx(j, l))] * w;
                    }
                }
            }
            acc
        }),
        Side::Left => ComplexMatrix::from_fn(d2, d2, |k, l| {
            let mut acc = ZERO;
            for i in 0..d1 {
                for j in 0..d1 {
                    let w = functional.on_unit(i, j);
                    if w != ZERO {
                        acc += x[(space.idx(i, k), space.idx(j, l))] * w;
                    }
                }
            }
            acc
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{gaussian_matrix, random_hermitian, rng_from_seed};

    fn sp(d1: usize, d2: usize) -> TensorSpace {
        TensorSpace::new(d1, d2).unwrap()
    }

    #[test]
    fn embed_left_and_unit() {
        let a = ComplexMatrix::diag_real(&[1.0, 2.0]);
        assert_eq!(
            embed(&a, Side::Left, sp(2, 2)).unwrap(),
            ComplexMatrix::diag_real(&[1.0, 1.0, 2.0, 2.0])
        );
        let one = embed(&ComplexMatrix::identity(3), Side::Left, sp(3, 2)).unwrap();
        assert_eq!(one, ComplexMatrix::identity(6));
    }

    #[test]
    fn embed_rejects_wrong_factor_dim() {
        let a = ComplexMatrix::identity(3);
        assert!(matches!(embed(&a, Side::Left, sp(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn left_times_right_embedding_is_kron() {
        let mut rng = rng_from_seed(1);
        let a = gaussian_matrix(2, 2, &mut rng);
        let b = gaussian_matrix(2, 2, &mut rng);
        let s = sp(2, 2);
        let prod = &embed(&a, Side::Left, s).unwrap() * &embed(&b, Side::Right, s).unwrap();
        assert!(prod.approx_eq(&a.kron(&b), 1e-14));
    }

    #[test]
    fn compress_by_identity_and_zero() {
        let x = gaussian_matrix(6, 6, &mut rng_from_seed(2));
        let s = sp(2, 3);
        assert!(conjugate_compress(&x, &ComplexMatrix::identity(2), s).unwrap().approx_eq(&x, 0.0));
        let z = conjugate_compress(&x, &ComplexMatrix::zeros(2, 2), s).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn compress_elementary_tensor() {
        let mut rng = rng_from_seed(3);
        let (a, big_a, big_b) = (
            gaussian_matrix(2, 2, &mut rng),
            gaussian_matrix(2, 2, &mut rng),
            gaussian_matrix(2, 2, &mut rng),
        );
        let got = conjugate_compress(&big_a.kron(&big_b), &a, sp(2, 2)).unwrap();
        let expected = (&(&a.adjoint() * &big_a) * &a).kron(&big_b);
        assert!(got.approx_eq(&expected, 1e-13));
    }

    #[test]
    fn partial_trace_of_elementary_tensor_and_identity() {
        let mut rng = rng_from_seed(4);
        let a = gaussian_matrix(2, 2, &mut rng);
        let b = gaussian_matrix(3, 3, &mut rng);
        let s = sp(2, 3);
        let got = partial_trace(&a.kron(&b), TraceSide::TraceSecond, s, (1.0, 1.0)).unwrap();
        assert!(got.approx_eq(&a.scale_c(b.trace()), 1e-13));
        let id = partial_trace(&ComplexMatrix::identity(6), TraceSide::TraceFirst, s, (1.0, 1.0)).unwrap();
        assert_eq!(id, ComplexMatrix::identity(3).scale(2.0));
    }

    #[test]
    fn partial_trace_then_trace_is_full_weighted_trace() {
        let x = random_hermitian(4, &mut rng_from_seed(11)).unwrap();
        let s = sp(2, 2);
        let (w1, w2) = (0.3, 2.5);
        let reduced = partial_trace(&x, TraceSide::TraceFirst, s, (w1, w2)).unwrap();
        let lhs = reduced.trace() * w2;
        // Full-trace oracle: (τ₁⊗τ₂)(X) = w1·w2·Tr(X).
        let rhs = x.trace() * (w1 * w2);
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn normalized_trace_slice_of_elementary_tensor() {
        let mut rng = rng_from_seed(6);
        let a = gaussian_matrix(2, 2, &mut rng);
        let b = gaussian_matrix(3, 3, &mut rng);
        let omega = LinearFunctional::normalized_trace(3).unwrap();
        let got = slice(&a.kron(&b), &omega, Side::Right, sp(2, 3)).unwrap();
        assert!(got.approx_eq(&a.scale_c(b.trace() / 3.0), 1e-13));
    }

    #[test]
    fn right_slice_is_a_bimodule_map() {
        let mut rng = rng_from_seed(5);
        let s = sp(2, 3);
        let x = gaussian_matrix(6, 6, &mut rng);
        let a = gaussian_matrix(2, 2, &mut rng);
        let b = gaussian_matrix(2, 2, &mut rng);
        let rho = crate::linalg::random::random_density(3, &mut rng).unwrap();
        let omega = LinearFunctional::state(&rho).unwrap();
        let inner = &(&embed(&a, Side::Left, s).unwrap() * &x) * &embed(&b, Side::Left, s).unwrap();
        let lhs = slice(&inner, &omega, Side::Right, s).unwrap();
        let rhs = &(&a * &slice(&x, &omega, Side::Right, s).unwrap()) * &b;
        assert!(lhs.approx_eq(&rhs, 1e-10 * rhs.max_abs().max(1.0)));
    }

    #[test]
    fn left_slice_by_compressed_trace_is_compress_then_partial_trace() {
        let mut rng = rng_from_seed(9);
        let s = sp(3, 2);
        let x = gaussian_matrix(6, 6, &mut rng);
        let a = gaussian_matrix(3, 3, &mut rng);
        let w1 = 0.7;
        let omega = LinearFunctional::compressed_trace(&a, w1).unwrap();
        let lhs = slice(&x, &omega, Side::Left, s).unwrap();
        let rhs = partial_trace(&conjugate_compress(&x, &a, s).unwrap(), TraceSide::TraceFirst, s, (w1, 1.0))
            .unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn functional_evaluation_and_positivity() {
        let rho = DensityMatrix::maximally_mixed(2);
        let omega = LinearFunctional::state(&rho).unwrap();
        assert!((omega.eval(&ComplexMatrix::identity(2)).unwrap().re - 1.0).abs() < 1e-15);
        assert!(omega.is_positive().unwrap());
        let neg = LinearFunctional::new(
            BlockAlgebra::single(2, 1.0).unwrap(),
            ComplexMatrix::diag_real(&[1.0, -1.0]),
        )
        .unwrap();
        assert!(!neg.is_positive().unwrap());
    }

    #[test]
    fn block_algebra_trace_and_mismatch() {
        let alg = BlockAlgebra::new(vec![1, 2], vec![2.0, 0.5]).unwrap();
        let x = ComplexMatrix::diag_real(&[3.0, 1.0, 1.0]);
        assert!((alg.trace(&x).unwrap().re - 7.0).abs() < 1e-15);
        let mut bad = x.clone();
        bad[(0, 2)] = C64::new(1.0, 0.0);
        assert!(matches!(alg.trace(&bad), Err(Error::BlockMismatch(_))));
        assert!(BlockAlgebra::new(vec![2], vec![0.0]).is_err());
        assert!(BlockAlgebra::new(vec![2, 1], vec![1.0]).is_err());
    }
}
