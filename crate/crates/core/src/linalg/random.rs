//! Seeded generators for every random object the checks consume.
//!
//! Streams are ChaCha8 keyed by a 64-bit seed. Per-trial seeds come from
//! [`derive_seed`], a SplitMix64-style mix of a parent seed and a stream index,
//! so trial `i` of a campaign sees the same numbers no matter which thread runs it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::eig::{op_norm, HermitianMatrix};
use super::matrix::{ComplexMatrix, C64};
use super::DensityMatrix;
use crate::error::{Error, Result};

pub type TrialRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `index` of `parent`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    TrialRng::seed_from_u64(seed)
}

/// Standard complex Gaussian: E|z|² = 1.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::dim("random instance needs dim >= 1"))
    } else {
        Ok(())
    }
}

/// (G + G*)/2.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<HermitianMatrix> {
    check_dim(dim)?;
    HermitianMatrix::new(gaussian_matrix(dim, dim, rng).hermitian_part())
}

/// GG*/tr(GG*).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_dim(dim)?;
    let g = gaussian_matrix(dim, dim, rng);
    let gg = g.try_matmul(&g.adjoint())?;
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale(1.0 / tr))
}

/// G / (‖G‖·(1+u)) with u uniform in [0, 1); the operator norm is strictly below one.
pub fn random_contraction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    let g = gaussian_matrix(dim, dim, rng);
    let u: f64 = rng.random();
    let norm = op_norm(&g)?;
    Ok(g.scale(1.0 / (norm * (1.0 + u))))
}

/// Gaussian matrix orthonormalized column by column (two Gram–Schmidt passes), which is
/// the QR factor whose R has a positive real diagonal.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    let g = gaussian_matrix(dim, dim, rng);
    let mut cols: Vec<Vec<C64>> = (0..dim).map(|j| g.col(j)).collect();
    for j in 0..dim {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj: C64 = done[k]
                    .iter()
                    .zip(rest[0].iter())
                    .map(|(u, x)| u.conj() * x)
                    .sum();
                for (x, u) in rest[0].iter_mut().zip(done[k].iter()) {
                    *x -= proj * u;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::Numeric("rank-deficient Gaussian sample".into()));
        }
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i]))
}

pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<C64>> {
    check_dim(dim)?;
    let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(v.into_iter().map(|z| z / norm).collect())
}

/// Gaussian `a` rescaled so that w1·Tr(a*a) = 1.
pub fn random_l2_normalized<R: Rng + ?Sized>(
    dim: usize,
    weight: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    if !(weight > 0.0) {
        return Err(Error::Argument(format!("trace weight must be positive, got {weight}")));
    }
    let g = gaussian_matrix(dim, dim, rng);
    Ok(normalize_l2(&g, weight))
}

/// a / √(w·Tr(a*a)).
pub fn normalize_l2(a: &ComplexMatrix, weight: f64) -> ComplexMatrix {
    let hs: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
    a.scale(1.0 / (weight * hs).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Hermitian,
    Density,
    Contraction,
    Unitary,
    UnitVector,
    L2Normalized,
}

#[derive(Debug, Clone)]
pub enum RandomInstance {
    Hermitian(HermitianMatrix),
    Density(DensityMatrix),
    Matrix(ComplexMatrix),
    Vector(Vec<C64>),
}

/// Deterministic per (kind, dim, seed). `weight` is the trace weight used by
/// `L2Normalized` and ignored otherwise.
pub fn random_instance(kind: InstanceKind, dim: usize, weight: f64, seed: u64) -> Result<RandomInstance> {
    let mut rng = rng_from_seed(seed);
    Ok(match kind {
        InstanceKind::Hermitian => RandomInstance::Hermitian(random_hermitian(dim, &mut rng)?),
        InstanceKind::Density => RandomInstance::Density(random_density(dim, &mut rng)?),
        InstanceKind::Contraction => RandomInstance::Matrix(random_contraction(dim, &mut rng)?),
        InstanceKind::Unitary => RandomInstance::Matrix(random_unitary(dim, &mut rng)?),
        InstanceKind::UnitVector => RandomInstance::Vector(random_unit_vector(dim, &mut rng)?),
        InstanceKind::L2Normalized => {
            RandomInstance::Matrix(random_l2_normalized(dim, weight, &mut rng)?)
        }
    })
}

/// Hermitian matrix with a prescribed spectrum in a Haar-random basis.
pub fn random_with_spectrum<R: Rng + ?Sized>(
    spectrum: &[f64],
    rng: &mut R,
) -> Result<HermitianMatrix> {
    let u = random_unitary(spectrum.len(), rng)?;
    let d = ComplexMatrix::diag_real(spectrum);
    HermitianMatrix::new(u.try_matmul(&d)?.try_matmul(&u.adjoint())?)
}

/// Resolution of the identity from a random basis split into `parts` nonempty groups.
pub fn random_resolution<R: Rng + ?Sized>(
    dim: usize,
    parts: usize,
    rng: &mut R,
) -> Result<Vec<ComplexMatrix>> {
    check_dim(dim)?;
    let parts = parts.clamp(1, dim);
    let u = random_unitary(dim, rng)?;
    // Each group gets one column, the rest are dealt out at random.
    let mut owner: Vec<usize> = (0..dim).map(|i| if i < parts { i } else { rng.random_range(0..parts) }).collect();
    owner.rotate_left(rng.random_range(0..dim));
    let mut projections = vec![ComplexMatrix::zeros(dim, dim); parts];
    for (col, &g) in owner.iter().enumerate() {
        let v = u.col(col);
        let p = &mut projections[g];
        for i in 0..dim {
            for j in 0..dim {
                p[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    Ok(projections)
}
