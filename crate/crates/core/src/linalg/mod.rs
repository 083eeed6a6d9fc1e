//! Dense complex linear algebra: matrices, the Hermitian eigensolver, spectral
//! functional calculus and seeded random generators.

mod eig;
mod matrix;
pub mod random;

use std::ops::Deref;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use eig::{
    hermitian_eig, matrix_function, op_norm, psd_sqrt, HermitianMatrix, SpectralDecomposition,
    HERMITIZE_REJECT,
};
pub(crate) use eig::spectral_apply;
pub use matrix::{ComplexMatrix, C64};
pub(crate) use matrix::ZERO;

use crate::error::{Error, Result};

/// Kronecker product A⊗B, first factor on the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Absolute and relative tolerances shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    pub atol: f64,
    pub rtol: f64,
    pub eig_cluster_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            atol: 1e-9,
            rtol: 1e-9,
            eig_cluster_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("atol", self.atol),
            ("rtol", self.rtol),
            ("eig_cluster_tol", self.eig_cluster_tol),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Argument(format!("{name} must be a nonnegative number, got {v}")));
            }
        }
        Ok(())
    }

    /// atol + rtol·max(1, |values|...).
    pub fn scaled(&self, values: &[f64]) -> f64 {
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        self.atol + self.rtol * scale
    }
}

/// Positive semidefinite matrix with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub const PSD_TOL: f64 = 1e-12;

    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let h = HermitianMatrix::new(m)?;
        let tr = h.trace_re();
        if (tr - 1.0).abs() > Self::PSD_TOL {
            return Err(Error::Argument(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = h.min_eigenvalue()?;
        if min < -Self::PSD_TOL {
            return Err(Error::Argument(format!(
                "density matrix has negative eigenvalue {min}"
            )));
        }
        Ok(Self(h))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    /// Faithful states have strictly positive spectrum.
    pub fn is_faithful(&self) -> Result<bool> {
        Ok(self.0.min_eigenvalue()? > 0.0)
    }
}

impl Deref for DensityMatrix {
    type Target = HermitianMatrix;

    fn deref(&self) -> &HermitianMatrix {
        &self.0
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
