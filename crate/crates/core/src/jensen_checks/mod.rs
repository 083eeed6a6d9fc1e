//! One verification per inequality, each producing a [`CheckReport`], plus searches
//! that drop a single hypothesis to probe its necessity.
//!
//! Every report carries the full input on failure, so a violation can be replayed
//! bit-exactly with [`replay`].

mod ablation;
mod checks;
mod trials;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::convex_catalog::ScalarFunction;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, HermitianMatrix, ToleranceConfig, C64};
use crate::positive_maps::PositiveMap;
use crate::spectral_tools::Piece;
use crate::tensor_ops::{BlockAlgebra, TensorSpace};

pub use ablation::{ablation_search, AblationResult, AblationTarget};
pub use checks::{
    check_cfl, check_hansen_pedersen, check_main_tracial, check_partial_trace_duality,
    check_petz, check_pinching_chain, check_spectral_preorder_lemma, check_state_version,
    check_vector_jensen,
};
pub use trials::{generate_trial, output_algebra, TrialSpec};

/// Whether a check refuses inputs outside its theorem's hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisMode {
    #[default]
    Enforce,
    /// Evaluate both sides regardless; used by the ablation searches.
    Unchecked,
}

/// Branch of the partial-trace inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// w1·Tr(a*a) = 1.
    Normalized,
    /// w1·Tr(a*a) ≤ 1 and f(0) = 0.
    Subnormalized,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Normalized => "normalized",
            Branch::Subnormalized => "subnormalized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CheckName {
    #[serde(rename = "check_cfl")]
    Cfl,
    #[serde(rename = "check_main_tracial")]
    MainTracial,
    #[serde(rename = "check_petz")]
    Petz,
    #[serde(rename = "check_vector_jensen")]
    VectorJensen,
    #[serde(rename = "check_spectral_preorder_lemma")]
    SpectralPreorderLemma,
    #[serde(rename = "check_pinching_chain")]
    PinchingChain,
    #[serde(rename = "check_partial_trace_duality")]
    PartialTraceDuality,
    #[serde(rename = "check_state_version")]
    StateVersion,
    #[serde(rename = "check_hansen_pedersen")]
    HansenPedersen,
}

impl CheckName {
    pub const ALL: [CheckName; 9] = [
        CheckName::Cfl,
        CheckName::MainTracial,
        CheckName::Petz,
        CheckName::VectorJensen,
        CheckName::SpectralPreorderLemma,
        CheckName::PinchingChain,
        CheckName::PartialTraceDuality,
        CheckName::StateVersion,
        CheckName::HansenPedersen,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Cfl => "check_cfl",
            CheckName::MainTracial => "check_main_tracial",
            CheckName::Petz => "check_petz",
            CheckName::VectorJensen => "check_vector_jensen",
            CheckName::SpectralPreorderLemma => "check_spectral_preorder_lemma",
            CheckName::PinchingChain => "check_pinching_chain",
            CheckName::PartialTraceDuality => "check_partial_trace_duality",
            CheckName::StateVersion => "check_state_version",
            CheckName::HansenPedersen => "check_hansen_pedersen",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| {
            Error::Argument(format!(
                "unknown check `{s}`; valid checks: {}",
                Self::ALL.map(|c| c.as_str()).join(", ")
            ))
        })
    }

    /// Checks whose inputs include a positive map.
    pub fn uses_map(&self) -> bool {
        matches!(
            self,
            CheckName::Petz
                | CheckName::VectorJensen
                | CheckName::SpectralPreorderLemma
                | CheckName::PinchingChain
        )
    }

    /// Checks that take a scalar function.
    pub fn uses_function(&self) -> bool {
        !matches!(self, CheckName::PartialTraceDuality)
    }

    /// Checks parameterized by trace weights.
    pub fn uses_weights(&self) -> bool {
        matches!(
            self,
            CheckName::MainTracial
                | CheckName::Petz
                | CheckName::SpectralPreorderLemma
                | CheckName::PinchingChain
                | CheckName::PartialTraceDuality
        )
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Complete input of one check, sufficient to recompute its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckInput {
    Cfl {
        h: HermitianMatrix,
        rho: DensityMatrix,
        function: ScalarFunction,
        space: TensorSpace,
    },
    MainTracial {
        h: HermitianMatrix,
        a: ComplexMatrix,
        function: ScalarFunction,
        space: TensorSpace,
        weights: (f64, f64),
        branch: Branch,
    },
    Petz {
        map: PositiveMap,
        x: HermitianMatrix,
        function: ScalarFunction,
        algebra: BlockAlgebra,
    },
    VectorJensen {
        map: PositiveMap,
        x: HermitianMatrix,
        function: ScalarFunction,
        xi: Vec<C64>,
    },
    SpectralPreorderLemma {
        map: PositiveMap,
        x: HermitianMatrix,
        function: ScalarFunction,
        piece: Piece,
        algebra: BlockAlgebra,
    },
    PinchingChain {
        map: PositiveMap,
        x: HermitianMatrix,
        function: ScalarFunction,
        algebra: BlockAlgebra,
    },
    PartialTraceDuality {
        x: ComplexMatrix,
        a: ComplexMatrix,
        space: TensorSpace,
        weights: (f64, f64),
    },
    StateVersion {
        h: HermitianMatrix,
        a: ComplexMatrix,
        function: ScalarFunction,
        rho1: DensityMatrix,
        rho2: DensityMatrix,
        space: TensorSpace,
    },
    HansenPedersen {
        h: HermitianMatrix,
        a: ComplexMatrix,
        function: ScalarFunction,
        space: TensorSpace,
    },
}

impl CheckInput {
    pub fn name(&self) -> CheckName {
        match self {
            CheckInput::Cfl { .. } => CheckName::Cfl,
            CheckInput::MainTracial { .. } => CheckName::MainTracial,
            CheckInput::Petz { .. } => CheckName::Petz,
            CheckInput::VectorJensen { .. } => CheckName::VectorJensen,
            CheckInput::SpectralPreorderLemma { .. } => CheckName::SpectralPreorderLemma,
            CheckInput::PinchingChain { .. } => CheckName::PinchingChain,
            CheckInput::PartialTraceDuality { .. } => CheckName::PartialTraceDuality,
            CheckInput::StateVersion { .. } => CheckName::StateVersion,
            CheckInput::HansenPedersen { .. } => CheckName::HansenPedersen,
        }
    }

    /// Evaluates the check. Failing reports get a witness holding this input.
    pub fn run(&self, seed: u64, tol: &ToleranceConfig, mode: HypothesisMode) -> Result<CheckReport> {
        tol.validate()?;
        let mut report = checks::evaluate(self, tol, mode)?;
        report.seed = seed;
        if !report.pass {
            report.witness = Some(Box::new(Witness {
                input: self.clone(),
                mode,
                tolerances: *tol,
            }));
        }
        Ok(report)
    }
}

/// Everything needed to recompute a failing report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub input: CheckInput,
    pub mode: HypothesisMode,
    pub tolerances: ToleranceConfig,
}

/// Outcome of one trial. `pass` holds exactly when `gap ≥ −tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub seed: u64,
    pub params: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Box<Witness>>,
}

impl CheckReport {
    /// One-sided report for lhs ≤ rhs.
    pub(crate) fn inequality(
        name: CheckName,
        params: BTreeMap<String, Value>,
        lhs: f64,
        rhs: f64,
        tol: f64,
    ) -> Result<Self> {
        Self::with_gap(name, params, lhs, rhs, rhs - lhs, tol)
    }

    pub(crate) fn with_gap(
        name: CheckName,
        params: BTreeMap<String, Value>,
        lhs: f64,
        rhs: f64,
        gap: f64,
        tol: f64,
    ) -> Result<Self> {
        if !lhs.is_finite() || !rhs.is_finite() || !gap.is_finite() {
            return Err(Error::Numeric(format!(
                "{name}: non-finite sides lhs={lhs}, rhs={rhs}"
            )));
        }
        Ok(Self {
            check_name: name.as_str().to_string(),
            seed: 0,
            params,
            lhs,
            rhs,
            gap,
            tol,
            pass: gap >= -tol,
            witness: None,
        })
    }
}

/// Recomputes a report from its witness.
pub fn replay(report: &CheckReport) -> Result<CheckReport> {
    let w = report
        .witness
        .as_ref()
        .ok_or_else(|| Error::Argument("report carries no witness".into()))?;
    replay_witness(w, report.seed)
}

pub fn replay_witness(w: &Witness, seed: u64) -> Result<CheckReport> {
    w.input.run(seed, &w.tolerances, w.mode)
}
