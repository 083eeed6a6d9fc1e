//! Searches that run a check with one hypothesis removed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CheckInput, CheckReport, HypothesisMode};
use crate::convex_catalog::get_function;
use crate::error::{Error, Result};
use crate::linalg::random::{
    derive_seed, random_contraction, random_density, random_hermitian, rng_from_seed,
};
use crate::linalg::ToleranceConfig;
use crate::positive_maps::{
    random_hermiticity_preserving_map, random_positive_map_with, MapKind, PositiveMap,
};
use crate::tensor_ops::{BlockAlgebra, TensorSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AblationTarget {
    /// Contractive maps with f(0) ≠ 0; the zero map guarantees a violation.
    PetzDropF0,
    /// State version with a convex but not operator convex function.
    StateDropOpconvex,
    /// Unital Hermiticity-preserving maps that need not be positive.
    DropPositivity,
    /// Positive maps scaled past contractivity.
    DropContractive,
}

impl AblationTarget {
    pub const ALL: [AblationTarget; 4] = [
        AblationTarget::PetzDropF0,
        AblationTarget::StateDropOpconvex,
        AblationTarget::DropPositivity,
        AblationTarget::DropContractive,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AblationTarget::PetzDropF0 => "petz_drop_f0",
            AblationTarget::StateDropOpconvex => "state_drop_opconvex",
            AblationTarget::DropPositivity => "drop_positivity",
            AblationTarget::DropContractive => "drop_contractive",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| {
            Error::Argument(format!(
                "unknown ablation target `{s}`; valid targets: {}",
                Self::ALL.map(|t| t.as_str()).join(", ")
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationResult {
    pub target: AblationTarget,
    pub trials: usize,
    pub violations: usize,
    /// Most negative gap over all trials.
    pub max_violation: f64,
    /// Report of the worst trial, when it failed.
    pub witness: Option<CheckReport>,
}

fn ablation_input(target: AblationTarget, trial: usize, dims: (usize, usize), seed: u64) -> Result<CheckInput> {
    let (d1, d2) = dims;
    let mut rng = rng_from_seed(seed);
    let rng = &mut rng;
    Ok(match target {
        AblationTarget::PetzDropF0 => {
            let kind = if trial.is_multiple_of(2) { MapKind::Zero } else { MapKind::ScaledContractive };
            let map = random_positive_map_with(kind, d1, d2, rng)?;
            CheckInput::Petz {
                x: random_hermitian(d1, rng)?,
                map,
                function: get_function("shifted_square", &[1.0])?,
                algebra: BlockAlgebra::single(d2, 1.0)?,
            }
        }
        AblationTarget::StateDropOpconvex => CheckInput::StateVersion {
            h: random_hermitian(d1 * d2, rng)?,
            a: random_contraction(d1, rng)?,
            function: get_function("quartic", &[])?,
            rho1: random_density(d1, rng)?,
            rho2: random_density(d2, rng)?,
            space: TensorSpace::new(d1, d2)?,
        },
        AblationTarget::DropPositivity => {
            let map = random_hermiticity_preserving_map(d1, d2, rng)?;
            CheckInput::Petz {
                x: random_hermitian(d1, rng)?,
                map,
                function: get_function("square", &[])?,
                algebra: BlockAlgebra::single(d2, 1.0)?,
            }
        }
        AblationTarget::DropContractive => {
            let base = random_positive_map_with(MapKind::UcpStinespring, d1, d2, rng)?;
            let c = 1.0 + 2.0 * rng.random::<f64>();
            let map: PositiveMap = base.scaled(c, "scaled_expansive")?;
            CheckInput::Petz {
                x: random_hermitian(d1, rng)?,
                map,
                function: get_function("square", &[])?,
                algebra: BlockAlgebra::single(d2, 1.0)?,
            }
        }
    })
}

/// Runs `trials` unchecked instances for `target` with input size `dims` = (d1, d2)
/// and returns the worst gap. Trial t uses the seed derived from (`seed`, t).
pub fn ablation_search(
    target: AblationTarget,
    trials: usize,
    dims: (usize, usize),
    seed: u64,
) -> Result<AblationResult> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    let tol = ToleranceConfig::default();
    let mut violations = 0;
    let mut worst: Option<CheckReport> = None;
    for t in 0..trials {
        let trial_seed = derive_seed(seed, t as u64);
        let input = ablation_input(target, t, dims, trial_seed)?;
        let mut report = input.run(trial_seed, &tol, HypothesisMode::Unchecked)?;
        report
            .params
            .insert("ablation".into(), serde_json::json!(target.as_str()));
        if !report.pass {
            violations += 1;
        }
        if worst.as_ref().is_none_or(|w| report.gap < w.gap) {
            worst = Some(report);
        }
    }
    let worst = worst.expect("at least one trial");
    Ok(AblationResult {
        target,
        trials,
        violations,
        max_violation: worst.gap,
        witness: (!worst.pass).then_some(worst),
    })
}
