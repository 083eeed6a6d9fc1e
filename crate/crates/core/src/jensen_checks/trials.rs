//! Seeded random inputs for each check.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::checks::working_interval;
use super::{Branch, CheckInput, CheckName};
use crate::convex_catalog::{random_hermitian_in, spectrum_window, ScalarFunction};
use crate::error::{Error, Result};
use crate::linalg::random::{
    gaussian_matrix, random_contraction, random_density, random_l2_normalized, random_unit_vector,
    random_unitary, rng_from_seed,
};
use crate::linalg::ToleranceConfig;
use crate::positive_maps::{random_positive_map_with, MapKind, PositiveMap};
use crate::spectral_tools::{monotone_sign_split, projection_rank, spectral_projection_of};
use crate::tensor_ops::{BlockAlgebra, TensorSpace};

/// One cell of a campaign: which check, at which sizes, with which function and map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub check: CheckName,
    pub d1: usize,
    pub d2: usize,
    pub function: Option<ScalarFunction>,
    pub map_kind: Option<MapKind>,
    pub weights: (f64, f64),
    pub branch: Branch,
}

impl TrialSpec {
    pub fn new(check: CheckName, d1: usize, d2: usize) -> Self {
        Self {
            check,
            d1,
            d2,
            function: None,
            map_kind: None,
            weights: (1.0, 1.0),
            branch: Branch::Normalized,
        }
    }

    pub fn with_function(mut self, f: ScalarFunction) -> Self {
        self.function = Some(f);
        self
    }

    pub fn with_map(mut self, kind: MapKind) -> Self {
        self.map_kind = Some(kind);
        self
    }

    pub fn with_weights(mut self, w1: f64, w2: f64) -> Self {
        self.weights = (w1, w2);
        self
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    /// (input, output) sizes of the map for map-based checks.
    pub fn map_dims(&self) -> (usize, usize) {
        match self.map_kind {
            Some(k) if k.is_endomorphism() => (self.d2, self.d2),
            _ => (self.d1, self.d2),
        }
    }

    /// Why this combination cannot satisfy the check's hypotheses, if it cannot.
    pub fn incompatibility(&self) -> Option<String> {
        let check = self.check;
        if self.d1 == 0 || self.d2 == 0 {
            return Some("dimensions must be positive".into());
        }
        let f = match (&self.function, check.uses_function()) {
            (None, true) => return Some(format!("{check} needs a function")),
            (Some(f), true) => Some(f),
            _ => None,
        };
        if check.uses_map() && self.map_kind.is_none() {
            return Some(format!("{check} needs a map kind"));
        }
        if self.map_kind == Some(MapKind::Zero)
            && matches!(check, CheckName::SpectralPreorderLemma | CheckName::PinchingChain)
        {
            // Φ(x) = 0 sits on the root of every admissible f, a piece endpoint.
            return Some(format!("{check} is undecidable for the zero map"));
        }
        if let Some(f) = f {
            if !f.is_convex() {
                return Some(format!("{f} is not convex"));
            }
            match check {
                CheckName::MainTracial if self.branch == Branch::Subnormalized && !f.vanishes_at_zero() => {
                    return Some(format!("subnormalized branch needs f(0) = 0, {f} does not vanish"));
                }
                CheckName::StateVersion | CheckName::HansenPedersen if !f.is_operator_convex() => {
                    return Some(format!("{f} is not operator convex"));
                }
                _ => {}
            }
            if let Some(kind) = self.map_kind.filter(|_| check.uses_map()) {
                if !kind.is_unital() && !f.vanishes_at_zero() {
                    return Some(format!("non-unital map `{}` needs f(0) = 0", kind.as_str()));
                }
            }
        }
        None
    }
}

/// Output algebra for map-based checks: two weighted blocks when the size allows.
pub fn output_algebra(out_dim: usize, weights: (f64, f64)) -> Result<BlockAlgebra> {
    if out_dim >= 2 {
        BlockAlgebra::new(vec![out_dim - out_dim / 2, out_dim / 2], vec![weights.0, weights.1])
    } else {
        BlockAlgebra::single(out_dim, weights.0)
    }
}

fn function(spec: &TrialSpec) -> Result<&ScalarFunction> {
    spec.function
        .as_ref()
        .ok_or_else(|| Error::Argument(format!("{} needs a function", spec.check)))
}

fn map_and_algebra<R: Rng + ?Sized>(spec: &TrialSpec, rng: &mut R) -> Result<(PositiveMap, BlockAlgebra)> {
    let kind = spec
        .map_kind
        .ok_or_else(|| Error::Argument(format!("{} needs a map kind", spec.check)))?;
    let (n_in, n_out) = spec.map_dims();
    let map = random_positive_map_with(kind, n_in, n_out, rng)?;
    let algebra = output_algebra(n_out, spec.weights)?;
    if algebra.num_blocks() > 1 {
        Ok((map.then_pinch(&algebra.block_projections())?, algebra))
    } else {
        Ok((map, algebra))
    }
}

/// Draws one input for `spec` from the stream seeded by `seed`. Boundary ambiguities
/// surface as errors so that callers can resample.
pub fn generate_trial(spec: &TrialSpec, seed: u64) -> Result<CheckInput> {
    if let Some(reason) = spec.incompatibility() {
        return Err(Error::Argument(reason));
    }
    let mut rng = rng_from_seed(seed);
    let rng = &mut rng;
    let space = TensorSpace::new(spec.d1, spec.d2)?;
    let n = space.dim();
    let window = |f: &ScalarFunction| spectrum_window(&f.domain());
    Ok(match spec.check {
        CheckName::Cfl => {
            let f = function(spec)?;
            CheckInput::Cfl {
                h: random_hermitian_in(n, window(f), rng)?,
                rho: random_density(spec.d1, rng)?,
                function: f.clone(),
                space,
            }
        }
        CheckName::MainTracial => {
            let f = function(spec)?;
            let mut a = random_l2_normalized(spec.d1, spec.weights.0, rng)?;
            if spec.branch == Branch::Subnormalized {
                // u in (0, 1]
                let u = 1.0 - rng.random::<f64>();
                a = a.scale(u.sqrt());
            }
            CheckInput::MainTracial {
                h: random_hermitian_in(n, window(f), rng)?,
                a,
                function: f.clone(),
                space,
                weights: spec.weights,
                branch: spec.branch,
            }
        }
        CheckName::Petz | CheckName::PinchingChain => {
            let f = function(spec)?;
            let (map, algebra) = map_and_algebra(spec, rng)?;
            let x = random_hermitian_in(map.in_dim, window(f), rng)?;
            if spec.check == CheckName::Petz {
                CheckInput::Petz { map, x, function: f.clone(), algebra }
            } else {
                CheckInput::PinchingChain { map, x, function: f.clone(), algebra }
            }
        }
        CheckName::VectorJensen => {
            let f = function(spec)?;
            let kind = spec
                .map_kind
                .ok_or_else(|| Error::Argument("check_vector_jensen needs a map kind".into()))?;
            let (n_in, n_out) = spec.map_dims();
            let map = random_positive_map_with(kind, n_in, n_out, rng)?;
            let x = random_hermitian_in(n_in, window(f), rng)?;
            let xi = random_unit_vector(n_out, rng)?;
            CheckInput::VectorJensen { map, x, function: f.clone(), xi }
        }
        CheckName::SpectralPreorderLemma => {
            let f = function(spec)?;
            let (map, algebra) = map_and_algebra(spec, rng)?;
            let x = random_hermitian_in(map.in_dim, window(f), rng)?;
            let spectrum = map.apply_hermitian(&x)?.eig()?;
            let split = monotone_sign_split(f, working_interval(spectrum.min(), spectrum.max(), f))?;
            let tol = ToleranceConfig::default();
            let mut occupied = Vec::new();
            for piece in split.pieces {
                if projection_rank(&spectral_projection_of(&spectrum, &piece.interval, &tol)?) > 0 {
                    occupied.push(piece);
                }
            }
            let piece = occupied[rng.random_range(0..occupied.len())];
            CheckInput::SpectralPreorderLemma { map, x, function: f.clone(), piece, algebra }
        }
        CheckName::PartialTraceDuality => CheckInput::PartialTraceDuality {
            x: gaussian_matrix(n, n, rng),
            a: gaussian_matrix(spec.d1, spec.d1, rng),
            space,
            weights: spec.weights,
        },
        CheckName::StateVersion | CheckName::HansenPedersen => {
            let f = function(spec)?;
            // Strict contractions need f(0) ≤ 0; otherwise a is unitary.
            let a = match f.value_at_zero() {
                Some(v) if v <= 0.0 => random_contraction(spec.d1, rng)?,
                _ => random_unitary(spec.d1, rng)?,
            };
            let h = random_hermitian_in(n, window(f), rng)?;
            let rho1 = random_density(spec.d1, rng)?;
            let rho2 = random_density(spec.d2, rng)?;
            if spec.check == CheckName::StateVersion {
                CheckInput::StateVersion { h, a, function: f.clone(), rho1, rho2, space }
            } else {
                CheckInput::HansenPedersen { h, a, function: f.clone(), space }
            }
        }
    })
}
