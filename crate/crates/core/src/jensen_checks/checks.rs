use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::{Branch, CheckInput, CheckName, CheckReport, HypothesisMode};
use crate::convex_catalog::ScalarFunction;
use crate::error::{Error, Result};
use crate::linalg::{
    op_norm, psd_sqrt, ComplexMatrix, DensityMatrix, HermitianMatrix, ToleranceConfig, C64,
};
use crate::positive_maps::PositiveMap;
use crate::spectral_tools::{
    jordan_split, monotone_sign_split, negative_part, piece_is_consistent, pinching,
    preorder_violation, projection_rank, spectral_projection_of, Interval, Piece, Sign,
};
use crate::tensor_ops::{
    conjugate_compress, conjugate_compress_hermitian, partial_trace, partial_trace_hermitian,
    slice, BlockAlgebra, LinearFunctional, Side, TensorSpace, TraceSide,
};

const HYPOTHESIS_TOL: f64 = 1e-10;
const PIECE_SAMPLES: usize = 33;

fn params<const N: usize>(entries: [(&str, Value); N]) -> BTreeMap<String, Value> {
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn hypothesis(msg: impl Into<String>) -> Error {
    Error::Hypothesis(msg.into())
}

fn expect_dim(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::dim(format!("{what} has dimension {got}, expected {want}")));
    }
    Ok(())
}

fn expect_square(what: &str, m: &ComplexMatrix, n: usize) -> Result<()> {
    if m.shape() != (n, n) {
        return Err(Error::dim(format!("{what} must be {n}x{n}, got {:?}", m.shape())));
    }
    Ok(())
}

fn require_convex(f: &ScalarFunction, mode: HypothesisMode) -> Result<()> {
    if mode == HypothesisMode::Enforce && !f.is_convex() {
        return Err(hypothesis(format!("{f} is not flagged convex")));
    }
    Ok(())
}

pub(crate) fn evaluate(input: &CheckInput, tol: &ToleranceConfig, mode: HypothesisMode) -> Result<CheckReport> {
    match input {
        CheckInput::Cfl { h, rho, function, space } => cfl(h, rho, function, *space, tol, mode),
        CheckInput::MainTracial { h, a, function, space, weights, branch } => {
            main_tracial(h, a, function, *space, *weights, *branch, tol, mode)
        }
        CheckInput::Petz { map, x, function, algebra } => petz(map, x, function, algebra, tol, mode),
        CheckInput::VectorJensen { map, x, function, xi } => vector_jensen(map, x, function, xi, tol, mode),
        CheckInput::SpectralPreorderLemma { map, x, function, piece, algebra } => {
            preorder_lemma(map, x, function, piece, algebra, tol, mode)
        }
        CheckInput::PinchingChain { map, x, function, algebra } => {
            pinching_chain(map, x, function, algebra, tol, mode)
        }
        CheckInput::PartialTraceDuality { x, a, space, weights } => duality(x, a, *space, *weights, tol),
        CheckInput::StateVersion { h, a, function, rho1, rho2, space } => {
            state_version(h, a, function, rho1, rho2, *space, tol, mode)
        }
        CheckInput::HansenPedersen { h, a, function, space } => hansen_pedersen(h, a, function, *space, tol, mode),
    }
}

/// Tr₂ f(Tr₁((ρ⊗1)^{1/2} H (ρ⊗1)^{1/2})) ≤ Tr₁(ρ^{1/2} Tr₂ f(H) ρ^{1/2}).
pub fn check_cfl(
    h: &HermitianMatrix,
    rho: &DensityMatrix,
    f: &ScalarFunction,
    space: TensorSpace,
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    CheckInput::Cfl {
        h: h.clone(),
        rho: rho.clone(),
        function: f.clone(),
        space,
    }
    .run(0, tol, HypothesisMode::Enforce)
}

/// τ₂ f((τ₁⊗id)[(a*⊗1)H(a⊗1)]) ≤ τ₁[a*·(id⊗τ₂)f(H)·a] with τ_i = w_i·Tr.
pub fn check_main_tracial(
    h: &HermitianMatrix,
    a: &ComplexMatrix,
    f: &ScalarFunction,
    space: TensorSpace,
    weights: (f64, f64),
    branch: Branch,
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    CheckInput::MainTracial {
        h: h.clone(),
        a: a.clone(),
        function: f.clone(),
        space,
        weights,
        branch,
    }
    .run(0, tol, HypothesisMode::Enforce)
}

/// τ(f(Φ(x))) ≤ τ(Φ(f(x))) for the trace of `out_algebra`.
pub fn check_petz(
    map: &PositiveMap,
    x: &HermitianMatrix,
    f: &ScalarFunction,
    out_algebra: &BlockAlgebra,
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    CheckInput::Petz {
        map: map.clone(),
        x: x.clone(),
        function: f.clone(),
        algebra: out_algebra.clone(),
    }
    .run(0, tol, HypothesisMode::Enforce)
}

/// f(⟨Φ(x)ξ,ξ⟩) ≤ ⟨Φ(f(x))ξ,ξ⟩.
pub fn check_vector_jensen(
    map: &PositiveMap,
    x: &HermitianMatrix,
    f: &ScalarFunction,
    xi: &[C64],
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    CheckInput::VectorJensen {
        map: map.clone(),
        x: x.clone(),
        function: f.clone(),
        xi: xi.to_vec(),
    }
    .run(0, tol, HypothesisMode::Enforce)
}

/// Pre-order comparison of pΦ(f(x))p and pf(Φ(x))p for p = e_piece(Φ(x)).
pub fn check_spectral_preorder_lemma(
    map: &PositiveMap,
    x: &HermitianMatrix,
    f: &ScalarFunction,
    piece: &Piece,
    algebra: &BlockAlgebra,
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    CheckInput::SpectralPreorderLemma {
        map: map.clone(),
        x: x.clone(),
        function: f.clone(),
        piece: *piece,
        algebra: algebra.clone(),
    }
    .run(0, tol, HypothesisMode::Enforce)
}

/// The pinched chain: pre-orders on Jordan parts, trace preservation, the trace
/// inequality and Jordan minimality.
pub fn check_pinching_chain(
    map: &PositiveMap,
    x: &HermitianMatrix,
    f: &ScalarFunction,
    algebra: &BlockAlgebra,
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    CheckInput::PinchingChain {
        map: map.clone(),
        x: x.clone(),
        function: f.clone(),
        algebra: algebra.clone(),
    }
    .run(0, tol, HypothesisMode::Enforce)
}

/// τ₂((τ₁⊗id)((a*⊗1)X(a⊗1))) = τ₁(a*(id⊗τ₂)(X)a). The gap is −|lhs − rhs|.
pub fn check_partial_trace_duality(
    x: &ComplexMatrix,
    a: &ComplexMatrix,
    space: TensorSpace,
    weights: (f64, f64),
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    CheckInput::PartialTraceDuality {
        x: x.clone(),
        a: a.clone(),
        space,
        weights,
    }
    .run(0, tol, HypothesisMode::Enforce)
}

/// ρ₂ f[(ρ₁⊗id)((a*⊗1)H(a⊗1))] ≤ ρ₁(a*(id⊗ρ₂)(f(H))a) for operator convex f.
#[allow(clippy::too_many_arguments)]
pub fn check_state_version(
    h: &HermitianMatrix,
    a: &ComplexMatrix,
    f: &ScalarFunction,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    space: TensorSpace,
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    CheckInput::StateVersion {
        h: h.clone(),
        a: a.clone(),
        function: f.clone(),
        rho1: rho1.clone(),
        rho2: rho2.clone(),
        space,
    }
    .run(0, tol, HypothesisMode::Enforce)
}

/// Loewner inequality f((a*⊗1)H(a⊗1)) ⪯ (a*⊗1)f(H)(a⊗1); the gap is the smallest
/// eigenvalue of the difference.
pub fn check_hansen_pedersen(
    h: &HermitianMatrix,
    a: &ComplexMatrix,
    f: &ScalarFunction,
    space: TensorSpace,
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    CheckInput::HansenPedersen {
        h: h.clone(),
        a: a.clone(),
        function: f.clone(),
        space,
    }
    .run(0, tol, HypothesisMode::Enforce)
}

/// Both sides of the weighted partial-trace inequality for an arbitrary `a`.
fn tracial_sides(
    h: &HermitianMatrix,
    a: &ComplexMatrix,
    f: &ScalarFunction,
    space: TensorSpace,
    weights: (f64, f64),
) -> Result<(f64, f64)> {
    let compressed = conjugate_compress_hermitian(h, a, space)?;
    let inner = partial_trace_hermitian(&compressed, TraceSide::TraceFirst, space, weights)?;
    let lhs = weights.1 * f.apply(&inner)?.trace_re();
    let fh = f.apply(h)?;
    let outer = partial_trace_hermitian(&fh, TraceSide::TraceSecond, space, weights)?;
    let rhs = weights.0 * outer.congruence(a)?.trace_re();
    Ok((lhs, rhs))
}

fn cfl(
    h: &HermitianMatrix,
    rho: &DensityMatrix,
    f: &ScalarFunction,
    space: TensorSpace,
    tol: &ToleranceConfig,
    mode: HypothesisMode,
) -> Result<CheckReport> {
    expect_dim("H", h.dim(), space.dim())?;
    expect_dim("rho", rho.dim(), space.d1)?;
    require_convex(f, mode)?;
    let root = psd_sqrt(rho)?;
    let (lhs, rhs) = tracial_sides(h, &root, f, space, (1.0, 1.0))?;
    let p = params([
        ("d1", json!(space.d1)),
        ("d2", json!(space.d2)),
        ("function", json!(f.spec_string())),
    ]);
    CheckReport::inequality(CheckName::Cfl, p, lhs, rhs, tol.scaled(&[lhs, rhs]))
}

#[allow(clippy::too_many_arguments)]
fn main_tracial(
    h: &HermitianMatrix,
    a: &ComplexMatrix,
    f: &ScalarFunction,
    space: TensorSpace,
    weights: (f64, f64),
    branch: Branch,
    tol: &ToleranceConfig,
    mode: HypothesisMode,
) -> Result<CheckReport> {
    expect_dim("H", h.dim(), space.dim())?;
    expect_square("a", a, space.d1)?;
    BlockAlgebra::new(vec![space.d1, space.d2], vec![weights.0, weights.1])?;
    let mass = weights.0 * a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
    if mode == HypothesisMode::Enforce {
        require_convex(f, mode)?;
        match branch {
            Branch::Normalized if (mass - 1.0).abs() > HYPOTHESIS_TOL => {
                return Err(hypothesis(format!("normalized branch needs τ₁(a*a) = 1, got {mass}")));
            }
            Branch::Subnormalized if mass > 1.0 + HYPOTHESIS_TOL => {
                return Err(hypothesis(format!("subnormalized branch needs τ₁(a*a) ≤ 1, got {mass}")));
            }
            Branch::Subnormalized if !f.vanishes_at_zero() => {
                return Err(hypothesis(format!("subnormalized branch needs f(0) = 0, {f} does not vanish")));
            }
            _ => {}
        }
    }
    let (lhs, rhs) = tracial_sides(h, a, f, space, weights)?;
    let p = params([
        ("d1", json!(space.d1)),
        ("d2", json!(space.d2)),
        ("function", json!(f.spec_string())),
        ("w1", json!(weights.0)),
        ("w2", json!(weights.1)),
        ("branch", json!(branch.as_str())),
        ("trace_mass", json!(mass)),
    ]);
    CheckReport::inequality(CheckName::MainTracial, p, lhs, rhs, tol.scaled(&[lhs, rhs]))
}

/// Which half of the positive-map hypotheses applies: unital, or contractive with f(0) = 0.
fn map_branch(map: &PositiveMap, f: &ScalarFunction, mode: HypothesisMode) -> Result<&'static str> {
    let branch = if !map.claimed_positive || !f.is_convex() {
        None
    } else if map.claimed_unital {
        Some("unital")
    } else if map.claimed_contractive && f.vanishes_at_zero() {
        Some("contractive")
    } else {
        None
    };
    match (branch, mode) {
        (Some(b), _) => Ok(b),
        (None, HypothesisMode::Unchecked) => Ok("none"),
        (None, HypothesisMode::Enforce) => Err(hypothesis(format!(
            "map `{}` (positive={}, unital={}, contractive={}) with {f} (convex={}, f(0)=0: {}) \
             satisfies neither the unital nor the contractive branch",
            map.kind,
            map.claimed_positive,
            map.claimed_unital,
            map.claimed_contractive,
            f.is_convex(),
            f.vanishes_at_zero()
        ))),
    }
}

fn map_params(map: &PositiveMap, f: &ScalarFunction, branch: &str) -> BTreeMap<String, Value> {
    params([
        ("d1", json!(map.in_dim)),
        ("d2", json!(map.out_dim)),
        ("function", json!(f.spec_string())),
        ("map_kind", json!(map.kind)),
        ("branch", json!(branch)),
    ])
}

fn algebra_params(p: &mut BTreeMap<String, Value>, algebra: &BlockAlgebra) {
    p.insert("block_dims".into(), json!(algebra.block_dims()));
    p.insert("trace_weights".into(), json!(algebra.trace_weights()));
}

fn map_image(map: &PositiveMap, x: &HermitianMatrix, algebra: Option<&BlockAlgebra>) -> Result<HermitianMatrix> {
    expect_dim("x", x.dim(), map.in_dim)?;
    let y = map.apply_hermitian(x)?;
    if let Some(alg) = algebra {
        expect_dim("output algebra", alg.dim(), map.out_dim)?;
        alg.blocks(&y)?;
    }
    Ok(y)
}

fn petz(
    map: &PositiveMap,
    x: &HermitianMatrix,
    f: &ScalarFunction,
    algebra: &BlockAlgebra,
    tol: &ToleranceConfig,
    mode: HypothesisMode,
) -> Result<CheckReport> {
    let branch = map_branch(map, f, mode)?;
    let phi_x = map_image(map, x, Some(algebra))?;
    let lhs = algebra.trace_re(&f.apply(&phi_x)?)?;
    let phi_fx = map_image(map, &f.apply(x)?, Some(algebra))?;
    let rhs = algebra.trace_re(&phi_fx)?;
    let mut p = map_params(map, f, branch);
    algebra_params(&mut p, algebra);
    CheckReport::inequality(CheckName::Petz, p, lhs, rhs, tol.scaled(&[lhs, rhs]))
}

fn vector_jensen(
    map: &PositiveMap,
    x: &HermitianMatrix,
    f: &ScalarFunction,
    xi: &[C64],
    tol: &ToleranceConfig,
    mode: HypothesisMode,
) -> Result<CheckReport> {
    expect_dim("xi", xi.len(), map.out_dim)?;
    let norm = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Argument(format!("xi must be a unit vector, has norm {norm}")));
    }
    let branch = map_branch(map, f, mode)?;
    let phi_x = map_image(map, x, None)?;
    let lhs = f.eval_on_spectrum(phi_x.quadratic_form(xi)?.re)?;
    let rhs = map_image(map, &f.apply(x)?, None)?.quadratic_form(xi)?.re;
    let p = map_params(map, f, branch);
    CheckReport::inequality(CheckName::VectorJensen, p, lhs, rhs, tol.scaled(&[lhs, rhs]))
}

/// Pass/fail indicator report: gap 0 on success, −failures otherwise, zero tolerance.
fn indicator(name: CheckName, p: BTreeMap<String, Value>, failures: usize) -> Result<CheckReport> {
    let lhs = failures as f64;
    CheckReport::with_gap(name, p, lhs, 0.0, -lhs, 0.0)
}

fn spectral_hull(h: &HermitianMatrix) -> Result<Interval> {
    let spec = h.eig()?;
    Ok(Interval::closed(spec.min(), spec.max()))
}

#[allow(clippy::too_many_arguments)]
fn preorder_lemma(
    map: &PositiveMap,
    x: &HermitianMatrix,
    f: &ScalarFunction,
    piece: &Piece,
    algebra: &BlockAlgebra,
    tol: &ToleranceConfig,
    mode: HypothesisMode,
) -> Result<CheckReport> {
    let branch = map_branch(map, f, mode)?;
    let phi_x = map_image(map, x, Some(algebra))?;
    let spec = phi_x.eig()?;
    let hull = Interval::closed(spec.min(), spec.max());
    if mode == HypothesisMode::Enforce && !piece_is_consistent(f, piece, &hull, PIECE_SAMPLES)? {
        return Err(hypothesis(format!(
            "{f} changes sign or direction on {} within the spectrum of Φ(x)",
            piece.interval
        )));
    }
    let proj = spectral_projection_of(&spec, &piece.interval, tol)?;
    let y = map_image(map, &f.apply(x)?, Some(algebra))?.congruence(&proj)?;
    let z = f.apply(&phi_x)?.congruence(&proj)?;

    let mut p = map_params(map, f, branch);
    algebra_params(&mut p, algebra);
    p.insert("piece".into(), json!(piece));
    p.insert("rank_p".into(), json!(projection_rank(&proj)));
    let mut failures = 0;
    let violation = match piece.sign {
        Sign::Nonnegative => {
            p.insert("part".into(), json!("a"));
            let min = y.min_eigenvalue()?;
            let scale = y.eig()?.spectral_norm().max(z.eig()?.spectral_norm());
            p.insert("min_eigenvalue".into(), json!(min));
            if min < -tol.scaled(&[scale]) {
                failures += 1;
            }
            preorder_violation(&z, &y, algebra, tol)?
        }
        Sign::Nonpositive => {
            p.insert("part".into(), json!("b"));
            preorder_violation(&negative_part(&y)?, &z.scale(-1.0), algebra, tol)?
        }
    };
    if let Some(v) = violation {
        failures += 1;
        p.insert("violation".into(), json!(v));
    }
    indicator(CheckName::SpectralPreorderLemma, p, failures)
}

/// Compact interval around the spectrum of `h`, kept inside the domain of f.
pub(crate) fn working_interval(h_spec_min: f64, h_spec_max: f64, f: &ScalarFunction) -> Interval {
    let pad = 0.25 * (h_spec_max - h_spec_min).max(1.0);
    let mut lo = h_spec_min - pad;
    let mut hi = h_spec_max + pad;
    let d = f.domain();
    if d.lo.is_finite() {
        lo = lo.max(if d.lo_open { 0.5 * (d.lo + h_spec_min) } else { d.lo });
    }
    if d.hi.is_finite() {
        hi = hi.min(if d.hi_open { 0.5 * (d.hi + h_spec_max) } else { d.hi });
    }
    Interval::closed(lo.min(h_spec_min), hi.max(h_spec_max))
}

fn pinching_chain(
    map: &PositiveMap,
    x: &HermitianMatrix,
    f: &ScalarFunction,
    algebra: &BlockAlgebra,
    tol: &ToleranceConfig,
    mode: HypothesisMode,
) -> Result<CheckReport> {
    let branch = map_branch(map, f, mode)?;
    let phi_x = map_image(map, x, Some(algebra))?;
    let spec = phi_x.eig()?;
    let split = monotone_sign_split(f, working_interval(spec.min(), spec.max(), f))?;
    let mut projections = Vec::new();
    let mut occupied = Vec::new();
    for (i, piece) in split.pieces.iter().enumerate() {
        let proj = spectral_projection_of(&spec, &piece.interval, tol)?;
        if projection_rank(&proj) > 0 {
            projections.push(proj);
            occupied.push(i + 1);
        }
    }
    let pinch = |m: &HermitianMatrix| HermitianMatrix::new(pinching(m, &projections)?);

    let y = map_image(map, &f.apply(x)?, Some(algebra))?;
    let ey = pinch(&y)?;
    let f_phi = f.apply(&phi_x)?;
    let (f_pos, f_neg) = jordan_split(&f_phi)?;
    let (ey_pos, ey_neg) = jordan_split(&ey)?;
    let (y_pos, y_neg) = jordan_split(&y)?;

    let upper = preorder_violation(&f_pos, &ey_pos, algebra, tol)?;
    let lower = preorder_violation(&ey_neg, &f_neg, algebra, tol)?;

    let tau = |m: &HermitianMatrix| algebra.trace_re(m);
    let (tau_ey, tau_y, tau_f) = (tau(&ey)?, tau(&y)?, tau(&f_phi)?);
    let preserved = (tau_ey - tau_y).abs() <= tol.scaled(&[tau_ey, tau_y]);
    let bookkeeping = tau_ey >= tau_f - tol.scaled(&[tau_ey, tau_f]);
    let (tau_ey_pos, tau_e_ypos) = (tau(&ey_pos)?, tau(&pinch(&y_pos)?)?);
    let (tau_ey_neg, tau_e_yneg) = (tau(&ey_neg)?, tau(&pinch(&y_neg)?)?);
    let minimal = tau_ey_pos <= tau_e_ypos + tol.scaled(&[tau_ey_pos, tau_e_ypos])
        && tau_ey_neg <= tau_e_yneg + tol.scaled(&[tau_ey_neg, tau_e_yneg]);

    let mut p = map_params(map, f, branch);
    algebra_params(&mut p, algebra);
    p.insert("pieces".into(), json!(occupied));
    p.insert("t0".into(), json!(split.t0));
    p.insert("t1".into(), json!(split.t1));
    p.insert("t2".into(), json!(split.t2));
    p.insert("preorder_positive".into(), json!(upper.is_none()));
    p.insert("preorder_negative".into(), json!(lower.is_none()));
    p.insert("trace_preserved".into(), json!(preserved));
    p.insert("trace_bookkeeping".into(), json!(bookkeeping));
    p.insert("jordan_minimal".into(), json!(minimal));
    if let Some(v) = upper.as_ref().or(lower.as_ref()) {
        p.insert("violation".into(), json!(v));
    }
    let failures = [upper.is_none(), lower.is_none(), preserved, bookkeeping, minimal]
        .iter()
        .filter(|ok| !**ok)
        .count();
    if failures == 0 {
        CheckReport::inequality(CheckName::PinchingChain, p, tau_f, tau_ey, tol.scaled(&[tau_f, tau_ey]))
    } else {
        p.insert("tau_f_phi_x".into(), json!(tau_f));
        p.insert("tau_e_phi_fx".into(), json!(tau_ey));
        indicator(CheckName::PinchingChain, p, failures)
    }
}

fn duality(
    x: &ComplexMatrix,
    a: &ComplexMatrix,
    space: TensorSpace,
    weights: (f64, f64),
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    expect_square("X", x, space.dim())?;
    expect_square("a", a, space.d1)?;
    BlockAlgebra::new(vec![space.d1, space.d2], vec![weights.0, weights.1])?;
    let compressed = conjugate_compress(x, a, space)?;
    let lhs = partial_trace(&compressed, TraceSide::TraceFirst, space, weights)?.trace() * weights.1;
    let outer = partial_trace(x, TraceSide::TraceSecond, space, weights)?;
    let rhs = a.adjoint().try_matmul(&outer.try_matmul(a)?)?.trace() * weights.0;
    let diff = (lhs - rhs).norm();
    let p = params([
        ("d1", json!(space.d1)),
        ("d2", json!(space.d2)),
        ("w1", json!(weights.0)),
        ("w2", json!(weights.1)),
        ("lhs_im", json!(lhs.im)),
        ("rhs_im", json!(rhs.im)),
    ]);
    let t = tol.scaled(&[lhs.norm(), rhs.norm()]);
    CheckReport::with_gap(CheckName::PartialTraceDuality, p, lhs.re, rhs.re, -diff, t)
}

/// Hypotheses shared by the state version and the contractive Jensen operator
/// inequality. Returns whether `a` is unitary.
fn contraction_hypotheses(
    h: &HermitianMatrix,
    a: &ComplexMatrix,
    f: &ScalarFunction,
    mode: HypothesisMode,
) -> Result<(bool, f64)> {
    let norm = op_norm(a)?;
    let gram = a.adjoint().try_matmul(a)?;
    let unitary = (&gram - &ComplexMatrix::identity(a.rows())).frobenius_norm() <= HYPOTHESIS_TOL;
    if mode == HypothesisMode::Unchecked {
        return Ok((unitary, norm));
    }
    if norm > 1.0 + HYPOTHESIS_TOL {
        return Err(hypothesis(format!("a must be a contraction, ‖a‖ = {norm}")));
    }
    if !f.is_operator_convex() {
        return Err(hypothesis(format!("{f} is not flagged operator convex")));
    }
    let hull = spectral_hull(h)?;
    let mut ends = vec![hull.lo, hull.hi];
    if !unitary {
        match f.value_at_zero() {
            Some(v) if v <= 0.0 => ends.push(0.0),
            _ => {
                return Err(hypothesis(format!(
                    "non-unitary contraction needs f(0) ≤ 0 with 0 in the domain of {f}"
                )))
            }
        }
    }
    for t in ends {
        if f.eval_on_spectrum(t).is_err() {
            return Err(hypothesis(format!("{t} is outside the domain {} of {f}", f.domain())));
        }
    }
    Ok((unitary, norm))
}

#[allow(clippy::too_many_arguments)]
fn state_version(
    h: &HermitianMatrix,
    a: &ComplexMatrix,
    f: &ScalarFunction,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    space: TensorSpace,
    tol: &ToleranceConfig,
    mode: HypothesisMode,
) -> Result<CheckReport> {
    expect_dim("H", h.dim(), space.dim())?;
    expect_square("a", a, space.d1)?;
    expect_dim("rho1", rho1.dim(), space.d1)?;
    expect_dim("rho2", rho2.dim(), space.d2)?;
    let (unitary, norm) = contraction_hypotheses(h, a, f, mode)?;
    if mode == HypothesisMode::Enforce && !(rho1.is_faithful()? && rho2.is_faithful()?) {
        return Err(hypothesis("states must be faithful"));
    }
    let (s1, s2) = (LinearFunctional::state(rho1)?, LinearFunctional::state(rho2)?);
    let compressed = conjugate_compress(h, a, space)?;
    let inner = HermitianMatrix::new(slice(&compressed, &s1, Side::Left, space)?)?;
    let lhs = s2.eval(f.apply(&inner)?.as_matrix())?.re;
    let outer = HermitianMatrix::new(slice(f.apply(h)?.as_matrix(), &s2, Side::Right, space)?)?;
    let rhs = s1.eval(outer.congruence(a)?.as_matrix())?.re;
    let p = params([
        ("d1", json!(space.d1)),
        ("d2", json!(space.d2)),
        ("function", json!(f.spec_string())),
        ("a_norm", json!(norm)),
        ("a_unitary", json!(unitary)),
    ]);
    CheckReport::inequality(CheckName::StateVersion, p, lhs, rhs, tol.scaled(&[lhs, rhs]))
}

fn hansen_pedersen(
    h: &HermitianMatrix,
    a: &ComplexMatrix,
    f: &ScalarFunction,
    space: TensorSpace,
    tol: &ToleranceConfig,
    mode: HypothesisMode,
) -> Result<CheckReport> {
    expect_dim("H", h.dim(), space.dim())?;
    expect_square("a", a, space.d1)?;
    let (unitary, norm) = contraction_hypotheses(h, a, f, mode)?;
    let fh = f.apply(h)?;
    let inside = f.apply(&conjugate_compress_hermitian(h, a, space)?)?;
    let outside = conjugate_compress_hermitian(&fh, a, space)?;
    let min = outside.sub(&inside)?.min_eigenvalue()?;
    let scale = fh.eig()?.spectral_norm();
    let p = params([
        ("d1", json!(space.d1)),
        ("d2", json!(space.d2)),
        ("function", json!(f.spec_string())),
        ("a_norm", json!(norm)),
        ("a_unitary", json!(unitary)),
        ("f_h_norm", json!(scale)),
    ]);
    CheckReport::with_gap(CheckName::HansenPedersen, p, 0.0, min, min, tol.scaled(&[scale]))
}
