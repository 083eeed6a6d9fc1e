//! Catalog of scalar test functions with convexity metadata, and sampling checkers
//! for scalar convexity and operator (Loewner) convexity.
//!
//! Operator-convexity flags come from the standard literature; the checker below is
//! how the test suite defends them.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::random::{random_hermitian, rng_from_seed};
use crate::linalg::{spectral_apply, HermitianMatrix};
use crate::spectral_tools::Interval;

/// Names accepted by [`get_function`], in CLI form.
pub const CATALOG: &[&str] = &[
    "square",
    "abs",
    "quartic",
    "exp",
    "hinge[:c]",
    "shifted_square[:c]",
    "entropy",
    "inv",
    "shifted_inv[:c]",
    "neglog",
    "power:p",
    "linear[:alpha]",
];

#[derive(Clone)]
enum Kind {
    Square,
    Abs,
    Quartic,
    Exp,
    Hinge(f64),
    ShiftedSquare(f64),
    Entropy,
    Inv,
    ShiftedInv(f64),
    NegLog,
    Power(f64),
    Linear(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A real function with its domain and convexity metadata.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    params: Vec<f64>,
    kind: Kind,
    domain: Interval,
    is_convex: bool,
    is_operator_convex: bool,
    vanishes_at_zero: bool,
}

impl ScalarFunction {
    /// An ad-hoc function outside the catalog. It cannot be serialized back from text.
    pub fn custom(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: Interval,
        is_convex: bool,
        is_operator_convex: bool,
    ) -> Self {
        let vanishes_at_zero = domain.contains(0.0) && f(0.0) == 0.0;
        Self {
            name: name.to_string(),
            params: Vec::new(),
            kind: Kind::Custom(Arc::new(f)),
            domain,
            is_convex,
            is_operator_convex,
            vanishes_at_zero,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn is_convex(&self) -> bool {
        self.is_convex
    }

    pub fn is_operator_convex(&self) -> bool {
        self.is_operator_convex
    }

    pub fn vanishes_at_zero(&self) -> bool {
        self.vanishes_at_zero
    }

    pub fn is_custom(&self) -> bool {
        matches!(self.kind, Kind::Custom(_))
    }

    /// f(0), if 0 is in the domain.
    pub fn value_at_zero(&self) -> Option<f64> {
        self.domain.contains(0.0).then(|| self.eval(0.0))
    }

    /// Raw evaluation; no domain check.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Square => t * t,
            Kind::Abs => t.abs(),
            Kind::Quartic => (t * t) * (t * t),
            Kind::Exp => t.exp(),
            Kind::Hinge(c) => (t - c).max(0.0),
            Kind::ShiftedSquare(c) => t * t + c,
            Kind::Entropy => {
                if t == 0.0 {
                    0.0
                } else {
                    t * t.ln()
                }
            }
            Kind::Inv => 1.0 / t,
            Kind::ShiftedInv(c) => 1.0 / (t + c),
            Kind::NegLog => -t.ln(),
            Kind::Power(p) => t.powf(*p),
            Kind::Linear(a) => a * t,
            Kind::Custom(f) => f(t),
        }
    }

    /// Evaluation at a (numerically computed) spectral value: points within
    /// 1e-12·max(1,|t|) outside a closed endpoint are clamped onto it.
    pub fn eval_on_spectrum(&self, t: f64) -> Result<f64> {
        let d = self.domain;
        let slack = 1e-12 * t.abs().max(1.0);
        let point = if d.contains(t) {
            t
        } else if !d.lo_open && t < d.lo && d.lo - t <= slack {
            d.lo
        } else if !d.hi_open && t > d.hi && t - d.hi <= slack {
            d.hi
        } else {
            return Err(Error::Domain {
                function: self.to_string(),
                value: t,
                domain: d.to_string(),
            });
        };
        let v = self.eval(point);
        if !v.is_finite() {
            return Err(Error::Numeric(format!("{self}({point}) = {v}")));
        }
        Ok(v)
    }

    /// f applied to a Hermitian matrix through its spectral decomposition.
    pub fn apply(&self, m: &HermitianMatrix) -> Result<HermitianMatrix> {
        spectral_apply(&m.eig()?, self)
    }

    /// CLI/config form: `name` or `name:param`.
    pub fn spec_string(&self) -> String {
        let mut s = self.name.clone();
        for p in &self.params {
            s.push(':');
            s.push_str(&p.to_string());
        }
        s
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("spec", &self.spec_string())
            .field("domain", &self.domain)
            .field("is_convex", &self.is_convex)
            .field("is_operator_convex", &self.is_operator_convex)
            .field("vanishes_at_zero", &self.vanishes_at_zero)
            .finish()
    }
}

impl PartialEq for ScalarFunction {
    fn eq(&self, other: &Self) -> bool {
        !self.is_custom() && !other.is_custom() && self.spec_string() == other.spec_string()
    }
}

impl Serialize for ScalarFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec_string())
    }
}

impl<'de> Deserialize<'de> for ScalarFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_function(&text).map_err(serde::de::Error::custom)
    }
}

fn unknown(name: &str) -> Error {
    Error::UnknownFunction {
        name: name.to_string(),
        valid: CATALOG.join(", "),
    }
}

/// Looks up a catalog entry.
pub fn get_function(name: &str, params: &[f64]) -> Result<ScalarFunction> {
    let one_param = |default: Option<f64>| -> Result<f64> {
        match (params, default) {
            ([p], _) if p.is_finite() => Ok(*p),
            ([], Some(d)) => Ok(d),
            _ => Err(Error::Argument(format!(
                "`{name}` takes one finite parameter, got {params:?}"
            ))),
        }
    };
    let no_params = || -> Result<()> {
        if params.is_empty() {
            Ok(())
        } else {
            Err(Error::Argument(format!("`{name}` takes no parameters")))
        }
    };
    let nonneg = Interval::half_open(0.0, f64::INFINITY);
    let positive = Interval::open(0.0, f64::INFINITY);
    let line = Interval::real_line();

    // (kind, params, domain, convex, operator convex)
    let (kind, stored, domain, convex, op_convex) = match name {
        "square" => (no_params().map(|_| Kind::Square)?, vec![], line, true, true),
        "abs" => (no_params().map(|_| Kind::Abs)?, vec![], line, true, false),
        "quartic" => (no_params().map(|_| Kind::Quartic)?, vec![], line, true, false),
        "exp" => (no_params().map(|_| Kind::Exp)?, vec![], line, true, false),
        "hinge" => {
            let c = one_param(Some(0.0))?;
            (Kind::Hinge(c), vec![c], line, true, false)
        }
        "shifted_square" => {
            let c = one_param(Some(0.0))?;
            (Kind::ShiftedSquare(c), vec![c], line, true, true)
        }
        "entropy" => (no_params().map(|_| Kind::Entropy)?, vec![], nonneg, true, true),
        "inv" => (no_params().map(|_| Kind::Inv)?, vec![], positive, true, true),
        "shifted_inv" => {
            let c = one_param(Some(1.0))?;
            if c <= 0.0 {
                return Err(Error::Argument(format!("shifted_inv needs c > 0, got {c}")));
            }
            (Kind::ShiftedInv(c), vec![c], Interval::open(-c, f64::INFINITY), true, true)
        }
        "neglog" => (no_params().map(|_| Kind::NegLog)?, vec![], positive, true, true),
        "power" => {
            let p = one_param(None)?;
            if p < 1.0 {
                return Err(Error::Argument(format!(
                    "power needs p >= 1 to be convex on [0, inf), got {p}"
                )));
            }
            (Kind::Power(p), vec![p], nonneg, true, p <= 2.0)
        }
        "linear" => {
            let a = one_param(Some(1.0))?;
            (Kind::Linear(a), vec![a], line, true, true)
        }
        _ => return Err(unknown(name)),
    };
    let mut f = ScalarFunction {
        name: name.to_string(),
        params: stored,
        kind,
        domain,
        is_convex: convex,
        is_operator_convex: op_convex,
        vanishes_at_zero: false,
    };
    f.vanishes_at_zero = f.value_at_zero() == Some(0.0);
    Ok(f)
}

/// Parses `name` or `name:param` (the CLI form).
pub fn parse_function(text: &str) -> Result<ScalarFunction> {
    let mut parts = text.split(':');
    let name = parts.next().unwrap_or_default().trim();
    let params = parts
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("bad parameter `{p}` in `{text}`")))
        })
        .collect::<Result<Vec<f64>>>()?;
    get_function(name, &params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityCheck {
    pub holds: bool,
    /// (x, y, λ) with f(λx+(1−λ)y) > λf(x)+(1−λ)f(y).
    pub witness: Option<(f64, f64, f64)>,
}

/// Samples the convexity inequality at `n_samples` random triples in a compact interval.
pub fn check_convex(
    f: &ScalarFunction,
    interval: &Interval,
    n_samples: usize,
    seed: u64,
) -> Result<ConvexityCheck> {
    let iv = interval.intersect(&f.domain());
    if !iv.is_compact() || iv.is_empty() {
        return Err(Error::Argument(format!(
            "convexity sampling needs a compact interval inside the domain, got {iv}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let draw = |rng: &mut crate::linalg::random::TrialRng| -> f64 {
        loop {
            let t = iv.lo + (iv.hi - iv.lo) * rng.random::<f64>();
            if iv.contains(t) {
                return t;
            }
        }
    };
    for _ in 0..n_samples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let lambda: f64 = rng.random();
        let (fx, fy) = (f.eval(x), f.eval(y));
        let mid = f.eval(lambda * x + (1.0 - lambda) * y);
        let chord = lambda * fx + (1.0 - lambda) * fy;
        let scale = 1f64.max(fx.abs()).max(fy.abs());
        if mid > chord + 1e-12 * scale {
            return Ok(ConvexityCheck {
                holds: false,
                witness: Some((x, y, lambda)),
            });
        }
    }
    Ok(ConvexityCheck {
        holds: true,
        witness: None,
    })
}

#[derive(Debug, Clone)]
pub enum OperatorConvexity {
    NoViolationFound,
    Violation {
        a: HermitianMatrix,
        b: HermitianMatrix,
        min_eigenvalue: f64,
    },
}

impl OperatorConvexity {
    pub fn found_violation(&self) -> bool {
        matches!(self, OperatorConvexity::Violation { .. })
    }
}

/// Sampling window for random spectra inside a function's domain.
pub(crate) fn spectrum_window(domain: &Interval) -> (f64, f64) {
    let lo = if domain.lo.is_finite() {
        domain.lo + if domain.lo_open { 0.05 } else { 0.0 }
    } else {
        -3.0
    };
    let hi = if domain.hi.is_finite() {
        domain.hi - if domain.hi_open { 0.05 } else { 0.0 }
    } else {
        lo.max(-3.0) + 6.0
    };
    (lo, hi)
}

/// Random Hermitian matrix whose spectrum is clipped into the window.
pub(crate) fn random_hermitian_in<R: Rng + ?Sized>(
    dim: usize,
    window: (f64, f64),
    rng: &mut R,
) -> Result<HermitianMatrix> {
    let (lo, hi) = window;
    let centre = 0.5 * (lo + hi);
    let spread = 0.25 * (hi - lo);
    let g = random_hermitian(dim, rng)?;
    g.map_spectrum(|l| (centre + spread * l).clamp(lo, hi))
}

/// Searches for A, B with f((A+B)/2) ⋠ (f(A)+f(B))/2.
pub fn check_operator_convex(
    f: &ScalarFunction,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<OperatorConvexity> {
    let window = spectrum_window(&f.domain());
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let a = random_hermitian_in(dim, window, &mut rng)?;
        let b = random_hermitian_in(dim, window, &mut rng)?;
        let mid = a.add(&b)?.scale(0.5);
        let fa = f.apply(&a)?;
        let fb = f.apply(&b)?;
        let chord = fa.add(&fb)?.scale(0.5);
        let gap = chord.sub(&f.apply(&mid)?)?;
        let scale = fa.eig()?.spectral_norm().max(fb.eig()?.spectral_norm()).max(1.0);
        let min_eigenvalue = gap.min_eigenvalue()?;
        if min_eigenvalue < -1e-9 * scale {
            return Ok(OperatorConvexity::Violation {
                a,
                b,
                min_eigenvalue,
            });
        }
    }
    Ok(OperatorConvexity::NoViolationFound)
}
