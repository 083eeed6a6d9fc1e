//! Spectral projections, Jordan parts, supports, generalized singular numbers, the
//! spectral pre-order, monotone/sign splitting of convex functions, pinchings and
//! projection-lattice identities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::convex_catalog::ScalarFunction;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, SpectralDecomposition, ToleranceConfig};
use crate::tensor_ops::BlockAlgebra;

/// Interval of the real line; infinite ends are stored as ±∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "extended_real")]
    pub lo: f64,
    #[serde(with = "extended_real")]
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Argument(format!("invalid interval bounds {lo} > {hi}")));
        }
        Ok(Self {
            lo,
            hi,
            lo_open: lo_open || lo == f64::NEG_INFINITY,
            hi_open: hi_open || hi == f64::INFINITY,
        })
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false).expect("closed interval bounds")
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true).expect("open interval bounds")
    }

    /// [lo, hi)
    pub fn half_open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, true).expect("half-open interval bounds")
    }

    /// (s, ∞)
    pub fn above(s: f64) -> Self {
        Self::open(s, f64::INFINITY)
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, t: f64) -> bool {
        let above_lo = if self.lo_open { t > self.lo } else { t >= self.lo };
        let below_hi = if self.hi_open { t < self.hi } else { t <= self.hi };
        above_lo && below_hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi && (self.lo_open || self.hi_open)
    }

    pub fn is_compact(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Overlap with `other` (possibly empty).
    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_open) = if self.lo > other.lo {
            (self.lo, self.lo_open)
        } else if other.lo > self.lo {
            (other.lo, other.lo_open)
        } else {
            (self.lo, self.lo_open || other.lo_open)
        };
        let (hi, hi_open) = if self.hi < other.hi {
            (self.hi, self.hi_open)
        } else if other.hi < self.hi {
            (other.hi, other.hi_open)
        } else {
            (self.hi, self.hi_open || other.hi_open)
        };
        if lo > hi {
            Interval::half_open(lo, lo)
        } else {
            Interval::new(lo, hi, lo_open, hi_open).expect("ordered bounds")
        }
    }

    fn finite_endpoints(&self) -> impl Iterator<Item = f64> + '_ {
        [self.lo, self.hi].into_iter().filter(|e| e.is_finite())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// JSON has no infinities; ±∞ travel as the strings "-inf" / "inf".
mod extended_real {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Text(t) => Err(D::Error::custom(format!("bad interval endpoint {t:?}"))),
        }
    }
}

/// Groups of ascending eigenvalues closer than `gap` to their neighbour.
fn clusters(sorted: &[f64], gap: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > gap {
            out.push((start, i));
            start = i;
        }
    }
    out
}

fn cluster_gap(spec: &SpectralDecomposition, tol: &ToleranceConfig) -> f64 {
    tol.eig_cluster_tol * spec.spectral_norm().max(1.0)
}

/// e_I(H): projection onto the eigenvectors whose (clustered) eigenvalue lies in `interval`.
pub fn spectral_projection(
    h: &HermitianMatrix,
    interval: &Interval,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    spectral_projection_of(&h.eig()?, interval, tol)
}

pub fn spectral_projection_of(
    spec: &SpectralDecomposition,
    interval: &Interval,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    let gap = cluster_gap(spec, tol);
    let ev = &spec.eigenvalues;
    let mut keep = vec![false; ev.len()];
    for (s, e) in clusters(ev, gap) {
        let (cmin, cmax) = (ev[s], ev[e - 1]);
        for endpoint in interval.finite_endpoints() {
            if cmin - gap <= endpoint && endpoint <= cmax + gap {
                return Err(Error::BoundaryAmbiguity {
                    eigenvalue: 0.5 * (cmin + cmax),
                    endpoint,
                });
            }
        }
        let rep = ev[s..e].iter().sum::<f64>() / (e - s) as f64;
        if interval.contains(rep) {
            keep[s..e].iter_mut().for_each(|k| *k = true);
        }
    }
    Ok(spec.projection_where(|k| keep[k]))
}

/// x = x₊ − x₋ with x± ⪰ 0 and x₊x₋ = 0.
pub fn jordan_split(h: &HermitianMatrix) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let spec = h.eig()?;
    Ok((spec.apply(|l| l.max(0.0)), spec.apply(|l| (-l).max(0.0))))
}

pub fn positive_part(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(jordan_split(h)?.0)
}

pub fn negative_part(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(jordan_split(h)?.1)
}

/// Relative cutoff on σ² for supports and ranks.
pub const RANK_TOL: f64 = 1e-11;

/// Least projection p with x·p = x: the projection onto the row space of x.
pub fn support_projection(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let gram = HermitianMatrix::new(x.adjoint().try_matmul(x)?)?;
    let spec = gram.eig()?;
    // Thresholding the Gram spectrum: σ² below RANK_TOL·σ²_max counts as zero.
    let top = spec.max().max(0.0);
    let cutoff = RANK_TOL * top;
    Ok(spec.projection_where(|k| top > 0.0 && spec.eigenvalues[k] > cutoff))
}

/// Rank of a projection, read off its trace.
pub fn projection_rank(p: &ComplexMatrix) -> usize {
    p.trace().re.round().max(0.0) as usize
}

/// μ_t as a right-continuous step function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    /// Ascending, starting at 0; one more entry than `values`.
    pub breakpoints: Vec<f64>,
    /// Nonincreasing and strictly positive; the function is 0 past the last breakpoint.
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return f64::NAN;
        }
        for (i, &v) in self.values.iter().enumerate() {
            if t < self.breakpoints[i + 1] {
                return v;
            }
        }
        0.0
    }

    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(v, w)| v * (w[1] - w[0]))
            .sum()
    }

    pub fn support_end(&self) -> f64 {
        *self.breakpoints.last().unwrap_or(&0.0)
    }
}

/// μ_t(x) = inf{λ > 0 : τ(e_λ(|x|)) ≤ t}: singular values in descending order, each
/// occupying a t-interval as long as its block's trace weight.
pub fn singular_value_function(x: &ComplexMatrix, algebra: &BlockAlgebra) -> Result<StepFunction> {
    let mut weighted: Vec<(f64, f64)> = Vec::new();
    for (block, &w) in algebra.blocks(x)?.iter().zip(algebra.trace_weights()) {
        let gram = HermitianMatrix::new(block.adjoint().try_matmul(block)?)?;
        for l in gram.eig()?.eigenvalues {
            let s = l.max(0.0).sqrt();
            if s > 0.0 {
                weighted.push((s, w));
            }
        }
    }
    weighted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut breakpoints = vec![0.0];
    let mut values = Vec::with_capacity(weighted.len());
    let mut t = 0.0;
    for (s, w) in weighted {
        t += w;
        breakpoints.push(t);
        values.push(s);
    }
    Ok(StepFunction { breakpoints, values })
}

/// A level s at which a ≲ b fails in block `block`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreorderViolation {
    pub block: usize,
    pub s: f64,
    pub rank_a: usize,
    pub rank_b: usize,
}

/// First level s where rank e_(s,∞)(a_k) > rank e_(s,∞)(b_k), if any.
///
/// Eigenvalues of a_k and b_k are merged and clustered; s runs over one point below
/// the smallest cluster and the midpoints between consecutive clusters, which is
/// exhaustive because the counting functions only jump at eigenvalues.
pub fn preorder_violation(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    algebra: &BlockAlgebra,
    tol: &ToleranceConfig,
) -> Result<Option<PreorderViolation>> {
    let a_blocks = algebra.hermitian_blocks(a)?;
    let b_blocks = algebra.hermitian_blocks(b)?;
    for (k, (ak, bk)) in a_blocks.iter().zip(&b_blocks).enumerate() {
        let ea = ak.eig()?.eigenvalues;
        let eb = bk.eig()?.eigenvalues;
        let mut merged: Vec<(f64, bool)> = ea
            .iter()
            .map(|&l| (l, true))
            .chain(eb.iter().map(|&l| (l, false)))
            .collect();
        merged.sort_by(|x, y| x.0.total_cmp(&y.0));
        let values: Vec<f64> = merged.iter().map(|m| m.0).collect();
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let groups = clusters(&values, tol.eig_cluster_tol * scale);

        let mut above_a = ea.len();
        let mut above_b = eb.len();
        let mut s = values[0] - 1.0;
        for (gi, &(start, end)) in groups.iter().enumerate() {
            if above_a > above_b {
                return Ok(Some(PreorderViolation {
                    block: k,
                    s,
                    rank_a: above_a,
                    rank_b: above_b,
                }));
            }
            for m in &merged[start..end] {
                if m.1 {
                    above_a -= 1;
                } else {
                    above_b -= 1;
                }
            }
            s = match groups.get(gi + 1) {
                Some(&(next, _)) => 0.5 * (values[end - 1] + values[next]),
                None => values[end - 1] + 1.0,
            };
        }
    }
    Ok(None)
}

/// a ≲ b in the spectral pre-order, decided blockwise by ranks.
pub fn preorder_leq(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    algebra: &BlockAlgebra,
    tol: &ToleranceConfig,
) -> Result<bool> {
    Ok(preorder_violation(a, b, algebra, tol)?.is_none())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Nonnegative,
    Nonpositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Decreasing,
    Increasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    DecreasingAtOrigin,
    IncreasingAtOrigin,
}

/// An interval on which f keeps one sign and one monotonicity direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub interval: Interval,
    pub sign: Sign,
    pub direction: Direction,
}

/// Four pieces I₁..I₄ partitioning the real line (and so the working interval):
/// positive decreasing, negative decreasing, negative increasing, positive increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneSplit {
    pub working: Interval,
    /// Minimizer of f on the working interval.
    pub t1: f64,
    /// Right zero of f (equal to `t1` when f has no negative values).
    pub t2: f64,
    /// Left zero of f (equal to `t1` when f has no negative values).
    pub t0: f64,
    pub pieces: [Piece; 4],
    pub orientation: Orientation,
}

impl MonotoneSplit {
    /// Pieces that meet the working interval.
    pub fn nonempty_pieces(&self) -> impl Iterator<Item = (usize, &Piece)> {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.interval.intersect(&self.working).is_empty())
    }

    /// Sampled check that f has the recorded sign and direction on every piece.
    pub fn verify(&self, f: &ScalarFunction, samples: usize) -> Result<bool> {
        for (_, piece) in self.nonempty_pieces() {
            if !piece_is_consistent(f, piece, &self.working, samples)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Samples f on `piece ∩ window` and checks the recorded sign and direction.
pub fn piece_is_consistent(
    f: &ScalarFunction,
    piece: &Piece,
    window: &Interval,
    samples: usize,
) -> Result<bool> {
    let iv = piece.interval.intersect(window);
    if iv.is_empty() {
        return Ok(true);
    }
    let n = samples.max(2);
    let pts: Vec<f64> = (0..n)
        .map(|i| {
            let t = iv.lo + (iv.hi - iv.lo) * i as f64 / (n - 1) as f64;
            // stay inside half-open ends
            if i == n - 1 && iv.hi_open {
                iv.hi - 1e-9 * iv.length().max(1e-300)
            } else {
                t
            }
        })
        .collect();
    let vals = pts
        .iter()
        .map(|&t| f.eval_on_spectrum(t))
        .collect::<Result<Vec<f64>>>()?;
    let scale = vals.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let slack = 1e-9 * scale;
    let sign_ok = vals.iter().all(|&v| match piece.sign {
        Sign::Nonnegative => v >= -slack,
        Sign::Nonpositive => v <= slack,
    });
    let dir_ok = vals.windows(2).all(|w| match piece.direction {
        Direction::Increasing => w[1] >= w[0] - slack,
        Direction::Decreasing => w[1] <= w[0] + slack,
    });
    Ok(sign_ok && dir_ok)
}

const CONVEXITY_SAMPLES: usize = 65;

/// Splits a convex f on a compact working interval at its minimizer and its sign changes.
pub fn monotone_sign_split(f: &ScalarFunction, working: Interval) -> Result<MonotoneSplit> {
    if !working.is_compact() {
        return Err(Error::Argument(format!("working interval {working} must be compact")));
    }
    let (lo, hi) = (working.lo, working.hi);
    let eval = |t: f64| f.eval_on_spectrum(t);

    // Non-unimodal samples rule out convexity.
    let pts: Vec<f64> = (0..CONVEXITY_SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / (CONVEXITY_SAMPLES - 1) as f64)
        .collect();
    let vals = pts.iter().map(|&t| eval(t)).collect::<Result<Vec<f64>>>()?;
    let scale = vals.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if vals
        .windows(3)
        .any(|w| w[0] - 2.0 * w[1] + w[2] < -1e-9 * scale)
    {
        return Err(Error::NotConvex(f.name().to_string()));
    }

    // Ternary search; ties move right end left so flat minima resolve to their left edge.
    let (mut a, mut b) = (lo, hi);
    let stop = 1e-12 * (hi - lo);
    while b - a > stop {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if eval(m1)? <= eval(m2)? {
            b = m2;
        } else {
            a = m1;
        }
        if m1 == a && m2 == b {
            break;
        }
    }
    let mut t_min = a;
    let mut f_min = eval(a)?;
    for t in [0.5 * (a + b), b] {
        let v = eval(t)?;
        if v < f_min {
            t_min = t;
            f_min = v;
        }
    }
    // Flat bottoms of smooth minima are ~√ε wide; a parabola through nearby samples
    // recovers the vertex.
    let h = 1e-3 * (hi - lo);
    if t_min - h >= lo && t_min + h <= hi {
        let (fl, fr) = (eval(t_min - h)?, eval(t_min + h)?);
        let curv = fl - 2.0 * f_min + fr;
        if curv > 0.0 {
            let vertex = t_min + 0.5 * h * (fl - fr) / curv;
            if (vertex - t_min).abs() <= h {
                let fv = eval(vertex)?;
                if fv <= f_min {
                    t_min = vertex;
                    f_min = fv;
                }
            }
        }
    }

    let (t0, t2) = if f_min < 0.0 {
        let left = if eval(lo)? > 0.0 { bisect_zero(&eval, lo, t_min)? } else { lo };
        let right = if eval(hi)? > 0.0 { bisect_zero(&eval, t_min, hi)? } else { hi };
        (left, right)
    } else {
        (t_min, t_min)
    };

    let pieces = [
        Piece {
            interval: Interval::open(f64::NEG_INFINITY, t0),
            sign: Sign::Nonnegative,
            direction: Direction::Decreasing,
        },
        Piece {
            interval: Interval::half_open(t0, t_min),
            sign: Sign::Nonpositive,
            direction: Direction::Decreasing,
        },
        Piece {
            interval: Interval::half_open(t_min, t2),
            sign: Sign::Nonpositive,
            direction: Direction::Increasing,
        },
        Piece {
            interval: Interval::half_open(t2, f64::INFINITY),
            sign: Sign::Nonnegative,
            direction: Direction::Increasing,
        },
    ];
    Ok(MonotoneSplit {
        working,
        t1: t_min,
        t2,
        t0,
        pieces,
        orientation: if t_min > 0.0 {
            Orientation::DecreasingAtOrigin
        } else {
            Orientation::IncreasingAtOrigin
        },
    })
}

/// Zero of a monotone function with a sign change on [a, b].
fn bisect_zero(eval: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let fa = eval(a)?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = eval(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

const PROJECTION_TOL: f64 = 1e-10;

fn projection_defect(p: &ComplexMatrix) -> Result<f64> {
    let sq = p.try_matmul(p)?;
    Ok((&sq - p).frobenius_norm().max(p.hermiticity_defect()))
}

/// E(y) = Σ p_i y p_i for a resolution of the identity {p_i}.
pub fn pinching(x: &ComplexMatrix, projections: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let n = x.rows();
    if !x.is_square() {
        return Err(Error::dim("pinching needs a square matrix"));
    }
    if projections.is_empty() {
        return Err(Error::Partition("no projections given".into()));
    }
    let mut sum = ComplexMatrix::zeros(n, n);
    for (i, p) in projections.iter().enumerate() {
        if p.shape() != (n, n) {
            return Err(Error::dim(format!("projection {i} has shape {:?}", p.shape())));
        }
        let defect = projection_defect(p)?;
        if defect > PROJECTION_TOL {
            return Err(Error::Partition(format!("p_{i} is not a projection (defect {defect:.2e})")));
        }
        for (j, q) in projections.iter().enumerate().skip(i + 1) {
            let overlap = p.try_matmul(q)?.frobenius_norm();
            if overlap > PROJECTION_TOL {
                return Err(Error::Partition(format!("p_{i} p_{j} = {overlap:.2e} is not zero")));
            }
        }
        sum = &sum + p;
    }
    let defect = (&sum - &ComplexMatrix::identity(n)).frobenius_norm();
    if defect > PROJECTION_TOL {
        return Err(Error::Partition(format!("projections sum to 1 only within {defect:.2e}")));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for p in projections {
        out = &out + &(&(p * x) * p);
    }
    Ok(out)
}

/// Absolute cutoff on the spectrum of a sum of two projections, which lies in [0, 2].
const PROJECTION_SUM_TOL: f64 = 1e-10;

fn projection_sum_support(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = HermitianMatrix::new(s.hermitian_part())?.eig()?;
    Ok(spec.projection_where(|k| spec.eigenvalues[k] > PROJECTION_SUM_TOL))
}

/// p∨q as the support of p + q.
pub fn projection_join(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<ComplexMatrix> {
    projection_sum_support(&p.try_add(q)?)
}

/// p∧q as the kernel projection of (1 − p) + (1 − q).
pub fn projection_meet(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = p.rows();
    let one = ComplexMatrix::identity(n);
    let complement_sum = (&one - p).try_add(&(&one - q))?;
    Ok(&one - &projection_sum_support(&complement_sum)?)
}

/// Ranks appearing in p∨q − p ∼ q − p∧q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KaplanskyRanks {
    pub join: usize,
    pub p: usize,
    pub q: usize,
    pub meet: usize,
}

impl KaplanskyRanks {
    pub fn holds(&self) -> bool {
        self.join + self.meet == self.p + self.q && self.join >= self.p && self.q >= self.meet
    }
}

pub fn kaplansky_ranks(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<KaplanskyRanks> {
    if p.shape() != q.shape() || !p.is_square() {
        return Err(Error::dim("projections must be square and of equal size"));
    }
    for (name, m) in [("p", p), ("q", q)] {
        let defect = projection_defect(m)?;
        if defect > PROJECTION_TOL {
            return Err(Error::Argument(format!("{name} is not a projection (defect {defect:.2e})")));
        }
    }
    Ok(KaplanskyRanks {
        join: projection_rank(&projection_join(p, q)?),
        p: projection_rank(p),
        q: projection_rank(q),
        meet: projection_rank(&projection_meet(p, q)?),
    })
}

/// rank(p∨q) − rank(p) == rank(q) − rank(p∧q).
pub fn kaplansky_verify(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<bool> {
    Ok(kaplansky_ranks(p, q)?.holds())
}
