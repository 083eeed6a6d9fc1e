//! Positive linear maps between full matrix algebras.
//!
//! Two representations: Kraus form Φ(x) = Σ V_k* x V_k (completely positive), and a
//! generic action matrix on column-major vectorizations, vec(x)[i + j·n] = x[i, j],
//! which also covers positive maps without a Kraus form such as the transpose.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::random::{random_resolution, random_unitary, rng_from_seed, TrialRng};
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64, ZERO};
use crate::tensor_ops::TensorSpace;

/// Unitality and contractivity tolerance on Φ(1).
pub const FLAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapRep {
    /// Each V_k is in_dim × out_dim.
    Kraus(Vec<ComplexMatrix>),
    /// out_dim² × in_dim² action on column-major vectorizations.
    Generic(ComplexMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositiveMap {
    pub kind: String,
    pub in_dim: usize,
    pub out_dim: usize,
    pub rep: MapRep,
    pub claimed_positive: bool,
    pub claimed_unital: bool,
    pub claimed_contractive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    UcpStinespring,
    Transpose,
    Pinching,
    ScaledContractive,
    Zero,
}

impl MapKind {
    pub const ALL: [MapKind; 5] = [
        MapKind::UcpStinespring,
        MapKind::Transpose,
        MapKind::Pinching,
        MapKind::ScaledContractive,
        MapKind::Zero,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MapKind::UcpStinespring => "ucp_stinespring",
            MapKind::Transpose => "transpose",
            MapKind::Pinching => "pinching",
            MapKind::ScaledContractive => "scaled_contractive",
            MapKind::Zero => "zero",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::Argument(format!(
                    "unknown map kind `{s}`; valid kinds: {}",
                    Self::ALL.map(|k| k.as_str()).join(", ")
                ))
            })
    }

    /// Maps of this kind satisfy Φ(1) = 1.
    pub fn is_unital(&self) -> bool {
        matches!(
            self,
            MapKind::UcpStinespring | MapKind::Transpose | MapKind::Pinching
        )
    }

    /// Transpose and pinching act on a single algebra.
    pub fn is_endomorphism(&self) -> bool {
        matches!(self, MapKind::Transpose | MapKind::Pinching)
    }
}

fn vec_index(i: usize, j: usize, n: usize) -> usize {
    i + j * n
}

impl PositiveMap {
    pub fn identity(n: usize) -> Self {
        Self {
            kind: "identity".into(),
            in_dim: n,
            out_dim: n,
            rep: MapRep::Kraus(vec![ComplexMatrix::identity(n)]),
            claimed_positive: true,
            claimed_unital: true,
            claimed_contractive: true,
        }
    }

    pub fn zero(in_dim: usize, out_dim: usize) -> Self {
        Self {
            kind: "zero".into(),
            in_dim,
            out_dim,
            rep: MapRep::Kraus(Vec::new()),
            claimed_positive: true,
            claimed_unital: false,
            claimed_contractive: true,
        }
    }

    /// x ↦ xᵀ: positive and unital but not completely positive.
    pub fn transpose(n: usize) -> Self {
        let n2 = n * n;
        let mut action = ComplexMatrix::zeros(n2, n2);
        for i in 0..n {
            for j in 0..n {
                action[(vec_index(i, j, n), vec_index(j, i, n))] = C64::new(1.0, 0.0);
            }
        }
        Self {
            kind: "transpose".into(),
            in_dim: n,
            out_dim: n,
            rep: MapRep::Generic(action),
            claimed_positive: true,
            claimed_unital: true,
            claimed_contractive: true,
        }
    }

    /// Φ(x) = V*(x⊗1_e)V for an isometry V: C^{out} → C^{in}⊗C^{e}.
    pub fn stinespring(isometry: &ComplexMatrix, in_dim: usize, env: usize) -> Result<Self> {
        if isometry.rows() != in_dim * env {
            return Err(Error::dim(format!(
                "isometry has {} rows, expected {in_dim}·{env}",
                isometry.rows()
            )));
        }
        let out_dim = isometry.cols();
        let space = TensorSpace::new(in_dim, env)?;
        let kraus = (0..env)
            .map(|k| {
                ComplexMatrix::from_fn(in_dim, out_dim, |i, j| isometry[(i * space.d2 + k, j)])
            })
            .collect();
        Ok(Self {
            kind: "ucp_stinespring".into(),
            in_dim,
            out_dim,
            rep: MapRep::Kraus(kraus),
            claimed_positive: true,
            claimed_unital: true,
            claimed_contractive: true,
        })
    }

    /// Σ p_i x p_i.
    pub fn pinching(projections: Vec<ComplexMatrix>) -> Result<Self> {
        let n = projections
            .first()
            .ok_or_else(|| Error::Partition("no projections".into()))?
            .rows();
        Ok(Self {
            kind: "pinching".into(),
            in_dim: n,
            out_dim: n,
            rep: MapRep::Kraus(projections),
            claimed_positive: true,
            claimed_unital: true,
            claimed_contractive: true,
        })
    }

    pub fn from_kraus(kind: &str, kraus: Vec<ComplexMatrix>, in_dim: usize, out_dim: usize) -> Result<Self> {
        if let Some(v) = kraus.iter().find(|v| v.shape() != (in_dim, out_dim)) {
            return Err(Error::dim(format!(
                "Kraus operator of shape {:?}, expected {in_dim}x{out_dim}",
                v.shape()
            )));
        }
        let mut map = Self {
            kind: kind.into(),
            in_dim,
            out_dim,
            rep: MapRep::Kraus(kraus),
            claimed_positive: true,
            claimed_unital: false,
            claimed_contractive: false,
        };
        let one = map.apply_unit()?;
        map.claimed_unital = is_unital_image(&one);
        map.claimed_contractive = is_contractive_image(&one)?;
        Ok(map)
    }

    /// c·Φ. Positivity is kept for c ≥ 0.
    pub fn scaled(&self, c: f64, kind: &str) -> Result<Self> {
        let rep = match &self.rep {
            MapRep::Kraus(ks) if c >= 0.0 => MapRep::Kraus(ks.iter().map(|v| v.scale(c.sqrt())).collect()),
            _ => MapRep::Generic(self.action_matrix()?.scale(c)),
        };
        let mut out = Self {
            kind: kind.into(),
            rep,
            claimed_positive: self.claimed_positive && c >= 0.0,
            claimed_unital: false,
            claimed_contractive: false,
            ..self.clone()
        };
        let one = out.apply_unit()?;
        out.claimed_unital = is_unital_image(&one);
        out.claimed_contractive = out.claimed_positive && is_contractive_image(&one)?;
        Ok(out)
    }

    /// x ↦ Σ_k p_k Φ(x) p_k, forcing outputs into a block-diagonal subalgebra.
    pub fn then_pinch(&self, projections: &[ComplexMatrix]) -> Result<Self> {
        let rep = match &self.rep {
            MapRep::Kraus(ks) => MapRep::Kraus(
                ks.iter()
                    .flat_map(|v| projections.iter().map(move |p| v.try_matmul(p)))
                    .collect::<Result<Vec<_>>>()?,
            ),
            MapRep::Generic(_) => {
                let pinch = PositiveMap::pinching(projections.to_vec())?;
                MapRep::Generic(pinch.action_matrix()?.try_matmul(&self.action_matrix()?)?)
            }
        };
        Ok(Self {
            rep,
            ..self.clone()
        })
    }

    /// Column-major action matrix of the map (out_dim² × in_dim²).
    pub fn action_matrix(&self) -> Result<ComplexMatrix> {
        if let MapRep::Generic(m) = &self.rep {
            return Ok(m.clone());
        }
        let (n, m) = (self.in_dim, self.out_dim);
        let mut action = ComplexMatrix::zeros(m * m, n * n);
        for i in 0..n {
            for j in 0..n {
                let mut unit = ComplexMatrix::zeros(n, n);
                unit[(i, j)] = C64::new(1.0, 0.0);
                let image = apply_map(self, &unit)?;
                for k in 0..m {
                    for l in 0..m {
                        action[(vec_index(k, l, m), vec_index(i, j, n))] = image[(k, l)];
                    }
                }
            }
        }
        Ok(action)
    }

    /// Φ(1).
    pub fn apply_unit(&self) -> Result<ComplexMatrix> {
        apply_map(self, &ComplexMatrix::identity(self.in_dim))
    }

    /// Choi matrix Σ_{ij} e_ij ⊗ Φ(e_ij).
    pub fn choi_matrix(&self) -> Result<HermitianMatrix> {
        let (n, m) = (self.in_dim, self.out_dim);
        let mut choi = ComplexMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                let mut unit = ComplexMatrix::zeros(n, n);
                unit[(i, j)] = C64::new(1.0, 0.0);
                let image = apply_map(self, &unit)?;
                choi.set_submatrix(i * m, j * m, &image);
            }
        }
        HermitianMatrix::new(choi)
    }

    pub fn apply_hermitian(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        HermitianMatrix::new(apply_map(self, x)?)
    }
}

fn is_unital_image(one: &ComplexMatrix) -> bool {
    (one - &ComplexMatrix::identity(one.rows())).frobenius_norm() <= FLAG_TOL
}

fn is_contractive_image(one: &ComplexMatrix) -> Result<bool> {
    Ok(HermitianMatrix::new(one.clone())?.max_eigenvalue()? <= 1.0 + FLAG_TOL)
}

/// Φ(x).
pub fn apply_map(map: &PositiveMap, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.shape() != (map.in_dim, map.in_dim) {
        return Err(Error::dim(format!(
            "map expects {0}x{0} input, got {1}x{2}",
            map.in_dim,
            x.rows(),
            x.cols()
        )));
    }
    match &map.rep {
        MapRep::Kraus(ks) => {
            let mut out = ComplexMatrix::zeros(map.out_dim, map.out_dim);
            for v in ks {
                let term = v.adjoint().try_matmul(&x.try_matmul(v)?)?;
                out = out.try_add(&term)?;
            }
            Ok(out)
        }
        MapRep::Generic(action) => {
            let (n, m) = (map.in_dim, map.out_dim);
            let mut out = ComplexMatrix::zeros(m, m);
            for k in 0..m {
                for l in 0..m {
                    let row = vec_index(k, l, m);
                    let mut acc = ZERO;
                    for i in 0..n {
                        for j in 0..n {
                            let c = action[(row, vec_index(i, j, n))];
                            if c != ZERO {
                                acc += c * x[(i, j)];
                            }
                        }
                    }
                    out[(k, l)] = acc;
                }
            }
            Ok(out)
        }
    }
}

/// Φ(X) = (τ₁⊗id)((a*⊗1)X(a⊗1)) as a Kraus map M_{d1d2} → M_{d2}, i.e. the slice
/// map L_ω for ω(y) = τ₁(a*ya). Kraus operators: V_i = √w1·(a⊗1)(e_i⊗1).
pub fn slice_compress_map(a: &ComplexMatrix, space: TensorSpace, w1: f64) -> Result<PositiveMap> {
    if a.shape() != (space.d1, space.d1) {
        return Err(Error::dim(format!(
            "compressing element must be {0}x{0}, got {1:?}",
            space.d1,
            a.shape()
        )));
    }
    if !(w1 > 0.0) {
        return Err(Error::Argument(format!("trace weight must be positive, got {w1}")));
    }
    let (d1, d2) = (space.d1, space.d2);
    let root = w1.sqrt();
    let kraus = (0..d1)
        .map(|i| {
            ComplexMatrix::from_fn(d1 * d2, d2, |row, l| {
                let (j, k) = (row / d2, row % d2);
                if k == l {
                    a[(j, i)] * root
                } else {
                    ZERO
                }
            })
        })
        .collect();
    let hs: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let mass = w1 * hs;
    Ok(PositiveMap {
        kind: "slice_compress".into(),
        in_dim: d1 * d2,
        out_dim: d2,
        rep: MapRep::Kraus(kraus),
        claimed_positive: true,
        claimed_unital: (mass - 1.0).abs() <= FLAG_TOL,
        claimed_contractive: mass <= 1.0 + FLAG_TOL,
    })
}

/// Random isometry C^{cols} → C^{rows} (first columns of a Haar unitary).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if cols > rows {
        return Err(Error::dim(format!("no isometry from C^{cols} into C^{rows}")));
    }
    let u = random_unitary(rows, rng)?;
    Ok(u.submatrix(0, 0, rows, cols))
}

/// Generates a map of the given kind. Endomorphism kinds use `out_dim` for both sides.
pub fn random_positive_map_with<R: Rng + ?Sized>(
    kind: MapKind,
    in_dim: usize,
    out_dim: usize,
    rng: &mut R,
) -> Result<PositiveMap> {
    if in_dim == 0 || out_dim == 0 {
        return Err(Error::dim("map dimensions must be positive"));
    }
    match kind {
        MapKind::UcpStinespring => {
            let env = out_dim.div_ceil(in_dim).max(2);
            let v = random_isometry(in_dim * env, out_dim, rng)?;
            PositiveMap::stinespring(&v, in_dim, env)
        }
        MapKind::Transpose => Ok(PositiveMap::transpose(out_dim)),
        MapKind::Pinching => {
            let parts = rng.random_range(1..=out_dim);
            PositiveMap::pinching(random_resolution(out_dim, parts, rng)?)
        }
        MapKind::ScaledContractive => {
            let env = out_dim.div_ceil(in_dim).max(2);
            let v = random_isometry(in_dim * env, out_dim, rng)?;
            let base = PositiveMap::stinespring(&v, in_dim, env)?;
            // c uniform on (0, 1)
            let c = loop {
                let c: f64 = rng.random();
                if c > 0.0 {
                    break c;
                }
            };
            base.scaled(c, "scaled_contractive")
        }
        MapKind::Zero => Ok(PositiveMap::zero(in_dim, out_dim)),
    }
}

pub fn random_positive_map(kind: MapKind, in_dim: usize, out_dim: usize, seed: u64) -> Result<PositiveMap> {
    let mut rng: TrialRng = rng_from_seed(seed);
    random_positive_map_with(kind, in_dim, out_dim, &mut rng)
}

/// Unital, Hermiticity-preserving, generally non-positive map (1+s)Ψ₁ − sΨ₂ with
/// UCP Ψ₁, Ψ₂ and s in (0.5, 2).
pub fn random_hermiticity_preserving_map<R: Rng + ?Sized>(
    in_dim: usize,
    out_dim: usize,
    rng: &mut R,
) -> Result<PositiveMap> {
    let p1 = random_positive_map_with(MapKind::UcpStinespring, in_dim, out_dim, rng)?;
    let p2 = random_positive_map_with(MapKind::UcpStinespring, in_dim, out_dim, rng)?;
    let s = 0.5 + 1.5 * rng.random::<f64>();
    let action = p1
        .action_matrix()?
        .scale(1.0 + s)
        .try_sub(&p2.action_matrix()?.scale(s))?;
    Ok(PositiveMap {
        kind: "hermiticity_preserving".into(),
        in_dim,
        out_dim,
        rep: MapRep::Generic(action),
        claimed_positive: false,
        claimed_unital: true,
        claimed_contractive: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFlags {
    pub unital: bool,
    pub contractive: bool,
    pub positivity_sampled: bool,
}

/// Decides unitality and contractivity from Φ(1) and samples positivity on random xx*.
pub fn map_flags(map: &PositiveMap, trials: usize, seed: u64) -> Result<MapFlags> {
    let one = map.apply_unit()?;
    let unital = is_unital_image(&one);
    let mut rng = rng_from_seed(seed);
    let mut positive = true;
    for _ in 0..trials {
        let g = crate::linalg::random::gaussian_matrix(map.in_dim, map.in_dim, &mut rng);
        let xx = g.try_matmul(&g.adjoint())?;
        let image = HermitianMatrix::new(apply_map(map, &xx)?)?;
        let scale = xx.frobenius_norm().max(1.0);
        if image.min_eigenvalue()? < -1e-10 * scale {
            positive = false;
            break;
        }
    }
    // For positive maps contractivity is Φ(1) ⪯ 1.
    let contractive = positive && is_contractive_image(&one)?;
    Ok(MapFlags {
        unital,
        contractive,
        positivity_sampled: positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{gaussian_matrix, random_hermitian};
    use crate::tensor_ops::{conjugate_compress, partial_trace, TraceSide};

    #[test]
    fn identity_and_isometry_kraus() {
        let x = gaussian_matrix(3, 3, &mut rng_from_seed(1));
        assert_eq!(apply_map(&PositiveMap::identity(3), &x).unwrap(), x);
        let v = random_isometry(3, 2, &mut rng_from_seed(2)).unwrap();
        let map = PositiveMap::from_kraus("iso", vec![v.clone()], 3, 2).unwrap();
        let expected = &(&v.adjoint() * &x) * &v;
        assert!(apply_map(&map, &x).unwrap().approx_eq(&expected, 1e-14));
        assert!(map.claimed_unital);
    }

    #[test]
    fn transpose_of_matrix_unit() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(apply_map(&PositiveMap::transpose(2), &x).unwrap(), expected);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let map = PositiveMap::identity(2);
        assert!(matches!(
            apply_map(&map, &ComplexMatrix::identity(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn hermitian_in_hermitian_out() {
        let mut rng = rng_from_seed(3);
        let x = random_hermitian(3, &mut rng).unwrap();
        for kind in MapKind::ALL {
            let map = random_positive_map_with(kind, 3, 3, &mut rng).unwrap();
            let y = apply_map(&map, &x).unwrap();
            assert!(y.hermiticity_defect() <= 1e-11, "{kind:?}");
        }
    }

    #[test]
    fn slice_compress_is_unital_for_normalized_a() {
        let s = TensorSpace::new(2, 3).unwrap();
        let a = crate::linalg::random::random_l2_normalized(2, 1.0, &mut rng_from_seed(4)).unwrap();
        let map = slice_compress_map(&a, s, 1.0).unwrap();
        assert!(map.claimed_unital);
        let one = map.apply_unit().unwrap();
        assert!(one.approx_eq(&ComplexMatrix::identity(3), 1e-12));
    }

    #[test]
    fn slice_compress_on_elementary_tensor_and_unit() {
        let mut rng = rng_from_seed(5);
        let s = TensorSpace::new(2, 2).unwrap();
        let a = gaussian_matrix(2, 2, &mut rng);
        let (big_a, big_b) = (gaussian_matrix(2, 2, &mut rng), gaussian_matrix(2, 2, &mut rng));
        let w1 = 1.3;
        let map = slice_compress_map(&a, s, w1).unwrap();
        let got = apply_map(&map, &big_a.kron(&big_b)).unwrap();
        let coeff = (&(&a.adjoint() * &big_a) * &a).trace() * w1;
        assert!(got.approx_eq(&big_b.scale_c(coeff), 1e-12));

        let unit = map.apply_unit().unwrap();
        let mass = (&a.adjoint() * &a).trace().re * w1;
        assert!(unit.approx_eq(&ComplexMatrix::identity(2).scale(mass), 1e-12));
        assert_eq!(map.claimed_contractive, mass <= 1.0);
    }

    #[test]
    fn slice_compress_matches_partial_trace_route() {
        let mut rng = rng_from_seed(6);
        let s = TensorSpace::new(3, 2).unwrap();
        let a = gaussian_matrix(3, 3, &mut rng);
        let x = gaussian_matrix(6, 6, &mut rng);
        let map = slice_compress_map(&a, s, 0.4).unwrap();
        let via_map = apply_map(&map, &x).unwrap();
        let via_ops = partial_trace(&conjugate_compress(&x, &a, s).unwrap(), TraceSide::TraceFirst, s, (0.4, 1.0)).unwrap();
        assert!(via_map.approx_eq(&via_ops, 1e-11));
    }

    #[test]
    fn ucp_maps_are_unital_across_seeds() {
        for seed in 0..100 {
            let map = random_positive_map(MapKind::UcpStinespring, 3, 2, seed).unwrap();
            let one = map.apply_unit().unwrap();
            assert!((&one - &ComplexMatrix::identity(2)).frobenius_norm() <= 1e-10);
        }
    }

    #[test]
    fn transpose_is_positive_but_not_completely_positive() {
        let t = PositiveMap::transpose(2);
        let flags = map_flags(&t, 200, 7).unwrap();
        assert!(flags.positivity_sampled && flags.unital && flags.contractive);
        // Choi matrix of the transpose is the swap, with eigenvalue −1.
        let min = t.choi_matrix().unwrap().min_eigenvalue().unwrap();
        assert!((min + 1.0).abs() < 1e-12);
        let ucp = random_positive_map(MapKind::UcpStinespring, 2, 2, 3).unwrap();
        assert!(ucp.choi_matrix().unwrap().min_eigenvalue().unwrap() > -1e-12);
    }

    #[test]
    fn flag_examples() {
        let flags = map_flags(&PositiveMap::identity(3), 50, 1).unwrap();
        assert!(flags.unital && flags.contractive && flags.positivity_sampled);
        let z = PositiveMap::zero(3, 2);
        let flags = map_flags(&z, 50, 1).unwrap();
        assert!(flags.contractive && !flags.unital);
        assert_eq!(z.apply_unit().unwrap().max_abs(), 0.0);
        for seed in 0..50 {
            let m = random_positive_map(MapKind::ScaledContractive, 2, 3, seed).unwrap();
            let flags = map_flags(&m, 20, seed).unwrap();
            assert!(flags.contractive && !flags.unital, "seed {seed}");
        }
    }

    #[test]
    fn generic_and_kraus_routes_agree() {
        let mut rng = rng_from_seed(8);
        let map = random_positive_map_with(MapKind::UcpStinespring, 2, 3, &mut rng).unwrap();
        let generic = PositiveMap {
            rep: MapRep::Generic(map.action_matrix().unwrap()),
            ..map.clone()
        };
        let x = gaussian_matrix(2, 2, &mut rng);
        assert!(apply_map(&map, &x).unwrap().approx_eq(&apply_map(&generic, &x).unwrap(), 1e-13));
    }

    #[test]
    fn hermiticity_preserving_map_can_fail_positivity() {
        let mut rng = rng_from_seed(9);
        let mut seen_negative = false;
        for _ in 0..20 {
            let m = random_hermiticity_preserving_map(3, 3, &mut rng).unwrap();
            assert!(m.apply_unit().unwrap().approx_eq(&ComplexMatrix::identity(3), 1e-10));
            if !map_flags(&m, 50, 1).unwrap().positivity_sampled {
                seen_negative = true;
            }
        }
        assert!(seen_negative);
    }
}
