//! The capacity-bound pipeline: symplectic normalization of a body via
//! the WDS factorization of its M-position map, the `K + iK` cylinder
//! bound, Viterbo ratios, and the Rogers-Shephard volume checks.
//!
//! For a body K the chain runs
//!
//! ```text
//! K1 = K - K,   (S, K2 = S K1) from the WDS factor of the M-position map,
//! K3 = K2 + i K2,   r = inradius(K3),   upper = 2 pi r^2,
//! ```
//!
//! and `c_lin^Z(K) <= c_lin^Z(K1) = c_lin^Z(K2) <= c_lin^Z(K3) <= 2 pi r^2`
//! by monotonicity, symplectic invariance, and the contact-square
//! argument for i-invariant bodies. The lower bound `pi inradius(K)^2`
//! comes from the inscribed ball.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::body::{self, ContactCertificate, ConvexBody, Ellipsoid};
use crate::error::{Error, Result};
use crate::positions;
use crate::rng;
use crate::symplectic::{self, StandardStructure};
use crate::tolerances as tol;
use crate::volume::{self, McConfig, VolumeMethod};

/// How a capacity bound was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    LemmaAi,
    Tmt,
    EllipsoidExact,
}

impl BoundMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LemmaAi => "lemma-ai",
            Self::Tmt => "tmt",
            Self::EllipsoidExact => "ellipsoid-exact",
        }
    }
}

/// Verified stages of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineTrace {
    /// The difference body `K - K`.
    pub k1: ConvexBody,
    /// Symplectic factor from the normalization.
    pub s: DMatrix<f64>,
    /// `K2 = S K1`.
    pub k2: ConvexBody,
    /// `K3 = K2 + i K2`.
    pub k3: ConvexBody,
    /// Inradius of `K3`.
    pub r: f64,
    /// `(theta, Vol(K2 + e^{i theta} K2)^{1/2n} / Vol(K1)^{1/2n})` over the
    /// verification grid.
    pub theta_ratios: Vec<(f64, f64)>,
    /// Max of the grid ratios (the empirical A2).
    pub a2: f64,
    /// Whether any grid ratio used a Monte Carlo volume.
    pub theta_check_mc: bool,
}

/// An upper (and inscribed-ball lower) bound on the linearized
/// cylindrical capacity.
#[derive(Debug, Clone)]
pub struct CapacityBound {
    /// Bound on `c_lin^Z(K)`, in units of area.
    pub upper: f64,
    /// `pi inradius(K)^2`: a valid capacity lower bound.
    pub lower: f64,
    pub method: BoundMethod,
    pub trace: Option<PipelineTrace>,
    pub certificate: Option<ContactCertificate>,
}

/// Per-body Viterbo ratio report.
#[derive(Debug, Clone)]
pub struct ViterboReport {
    pub body_id: String,
    pub dimension: usize,
    /// `(upper / pi) / volume_term`.
    pub gamma: f64,
    /// `(Vol(K) / Vol(B^{2n}))^{1/n}`.
    pub volume_term: f64,
    pub bound: CapacityBound,
}

/// The 16-angle verification grid `k pi / 8`.
pub fn theta_grid() -> Vec<f64> {
    (0..16).map(|k| k as f64 * PI / 8.0).collect()
}

/// Result of the symplectic normalization of a symmetric body.
#[derive(Debug, Clone)]
pub struct SikNormalization {
    pub s: DMatrix<f64>,
    pub image: ConvexBody,
    pub theta_ratios: Vec<(f64, f64)>,
    pub a2: f64,
    pub used_mc: bool,
}

/// Symplectic normalization: factor the M-position map `T = W D S` and
/// apply the symplectic part. For every grid angle,
/// `Vol(K)^{1/2n} <= Vol(K' + e^{i theta} K')^{1/2n}` and the largest
/// ratio is recorded as the empirical A2.
pub fn sik_normalize(k: &ConvexBody, cfg: &McConfig) -> Result<SikNormalization> {
    let t = positions::m_position_map(k, cfg)?;
    sik_normalize_with_map(k, &t, cfg)
}

/// Same normalization with a caller-supplied volume-preserving
/// positioning map (exercised by the orthogonal-freedom checks).
pub fn sik_normalize_with_map(
    k: &ConvexBody,
    t: &DMatrix<f64>,
    cfg: &McConfig,
) -> Result<SikNormalization> {
    if !body::is_centrally_symmetric(k, tol::BODY_SYM)? {
        return Err(Error::Domain(
            "symplectic normalization expects a centrally symmetric body".into(),
        ));
    }
    let st = StandardStructure::for_dim(k.dim())?;
    let wds = symplectic::wds_decompose(t)?;
    let image = body::linear_image(k, &wds.s)?;

    let d = k.dim();
    let vol_k = volume::volume(k, cfg)?.value;
    let mut ratios = Vec::with_capacity(16);
    let mut used_mc = false;
    let grid = theta_grid();
    // K is symmetric, so e^{i(theta+pi)} K' = e^{i theta} K': compute the
    // first half of the grid and mirror.
    let half = grid.len() / 2;
    let mut half_ratios = Vec::with_capacity(half);
    for (idx, &theta) in grid.iter().take(half).enumerate() {
        let rotated = body::linear_image(&image, &st.rotation(theta))?;
        let est = volume::sum_volume(
            &image,
            &rotated,
            cfg,
            rng::derive_seed(cfg.seed, 0x700 + idx as u64),
        )?;
        if est.method == VolumeMethod::MonteCarlo {
            used_mc = true;
        }
        half_ratios.push((est.value / vol_k).powf(1.0 / d as f64));
    }
    for (idx, &theta) in grid.iter().enumerate() {
        ratios.push((theta, half_ratios[idx % half]));
    }
    let a2 = ratios.iter().map(|&(_, r)| r).fold(f64::NEG_INFINITY, f64::max);
    Ok(SikNormalization {
        s: wds.s,
        image,
        theta_ratios: ratios,
        a2,
        used_mc,
    })
}

/// The cylinder bound for an i-invariant symmetric body:
/// `c_lin^Z(K) <= 2 pi r^2` with `r` the inradius, certified by the
/// contact square.
pub fn lemma_ai_bound(k: &ConvexBody) -> Result<CapacityBound> {
    if !body::is_i_invariant(k, tol::BODY_SYM)? {
        return Err(Error::Domain(
            "the cylinder bound requires an i-invariant body (K = iK)".into(),
        ));
    }
    let r = body::inradius(k)?;
    let certificate = body::contact_certificate(k, r)?;
    Ok(CapacityBound {
        upper: 2.0 * PI * r * r,
        lower: PI * r * r,
        method: BoundMethod::LemmaAi,
        trace: None,
        certificate: Some(certificate),
    })
}

/// Full upper-bound pipeline for an arbitrary convex body in R^{2n}.
pub fn tmt_upper_bound(k: &ConvexBody, cfg: &McConfig) -> Result<CapacityBound> {
    let st = StandardStructure::for_dim(k.dim())?;
    let c = body::barycenter(k)?;
    let centered = k.translate(&(-&c))?;
    let lower_r = body::ball_radius_at_origin(&centered)?.value;

    let k1 = body::difference_body(&centered)?;
    let sik = sik_normalize(&k1, cfg)?;
    let k2 = sik.image.clone();
    let k3 = if body::is_i_invariant(&k2, tol::BODY_SYM)? {
        k2.scale(2.0)?
    } else {
        body::minkowski_sum(&k2, &body::linear_image(&k2, &st.j())?)?
    };
    let r = body::inradius(&k3)?;
    let upper = 2.0 * PI * r * r;
    let lower = PI * lower_r * lower_r;
    if lower > upper + 1e-9 {
        return Err(Error::Numerical(format!(
            "pipeline produced an inconsistent bound: lower {lower} > upper {upper}"
        )));
    }
    let method = if matches!(k, ConvexBody::Ellipsoid(_)) {
        BoundMethod::EllipsoidExact
    } else {
        BoundMethod::Tmt
    };
    Ok(CapacityBound {
        upper,
        lower,
        method,
        trace: Some(PipelineTrace {
            k1,
            s: sik.s,
            k2,
            k3,
            r,
            theta_ratios: sik.theta_ratios,
            a2: sik.a2,
            theta_check_mc: sik.used_mc,
        }),
        certificate: None,
    })
}

/// Viterbo ratio `gamma = (upper / pi) / volume_term` for the pipeline
/// bound.
pub fn viterbo_ratio(k: &ConvexBody, cfg: &McConfig) -> Result<ViterboReport> {
    let bound = tmt_upper_bound(k, cfg)?;
    let volume_term = volume::viterbo_volume_term(k, cfg)?;
    Ok(ViterboReport {
        body_id: String::new(),
        dimension: k.dim(),
        gamma: (bound.upper / PI) / volume_term,
        volume_term,
        bound,
    })
}

/// `Vol(K - K) / Vol(K)`; bounded by `binom(2d, d) <= 4^d`.
pub fn rogers_shephard_ratio(k: &ConvexBody, cfg: &McConfig) -> Result<f64> {
    let diff = body::difference_body(k)?;
    let vd = volume::volume(&diff, cfg)?.value;
    let vk = volume::volume(k, cfg)?.value;
    Ok(vd / vk)
}

/// `Vol(A + B)^{1/d} / Vol(A - B)^{1/d}`, the generalized
/// Rogers-Shephard ratio (empirical A3 candidate).
pub fn grs_ratio(a: &ConvexBody, b: &ConvexBody, cfg: &McConfig) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension("bodies have different dimensions".into()));
    }
    let d = a.dim() as f64;
    let sum = volume::sum_volume(a, b, cfg, rng::derive_seed(cfg.seed, 0x61))?.value;
    let diff = volume::sum_volume(a, &b.negate()?, cfg, rng::derive_seed(cfg.seed, 0x62))?.value;
    Ok((sum / diff).powf(1.0 / d))
}

/// One line of the capacity-axioms report.
#[derive(Debug, Clone)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub detail: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct AxiomsReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomsReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks the capacity axioms on a family of centered ellipsoids using
/// the exact ellipsoid capacity: monotonicity on nested pairs,
/// conformality under `psi` with `psi^T J psi = alpha J`, and the ball
/// normalization `pi r^2`.
pub fn capacity_axioms_suite(family: &[Ellipsoid]) -> Result<AxiomsReport> {
    let mut checks = Vec::new();
    // (P1) monotonicity on nested pairs detected through the shape order
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate() {
            if i == j || a.dim() != b.dim() {
                continue;
            }
            // a inside b iff shape(a) - shape(b) is positive semidefinite
            let diff = a.shape() - b.shape();
            let min_eig = diff
                .symmetric_eigenvalues()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if min_eig >= -1e-12 {
                let ca = symplectic::ellipsoid_capacity(a)?;
                let cb = symplectic::ellipsoid_capacity(b)?;
                checks.push(AxiomCheck {
                    axiom: "P1-monotonicity",
                    detail: format!("pair ({i}, {j}): c(inner) = {ca:.12}, c(outer) = {cb:.12}"),
                    pass: ca <= cb + 1e-9,
                });
            }
        }
    }
    // (P2) conformality: psi = sqrt(alpha) S with S symplectic
    for (i, e) in family.iter().enumerate() {
        let st = StandardStructure::for_dim(e.dim())?;
        let base = symplectic::ellipsoid_capacity(e)?;
        for (ai, alpha) in [0.5f64, 2.0, 3.0].into_iter().enumerate() {
            let s = st.rotation(0.4 + ai as f64)
                * conformal_diag(e.dim(), 1.3 + 0.2 * ai as f64);
            let psi = &s * alpha.sqrt();
            let image = body::linear_image(
                &ConvexBody::Ellipsoid(e.clone()),
                &psi,
            )?;
            let ConvexBody::Ellipsoid(img) = image else {
                unreachable!()
            };
            let ci = symplectic::ellipsoid_capacity(&img)?;
            checks.push(AxiomCheck {
                axiom: "P2-conformality",
                detail: format!(
                    "ellipsoid {i}, alpha = {alpha}: c(psi E) = {ci:.12}, alpha c(E) = {:.12}",
                    alpha * base
                ),
                pass: (ci - alpha * base).abs() <= 1e-8 * (1.0 + alpha * base),
            });
        }
    }
    // (P3) normalization on balls in the family
    for (i, e) in family.iter().enumerate() {
        let d = e.dim();
        let shape = e.shape();
        let lambda = shape[(0, 0)];
        let is_ball = (shape - DMatrix::identity(d, d) * lambda).norm() <= 1e-10 * shape.norm();
        if is_ball && lambda > 0.0 {
            let r2 = 1.0 / lambda;
            let c = symplectic::ellipsoid_capacity(e)?;
            checks.push(AxiomCheck {
                axiom: "P3-normalization",
                detail: format!("ball {i}: c = {c:.12}, pi r^2 = {:.12}", PI * r2),
                pass: (c - PI * r2).abs() <= 1e-9 * (1.0 + PI * r2),
            });
        }
    }
    Ok(AxiomsReport { checks })
}

fn conformal_diag(d: usize, t: f64) -> DMatrix<f64> {
    // diagonal symplectic map diag(t, 1/t, ...) per coordinate pair
    let mut m = DMatrix::zeros(d, d);
    for k in 0..d / 2 {
        m[(2 * k, 2 * k)] = t;
        m[(2 * k + 1, 2 * k + 1)] = 1.0 / t;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn ball_body(d: usize, r: f64) -> ConvexBody {
        ConvexBody::Ellipsoid(Ellipsoid::ball(d, r).unwrap())
    }

    fn cube_body(d: usize, s: f64) -> ConvexBody {
        let mut verts = Vec::new();
        for mask in 0..(1u32 << d) {
            verts.push(DVector::from_fn(d, |i, _| {
                if mask >> i & 1 == 1 {
                    s
                } else {
                    -s
                }
            }));
        }
        ConvexBody::vpolytope(verts).unwrap()
    }

    #[test]
    fn lemma_ai_on_balls_and_cubes() {
        let b = ball_body(4, 1.0);
        let bound = lemma_ai_bound(&b).unwrap();
        assert!((bound.upper - 2.0 * PI).abs() < 1e-12);
        assert!((bound.lower - PI).abs() < 1e-12);

        let b2 = ball_body(4, 2.0);
        assert!((lemma_ai_bound(&b2).unwrap().upper - 8.0 * PI).abs() < 1e-12);

        let cube = cube_body(4, 1.0);
        let bound = lemma_ai_bound(&cube).unwrap();
        assert!((bound.upper - 2.0 * PI).abs() < 1e-12);
        assert!(bound.certificate.is_some());
    }

    #[test]
    fn lemma_ai_rejects_non_invariant_bodies() {
        let stretched = body::linear_image(
            &cube_body(2, 1.0),
            &DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0])),
        )
        .unwrap();
        assert!(matches!(lemma_ai_bound(&stretched), Err(Error::Domain(_))));
    }

    #[test]
    fn ball_pipeline_is_exactly_32_pi() {
        let cfg = McConfig::default();
        for n in [1usize, 2] {
            let b = ball_body(2 * n, 1.0);
            let bound = tmt_upper_bound(&b, &cfg).unwrap();
            assert!(
                (bound.upper - 32.0 * PI).abs() < 1e-9,
                "n={n}: {}",
                bound.upper
            );
            let trace = bound.trace.as_ref().unwrap();
            assert!((trace.r - 4.0).abs() < 1e-10);
            // theta ratios are exactly 2 on the ellipsoid-exact route
            for &(_, ratio) in &trace.theta_ratios {
                assert!((ratio - 2.0).abs() < 1e-9);
            }
            let report = viterbo_ratio(&b, &cfg).unwrap();
            assert!((report.gamma - 32.0).abs() < 1e-9);
        }
    }

    #[test]
    fn square_pipeline_hand_trace() {
        let cfg = McConfig::default();
        let square = cube_body(2, 1.0);
        let bound = tmt_upper_bound(&square, &cfg).unwrap();
        assert!((bound.upper - 32.0 * PI).abs() < 1e-9, "{}", bound.upper);
        let trace = bound.trace.as_ref().unwrap();
        assert!((trace.r - 4.0).abs() < 1e-10);
        // true planar capacity (the area, 4) is below the bound
        assert!(bound.upper >= 4.0);
        let report = viterbo_ratio(&square, &cfg).unwrap();
        assert!((report.gamma - 8.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn pipeline_scales_quadratically() {
        let cfg = McConfig::default();
        let k = cube_body(2, 1.0);
        let base = tmt_upper_bound(&k, &cfg).unwrap().upper;
        let scaled = tmt_upper_bound(&k.scale(3.0).unwrap(), &cfg).unwrap().upper;
        assert!((scaled - 9.0 * base).abs() < 1e-8 * scaled);
        // and gamma is scale-invariant
        let g0 = viterbo_ratio(&k, &cfg).unwrap().gamma;
        let g1 = viterbo_ratio(&k.scale(3.0).unwrap(), &cfg).unwrap().gamma;
        assert!((g0 - g1).abs() < 1e-8 * g0);
    }

    #[test]
    fn stretched_disc_normalizes_to_disc() {
        let cfg = McConfig::default();
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0 / 3.0]));
        let e = body::linear_image(&ball_body(2, 1.0), &m).unwrap();
        let diff = body::difference_body(&e).unwrap();
        let sik = sik_normalize(&diff, &cfg).unwrap();
        // K2 should be the ball of radius 2 (difference body of the disc image)
        let ConvexBody::Ellipsoid(k2) = &sik.image else {
            panic!("expected ellipsoid")
        };
        assert!((k2.shape() - DMatrix::identity(2, 2) / 4.0).norm() < 1e-9);
        assert!((sik.a2 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rogers_shephard_examples() {
        let cfg = McConfig::default();
        // symmetric body: ratio 2^d
        let cube = cube_body(3, 1.0);
        assert!((rogers_shephard_ratio(&cube, &cfg).unwrap() - 8.0).abs() < 1e-9);
        // triangle: hexagon over triangle = 6
        let tri = ConvexBody::vpolytope(vec![
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0]),
        ])
        .unwrap();
        assert!((rogers_shephard_ratio(&tri, &cfg).unwrap() - 6.0).abs() < 1e-9);
        // 3-simplex: C(6,3) = 20
        let simplex = ConvexBody::vpolytope(vec![
            DVector::from_vec(vec![0.0, 0.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 0.0]),
            DVector::from_vec(vec![0.0, 0.0, 1.0]),
        ])
        .unwrap();
        assert!((rogers_shephard_ratio(&simplex, &cfg).unwrap() - 20.0).abs() < 1e-7);
    }

    #[test]
    fn grs_examples() {
        let cfg = McConfig::default();
        // centrally symmetric second body: ratio exactly 1
        let cube = cube_body(2, 1.0);
        let tri = ConvexBody::vpolytope(vec![
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0]),
        ])
        .unwrap();
        assert!((grs_ratio(&tri, &cube, &cfg).unwrap() - 1.0).abs() < 1e-9);
        // A = B = triangle: (Vol(2T)/Vol(T-T))^{1/2} = (2/3)^{1/2}
        let expected = (2.0f64 / 3.0).sqrt();
        assert!((grs_ratio(&tri, &tri, &cfg).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn axioms_suite_on_a_small_family() {
        let e1 = Ellipsoid::unit_ball(4);
        let e2 = Ellipsoid::ball(4, 2.0).unwrap();
        let shape = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.5, 2.0, 0.7]));
        let e3 = Ellipsoid::new(DVector::zeros(4), shape).unwrap();
        let report = capacity_axioms_suite(&[e1, e2, e3]).unwrap();
        assert!(report.all_pass());
        // E inside 2E shows up as a monotone pair with ratio 4
        assert!(report.checks.iter().any(|c| c.axiom == "P1-monotonicity"));
        assert!(report.checks.iter().any(|c| c.axiom == "P3-normalization"));
    }

    #[test]
    fn soundness_on_a_random_ellipsoid() {
        let cfg = McConfig::default();
        let shape = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 1.5, 2.5, 0.8]));
        let e = Ellipsoid::new(DVector::zeros(4), shape).unwrap();
        let cap = symplectic::ellipsoid_capacity(&e).unwrap();
        let bound = tmt_upper_bound(&ConvexBody::Ellipsoid(e), &cfg).unwrap();
        assert!(bound.upper >= cap - 1e-8);
        assert!(bound.lower <= bound.upper + 1e-9);
        assert_eq!(bound.method, BoundMethod::EllipsoidExact);
    }
}
