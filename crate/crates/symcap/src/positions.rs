//! Ellipsoid positions: minimum-volume enclosing (Loewner) ellipsoids,
//! the M-ellipsoid proxy, the volume-preserving M-position map, and the
//! empirical reverse-Brunn-Minkowski checks.
//!
//! The M-ellipsoid itself is an existence statement; the computable proxy
//! here is the Loewner ellipsoid of the symmetrized, barycenter-translated
//! body, rescaled to the body's volume. Its quality is never assumed: the
//! two ratios `Vol(K + E)^{1/d} / Vol(K)^{1/d}` and
//! `Vol(K cap E)^{1/d} / Vol(K)^{1/d}` are measured and reported with
//! every proxy.

use nalgebra::{DMatrix, DVector};

use crate::body::{self, ConvexBody, Ellipsoid, VPolytope};
use crate::error::{Error, Result};
use crate::rng;
use crate::tolerances as tol;
use crate::volume::{self, McConfig};

/// Measured quality ratios of an M-ellipsoid proxy.
#[derive(Debug, Clone, Copy)]
pub struct QualityRatios {
    /// `Vol(K + E)^{1/d} / Vol(K)^{1/d}`; at least 1, equal to 2 when E = K.
    pub sum: f64,
    /// `Vol(K cap E)^{1/d} / Vol(K)^{1/d}`; at most 1.
    pub intersection: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxySource {
    /// Volume-normalized Loewner ellipsoid of the symmetrized body.
    LoewnerScaled,
    /// One of the registered families whose natural ellipsoid is already
    /// an M-ellipsoid at this scale (balls, ellipsoids, cubes,
    /// cross-polytopes).
    KnownExact,
}

impl ProxySource {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LoewnerScaled => "loewner-scaled",
            Self::KnownExact => "known-exact",
        }
    }
}

/// An M-ellipsoid proxy: equal-volume ellipsoid centered at the
/// barycenter, with measured quality constants.
#[derive(Debug, Clone)]
pub struct MProxy {
    pub ellipsoid: Ellipsoid,
    pub source: ProxySource,
    pub quality: QualityRatios,
}

/// Minimum-volume enclosing ellipsoid of the vertex set, to relative
/// volume accuracy `1 + eps`.
///
/// Khachiyan's barycentric coordinate ascent with Wolfe-Atwood away
/// steps; the returned ellipsoid is inflated to contain every input point
/// exactly, so `gauge <= 1` for all vertices.
pub fn loewner_ellipsoid(p: &VPolytope, eps: f64) -> Result<Ellipsoid> {
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(Error::InvalidInput(format!(
            "loewner eps must lie in (0, 0.1], got {eps}"
        )));
    }
    let d = p.dim();
    let points = p.vertices();
    let m = points.len();

    // lifted points q_i = (p_i, 1)
    let dl = d + 1;
    let mut q = DMatrix::zeros(dl, m);
    for (j, pt) in points.iter().enumerate() {
        for i in 0..d {
            q[(i, j)] = pt[i];
        }
        q[(d, j)] = 1.0;
    }

    let mut u = DVector::from_element(m, 1.0 / m as f64);
    let delta = eps / dl as f64;

    let x_from = |u: &DVector<f64>| -> DMatrix<f64> {
        let mut x = DMatrix::zeros(dl, dl);
        for j in 0..m {
            if u[j] > 0.0 {
                let col = q.column(j);
                x.syger(u[j], &col, &col, 1.0);
            }
        }
        // syger fills the lower triangle; symmetrize
        for i in 0..dl {
            for k in (i + 1)..dl {
                x[(i, k)] = x[(k, i)];
            }
        }
        x
    };

    let mut x_inv = x_from(&u)
        .try_inverse()
        .ok_or_else(|| Error::Domain("degenerate polytope for enclosing ellipsoid".into()))?;

    let mut converged = false;
    let mut residual = f64::INFINITY;
    for iter in 0..tol::LOEWNER_MAX_ITER {
        // weights g_j = q_j^T X^{-1} q_j
        let mut g_max = (f64::NEG_INFINITY, 0usize);
        let mut g_min_support = (f64::INFINITY, 0usize);
        for j in 0..m {
            let col = q.column(j);
            let g = (&x_inv * col).dot(&col);
            if g > g_max.0 {
                g_max = (g, j);
            }
            if u[j] > 1e-12 && g < g_min_support.0 {
                g_min_support = (g, j);
            }
        }
        let target = dl as f64;
        let eps_plus = g_max.0 / target - 1.0;
        let eps_minus = 1.0 - g_min_support.0 / target;
        residual = eps_plus.max(eps_minus);
        if eps_plus <= delta && eps_minus <= delta {
            converged = true;
            break;
        }

        let (g, j, away) = if eps_plus >= eps_minus {
            (g_max.0, g_max.1, false)
        } else {
            (g_min_support.0, g_min_support.1, true)
        };
        let mut tau = (g - target) / (target * (g - 1.0));
        if away {
            // moving away from q_j; keep u_j nonnegative
            let cap = -u[j] / (1.0 - u[j]);
            if !tau.is_finite() || g <= 1.0 + 1e-12 {
                tau = cap;
            } else {
                tau = tau.max(cap);
            }
        }
        if !tau.is_finite() || tau.abs() < 1e-17 {
            converged = true;
            break;
        }

        // Sherman-Morrison update of X^{-1} for X' = (1-tau) X + tau q q^T
        let col = q.column(j);
        let xq = &x_inv * col;
        let qxq = xq.dot(&col);
        let denom = (1.0 - tau) + tau * qxq;
        if denom.abs() < 1e-14 || (1.0 - tau).abs() < 1e-14 {
            u *= 1.0 - tau;
            u[j] += tau;
            x_inv = x_from(&u).try_inverse().ok_or_else(|| {
                Error::Numerical("enclosing ellipsoid moment matrix became singular".into())
            })?;
            continue;
        }
        let scale = 1.0 / (1.0 - tau);
        let factor = tau * scale / denom;
        // x_inv = scale * x_inv - factor * xq xq^T
        x_inv *= scale;
        x_inv.syger(-factor, &xq, &xq, 1.0);
        for i in 0..dl {
            for k2 in (i + 1)..dl {
                x_inv[(i, k2)] = x_inv[(k2, i)];
            }
        }
        u *= 1.0 - tau;
        u[j] += tau;

        if iter % 512 == 511 {
            // refresh against drift
            x_inv = x_from(&u).try_inverse().ok_or_else(|| {
                Error::Numerical("enclosing ellipsoid moment matrix became singular".into())
            })?;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "enclosing ellipsoid did not converge within {} iterations (residual {residual:.3e})",
            tol::LOEWNER_MAX_ITER
        )));
    }

    // center and covariance in point space
    let mut center = DVector::zeros(d);
    for j in 0..m {
        center += &points[j] * u[j];
    }
    let mut sigma = DMatrix::zeros(d, d);
    for j in 0..m {
        let y = points[j].clone() - &center;
        sigma.syger(u[j], &y, &y, 1.0);
    }
    for i in 0..d {
        for k in (i + 1)..d {
            sigma[(i, k)] = sigma[(k, i)];
        }
    }
    let sigma_inv = sigma
        .try_inverse()
        .ok_or_else(|| Error::Domain("degenerate polytope for enclosing ellipsoid".into()))?;
    let sigma_inv = (&sigma_inv + sigma_inv.transpose()) * 0.5;

    // scale so every point satisfies the quadratic exactly
    let mut worst = 0.0f64;
    for pt in points {
        let y = pt - &center;
        worst = worst.max((&sigma_inv * &y).dot(&y));
    }
    if worst <= 0.0 {
        return Err(Error::Domain("degenerate point set".into()));
    }
    Ellipsoid::new(center, sigma_inv / worst)
}

fn detect_known_exact(k: &ConvexBody) -> Option<Ellipsoid> {
    match k {
        ConvexBody::Ellipsoid(e) => Some(Ellipsoid::new(DVector::zeros(e.dim()), e.shape().clone()).ok()?),
        ConvexBody::VPolytope(p) => {
            let d = p.dim();
            let verts = p.vertices();
            let scale = verts
                .iter()
                .flat_map(|v| v.iter())
                .fold(0.0f64, |m, &x| m.max(x.abs()));
            if scale <= 0.0 {
                return None;
            }
            let tol_abs = 1e-9 * scale;
            // axis-aligned cube {+-s}^d
            if verts.len() == 1 << d
                && verts
                    .iter()
                    .all(|v| v.iter().all(|&x| (x.abs() - scale).abs() <= tol_abs))
            {
                let volume = (2.0 * scale).powi(d as i32);
                return ball_of_volume(d, volume);
            }
            // cross-polytope {+-s e_i}
            if verts.len() == 2 * d
                && verts.iter().all(|v| {
                    let mut big = 0;
                    for &x in v.iter() {
                        if x.abs() > tol_abs {
                            big += 1;
                            if (x.abs() - scale).abs() > tol_abs {
                                return false;
                            }
                        }
                    }
                    big == 1
                })
            {
                let mut fact = 1.0;
                for i in 1..=d {
                    fact *= i as f64;
                }
                let volume = (2.0 * scale).powi(d as i32) / fact;
                return ball_of_volume(d, volume);
            }
            None
        }
        ConvexBody::HPolytope(_) => None,
    }
}

fn ball_of_volume(d: usize, vol: f64) -> Option<Ellipsoid> {
    let radius = (vol / volume::ball_volume(d)).powf(1.0 / d as f64);
    Ellipsoid::ball(d, radius).ok()
}

/// Proxy ellipsoid and its provenance, without the measured quality
/// ratios (the position map does not need them).
pub fn m_proxy_ellipsoid(k: &ConvexBody, cfg: &McConfig) -> Result<(Ellipsoid, ProxySource)> {
    let d = k.dim();
    let c = body::barycenter(k)?;
    let centered = k.translate(&(-&c))?;

    let vol_k = volume::volume(&centered, cfg)?.value;
    let (shape, source) = match detect_known_exact(&centered) {
        Some(e) => (e.shape().clone(), ProxySource::KnownExact),
        None => {
            let symmetric = body::is_centrally_symmetric(&centered, tol::BODY_SYM)?;
            let sym_body = if symmetric {
                centered.clone()
            } else {
                body::difference_body(&centered)?.scale(0.5)?
            };
            let e = loewner_ellipsoid(&sym_body.to_vpolytope()?, cfg.loewner_eps)?;
            (e.shape().clone(), ProxySource::LoewnerScaled)
        }
    };

    // normalize to Vol(E) = Vol(K)
    let e_vol = volume::ball_volume(d) / shape.determinant().sqrt();
    let shape = shape * (e_vol / vol_k).powf(2.0 / d as f64);
    Ok((Ellipsoid::new(c, shape)?, source))
}

/// The M-ellipsoid proxy of a body: equal-volume ellipsoid at the
/// barycenter, from the registry for the standard families and from the
/// Loewner ellipsoid of the symmetrized body otherwise. Quality ratios
/// are measured (Monte Carlo where no closed form exists) and stored.
pub fn m_proxy(k: &ConvexBody, cfg: &McConfig) -> Result<MProxy> {
    let d = k.dim();
    let (proxy, source) = m_proxy_ellipsoid(k, cfg)?;
    let c = proxy.center().clone();
    let centered = k.translate(&(-&c))?;
    let vol_k = volume::volume(&centered, cfg)?.value;
    let proxy_centered = Ellipsoid::new(DVector::zeros(d), proxy.shape().clone())?;

    let quality = match (&centered, source) {
        (ConvexBody::Ellipsoid(_), ProxySource::KnownExact) => QualityRatios {
            sum: 2.0,
            intersection: 1.0,
        },
        _ => {
            let inv_d = 1.0 / d as f64;
            let sum_est = volume::sum_volume(
                &centered,
                &ConvexBody::Ellipsoid(proxy_centered.clone()),
                cfg,
                rng::derive_seed(cfg.seed, 0x51),
            )?;
            let int_est = volume::intersection_volume_mc(
                &centered,
                &proxy_centered,
                cfg.samples,
                rng::derive_seed(cfg.seed, 0x52),
            )?;
            QualityRatios {
                sum: (sum_est.value / vol_k).powf(inv_d),
                intersection: (int_est.value / vol_k).powf(inv_d),
            }
        }
    };

    Ok(MProxy {
        ellipsoid: proxy,
        source,
        quality,
    })
}

/// The volume-preserving map taking the M-proxy ellipsoid to a ball of
/// the same volume: `T = det(A)^{-1/(2d)} A^{1/2}` for proxy shape `A`.
pub fn m_position_map(k: &ConvexBody, cfg: &McConfig) -> Result<DMatrix<f64>> {
    let (proxy, _) = m_proxy_ellipsoid(k, cfg)?;
    map_from_proxy_shape(&proxy)
}

pub(crate) fn map_from_proxy_shape(e: &Ellipsoid) -> Result<DMatrix<f64>> {
    let d = e.dim();
    let det = e.shape().determinant();
    if det <= 0.0 {
        return Err(Error::Domain("proxy shape is not positive definite".into()));
    }
    let t = e.shape_pow(0.5) * det.powf(-0.5 / d as f64);
    Ok(t)
}

/// Empirical reverse Brunn-Minkowski ratio
/// `Vol(K1+K2)^{1/d} / (Vol(K1)^{1/d} + Vol(K2)^{1/d})` for two bodies
/// already in M-position.
pub fn verify_rbm(k1: &ConvexBody, k2: &ConvexBody, cfg: &McConfig) -> Result<f64> {
    if k1.dim() != k2.dim() {
        return Err(Error::Dimension("bodies have different dimensions".into()));
    }
    let d = k1.dim() as f64;
    let v1 = volume::volume(k1, cfg)?.value.powf(1.0 / d);
    let v2 = volume::volume(k2, cfg)?.value.powf(1.0 / d);
    let vs = volume::sum_volume(k1, k2, cfg, rng::derive_seed(cfg.seed, 0x53))?
        .value
        .powf(1.0 / d);
    Ok(vs / (v1 + v2))
}

/// Empirical two-sided comparison of `Vol(P + E_K)` against `Vol(P + K)`:
/// returns both direction ratios of the volume radii.
pub fn verify_withp(p: &ConvexBody, k: &ConvexBody, cfg: &McConfig) -> Result<(f64, f64)> {
    if p.dim() != k.dim() {
        return Err(Error::Dimension("bodies have different dimensions".into()));
    }
    let d = k.dim() as f64;
    let proxy = m_proxy(k, cfg)?;
    let v_pe = volume::sum_volume(
        p,
        &ConvexBody::Ellipsoid(proxy.ellipsoid.clone()),
        cfg,
        rng::derive_seed(cfg.seed, 0x54),
    )?
    .value
    .powf(1.0 / d);
    let v_pk = volume::sum_volume(p, k, cfg, rng::derive_seed(cfg.seed, 0x55))?
        .value
        .powf(1.0 / d);
    Ok((v_pe / v_pk, v_pk / v_pe))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(coords)
    }

    fn cross_vertices(d: usize, s: f64) -> Vec<DVector<f64>> {
        let mut verts = Vec::new();
        for i in 0..d {
            for sign in [-1.0, 1.0] {
                verts.push(DVector::from_fn(d, |k, _| if k == i { sign * s } else { 0.0 }));
            }
        }
        verts
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
    fn loewner_of_cross_polytope_is_unit_ball() {
        let p = VPolytope::new(cross_vertices(3, 1.0)).unwrap();
        let e = loewner_ellipsoid(&p, 1e-5).unwrap();
        assert!(e.center().norm() < 1e-6);
        assert!((e.shape() - DMatrix::identity(3, 3)).norm() < 1e-4);
        // containment
        for vtx in p.vertices() {
            assert!(e.centered_gauge(vtx) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn loewner_of_square_is_circumscribed_circle() {
        let p = VPolytope::new(vec![v(&[1.0, 1.0]), v(&[-1.0, 1.0]), v(&[-1.0, -1.0]), v(&[1.0, -1.0])]).unwrap();
        let e = loewner_ellipsoid(&p, 1e-6).unwrap();
        // radius sqrt(2): shape = I/2
        assert!((e.shape() - DMatrix::identity(2, 2) / 2.0).norm() < 1e-4);
    }

    #[test]
    fn loewner_fixed_point_on_ellipsoid_boundary_points() {
        // boundary points of x^2/4 + y^2 = 1 with dihedral symmetry
        let mut pts = Vec::new();
        let m = 16;
        for k in 0..m {
            let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            pts.push(v(&[2.0 * t.cos(), t.sin()]));
        }
        let p = VPolytope::new(pts).unwrap();
        let e = loewner_ellipsoid(&p, 1e-6).unwrap();
        let expected = DMatrix::from_diagonal(&v(&[0.25, 1.0]));
        assert!((e.shape() - expected).norm() < 1e-3);
    }

    #[test]
    fn proxy_of_ball_is_the_ball() {
        let cfg = McConfig::default();
        let ball = ConvexBody::Ellipsoid(Ellipsoid::unit_ball(4));
        let proxy = m_proxy(&ball, &cfg).unwrap();
        assert_eq!(proxy.source, ProxySource::KnownExact);
        assert!((proxy.ellipsoid.shape() - DMatrix::identity(4, 4)).norm() < 1e-10);
        assert!((proxy.quality.sum - 2.0).abs() < 1e-12);
        assert!((proxy.quality.intersection - 1.0).abs() < 1e-12);
    }

    #[test]
    fn proxy_of_cube_is_a_volume_matched_ball() {
        let cfg = McConfig {
            samples: 100_000,
            ..Default::default()
        };
        let cube = cube_body(4, 1.0);
        let proxy = m_proxy(&cube, &cfg).unwrap();
        assert_eq!(proxy.source, ProxySource::KnownExact);
        assert!((proxy.ellipsoid.volume() - 16.0).abs() < 1e-6 * 16.0);
        assert!(proxy.quality.sum >= 1.0 && proxy.quality.sum <= 2.5);
        assert!(proxy.quality.intersection <= 1.0 + 1e-9);
    }

    #[test]
    fn position_map_of_ball_is_identity() {
        let cfg = McConfig::default();
        let ball = ConvexBody::Ellipsoid(Ellipsoid::unit_ball(4));
        let t = m_position_map(&ball, &cfg).unwrap();
        assert!((t - DMatrix::identity(4, 4)).norm() < 1e-10);
    }

    #[test]
    fn position_map_of_stretched_disc() {
        let cfg = McConfig::default();
        let m = DMatrix::from_diagonal(&v(&[2.0, 0.5]));
        let e = body::linear_image(&ConvexBody::Ellipsoid(Ellipsoid::unit_ball(2)), &m).unwrap();
        let t = m_position_map(&e, &cfg).unwrap();
        let expected = DMatrix::from_diagonal(&v(&[0.5, 2.0]));
        assert!((&t - expected).norm() < 1e-10);
        assert!((t.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rbm_ratio_of_equal_balls_is_one() {
        let cfg = McConfig::default();
        let ball = ConvexBody::Ellipsoid(Ellipsoid::unit_ball(4));
        let r = verify_rbm(&ball, &ball, &cfg).unwrap();
        assert!((r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn withp_on_equal_balls_is_unit_pair() {
        let cfg = McConfig::default();
        let ball = ConvexBody::Ellipsoid(Ellipsoid::unit_ball(2));
        let (a, b) = verify_withp(&ball, &ball, &cfg).unwrap();
        assert!((a - 1.0).abs() < 1e-9 && (b - 1.0).abs() < 1e-9);
    }
}
