//! Exact volumes for small-dimension polytopes, Monte Carlo volumes
//! elsewhere, and the volume terms of the capacity inequalities.
//!
//! Monte Carlo estimates are rejection samples drawn uniformly from an
//! enclosing ellipsoid. Sampling is chunked with one counter-based RNG
//! stream per chunk and integer acceptance counts, so a (seed, samples)
//! pair gives bit-identical results no matter how many workers run the
//! chunks.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::body::{self, ConvexBody, Ellipsoid, Halfspace, VPolytope};
use crate::error::{Error, Result};
use crate::hull::{self, planar};
use crate::linprog;
use crate::positions;
use crate::rng;
use crate::tolerances as tol;

const MC_CHUNK: u64 = 16_384;
const MIN_MC_SAMPLES: u64 = 10_000;
const MIN_ACCEPTANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    Exact,
    MonteCarlo,
}

impl VolumeMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::MonteCarlo => "monte-carlo",
        }
    }
}

/// A volume value with its provenance: exact computations carry zero
/// standard error; Monte Carlo values carry the binomial standard error
/// and the seed that reproduces them.
#[derive(Debug, Clone, Copy)]
pub struct VolumeEstimate {
    pub value: f64,
    pub method: VolumeMethod,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl VolumeEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            method: VolumeMethod::Exact,
            stderr: 0.0,
            samples: 0,
            seed: 0,
        }
    }
}

/// Options threaded through every operation that may fall back to Monte
/// Carlo volumes.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub loewner_eps: f64,
    /// Largest pairwise-sum candidate count still summed exactly.
    pub exact_sum_cap: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0,
            loewner_eps: tol::LOEWNER_EPS,
            exact_sum_cap: 6_000,
        }
    }
}

/// Volume of the unit ball in R^d, via the two-step recurrence
/// `V_d = 2 pi V_{d-2} / d`.
pub fn ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

/// Exact polytope volume by pyramid decomposition over hull facets
/// (product bodies factor into planar areas first). Limited to d <= 6;
/// higher dimensions should use `volume_mc`.
pub fn volume_exact(p: &VPolytope) -> Result<VolumeEstimate> {
    let d = p.dim();
    if d > 6 {
        return Err(Error::Dimension(format!(
            "exact volume is limited to dimension 6 (got {d}); use volume_mc"
        )));
    }
    if d == 1 {
        return Err(Error::Dimension("volume needs dimension >= 2".into()));
    }
    if d == 2 {
        let pts: Vec<(f64, f64)> = p.vertices().iter().map(|v| (v[0], v[1])).collect();
        let hull = planar::hull2d(&pts);
        if hull.len() < 3 {
            return Err(Error::Domain("degenerate polygon".into()));
        }
        return Ok(VolumeEstimate::exact(planar::area2d(&hull)));
    }
    if d >= 4 {
        if let Some(factors) = body::pair_product_factors(p.vertices()) {
            let mut vol = 1.0;
            for f in &factors {
                let hull = planar::hull2d(f);
                if hull.len() < 3 {
                    return Err(Error::Domain("degenerate product factor".into()));
                }
                vol *= planar::area2d(&hull);
            }
            return Ok(VolumeEstimate::exact(vol));
        }
    }
    let hull = hull::convex_hull(p.vertices())?;
    Ok(VolumeEstimate::exact(hull.volume()))
}

/// Volume of any body: closed form for ellipsoids, exact triangulation
/// for polytopes up to d = 6, Monte Carlo beyond.
pub fn volume(k: &ConvexBody, cfg: &McConfig) -> Result<VolumeEstimate> {
    match k {
        ConvexBody::Ellipsoid(e) => Ok(VolumeEstimate::exact(e.volume())),
        ConvexBody::VPolytope(p) if p.dim() <= 6 => volume_exact(p),
        ConvexBody::HPolytope(p) if p.dim() <= 6 => volume_exact(&k.to_vpolytope()?),
        _ => volume_mc(k, cfg.samples, cfg.seed),
    }
}

// ---------------------------------------------------------------------
// Membership oracles
// ---------------------------------------------------------------------

/// Gauge evaluation fast paths for membership testing of centered bodies.
pub(crate) enum GaugeOracle {
    Halfspaces(Vec<Halfspace>),
    /// Per coordinate pair: edge list `(nx, ny, dist)` of the planar hull.
    ProductPlanes(Vec<Vec<(f64, f64, f64)>>),
    Ellipsoid(DMatrix<f64>),
    Vertices(Vec<DVector<f64>>),
}

impl GaugeOracle {
    /// Builds an oracle for a body with the origin interior.
    pub(crate) fn build(k: &ConvexBody) -> Result<Self> {
        match k {
            ConvexBody::Ellipsoid(e) => {
                if !e.is_centered() {
                    return Err(Error::Domain("membership oracle needs a centered ellipsoid".into()));
                }
                Ok(Self::Ellipsoid(e.shape().clone()))
            }
            ConvexBody::HPolytope(p) => {
                if p.halfspaces().iter().any(|h| h.offset <= 0.0) {
                    return Err(Error::Domain("origin is not interior".into()));
                }
                Ok(Self::Halfspaces(p.halfspaces().to_vec()))
            }
            ConvexBody::VPolytope(p) => {
                let d = p.dim();
                if d >= 4 && d % 2 == 0 {
                    if let Some(factors) = body::pair_product_factors(p.vertices()) {
                        let mut planes = Vec::with_capacity(factors.len());
                        let mut ok = true;
                        'outer: for f in &factors {
                            let hull = planar::hull2d(f);
                            let n = hull.len();
                            if n < 3 {
                                ok = false;
                                break;
                            }
                            let mut edges = Vec::with_capacity(n);
                            for i in 0..n {
                                let a = hull[i];
                                let b = hull[(i + 1) % n];
                                let (ex, ey) = (b.0 - a.0, b.1 - a.1);
                                let len = (ex * ex + ey * ey).sqrt();
                                let (nx, ny) = (ey / len, -ex / len);
                                let dist = nx * a.0 + ny * a.1;
                                if dist <= 0.0 {
                                    ok = false;
                                    break 'outer;
                                }
                                edges.push((nx, ny, dist));
                            }
                            planes.push(edges);
                        }
                        if ok {
                            return Ok(Self::ProductPlanes(planes));
                        }
                    }
                }
                if d == 2 {
                    let pts: Vec<(f64, f64)> = p.vertices().iter().map(|v| (v[0], v[1])).collect();
                    let hull = planar::hull2d(&pts);
                    let n = hull.len();
                    let mut hs = Vec::with_capacity(n);
                    for i in 0..n {
                        let a = hull[i];
                        let b = hull[(i + 1) % n];
                        let (ex, ey) = (b.0 - a.0, b.1 - a.1);
                        let len = (ex * ex + ey * ey).sqrt();
                        let (nx, ny) = (ey / len, -ex / len);
                        let dist = nx * a.0 + ny * a.1;
                        if dist <= 0.0 {
                            return Err(Error::Domain("origin is not interior".into()));
                        }
                        hs.push(Halfspace {
                            normal: DVector::from_vec(vec![nx, ny]),
                            offset: dist,
                        });
                    }
                    return Ok(Self::Halfspaces(hs));
                }
                if d <= 6 {
                    let hull = hull::convex_hull(p.vertices())?;
                    let hs: Vec<Halfspace> = hull
                        .halfspaces()
                        .into_iter()
                        .map(|(normal, offset)| Halfspace { normal, offset })
                        .collect();
                    if hs.iter().any(|h| h.offset <= 0.0) {
                        return Err(Error::Domain("origin is not interior".into()));
                    }
                    Ok(Self::Halfspaces(hs))
                } else {
                    Ok(Self::Vertices(p.vertices().to_vec()))
                }
            }
        }
    }

    pub(crate) fn gauge(&self, x: &DVector<f64>) -> f64 {
        match self {
            Self::Halfspaces(hs) => hs
                .iter()
                .map(|h| h.normal.dot(x) / h.offset)
                .fold(0.0f64, f64::max),
            Self::ProductPlanes(planes) => {
                let mut g = 0.0f64;
                for (k, edges) in planes.iter().enumerate() {
                    let (px, py) = (x[2 * k], x[2 * k + 1]);
                    for &(nx, ny, dist) in edges {
                        g = g.max((nx * px + ny * py) / dist);
                    }
                }
                g
            }
            Self::Ellipsoid(shape) => (shape * x).dot(x).max(0.0).sqrt(),
            Self::Vertices(verts) => match linprog::max_scale_in_hull(verts, x) {
                Ok(s) if s > 0.0 => 1.0 / s,
                _ => f64::INFINITY,
            },
        }
    }

    pub(crate) fn contains(&self, x: &DVector<f64>) -> bool {
        self.gauge(x) <= 1.0
    }
}

// ---------------------------------------------------------------------
// Monte Carlo core
// ---------------------------------------------------------------------

struct ProposalSampler {
    center: DVector<f64>,
    half_map: DMatrix<f64>,
    volume: f64,
    dim: usize,
}

impl ProposalSampler {
    fn from_ellipsoid(e: &Ellipsoid) -> Self {
        Self {
            center: e.center().clone(),
            half_map: e.shape_pow(-0.5),
            volume: e.volume(),
            dim: e.dim(),
        }
    }

    fn sample<R: Rng>(&self, r: &mut R) -> DVector<f64> {
        let u = rng::unit_vector(r, self.dim);
        let t: f64 = r.gen_range(0.0..1.0f64);
        let radius = t.powf(1.0 / self.dim as f64);
        &self.center + &self.half_map * (u * radius)
    }
}

fn mc_acceptance<F>(proposal: &ProposalSampler, samples: u64, seed: u64, member: F) -> u64
where
    F: Fn(&DVector<f64>) -> bool + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut r = rng::chunk_rng(seed, chunk);
            let lo = chunk * MC_CHUNK;
            let hi = ((chunk + 1) * MC_CHUNK).min(samples);
            let mut hits = 0u64;
            for _ in lo..hi {
                let x = proposal.sample(&mut r);
                if member(&x) {
                    hits += 1;
                }
            }
            hits
        })
        .sum()
}

fn binomial_estimate(
    enclosing_volume: f64,
    hits: u64,
    samples: u64,
    seed: u64,
) -> Result<VolumeEstimate> {
    let rate = hits as f64 / samples as f64;
    if rate < MIN_ACCEPTANCE {
        return Err(Error::Numerical(format!(
            "Monte Carlo acceptance rate {rate:.2e} is below {MIN_ACCEPTANCE:.0e}; use an exact method or better positioning"
        )));
    }
    let stderr = enclosing_volume * (rate * (1.0 - rate) / samples as f64).sqrt();
    Ok(VolumeEstimate {
        value: enclosing_volume * rate,
        method: VolumeMethod::MonteCarlo,
        stderr,
        samples,
        seed,
    })
}

/// Monte Carlo volume: rejection sampling inside the enclosing
/// (Loewner) ellipsoid of the barycenter-translated body.
pub fn volume_mc(k: &ConvexBody, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "volume_mc needs at least {MIN_MC_SAMPLES} samples, got {samples}"
        )));
    }
    let c = body::barycenter(k)?;
    let centered = k.translate(&(-&c))?;
    let proposal_ellipsoid = match &centered {
        ConvexBody::Ellipsoid(e) => e.clone(),
        ConvexBody::VPolytope(p) => positions::loewner_ellipsoid(p, 1e-3)?,
        ConvexBody::HPolytope(_) => {
            positions::loewner_ellipsoid(&centered.to_vpolytope()?, 1e-3)?
        }
    };
    let oracle = GaugeOracle::build(&centered)?;
    let proposal = ProposalSampler::from_ellipsoid(&proposal_ellipsoid);
    let hits = mc_acceptance(&proposal, samples, seed, |x| oracle.contains(x));
    binomial_estimate(proposal.volume, hits, samples, seed)
}

/// `(Vol(K) / Vol(B^{2n}))^{1/n}`, the volume term of the capacity
/// inequalities. Exact volume when available, Monte Carlo otherwise.
pub fn viterbo_volume_term(k: &ConvexBody, cfg: &McConfig) -> Result<f64> {
    let d = k.dim();
    if d % 2 != 0 {
        return Err(Error::Dimension(format!(
            "volume term needs an even dimension, got {d}"
        )));
    }
    let n = d / 2;
    let vol = volume(k, cfg)?;
    Ok((vol.value / ball_volume(d)).powf(1.0 / n as f64))
}

// ---------------------------------------------------------------------
// Volumes of Minkowski sums and intersections (without materializing
// the body when that would be expensive)
// ---------------------------------------------------------------------

/// Frank-Wolfe membership test for `x in conv(D) + E`, phrased as
/// `min_{a in D} (x - a)^T A_E (x - a) <= 1` with exact line search.
enum FwDomain<'a> {
    Vertices(&'a [DVector<f64>]),
    Ellipsoid {
        center: &'a DVector<f64>,
        inv_shape: DMatrix<f64>,
    },
}

impl FwDomain<'_> {
    fn lmo(&self, g: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Vertices(verts) => {
                let mut best = (f64::INFINITY, 0usize);
                for (i, v) in verts.iter().enumerate() {
                    let val = g.dot(v);
                    if val < best.0 {
                        best = (val, i);
                    }
                }
                verts[best.1].clone()
            }
            Self::Ellipsoid { center, inv_shape } => {
                let dir = inv_shape * g;
                let denom = dir.dot(g).max(0.0).sqrt();
                if denom <= 1e-300 {
                    (*center).clone()
                } else {
                    *center - &dir / denom
                }
            }
        }
    }

    fn start(&self, x: &DVector<f64>, shape: &DMatrix<f64>) -> DVector<f64> {
        match self {
            Self::Vertices(verts) => {
                let mut best = (f64::INFINITY, 0usize);
                for (i, v) in verts.iter().enumerate() {
                    let y = x - v;
                    let val = (shape * &y).dot(&y);
                    if val < best.0 {
                        best = (val, i);
                    }
                }
                verts[best.1].clone()
            }
            Self::Ellipsoid { center, .. } => (*center).clone(),
        }
    }
}

fn fw_member_of_domain_plus_ellipsoid(
    x: &DVector<f64>,
    domain: &FwDomain<'_>,
    shape: &DMatrix<f64>,
) -> bool {
    let mut a = domain.start(x, shape);
    for _ in 0..80 {
        let diff = x - &a;
        let grad_half = shape * &diff; // -grad/2
        let f = grad_half.dot(&diff);
        if f <= 1.0 + 1e-12 {
            return true;
        }
        let s = domain.lmo(&(-&grad_half * 2.0));
        let gap = 2.0 * grad_half.dot(&(&s - &a));
        if f - gap > 1.0 {
            return false;
        }
        let dir = &s - &a;
        let denom = (shape * &dir).dot(&dir);
        if denom <= 1e-300 {
            break;
        }
        let gamma = (grad_half.dot(&dir) / denom).clamp(0.0, 1.0);
        if gamma <= 1e-16 {
            break;
        }
        a += dir * gamma;
    }
    let diff = x - &a;
    (shape * &diff).dot(&diff) <= 1.0
}

fn sum_proposal(a: &ConvexBody, b: &ConvexBody) -> Result<ProposalSampler> {
    let d = a.dim();
    let outer = |k: &ConvexBody| -> Result<(DVector<f64>, f64)> {
        match k {
            ConvexBody::Ellipsoid(e) => {
                let (min_eig, _) = e.shape_eig_range();
                Ok((e.center().clone(), 1.0 / min_eig.sqrt()))
            }
            _ => {
                let p = k.to_vpolytope()?;
                let mut c = DVector::zeros(d);
                for v in p.vertices() {
                    c += v;
                }
                c /= p.vertices().len() as f64;
                let r = p
                    .vertices()
                    .iter()
                    .map(|v| (v - &c).norm())
                    .fold(0.0f64, f64::max);
                Ok((c, r))
            }
        }
    };
    let (ca, ra) = outer(a)?;
    let (cb, rb) = outer(b)?;
    let radius = ra + rb;
    let ball = Ellipsoid::ball(d, radius)?;
    Ok(ProposalSampler {
        center: ca + cb,
        half_map: ball.shape_pow(-0.5),
        volume: ball.volume(),
        dim: d,
    })
}

/// Volume of `A + B`. Exact through ellipsoid homothety, coordinate-pair
/// products, or an explicit hull when the candidate count is small;
/// Monte Carlo with a certified membership test otherwise.
pub fn sum_volume(a: &ConvexBody, b: &ConvexBody, cfg: &McConfig, seed: u64) -> Result<VolumeEstimate> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension("summands have different dimensions".into()));
    }
    let d = a.dim();

    if let (ConvexBody::Ellipsoid(_), ConvexBody::Ellipsoid(_)) = (a, b) {
        if let ConvexBody::Ellipsoid(e) = minkowski_sum_if_homothetic(a, b)? {
            return Ok(VolumeEstimate::exact(e.volume()));
        }
    }

    let poly_a = !matches!(a, ConvexBody::Ellipsoid(_));
    let poly_b = !matches!(b, ConvexBody::Ellipsoid(_));

    if poly_a && poly_b && d <= 6 {
        let va = a.to_vpolytope()?;
        let vb = b.to_vpolytope()?;
        if d >= 4 {
            if let (Some(fa), Some(fb)) = (
                body::pair_product_factors(va.vertices()),
                body::pair_product_factors(vb.vertices()),
            ) {
                let mut vol = 1.0;
                for (pa, pb) in fa.iter().zip(fb.iter()) {
                    let sum = planar::minkowski2d(&planar::hull2d(pa), &planar::hull2d(pb));
                    vol *= planar::area2d(&sum);
                }
                return Ok(VolumeEstimate::exact(vol));
            }
        }
        if va.vertices().len() * vb.vertices().len() <= cfg.exact_sum_cap {
            let sum = body::sum_vpolytopes(&va, &vb)?;
            return volume_exact(&sum);
        }
        // Monte Carlo over the sum with an LP membership certificate.
        let proposal = sum_proposal(a, b)?;
        let averts = va.vertices().to_vec();
        let bverts = vb.vertices().to_vec();
        let hits = mc_acceptance(&proposal, cfg.samples, seed, |x| {
            linprog::point_in_sum(&averts, &bverts, x).unwrap_or(false)
        });
        return binomial_estimate(proposal.volume, hits, cfg.samples, seed);
    }

    // At least one ellipsoid operand (non-homothetic case): Frank-Wolfe
    // membership in domain + ellipsoid.
    let (ellipsoid, other) = match (a, b) {
        (ConvexBody::Ellipsoid(e), o) => (e.clone(), o.clone()),
        (o, ConvexBody::Ellipsoid(e)) => (e.clone(), o.clone()),
        _ => {
            // both polytopes but d > 6: LP membership
            let va = a.to_vpolytope()?;
            let vb = b.to_vpolytope()?;
            let proposal = sum_proposal(a, b)?;
            let averts = va.vertices().to_vec();
            let bverts = vb.vertices().to_vec();
            let hits = mc_acceptance(&proposal, cfg.samples, seed, |x| {
                linprog::point_in_sum(&averts, &bverts, x).unwrap_or(false)
            });
            return binomial_estimate(proposal.volume, hits, cfg.samples, seed);
        }
    };
    let proposal = sum_proposal(a, b)?;
    // shift x by the ellipsoid center so the quadratic uses the centered shape
    let e_center = ellipsoid.center().clone();
    let shape = ellipsoid.shape().clone();
    match &other {
        ConvexBody::Ellipsoid(e2) => {
            let inv_shape = e2.shape_pow(-1.0);
            let center = e2.center().clone();
            let hits = mc_acceptance(&proposal, cfg.samples, seed, |x| {
                let domain = FwDomain::Ellipsoid {
                    center: &center,
                    inv_shape: inv_shape.clone(),
                };
                fw_member_of_domain_plus_ellipsoid(&(x - &e_center), &domain, &shape)
            });
            binomial_estimate(proposal.volume, hits, cfg.samples, seed)
        }
        _ => {
            let vp = other.to_vpolytope()?;
            let verts = vp.vertices().to_vec();
            let hits = mc_acceptance(&proposal, cfg.samples, seed, |x| {
                let domain = FwDomain::Vertices(&verts);
                fw_member_of_domain_plus_ellipsoid(&(x - &e_center), &domain, &shape)
            });
            binomial_estimate(proposal.volume, hits, cfg.samples, seed)
        }
    }
}

fn minkowski_sum_if_homothetic(a: &ConvexBody, b: &ConvexBody) -> Result<ConvexBody> {
    body::minkowski_sum(a, b)
}

/// Monte Carlo volume of `K intersect E`, sampling from the ellipsoid.
pub fn intersection_volume_mc(
    k: &ConvexBody,
    e: &Ellipsoid,
    samples: u64,
    seed: u64,
) -> Result<VolumeEstimate> {
    if k.dim() != e.dim() {
        return Err(Error::Dimension("intersection dimension mismatch".into()));
    }
    let oracle = GaugeOracle::build(k)?;
    let center = e.center().clone();
    let shifted_oracle = move |x: &DVector<f64>| oracle.contains(x);
    let proposal = ProposalSampler::from_ellipsoid(e);
    let _ = center;
    let hits = mc_acceptance(&proposal, samples, seed, shifted_oracle);
    binomial_estimate(proposal.volume, hits, samples, seed)
}
