//! Convex bodies and the geometric operations the capacity pipeline
//! consumes: linear images, Minkowski sums, difference bodies, support and
//! gauge evaluation, inradius, contact certificates, barycenters.
//!
//! A body is a V-polytope (vertex list), an H-polytope (halfspace list) or
//! an ellipsoid `{x : <A(x - c), x - c> <= 1}`. The working representation
//! for sums and hulls is the V-polytope; ellipsoids stay exact wherever
//! the operation has a closed form (linear images, sums of homothets,
//! difference bodies) and are grid-approximated only as a last resort.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hull::{self, planar};
use crate::linprog;
use crate::rng;
use crate::symplectic::StandardStructure;
use crate::tolerances as tol;

const ELLIPSOID_GRID_SEED: u64 = 0x5eed_e111;
const SUM_CANDIDATE_HARD_CAP: usize = 2_000_000;

/// One halfspace `<normal, x> <= offset`.
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub normal: DVector<f64>,
    pub offset: f64,
}

/// Vertex-represented polytope.
#[derive(Debug, Clone)]
pub struct VPolytope {
    vertices: Vec<DVector<f64>>,
}

/// Halfspace-represented polytope.
#[derive(Debug, Clone)]
pub struct HPolytope {
    halfspaces: Vec<Halfspace>,
}

/// Ellipsoid `{x : <shape (x - center), x - center> <= 1}`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: DVector<f64>,
    shape: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub enum ConvexBody {
    VPolytope(VPolytope),
    HPolytope(HPolytope),
    Ellipsoid(Ellipsoid),
}

fn affine_rank(vertices: &[DVector<f64>]) -> usize {
    let d = vertices[0].len();
    let scale = vertices
        .iter()
        .flat_map(|v| v.iter())
        .fold(1.0f64, |m, &x| m.max(x.abs()));
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vertices.iter().skip(1) {
        let mut r = v - &vertices[0];
        for b in &basis {
            let c = b.dot(&r);
            r -= b * c;
        }
        let norm = r.norm();
        if norm > 1e-10 * scale {
            basis.push(r / norm);
            if basis.len() == d {
                break;
            }
        }
    }
    basis.len()
}

impl VPolytope {
    /// Validated constructor: at least d+1 affinely independent vertices.
    pub fn new(vertices: Vec<DVector<f64>>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Domain("polytope needs vertices".into()));
        }
        let d = vertices[0].len();
        if vertices.iter().any(|v| v.len() != d) {
            return Err(Error::Dimension("vertices have mixed dimensions".into()));
        }
        if vertices.len() < d + 1 || affine_rank(&vertices) < d {
            return Err(Error::Domain(
                "polytope is degenerate: vertices do not affinely span the space".into(),
            ));
        }
        Ok(Self { vertices })
    }

    /// Skips the full-dimensionality check. Intended for lower-dimensional
    /// operands of Minkowski sums (single points, segments).
    pub fn from_points_unchecked(vertices: Vec<DVector<f64>>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    fn coordinate_scale(&self) -> f64 {
        self.vertices
            .iter()
            .flat_map(|v| v.iter())
            .fold(1.0f64, |m, &x| m.max(x.abs()))
    }
}

impl HPolytope {
    /// Validated constructor: non-empty and bounded.
    pub fn new(halfspaces: Vec<Halfspace>) -> Result<Self> {
        if halfspaces.is_empty() {
            return Err(Error::Domain("halfspace body needs constraints".into()));
        }
        let d = halfspaces[0].normal.len();
        if halfspaces.iter().any(|h| h.normal.len() != d) {
            return Err(Error::Dimension("halfspaces have mixed dimensions".into()));
        }
        if halfspaces.iter().any(|h| h.normal.norm() < 1e-14) {
            return Err(Error::Domain("halfspace with zero normal".into()));
        }
        let body = Self { halfspaces };
        // feasibility, then boundedness of the recession cone
        let normals: Vec<DVector<f64>> = body.halfspaces.iter().map(|h| h.normal.clone()).collect();
        let offsets: Vec<f64> = body.halfspaces.iter().map(|h| h.offset).collect();
        let e1 = DVector::from_fn(d, |i, _| if i == 0 { 1.0 } else { 0.0 });
        linprog::support_of_halfspaces(&normals, &offsets, &e1)?;
        for k in 0..d {
            for sign in [-1.0, 1.0] {
                let mut u = DVector::zeros(d);
                u[k] = sign;
                if recession_direction_feasible(&normals, &u)? {
                    return Err(Error::Domain(
                        "halfspace body is unbounded".into(),
                    ));
                }
            }
        }
        Ok(body)
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn dim(&self) -> usize {
        self.halfspaces[0].normal.len()
    }
}

/// Is there `u` with `A u <= 0` and `<c, u> = 1`?
fn recession_direction_feasible(normals: &[DVector<f64>], c: &DVector<f64>) -> Result<bool> {
    let d = c.len();
    let m = normals.len();
    // variables u+ (d), u- (d), slack (m)
    let mut a = DMatrix::zeros(m + 1, 2 * d + m);
    let mut b = DVector::zeros(m + 1);
    for i in 0..m {
        for k in 0..d {
            a[(i, k)] = normals[i][k];
            a[(i, d + k)] = -normals[i][k];
        }
        a[(i, 2 * d + i)] = 1.0;
    }
    for k in 0..d {
        a[(m, k)] = c[k];
        a[(m, d + k)] = -c[k];
    }
    b[m] = 1.0;
    let cost = DVector::zeros(2 * d + m);
    Ok(matches!(
        linprog::solve_equality_form(&a, &b, &cost)?,
        linprog::LpOutcome::Optimal { .. }
    ))
}

impl Ellipsoid {
    /// Validated constructor: positive definite symmetric shape matrix.
    pub fn new(center: DVector<f64>, shape: DMatrix<f64>) -> Result<Self> {
        let d = center.len();
        if shape.nrows() != d || shape.ncols() != d {
            return Err(Error::Dimension(
                "ellipsoid center and shape dimensions differ".into(),
            ));
        }
        let scale = shape.norm().max(1.0);
        if (&shape - shape.transpose()).norm() > tol::SYM * scale {
            return Err(Error::Domain("ellipsoid shape matrix is not symmetric".into()));
        }
        let sym = (&shape + shape.transpose()) * 0.5;
        let min_eig = sym
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig <= tol::PD {
            return Err(Error::Domain(format!(
                "ellipsoid shape matrix is not positive definite (min eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self { center, shape: sym })
    }

    pub fn unit_ball(d: usize) -> Self {
        Self {
            center: DVector::zeros(d),
            shape: DMatrix::identity(d, d),
        }
    }

    /// Ball of the given radius about the origin.
    pub fn ball(d: usize, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Domain("ball radius must be positive".into()));
        }
        Ok(Self {
            center: DVector::zeros(d),
            shape: DMatrix::identity(d, d) / (radius * radius),
        })
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn is_centered(&self) -> bool {
        let scale = self.shape.norm().max(1.0).sqrt();
        self.center.norm() <= 1e-10 * scale.max(1.0)
    }

    /// Symmetric power of the shape matrix.
    pub fn shape_pow(&self, p: f64) -> DMatrix<f64> {
        crate::eigen::sym_pow(&self.shape, p)
    }

    /// Largest/smallest eigenvalues of the shape matrix.
    pub fn shape_eig_range(&self) -> (f64, f64) {
        let eigs = self.shape.clone().symmetric_eigenvalues();
        let max = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        (min, max)
    }

    /// Exact Lebesgue volume.
    pub fn volume(&self) -> f64 {
        crate::volume::ball_volume(self.dim()) / self.shape.determinant().sqrt()
    }

    /// Gauge about the center: `sqrt(<A(x-c), x-c>)`.
    pub fn centered_gauge(&self, x: &DVector<f64>) -> f64 {
        let y = x - &self.center;
        (&self.shape * &y).dot(&y).max(0.0).sqrt()
    }

    /// Boundary grid used when a polytope stand-in is unavoidable:
    /// `2 d ceil((1/eps)^((d-1)/2))` seeded directions mapped to the
    /// boundary.
    pub fn boundary_grid(&self) -> Vec<DVector<f64>> {
        let d = self.dim();
        let n_dir = 2 * d
            * ((1.0 / tol::ELLIPSOID_APPROX).powf((d as f64 - 1.0) / 2.0)).ceil() as usize;
        let l = self.shape_pow(-0.5);
        rng::seeded_directions(d, n_dir, ELLIPSOID_GRID_SEED)
            .into_iter()
            .map(|u| &self.center + &l * u)
            .collect()
    }
}

impl ConvexBody {
    pub fn vpolytope(vertices: Vec<DVector<f64>>) -> Result<Self> {
        Ok(Self::VPolytope(VPolytope::new(vertices)?))
    }

    pub fn hpolytope(halfspaces: Vec<Halfspace>) -> Result<Self> {
        Ok(Self::HPolytope(HPolytope::new(halfspaces)?))
    }

    pub fn ellipsoid(center: DVector<f64>, shape: DMatrix<f64>) -> Result<Self> {
        Ok(Self::Ellipsoid(Ellipsoid::new(center, shape)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::VPolytope(p) => p.dim(),
            Self::HPolytope(p) => p.dim(),
            Self::Ellipsoid(e) => e.dim(),
        }
    }

    /// Vertex representation; enumerates halfspace intersections for
    /// H-polytopes and grid-approximates ellipsoids.
    pub fn to_vpolytope(&self) -> Result<VPolytope> {
        match self {
            Self::VPolytope(p) => Ok(p.clone()),
            Self::HPolytope(p) => h_to_vpolytope(p),
            Self::Ellipsoid(e) => VPolytope::new(e.boundary_grid()),
        }
    }

    pub fn translate(&self, t: &DVector<f64>) -> Result<Self> {
        if t.len() != self.dim() {
            return Err(Error::Dimension("translation dimension mismatch".into()));
        }
        Ok(match self {
            Self::VPolytope(p) => Self::VPolytope(VPolytope {
                vertices: p.vertices.iter().map(|v| v + t).collect(),
            }),
            Self::HPolytope(p) => Self::HPolytope(HPolytope {
                halfspaces: p
                    .halfspaces
                    .iter()
                    .map(|h| Halfspace {
                        normal: h.normal.clone(),
                        offset: h.offset + h.normal.dot(t),
                    })
                    .collect(),
            }),
            Self::Ellipsoid(e) => Self::Ellipsoid(Ellipsoid {
                center: &e.center + t,
                shape: e.shape.clone(),
            }),
        })
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if lambda <= 0.0 {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        Ok(match self {
            Self::VPolytope(p) => Self::VPolytope(VPolytope {
                vertices: p.vertices.iter().map(|v| v * lambda).collect(),
            }),
            Self::HPolytope(p) => Self::HPolytope(HPolytope {
                halfspaces: p
                    .halfspaces
                    .iter()
                    .map(|h| Halfspace {
                        normal: h.normal.clone(),
                        offset: h.offset * lambda,
                    })
                    .collect(),
            }),
            Self::Ellipsoid(e) => Self::Ellipsoid(Ellipsoid {
                center: &e.center * lambda,
                shape: &e.shape / (lambda * lambda),
            }),
        })
    }

    pub fn negate(&self) -> Result<Self> {
        let d = self.dim();
        linear_image(self, &(-DMatrix::<f64>::identity(d, d)))
    }
}

fn h_to_vpolytope(p: &HPolytope) -> Result<VPolytope> {
    let d = p.dim();
    let m = p.halfspaces.len();
    let combos = binomial(m, d);
    if combos > 2_000_000 {
        return Err(Error::Numerical(format!(
            "halfspace vertex enumeration would visit {combos} subsets; too many facets"
        )));
    }
    let mut vertices: Vec<DVector<f64>> = Vec::new();
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        let mut a = DMatrix::zeros(d, d);
        let mut b = DVector::zeros(d);
        for (r, &i) in subset.iter().enumerate() {
            a.set_row(r, &p.halfspaces[i].normal.transpose());
            b[r] = p.halfspaces[i].offset;
        }
        if let Some(x) = a.lu().solve(&b) {
            let scale = x.norm().max(1.0);
            if p
                .halfspaces
                .iter()
                .all(|h| h.normal.dot(&x) <= h.offset + 1e-9 * scale)
            {
                vertices.push(x);
            }
        }
        // next d-combination of {0..m}
        let mut k = d;
        loop {
            if k == 0 {
                let verts = hull::dedup_points(&vertices);
                return VPolytope::new(verts);
            }
            k -= 1;
            if subset[k] + 1 <= m - (d - k) {
                subset[k] += 1;
                for j in k + 1..d {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

// ---------------------------------------------------------------------
// Coordinate-pair product structure
// ---------------------------------------------------------------------

/// If the vertex set is exactly a cartesian product across the n
/// coordinate pairs `(x_j, y_j)`, return the per-pair 2D point sets.
/// Sums, volumes, inradii and barycenters then factor plane by plane.
pub(crate) fn pair_product_factors(vertices: &[DVector<f64>]) -> Option<Vec<Vec<(f64, f64)>>> {
    let d = vertices[0].len();
    if d < 4 || d % 2 != 0 {
        return None;
    }
    let n = d / 2;
    let key = |x: f64| (x * 1e12).round() as i64;
    let mut distinct: HashMap<Vec<i64>, ()> = HashMap::new();
    for v in vertices {
        distinct.insert(v.iter().map(|&x| key(x)).collect(), ());
    }
    let mut factors: Vec<Vec<(f64, f64)>> = Vec::with_capacity(n);
    let mut product: u128 = 1;
    for k in 0..n {
        let mut set: HashMap<(i64, i64), (f64, f64)> = HashMap::new();
        for v in vertices {
            let p = (v[2 * k], v[2 * k + 1]);
            set.insert((key(p.0), key(p.1)), p);
        }
        product = product.saturating_mul(set.len() as u128);
        if product > 1_000_000 {
            return None;
        }
        let mut pts: Vec<(f64, f64)> = set.into_values().collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        factors.push(pts);
    }
    (product == distinct.len() as u128).then_some(factors)
}

fn cartesian_from_planes(planes: &[Vec<(f64, f64)>]) -> Option<Vec<DVector<f64>>> {
    let n = planes.len();
    let total: u128 = planes
        .iter()
        .map(|p| p.len() as u128)
        .product();
    if total == 0 || total > 200_000 {
        return None;
    }
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(total as usize);
    let mut idx = vec![0usize; n];
    loop {
        let mut v = DVector::zeros(2 * n);
        for k in 0..n {
            let p = planes[k][idx[k]];
            v[2 * k] = p.0;
            v[2 * k + 1] = p.1;
        }
        out.push(v);
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < planes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == n {
                return Some(out);
            }
        }
    }
}

// ---------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------

/// Image of a body under an invertible linear map. Vertices map directly,
/// halfspace normals by the inverse transpose, ellipsoid shapes by
/// congruence with the inverse. Volume scales by `|det M|` exactly.
pub fn linear_image(k: &ConvexBody, m: &DMatrix<f64>) -> Result<ConvexBody> {
    let d = k.dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Dimension("matrix and body dimensions differ".into()));
    }
    let lu = m.clone().lu();
    let det = lu.determinant();
    if det.abs() < 1e-13 {
        return Err(Error::Domain("linear image requires an invertible matrix".into()));
    }
    Ok(match k {
        ConvexBody::VPolytope(p) => ConvexBody::VPolytope(VPolytope {
            vertices: p.vertices.iter().map(|v| m * v).collect(),
        }),
        ConvexBody::HPolytope(p) => {
            let mt = m.transpose().lu();
            let halfspaces = p
                .halfspaces
                .iter()
                .map(|h| {
                    mt.solve(&h.normal)
                        .map(|normal| Halfspace {
                            normal,
                            offset: h.offset,
                        })
                        .ok_or_else(|| Error::Numerical("failed to map halfspace normal".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            ConvexBody::HPolytope(HPolytope { halfspaces })
        }
        ConvexBody::Ellipsoid(e) => {
            let m_inv = lu
                .try_inverse()
                .ok_or_else(|| Error::Numerical("failed to invert map".into()))?;
            let shape = m_inv.transpose() * &e.shape * &m_inv;
            let shape = (&shape + shape.transpose()) * 0.5;
            ConvexBody::Ellipsoid(Ellipsoid {
                center: m * &e.center,
                shape,
            })
        }
    })
}

/// Sum of two ellipsoids that are homothets of each other (shape matrices
/// proportional): again an ellipsoid, exactly.
fn try_homothetic_ellipsoid_sum(a: &Ellipsoid, b: &Ellipsoid) -> Option<Ellipsoid> {
    let d = a.dim() as f64;
    let det_a = a.shape.determinant();
    let det_b = b.shape.determinant();
    // b.shape ~ a.shape / t^2
    let t = (det_a / det_b).powf(1.0 / (2.0 * d));
    if !t.is_finite() || t <= 0.0 {
        return None;
    }
    let rescaled = &a.shape / (t * t);
    if (&rescaled - &b.shape).norm() > 1e-9 * a.shape.norm().max(b.shape.norm()) {
        return None;
    }
    let factor = (1.0 + t) * (1.0 + t);
    Some(Ellipsoid {
        center: &a.center + &b.center,
        shape: &a.shape / factor,
    })
}

fn sum_vertex_candidates(a: &[DVector<f64>], b: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let count = a.len().checked_mul(b.len()).unwrap_or(usize::MAX);
    if count > SUM_CANDIDATE_HARD_CAP {
        return Err(Error::Numerical(format!(
            "Minkowski sum with {count} candidate vertices is too large; use a Monte Carlo volume instead"
        )));
    }
    let mut sums = Vec::with_capacity(count);
    for p in a {
        for q in b {
            sums.push(p + q);
        }
    }
    Ok(hull::dedup_points(&sums))
}

pub(crate) fn sum_vpolytopes(a: &VPolytope, b: &VPolytope) -> Result<VPolytope> {
    let d = a.dim();
    if d != b.dim() {
        return Err(Error::Dimension("summands have different dimensions".into()));
    }
    if d >= 4 {
        if let (Some(fa), Some(fb)) = (
            pair_product_factors(&a.vertices),
            pair_product_factors(&b.vertices),
        ) {
            let planes: Vec<Vec<(f64, f64)>> = fa
                .iter()
                .zip(fb.iter())
                .map(|(pa, pb)| planar::minkowski2d(&planar::hull2d(pa), &planar::hull2d(pb)))
                .collect();
            if let Some(vertices) = cartesian_from_planes(&planes) {
                return Ok(VPolytope { vertices });
            }
        }
    }
    let candidates = sum_vertex_candidates(&a.vertices, &b.vertices)?;
    if d == 2 {
        let pts: Vec<(f64, f64)> = candidates.iter().map(|v| (v[0], v[1])).collect();
        let hull = planar::hull2d(&pts);
        return Ok(VPolytope {
            vertices: hull
                .into_iter()
                .map(|(x, y)| DVector::from_vec(vec![x, y]))
                .collect(),
        });
    }
    if candidates.len() < d + 1 || affine_rank(&candidates) < d {
        // lower-dimensional sum (e.g. point + point); keep the raw points
        return Ok(VPolytope {
            vertices: candidates,
        });
    }
    let hull = hull::convex_hull(&candidates)?;
    Ok(VPolytope {
        vertices: hull.extreme_points(),
    })
}

/// Minkowski sum. Homothetic ellipsoid pairs stay exact ellipsoids; any
/// other ellipsoid operand is replaced by its boundary grid polytope.
/// The support function of the result satisfies `h_{P+Q} = h_P + h_Q`.
pub fn minkowski_sum(p: &ConvexBody, q: &ConvexBody) -> Result<ConvexBody> {
    if p.dim() != q.dim() {
        return Err(Error::Dimension(format!(
            "Minkowski sum of bodies in different dimensions ({} vs {})",
            p.dim(),
            q.dim()
        )));
    }
    if let (ConvexBody::Ellipsoid(a), ConvexBody::Ellipsoid(b)) = (p, q) {
        if let Some(e) = try_homothetic_ellipsoid_sum(a, b) {
            return Ok(ConvexBody::Ellipsoid(e));
        }
    }
    let a = p.to_vpolytope()?;
    let b = q.to_vpolytope()?;
    Ok(ConvexBody::VPolytope(sum_vpolytopes(&a, &b)?))
}

/// The difference body `K - K = K + (-K)`; always centrally symmetric.
/// For an ellipsoid this is exactly the centered ellipsoid at twice the
/// size.
pub fn difference_body(k: &ConvexBody) -> Result<ConvexBody> {
    match k {
        ConvexBody::Ellipsoid(e) => Ok(ConvexBody::Ellipsoid(Ellipsoid {
            center: DVector::zeros(e.dim()),
            shape: &e.shape / 4.0,
        })),
        _ => minkowski_sum(k, &k.negate()?),
    }
}

/// Support function `h_K(u) = max { <u, x> : x in K }`.
pub fn support(k: &ConvexBody, u: &DVector<f64>) -> Result<f64> {
    if u.len() != k.dim() {
        return Err(Error::Dimension("direction dimension mismatch".into()));
    }
    match k {
        ConvexBody::VPolytope(p) => Ok(p
            .vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)),
        ConvexBody::HPolytope(p) => {
            let normals: Vec<DVector<f64>> =
                p.halfspaces.iter().map(|h| h.normal.clone()).collect();
            let offsets: Vec<f64> = p.halfspaces.iter().map(|h| h.offset).collect();
            linprog::support_of_halfspaces(&normals, &offsets, u)
        }
        ConvexBody::Ellipsoid(e) => {
            let inv = e.shape_pow(-1.0);
            Ok(e.center.dot(u) + (&inv * u).dot(u).max(0.0).sqrt())
        }
    }
}

/// Gauge (Minkowski functional) `min { t > 0 : x in tK }` of a body with
/// the origin in its interior. V-polytopes go through a linear program
/// over vertex convex combinations.
pub fn gauge(k: &ConvexBody, x: &DVector<f64>) -> Result<f64> {
    if x.len() != k.dim() {
        return Err(Error::Dimension("point dimension mismatch".into()));
    }
    match k {
        ConvexBody::VPolytope(p) => {
            if !origin_interior_vpoly(&p.vertices)? {
                return Err(Error::Domain(
                    "gauge requires the origin in the interior of the body".into(),
                ));
            }
            if x.norm() == 0.0 {
                return Ok(0.0);
            }
            let s = linprog::max_scale_in_hull(&p.vertices, x)?;
            if s <= 0.0 {
                return Err(Error::Numerical("gauge LP returned a zero scale".into()));
            }
            Ok(1.0 / s)
        }
        ConvexBody::HPolytope(p) => {
            if p.halfspaces.iter().any(|h| h.offset <= 0.0) {
                return Err(Error::Domain(
                    "gauge requires the origin strictly inside (all offsets positive)".into(),
                ));
            }
            Ok(p
                .halfspaces
                .iter()
                .map(|h| h.normal.dot(x) / h.offset)
                .fold(0.0f64, f64::max))
        }
        ConvexBody::Ellipsoid(e) => {
            if !e.is_centered() {
                return Err(Error::Domain(
                    "gauge of an ellipsoid requires it centered at the origin".into(),
                ));
            }
            Ok(e.centered_gauge(x))
        }
    }
}

fn origin_interior_vpoly(vertices: &[DVector<f64>]) -> Result<bool> {
    // maximize t with V(mu + t 1) = 0, sum(mu) + m t = 1, mu >= 0, t free
    let d = vertices[0].len();
    let m = vertices.len();
    let w: DVector<f64> = vertices.iter().fold(DVector::zeros(d), |acc, v| acc + v);
    let mut a = DMatrix::zeros(d + 1, m + 2);
    for (j, v) in vertices.iter().enumerate() {
        for i in 0..d {
            a[(i, j)] = v[i];
        }
        a[(d, j)] = 1.0;
    }
    for i in 0..d {
        a[(i, m)] = w[i];
        a[(i, m + 1)] = -w[i];
    }
    a[(d, m)] = m as f64;
    a[(d, m + 1)] = -(m as f64);
    let mut b = DVector::zeros(d + 1);
    b[d] = 1.0;
    let mut c = DVector::zeros(m + 2);
    c[m] = -1.0;
    c[m + 1] = 1.0;
    match linprog::solve_equality_form(&a, &b, &c)? {
        linprog::LpOutcome::Optimal { x, .. } => Ok(x[m] - x[m + 1] > 1e-12),
        _ => Ok(false),
    }
}

/// Whether the vertex (or defining) data of `k` is symmetric about the
/// origin to within `tolerance` (relative to the coordinate scale).
pub fn is_centrally_symmetric(k: &ConvexBody, tolerance: f64) -> Result<bool> {
    match k {
        ConvexBody::VPolytope(p) => {
            let scale = p.coordinate_scale();
            Ok(p.vertices.iter().all(|v| {
                let neg = -v;
                p.vertices
                    .iter()
                    .any(|w| (w - &neg).norm() <= tolerance * scale)
            }))
        }
        ConvexBody::HPolytope(p) => {
            let scale = p
                .halfspaces
                .iter()
                .map(|h| h.offset.abs().max(h.normal.norm()))
                .fold(1.0f64, f64::max);
            Ok(p.halfspaces.iter().all(|h| {
                p.halfspaces.iter().any(|g| {
                    (&g.normal + &h.normal).norm() <= tolerance * scale
                        && (g.offset - h.offset).abs() <= tolerance * scale
                })
            }))
        }
        ConvexBody::Ellipsoid(e) => Ok(e.center.norm() <= tolerance * (1.0 + e.shape.norm())),
    }
}

/// Whether `K = iK` to within `tolerance`.
pub fn is_i_invariant(k: &ConvexBody, tolerance: f64) -> Result<bool> {
    let st = StandardStructure::for_dim(k.dim())?;
    match k {
        ConvexBody::VPolytope(p) => {
            let scale = p.coordinate_scale();
            Ok(p.vertices.iter().all(|v| {
                let jv = st.apply_i(v);
                p.vertices
                    .iter()
                    .any(|w| (w - &jv).norm() <= tolerance * scale)
            }))
        }
        ConvexBody::HPolytope(p) => {
            let scale = p
                .halfspaces
                .iter()
                .map(|h| h.offset.abs().max(h.normal.norm()))
                .fold(1.0f64, f64::max);
            Ok(p.halfspaces.iter().all(|h| {
                let ja = st.apply_i(&h.normal);
                p.halfspaces.iter().any(|g| {
                    (&g.normal - &ja).norm() <= tolerance * scale
                        && (g.offset - h.offset).abs() <= tolerance * scale
                })
            }))
        }
        ConvexBody::Ellipsoid(e) => {
            let j = st.j();
            let conj = j.transpose() * &e.shape * &j;
            Ok(e.center.norm() <= tolerance * (1.0 + e.shape.norm())
                && (&conj - &e.shape).norm() <= tolerance * e.shape.norm())
        }
    }
}

/// Inradius value together with an exactness flag; the flag drops to
/// approximate when the dimension exceeds the facet enumeration limit and
/// a sampled bound is returned instead.
#[derive(Debug, Clone, Copy)]
pub struct InradiusEstimate {
    pub value: f64,
    pub approximate: bool,
}

/// Largest radius of a ball about the origin inside the body, with no
/// symmetry requirement. Exact via facet distances for d <= 6.
pub(crate) fn ball_radius_at_origin(k: &ConvexBody) -> Result<InradiusEstimate> {
    let d = k.dim();
    match k {
        ConvexBody::HPolytope(p) => {
            let mut best = f64::INFINITY;
            for h in &p.halfspaces {
                let dist = h.offset / h.normal.norm();
                if dist <= 0.0 {
                    return Err(Error::Domain("origin is not interior".into()));
                }
                best = best.min(dist);
            }
            Ok(InradiusEstimate {
                value: best,
                approximate: false,
            })
        }
        ConvexBody::Ellipsoid(e) => {
            if !e.is_centered() {
                return Err(Error::Domain("inradius about the origin needs a centered ellipsoid".into()));
            }
            let (_, max_eig) = e.shape_eig_range();
            Ok(InradiusEstimate {
                value: 1.0 / max_eig.sqrt(),
                approximate: false,
            })
        }
        ConvexBody::VPolytope(p) => {
            if d <= 6 {
                if d >= 4 {
                    if let Some(factors) = pair_product_factors(&p.vertices) {
                        let mut best = f64::INFINITY;
                        let mut ok = true;
                        for f in &factors {
                            match planar::inradius2d(&planar::hull2d(f)) {
                                Some(r) => best = best.min(r),
                                None => {
                                    ok = false;
                                    break;
                                }
                            }
                        }
                        if ok {
                            return Ok(InradiusEstimate {
                                value: best,
                                approximate: false,
                            });
                        }
                    }
                }
                if d == 2 {
                    let pts: Vec<(f64, f64)> = p.vertices.iter().map(|v| (v[0], v[1])).collect();
                    let r = planar::inradius2d(&planar::hull2d(&pts))
                        .ok_or_else(|| Error::Domain("origin is not interior".into()))?;
                    return Ok(InradiusEstimate {
                        value: r,
                        approximate: false,
                    });
                }
                let hull = hull::convex_hull(&p.vertices)?;
                let (r, _) = hull.min_facet_distance()?;
                Ok(InradiusEstimate {
                    value: r,
                    approximate: false,
                })
            } else {
                Ok(InradiusEstimate {
                    value: sampled_inradius(p),
                    approximate: true,
                })
            }
        }
    }
}

/// Sampled upper estimate of the inradius with local refinement, for
/// dimensions beyond the facet enumeration limit.
fn sampled_inradius(p: &VPolytope) -> f64 {
    let d = p.dim();
    let dirs = rng::seeded_directions(d, 10_000, 0x1a2b_3c4d);
    let h = |u: &DVector<f64>| {
        p.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best_u = dirs[0].clone();
    let mut best = f64::INFINITY;
    for u in &dirs {
        let val = h(u);
        if val < best {
            best = val;
            best_u = u.clone();
        }
    }
    // subgradient refinement on the sphere
    let mut u = best_u;
    let mut step = 0.1;
    for _ in 0..200 {
        let (mut grad, mut val) = (DVector::zeros(d), f64::NEG_INFINITY);
        for v in &p.vertices {
            let s = v.dot(&u);
            if s > val {
                val = s;
                grad = v.clone();
            }
        }
        let tangent = &grad - &u * grad.dot(&u);
        let candidate_raw = &u - tangent * step;
        let norm = candidate_raw.norm();
        if norm < 1e-12 {
            break;
        }
        let candidate = candidate_raw / norm;
        let cval = h(&candidate);
        if cval < best {
            best = cval;
            u = candidate;
        } else {
            step *= 0.5;
            if step < 1e-6 {
                break;
            }
        }
    }
    best
}

/// Largest `r` with `r B^d` inside a centrally symmetric body.
pub fn inradius(k: &ConvexBody) -> Result<f64> {
    Ok(inradius_estimate(k)?.value)
}

pub fn inradius_estimate(k: &ConvexBody) -> Result<InradiusEstimate> {
    if !is_centrally_symmetric(k, tol::BODY_SYM)? {
        return Err(Error::Domain(
            "inradius requires a centrally symmetric body about the origin".into(),
        ));
    }
    ball_radius_at_origin(k)
}

/// Center of mass. Exact for polytopes via the facet pyramid
/// decomposition of the hull; the center for ellipsoids.
pub fn barycenter(k: &ConvexBody) -> Result<DVector<f64>> {
    match k {
        ConvexBody::Ellipsoid(e) => Ok(e.center.clone()),
        ConvexBody::HPolytope(_) => barycenter(&ConvexBody::VPolytope(k.to_vpolytope()?)),
        ConvexBody::VPolytope(p) => {
            let d = p.dim();
            if d == 2 {
                let pts: Vec<(f64, f64)> = p.vertices.iter().map(|v| (v[0], v[1])).collect();
                let (x, y) = planar::centroid2d(&planar::hull2d(&pts));
                return Ok(DVector::from_vec(vec![x, y]));
            }
            if d >= 4 && d % 2 == 0 {
                if let Some(factors) = pair_product_factors(&p.vertices) {
                    let mut c = DVector::zeros(d);
                    for (k2, f) in factors.iter().enumerate() {
                        let (x, y) = planar::centroid2d(&planar::hull2d(f));
                        c[2 * k2] = x;
                        c[2 * k2 + 1] = y;
                    }
                    return Ok(c);
                }
            }
            if d > 6 {
                return Err(Error::Numerical(
                    "exact barycenter beyond dimension 6 is not supported".into(),
                ));
            }
            Ok(hull::convex_hull(&p.vertices)?.centroid())
        }
    }
}

/// Contact data for the inscribed ball of an i-invariant symmetric body:
/// a boundary point `x` at distance `r` from the origin plus the four
/// bounding hyperplanes `|<v, x/r>| <= r`, `|<v, ix/r>| <= r` that confine
/// the projection of the body onto `span{x, ix}` to a square of edge 2r.
#[derive(Debug, Clone)]
pub struct ContactCertificate {
    pub point: DVector<f64>,
    pub radius: f64,
    /// `| |x| - r |` actually achieved by the contact point.
    pub residual: f64,
}

impl ContactCertificate {
    /// Constraint directions `(x/r, ix/r)`.
    pub fn square_directions(&self) -> Result<(DVector<f64>, DVector<f64>)> {
        let st = StandardStructure::for_dim(self.point.len())?;
        let xhat = &self.point / self.radius;
        let ixhat = st.apply_i(&xhat);
        Ok((xhat, ixhat))
    }

    /// Largest violation of the four halfspace constraints over the body;
    /// non-positive means the certificate holds.
    pub fn max_violation(&self, k: &ConvexBody) -> Result<f64> {
        let (xhat, ixhat) = self.square_directions()?;
        let mut worst = f64::NEG_INFINITY;
        for dir in [&xhat, &ixhat] {
            for sign in [-1.0, 1.0] {
                let h = support(k, &(dir * sign))?;
                worst = worst.max(h - self.radius);
            }
        }
        Ok(worst)
    }
}

/// Contact certificate at the inradius of an i-invariant symmetric body.
pub fn contact_certificate(k: &ConvexBody, r: f64) -> Result<ContactCertificate> {
    if !is_i_invariant(k, tol::BODY_SYM)? {
        return Err(Error::Domain(
            "contact certificate requires an i-invariant body".into(),
        ));
    }
    if !is_centrally_symmetric(k, tol::BODY_SYM)? {
        return Err(Error::Domain(
            "contact certificate requires a centrally symmetric body".into(),
        ));
    }
    let point = match k {
        ConvexBody::Ellipsoid(e) => {
            let eig = e.shape.clone().symmetric_eigen();
            let mut best = (0usize, f64::NEG_INFINITY);
            for (i, &v) in eig.eigenvalues.iter().enumerate() {
                if v > best.1 {
                    best = (i, v);
                }
            }
            let mut u: DVector<f64> = eig.eigenvectors.column(best.0).into();
            let lead = u.iter().position(|c| c.abs() > 1e-8).unwrap_or(0);
            if u[lead] < 0.0 {
                u = -u;
            }
            u * r
        }
        ConvexBody::HPolytope(p) => {
            let mut best: Option<(f64, usize)> = None;
            for (i, h) in p.halfspaces.iter().enumerate() {
                let dist = h.offset / h.normal.norm();
                if best.map_or(true, |(d0, _)| dist < d0 - 1e-15) {
                    best = Some((dist, i));
                }
            }
            let (_, i) = best.ok_or_else(|| Error::Domain("empty halfspace body".into()))?;
            let h = &p.halfspaces[i];
            (&h.normal / h.normal.norm()) * r
        }
        ConvexBody::VPolytope(p) => {
            let d = p.dim();
            if d >= 4 {
                if let Some(factors) = pair_product_factors(&p.vertices) {
                    if let Some(x) = product_contact(&factors, d) {
                        x
                    } else {
                        hull_contact(p, r)?
                    }
                } else {
                    hull_contact(p, r)?
                }
            } else {
                hull_contact(p, r)?
            }
        }
    };
    let residual = (point.norm() - r).abs();
    if residual > 1e-6 * r.max(1.0) {
        return Err(Error::Numerical(format!(
            "no contact point found at the inradius: residual {residual:.3e}"
        )));
    }
    let cert = ContactCertificate {
        point,
        radius: r,
        residual,
    };
    let violation = cert.max_violation(k)?;
    if violation > 1e-6 * r.max(1.0) {
        return Err(Error::Numerical(format!(
            "contact certificate constraints fail by {violation:.3e}"
        )));
    }
    Ok(cert)
}

fn product_contact(factors: &[Vec<(f64, f64)>], d: usize) -> Option<DVector<f64>> {
    let mut best: Option<(f64, usize, (f64, f64))> = None;
    for (k, f) in factors.iter().enumerate() {
        let hull = planar::hull2d(f);
        let n = hull.len();
        for i in 0..n {
            let p = hull[i];
            let q = hull[(i + 1) % n];
            let (ex, ey) = (q.0 - p.0, q.1 - p.1);
            let len = (ex * ex + ey * ey).sqrt();
            if len <= 0.0 {
                continue;
            }
            let (nx, ny) = (ey / len, -ex / len);
            let dist = nx * p.0 + ny * p.1;
            if dist <= 0.0 {
                return None;
            }
            if best.map_or(true, |(b, _, _)| dist < b - 1e-15) {
                best = Some((dist, k, (nx, ny)));
            }
        }
    }
    let (dist, k, (nx, ny)) = best?;
    let mut x = DVector::zeros(d);
    x[2 * k] = dist * nx;
    x[2 * k + 1] = dist * ny;
    Some(x)
}

fn hull_contact(p: &VPolytope, r: f64) -> Result<DVector<f64>> {
    if p.dim() == 2 {
        let pts: Vec<(f64, f64)> = p.vertices.iter().map(|v| (v[0], v[1])).collect();
        let hull = planar::hull2d(&pts);
        let n = hull.len();
        let mut best: Option<(f64, (f64, f64))> = None;
        for i in 0..n {
            let a = hull[i];
            let b = hull[(i + 1) % n];
            let (ex, ey) = (b.0 - a.0, b.1 - a.1);
            let len = (ex * ex + ey * ey).sqrt();
            if len <= 0.0 {
                continue;
            }
            let (nx, ny) = (ey / len, -ex / len);
            let dist = nx * a.0 + ny * a.1;
            if dist > 0.0 && best.map_or(true, |(d0, _)| dist < d0 - 1e-15) {
                best = Some((dist, (nx, ny)));
            }
        }
        let (dist, (nx, ny)) =
            best.ok_or_else(|| Error::Domain("origin is not interior".into()))?;
        let _ = dist;
        return Ok(DVector::from_vec(vec![r * nx, r * ny]));
    }
    let hull = hull::convex_hull(&p.vertices)?;
    let (_, fid) = hull.min_facet_distance()?;
    let f = &hull.facets[fid];
    Ok(&f.normal * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::rotation;

    fn v(coords: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(coords)
    }

    fn cube(d: usize, s: f64) -> ConvexBody {
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

    fn cross(d: usize, s: f64) -> ConvexBody {
        let mut verts = Vec::new();
        for i in 0..d {
            for sign in [-1.0, 1.0] {
                verts.push(DVector::from_fn(d, |k, _| if k == i { sign * s } else { 0.0 }));
            }
        }
        ConvexBody::vpolytope(verts).unwrap()
    }

    fn same_vertex_sets(a: &[DVector<f64>], b: &[DVector<f64>], tol: f64) -> bool {
        a.len() == b.len()
            && a.iter()
                .all(|p| b.iter().any(|q| (p - q).norm() <= tol))
    }

    #[test]
    fn linear_image_identity_fixes_bodies() {
        let k = cube(2, 1.0);
        let img = linear_image(&k, &DMatrix::identity(2, 2)).unwrap();
        match (&k, &img) {
            (ConvexBody::VPolytope(a), ConvexBody::VPolytope(b)) => {
                assert!(same_vertex_sets(a.vertices(), b.vertices(), 1e-12));
            }
            _ => panic!("variant changed"),
        }
    }

    #[test]
    fn square_is_invariant_under_quarter_rotation() {
        let k = cube(2, 1.0);
        let img = linear_image(&k, &rotation(1, std::f64::consts::FRAC_PI_2)).unwrap();
        match (&k, &img) {
            (ConvexBody::VPolytope(a), ConvexBody::VPolytope(b)) => {
                assert!(same_vertex_sets(a.vertices(), b.vertices(), 1e-12));
            }
            _ => panic!("variant changed"),
        }
    }

    #[test]
    fn ellipse_image_shape() {
        let e = ConvexBody::Ellipsoid(Ellipsoid::unit_ball(2));
        let m = DMatrix::from_diagonal(&v(&[2.0, 0.5]));
        let img = linear_image(&e, &m).unwrap();
        match img {
            ConvexBody::Ellipsoid(e) => {
                let expected = DMatrix::from_diagonal(&v(&[0.25, 4.0]));
                assert!((e.shape() - expected).norm() < 1e-12);
            }
            _ => panic!("expected ellipsoid"),
        }
    }

    #[test]
    fn singular_map_is_rejected() {
        let k = cube(2, 1.0);
        let m = DMatrix::zeros(2, 2);
        assert!(matches!(linear_image(&k, &m), Err(Error::Domain(_))));
    }

    #[test]
    fn unit_square_sum() {
        let sq = ConvexBody::vpolytope(vec![
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[0.0, 1.0]),
            v(&[1.0, 1.0]),
        ])
        .unwrap();
        let sum = minkowski_sum(&sq, &sq).unwrap();
        match sum {
            ConvexBody::VPolytope(p) => {
                let expected = vec![v(&[0.0, 0.0]), v(&[2.0, 0.0]), v(&[0.0, 2.0]), v(&[2.0, 2.0])];
                assert!(same_vertex_sets(p.vertices(), &expected, 1e-12));
            }
            _ => panic!("expected polytope"),
        }
    }

    #[test]
    fn triangle_difference_body_is_the_hexagon() {
        let t = ConvexBody::vpolytope(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        let diff = difference_body(&t).unwrap();
        match diff {
            ConvexBody::VPolytope(p) => {
                let expected = vec![
                    v(&[1.0, 0.0]),
                    v(&[0.0, 1.0]),
                    v(&[-1.0, 0.0]),
                    v(&[0.0, -1.0]),
                    v(&[1.0, -1.0]),
                    v(&[-1.0, 1.0]),
                ];
                assert!(same_vertex_sets(p.vertices(), &expected, 1e-12));
                assert!(is_centrally_symmetric(&ConvexBody::VPolytope(p), 1e-10).unwrap());
            }
            _ => panic!("expected polytope"),
        }
    }

    #[test]
    fn sum_with_a_point_translates() {
        let k = cube(2, 1.0);
        let point = ConvexBody::VPolytope(VPolytope::from_points_unchecked(vec![v(&[0.0, 0.0])]));
        let sum = minkowski_sum(&k, &point).unwrap();
        match (&k, &sum) {
            (ConvexBody::VPolytope(a), ConvexBody::VPolytope(b)) => {
                assert!(same_vertex_sets(a.vertices(), b.vertices(), 1e-12));
            }
            _ => panic!("variant changed"),
        }
    }

    #[test]
    fn symmetric_difference_body_doubles() {
        let k = cube(2, 1.0);
        let diff = difference_body(&k).unwrap();
        match diff {
            ConvexBody::VPolytope(p) => {
                let expected: Vec<DVector<f64>> = match cube(2, 2.0) {
                    ConvexBody::VPolytope(q) => q.vertices().to_vec(),
                    _ => unreachable!(),
                };
                assert!(same_vertex_sets(p.vertices(), &expected, 1e-10));
            }
            _ => panic!("expected polytope"),
        }
    }

    #[test]
    fn point_bodies_are_rejected_by_the_constructor() {
        assert!(ConvexBody::vpolytope(vec![v(&[0.0, 0.0])]).is_err());
    }

    #[test]
    fn ball_sums_stay_exact_ellipsoids() {
        let b = ConvexBody::Ellipsoid(Ellipsoid::unit_ball(4));
        let sum = minkowski_sum(&b, &b).unwrap();
        match sum {
            ConvexBody::Ellipsoid(e) => {
                assert!((e.shape() - DMatrix::identity(4, 4) / 4.0).norm() < 1e-12);
            }
            _ => panic!("expected exact ellipsoid sum"),
        }
    }

    #[test]
    fn support_and_gauge_basics() {
        let k = cube(3, 1.0);
        let e1 = v(&[1.0, 0.0, 0.0]);
        assert!((support(&k, &e1).unwrap() - 1.0).abs() < 1e-12);
        let ball = ConvexBody::Ellipsoid(Ellipsoid::unit_ball(3));
        let x = v(&[0.3, -0.4, 1.2]);
        assert!((gauge(&ball, &x).unwrap() - x.norm()).abs() < 1e-12);
        // support of a centered ellipsoid has the closed form sqrt(u^T A^{-1} u)
        let shape = DMatrix::from_diagonal(&v(&[1.0, 0.25, 4.0]));
        let e = ConvexBody::Ellipsoid(Ellipsoid::new(DVector::zeros(3), shape.clone()).unwrap());
        let u = v(&[0.2, 0.7, -0.1]);
        let inv = shape.try_inverse().unwrap();
        let expected = (&inv * &u).dot(&u).sqrt();
        assert!((support(&e, &u).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn gauge_of_polytope_matches_halfspace_route() {
        let k = cross(3, 1.0);
        let x = v(&[0.2, 0.3, -0.1]);
        let g = gauge(&k, &x).unwrap();
        assert!((g - 0.6).abs() < 1e-9); // l1 norm
    }

    #[test]
    fn gauge_requires_interior_origin() {
        let t = ConvexBody::vpolytope(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        assert!(matches!(
            gauge(&t, &v(&[0.1, 0.1])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn inradius_examples() {
        assert!((inradius(&cube(4, 1.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((inradius(&cross(2, 1.0)).unwrap() - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
        let b2 = ConvexBody::Ellipsoid(Ellipsoid::ball(4, 2.0).unwrap());
        assert!((inradius(&b2).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inradius_rejects_asymmetric_bodies() {
        let t = ConvexBody::vpolytope(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        assert!(matches!(inradius(&t), Err(Error::Domain(_))));
    }

    #[test]
    fn inradius_scales_linearly() {
        let k = cross(4, 1.3);
        let base = inradius(&k).unwrap();
        for lambda in [0.5, 2.0, 3.0] {
            let scaled = inradius(&k.scale(lambda).unwrap()).unwrap();
            assert!((scaled - lambda * base).abs() <= 1e-9 * scaled.abs());
        }
    }

    #[test]
    fn barycenter_examples() {
        let c = barycenter(&cube(3, 1.0)).unwrap();
        assert!(c.norm() < 1e-12);
        let t = ConvexBody::vpolytope(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        let b = barycenter(&t).unwrap();
        assert!((&b - v(&[1.0 / 3.0, 1.0 / 3.0])).norm() < 1e-12);
        // equivariance under translation
        let shift = v(&[2.0, -1.0]);
        let b2 = barycenter(&t.translate(&shift).unwrap()).unwrap();
        assert!((b2 - (b + shift)).norm() < 1e-12);
    }

    #[test]
    fn contact_certificate_on_the_cube() {
        let k = cube(4, 1.0);
        let r = inradius(&k).unwrap();
        let cert = contact_certificate(&k, r).unwrap();
        assert!((cert.point.norm() - 1.0).abs() < 1e-12);
        assert!(cert.max_violation(&k).unwrap() <= 1e-10);
        // vertex form of the square constraints
        let (xhat, ixhat) = cert.square_directions().unwrap();
        if let ConvexBody::VPolytope(p) = &k {
            for vtx in p.vertices() {
                assert!(vtx.dot(&xhat).abs() <= r + 1e-10);
                assert!(vtx.dot(&ixhat).abs() <= r + 1e-10);
            }
        }
    }

    #[test]
    fn contact_certificate_on_ball_and_cross() {
        let b = ConvexBody::Ellipsoid(Ellipsoid::unit_ball(4));
        let cert = contact_certificate(&b, 1.0).unwrap();
        assert!(cert.max_violation(&b).unwrap() <= 1e-10);

        let c = cross(4, 2.0);
        let r = inradius(&c).unwrap();
        assert!((r - 1.0).abs() < 1e-12); // 2 / sqrt(4)
        let cert = contact_certificate(&c, r).unwrap();
        assert!(cert.max_violation(&c).unwrap() <= 1e-10);
    }

    #[test]
    fn contact_certificate_needs_i_invariance() {
        // symmetric but not i-invariant: a stretched box
        let k = linear_image(&cube(2, 1.0), &DMatrix::from_diagonal(&v(&[2.0, 1.0]))).unwrap();
        assert!(matches!(
            contact_certificate(&k, inradius(&k).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn hpolytope_boundedness_check() {
        let open = vec![
            Halfspace {
                normal: v(&[1.0, 0.0]),
                offset: 1.0,
            },
            Halfspace {
                normal: v(&[0.0, 1.0]),
                offset: 1.0,
            },
        ];
        assert!(matches!(HPolytope::new(open), Err(Error::Domain(_))));
    }

    #[test]
    fn h_to_v_roundtrip_on_a_box() {
        let hs = vec![
            Halfspace { normal: v(&[1.0, 0.0]), offset: 2.0 },
            Halfspace { normal: v(&[-1.0, 0.0]), offset: 2.0 },
            Halfspace { normal: v(&[0.0, 1.0]), offset: 1.0 },
            Halfspace { normal: v(&[0.0, -1.0]), offset: 1.0 },
        ];
        let h = ConvexBody::hpolytope(hs).unwrap();
        let p = h.to_vpolytope().unwrap();
        let expected = vec![v(&[2.0, 1.0]), v(&[2.0, -1.0]), v(&[-2.0, 1.0]), v(&[-2.0, -1.0])];
        assert!(same_vertex_sets(p.vertices(), &expected, 1e-9));
        assert!((inradius(&h).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_structure_is_detected_on_cubes() {
        if let ConvexBody::VPolytope(p) = cube(6, 1.0) {
            let f = pair_product_factors(p.vertices()).unwrap();
            assert_eq!(f.len(), 3);
            assert!(f.iter().all(|pts| pts.len() == 4));
        } else {
            unreachable!()
        }
        // cross-polytopes do not factor
        if let ConvexBody::VPolytope(p) = cross(6, 1.0) {
            assert!(pair_product_factors(p.vertices()).is_none());
        } else {
            unreachable!()
        }
    }

    #[test]
    fn support_additivity_under_sums() {
        let a = cube(2, 1.0);
        let b = cross(2, 1.5);
        let sum = minkowski_sum(&a, &b).unwrap();
        for u in rng::seeded_directions(2, 50, 11) {
            let lhs = support(&sum, &u).unwrap();
            let rhs = support(&a, &u).unwrap() + support(&b, &u).unwrap();
            assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs() + rhs.abs()));
        }
    }
}
