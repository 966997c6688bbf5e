//! Incremental convex hull with simplicial facets, for dimensions 2..=8.
//!
//! Beneath-beyond construction: start from a full-dimensional simplex of
//! extreme spread, then insert remaining points farthest-first, replacing
//! the facets visible from each new point by the cone over its horizon
//! ridges. Points within the visibility tolerance of the current hull are
//! dropped, so coplanar clusters never create facets of their own. A final
//! pass keeps only genuinely extreme points (those whose incident facet
//! normals span the full dimension).

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerances as tol;

/// One simplicial facet of the hull: `d` point indices, a unit outward
/// normal and the offset `b` with `<n, x> <= b` on the hull.
#[derive(Debug, Clone)]
pub struct HullFacet {
    pub vertex_ids: Vec<usize>,
    pub normal: DVector<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct ConvexHull {
    pub dim: usize,
    /// Deduplicated input points (facet ids index into this list).
    pub points: Vec<DVector<f64>>,
    pub facets: Vec<HullFacet>,
    /// Indices of extreme points among `points`.
    pub extreme_ids: Vec<usize>,
    pub interior_point: DVector<f64>,
}

/// Merge points closer than `tol::POINT_MERGE`, keeping first occurrences
/// in a deterministic (lexicographically sorted) order.
pub fn dedup_points(points: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(points[b].iter())
            .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(points.len());
    'outer: for &i in &idx {
        let p = &points[i];
        // sorted order puts near-duplicates next to each other in the
        // first coordinate; scan back while it stays within tolerance
        for q in out.iter().rev() {
            if (q[0] - p[0]).abs() > tol::POINT_MERGE {
                break;
            }
            if (q - p).norm() <= tol::POINT_MERGE {
                continue 'outer;
            }
        }
        out.push(p.clone());
    }
    out
}

/// Unit normal of the hyperplane through `d` points, via cofactor
/// expansion of the (d-1) x d matrix of edge vectors.
fn hyperplane_normal(pts: &[&DVector<f64>]) -> Option<DVector<f64>> {
    let d = pts[0].len();
    let rows = d - 1;
    let mut edges = DMatrix::zeros(rows, d);
    for r in 0..rows {
        edges.set_row(r, &(pts[r + 1] - pts[0]).transpose());
    }
    let mut n = DVector::zeros(d);
    for k in 0..d {
        let minor = edges.clone().remove_column(k);
        let det = minor.determinant();
        n[k] = if k % 2 == 0 { det } else { -det };
    }
    let norm = n.norm();
    if !norm.is_finite() || norm <= 0.0 {
        return None;
    }
    Some(n / norm)
}

struct Builder {
    points: Vec<DVector<f64>>,
    facets: Vec<HullFacet>,
    alive: Vec<bool>,
    ridges: HashMap<Vec<usize>, Vec<usize>>,
    interior: DVector<f64>,
    eps: f64,
}

impl Builder {
    fn ridge_keys(vertex_ids: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..vertex_ids.len()).map(move |skip| {
            let mut key: Vec<usize> = vertex_ids
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &v)| v)
                .collect();
            key.sort_unstable();
            key
        })
    }

    fn add_facet(&mut self, vertex_ids: Vec<usize>) -> Result<()> {
        let pts: Vec<&DVector<f64>> = vertex_ids.iter().map(|&i| &self.points[i]).collect();
        let mut normal = hyperplane_normal(&pts).ok_or_else(|| {
            Error::Numerical("degenerate facet encountered during hull construction".into())
        })?;
        let mut offset = vertex_ids
            .iter()
            .map(|&i| normal.dot(&self.points[i]))
            .sum::<f64>()
            / vertex_ids.len() as f64;
        if normal.dot(&self.interior) > offset {
            normal = -normal;
            offset = -offset;
        }
        let id = self.facets.len();
        for key in Self::ridge_keys(&vertex_ids) {
            self.ridges.entry(key).or_default().push(id);
        }
        self.facets.push(HullFacet {
            vertex_ids,
            normal,
            offset,
        });
        self.alive.push(true);
        Ok(())
    }

    fn remove_facet(&mut self, id: usize) {
        self.alive[id] = false;
        let keys: Vec<Vec<usize>> = Self::ridge_keys(&self.facets[id].vertex_ids).collect();
        for key in keys {
            if let Some(list) = self.ridges.get_mut(&key) {
                list.retain(|&f| f != id);
                if list.is_empty() {
                    self.ridges.remove(&key);
                }
            }
        }
    }

    fn insert_point(&mut self, pid: usize) -> Result<()> {
        let p = self.points[pid].clone();
        let visible: Vec<usize> = (0..self.facets.len())
            .filter(|&f| self.alive[f] && self.facets[f].normal.dot(&p) - self.facets[f].offset > self.eps)
            .collect();
        if visible.is_empty() {
            return Ok(());
        }
        let mut visible_mark = vec![false; self.facets.len()];
        for &f in &visible {
            visible_mark[f] = true;
        }
        // Horizon: ridges between a visible facet and a surviving one.
        let mut horizon: Vec<Vec<usize>> = Vec::new();
        for &f in &visible {
            for key in Self::ridge_keys(&self.facets[f].vertex_ids) {
                let list = self
                    .ridges
                    .get(&key)
                    .ok_or_else(|| Error::Numerical("hull ridge bookkeeping broke".into()))?;
                let crosses = list.iter().any(|&g| !visible_mark[g]);
                if crosses {
                    horizon.push(key);
                }
            }
        }
        for &f in &visible {
            self.remove_facet(f);
        }
        for ridge in horizon {
            let mut verts = ridge;
            verts.push(pid);
            self.add_facet(verts)?;
        }
        Ok(())
    }
}

/// Convex hull of a point cloud. Errors when the points do not affinely
/// span the ambient dimension.
pub fn convex_hull(input: &[DVector<f64>]) -> Result<ConvexHull> {
    if input.is_empty() {
        return Err(Error::Domain("cannot hull an empty point set".into()));
    }
    let dim = input[0].len();
    if dim < 2 {
        return Err(Error::Dimension("hull needs ambient dimension >= 2".into()));
    }
    if input.iter().any(|p| p.len() != dim) {
        return Err(Error::Dimension("hull points have mixed dimensions".into()));
    }
    let points = dedup_points(input);
    if points.len() < dim + 1 {
        return Err(Error::Domain(format!(
            "point set is degenerate: {} distinct points in dimension {dim}",
            points.len()
        )));
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, &x| m.max(x.abs()))
        .max(1.0);
    let degenerate_tol = 1e-10 * scale;

    // Initial simplex: greedy farthest-point selection through an
    // orthonormal basis of the affine span.
    let mut simplex: Vec<usize> = vec![0];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for _ in 0..dim {
        let mut best = (0usize, 0.0f64);
        for (i, p) in points.iter().enumerate() {
            if simplex.contains(&i) {
                continue;
            }
            let mut r = p - &points[simplex[0]];
            for b in &basis {
                let c = b.dot(&r);
                r -= b * c;
            }
            let norm = r.norm();
            if norm > best.1 {
                best = (i, norm);
            }
        }
        if best.1 <= degenerate_tol {
            return Err(Error::Domain(
                "point set is degenerate: no full-dimensional simplex found".into(),
            ));
        }
        simplex.push(best.0);
        let mut r = &points[best.0] - &points[simplex[0]];
        for b in &basis {
            let c = b.dot(&r);
            r -= b * c;
        }
        basis.push(r.clone() / r.norm());
    }

    let mut interior = DVector::zeros(dim);
    for &i in &simplex {
        interior += &points[i];
    }
    interior /= simplex.len() as f64;

    let mut builder = Builder {
        points,
        facets: Vec::new(),
        alive: Vec::new(),
        ridges: HashMap::new(),
        interior,
        eps: 1e-9 * scale,
    };
    for skip in 0..simplex.len() {
        let verts: Vec<usize> = simplex
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, &v)| v)
            .collect();
        builder.add_facet(verts)?;
    }

    // Farthest-first insertion keeps the hull growing outward and lets
    // most interior points exit on the cheap visibility test.
    let mut order: Vec<usize> = (0..builder.points.len())
        .filter(|i| !simplex.contains(i))
        .collect();
    order.sort_by(|&a, &b| {
        let da = (&builder.points[a] - &builder.interior).norm();
        let db = (&builder.points[b] - &builder.interior).norm();
        db.partial_cmp(&da).unwrap().then(a.cmp(&b))
    });
    for pid in order {
        builder.insert_point(pid)?;
    }

    let facets: Vec<HullFacet> = builder
        .facets
        .into_iter()
        .zip(builder.alive)
        .filter_map(|(f, alive)| alive.then_some(f))
        .collect();

    // Extreme points: referenced corners whose incident facet normals
    // span R^d; corners on a lower-dimensional face fail the rank test.
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (fid, f) in facets.iter().enumerate() {
        for &v in &f.vertex_ids {
            incident.entry(v).or_default().push(fid);
        }
    }
    let mut extreme_ids: Vec<usize> = Vec::new();
    for (&v, fids) in &incident {
        let mut normals = DMatrix::zeros(fids.len(), dim);
        for (r, &fid) in fids.iter().enumerate() {
            normals.set_row(r, &facets[fid].normal.transpose());
        }
        let svals = normals.singular_values();
        let rank = svals.iter().filter(|&&s| s > 1e-7).count();
        if rank == dim {
            extreme_ids.push(v);
        }
    }
    extreme_ids.sort_unstable();

    Ok(ConvexHull {
        dim,
        points: builder.points,
        facets,
        extreme_ids,
        interior_point: builder.interior,
    })
}

impl ConvexHull {
    /// Exact volume by pyramid decomposition over the simplicial facets.
    pub fn volume(&self) -> f64 {
        let d = self.dim;
        let mut total = 0.0;
        let fact: f64 = (1..=d).map(|k| k as f64).product();
        let mut m = DMatrix::zeros(d, d);
        for f in &self.facets {
            for (c, &vid) in f.vertex_ids.iter().enumerate() {
                m.set_column(c, &(&self.points[vid] - &self.interior_point));
            }
            total += m.determinant().abs() / fact;
        }
        total
    }

    /// Center of mass via the same pyramid decomposition.
    pub fn centroid(&self) -> DVector<f64> {
        let d = self.dim;
        let fact: f64 = (1..=d).map(|k| k as f64).product();
        let mut m = DMatrix::zeros(d, d);
        let mut weighted = DVector::zeros(d);
        let mut total = 0.0;
        for f in &self.facets {
            let mut centroid = self.interior_point.clone();
            for (c, &vid) in f.vertex_ids.iter().enumerate() {
                m.set_column(c, &(&self.points[vid] - &self.interior_point));
                centroid += &self.points[vid];
            }
            centroid /= (d + 1) as f64;
            let w = m.determinant().abs() / fact;
            weighted += centroid * w;
            total += w;
        }
        weighted / total
    }

    pub fn extreme_points(&self) -> Vec<DVector<f64>> {
        self.extreme_ids
            .iter()
            .map(|&i| self.points[i].clone())
            .collect()
    }

    /// Outward halfspaces, deduplicating the coplanar simplices of a
    /// single geometric facet.
    pub fn halfspaces(&self) -> Vec<(DVector<f64>, f64)> {
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut out = Vec::new();
        for f in &self.facets {
            let mut key: Vec<i64> = f
                .normal
                .iter()
                .map(|&x| (x * 1e9).round() as i64)
                .collect();
            key.push((f.offset * 1e9).round() as i64);
            if seen.insert(key, ()).is_none() {
                out.push((f.normal.clone(), f.offset));
            }
        }
        out
    }

    /// Distance from the origin to the nearest facet plane together with
    /// the index of that facet (the first one in construction order on
    /// ties). Requires the origin to be interior.
    pub fn min_facet_distance(&self) -> Result<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (i, f) in self.facets.iter().enumerate() {
            if f.offset <= 0.0 {
                return Err(Error::Domain(
                    "origin is not interior to the hull".into(),
                ));
            }
            if best.map_or(true, |(d, _)| f.offset < d - 1e-15) {
                best = Some((f.offset, i));
            }
        }
        best.ok_or_else(|| Error::Numerical("hull has no facets".into()))
    }
}

// ---------------------------------------------------------------------
// Planar helpers: exact 2D hulls used by the coordinate-pair product
// fast path and by low-level oracles in tests.
// ---------------------------------------------------------------------

pub mod planar {
    /// Convex hull in the plane (monotone chain), counter-clockwise,
    /// collinear points dropped.
    pub fn hull2d(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = points.to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-12 && (a.1 - b.1).abs() <= 1e-12);
        if pts.len() <= 2 {
            return pts;
        }
        let scale = pts
            .iter()
            .map(|p| p.0.abs().max(p.1.abs()))
            .fold(1.0f64, f64::max);
        let eps = 1e-12 * scale * scale;
        let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
            (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
        };
        let mut lower: Vec<(f64, f64)> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<(f64, f64)> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }

    /// Signed area of a counter-clockwise polygon (shoelace).
    pub fn area2d(hull: &[(f64, f64)]) -> f64 {
        let n = hull.len();
        let mut a = 0.0;
        for i in 0..n {
            let p = hull[i];
            let q = hull[(i + 1) % n];
            a += p.0 * q.1 - q.0 * p.1;
        }
        a / 2.0
    }

    /// Minkowski sum of two planar hulls via pairwise sums.
    pub fn minkowski2d(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut sums = Vec::with_capacity(a.len() * b.len());
        for p in a {
            for q in b {
                sums.push((p.0 + q.0, p.1 + q.1));
            }
        }
        hull2d(&sums)
    }

    /// Distance from the origin to the nearest edge line of a CCW polygon
    /// containing the origin.
    pub fn inradius2d(hull: &[(f64, f64)]) -> Option<f64> {
        let n = hull.len();
        if n < 3 {
            return None;
        }
        let mut best = f64::INFINITY;
        for i in 0..n {
            let p = hull[i];
            let q = hull[(i + 1) % n];
            let (ex, ey) = (q.0 - p.0, q.1 - p.1);
            let len = (ex * ex + ey * ey).sqrt();
            if len <= 0.0 {
                continue;
            }
            // outward normal of a CCW edge
            let (nx, ny) = (ey / len, -ex / len);
            let dist = nx * p.0 + ny * p.1;
            if dist <= 0.0 {
                return None;
            }
            best = best.min(dist);
        }
        Some(best)
    }

    /// Centroid of a polygon via the triangle fan from the vertex mean.
    pub fn centroid2d(hull: &[(f64, f64)]) -> (f64, f64) {
        let n = hull.len();
        let cx: f64 = hull.iter().map(|p| p.0).sum::<f64>() / n as f64;
        let cy: f64 = hull.iter().map(|p| p.1).sum::<f64>() / n as f64;
        let mut area = 0.0;
        let mut mx = 0.0;
        let mut my = 0.0;
        for i in 0..n {
            let p = hull[i];
            let q = hull[(i + 1) % n];
            let w = (p.0 - cx) * (q.1 - cy) - (q.0 - cx) * (p.1 - cy);
            area += w;
            mx += w * (cx + p.0 + q.0) / 3.0;
            my += w * (cy + p.1 + q.1) / 3.0;
        }
        (mx / area, my / area)
    }
}
