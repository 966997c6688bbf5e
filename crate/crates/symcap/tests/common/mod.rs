//! Shared generators for the integration suites.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use symcap::body::{ConvexBody, Ellipsoid};
use symcap::rng;
use symcap::symplectic::rotation;

/// Random positive definite matrix with spectrum in [0.3, 3].
pub fn random_pd(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng::rng_from_seed(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| rng::standard_normal(&mut r));
    let q = g.qr().q();
    let mut d = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        d[(i, i)] = 0.3 * (10.0f64).powf(r.gen_range(0.0..1.0));
    }
    &q * d * q.transpose()
}

/// Random invertible matrix normalized to |det| = 1.
pub fn random_volume_preserving(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng::rng_from_seed(seed);
    loop {
        let g = DMatrix::from_fn(dim, dim, |_, _| rng::standard_normal(&mut r));
        let det = g.determinant();
        if det.abs() > 1e-3 {
            return g / det.abs().powf(1.0 / dim as f64);
        }
    }
}

/// Random orthogonal matrix (QR of a Gaussian).
pub fn random_orthogonal(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng::rng_from_seed(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| rng::standard_normal(&mut r));
    g.qr().q()
}

/// Rotation acting jointly on the x-components and y-components of two
/// coordinate pairs; a unitary map, hence symplectic.
fn pair_mixer(dim: usize, a: usize, b: usize, theta: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim, dim);
    let (c, s) = (theta.cos(), theta.sin());
    for off in 0..2 {
        let (i, j) = (2 * a + off, 2 * b + off);
        m[(i, i)] = c;
        m[(i, j)] = -s;
        m[(j, i)] = s;
        m[(j, j)] = c;
    }
    m
}

/// Shear `y_j += t x_j` in one coordinate pair.
fn pair_shear(dim: usize, pair: usize, t: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim, dim);
    m[(2 * pair + 1, 2 * pair)] = t;
    m
}

/// Diagonal symplectic map `diag(t, 1/t)` in one coordinate pair.
fn pair_stretch(dim: usize, pair: usize, t: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim, dim);
    m[(2 * pair, 2 * pair)] = t;
    m[(2 * pair + 1, 2 * pair + 1)] = 1.0 / t;
    m
}

/// Random symplectic matrix: a product of elementary symplectic factors
/// (global rotations, pair stretches, shears, cross-pair mixers).
pub fn random_symplectic(dim: usize, seed: u64) -> DMatrix<f64> {
    let n = dim / 2;
    let mut r = rng::rng_from_seed(seed);
    let mut s = DMatrix::identity(dim, dim);
    for _ in 0..8 {
        match r.gen_range(0..4) {
            0 => s = rotation(n, r.gen_range(0.0..std::f64::consts::TAU)) * s,
            1 => {
                let p = r.gen_range(0..n);
                s = pair_stretch(dim, p, (2.0f64).powf(r.gen_range(-1.0..1.0))) * s;
            }
            2 => {
                let p = r.gen_range(0..n);
                s = pair_shear(dim, p, r.gen_range(-1.0..1.0)) * s;
            }
            _ => {
                if n >= 2 {
                    let a = r.gen_range(0..n);
                    let mut b = r.gen_range(0..n);
                    while b == a {
                        b = r.gen_range(0..n);
                    }
                    s = pair_mixer(dim, a.min(b), a.max(b), r.gen_range(0.0..1.5)) * s;
                }
            }
        }
    }
    s
}

/// Random centered ellipsoid with shape eigenvalues in [0.25, 4].
pub fn random_centered_ellipsoid(dim: usize, seed: u64) -> Ellipsoid {
    let mut r = rng::rng_from_seed(seed);
    let q = random_orthogonal(dim, seed.wrapping_add(0xe11));
    let mut d = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        d[(i, i)] = 0.25 * (16.0f64).powf(r.gen_range(0.0..1.0));
    }
    let shape = &q * d * q.transpose();
    Ellipsoid::new(DVector::zeros(dim), shape).unwrap()
}

/// Random full-dimensional polytope with vertices on the unit sphere.
pub fn random_polytope(dim: usize, count: usize, seed: u64) -> ConvexBody {
    let mut r = rng::rng_from_seed(seed);
    loop {
        let verts: Vec<DVector<f64>> = (0..count).map(|_| rng::unit_vector(&mut r, dim)).collect();
        if let Ok(b) = ConvexBody::vpolytope(verts) {
            return b;
        }
    }
}

pub fn cube_body(d: usize, s: f64) -> ConvexBody {
    let verts: Vec<DVector<f64>> = (0..(1u32 << d))
        .map(|mask| DVector::from_fn(d, |i, _| if mask >> i & 1 == 1 { s } else { -s }))
        .collect();
    ConvexBody::vpolytope(verts).unwrap()
}

pub fn cross_body(d: usize, s: f64) -> ConvexBody {
    let mut verts = Vec::with_capacity(2 * d);
    for i in 0..d {
        for sign in [-1.0, 1.0] {
            verts.push(DVector::from_fn(d, |k, _| if k == i { sign * s } else { 0.0 }));
        }
    }
    ConvexBody::vpolytope(verts).unwrap()
}

pub fn simplex_body(d: usize, s: f64) -> ConvexBody {
    let mut verts = vec![DVector::zeros(d)];
    for i in 0..d {
        verts.push(DVector::from_fn(d, |k, _| if k == i { s } else { 0.0 }));
    }
    ConvexBody::vpolytope(verts).unwrap()
}

pub fn ball_body(d: usize, radius: f64) -> ConvexBody {
    ConvexBody::Ellipsoid(Ellipsoid::ball(d, radius).unwrap())
}
