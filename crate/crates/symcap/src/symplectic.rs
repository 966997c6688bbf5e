//! Fixed-dimension linear algebra for the standard symplectic structure.
//!
//! Coordinates on R^{2n} are interleaved `(x1, y1, ..., xn, yn)` and the
//! complex structure J (multiplication by i) is block diagonal with n
//! blocks `[[0, -1], [1, 0]]`. The symplectic form is `w(u, v) = <Ju, v>`.
//!
//! The two factorizations here are the workhorses of the capacity pipeline:
//!
//! * Williamson normal form `A = S^T D S` of a positive definite matrix,
//!   with `S` symplectic and `D` positive diagonal commuting with J. The
//!   diagonal of `D` (one value per (x_j, y_j) pair) is the symplectic
//!   spectrum of `A`.
//! * WDS factorization `T = W D S` of a volume-preserving matrix into an
//!   orthogonal `W`, a complex-linear positive diagonal `D`, and a
//!   symplectic `S`.
//!
//! Both decompositions are non-unique; results are validated by their
//! defining properties, never by comparing against a particular factor.

use nalgebra::{DMatrix, DVector};

use crate::body::Ellipsoid;
use crate::error::{Error, Result};
use crate::tolerances as tol;

/// The standard symplectic/complex structure on R^{2n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StandardStructure {
    n: usize,
}

impl StandardStructure {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    /// Structure for an ambient dimension `2n`; errors on odd input.
    pub fn for_dim(dim: usize) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::Dimension(format!(
                "symplectic structure needs a positive even dimension, got {dim}"
            )));
        }
        Ok(Self { n: dim / 2 })
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// The matrix J of multiplication by i.
    pub fn j(&self) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.dim(), self.dim());
        for k in 0..self.n {
            j[(2 * k, 2 * k + 1)] = -1.0;
            j[(2 * k + 1, 2 * k)] = 1.0;
        }
        j
    }

    /// `J v` without materializing J.
    pub fn apply_i(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(v.len());
        for k in 0..self.n {
            out[2 * k] = -v[2 * k + 1];
            out[2 * k + 1] = v[2 * k];
        }
        out
    }

    /// The symplectic form `w(u, v) = <Ju, v>`.
    pub fn omega(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.apply_i(u).dot(v)
    }

    /// Rotation by `theta` in every (x_j, y_j) plane, i.e. the action of
    /// `e^{i theta}`. Orthogonal and symplectic for every angle.
    pub fn rotation(&self, theta: f64) -> DMatrix<f64> {
        let (s, c) = theta.sin_cos();
        let mut r = DMatrix::zeros(self.dim(), self.dim());
        for k in 0..self.n {
            r[(2 * k, 2 * k)] = c;
            r[(2 * k, 2 * k + 1)] = -s;
            r[(2 * k + 1, 2 * k)] = s;
            r[(2 * k + 1, 2 * k + 1)] = c;
        }
        r
    }
}

/// The complex-structure matrix J on R^{2n}.
pub fn complex_structure(n: usize) -> DMatrix<f64> {
    StandardStructure::new(n).j()
}

/// Rotation by `theta` in each coordinate pair of R^{2n}.
pub fn rotation(n: usize, theta: f64) -> DMatrix<f64> {
    StandardStructure::new(n).rotation(theta)
}

fn check_square_even(m: &DMatrix<f64>) -> Result<StandardStructure> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    StandardStructure::for_dim(m.nrows())
}

/// Frobenius norm of `M^T J M - J`.
pub fn symplectic_residual(m: &DMatrix<f64>) -> Result<f64> {
    let st = check_square_even(m)?;
    let j = st.j();
    Ok((m.transpose() * &j * m - j).norm())
}

/// Membership test for the linear symplectic group: `|M^T J M - J|_F <= tol`.
pub fn is_symplectic(m: &DMatrix<f64>, tolerance: f64) -> Result<bool> {
    Ok(symplectic_residual(m)? <= tolerance)
}

/// Inverse of a symplectic matrix via `S^{-1} = -J S^T J`.
pub fn symplectic_inverse(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let st = check_square_even(s)?;
    let j = st.j();
    Ok(-(&j * s.transpose() * &j))
}

/// A validated symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct PdMatrix {
    m: DMatrix<f64>,
}

impl PdMatrix {
    /// Accepts a matrix that is symmetric to within `tol::SYM` (relative)
    /// and has all eigenvalues above `tol::PD`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let st = check_square_even(&m)?;
        let scale = m.norm().max(1.0);
        let asym = (&m - m.transpose()).norm();
        if asym > tol::SYM * scale {
            return Err(Error::Domain(format!(
                "matrix is not symmetric: |A - A^T| = {asym:.3e}"
            )));
        }
        let sym = (&m + m.transpose()) * 0.5;
        let eigs = sym.clone().symmetric_eigenvalues();
        let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig <= tol::PD {
            return Err(Error::Domain(format!(
                "matrix is not positive definite: min eigenvalue {min_eig:.3e}"
            )));
        }
        let _ = st;
        Ok(Self { m: sym })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Symmetric power `A^p` through the eigendecomposition.
    pub fn sym_pow(&self, p: f64) -> DMatrix<f64> {
        crate::eigen::sym_pow(&self.m, p)
    }
}

/// Result of the Williamson normal form `A = S^T D S`.
#[derive(Debug, Clone)]
pub struct WilliamsonForm {
    /// Symplectic factor.
    pub s: DMatrix<f64>,
    /// Positive diagonal commuting with J: entry `d_j` repeated on each
    /// (x_j, y_j) pair.
    pub d: DMatrix<f64>,
    /// Symplectic spectrum `d_1 >= ... >= d_n`.
    pub spectrum: Vec<f64>,
    /// Set when two spectrum values are closer than `tol::GAP`; the
    /// factors still satisfy the reconstruction contract, but the pairing
    /// of eigenplanes is numerically delicate.
    pub degenerate: bool,
}

impl WilliamsonForm {
    /// `|S^T D S - A|_F / |A|_F`.
    pub fn reconstruction_residual(&self, a: &DMatrix<f64>) -> f64 {
        (self.s.transpose() * &self.d * &self.s - a).norm() / a.norm()
    }
}

fn first_significant_index(v: &DVector<f64>) -> usize {
    v.iter()
        .position(|x| x.abs() > 1e-8)
        .unwrap_or(v.len().saturating_sub(1))
}

/// Williamson normal form of a positive definite matrix.
///
/// Route: with `B = A^{-1/2}`, the antisymmetric matrix `M = B J B` has an
/// orthogonal normal form with 2x2 blocks `[[0, -1/d_j], [1/d_j, 0]]`.
/// The real Schur decomposition of M delivers that form directly (M is
/// normal, so the quasi-triangular factor is block diagonal), and
/// `S = D^{-1/2} Q^T A^{1/2}` then satisfies both `S^T D S = A` and
/// `S^T J S = J`. A Gram-Schmidt pairing of the eigenvectors of `M^T M`
/// serves as fallback when the QR iteration stalls.
pub fn williamson(a: &PdMatrix) -> Result<WilliamsonForm> {
    let st = StandardStructure::for_dim(a.dim())?;
    let a_sqrt = a.sym_pow(0.5);
    let a_inv_sqrt = a.sym_pow(-0.5);
    let m = &a_inv_sqrt * st.j() * &a_inv_sqrt;

    let pairs = match schur_pairs(&m) {
        Some(pairs) => pairs,
        None => gram_schmidt_pairs(&m)?,
    };
    assemble_williamson(&st, pairs, &a_sqrt, a.matrix())
}

/// Eigenplane pairs `(u, v, mu)` with `u^T M v = -mu`, `mu > 0`, from the
/// real Schur form of the antisymmetric matrix `M`.
fn schur_pairs(m: &DMatrix<f64>) -> Option<Vec<(DVector<f64>, DVector<f64>, f64)>> {
    let dim = m.nrows();
    let schur = m.clone().try_schur(1e-14, 100_000)?;
    let (q, t) = schur.unpack();
    let scale = m.norm();
    let mut pairs = Vec::with_capacity(dim / 2);
    let mut k = 0;
    while k < dim {
        if k + 1 >= dim || t[(k + 1, k)].abs() <= 1e-12 * scale {
            // a 1x1 block would mean a real eigenvalue of an invertible
            // antisymmetric matrix
            return None;
        }
        let b = (t[(k, k + 1)] - t[(k + 1, k)]) / 2.0;
        let mu = b.abs();
        if mu <= tol::PD {
            return None;
        }
        let mut u: DVector<f64> = q.column(k).into();
        let mut v: DVector<f64> = q.column(k + 1).into();
        if b > 0.0 {
            std::mem::swap(&mut u, &mut v);
        }
        pairs.push((u, v, mu));
        k += 2;
    }
    Some(pairs)
}

/// Fallback pairing through the eigenvectors of the symmetric `M^T M`.
fn gram_schmidt_pairs(m: &DMatrix<f64>) -> Result<Vec<(DVector<f64>, DVector<f64>, f64)>> {
    let dim = m.nrows();
    let n = dim / 2;
    let eig = (m.transpose() * m).symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap()
            .then(i.cmp(&j))
    });

    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(dim);
    let mut pairs: Vec<(DVector<f64>, DVector<f64>, f64)> = Vec::with_capacity(n);
    let mut cursor = 0usize;
    while pairs.len() < n {
        // Next candidate with a meaningful component outside the span of
        // the columns already selected.
        let mut best: Option<(f64, DVector<f64>)> = None;
        for &idx in order.iter().skip(cursor) {
            let mut r: DVector<f64> = eig.eigenvectors.column(idx).into();
            for q in &chosen {
                let c = q.dot(&r);
                r -= q * c;
            }
            let norm = r.norm();
            if norm > 0.3 {
                best = Some((norm, r / norm));
                break;
            }
        }
        let (_, u) = best.ok_or_else(|| {
            Error::Numerical("failed to complete an eigenplane basis for the Williamson form".into())
        })?;
        cursor += 1;

        let z = m * &u;
        let mu = z.norm();
        if mu <= tol::PD {
            return Err(Error::Numerical(
                "vanishing symplectic eigenvalue encountered".into(),
            ));
        }
        let mut v = z / mu;
        for q in &chosen {
            let c = q.dot(&v);
            v -= q * c;
        }
        let vn = v.norm();
        if vn < 0.5 {
            return Err(Error::Numerical(
                "lost orthogonality while pairing eigenplanes".into(),
            ));
        }
        v /= vn;
        chosen.push(u.clone());
        chosen.push(v.clone());
        pairs.push((u, v, mu));
    }
    Ok(pairs)
}

fn assemble_williamson(
    st: &StandardStructure,
    mut pairs: Vec<(DVector<f64>, DVector<f64>, f64)>,
    a_sqrt: &DMatrix<f64>,
    a: &DMatrix<f64>,
) -> Result<WilliamsonForm> {
    let n = st.half_dim();
    let dim = st.dim();
    if pairs.len() != n {
        return Err(Error::Numerical("eigenplane pairing is incomplete".into()));
    }

    // Deterministic output: positive leading sign per pair, ties in the
    // spectrum ordered by the first significant component of u.
    for (u, v, _) in pairs.iter_mut() {
        let lead = first_significant_index(u);
        if u[lead] < 0.0 {
            *u = -u.clone();
            *v = -v.clone();
        }
    }
    pairs.sort_by(|a, b| {
        let da = 1.0 / a.2;
        let db = 1.0 / b.2;
        db.partial_cmp(&da)
            .unwrap()
            .then_with(|| first_significant_index(&a.0).cmp(&first_significant_index(&b.0)))
    });

    let mut q = DMatrix::zeros(dim, dim);
    let mut d = DMatrix::zeros(dim, dim);
    let mut d_inv_sqrt = DMatrix::zeros(dim, dim);
    let mut spectrum = Vec::with_capacity(n);
    for (k, (u, v, mu)) in pairs.iter().enumerate() {
        let dj = 1.0 / mu;
        spectrum.push(dj);
        q.set_column(2 * k, u);
        q.set_column(2 * k + 1, v);
        d[(2 * k, 2 * k)] = dj;
        d[(2 * k + 1, 2 * k + 1)] = dj;
        let inv_sqrt = mu.sqrt();
        d_inv_sqrt[(2 * k, 2 * k)] = inv_sqrt;
        d_inv_sqrt[(2 * k + 1, 2 * k + 1)] = inv_sqrt;
    }

    let s = &d_inv_sqrt * q.transpose() * a_sqrt;
    let degenerate = spectrum
        .windows(2)
        .any(|w| (w[0] - w[1]).abs() < tol::GAP);

    let form = WilliamsonForm {
        s,
        d,
        spectrum,
        degenerate,
    };
    let rec = form.reconstruction_residual(a);
    let symp = symplectic_residual(&form.s)?;
    if rec > 100.0 * tol::REC || symp > tol::SYMP {
        return Err(Error::Numerical(format!(
            "Williamson factors failed validation: reconstruction {rec:.3e}, symplectic residual {symp:.3e}"
        )));
    }
    Ok(form)
}

/// The symplectic spectrum of a positive definite matrix, descending.
pub fn symplectic_spectrum(a: &PdMatrix) -> Result<Vec<f64>> {
    Ok(williamson(a)?.spectrum)
}

/// Result of the factorization `T = W D S`.
#[derive(Debug, Clone)]
pub struct WdsForm {
    /// Orthogonal factor.
    pub w: DMatrix<f64>,
    /// Complex-linear positive diagonal.
    pub d: DMatrix<f64>,
    /// Symplectic factor.
    pub s: DMatrix<f64>,
}

impl WdsForm {
    /// `|W D S - T|_F / |T|_F`.
    pub fn reconstruction_residual(&self, t: &DMatrix<f64>) -> f64 {
        (&self.w * &self.d * &self.s - t).norm() / t.norm()
    }
}

/// Factor a volume-preserving matrix as `T = W D S` with `W` orthogonal,
/// `D` complex-linear positive diagonal and `S` symplectic.
///
/// Construction: Williamson of `T^T T = S^T D~ S` gives `D = D~^{1/2}` and
/// `W = T S^{-1} D^{-1}`; the output is validated by the defining
/// properties, not by uniqueness.
pub fn wds_decompose(t: &DMatrix<f64>) -> Result<WdsForm> {
    check_square_even(t)?;
    let det = t.determinant();
    if det.abs() < tol::PD {
        return Err(Error::Domain("matrix is singular".into()));
    }
    if (det.abs() - 1.0).abs() > tol::DET {
        return Err(Error::Domain(format!(
            "matrix is not volume preserving: |det T| = {:.12}",
            det.abs()
        )));
    }

    let gram = PdMatrix::new(t.transpose() * t)?;
    let wf = williamson(&gram)?;
    let dim = t.nrows();
    let mut d = DMatrix::zeros(dim, dim);
    let mut d_inv = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let v = wf.d[(i, i)].sqrt();
        d[(i, i)] = v;
        d_inv[(i, i)] = 1.0 / v;
    }
    let s_inv = symplectic_inverse(&wf.s)?;
    let w = t * s_inv * d_inv;

    let form = WdsForm { w, d, s: wf.s };
    let rec = form.reconstruction_residual(t);
    let orth = (form.w.transpose() * &form.w - DMatrix::identity(dim, dim)).norm();
    if rec > 100.0 * tol::REC || orth > tol::SYMP {
        return Err(Error::Numerical(format!(
            "WDS factors failed validation: reconstruction {rec:.3e}, orthogonality {orth:.3e}"
        )));
    }
    Ok(form)
}

/// Exact linear symplectic capacity of a centered ellipsoid:
/// `pi / d_max` where `d_max` is the top of the symplectic spectrum of the
/// shape matrix. Equals `pi r^2` on the ball of radius `r`.
pub fn ellipsoid_capacity(e: &Ellipsoid) -> Result<f64> {
    let scale = e.shape().norm().max(1.0);
    if e.center().norm() > 1e-10 * scale.sqrt().max(1.0) {
        return Err(Error::Domain(
            "ellipsoid capacity requires a centered ellipsoid".into(),
        ));
    }
    let shape = PdMatrix::new(e.shape().clone())?;
    let spectrum = symplectic_spectrum(&shape)?;
    Ok(std::f64::consts::PI / spectrum[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;
    use std::f64::consts::PI;

    pub(crate) fn random_pd(dim: usize, seed: u64) -> DMatrix<f64> {
        // Controlled spectrum in [0.3, 3.0] conjugated by a random rotation.
        let mut r = rng::rng_from_seed(seed);
        let g = DMatrix::from_fn(dim, dim, |_, _| rng::standard_normal(&mut r));
        let qr = g.qr();
        let q = qr.q();
        let mut d = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            d[(i, i)] = 0.3 * (10.0f64).powf(r.gen_range(0.0..1.0));
        }
        &q * d * q.transpose()
    }

    #[test]
    fn j_squares_to_minus_identity_and_is_orthogonal() {
        for n in 1..=4 {
            let st = StandardStructure::new(n);
            let j = st.j();
            let id = DMatrix::identity(2 * n, 2 * n);
            assert_eq!(&j * &j, -&id);
            assert_eq!(j.transpose() * &j, id);
        }
    }

    #[test]
    fn omega_of_v_and_iv_is_norm_squared() {
        let st = StandardStructure::new(3);
        let mut r = rng::rng_from_seed(5);
        for _ in 0..20 {
            let v = rng::normal_vector(&mut r, 6);
            let iv = st.apply_i(&v);
            assert!((st.omega(&v, &iv) - v.norm_squared()).abs() < 1e-12);
            // antisymmetry
            let u = rng::normal_vector(&mut r, 6);
            assert!((st.omega(&u, &v) + st.omega(&v, &u)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_and_j_are_symplectic() {
        let n = 2;
        let id = DMatrix::identity(2 * n, 2 * n);
        assert!(is_symplectic(&id, 1e-12).unwrap());
        assert!(is_symplectic(&complex_structure(n), 1e-12).unwrap());
    }

    #[test]
    fn two_by_two_symplectic_iff_unit_determinant() {
        let good = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]));
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0]));
        assert!(is_symplectic(&good, 1e-12).unwrap());
        assert!(!is_symplectic(&bad, 1e-12).unwrap());
    }

    #[test]
    fn odd_dimension_is_rejected() {
        let m = DMatrix::identity(3, 3);
        assert!(matches!(is_symplectic(&m, 1e-9), Err(Error::Dimension(_))));
    }

    #[test]
    fn rotation_special_angles() {
        let st = StandardStructure::new(2);
        assert!((st.rotation(0.0) - DMatrix::identity(4, 4)).norm() < 1e-15);
        assert!((st.rotation(PI / 2.0) - st.j()).norm() < 1e-15);
        let mut r = rng::rng_from_seed(9);
        let v = rng::normal_vector(&mut r, 4);
        assert!((st.rotation(PI) * &v + &v).norm() < 1e-12);
    }

    #[test]
    fn rotations_are_orthogonal_and_symplectic() {
        let st = StandardStructure::new(3);
        for k in 0..24 {
            let theta = k as f64 * PI / 12.0;
            let r = st.rotation(theta);
            assert!(is_symplectic(&r, 1e-12).unwrap());
            assert!((r.transpose() * &r - DMatrix::identity(6, 6)).norm() < 1e-12);
        }
    }

    #[test]
    fn williamson_of_identity() {
        let a = PdMatrix::new(DMatrix::identity(4, 4)).unwrap();
        let f = williamson(&a).unwrap();
        assert!(f.spectrum.iter().all(|&d| (d - 1.0).abs() < 1e-12));
        assert!((&f.d - DMatrix::identity(4, 4)).norm() < 1e-12);
        assert!(f.reconstruction_residual(a.matrix()) < 1e-12);
        // S is orthogonal-symplectic for A = I
        assert!((f.s.transpose() * &f.s - DMatrix::identity(4, 4)).norm() < 1e-10);
    }

    #[test]
    fn williamson_diag_example() {
        // A = diag(1, 4): spectrum (2), D = 2I, S = diag(2^{-1/2}, 2^{1/2}).
        let a = PdMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]))).unwrap();
        let f = williamson(&a).unwrap();
        assert!((f.spectrum[0] - 2.0).abs() < 1e-12);
        assert!((f.d[(0, 0)] - 2.0).abs() < 1e-12 && (f.d[(1, 1)] - 2.0).abs() < 1e-12);
        assert!(f.reconstruction_residual(a.matrix()) < 1e-12);
        assert!(symplectic_residual(&f.s).unwrap() < 1e-12);
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![
            2f64.powf(-0.5),
            2f64.powf(0.5),
        ]));
        assert!((&f.s - expected).norm() < 1e-10);
    }

    #[test]
    fn williamson_reconstructs_random_pd_matrices() {
        for n in 1..=4 {
            for s in 0..25 {
                let a = PdMatrix::new(random_pd(2 * n, 100 * n as u64 + s)).unwrap();
                let f = williamson(&a).unwrap();
                assert!(
                    f.reconstruction_residual(a.matrix()) <= 1e-10,
                    "n={n} seed={s}"
                );
                assert!(symplectic_residual(&f.s).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn spectrum_is_symplectically_invariant() {
        let st = StandardStructure::new(2);
        let a = PdMatrix::new(random_pd(4, 77)).unwrap();
        let base = symplectic_spectrum(&a).unwrap();
        // Conjugate by a symplectic rotation and a diagonal symplectic map.
        let mut s = st.rotation(0.83);
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![1.7, 1.0 / 1.7, 0.4, 2.5]));
        s = s * diag;
        assert!(is_symplectic(&s, 1e-10).unwrap());
        let b = PdMatrix::new(s.transpose() * a.matrix() * &s).unwrap();
        let moved = symplectic_spectrum(&b).unwrap();
        for (x, y) in base.iter().zip(moved.iter()) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn wds_of_identity_and_rotation() {
        let id = DMatrix::identity(6, 6);
        let f = wds_decompose(&id).unwrap();
        assert!(f.reconstruction_residual(&id) < 1e-12);

        let r = rotation(3, 0.37);
        let f = wds_decompose(&r).unwrap();
        assert!(f.reconstruction_residual(&r) < 1e-10);
        assert!((&f.d - DMatrix::identity(6, 6)).norm() < 1e-9);
    }

    #[test]
    fn wds_of_diagonal_symplectic() {
        let t = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]));
        let f = wds_decompose(&t).unwrap();
        assert!(f.reconstruction_residual(&t) < 1e-12);
        assert!((&f.d - DMatrix::identity(2, 2)).norm() < 1e-10);
        assert!(symplectic_residual(&f.s).unwrap() < 1e-10);
    }

    #[test]
    fn wds_rejects_bad_determinants() {
        let t = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0]));
        match wds_decompose(&t) {
            Err(Error::Domain(msg)) => assert!(msg.contains("det")),
            other => panic!("expected domain error, got {other:?}"),
        }
        let singular = DMatrix::zeros(2, 2);
        assert!(matches!(wds_decompose(&singular), Err(Error::Domain(_))));
    }

    #[test]
    fn ball_capacity_is_pi() {
        for n in 1..=3 {
            let e = Ellipsoid::new(DVector::zeros(2 * n), DMatrix::identity(2 * n, 2 * n)).unwrap();
            assert!((ellipsoid_capacity(&e).unwrap() - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn planar_ellipse_capacity_is_area() {
        // Semi-axes (1, 2): area 2 pi.
        let shape = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.25]));
        let e = Ellipsoid::new(DVector::zeros(2), shape).unwrap();
        assert!((ellipsoid_capacity(&e).unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn capacity_invariant_under_symplectic_images_of_ball() {
        let st = StandardStructure::new(2);
        let s = st.rotation(1.1)
            * DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0 / 3.0, 0.7, 1.0 / 0.7]));
        assert!(is_symplectic(&s, 1e-9).unwrap());
        let s_inv = symplectic_inverse(&s).unwrap();
        let shape = s_inv.transpose() * s_inv;
        let e = Ellipsoid::new(DVector::zeros(4), shape).unwrap();
        assert!((ellipsoid_capacity(&e).unwrap() - PI).abs() < 1e-9);
    }

    #[test]
    fn capacity_rejects_off_center_ellipsoids() {
        let e = Ellipsoid::new(DVector::from_vec(vec![0.5, 0.0]), DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(ellipsoid_capacity(&e), Err(Error::Domain(_))));
    }
}
