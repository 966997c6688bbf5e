//! Small dense linear programming: two-phase tableau simplex with Bland's
//! rule. Problems here have at most ~10 rows (gauge evaluations,
//! membership certificates, boundedness probes), so the full tableau is
//! the right tool.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const EPS: f64 = 1e-11;

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { x: DVector<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

/// Minimize `c . x` subject to `A x = b`, `x >= 0`.
pub fn solve_equality_form(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    c: &DVector<f64>,
) -> Result<LpOutcome> {
    let m = a.nrows();
    let n = a.ncols();
    if b.len() != m || c.len() != n {
        return Err(Error::Dimension("LP shapes are inconsistent".into()));
    }

    // Tableau with artificial columns: [A | I | b], rows flipped so b >= 0.
    let total = n + m;
    let mut t = DMatrix::zeros(m, total + 1);
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = flip * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, total)] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..total).collect();

    // Phase I: minimize the sum of artificials.
    let mut phase1 = vec![0.0; total];
    for j in n..total {
        phase1[j] = 1.0;
    }
    let obj1 = run_simplex(&mut t, &mut basis, &phase1, total, None)?;
    if obj1 > 1e-7 {
        return Ok(LpOutcome::Infeasible);
    }

    // Phase II: original costs, artificials banned from entering.
    let mut phase2 = vec![0.0; total];
    for j in 0..n {
        phase2[j] = c[j];
    }
    let obj2 = match run_simplex(&mut t, &mut basis, &phase2, total, Some(n)) {
        Ok(v) => v,
        Err(Error::Numerical(msg)) if msg == "unbounded" => return Ok(LpOutcome::Unbounded),
        Err(e) => return Err(e),
    };

    let mut x = DVector::zeros(n);
    for (row, &col) in basis.iter().enumerate() {
        if col < n {
            x[col] = t[(row, total)];
        }
    }
    Ok(LpOutcome::Optimal { x, objective: obj2 })
}

/// Tableau simplex with Bland's rule; returns the optimal objective.
/// `ban_from` excludes columns >= that index from entering (used to keep
/// artificials out in phase II).
fn run_simplex(
    t: &mut DMatrix<f64>,
    basis: &mut [usize],
    cost: &[f64],
    rhs_col: usize,
    ban_from: Option<usize>,
) -> Result<f64> {
    let m = t.nrows();
    let ncols = cost.len();
    let iter_cap = 50 * (m + ncols) + 200;

    for _ in 0..iter_cap {
        // reduced costs r_j = c_j - c_B . T[:, j]
        let mut entering: Option<usize> = None;
        for j in 0..ncols {
            if let Some(ban) = ban_from {
                if j >= ban {
                    continue;
                }
            }
            if basis.contains(&j) {
                continue;
            }
            let mut r = cost[j];
            for i in 0..m {
                r -= cost[basis[i]] * t[(i, j)];
            }
            if r < -EPS {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else {
            let mut obj = 0.0;
            for i in 0..m {
                obj += cost[basis[i]] * t[(i, rhs_col)];
            }
            return Ok(obj);
        };

        // ratio test, ties broken by smallest basis index (Bland)
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[(i, j)];
            if a > EPS {
                let ratio = t[(i, rhs_col)] / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - EPS || (ratio < lr + EPS && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            return Err(Error::Numerical("unbounded".into()));
        };

        // pivot
        let p = t[(pivot_row, j)];
        for col in 0..=rhs_col {
            t[(pivot_row, col)] /= p;
        }
        for i in 0..m {
            if i != pivot_row {
                let f = t[(i, j)];
                if f != 0.0 {
                    for col in 0..=rhs_col {
                        t[(i, col)] -= f * t[(pivot_row, col)];
                    }
                }
            }
        }
        basis[pivot_row] = j;
    }
    Err(Error::Numerical("simplex iteration cap exceeded".into()))
}

/// Largest `s >= 0` with `s * x` in the convex hull of `vertices`.
/// Infinite when `x = 0`. This is the reciprocal of the gauge.
pub fn max_scale_in_hull(vertices: &[DVector<f64>], x: &DVector<f64>) -> Result<f64> {
    let d = x.len();
    let m = vertices.len();
    // variables: lambda_1..lambda_m, s
    // rows: sum lambda_i v_i - s x = 0  (d rows), sum lambda_i = 1
    let mut a = DMatrix::zeros(d + 1, m + 1);
    for (j, v) in vertices.iter().enumerate() {
        for i in 0..d {
            a[(i, j)] = v[i];
        }
        a[(d, j)] = 1.0;
    }
    for i in 0..d {
        a[(i, m)] = -x[i];
    }
    let mut b = DVector::zeros(d + 1);
    b[d] = 1.0;
    let mut c = DVector::zeros(m + 1);
    c[m] = -1.0;
    match solve_equality_form(&a, &b, &c)? {
        LpOutcome::Optimal { x: sol, .. } => Ok(sol[m]),
        LpOutcome::Unbounded => Ok(f64::INFINITY),
        LpOutcome::Infeasible => Err(Error::Domain(
            "gauge is undefined: origin is not inside the body".into(),
        )),
    }
}

/// Whether `x` lies in the convex hull of `vertices`.
pub fn point_in_hull(vertices: &[DVector<f64>], x: &DVector<f64>) -> Result<bool> {
    let d = x.len();
    let m = vertices.len();
    let mut a = DMatrix::zeros(d + 1, m);
    for (j, v) in vertices.iter().enumerate() {
        for i in 0..d {
            a[(i, j)] = v[i];
        }
        a[(d, j)] = 1.0;
    }
    let mut b = DVector::zeros(d + 1);
    for i in 0..d {
        b[i] = x[i];
    }
    b[d] = 1.0;
    let c = DVector::zeros(m);
    Ok(matches!(
        solve_equality_form(&a, &b, &c)?,
        LpOutcome::Optimal { .. }
    ))
}

/// Whether `x` lies in the Minkowski sum `conv(va) + conv(vb)`.
pub fn point_in_sum(va: &[DVector<f64>], vb: &[DVector<f64>], x: &DVector<f64>) -> Result<bool> {
    let d = x.len();
    let (ma, mb) = (va.len(), vb.len());
    // rows: sum l_i a_i + sum m_j b_j = x, sum l = 1, sum m = 1
    let mut a = DMatrix::zeros(d + 2, ma + mb);
    for (j, v) in va.iter().enumerate() {
        for i in 0..d {
            a[(i, j)] = v[i];
        }
        a[(d, j)] = 1.0;
    }
    for (j, v) in vb.iter().enumerate() {
        for i in 0..d {
            a[(i, ma + j)] = v[i];
        }
        a[(d + 1, ma + j)] = 1.0;
    }
    let mut b = DVector::zeros(d + 2);
    for i in 0..d {
        b[i] = x[i];
    }
    b[d] = 1.0;
    b[d + 1] = 1.0;
    let c = DVector::zeros(ma + mb);
    Ok(matches!(
        solve_equality_form(&a, &b, &c)?,
        LpOutcome::Optimal { .. }
    ))
}

/// Maximize `u . x` over `{x : <a_i, x> <= b_i}`. Errors when unbounded.
pub fn support_of_halfspaces(
    normals: &[DVector<f64>],
    offsets: &[f64],
    u: &DVector<f64>,
) -> Result<f64> {
    let d = u.len();
    let m = normals.len();
    // variables: x+ (d), x- (d), slacks (m)
    let mut a = DMatrix::zeros(m, 2 * d + m);
    let mut b = DVector::zeros(m);
    for i in 0..m {
        for k in 0..d {
            a[(i, k)] = normals[i][k];
            a[(i, d + k)] = -normals[i][k];
        }
        a[(i, 2 * d + i)] = 1.0;
        b[i] = offsets[i];
    }
    let mut c = DVector::zeros(2 * d + m);
    for k in 0..d {
        c[k] = -u[k];
        c[d + k] = u[k];
    }
    match solve_equality_form(&a, &b, &c)? {
        LpOutcome::Optimal { objective, .. } => Ok(-objective),
        LpOutcome::Unbounded => Err(Error::Domain(
            "support is unbounded: halfspace body is not bounded".into(),
        )),
        LpOutcome::Infeasible => Err(Error::Domain("halfspace body is empty".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(coords)
    }

    #[test]
    fn gauge_of_square_along_diagonal() {
        let verts = vec![v(&[1.0, 1.0]), v(&[-1.0, 1.0]), v(&[-1.0, -1.0]), v(&[1.0, -1.0])];
        let s = max_scale_in_hull(&verts, &v(&[2.0, 2.0])).unwrap();
        assert!((s - 0.5).abs() < 1e-9); // gauge of (2,2) in the unit square is 2
        let s = max_scale_in_hull(&verts, &v(&[0.5, 0.0])).unwrap();
        assert!((s - 2.0).abs() < 1e-9);
    }

    #[test]
    fn membership_in_hull() {
        let verts = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert!(point_in_hull(&verts, &v(&[0.2, 0.2])).unwrap());
        assert!(!point_in_hull(&verts, &v(&[0.7, 0.7])).unwrap());
    }

    #[test]
    fn membership_in_sum_of_squares() {
        let sq = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])];
        assert!(point_in_sum(&sq, &sq, &v(&[1.9, 1.9])).unwrap());
        assert!(!point_in_sum(&sq, &sq, &v(&[2.1, 0.5])).unwrap());
    }

    #[test]
    fn support_of_cube_via_lp() {
        let normals = vec![v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, -1.0])];
        let offsets = vec![1.0, 1.0, 1.0, 1.0];
        let h = support_of_halfspaces(&normals, &offsets, &v(&[1.0, 0.0])).unwrap();
        assert!((h - 1.0).abs() < 1e-9);
        let h = support_of_halfspaces(&normals, &offsets, &v(&[1.0, 1.0])).unwrap();
        assert!((h - 2.0).abs() < 1e-9);
    }
}
