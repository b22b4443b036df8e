//! Least-squares solving via singular value decomposition.
//!
//! All regressions in the crate go through [`solve_least_squares`], which
//! factors the design orthogonally, reports rank deficiency with the
//! offending column indices, and exposes `(X'X)^{-1}` without forming the
//! normal equations.

use nalgebra::{DMatrix, DVector};

/// Solution of a full-rank least-squares problem.
#[derive(Debug)]
pub(crate) struct LeastSquares {
    pub coefficients: DVector<f64>,
    pub xtx_inverse: DMatrix<f64>,
}

/// Rank deficiency, carrying the indices of the columns involved in at
/// least one linear dependency.
#[derive(Debug)]
pub(crate) struct RankDeficiency {
    pub dependent_columns: Vec<usize>,
}

fn rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Minimizes `||y - X b||` for an `n x k` design with `n >= k`.
pub(crate) fn solve_least_squares(
    design: &DMatrix<f64>,
    response: &DVector<f64>,
) -> Result<LeastSquares, RankDeficiency> {
    let (rows, cols) = design.shape();
    debug_assert!(rows >= cols && cols > 0);
    debug_assert_eq!(rows, response.len());

    let svd = design.clone().svd(true, true);
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().cloned().fold(0.0_f64, f64::max);
    let tol = rank_tolerance(rows, cols, sigma_max);

    let v_t = svd.v_t.as_ref().expect("requested V^T");
    if sigma_max <= 0.0 || sigma.iter().any(|&s| s <= tol) {
        return Err(RankDeficiency {
            dependent_columns: dependent_columns(v_t, sigma, tol),
        });
    }

    let coefficients = svd
        .solve(response, tol)
        .expect("SVD solve with computed factors")
        .column(0)
        .into_owned();
    let xtx_inverse = xtx_inverse_from_svd(v_t, sigma);

    Ok(LeastSquares { coefficients, xtx_inverse })
}

/// `(X'X)^{-1} = V diag(1/sigma^2) V'` from the factors of X itself.
fn xtx_inverse_from_svd(v_t: &DMatrix<f64>, sigma: &DVector<f64>) -> DMatrix<f64> {
    let mut scaled = v_t.clone();
    for (i, mut row) in scaled.row_iter_mut().enumerate() {
        let s = sigma[i];
        row *= 1.0 / (s * s);
    }
    let inv = v_t.transpose() * scaled;
    symmetrize(inv)
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// Columns with a significant component in some near-null right singular
/// direction. For an exactly duplicated column this names both members of
/// the pair.
fn dependent_columns(v_t: &DMatrix<f64>, sigma: &DVector<f64>, tol: f64) -> Vec<usize> {
    let k = v_t.ncols();
    let cutoff = 0.5 / (k as f64).sqrt();
    let mut involved = vec![false; k];
    for (i, &s) in sigma.iter().enumerate() {
        if s <= tol {
            for j in 0..k {
                if v_t[(i, j)].abs() > cutoff {
                    involved[j] = true;
                }
            }
        }
    }
    // A zero column can hide in the null space with a tiny loading; make
    // sure identically-zero columns are always named.
    let mut out: Vec<usize> = involved
        .iter()
        .enumerate()
        .filter_map(|(j, &hit)| hit.then_some(j))
        .collect();
    if out.is_empty() {
        out = (0..k).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_exact_system() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![2.0, 4.0, 6.0]);
        let ls = solve_least_squares(&x, &y).unwrap();
        assert_relative_eq!(ls.coefficients[0], 0.0, epsilon = 1e-10);
        assert_relative_eq!(ls.coefficients[1], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn xtx_inverse_matches_direct_inversion() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.5, 1.0, 1.5, 1.0, 2.5, 1.0, 4.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 2.0, 5.0]);
        let ls = solve_least_squares(&x, &y).unwrap();
        let direct = (x.transpose() * &x).try_inverse().unwrap();
        assert_relative_eq!(ls.xtx_inverse, direct, epsilon = 1e-10);
    }

    #[test]
    fn duplicated_column_is_reported_with_both_members() {
        let x = DMatrix::from_row_slice(
            4,
            3,
            &[1.0, 2.0, 2.0, 1.0, 3.0, 3.0, 1.0, 5.0, 5.0, 1.0, 7.0, 7.0],
        );
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let err = solve_least_squares(&x, &y).unwrap_err();
        assert_eq!(err.dependent_columns, vec![1, 2]);
    }
}
