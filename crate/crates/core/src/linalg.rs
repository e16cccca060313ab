//! Small dense linear algebra: cyclic Jacobi eigenvalues for the 5×5
//! Hessians and pivoted Gaussian elimination for the complex Newton steps.
//! Problem sizes here never exceed a handful of variables, so simple dense
//! routines beat pulling in a full linear-algebra stack.

use num_complex::Complex;

use crate::scalar::Real;

/// Eigenvalues of a symmetric `N×N` matrix by the cyclic Jacobi method,
/// returned in ascending order.
pub fn symmetric_eigenvalues<T: Real, const N: usize>(a: &[[T; N]; N]) -> [T; N] {
    let mut m = *a;
    let eps = T::epsilon() * T::of(16.0);
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..N {
            for j in (i + 1)..N {
                off = off + m[i][j] * m[i][j];
            }
        }
        let scale: T = (0..N).map(|i| m[i][i] * m[i][i]).sum::<T>() + off;
        if off <= eps * eps * (T::one() + scale) {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if m[p][q].abs() <= eps * (m[p][p].abs() + m[q][q].abs() + T::epsilon()) {
                    continue;
                }
                // Classic 2×2 rotation annihilating m[p][q].
                let theta = (m[q][q] - m[p][p]) / (T::of(2.0) * m[p][q]);
                let t = {
                    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..N {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..N {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: [T; N] = std::array::from_fn(|i| m[i][i]);
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

/// Solve the complex system `A x = b` in place by Gaussian elimination with
/// partial pivoting. Returns `None` when the pivot collapses (singular to
/// working precision).
pub fn solve_complex<T: Real>(
    a: &mut [Vec<Complex<T>>],
    b: &mut [Complex<T>],
) -> Option<Vec<Complex<T>>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for col in 0..n {
        let (pivot_row, pivot_norm) = (col..n)
            .map(|r| (r, a[r][col].norm_sqr()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if !(pivot_norm > T::zero()) || !pivot_norm.is_finite() {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col];
        for r in (col + 1)..n {
            let f = a[r][col] / pivot;
            if f == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            for c in (col + 1)..n {
                let upper = a[col][c];
                a[r][c] = a[r][c] - f * upper;
            }
            a[r][col] = Complex::new(T::zero(), T::zero());
            let bc = b[col];
            b[r] = b[r] - f * bc;
        }
    }
    let mut x = vec![Complex::new(T::zero(), T::zero()); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc = acc - a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Solve the real system `A x = b` by Gaussian elimination with partial
/// pivoting; `None` on a singular matrix.
pub fn solve_real<T: Real>(a: &mut [Vec<T>], b: &mut [T]) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if !(pivot_abs > T::zero()) || !pivot_abs.is_finite() {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col];
        for r in (col + 1)..n {
            let f = a[r][col] / pivot;
            if f == T::zero() {
                continue;
            }
            for c in (col + 1)..n {
                let upper = a[col][c];
                a[r][c] = a[r][c] - f * upper;
            }
            a[r][col] = T::zero();
            let bc = b[col];
            b[r] = b[r] - f * bc;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc = acc - a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jacobi_diagonal_matrix() {
        let a = [[3.0, 0.0], [0.0, -1.0]];
        let eig = symmetric_eigenvalues(&a);
        assert_eq!(eig, [-1.0, 3.0]);
    }

    #[test]
    fn jacobi_known_3x3() {
        // Eigenvalues of [[2,1,0],[1,2,1],[0,1,2]] are 2, 2±√2.
        let a = [[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]];
        let eig = symmetric_eigenvalues(&a);
        assert_relative_eq!(eig[0], 2.0 - 2.0f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(eig[1], 2.0, max_relative = 1e-12);
        assert_relative_eq!(eig[2], 2.0 + 2.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn complex_solve_round_trip() {
        let a0 = vec![
            vec![Complex::new(1.0, 2.0), Complex::new(0.5, -1.0), Complex::new(0.0, 0.3)],
            vec![Complex::new(-1.0, 0.1), Complex::new(2.0, 0.0), Complex::new(1.0, 1.0)],
            vec![Complex::new(0.2, 0.2), Complex::new(-0.7, 0.4), Complex::new(3.0, -0.5)],
        ];
        let x_true = [Complex::new(1.0, -1.0), Complex::new(0.5, 2.0), Complex::new(-2.0, 0.25)];
        let mut b: Vec<Complex<f64>> = (0..3)
            .map(|i| (0..3).map(|j| a0[i][j] * x_true[j]).sum())
            .collect();
        let mut a = a0.clone();
        let x = solve_complex(&mut a, &mut b).unwrap();
        for j in 0..3 {
            assert_relative_eq!(x[j].re, x_true[j].re, max_relative = 1e-12);
            assert_relative_eq!(x[j].im, x_true[j].im, max_relative = 1e-12);
        }
    }

    #[test]
    fn singular_matrix_reports_none() {
        let mut a = vec![
            vec![Complex::new(1.0f64, 0.0), Complex::new(2.0, 0.0)],
            vec![Complex::new(2.0, 0.0), Complex::new(4.0, 0.0)],
        ];
        let mut b = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
        assert!(solve_complex(&mut a, &mut b).is_none());
    }

    #[test]
    fn real_solve_round_trip() {
        let mut a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let mut b = vec![5.0, 10.0];
        let x = solve_real(&mut a, &mut b).unwrap();
        assert_relative_eq!(x[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(x[1], 3.0, max_relative = 1e-12);
    }
}
