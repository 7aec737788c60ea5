//! Small dense row-major matrix helpers.
//!
//! Sizes here are the ambient dimension `d` (usually 2 or 3), so everything
//! works on flat `&[f64]` slices with an explicit order `n`.

/// Determinant of the `n x n` row-major matrix `m`.
///
/// Closed forms for `n <= 3`, partially pivoted elimination above that.
pub fn det(m: &[f64], n: usize) -> f64 {
    debug_assert_eq!(m.len(), n * n);
    match n {
        0 => 1.0,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => {
            let mut work = m.to_vec();
            det_in_place(&mut work, n)
        }
    }
}

/// Determinant by Gaussian elimination with partial pivoting; destroys `m`.
pub fn det_in_place(m: &mut [f64], n: usize) -> f64 {
    let mut acc = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs()))
            .unwrap();
        let p = m[pivot * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for c in 0..n {
                m.swap(col * n + c, pivot * n + c);
            }
            acc = -acc;
        }
        acc *= p;
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            if f != 0.0 {
                for c in col + 1..n {
                    m[r * n + c] -= f * m[col * n + c];
                }
            }
        }
    }
    acc
}

/// LU factorisation `PA = LU` of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a zero pivot is met (exactly singular matrix).
    pub fn new(a: &[f64], n: usize) -> Option<Self> {
        assert_eq!(a.len(), n * n);
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| lu[x * n + col].abs().total_cmp(&lu[y * n + col].abs()))
                .unwrap();
            if lu[pivot * n + col] == 0.0 {
                return None;
            }
            if pivot != col {
                for c in 0..n {
                    lu.swap(col * n + c, pivot * n + c);
                }
                perm.swap(col, pivot);
            }
            let p = lu[col * n + col];
            for r in col + 1..n {
                let f = lu[r * n + col] / p;
                lu[r * n + col] = f;
                for c in col + 1..n {
                    lu[r * n + c] -= f * lu[col * n + c];
                }
            }
        }
        Some(Self { n, lu, perm })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut s = x[r];
            for c in 0..r {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for c in r + 1..n {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s / self.lu[r * n + r];
        }
        x
    }
}

pub fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for r in 0..n {
        for k in 0..n {
            let a_rk = a[r * n + k];
            for c in 0..n {
                out[r * n + c] += a_rk * b[k * n + c];
            }
        }
    }
    out
}

pub fn mat_vec(a: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|r| (0..n).map(|c| a[r * n + c] * v[c]).sum())
        .collect()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_elimination() {
        let m3 = [2.0, -1.0, 0.5, 1.0, 3.0, -2.0, 0.25, 4.0, 1.5];
        let mut w = m3.to_vec();
        assert!((det(&m3, 3) - det_in_place(&mut w, 3)).abs() < 1e-12);
        let m2 = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(det(&m2, 2), -2.0);
    }

    #[test]
    fn four_by_four_permutation_sign() {
        // Swapping rows 0 and 1 of the identity.
        let m = [
            0.0, 1.0, 0.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ];
        assert_eq!(det(&m, 4), -1.0);
    }

    #[test]
    fn lu_solves_and_detects_singular() {
        let a = [4.0, 1.0, 2.0, 3.0];
        let lu = Lu::new(&a, 2).unwrap();
        let x = lu.solve(&[1.0, 2.0]);
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
        assert!(Lu::new(&[1.0, 2.0, 2.0, 4.0], 2).is_none());
    }
}
