//! Exact dense linear algebra over ℚ(i): Gaussian elimination with full
//! consistency reporting. Small dimensions only; no pivot strategy beyond
//! first-nonzero is needed for exact arithmetic.

use crate::scalar::GaussianRational;

/// Solves `A x = b` exactly. `a` is row-major, `rows × cols`; `b` has length
/// `rows`. Returns one solution (free variables set to zero) or `None` when
/// the system is inconsistent.
pub fn solve(a: &[Vec<GaussianRational>], b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    debug_assert!(a.iter().all(|r| r.len() == cols));
    debug_assert_eq!(b.len(), rows);

    // Augmented matrix.
    let mut m: Vec<Vec<GaussianRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(src) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, src);
        let inv = m[pivot_row][col].inv().expect("pivot is nonzero");
        for entry in m[pivot_row].iter_mut() {
            *entry = &*entry * &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=cols {
                    let delta = &factor * &m[pivot_row][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }

    // Inconsistent iff a zero row has nonzero rhs.
    for r in pivot_row..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }

    let mut x = vec![GaussianRational::zero(); cols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = m[r][cols].clone();
    }
    Some(x)
}

/// Row-major matrix × vector product.
pub fn mat_vec(a: &[Vec<GaussianRational>], v: &[GaussianRational]) -> Vec<GaussianRational> {
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), v.len());
            row.iter()
                .zip(v)
                .fold(GaussianRational::zero(), |acc, (m, x)| &acc + &(m * x))
        })
        .collect()
}

/// Row-major matrix product `a · b`.
pub fn mat_mat(a: &[Vec<GaussianRational>], b: &[Vec<GaussianRational>]) -> Vec<Vec<GaussianRational>> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), inner);
            (0..cols)
                .map(|j| {
                    row.iter()
                        .enumerate()
                        .fold(GaussianRational::zero(), |acc, (k, m)| &acc + &(m * &b[k][j]))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn solves_square_system() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let a = vec![vec![g(1), g(1)], vec![g(1), g(-1)]];
        let b = vec![g(3), g(1)];
        assert_eq!(solve(&a, &b), Some(vec![g(2), g(1)]));
    }

    #[test]
    fn detects_inconsistency() {
        let a = vec![vec![g(1), g(1)], vec![g(2), g(2)]];
        let b = vec![g(1), g(3)];
        assert_eq!(solve(&a, &b), None);
    }

    #[test]
    fn underdetermined_uses_zero_free_vars() {
        let a = vec![vec![g(1), g(1)]];
        let b = vec![g(5)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(mat_vec(&a, &x), b);
    }

    #[test]
    fn complex_pivoting() {
        let i = GaussianRational::i();
        // i·x = 1  =>  x = -i
        let a = vec![vec![i.clone()]];
        let b = vec![g(1)];
        assert_eq!(solve(&a, &b), Some(vec![-i]));
    }
}
