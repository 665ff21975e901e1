//! Exact rational linear algebra on small integer data.

use num_rational::Rational64;
use num_traits::Zero;

/// Coordinates `c` with `v = sum_j c_j basis[j]`, or `None` when `v` is
/// outside the span. The basis vectors must be linearly independent.
pub fn solve_in_basis(basis: &[Vec<i64>], v: &[i64]) -> Option<Vec<Rational64>> {
    let n = basis.len();
    let d = v.len();
    let mut a: Vec<Vec<Rational64>> = (0..d)
        .map(|i| {
            let mut row: Vec<Rational64> = basis.iter().map(|b| Rational64::from_integer(b[i])).collect();
            row.push(Rational64::from_integer(v[i]));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..d).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let pv = a[row][col];
        for x in a[row].iter_mut() {
            *x /= pv;
        }
        for i in 0..d {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col];
                for j in 0..=n {
                    let t = a[row][j] * f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() < n || a[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut c = vec![Rational64::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        c[col] = a[i][n];
    }
    Some(c)
}

/// Rank of an integer matrix given by rows.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let Some(width) = rows.first().map(|r| r.len()) else {
        return 0;
    };
    let mut a: Vec<Vec<Rational64>> =
        rows.iter().map(|r| r.iter().map(|&x| Rational64::from_integer(x)).collect()).collect();
    let mut rk = 0;
    for col in 0..width {
        let Some(p) = (rk..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rk, p);
        for i in rk + 1..a.len() {
            let f = a[i][col] / a[rk][col];
            for j in col..width {
                let t = a[rk][j] * f;
                a[i][j] -= t;
            }
        }
        rk += 1;
    }
    rk
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_rejects() {
        let basis = vec![vec![1, 1, 0], vec![0, 1, 1]];
        assert_eq!(
            solve_in_basis(&basis, &[2, 3, 1]).unwrap(),
            vec![Rational64::from_integer(2), Rational64::from_integer(1)]
        );
        assert!(solve_in_basis(&basis, &[1, 0, 0]).is_none());
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
    }
}
