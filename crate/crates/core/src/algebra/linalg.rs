//! Exact Gaussian elimination over `Rational`.

use super::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rational>),
    /// Consistent but with free variables; `rank` < number of unknowns.
    /// `particular` sets every free variable to zero.
    Underdetermined { rank: usize, particular: Vec<Rational> },
    Inconsistent,
}

/// Solves `a * x = b` for a dense `rows x cols` system.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Solution {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for k in col..=cols {
            m[row][k] = &m[row][k] * &inv;
        }
        for i in 0..rows {
            if i == row || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for k in col..=cols {
                let delta = &f * &m[row][k];
                m[i][k] = &m[i][k] - &delta;
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    if m[row..].iter().any(|r| !r[cols].is_zero()) {
        return Solution::Inconsistent;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    if pivots.len() < cols {
        return Solution::Underdetermined { rank: pivots.len(), particular: x };
    }
    Solution::Unique(x)
}

/// Rank of a dense matrix.
pub fn rank(a: &[Vec<Rational>]) -> usize {
    let zeros = vec![Rational::zero(); a.len()];
    match solve(a, &zeros) {
        Solution::Unique(x) => x.len(),
        Solution::Underdetermined { rank, .. } => rank,
        Solution::Inconsistent => unreachable!("homogeneous systems are consistent"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect()).collect()
    }

    #[test]
    fn unique_overdetermined() {
        let a = mat(&[&[1, 1], &[1, -1], &[2, 0]]);
        let b = vec![q(3, 1), q(1, 1), q(4, 1)];
        assert_eq!(solve(&a, &b), Solution::Unique(vec![q(2, 1), q(1, 1)]));
    }

    #[test]
    fn detects_rank_deficiency_and_inconsistency() {
        let a = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(
            solve(&a, &[q(1, 1), q(2, 1)]),
            Solution::Underdetermined { rank: 1, particular: vec![q(1, 1), q(0, 1)] }
        );
        assert_eq!(solve(&a, &[q(1, 1), q(3, 1)]), Solution::Inconsistent);
        assert_eq!(rank(&a), 1);
    }
}
