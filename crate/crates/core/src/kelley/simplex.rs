//! Dense-tableau primal simplex over exact rationals with Bland's rule.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("right-hand side must be nonnegative (row {0})")]
    InfeasibleOrigin(usize),
    #[error("objective is unbounded")]
    Unbounded,
    #[error("dimension mismatch")]
    Shape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    /// Primal optimum `x`.
    pub primal: Vec<Rational>,
    /// Optimal dual multipliers, one per constraint row.
    pub dual: Vec<Rational>,
    /// Objective value after each pivot, starting at the origin.
    pub trace: Vec<Rational>,
}

/// Maximizes `c·x` subject to `a x ≤ b`, `x ≥ 0`, with `b ≥ 0` so the origin
/// is a feasible starting vertex.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<LpSolution, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(LpError::Shape);
    }
    if let Some(i) = b.iter().position(|v| v.is_negative()) {
        return Err(LpError::InfeasibleOrigin(i));
    }
    let width = n + m + 1;
    let rhs = n + m;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = vec![Rational::zero(); width];
            row[..n].clone_from_slice(&a[i]);
            row[n + i] = Rational::from_integer(1.into());
            row[rhs] = b[i].clone();
            row
        })
        .collect();
    let mut obj: Vec<Rational> = vec![Rational::zero(); width];
    for (j, cj) in c.iter().enumerate() {
        obj[j] = -cj.clone();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut trace = vec![obj[rhs].clone()];

    while let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][rhs] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (r, _) = leave.ok_or(LpError::Unbounded)?;
        let p = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        basis[r] = enter;
        trace.push(obj[rhs].clone());
    }

    let mut primal = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            primal[bv] = t[i][rhs].clone();
        }
    }
    let dual = (0..m).map(|i| obj[n + i].clone()).collect();
    Ok(LpSolution { value: obj[rhs].clone(), primal, dual, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn q(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn textbook_instance() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let a = q(&[&[1, 0], &[0, 2], &[3, 2]]);
        let s = maximize(&a, &[int(4), int(12), int(18)], &[int(3), int(5)]).unwrap();
        assert_eq!(s.value, int(36));
        assert_eq!(s.primal, vec![int(2), int(6)]);
        assert_eq!(s.dual, vec![int(0), ratio(3, 2), int(1)]);
        assert!(s.trace.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn unbounded_and_shape() {
        let a = q(&[&[-1, 1]]);
        assert_eq!(maximize(&a, &[int(1)], &[int(1), int(0)]), Err(LpError::Unbounded));
        assert_eq!(maximize(&a, &[int(1), int(2)], &[int(1), int(0)]), Err(LpError::Shape));
        assert_eq!(maximize(&a, &[int(-1)], &[int(1), int(0)]), Err(LpError::InfeasibleOrigin(0)));
    }

    #[test]
    fn degenerate_instance_terminates() {
        // Beale's cycling example, which loops under the largest-coefficient rule
        let a = vec![
            vec![ratio(1, 4), int(-8), int(-1), int(9)],
            vec![ratio(1, 2), int(-12), ratio(-1, 2), int(3)],
            vec![int(0), int(0), int(1), int(0)],
        ];
        let c = vec![ratio(3, 4), int(-20), ratio(1, 2), int(-6)];
        let s = maximize(&a, &[int(0), int(0), int(1)], &c).unwrap();
        assert_eq!(s.value, ratio(5, 4));
    }
}
