//! Dense tableau simplex over exact rationals.
//!
//! Solves `maximize c·x  s.t.  A x <= b,  x >= 0` with `b >= 0`, so the
//! all-slack basis is feasible and no phase one is needed. Bland's rule
//! keeps degenerate pivots from cycling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `p/q` (or `p` for integers).
pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let (num, den) = match s.trim().split_once('/') {
        Some((a, b)) => (
            a.trim().parse::<BigInt>().ok()?,
            b.trim().parse::<BigInt>().ok()?,
        ),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint {0} has a negative right-hand side")]
    NegativeRhs(usize),
    #[error("constraint {0} has {1} coefficients, expected {2}")]
    Shape(usize, usize, usize),
    #[error("objective is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<Q>,
    /// `(row, rhs)` meaning `row · x <= rhs`.
    pub constraints: Vec<(Vec<Q>, Q)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<Q>,
    pub value: Q,
    /// One multiplier per constraint; an optimal dual solution.
    pub dual: Vec<Q>,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![Q::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_le(&mut self, row: Vec<Q>, rhs: Q) {
        self.constraints.push((row, rhs));
    }

    pub fn maximize(&self) -> Result<LpSolution, LpError> {
        let n = self.num_vars();
        let m = self.constraints.len();
        let width = n + m + 1;
        // rows 0..m: constraints; row m: reduced costs (c_j - z_j), last column = -objective value
        let mut t = vec![vec![Q::zero(); width]; m + 1];
        for (r, (row, rhs)) in self.constraints.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::Shape(r, row.len(), n));
            }
            if rhs.is_negative() {
                return Err(LpError::NegativeRhs(r));
            }
            t[r][..n].clone_from_slice(row);
            t[r][n + r] = Q::one();
            t[r][width - 1] = rhs.clone();
        }
        t[m][..n].clone_from_slice(&self.objective);
        let mut basis: Vec<usize> = (n..n + m).collect();
        let mut pivots = 0;

        while let Some(enter) = (0..n + m).find(|&j| t[m][j].is_positive()) {
            let mut leave: Option<(usize, Q)> = None;
            for r in 0..m {
                if !t[r][enter].is_positive() {
                    continue;
                }
                let ratio = &t[r][width - 1] / &t[r][enter];
                let better = match &leave {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && basis[r] < basis[*best_r])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((pr, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            let pivot = t[pr][enter].clone();
            for v in t[pr].iter_mut() {
                *v = &*v / &pivot;
            }
            let pivot_row = t[pr].clone();
            for (r, row) in t.iter_mut().enumerate() {
                if r == pr || row[enter].is_zero() {
                    continue;
                }
                let factor = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &factor * p;
                }
            }
            basis[pr] = enter;
            pivots += 1;
        }

        let mut x = vec![Q::zero(); n];
        for (r, &var) in basis.iter().enumerate() {
            if var < n {
                x[var] = t[r][width - 1].clone();
            }
        }
        let value = -t[m][width - 1].clone();
        let dual = (0..m).map(|r| -t[m][n + r].clone()).collect();
        Ok(LpSolution {
            x,
            value,
            dual,
            pivots,
        })
    }
}

/// `row · x`.
pub fn dot(row: &[Q], x: &[Q]) -> Q {
    row.iter().zip(x).fold(Q::zero(), |acc, (a, b)| acc + a * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qi(v: i64) -> Q {
        q(v, 1)
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![qi(3), qi(5)];
        lp.add_le(vec![qi(1), qi(0)], qi(4));
        lp.add_le(vec![qi(0), qi(2)], qi(12));
        lp.add_le(vec![qi(3), qi(2)], qi(18));
        let sol = lp.maximize().unwrap();
        assert_eq!(sol.value, qi(36));
        assert_eq!(sol.x, vec![qi(2), qi(6)]);
        // strong duality: b · y equals the optimum
        let b: Vec<Q> = lp.constraints.iter().map(|(_, rhs)| rhs.clone()).collect();
        assert_eq!(dot(&b, &sol.dual), qi(36));
    }

    #[test]
    fn fractional_optimum() {
        // max x + y s.t. 3x + y <= 2, x + 3y <= 2 -> x = y = 1/2
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![qi(1), qi(1)];
        lp.add_le(vec![qi(3), qi(1)], qi(2));
        lp.add_le(vec![qi(1), qi(3)], qi(2));
        let sol = lp.maximize().unwrap();
        assert_eq!(sol.value, qi(1));
        assert_eq!(sol.x, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn unbounded_and_bad_rhs() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![qi(1), qi(0)];
        lp.add_le(vec![qi(0), qi(1)], qi(1));
        assert_eq!(lp.maximize(), Err(LpError::Unbounded));
        lp.add_le(vec![qi(1), qi(0)], qi(-1));
        assert_eq!(lp.maximize(), Err(LpError::NegativeRhs(1)));
    }

    #[test]
    fn rational_text() {
        assert_eq!(format_q(&q(46, 54)), "23/27");
        assert_eq!(format_q(&q(4, 2)), "2");
        assert_eq!(parse_q("23/27"), Some(q(23, 27)));
        assert_eq!(parse_q(" -3 "), Some(qi(-3)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("x"), None);
    }
}
