//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `minimize cᵀx subject to Ax = b, x ≥ 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint matrix row {row} has {got} columns, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("right-hand side has {got} entries for {expected} rows")]
    Rhs { got: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    /// `y` are the row duals: `Aᵀy ≤ c` and `bᵀy = cᵀx = value`.
    Optimal { x: Vec<Q>, y: Vec<Q>, value: Q },
    /// Farkas certificate: `Aᵀy ≤ 0` and `bᵀy > 0`.
    Infeasible { farkas: Vec<Q> },
    Unbounded,
}

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Nearest multiple of 2⁻⁶⁴ to `v`.
pub fn from_f64(v: f64) -> Q {
    let scale: BigInt = BigInt::one() << 64usize;
    let exact = Q::from_float(v).expect("finite value");
    let scaled = (exact * Q::from_integer(scale.clone())).round();
    scaled / Q::from_integer(scale)
}

pub fn to_f64(v: &Q) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    /// Columns `[0, n)` are structural, `[n, n + m)` artificial; the last entry of each row is the rhs.
    n: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        self.rows[i].last().expect("rhs column")
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        for v in &mut self.rows[r] {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = e;
    }

    fn reduced_costs(&self, cost: &[Q]) -> Vec<Q> {
        let width = self.rows.first().map_or(0, |r| r.len() - 1);
        (0..width)
            .map(|j| {
                let mut rc = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !row[j].is_zero() {
                        rc -= cb * &row[j];
                    }
                }
                rc
            })
            .collect()
    }

    fn objective(&self, cost: &[Q]) -> Q {
        (0..self.rows.len()).map(|i| &cost[self.basis[i]] * self.rhs(i)).fold(Q::zero(), |a, b| a + b)
    }

    /// Runs Bland's-rule simplex with entering columns restricted to `[0, limit)`.
    /// Returns false if unbounded.
    fn optimize(&mut self, cost: &[Q], limit: usize) -> bool {
        loop {
            let rc = self.reduced_costs(cost);
            let Some(e) = (0..limit).find(|&j| rc[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, e),
                None => return false,
            }
        }
    }
}

pub fn solve(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> Result<LpOutcome, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m {
        return Err(LpError::Rhs { got: b.len(), expected: m });
    }
    for (row, r) in a.iter().enumerate() {
        if r.len() != n {
            return Err(LpError::Ragged { row, got: r.len(), expected: n });
        }
    }
    // Normalize to b ≥ 0; sigma records the row flips.
    let sigma: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let rows = (0..m)
        .map(|i| {
            let flip = |v: &Q| if sigma[i] { -v } else { v.clone() };
            let mut row: Vec<Q> = a[i].iter().map(flip).collect();
            row.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
            row.push(flip(&b[i]));
            row
        })
        .collect();
    let mut t = Tableau { rows, basis: (n..n + m).collect(), n };

    let phase1: Vec<Q> = (0..n + m).map(|j| if j < n { Q::zero() } else { Q::one() }).collect();
    t.optimize(&phase1, n + m);
    if t.objective(&phase1).is_positive() {
        let rc = t.reduced_costs(&phase1);
        let farkas = (0..m)
            .map(|i| {
                let y = Q::one() - &rc[n + i];
                if sigma[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        return Ok(LpOutcome::Infeasible { farkas });
    }
    for i in 0..m {
        if t.basis[i] >= t.n {
            if let Some(j) = (0..t.n).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            }
        }
    }

    let phase2: Vec<Q> = c.iter().cloned().chain((0..m).map(|_| Q::zero())).collect();
    if !t.optimize(&phase2, n) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs(i).clone();
        }
    }
    let rc = t.reduced_costs(&phase2);
    let y = (0..m).map(|i| if sigma[i] { rc[n + i].clone() } else { -&rc[n + i] }).collect();
    let value = t.objective(&phase2);
    Ok(LpOutcome::Optimal { x, y, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Q {
        int(v)
    }

    fn dot(a: &[Q], b: &[Q]) -> Q {
        a.iter().zip(b).map(|(x, y)| x * y).fold(Q::zero(), |s, v| s + v)
    }

    #[test]
    fn small_optimum_with_duals() {
        // min −x₀ − x₁ s.t. x₀ + 2x₁ + s₀ = 4, 3x₀ + x₁ + s₁ = 6
        let a = vec![vec![q(1), q(2), q(1), q(0)], vec![q(3), q(1), q(0), q(1)]];
        let b = vec![q(4), q(6)];
        let c = vec![q(-1), q(-1), q(0), q(0)];
        let LpOutcome::Optimal { x, y, value } = solve(&a, &b, &c).unwrap() else { panic!() };
        assert_eq!(value, Q::new(BigInt::from(-14), BigInt::from(5)));
        assert_eq!(dot(&x, &c), value);
        assert_eq!(dot(&y, &b), value);
        for j in 0..4 {
            let col: Vec<Q> = a.iter().map(|r| r[j].clone()).collect();
            assert!(dot(&y, &col) <= c[j]);
        }
    }

    #[test]
    fn infeasible_certificate() {
        // x₀ + x₁ = 1 and x₀ + x₁ = 2
        let a = vec![vec![q(1), q(1)], vec![q(1), q(1)]];
        let b = vec![q(1), q(2)];
        let LpOutcome::Infeasible { farkas } = solve(&a, &b, &[q(0), q(0)]).unwrap() else { panic!() };
        assert!(dot(&farkas, &b).is_positive());
        let columns = a[0].iter().zip(&a[1]);
        for (top, bottom) in columns {
            assert!(!dot(&farkas, &[top.clone(), bottom.clone()]).is_positive());
        }
    }

    #[test]
    fn negative_rhs_and_unbounded() {
        let a = vec![vec![q(-1), q(1)]];
        let LpOutcome::Optimal { x, .. } = solve(&a, &[q(-2)], &[q(1), q(1)]).unwrap() else { panic!() };
        assert_eq!(x, vec![q(2), q(0)]);
        assert_eq!(solve(&a, &[q(-2)], &[q(0), q(-1)]).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let a = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        let LpOutcome::Optimal { value, .. } = solve(&a, &[q(1), q(2)], &[q(1), q(3)]).unwrap() else { panic!() };
        assert_eq!(value, q(1));
    }

    #[test]
    fn float_rounding() {
        let h = from_f64(std::f64::consts::FRAC_1_SQRT_2);
        assert!((to_f64(&h) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
        assert_eq!(from_f64(0.25), Q::new(BigInt::from(1), BigInt::from(4)));
    }
}
