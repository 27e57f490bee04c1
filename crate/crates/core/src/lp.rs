//! Dense two-phase simplex for `min cᵀx  s.t.  Ax = b, x ≥ 0`.
//!
//! Bland's rule picks entering and leaving variables, so the method
//! terminates on degenerate problems. Intended for the small programs that
//! arise from quasi-probability decompositions (a few hundred rows).

use crate::error::{QemError, Result};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

/// Tableau with the objective kept as a separate reduced-cost row.
struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows × (cols + 1)`, last column is the right-hand side.
    a: Vec<f64>,
    /// Reduced costs and, in the last entry, minus the objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        let prow: Vec<f64> = self.a[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f != 0.0 {
                for j in 0..w {
                    self.a[i * w + j] -= f * prow[j];
                }
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for j in 0..w {
                self.cost[j] -= f * prow[j];
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations over the allowed columns. Returns `false` if unbounded.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..self.cols).find(|&j| allowed(j) && self.cost[j] < -FEAS_TOL) else {
                return Ok(true);
            };
            let mut best: Option<(f64, usize)> = None;
            for r in 0..self.rows {
                let v = self.at(r, c);
                if v > PIVOT_TOL {
                    let ratio = self.rhs(r) / v;
                    best = match best {
                        None => Some((ratio, r)),
                        Some((br, bi)) => {
                            if ratio < br - 1e-12 || (ratio <= br + 1e-12 && self.basis[r] < self.basis[bi]) {
                                Some((ratio, r))
                            } else {
                                Some((br, bi))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Ok(false),
                Some((_, r)) => self.pivot(r, c),
            }
        }
        Err(QemError::IllConditioned("simplex did not terminate".into()))
    }
}

/// Solves `min cᵀx` subject to `Ax = b`, `x ≥ 0`, with `A` given row-major.
pub fn solve_standard_form(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpOutcome> {
    let m = a.len();
    let n = c.len();
    if b.len() != m {
        return Err(QemError::DimensionMismatch { expected: m, found: b.len() });
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(QemError::DimensionMismatch { expected: n, found: row.len() });
    }
    // Columns: n structural, then m artificials.
    let cols = n + m;
    let w = cols + 1;
    let mut tab = vec![0.0; m * w];
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tab[i * w + j] = s * a[i][j];
        }
        tab[i * w + n + i] = 1.0;
        tab[i * w + cols] = s * b[i];
    }
    // Phase one: minimise the sum of artificials.
    let mut cost = vec![0.0; w];
    for i in 0..m {
        for j in 0..n {
            cost[j] -= tab[i * w + j];
        }
        cost[cols] -= tab[i * w + cols];
    }
    let mut t = Tableau { rows: m, cols, a: tab, cost, basis: (n..n + m).collect() };
    t.optimize(&|_| true)?;
    let infeasibility = -t.cost[cols];
    let scale = 1.0 + b.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if infeasibility > FEAS_TOL * scale {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive artificials out of the basis; rows where that is impossible are redundant.
    let mut r = 0;
    while r < t.rows {
        if t.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| t.at(r, j).abs() > PIVOT_TOL) {
                t.pivot(r, c);
            } else {
                let w = t.cols + 1;
                t.a.drain(r * w..(r + 1) * w);
                t.basis.remove(r);
                t.rows -= 1;
                continue;
            }
        }
        r += 1;
    }
    // Phase two with the true costs expressed in the current basis.
    let mut cost = vec![0.0; w];
    cost[..n].copy_from_slice(c);
    for (i, &bv) in t.basis.iter().enumerate() {
        let f = cost[bv];
        if f != 0.0 {
            for j in 0..w {
                cost[j] -= f * t.a[i * w + j];
            }
        }
    }
    t.cost = cost;
    if !t.optimize(&|j| j < n)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs(i).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpOutcome::Optimal { x, objective })
}

/// `min Σ|η_j|` subject to `Σ_j η_j v_j = target`, where each `v_j` is a column.
/// Returns `None` when infeasible.
pub fn min_l1_combination(columns: &[Vec<f64>], target: &[f64]) -> Result<Option<Vec<f64>>> {
    let m = target.len();
    let k = columns.len();
    let a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(2 * k);
            row.extend(columns.iter().map(|col| col[i]));
            row.extend(columns.iter().map(|col| -col[i]));
            row
        })
        .collect();
    match solve_standard_form(&a, target, &vec![1.0; 2 * k])? {
        LpOutcome::Optimal { x, .. } => Ok(Some((0..k).map(|j| x[j] - x[k + j]).collect())),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(QemError::IllConditioned("L1 program reported unbounded".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_textbook_problem() {
        // min −x − y  s.t.  x + s1 = 2, y + s2 = 3, x + y + s3 = 4
        let a = vec![
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0, 1.0],
        ];
        let out = solve_standard_form(&a, &[2.0, 3.0, 4.0], &[-1.0, -1.0, 0.0, 0.0, 0.0]).unwrap();
        let LpOutcome::Optimal { objective, .. } = out else { panic!("{out:?}") };
        assert!((objective + 4.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(solve_standard_form(&a, &[1.0, 2.0], &[1.0, 1.0]).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn redundant_and_zero_rows() {
        let a = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![0.0, 0.0]];
        let out = solve_standard_form(&a, &[1.0, 2.0, 0.0], &[1.0, 3.0]).unwrap();
        let LpOutcome::Optimal { x, objective } = out else { panic!("{out:?}") };
        assert!((objective - 1.0).abs() < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detects_unbounded() {
        let a = vec![vec![1.0, -1.0]];
        assert_eq!(solve_standard_form(&a, &[1.0], &[-1.0, 0.0]).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn l1_combination_prefers_sparse() {
        // target = e1; columns e1, (e1+e2)/2, (e1−e2)/2
        let cols = vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![0.5, -0.5]];
        let eta = min_l1_combination(&cols, &[1.0, 0.0]).unwrap().unwrap();
        let l1: f64 = eta.iter().map(|e| e.abs()).sum();
        assert!((l1 - 1.0).abs() < 1e-12);
        assert!(min_l1_combination(&[vec![1.0, 0.0]], &[0.0, 1.0]).unwrap().is_none());
    }
}
