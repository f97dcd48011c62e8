//! Phase-one simplex returning a basic feasible solution of `A x = b, x ≥ 0`.
//!
//! Revised form: the basis inverse is kept explicitly, updated per pivot and
//! refactorized from the original columns at a fixed interval, so rounding does
//! not accumulate across the long degenerate pivot sequences these systems
//! produce.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const FEASIBILITY_TOL: f64 = 1e-9;
const RATIO_TIE_TOL: f64 = 1e-12;
/// Smallest row entry accepted when swapping an artificial out of the basis;
/// rows with nothing larger are treated as redundant.
const DRIVE_OUT_TOL: f64 = 1e-6;
/// Pivots between refactorizations of the basis inverse.
const REFACTOR_EVERY: usize = 16;

/// A vertex of `{x : A x = b, x ≥ 0}` and the columns that form its basis.
#[derive(Clone, Debug)]
pub struct BasicSolution {
    pub x: Vec<f64>,
    /// Original columns in the final basis, ascending.
    pub basis: Vec<usize>,
}

/// `[S A | I]` with `S` flipping rows so that `S b ≥ 0`. Columns `n..n+m` are
/// artificial.
struct Problem {
    m: usize,
    n: usize,
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl Problem {
    fn column(&self, j: usize) -> DVector<f64> {
        if j < self.n {
            self.a.column(j).into_owned()
        } else {
            let mut e = DVector::zeros(self.m);
            e[j - self.n] = 1.0;
            e
        }
    }

    fn basis_matrix(&self, basis: &[usize]) -> DMatrix<f64> {
        let mut bm = DMatrix::zeros(self.m, self.m);
        for (k, &j) in basis.iter().enumerate() {
            bm.set_column(k, &self.column(j));
        }
        bm
    }

    fn inverse(&self, basis: &[usize]) -> Result<DMatrix<f64>> {
        self.basis_matrix(basis)
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::LinearProgram("basis became singular".into()))
    }
}

/// Replaces basic column `r` in `binv` given `u = B⁻¹ a_enter`.
fn eta_update(binv: &mut DMatrix<f64>, u: &DVector<f64>, r: usize) {
    let m = binv.nrows();
    let inv = 1.0 / u[r];
    let mut pivot_row = binv.row(r).into_owned();
    pivot_row *= inv;
    for i in 0..m {
        if i != r && u[i] != 0.0 {
            let f = u[i];
            for j in 0..m {
                binv[(i, j)] -= f * pivot_row[j];
            }
        }
    }
    binv.set_row(r, &pivot_row);
}

/// Finds a basic feasible solution with artificial variables.
///
/// Entering columns follow Bland's rule. Ties in the ratio test go to the
/// largest pivot and then the lowest basic index; after a long run of pivots
/// the ties go to the lowest index alone, which cannot cycle.
pub fn basic_feasible_solution(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<BasicSolution> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::Precondition(format!(
            "right-hand side has length {}, expected {m}",
            b.len()
        )));
    }
    if n == 0 {
        return Err(Error::Precondition("linear program has no variables".into()));
    }
    let mut sa = a.clone();
    let mut sb = b.clone();
    for i in 0..m {
        if b[i] < 0.0 {
            sa.row_mut(i).neg_mut();
            sb[i] = -sb[i];
        }
    }
    let prob = Problem { m, n, a: sa, b: sb };
    let scale = 1.0 + b.amax();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let bland_after = 20 * (m + n);
    let max_pivots = 200 * (m + n);

    let mut pivots = 0;
    let mut binv = DMatrix::<f64>::identity(m, m);
    let mut since_refactor = 0;
    loop {
        if since_refactor >= REFACTOR_EVERY {
            binv = prob.inverse(&basis)?;
            since_refactor = 0;
        }
        let xb = &binv * &prob.b;
        let cb = DVector::from_iterator(m, basis.iter().map(|&j| if j >= n { 1.0 } else { 0.0 }));
        let y = binv.tr_mul(&cb);
        let in_basis = membership(&basis, n + m);

        // Reduced cost of structural column j is −yᵀ A_j.
        let Some(enter) = (0..n).find(|&j| !in_basis[j] && -prob.a.column(j).dot(&y) < -COST_TOL) else {
            break;
        };
        let u = &binv * prob.a.column(enter);
        let tol = PIVOT_TOL * u.amax().max(1.0);
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if u[i] <= tol {
                continue;
            }
            let ratio = xb[i].max(0.0) / u[i];
            leave = match leave {
                None => Some((i, ratio)),
                Some((r, best)) => {
                    let better = if ratio < best - RATIO_TIE_TOL {
                        true
                    } else if ratio <= best + RATIO_TIE_TOL {
                        if pivots < bland_after && (u[i] - u[r]).abs() > tol {
                            u[i] > u[r]
                        } else {
                            basis[i] < basis[r]
                        }
                    } else {
                        false
                    };
                    if better {
                        Some((i, ratio))
                    } else {
                        Some((r, best))
                    }
                }
            };
        }
        let Some((row, _)) = leave else {
            // Phase one is bounded below by zero.
            return Err(Error::LinearProgram(format!("phase one unbounded in column {enter}")));
        };
        eta_update(&mut binv, &u, row);
        basis[row] = enter;
        since_refactor += 1;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::LinearProgram(format!(
                "no termination after {max_pivots} pivots"
            )));
        }
    }

    let binv = prob.inverse(&basis)?;
    let xb = &binv * &prob.b;
    let infeasibility: f64 = basis
        .iter()
        .zip(xb.iter())
        .filter(|(&j, _)| j >= n)
        .map(|(_, v)| v.abs())
        .sum();
    if infeasibility > FEASIBILITY_TOL * scale {
        return Err(Error::LinearProgram(format!(
            "system is infeasible (artificial sum {infeasibility:e})"
        )));
    }

    // Drive artificials out of the basis where a structural column allows it.
    // Rows still held by an artificial afterwards are redundant.
    let mut binv = binv;
    for k in 0..m {
        if basis[k] < n {
            continue;
        }
        let z = binv.row(k).transpose();
        let in_basis = membership(&basis, n + m);
        let candidate = (0..n)
            .filter(|&j| !in_basis[j])
            .map(|j| (j, prob.a.column(j).dot(&z).abs()))
            .filter(|&(_, v)| v > DRIVE_OUT_TOL)
            .max_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((j, _)) = candidate {
            let u = &binv * prob.a.column(j);
            eta_update(&mut binv, &u, k);
            basis[k] = j;
        }
    }

    let bm = prob.basis_matrix(&basis);
    let lu = bm.clone().lu();
    let mut sol = lu
        .solve(&prob.b)
        .ok_or_else(|| Error::LinearProgram("final basis is singular".into()))?;
    // One step of iterative refinement against the original columns.
    let res = &prob.b - bm * &sol;
    if let Some(corr) = lu.solve(&res) {
        sol += corr;
    }
    let mut x = vec![0.0; n];
    for (k, &col) in basis.iter().enumerate() {
        if col < n {
            let v = sol[k];
            if v < -FEASIBILITY_TOL * scale {
                return Err(Error::LinearProgram(format!(
                    "basic variable {col} is negative ({v:e})"
                )));
            }
            x[col] = v;
        } else if sol[k].abs() > FEASIBILITY_TOL * scale {
            return Err(Error::LinearProgram(format!(
                "artificial variable left at {:e}",
                sol[k]
            )));
        }
    }
    resolve_support(a, b, &mut x, FEASIBILITY_TOL * scale);
    let mut cols: Vec<usize> = basis.into_iter().filter(|&c| c < n).collect();
    cols.sort_unstable();
    Ok(BasicSolution { x, basis: cols })
}

/// Degenerate basic variables come out as rounding noise around zero. They are
/// set to exactly zero and the remaining support is re-solved by least squares
/// on the original columns, which are linearly independent.
fn resolve_support(a: &DMatrix<f64>, b: &DVector<f64>, x: &mut [f64], zero_tol: f64) {
    let support: Vec<usize> = (0..x.len()).filter(|&j| x[j] > zero_tol).collect();
    for v in x.iter_mut() {
        if *v <= zero_tol {
            *v = 0.0;
        }
    }
    if support.is_empty() {
        return;
    }
    let a_s = a.select_columns(&support);
    if let Ok(sol) = a_s.svd(true, true).solve(b, 1e-14) {
        if sol.iter().all(|&v| v > 0.0) {
            for (k, &j) in support.iter().enumerate() {
                x[j] = sol[k];
            }
        }
    }
}

fn membership(basis: &[usize], len: usize) -> Vec<bool> {
    let mut v = vec![false; len];
    for &j in basis {
        v[j] = true;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unique_point() {
        let a = DMatrix::from_row_slice(1, 1, &[1.0]);
        let b = DVector::from_column_slice(&[3.0]);
        let s = basic_feasible_solution(&a, &b).unwrap();
        assert_eq!(s.x, vec![3.0]);
    }

    #[test]
    fn simple_polytope_vertex() {
        // x + y + z = 1, x − y = 0 → vertices (1/2, 1/2, 0) and (0, 0, 1).
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 1.0, 1.0, -1.0, 0.0]);
        let b = DVector::from_column_slice(&[1.0, 0.0]);
        let s = basic_feasible_solution(&a, &b).unwrap();
        let ok1 = (s.x[0] - 0.5).abs() < 1e-12 && (s.x[1] - 0.5).abs() < 1e-12 && s.x[2].abs() < 1e-12;
        let ok2 = s.x[0].abs() < 1e-12 && s.x[1].abs() < 1e-12 && (s.x[2] - 1.0).abs() < 1e-12;
        assert!(ok1 || ok2, "{:?}", s.x);
    }

    #[test]
    fn infeasible_is_reported() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = DVector::from_column_slice(&[-1.0]);
        assert!(matches!(basic_feasible_solution(&a, &b), Err(Error::LinearProgram(_))));
    }

    #[test]
    fn redundant_rows() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 1.0, 1.0]);
        let b = DVector::from_column_slice(&[1.0, 2.0, 1.0]);
        let s = basic_feasible_solution(&a, &b).unwrap();
        assert!((s.x[0] + s.x[1] - 1.0).abs() < 1e-12);
        assert_eq!(s.x.iter().filter(|&&v| v > 1e-12).count(), 1);
    }
}
