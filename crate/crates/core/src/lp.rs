//! Dense revised simplex for `max c^T x` subject to `A x = b`, `x >= 0`.
//!
//! Sized for problems with a few dozen rows and a few thousand columns. The
//! basis inverse is kept explicitly, updated by elementary row operations and
//! refactored periodically. Phase one uses one artificial per row; in phase
//! two artificials that are still basic are held at zero.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone)]
pub struct LinearProgram {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: DVector<f64>,
    /// Simplex multipliers `y = c_B^T B^{-1}`, a solution of the dual.
    pub y: DVector<f64>,
    pub objective: f64,
    pub basis: Vec<usize>,
    pub iterations: usize,
}

struct State {
    basis: Vec<usize>,
    binv: DMatrix<f64>,
    xb: DVector<f64>,
    iterations: usize,
}

impl LinearProgram {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() || a.ncols() != c.len() {
            return Err(Error::InvalidArgument("LP dimensions disagree".into()));
        }
        let mut a = a;
        let mut b = b;
        for i in 0..b.len() {
            if b[i] < 0.0 {
                b[i] = -b[i];
                a.row_mut(i).neg_mut();
            }
        }
        Ok(Self { a, b, c })
    }

    fn rows(&self) -> usize {
        self.a.nrows()
    }

    fn cols(&self) -> usize {
        self.a.ncols()
    }

    /// Column `j`, with artificial columns after the structural ones.
    fn column(&self, j: usize) -> DVector<f64> {
        if j < self.cols() {
            self.a.column(j).into_owned()
        } else {
            let mut e = DVector::zeros(self.rows());
            e[j - self.cols()] = 1.0;
            e
        }
    }

    fn basis_matrix(&self, basis: &[usize]) -> DMatrix<f64> {
        let m = self.rows();
        let mut bm = DMatrix::zeros(m, m);
        for (k, &j) in basis.iter().enumerate() {
            bm.set_column(k, &self.column(j));
        }
        bm
    }

    fn refactor(&self, st: &mut State) -> Result<()> {
        let bm = self.basis_matrix(&st.basis);
        st.binv = bm.try_inverse().ok_or(Error::SingularSystem {
            condition: f64::INFINITY,
        })?;
        st.xb = &st.binv * &self.b;
        for v in st.xb.iter_mut() {
            if *v < 0.0 && *v > -1e-12 {
                *v = 0.0;
            }
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution> {
        self.solve_from(None)
    }

    /// Solves, starting from `basis` when it is primal feasible.
    pub fn solve_from(&self, basis: Option<&[usize]>) -> Result<LpSolution> {
        let m = self.rows();
        let n = self.cols();
        let mut st = State {
            basis: (n..n + m).collect(),
            binv: DMatrix::identity(m, m),
            xb: self.b.clone(),
            iterations: 0,
        };
        let mut warm = false;
        if let Some(bs) = basis {
            if bs.len() == m && bs.iter().all(|&j| j < n + m) {
                let mut trial = State {
                    basis: bs.to_vec(),
                    binv: DMatrix::identity(m, m),
                    xb: self.b.clone(),
                    iterations: 0,
                };
                if self.refactor(&mut trial).is_ok() && trial.xb.iter().all(|&v| v >= -1e-9) {
                    st = trial;
                    warm = true;
                }
            }
        }
        if !warm {
            let mut c1 = DVector::zeros(n + m);
            for i in 0..m {
                c1[n + i] = -1.0;
            }
            self.iterate(&mut st, &c1, false)?;
            let infeas: f64 = st
                .basis
                .iter()
                .zip(st.xb.iter())
                .filter(|(&j, _)| j >= n)
                .map(|(_, &v)| v)
                .sum();
            if infeas > 1e-9 * self.b.amax().max(1.0) {
                return Err(Error::LpInfeasible);
            }
        }
        let mut c2 = DVector::zeros(n + m);
        c2.rows_mut(0, n).copy_from(&self.c);
        self.iterate(&mut st, &c2, true)?;
        self.refactor(&mut st)?;
        let cb = DVector::from_iterator(m, st.basis.iter().map(|&j| c2[j]));
        let y = st.binv.transpose() * &cb;
        let mut x = DVector::zeros(n);
        for (k, &j) in st.basis.iter().enumerate() {
            if j < n {
                x[j] = st.xb[k].max(0.0);
            }
        }
        let objective = self.c.dot(&x);
        Ok(LpSolution {
            x,
            y,
            objective,
            basis: st.basis,
            iterations: st.iterations,
        })
    }

    fn iterate(&self, st: &mut State, cost: &DVector<f64>, phase_two: bool) -> Result<()> {
        let m = self.rows();
        let n = self.cols();
        let cap = 50 * (n + m) + 1000;
        let opt_tol = 1e-12 * cost.amax().max(1.0);
        let mut degenerate_run = 0usize;
        let mut since_refactor = 0usize;
        loop {
            if st.iterations >= cap {
                return Err(Error::IterationCap(cap));
            }
            let cb = DVector::from_iterator(m, st.basis.iter().map(|&j| cost[j]));
            let y = st.binv.transpose() * &cb;
            let reduced = cost.rows(0, n) - self.a.transpose() * &y;
            let bland = degenerate_run > 2 * m;
            let mut entering = None;
            let mut best = opt_tol;
            let in_basis = {
                let mut f = vec![false; n + m];
                for &j in &st.basis {
                    f[j] = true;
                }
                f
            };
            for j in 0..n {
                if in_basis[j] {
                    continue;
                }
                let d = reduced[j];
                if d > best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(());
            };
            let u = &st.binv * self.a.column(q);
            let umax = u.amax().max(1.0);
            let mut leave: Option<(usize, f64, f64)> = None;
            for i in 0..m {
                let ui = u[i];
                let art_zero = phase_two && st.basis[i] >= n;
                let ratio = if art_zero && ui.abs() > PIVOT_TOL * umax {
                    0.0
                } else if ui > PIVOT_TOL * umax {
                    st.xb[i].max(0.0) / ui
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((li, lr, lu)) => {
                        if ratio < lr - 1e-14 {
                            true
                        } else if ratio <= lr + 1e-14 {
                            if bland {
                                st.basis[i] < st.basis[li]
                            } else {
                                ui.abs() > lu.abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio, ui));
                }
            }
            let Some((r, step, _)) = leave else {
                return Err(Error::LpUnbounded);
            };
            degenerate_run = if step <= 1e-15 { degenerate_run + 1 } else { 0 };
            // pivot
            let ur = u[r];
            for k in 0..m {
                st.binv[(r, k)] /= ur;
            }
            st.xb[r] /= ur;
            for i in 0..m {
                if i != r && u[i] != 0.0 {
                    let f = u[i];
                    for k in 0..m {
                        let v = st.binv[(r, k)];
                        st.binv[(i, k)] -= f * v;
                    }
                    st.xb[i] -= f * st.xb[r];
                    if st.xb[i] < 0.0 && st.xb[i] > -1e-12 {
                        st.xb[i] = 0.0;
                    }
                }
            }
            st.basis[r] = q;
            st.iterations += 1;
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactor(st)?;
                since_refactor = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
        let a = DMatrix::from_row_slice(
            3,
            5,
            &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 3.0, 2.0, 0.0, 0.0, 1.0],
        );
        let b = DVector::from_vec(vec![4.0, 12.0, 18.0]);
        let c = DVector::from_vec(vec![3.0, 5.0, 0.0, 0.0, 0.0]);
        let s = LinearProgram::new(a, b, c).unwrap().solve().unwrap();
        assert!((s.objective - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        // dual solution: (0, 3/2, 1)
        assert!((s.y[1] - 1.5).abs() < 1e-12 && (s.y[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let c = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(
            LinearProgram::new(a, b, c).unwrap().solve(),
            Err(Error::LpInfeasible)
        ));
        let a = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let b = DVector::from_vec(vec![1.0]);
        let c = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(
            LinearProgram::new(a, b, c).unwrap().solve(),
            Err(Error::LpUnbounded)
        ));
    }

    #[test]
    fn warm_start_reaches_same_optimum() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 1.0, 0.0, 3.0, 1.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![8.0, 9.0]);
        let c = DVector::from_vec(vec![2.0, 3.0, 0.0, 0.0]);
        let lp = LinearProgram::new(a, b, c).unwrap();
        let cold = lp.solve().unwrap();
        let warm = lp.solve_from(Some(&[2, 3])).unwrap();
        assert!((cold.objective - warm.objective).abs() < 1e-12);
        assert!((cold.objective - 13.0).abs() < 1e-12);
    }
}
