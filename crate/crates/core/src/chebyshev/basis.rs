//! Polynomial basis orthonormal on a point set, built by Arnoldi on the
//! multiplication operator. Monomial or hull-Chebyshev bases lose all
//! precision on thin many-band sets; this one stays of unit size on the set.

use serde::{Deserialize, Serialize};

use crate::realsets::Interval;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArnoldiBasis {
    pub hull: Interval,
    /// Column `k` holds `h_{0..=k+1, k}`.
    pub h: Vec<Vec<f64>>,
}

impl ArnoldiBasis {
    /// Basis `q_0..q_n` with `(1/N) sum_i q_j(x_i) q_k(x_i) = delta_jk`.
    pub fn new(points: &[f64], hull: Interval, n: usize) -> Self {
        let np = points.len() as f64;
        let u: Vec<f64> = points.iter().map(|&x| (x - hull.mid()) / hull.rad()).collect();
        let mut q: Vec<Vec<f64>> = vec![vec![1.0; points.len()]];
        let mut h = Vec::with_capacity(n);
        for k in 0..n {
            let mut v: Vec<f64> = q[k].iter().zip(&u).map(|(a, b)| a * b).collect();
            let mut col = vec![0.0; k + 2];
            // two passes of classical Gram-Schmidt
            for _ in 0..2 {
                for (j, qj) in q.iter().enumerate() {
                    let c = qj.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / np;
                    col[j] += c;
                    for (vi, qi) in v.iter_mut().zip(qj) {
                        *vi -= c * qi;
                    }
                }
            }
            let norm = (v.iter().map(|a| a * a).sum::<f64>() / np).sqrt();
            col[k + 1] = norm;
            q.push(v.into_iter().map(|a| a / norm).collect());
            h.push(col);
        }
        Self { hull, h }
    }

    pub fn degree(&self) -> usize {
        self.h.len()
    }

    fn u(&self, x: f64) -> f64 {
        (x - self.hull.mid()) / self.hull.rad()
    }

    /// `q_0(x), ..., q_n(x)`.
    pub fn row(&self, x: f64) -> Vec<f64> {
        let u = self.u(x);
        let mut q = Vec::with_capacity(self.degree() + 1);
        q.push(1.0);
        for (k, col) in self.h.iter().enumerate() {
            let mut v = u * q[k];
            for j in 0..=k {
                v -= col[j] * q[j];
            }
            q.push(v / col[k + 1]);
        }
        q
    }

    pub fn eval(&self, c: &[f64], x: f64) -> f64 {
        self.row(x).iter().zip(c).map(|(a, b)| a * b).sum()
    }

    /// `log` of the factor `L` such that `L q_n` is monic in `x`.
    pub fn log_lead(&self) -> f64 {
        let n = self.degree() as f64;
        n * self.hull.rad().ln() + self.h.iter().enumerate().map(|(k, c)| c[k + 1].ln()).sum::<f64>()
    }

    /// Ascending power-basis coefficients of `q_0..q_n` in `x`.
    pub fn power_rows(&self) -> Vec<Vec<f64>> {
        let (s, t) = (1.0 / self.hull.rad(), -self.hull.mid() / self.hull.rad());
        let mut q: Vec<Vec<f64>> = vec![vec![1.0]];
        for (k, col) in self.h.iter().enumerate() {
            let mut v = vec![0.0; k + 2];
            for (i, &c) in q[k].iter().enumerate() {
                v[i] += t * c;
                v[i + 1] += s * c;
            }
            for j in 0..=k {
                for (i, &c) in q[j].iter().enumerate() {
                    v[i] -= col[j] * c;
                }
            }
            q.push(v.into_iter().map(|a| a / col[k + 1]).collect());
        }
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_on_points_and_consistent_off_them() {
        let pts: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin() * 2.0 + 1.0).collect();
        let hull = Interval::new(-1.0, 3.0);
        let b = ArnoldiBasis::new(&pts, hull, 6);
        let rows: Vec<Vec<f64>> = pts.iter().map(|&x| b.row(x)).collect();
        for j in 0..=6 {
            for k in 0..=6 {
                let g = rows.iter().map(|r| r[j] * r[k]).sum::<f64>() / 40.0;
                assert!((g - if j == k { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        let pw = b.power_rows();
        for x in [-0.7, 0.4, 2.9] {
            let r = b.row(x);
            for k in 0..=6 {
                let direct = pw[k].iter().rev().fold(0.0, |acc, c| acc * x + c);
                assert!((direct - r[k]).abs() < 1e-9 * (1.0 + r[k].abs()));
            }
        }
        let lead = pw[6][6];
        assert!((b.log_lead() + lead.ln()).abs() < 1e-12);
    }
}
