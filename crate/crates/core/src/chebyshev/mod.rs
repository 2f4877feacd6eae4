//! Weighted Chebyshev polynomials and sup-norm Widom factors.
//!
//! The monic minimax problem `min ||w P||_K` is written in a basis `q_k`
//! orthonormal on the initial grid, `P = lead * (q_n + sum_{k<n} d_k q_k)`,
//! and solved as a linear program on a grid. The dual of the grid problem is
//! `max sum lambda_i f_i` subject to `A^T lambda = 0`, `||lambda||_1 <= 1`,
//! whose value bounds the minimax norm from below. Local maxima of the
//! current error curve are polished off-grid and appended until the lower
//! bound and the achieved norm agree.

mod basis;
pub(crate) mod bounds;
mod sweep;

pub use basis::ArnoldiBasis;
pub use bounds::{bound_audit, sup_norm_bounds, BoundId, BoundReport, BoundStatus};
pub use sweep::{
    asymptotic_sweep, equality_case_check, EqualityReport, SweepRow, SweepTable,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::LinearProgram;
use crate::potential::EquilibriumMeasure;
use crate::realsets::RealPolynomial;
use crate::weights::WeightExpr;

const GRID_PER_DEGREE: usize = 64;
const MAX_ROUNDS: usize = 40;
/// Relative allowance for rounding in the evaluated norms.
const ROUNDING_PAD: f64 = 1e-12;

/// Weighted Chebyshev polynomial `T_{n,w}` with a certified norm bracket.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimaxResult {
    pub n: usize,
    pub basis: ArnoldiBasis,
    /// Coefficients of `q_n + sum d_k q_k`, ascending, last entry 1.
    pub coeffs: Vec<f64>,
    /// `log` of the factor that makes the normalized polynomial monic.
    pub log_lead: f64,
    pub log_t_lower: f64,
    pub log_t_upper: f64,
    pub t_lower: f64,
    pub t_upper: f64,
    /// Alternating extremal points `(x, sign of w P)`.
    pub extremal_points: Vec<(f64, i8)>,
    pub rounds: usize,
    /// Grid size of the final linear program.
    pub grid_size: usize,
}

impl MinimaxResult {
    /// Normalized polynomial `T_{n,w} / lead` at `x`.
    pub fn normalized(&self, x: f64) -> f64 {
        self.basis.eval(&self.coeffs, x)
    }

    /// Monic `T_{n,w}(x)`; may over- or underflow for large `n`.
    pub fn eval(&self, x: f64) -> f64 {
        self.log_lead.exp() * self.normalized(x)
    }

    /// `log W` bracket: `log t - n log cap`.
    pub fn log_widom(&self, log_cap: f64) -> (f64, f64) {
        let s = self.n as f64 * log_cap;
        (self.log_t_lower - s, self.log_t_upper - s)
    }

    /// Normalized polynomial in the power basis of `x`.
    pub fn normalized_polynomial(&self) -> RealPolynomial {
        let mut acc = vec![0.0; self.n + 1];
        for (c, q) in self.coeffs.iter().zip(self.basis.power_rows()) {
            for (a, v) in acc.iter_mut().zip(&q) {
                *a += c * v;
            }
        }
        RealPolynomial::from_coeffs(acc).expect("leading coefficient is nonzero")
    }
}

/// Chebyshev-Lobatto points per band, in proportion to equilibrium mass.
fn initial_grid(m: &EquilibriumMeasure, n: usize) -> Vec<f64> {
    let masses = m.band_masses();
    let total = GRID_PER_DEGREE * n.max(1);
    let mut xs = Vec::new();
    for (b, mu) in m.set().bands().iter().zip(masses) {
        let k = ((total as f64 * mu).ceil() as usize).max(16);
        for j in 0..k {
            let t = std::f64::consts::PI * j as f64 / (k - 1) as f64;
            let x = if j == 0 {
                b.hi
            } else if j == k - 1 {
                b.lo
            } else {
                b.mid() + b.rad() * t.cos()
            };
            xs.push(x);
        }
    }
    xs
}

struct Problem<'a> {
    w: &'a WeightExpr,
    basis: ArnoldiBasis,
    w_scale: f64,
}

impl Problem<'_> {
    fn weight(&self, x: f64) -> f64 {
        self.w.eval(x) / self.w_scale
    }

    fn error(&self, coeffs: &[f64], x: f64) -> f64 {
        self.weight(x) * self.basis.eval(coeffs, x)
    }
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a) <= 1e-16 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Polished local maxima of `|e|` per band: `(x, e(x))`.
fn local_maxima(
    p: &Problem,
    m: &EquilibriumMeasure,
    grid: &[f64],
    coeffs: &[f64],
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for b in m.set().bands() {
        let mut xs: Vec<f64> = grid.iter().copied().filter(|&x| b.contains(x)).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let vals: Vec<f64> = xs.iter().map(|&x| p.error(coeffs, x)).collect();
        let k = xs.len();
        for i in 0..k {
            let v = vals[i].abs();
            let left = if i > 0 { vals[i - 1].abs() } else { f64::NEG_INFINITY };
            let right = if i + 1 < k { vals[i + 1].abs() } else { f64::NEG_INFINITY };
            if v == 0.0 || v < left || v < right {
                continue;
            }
            let lo = if i > 0 { xs[i - 1] } else { xs[i] };
            let hi = if i + 1 < k { xs[i + 1] } else { xs[i] };
            let f = |x: f64| p.error(coeffs, x).abs();
            let (mut xb, mut fb) = if hi > lo { golden_max(&f, lo, hi) } else { (xs[i], v) };
            if v > fb {
                xb = xs[i];
                fb = v;
            }
            let _ = fb;
            out.push((xb, p.error(coeffs, xb)));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-15 * (1.0 + a.0.abs()));
    out
}

/// Largest `tau` such that the points with `|e| >= tau` carry at least
/// `need` sign alternations.
fn vallee_poussin(maxima: &[(f64, f64)], need: usize) -> (f64, Vec<(f64, i8)>) {
    let mut levels: Vec<f64> = maxima.iter().map(|p| p.1.abs()).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    for tau in levels {
        let mut seq: Vec<(f64, f64)> = Vec::new();
        for &(x, e) in maxima.iter().filter(|p| p.1.abs() >= tau) {
            match seq.last_mut() {
                Some(last) if last.1.signum() == e.signum() => {
                    if e.abs() > last.1.abs() {
                        *last = (x, e);
                    }
                }
                _ => seq.push((x, e)),
            }
        }
        if seq.len() >= need {
            let pts = seq.iter().map(|&(x, e)| (x, e.signum() as i8)).collect();
            return (tau, pts);
        }
    }
    (0.0, Vec::new())
}

/// Monic weighted Chebyshev polynomial of degree `n` on the set of `m`.
pub fn weighted_chebyshev(
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    n: usize,
    tol: f64,
) -> Result<MinimaxResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    let mut grid = initial_grid(m, n);
    let w_scale = grid.iter().map(|&x| w.eval(x)).fold(0.0, f64::max);
    if !(w_scale > 0.0) || !w_scale.is_finite() {
        return Err(Error::InvalidArgument("weight vanishes on the grid".into()));
    }
    let p = Problem {
        w,
        basis: ArnoldiBasis::new(&grid, m.set().hull(), n),
        w_scale,
    };
    let log_lead = p.basis.log_lead();
    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();

    let mut basis: Option<Vec<usize>> = None;
    let mut best: Option<(Vec<f64>, f64, f64, Vec<(f64, i8)>)> = None;
    let mut rounds = 0;
    let mut converged = false;
    let mut last_bracket = (0.0, f64::INFINITY);
    while rounds < MAX_ROUNDS {
        rounds += 1;
        rows.extend(grid[rows.len()..].iter().map(|&x| (p.weight(x), p.basis.row(x))));
        let mcols = 1 + 2 * rows.len();
        let mut a = DMatrix::zeros(n + 1, mcols);
        let mut c = DVector::zeros(mcols);
        a[(n, 0)] = 1.0;
        for (i, (wi, t)) in rows.iter().enumerate() {
            for k in 0..n {
                a[(k, 1 + 2 * i)] = wi * t[k];
                a[(k, 2 + 2 * i)] = -wi * t[k];
            }
            a[(n, 1 + 2 * i)] = 1.0;
            a[(n, 2 + 2 * i)] = 1.0;
            c[1 + 2 * i] = wi * t[n];
            c[2 + 2 * i] = -wi * t[n];
        }
        let mut b = DVector::zeros(n + 1);
        b[n] = 1.0;
        let lp = LinearProgram::new(a, b, c)?;
        let sol = lp.solve_from(basis.as_deref())?;
        basis = Some(sol.basis.clone());
        let mut coeffs: Vec<f64> = (0..n).map(|k| -sol.y[k]).collect();
        coeffs.push(1.0);
        let lp_lower = sol.objective.max(0.0);

        let maxima = local_maxima(&p, m, &grid, &coeffs);
        let upper = maxima.iter().map(|q| q.1.abs()).fold(0.0, f64::max);
        let (dvp, alt) = vallee_poussin(&maxima, n + 1);
        let lower = lp_lower.max(dvp);
        let raw_gap = upper - lower;
        let upper = upper * (1.0 + ROUNDING_PAD);
        let lower = lower * (1.0 - ROUNDING_PAD);
        let improved = match &best {
            None => true,
            Some((_, l, u, _)) => upper - lower < u - l,
        };
        if improved {
            best = Some((coeffs.clone(), lower, upper, alt));
        }
        last_bracket = (lower, upper);
        if raw_gap <= tol * upper {
            converged = true;
            break;
        }
        let before = grid.len();
        for &(x, _) in &maxima {
            if grid.iter().all(|&g| (g - x).abs() > 1e-15 * (1.0 + x.abs())) {
                grid.push(x);
            }
        }
        if grid.len() == before {
            break;
        }
    }
    let (coeffs, lower, upper, alt) = best.expect("at least one round");
    if !converged {
        let s = log_lead + w_scale.ln();
        return Err(Error::ToleranceUnreachable {
            lo: (s + last_bracket.0.ln()).exp(),
            hi: (s + last_bracket.1.ln()).exp(),
        });
    }
    let log_scale = log_lead + w_scale.ln();
    let log_t_lower = log_scale + lower.ln();
    let log_t_upper = log_scale + upper.ln();
    Ok(MinimaxResult {
        n,
        basis: p.basis,
        coeffs,
        log_lead,
        log_t_lower,
        log_t_upper,
        t_lower: log_t_lower.exp(),
        t_upper: log_t_upper.exp(),
        extremal_points: alt,
        rounds,
        grid_size: grid.len(),
    })
}

/// Bracket on `W_{inf,n} = t_n / cap^n`.
pub fn widom_infty(
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    n: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    let r = weighted_chebyshev(m, w, n, tol)?;
    let (lo, hi) = r.log_widom(m.log_capacity());
    Ok((lo.exp(), hi.exp()))
}
