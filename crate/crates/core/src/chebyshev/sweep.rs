use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{weighted_chebyshev, MinimaxResult};
use crate::error::Result;
use crate::potential::EquilibriumMeasure;
use crate::realsets::{hausdorff_distance, sublevel_bands, Interval, RationalFunction};
use crate::weights::{szego_factor, WeightExpr};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EqualityReport {
    pub n: usize,
    /// Hausdorff distance between `(R Q_n^2)^{-1}([0, 1])` and the set.
    pub distance: f64,
    /// Smallest distance from a zero of `T_{n,w}` to a pole of `R`.
    pub pole_separation: f64,
    pub holds: bool,
}

/// Tests whether `K = (R Q_n^2)^{-1}([0,1])` with `Q_n = T_{n,w} / t_n`,
/// `w = sqrt(R)`.
pub fn equality_case_check(
    m: &EquilibriumMeasure,
    r: &RationalFunction,
    result: &MinimaxResult,
) -> Result<EqualityReport> {
    let w = WeightExpr::SqrtRational { r: r.clone() };
    // normalize so that sup_K sqrt(R) |Q| = 1
    let p = result.normalized_polynomial();
    let sup = m
        .set()
        .sample_points(20_000)
        .into_iter()
        .chain(result.extremal_points.iter().map(|e| e.0))
        .map(|x| w.eval(x) * p.eval(x).abs())
        .fold(0.0, f64::max);
    let q = p.scale(1.0 / sup);
    let pre = sublevel_bands(r, &q, Interval::new(0.0, 1.0))?;
    let distance = hausdorff_distance(&pre, m.set());
    let pole_separation = q
        .roots()
        .iter()
        .flat_map(|z| r.poles.iter().map(move |b| (z - b).norm()))
        .fold(f64::INFINITY, f64::min);
    Ok(EqualityReport {
        n: result.n,
        distance,
        pole_separation,
        holds: distance < 1e-6 && pole_separation > 1e-8,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub t_lower: f64,
    pub t_upper: f64,
    pub cap: f64,
    pub w_lower: f64,
    pub w_upper: f64,
    pub s: f64,
    /// `|W - 2S|` at the bracket midpoint.
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Whether `|W - 2S|` decreases strictly along the rows.
    pub decreasing: bool,
}

/// `W_{inf,n}` for each `n` in `ns`, against `2S`.
pub fn asymptotic_sweep(
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    ns: &[usize],
    tol: f64,
) -> Result<SweepTable> {
    let s = szego_factor(m, w, 1e-12)?.value;
    let log_cap = m.log_capacity();
    let rows: Vec<Result<SweepRow>> = ns
        .par_iter()
        .map(|&n| {
            let r = weighted_chebyshev(m, w, n, tol)?;
            let (lo, hi) = r.log_widom(log_cap);
            let (wl, wu) = (lo.exp(), hi.exp());
            Ok(SweepRow {
                n,
                t_lower: r.t_lower,
                t_upper: r.t_upper,
                cap: log_cap.exp(),
                w_lower: wl,
                w_upper: wu,
                s,
                gap: (0.5 * (wl + wu) - 2.0 * s).abs(),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let decreasing = rows.windows(2).all(|p| p[1].gap < p[0].gap);
    Ok(SweepTable { rows, decreasing })
}
