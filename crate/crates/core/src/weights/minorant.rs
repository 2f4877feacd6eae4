//! Rational-product minorants of weights with isolated zeros.
//!
//! Near each zero `x0` the neighbourhood is cut into dyadic levels
//! `[y_k, y_{k+1}]` with `|y_k - x0| = rho 2^{1-k}`. Each level is split into
//! equal cells until the upper Darboux sum of `|log w|` against the
//! equilibrium measure is within `2^{-k}` of the integral. A cell `[x_j,
//! x_j + h]` contributes the factor `|(x - a)/(x - a - i sqrt(3) h)|^r` with
//! `a` the far end of the cell and `r = ceil(l / log 2)`, where `l` bounds
//! `|log w|` on the cell. The factor is at most one everywhere and at most
//! one half on the cell.

use std::f64::consts::LN_2;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{szego_factor, validate_product, ProductPairs, ProductReport, TailBound, WeightExpr};
use crate::error::{Error, Result};
use crate::potential::EquilibriumMeasure;

#[derive(Debug, Clone)]
pub struct MinorantParams {
    /// Neighbourhood radius around each zero, clipped to the band.
    pub radius: f64,
    /// Levels stop once the uncovered core is narrower than this.
    pub core: f64,
    pub max_levels: usize,
    pub initial_cells: usize,
    /// Largest number of cells per level.
    pub max_cells: usize,
    /// Samples per cell for the supremum of `|log w|`.
    pub sup_samples: usize,
    pub audit_points: usize,
    pub integral_tol: f64,
}

impl Default for MinorantParams {
    fn default() -> Self {
        Self {
            radius: 0.25,
            core: 1e-6,
            max_levels: 40,
            initial_cells: 4,
            max_cells: 1 << 12,
            sup_samples: 257,
            audit_points: 10_000,
            integral_tol: 1e-12,
        }
    }
}

/// Darboux data for one dyadic level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelRecord {
    pub zero: f64,
    pub level: usize,
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
    pub upper_sum: f64,
    pub integral: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditRow {
    pub x: f64,
    pub log_w: f64,
    pub log_cw0: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinorantResult {
    pub w0: WeightExpr,
    pub c: f64,
    pub levels: Vec<LevelRecord>,
    pub report: Option<ProductReport>,
    pub audit: Vec<AuditRow>,
    pub audit_passed: bool,
}

impl MinorantResult {
    pub fn write_audit_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        for row in &self.audit {
            wr.serialize(row).map_err(io)?;
        }
        wr.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn pairs(&self) -> Option<&ProductPairs> {
        match &self.w0 {
            WeightExpr::InfiniteProduct { pairs } => Some(pairs),
            _ => None,
        }
    }
}

struct Side {
    pairs: ProductPairs,
    levels: Vec<LevelRecord>,
    green_levels: Vec<f64>,
    abs_levels: Vec<f64>,
}

/// Sampled sup of `f` on `[lo, hi]` inflated by the largest jump between
/// neighbouring samples.
fn sampled_sup(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut jump: f64 = 0.0;
    let mut prev = None;
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let v = f(x);
        best = best.max(v);
        if let Some(p) = prev {
            let d: f64 = v - p;
            jump = jump.max(d.abs());
        }
        prev = Some(v);
    }
    best + jump
}

fn build_side(
    m: &EquilibriumMeasure,
    neg_log: &dyn Fn(f64) -> f64,
    x0: f64,
    rho: f64,
    dir: f64,
    p: &MinorantParams,
) -> Result<Side> {
    let mut side = Side {
        pairs: ProductPairs::new(vec![], vec![], vec![])?,
        levels: Vec::new(),
        green_levels: Vec::new(),
        abs_levels: Vec::new(),
    };
    for k in 1..=p.max_levels {
        let far = x0 + dir * rho * 0.5f64.powi(k as i32 - 1);
        let near = x0 + dir * rho * 0.5f64.powi(k as i32);
        let (lo, hi) = if far < near { (far, near) } else { (near, far) };
        let integral = m.integrate_range(lo, hi, neg_log, p.integral_tol)?;
        let goal = 0.5f64.powi(k as i32);
        let mut n = p.initial_cells;
        let (ells, upper) = loop {
            let h = (hi - lo) / n as f64;
            let mut ells = Vec::with_capacity(n);
            let mut upper = 0.0;
            for j in 0..n {
                let (a, b) = (lo + h * j as f64, lo + h * (j + 1) as f64);
                let l = sampled_sup(neg_log, a, b, p.sup_samples);
                upper += l * m.mass(a, b);
                ells.push(l);
            }
            if (upper - integral).abs() < goal {
                break (ells, upper);
            }
            n *= 2;
            if n > p.max_cells {
                return Err(Error::RefinementBudget(p.max_cells));
            }
        };
        let h = (hi - lo) / n as f64;
        let (mut g_sum, mut a_sum) = (0.0, 0.0);
        // cells ordered from the far end toward x0
        for i in 0..n {
            let j = if dir < 0.0 { i } else { n - 1 - i };
            let a = if dir < 0.0 {
                lo + h * j as f64
            } else {
                lo + h * (j + 1) as f64
            };
            let l = ells[j];
            if !l.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "weight is not bounded below on [{}, {}]",
                    lo + h * j as f64,
                    lo + h * (j + 1) as f64
                )));
            }
            let r = (l / LN_2).ceil().max(1.0) as u32;
            let b = Complex64::new(a, 3f64.sqrt() * h);
            g_sum += r as f64 * m.green(b)?;
            a_sum += r as f64 * b.im;
            side.pairs.a.push(a);
            side.pairs.b.push(b);
            side.pairs.r.push(r);
        }
        side.green_levels.push(g_sum);
        side.abs_levels.push(a_sum);
        side.levels.push(LevelRecord {
            zero: x0,
            level: k,
            lo,
            hi,
            cells: n,
            upper_sum: upper,
            integral,
        });
        if rho * 0.5f64.powi(k as i32) < p.core {
            break;
        }
    }
    Ok(side)
}

/// Geometric extrapolation of the omitted levels from the last two.
fn tail_estimate(levels: &[f64]) -> f64 {
    match levels {
        [.., a, b] if *a > 0.0 && b < a => b * (b / a) / (1.0 - b / a),
        [.., b] => *b,
        [] => 0.0,
    }
}

fn audit(
    k: &crate::realsets::RealCompactSet,
    log_w: &dyn Fn(f64) -> f64,
    log_c: f64,
    w0: &WeightExpr,
    n: usize,
) -> (Vec<AuditRow>, bool) {
    let slack = (1e-9f64).ln_1p();
    let rows: Vec<AuditRow> = k
        .sample_points(n)
        .into_iter()
        .map(|x| {
            let lw = log_w(x);
            let lc = log_c + w0.log_eval(x);
            let pass = lc == f64::NEG_INFINITY || lc <= lw + slack;
            AuditRow {
                x,
                log_w: lw,
                log_cw0: lc,
                pass,
            }
        })
        .collect();
    let ok = rows.iter().all(|r| r.pass);
    (rows, ok)
}

/// Minorant of a weight given through `log w`, with a single zero at `x0`.
pub fn minorant_single_zero_sampled(
    m: &EquilibriumMeasure,
    log_w: &dyn Fn(f64) -> f64,
    x0: f64,
    params: &MinorantParams,
) -> Result<MinorantResult> {
    let k = m.set();
    let band = k
        .band_of(x0)
        .map(|i| k.bands()[i])
        .ok_or_else(|| Error::InvalidArgument(format!("zero {x0} is not in the set")))?;
    let samples = k.sample_points(4096);
    let log_sup = samples
        .iter()
        .map(|&x| log_w(x))
        .fold(f64::NEG_INFINITY, f64::max);
    if !log_sup.is_finite() {
        return Err(Error::InvalidArgument("weight vanishes on the set".into()));
    }
    // scale so that s w <= 1/2 with a margin for unsampled maxima
    let log_s = -LN_2 - log_sup - 0.01;
    let neg_log = |x: f64| -(log_s + log_w(x));

    let mut sides = Vec::new();
    let mut hood = (x0, x0);
    for dir in [-1.0, 1.0] {
        let room = if dir < 0.0 { x0 - band.lo } else { band.hi - x0 };
        if room <= 0.0 {
            continue;
        }
        let rho = params.radius.min(0.5 * room);
        if dir < 0.0 {
            hood.0 = x0 - rho;
        } else {
            hood.1 = x0 + rho;
        }
        sides.push(build_side(m, &neg_log, x0, rho, dir, params)?);
    }

    // inf of s w outside the covered neighbourhood
    let log_l = samples
        .iter()
        .filter(|&&x| x < hood.0 || x > hood.1)
        .map(|&x| log_s + log_w(x))
        .fold(f64::INFINITY, f64::min);
    if log_l == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument(
            "weight is not bounded away from zero outside the neighbourhood".into(),
        ));
    }
    let log_c = log_l.min(0.0) - log_s;

    let head = ProductPairs::new(vec![x0], vec![Complex64::new(x0, 1.0)], vec![1])?;
    let mut parts = vec![head];
    parts.extend(sides.iter().map(|s| s.pairs.clone()));
    let mut pairs = ProductPairs::interleave(&parts);
    // interleave puts the two sides alternately after the head factor
    let core = params.core;
    pairs.tail = Some(TailBound {
        abs_sum: sides.iter().map(|s| tail_estimate(&s.abs_levels)).sum(),
        green_sum: sides.iter().map(|s| tail_estimate(&s.green_levels)).sum(),
        accumulation: vec![x0],
        radius: core,
    });
    let report = validate_product(m, &pairs, pairs.len())?;
    let w0 = WeightExpr::InfiniteProduct { pairs };
    let (audit, audit_passed) = audit(k, log_w, log_c, &w0, params.audit_points);
    Ok(MinorantResult {
        w0,
        c: log_c.exp(),
        levels: sides.into_iter().flat_map(|s| s.levels).collect(),
        report: Some(report),
        audit,
        audit_passed,
    })
}

fn require_szego(m: &EquilibriumMeasure, w: &WeightExpr) -> Result<()> {
    let s = szego_factor(m, w, 1e-10)?;
    if s.non_szego || s.value <= 0.0 {
        return Err(Error::NotSzegoClass(format!("{w:?}")));
    }
    Ok(())
}

/// Minorant `C w0 <= w` with `w0` a rational product weight vanishing at `x0`.
pub fn minorant_single_zero(
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    x0: f64,
    params: &MinorantParams,
) -> Result<MinorantResult> {
    require_szego(m, w)?;
    minorant_single_zero_sampled(m, &|x| w.log_eval(x), x0, params)
}

/// Minorant for a weight whose zeros on the set are the points of `zeros`.
pub fn minorant_multi_zero(
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    zeros: &[f64],
    params: &MinorantParams,
) -> Result<MinorantResult> {
    require_szego(m, w)?;
    let k = m.set();
    let log_w = |x: f64| w.log_eval(x);
    let mut xs = zeros.to_vec();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.is_empty() {
        let log_c = k
            .sample_points(4096)
            .into_iter()
            .map(log_w)
            .fold(f64::INFINITY, f64::min);
        if !log_c.is_finite() {
            return Err(Error::InvalidArgument("weight has zeros on the set".into()));
        }
        let w0 = WeightExpr::one();
        let (audit, audit_passed) = audit(k, &log_w, log_c, &w0, params.audit_points);
        return Ok(MinorantResult {
            w0,
            c: log_c.exp(),
            levels: Vec::new(),
            report: None,
            audit,
            audit_passed,
        });
    }
    if xs.len() == 1 {
        return minorant_single_zero_sampled(m, &log_w, xs[0], params);
    }

    // disjoint closed neighbourhoods U_i of radius rho
    let sep = xs.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
    let rho = params.radius.min(0.4 * sep);
    let local = MinorantParams {
        radius: rho,
        ..params.clone()
    };
    let mut parts = Vec::new();
    let mut levels = Vec::new();
    let mut log_c = 0.0;
    for &x0 in &xs {
        let wi = move |x: f64| {
            if (x - x0).abs() <= rho {
                w.log_eval(x)
            } else {
                0.0
            }
        };
        let r = minorant_single_zero_sampled(m, &wi, x0, &local)?;
        log_c += r.c.ln();
        levels.extend(r.levels.iter().cloned());
        if let WeightExpr::InfiniteProduct { pairs } = r.w0 {
            parts.push(pairs);
        }
    }
    // the factor away from all neighbourhoods is bounded below
    let rest = k
        .sample_points(4096)
        .into_iter()
        .filter(|x| xs.iter().all(|x0| (x - x0).abs() > rho))
        .map(log_w)
        .fold(0.0, f64::min);
    if !rest.is_finite() {
        return Err(Error::InvalidArgument(
            "weight vanishes away from the declared zeros".into(),
        ));
    }
    log_c += rest;
    let pairs = ProductPairs::interleave(&parts);
    let report = validate_product(m, &pairs, pairs.len())?;
    let w0 = WeightExpr::InfiniteProduct { pairs };
    let (audit, audit_passed) = audit(k, &log_w, log_c, &w0, params.audit_points);
    Ok(MinorantResult {
        w0,
        c: log_c.exp(),
        levels,
        report: Some(report),
        audit,
        audit_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realsets::RealCompactSet;

    fn unit() -> EquilibriumMeasure {
        EquilibriumMeasure::new(&RealCompactSet::interval(-1.0, 1.0).unwrap()).unwrap()
    }

    fn check(r: &MinorantResult) {
        assert!(r.audit_passed);
        assert_eq!(r.audit.len(), 10_000);
        let rep = r.report.as_ref().unwrap();
        assert!(rep.green_partial.is_finite() && rep.szego_lower > 0.0);
        for l in &r.levels {
            assert!((l.upper_sum - l.integral).abs() < 0.5f64.powi(l.level as i32));
        }
    }

    #[test]
    fn endpoint_strong_zero() {
        let m = unit();
        let w = WeightExpr::StrongZero { x0: 1.0, alpha: 0.25 };
        let r = minorant_single_zero(&m, &w, 1.0, &MinorantParams::default()).unwrap();
        check(&r);
    }

    #[test]
    fn interior_strong_zero() {
        let m = unit();
        let w = WeightExpr::StrongZero { x0: 0.0, alpha: 0.5 };
        let r = minorant_single_zero(&m, &w, 0.0, &MinorantParams::default()).unwrap();
        check(&r);
        let pairs = r.pairs().unwrap();
        assert_eq!(pairs.a[0], 0.0);
        assert!(pairs.a[1] < 0.0 && pairs.a[2] > 0.0);
    }

    #[test]
    fn jacobi_endpoint_zero() {
        let m = unit();
        let w = WeightExpr::jacobi(1.0, 0.0, m.set());
        let r = minorant_single_zero(&m, &w, 1.0, &MinorantParams::default()).unwrap();
        check(&r);
    }

    #[test]
    fn multi_zero_cases() {
        let m = unit();
        let w = WeightExpr::AbsRational {
            r: crate::realsets::RationalFunction::real_zeros_poles(1.0, &[-1.0, 0.0, 1.0], &[])
                .unwrap(),
        };
        let p = MinorantParams::default();
        let r = minorant_multi_zero(&m, &w, &[-1.0, 0.0, 1.0], &p).unwrap();
        check(&r);

        let s = WeightExpr::StrongZero { x0: 0.0, alpha: 0.5 };
        let a = minorant_multi_zero(&m, &s, &[0.0], &p).unwrap();
        let b = minorant_single_zero(&m, &s, 0.0, &p).unwrap();
        assert_eq!(a.pairs(), b.pairs());
        assert_eq!(a.c, b.c);

        let c = WeightExpr::Const { value: 0.3 };
        let r = minorant_multi_zero(&m, &c, &[], &p).unwrap();
        assert_eq!(r.w0, WeightExpr::one());
        assert!((r.c - 0.3).abs() < 1e-15);
        assert!(r.audit_passed);
    }

    #[test]
    fn audit_csv_has_header() {
        let m = unit();
        let c = WeightExpr::Const { value: 2.0 };
        let r = minorant_multi_zero(&m, &c, &[], &MinorantParams::default()).unwrap();
        let mut buf = Vec::new();
        r.write_audit_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("x,log_w,log_cw0,pass"));
        assert_eq!(s.lines().count(), 10_001);
    }
}
