//! Orthogonal polynomials for `w dmu_K` and L2 Widom factors.
//!
//! The measure is discretized band by band in the angle variable
//! `x = mid + rad cos(theta)`, where the equilibrium density is smooth.
//! Each band is cut at the singular points of `w`, and every piece gets a
//! composite Gauss-Legendre rule graded geometrically toward both of its
//! ends. Recurrence coefficients come from a discretized Stieltjes
//! procedure on normalized vectors with full reorthogonalization.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::chebyshev::{weighted_chebyshev, BoundId, BoundReport, BoundStatus};
use crate::chebyshev::bounds::{as_rational, green_sum, Audit};
use crate::error::{Error, Result};
use crate::potential::{angle_abscissa, theta_of, EquilibriumMeasure, IntegrateOpts};
use crate::quadrature::gauss_legendre;
use crate::realsets::{
    hausdorff_distance, sublevel_bands, Interval, RationalFunction, RealCompactSet, RealPolynomial,
};
use crate::weights::{szego_factor, RationalProductParts, WeightExpr};

const GL_ORDER: usize = 16;
const GRADING: f64 = 0.15;
const INITIAL_LEVELS: usize = 14;
const MOMENTS: usize = 8;
const MOMENT_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 8192;

/// Discrete approximation of `w dmu_K`.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    pub weight: WeightExpr,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub total_mass: f64,
    measure: EquilibriumMeasure,
    panels: usize,
    levels: usize,
}

/// Monic recurrence `x P_k = P_{k+1} + alpha_k P_k + beta_k P_{k-1}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecurrenceTable {
    pub alpha: Vec<f64>,
    /// `beta_0` is the total mass.
    pub beta: Vec<f64>,
    /// `log ||P_k||^2 = sum_{j <= k} log beta_j`.
    pub log_norms: Vec<f64>,
}

/// Gauss-Legendre panels on `[ta, tb]`, graded toward both ends.
fn piece_rule(ta: f64, tb: f64, panels: usize, levels: usize, gl: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let h = (tb - ta) / panels as f64;
    let mut edges: Vec<(f64, f64)> = Vec::new();
    // the outermost panel on each side is replaced by a geometric cascade
    let graded = |from: f64, toward: f64, out: &mut Vec<(f64, f64)>| {
        let mut d = toward - from;
        let mut outer = toward;
        for _ in 0..levels {
            let inner = from + d * GRADING;
            out.push((inner.min(outer), inner.max(outer)));
            outer = inner;
            d *= GRADING;
        }
        out.push((from.min(outer), from.max(outer)));
    };
    if panels == 1 {
        let mid = 0.5 * (ta + tb);
        graded(ta, mid, &mut edges);
        graded(tb, mid, &mut edges);
    } else {
        graded(ta, ta + h, &mut edges);
        graded(tb, tb - h, &mut edges);
        for p in 1..panels - 1 {
            edges.push((ta + p as f64 * h, ta + (p + 1) as f64 * h));
        }
    }
    let (gx, gw) = gl;
    let mut out = Vec::with_capacity(edges.len() * gx.len());
    for (a, b) in edges {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        if r <= 0.0 {
            continue;
        }
        for (x, w) in gx.iter().zip(gw) {
            out.push((c + r * x, r * w));
        }
    }
    out
}

fn build(
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    panels: usize,
    levels: usize,
) -> (Vec<f64>, Vec<f64>) {
    let gl = gauss_legendre(GL_ORDER);
    let sing = w.singular_points();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for &b in m.set().bands() {
        let mut cuts: Vec<f64> = vec![0.0, PI];
        cuts.extend(
            sing.iter()
                .filter(|&&s| s > b.lo && s < b.hi)
                .map(|&s| theta_of(b, s)),
        );
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let per_piece = (panels / (cuts.len() - 1)).max(1);
        for c in cuts.windows(2) {
            for (t, wt) in piece_rule(c[0], c[1], per_piece, levels, &gl) {
                let a = angle_abscissa(b, t);
                let v = wt * m.angle_density(b, a.x) * w.log_at(&a).exp();
                if v > 0.0 && v.is_finite() {
                    nodes.push(a.x);
                    weights.push(v);
                }
            }
        }
    }
    (nodes, weights)
}

fn moments(hull: Interval, nodes: &[f64], weights: &[f64]) -> [f64; MOMENTS] {
    let mut out = [0.0; MOMENTS];
    for (&x, &w) in nodes.iter().zip(weights) {
        let u = (x - hull.mid()) / hull.rad();
        let (mut t0, mut t1) = (1.0, u);
        out[0] += w;
        out[1] += w * u;
        for o in out.iter_mut().skip(2) {
            let t2 = 2.0 * u * t1 - t0;
            *o += w * t2;
            t0 = t1;
            t1 = t2;
        }
    }
    out
}

/// Discretizes `w dmu_K` with at least `nodes_per_band` nodes in each band,
/// doubling until the first Chebyshev moments are stable.
pub fn discretize(
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    nodes_per_band: usize,
) -> Result<SpectralMeasure> {
    let hull = m.set().hull();
    let mut panels = nodes_per_band.div_ceil(GL_ORDER).max(2);
    let mut levels = INITIAL_LEVELS;
    let (mut nodes, mut weights) = build(m, w, panels, levels);
    let mut prev = moments(hull, &nodes, &weights);
    loop {
        if panels > MAX_PANELS {
            return Err(Error::MomentsNotConverged);
        }
        let (n2, w2) = build(m, w, 2 * panels, levels + 6);
        let cur = moments(hull, &n2, &w2);
        let scale = cur[0].abs();
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument("weight vanishes on the set".into()));
        }
        let stable = prev
            .iter()
            .zip(&cur)
            .all(|(a, b)| (a - b).abs() <= MOMENT_TOL * scale);
        panels *= 2;
        levels += 6;
        nodes = n2;
        weights = w2;
        if stable {
            break;
        }
        prev = cur;
    }
    let total_mass = weights.iter().sum();
    Ok(SpectralMeasure {
        weight: w.clone(),
        nodes,
        weights,
        total_mass,
        measure: m.clone(),
        panels,
        levels,
    })
}

impl SpectralMeasure {
    pub fn set(&self) -> &RealCompactSet {
        self.measure.set()
    }

    pub fn equilibrium(&self) -> &EquilibriumMeasure {
        &self.measure
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same measure on twice as many panels.
    pub fn refined(&self) -> Self {
        let (panels, levels) = (2 * self.panels, self.levels + 6);
        let (nodes, weights) = build(&self.measure, &self.weight, panels, levels);
        Self {
            weight: self.weight.clone(),
            total_mass: weights.iter().sum(),
            nodes,
            weights,
            measure: self.measure.clone(),
            panels,
            levels,
        }
    }

    /// `int f w dmu_K` by the discrete rule.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn lanczos(sm: &SpectralMeasure, n: usize) -> std::result::Result<RecurrenceTable, (usize, f64)> {
    let len = sm.nodes.len();
    let beta0 = sm.total_mass;
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    q.push(sm.weights.iter().map(|w| (w / beta0).sqrt()).collect());
    let mut alpha = Vec::with_capacity(n + 1);
    let mut beta = vec![beta0];
    for k in 0..=n {
        let qk = &q[k];
        let mut r: Vec<f64> = (0..len).map(|i| sm.nodes[i] * qk[i]).collect();
        if k > 0 {
            let sb = beta[k].sqrt();
            for (ri, qi) in r.iter_mut().zip(&q[k - 1]) {
                *ri -= sb * qi;
            }
        }
        let a: f64 = r.iter().zip(qk).map(|(x, y)| x * y).sum();
        alpha.push(a);
        if k == n {
            break;
        }
        for (ri, qi) in r.iter_mut().zip(qk) {
            *ri -= a * qi;
        }
        // two passes of classical Gram-Schmidt against every earlier vector
        for _ in 0..2 {
            for qj in &q {
                let c: f64 = r.iter().zip(qj).map(|(x, y)| x * y).sum();
                for (ri, qi) in r.iter_mut().zip(qj) {
                    *ri -= c * qi;
                }
            }
        }
        let b2: f64 = r.iter().map(|x| x * x).sum();
        let scale = sm.set().hull().rad().powi(2);
        if !(b2 > 1e-26 * scale) {
            return Err((k + 1, b2));
        }
        let b = b2.sqrt();
        beta.push(b2);
        q.push(r.into_iter().map(|x| x / b).collect());
    }
    let mut log_norms = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    for b in &beta {
        acc += b.ln();
        log_norms.push(acc);
    }
    Ok(RecurrenceTable {
        alpha,
        beta,
        log_norms,
    })
}

/// Recurrence coefficients `alpha_k, beta_k` for `k <= n`.
///
/// A coarse measure is refined until it has at least `4(n + 1)` nodes; a
/// vanishing `beta_k` triggers one more refinement before failing.
pub fn stieltjes(sm: &SpectralMeasure, n: usize) -> Result<RecurrenceTable> {
    if sm.len() < 4 * (n + 1) {
        if sm.panels > MAX_PANELS {
            return Err(Error::MomentsNotConverged);
        }
        return stieltjes(&sm.refined(), n);
    }
    match lanczos(sm, n) {
        Ok(t) => Ok(t),
        Err(_) => lanczos(&sm.refined(), n)
            .map_err(|(index, value)| Error::NonPositiveBeta { index, value }),
    }
}

impl RecurrenceTable {
    pub fn degree(&self) -> usize {
        self.alpha.len() - 1
    }

    /// Monic `P_k(x)` by the three-term recurrence.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        let (mut p0, mut p1) = (0.0, 1.0);
        for j in 0..k {
            let b = if j == 0 { 0.0 } else { self.beta[j] };
            let p2 = (x - self.alpha[j]) * p1 - b * p0;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    /// Monic `P_k` in the power basis; meant for small `k`.
    pub fn polynomial(&self, k: usize) -> RealPolynomial {
        let mut p0: Vec<f64> = vec![];
        let mut p1 = vec![1.0];
        for j in 0..k {
            let mut p2 = vec![0.0; j + 2];
            for (i, c) in p1.iter().enumerate() {
                p2[i + 1] += c;
                p2[i] -= self.alpha[j] * c;
            }
            if j > 0 {
                for (i, c) in p0.iter().enumerate() {
                    p2[i] -= self.beta[j] * c;
                }
            }
            p0 = std::mem::replace(&mut p1, p2);
        }
        RealPolynomial::from_coeffs(p1).expect("monic")
    }

    /// `log [W_{2,n}]^2`.
    pub fn log_widom_2_sq(&self, n: usize, log_cap: f64) -> f64 {
        self.log_norms[n] - 2.0 * n as f64 * log_cap
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(e.to_string());
        wtr.write_record(["k", "alpha", "beta", "log_norm"]).map_err(io)?;
        for k in 0..self.alpha.len() {
            let beta = self.beta.get(k).copied().unwrap_or(f64::NAN);
            let ln = self.log_norms.get(k).copied().unwrap_or(f64::NAN);
            wtr.write_record([
                k.to_string(),
                format!("{:.16e}", self.alpha[k]),
                format!("{:.16e}", beta),
                format!("{:.16e}", ln),
            ])
            .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(())
    }
}

fn nodes_for(n: usize) -> usize {
    (8 * n).max(512)
}

/// `[W_{2,n}(K, w)]^2`.
pub fn widom_2(m: &EquilibriumMeasure, w: &WeightExpr, n: usize) -> Result<f64> {
    let sm = discretize(m, w, nodes_for(n))?;
    let t = stieltjes(&sm, n)?;
    Ok(t.log_widom_2_sq(n, m.log_capacity()).exp())
}

/// Whether every truncation `|c P/Q| prod_{j<=k} |(x - a_j)/(x - b_j)|^{r_j}`
/// along a subsequence of `k` is itself a rational function on the set.
/// A modulus with a sign change on the set is not, and the L2 bounds can
/// fail for it (`|x|` on `[-1, 1]` at `n = 2`).
fn truncations_rational(p: &RationalProductParts, k: &RealCompactSet) -> bool {
    let finite = RationalFunction::new(p.c, p.zeros.clone(), p.poles.clone())
        .ok()
        .and_then(|r| as_rational(&WeightExpr::AbsRational { r }, k));
    if finite.is_none() {
        return false;
    }
    let Some(pp) = &p.pairs else {
        return true;
    };
    if pp.tail.is_some() {
        return false;
    }
    let mut j = 0;
    while j < pp.len() {
        if pp.r[j] % 2 == 0 {
            j += 1;
        } else if j + 1 < pp.len()
            && pp.a[j + 1] == pp.a[j]
            && pp.b[j + 1] == pp.b[j].conj()
            && pp.r[j + 1] == pp.r[j]
        {
            j += 2;
        } else {
            return false;
        }
    }
    true
}

/// L2 lower bounds for `[W_{2,n}]^2 = value`.
pub fn l2_bounds(
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    n: usize,
    value: f64,
    s: f64,
) -> Result<Vec<BoundReport>> {
    use BoundId::*;
    use BoundStatus::*;
    let k = m.set();
    let mut a = Audit {
        n,
        lhs: (value, value),
        out: Vec::new(),
    };
    let nf = n as f64;
    let mut double_guaranteed = false;
    let lb1 = |g: f64| 2.0 * s / (1.0 + (1.0 - (-2.0 * g).exp()).max(0.0).sqrt());

    a.push(L2SzegoUniversal, Guaranteed, "holds for every weight", s);

    if let WeightExpr::Const { value } = w {
        a.push(L2RealUnweighted, Guaranteed, "constant weight on a real set", 2.0 * value);
        double_guaranteed = true;
    } else {
        a.skip(L2RealUnweighted, "weight is not constant");
    }

    let product = w
        .rational_product_parts(k)
        .filter(|p| p.pairs.as_ref().is_none_or(|pp| pp.a.iter().all(|&x| k.contains(x))))
        .filter(|p| truncations_rational(p, k));
    if let Some(r) = as_rational(w, k) {
        if nf > r.decay_order() as f64 / 2.0 {
            let g = green_sum(m, &r.zeros)?;
            a.push(L2RationalGreen, Guaranteed, "weight is a rational function bounded on the set", lb1(g));
            if r.zeros.iter().all(|z| z.im == 0.0 && k.contains(z.re)) {
                a.push(L2RationalInSet, Guaranteed, "zeros of the rational weight lie in the set", 2.0 * s);
                double_guaranteed = true;
            } else {
                a.skip(L2RationalInSet, "rational weight has zeros off the set");
            }
        } else {
            a.skip(L2RationalGreen, "degree too small");
            a.skip(L2RationalInSet, "degree too small");
        }
    } else if let Some(p) = product {
        if (n as i64) > p.d1() as i64 - p.d0() as i64 {
            let g = green_sum(m, &p.zeros)?;
            a.push(L2RationalGreen, Guaranteed, "rational product weight", lb1(g));
            if p.zeros_in(k) {
                a.push(L2RationalInSet, Guaranteed, "rational product weight with zeros in the set", 2.0 * s);
                double_guaranteed = true;
            } else {
                a.skip(L2RationalInSet, "polynomial factor has zeros off the set");
            }
        } else {
            a.skip(L2RationalGreen, "degree too small");
            a.skip(L2RationalInSet, "degree too small");
        }
    } else {
        let why = "weight is not rational on the set, nor a limit of rational truncations";
        a.skip(L2RationalGreen, why);
        a.skip(L2RationalInSet, why);
    }

    let (status, why) = if double_guaranteed {
        (Guaranteed, "implied by a guaranteed bound above")
    } else {
        (Informational, "no theorem covers this weight")
    };
    a.push(L2DoubleSzego, status, why, 2.0 * s);
    Ok(a.out)
}

/// Computes `[W_{2,n}]^2` and evaluates every L2 bound.
pub fn l2_bound_audit(m: &EquilibriumMeasure, w: &WeightExpr, n: usize) -> Result<Vec<BoundReport>> {
    let v = widom_2(m, w, n)?;
    let s = szego_factor(m, w, 1e-12)?.value;
    l2_bounds(m, w, n, v, s)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitRow {
    pub n: usize,
    pub w2_sq: f64,
    pub two_s: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitTable {
    pub rows: Vec<LimitRow>,
    pub decreasing: bool,
}

/// `[W_{2,n}]^2` against `2S` along `ns`, from a single recurrence.
pub fn szego_limit_check(m: &EquilibriumMeasure, w: &WeightExpr, ns: &[usize]) -> Result<LimitTable> {
    let top = ns.iter().copied().max().unwrap_or(0);
    let sm = discretize(m, w, nodes_for(top))?;
    let t = stieltjes(&sm, top)?;
    let two_s = 2.0 * szego_factor(m, w, 1e-12)?.value;
    let rows: Vec<LimitRow> = ns
        .iter()
        .map(|&n| {
            let v = t.log_widom_2_sq(n, m.log_capacity()).exp();
            LimitRow {
                n,
                w2_sq: v,
                two_s,
                gap: (v - two_s).abs(),
            }
        })
        .collect();
    let decreasing = rows.windows(2).all(|p| p[1].gap < p[0].gap);
    Ok(LimitTable { rows, decreasing })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct L2EqualityReport {
    pub n: usize,
    /// `int w Q_n^2 dmu_K` by adaptive quadrature.
    pub integral: f64,
    /// Hausdorff distance between `(R Q_n^2)^{-1}([0, 1])` and the set.
    pub distance: f64,
    /// `sup_K |P_n - T_{n, sqrt w}| / sup_K |T_{n, sqrt w}|`.
    pub chebyshev_gap: f64,
    pub w2_sq: f64,
    pub two_s: f64,
    pub holds: bool,
}

/// Tests whether `K = (w Q_n^2)^{-1}([0,1])` for `w = R` and
/// `Q_n = P_n / sqrt(2 ||P_n||^2)`, and whether `P_n = T_{n, sqrt w}`.
pub fn l2_equality_case_check(
    m: &EquilibriumMeasure,
    r: &RationalFunction,
    n: usize,
) -> Result<L2EqualityReport> {
    let w = WeightExpr::AbsRational { r: r.clone() };
    let sm = discretize(m, &w, nodes_for(n))?;
    let t = stieltjes(&sm, n)?;
    let p = t.polynomial(n);
    let q = p.scale((-0.5 * (2f64.ln() + t.log_norms[n])).exp());
    let singular: Vec<f64> = w.singular_points();
    let integral = m.integrate(
        |a| w.log_at(&a).exp() * q.eval(a.x).powi(2),
        &IntegrateOpts::singular(singular).with_tol(1e-13),
    )?;
    let pre = sublevel_bands(r, &q, Interval::new(0.0, 1.0))?;
    let distance = hausdorff_distance(&pre, m.set());

    let cheb = weighted_chebyshev(m, &WeightExpr::SqrtRational { r: r.clone() }, n, 1e-12)?;
    let samples = m.set().sample_points(4000);
    let (mut diff, mut size) = (0.0f64, 0.0f64);
    for &x in &samples {
        let tv = cheb.eval(x);
        diff = diff.max((p.eval(x) - tv).abs());
        size = size.max(tv.abs());
    }
    let chebyshev_gap = diff / size;
    let w2_sq = t.log_widom_2_sq(n, m.log_capacity()).exp();
    let two_s = 2.0 * szego_factor(m, &w, 1e-12)?.value;
    Ok(L2EqualityReport {
        n,
        integral,
        distance,
        chebyshev_gap,
        w2_sq,
        two_s,
        holds: distance < 1e-6 && chebyshev_gap < 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::ProductPairs;
    use num_complex::Complex64;

    fn unit() -> EquilibriumMeasure {
        EquilibriumMeasure::new(&RealCompactSet::interval(-1.0, 1.0).unwrap()).unwrap()
    }

    fn one_minus_x2() -> RationalFunction {
        RationalFunction::real_zeros_poles(-1.0, &[-1.0, 1.0], &[]).unwrap()
    }

    #[test]
    fn arcsine_recurrence() {
        let m = unit();
        let sm = discretize(&m, &WeightExpr::one(), 512).unwrap();
        assert!((sm.total_mass - 1.0).abs() < 1e-13);
        let t = stieltjes(&sm, 30).unwrap();
        assert!((t.beta[0] - 1.0).abs() < 1e-12);
        assert!((t.beta[1] - 0.5).abs() < 1e-12);
        for k in 2..=30 {
            assert!((t.beta[k] - 0.25).abs() < 1e-12, "{k} {}", t.beta[k]);
        }
        assert!(t.alpha.iter().all(|a| a.abs() < 1e-12));
        for n in 1..=30 {
            assert!((t.log_widom_2_sq(n, m.log_capacity()).exp() - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn second_kind_recurrence() {
        let m = unit();
        let w = WeightExpr::AbsRational { r: one_minus_x2() };
        let sm = discretize(&m, &w, 512).unwrap();
        assert!((sm.total_mass - 0.5).abs() < 1e-13);
        let t = stieltjes(&sm, 20).unwrap();
        for k in 1..=20 {
            assert!((t.beta[k] - 0.25).abs() < 1e-12);
            assert!((t.log_widom_2_sq(k, m.log_capacity()).exp() - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn modulus_with_interior_zero_is_below_double_szego() {
        // moments of |x| dmu give 16 * 8/(45 pi) at n = 2, while 2S = 1
        let m = unit();
        let w = WeightExpr::AbsRational {
            r: RationalFunction::real_zeros_poles(1.0, &[0.0], &[]).unwrap(),
        };
        let v = widom_2(&m, &w, 2).unwrap();
        assert!((v - 128.0 / (45.0 * PI)).abs() < 1e-10, "{v}");
        let reps = l2_bound_audit(&m, &w, 2).unwrap();
        for r in reps.iter().filter(|r| r.guaranteed()) {
            assert!(r.margin.unwrap() >= -1e-12, "{r:?}");
        }
        let double = reps.iter().find(|r| r.bound_id == BoundId::L2DoubleSzego).unwrap();
        assert_eq!(double.status, BoundStatus::Informational);
        assert!(double.margin.unwrap() < 0.0);
    }

    #[test]
    fn squared_product_factors_keep_the_l2_guarantee() {
        let m = unit();
        let a = vec![0.3, 0.3, -0.5, -0.5];
        let b = vec![
            Complex64::new(0.3, 0.4),
            Complex64::new(0.3, -0.4),
            Complex64::new(-0.5, 0.2),
            Complex64::new(-0.5, -0.2),
        ];
        let paired = ProductPairs::new(a.clone(), b.clone(), vec![1; 4]).unwrap();
        let w = WeightExpr::InfiniteProduct { pairs: paired };
        let reps = l2_bound_audit(&m, &w, 3).unwrap();
        let lb2 = reps.iter().find(|r| r.bound_id == BoundId::L2RationalInSet).unwrap();
        assert!(lb2.guaranteed() && lb2.margin.unwrap() >= -1e-12, "{lb2:?}");

        let single = ProductPairs::new(vec![0.3], vec![Complex64::new(0.3, 0.4)], vec![1]).unwrap();
        let w = WeightExpr::InfiniteProduct { pairs: single };
        let reps = l2_bound_audit(&m, &w, 3).unwrap();
        let lb2 = reps.iter().find(|r| r.bound_id == BoundId::L2RationalInSet).unwrap();
        assert!(!lb2.guaranteed());
    }

    #[test]
    fn legendre_norm() {
        let m = unit();
        let w = WeightExpr::jacobi(0.5, 0.5, m.set());
        let v = widom_2(&m, &w, 1).unwrap();
        assert!((v - 8.0 / (3.0 * PI)).abs() < 1e-10, "{v}");
    }

    #[test]
    fn nodes_split_per_band() {
        let k = RealCompactSet::from_pairs(&[(-1.0, -0.5), (0.5, 1.0)]).unwrap();
        let m = EquilibriumMeasure::new(&k).unwrap();
        let sm = discretize(&m, &WeightExpr::one(), 512).unwrap();
        let left = sm.nodes.iter().filter(|&&x| x < 0.0).count();
        assert_eq!(2 * left, sm.len());
        assert!(sm.nodes.iter().all(|&x| k.contains(x)));
        assert!((sm.total_mass - 1.0).abs() < 1e-12);
        let t = stieltjes(&sm, 11).unwrap();
        assert!(t.alpha.iter().all(|a| a.abs() < 1e-10));
    }

    #[test]
    fn orthogonality_and_norms_by_adaptive_quadrature() {
        let m = unit();
        let w = WeightExpr::abs_linear(0.3);
        let sm = discretize(&m, &w, 512).unwrap();
        let t = stieltjes(&sm, 10).unwrap();
        let opts = IntegrateOpts::singular(vec![0.3]).with_tol(1e-14);
        for i in 0..=10 {
            let nii = m
                .integrate(|a| w.log_at(&a).exp() * t.eval(i, a.x).powi(2), &opts)
                .unwrap();
            assert!((nii.ln() - t.log_norms[i]).abs() < 1e-8);
            for j in 0..i {
                let nij = m
                    .integrate(|a| w.log_at(&a).exp() * t.eval(i, a.x) * t.eval(j, a.x), &opts)
                    .unwrap();
                let scale = (0.5 * (t.log_norms[i] + t.log_norms[j])).exp();
                assert!(nij.abs() <= 1e-8 * scale, "{i} {j} {nij}");
            }
        }
    }

    #[test]
    fn audit_equality_family() {
        let m = unit();
        let w = WeightExpr::AbsRational { r: one_minus_x2() };
        let r = l2_bound_audit(&m, &w, 2).unwrap();
        let b = r.iter().find(|b| b.bound_id == BoundId::L2RationalInSet).unwrap();
        assert!(b.guaranteed());
        assert!(b.margin.unwrap().abs() < 1e-10);
        let r = l2_bound_audit(&m, &WeightExpr::one(), 4).unwrap();
        let b = r.iter().find(|b| b.bound_id == BoundId::L2DoubleSzego).unwrap();
        assert!(b.guaranteed() && b.margin.unwrap().abs() < 1e-10);
    }

    #[test]
    fn zeros_off_the_set_weaken_the_bound() {
        let m = unit();
        let r = RationalFunction::real_zeros_poles(1.0, &[2.0, 2.0], &[]).unwrap();
        let w = WeightExpr::AbsRational { r };
        let out = l2_bound_audit(&m, &w, 3).unwrap();
        let b = out.iter().find(|b| b.bound_id == BoundId::L2RationalGreen).unwrap();
        let two_s = out.iter().find(|b| b.bound_id == BoundId::L2DoubleSzego).unwrap().rhs.unwrap();
        assert!(b.guaranteed());
        assert!(b.rhs.unwrap() < two_s);
        assert!(b.margin.unwrap() >= 0.0);
    }

    #[test]
    fn equality_cases() {
        let m = unit();
        let rep = l2_equality_case_check(&m, &one_minus_x2(), 2).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert!((rep.integral - 0.5).abs() < 1e-8);
        let one = RationalFunction::new(1.0, vec![], vec![]).unwrap();
        assert!(l2_equality_case_check(&m, &one, 3).unwrap().holds);

        let k = RealCompactSet::from_pairs(&[(-1.0, -0.5), (0.5, 1.0)]).unwrap();
        let m2 = EquilibriumMeasure::new(&k).unwrap();
        let rep = l2_equality_case_check(&m2, &one, 3).unwrap();
        assert!(!rep.holds && rep.distance > 1e-3);
        assert!(rep.w2_sq > rep.two_s + 1e-3);
    }

    #[test]
    fn limit_tables() {
        let m = unit();
        let t = szego_limit_check(&m, &WeightExpr::one(), &[1, 2, 4]).unwrap();
        assert!(t.rows.iter().all(|r| (r.w2_sq - 2.0).abs() < 1e-10));
        let w = WeightExpr::jacobi(0.5, 0.5, m.set());
        let t = szego_limit_check(&m, &w, &[4, 8, 16, 32, 64]).unwrap();
        assert!(t.decreasing, "{:?}", t.rows);
        assert!((t.rows[0].two_s - 1.0).abs() < 1e-10);
    }
}
