//! Finite unions of closed real intervals and polynomial/rational preimages.

mod poly;

pub use poly::{RationalFunction, RealPolynomial};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bands narrower than this fraction of the hull length are dropped.
pub const WIDTH_FLOOR: f64 = 1e-13;

/// Default number of scan points per hull for root bracketing.
pub const SCAN_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Interval {
    fn from(v: [f64; 2]) -> Self {
        Self { lo: v[0], hi: v[1] }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn rad(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// A compact subset of the real line stored as ordered, disjoint bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct RealCompactSet {
    bands: Vec<Interval>,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    bands: Vec<Interval>,
}

impl TryFrom<RawSet> for RealCompactSet {
    type Error = Error;
    fn try_from(raw: RawSet) -> Result<Self> {
        normalize(&raw.bands)
    }
}

impl From<RealCompactSet> for RawSet {
    fn from(s: RealCompactSet) -> Self {
        RawSet { bands: s.bands }
    }
}

/// Sorts, merges touching or overlapping bands and drops sub-floor slivers.
pub fn normalize(raw: &[Interval]) -> Result<RealCompactSet> {
    if raw.is_empty() {
        return Err(Error::Empty("band list"));
    }
    for b in raw {
        if !b.lo.is_finite() || !b.hi.is_finite() || b.lo > b.hi {
            return Err(Error::InvalidArgument(format!(
                "invalid band [{}, {}]",
                b.lo, b.hi
            )));
        }
    }
    let mut sorted = raw.to_vec();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let hull_lo = sorted[0].lo;
    let hull_hi = sorted.iter().map(|b| b.hi).fold(f64::NEG_INFINITY, f64::max);
    let floor = WIDTH_FLOOR * (hull_hi - hull_lo).max(f64::MIN_POSITIVE);

    let mut merged: Vec<Interval> = Vec::with_capacity(sorted.len());
    for b in sorted {
        match merged.last_mut() {
            Some(last) if b.lo <= last.hi => last.hi = last.hi.max(b.hi),
            _ => merged.push(b),
        }
    }
    merged.retain(|b| b.width() > floor);
    if merged.is_empty() {
        return Err(Error::Degenerate);
    }
    Ok(RealCompactSet { bands: merged })
}

impl RealCompactSet {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        normalize(&[Interval::new(lo, hi)])
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let raw: Vec<Interval> = pairs.iter().map(|&(a, b)| Interval::new(a, b)).collect();
        normalize(&raw)
    }

    pub fn bands(&self) -> &[Interval] {
        &self.bands
    }

    pub fn num_bands(&self) -> usize {
        self.bands.len()
    }

    pub fn num_gaps(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn hull(&self) -> Interval {
        Interval::new(self.bands[0].lo, self.bands.last().unwrap().hi)
    }

    pub fn gaps(&self) -> Vec<Interval> {
        self.bands
            .windows(2)
            .map(|w| Interval::new(w[0].hi, w[1].lo))
            .collect()
    }

    pub fn endpoints(&self) -> Vec<f64> {
        self.bands.iter().flat_map(|b| [b.lo, b.hi]).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.bands.iter().map(Interval::width).sum()
    }

    pub fn band_of(&self, x: f64) -> Option<usize> {
        self.bands.iter().position(|b| b.contains(x))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.band_of(x).is_some()
    }

    /// Distance from `x` to the set.
    pub fn distance(&self, x: f64) -> f64 {
        self.bands
            .iter()
            .map(|b| {
                if x < b.lo {
                    b.lo - x
                } else if x > b.hi {
                    x - b.hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// True when `other` is contained in `self` up to `tol`.
    pub fn contains_set(&self, other: &RealCompactSet, tol: f64) -> bool {
        other.bands.iter().all(|b| {
            self.bands
                .iter()
                .any(|a| a.lo - tol <= b.lo && b.hi <= a.hi + tol)
        })
    }

    /// `n` points spread over the bands in proportion to their lengths.
    pub fn sample_points(&self, n: usize) -> Vec<f64> {
        let total = self.total_length();
        let mut out = Vec::with_capacity(n);
        for b in &self.bands {
            let m = ((n as f64) * b.width() / total).round().max(2.0) as usize;
            for k in 0..m {
                out.push(b.lo + b.width() * k as f64 / (m - 1) as f64);
            }
        }
        out
    }
}

/// Symmetric Hausdorff distance between two band unions.
pub fn hausdorff_distance(a: &RealCompactSet, b: &RealCompactSet) -> f64 {
    one_sided(a, b).max(one_sided(b, a))
}

fn one_sided(a: &RealCompactSet, b: &RealCompactSet) -> f64 {
    let mut candidates = a.endpoints();
    for g in b.gaps() {
        if a.contains(g.mid()) {
            candidates.push(g.mid());
        }
    }
    candidates
        .into_iter()
        .map(|x| b.distance(x))
        .fold(0.0, f64::max)
}

/// `{x : P(x) in target}`.
pub fn polynomial_preimage(p: &RealPolynomial, target: Interval) -> Result<RealCompactSet> {
    if p.degree() == 0 {
        return Err(Error::InvalidArgument("constant polynomial".into()));
    }
    let bound = p.shift(target.lo).root_bound().max(p.shift(target.hi).root_bound());
    let hull = (-1.01 * bound - 1e-12, 1.01 * bound + 1e-12);
    let grid = SCAN_POINTS.max(64 * p.degree());
    level_set(&|x| p.eval(x), target, hull, &[], grid)
}

/// `{x : R(x) Q(x)^2 in target}` with the real poles of `R` removed.
pub fn sublevel_bands(
    r: &RationalFunction,
    q: &RealPolynomial,
    target: Interval,
) -> Result<RealCompactSet> {
    if !r.is_real() {
        return Err(Error::InvalidArgument("rational function must be real".into()));
    }
    let num_deg = r.d0() + 2 * q.degree();
    let den_deg = r.d1();
    if num_deg == 0 && den_deg == 0 {
        return Err(Error::InvalidArgument("R Q^2 is constant".into()));
    }
    let limit = if num_deg > den_deg {
        f64::INFINITY
    } else if num_deg == den_deg {
        r.c * q.leading() * q.leading()
    } else {
        0.0
    };
    if limit.is_finite() && target.contains(limit) {
        return Err(Error::UnboundedPreimage);
    }
    let num = r.numerator()?.mul(&q.mul(q)).scale(r.c);
    let den = r.denominator()?;
    let mut bound: f64 = 0.0;
    for level in [target.lo, target.hi] {
        let g = num.sub(&den.scale(level));
        if let Ok(g) = g {
            bound = bound.max(g.root_bound());
        }
    }
    let real_poles: Vec<f64> = r
        .poles
        .iter()
        .filter(|p| p.im == 0.0)
        .map(|p| p.re)
        .collect();
    for &p in &real_poles {
        bound = bound.max(p.abs());
    }
    let hull = (-1.01 * bound - 1e-12, 1.01 * bound + 1e-12);
    let grid = SCAN_POINTS.max(64 * (num_deg + den_deg));
    let f = |x: f64| {
        let qx = q.eval(x);
        r.eval(x) * qx * qx
    };
    level_set(&f, target, hull, &real_poles, grid)
}

fn level_set(
    f: &dyn Fn(f64) -> f64,
    target: Interval,
    hull: (f64, f64),
    breaks: &[f64],
    grid: usize,
) -> Result<RealCompactSet> {
    let (a, b) = hull;
    let xs: Vec<f64> = (0..grid)
        .map(|k| a + (b - a) * k as f64 / (grid - 1) as f64)
        .collect();
    let mut crit: Vec<f64> = vec![a, b];
    crit.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
    for level in [target.lo, target.hi] {
        let g = |x: f64| f(x) - level;
        let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
        for k in 0..grid - 1 {
            let (u, v) = (vals[k], vals[k + 1]);
            if u == 0.0 {
                crit.push(xs[k]);
            } else if u.is_finite() && v.is_finite() && u * v < 0.0 {
                crit.push(bisect(&g, xs[k], xs[k + 1], u)?);
            }
        }
    }
    crit.sort_by(f64::total_cmp);
    crit.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));

    let scale = 1.0 + target.lo.abs().max(target.hi.abs());
    let tol = 1e-12 * scale;
    let inside = |x: f64| {
        let v = f(x);
        v.is_finite() && v >= target.lo - tol && v <= target.hi + tol
    };
    let mut raw: Vec<Interval> = Vec::new();
    for w in crit.windows(2) {
        let (p, q) = (w[0], w[1]);
        if q <= p {
            continue;
        }
        let h = q - p;
        if inside(p + 0.382 * h) || inside(p + 0.618 * h) {
            if p == a || q == b {
                return Err(Error::UnboundedPreimage);
            }
            match raw.last_mut() {
                Some(last) if last.hi == p => last.hi = q,
                _ => raw.push(Interval::new(p, q)),
            }
        }
    }
    if raw.is_empty() {
        return Err(Error::EmptyPreimage);
    }
    normalize(&raw).map_err(|e| match e {
        Error::Degenerate => Error::EmptyPreimage,
        other => other,
    })
}

fn bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut glo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let gm = g(mid);
        if gm.is_nan() {
            return Err(Error::RootNotConverged(mid));
        }
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Monic-free classical Chebyshev polynomial `T_d` in monomial form.
pub fn chebyshev_t(d: usize) -> RealPolynomial {
    let mut t0 = vec![1.0];
    let mut t1 = vec![0.0, 1.0];
    if d == 0 {
        return RealPolynomial::from_coeffs(t0).unwrap();
    }
    for _ in 1..d {
        let mut t2 = vec![0.0; t1.len() + 1];
        for (k, c) in t1.iter().enumerate() {
            t2[k + 1] += 2.0 * c;
        }
        for (k, c) in t0.iter().enumerate() {
            t2[k] -= c;
        }
        t0 = t1;
        t1 = t2;
    }
    RealPolynomial::from_coeffs(t1).unwrap()
}
