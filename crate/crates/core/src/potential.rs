//! Equilibrium measures, capacities and Green functions of band sets.
//!
//! On a set with `g` gaps the equilibrium density is `|q(x)| / (pi sqrt|W(x)|)`
//! where `W` is the product of `(x - e)` over all band endpoints and `q` is the
//! monic polynomial with one zero per gap fixed by
//! `int_gap q / sqrt|W| = 0`. Every band and gap integral is taken in the
//! angle variable `x = mid + rad cos(theta)`, which removes the inverse square
//! root at the endpoints.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{chebyshev_angles, gauss_legendre, TanhSinh};
use crate::realsets::{Interval, RationalFunction, RealCompactSet, RealPolynomial};

const FROSTMAN_LIMIT: f64 = 1e-8;
const CONDITION_LIMIT: f64 = 1e14;
/// Above this the Chebyshev-basis solve is not used as a Newton start.
const CHEBYSHEV_TRUST: f64 = 1e8;
const NEWTON_ACCEPT: f64 = 1e-10;
const MAX_NODES: usize = 1 << 15;
const INTERNAL_TOL: f64 = 1e-13;

/// Options for [`EquilibriumMeasure::integrate`].
#[derive(Debug, Clone)]
pub struct IntegrateOpts {
    /// Points where the integrand is singular or non-smooth.
    pub singular_points: Vec<f64>,
    pub abs_tol: f64,
}

impl Default for IntegrateOpts {
    fn default() -> Self {
        Self {
            singular_points: Vec::new(),
            abs_tol: 1e-10,
        }
    }
}

impl IntegrateOpts {
    pub fn singular(points: Vec<f64>) -> Self {
        Self {
            singular_points: points,
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Integration abscissa `x = anchor + offset`, where the offset from the
/// nearest split point or band endpoint is computed without cancellation.
#[derive(Debug, Clone, Copy)]
pub struct Abscissa {
    pub x: f64,
    pub anchor: f64,
    pub offset: f64,
}

impl Abscissa {
    /// `|x - s|`, exact to full relative precision when `s` is the anchor.
    pub fn dist(&self, s: f64) -> f64 {
        if s == self.anchor {
            self.offset.abs()
        } else {
            (self.x - s).abs()
        }
    }

    pub fn dist_complex(&self, z: Complex64) -> f64 {
        if z.re == self.anchor {
            self.offset.hypot(z.im)
        } else {
            (self.x - z.re).hypot(z.im)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    pub z: Complex64,
    pub value: f64,
}

#[derive(Debug, Clone)]
struct BandRule {
    band: Interval,
    nodes: usize,
}

/// Equilibrium measure of a band set together with its capacity.
#[derive(Debug, Clone)]
pub struct EquilibriumMeasure {
    set: RealCompactSet,
    gap_roots: Vec<f64>,
    gap_poly: RealPolynomial,
    rules: Vec<BandRule>,
    log_capacity: f64,
    condition: f64,
    frostman_spread: f64,
}

fn log_abs_prod(x: f64, pts: impl Iterator<Item = f64>) -> f64 {
    pts.map(|e| (x - e).abs().ln()).sum()
}

fn others(endpoints: &[f64], skip: (f64, f64)) -> Vec<f64> {
    endpoints
        .iter()
        .copied()
        .filter(|&e| e != skip.0 && e != skip.1)
        .collect()
}

pub(crate) fn angle_abscissa(iv: Interval, theta: f64) -> Abscissa {
    let r = iv.rad();
    let x = iv.mid() + r * theta.cos();
    if theta < 0.5 * PI {
        let s = (0.5 * theta).sin();
        Abscissa {
            x,
            anchor: iv.hi,
            offset: -2.0 * r * s * s,
        }
    } else {
        let c = (0.5 * theta).cos();
        Abscissa {
            x,
            anchor: iv.lo,
            offset: 2.0 * r * c * c,
        }
    }
}

/// Inverse of `x = mid + rad cos(theta)`, accurate near both endpoints.
pub(crate) fn theta_of(b: Interval, x: f64) -> f64 {
    if x >= b.hi {
        0.0
    } else if x <= b.lo {
        PI
    } else if x >= b.mid() {
        2.0 * ((b.hi - x) / b.width()).sqrt().asin()
    } else {
        PI - 2.0 * ((x - b.lo) / b.width()).sqrt().asin()
    }
}

/// Midpoint rule in theta for a smooth function on an interval, doubling
/// until two successive values agree.
fn converged_nodes(mut f: impl FnMut(f64) -> f64, start: usize) -> usize {
    let mut n = start;
    let mut prev = chebyshev_angles(n).map(&mut f).sum::<f64>() * PI / n as f64;
    while n < MAX_NODES {
        n *= 2;
        let cur = chebyshev_angles(n).map(&mut f).sum::<f64>() * PI / n as f64;
        if (cur - prev).abs() <= 4e-15 * cur.abs().max(f64::MIN_POSITIVE) {
            return n;
        }
        prev = cur;
    }
    n
}

impl EquilibriumMeasure {
    pub fn new(set: &RealCompactSet) -> Result<Self> {
        let bands = set.bands().to_vec();
        let gaps = set.gaps();
        let endpoints = set.endpoints();
        let g = gaps.len();

        // Node counts for the gap integrals.
        let gap_data: Vec<(Interval, Vec<f64>, usize)> = gaps
            .iter()
            .map(|&gap| {
                let oth = others(&endpoints, (gap.lo, gap.hi));
                let n = converged_nodes(
                    |t| {
                        let x = gap.mid() + gap.rad() * t.cos();
                        (-0.5 * log_abs_prod(x, oth.iter().copied())).exp()
                    },
                    128,
                );
                (gap, oth, n)
            })
            .collect();

        let (gap_roots, condition) = if g == 0 {
            (Vec::new(), 1.0)
        } else {
            let (init, cond) = match chebyshev_solve(set, &gap_data) {
                Ok(v) => v,
                Err(Error::SingularSystem { condition }) => (gaps.iter().map(|g| g.mid()).collect(), condition),
                Err(e) => return Err(e),
            };
            let direct = if cond < CHEBYSHEV_TRUST {
                newton_polish(&gap_data, init.clone())
            } else {
                None
            };
            let polished = direct.or_else(|| {
                let z = mean_sweeps(&gap_data, gaps.iter().map(|g| g.mid()).collect());
                newton_polish(&gap_data, z)
            });
            match polished {
                Some((z, jac_cond)) => (z, jac_cond),
                None if cond < CONDITION_LIMIT => (init, cond),
                None => return Err(Error::SingularSystem { condition: cond }),
            }
        };

        let gap_poly = RealPolynomial::from_roots(
            1.0,
            gap_roots.iter().map(|&z| Complex64::new(z, 0.0)).collect(),
        )?;

        let mut m = Self {
            set: set.clone(),
            gap_roots,
            gap_poly,
            rules: Vec::new(),
            log_capacity: 0.0,
            condition,
            frostman_spread: 0.0,
        };
        m.rules = bands
            .iter()
            .map(|&b| {
                let nodes = converged_nodes(|t| m.angle_density(b, b.mid() + b.rad() * t.cos()), 256);
                BandRule { band: b, nodes }
            })
            .collect();

        // Frostman: the log potential is constant on the set.
        let widest = *bands
            .iter()
            .max_by(|a, b| a.width().total_cmp(&b.width()))
            .unwrap();
        let probes = [
            widest.mid(),
            widest.lo + 0.3 * widest.width(),
            if bands.len() > 1 {
                bands[0].lo + 0.7 * bands[0].width()
            } else {
                widest.lo + 0.85 * widest.width()
            },
        ];
        let mut values = Vec::with_capacity(3);
        for &x0 in &probes {
            let v = m.integrate(
                |a| a.dist(x0).ln(),
                &IntegrateOpts::singular(vec![x0]).with_tol(INTERNAL_TOL),
            )?;
            values.push(v);
        }
        let spread = values.iter().fold(f64::MIN, |a, &b| a.max(b))
            - values.iter().fold(f64::MAX, |a, &b| a.min(b));
        if spread > FROSTMAN_LIMIT {
            return Err(Error::FrostmanMismatch {
                spread,
                limit: FROSTMAN_LIMIT,
            });
        }
        m.log_capacity = values[0];
        m.frostman_spread = spread;
        Ok(m)
    }

    pub fn set(&self) -> &RealCompactSet {
        &self.set
    }

    pub fn gap_poly(&self) -> &RealPolynomial {
        &self.gap_poly
    }

    pub fn gap_roots(&self) -> &[f64] {
        &self.gap_roots
    }

    pub fn log_capacity(&self) -> f64 {
        self.log_capacity
    }

    pub fn capacity(&self) -> f64 {
        self.log_capacity.exp()
    }

    /// Condition estimate of the Chebyshev-basis gap system.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn frostman_spread(&self) -> f64 {
        self.frostman_spread
    }

    /// Density of the measure with respect to `d theta` on band `b`.
    pub(crate) fn angle_density(&self, b: Interval, x: f64) -> f64 {
        let mut s = log_abs_prod(x, self.gap_roots.iter().copied());
        for band in self.set.bands() {
            if *band != b {
                s -= 0.5 * ((x - band.lo).abs().ln() + (x - band.hi).abs().ln());
            }
        }
        s.exp() / PI
    }

    /// Density with respect to `dx`; zero off the set.
    pub fn density(&self, x: f64) -> f64 {
        match self.set.band_of(x) {
            Some(k) => {
                let b = self.set.bands()[k];
                let s = ((x - b.lo) * (b.hi - x)).sqrt();
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    self.angle_density(b, x) / s
                }
            }
            None => 0.0,
        }
    }

    /// `int q / sqrt|W|` over each gap, for checking the defining conditions.
    pub fn gap_residuals(&self) -> Vec<f64> {
        let endpoints = self.set.endpoints();
        self.set
            .gaps()
            .iter()
            .map(|&gap| {
                let oth = others(&endpoints, (gap.lo, gap.hi));
                let n = 4096;
                chebyshev_angles(n)
                    .map(|t| {
                        let x = gap.mid() + gap.rad() * t.cos();
                        self.gap_poly.eval(x) * (-0.5 * log_abs_prod(x, oth.iter().copied())).exp()
                    })
                    .sum::<f64>()
                    * PI
                    / n as f64
            })
            .collect()
    }

    /// `int f dmu` with splitting at the declared singular points.
    pub fn integrate<F>(&self, f: F, opts: &IntegrateOpts) -> Result<f64>
    where
        F: Fn(Abscissa) -> f64,
    {
        let mut total = 0.0;
        for rule in &self.rules {
            total += self.integrate_band(rule, &f, opts)?;
        }
        Ok(total)
    }

    fn integrate_band<F>(&self, rule: &BandRule, f: &F, opts: &IntegrateOpts) -> Result<f64>
    where
        F: Fn(Abscissa) -> f64,
    {
        let b = rule.band;
        let margin = 0.25 * b.width();
        let near: Vec<f64> = opts
            .singular_points
            .iter()
            .copied()
            .filter(|&s| s >= b.lo - margin && s <= b.hi + margin)
            .collect();
        if near.is_empty() {
            let n = rule.nodes;
            let mut sum = 0.0;
            for t in chebyshev_angles(n) {
                let a = angle_abscissa(b, t);
                let v = f(a);
                if v.is_nan() {
                    return Err(Error::NanIntegrand(a.x));
                }
                sum += v * self.angle_density(b, a.x);
            }
            return Ok(sum * PI / n as f64);
        }

        // Split points in theta, with the exact x value of each.
        let mut splits: Vec<(f64, f64)> = vec![(0.0, b.hi), (PI, b.lo)];
        for s in near {
            if s > b.lo && s < b.hi {
                let th = theta_of(b, s);
                splits.push((th, s));
            }
        }
        splits.sort_by(|p, q| p.0.total_cmp(&q.0));
        splits.dedup_by(|p, q| p.0 == q.0);
        let pieces = (splits.len() - 1) as f64;
        let ts = TanhSinh::with_tol(opts.abs_tol / pieces);
        let r = b.rad();
        let mut total = 0.0;
        for w in splits.windows(2) {
            let ((ta, xa), (tb, xb)) = (w[0], w[1]);
            total += ts.integrate(ta, tb, |node| {
                let (dl, dr) = (node.from_left, node.from_right);
                let x = b.mid() + r * node.t.cos();
                let a = if dl <= dr {
                    Abscissa {
                        x,
                        anchor: xa,
                        offset: -2.0 * r * (ta + 0.5 * dl).sin() * (0.5 * dl).sin(),
                    }
                } else {
                    Abscissa {
                        x,
                        anchor: xb,
                        offset: 2.0 * r * (tb - 0.5 * dr).sin() * (0.5 * dr).sin(),
                    }
                };
                f(a) * self.angle_density(b, x)
            })?;
        }
        Ok(total)
    }

    /// `mu([x1, x2])`.
    pub fn mass(&self, x1: f64, x2: f64) -> f64 {
        let (gx, gw) = gauss_legendre(16);
        let mut total = 0.0;
        for rule in &self.rules {
            let b = rule.band;
            let lo = x1.max(b.lo);
            let hi = x2.min(b.hi);
            if hi <= lo {
                continue;
            }
            let t_hi = theta_of(b, lo);
            let t_lo = theta_of(b, hi);
            let panels = ((rule.nodes as f64 * (t_hi - t_lo) / PI) / 8.0).ceil().max(1.0) as usize;
            let h = 0.5 * (t_hi - t_lo) / panels as f64;
            for p in 0..panels {
                let c = t_lo + (2 * p + 1) as f64 * h;
                for (x, w) in gx.iter().zip(&gw) {
                    let t = c + h * x;
                    total += w * h * self.angle_density(b, b.mid() + b.rad() * t.cos());
                }
            }
        }
        total
    }

    /// `int_{[x1, x2]} f dmu` for an integrand bounded on the range.
    pub fn integrate_range<F>(&self, x1: f64, x2: f64, f: F, abs_tol: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let ts = TanhSinh::with_tol(abs_tol);
        let mut total = 0.0;
        for b in self.set.bands() {
            let lo = x1.max(b.lo);
            let hi = x2.min(b.hi);
            if hi <= lo {
                continue;
            }
            let b = *b;
            total += ts.integrate(theta_of(b, hi), theta_of(b, lo), |node| {
                let x = b.mid() + b.rad() * node.t.cos();
                f(x) * self.angle_density(b, x)
            })?;
        }
        Ok(total)
    }

    pub fn band_masses(&self) -> Vec<f64> {
        self.set.bands().iter().map(|b| self.mass(b.lo, b.hi)).collect()
    }

    /// `int log|z - t| dmu(t)`.
    pub fn log_potential(&self, z: Complex64) -> Result<f64> {
        let opts = IntegrateOpts::singular(vec![z.re]).with_tol(INTERNAL_TOL);
        if z.im == 0.0 {
            self.integrate(|a| a.dist(z.re).ln(), &opts)
        } else {
            self.integrate(|a| a.dist_complex(z).ln(), &opts)
        }
    }

    pub fn green(&self, z: Complex64) -> Result<f64> {
        if z.im == 0.0 && self.set.contains(z.re) {
            return Ok(0.0);
        }
        let v = self.log_potential(z)? - self.log_capacity;
        Ok(v.max(0.0))
    }
}

/// Solves the gap conditions for `q` in the Chebyshev basis of the hull and
/// returns one root per gap plus the condition estimate.
fn chebyshev_solve(
    set: &RealCompactSet,
    gap_data: &[(Interval, Vec<f64>, usize)],
) -> Result<(Vec<f64>, f64)> {
    let g = gap_data.len();
    let hull = set.hull();
    let to_u = |x: f64| (2.0 * x - hull.lo - hull.hi) / hull.width();
    let mut a = DMatrix::<f64>::zeros(g, g);
    let mut rhs = DVector::<f64>::zeros(g);
    for (j, (gap, oth, n)) in gap_data.iter().enumerate() {
        for t in chebyshev_angles(*n) {
            let x = gap.mid() + gap.rad() * t.cos();
            let h = (-0.5 * log_abs_prod(x, oth.iter().copied())).exp();
            let u = to_u(x);
            let tk = chebyshev_values(u, g);
            for k in 0..g {
                a[(j, k)] += tk[k] * h;
            }
            rhs[j] -= tk[g] * h;
        }
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let coef = svd
        .solve(&rhs, smax * 1e-15)
        .map_err(|_| Error::SingularSystem { condition })?;
    let p = |x: f64| {
        let tk = chebyshev_values(to_u(x), g);
        tk[g] + (0..g).map(|k| coef[k] * tk[k]).sum::<f64>()
    };
    let roots = gap_data
        .iter()
        .map(|(gap, _, _)| {
            let (mut lo, mut hi) = (gap.lo, gap.hi);
            let (plo, phi) = (p(lo), p(hi));
            if !(plo * phi < 0.0) {
                return gap.mid();
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (p(mid) < 0.0) == (plo < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    Ok((roots, condition))
}

fn chebyshev_values(u: f64, n: usize) -> Vec<f64> {
    let mut t = vec![1.0; n + 1];
    if n >= 1 {
        t[1] = u;
    }
    for k in 2..=n {
        t[k] = 2.0 * u * t[k - 1] - t[k - 2];
    }
    t
}

/// Gauss-Seidel sweeps on the gap conditions. With the other roots fixed,
/// `z_j` is the mean of `x` over gap `j` against the positive weight
/// `prod_{k != j} |x - z_k| h(x)`, so every iterate stays inside its gap.
fn mean_sweeps(gap_data: &[(Interval, Vec<f64>, usize)], mut z: Vec<f64>) -> Vec<f64> {
    let g = z.len();
    let nodes: Vec<Vec<(f64, f64)>> = gap_data
        .iter()
        .map(|(gap, oth, n)| {
            chebyshev_angles(*n)
                .map(|t| {
                    let x = gap.mid() + gap.rad() * t.cos();
                    (x, -0.5 * log_abs_prod(x, oth.iter().copied()))
                })
                .collect()
        })
        .collect();
    let mut logs = Vec::new();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for j in 0..g {
            let gap = gap_data[j].0;
            logs.clear();
            logs.extend(nodes[j].iter().map(|&(x, base)| {
                base + (0..g).filter(|&k| k != j).map(|k| (x - z[k]).abs().ln()).sum::<f64>()
            }));
            let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let (mut num, mut den) = (0.0, 0.0);
            for (&(x, _), &l) in nodes[j].iter().zip(&logs) {
                let w = (l - top).exp();
                num += w * (x - gap.mid());
                den += w;
            }
            let new = (gap.mid() + num / den).clamp(gap.lo, gap.hi);
            moved = moved.max((new - z[j]).abs() / gap.rad());
            z[j] = new;
        }
        // Newton finishes from here
        if moved < 1e-8 {
            break;
        }
    }
    z
}

/// Newton iteration on the gap conditions with `q` in product form.
/// Returns the roots and the condition number of the row-scaled Jacobian.
fn newton_polish(gap_data: &[(Interval, Vec<f64>, usize)], mut z: Vec<f64>) -> Option<(Vec<f64>, f64)> {
    let g = z.len();
    let mut prev = f64::INFINITY;
    for _ in 0..40 {
        let mut f = DVector::<f64>::zeros(g);
        let mut scale = vec![0.0; g];
        let mut jac = DMatrix::<f64>::zeros(g, g);
        for (j, (gap, oth, n)) in gap_data.iter().enumerate() {
            for t in chebyshev_angles(*n) {
                let x = gap.mid() + gap.rad() * t.cos();
                let base = -0.5 * log_abs_prod(x, oth.iter().copied());
                let logs: Vec<f64> = z.iter().map(|&zl| (x - zl).abs().ln()).collect();
                let sign_all = z.iter().filter(|&&zl| x < zl).count() % 2;
                let total: f64 = logs.iter().sum();
                let v = (base + total).exp();
                let sgn = if sign_all == 0 { 1.0 } else { -1.0 };
                f[j] += sgn * v;
                scale[j] += v;
                for k in 0..g {
                    let wo = (base + total - logs[k]).exp();
                    let sk = if (sign_all == 1) != (x < z[k]) { -1.0 } else { 1.0 };
                    jac[(j, k)] -= sk * wo;
                }
            }
        }
        let res = (0..g)
            .map(|j| (f[j] / scale[j]).abs())
            .fold(0.0, f64::max);
        if !res.is_finite() {
            return None;
        }
        // the residual floor grows with the number of gaps; stop once a
        // step no longer halves it
        if res < 1e-14 || (res < NEWTON_ACCEPT && res > 0.5 * prev) {
            let scaled = DMatrix::from_fn(g, g, |j, k| jac[(j, k)] / scale[j]);
            let sv = scaled.singular_values();
            return Some((z, sv.max() / sv.min()));
        }
        prev = res;
        let step = jac.lu().solve(&(-&f))?;
        let mut lambda = 1.0;
        loop {
            let ok = (0..g).all(|j| {
                let y = z[j] + lambda * step[j];
                let gap = gap_data[j].0;
                y > gap.lo && y < gap.hi
            });
            if ok {
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return None;
            }
        }
        for j in 0..g {
            z[j] += lambda * step[j];
        }
    }
    None
}

/// `equilibrium_measure(K)` as a free function.
pub fn equilibrium_measure(k: &RealCompactSet) -> Result<EquilibriumMeasure> {
    EquilibriumMeasure::new(k)
}

pub fn green(k: &RealCompactSet, z: Complex64) -> Result<GreenValue> {
    let m = EquilibriumMeasure::new(k)?;
    Ok(GreenValue {
        z,
        value: m.green(z)?,
    })
}

/// Green function of `[alpha, beta]` with pole at infinity, in closed form.
pub fn green_interval_closed_form(alpha: f64, beta: f64, z: Complex64) -> f64 {
    let zeta = (2.0 * z - alpha - beta) / (beta - alpha);
    let w = zeta + (zeta - 1.0).sqrt() * (zeta + 1.0).sqrt();
    w.norm().ln().max(0.0)
}

/// Capacity of the preimage of a set of capacity `cap_k` under a degree-`n`
/// polynomial with leading coefficient of modulus `c_abs`.
pub fn capacity_preimage_poly(cap_k: f64, c_abs: f64, n: usize) -> f64 {
    (cap_k / c_abs).powf(1.0 / n as f64)
}

/// Residual of the rational preimage capacity identity
/// `log cap K = log|c| + n log cap L - sum g_L(b_j)`, with `n = d0 - d1`.
pub fn capacity_preimage_rational_check(
    k: &RealCompactSet,
    r: &RationalFunction,
    l: &RealCompactSet,
) -> Result<f64> {
    let n = r.d0() as i64 - r.d1() as i64;
    if n < 1 {
        return Err(Error::InvalidArgument(
            "the rational function needs a pole at infinity".into(),
        ));
    }
    for b in &r.poles {
        if b.im == 0.0 && l.contains(b.re) {
            return Err(Error::PoleInSet(b.re));
        }
    }
    let mk = EquilibriumMeasure::new(k)?;
    let ml = EquilibriumMeasure::new(l)?;
    let mut sum_g = 0.0;
    for &b in &r.poles {
        sum_g += ml.green(b)?;
    }
    Ok((mk.log_capacity() - r.c.abs().ln() - n as f64 * ml.log_capacity() + sum_g).abs())
}

/// `g_K(P(z)) / deg P`, the Green function of `P^{-1}(K)` at `z`.
pub fn green_pullback_poly(k: &EquilibriumMeasure, p: &RealPolynomial, z: Complex64) -> Result<f64> {
    let w = p.eval_complex(z);
    let w = if w.im.abs() <= 1e-300 { Complex64::new(w.re, 0.0) } else { w };
    Ok(k.green(w)? / p.degree() as f64)
}
