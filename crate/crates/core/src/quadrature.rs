//! Quadrature primitives shared by the potential-theory and polynomial modules.
//!
//! Everything here works on plain intervals. The equilibrium-measure code maps
//! each band to the angle variable `x = mid + rad cos(theta)` and hands the
//! resulting smooth (or endpoint-singular) integrands to these rules.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on the three-term recurrence.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// A quadrature abscissa inside `[a, b]` with its distances to both ends
/// computed without cancellation.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub t: f64,
    pub from_left: f64,
    pub from_right: f64,
}

/// Double-exponential (tanh-sinh) rule on a finite interval.
///
/// Nodes cluster at both ends at a double-exponential rate, so integrable
/// algebraic or logarithmic endpoint singularities converge quickly as long as
/// the integrand is evaluated from the accurate `from_left`/`from_right`
/// offsets rather than from `t`.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub abs_tol: f64,
    pub max_level: usize,
    pub t_max: f64,
}

impl Default for TanhSinh {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_level: 10,
            t_max: 6.0,
        }
    }
}

impl TanhSinh {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    fn node(&self, a: f64, b: f64, t: f64) -> Option<(Node, f64)> {
        let half = 0.5 * (b - a);
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // 1 - tanh|u| = 2e / (1 + e)
        let near = half * 2.0 * e / (1.0 + e);
        if near <= 0.0 {
            return None;
        }
        let far = (b - a) - near;
        let cu = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cu * cu);
        if !(w > 0.0) || !w.is_finite() {
            return None;
        }
        let node = if t >= 0.0 {
            Node {
                t: b - near,
                from_left: far,
                from_right: near,
            }
        } else {
            Node {
                t: a + near,
                from_left: near,
                from_right: far,
            }
        };
        Some((node, w))
    }

    /// Integrate `f` over `[a, b]`, refining the step until two successive
    /// levels agree to `abs_tol`.
    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(Node) -> f64,
    {
        if b <= a {
            return Ok(0.0);
        }
        let mut eval = |t: f64| -> Result<f64> {
            match self.node(a, b, t) {
                Some((node, w)) => {
                    let v = f(node);
                    if v.is_nan() {
                        return Err(Error::NanIntegrand(node.t));
                    }
                    let c = v * w;
                    Ok(if c.is_finite() { c } else { 0.0 })
                }
                None => Ok(0.0),
            }
        };
        let mut h = 1.0;
        let kmax = self.t_max.floor() as i64;
        let mut sum = eval(0.0)?;
        for k in 1..=kmax {
            let t = k as f64;
            sum += eval(t)? + eval(-t)?;
        }
        let mut estimate = h * sum;
        let mut change = f64::INFINITY;
        for level in 1..=self.max_level {
            h *= 0.5;
            let mut k = 1i64;
            loop {
                let t = k as f64 * h;
                if t > self.t_max {
                    break;
                }
                sum += eval(t)? + eval(-t)?;
                k += 2;
            }
            let next = h * sum;
            change = (next - estimate).abs();
            estimate = next;
            if level >= 3 && change <= self.abs_tol {
                return Ok(estimate);
            }
        }
        Err(Error::QuadratureNotConverged { estimate, change })
    }
}

/// Composite Gauss-Legendre rule on `[a, b]` with geometric grading toward
/// both ends: `levels` nested subintervals of ratio `sigma` on each side plus
/// a middle piece, each carrying `m` nodes.
pub fn graded_gauss_legendre(a: f64, b: f64, m: usize, levels: usize, sigma: f64) -> Vec<(Node, f64)> {
    let (gx, gw) = gauss_legendre(m);
    let len = b - a;
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    // offsets measured from the left end, then mirrored for the right end
    let mut cuts = vec![0.0];
    let mut s = 0.5 * len;
    let mut left = Vec::new();
    for _ in 0..levels {
        s *= sigma;
        left.push(s);
    }
    left.reverse();
    cuts.extend(left.iter().copied());
    // left graded pieces: [0, c1], [c1, c2], ..., [c_last, len/2]
    let mut edges = cuts.clone();
    edges.push(0.5 * len);
    for w in edges.windows(2) {
        pieces.push((w[0], w[1]));
    }
    let left_pieces = pieces.len();
    let mut out = Vec::with_capacity(2 * left_pieces * m);
    for &(p, q) in &pieces {
        let h = 0.5 * (q - p);
        for (x, w) in gx.iter().zip(&gw) {
            let d = p + h * (1.0 + x);
            out.push((
                Node {
                    t: a + d,
                    from_left: d,
                    from_right: len - d,
                },
                w * h,
            ));
        }
    }
    for &(p, q) in &pieces {
        let h = 0.5 * (q - p);
        for (x, w) in gx.iter().zip(&gw) {
            let d = p + h * (1.0 + x);
            out.push((
                Node {
                    t: b - d,
                    from_left: len - d,
                    from_right: d,
                },
                w * h,
            ));
        }
    }
    out
}

/// Midpoint (Gauss-Chebyshev in the angle variable) nodes on `[0, pi]`.
pub fn chebyshev_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| (j as f64 + 0.5) * PI / n as f64)
}
