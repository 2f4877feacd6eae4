//! Weight functions on band sets.

mod minorant;
mod product;
mod szego;

pub use minorant::{
    minorant_multi_zero, minorant_single_zero, minorant_single_zero_sampled, AuditRow, LevelRecord,
    MinorantParams, MinorantResult,
};
pub use product::{ratio_norm, validate_product, ProductPairs, ProductReport, TailBound};
pub use szego::{szego_closed_form, szego_factor, szego_quadrature, Szego, SzegoMethod};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Abscissa;
use crate::realsets::{Interval, RationalFunction, RealCompactSet};

/// Expression tree for a weight `w : K -> [0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightExpr {
    Const {
        value: f64,
    },
    /// `|R(x)|`.
    AbsRational {
        r: RationalFunction,
    },
    /// `sqrt(R(x))` with `R >= 0` on the set.
    SqrtRational {
        r: RationalFunction,
    },
    /// `|R(x)|^{1/m}`.
    MthRootRational {
        r: RationalFunction,
        m: u32,
    },
    /// `(1 - u)^alpha (1 + u)^beta` where `u` maps `hull` affinely onto `[-1, 1]`.
    Jacobi {
        alpha: f64,
        beta: f64,
        hull: Interval,
    },
    InfiniteProduct {
        pairs: ProductPairs,
    },
    /// `exp(-|x - x0|^{-alpha})`.
    StrongZero {
        x0: f64,
        alpha: f64,
    },
    Product {
        factors: Vec<WeightExpr>,
    },
    /// Piecewise-linear interpolation of samples, constant beyond the ends.
    Tabulated {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
}

impl WeightExpr {
    pub fn one() -> Self {
        WeightExpr::Const { value: 1.0 }
    }

    pub fn abs_rational(r: RationalFunction) -> Self {
        WeightExpr::AbsRational { r }
    }

    pub fn sqrt_rational(r: RationalFunction) -> Self {
        WeightExpr::SqrtRational { r }
    }

    /// Jacobi weight on the hull of `k`.
    pub fn jacobi(alpha: f64, beta: f64, k: &RealCompactSet) -> Self {
        WeightExpr::Jacobi {
            alpha,
            beta,
            hull: k.hull(),
        }
    }

    /// `sqrt(1 - x^2)`.
    pub fn sqrt_one_minus_x2() -> Self {
        WeightExpr::SqrtRational {
            r: RationalFunction::real_zeros_poles(-1.0, &[-1.0, 1.0], &[]).unwrap(),
        }
    }

    /// `|x - x0|`.
    pub fn abs_linear(x0: f64) -> Self {
        WeightExpr::AbsRational {
            r: RationalFunction::real_zeros_poles(1.0, &[x0], &[]).unwrap(),
        }
    }

    pub fn log_eval(&self, x: f64) -> f64 {
        match self {
            WeightExpr::Const { value } => value.ln(),
            WeightExpr::AbsRational { r } => r.log_abs(x),
            WeightExpr::SqrtRational { r } => 0.5 * r.log_abs(x),
            WeightExpr::MthRootRational { r, m } => r.log_abs(x) / *m as f64,
            WeightExpr::Jacobi { alpha, beta, hull } => {
                let s = 2.0 / hull.width();
                jacobi_part(*alpha, s * (hull.hi - x).abs()) + jacobi_part(*beta, s * (x - hull.lo).abs())
            }
            WeightExpr::InfiniteProduct { pairs } => pairs.log_partial(x, pairs.len()),
            WeightExpr::StrongZero { x0, alpha } => {
                let d = (x - x0).abs();
                if d == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -d.powf(-alpha)
                }
            }
            WeightExpr::Product { factors } => factors.iter().map(|f| f.log_eval(x)).sum(),
            WeightExpr::Tabulated { .. } => self.eval(x).ln(),
        }
    }

    /// Value at `x`; infinite products are evaluated on their stored prefix.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            WeightExpr::Const { value } => *value,
            WeightExpr::Tabulated { xs, ys } => interpolate(xs, ys, x),
            WeightExpr::Product { factors } => factors.iter().map(|f| f.eval(x)).product(),
            _ => self.log_eval(x).exp(),
        }
    }

    /// Value with a certified bracket of width below `tol`.
    pub fn eval_checked(&self, x: f64, tol: f64) -> Result<f64> {
        let (lo, hi) = self.bracket(x);
        if hi - lo > tol {
            return Err(Error::ToleranceUnreachable { lo, hi });
        }
        Ok(0.5 * (lo + hi))
    }

    /// Bracket on the exact value; degenerate except for infinite products.
    pub fn bracket(&self, x: f64) -> (f64, f64) {
        match self {
            WeightExpr::InfiniteProduct { pairs } => pairs.bracket(x),
            WeightExpr::Product { factors } => {
                let mut lo = 1.0;
                let mut hi = 1.0;
                for f in factors {
                    let (a, b) = f.bracket(x);
                    lo *= a;
                    hi *= b;
                }
                (lo, hi)
            }
            _ => {
                let v = self.eval(x);
                (v, v)
            }
        }
    }

    /// `log w` at an integration abscissa, using the exact offset when the
    /// abscissa is anchored at a zero or singular point of the weight.
    pub fn log_at(&self, a: &Abscissa) -> f64 {
        match self {
            WeightExpr::Const { value } => value.ln(),
            WeightExpr::AbsRational { r } => log_abs_rational_at(r, a),
            WeightExpr::SqrtRational { r } => 0.5 * log_abs_rational_at(r, a),
            WeightExpr::MthRootRational { r, m } => log_abs_rational_at(r, a) / *m as f64,
            WeightExpr::Jacobi { alpha, beta, hull } => {
                let s = 2.0 / hull.width();
                jacobi_part(*alpha, s * a.dist(hull.hi)) + jacobi_part(*beta, s * a.dist(hull.lo))
            }
            WeightExpr::InfiniteProduct { pairs } => {
                let mut s = 0.0;
                for j in 0..pairs.len() {
                    let num = a.dist(pairs.a[j]);
                    if num == 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    s += pairs.r[j] as f64 * (num.ln() - a.dist_complex(pairs.b[j]).ln());
                }
                s
            }
            WeightExpr::StrongZero { x0, alpha } => {
                let d = a.dist(*x0);
                if d == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -d.powf(-alpha)
                }
            }
            WeightExpr::Product { factors } => factors.iter().map(|f| f.log_at(a)).sum(),
            WeightExpr::Tabulated { .. } => self.log_eval(a.x),
        }
    }

    /// Points where `w` or `log w` fails to be smooth.
    pub fn singular_points(&self) -> Vec<f64> {
        let mut out = match self {
            WeightExpr::Const { .. } => Vec::new(),
            WeightExpr::AbsRational { r }
            | WeightExpr::SqrtRational { r }
            | WeightExpr::MthRootRational { r, .. } => {
                r.zeros.iter().chain(&r.poles).map(|z| z.re).collect()
            }
            WeightExpr::Jacobi { hull, .. } => vec![hull.lo, hull.hi],
            WeightExpr::InfiniteProduct { pairs } => {
                let mut v = pairs.a.clone();
                v.extend(pairs.b.iter().map(|b| b.re));
                v
            }
            WeightExpr::StrongZero { x0, .. } => vec![*x0],
            WeightExpr::Product { factors } => {
                factors.iter().flat_map(|f| f.singular_points()).collect()
            }
            WeightExpr::Tabulated { xs, .. } => xs.clone(),
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Checks boundedness, sign and parameter constraints on `k`.
    pub fn validate(&self, k: &RealCompactSet) -> Result<()> {
        match self {
            WeightExpr::Const { value } => {
                if !(*value > 0.0) || !value.is_finite() {
                    return Err(Error::InvalidArgument("constant weight must be positive".into()));
                }
            }
            WeightExpr::AbsRational { r } | WeightExpr::MthRootRational { r, .. } => {
                check_poles_off(r, k)?;
                if let WeightExpr::MthRootRational { m, .. } = self {
                    if *m == 0 {
                        return Err(Error::InvalidArgument("root order must be positive".into()));
                    }
                }
            }
            WeightExpr::SqrtRational { r } => {
                check_poles_off(r, k)?;
                if !r.is_real() {
                    return Err(Error::InvalidArgument("R must be real".into()));
                }
                for x in k.sample_points(2000) {
                    let v = r.eval(x);
                    if v < -1e-12 * (1.0 + v.abs()) {
                        return Err(Error::InvalidArgument(format!("R({x}) = {v} < 0 on the set")));
                    }
                }
            }
            WeightExpr::Jacobi { alpha, beta, .. } => {
                if *alpha < 0.0 || *beta < 0.0 {
                    return Err(Error::InvalidArgument("Jacobi exponents must be >= 0".into()));
                }
            }
            WeightExpr::InfiniteProduct { pairs } => {
                if pairs.is_empty() {
                    return Err(Error::Empty("product pairs"));
                }
            }
            WeightExpr::StrongZero { alpha, .. } => {
                if !(*alpha > 0.0) {
                    return Err(Error::InvalidArgument("strong zero exponent must be > 0".into()));
                }
            }
            WeightExpr::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::Empty("product factors"));
                }
                for f in factors {
                    f.validate(k)?;
                }
            }
            WeightExpr::Tabulated { xs, ys } => {
                if xs.len() < 2 || xs.len() != ys.len() {
                    return Err(Error::InvalidArgument("tabulated weight needs >= 2 samples".into()));
                }
                if xs.windows(2).any(|w| w[1] <= w[0]) || ys.iter().any(|y| *y < 0.0 || !y.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "samples must have increasing abscissae and non-negative values".into(),
                    ));
                }
            }
        }
        if k.sample_points(512).iter().all(|&x| self.eval(x) == 0.0) {
            return Err(Error::InvalidArgument("weight vanishes on the set".into()));
        }
        Ok(())
    }

    /// Szego-class flag for strong zeros: interior exponents below one and
    /// endpoint exponents below one half keep `log w` integrable.
    pub fn strong_zero_is_szego(k: &RealCompactSet, x0: f64, alpha: f64) -> bool {
        if !k.contains(x0) {
            return true;
        }
        let at_end = k.endpoints().iter().any(|&e| e == x0);
        if at_end {
            alpha < 0.5
        } else {
            alpha < 1.0
        }
    }

    /// Sampled supremum over the set.
    pub fn sup_on(&self, k: &RealCompactSet) -> f64 {
        k.sample_points(4096)
            .into_iter()
            .map(|x| self.eval(x))
            .fold(0.0, f64::max)
    }
}

fn jacobi_part(p: f64, d: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * d.ln()
    }
}

fn log_abs_rational_at(r: &RationalFunction, a: &Abscissa) -> f64 {
    let mut s = r.c.abs().ln();
    for z in &r.zeros {
        s += a.dist_complex(*z).ln();
    }
    for p in &r.poles {
        s -= a.dist_complex(*p).ln();
    }
    s
}

fn check_poles_off(r: &RationalFunction, k: &RealCompactSet) -> Result<()> {
    for p in &r.poles {
        if p.im == 0.0 && k.contains(p.re) {
            return Err(Error::PoleInSet(p.re));
        }
    }
    Ok(())
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let k = xs.partition_point(|&t| t <= x) - 1;
    let t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    ys[k] + t * (ys[k + 1] - ys[k])
}

/// A weight split into the pieces of a rational product weight:
/// `|c P(x) / Q(x)| * prod |(x - a_j)/(x - b_j)|`.
#[derive(Debug, Clone)]
pub struct RationalProductParts {
    pub c: f64,
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    pub pairs: Option<ProductPairs>,
}

impl RationalProductParts {
    pub fn d0(&self) -> usize {
        self.zeros.len()
    }

    pub fn d1(&self) -> usize {
        self.poles.len()
    }

    pub fn zeros_in(&self, k: &RealCompactSet) -> bool {
        self.zeros.iter().all(|z| z.im == 0.0 && k.contains(z.re))
    }
}

impl WeightExpr {
    /// Decomposes moduli of rational functions, infinite products and
    /// positive constants (and their products) into rational-product form.
    pub fn rational_product_parts(&self, k: &RealCompactSet) -> Option<RationalProductParts> {
        let mut parts = RationalProductParts {
            c: 1.0,
            zeros: Vec::new(),
            poles: Vec::new(),
            pairs: None,
        };
        fn walk(w: &WeightExpr, k: &RealCompactSet, acc: &mut RationalProductParts) -> bool {
            match w {
                WeightExpr::Const { value } if *value > 0.0 => {
                    acc.c *= value;
                    true
                }
                WeightExpr::AbsRational { r } => {
                    if r.poles.iter().any(|p| p.im == 0.0 && k.contains(p.re)) {
                        return false;
                    }
                    acc.c *= r.c.abs();
                    acc.zeros.extend(r.zeros.iter().copied());
                    acc.poles.extend(r.poles.iter().copied());
                    true
                }
                WeightExpr::InfiniteProduct { pairs } => {
                    acc.pairs = Some(match acc.pairs.take() {
                        None => pairs.clone(),
                        Some(prev) => ProductPairs::interleave(&[prev, pairs.clone()]),
                    });
                    true
                }
                WeightExpr::Product { factors } => factors.iter().all(|f| walk(f, k, acc)),
                _ => false,
            }
        }
        walk(self, k, &mut parts).then_some(parts)
    }
}
