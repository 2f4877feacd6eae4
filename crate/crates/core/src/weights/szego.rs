use serde::{Deserialize, Serialize};

use super::WeightExpr;
use crate::error::{Error, Result};
use crate::potential::{EquilibriumMeasure, IntegrateOpts};
use crate::realsets::RationalFunction;

/// A `log w` integral below this is treated as divergent.
const DIVERGENCE_FLOOR: f64 = -1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SzegoMethod {
    ClosedForm,
    Quadrature,
    /// Decided from the exponent of a strong zero.
    Classified,
}

/// Szego factor `S(K, w) = exp int log w dmu_K`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Szego {
    pub value: f64,
    pub log_value: f64,
    /// Certified lower bound; below `value` only for infinite products
    /// whose omitted factors are bounded by a tail estimate.
    pub lower: f64,
    pub non_szego: bool,
    pub method: SzegoMethod,
}

impl Szego {
    fn from_log(log_value: f64, method: SzegoMethod) -> Self {
        Szego {
            value: log_value.exp(),
            log_value,
            lower: log_value.exp(),
            non_szego: false,
            method,
        }
    }

    fn divergent(method: SzegoMethod) -> Self {
        Szego {
            value: 0.0,
            log_value: f64::NEG_INFINITY,
            lower: 0.0,
            non_szego: true,
            method,
        }
    }
}

fn log_rational(m: &EquilibriumMeasure, r: &RationalFunction) -> Result<f64> {
    let d = r.decay_order() as f64;
    let mut s = r.c.abs().ln() - d * m.log_capacity();
    for z in &r.zeros {
        s += m.green(*z)?;
    }
    for p in &r.poles {
        s -= m.green(*p)?;
    }
    Ok(s)
}

/// `log S` from Green-function identities, when `w` has such a form.
pub fn szego_closed_form(m: &EquilibriumMeasure, w: &WeightExpr) -> Option<Result<f64>> {
    match w {
        WeightExpr::Const { value } => Some(Ok(value.ln())),
        WeightExpr::AbsRational { r } => Some(log_rational(m, r)),
        WeightExpr::SqrtRational { r } => Some(log_rational(m, r).map(|v| 0.5 * v)),
        WeightExpr::MthRootRational { r, m: k } => {
            Some(log_rational(m, r).map(|v| v / *k as f64))
        }
        WeightExpr::Jacobi { alpha, beta, hull } => {
            let scale = (2.0 / hull.width()).ln() + m.log_capacity();
            let f = || -> Result<f64> {
                let mut s = 0.0;
                if *alpha != 0.0 {
                    s += alpha * (scale + m.green(hull.hi.into())?);
                }
                if *beta != 0.0 {
                    s += beta * (scale + m.green(hull.lo.into())?);
                }
                Ok(s)
            };
            Some(f())
        }
        WeightExpr::InfiniteProduct { pairs } => {
            let f = || -> Result<f64> {
                let mut s = 0.0;
                for j in 0..pairs.len() {
                    s += pairs.r[j] as f64 * (m.green(pairs.a[j].into())? - m.green(pairs.b[j])?);
                }
                Ok(s)
            };
            Some(f())
        }
        WeightExpr::Product { factors } => {
            let mut s = 0.0;
            for f in factors {
                match szego_closed_form(m, f)? {
                    Ok(v) => s += v,
                    Err(e) => return Some(Err(e)),
                }
            }
            Some(Ok(s))
        }
        _ => None,
    }
}

/// `S` by adaptive quadrature of `log w` split at the singular points.
pub fn szego_quadrature(m: &EquilibriumMeasure, w: &WeightExpr, tol: f64) -> Result<Szego> {
    let opts = IntegrateOpts::singular(w.singular_points()).with_tol(tol);
    match m.integrate(|a| w.log_at(&a), &opts) {
        Ok(v) if v.is_finite() && v > DIVERGENCE_FLOOR => {
            Ok(Szego::from_log(v, SzegoMethod::Quadrature))
        }
        Ok(v) if v.is_nan() => Err(Error::NanIntegrand(f64::NAN)),
        Ok(_) => Ok(Szego::divergent(SzegoMethod::Quadrature)),
        Err(Error::QuadratureNotConverged { estimate, change }) => {
            if estimate < DIVERGENCE_FLOOR || !estimate.is_finite() {
                Ok(Szego::divergent(SzegoMethod::Quadrature))
            } else {
                Err(Error::QuadratureNotConverged { estimate, change })
            }
        }
        Err(e) => Err(e),
    }
}

fn has_non_szego_zero(m: &EquilibriumMeasure, w: &WeightExpr) -> bool {
    match w {
        WeightExpr::StrongZero { x0, alpha } => {
            !WeightExpr::strong_zero_is_szego(m.set(), *x0, *alpha)
        }
        WeightExpr::Product { factors } => factors.iter().any(|f| has_non_szego_zero(m, f)),
        _ => false,
    }
}

/// Szego factor of `w` on the set of `m`, by closed form when available.
pub fn szego_factor(m: &EquilibriumMeasure, w: &WeightExpr, tol: f64) -> Result<Szego> {
    if has_non_szego_zero(m, w) {
        return Ok(Szego::divergent(SzegoMethod::Classified));
    }
    if let Some(v) = szego_closed_form(m, w) {
        let v = v?;
        if v == f64::NEG_INFINITY {
            return Ok(Szego::divergent(SzegoMethod::ClosedForm));
        }
        let mut out = Szego::from_log(v, SzegoMethod::ClosedForm);
        out.lower = out.value * tail_factor(m, w)?;
        return Ok(out);
    }
    szego_quadrature(m, w, tol)
}

/// Lower bound on the factor contributed by omitted product terms.
fn tail_factor(m: &EquilibriumMeasure, w: &WeightExpr) -> Result<f64> {
    Ok(match w {
        WeightExpr::InfiniteProduct { pairs } => match &pairs.tail {
            Some(t) => (-t.green_sum).exp(),
            None => 1.0,
        },
        WeightExpr::Product { factors } => {
            let mut f = 1.0;
            for w in factors {
                f *= tail_factor(m, w)?;
            }
            f
        }
        _ => 1.0,
    })
}
