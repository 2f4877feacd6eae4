//! Lower bounds on Widom factors and their applicability.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::weighted_chebyshev;
use crate::error::Result;
use crate::potential::EquilibriumMeasure;
use crate::realsets::{RationalFunction, RealCompactSet};
use crate::weights::{szego_factor, WeightExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundId {
    /// `W >= S` for every weight.
    SzegoUniversal,
    /// `W >= 2S`, evaluated for every weight.
    DoubleSzego,
    /// `W >= 2` for the unweighted problem on a real set.
    RealUnweighted,
    /// `w = sqrt(R)`: `W >= 2S exp(-1/2 sum g(a_j))`, `n > d/2`.
    SqrtRationalGreen,
    /// `w = sqrt(R)` with zeros of `R` in the set: `W >= 2S`.
    SqrtRationalRegular,
    /// `w = |R|`: `W >= 2S exp(-sum g(a_j))`, `n > d`.
    AbsRationalGreen,
    /// `w = |R|^{1/m}`: `W >= A^{1/m} S exp(-1/m sum g(a_j))`.
    RootRational,
    /// Convergent product with zeros in the set: `W >= 2S`.
    InfiniteProduct,
    /// Convergent product, arbitrary zeros: `W >= 2S exp(-sum g(a_j))`.
    InfiniteProductGreen,
    /// Rational product weight, `n > d1 - d0`: `W >= 2S`.
    RationalProduct,
    /// `W >= sqrt(2) S`, asymptotic only.
    Sqrt2Szego,
    /// `W_2^2 >= S`.
    L2SzegoUniversal,
    /// `W_2^2 >= 2` for the unweighted problem on a real set.
    L2RealUnweighted,
    /// `W_2^2 >= 2S`, evaluated for every weight.
    L2DoubleSzego,
    /// Rational `w`: `W_2^2 >= 2S / (1 + sqrt(1 - exp(-2 sum g(a_j))))`.
    L2RationalGreen,
    /// Rational `w` with zeros in the set: `W_2^2 >= 2S`.
    L2RationalInSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    /// Hypotheses verified; a negative margin would refute the bound.
    Guaranteed,
    /// Evaluated for comparison only.
    Informational,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: BoundId,
    pub status: BoundStatus,
    pub reason: String,
    pub n: usize,
    pub lhs_lower: f64,
    pub lhs_upper: f64,
    pub rhs: Option<f64>,
    /// `lhs_upper - rhs`.
    pub margin: Option<f64>,
}

impl BoundReport {
    pub fn guaranteed(&self) -> bool {
        self.status == BoundStatus::Guaranteed
    }
}

pub(crate) struct Audit {
    pub n: usize,
    pub lhs: (f64, f64),
    pub out: Vec<BoundReport>,
}

impl Audit {
    pub fn push(&mut self, id: BoundId, status: BoundStatus, reason: impl Into<String>, rhs: f64) {
        let rhs = if status == BoundStatus::NotApplicable {
            None
        } else {
            Some(rhs)
        };
        self.out.push(BoundReport {
            bound_id: id,
            status,
            reason: reason.into(),
            n: self.n,
            lhs_lower: self.lhs.0,
            lhs_upper: self.lhs.1,
            rhs,
            margin: rhs.map(|r| self.lhs.1 - r),
        });
    }

    pub fn skip(&mut self, id: BoundId, reason: impl Into<String>) {
        self.push(id, BoundStatus::NotApplicable, reason, f64::NAN);
    }
}

fn scaled(r: &RationalFunction, s: f64) -> RationalFunction {
    RationalFunction {
        c: r.c * s,
        zeros: r.zeros.clone(),
        poles: r.poles.clone(),
    }
}

fn product(a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
    let mut zeros = a.zeros.clone();
    zeros.extend(b.zeros.iter().copied());
    let mut poles = a.poles.clone();
    poles.extend(b.poles.iter().copied());
    RationalFunction::new(a.c * b.c, zeros, poles)
}

fn is_half_integer(x: f64) -> bool {
    (2.0 * x).fract() == 0.0
}

/// Real rational `R >= 0` on `k` with `w^2 = R`, when one exists in closed form.
pub(crate) fn as_sqrt_rational(w: &WeightExpr, k: &RealCompactSet) -> Option<RationalFunction> {
    match w {
        WeightExpr::Const { value } => RationalFunction::new(value * value, vec![], vec![]).ok(),
        WeightExpr::SqrtRational { r } if r.is_real() => Some(r.clone()),
        WeightExpr::AbsRational { r } if r.is_real() => product(r, r).ok(),
        WeightExpr::Jacobi { alpha, beta, hull } if is_half_integer(*alpha) && is_half_integer(*beta) => {
            let (p, q) = ((2.0 * alpha) as usize, (2.0 * beta) as usize);
            let mut zeros = vec![Complex64::new(hull.hi, 0.0); p];
            zeros.extend(vec![Complex64::new(hull.lo, 0.0); q]);
            let sign = if p % 2 == 1 { -1.0 } else { 1.0 };
            let c = sign * (2.0 / hull.width()).powi((p + q) as i32);
            RationalFunction::new(c, zeros, vec![]).ok()
        }
        WeightExpr::Product { factors } => {
            let mut acc = RationalFunction::new(1.0, vec![], vec![]).ok()?;
            for f in factors {
                acc = product(&acc, &as_sqrt_rational(f, k)?).ok()?;
            }
            Some(acc)
        }
        _ => None,
    }
}

/// Real rational `R` with `w = R` on `k` (after fixing the sign).
pub(crate) fn as_rational(w: &WeightExpr, k: &RealCompactSet) -> Option<RationalFunction> {
    let r = match w {
        WeightExpr::Const { value } => RationalFunction::new(*value, vec![], vec![]).ok()?,
        WeightExpr::AbsRational { r } if r.is_real() => r.clone(),
        WeightExpr::Jacobi { alpha, beta, hull } if alpha.fract() == 0.0 && beta.fract() == 0.0 => {
            let (p, q) = (*alpha as usize, *beta as usize);
            let mut zeros = vec![Complex64::new(hull.hi, 0.0); p];
            zeros.extend(vec![Complex64::new(hull.lo, 0.0); q]);
            let sign = if p % 2 == 1 { -1.0 } else { 1.0 };
            RationalFunction::new(sign * (2.0 / hull.width()).powi((p + q) as i32), zeros, vec![]).ok()?
        }
        WeightExpr::Product { factors } => {
            let mut acc = RationalFunction::new(1.0, vec![], vec![]).ok()?;
            for f in factors {
                acc = product(&acc, &as_rational(f, k)?).ok()?;
            }
            acc
        }
        _ => return None,
    };
    if r.poles.iter().any(|p| p.im == 0.0 && k.contains(p.re)) {
        return None;
    }
    let vals: Vec<f64> = k.sample_points(2048).into_iter().map(|x| r.eval(x)).collect();
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-12 * scale;
    if vals.iter().all(|&v| v >= -tol) {
        Some(r)
    } else if vals.iter().all(|&v| v <= tol) {
        Some(scaled(&r, -1.0))
    } else {
        None
    }
}

pub(crate) fn green_sum(m: &EquilibriumMeasure, pts: &[Complex64]) -> Result<f64> {
    let mut s = 0.0;
    for z in pts {
        s += m.green(*z)?;
    }
    Ok(s)
}

fn zeros_in(k: &RealCompactSet, zeros: &[Complex64]) -> bool {
    zeros.iter().all(|z| z.im == 0.0 && k.contains(z.re))
}

/// Sup-norm bounds for a Widom factor bracket `widom` of degree `n`.
pub fn sup_norm_bounds(
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    n: usize,
    widom: (f64, f64),
    s: f64,
) -> Result<Vec<BoundReport>> {
    use BoundId::*;
    use BoundStatus::*;
    let k = m.set();
    let mut a = Audit {
        n,
        lhs: widom,
        out: Vec::new(),
    };
    let nf = n as f64;
    let mut double_guaranteed = false;

    a.push(SzegoUniversal, Guaranteed, "holds for every weight", s);

    if let WeightExpr::Const { value } = w {
        a.push(RealUnweighted, Guaranteed, "constant weight on a real set", 2.0 * value);
        double_guaranteed = true;
    } else {
        a.skip(RealUnweighted, "weight is not constant");
    }

    match as_sqrt_rational(w, k) {
        Some(r) if nf > r.decay_order() as f64 / 2.0 => {
            let g = green_sum(m, &r.zeros)?;
            a.push(
                SqrtRationalGreen,
                Guaranteed,
                "w^2 is rational and non-negative on the set",
                2.0 * s * (-0.5 * g).exp(),
            );
            if zeros_in(k, &r.zeros) {
                a.push(SqrtRationalRegular, Guaranteed, "zeros of w^2 lie in the set", 2.0 * s);
                double_guaranteed = true;
            } else {
                a.skip(SqrtRationalRegular, "w^2 has zeros off the set");
            }
        }
        Some(_) => {
            a.skip(SqrtRationalGreen, "degree too small");
            a.skip(SqrtRationalRegular, "degree too small");
        }
        None => {
            a.skip(SqrtRationalGreen, "w^2 is not a closed-form rational function");
            a.skip(SqrtRationalRegular, "w^2 is not a closed-form rational function");
        }
    }

    match w {
        WeightExpr::AbsRational { r } if (n as i64) > r.decay_order() => {
            let g = green_sum(m, &r.zeros)?;
            a.push(AbsRationalGreen, Guaranteed, "modulus of a rational function", 2.0 * s * (-g).exp());
        }
        WeightExpr::AbsRational { .. } => a.skip(AbsRationalGreen, "degree too small"),
        _ => a.skip(AbsRationalGreen, "weight is not the modulus of a rational function"),
    }

    match w {
        WeightExpr::MthRootRational { r, m: root } if nf > r.decay_order() as f64 / 2.0 => {
            let g = green_sum(m, &r.zeros)?;
            let big_a: f64 = if root % 2 == 1 { 2.0 } else { 4.0 };
            let mf = *root as f64;
            a.push(
                RootRational,
                Guaranteed,
                "m-th root of a rational function",
                big_a.powf(1.0 / mf) * s * (-g / mf).exp(),
            );
        }
        WeightExpr::MthRootRational { .. } => a.skip(RootRational, "degree too small"),
        _ => a.skip(RootRational, "weight is not an m-th root of a rational function"),
    }

    match w {
        WeightExpr::InfiniteProduct { pairs } => {
            let ga: f64 = {
                let mut t = 0.0;
                for j in 0..pairs.len() {
                    t += pairs.r[j] as f64 * m.green(pairs.a[j].into())?;
                }
                t
            };
            if pairs.a.iter().all(|&x| k.contains(x)) {
                a.push(InfiniteProduct, Guaranteed, "zeros of the product lie in the set", 2.0 * s);
                double_guaranteed = true;
            } else {
                a.skip(InfiniteProduct, "some product zeros lie off the set");
            }
            a.push(
                InfiniteProductGreen,
                Guaranteed,
                "product of Mobius-type factors",
                2.0 * s * (-ga).exp(),
            );
        }
        _ => {
            a.skip(InfiniteProduct, "weight is not an infinite product");
            a.skip(InfiniteProductGreen, "weight is not an infinite product");
        }
    }

    match w.rational_product_parts(k) {
        Some(parts)
            if parts.zeros_in(k)
                && parts.pairs.as_ref().is_none_or(|p| p.a.iter().all(|&x| k.contains(x))) =>
        {
            if (n as i64) > parts.d1() as i64 - parts.d0() as i64 {
                a.push(RationalProduct, Guaranteed, "rational product weight", 2.0 * s);
                double_guaranteed = true;
            } else {
                a.skip(RationalProduct, "degree too small");
            }
        }
        Some(_) => a.skip(RationalProduct, "zeros off the set"),
        None => a.skip(RationalProduct, "not a rational product weight"),
    }

    let status = if double_guaranteed { Guaranteed } else { Informational };
    let why = if double_guaranteed {
        "implied by a guaranteed bound above"
    } else {
        "no theorem covers this weight"
    };
    a.push(DoubleSzego, status, why, 2.0 * s);
    a.push(Sqrt2Szego, Informational, "asymptotic bound only", 2f64.sqrt() * s);
    Ok(a.out)
}

/// Solves the minimax problem and evaluates every sup-norm bound.
pub fn bound_audit(
    m: &EquilibriumMeasure,
    w: &WeightExpr,
    n: usize,
    tol: f64,
) -> Result<Vec<BoundReport>> {
    let r = weighted_chebyshev(m, w, n, tol)?;
    let (lo, hi) = r.log_widom(m.log_capacity());
    let s = szego_factor(m, w, 1e-12)?;
    sup_norm_bounds(m, w, n, (lo.exp(), hi.exp()), s.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realsets::RealCompactSet;

    fn unit() -> EquilibriumMeasure {
        EquilibriumMeasure::new(&RealCompactSet::interval(-1.0, 1.0).unwrap()).unwrap()
    }

    fn find(r: &[BoundReport], id: BoundId) -> &BoundReport {
        r.iter().find(|b| b.bound_id == id).unwrap()
    }

    #[test]
    fn equality_family_sqrt() {
        let m = unit();
        let r = bound_audit(&m, &WeightExpr::sqrt_one_minus_x2(), 4, 1e-10).unwrap();
        let b = find(&r, BoundId::SqrtRationalRegular);
        assert!(b.guaranteed());
        assert!(b.margin.unwrap().abs() < 1e-8);
    }

    #[test]
    fn jacobi_quarter_is_informational() {
        let m = unit();
        let w = WeightExpr::jacobi(0.25, 0.25, m.set());
        let r = bound_audit(&m, &w, 1, 1e-10).unwrap();
        let b = find(&r, BoundId::DoubleSzego);
        assert_eq!(b.status, BoundStatus::Informational);
        assert!((b.margin.unwrap() + 0.1734).abs() < 1e-3);
        assert!(find(&r, BoundId::SqrtRationalRegular).status == BoundStatus::NotApplicable);
    }

    #[test]
    fn unweighted_margins() {
        let m = unit();
        let r = bound_audit(&m, &WeightExpr::one(), 3, 1e-10).unwrap();
        assert!((find(&r, BoundId::SzegoUniversal).margin.unwrap() - 1.0).abs() < 1e-8);
        assert!(find(&r, BoundId::DoubleSzego).margin.unwrap().abs() < 1e-8);
        assert!(find(&r, BoundId::DoubleSzego).guaranteed());
    }

    #[test]
    fn half_integer_jacobi_is_sqrt_rational() {
        let k = RealCompactSet::interval(-1.0, 1.0).unwrap();
        let w = WeightExpr::jacobi(0.5, 1.0, &k);
        let r = as_sqrt_rational(&w, &k).unwrap();
        for x in [-0.7, 0.0, 0.4] {
            assert!((r.eval(x).sqrt() - w.eval(x)).abs() < 1e-14);
        }
        let w = WeightExpr::jacobi(1.0, 2.0, &k);
        let r = as_rational(&w, &k).unwrap();
        assert!((r.eval(0.3) - w.eval(0.3)).abs() < 1e-14);
    }
}
