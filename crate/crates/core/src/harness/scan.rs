//! Random band sets and weights for batch audits and the margin scan.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{bound_audit, widom_infty, BoundReport};
use crate::error::Result;
use crate::orthopoly::l2_bound_audit;
use crate::potential::EquilibriumMeasure;
use crate::realsets::{RationalFunction, RealCompactSet};
use crate::weights::{szego_factor, ProductPairs, WeightExpr};

/// `k` bands in `[-1, 1]`, one per equal slot, each covering most of it.
pub fn random_set<R: Rng>(rng: &mut R, max_bands: usize) -> RealCompactSet {
    let k = rng.random_range(1..=max_bands.max(1));
    let slot = 2.0 / k as f64;
    let pairs: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let a = -1.0 + i as f64 * slot;
            let lo = a + rng.random_range(0.02..0.3) * slot;
            let hi = a + slot - rng.random_range(0.02..0.3) * slot;
            (lo, hi)
        })
        .collect();
    RealCompactSet::from_pairs(&pairs).expect("disjoint slots")
}

fn point_in<R: Rng>(rng: &mut R, k: &RealCompactSet) -> f64 {
    let bands = k.bands();
    let b = bands[rng.random_range(0..bands.len())];
    b.lo + rng.random_range(0.0..=1.0) * b.width()
}

fn pole_off<R: Rng>(rng: &mut R, k: &RealCompactSet) -> Vec<Complex64> {
    let h = k.hull();
    if rng.random_bool(0.5) {
        let z = Complex64::new(rng.random_range(h.lo..h.hi), rng.random_range(0.1..1.0));
        vec![z, z.conj()]
    } else {
        let side = if rng.random_bool(0.5) { h.hi } else { h.lo };
        let off: f64 = rng.random_range(0.2..1.5);
        vec![Complex64::new(side + off.copysign(side), 0.0)]
    }
}

/// Weights of the families covered by the non-asymptotic bounds: moduli of
/// rational functions, square roots of non-negative rational functions and
/// rational product weights.
pub fn random_covered_weight<R: Rng>(rng: &mut R, k: &RealCompactSet) -> WeightExpr {
    let c = rng.random_range(0.5..2.0);
    match rng.random_range(0..3) {
        0 => {
            let mut zeros: Vec<Complex64> = (0..rng.random_range(0..=2))
                .map(|_| Complex64::new(point_in(rng, k), 0.0))
                .collect();
            if rng.random_bool(0.4) {
                let h = k.hull();
                zeros.push(Complex64::new(h.hi + rng.random_range(0.1..1.0), 0.0));
            }
            let poles = if rng.random_bool(0.6) { pole_off(rng, k) } else { vec![] };
            WeightExpr::AbsRational {
                r: RationalFunction::new(c, zeros, poles).expect("valid rational"),
            }
        }
        1 => {
            let mut zeros = Vec::new();
            for _ in 0..rng.random_range(0..=2) {
                let a = point_in(rng, k);
                zeros.extend([Complex64::new(a, 0.0); 2]);
            }
            let h = k.hull();
            let mut lead = c;
            if rng.random_bool(0.5) {
                // (hi - x)(x - lo) >= 0 on the set
                zeros.extend([Complex64::new(h.lo, 0.0), Complex64::new(h.hi, 0.0)]);
                lead = -c;
            }
            let poles = if rng.random_bool(0.5) {
                let z = Complex64::new(rng.random_range(h.lo..h.hi), rng.random_range(0.1..1.0));
                vec![z, z.conj()]
            } else {
                vec![]
            };
            WeightExpr::SqrtRational {
                r: RationalFunction::new(lead, zeros, poles).expect("valid rational"),
            }
        }
        _ => {
            let n = rng.random_range(4..=16);
            let a0 = point_in(rng, k);
            let a: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { a0 } else { point_in(rng, k) }).collect();
            let b: Vec<Complex64> = a
                .iter()
                .enumerate()
                .map(|(j, &x)| Complex64::new(x, 0.5f64.powi(j as i32 + 1)))
                .collect();
            // even exponents keep every truncation rational on the set
            let r = if rng.random_bool(0.5) { 2 } else { 1 };
            let pairs = ProductPairs::new(a, b, vec![r; n]).expect("valid pairs");
            let zero = Complex64::new(point_in(rng, k), 0.0);
            let zeros = vec![zero; if rng.random_bool(0.5) { 2 } else { 1 }];
            WeightExpr::Product {
                factors: vec![
                    WeightExpr::AbsRational {
                        r: RationalFunction::new(c, zeros, pole_off(rng, k)).expect("valid rational"),
                    },
                    WeightExpr::InfiniteProduct { pairs },
                ],
            }
        }
    }
}

/// Any implemented family, including weights no theorem covers.
pub fn random_weight<R: Rng>(rng: &mut R, k: &RealCompactSet) -> WeightExpr {
    match rng.random_range(0..5) {
        0 => WeightExpr::one(),
        1 => {
            let (a, b) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
            WeightExpr::jacobi(a, b, k)
        }
        2 => {
            let x0 = point_in(rng, k);
            let alpha = rng.random_range(0.1..0.45);
            WeightExpr::StrongZero { x0, alpha }
        }
        _ => random_covered_weight(rng, k),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditInstance {
    pub set: RealCompactSet,
    pub weight: WeightExpr,
    pub n: usize,
    pub reports: Vec<BoundReport>,
}

impl AuditInstance {
    /// Smallest margin among guaranteed bounds.
    pub fn worst_guaranteed(&self) -> f64 {
        self.reports
            .iter()
            .filter(|r| r.guaranteed())
            .filter_map(|r| r.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Sup-norm and L2 audits for one instance.
pub fn audit_instance(k: &RealCompactSet, w: &WeightExpr, n: usize, tol: f64) -> Result<AuditInstance> {
    w.validate(k)?;
    let m = EquilibriumMeasure::new(k)?;
    let mut reports = bound_audit(&m, w, n, tol)?;
    reports.extend(l2_bound_audit(&m, w, n)?);
    Ok(AuditInstance {
        set: k.clone(),
        weight: w.clone(),
        n,
        reports,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub index: usize,
    pub bands: usize,
    pub family: String,
    pub s: f64,
    /// `min_n (W_{inf,n} - 2S)` using the upper end of each bracket.
    pub min_margin: f64,
    pub argmin: usize,
}

pub fn family(w: &WeightExpr) -> &'static str {
    match w {
        WeightExpr::Const { .. } => "const",
        WeightExpr::AbsRational { .. } => "abs_rational",
        WeightExpr::SqrtRational { .. } => "sqrt_rational",
        WeightExpr::MthRootRational { .. } => "mth_root_rational",
        WeightExpr::Jacobi { .. } => "jacobi",
        WeightExpr::InfiniteProduct { .. } => "infinite_product",
        WeightExpr::StrongZero { .. } => "strong_zero",
        WeightExpr::Product { .. } => "product",
        WeightExpr::Tabulated { .. } => "tabulated",
    }
}

/// `min_{n <= max_degree} W_{inf,n} - 2S` for one instance.
pub fn scan_instance(
    index: usize,
    k: &RealCompactSet,
    w: &WeightExpr,
    max_degree: usize,
    tol: f64,
) -> Result<ScanRow> {
    w.validate(k)?;
    let m = EquilibriumMeasure::new(k)?;
    let s = szego_factor(&m, w, 1e-12)?.value;
    let mut best = (f64::INFINITY, 0);
    for n in 1..=max_degree {
        let (_, hi) = widom_infty(&m, w, n, tol)?;
        let margin = hi - 2.0 * s;
        if margin < best.0 {
            best = (margin, n);
        }
    }
    Ok(ScanRow {
        index,
        bands: k.num_bands(),
        family: family(w).to_string(),
        s,
        min_margin: best.0,
        argmin: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_weights_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let k = random_set(&mut rng, 4);
            assert!(k.num_bands() <= 4);
            let w = random_covered_weight(&mut rng, &k);
            w.validate(&k).unwrap();
            assert!(w.rational_product_parts(&k).is_some() || matches!(w, WeightExpr::SqrtRational { .. }));
        }
    }
}
