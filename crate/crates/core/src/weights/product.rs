use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::EquilibriumMeasure;
use crate::realsets::RealCompactSet;

/// Certified information about the factors beyond the stored prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// Upper bound on `sum r_j |b_j - a_j|` over the omitted factors.
    pub abs_sum: f64,
    /// Upper bound on `sum r_j g_K(b_j)` over the omitted factors.
    pub green_sum: f64,
    /// Limit points of the omitted zeros.
    pub accumulation: Vec<f64>,
    /// Omitted zeros lie within this distance of an accumulation point.
    pub radius: f64,
}

/// Zeros `a_j`, poles `b_j` and multiplicities `r_j` of
/// `prod |(x - a_j) / (x - b_j)|^{r_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductPairs {
    pub a: Vec<f64>,
    pub b: Vec<Complex64>,
    pub r: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailBound>,
}

impl ProductPairs {
    pub fn new(a: Vec<f64>, b: Vec<Complex64>, r: Vec<u32>) -> Result<Self> {
        if a.len() != b.len() || a.len() != r.len() {
            return Err(Error::InvalidArgument("pair lists differ in length".into()));
        }
        Ok(Self { a, b, r, tail: None })
    }

    pub fn with_tail(mut self, tail: TailBound) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `log` of the partial product over the first `k` factors.
    pub fn log_partial(&self, x: f64, k: usize) -> f64 {
        let mut s = 0.0;
        for j in 0..k.min(self.len()) {
            let num = (x - self.a[j]).abs();
            if num == 0.0 {
                return f64::NEG_INFINITY;
            }
            let den = (x - self.b[j].re).hypot(self.b[j].im);
            s += self.r[j] as f64 * (num / den).ln();
        }
        s
    }

    /// Value of the stored prefix product.
    pub fn eval(&self, x: f64) -> f64 {
        self.log_partial(x, self.len()).exp()
    }

    /// Bracket `[lo, hi]` on the infinite product at `x`. Partial products
    /// decrease, so the prefix value is the upper end.
    pub fn bracket(&self, x: f64) -> (f64, f64) {
        let hi = self.eval(x);
        let Some(t) = &self.tail else {
            return (hi, hi);
        };
        if hi == 0.0 || t.abs_sum == 0.0 {
            return (hi, hi);
        }
        let near = t
            .accumulation
            .iter()
            .map(|p| (x - p).abs())
            .fold(f64::INFINITY, f64::min);
        let delta = near - t.radius - t.abs_sum;
        if delta <= 0.0 {
            return (0.0, hi);
        }
        (hi * (1.0 - t.abs_sum / delta).max(0.0), hi)
    }

    /// Interleaves several pair lists round-robin.
    pub fn interleave(parts: &[ProductPairs]) -> ProductPairs {
        let mut out = ProductPairs {
            a: Vec::new(),
            b: Vec::new(),
            r: Vec::new(),
            tail: None,
        };
        let longest = parts.iter().map(|p| p.len()).max().unwrap_or(0);
        for j in 0..longest {
            for p in parts {
                if j < p.len() {
                    out.a.push(p.a[j]);
                    out.b.push(p.b[j]);
                    out.r.push(p.r[j]);
                }
            }
        }
        let tails: Vec<&TailBound> = parts.iter().filter_map(|p| p.tail.as_ref()).collect();
        if !tails.is_empty() {
            out.tail = Some(TailBound {
                abs_sum: tails.iter().map(|t| t.abs_sum).sum(),
                green_sum: tails.iter().map(|t| t.green_sum).sum(),
                accumulation: tails.iter().flat_map(|t| t.accumulation.clone()).collect(),
                radius: tails.iter().map(|t| t.radius).fold(0.0, f64::max),
            });
        }
        out
    }
}

/// Outcome of checking the convergence hypotheses of a product weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductReport {
    /// `max_K |(x - a_j)/(x - b_j)|` per factor.
    pub ratio_norms: Vec<f64>,
    pub green_partial: f64,
    pub green_tail: f64,
    pub abs_partial: f64,
    pub abs_tail: f64,
    /// `exp(-sum r_j g_K(b_j))` including the tail bound.
    pub szego_lower: f64,
    /// Same sum over the prefix only.
    pub szego_prefix: f64,
}

/// Largest value of `|x - a| / |x - b|` over the set.
pub fn ratio_norm(k: &RealCompactSet, a: f64, b: Complex64) -> f64 {
    let f = |x: f64| (x - a).abs() / (x - b.re).hypot(b.im);
    let mut best = k.endpoints().into_iter().map(f).fold(0.0, f64::max);
    if a != b.re {
        let xc = b.re - b.im * b.im / (a - b.re);
        if k.contains(xc) {
            best = best.max(f(xc));
        }
    }
    best
}

/// Checks the hypotheses of the infinite-product theorem on a prefix of
/// `horizon` factors plus the declared tail.
pub fn validate_product(
    m: &EquilibriumMeasure,
    p: &ProductPairs,
    horizon: usize,
) -> Result<ProductReport> {
    let k = m.set();
    let n = horizon.min(p.len());
    let mut ratio_norms = Vec::with_capacity(p.len());
    for j in 0..p.len() {
        let b = p.b[j];
        if b.im == 0.0 && k.contains(b.re) {
            return Err(Error::HypothesisViolated(format!(
                "pole b_{j} = {} lies in the set",
                b.re
            )));
        }
        if !k.contains(p.a[j]) {
            return Err(Error::HypothesisViolated(format!(
                "zero a_{j} = {} lies outside the set",
                p.a[j]
            )));
        }
        let rn = ratio_norm(k, p.a[j], b);
        if rn > 1.0 + 1e-12 {
            return Err(Error::HypothesisViolated(format!(
                "factor {j} has sup-norm {rn} > 1 on the set"
            )));
        }
        ratio_norms.push(rn);
    }
    if let Some(t) = &p.tail {
        for acc in &t.accumulation {
            if !p.a.iter().any(|a| (a - acc).abs() <= 1e-15 * (1.0 + acc.abs())) {
                return Err(Error::HypothesisViolated(format!(
                    "limit point {acc} of the zeros is not among them"
                )));
            }
        }
    }
    let mut green_partial = 0.0;
    let mut abs_partial = 0.0;
    for j in 0..n {
        green_partial += p.r[j] as f64 * m.green(p.b[j])?;
        abs_partial += p.r[j] as f64 * (p.b[j] - Complex64::new(p.a[j], 0.0)).norm();
    }
    let mut green_tail = 0.0;
    let mut abs_tail = 0.0;
    for j in n..p.len() {
        green_tail += p.r[j] as f64 * m.green(p.b[j])?;
        abs_tail += p.r[j] as f64 * (p.b[j] - Complex64::new(p.a[j], 0.0)).norm();
    }
    if let Some(t) = &p.tail {
        green_tail += t.green_sum;
        abs_tail += t.abs_sum;
    }
    Ok(ProductReport {
        ratio_norms,
        green_partial,
        green_tail,
        abs_partial,
        abs_tail,
        szego_lower: (-(green_partial + green_tail)).exp(),
        szego_prefix: (-green_partial).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic(n: usize) -> ProductPairs {
        ProductPairs::new(
            vec![0.0; n],
            (1..=n).map(|j| Complex64::new(0.0, 0.5f64.powi(j as i32))).collect(),
            vec![1; n],
        )
        .unwrap()
    }

    #[test]
    fn dyadic_product_value() {
        // high-precision partial-product oracle
        let p = dyadic(40);
        assert!((p.eval(0.5) - 0.6072529350088814).abs() < 1e-14);
    }

    #[test]
    fn partial_products_decrease() {
        let p = dyadic(30);
        for x in [-1.0, -0.3, 0.01, 0.5, 0.99] {
            let mut prev = f64::INFINITY;
            for k in 0..=30 {
                let v = p.log_partial(x, k);
                assert!(v <= prev + 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn bracket_tightens_with_tail() {
        let n = 40;
        let p = dyadic(n).with_tail(TailBound {
            abs_sum: 0.5f64.powi(n as i32),
            green_sum: 0.0,
            accumulation: vec![0.0],
            radius: 0.0,
        });
        let (lo, hi) = p.bracket(0.5);
        assert!(hi - lo < 1e-11 && lo <= hi);
        assert_eq!(p.bracket(0.0), (0.0, 0.0));
    }

    #[test]
    fn validation_cases() {
        let k = RealCompactSet::interval(-1.0, 1.0).unwrap();
        let m = EquilibriumMeasure::new(&k).unwrap();
        let rep = validate_product(&m, &dyadic(20), 20).unwrap();
        assert!(rep.ratio_norms.iter().all(|&r| r <= 1.0));
        assert!(rep.szego_lower > 0.0);

        let bad = ProductPairs::new(
            vec![0.0; 5],
            (1..=5).map(|j| Complex64::new(0.5f64.powi(j), 0.0)).collect(),
            vec![1; 5],
        )
        .unwrap();
        assert!(matches!(
            validate_product(&m, &bad, 5),
            Err(Error::HypothesisViolated(_))
        ));

        let n = 20;
        let a: Vec<f64> = (1..=n).map(|j| 1.0 - 0.5f64.powi(j)).collect();
        let b: Vec<Complex64> = (1..=n)
            .map(|j| Complex64::new(1.0 - 0.5f64.powi(j), 0.5f64.powi(2 * j)))
            .collect();
        let tail = TailBound {
            abs_sum: 0.5f64.powi(2 * n) / 3.0,
            green_sum: 1e-6,
            accumulation: vec![1.0],
            radius: 0.5f64.powi(n),
        };
        let open = ProductPairs::new(a.clone(), b.clone(), vec![1; n as usize])
            .unwrap()
            .with_tail(tail.clone());
        assert!(validate_product(&m, &open, 20).is_err());
        let mut a2 = a;
        let mut b2 = b;
        a2.push(1.0);
        b2.push(Complex64::new(1.0, 1.0));
        let closed = ProductPairs::new(a2, b2, vec![1; n as usize + 1])
            .unwrap()
            .with_tail(tail);
        assert!(validate_product(&m, &closed, 21).is_ok());
    }
}
