//! Cantor sets `K(gamma)` cut out by iterated quadratic maps.
//!
//! With `f_1(z) = 2z(z-1)/gamma_1 + 1` and
//! `f_k(z) = z^2/(2 gamma_k) + 1 - 1/(2 gamma_k)`, the level sets are
//! `E_s = F_s^{-1}([-1, 1])` for `F_s = f_s o ... o f_1`, and `K(gamma)` is
//! their intersection. Bands are pulled back one quadratic at a time, each
//! endpoint carried together with its distance to 1 so that the square roots
//! never cancel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::green_interval_closed_form;
use crate::realsets::RealCompactSet;

/// Closed-form continuation of a gamma sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TailRule {
    /// `gamma_s = gamma` for every later `s`.
    Constant { gamma: f64 },
    /// `gamma_s = exp(-c 2^{-s}) / 4`.
    Saturating { c: f64 },
    /// Only `lower <= gamma_s < 1/4` is known; sums become brackets.
    Bounded { lower: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSequence {
    /// `gamma_1, ..., gamma_m`.
    pub values: Vec<f64>,
    #[serde(default)]
    pub tail: Option<TailRule>,
}

fn check(index: usize, value: f64) -> Result<()> {
    if value > 0.0 && value < 0.25 {
        Ok(())
    } else {
        Err(Error::GammaOutOfRange { index, value })
    }
}

impl GammaSequence {
    pub fn new(values: Vec<f64>, tail: Option<TailRule>) -> Result<Self> {
        for (i, &g) in values.iter().enumerate() {
            check(i + 1, g)?;
        }
        match tail {
            Some(TailRule::Constant { gamma }) => check(values.len() + 1, gamma)?,
            Some(TailRule::Saturating { c }) if !(c > 0.0 && c.is_finite()) => {
                return Err(Error::InvalidArgument("saturation rate must be positive".into()))
            }
            Some(TailRule::Bounded { lower }) => check(values.len() + 1, lower)?,
            _ => {}
        }
        Ok(Self { values, tail })
    }

    pub fn constant(gamma: f64) -> Result<Self> {
        Self::new(vec![], Some(TailRule::Constant { gamma }))
    }

    pub fn saturating(c: f64) -> Result<Self> {
        Self::new(vec![], Some(TailRule::Saturating { c }))
    }

    /// `gamma_s` for `s >= 1`, when it is known exactly.
    pub fn gamma(&self, s: usize) -> Result<f64> {
        assert!(s >= 1, "gamma is indexed from 1");
        if let Some(&g) = self.values.get(s - 1) {
            return Ok(g);
        }
        match self.tail {
            Some(TailRule::Constant { gamma }) => Ok(gamma),
            Some(TailRule::Saturating { c }) => Ok(0.25 * (-c * 0.5f64.powi(s as i32)).exp()),
            _ => Err(Error::DivergentTail(self.values.len())),
        }
    }

    /// Bracket on `sum_{s > n} 2^{-s} log(1/gamma_s)`.
    pub fn tail_sum(&self, n: usize) -> Result<(f64, f64)> {
        let m = self.values.len();
        let mut head = 0.0;
        for s in (n + 1)..=m {
            head += 0.5f64.powi(s as i32) * (1.0 / self.values[s - 1]).ln();
        }
        let from = n.max(m);
        let w = 0.5f64.powi(from as i32);
        let (lo, hi) = match self.tail {
            Some(TailRule::Constant { gamma }) => {
                let v = w * (1.0 / gamma).ln();
                (v, v)
            }
            Some(TailRule::Saturating { c }) => {
                let v = w * 4f64.ln() + c * w * w / 3.0;
                (v, v)
            }
            Some(TailRule::Bounded { lower }) => (w * 4f64.ln(), w * (1.0 / lower).ln()),
            None => return Err(Error::DivergentTail(m)),
        };
        Ok((head + lo, head + hi))
    }

    fn exact_tail(&self, n: usize) -> Result<f64> {
        let (lo, hi) = self.tail_sum(n)?;
        if lo == hi {
            Ok(lo)
        } else {
            Err(Error::DivergentTail(self.values.len()))
        }
    }
}

/// `f_k` for `k >= 1`.
pub fn map(gammas: &GammaSequence, k: usize, z: Complex64) -> Result<Complex64> {
    let g = gammas.gamma(k)?;
    Ok(if k == 1 {
        2.0 * z * (z - 1.0) / g + 1.0
    } else {
        z * z / (2.0 * g) + 1.0 - 1.0 / (2.0 * g)
    })
}

/// The level-`s` set `E_s` with `2^s` bands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CantorIterate {
    pub s: usize,
    pub bands: RealCompactSet,
    /// `log` of the leading coefficient of `F_s`.
    pub log_leading: f64,
}

/// Pulls back `E_s` from `[-1, 1]`.
pub fn iterate(gammas: &GammaSequence, s: usize) -> Result<CantorIterate> {
    // each band endpoint y is stored as 1 - y
    let mut bands: Vec<(f64, f64)> = vec![(2.0, 0.0)];
    let log_leading = log_leading(gammas, s)?;
    for k in (2..=s).rev() {
        let g = gammas.gamma(k)?;
        // u^2 = 1 - 2 gamma (1 - y)
        let root = |c: f64| {
            let u = (1.0 - 2.0 * g * c).sqrt();
            (u, 2.0 * g * c / (1.0 + u))
        };
        let mut next = Vec::with_capacity(2 * bands.len());
        for &(a, b) in &bands {
            let (ua, ca) = root(a);
            let (ub, cb) = root(b);
            next.push((1.0 + ub, 1.0 + ua));
            next.push((ca, cb));
        }
        bands = next;
    }
    let pairs: Vec<(f64, f64)> = if s == 0 {
        vec![(0.0, 1.0)]
    } else {
        let g = gammas.gamma(1)?;
        // z = (1 +- sqrt(1 - 2 gamma_1 (1 - y))) / 2
        let small = |c: f64| g * c / (1.0 + (1.0 - 2.0 * g * c).sqrt());
        let mut out = Vec::with_capacity(2 * bands.len());
        for &(a, b) in &bands {
            let (za, zb) = (small(a), small(b));
            out.push((zb, za));
            out.push((1.0 - za, 1.0 - zb));
        }
        out
    };
    let mut pairs = pairs;
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(CantorIterate {
        s,
        bands: RealCompactSet::from_pairs(&pairs)?,
        log_leading,
    })
}

impl CantorIterate {
    /// `F_s(z)`.
    pub fn eval(&self, gammas: &GammaSequence, z: Complex64) -> Result<Complex64> {
        let mut w = z;
        for k in 1..=self.s {
            w = map(gammas, k, w)?;
        }
        Ok(w)
    }

    /// `g_{E_s}(z) = g_{[-1,1]}(F_s(z)) / 2^s`.
    pub fn green(&self, gammas: &GammaSequence, z: Complex64) -> Result<f64> {
        let w = self.eval(gammas, z)?;
        Ok(green_interval_closed_form(-1.0, 1.0, w) / 2f64.powi(self.s as i32))
    }
}

/// `cap(E_s)` from the leading coefficient of `F_s`; `E_0 = [0, 1]`.
pub fn capacity_exact(gammas: &GammaSequence, s: usize) -> Result<f64> {
    if s == 0 {
        return Ok(0.25);
    }
    let l = log_leading(gammas, s)?;
    Ok((0.5f64.powi(s as i32) * (0.5f64.ln() - l)).exp())
}

/// `L_s = log lc(f_s) + 2 L_{s-1}` with `lc(f_1) = 2/gamma_1`, `lc(f_k) = 1/(2 gamma_k)`.
fn log_leading(gammas: &GammaSequence, s: usize) -> Result<f64> {
    let mut l = 0.0;
    for k in 1..=s {
        let g = gammas.gamma(k)?;
        l = if k == 1 { (2.0 / g).ln() } else { (0.5 / g).ln() + 2.0 * l };
    }
    Ok(l)
}

/// Bracket on `cap(K(gamma)) = exp(-sum_s 2^{-s} log(1/gamma_s))`.
pub fn capacity_limit(gammas: &GammaSequence) -> Result<(f64, f64)> {
    let (lo, hi) = gammas.tail_sum(0)?;
    Ok(((-hi).exp(), (-lo).exp()))
}

/// `W_{inf, 2^n}(K(gamma), 1)`.
pub fn widom_infty_exact(gammas: &GammaSequence, n: usize) -> Result<f64> {
    let t = gammas.exact_tail(n)?;
    Ok(0.5 * (2f64.powi(n as i32) * t).exp())
}

/// `W_{2, 2^n}(K(gamma), 1)`.
pub fn widom_2_exact(gammas: &GammaSequence, n: usize) -> Result<f64> {
    let t = gammas.exact_tail(n)?;
    let g = gammas.gamma(n + 1)?;
    Ok(0.5 * (1.0 - 2.0 * g).sqrt() * (2f64.powi(n as i32) * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::EquilibriumMeasure;

    fn eighth() -> GammaSequence {
        GammaSequence::constant(0.125).unwrap()
    }

    #[test]
    fn first_level_bands() {
        let it = iterate(&eighth(), 1).unwrap();
        let b = it.bands.bands();
        let r = 2f64.sqrt();
        assert_eq!(b.len(), 2);
        assert!((b[0].hi - (2.0 - r) / 4.0).abs() < 1e-15);
        assert!((b[1].lo - (2.0 + r) / 4.0).abs() < 1e-15);
        assert_eq!(b[0].lo, 0.0);
        assert_eq!(b[1].hi, 1.0);
    }

    #[test]
    fn band_structure_and_nesting() {
        let g = GammaSequence::new(vec![0.2, 0.1, 0.05, 0.24], Some(TailRule::Constant { gamma: 0.125 })).unwrap();
        let mut prev = iterate(&g, 0).unwrap();
        for s in 1..=8 {
            let it = iterate(&g, s).unwrap();
            assert_eq!(it.bands.num_bands(), 1 << s);
            assert_eq!(it.bands.bands()[0].lo, 0.0);
            assert_eq!(it.bands.bands().last().unwrap().hi, 1.0);
            assert!(prev.bands.contains_set(&it.bands, 1e-14));
            // endpoints map to +-1
            for &e in &it.bands.endpoints() {
                let v = it.eval(&g, Complex64::new(e, 0.0)).unwrap().re;
                assert!((v.abs() - 1.0).abs() < 1e-6, "{s} {e} {v}");
            }
            prev = it;
        }
    }

    #[test]
    fn second_level_inner_endpoints() {
        let it = iterate(&eighth(), 2).unwrap();
        // f_2(u) = 4u^2 - 3 = -1 at u = +-sqrt(1/2)
        let u = 0.5f64.sqrt();
        let z = 0.5 * (1.0 - (1.0 - 0.25 * (1.0 - u)).sqrt());
        assert!((it.bands.bands()[0].hi - z).abs() < 1e-15);
        assert_eq!(it.bands.num_bands(), 4);
    }

    #[test]
    fn capacities() {
        let g = eighth();
        let (lo, hi) = capacity_limit(&g).unwrap();
        assert!((lo - 0.125).abs() < 1e-15 && (hi - 0.125).abs() < 1e-15);
        let l2 = 2f64.ln();
        let e3 = (-0.125 * l2 - 3.0 * l2 + 0.25 * l2).exp();
        assert!((capacity_exact(&g, 3).unwrap() - e3).abs() < 1e-15);
        let mut prev = capacity_exact(&g, 0).unwrap();
        assert!((prev - 0.25).abs() < 1e-15);
        for s in 1..10 {
            let c = capacity_exact(&g, s).unwrap();
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn numeric_capacity_and_green() {
        let g = eighth();
        for s in 1..=4 {
            let it = iterate(&g, s).unwrap();
            let m = EquilibriumMeasure::new(&it.bands).unwrap();
            assert!((m.capacity() - capacity_exact(&g, s).unwrap()).abs() < 1e-6);
            for z in [Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.3), Complex64::new(-0.4, 0.0)] {
                let a = it.green(&g, z).unwrap();
                let b = m.green(z).unwrap();
                assert!((a - b).abs() < 1e-6, "{s} {z} {a} {b}");
            }
        }
    }

    #[test]
    fn exact_widom_factors() {
        let g = eighth();
        for n in 0..=10 {
            assert!((widom_infty_exact(&g, n).unwrap() - 4.0).abs() < 1e-12);
            assert!((widom_2_exact(&g, n).unwrap().powi(2) - 12.0).abs() < 1e-12);
        }
        let sat = GammaSequence::saturating(1.0).unwrap();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for n in 0..=8 {
            let a = widom_infty_exact(&sat, n).unwrap() - 2.0;
            let b = widom_2_exact(&sat, n).unwrap().powi(2) - 2.0;
            assert!(a > 0.0 && b > 0.0);
            assert!(prev.0 / a >= 1.5 && prev.1 / b >= 1.5);
            prev = (a, b);
        }
    }

    #[test]
    fn unknown_tail_is_reported() {
        let g = GammaSequence::new(vec![0.1, 0.2], None).unwrap();
        assert_eq!(widom_infty_exact(&g, 0), Err(Error::DivergentTail(2)));
        let b = GammaSequence::new(vec![0.1], Some(TailRule::Bounded { lower: 0.01 })).unwrap();
        let (lo, hi) = b.tail_sum(0).unwrap();
        assert!(lo < hi);
        assert!(matches!(widom_2_exact(&b, 3), Err(Error::DivergentTail(1))));
        assert!(GammaSequence::new(vec![0.3], None).is_err());
    }
}
