use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CONJ_TOL: f64 = 1e-10;

/// Real polynomial kept in monomial form, optionally alongside its roots.
///
/// When the roots are known the product form is used for evaluation, which
/// keeps values accurate next to clustered roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    /// Coefficients in ascending order of degree.
    coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    roots: Option<Vec<Complex64>>,
}

impl RealPolynomial {
    pub fn from_coeffs(mut coeffs: Vec<f64>) -> Result<Self> {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::Empty("polynomial coefficients"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        if coeffs.len() == 1 && coeffs[0] == 0.0 {
            return Err(Error::InvalidArgument("zero polynomial".into()));
        }
        Ok(Self { coeffs, roots: None })
    }

    pub fn constant(c: f64) -> Self {
        Self::from_coeffs(vec![c]).expect("nonzero constant")
    }

    /// Builds `leading * prod (x - r)`; non-real roots must come in conjugate pairs.
    pub fn from_roots(leading: f64, roots: Vec<Complex64>) -> Result<Self> {
        if leading == 0.0 || !leading.is_finite() {
            return Err(Error::InvalidArgument("leading coefficient must be nonzero".into()));
        }
        if !conjugate_closed(&roots) {
            return Err(Error::InvalidArgument(
                "roots of a real polynomial must be closed under conjugation".into(),
            ));
        }
        let mut c = vec![Complex64::new(leading, 0.0)];
        for r in &roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        let coeffs = c.iter().map(|z| z.re).collect();
        Ok(Self {
            coeffs,
            roots: Some(roots),
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn known_roots(&self) -> Option<&[Complex64]> {
        self.roots.as_deref()
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.roots {
            Some(roots) => {
                let mut acc = Complex64::new(self.leading(), 0.0);
                for r in roots {
                    acc *= x - r;
                }
                acc.re
            }
            None => self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        match &self.roots {
            Some(roots) => roots
                .iter()
                .fold(Complex64::new(self.leading(), 0.0), |acc, r| acc * (z - r)),
            None => self
                .coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c),
        }
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self {
                coeffs: vec![0.0],
                roots: None,
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        Self { coeffs, roots: None }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let roots = match (&self.roots, &other.roots) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        Self { coeffs: out, roots }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            roots: self.roots.clone(),
        }
    }

    /// `self - c`, dropping the root cache.
    pub fn shift(&self, c: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] -= c;
        Self { coeffs, roots: None }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![0.0; n];
        for (k, v) in self.coeffs.iter().enumerate() {
            c[k] += v;
        }
        for (k, v) in other.coeffs.iter().enumerate() {
            c[k] -= v;
        }
        Self::from_coeffs(c)
    }

    /// All complex roots, from the cache or from companion-matrix eigenvalues
    /// followed by a few Newton steps on the monomial form.
    pub fn roots(&self) -> Vec<Complex64> {
        if let Some(r) = &self.roots {
            return r.clone();
        }
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let mut comp = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            comp[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        let eig = comp.complex_eigenvalues();
        let d = self.derivative();
        let mut roots: Vec<Complex64> = eig
            .iter()
            .map(|z| {
                let mut z = Complex64::new(z.re, z.im);
                for _ in 0..3 {
                    let p = self.eval_complex_monomial(z);
                    let dp = d.eval_complex_monomial(z);
                    if dp.norm() == 0.0 {
                        break;
                    }
                    let step = p / dp;
                    if !step.re.is_finite() || !step.im.is_finite() {
                        break;
                    }
                    z -= step;
                }
                z
            })
            .collect();
        // Snap nearly-real roots onto the axis so the set stays conjugate-closed.
        for z in roots.iter_mut() {
            if z.im.abs() <= 1e-12 * (1.0 + z.re.abs()) {
                z.im = 0.0;
            }
        }
        roots
    }

    fn eval_complex_monomial(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Fujiwara bound on the moduli of the roots.
    pub fn root_bound(&self) -> f64 {
        let n = self.degree();
        if n == 0 {
            return 0.0;
        }
        let lead = self.leading().abs();
        let mut best: f64 = 0.0;
        for k in 1..=n {
            let mut a = self.coeffs[n - k].abs() / lead;
            if k == n {
                a *= 0.5;
            }
            best = best.max(a.powf(1.0 / k as f64));
        }
        2.0 * best
    }
}

pub(crate) fn conjugate_closed(roots: &[Complex64]) -> bool {
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let r = roots[i];
        let scale = 1.0 + r.norm();
        if r.im.abs() <= CONJ_TOL * scale {
            used[i] = true;
            continue;
        }
        let partner = (0..roots.len())
            .find(|&j| j != i && !used[j] && (roots[j] - r.conj()).norm() <= CONJ_TOL * scale);
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => return false,
        }
    }
    true
}

/// `c * prod (z - a_j) / prod (z - b_j)` with explicit zeros and poles.
///
/// The zeros and poles may be arbitrary complex numbers; the function is real
/// on the real line exactly when both lists are closed under conjugation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    pub c: f64,
    #[serde(default)]
    pub zeros: Vec<Complex64>,
    #[serde(default)]
    pub poles: Vec<Complex64>,
}

impl RationalFunction {
    /// Builds the function and cancels coincident zero/pole pairs.
    pub fn new(c: f64, zeros: Vec<Complex64>, poles: Vec<Complex64>) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::InvalidArgument("rational scale must be nonzero".into()));
        }
        let mut zeros = zeros;
        let mut poles_left = Vec::with_capacity(poles.len());
        for p in poles {
            let hit = zeros
                .iter()
                .position(|z| (z - p).norm() <= 1e-12 * (1.0 + p.norm()));
            match hit {
                Some(k) => {
                    zeros.swap_remove(k);
                }
                None => poles_left.push(p),
            }
        }
        Ok(Self {
            c,
            zeros,
            poles: poles_left,
        })
    }

    pub fn polynomial(c: f64, zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(c, zeros, Vec::new())
    }

    pub fn from_polynomials(num: &RealPolynomial, den: &RealPolynomial) -> Result<Self> {
        Self::new(num.leading() / den.leading(), num.roots(), den.roots())
    }

    pub fn real_zeros_poles(c: f64, zeros: &[f64], poles: &[f64]) -> Result<Self> {
        Self::new(
            c,
            zeros.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            poles.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn d0(&self) -> usize {
        self.zeros.len()
    }

    pub fn d1(&self) -> usize {
        self.poles.len()
    }

    /// `d1 - d0`: the order of the zero at infinity (negative for a pole).
    pub fn decay_order(&self) -> i64 {
        self.d1() as i64 - self.d0() as i64
    }

    pub fn is_real(&self) -> bool {
        conjugate_closed(&self.zeros) && conjugate_closed(&self.poles)
    }

    pub fn numerator(&self) -> Result<RealPolynomial> {
        RealPolynomial::from_roots(1.0, self.zeros.clone())
    }

    pub fn denominator(&self) -> Result<RealPolynomial> {
        RealPolynomial::from_roots(1.0, self.poles.clone())
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let num = self
            .zeros
            .iter()
            .fold(Complex64::new(self.c, 0.0), |acc, a| acc * (z - a));
        self.poles.iter().fold(num, |acc, b| acc / (z - b))
    }

    /// Real value on the real axis (meaningful when `is_real`).
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_complex(Complex64::new(x, 0.0)).re
    }

    /// `|R(x)|` computed in log form, valid for any complex zeros and poles.
    pub fn log_abs(&self, x: f64) -> f64 {
        let mut s = self.c.abs().ln();
        for a in &self.zeros {
            s += (x - a.re).hypot(a.im).ln();
        }
        for b in &self.poles {
            s -= (x - b.re).hypot(b.im).ln();
        }
        s
    }

    pub fn abs_eval(&self, x: f64) -> f64 {
        self.log_abs(x).exp()
    }
}
