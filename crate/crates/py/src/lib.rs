//! Python bindings. Weights and configs cross the boundary as JSON strings
//! in the same schema the CLI reads.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use widomlab::cantor::{self, GammaSequence};
use widomlab::chebyshev::{bound_audit, weighted_chebyshev};
use widomlab::harness::{self, ExperimentConfig};
use widomlab::orthopoly::{discretize, l2_bound_audit, stieltjes};
use widomlab::potential::EquilibriumMeasure;
use widomlab::realsets::RealCompactSet;
use widomlab::weights::{szego_factor, WeightExpr};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn weight(json: Option<&str>) -> PyResult<WeightExpr> {
    match json {
        None => Ok(WeightExpr::one()),
        Some(s) => serde_json::from_str(s).map_err(err),
    }
}

/// Equilibrium measure of a finite union of disjoint closed intervals.
#[pyclass(name = "BandSet", frozen)]
struct PyBandSet {
    m: EquilibriumMeasure,
}

#[pymethods]
impl PyBandSet {
    #[new]
    fn new(bands: Vec<(f64, f64)>) -> PyResult<Self> {
        let k = RealCompactSet::from_pairs(&bands).map_err(err)?;
        Ok(Self {
            m: EquilibriumMeasure::new(&k).map_err(err)?,
        })
    }

    #[staticmethod]
    fn cantor_level(gamma: f64, s: usize) -> PyResult<Self> {
        let g = GammaSequence::constant(gamma).map_err(err)?;
        let it = cantor::iterate(&g, s).map_err(err)?;
        Ok(Self {
            m: EquilibriumMeasure::new(&it.bands).map_err(err)?,
        })
    }

    fn bands(&self) -> Vec<(f64, f64)> {
        self.m.set().bands().iter().map(|b| (b.lo, b.hi)).collect()
    }

    fn capacity(&self) -> f64 {
        self.m.capacity()
    }

    fn log_capacity(&self) -> f64 {
        self.m.log_capacity()
    }

    fn gap_roots(&self) -> Vec<f64> {
        self.m.gap_roots().to_vec()
    }

    fn band_masses(&self) -> Vec<f64> {
        self.m.band_masses()
    }

    fn density(&self, x: f64) -> f64 {
        self.m.density(x)
    }

    #[pyo3(signature = (re, im = 0.0))]
    fn green(&self, re: f64, im: f64) -> PyResult<f64> {
        self.m.green(Complex64::new(re, im)).map_err(err)
    }

    /// `S(K, w)`; `weight` is a JSON weight expression, constant 1 if omitted.
    #[pyo3(signature = (weight_json = None))]
    fn szego(&self, weight_json: Option<&str>) -> PyResult<f64> {
        Ok(szego_factor(&self.m, &weight(weight_json)?, 1e-12).map_err(err)?.value)
    }

    /// Certified bracket `(lo, hi)` on the sup-norm Widom factor.
    #[pyo3(signature = (n, weight_json = None, tol = 1e-10))]
    fn widom_infty(&self, n: usize, weight_json: Option<&str>, tol: f64) -> PyResult<(f64, f64)> {
        let w = weight(weight_json)?;
        w.validate(self.m.set()).map_err(err)?;
        let r = weighted_chebyshev(&self.m, &w, n, tol).map_err(err)?;
        let (lo, hi) = r.log_widom(self.m.log_capacity());
        Ok((lo.exp(), hi.exp()))
    }

    /// Monic Chebyshev coefficients in the monomial basis, lowest first.
    #[pyo3(signature = (n, weight_json = None, tol = 1e-10))]
    fn chebyshev_polynomial(&self, n: usize, weight_json: Option<&str>, tol: f64) -> PyResult<Vec<f64>> {
        let w = weight(weight_json)?;
        let r = weighted_chebyshev(&self.m, &w, n, tol).map_err(err)?;
        let p = r.normalized_polynomial();
        let lead = p.leading();
        Ok(p.coeffs().iter().map(|c| c / lead).collect())
    }

    /// `[W_{2,k}]^2` for `k = 0..=n`.
    #[pyo3(signature = (n, weight_json = None))]
    fn widom_2_squared(&self, n: usize, weight_json: Option<&str>) -> PyResult<Vec<f64>> {
        let w = weight(weight_json)?;
        let sm = discretize(&self.m, &w, (8 * n).max(512)).map_err(err)?;
        let t = stieltjes(&sm, n).map_err(err)?;
        Ok((0..=n).map(|k| t.log_widom_2_sq(k, self.m.log_capacity()).exp()).collect())
    }

    /// Recurrence coefficients `(alpha, beta)` up to degree `n`.
    #[pyo3(signature = (n, weight_json = None))]
    fn recurrence(&self, n: usize, weight_json: Option<&str>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let w = weight(weight_json)?;
        let sm = discretize(&self.m, &w, (8 * n).max(512)).map_err(err)?;
        let t = stieltjes(&sm, n).map_err(err)?;
        Ok((t.alpha, t.beta))
    }

    /// All sup-norm and L2 bound reports at degree `n`, as a JSON list.
    #[pyo3(signature = (n, weight_json = None, tol = 1e-10))]
    fn bound_audit(&self, n: usize, weight_json: Option<&str>, tol: f64) -> PyResult<String> {
        let w = weight(weight_json)?;
        w.validate(self.m.set()).map_err(err)?;
        let mut reps = bound_audit(&self.m, &w, n, tol).map_err(err)?;
        reps.extend(l2_bound_audit(&self.m, &w, n).map_err(err)?);
        serde_json::to_string(&reps).map_err(err)
    }
}

/// Exact `(W_inf, W_2)` at degree `2^n` on the Cantor set with constant `gamma`.
#[pyfunction]
fn cantor_widom_exact(gamma: f64, n: usize) -> PyResult<(f64, f64)> {
    let g = GammaSequence::constant(gamma).map_err(err)?;
    Ok((
        cantor::widom_infty_exact(&g, n).map_err(err)?,
        cantor::widom_2_exact(&g, n).map_err(err)?,
    ))
}

/// Capacity of the Cantor set with constant `gamma`.
#[pyfunction]
fn cantor_capacity(gamma: f64) -> PyResult<f64> {
    let g = GammaSequence::constant(gamma).map_err(err)?;
    Ok(cantor::capacity_limit(&g).map_err(err)?.0)
}

/// Runs an experiment config (JSON) into `out_dir`; returns the report JSON.
#[pyfunction]
fn run_experiment(config_json: &str, out_dir: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::from_json(config_json.as_bytes()).map_err(err)?;
    let report = harness::run(&cfg, Some(std::path::Path::new(out_dir))).map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}

#[pymodule]
fn widomlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBandSet>()?;
    m.add_function(wrap_pyfunction!(cantor_widom_exact, m)?)?;
    m.add_function(wrap_pyfunction!(cantor_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
