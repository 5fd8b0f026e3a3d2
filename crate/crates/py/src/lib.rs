//! Python bindings: exposes the q-combinatorics primitives, group/class
//! tables, centre products, and the interpolation engine. Reports with
//! nested structure come back as JSON strings.

use num::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use stable_centres::cli::{cmd_classes, cmd_interpolate, cmd_multiply, RunConfig};
use stable_centres::groups::GroupCtx;
use stable_centres::qcombinat::{self, QValue};
use stable_centres::types::{label_parse, Family};
use stable_centres::Error;

fn err_py(e: Error) -> PyErr {
    match e {
        Error::ParseError { .. } | Error::UnknownLabel(_) | Error::InvalidInput(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn family_of(tag: &str) -> PyResult<Family> {
    Family::from_tag(tag).map_err(err_py)
}

/// The q-integer 1 + q + ... + q^(n-1).
#[pyfunction]
fn q_int(n: u64, q: i64) -> PyResult<BigInt> {
    let qv = QValue::new(q).map_err(err_py)?;
    Ok(qcombinat::q_int_z(n, qv))
}

/// Gaussian binomial coefficient at base q (q may be negative).
#[pyfunction]
fn q_binomial(n: u64, k: u64, q: i64) -> PyResult<BigInt> {
    let qv = QValue::new(q).map_err(err_py)?;
    qcombinat::q_binomial(n, k, qv).map_err(err_py)
}

/// Coefficients (constant term first) of the Gaussian binomial as a
/// polynomial in q.
#[pyfunction]
fn gauss_poly_coeffs(n: u64, k: u64) -> PyResult<Vec<BigInt>> {
    let p = qcombinat::gauss_poly(n, k).map_err(err_py)?;
    Ok(p.coeffs().iter().map(|c| c.to_integer()).collect())
}

/// Exact-arithmetic engine over shared group/class tables.
#[pyclass]
struct Engine {
    cfg: RunConfig,
    ctx: GroupCtx,
}

#[pymethods]
impl Engine {
    #[new]
    #[pyo3(signature = (cache_dir=None, limit=stable_centres::groups::DEFAULT_LIMIT))]
    fn new(cache_dir: Option<String>, limit: u64) -> Self {
        let cfg = RunConfig {
            cache_dir: cache_dir.map(Into::into),
            limit,
            ..RunConfig::default()
        };
        let ctx = cfg.ctx();
        Engine { cfg, ctx }
    }

    /// Enumerated order of the group.
    fn group_order(&self, family: &str, q: u64, n: usize) -> PyResult<u64> {
        let fam = family_of(family)?;
        Ok(self.ctx.group(fam, q, n).map_err(err_py)?.order() as u64)
    }

    /// Conjugacy classes as dicts: label, size, centralizer, types.
    fn classes(
        &self,
        py: Python<'_>,
        family: &str,
        q: u64,
        n: usize,
    ) -> PyResult<Vec<Py<pyo3::types::PyDict>>> {
        let fam = family_of(family)?;
        let report = cmd_classes(&self.cfg, fam, q, n).map_err(err_py)?;
        report
            .rows
            .iter()
            .map(|r| {
                let d = pyo3::types::PyDict::new(py);
                d.set_item("label", &r.label)?;
                d.set_item("size", r.size)?;
                d.set_item("centralizer", r.centralizer)?;
                d.set_item("gl_type", &r.gl_type)?;
                d.set_item("modified_type", &r.modified_type)?;
                Ok(d.unbind())
            })
            .collect()
    }

    /// Product expansion X_mu X_nu at rank n: {lambda label: coefficient}.
    fn multiply(
        &self,
        py: Python<'_>,
        family: &str,
        q: u64,
        n: usize,
        mu: &str,
        nu: &str,
    ) -> PyResult<Py<pyo3::types::PyDict>> {
        let fam = family_of(family)?;
        let exp = cmd_multiply(&self.cfg, fam, q, n, mu, nu).map_err(err_py)?;
        let d = pyo3::types::PyDict::new(py);
        for t in &exp.terms {
            let c: BigInt = t.coeff.parse().expect("decimal coefficient");
            d.set_item(&t.lambda, c)?;
        }
        Ok(d.unbind())
    }

    /// One structure constant a_{mu nu}^lambda(n).
    fn structure_constant(&self, mu: &str, nu: &str, lam: &str, n: usize) -> PyResult<BigInt> {
        let mu = label_parse(mu).map_err(err_py)?;
        let nu = label_parse(nu).map_err(err_py)?;
        let lam = label_parse(lam).map_err(err_py)?;
        stable_centres::classalg::structure_constant(&self.ctx, &mu, &nu, &lam, n)
            .map_err(err_py)
    }

    /// Polynomial fits of all structure constants of X_mu X_nu, as a JSON
    /// report (one fit per lambda, with degree bounds and holdout checks).
    #[pyo3(signature = (family, q, mu, nu, fit_ranks, holdout=vec![]))]
    fn interpolate(
        &self,
        family: &str,
        q: u64,
        mu: &str,
        nu: &str,
        fit_ranks: Vec<usize>,
        holdout: Vec<usize>,
    ) -> PyResult<String> {
        let fam = family_of(family)?;
        let report =
            cmd_interpolate(&self.cfg, fam, q, mu, nu, None, &fit_ranks, &holdout)
                .map_err(err_py)?;
        serde_json::to_string_pretty(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Runs a verification suite; returns the JSON report string.
    fn verify(&self, suite: &str) -> PyResult<String> {
        let report = stable_centres::cli::cmd_verify(&self.cfg, suite).map_err(err_py)?;
        serde_json::to_string_pretty(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

#[pymodule]
fn stable_centres_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(q_int, m)?)?;
    m.add_function(wrap_pyfunction!(q_binomial, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_poly_coeffs, m)?)?;
    m.add_class::<Engine>()?;
    Ok(())
}
