//! Python bindings: `import jetvar`.

use ::jetvar as core;
use core::forms::{self, FormsError};
use core::numeric::{self, QuadratureSpec, VariationProbe};
use core::parse::{parse_expr, parse_form_term};
use core::variational::{self as var, Lagrangian, SourceForm};
use core::{DiffForm, Expr, JetContext, SectionSpec};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(jetvar, JetvarError, PyValueError);

fn err(e: impl std::fmt::Display) -> PyErr {
    JetvarError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

/// Jet space coordinates: `n` base variables, `m` fields, prolongation `order`.
#[pyclass(name = "JetContext", module = "jetvar", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyJetContext {
    inner: JetContext,
}

#[pymethods]
impl PyJetContext {
    #[new]
    #[pyo3(signature = (order, base=None, fields=None, n=1, m=1))]
    fn new(order: usize, base: Option<Vec<String>>, fields: Option<Vec<String>>, n: usize, m: usize) -> PyResult<Self> {
        let inner = match (base, fields) {
            (None, None) => JetContext::new(n, m, order),
            (base, fields) => {
                let defaults =
                    JetContext::new(base.as_ref().map_or(n, Vec::len), fields.as_ref().map_or(m, Vec::len), 0)
                        .map_err(err)?;
                JetContext::with_names(
                    order,
                    base.unwrap_or_else(|| defaults.base_names().to_vec()),
                    fields.unwrap_or_else(|| defaults.field_names().to_vec()),
                )
            }
        }
        .map_err(err)?;
        Ok(PyJetContext { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn base(&self) -> Vec<String> {
        self.inner.base_names().to_vec()
    }

    #[getter]
    fn fields(&self) -> Vec<String> {
        self.inner.field_names().to_vec()
    }

    /// Parses an expression in this context.
    fn parse(&self, text: &str) -> PyResult<PyExpr> {
        let parsed = parse_expr(text, &self.inner).map_err(err)?;
        Ok(PyExpr { expr: parsed.expr, ctx: self.inner.clone() })
    }

    fn __repr__(&self) -> String {
        format!(
            "JetContext(order={}, base={:?}, fields={:?})",
            self.inner.order(),
            self.inner.base_names(),
            self.inner.field_names()
        )
    }
}

/// Canonical expression with exact rational coefficients.
#[pyclass(name = "Expr", module = "jetvar", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyExpr {
    expr: Expr,
    ctx: JetContext,
}

#[derive(FromPyObject)]
enum Operand {
    Expr(PyExpr),
    Int(i64),
}

impl Operand {
    fn into_expr(self) -> Expr {
        match self {
            Operand::Expr(e) => e.expr,
            Operand::Int(i) => Expr::integer(i),
        }
    }
}

impl PyExpr {
    fn wrap(&self, expr: Expr) -> PyExpr {
        PyExpr { expr, ctx: self.ctx.clone() }
    }
}

#[pymethods]
impl PyExpr {
    fn __str__(&self) -> String {
        self.ctx.render(&self.expr)
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?})", self.ctx.render(&self.expr))
    }

    fn __eq__(&self, other: Operand) -> bool {
        self.expr == other.into_expr()
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.ctx.render(&self.expr).hash(&mut h);
        h.finish()
    }

    fn __add__(&self, other: Operand) -> PyExpr {
        self.wrap(&self.expr + &other.into_expr())
    }

    fn __radd__(&self, other: Operand) -> PyExpr {
        self.wrap(&other.into_expr() + &self.expr)
    }

    fn __sub__(&self, other: Operand) -> PyExpr {
        self.wrap(&self.expr - &other.into_expr())
    }

    fn __rsub__(&self, other: Operand) -> PyExpr {
        self.wrap(&other.into_expr() - &self.expr)
    }

    fn __mul__(&self, other: Operand) -> PyExpr {
        self.wrap(&self.expr * &other.into_expr())
    }

    fn __rmul__(&self, other: Operand) -> PyExpr {
        self.wrap(&other.into_expr() * &self.expr)
    }

    fn __neg__(&self) -> PyExpr {
        self.wrap(-&self.expr)
    }

    fn __pow__(&self, k: i32, _modulo: Option<i64>) -> PyResult<PyExpr> {
        Ok(self.wrap(self.expr.pow(k).map_err(err)?))
    }

    fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }

    /// Total derivative along base direction `i` (1-based).
    fn total_derivative(&self, i: usize) -> PyResult<PyExpr> {
        Ok(self.wrap(core::jet::total_derivative(&self.expr, i, &self.ctx).map_err(err)?))
    }

    /// Partial derivative by the coordinate named in `name`, e.g. `"u_{1}"`.
    fn partial(&self, name: &str) -> PyResult<PyExpr> {
        let coord = parse_expr(name, &self.ctx).map_err(err)?.expr;
        let c = coord
            .coords()
            .into_iter()
            .next()
            .filter(|_| coord.term_count() == 1 && coord.coords().len() == 1)
            .ok_or_else(|| err(format!("{name:?} is not a single coordinate")))?;
        Ok(self.wrap(self.expr.partial(&c)))
    }
}

fn expr_in(ctx: &JetContext, value: &Bound<'_, PyAny>) -> PyResult<Expr> {
    if let Ok(e) = value.extract::<PyExpr>() {
        return Ok(e.expr);
    }
    let text: String = value.extract()?;
    Ok(parse_expr(&text, ctx).map_err(err)?.expr)
}

fn exprs_in(ctx: &JetContext, values: &Bound<'_, PyAny>) -> PyResult<Vec<Expr>> {
    values.try_iter()?.map(|v| expr_in(ctx, &v?)).collect()
}

fn lagrangian(ctx: &PyJetContext, density: &Bound<'_, PyAny>) -> PyResult<Lagrangian> {
    Lagrangian::new(expr_in(&ctx.inner, density)?, &ctx.inner).map_err(err)
}

fn source(ctx: &PyJetContext, components: &Bound<'_, PyAny>) -> PyResult<SourceForm> {
    SourceForm::new(exprs_in(&ctx.inner, components)?, &ctx.inner).map_err(err)
}

fn wrap_all(ctx: &JetContext, exprs: &[Expr]) -> Vec<PyExpr> {
    exprs.iter().map(|e| PyExpr { expr: e.clone(), ctx: ctx.clone() }).collect()
}

/// Euler-Lagrange expressions of the Lagrangian density (of the context's order).
#[pyfunction]
fn euler_lagrange(ctx: &PyJetContext, density: &Bound<'_, PyAny>) -> PyResult<Vec<PyExpr>> {
    let el = var::euler_lagrange(&lagrangian(ctx, density)?).map_err(err)?;
    Ok(wrap_all(el.ctx(), el.components()))
}

/// Generalized Helmholtz report for a source form, as a dict.
#[pyfunction]
#[pyo3(signature = (ctx, components, verbose=false, seed=None))]
fn helmholtz<'py>(
    py: Python<'py>,
    ctx: &PyJetContext,
    components: &Bound<'py, PyAny>,
    verbose: bool,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let src = source(ctx, components)?;
    let report = var::helmholtz_residuals_seeded(&src, seed.unwrap_or(var::DEFAULT_PROBE_SEED)).map_err(err)?;
    json_to_py(py, &report.to_json(&ctx.inner, verbose))
}

/// Classical Helmholtz report for second-order ODE systems, as a dict.
#[pyfunction]
#[pyo3(signature = (ctx, components, verbose=false))]
fn classical_helmholtz<'py>(
    py: Python<'py>,
    ctx: &PyJetContext,
    components: &Bound<'py, PyAny>,
    verbose: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let report = var::classical_helmholtz_ode(&source(ctx, components)?).map_err(err)?;
    json_to_py(py, &report.to_json(&ctx.inner, verbose))
}

/// Tonti Lagrangian of a source form; the input is not checked for variationality.
#[pyfunction]
fn tonti(ctx: &PyJetContext, components: &Bound<'_, PyAny>) -> PyResult<PyExpr> {
    let l = var::tonti_lagrangian(&source(ctx, components)?).map_err(err)?;
    Ok(PyExpr { expr: l.density().clone(), ctx: l.ctx().clone() })
}

/// Poincare-Cartan form, rendered as `(raw, contact)` strings.
#[pyfunction]
fn cartan_form(ctx: &PyJetContext, density: &Bound<'_, PyAny>) -> PyResult<(String, String)> {
    let l = lagrangian(ctx, density)?;
    match forms::cartan_form_contact(l.density(), l.order(), l.ctx()) {
        Ok(c) => Ok((c.to_raw(l.ctx()).render(l.ctx()), c.render(l.ctx()))),
        Err(FormsError::OrderZero) => {
            let r = l.to_form().render(l.ctx());
            Ok((r.clone(), r))
        }
        Err(e) => Err(err(e)),
    }
}

#[pyfunction]
fn is_null_lagrangian(ctx: &PyJetContext, density: &Bound<'_, PyAny>) -> PyResult<bool> {
    var::is_null_lagrangian(&lagrangian(ctx, density)?).map_err(err)
}

/// Null Lagrangian `h(dη)` for `η` given as form terms such as `"u | dx2"`.
#[pyfunction]
fn null_lagrangian_from_eta(ctx: &PyJetContext, terms: Vec<String>) -> PyResult<PyExpr> {
    let mut eta = DiffForm::zero(0);
    for t in &terms {
        let (form, _) = parse_form_term(t, &ctx.inner).map_err(err)?;
        eta = eta.add(&form);
    }
    let l = var::null_lagrangian_from_eta(&eta, &ctx.inner).map_err(err)?;
    Ok(PyExpr { expr: l.density().clone(), ctx: l.ctx().clone() })
}

/// Numeric first-variation check on `[0, 1]` for `n = 1`, as a dict.
#[pyfunction]
#[pyo3(signature = (ctx, density, section, direction, nodes=32, step=1e-4, tolerance=1e-6))]
#[allow(clippy::too_many_arguments)]
fn first_variation_check<'py>(
    py: Python<'py>,
    ctx: &PyJetContext,
    density: &Bound<'py, PyAny>,
    section: &Bound<'py, PyAny>,
    direction: &Bound<'py, PyAny>,
    nodes: usize,
    step: f64,
    tolerance: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let l = lagrangian(ctx, density)?;
    let gamma = SectionSpec::new(exprs_in(&ctx.inner, section)?, &ctx.inner).map_err(err)?;
    let phi = SectionSpec::new(exprs_in(&ctx.inner, direction)?, &ctx.inner).map_err(err)?;
    let probe = VariationProbe::new(gamma, phi, l.order()).map_err(err)?;
    let q = QuadratureSpec::new(nodes, step).map_err(err)?;
    let fv = numeric::first_variation_check(&l, &probe, &q, tolerance).map_err(err)?;
    let mut value = serde_json::to_value(&fv).map_err(err)?;
    value["relative_error"] = fv.relative_error().into();
    json_to_py(py, &value)
}

/// Runs a CLI subcommand on a problem file; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
#[pyo3(signature = (command, path, *flags))]
fn run(command: &str, path: &str, flags: Vec<String>) -> PyResult<(i32, String, String)> {
    let args = core::cli::Args::from_parts(command, path, &flags).map_err(err)?;
    Ok(core::cli::run(&args, core::cli::ceiling_from_env()))
}

#[pymodule(name = "jetvar")]
fn jetvar_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyJetContext>()?;
    m.add_class::<PyExpr>()?;
    m.add("JetvarError", m.py().get_type::<JetvarError>())?;
    m.add_function(wrap_pyfunction!(euler_lagrange, m)?)?;
    m.add_function(wrap_pyfunction!(helmholtz, m)?)?;
    m.add_function(wrap_pyfunction!(classical_helmholtz, m)?)?;
    m.add_function(wrap_pyfunction!(tonti, m)?)?;
    m.add_function(wrap_pyfunction!(cartan_form, m)?)?;
    m.add_function(wrap_pyfunction!(is_null_lagrangian, m)?)?;
    m.add_function(wrap_pyfunction!(null_lagrangian_from_eta, m)?)?;
    m.add_function(wrap_pyfunction!(first_variation_check, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
