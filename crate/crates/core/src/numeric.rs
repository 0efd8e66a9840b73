//! Numeric oracles: quadrature of actions, finite-difference first
//! variations, and on-section evaluation of source forms.
//!
//! Everything here is restricted to floating point evaluation of the
//! symbolic objects; it shares no differentiation code with the symbolic
//! Euler-Lagrange path apart from prolonging sections.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{Expr, Rational};
use crate::jet::{prolong_section_to, Coord, JetContext, SectionSpec};
use crate::variational::{euler_lagrange, Lagrangian, SourceForm, VariationalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("coordinate {0} is unbound")]
    UnboundCoordinate(String),
    #[error("numeric oracles need a one-dimensional base (n = 1), got n = {0}")]
    NotOneDimensional(usize),
    #[error("invalid quadrature settings: {0}")]
    InvalidQuadrature(String),
    #[error("variation does not vanish at the boundary: derivative {derivative} at x = {at} is {value}")]
    BoundaryNotVanishing { derivative: usize, at: f64, value: f64 },
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { got: usize, expected: usize },
    #[error(transparent)]
    Variational(#[from] VariationalError),
}

/// Gauss-Legendre quadrature on `[0, 1]` plus a central-difference step.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    nodes: usize,
    step: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes: 32, step: 1e-4 }
    }
}

impl QuadratureSpec {
    pub fn new(nodes: usize, step: f64) -> Result<Self, NumericError> {
        if nodes < 2 {
            return Err(NumericError::InvalidQuadrature("node count must be at least 2".into()));
        }
        if step.is_nan() || step <= 0.0 {
            return Err(NumericError::InvalidQuadrature("step must be positive".into()));
        }
        Ok(QuadratureSpec { nodes, step })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Nodes and weights on `[0, 1]`, in ascending node order.
    pub fn rule(&self) -> Vec<(f64, f64)> {
        gauss_legendre_unit(self.nodes)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        // fixed left-to-right summation
        self.rule().into_iter().fold(0.0, |acc, (x, w)| acc + w * f(x))
    }
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`, by Newton iteration
/// on the Legendre polynomial.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Floating-point evaluation with every coordinate of `e` bound.
pub fn eval_expr_at(e: &Expr, bindings: &BTreeMap<Coord, f64>) -> Result<f64, NumericError> {
    e.eval_f64(&|c| bindings.get(c).copied()).map_err(|c| NumericError::UnboundCoordinate(c.default_name()))
}

fn require_1d(ctx: &JetContext) -> Result<(), NumericError> {
    if ctx.n() != 1 {
        return Err(NumericError::NotOneDimensional(ctx.n()));
    }
    Ok(())
}

/// `e ∘ j^order γ` as an expression in `x1` alone.
fn along_section(e: &Expr, section: &SectionSpec, n: usize, order: usize) -> Result<Expr, NumericError> {
    let bindings = prolong_section_to(section, n, order);
    e.substitute(&bindings).map_err(|err| NumericError::Variational(err.into()))
}

fn integrate_over_x(e: &Expr, q: &QuadratureSpec) -> Result<f64, NumericError> {
    let mut total = 0.0;
    for (x, w) in q.rule() {
        let v = e
            .eval_f64(&|c| matches!(c, Coord::Base(1)).then_some(x))
            .map_err(|c| NumericError::UnboundCoordinate(c.default_name()))?;
        total += w * v;
    }
    Ok(total)
}

/// `∫_0^1 L(j^r γ) dx` by Gauss-Legendre quadrature.
pub fn action(lagrangian: &Lagrangian, section: &SectionSpec, q: &QuadratureSpec) -> Result<f64, NumericError> {
    require_1d(lagrangian.ctx())?;
    let integrand = along_section(lagrangian.density(), section, 1, lagrangian.order())?;
    integrate_over_x(&integrand, q)
}

/// A base section together with a variation direction that vanishes, with
/// its derivatives through order `r`, at both ends of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationProbe {
    section: SectionSpec,
    direction: SectionSpec,
}

impl VariationProbe {
    pub fn new(section: SectionSpec, direction: SectionSpec, r: usize) -> Result<Self, NumericError> {
        let values = prolong_section_to(&direction, 1, r);
        for (c, v) in &values {
            for at in [0.0, 1.0] {
                let value = v
                    .eval_f64(&|c| matches!(c, Coord::Base(1)).then_some(at))
                    .map_err(|c| NumericError::UnboundCoordinate(c.default_name()))?;
                if value.abs() > 1e-12 {
                    return Err(NumericError::BoundaryNotVanishing { derivative: c.jet_order(), at, value });
                }
            }
        }
        Ok(VariationProbe { section, direction })
    }

    pub fn section(&self) -> &SectionSpec {
        &self.section
    }

    pub fn direction(&self) -> &SectionSpec {
        &self.direction
    }

    /// `γ + s φ` for an exact rational `s`.
    fn shifted(&self, s: &Rational) -> SectionSpec {
        let comps =
            self.section.components().iter().zip(self.direction.components()).map(|(f, p)| f + &p.scale(s)).collect();
        SectionSpec::from_components_unchecked(comps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstVariation {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub richardson: bool,
}

impl FirstVariation {
    pub fn relative_error(&self) -> f64 {
        self.abs_diff / self.lhs.abs().max(1e-12)
    }
}

fn rational_from_f64(v: f64) -> Rational {
    Rational::from_float(v).unwrap_or_else(|| Rational::from_integer(BigInt::one()))
}

/// Compares the central difference of `s ↦ action(γ + s φ)` at `s = 0` with
/// `∫ Σ_σ E_σ(L)(j^{2r} γ) φ^σ dx`. When the plain difference disagrees with
/// the integral beyond `tolerance` (relative), a Richardson extrapolation
/// over steps `h` and `h/2` is used instead.
pub fn first_variation_check(
    lagrangian: &Lagrangian,
    probe: &VariationProbe,
    q: &QuadratureSpec,
    tolerance: f64,
) -> Result<FirstVariation, NumericError> {
    require_1d(lagrangian.ctx())?;
    let central = |h: f64| -> Result<f64, NumericError> {
        let hq = rational_from_f64(h);
        let plus = action(lagrangian, &probe.shifted(&hq), q)?;
        let minus = action(lagrangian, &probe.shifted(&-hq.clone()), q)?;
        Ok((plus - minus) / (2.0 * h))
    };
    let el = euler_lagrange(lagrangian)?;
    let mut integrand = Expr::zero();
    for (eps, phi) in el.components().iter().zip(probe.direction.components()) {
        integrand = &integrand + &(eps * phi);
    }
    let integrand = along_section(&integrand, &probe.section, 1, el.order())?;
    let rhs = integrate_over_x(&integrand, q)?;

    let h = q.step();
    let mut lhs = central(h)?;
    let mut richardson = false;
    if (lhs - rhs).abs() > tolerance * lhs.abs().max(1e-12) {
        let half = central(h / 2.0)?;
        lhs = (4.0 * half - lhs) / 3.0;
        richardson = true;
    }
    Ok(FirstVariation { lhs, rhs, abs_diff: (lhs - rhs).abs(), richardson })
}

/// Values of `ε_σ ∘ j^s γ` at each base point.
pub fn residual_on_section(
    source: &SourceForm,
    section: &SectionSpec,
    points: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, NumericError> {
    let n = source.ctx().n();
    let along: Vec<Expr> =
        source.components().iter().map(|e| along_section(e, section, n, source.order())).collect::<Result<_, _>>()?;
    points
        .iter()
        .map(|p| {
            if p.len() != n {
                return Err(NumericError::PointDimension { got: p.len(), expected: n });
            }
            let bindings: BTreeMap<Coord, f64> = p.iter().enumerate().map(|(i, v)| (Coord::Base(i + 1), *v)).collect();
            along.iter().map(|e| eval_expr_at(e, &bindings)).collect()
        })
        .collect()
}
