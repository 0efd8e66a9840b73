//! Euler-Lagrange operator, Helmholtz conditions and the inverse problem.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::expr::{Bindings, Expr, ExprError, Rational};
use crate::forms::{self, DiffForm, FiberedIso, FormsError};
use crate::jet::{binomial, iterated_total_derivative, total_derivative, Coord, JetContext, JetError, MultiIndex};

/// Seed for the numeric probe that separates nonzero transcendental residuals.
pub const DEFAULT_PROBE_SEED: u64 = 0x5eed_1981;
const PROBE_POINTS: usize = 20;
const PROBE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VariationalError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error("expression has jet order {found}, above the declared order {declared}")]
    OrderExceeded { found: usize, declared: usize },
    #[error("the parameter t may not occur in {0}")]
    ParameterPresent(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected a form of degree {expected}")]
    DegreeMismatch { expected: usize },
    #[error("classical Helmholtz conditions need n = 1 and order <= 2 (got n = {n}, order {order})")]
    NotOdeContext { n: usize, order: usize },
    #[error("Lagrangians live on different contexts")]
    ContextMismatch,
}

fn check_expr(e: &Expr, ctx: &JetContext, declared: usize, what: &'static str) -> Result<(), VariationalError> {
    ctx.validate_expr(e)?;
    if e.contains(&Coord::Param) {
        return Err(VariationalError::ParameterPresent(what));
    }
    match e.jet_order() {
        Some(found) if found > declared => Err(VariationalError::OrderExceeded { found, declared }),
        _ => Ok(()),
    }
}

/// `λ = L ω_0` of declared order `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lagrangian {
    density: Expr,
    ctx: JetContext,
    order: usize,
}

impl Lagrangian {
    /// Lagrangian of the context's declared order.
    pub fn new(density: Expr, ctx: &JetContext) -> Result<Self, VariationalError> {
        Lagrangian::with_order(density, ctx, ctx.order())
    }

    pub fn with_order(density: Expr, ctx: &JetContext, order: usize) -> Result<Self, VariationalError> {
        check_expr(&density, ctx, order, "a Lagrangian")?;
        Ok(Lagrangian { density, ctx: ctx.with_order(order), order })
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }

    pub fn ctx(&self) -> &JetContext {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `L ω_0` as a form on the jet space of order `r`.
    pub fn to_form(&self) -> DiffForm {
        forms::omega0(&self.ctx, self.order).scale(&self.density)
    }

    pub fn scale(&self, q: &Rational) -> Lagrangian {
        Lagrangian { density: self.density.scale(q), ..self.clone() }
    }

    fn combine(&self, other: &Lagrangian, f: impl Fn(&Expr, &Expr) -> Expr) -> Result<Lagrangian, VariationalError> {
        if self.ctx.n() != other.ctx.n() || self.ctx.m() != other.ctx.m() {
            return Err(VariationalError::ContextMismatch);
        }
        let order = self.order.max(other.order);
        Ok(Lagrangian { density: f(&self.density, &other.density), ctx: self.ctx.with_order(order), order })
    }

    pub fn add(&self, other: &Lagrangian) -> Result<Lagrangian, VariationalError> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Lagrangian) -> Result<Lagrangian, VariationalError> {
        self.combine(other, |a, b| a - b)
    }
}

/// `ε = ε_σ ω^σ ∧ ω_0` of declared order `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceForm {
    components: Vec<Expr>,
    ctx: JetContext,
    order: usize,
}

impl SourceForm {
    pub fn new(components: Vec<Expr>, ctx: &JetContext) -> Result<Self, VariationalError> {
        SourceForm::with_order(components, ctx, ctx.order())
    }

    pub fn with_order(components: Vec<Expr>, ctx: &JetContext, order: usize) -> Result<Self, VariationalError> {
        if components.len() != ctx.m() {
            return Err(VariationalError::DimensionMismatch(format!(
                "{} source components for m = {}",
                components.len(),
                ctx.m()
            )));
        }
        for c in &components {
            check_expr(c, ctx, order, "a source form")?;
        }
        Ok(SourceForm { components, ctx: ctx.with_order(order), order })
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn ctx(&self) -> &JetContext {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    /// `Σ_σ ε_σ ω^σ ∧ ω_0`, which equals `Σ_σ ε_σ dy^σ ∧ ω_0`.
    pub fn to_form(&self) -> DiffForm {
        let omega0 = forms::omega0(&self.ctx, self.order);
        let mut out = DiffForm::zero(self.order);
        for (s, e) in self.components.iter().enumerate() {
            let term = forms::dy(s + 1, MultiIndex::empty(), self.order).wedge(&omega0);
            out = out.add(&term.scale(e));
        }
        out
    }
}

/// Euler-Lagrange expressions `E_σ(L) = Σ_J (-1)^{|J|} d_J ∂L/∂y^σ_J`,
/// declared on the jet space of order `2r`.
pub fn euler_lagrange(lagrangian: &Lagrangian) -> Result<SourceForm, VariationalError> {
    let ctx = &lagrangian.ctx;
    let l = &lagrangian.density;
    let coords = l.coords();
    let mut components = Vec::with_capacity(ctx.m());
    for sigma in 1..=ctx.m() {
        let mut e = Expr::zero();
        for c in &coords {
            let Coord::Jet { field, index } = c else { continue };
            if *field != sigma {
                continue;
            }
            let term = iterated_total_derivative(&l.partial(c), index, ctx)?;
            e = if index.len() % 2 == 0 { &e + &term } else { &e - &term };
        }
        components.push(e);
    }
    let order = 2 * lagrangian.order;
    Ok(SourceForm { components, ctx: ctx.with_order(order), order })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Variational,
    NotVariational,
    Undecided,
}

/// One Helmholtz residual, labelled by level, free multi-index and fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRecord {
    pub level: usize,
    pub index: MultiIndex,
    pub sigma: usize,
    pub nu: usize,
    pub residual: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HelmholtzReport {
    pub records: Vec<ResidualRecord>,
    pub verdict: Verdict,
    pub multiplier: Option<MultiplierMatrix>,
}

impl HelmholtzReport {
    fn from_records(records: Vec<ResidualRecord>, seed: u64) -> Self {
        let verdict = decide_verdict(&records, seed);
        HelmholtzReport { records, verdict, multiplier: None }
    }

    pub fn is_variational(&self) -> bool {
        self.verdict == Verdict::Variational
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &ResidualRecord> {
        self.records.iter().filter(|r| !r.residual.is_zero())
    }

    /// JSON form; zero residuals are omitted unless `verbose`.
    pub fn to_json(&self, ctx: &JetContext, verbose: bool) -> serde_json::Value {
        let residuals: Vec<serde_json::Value> = self
            .records
            .iter()
            .filter(|r| verbose || !r.residual.is_zero())
            .map(|r| {
                json!({
                    "level": r.level,
                    "multi_index": r.index.indices(),
                    "sigma": r.sigma,
                    "nu": r.nu,
                    "residual": ctx.render(&r.residual),
                })
            })
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("verdict".into(), serde_json::to_value(self.verdict).unwrap());
        obj.insert("residuals".into(), residuals.into());
        if let Some(a) = &self.multiplier {
            let rows: Vec<Vec<String>> = a.0.iter().map(|row| row.iter().map(|e| ctx.render(e)).collect()).collect();
            obj.insert("multiplier".into(), json!(rows));
        }
        serde_json::Value::Object(obj)
    }
}

fn decide_verdict(records: &[ResidualRecord], seed: u64) -> Verdict {
    let nonzero: Vec<&Expr> = records.iter().map(|r| &r.residual).filter(|e| !e.is_zero()).collect();
    if nonzero.is_empty() {
        return Verdict::Variational;
    }
    if nonzero.iter().any(|e| !e.has_opaque_atoms()) {
        return Verdict::NotVariational;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for e in nonzero {
        let coords: Vec<Coord> = e.coords().into_iter().collect();
        for _ in 0..PROBE_POINTS {
            let point: HashMap<Coord, f64> = coords
                .iter()
                .map(|c| {
                    let num: i32 = rng.random_range(-14..=14);
                    let den: i32 = rng.random_range(1..=7);
                    (c.clone(), num as f64 / den as f64)
                })
                .collect();
            if let Ok(v) = e.eval_f64(&|c| point.get(c).copied()) {
                if v.is_finite() && v.abs() > PROBE_THRESHOLD {
                    return Verdict::NotVariational;
                }
            }
        }
    }
    Verdict::Undecided
}

fn reciprocal_multiplicity(index: &MultiIndex) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(index.multiplicity()))
}

/// Memoized `d_K (∂ε_ν/∂y^σ_J / μ(J))`.
struct TupleDerivatives<'a> {
    source: &'a SourceForm,
    cache: HashMap<(usize, usize, MultiIndex, MultiIndex), Expr>,
}

impl<'a> TupleDerivatives<'a> {
    fn new(source: &'a SourceForm) -> Self {
        TupleDerivatives { source, cache: HashMap::new() }
    }

    fn get(&mut self, nu: usize, sigma: usize, target: &MultiIndex, k: &MultiIndex) -> Result<Expr, JetError> {
        let key = (nu, sigma, target.clone(), k.clone());
        if let Some(e) = self.cache.get(&key) {
            return Ok(e.clone());
        }
        let value = match k.indices().split_last() {
            None => self.source.components[nu - 1]
                .partial(&Coord::jet(sigma, target.clone()))
                .scale(&reciprocal_multiplicity(target)),
            Some((&last, rest)) => {
                let inner = self.get(nu, sigma, target, &MultiIndex::new(rest.iter().copied()))?;
                total_derivative(&inner, last as usize, &self.source.ctx)?
            }
        };
        self.cache.insert(key, value.clone());
        Ok(value)
    }
}

/// Residuals of the generalized Helmholtz conditions, one per level `l`,
/// sorted free multi-index `I` with `|I| = l`, and field pair `(σ, ν)`:
///
/// `∂_I ε_σ/∂y^ν − (−1)^l ∂_I ε_ν/∂y^σ − Σ_{k>l} (−1)^k C(k,l) Σ_K d_K ∂_{I K} ε_ν/∂y^σ`
///
/// where derivatives with respect to an ordered tuple are coordinate partials
/// divided by the multiplicity of the tuple, and `K` runs over ordered tuples.
/// Ordered tuples `K` with the same sorted form are grouped with weight `μ(K)`.
pub fn helmholtz_residuals(source: &SourceForm) -> Result<HelmholtzReport, VariationalError> {
    helmholtz_residuals_seeded(source, DEFAULT_PROBE_SEED)
}

pub fn helmholtz_residuals_seeded(source: &SourceForm, seed: u64) -> Result<HelmholtzReport, VariationalError> {
    let ctx = &source.ctx;
    let (n, m, r) = (ctx.n(), ctx.m(), source.order);
    let mut derivs = TupleDerivatives::new(source);
    let mut records = Vec::new();
    for l in 0..=r {
        for free in MultiIndex::all_of_length(n, l) {
            for sigma in 1..=m {
                for nu in 1..=m {
                    let mut residual = derivs.get(sigma, nu, &free, &MultiIndex::empty())?;
                    let mirrored = derivs.get(nu, sigma, &free, &MultiIndex::empty())?;
                    residual = if l % 2 == 0 { &residual - &mirrored } else { &residual + &mirrored };
                    for k in l + 1..=r {
                        let weight = binomial(k, l) as i64 * if k % 2 == 0 { 1 } else { -1 };
                        for rest in MultiIndex::all_of_length(n, k - l) {
                            let target = free.union(&rest);
                            let term = derivs.get(nu, sigma, &target, &rest)?;
                            if term.is_zero() {
                                continue;
                            }
                            let coef = Rational::from_integer(BigInt::from(weight * rest.multiplicity() as i64));
                            residual = &residual - &term.scale(&coef);
                        }
                    }
                    records.push(ResidualRecord { level: l, index: free.clone(), sigma, nu, residual });
                }
            }
        }
    }
    Ok(HelmholtzReport::from_records(records, seed))
}

/// The three classical Helmholtz condition families for second-order ODE
/// systems `G_i(t, q, q', q'') = 0`, reported as levels 0, 1, 2:
///
/// - level 0: `∂G_i/∂q_k − ∂G_k/∂q_i − ½ d/dt(∂G_i/∂q'_k − ∂G_k/∂q'_i)`
/// - level 1: `∂G_i/∂q'_k + ∂G_k/∂q'_i − d/dt(∂G_i/∂q''_k + ∂G_k/∂q''_i)`
/// - level 2: `∂G_i/∂q''_k − ∂G_k/∂q''_i`
///
/// With `A_l` the generalized residuals at level `l` (for `σ = i`, `ν = k`),
/// these satisfy `C_2 = A_2`, `C_1 = A_1 − d/dt A_2` and `C_0 = A_0 − ½ d/dt A_1`,
/// so both families vanish together.
pub fn classical_helmholtz_ode(source: &SourceForm) -> Result<HelmholtzReport, VariationalError> {
    classical_helmholtz_ode_seeded(source, DEFAULT_PROBE_SEED)
}

pub fn classical_helmholtz_ode_seeded(source: &SourceForm, seed: u64) -> Result<HelmholtzReport, VariationalError> {
    let ctx = &source.ctx;
    if ctx.n() != 1 || source.order > 2 {
        return Err(VariationalError::NotOdeContext { n: ctx.n(), order: source.order });
    }
    let g = &source.components;
    let q = |k: usize, order: usize| Coord::jet(k, MultiIndex::new(std::iter::repeat_n(1u8, order)));
    let dt = |e: &Expr| total_derivative(e, 1, ctx);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut records = Vec::new();
    for level in 0..=2 {
        for i in 1..=ctx.m() {
            for k in 1..=ctx.m() {
                let (gi, gk) = (&g[i - 1], &g[k - 1]);
                let residual = match level {
                    0 => {
                        let inner = gi.partial(&q(k, 1)) - gk.partial(&q(i, 1));
                        gi.partial(&q(k, 0)) - gk.partial(&q(i, 0)) - dt(&inner)?.scale(&half)
                    }
                    1 => {
                        let inner = gi.partial(&q(k, 2)) + gk.partial(&q(i, 2));
                        gi.partial(&q(k, 1)) + gk.partial(&q(i, 1)) - dt(&inner)?
                    }
                    _ => gi.partial(&q(k, 2)) - gk.partial(&q(i, 2)),
                };
                records.push(ResidualRecord {
                    level,
                    index: MultiIndex::new(std::iter::repeat_n(1u8, level)),
                    sigma: i,
                    nu: k,
                    residual,
                });
            }
        }
    }
    Ok(HelmholtzReport::from_records(records, seed))
}

/// Tonti Lagrangian `L = y^σ ∫_0^1 ε_σ(x, t y, ..., t y_J) dt`, of the
/// source's declared order. The input is not checked for variationality.
pub fn tonti_lagrangian(source: &SourceForm) -> Result<Lagrangian, VariationalError> {
    let t = Expr::param();
    let zero = Rational::zero();
    let one = Rational::one();
    let mut density = Expr::zero();
    for (s, eps) in source.components.iter().enumerate() {
        let scaling: Bindings = eps
            .coords()
            .into_iter()
            .filter(|c| matches!(c, Coord::Jet { .. }))
            .map(|c| {
                let scaled = &t * &Expr::sym(c.clone());
                (c, scaled)
            })
            .collect();
        let integral = eps.substitute(&scaling)?.integrate_param(&zero, &one)?;
        density = &density + &(&Expr::sym(Coord::fiber(s + 1)) * &integral);
    }
    Lagrangian::with_order(density, &source.ctx, source.order)
}

/// Whether `E_λ` vanishes identically. Complete on polynomial Lagrangians.
pub fn is_null_lagrangian(lagrangian: &Lagrangian) -> Result<bool, VariationalError> {
    Ok(euler_lagrange(lagrangian)?.is_zero())
}

/// The Lagrangian `h(dη)` of an `(n−1)`-form `η`; its order is one above
/// the order of `η`.
pub fn null_lagrangian_from_eta(eta: &DiffForm, ctx: &JetContext) -> Result<Lagrangian, VariationalError> {
    let n = ctx.n();
    if !eta.is_homogeneous_of_degree(n - 1) {
        return Err(VariationalError::DegreeMismatch { expected: n - 1 });
    }
    for (_, c) in eta.terms() {
        ctx.validate_expr(c)?;
    }
    let h = forms::horizontalize(&forms::exterior_derivative(eta), ctx)?;
    let word: Vec<forms::Basis> = (1..=n).map(forms::Basis::Dx).collect();
    Lagrangian::with_order(h.coefficient(&word), ctx, h.order())
}

/// Square matrix of multipliers `A_σ^ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierMatrix(Vec<Vec<Expr>>);

impl MultiplierMatrix {
    pub fn new(rows: Vec<Vec<Expr>>, ctx: &JetContext) -> Result<Self, VariationalError> {
        let m = ctx.m();
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(VariationalError::DimensionMismatch(format!("multiplier must be {m}x{m}")));
        }
        for e in rows.iter().flatten() {
            ctx.validate_expr(e)?;
            if e.contains(&Coord::Param) {
                return Err(VariationalError::ParameterPresent("a multiplier"));
            }
        }
        Ok(MultiplierMatrix(rows))
    }

    pub fn identity(ctx: &JetContext) -> Self {
        let m = ctx.m();
        MultiplierMatrix(
            (0..m).map(|i| (0..m).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect()).collect(),
        )
    }

    pub fn rows(&self) -> &[Vec<Expr>] {
        &self.0
    }
}

/// Helmholtz residuals of `ε'_σ = Σ_ρ A_σ^ρ ε_ρ`.
pub fn multiplier_check(source: &SourceForm, a: &MultiplierMatrix) -> Result<HelmholtzReport, VariationalError> {
    let m = source.ctx.m();
    if a.0.len() != m || a.0.iter().any(|r| r.len() != m) {
        return Err(VariationalError::DimensionMismatch(format!("multiplier must be {m}x{m}")));
    }
    let components: Vec<Expr> =
        a.0.iter().map(|row| row.iter().zip(&source.components).map(|(a, e)| a * e).sum()).collect();
    let order = a.0.iter().flatten().filter_map(Expr::jet_order).fold(source.order, usize::max);
    let combined = SourceForm::with_order(components, &source.ctx, order)?;
    let mut report = helmholtz_residuals(&combined)?;
    report.multiplier = Some(a.clone());
    Ok(report)
}

/// `j^r α^* λ`: the density `det(A) · L ∘ j^r α`.
pub fn pullback_lagrangian(lagrangian: &Lagrangian, alpha: &FiberedIso) -> Result<Lagrangian, VariationalError> {
    let ctx = &lagrangian.ctx;
    let pulled = forms::pullback(&lagrangian.to_form(), alpha, ctx)?;
    let word: Vec<forms::Basis> = (1..=ctx.n()).map(forms::Basis::Dx).collect();
    Lagrangian::with_order(pulled.coefficient(&word), ctx, lagrangian.order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NaturalityReport {
    /// `(j^{2r−1}α)^* Θ_λ = Θ_{j^rα^*λ}`
    pub cartan: bool,
    /// `(j^{2r}α)^* E_λ = E_{j^rα^*λ}`
    pub euler_lagrange: bool,
}

/// Checks naturality of `λ ↦ Θ_λ` and `λ ↦ E_λ` under `α` by exact comparison.
pub fn check_naturality(lagrangian: &Lagrangian, alpha: &FiberedIso) -> Result<NaturalityReport, VariationalError> {
    let ctx = lagrangian.ctx();
    let pulled = pullback_lagrangian(lagrangian, alpha)?;
    let cartan = if lagrangian.order == 0 {
        forms::pullback(&lagrangian.to_form(), alpha, ctx)? == pulled.to_form()
    } else {
        let theta = forms::cartan_form(&lagrangian.density, lagrangian.order, ctx)?;
        let lhs = forms::pullback(&theta, alpha, ctx)?;
        let rhs = forms::cartan_form(&pulled.density, pulled.order, ctx)?;
        lhs == rhs
    };
    let el = euler_lagrange(lagrangian)?;
    let lhs = forms::pullback(&el.to_form(), alpha, ctx)?;
    let rhs = euler_lagrange(&pulled)?.to_form();
    Ok(NaturalityReport { cartan, euler_lagrange: lhs == rhs })
}
