//! Jet coordinates, multi-indices and total derivatives.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::expr::{Bindings, Expr};

/// Default hard ceiling on generated jet order.
pub const DEFAULT_ORDER_CEILING: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("unknown coordinate {0}")]
    UnknownCoordinate(String),
    #[error("jet order {order} exceeds the ceiling {ceiling}")]
    OrderOverflow { order: usize, ceiling: usize },
    #[error("section component {0} must be a polynomial in the base coordinates only")]
    InvalidSection(usize),
}

/// Symmetric multi-index: a sorted multiset of 1-based base indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(SmallVec<[u8; 6]>);

impl MultiIndex {
    pub fn new(indices: impl IntoIterator<Item = u8>) -> Self {
        let mut v: SmallVec<[u8; 6]> = indices.into_iter().collect();
        v.sort_unstable();
        MultiIndex(v)
    }

    pub fn empty() -> Self {
        MultiIndex(SmallVec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    /// `J ∪ {i}`, kept sorted.
    pub fn with(&self, i: u8) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&x| x <= i);
        v.insert(pos, i);
        MultiIndex(v)
    }

    /// Multiset union.
    pub fn union(&self, other: &MultiIndex) -> Self {
        MultiIndex::new(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Number of distinct ordered tuples representing this multi-index:
    /// `k! / prod_i (count of i)!`.
    pub fn multiplicity(&self) -> u64 {
        let mut result = factorial(self.len());
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            result /= factorial(j - i);
            i = j;
        }
        result
    }

    /// All sorted multi-indices of length `k` over `1..=n`.
    pub fn all_of_length(n: usize, k: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur: SmallVec<[u8; 6]> = SmallVec::new();
        fn rec(n: u8, k: usize, start: u8, cur: &mut SmallVec<[u8; 6]>, out: &mut Vec<MultiIndex>) {
            if cur.len() == k {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for i in start..=n {
                cur.push(i);
                rec(n, k, i, cur, out);
                cur.pop();
            }
        }
        rec(n as u8, k, 1, &mut cur, &mut out);
        out
    }

    /// All sorted multi-indices of length at most `k`, shortest first.
    pub fn all_up_to(n: usize, k: usize) -> Vec<MultiIndex> {
        (0..=k).flat_map(|l| MultiIndex::all_of_length(n, l)).collect()
    }
}

// Graded: shorter multi-indices first, then lexicographic.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

pub fn binomial(k: usize, l: usize) -> u64 {
    if l > k {
        return 0;
    }
    factorial(k) / (factorial(l) * factorial(k - l))
}

/// A coordinate on a jet space, or the homotopy parameter.
///
/// Ordering is by kind (fiber jets first), then field index, then multi-index,
/// then base index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Jet { field: usize, index: MultiIndex },
    Base(usize),
    Param,
}

impl Coord {
    pub fn jet(field: usize, index: MultiIndex) -> Self {
        Coord::Jet { field, index }
    }

    /// Order-zero fiber coordinate `y^field`.
    pub fn fiber(field: usize) -> Self {
        Coord::jet(field, MultiIndex::empty())
    }

    pub fn jet_order(&self) -> usize {
        match self {
            Coord::Jet { index, .. } => index.len(),
            _ => 0,
        }
    }

    /// Context-free display name: `x{i}`, `y{σ}`, `y{σ}_{J}`, `t`.
    pub fn default_name(&self) -> String {
        match self {
            Coord::Base(i) => format!("x{i}"),
            Coord::Jet { field, index } if index.is_empty() => format!("y{field}"),
            Coord::Jet { field, index } => format!("y{field}_{index}"),
            Coord::Param => "t".to_string(),
        }
    }
}

/// Chart-level data of a fibered manifold and its jet prolongations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetContext {
    n: usize,
    m: usize,
    order: usize,
    base_names: Vec<String>,
    field_names: Vec<String>,
    ceiling: usize,
}

impl JetContext {
    /// Context with default names `x1..xn` and `y` (or `y1..ym`).
    pub fn new(n: usize, m: usize, order: usize) -> Result<Self, JetError> {
        let base = (1..=n).map(|i| format!("x{i}")).collect();
        let fields = if m == 1 { vec!["y".to_string()] } else { (1..=m).map(|s| format!("y{s}")).collect() };
        JetContext::with_names(order, base, fields)
    }

    pub fn with_names(order: usize, base_names: Vec<String>, field_names: Vec<String>) -> Result<Self, JetError> {
        let (n, m) = (base_names.len(), field_names.len());
        if n == 0 || m == 0 {
            return Err(JetError::InvalidContext("need n >= 1 and m >= 1".into()));
        }
        if n > 9 {
            return Err(JetError::InvalidContext("at most 9 base variables are supported".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in base_names.iter().chain(field_names.iter()) {
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && name.chars().all(|c| c.is_ascii_alphanumeric());
            if !valid {
                return Err(JetError::InvalidContext(format!("invalid name {name:?}")));
            }
            if matches!(name.as_str(), "sin" | "cos" | "exp" | "t") {
                return Err(JetError::InvalidContext(format!("reserved name {name:?}")));
            }
            if !seen.insert(name.clone()) {
                return Err(JetError::InvalidContext(format!("duplicate name {name:?}")));
            }
        }
        let ctx = JetContext { n, m, order, base_names, field_names, ceiling: DEFAULT_ORDER_CEILING };
        if order > ctx.ceiling {
            return Err(JetError::OrderOverflow { order, ceiling: ctx.ceiling });
        }
        Ok(ctx)
    }

    pub fn with_ceiling(mut self, ceiling: usize) -> Self {
        self.ceiling = ceiling;
        self
    }

    /// Same names and ceiling at a different declared order.
    pub fn with_order(&self, order: usize) -> Self {
        JetContext { order, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn ceiling(&self) -> usize {
        self.ceiling
    }

    pub fn base_names(&self) -> &[String] {
        &self.base_names
    }

    pub fn field_names(&self) -> &[String] {
        &self.field_names
    }

    pub fn base(&self, i: usize) -> Expr {
        Expr::sym(Coord::Base(i))
    }

    pub fn y(&self, field: usize, index: &[u8]) -> Expr {
        Expr::sym(Coord::jet(field, MultiIndex::new(index.iter().copied())))
    }

    pub fn coord_name(&self, c: &Coord) -> String {
        match c {
            Coord::Base(i) => self.base_names.get(i.wrapping_sub(1)).cloned().unwrap_or_else(|| c.default_name()),
            Coord::Jet { field, index } => {
                let name = self.field_names.get(field.wrapping_sub(1)).cloned().unwrap_or_else(|| format!("y{field}"));
                if index.is_empty() {
                    name
                } else {
                    format!("{name}_{index}")
                }
            }
            Coord::Param => "t".to_string(),
        }
    }

    pub fn render(&self, e: &Expr) -> String {
        e.render_with(&|c| self.coord_name(c))
    }

    /// Checks index bounds; jet order is checked against the ceiling only.
    pub fn validate_coord(&self, c: &Coord) -> Result<(), JetError> {
        let ok = match c {
            Coord::Base(i) => (1..=self.n).contains(i),
            Coord::Jet { field, index } => {
                (1..=self.m).contains(field)
                    && index.indices().iter().all(|&i| (1..=self.n as u8).contains(&i))
                    && index.len() <= self.ceiling
            }
            Coord::Param => true,
        };
        if ok {
            Ok(())
        } else {
            Err(JetError::UnknownCoordinate(c.default_name()))
        }
    }

    pub fn validate_expr(&self, e: &Expr) -> Result<(), JetError> {
        e.coords().iter().try_for_each(|c| self.validate_coord(c))
    }

    fn check_order(&self, order: usize) -> Result<(), JetError> {
        if order > self.ceiling {
            Err(JetError::OrderOverflow { order, ceiling: self.ceiling })
        } else {
            Ok(())
        }
    }
}

/// Partial derivative with respect to a declared coordinate.
pub fn partial(e: &Expr, c: &Coord, ctx: &JetContext) -> Result<Expr, JetError> {
    ctx.validate_coord(c)?;
    Ok(e.partial(c))
}

/// Substitution whose keys must be declared coordinates.
pub fn substitute(e: &Expr, bindings: &Bindings, ctx: &JetContext) -> Result<Expr, crate::Error> {
    for c in bindings.keys() {
        ctx.validate_coord(c)?;
    }
    Ok(e.substitute(bindings)?)
}

/// Total derivative `d_i` along base direction `i` (1-based).
pub fn total_derivative(e: &Expr, i: usize, ctx: &JetContext) -> Result<Expr, JetError> {
    if let Some(r) = e.jet_order() {
        ctx.check_order(r + 1)?;
    }
    let i8 = i as u8;
    Ok(e.derive_by(&|c: &Coord| match c {
        Coord::Base(k) if *k == i => Expr::one(),
        Coord::Jet { field, index } => Expr::sym(Coord::jet(*field, index.with(i8))),
        _ => Expr::zero(),
    }))
}

/// `d_{j_1} ... d_{j_k} e`; the order of `J` is irrelevant since total
/// derivatives commute.
pub fn iterated_total_derivative(e: &Expr, index: &MultiIndex, ctx: &JetContext) -> Result<Expr, JetError> {
    let mut out = e.clone();
    for &i in index.indices() {
        if out.is_zero() {
            break;
        }
        out = total_derivative(&out, i as usize, ctx)?;
    }
    Ok(out)
}

/// Local polynomial representative `x ↦ f^σ(x)` of a section.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionSpec {
    components: Vec<Expr>,
}

impl SectionSpec {
    pub fn new(components: Vec<Expr>, ctx: &JetContext) -> Result<Self, JetError> {
        if components.len() != ctx.m() {
            return Err(JetError::InvalidContext(format!(
                "section has {} components, context has m = {}",
                components.len(),
                ctx.m()
            )));
        }
        for (s, f) in components.iter().enumerate() {
            let base_only = f.coords().iter().all(|c| matches!(c, Coord::Base(i) if *i <= ctx.n()));
            if !base_only || !f.is_polynomial() {
                return Err(JetError::InvalidSection(s + 1));
            }
        }
        Ok(SectionSpec { components })
    }

    pub(crate) fn from_components_unchecked(components: Vec<Expr>) -> Self {
        SectionSpec { components }
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }
}

/// Binds every jet coordinate up to `ctx.order()` to the corresponding mixed
/// partial of the section.
pub fn prolong_section(s: &SectionSpec, ctx: &JetContext) -> Bindings {
    prolong_section_to(s, ctx.n(), ctx.order())
}

pub fn prolong_section_to(s: &SectionSpec, n: usize, order: usize) -> Bindings {
    let mut out = BTreeMap::new();
    for (idx, f) in s.components.iter().enumerate() {
        let field = idx + 1;
        out.insert(Coord::fiber(field), f.clone());
        for index in MultiIndex::all_up_to(n, order).into_iter().skip(1) {
            let (&last, rest) = index.indices().split_last().unwrap();
            let parent = Coord::jet(field, MultiIndex::new(rest.iter().copied()));
            let value = out[&parent].partial(&Coord::Base(last as usize));
            out.insert(Coord::jet(field, index), value);
        }
    }
    out
}
