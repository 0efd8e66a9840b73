//! Exact symbolic expressions over jet coordinates.
//!
//! An [`Expr`] is always held in canonical form: a sum of monomials with
//! exact rational coefficients, each monomial a product of atoms raised to
//! nonzero integer powers. Atoms are coordinates or applications of the
//! whitelisted functions `sin`, `cos`, `exp` to a canonical argument.
//! Positive powers of sums are expanded, so two polynomials denote the same
//! function exactly when their canonical forms are equal. Function atoms are
//! opaque: `sin(y)^2 + cos(y)^2 - 1` does not normalize to zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;
use thiserror::Error;

use crate::jet::Coord;

/// Exact rational coefficient, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Simultaneous substitution map.
pub type Bindings = BTreeMap<Coord, Expr>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by a sum is not supported: {0}")]
    DivisionBySum(String),
    #[error("the parameter t occurs non-polynomially (inside a function or a denominator)")]
    NonPolynomialParameter,
}

/// Whitelisted elementary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            _ => None,
        }
    }

    fn eval(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Sym(Coord),
    Func(Func, Box<Expr>),
}

/// Product of atoms with nonzero integer exponents, sorted by atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(Atom, i32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    fn atom(a: Atom, exp: i32) -> Self {
        let mut m = Monomial::one();
        if exp != 0 {
            m.0.push((a, exp));
        }
        m
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|(_, e)| *e as i64).sum()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Atom, i32)> {
        self.0.iter().map(|(a, e)| (a, *e))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: SmallVec<[(Atom, i32); 4]> = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = &self.0[i];
            let (b, eb) = &other.0[j];
            match a.cmp(b) {
                std::cmp::Ordering::Less => {
                    out.push((a.clone(), *ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b.clone(), *eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = ea + eb;
                    if e != 0 {
                        out.push((a.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.0[i..].iter().cloned());
        out.extend(other.0[j..].iter().cloned());
        Monomial(out)
    }

    /// Removes one power of the factor at `pos`.
    fn lowered(&self, pos: usize) -> Monomial {
        let mut out = self.0.clone();
        out[pos].1 -= 1;
        if out[pos].1 == 0 {
            out.remove(pos);
        }
        Monomial(out)
    }

    fn inverted(&self) -> Monomial {
        Monomial(self.0.iter().map(|(a, e)| (a.clone(), -e)).collect())
    }
}

// Graded order: higher total degree first, then lexicographic on factors.
// The empty monomial (constants) therefore sorts last among nonnegative degrees.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.degree().cmp(&self.degree()).then_with(|| self.0.iter().cmp(other.0.iter()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural view of a canonical expression.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprView {
    Const(Rational),
    Symbol(Coord),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Expr, i32),
    Func(Func, Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        Expr::from_term(Monomial::one(), q)
    }

    pub fn integer(i: i64) -> Self {
        Expr::constant(Rational::from_integer(BigInt::from(i)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Expr::constant(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn sym(c: Coord) -> Self {
        Expr::from_term(Monomial::atom(Atom::Sym(c), 1), Rational::one())
    }

    /// The homotopy parameter `t`.
    pub fn param() -> Self {
        Expr::sym(Coord::Param)
    }

    /// Applies a whitelisted function, folding `sin(0)`, `cos(0)`, `exp(0)`.
    pub fn apply(f: Func, arg: Expr) -> Self {
        if arg.is_zero() {
            return match f {
                Func::Sin => Expr::zero(),
                Func::Cos | Func::Exp => Expr::one(),
            };
        }
        Expr::from_term(Monomial::atom(Atom::Func(f, Box::new(arg)), 1), Rational::one())
    }

    pub fn sin(arg: Expr) -> Self {
        Expr::apply(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Self {
        Expr::apply(Func::Cos, arg)
    }

    pub fn exp(arg: Expr) -> Self {
        Expr::apply(Func::Exp, arg)
    }

    fn from_term(m: Monomial, q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(m, q);
        }
        Expr { terms }
    }

    fn accumulate(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, q: Rational) {
        if q.is_zero() {
            return;
        }
        match terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Canonical form. Every `Expr` is stored canonically, so this is a copy.
    pub fn simplify(&self) -> Expr {
        self.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, q) = self.terms.iter().next().unwrap();
                m.is_one().then(|| q.clone())
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, q: &Rational) -> Expr {
        if q.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn pow(&self, k: i32) -> Result<Expr, ExprError> {
        if k < 0 {
            let inv = self.reciprocal()?;
            return inv.pow(-k);
        }
        let mut result = Expr::one();
        let mut base = self.clone();
        let mut k = k as u32;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    pub fn reciprocal(&self) -> Result<Expr, ExprError> {
        match self.terms.len() {
            0 => Err(ExprError::DivisionByZero),
            1 => {
                let (m, q) = self.terms.iter().next().unwrap();
                Ok(Expr::from_term(m.inverted(), q.recip()))
            }
            _ => Err(ExprError::DivisionBySum(self.to_string())),
        }
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr, ExprError> {
        Ok(self * &other.reciprocal()?)
    }

    /// True when no function atoms and no negative exponents occur.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|(a, e)| *e > 0 && matches!(a, Atom::Sym(_))))
    }

    pub fn has_opaque_atoms(&self) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(a, _)| matches!(a, Atom::Func(..))))
    }

    /// All coordinates occurring anywhere, including inside function arguments.
    pub fn coords(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        self.collect_coords(&mut out);
        out
    }

    fn collect_coords(&self, out: &mut BTreeSet<Coord>) {
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                match a {
                    Atom::Sym(c) => {
                        out.insert(c.clone());
                    }
                    Atom::Func(_, arg) => arg.collect_coords(out),
                }
            }
        }
    }

    pub fn contains(&self, c: &Coord) -> bool {
        self.terms.keys().any(|m| {
            m.0.iter().any(|(a, _)| match a {
                Atom::Sym(s) => s == c,
                Atom::Func(_, arg) => arg.contains(c),
            })
        })
    }

    /// Highest jet order of any fiber coordinate, or `None` if there are none.
    pub fn jet_order(&self) -> Option<usize> {
        self.coords()
            .iter()
            .filter_map(|c| match c {
                Coord::Jet { index, .. } => Some(index.len()),
                _ => None,
            })
            .max()
    }

    /// Extends a derivation given by its values on coordinates to all
    /// expressions through the product and chain rules.
    pub fn derive_by(&self, on_coord: &dyn Fn(&Coord) -> Expr) -> Expr {
        let mut terms = BTreeMap::new();
        for (m, q) in &self.terms {
            for (pos, (atom, exp)) in m.0.iter().enumerate() {
                let datom = match atom {
                    Atom::Sym(c) => on_coord(c),
                    Atom::Func(f, arg) => {
                        let darg = arg.derive_by(on_coord);
                        if darg.is_zero() {
                            continue;
                        }
                        let outer = match f {
                            Func::Sin => Expr::cos((**arg).clone()),
                            Func::Cos => -Expr::sin((**arg).clone()),
                            Func::Exp => Expr::exp((**arg).clone()),
                        };
                        &outer * &darg
                    }
                };
                if datom.is_zero() {
                    continue;
                }
                let rest = m.lowered(pos);
                let coef = q * Rational::from_integer(BigInt::from(*exp));
                for (dm, dq) in &datom.terms {
                    Expr::accumulate(&mut terms, rest.mul(dm), &coef * dq);
                }
            }
        }
        Expr { terms }
    }

    /// Formal partial derivative treating every coordinate as independent.
    pub fn partial(&self, c: &Coord) -> Expr {
        if !self.contains(c) {
            return Expr::zero();
        }
        self.derive_by(&|s: &Coord| if s == c { Expr::one() } else { Expr::zero() })
    }

    /// Simultaneous substitution.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Expr, ExprError> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let mut out = Expr::zero();
        for (m, q) in &self.terms {
            let mut term = Expr::constant(q.clone());
            for (atom, exp) in &m.0 {
                let base = match atom {
                    Atom::Sym(c) => match bindings.get(c) {
                        Some(v) => v.clone(),
                        None => Expr::sym(c.clone()),
                    },
                    Atom::Func(f, arg) => Expr::apply(*f, arg.substitute(bindings)?),
                };
                term = &term * &base.pow(*exp)?;
                if term.is_zero() {
                    break;
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Exact definite integral in the parameter `t` over `[lower, upper]`.
    pub fn integrate_param(&self, lower: &Rational, upper: &Rational) -> Result<Expr, ExprError> {
        let mut terms = BTreeMap::new();
        for (m, q) in &self.terms {
            let mut k = 0i32;
            let mut rest = Monomial::one();
            for (atom, exp) in &m.0 {
                match atom {
                    Atom::Sym(Coord::Param) => {
                        if *exp < 0 {
                            return Err(ExprError::NonPolynomialParameter);
                        }
                        k = *exp;
                    }
                    Atom::Func(_, arg) if arg.contains(&Coord::Param) => {
                        return Err(ExprError::NonPolynomialParameter);
                    }
                    _ => rest.0.push((atom.clone(), *exp)),
                }
            }
            let kp1 = k + 1;
            let weight =
                (pow_rational(upper, kp1) - pow_rational(lower, kp1)) / Rational::from_integer(BigInt::from(kp1));
            Expr::accumulate(&mut terms, rest, q * weight);
        }
        Ok(Expr { terms })
    }

    /// Floating-point evaluation; `lookup` returns `None` for unbound coordinates.
    pub fn eval_f64(&self, lookup: &dyn Fn(&Coord) -> Option<f64>) -> Result<f64, Coord> {
        let mut total = 0.0;
        for (m, q) in &self.terms {
            let mut v = q.to_f64().unwrap_or(f64::NAN);
            for (atom, exp) in &m.0 {
                let base = match atom {
                    Atom::Sym(c) => lookup(c).ok_or_else(|| c.clone())?,
                    Atom::Func(f, arg) => f.eval(arg.eval_f64(lookup)?),
                };
                v *= base.powi(*exp);
            }
            total += v;
        }
        Ok(total)
    }

    /// Exact evaluation; `None` if a coordinate is unbound, a function atom
    /// occurs, or a negative power hits zero.
    pub fn eval_exact(&self, lookup: &dyn Fn(&Coord) -> Option<Rational>) -> Option<Rational> {
        let mut total = Rational::zero();
        for (m, q) in &self.terms {
            let mut v = q.clone();
            for (atom, exp) in &m.0 {
                let base = match atom {
                    Atom::Sym(c) => lookup(c)?,
                    Atom::Func(..) => return None,
                };
                if *exp < 0 && base.is_zero() {
                    return None;
                }
                v *= pow_rational(&base, *exp);
            }
            total += v;
        }
        Some(total)
    }

    /// Structural view; sums of one term are reported as that term.
    pub fn view(&self) -> ExprView {
        if self.terms.len() > 1 {
            return ExprView::Sum(self.terms.iter().map(|(m, q)| Expr::from_term(m.clone(), q.clone())).collect());
        }
        let Some((m, q)) = self.terms.iter().next() else {
            return ExprView::Const(Rational::zero());
        };
        if m.is_one() {
            return ExprView::Const(q.clone());
        }
        let mut factors: Vec<Expr> = Vec::new();
        if !q.is_one() {
            factors.push(Expr::constant(q.clone()));
        }
        for (a, e) in &m.0 {
            let atom = Expr::from_term(Monomial::atom(a.clone(), 1), Rational::one());
            factors.push(if *e == 1 { atom } else { Expr::from_term(Monomial::atom(a.clone(), *e), Rational::one()) });
        }
        if factors.len() > 1 {
            return ExprView::Product(factors);
        }
        let (a, e) = &m.0[0];
        if *e != 1 {
            let base = Expr::from_term(Monomial::atom(a.clone(), 1), Rational::one());
            return ExprView::Pow(base, *e);
        }
        match a {
            Atom::Sym(c) => ExprView::Symbol(c.clone()),
            Atom::Func(f, arg) => ExprView::Func(*f, (**arg).clone()),
        }
    }

    /// Renders in the DSL syntax, naming coordinates with `name`.
    pub fn render_with(&self, name: &dyn Fn(&Coord) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, q)) in self.terms.iter().enumerate() {
            let negative = q.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = q.abs();
            let mut parts: Vec<String> = Vec::new();
            if m.is_one() || !mag.is_one() {
                parts.push(mag.to_string());
            }
            for (a, e) in &m.0 {
                let base = match a {
                    Atom::Sym(c) => name(c),
                    Atom::Func(f, arg) => format!("{}({})", f.name(), arg.render_with(name)),
                };
                parts.push(match *e {
                    1 => base,
                    e if e > 1 => format!("{base}^{e}"),
                    e => format!("{base}^({e})"),
                });
            }
            out.push_str(&parts.join("*"));
        }
        out
    }
}

fn pow_rational(q: &Rational, k: i32) -> Rational {
    if k >= 0 {
        num_traits::pow(q.clone(), k as usize)
    } else {
        num_traits::pow(q.recip(), (-k) as usize)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&Coord::default_name))
    }
}

impl From<i64> for Expr {
    fn from(i: i64) -> Self {
        Expr::integer(i)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Self {
        Expr::constant(q)
    }
}

impl From<Coord> for Expr {
    fn from(c: Coord) -> Self {
        Expr::sym(c)
    }
}

impl std::ops::Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut terms = big.terms.clone();
        for (m, q) in &small.terms {
            Expr::accumulate(&mut terms, m.clone(), q.clone());
        }
        Expr { terms }
    }
}

impl std::ops::Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut terms = self.terms.clone();
        for (m, q) in &rhs.terms {
            Expr::accumulate(&mut terms, m.clone(), -q);
        }
        Expr { terms }
    }
}

impl std::ops::Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut terms = BTreeMap::new();
        for (ma, qa) in &self.terms {
            for (mb, qb) in &rhs.terms {
                Expr::accumulate(&mut terms, ma.mul(mb), qa * qb);
            }
        }
        Expr { terms }
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { terms: self.terms.iter().map(|(m, q)| (m.clone(), -q)).collect() }
    }
}

macro_rules! forward_owned_ops {
    ($($tr:ident $method:ident),*) => {$(
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr { (&self).$method(&rhs) }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr { (&self).$method(rhs) }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr { self.$method(&rhs) }
        }
    )*};
}

forward_owned_ops!(Add add, Sub sub, Mul mul);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |acc, e| &acc + &e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::MultiIndex;

    fn y(idx: &[u8]) -> Expr {
        Expr::sym(Coord::jet(1, MultiIndex::new(idx.iter().copied())))
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn annihilator_and_folding() {
        let e = &y(&[]) + &(Expr::zero() * y(&[1]));
        assert_eq!(e, y(&[]));
        let e = Expr::integer(2) * Expr::ratio(1, 2) * y(&[1, 1]);
        assert_eq!(e, y(&[1, 1]));
        let e = y(&[]) * y(&[1]) - y(&[1]) * y(&[]);
        assert!(e.is_zero());
        assert_eq!(y(&[]).pow(1).unwrap(), y(&[]));
        assert_eq!(y(&[]).pow(0).unwrap(), Expr::one());
    }

    #[test]
    fn partial_rules() {
        let e = Expr::ratio(1, 2) * y(&[1]).pow(2).unwrap();
        assert_eq!(e.partial(&Coord::jet(1, MultiIndex::new([1]))), y(&[1]));
        let e = y(&[]) * y(&[1, 1]);
        assert_eq!(e.partial(&Coord::jet(1, MultiIndex::new([1, 1]))), y(&[]));
        let e = Expr::sin(y(&[]));
        assert_eq!(e.partial(&Coord::jet(1, MultiIndex::empty())), Expr::cos(y(&[])));
        let e = Expr::cos(y(&[]) * y(&[]));
        let d = e.partial(&Coord::jet(1, MultiIndex::empty()));
        assert_eq!(d, -(Expr::integer(2) * y(&[]) * Expr::sin(y(&[]) * y(&[]))));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let c0 = Coord::jet(1, MultiIndex::empty());
        let c1 = Coord::jet(1, MultiIndex::new([1]));
        let c11 = Coord::jet(1, MultiIndex::new([1, 1]));
        let b: Bindings = [(c11.clone(), Expr::param() * y(&[1, 1]))].into();
        assert_eq!(y(&[1, 1]).substitute(&b).unwrap(), Expr::param() * y(&[1, 1]));
        let b: Bindings = [(c0.clone(), Expr::zero())].into();
        assert!(y(&[]).pow(2).unwrap().substitute(&b).unwrap().is_zero());
        let b: Bindings = [(c0, y(&[1])), (c1, y(&[]))].into();
        assert_eq!((y(&[]) * y(&[1])).substitute(&b).unwrap(), y(&[1]) * y(&[]));
    }

    #[test]
    fn param_integration() {
        let zero = Rational::zero();
        let one = Rational::one();
        let e = Expr::param() * y(&[1, 1]);
        assert_eq!(e.integrate_param(&zero, &one).unwrap(), Expr::ratio(1, 2) * y(&[1, 1]));
        assert_eq!(y(&[]).integrate_param(&zero, &one).unwrap(), y(&[]));
        let e = Expr::param().pow(2).unwrap() * y(&[]) * y(&[1]);
        assert_eq!(e.integrate_param(&zero, &one).unwrap(), Expr::ratio(1, 3) * y(&[]) * y(&[1]));
        let e = Expr::sin(Expr::param() * y(&[]));
        assert_eq!(e.integrate_param(&zero, &one), Err(ExprError::NonPolynomialParameter));
        let e = Expr::param().pow(-1).unwrap();
        assert_eq!(e.integrate_param(&zero, &one), Err(ExprError::NonPolynomialParameter));
        // t-free on [1/2, 2] scales by the interval length
        assert_eq!(y(&[]).integrate_param(&q(1, 2), &q(2, 1)).unwrap(), Expr::ratio(3, 2) * y(&[]));
    }

    #[test]
    fn zero_test() {
        assert!((y(&[1]) - y(&[1])).is_zero());
        assert!(!Expr::integer(2).is_zero());
        let s = Expr::sin(y(&[]));
        let c = Expr::cos(y(&[]));
        let e = s.pow(2).unwrap() + c.pow(2).unwrap() - Expr::one();
        assert!(!e.is_zero());
    }

    #[test]
    fn division_rules() {
        assert_eq!(Expr::zero().reciprocal(), Err(ExprError::DivisionByZero));
        assert!(matches!((y(&[]) + Expr::one()).reciprocal(), Err(ExprError::DivisionBySum(_))));
        let e = (Expr::integer(2) * y(&[])).reciprocal().unwrap();
        assert_eq!(e * y(&[]), Expr::ratio(1, 2));
        let e = Expr::exp(y(&[])).reciprocal().unwrap();
        assert!(!e.is_polynomial());
    }

    #[test]
    fn rendering() {
        let e = Expr::ratio(1, 2) * y(&[1]).pow(2).unwrap() - y(&[]);
        assert_eq!(e.to_string(), "1/2*y1_{1}^2 - y1");
        assert_eq!(Expr::zero().to_string(), "0");
        assert_eq!((-y(&[1, 1])).to_string(), "-y1_{1,1}");
        assert_eq!(y(&[]).pow(-2).unwrap().to_string(), "y1^(-2)");
    }

    #[test]
    fn views() {
        assert_eq!(Expr::ratio(3, 4).view(), ExprView::Const(q(3, 4)));
        assert!(matches!(y(&[]).view(), ExprView::Symbol(_)));
        assert!(matches!(y(&[]).pow(3).unwrap().view(), ExprView::Pow(_, 3)));
        assert!(matches!((Expr::integer(2) * y(&[])).view(), ExprView::Product(v) if v.len() == 2));
        assert!(matches!((y(&[]) + y(&[1])).view(), ExprView::Sum(v) if v.len() == 2));
        assert!(matches!(Expr::sin(y(&[])).view(), ExprView::Func(Func::Sin, _)));
    }
}
