//! Differential forms on jet spaces.
//!
//! Forms are stored in the coordinate basis `dx^i`, `dy^σ_J`. The contact
//! basis `ω^σ_J = dy^σ_J - y^σ_{J,l} dx^l` is materialized only as a
//! [`ContactForm`], used for contact decomposition and display.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::{Bindings, Expr, ExprError, Rational};
use crate::jet::{total_derivative, Coord, JetContext, JetError, MultiIndex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormsError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("forms live on different contexts")]
    ContextMismatch,
    #[error("base map is singular")]
    SingularBaseMap,
    #[error("Lagrangian has order zero; its Poincare-Cartan form is the Lagrangian itself")]
    OrderZero,
    #[error("invalid fibered isomorphism: {0}")]
    InvalidIsomorphism(String),
}

/// Coordinate basis one-form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    Dx(usize),
    Dy { field: usize, index: MultiIndex },
}

/// Contact-adapted basis one-form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContactBasis {
    Dx(usize),
    W { field: usize, index: MultiIndex },
}

/// A formal sum of coefficient times sorted wedge word over basis `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormOver<B: Ord + Clone> {
    order: usize,
    terms: BTreeMap<Vec<B>, Expr>,
}

pub type DiffForm = FormOver<Basis>;
pub type ContactForm = FormOver<ContactBasis>;

impl<B: Ord + Clone> FormOver<B> {
    pub fn zero(order: usize) -> Self {
        FormOver { order, terms: BTreeMap::new() }
    }

    pub fn scalar(e: Expr, order: usize) -> Self {
        FormOver::term(e, vec![], order)
    }

    pub fn one_form(b: B, order: usize) -> Self {
        FormOver::term(Expr::one(), vec![b], order)
    }

    /// `coef · b_1 ∧ ... ∧ b_k`, sorted with sign; repeated factors give zero.
    pub fn term(coef: Expr, mut word: Vec<B>, order: usize) -> Self {
        let mut out = FormOver::zero(order);
        let mut odd = false;
        for i in 1..word.len() {
            let mut j = i;
            while j > 0 && word[j - 1] > word[j] {
                word.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        if word.windows(2).any(|w| w[0] == w[1]) {
            return out;
        }
        let coef = if odd { -coef } else { coef };
        out.push(word, coef);
        out
    }

    fn push(&mut self, word: Vec<B>, coef: Expr) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coef;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Same form viewed on a higher-order jet space.
    pub fn lifted(&self, order: usize) -> Self {
        FormOver { order: order.max(self.order), terms: self.terms.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<B>, &Expr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &[B]) -> Expr {
        self.terms.get(word).cloned().unwrap_or_default()
    }

    /// Degree if homogeneous and nonzero.
    pub fn degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(Vec::len);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of_degree(&self, p: usize) -> bool {
        self.terms.keys().all(|w| w.len() == p)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = FormOver { order: self.order.max(other.order), terms: self.terms.clone() };
        for (w, c) in &other.terms {
            out.push(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Expr::integer(-1)))
    }

    pub fn scale(&self, e: &Expr) -> Self {
        let mut out = FormOver::zero(self.order);
        for (w, c) in &self.terms {
            out.push(w.clone(), c * e);
        }
        out
    }

    /// Graded-commutative exterior product.
    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = FormOver::zero(self.order.max(other.order));
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut word = wa.clone();
                word.extend(wb.iter().cloned());
                let t = FormOver::term(ca * cb, word, out.order);
                for (w, c) in t.terms {
                    out.push(w, c);
                }
            }
        }
        out
    }

    /// Algebra homomorphism determined by images of basis one-forms, with
    /// coefficients mapped by `coef`.
    fn map_basis<C: Ord + Clone>(
        &self,
        order: usize,
        coef: &dyn Fn(&Expr) -> Result<Expr, FormsError>,
        image: &dyn Fn(&B) -> Result<FormOver<C>, FormsError>,
    ) -> Result<FormOver<C>, FormsError> {
        let mut out = FormOver::zero(order);
        for (w, c) in &self.terms {
            let mut acc = FormOver::scalar(coef(c)?, order);
            for b in w {
                if acc.is_zero() {
                    break;
                }
                acc = acc.wedge(&image(b)?);
            }
            for (w2, c2) in acc.terms {
                out.push(w2, c2);
            }
        }
        Ok(out)
    }

    pub fn map_coefficients(&self, f: &dyn Fn(&Expr) -> Expr) -> Self {
        let mut out = FormOver::zero(self.order);
        for (w, c) in &self.terms {
            out.push(w.clone(), f(c));
        }
        out
    }
}

pub fn dx(i: usize, order: usize) -> DiffForm {
    DiffForm::one_form(Basis::Dx(i), order)
}

pub fn dy(field: usize, index: MultiIndex, order: usize) -> DiffForm {
    let order = order.max(index.len());
    DiffForm::one_form(Basis::Dy { field, index }, order)
}

/// `ω_0 = dx^1 ∧ ... ∧ dx^n`.
pub fn omega0(ctx: &JetContext, order: usize) -> DiffForm {
    DiffForm::term(Expr::one(), (1..=ctx.n()).map(Basis::Dx).collect(), order)
}

/// `ω_i = i_{∂/∂x^i} ω_0 = (-1)^{i-1} dx^1 ∧ ... ∧ (omit dx^i) ∧ ... ∧ dx^n`.
pub fn omega_i(ctx: &JetContext, i: usize, order: usize) -> DiffForm {
    let sign = if (i - 1).is_multiple_of(2) { 1 } else { -1 };
    DiffForm::term(Expr::integer(sign), (1..=ctx.n()).filter(|&k| k != i).map(Basis::Dx).collect(), order)
}

fn contact_omega0(ctx: &JetContext, order: usize) -> ContactForm {
    ContactForm::term(Expr::one(), (1..=ctx.n()).map(ContactBasis::Dx).collect(), order)
}

fn contact_omega_i(ctx: &JetContext, i: usize, order: usize) -> ContactForm {
    let sign = if (i - 1).is_multiple_of(2) { 1 } else { -1 };
    ContactForm::term(Expr::integer(sign), (1..=ctx.n()).filter(|&k| k != i).map(ContactBasis::Dx).collect(), order)
}

/// `Σ_k y^σ_{J k} dx^k`
fn horizontal_part(field: usize, index: &MultiIndex, ctx: &JetContext) -> Vec<(Expr, usize)> {
    (1..=ctx.n()).map(|k| (Expr::sym(Coord::jet(field, index.with(k as u8))), k)).collect()
}

/// The contact one-form `ω^σ_J` in the coordinate basis, on order `|J| + 1`.
pub fn contact_one_form(field: usize, index: &MultiIndex, ctx: &JetContext) -> DiffForm {
    let order = index.len() + 1;
    let mut out = dy(field, index.clone(), order);
    for (c, k) in horizontal_part(field, index, ctx) {
        out = out.sub(&dx(k, order).scale(&c));
    }
    out
}

fn basis_differential(c: &Coord) -> Option<Basis> {
    match c {
        Coord::Base(i) => Some(Basis::Dx(*i)),
        Coord::Jet { field, index } => Some(Basis::Dy { field: *field, index: index.clone() }),
        Coord::Param => None,
    }
}

/// `df` of a function on the jet space; `t` is treated as a constant.
pub fn differential(f: &Expr, order: usize) -> DiffForm {
    let mut out = DiffForm::zero(order);
    for c in f.coords() {
        if let Some(b) = basis_differential(&c) {
            let order = out.order.max(c.jet_order());
            out = out.add(&DiffForm::term(f.partial(&c), vec![b], order));
        }
    }
    out
}

pub fn exterior_derivative(rho: &DiffForm) -> DiffForm {
    let mut out = DiffForm::zero(rho.order);
    for (w, c) in &rho.terms {
        let rest = DiffForm::term(Expr::one(), w.clone(), rho.order);
        out = out.add(&differential(c, rho.order).wedge(&rest));
    }
    out
}

/// Horizontalization `h`: `dy^σ_J ↦ y^σ_{J k} dx^k`; raises the order by one.
pub fn horizontalize(rho: &DiffForm, ctx: &JetContext) -> Result<DiffForm, FormsError> {
    let order = rho.order + 1;
    if order > ctx.ceiling() {
        return Err(JetError::OrderOverflow { order, ceiling: ctx.ceiling() }.into());
    }
    rho.map_basis(order, &|c| Ok(c.clone()), &|b| {
        Ok(match b {
            Basis::Dx(i) => dx(*i, order),
            Basis::Dy { field, index } => {
                let mut f = DiffForm::zero(order);
                for (c, k) in horizontal_part(*field, index, ctx) {
                    f = f.add(&dx(k, order).scale(&c));
                }
                f
            }
        })
    })
}

/// Rewrites `ρ` in the contact basis on the once-prolonged space.
pub fn to_contact_basis(rho: &DiffForm, ctx: &JetContext) -> Result<ContactForm, FormsError> {
    let order = rho.order + 1;
    if order > ctx.ceiling() {
        return Err(JetError::OrderOverflow { order, ceiling: ctx.ceiling() }.into());
    }
    rho.map_basis(order, &|c| Ok(c.clone()), &|b| {
        Ok(match b {
            Basis::Dx(i) => ContactForm::one_form(ContactBasis::Dx(*i), order),
            Basis::Dy { field, index } => {
                let mut f = ContactForm::one_form(ContactBasis::W { field: *field, index: index.clone() }, order);
                for (c, k) in horizontal_part(*field, index, ctx) {
                    f = f.add(&ContactForm::one_form(ContactBasis::Dx(k), order).scale(&c));
                }
                f
            }
        })
    })
}

impl ContactForm {
    /// Expands every `ω^σ_J` back into the coordinate basis.
    pub fn to_raw(&self, ctx: &JetContext) -> DiffForm {
        let order = self.order;
        self.map_basis(order, &|c| Ok(c.clone()), &|b| {
            Ok(match b {
                ContactBasis::Dx(i) => dx(*i, order),
                ContactBasis::W { field, index } => contact_one_form(*field, index, ctx).lifted(order),
            })
        })
        .expect("expansion into the coordinate basis cannot fail")
    }

    /// Splits by the number of contact factors in each term.
    pub fn by_contact_degree(&self) -> BTreeMap<usize, ContactForm> {
        let mut out: BTreeMap<usize, ContactForm> = BTreeMap::new();
        for (w, c) in &self.terms {
            let k = w.iter().filter(|b| matches!(b, ContactBasis::W { .. })).count();
            out.entry(k).or_insert_with(|| ContactForm::zero(self.order)).push(w.clone(), c.clone());
        }
        out
    }
}

/// Contact components `(k, ρ_k)` for `k = 0..=p`, where `p` is the largest
/// number of `dy` factors in a term; `Σ_k ρ_k` is `ρ` lifted by one order and
/// `ρ_0 = h(ρ)`.
pub fn contact_decompose(rho: &DiffForm, ctx: &JetContext) -> Result<Vec<(usize, DiffForm)>, FormsError> {
    let contact = to_contact_basis(rho, ctx)?;
    let max_k = rho.terms.keys().map(|w| w.iter().filter(|b| matches!(b, Basis::Dy { .. })).count()).max().unwrap_or(0);
    let mut parts = contact.by_contact_degree();
    Ok((0..=max_k)
        .map(|k| {
            let part = parts.remove(&k).unwrap_or_else(|| ContactForm::zero(contact.order));
            (k, part.to_raw(ctx))
        })
        .collect())
}

/// Contact-basis expression of the Poincare-Cartan form; see [`cartan_form`].
pub fn cartan_form_contact(density: &Expr, r: usize, ctx: &JetContext) -> Result<ContactForm, FormsError> {
    if r == 0 {
        return Err(FormsError::OrderZero);
    }
    let order = 2 * r - 1;
    let n = ctx.n();
    // f[(σ, J)] for 1 <= |J| <= r, descending from |J| = r
    let mut f: BTreeMap<(usize, MultiIndex), Expr> = BTreeMap::new();
    for sigma in 1..=ctx.m() {
        for k in (1..=r).rev() {
            for index in MultiIndex::all_of_length(n, k) {
                let mu = Rational::new(BigInt::one(), BigInt::from(index.multiplicity()));
                let mut value = density.partial(&Coord::jet(sigma, index.clone())).scale(&mu);
                if k < r {
                    for i in 1..=n {
                        let higher = &f[&(sigma, index.with(i as u8))];
                        value = &value - &total_derivative(higher, i, ctx)?;
                    }
                }
                f.insert((sigma, index), value);
            }
        }
    }
    let mut theta = ContactForm::scalar(density.clone(), order).wedge(&contact_omega0(ctx, order));
    for sigma in 1..=ctx.m() {
        for i in 1..=n {
            let omega_i = contact_omega_i(ctx, i, order);
            for index in MultiIndex::all_up_to(n, r - 1) {
                let coef =
                    f[&(sigma, index.with(i as u8))].scale(&Rational::from_integer(BigInt::from(index.multiplicity())));
                if coef.is_zero() {
                    continue;
                }
                let w = ContactForm::term(coef, vec![ContactBasis::W { field: sigma, index }], order);
                theta = theta.add(&w.wedge(&omega_i));
            }
        }
    }
    Ok(theta)
}

/// The generalized Poincare-Cartan form `Θ_λ` of `λ = L ω_0` of order `r`,
/// on the jet space of order `2r - 1`.
pub fn cartan_form(density: &Expr, r: usize, ctx: &JetContext) -> Result<DiffForm, FormsError> {
    Ok(cartan_form_contact(density, r, ctx)?.to_raw(ctx))
}

/// Fibered isomorphism with affine base map `x̄ = A x + b` and fiber map
/// `ȳ^σ = φ^σ(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberedIso {
    matrix: Vec<Vec<Rational>>,
    inverse: Vec<Vec<Rational>>,
    shift: Vec<Rational>,
    fiber: Vec<Expr>,
}

impl FiberedIso {
    pub fn new(
        matrix: Vec<Vec<Rational>>,
        shift: Vec<Rational>,
        fiber: Vec<Expr>,
        ctx: &JetContext,
    ) -> Result<Self, FormsError> {
        let n = ctx.n();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) || shift.len() != n {
            return Err(FormsError::InvalidIsomorphism(format!("base map must be {n}x{n} with a shift of length {n}")));
        }
        if fiber.len() != ctx.m() {
            return Err(FormsError::InvalidIsomorphism(format!("fiber map needs {} components", ctx.m())));
        }
        for phi in &fiber {
            ctx.validate_expr(phi)?;
            if phi.coords().iter().any(|c| c.jet_order() > 0 || *c == Coord::Param) {
                return Err(FormsError::InvalidIsomorphism(
                    "fiber map may depend on base and order-zero fiber coordinates only".into(),
                ));
            }
        }
        let inverse = invert(&matrix).ok_or(FormsError::SingularBaseMap)?;
        Ok(FiberedIso { matrix, inverse, shift, fiber })
    }

    pub fn identity(ctx: &JetContext) -> Self {
        let n = ctx.n();
        let matrix: Vec<Vec<Rational>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
        FiberedIso {
            inverse: matrix.clone(),
            matrix,
            shift: vec![Rational::zero(); n],
            fiber: (1..=ctx.m()).map(|s| Expr::sym(Coord::fiber(s))).collect(),
        }
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn fiber(&self) -> &[Expr] {
        &self.fiber
    }

    pub fn determinant(&self) -> Rational {
        determinant(&self.matrix)
    }

    /// `x̄^i` in source coordinates.
    pub fn base_image(&self, i: usize) -> Expr {
        let mut e = Expr::constant(self.shift[i - 1].clone());
        for (k, a) in self.matrix[i - 1].iter().enumerate() {
            e = &e + &Expr::sym(Coord::Base(k + 1)).scale(a);
        }
        e
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose_after(&self, first: &FiberedIso, ctx: &JetContext) -> Result<FiberedIso, FormsError> {
        let n = ctx.n();
        let matrix: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| &self.matrix[i][k] * &first.matrix[k][j]).sum()).collect())
            .collect();
        let shift: Vec<Rational> = (0..n)
            .map(|i| {
                let s: Rational = (0..n).map(|k| &self.matrix[i][k] * &first.shift[k]).sum();
                s + &self.shift[i]
            })
            .collect();
        let mut bindings = Bindings::new();
        for i in 1..=n {
            bindings.insert(Coord::Base(i), first.base_image(i));
        }
        for (s, phi) in first.fiber.iter().enumerate() {
            bindings.insert(Coord::fiber(s + 1), phi.clone());
        }
        let fiber = self.fiber.iter().map(|phi| phi.substitute(&bindings)).collect::<Result<Vec<_>, _>>()?;
        FiberedIso::new(matrix, shift, fiber, ctx)
    }
}

fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col].clone();
        for row in col + 1..n {
            let factor = &a[row][col] / &a[col][col];
            let pivot_row = a[col].clone();
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &factor * p;
            }
        }
    }
    det
}

fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= p.clone();
        }
        let pivot_row = a[col].clone();
        for (row, r) in a.iter_mut().enumerate() {
            if row != col && !r[col].is_zero() {
                let factor = r[col].clone();
                for (x, p) in r.iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Bindings of `j^r α`: target coordinates `x̄^i`, `ȳ^σ_J` (`|J| <= r`) as
/// expressions in source coordinates.
pub fn prolong_isomorphism(alpha: &FiberedIso, r: usize, ctx: &JetContext) -> Result<Bindings, FormsError> {
    let n = ctx.n();
    let mut out = Bindings::new();
    for i in 1..=n {
        out.insert(Coord::Base(i), alpha.base_image(i));
    }
    for (s, phi) in alpha.fiber.iter().enumerate() {
        let field = s + 1;
        out.insert(Coord::fiber(field), phi.clone());
        for index in MultiIndex::all_up_to(n, r).into_iter().skip(1) {
            let (&last, rest) = index.indices().split_last().unwrap();
            let parent = &out[&Coord::jet(field, MultiIndex::new(rest.iter().copied()))];
            let mut value = Expr::zero();
            for k in 1..=n {
                let a = &alpha.inverse[k - 1][last as usize - 1];
                if a.is_zero() {
                    continue;
                }
                value = &value + &total_derivative(parent, k, ctx)?.scale(a);
            }
            out.insert(Coord::jet(field, index), value);
        }
    }
    Ok(out)
}

/// Pullback `(j^r α)^* ρ` where `r` is the order of `ρ`.
pub fn pullback(rho: &DiffForm, alpha: &FiberedIso, ctx: &JetContext) -> Result<DiffForm, FormsError> {
    if alpha.matrix.len() != ctx.n() || alpha.fiber.len() != ctx.m() {
        return Err(FormsError::ContextMismatch);
    }
    let order = rho.order;
    let bindings = prolong_isomorphism(alpha, order, ctx)?;
    rho.map_basis(order, &|c| Ok(c.substitute(&bindings)?), &|b| {
        Ok(match b {
            Basis::Dx(i) => {
                let mut f = DiffForm::zero(order);
                for (k, a) in alpha.matrix[i - 1].iter().enumerate() {
                    f = f.add(&dx(k + 1, order).scale(&Expr::constant(a.clone())));
                }
                f
            }
            Basis::Dy { field, index } => differential(&bindings[&Coord::jet(*field, index.clone())], order),
        })
    })
}

fn render_word<B: Ord + Clone>(w: &[B], name: &dyn Fn(&B) -> String) -> String {
    w.iter().map(name).collect::<Vec<_>>().join("∧")
}

fn render_form<B: Ord + Clone>(form: &FormOver<B>, ctx: &JetContext, name: &dyn Fn(&B) -> String) -> String {
    if form.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (w, c)) in form.terms.iter().enumerate() {
        let (neg, mag) = match c.view() {
            crate::expr::ExprView::Sum(_) => (false, c.clone()),
            _ => {
                let leading_negative = ctx.render(c).starts_with('-');
                if leading_negative {
                    (true, -c)
                } else {
                    (false, c.clone())
                }
            }
        };
        if i > 0 {
            out.push_str(if neg { " - " } else { " + " });
        } else if neg {
            out.push('-');
        }
        let coef = ctx.render(&mag);
        let word = render_word(w, name);
        let coef = if c.term_count() > 1 { format!("({coef})") } else { coef };
        if w.is_empty() {
            out.push_str(&coef);
        } else if mag == Expr::one() {
            out.push_str(&word);
        } else {
            out.push_str(&format!("{coef} {word}"));
        }
    }
    out
}

pub fn basis_name(b: &Basis, ctx: &JetContext) -> String {
    match b {
        Basis::Dx(i) => format!("d{}", ctx.coord_name(&Coord::Base(*i))),
        Basis::Dy { field, index } => format!("d{}", ctx.coord_name(&Coord::jet(*field, index.clone()))),
    }
}

impl DiffForm {
    /// Rendering in the coordinate basis, e.g. `u_{1} du - 1/2*u_{1}^2 dx`.
    pub fn render(&self, ctx: &JetContext) -> String {
        render_form(self, ctx, &|b| basis_name(b, ctx))
    }
}

impl ContactForm {
    /// Rendering in the contact basis, with `w_{J}^σ` for `ω^σ_J`.
    pub fn render(&self, ctx: &JetContext) -> String {
        render_form(self, ctx, &|b| match b {
            ContactBasis::Dx(i) => format!("d{}", ctx.coord_name(&Coord::Base(*i))),
            ContactBasis::W { field, index } if index.is_empty() => format!("w^{field}"),
            ContactBasis::W { field, index } => format!("w_{index}^{field}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u8]) -> MultiIndex {
        MultiIndex::new(v.iter().copied())
    }

    fn ctx1(order: usize) -> JetContext {
        JetContext::new(1, 1, order).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let a = dx(1, 0);
        assert!(a.wedge(&a).is_zero());
        let b = dx(2, 0);
        assert_eq!(a.wedge(&b), b.wedge(&a).scale(&Expr::integer(-1)));
        let ctx = ctx1(1);
        let y = ctx.y(1, &[]);
        let lhs = dx(1, 0).scale(&y).wedge(&dy(1, mi(&[]), 0));
        assert_eq!(lhs, DiffForm::term(y, vec![Basis::Dx(1), Basis::Dy { field: 1, index: mi(&[]) }], 0));
    }

    #[test]
    fn exterior_derivative_examples() {
        let ctx = ctx1(1);
        let y = ctx.y(1, &[]);
        let y1 = ctx.y(1, &[1]);
        assert_eq!(exterior_derivative(&DiffForm::scalar(y.clone(), 0)), dy(1, mi(&[]), 0));
        let rho = dy(1, mi(&[]), 1).scale(&y1);
        assert_eq!(exterior_derivative(&rho), dy(1, mi(&[1]), 1).wedge(&dy(1, mi(&[]), 1)));
        let f = DiffForm::scalar(&y * &y1, 1);
        assert!(exterior_derivative(&exterior_derivative(&f)).is_zero());
    }

    #[test]
    fn horizontalization_examples() {
        let ctx = ctx1(1);
        let y1 = ctx.y(1, &[1]);
        let h = horizontalize(&dy(1, mi(&[]), 0), &ctx).unwrap();
        assert_eq!(h, dx(1, 1).scale(&y1));
        let omega = contact_one_form(1, &mi(&[]), &ctx);
        assert!(horizontalize(&omega, &ctx).unwrap().is_zero());
        let rho = dy(1, mi(&[]), 1).scale(&y1).wedge(&dx(1, 1));
        assert!(horizontalize(&rho, &ctx).unwrap().is_zero());
    }

    #[test]
    fn contact_decomposition_examples() {
        let ctx = ctx1(2);
        let y1 = ctx.y(1, &[1]);
        let y11 = ctx.y(1, &[1, 1]);
        let parts = contact_decompose(&dy(1, mi(&[]), 0), &ctx).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].1, dx(1, 1).scale(&y1));
        assert_eq!(parts[1].1, contact_one_form(1, &mi(&[]), &ctx));

        let parts = contact_decompose(&dx(1, 0), &ctx).unwrap();
        assert_eq!(parts, vec![(0, dx(1, 1))]);

        let w = contact_one_form(1, &mi(&[]), &ctx).lifted(2);
        let w1 = contact_one_form(1, &mi(&[1]), &ctx);
        let rho = dy(1, mi(&[1]), 1).wedge(&dy(1, mi(&[]), 1));
        let parts = contact_decompose(&rho, &ctx).unwrap();
        assert_eq!(parts.len(), 3);
        assert!(parts[0].1.is_zero());
        let expected1 = dx(1, 2).scale(&y11).wedge(&w).add(&w1.scale(&y1).wedge(&dx(1, 2)));
        assert_eq!(parts[1].1, expected1);
        assert_eq!(parts[2].1, w1.wedge(&w));
    }

    #[test]
    fn cartan_first_order() {
        let ctx = ctx1(1);
        let y1 = ctx.y(1, &[1]);
        let l = Expr::ratio(1, 2) * y1.pow(2).unwrap();
        let theta = cartan_form(&l, 1, &ctx).unwrap();
        let expected = dy(1, mi(&[]), 1).scale(&y1).sub(&dx(1, 1).scale(&(Expr::ratio(1, 2) * y1.pow(2).unwrap())));
        assert_eq!(theta, expected);
        assert_eq!(theta.order(), 1);
    }

    #[test]
    fn cartan_second_order() {
        let ctx = ctx1(2);
        let y1 = ctx.y(1, &[1]);
        let y11 = ctx.y(1, &[1, 1]);
        let y111 = ctx.y(1, &[1, 1, 1]);
        let l = Expr::ratio(1, 2) * y11.pow(2).unwrap();
        let theta = cartan_form(&l, 2, &ctx).unwrap();
        let w = contact_one_form(1, &mi(&[]), &ctx).lifted(3);
        let w1 = contact_one_form(1, &mi(&[1]), &ctx).lifted(3);
        let expected = dx(1, 3).scale(&l).sub(&w.scale(&y111)).add(&w1.scale(&y11));
        assert_eq!(theta, expected);
        assert_eq!(theta.order(), 3);
        let _ = y1;
    }

    #[test]
    fn cartan_degenerate() {
        let ctx = ctx1(1);
        let y = ctx.y(1, &[]);
        assert_eq!(cartan_form(&y, 1, &ctx).unwrap(), dx(1, 1).scale(&y));
        assert_eq!(cartan_form(&y, 0, &ctx), Err(FormsError::OrderZero));
    }

    #[test]
    fn prolong_isomorphism_examples() {
        let ctx = ctx1(2);
        let id = FiberedIso::identity(&ctx);
        for (c, v) in prolong_isomorphism(&id, 2, &ctx).unwrap() {
            assert_eq!(v, Expr::sym(c));
        }
        let q = |a: i64| Rational::from_integer(a.into());
        let y = ctx.y(1, &[]);
        let scale = FiberedIso::new(vec![vec![q(2)]], vec![q(0)], vec![y.clone()], &ctx).unwrap();
        let b = prolong_isomorphism(&scale, 2, &ctx).unwrap();
        assert_eq!(b[&Coord::jet(1, mi(&[1]))], Expr::ratio(1, 2) * ctx.y(1, &[1]));
        assert_eq!(b[&Coord::jet(1, mi(&[1, 1]))], Expr::ratio(1, 4) * ctx.y(1, &[1, 1]));
        let square = FiberedIso::new(vec![vec![q(1)]], vec![q(0)], vec![&y * &y], &ctx).unwrap();
        let b = prolong_isomorphism(&square, 1, &ctx).unwrap();
        assert_eq!(b[&Coord::jet(1, mi(&[1]))], Expr::integer(2) * &y * ctx.y(1, &[1]));
    }

    #[test]
    fn pullback_examples() {
        let ctx = ctx1(1);
        let q = |a: i64| Rational::from_integer(a.into());
        let y = ctx.y(1, &[]);
        let scale = FiberedIso::new(vec![vec![q(2)]], vec![q(0)], vec![y.clone()], &ctx).unwrap();
        assert_eq!(pullback(&dx(1, 0), &scale, &ctx).unwrap(), dx(1, 0).scale(&Expr::integer(2)));
        let square = FiberedIso::new(vec![vec![q(1)]], vec![q(0)], vec![&y * &y], &ctx).unwrap();
        assert_eq!(pullback(&dx(1, 0).scale(&y), &square, &ctx).unwrap(), dx(1, 0).scale(&(&y * &y)));
        assert_eq!(
            pullback(&dy(1, mi(&[]), 0), &square, &ctx).unwrap(),
            dy(1, mi(&[]), 0).scale(&(Expr::integer(2) * &y))
        );
    }

    #[test]
    fn singular_base_map() {
        let ctx = JetContext::new(2, 1, 1).unwrap();
        let q = |a: i64| Rational::from_integer(a.into());
        let err =
            FiberedIso::new(vec![vec![q(1), q(2)], vec![q(2), q(4)]], vec![q(0), q(0)], vec![ctx.y(1, &[])], &ctx);
        assert_eq!(err, Err(FormsError::SingularBaseMap));
    }

    #[test]
    fn rendering() {
        let ctx = JetContext::with_names(1, vec!["x".into()], vec!["u".into()]).unwrap();
        let u1 = ctx.y(1, &[1]);
        let theta = cartan_form(&(Expr::ratio(1, 2) * u1.pow(2).unwrap()), 1, &ctx).unwrap();
        assert_eq!(theta.render(&ctx), "-1/2*u_{1}^2 dx + u_{1} du");
        let c = cartan_form_contact(&(Expr::ratio(1, 2) * u1.pow(2).unwrap()), 1, &ctx).unwrap();
        assert_eq!(c.render(&ctx), "1/2*u_{1}^2 dx + u_{1} w^1");
    }
}
