mod common;

use jetvar::forms::{self, Basis, FiberedIso};
use jetvar::jet::{prolong_section_to, total_derivative};
use jetvar::{Coord, DiffForm, Expr, JetContext, MultiIndex, Rational, SectionSpec};
use proptest::prelude::*;
use rand::Rng;

fn random_form(rng: &mut impl Rng, ctx: &JetContext, order: usize, degree: usize, terms: usize) -> DiffForm {
    let pool = common::coordinate_pool(ctx, order);
    let mut bases: Vec<Basis> = (1..=ctx.n()).map(Basis::Dx).collect();
    for field in 1..=ctx.m() {
        for index in MultiIndex::all_up_to(ctx.n(), order) {
            bases.push(Basis::Dy { field, index });
        }
    }
    let mut rho = DiffForm::zero(order);
    for _ in 0..terms {
        let word: Vec<Basis> = (0..degree).map(|_| bases[rng.random_range(0..bases.len())].clone()).collect();
        let coef = common::random_polynomial(rng, &pool, 2, 3);
        rho = rho.add(&DiffForm::term(coef, word, order));
    }
    rho
}

/// Random isomorphism; `quadratic` adds a `y^2` term to the fiber map.
fn random_iso(rng: &mut impl Rng, ctx: &JetContext, quadratic: bool) -> FiberedIso {
    let n = ctx.n();
    loop {
        let matrix: Vec<Vec<Rational>> = (0..n).map(|_| (0..n).map(|_| common::rational(rng)).collect()).collect();
        let shift: Vec<Rational> = (0..n).map(|_| common::rational(rng)).collect();
        let base: Vec<Coord> = (1..=n).map(Coord::Base).collect();
        let fiber: Vec<Expr> = (1..=ctx.m())
            .map(|s| {
                let y = ctx.y(s, &[]);
                let bend = if quadratic { y.pow(2).unwrap().scale(&common::rational(rng)) } else { Expr::zero() };
                y.scale(&common::rational(rng)) + bend + common::random_polynomial(rng, &base, 1, 2)
            })
            .collect();
        if let Ok(iso) = FiberedIso::new(matrix, shift, fiber, ctx) {
            return iso;
        }
    }
}

fn ctx_for(seed: u64) -> JetContext {
    let n = 1 + (seed % 2) as usize;
    let m = 1 + ((seed / 2) % 2) as usize;
    JetContext::new(n, m, 3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn total_derivatives_commute(seed in any::<u64>()) {
        let ctx = JetContext::new(2, 2, 3).unwrap();
        let mut rng = common::rng(seed);
        let e = common::random_polynomial(&mut rng, &common::coordinate_pool(&ctx, 1), 4, 3);
        let d12 = total_derivative(&total_derivative(&e, 1, &ctx).unwrap(), 2, &ctx).unwrap();
        let d21 = total_derivative(&total_derivative(&e, 2, &ctx).unwrap(), 1, &ctx).unwrap();
        prop_assert_eq!(d12, d21);
    }

    #[test]
    fn total_derivative_obeys_leibniz(seed in any::<u64>(), i in 1usize..=2) {
        let ctx = JetContext::new(2, 2, 3).unwrap();
        let mut rng = common::rng(seed);
        let pool = common::coordinate_pool(&ctx, 1);
        let f = common::random_polynomial(&mut rng, &pool, 3, 2);
        let g = common::random_polynomial(&mut rng, &pool, 3, 2) + Expr::sin(Expr::sym(pool[rng.random_range(0..pool.len())].clone()));
        let d = |e: &Expr| total_derivative(e, i, &ctx).unwrap();
        prop_assert_eq!(d(&(&f * &g)), d(&f) * &g + &f * d(&g));
    }

    #[test]
    fn total_derivative_is_the_chain_rule_along_sections(seed in any::<u64>(), i in 1usize..=2) {
        let ctx = JetContext::new(2, 2, 3).unwrap();
        let mut rng = common::rng(seed);
        let e = common::random_polynomial(&mut rng, &common::coordinate_pool(&ctx, 1), 4, 3);
        let base: Vec<Coord> = (1..=2).map(Coord::Base).collect();
        let comps = (0..2).map(|_| common::random_polynomial(&mut rng, &base, 3, 3)).collect();
        let section = SectionSpec::new(comps, &ctx).unwrap();
        let jet = prolong_section_to(&section, 2, 2);
        let lhs = total_derivative(&e, i, &ctx).unwrap().substitute(&jet).unwrap();
        let rhs = e.substitute(&jet).unwrap().partial(&Coord::Base(i));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), degree in 0usize..=2) {
        let ctx = ctx_for(seed);
        let mut rng = common::rng(seed);
        let rho = random_form(&mut rng, &ctx, 1, degree, 3);
        prop_assert!(forms::exterior_derivative(&forms::exterior_derivative(&rho)).is_zero());
    }

    #[test]
    fn horizontalization_annihilates_contact_forms(seed in any::<u64>(), degree in 0usize..=1) {
        let ctx = ctx_for(seed);
        let mut rng = common::rng(seed);
        let field = rng.random_range(1..=ctx.m());
        let index = MultiIndex::all_up_to(ctx.n(), 1)[rng.random_range(0..=ctx.n())].clone();
        let omega = forms::contact_one_form(field, &index, &ctx);
        let rho = random_form(&mut rng, &ctx, 1, degree, 2).lifted(2);
        let h = forms::horizontalize(&omega.lifted(2).wedge(&rho), &ctx).unwrap();
        prop_assert!(h.is_zero());
    }

    #[test]
    fn contact_components_sum_to_the_lifted_form(seed in any::<u64>(), degree in 1usize..=3) {
        let ctx = ctx_for(seed);
        let mut rng = common::rng(seed);
        let rho = random_form(&mut rng, &ctx, 1, degree, 3);
        let parts = forms::contact_decompose(&rho, &ctx).unwrap();
        let total = parts.iter().fold(DiffForm::zero(2), |acc, (_, p)| acc.add(p));
        prop_assert_eq!(total, rho.lifted(2));
        prop_assert_eq!(&parts[0].1, &forms::horizontalize(&rho, &ctx).unwrap());
    }

    #[test]
    fn pullback_is_functorial(seed in any::<u64>(), degree in 0usize..=2) {
        let ctx = ctx_for(seed);
        let mut rng = common::rng(seed);
        let rho = random_form(&mut rng, &ctx, 1, degree, 2);
        prop_assert_eq!(forms::pullback(&rho, &FiberedIso::identity(&ctx), &ctx).unwrap(), rho.clone());
        let alpha = random_iso(&mut rng, &ctx, false);
        let beta = random_iso(&mut rng, &ctx, true);
        let composed = beta.compose_after(&alpha, &ctx).unwrap();
        let stepwise = forms::pullback(&forms::pullback(&rho, &beta, &ctx).unwrap(), &alpha, &ctx).unwrap();
        prop_assert_eq!(forms::pullback(&rho, &composed, &ctx).unwrap(), stepwise);
    }

    #[test]
    fn pullback_commutes_with_d(seed in any::<u64>(), degree in 0usize..=1) {
        let ctx = ctx_for(seed);
        let mut rng = common::rng(seed);
        let rho = random_form(&mut rng, &ctx, 1, degree, 2);
        let alpha = random_iso(&mut rng, &ctx, true);
        let lhs = forms::pullback(&forms::exterior_derivative(&rho), &alpha, &ctx).unwrap();
        let rhs = forms::exterior_derivative(&forms::pullback(&rho, &alpha, &ctx).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}
