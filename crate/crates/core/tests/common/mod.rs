//! Seeded random corpora and independent oracles shared by integration tests.
#![allow(dead_code)]

use jetvar::forms::{self, Basis};
use jetvar::{Coord, DiffForm, Expr, JetContext, Lagrangian, MultiIndex, Rational};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 20_240_611;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational(rng: &mut impl Rng) -> Rational {
    let mut p: i64 = rng.random_range(-5..=5);
    if p == 0 {
        p = 1;
    }
    let q: i64 = rng.random_range(1..=4);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Base coordinates and all jet coordinates of order at most `r`.
pub fn coordinate_pool(ctx: &JetContext, r: usize) -> Vec<Coord> {
    let mut pool: Vec<Coord> = (1..=ctx.n()).map(Coord::Base).collect();
    for field in 1..=ctx.m() {
        for index in MultiIndex::all_up_to(ctx.n(), r) {
            pool.push(Coord::jet(field, index));
        }
    }
    pool
}

/// Random polynomial with `terms` monomials of degree `1..=degree` over `pool`.
pub fn random_polynomial(rng: &mut impl Rng, pool: &[Coord], terms: usize, degree: usize) -> Expr {
    let mut e = Expr::zero();
    for _ in 0..terms {
        let d = rng.random_range(1..=degree);
        let mut mono = Expr::constant(rational(rng));
        for _ in 0..d {
            let c = &pool[rng.random_range(0..pool.len())];
            mono = &mono * &Expr::sym(c.clone());
        }
        e = &e + &mono;
    }
    e
}

/// Random polynomial Lagrangian of order exactly `r` in its top coordinates.
pub fn random_lagrangian(rng: &mut impl Rng, n: usize, m: usize, r: usize, degree: usize) -> Lagrangian {
    let ctx = JetContext::new(n, m, r).unwrap();
    let pool = coordinate_pool(&ctx, r);
    let top: Vec<Coord> = pool.iter().filter(|c| c.jet_order() == r).cloned().collect();
    let terms = rng.random_range(1..=3);
    let mut density = random_polynomial(rng, &pool, terms, degree);
    // one monomial that genuinely involves a top-order coordinate
    let d = rng.random_range(1..=degree);
    let mut mono = Expr::constant(rational(rng)) * Expr::sym(top[rng.random_range(0..top.len())].clone());
    for _ in 1..d {
        mono = &mono * &Expr::sym(pool[rng.random_range(0..pool.len())].clone());
    }
    density = &density + &mono;
    Lagrangian::with_order(density, &ctx, r).unwrap()
}

/// The 50-Lagrangian corpus: `n, m ∈ {1, 2}`, `r ∈ {1, 2}`, degree at most 3.
pub fn lagrangian_corpus(count: usize, seed: u64) -> Vec<Lagrangian> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=2);
            let m = rng.random_range(1..=2);
            let r = rng.random_range(1..=2);
            random_lagrangian(&mut rng, n, m, r, 3)
        })
        .collect()
}

/// Random `(n-1)`-form with polynomial coefficients of jet order at most 1.
pub fn random_eta(rng: &mut impl Rng, n: usize, m: usize) -> (DiffForm, JetContext) {
    let ctx = JetContext::new(n, m, 1).unwrap();
    let pool = coordinate_pool(&ctx, 1);
    let terms = rng.random_range(1..=2);
    if n == 1 {
        return (DiffForm::scalar(random_polynomial(rng, &pool, terms + 1, 3), 1), ctx);
    }
    let mut bases: Vec<Basis> = (1..=n).map(Basis::Dx).collect();
    for field in 1..=m {
        for index in MultiIndex::all_up_to(n, 1) {
            bases.push(Basis::Dy { field, index });
        }
    }
    let mut eta = DiffForm::zero(1);
    for _ in 0..terms + 1 {
        let b = bases[rng.random_range(0..bases.len())].clone();
        let coef = random_polynomial(rng, &pool, terms, 3);
        eta = eta.add(&DiffForm::term(coef, vec![b], 1));
    }
    (eta, ctx)
}

/// Random second-order ODE system in `m` unknowns with polynomial entries of degree at most 2.
pub fn random_ode_system(rng: &mut impl Rng, m: usize) -> Vec<Expr> {
    let ctx = JetContext::new(1, m, 2).unwrap();
    let pool = coordinate_pool(&ctx, 2);
    (0..m)
        .map(|_| {
            let terms = rng.random_range(1..=3);
            random_polynomial(rng, &pool, terms, 2)
        })
        .collect()
}

/// `L ω_0` lifted to `order`.
pub fn lagrangian_form(density: &Expr, ctx: &JetContext, order: usize) -> DiffForm {
    forms::omega0(ctx, order).scale(density)
}

/// Random rational values for the given coordinates.
pub fn random_point(rng: &mut impl Rng, coords: &[Coord]) -> Vec<(Coord, Rational)> {
    coords
        .iter()
        .map(|c| {
            let p: i64 = rng.random_range(-7..=7);
            let q: i64 = rng.random_range(1..=5);
            (c.clone(), Rational::new(BigInt::from(p), BigInt::from(q)))
        })
        .collect()
}

pub fn eval_at(e: &Expr, point: &[(Coord, Rational)]) -> Option<Rational> {
    e.eval_exact(&|c| point.iter().find(|(k, _)| k == c).map(|(_, v)| v.clone()))
}
