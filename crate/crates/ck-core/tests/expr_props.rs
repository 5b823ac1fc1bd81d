//! Randomized checks of the expression engine: parser round-trips,
//! substitution composition, reduction idempotence, agreement with the
//! scalar algebra, and the small-parameter limit of reduction.

use ck_core::{
    CKScalar, Coord, EvalEnv, Expr, Monomial, ParamMonomial, Sigma, Signature, Substitution,
    Symbol,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SYMS: [Symbol; 10] = [
    Symbol::Gamma,
    Symbol::M,
    Symbol::Vx,
    Symbol::Vy,
    Symbol::Vz,
    Symbol::X,
    Symbol::X0,
    Symbol::Y,
    Symbol::Y0,
    Symbol::Z,
];

fn random_monomial(rng: &mut ChaCha8Rng, laurent: bool) -> Monomial {
    let span = if laurent { -3..=3 } else { 0..=3 };
    let mut m = Monomial::param(rng.gen_range(span.clone()), rng.gen_range(span));
    for _ in 0..rng.gen_range(0..3) {
        let s = SYMS[rng.gen_range(0..SYMS.len())];
        m = m.mul(&Monomial::symbol_pow(s, rng.gen_range(1..=3)));
    }
    m
}

fn random_expr(rng: &mut ChaCha8Rng, laurent: bool) -> Expr {
    let mut e = Expr::zero();
    for _ in 0..rng.gen_range(1..=6) {
        let mut c: f64 = rng.gen_range(-5.0..5.0);
        if c == 0.0 {
            c = 1.0;
        }
        e = e.add(&Expr::from_monomial(random_monomial(rng, laurent), c));
    }
    e
}

fn exact_eq(a: &Expr, b: &Expr) -> bool {
    a.terms().collect::<Vec<_>>() == b.terms().collect::<Vec<_>>()
}

#[test]
fn rendered_expressions_parse_back_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe599);
    for _ in 0..200 {
        let e = random_expr(&mut rng, true);
        let text = e.render();
        let back = Expr::parse(&text).unwrap_or_else(|err| panic!("{text}: {err}"));
        assert!(e.equals(&back), "{text}");
        assert_eq!(back.render(), text, "render is a normal form");
    }
}

#[test]
fn substitutions_compose() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c0);
    let dressings = [
        ParamMonomial::j2(),
        ParamMonomial::j3(),
        ParamMonomial::j2j3(),
        ParamMonomial::new(2.0, 1, 0),
        ParamMonomial::new(1.0, 0, 2),
    ];
    for k in 0..200 {
        let mut s1 = Substitution::identity();
        let mut s2 = Substitution::identity();
        for c in [Coord::X, Coord::Y, Coord::Z] {
            if rng.gen_bool(0.6) {
                s1 = s1.with_coord(c, dressings[rng.gen_range(0..dressings.len())].clone());
            }
            if rng.gen_bool(0.6) {
                s2 = s2.with_coord(c, dressings[rng.gen_range(0..dressings.len())].clone());
            }
        }
        // At most one of the two carries a time rescale (and its scale).
        match k % 3 {
            0 => s1 = s1.with_time(ParamMonomial::j2()).with_scale(ParamMonomial::j2().inv()),
            1 => s2 = s2.with_time(ParamMonomial::j3()).with_scale(ParamMonomial::j3().inv()),
            _ => {}
        }
        let e = random_expr(&mut rng, false);
        let sequential = s2.apply(&s1.apply(&e));
        let composed = s1.then(&s2).apply(&e);
        assert!(
            sequential.equals(&composed),
            "case {k}:\n  seq {}\n  cmp {}",
            sequential.render(),
            composed.render()
        );
    }
}

#[test]
fn reduce_is_idempotent_on_random_expressions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1de);
    for sig in Signature::all() {
        for _ in 0..100 {
            let e = random_expr(&mut rng, true);
            let once = e.reduce(sig);
            let twice = once.reduce(sig);
            assert!(exact_eq(&once, &twice), "{} at {sig:?}", e.render());
        }
    }
}

/// Interprets a parameter-only expression through the scalar algebra:
/// every monomial j2^p2*j3^p3 becomes the corresponding product of units.
fn as_scalar(e: &Expr, sig: Signature) -> CKScalar {
    let mut acc = CKScalar::zero(sig);
    let j2 = CKScalar::new(sig, 0.0, 1.0, 0.0, 0.0);
    let j3 = CKScalar::new(sig, 0.0, 0.0, 1.0, 0.0);
    for (m, c) in e.terms() {
        assert!(m.is_param_only() && !m.has_negative_param());
        let mut term = CKScalar::real(sig, c);
        let (p2, p3) = (m.p2, m.p3);
        for _ in 0..p2 {
            term = term.mul(&j2).unwrap();
        }
        for _ in 0..p3 {
            term = term.mul(&j3).unwrap();
        }
        acc = acc.add(&term).unwrap();
    }
    acc
}

fn random_param_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.3) {
        match rng.gen_range(0..3) {
            0 => Expr::constant(rng.gen_range(-3.0..3.0)),
            1 => Expr::parameter(1, 0),
            _ => Expr::parameter(0, 1),
        }
    } else {
        let a = random_param_expr(rng, depth - 1);
        let b = random_param_expr(rng, depth - 1);
        match rng.gen_range(0..3) {
            0 => a.add(&b),
            1 => a.sub(&b),
            _ => a.mul(&b),
        }
    }
}

#[test]
fn parameter_expressions_agree_with_the_scalar_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa9ee);
    let close = |u: f64, v: f64| (u - v).abs() <= 1e-12 * (1.0 + u.abs() + v.abs());
    for i in 0..500 {
        let sig = Signature::all()[i % 9];
        let e = random_param_expr(&mut rng, 4);
        let via_scalar = as_scalar(&e, sig);
        let folded = e.reduce(sig);
        let coeff_at = |p2: i32, p3: i32| folded.coeff(&Monomial::param(p2, p3));
        for ((p2, p3), got) in [
            ((0, 0), via_scalar.a0),
            ((1, 0), via_scalar.a2),
            ((0, 1), via_scalar.a3),
            ((1, 1), via_scalar.a23),
        ] {
            assert!(
                close(coeff_at(p2, p3), got),
                "slot j2^{p2}*j3^{p3}: expr {} vs scalar {}",
                folded.render(),
                via_scalar.render()
            );
        }
    }
}

#[test]
fn reduction_is_the_small_parameter_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x11b);
    let sig = Signature::new(Sigma::Zero, Sigma::Pos);
    for _ in 0..50 {
        // All-positive coefficients and symbol values so nothing cancels,
        // with the quadratic term kept well away from zero so it dominates
        // the annihilated remainder.
        let mut e = Expr::zero();
        for &p2 in &[0i32, 1, 2, 3, 4] {
            let mut m = Monomial::param(p2, 0);
            let pow = if p2 == 2 { 1 } else { rng.gen_range(1..=2) };
            let s = SYMS[rng.gen_range(0..SYMS.len())];
            m = m.mul(&Monomial::symbol_pow(s, pow));
            let c = if p2 == 2 {
                rng.gen_range(1.0..5.0)
            } else {
                rng.gen_range(0.1..5.0)
            };
            e = e.add(&Expr::from_monomial(m, c));
        }
        let mut env = EvalEnv::new();
        for s in SYMS {
            env.set(s, rng.gen_range(0.5..2.0));
        }
        let red = e.reduce(sig);
        // The limit itself agrees exactly: positive powers vanish at 0.
        let lim_e = e.eval(&env.clone().with_j2(0.0));
        let lim_r = red.eval(&env.clone().with_j2(0.0));
        assert_eq!(lim_e, lim_r);
        // At finite epsilon the gap is the annihilated part, order eps^2.
        let d = |eps: f64| {
            (e.eval(&env.clone().with_j2(eps)) - red.eval(&env.clone().with_j2(eps))).abs()
        };
        let ratio = d(1e-3) / d(1e-4);
        assert!((80.0..=120.0).contains(&ratio), "Richardson ratio {ratio}");
    }
}

proptest! {
    /// The expression parser never panics, and error offsets stay in range.
    #[test]
    fn parser_total_on_arbitrary_input(text in ".{0,60}") {
        if let Err(e) = Expr::parse(&text) {
            prop_assert!(e.offset <= text.len());
        }
    }

    /// Evaluation is compatible with addition and multiplication.
    #[test]
    fn eval_respects_ring_ops(
        seed in any::<u64>(),
        x in -2.0f64..2.0,
        j2 in 0.01f64..1.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_expr(&mut rng, false);
        let b = random_expr(&mut rng, false);
        let env = EvalEnv::new().with(Symbol::X, x).with_j2(j2);
        let sum = a.add(&b).eval(&env);
        let prod = a.mul(&b).eval(&env);
        let (ea, eb) = (a.eval(&env), b.eval(&env));
        prop_assert!((sum - (ea + eb)).abs() <= 1e-9 * (1.0 + sum.abs()));
        prop_assert!((prod - ea * eb).abs() <= 1e-9 * (1.0 + prod.abs() + ea.abs() * eb.abs()));
    }
}
