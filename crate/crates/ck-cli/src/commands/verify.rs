//! `verify`: seeded randomized checks of every library invariant plus the
//! symbolic catalogue, one pass/fail line per check. `--expect-fail
//! mul-table` injects a sign error into the product table as a negative
//! control: the run must then fail naming the broken law.

use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ck_core::dynamics::{
    angular_momentum, base_exact, contraction_action_check, energy, family_band, family_cylinder,
    family_region3, integrate, Clock, FamilySpec, GridAxis, Kind, OscillatorRun, PolyPath,
};
use ck_core::{
    classify_line_bundle, generalized_rotation, plane_action, plane_embedding,
    plane_fiber_rescale, plane_mass_renormalization, space_action, space_embedding,
    space_first_fiber_rescale, space_second_fiber_rescale, CKScalar, Coord, Displacement, EvalEnv,
    Expr, FiberedSpace, GeometryError, Monomial, ParamMonomial, Sigma, Signature, Substitution,
    Symbol, Unit,
};

use crate::commands::CliError;
use crate::config::RunConfig;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run only the named check
    #[arg(long)]
    pub only: Option<String>,
    /// Negative control: inject the named fault and expect the suite to
    /// catch it (supported: mul-table)
    #[arg(long)]
    pub expect_fail: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fault {
    /// Flip the sign of the j2*j3 component of every product.
    MulTable,
}

struct Ctx {
    seed: u64,
    fault: Option<Fault>,
}

impl Ctx {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt)
    }

    fn mul(&self, a: &CKScalar, b: &CKScalar) -> CKScalar {
        let mut p = a.mul(b).expect("same signature");
        if self.fault == Some(Fault::MulTable) {
            p.a23 = -p.a23;
        }
        p
    }
}

type Outcome = Result<String, String>;
type Check = fn(&Ctx) -> Outcome;

const CHECKS: &[(&str, Check)] = &[
    ("algebra-laws", check_algebra_laws),
    ("algebra-division", check_algebra_division),
    ("scalar-text", check_scalar_text),
    ("expr-roundtrip", check_expr_roundtrip),
    ("substitution-composition", check_substitution_composition),
    ("reduce-idempotence", check_reduce_idempotence),
    ("scalar-consistency", check_scalar_consistency),
    ("reduction-limit", check_reduction_limit),
    ("contraction-catalog", check_contraction_catalog),
    ("mass-renormalization", check_mass_renormalization),
    ("classification", check_classification),
    ("metric-invariance", check_metric_invariance),
    ("boost-transitivity", check_boost_transitivity),
    ("tag-guard", check_tag_guard),
    ("integrator-order", check_integrator_order),
    ("energy-drift", check_energy_drift),
    ("fiber-linearity", check_fiber_linearity),
    ("family-band", check_family_band),
    ("family-cylinder", check_family_cylinder),
    ("family-region3", check_family_region3),
    ("action-split", check_action_split),
];

pub fn run(args: VerifyArgs) -> Result<i32, CliError> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let fault = match args.expect_fail.as_deref() {
        None => None,
        Some("mul-table") => Some(Fault::MulTable),
        Some(other) => {
            return Err(CliError::config(format!(
                "unknown fault '{other}' (supported: mul-table)"
            )))
        }
    };
    let selected: Vec<&(&str, Check)> = CHECKS
        .iter()
        .filter(|(name, _)| args.only.as_deref().map_or(true, |o| o == *name))
        .collect();
    if selected.is_empty() {
        let names: Vec<&str> = CHECKS.iter().map(|(n, _)| *n).collect();
        return Err(CliError::config(format!(
            "--only '{}' matches no check; available: {}",
            args.only.unwrap_or_default(),
            names.join(", ")
        )));
    }

    let ctx = Ctx { seed, fault };
    let mut failures = 0usize;
    for (name, check) in selected.iter() {
        match check(&ctx) {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(reason) => {
                failures += 1;
                println!("FAIL  {name}: {reason}");
            }
        }
    }
    let total = selected.len();
    if failures == 0 {
        println!("ok: {total} check(s) passed (seed {seed})");
        Ok(0)
    } else {
        println!("FAILED: {failures} of {total} check(s) (seed {seed})");
        Ok(1)
    }
}

fn close(u: f64, v: f64) -> bool {
    (u - v).abs() <= 1e-12 * (1.0 + u.abs() + v.abs())
}

fn random_scalar(rng: &mut ChaCha8Rng, sig: Signature) -> CKScalar {
    CKScalar::new(
        sig,
        rng.gen_range(-10.0..10.0),
        rng.gen_range(-10.0..10.0),
        rng.gen_range(-10.0..10.0),
        rng.gen_range(-10.0..10.0),
    )
}

fn scalar_close(a: &CKScalar, b: &CKScalar) -> bool {
    close(a.a0, b.a0) && close(a.a2, b.a2) && close(a.a3, b.a3) && close(a.a23, b.a23)
}

fn check_algebra_laws(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0xa1);
    let mut triples = 0usize;
    for sig in Signature::all() {
        for _ in 0..1000 {
            triples += 1;
            let x = random_scalar(&mut rng, sig);
            let y = random_scalar(&mut rng, sig);
            let z = random_scalar(&mut rng, sig);
            let xy = ctx.mul(&x, &y);
            if ctx.mul(&y, &x) != xy {
                return Err(format!("commutativity violated at signature {sig}"));
            }
            let left = ctx.mul(&xy, &z);
            let right = ctx.mul(&x, &ctx.mul(&y, &z));
            if !scalar_close(&left, &right) {
                return Err(format!("associativity violated at signature {sig}"));
            }
            let dist_l = ctx.mul(&x, &y.add(&z).unwrap());
            let dist_r = xy.add(&ctx.mul(&x, &z)).unwrap();
            if !scalar_close(&dist_l, &dist_r) {
                return Err(format!("distributivity violated at signature {sig}"));
            }
        }
    }
    Ok(format!("{triples} triples across 9 signatures"))
}

fn check_algebra_division(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0xd1);
    let dual = Signature::new(Sigma::Zero, Sigma::Pos);
    // iota/iota = 1 exactly.
    let one = CKScalar::unit(dual, Unit::J2)
        .div_unit(Unit::J2)
        .map_err(|e| format!("iota/iota failed: {e}"))?;
    if one != CKScalar::one(dual) {
        return Err("iota/iota != 1".into());
    }
    // 1/iota has no answer.
    if CKScalar::one(dual).div_unit(Unit::J2).is_ok() {
        return Err("1/iota unexpectedly divisible".into());
    }
    // Divisible elements round-trip exactly at every signature.
    let mut count = 0usize;
    for sig in Signature::all() {
        for _ in 0..100 {
            let mut x = random_scalar(&mut rng, sig);
            if sig.sigma2.is_zero() {
                x.a0 = 0.0;
                x.a3 = 0.0;
            }
            let q = match x.div_unit(Unit::J2) {
                Ok(q) => q,
                Err(e) => return Err(format!("division failed at {sig}: {e}")),
            };
            if q.mul(&CKScalar::unit(sig, Unit::J2)).unwrap() != x {
                return Err(format!("division round trip broke at {sig}"));
            }
            count += 1;
        }
    }
    Ok(format!("iota rules and {count} round trips"))
}

fn check_scalar_text(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0x5e);
    let mut done = 0usize;
    while done < 500 {
        let words: [u64; 4] = rng.gen();
        let v: Vec<f64> = words.iter().map(|&w| f64::from_bits(w)).collect();
        if v.iter().any(|x| !x.is_finite()) {
            continue;
        }
        let sig = Signature::all()[done % 9];
        let x = CKScalar::new(sig, v[0], v[1], v[2], v[3]);
        let back = CKScalar::parse(&x.render(), sig)
            .map_err(|e| format!("reparse of '{}' failed: {e}", x.render()))?;
        let same = [
            (x.a0, back.a0),
            (x.a2, back.a2),
            (x.a3, back.a3),
            (x.a23, back.a23),
        ]
        .iter()
        .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            return Err(format!("'{}' did not round-trip bit-exactly", x.render()));
        }
        done += 1;
    }
    Ok(format!("{done} scalars round-tripped bit-exactly"))
}

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

fn check_expr_roundtrip(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0xe1);
    for _ in 0..200 {
        let e = random_expr(&mut rng, true);
        let text = e.render();
        let back = Expr::parse(&text).map_err(|err| format!("'{text}': {err}"))?;
        if !e.equals(&back) {
            return Err(format!("'{text}' parsed to a different expression"));
        }
        if back.render() != text {
            return Err(format!("'{text}' re-rendered differently"));
        }
    }
    Ok("200 expressions round-tripped".into())
}

fn check_substitution_composition(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0x5b);
    let dressings = [
        ParamMonomial::j2(),
        ParamMonomial::j3(),
        ParamMonomial::j2j3(),
        ParamMonomial::new(2.0, 1, 0),
    ];
    for k in 0..100 {
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
        match k % 3 {
            0 => {
                s1 = s1
                    .with_time(ParamMonomial::j2())
                    .with_scale(ParamMonomial::j2().inv())
            }
            1 => {
                s2 = s2
                    .with_time(ParamMonomial::j3())
                    .with_scale(ParamMonomial::j3().inv())
            }
            _ => {}
        }
        let e = random_expr(&mut rng, false);
        let sequential = s2.apply(&s1.apply(&e));
        let composed = s1.then(&s2).apply(&e);
        if !sequential.equals(&composed) {
            return Err(format!("composition case {k} diverged"));
        }
    }
    Ok("100 compositions matched sequential application".into())
}

fn check_reduce_idempotence(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0x1d);
    for sig in Signature::all() {
        for _ in 0..50 {
            let e = random_expr(&mut rng, true);
            let once = e.reduce(sig);
            if !once.reduce(sig).equals(&once) {
                return Err(format!("reduce not idempotent at {sig} on {}", e.render()));
            }
        }
    }
    Ok("450 expressions across 9 signatures".into())
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

fn check_scalar_consistency(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0x5c);
    for i in 0..500 {
        let sig = Signature::all()[i % 9];
        let e = random_param_expr(&mut rng, 4);
        let mut acc = CKScalar::zero(sig);
        let j2 = CKScalar::unit(sig, Unit::J2);
        let j3 = CKScalar::unit(sig, Unit::J3);
        for (m, c) in e.terms() {
            let mut term = CKScalar::real(sig, c);
            for _ in 0..m.p2 {
                term = term.mul(&j2).unwrap();
            }
            for _ in 0..m.p3 {
                term = term.mul(&j3).unwrap();
            }
            acc = acc.add(&term).unwrap();
        }
        let folded = e.reduce(sig);
        for ((p2, p3), want) in [
            ((0, 0), acc.a0),
            ((1, 0), acc.a2),
            ((0, 1), acc.a3),
            ((1, 1), acc.a23),
        ] {
            if !close(folded.coeff(&Monomial::param(p2, p3)), want) {
                return Err(format!(
                    "case {i} at {sig}: slot j2^{p2}*j3^{p3} diverged from the scalar algebra"
                ));
            }
        }
    }
    Ok("500 parameter expressions matched the scalar algebra".into())
}

fn check_reduction_limit(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0x91);
    let sig = Signature::new(Sigma::Zero, Sigma::Pos);
    for i in 0..30 {
        let mut e = Expr::zero();
        for &p2 in &[0i32, 1, 2, 3, 4] {
            let pow = if p2 == 2 { 1 } else { rng.gen_range(1..=2) };
            let s = SYMS[rng.gen_range(0..SYMS.len())];
            let m = Monomial::param(p2, 0).mul(&Monomial::symbol_pow(s, pow));
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
        let d = |eps: f64| {
            (e.eval(&env.clone().with_j2(eps)) - red.eval(&env.clone().with_j2(eps))).abs()
        };
        let ratio = d(1e-3) / d(1e-4);
        if !(80.0..=120.0).contains(&ratio) {
            return Err(format!("case {i}: Richardson ratio {ratio} outside [80, 120]"));
        }
    }
    Ok("30 cases with eps^2 scaling confirmed".into())
}

fn expect_route(
    label: &str,
    start: &Expr,
    sub: &Substitution,
    sig: Signature,
    frozen: &[Coord],
    want: &str,
) -> Result<(), String> {
    let got = start
        .contract_action(sub, sig, frozen)
        .map_err(|e| format!("{label}: {e}"))?;
    let want = Expr::parse(want).expect("catalogue expectation parses");
    if got.equals(&want) {
        Ok(())
    } else {
        Err(format!(
            "{label}: got {}, expected {}",
            got.render(),
            want.render()
        ))
    }
}

fn check_contraction_catalog(_ctx: &Ctx) -> Outcome {
    let euclid = Signature::EUCLID;
    let dual2 = Signature::new(Sigma::Zero, Sigma::Pos);
    let dual3 = Signature::new(Sigma::Pos, Sigma::Zero);
    let dual23 = Signature::new(Sigma::Zero, Sigma::Zero);

    // Dressed plane integrand, then its two limits.
    let dressed = plane_embedding().apply(&plane_action());
    let want = Expr::parse("(1/2)*m*(vx^2 + j2^2*vy^2) - gamma*(x^2 + j2^2*y^2)").unwrap();
    if !dressed.equals(&want) {
        return Err("plane embedding produced a different integrand".into());
    }
    expect_route(
        "plane base limit",
        &plane_action(),
        &plane_embedding(),
        dual2,
        &[],
        "(1/2)*m*vx^2 - gamma*x^2",
    )?;
    expect_route(
        "plane fiber action",
        &plane_action(),
        &plane_fiber_rescale(),
        dual2,
        &[Coord::X],
        "(1/2)*m*vy^2 - gamma*x0^2",
    )?;

    // Space embedding and its limits.
    let dressed = space_embedding().apply(&space_action());
    let want = Expr::parse(
        "(1/2)*m*(vx^2 + j2^2*vy^2 + j2^2*j3^2*vz^2) - gamma*(x^2 + j2^2*y^2 + j2^2*j3^2*z^2)",
    )
    .unwrap();
    if !dressed.equals(&want) {
        return Err("space embedding produced a different integrand".into());
    }
    expect_route(
        "space at the euclidean signature",
        &space_action(),
        &space_embedding(),
        euclid,
        &[],
        "(1/2)*m*(vx^2 + vy^2 + vz^2) - gamma*(x^2 + y^2 + z^2)",
    )?;
    expect_route(
        "space plane limit",
        &space_action(),
        &space_embedding(),
        dual3,
        &[],
        "(1/2)*m*(vx^2 + vy^2) - gamma*(x^2 + y^2)",
    )?;
    expect_route(
        "first fiber action",
        &space_action(),
        &space_first_fiber_rescale(),
        dual3,
        &[Coord::X, Coord::Y],
        "(1/2)*m*vz^2 - gamma*(x0^2 + y0^2)",
    )?;
    expect_route(
        "second fiber action",
        &space_action(),
        &space_second_fiber_rescale(),
        dual23,
        &[Coord::X, Coord::Y],
        "(1/2)*m*vz^2 - gamma*(x0^2 + y0^2)",
    )?;
    Ok("7 catalogue routes reproduced".into())
}

fn check_mass_renormalization(_ctx: &Ctx) -> Outcome {
    let via_mass = plane_mass_renormalization().apply(&plane_action());
    let via_time = plane_fiber_rescale().apply(&plane_action());
    if via_mass.equals(&via_time) {
        Ok("mass rescaling reproduces the time-rescaled action".into())
    } else {
        Err(format!(
            "mass route {} != time route {}",
            via_mass.render(),
            via_time.render()
        ))
    }
}

fn check_classification(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0xc1);
    for (sigma, want) in [(Sigma::Pos, 0usize), (Sigma::Zero, 1), (Sigma::Neg, 2)] {
        let bundle = classify_line_bundle(sigma);
        if bundle.count != want || bundle.directions.len() != want {
            return Err(format!(
                "sigma {sigma}: {} isolated lines, expected {want}",
                bundle.count
            ));
        }
        for dir in &bundle.directions {
            for _ in 0..100 {
                let phi = match sigma {
                    Sigma::Neg => rng.gen_range(-3.0..3.0),
                    _ => rng.gen_range(0.0..core::f64::consts::TAU),
                };
                let (x, y) = generalized_rotation(sigma, phi, *dir);
                let cross = x * dir.1 - y * dir.0;
                if cross.abs() > 1e-12 * (1.0 + x.abs() + y.abs()) {
                    return Err(format!("sigma {sigma}: direction {dir:?} not invariant"));
                }
            }
        }
    }
    // Converse: elliptic rotations away from 0 and pi fix no line.
    for _ in 0..100 {
        use core::f64::consts::PI;
        let phi = if rng.gen_bool(0.5) {
            rng.gen_range(0.05..PI - 0.05)
        } else {
            rng.gen_range(PI + 0.05..2.0 * PI - 0.05)
        };
        let (x, y) = generalized_rotation(Sigma::Pos, phi, (1.0, 0.0));
        if (x * 0.0 - y * 1.0).abs() <= 1e-6 {
            return Err(format!("elliptic rotation phi {phi} fixed a line"));
        }
    }
    Ok("counts 0/1/2 with invariant directions".into())
}

fn check_metric_invariance(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0x31);
    let sigmas = [Sigma::Pos, Sigma::Zero, Sigma::Neg];
    for i in 0..1000 {
        let sigma = sigmas[i % 3];
        let phi = match sigma {
            Sigma::Neg => rng.gen_range(-2.0..2.0),
            _ => rng.gen_range(0.0..core::f64::consts::TAU),
        };
        let p1 = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let p2 = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let space = FiberedSpace::plane(sigma);
        let q1 = generalized_rotation(sigma, phi, p1);
        let q2 = generalized_rotation(sigma, phi, p2);
        let before = space
            .metric_interval(&Displacement::plane(p2.0 - p1.0, p2.1 - p1.1))
            .unwrap();
        let after = space
            .metric_interval(&Displacement::plane(q2.0 - q1.0, q2.1 - q1.1))
            .unwrap();
        let tol = 1e-11 * (1.0 + before.norm1() + after.norm1());
        let ok = [
            (before.a0, after.a0),
            (before.a2, after.a2),
            (before.a3, after.a3),
            (before.a23, after.a23),
        ]
        .iter()
        .all(|(a, b)| (a - b).abs() <= tol);
        if !ok {
            return Err(format!(
                "case {i} sigma {sigma}: {} became {}",
                before.render(),
                after.render()
            ));
        }
    }
    Ok("1000 random rotations preserved the interval".into())
}

fn check_boost_transitivity(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0xb0);
    for _ in 0..200 {
        let dx = rng.gen_range(0.1..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let dy = rng.gen_range(-3.0..3.0);
        let target = rng.gen_range(-5.0..5.0);
        let phi = target - dy / dx;
        let (x, y) = generalized_rotation(Sigma::Zero, phi, (dx, dy));
        if x != dx {
            return Err("boost moved the base component".into());
        }
        if (y / x - target).abs() > 1e-12 * (1.0 + target.abs()) {
            return Err(format!("slope {} missed target {target}", y / x));
        }
    }
    Ok("200 slope targets reached exactly".into())
}

fn check_tag_guard(_ctx: &Ctx) -> Outcome {
    let d = Displacement::space(1.0, 2.0, 3.0);
    for sig in Signature::all() {
        let space = FiberedSpace::space(sig.sigma2, sig.sigma3);
        for i in 0..3usize {
            for j in 0..3usize {
                let a = space.component(&d, i).unwrap();
                let b = space.component(&d, j).unwrap();
                let same = space.coords()[i].tag == space.coords()[j].tag;
                match a.add(b) {
                    Ok(_) if !same => {
                        return Err(format!("{sig}: sum across fibers {i},{j} allowed"))
                    }
                    Err(GeometryError::TagMismatch { .. }) if same => {
                        return Err(format!("{sig}: same-fiber sum {i},{j} rejected"))
                    }
                    Err(GeometryError::TagMismatch { .. }) | Ok(_) => {}
                    Err(e) => return Err(format!("unexpected error {e}")),
                }
            }
        }
    }
    Ok("cross-fiber sums rejected at all 9 signatures".into())
}

fn check_integrator_order(_ctx: &Ctx) -> Outcome {
    let err_at = |h: f64| -> f64 {
        let n = (10.0 / h).round() as usize;
        let run = OscillatorRun::new(1.0, 0.5, Clock::T, vec![(1.0, 0.0)], h, n).unwrap();
        let traj = integrate(&run, Kind::Base1d).unwrap();
        traj.samples
            .iter()
            .map(|s| (s.q[0] - base_exact(&run, s.t).0).abs())
            .fold(0.0, f64::max)
    };
    let ratio = err_at(0.01) / err_at(0.005);
    if (3.5..=4.5).contains(&ratio) {
        Ok("halving h divided the error by ~4".into())
    } else {
        Err(format!("error ratio {ratio} outside [3.5, 4.5]"))
    }
}

fn check_energy_drift(_ctx: &Ctx) -> Outcome {
    for (kind, ic) in [
        (Kind::Base1d, vec![(1.0, 0.0)]),
        (Kind::Base2d, vec![(1.0, 0.0), (0.0, 1.0)]),
    ] {
        let run = OscillatorRun::new(1.0, 0.5, Clock::T, ic, 1e-3, 10_000).unwrap();
        let traj = integrate(&run, kind).unwrap();
        let s0 = &traj.samples[0];
        let e0 = energy(&run, &s0.q, &s0.v, kind);
        for s in &traj.samples {
            let e = energy(&run, &s.q, &s.v, kind);
            if (e - e0).abs() / e0 > 1e-6 {
                return Err(format!("relative drift {} for {kind:?}", (e - e0).abs() / e0));
            }
        }
    }
    Ok("relative drift below 1e-6 over 10^4 steps".into())
}

fn check_fiber_linearity(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0xf1);
    for _ in 0..20 {
        let run = OscillatorRun::new(
            1.0,
            0.5,
            Clock::TTilde,
            vec![(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))],
            1e-2,
            100,
        )
        .unwrap();
        let traj = integrate(&run, Kind::FiberFree(Coord::Y)).unwrap();
        let n = traj.samples.len() as f64;
        let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
        for s in &traj.samples {
            st += s.t;
            sy += s.q[0];
            stt += s.t * s.t;
            sty += s.t * s.q[0];
        }
        let slope = (n * sty - st * sy) / (n * stt - st * st);
        let intercept = (sy - slope * st) / n;
        for s in &traj.samples {
            let r = s.q[0] - (intercept + slope * s.t);
            if r.abs() > 1e-12 {
                return Err(format!("linear-fit residual {r}"));
            }
        }
    }
    Ok("free motion linear to 1e-12 (20 random lines)".into())
}

fn band_spec() -> FamilySpec {
    FamilySpec {
        amplitude: 1.0,
        phase: 0.0,
        u0: GridAxis {
            start: -1.0,
            stop: 1.0,
            count: 3,
        },
        y0: GridAxis {
            start: -1.0,
            stop: 1.0,
            count: 3,
        },
        w0: GridAxis::fixed(0.0),
        z0: GridAxis::fixed(0.0),
        horizon: 2.0 * core::f64::consts::PI,
    }
}

fn check_family_band(_ctx: &Ctx) -> Outcome {
    let run = OscillatorRun::new(1.0, 0.5, Clock::T, vec![(0.0, 0.0)], 1e-3, 1).unwrap();
    let members = family_band(&band_spec(), &run).unwrap();
    if members.len() != 9 {
        return Err(format!("{} members from a 3x3 grid", members.len()));
    }
    for m in &members {
        let (u0, y0) = (m.constants[0].1, m.constants[1].1);
        for s in &m.trajectory.samples {
            if s.q[0].abs() > 1.0 + 1e-9 {
                return Err(format!("|x| = {} above the band amplitude", s.q[0].abs()));
            }
            if (s.q[1] - (u0 * s.t + y0)).abs() > 1e-9 * (1.0 + s.t) {
                return Err("fiber line diverged from u0*t + y0".into());
            }
        }
    }
    Ok("9 members fill the band within |x| <= A".into())
}

fn check_family_cylinder(_ctx: &Ctx) -> Outcome {
    let spec = FamilySpec {
        amplitude: 1.0,
        phase: 0.0,
        u0: GridAxis::fixed(0.0),
        y0: GridAxis::fixed(0.0),
        w0: GridAxis {
            start: -1.0,
            stop: 1.0,
            count: 2,
        },
        z0: GridAxis {
            start: 0.0,
            stop: 1.0,
            count: 2,
        },
        horizon: 20.0 * core::f64::consts::PI, // ten periods at omega = 1
    };
    let run = OscillatorRun::new(
        1.0,
        0.5,
        Clock::T,
        vec![(1.0, 0.0), (0.0, 1.0)],
        1e-3,
        1,
    )
    .unwrap();
    let members = family_cylinder(&spec, &run).unwrap();
    for m in &members {
        let s0 = &m.trajectory.samples[0];
        let e0 = energy(&run, &s0.q[..2], &s0.v[..2], Kind::Base2d);
        let l0 = angular_momentum(&run, &s0.q[..2], &s0.v[..2]);
        for s in &m.trajectory.samples {
            let e = energy(&run, &s.q[..2], &s.v[..2], Kind::Base2d);
            let l = angular_momentum(&run, &s.q[..2], &s.v[..2]);
            if (e - e0).abs() / e0 > 1e-6 {
                return Err(format!("energy drift {}", (e - e0).abs() / e0));
            }
            if (l - l0).abs() / l0.abs() > 1e-6 {
                return Err(format!("angular momentum drift {}", (l - l0).abs() / l0.abs()));
            }
        }
    }
    Ok(format!(
        "{} members kept energy and angular momentum over 10 periods",
        members.len()
    ))
}

fn check_family_region3(_ctx: &Ctx) -> Outcome {
    let spec = FamilySpec {
        amplitude: 1.0,
        phase: 0.0,
        u0: GridAxis {
            start: -1.0,
            stop: 1.0,
            count: 2,
        },
        y0: GridAxis {
            start: -1.0,
            stop: 1.0,
            count: 2,
        },
        w0: GridAxis {
            start: -1.0,
            stop: 1.0,
            count: 2,
        },
        z0: GridAxis::fixed(0.0),
        horizon: 2.0 * core::f64::consts::PI,
    };
    let run = OscillatorRun::new(1.0, 0.5, Clock::T, vec![(0.0, 0.0)], 1e-3, 1).unwrap();
    let members = family_region3(&spec, &run).unwrap();
    if members.len() != 8 {
        return Err(format!("{} members from a 2x2x2 grid", members.len()));
    }
    for m in &members {
        for s in &m.trajectory.samples {
            if s.q[0].abs() > 1.0 + 1e-9 {
                return Err(format!("|x| = {} above A in the region", s.q[0].abs()));
            }
        }
    }
    Ok("8 members confined to |x| <= A with free y, z".into())
}

fn check_action_split(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(0xac);
    for i in 0..100 {
        let cubic = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let path = PolyPath {
            x: cubic(&mut rng),
            y: cubic(&mut rng),
            t0: 0.0,
            t1: 1.0,
        };
        for eps in [1e-2, 1e-3] {
            let split = contraction_action_check(1.0, 0.5, &path, eps);
            if split.defect > 1e-10 * (1.0 + split.s0.abs()) {
                return Err(format!(
                    "case {i} eps {eps}: defect {} above tolerance",
                    split.defect
                ));
            }
        }
    }
    Ok("100 cubic paths split exactly at eps in {1e-2, 1e-3}".into())
}
