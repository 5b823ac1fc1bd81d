//! Randomized geometry checks: invariance of the interval under the
//! one-parameter automorphisms, behavior of the isolated-line bundle, and
//! the type-level guard on cross-fiber sums.

use ck_core::{
    classify_line_bundle, generalized_rotation, Displacement, FiberedSpace, GeometryError, Sigma,
    Signature,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIGMAS: [Sigma; 3] = [Sigma::Pos, Sigma::Zero, Sigma::Neg];

#[test]
fn interval_is_invariant_under_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e0);
    for _ in 0..1000 {
        let sigma = SIGMAS[rng.gen_range(0..3)];
        // Hyperbolic angles are kept moderate so coordinate growth does not
        // drown the comparison in cancellation noise.
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
        let scale = 1.0 + before.norm1() + after.norm1();
        for (a, b) in [
            (before.a0, after.a0),
            (before.a2, after.a2),
            (before.a3, after.a3),
            (before.a23, after.a23),
        ] {
            assert!(
                (a - b).abs() <= 1e-11 * scale,
                "sigma {sigma}, phi {phi}: {} vs {}",
                before.render(),
                after.render()
            );
        }
    }
}

#[test]
fn isolated_directions_are_fixed_lines() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x150);
    for sigma in SIGMAS {
        let bundle = classify_line_bundle(sigma);
        for dir in &bundle.directions {
            for _ in 0..100 {
                let phi = match sigma {
                    Sigma::Neg => rng.gen_range(-3.0..3.0),
                    _ => rng.gen_range(0.0..core::f64::consts::TAU),
                };
                let (x, y) = generalized_rotation(sigma, phi, *dir);
                // Collinearity: the image is a scalar multiple of dir.
                let cross = x * dir.1 - y * dir.0;
                assert!(
                    cross.abs() <= 1e-12 * (1.0 + x.abs() + y.abs()),
                    "sigma {sigma}, phi {phi}, dir {dir:?} -> ({x}, {y})"
                );
            }
        }
    }
}

#[test]
fn elliptic_rotations_move_every_direction() {
    // Converse for sigma = +1: away from 0 and pi (mod 2pi) no direction
    // stays on its own line; at pi the map is -id and every line is fixed,
    // so that angle is excluded by construction.
    let mut rng = ChaCha8Rng::seed_from_u64(0xe11);
    use core::f64::consts::PI;
    for _ in 0..200 {
        let phi = if rng.gen_bool(0.5) {
            rng.gen_range(0.05..PI - 0.05)
        } else {
            rng.gen_range(PI + 0.05..2.0 * PI - 0.05)
        };
        let dir = (1.0, 0.0);
        let (x, y) = generalized_rotation(Sigma::Pos, phi, dir);
        let cross = x * dir.1 - y * dir.0;
        assert!(cross.abs() > 1e-6, "phi {phi} fixed the x-axis");
    }
}

#[test]
fn boosts_act_transitively_on_slopes() {
    // sigma = 0: a shear can send any direction with dx != 0 to any slope.
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a5);
    for _ in 0..500 {
        let dx: f64 = {
            let v: f64 = rng.gen_range(0.1..3.0);
            if rng.gen_bool(0.5) {
                v
            } else {
                -v
            }
        };
        let dy: f64 = rng.gen_range(-3.0..3.0);
        let target: f64 = rng.gen_range(-5.0..5.0);
        let phi = target - dy / dx;
        let (x, y) = generalized_rotation(Sigma::Zero, phi, (dx, dy));
        assert_eq!(x, dx, "shears fix the base component exactly");
        let slope = y / x;
        assert!(
            (slope - target).abs() <= 1e-12 * (1.0 + target.abs()),
            "slope {slope} vs target {target}"
        );
    }
}

#[test]
fn cross_fiber_sums_are_rejected_everywhere() {
    let d = Displacement::space(1.0, 2.0, 3.0);
    for sig in Signature::all() {
        let space = FiberedSpace::space(sig.sigma2, sig.sigma3);
        for i in 0..3usize {
            for j in 0..3usize {
                let a = space.component(&d, i).unwrap();
                let b = space.component(&d, j).unwrap();
                let same_tag = space.coords()[i].tag == space.coords()[j].tag;
                match a.add(b) {
                    Ok(_) => assert!(same_tag, "{sig:?}: {i} + {j} should be rejected"),
                    Err(GeometryError::TagMismatch { .. }) => {
                        assert!(!same_tag, "{sig:?}: {i} + {j} should be allowed")
                    }
                    Err(e) => panic!("unexpected error {e:?}"),
                }
            }
        }
    }
}
