//! Built-in oscillator integrands and the standard substitutions that
//! contract them onto fibered planes and spaces.
//!
//! The two base actions are the plane and 3-space harmonic oscillators in
//! ordinary Euclidean coordinates. The substitutions dress the coordinates
//! with parameter factors (`y -> j2*y`, `z -> j2*j3*z`), optionally rescale
//! the clock to a fiber "time", and carry the matching `1/J` action scale.

use super::{Coord, Expr, ParamMonomial, Substitution, Symbol};

/// `(1/2)*m*(vx^2 + vy^2) - gamma*(x^2 + y^2)`
pub fn plane_action() -> Expr {
    Expr::parse("(1/2)*m*(vx^2 + vy^2) - gamma*(x^2 + y^2)").expect("built-in parses")
}

/// `(1/2)*m*(vx^2 + vy^2 + vz^2) - gamma*(x^2 + y^2 + z^2)`
pub fn space_action() -> Expr {
    Expr::parse("(1/2)*m*(vx^2 + vy^2 + vz^2) - gamma*(x^2 + y^2 + z^2)").expect("built-in parses")
}

/// `y -> j2*y`: embeds the plane oscillator into the parametrized plane.
pub fn plane_embedding() -> Substitution {
    Substitution::identity().with_coord(Coord::Y, ParamMonomial::j2())
}

/// `y -> j2*y` with fiber clock `t = j2*t_tilde` and scale `1/j2`; produces
/// the singular `j2^-2*vx^2` term that only a freeze of `x` can remove.
pub fn plane_fiber_rescale() -> Substitution {
    plane_embedding()
        .with_time(ParamMonomial::j2())
        .with_scale(ParamMonomial::j2().inv())
}

/// `y -> j2*y, m -> j2^-2*m` with the clock untouched: the mass
/// renormalization that reproduces the fiber-rescaled integrand.
pub fn plane_mass_renormalization() -> Substitution {
    plane_embedding().with_symbol(
        Symbol::M,
        Expr::parameter(-2, 0).mul(&Expr::symbol(Symbol::M)),
    )
}

/// `y -> j2*y, z -> j2*j3*z`: embeds the 3-space oscillator.
pub fn space_embedding() -> Substitution {
    plane_embedding().with_coord(Coord::Z, ParamMonomial::j2j3())
}

/// `z -> j3*z` with `t = j3*t_tilde` and scale `1/j3`: the fiber clock of
/// the singly-fibered space (first parameter kept at 1).
pub fn space_first_fiber_rescale() -> Substitution {
    Substitution::identity()
        .with_coord(Coord::Z, ParamMonomial::j3())
        .with_time(ParamMonomial::j3())
        .with_scale(ParamMonomial::j3().inv())
}

/// Full embedding with the innermost fiber clock `t = j2*j3*t_hat` and
/// scale `1/(j2*j3)`.
pub fn space_second_fiber_rescale() -> Substitution {
    space_embedding()
        .with_time(ParamMonomial::j2j3())
        .with_scale(ParamMonomial::j2j3().inv())
}

#[cfg(test)]
mod tests {
    use super::super::{Coord, EvalEnv, Expr, Symbol};
    use super::*;
    use crate::algebra::{Sigma, Signature};

    fn p(text: &str) -> Expr {
        Expr::parse(text).unwrap()
    }

    #[test]
    fn plane_embedding_dresses_y() {
        let out = plane_embedding().apply(&plane_action());
        assert!(out.equals(&p(
            "(1/2)*m*(vx^2 + j2^2*vy^2) - gamma*(x^2 + j2^2*y^2)"
        )));
    }

    #[test]
    fn contracted_plane_base() {
        let out = plane_embedding()
            .apply(&plane_action())
            .reduce(Signature::plane(Sigma::Zero));
        assert!(out.equals(&p("(1/2)*m*vx^2 - gamma*x^2")));
    }

    #[test]
    fn fiber_rescale_is_singular_without_freeze() {
        let out = plane_fiber_rescale().apply(&plane_action());
        assert!(out.equals(&p(
            "(1/2)*m*(j2^-2*vx^2 + vy^2) - gamma*(x^2 + j2^2*y^2)"
        )));
        assert!(out.restrict_fiber(&[]).is_err());
    }

    #[test]
    fn plane_fiber_action_after_freeze() {
        let out = plane_action()
            .contract_action(
                &plane_fiber_rescale(),
                Signature::plane(Sigma::Zero),
                &[Coord::X],
            )
            .unwrap();
        assert!(out.equals(&p("(1/2)*m*vy^2 - gamma*x0^2")));
    }

    #[test]
    fn mass_renormalization_reproduces_fiber_rescale() {
        let renorm = plane_mass_renormalization().apply(&plane_action());
        let rescaled = plane_fiber_rescale().apply(&plane_action());
        assert!(renorm.equals(&rescaled));
    }

    #[test]
    fn space_embedding_matches_pattern() {
        let out = space_embedding().apply(&space_action());
        assert!(out.equals(&p(
            "(1/2)*m*(vx^2 + j2^2*vy^2 + j2^2*j3^2*vz^2) - gamma*(x^2 + j2^2*y^2 + j2^2*j3^2*z^2)"
        )));
    }

    #[test]
    fn doubly_dressed_space_reduces_to_plane_at_first_level() {
        let out = space_embedding()
            .apply(&space_action())
            .reduce(Signature::new(Sigma::Pos, Sigma::Zero));
        assert!(out.equals(&p("(1/2)*m*(vx^2 + vy^2) - gamma*(x^2 + y^2)")));
    }

    #[test]
    fn first_fiber_rescale_matches_pattern() {
        let out = space_first_fiber_rescale().apply(&space_action());
        assert!(out.equals(&p(
            "(1/2)*m*(j3^-2*vx^2 + j3^-2*vy^2 + vz^2) - gamma*(x^2 + y^2 + j3^2*z^2)"
        )));
    }

    #[test]
    fn first_fiber_action_keeps_both_constants() {
        let out = space_action()
            .contract_action(
                &space_first_fiber_rescale(),
                Signature::new(Sigma::Pos, Sigma::Zero),
                &[Coord::X, Coord::Y],
            )
            .unwrap();
        assert!(out.equals(&p("(1/2)*m*vz^2 - gamma*(x0^2 + y0^2)")));
    }

    #[test]
    fn second_fiber_action_keeps_both_constants() {
        let out = space_action()
            .contract_action(
                &space_second_fiber_rescale(),
                Signature::new(Sigma::Zero, Sigma::Zero),
                &[Coord::X, Coord::Y],
            )
            .unwrap();
        assert!(out.equals(&p("(1/2)*m*vz^2 - gamma*(x0^2 + y0^2)")));
    }

    #[test]
    fn euclid_signature_leaves_space_action_unchanged() {
        let out = space_action()
            .contract_action(&space_embedding(), Signature::EUCLID, &[])
            .unwrap();
        assert!(out.equals(&space_action()));
    }

    #[test]
    fn fiber_motion_is_free() {
        // In the contracted fiber action the y equation of motion is
        // trivial: no y-dependence in the potential, constant mass term.
        let out = plane_action()
            .contract_action(
                &plane_fiber_rescale(),
                Signature::plane(Sigma::Zero),
                &[Coord::X],
            )
            .unwrap();
        let env = EvalEnv::new().with(Symbol::M, 1.0).with(Symbol::Vy, 2.0);
        let dv = 1e-6;
        let env2 = EvalEnv::new().with(Symbol::M, 1.0).with(Symbol::Vy, 2.0 + dv);
        // dL/dvy = m*vy, and no y term at all.
        assert!(((out.eval(&env2) - out.eval(&env)) / dv - 2.0).abs() < 1e-3);
        assert!(out
            .terms()
            .all(|(m, _)| m.power_of(Symbol::Y) == 0));
    }
}
