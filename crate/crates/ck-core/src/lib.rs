//! Exact Cayley-Klein scalar arithmetic over two nilpotent-capable parameters,
//! a small symbolic layer for contracting harmonic-oscillator actions onto
//! fibered spaces, and numeric integration of the resulting trajectory families.
//!
//! The crate is `no_std` (with `alloc`); everything that needs a filesystem,
//! serde, or a terminal lives in the companion CLI crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod algebra;
pub mod dynamics;
pub mod expr;
pub mod geometry;

pub use algebra::{AlgebraError, CKScalar, Sigma, Signature, Unit};
pub use expr::{
    plane_action, plane_embedding, plane_fiber_rescale, plane_mass_renormalization, space_action,
    space_embedding, space_first_fiber_rescale, space_second_fiber_rescale, Coord, EvalEnv, Expr,
    ExprError, Monomial, ParamMonomial, ParseError, Substitution, Symbol,
};
pub use geometry::{
    classify_line_bundle, generalized_rotation, rotation_coeffs, Displacement, FiberedSpace,
    GeometryError, IsolatedLines,
};

/// Integer power with the convention `powi(x, 0) == 1` for every `x`,
/// including zero. Negative exponents invert. Works in `no_std` builds
/// (`f64::powi` is not available in `core`).
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut k = n.unsigned_abs();
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::powi;

    #[test]
    fn powi_conventions() {
        assert_eq!(powi(0.0, 0), 1.0);
        assert_eq!(powi(2.0, 10), 1024.0);
        assert_eq!(powi(2.0, -2), 0.25);
        assert_eq!(powi(-1.0, 3), -1.0);
        assert_eq!(powi(0.0, 2), 0.0);
    }
}
