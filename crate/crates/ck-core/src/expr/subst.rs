//! Coordinate/time/mass substitutions.
//!
//! A substitution maps symbols to expressions and optionally rescales the
//! clock by a parameter monomial `J` (`t_old = J * t_new`) and the whole
//! integrand by a global scale. Velocities follow the chain rule
//! automatically: if a coordinate is dressed as `c -> M*c` (with `M` a
//! parameter monomial) under clock rescale `J`, then `vc -> (M/J)*vc`. An
//! explicit map for a velocity symbol overrides the derived rule. The
//! integrand picks up the Jacobian factor `J` of the time change times the
//! global scale.

use core::fmt;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;

use super::{Coord, Expr, Monomial, ParseError, Symbol};

/// `coeff * j2^p2 * j3^p3` — the only shape allowed for time rescales,
/// global scales, and coordinate dressings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamMonomial {
    pub coeff: f64,
    pub p2: i32,
    pub p3: i32,
}

impl ParamMonomial {
    pub const ONE: ParamMonomial = ParamMonomial {
        coeff: 1.0,
        p2: 0,
        p3: 0,
    };

    pub const fn new(coeff: f64, p2: i32, p3: i32) -> ParamMonomial {
        ParamMonomial { coeff, p2, p3 }
    }

    pub const fn j2() -> ParamMonomial {
        ParamMonomial::new(1.0, 1, 0)
    }

    pub const fn j3() -> ParamMonomial {
        ParamMonomial::new(1.0, 0, 1)
    }

    pub const fn j2j3() -> ParamMonomial {
        ParamMonomial::new(1.0, 1, 1)
    }

    pub fn is_one(&self) -> bool {
        self.coeff == 1.0 && self.p2 == 0 && self.p3 == 0
    }

    pub fn mul(&self, rhs: &ParamMonomial) -> ParamMonomial {
        ParamMonomial::new(self.coeff * rhs.coeff, self.p2 + rhs.p2, self.p3 + rhs.p3)
    }

    /// Formal inverse; the coefficient must be nonzero.
    pub fn inv(&self) -> ParamMonomial {
        ParamMonomial::new(1.0 / self.coeff, -self.p2, -self.p3)
    }

    pub fn div(&self, rhs: &ParamMonomial) -> ParamMonomial {
        self.mul(&rhs.inv())
    }

    pub fn to_expr(&self) -> Expr {
        Expr::from_monomial(Monomial::param(self.p2, self.p3), self.coeff)
    }

    /// Accepts `NUM`, `MON`, or `NUM/MON` where each side is a product of
    /// numbers and `j2`/`j3` powers in the expression grammar, e.g. `j2`,
    /// `j2*j3`, `1/j2`, `1/(j2*j3)`, `j2^2`.
    pub fn parse(text: &str) -> Result<ParamMonomial, ParseError> {
        fn side(text: &str, base_offset: usize) -> Result<ParamMonomial, ParseError> {
            let e = Expr::parse(text).map_err(|mut err| {
                err.offset += base_offset;
                err
            })?;
            let mut it = e.terms();
            match (it.next(), it.next()) {
                (Some((m, c)), None) if m.is_param_only() => {
                    Ok(ParamMonomial::new(c, m.p2, m.p3))
                }
                _ => Err(ParseError {
                    offset: base_offset,
                    expected: alloc::vec!["parameter monomial (numbers, j2, j3)"],
                }),
            }
        }
        match text.find('/') {
            None => side(text, 0),
            Some(i) => {
                let num = side(&text[..i], 0)?;
                let den = side(&text[i + 1..], i + 1)?;
                if den.coeff == 0.0 {
                    return Err(ParseError {
                        offset: i + 1,
                        expected: alloc::vec!["nonzero denominator"],
                    });
                }
                Ok(num.div(&den))
            }
        }
    }

    pub fn render(&self) -> String {
        let e = self.to_expr();
        if e.is_zero() {
            String::from("0")
        } else {
            format!("{e}")
        }
    }
}

impl fmt::Display for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Simultaneous symbol substitution with optional clock rescale and global
/// scale. Build with the `with_*` methods; `apply` does the work.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    plain: BTreeMap<Symbol, Expr>,
    dressing: BTreeMap<Coord, ParamMonomial>,
    time: Option<ParamMonomial>,
    scale: Option<ParamMonomial>,
}

impl Substitution {
    pub fn identity() -> Substitution {
        Substitution::default()
    }

    /// Dress a coordinate as `c -> M*c`; its velocity follows the chain
    /// rule under the current time rescale.
    pub fn with_coord(mut self, c: Coord, m: ParamMonomial) -> Substitution {
        self.dressing.insert(c, m);
        self
    }

    /// Map an arbitrary symbol to an expression. If the target is a
    /// coordinate and the expression is a parameter monomial times that same
    /// coordinate, this is recognized as a dressing (so the velocity rule
    /// applies); otherwise the symbol is replaced literally with no derived
    /// velocity rule.
    pub fn with_symbol(mut self, s: Symbol, e: Expr) -> Substitution {
        if let Some(c) = s.as_coord() {
            if let Some(m) = as_dressing_of(&e, c) {
                self.dressing.insert(c, m);
                return self;
            }
        }
        self.plain.insert(s, e);
        self
    }

    /// Clock rescale `t_old = J * t_new`.
    pub fn with_time(mut self, j: ParamMonomial) -> Substitution {
        self.time = if j.is_one() { None } else { Some(j) };
        self
    }

    /// Global prefactor multiplying the substituted integrand.
    pub fn with_scale(mut self, s: ParamMonomial) -> Substitution {
        self.scale = if s.is_one() { None } else { Some(s) };
        self
    }

    pub fn time(&self) -> ParamMonomial {
        self.time.unwrap_or(ParamMonomial::ONE)
    }

    pub fn scale(&self) -> ParamMonomial {
        self.scale.unwrap_or(ParamMonomial::ONE)
    }

    /// The expression substituted for `s`, with velocities derived from
    /// dressings and the time rescale when not explicitly mapped.
    fn effective(&self, s: Symbol) -> Option<Expr> {
        if let Some(e) = self.plain.get(&s) {
            return Some(e.clone());
        }
        if let Some(c) = s.as_coord() {
            if let Some(m) = self.dressing.get(&c) {
                return Some(m.to_expr().mul(&Expr::symbol(s)));
            }
            return None;
        }
        if let Some(c) = s.velocity_of() {
            let m = self.dressing.get(&c).copied().unwrap_or(ParamMonomial::ONE);
            let rate = m.div(&self.time());
            if rate.is_one() {
                return None;
            }
            return Some(rate.to_expr().mul(&Expr::symbol(s)));
        }
        None
    }

    fn apply_symbols(&self, e: &Expr) -> Expr {
        let maps: [Option<Expr>; 10] = Symbol::ALL.map(|s| self.effective(s));
        let mut out = Expr::zero();
        for (m, c) in e.terms() {
            let mut term = Expr::from_monomial(Monomial::param(m.p2, m.p3), c);
            for (s, k) in m.symbol_powers() {
                match &maps[s.index()] {
                    None => term = term.mul(&Expr::from_monomial(Monomial::symbol_pow(s, k), 1.0)),
                    Some(repl) => term = term.mul(&repl.powi(k)),
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitutes into an action integrand: symbol replacement, then the
    /// Jacobian `J` of the clock change and the global scale.
    pub fn apply(&self, e: &Expr) -> Expr {
        let prefactor = self.time().mul(&self.scale());
        let mapped = self.apply_symbols(e);
        if prefactor.is_one() {
            mapped
        } else {
            prefactor.to_expr().mul(&mapped)
        }
    }

    /// The substitution equivalent to applying `self` first and `next`
    /// second: `compose(self, next).apply(e) == next.apply(self.apply(e))`.
    pub fn then(&self, next: &Substitution) -> Substitution {
        let time = self.time().mul(&next.time());
        let scale = self.scale().mul(&next.scale());
        let mut out = Substitution::identity().with_time(time).with_scale(scale);
        for s in Symbol::ALL {
            let through = match self.effective(s) {
                Some(e) => next.apply_symbols(&e),
                None => match next.effective(s) {
                    Some(e) => e,
                    None => {
                        // Identity overall — but a velocity must still be
                        // pinned explicitly, or the combined time rescale
                        // would re-derive a spurious rate for it.
                        if s.velocity_of().is_some() && !out.time().is_one() {
                            out.plain.insert(s, Expr::symbol(s));
                        }
                        continue;
                    }
                },
            };
            if through == Expr::symbol(s) {
                if s.velocity_of().is_some() && !out.time().is_one() {
                    out.plain.insert(s, through);
                }
                continue;
            }
            out.plain.insert(s, through);
        }
        out
    }
}

/// Recognizes `e == M * c` for a parameter monomial `M`.
fn as_dressing_of(e: &Expr, c: Coord) -> Option<ParamMonomial> {
    let mut it = e.terms();
    match (it.next(), it.next()) {
        (Some((m, coeff)), None) => {
            let sym = c.symbol();
            if m.power_of(sym) == 1 && m.symbol_powers().count() == 1 {
                Some(ParamMonomial::new(coeff, m.p2, m.p3))
            } else {
                None
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{plane_action, Coord, EvalEnv, Expr, Symbol};
    use super::{ParamMonomial, Substitution};

    fn p(text: &str) -> Expr {
        Expr::parse(text).unwrap()
    }

    #[test]
    fn coordinate_dressing_reaches_velocity() {
        let s = Substitution::identity().with_coord(Coord::Y, ParamMonomial::j2());
        let out = s.apply(&p("0.5*m*(vx^2 + vy^2) - gamma*(x^2 + y^2)"));
        assert!(out.equals(&p("0.5*m*(vx^2 + j2^2*vy^2) - gamma*(x^2 + j2^2*y^2)")));
    }

    #[test]
    fn time_rescale_divides_undressed_velocities() {
        let s = Substitution::identity()
            .with_coord(Coord::Y, ParamMonomial::j2())
            .with_time(ParamMonomial::j2())
            .with_scale(ParamMonomial::parse("1/j2").unwrap());
        let out = s.apply(&plane_action());
        assert!(out.equals(&p("0.5*m*(j2^-2*vx^2 + vy^2) - gamma*(x^2 + j2^2*y^2)")));
    }

    #[test]
    fn explicit_velocity_map_wins() {
        let s = Substitution::identity()
            .with_time(ParamMonomial::j2())
            .with_symbol(Symbol::Vx, Expr::symbol(Symbol::Vx));
        let out = s.apply(&p("vx"));
        // Prefactor J = j2 still multiplies, but vx itself is pinned.
        assert!(out.equals(&p("j2*vx")));
    }

    #[test]
    fn dressing_is_recognized_from_expressions() {
        let s = Substitution::identity().with_symbol(Symbol::Y, p("j2*y"));
        let out = s.apply(&p("vy^2"));
        assert!(out.equals(&p("j2^2*vy^2")));
        // A general replacement is literal: no chain rule.
        let s = Substitution::identity().with_symbol(Symbol::Y, p("x + y"));
        let out = s.apply(&p("y + vy"));
        assert!(out.equals(&p("x + y + vy")));
    }

    #[test]
    fn identity_substitution_is_identity() {
        let e = p("j2^-2*vx^2 - gamma*x^2 + 3");
        assert_eq!(Substitution::identity().apply(&e), e);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let s1 = Substitution::identity()
            .with_coord(Coord::Y, ParamMonomial::j2())
            .with_time(ParamMonomial::j2())
            .with_scale(ParamMonomial::parse("1/j2").unwrap());
        let s2 = Substitution::identity()
            .with_coord(Coord::Z, ParamMonomial::j3())
            .with_symbol(Symbol::M, p("j3^-2*m"));
        let e = p("0.5*m*(vx^2 + vy^2 + vz^2) - gamma*(x^2 + y^2 + z^2)");
        let sequential = s2.apply(&s1.apply(&e));
        let composed = s1.then(&s2).apply(&e);
        assert!(composed.equals(&sequential));

        // Other order as well.
        let sequential = s1.apply(&s2.apply(&e));
        let composed = s2.then(&s1).apply(&e);
        assert!(composed.equals(&sequential));
    }

    #[test]
    fn param_monomial_parsing() {
        assert_eq!(ParamMonomial::parse("j2").unwrap(), ParamMonomial::j2());
        assert_eq!(
            ParamMonomial::parse("1/j2").unwrap(),
            ParamMonomial::new(1.0, -1, 0)
        );
        assert_eq!(
            ParamMonomial::parse("1/(j2*j3)").unwrap(),
            ParamMonomial::new(1.0, -1, -1)
        );
        assert_eq!(
            ParamMonomial::parse("2*j2^2").unwrap(),
            ParamMonomial::new(2.0, 2, 0)
        );
        assert!(ParamMonomial::parse("x").is_err());
        assert!(ParamMonomial::parse("j2 + j3").is_err());
        let err = ParamMonomial::parse("1/x").unwrap_err();
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn velocity_rate_uses_dressing_over_time() {
        // y -> j2*y with t = j2*j3*t_new: vy -> (j2/(j2*j3))*vy = j3^-1*vy.
        let s = Substitution::identity()
            .with_coord(Coord::Y, ParamMonomial::j2())
            .with_time(ParamMonomial::j2j3());
        let out = s.apply_symbols(&p("vy"));
        assert!(out.equals(&p("j3^-1*vy")));
        let eval = out.eval(&EvalEnv::new().with(Symbol::Vy, 2.0).with_j3(0.5));
        assert!((eval - 4.0).abs() < 1e-12);
    }
}
