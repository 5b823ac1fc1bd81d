//! Polynomial expressions in the dynamical symbols
//! `m, gamma, x, y, z, vx, vy, vz, x0, y0` and the two parameters `j2, j3`.
//!
//! Everything is kept in normal form: a sum of monomials
//! `coeff * j2^p2 * j3^p3 * (symbol powers)`, where the parameter exponents
//! are Laurent (may be negative) and symbol exponents are nonnegative.
//! Negative parameter powers are the precise form of the "indefinite" terms
//! that appear when an action is rescaled by a soon-to-be-nilpotent
//! parameter; they are never simplified away by [`Expr::reduce`] and become a
//! hard error if they survive a fiber restriction.

use core::fmt;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::{Sigma, Signature};
use crate::powi;

mod catalog;
mod parse;
mod subst;

pub use catalog::{
    plane_action, plane_embedding, plane_fiber_rescale, plane_mass_renormalization, space_action,
    space_embedding, space_first_fiber_rescale, space_second_fiber_rescale,
};
pub use parse::ParseError;
pub use subst::{ParamMonomial, Substitution};

/// Relative tolerance for coefficient comparison in [`Expr::equals`].
pub const COEFF_REL_TOL: f64 = 1e-12;

/// The dynamical symbols, ordered lexicographically by name so that the
/// derived `Ord` is the rendering order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Gamma,
    M,
    Vx,
    Vy,
    Vz,
    X,
    X0,
    Y,
    Y0,
    Z,
}

impl Symbol {
    pub const ALL: [Symbol; 10] = [
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

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Gamma => "gamma",
            Symbol::M => "m",
            Symbol::Vx => "vx",
            Symbol::Vy => "vy",
            Symbol::Vz => "vz",
            Symbol::X => "x",
            Symbol::X0 => "x0",
            Symbol::Y => "y",
            Symbol::Y0 => "y0",
            Symbol::Z => "z",
        }
    }

    pub fn from_name(name: &str) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|s| s.name() == name)
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }

    /// The coordinate this symbol is the velocity of, if any.
    pub fn velocity_of(self) -> Option<Coord> {
        match self {
            Symbol::Vx => Some(Coord::X),
            Symbol::Vy => Some(Coord::Y),
            Symbol::Vz => Some(Coord::Z),
            _ => None,
        }
    }

    /// The coordinate this symbol names, if any.
    pub fn as_coord(self) -> Option<Coord> {
        match self {
            Symbol::X => Some(Coord::X),
            Symbol::Y => Some(Coord::Y),
            Symbol::Z => Some(Coord::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A spatial coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    X,
    Y,
    Z,
}

impl Coord {
    pub const ALL: [Coord; 3] = [Coord::X, Coord::Y, Coord::Z];

    pub fn symbol(self) -> Symbol {
        match self {
            Coord::X => Symbol::X,
            Coord::Y => Symbol::Y,
            Coord::Z => Symbol::Z,
        }
    }

    pub fn velocity(self) -> Symbol {
        match self {
            Coord::X => Symbol::Vx,
            Coord::Y => Symbol::Vy,
            Coord::Z => Symbol::Vz,
        }
    }

    /// Symbol for the frozen value of this coordinate on a fiber
    /// (`x -> x0`). There is no constant for `z`: nothing in the catalogue
    /// ever freezes the innermost fiber coordinate.
    pub fn fiber_constant(self) -> Option<Symbol> {
        match self {
            Coord::X => Some(Symbol::X0),
            Coord::Y => Some(Symbol::Y0),
            Coord::Z => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::X => "x",
            Coord::Y => "y",
            Coord::Z => "z",
        }
    }

    pub fn from_name(name: &str) -> Option<Coord> {
        match name {
            "x" => Some(Coord::X),
            "y" => Some(Coord::Y),
            "z" => Some(Coord::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coefficient-free part of a term. The derived `Ord` — parameter exponents
/// first, then symbol names, then symbol exponents — is the normal-form
/// ordering used for rendering and comparison.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub p2: i32,
    pub p3: i32,
    syms: BTreeMap<Symbol, u32>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn param(p2: i32, p3: i32) -> Monomial {
        Monomial {
            p2,
            p3,
            syms: BTreeMap::new(),
        }
    }

    pub fn symbol(s: Symbol) -> Monomial {
        Monomial::symbol_pow(s, 1)
    }

    pub fn symbol_pow(s: Symbol, k: u32) -> Monomial {
        let mut syms = BTreeMap::new();
        if k > 0 {
            syms.insert(s, k);
        }
        Monomial { p2: 0, p3: 0, syms }
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        let mut syms = self.syms.clone();
        for (&s, &k) in &rhs.syms {
            *syms.entry(s).or_insert(0) += k;
        }
        Monomial {
            p2: self.p2 + rhs.p2,
            p3: self.p3 + rhs.p3,
            syms,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.p2 == 0 && self.p3 == 0 && self.syms.is_empty()
    }

    pub fn is_param_only(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn has_negative_param(&self) -> bool {
        self.p2 < 0 || self.p3 < 0
    }

    pub fn symbol_powers(&self) -> impl Iterator<Item = (Symbol, u32)> + '_ {
        self.syms.iter().map(|(&s, &k)| (s, k))
    }

    pub fn power_of(&self, s: Symbol) -> u32 {
        self.syms.get(&s).copied().unwrap_or(0)
    }

    fn contains(&self, s: Symbol) -> bool {
        self.syms.contains_key(&s)
    }

    /// Factors without the coefficient, e.g. `j2^-2*m*vx^2`.
    fn render_factors(&self, out: &mut String) {
        let mut first = true;
        let mut push = |out: &mut String, piece: String| {
            if !first {
                out.push('*');
            }
            first = false;
            out.push_str(&piece);
        };
        if self.p2 != 0 {
            push(
                out,
                if self.p2 == 1 {
                    String::from("j2")
                } else {
                    format!("j2^{}", self.p2)
                },
            );
        }
        if self.p3 != 0 {
            push(
                out,
                if self.p3 == 1 {
                    String::from("j3")
                } else {
                    format!("j3^{}", self.p3)
                },
            );
        }
        for (s, k) in self.symbol_powers() {
            push(
                out,
                if k == 1 {
                    String::from(s.name())
                } else {
                    format!("{}^{}", s.name(), k)
                },
            );
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprError {
    /// Monomials with negative parameter powers survived a fiber
    /// restriction; the rendered offenders are listed.
    Indefinite { monomials: Vec<String> },
    /// The coordinate has no fiber-constant symbol, so it cannot be frozen.
    Unfreezable { coord: Coord },
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::Indefinite { monomials } => {
                write!(f, "indefinite expression; singular terms:")?;
                for m in monomials {
                    write!(f, " {m}")?;
                }
                Ok(())
            }
            ExprError::Unfreezable { coord } => {
                write!(f, "coordinate {coord} has no fiber constant and cannot be frozen")
            }
        }
    }
}

impl core::error::Error for ExprError {}

/// Sum of monomials in normal form. Exact-zero coefficients are never
/// stored; the empty sum is zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expr {
    terms: BTreeMap<Monomial, f64>,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn constant(c: f64) -> Expr {
        Expr::from_monomial(Monomial::one(), c)
    }

    pub fn symbol(s: Symbol) -> Expr {
        Expr::from_monomial(Monomial::symbol(s), 1.0)
    }

    pub fn parameter(p2: i32, p3: i32) -> Expr {
        Expr::from_monomial(Monomial::param(p2, p3), 1.0)
    }

    pub fn from_monomial(m: Monomial, coeff: f64) -> Expr {
        let mut e = Expr::zero();
        e.add_term(m, coeff);
        e
    }

    /// Parses the CLI-facing grammar; see the module-level parser.
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse::parse(text)
    }

    fn add_term(&mut self, m: Monomial, coeff: f64) {
        use alloc::collections::btree_map::Entry;
        if coeff == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if *slot.get() == 0.0 {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn add(&self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Expr {
        self.scale(-1.0)
    }

    pub fn scale(&self, c: f64) -> Expr {
        let mut out = Expr::zero();
        for (m, v) in self.terms() {
            out.add_term(m.clone(), c * v);
        }
        out
    }

    pub fn mul(&self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn powi(&self, n: u32) -> Expr {
        let mut out = Expr::constant(1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Term-by-term comparison of normal forms with relative coefficient
    /// tolerance [`COEFF_REL_TOL`]. Exact equality (`==`) is separate.
    pub fn equals(&self, rhs: &Expr) -> bool {
        for m in self.terms.keys().chain(rhs.terms.keys()) {
            let a = self.coeff(m);
            let b = rhs.coeff(m);
            if a == b {
                continue;
            }
            if (a - b).abs() > COEFF_REL_TOL * a.abs().max(b.abs()) {
                return false;
            }
        }
        true
    }

    /// Folds parameter squares by signature: `j^p -> sigma^(p/2) * j^(p mod 2)`
    /// for `p >= 2`, annihilating the monomial when `sigma = 0`. Negative
    /// exponents are left formal. Idempotent.
    pub fn reduce(&self, sig: Signature) -> Expr {
        let mut out = Expr::zero();
        'terms: for (m, c) in self.terms() {
            let mut coeff = c;
            let mut m = m.clone();
            for (p, sigma) in [
                (&mut m.p2, sig.sigma2),
                (&mut m.p3, sig.sigma3),
            ] {
                if *p >= 2 {
                    match sigma {
                        Sigma::Zero => continue 'terms,
                        Sigma::Pos => {}
                        Sigma::Neg => {
                            if (*p / 2) % 2 == 1 {
                                coeff = -coeff;
                            }
                        }
                    }
                    *p %= 2;
                }
            }
            out.add_term(m, coeff);
        }
        out
    }

    /// Drops every term containing the velocity of a frozen coordinate and
    /// renames the coordinate to its fiber constant (`x -> x0`, `y -> y0`).
    fn freeze(&self, frozen: &[Coord]) -> Result<Expr, ExprError> {
        let mut renames: BTreeMap<Symbol, Symbol> = BTreeMap::new();
        let mut dropped: Vec<Symbol> = Vec::new();
        for &c in frozen {
            let constant = c.fiber_constant().ok_or(ExprError::Unfreezable { coord: c })?;
            renames.insert(c.symbol(), constant);
            dropped.push(c.velocity());
        }
        let mut out = Expr::zero();
        'terms: for (m, c) in self.terms() {
            for &v in &dropped {
                if m.contains(v) {
                    continue 'terms;
                }
            }
            let mut syms: BTreeMap<Symbol, u32> = BTreeMap::new();
            for (s, k) in m.symbol_powers() {
                let s = renames.get(&s).copied().unwrap_or(s);
                *syms.entry(s).or_insert(0) += k;
            }
            out.add_term(
                Monomial {
                    p2: m.p2,
                    p3: m.p3,
                    syms,
                },
                c,
            );
        }
        Ok(out)
    }

    fn negative_power_terms(&self) -> Vec<String> {
        self.terms()
            .filter(|(m, _)| m.has_negative_param())
            .map(|(m, c)| Expr::from_monomial(m.clone(), c).render())
            .collect()
    }

    /// Restriction to the fiber over the frozen coordinates. After the
    /// freeze no negative parameter power may remain: such terms are exactly
    /// the singular pieces that only a freeze can remove, so any survivor
    /// makes the restriction indefinite.
    pub fn restrict_fiber(&self, frozen: &[Coord]) -> Result<Expr, ExprError> {
        let out = self.freeze(frozen)?;
        let singular = out.negative_power_terms();
        if singular.is_empty() {
            Ok(out)
        } else {
            Err(ExprError::Indefinite { monomials: singular })
        }
    }

    /// Full contraction of an action integrand: freeze the fiber first, then
    /// apply the coordinate/time substitution, reject surviving negative
    /// powers of nilpotent parameters, and reduce by the signature.
    ///
    /// Freezing before substituting is what keeps the fiber constants of
    /// *every* frozen coordinate in the contracted potential; substituting
    /// first would dress the frozen coordinates with parameter factors that
    /// the reduction then annihilates.
    pub fn contract_action(
        &self,
        s: &Substitution,
        sig: Signature,
        frozen: &[Coord],
    ) -> Result<Expr, ExprError> {
        let frozen_expr = self.freeze(frozen)?;
        let substituted = s.apply(&frozen_expr);
        let singular: Vec<String> = substituted
            .terms()
            .filter(|(m, _)| {
                (m.p2 < 0 && sig.sigma2.is_zero()) || (m.p3 < 0 && sig.sigma3.is_zero())
            })
            .map(|(m, c)| Expr::from_monomial(m.clone(), c).render())
            .collect();
        if !singular.is_empty() {
            return Err(ExprError::Indefinite { monomials: singular });
        }
        Ok(substituted.reduce(sig))
    }

    /// Numeric evaluation with every symbol and parameter bound to a value.
    pub fn eval(&self, env: &EvalEnv) -> f64 {
        let mut acc = 0.0;
        for (m, c) in self.terms() {
            let mut v = c * powi(env.j2, m.p2) * powi(env.j3, m.p3);
            for (s, k) in m.symbol_powers() {
                v *= powi(env.vals[s.index()], k as i32);
            }
            acc += v;
        }
        acc
    }

    /// Grammar-form rendering in normal-form order; parses back to an equal
    /// expression.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            if i == 0 {
                if c < 0.0 {
                    out.push('-');
                }
            } else if c < 0.0 {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mag = c.abs();
            if m.is_constant() {
                out.push_str(&format!("{mag}"));
            } else {
                if mag != 1.0 {
                    out.push_str(&format!("{mag}*"));
                }
                m.render_factors(&mut out);
            }
        }
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Values for numeric evaluation. Symbols default to 0, parameters to 1.
#[derive(Clone, Debug)]
pub struct EvalEnv {
    vals: [f64; 10],
    pub j2: f64,
    pub j3: f64,
}

impl Default for EvalEnv {
    fn default() -> Self {
        EvalEnv {
            vals: [0.0; 10],
            j2: 1.0,
            j3: 1.0,
        }
    }
}

impl EvalEnv {
    pub fn new() -> EvalEnv {
        EvalEnv::default()
    }

    pub fn with(mut self, s: Symbol, v: f64) -> EvalEnv {
        self.vals[s.index()] = v;
        self
    }

    pub fn with_j2(mut self, j2: f64) -> EvalEnv {
        self.j2 = j2;
        self
    }

    pub fn with_j3(mut self, j3: f64) -> EvalEnv {
        self.j3 = j3;
        self
    }

    pub fn set(&mut self, s: Symbol, v: f64) {
        self.vals[s.index()] = v;
    }

    pub fn get(&self, s: Symbol) -> f64 {
        self.vals[s.index()]
    }
}
