//! Scalars of the form `a0 + a2*j2 + a3*j3 + a23*j2*j3` where each parameter
//! `jk` squares to a fixed sign `sigma_k` in `{+1, 0, -1}`. The `sigma = 0`
//! case makes `jk` a nilpotent (dual) unit: `jk != 0` but `jk^2 = 0`, and the
//! mixed product `j2*j3` survives. Division by a unit is formal: for
//! invertible units it is multiplication by the inverse, for nilpotent units
//! it is the canonical quotient that strips one generator and fails when a
//! remainder would be left behind.

use core::fmt;

use alloc::format;
use alloc::string::String;

/// Sign of a squared Cayley-Klein parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sigma {
    Neg,
    Zero,
    Pos,
}

impl Sigma {
    pub const ALL: [Sigma; 3] = [Sigma::Pos, Sigma::Zero, Sigma::Neg];

    pub fn as_f64(self) -> f64 {
        match self {
            Sigma::Pos => 1.0,
            Sigma::Zero => 0.0,
            Sigma::Neg => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sigma::Pos => 1,
            Sigma::Zero => 0,
            Sigma::Neg => -1,
        }
    }

    /// Accepts exactly -1, 0, +1.
    pub fn from_i8(v: i8) -> Option<Sigma> {
        match v {
            1 => Some(Sigma::Pos),
            0 => Some(Sigma::Zero),
            -1 => Some(Sigma::Neg),
            _ => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sigma::Zero
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

/// Pair `(sigma2, sigma3)` fixing the squares of both parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub sigma2: Sigma,
    pub sigma3: Sigma,
}

impl Signature {
    /// Ordinary Euclidean signature: both parameters square to +1.
    pub const EUCLID: Signature = Signature {
        sigma2: Sigma::Pos,
        sigma3: Sigma::Pos,
    };

    pub const fn new(sigma2: Sigma, sigma3: Sigma) -> Signature {
        Signature { sigma2, sigma3 }
    }

    /// Plane problems only involve `j2`; `sigma3` is fixed at +1 and unused.
    pub const fn plane(sigma2: Sigma) -> Signature {
        Signature {
            sigma2,
            sigma3: Sigma::Pos,
        }
    }

    /// All nine signature combinations, in a fixed deterministic order.
    pub fn all() -> [Signature; 9] {
        let mut out = [Signature::EUCLID; 9];
        let mut i = 0;
        for s2 in Sigma::ALL {
            for s3 in Sigma::ALL {
                out[i] = Signature::new(s2, s3);
                i += 1;
            }
        }
        out
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.sigma2, self.sigma3)
    }
}

/// The three non-real basis units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unit {
    J2,
    J3,
    J2J3,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::J2 => write!(f, "j2"),
            Unit::J3 => write!(f, "j3"),
            Unit::J2J3 => write!(f, "j2*j3"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraError {
    /// Operands built over different signatures.
    SignatureMismatch,
    /// Formal division by a nilpotent unit would leave a remainder.
    NonDivisible { unit: Unit },
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::SignatureMismatch => {
                write!(f, "operands carry different signatures")
            }
            AlgebraError::NonDivisible { unit } => {
                write!(f, "scalar is not divisible by {unit}")
            }
        }
    }
}

impl core::error::Error for AlgebraError {}

/// Error from [`CKScalar::parse`]: byte offset into the input plus a short
/// description of what was expected there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarParseError {
    pub offset: usize,
    pub expected: &'static str,
}

impl fmt::Display for ScalarParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected {} at byte {}", self.expected, self.offset)
    }
}

impl core::error::Error for ScalarParseError {}

/// `a0 + a2*j2 + a3*j3 + a23*j2*j3` over a fixed signature.
///
/// Equality (`==`) is componentwise and exact, signature included; the
/// arithmetic itself is closed-form in the coefficients, so algebraic
/// identities hold to floating-point exactness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CKScalar {
    pub a0: f64,
    pub a2: f64,
    pub a3: f64,
    pub a23: f64,
    pub sig: Signature,
}

impl CKScalar {
    pub const fn new(sig: Signature, a0: f64, a2: f64, a3: f64, a23: f64) -> CKScalar {
        CKScalar { a0, a2, a3, a23, sig }
    }

    pub const fn real(sig: Signature, v: f64) -> CKScalar {
        CKScalar::new(sig, v, 0.0, 0.0, 0.0)
    }

    pub const fn zero(sig: Signature) -> CKScalar {
        CKScalar::real(sig, 0.0)
    }

    pub const fn one(sig: Signature) -> CKScalar {
        CKScalar::real(sig, 1.0)
    }

    /// The basis unit itself as a scalar.
    pub const fn unit(sig: Signature, unit: Unit) -> CKScalar {
        match unit {
            Unit::J2 => CKScalar::new(sig, 0.0, 1.0, 0.0, 0.0),
            Unit::J3 => CKScalar::new(sig, 0.0, 0.0, 1.0, 0.0),
            Unit::J2J3 => CKScalar::new(sig, 0.0, 0.0, 0.0, 1.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a0 == 0.0 && self.a2 == 0.0 && self.a3 == 0.0 && self.a23 == 0.0
    }

    /// Sum of absolute coefficient values; used to scale tolerance bounds.
    pub fn norm1(&self) -> f64 {
        self.a0.abs() + self.a2.abs() + self.a3.abs() + self.a23.abs()
    }

    fn same_sig(&self, rhs: &CKScalar) -> Result<(), AlgebraError> {
        if self.sig == rhs.sig {
            Ok(())
        } else {
            Err(AlgebraError::SignatureMismatch)
        }
    }

    pub fn add(&self, rhs: &CKScalar) -> Result<CKScalar, AlgebraError> {
        self.same_sig(rhs)?;
        Ok(CKScalar::new(
            self.sig,
            self.a0 + rhs.a0,
            self.a2 + rhs.a2,
            self.a3 + rhs.a3,
            self.a23 + rhs.a23,
        ))
    }

    pub fn sub(&self, rhs: &CKScalar) -> Result<CKScalar, AlgebraError> {
        self.same_sig(rhs)?;
        Ok(CKScalar::new(
            self.sig,
            self.a0 - rhs.a0,
            self.a2 - rhs.a2,
            self.a3 - rhs.a3,
            self.a23 - rhs.a23,
        ))
    }

    pub fn neg(&self) -> CKScalar {
        CKScalar::new(self.sig, -self.a0, -self.a2, -self.a3, -self.a23)
    }

    pub fn scale(&self, c: f64) -> CKScalar {
        CKScalar::new(self.sig, c * self.a0, c * self.a2, c * self.a3, c * self.a23)
    }

    /// Product in the quotient ring: `j2^2 = sigma2`, `j3^2 = sigma3`, the
    /// units commute, and `j2*j3` is an independent basis element.
    pub fn mul(&self, rhs: &CKScalar) -> Result<CKScalar, AlgebraError> {
        self.same_sig(rhs)?;
        let s2 = self.sig.sigma2.as_f64();
        let s3 = self.sig.sigma3.as_f64();
        let (a0, a2, a3, a23) = (self.a0, self.a2, self.a3, self.a23);
        let (b0, b2, b3, b23) = (rhs.a0, rhs.a2, rhs.a3, rhs.a23);
        // Grouped so that swapping the factors permutes only the operands
        // of individual additions: the product commutes bit-for-bit.
        Ok(CKScalar::new(
            self.sig,
            a0 * b0 + s2 * a2 * b2 + s3 * a3 * b3 + s2 * s3 * a23 * b23,
            (a0 * b2 + a2 * b0) + s3 * (a3 * b23 + a23 * b3),
            (a0 * b3 + a3 * b0) + s2 * (a2 * b23 + a23 * b2),
            (a0 * b23 + a23 * b0) + (a2 * b3 + a3 * b2),
        ))
    }

    /// Formal division by a basis unit.
    ///
    /// If the unit's sign is nonzero the unit is invertible
    /// (`1/jk = jk/sigma_k`) and this always succeeds. If the sign is zero
    /// the quotient exists only when every component not containing the
    /// generator vanishes: `(a*j2 + b*j2*j3)/j2 = a + b*j3`, anything else is
    /// [`AlgebraError::NonDivisible`]. Division by `j2*j3` divides by `j2`
    /// and then by `j3`.
    pub fn div_unit(&self, unit: Unit) -> Result<CKScalar, AlgebraError> {
        match unit {
            Unit::J2 => match self.sig.sigma2 {
                Sigma::Zero => {
                    if self.a0 == 0.0 && self.a3 == 0.0 {
                        Ok(CKScalar::new(self.sig, self.a2, 0.0, self.a23, 0.0))
                    } else {
                        Err(AlgebraError::NonDivisible { unit })
                    }
                }
                s => {
                    let inv = 1.0 / s.as_f64();
                    // x * j2 / sigma2
                    self.mul(&CKScalar::unit(self.sig, Unit::J2).scale(inv))
                }
            },
            Unit::J3 => match self.sig.sigma3 {
                Sigma::Zero => {
                    if self.a0 == 0.0 && self.a2 == 0.0 {
                        Ok(CKScalar::new(self.sig, self.a3, self.a23, 0.0, 0.0))
                    } else {
                        Err(AlgebraError::NonDivisible { unit })
                    }
                }
                s => {
                    let inv = 1.0 / s.as_f64();
                    self.mul(&CKScalar::unit(self.sig, Unit::J3).scale(inv))
                }
            },
            Unit::J2J3 => self.div_unit(Unit::J2)?.div_unit(Unit::J3),
        }
    }

    /// Numeric evaluation with the parameters replaced by concrete reals.
    /// For a contracted (`sigma = 0`) parameter, pass a small epsilon to
    /// compare the exact algebra against its numeric limit.
    pub fn eval(&self, eps2: f64, eps3: f64) -> f64 {
        self.a0 + self.a2 * eps2 + self.a3 * eps3 + self.a23 * eps2 * eps3
    }

    /// Canonical text form: always all four components, in basis order.
    /// Coefficients use the shortest round-trip decimal form, so
    /// render-then-parse reproduces the exact bit pattern.
    pub fn render(&self) -> String {
        format!(
            "{} + {}*j2 + {}*j3 + {}*j2*j3",
            self.a0, self.a2, self.a3, self.a23
        )
    }

    /// Parses the text form produced by [`CKScalar::render`]. Forgiving about
    /// term order, omitted components, and omitted `1*` coefficients;
    /// duplicate components are summed.
    pub fn parse(text: &str, sig: Signature) -> Result<CKScalar, ScalarParseError> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let mut out = CKScalar::zero(sig);

        fn skip_ws(bytes: &[u8], pos: &mut usize) {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        }

        // One multiplicative factor: a number, `j2`, or `j3`.
        fn factor(
            bytes: &[u8],
            pos: &mut usize,
            coeff: &mut f64,
            has2: &mut bool,
            has3: &mut bool,
        ) -> Result<(), ScalarParseError> {
            skip_ws(bytes, pos);
            let start = *pos;
            if bytes.get(*pos) == Some(&b'j') {
                match bytes.get(*pos + 1) {
                    Some(b'2') => {
                        if *has2 {
                            return Err(ScalarParseError {
                                offset: start,
                                expected: "at most one j2 factor per term",
                            });
                        }
                        *has2 = true;
                    }
                    Some(b'3') => {
                        if *has3 {
                            return Err(ScalarParseError {
                                offset: start,
                                expected: "at most one j3 factor per term",
                            });
                        }
                        *has3 = true;
                    }
                    _ => {
                        return Err(ScalarParseError {
                            offset: start,
                            expected: "j2 or j3",
                        })
                    }
                }
                *pos += 2;
                return Ok(());
            }
            // Number: sign, digits, fraction, exponent.
            let mut end = *pos;
            if matches!(bytes.get(end), Some(b'+') | Some(b'-')) {
                end += 1;
            }
            let digits0 = end;
            while matches!(bytes.get(end), Some(c) if c.is_ascii_digit()) {
                end += 1;
            }
            if bytes.get(end) == Some(&b'.') {
                end += 1;
                while matches!(bytes.get(end), Some(c) if c.is_ascii_digit()) {
                    end += 1;
                }
            }
            if end == digits0 {
                return Err(ScalarParseError {
                    offset: start,
                    expected: "number, j2, or j3",
                });
            }
            if matches!(bytes.get(end), Some(b'e') | Some(b'E')) {
                let mut e = end + 1;
                if matches!(bytes.get(e), Some(b'+') | Some(b'-')) {
                    e += 1;
                }
                let d0 = e;
                while matches!(bytes.get(e), Some(c) if c.is_ascii_digit()) {
                    e += 1;
                }
                if e > d0 {
                    end = e;
                }
            }
            let lit = core::str::from_utf8(&bytes[*pos..end]).expect("ascii slice");
            let v: f64 = lit.parse().map_err(|_| ScalarParseError {
                offset: start,
                expected: "number",
            })?;
            *coeff *= v;
            *pos = end;
            Ok(())
        }

        skip_ws(bytes, &mut pos);
        if pos == bytes.len() {
            return Err(ScalarParseError {
                offset: pos,
                expected: "nonempty scalar",
            });
        }
        // First write to a slot assigns instead of adding, so a lone term
        // round-trips bit-exactly (adding into +0.0 would erase a -0.0).
        let mut touched = [false; 4];
        let mut negate = false;
        loop {
            let mut coeff = if negate { -1.0 } else { 1.0 };
            let mut has2 = false;
            let mut has3 = false;
            factor(bytes, &mut pos, &mut coeff, &mut has2, &mut has3)?;
            loop {
                skip_ws(bytes, &mut pos);
                if bytes.get(pos) == Some(&b'*') {
                    pos += 1;
                    factor(bytes, &mut pos, &mut coeff, &mut has2, &mut has3)?;
                } else {
                    break;
                }
            }
            let (slot, idx) = match (has2, has3) {
                (false, false) => (&mut out.a0, 0),
                (true, false) => (&mut out.a2, 1),
                (false, true) => (&mut out.a3, 2),
                (true, true) => (&mut out.a23, 3),
            };
            if touched[idx] {
                *slot += coeff;
            } else {
                *slot = coeff;
                touched[idx] = true;
            }
            skip_ws(bytes, &mut pos);
            match bytes.get(pos) {
                None => return Ok(out),
                Some(b'+') => {
                    negate = false;
                    pos += 1;
                }
                Some(b'-') => {
                    negate = true;
                    pos += 1;
                }
                Some(_) => {
                    return Err(ScalarParseError {
                        offset: pos,
                        expected: "'+', '-', '*', or end of input",
                    })
                }
            }
        }
    }
}

impl fmt::Display for CKScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DUAL2: Signature = Signature::plane(Sigma::Zero);
    const DUAL_BOTH: Signature = Signature::new(Sigma::Zero, Sigma::Zero);

    #[test]
    fn nilpotent_unit_squares_to_zero() {
        let j2 = CKScalar::unit(DUAL2, Unit::J2);
        assert_eq!(j2.mul(&j2).unwrap(), CKScalar::zero(DUAL2));
        assert!(!j2.is_zero());
    }

    #[test]
    fn mixed_product_of_nilpotents_survives() {
        let j2 = CKScalar::unit(DUAL_BOTH, Unit::J2);
        let j3 = CKScalar::unit(DUAL_BOTH, Unit::J3);
        let p = j2.mul(&j3).unwrap();
        assert_eq!(p, CKScalar::unit(DUAL_BOTH, Unit::J2J3));
        assert!(!p.is_zero());
        // ... but it is annihilated by either generator.
        assert_eq!(p.mul(&j2).unwrap(), CKScalar::zero(DUAL_BOTH));
        assert_eq!(p.mul(&j3).unwrap(), CKScalar::zero(DUAL_BOTH));
    }

    #[test]
    fn euclid_units_square_to_one() {
        let j2 = CKScalar::unit(Signature::EUCLID, Unit::J2);
        assert_eq!(j2.mul(&j2).unwrap(), CKScalar::one(Signature::EUCLID));
        let neg = Signature::new(Sigma::Neg, Sigma::Pos);
        let i = CKScalar::unit(neg, Unit::J2);
        assert_eq!(i.mul(&i).unwrap(), CKScalar::one(neg).neg());
    }

    #[test]
    fn general_product_components() {
        // (1 + 2*j2) * (3 + 4*j3) at sigma = (0, 0):
        // 3 + 6*j2 + 4*j3 + 8*j2*j3, no folding because squares never form.
        let x = CKScalar::new(DUAL_BOTH, 1.0, 2.0, 0.0, 0.0);
        let y = CKScalar::new(DUAL_BOTH, 3.0, 0.0, 4.0, 0.0);
        assert_eq!(
            x.mul(&y).unwrap(),
            CKScalar::new(DUAL_BOTH, 3.0, 6.0, 4.0, 8.0)
        );
    }

    #[test]
    fn signature_mismatch_is_rejected() {
        let x = CKScalar::one(Signature::EUCLID);
        let y = CKScalar::one(DUAL2);
        assert_eq!(x.add(&y), Err(AlgebraError::SignatureMismatch));
        assert_eq!(x.mul(&y), Err(AlgebraError::SignatureMismatch));
    }

    #[test]
    fn dual_unit_divides_itself() {
        let j2 = CKScalar::unit(DUAL2, Unit::J2);
        assert_eq!(j2.div_unit(Unit::J2).unwrap(), CKScalar::one(DUAL2));
    }

    #[test]
    fn dual_quotient_strips_generator() {
        // (5*j2 + 7*j2*j3) / j2 = 5 + 7*j3
        let x = CKScalar::new(DUAL_BOTH, 0.0, 5.0, 0.0, 7.0);
        assert_eq!(
            x.div_unit(Unit::J2).unwrap(),
            CKScalar::new(DUAL_BOTH, 5.0, 0.0, 7.0, 0.0)
        );
    }

    #[test]
    fn dual_quotient_rejects_remainder() {
        let one = CKScalar::one(DUAL2);
        assert_eq!(
            one.div_unit(Unit::J2),
            Err(AlgebraError::NonDivisible { unit: Unit::J2 })
        );
        let x = CKScalar::new(DUAL_BOTH, 0.0, 1.0, 2.0, 0.0);
        assert!(x.div_unit(Unit::J2).is_err()); // a3 remainder
        assert!(x.div_unit(Unit::J2J3).is_err());
    }

    #[test]
    fn invertible_division_round_trips() {
        for sig in [Signature::EUCLID, Signature::new(Sigma::Neg, Sigma::Neg)] {
            let x = CKScalar::new(sig, 1.5, -2.0, 0.25, 3.0);
            for unit in [Unit::J2, Unit::J3, Unit::J2J3] {
                let q = x.div_unit(unit).unwrap();
                assert_eq!(q.mul(&CKScalar::unit(sig, unit)).unwrap(), x);
            }
        }
    }

    #[test]
    fn mixed_unit_division_at_dual_dual() {
        let x = CKScalar::new(DUAL_BOTH, 0.0, 0.0, 0.0, 4.5);
        assert_eq!(x.div_unit(Unit::J2J3).unwrap(), CKScalar::real(DUAL_BOTH, 4.5));
    }

    #[test]
    fn eval_substitutes_epsilons() {
        let x = CKScalar::new(DUAL_BOTH, 1.0, 2.0, 3.0, 4.0);
        let e = x.eval(0.1, 0.01);
        assert!((e - (1.0 + 0.2 + 0.03 + 0.004)).abs() < 1e-15);
    }

    #[test]
    fn render_parse_round_trip_is_bit_exact() {
        let x = CKScalar::new(DUAL_BOTH, -0.0, 0.1, -3.5e-7, f64::MIN_POSITIVE);
        let text = x.render();
        let back = CKScalar::parse(&text, DUAL_BOTH).unwrap();
        assert_eq!(back.a0.to_bits(), x.a0.to_bits());
        assert_eq!(back.a2.to_bits(), x.a2.to_bits());
        assert_eq!(back.a3.to_bits(), x.a3.to_bits());
        assert_eq!(back.a23.to_bits(), x.a23.to_bits());
    }

    #[test]
    fn parse_is_forgiving() {
        let sig = DUAL_BOTH;
        assert_eq!(
            CKScalar::parse("j2", sig).unwrap(),
            CKScalar::unit(sig, Unit::J2)
        );
        assert_eq!(
            CKScalar::parse("2*j2 + 1*j2", sig).unwrap(),
            CKScalar::new(sig, 0.0, 3.0, 0.0, 0.0)
        );
        assert_eq!(
            CKScalar::parse("j3*j2*2 - 1", sig).unwrap(),
            CKScalar::new(sig, -1.0, 0.0, 0.0, 2.0)
        );
        assert_eq!(
            CKScalar::parse("1 - 2*j3", sig).unwrap(),
            CKScalar::new(sig, 1.0, 0.0, -2.0, 0.0)
        );
    }

    #[test]
    fn parse_reports_offsets() {
        let err = CKScalar::parse("1 + j4", DUAL_BOTH).unwrap_err();
        assert_eq!(err.offset, 4);
        let err = CKScalar::parse("j2*j2", DUAL_BOTH).unwrap_err();
        assert_eq!(err.offset, 3);
        assert!(CKScalar::parse("", DUAL_BOTH).is_err());
        assert!(CKScalar::parse("1 ^ 2", DUAL_BOTH).is_err());
    }
}
