//! Flat plane/3-space metrics with degenerate directions, the fibration
//! structure induced by nilpotent parameters, physical-dimension tags,
//! metric-preserving generalized rotations, and the isolated-line
//! classification of the plane bundles.

use core::fmt;

use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{CKScalar, Sigma, Signature, Unit};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometryError {
    /// Displacement dimension or level index does not fit the space.
    DimensionMismatch,
    /// A level metric was requested with a nonzero displacement in a
    /// higher-level base coordinate; the formal quotient is indefinite.
    FiberConstraintViolated,
    /// Components with different physical-dimension tags cannot be added.
    TagMismatch {
        left: &'static str,
        right: &'static str,
    },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::DimensionMismatch => write!(f, "dimension mismatch"),
            GeometryError::FiberConstraintViolated => {
                write!(f, "fiber constraint violated: higher-level displacement is nonzero")
            }
            GeometryError::TagMismatch { left, right } => {
                write!(f, "cannot combine quantities with dimension tags {left} and {right}")
            }
        }
    }
}

impl core::error::Error for GeometryError {}

/// Displacement (or point) in a 2- or 3-dimensional space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Displacement {
    pub dx: f64,
    pub dy: f64,
    pub dz: Option<f64>,
}

impl Displacement {
    pub fn plane(dx: f64, dy: f64) -> Displacement {
        Displacement { dx, dy, dz: None }
    }

    pub fn space(dx: f64, dy: f64, dz: f64) -> Displacement {
        Displacement {
            dx,
            dy,
            dz: Some(dz),
        }
    }

    pub fn dim(&self) -> usize {
        if self.dz.is_some() {
            3
        } else {
            2
        }
    }

    fn component(&self, i: usize) -> f64 {
        match i {
            0 => self.dx,
            1 => self.dy,
            _ => self.dz.unwrap_or(0.0),
        }
    }
}

/// Coordinate name plus its physical-dimension tag. Tags are opaque; all
/// that matters is equality. Coordinates separated by a nilpotent parameter
/// get different tags ("L" for the base, then "Q1", "Q2").
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoordInfo {
    pub name: &'static str,
    pub tag: &'static str,
}

/// One fibration level: the sets are coordinate names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationLevel {
    pub base: Vec<&'static str>,
    pub fiber: Vec<&'static str>,
}

/// A displacement component carrying its dimension tag; addition requires
/// equal tags, which is what makes quantities across a nilpotent fibration
/// boundary non-combinable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaggedComponent {
    pub value: f64,
    pub tag: &'static str,
}

impl TaggedComponent {
    pub fn add(self, rhs: TaggedComponent) -> Result<TaggedComponent, GeometryError> {
        if self.tag == rhs.tag {
            Ok(TaggedComponent {
                value: self.value + rhs.value,
                tag: self.tag,
            })
        } else {
            Err(GeometryError::TagMismatch {
                left: self.tag,
                right: rhs.tag,
            })
        }
    }
}

/// Plane or 3-space over a signature, with the fibration and tags derived
/// deterministically from where the nilpotent parameters sit.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberedSpace {
    dim: usize,
    sig: Signature,
    coords: Vec<CoordInfo>,
    levels: Vec<FibrationLevel>,
}

const TAGS: [&str; 3] = ["L", "Q1", "Q2"];

impl FiberedSpace {
    /// Plane over `(sigma2, +1)`; the second parameter plays no role.
    pub fn plane(sigma2: Sigma) -> FiberedSpace {
        FiberedSpace::build(2, Signature::plane(sigma2))
    }

    pub fn space(sigma2: Sigma, sigma3: Sigma) -> FiberedSpace {
        FiberedSpace::build(3, Signature::new(sigma2, sigma3))
    }

    fn build(dim: usize, sig: Signature) -> FiberedSpace {
        let names = ["x", "y", "z"];
        // Crossing a nilpotent boundary bumps the tag index; otherwise the
        // tag carries over ("tags equal when the parameter is +/-1-valued").
        let mut coords = Vec::with_capacity(dim);
        let mut tag = 0usize;
        for (i, &name) in names.iter().take(dim).enumerate() {
            let boundary = match i {
                1 => Some(sig.sigma2),
                2 => Some(sig.sigma3),
                _ => None,
            };
            if boundary == Some(Sigma::Zero) {
                tag += 1;
            }
            coords.push(CoordInfo { name, tag: TAGS[tag] });
        }
        let mut levels = Vec::new();
        if sig.sigma2 == Sigma::Zero {
            levels.push(FibrationLevel {
                base: vec!["x"],
                fiber: if dim == 3 { vec!["y", "z"] } else { vec!["y"] },
            });
        }
        if dim == 3 && sig.sigma3 == Sigma::Zero {
            levels.push(FibrationLevel {
                base: vec!["y"],
                fiber: vec!["z"],
            });
        }
        FiberedSpace {
            dim,
            sig,
            coords,
            levels,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn coords(&self) -> &[CoordInfo] {
        &self.coords
    }

    pub fn levels(&self) -> &[FibrationLevel] {
        &self.levels
    }

    fn check_dim(&self, d: &Displacement) -> Result<(), GeometryError> {
        if d.dim() == self.dim {
            Ok(())
        } else {
            Err(GeometryError::DimensionMismatch)
        }
    }

    /// The interval `ds^2 = dx^2 + (j2*dy)^2 + (j2*j3*dz)^2` as a scalar of
    /// the algebra, so degenerate directions are annihilated by the actual
    /// parameter arithmetic rather than dropped by hand.
    pub fn metric_interval(&self, d: &Displacement) -> Result<CKScalar, GeometryError> {
        self.check_dim(d)?;
        let j2 = CKScalar::unit(self.sig, Unit::J2);
        let j2sq = j2.mul(&j2).expect("same signature");
        let mut ds2 = CKScalar::real(self.sig, d.dx * d.dx);
        ds2 = ds2.add(&j2sq.scale(d.dy * d.dy)).expect("same signature");
        if let Some(dz) = d.dz {
            let j23 = CKScalar::unit(self.sig, Unit::J2J3);
            let j23sq = j23.mul(&j23).expect("same signature");
            ds2 = ds2.add(&j23sq.scale(dz * dz)).expect("same signature");
        }
        Ok(ds2)
    }

    /// Metric of one fibration level: the interval divided formally by the
    /// parameter square separating the level from the base, restricted to
    /// zero displacement in all higher-level coordinates.
    ///
    /// Level 0 is the base metric; level 1 requires `dx = 0` and divides by
    /// `j2^2`; level 2 requires `dx = dy = 0` and divides by `(j2*j3)^2`.
    /// The division is carried out on formal parameter exponents — dividing
    /// the reduced scalar would lose the nilpotent terms — and the result is
    /// reduced by the signature at the end.
    pub fn level_metric(&self, level: usize, d: &Displacement) -> Result<f64, GeometryError> {
        self.check_dim(d)?;
        if level >= self.dim {
            return Err(GeometryError::DimensionMismatch);
        }
        for i in 0..level {
            if d.component(i) != 0.0 {
                return Err(GeometryError::FiberConstraintViolated);
            }
        }
        // Formal exponents of (j2, j3) in each squared-displacement term.
        let exps = [(0i32, 0i32), (2, 0), (2, 2)];
        let (div2, div3) = exps[level];
        let mut total = 0.0;
        for i in level..self.dim {
            let v = d.component(i);
            if v == 0.0 {
                continue;
            }
            let (p2, p3) = (exps[i].0 - div2, exps[i].1 - div3);
            debug_assert!(p2 >= 0 && p3 >= 0);
            let factor = |p: i32, sigma: Sigma| if p >= 2 { sigma.as_f64() } else { 1.0 };
            total += v * v * factor(p2, self.sig.sigma2) * factor(p3, self.sig.sigma3);
        }
        Ok(total)
    }

    /// A displacement component as a tagged quantity.
    pub fn component(&self, d: &Displacement, i: usize) -> Result<TaggedComponent, GeometryError> {
        self.check_dim(d)?;
        if i >= self.dim {
            return Err(GeometryError::DimensionMismatch);
        }
        Ok(TaggedComponent {
            value: d.component(i),
            tag: self.coords[i].tag,
        })
    }
}

/// Isolated lines of the plane line bundle: lines not reachable from the
/// generic line by the automorphism group.
#[derive(Clone, Debug, PartialEq)]
pub struct IsolatedLines {
    pub count: usize,
    /// Unit directions (Euclidean norm), fixed order for determinism.
    pub directions: Vec<(f64, f64)>,
}

/// Rotations about a point have none; boosts fix the fiber direction; the
/// pseudo-Euclidean case fixes both null diagonals.
pub fn classify_line_bundle(sigma: Sigma) -> IsolatedLines {
    match sigma {
        Sigma::Pos => IsolatedLines {
            count: 0,
            directions: vec![],
        },
        Sigma::Zero => IsolatedLines {
            count: 1,
            directions: vec![(0.0, 1.0)],
        },
        Sigma::Neg => {
            let r = core::f64::consts::FRAC_1_SQRT_2;
            IsolatedLines {
                count: 2,
                directions: vec![(r, r), (r, -r)],
            }
        }
    }
}

/// Signature-dependent cosine/sine pair: circular, parabolic (flat), or
/// hyperbolic.
pub fn rotation_coeffs(sigma: Sigma, phi: f64) -> (f64, f64) {
    match sigma {
        Sigma::Pos => (libm::cos(phi), libm::sin(phi)),
        Sigma::Zero => (1.0, phi),
        Sigma::Neg => (libm::cosh(phi), libm::sinh(phi)),
    }
}

/// The metric-preserving automorphism of the plane with parameter `phi`:
/// rotation, Galilei boost, or Lorentz boost depending on the signature.
pub fn generalized_rotation(sigma: Sigma, phi: f64, p: (f64, f64)) -> (f64, f64) {
    let (c, s) = rotation_coeffs(sigma, phi);
    (p.0 * c - sigma.as_f64() * p.1 * s, p.0 * s + p.1 * c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclid_interval_is_pythagorean() {
        let sp = FiberedSpace::plane(Sigma::Pos);
        let ds2 = sp.metric_interval(&Displacement::plane(3.0, 4.0)).unwrap();
        assert_eq!(ds2, CKScalar::real(sp.sig(), 25.0));
    }

    #[test]
    fn degenerate_interval_sees_only_the_base() {
        let sp = FiberedSpace::plane(Sigma::Zero);
        let ds2 = sp.metric_interval(&Displacement::plane(3.0, 4.0)).unwrap();
        assert_eq!(ds2.a0, 9.0);
        assert!(ds2.a2 == 0.0 && ds2.a3 == 0.0 && ds2.a23 == 0.0);
    }

    #[test]
    fn null_direction_on_the_hyperbolic_plane() {
        let sp = FiberedSpace::plane(Sigma::Neg);
        let ds2 = sp.metric_interval(&Displacement::plane(3.0, 3.0)).unwrap();
        assert_eq!(ds2.a0, 0.0);
    }

    #[test]
    fn three_space_interval_tracks_mixed_unit() {
        let sp = FiberedSpace::space(Sigma::Zero, Sigma::Zero);
        let ds2 = sp
            .metric_interval(&Displacement::space(1.0, 2.0, 3.0))
            .unwrap();
        // j2^2 = 0 and (j2*j3)^2 = 0: only dx^2 survives.
        assert_eq!(ds2, CKScalar::real(sp.sig(), 1.0));
    }

    #[test]
    fn dimension_mismatch_is_detected() {
        let sp = FiberedSpace::plane(Sigma::Pos);
        let d3 = Displacement::space(1.0, 1.0, 1.0);
        assert_eq!(sp.metric_interval(&d3), Err(GeometryError::DimensionMismatch));
        assert_eq!(sp.level_metric(2, &Displacement::plane(0.0, 1.0)), Err(GeometryError::DimensionMismatch));
    }

    #[test]
    fn fiber_metric_is_the_formal_quotient() {
        let sp = FiberedSpace::plane(Sigma::Zero);
        assert_eq!(sp.level_metric(1, &Displacement::plane(0.0, 4.0)), Ok(16.0));
        assert_eq!(
            sp.level_metric(1, &Displacement::plane(1.0, 4.0)),
            Err(GeometryError::FiberConstraintViolated)
        );
        let sp = FiberedSpace::space(Sigma::Zero, Sigma::Zero);
        assert_eq!(
            sp.level_metric(2, &Displacement::space(0.0, 0.0, 5.0)),
            Ok(25.0)
        );
        assert_eq!(sp.level_metric(0, &Displacement::space(3.0, 7.0, 9.0)), Ok(9.0));
    }

    #[test]
    fn level_one_of_a_euclidean_fiber_block_keeps_both_terms() {
        // At (0, +1) the fiber {y, z} is an ordinary plane; its metric is
        // dy^2 + dz^2.
        let sp = FiberedSpace::space(Sigma::Zero, Sigma::Pos);
        assert_eq!(
            sp.level_metric(1, &Displacement::space(0.0, 3.0, 4.0)),
            Ok(25.0)
        );
    }

    #[test]
    fn tags_change_exactly_at_nilpotent_boundaries() {
        let tags = |sp: &FiberedSpace| -> Vec<&'static str> {
            sp.coords().iter().map(|c| c.tag).collect()
        };
        assert_eq!(tags(&FiberedSpace::plane(Sigma::Pos)), ["L", "L"]);
        assert_eq!(tags(&FiberedSpace::plane(Sigma::Zero)), ["L", "Q1"]);
        assert_eq!(tags(&FiberedSpace::plane(Sigma::Neg)), ["L", "L"]);
        assert_eq!(
            tags(&FiberedSpace::space(Sigma::Zero, Sigma::Zero)),
            ["L", "Q1", "Q2"]
        );
        assert_eq!(
            tags(&FiberedSpace::space(Sigma::Pos, Sigma::Zero)),
            ["L", "L", "Q1"]
        );
        assert_eq!(
            tags(&FiberedSpace::space(Sigma::Zero, Sigma::Neg)),
            ["L", "Q1", "Q1"]
        );
    }

    #[test]
    fn fibration_levels_follow_the_signature() {
        let sp = FiberedSpace::space(Sigma::Zero, Sigma::Zero);
        assert_eq!(sp.levels().len(), 2);
        assert_eq!(sp.levels()[0].base, ["x"]);
        assert_eq!(sp.levels()[0].fiber, ["y", "z"]);
        assert_eq!(sp.levels()[1].base, ["y"]);
        assert_eq!(sp.levels()[1].fiber, ["z"]);
        assert!(FiberedSpace::plane(Sigma::Pos).levels().is_empty());
        assert_eq!(FiberedSpace::space(Sigma::Pos, Sigma::Zero).levels().len(), 1);
    }

    #[test]
    fn tag_guard_rejects_cross_fiber_sums() {
        let sp = FiberedSpace::plane(Sigma::Zero);
        let d = Displacement::plane(1.0, 2.0);
        let cx = sp.component(&d, 0).unwrap();
        let cy = sp.component(&d, 1).unwrap();
        assert_eq!(
            cx.add(cy),
            Err(GeometryError::TagMismatch {
                left: "L",
                right: "Q1"
            })
        );
        // Same tag on the Euclid plane: fine.
        let sp = FiberedSpace::plane(Sigma::Pos);
        let cx = sp.component(&d, 0).unwrap();
        let cy = sp.component(&d, 1).unwrap();
        assert_eq!(cx.add(cy).unwrap().value, 3.0);
    }

    #[test]
    fn isolated_line_counts_match_the_bundle_picture() {
        assert_eq!(classify_line_bundle(Sigma::Pos).count, 0);
        let g = classify_line_bundle(Sigma::Zero);
        assert_eq!((g.count, g.directions[0]), (1, (0.0, 1.0)));
        let m = classify_line_bundle(Sigma::Neg);
        assert_eq!(m.count, 2);
        for (x, y) in m.directions {
            assert!((x * x + y * y - 1.0).abs() < 1e-15);
            assert_eq!(x * x, y * y);
        }
    }

    #[test]
    fn galilei_boost_fixes_base_and_shears_fiber() {
        let (x, y) = generalized_rotation(Sigma::Zero, 0.7, (2.0, 1.0));
        assert_eq!(x, 2.0);
        assert!((y - (1.0 + 0.7 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn quarter_rotation() {
        let (x, y) = generalized_rotation(Sigma::Pos, core::f64::consts::FRAC_PI_2, (1.0, 0.0));
        assert!(x.abs() < 1e-15);
        assert!((y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lorentz_boost_preserves_null_diagonal() {
        for phi in [0.3, -1.2, 2.5] {
            let (x, y) = generalized_rotation(Sigma::Neg, phi, (1.0, 1.0));
            assert!((x - y).abs() < 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn rotations_preserve_the_interval() {
        for (sigma, phi) in [
            (Sigma::Pos, 0.37),
            (Sigma::Zero, 1.9),
            (Sigma::Neg, -0.8),
        ] {
            let sp = FiberedSpace::plane(sigma);
            let p1 = (0.3, -1.1);
            let p2 = (2.0, 0.5);
            let q1 = generalized_rotation(sigma, phi, p1);
            let q2 = generalized_rotation(sigma, phi, p2);
            let before = sp
                .metric_interval(&Displacement::plane(p2.0 - p1.0, p2.1 - p1.1))
                .unwrap();
            let after = sp
                .metric_interval(&Displacement::plane(q2.0 - q1.0, q2.1 - q1.1))
                .unwrap();
            let tol = 1e-12 * (1.0 + before.norm1());
            assert!((after.a0 - before.a0).abs() <= tol);
            assert!((after.a2 - before.a2).abs() <= tol);
        }
    }
}
