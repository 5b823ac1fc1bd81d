//! Serialized shapes shared by the subcommands: JSON descriptions of
//! fibered spaces and expressions, trajectory CSV, and family manifests.
//! Everything serializes through ordered containers so output bytes are a
//! pure function of the data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use ck_core::dynamics::{FamilyMember, Trajectory};
use ck_core::{Expr, FiberedSpace, Sigma, Signature};
use serde::{Deserialize, Serialize};

use crate::commands::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpaceJson {
    pub dim: usize,
    pub sigma2: i8,
    pub sigma3: i8,
    pub coords: Vec<CoordJson>,
    pub levels: Vec<LevelJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CoordJson {
    pub name: String,
    pub tag: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LevelJson {
    pub base: Vec<String>,
    pub fiber: Vec<String>,
}

impl SpaceJson {
    pub fn from_space(s: &FiberedSpace) -> SpaceJson {
        SpaceJson {
            dim: s.dim(),
            sigma2: s.sig().sigma2.as_i8(),
            sigma3: s.sig().sigma3.as_i8(),
            coords: s
                .coords()
                .iter()
                .map(|c| CoordJson {
                    name: c.name.to_string(),
                    tag: c.tag.to_string(),
                })
                .collect(),
            levels: s
                .levels()
                .iter()
                .map(|l| LevelJson {
                    base: l.base.iter().map(|n| n.to_string()).collect(),
                    fiber: l.fiber.iter().map(|n| n.to_string()).collect(),
                })
                .collect(),
        }
    }

    pub fn to_space(&self) -> Result<FiberedSpace, CliError> {
        let s2 = Sigma::from_i8(self.sigma2)
            .ok_or_else(|| CliError::config(format!("bad sigma2 {}", self.sigma2)))?;
        let s3 = Sigma::from_i8(self.sigma3)
            .ok_or_else(|| CliError::config(format!("bad sigma3 {}", self.sigma3)))?;
        let space = match self.dim {
            2 => FiberedSpace::plane(s2),
            3 => FiberedSpace::space(s2, s3),
            d => return Err(CliError::config(format!("dim must be 2 or 3, got {d}"))),
        };
        // A hand-written file may disagree with the derived structure;
        // reject rather than silently rebuild something else.
        let derived = SpaceJson::from_space(&space);
        if derived != *self {
            return Err(CliError::config(
                "space description does not match its signature".into(),
            ));
        }
        Ok(space)
    }
}

/// Machine-readable normal form: one entry per monomial, symbols mapped to
/// exponents, in the engine's canonical term order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExprJson {
    pub monomials: Vec<MonomialJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MonomialJson {
    pub coeff: f64,
    pub p2: i32,
    pub p3: i32,
    pub symbols: BTreeMap<String, u32>,
}

impl ExprJson {
    pub fn from_expr(e: &Expr) -> ExprJson {
        ExprJson {
            monomials: e
                .terms()
                .map(|(m, c)| MonomialJson {
                    coeff: c,
                    p2: m.p2,
                    p3: m.p3,
                    symbols: m
                        .symbol_powers()
                        .map(|(s, k)| (s.name().to_string(), k))
                        .collect(),
                })
                .collect(),
        }
    }
}

/// CSV with header `clock,step,time,<q,v per coordinate>`, e.g.
/// `clock,step,time,x,vx,y,vy`.
pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut out = String::from("clock,step,time");
    for c in &t.coords {
        let q = c.name();
        write!(out, ",{q},v{q}").unwrap();
    }
    out.push('\n');
    let label = t.clock.label();
    for (k, s) in t.samples.iter().enumerate() {
        write!(out, "{label},{k},{}", s.t).unwrap();
        for i in 0..t.coords.len() {
            write!(out, ",{},{}", s.q[i], s.v[i]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn member_file_name(indices: &[usize]) -> String {
    let mut name = String::from("member");
    for i in indices {
        write!(name, "_{i}").unwrap();
    }
    name.push_str(".csv");
    name
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyManifest {
    pub which: String,
    pub omega: f64,
    pub h: f64,
    pub steps: usize,
    pub clock: String,
    pub members: Vec<MemberEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MemberEntry {
    pub file: String,
    pub indices: Vec<usize>,
    pub constants: BTreeMap<String, f64>,
}

impl MemberEntry {
    pub fn from_member(m: &FamilyMember) -> MemberEntry {
        MemberEntry {
            file: member_file_name(&m.indices),
            indices: m.indices.clone(),
            constants: m
                .constants
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::config(format!("serialize {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::config(format!("write {}: {e}", path.display())))
}

pub fn signature_json(sig: Signature) -> serde_json::Value {
    serde_json::json!({
        "sigma2": sig.sigma2.as_i8(),
        "sigma3": sig.sigma3.as_i8(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ck_core::dynamics::{integrate, Clock, Kind, OscillatorRun};
    use ck_core::Sigma;

    #[test]
    fn space_json_round_trip() {
        let space = FiberedSpace::space(Sigma::Zero, Sigma::Zero);
        let json = SpaceJson::from_space(&space);
        assert_eq!(json.dim, 3);
        assert_eq!(json.coords[1].tag, "Q1");
        assert_eq!(json.coords[2].tag, "Q2");
        let text = serde_json::to_string(&json).unwrap();
        let back: SpaceJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_space().unwrap().sig(), space.sig());
    }

    #[test]
    fn space_json_rejects_inconsistent_files() {
        let mut json = SpaceJson::from_space(&FiberedSpace::plane(Sigma::Zero));
        json.coords[1].tag = "L".into();
        assert!(json.to_space().is_err());
    }

    #[test]
    fn expr_json_orders_monomials_canonically() {
        let e = Expr::parse("x^2 + j2^2*y^2 - 3").unwrap();
        let json = ExprJson::from_expr(&e);
        assert_eq!(json.monomials.len(), 3);
        assert_eq!(json.monomials[0].coeff, -3.0);
        assert_eq!(json.monomials[1].symbols.get("x"), Some(&2));
        assert_eq!(json.monomials[2].p2, 2);
    }

    #[test]
    fn csv_shape_matches_contract() {
        let run = OscillatorRun::new(1.0, 0.5, Clock::T, vec![(1.0, 0.0)], 0.5, 2).unwrap();
        let csv = trajectory_csv(&integrate(&run, Kind::Base1d).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "clock,step,time,x,vx");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("t,0,0,1,"));
        assert!(lines[2].starts_with("t,1,0.5,"));
    }

    #[test]
    fn member_names_cover_two_and_three_indices() {
        assert_eq!(member_file_name(&[0, 2]), "member_0_2.csv");
        assert_eq!(member_file_name(&[1, 0, 3]), "member_1_0_3.csv");
    }
}
