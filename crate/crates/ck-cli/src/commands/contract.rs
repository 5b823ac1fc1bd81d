//! `contract`: dress an action with parameter substitutions, restrict
//! fiber coordinates, reduce at a signature, and print the result.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use ck_core::{
    plane_action, space_action, Coord, Expr, ParamMonomial, Signature, Substitution, Symbol,
};

use crate::commands::CliError;
use crate::config::parse_sigma;
use crate::formats::{self, ExprJson};

#[derive(Args, Debug)]
pub struct ContractArgs {
    /// Built-in starting action: `eq5` (plane) or `eq11` (space)
    #[arg(long, conflicts_with = "expr")]
    pub base: Option<String>,
    /// Inline starting integrand in the expression grammar
    #[arg(long)]
    pub expr: Option<String>,
    /// Substitution `name*=expr` (or `name=expr`), repeatable;
    /// single-monomial parameter dressings of a coordinate also rescale
    /// its velocity when combined with --time
    #[arg(long = "sub")]
    pub subs: Vec<String>,
    /// Time reparametrization factor, a parameter monomial such as `j2`
    /// or `j2*j3`
    #[arg(long)]
    pub time: Option<String>,
    /// Overall action prefactor, e.g. `1/j2` or `1/(j2*j3)`
    #[arg(long)]
    pub scale: Option<String>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sigma2: i8,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sigma3: i8,
    /// Fiber coordinate to freeze to its integration constant, repeatable
    #[arg(long = "freeze")]
    pub freeze: Vec<String>,
    /// Directory to write the JSON normal form into (contract.json)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn base_action(id: &str) -> Result<Expr, CliError> {
    match id {
        "eq5" => Ok(plane_action()),
        "eq11" => Ok(space_action()),
        other => Err(CliError::config(format!(
            "unknown base action '{other}' (expected eq5 or eq11)"
        ))),
    }
}

/// `name*=expr` or `name=expr`: the left side is a dynamical symbol, the
/// right side any expression. The `*` marker for "the new variable" is
/// cosmetic and stripped.
fn parse_sub(text: &str) -> Result<(Symbol, Expr), CliError> {
    let eq = text
        .find('=')
        .ok_or_else(|| CliError::parse(format!("substitution '{text}' is missing '='")))?;
    let lhs = text[..eq].trim().trim_end_matches('*').trim();
    let sym = Symbol::from_name(lhs)
        .ok_or_else(|| CliError::parse(format!("unknown symbol '{lhs}' in substitution")))?;
    let rhs = Expr::parse(text[eq + 1..].trim())?;
    Ok((sym, rhs))
}

pub fn build_substitution(
    subs: &[String],
    time: Option<&str>,
    scale: Option<&str>,
) -> Result<Substitution, CliError> {
    let mut s = Substitution::identity();
    for spec in subs {
        let (sym, e) = parse_sub(spec)?;
        s = s.with_symbol(sym, e);
    }
    if let Some(t) = time {
        s = s.with_time(ParamMonomial::parse(t)?);
    }
    if let Some(c) = scale {
        s = s.with_scale(ParamMonomial::parse(c)?);
    }
    Ok(s)
}

pub fn parse_freeze(names: &[String]) -> Result<Vec<Coord>, CliError> {
    names
        .iter()
        .map(|n| {
            Coord::from_name(n.trim())
                .ok_or_else(|| CliError::config(format!("unknown coordinate '{n}' in --freeze")))
        })
        .collect()
}

pub fn run(args: ContractArgs) -> Result<i32, CliError> {
    let action = match (&args.base, &args.expr) {
        (Some(id), _) => base_action(id)?,
        (None, Some(text)) => Expr::parse(text)?,
        (None, None) => {
            return Err(CliError::config(
                "either --base or --expr is required".into(),
            ))
        }
    };
    let sig = Signature::new(parse_sigma(args.sigma2)?, parse_sigma(args.sigma3)?);
    let sub = build_substitution(
        &args.subs,
        args.time.as_deref(),
        args.scale.as_deref(),
    )?;
    let frozen = parse_freeze(&args.freeze)?;

    let contracted = action.contract_action(&sub, sig, &frozen)?;
    println!("{}", contracted.render());

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        let doc = serde_json::json!({
            "signature": formats::signature_json(sig),
            "expr": contracted.render(),
            "normal_form": ExprJson::from_expr(&contracted),
        });
        formats::write_json(&dir.join("contract.json"), &doc)?;
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_specs_accept_both_marker_styles() {
        let (sym, e) = parse_sub("y*=j2*y").unwrap();
        assert_eq!(sym, Symbol::Y);
        assert!(e.equals(&Expr::parse("j2*y").unwrap()));
        let (sym, e) = parse_sub("m = j2^-2*m").unwrap();
        assert_eq!(sym, Symbol::M);
        assert!(e.equals(&Expr::parse("j2^-2*m").unwrap()));
        assert!(parse_sub("q=1").is_err());
        assert!(parse_sub("y j2*y").is_err());
    }

    #[test]
    fn freeze_names_validate() {
        assert_eq!(
            parse_freeze(&["x".into(), "y".into()]).unwrap(),
            vec![Coord::X, Coord::Y]
        );
        assert!(parse_freeze(&["vx".into()]).is_err());
    }
}
