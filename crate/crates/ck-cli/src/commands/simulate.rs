//! `simulate`: integrate one system and write `trajectory.csv` plus a
//! manifest echoing the effective configuration.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use ck_core::dynamics::{integrate, Clock, Kind, OscillatorRun};
use ck_core::Coord;

use crate::commands::CliError;
use crate::config::RunConfig;
use crate::formats::{self, trajectory_csv};

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = KindArg::Base1d)]
    pub kind: KindArg,
    /// Fiber output coordinate for --kind fiber-free
    #[arg(long, default_value = "y")]
    pub fiber_coord: String,
    /// Clock label override: t, t_tilde, or t_hat
    #[arg(long)]
    pub clock: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Initial `q,v` pair, repeatable (one per coordinate)
    #[arg(long, allow_hyphen_values = true)]
    pub ic: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Base1d,
    Base2d,
    FiberFree,
    MinkowskiPlane,
}

impl KindArg {
    fn kind(self, fiber_coord: &str) -> Result<Kind, CliError> {
        Ok(match self {
            KindArg::Base1d => Kind::Base1d,
            KindArg::Base2d => Kind::Base2d,
            KindArg::MinkowskiPlane => Kind::MinkowskiPlane,
            KindArg::FiberFree => {
                let c = Coord::from_name(fiber_coord).ok_or_else(|| {
                    CliError::config(format!("unknown fiber coordinate '{fiber_coord}'"))
                })?;
                Kind::FiberFree(c)
            }
        })
    }

    fn default_clock(self) -> Clock {
        match self {
            KindArg::FiberFree => Clock::TTilde,
            _ => Clock::T,
        }
    }

    fn name(self) -> &'static str {
        match self {
            KindArg::Base1d => "base1d",
            KindArg::Base2d => "base2d",
            KindArg::FiberFree => "fiber-free",
            KindArg::MinkowskiPlane => "minkowski-plane",
        }
    }
}

pub fn parse_ic_pair(text: &str) -> Result<[f64; 2], CliError> {
    let err = || CliError::config(format!("bad --ic '{text}': expected q,v"));
    let (q, v) = text.split_once(',').ok_or_else(err)?;
    Ok([
        q.trim().parse().map_err(|_| err())?,
        v.trim().parse().map_err(|_| err())?,
    ])
}

pub fn run(args: SimulateArgs) -> Result<i32, CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref())?;
    if let Some(m) = args.m {
        cfg.oscillator.m = m;
    }
    if let Some(g) = args.gamma {
        cfg.oscillator.gamma = g;
    }
    if let Some(h) = args.h {
        cfg.integration.h = h;
    }
    if let Some(n) = args.n {
        cfg.integration.n = n;
    }
    if !args.ic.is_empty() {
        cfg.ic = args
            .ic
            .iter()
            .map(|p| parse_ic_pair(p))
            .collect::<Result<_, _>>()?;
    }

    let kind = args.kind.kind(&args.fiber_coord)?;
    let clock = match &args.clock {
        None => args.kind.default_clock(),
        Some(label) => Clock::from_label(label)
            .ok_or_else(|| CliError::config(format!("unknown clock label '{label}'")))?,
    };
    let run = OscillatorRun::new(
        cfg.oscillator.m,
        cfg.oscillator.gamma,
        clock,
        cfg.ic.iter().map(|&[q, v]| (q, v)).collect(),
        cfg.integration.h,
        cfg.integration.n,
    )?;
    let trajectory = integrate(&run, kind)?;

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output));
    fs::create_dir_all(&out)?;
    fs::write(out.join("trajectory.csv"), trajectory_csv(&trajectory))?;
    let manifest = serde_json::json!({
        "kind": args.kind.name(),
        "clock": clock.label(),
        "omega": run.omega(),
        "config": cfg,
    });
    formats::write_json(&out.join("manifest.json"), &manifest)?;
    println!(
        "wrote {} samples to {}",
        trajectory.samples.len(),
        out.join("trajectory.csv").display()
    );
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ic_pairs_parse() {
        assert_eq!(parse_ic_pair("1.5,-2").unwrap(), [1.5, -2.0]);
        assert!(parse_ic_pair("1.5").is_err());
        assert!(parse_ic_pair("a,b").is_err());
    }
}
