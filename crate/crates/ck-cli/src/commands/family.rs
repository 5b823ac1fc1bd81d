//! `family`: generate a trajectory family, one CSV per member plus a
//! manifest, and report the family-level geometric check on stdout.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use ck_core::dynamics::{
    angular_momentum, energy, family_band, family_cylinder, family_region3, Clock, FamilyMember,
    Kind, OscillatorRun,
};

use crate::commands::CliError;
use crate::config::{GridCfg, RunConfig};
use crate::formats::{self, member_file_name, trajectory_csv, FamilyManifest, MemberEntry};

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phase: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Grid override `start:stop:count` (or a single value)
    #[arg(long, allow_hyphen_values = true)]
    pub u0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub w0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<String>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    /// Initial `q,v` pair for the base (cylinder only), repeatable
    #[arg(long, allow_hyphen_values = true)]
    pub ic: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Band,
    Cylinder,
    Region3,
}

impl Which {
    fn name(self) -> &'static str {
        match self {
            Which::Band => "band",
            Which::Cylinder => "cylinder",
            Which::Region3 => "region3",
        }
    }
}

fn apply_overrides(cfg: &mut RunConfig, args: &FamilyArgs) -> Result<(), CliError> {
    if let Some(a) = args.amplitude {
        cfg.family.amplitude = a;
    }
    if let Some(p) = args.phase {
        cfg.family.phase = p;
    }
    if let Some(h) = args.horizon {
        cfg.family.horizon = h;
    }
    for (flag, slot) in [
        (&args.u0, &mut cfg.family.u0),
        (&args.y0, &mut cfg.family.y0),
        (&args.w0, &mut cfg.family.w0),
        (&args.z0, &mut cfg.family.z0),
    ] {
        if let Some(text) = flag {
            *slot = GridCfg::parse_flag(text)?;
        }
    }
    if let Some(m) = args.m {
        cfg.oscillator.m = m;
    }
    if let Some(g) = args.gamma {
        cfg.oscillator.gamma = g;
    }
    if let Some(h) = args.h {
        cfg.integration.h = h;
    }
    if !args.ic.is_empty() {
        cfg.ic = args
            .ic
            .iter()
            .map(|p| super::simulate::parse_ic_pair(p))
            .collect::<Result<_, _>>()?;
    }
    Ok(())
}

/// Band and region members keep the base oscillation inside `|x| <= A`;
/// returns the worst ratio `|x|/A` over all samples.
fn amplitude_check(members: &[FamilyMember], amplitude: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for m in members {
        for s in &m.trajectory.samples {
            worst = worst.max(s.q[0].abs() / amplitude);
        }
    }
    worst
}

/// Cylinder members share the 2D base; returns the worst relative drift of
/// its energy and angular momentum over all samples.
fn invariant_drift(members: &[FamilyMember], run: &OscillatorRun) -> (f64, f64) {
    let (mut de, mut dl): (f64, f64) = (0.0, 0.0);
    for m in members {
        let s0 = &m.trajectory.samples[0];
        let e0 = energy(run, &s0.q[..2], &s0.v[..2], Kind::Base2d);
        let l0 = angular_momentum(run, &s0.q[..2], &s0.v[..2]);
        for s in &m.trajectory.samples {
            let e = energy(run, &s.q[..2], &s.v[..2], Kind::Base2d);
            let l = angular_momentum(run, &s.q[..2], &s.v[..2]);
            de = de.max((e - e0).abs() / e0.abs().max(f64::MIN_POSITIVE));
            dl = dl.max((l - l0).abs() / l0.abs().max(f64::MIN_POSITIVE));
        }
    }
    (de, dl)
}

pub fn run(args: FamilyArgs) -> Result<i32, CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref())?;
    apply_overrides(&mut cfg, &args)?;
    let spec = cfg.family.spec();
    spec.validate()?;

    let mut ic: Vec<(f64, f64)> = cfg.ic.iter().map(|&[q, v]| (q, v)).collect();
    if args.which == Which::Cylinder && args.ic.is_empty() && ic.len() != 2 {
        // No explicit 2-d base given: default to the circular orbit of the
        // family's amplitude and phase so the first-integral report applies.
        let omega = (2.0 * cfg.oscillator.gamma / cfg.oscillator.m).sqrt();
        let (a, phi) = (spec.amplitude, spec.phase);
        ic = vec![
            (a * phi.cos(), -a * omega * phi.sin()),
            (a * phi.sin(), a * omega * phi.cos()),
        ];
    }
    let run = OscillatorRun::new(
        cfg.oscillator.m,
        cfg.oscillator.gamma,
        Clock::T,
        ic,
        cfg.integration.h,
        1,
    )?;
    let members = match args.which {
        Which::Band => family_band(&spec, &run)?,
        Which::Cylinder => family_cylinder(&spec, &run)?,
        Which::Region3 => family_region3(&spec, &run)?,
    };

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output));
    fs::create_dir_all(&out)?;
    for m in &members {
        fs::write(
            out.join(member_file_name(&m.indices)),
            trajectory_csv(&m.trajectory),
        )?;
    }
    let first = &members[0].trajectory;
    let manifest = FamilyManifest {
        which: args.which.name().to_string(),
        omega: run.omega(),
        h: first.h,
        steps: first.samples.len() - 1,
        clock: first.clock.label().to_string(),
        members: members.iter().map(MemberEntry::from_member).collect(),
    };
    formats::write_json(&out.join("manifest.json"), &manifest)?;

    match args.which {
        Which::Band | Which::Region3 => {
            let worst = amplitude_check(&members, spec.amplitude);
            let ok = worst <= 1.0 + 1e-9;
            println!(
                "{} members; amplitude bound |x| <= A: {} (max |x|/A = {worst})",
                members.len(),
                if ok { "ok" } else { "VIOLATED" }
            );
        }
        Which::Cylinder => {
            let (de, dl) = invariant_drift(&members, &run);
            let ok = de <= 1e-6 && dl <= 1e-6;
            println!(
                "{} members; base invariants: {} (energy drift {de:e}, angular momentum drift {dl:e})",
                members.len(),
                if ok { "ok" } else { "DRIFTING" }
            );
        }
    }
    Ok(0)
}
