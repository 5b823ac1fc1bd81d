//! `classify` and `metric`: describe a fibered space (coordinate tags,
//! fibration levels, isolated-line bundles) and evaluate intervals.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use ck_core::{classify_line_bundle, Displacement, FiberedSpace, Sigma};

use crate::commands::CliError;
use crate::config::parse_sigma;
use crate::formats::{self, SpaceJson};

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sigma2: i8,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sigma3: i8,
    /// 2 for a plane, 3 for a doubly fibered space
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Read the space from a JSON description instead of the flags
    #[arg(long, conflicts_with_all = ["sigma2", "sigma3", "dim"])]
    pub space: Option<PathBuf>,
    /// Directory to also write space.json into
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn load_space(
    space: Option<&PathBuf>,
    sigma2: i8,
    sigma3: i8,
    dim: usize,
) -> Result<FiberedSpace, CliError> {
    match space {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
            let json: SpaceJson = serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("invalid space {}: {e}", path.display())))?;
            json.to_space()
        }
        None => {
            let s2 = parse_sigma(sigma2)?;
            let s3 = parse_sigma(sigma3)?;
            match dim {
                2 => Ok(FiberedSpace::plane(s2)),
                3 => Ok(FiberedSpace::space(s2, s3)),
                d => Err(CliError::config(format!("dim must be 2 or 3, got {d}"))),
            }
        }
    }
}

fn bundle_json(plane: &str, sigma: Sigma) -> serde_json::Value {
    let bundle = classify_line_bundle(sigma);
    serde_json::json!({
        "plane": plane,
        "sigma": sigma.as_i8(),
        "isolated_count": bundle.count,
        "directions": bundle.directions,
    })
}

pub fn run_classify(args: ClassifyArgs) -> Result<i32, CliError> {
    let space = load_space(args.space.as_ref(), args.sigma2, args.sigma3, args.dim)?;
    let json = SpaceJson::from_space(&space);
    let mut bundles = vec![bundle_json("xy", space.sig().sigma2)];
    if space.dim() == 3 {
        bundles.push(bundle_json("yz", space.sig().sigma3));
    }
    let doc = serde_json::json!({
        "space": json,
        "line_bundles": bundles,
    });
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::config(format!("serialize: {e}")))?;
    text.push('\n');
    print!("{text}");
    if let Some(dir) = &args.out {
        // The file holds the bare space description so it can be fed back
        // through --space; the bundle report stays on stdout.
        fs::create_dir_all(dir)?;
        formats::write_json(&dir.join("space.json"), &json)?;
    }
    Ok(0)
}

#[derive(Args, Debug)]
pub struct MetricArgs {
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sigma2: i8,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sigma3: i8,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, conflicts_with_all = ["sigma2", "sigma3", "dim"])]
    pub space: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub dx: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub dy: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub dz: Option<f64>,
    /// Evaluate the metric of this fibration level instead of the full
    /// interval (0 = base)
    #[arg(long)]
    pub level: Option<usize>,
}

pub fn run_metric(args: MetricArgs) -> Result<i32, CliError> {
    let space = load_space(args.space.as_ref(), args.sigma2, args.sigma3, args.dim)?;
    let d = match (space.dim(), args.dz) {
        (2, None) => Displacement::plane(args.dx, args.dy),
        (3, Some(dz)) => Displacement::space(args.dx, args.dy, dz),
        (2, Some(_)) => {
            return Err(CliError::config("--dz given for a 2-dimensional space".into()))
        }
        (3, None) => return Err(CliError::config("--dz required for a 3-dimensional space".into())),
        _ => unreachable!(),
    };
    match args.level {
        None => {
            let interval = space.metric_interval(&d)?;
            println!("{}", interval.render());
        }
        Some(level) => {
            let value = space.level_metric(level, &d)?;
            println!("{value}");
        }
    }
    Ok(0)
}
