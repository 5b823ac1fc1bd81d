//! Run configuration: a single JSON document with defaults for every
//! field; command-line flags override file values. Unknown keys are
//! rejected so typos fail loudly before any computation starts.

use std::fs;
use std::path::Path;

use ck_core::dynamics::{FamilySpec, GridAxis};
use ck_core::{Sigma, Signature};
use serde::{Deserialize, Serialize};

use crate::commands::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub signature: SignatureCfg,
    pub oscillator: OscillatorCfg,
    pub integration: IntegrationCfg,
    /// One `[q, v]` pair per coordinate of the system being integrated.
    pub ic: Vec<[f64; 2]>,
    pub family: FamilyCfg,
    /// Directory all output files are written to.
    pub output: String,
    /// Seed for the randomized verification checks.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            signature: SignatureCfg::default(),
            oscillator: OscillatorCfg::default(),
            integration: IntegrationCfg::default(),
            ic: vec![[1.0, 0.0]],
            family: FamilyCfg::default(),
            output: "out".into(),
            seed: 42,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignatureCfg {
    pub sigma2: i8,
    pub sigma3: i8,
}

impl Default for SignatureCfg {
    fn default() -> Self {
        SignatureCfg {
            sigma2: 1,
            sigma3: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscillatorCfg {
    pub m: f64,
    pub gamma: f64,
}

impl Default for OscillatorCfg {
    fn default() -> Self {
        // omega = sqrt(2*gamma/m) = 1.
        OscillatorCfg { m: 1.0, gamma: 0.5 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrationCfg {
    pub h: f64,
    pub n: usize,
}

impl Default for IntegrationCfg {
    fn default() -> Self {
        IntegrationCfg { h: 1e-3, n: 10_000 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridCfg {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Default for GridCfg {
    fn default() -> Self {
        GridCfg {
            start: 0.0,
            stop: 0.0,
            count: 1,
        }
    }
}

impl GridCfg {
    pub fn axis(&self) -> GridAxis {
        GridAxis {
            start: self.start,
            stop: self.stop,
            count: self.count,
        }
    }

    /// Flag syntax `start:stop:count`, or a single number for a fixed axis.
    pub fn parse_flag(text: &str) -> Result<GridCfg, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        let err = || CliError::config(format!("bad grid '{text}': expected start:stop:count"));
        match parts.as_slice() {
            [v] => {
                let v: f64 = v.trim().parse().map_err(|_| err())?;
                Ok(GridCfg {
                    start: v,
                    stop: v,
                    count: 1,
                })
            }
            [start, stop, count] => Ok(GridCfg {
                start: start.trim().parse().map_err(|_| err())?,
                stop: stop.trim().parse().map_err(|_| err())?,
                count: count.trim().parse().map_err(|_| err())?,
            }),
            _ => Err(err()),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyCfg {
    pub amplitude: f64,
    pub phase: f64,
    pub u0: GridCfg,
    pub y0: GridCfg,
    pub w0: GridCfg,
    pub z0: GridCfg,
    pub horizon: f64,
}

impl Default for FamilyCfg {
    fn default() -> Self {
        FamilyCfg {
            amplitude: 1.0,
            phase: 0.0,
            u0: GridCfg {
                start: -1.0,
                stop: 1.0,
                count: 3,
            },
            y0: GridCfg {
                start: -1.0,
                stop: 1.0,
                count: 3,
            },
            w0: GridCfg {
                start: -1.0,
                stop: 1.0,
                count: 3,
            },
            z0: GridCfg::default(),
            horizon: 10.0,
        }
    }
}

impl FamilyCfg {
    pub fn spec(&self) -> FamilySpec {
        FamilySpec {
            amplitude: self.amplitude,
            phase: self.phase,
            u0: self.u0.axis(),
            y0: self.y0.axis(),
            w0: self.w0.axis(),
            z0: self.z0.axis(),
            horizon: self.horizon,
        }
    }
}

impl RunConfig {
    /// Defaults, overlaid with the JSON file when one is given.
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::config(format!("invalid config {}: {e}", p.display())))
            }
        }
    }

    pub fn signature(&self) -> Result<Signature, CliError> {
        Ok(Signature::new(
            parse_sigma(self.signature.sigma2)?,
            parse_sigma(self.signature.sigma3)?,
        ))
    }
}

pub fn parse_sigma(v: i8) -> Result<Sigma, CliError> {
    Sigma::from_i8(v).ok_or_else(|| CliError::config(format!("sigma must be -1, 0, or 1, got {v}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_self_consistent() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.ic, vec![[1.0, 0.0]]);
        assert!(cfg.family.spec().validate().is_ok());
        let sig = cfg.signature().unwrap();
        assert_eq!(sig, Signature::EUCLID);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"oscillator": {"mass": 2.0}}"#);
        assert!(err.is_err());
        let err = serde_json::from_str::<RunConfig>(r#"{"extra": 1}"#);
        assert!(err.is_err());
    }

    #[test]
    fn partial_configs_fill_from_defaults() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"oscillator": {"m": 2.0}, "seed": 7}"#).unwrap();
        assert_eq!(cfg.oscillator.m, 2.0);
        assert_eq!(cfg.oscillator.gamma, 0.5);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.integration.n, 10_000);
    }

    #[test]
    fn grid_flag_forms() {
        let g = GridCfg::parse_flag("-1:1:5").unwrap();
        assert_eq!((g.start, g.stop, g.count), (-1.0, 1.0, 5));
        let g = GridCfg::parse_flag("2.5").unwrap();
        assert_eq!((g.start, g.stop, g.count), (2.5, 2.5, 1));
        assert!(GridCfg::parse_flag("1:2").is_err());
        assert!(GridCfg::parse_flag("a:b:c").is_err());
    }
}
