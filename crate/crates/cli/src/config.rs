//! Run configuration: built-in defaults, then a TOML file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use gbbm_core::RunConfig;

/// Solver overrides shared by every command that runs the solver.
///
/// The flags carry no clap defaults so that an unset flag never masks the
/// config file; the documented defaults are those of `RunConfig::default()`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunOverrides {
    /// TOML file with any subset of the run settings
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Grid points [default: 4096]
    #[arg(long)]
    pub n: Option<usize>,
    /// Box length [default: 800]
    #[arg(long)]
    pub length: Option<f64>,
    /// Left edge of the box [default: -length/4]
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    /// RK4 time step [default: 0.1]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time; runs start at t = 1 [default: 200]
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Gaussian amplitude epsilon [default: 0.05]
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    /// Gaussian width sigma [default: 4]
    #[arg(long)]
    pub width: Option<f64>,
    /// Keep every k-th step as a snapshot [default: 10]
    #[arg(long)]
    pub snapshot_stride: Option<usize>,
    /// Zero-padding factor for the quintic term [default: 3]
    #[arg(long)]
    pub dealias_factor: Option<usize>,
    /// Drop the nonlinearity (free flow) [default: false]
    #[arg(long)]
    pub linear: bool,
    /// Abort when the edge layers exceed this fraction of the peak [default: 1e-8]
    #[arg(long)]
    pub boundary_tol: Option<f64>,
}

impl RunOverrides {
    /// Effective configuration starting from `base` instead of the defaults.
    pub fn resolve_from(&self, base: RunConfig) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_file(path)?,
            None => base,
        };
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        take!(
            n,
            length,
            dt,
            t_end,
            amplitude,
            width,
            snapshot_stride,
            dealias_factor,
            boundary_tol
        );
        if self.x_min.is_some() {
            cfg.x_min = self.x_min;
        }
        if self.linear {
            cfg.nonlinear = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        self.resolve_from(RunConfig::default())
    }
}

/// Settings absent from the file keep their defaults; unknown keys are errors.
pub fn load_file(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn to_toml(cfg: &RunConfig) -> Result<String> {
    Ok(toml::to_string(cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "n = 1024\ndt = 0.2\namplitude = 0.1\n").unwrap();
        let o = RunOverrides {
            config: Some(path),
            dt: Some(0.05),
            ..RunOverrides::default()
        };
        let cfg = o.resolve().unwrap();
        assert_eq!(cfg.n, 1024);
        assert_eq!(cfg.dt, 0.05);
        assert_eq!(cfg.amplitude, 0.1);
        assert_eq!(cfg.length, 800.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        fs::write(&path, "grid = 3\n").unwrap();
        assert!(load_file(&path).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig {
            x_min: Some(-3.5),
            ..RunConfig::default()
        };
        let back: RunConfig = toml::from_str(&to_toml(&cfg).unwrap()).unwrap();
        assert_eq!(back.x_min, Some(-3.5));
        assert_eq!(back.n, cfg.n);
    }
}
