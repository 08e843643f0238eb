//! `key = value` run configuration with command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::IntegrationSchedule;
use crate::ensemble::{EnsembleConfig, HistogramSpec};
use crate::error::{QtrajError, Result};
use crate::sampling::Theory;
use crate::wavefield::{DoubleSlitParams, UnitSystem};

pub const KEYS: &[&str] = &[
    "x_half_nm",
    "sigma_nm",
    "mass_me",
    "n_traj",
    "theory",
    "seed",
    "t0_ps",
    "t_final_ps",
    "dt_ps",
    "slices_ps",
    "bins",
    "out_dir",
    "record_stride",
    "include_stalled",
];

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub theory: Option<Theory>,
    pub seed: Option<u64>,
    pub n_traj: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub x_half_nm: f64,
    pub sigma_nm: f64,
    pub mass_me: f64,
    pub out_dir: PathBuf,
    pub ensemble: EnsembleConfig,
}

impl RunConfig {
    pub fn params(&self) -> DoubleSlitParams {
        let units = UnitSystem::with_mass(self.mass_me).expect("validated at parse time");
        DoubleSlitParams::new(self.x_half_nm, self.sigma_nm, units).expect("validated at parse time")
    }
}

fn parse_lines(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            QtrajError::config(line, format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(QtrajError::config(key, "unknown key"));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(QtrajError::config(key, "given more than once"));
        }
    }
    Ok(map)
}

fn get<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str, default: T) -> Result<T> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| QtrajError::config(key, format!("cannot parse `{v}`"))),
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(QtrajError::config(key, "must be a positive finite number"))
    }
}

/// Parse a config document and apply overrides. `None` means all defaults.
pub fn parse_config(text: Option<&str>, overrides: &Overrides) -> Result<RunConfig> {
    let map = match text {
        Some(t) => parse_lines(t)?,
        None => BTreeMap::new(),
    };

    let x_half: f64 = get(&map, "x_half_nm", 50.0)?;
    if !(x_half.is_finite() && x_half >= 0.0) {
        return Err(QtrajError::config("x_half_nm", "must be a finite number >= 0"));
    }
    let sigma = positive("sigma_nm", get(&map, "sigma_nm", 10.0)?)?;
    let mass = positive("mass_me", get(&map, "mass_me", 1.0)?)?;
    let params = DoubleSlitParams::new(x_half, sigma, UnitSystem::with_mass(mass)?)?;

    let n_traj = match overrides.n_traj {
        Some(n) => n,
        None => get(&map, "n_traj", 40_000usize)?,
    };
    if n_traj == 0 {
        return Err(QtrajError::config("n_traj", "must be at least 1"));
    }
    let theory = match overrides.theory {
        Some(t) => t,
        None => get(&map, "theory", Theory::Revised)?,
    };
    let seed = match overrides.seed {
        Some(s) => s,
        None => get(&map, "seed", 1u64)?,
    };
    let t0: f64 = get(&map, "t0_ps", 0.0)?;
    if !t0.is_finite() {
        return Err(QtrajError::config("t0_ps", "must be finite"));
    }
    let t_final: f64 = get(&map, "t_final_ps", 5.0)?;
    if !(t_final.is_finite() && t_final > t0) {
        return Err(QtrajError::config("t_final_ps", "must be finite and exceed t0_ps"));
    }
    let dt = positive("dt_ps", get(&map, "dt_ps", 0.01)?)?;
    let bins: usize = get(&map, "bins", 200)?;
    if bins == 0 {
        return Err(QtrajError::config("bins", "must be at least 1"));
    }
    let record_stride: usize = get(&map, "record_stride", 10)?;
    if record_stride == 0 {
        return Err(QtrajError::config("record_stride", "must be at least 1"));
    }
    let include_stalled: bool = get(&map, "include_stalled", false)?;
    let slice_times = match map.get("slices_ps") {
        None => {
            let mut v = vec![t0];
            if 3.5 > t0 && 3.5 < t_final {
                v.push(3.5);
            }
            v.push(t_final);
            v
        }
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| QtrajError::config("slices_ps", format!("cannot parse `{}`", s.trim())))
            })
            .collect::<Result<Vec<f64>>>()?,
    };
    let out_dir = match &overrides.out_dir {
        Some(p) => p.clone(),
        None => PathBuf::from(map.get("out_dir").map_or("qtraj-out", |s| s.as_str())),
    };

    let mut schedule = IntegrationSchedule::for_params(&params, t0, t_final, dt);
    schedule.record_stride = record_stride;
    let ensemble = EnsembleConfig {
        n_traj,
        theory,
        master_seed: seed,
        schedule,
        slice_times,
        position_bins: HistogramSpec::symmetric(bins, x_half + 6.0 * params.width(t_final)),
        momentum_bins: HistogramSpec::symmetric(bins, 6.0 * params.sigma_p()),
        include_stalled,
    };
    ensemble.validate()?;

    Ok(RunConfig {
        x_half_nm: x_half,
        sigma_nm: sigma,
        mass_me: mass,
        out_dir,
        ensemble,
    })
}

/// Read the file (if any) and parse it.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let text = match path {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| QtrajError::io(p, e))?),
        None => None,
    };
    parse_config(text.as_deref(), overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let cfg = parse_config(None, &Overrides::default()).unwrap();
        assert_eq!(cfg.x_half_nm, 50.0);
        assert_eq!(cfg.sigma_nm, 10.0);
        assert_eq!(cfg.mass_me, 1.0);
        assert_eq!(cfg.ensemble.n_traj, 40_000);
        assert_eq!(cfg.ensemble.schedule.t0, 0.0);
        assert_eq!(cfg.ensemble.schedule.t_final, 5.0);
        assert_eq!(cfg.ensemble.slice_times, vec![0.0, 3.5, 5.0]);
        assert_eq!(parse_config(Some("# nothing\n\n"), &Overrides::default()).unwrap(), cfg);
    }

    #[test]
    fn flags_override_file() {
        let overrides = Overrides {
            theory: Some(Theory::Revised),
            seed: Some(7),
            ..Default::default()
        };
        let cfg = parse_config(Some("theory = dbb\nseed = 3\n"), &overrides).unwrap();
        assert_eq!(cfg.ensemble.theory, Theory::Revised);
        assert_eq!(cfg.ensemble.master_seed, 7);
        let cfg = parse_config(Some("theory = dbb\n"), &Overrides::default()).unwrap();
        assert_eq!(cfg.ensemble.theory, Theory::Dbb);
    }

    #[test]
    fn zero_sigma_is_rejected() {
        match parse_config(Some("sigma_nm = 0"), &Overrides::default()) {
            Err(QtrajError::Config { key, .. }) => assert_eq!(key, "sigma_nm"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let err = parse_config(Some("slit_count = 3"), &Overrides::default()).unwrap_err();
        assert!(matches!(err, QtrajError::Config { ref key, .. } if key == "slit_count"));
        assert!(parse_config(Some("n_traj = many"), &Overrides::default()).is_err());
        assert!(parse_config(Some("just words"), &Overrides::default()).is_err());
        assert!(parse_config(Some("seed = 1\nseed = 2"), &Overrides::default()).is_err());
        assert!(parse_config(Some("slices_ps = 0, 9"), &Overrides::default()).is_err());
    }

    #[test]
    fn comments_and_lists() {
        let cfg = parse_config(
            Some("x_half_nm = 40 # narrower\nslices_ps = 0, 1.5,2\nt_final_ps = 2\nbins=50\n"),
            &Overrides::default(),
        )
        .unwrap();
        assert_eq!(cfg.x_half_nm, 40.0);
        assert_eq!(cfg.ensemble.slice_times, vec![0.0, 1.5, 2.0]);
        assert_eq!(cfg.ensemble.momentum_bins.n_bins, 50);
    }
}
