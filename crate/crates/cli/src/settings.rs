use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    /// f = g − (0, 0, L′)
    #[value(name = "f")]
    LowerF,
    /// The assembled map g
    #[value(name = "g")]
    LowerG,
    /// F = Id + Z
    #[value(name = "F")]
    UpperF,
    /// The modified Zorich map Z
    #[value(name = "Z")]
    UpperZ,
    /// h∘φ in the plane
    Example1,
    /// f∘φ
    Example2,
    /// φ_patch∘f
    Example3,
    /// h(z) = z + e^{−z} + 1 in the plane
    FatouH,
}

impl MapKind {
    pub fn dim(self) -> usize {
        match self {
            MapKind::Example1 | MapKind::FatouH => 2,
            _ => 3,
        }
    }
}

impl FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <MapKind as ValueEnum>::from_str(s, false)
    }
}

/// Flags shared by every command. Any of them may also be given as
/// `key = value` in the file named by `--config`; flags win.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// Plain-text `key = value` file (keys are the long flag names)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Map to iterate (default f)
    #[arg(long, global = true, value_enum)]
    pub map: Option<MapKind>,
    /// Seed for every sampled check (default 0)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Iteration budget per orbit (default 50)
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Orbits stop once |x| exceeds this (default 1e300)
    #[arg(long = "radius-cap", global = true)]
    pub radius_cap: Option<f64>,
    /// Output file; orbit and rates default to stdout, render to slice.ppm
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Grid resolution for the beam constants (at least 64)
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Seam discrepancy tolerance for `verify` (default 1e-6)
    #[arg(long = "tol-seam", global = true)]
    pub tol_seam: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub map: MapKind,
    pub seed: u64,
    pub budget: usize,
    pub radius_cap: f64,
    pub out: Option<PathBuf>,
    pub resolution: usize,
    pub tol_seam: f64,
    /// Remaining config-file entries, for command-specific keys.
    pub extra: HashMap<String, String>,
}

#[derive(Debug)]
pub enum ConfigError {
    Usage(String),
    Io(String),
}

pub fn read_config(path: &std::path::Path) -> Result<HashMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    Ok(qrdyn::report::parse_key_values(&text).into_iter().collect())
}

pub fn pick<T: FromStr>(flag: Option<T>, key: &str, cfg: &mut HashMap<String, String>) -> Result<Option<T>, ConfigError> {
    let from_file = cfg.remove(key);
    if flag.is_some() {
        return Ok(flag);
    }
    from_file
        .map(|v| v.parse::<T>().map_err(|_| ConfigError::Usage(format!("config key {key}: cannot parse {v:?}"))))
        .transpose()
}

impl Settings {
    pub fn resolve(flags: &Flags, default_map: MapKind) -> Result<Self, ConfigError> {
        let mut cfg = match &flags.config {
            Some(p) => read_config(p)?,
            None => HashMap::new(),
        };
        let s = Settings {
            map: pick(flags.map, "map", &mut cfg)?.unwrap_or(default_map),
            seed: pick(flags.seed, "seed", &mut cfg)?.unwrap_or(0),
            budget: pick(flags.budget, "budget", &mut cfg)?.unwrap_or(50),
            radius_cap: pick(flags.radius_cap, "radius-cap", &mut cfg)?.unwrap_or(qrdyn::dynamics::DEFAULT_RADIUS_CAP),
            out: pick(flags.out.clone(), "out", &mut cfg)?,
            resolution: pick(flags.resolution, "resolution", &mut cfg)?.unwrap_or(64),
            tol_seam: pick(flags.tol_seam, "tol-seam", &mut cfg)?.unwrap_or(qrdyn::construction::DEFAULT_SEAM_TOLERANCE),
            extra: cfg,
        };
        if s.budget == 0 {
            return Err(ConfigError::Usage("--budget must be positive".into()));
        }
        if s.resolution < 64 {
            return Err(ConfigError::Usage("--resolution must be at least 64".into()));
        }
        if !(s.radius_cap > 1.0) || !(s.tol_seam > 0.0) {
            return Err(ConfigError::Usage("--radius-cap must exceed 1 and --tol-seam must be positive".into()));
        }
        Ok(s)
    }

    /// A command-specific value: the flag if given, else the config entry.
    pub fn extra<T: FromStr>(&mut self, flag: Option<T>, key: &str) -> Result<Option<T>, ConfigError> {
        pick(flag, key, &mut self.extra)
    }
}

/// Comma-separated reals such as `0,0,-1`.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"))).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reals(pub Vec<f64>);

impl FromStr for Reals {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_list(s).map(Reals)
    }
}

/// `WxH`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Size(pub usize, pub usize);

impl FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got {s:?}"))?;
        let w = w.parse().map_err(|_| format!("bad width in {s:?}"))?;
        let h = h.parse().map_err(|_| format!("bad height in {s:?}"))?;
        Ok(Size(w, h))
    }
}

/// `x2=0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane(pub qrdyn::render::Axis, pub f64);

impl FromStr for Plane {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, v) = s.split_once('=').ok_or_else(|| format!("expected AXIS=VALUE, got {s:?}"))?;
        let axis = a.trim().parse().map_err(|e: qrdyn::Error| e.to_string())?;
        let v = v.trim().parse().map_err(|_| format!("bad plane value in {s:?}"))?;
        Ok(Plane(axis, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# experiment\nseed = 9\nbudget = 12\nmap = example2\nstart = 1,2,3\n").unwrap();
        let flags = Flags { config: Some(path), seed: Some(3), ..Flags::default() };
        let mut s = Settings::resolve(&flags, MapKind::LowerF).unwrap();
        assert_eq!((s.seed, s.budget, s.map), (3, 12, MapKind::Example2));
        assert_eq!(s.extra::<Reals>(None, "start").unwrap(), Some(Reals(vec![1.0, 2.0, 3.0])));
    }

    #[test]
    fn value_parsers() {
        assert_eq!("512x256".parse::<Size>().unwrap(), Size(512, 256));
        assert!("512".parse::<Size>().is_err());
        assert_eq!("x2=0".parse::<Plane>().unwrap(), Plane(qrdyn::render::Axis::X2, 0.0));
        assert!("y=0".parse::<Plane>().is_err());
        assert_eq!(parse_list("0, 0,-1").unwrap(), vec![0.0, 0.0, -1.0]);
        assert_eq!("fatou-h".parse::<MapKind>().unwrap(), MapKind::FatouH);
        assert_eq!("F".parse::<MapKind>().unwrap(), MapKind::UpperF);
    }

    #[test]
    fn zero_budget_is_usage_error() {
        let flags = Flags { budget: Some(0), ..Flags::default() };
        assert!(matches!(Settings::resolve(&flags, MapKind::LowerF), Err(ConfigError::Usage(_))));
    }
}
