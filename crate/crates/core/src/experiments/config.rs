//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qfi::SLD_RANK_TOL;

/// Which dataset to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Figure1,
    Figure2,
    Exclusion,
    GhzScaling,
    Validate,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Figure1 => "figure1",
            Self::Figure2 => "figure2",
            Self::Exclusion => "exclusion",
            Self::GhzScaling => "ghz_scaling",
            Self::Validate => "validate",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "figure1" => Ok(Self::Figure1),
            "figure2" => Ok(Self::Figure2),
            "exclusion" => Ok(Self::Exclusion),
            "ghz_scaling" | "ghz-scaling" => Ok(Self::GhzScaling),
            "validate" => Ok(Self::Validate),
            other => Err(Error::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

/// Spacing rule for the qubit-number grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "log" => Ok(Self::Log),
            other => Err(Error::Config(format!("unknown spacing '{other}', expected linear or log"))),
        }
    }
}

/// Declarative description of one sweep.
///
/// `r` is a list so that one file can cover several curves; single-curve
/// experiments use its first entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub r: Vec<f64>,
    pub var_list: Vec<f64>,
    pub n_min: usize,
    pub n_max: usize,
    pub n_points: usize,
    pub n_spacing: Spacing,
    pub tau_points: usize,
    pub tau_max: f64,
    pub r_points: usize,
    pub r_max: f64,
    pub fidelity_target: f64,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    /// SLD rank cutoff used by the validation suite.
    pub sld_rank_tol: f64,
    /// Random draws per validation invariant.
    pub samples: usize,
}

pub const CONFIG_KEYS: &[&str] = &[
    "experiment",
    "r",
    "var_list",
    "n_min",
    "n_max",
    "n_points",
    "n_spacing",
    "tau_points",
    "tau_max",
    "r_points",
    "r_max",
    "fidelity_target",
    "output_path",
    "seed",
    "sld_rank_tol",
    "samples",
];

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let r = match experiment {
            Experiment::Figure2 => vec![8.0, 400.0],
            Experiment::GhzScaling => vec![8.0, 40.0, 400.0],
            _ => vec![8.0],
        };
        let (n_min, n_max, n_points) = match experiment {
            Experiment::Figure2 => (1, 100_000, 61),
            _ => (1, 10_000, 41),
        };
        Self {
            experiment,
            r,
            var_list: vec![1.0, 0.75, 0.5, 0.25],
            n_min,
            n_max,
            n_points,
            n_spacing: Spacing::Log,
            tau_points: 600,
            tau_max: 3.0,
            r_points: 201,
            r_max: 10.0,
            fidelity_target: 0.01,
            output_path: None,
            seed: 0,
            sld_rank_tol: SLD_RANK_TOL,
            samples: 40,
        }
    }

    /// Parses a config file body. Blank lines and `#` comments are skipped.
    ///
    /// If `experiment` is given and the file names a different one, that is
    /// an error; if neither names one, that is an error too.
    pub fn parse(text: &str, experiment: Option<Experiment>) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let named = pairs
            .iter()
            .find(|(k, _)| k == "experiment")
            .map(|(_, v)| v.parse::<Experiment>())
            .transpose()?;
        let exp = match (experiment, named) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("config is for '{b}' but '{a}' was requested")))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(Error::Config("no experiment named".into())),
        };
        let mut cfg = Self::defaults(exp);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overrides one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => {
                let e: Experiment = value.parse()?;
                if e != self.experiment {
                    return Err(Error::Config(format!("cannot switch experiment to '{e}'")));
                }
            }
            "r" => self.r = parse_list(key, value)?,
            "var_list" => self.var_list = parse_list(key, value)?,
            "n_min" => self.n_min = parse_num(key, value)?,
            "n_max" => self.n_max = parse_num(key, value)?,
            "n_points" => self.n_points = parse_num(key, value)?,
            "n_spacing" => self.n_spacing = value.parse()?,
            "tau_points" => self.tau_points = parse_num(key, value)?,
            "tau_max" => self.tau_max = parse_num(key, value)?,
            "r_points" => self.r_points = parse_num(key, value)?,
            "r_max" => self.r_max = parse_num(key, value)?,
            "fidelity_target" => self.fidelity_target = parse_num(key, value)?,
            "output_path" => self.output_path = Some(PathBuf::from(value)),
            "seed" => self.seed = parse_num(key, value)?,
            "sld_rank_tol" => self.sld_rank_tol = parse_num(key, value)?,
            "samples" => self.samples = parse_num(key, value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.r.is_empty() || self.r.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return bad(format!("r must be a nonempty list of finite values >= 0, got {:?}", self.r));
        }
        if self.var_list.is_empty() || self.var_list.iter().any(|v| !(*v > 0.0 && *v <= 1.0)) {
            return bad(format!("var_list entries must lie in (0, 1], got {:?}", self.var_list));
        }
        if self.n_min == 0 || self.n_min > self.n_max || self.n_points == 0 {
            return bad(format!(
                "need 1 <= n_min <= n_max and n_points >= 1, got {}, {}, {}",
                self.n_min, self.n_max, self.n_points
            ));
        }
        if self.tau_points == 0 || !(self.tau_max > 0.0 && self.tau_max.is_finite()) {
            return bad("tau grid must be nonempty with a positive finite tau_max".into());
        }
        if self.r_points < 2 || !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return bad("r grid needs r_points >= 2 and a positive finite r_max".into());
        }
        if !(self.fidelity_target > 0.0 && self.fidelity_target <= 1.0) {
            return bad(format!("fidelity_target {} outside (0, 1]", self.fidelity_target));
        }
        if !(self.sld_rank_tol >= 0.0 && self.sld_rank_tol.is_finite()) {
            return bad(format!("sld_rank_tol {} must be finite and >= 0", self.sld_rank_tol));
        }
        if self.samples == 0 {
            return bad("samples must be >= 1".into());
        }
        Ok(())
    }

    /// Qubit numbers of the sweep, sorted and without repeats.
    pub fn n_grid(&self) -> Vec<usize> {
        let (a, b, k) = (self.n_min as f64, self.n_max as f64, self.n_points);
        let mut ns: Vec<usize> = (0..k)
            .map(|i| {
                let s = if k == 1 { 0.0 } else { i as f64 / (k - 1) as f64 };
                let x = match self.n_spacing {
                    Spacing::Linear => a + (b - a) * s,
                    Spacing::Log => (a.ln() + (b.ln() - a.ln()) * s).exp(),
                };
                (x.round() as usize).clamp(self.n_min, self.n_max)
            })
            .collect();
        ns.dedup();
        ns
    }

    /// `gamma tau` grid `tau_max * i / tau_points`, `i = 1..=tau_points`.
    pub fn tau_grid(&self) -> Vec<f64> {
        (1..=self.tau_points)
            .map(|i| self.tau_max * i as f64 / self.tau_points as f64)
            .collect()
    }

    /// `r` grid over `[0, r_max]`.
    pub fn r_grid(&self) -> Vec<f64> {
        (0..self.r_points)
            .map(|i| self.r_max * i as f64 / (self.r_points - 1) as f64)
            .collect()
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value '{value}' for '{key}'")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| parse_num(key, s.trim()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let text = "experiment = figure2\n# comment\nr = 8, 40 \nfidelity_target = 0.05\n\nn_max = 500 # trailing\n";
        let cfg = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!(cfg.experiment, Experiment::Figure2);
        assert_eq!(cfg.r, vec![8.0, 40.0]);
        assert_eq!(cfg.fidelity_target, 0.05);
        assert_eq!(cfg.n_max, 500);
        let cfg2 = ExperimentConfig::parse("seed = 3", Some(Experiment::Validate)).unwrap();
        assert_eq!(cfg2.seed, 3);
    }

    #[test]
    fn rejects_bad_input() {
        let e = |t: &str| ExperimentConfig::parse(t, Some(Experiment::Figure1)).unwrap_err();
        assert!(matches!(e("colour = red"), Error::Config(_)));
        assert!(matches!(e("fidelity_target = 0"), Error::Config(_)));
        assert!(matches!(e("fidelity_target = 1.5"), Error::Config(_)));
        assert!(matches!(e("n_min = 10\nn_max = 5"), Error::Config(_)));
        assert!(matches!(e("var_list ="), Error::Config(_)));
        assert!(matches!(e("experiment = figure2"), Error::Config(_)));
        assert!(matches!(e("no equals sign"), Error::Config(_)));
        assert!(ExperimentConfig::parse("", None).is_err());
    }

    #[test]
    fn grids() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Figure2);
        cfg.n_min = 1;
        cfg.n_max = 1000;
        cfg.n_points = 30;
        let ns = cfg.n_grid();
        assert_eq!(ns[0], 1);
        assert_eq!(*ns.last().unwrap(), 1000);
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
        cfg.n_spacing = Spacing::Linear;
        cfg.n_min = 4;
        cfg.n_max = 30;
        cfg.n_points = 27;
        assert_eq!(cfg.n_grid(), (4..=30).collect::<Vec<_>>());
        let taus = cfg.tau_grid();
        assert_eq!(taus.len(), 600);
        assert_eq!(*taus.last().unwrap(), 3.0);
        let rs = cfg.r_grid();
        assert_eq!((rs[0], rs[200]), (0.0, 10.0));
    }
}
