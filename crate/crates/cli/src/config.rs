//! Run configuration: defaults, a plain key-value config file, and flag
//! overrides, validated before any command runs.

use std::fmt;
use std::fs;
use std::path::Path;

use hahnlog_core::{rat, OrderTypeSpec, Rational, Universe, STAGE_DEPTH_CAP};

/// Residue handling selected for a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModeChoice {
    Monic,
    Interval,
}

impl fmt::Display for ModeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeChoice::Monic => write!(f, "monic"),
            ModeChoice::Interval => write!(f, "interval"),
        }
    }
}

/// Everything a command needs to run reproducibly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub tau: Vec<String>,
    pub depth: usize,
    pub taylor_order: u32,
    pub window: (i64, i64),
    pub samples: usize,
    pub seed: u64,
    pub mode: ModeChoice,
    pub interval_width: Rational,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tau: vec!["t0".into(), "t1".into(), "t2".into()],
            depth: 2,
            taylor_order: 3,
            window: (-3, 3),
            samples: 100,
            seed: 0,
            mode: ModeChoice::Monic,
            interval_width: rat(1, 1000),
        }
    }
}

impl RunConfig {
    /// Applies one `key = value` assignment; config files and flags share
    /// this path so overrides behave identically.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "tau" => {
                self.tau = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
            }
            "depth" => self.depth = parse_num(key, value)?,
            "order" => self.taylor_order = parse_num(key, value)?,
            "samples" => self.samples = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "mode" => {
                self.mode = match value {
                    "monic" => ModeChoice::Monic,
                    "interval" => ModeChoice::Interval,
                    other => return Err(format!("unknown mode {other:?} (monic or interval)")),
                };
            }
            "window" => {
                let (lo, hi) = value
                    .split_once("..")
                    .ok_or_else(|| format!("window {value:?} is not of the form lo..hi"))?;
                self.window = (parse_num("window low", lo)?, parse_num("window high", hi)?);
            }
            "width" => {
                let (n, d) = match value.split_once('/') {
                    Some((n, d)) => (parse_num("width numerator", n)?, parse_num("width denominator", d)?),
                    None => (parse_num("width", value)?, 1),
                };
                self.interval_width = rat(n, d);
            }
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    /// Reads a config file of `key = value` lines; `#` starts a comment.
    pub fn load_file(&mut self, path: &Path) -> Result<(), String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        for (ix, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), ix + 1))?;
            self.set(key.trim(), value)
                .map_err(|e| format!("{}:{}: {e}", path.display(), ix + 1))?;
        }
        Ok(())
    }

    /// Checks the invariants and builds the label universe.
    pub fn universe(&self) -> Result<Universe, String> {
        if self.tau.is_empty() {
            return Err("tau must name at least one label".into());
        }
        if self.taylor_order < 1 {
            return Err("order must be at least 1".into());
        }
        if self.samples < 1 {
            return Err("samples must be at least 1".into());
        }
        if self.depth > STAGE_DEPTH_CAP {
            return Err(format!("depth {} exceeds the tower cap {}", self.depth, STAGE_DEPTH_CAP));
        }
        if self.window.0 > self.window.1 {
            return Err(format!("window {}..{} is empty", self.window.0, self.window.1));
        }
        if self.interval_width <= rat(0, 1) {
            return Err("width must be positive".into());
        }
        OrderTypeSpec::new(self.tau.clone())
            .map(|spec| spec.into_universe())
            .map_err(|e| format!("invalid tau: {e}"))
    }

    pub fn window_range(&self) -> std::ops::RangeInclusive<i64> {
        self.window.0..=self.window.1
    }

    /// The configuration echoed as stable key-value lines for reports.
    pub fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("tau".into(), self.tau.join(",")),
            ("depth".into(), self.depth.to_string()),
            ("order".into(), self.taylor_order.to_string()),
            ("window".into(), format!("{}..{}", self.window.0, self.window.1)),
            ("samples".into(), self.samples.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("mode".into(), self.mode.to_string()),
            ("width".into(), self.interval_width.to_string()),
        ]
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("{key} value {value:?} is not a valid number"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply_and_validate() {
        let mut c = RunConfig::default();
        c.set("tau", "a, b").unwrap();
        c.set("depth", "1").unwrap();
        c.set("window", "-2..2").unwrap();
        c.set("width", "1/64").unwrap();
        c.set("mode", "interval").unwrap();
        assert_eq!(c.tau, vec!["a", "b"]);
        assert_eq!(c.window, (-2, 2));
        assert_eq!(c.interval_width, rat(1, 64));
        assert!(c.universe().is_ok());

        assert!(c.set("mode", "loose").is_err());
        assert!(c.set("window", "3").is_err());
        assert!(c.set("nope", "1").is_err());

        c.set("tau", "").unwrap();
        assert!(c.universe().is_err());
    }

    #[test]
    fn depth_and_counts_are_bounded() {
        let mut c = RunConfig::default();
        c.set("depth", "4").unwrap();
        assert!(c.universe().unwrap_err().contains("cap"));

        let mut c = RunConfig::default();
        c.set("samples", "0").unwrap();
        assert!(c.universe().is_err());

        let mut c = RunConfig::default();
        c.set("order", "0").unwrap();
        assert!(c.universe().is_err());
    }

    #[test]
    fn config_files_read_like_flag_sets() {
        let dir = std::env::temp_dir().join("hahnlog-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "# defaults for small runs\ntau = x,y\nseed = 7\n").unwrap();
        let mut c = RunConfig::default();
        c.load_file(&path).unwrap();
        assert_eq!(c.tau, vec!["x", "y"]);
        assert_eq!(c.seed, 7);

        std::fs::write(&path, "tau x,y\n").unwrap();
        assert!(RunConfig::default().load_file(&path).is_err());
    }
}
