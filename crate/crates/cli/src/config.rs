//! Run configuration: defaults, then `JC_SUSY_TOL`, then a key=value file, then flags.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use jc_susy::fock::{FockTruncation, GridAxis};
use jc_susy::models::JCParams;

use crate::error::CliError;

pub const TOL_ENV: &str = "JC_SUSY_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Input(format!("unknown format '{other}' (csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub delta: f64,
    pub lambda: f64,
    pub n_max: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    /// Matrix residual tolerance.
    pub tol_residual: f64,
    /// Grid (Darboux) tolerance.
    pub tol_grid: f64,
    /// Analytic vs numeric eigenvalue tolerance.
    pub tol_spectrum: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GridAxis::default();
        Self {
            delta: 3.0,
            lambda: 1.25,
            n_max: 40,
            x_min: g.x_min(),
            x_max: g.x_max(),
            points: g.points(),
            tol_residual: 1e-10,
            tol_grid: 1e-5,
            tol_spectrum: 1e-9,
            format: Format::Csv,
            output: None,
        }
    }
}

/// Flag values; `None` leaves the lower layers in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub n_max: Option<usize>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub points: Option<usize>,
    pub tol_residual: Option<f64>,
    pub tol_grid: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

fn parse_num<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::Input(format!("{key}: cannot parse '{raw}'")))
}

fn positive_tol(key: &str, raw: &str) -> Result<f64, CliError> {
    let v: f64 = parse_num(key, raw)?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Input(format!("{key} must be a positive number, got '{raw}'")))
    }
}

impl RunConfig {
    /// Applies the environment tolerance if set.
    pub fn with_env(mut self, env_tol: Option<&str>) -> Result<Self, CliError> {
        if let Some(raw) = env_tol {
            self.tol_residual = positive_tol(TOL_ENV, raw)?;
        }
        Ok(self)
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn with_file_text(mut self, text: &str) -> Result<Self, CliError> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().to_ascii_lowercase().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "delta" => self.delta = parse_num(&key, value)?,
                "lambda" => self.lambda = parse_num(&key, value)?,
                "n_max" | "nmax" => self.n_max = parse_num(&key, value)?,
                "x_min" => self.x_min = parse_num(&key, value)?,
                "x_max" => self.x_max = parse_num(&key, value)?,
                "points" => self.points = parse_num(&key, value)?,
                "tol_residual" => self.tol_residual = positive_tol(&key, value)?,
                "tol_grid" => self.tol_grid = positive_tol(&key, value)?,
                "tol_spectrum" => self.tol_spectrum = positive_tol(&key, value)?,
                "format" => self.format = value.parse()?,
                "output" => self.output = Some(PathBuf::from(value)),
                _ => {
                    return Err(CliError::Input(format!(
                        "config line {}: unknown key '{key}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(self)
    }

    pub fn with_file(self, path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.with_file_text(&text)
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = o.$f.clone() { self.$f = v; } )* };
        }
        take!(
            delta,
            lambda,
            n_max,
            x_min,
            x_max,
            points,
            tol_residual,
            tol_grid,
            format
        );
        if o.output.is_some() {
            self.output = o.output.clone();
        }
        self
    }

    /// Full precedence chain: flags > config file > environment > defaults.
    pub fn resolve(file: Option<&Path>, env_tol: Option<&str>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default().with_env(env_tol)?;
        if let Some(p) = file {
            cfg = cfg.with_file(p)?;
        }
        let cfg = cfg.with_overrides(flags);
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        if !self.delta.is_finite() || !self.lambda.is_finite() {
            return Err(CliError::Input("delta and lambda must be finite".into()));
        }
        for (k, v) in [("tol_residual", self.tol_residual), ("tol_grid", self.tol_grid)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Input(format!("{k} must be positive")));
            }
        }
        self.truncation()?;
        self.grid()?;
        Ok(())
    }

    pub fn params(&self) -> JCParams {
        JCParams::new(self.delta, self.lambda)
    }

    pub fn truncation(&self) -> Result<FockTruncation, CliError> {
        Ok(FockTruncation::new(self.n_max)?)
    }

    pub fn grid(&self) -> Result<GridAxis, CliError> {
        Ok(GridAxis::new(self.x_min, self.x_max, self.points)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_contract() {
        let c = RunConfig::default();
        assert_eq!(c.n_max, 40);
        assert_eq!((c.x_min, c.x_max, c.points), (-6.0, 6.0, 2001));
        assert_eq!(c.tol_residual, 1e-10);
        assert_eq!(c.tol_grid, 1e-5);
    }

    #[test]
    fn precedence_chain() {
        let text = "# comment\ndelta = 2.5\ntol_residual = 1e-8\nn-max = 30\n";
        let base = RunConfig::default().with_env(Some("1e-7")).unwrap();
        assert_eq!(base.tol_residual, 1e-7);
        let file = base.with_file_text(text).unwrap();
        assert_eq!((file.delta, file.tol_residual, file.n_max), (2.5, 1e-8, 30));
        let flags = Overrides {
            delta: Some(4.0),
            ..Default::default()
        };
        let fin = file.with_overrides(&flags);
        assert_eq!((fin.delta, fin.tol_residual), (4.0, 1e-8));
    }

    #[test]
    fn bad_inputs() {
        assert!(RunConfig::default().with_env(Some("abc")).is_err());
        assert!(RunConfig::default().with_env(Some("-1")).is_err());
        assert!(RunConfig::default().with_file_text("bogus = 1").is_err());
        assert!(RunConfig::default().with_file_text("delta 3").is_err());
        assert!(RunConfig::default().with_file_text("format = xml").is_err());
        let flags = Overrides {
            n_max: Some(1),
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, None, &flags).is_err());
    }
}
