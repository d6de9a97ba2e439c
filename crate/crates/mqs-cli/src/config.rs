//! Sweep configuration: merged from an optional key=value file and command
//! line flags, flags winning.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

/// State family selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    CoherentMqs,
    CoherentPointer,
    Noon,
    QiopaEquatorial,
    QiopaHv,
    QiopaOfiltered,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "coherent_mqs" => Family::CoherentMqs,
            "coherent_pointer" => Family::CoherentPointer,
            "noon" => Family::Noon,
            "qiopa_equatorial" => Family::QiopaEquatorial,
            "qiopa_hv" => Family::QiopaHv,
            "qiopa_ofiltered" => Family::QiopaOfiltered,
            other => bail!(
                "unknown family '{other}'; expected one of coherent_mqs, coherent_pointer, \
                 noon, qiopa_equatorial, qiopa_hv, qiopa_ofiltered"
            ),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::CoherentMqs => "coherent_mqs",
            Family::CoherentPointer => "coherent_pointer",
            Family::Noon => "noon",
            Family::QiopaEquatorial => "qiopa_equatorial",
            Family::QiopaHv => "qiopa_hv",
            Family::QiopaOfiltered => "qiopa_ofiltered",
        }
    }

}

/// Raw option set prior to validation; every field optional so that the file
/// and the flags can each fill any subset.
#[derive(Debug, Default, Clone)]
pub struct RawSweepOptions {
    pub family: Option<String>,
    pub alpha: Option<f64>,
    pub phi: Option<f64>,
    pub gains: Option<String>,
    pub photons: Option<String>,
    pub thresholds: Option<String>,
    pub r_grid: Option<String>,
    pub n_max: Option<usize>,
    pub tail_tol: Option<f64>,
    pub output: Option<PathBuf>,
}

impl RawSweepOptions {
    /// Overlay `flags` on top of `self` (flags win).
    pub fn overridden_by(self, flags: RawSweepOptions) -> RawSweepOptions {
        RawSweepOptions {
            family: flags.family.or(self.family),
            alpha: flags.alpha.or(self.alpha),
            phi: flags.phi.or(self.phi),
            gains: flags.gains.or(self.gains),
            photons: flags.photons.or(self.photons),
            thresholds: flags.thresholds.or(self.thresholds),
            r_grid: flags.r_grid.or(self.r_grid),
            n_max: flags.n_max.or(self.n_max),
            tail_tol: flags.tail_tol.or(self.tail_tol),
            output: flags.output.or(self.output),
        }
    }
}

/// Parse a `key = value` config file. Lines starting with `#` and blank
/// lines are skipped.
pub fn read_config_file(path: &Path) -> Result<RawSweepOptions> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {} is not 'key = value': {line}", lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    let mut raw = RawSweepOptions::default();
    for (key, value) in map {
        match key.as_str() {
            "family" => raw.family = Some(value),
            "alpha" => raw.alpha = Some(value.parse().context("alpha")?),
            "phi" => raw.phi = Some(value.parse().context("phi")?),
            "g" => raw.gains = Some(value),
            "photons" => raw.photons = Some(value),
            "k" => raw.thresholds = Some(value),
            "r_grid" => raw.r_grid = Some(value),
            "n_max" => raw.n_max = Some(value.parse().context("n_max")?),
            "tail_tol" => raw.tail_tol = Some(value.parse().context("tail_tol")?),
            "output" => raw.output = Some(PathBuf::from(value)),
            other => bail!("unknown config key '{other}'"),
        }
    }
    Ok(raw)
}

/// Fully validated sweep configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub family: Family,
    pub alpha: f64,
    pub phi: f64,
    pub gains: Vec<f64>,
    pub photons: Vec<usize>,
    pub thresholds: Vec<usize>,
    pub r_grid: Vec<f64>,
    pub n_max: Option<usize>,
    pub tail_tol: f64,
    pub output: PathBuf,
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .with_context(|| format!("bad {what} entry '{tok}'"))
        })
        .collect()
}

fn parse_usize_list(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .with_context(|| format!("bad {what} entry '{tok}'"))
        })
        .collect()
}

/// Grid syntax: either a comma list (`0,0.1,0.2`) or `start:stop:count` for
/// `count` evenly spaced points including both endpoints.
pub fn parse_r_grid(s: &str) -> Result<Vec<f64>> {
    let grid: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("grid spec must be start:stop:count, got '{s}'");
        }
        let start: f64 = parts[0].trim().parse().context("grid start")?;
        let stop: f64 = parts[1].trim().parse().context("grid stop")?;
        let count: usize = parts[2].trim().parse().context("grid count")?;
        if count < 2 {
            bail!("grid needs at least 2 points");
        }
        (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect()
    } else {
        parse_f64_list(s, "r_grid")?
    };
    if grid.is_empty() {
        bail!("empty reflectivity grid");
    }
    for pair in grid.windows(2) {
        if pair[1] <= pair[0] {
            bail!("reflectivity grid must be strictly ascending");
        }
    }
    if grid.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
        bail!("reflectivities must lie in [0, 1]");
    }
    Ok(grid)
}

impl SweepConfig {
    /// Validate and apply the per-family defaults: alpha = 4 and phi = pi/2
    /// for the coherent families, g in {0.8, 1.1, 1.3} for the amplified
    /// families, k in {0, 4, 6, 8} at g = 0.8 for the filtered family,
    /// N = 4 photons for NOON, and a 21-point reflectivity grid.
    pub fn resolve(raw: RawSweepOptions) -> Result<Self> {
        let family = Family::parse(
            raw.family
                .as_deref()
                .ok_or_else(|| anyhow!("no family given (flag --family or config key)"))?,
        )?;
        let gains = match raw.gains {
            Some(s) => parse_f64_list(&s, "g")?,
            None => match family {
                Family::QiopaOfiltered => vec![0.8],
                _ => vec![0.8, 1.1, 1.3],
            },
        };
        if gains.iter().any(|&g| g <= 0.0) {
            bail!("gains must be positive");
        }
        let photons = match raw.photons {
            Some(s) => parse_usize_list(&s, "photons")?,
            None => vec![4],
        };
        if photons.iter().any(|&n| n == 0) {
            bail!("photon numbers must be positive");
        }
        let thresholds = match raw.thresholds {
            Some(s) => parse_usize_list(&s, "k")?,
            None => vec![0, 4, 6, 8],
        };
        let r_grid = match raw.r_grid {
            Some(s) => parse_r_grid(&s)?,
            None => parse_r_grid("0:1:21").expect("default grid"),
        };
        let tail_tol = raw.tail_tol.unwrap_or(1e-6);
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            bail!("tail_tol must lie in (0, 1)");
        }
        let alpha = raw.alpha.unwrap_or(4.0);
        let phi = raw
            .phi
            .unwrap_or(if family == Family::CoherentMqs || family == Family::CoherentPointer {
                std::f64::consts::FRAC_PI_2
            } else {
                0.0
            });
        Ok(SweepConfig {
            family,
            alpha,
            phi,
            gains,
            photons,
            thresholds,
            r_grid,
            n_max: raw.n_max,
            tail_tol,
            output: raw.output.unwrap_or_else(|| PathBuf::from("sweep.csv")),
        })
    }
}
