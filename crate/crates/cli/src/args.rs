use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "radlab", version, about = "Numerical laboratory for radial tensor projections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct Common {
    /// JSON file whose keys mirror this subcommand's long flags.
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Seed recorded in the report and used by randomized commands.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Also write the JSON report to this path.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Tolerance override NAME=VALUE; VALUE may not exceed 10× the default.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalue table of the self-adjoint radial operator.
    Eigs(EigsArgs),
    /// Deficit 1 − ‖ℙ(f⊗g)‖ and distance to the Gaussian pairs for a pair file.
    Deficit(PairArgs),
    /// Second-order sweep along a ψ direction.
    Sweep(SweepArgs),
    /// Limiting ratios over ψ_2..ψ_8.
    Probe(DimArgs),
    /// Random near-extremal scan.
    Scan(ScanArgs),
    /// Nearest Gaussian pair for a pair file.
    Fit(PairArgs),
    /// Radial-set inequality scans and σ_r validation.
    Sets(SetsArgs),
    /// Fourier invariance of the projection norm.
    FourierCheck(FourierArgs),
    /// Lorentz-space ratio scans.
    Lorentz(LorentzArgs),
    /// All acceptance criteria.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args, serde::Serialize)]
pub struct EigsArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    #[arg(long, default_value_t = 8)]
    pub max_m: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct PairArgs {
    /// JSON pair descriptor {"f": {...}, "g": {...}}.
    #[arg(long, value_name = "PATH")]
    pub pair: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    /// Direction psi:M.
    #[arg(long, default_value = "psi:2")]
    pub direction: String,
    #[arg(long, conflicts_with = "antisym")]
    pub sym: bool,
    #[arg(long)]
    pub antisym: bool,
    /// START:END:COUNT or a comma-separated list.
    #[arg(long, default_value = "0.02:0.1:5")]
    pub eps: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct DimArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    #[arg(short = 'n', long = "count", default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub amp: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct SetsArgs {
    /// Dimensions to scan, comma separated.
    #[arg(long, default_value = "1,2,3", value_delimiter = ',')]
    pub dims: Vec<u32>,
    /// Exponents of the Λ factor in the combined bound, comma separated.
    #[arg(long, default_value = "0.05,0.1,0.25,0.5", value_delimiter = ',')]
    pub gamma: Vec<f64>,
    /// Monte-Carlo points per σ_r configuration; 0 skips the validation.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct FourierArgs {
    /// Random pairs added to the documented examples.
    #[arg(short = 'n', long = "count", default_value_t = 20)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct LorentzArgs {
    /// gauss or indicator.
    #[arg(long, default_value = "gauss")]
    pub family: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct SelftestArgs {
    /// Run only these criteria (comma separated ids).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
    #[command(flatten)]
    pub common: Common,
}

/// Error raised while merging a config file into argv.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config {0}: {1}")]
    Invalid(String, String),
}

/// Splices `--config PATH` into argv: each key becomes `--key value` unless
/// the flag already appears on the command line, which wins.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let strs: Vec<String> = argv.iter().map(|s| s.to_string_lossy().into_owned()).collect();
    let Some(pos) = strs
        .iter()
        .position(|s| s == "--config" || s.starts_with("--config="))
    else {
        return Ok(argv);
    };
    let path = match strs[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => match strs.get(pos + 1) {
            Some(p) => p.clone(),
            // leave the missing value for clap to report
            None => return Ok(argv),
        },
    };
    let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
        path: path.clone(),
        source,
    })?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| ConfigError::Invalid(path.clone(), e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| ConfigError::Invalid(path.clone(), "top level must be an object".into()))?;
    let present = |flag: &str| {
        strs.iter()
            .any(|s| s == flag || s.starts_with(&format!("{flag}=")))
    };
    let mut extra: Vec<String> = Vec::new();
    for (key, v) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" || present(&flag) {
            continue;
        }
        match v {
            serde_json::Value::Bool(true) => extra.push(flag),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::Array(items) => match flag.as_str() {
                "--tol" => {
                    for item in items {
                        extra.push(flag.clone());
                        extra.push(scalar(item, &path, key)?);
                    }
                }
                _ => {
                    let parts = items
                        .iter()
                        .map(|i| scalar(i, &path, key))
                        .collect::<Result<Vec<_>, _>>()?;
                    extra.push(flag);
                    extra.push(parts.join(","));
                }
            },
            serde_json::Value::Object(map) if flag == "--tol" => {
                for (name, tol) in map {
                    extra.push(flag.clone());
                    extra.push(format!("{name}={}", scalar(tol, &path, key)?));
                }
            }
            other => {
                extra.push(flag);
                extra.push(scalar(other, &path, key)?);
            }
        }
    }
    let mut out = argv;
    out.extend(extra.into_iter().map(OsString::from));
    Ok(out)
}

fn scalar(v: &serde_json::Value, path: &str, key: &str) -> Result<String, ConfigError> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::Bool(b) => Ok(b.to_string()),
        _ => Err(ConfigError::Invalid(
            path.into(),
            format!("key {key:?} must be a scalar"),
        )),
    }
}

/// Parses `START:END:COUNT` (inclusive, evenly spaced) or `a,b,c`.
pub fn parse_eps(spec: &str) -> Result<Vec<f64>, String> {
    let bad = || format!("cannot parse ε grid {spec:?}");
    if let [a, b, n] = spec.split(':').collect::<Vec<_>>()[..] {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if n < 2 {
            return Err(format!("ε grid needs at least 2 points, got {n}"));
        }
        return Ok((0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_grid() {
        let g = parse_eps("0.02:0.1:5").unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[4] - 0.1).abs() < 1e-15 && (g[1] - 0.04).abs() < 1e-15);
        assert_eq!(parse_eps("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        assert!(parse_eps("x:1:2").is_err());
        assert!(parse_eps("0:1:1").is_err());
    }
}
