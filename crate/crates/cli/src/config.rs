//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use tbvp_core::funcmodel::{catalog, SmoothFunction};
use tbvp_core::problem::ProblemSpec;

#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSource {
    Catalog { name: String, params: Vec<f64> },
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
}

impl Norm {
    pub fn p(self) -> u32 {
        match self {
            Norm::L1 => 1,
            Norm::L2 => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub f0: FunctionSource,
    pub ft: FunctionSource,
    pub t: f64,
    pub k1: usize,
    pub k2: usize,
    pub n: usize,
    pub norm: Norm,
    pub eps_schedule: Vec<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub oracle_n: usize,
    pub oracle_max_iter: Option<usize>,
    /// Time levels of the verification lattice.
    pub n_t: usize,
}

const KEYS: &[&str] = &[
    "f0",
    "fT",
    "T",
    "K1",
    "K2",
    "n",
    "norm",
    "eps_schedule",
    "seed",
    "output_dir",
    "oracle_n",
    "oracle_max_iter",
    "n_t",
];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigError::new("--config", format!("cannot read {}: {e}", path.display()))
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses config text; relative sample-file paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::new(&format!("line {}", lineno + 1), "expected `key = value`")
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::new(key, "unknown key"));
            }
            if map
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(ConfigError::new(key, "given more than once"));
            }
        }
        let get = |key: &str| map.get(key).map(String::as_str);
        let required = |key: &str| get(key).ok_or_else(|| ConfigError::new(key, "missing"));

        let f0 = parse_source("f0", required("f0")?, base)?;
        let ft = parse_source("fT", required("fT")?, base)?;
        let t: f64 = parse_num("T", required("T")?)?;
        if !(t.is_finite() && t > 0.0) {
            return Err(ConfigError::new("T", format!("must be positive, got {t}")));
        }
        let k1: usize = parse_num("K1", required("K1")?)?;
        let k2: usize = parse_num("K2", required("K2")?)?;
        for (name, k) in [("K1", k1), ("K2", k2)] {
            if k < 1 {
                return Err(ConfigError::new(name, "must be at least 1"));
            }
        }
        let n: usize = parse_num("n", required("n")?)?;
        if n < 65 || n.is_multiple_of(2) {
            return Err(ConfigError::new(
                "n",
                format!("must be odd and at least 65, got {n}"),
            ));
        }
        let norm = match required("norm")? {
            "l1" | "L1" | "1" => Norm::L1,
            "l2" | "L2" | "2" => Norm::L2,
            other => {
                return Err(ConfigError::new(
                    "norm",
                    format!("expected l1 or l2, got `{other}`"),
                ))
            }
        };
        let eps_schedule = match get("eps_schedule") {
            Some(s) => parse_list("eps_schedule", s)?,
            None => vec![1e-1, 1e-2, 1e-3],
        };
        if eps_schedule.is_empty() || eps_schedule.iter().any(|&e| !(e.is_finite() && e > 0.0)) {
            return Err(ConfigError::new(
                "eps_schedule",
                "needs one or more positive numbers",
            ));
        }
        let seed = get("seed")
            .map(|s| parse_num("seed", s))
            .transpose()?
            .unwrap_or(0);
        let output_dir = PathBuf::from(get("output_dir").unwrap_or("out"));
        let oracle_n: usize = get("oracle_n")
            .map(|s| parse_num("oracle_n", s))
            .transpose()?
            .unwrap_or(tbvp_core::oracle::DEFAULT_ORACLE_N);
        if oracle_n < 5 || oracle_n.is_multiple_of(2) {
            return Err(ConfigError::new(
                "oracle_n",
                format!("must be odd and at least 5, got {oracle_n}"),
            ));
        }
        let oracle_max_iter = get("oracle_max_iter")
            .map(|s| parse_num("oracle_max_iter", s))
            .transpose()?;
        let n_t = get("n_t")
            .map(|s| parse_num("n_t", s))
            .transpose()?
            .unwrap_or(129);
        if n_t < 9 {
            return Err(ConfigError::new(
                "n_t",
                format!("must be at least 9, got {n_t}"),
            ));
        }
        Ok(Self {
            f0,
            ft,
            t,
            k1,
            k2,
            n,
            norm,
            eps_schedule,
            seed,
            output_dir,
            oracle_n,
            oracle_max_iter,
            n_t,
        })
    }

    pub fn problem(&self) -> Result<ProblemSpec, ConfigError> {
        let f0 = load_function("f0", &self.f0)?;
        let ft = load_function("fT", &self.ft)?;
        ProblemSpec::new(f0, ft, self.t, self.k1, self.k2)
            .map_err(|e| ConfigError::new("problem", e.to_string()))
    }
}

fn parse_num<T: std::str::FromStr>(field: &str, s: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    s.trim()
        .parse()
        .map_err(|e| ConfigError::new(field, format!("cannot parse `{s}`: {e}")))
}

fn parse_list(field: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|tok| !tok.is_empty())
        .map(|tok| parse_num(field, tok))
        .collect()
}

fn parse_source(field: &str, s: &str, base: &Path) -> Result<FunctionSource, ConfigError> {
    let mut words = s.split_whitespace();
    let name = words
        .next()
        .ok_or_else(|| ConfigError::new(field, "empty"))?;
    if name == "file" {
        let rest = s[s.find("file").unwrap() + 4..].trim();
        if rest.is_empty() {
            return Err(ConfigError::new(field, "`file` needs a path"));
        }
        return Ok(FunctionSource::File(base.join(rest)));
    }
    let params = words
        .map(|w| parse_num(field, w))
        .collect::<Result<Vec<f64>, _>>()?;
    // validate now so the error names the field
    catalog(name, &params).map_err(|e| ConfigError::new(field, e.to_string()))?;
    Ok(FunctionSource::Catalog {
        name: name.to_string(),
        params,
    })
}

fn load_function(field: &str, source: &FunctionSource) -> Result<SmoothFunction, ConfigError> {
    match source {
        FunctionSource::Catalog { name, params } => {
            catalog(name, params).map_err(|e| ConfigError::new(field, e.to_string()))
        }
        FunctionSource::File(path) => {
            let (xs, ys) =
                crate::io::read_two_columns(path).map_err(|e| ConfigError::new(field, e))?;
            SmoothFunction::spline(xs, ys).map_err(|e| ConfigError::new(field, e.to_string()))
        }
    }
}
