//! Run configuration: a TOML document with `[params]`, `[initial]`, `[run]`
//! and `[ensemble]` tables.
//!
//! ```toml
//! [params]
//! beta = 0.1
//! mu = 0.2
//! gamma = 0.3
//! k_r = 2.0
//! r = 0.5
//! epsilon = 0.0
//! ```
//!
//! Only `[params]` is required. Unknown keys produce warnings, missing
//! required keys and wrongly typed values are parse errors.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use seirs::deterministic::{delay_steps, step_count};
use seirs::{default_step, InitialCondition64, Params64};
use toml::{Table, Value};

use crate::error::CliError;

pub const DEFAULT_HORIZON: f64 = 100.0;
pub const DEFAULT_N_REP: usize = 200;
pub const DEFAULT_QUAD_N: usize = 64;

/// Integrator used by `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// RK4 when `r = 0`, Adams–Bashforth–Moulton otherwise.
    #[default]
    Auto,
    Euler,
    Cascade,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Euler => "euler",
            Method::Cascade => "cascade",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Method::Auto),
            "euler" => Ok(Method::Euler),
            "cascade" => Ok(Method::Cascade),
            other => Err(format!("unknown method {other:?} (expected auto, euler or cascade)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub n_rep: usize,
    pub seed: u64,
    pub rho: Vec<f64>,
    /// Second noise level for the transfer check; `2ε` when absent.
    pub epsilon2: Option<f64>,
    /// Replica index used by `simulate-sde`.
    pub replica: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_rep: DEFAULT_N_REP,
            seed: 0,
            rho: Vec::new(),
            epsilon2: None,
            replica: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: Params64,
    pub initial: InitialCondition64,
    pub horizon: f64,
    pub step: f64,
    pub method: Method,
    pub quad_n: usize,
    pub trajectory: Option<PathBuf>,
    pub ensemble: EnsembleConfig,
}

/// A parsed configuration together with the warnings raised while reading it.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

/// Reads the keys of one table and remembers which ones were used.
struct Reader<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    used: BTreeSet<&'static str>,
}

impl<'a> Reader<'a> {
    fn new(root: &'a Table, name: &'static str) -> Result<Self, CliError> {
        let table = match root.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(other) => {
                return Err(CliError::Parse(format!(
                    "{name} must be a table, found {}",
                    other.type_str()
                )));
            }
        };
        Ok(Self {
            name,
            table,
            used: BTreeSet::new(),
        })
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a Value> {
        self.used.insert(key);
        self.table.and_then(|t| t.get(key))
    }

    fn wrong_type(&self, key: &str, expected: &str, found: &Value) -> CliError {
        CliError::Parse(format!(
            "{}.{key} must be {expected}, found {}",
            self.name,
            found.type_str()
        ))
    }

    fn float(&mut self, key: &'static str) -> Result<Option<f64>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(self.wrong_type(key, "a number", other)),
        }
    }

    fn required_float(&mut self, key: &'static str) -> Result<f64, CliError> {
        self.float(key)?
            .ok_or_else(|| CliError::Parse(format!("missing required key {}.{key}", self.name)))
    }

    fn unsigned(&mut self, key: &'static str) -> Result<Option<u64>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
            Some(Value::String(s)) => s
                .parse::<u64>()
                .map(Some)
                .map_err(|_| CliError::Parse(format!("{}.{key} = {s:?} is not an unsigned integer", self.name))),
            Some(other) => Err(self.wrong_type(key, "a nonnegative integer", other)),
        }
    }

    fn string(&mut self, key: &'static str) -> Result<Option<String>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(self.wrong_type(key, "a string", other)),
        }
    }

    fn floats(&mut self, key: &'static str) -> Result<Option<Vec<f64>>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Float(x) => Ok(*x),
                    Value::Integer(x) => Ok(*x as f64),
                    other => Err(self.wrong_type(key, "an array of numbers", other)),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(other) => Err(self.wrong_type(key, "an array of numbers", other)),
        }
    }

    fn unknown_keys(&self, warnings: &mut Vec<String>) {
        if let Some(t) = self.table {
            for key in t.keys() {
                if !self.used.contains(key.as_str()) {
                    warnings.push(format!("unknown key {}.{key}", self.name));
                }
            }
        }
    }
}

const SECTIONS: [&str; 4] = ["params", "initial", "run", "ensemble"];

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<Parsed, CliError> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
    let mut warnings = Vec::new();
    for key in root.keys() {
        if !SECTIONS.contains(&key.as_str()) {
            warnings.push(format!("unknown key {key}"));
        }
    }

    let mut params = Reader::new(&root, "params")?;
    if params.table.is_none() {
        return Err(CliError::Parse("missing required table [params]".into()));
    }
    let p = Params64::new(
        params.required_float("beta")?,
        params.required_float("mu")?,
        params.required_float("gamma")?,
        params.required_float("k_r")?,
        params.required_float("r")?,
        params.required_float("epsilon")?,
    );
    params.unknown_keys(&mut warnings);

    let mut initial = Reader::new(&root, "initial")?;
    let s0 = initial.float("s0")?.unwrap_or(0.9);
    let e0 = initial.float("e0")?.unwrap_or(0.05);
    let i0 = initial.float("i0")?.unwrap_or(0.05);
    let r0 = initial.float("r0")?.unwrap_or(0.0);
    initial.unknown_keys(&mut warnings);

    let mut run = Reader::new(&root, "run")?;
    let horizon = run.float("horizon")?.unwrap_or(DEFAULT_HORIZON);
    let step = run.float("step")?;
    let method = match run.string("method")? {
        Some(m) => m.parse().map_err(CliError::Parse)?,
        None => Method::default(),
    };
    let quad_n = run.unsigned("quad_n")?.map_or(DEFAULT_QUAD_N, |n| n as usize);
    let trajectory = run.string("trajectory")?.map(PathBuf::from);
    run.unknown_keys(&mut warnings);

    let mut ens = Reader::new(&root, "ensemble")?;
    let defaults = EnsembleConfig::default();
    let ensemble = EnsembleConfig {
        n_rep: ens.unsigned("n_rep")?.map_or(defaults.n_rep, |n| n as usize),
        seed: ens.unsigned("seed")?.unwrap_or(defaults.seed),
        rho: ens.floats("rho")?.unwrap_or_default(),
        epsilon2: ens.float("epsilon2")?,
        replica: ens.unsigned("replica")?.unwrap_or(defaults.replica),
    };
    ens.unknown_keys(&mut warnings);

    let initial = InitialCondition64::new(e0, s0, i0, r0)?;
    let config = RunConfig {
        step: step.unwrap_or_else(|| default_step(p.r)),
        params: p,
        initial,
        horizon,
        method,
        quad_n,
        trajectory,
        ensemble,
    };
    config.validate()?;
    Ok(Parsed { config, warnings })
}

impl RunConfig {
    /// Parameter validity plus the grid divisibility conditions.
    pub fn validate(&self) -> Result<(), CliError> {
        let report = self.params.validate();
        if !report.valid {
            return Err(CliError::Validation(report.to_string()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(CliError::Validation(format!(
                "run.horizon = {} must be positive",
                self.horizon
            )));
        }
        if self.method == Method::Cascade {
            if self.params.r > 0.0 {
                step_count(self.horizon, self.params.r / self.quad_n as f64)?;
            }
        } else {
            step_count(self.horizon, self.step)?;
            if self.params.r > 0.0 {
                delay_steps(self.params.r, self.step)?;
            }
        }
        if let Some(e2) = self.ensemble.epsilon2 {
            if !(e2 >= 0.0 && e2.is_finite()) {
                return Err(CliError::Validation(format!("ensemble.epsilon2 = {e2} must be ≥ 0")));
            }
        }
        Ok(())
    }

    /// Writes the configuration back as a document that parses to an equal
    /// value.
    pub fn to_toml(&self) -> String {
        let p = &self.params;
        let mut params = Table::new();
        for (k, v) in [
            ("beta", p.beta),
            ("mu", p.mu),
            ("gamma", p.gamma),
            ("k_r", p.k_r),
            ("r", p.r),
            ("epsilon", p.epsilon),
        ] {
            params.insert(k.into(), Value::Float(v));
        }
        let ic = &self.initial;
        let mut initial = Table::new();
        for (k, v) in [("s0", ic.s0), ("e0", ic.e0), ("i0", ic.i0), ("r0", ic.r0)] {
            initial.insert(k.into(), Value::Float(v));
        }
        let mut run = Table::new();
        run.insert("horizon".into(), Value::Float(self.horizon));
        run.insert("step".into(), Value::Float(self.step));
        run.insert("method".into(), Value::String(self.method.to_string()));
        run.insert("quad_n".into(), unsigned_value(self.quad_n as u64));
        if let Some(path) = &self.trajectory {
            run.insert("trajectory".into(), Value::String(path.display().to_string()));
        }
        let e = &self.ensemble;
        let mut ensemble = Table::new();
        ensemble.insert("n_rep".into(), unsigned_value(e.n_rep as u64));
        ensemble.insert("seed".into(), unsigned_value(e.seed));
        ensemble.insert(
            "rho".into(),
            Value::Array(e.rho.iter().map(|v| Value::Float(*v)).collect()),
        );
        if let Some(e2) = e.epsilon2 {
            ensemble.insert("epsilon2".into(), Value::Float(e2));
        }
        ensemble.insert("replica".into(), unsigned_value(e.replica));

        let mut root = Table::new();
        root.insert("params".into(), Value::Table(params));
        root.insert("initial".into(), Value::Table(initial));
        root.insert("run".into(), Value::Table(run));
        root.insert("ensemble".into(), Value::Table(ensemble));
        toml::to_string(&root).expect("plain tables serialize")
    }
}

/// TOML integers are signed 64-bit; larger values are written as strings.
fn unsigned_value(v: u64) -> Value {
    i64::try_from(v).map_or_else(|_| Value::String(v.to_string()), Value::Integer)
}
