//! Typed run configuration: per-subcommand key schemas, `key = value` files
//! and command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Real,
    Int,
    Bool,
    RealList,
    IntList,
    /// One of a fixed set of words.
    Choice(&'static [&'static str]),
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Real => write!(f, "real"),
            Kind::Int => write!(f, "integer"),
            Kind::Bool => write!(f, "true|false"),
            Kind::RealList => write!(f, "comma-separated reals"),
            Kind::IntList => write!(f, "comma-separated integers"),
            Kind::Choice(c) => write!(f, "{}", c.join("|")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(u64),
    Real(f64),
    IntList(Vec<u64>),
    RealList(Vec<f64>),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(x) => write!(f, "{x:?}"),
            Value::IntList(v) => write!(f, "{}", join(v.iter().map(|x| x.to_string()).collect())),
            Value::RealList(v) => write!(f, "{}", join(v.iter().map(|x| format!("{x:?}")).collect())),
            Value::Text(s) => write!(f, "{s}"),
        }
    }
}

fn parse_real(key: &str, s: &str) -> LabResult<f64> {
    let x: f64 = s.trim().parse().map_err(|_| LabError::usage(format!("key `{key}`: `{s}` is not a real number")))?;
    if !x.is_finite() {
        return Err(LabError::usage(format!("key `{key}`: `{s}` is not finite")));
    }
    Ok(x)
}

fn parse_int(key: &str, s: &str) -> LabResult<u64> {
    let t = s.trim();
    t.parse::<u64>()
        .ok()
        .or_else(|| {
            // accept 1e5-style integers
            t.parse::<f64>().ok().filter(|x| x.fract() == 0.0 && *x >= 0.0 && *x < 2f64.powi(53)).map(|x| x as u64)
        })
        .ok_or_else(|| LabError::usage(format!("key `{key}`: `{s}` is not a non-negative integer")))
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

impl Kind {
    pub fn parse(&self, key: &str, s: &str) -> LabResult<Value> {
        Ok(match self {
            Kind::Real => Value::Real(parse_real(key, s)?),
            Kind::Int => Value::Int(parse_int(key, s)?),
            Kind::Bool => match s.trim() {
                "true" => Value::Bool(true),
                "false" => Value::Bool(false),
                _ => return Err(LabError::usage(format!("key `{key}`: expected true or false, got `{s}`"))),
            },
            Kind::RealList => Value::RealList(split_list(s).map(|t| parse_real(key, t)).collect::<LabResult<_>>()?),
            Kind::IntList => Value::IntList(split_list(s).map(|t| parse_int(key, t)).collect::<LabResult<_>>()?),
            Kind::Choice(choices) => {
                let t = s.trim();
                if !choices.contains(&t) {
                    return Err(LabError::usage(format!("key `{key}`: expected one of {}, got `{s}`", choices.join("|"))));
                }
                Value::Text(t.to_string())
            }
        })
    }
}

/// One configuration key of a subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    /// `None` marks a required key.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn req(key: &'static str, kind: Kind, help: &'static str) -> Param {
    Param { key, kind, default: None, help }
}

const fn opt(key: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Param {
    Param { key, kind, default: Some(default), help }
}

pub const METHODS: &[&str] = &["tilted-mc", "cf-inversion"];
pub const CORRUPTIONS: &[&str] = &["none", "phi-a", "phi"];

pub struct Subcommand {
    pub name: &'static str,
    pub about: &'static str,
    pub params: &'static [Param],
}

pub const SUBCOMMANDS: &[Subcommand] = &[
    Subcommand {
        name: "rates",
        about: "Contraction rate r_n and the explicit concentration-bound rate",
        params: &[
            req("alpha", Kind::Real, "prior regularity"),
            req("beta", Kind::Real, "truth regularity"),
            req("n", Kind::IntList, "sample sizes"),
        ],
    },
    Subcommand {
        name: "concentration",
        about: "Concentration profile of a series prior at a coefficient truth",
        params: &[
            req("alpha", Kind::Real, "prior regularity"),
            req("f0", Kind::RealList, "truth coefficients f_1, f_2, ..."),
            opt("k", Kind::Int, "200", "prior truncation"),
            opt("epsilons", Kind::RealList, "0.5,0.4,0.3,0.2,0.1", "ball radii"),
            opt("method", Kind::Choice(METHODS), "tilted-mc", "small-ball method"),
            opt("samples", Kind::Int, "100000", "Monte Carlo draws per radius"),
        ],
    },
    Subcommand {
        name: "small-ball",
        about: "Centered small-ball exponents of a series prior",
        params: &[
            req("alpha", Kind::Real, "prior regularity"),
            opt("k", Kind::Int, "200", "prior truncation"),
            opt("epsilons", Kind::RealList, "0.3,0.2,0.1,0.05", "ball radii"),
            opt("method", Kind::Choice(METHODS), "tilted-mc", "small-ball method"),
            opt("samples", Kind::Int, "1000000", "Monte Carlo draws per radius"),
        ],
    },
    Subcommand {
        name: "sandwich",
        about: "Decentered small-ball probability against phi(eps) and phi(eps/2)",
        params: &[
            req("alpha", Kind::Real, "prior regularity"),
            req("f0", Kind::RealList, "truth coefficients"),
            opt("k", Kind::Int, "200", "prior truncation"),
            opt("epsilons", Kind::RealList, "0.5,0.3", "ball radii"),
            opt("samples", Kind::Int, "1000000", "Monte Carlo draws per estimate"),
            opt("corruption", Kind::Choice(CORRUPTIONS), "none", "negative control"),
            opt("corruption_factor", Kind::Real, "2", "multiplier for the corrupted term"),
        ],
    },
    Subcommand {
        name: "ring",
        about: "Posterior mass of outer and inner balls in the white-noise model",
        params: &[
            req("alpha", Kind::Real, "prior regularity"),
            req("beta", Kind::Real, "truth regularity"),
            req("f0_power", Kind::Real, "truth coefficients k^-p"),
            opt("f0_terms", Kind::Int, "1000", "number of nonzero truth coefficients"),
            opt("ns", Kind::IntList, "1000,10000,100000", "sample sizes"),
            opt("outer", Kind::Real, "3", "outer radius multiplier"),
            opt("inner", Kind::Real, "0.05", "inner radius multiplier"),
            opt("inner_log_power", Kind::Real, "0", "inner radius divided by log^p n"),
            opt("replicates", Kind::Int, "200", "data replicates per n"),
            opt("k", Kind::Int, "0", "posterior truncation (0 selects the default rule)"),
            opt("method", Kind::Choice(METHODS), "cf-inversion", "ball mass method"),
            opt("samples", Kind::Int, "100000", "Monte Carlo draws per mass"),
        ],
    },
    Subcommand {
        name: "remark2",
        about: "Inner posterior mass for a single-coefficient truth moving with n",
        params: &[
            req("alpha", Kind::Real, "prior regularity"),
            req("beta", Kind::Real, "truth regularity (below alpha)"),
            opt("ns", Kind::IntList, "1000,10000,100000", "sample sizes"),
            opt("big_m", Kind::Real, "2", "radius is rate / M"),
            opt("radius", Kind::Real, "1", "Sobolev radius of the truth"),
            opt("replicates", Kind::Int, "50", "data replicates per n"),
            opt("method", Kind::Choice(METHODS), "cf-inversion", "ball mass method"),
            opt("samples", Kind::Int, "100000", "Monte Carlo draws per mass"),
        ],
    },
    Subcommand {
        name: "shift-bound",
        about: "Concentration function under constant shifts of the center",
        params: &[
            req("alpha", Kind::Real, "prior regularity"),
            opt("dim", Kind::Int, "64", "grid size of the surrogate"),
            opt("rhos", Kind::RealList, "-2,-1,1,2", "shifts"),
            opt("epsilon", Kind::Real, "0.5", "sup-norm radius"),
            opt("samples", Kind::Int, "200000", "Monte Carlo draws"),
        ],
    },
    Subcommand {
        name: "lemma5-audit",
        about: "Hellinger, KL and V2 between exponential-link densities against the sup distance",
        params: &[
            opt("pairs", Kind::Int, "1000", "random pairs"),
            opt("grid", Kind::Int, "101", "grid size"),
            opt("scale", Kind::Real, "2", "amplitude of the random log densities"),
        ],
    },
    Subcommand {
        name: "frac-check",
        about: "Fractional integral identities, smoothing bounds and the explicit concentration bound",
        params: &[
            opt("alphas", Kind::RealList, "0.3,0.5,1.2", "integration orders"),
            opt("grid", Kind::Int, "2001", "grid size"),
            opt("delta", Kind::Real, "0.5", "Hölder exponent of the test function"),
            opt("lambda", Kind::Real, "0.5", "extra order in the sup-norm bound"),
            opt("sigmas", Kind::RealList, "0.2,0.1,0.05", "kernel dilations"),
            opt("functions", Kind::Int, "5", "random Hölder test functions"),
            opt("epsilon", Kind::Real, "0.1", "radius for the concentration bound"),
        ],
    },
    Subcommand {
        name: "density",
        about: "Posterior contraction for densities under an RL-type prior",
        params: &[
            opt("alpha", Kind::Real, "1", "prior regularity"),
            opt("beta", Kind::Real, "1", "declared Hölder regularity of w0"),
            opt("amplitude", Kind::Real, "1", "w0(t) = amplitude sin(2 pi t)"),
            opt("grid", Kind::Int, "101", "grid size"),
            opt("ns", Kind::IntList, "250,1000,4000", "sample sizes"),
            opt("replicates", Kind::Int, "20", "chains per n"),
            opt("steps", Kind::Int, "20000", "pCN steps per chain"),
            opt("burn_in", Kind::Real, "0.2", "burn-in fraction"),
            opt("thin", Kind::Int, "10", "thinning"),
            opt("initial_step", Kind::Real, "0.2", "initial pCN step"),
            opt("big_m", Kind::Real, "1", "Hellinger radius multiplier"),
            opt("c1", Kind::Real, "1", "sup radius multiplier"),
            opt("c2", Kind::Real, "1", "multiplier inside the inverse profile"),
            opt("tail_c", Kind::Real, "1", "constant in the sup-tail event"),
        ],
    },
    Subcommand {
        name: "remark3",
        about: "Sup-norm exceedance mass under Brownian motion released at zero",
        params: &[
            opt("amplitude", Kind::Real, "1", "w0(t) = amplitude sin(2 pi t)"),
            opt("grid", Kind::Int, "101", "grid size"),
            opt("ns", Kind::IntList, "250,1000,4000", "sample sizes"),
            opt("m_values", Kind::RealList, "0.05,0.1,0.2,0.5,1", "threshold constants m"),
            opt("replicates", Kind::Int, "20", "chains per n"),
            opt("steps", Kind::Int, "20000", "pCN steps per chain"),
            opt("burn_in", Kind::Real, "0.2", "burn-in fraction"),
            opt("thin", Kind::Int, "10", "thinning"),
            opt("initial_step", Kind::Real, "0.2", "initial pCN step"),
        ],
    },
    Subcommand {
        name: "lemma1-ratio",
        about: "Prior mass of a small norm ball relative to a KL neighborhood",
        params: &[
            req("alpha", Kind::Real, "prior regularity"),
            req("f0", Kind::RealList, "truth coefficients"),
            req("zeta", Kind::Real, "norm-ball radius"),
            req("alpha_n", Kind::Real, "KL neighborhood radius"),
            req("n", Kind::Real, "sample size"),
            opt("k", Kind::Int, "200", "prior truncation"),
            opt("method", Kind::Choice(METHODS), "cf-inversion", "ball mass method"),
            opt("samples", Kind::Int, "100000", "Monte Carlo draws per mass"),
        ],
    },
];

pub fn subcommand(name: &str) -> LabResult<&'static Subcommand> {
    SUBCOMMANDS
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| LabError::usage(format!("unknown subcommand `{name}`")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A schema-checked run request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub workers: Option<usize>,
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> LabResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| LabError::usage(format!("config line {}: expected key = value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> LabResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_config_text(&text)
}

impl RunConfig {
    /// Validates raw `key = value` pairs (later pairs override earlier ones)
    /// against the schema and fills defaults.
    pub fn build(
        name: &str,
        raw: &[(String, String)],
        seed: u64,
        out: PathBuf,
        format: Format,
        workers: Option<usize>,
    ) -> LabResult<Self> {
        let sub = subcommand(name)?;
        let mut given: BTreeMap<&str, &str> = BTreeMap::new();
        for (k, v) in raw {
            let p = sub
                .params
                .iter()
                .find(|p| p.key == k)
                .ok_or_else(|| LabError::usage(format!("unknown key `{k}` for subcommand `{name}`")))?;
            given.insert(p.key, v);
        }
        let mut params = BTreeMap::new();
        let mut missing = Vec::new();
        for p in sub.params {
            match given.get(p.key).copied().or(p.default) {
                Some(s) => {
                    params.insert(p.key.to_string(), p.kind.parse(p.key, s)?);
                }
                None => missing.push(p.key),
            }
        }
        if !missing.is_empty() {
            return Err(LabError::usage(format!(
                "subcommand `{name}` is missing required key{} {}",
                if missing.len() > 1 { "s" } else { "" },
                missing.iter().map(|k| format!("`{k}`")).collect::<Vec<_>>().join(", ")
            )));
        }
        if workers == Some(0) {
            return Err(LabError::usage("--workers must be at least 1"));
        }
        Ok(Self { subcommand: name.to_string(), params, seed, out, format, workers })
    }

    /// Convenience constructor from `key = value` string pairs.
    pub fn from_pairs(name: &str, pairs: &[(&str, &str)], seed: u64) -> LabResult<Self> {
        let raw: Vec<(String, String)> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Self::build(name, &raw, seed, PathBuf::from("."), Format::Csv, None)
    }

    fn get(&self, key: &str) -> &Value {
        self.params.get(key).unwrap_or_else(|| panic!("schema has no key `{key}`"))
    }

    pub fn real(&self, key: &str) -> f64 {
        match self.get(key) {
            Value::Real(x) => *x,
            Value::Int(i) => *i as f64,
            v => panic!("key `{key}` holds {v:?}"),
        }
    }

    pub fn int(&self, key: &str) -> u64 {
        match self.get(key) {
            Value::Int(i) => *i,
            v => panic!("key `{key}` holds {v:?}"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.int(key) as usize
    }

    pub fn reals(&self, key: &str) -> Vec<f64> {
        match self.get(key) {
            Value::RealList(v) => v.clone(),
            Value::IntList(v) => v.iter().map(|&i| i as f64).collect(),
            v => panic!("key `{key}` holds {v:?}"),
        }
    }

    pub fn ints(&self, key: &str) -> Vec<u64> {
        match self.get(key) {
            Value::IntList(v) => v.clone(),
            v => panic!("key `{key}` holds {v:?}"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.get(key) {
            Value::Text(s) => s,
            v => panic!("key `{key}` holds {v:?}"),
        }
    }

    /// Parameters as display strings, for manifests.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
    }
}
