//! Configuration files: flat top-level keys plus one optional table per command.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use boettcher_core::numeric::rational::is_prime;
use boettcher_core::numeric::{format_rational, parse_rational, Rational};
use boettcher_core::series::Correspondence;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Xi,
    Gamma,
    VerifyFormal,
    Eval,
    VerifyNumeric,
    Radius,
    IsoEde,
    Orbits,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Xi,
        Command::Gamma,
        Command::VerifyFormal,
        Command::Eval,
        Command::VerifyNumeric,
        Command::Radius,
        Command::IsoEde,
        Command::Orbits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Xi => "xi",
            Command::Gamma => "gamma",
            Command::VerifyFormal => "verify-formal",
            Command::Eval => "eval",
            Command::VerifyNumeric => "verify-numeric",
            Command::Radius => "radius",
            Command::IsoEde => "iso-ede",
            Command::Orbits => "orbits",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("parse error{}: {message}", location(*line, field))]
    Parse { line: Option<usize>, field: Option<String>, message: String },
    #[error("validation error: {0}")]
    Validation(String),
}

fn location(line: Option<usize>, field: &Option<String>) -> String {
    match (line, field) {
        (Some(l), Some(f)) => format!(" at line {l}, field {f}"),
        (Some(l), None) => format!(" at line {l}"),
        (None, Some(f)) => format!(" in field {f}"),
        (None, None) => String::new(),
    }
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Parse { .. } => "parse_error",
            ConfigError::Validation(_) => "validation_error",
        }
    }

    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Parse { line: None, field: Some(field.into()), message: message.into() }
    }
}

/// Integers are accepted wherever a rational string is.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum RationalText {
    Int(i64),
    Text(String),
}

impl RationalText {
    fn parse(&self, field: &str) -> Result<Rational, ConfigError> {
        match self {
            RationalText::Int(n) => Ok(Rational::from_integer((*n).into())),
            RationalText::Text(s) => parse_rational(s).map_err(|e| ConfigError::field(field, e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    prime: Option<u64>,
    weight: Option<RationalText>,
    prec: Option<u32>,
    seed: Option<u64>,
    levels: Option<u32>,
    jobs: Option<usize>,
    e: Option<u64>,
    d: Option<u64>,
    alpha0: Option<RationalText>,
    steps: Option<usize>,
    batch: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    f: Option<Vec<String>>,
    g: Option<Vec<String>>,
    prime: Option<u64>,
    weight: Option<RationalText>,
    prec: Option<u32>,
    seed: Option<u64>,
    levels: Option<u32>,
    jobs: Option<usize>,
    e: Option<u64>,
    d: Option<u64>,
    alpha0: Option<RationalText>,
    steps: Option<usize>,
    batch: Option<usize>,
    xi: Option<RawSection>,
    gamma: Option<RawSection>,
    #[serde(rename = "verify-formal")]
    verify_formal: Option<RawSection>,
    eval: Option<RawSection>,
    #[serde(rename = "verify-numeric")]
    verify_numeric: Option<RawSection>,
    radius: Option<RawSection>,
    #[serde(rename = "iso-ede")]
    iso_ede: Option<RawSection>,
    orbits: Option<RawSection>,
}

/// Per-command values; unset fields fall back to the top level.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub prime: Option<u64>,
    pub weight: Option<Rational>,
    pub prec: Option<u32>,
    pub seed: Option<u64>,
    pub levels: Option<u32>,
    pub jobs: Option<usize>,
    pub e: Option<u64>,
    pub d: Option<u64>,
    pub alpha0: Option<Rational>,
    pub steps: Option<usize>,
    pub batch: Option<usize>,
}

impl Overrides {
    fn from_raw(raw: &RawSection, table: &str) -> Result<Self, ConfigError> {
        let key = |k: &str| if table.is_empty() { k.to_string() } else { format!("{table}.{k}") };
        Ok(Overrides {
            prime: raw.prime,
            weight: raw.weight.as_ref().map(|w| w.parse(&key("weight"))).transpose()?,
            prec: raw.prec,
            seed: raw.seed,
            levels: raw.levels,
            jobs: raw.jobs,
            e: raw.e,
            d: raw.d,
            alpha0: raw.alpha0.as_ref().map(|a| a.parse(&key("alpha0"))).transpose()?,
            steps: raw.steps,
            batch: raw.batch,
        })
    }

    /// Fields set in `other` win.
    pub fn merged(&self, other: &Overrides) -> Overrides {
        Overrides {
            prime: other.prime.or(self.prime),
            weight: other.weight.clone().or_else(|| self.weight.clone()),
            prec: other.prec.or(self.prec),
            seed: other.seed.or(self.seed),
            levels: other.levels.or(self.levels),
            jobs: other.jobs.or(self.jobs),
            e: other.e.or(self.e),
            d: other.d.or(self.d),
            alpha0: other.alpha0.clone().or_else(|| self.alpha0.clone()),
            steps: other.steps.or(self.steps),
            batch: other.batch.or(self.batch),
        }
    }
}

pub const DEFAULT_PRIME: u64 = 5;
pub const DEFAULT_WEIGHT: i64 = 12;
pub const DEFAULT_PREC: u32 = 60;
pub const DEFAULT_LEVELS: u32 = 6;

/// A validated configuration. After [`RunConfig::resolve`] the top-level fields hold the effective values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub f: Option<Vec<String>>,
    pub g: Option<Vec<String>>,
    pub d: Option<usize>,
    pub e: Option<usize>,
    pub prime: u64,
    pub weight: String,
    pub prec: u32,
    pub seed: u64,
    pub levels: u32,
    /// Defaults to `1/p`.
    pub alpha0: String,
    pub steps: Option<usize>,
    pub batch: usize,
    pub iso_e: Option<u64>,
    pub iso_d: Option<u64>,
    /// Thread count; excluded from reports because it never changes them.
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    corr: Option<Correspondence>,
    #[serde(skip)]
    weight_value: Rational,
    #[serde(skip)]
    alpha0_value: Rational,
    #[serde(skip)]
    base: Overrides,
    #[serde(skip)]
    sections: BTreeMap<Command, Overrides>,
}

fn toml_error(text: &str, err: toml::de::Error) -> ConfigError {
    let line = err.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    ConfigError::Parse { line, field: None, message: err.message().to_string() }
}

fn coefficients(values: &[String], name: &str) -> Result<Vec<Rational>, ConfigError> {
    values
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).map_err(|e| ConfigError::field(format!("{name}[{i}]"), e.to_string())))
        .collect()
}

/// Parses and validates config text; the empty string gives the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| toml_error(text, e))?;
    let corr = match (&raw.f, &raw.g) {
        (Some(f), Some(g)) => {
            let f = coefficients(f, "f")?;
            let g = coefficients(g, "g")?;
            Some(Correspondence::polarized(f, g).map_err(|e| ConfigError::Validation(e.to_string()))?)
        }
        (None, None) => None,
        _ => return Err(ConfigError::Validation("f and g must be given together".into())),
    };
    let top = RawSection {
        prime: raw.prime,
        weight: raw.weight.clone(),
        prec: raw.prec,
        seed: raw.seed,
        levels: raw.levels,
        jobs: raw.jobs,
        e: raw.e,
        d: raw.d,
        alpha0: raw.alpha0.clone(),
        steps: raw.steps,
        batch: raw.batch,
    };
    let base = Overrides::from_raw(&top, "")?;
    let mut sections = BTreeMap::new();
    for (cmd, section) in [
        (Command::Xi, &raw.xi),
        (Command::Gamma, &raw.gamma),
        (Command::VerifyFormal, &raw.verify_formal),
        (Command::Eval, &raw.eval),
        (Command::VerifyNumeric, &raw.verify_numeric),
        (Command::Radius, &raw.radius),
        (Command::IsoEde, &raw.iso_ede),
        (Command::Orbits, &raw.orbits),
    ] {
        if let Some(s) = section {
            sections.insert(cmd, Overrides::from_raw(s, cmd.name())?);
        }
    }
    let mut config = RunConfig {
        f: corr.as_ref().map(|c| c.f_coeffs().iter().map(format_rational).collect()),
        g: corr.as_ref().map(|c| c.g_coeffs().iter().map(format_rational).collect()),
        d: corr.as_ref().map(Correspondence::d),
        e: corr.as_ref().map(Correspondence::e),
        prime: DEFAULT_PRIME,
        weight: String::new(),
        prec: DEFAULT_PREC,
        seed: 0,
        levels: DEFAULT_LEVELS,
        alpha0: String::new(),
        steps: None,
        batch: 0,
        iso_e: None,
        iso_d: None,
        jobs: 1,
        corr,
        weight_value: Rational::from_integer(DEFAULT_WEIGHT.into()),
        alpha0_value: Rational::from_integer(0.into()),
        base: base.clone(),
        sections: sections.clone(),
    };
    config.apply(&base)?;
    for s in sections.values() {
        config.clone().apply(s)?;
    }
    Ok(config)
}

impl RunConfig {
    fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(p) = o.prime {
            self.prime = p;
        }
        if !is_prime(self.prime) {
            return Err(ConfigError::Validation(format!("bad prime: {} is not prime", self.prime)));
        }
        if let Some(w) = &o.weight {
            self.weight_value = w.clone();
        }
        if self.weight_value <= Rational::from_integer(0.into()) {
            return Err(ConfigError::Validation("weight must be positive".into()));
        }
        if let Some(n) = o.prec {
            self.prec = n;
        }
        if self.prec == 0 {
            return Err(ConfigError::Validation("prec must be positive".into()));
        }
        match &o.alpha0 {
            Some(a) => self.alpha0_value = a.clone(),
            None => self.alpha0_value = Rational::new(1.into(), (self.prime as i64).into()),
        }
        if let Some(j) = o.jobs {
            if j == 0 {
                return Err(ConfigError::Validation("jobs must be at least 1".into()));
            }
            self.jobs = j;
        }
        self.seed = o.seed.unwrap_or(self.seed);
        self.levels = o.levels.unwrap_or(self.levels);
        self.steps = o.steps.or(self.steps);
        self.batch = o.batch.unwrap_or(self.batch);
        self.iso_e = o.e.or(self.iso_e);
        self.iso_d = o.d.or(self.iso_d);
        self.weight = format_rational(&self.weight_value);
        self.alpha0 = format_rational(&self.alpha0_value);
        Ok(())
    }

    /// Effective configuration for `cmd`: defaults, then top level, then its table, then `flags`.
    pub fn resolve(&self, cmd: Command, flags: &Overrides) -> Result<RunConfig, ConfigError> {
        let mut merged = self.base.clone();
        if let Some(s) = self.sections.get(&cmd) {
            merged = merged.merged(s);
        }
        let merged = merged.merged(flags);
        let mut out = RunConfig {
            prime: DEFAULT_PRIME,
            prec: DEFAULT_PREC,
            seed: 0,
            levels: DEFAULT_LEVELS,
            steps: None,
            batch: 0,
            iso_e: None,
            iso_d: None,
            jobs: 1,
            weight_value: Rational::from_integer(DEFAULT_WEIGHT.into()),
            alpha0_value: Rational::from_integer(0.into()),
            base: Overrides::default(),
            sections: BTreeMap::new(),
            ..self.clone()
        };
        out.apply(&merged)?;
        Ok(out)
    }

    pub fn correspondence(&self) -> Option<&Correspondence> {
        self.corr.as_ref()
    }

    pub fn weight_value(&self) -> &Rational {
        &self.weight_value
    }

    pub fn alpha0_value(&self) -> &Rational {
        &self.alpha0_value
    }
}
