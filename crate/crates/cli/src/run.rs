//! Command dispatch and the versioned report envelope.

use boettcher_core::boettcher::{compute_xi, verify_formal_conjugacy, verify_formal_inverse, BoettcherData};
use boettcher_core::iso::{
    exponent_matrix, finite_level_bijection_check, kernel_triviality_cert, verify_cocycle_identity, IsoError,
    MAX_FIBER,
};
use boettcher_core::numeric::{format_rational, LocalElem, Valuation};
use boettcher_core::orbits::{predicted_orbit_structure, OrbitError};
use boettcher_core::padic::{
    check_good_reduction, convergence_radius, evaluate_series_at_path, forward_path_search, verify_norm_identity,
    verify_numeric_conjugacy_with, EvalError,
};
use boettcher_core::random::random_suite;
use boettcher_core::series::{Correspondence, SeriesJson, WeightedSeries};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, ConfigError, RunConfig};

pub const SCHEMA: &str = "boettcher-report/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    VerificationFailed,
    HypothesisViolated,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed => 1,
            Status::HypothesisViolated => 2,
            Status::Error => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

impl From<&ConfigError> for ErrorInfo {
    fn from(e: &ConfigError) -> Self {
        ErrorInfo { code: e.code().into(), message: e.to_string() }
    }
}

/// What a command produced, before it is wrapped in a [`Report`].
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub csv: Option<String>,
    pub error: Option<ErrorInfo>,
}

impl Outcome {
    fn ok(passed: bool, result: Value, csv: Option<String>) -> Self {
        let status = if passed { Status::Ok } else { Status::VerificationFailed };
        Outcome { status, result, csv, error: None }
    }

    fn refused(code: &str, message: String, result: Value) -> Self {
        Outcome { status: Status::HypothesisViolated, result, csv: None, error: Some(ErrorInfo { code: code.into(), message }) }
    }

    pub fn failure(code: &str, message: String) -> Self {
        Outcome { status: Status::Error, result: Value::Null, csv: None, error: Some(ErrorInfo { code: code.into(), message }) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: Option<String>,
    pub config: Option<RunConfig>,
    pub status: Status,
    pub exit_code: i32,
    pub error: Option<ErrorInfo>,
    pub result: Value,
}

impl Report {
    pub fn new(command: Option<Command>, config: Option<RunConfig>, outcome: &Outcome) -> Self {
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: command.map(|c| c.name().to_string()),
            config,
            status: outcome.status,
            exit_code: outcome.status.exit_code(),
            error: outcome.error.clone(),
            result: outcome.result.clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Runs `cmd` on a resolved config, using `config.jobs` threads for batch work.
pub fn run_command(cmd: Command, config: &RunConfig) -> Outcome {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build() {
        Ok(p) => p,
        Err(e) => return Outcome::failure("thread_pool", e.to_string()),
    };
    pool.install(|| dispatch(cmd, config))
}

fn dispatch(cmd: Command, config: &RunConfig) -> Outcome {
    if cmd == Command::IsoEde {
        return iso_ede(config);
    }
    let Some(corr) = config.correspondence() else {
        return Outcome::failure("validation_error", format!("{cmd} needs a correspondence (f and g)"));
    };
    match cmd {
        Command::Xi => xi(corr, config),
        Command::Gamma => gamma(corr, config),
        Command::VerifyFormal => verify_formal(corr, config),
        Command::Eval => eval(corr, config),
        Command::VerifyNumeric => verify_numeric(corr, config),
        Command::Radius => radius(corr, config),
        Command::Orbits => orbits(corr, config),
        Command::IsoEde => unreachable!(),
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report parts serialize")
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn monomial_text(exps: &[[u64; 2]]) -> String {
    if exps.is_empty() {
        return "1".into();
    }
    exps.iter()
        .map(|[i, k]| if *k == 1 { format!("v{i}") } else { format!("v{i}^{k}") })
        .collect::<Vec<_>>()
        .join("*")
}

fn series_csv(s: &SeriesJson) -> String {
    csv_table(&["monomial", "coefficient"], s.terms.iter().map(|t| vec![monomial_text(&t.exponents), t.coeff.clone()]))
}

fn valuation_text(x: &LocalElem) -> String {
    match x.valuation() {
        Valuation::Finite(v) => format_rational(&v),
        Valuation::AtLeast(v) => format!(">={}", format_rational(&v)),
        Valuation::Infinite => "inf".into(),
    }
}

fn xi(corr: &Correspondence, config: &RunConfig) -> Outcome {
    let (xi, n_used) = compute_xi(corr, config.weight_value());
    let series = xi.to_json();
    let csv = series_csv(&series);
    Outcome::ok(true, json!({ "n_used": n_used, "term_count": series.terms.len(), "xi": series }), Some(csv))
}

fn gamma(corr: &Correspondence, config: &RunConfig) -> Outcome {
    let data = BoettcherData::compute(corr, config.weight_value());
    let series = data.gamma.to_json();
    let csv = series_csv(&series);
    Outcome::ok(true, json!({ "n_used": data.n_used, "term_count": series.terms.len(), "gamma": series }), Some(csv))
}

fn formal_checks(corr: &Correspondence, config: &RunConfig) -> (bool, Value) {
    let data = BoettcherData::compute(corr, config.weight_value());
    let mut conj = verify_formal_conjugacy(corr, &data.xi, config.weight_value());
    conj.n_used = Some(data.n_used);
    let inv = verify_formal_inverse(corr, &data.xi, &data.gamma, config.weight_value());
    (conj.passed && inv.passed, json!({ "conjugacy": conj, "inverse": inv }))
}

fn verify_formal(corr: &Correspondence, config: &RunConfig) -> Outcome {
    let (main_passed, main) = formal_checks(corr, config);
    let suite = random_suite(config.seed, corr.e(), corr.d(), config.batch);
    let batch: Vec<(bool, Value)> = suite.par_iter().map(|c| formal_checks(c, config)).collect();
    let passed = main_passed && batch.iter().all(|(p, _)| *p);
    let rows = batch.iter().enumerate().map(|(i, (p, v))| {
        vec![
            i.to_string(),
            v["conjugacy"]["passed"].to_string(),
            v["inverse"]["passed"].to_string(),
            v["conjugacy"]["verified_weight"].as_str().unwrap_or_default().to_string(),
            p.to_string(),
        ]
    });
    let csv = (config.batch > 0).then(|| csv_table(&["sample", "conjugacy", "inverse", "verified_weight", "passed"], rows));
    let samples: Vec<&Value> = batch.iter().map(|(_, v)| v).collect();
    Outcome::ok(passed, json!({ "passed": passed, "main": main, "batch": samples }), csv)
}

fn eval_error(e: EvalError) -> Outcome {
    match e {
        EvalError::DivergenceRegion { .. } | EvalError::NotDominant(_) => {
            Outcome::refused("outside_region", e.to_string(), Value::Null)
        }
        other => Outcome::failure("eval_error", other.to_string()),
    }
}

fn path_for(corr: &Correspondence, config: &RunConfig, xi: &WeightedSeries, extra: usize) -> Result<boettcher_core::padic::PathPoint, EvalError> {
    let alpha0 = LocalElem::from_rational(config.alpha0_value(), config.prime, 1, config.prec);
    let steps = config.steps.unwrap_or_else(|| xi.max_index().unwrap_or(0) + extra);
    forward_path_search(corr, &alpha0, steps)
}

fn path_csv(path: &boettcher_core::padic::PathPoint) -> String {
    let json = path.to_json();
    let rows = json.coords.iter().enumerate().map(|(i, c)| {
        vec![
            i.to_string(),
            c.valuation.clone(),
            c.tower_level.map_or_else(String::new, |t| t.to_string()),
            c.unit_digits.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
        ]
    });
    csv_table(&["index", "valuation", "tower_level", "unit_digits"], rows)
}

fn eval(corr: &Correspondence, config: &RunConfig) -> Outcome {
    let (xi, n_used) = compute_xi(corr, config.weight_value());
    let path = match path_for(corr, config, &xi, 0) {
        Ok(p) => p,
        Err(e) => return eval_error(e),
    };
    let value = match evaluate_series_at_path(&xi, &path) {
        Ok(v) => v,
        Err(e) => return eval_error(e),
    };
    let norm = verify_norm_identity(corr, &path);
    let fmt = |r: Option<boettcher_core::numeric::Rational>| r.as_ref().map_or_else(|| "inf".to_string(), format_rational);
    let result = json!({
        "n_used": n_used,
        "good_reduction": check_good_reduction(corr, config.prime),
        "radius": format_rational(&convergence_radius(corr, config.prime)),
        "path": path.to_json(),
        "value": {
            "valuation": valuation_text(&value.value),
            "unit_digits": value.value.unit_digits(),
            "tail_bound": fmt(value.tail_bound.clone()),
            "certified_precision": fmt(value.certified_precision()),
        },
        "norm_identity": norm,
    });
    Outcome::ok(norm.passed, result, Some(path_csv(&path)))
}

fn verify_numeric(corr: &Correspondence, config: &RunConfig) -> Outcome {
    let (xi, _) = compute_xi(corr, config.weight_value());
    let path = match path_for(corr, config, &xi, 1) {
        Ok(p) => p,
        Err(e) => return eval_error(e),
    };
    match verify_numeric_conjugacy_with(corr, &xi, &path, config.weight_value()) {
        Ok(r) => Outcome::ok(r.passed, json!({ "conjugacy": r, "path": path.to_json() }), Some(path_csv(&path))),
        Err(e) => eval_error(e),
    }
}

fn radius(corr: &Correspondence, config: &RunConfig) -> Outcome {
    let result = json!({
        "prime": config.prime,
        "good_reduction": check_good_reduction(corr, config.prime),
        "radius": format_rational(&convergence_radius(corr, config.prime)),
    });
    Outcome::ok(true, result, None)
}

fn iso_ede(config: &RunConfig) -> Outcome {
    let from_corr = config.correspondence().map(|c| (c.e() as u64, c.d() as u64));
    let (e, d) = match (config.iso_e.or(from_corr.map(|p| p.0)), config.iso_d.or(from_corr.map(|p| p.1))) {
        (Some(e), Some(d)) => (e, d),
        _ => return Outcome::failure("validation_error", "iso-ede needs --e and --d or a correspondence".into()),
    };
    if e == 0 || d == 0 {
        return Outcome::failure("validation_error", "degrees must be positive".into());
    }
    let levels = config.levels as usize;
    let m = match exponent_matrix(e, d, levels) {
        Ok(m) => m,
        Err(err @ IsoError::NotCoprime { .. }) => {
            return Outcome::refused("not_coprime", err.to_string(), json!({ "hypothesis": "coprime degrees" }))
        }
        Err(err) => return Outcome::failure("iso_error", err.to_string()),
    };
    let cocycle = verify_cocycle_identity(&m);
    let kernel = kernel_triviality_cert(&m);
    let ks: Vec<usize> = (0..=levels).take_while(|&k| (e as u128).pow(k as u32) <= MAX_FIBER as u128).collect();
    let bijections: Vec<_> = ks.par_iter().map(|&k| finite_level_bijection_check(&m, k)).collect();
    let bijections = match bijections.into_iter().collect::<Result<Vec<_>, _>>() {
        Ok(b) => b,
        Err(err) => return Outcome::failure("iso_error", err.to_string()),
    };
    let passed = cocycle.passed && kernel.passed && bijections.iter().all(|b| b.passed);
    let result = json!({
        "matrix": m.to_json(),
        "cocycle": cocycle,
        "kernel": kernel,
        "bijections": bijections,
        "passed": passed,
    });
    Outcome::ok(passed, result, Some(m.to_csv()))
}

fn orbits(corr: &Correspondence, config: &RunConfig) -> Outcome {
    let alpha0 = LocalElem::from_rational(config.alpha0_value(), config.prime, 1, config.prec);
    match predicted_orbit_structure(corr, &alpha0, config.prime, config.levels) {
        Ok(r) => {
            let csv = r.to_csv();
            Outcome::ok(r.iso_certified, to_value(&r), Some(csv))
        }
        Err(OrbitError::HypothesisViolated { hypothesis, checklist, lower_bound }) => Outcome::refused(
            "hypothesis_violated",
            hypothesis.clone(),
            json!({ "hypothesis": hypothesis, "checklist": checklist, "lower_bound": lower_bound }),
        ),
        Err(e) => Outcome::failure("orbit_error", e.to_string()),
    }
}
