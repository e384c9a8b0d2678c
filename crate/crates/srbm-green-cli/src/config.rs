//! `key = value` run configuration.

use srbm_green::model::ModelParams;
use srbm_green::montecarlo::SimConfig;

use crate::CliError;

/// Model, quadrature and simulation settings of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub quadrature_nodes: usize,
    pub quadrature_tol: f64,
    pub sim: SimConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { model: ModelParams::canonical(), quadrature_nodes: 512, quadrature_tol: 1e-8, sim: SimConfig::default() }
    }
}

const MODEL_KEYS: [&str; 9] = ["sigma11", "sigma12", "sigma22", "mu1", "mu2", "r12", "r21", "x1", "x2"];
const OTHER_KEYS: [&str; 6] = ["nodes", "tol", "dt", "tmax", "paths", "seed"];

fn line_of(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(0, |i| i + 1)
}

fn as_f64(text: &str, key: &str, v: &toml::Value) -> Result<f64, CliError> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(CliError::Config { line: line_of(text, key), message: format!("`{key}` must be a number") }),
    }
}

fn as_count(text: &str, key: &str, v: &toml::Value) -> Result<u64, CliError> {
    let x = as_f64(text, key, v)?;
    if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
        return Err(CliError::Config { line: line_of(text, key), message: format!("`{key}` must be a non-negative integer") });
    }
    match v {
        toml::Value::Integer(i) => Ok(*i as u64),
        _ => Ok(x as u64),
    }
}

/// Parses a configuration. Absent keys take their defaults; unknown keys are
/// rejected all at once.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e.span().map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        CliError::Config { line, message: e.message().to_string() }
    })?;
    let unknown: Vec<String> = table
        .keys()
        .filter(|k| !MODEL_KEYS.contains(&k.as_str()) && !OTHER_KEYS.contains(&k.as_str()))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(CliError::UnknownKeys(unknown));
    }
    let mut cfg = RunConfig::default();
    let m = &mut cfg.model;
    for (key, v) in &table {
        match key.as_str() {
            "sigma11" => m.sigma11 = as_f64(text, key, v)?,
            "sigma12" => m.sigma12 = as_f64(text, key, v)?,
            "sigma22" => m.sigma22 = as_f64(text, key, v)?,
            "mu1" => m.mu1 = as_f64(text, key, v)?,
            "mu2" => m.mu2 = as_f64(text, key, v)?,
            "r12" => m.r12 = as_f64(text, key, v)?,
            "r21" => m.r21 = as_f64(text, key, v)?,
            "x1" => m.x1 = as_f64(text, key, v)?,
            "x2" => m.x2 = as_f64(text, key, v)?,
            "nodes" => cfg.quadrature_nodes = as_count(text, key, v)? as usize,
            "tol" => cfg.quadrature_tol = as_f64(text, key, v)?,
            "dt" => cfg.sim.dt = as_f64(text, key, v)?,
            "tmax" => cfg.sim.t_max = as_f64(text, key, v)?,
            "paths" => cfg.sim.paths = as_count(text, key, v)? as usize,
            "seed" => cfg.sim.seed = as_count(text, key, v)?,
            _ => unreachable!("keys were checked above"),
        }
    }
    cfg.model.check()?;
    cfg.sim.check()?;
    if !(cfg.quadrature_tol > 0.0 && cfg.quadrature_tol < 1.0) {
        return Err(CliError::Config { line: line_of(text, "tol"), message: "`tol` must lie in (0, 1)".into() });
    }
    Ok(cfg)
}

/// The configuration as `key = value` lines, in a fixed order.
pub fn render_config(cfg: &RunConfig) -> String {
    let m = &cfg.model;
    let model = [m.sigma11, m.sigma12, m.sigma22, m.mu1, m.mu2, m.r12, m.r21, m.x1, m.x2];
    let mut out = String::new();
    for (k, v) in MODEL_KEYS.iter().zip(model) {
        out.push_str(&format!("{k} = {v:?}\n"));
    }
    out.push_str(&format!("nodes = {}\n", cfg.quadrature_nodes));
    out.push_str(&format!("tol = {:?}\n", cfg.quadrature_tol));
    out.push_str(&format!("dt = {:?}\n", cfg.sim.dt));
    out.push_str(&format!("tmax = {:?}\n", cfg.sim.t_max));
    out.push_str(&format!("paths = {}\n", cfg.sim.paths));
    out.push_str(&format!("seed = {}\n", cfg.sim.seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANONICAL: &str = "sigma11 = 1.0\nsigma12 = 0.0\nsigma22 = 1.0\nmu1 = 1.0\nmu2 = 1.0\n\
                             r12 = 0.0\nr21 = 0.0\nx1 = 1.0\nx2 = 1.0\n";

    #[test]
    fn full_file_round_trips() {
        let cfg = parse_config(CANONICAL).unwrap();
        assert_eq!(cfg.model, ModelParams::canonical());
        assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn defaults_fill_missing_keys() {
        let cfg = parse_config("mu1 = 2\n").unwrap();
        assert_eq!(cfg.sim.seed, 42);
        assert_eq!(cfg.quadrature_nodes, 512);
        assert_eq!(cfg.sim.paths, 100_000);
        assert_eq!(cfg.model.mu1, 2.0);
        let cfg = parse_config("paths = 1e3\nseed = 7").unwrap();
        assert_eq!((cfg.sim.paths, cfg.sim.seed), (1000, 7));
    }

    #[test]
    fn unknown_keys_are_listed() {
        match parse_config("sigma13 = 1.0\nfoo = 2\nmu1 = 1\n") {
            Err(CliError::UnknownKeys(k)) => assert_eq!(k, vec!["foo".to_string(), "sigma13".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_the_line() {
        match parse_config("mu1 = 1\nmu2 = = 3\n") {
            Err(CliError::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_config("mu1 = 1\n\nx2 = \"far\"\n") {
            Err(CliError::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn model_constraints_are_delegated() {
        let e = parse_config("sigma11 = 1\nsigma22 = 1\nsigma12 = 2\n");
        assert!(matches!(e, Err(CliError::Model(srbm_green::Error::Parameter(_)))));
    }
}
