//! Flat `key=value` run configuration for `solve-diffusion`.

use crate::expr::Expr;
use crate::CliError;
use fracsob_core::diffusion::{solve_general, solve_self_adjoint, source_from_fn, Coefficient, PicardOptions};
use fracsob_core::grid::interpolate_nodes;
use fracsob_core::io::read_text;
use fracsob_core::{EllipticSpec, FractionalOrder, GridFunction, SpaceTimeField, TimeGrid};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

const KEYS: &[&str] = &[
    "alpha",
    "L",
    "T",
    "M",
    "N",
    "K",
    "a_expr",
    "a_csv",
    "b_expr",
    "c_expr",
    "F_expr",
    "F_csv",
    "solver",
    "tol",
    "max_iter",
    "grading",
    "time_modes",
    "t_min",
    "solution_output",
    "report_output",
    "snapshots_output",
    "snapshot_times",
    "increments_output",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    SelfAdjoint,
    General,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::SelfAdjoint => "self_adjoint",
            SolverKind::General => "general",
        }
    }
}

#[derive(Debug, Clone)]
pub enum CoefSource {
    Expr(Expr),
    Csv(GridFunction),
}

#[derive(Debug, Clone)]
pub enum SourceTerm {
    Expr(Expr),
    Csv(SpaceTimeField),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub alpha: FractionalOrder,
    pub length: f64,
    pub t_end: f64,
    pub m: usize,
    pub n: usize,
    pub modes: usize,
    pub a: CoefSource,
    pub b: Expr,
    pub c: Expr,
    pub source: SourceTerm,
    pub solver: SolverKind,
    pub picard: PicardOptions,
    pub grading: f64,
    pub time_modes: usize,
    pub t_min: f64,
    pub solution_output: Option<PathBuf>,
    pub report_output: Option<PathBuf>,
    pub snapshots_output: Option<PathBuf>,
    pub snapshot_times: Vec<f64>,
    pub increments_output: Option<PathBuf>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `key=value` lines; `#` starts a comment; blank lines are ignored.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("config line {}: expected key=value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(invalid(format!("config line {}: unknown key '{k}'", i + 1)));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(invalid(format!("config line {}: duplicate key '{k}'", i + 1)));
        }
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str, default: Option<T>) -> Result<T, CliError> {
    match map.get(key) {
        Some(v) => v.parse().map_err(|_| invalid(format!("cannot parse {key}='{v}'"))),
        None => default.ok_or_else(|| invalid(format!("missing required key '{key}'"))),
    }
}

fn space_expr(map: &BTreeMap<String, String>, key: &str, default: &str) -> Result<Expr, CliError> {
    let src = map.get(key).map_or(default, String::as_str);
    let e = Expr::parse(src).map_err(|e| invalid(format!("{key}: {e}")))?;
    if e.depends_on_t() {
        return Err(invalid(format!("{key} must not depend on t")));
    }
    Ok(e)
}

impl RunConfig {
    /// Relative paths are resolved against `base` (the config file's directory).
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let map = parse_pairs(text)?;
        let path = |k: &str| map.get(k).map(|p| base.join(p));
        let alpha = FractionalOrder::new(num(&map, "alpha", None)?)?;
        let length: f64 = num(&map, "L", Some(1.0))?;
        let t_end: f64 = num(&map, "T", Some(1.0))?;
        if !(length > 0.0 && length.is_finite() && t_end > 0.0 && t_end.is_finite()) {
            return Err(invalid("L and T must be positive"));
        }
        let a = match (map.get("a_expr"), path("a_csv")) {
            (Some(_), Some(_)) => return Err(invalid("give only one of a_expr and a_csv")),
            (_, Some(p)) => {
                let g = GridFunction::from_csv(&read_text(&p)?)?;
                if (g.domain_length() - length).abs() > 1e-12 * length {
                    return Err(invalid("a_csv domain_length differs from L"));
                }
                CoefSource::Csv(g)
            }
            _ => CoefSource::Expr(space_expr(&map, "a_expr", "1")?),
        };
        let source = match (map.get("F_expr"), path("F_csv")) {
            (Some(_), Some(_)) => return Err(invalid("give only one of F_expr and F_csv")),
            (Some(e), None) => SourceTerm::Expr(Expr::parse(e).map_err(|e| invalid(format!("F_expr: {e}")))?),
            (None, Some(p)) => SourceTerm::Csv(SpaceTimeField::from_csv(&read_text(&p)?)?),
            (None, None) => return Err(invalid("one of F_expr and F_csv is required")),
        };
        let solver = match map.get("solver").map_or("self_adjoint", String::as_str) {
            "self_adjoint" => SolverKind::SelfAdjoint,
            "general" => SolverKind::General,
            other => return Err(invalid(format!("unknown solver '{other}' (self_adjoint or general)"))),
        };
        let defaults = PicardOptions::default();
        let picard = PicardOptions {
            tol: num(&map, "tol", Some(defaults.tol))?,
            max_iter: num(&map, "max_iter", Some(defaults.max_iter))?,
        };
        if !(picard.tol > 0.0) || picard.max_iter == 0 {
            return Err(invalid("tol must be positive and max_iter at least 1"));
        }
        let grading: f64 = num(&map, "grading", Some(1.0))?;
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(invalid("grading must be >= 1"));
        }
        let t_min: f64 = num(&map, "t_min", Some(0.0))?;
        if !(t_min >= 0.0 && t_min < t_end) {
            return Err(invalid("t_min must lie in [0, T)"));
        }
        let snapshot_times = match map.get("snapshot_times") {
            Some(s) => s
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| invalid(format!("bad snapshot time '{v}'"))))
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![0.25 * t_end, 0.5 * t_end, t_end],
        };
        if snapshot_times.iter().any(|t| !(*t >= 0.0 && *t <= t_end)) {
            return Err(invalid("snapshot times must lie in [0, T]"));
        }
        let cfg = RunConfig {
            alpha,
            length,
            t_end,
            m: num(&map, "M", Some(256))?,
            n: num(&map, "N", Some(256))?,
            modes: num(&map, "K", Some(64))?,
            a,
            b: space_expr(&map, "b_expr", "0")?,
            c: space_expr(&map, "c_expr", "0")?,
            source,
            solver,
            picard,
            grading,
            time_modes: num(&map, "time_modes", Some(64))?,
            t_min,
            solution_output: path("solution_output"),
            report_output: path("report_output"),
            snapshots_output: path("snapshots_output"),
            snapshot_times,
            increments_output: path("increments_output"),
        };
        if cfg.m < 2 || cfg.n < 2 || cfg.modes < 1 || cfg.time_modes < 1 {
            return Err(invalid("need M >= 2, N >= 2, K >= 1 and time_modes >= 1"));
        }
        if let SourceTerm::Csv(f) = &cfg.source {
            if f.m != cfg.m || f.time.n() != cfg.n || (f.length - length).abs() > 1e-12 * length {
                return Err(invalid("F_csv grid differs from L, M and N"));
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&read_text(path)?, base)
    }

    pub fn time_grid(&self) -> Result<TimeGrid, CliError> {
        match &self.source {
            SourceTerm::Csv(f) => Ok(f.time.clone()),
            SourceTerm::Expr(_) => Ok(TimeGrid::graded(self.t_end, self.n, self.grading)?),
        }
    }

    pub fn spec(&self) -> Result<EllipticSpec, CliError> {
        let a: Coefficient = match &self.a {
            CoefSource::Expr(e) => {
                let e = e.clone();
                Arc::new(move |x| e.eval(x, 0.0))
            }
            CoefSource::Csv(g) => {
                let nodes = g.nodes();
                let values = g.values().to_vec();
                Arc::new(move |x| interpolate_nodes(&nodes, &values, x))
            }
        };
        let (b, c) = (self.b.clone(), self.c.clone());
        Ok(EllipticSpec::new(
            self.length,
            a,
            Arc::new(move |x| b.eval(x, 0.0)),
            Arc::new(move |x| c.eval(x, 0.0)),
        )?)
    }

    pub fn source_field(&self) -> Result<SpaceTimeField, CliError> {
        match &self.source {
            SourceTerm::Csv(f) => Ok(f.clone()),
            SourceTerm::Expr(e) => Ok(source_from_fn(self.length, self.m, self.time_grid()?, |x, t| e.eval(x, t))?),
        }
    }

    /// Runs the configured solver; returns the solution and the Picard
    /// increments (empty for the self-adjoint solver).
    pub fn solve(&self, f: &SpaceTimeField) -> Result<(SpaceTimeField, Vec<f64>), CliError> {
        let spec = self.spec()?;
        match self.solver {
            SolverKind::SelfAdjoint => Ok((solve_self_adjoint(f, &spec, self.alpha, self.modes)?, Vec::new())),
            SolverKind::General => {
                let sol = solve_general(f, &spec, self.alpha, self.modes, self.picard)?;
                Ok((sol.field, sol.increments))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_and_duplicate_keys_fail() {
        assert!(parse_pairs("alpha=0.5\nbogus=1\n").is_err());
        assert!(parse_pairs("alpha=0.5\nalpha=0.4\n").is_err());
        assert!(parse_pairs("alpha 0.5\n").is_err());
        let m = parse_pairs("# comment\n\nalpha = 0.5 # trailing\n").unwrap();
        assert_eq!(m["alpha"], "0.5");
    }

    #[test]
    fn defaults_and_validation() {
        let cfg = RunConfig::parse("alpha=0.5\nF_expr=x*t\n", Path::new(".")).unwrap();
        assert_eq!((cfg.m, cfg.n, cfg.modes, cfg.solver), (256, 256, 64, SolverKind::SelfAdjoint));
        assert!(RunConfig::parse("alpha=1.5\nF_expr=1\n", Path::new(".")).is_err());
        assert!(RunConfig::parse("alpha=0.5\n", Path::new(".")).is_err());
        assert!(RunConfig::parse("alpha=0.5\nF_expr=1\nb_expr=t\n", Path::new(".")).is_err());
        assert!(RunConfig::parse("alpha=0.5\nF_expr=1\nsolver=magic\n", Path::new(".")).is_err());
        assert!(RunConfig::parse("alpha=0.5\nF_expr=1\nM=abc\n", Path::new(".")).is_err());
    }
}
