//! Text formats for grid functions, coefficient vectors and space-time
//! fields. Floats are written with 17 significant digits, which reads back
//! to the identical `f64`.

use crate::diffusion::{SpaceTimeField, TimeGrid};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::time_basis::{Basis, SpectralCoefficients};
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidInput(format!("cannot parse {what} from '{}'", s.trim())))
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| Error::InvalidInput(format!("cannot parse {what} from '{}'", s.trim())))
}

/// Parses `# key=value key=value` into pairs, checking the key order.
fn parse_header<'a>(line: Option<&'a str>, keys: &[&str]) -> Result<Vec<&'a str>> {
    let line = line.ok_or_else(|| Error::InvalidInput("empty file".into()))?;
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::InvalidInput(format!("expected a '#' header line, got '{line}'")))?;
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() != keys.len() {
        return Err(Error::InvalidInput(format!("header must hold {}", keys.join(", "))));
    }
    fields
        .iter()
        .zip(keys)
        .map(|(f, k)| {
            f.strip_prefix(k)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| Error::InvalidInput(format!("expected header key '{k}', got '{f}'")))
        })
        .collect()
}

fn data_rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').collect()))
}

fn check_close(read: f64, expected: f64, scale: f64, line: usize) -> Result<()> {
    if (read - expected).abs() > 1e-9 * scale.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "line {line}: coordinate {read} does not match the grid node {expected}"
        )));
    }
    Ok(())
}

impl GridFunction {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# domain_length={} n_intervals={}\n",
            fmt_f64(self.domain_length()),
            self.n_intervals()
        );
        for (j, v) in self.values().iter().enumerate() {
            let _ = writeln!(s, "{},{}", fmt_f64(self.node(j)), fmt_f64(*v));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let h = parse_header(text.lines().next(), &["domain_length", "n_intervals"])?;
        let t_end = parse_f64(h[0], "domain_length")?;
        let n = parse_usize(h[1], "n_intervals")?;
        let mut values = Vec::with_capacity(n + 1);
        for (line, cols) in data_rows(text) {
            if cols.len() != 2 {
                return Err(Error::InvalidInput(format!("line {line}: expected 't,value'")));
            }
            let t = parse_f64(cols[0], "t")?;
            check_close(t, t_end * values.len() as f64 / n as f64, t_end, line)?;
            values.push(parse_f64(cols[1], "value")?);
        }
        if values.len() != n + 1 {
            return Err(Error::InvalidInput(format!("expected {} rows, got {}", n + 1, values.len())));
        }
        GridFunction::new(t_end, values)
    }
}

impl SpectralCoefficients {
    pub fn to_csv(&self) -> String {
        let len = self.basis.domain_length().map_or("nan".to_string(), fmt_f64);
        let mut s = format!("# basis={} domain_length={} K={}\n", self.basis.name(), len, self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{},{}", k + 1, fmt_f64(*c));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let h = parse_header(text.lines().next(), &["basis", "domain_length", "K"])?;
        let len = parse_f64(h[1], "domain_length")?;
        let basis = match h[0] {
            "a_sine" => Basis::ASine { domain_length: len },
            "dirichlet_laplacian" => Basis::DirichletLaplacian { length: len },
            other => match other.strip_prefix("user_supplied:") {
                Some(name) => Basis::UserSupplied { name: name.to_string() },
                None => return Err(Error::InvalidInput(format!("unknown basis '{other}'"))),
            },
        };
        let k = parse_usize(h[2], "K")?;
        let mut coeffs = Vec::with_capacity(k);
        for (line, cols) in data_rows(text) {
            if cols.len() != 2 || parse_usize(cols[0], "k")? != coeffs.len() + 1 {
                return Err(Error::InvalidInput(format!("line {line}: expected 'k,coeff' in order")));
            }
            coeffs.push(parse_f64(cols[1], "coeff")?);
        }
        if coeffs.len() != k {
            return Err(Error::InvalidInput(format!("expected {k} rows, got {}", coeffs.len())));
        }
        SpectralCoefficients::new(basis, coeffs)
    }
}

impl SpaceTimeField {
    /// Uniform time grids only carry `T` and `N` in the header; on other grids
    /// the `t` column is authoritative.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# L={} M={} T={} N={}\n",
            fmt_f64(self.length),
            self.m,
            fmt_f64(self.time.t_end()),
            self.time.n()
        );
        let nodes = self.time.nodes();
        for i in 0..=self.m {
            let x = fmt_f64(self.x(i));
            for (n, t) in nodes.iter().enumerate() {
                let _ = writeln!(s, "{},{},{}", x, fmt_f64(*t), fmt_f64(self.get(i, n)));
            }
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let h = parse_header(text.lines().next(), &["L", "M", "T", "N"])?;
        let length = parse_f64(h[0], "L")?;
        let m = parse_usize(h[1], "M")?;
        let t_end = parse_f64(h[2], "T")?;
        let n = parse_usize(h[3], "N")?;
        let mut times = Vec::with_capacity(n + 1);
        let mut values = Vec::with_capacity((m + 1) * (n + 1));
        for (line, cols) in data_rows(text) {
            if cols.len() != 3 {
                return Err(Error::InvalidInput(format!("line {line}: expected 'x,t,value'")));
            }
            let idx = values.len();
            let (i, j) = (idx / (n + 1), idx % (n + 1));
            let x = parse_f64(cols[0], "x")?;
            check_close(x, length * i as f64 / m as f64, length, line)?;
            let t = parse_f64(cols[1], "t")?;
            if i == 0 {
                times.push(t);
            } else if t != times[j] {
                return Err(Error::InvalidInput(format!("line {line}: time column differs between rows")));
            }
            values.push(parse_f64(cols[2], "value")?);
        }
        if values.len() != (m + 1) * (n + 1) {
            return Err(Error::InvalidInput(format!(
                "expected {} rows, got {}",
                (m + 1) * (n + 1),
                values.len()
            )));
        }
        if times[n] != t_end {
            return Err(Error::InvalidInput("last time node differs from T".into()));
        }
        SpaceTimeField::new(length, m, TimeGrid::from_nodes(times)?, values)
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_function_round_trip() {
        let u = GridFunction::from_fn(0.7, 33, |t| (3.1 * t).exp() / 7.0).unwrap();
        assert_eq!(GridFunction::from_csv(&u.to_csv()).unwrap(), u);
    }

    #[test]
    fn coefficient_round_trip() {
        for basis in [
            Basis::ASine { domain_length: 1.5 },
            Basis::DirichletLaplacian { length: 0.3 },
            Basis::UserSupplied { name: "sl".into() },
        ] {
            let c = SpectralCoefficients::new(basis, vec![0.1, -1.0 / 3.0, 1e-300]).unwrap();
            let back = SpectralCoefficients::from_csv(&c.to_csv()).unwrap();
            assert_eq!(back.coeffs, c.coeffs);
            assert_eq!(back.basis.name(), c.basis.name());
        }
    }

    #[test]
    fn field_round_trip_graded() {
        let time = TimeGrid::graded(2.0, 7, 2.0).unwrap();
        let f = SpaceTimeField::from_fn(1.3, 5, time, |x, t| (x * t).sin() / 3.0).unwrap();
        assert_eq!(SpaceTimeField::from_csv(&f.to_csv()).unwrap(), f);
    }

    #[test]
    fn rejects_bad_header() {
        assert!(GridFunction::from_csv("domain_length=1 n_intervals=2\n").is_err());
        assert!(GridFunction::from_csv("# n_intervals=2 domain_length=1\n").is_err());
        assert!(GridFunction::from_csv("# domain_length=1 n_intervals=2\n0,1\n0.5,2\n").is_err());
    }
}
