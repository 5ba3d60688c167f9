//! Sweep axes given on the command line.
//!
//! Accepted forms: `0.1,0.2,0.5`, `linspace:a:b:n` (n evenly spaced values,
//! ends included) and `logspace:a:b:n` (n values evenly spaced in `log₁₀`
//! between `a` and `b`, ends included).

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct GridError(pub String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GridError {}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub name: String,
    pub values: Vec<f64>,
}

fn number(name: &str, token: &str) -> Result<f64, GridError> {
    let x: f64 = token
        .trim()
        .parse()
        .map_err(|_| GridError(format!("{name}: not a number: {token:?}")))?;
    if !x.is_finite() {
        return Err(GridError(format!(
            "{name}: value must be finite: {token:?}"
        )));
    }
    Ok(x)
}

impl SweepGrid {
    pub fn parse(name: &str, spec: &str) -> Result<Self, GridError> {
        let spec = spec.trim();
        let values = if let Some(rest) = spec.strip_prefix("linspace:") {
            let (a, b, n) = range_parts(name, rest)?;
            spaced(a, b, n)
        } else if let Some(rest) = spec.strip_prefix("logspace:") {
            let (a, b, n) = range_parts(name, rest)?;
            if a <= 0.0 || b <= 0.0 {
                return Err(GridError(format!("{name}: logspace ends must be positive")));
            }
            spaced(a.log10(), b.log10(), n)
                .into_iter()
                .map(|e| 10f64.powf(e))
                .collect()
        } else {
            spec.split(',')
                .map(|t| number(name, t))
                .collect::<Result<Vec<_>, _>>()?
        };
        if values.is_empty() {
            return Err(GridError(format!("{name}: grid is empty")));
        }
        Ok(Self {
            name: name.to_string(),
            values,
        })
    }

    /// Checks every value against `accept`, naming the first offender.
    pub fn require(self, what: &str, accept: impl Fn(f64) -> bool) -> Result<Self, GridError> {
        match self.values.iter().find(|&&v| !accept(v)) {
            Some(bad) => Err(GridError(format!("{}: {bad} is not {what}", self.name))),
            None => Ok(self),
        }
    }

    /// Values rounded to the nearest integer; each must be at least `min`.
    pub fn integers(&self, min: u64) -> Result<Vec<u64>, GridError> {
        self.values
            .iter()
            .map(|&v| {
                let r = v.round();
                if r < min as f64 || r > u64::MAX as f64 {
                    Err(GridError(format!(
                        "{}: {v} is not an integer >= {min}",
                        self.name
                    )))
                } else {
                    Ok(r as u64)
                }
            })
            .collect()
    }
}

fn range_parts(name: &str, rest: &str) -> Result<(f64, f64, usize), GridError> {
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(GridError(format!(
            "{name}: expected start:stop:count, got {rest:?}"
        )));
    }
    let count: usize = parts[2].trim().parse().map_err(|_| {
        GridError(format!(
            "{name}: count must be a positive integer, got {:?}",
            parts[2]
        ))
    })?;
    if count == 0 {
        return Err(GridError(format!("{name}: count must be positive")));
    }
    Ok((number(name, parts[0])?, number(name, parts[1])?, count))
}

fn spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}
