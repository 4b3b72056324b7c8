//! Weight-sequence families and the problem instance they define.
//!
//! A problem instance is a global parameter `omega` in (0,1) together with
//! two sequences: `a`, which must be positive and non-decreasing, and `b`,
//! which must have a strictly positive infimum. Both are drawn from a small
//! parametric grammar so that tail behavior is known in closed form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A parametric sequence family, evaluated at integer indices `k >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SequenceFamily {
    /// `c` for all k.
    Constant { c: f64 },
    /// `c * k^p`.
    Power { c: f64, p: f64 },
    /// `c * ln(k+1)^p`.
    LogPower { c: f64, p: f64 },
    /// `c * e^{gamma k}`.
    Exponential { c: f64, gamma: f64 },
    /// A finite positive list; indices past the end repeat the last value.
    ExplicitList { values: Vec<f64> },
}

impl SequenceFamily {
    /// Checks the constraints that apply to the family regardless of role.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match self {
            SequenceFamily::Constant { c } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return bad(format!("constant family requires c > 0, got {c}"));
                }
            }
            SequenceFamily::Power { c, p } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return bad(format!("power family requires c > 0, got {c}"));
                }
                if !p.is_finite() {
                    return bad(format!("power family exponent must be finite, got {p}"));
                }
            }
            SequenceFamily::LogPower { c, p } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return bad(format!("log-power family requires c > 0, got {c}"));
                }
                if !(*p >= 0.0 && p.is_finite()) {
                    return bad(format!("log-power family requires p >= 0, got {p}"));
                }
            }
            SequenceFamily::Exponential { c, gamma } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return bad(format!("exponential family requires c > 0, got {c}"));
                }
                if !(*gamma > 0.0 && gamma.is_finite()) {
                    return bad(format!("exponential family requires gamma > 0, got {gamma}"));
                }
            }
            SequenceFamily::ExplicitList { values } => {
                if values.is_empty() {
                    return bad("explicit list must be nonempty".into());
                }
                for (i, v) in values.iter().enumerate() {
                    if !(*v > 0.0 && v.is_finite()) {
                        return bad(format!("explicit list value at k={} must be > 0, got {v}", i + 1));
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluates the k-th term, k >= 1.
    pub fn eval(&self, k: u64) -> f64 {
        debug_assert!(k >= 1);
        match self {
            SequenceFamily::Constant { c } => *c,
            SequenceFamily::Power { c, p } => c * (k as f64).powf(*p),
            SequenceFamily::LogPower { c, p } => c * ((k + 1) as f64).ln().powf(*p),
            SequenceFamily::Exponential { c, gamma } => c * (gamma * k as f64).exp(),
            SequenceFamily::ExplicitList { values } => {
                let i = (k as usize - 1).min(values.len() - 1);
                values[i]
            }
        }
    }

    /// Returns the index of the first k >= 2 with term(k) < term(k-1), if the
    /// family is not non-decreasing. Closed forms are decided symbolically;
    /// explicit lists are checked termwise.
    pub fn first_decrease(&self) -> Option<u64> {
        match self {
            SequenceFamily::Constant { .. } => None,
            SequenceFamily::Power { p, .. } => {
                if *p >= 0.0 {
                    None
                } else {
                    Some(2)
                }
            }
            // p >= 0 is enforced by `check`, so log-power is non-decreasing.
            SequenceFamily::LogPower { .. } => None,
            SequenceFamily::Exponential { .. } => None,
            SequenceFamily::ExplicitList { values } => {
                for i in 1..values.len() {
                    if values[i] < values[i - 1] {
                        return Some(i as u64 + 1);
                    }
                }
                None
            }
        }
    }

    /// The infimum over k >= 1, per kind. Returns 0 for families whose terms
    /// approach 0 (these are rejected in the b role).
    pub fn infimum(&self) -> f64 {
        match self {
            SequenceFamily::Constant { c } => *c,
            SequenceFamily::Power { c, p } => {
                if *p >= 0.0 {
                    *c
                } else {
                    0.0
                }
            }
            SequenceFamily::LogPower { c, p } => c * 2f64.ln().powf(*p),
            SequenceFamily::Exponential { c, gamma } => c * gamma.exp(),
            SequenceFamily::ExplicitList { values } => {
                values.iter().copied().fold(f64::INFINITY, f64::min)
            }
        }
    }
}

impl fmt::Display for SequenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceFamily::Constant { c } => write!(f, "const:c={c}"),
            SequenceFamily::Power { c, p } => write!(f, "power:c={c},p={p}"),
            SequenceFamily::LogPower { c, p } => write!(f, "logpower:c={c},p={p}"),
            SequenceFamily::Exponential { c, gamma } => write!(f, "exp:c={c},gamma={gamma}"),
            SequenceFamily::ExplicitList { values } => {
                write!(f, "list:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_params(body: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for item in body.split(',') {
        let (key, value) = item.split_once('=').ok_or_else(|| {
            Error::InvalidSpec(format!("family parameter `{item}` is not key=value"))
        })?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("family parameter `{value}` is not a real")))?;
        out.push((key.trim().to_string(), v));
    }
    Ok(out)
}

fn lookup(params: &[(String, f64)], key: &str, family: &str) -> Result<f64> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::InvalidSpec(format!("{family} family is missing parameter `{key}`")))
}

impl FromStr for SequenceFamily {
    type Err = Error;

    /// Parses the text grammar:
    /// `const:c=<r>`, `power:c=<r>,p=<r>`, `logpower:c=<r>,p=<r>`,
    /// `exp:c=<r>,gamma=<r>`, `list:<v1>,<v2>,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidSpec(format!("family `{s}` is missing `kind:`")))?;
        let family = match kind.trim() {
            "const" => {
                let params = parse_params(body)?;
                SequenceFamily::Constant { c: lookup(&params, "c", "const")? }
            }
            "power" => {
                let params = parse_params(body)?;
                SequenceFamily::Power {
                    c: lookup(&params, "c", "power")?,
                    p: lookup(&params, "p", "power")?,
                }
            }
            "logpower" => {
                let params = parse_params(body)?;
                SequenceFamily::LogPower {
                    c: lookup(&params, "c", "logpower")?,
                    p: lookup(&params, "p", "logpower")?,
                }
            }
            "exp" => {
                let params = parse_params(body)?;
                SequenceFamily::Exponential {
                    c: lookup(&params, "c", "exp")?,
                    gamma: lookup(&params, "gamma", "exp")?,
                }
            }
            "list" => {
                let values: Result<Vec<f64>> = body
                    .split(',')
                    .map(|v| {
                        v.trim().parse::<f64>().map_err(|_| {
                            Error::InvalidSpec(format!("list value `{v}` is not a real"))
                        })
                    })
                    .collect();
                SequenceFamily::ExplicitList { values: values? }
            }
            other => {
                return Err(Error::InvalidSpec(format!("unknown family kind `{other}`")));
            }
        };
        family.check()?;
        Ok(family)
    }
}

/// A validated problem instance: `omega` in (0,1), a non-decreasing positive
/// sequence `a`, and a positive sequence `b` with positive infimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    omega: f64,
    a: SequenceFamily,
    b: SequenceFamily,
}

impl WeightSpec {
    pub fn new(omega: f64, a: SequenceFamily, b: SequenceFamily) -> Result<Self> {
        if !(omega > 0.0 && omega < 1.0) {
            return Err(Error::InvalidSpec(format!("omega not in (0,1): got {omega}")));
        }
        a.check()?;
        b.check()?;
        if let Some(k) = a.first_decrease() {
            return Err(Error::InvalidSpec(format!("a not non-decreasing at k={k}")));
        }
        if !(b.infimum() > 0.0) {
            return Err(Error::InvalidSpec(
                "b does not have a positive infimum".to_string(),
            ));
        }
        Ok(WeightSpec { omega, a, b })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// ln(1/omega) > 0; the unit of the log-domain exponent scale.
    pub fn log_inv_omega(&self) -> f64 {
        -self.omega.ln()
    }

    pub fn a_family(&self) -> &SequenceFamily {
        &self.a
    }

    pub fn b_family(&self) -> &SequenceFamily {
        &self.b
    }

    /// a_k, k >= 1.
    pub fn eval_a(&self, k: u64) -> f64 {
        self.a.eval(k)
    }

    /// b_k, k >= 1.
    pub fn eval_b(&self, k: u64) -> f64 {
        self.b.eval(k)
    }

    /// The positive infimum of the b sequence.
    pub fn b_star(&self) -> f64 {
        self.b.infimum()
    }

    /// Re-confirms the instance constraints, checking monotonicity of `a`
    /// numerically on k = 1..=max_k. Construction already enforces these;
    /// this exists so loaders can report a named constraint with an index.
    pub fn validate(&self, max_k: u64) -> Result<()> {
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(Error::InvalidSpec(format!("omega not in (0,1): got {}", self.omega)));
        }
        let mut prev = self.eval_a(1);
        if !(prev > 0.0) {
            return Err(Error::InvalidSpec("a not positive at k=1".to_string()));
        }
        for k in 2..=max_k {
            let cur = self.eval_a(k);
            if cur < prev {
                return Err(Error::InvalidSpec(format!("a not non-decreasing at k={k}")));
            }
            prev = cur;
        }
        if !(self.b_star() > 0.0) {
            return Err(Error::InvalidSpec("b does not have a positive infimum".to_string()));
        }
        Ok(())
    }
}
