//! Integer-valued radius laws.
//!
//! Every law is described by its survival function `G(j) = P(rho >= j)` in
//! closed form, so tail functionals and moment conditions are known exactly
//! rather than estimated.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistError {
    #[error("malformed distribution spec near `{token}`: {reason}")]
    Parse { token: String, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tail functionals are undefined for a truncated law (the cap masks the base tail)")]
    TruncatedLaw,
}

/// A radius law on the nonnegative integers.
#[derive(Debug, Clone, PartialEq)]
pub enum TailDistribution {
    /// `G(j) = min(1, alpha / j)` for `j >= 1`.
    ParetoTail { alpha: f64 },
    /// `G(j) = min(1, j^-beta)` for `j >= 1`.
    PowerTail { beta: f64 },
    /// `G(j) = q^j`.
    Geometric { q: f64 },
    /// Point mass at `r`.
    Constant { r: u64 },
    /// The base law with all mass above `cap` moved onto `cap`.
    Truncated { base: Box<TailDistribution>, cap: u64 },
}

/// A nonnegative value that may be `+inf`. Ordering is total.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }

    /// `1 / self`, with `1/0 = +inf` and `1/inf = 0`.
    pub fn recip(self) -> ExtendedReal {
        match self {
            ExtendedReal::Infinity => ExtendedReal::Finite(0.0),
            ExtendedReal::Finite(v) if v == 0.0 => ExtendedReal::Infinity,
            ExtendedReal::Finite(v) => ExtendedReal::Finite(1.0 / v),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinity => f.write_str("inf"),
        }
    }
}

/// `liminf_j j G(j)` and `limsup_j j G(j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFunctionals {
    pub liminf_jg: ExtendedReal,
    pub limsup_jg: ExtendedReal,
}

impl TailDistribution {
    pub fn pareto(alpha: f64) -> Result<Self, DistError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(DistError::InvalidParameter(format!("pareto alpha must be positive, got {alpha}")));
        }
        Ok(TailDistribution::ParetoTail { alpha })
    }

    pub fn power(beta: f64) -> Result<Self, DistError> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(DistError::InvalidParameter(format!("power beta must be positive, got {beta}")));
        }
        Ok(TailDistribution::PowerTail { beta })
    }

    pub fn geometric(q: f64) -> Result<Self, DistError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(DistError::InvalidParameter(format!("geometric q must lie in (0,1), got {q}")));
        }
        Ok(TailDistribution::Geometric { q })
    }

    pub fn constant(r: u64) -> Self {
        TailDistribution::Constant { r }
    }

    pub fn truncated(base: TailDistribution, cap: u64) -> Self {
        TailDistribution::Truncated { base: Box::new(base), cap }
    }

    /// Survival function `G(j) = P(rho >= j)`.
    pub fn tail(&self, j: u64) -> f64 {
        if j == 0 {
            return 1.0;
        }
        match self {
            TailDistribution::ParetoTail { alpha } => (alpha / j as f64).min(1.0),
            TailDistribution::PowerTail { beta } => (j as f64).powf(-beta).min(1.0),
            TailDistribution::Geometric { q } => q.powf(j as f64),
            TailDistribution::Constant { r } => {
                if j <= *r {
                    1.0
                } else {
                    0.0
                }
            }
            TailDistribution::Truncated { base, cap } => {
                if j <= *cap {
                    base.tail(j)
                } else {
                    0.0
                }
            }
        }
    }

    /// `g_p(j) = 1 - p G(j)`: the chance that a candidate source at
    /// displacement `j` fails to reach its target.
    pub fn survival_complement(&self, p: f64, j: u64) -> f64 {
        1.0 - p * self.tail(j)
    }

    /// Largest `j` with `G(j) > 0`, if the support is bounded.
    pub fn support_bound(&self) -> Option<u64> {
        match self {
            TailDistribution::Constant { r } => Some(*r),
            TailDistribution::Truncated { base, cap } => Some(base.support_bound().map_or(*cap, |b| b.min(*cap))),
            _ => None,
        }
    }

    /// `P(rho = j)`.
    pub fn mass(&self, j: u64) -> f64 {
        self.tail(j) - self.tail(j + 1)
    }

    /// Inverse-transform draw: the unique `j` with `G(j+1) <= u < G(j)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.sample(Open01);
        self.quantile(u)
    }

    /// Largest `j` with `G(j) > u`, for `u` in `(0, 1)`.
    pub fn quantile(&self, u: f64) -> u64 {
        let j = match self {
            // alpha / j > u  <=>  j < alpha / u
            TailDistribution::ParetoTail { alpha } => ceil_minus_one(alpha / u),
            // j^-beta > u  <=>  j < u^(-1/beta)
            TailDistribution::PowerTail { beta } => ceil_minus_one(u.powf(-1.0 / beta)),
            // q^j > u  <=>  j < ln u / ln q
            TailDistribution::Geometric { q } => ceil_minus_one(u.ln() / q.ln()),
            TailDistribution::Constant { r } => return *r,
            TailDistribution::Truncated { base, cap } => return base.quantile(u).min(*cap),
        };
        // The closed forms can land one step off at exact boundaries.
        if j > 0 && self.tail(j) <= u {
            j - 1
        } else if j < u64::MAX && self.tail(j + 1) > u {
            j + 1
        } else {
            j
        }
    }

    pub fn tail_functionals(&self) -> Result<TailFunctionals, DistError> {
        let both = |v: ExtendedReal| TailFunctionals { liminf_jg: v, limsup_jg: v };
        Ok(match self {
            TailDistribution::ParetoTail { alpha } => both(ExtendedReal::Finite(*alpha)),
            TailDistribution::PowerTail { beta } => {
                if *beta < 1.0 {
                    both(ExtendedReal::Infinity)
                } else if *beta == 1.0 {
                    both(ExtendedReal::Finite(1.0))
                } else {
                    both(ExtendedReal::Finite(0.0))
                }
            }
            TailDistribution::Geometric { .. } | TailDistribution::Constant { .. } => both(ExtendedReal::Finite(0.0)),
            TailDistribution::Truncated { .. } => return Err(DistError::TruncatedLaw),
        })
    }

    /// Whether `E[rho^d] < inf`.
    pub fn moment_finite(&self, d: u32) -> bool {
        match self {
            TailDistribution::PowerTail { beta } => *beta > d as f64,
            TailDistribution::ParetoTail { .. } => d < 1,
            TailDistribution::Geometric { .. } | TailDistribution::Constant { .. } | TailDistribution::Truncated { .. } => true,
        }
    }
}

fn ceil_minus_one(x: f64) -> u64 {
    // `as` saturates; an infinite bound maps to u64::MAX.
    let c = x.ceil();
    if c <= 1.0 {
        0
    } else {
        (c as u64).saturating_sub(1)
    }
}

impl fmt::Display for TailDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailDistribution::ParetoTail { alpha } => write!(f, "pareto:alpha={alpha}"),
            TailDistribution::PowerTail { beta } => write!(f, "power:beta={beta}"),
            TailDistribution::Geometric { q } => write!(f, "geom:q={q}"),
            TailDistribution::Constant { r } => write!(f, "const:r={r}"),
            TailDistribution::Truncated { base, cap } => write!(f, "trunc:{base}:cap={cap}"),
        }
    }
}

pub(crate) fn parse_err(token: &str, reason: impl Into<String>) -> DistError {
    DistError::Parse { token: token.to_string(), reason: reason.into() }
}

/// Parses `key=value` and checks the key.
fn keyed<'a>(token: &'a str, key: &str) -> Result<&'a str, DistError> {
    match token.split_once('=') {
        Some((k, v)) if k == key => Ok(v),
        _ => Err(parse_err(token, format!("expected `{key}=<value>`"))),
    }
}

pub(crate) fn float_param(token: &str, key: &str) -> Result<f64, DistError> {
    let v = keyed(token, key)?;
    v.parse::<f64>().map_err(|_| parse_err(token, "not a number"))
}

fn int_param(token: &str, key: &str) -> Result<u64, DistError> {
    let v = keyed(token, key)?;
    v.parse::<u64>().map_err(|_| parse_err(token, "not a nonnegative integer"))
}

impl FromStr for TailDistribution {
    type Err = DistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("trunc:") {
            let (base, cap) = rest.rsplit_once(':').ok_or_else(|| parse_err(s, "expected `trunc:<spec>:cap=<int>`"))?;
            let cap = int_param(cap, "cap")?;
            return Ok(TailDistribution::truncated(base.parse()?, cap));
        }
        let (family, param) = s.split_once(':').ok_or_else(|| parse_err(s, "expected `<family>:<param>=<value>`"))?;
        let wrap = |e: DistError| match e {
            DistError::InvalidParameter(reason) => parse_err(param, reason),
            other => other,
        };
        match family {
            "pareto" => TailDistribution::pareto(float_param(param, "alpha")?).map_err(wrap),
            "power" => TailDistribution::power(float_param(param, "beta")?).map_err(wrap),
            "geom" => TailDistribution::geometric(float_param(param, "q")?).map_err(wrap),
            "const" => Ok(TailDistribution::constant(int_param(param, "r")?)),
            other => Err(parse_err(other, "unknown family (expected pareto, power, geom, const or trunc)")),
        }
    }
}

impl Serialize for TailDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TailDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
