//! Plumbing shared by the `halo` binary and its tests: slope specs, list
//! parsing and the exactness tags attached to JSON output.

use std::str::FromStr;

use serde_json::{Map, Value};

use crate::numeric::{cf_expand, well_approximated_cf, ContinuedFraction, DigitRule, Magnitude, QuadraticNumber};
use crate::{Error, Result};

/// One way of naming a slope.
#[derive(Clone, Debug, PartialEq)]
pub enum SlopeSpec {
    /// `p/q`, `sqrt2`, `golden`, `(a+b√D)/c`.
    Quadratic(QuadraticNumber),
    /// Finite continued fraction `cf:c0,c1,…` or `[c0;c1,…]`.
    Digits(Vec<u64>),
    /// Rule-generated digits: `paper`, `desk`, `exp:P`, `const:C`.
    Rule(DigitRule),
}

pub fn parse_rule(s: &str) -> Option<Result<DigitRule>> {
    let bad = |v: &str| Error::Parse { line: None, msg: format!("bad rule argument {v:?}") };
    Some(match s {
        "paper" => Ok(DigitRule::Paper),
        "desk" => Ok(DigitRule::Desk),
        _ => match s.split_once(':')? {
            ("exp", p) => p.parse().map(DigitRule::ExpPower).map_err(|_| bad(p)),
            ("const", c) => c.parse().map(DigitRule::Constant).map_err(|_| bad(c)),
            _ => return None,
        },
    })
}

impl FromStr for SlopeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(r) = parse_rule(s) {
            return r.map(SlopeSpec::Rule);
        }
        let digits = s
            .strip_prefix("cf:")
            .map(str::to_owned)
            .or_else(|| s.strip_prefix('[').and_then(|t| t.strip_suffix(']')).map(|t| t.replace(';', ",")));
        if let Some(d) = digits {
            let v = parse_list::<u64>(&d)?;
            if v.is_empty() {
                return Err(Error::Parse { line: None, msg: "empty digit list".into() });
            }
            return Ok(SlopeSpec::Digits(v));
        }
        s.parse::<QuadraticNumber>()
            .map(SlopeSpec::Quadratic)
            .map_err(|_| Error::Parse { line: None, msg: format!("unknown slope spec {s:?}") })
    }
}

impl SlopeSpec {
    /// The slope as an exact number; rule-generated slopes have none.
    pub fn quadratic(&self) -> Result<QuadraticNumber> {
        match self {
            SlopeSpec::Quadratic(q) => Ok(q.clone()),
            SlopeSpec::Digits(d) => Ok(QuadraticNumber::rational(ContinuedFraction::from_digits(d)?.value()?)),
            SlopeSpec::Rule(r) => {
                Err(Error::Precondition(format!("rule {r:?} names a transcendental slope; give an exact one")))
            }
        }
    }

    pub fn continued_fraction(&self) -> Result<ContinuedFraction> {
        match self {
            SlopeSpec::Quadratic(q) => cf_expand(q),
            SlopeSpec::Digits(d) => ContinuedFraction::from_digits(d),
            SlopeSpec::Rule(r) => Ok(well_approximated_cf(*r)),
        }
    }
}

/// Comma-separated values.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse { line: None, msg: format!("bad list item {t:?}") }))
        .collect()
}

/// `a..b` (inclusive) with an optional `:step`, or a plain list.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let Some((a, rest)) = s.split_once("..") else { return parse_list(s) };
    let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
    let bad = || Error::Parse { line: None, msg: format!("bad range {s:?}") };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    let step: usize = step.trim().parse().map_err(|_| bad())?;
    if step == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).step_by(step).collect())
}

/// JSON for a convergent magnitude: an exact integer string or log bounds.
pub fn magnitude_json(m: &Magnitude) -> Value {
    match m.exact() {
        Some(n) => Value::String(n.to_string()),
        None => serde_json::to_value(m.bounds()).expect("magnitude serializes"),
    }
}

fn is_log_magnitude(m: &Map<String, Value>) -> bool {
    m.contains_key("ln_lower") && m.contains_key("ln_upper")
}

fn is_exact_string(s: &str) -> bool {
    let t = s.trim_start_matches('-');
    let rational = |x: &str| {
        let (p, q) = x.split_once('/').unwrap_or((x, "1"));
        !p.is_empty() && !q.is_empty() && p.bytes().all(|b| b.is_ascii_digit()) && q.bytes().all(|b| b.is_ascii_digit())
    };
    rational(t) || (s.contains('√') && s.chars().all(|c| c.is_ascii_digit() || "()+-/√".contains(c)))
}

fn tag_of(v: &Value, tol: &str) -> Option<String> {
    match v {
        Value::Number(n) if n.is_f64() => Some(format!("float±{tol}")),
        Value::Number(_) => Some("exact".into()),
        Value::String(s) if is_exact_string(s) => Some("exact".into()),
        Value::Object(m) if is_log_magnitude(m) => Some("log-domain".into()),
        Value::Array(a) if !a.is_empty() => {
            let tags: Vec<String> = a.iter().map(|x| tag_of(x, tol)).collect::<Option<_>>()?;
            // the weakest tag wins
            ["log-domain", &format!("float±{tol}"), "exact"]
                .iter()
                .find(|t| tags.iter().any(|x| x == *t))
                .map(|t| t.to_string())
        }
        _ => None,
    }
}

/// Adds a sibling `"<key>_exactness"` to every object field holding a
/// number, an exact numeric string, log-domain bounds, or an array of
/// those. A bare numeric top level is wrapped as `{"value", "exactness"}`.
pub fn tag_exactness(v: Value, tol: f64) -> Value {
    let tol = format!("{tol:e}");
    match tag_of(&v, &tol) {
        Some(t) if !v.is_object() => {
            let mut m = Map::new();
            m.insert("value".into(), v);
            m.insert("exactness".into(), Value::String(t));
            Value::Object(m)
        }
        _ => walk(v, &tol),
    }
}

fn walk(v: Value, tol: &str) -> Value {
    match v {
        Value::Object(m) if is_log_magnitude(&m) => Value::Object(m),
        Value::Object(m) => {
            let mut out = Map::new();
            for (k, x) in m {
                let tag = if k.ends_with("_exactness") { None } else { tag_of(&x, tol) };
                out.insert(k.clone(), walk(x, tol));
                if let Some(t) = tag {
                    out.insert(format!("{k}_exactness"), Value::String(t));
                }
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(|x| walk(x, tol)).collect()),
        x => x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn slope_specs() {
        assert_eq!("5/3".parse::<SlopeSpec>().unwrap().quadratic().unwrap(), QuadraticNumber::from_ratio(5, 3));
        assert_eq!("cf:1,1,2".parse::<SlopeSpec>().unwrap().quadratic().unwrap(), QuadraticNumber::from_ratio(5, 3));
        assert_eq!("[1;1,2]".parse::<SlopeSpec>().unwrap(), SlopeSpec::Digits(vec![1, 1, 2]));
        assert_eq!("sqrt2".parse::<SlopeSpec>().unwrap().quadratic().unwrap(), QuadraticNumber::sqrt(2));
        assert_eq!("(1+√5)/2".parse::<SlopeSpec>().unwrap().quadratic().unwrap(), QuadraticNumber::golden());
        assert_eq!("exp:1.5".parse::<SlopeSpec>().unwrap(), SlopeSpec::Rule(DigitRule::ExpPower(1.5)));
        assert!("paper".parse::<SlopeSpec>().unwrap().quadratic().is_err());
        assert!(matches!("banana".parse::<SlopeSpec>(), Err(Error::Parse { .. })));
        assert!("cf:".parse::<SlopeSpec>().is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..8:2").unwrap(), vec![2, 4, 6, 8]);
        assert_eq!(parse_range("3,5").unwrap(), vec![3, 5]);
        assert!(parse_range("5..2").is_err());
    }

    #[test]
    fn tags() {
        let v = tag_exactness(
            json!({"n": 1, "x": 0.5, "p": "7/3", "m": {"ln_lower": 1.0, "ln_upper": 2.0},
                   "blocks": [2, 2], "mixed": [1, 0.5], "name": "desk", "inner": [{"q": 3}]}),
            1e-12,
        );
        assert_eq!(v["n_exactness"], "exact");
        assert_eq!(v["x_exactness"], "float±1e-12");
        assert_eq!(v["p_exactness"], "exact");
        assert_eq!(v["m_exactness"], "log-domain");
        assert!(v["m"].get("ln_lower_exactness").is_none());
        assert_eq!(v["blocks_exactness"], "exact");
        assert_eq!(v["mixed_exactness"], "float±1e-12");
        assert!(v.get("name_exactness").is_none());
        assert_eq!(v["inner"][0]["q_exactness"], "exact");
        assert_eq!(tag_exactness(json!(3), 1e-9), json!({"value": 3, "exactness": "exact"}));
    }
}
