//! Command-line literals and the JSON form of approximating functions.
//!
//! ```text
//! fk[:c=..][:K=..]                    c (KT)^-k
//! power_log:a,b[:c=..][:K=..]         c (KT)^-a (log KT)^-b
//! table:T=v,T=v,...[:c=..][:K=..]     log-log interpolated samples
//! dual:<literal>                      1 / F^-1(1/T)
//! ```

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use super::{dual, ApproxFunction, Family};
use crate::error::{Error, Result};
use crate::numerics::parse::{parse_rational, rational_from_f64_decimal};
use crate::numerics::scalar::rational_to_f64;

fn bad(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

pub fn parse_function(text: &str) -> Result<ApproxFunction> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("dual:") {
        return Ok(dual(&parse_function(rest)?));
    }
    let mut parts = text.split(':');
    let head = parts.next().unwrap_or("");
    if let Some(k) = head.strip_prefix('f') {
        if !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()) {
            let k: i64 = k.parse().map_err(|_| bad(format!("bad exponent in {text:?}")))?;
            if k == 0 {
                return Err(bad("f0 is not decreasing"));
            }
            return apply_scales(ApproxFunction::f_k(k), parts);
        }
    }
    let body = parts
        .next()
        .ok_or_else(|| bad(format!("expected '{head}:<parameters>' in {text:?}")))?;
    let f = match head {
        "power_log" => {
            let ab: Vec<&str> = body.split(',').collect();
            if ab.len() != 2 {
                return Err(bad(format!("power_log needs two parameters a,b, got {body:?}")));
            }
            ApproxFunction::power_log(parse_rational(ab[0])?, parse_rational(ab[1])?)?
        }
        "table" => {
            let mut t = Vec::new();
            let mut v = Vec::new();
            for pair in body.split(',') {
                let (a, b) = pair
                    .split_once('=')
                    .ok_or_else(|| bad(format!("table entry {pair:?} is not T=value")))?;
                t.push(rational_to_f64(&parse_rational(a)?));
                v.push(rational_to_f64(&parse_rational(b)?));
            }
            ApproxFunction::table(t, v)?
        }
        other => return Err(bad(format!("unknown function family {other:?}"))),
    };
    apply_scales(f, parts)
}

/// Trailing `c=..` and `K=..` options.
fn apply_scales<'a>(f: ApproxFunction, parts: impl Iterator<Item = &'a str>) -> Result<ApproxFunction> {
    let mut c = BigRational::one();
    let mut k = BigRational::one();
    for opt in parts {
        let (key, val) = opt
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {opt:?}")))?;
        match key {
            "c" => c = parse_rational(val)?,
            "K" => k = parse_rational(val)?,
            _ => return Err(bad(format!("unknown option {key:?} (expected c or K)"))),
        }
    }
    f.with_scales(c, k)
}

/// Numbers that survive a round trip through `f64` are written as JSON
/// numbers, everything else as `"p/q"` strings.
fn rational_json(r: &BigRational) -> Value {
    if let Some(x) = r.to_f64() {
        if let Ok(back) = rational_from_f64_decimal(x) {
            if &back == r {
                if r.is_integer() {
                    if let Some(i) = r.to_integer().to_i64() {
                        return json!(i);
                    }
                }
                return json!(x);
            }
        }
    }
    json!(r.to_string())
}

fn json_rational(v: &Value, key: &str) -> Result<BigRational> {
    match v.get(key) {
        None => Err(bad(format!("missing field {key:?}"))),
        Some(Value::String(s)) => parse_rational(s),
        Some(Value::Number(n)) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else {
                rational_from_f64_decimal(n.as_f64().unwrap_or(f64::NAN))
            }
        }
        Some(other) => Err(bad(format!("field {key:?} must be a number, got {other}"))),
    }
}

impl ApproxFunction {
    pub fn to_json(&self) -> Value {
        let mut v = match &self.family {
            Family::PowerLog { a, b } => json!({
                "family": "power_log",
                "a": rational_json(a),
                "b": rational_json(b),
            }),
            Family::Table { t, v } => json!({"family": "table", "T": t, "values": v}),
            Family::Dual(f) => json!({"family": "dual", "of": f.to_json()}),
            Family::TildeG { f, lambda, n, m } => json!({
                "family": "kurzweil_tilde",
                "f": f.to_json(),
                "lambda": lambda.to_json(),
                "n": n,
                "m": m,
            }),
        };
        v["c"] = rational_json(&self.c);
        v["K"] = rational_json(&self.k);
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let family = v
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing \"family\""))?;
        let f = match family {
            "power_log" => ApproxFunction::power_log(json_rational(v, "a")?, json_rational(v, "b")?)?,
            "table" => {
                let arr = |k: &str| -> Result<Vec<f64>> {
                    v.get(k)
                        .and_then(Value::as_array)
                        .ok_or_else(|| bad(format!("missing array {k:?}")))?
                        .iter()
                        .map(|x| x.as_f64().ok_or_else(|| bad("table entries must be numbers")))
                        .collect()
                };
                ApproxFunction::table(arr("T")?, arr("values")?)?
            }
            "dual" => {
                let inner = ApproxFunction::from_json(v.get("of").ok_or_else(|| bad("missing \"of\""))?)?;
                ApproxFunction {
                    family: Family::Dual(Box::new(inner)),
                    c: BigRational::one(),
                    k: BigRational::one(),
                }
            }
            "kurzweil_tilde" => {
                let sub = |k: &str| {
                    ApproxFunction::from_json(v.get(k).ok_or_else(|| bad(format!("missing {k:?}")))?)
                };
                let dim = |k: &str| {
                    v.get(k)
                        .and_then(Value::as_u64)
                        .filter(|&x| x >= 1)
                        .map(|x| x as u32)
                        .ok_or_else(|| bad(format!("{k:?} must be a positive integer")))
                };
                super::kurzweil_tilde_g(&sub("f")?, &sub("lambda")?, dim("n")?, dim("m")?)?
            }
            other => return Err(bad(format!("unknown family {other:?}"))),
        };
        let c = if v.get("c").is_some() { json_rational(v, "c")? } else { BigRational::one() };
        let k = if v.get("K").is_some() { json_rational(v, "K")? } else { BigRational::one() };
        f.with_scales(c, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_function("f1").unwrap(), ApproxFunction::f1());
        assert_eq!(parse_function("f2").unwrap(), ApproxFunction::f_k(2));
        assert_eq!(parse_function("f1:c=1/20").unwrap(), ApproxFunction::f1().scaled(BigRational::new(1.into(), 20.into())).unwrap());
        let f = parse_function("power_log:1,0:c=0.01").unwrap();
        assert_eq!(f.c, BigRational::new(1.into(), 100.into()));
        let f = parse_function("power_log:2,1:K=3:c=1/2").unwrap();
        assert_eq!(f.power_log_params().unwrap().0, &BigRational::from_integer(2.into()));
        assert_eq!(f.k, BigRational::from_integer(3.into()));
        assert!(parse_function("table:1=1,10=0.1").is_ok());
        assert!(matches!(parse_function("dual:f1").unwrap().family, Family::PowerLog { .. }));
        assert!(parse_function("power_log:1").is_err());
        assert!(parse_function("power_log:1,2:z=1").is_err());
        assert!(parse_function("power_log:1,0:c=0").is_err());
        assert!(parse_function("gauss:1").is_err());
    }

    #[test]
    fn json_roundtrip() {
        for lit in ["power_log:2,1:c=0.01:K=3", "power_log:1/3,-1/7", "table:1=1,10=0.1,100=0.001", "dual:power_log:2,1"] {
            let f = parse_function(lit).unwrap();
            let j = f.to_json();
            assert_eq!(ApproxFunction::from_json(&j).unwrap(), f, "{lit}: {j}");
        }
        let j = parse_function("power_log:2,1").unwrap().to_json();
        assert_eq!(j["family"], "power_log");
        assert_eq!(j["a"], 2);
        assert_eq!(j["c"], 1);
    }
}
