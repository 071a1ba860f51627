//! JSON forms of access structures, distributions, schemes and reports.
//!
//! Integers below 2^53 in magnitude are JSON numbers and larger ones decimal
//! strings; probabilities are lowest-terms `"num/den"` strings; floats carry
//! 12 significant digits and non-finite floats are `null`.

use serde_json::{json, Map, Value};

use crate::access::{lex_cmp, AccessStructure, Subset};
use crate::audit::{AuditReport, GroupEval, Method};
use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::scheme::Scheme;
use crate::transform::ConditionalDescriptor;

const SAFE_INT: u128 = 1 << 53;

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn int_value(x: i64) -> Value {
    if (x.unsigned_abs() as u128) < SAFE_INT {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

pub fn uint_value(x: u128) -> Value {
    if x < SAFE_INT {
        json!(x as u64)
    } else {
        json!(x.to_string())
    }
}

fn parse_int(v: &Value) -> Result<i64> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .ok_or_else(|| fmt_err(format!("{n} is not an integer"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| fmt_err(format!("`{s}` is not an integer"))),
        _ => Err(fmt_err("expected an integer")),
    }
}

/// `x` rounded to 12 significant digits.
pub fn float_value(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
    json!(rounded)
}

fn subset_value(s: Subset) -> Value {
    Value::Array(s.members().into_iter().map(|p| json!(p)).collect())
}

fn get<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| fmt_err(format!("missing field `{key}`")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| fmt_err(format!("`{what}` must be an array")))
}

pub fn access_to_json(g: &AccessStructure) -> Value {
    let mut sets = g.minimal_sets().to_vec();
    sets.sort_by(|a, b| lex_cmp(*a, *b));
    json!({
        "n": g.n_participants(),
        "minimal": sets.into_iter().map(subset_value).collect::<Vec<_>>(),
    })
}

pub fn access_from_json(v: &Value) -> Result<AccessStructure> {
    let n = get(v, "n")?
        .as_u64()
        .ok_or_else(|| fmt_err("`n` must be a non-negative integer"))? as usize;
    let sets = array(get(v, "minimal")?, "minimal")?
        .iter()
        .map(|s| {
            array(s, "minimal set")?
                .iter()
                .map(|p| {
                    p.as_u64()
                        .filter(|&p| p >= 1)
                        .map(|p| p as usize)
                        .ok_or_else(|| fmt_err("participants are positive integers"))
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    AccessStructure::from_minimal(n, &sets)
}

fn dist_fields(d: &JointDistribution, obj: &mut Map<String, Value>) {
    obj.insert("vars".into(), json!(d.names()));
    let atoms: Vec<Value> = (0..d.len())
        .map(|i| {
            let (num, den) = d.probability(i);
            json!({
                "v": d.atom(i).iter().map(|&x| int_value(x)).collect::<Vec<_>>(),
                "p": format!("{num}/{den}"),
            })
        })
        .collect();
    obj.insert("atoms".into(), Value::Array(atoms));
}

pub fn dist_to_json(d: &JointDistribution) -> Value {
    let mut obj = Map::new();
    dist_fields(d, &mut obj);
    Value::Object(obj)
}

fn parse_rational(v: &Value) -> Result<(u128, u128)> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(fmt_err("probability must be a \"num/den\" string")),
    };
    let (num, den) = s.split_once('/').unwrap_or((&s, "1"));
    let parse = |t: &str| {
        t.trim()
            .parse::<u128>()
            .map_err(|_| fmt_err(format!("bad probability `{s}`")))
    };
    let (num, den) = (parse(num)?, parse(den)?);
    if den == 0 {
        return Err(fmt_err(format!("zero denominator in `{s}`")));
    }
    Ok((num, den))
}

pub fn dist_from_json(v: &Value) -> Result<JointDistribution> {
    let names: Vec<String> = array(get(v, "vars")?, "vars")?
        .iter()
        .map(|n| {
            n.as_str()
                .map(str::to_string)
                .ok_or_else(|| fmt_err("variable names are strings"))
        })
        .collect::<Result<_>>()?;
    let atoms = array(get(v, "atoms")?, "atoms")?
        .iter()
        .map(|a| {
            let values = array(get(a, "v")?, "v")?
                .iter()
                .map(parse_int)
                .collect::<Result<Vec<i64>>>()?;
            Ok((values, parse_rational(get(a, "p")?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    JointDistribution::from_rationals(&names, &atoms)
}

pub fn scheme_to_json(s: &Scheme) -> Value {
    let mut obj = Map::new();
    dist_fields(s.dist(), &mut obj);
    obj.insert("secret".into(), json!(s.secret_name()));
    obj.insert("shares".into(), json!(s.share_names()));
    obj.insert("access".into(), access_to_json(s.access()));
    Value::Object(obj)
}

pub fn scheme_from_json(v: &Value) -> Result<Scheme> {
    let dist = dist_from_json(v)?;
    let secret = get(v, "secret")?
        .as_str()
        .ok_or_else(|| fmt_err("`secret` must be a string"))?
        .to_string();
    let shares: Vec<String> = array(get(v, "shares")?, "shares")?
        .iter()
        .map(|n| {
            n.as_str()
                .map(str::to_string)
                .ok_or_else(|| fmt_err("share names are strings"))
        })
        .collect::<Result<_>>()?;
    let access = access_from_json(get(v, "access")?)?;
    Scheme::new(dist, &secret, &shares, access)
}

fn group_eval_value(e: &GroupEval) -> Value {
    json!({
        "group": subset_value(e.group),
        "authorized": e.authorized,
        "missing": float_value(e.missing),
        "leak": float_value(e.leak),
        "determined": e.determined,
        "independent": e.independent,
    })
}

pub fn report_to_json(r: &AuditReport) -> Value {
    let mut v = json!({
        "N": float_value(r.secret_entropy),
        "share_entropies": r.share_entropies.iter().map(|&h| float_value(h)).collect::<Vec<_>>(),
        "S": float_value(r.max_share_entropy),
        "rho": float_value(r.rate),
        "epsilon1": float_value(r.epsilon1),
        "epsilon2": float_value(r.epsilon2),
        "perfect": r.perfect,
        "ideal": r.ideal,
        "worst_authorized": subset_value(r.worst_authorized),
        "worst_forbidden": subset_value(r.worst_forbidden),
        "secret_alphabet": r.secret_alphabet,
        "share_alphabets": r.share_alphabets,
        "method": match r.method {
            Method::Exhaustive => "exhaustive",
            Method::Factorized => "factorized",
        },
    });
    if let Some(detail) = &r.detail {
        v["detail"] = Value::Array(detail.iter().map(group_eval_value).collect());
    }
    v
}

fn join_ints(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

/// `{β value: {α value: codeword}}` with values written as comma-joined integers.
pub fn descriptor_to_json(d: &ConditionalDescriptor) -> Value {
    let book: Map<String, Value> = d
        .codebook()
        .iter()
        .map(|(beta, alphas)| {
            let inner: Map<String, Value> = alphas
                .iter()
                .map(|(a, w)| (join_ints(a), json!(w.to_string())))
                .collect();
            (join_ints(beta), Value::Object(inner))
        })
        .collect();
    Value::Object(book)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{shamir, xor_scheme};
    use crate::field::FieldSpec;

    #[test]
    fn access_form() {
        let g = AccessStructure::from_minimal(4, &[vec![3, 4], vec![1, 2], vec![2, 3]]).unwrap();
        let v = access_to_json(&g);
        assert_eq!(v, json!({"n": 4, "minimal": [[1, 2], [2, 3], [3, 4]]}));
        assert_eq!(access_from_json(&v).unwrap(), g);
    }

    #[test]
    fn distribution_form() {
        let s = xor_scheme(1).unwrap();
        let v = dist_to_json(s.dist());
        assert_eq!(v["vars"], json!(["k", "s1", "s2"]));
        assert_eq!(v["atoms"][0], json!({"v": [0, 0, 0], "p": "1/4"}));
        assert_eq!(&dist_from_json(&v).unwrap(), s.dist());
    }

    #[test]
    fn scheme_round_trip() {
        let s = shamir(2, 3, &FieldSpec::prime(5).unwrap(), None).unwrap();
        let text = serde_json::to_string(&scheme_to_json(&s)).unwrap();
        let back = scheme_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn large_integers_become_strings() {
        assert_eq!(int_value(1 << 53), json!("9007199254740992"));
        assert_eq!(int_value((1 << 53) - 1), json!(9007199254740991i64));
        assert_eq!(
            parse_int(&json!("-9007199254740993")).unwrap(),
            -9007199254740993
        );
    }

    #[test]
    fn floats_rounded() {
        assert_eq!(float_value(1.0 / 3.0), json!(0.333333333333));
        assert_eq!(float_value(f64::INFINITY), Value::Null);
    }
}
