//! JSON formats.
//!
//! Representation: `{"q": 2, "u": [..], "M": [[[..], ..], ..], "v": [..]}`.
//! Transducer: `{"q": 2, "states": [..] | n, "initial": s, "transitions": [[s, d, t, out], ..],
//! "final": [[s, out], ..]}` where states are names or indices and missing finals are 0.
//! Rationals are `"p/q"` strings, decimal strings or JSON integers.

use std::collections::HashMap;

use serde_json::{json, Value as Json};

use super::linalg::{Matrix, Rational};
use super::{LinearRepresentation, Transducer};
use crate::error::{Error, Result};
use crate::value::{format_rational, parse_rational};

fn field<'a>(obj: &'a Json, key: &str) -> Result<&'a Json> {
    obj.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn as_array<'a>(x: &'a Json, what: &str) -> Result<&'a Vec<Json>> {
    x.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn as_u32(x: &Json, what: &str) -> Result<u32> {
    x.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| Error::Parse(format!("{what} must be a small nonnegative integer")))
}

pub fn rational_from_json(x: &Json) -> Result<Rational> {
    match x {
        Json::String(s) => parse_rational(s),
        Json::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else {
                parse_rational(&n.to_string())
            }
        }
        other => Err(Error::Parse(format!("expected a rational, found {other}"))),
    }
}

fn vector_from_json(x: &Json, what: &str) -> Result<Vec<Rational>> {
    as_array(x, what)?.iter().map(rational_from_json).collect()
}

pub fn representation_from_json(text: &str) -> Result<LinearRepresentation> {
    let doc: Json = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let q = as_u32(field(&doc, "q")?, "q")?;
    let u = vector_from_json(field(&doc, "u")?, "u")?;
    let v = vector_from_json(field(&doc, "v")?, "v")?;
    let matrices = as_array(field(&doc, "M")?, "M")?
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let rows = as_array(m, "M_i")?
                .iter()
                .map(|row| vector_from_json(row, "matrix row"))
                .collect::<Result<Vec<_>>>()?;
            Matrix::from_rows(rows).ok_or_else(|| Error::MalformedRepresentation(format!("M_{i} has ragged rows")))
        })
        .collect::<Result<Vec<_>>>()?;
    LinearRepresentation::new(q, u, matrices, v)
}

pub fn representation_to_json(rep: &LinearRepresentation) -> String {
    let vec = |x: &[Rational]| Json::Array(x.iter().map(|r| Json::String(format_rational(r))).collect());
    let matrices: Vec<Json> =
        rep.matrices().iter().map(|m| Json::Array(m.to_rows().iter().map(|row| vec(row)).collect())).collect();
    let doc = json!({ "q": rep.q(), "u": vec(rep.u()), "M": matrices, "v": vec(rep.v()) });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

struct StateNames {
    by_name: HashMap<String, usize>,
    count: usize,
}

impl StateNames {
    fn parse(states: &Json) -> Result<Self> {
        match states {
            Json::Number(_) => {
                let count = as_u32(states, "states")? as usize;
                Ok(StateNames { by_name: HashMap::new(), count })
            }
            Json::Array(names) => {
                let mut by_name = HashMap::new();
                for (i, name) in names.iter().enumerate() {
                    let name = name.as_str().ok_or_else(|| Error::Parse("state names must be strings".into()))?;
                    if by_name.insert(name.to_string(), i).is_some() {
                        return Err(Error::MalformedTransducer(format!("duplicate state {name:?}")));
                    }
                }
                Ok(StateNames { by_name, count: names.len() })
            }
            _ => Err(Error::Parse("states must be a count or a list of names".into())),
        }
    }

    fn resolve(&self, x: &Json) -> Result<usize> {
        let index = match x {
            Json::String(s) => {
                *self.by_name.get(s).ok_or_else(|| Error::MalformedTransducer(format!("unknown state {s:?}")))?
            }
            _ => as_u32(x, "state")? as usize,
        };
        if index >= self.count {
            return Err(Error::MalformedTransducer(format!("state {index} out of range")));
        }
        Ok(index)
    }
}

pub fn transducer_from_json(text: &str) -> Result<Transducer> {
    let doc: Json = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let q = as_u32(field(&doc, "q")?, "q")?;
    crate::digits::check_base(q)?;
    let names = StateNames::parse(field(&doc, "states")?)?;
    if names.count == 0 || names.count > 1 << 16 {
        return Err(Error::MalformedTransducer(format!("unsupported number of states {}", names.count)));
    }
    let initial = names.resolve(field(&doc, "initial")?)?;
    let cells = names.count.checked_mul(q as usize).filter(|&c| c <= 1 << 20);
    if cells.is_none() {
        return Err(Error::MalformedTransducer("transition table too large".into()));
    }
    let mut next = vec![vec![None; q as usize]; names.count];
    let mut output = vec![vec![Rational::from_integer(0.into()); q as usize]; names.count];
    for t in as_array(field(&doc, "transitions")?, "transitions")? {
        let t = as_array(t, "transition")?;
        if t.len() != 4 {
            return Err(Error::Parse("a transition is [state, digit, next, output]".into()));
        }
        let s = names.resolve(&t[0])?;
        let d = as_u32(&t[1], "digit")?;
        if d >= q {
            return Err(Error::MalformedTransducer(format!("digit {d} out of range for base {q}")));
        }
        if next[s][d as usize].is_some() {
            return Err(Error::MalformedTransducer(format!("state {s} has two transitions on digit {d}")));
        }
        next[s][d as usize] = Some(names.resolve(&t[2])?);
        output[s][d as usize] = rational_from_json(&t[3])?;
    }
    let next = next
        .into_iter()
        .enumerate()
        .map(|(s, row)| {
            row.into_iter()
                .enumerate()
                .map(|(d, t)| t.ok_or_else(|| Error::MalformedTransducer(format!("state {s} lacks digit {d}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut final_output = vec![Rational::from_integer(0.into()); names.count];
    if let Some(finals) = doc.get("final") {
        for f in as_array(finals, "final")? {
            let f = as_array(f, "final entry")?;
            if f.len() != 2 {
                return Err(Error::Parse("a final entry is [state, output]".into()));
            }
            final_output[names.resolve(&f[0])?] = rational_from_json(&f[1])?;
        }
    }
    Transducer::new(q, initial, next, output, final_output)
}

pub fn transducer_to_json(t: &Transducer) -> String {
    let mut transitions = Vec::new();
    for s in 0..t.states() {
        for d in 0..t.q() {
            transitions.push(json!([s, d, t.next_state(s, d), format_rational(t.output(s, d))]));
        }
    }
    let finals: Vec<Json> = (0..t.states()).map(|s| json!([s, format_rational(t.final_output(s))])).collect();
    let doc = json!({
        "q": t.q(),
        "states": t.states(),
        "initial": t.initial(),
        "transitions": transitions,
        "final": finals,
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}
