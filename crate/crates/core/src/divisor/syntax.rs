use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{RDivisor, Representation};
use crate::error::{Error, Result};
use crate::exact_numbers::{parse::parse_quad_prefix, QuadExt};

const FIELD: &str = "divisor";

/// One component of a divisor file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub label: String,
    pub coef: QuadExt,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansion: Option<Vec<i64>>,
}

/// Structured divisor: an inline string, or a term list (required for general representation).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DivisorSpec {
    Inline(String),
    Terms { terms: Vec<TermSpec> },
}

impl DivisorSpec {
    pub fn build(&self) -> Result<RDivisor> {
        match self {
            DivisorSpec::Inline(s) => parse_inline(s),
            DivisorSpec::Terms { terms } => {
                let with_exp = terms.iter().filter(|t| t.expansion.is_some()).count();
                if with_exp == 0 {
                    RDivisor::prime(terms.iter().map(|t| (t.label.clone(), t.coef.clone())))
                } else if with_exp == terms.len() {
                    RDivisor::general(
                        terms
                            .iter()
                            .map(|t| (t.label.clone(), t.coef.clone(), t.expansion.clone().unwrap())),
                    )
                } else {
                    Err(Error::parse(
                        "divisor.terms",
                        "either every term or no term carries an expansion",
                    ))
                }
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(FIELD, e.to_string()))
    }
}

impl From<&RDivisor> for DivisorSpec {
    fn from(d: &RDivisor) -> Self {
        match d.rep {
            Representation::Prime => DivisorSpec::Inline(format_inline(d)),
            Representation::General => DivisorSpec::Terms {
                terms: d
                    .terms
                    .iter()
                    .map(|(l, c)| TermSpec {
                        label: l.clone(),
                        coef: c.clone(),
                        expansion: d.expansions.get(l).cloned(),
                    })
                    .collect(),
            },
        }
    }
}

fn is_label_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_label_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

/// `coef*label` terms joined by `+`/`-`; a bare label has coefficient 1.
pub(crate) fn parse_inline(text: &str) -> Result<RDivisor> {
    let words: Vec<&str> = text.split_whitespace().collect();
    for pair in words.windows(2) {
        let (l, r) = (pair[0].as_bytes(), pair[1].as_bytes());
        if is_label_char(l[l.len() - 1]) && is_label_char(r[0]) {
            return Err(Error::parse(FIELD, format!("missing operator between {:?} and {:?}", pair[0], pair[1])));
        }
    }
    let s: String = words.concat();
    if s.is_empty() {
        return Err(Error::parse(FIELD, "empty divisor"));
    }
    if s == "0" {
        return Ok(RDivisor::zero());
    }
    let bytes = s.as_bytes();
    let mut pos = 0usize;
    let mut terms = Vec::new();
    let err = |pos: usize, what: &str| Error::parse(FIELD, format!("{what} at offset {pos} in {text:?}"));
    while pos < bytes.len() {
        let neg = match bytes[pos] {
            b'-' => {
                pos += 1;
                true
            }
            b'+' if !terms.is_empty() => {
                pos += 1;
                false
            }
            _ if terms.is_empty() => false,
            _ => return Err(err(pos, "expected + or -")),
        };
        if pos >= bytes.len() {
            return Err(err(pos, "dangling sign"));
        }
        let bare_label = is_label_start(bytes[pos]) && !s[pos..].starts_with("sqrt(");
        let coef = if bare_label {
            QuadExt::one()
        } else {
            let (c, used) = parse_quad_prefix(&s[pos..])?;
            pos += used;
            if bytes.get(pos) != Some(&b'*') {
                return Err(err(pos, "expected *label after coefficient"));
            }
            pos += 1;
            c
        };
        let start = pos;
        if pos >= bytes.len() || !is_label_start(bytes[pos]) {
            return Err(err(pos, "expected a label"));
        }
        while pos < bytes.len() && is_label_char(bytes[pos]) {
            pos += 1;
        }
        let label = &s[start..pos];
        terms.push((label.to_string(), if neg { -coef } else { coef }));
    }
    RDivisor::prime(terms)
}

fn term_body(c: &QuadExt, label: &str) -> (bool, String) {
    if c.is_rational() || c.rational_part().is_zero() {
        let neg = c.is_negative();
        let mag = c.abs();
        if mag == QuadExt::one() {
            (neg, label.to_string())
        } else {
            (neg, format!("{mag}*{label}"))
        }
    } else {
        (false, format!("({c})*{label}"))
    }
}

pub(crate) fn format_inline(d: &RDivisor) -> String {
    if d.terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (label, c) in &d.terms {
        let (neg, body) = term_body(c, label);
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_forms() {
        let d = parse_inline("3/2*C0 + 3*f").unwrap();
        assert_eq!(d.terms()["C0"], "3/2".parse().unwrap());
        assert_eq!(d.terms()["f"], QuadExt::from_int(3));
        let d = parse_inline("C0 - 1/2*f").unwrap();
        assert_eq!(d.terms()["f"], "-1/2".parse().unwrap());
        let d = parse_inline("(1+sqrt(2))*C0 - sqrt(2)*f").unwrap();
        assert_eq!(d.field().unwrap(), 2);
        assert!(parse_inline("0").unwrap().is_zero());
        assert_eq!(parse_inline("C0 - C0").unwrap(), RDivisor::zero());
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "3/2", "3/2*", "C0 +", "2 C0", "C0 f", "*C0", "1/0*C0"] {
            assert!(parse_inline(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn print_parse_round_trip() {
        for s in [
            "3/2*C0 + 3*f",
            "-C0 - 1/2*f",
            "(1-sqrt(2))*C0 + 3/4*sqrt(2)*f",
            "-sqrt(5)*L",
            "0",
        ] {
            let d = parse_inline(s).unwrap();
            assert_eq!(parse_inline(&format_inline(&d)).unwrap(), d, "{s}");
        }
        assert_eq!(format_inline(&parse_inline("3*f + 3/2*C0").unwrap()), "3/2*C0 + 3*f");
    }

    #[test]
    fn json_forms() {
        let spec = DivisorSpec::from_json(r#""3/2*C0 + 3*f""#).unwrap();
        assert_eq!(spec.build().unwrap(), parse_inline("3/2*C0+3*f").unwrap());
        let spec = DivisorSpec::from_json(
            r#"{"terms": [{"label": "A", "coef": "1/2", "expansion": [1, 1]},
                          {"label": "B", "coef": "1/2", "expansion": [1, 2]}]}"#,
        )
        .unwrap();
        let d = spec.build().unwrap();
        assert_eq!(d.representation(), Representation::General);
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<RDivisor>(&json).unwrap(), d);
        let mixed = DivisorSpec::from_json(
            r#"{"terms": [{"label": "A", "coef": "1", "expansion": [1, 1]}, {"label": "C0", "coef": "1"}]}"#,
        )
        .unwrap();
        assert!(mixed.build().is_err());
    }
}
