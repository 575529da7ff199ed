//! Line-oriented text format for defining polynomials.
//!
//! ```text
//! # comment
//! name = cubic
//! coeffs = 1, -2, -1, 1
//! ```
//!
//! Coefficients are exact integers, constant term first, separated by commas
//! and/or whitespace. A line holding only integers is accepted as the
//! coefficient line. Other `key = value` lines are kept as metadata in order.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::numberfield::{make_field, NumberField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub coeffs: Vec<BigInt>,
    pub meta: Vec<(String, String)>,
}

fn parse_ints(s: &str, line: usize) -> Result<Vec<BigInt>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<BigInt>().map_err(|_| Error::Parse {
                line,
                msg: format!("not an integer: {t:?}"),
            })
        })
        .collect()
}

impl FieldSpec {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        FieldSpec {
            coeffs,
            meta: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut coeffs: Option<Vec<BigInt>> = None;
        let mut meta = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed = match line.split_once('=') {
                Some((k, v)) => {
                    let (k, v) = (k.trim(), v.trim());
                    if k.is_empty() {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "empty key".into(),
                        });
                    }
                    if k == "coeffs" {
                        Some(parse_ints(v, line_no)?)
                    } else {
                        meta.push((k.to_string(), v.to_string()));
                        None
                    }
                }
                None => Some(parse_ints(line, line_no)?),
            };
            if let Some(c) = parsed {
                if coeffs.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "duplicate coefficient line".into(),
                    });
                }
                if c.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "no coefficients".into(),
                    });
                }
                coeffs = Some(c);
            }
        }
        let coeffs = coeffs.ok_or_else(|| Error::Parse {
            line: text.lines().count(),
            msg: "missing coefficient line".into(),
        })?;
        Ok(FieldSpec { coeffs, meta })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "{k} = {v}");
        }
        let c: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(s, "coeffs = {}", c.join(", "));
        s
    }

    pub fn field(&self) -> Result<Arc<NumberField>> {
        make_field(&self.coeffs)
    }
}

impl From<&NumberField> for FieldSpec {
    fn from(k: &NumberField) -> Self {
        FieldSpec::new(k.poly().to_vec())
    }
}
