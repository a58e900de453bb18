//! Chain files (JSON documents and OFF meshes) and deterministic reports.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::chain::{Chain, Term};
use crate::error::{GeomError, Result};
use crate::geom::Point;

/// On-disk form of a chain. `polygon` is a closed planar polygon and
/// excludes `vertices` and `simplices`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intrinsic_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplices: Option<Vec<Term>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub combinatorial: bool,
}

fn invalid(msg: impl Into<String>) -> GeomError {
    GeomError::InvalidChain(msg.into())
}

fn to_points(rows: Vec<Vec<f64>>) -> Result<Vec<Point>> {
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| Point::new(r).map_err(|e| invalid(format!("vertex {i}: {e}"))))
        .collect()
}

impl ChainDocument {
    pub fn into_chain(self) -> Result<Chain> {
        if let Some(polygon) = self.polygon {
            if self.vertices.is_some() || self.simplices.is_some() {
                return Err(invalid(
                    "polygon cannot be combined with vertices or simplices",
                ));
            }
            if self.dimension.is_some_and(|d| d != 2) || self.intrinsic_dim.is_some_and(|k| k != 1)
            {
                return Err(invalid("polygon is a 1-chain in dimension 2"));
            }
            if let Some(i) = polygon.iter().position(|p| p.len() != 2) {
                return Err(invalid(format!("polygon vertex {i} is not 2D")));
            }
            let chain = Chain::polygon(to_points(polygon)?)?;
            return Ok(chain.canonicalize());
        }
        let n = self.dimension.ok_or_else(|| invalid("missing dimension"))?;
        let k = self
            .intrinsic_dim
            .ok_or_else(|| invalid("missing intrinsic_dim"))?;
        let pool = to_points(self.vertices.unwrap_or_default())?;
        let terms = self.simplices.unwrap_or_default();
        let chain = if self.combinatorial {
            Chain::combinatorial(n, k, pool, terms)?
        } else {
            Chain::new(n, k, pool, terms)?
        };
        Ok(chain.canonicalize())
    }

    pub fn from_chain(chain: &Chain) -> Self {
        ChainDocument {
            dimension: Some(chain.ambient_dim()),
            intrinsic_dim: Some(chain.intrinsic_dim()),
            vertices: Some(chain.pool().iter().map(|p| p.coords().to_vec()).collect()),
            simplices: Some(chain.terms().to_vec()),
            polygon: None,
            combinatorial: chain.is_combinatorial_only(),
        }
    }
}

/// Reads a JSON chain document or an OFF mesh, detected from the first
/// non-blank character. The result is canonical.
pub fn parse_chain(bytes: &[u8]) -> Result<Chain> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let before = &bytes[..e.valid_up_to()];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = before.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        GeomError::Parse {
            line,
            column,
            message: "invalid UTF-8".into(),
        }
    })?;
    match text.trim_start().chars().next() {
        Some('{') => parse_json(text),
        _ => parse_off(text),
    }
}

fn parse_json(text: &str) -> Result<Chain> {
    let doc: ChainDocument = serde_json::from_str(text).map_err(|e| GeomError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.into_chain()
}

/// Data lines of an OFF file with comments stripped and blank lines
/// skipped, each with its 1-based line number. Leading whitespace is kept
/// so columns match the input.
fn off_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let data = line.split('#').next().unwrap_or("");
        (!data.trim().is_empty()).then_some((i + 1, data))
    })
}

fn column_of(line: &str, token: &str) -> usize {
    token.as_ptr() as usize - line.as_ptr() as usize + 1
}

fn parse_token<T: std::str::FromStr>(
    line_no: usize,
    line: &str,
    token: &str,
    what: &str,
) -> Result<T> {
    token.parse().map_err(|_| GeomError::Parse {
        line: line_no,
        column: column_of(line, token),
        message: format!("expected {what}, found {token:?}"),
    })
}

/// ASCII OFF mesh as a 2-chain in R^3 with coefficients +1. Polygonal
/// faces are fanned from their first vertex.
fn parse_off(text: &str) -> Result<Chain> {
    let mut lines = off_lines(text);
    let eof = |what: &str| GeomError::Parse {
        line: text.lines().count().max(1),
        column: 1,
        message: format!("unexpected end of input, expected {what}"),
    };
    let (hline, header) = lines.next().ok_or_else(|| eof("OFF header"))?;
    let mut tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens[0] != "OFF" {
        return Err(GeomError::Parse {
            line: hline,
            column: column_of(header, tokens[0]),
            message: format!("expected OFF header, found {:?}", tokens[0]),
        });
    }
    tokens.remove(0);
    let (cline, counts) = if tokens.is_empty() {
        let (l, c) = lines.next().ok_or_else(|| eof("vertex and face counts"))?;
        (l, (c, c.split_whitespace().collect::<Vec<_>>()))
    } else {
        (hline, (header, tokens))
    };
    let (count_src, count_tokens) = counts;
    if count_tokens.len() < 2 {
        return Err(GeomError::Parse {
            line: cline,
            column: 1,
            message: "expected vertex and face counts".into(),
        });
    }
    let nv: usize = parse_token(cline, count_src, count_tokens[0], "vertex count")?;
    let nf: usize = parse_token(cline, count_src, count_tokens[1], "face count")?;

    let mut pool = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, line) = lines.next().ok_or_else(|| eof("vertex"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(GeomError::Parse {
                line: l,
                column: 1,
                message: "vertex needs 3 coordinates".into(),
            });
        }
        let mut c = [0.0; 3];
        for (slot, tok) in c.iter_mut().zip(&toks) {
            *slot = parse_token(l, line, tok, "coordinate")?;
        }
        pool.push(Point::new(c.to_vec()).map_err(|e| GeomError::Parse {
            line: l,
            column: 1,
            message: e.to_string(),
        })?);
    }

    let mut terms = Vec::new();
    for _ in 0..nf {
        let (l, line) = lines.next().ok_or_else(|| eof("face"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let size: usize = parse_token(l, line, toks[0], "face size")?;
        if size < 3 || toks.len() < size + 1 {
            return Err(GeomError::Parse {
                line: l,
                column: column_of(line, toks[0]),
                message: format!("face of size {size} needs at least 3 listed indices"),
            });
        }
        let idx: Vec<usize> = toks[1..=size]
            .iter()
            .map(|t| parse_token(l, line, t, "vertex index"))
            .collect::<Result<_>>()?;
        for j in 1..size - 1 {
            terms.push(Term::new(vec![idx[0], idx[j], idx[j + 1]], 1));
        }
    }
    Ok(Chain::new(3, 2, pool, terms)?.canonicalize())
}

/// JSON document for the canonical form of a chain; `parse_chain` inverts
/// it exactly, so the bytes are a fixed point of parse then serialize.
pub fn serialize_chain(chain: &Chain) -> Vec<u8> {
    serde_json::to_vec_pretty(&ChainDocument::from_chain(&chain.canonicalize()))
        .expect("chain document serializes")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

/// Machine-readable command result. Keys serialize in sorted order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    pub status: Status,
    pub tolerances: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            inputs: BTreeMap::new(),
            results: BTreeMap::new(),
            status: Status::Pass,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.to_string(), value.into());
        self
    }

    pub fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }
}

/// Writes every float as `d.ddddddddddddddddde±x`: 17 significant digits
/// always identify the double uniquely.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Deterministic report bytes: sorted keys, fixed-width floats, trailing
/// newline. Non-finite floats become `null`.
pub fn serialize_report(report: &Report) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits);
    report.serialize(&mut ser).expect("report serializes");
    out.push(b'\n');
    out
}

pub fn parse_report(bytes: &[u8]) -> Result<Report> {
    serde_json::from_slice(bytes).map_err(|e| GeomError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// JSON number for a finite float, `null` otherwise.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn point_value(p: &Point) -> Value {
    Value::Array(p.coords().iter().map(|&x| num(x)).collect())
}
