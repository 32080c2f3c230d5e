//! Text formats for codes (`fpc1`) and orthogonal arrays (`oa1`).
//!
//! ```text
//! fpc1 q=3 l=4 M=8 inf=0
//! * 1 1 1
//! ...
//! ```
//!
//! Code records are emitted in lexicographic order with `*` standing for the
//! declared infinity id; on input `*` and the numeric id are interchangeable.
//! Emission is canonical, so parse followed by emit is byte-stable.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Code, DisplayWord, Symbol};
use crate::oa::OrthogonalArray;

pub const CODE_MAGIC: &str = "fpc1";
pub const OA_MAGIC: &str = "oa1";

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inf = self.inf().map_or_else(|| "none".to_string(), |i| i.to_string());
        writeln!(
            f,
            "{CODE_MAGIC} q={} l={} M={} inf={inf}",
            self.alphabet(),
            self.length(),
            self.len()
        )?;
        for w in self.words() {
            writeln!(f, "{}", self.display_word(w))?;
        }
        Ok(())
    }
}

impl fmt::Display for OrthogonalArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{OA_MAGIC} N={} k={} s={} t={}",
            self.runs(),
            self.constraints(),
            self.levels(),
            self.strength()
        )?;
        for row in self.rows() {
            writeln!(f, "{}", DisplayWord { word: row, inf: None })?;
        }
        Ok(())
    }
}

/// Parses `key=value` header fields in a fixed order.
struct Header<'a> {
    fields: std::str::SplitWhitespace<'a>,
}

impl<'a> Header<'a> {
    fn new(line: &'a str, magic: &str) -> Result<Self> {
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some(m) if m == magic => Ok(Header { fields }),
            _ => Err(Error::parse(1, format!("expected header starting with {magic:?}"))),
        }
    }

    fn raw(&mut self, key: &str) -> Result<&'a str> {
        self.fields
            .next()
            .and_then(|f| f.strip_prefix(key)?.strip_prefix('='))
            .ok_or_else(|| Error::parse(1, format!("expected field {key}=")))
    }

    fn num<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| Error::parse(1, format!("invalid value {raw:?} for {key}")))
    }

    fn finish(mut self) -> Result<()> {
        match self.fields.next() {
            None => Ok(()),
            Some(extra) => Err(Error::parse(1, format!("unexpected header field {extra:?}"))),
        }
    }
}

/// Body lines after the header; blank lines are allowed only at the end.
fn body_lines(text: &str) -> Result<(&str, Vec<(usize, &str)>)> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let mut body: Vec<(usize, &str)> = lines.enumerate().map(|(i, l)| (i + 2, l)).collect();
    while body.last().is_some_and(|(_, l)| l.trim().is_empty()) {
        body.pop();
    }
    Ok((header, body))
}

fn parse_symbol(token: &str, inf: Option<Symbol>, line: usize) -> Result<Symbol> {
    if token == "*" {
        return inf.ok_or_else(|| Error::parse(line, "'*' used but the header declares inf=none"));
    }
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid symbol {token:?}")))
}

impl FromStr for Code {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (header, body) = body_lines(text)?;
        let mut h = Header::new(header, CODE_MAGIC)?;
        let q: u32 = h.num("q")?;
        let l: usize = h.num("l")?;
        let m: usize = h.num("M")?;
        let inf = match h.raw("inf")? {
            "none" => None,
            v => Some(
                v.parse()
                    .map_err(|_| Error::parse(1, format!("invalid value {v:?} for inf")))?,
            ),
        };
        h.finish()?;
        if body.len() != m {
            return Err(Error::parse(
                body.len().min(m) + 2,
                format!("header declares M={m} but {} records follow", body.len()),
            ));
        }
        let mut words = Vec::with_capacity(m);
        for (line, text) in body {
            let word = text
                .split_whitespace()
                .map(|t| parse_symbol(t, inf, line))
                .collect::<Result<Vec<_>>>()?;
            if word.len() != l {
                return Err(Error::parse(
                    line,
                    format!("record has {} symbols, expected {l}", word.len()),
                ));
            }
            words.push(word);
        }
        Code::new(l, q, words, inf)
    }
}

impl FromStr for OrthogonalArray {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (header, body) = body_lines(text)?;
        let mut h = Header::new(header, OA_MAGIC)?;
        let n: usize = h.num("N")?;
        let k: usize = h.num("k")?;
        let s: u32 = h.num("s")?;
        let t: usize = h.num("t")?;
        h.finish()?;
        if n == 0 {
            return Err(Error::parse(1, "N must be positive"));
        }
        if body.len() != k {
            return Err(Error::parse(
                body.len().min(k) + 2,
                format!("header declares k={k} but {} rows follow", body.len()),
            ));
        }
        let mut rows = Vec::with_capacity(k);
        for (line, text) in body {
            let row = text
                .split_whitespace()
                .map(|t| parse_symbol(t, None, line))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::parse(
                    line,
                    format!("row has {} symbols, expected N={n}", row.len()),
                ));
            }
            rows.push(row);
        }
        OrthogonalArray::new(rows, s, t)
    }
}

/// A file of either kind, told apart by its magic word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Code(Code),
    Array(OrthogonalArray),
}

impl FromStr for Document {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text.split_whitespace().next() {
            Some(CODE_MAGIC) => text.parse().map(Document::Code),
            Some(OA_MAGIC) => text.parse().map(Document::Array),
            _ => Err(Error::parse(
                1,
                format!("unknown file type; expected {CODE_MAGIC:?} or {OA_MAGIC:?}"),
            )),
        }
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Document::Code(c) => c.fmt(f),
            Document::Array(a) => a.fmt(f),
        }
    }
}
