//! Line-oriented text format.
//!
//! ```text
//! structure x level 0
//! point a
//! point b
//! color a b b:0:0
//! ```
//!
//! Points are listed in increasing order; every pair is colored exactly once.
//! Other blocks (embeddings, type lists, ledgers, certificates) share the
//! same tokenizer: whitespace-separated tokens, `#` comments, blank lines and
//! indentation ignored.

use crate::color::ColorTerm;
use crate::embedding::Embedding;
use crate::error::ParseError;
use crate::structure::FinStruct;

/// Whitespace layout of emitted text. Both layouts produce the same token
/// stream.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Layout {
    #[default]
    Compact,
    Pretty,
}

#[derive(Debug, Default)]
pub struct Writer {
    layout: Layout,
    out: String,
}

impl Writer {
    pub fn new(layout: Layout) -> Self {
        Writer {
            layout,
            out: String::new(),
        }
    }

    pub fn header(&mut self, line: impl AsRef<str>) {
        self.out.push_str(line.as_ref());
        self.out.push('\n');
    }

    pub fn item(&mut self, line: impl AsRef<str>) {
        if self.layout == Layout::Pretty {
            self.out.push_str("  ");
        }
        self.out.push_str(line.as_ref());
        self.out.push('\n');
    }

    pub fn end_block(&mut self) {
        if self.layout == Layout::Pretty {
            self.out.push('\n');
        }
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn write_structure(w: &mut Writer, s: &FinStruct) {
    w.header(format!("structure {} level {}", s.name(), s.level()));
    for p in s.points() {
        w.item(format!("point {p}"));
    }
    for (i, j, c) in s.pairs() {
        w.item(format!("color {} {} {c}", s.point(i), s.point(j)));
    }
    w.end_block();
}

pub fn structure_to_string(s: &FinStruct, layout: Layout) -> String {
    let mut w = Writer::new(layout);
    write_structure(&mut w, s);
    w.finish()
}

pub fn write_embedding(
    w: &mut Writer,
    name: &str,
    source: &FinStruct,
    target: &FinStruct,
    e: &Embedding,
) {
    w.header(format!("embedding {name} {} {}", source.name(), target.name()));
    for (i, &j) in e.map.iter().enumerate() {
        w.item(format!("map {} {}", source.point(i), target.point(j)));
    }
    w.end_block();
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line<'a> {
    pub number: usize,
    pub tokens: Vec<&'a str>,
}

impl<'a> Line<'a> {
    pub fn keyword(&self) -> &'a str {
        self.tokens[0]
    }

    pub fn expect_len(&self, n: usize) -> Result<(), ParseError> {
        if self.tokens.len() == n {
            Ok(())
        } else {
            Err(ParseError::line(
                self.number,
                format!("`{}` expects {} fields", self.keyword(), n - 1),
            ))
        }
    }
}

pub fn tokenize(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            (!tokens.is_empty()).then_some(Line {
                number: i + 1,
                tokens,
            })
        })
        .collect()
}

/// Reads one structure block starting at `lines[*pos]`, advancing `pos`
/// past it.
pub fn read_structure(lines: &[Line<'_>], pos: &mut usize) -> Result<FinStruct, ParseError> {
    let head = lines
        .get(*pos)
        .ok_or_else(|| ParseError::MissingSection("structure".into()))?;
    if head.keyword() != "structure" {
        return Err(ParseError::line(head.number, "expected `structure` header"));
    }
    head.expect_len(4)?;
    if head.tokens[2] != "level" {
        return Err(ParseError::line(head.number, "expected `level`"));
    }
    let level: u32 = head.tokens[3]
        .parse()
        .map_err(|_| ParseError::line(head.number, "bad level"))?;
    let name = head.tokens[1].to_string();
    *pos += 1;
    let mut points = Vec::new();
    let mut pairs = Vec::new();
    while let Some(line) = lines.get(*pos) {
        match line.keyword() {
            "point" => {
                line.expect_len(2)?;
                if !pairs.is_empty() {
                    return Err(ParseError::line(line.number, "`point` after `color`"));
                }
                points.push(line.tokens[1].to_string());
            }
            "color" => {
                line.expect_len(4)?;
                let c: ColorTerm = line.tokens[3]
                    .parse()
                    .map_err(|e: ParseError| ParseError::line(line.number, e.to_string()))?;
                pairs.push((line.tokens[1].to_string(), line.tokens[2].to_string(), c));
            }
            _ => break,
        }
        *pos += 1;
    }
    FinStruct::new(name, level, points, pairs).map_err(|source| ParseError::Structure {
        line: head.number,
        source,
    })
}

/// Parses every structure block in `text`, skipping lines of other blocks.
pub fn parse_structures(text: &str) -> Result<Vec<FinStruct>, ParseError> {
    let lines = tokenize(text);
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < lines.len() {
        if lines[pos].keyword() == "structure" {
            out.push(read_structure(&lines, &mut pos)?);
        } else {
            pos += 1;
        }
    }
    Ok(out)
}

/// Parses the first structure block in `text`.
pub fn parse_structure(text: &str) -> Result<FinStruct, ParseError> {
    parse_structures(text)?
        .into_iter()
        .next()
        .ok_or_else(|| ParseError::MissingSection("structure".into()))
}

/// Reads `map <src> <dst>` lines (by point name) under an `embedding` header
/// anywhere in `text` into a position map from `source` to `target`.
pub fn parse_embedding(
    text: &str,
    source: &FinStruct,
    target: &FinStruct,
) -> Result<Embedding, ParseError> {
    let lines = tokenize(text);
    let start = lines
        .iter()
        .position(|l| l.keyword() == "embedding")
        .ok_or_else(|| ParseError::MissingSection("embedding".into()))?;
    let mut map = vec![None; source.len()];
    for line in lines[start + 1..].iter().take_while(|l| l.keyword() == "map") {
        line.expect_len(3)?;
        let from = source
            .position(line.tokens[1])
            .ok_or_else(|| ParseError::line(line.number, "unknown source point"))?;
        let to = target
            .position(line.tokens[2])
            .ok_or_else(|| ParseError::line(line.number, "unknown target point"))?;
        if map[from].replace(to).is_some() {
            return Err(ParseError::line(line.number, "point mapped twice"));
        }
    }
    let map = map
        .into_iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| ParseError::line(0, format!("`{}` unmapped", source.point(i)))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Embedding::new(map))
}
