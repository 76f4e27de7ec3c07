//! Job files: a line-oriented text format and its JSON twin.
//!
//! ```text
//! format iwasawa-job/1
//! context p=5 N=8 D=12
//! group 2
//! presentation level=1 rows=2 cols=2
//! 5 | 0
//! 0 | X1
//! end
//! param a=2
//! ```
//!
//! Towers use `tower rows=<d> levels=<m>` followed by `level <j>` sections,
//! ideals use `ideal level=<n>` with one generator per line. Lines starting
//! with `#` are comments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT: &str = "iwasawa-job/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {field}: {message}")]
pub struct ParseError {
    /// 1-based; 0 for JSON input, where serde reports its own position.
    pub line: usize,
    pub field: String,
    pub message: String,
}

fn err(line: usize, field: &str, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSpec {
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    #[serde(rename = "D")]
    pub degree_cap: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationBlock {
    pub level: usize,
    pub rows: usize,
    pub cols: usize,
    /// Row-major entry texts.
    pub entries: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerBlock {
    pub rows: usize,
    /// `levels[j - 1]` holds the row-major entries at level `j`.
    pub levels: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealBlock {
    pub level: usize,
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub format: String,
    pub context: ContextSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub group: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<PresentationBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<IdealBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

impl Job {
    /// Parses either format; JSON is recognised by a leading `{`.
    pub fn parse(text: &str) -> Result<Job, ParseError> {
        let job = if text.trim_start().starts_with('{') {
            serde_json::from_str::<Job>(text).map_err(|e| err(e.line(), "json", e.to_string()))?
        } else {
            parse_lines(text)?
        };
        if job.format != FORMAT {
            return Err(err(1, "format", format!("expected '{FORMAT}', got '{}'", job.format)));
        }
        Ok(job)
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    /// Renders the job in the line format.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "format {}\ncontext p={} N={} D={}\n",
            self.format, self.context.p, self.context.precision, self.context.degree_cap
        );
        if !self.group.is_empty() {
            let orders: Vec<String> = self.group.iter().map(u32::to_string).collect();
            out += &format!("group {}\n", orders.join(" "));
        }
        let rows_of = |entries: &[String], cols: usize| -> String {
            entries
                .chunks(cols)
                .map(|r| r.join(" | ") + "\n")
                .collect()
        };
        if let Some(p) = &self.presentation {
            out += &format!("presentation level={} rows={} cols={}\n", p.level, p.rows, p.cols);
            out += &rows_of(&p.entries, p.cols);
            out += "end\n";
        }
        if let Some(t) = &self.tower {
            out += &format!("tower rows={} levels={}\n", t.rows, t.levels.len());
            for (j, entries) in t.levels.iter().enumerate() {
                out += &format!("level {}\n", j + 1);
                out += &rows_of(entries, t.rows);
            }
            out += "end\n";
        }
        if let Some(i) = &self.ideal {
            out += &format!("ideal level={}\n", i.level);
            for g in &i.generators {
                out += g;
                out += "\n";
            }
            out += "end\n";
        }
        for (k, v) in &self.params {
            out += &format!("param {k}={v}\n");
        }
        out
    }
}

fn key_values(line: usize, words: &[&str]) -> Result<BTreeMap<String, String>, ParseError> {
    words
        .iter()
        .map(|w| {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| err(line, w, "expected key=value"))?;
            Ok((k.to_string(), v.to_string()))
        })
        .collect()
}

fn number<T: std::str::FromStr>(
    line: usize,
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<T, ParseError> {
    let v = map.get(key).ok_or_else(|| err(line, key, "missing"))?;
    v.parse()
        .map_err(|_| err(line, key, format!("'{v}' is not a valid number")))
}

fn split_row(line: usize, text: &str, cols: usize) -> Result<Vec<String>, ParseError> {
    let entries: Vec<String> = text.split('|').map(|e| e.trim().to_string()).collect();
    if entries.len() != cols {
        return Err(err(
            line,
            "row",
            format!("expected {cols} entries, found {}", entries.len()),
        ));
    }
    if let Some(empty) = entries.iter().position(String::is_empty) {
        return Err(err(line, "row", format!("entry {} is empty", empty + 1)));
    }
    Ok(entries)
}

/// Numbered lines of a block body.
type Block<'a> = Vec<(usize, &'a str)>;

fn parse_lines(text: &str) -> Result<Job, ParseError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let mut format = None;
    let mut context = None;
    let mut group = Vec::new();
    let mut presentation = None;
    let mut tower = None;
    let mut ideal = None;
    let mut params = BTreeMap::new();
    let mut i = 0;
    // Collects the lines of a block up to its `end`.
    let block = |start: usize, header_line: usize| -> Result<(Block<'_>, usize), ParseError> {
        let mut j = start;
        let mut body = Vec::new();
        while j < lines.len() {
            if lines[j].1 == "end" {
                return Ok((body, j + 1));
            }
            body.push(lines[j]);
            j += 1;
        }
        Err(err(header_line, "end", "block is not closed"))
    };
    while i < lines.len() {
        let (ln, line) = lines[i];
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "format" => {
                format = Some(words.get(1).ok_or_else(|| err(ln, "format", "missing"))?.to_string());
                i += 1;
            }
            "context" => {
                let kv = key_values(ln, &words[1..])?;
                context = Some(ContextSpec {
                    p: number(ln, &kv, "p")?,
                    precision: number(ln, &kv, "N")?,
                    degree_cap: number(ln, &kv, "D")?,
                });
                i += 1;
            }
            "group" => {
                group = words[1..]
                    .iter()
                    .map(|w| w.parse().map_err(|_| err(ln, "group", format!("'{w}' is not an order"))))
                    .collect::<Result<_, _>>()?;
                i += 1;
            }
            "param" => {
                params.extend(key_values(ln, &words[1..])?);
                i += 1;
            }
            "presentation" => {
                let kv = key_values(ln, &words[1..])?;
                let (level, rows, cols) = (
                    number(ln, &kv, "level")?,
                    number::<usize>(ln, &kv, "rows")?,
                    number::<usize>(ln, &kv, "cols")?,
                );
                let (body, next) = block(i + 1, ln)?;
                if body.len() != rows {
                    return Err(err(ln, "rows", format!("declared {rows}, found {}", body.len())));
                }
                let mut entries = Vec::new();
                for (bl, text) in body {
                    entries.extend(split_row(bl, text, cols)?);
                }
                presentation = Some(PresentationBlock { level, rows, cols, entries });
                i = next;
            }
            "tower" => {
                let kv = key_values(ln, &words[1..])?;
                let rows: usize = number(ln, &kv, "rows")?;
                let count: usize = number(ln, &kv, "levels")?;
                let (body, next) = block(i + 1, ln)?;
                let mut levels: Vec<Vec<String>> = Vec::new();
                for (bl, text) in body {
                    if let Some(rest) = text.strip_prefix("level") {
                        let j: usize = rest
                            .trim()
                            .parse()
                            .map_err(|_| err(bl, "level", format!("'{}' is not a level", rest.trim())))?;
                        if j != levels.len() + 1 {
                            return Err(err(bl, "level", format!("expected level {}, got {j}", levels.len() + 1)));
                        }
                        levels.push(Vec::new());
                    } else {
                        let current = levels
                            .last_mut()
                            .ok_or_else(|| err(bl, "level", "row before the first level header"))?;
                        current.extend(split_row(bl, text, rows)?);
                    }
                }
                if levels.len() != count {
                    return Err(err(ln, "levels", format!("declared {count}, found {}", levels.len())));
                }
                if let Some(j) = levels.iter().position(|l| l.len() != rows * rows) {
                    return Err(err(ln, "rows", format!("level {} is not {rows}x{rows}", j + 1)));
                }
                tower = Some(TowerBlock { rows, levels });
                i = next;
            }
            "ideal" => {
                let kv = key_values(ln, &words[1..])?;
                let level = number(ln, &kv, "level")?;
                let (body, next) = block(i + 1, ln)?;
                ideal = Some(IdealBlock {
                    level,
                    generators: body.into_iter().map(|(_, t)| t.to_string()).collect(),
                });
                i = next;
            }
            other => return Err(err(ln, other, "unknown directive")),
        }
    }
    Ok(Job {
        format: format.ok_or_else(|| err(1, "format", "missing schema version line"))?,
        context: context.ok_or_else(|| err(1, "context", "missing context line"))?,
        group,
        presentation,
        tower,
        ideal,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "format iwasawa-job/1
context p=5 N=8 D=12
# a comment
presentation level=1 rows=2 cols=2
5 | 0
0 | X1
end
param a=2
";

    #[test]
    fn text_roundtrip() {
        let job = Job::parse(SAMPLE).unwrap();
        assert_eq!(job.context.p, 5);
        assert_eq!(job.presentation.as_ref().unwrap().entries, vec!["5", "0", "0", "X1"]);
        assert_eq!(job.param("a"), Some("2"));
        assert_eq!(Job::parse(&job.to_text()).unwrap(), job);
    }

    #[test]
    fn json_roundtrip() {
        let job = Job::parse(SAMPLE).unwrap();
        let json = serde_json::to_string(&job).unwrap();
        assert_eq!(Job::parse(&json).unwrap(), job);
    }

    #[test]
    fn tower_block() {
        let text = "format iwasawa-job/1\ncontext p=3 N=6 D=8\ntower rows=1 levels=2\nlevel 1\n3 + X1\nlevel 2\n3 + X1 + X2\nend\n";
        let job = Job::parse(text).unwrap();
        assert_eq!(job.tower.unwrap().levels[1], vec!["3 + X1 + X2"]);
    }

    #[test]
    fn errors_name_line_and_field() {
        let e = Job::parse("format iwasawa-job/1\ncontext p=x N=8 D=12\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (2, "p"));
        let e = Job::parse("format iwasawa-job/1\ncontext p=5 N=8 D=12\npresentation level=1 rows=1 cols=2\n5\nend\n")
            .unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (4, "row"));
        let e = Job::parse("format other/2\ncontext p=5 N=8 D=12\n").unwrap_err();
        assert_eq!(e.field, "format");
        let e = Job::parse("format iwasawa-job/1\ncontext p=5 N=8 D=12\nideal level=1\nX1\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (3, "end"));
    }
}
