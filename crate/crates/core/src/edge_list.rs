//! Plain-text edge-list format.
//!
//! One edge per line as two base-10 integers separated by whitespace. Lines
//! starting with `#` are comments, except for an optional `# n=<int>` header
//! that declares the vertex count. Blank lines are ignored.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::graph::{validate_stream, EdgeStream, StreamError};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: StreamError,
    },
}

impl EdgeListError {
    /// One-based line number of the offending line, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            EdgeListError::Io(_) => None,
            EdgeListError::Syntax { line, .. } | EdgeListError::Invalid { line, .. } => Some(*line),
        }
    }
}

/// A parsed edge list.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub stream: EdgeStream,
    /// True when no header was present and `n` was taken as one more than
    /// the largest vertex id.
    pub n_inferred: bool,
}

fn parse_header(rest: &str) -> Option<&str> {
    rest.trim().strip_prefix("n=").map(str::trim)
}

/// Parses edge-list text.
///
/// Without a header, `n` is inferred from the largest id, which needs the
/// whole input; library callers that care about the one-pass model should
/// supply the header.
pub fn parse_edge_list(text: &str) -> Result<EdgeList, EdgeListError> {
    read_edge_list(text.as_bytes())
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<EdgeList, EdgeListError> {
    let mut declared_n: Option<usize> = None;
    let mut raw = Vec::new();
    let mut lines = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(value) = parse_header(rest) {
                let n: usize = value.parse().map_err(|_| EdgeListError::Syntax {
                    line: line_no,
                    message: format!("bad vertex-count header value {value:?}"),
                })?;
                if declared_n.is_some_and(|prev| prev != n) {
                    return Err(EdgeListError::Syntax {
                        line: line_no,
                        message: "conflicting vertex-count headers".into(),
                    });
                }
                declared_n = Some(n);
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(EdgeListError::Syntax {
                line: line_no,
                message: "expected exactly two vertex ids".into(),
            });
        };
        let parse = |s: &str| {
            s.parse::<u64>().map_err(|_| EdgeListError::Syntax {
                line: line_no,
                message: format!("bad vertex id {s:?}"),
            })
        };
        raw.push((parse(a)?, parse(b)?));
        lines.push(line_no);
    }

    let n_inferred = declared_n.is_none();
    let n = match declared_n {
        Some(n) => n,
        None => raw
            .iter()
            .map(|&(a, b)| a.max(b).saturating_add(1))
            .max()
            .unwrap_or(1)
            .try_into()
            .unwrap_or(usize::MAX),
    };

    let stream = validate_stream(raw, n).map_err(|source| match source.position() {
        Some(pos) => EdgeListError::Invalid {
            line: lines[pos],
            source,
        },
        None => EdgeListError::Syntax {
            line: 1,
            message: source.to_string(),
        },
    })?;
    Ok(EdgeList { stream, n_inferred })
}

/// Writes a stream with its `# n=` header.
pub fn write_edge_list<W: Write>(stream: &EdgeStream, mut out: W) -> io::Result<()> {
    writeln!(out, "# n={}", stream.n())?;
    for e in stream {
        writeln!(out, "{} {}", e.u(), e.v())?;
    }
    Ok(())
}

pub fn to_edge_list_string(stream: &EdgeStream) -> String {
    let mut buf = Vec::new();
    write_edge_list(stream, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("edge lists are ASCII")
}
