use std::path::Path;

use super::Mesh;
use crate::error::{Error, Result};

/// Reads a mesh in the plain-text format
///
/// ```text
/// NV NT
/// x y          (NV lines)
/// v0 v1 v2     (NT lines, 0-based)
/// ...          (trailing boundary-marker lines are ignored)
/// ```
pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mesh(&text, &path.display().to_string())
}

struct Lines<'a> {
    name: &'a str,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.name.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    /// Next non-blank line, split into `(column, token)` pairs.
    fn next_record(&mut self, what: &str) -> Result<(usize, Vec<(usize, &'a str)>)> {
        for (i, line) in self.inner.by_ref() {
            self.last_line = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut tokens = Vec::new();
            let mut start = None;
            for (c, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(c),
                    (true, Some(s)) => {
                        tokens.push((s + 1, &line[s..c]));
                        start = None;
                    }
                    _ => {}
                }
            }
            return Ok((i + 1, tokens));
        }
        Err(self.err(
            self.last_line + 1,
            1,
            format!("unexpected end of file, expected {what}"),
        ))
    }

    fn fields<const N: usize, T: std::str::FromStr>(&mut self, what: &str) -> Result<[T; N]> {
        let (line, tokens) = self.next_record(what)?;
        if tokens.len() != N {
            let col = tokens.get(N).map_or(1, |t| t.0);
            return Err(self.err(
                line,
                col,
                format!("expected {N} fields for {what}, found {}", tokens.len()),
            ));
        }
        let mut out = Vec::with_capacity(N);
        for &(col, tok) in &tokens {
            let v = tok
                .parse::<T>()
                .map_err(|_| self.err(line, col, format!("invalid value '{tok}' in {what}")))?;
            out.push(v);
        }
        Ok(out.try_into().ok().expect("length checked"))
    }
}

pub fn parse_mesh(text: &str, name: &str) -> Result<Mesh> {
    let mut lines = Lines {
        name,
        inner: text.lines().enumerate(),
        last_line: 0,
    };
    let [nv, nt] = lines.fields::<2, usize>("header 'NV NT'")?;
    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let [x, y] = lines.fields::<2, f64>(&format!("vertex {i}"))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(lines.err(lines.last_line, 1, format!("vertex {i} is not finite")));
        }
        vertices.push([x, y]);
    }
    let mut etov = Vec::with_capacity(nt);
    for k in 0..nt {
        let tri = lines.fields::<3, usize>(&format!("triangle {k}"))?;
        if let Some(&bad) = tri.iter().find(|&&v| v >= nv) {
            return Err(lines.err(
                lines.last_line,
                1,
                format!("triangle {k} references vertex {bad}, but only {nv} vertices exist"),
            ));
        }
        etov.push(tri);
    }
    Mesh::new(vertices, etov)
}
