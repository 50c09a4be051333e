//! Plain-text matrix files.
//!
//! ```text
//! # comments run to end of line
//! 2
//! 0  2
//! 0  0.5-1.25i
//! ```
//!
//! The first non-comment line is the order `n`, followed by `n` rows of `n`
//! whitespace-separated entries written as `re`, `re+imi` or `re-imi`.

use std::fmt::Write as _;

use numrad::{ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Parses one entry. Splits at the last `+` or `-` that is not the leading sign
/// and does not follow an exponent marker.
pub fn parse_entry(token: &str) -> Option<C64> {
    let bytes = token.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let value = match (split, token.strip_suffix('i')) {
        (Some(k), Some(_)) => {
            let re: f64 = token[..k].parse().ok()?;
            let im: f64 = token[k..token.len() - 1].parse().ok()?;
            C64::new(re, im)
        }
        (None, Some(im)) if !im.is_empty() => C64::new(0.0, im.parse().ok()?),
        (_, None) => C64::new(token.parse().ok()?, 0.0),
        _ => return None,
    };
    (value.re.is_finite() && value.im.is_finite()).then_some(value)
}

pub fn parse(text: &str) -> Result<ComplexMatrix, ParseError> {
    // (line number, column of each token, token)
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (c, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(c),
                (true, Some(s)) => {
                    tokens.push((s + 1, &body[s..c]));
                    start = None;
                }
                _ => {}
            }
        }
        (!tokens.is_empty()).then_some((i + 1, tokens))
    });

    let (line, header) = lines.next().ok_or_else(|| err(1, 1, "empty matrix file"))?;
    if header.len() != 1 {
        return Err(err(line, header[1].0, "expected the matrix order alone on the first line"));
    }
    let n: usize = header[0]
        .1
        .parse()
        .map_err(|_| err(line, header[0].0, format!("invalid matrix order {:?}", header[0].1)))?;
    if n == 0 {
        return Err(err(line, header[0].0, "matrix order must be positive"));
    }
    let mut data = Vec::with_capacity(n * n);
    let mut last_line = line;
    for row in 0..n {
        let Some((line, tokens)) = lines.next() else {
            return Err(err(last_line + 1, 1, format!("expected {n} rows, found {row}")));
        };
        last_line = line;
        if tokens.len() != n {
            let column = tokens.get(n).map_or(tokens.last().map_or(1, |t| t.0), |t| t.0);
            return Err(err(line, column, format!("expected {n} entries, found {}", tokens.len())));
        }
        for (column, token) in tokens {
            let v = parse_entry(token)
                .ok_or_else(|| err(line, column, format!("invalid entry {token:?}")))?;
            data.push(v);
        }
    }
    if let Some((line, tokens)) = lines.next() {
        return Err(err(line, tokens[0].0, "unexpected content after the last row"));
    }
    Ok(ComplexMatrix::from_row_major(n, n, data).expect("entries checked finite"))
}

/// Renders an entry so that [`parse_entry`] recovers it bit for bit.
pub fn render_entry(z: C64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        format!("{:e}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{:e}-{:e}i", z.re, -z.im)
    } else {
        format!("{:e}+{:e}i", z.re, z.im)
    }
}

pub fn render(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", m.rows());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| render_entry(m[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
