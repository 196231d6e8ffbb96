//! Coordinate payloads: `(a,b,c)`, `{a,b,c}` or bare `a,b,c` tuples.
//!
//! Bracketed tuples may be separated by whitespace, commas, semicolons or
//! newlines. Bare tuples need a newline or `;` between them, otherwise
//! `1,0,2,3,0,4` would be ambiguous.

use super::{GeomError, Point3, SectionPlane, TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum CTok {
    Num(f64),
    Comma,
    Semi,
    Newline,
    LParen,
    RParen,
    LBrace,
    RBrace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CToken {
    pub tok: CTok,
    pub start: usize,
    pub end: usize,
}

/// `[+-]? (digits [. digits] | . digits)`; the sign must touch the digits.
fn lex_number(text: &str, start: usize) -> Option<(f64, usize)> {
    let bytes = text.as_bytes();
    let mut i = start;
    if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
        i += 1;
    }
    let digits_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let int_digits = i - digits_start;
    if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    } else if int_digits == 0 {
        return None;
    }
    text[start..i].parse().ok().map(|v| (v, i))
}

pub(crate) fn coordinate_runs(text: &str) -> Vec<Vec<CToken>> {
    let bytes = text.as_bytes();
    let mut runs = Vec::new();
    let mut cur: Vec<CToken> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let simple = match c {
            b',' => Some(CTok::Comma),
            b';' => Some(CTok::Semi),
            b'\n' => Some(CTok::Newline),
            b'(' => Some(CTok::LParen),
            b')' => Some(CTok::RParen),
            b'{' => Some(CTok::LBrace),
            b'}' => Some(CTok::RBrace),
            _ => None,
        };
        if let Some(tok) = simple {
            cur.push(CToken { tok, start: i, end: i + 1 });
            i += 1;
            continue;
        }
        if c == b' ' || c == b'\t' || c == b'\r' {
            i += 1;
            continue;
        }
        if let Some((v, end)) = lex_number(text, i) {
            // "1.5.2" or "3x": a number glued to junk is not coordinate text
            let glued = text[end..].chars().next().is_some_and(|n| n.is_alphanumeric() || n == '.');
            if !glued {
                cur.push(CToken { tok: CTok::Num(v), start: i, end });
                i = end;
                continue;
            }
            i = end;
        } else {
            i += text[i..].chars().next().map_or(1, char::len_utf8);
        }
        if !cur.is_empty() {
            runs.push(std::mem::take(&mut cur));
        }
        // skip the rest of an alphanumeric word
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'.') {
            i += 1;
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    runs
}

fn is_sep(t: CTok) -> bool {
    matches!(t, CTok::Comma | CTok::Semi | CTok::Newline)
}

/// A point and the byte offset it starts at.
pub(crate) type Located = (usize, [f64; 3]);

/// Parses a token window into points; errors carry offset and expectation.
pub(crate) fn parse_point_tokens(toks: &[CToken], end_offset: usize) -> Result<Vec<Located>, (usize, String)> {
    let at = |i: usize| toks.get(i).map_or(end_offset, |t| t.start);
    let err = |i: usize, what: &str| Err((at(i), what.to_string()));
    let mut i = 0;
    let mut points = Vec::new();
    while i < toks.len() && is_sep(toks[i].tok) {
        i += 1;
    }
    if i == toks.len() {
        return err(i, "a coordinate tuple");
    }
    loop {
        let start = i;
        let close = match toks[i].tok {
            CTok::LParen => Some(CTok::RParen),
            CTok::LBrace => Some(CTok::RBrace),
            CTok::Num(_) => None,
            _ => return err(i, "'(', '{' or a number"),
        };
        if close.is_some() {
            i += 1;
        }
        let mut xyz = [0.0; 3];
        for (k, slot) in xyz.iter_mut().enumerate() {
            if k > 0 {
                if toks.get(i).map(|t| t.tok) != Some(CTok::Comma) {
                    return err(i, "','");
                }
                i += 1;
            }
            match toks.get(i).map(|t| t.tok) {
                Some(CTok::Num(v)) => *slot = v,
                _ => return err(i, "a number"),
            }
            i += 1;
        }
        if let Some(close) = close {
            if toks.get(i).map(|t| t.tok) != Some(close) {
                return err(i, if close == CTok::RParen { "')'" } else { "'}'" });
            }
            i += 1;
        }
        points.push((at(start), xyz));
        let mut line_break = false;
        while i < toks.len() && is_sep(toks[i].tok) {
            line_break |= matches!(toks[i].tok, CTok::Newline | CTok::Semi);
            i += 1;
        }
        if i == toks.len() {
            return Ok(points);
        }
        if close.is_none() && !line_break {
            return err(i, "a newline or ';' after a bare tuple");
        }
    }
}

/// Parses coordinate tuples and checks count and plane membership.
pub fn parse_coordinates(
    payload: &str,
    expected_count: Option<usize>,
    plane: SectionPlane,
) -> Result<Vec<Point3>, GeomError> {
    let points = parse_points(payload, expected_count)?;
    for (index, p) in points.iter().enumerate() {
        let value = plane.axis.of(*p);
        if (value - plane.value).abs() > TOL {
            return Err(GeomError::PlaneViolation { index, value });
        }
    }
    Ok(points)
}

/// Parses coordinate tuples and checks their count, in any plane.
pub fn parse_points(payload: &str, expected_count: Option<usize>) -> Result<Vec<Point3>, GeomError> {
    let runs = coordinate_runs(payload);
    // the whole payload must be coordinate text: one run, nothing else
    let toks = match runs.as_slice() {
        [] => {
            let position = payload.find(|c: char| !c.is_whitespace()).unwrap_or(0);
            return Err(GeomError::Syntax { position, expected: "a coordinate tuple".into() });
        }
        [only] => only,
        [first, second, ..] => {
            let gap_start = first.last().map_or(0, |t| t.end);
            let position = payload[gap_start..second[0].start]
                .find(|c: char| !c.is_whitespace())
                .map_or(gap_start, |n| gap_start + n);
            return Err(GeomError::Syntax { position, expected: "coordinate text".into() });
        }
    };
    let leading = &payload[..toks[0].start];
    let trailing = &payload[toks.last().map_or(0, |t| t.end)..];
    if let Some(n) = leading.find(|c: char| !c.is_whitespace()) {
        return Err(GeomError::Syntax { position: n, expected: "a coordinate tuple".into() });
    }
    if let Some(n) = trailing.find(|c: char| !c.is_whitespace()) {
        return Err(GeomError::Syntax {
            position: payload.len() - trailing.len() + n,
            expected: "end of input".into(),
        });
    }
    let parsed = parse_point_tokens(toks, payload.len())
        .map_err(|(position, expected)| GeomError::Syntax { position, expected })?;
    if let Some(expected) = expected_count {
        if parsed.len() != expected {
            return Err(GeomError::CountMismatch { found: parsed.len(), expected });
        }
    }
    Ok(parsed.into_iter().map(|(_, xyz)| Point3::from(xyz)).collect())
}
