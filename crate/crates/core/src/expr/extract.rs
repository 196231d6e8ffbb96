//! Pulls the equation or coordinate payload out of a chatty reply.
//!
//! List-numbering prefixes (`{0;0} 0;`, `1.`, `2)`, `-`) are stripped from
//! every line, then the longest token window that parses as the requested
//! payload kind wins. The lexers are the ground truth for what counts as
//! equation- or coordinate-shaped.

use serde::{Deserialize, Serialize};

use super::lexer::{lex_runs, Tok};
use super::parser::Parser;
use super::{ExprError, PayloadKind, RawResponse};
use crate::geom::coords::{coordinate_runs, parse_point_tokens, CTok};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub payload: String,
    /// Some line carried a list-numbering prefix.
    pub stripped_numbering: bool,
    /// Words remained outside the payload.
    pub prose_removed: bool,
}

pub fn extract_payload(response: &RawResponse, kind: PayloadKind) -> Result<String, ExprError> {
    extract_payload_detailed(response.text(), kind).map(|e| e.payload)
}

pub fn extract_payload_detailed(text: &str, kind: PayloadKind) -> Result<Extraction, ExprError> {
    let mut stripped_numbering = false;
    let lines: Vec<&str> = text
        .lines()
        .map(|line| {
            let (rest, stripped) = strip_list_prefix(line);
            stripped_numbering |= stripped;
            rest
        })
        .collect();

    let (payload, leftover) = match kind {
        PayloadKind::Equation => {
            let mut best: Option<(Rank, usize, usize, usize)> = None;
            for (li, line) in lines.iter().enumerate() {
                if let Some((rank, start, end)) = best_equation_window(line) {
                    if best.as_ref().is_none_or(|(r, ..)| rank > *r) {
                        best = Some((rank, li, start, end));
                    }
                }
            }
            let (_, li, start, end) = best.ok_or(ExprError::NoPayloadFound(kind))?;
            let mut leftover = String::new();
            for (i, line) in lines.iter().enumerate() {
                if i == li {
                    leftover.push_str(&line[..start]);
                    leftover.push_str(&line[end..]);
                } else {
                    leftover.push_str(line);
                }
                leftover.push('\n');
            }
            (lines[li][start..end].to_string(), leftover)
        }
        PayloadKind::Coordinates => {
            let joined = lines.join("\n");
            let (_, start, end) =
                best_coordinate_window(&joined).ok_or(ExprError::NoPayloadFound(kind))?;
            let leftover = format!("{}{}", &joined[..start], &joined[end..]);
            (joined[start..end].to_string(), leftover)
        }
    };
    Ok(Extraction {
        payload,
        stripped_numbering,
        prose_removed: leftover.chars().any(|c| c.is_alphabetic()),
    })
}

/// Token count first, then byte length; earlier windows win ties.
type Rank = (usize, usize);

fn best_equation_window(line: &str) -> Option<(Rank, usize, usize)> {
    let mut best: Option<(Rank, usize, usize)> = None;
    for run in lex_runs(line) {
        'lengths: for len in (1..=run.len()).rev() {
            if best.as_ref().is_some_and(|((n, _), ..)| *n > len) {
                break;
            }
            let mut found = false;
            for start in 0..=run.len() - len {
                let window = &run[start..start + len];
                let first = window[0].tok;
                let last = window[len - 1].tok;
                if matches!(first, Tok::Star | Tok::Caret | Tok::RParen | Tok::Plus)
                    || matches!(
                        last,
                        Tok::Plus | Tok::Minus | Tok::Star | Tok::Caret | Tok::LParen | Tok::Func(_)
                    )
                {
                    continue;
                }
                let (s, e) = (window[0].start, window[len - 1].end);
                if strip_list_prefix(&line[s..e]).1 {
                    continue;
                }
                if Parser::new(window, e).parse_all().is_ok() {
                    let rank = (len, e - s);
                    if best.as_ref().is_none_or(|(r, ..)| rank > *r) {
                        best = Some((rank, s, e));
                    }
                    found = true;
                }
            }
            if found {
                break 'lengths;
            }
        }
    }
    best
}

fn best_coordinate_window(text: &str) -> Option<(Rank, usize, usize)> {
    let mut best: Option<(Rank, usize, usize)> = None;
    for run in coordinate_runs(text) {
        'lengths: for len in (1..=run.len()).rev() {
            if best.as_ref().is_some_and(|((n, _), ..)| *n > len) {
                break;
            }
            let mut found = false;
            for start in 0..=run.len() - len {
                let window = &run[start..start + len];
                if !matches!(window[0].tok, CTok::Num(_) | CTok::LParen | CTok::LBrace)
                    || !matches!(window[len - 1].tok, CTok::Num(_) | CTok::RParen | CTok::RBrace)
                {
                    continue;
                }
                let (s, e) = (window[0].start, window[len - 1].end);
                if text[s..e].lines().any(|l| strip_list_prefix(l).1) {
                    continue;
                }
                if parse_point_tokens(window, e).is_ok() {
                    let rank = (len, e - s);
                    if best.as_ref().is_none_or(|(r, ..)| rank > *r) {
                        best = Some((rank, s, e));
                    }
                    found = true;
                }
            }
            if found {
                break 'lengths;
            }
        }
    }
    best
}

/// Removes leading list markers: data-tree paths like `{0;0}`, enumerators
/// like `0;`, `1.`, `2)`, `3:` and bullets `-`, `*`, `•` followed by a space.
pub(crate) fn strip_list_prefix(line: &str) -> (&str, bool) {
    let mut rest = line;
    let mut stripped = false;
    loop {
        let t = rest.trim_start();
        if let Some(after) = strip_tree_path(t) {
            rest = after;
        } else if let Some(after) = strip_enumerator(t) {
            rest = after;
        } else if let Some(after) = strip_bullet(t) {
            rest = after;
        } else {
            break;
        }
        stripped = true;
    }
    if stripped {
        (rest.trim_start(), true)
    } else {
        (line, false)
    }
}

fn strip_tree_path(t: &str) -> Option<&str> {
    let inner_end = t.strip_prefix('{')?.find('}')? + 1;
    let inner = &t[1..inner_end];
    let valid = !inner.is_empty()
        && inner.split(';').all(|part| !part.is_empty() && part.bytes().all(|b| b.is_ascii_digit()));
    valid.then(|| &t[inner_end + 1..])
}

fn strip_enumerator(t: &str) -> Option<&str> {
    let digits = t.bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 {
        return None;
    }
    let after = &t[digits..];
    let mark = after.chars().next()?;
    let rest = &after[1..];
    match mark {
        ')' | ':' | ';' => Some(rest),
        '.' if rest.is_empty() || rest.starts_with(char::is_whitespace) => Some(rest),
        _ => None,
    }
}

fn strip_bullet(t: &str) -> Option<&str> {
    let mark = t.chars().next()?;
    if !matches!(mark, '-' | '*' | '•') {
        return None;
    }
    let rest = &t[mark.len_utf8()..];
    rest.starts_with(char::is_whitespace).then_some(rest)
}
