use super::ast::{Function, Variable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Var(Variable),
    Func(Function),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    /// Byte span in the lexed text.
    pub start: usize,
    pub end: usize,
}

/// Splits a letter word into `sin`/`cos`/`tan`/`x`/`y`/`z` tokens.
fn split_word(word: &str, offset: usize, out: &mut Vec<Token>) -> bool {
    let bytes = word.as_bytes();
    let mut i = 0;
    let mark = out.len();
    while i < bytes.len() {
        let rest = &word[i..];
        let (tok, len) = if let Some(f) = [Function::Sin, Function::Cos, Function::Tan]
            .into_iter()
            .find(|f| rest.starts_with(f.name()))
        {
            (Tok::Func(f), 3)
        } else {
            match bytes[i] {
                b'x' => (Tok::Var(Variable::X), 1),
                b'y' => (Tok::Var(Variable::Y), 1),
                b'z' => (Tok::Var(Variable::Z), 1),
                _ => {
                    out.truncate(mark);
                    return false;
                }
            }
        };
        out.push(Token { tok, start: offset + i, end: offset + i + len });
        i += len;
    }
    true
}

/// Lexes `text` into runs of tokens. A run ends at any character (or letter
/// word) that is not part of the expression alphabet.
pub(crate) fn lex_runs(text: &str) -> Vec<Vec<Token>> {
    let mut runs = Vec::new();
    let mut cur = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let flush = |cur: &mut Vec<Token>, runs: &mut Vec<Vec<Token>>| {
        if !cur.is_empty() {
            runs.push(std::mem::take(cur));
        }
    };
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'0'..=b'9' | b'.' => match lex_number(text, i) {
                Some((value, end)) => {
                    cur.push(Token { tok: Tok::Num(value), start: i, end });
                    i = end;
                }
                None => {
                    flush(&mut cur, &mut runs);
                    i += 1;
                }
            },
            b'a'..=b'z' | b'A'..=b'Z' => {
                let end = text[i..]
                    .find(|ch: char| !ch.is_ascii_alphabetic())
                    .map_or(text.len(), |n| i + n);
                if !split_word(&text[i..end], i, &mut cur) {
                    flush(&mut cur, &mut runs);
                }
                i = end;
            }
            _ => {
                let tok = match c {
                    b'+' => Some(Tok::Plus),
                    b'-' => Some(Tok::Minus),
                    b'*' => Some(Tok::Star),
                    b'^' => Some(Tok::Caret),
                    b'(' => Some(Tok::LParen),
                    b')' => Some(Tok::RParen),
                    _ => None,
                };
                match tok {
                    Some(tok) => cur.push(Token { tok, start: i, end: i + 1 }),
                    None => flush(&mut cur, &mut runs),
                }
                // skip the whole UTF-8 sequence
                i += text[i..].chars().next().map_or(1, char::len_utf8);
            }
        }
    }
    flush(&mut cur, &mut runs);
    runs
}

/// Lexes the whole text; fails at the first character outside the alphabet.
pub(crate) fn lex(text: &str) -> Result<Vec<Token>, usize> {
    let runs = lex_runs(text);
    let mut tokens: Vec<Token> = Vec::new();
    let mut last_end = 0;
    for run in runs {
        let gap = &text[last_end..run[0].start];
        if let Some(bad) = gap.find(|c: char| !c.is_whitespace()) {
            return Err(last_end + bad);
        }
        last_end = run.last().map_or(last_end, |t| t.end);
        tokens.extend(run);
    }
    if let Some(bad) = text[last_end..].find(|c: char| !c.is_whitespace()) {
        return Err(last_end + bad);
    }
    Ok(tokens)
}

/// `digits [. digits]` or `. digits`.
fn lex_number(text: &str, start: usize) -> Option<(f64, usize)> {
    let bytes = text.as_bytes();
    let mut i = start;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let int_digits = i - start;
    if i < bytes.len() && bytes[i] == b'.' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    } else if int_digits == 0 {
        return None;
    }
    text[start..i].parse().ok().map(|v| (v, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_adjacent_variables_and_functions() {
        let toks = lex("2xyz + sin(x)cos(y)").unwrap();
        let kinds: Vec<Tok> = toks.iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Num(2.0),
                Tok::Var(Variable::X),
                Tok::Var(Variable::Y),
                Tok::Var(Variable::Z),
                Tok::Plus,
                Tok::Func(Function::Sin),
                Tok::LParen,
                Tok::Var(Variable::X),
                Tok::RParen,
                Tok::Func(Function::Cos),
                Tok::LParen,
                Tok::Var(Variable::Y),
                Tok::RParen,
            ]
        );
    }

    #[test]
    fn prose_breaks_runs() {
        let runs = lex_runs("The weather is nice.");
        assert!(runs.is_empty());
        let runs = lex_runs("Here is x^2 + y, enjoy");
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].len(), 5);
    }

    #[test]
    fn rejects_unknown_characters() {
        assert_eq!(lex("x / y"), Err(2));
        assert_eq!(lex("exp(x)"), Err(0));
        assert!(lex("  1.5x  ").is_ok());
    }
}
