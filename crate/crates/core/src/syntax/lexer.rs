use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// `[A-Za-z0-9_]+`; identifiers, keywords and atoms alike
    Word(String),
    /// `$name`
    Dollar(String),
    /// `@name`
    At(String),
    Str(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Assign,
    Eq,
    Neq,
    Bang,
    Amp,
    Bar,
    Arrow,
    Iff,
    Lt,
    Gt,
    Dot,
    Slash,
    Minus,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let bump = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            bump(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two = |a: char, b: char| c == a && chars.get(i + 1) == Some(&b);
        let push = |tok: Tok, out: &mut Vec<Token>| out.push(Token { tok, line: tl, col: tc });
        if word_char(c) || ((c == '$' || c == '@') && chars.get(i + 1).is_some_and(|&d| word_char(d))) {
            let start = if word_char(c) { i } else { i + 1 };
            let mut j = start;
            while j < chars.len() && word_char(chars[j]) {
                j += 1;
            }
            let w: String = chars[start..j].iter().collect();
            let tok = match c {
                '$' => Tok::Dollar(w),
                '@' => Tok::At(w),
                _ => Tok::Word(w),
            };
            push(tok, &mut out);
            col += j - i;
            i = j;
            continue;
        }
        if c == '"' {
            let mut j = i + 1;
            let mut s = String::new();
            while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                s.push(chars[j]);
                j += 1;
            }
            if j >= chars.len() || chars[j] != '"' {
                return Err(Error::Syntax { line: tl, col: tc, msg: "unterminated string".into() });
            }
            push(Tok::Str(s), &mut out);
            col += j + 1 - i;
            i = j + 1;
            continue;
        }
        let (tok, n) = if two(':', '=') {
            (Tok::Assign, 2)
        } else if two('!', '=') {
            (Tok::Neq, 2)
        } else if two('-', '>') {
            (Tok::Arrow, 2)
        } else if c == '<' && chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
            (Tok::Iff, 3)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                '!' => Tok::Bang,
                '&' => Tok::Amp,
                '|' => Tok::Bar,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '.' => Tok::Dot,
                '/' => Tok::Slash,
                '-' => Tok::Minus,
                _ => {
                    return Err(Error::Syntax {
                        line: tl,
                        col: tc,
                        msg: alloc::format!("unexpected character `{c}`"),
                    })
                }
            };
            (t, 1)
        };
        push(tok, &mut out);
        bump(n, &mut i, &mut col);
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("f(x) := $y // c\n <-> @Z").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            [
                Tok::Word("f".into()),
                Tok::LParen,
                Tok::Word("x".into()),
                Tok::RParen,
                Tok::Assign,
                Tok::Dollar("y".into()),
                Tok::Iff,
                Tok::At("Z".into()),
                Tok::Eof
            ]
        );
        assert_eq!((toks[6].line, toks[6].col), (2, 2));
    }

    #[test]
    fn bad_character_is_positioned() {
        assert_eq!(
            tokenize("a\n  #"),
            Err(Error::Syntax { line: 2, col: 3, msg: "unexpected character `#`".into() })
        );
    }
}
