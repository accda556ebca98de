//! Concrete ASCII syntax for terms.
//!
//! ```text
//! term    := "\" term | app
//! app     := atom { " " atom }
//! atom    := primary { "[" subst "]" }
//! primary := index | "(" term ")"
//! index   := digit { digit }
//! subst   := "shift" | "lift(" subst ")" | term "/"
//! ```
//!
//! Application is left-associative and closures bind tighter than
//! application. Whitespace between tokens is ignored except that it separates
//! application arguments.

use std::fmt;

use thiserror::Error;

use crate::term::{Subst, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset of the offending input.
    pub offset: usize,
    /// Tokens that would have been accepted at `offset`.
    pub expected: Vec<&'static str>,
    /// The character found instead, `None` at end of input.
    pub found: Option<char>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: expected ", self.offset)?;
        for (i, e) in self.expected.iter().enumerate() {
            if i > 0 {
                write!(f, " or ")?;
            }
            write!(f, "{e}")?;
        }
        match self.found {
            Some(c) => write!(f, ", found {c:?}"),
            None => write!(f, ", found end of input"),
        }
    }
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(&["end of input", "argument", "["]));
    }
    Ok(t)
}

pub fn parse_subst(text: &str) -> Result<Subst, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let s = p.subst()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(&["end of input"]));
    }
    Ok(s)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.pos,
            expected: expected.to_vec(),
            found: self.peek(),
        }
    }

    fn expect(&mut self, c: char, name: &'static str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        if self.peek() == Some('\\') {
            self.pos += 1;
            return Ok(Term::abs(self.term()?));
        }
        self.app()
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut t = self.atom()?;
        loop {
            let save = self.pos;
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == '(' => {
                    let arg = self.atom()?;
                    t = Term::app(t, arg);
                }
                _ => {
                    self.pos = save;
                    return Ok(t);
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let mut t = self.primary()?;
        loop {
            let save = self.pos;
            self.skip_ws();
            if self.peek() == Some('[') {
                self.pos += 1;
                let s = self.subst()?;
                self.expect(']', "]")?;
                t = Term::closure(t, s);
            } else {
                self.pos = save;
                return Ok(t);
            }
        }
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => self.index(),
            Some('(') => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(')', ")")?;
                Ok(t)
            }
            _ => Err(self.error(&["\\", "index", "("])),
        }
    }

    fn index(&mut self) -> Result<Term, ParseError> {
        let start = self.pos;
        let digits = self.src[start..]
            .bytes()
            .take_while(u8::is_ascii_digit)
            .count();
        let text = &self.src[start..start + digits];
        match text.parse::<u64>() {
            Ok(n) => {
                self.pos += digits;
                Ok(Term::Index(n))
            }
            Err(_) => Err(ParseError {
                offset: start,
                expected: vec!["index below 2^64"],
                found: self.peek(),
            }),
        }
    }

    fn subst(&mut self) -> Result<Subst, ParseError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        if rest.starts_with("shift") {
            self.pos += "shift".len();
            return Ok(Subst::Shift);
        }
        if rest.starts_with("lift") {
            self.pos += "lift".len();
            self.expect('(', "(")?;
            let s = self.subst()?;
            self.expect(')', ")")?;
            return Ok(Subst::lift(s));
        }
        match self.peek() {
            Some(c) if c == '\\' || c == '(' || c.is_ascii_digit() => {
                let t = self.term()?;
                self.expect('/', "/")?;
                Ok(Subst::slash(t))
            }
            _ => Err(self.error(&["shift", "lift(", "\\", "index", "("])),
        }
    }
}

/// Canonical text: minimal parentheses, single spaces.
pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

pub fn render_subst(s: &Subst) -> String {
    let mut out = String::new();
    write_subst(s, &mut out);
    out
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Abs(body) => {
            out.push('\\');
            write_term(body, out);
        }
        _ => write_app(t, out),
    }
}

fn write_app(t: &Term, out: &mut String) {
    match t {
        Term::App(f, a) => {
            write_app(f, out);
            out.push(' ');
            write_atom(a, out);
        }
        _ => write_atom(t, out),
    }
}

fn write_atom(t: &Term, out: &mut String) {
    match t {
        Term::Index(n) => out.push_str(&n.to_string()),
        Term::Closure(a, s) => {
            write_atom(a, out);
            out.push('[');
            write_subst(s, out);
            out.push(']');
        }
        Term::Abs(_) | Term::App(..) => {
            out.push('(');
            write_term(t, out);
            out.push(')');
        }
    }
}

fn write_subst(s: &Subst, out: &mut String) {
    match s {
        Subst::Shift => out.push_str("shift"),
        Subst::Lift(inner) => {
            out.push_str("lift(");
            write_subst(inner, out);
            out.push(')');
        }
        Subst::Slash(t) => {
            write_term(t, out);
            out.push('/');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: u64) -> Term {
        Term::index(n)
    }

    #[test]
    fn parses_examples() {
        assert_eq!(parse_term("\\0").unwrap(), Term::abs(idx(0)));
        assert_eq!(
            parse_term("(\\\\1) 0").unwrap(),
            Term::app(Term::abs(Term::abs(idx(1))), idx(0))
        );
        assert_eq!(
            parse_term("0[lift(0/)]").unwrap(),
            Term::closure(idx(0), Subst::lift(Subst::slash(idx(0))))
        );
    }

    #[test]
    fn renders_examples() {
        assert_eq!(render_term(&Term::abs(idx(0))), "\\0");
        assert_eq!(
            render_term(&Term::app(Term::app(idx(0), idx(1)), idx(0))),
            "0 1 0"
        );
        assert_eq!(
            render_term(&Term::closure(idx(0), Subst::Shift)),
            "0[shift]"
        );
        assert_eq!(
            render_term(&Term::app(idx(0), Term::app(idx(1), idx(2)))),
            "0 (1 2)"
        );
        assert_eq!(
            render_term(&Term::closure(
                Term::abs(idx(0)),
                Subst::slash(Term::abs(idx(1)))
            )),
            "(\\0)[\\1/]"
        );
        assert_eq!(
            render_term(&Term::closure(
                Term::closure(idx(0), Subst::Shift),
                Subst::Shift
            )),
            "0[shift][shift]"
        );
    }

    #[test]
    fn whitespace_is_insignificant_between_tokens() {
        let a = parse_term("  ( \\ \\ 1 )   0 [ lift ( 0 / ) ] ").unwrap();
        let b = parse_term("(\\\\1) 0[lift(0/)]").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn slash_payload_may_be_an_application_or_abstraction() {
        let t = parse_term("0[1 2/]").unwrap();
        assert_eq!(
            t,
            Term::closure(idx(0), Subst::slash(Term::app(idx(1), idx(2))))
        );
        let t = parse_term("0[\\0 0/]").unwrap();
        assert_eq!(
            t,
            Term::closure(idx(0), Subst::slash(Term::abs(Term::app(idx(0), idx(0)))))
        );
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_term("0[").unwrap_err();
        assert_eq!(e.offset, 2);
        assert_eq!(e.found, None);
        assert!(e.expected.contains(&"shift"));

        let e = parse_term("0 )").unwrap_err();
        assert_eq!(e.offset, 2);
        assert_eq!(e.found, Some(')'));

        let e = parse_term("").unwrap_err();
        assert_eq!(e.offset, 0);

        let e = parse_term("0[0]").unwrap_err();
        assert_eq!(e.offset, 3);
        assert_eq!(e.expected, vec!["/"]);

        let e = parse_term("(0").unwrap_err();
        assert_eq!(e.expected, vec![")"]);

        assert!(parse_term("99999999999999999999999").is_err());
        assert!(parse_term("0 \\0").is_err());
    }
}
