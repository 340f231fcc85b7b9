//! Concrete ASCII syntax for formulas, terms, bases and derivation files.
//!
//! Formulas: `&` binds tighter than `|`, which binds tighter than `->` and
//! `-<`. `->` associates to the right, `-<` to the left, and the two may not
//! be mixed at one level without parentheses.
//!
//! Terms annotate every constructor with its polarity, e.g.
//! `(\x+. {top+, {p1+(x+), p2-(x+)}-}+)+`. Prefix forms such as `fst+(t)`
//! may repeat the polarity after the closing parenthesis (`fst+(t)+`); the
//! printer never does.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derivation::{Derivation, Judgment, Rule};
use crate::syntax::{check_polarities, Basis, Formula, Name, Polarity, Term, Var, KEYWORDS};

/// Location in the input, counted in Unicode scalar values, all 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line + 1, self.column + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {span}: expected {}, found {found}", expected.join(" or "))]
    Syntax { span: SourceSpan, expected: Vec<String>, found: String },
    #[error("polarity error at {span}: {message}")]
    Polarity { span: SourceSpan, message: String },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Syntax { span, .. } | ParseError::Polarity { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Meta(u32),
    Plus,
    Minus,
    Arrow,
    CoArrow,
    Amp,
    Bar,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Backslash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Meta(i) => format!("`{}`", meta_name(*i)),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::CoArrow => "`-<`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Formula,
    Term,
}

fn lex(text: &str, mode: Mode) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 0usize, 0usize);
    let span = |start: usize, end: usize, line: usize, column: usize| SourceSpan { start, end, line, column };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 0;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (start, sline, scol) = (i, line, col);
        let tok = if c.is_ascii_lowercase() {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
            }
            Tok::Ident(s)
        } else if c == '?' && mode == Mode::Formula {
            i += 1;
            match chars.get(i) {
                Some(l) if l.is_ascii_uppercase() => {
                    let letter = (*l as u32) - ('A' as u32);
                    i += 1;
                    let mut digits = String::new();
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        digits.push(chars[i]);
                        i += 1;
                    }
                    let suffix: u32 = if digits.is_empty() {
                        0
                    } else {
                        digits.parse().map_err(|_| ParseError::Syntax {
                            span: span(start, i, sline, scol),
                            expected: vec!["metavariable".into()],
                            found: format!("`?{l}{digits}`"),
                        })?
                    };
                    Tok::Meta(letter + 26 * suffix)
                }
                _ => {
                    return Err(ParseError::Syntax {
                        span: span(start, i, sline, scol),
                        expected: vec!["metavariable such as `?A`".into()],
                        found: "`?`".into(),
                    })
                }
            }
        } else {
            i += 1;
            match c {
                '+' => Tok::Plus,
                '-' if mode == Mode::Formula && chars.get(i) == Some(&'>') => {
                    i += 1;
                    Tok::Arrow
                }
                '-' if mode == Mode::Formula && chars.get(i) == Some(&'<') => {
                    i += 1;
                    Tok::CoArrow
                }
                '-' => Tok::Minus,
                '&' => Tok::Amp,
                '|' => Tok::Bar,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '<' => Tok::LAngle,
                '>' => Tok::RAngle,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '\\' => Tok::Backslash,
                other => {
                    return Err(ParseError::Syntax {
                        span: span(start, i, sline, scol),
                        expected: vec!["a token".into()],
                        found: format!("character `{other}`"),
                    })
                }
            }
        };
        col += i - start;
        out.push((tok, span(start, i, sline, scol)));
    }
    out.push((Tok::Eof, span(i, i, line, col)));
    Ok(out)
}

/// Spans of a parsed term, mirroring its child structure.
#[derive(Debug, Clone)]
struct SpanTree {
    span: SourceSpan,
    children: Vec<SpanTree>,
}

impl SpanTree {
    fn at(&self, path: &[usize]) -> SourceSpan {
        let mut cur = self;
        for &i in path {
            match cur.children.get(i) {
                Some(c) => cur = c,
                None => break,
            }
        }
        cur.span
    }
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str, mode: Mode) -> PResult<Parser> {
        Ok(Parser { toks: lex(text, mode)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].1.end
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError::Syntax {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&[&tok.describe()])
        }
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> PResult<Formula> {
        let first = self.disjunction()?;
        match self.peek() {
            Tok::Arrow => {
                let mut items = vec![first];
                while *self.peek() == Tok::Arrow {
                    self.bump();
                    items.push(self.disjunction()?);
                }
                if *self.peek() == Tok::CoArrow {
                    return self.mixing_error();
                }
                let mut acc = items.pop().expect("non-empty chain");
                while let Some(prev) = items.pop() {
                    acc = Formula::imp(prev, acc);
                }
                Ok(acc)
            }
            Tok::CoArrow => {
                let mut acc = first;
                while *self.peek() == Tok::CoArrow {
                    self.bump();
                    acc = Formula::coimp(acc, self.disjunction()?);
                }
                if *self.peek() == Tok::Arrow {
                    return self.mixing_error();
                }
                Ok(acc)
            }
            _ => Ok(first),
        }
    }

    fn mixing_error<T>(&self) -> PResult<T> {
        Err(ParseError::Syntax {
            span: self.span(),
            expected: vec!["parentheses around mixed `->`/`-<`".into()],
            found: self.peek().describe(),
        })
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut acc = self.formula_atom()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            acc = Formula::and(acc, self.formula_atom()?);
        }
        Ok(acc)
    }

    fn formula_atom(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(match s.as_str() {
                    "top" => Formula::Verum,
                    "bot" => Formula::Falsum,
                    _ => Formula::Atom(Name::from(s)),
                })
            }
            Tok::Meta(i) => {
                self.bump();
                Ok(Formula::Meta(i))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.error(&["atom", "`top`", "`bot`", "`(`"]),
        }
    }

    // ---- terms ----

    fn pol(&mut self) -> PResult<Polarity> {
        match self.peek() {
            Tok::Plus => {
                self.bump();
                Ok(Polarity::Pos)
            }
            Tok::Minus => {
                self.bump();
                Ok(Polarity::Neg)
            }
            _ => self.error(&["`+`", "`-`"]),
        }
    }

    /// Optional repeated polarity after a prefix form; must agree.
    fn trailing_pol(&mut self, p: Polarity) -> PResult<()> {
        let span = self.span();
        let q = match self.peek() {
            Tok::Plus => Polarity::Pos,
            Tok::Minus => Polarity::Neg,
            _ => return Ok(()),
        };
        self.bump();
        if q != p {
            return Err(ParseError::Polarity {
                span,
                message: format!("trailing polarity {q} contradicts the leading polarity {p}"),
            });
        }
        Ok(())
    }

    fn binder(&mut self) -> PResult<Var> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                let pol = self.pol()?;
                Ok(Var { name: Name::from(s), pol })
            }
            _ => self.error(&["variable"]),
        }
    }

    fn term(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.span();
        let (term, children) = self.term_inner()?;
        let end = self.prev_end();
        let span = SourceSpan { end, ..start };
        Ok((term, SpanTree { span, children }))
    }

    fn unary(&mut self, build: fn(Term, Polarity) -> Term) -> PResult<(Term, Vec<SpanTree>)> {
        self.bump();
        let p = self.pol()?;
        self.expect(Tok::LParen)?;
        let (t, s) = self.term()?;
        self.expect(Tok::RParen)?;
        self.trailing_pol(p)?;
        Ok((build(t, p), vec![s]))
    }

    fn term_inner(&mut self) -> PResult<(Term, Vec<SpanTree>)> {
        match self.peek().clone() {
            Tok::Ident(s) => match s.as_str() {
                "top" | "bot" => {
                    let span = self.span();
                    self.bump();
                    let p = self.pol()?;
                    let (term, forced) = if s == "top" {
                        (Term::Top, Polarity::Pos)
                    } else {
                        (Term::Bot, Polarity::Neg)
                    };
                    if p != forced {
                        return Err(ParseError::Polarity {
                            span: SourceSpan { end: self.prev_end(), ..span },
                            message: format!("`{s}` always has polarity {forced}"),
                        });
                    }
                    Ok((term, vec![]))
                }
                "abort" => self.unary(Term::abort),
                "fst" => self.unary(Term::fst),
                "snd" => self.unary(Term::snd),
                "inl" => self.unary(Term::inl),
                "inr" => self.unary(Term::inr),
                "p1" => self.unary(Term::pi1),
                "p2" => self.unary(Term::pi2),
                "app" => {
                    self.bump();
                    let p = self.pol()?;
                    self.expect(Tok::LParen)?;
                    let (f, fs) = self.term()?;
                    self.expect(Tok::Comma)?;
                    let (a, as_) = self.term()?;
                    self.expect(Tok::RParen)?;
                    self.trailing_pol(p)?;
                    Ok((Term::app(f, a, p), vec![fs, as_]))
                }
                "case" => {
                    self.bump();
                    let (r, rs) = self.term()?;
                    self.expect(Tok::LBrace)?;
                    let x = self.binder()?;
                    self.expect(Tok::Dot)?;
                    let (s, ss) = self.term()?;
                    self.expect(Tok::Bar)?;
                    let y = self.binder()?;
                    self.expect(Tok::Dot)?;
                    let (t, ts) = self.term()?;
                    self.expect(Tok::RBrace)?;
                    let p = self.pol()?;
                    Ok((Term::case(r, x, s, y, t, p), vec![rs, ss, ts]))
                }
                _ => {
                    let v = self.binder()?;
                    Ok((Term::Var(v), vec![]))
                }
            },
            Tok::LAngle => {
                self.bump();
                let (l, ls) = self.term()?;
                self.expect(Tok::Comma)?;
                let (r, rs) = self.term()?;
                self.expect(Tok::RAngle)?;
                let p = self.pol()?;
                Ok((Term::pair(l, r, p), vec![ls, rs]))
            }
            Tok::LBrace => {
                self.bump();
                let (l, ls) = self.term()?;
                self.expect(Tok::Comma)?;
                let (r, rs) = self.term()?;
                self.expect(Tok::RBrace)?;
                let p = self.pol()?;
                Ok((Term::mpair(l, r, p), vec![ls, rs]))
            }
            Tok::LParen => {
                if *self.peek_at(1) == Tok::Backslash {
                    self.bump();
                    self.bump();
                    let x = self.binder()?;
                    self.expect(Tok::Dot)?;
                    let (body, bs) = self.term()?;
                    self.expect(Tok::RParen)?;
                    let p = self.pol()?;
                    Ok((Term::lam(x, body, p), vec![bs]))
                } else {
                    self.bump();
                    let (t, s) = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok((t, s.children))
                }
            }
            _ => self.error(&["term"]),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, Mode::Formula)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a term and checks its polarity well-formedness.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, Mode::Term)?;
    let (t, spans) = p.term()?;
    p.finish()?;
    if let Err(violations) = check_polarities(&t) {
        let v = &violations[0];
        return Err(ParseError::Polarity { span: spans.at(&v.path), message: v.message.clone() });
    }
    Ok(t)
}

pub fn meta_name(i: u32) -> String {
    let letter = char::from(b'A' + (i % 26) as u8);
    if i < 26 {
        format!("?{letter}")
    } else {
        format!("?{letter}{}", i / 26)
    }
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) | Formula::CoImp(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    let wrap = |g: &Formula, parens: bool, out: &mut String| {
        if parens {
            out.push('(');
            write_formula(g, out);
            out.push(')');
        } else {
            write_formula(g, out);
        }
    };
    match f {
        Formula::Atom(n) => out.push_str(n),
        Formula::Falsum => out.push_str("bot"),
        Formula::Verum => out.push_str("top"),
        Formula::Meta(i) => out.push_str(&meta_name(*i)),
        Formula::And(a, b) => {
            wrap(a, level(a) < 3, out);
            out.push_str(" & ");
            wrap(b, level(b) <= 3, out);
        }
        Formula::Or(a, b) => {
            wrap(a, level(a) < 2, out);
            out.push_str(" | ");
            wrap(b, level(b) <= 2, out);
        }
        Formula::Imp(a, b) => {
            wrap(a, level(a) <= 1, out);
            out.push_str(" -> ");
            wrap(b, matches!(**b, Formula::CoImp(..)), out);
        }
        Formula::CoImp(a, b) => {
            wrap(a, matches!(**a, Formula::Imp(..)), out);
            out.push_str(" -< ");
            wrap(b, level(b) <= 1, out);
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, &mut s);
    s
}

fn write_term(t: &Term, out: &mut String) {
    use std::fmt::Write;
    let unary = |kw: &str, b: &Term, p: Polarity, out: &mut String| {
        let _ = write!(out, "{kw}{p}(");
        write_term(b, out);
        out.push(')');
    };
    let binary = |open: &str, close: &str, a: &Term, b: &Term, out: &mut String| {
        out.push_str(open);
        write_term(a, out);
        out.push_str(", ");
        write_term(b, out);
        out.push_str(close);
    };
    match t {
        Term::Var(v) => {
            let _ = write!(out, "{v}");
        }
        Term::Top => out.push_str("top+"),
        Term::Bot => out.push_str("bot-"),
        Term::Abort(b, p) => unary("abort", b, *p, out),
        Term::Fst(b, p) => unary("fst", b, *p, out),
        Term::Snd(b, p) => unary("snd", b, *p, out),
        Term::Inl(b, p) => unary("inl", b, *p, out),
        Term::Inr(b, p) => unary("inr", b, *p, out),
        Term::Pi1(b, p) => unary("p1", b, *p, out),
        Term::Pi2(b, p) => unary("p2", b, *p, out),
        Term::Pair(a, b, p) => binary("<", &format!(">{p}"), a, b, out),
        Term::MPair(a, b, p) => binary("{", &format!("}}{p}"), a, b, out),
        Term::App(a, b, p) => binary(&format!("app{p}("), ")", a, b, out),
        Term::Lam(x, b, p) => {
            let _ = write!(out, "(\\{x}. ");
            write_term(b, out);
            let _ = write!(out, "){p}");
        }
        Term::Case { scrutinee, left, left_body, right, right_body, pol } => {
            out.push_str("case ");
            write_term(scrutinee, out);
            let _ = write!(out, " {{{left}. ");
            write_term(left_body, out);
            let _ = write!(out, " | {right}. ");
            write_term(right_body, out);
            let _ = write!(out, "}}{pol}");
        }
    }
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(t, &mut s);
    s
}

pub fn print_basis(b: &Basis) -> String {
    let side = |pol: Polarity| {
        b.side(pol)
            .iter()
            .map(|(n, f)| format!("{n}{pol}: {}", print_formula(f)))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let delta = side(Polarity::Neg);
    if delta.is_empty() {
        format!("({};)", side(Polarity::Pos))
    } else {
        format!("({}; {delta})", side(Polarity::Pos))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_basis(self))
    }
}

// ---- derivation files ----

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NodeJson {
    rule: String,
    concl: ConclJson,
    #[serde(default)]
    prems: Vec<NodeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConclJson {
    #[serde(default)]
    gamma: Vec<(String, String)>,
    #[serde(default)]
    delta: Vec<(String, String)>,
    pol: String,
    term: String,
    #[serde(rename = "type")]
    ty: String,
}

#[derive(Debug, Error)]
pub enum DerivationFileError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{at}: unknown rule `{rule}`")]
    UnknownRule { at: String, rule: String },
    #[error("{at}: polarity must be \"+\" or \"-\", found {found:?}")]
    BadPolarity { at: String, found: String },
    #[error("{at}: {source}")]
    Parse {
        at: String,
        #[source]
        source: ParseError,
    },
    #[error("{at}: invalid variable name `{name}`")]
    BadName { at: String, name: String },
    #[error("{at}: variable `{name}` listed twice")]
    DuplicateEntry { at: String, name: String },
}

fn node_to_json(d: &Derivation) -> NodeJson {
    let side = |pol: Polarity| {
        d.concl.basis.side(pol).iter().map(|(n, f)| (n.to_string(), print_formula(f))).collect()
    };
    NodeJson {
        rule: d.rule.name().to_string(),
        concl: ConclJson {
            gamma: side(Polarity::Pos),
            delta: side(Polarity::Neg),
            pol: d.concl.pol.to_string(),
            term: print_term(&d.concl.term),
            ty: print_formula(&d.concl.ty),
        },
        prems: d.prems.iter().map(node_to_json).collect(),
    }
}

fn valid_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&s)
}

fn node_from_json(n: &NodeJson, at: &str) -> Result<Derivation, DerivationFileError> {
    let rule: Rule = n
        .rule
        .parse()
        .map_err(|_| DerivationFileError::UnknownRule { at: at.to_string(), rule: n.rule.clone() })?;
    let pol = match n.concl.pol.as_str() {
        "+" => Polarity::Pos,
        "-" => Polarity::Neg,
        other => return Err(DerivationFileError::BadPolarity { at: format!("{at}.concl.pol"), found: other.into() }),
    };
    let parse_f = |s: &str, field: &str| {
        parse_formula(s).map_err(|source| DerivationFileError::Parse { at: format!("{at}.concl.{field}"), source })
    };
    let mut basis = Basis::new();
    for (pol, entries, field) in [(Polarity::Pos, &n.concl.gamma, "gamma"), (Polarity::Neg, &n.concl.delta, "delta")] {
        for (name, f) in entries {
            if !valid_name(name) {
                return Err(DerivationFileError::BadName { at: format!("{at}.concl.{field}"), name: name.clone() });
            }
            let v = Var::new(name, pol);
            if basis.insert(&v, parse_f(f, field)?).is_some() {
                return Err(DerivationFileError::DuplicateEntry { at: format!("{at}.concl.{field}"), name: name.clone() });
            }
        }
    }
    let term = parse_term(&n.concl.term)
        .map_err(|source| DerivationFileError::Parse { at: format!("{at}.concl.term"), source })?;
    let ty = parse_f(&n.concl.ty, "type")?;
    let prems = n
        .prems
        .iter()
        .enumerate()
        .map(|(i, p)| node_from_json(p, &format!("{at}.prems[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Derivation { rule, concl: Judgment { basis, pol, term, ty }, prems })
}

pub fn derivation_to_json(d: &Derivation) -> serde_json::Value {
    serde_json::to_value(node_to_json(d)).expect("derivation nodes always serialize")
}

pub fn print_derivation_json(d: &Derivation, pretty: bool) -> String {
    let node = node_to_json(d);
    if pretty {
        serde_json::to_string_pretty(&node)
    } else {
        serde_json::to_string(&node)
    }
    .expect("derivation nodes always serialize")
}

pub fn parse_derivation_json(text: &str) -> Result<Derivation, DerivationFileError> {
    let node: NodeJson = serde_json::from_str(text)?;
    node_from_json(&node, "root")
}
