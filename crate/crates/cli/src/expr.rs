//! Puzzle expressions such as `Z2 wr C4`, `(Z2 x Z2) wr S3` or
//! `@q8.group wr C4 on @square.action`.
//!
//! ```text
//! expr := term ("wr" | "≀") term ["on" @file]
//! term := factor (("x" | "×") factor)*
//! factor := Z<n> | C<n> | S<n> | A<n> | D<2n> | 1 | @file | "(" term ")"
//! ```
//!
//! Columns in errors are 1-based character positions.

use spinning_switches::action::{parse_action, GroupAction};
use spinning_switches::group::io::parse_group;
use spinning_switches::wreath::WreathContext;
use spinning_switches::FiniteGroup;
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupTerm {
    /// `Z<n>` or `C<n>`; the letter is kept for printing.
    Cyclic(char, usize),
    Symmetric(usize),
    Alternating(usize),
    /// `D<2n>`, by order.
    Dihedral(usize),
    Trivial,
    Product(Box<GroupTerm>, Box<GroupTerm>),
    File(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuzzleExpr {
    pub switches: GroupTerm,
    pub spins: GroupTerm,
    pub action_file: Option<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("parse error at column {pos}: expected {}, found {found}", expected.join(" or "))]
    Parse { pos: usize, expected: Vec<&'static str>, found: String },
    #[error("unknown group family {name:?} at column {pos}")]
    UnknownGroupFamily { pos: usize, name: String },
    #[error("invalid action file {path}: {msg}")]
    ActionFileInvalid { path: String, msg: String },
    #[error("cannot build {term}: {msg}")]
    Build { term: String, msg: String },
}

impl ExprError {
    /// Column of a syntax error.
    pub fn position(&self) -> Option<usize> {
        match self {
            ExprError::Parse { pos, .. } | ExprError::UnknownGroupFamily { pos, .. } => Some(*pos),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Family(char, usize),
    One,
    Times,
    Wr,
    On,
    File(String),
    LParen,
    RParen,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Family(c, n) => format!("`{c}{n}`"),
        Tok::One => "`1`".into(),
        Tok::Times => "`x`".into(),
        Tok::Wr => "`wr`".into(),
        Tok::On => "`on`".into(),
        Tok::File(p) => format!("`@{p}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let digits_from = |mut j: usize| {
        let start = j;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        (start, j)
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '≀' => {
                i += 1;
                Tok::Wr
            }
            'x' | '×' => {
                i += 1;
                Tok::Times
            }
            '@' => {
                let start = i + 1;
                i = start;
                while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '(' && chars[i] != ')' {
                    i += 1;
                }
                if i == start {
                    return Err(ExprError::Parse { pos: pos + 1, expected: vec!["a file path"], found: "nothing".into() });
                }
                Tok::File(chars[start..i].iter().collect())
            }
            _ if c.is_ascii_digit() => {
                let (s, e) = digits_from(i);
                let word: String = chars[s..e].iter().collect();
                i = e;
                if word != "1" {
                    return Err(ExprError::Parse { pos, expected: vec!["a group term"], found: format!("`{word}`") });
                }
                Tok::One
            }
            _ if "ZCSAD".contains(c) && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                let (s, e) = digits_from(i + 1);
                let digits: String = chars[s..e].iter().collect();
                i = e;
                let n = digits.parse().map_err(|_| ExprError::Parse {
                    pos: s + 1,
                    expected: vec!["a small number"],
                    found: format!("`{digits}`"),
                })?;
                Tok::Family(c, n)
            }
            _ if c.is_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_alphanumeric() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "wr" => Tok::Wr,
                    "on" => Tok::On,
                    _ => return Err(ExprError::UnknownGroupFamily { pos, name: word }),
                }
            }
            _ => {
                return Err(ExprError::Parse { pos, expected: vec!["a group term"], found: format!("`{c}`") });
            }
        };
        out.push((pos, tok));
    }
    out.push((chars.len() + 1, Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn fail<T>(&self, expected: Vec<&'static str>) -> Result<T, ExprError> {
        let (pos, tok) = &self.toks[self.at];
        Err(ExprError::Parse { pos: *pos, expected, found: describe(tok) })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<PuzzleExpr, ExprError> {
        let switches = self.term()?;
        if self.peek() != &Tok::Wr {
            return self.fail(vec!["`wr`", "`x`"]);
        }
        self.bump();
        let spins = self.term()?;
        let action_file = if self.peek() == &Tok::On {
            self.bump();
            match self.peek().clone() {
                Tok::File(p) => {
                    self.bump();
                    Some(p)
                }
                _ => return self.fail(vec!["`@file`"]),
            }
        } else {
            None
        };
        if self.peek() != &Tok::Eof {
            return self.fail(vec!["`x`", "`on`", "end of input"]);
        }
        Ok(PuzzleExpr { switches, spins, action_file })
    }

    fn term(&mut self) -> Result<GroupTerm, ExprError> {
        let mut t = self.factor()?;
        while self.peek() == &Tok::Times {
            self.bump();
            let rhs = self.factor()?;
            t = GroupTerm::Product(Box::new(t), Box::new(rhs));
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<GroupTerm, ExprError> {
        match self.peek().clone() {
            Tok::Family(c, n) => {
                self.bump();
                Ok(match c {
                    'Z' | 'C' => GroupTerm::Cyclic(c, n),
                    'S' => GroupTerm::Symmetric(n),
                    'A' => GroupTerm::Alternating(n),
                    _ => GroupTerm::Dihedral(n),
                })
            }
            Tok::One => {
                self.bump();
                Ok(GroupTerm::Trivial)
            }
            Tok::File(p) => {
                self.bump();
                Ok(GroupTerm::File(p))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                if self.peek() != &Tok::RParen {
                    return self.fail(vec!["`)`", "`x`"]);
                }
                self.bump();
                Ok(t)
            }
            _ => self.fail(vec!["a group term"]),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<PuzzleExpr, ExprError> {
    let toks = lex(text)?;
    Parser { toks, at: 0 }.expr()
}

impl fmt::Display for GroupTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTerm::Cyclic(c, n) => write!(f, "{c}{n}"),
            GroupTerm::Symmetric(n) => write!(f, "S{n}"),
            GroupTerm::Alternating(n) => write!(f, "A{n}"),
            GroupTerm::Dihedral(n) => write!(f, "D{n}"),
            GroupTerm::Trivial => write!(f, "1"),
            GroupTerm::File(p) => write!(f, "@{p}"),
            GroupTerm::Product(a, b) => match **b {
                GroupTerm::Product(..) => write!(f, "{a} x ({b})"),
                _ => write!(f, "{a} x {b}"),
            },
        }
    }
}

impl fmt::Display for PuzzleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} wr {}", self.switches, self.spins)?;
        if let Some(p) = &self.action_file {
            write!(f, " on @{p}")?;
        }
        Ok(())
    }
}

fn build_err(term: &GroupTerm, e: impl fmt::Display) -> ExprError {
    ExprError::Build { term: term.to_string(), msg: e.to_string() }
}

fn read(path: &str, term: &GroupTerm) -> Result<String, ExprError> {
    std::fs::read_to_string(Path::new(path)).map_err(|e| build_err(term, e))
}

/// The group a term names, as switches or as an abstract spinning group.
pub fn build_group(t: &GroupTerm) -> Result<FiniteGroup, ExprError> {
    let g = match t {
        GroupTerm::Cyclic(_, n) => FiniteGroup::cyclic(*n),
        GroupTerm::Symmetric(n) => FiniteGroup::symmetric(*n),
        GroupTerm::Alternating(n) => FiniteGroup::alternating(*n),
        GroupTerm::Dihedral(n) => FiniteGroup::dihedral(*n),
        GroupTerm::Trivial => Ok(FiniteGroup::trivial()),
        GroupTerm::Product(a, b) => FiniteGroup::direct_product(&build_group(a)?, &build_group(b)?),
        GroupTerm::File(p) => parse_group(&read(p, t)?),
    };
    Ok(g.map_err(|e| build_err(t, e))?.with_name(t.to_string()))
}

/// The default action a term names: rotations for cyclic groups, natural
/// actions for `S`, `A` and `D`, and product actions for products.
pub fn build_action(t: &GroupTerm) -> Result<GroupAction, ExprError> {
    let a = match t {
        GroupTerm::Cyclic(_, n) => GroupAction::rotation(*n),
        GroupTerm::Symmetric(n) => GroupAction::symmetric(*n),
        GroupTerm::Alternating(n) => GroupAction::alternating(*n),
        GroupTerm::Dihedral(n) => GroupAction::dihedral(*n),
        GroupTerm::Trivial => Ok(GroupAction::trivial()),
        GroupTerm::Product(a, b) => GroupAction::product(&build_action(a)?, &build_action(b)?),
        GroupTerm::File(p) => {
            return parse_action(&read(p, t)?, None)
                .map_err(|e| ExprError::ActionFileInvalid { path: p.clone(), msg: e.to_string() });
        }
    };
    a.map_err(|e| build_err(t, e))
}

pub fn build_context(e: &PuzzleExpr) -> Result<WreathContext, ExprError> {
    let g = build_group(&e.switches)?;
    let action = match &e.action_file {
        None => build_action(&e.spins)?,
        Some(p) => {
            let h = build_group(&e.spins)?;
            let text = std::fs::read_to_string(p)
                .map_err(|err| ExprError::ActionFileInvalid { path: p.clone(), msg: err.to_string() })?;
            parse_action(&text, Some(&h)).map_err(|err| ExprError::ActionFileInvalid { path: p.clone(), msg: err.to_string() })?
        }
    };
    let ctx = WreathContext::new(g, action).map_err(|err| ExprError::Build { term: e.to_string(), msg: err.to_string() })?;
    Ok(ctx.with_name(e.to_string()))
}

pub fn parse_puzzle(text: &str) -> Result<WreathContext, ExprError> {
    build_context(&parse_expr(text)?)
}
