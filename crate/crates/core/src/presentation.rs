//! Finite presentations: parsing, printing, and the integer matrices and
//! derived presentations the homology pipeline consumes.
//!
//! Grammar (ASCII):
//!
//! ```text
//! presentation := '<' gens '|' relators '>'
//! gens         := ident (',' ident)*
//! relators     := word (',' word)*
//! word         := term (('*' | WS) term)*
//! term         := factor ('^' sint)?
//! factor       := ident | '(' word ')' | '[' word ',' word ']'
//! ```
//!
//! Declared torsion is given by sidecar lines `!torsion rel=<index> order=<n>`
//! (relator indices are 0-based).

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::free_group::{Alphabet, FreeGroupError, GeneratorId, Letter, Word};
use crate::int_linalg::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown generator `{name}` at line {line}, column {col}")]
    UnknownGenerator { name: String, line: usize, col: usize },
    #[error("degenerate relator #{0}: reduces to the identity")]
    DegenerateRelator(usize),
    #[error("invalid torsion declaration: {0}")]
    InvalidTorsion(String),
    #[error("relator #{0} is not a power of a single generator")]
    NotGeneratorPower(usize),
    #[error("operation requires {0} torsion mode")]
    WrongMode(&'static str),
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TorsionMode {
    /// Torsion subgroups are generated by the roots of the relators.
    DeriveFromRoots,
    /// Torsion subgroups are the declared relator/order pairs.
    Declared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorsionDeclaration {
    pub relator: usize,
    pub order: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
    mode: TorsionMode,
    declared: Vec<TorsionDeclaration>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self, PresentationError> {
        for (i, r) in relators.iter().enumerate() {
            if r.is_identity() {
                return Err(PresentationError::DegenerateRelator(i));
            }
            assert!(r.support_bound() <= alphabet.len(), "relator #{i} uses a generator outside the alphabet");
        }
        Ok(Presentation { alphabet, relators, mode: TorsionMode::DeriveFromRoots, declared: Vec::new() })
    }

    /// Switches to declared-torsion mode.
    pub fn with_declared_torsion(mut self, decls: Vec<TorsionDeclaration>) -> Result<Self, PresentationError> {
        let mut seen = std::collections::BTreeSet::new();
        for d in &decls {
            if d.relator >= self.relators.len() {
                return Err(PresentationError::InvalidTorsion(format!("relator index {} out of range", d.relator)));
            }
            if d.order < 2 {
                return Err(PresentationError::InvalidTorsion(format!("order {} must be at least 2", d.order)));
            }
            if !seen.insert(d.relator) {
                return Err(PresentationError::InvalidTorsion(format!("relator {} declared twice", d.relator)));
            }
        }
        self.mode = TorsionMode::Declared;
        self.declared = decls;
        Ok(self)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn mode(&self) -> TorsionMode {
        self.mode
    }

    pub fn declared_torsion(&self) -> &[TorsionDeclaration] {
        &self.declared
    }

    pub fn declared_order(&self, relator: usize) -> Option<u64> {
        self.declared.iter().find(|d| d.relator == relator).map(|d| d.order)
    }

    /// Entry `(r, i)` is the exponent sum of generator `i` in relator `r`.
    pub fn exponent_matrix(&self) -> IntMatrix {
        let n = self.alphabet.len();
        let entries = self
            .relators
            .iter()
            .flat_map(|r| (0..n).map(move |i| BigInt::from(r.exponent_sum(GeneratorId(i)))))
            .collect();
        IntMatrix::new(self.relators.len(), n, entries).expect("shape is consistent")
    }

    /// Every relator replaced by its root.
    pub fn root_presentation(&self) -> Result<Presentation, PresentationError> {
        if self.mode != TorsionMode::DeriveFromRoots {
            return Err(PresentationError::WrongMode("derive-from-roots"));
        }
        let relators = self.relators.iter().map(|r| r.root().map(|(root, _)| root)).collect::<Result<_, _>>()?;
        Presentation::new(self.alphabet.clone(), relators)
    }

    /// Each declared relator `c^k` replaced by `c`. Identity when nothing is declared.
    pub fn kill_torsion_presentation(&self) -> Result<Presentation, PresentationError> {
        if self.mode != TorsionMode::Declared {
            return Err(PresentationError::WrongMode("declared"));
        }
        let mut relators = self.relators.clone();
        for d in &self.declared {
            let r = &self.relators[d.relator];
            let g = r.letters()[0].gen;
            if !r.letters().iter().all(|l| l.gen == g) {
                return Err(PresentationError::NotGeneratorPower(d.relator));
            }
            relators[d.relator] = Word::generator(g);
        }
        Ok(Presentation { alphabet: self.alphabet.clone(), relators, mode: self.mode, declared: self.declared.clone() })
    }

    pub fn parse(text: &str) -> Result<Presentation, PresentationError> {
        let mut body = String::with_capacity(text.len());
        let mut decls = Vec::new();
        let mut any_directive = false;
        for (lineno, line) in text.lines().enumerate() {
            let trimmed = line.trim_start();
            if let Some(rest) = trimmed.strip_prefix('!') {
                decls.push(parse_directive(rest, lineno + 1, line.len() - trimmed.len() + 1)?);
                any_directive = true;
                body.push('\n');
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let p = Parser::new(&body).presentation()?;
        if any_directive {
            p.with_declared_torsion(decls)
        } else {
            Ok(p)
        }
    }
}

fn parse_directive(rest: &str, line: usize, col: usize) -> Result<TorsionDeclaration, PresentationError> {
    let err = |msg: &str| PresentationError::Syntax { line, col, msg: msg.to_string() };
    let mut parts = rest.split_whitespace();
    if parts.next() != Some("torsion") {
        return Err(err("unknown directive (expected `!torsion rel=<index> order=<n>`)"));
    }
    let mut rel = None;
    let mut order = None;
    for p in parts {
        match p.split_once('=') {
            Some(("rel", v)) => rel = Some(v.parse::<usize>().map_err(|_| err("bad relator index"))?),
            Some(("order", v)) => order = Some(v.parse::<u64>().map_err(|_| err("bad order"))?),
            _ => return Err(err("unexpected directive field")),
        }
    }
    match (rel, order) {
        (Some(relator), Some(order)) => Ok(TorsionDeclaration { relator, order }),
        _ => Err(err("directive needs both rel= and order=")),
    }
}

impl fmt::Display for Presentation {
    /// Canonical form; `parse` inverts it.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| r.display(&self.alphabet).to_string()).collect();
        write!(f, "<{} | {}>", self.alphabet.names().join(", "), rels.join(", "))?;
        if self.mode == TorsionMode::Declared {
            for d in &self.declared {
                write!(f, "\n!torsion rel={} order={}", d.relator, d.order)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
    alphabet: Option<Alphabet>,
    lex_error: Option<PresentationError>,
}

impl Parser {
    fn new(text: &str) -> Self {
        let mut toks = Vec::new();
        let mut lex_error = None;
        let (mut line, mut col) = (1usize, 1usize);
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let start = (line, col);
            if c == '\n' {
                line += 1;
                col = 1;
                i += 1;
            } else if c.is_whitespace() {
                col += 1;
                i += 1;
            } else if c.is_ascii_alphabetic() {
                let mut s = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    s.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                toks.push((Tok::Ident(s), start.0, start.1));
            } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
                let mut s = String::from(c);
                i += 1;
                col += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                match s.parse::<i64>() {
                    Ok(v) => toks.push((Tok::Int(v), start.0, start.1)),
                    Err(_) => {
                        lex_error.get_or_insert(PresentationError::Syntax {
                            line: start.0,
                            col: start.1,
                            msg: "exponent out of range".into(),
                        });
                    }
                }
            } else if "<>|,*^()[]".contains(c) {
                toks.push((Tok::Sym(c), line, col));
                i += 1;
                col += 1;
            } else {
                lex_error.get_or_insert(PresentationError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{c}`"),
                });
                i += 1;
                col += 1;
            }
        }
        Parser { toks, pos: 0, end: (line, col), alphabet: None, lex_error }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.1, t.2))
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, PresentationError> {
        let (line, col) = self.here();
        Err(PresentationError::Syntax { line, col, msg: msg.into() })
    }

    fn expect(&mut self, c: char) -> Result<(), PresentationError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{c}`"))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn presentation(mut self) -> Result<Presentation, PresentationError> {
        if let Some(e) = self.lex_error.take() {
            return Err(e);
        }
        self.expect('<')?;
        let mut names = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Ident(s)) => {
                    if names.contains(s) {
                        return self.error(format!("duplicate generator `{s}`"));
                    }
                    names.push(s.clone());
                    self.pos += 1;
                }
                _ => return self.error("expected generator name"),
            }
            if !self.eat(',') {
                break;
            }
        }
        self.expect('|')?;
        self.alphabet = Some(Alphabet::new(names)?);
        let mut relators = Vec::new();
        loop {
            relators.push(self.word()?);
            if !self.eat(',') {
                break;
            }
        }
        self.expect('>')?;
        if self.pos != self.toks.len() {
            return self.error("trailing input after `>`");
        }
        let alphabet = self.alphabet.take().expect("set above");
        Presentation::new(alphabet, relators)
    }

    fn starts_term(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Sym('(')) | Some(Tok::Sym('[')))
    }

    fn word(&mut self) -> Result<Word, PresentationError> {
        let mut w = self.term()?;
        loop {
            // `*` is optional between terms
            if self.eat('*') || self.starts_term() {
                w = w.multiply(&self.term()?);
            } else {
                return Ok(w);
            }
        }
    }

    fn term(&mut self) -> Result<Word, PresentationError> {
        let f = self.factor()?;
        if self.eat('^') {
            match self.peek() {
                Some(Tok::Int(k)) => {
                    let k = *k;
                    self.pos += 1;
                    Ok(f.pow(k))
                }
                _ => self.error("expected integer exponent"),
            }
        } else {
            Ok(f)
        }
    }

    fn factor(&mut self) -> Result<Word, PresentationError> {
        let (line, col) = self.here();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let alphabet = self.alphabet.as_ref().expect("alphabet parsed first");
                let g = alphabet.lookup(&name).map_err(|_| PresentationError::UnknownGenerator { name, line, col })?;
                Ok(Word::from_letters([Letter { gen: g, inverse: false }]))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(')')?;
                Ok(w)
            }
            Some(Tok::Sym('[')) => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(',')?;
                let b = self.word()?;
                self.expect(']')?;
                Ok(a.multiply(&b).multiply(&a.inverse()).multiply(&b.inverse()))
            }
            _ => self.error("expected generator, `(` or `[`"),
        }
    }
}
