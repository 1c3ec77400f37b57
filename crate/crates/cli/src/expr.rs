//! The set-expression language: `diff(load("d.json"))`, `iter(block((0,0), [(0,1),(0,2)], nat), 2)`.

use std::fmt;

use oag_core::lexgroup::{parse_rational, GroupElement, Rational};
use oag_core::semilinear::IndexSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at line {line}, column {col}: {msg}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexExpr {
    All,
    Nat,
    Range(i64, i64),
    Ge(i64),
    Le(i64),
    Mod(i64, i64),
    Finite(Vec<i64>),
}

impl IndexExpr {
    pub fn to_set(&self) -> IndexSet {
        match self {
            IndexExpr::All => IndexSet::all(),
            IndexExpr::Nat => IndexSet::naturals(),
            IndexExpr::Range(a, b) => IndexSet::range(*a, *b),
            IndexExpr::Ge(a) => IndexSet::ge(*a),
            IndexExpr::Le(a) => IndexSet::le(*a),
            IndexExpr::Mod(r, p) => IndexSet::residue(*r, *p),
            IndexExpr::Finite(v) => IndexSet::finite(v.iter().copied()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetExpr {
    Load(String),
    Block { base: GroupElement, pattern: Vec<GroupElement>, indices: IndexExpr },
    Points(Vec<GroupElement>),
    Diff(Box<SetExpr>),
    Iter(Box<SetExpr>, usize),
    Union(Box<SetExpr>, Box<SetExpr>),
    Translate(Box<SetExpr>, GroupElement),
    Scale(Box<SetExpr>, Rational),
    Psigma(Box<SetExpr>, Vec<GroupElement>),
    Decompose(Box<SetExpr>),
    Chains(Box<SetExpr>),
    Cstar(Box<SetExpr>),
    Uniformize(Box<SetExpr>),
    Archsplit(Box<SetExpr>),
    Defing(Box<SetExpr>),
    Witness { levels: usize, columns: usize, dense: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(String),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<(Vec<Lexed>, (usize, usize)), SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut out = Vec::new();
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col, c);
        } else if "()[]{},".contains(c) {
            out.push(Lexed { tok: Tok::Punct(c), line: l0, col: c0 });
            bump(&mut i, &mut line, &mut col, c);
        } else if c == '"' {
            bump(&mut i, &mut line, &mut col, c);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(SyntaxError { line: l0, col: c0, msg: "unterminated string".into() }),
                    Some('"') => {
                        bump(&mut i, &mut line, &mut col, '"');
                        break;
                    }
                    Some('\\') if i + 1 < chars.len() => {
                        let e = chars[i + 1];
                        bump(&mut i, &mut line, &mut col, '\\');
                        bump(&mut i, &mut line, &mut col, e);
                        s.push(e);
                    }
                    Some(&ch) => {
                        bump(&mut i, &mut line, &mut col, ch);
                        s.push(ch);
                    }
                }
            }
            out.push(Lexed { tok: Tok::Str(s), line: l0, col: c0 });
        } else if c == '-' || c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&ch) = chars.get(i) {
                if ch.is_ascii_digit() || ch == '/' || (ch == '-' && s.is_empty()) {
                    s.push(ch);
                    bump(&mut i, &mut line, &mut col, ch);
                } else {
                    break;
                }
            }
            out.push(Lexed { tok: Tok::Num(s), line: l0, col: c0 });
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&ch) = chars.get(i) {
                if ch.is_alphanumeric() || ch == '_' || ch == '-' {
                    s.push(ch);
                    bump(&mut i, &mut line, &mut col, ch);
                } else {
                    break;
                }
            }
            out.push(Lexed { tok: Tok::Ident(s), line: l0, col: c0 });
        } else {
            return Err(SyntaxError { line: l0, col: c0, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok((out, (line, col)))
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn err_here(&self, msg: impl Into<String>) -> SyntaxError {
        let (line, col) = self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.col));
        SyntaxError { line, col, msg: msg.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(Tok::Punct(p)) if *p == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_here(format!("expected '{c}'"))),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(p)) if *p == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn rational(&mut self) -> Result<Rational, SyntaxError> {
        let e = self.err_here("expected a rational");
        match self.next() {
            Some(Tok::Num(s)) => parse_rational(&s).map_err(|_| e),
            _ => Err(e),
        }
    }

    fn integer(&mut self) -> Result<i64, SyntaxError> {
        let e = self.err_here("expected an integer");
        match self.next() {
            Some(Tok::Num(s)) => s.parse().map_err(|_| e),
            _ => Err(e),
        }
    }

    fn count(&mut self) -> Result<usize, SyntaxError> {
        let e = self.err_here("expected a count");
        let n = self.integer()?;
        usize::try_from(n).map_err(|_| e)
    }

    fn element(&mut self) -> Result<GroupElement, SyntaxError> {
        let e = self.err_here("expected an element");
        self.expect('(')?;
        let mut coords = vec![self.rational()?];
        while self.eat(',') {
            coords.push(self.rational()?);
        }
        self.expect(')')?;
        GroupElement::new(coords).map_err(|err| SyntaxError { msg: err.to_string(), ..e })
    }

    fn element_list(&mut self) -> Result<Vec<GroupElement>, SyntaxError> {
        self.expect('[')?;
        let mut v = Vec::new();
        if !self.eat(']') {
            v.push(self.element()?);
            while self.eat(',') {
                v.push(self.element()?);
            }
            self.expect(']')?;
        }
        Ok(v)
    }

    fn index(&mut self) -> Result<IndexExpr, SyntaxError> {
        if self.eat('{') {
            let mut v = Vec::new();
            if !self.eat('}') {
                v.push(self.integer()?);
                while self.eat(',') {
                    v.push(self.integer()?);
                }
                self.expect('}')?;
            }
            return Ok(IndexExpr::Finite(v));
        }
        let e = self.err_here("expected an index set");
        let Some(Tok::Ident(name)) = self.next() else { return Err(e) };
        let out = match name.as_str() {
            "all" => IndexExpr::All,
            "nat" => IndexExpr::Nat,
            "range" | "mod" => {
                self.expect('(')?;
                let a = self.integer()?;
                self.expect(',')?;
                let b = self.integer()?;
                self.expect(')')?;
                if name == "range" {
                    IndexExpr::Range(a, b)
                } else if b > 0 {
                    IndexExpr::Mod(a, b)
                } else {
                    return Err(e);
                }
            }
            "ge" | "le" => {
                self.expect('(')?;
                let a = self.integer()?;
                self.expect(')')?;
                if name == "ge" {
                    IndexExpr::Ge(a)
                } else {
                    IndexExpr::Le(a)
                }
            }
            _ => return Err(e),
        };
        Ok(out)
    }

    fn expr(&mut self) -> Result<SetExpr, SyntaxError> {
        let e = self.err_here("expected an expression");
        let Some(Tok::Ident(name)) = self.next() else { return Err(e) };
        self.expect('(')?;
        let boxed = |p: &mut Parser| p.expr().map(Box::new);
        let out = match name.as_str() {
            "load" => match self.next() {
                Some(Tok::Str(s)) => SetExpr::Load(s),
                _ => return Err(e),
            },
            "block" => {
                let base = self.element()?;
                self.expect(',')?;
                let pattern = self.element_list()?;
                self.expect(',')?;
                SetExpr::Block { base, pattern, indices: self.index()? }
            }
            "points" => {
                let mut v = Vec::new();
                if !matches!(self.peek(), Some(Tok::Punct(')'))) {
                    v.push(self.element()?);
                    while self.eat(',') {
                        v.push(self.element()?);
                    }
                }
                SetExpr::Points(v)
            }
            "diff" => SetExpr::Diff(boxed(self)?),
            "iter" => {
                let a = boxed(self)?;
                self.expect(',')?;
                SetExpr::Iter(a, self.count()?)
            }
            "union" => {
                let a = boxed(self)?;
                self.expect(',')?;
                SetExpr::Union(a, boxed(self)?)
            }
            "translate" => {
                let a = boxed(self)?;
                self.expect(',')?;
                SetExpr::Translate(a, self.element()?)
            }
            "scale" => {
                let a = boxed(self)?;
                self.expect(',')?;
                SetExpr::Scale(a, self.rational()?)
            }
            "psigma" => {
                let a = boxed(self)?;
                self.expect(',')?;
                SetExpr::Psigma(a, self.element_list()?)
            }
            "decompose" => SetExpr::Decompose(boxed(self)?),
            "chains" => SetExpr::Chains(boxed(self)?),
            "cstar" => SetExpr::Cstar(boxed(self)?),
            "uniformize" => SetExpr::Uniformize(boxed(self)?),
            "archsplit" => SetExpr::Archsplit(boxed(self)?),
            "defing" => SetExpr::Defing(boxed(self)?),
            "witness" => {
                let levels = self.count()?;
                self.expect(',')?;
                let columns = self.count()?;
                let dense = if self.eat(',') {
                    match self.next() {
                        Some(Tok::Ident(s)) if s == "dense" => true,
                        _ => return Err(self.err_here("expected 'dense'")),
                    }
                } else {
                    false
                };
                SetExpr::Witness { levels, columns, dense }
            }
            _ => return Err(e),
        };
        self.expect(')')?;
        Ok(out)
    }
}

pub fn parse(text: &str) -> Result<SetExpr, SyntaxError> {
    let (toks, end) = lex(text)?;
    let mut p = Parser { toks, pos: 0, end };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err_here("trailing input"));
    }
    Ok(e)
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[GroupElement]) -> fmt::Result {
    write!(f, "[")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, "]")
}

impl fmt::Display for IndexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexExpr::All => write!(f, "all"),
            IndexExpr::Nat => write!(f, "nat"),
            IndexExpr::Range(a, b) => write!(f, "range({a}, {b})"),
            IndexExpr::Ge(a) => write!(f, "ge({a})"),
            IndexExpr::Le(a) => write!(f, "le({a})"),
            IndexExpr::Mod(r, p) => write!(f, "mod({r}, {p})"),
            IndexExpr::Finite(v) => {
                let s: Vec<String> = v.iter().map(|k| k.to_string()).collect();
                write!(f, "{{{}}}", s.join(", "))
            }
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Load(p) => write!(f, "load(\"{}\")", p.replace('\\', "\\\\").replace('"', "\\\"")),
            SetExpr::Block { base, pattern, indices } => {
                write!(f, "block({base}, ")?;
                write_list(f, pattern)?;
                write!(f, ", {indices})")
            }
            SetExpr::Points(v) => {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "points({})", s.join(", "))
            }
            SetExpr::Diff(a) => write!(f, "diff({a})"),
            SetExpr::Iter(a, n) => write!(f, "iter({a}, {n})"),
            SetExpr::Union(a, b) => write!(f, "union({a}, {b})"),
            SetExpr::Translate(a, c) => write!(f, "translate({a}, {c})"),
            SetExpr::Scale(a, q) => write!(f, "scale({a}, {q})"),
            SetExpr::Psigma(a, s) => {
                write!(f, "psigma({a}, ")?;
                write_list(f, s)?;
                write!(f, ")")
            }
            SetExpr::Decompose(a) => write!(f, "decompose({a})"),
            SetExpr::Chains(a) => write!(f, "chains({a})"),
            SetExpr::Cstar(a) => write!(f, "cstar({a})"),
            SetExpr::Uniformize(a) => write!(f, "uniformize({a})"),
            SetExpr::Archsplit(a) => write!(f, "archsplit({a})"),
            SetExpr::Defing(a) => write!(f, "defing({a})"),
            SetExpr::Witness { levels, columns, dense } => {
                write!(f, "witness({levels}, {columns}")?;
                if *dense {
                    write!(f, ", dense")?;
                }
                write!(f, ")")
            }
        }
    }
}
