//! Plain-text declarations of posets and maps.
//!
//! ```text
//! # comments run to the end of the line
//! poset V { elements: a b t ; order: a<t b<t }
//! map h : A2 -> V { a->a b->b }
//! ```
//!
//! Tokens may be separated by arbitrary whitespace. Order entries may be
//! chained (`a<b<c`) and need not be covers; serialization always emits the
//! cover relation.

use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::poset::{FinPoset, MonotoneMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    LBrace,
    RBrace,
    Colon,
    Semi,
    Less,
    Arrow,
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub token: Token,
    pub line: usize,
    pub column: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (lineno, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, column) = (lineno + 1, i + 1);
            let push = |out: &mut Vec<Spanned>, token| {
                out.push(Spanned {
                    token,
                    line,
                    column,
                })
            };
            match c {
                c if c.is_whitespace() => i += 1,
                '{' => {
                    push(&mut out, Token::LBrace);
                    i += 1;
                }
                '}' => {
                    push(&mut out, Token::RBrace);
                    i += 1;
                }
                ':' => {
                    push(&mut out, Token::Colon);
                    i += 1;
                }
                ';' => {
                    push(&mut out, Token::Semi);
                    i += 1;
                }
                '<' => {
                    push(&mut out, Token::Less);
                    i += 1;
                }
                '-' if chars.get(i + 1) == Some(&'>') => {
                    push(&mut out, Token::Arrow);
                    i += 2;
                }
                c if is_ident_char(c) => {
                    let start = i;
                    while i < chars.len() && is_ident_char(chars[i]) {
                        i += 1;
                    }
                    push(&mut out, Token::Ident(chars[start..i].iter().collect()));
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        column,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
    }
    Ok(out)
}

/// A declaration as written, before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Poset {
        name: String,
        elements: Vec<String>,
        order: Vec<(String, String)>,
        line: usize,
    },
    Map {
        name: String,
        dom: String,
        cod: String,
        assignment: Vec<(String, String)>,
        line: usize,
    },
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Poset { name, .. } | Decl::Map { name, .. } => name,
        }
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self
            .tokens
            .get(self.pos)
            .map(|t| (t.line, t.column))
            .unwrap_or(self.eof);
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.token)
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Token::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Token::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{kw}`"))),
        }
    }

    fn decl(&mut self) -> Result<Decl> {
        let line = self.tokens[self.pos].line;
        match self.peek() {
            Some(Token::Ident(kw)) if kw == "poset" => {
                self.pos += 1;
                let name = self.ident("poset name")?;
                self.expect(Token::LBrace, "`{`")?;
                self.keyword("elements")?;
                self.expect(Token::Colon, "`:`")?;
                let mut elements = Vec::new();
                while let Some(Token::Ident(_)) = self.peek() {
                    elements.push(self.ident("element")?);
                }
                let mut order = Vec::new();
                if self.peek() == Some(&Token::Semi) {
                    self.pos += 1;
                    self.keyword("order")?;
                    self.expect(Token::Colon, "`:`")?;
                    while let Some(Token::Ident(_)) = self.peek() {
                        let mut lo = self.ident("element")?;
                        self.expect(Token::Less, "`<`")?;
                        loop {
                            let hi = self.ident("element")?;
                            order.push((lo, hi.clone()));
                            lo = hi;
                            if self.peek() == Some(&Token::Less) {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                }
                self.expect(Token::RBrace, "`}`")?;
                Ok(Decl::Poset {
                    name,
                    elements,
                    order,
                    line,
                })
            }
            Some(Token::Ident(kw)) if kw == "map" => {
                self.pos += 1;
                let name = self.ident("map name")?;
                self.expect(Token::Colon, "`:`")?;
                let dom = self.ident("domain name")?;
                self.expect(Token::Arrow, "`->`")?;
                let cod = self.ident("codomain name")?;
                self.expect(Token::LBrace, "`{`")?;
                let mut assignment = Vec::new();
                while let Some(Token::Ident(_)) = self.peek() {
                    let a = self.ident("element")?;
                    self.expect(Token::Arrow, "`->`")?;
                    let b = self.ident("element")?;
                    assignment.push((a, b));
                }
                self.expect(Token::RBrace, "`}`")?;
                Ok(Decl::Map {
                    name,
                    dom,
                    cod,
                    assignment,
                    line,
                })
            }
            _ => Err(self.error("expected `poset` or `map`")),
        }
    }
}

pub fn parse_decls(src: &str) -> Result<Vec<Decl>> {
    let tokens = tokenize(src)?;
    let eof = (
        src.lines().count().max(1),
        src.lines().last().map_or(1, |l| l.len() + 1),
    );
    let mut parser = Parser {
        tokens,
        pos: 0,
        eof,
    };
    let mut decls = Vec::new();
    while parser.pos < parser.tokens.len() {
        decls.push(parser.decl()?);
    }
    Ok(decls)
}

/// A validated map together with the declared names of its endpoints.
#[derive(Clone, Debug)]
pub struct NamedMap {
    pub map: MonotoneMap,
    pub dom: String,
    pub cod: String,
}

/// Named posets and maps, in declaration order, sharing one namespace.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub posets: IndexMap<String, Arc<FinPoset>>,
    pub maps: IndexMap<String, NamedMap>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_source(src: &str) -> Result<Self> {
        let mut ws = Self::new();
        ws.add_source(src)?;
        Ok(ws)
    }

    pub fn from_paths<P: AsRef<Path>>(paths: &[P]) -> Result<Self> {
        let mut ws = Self::new();
        for path in paths {
            let path = path.as_ref();
            let src = std::fs::read_to_string(path).map_err(|e| Error::Parse {
                line: 0,
                column: 0,
                message: format!("{}: {e}", path.display()),
            })?;
            ws.add_source(&src)?;
        }
        Ok(ws)
    }

    fn contains(&self, name: &str) -> bool {
        self.posets.contains_key(name) || self.maps.contains_key(name)
    }

    pub fn add_source(&mut self, src: &str) -> Result<()> {
        for decl in parse_decls(src)? {
            self.add_decl(decl)?;
        }
        Ok(())
    }

    pub fn add_decl(&mut self, decl: Decl) -> Result<()> {
        if self.contains(decl.name()) {
            return Err(Error::NameCollision(decl.name().to_string()));
        }
        let wrap = |name: &str, e: Error| Error::Validation {
            name: name.to_string(),
            source: Box::new(e),
        };
        match decl {
            Decl::Poset {
                name,
                elements,
                order,
                ..
            } => {
                let p =
                    crate::poset::validate_poset(&elements, &order).map_err(|e| wrap(&name, e))?;
                self.posets.insert(name, Arc::new(p));
            }
            Decl::Map {
                name,
                dom,
                cod,
                assignment,
                ..
            } => {
                let d = self.poset(&dom).map_err(|e| wrap(&name, e))?;
                let c = self.poset(&cod).map_err(|e| wrap(&name, e))?;
                let map = MonotoneMap::from_names(d, c, &assignment).map_err(|e| wrap(&name, e))?;
                self.maps.insert(name, NamedMap { map, dom, cod });
            }
        }
        Ok(())
    }

    pub fn insert_poset(&mut self, name: &str, p: Arc<FinPoset>) -> Result<()> {
        if self.contains(name) {
            return Err(Error::NameCollision(name.to_string()));
        }
        self.posets.insert(name.to_string(), p);
        Ok(())
    }

    pub fn insert_map(&mut self, name: &str, dom: &str, cod: &str, map: MonotoneMap) -> Result<()> {
        if self.contains(name) {
            return Err(Error::NameCollision(name.to_string()));
        }
        self.maps.insert(
            name.to_string(),
            NamedMap {
                map,
                dom: dom.to_string(),
                cod: cod.to_string(),
            },
        );
        Ok(())
    }

    pub fn poset(&self, name: &str) -> Result<Arc<FinPoset>> {
        self.posets
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn map(&self, name: &str) -> Result<MonotoneMap> {
        self.maps
            .get(name)
            .map(|m| m.map.clone())
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// Serializes every declaration in order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, p) in &self.posets {
            out.push_str(&format_poset(name, p));
            out.push('\n');
        }
        for (name, m) in &self.maps {
            out.push_str(&format_map(name, &m.dom, &m.cod, &m.map));
            out.push('\n');
        }
        out
    }
}

pub fn format_poset(name: &str, p: &FinPoset) -> String {
    let mut s = format!("poset {name} {{ elements:");
    for e in p.names() {
        s.push(' ');
        s.push_str(e);
    }
    s.push_str(" ; order:");
    for (lo, hi) in p.cover_pairs() {
        s.push_str(&format!(" {}<{}", p.name(lo), p.name(hi)));
    }
    s.push_str(" }");
    s
}

pub fn format_map(name: &str, dom: &str, cod: &str, f: &MonotoneMap) -> String {
    let mut s = format!("map {name} : {dom} -> {cod} {{");
    for x in f.dom().elements() {
        s.push_str(&format!(
            " {}->{}",
            f.dom().name(x),
            f.cod().name(f.apply(x))
        ));
    }
    s.push_str(" }");
    s
}

/// The assignment part of a map, `a->x b->y`.
pub fn format_assignment(f: &MonotoneMap) -> String {
    f.dom()
        .elements()
        .map(|x| format!("{}->{}", f.dom().name(x), f.cod().name(f.apply(x))))
        .collect::<Vec<_>>()
        .join(" ")
}
