//! Definition files: `kind name { key = value; ... }` blocks.
//!
//! ```text
//! # comment
//! finite binary { points = 0,1; d(0,1) = 1 }
//! interval unit { lo = 0; hi = 1 }
//! gauge bend { kind = bend; eta = 1 }
//! transform unit_b { space = unit; gauge = bend }
//! product P { cycle = binary; weights = geometric(1/2, 1); anchor = 0 }
//! product Q { components = binary, unit; weights = 1, 1/2 }
//! ```
//!
//! Spaces are built in declaration order, so a block may only refer to
//! names declared above it. Names not declared in the file fall back to
//! the built-ins `binary`, `singleton` and `cantor`.

use std::fmt;
use std::sync::Arc;

use compactnet::gauge::{transform_metric, GaugeError};
use compactnet::product::{ComponentGenerator, WeightSequence};
use compactnet::rational::{parse_rational, Rational};
use compactnet::space::SpaceRef;
use compactnet::{Gauge, Point, Space, SpaceError};
use indexmap::IndexMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DefError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    Semantic { pos: Pos, msg: String },
}

impl DefError {
    pub fn pos(&self) -> Pos {
        match self {
            DefError::Syntax { pos, .. } | DefError::Semantic { pos, .. } => *pos,
        }
    }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> DefError {
    DefError::Syntax { pos, msg: msg.into() }
}

fn semantic(pos: Pos, msg: impl Into<String>) -> DefError {
    DefError::Semantic { pos, msg: msg.into() }
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eq => f.write_str("`=`"),
        }
    }
}

fn word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '/' | '-' | '+' | '.' | '\'')
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, DefError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut chars = line.char_indices().peekable();
        let col_of = |byte: usize| line[..byte].chars().count() + 1;
        while let Some((b, c)) = chars.next() {
            let pos = Pos {
                line: ln + 1,
                col: col_of(b),
            };
            let tok = match c {
                '#' => break,
                c if c.is_whitespace() => continue,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '=' => Tok::Eq,
                c if word_char(c) => {
                    let mut end = b + c.len_utf8();
                    while let Some(&(b2, c2)) = chars.peek() {
                        if !word_char(c2) {
                            break;
                        }
                        end = b2 + c2.len_utf8();
                        chars.next();
                    }
                    Tok::Word(line[b..end].to_string())
                }
                other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
            };
            out.push((tok, pos));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parsing

/// A value item: a bare word or a call such as `geometric(1/2, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Word(String, Pos),
    Call(String, Vec<Item>, Pos),
}

impl Item {
    pub fn pos(&self) -> Pos {
        match self {
            Item::Word(_, p) | Item::Call(_, _, p) => *p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    /// Arguments of a parameterised key such as `d(a,b)`.
    pub args: Vec<String>,
    pub value: Vec<Item>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub kind: String,
    pub name: String,
    pub entries: Vec<Entry>,
    pub pos: Pos,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn next(&mut self, what: &str) -> Result<(Tok, Pos), DefError> {
        match self.toks.get(self.at) {
            Some(t) => {
                self.at += 1;
                Ok(t.clone())
            }
            None => Err(syntax(self.end, format!("unexpected end of file, expected {what}"))),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, DefError> {
        let (t, p) = self.next(&want.to_string())?;
        if t == want {
            Ok(p)
        } else {
            Err(syntax(p, format!("expected {want}, found {t}")))
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, Pos), DefError> {
        match self.next(what)? {
            (Tok::Word(w), p) => Ok((w, p)),
            (t, p) => Err(syntax(p, format!("expected {what}, found {t}"))),
        }
    }

    fn block(&mut self) -> Result<Block, DefError> {
        let (kind, pos) = self.word("a declaration kind")?;
        let (name, _) = self.word("a declaration name")?;
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.at += 1;
                    break;
                }
                Some(Tok::Semi) => {
                    self.at += 1;
                }
                _ => {
                    entries.push(self.entry()?);
                    match self.peek() {
                        Some(Tok::Semi) | Some(Tok::RBrace) => {}
                        _ => {
                            let (t, p) = self.next("`;` or `}`")?;
                            return Err(syntax(p, format!("expected `;` or `}}`, found {t}")));
                        }
                    }
                }
            }
        }
        Ok(Block {
            kind,
            name,
            entries,
            pos,
        })
    }

    fn entry(&mut self) -> Result<Entry, DefError> {
        let (key, pos) = self.word("a key")?;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.at += 1;
            loop {
                args.push(self.word("a key argument")?.0);
                match self.next("`,` or `)`")? {
                    (Tok::Comma, _) => {}
                    (Tok::RParen, _) => break,
                    (t, p) => return Err(syntax(p, format!("expected `,` or `)`, found {t}"))),
                }
            }
        }
        self.expect(Tok::Eq)?;
        let value = self.items()?;
        Ok(Entry { key, args, value, pos })
    }

    fn items(&mut self) -> Result<Vec<Item>, DefError> {
        let mut items = vec![self.item()?];
        while self.peek() == Some(&Tok::Comma) {
            self.at += 1;
            items.push(self.item()?);
        }
        Ok(items)
    }

    fn item(&mut self) -> Result<Item, DefError> {
        let (w, pos) = self.word("a value")?;
        if self.peek() == Some(&Tok::LParen) {
            self.at += 1;
            let args = self.items()?;
            self.expect(Tok::RParen)?;
            Ok(Item::Call(w, args, pos))
        } else {
            Ok(Item::Word(w, pos))
        }
    }
}

/// Parses the block structure without interpreting it.
pub fn parse_blocks(text: &str) -> Result<Vec<Block>, DefError> {
    let toks = lex(text)?;
    let end = Pos {
        line: text.lines().count().max(1),
        col: text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1),
    };
    let mut p = Parser { toks, at: 0, end };
    let mut blocks = Vec::new();
    while p.peek().is_some() {
        blocks.push(p.block()?);
    }
    Ok(blocks)
}

// ---------------------------------------------------------------------------
// Interpretation

#[derive(Clone, Debug)]
pub enum Definition {
    Space(SpaceRef),
    Gauge(Gauge),
}

/// Named spaces and gauges, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct SpaceDefFile {
    pub defs: IndexMap<String, Definition>,
}

const KINDS: [&str; 5] = ["finite", "interval", "gauge", "transform", "product"];

impl SpaceDefFile {
    /// Built-in spaces that need no file.
    pub fn builtin(name: &str) -> Option<SpaceRef> {
        match name {
            "binary" => Some(Arc::new(Space::binary())),
            "singleton" => Space::singleton("singleton", "0").ok().map(Arc::new),
            "cantor" => Some(Arc::new(Space::cantor())),
            _ => None,
        }
    }

    pub fn space(&self, name: &str) -> Option<SpaceRef> {
        match self.defs.get(name) {
            Some(Definition::Space(s)) => Some(s.clone()),
            Some(Definition::Gauge(_)) => None,
            None => Self::builtin(name),
        }
    }

    pub fn gauge(&self, name: &str) -> Option<&Gauge> {
        match self.defs.get(name) {
            Some(Definition::Gauge(g)) => Some(g),
            _ => None,
        }
    }

    pub fn spaces(&self) -> impl Iterator<Item = (&str, &SpaceRef)> {
        self.defs.iter().filter_map(|(n, d)| match d {
            Definition::Space(s) => Some((n.as_str(), s)),
            Definition::Gauge(_) => None,
        })
    }
}

/// Parses and builds every declaration. Finite tables are checked against
/// the metric axioms here; a failure names the offending triple.
pub fn parse_space_file(text: &str) -> Result<SpaceDefFile, DefError> {
    let mut file = SpaceDefFile::default();
    for block in parse_blocks(text)? {
        if !KINDS.contains(&block.kind.as_str()) {
            return Err(semantic(
                block.pos,
                format!("unknown declaration kind `{}` (expected one of {})", block.kind, KINDS.join(", ")),
            ));
        }
        if file.defs.contains_key(&block.name) {
            return Err(semantic(block.pos, format!("`{}` is declared twice", block.name)));
        }
        let def = build(&file, &block)?;
        file.defs.insert(block.name.clone(), def);
    }
    Ok(file)
}

/// Plain `key = value` entries of one block, with duplicate detection.
struct Fields<'a> {
    block: &'a Block,
    map: IndexMap<&'a str, &'a Entry>,
}

impl<'a> Fields<'a> {
    fn new(block: &'a Block, allowed: &[&str]) -> Result<Self, DefError> {
        let mut map = IndexMap::new();
        for e in &block.entries {
            if e.key == "d" && block.kind == "finite" {
                continue;
            }
            if !allowed.contains(&e.key.as_str()) {
                return Err(semantic(
                    e.pos,
                    format!("unknown key `{}` in {} `{}`", e.key, block.kind, block.name),
                ));
            }
            if !e.args.is_empty() {
                return Err(semantic(e.pos, format!("key `{}` takes no arguments", e.key)));
            }
            if map.insert(e.key.as_str(), e).is_some() {
                return Err(semantic(e.pos, format!("key `{}` given twice", e.key)));
            }
        }
        Ok(Fields { block, map })
    }

    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.map.get(key).copied()
    }

    fn require(&self, key: &str) -> Result<&'a Entry, DefError> {
        self.get(key).ok_or_else(|| {
            semantic(
                self.block.pos,
                format!("{} `{}` is missing `{}`", self.block.kind, self.block.name, key),
            )
        })
    }
}

fn words(e: &Entry) -> Result<Vec<(&str, Pos)>, DefError> {
    e.value
        .iter()
        .map(|it| match it {
            Item::Word(w, p) => Ok((w.as_str(), *p)),
            Item::Call(f, _, p) => Err(semantic(*p, format!("`{f}(...)` is not allowed for `{}`", e.key))),
        })
        .collect()
}

fn single(e: &Entry) -> Result<(&str, Pos), DefError> {
    let ws = words(e)?;
    if ws.len() != 1 {
        return Err(semantic(e.pos, format!("`{}` takes a single value", e.key)));
    }
    Ok(ws[0])
}

fn rational_at(w: &str, pos: Pos) -> Result<Rational, DefError> {
    parse_rational(w).map_err(|err| semantic(pos, err.to_string()))
}

fn single_rational(e: &Entry) -> Result<Rational, DefError> {
    let (w, p) = single(e)?;
    rational_at(w, p)
}

fn space_err(pos: Pos, err: SpaceError) -> DefError {
    semantic(pos, err.to_string())
}

fn gauge_err(pos: Pos, err: GaugeError) -> DefError {
    semantic(pos, err.to_string())
}

fn lookup_space(file: &SpaceDefFile, name: &str, pos: Pos) -> Result<SpaceRef, DefError> {
    match file.defs.get(name) {
        Some(Definition::Space(s)) => Ok(s.clone()),
        Some(Definition::Gauge(_)) => Err(semantic(pos, format!("`{name}` is a gauge, not a space"))),
        None => SpaceDefFile::builtin(name).ok_or_else(|| semantic(pos, format!("unknown space `{name}`"))),
    }
}

fn build(file: &SpaceDefFile, b: &Block) -> Result<Definition, DefError> {
    match b.kind.as_str() {
        "finite" => build_finite(b).map(|s| Definition::Space(Arc::new(s))),
        "interval" => build_interval(b).map(|s| Definition::Space(Arc::new(s))),
        "gauge" => build_gauge(b).map(Definition::Gauge),
        "transform" => build_transform(file, b).map(|s| Definition::Space(Arc::new(s))),
        "product" => build_product(file, b).map(|s| Definition::Space(Arc::new(s))),
        _ => unreachable!("kind checked by caller"),
    }
}

fn apply_bound_and_anchors(mut s: Space, f: &Fields) -> Result<Space, DefError> {
    if let Some(e) = f.get("bound") {
        s = s.with_diameter_bound(single_rational(e)?).map_err(|err| space_err(e.pos, err))?;
    }
    if let Some(e) = f.get("anchors") {
        let pts = words(e)?
            .into_iter()
            .map(|(w, p)| compactnet::notation::parse_point(&s, w).map_err(|err| semantic(p, err.to_string())))
            .collect::<Result<Vec<Point>, _>>()?;
        s = s.with_anchors(pts).map_err(|err| space_err(e.pos, err))?;
    }
    Ok(s)
}

fn build_finite(b: &Block) -> Result<Space, DefError> {
    let f = Fields::new(b, &["points", "bound", "anchors"])?;
    let points = f.require("points")?;
    let labels: Vec<String> = words(points)?.into_iter().map(|(w, _)| w.to_string()).collect();
    let n = labels.len();
    let index = |l: &str, pos: Pos| {
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| semantic(pos, format!("unknown point `{l}` in `{}`", b.name)))
    };
    let mut table: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    let mut explicit = vec![vec![false; n]; n];
    for e in b.entries.iter().filter(|e| e.key == "d") {
        if e.args.len() != 2 {
            return Err(semantic(e.pos, "distance entries take two points: `d(a,b) = r`"));
        }
        let (i, j) = (index(&e.args[0], e.pos)?, index(&e.args[1], e.pos)?);
        if explicit[i][j] {
            return Err(semantic(e.pos, format!("d({},{}) given twice", e.args[0], e.args[1])));
        }
        let r = single_rational(e)?;
        explicit[i][j] = true;
        table[i][j] = Some(r.clone());
        // Mirror unless the reverse entry is written out.
        if !explicit[j][i] {
            table[j][i] = Some(r);
        }
    }
    let mut full = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            match table[i][j].take() {
                Some(r) => row.push(r),
                None if i == j => row.push(Rational::from_integer(0.into())),
                None => {
                    return Err(semantic(
                        b.pos,
                        format!("`{}` has no distance for d({},{})", b.name, labels[i], labels[j]),
                    ))
                }
            }
        }
        full.push(row);
    }
    let s = Space::finite(b.name.clone(), labels, full).map_err(|err| space_err(b.pos, err))?;
    apply_bound_and_anchors(s, &f)
}

fn build_interval(b: &Block) -> Result<Space, DefError> {
    let f = Fields::new(b, &["lo", "hi", "bound", "anchors"])?;
    let lo = single_rational(f.require("lo")?)?;
    let hi = single_rational(f.require("hi")?)?;
    let s = Space::interval(b.name.clone(), lo, hi).map_err(|err| space_err(b.pos, err))?;
    apply_bound_and_anchors(s, &f)
}

fn build_gauge(b: &Block) -> Result<Gauge, DefError> {
    let f = Fields::new(b, &["kind", "a", "eta"])?;
    let kind = f.require("kind")?;
    let (k, kp) = single(kind)?;
    match k {
        "cap" => {
            if let Some(e) = f.get("eta") {
                return Err(semantic(e.pos, "a cap gauge has eta = a; set `a` only"));
            }
            let a = match f.get("a") {
                Some(e) => single_rational(e)?,
                None => Rational::from_integer(1.into()),
            };
            Gauge::cap(a).map_err(|err| gauge_err(b.pos, err))
        }
        "bend" => {
            if let Some(e) = f.get("a") {
                return Err(semantic(e.pos, "a bend gauge has a = 1; set `eta` only"));
            }
            let eta = single_rational(f.require("eta")?)?;
            Gauge::rational_bend(eta).map_err(|err| gauge_err(b.pos, err))
        }
        other => Err(semantic(kp, format!("unknown gauge kind `{other}` (expected cap or bend)"))),
    }
}

fn build_transform(file: &SpaceDefFile, b: &Block) -> Result<Space, DefError> {
    let f = Fields::new(b, &["space", "gauge"])?;
    let (sn, sp) = single(f.require("space")?)?;
    let (gn, gp) = single(f.require("gauge")?)?;
    let space = lookup_space(file, sn, sp)?;
    let g = file
        .gauge(gn)
        .ok_or_else(|| semantic(gp, format!("unknown gauge `{gn}`")))?;
    transform_metric(&space, g)
        .map(|s| s.with_name(b.name.clone()))
        .map_err(|err| gauge_err(b.pos, err))
}

fn build_product(file: &SpaceDefFile, b: &Block) -> Result<Space, DefError> {
    let f = Fields::new(b, &["cycle", "components", "weights", "anchor"])?;
    let weights = f.require("weights")?;
    match (f.get("cycle"), f.get("components")) {
        (Some(cycle), None) => {
            let comps = words(cycle)?
                .into_iter()
                .map(|(w, p)| lookup_space(file, w, p))
                .collect::<Result<Vec<_>, _>>()?;
            let gen = ComponentGenerator::new(comps).map_err(|err| space_err(cycle.pos, err))?;
            let w = match weights.value.as_slice() {
                [Item::Call(fname, args, p)] if fname == "geometric" => {
                    let rs = args
                        .iter()
                        .map(|a| match a {
                            Item::Word(w, p) => rational_at(w, *p),
                            Item::Call(_, _, p) => Err(semantic(*p, "expected a rational")),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    if rs.len() != 2 {
                        return Err(semantic(*p, "geometric takes (ratio, scale)"));
                    }
                    WeightSequence::geometric(rs[0].clone(), rs[1].clone()).map_err(|err| space_err(*p, err))?
                }
                _ => {
                    return Err(semantic(
                        weights.pos,
                        "a countable product needs `weights = geometric(ratio, scale)`",
                    ))
                }
            };
            let anchor = match f.get("anchor") {
                Some(e) => {
                    let (w, p) = single(e)?;
                    w.parse::<usize>()
                        .map_err(|_| semantic(p, format!("anchor `{w}` is not an index")))?
                }
                None => 0,
            };
            Space::countable_product(b.name.clone(), gen, w, anchor).map_err(|err| space_err(b.pos, err))
        }
        (None, Some(components)) => {
            if let Some(e) = f.get("anchor") {
                return Err(semantic(e.pos, "`anchor` applies to countable products only"));
            }
            let comps = words(components)?
                .into_iter()
                .map(|(w, p)| lookup_space(file, w, p))
                .collect::<Result<Vec<_>, _>>()?;
            let ws = words(weights)?
                .into_iter()
                .map(|(w, p)| rational_at(w, p))
                .collect::<Result<Vec<_>, _>>()?;
            Space::finite_product(b.name.clone(), comps, ws).map_err(|err| space_err(b.pos, err))
        }
        (Some(_), Some(e)) => Err(semantic(e.pos, "give either `cycle` or `components`, not both")),
        (None, None) => Err(semantic(b.pos, format!("product `{}` needs `cycle` or `components`", b.name))),
    }
}
