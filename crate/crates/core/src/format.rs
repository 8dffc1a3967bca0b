//! Line-oriented text format for posets, set systems, towers, groups,
//! homomorphisms, systems of groups and short exact sequences.
//!
//! A file is a sequence of declarations. Each declaration starts with a
//! header line and may be followed by body lines; `#` starts a comment.
//!
//! ```text
//! poset W
//! elements: a b c
//! covers: c < a, c < b
//!
//! system S over W
//! set a: { x0 x1 }
//! set c: { z }
//! map a -> c: x0 -> z, x1 -> z
//!
//! tower T horizon 4
//! set *: { 0 1 2 3 }
//! map *: clipdec
//!
//! group A gens 2 relations [[2,0],[0,4]]
//! hom f A -> A matrix [[1,0],[0,1]]
//!
//! absystem Z over W
//! group c: gens 1 relations []
//! map a -> c: matrix []
//!
//! sequence E: Z -> Z2 -> Z3
//! u c: [[2]]
//! v c: [[1]]
//! ```
//!
//! Unlisted elements of a system get an empty carrier (set systems) or the
//! trivial group (group systems). Maps read from the upper element to the
//! lower one. Bond matrices have one row per generator of the lower group.
//! [`print_document`] emits a normalized form that parses back to itself.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use thiserror::Error;

use crate::abelian::{AbHom, FgAbGroup, IntMatrix};
use crate::derived::{AbSystem, ShortExactSequence};
use crate::poset::{is_valid_label, Poset};
use crate::sets::{SetSystem, Tower};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone)]
pub enum Item {
    Poset {
        name: String,
        poset: Poset,
    },
    System {
        name: String,
        over: String,
        system: SetSystem,
    },
    Tower {
        name: String,
        tower: Tower,
    },
    Group {
        name: String,
        group: FgAbGroup,
    },
    Hom {
        name: String,
        source: String,
        target: String,
        hom: AbHom,
    },
    AbSystem {
        name: String,
        over: String,
        system: AbSystem,
    },
    Sequence {
        name: String,
        parts: [String; 3],
        sequence: ShortExactSequence,
    },
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Poset { name, .. }
            | Item::System { name, .. }
            | Item::Tower { name, .. }
            | Item::Group { name, .. }
            | Item::Hom { name, .. }
            | Item::AbSystem { name, .. }
            | Item::Sequence { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Item::Poset { .. } => "poset",
            Item::System { .. } => "system",
            Item::Tower { .. } => "tower",
            Item::Group { .. } => "group",
            Item::Hom { .. } => "hom",
            Item::AbSystem { .. } => "absystem",
            Item::Sequence { .. } => "sequence",
        }
    }
}

/// Parsed file contents, in declaration order.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub items: Vec<Item>,
}

impl Document {
    fn find(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|it| it.name() == name)
    }

    pub fn poset(&self, name: &str) -> Option<&Poset> {
        match self.find(name)? {
            Item::Poset { poset, .. } => Some(poset),
            _ => None,
        }
    }

    pub fn group(&self, name: &str) -> Option<&FgAbGroup> {
        match self.find(name)? {
            Item::Group { group, .. } => Some(group),
            _ => None,
        }
    }

    pub fn absystem(&self, name: &str) -> Option<&AbSystem> {
        match self.find(name)? {
            Item::AbSystem { system, .. } => Some(system),
            _ => None,
        }
    }

    pub fn posets(&self) -> impl Iterator<Item = (&str, &Poset)> {
        self.items.iter().filter_map(|it| match it {
            Item::Poset { name, poset } => Some((name.as_str(), poset)),
            _ => None,
        })
    }

    pub fn set_systems(&self) -> impl Iterator<Item = (&str, &SetSystem)> {
        self.items.iter().filter_map(|it| match it {
            Item::System { name, system, .. } => Some((name.as_str(), system)),
            _ => None,
        })
    }

    pub fn towers(&self) -> impl Iterator<Item = (&str, &Tower)> {
        self.items.iter().filter_map(|it| match it {
            Item::Tower { name, tower } => Some((name.as_str(), tower)),
            _ => None,
        })
    }

    pub fn absystems(&self) -> impl Iterator<Item = (&str, &AbSystem)> {
        self.items.iter().filter_map(|it| match it {
            Item::AbSystem { name, system, .. } => Some((name.as_str(), system)),
            _ => None,
        })
    }

    pub fn sequences(&self) -> impl Iterator<Item = (&str, &ShortExactSequence)> {
        self.items.iter().filter_map(|it| match it {
            Item::Sequence { name, sequence, .. } => Some((name.as_str(), sequence)),
            _ => None,
        })
    }

    /// Counts per kind, e.g. `1 poset, 2 system`.
    pub fn summary(&self) -> String {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for it in &self.items {
            *counts.entry(it.kind()).or_default() += 1;
        }
        counts
            .iter()
            .map(|(k, n)| format!("{n} {k}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// A declaration header with the body lines that follow it.
struct Block<'a> {
    line: usize,
    words: Vec<&'a str>,
    header: &'a str,
    body: Vec<(usize, &'a str)>,
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut blocks: Vec<Block> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let first = content.split_whitespace().next().unwrap_or("");
        let first = first.trim_end_matches(':');
        let is_header = match first {
            "poset" | "system" | "tower" | "hom" | "absystem" | "sequence" => true,
            // `group A gens ...` at top level, `group a: ...` inside an absystem
            "group" => !content.contains(':'),
            _ => false,
        };
        if is_header {
            blocks.push(Block {
                line,
                words: content.split_whitespace().collect(),
                header: content,
                body: Vec::new(),
            });
        } else {
            match blocks.last_mut() {
                Some(b) => b.body.push((line, content)),
                None => return err(line, format!("expected a declaration, found `{content}`")),
            }
        }
    }
    let mut doc = Document::default();
    for b in &blocks {
        let item = match b.words[0] {
            "poset" => parse_poset(b)?,
            "system" => parse_system(b, &doc)?,
            "tower" => parse_tower(b)?,
            "group" => parse_group_decl(b)?,
            "hom" => parse_hom(b, &doc)?,
            "absystem" => parse_absystem(b, &doc)?,
            _ => parse_sequence(b, &doc)?,
        };
        if doc.find(item.name()).is_some() {
            return err(b.line, format!("`{}` is declared twice", item.name()));
        }
        doc.items.push(item);
    }
    Ok(doc)
}

fn expect_no_body(b: &Block) -> Result<(), ParseError> {
    match b.body.first() {
        Some(&(line, content)) => err(line, format!("unexpected line `{content}`")),
        None => Ok(()),
    }
}

fn name_at(b: &Block, k: usize) -> Result<String, ParseError> {
    match b.words.get(k) {
        Some(w) if is_valid_label(w.trim_end_matches(':')) => {
            Ok(w.trim_end_matches(':').to_string())
        }
        Some(w) => err(b.line, format!("invalid name `{w}`")),
        None => err(b.line, format!("incomplete declaration `{}`", b.header)),
    }
}

fn keyword(b: &Block, k: usize, kw: &str) -> Result<(), ParseError> {
    if b.words.get(k) == Some(&kw) {
        Ok(())
    } else {
        err(b.line, format!("expected `{kw}` in `{}`", b.header))
    }
}

/// Splits `key: rest`, returning the words of `key` and `rest`.
fn split_colon(line: usize, content: &str) -> Result<(Vec<&str>, &str), ParseError> {
    match content.split_once(':') {
        Some((k, r)) => Ok((k.split_whitespace().collect(), r.trim())),
        None => err(line, format!("expected `:` in `{content}`")),
    }
}

fn label(line: usize, s: &str) -> Result<String, ParseError> {
    let s = s.trim();
    if is_valid_label(s) {
        Ok(s.to_string())
    } else {
        err(line, format!("invalid label `{s}`"))
    }
}

/// `a -> b` with validated labels.
fn arrow(line: usize, s: &str) -> Result<(String, String), ParseError> {
    match s.split_once("->") {
        Some((a, b)) => Ok((label(line, a)?, label(line, b)?)),
        None => err(line, format!("expected `x -> y`, found `{}`", s.trim())),
    }
}

fn set_literal(line: usize, s: &str) -> Result<Vec<String>, ParseError> {
    let inner = s
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| ParseError {
            line,
            message: format!("expected `{{ ... }}`, found `{s}`"),
        })?;
    inner.split_whitespace().map(|w| label(line, w)).collect()
}

fn matrix_literal(line: usize, s: &str) -> Result<Vec<Vec<i64>>, ParseError> {
    serde_json::from_str(s.trim()).map_err(|e| ParseError {
        line,
        message: format!("bad matrix `{}`: {e}", s.trim()),
    })
}

fn matrix_with_dims(
    line: usize,
    rows: usize,
    cols: usize,
    entries: &[Vec<i64>],
) -> Result<IntMatrix, ParseError> {
    IntMatrix::from_rows_with_dims(rows, cols, entries).ok_or_else(|| ParseError {
        line,
        message: format!("expected a {rows} x {cols} matrix"),
    })
}

fn parse_poset(b: &Block) -> Result<Item, ParseError> {
    let name = name_at(b, 1)?;
    if b.words.len() != 2 {
        return err(b.line, "expected `poset <name>`");
    }
    let mut elements = Vec::new();
    let mut covers = Vec::new();
    for &(line, content) in &b.body {
        let (key, rest) = split_colon(line, content)?;
        match key.as_slice() {
            ["elements"] => {
                for w in rest.split_whitespace() {
                    elements.push(label(line, w)?);
                }
            }
            ["covers"] => {
                for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
                    match pair.split_once('<') {
                        Some((lo, hi)) => covers.push((label(line, lo)?, label(line, hi)?)),
                        None => {
                            return err(line, format!("expected `x < y`, found `{}`", pair.trim()))
                        }
                    }
                }
            }
            _ => {
                return err(
                    line,
                    format!("unexpected line `{content}` in poset `{name}`"),
                )
            }
        }
    }
    let poset = Poset::new(&elements, &covers).map_err(|e| ParseError {
        line: b.line,
        message: e.to_string(),
    })?;
    Ok(Item::Poset { name, poset })
}

fn base_poset(b: &Block, doc: &Document) -> Result<(String, Poset), ParseError> {
    keyword(b, 2, "over")?;
    let over = name_at(b, 3)?;
    if b.words.len() != 4 {
        return err(b.line, format!("unexpected text in `{}`", b.header));
    }
    match doc.poset(&over) {
        Some(p) => Ok((over, p.clone())),
        None => err(b.line, format!("unknown poset `{over}`")),
    }
}

fn element(line: usize, p: &Poset, s: &str) -> Result<usize, ParseError> {
    p.index_of(s).ok_or_else(|| ParseError {
        line,
        message: format!("unknown element `{s}`"),
    })
}

fn parse_system(b: &Block, doc: &Document) -> Result<Item, ParseError> {
    let name = name_at(b, 1)?;
    let (over, base) = base_poset(b, doc)?;
    let mut carriers: Vec<Option<Vec<String>>> = vec![None; base.len()];
    let mut maps = Vec::new();
    for &(line, content) in &b.body {
        let (key, rest) = split_colon(line, content)?;
        match key.as_slice() {
            ["set", e] => {
                let i = element(line, &base, e)?;
                if carriers[i].replace(set_literal(line, rest)?).is_some() {
                    return err(line, format!("carrier of `{e}` given twice"));
                }
            }
            ["map", hi, "->", lo] => {
                let (hi, lo) = (element(line, &base, hi)?, element(line, &base, lo)?);
                let pairs = rest
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| arrow(line, p))
                    .collect::<Result<Vec<_>, _>>()?;
                maps.push((hi, lo, pairs));
            }
            _ => {
                return err(
                    line,
                    format!("unexpected line `{content}` in system `{name}`"),
                )
            }
        }
    }
    let carriers = carriers
        .into_iter()
        .map(Option::unwrap_or_default)
        .collect();
    let system = SetSystem::from_labels(base, carriers, maps).map_err(|e| ParseError {
        line: b.line,
        message: e.to_string(),
    })?;
    Ok(Item::System { name, over, system })
}

fn level(line: usize, s: &str, horizon: usize) -> Result<usize, ParseError> {
    match s.parse::<usize>() {
        Ok(n) if n <= horizon => Ok(n),
        _ => err(line, format!("`{s}` is not a level in 0..={horizon}")),
    }
}

enum TowerRule {
    Table(Vec<(String, String)>),
    ClipDec,
    Identity,
}

fn apply_rule(
    line: usize,
    rule: &TowerRule,
    upper: &[String],
    lower: &[String],
    n: usize,
) -> Result<Vec<usize>, ParseError> {
    let pos = |v: &str| lower.iter().position(|x| x == v);
    let missing = |v: &str| ParseError {
        line,
        message: format!("level {n}: `{v}` is not in the target carrier"),
    };
    match rule {
        TowerRule::Table(pairs) => {
            let lookup: BTreeMap<&str, &str> = pairs
                .iter()
                .map(|(a, b)| (a.as_str(), b.as_str()))
                .collect();
            upper
                .iter()
                .map(|x| {
                    let y = lookup.get(x.as_str()).ok_or_else(|| ParseError {
                        line,
                        message: format!("level {}: `{x}` has no image", n + 1),
                    })?;
                    pos(y).ok_or_else(|| missing(y))
                })
                .collect()
        }
        TowerRule::Identity => upper
            .iter()
            .map(|x| pos(x).ok_or_else(|| missing(x)))
            .collect(),
        TowerRule::ClipDec => upper
            .iter()
            .map(|x| {
                let v: i64 = x.parse().map_err(|_| ParseError {
                    line,
                    message: format!("`clipdec` needs integer values, found `{x}`"),
                })?;
                let y = (v - 1).max(0).to_string();
                pos(&y).ok_or_else(|| missing(&y))
            })
            .collect(),
    }
}

fn parse_tower(b: &Block) -> Result<Item, ParseError> {
    let name = name_at(b, 1)?;
    keyword(b, 2, "horizon")?;
    let horizon: usize = match b.words.get(3).map(|w| w.parse()) {
        Some(Ok(h)) if b.words.len() == 4 => h,
        _ => return err(b.line, "expected `tower <name> horizon <H>`"),
    };
    let mut default_set: Option<Vec<String>> = None;
    let mut sets: Vec<Option<Vec<String>>> = vec![None; horizon + 1];
    let mut default_rule: Option<(usize, TowerRule)> = None;
    let mut rules: Vec<Option<(usize, TowerRule)>> = (0..horizon).map(|_| None).collect();
    for &(line, content) in &b.body {
        let (key, rest) = split_colon(line, content)?;
        let rule = || -> Result<TowerRule, ParseError> {
            Ok(match rest {
                "clipdec" => TowerRule::ClipDec,
                "identity" => TowerRule::Identity,
                _ => TowerRule::Table(
                    rest.split(',')
                        .filter(|p| !p.trim().is_empty())
                        .map(|p| arrow(line, p))
                        .collect::<Result<_, _>>()?,
                ),
            })
        };
        match key.as_slice() {
            ["set", "*"] => default_set = Some(set_literal(line, rest)?),
            ["set", n] => sets[level(line, n, horizon)?] = Some(set_literal(line, rest)?),
            ["map", "*"] => default_rule = Some((line, rule()?)),
            ["map", hi, "->", lo] => {
                let (hi, lo) = (level(line, hi, horizon)?, level(line, lo, horizon)?);
                if hi != lo + 1 {
                    return err(
                        line,
                        format!("tower maps go from n+1 to n, found {hi} -> {lo}"),
                    );
                }
                rules[lo] = Some((line, rule()?));
            }
            _ => {
                return err(
                    line,
                    format!("unexpected line `{content}` in tower `{name}`"),
                )
            }
        }
    }
    let carriers: Vec<Vec<String>> = sets
        .into_iter()
        .enumerate()
        .map(|(n, s)| {
            s.or_else(|| default_set.clone()).ok_or_else(|| ParseError {
                line: b.line,
                message: format!("no set for level {n}"),
            })
        })
        .collect::<Result<_, _>>()?;
    let mut bonds = Vec::with_capacity(horizon);
    for (n, r) in rules.iter().enumerate() {
        let (line, rule) = match r.as_ref().or(default_rule.as_ref()) {
            Some((l, r)) => (*l, r),
            None => return err(b.line, format!("no map {} -> {n}", n + 1)),
        };
        bonds.push(apply_rule(line, rule, &carriers[n + 1], &carriers[n], n)?);
    }
    let tower = Tower::new(carriers, bonds).map_err(|e| ParseError {
        line: b.line,
        message: e.to_string(),
    })?;
    Ok(Item::Tower { name, tower })
}

/// `gens K relations [[...]]`
fn group_spec(line: usize, s: &str) -> Result<FgAbGroup, ParseError> {
    let words: Vec<&str> = s.splitn(4, char::is_whitespace).map(str::trim).collect();
    let (ngens, rels) = match words.as_slice() {
        ["gens", k, "relations", rels] => match k.parse::<usize>() {
            Ok(k) => (k, *rels),
            Err(_) => return err(line, format!("bad generator count `{k}`")),
        },
        ["gens", k] => match k.parse::<usize>() {
            Ok(k) => (k, "[]"),
            Err(_) => return err(line, format!("bad generator count `{k}`")),
        },
        _ => {
            return err(
                line,
                format!("expected `gens K relations [[...]]`, found `{s}`"),
            )
        }
    };
    let rows = matrix_literal(line, rels)?;
    let rels = if rows.is_empty() {
        IntMatrix::zeros(0, ngens)
    } else {
        matrix_with_dims(line, rows.len(), ngens, &rows)?
    };
    FgAbGroup::new(ngens, rels).map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })
}

fn parse_group_decl(b: &Block) -> Result<Item, ParseError> {
    expect_no_body(b)?;
    let name = name_at(b, 1)?;
    let rest = b
        .header
        .split_once(b.words[1])
        .map(|(_, r)| r.trim())
        .unwrap_or("");
    Ok(Item::Group {
        name,
        group: group_spec(b.line, rest)?,
    })
}

fn parse_hom(b: &Block, doc: &Document) -> Result<Item, ParseError> {
    expect_no_body(b)?;
    let name = name_at(b, 1)?;
    let source = name_at(b, 2)?;
    keyword(b, 3, "->")?;
    let target = name_at(b, 4)?;
    keyword(b, 5, "matrix")?;
    let lookup = |g: &str| {
        doc.group(g).cloned().ok_or_else(|| ParseError {
            line: b.line,
            message: format!("unknown group `{g}`"),
        })
    };
    let (src, tgt) = (lookup(&source)?, lookup(&target)?);
    let lit = b.header.split_once("matrix").map(|(_, r)| r).unwrap_or("");
    let m = matrix_with_dims(
        b.line,
        tgt.ngens(),
        src.ngens(),
        &matrix_literal(b.line, lit)?,
    )?;
    let hom = AbHom::new(src, tgt, m).map_err(|e| ParseError {
        line: b.line,
        message: e.to_string(),
    })?;
    Ok(Item::Hom {
        name,
        source,
        target,
        hom,
    })
}

fn parse_absystem(b: &Block, doc: &Document) -> Result<Item, ParseError> {
    let name = name_at(b, 1)?;
    let (over, base) = base_poset(b, doc)?;
    let mut groups: Vec<Option<FgAbGroup>> = vec![None; base.len()];
    let mut maps = Vec::new();
    for &(line, content) in &b.body {
        let (key, rest) = split_colon(line, content)?;
        match key.as_slice() {
            ["group", e] => {
                let i = element(line, &base, e)?;
                if groups[i].replace(group_spec(line, rest)?).is_some() {
                    return err(line, format!("group at `{e}` given twice"));
                }
            }
            ["map", hi, "->", lo] => {
                let (hi, lo) = (element(line, &base, hi)?, element(line, &base, lo)?);
                let lit = rest.strip_prefix("matrix").ok_or_else(|| ParseError {
                    line,
                    message: "expected `matrix [[...]]`".into(),
                })?;
                maps.push((line, lo, hi, matrix_literal(line, lit)?));
            }
            _ => {
                return err(
                    line,
                    format!("unexpected line `{content}` in absystem `{name}`"),
                )
            }
        }
    }
    let groups: Vec<FgAbGroup> = groups
        .into_iter()
        .map(|g| g.unwrap_or_else(FgAbGroup::trivial))
        .collect();
    let mut bonds = BTreeMap::new();
    for (line, lo, hi, rows) in maps {
        let m = matrix_with_dims(line, groups[lo].ngens(), groups[hi].ngens(), &rows)?;
        if bonds.insert((lo, hi), m).is_some() {
            return err(line, "bond declared twice");
        }
    }
    let system = AbSystem::new(base, groups, bonds).map_err(|e| ParseError {
        line: b.line,
        message: e.to_string(),
    })?;
    Ok(Item::AbSystem { name, over, system })
}

fn parse_sequence(b: &Block, doc: &Document) -> Result<Item, ParseError> {
    let name = name_at(b, 1)?;
    if !b.words[1].ends_with(':') || b.words.len() != 7 || b.words[3] != "->" || b.words[5] != "->"
    {
        return err(b.line, "expected `sequence <name>: A -> B -> C`");
    }
    let parts = [name_at(b, 2)?, name_at(b, 4)?, name_at(b, 6)?];
    let sys: Vec<AbSystem> = parts
        .iter()
        .map(|p| {
            doc.absystem(p).cloned().ok_or_else(|| ParseError {
                line: b.line,
                message: format!("unknown absystem `{p}`"),
            })
        })
        .collect::<Result<_, _>>()?;
    let base = sys[0].base().clone();
    if sys.iter().any(|s| s.base() != &base) {
        return err(b.line, "the three systems live over different posets");
    }
    let mut u: Vec<Option<IntMatrix>> = vec![None; base.len()];
    let mut v: Vec<Option<IntMatrix>> = vec![None; base.len()];
    for &(line, content) in &b.body {
        let (key, rest) = split_colon(line, content)?;
        let (slot, i, rows, cols) = match key.as_slice() {
            ["u", e] => {
                let i = element(line, &base, e)?;
                (&mut u, i, sys[1].group(i).ngens(), sys[0].group(i).ngens())
            }
            ["v", e] => {
                let i = element(line, &base, e)?;
                (&mut v, i, sys[2].group(i).ngens(), sys[1].group(i).ngens())
            }
            _ => {
                return err(
                    line,
                    format!("unexpected line `{content}` in sequence `{name}`"),
                )
            }
        };
        let m = matrix_with_dims(line, rows, cols, &matrix_literal(line, rest)?)?;
        if slot[i].replace(m).is_some() {
            return err(line, format!("{} at `{}` given twice", key[0], key[1]));
        }
    }
    let fill = |maps: Vec<Option<IntMatrix>>, from: &AbSystem, to: &AbSystem| -> Vec<IntMatrix> {
        maps.into_iter()
            .enumerate()
            .map(|(i, m)| {
                m.unwrap_or_else(|| IntMatrix::zeros(to.group(i).ngens(), from.group(i).ngens()))
            })
            .collect()
    };
    let u = fill(u, &sys[0], &sys[1]);
    let v = fill(v, &sys[1], &sys[2]);
    let [a, bb, c]: [AbSystem; 3] = sys.try_into().expect("three systems");
    let sequence = ShortExactSequence::new(a, bb, c, u, v).map_err(|e| ParseError {
        line: b.line,
        message: e.to_string(),
    })?;
    Ok(Item::Sequence {
        name,
        parts,
        sequence,
    })
}

pub fn format_matrix(m: &IntMatrix) -> String {
    if m.rows() == 0 || m.cols() == 0 {
        return "[]".into();
    }
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            format!(
                "[{}]",
                m.row(i)
                    .iter()
                    .map(BigInt::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn format_group(g: &FgAbGroup) -> String {
    format!(
        "gens {} relations {}",
        g.ngens(),
        format_matrix(g.relations())
    )
}

fn print_item(out: &mut String, item: &Item) {
    match item {
        Item::Poset { name, poset } => {
            let _ = writeln!(out, "poset {name}");
            let _ = writeln!(out, "elements: {}", poset.labels().join(" "));
            let covers: Vec<String> = poset
                .covers()
                .iter()
                .map(|&(lo, hi)| format!("{} < {}", poset.label(lo), poset.label(hi)))
                .collect();
            if !covers.is_empty() {
                let _ = writeln!(out, "covers: {}", covers.join(", "));
            }
        }
        Item::System { name, over, system } => {
            let base = system.base();
            let _ = writeln!(out, "system {name} over {over}");
            for i in 0..base.len() {
                let _ = writeln!(
                    out,
                    "set {}: {{ {} }}",
                    base.label(i),
                    system.carrier(i).join(" ")
                );
            }
            for (&(lo, hi), table) in system.declared_bonds() {
                let pairs: Vec<String> = table
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| {
                        format!("{} -> {}", system.carrier(hi)[x], system.carrier(lo)[y])
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    "map {} -> {}: {}",
                    base.label(hi),
                    base.label(lo),
                    pairs.join(", ")
                );
            }
        }
        Item::Tower { name, tower } => {
            let _ = writeln!(out, "tower {name} horizon {}", tower.horizon());
            for n in 0..=tower.horizon() {
                let _ = writeln!(out, "set {n}: {{ {} }}", tower.carrier(n).join(" "));
            }
            for n in 0..tower.horizon() {
                let table = tower.system().bond(n, n + 1).expect("tower bond");
                let pairs: Vec<String> = table
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| {
                        format!("{} -> {}", tower.carrier(n + 1)[x], tower.carrier(n)[y])
                    })
                    .collect();
                let _ = writeln!(out, "map {} -> {n}: {}", n + 1, pairs.join(", "));
            }
        }
        Item::Group { name, group } => {
            let _ = writeln!(out, "group {name} {}", format_group(group));
        }
        Item::Hom {
            name,
            source,
            target,
            hom,
        } => {
            let _ = writeln!(
                out,
                "hom {name} {source} -> {target} matrix {}",
                format_matrix(hom.matrix())
            );
        }
        Item::AbSystem { name, over, system } => {
            let base = system.base();
            let _ = writeln!(out, "absystem {name} over {over}");
            for i in 0..base.len() {
                let _ = writeln!(
                    out,
                    "group {}: {}",
                    base.label(i),
                    format_group(system.group(i))
                );
            }
            for (&(lo, hi), m) in system.declared_bonds() {
                let _ = writeln!(
                    out,
                    "map {} -> {}: matrix {}",
                    base.label(hi),
                    base.label(lo),
                    format_matrix(m)
                );
            }
        }
        Item::Sequence {
            name,
            parts,
            sequence,
        } => {
            let base = sequence.a().base();
            let _ = writeln!(
                out,
                "sequence {name}: {} -> {} -> {}",
                parts[0], parts[1], parts[2]
            );
            for i in 0..base.len() {
                let _ = writeln!(out, "u {}: {}", base.label(i), format_matrix(sequence.u(i)));
            }
            for i in 0..base.len() {
                let _ = writeln!(out, "v {}: {}", base.label(i), format_matrix(sequence.v(i)));
            }
        }
    }
}

/// Normalized text: every carrier, group and map spelled out, one blank
/// line between declarations.
pub fn print_document(doc: &Document) -> String {
    let mut out = String::new();
    for (k, item) in doc.items.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        print_item(&mut out, item);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const WEDGE: &str = "\
poset W   # the wedge
elements: a b c
covers: c < a, c < b

system S over W
set a: { x0 x1 }
set b: { y }
set c: { z }
map a -> c: x0 -> z, x1 -> z
map b -> c: y -> z
";

    #[test]
    fn parses_poset_and_system() {
        let doc = parse_document(WEDGE).unwrap();
        assert_eq!(doc.summary(), "1 poset, 1 system");
        let (_, s) = doc.set_systems().next().unwrap();
        assert_eq!(s.limit_threads(100).unwrap().len(), 2);
    }

    #[test]
    fn print_is_a_fixpoint() {
        let once = print_document(&parse_document(WEDGE).unwrap());
        let twice = print_document(&parse_document(&once).unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn tower_rules() {
        let doc = parse_document(
            "tower T horizon 3\nset *: { 0 1 2 }\nmap *: clipdec\nmap 3 -> 2: identity\n",
        )
        .unwrap();
        let (_, t) = doc.towers().next().unwrap();
        assert_eq!(t.system().bond(0, 1).unwrap(), &[0, 0, 1]);
        assert_eq!(t.system().bond(2, 3).unwrap(), &[0, 1, 2]);
    }

    #[test]
    fn groups_and_homs() {
        let doc = parse_document("group A gens 2 relations [[2,0],[0,4]]\ngroup B gens 1 relations [[2]]\nhom f A -> B matrix [[1,0]]\n")
            .unwrap();
        assert_eq!(doc.group("A").unwrap().invariants().torsion.len(), 2);
        let bad = parse_document(
            "group A gens 1\ngroup B gens 1 relations [[2]]\nhom f B -> A matrix [[1]]\n",
        );
        assert_eq!(bad.unwrap_err().line, 3);
    }

    #[test]
    fn absystem_with_empty_matrices() {
        let text = "poset W\nelements: a b c\ncovers: c < a, c < b\n\nabsystem Z over W\ngroup c: gens 1\nmap a -> c: matrix []\nmap b -> c: matrix []\n";
        let doc = parse_document(text).unwrap();
        let (_, s) = doc.absystems().next().unwrap();
        assert_eq!(s.group(2).ngens(), 1);
        let printed = print_document(&doc);
        assert_eq!(print_document(&parse_document(&printed).unwrap()), printed);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_document("poset P\nelements: a b\ncovers: a < q\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_document("\n\nelements: a\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_document("poset P\nelements: a b\nedges: a < b\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_document("poset P\nelements: a\nsystem S over Q\n").unwrap_err();
        assert_eq!(e.line, 3);
    }
}
