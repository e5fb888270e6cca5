//! Relative presentations `⟨S_0, P_1, …, P_m | 𝓡⟩` and their text format.
//!
//! ```text
//! group z_free_z2
//! hyperbolic a
//! parabolic free_abelian 2
//! letters x y
//! relator ...            # optional, any number
//! constants delta=1 c2=2 # optional
//! ```
//!
//! Generators are single lowercase ASCII letters; the uppercase letter is
//! the inverse. A `finite <n>` descriptor is followed by `n` lines
//! `table <row>` of element indices (0 is the identity) and a `letters`
//! line naming the `n - 1` non-identity elements in order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::words::{Letter, Word};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSymbol {
    pub name: char,
    pub inverse: bool,
}

impl GeneratorSymbol {
    pub fn inverse(self) -> Self {
        GeneratorSymbol { name: self.name, inverse: !self.inverse }
    }

    /// `x` → generator, `X` → inverse.
    pub fn from_char(c: char) -> Option<Self> {
        if c.is_ascii_lowercase() {
            Some(GeneratorSymbol { name: c, inverse: false })
        } else if c.is_ascii_uppercase() {
            Some(GeneratorSymbol { name: c.to_ascii_lowercase(), inverse: true })
        } else {
            None
        }
    }

    pub fn to_char(self) -> char {
        if self.inverse {
            self.name.to_ascii_uppercase()
        } else {
            self.name
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum LetterClass {
    Hyperbolic,
    /// 1-based index of the parabolic subgroup.
    Parabolic(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParabolicKind {
    FreeAbelian { rank: usize },
    /// Cayley table over elements `0..n`, element 0 the identity.
    Finite { table: Vec<Vec<usize>> },
    Free { rank: usize },
}

impl ParabolicKind {
    pub fn name(&self) -> &'static str {
        match self {
            ParabolicKind::FreeAbelian { .. } => "free_abelian",
            ParabolicKind::Finite { .. } => "finite",
            ParabolicKind::Free { .. } => "free",
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            ParabolicKind::FreeAbelian { .. } => true,
            ParabolicKind::Free { rank } => *rank <= 1,
            ParabolicKind::Finite { table } => {
                let n = table.len();
                (0..n).all(|i| (0..n).all(|j| table[i][j] == table[j][i]))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicDescriptor {
    pub index: usize,
    pub kind: ParabolicKind,
    pub generators: Vec<char>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativePresentation {
    pub label: String,
    pub hyperbolic_generators: Vec<char>,
    pub parabolics: Vec<ParabolicDescriptor>,
    pub relators: Vec<Word>,
    /// Raw `constants` block; interpreted by `tables::ConstantsProfile`.
    pub constants: BTreeMap<String, u64>,
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, msg: msg.into() }
}

fn parse_letters(line: usize, tokens: &[&str]) -> Result<Vec<char>> {
    tokens
        .iter()
        .map(|t| {
            let mut cs = t.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) if c.is_ascii_lowercase() => Ok(c),
                _ => Err(syntax(line, format!("generator '{t}' must be a single lowercase letter"))),
            }
        })
        .collect()
}

/// Parses `key=value` pairs of a constants line into `into`.
pub fn parse_constants_line(line: usize, tokens: &[&str], into: &mut BTreeMap<String, u64>) -> Result<()> {
    for t in tokens {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected key=value, found '{t}'")))?;
        let v: u64 = v
            .parse()
            .map_err(|_| syntax(line, format!("'{v}' is not a nonnegative integer")))?;
        into.insert(k.to_string(), v);
    }
    Ok(())
}

struct PendingDescriptor {
    line: usize,
    kind: String,
    params: Vec<String>,
    table: Vec<Vec<usize>>,
    letters: Option<Vec<char>>,
}

pub fn parse_presentation(text: &str) -> Result<RelativePresentation> {
    let mut label = None;
    let mut hyperbolic: Option<Vec<char>> = None;
    let mut pending: Vec<PendingDescriptor> = Vec::new();
    let mut relators: Vec<(usize, String)> = Vec::new();
    let mut constants = BTreeMap::new();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let rest = &tokens[1..];
        match tokens[0] {
            "group" => {
                if label.is_some() {
                    return Err(syntax(line, "repeated 'group' line"));
                }
                label = Some(rest.join(" "));
            }
            "hyperbolic" => {
                if hyperbolic.is_some() {
                    return Err(syntax(line, "repeated 'hyperbolic' line"));
                }
                hyperbolic = Some(parse_letters(line, rest)?);
            }
            "parabolic" => {
                let kind = rest.first().ok_or_else(|| syntax(line, "parabolic kind missing"))?;
                pending.push(PendingDescriptor {
                    line,
                    kind: kind.to_string(),
                    params: rest[1..].iter().map(|s| s.to_string()).collect(),
                    table: Vec::new(),
                    letters: None,
                });
            }
            "table" => {
                let d = pending
                    .last_mut()
                    .ok_or_else(|| syntax(line, "'table' outside a parabolic block"))?;
                if d.letters.is_some() {
                    return Err(syntax(line, "'table' after 'letters'"));
                }
                let row = rest
                    .iter()
                    .map(|t| t.parse::<usize>().map_err(|_| syntax(line, format!("bad table entry '{t}'"))))
                    .collect::<Result<Vec<_>>>()?;
                d.table.push(row);
            }
            "letters" => {
                let d = pending
                    .last_mut()
                    .ok_or_else(|| syntax(line, "'letters' outside a parabolic block"))?;
                if d.letters.is_some() {
                    return Err(syntax(line, "repeated 'letters' line"));
                }
                d.letters = Some(parse_letters(line, rest)?);
            }
            "relator" => {
                if rest.len() != 1 {
                    return Err(syntax(line, "expected exactly one word after 'relator'"));
                }
                relators.push((line, rest[0].to_string()));
            }
            "constants" => parse_constants_line(line, rest, &mut constants)?,
            other => return Err(syntax(line, format!("unknown directive '{other}'"))),
        }
    }

    let label = label.ok_or_else(|| syntax(0, "missing 'group' line"))?;
    let hyperbolic_generators = hyperbolic.ok_or_else(|| syntax(0, "missing 'hyperbolic' line"))?;

    let mut parabolics = Vec::new();
    for (i, d) in pending.into_iter().enumerate() {
        parabolics.push(build_descriptor(i + 1, d)?);
    }

    let mut p = RelativePresentation {
        label,
        hyperbolic_generators,
        parabolics,
        relators: Vec::new(),
        constants,
    };
    p.check_alphabet()?;
    for (line, text) in relators {
        let raw = p.parse_letters(&text).map_err(|e| match e {
            Error::UnknownLetter(c) => syntax(line, format!("relator over unknown letter '{c}'")),
            e => e,
        })?;
        let reduced = Word::from_letters(raw.iter().copied());
        if reduced.is_empty() || reduced.len() != raw.len() {
            return Err(Error::InvalidRelator(text));
        }
        p.relators.push(reduced);
    }
    Ok(p)
}

fn build_descriptor(index: usize, d: PendingDescriptor) -> Result<ParabolicDescriptor> {
    let malformed = |msg: String| Error::MalformedDescriptor(format!("line {}: {msg}", d.line));
    let generators = d.letters.clone().ok_or_else(|| malformed("missing 'letters' line".into()))?;
    let single_param = || -> Result<usize> {
        match d.params.as_slice() {
            [p] => p.parse().map_err(|_| malformed(format!("bad parameter '{p}'"))),
            _ => Err(malformed(format!("'{}' takes exactly one parameter", d.kind))),
        }
    };
    let kind = match d.kind.as_str() {
        "free_abelian" | "free" => {
            let rank = single_param()?;
            if generators.len() != rank {
                return Err(malformed(format!("rank {rank} but {} letters", generators.len())));
            }
            if !d.table.is_empty() {
                return Err(malformed("'table' only applies to finite kinds".into()));
            }
            if d.kind == "free" {
                ParabolicKind::Free { rank }
            } else {
                ParabolicKind::FreeAbelian { rank }
            }
        }
        "finite" => {
            let order = single_param()?;
            validate_table(order, &d.table).map_err(malformed)?;
            if generators.len() + 1 != order {
                return Err(malformed(format!(
                    "order {order} needs {} letters, found {}",
                    order - 1,
                    generators.len()
                )));
            }
            ParabolicKind::Finite { table: d.table }
        }
        other => return Err(malformed(format!("unknown kind '{other}'"))),
    };
    if generators.is_empty() {
        return Err(malformed("a parabolic subgroup needs at least one generator".into()));
    }
    Ok(ParabolicDescriptor { index, kind, generators })
}

fn validate_table(order: usize, table: &[Vec<usize>]) -> std::result::Result<(), String> {
    if order < 2 {
        return Err("finite order must be at least 2".into());
    }
    if table.len() != order || table.iter().any(|r| r.len() != order) {
        return Err(format!("table must be {order}x{order}"));
    }
    for (i, r) in table.iter().enumerate() {
        if table[0][i] != i || r[0] != i {
            return Err("element 0 must be the identity".into());
        }
        let mut row: Vec<usize> = r.clone();
        let mut col: Vec<usize> = (0..order).map(|j| table[j][i]).collect();
        row.sort_unstable();
        col.sort_unstable();
        if row != (0..order).collect::<Vec<_>>() || col != (0..order).collect::<Vec<_>>() {
            return Err("table is not a Latin square".into());
        }
    }
    for a in 0..order {
        for b in 0..order {
            for c in 0..order {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err("table is not associative".into());
                }
            }
        }
    }
    Ok(())
}

impl RelativePresentation {
    /// All generators: `S_0` first, then each `S_i` in descriptor order.
    pub fn generators(&self) -> Vec<char> {
        let mut out = self.hyperbolic_generators.clone();
        for d in &self.parabolics {
            out.extend_from_slice(&d.generators);
        }
        out
    }

    fn check_alphabet(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for c in self.generators() {
            if !seen.insert(c) {
                return Err(Error::DuplicateGenerator(c));
            }
        }
        Ok(())
    }

    fn generator_index(&self, name: char) -> Option<usize> {
        self.generators().iter().position(|&c| c == name)
    }

    pub fn letter(&self, g: GeneratorSymbol) -> Result<Letter> {
        self.generator_index(g.name)
            .map(|i| Letter::new(i, g.inverse))
            .ok_or_else(|| Error::UnknownLetter(g.to_char()))
    }

    pub fn symbol(&self, l: Letter) -> GeneratorSymbol {
        GeneratorSymbol { name: self.generators()[l.generator()], inverse: l.is_inverse() }
    }

    /// Parses word syntax (`abA` = a·b·a⁻¹; `1` or the empty string is the identity)
    /// without reducing.
    pub fn parse_letters(&self, text: &str) -> Result<Vec<Letter>> {
        let text = text.trim();
        if text == "1" {
            return Ok(Vec::new());
        }
        let gens = self.generators();
        text.chars()
            .map(|c| {
                let g = GeneratorSymbol::from_char(c).ok_or(Error::UnknownLetter(c))?;
                gens.iter()
                    .position(|&n| n == g.name)
                    .map(|i| Letter::new(i, g.inverse))
                    .ok_or(Error::UnknownLetter(c))
            })
            .collect()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        Ok(Word::from_letters(self.parse_letters(text)?))
    }

    pub fn format_letters(&self, letters: &[Letter]) -> String {
        let gens = self.generators();
        letters
            .iter()
            .map(|l| {
                GeneratorSymbol { name: gens[l.generator()], inverse: l.is_inverse() }.to_char()
            })
            .collect()
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.format_letters(w.letters())
    }

    pub fn rank(&self) -> usize {
        self.parabolics.len()
    }

    /// Canonical text form; `parse_presentation(&p.to_text()) == p`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "group {}", self.label);
        let hyp: Vec<String> = self.hyperbolic_generators.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(s, "hyperbolic {}", hyp.join(" ")).map(|_| ());
        for d in &self.parabolics {
            match &d.kind {
                ParabolicKind::FreeAbelian { rank } => {
                    let _ = writeln!(s, "parabolic free_abelian {rank}");
                }
                ParabolicKind::Free { rank } => {
                    let _ = writeln!(s, "parabolic free {rank}");
                }
                ParabolicKind::Finite { table } => {
                    let _ = writeln!(s, "parabolic finite {}", table.len());
                    for row in table {
                        let row: Vec<String> = row.iter().map(|e| e.to_string()).collect();
                        let _ = writeln!(s, "table {}", row.join(" "));
                    }
                }
            }
            let letters: Vec<String> = d.generators.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "letters {}", letters.join(" "));
        }
        for r in &self.relators {
            let _ = writeln!(s, "relator {}", self.format_word(r));
        }
        if !self.constants.is_empty() {
            let kv: Vec<String> = self.constants.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "constants {}", kv.join(" "));
        }
        s
    }
}

/// The part of the partition `S = S_0 ∪ S_1 ∪ … ∪ S_m` containing `g`.
pub fn classify_letter(p: &RelativePresentation, g: GeneratorSymbol) -> Result<LetterClass> {
    if p.hyperbolic_generators.contains(&g.name) {
        return Ok(LetterClass::Hyperbolic);
    }
    p.parabolics
        .iter()
        .find(|d| d.generators.contains(&g.name))
        .map(|d| LetterClass::Parabolic(d.index))
        .ok_or(Error::UnknownLetter(g.to_char()))
}
