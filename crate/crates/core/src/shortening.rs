//! Curve shortening: reduction to relative `k`-local geodesics (`k = 8δ+1`),
//! the word problem built on it, and cyclic shortening with a tracked
//! conjugator.

use std::ops::Range;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::words::{cyclic_reduce, normalize_parts, split_syllables, Letter, SyllableKind, Word};

type Parts = Vec<(SyllableKind, Vec<Letter>)>;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    /// Free reduction and normal forms of parabolic components.
    ParabolicNormalization,
    /// A window replaced by its entry in `L5`.
    TableReplacement,
    /// A window replaced by a relative geodesic found by direct search.
    MetricReplacement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    /// Letter span of the word before this step.
    pub span: Range<usize>,
    pub replaced: Word,
    pub replacement: Word,
    pub justification: Justification,
}

#[derive(Clone, Debug)]
pub struct ShorteningResult {
    pub output: Word,
    pub steps: Vec<RewriteStep>,
}

impl ShorteningResult {
    pub fn relative_length(&self, engine: &Engine) -> usize {
        split_syllables(engine.group(), self.output.letters()).len()
    }
}

/// `α` with `lab(α) = a⁻¹·u·a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicShorteningResult {
    pub output: Word,
    pub conjugator: Word,
    pub iterations: usize,
}

fn flatten(parts: &[(SyllableKind, Vec<Letter>)]) -> Vec<Letter> {
    parts.iter().flat_map(|(_, l)| l.iter().copied()).collect()
}

fn letter_offset(parts: &[(SyllableKind, Vec<Letter>)], syllable: usize) -> usize {
    parts[..syllable].iter().map(|(_, l)| l.len()).sum()
}

/// A relative geodesic for `window` when its relative length is below
/// `len`, the number of syllables it spans.
fn shorter_window(engine: &Engine, window: &[Letter], len: usize) -> Result<Option<(Word, Justification)>> {
    let oracle = engine.oracle();
    if let Some(tables) = engine.tables() {
        if let Some(rep) = tables.l5.get(&oracle.key(window)) {
            let rel = split_syllables(engine.group(), rep.letters()).len();
            return Ok((rel < len).then(|| (rep.clone(), Justification::TableReplacement)));
        }
    }
    if engine.fallback() {
        if oracle.relative_length(window)? < len {
            return Ok(Some((oracle.relative_geodesic(window)?, Justification::MetricReplacement)));
        }
        return Ok(None);
    }
    match engine.tables() {
        // Windows outside L5 are taken to be geodesic.
        Some(_) => Ok(None),
        None => Err(Error::MissingTables),
    }
}

/// Whether every window of at most `k` syllables is already a relative
/// geodesic. In a free product a normalised word always is: its syllable
/// count is the relative length of each of its subwords.
fn windows_trivially_geodesic(engine: &Engine) -> bool {
    engine.oracle().is_free_product()
}

/// Reduces `w` to a relative `k`-local geodesic representing the same
/// element, leftmost then shortest violating window first.
pub fn shorten(engine: &Engine, w: &Word) -> Result<ShorteningResult> {
    let group = engine.group();
    let k = engine.k();
    let mut steps = Vec::new();
    let mut parts: Parts = normalize_parts(group, w.letters());
    let flat = flatten(&parts);
    if flat != w.letters() {
        steps.push(RewriteStep {
            span: 0..w.len(),
            replaced: w.clone(),
            replacement: Word::from_letters(flat),
            justification: Justification::ParabolicNormalization,
        });
    }
    if windows_trivially_geodesic(engine) {
        return Ok(ShorteningResult { output: Word::from_letters(flatten(&parts)), steps });
    }
    let mut from = 0;
    loop {
        let mut hit = None;
        'scan: for s in from..parts.len() {
            for len in 2..=k.min(parts.len() - s) {
                let window = flatten(&parts[s..s + len]);
                if let Some((rep, why)) = shorter_window(engine, &window, len)? {
                    hit = Some((s, len, window, rep, why));
                    break 'scan;
                }
            }
        }
        let Some((s, len, window, rep, why)) = hit else {
            break;
        };
        let start = letter_offset(&parts, s);
        let mut raw = flatten(&parts[..s]);
        raw.extend_from_slice(rep.letters());
        raw.extend(flatten(&parts[s + len..]));
        steps.push(RewriteStep {
            span: start..start + window.len(),
            replaced: Word::from_letters(window),
            replacement: rep,
            justification: why,
        });
        let next = normalize_parts(group, &raw);
        let unchanged = parts.iter().zip(&next).take_while(|(a, b)| a == b).count();
        from = unchanged.saturating_sub(k);
        parts = next;
    }
    Ok(ShorteningResult { output: Word::from_letters(flatten(&parts)), steps })
}

/// Whether `w` is trivial in `G`: shorten, then a nonempty output longer
/// than `2δ` cannot close up; shorter outputs are looked up in the
/// trivial-loop table, or checked by the metric oracle under the fallback.
pub fn word_problem(engine: &Engine, w: &Word) -> Result<bool> {
    let out = shorten(engine, w)?.output;
    if out.is_empty() {
        return Ok(true);
    }
    let rel = split_syllables(engine.group(), out.letters()).len();
    if rel as u64 > 2 * engine.profile().delta {
        return Ok(false);
    }
    if let Some(t) = engine.tables() {
        let key = engine.oracle().key(out.letters());
        if t.trivial_loops.iter().any(|l| engine.oracle().key(l.letters()) == key) {
            return Ok(true);
        }
        if !engine.fallback() {
            return Ok(false);
        }
    } else if !engine.fallback() {
        return Err(Error::MissingTables);
    }
    Ok(engine.oracle().is_trivial(out.letters()))
}

/// `g·u·g⁻¹ = v`, checked with [`word_problem`].
pub fn verify_conjugator(engine: &Engine, g: &Word, u: &Word, v: &Word) -> Result<bool> {
    word_problem(engine, &Word::product(&[g, u, &g.inverse(), &v.inverse()]))
}

struct Cyclic {
    rho: Word,
    conj: Word,
}

impl Cyclic {
    /// Replaces `ρ` by `c⁻¹·ρ·c`, given as `next`.
    fn conjugate(&mut self, c: &Word, next: Word) {
        self.conj = self.conj.concat(c);
        self.rho = next;
    }
}

fn parts_of(engine: &Engine, w: &Word) -> Parts {
    split_syllables(engine.group(), w.letters())
        .into_iter()
        .map(|s| (s.kind, s.subword.into_letters()))
        .collect()
}

/// Cyclically reduces letters and folds a parabolic component split across
/// the junction. Returns whether anything changed.
fn tidy_junction(engine: &Engine, st: &mut Cyclic) -> Result<bool> {
    let (core, b) = cyclic_reduce(&st.rho);
    if !b.is_empty() {
        let out = shorten(engine, &core)?.output;
        st.conjugate(&b, out);
        return Ok(true);
    }
    let parts = parts_of(engine, &st.rho);
    if parts.len() >= 2 {
        let (first, last) = (&parts[0], &parts[parts.len() - 1]);
        if first.0 == last.0 && matches!(first.0, SyllableKind::Parabolic(_)) {
            // Move the last component Q to the front: Q·ρ·Q⁻¹.
            let q = Word::from_letters(last.1.iter().copied());
            let mut raw = q.letters().to_vec();
            raw.extend(flatten(&parts[..parts.len() - 1]));
            let out = shorten(engine, &Word::from_letters(raw))?.output;
            st.conjugate(&q.inverse(), out);
            return Ok(true);
        }
    }
    Ok(false)
}

/// Smallest junction window `ν∘η` (tail then head) that is not a relative
/// geodesic, as `(t, h, geodesic)`.
fn junction_violation(engine: &Engine, parts: &Parts) -> Result<Option<(usize, usize, Word)>> {
    let n = parts.len();
    let k = engine.k();
    for total in 2..=k.min(n) {
        for t in 1..total {
            let h = total - t;
            let mut window = flatten(&parts[n - t..]);
            window.extend(flatten(&parts[..h]));
            if let Some((rep, _)) = shorter_window(engine, &window, total)? {
                return Ok(Some((t, h, rep)));
            }
        }
    }
    Ok(None)
}

/// Conjugates `w` to a cyclic relative `k`-local geodesic `α`, tracking `a`
/// with `lab(α) = a⁻¹·w·a`. Among rotations at syllable boundaries the
/// shortlex-least is returned.
pub fn cyclic_shorten(engine: &Engine, w: &Word) -> Result<CyclicShorteningResult> {
    let guard = w.len() + 1;
    let (core, a0) = cyclic_reduce(w);
    let mut st = Cyclic { rho: shorten(engine, &core)?.output, conj: a0 };
    let mut iterations = 0;
    loop {
        if tidy_junction(engine, &mut st)? {
            continue;
        }
        let parts = parts_of(engine, &st.rho);
        if parts.len() < 2 || windows_trivially_geodesic(engine) {
            break;
        }
        let Some((t, h, rep)) = junction_violation(engine, &parts)? else {
            break;
        };
        iterations += 1;
        if iterations >= guard {
            return Err(Error::NonTermination(guard));
        }
        // ρ = η·μ·ν, conjugated by η to μ·ν·η, with ν·η replaced.
        let n = parts.len();
        let eta = Word::from_letters(flatten(&parts[..h]));
        let mut raw = flatten(&parts[h..n - t]);
        raw.extend_from_slice(rep.letters());
        let out = shorten(engine, &Word::from_letters(raw))?.output;
        st.conjugate(&eta, out);
    }
    let parts = parts_of(engine, &st.rho);
    let mut best = st.rho.clone();
    let mut best_prefix = Word::empty();
    for j in 1..parts.len() {
        let cut = letter_offset(&parts, j);
        let rotated = st.rho.rotate(cut);
        if rotated.shortlex_cmp(&best).is_lt() {
            best = rotated;
            best_prefix = st.rho.prefix(cut);
        }
    }
    Ok(CyclicShorteningResult { output: best, conjugator: st.conj.concat(&best_prefix), iterations })
}

/// Windows of at most `k` syllables of `w`, as syllable ranges, in
/// leftmost-then-shortest order.
pub fn windows(engine: &Engine, w: &Word) -> Vec<Word> {
    let parts = parts_of(engine, w);
    let k = engine.k();
    let mut out = Vec::new();
    for s in 0..parts.len() {
        for len in 1..=k.min(parts.len() - s) {
            out.push(Word::from_letters(flatten(&parts[s..s + len])));
        }
    }
    out
}

/// Whether every window of `w` of at most `k` syllables is a relative
/// geodesic, checked directly against the metric oracle.
pub fn is_local_geodesic(engine: &Engine, w: &Word) -> Result<bool> {
    for win in windows(engine, w) {
        if !engine.oracle().is_relative_geodesic(win.letters())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`is_local_geodesic`] for the doubled word `α∘α`, the cyclic condition.
/// Elements of finite order never satisfy it: some power of a nontrivial
/// torsion element is shorter than the doubled word.
pub fn is_cyclic_local_geodesic(engine: &Engine, w: &Word) -> Result<bool> {
    if w.is_empty() {
        return Ok(true);
    }
    let doubled: Vec<Letter> = w.letters().iter().chain(w.letters()).copied().collect();
    if Word::from_letters(doubled.iter().copied()).len() != doubled.len() {
        return Ok(false);
    }
    is_local_geodesic(engine, &Word::from_letters(doubled))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine(text: &str) -> Engine {
        Engine::from_text(text).unwrap()
    }

    const FREE: &str = "group free2\nhyperbolic a b\n";
    const G2: &str = "group g2\nhyperbolic a\nparabolic free_abelian 2\nletters x y\nconstants delta=1 c2=2 c3=2 c7=2\n";
    const G3: &str = "group g3\nhyperbolic a\nparabolic free_abelian 2\nletters x y\nrelator aaa\nconstants delta=1 c2=2 c3=2 c7=2\n";

    fn short(e: &Engine, s: &str) -> String {
        let w = e.group().parse_word(s).unwrap();
        e.group().format_word(&shorten(e, &w).unwrap().output)
    }

    #[test]
    fn shorten_examples() {
        assert_eq!(short(&engine(FREE), "aAb"), "b");
        assert_eq!(short(&engine(G2), "xyX"), "y");
        let g3 = engine(G3);
        assert_eq!(short(&g3, "aa"), "A");
        assert_eq!(short(&g3, "aaxaa"), "AxA");
    }

    #[test]
    fn word_problem_examples() {
        let e = engine(G2);
        for (s, expect) in [("xyXY", true), ("axAX", false), ("1", true)] {
            assert_eq!(word_problem(&e, &e.group().parse_word(s).unwrap()).unwrap(), expect, "{s}");
        }
        let g3 = engine(G3);
        assert!(word_problem(&g3, &g3.group().parse_word("aaa").unwrap()).unwrap());
        assert!(word_problem(&g3, &g3.group().parse_word("aaxaaaXa").unwrap()).unwrap());
    }

    #[test]
    fn cyclic_examples() {
        let e = engine(FREE);
        let r = cyclic_shorten(&e, &e.group().parse_word("abA").unwrap()).unwrap();
        assert_eq!(e.group().format_word(&r.output), "b");
        assert_eq!(e.group().format_word(&r.conjugator), "a");
        let r = cyclic_shorten(&e, &e.group().parse_word("ba").unwrap()).unwrap();
        assert_eq!(e.group().format_word(&r.output), "ab");
        let g = engine(G2);
        let r = cyclic_shorten(&g, &g.group().parse_word("axA").unwrap()).unwrap();
        assert_eq!(g.group().format_word(&r.output), "x");
        assert_eq!(g.group().format_word(&r.conjugator), "a");
        let g3 = engine(G3);
        let r = cyclic_shorten(&g3, &g3.group().parse_word("axa").unwrap()).unwrap();
        assert_eq!(g3.group().format_word(&r.output), "Ax");
    }

    #[test]
    fn missing_tables_without_fallback() {
        let mut e = engine(G3);
        e.set_fallback(false);
        let w = e.group().parse_word("axa").unwrap();
        assert!(matches!(shorten(&e, &w), Err(Error::MissingTables)));
    }
}
