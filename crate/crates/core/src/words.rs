//! Word algebra over the generating set `S`: letters, free and cyclic
//! reduction, rotations, and the decomposition of a word into hyperbolic
//! letters and maximal parabolic components.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::presentation::LetterClass;

/// A generator or its formal inverse.
///
/// Generator `g` is encoded as `2g` and its inverse as `2g + 1`, so the
/// derived ordering is the shortlex letter order `a < A < b < B < ...`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter(u16);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u16) << 1 | inverse as u16)
    }

    pub fn from_code(code: u16) -> Self {
        Letter(code)
    }

    pub fn code(self) -> u16 {
        self.0
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}{}", self.generator(), if self.is_inverse() { "'" } else { "" })
    }
}

/// A freely reduced word. `len()` is its Γ-length.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Freely reduces `letters`.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Wraps letters already known to be freely reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Freely reduced product of several words.
    pub fn product(parts: &[&Word]) -> Word {
        Word::from_letters(parts.iter().flat_map(|w| w.0.iter().copied()))
    }

    /// `g · self · g⁻¹`
    pub fn conjugate_by(&self, g: &Word) -> Word {
        Word::product(&[g, self, &g.inverse()])
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&f), Some(&l)) => self.0.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Letter-level rotation: the last `len - k` letters followed by the first `k`.
    pub fn rotate(&self, k: usize) -> Word {
        let k = if self.0.is_empty() { 0 } else { k % self.0.len() };
        let mut v = Vec::with_capacity(self.0.len());
        v.extend_from_slice(&self.0[k..]);
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }

    /// Shortlex comparison (length first, then letter order).
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{:?}", self.0)
    }
}

/// Free reduction of an arbitrary letter sequence.
pub fn free_reduce(raw: &[Letter]) -> Word {
    Word::from_letters(raw.iter().copied())
}

/// Splits `w = conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let l = w.letters();
    let mut i = 0;
    while 2 * i + 1 < l.len() && l[i] == l[l.len() - 1 - i].inverse() {
        i += 1;
    }
    // An even-length word can collapse entirely only if it was trivial,
    // which a freely reduced nonempty word never is; keep the guard anyway.
    if 2 * i == l.len() {
        return (Word::empty(), Word(l[..i].to_vec()));
    }
    (Word(l[i..l.len() - i].to_vec()), Word(l[..i].to_vec()))
}

/// All `|w|` letter-level rotations of a cyclically reduced word.
pub fn cyclic_permutations(w: &Word) -> Result<Vec<Word>> {
    if !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced);
    }
    if w.is_empty() {
        return Ok(vec![Word::empty()]);
    }
    Ok((0..w.len()).map(|k| w.rotate(k)).collect())
}

/// Every freely reduced word of length at most `max_len` over `generators`
/// generators, in shortlex order.
pub fn reduced_words(generators: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = 0..1;
    for _ in 0..max_len {
        let start = out.len();
        for i in layer.clone() {
            for code in 0..2 * generators as u16 {
                let l = Letter::from_code(code);
                if out[i].0.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut next = out[i].0.clone();
                next.push(l);
                out.push(Word(next));
            }
        }
        layer = start..out.len();
    }
    out
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SyllableKind {
    Hyperbolic,
    /// 1-based parabolic index.
    Parabolic(usize),
}

impl From<LetterClass> for SyllableKind {
    fn from(c: LetterClass) -> Self {
        match c {
            LetterClass::Hyperbolic => SyllableKind::Hyperbolic,
            LetterClass::Parabolic(i) => SyllableKind::Parabolic(i),
        }
    }
}

/// One hyperbolic letter, or one maximal parabolic component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub kind: SyllableKind,
    pub subword: Word,
    pub start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyllableDecomposition {
    pub syllables: Vec<Syllable>,
}

impl SyllableDecomposition {
    /// Hyperbolic letters plus parabolic components.
    pub fn relative_length(&self) -> usize {
        self.syllables.len()
    }

    pub fn word(&self) -> Word {
        Word::from_reduced(
            self.syllables.iter().flat_map(|s| s.subword.letters().iter().copied()).collect(),
        )
    }

    /// Concatenation of the syllables in `range`, as a word.
    pub fn window(&self, range: std::ops::Range<usize>) -> Word {
        Word::from_letters(
            self.syllables[range].iter().flat_map(|s| s.subword.letters().iter().copied()),
        )
    }

    fn from_parts(parts: Vec<(SyllableKind, Vec<Letter>)>) -> Self {
        let mut start = 0;
        let syllables = parts
            .into_iter()
            .map(|(kind, letters)| {
                let s = Syllable { kind, subword: Word::from_reduced(letters), start };
                start += s.subword.len();
                s
            })
            .collect();
        SyllableDecomposition { syllables }
    }
}

/// Lexical scan without normalisation: each hyperbolic letter is its own
/// syllable, each maximal same-index parabolic run is one syllable.
pub fn split_syllables(group: &Group, letters: &[Letter]) -> Vec<Syllable> {
    let mut out: Vec<Syllable> = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        let kind = SyllableKind::from(group.letter_class(letters[i]));
        let mut j = i + 1;
        if let SyllableKind::Parabolic(_) = kind {
            while j < letters.len() && SyllableKind::from(group.letter_class(letters[j])) == kind {
                j += 1;
            }
        }
        out.push(Syllable { kind, subword: Word(letters[i..j].to_vec()), start: i });
        i = j;
    }
    out
}

/// Stack-based normaliser: free reduction, geodesic normal form for every
/// parabolic component, and merging of components that become adjacent.
pub(crate) fn normalize_parts(group: &Group, raw: &[Letter]) -> Vec<(SyllableKind, Vec<Letter>)> {
    let mut stack: Vec<(SyllableKind, Vec<Letter>)> = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let kind = SyllableKind::from(group.letter_class(raw[i]));
        match kind {
            SyllableKind::Hyperbolic => {
                let l = raw[i];
                i += 1;
                if let Some((SyllableKind::Hyperbolic, top)) = stack.last() {
                    if top[0] == l.inverse() {
                        stack.pop();
                        continue;
                    }
                }
                stack.push((kind, vec![l]));
            }
            SyllableKind::Parabolic(index) => {
                let mut j = i + 1;
                while j < raw.len() && SyllableKind::from(group.letter_class(raw[j])) == kind {
                    j += 1;
                }
                let oracle = group.oracle(index);
                let merged = match stack.last() {
                    Some((k, top)) if *k == kind => {
                        let mut joined = top.clone();
                        joined.extend_from_slice(&raw[i..j]);
                        stack.pop();
                        oracle.geodesic_letters(&joined)
                    }
                    _ => oracle.geodesic_letters(&raw[i..j]),
                };
                if !merged.is_empty() {
                    stack.push((kind, merged));
                }
                i = j;
            }
        }
    }
    stack
}

/// Decomposes `w` into syllables after normalising every parabolic
/// component, dropping trivial ones and merging components that become
/// adjacent. The syllables concatenate to a word equal to `w` in `G`.
pub fn decompose(group: &Group, w: &Word) -> SyllableDecomposition {
    SyllableDecomposition::from_parts(normalize_parts(group, w.letters()))
}

/// [`decompose`] for an unreduced letter sequence.
pub fn decompose_letters(group: &Group, raw: &[Letter]) -> SyllableDecomposition {
    SyllableDecomposition::from_parts(normalize_parts(group, raw))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(codes: &[i32]) -> Vec<Letter> {
        // 1 = a, -1 = A, 2 = b, ...
        codes
            .iter()
            .map(|&c| Letter::new(c.unsigned_abs() as usize - 1, c < 0))
            .collect()
    }

    #[test]
    fn letter_order_is_shortlex_order() {
        let a = Letter::new(0, false);
        let big_a = Letter::new(0, true);
        let b = Letter::new(1, false);
        assert!(a < big_a && big_a < b);
        assert_eq!(big_a.inverse(), a);
    }

    #[test]
    fn free_reduction_examples() {
        assert_eq!(free_reduce(&w(&[1, -1, 2])), Word(w(&[2])));
        assert!(free_reduce(&w(&[3, -3])).is_empty());
        assert_eq!(free_reduce(&w(&[1, 2, -2, -1, 1])), Word(w(&[1])));
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, conj) = cyclic_reduce(&free_reduce(&w(&[1, 2, -1])));
        assert_eq!(core, Word(w(&[2])));
        assert_eq!(conj, Word(w(&[1])));

        let (core, conj) = cyclic_reduce(&free_reduce(&w(&[2, 1])));
        assert_eq!(core, Word(w(&[2, 1])));
        assert!(conj.is_empty());

        // "a b B A" freely reduces to the empty word before anything else.
        let (core, conj) = cyclic_reduce(&free_reduce(&w(&[1, 2, -2, -1])));
        assert!(core.is_empty() && conj.is_empty());
    }

    #[test]
    fn cyclic_reduce_on_unreduced_trivial_pair() {
        // "a b B A" is trivial; the conjugator is the stripped prefix "a b".
        let raw = Word(w(&[1, 2, -2, -1]));
        let (core, conj) = cyclic_reduce(&raw);
        assert!(core.is_empty());
        assert_eq!(conj, Word(w(&[1, 2])));
    }

    #[test]
    fn rotations() {
        let ab = Word(w(&[1, 2]));
        assert_eq!(cyclic_permutations(&ab).unwrap(), vec![ab.clone(), Word(w(&[2, 1]))]);
        assert_eq!(cyclic_permutations(&Word(w(&[1]))).unwrap().len(), 1);
        assert!(matches!(
            cyclic_permutations(&Word(w(&[1, 2, -1]))),
            Err(Error::NotCyclicallyReduced)
        ));
    }

    #[test]
    fn cyclic_reduce_reassembles() {
        let cases = [vec![1, 2, 1, -2, -1], vec![2, 2, 1], vec![-1, 2, -2], vec![1, 1, 2, -1, -1]];
        for c in cases {
            let word = free_reduce(&w(&c));
            let (core, conj) = cyclic_reduce(&word);
            assert!(core.is_cyclically_reduced());
            assert_eq!(core.conjugate_by(&conj), word);
        }
    }
}
