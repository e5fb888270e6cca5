//! A validated presentation together with its letter partition and
//! parabolic oracles.

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::parabolic::ParabolicOracle;
use crate::presentation::{parse_presentation, LetterClass, RelativePresentation};
use crate::words::{Letter, Word};

#[derive(Debug)]
pub struct Group {
    presentation: RelativePresentation,
    alphabet: Vec<char>,
    classes: Vec<LetterClass>,
    oracles: Vec<ParabolicOracle>,
    hash: u64,
}

/// First eight bytes of a SHA-256 digest, big-endian.
pub(crate) fn short_hash(bytes: &[u8]) -> u64 {
    let digest = Sha256::digest(bytes);
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_be_bytes(head)
}

impl Group {
    pub fn new(presentation: RelativePresentation) -> Result<Self> {
        let alphabet = presentation.generators();
        let mut classes = vec![LetterClass::Hyperbolic; presentation.hyperbolic_generators.len()];
        let mut oracles = Vec::new();
        for d in &presentation.parabolics {
            let offset = classes.len();
            classes.extend(std::iter::repeat_n(LetterClass::Parabolic(d.index), d.generators.len()));
            oracles.push(ParabolicOracle::new(d.clone(), offset, alphabet.clone()));
        }
        // The constants block is a profile, not part of the group.
        let mut bare = presentation.clone();
        bare.constants.clear();
        let hash = short_hash(bare.to_text().as_bytes());
        Ok(Group { presentation, alphabet, classes, oracles, hash })
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Group::new(parse_presentation(text)?)
    }

    pub fn presentation(&self) -> &RelativePresentation {
        &self.presentation
    }

    /// Hash of the presentation without its constants block.
    pub fn hash(&self) -> u64 {
        self.hash
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.len()
    }

    /// Every letter and inverse letter, in shortlex letter order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..2 * self.alphabet.len() as u16).map(Letter::from_code)
    }

    pub fn hyperbolic_letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.letters().filter(|&l| self.letter_class(l) == LetterClass::Hyperbolic)
    }

    pub fn letter_class(&self, l: Letter) -> LetterClass {
        self.classes[l.generator()]
    }

    /// Number of parabolic subgroups `m`.
    pub fn rank(&self) -> usize {
        self.oracles.len()
    }

    /// Oracle of `P_index`, 1-based.
    pub fn oracle(&self, index: usize) -> &ParabolicOracle {
        &self.oracles[index - 1]
    }

    pub fn oracles(&self) -> &[ParabolicOracle] {
        &self.oracles
    }

    pub fn relators(&self) -> &[Word] {
        &self.presentation.relators
    }

    pub fn is_free_product(&self) -> bool {
        self.presentation.relators.is_empty()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        self.presentation.parse_word(text)
    }

    pub fn parse_letters(&self, text: &str) -> Result<Vec<Letter>> {
        self.presentation.parse_letters(text)
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.format_letters(w.letters())
    }

    /// Empty words print as `1`.
    pub fn format_letters(&self, letters: &[Letter]) -> String {
        if letters.is_empty() {
            "1".to_string()
        } else {
            self.presentation.format_letters(letters)
        }
    }

    /// Index `i` when every letter of `w` lies in `S_i` (and `w` is nonempty).
    pub fn parabolic_index(&self, letters: &[Letter]) -> Option<usize> {
        let first = letters.first()?;
        match self.letter_class(*first) {
            LetterClass::Parabolic(i) if letters.iter().all(|&l| self.letter_class(l) == LetterClass::Parabolic(i)) => {
                Some(i)
            }
            _ => None,
        }
    }
}
