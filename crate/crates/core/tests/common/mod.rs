#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use relhyp::{Engine, Group, Letter, MetricOracle, Word};

pub const FREE2: &str = "free2.txt";
pub const G2: &str = "z_free_z2.txt";
pub const G3: &str = "z3_free_z2.txt";

pub fn data(name: &str) -> String {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Engine for a data file, without tables.
pub fn bare(name: &str) -> Engine {
    Engine::from_text(&data(name)).unwrap()
}

/// Engine for a data file with tables built.
pub fn engine(name: &str) -> Engine {
    let mut e = bare(name);
    e.precompute().unwrap();
    e
}

pub fn oracle(text: &str) -> MetricOracle {
    MetricOracle::new(Arc::new(Group::from_text(text).unwrap()), 1_000_000).unwrap()
}

pub fn w(e: &Engine, s: &str) -> Word {
    e.group().parse_word(s).unwrap()
}

pub fn show(e: &Engine, w: &Word) -> String {
    e.group().format_word(w)
}

/// Uniformly random freely reduced word of exactly `len` letters.
pub fn random_reduced(rng: &mut ChaCha8Rng, generators: usize, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_code(rng.gen_range(0..2 * generators as u16));
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    Word::from_letters(letters)
}
