//! Classification into hyperbolic and parabolic elements, the conjugacy
//! decision by element class and length regime, conjugator search and
//! bounded conjugacy classes.
//!
//! Internally conjugators follow `result = c⁻¹·input·c`. Certificates use
//! `v = g·u·g⁻¹`; the conversion happens once, in [`decide_prepared`].

use std::collections::HashMap;
use std::fmt;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::shortening::{cyclic_shorten, verify_conjugator, word_problem, CyclicShorteningResult};
use crate::words::{cyclic_permutations, split_syllables, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Hyperbolic,
    /// `representative = conjugator⁻¹·u·conjugator` lies in `P_index`.
    Parabolic { index: usize, representative: Word, conjugator: Word },
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    /// The identity. It is reported as parabolic (in `P_1`, with an empty
    /// representative) when the group has parabolics, hyperbolic otherwise.
    pub trivial: bool,
    pub cyclic: CyclicShorteningResult,
}

impl Classification {
    pub fn is_parabolic(&self) -> bool {
        matches!(self.verdict, Verdict::Parabolic { .. })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    ClassMismatch,
    LongSearchExhausted,
    ShortTableMiss,
    ParabolicTablesMiss,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::ClassMismatch => "class-mismatch",
            Reason::LongSearchExhausted => "long-search-exhausted",
            Reason::ShortTableMiss => "short-table-miss",
            Reason::ParabolicTablesMiss => "parabolic-tables-miss",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Regime {
    Long,
    ShortHyperbolic,
    Parabolic,
    /// Class mismatch, or at least one input is the identity.
    Mixed,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Long => "long",
            Regime::ShortHyperbolic => "short-hyperbolic",
            Regime::Parabolic => "parabolic",
            Regime::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    /// `g` with `g·u·g⁻¹ = v`.
    Conjugate(Word),
    NotConjugate(Reason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyCertificate {
    pub answer: Answer,
    pub regime: Regime,
    /// `L̄ = max{|w_u|_S, |w_v|_S}`.
    pub l_bar: usize,
    /// `L = max{ℓ_α, ℓ_β}`.
    pub l: usize,
    pub profile_hash: u64,
    /// The witness was checked with the word problem. Always false for
    /// negative answers, which are relative to the profile.
    pub verified: bool,
}

impl ConjugacyCertificate {
    pub fn is_conjugate(&self) -> bool {
        matches!(self.answer, Answer::Conjugate(_))
    }

    pub fn witness(&self) -> Option<&Word> {
        match &self.answer {
            Answer::Conjugate(g) => Some(g),
            Answer::NotConjugate(_) => None,
        }
    }
}

/// An input word with its cyclic shortening and classification, reusable
/// across many decisions.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub word: Word,
    pub class: Classification,
}

impl Prepared {
    fn alpha(&self) -> &Word {
        &self.class.cyclic.output
    }

    fn a(&self) -> &Word {
        &self.class.cyclic.conjugator
    }
}

pub fn prepare(engine: &Engine, w: &Word) -> Result<Prepared> {
    Ok(Prepared { word: w.clone(), class: classify(engine, w)? })
}

fn relative_len(engine: &Engine, w: &Word) -> usize {
    split_syllables(engine.group(), w.letters()).len()
}

pub fn classify(engine: &Engine, w: &Word) -> Result<Classification> {
    let tables = engine.require_tables()?;
    let group = engine.group();
    let oracle = engine.oracle();
    let cyclic = cyclic_shorten(engine, w)?;
    let alpha = &cyclic.output;
    let a = &cyclic.conjugator;
    if alpha.is_empty() {
        let verdict = if group.rank() > 0 {
            Verdict::Parabolic { index: 1, representative: Word::empty(), conjugator: a.clone() }
        } else {
            Verdict::Hyperbolic
        };
        return Ok(Classification { verdict, trivial: true, cyclic });
    }
    if let Some(index) = group.parabolic_index(alpha.letters()) {
        let verdict = Verdict::Parabolic { index, representative: alpha.clone(), conjugator: a.clone() };
        return Ok(Classification { verdict, trivial: false, cyclic });
    }
    let hyperbolic = |cyclic| Ok(Classification { verdict: Verdict::Hyperbolic, trivial: false, cyclic });
    if relative_len(engine, alpha) > engine.profile().long_threshold() {
        return hyperbolic(cyclic);
    }
    let z = oracle.key(alpha.letters());
    let Some(cid) = tables.l88.class_of(&z) else {
        return hyperbolic(cyclic);
    };
    for q in &tables.l3 {
        if q.is_empty() {
            continue;
        }
        let qk = oracle.key(q.letters());
        if tables.l88.class_of(&qk) == Some(cid) {
            // witness·z·witness⁻¹ = q and z = a⁻¹·u·a, so q = c⁻¹·u·c with c = a·witness⁻¹.
            let witness = tables.l88.witness(&z, &qk).expect("same class");
            let index = group.parabolic_index(q.letters()).expect("L3 holds parabolic words");
            let verdict = Verdict::Parabolic { index, representative: q.clone(), conjugator: a.concat(&witness.inverse()) };
            return Ok(Classification { verdict, trivial: false, cyclic });
        }
    }
    hyperbolic(cyclic)
}

fn rotations(w: &Word) -> Result<Vec<(Word, Word)>> {
    // (α̃, p) with α̃ = p⁻¹·α·p.
    Ok(cyclic_permutations(w)?.into_iter().enumerate().map(|(k, r)| (r, w.prefix(k))).collect())
}

/// `g0` with `g0·α·g0⁻¹ = β`, trying every `x ∈ L4` against every pair of
/// cyclic permutations.
pub fn conjugate_long(engine: &Engine, alpha: &Word, beta: &Word) -> Result<Option<Word>> {
    let tables = engine.require_tables()?;
    let ra = rotations(alpha)?;
    let rb = rotations(beta)?;
    for x in tables.l4.members() {
        for (at, p) in &ra {
            let conj = at.conjugate_by(x);
            for (bt, q) in &rb {
                if word_problem(engine, &conj.concat(&bt.inverse()))? {
                    return Ok(Some(Word::product(&[q, x, &p.inverse()])));
                }
            }
        }
    }
    Ok(None)
}

/// Short hyperbolic elements: conjugators from `L2` (and the identity)
/// over cyclic permutations, then the `L88` classes of the relative
/// geodesic forms.
pub fn conjugate_short_hyperbolic(engine: &Engine, alpha: &Word, beta: &Word) -> Result<Option<Word>> {
    let tables = engine.require_tables()?;
    let oracle = engine.oracle();
    let ra = rotations(alpha)?;
    let rb = rotations(beta)?;
    let identity = [Word::empty()];
    let candidates = identity.iter().chain(tables.l2.iter().filter(|g| !g.is_empty()));
    for g in candidates {
        for (at, p) in &ra {
            let conj = at.conjugate_by(g);
            for (bt, q) in &rb {
                if word_problem(engine, &conj.concat(&bt.inverse()))? {
                    return Ok(Some(Word::product(&[q, g, &p.inverse()])));
                }
            }
        }
    }
    let zu = oracle.key(alpha.letters());
    let zv = oracle.key(beta.letters());
    Ok(tables.l88.witness(&zu, &zv))
}

/// `g0` with `g0·q_u·g0⁻¹ = q_v` for parabolic representatives.
pub fn conjugate_parabolic(engine: &Engine, iu: usize, qu: &Word, iv: usize, qv: &Word) -> Result<Option<Word>> {
    let tables = engine.require_tables()?;
    let group = engine.group();
    let oracle = engine.oracle();
    if iu == iv {
        if let Some(t) = group.oracle(iu).conjugate(qu.letters(), qv.letters())? {
            return Ok(Some(t));
        }
    }
    // s·q·s⁻¹ = p for some p ∈ B_i.
    let into_b = |i: usize, q: &Word| -> Result<Option<(Word, Word)>> {
        for p in &tables.b[i - 1] {
            if let Some(s) = group.oracle(i).conjugate(q.letters(), p.letters())? {
                return Ok(Some((p.clone(), s)));
            }
        }
        Ok(None)
    };
    let (Some((pu, su)), Some((pv, sv))) = (into_b(iu, qu)?, into_b(iv, qv)?) else {
        return Ok(None);
    };
    let h = tables.bcc.witness(&oracle.key(pu.letters()), &oracle.key(pv.letters()));
    Ok(h.map(|h| Word::product(&[&sv.inverse(), &h, &su])))
}

pub fn decide(engine: &Engine, u: &Word, v: &Word) -> Result<ConjugacyCertificate> {
    decide_prepared(engine, &prepare(engine, u)?, &prepare(engine, v)?)
}

pub fn decide_prepared(engine: &Engine, pu: &Prepared, pv: &Prepared) -> Result<ConjugacyCertificate> {
    decide_cached(engine, &mut DecisionCache::default(), pu, pv)
}

/// The class-level search result: regime, conjugator between the cyclic
/// forms (or parabolic representatives), and the reason for a miss.
type Core = (Regime, Option<Word>, Reason);

/// Memoises the search between cyclic forms. The search depends only on
/// `(α_u, α_v)`; the conjugators of the original words are composed
/// around it afterwards.
#[derive(Debug, Default)]
pub struct DecisionCache {
    cores: HashMap<(Word, Word), Core>,
}

impl DecisionCache {
    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }
}

fn core_decision(engine: &Engine, pu: &Prepared, pv: &Prepared, l: usize) -> Result<Option<Core>> {
    Ok(Some(match (&pu.class.verdict, &pv.class.verdict) {
        (Verdict::Hyperbolic, Verdict::Hyperbolic) => {
            if l >= engine.profile().long_threshold() {
                (Regime::Long, conjugate_long(engine, pu.alpha(), pv.alpha())?, Reason::LongSearchExhausted)
            } else {
                (Regime::ShortHyperbolic, conjugate_short_hyperbolic(engine, pu.alpha(), pv.alpha())?, Reason::ShortTableMiss)
            }
        }
        (
            Verdict::Parabolic { index: iu, representative: qu, .. },
            Verdict::Parabolic { index: iv, representative: qv, .. },
        ) => (Regime::Parabolic, conjugate_parabolic(engine, *iu, qu, *iv, qv)?, Reason::ParabolicTablesMiss),
        _ => return Ok(None),
    }))
}

/// [`decide_prepared`] reusing searches already made for the same pair of
/// cyclic forms.
pub fn decide_cached(
    engine: &Engine,
    cache: &mut DecisionCache,
    pu: &Prepared,
    pv: &Prepared,
) -> Result<ConjugacyCertificate> {
    let l_bar = pu.word.len().max(pv.word.len());
    let l = relative_len(engine, pu.alpha()).max(relative_len(engine, pv.alpha()));
    let cert = |answer, regime, verified| ConjugacyCertificate {
        answer,
        regime,
        l_bar,
        l,
        profile_hash: engine.profile().hash(),
        verified,
    };
    let (cu, cv) = (&pu.class, &pv.class);
    if cu.trivial || cv.trivial {
        if cu.trivial && cv.trivial {
            return Ok(cert(Answer::Conjugate(Word::empty()), Regime::Mixed, true));
        }
        return Ok(cert(Answer::NotConjugate(Reason::ClassMismatch), Regime::Mixed, false));
    }
    let key = (pu.alpha().clone(), pv.alpha().clone());
    let core = match cache.cores.get(&key) {
        Some(core) => core.clone(),
        None => {
            let Some(core) = core_decision(engine, pu, pv, l)? else {
                return Ok(cert(Answer::NotConjugate(Reason::ClassMismatch), Regime::Mixed, false));
            };
            cache.cores.insert(key, core.clone());
            core
        }
    };
    let (regime, g0, miss) = core;
    let Some(g0) = g0 else {
        return Ok(cert(Answer::NotConjugate(miss), regime, false));
    };
    // α = a⁻¹·u·a and q = c⁻¹·u·c, so g = a_v·g0·a_u⁻¹ (resp. with c).
    let outer = |p: &Prepared| match &p.class.verdict {
        Verdict::Parabolic { conjugator, .. } => conjugator.clone(),
        Verdict::Hyperbolic => p.a().clone(),
    };
    let g = Word::product(&[&outer(pv), &g0, &outer(pu).inverse()]);
    let ok = verify_conjugator(engine, &g, &pu.word, &pv.word)?;
    Ok(cert(Answer::Conjugate(g), regime, ok))
}

/// A verified `g` with `g·u·g⁻¹ = v`.
pub fn search(engine: &Engine, u: &Word, v: &Word) -> Result<Word> {
    let c = decide(engine, u, v)?;
    match c.answer {
        Answer::Conjugate(g) if c.verified => Ok(g),
        _ => Err(Error::NotConjugate),
    }
}

/// Elements of the Γ-ball of radius `n` conjugate to `u`, each with a
/// witness `g`, `g·u·g⁻¹ = x`.
pub fn bounded_class(engine: &Engine, u: &Word, n: usize) -> Result<Vec<(Word, Word)>> {
    let ball = engine.oracle().ball(n)?;
    let pu = prepare(engine, u)?;
    let mut out = Vec::new();
    let mut cache = DecisionCache::default();
    for x in ball.words() {
        let c = decide_cached(engine, &mut cache, &pu, &prepare(engine, x)?)?;
        if let Answer::Conjugate(g) = c.answer {
            out.push((x.clone(), g));
        }
    }
    Ok(out)
}

/// `M_u` for parabolic diagnostics; see [`crate::tables::compute_m`].
pub fn parabolic_m(engine: &Engine, u: &Word) -> Result<u64> {
    crate::tables::compute_m(engine.oracle(), engine.require_tables()?, u)
}

/// Agreement between [`decide`] and exhaustive conjugator search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub words: usize,
    pub pairs: usize,
    pub both_conjugate: usize,
    pub both_not: usize,
    pub decide_only: usize,
    pub brute_only: usize,
    /// Positive answers whose witness failed the word problem.
    pub unverified: usize,
    pub first_disagreement: Option<(Word, Word)>,
}

impl CrosscheckReport {
    pub fn agreeing(&self) -> usize {
        self.both_conjugate + self.both_not
    }

    pub fn all_agree(&self) -> bool {
        self.agreeing() == self.pairs && self.unverified == 0
    }
}

/// Compares [`decide_prepared`] with the metric oracle's conjugates of each
/// word under conjugators of Γ-length at most `radius`, on all ordered pairs.
pub fn crosscheck(engine: &Engine, words: &[Word], radius: usize) -> Result<CrosscheckReport> {
    let oracle = engine.oracle();
    let prepared: Vec<Prepared> = words.iter().map(|w| prepare(engine, w)).collect::<Result<_>>()?;
    let keys: Vec<Word> = words.iter().map(|w| oracle.key(w.letters())).collect();
    let mut report = CrosscheckReport { words: words.len(), ..CrosscheckReport::default() };
    let mut cache = DecisionCache::default();
    for (i, pu) in prepared.iter().enumerate() {
        let brute = oracle.brute_conjugates_of(&pu.word, radius)?;
        for (j, pv) in prepared.iter().enumerate() {
            let c = decide_cached(engine, &mut cache, pu, pv)?;
            let expected = brute.contains_key(&keys[j]);
            report.pairs += 1;
            if c.is_conjugate() && !c.verified {
                report.unverified += 1;
            }
            match (c.is_conjugate(), expected) {
                (true, true) => report.both_conjugate += 1,
                (false, false) => report.both_not += 1,
                (true, false) => report.decide_only += 1,
                (false, true) => report.brute_only += 1,
            }
            if c.is_conjugate() != expected && report.first_disagreement.is_none() {
                report.first_disagreement = Some((words[i].clone(), words[j].clone()));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FREE: &str = "group free2\nhyperbolic a b\nconstants delta=0 c2=2 c3=2 c7=2 r6=3 k88=3\n";
    const G2: &str = "group g2\nhyperbolic a\nparabolic free_abelian 2\nletters x y\n\
                      constants delta=1 c2=2 c3=2 c7=2 rlong=3 r4=1 r5=2 r6=3 r9=4 kbcc=1 k88=1\n";

    fn engine(text: &str) -> Engine {
        let mut e = Engine::from_text(text).unwrap();
        e.precompute().unwrap();
        e
    }

    fn dec(e: &Engine, u: &str, v: &str) -> ConjugacyCertificate {
        let g = e.group();
        decide(e, &g.parse_word(u).unwrap(), &g.parse_word(v).unwrap()).unwrap()
    }

    #[test]
    fn decide_examples() {
        let f = engine(FREE);
        let c = dec(&f, "abA", "b");
        assert!(c.is_conjugate() && c.verified);
        assert!(dec(&f, "ab", "ba").is_conjugate());
        assert!(!dec(&f, "a", "b").is_conjugate());
        assert!(!dec(&f, "aabb", "abab").is_conjugate());
        let g = engine(G2);
        assert_eq!(dec(&g, "a", "x").answer, Answer::NotConjugate(Reason::ClassMismatch));
        assert!(dec(&g, "axA", "x").verified);
        assert!(!dec(&g, "x", "y").is_conjugate());
        assert!(!dec(&g, "x", "xx").is_conjugate());
    }

    #[test]
    fn classify_examples() {
        let g = engine(G2);
        let c = classify(&g, &g.group().parse_word("axA").unwrap()).unwrap();
        match c.verdict {
            Verdict::Parabolic { index, representative, .. } => {
                assert_eq!(index, 1);
                assert_eq!(g.group().format_word(&representative), "x");
            }
            v => panic!("{v:?}"),
        }
        let c = classify(&g, &g.group().parse_word("a").unwrap()).unwrap();
        assert_eq!(c.verdict, Verdict::Hyperbolic);
        let c = classify(&g, &Word::empty()).unwrap();
        assert!(c.trivial && c.is_parabolic());
    }
}
