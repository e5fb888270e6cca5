//! Ground truth at desk scale: canonical forms, balls in Γ and Γ̂, exact
//! relative lengths, a brute-force conjugacy oracle, and lower-bound
//! estimators for δ and the bounded coset penetration constant.
//!
//! Everything here is deliberately independent of the shortening module.
//! Canonical forms come from one of two models:
//!
//! * free products (no relators): the syllable normal form, computed by a
//!   naive fixpoint of free reduction and parabolic normalisation;
//! * presentations with relators: the same fixpoint interleaved with Dehn
//!   rules read off the relators. This is canonical only when the rules are
//!   confluent (e.g. a single relator `aaa`), which callers must ensure.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::presentation::LetterClass;
use crate::words::{free_reduce, split_syllables, Letter, SyllableKind, Word};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
enum Model {
    FreeProduct,
    Dehn { rules: Vec<(Vec<Letter>, Vec<Letter>)> },
}

/// Rules `u → v⁻¹` for every cyclic permutation `u·v` of a relator or its
/// inverse with `|u| > |v|`.
fn dehn_rules(relators: &[Word]) -> Vec<(Vec<Letter>, Vec<Letter>)> {
    let mut rules = Vec::new();
    let mut seen = HashSet::new();
    for r in relators {
        for base in [r.clone(), r.inverse()] {
            let n = base.len();
            for k in 0..n {
                let rot: Vec<Letter> = base.letters()[k..].iter().chain(&base.letters()[..k]).copied().collect();
                for split in (n / 2 + 1)..=n {
                    let lhs = rot[..split].to_vec();
                    let rhs: Vec<Letter> = rot[split..].iter().rev().map(|l| l.inverse()).collect();
                    if seen.insert(lhs.clone()) {
                        rules.push((lhs, rhs));
                    }
                }
            }
        }
    }
    rules.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.cmp(b)));
    rules
}

/// Parameters of a `(λ, ε)`-quasi-geodesic.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct QuasiGeodesicParams {
    pub lambda: Ratio<u64>,
    pub epsilon: Ratio<u64>,
}

impl QuasiGeodesicParams {
    pub fn new(lambda: Ratio<u64>, epsilon: Ratio<u64>) -> Result<Self> {
        if lambda < Ratio::from_integer(1) {
            return Err(Error::InvalidConstants(format!("λ = {lambda} must be at least 1")));
        }
        Ok(QuasiGeodesicParams { lambda, epsilon })
    }

    /// Quasi-geodesic constants of a relative `(8δ+1)`-local geodesic:
    /// `λ = (k+4δ)/(k−4δ)`, `ε = 2δ`.
    pub fn for_local_geodesics(delta: u64) -> Self {
        let k = 8 * delta + 1;
        QuasiGeodesicParams {
            lambda: Ratio::new(k + 4 * delta, k - 4 * delta),
            epsilon: Ratio::from_integer(2 * delta),
        }
    }

    /// `arc ≤ λ·distance + ε`.
    pub fn admits(&self, arc: usize, distance: usize) -> bool {
        Ratio::from_integer(arc as u64) <= self.lambda * Ratio::from_integer(distance as u64) + self.epsilon
    }
}

/// The ball of Γ-radius `radius` with one shortlex-minimal geodesic
/// representative per element, stored in shortlex order.
#[derive(Clone, Debug)]
pub struct BallIndex {
    radius: usize,
    presentation_hash: u64,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

const BALL_MAGIC: &[u8; 8] = b"RHBALL01";

impl BallIndex {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn presentation_hash(&self) -> u64 {
        self.presentation_hash
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Members of Γ-length at most `r`; a prefix of [`Self::words`].
    pub fn within(&self, r: usize) -> &[Word] {
        let end = self.words.partition_point(|w| w.len() <= r);
        &self.words[..end]
    }

    /// Position of the element with canonical form `key`.
    pub fn position(&self, key: &Word) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn gamma_length(&self, key: &Word) -> Option<usize> {
        self.position(key).map(|i| self.words[i].len())
    }

    /// The member reached from member `i` along the edge labelled `l`.
    pub fn neighbor(&self, oracle: &MetricOracle, i: usize, l: Letter) -> Option<usize> {
        let mut w = self.words[i].letters().to_vec();
        w.push(l);
        self.position(&oracle.key(&w))
    }

    pub fn write_to(&self, out: &mut impl Write) -> Result<()> {
        out.write_all(BALL_MAGIC)?;
        out.write_all(&self.presentation_hash.to_le_bytes())?;
        out.write_all(&(self.radius as u64).to_le_bytes())?;
        write_words(out, &self.words)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    /// Loads a ball written by [`Self::save`]; the index is rebuilt from
    /// `oracle`, whose presentation must match the recorded hash.
    pub fn load(path: &Path, oracle: &MetricOracle) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 8];
        f.read_exact(&mut magic)?;
        if &magic != BALL_MAGIC {
            return Err(Error::Cache("not a ball cache file".into()));
        }
        let hash = read_u64(&mut f)?;
        if hash != oracle.group().hash() {
            return Err(Error::Cache("ball cache belongs to a different presentation".into()));
        }
        let radius = read_u64(&mut f)? as usize;
        let words = read_words(&mut f)?;
        let index = words.iter().enumerate().map(|(i, w)| (oracle.key(w.letters()), i)).collect();
        Ok(BallIndex { radius, presentation_hash: hash, words, index })
    }
}

pub(crate) fn write_words(out: &mut impl Write, words: &[Word]) -> Result<()> {
    out.write_all(&(words.len() as u64).to_le_bytes())?;
    for w in words {
        out.write_all(&(w.len() as u32).to_le_bytes())?;
        for l in w.letters() {
            out.write_all(&l.code().to_le_bytes())?;
        }
    }
    Ok(())
}

pub(crate) fn read_u64(input: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub(crate) fn read_words(input: &mut impl Read) -> Result<Vec<Word>> {
    let n = read_u64(input)?;
    let mut words = Vec::with_capacity(n.min(1 << 20) as usize);
    for _ in 0..n {
        let mut b4 = [0u8; 4];
        input.read_exact(&mut b4)?;
        let len = u32::from_le_bytes(b4) as usize;
        let mut letters = Vec::with_capacity(len);
        for _ in 0..len {
            let mut b2 = [0u8; 2];
            input.read_exact(&mut b2)?;
            letters.push(Letter::from_code(u16::from_le_bytes(b2)));
        }
        let w = Word::from_letters(letters.iter().copied());
        if w.len() != len {
            return Err(Error::Cache("stored word is not freely reduced".into()));
        }
        words.push(w);
    }
    Ok(words)
}

/// Breadth-first layers of Γ̂ restricted to parabolic steps of Γ_i-length
/// at most `cap`.
#[derive(Debug)]
struct RelativeBall {
    radius: usize,
    /// canonical form → (distance, parent key, step)
    nodes: HashMap<Word, (usize, Word, Word)>,
    layers: Vec<Vec<Word>>,
}

/// `(d_Γ̂(1, w), ball, h1, h2)` with `w = h1·h2`.
type Split = (usize, Arc<RelativeBall>, Word, Word);

impl RelativeBall {
    /// The letters of the recorded geodesic from `1` to a member.
    fn path(&self, key: &Word) -> Vec<Letter> {
        let mut steps = Vec::new();
        let mut node = &self.nodes[key];
        while node.0 > 0 {
            steps.push(&node.2);
            node = &self.nodes[&node.1];
        }
        steps.iter().rev().flat_map(|s| s.letters().iter().copied()).collect()
    }
}

/// Ground-truth oracle for one group.
#[derive(Debug)]
pub struct MetricOracle {
    group: Arc<Group>,
    model: Model,
    budget: usize,
    component_cap: usize,
    ball_cache: Mutex<Option<Arc<BallIndex>>>,
    relative_balls: Mutex<HashMap<usize, Arc<RelativeBall>>>,
}

impl MetricOracle {
    pub fn new(group: Arc<Group>, budget: usize) -> Result<Self> {
        let model = if group.is_free_product() {
            Model::FreeProduct
        } else {
            Model::Dehn { rules: dehn_rules(group.relators()) }
        };
        let oracle = MetricOracle {
            group,
            model,
            budget,
            component_cap: 2,
            ball_cache: Mutex::new(None),
            relative_balls: Mutex::new(HashMap::new()),
        };
        // Every relator rewrites itself away, so the informative check is that
        // a relator inside one P_i is already trivial for that P_i's solver.
        for r in oracle.group.relators() {
            let inconsistent = match oracle.group.parabolic_index(r.letters()) {
                Some(i) => !oracle.group.oracle(i).trivial(r.letters())?,
                None => !oracle.is_trivial(r.letters()),
            };
            if inconsistent {
                return Err(Error::NontrivialRelator(oracle.group.format_word(r)));
            }
        }
        Ok(oracle)
    }

    /// Largest parabolic step used by Γ̂ searches in the relator model.
    pub fn with_component_cap(mut self, cap: usize) -> Self {
        self.component_cap = cap.max(1);
        self
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<Group> {
        Arc::clone(&self.group)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn is_free_product(&self) -> bool {
        matches!(self.model, Model::FreeProduct)
    }

    fn budget_error(&self, what: impl Into<String>) -> Error {
        Error::Budget { what: what.into(), limit: self.budget }
    }

    /// Free reduction and parabolic normalisation, repeated until stable.
    fn syllable_fixpoint(&self, raw: &[Letter]) -> Vec<Letter> {
        let mut cur = raw.to_vec();
        loop {
            let reduced = free_reduce(&cur).into_letters();
            let mut out = Vec::with_capacity(reduced.len());
            let mut i = 0;
            while i < reduced.len() {
                match self.group.letter_class(reduced[i]) {
                    LetterClass::Hyperbolic => {
                        out.push(reduced[i]);
                        i += 1;
                    }
                    class @ LetterClass::Parabolic(index) => {
                        let mut j = i + 1;
                        while j < reduced.len() && self.group.letter_class(reduced[j]) == class {
                            j += 1;
                        }
                        out.extend(self.group.oracle(index).geodesic_letters(&reduced[i..j]));
                        i = j;
                    }
                }
            }
            if out == cur {
                return out;
            }
            cur = out;
        }
    }

    /// Canonical form of the element represented by `raw`.
    pub fn key(&self, raw: &[Letter]) -> Word {
        match &self.model {
            Model::FreeProduct => Word::from_reduced(self.syllable_fixpoint(raw)),
            Model::Dehn { rules } => {
                let mut cur = self.syllable_fixpoint(raw);
                'outer: loop {
                    for start in 0..cur.len() {
                        for (lhs, rhs) in rules {
                            if cur[start..].starts_with(lhs) {
                                let mut next = cur[..start].to_vec();
                                next.extend_from_slice(rhs);
                                next.extend_from_slice(&cur[start + lhs.len()..]);
                                cur = self.syllable_fixpoint(&next);
                                continue 'outer;
                            }
                        }
                    }
                    return Word::from_reduced(cur);
                }
            }
        }
    }

    pub fn is_trivial(&self, raw: &[Letter]) -> bool {
        self.key(raw).is_empty()
    }

    pub fn equal(&self, a: &[Letter], b: &[Letter]) -> bool {
        self.key(a) == self.key(b)
    }

    /// Exhaustive Γ-ball of radius `r`. Balls are cached and reused for
    /// smaller radii.
    pub fn ball(&self, r: usize) -> Result<Arc<BallIndex>> {
        let mut cache = self.ball_cache.lock().unwrap();
        if let Some(b) = cache.as_ref() {
            if b.radius >= r {
                if b.radius == r {
                    return Ok(Arc::clone(b));
                }
                let words = b.within(r).to_vec();
                let index = words.iter().enumerate().map(|(i, w)| (self.key(w.letters()), i)).collect();
                return Ok(Arc::new(BallIndex {
                    radius: r,
                    presentation_hash: b.presentation_hash,
                    words,
                    index,
                }));
            }
        }
        let ball = Arc::new(self.build_ball(r)?);
        *cache = Some(Arc::clone(&ball));
        Ok(ball)
    }

    fn build_ball(&self, r: usize) -> Result<BallIndex> {
        let mut words = vec![Word::empty()];
        let mut index = HashMap::from([(Word::empty(), 0usize)]);
        if words.len() > self.budget {
            return Err(self.budget_error(format!("Γ-ball of radius {r}")));
        }
        let mut layer_start = 0;
        for _ in 0..r {
            let layer_end = words.len();
            for i in layer_start..layer_end {
                let base = words[i].clone();
                for l in self.group.letters() {
                    if base.letters().last() == Some(&l.inverse()) {
                        continue;
                    }
                    let mut ext = base.letters().to_vec();
                    ext.push(l);
                    let k = self.key(&ext);
                    if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(k) {
                        slot.insert(words.len());
                        words.push(Word::from_reduced(ext));
                        if words.len() > self.budget {
                            return Err(self.budget_error(format!("Γ-ball of radius {r}")));
                        }
                    }
                }
            }
            if words.len() == layer_end {
                break;
            }
            layer_start = layer_end;
        }
        Ok(BallIndex { radius: r, presentation_hash: self.group.hash(), words, index })
    }

    fn parabolic_steps(&self, cap: usize) -> Result<Vec<Word>> {
        let mut steps: Vec<Word> = self.group.hyperbolic_letters().map(|l| Word::from_letters([l])).collect();
        for o in self.group.oracles() {
            let ball = o.ball_within(cap, self.budget)?;
            steps.extend(ball.into_iter().filter(|w| !w.is_empty()));
        }
        Ok(steps)
    }

    fn relative_ball(&self, cap: usize, radius: usize) -> Result<Arc<RelativeBall>> {
        if let Some(b) = self.relative_balls.lock().unwrap().get(&cap) {
            if b.radius >= radius {
                return Ok(Arc::clone(b));
            }
        }
        let steps = self.parabolic_steps(cap)?;
        let mut nodes = HashMap::from([(Word::empty(), (0usize, Word::empty(), Word::empty()))]);
        let mut layers = vec![vec![Word::empty()]];
        for d in 0..radius {
            let mut next = Vec::new();
            for v in &layers[d] {
                for s in &steps {
                    let mut raw = v.letters().to_vec();
                    raw.extend_from_slice(s.letters());
                    let k = self.key(&raw);
                    if !nodes.contains_key(&k) {
                        nodes.insert(k.clone(), (d + 1, v.clone(), s.clone()));
                        next.push(k);
                        if nodes.len() > self.budget {
                            return Err(self.budget_error(format!("Γ̂-ball of radius {radius}")));
                        }
                    }
                }
            }
            let done = next.is_empty();
            layers.push(next);
            if done {
                break;
            }
        }
        let ball = Arc::new(RelativeBall { radius, nodes, layers });
        self.relative_balls.lock().unwrap().insert(cap, Arc::clone(&ball));
        Ok(ball)
    }

    /// Relative length and the Γ-length of the longest parabolic component of
    /// the canonical form.
    fn syllable_profile(&self, key: &Word) -> (usize, usize) {
        let syllables = split_syllables(&self.group, key.letters());
        let widest = syllables
            .iter()
            .filter(|s| matches!(s.kind, SyllableKind::Parabolic(_)))
            .map(|s| s.subword.len())
            .max()
            .unwrap_or(0);
        (syllables.len(), widest)
    }

    /// `d_Γ̂(1, w)`. Exact for free products; in the relator model the Γ̂
    /// search uses parabolic steps up to the larger of the component cap and
    /// the widest component of `w`'s canonical form.
    pub fn relative_length(&self, w: &[Letter]) -> Result<usize> {
        Ok(self.relative_split(w)?.map_or_else(|| self.syllable_profile(&self.key(w)).0, |s| s.0))
    }

    pub fn relative_distance(&self, a: &[Letter], b: &[Letter]) -> Result<usize> {
        let mut w: Vec<Letter> = a.iter().rev().map(|l| l.inverse()).collect();
        w.extend_from_slice(b);
        self.relative_length(&w)
    }

    /// A word for `w` whose syllables form a Γ̂-geodesic, every parabolic
    /// component in geodesic normal form.
    pub fn relative_geodesic(&self, w: &[Letter]) -> Result<Word> {
        let Some((_, ball, h1, h2)) = self.relative_split(w)? else {
            return Ok(self.key(w));
        };
        let mut letters = ball.path(&h1);
        letters.extend(ball.path(&h2));
        Ok(Word::from_letters(letters))
    }

    /// A shortest factorisation `w = h1·h2` with both factors in the Γ̂-ball
    /// of radius `⌈(n-1)/2⌉`, `n` the syllable count of the canonical form.
    /// `None` when the canonical form is already known to be geodesic.
    /// Searching from both ends keeps the ball at half the radius.
    fn relative_split(&self, w: &[Letter]) -> Result<Option<Split>> {
        let key = self.key(w);
        let (upper, widest) = self.syllable_profile(&key);
        if self.is_free_product() || upper <= 1 {
            return Ok(None);
        }
        let half = upper / 2;
        let ball = self.relative_ball(self.component_cap.max(widest), half)?;
        let mut best: Option<(usize, Word, Word)> = None;
        for (d1, layer) in ball.layers.iter().enumerate().take(half + 1) {
            if best.as_ref().is_some_and(|b| b.0 <= d1) {
                break;
            }
            for h1 in layer {
                let mut raw: Vec<Letter> = h1.letters().iter().rev().map(|l| l.inverse()).collect();
                raw.extend_from_slice(key.letters());
                let h2 = self.key(&raw);
                if let Some(&(d2, _, _)) = ball.nodes.get(&h2) {
                    if d2 <= half && best.as_ref().is_none_or(|b| d1 + d2 < b.0) {
                        best = Some((d1 + d2, h1.clone(), h2));
                    }
                }
            }
        }
        Ok(best.filter(|b| b.0 < upper).map(|(d, h1, h2)| (d, ball, h1, h2)))
    }

    /// Whether the path read by `w` in Γ̂ is geodesic: every maximal
    /// parabolic run is a nontrivial Γ_i-geodesic and the syllable count
    /// equals `d_Γ̂(1, w)`.
    pub fn is_relative_geodesic(&self, w: &[Letter]) -> Result<bool> {
        let syllables = split_syllables(&self.group, w);
        for s in &syllables {
            if let SyllableKind::Parabolic(i) = s.kind {
                let len = self.group.oracle(i).element_length(s.subword.letters())?;
                if len == 0 || len != s.subword.len() {
                    return Ok(false);
                }
            }
        }
        if free_reduce(w).len() != w.len() {
            return Ok(false);
        }
        Ok(syllables.len() == self.relative_length(w)?)
    }

    /// Shortest `g` (shortlex among equals) with `|g|_Γ ≤ max_len` and
    /// `g·u·g⁻¹ = v`.
    pub fn brute_conjugate(&self, u: &Word, v: &Word, max_len: usize) -> Result<Option<Word>> {
        let target = self.key(v.letters());
        let ball = self.ball(max_len)?;
        Ok(ball
            .words()
            .iter()
            .find(|g| self.key(u.conjugate_by(g).letters()) == target)
            .cloned())
    }

    /// For every element `g·u·g⁻¹` with `|g|_Γ ≤ max_len`, the shortest such
    /// `g`, keyed by canonical form.
    pub fn brute_conjugates_of(&self, u: &Word, max_len: usize) -> Result<HashMap<Word, Word>> {
        let ball = self.ball(max_len)?;
        let mut out = HashMap::new();
        for g in ball.words() {
            out.entry(self.key(u.conjugate_by(g).letters())).or_insert_with(|| g.clone());
        }
        Ok(out)
    }

    /// Syllable-boundary vertices of the canonical geodesic from `from` to
    /// `to`, as canonical forms.
    fn geodesic_vertices(&self, from: &Word, to: &Word) -> Result<Vec<Word>> {
        let path = self.relative_geodesic(from.inverse().concat(to).letters())?;
        let mut out = vec![from.clone()];
        let mut acc = from.letters().to_vec();
        for s in split_syllables(&self.group, path.letters()) {
            acc.extend_from_slice(s.subword.letters());
            out.push(self.key(&acc));
        }
        Ok(out)
    }

    /// Lower bound for δ: the thinness of the triangles `(1, g, h)` with `g`,
    /// `h` in the Γ̂-ball of radius `r` (parabolic steps capped by the
    /// component cap), each side the canonical relative geodesic.
    pub fn estimate_delta(&self, r: usize) -> Result<usize> {
        if r == 0 {
            return Ok(0);
        }
        let ball = self.relative_ball(self.component_cap, r)?;
        let vertices: Vec<Word> = ball.layers.iter().take(r + 1).flatten().cloned().collect();
        let origin = Word::empty();
        let mut worst = 0;
        for (gi, g) in vertices.iter().enumerate() {
            let side_a = self.geodesic_vertices(&origin, g)?;
            for h in &vertices[gi + 1..] {
                let side_b = self.geodesic_vertices(g, h)?;
                let side_c = self.geodesic_vertices(&origin, h)?;
                let sides = [&side_a, &side_b, &side_c];
                for (si, side) in sides.iter().enumerate() {
                    for p in side.iter() {
                        let mut best = usize::MAX;
                        for (oi, other) in sides.iter().enumerate() {
                            if oi == si {
                                continue;
                            }
                            for q in other.iter() {
                                best = best.min(self.relative_distance(p.letters(), q.letters())?);
                                if best <= worst {
                                    break;
                                }
                            }
                        }
                        worst = worst.max(best);
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Lower bound for the BCP constant `C(λ, ε)`: the largest Γ-length of a
    /// parabolic component of one path that is isolated from the other, over
    /// pairs of `(λ, ε)`-quasi-geodesic syllable paths without backtracking
    /// from 1 to a common endpoint, all vertices inside the Γ-ball of radius
    /// `r`.
    pub fn estimate_bcp(&self, params: QuasiGeodesicParams, r: usize) -> Result<usize> {
        if r == 0 || self.group.rank() == 0 {
            return Ok(0);
        }
        let ball = self.ball(r)?;
        let steps = self.parabolic_steps(r)?;
        let max_arc = (params.lambda * Ratio::from_integer(r as u64) + params.epsilon).to_integer() as usize;

        let mut paths_by_end: HashMap<Word, Vec<SyllablePath>> = HashMap::new();
        let mut stack = vec![SyllablePath { vertices: vec![Word::empty()], steps: Vec::new() }];
        let mut explored = 0usize;
        while let Some(path) = stack.pop() {
            explored += 1;
            if explored > self.budget {
                return Err(self.budget_error("quasi-geodesic syllable paths"));
            }
            let end = path.vertices.last().unwrap().clone();
            if !path.steps.is_empty() {
                paths_by_end.entry(end.clone()).or_default().push(path.clone());
            }
            if path.steps.len() == max_arc {
                continue;
            }
            for s in &steps {
                if !path.can_extend(&self.group, s) {
                    continue;
                }
                let mut raw = end.letters().to_vec();
                raw.extend_from_slice(s.letters());
                let next = self.key(&raw);
                if ball.position(&next).is_none() {
                    continue;
                }
                let mut ext = path.clone();
                ext.vertices.push(next);
                ext.steps.push(s.clone());
                if ext.is_quasi_geodesic_tail(self, &params)? && !ext.backtracks_at_tail(self) {
                    stack.push(ext);
                }
            }
        }

        let mut worst = 0;
        let mut ends: Vec<&Word> = paths_by_end.keys().collect();
        ends.sort();
        for end in ends {
            let paths = &paths_by_end[end];
            for p in paths {
                for q in paths {
                    for c in p.components(&self.group) {
                        let connected = q
                            .components(&self.group)
                            .iter()
                            .any(|d| d.index == c.index && self.same_coset(&c.start, &d.start, c.index));
                        if !connected {
                            let len = self.group.oracle(c.index).element_length(c.element.letters())?;
                            worst = worst.max(len);
                        }
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Whether `a·P_index = b·P_index`.
    pub fn same_coset(&self, a: &Word, b: &Word, index: usize) -> bool {
        let key = self.key(a.inverse().concat(b).letters());
        key.is_empty() || self.group.parabolic_index(key.letters()) == Some(index)
    }
}

#[derive(Clone, Debug)]
struct SyllablePath {
    /// Canonical forms of the syllable-boundary vertices, starting at 1.
    vertices: Vec<Word>,
    steps: Vec<Word>,
}

struct Component {
    index: usize,
    start: Word,
    element: Word,
}

impl SyllablePath {
    fn kind(group: &Group, step: &Word) -> SyllableKind {
        SyllableKind::from(group.letter_class(step.letters()[0]))
    }

    /// No inverse hyperbolic letters and no two same-index components in a row.
    fn can_extend(&self, group: &Group, s: &Word) -> bool {
        let Some(last) = self.steps.last() else {
            return true;
        };
        match (Self::kind(group, last), Self::kind(group, s)) {
            (SyllableKind::Hyperbolic, SyllableKind::Hyperbolic) => last.letters()[0] != s.letters()[0].inverse(),
            (SyllableKind::Parabolic(i), SyllableKind::Parabolic(j)) => i != j,
            _ => true,
        }
    }

    fn is_quasi_geodesic_tail(&self, oracle: &MetricOracle, params: &QuasiGeodesicParams) -> Result<bool> {
        let j = self.vertices.len() - 1;
        for i in 0..j {
            let d = oracle.relative_distance(self.vertices[i].letters(), self.vertices[j].letters())?;
            if !params.admits(j - i, d) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The newest component re-enters a coset the path has already left.
    fn backtracks_at_tail(&self, oracle: &MetricOracle) -> bool {
        let group = oracle.group();
        let n = self.steps.len();
        let SyllableKind::Parabolic(index) = Self::kind(group, &self.steps[n - 1]) else {
            return false;
        };
        let start = &self.vertices[n - 1];
        (0..n - 1).any(|k| {
            Self::kind(group, &self.steps[k]) == SyllableKind::Parabolic(index)
                && oracle.same_coset(&self.vertices[k], start, index)
        })
    }

    fn components(&self, group: &Group) -> Vec<Component> {
        self.steps
            .iter()
            .enumerate()
            .filter_map(|(k, s)| match Self::kind(group, s) {
                SyllableKind::Parabolic(index) => {
                    Some(Component { index, start: self.vertices[k].clone(), element: s.clone() })
                }
                SyllableKind::Hyperbolic => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(text: &str) -> MetricOracle {
        MetricOracle::new(Arc::new(Group::from_text(text).unwrap()), DEFAULT_BUDGET).unwrap()
    }

    const FREE: &str = "group free2\nhyperbolic a b\n";
    const G2: &str = "group g2\nhyperbolic a\nparabolic free_abelian 2\nletters x y\n";
    const G3: &str = "group g3\nhyperbolic a\nparabolic free_abelian 2\nletters x y\nrelator aaa\n";

    fn w(o: &MetricOracle, s: &str) -> Word {
        o.group().parse_word(s).unwrap()
    }

    #[test]
    fn ball_sizes() {
        let f = oracle(FREE);
        assert_eq!(f.ball(1).unwrap().len(), 5);
        assert_eq!(f.ball(2).unwrap().len(), 17);
        assert_eq!(oracle(G2).ball(1).unwrap().len(), 7);
        // a has order 3: the ball of radius 2 is {1, a, A} × a free product part.
        let g3 = oracle(G3);
        assert!(g3.is_trivial(w(&g3, "aaa").letters()));
        assert!(g3.equal(w(&g3, "aa").letters(), w(&g3, "A").letters()));
    }

    #[test]
    fn cached_ball_serves_smaller_radii() {
        let f = oracle(FREE);
        let big = f.ball(3).unwrap();
        let small = f.ball(2).unwrap();
        assert_eq!(small.words(), big.within(2));
        assert_eq!(small.position(&w(&f, "ab")), big.position(&w(&f, "ab")));
    }

    #[test]
    fn relative_lengths() {
        let g = oracle(G2);
        assert_eq!(g.relative_length(w(&g, "xxx").letters()).unwrap(), 1);
        assert_eq!(g.relative_length(w(&g, "axxa").letters()).unwrap(), 3);
        assert_eq!(g.relative_length(&[]).unwrap(), 0);
        let g3 = oracle(G3);
        assert_eq!(g3.relative_length(w(&g3, "aax").letters()).unwrap(), 2);
        assert_eq!(g3.relative_geodesic(w(&g3, "aax").letters()).unwrap(), w(&g3, "Ax"));
    }

    #[test]
    fn relative_geodesics() {
        let g = oracle(G2);
        assert!(g.is_relative_geodesic(w(&g, "axa").letters()).unwrap());
        assert!(!g.is_relative_geodesic(w(&g, "xyX").letters()).unwrap());
        assert!(g.is_relative_geodesic(&[]).unwrap());
    }

    #[test]
    fn brute_force_conjugacy() {
        let f = oracle(FREE);
        assert_eq!(f.brute_conjugate(&w(&f, "ab"), &w(&f, "ba"), 2).unwrap(), Some(w(&f, "A")));
        assert_eq!(f.brute_conjugate(&w(&f, "a"), &w(&f, "b"), 4).unwrap(), None);
        let g = oracle(G2);
        assert_eq!(g.brute_conjugate(&w(&g, "x"), &w(&g, "x"), 0).unwrap(), Some(Word::empty()));
    }

    #[test]
    fn budget_is_enforced() {
        let o = MetricOracle::new(Arc::new(Group::from_text(FREE).unwrap()), 10).unwrap();
        assert!(matches!(o.ball(2), Err(Error::Budget { .. })));
        let none = MetricOracle::new(Arc::new(Group::from_text(FREE).unwrap()), 0).unwrap();
        assert!(matches!(none.ball(0), Err(Error::Budget { .. })));
    }

    #[test]
    fn ball_cache_round_trip() {
        let g = oracle(G2);
        let ball = g.ball(3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g2.ball");
        ball.save(&path).unwrap();
        let back = BallIndex::load(&path, &g).unwrap();
        assert_eq!(back.words(), ball.words());
        assert_eq!(back.radius(), 3);
        let other = oracle(FREE);
        assert!(matches!(BallIndex::load(&path, &other), Err(Error::Cache(_))));
    }

    #[test]
    fn estimators_on_trivial_inputs() {
        let f = oracle(FREE);
        assert_eq!(f.estimate_delta(3).unwrap(), 0);
        assert_eq!(f.estimate_delta(0).unwrap(), 0);
        let params = QuasiGeodesicParams::new(Ratio::from_integer(2), Ratio::from_integer(0)).unwrap();
        assert_eq!(f.estimate_bcp(params, 3).unwrap(), 0);
        assert_eq!(oracle(G2).estimate_bcp(params, 0).unwrap(), 0);
        assert!(QuasiGeodesicParams::new(Ratio::new(1, 2), Ratio::from_integer(0)).is_err());
    }

    #[test]
    fn local_geodesic_params() {
        let p = QuasiGeodesicParams::for_local_geodesics(1);
        assert_eq!(p.lambda, Ratio::new(13, 5));
        assert_eq!(p.epsilon, Ratio::from_integer(2));
        // 13/5 + 2 = 4.6
        assert!(p.admits(4, 1));
        assert!(!p.admits(5, 1));
        assert!(p.admits(2, 0));
    }
}
