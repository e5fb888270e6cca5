//! Constants profiles and the precomputed lists the decision procedures
//! consult: parabolic balls `L1`–`L3` and `B_i`, filtered balls
//! `B(r1, r2)` (`L4`, `L5`, `L6`, `L8`), the Γ-ball `L9`, bounded conjugacy
//! classes and the conjugacy classes of `L8` with their witnesses.
//!
//! The pair lists `L11`/`L7` and `L88`/`L12` are not stored pair by pair.
//! Each is a partition into classes where every member records a conjugator
//! from its class root, so the witness for a pair is a product of two
//! stored words.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::group::{short_hash, Group};
use crate::metric::{read_u64, read_words, write_words, MetricOracle};
use crate::presentation::{parse_constants_line, LetterClass};
use crate::words::{split_syllables, Letter, SyllableKind, Word};

const KEYS: [&str; 15] = [
    "delta", "c2", "c3", "c7", "budget", "nlin", "mlin", "rlong", "r4", "r5", "r6", "r9", "rbcc", "kbcc", "k88",
];

/// δ and the constants `C(2)`, `C(3)`, `C(7,2δ)`, with optional working
/// overrides for the radii the tables are built with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantsProfile {
    pub delta: u64,
    pub c2: u64,
    pub c3: u64,
    pub c7: u64,
    pub element_budget: usize,
    pub n_lin: u64,
    pub m_lin: u64,
    /// Long/short threshold and radius of `L8`; defaults to `86δ+3`.
    pub rlong: Option<u64>,
    /// Relative radius of `L4`; defaults to `7δ+1`.
    pub r4: Option<u64>,
    /// Relative radius of `L5`; defaults to `16δ+1`.
    pub r5: Option<u64>,
    /// Relative radius of `L6`; defaults to `2(274δ+9)`.
    pub r6: Option<u64>,
    /// Γ-radius of `L9`; defaults to `4δ·C(3)`.
    pub r9: Option<u64>,
    /// Relative radius of the bounded conjugacy classes; defaults to `4δ`.
    pub rbcc: Option<u64>,
    /// Relative radius of conjugators for the bounded classes; defaults to `K_4δ`.
    pub kbcc: Option<u64>,
    /// Relative radius of conjugators for `L88`; defaults to `2·rlong + 4δ + 2`.
    pub k88: Option<u64>,
}

impl Default for ConstantsProfile {
    fn default() -> Self {
        ConstantsProfile {
            delta: 0,
            c2: 1,
            c3: 1,
            c7: 1,
            element_budget: crate::metric::DEFAULT_BUDGET,
            n_lin: 1,
            m_lin: 0,
            rlong: None,
            r4: None,
            r5: None,
            r6: None,
            r9: None,
            rbcc: None,
            kbcc: None,
            k88: None,
        }
    }
}

impl ConstantsProfile {
    pub fn from_constants(map: &BTreeMap<String, u64>) -> Result<Self> {
        let mut p = ConstantsProfile::default();
        for (k, &v) in map {
            match k.as_str() {
                "delta" => p.delta = v,
                "c2" => p.c2 = v,
                "c3" => p.c3 = v,
                "c7" => p.c7 = v,
                "budget" => p.element_budget = v as usize,
                "nlin" => p.n_lin = v,
                "mlin" => p.m_lin = v,
                "rlong" => p.rlong = Some(v),
                "r4" => p.r4 = Some(v),
                "r5" => p.r5 = Some(v),
                "r6" => p.r6 = Some(v),
                "r9" => p.r9 = Some(v),
                "rbcc" => p.rbcc = Some(v),
                "kbcc" => p.kbcc = Some(v),
                "k88" => p.k88 = Some(v),
                other => {
                    return Err(Error::InvalidConstants(format!(
                        "unknown key '{other}' (expected one of {})",
                        KEYS.join(", ")
                    )))
                }
            }
        }
        p.validate()?;
        Ok(p)
    }

    /// Parses a profile file: `constants key=value …` lines or bare
    /// `key=value` tokens, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let tokens = match tokens.first() {
                None => continue,
                Some(&"constants") => &tokens[1..],
                Some(_) => &tokens[..],
            };
            parse_constants_line(n + 1, tokens, &mut map)?;
        }
        Self::from_constants(&map)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c2 > self.c3 {
            return Err(Error::InvalidConstants(format!("C(2) = {} exceeds C(3) = {}", self.c2, self.c3)));
        }
        Ok(())
    }

    pub fn to_map(&self) -> BTreeMap<String, u64> {
        let mut m = BTreeMap::new();
        m.insert("delta".to_string(), self.delta);
        m.insert("c2".to_string(), self.c2);
        m.insert("c3".to_string(), self.c3);
        m.insert("c7".to_string(), self.c7);
        m.insert("budget".to_string(), self.element_budget as u64);
        m.insert("nlin".to_string(), self.n_lin);
        m.insert("mlin".to_string(), self.m_lin);
        let overrides = [
            ("rlong", self.rlong),
            ("r4", self.r4),
            ("r5", self.r5),
            ("r6", self.r6),
            ("r9", self.r9),
            ("rbcc", self.rbcc),
            ("kbcc", self.kbcc),
            ("k88", self.k88),
        ];
        for (k, v) in overrides {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        }
        m
    }

    pub fn to_line(&self) -> String {
        let kv: Vec<String> = self.to_map().iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("constants {}", kv.join(" "))
    }

    pub fn hash(&self) -> u64 {
        short_hash(self.to_line().as_bytes())
    }

    /// Locality parameter `k = 8δ+1`.
    pub fn k(&self) -> usize {
        (8 * self.delta + 1) as usize
    }

    pub fn long_threshold(&self) -> usize {
        self.rlong.unwrap_or(86 * self.delta + 3) as usize
    }

    pub fn r4(&self) -> usize {
        self.r4.unwrap_or(7 * self.delta + 1) as usize
    }

    pub fn r5(&self) -> usize {
        self.r5.unwrap_or(16 * self.delta + 1) as usize
    }

    pub fn r6(&self) -> usize {
        self.r6.unwrap_or(2 * (274 * self.delta + 9)) as usize
    }

    pub fn r9(&self) -> usize {
        self.r9.unwrap_or(4 * self.delta * self.c3) as usize
    }

    pub fn rbcc(&self) -> usize {
        self.rbcc.unwrap_or(4 * self.delta) as usize
    }

    pub fn kbcc(&self, k_4delta: u64) -> usize {
        self.kbcc.unwrap_or(k_4delta) as usize
    }

    pub fn k88(&self) -> usize {
        self.k88.unwrap_or(2 * self.long_threshold() as u64 + 4 * self.delta + 2) as usize
    }

    /// Per-iteration conjugator growth allowed in cyclic shortening:
    /// `max(C(2), 8δ·C(2))`.
    pub fn cyclic_conjugator_factor(&self) -> usize {
        self.c2.max(8 * self.delta * self.c2) as usize
    }
}

/// `B(r1, r2)`: elements with a relative geodesic of length at most `r1`
/// whose parabolic components have Γ-length at most `r2`. Each member is
/// stored as the first such path found breadth-first, which is a relative
/// geodesic with components in normal form.
#[derive(Clone, Debug)]
pub struct FilteredBall {
    pub rel_radius: usize,
    pub comp_bound: usize,
    members: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl FilteredBall {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Word] {
        &self.members
    }

    pub fn position(&self, key: &Word) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// The stored relative geodesic for the element with canonical form `key`.
    pub fn get(&self, key: &Word) -> Option<&Word> {
        self.position(key).map(|i| &self.members[i])
    }

    fn from_members(oracle: &MetricOracle, rel_radius: usize, comp_bound: usize, members: Vec<Word>) -> Self {
        let index = members.iter().enumerate().map(|(i, w)| (oracle.key(w.letters()), i)).collect();
        FilteredBall { rel_radius, comp_bound, members, index }
    }
}

fn budget_error(what: impl Into<String>, limit: usize) -> Error {
    Error::Budget { what: what.into(), limit }
}

/// Syllables available to paths in `B(·, r2)`: hyperbolic letters, then the
/// nontrivial elements of each `P_i` up to Γ_i-length `r2`.
fn syllable_steps(group: &Group, r2: usize, budget: usize) -> Result<Vec<(SyllableKind, Word)>> {
    let mut steps: Vec<(SyllableKind, Word)> = group
        .hyperbolic_letters()
        .map(|l| (SyllableKind::Hyperbolic, Word::from_letters([l])))
        .collect();
    for o in group.oracles() {
        for w in o.ball_within(r2, budget)? {
            if !w.is_empty() {
                steps.push((SyllableKind::Parabolic(o.index()), w));
            }
        }
    }
    Ok(steps)
}

pub fn enumerate_filtered_ball(
    oracle: &MetricOracle,
    profile: &ConstantsProfile,
    r1: usize,
    r2: usize,
) -> Result<FilteredBall> {
    let budget = profile.element_budget;
    let what = || format!("B({r1}, {r2})");
    if budget == 0 {
        return Err(budget_error(what(), budget));
    }
    let group = oracle.group();
    let steps = syllable_steps(group, r2, budget)?;
    let mut members = vec![Word::empty()];
    let mut index = HashMap::from([(Word::empty(), 0usize)]);
    // (member, last syllable)
    let mut layer: Vec<(usize, Option<(SyllableKind, Letter)>)> = vec![(0, None)];
    for _ in 0..r1 {
        let mut next = Vec::new();
        for &(m, last) in &layer {
            for (kind, s) in &steps {
                let first = s.letters()[0];
                let allowed = match (last, kind) {
                    (Some((SyllableKind::Hyperbolic, l)), SyllableKind::Hyperbolic) => first != l.inverse(),
                    (Some((SyllableKind::Parabolic(i), _)), SyllableKind::Parabolic(j)) => i != *j,
                    _ => true,
                };
                if !allowed {
                    continue;
                }
                let w = members[m].concat(s);
                let key = oracle.key(w.letters());
                if index.contains_key(&key) {
                    continue;
                }
                index.insert(key, members.len());
                next.push((members.len(), Some((*kind, *s.letters().last().unwrap()))));
                members.push(w);
                if members.len() > budget {
                    return Err(budget_error(what(), budget));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    Ok(FilteredBall { rel_radius: r1, comp_bound: r2, members, index })
}

/// A partition of a finite set of elements into conjugacy classes. Member
/// `j` of a class satisfies `member_j = c_j · root · c_j⁻¹` where `root` is
/// the first member of its class and `c_j` is stored.
#[derive(Clone, Debug, Default)]
pub struct ConjugacyClasses {
    members: Vec<Word>,
    index: HashMap<Word, usize>,
    class_of: Vec<usize>,
    from_root: Vec<Word>,
    roots: Vec<usize>,
}

impl ConjugacyClasses {
    /// Breadth-first closure of `members` under conjugation by `conjugators`
    /// and under the extra edges `extra(key) = [(key', w)]` with
    /// `key' = w·key·w⁻¹`. Conjugates that leave the member set are dropped.
    fn build(
        oracle: &MetricOracle,
        members: Vec<Word>,
        conjugators: &[Word],
        extra: &dyn Fn(&Word) -> Vec<(Word, Word)>,
    ) -> Self {
        let keys: Vec<Word> = members.iter().map(|m| oracle.key(m.letters())).collect();
        let index: HashMap<Word, usize> = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        let n = members.len();
        let mut class_of = vec![usize::MAX; n];
        let mut from_root = vec![Word::empty(); n];
        let mut roots = Vec::new();
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            let cid = roots.len();
            roots.push(start);
            class_of[start] = cid;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                let mut visit = |y: usize, c: &Word, queue: &mut VecDeque<usize>| {
                    if class_of[y] == usize::MAX {
                        class_of[y] = cid;
                        from_root[y] = c.concat(&from_root[x]);
                        queue.push_back(y);
                    }
                };
                for c in conjugators {
                    let y = oracle.key(keys[x].conjugate_by(c).letters());
                    if let Some(&y) = index.get(&y) {
                        visit(y, c, &mut queue);
                    }
                }
                for (y, c) in extra(&keys[x]) {
                    if let Some(&y) = index.get(&y) {
                        visit(y, &c, &mut queue);
                    }
                }
            }
        }
        ConjugacyClasses { members, index, class_of, from_root, roots }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.roots.len()
    }

    pub fn members(&self) -> &[Word] {
        &self.members
    }

    pub fn position(&self, key: &Word) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn class_of(&self, key: &Word) -> Option<usize> {
        self.position(key).map(|i| self.class_of[i])
    }

    pub fn class_of_member(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// Positions of the members of class `cid`, in member order.
    pub fn class_members(&self, cid: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.members.len()).filter(move |&i| self.class_of[i] == cid)
    }

    /// `g` with `g·p·g⁻¹ = q`, when both lie in the same class.
    pub fn witness(&self, p: &Word, q: &Word) -> Option<Word> {
        let (i, j) = (self.position(p)?, self.position(q)?);
        self.member_witness(i, j)
    }

    pub fn member_witness(&self, i: usize, j: usize) -> Option<Word> {
        (self.class_of[i] == self.class_of[j]).then(|| self.from_root[j].concat(&self.from_root[i].inverse()))
    }

    fn write_to(&self, out: &mut impl Write) -> Result<()> {
        write_words(out, &self.members)?;
        write_u64s(out, self.class_of.iter().map(|&c| c as u64))?;
        write_words(out, &self.from_root)
    }

    fn read_from(input: &mut impl Read, oracle: &MetricOracle) -> Result<Self> {
        let members = read_words(input)?;
        let class_of: Vec<usize> = read_u64s(input)?.into_iter().map(|c| c as usize).collect();
        let from_root = read_words(input)?;
        if class_of.len() != members.len() || from_root.len() != members.len() {
            return Err(Error::Cache("conjugacy class table is inconsistent".into()));
        }
        let mut roots = Vec::new();
        for (i, &c) in class_of.iter().enumerate() {
            if c == roots.len() {
                roots.push(i);
            } else if c > roots.len() {
                return Err(Error::Cache("conjugacy class ids out of order".into()));
            }
        }
        let index = members.iter().enumerate().map(|(i, w)| (oracle.key(w.letters()), i)).collect();
        Ok(ConjugacyClasses { members, index, class_of, from_root, roots })
    }
}

fn write_u64s(out: &mut impl Write, values: impl ExactSizeIterator<Item = u64>) -> Result<()> {
    out.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64s(input: &mut impl Read) -> Result<Vec<u64>> {
    let n = read_u64(input)?;
    (0..n).map(|_| read_u64(input)).collect()
}

#[derive(Clone, Debug)]
pub struct PrecomputedTables {
    pub presentation_hash: u64,
    pub profile_hash: u64,
    /// Parabolic elements of Γ-length at most `C(2)`, `C(7,2δ)`, `C(3)`;
    /// the identity first, then each `P_i` in shortlex order.
    pub l1: Vec<Word>,
    pub l2: Vec<Word>,
    pub l3: Vec<Word>,
    /// `B_i = P_i ∩ L3`, indexed from 0 for `P_1`.
    pub b: Vec<Vec<Word>>,
    pub l4: FilteredBall,
    pub l5: FilteredBall,
    pub l6: FilteredBall,
    pub l8: FilteredBall,
    pub l9: Vec<Word>,
    pub k_i: Vec<u64>,
    pub k_hyp_4delta: u64,
    pub k_4delta: u64,
    /// Bounded conjugacy classes of `B(4δ, C(3)) ∪ L3`; restricted to `L3`
    /// this is `L11` with witnesses `L7`.
    pub bcc: ConjugacyClasses,
    /// Conjugacy classes over `L8` (and the bounded classes); pairs in a
    /// common class form `L88` with witnesses `L12`.
    pub l88: ConjugacyClasses,
    pub l10: Vec<Word>,
    /// Nonempty trivial words that survive shortening. Shortening replaces
    /// every window by an exact relative geodesic, so this stays empty for
    /// the models shipped here.
    pub trivial_loops: Vec<Word>,
}

const TABLE_MAGIC: &[u8; 8] = b"RHTABL01";
const TABLE_VERSION: u32 = 1;

/// Shortest `y ∈ P_i` with `y·t·y⁻¹ = u`, searching the ball up to the
/// length of the oracle's own answer.
fn shortest_parabolic_conjugator(group: &Group, index: usize, t: &Word, u: &Word) -> Result<Option<Word>> {
    let oracle = group.oracle(index);
    let Some(found) = oracle.conjugate(t.letters(), u.letters())? else {
        return Ok(None);
    };
    let target = oracle.geodesic_form(u.letters())?;
    for y in oracle.ball(found.len()) {
        if oracle.geodesic_form(t.conjugate_by(&y).letters())? == target {
            return Ok(Some(y));
        }
    }
    Ok(Some(found))
}

pub fn precompute(oracle: &MetricOracle, profile: &ConstantsProfile) -> Result<PrecomputedTables> {
    profile.validate()?;
    let group = oracle.group();
    let budget = profile.element_budget;
    if budget == 0 {
        return Err(budget_error("L1", 0));
    }
    let par_list = |r: u64, name: &str| -> Result<Vec<Word>> {
        if group.rank() == 0 {
            return Ok(Vec::new());
        }
        let mut out = vec![Word::empty()];
        for o in group.oracles() {
            out.extend(o.ball_within(r as usize, budget)?.into_iter().filter(|w| !w.is_empty()));
            if out.len() > budget {
                return Err(budget_error(name, budget));
            }
        }
        Ok(out)
    };
    let l1 = par_list(profile.c2, "L1")?;
    let l2 = par_list(profile.c7, "L2")?;
    let l3 = par_list(profile.c3, "L3")?;
    let b: Vec<Vec<Word>> = group
        .oracles()
        .iter()
        .map(|o| o.ball_within(profile.c3 as usize, budget))
        .collect::<Result<_>>()?;

    let mut k_i = Vec::new();
    for (i, bi) in b.iter().enumerate() {
        let mut worst = 0u64;
        for t1 in bi {
            for t2 in bi {
                if let Some(y) = shortest_parabolic_conjugator(group, i + 1, t2, t1)? {
                    worst = worst.max(y.len() as u64);
                }
            }
        }
        k_i.push(worst);
    }

    let c3 = profile.c3 as usize;
    let l4 = enumerate_filtered_ball(oracle, profile, profile.r4(), profile.c7 as usize)?;
    let l5 = enumerate_filtered_ball(oracle, profile, profile.r5(), profile.c2 as usize)?;
    let l6 = enumerate_filtered_ball(oracle, profile, profile.r6(), profile.c7 as usize)?;
    let l8 = geodesic_filter(oracle, enumerate_filtered_ball(oracle, profile, profile.long_threshold(), 2 * c3)?)?;
    let l9 = oracle.ball(profile.r9()).map_err(|e| rename_budget(e, "L9"))?.words().to_vec();

    let hyp_ball = enumerate_filtered_ball(oracle, profile, 4 * profile.delta as usize, 2 * c3)?;
    let k_hyp_4delta = hyp_ball.len() as u64 * (16 * profile.delta + 2);
    let k_4delta = k_hyp_4delta
        + group
            .oracles()
            .iter()
            .map(|o| (o.generator_count() as u64).saturating_pow(profile.c3 as u32))
            .fold(0u64, u64::saturating_add);

    let big_k = k_i.iter().copied().chain([profile.c3]).max().unwrap_or(0) as usize;
    let mut bcc_members = enumerate_filtered_ball(oracle, profile, profile.rbcc(), c3)?.members().to_vec();
    append_new(oracle, &mut bcc_members, &l3);
    let bcc_conjugators = enumerate_filtered_ball(oracle, profile, profile.kbcc(k_4delta), big_k)?;
    let bcc = ConjugacyClasses::build(oracle, bcc_members, bcc_conjugators.members(), &|_| Vec::new());

    let mut l88_members = l8.members().to_vec();
    append_new(oracle, &mut l88_members, bcc.members());
    let l88_conjugators = enumerate_filtered_ball(oracle, profile, profile.k88(), 2 * c3)?;
    let bcc_edges = |key: &Word| -> Vec<(Word, Word)> {
        let Some(i) = bcc.position(key) else {
            return Vec::new();
        };
        bcc.class_members(bcc.class_of_member(i))
            .map(|j| (oracle.key(bcc.members()[j].letters()), bcc.member_witness(i, j).unwrap()))
            .collect()
    };
    let l88 = ConjugacyClasses::build(oracle, l88_members, l88_conjugators.members(), &bcc_edges);

    let l3_keys: Vec<Word> = l3.iter().map(|w| oracle.key(w.letters())).collect();
    let parabolic_classes: std::collections::HashSet<usize> =
        l3_keys.iter().filter_map(|k| l88.class_of(k)).collect();
    let l10 = l8
        .members()
        .iter()
        .filter(|w| l88.class_of(&oracle.key(w.letters())).is_some_and(|c| parabolic_classes.contains(&c)))
        .cloned()
        .collect();

    Ok(PrecomputedTables {
        presentation_hash: group.hash(),
        profile_hash: profile.hash(),
        l1,
        l2,
        l3,
        b,
        l4,
        l5,
        l6,
        l8,
        l9,
        k_i,
        k_hyp_4delta,
        k_4delta,
        bcc,
        l88,
        l10,
        trivial_loops: Vec::new(),
    })
}

fn rename_budget(e: Error, what: &str) -> Error {
    match e {
        Error::Budget { limit, .. } => Error::Budget { what: what.to_string(), limit },
        e => e,
    }
}

fn append_new(oracle: &MetricOracle, into: &mut Vec<Word>, extra: &[Word]) {
    let mut seen: std::collections::HashSet<Word> = into.iter().map(|w| oracle.key(w.letters())).collect();
    for w in extra {
        if seen.insert(oracle.key(w.letters())) {
            into.push(w.clone());
        }
    }
}

/// Keeps the members that are relative geodesics. Breadth-first members
/// already are for free products; with relators the capped search may not be.
fn geodesic_filter(oracle: &MetricOracle, ball: FilteredBall) -> Result<FilteredBall> {
    if oracle.is_free_product() {
        return Ok(ball);
    }
    let mut kept = Vec::new();
    for w in ball.members() {
        if oracle.is_relative_geodesic(w.letters())? {
            kept.push(w.clone());
        }
    }
    Ok(FilteredBall::from_members(oracle, ball.rel_radius, ball.comp_bound, kept))
}

/// `M_u`: for `u ∈ F(S_i)` outside `B_i`, the length of a shortest `y ∈ P_i`
/// conjugating some `t ∈ B_i` to `u`; zero in every other case.
pub fn compute_m(oracle: &MetricOracle, tables: &PrecomputedTables, u: &Word) -> Result<u64> {
    let group = oracle.group();
    let Some(i) = group.parabolic_index(u.letters()) else {
        return Ok(0);
    };
    let po = group.oracle(i);
    let form = po.geodesic_form(u.letters())?;
    let bi = &tables.b[i - 1];
    if bi.contains(&form) {
        return Ok(0);
    }
    let mut best: Option<u64> = None;
    for t in bi {
        if let Some(y) = shortest_parabolic_conjugator(group, i, t, &form)? {
            best = Some(best.map_or(y.len() as u64, |b| b.min(y.len() as u64)));
        }
    }
    Ok(best.unwrap_or(0))
}

impl PrecomputedTables {
    /// `K = max{C(3), K_1, …, K_m}`.
    pub fn big_k(&self, profile: &ConstantsProfile) -> u64 {
        self.k_i.iter().copied().chain([profile.c3]).max().unwrap_or(0)
    }

    /// The pairs of `L11` with their `L7` witnesses `g`, `g·p·g⁻¹ = q`.
    pub fn l11(&self, oracle: &MetricOracle) -> Vec<(Word, Word, Word)> {
        let l3: Vec<usize> = self
            .l3
            .iter()
            .filter_map(|w| self.bcc.position(&oracle.key(w.letters())))
            .collect();
        let mut out = Vec::new();
        for &i in &l3 {
            for &j in &l3 {
                if let Some(g) = self.bcc.member_witness(i, j) {
                    out.push((self.bcc.members()[i].clone(), self.bcc.members()[j].clone(), g));
                }
            }
        }
        out
    }

    /// `(list name, size)` in a fixed order, for reports.
    pub fn sizes(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("l1", self.l1.len()),
            ("l2", self.l2.len()),
            ("l3", self.l3.len()),
            ("l4", self.l4.len()),
            ("l5", self.l5.len()),
            ("l6", self.l6.len()),
            ("l8", self.l8.len()),
            ("l9", self.l9.len()),
            ("l10", self.l10.len()),
            ("bcc", self.bcc.len()),
            ("bcc_classes", self.bcc.class_count()),
            ("l88", self.l88.len()),
            ("l88_classes", self.l88.class_count()),
            ("trivial_loops", self.trivial_loops.len()),
        ]
    }

    pub fn write_to(&self, out: &mut impl Write) -> Result<()> {
        out.write_all(TABLE_MAGIC)?;
        out.write_all(&TABLE_VERSION.to_le_bytes())?;
        out.write_all(&self.presentation_hash.to_le_bytes())?;
        out.write_all(&self.profile_hash.to_le_bytes())?;
        for list in [&self.l1, &self.l2, &self.l3] {
            write_words(out, list)?;
        }
        out.write_all(&(self.b.len() as u64).to_le_bytes())?;
        for bi in &self.b {
            write_words(out, bi)?;
        }
        for ball in [&self.l4, &self.l5, &self.l6, &self.l8] {
            write_u64s(out, [ball.rel_radius as u64, ball.comp_bound as u64].into_iter())?;
            write_words(out, &ball.members)?;
        }
        write_words(out, &self.l9)?;
        write_u64s(out, self.k_i.iter().copied())?;
        write_u64s(out, [self.k_hyp_4delta, self.k_4delta].into_iter())?;
        self.bcc.write_to(out)?;
        self.l88.write_to(out)?;
        write_words(out, &self.l10)?;
        write_words(out, &self.trivial_loops)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    /// Reads tables written by [`Self::save`]. Fails with a cache error when
    /// the file was built for another presentation or profile.
    pub fn load(path: &Path, oracle: &MetricOracle, profile: &ConstantsProfile) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f, oracle, profile)
    }

    pub fn read_from(input: &mut impl Read, oracle: &MetricOracle, profile: &ConstantsProfile) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != TABLE_MAGIC {
            return Err(Error::Cache("not a table cache file".into()));
        }
        let mut v = [0u8; 4];
        input.read_exact(&mut v)?;
        if u32::from_le_bytes(v) != TABLE_VERSION {
            return Err(Error::Cache("unsupported table cache version".into()));
        }
        let presentation_hash = read_u64(input)?;
        let profile_hash = read_u64(input)?;
        if presentation_hash != oracle.group().hash() {
            return Err(Error::Cache("tables were built for a different presentation".into()));
        }
        if profile_hash != profile.hash() {
            return Err(Error::Cache("tables were built for a different constants profile".into()));
        }
        let l1 = read_words(input)?;
        let l2 = read_words(input)?;
        let l3 = read_words(input)?;
        let nb = read_u64(input)?;
        let b = (0..nb).map(|_| read_words(input)).collect::<Result<Vec<_>>>()?;
        let mut balls = Vec::new();
        for _ in 0..4 {
            let radii = read_u64s(input)?;
            if radii.len() != 2 {
                return Err(Error::Cache("malformed filtered ball header".into()));
            }
            let members = read_words(input)?;
            balls.push(FilteredBall::from_members(oracle, radii[0] as usize, radii[1] as usize, members));
        }
        let l9 = read_words(input)?;
        let k_i = read_u64s(input)?;
        let ks = read_u64s(input)?;
        if ks.len() != 2 {
            return Err(Error::Cache("malformed constants record".into()));
        }
        let bcc = ConjugacyClasses::read_from(input, oracle)?;
        let l88 = ConjugacyClasses::read_from(input, oracle)?;
        let l10 = read_words(input)?;
        let trivial_loops = read_words(input)?;
        let mut balls = balls.into_iter();
        Ok(PrecomputedTables {
            presentation_hash,
            profile_hash,
            l1,
            l2,
            l3,
            b,
            l4: balls.next().unwrap(),
            l5: balls.next().unwrap(),
            l6: balls.next().unwrap(),
            l8: balls.next().unwrap(),
            l9,
            k_i,
            k_hyp_4delta: ks[0],
            k_4delta: ks[1],
            bcc,
            l88,
            l10,
            trivial_loops,
        })
    }
}

/// Whether every parabolic component of `w` has Γ-length at most `r2` and
/// `w` has at most `r1` syllables.
pub fn within_filter(group: &Group, w: &Word, r1: usize, r2: usize) -> bool {
    let syllables = split_syllables(group, w.letters());
    syllables.len() <= r1
        && syllables.iter().all(|s| match s.kind {
            SyllableKind::Parabolic(_) => s.subword.len() <= r2,
            SyllableKind::Hyperbolic => true,
        })
}

/// Whether `w` is a nonempty word over a single `S_i`.
pub fn is_parabolic_word(group: &Group, w: &Word) -> bool {
    group.parabolic_index(w.letters()).is_some()
}

#[allow(dead_code)]
fn class_of_letter(group: &Group, l: Letter) -> LetterClass {
    group.letter_class(l)
}
