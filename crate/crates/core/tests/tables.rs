mod common;

use std::collections::HashMap;

use relhyp::tables::{compute_m, enumerate_filtered_ball, precompute, ConstantsProfile, PrecomputedTables};
use relhyp::words::{split_syllables, SyllableKind};
use relhyp::{Engine, Error, MetricOracle, Word};

use common::{show, w};

const S3: &str = "group z_free_s3\nhyperbolic a\nparabolic finite 6\n\
table 0 1 2 3 4 5\ntable 1 0 5 4 3 2\ntable 2 4 0 5 1 3\ntable 3 5 4 0 2 1\ntable 4 2 3 1 5 0\ntable 5 3 1 2 0 4\n\
letters b c d e f\n\
constants delta=1 c2=1 c3=1 c7=1 rlong=2 r4=1 r5=1 r6=1 r9=2 kbcc=1 k88=1 budget=1000000\n";

/// Number of syllable sequences of length `0..=r` in `⟨a⟩ * P` when `P`
/// offers `p` admissible nontrivial components.
fn free_product_ball(r: usize, p: u64) -> u64 {
    // (sequences ending in a hyperbolic letter, ending in a component)
    let (mut h, mut c, mut total) = (0u64, 0u64, 1u64);
    for n in 1..=r {
        (h, c) = if n == 1 { (2, p) } else { (h + 2 * c, p * h) };
        total += h + c;
    }
    total
}

/// `|{v ∈ Z² : |v|₁ ≤ r}|`.
fn lattice_ball(r: u64) -> u64 {
    2 * r * r + 2 * r + 1
}

/// Relative length at most `r1` and every component of Γ-length at most `r2`.
fn in_filter(o: &MetricOracle, word: &Word, r1: usize, r2: usize) -> bool {
    let syllables = split_syllables(o.group(), word.letters());
    syllables.len() <= r1
        && syllables.iter().all(|s| match s.kind {
            SyllableKind::Parabolic(i) => o.group().oracle(i).element_length(s.subword.letters()).unwrap() <= r2,
            SyllableKind::Hyperbolic => true,
        })
}

#[test]
fn free_group_tables() {
    let e = common::engine(common::FREE2);
    let t = e.tables().unwrap();
    assert!(t.l1.is_empty() && t.l2.is_empty() && t.l3.is_empty());
    assert!(t.b.is_empty() && t.k_i.is_empty() && t.l10.is_empty());
    // Reduced words of length ≤ 3 in F(a, b).
    assert_eq!(t.l8.len(), 1 + 4 + 4 * 3 + 4 * 9);
    assert_eq!(t.l8.len(), 53);
}

#[test]
fn z_free_z2_list_sizes() {
    let e = common::engine(common::G2);
    let t = e.tables().unwrap();
    let p = e.profile();
    assert_eq!(t.l3.len() as u64, lattice_ball(p.c3));
    assert_eq!(t.l3.len(), 13);
    assert_eq!(t.b[0].len(), 13);
    assert_eq!(t.l4.len() as u64, free_product_ball(p.r4(), lattice_ball(p.c7) - 1));
    assert_eq!(t.l5.len() as u64, free_product_ball(p.r5(), lattice_ball(p.c2) - 1));
    assert_eq!(t.l5.len(), 65);
    assert_eq!(t.l6.len() as u64, free_product_ball(p.r6(), lattice_ball(p.c7) - 1));
    let c3 = p.c3;
    assert_eq!(t.l8.len() as u64, free_product_ball(p.long_threshold(), lattice_ball(2 * c3) - 1));
    let hyp = free_product_ball(4 * p.delta as usize, lattice_ball(2 * c3) - 1);
    assert_eq!(t.k_hyp_4delta, hyp * (16 * p.delta + 2));
    assert_eq!(t.k_i, vec![0]);
}

#[test]
fn list_members_satisfy_their_predicates() {
    for name in [common::G2, common::G3] {
        let e = common::engine(name);
        let (o, p, t) = (e.oracle(), e.profile(), e.tables().unwrap());
        for (list, r1, r2) in [
            (&t.l4, p.r4(), p.c7 as usize),
            (&t.l5, p.r5(), p.c2 as usize),
            (&t.l6, p.r6(), p.c7 as usize),
            (&t.l8, p.long_threshold(), 2 * p.c3 as usize),
        ] {
            for m in list.members() {
                assert!(in_filter(o, m, r1, r2), "{name}: {}", show(&e, m));
                assert_eq!(list.get(&o.key(m.letters())), Some(m));
            }
        }
        for m in &t.l3 {
            assert!(m.is_empty() || o.group().parabolic_index(m.letters()).is_some());
            assert!(m.len() as u64 <= p.c3);
        }
    }
}

#[test]
fn l8_is_geodesic_in_the_relator_model() {
    let e = common::engine(common::G3);
    let (o, t) = (e.oracle(), e.tables().unwrap());
    for m in t.l8.members() {
        assert!(o.is_relative_geodesic(m.letters()).unwrap(), "{}", show(&e, m));
    }
    // aa = A in Z/3, so only one of them survives.
    assert!(t.l8.get(&o.key(w(&e, "aa").letters())).is_some_and(|m| m.len() == 1));
}

#[test]
fn parabolic_pairs_are_the_diagonal() {
    // Distinct elements of an abelian factor are never conjugate in the free product.
    let e = common::engine(common::G2);
    let (o, t) = (e.oracle(), e.tables().unwrap());
    let l11 = t.l11(o);
    assert_eq!(l11.len(), t.l3.len());
    for (p, q, g) in &l11 {
        assert_eq!(o.key(p.letters()), o.key(q.letters()));
        assert!(o.is_trivial(Word::product(&[g, p, &g.inverse(), &q.inverse()]).letters()));
    }
}

#[test]
fn bounded_classes_match_direct_conjugation() {
    let e = common::engine(common::G2);
    let (o, p, t) = (e.oracle(), e.profile(), e.tables().unwrap());
    let big_k = t.big_k(p) as usize;
    let conjugators: Vec<Word> = o
        .ball(big_k)
        .unwrap()
        .words()
        .iter()
        .filter(|g| in_filter(o, g, p.kbcc(t.k_4delta), big_k))
        .cloned()
        .collect();
    let members = t.bcc.members();
    for m in members {
        let cm = t.bcc.class_of(&o.key(m.letters())).unwrap();
        for g in &conjugators {
            let q = o.key(m.conjugate_by(g).letters());
            if let Some(cq) = t.bcc.class_of(&q) {
                assert_eq!(cm, cq, "{} by {}", show(&e, m), show(&e, g));
            }
        }
    }
    for cid in 0..t.bcc.class_count() {
        let ids: Vec<usize> = t.bcc.class_members(cid).collect();
        for &j in &ids {
            let g = t.bcc.member_witness(ids[0], j).unwrap();
            let (a, b) = (&members[ids[0]], &members[j]);
            assert!(o.is_trivial(Word::product(&[&g, a, &g.inverse(), &b.inverse()]).letters()));
        }
    }
}

#[test]
fn m_vanishes_on_abelian_factors() {
    let e = common::engine(common::G2);
    let (o, t) = (e.oracle(), e.tables().unwrap());
    for s in ["", "x", "xxx", "xyyx", "a", "axA"] {
        assert_eq!(compute_m(o, t, &w(&e, s)).unwrap(), 0, "{s}");
    }
}

#[test]
fn s3_conjugator_bound_by_multiplication_table() {
    let table: Vec<Vec<usize>> = S3
        .lines()
        .filter_map(|l| l.strip_prefix("table "))
        .map(|l| l.split(' ').map(|x| x.parse().unwrap()).collect())
        .collect();
    let inv = |x: usize| (0..6).find(|&y| table[x][y] == 0).unwrap();
    // Every nonidentity element is a letter, so a conjugator has length 0 or 1.
    let mut worst = 0;
    for t1 in 0..6 {
        for t2 in 0..6 {
            let best = (0..6).filter(|&y| table[table[y][t1]][inv(y)] == t2).map(|y| usize::from(y != 0)).min();
            worst = worst.max(best.unwrap_or(0));
        }
    }
    let mut e = Engine::from_text(S3).unwrap();
    let t = e.precompute().unwrap();
    assert_eq!(t.k_i, vec![worst as u64]);
    assert_eq!(t.k_i, vec![1]);
    assert_eq!(t.b[0].len(), 6);
}

#[test]
fn zero_budget_is_reported() {
    let e = common::bare(common::G2);
    let mut profile = e.profile().clone();
    profile.element_budget = 0;
    assert!(matches!(precompute(e.oracle(), &profile), Err(Error::Budget { .. })));
    profile.element_budget = 5;
    assert!(matches!(enumerate_filtered_ball(e.oracle(), &profile, 3, 2), Err(Error::Budget { .. })));
}

#[test]
fn cache_round_trip_and_invalidation() {
    let e = common::engine(common::G3);
    let (o, p, t) = (e.oracle(), e.profile(), e.tables().unwrap());
    let mut bytes = Vec::new();
    t.write_to(&mut bytes).unwrap();
    let back = PrecomputedTables::read_from(&mut bytes.as_slice(), o, p).unwrap();
    assert_eq!(back.sizes(), t.sizes());
    assert_eq!(back.l5.members(), t.l5.members());
    assert_eq!(back.l88.members(), t.l88.members());
    let classes = |c: &relhyp::tables::ConjugacyClasses| -> HashMap<usize, usize> {
        (0..c.len()).map(|i| (i, c.class_of_member(i))).collect()
    };
    assert_eq!(classes(&back.l88), classes(&t.l88));

    let mut other = p.clone();
    other.c7 += 1;
    assert!(matches!(PrecomputedTables::read_from(&mut bytes.as_slice(), o, &other), Err(Error::Cache(_))));
    let g2 = common::bare(common::G2);
    assert!(matches!(PrecomputedTables::read_from(&mut bytes.as_slice(), g2.oracle(), p), Err(Error::Cache(_))));
    let mut corrupt = bytes.clone();
    corrupt[0] ^= 0xff;
    assert!(PrecomputedTables::read_from(&mut corrupt.as_slice(), o, p).is_err());
    assert!(PrecomputedTables::read_from(&mut &bytes[..bytes.len() / 2], o, p).is_err());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g3.tables");
    let mut fresh = common::bare(common::G3);
    assert_eq!(fresh.load_or_precompute(&path).unwrap(), relhyp::engine::TableSource::Built);
    let mut again = common::bare(common::G3);
    assert_eq!(again.load_or_precompute(&path).unwrap(), relhyp::engine::TableSource::Cache);
    assert_eq!(again.tables().unwrap().sizes(), t.sizes());
}

#[test]
fn profile_hash_tracks_every_field() {
    let base = ConstantsProfile::parse("delta=1 c2=2 c3=2 c7=2").unwrap();
    for line in ["delta=1 c2=2 c3=3 c7=2", "delta=1 c2=2 c3=2 c7=2 r4=3", "delta=1 c2=2 c3=2 c7=2 budget=7"] {
        assert_ne!(ConstantsProfile::parse(line).unwrap().hash(), base.hash(), "{line}");
    }
    assert_eq!(ConstantsProfile::parse(&base.to_line()).unwrap(), base);
}
