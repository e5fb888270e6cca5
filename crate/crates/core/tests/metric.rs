mod common;

use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relhyp::metric::BallIndex;
use relhyp::{Error, Letter, MetricOracle, QuasiGeodesicParams, Word};

fn free() -> MetricOracle {
    common::oracle(&common::data(common::FREE2))
}

fn g2() -> MetricOracle {
    common::oracle(&common::data(common::G2))
}

fn parse(o: &MetricOracle, s: &str) -> Word {
    o.group().parse_word(s).unwrap()
}

/// Elements of Z * Z² of word length exactly n, by counting syllable normal
/// forms: a-syllables a^k (2 of each length l ≥ 1) alternate with
/// Z²-syllables (4l of each length l ≥ 1).
fn free_product_sphere(n: usize) -> u64 {
    // ends[t][len]: normal forms of length len ending in a syllable of type t.
    let mut ends = vec![[0u64; 2]; n + 1];
    let mut total = vec![0u64; n + 1];
    total[0] = 1;
    for len in 1..=n {
        for l in 1..=len {
            let before_any = if len == l { 1 } else { 0 };
            ends[len][0] += 2 * (ends[len - l][1] + before_any);
            ends[len][1] += 4 * l as u64 * (ends[len - l][0] + before_any);
        }
        total[len] = ends[len][0] + ends[len][1];
    }
    total[n]
}

#[test]
fn ball_sizes_match_counting_formulas() {
    let f = free();
    for r in 0..=6 {
        let expected = 1 + 2 * (3u64.pow(r as u32) - 1);
        assert_eq!(f.ball(r).unwrap().len() as u64, expected, "free r = {r}");
    }
    let g = g2();
    for r in 0..=5 {
        let expected: u64 = (0..=r).map(free_product_sphere).sum();
        assert_eq!(g.ball(r).unwrap().len() as u64, expected, "G2 r = {r}");
    }
    assert_eq!(g.ball(1).unwrap().len(), 7);
}

#[test]
fn relative_length_examples() {
    let g = g2();
    assert_eq!(g.relative_length(parse(&g, "xxx").letters()).unwrap(), 1);
    assert_eq!(g.relative_length(parse(&g, "axxa").letters()).unwrap(), 3);
    assert_eq!(g.relative_length(&[]).unwrap(), 0);
    let g3 = common::oracle(&common::data(common::G3));
    // aa = A in Z/3, so a·a·x is a two-syllable element.
    assert_eq!(g3.relative_length(parse(&g3, "aax").letters()).unwrap(), 2);
}

#[test]
fn relative_geodesic_examples() {
    let g = g2();
    assert!(g.is_relative_geodesic(parse(&g, "axa").letters()).unwrap());
    assert!(!g.is_relative_geodesic(&g.group().parse_letters("xyX").unwrap()).unwrap());
    assert!(g.is_relative_geodesic(&[]).unwrap());
}

#[test]
fn brute_conjugate_examples() {
    let f = free();
    let found = f.brute_conjugate(&parse(&f, "ab"), &parse(&f, "ba"), 2).unwrap();
    assert_eq!(f.group().format_word(&found.unwrap()), "A");
    assert_eq!(f.brute_conjugate(&parse(&f, "a"), &parse(&f, "b"), 4).unwrap(), None);
    let g = g2();
    assert_eq!(g.brute_conjugate(&parse(&g, "x"), &parse(&g, "x"), 0).unwrap(), Some(Word::empty()));
}

#[test]
fn estimators() {
    // Trees and the coned-off graphs of these free products (block graphs
    // of cliques) have vertex-thin triangles.
    assert_eq!(free().estimate_delta(3).unwrap(), 0);
    assert_eq!(g2().estimate_delta(2).unwrap(), 0);
    assert_eq!(g2().estimate_delta(0).unwrap(), 0);
    let p = QuasiGeodesicParams::new(Ratio::from_integer(2), Ratio::from_integer(0)).unwrap();
    assert_eq!(free().estimate_bcp(p, 3).unwrap(), 0);
    // A path between two points of a free product must cross the same
    // cosets as any other, so no component is isolated.
    assert_eq!(g2().estimate_bcp(p, 3).unwrap(), 0);
    assert_eq!(g2().estimate_bcp(p, 0).unwrap(), 0);
    assert!(QuasiGeodesicParams::new(Ratio::new(1, 2), Ratio::from_integer(0)).is_err());
}

#[test]
fn budget_is_enforced() {
    let o = MetricOracle::new(free().group_arc(), 10).unwrap();
    assert!(matches!(o.ball(2), Err(Error::Budget { limit: 10, .. })));
}

#[test]
fn ball_cache_round_trip() {
    let g = g2();
    let ball = g.ball(3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.bin");
    ball.save(&path).unwrap();
    let back = BallIndex::load(&path, &g).unwrap();
    assert_eq!(back.words(), ball.words());
    assert!(matches!(BallIndex::load(&path, &free()), Err(Error::Cache(_))));
}

#[test]
fn relative_distance_triangle_inequality() {
    let g = common::oracle(&common::data(common::G3));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let [a, b, c] = [0, 1, 2].map(|_| {
            let len = rand::Rng::gen_range(&mut rng, 0..4);
            common::random_reduced(&mut rng, 3, len)
        });
        let d = |x: &Word, y: &Word| g.relative_distance(x.letters(), y.letters()).unwrap();
        assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        assert_eq!(d(&a, &b), d(&b, &a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn brute_conjugacy_is_symmetric(u in prop::collection::vec(0u16..6, 0..4), v in prop::collection::vec(0u16..6, 0..4)) {
        let g = g2();
        let u = Word::from_letters(u.into_iter().map(Letter::from_code));
        let v = Word::from_letters(v.into_iter().map(Letter::from_code));
        let there = g.brute_conjugate(&u, &v, 4).unwrap();
        let back = g.brute_conjugate(&v, &u, 4).unwrap();
        prop_assert_eq!(there.is_some(), back.is_some());
        if let Some(t) = there {
            prop_assert!(g.equal(u.conjugate_by(&t).letters(), v.letters()));
        }
    }

    #[test]
    fn relative_length_at_most_syllable_count(codes in prop::collection::vec(0u16..6, 0..10)) {
        let g = g2();
        let w = Word::from_letters(codes.into_iter().map(Letter::from_code));
        let d = relhyp::words::decompose(g.group(), &w);
        let rel = g.relative_length(w.letters()).unwrap();
        prop_assert!(rel <= d.relative_length());
        prop_assert_eq!(rel == d.relative_length(), g.is_relative_geodesic(d.word().letters()).unwrap());
    }
}
