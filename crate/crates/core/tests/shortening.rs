mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relhyp::shortening::{
    cyclic_shorten, is_cyclic_local_geodesic, is_local_geodesic, shorten, verify_conjugator, word_problem,
    Justification,
};
use relhyp::words::{reduced_words, split_syllables, SyllableKind};
use relhyp::{Engine, Error, QuasiGeodesicParams, Word};

use common::{bare, show, w};

fn random_words(e: &Engine, seed: u64, count: usize, max_len: usize) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = e.group().generator_count();
    (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            common::random_reduced(&mut rng, gens, len)
        })
        .collect()
}

/// `w^n = 1` for some `1 ≤ n ≤ 12`; covers every torsion element of the test groups.
fn has_finite_order(e: &Engine, w: &Word) -> bool {
    let mut power = w.clone();
    for _ in 0..12 {
        if e.oracle().is_trivial(power.letters()) {
            return true;
        }
        power = power.concat(w);
    }
    false
}

#[test]
fn torsion_has_no_cyclic_local_geodesic() {
    let e = bare(common::G3);
    for s in ["a", "A"] {
        assert!(!is_cyclic_local_geodesic(&e, &w(&e, s)).unwrap());
        assert!(has_finite_order(&e, &w(&e, s)));
    }
    assert!(is_cyclic_local_geodesic(&e, &w(&e, "ax")).unwrap());
    assert!(is_cyclic_local_geodesic(&e, &w(&e, "x")).unwrap());
}

#[test]
fn shorten_examples() {
    let f = bare(common::FREE2);
    assert_eq!(show(&f, &shorten(&f, &w(&f, "aAb")).unwrap().output), "b");
    let g = bare(common::G2);
    assert_eq!(show(&g, &shorten(&g, &w(&g, "xyX")).unwrap().output), "y");
    let out = shorten(&g, &w(&g, "axaAyA")).unwrap().output;
    assert_eq!(show(&g, &out), "axyA");
    assert!(is_local_geodesic(&g, &out).unwrap());
}

#[test]
fn word_problem_examples() {
    let g = bare(common::G2);
    assert!(word_problem(&g, &w(&g, "xyXY")).unwrap());
    assert!(!word_problem(&g, &w(&g, "axAX")).unwrap());
    assert!(word_problem(&g, &Word::empty()).unwrap());
}

#[test]
fn cyclic_examples() {
    let f = bare(common::FREE2);
    let r = cyclic_shorten(&f, &w(&f, "abA")).unwrap();
    assert_eq!((show(&f, &r.output), show(&f, &r.conjugator)), ("b".into(), "a".into()));
    let r = cyclic_shorten(&f, &w(&f, "ba")).unwrap();
    assert_eq!((show(&f, &r.output), show(&f, &r.conjugator)), ("ab".into(), "b".into()));
    // a·x·a⁻¹ is conjugate to x, so its cyclic form is the single component.
    let g = bare(common::G2);
    let r = cyclic_shorten(&g, &w(&g, "axA")).unwrap();
    assert_eq!((show(&g, &r.output), show(&g, &r.conjugator)), ("x".into(), "a".into()));
    assert!(g.oracle().brute_conjugate(&w(&g, "axA"), &w(&g, "x"), 2).unwrap().is_some());
}

#[test]
fn relator_windows_are_replaced() {
    let mut g3 = bare(common::G3);
    let r = shorten(&g3, &w(&g3, "xaax")).unwrap();
    assert_eq!(show(&g3, &r.output), "xAx");
    assert_eq!(r.steps.last().unwrap().justification, Justification::MetricReplacement);
    g3.precompute().unwrap();
    let r = shorten(&g3, &w(&g3, "xaax")).unwrap();
    assert_eq!(r.steps.last().unwrap().justification, Justification::TableReplacement);
    let mut no_fallback = bare(common::G3);
    no_fallback.set_fallback(false);
    assert!(matches!(shorten(&no_fallback, &w(&no_fallback, "xaax")), Err(Error::MissingTables)));
}

#[test]
fn word_problem_matches_normal_forms_exhaustively() {
    for (name, len) in [(common::FREE2, 8), (common::G2, 8), (common::G3, 6)] {
        let e = bare(name);
        for word in reduced_words(e.group().generator_count(), len) {
            assert_eq!(
                word_problem(&e, &word).unwrap(),
                e.oracle().is_trivial(word.letters()),
                "{name}: {}",
                show(&e, &word)
            );
        }
    }
}

#[test]
fn outputs_are_equal_local_geodesics() {
    for (name, seed) in [(common::FREE2, 1), (common::G2, 2), (common::G3, 3)] {
        let e = common::engine(name);
        let c2 = e.profile().c2 as usize;
        for word in random_words(&e, seed, 300, 10) {
            let out = shorten(&e, &word).unwrap().output;
            assert!(word_problem(&e, &word.concat(&out.inverse())).unwrap());
            assert!(is_local_geodesic(&e, &out).unwrap(), "{name}: {}", show(&e, &word));
            if !word.is_empty() {
                assert!(out.len() < c2 * word.len());
            }
        }
    }
}

#[test]
fn local_geodesics_are_quasi_geodesic_without_backtracking() {
    let e = bare(common::G3);
    let params = QuasiGeodesicParams::for_local_geodesics(e.profile().delta);
    let oracle = e.oracle();
    for word in random_words(&e, 4, 150, 7) {
        let out = shorten(&e, &word).unwrap().output;
        let syllables = split_syllables(e.group(), out.letters());
        let prefixes: Vec<Word> = (0..=syllables.len())
            .map(|i| out.prefix(syllables.get(i).map_or(out.len(), |s| s.start)))
            .collect();
        for i in 0..prefixes.len() {
            for j in i + 1..prefixes.len() {
                let d = oracle.relative_distance(prefixes[i].letters(), prefixes[j].letters()).unwrap();
                assert!(params.admits(j - i, d), "{}", show(&e, &out));
            }
        }
        for (i, a) in syllables.iter().enumerate() {
            for b in &syllables[i + 1..] {
                if let (SyllableKind::Parabolic(p), SyllableKind::Parabolic(q)) = (a.kind, b.kind) {
                    if p == q {
                        assert!(!oracle.same_coset(&out.prefix(a.start), &out.prefix(b.start), p));
                    }
                }
            }
        }
    }
}

#[test]
fn cyclic_shortening_contract() {
    for (name, seed) in [(common::FREE2, 5), (common::G2, 6), (common::G3, 7)] {
        let e = bare(name);
        for word in random_words(&e, seed, 300, 10) {
            let r = cyclic_shorten(&e, &word).unwrap();
            assert!(verify_conjugator(&e, &r.conjugator, &r.output, &word).unwrap());
            let cyclic = is_cyclic_local_geodesic(&e, &r.output).unwrap();
            assert!(cyclic || has_finite_order(&e, &r.output), "{name}: {}", show(&e, &word));
            assert!(r.iterations <= word.len());
        }
    }
}
