//! `relhyp`: word problem, classification and conjugacy queries for
//! relatively hyperbolic groups given by a presentation file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use relhyp::conjugacy::{bounded_class, crosscheck, decide, Answer, Verdict};
use relhyp::shortening::{shorten, word_problem};
use relhyp::tables::ConstantsProfile;
use relhyp::{classify, Engine, Error, Group, Word};

#[derive(Parser)]
#[command(name = "relhyp", version, about = "Word and conjugacy problems in relatively hyperbolic groups")]
struct Cli {
    /// Constants profile file (`key=value` tokens); replaces the presentation's constants block.
    #[arg(long, global = true)]
    profile: Option<PathBuf>,
    /// Table cache file; reused when it matches the presentation and profile, rebuilt otherwise.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Print one JSON object instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled pairs in `crosscheck --sample`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Append wall-clock time (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a word is trivial.
    Wp { presentation: PathBuf, word: String },
    /// Classify an element as hyperbolic or parabolic.
    Classify { presentation: PathBuf, word: String },
    /// Decide whether two elements are conjugate.
    Conj {
        presentation: PathBuf,
        u: String,
        v: String,
        /// Also print the conjugating element.
        #[arg(long)]
        search: bool,
    },
    /// Build the precomputed tables and print their sizes.
    Precompute {
        presentation: PathBuf,
        /// Where to write the cache (defaults to --cache).
        output: Option<PathBuf>,
    },
    /// Compare the conjugacy decision with exhaustive search on all pairs
    /// of elements of Γ-length at most `max_len`.
    Crosscheck {
        presentation: PathBuf,
        max_len: usize,
        /// Γ-radius of the exhaustive conjugator search (default max_len + 1).
        #[arg(long)]
        radius: Option<usize>,
        /// Check this many words chosen with --seed instead of all of them.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Elements of the Γ-ball of radius `n` conjugate to a word.
    BoundedClass { presentation: PathBuf, word: String, n: usize },
}

type Record = Vec<(&'static str, String)>;

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_engine(cli: &Cli, path: &Path, tables: bool) -> Result<Engine, Error> {
    let group = Group::from_text(&read(path)?)?;
    let profile = match &cli.profile {
        Some(p) => ConstantsProfile::parse(&read(p)?)?,
        None => ConstantsProfile::from_constants(&group.presentation().constants)?,
    };
    let mut engine = Engine::new(std::sync::Arc::new(group), profile)?;
    if tables {
        match &cli.cache {
            Some(c) => {
                engine.load_or_precompute(c)?;
            }
            None => {
                engine.precompute()?;
            }
        }
    }
    Ok(engine)
}

fn fmt(e: &Engine, w: &Word) -> String {
    e.group().format_word(w)
}

/// The record and whether the command succeeded; a crosscheck with
/// disagreements still prints its record.
fn run(cli: &Cli) -> Result<(Record, bool), Error> {
    let mut rec: Record = Vec::new();
    let mut ok = true;
    match &cli.command {
        Command::Wp { presentation, word } => {
            let e = load_engine(cli, presentation, false)?;
            let w = e.group().parse_word(word)?;
            rec.push(("command", "wp".into()));
            rec.push(("trivial", word_problem(&e, &w)?.to_string()));
            rec.push(("shortened", fmt(&e, &shorten(&e, &w)?.output)));
        }
        Command::Classify { presentation, word } => {
            let e = load_engine(cli, presentation, true)?;
            let w = e.group().parse_word(word)?;
            let c = classify(&e, &w)?;
            rec.push(("command", "classify".into()));
            rec.push(("identity", c.trivial.to_string()));
            match &c.verdict {
                Verdict::Hyperbolic => rec.push(("verdict", "hyperbolic".into())),
                Verdict::Parabolic { index, representative, conjugator } => {
                    rec.push(("verdict", "parabolic".into()));
                    rec.push(("index", index.to_string()));
                    rec.push(("representative", fmt(&e, representative)));
                    rec.push(("conjugator", fmt(&e, conjugator)));
                }
            }
            rec.push(("cyclic_form", fmt(&e, &c.cyclic.output)));
        }
        Command::Conj { presentation, u, v, search } => {
            let e = load_engine(cli, presentation, true)?;
            let (wu, wv) = (e.group().parse_word(u)?, e.group().parse_word(v)?);
            let c = decide(&e, &wu, &wv)?;
            rec.push(("command", "conj".into()));
            match &c.answer {
                Answer::Conjugate(g) => {
                    rec.push(("conjugate", "true".into()));
                    if *search {
                        rec.push(("witness", fmt(&e, g)));
                    }
                }
                Answer::NotConjugate(reason) => {
                    rec.push(("conjugate", "false".into()));
                    rec.push(("reason", reason.to_string()));
                }
            }
            rec.push(("regime", c.regime.to_string()));
            rec.push(("l_bar", c.l_bar.to_string()));
            rec.push(("l", c.l.to_string()));
            rec.push(("profile_hash", format!("{:016x}", c.profile_hash)));
            rec.push(("verified", c.verified.to_string()));
        }
        Command::Precompute { presentation, output } => {
            let mut e = load_engine(cli, presentation, false)?;
            rec.push(("command", "precompute".into()));
            match output.as_ref().or(cli.cache.as_ref()) {
                Some(path) => {
                    let source = e.load_or_precompute(path)?;
                    rec.push(("cache", path.display().to_string()));
                    rec.push(("source", format!("{source:?}").to_lowercase()));
                }
                None => {
                    e.precompute()?;
                }
            }
            let t = e.require_tables()?;
            for (name, size) in t.sizes() {
                rec.push((name, size.to_string()));
            }
            let k_i: Vec<String> = t.k_i.iter().map(u64::to_string).collect();
            rec.push(("k_i", k_i.join(",")));
            rec.push(("k_4delta", t.k_4delta.to_string()));
            rec.push(("profile_hash", format!("{:016x}", t.profile_hash)));
        }
        Command::Crosscheck { presentation, max_len, radius, sample } => {
            let e = load_engine(cli, presentation, true)?;
            let mut words = e.oracle().ball(*max_len)?.words().to_vec();
            if let Some(n) = sample {
                words = sample_words(words, *n, cli.seed);
            }
            let r = crosscheck(&e, &words, radius.unwrap_or(max_len + 1))?;
            rec.push(("command", "crosscheck".into()));
            rec.push(("words", r.words.to_string()));
            rec.push(("pairs", r.pairs.to_string()));
            rec.push(("both_conjugate", r.both_conjugate.to_string()));
            rec.push(("both_not", r.both_not.to_string()));
            rec.push(("decide_only", r.decide_only.to_string()));
            rec.push(("brute_only", r.brute_only.to_string()));
            rec.push(("unverified", r.unverified.to_string()));
            rec.push(("agreement", format!("{}/{}", r.agreeing(), r.pairs)));
            if let Some((u, v)) = &r.first_disagreement {
                rec.push(("counterexample", format!("{},{}", fmt(&e, u), fmt(&e, v))));
            }
            ok = r.all_agree();
        }
        Command::BoundedClass { presentation, word, n } => {
            let e = load_engine(cli, presentation, true)?;
            let w = e.group().parse_word(word)?;
            rec.push(("command", "bounded-class".into()));
            let class = bounded_class(&e, &w, *n)?;
            rec.push(("size", class.len().to_string()));
            for (x, g) in class {
                rec.push(("member", format!("{},{}", fmt(&e, &x), fmt(&e, &g))));
            }
        }
    }
    Ok((rec, ok))
}

/// Deterministic sample of `n` words (splitmix64 on the seed).
fn sample_words(mut words: Vec<Word>, n: usize, seed: u64) -> Vec<Word> {
    let mut state = seed;
    let mut next = || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    let n = n.min(words.len());
    for i in 0..n {
        let j = i + (next() % (words.len() - i) as u64) as usize;
        words.swap(i, j);
    }
    words.truncate(n);
    words
}

fn print(cli: &Cli, status: &str, rec: &Record) {
    if cli.json {
        let mut obj = serde_json::Map::new();
        obj.insert("status".into(), status.into());
        for (k, v) in rec {
            match obj.get_mut(*k) {
                Some(serde_json::Value::Array(a)) => a.push(v.clone().into()),
                Some(prev) => *prev = serde_json::Value::Array(vec![prev.clone(), v.clone().into()]),
                None => {
                    obj.insert((*k).into(), v.clone().into());
                }
            }
        }
        println!("{}", serde_json::Value::Object(obj));
    } else {
        println!("status={status}");
        for (k, v) in rec {
            println!("{k}={v}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    let elapsed = || ("elapsed_ms", format!("{:.3}", start.elapsed().as_secs_f64() * 1e3));
    match result {
        Ok((mut rec, ok)) => {
            if cli.timing {
                rec.push(elapsed());
            }
            print(&cli, if ok { "ok" } else { "disagreement" }, &rec);
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            let mut rec: Record = vec![("error", e.kind().to_string()), ("message", e.to_string())];
            if cli.timing {
                rec.push(elapsed());
            }
            print(&cli, "error", &rec);
            ExitCode::FAILURE
        }
    }
}
