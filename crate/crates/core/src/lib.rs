//! Word and conjugacy problems in relatively hyperbolic groups.
//!
//! Elements are words over a partitioned alphabet `S = S_0 ∪ S_1 ∪ … ∪ S_m`
//! where `S_0` generates the "hyperbolic" part and each `S_i` generates a
//! parabolic subgroup `P_i` with its own solver. Words are shortened to
//! relative local geodesics in the coned-off Cayley graph, and conjugacy is
//! decided from precomputed tables parameterised by a constants profile.

pub mod conjugacy;
pub mod engine;
pub mod error;
pub mod group;
pub mod metric;
pub mod parabolic;
pub mod presentation;
pub mod shortening;
pub mod tables;
pub mod words;

pub use conjugacy::{classify, decide, search, Answer, ConjugacyCertificate, Verdict};
pub use engine::Engine;
pub use error::{Error, Result};
pub use group::Group;
pub use metric::{BallIndex, MetricOracle, QuasiGeodesicParams};
pub use presentation::{parse_presentation, LetterClass, RelativePresentation};
pub use shortening::{cyclic_shorten, shorten, word_problem};
pub use tables::{ConstantsProfile, PrecomputedTables};
pub use words::{Letter, Word};
