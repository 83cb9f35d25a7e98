//! Realization theory for discrete-time linear switched systems.
//!
//! The crate covers simulation of switched systems, extraction of Markov
//! parameters from input-output maps, Hankel matrices indexed by mode words,
//! reachability and observability tests, minimization, and construction of
//! minimal realizations from Hankel data. The algorithms are carried out on
//! rational representations of families of formal power series
//! ([`rational_repr`]); [`bridge`] translates between the two views.

pub mod bridge;
pub mod error;
pub mod examples;
pub mod hankel;
pub mod lss_core;
pub mod lss_realization;
pub mod markov;
pub mod numerics;
#[cfg(any(test, feature = "testing"))]
pub mod oracle;
pub mod rational_repr;

pub use error::{Error, Result};
pub use hankel::{build_hankel, enumerate_words, hankel_rank, HankelBlockMatrix};
pub use lss_core::{
    check_morphism, io_map, word_matrix_product, HybridWord, IoMap, LssDims, LssMorphism, ModeWord,
    SwitchedLinearSystem,
};
pub use lss_realization::{
    algorithm_1, algorithm_1_from_markov, is_observable, is_span_reachable, lss_from_hankel, lss_isomorphism,
    minimize_lss,
};
pub use markov::{check_gcr, combined_markov, extract_markov, gcr_evaluate, MarkovFamily};
pub use numerics::DEFAULT_RANK_TOL;
pub use rational_repr::{RationalRepresentation, SeriesFamily};
