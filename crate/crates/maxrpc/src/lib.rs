//! Binary-CSP propagation and search built around max restricted path
//! consistency (maxRPC), a domain-filtering consistency stronger than arc
//! consistency: a value survives only if on every constraint it has a
//! compatible value whose pair is supported by a witness in every variable
//! closing a 3-clique with that constraint.
//!
//! The crate provides:
//!
//! - a compiled immutable [`network::ConstraintNetwork`] with trailed
//!   [`domain::DomainStore`] domains and counted constraint checks;
//! - the coarse-grained propagation engine ([`propagate::Session`]) with
//!   incremental and residual support tables, light variants, emulations of
//!   earlier algorithms, and an AC-3-with-residues baseline;
//! - fail-first ordering [`heuristics`] for the propagation list and the
//!   revision loops, with dom/wdeg constraint weighting;
//! - MAC-style backtracking [`search`] with binary or d-way branching;
//! - brute-force definitional [`oracle`]s for cross-checking;
//! - [`instance`] ingestion (native text, JSON, an XCSP 2.1 subset) and
//!   seeded generators for random, geometric, and queens instances.
//!
//! The `book/` directory of the repository walks through all of it; its code
//! snippets compile and run as doctests of this crate.

pub mod domain;
pub mod heuristics;
pub mod instance;
pub mod network;
pub mod oracle;
pub mod propagate;
pub mod search;
pub mod stats;
pub mod support;
pub mod trail;

pub use domain::DomainStore;
pub use heuristics::{HeuristicId, PropagationList, WeightTable};
pub use instance::{
    gen_geometric, gen_model_b, gen_queens, parse_native, parse_xcsp, serialize_native,
    GeometricParams, InstanceDoc, ModelBParams,
};
pub use network::{CmpOp, ConstraintNetwork, NetworkBuilder, Relation};
pub use propagate::{PropagatorConfig, Session, Variant};
pub use search::{
    count_solutions, solve, solve_with, verify_solution, Branching, SearchConfig, SearchMode,
    SearchResult, VarHeuristic, Verdict,
};
pub use stats::SolverStats;
pub use support::{StoreMode, SupportStore, NIL};

// The guide's code snippets double as doctests so the book can never drift
// from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/networks.md")]
    pub struct Networks;
    #[doc = include_str!("../../../book/src/domains-and-trail.md")]
    pub struct DomainsAndTrail;
    #[doc = include_str!("../../../book/src/consistency.md")]
    pub struct Consistency;
    #[doc = include_str!("../../../book/src/propagation.md")]
    pub struct Propagation;
    #[doc = include_str!("../../../book/src/heuristics.md")]
    pub struct Heuristics;
    #[doc = include_str!("../../../book/src/search.md")]
    pub struct Search;
    #[doc = include_str!("../../../book/src/formats.md")]
    pub struct Formats;
    #[doc = include_str!("../../../book/src/generators.md")]
    pub struct Generators;
    #[doc = include_str!("../../../book/src/benchmarking.md")]
    pub struct Benchmarking;
}
