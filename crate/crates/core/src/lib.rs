//! Convex sets with a difference represented many times.
//!
//! A finite set of reals is convex when its consecutive gaps strictly
//! increase. For such a set no nonzero difference has more than
//! `floor(|A|/2)` representations, and [`construct::construct`] builds sets of
//! size `2m` reaching `m`. Everything is computed in exact arithmetic.

pub mod cli;
pub mod construct;
pub mod convex;
pub mod io;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod stats;

pub use construct::{construct, default_delta, glue, ConstructionResult, GluedResult};
pub use convex::{ConvexError, ConvexSet, GapSequence, Scalar};
pub use oracle::{search, verify_bound, witnesses, RepWitness, SearchOptions, SearchReport};
pub use rational::{lcm_of_denominators, Rational};
pub use stats::{diff_stats, max_rep_diff, rep_diff, rep_sum, rich_count, DiffStats};
