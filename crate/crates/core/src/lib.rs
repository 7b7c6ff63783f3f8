//! Max filtering: group-invariant features `x -> max_g <z, g x>`.

pub mod analysis;
pub mod calculus;
pub mod error;
pub mod filter;
pub mod graphs;
pub mod group;
pub mod groups;
pub mod linalg;
pub mod oracle;
pub mod pipeline;
pub mod rng;
pub mod templates;

pub use error::{Error, Result};
pub use filter::{filter_bank_apply, filter_bank_vectors, max_filter, quotient_distance, FilterResult};
pub use group::{EnumeratedGroup, GroupAction, GroupKind, PatchSpec, Witness};
pub use oracle::{brute_force_max_filter, brute_force_with, OracleConfig};
pub use templates::Template;
