//! Exact computation for pattern avoidance in set partitions.
//!
//! A partition `sigma` of `[n]` contains a pattern `tau` of `[k]` when some
//! `k` elements of `sigma`, relabeled in increasing order, have exactly the
//! block structure of `tau`. This crate decides containment, counts the
//! avoiders `A_n(tau)` exactly, evaluates the growth exponent
//! `F_n(tau) = ln A_n / (n ln n)`, and provides the closed-form counts and
//! bounds used to audit those numbers.
//!
//! ```
//! use partavoid::{contains, count_avoiders, SetPartition};
//!
//! let host: SetPartition = "124/35".parse().unwrap();
//! let tau: SetPartition = "1/23".parse().unwrap();
//! assert!(contains(&host, &tau));
//!
//! let rec = count_avoiders(&"123".parse().unwrap(), 10).unwrap();
//! assert_eq!(rec.count, 9496u32.into());
//! ```

pub mod cache;
pub mod containment;
pub mod dacp;
pub mod enumeration;
pub mod formulas;
pub mod partition;

pub use containment::{
    contains, embed_into_permutation_partition, find_occurrence, layered_witness, ContainmentError,
    Embedding, Occurrence,
};
pub use dacp::{dacp_contains, from_dacp, to_dacp, Dacp, DacpError};
pub use enumeration::{
    count_avoiders, count_avoiders_oracle, count_avoiders_sequential, enumerate_avoiders, f_ratio,
    uniform_avoids, uniform_partitions, CountRecord, EnumerationError, GrowthReport, GrowthRow,
};
pub use formulas::LogBound;
pub use partition::{
    all_partitions, parse, IntervalCut, LayeredShape, ParseError, PartitionError, Permeability,
    SetPartition,
};
