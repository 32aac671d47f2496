//! Subuniverse counting for finite join-semilattices and partial groupoids,
//! with the order-theoretic tooling around it: canonical forms, embeddings of
//! forbidden lattices, planarity checks and exhaustive enumeration.

pub mod order;
pub mod pgroupoid;
pub mod spec;
pub mod subcount;
pub mod catalog;
pub mod embed;
pub mod planarity;
pub mod enumerate;
pub mod verify;

pub use order::{JoinTable, OrderError, Poset};
pub use pgroupoid::PartialGroupoid;
pub use spec::{parse_spec, parse_specs, StructureSpec};
pub use subcount::{count_subuniverses, sigma, DyadicValue};
