//! Slow, direct reference implementations. Each oracle recomputes its answer
//! from raw inputs and shares no logic with the engine beyond data types.
//! `cases` holds the shared fixtures and random generators.

pub mod cases;
pub mod elasticity;
pub mod embed;
pub mod fsn;
pub mod kb;
pub mod query;
pub mod union_find;
