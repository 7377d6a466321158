//! Association rule mining over in-memory property graphs.
//!
//! A [`parser::MineRuleQuery`] names an anchor label plus body and head
//! patterns rooted at the anchor. [`miner::mine`] evaluates those patterns
//! against a [`graph::PropertyGraph`] and returns every rule whose support
//! and confidence clear the query thresholds. [`oracle`] is a slow
//! reference implementation used for cross-checking, and [`synthgen`]
//! builds seeded synthetic graphs.

pub mod graph;
pub mod matcher;
pub mod miner;
pub mod oracle;
pub mod parser;
pub mod rules;
pub mod synthgen;
