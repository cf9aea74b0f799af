//! Raft moves on partitions into distinct parts, and exact truncated
//! q-series checks of the generating-function identities they produce.

pub mod cli;
pub mod identities;
pub mod partitions;
pub mod rafts;
pub mod series;
