//! Edge-transitive cubic graphs from their amalgams.

pub mod catalog;
pub mod census;
pub mod classifier;
pub mod coset_enum;
pub mod covers;
pub mod fpcore;
pub mod graph;
pub mod graph_aut;
pub mod named;
pub mod normal_search;
pub mod perm;
pub mod permgroup;
pub mod smallgroups;
