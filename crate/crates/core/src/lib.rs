//! Nowhere-zero flows on signed graphs.

pub mod circuits;
pub mod cli;
pub mod error;
pub mod flows;
pub mod generators;
pub mod graph;
pub mod lemmas;
pub mod oracle;
pub mod sgf;
pub mod surgery;
pub mod theorem8;
