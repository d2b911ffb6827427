//! Hashtag mining toolkit: tokenization, corpus indexing, co-occurrence
//! dictionaries, taxonomy-based evaluation, graph clustering and
//! maximum-entropy hashtag classification.

mod diskio;
mod extsort;

pub mod classifier;
pub mod cooccur;
pub mod corpus;
pub mod features;
pub mod hashgraph;
pub mod par;
pub mod seeding;
pub mod synthetic;
pub mod taxonomy;
pub mod tokenizer;

pub use par::Execution;
