//! Toolkit for building aligned question-answer training corpora from
//! knowledge-base n-triple dumps and timed subtitle dialogues.
//!
//! The pipeline stages map onto the top-level modules:
//!
//! - [`ntriples`] — streaming parser for the N-Triples subset found in
//!   DBpedia Infobox Property dumps
//! - [`dbpedia`] — turns parsed triples into question-answer pairs
//! - [`subtitles`] — extracts question-answer dialogue pairs from
//!   OPUS-style timed subtitle documents
//! - [`bpe`] — byte pair encoding subword segmentation (learn / apply /
//!   decode)
//! - [`metrics`] — BLEU, BLEU-1, chrF and exact-match METEOR scoring with
//!   per-property aggregation
//! - [`corpus`] — dataset splitting, corpus statistics and a retrieval
//!   baseline answerer
//! - [`tsv`] — the tab-separated pair format shared by the stages
//!
//! The `qakit` binary (see [`cli`]) wires the stages into subcommands.

pub mod bpe;
pub mod cli;
pub mod corpus;
pub mod dbpedia;
pub mod metrics;
pub mod ntriples;
pub mod subtitles;
pub mod tsv;

pub use dbpedia::QaPair;
