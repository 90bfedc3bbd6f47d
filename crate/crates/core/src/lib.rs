//! Core algorithms for disambiguating OOV word translations in MT output.
//!
//! An MT hypothesis with untranslated out-of-vocabulary words is expanded
//! into a sausage lattice where each OOV slot fans out into candidate
//! translations drawn from external lexicons. The modules here score and
//! search those lattices with target-language context models:
//!
//! - [`pmi`]: count-based sentence completion via average pointwise mutual
//!   information with surrounding content words.
//! - [`graphrank`]: PageRank over a PMI-weighted word graph, with sentence-
//!   or document-level context.
//! - [`lm`]: a two-layer LSTM language model and an attentional
//!   document-context language model (DCLM), trained from scratch.
//! - [`rescore`]: document-level lattice rescoring with hidden-state path
//!   merging, plus an exhaustive oracle for small lattices.
//! - [`eval`]: corpus BLEU / unigram precision and the reference-enrichment
//!   and topline experiment constructions.
//!
//! The crate is `no_std` + `alloc`; all IO and file formats live in the
//! companion `oovctx` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corpus;
pub mod eval;
pub mod graphrank;
pub mod lattice;
pub mod lm;
pub mod pmi;
pub mod rescore;
pub mod rng;

mod math;
