//! IO, file formats, and pipeline orchestration for OOV translation
//! disambiguation via lattice rescoring. The algorithms live in
//! `oovctx-core`; this crate adds everything that touches the filesystem
//! plus the `oovctx` command-line front end.

pub mod formats;
pub mod pipeline;
