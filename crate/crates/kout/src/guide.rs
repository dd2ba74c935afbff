//! The user guide, one module per book chapter.
//!
//! Each module's documentation is included verbatim from `book/src/`, so
//! the rendered rustdoc matches the mdbook and, more importantly, every
//! code block in the book runs as a doc-test. A book edit that breaks the
//! API fails `cargo test --doc` instead of rotting quietly.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}

#[doc = include_str!("../../../book/src/coupling.md")]
pub mod coupling {}

#[doc = include_str!("../../../book/src/matchings.md")]
pub mod matchings {}

#[doc = include_str!("../../../book/src/multiplicities.md")]
pub mod multiplicities {}

#[doc = include_str!("../../../book/src/splitting.md")]
pub mod splitting {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
