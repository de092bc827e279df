//! The book chapters from `book/`, included as rustdoc so that
//! `cargo test --doc` compiles and runs every code example in the guide.
//! If a chapter drifts from the library, the doc-tests fail.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/gamma-and-entropy.md")]
pub mod gamma_and_entropy {}

#[doc = include_str!("../../../book/src/estimator.md")]
pub mod estimator {}

#[doc = include_str!("../../../book/src/color-and-masks.md")]
pub mod color_and_masks {}

#[doc = include_str!("../../../book/src/benchmarks.md")]
pub mod benchmarks {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
