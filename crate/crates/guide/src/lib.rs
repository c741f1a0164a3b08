//! Book chapters compiled as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/townes.md")]
pub mod townes {}

#[doc = include_str!("../../../book/src/phase-diagram.md")]
pub mod phase_diagram {}

#[doc = include_str!("../../../book/src/fields.md")]
pub mod fields {}

#[doc = include_str!("../../../book/src/minimizing.md")]
pub mod minimizing {}

#[doc = include_str!("../../../book/src/blowup.md")]
pub mod blowup {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
