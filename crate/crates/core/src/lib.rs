//! Exact computations for the mod-2 Steenrod algebra and unstable modules of
//! finite type: admissible-basis arithmetic, the nilpotent filtration and its
//! reduced layers, bar-complex Tor with Steenrod action, and a suite of
//! executable laws.

pub mod gf2;
pub mod laws;
pub mod modules;
pub mod nilfilt;
pub mod oracle;
pub mod parser;
pub mod steenrod;
pub mod tor;
