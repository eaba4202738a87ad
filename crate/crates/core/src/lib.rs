//! A workbench for the monadic pi-calculus with match and mismatch.
//!
//! Agents are nominal terms ([`syntax`]) over interned names ([`nominal`]).
//! [`semantics`] enumerates late and early transitions, [`weak`] builds
//! tau-chains on top, and [`equivalence`] decides the bisimulation
//! equivalences on finite-state instances.

pub mod equivalence;
pub mod generate;
pub mod laws;
pub mod nominal;
pub mod parser;
pub mod semantics;
pub mod syntax;
pub mod weak;

pub use nominal::{Name, NameSet};
pub use parser::{parse_agent, print_agent, ParseError};
pub use syntax::Agent;
