//! Compositional open games.
//!
//! Games are built from player atoms, lifted functions and counits with
//! sequential composition and tensor, then searched for equilibria. The
//! [`dsl`] module reads the same diagrams from text.

pub mod combinators;
pub mod dsl;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod interface;
pub mod laws;
pub mod oracle;
pub mod profile_json;
pub mod stdgames;
pub mod strategy;
pub mod types;

pub use combinators::{
    boxed, braid, compose_seq, constant, copy, counit, delete, identity, lift_contravariant,
    lift_covariant, lift_player, lift_player_strands, tensor,
};
pub use equilibrium::{check_profile, diagnose, equilibria, ClosedGame, Diagnosis, SearchConfig};
pub use error::{Error, Result};
pub use game::{select, Continuation, Func, OpenGame, PlayerEvent, Quantifier, Selection, Variance};
pub use interface::{Dir, Interface, NormalInterface, Strand};
pub use strategy::{Profile, StrategySpace};
pub use types::{FiniteType, Scaled, Value};
