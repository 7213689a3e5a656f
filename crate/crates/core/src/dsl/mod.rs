//! The `.og` game description language.
//!
//! ```text
//! program  := decl* "diagram" "=" expr
//! decl     := "type" NAME "=" type
//!           | "param" NAME "=" number
//!           | "fun" NAME "(" [NAME ":" type {"," NAME ":" type}] ")" "->" type {"," type} "=" body
//!           | "player" NAME ":" type {"," type} "->" type selection
//!           | "let" NAME "=" expr
//! body     := fexpr | "table" "{" row {";" row} "}"
//! row      := [fexpr {"," fexpr}] "=>" fexpr {"," fexpr}
//! selection:= "argmax" | "prefer" "(" type ")" | "fixpoint" | "match"
//! type     := "unit" | "real" | "{" NAME {"," NAME} "}" | "{" number {"," number} "}"
//!           | "int" "(" num "," num ")" | "grid" "(" num "," num "," num ")"
//!           | "(" type {"," type} ")" | "list" "(" type "," num ")" | NAME
//! expr     := term {">>" term}
//! term     := factor {"||" factor}
//! factor   := "(" expr ")" | atom ["^" "*"]
//! atom     := "copy" "[" type "]" | "delete" "[" type "]" | "counit" "[" type "]"
//!           | "cup" "[" type "]" | "id" "[" strands "]"
//!           | "braid" "[" index {"," index} ";" strands "]"
//!           | "const" "(" fexpr ":" type ")" | NAME
//! strands  := [type ["*"] {"," type ["*"]}]
//! ```
//!
//! `G >> H` places `H` below `G`; `G || H` places them side by side. A `*`
//! after a strand type marks an upward (coutility) strand. `^*` lifts a
//! function contravariantly. `cup` and `counit[..]^*` bend a string upwards
//! and are always rejected.

pub mod ast;
mod check;
mod dot;
mod expr;
mod lexer;
mod parser;
mod printer;

pub use check::{typecheck, Checked, Typed, TypedKind};
pub use dot::export_dot;
pub use parser::parse;
pub use printer::{fexpr as print_fexpr, print};

use crate::error::Result;
use crate::game::OpenGame;

/// Parses and typechecks a source text.
pub fn load(src: &str, params: &[(String, String)]) -> Result<Checked> {
    typecheck(&parse(src)?, params)
}

/// Parses, typechecks and elaborates a source text.
pub fn elaborate(src: &str, params: &[(String, String)]) -> Result<OpenGame> {
    load(src, params)?.elaborate()
}
