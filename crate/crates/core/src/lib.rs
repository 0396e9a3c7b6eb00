//! Injective encodings of first-order inductive datatypes into the natural
//! numbers, with partial decoders, enumerators and a law checker.
//!
//! Definitions are written in a small `Inductive` language
//! ([`syntax::parse_program`]), validated into constructor signatures
//! ([`syntax::ConstrsType`]) and compiled into codecs
//! ([`compile::compile_source`]). Every compiled type can in turn be used as
//! a base type of later definitions.
//!
//! ```
//! use indcount::{compile_source, decode, encode, parse_term, PairingScheme, Registry};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let src = "Inductive boollist := BCons : bool -> boollist -> boollist | BNil : boollist.
//!            Inductive stack := Push : boollist -> stack -> stack | Empty : stack.";
//! let comp = compile_source(src, Registry::builtin(), PairingScheme::Compact)?;
//! let stack = &comp.get("stack").unwrap().as_ref().unwrap().config;
//! let t = parse_term("(Push (BCons true BNil) Empty)", stack.constrs(), stack.registry())?;
//! let code = encode(&t, stack)?;
//! assert_eq!(decode(&code, stack), Some(t));
//! # Ok(())
//! # }
//! ```

pub mod codec;
pub mod compile;
pub mod countability;
pub mod enumerate;
pub mod registry;
pub mod selftest;
pub mod syntax;
pub mod term;

/// Codes and base values.
pub type Nat = num_bigint::BigUint;

pub use codec::{decode, encode, encode_rank, encode_simple, CodecConfig, CodecError};
pub use compile::{compile_program, compile_source, Compilation, CompiledType};
pub use countability::{Encoder, PairingScheme};
pub use enumerate::{count_upto_rank, enumerate_upto_rank, EnumBudget};
pub use registry::{BaseCodec, Cardinality, Registry};
pub use syntax::{parse_program, ConstrsType};
pub use term::{parse_term, rank, render_term, Term};
