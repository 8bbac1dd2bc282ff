//! Translation of SUMO-K knowledge bases and queries into higher-order set theory,
//! emitted as THF0 problems, with a hereditarily finite evaluator for checking the
//! background identities.

pub mod ast;
pub mod guards;
pub mod hf;
pub mod host;
pub mod lower;
pub mod pipeline;
pub mod names;
pub mod sexpr;
pub mod signature;
pub mod th0;
pub mod translate;

pub use ast::{Rat, SumoFormula, SumoSpine, SumoTerm, VarSort};
pub use host::{HostTerm, HostType, Premise};
pub use signature::Signature;
pub use translate::{KbAssertion, KbTranslation, Problem, TranslateError, TranslateOptions};
