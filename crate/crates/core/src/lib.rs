//! Proof kernel and toolkit for the connexive logic C and its extensions
//! C3, MC and CN: formulas, sequent calculi with a checker and a decision
//! procedure, natural deduction with detour reduction, translations between
//! the two proof formats, and the `~`-eliminating embedding into positive
//! intuitionistic logic with Peirce's rule.

pub mod bridge;
pub mod cli;
pub mod embedding;
pub mod formula;
pub mod natded;
pub mod prover;
pub mod random;
pub mod reduction;
pub mod sequent;

pub use formula::{parse, print, Atom, Formula, ParseError};
pub use sequent::{check_proof, parse_sequent, CalculusId, RuleId, Sequent, SequentProof};
