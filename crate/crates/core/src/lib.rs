//! Decision procedures for da Costa's C_n, mbCcl and Cila: row-branching
//! truth tables over restricted multialgebras, bivaluation checking, and
//! labelled tableaux.

pub mod algebra;
pub mod axioms;
pub mod bivaluation;
pub mod formula;
pub mod gen;
pub mod tableau;
pub mod truthtable;
pub mod valuation;

pub use algebra::{Multialgebra, Snapshot, ValueSet};
pub use formula::{parse, Connective, Formula, Logic, ParseError};
pub use tableau::{prove, prove_with, ProofResult, ProveOptions};
pub use truthtable::{build_table, decide, decide_with, DecisionResult, TableOptions, TruthTable, Verdict};
pub use valuation::Valuation;
