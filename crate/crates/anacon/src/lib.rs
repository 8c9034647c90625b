//! AnaCon: analysis of contracts written in restricted English.
//!
//! A contract is parsed from a controlled natural-language fragment into
//! the contract logic CL (obligations, prohibitions and permissions over a
//! synchronous action algebra, with reparations, conditionals and
//! exclusive choice). The clause set is then explored as an explicit-state
//! transition system to detect normative conflicts, and any conflict is
//! reported as a CL counter-example formula rendered back into restricted
//! English.
//!
//! Module layout:
//! - [`ast`]: action algebra and clause types, validation, normalization
//! - [`algebra`]: first-step decomposition and trace enumeration
//! - [`syntax`]: the symbolic CL concrete syntax (parser and printer)
//! - [`english`]: the restricted-English concrete syntax
//! - [`contract`]: contract files (dictionary, clauses, contradictions)
//! - [`engine`]: explicit-state conflict detection
//! - [`xml`]: XML import and export

pub mod algebra;
pub mod ast;
pub mod contract;
pub mod engine;
pub mod english;
pub mod syntax;
pub mod xml;

pub use ast::{ActionExpr, ActionStep, AtomicAction, Clause, CoreError, MutexRelation};
pub use contract::{parse_contract_file, validate, ContractDocument, Diagnostic, DiagnosticKind};
pub use engine::{
    build_and_check, check_clauses, report_to_english, ConflictKind, ConflictReport,
    ExploreConfig, Outcome,
};
pub use english::{linearize_re, parse_re, EnglishError};
pub use syntax::{parse_cl, print_cl, SyntaxError};
