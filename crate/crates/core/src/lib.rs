//! Compiles stateless firewall rule lists into firewall decision trees,
//! extracts whitelist and blacklist normal forms, and emits the policy as
//! DNF and CNF Boolean expressions over packet-header bits.
//!
//! The pipeline is
//!
//! 1. [`policy`]: parse an ordered rule list with a default action;
//! 2. [`tree`]: fold the rules into a decision tree, group adjacent
//!    siblings, and complete it with the default action;
//! 3. [`encoding`]: cover each edge interval by canonical bit prefixes;
//! 4. [`normal_form`] and [`dimacs`]: combine the covers along accept or
//!    deny paths into DNF or CNF and serialize them;
//! 5. [`oracle`]: enumerate the packet space to check any of the above
//!    against first-match semantics.

pub mod cli;
pub mod dimacs;
pub mod encoding;
pub mod error;
pub mod normal_form;
pub mod oracle;
pub mod policy;
pub mod tree;

pub use dimacs::{emit_dimacs, parse_dimacs, DimacsFile};
pub use encoding::{
    canonical_cover, encode_value, interval_to_terms, BitVariable, Literal, Prefix, PrefixCover,
};
pub use error::{
    ConfigError, DimacsError, EncodingError, FormError, OracleError, ParseError, ParseErrorKind,
    TreeError,
};
pub use normal_form::{
    bound_check, eval_expr, negate_dnf, tree_to_cnf, tree_to_dnf, BoundReport, Form, NormalFormExpr,
};
pub use oracle::{
    check_equivalence, check_implication, dnf_sat, enumerate_decisions, Budget, DecisionMap,
    Verdict,
};
pub use policy::{
    parse_policy, validate_policy, Action, FieldConfig, Interval, Packet, Policy, Rule, Violation,
};
pub use tree::{
    addrule, compile, CompiledPolicy, CompleteDecisionTree, DecisionTree, Edge, Node, TreeStats,
};
