//! Typed STRIPS subset behind the task planner: s-expression parser with
//! source positions, canonical pretty-printer, grounder, and closed-world
//! transition semantics. Supported requirements are `:strips`, `:typing`,
//! and `:negative-preconditions`.

pub mod ast;
pub mod ground;
pub mod parse;

pub use ast::{
    ActionSchema, Domain, GroundAtomText, GroundLiteralText, PredicateDecl, Problem, Span,
    TypedObj, TypedVar,
};
pub use ast::{print_domain, print_problem};
pub use ground::{Goal, GroundAction, GroundModel, SemanticsError, State};
pub use parse::{parse_domain, parse_problem, ParseError};

/// The shipped twelve-primitive disassembly domain.
pub const DOMAIN_TEXT: &str = include_str!("../../resources/bolt_domain.pddl");

/// Problem fixture: one bolt, matched sleeve, staging start.
pub const PROBLEM_SINGLE_BOLT: &str =
    include_str!("../../resources/problems/single_bolt.pddl");

/// Problem fixture: fifteen bolts across three service regions.
pub const PROBLEM_TASK3_FIFTEEN: &str =
    include_str!("../../resources/problems/task3_fifteen.pddl");

/// Parses the shipped domain. The file is validated by the test suite, so
/// failure here means the build is broken.
pub fn shipped_domain() -> Domain {
    parse_domain(DOMAIN_TEXT).expect("shipped domain parses")
}
