//! Abstract syntax for the typed STRIPS subset: domains with typed
//! predicates and action schemas, problems with sorted objects, and the
//! canonical pretty-printer.

use std::fmt::Write;

/// Source position of a syntax node, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDef {
    pub name: String,
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedVar {
    pub name: String,
    pub sort: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedVar>,
    pub span: Span,
}

/// A term in a schema atom: a parameter reference or an object constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaAtom {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaLiteral {
    pub atom: SchemaAtom,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedVar>,
    pub precondition: Vec<SchemaLiteral>,
    pub add: Vec<SchemaAtom>,
    pub del: Vec<SchemaAtom>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: Vec<TypeDef>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Copy with all source spans zeroed, for structural comparison of
    /// domains from different textual sources.
    pub fn stripped(&self) -> Domain {
        let mut d = self.clone();
        for p in &mut d.predicates {
            p.span = Span::default();
        }
        for a in &mut d.actions {
            a.span = Span::default();
        }
        d
    }

    /// True when `child` is `ancestor` or descends from it in the type
    /// hierarchy. Every sort implicitly descends from `object`.
    pub fn is_subtype(&self, child: &str, ancestor: &str) -> bool {
        if child == ancestor || ancestor == "object" {
            return true;
        }
        let mut cur = child.to_string();
        for _ in 0..self.types.len() + 1 {
            let Some(def) = self.types.iter().find(|t| t.name == cur) else {
                return false;
            };
            match &def.parent {
                Some(p) if p == ancestor => return true,
                Some(p) => cur = p.clone(),
                None => return false,
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedObj {
    pub name: String,
    pub sort: String,
}

/// A ground atom in problem syntax: predicate applied to object names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAtomText {
    pub predicate: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundLiteralText {
    pub atom: GroundAtomText,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<TypedObj>,
    pub init: Vec<GroundAtomText>,
    pub goal: Vec<GroundLiteralText>,
}

// ---------------------------------------------------------------------------
// Canonical pretty-printer
// ---------------------------------------------------------------------------

fn fmt_typed_list(out: &mut String, vars: &[TypedVar]) {
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "?{} - {}", v.name, v.sort);
    }
}

fn fmt_schema_atom(out: &mut String, atom: &SchemaAtom) {
    let _ = write!(out, "({}", atom.predicate);
    for t in &atom.args {
        match t {
            Term::Var(v) => {
                let _ = write!(out, " ?{v}");
            }
            Term::Const(c) => {
                let _ = write!(out, " {c}");
            }
        }
    }
    out.push(')');
}

fn fmt_schema_literal(out: &mut String, lit: &SchemaLiteral) {
    if lit.negated {
        out.push_str("(not ");
        fmt_schema_atom(out, &lit.atom);
        out.push(')');
    } else {
        fmt_schema_atom(out, &lit.atom);
    }
}

/// Canonical textual form of a domain. Parsing the output yields a domain
/// equal to the input.
pub fn print_domain(d: &Domain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", d.name);
    let _ = write!(out, "  (:requirements");
    for r in &d.requirements {
        let _ = write!(out, " :{r}");
    }
    let _ = writeln!(out, ")");
    if !d.types.is_empty() {
        let _ = write!(out, "  (:types");
        for t in &d.types {
            match &t.parent {
                Some(p) => {
                    let _ = write!(out, " {} - {}", t.name, p);
                }
                None => {
                    let _ = write!(out, " {}", t.name);
                }
            }
        }
        let _ = writeln!(out, ")");
    }
    let _ = writeln!(out, "  (:predicates");
    for p in &d.predicates {
        let mut line = format!("    ({}", p.name);
        if !p.params.is_empty() {
            line.push(' ');
            fmt_typed_list(&mut line, &p.params);
        }
        line.push(')');
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "  )");
    for a in &d.actions {
        let _ = writeln!(out, "  (:action {}", a.name);
        let mut params = String::new();
        fmt_typed_list(&mut params, &a.params);
        let _ = writeln!(out, "    :parameters ({params})");
        let mut pre = String::from("(and");
        for lit in &a.precondition {
            pre.push(' ');
            fmt_schema_literal(&mut pre, lit);
        }
        pre.push(')');
        let _ = writeln!(out, "    :precondition {pre}");
        let mut eff = String::from("(and");
        for atom in &a.add {
            eff.push(' ');
            fmt_schema_atom(&mut eff, atom);
        }
        for atom in &a.del {
            eff.push_str(" (not ");
            fmt_schema_atom(&mut eff, atom);
            eff.push(')');
        }
        eff.push(')');
        let _ = writeln!(out, "    :effect {eff}");
        let _ = writeln!(out, "  )");
    }
    let _ = writeln!(out, ")");
    out
}

/// Canonical textual form of a problem.
pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", p.name);
    let _ = writeln!(out, "  (:domain {})", p.domain_name);
    let _ = writeln!(out, "  (:objects");
    for o in &p.objects {
        let _ = writeln!(out, "    {} - {}", o.name, o.sort);
    }
    let _ = writeln!(out, "  )");
    let _ = writeln!(out, "  (:init");
    for a in &p.init {
        let mut line = format!("    ({}", a.predicate);
        for arg in &a.args {
            let _ = write!(line, " {arg}");
        }
        line.push(')');
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "  )");
    let _ = write!(out, "  (:goal (and");
    for g in &p.goal {
        out.push(' ');
        if g.negated {
            out.push_str("(not ");
        }
        let _ = write!(out, "({}", g.atom.predicate);
        for arg in &g.atom.args {
            let _ = write!(out, " {arg}");
        }
        out.push(')');
        if g.negated {
            out.push(')');
        }
    }
    let _ = writeln!(out, "))");
    let _ = writeln!(out, ")");
    out
}
