//! S-expression lexer and parser for the domain/problem subset. Every
//! error carries the 1-based line and column where it was detected.

use thiserror::Error;

use super::ast::*;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: illegal character {ch:?}")]
    IllegalChar { ch: char, line: u32, col: u32 },
    #[error("{line}:{col}: unbalanced parentheses: {detail}")]
    Unbalanced {
        detail: &'static str,
        line: u32,
        col: u32,
    },
    #[error("{line}:{col}: unknown requirement :{name}")]
    UnknownRequirement { name: String, line: u32, col: u32 },
    #[error("{line}:{col}: undeclared predicate {name}")]
    UndeclaredPredicate { name: String, line: u32, col: u32 },
    #[error("{line}:{col}: unknown sort {name}")]
    UnknownSort { name: String, line: u32, col: u32 },
    #[error("{line}:{col}: predicate {name} expects {expected} arguments, got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
        line: u32,
        col: u32,
    },
    #[error("{line}:{col}: variable ?{name} not bound by the parameter list")]
    UnboundVariable { name: String, line: u32, col: u32 },
    #[error("{line}:{col}: atom appears in both add and delete effects: {name}")]
    ConflictingEffect { name: String, line: u32, col: u32 },
    #[error("{line}:{col}: duplicate definition of {name}")]
    Duplicate { name: String, line: u32, col: u32 },
    #[error("{line}:{col}: expected {what}")]
    Expected {
        what: &'static str,
        line: u32,
        col: u32,
    },
    #[error("problem references domain {referenced}, but {actual} was supplied")]
    DomainMismatch { referenced: String, actual: String },
}

// ---------------------------------------------------------------------------
// Lexer / s-expression reader
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum Sexpr {
    Atom(String, Span),
    List(Vec<Sexpr>, Span),
}

impl Sexpr {
    fn span(&self) -> Span {
        match self {
            Sexpr::Atom(_, s) | Sexpr::List(_, s) => *s,
        }
    }
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '?' | ':' | '.' | '=')
}

fn read_sexprs(text: &str) -> Result<Vec<Sexpr>, ParseError> {
    let mut stack: Vec<(Vec<Sexpr>, Span)> = Vec::new();
    let mut top: Vec<Sexpr> = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 0;
    let mut chars = text.chars().peekable();

    while let Some(c) = chars.next() {
        col += 1;
        match c {
            '\n' => {
                line += 1;
                col = 0;
            }
            ';' => {
                for c2 in chars.by_ref() {
                    if c2 == '\n' {
                        line += 1;
                        col = 0;
                        break;
                    }
                }
            }
            '(' => stack.push((Vec::new(), Span { line, col })),
            ')' => match stack.pop() {
                Some((items, span)) => {
                    let node = Sexpr::List(items, span);
                    match stack.last_mut() {
                        Some((parent, _)) => parent.push(node),
                        None => top.push(node),
                    }
                }
                None => {
                    return Err(ParseError::Unbalanced {
                        detail: "closing parenthesis without opener",
                        line,
                        col,
                    })
                }
            },
            c if c.is_whitespace() => {}
            c if is_symbol_char(c) => {
                let start_col = col;
                let mut sym = String::new();
                sym.push(c);
                while let Some(&c2) = chars.peek() {
                    if is_symbol_char(c2) {
                        sym.push(c2);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let node = Sexpr::Atom(
                    sym.to_ascii_lowercase(),
                    Span {
                        line,
                        col: start_col,
                    },
                );
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
            other => return Err(ParseError::IllegalChar { ch: other, line, col }),
        }
    }
    if let Some((_, span)) = stack.pop() {
        return Err(ParseError::Unbalanced {
            detail: "unclosed parenthesis",
            line: span.line,
            col: span.col,
        });
    }
    Ok(top)
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn atom_str(s: &Sexpr, what: &'static str) -> Result<(String, Span), ParseError> {
    match s {
        Sexpr::Atom(a, span) => Ok((a.clone(), *span)),
        Sexpr::List(_, span) => Err(ParseError::Expected {
            what,
            line: span.line,
            col: span.col,
        }),
    }
}

/// Parses `name1 name2 - sort name3 - sort2 ...`; names without a trailing
/// sort default to `object`.
fn parse_typed_names(items: &[Sexpr]) -> Result<Vec<(String, String, Span)>, ParseError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Span)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let (tok, span) = atom_str(&items[i], "name or sort marker")?;
        if tok == "-" {
            i += 1;
            let Some(next) = items.get(i) else {
                return Err(ParseError::Expected {
                    what: "sort name after '-'",
                    line: span.line,
                    col: span.col,
                });
            };
            let (sort, _) = atom_str(next, "sort name")?;
            for (name, nspan) in pending.drain(..) {
                out.push((name, sort.clone(), nspan));
            }
        } else {
            pending.push((tok, span));
        }
        i += 1;
    }
    for (name, nspan) in pending {
        out.push((name, "object".to_string(), nspan));
    }
    Ok(out)
}

fn expect_section<'a>(
    list: &'a [Sexpr],
    keyword: &str,
) -> Option<&'a [Sexpr]> {
    for item in list {
        if let Sexpr::List(items, _) = item {
            if let Some(Sexpr::Atom(head, _)) = items.first() {
                if head == keyword {
                    return Some(&items[1..]);
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Domain parsing
// ---------------------------------------------------------------------------

const SUPPORTED_REQUIREMENTS: [&str; 3] = ["strips", "typing", "negative-preconditions"];

/// Parses a domain definition, checking declarations, arities, sorts, and
/// effect consistency.
pub fn parse_domain(text: &str) -> Result<Domain, ParseError> {
    let top = read_sexprs(text)?;
    let Some(Sexpr::List(items, span)) = top.first() else {
        return Err(ParseError::Expected {
            what: "(define (domain ...) ...)",
            line: 1,
            col: 1,
        });
    };
    let mut it = items.iter();
    match it.next() {
        Some(Sexpr::Atom(d, _)) if d == "define" => {}
        _ => {
            return Err(ParseError::Expected {
                what: "define",
                line: span.line,
                col: span.col,
            })
        }
    }
    let name = match it.next() {
        Some(Sexpr::List(hd, _)) if hd.len() == 2 => match (&hd[0], &hd[1]) {
            (Sexpr::Atom(k, _), Sexpr::Atom(n, _)) if k == "domain" => n.clone(),
            _ => {
                return Err(ParseError::Expected {
                    what: "(domain NAME)",
                    line: span.line,
                    col: span.col,
                })
            }
        },
        _ => {
            return Err(ParseError::Expected {
                what: "(domain NAME)",
                line: span.line,
                col: span.col,
            })
        }
    };
    let rest: Vec<Sexpr> = it.cloned().collect();

    // requirements
    let mut requirements = Vec::new();
    if let Some(reqs) = expect_section(&rest, ":requirements") {
        for r in reqs {
            let (tok, rspan) = atom_str(r, "requirement keyword")?;
            let stripped = tok.trim_start_matches(':').to_string();
            if !SUPPORTED_REQUIREMENTS.contains(&stripped.as_str()) {
                return Err(ParseError::UnknownRequirement {
                    name: stripped,
                    line: rspan.line,
                    col: rspan.col,
                });
            }
            requirements.push(stripped);
        }
    }

    // types
    let mut types = Vec::new();
    if let Some(tys) = expect_section(&rest, ":types") {
        for (tname, parent, tspan) in parse_typed_names(tys)? {
            if types.iter().any(|t: &TypeDef| t.name == tname) {
                return Err(ParseError::Duplicate {
                    name: tname,
                    line: tspan.line,
                    col: tspan.col,
                });
            }
            types.push(TypeDef {
                name: tname,
                parent: if parent == "object" {
                    None
                } else {
                    Some(parent)
                },
            });
        }
    }
    let sort_known = |d: &Domain, s: &str| s == "object" || d.types.iter().any(|t| t.name == s);

    let mut domain = Domain {
        name,
        requirements,
        types,
        predicates: Vec::new(),
        actions: Vec::new(),
    };

    // predicates
    let Some(preds) = expect_section(&rest, ":predicates") else {
        return Err(ParseError::Expected {
            what: "(:predicates ...)",
            line: span.line,
            col: span.col,
        });
    };
    for p in preds {
        let Sexpr::List(pitems, pspan) = p else {
            return Err(ParseError::Expected {
                what: "predicate declaration list",
                line: p.span().line,
                col: p.span().col,
            });
        };
        let (pname, _) = atom_str(&pitems[0], "predicate name")?;
        if domain.predicate(&pname).is_some() {
            return Err(ParseError::Duplicate {
                name: pname,
                line: pspan.line,
                col: pspan.col,
            });
        }
        let mut params = Vec::new();
        for (vname, sort, vspan) in parse_typed_names(&pitems[1..])? {
            let vname = vname.trim_start_matches('?').to_string();
            if !sort_known(&domain, &sort) {
                return Err(ParseError::UnknownSort {
                    name: sort,
                    line: vspan.line,
                    col: vspan.col,
                });
            }
            params.push(TypedVar { name: vname, sort });
        }
        domain.predicates.push(PredicateDecl {
            name: pname,
            params,
            span: *pspan,
        });
    }

    // actions
    for item in &rest {
        let Sexpr::List(aitems, aspan) = item else {
            continue;
        };
        match aitems.first() {
            Some(Sexpr::Atom(head, _)) if head == ":action" => {}
            _ => continue,
        }
        let (aname, _) = atom_str(&aitems[1], "action name")?;
        if domain.action(&aname).is_some() {
            return Err(ParseError::Duplicate {
                name: aname,
                line: aspan.line,
                col: aspan.col,
            });
        }
        let mut params = Vec::new();
        let mut precondition = Vec::new();
        let mut add = Vec::new();
        let mut del = Vec::new();
        let mut i = 2;
        while i < aitems.len() {
            let (key, kspan) = atom_str(&aitems[i], "action section keyword")?;
            let Some(value) = aitems.get(i + 1) else {
                return Err(ParseError::Expected {
                    what: "value after action keyword",
                    line: kspan.line,
                    col: kspan.col,
                });
            };
            match key.as_str() {
                ":parameters" => {
                    let Sexpr::List(pitems, _) = value else {
                        return Err(ParseError::Expected {
                            what: "parameter list",
                            line: kspan.line,
                            col: kspan.col,
                        });
                    };
                    for (vname, sort, vspan) in parse_typed_names(pitems)? {
                        let vname = vname.trim_start_matches('?').to_string();
                        if !sort_known(&domain, &sort) {
                            return Err(ParseError::UnknownSort {
                                name: sort,
                                line: vspan.line,
                                col: vspan.col,
                            });
                        }
                        params.push(TypedVar { name: vname, sort });
                    }
                }
                ":precondition" => {
                    for lit in parse_literals(value)? {
                        precondition.push(lit);
                    }
                }
                ":effect" => {
                    for lit in parse_literals(value)? {
                        if lit.negated {
                            del.push(lit.atom);
                        } else {
                            add.push(lit.atom);
                        }
                    }
                }
                _ => {
                    return Err(ParseError::Expected {
                        what: ":parameters, :precondition, or :effect",
                        line: kspan.line,
                        col: kspan.col,
                    })
                }
            }
            i += 2;
        }

        let schema = ActionSchema {
            name: aname,
            params,
            precondition,
            add,
            del,
            span: *aspan,
        };
        validate_schema(&domain, &schema, aspan)?;
        domain.actions.push(schema);
    }

    Ok(domain)
}

/// Parses `(and lit*)`, a bare literal, or `()` into a literal list.
fn parse_literals(node: &Sexpr) -> Result<Vec<SchemaLiteral>, ParseError> {
    let Sexpr::List(items, span) = node else {
        return Err(ParseError::Expected {
            what: "literal or (and ...)",
            line: node.span().line,
            col: node.span().col,
        });
    };
    if items.is_empty() {
        return Ok(Vec::new());
    }
    if let Sexpr::Atom(head, _) = &items[0] {
        if head == "and" {
            let mut out = Vec::new();
            for item in &items[1..] {
                out.extend(parse_literals(item)?);
            }
            return Ok(out);
        }
        if head == "not" {
            if items.len() != 2 {
                return Err(ParseError::Expected {
                    what: "(not ATOM)",
                    line: span.line,
                    col: span.col,
                });
            }
            let inner = parse_literals(&items[1])?;
            if inner.len() != 1 || inner[0].negated {
                return Err(ParseError::Expected {
                    what: "single positive atom under not",
                    line: span.line,
                    col: span.col,
                });
            }
            return Ok(vec![SchemaLiteral {
                atom: inner[0].atom.clone(),
                negated: true,
            }]);
        }
        // plain atom
        let mut args = Vec::new();
        for a in &items[1..] {
            let (tok, _) = atom_str(a, "atom argument")?;
            if let Some(v) = tok.strip_prefix('?') {
                args.push(Term::Var(v.to_string()));
            } else {
                args.push(Term::Const(tok));
            }
        }
        return Ok(vec![SchemaLiteral {
            atom: SchemaAtom {
                predicate: head.clone(),
                args,
            },
            negated: false,
        }]);
    }
    Err(ParseError::Expected {
        what: "atom head symbol",
        line: span.line,
        col: span.col,
    })
}

fn validate_schema(
    domain: &Domain,
    schema: &ActionSchema,
    span: &Span,
) -> Result<(), ParseError> {
    let check_atom = |atom: &SchemaAtom| -> Result<(), ParseError> {
        let Some(decl) = domain.predicate(&atom.predicate) else {
            return Err(ParseError::UndeclaredPredicate {
                name: atom.predicate.clone(),
                line: span.line,
                col: span.col,
            });
        };
        if decl.params.len() != atom.args.len() {
            return Err(ParseError::ArityMismatch {
                name: atom.predicate.clone(),
                expected: decl.params.len(),
                got: atom.args.len(),
                line: span.line,
                col: span.col,
            });
        }
        for t in &atom.args {
            if let Term::Var(v) = t {
                if !schema.params.iter().any(|p| &p.name == v) {
                    return Err(ParseError::UnboundVariable {
                        name: v.clone(),
                        line: span.line,
                        col: span.col,
                    });
                }
            }
        }
        Ok(())
    };
    for lit in &schema.precondition {
        check_atom(&lit.atom)?;
    }
    for atom in &schema.add {
        check_atom(atom)?;
        if schema.del.contains(atom) {
            return Err(ParseError::ConflictingEffect {
                name: atom.predicate.clone(),
                line: span.line,
                col: span.col,
            });
        }
    }
    for atom in &schema.del {
        check_atom(atom)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Problem parsing
// ---------------------------------------------------------------------------

/// Parses a problem definition and checks it against the domain.
pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, ParseError> {
    let top = read_sexprs(text)?;
    let Some(Sexpr::List(items, span)) = top.first() else {
        return Err(ParseError::Expected {
            what: "(define (problem ...) ...)",
            line: 1,
            col: 1,
        });
    };
    let mut it = items.iter();
    match it.next() {
        Some(Sexpr::Atom(d, _)) if d == "define" => {}
        _ => {
            return Err(ParseError::Expected {
                what: "define",
                line: span.line,
                col: span.col,
            })
        }
    }
    let name = match it.next() {
        Some(Sexpr::List(hd, _)) if hd.len() == 2 => match (&hd[0], &hd[1]) {
            (Sexpr::Atom(k, _), Sexpr::Atom(n, _)) if k == "problem" => n.clone(),
            _ => {
                return Err(ParseError::Expected {
                    what: "(problem NAME)",
                    line: span.line,
                    col: span.col,
                })
            }
        },
        _ => {
            return Err(ParseError::Expected {
                what: "(problem NAME)",
                line: span.line,
                col: span.col,
            })
        }
    };
    let rest: Vec<Sexpr> = it.cloned().collect();

    let domain_name = match expect_section(&rest, ":domain") {
        Some([d]) => atom_str(d, "domain name")?.0,
        _ => {
            return Err(ParseError::Expected {
                what: "(:domain NAME)",
                line: span.line,
                col: span.col,
            })
        }
    };
    if domain_name != domain.name {
        return Err(ParseError::DomainMismatch {
            referenced: domain_name,
            actual: domain.name.clone(),
        });
    }

    let mut objects = Vec::new();
    if let Some(objs) = expect_section(&rest, ":objects") {
        for (oname, sort, ospan) in parse_typed_names(objs)? {
            if sort != "object" && !domain.types.iter().any(|t| t.name == sort) {
                return Err(ParseError::UnknownSort {
                    name: sort,
                    line: ospan.line,
                    col: ospan.col,
                });
            }
            if objects.iter().any(|o: &TypedObj| o.name == oname) {
                return Err(ParseError::Duplicate {
                    name: oname,
                    line: ospan.line,
                    col: ospan.col,
                });
            }
            objects.push(TypedObj { name: oname, sort });
        }
    }

    let check_ground_atom =
        |pred: &str, args: &[String], aspan: Span| -> Result<(), ParseError> {
            let Some(decl) = domain.predicate(pred) else {
                return Err(ParseError::UndeclaredPredicate {
                    name: pred.to_string(),
                    line: aspan.line,
                    col: aspan.col,
                });
            };
            if decl.params.len() != args.len() {
                return Err(ParseError::ArityMismatch {
                    name: pred.to_string(),
                    expected: decl.params.len(),
                    got: args.len(),
                    line: aspan.line,
                    col: aspan.col,
                });
            }
            for (arg, p) in args.iter().zip(&decl.params) {
                let Some(obj) = objects.iter().find(|o| &o.name == arg) else {
                    return Err(ParseError::Expected {
                        what: "declared object in ground atom",
                        line: aspan.line,
                        col: aspan.col,
                    });
                };
                if !domain.is_subtype(&obj.sort, &p.sort) {
                    return Err(ParseError::UnknownSort {
                        name: format!("{} (expected {})", obj.sort, p.sort),
                        line: aspan.line,
                        col: aspan.col,
                    });
                }
            }
            Ok(())
        };

    let read_ground = |node: &Sexpr| -> Result<(GroundAtomText, Span), ParseError> {
        let Sexpr::List(items, gspan) = node else {
            return Err(ParseError::Expected {
                what: "ground atom",
                line: node.span().line,
                col: node.span().col,
            });
        };
        let (pred, _) = atom_str(&items[0], "predicate name")?;
        let mut args = Vec::new();
        for a in &items[1..] {
            args.push(atom_str(a, "object name")?.0);
        }
        Ok((GroundAtomText {
            predicate: pred,
            args,
        }, *gspan))
    };

    let mut init = Vec::new();
    if let Some(init_items) = expect_section(&rest, ":init") {
        for item in init_items {
            let (atom, gspan) = read_ground(item)?;
            check_ground_atom(&atom.predicate, &atom.args, gspan)?;
            init.push(atom);
        }
    }

    let mut goal = Vec::new();
    if let Some(goal_items) = expect_section(&rest, ":goal") {
        // The goal section holds a single formula.
        if let Some(formula) = goal_items.first() {
            collect_goal_literals(formula, &mut goal, &read_ground, &check_ground_atom)?;
        }
    }

    Ok(Problem {
        name,
        domain_name,
        objects,
        init,
        goal,
    })
}

fn collect_goal_literals(
    node: &Sexpr,
    out: &mut Vec<GroundLiteralText>,
    read_ground: &impl Fn(&Sexpr) -> Result<(GroundAtomText, Span), ParseError>,
    check: &impl Fn(&str, &[String], Span) -> Result<(), ParseError>,
) -> Result<(), ParseError> {
    let Sexpr::List(items, span) = node else {
        return Err(ParseError::Expected {
            what: "goal formula",
            line: node.span().line,
            col: node.span().col,
        });
    };
    if items.is_empty() {
        return Ok(());
    }
    if let Sexpr::Atom(head, _) = &items[0] {
        if head == "and" {
            for item in &items[1..] {
                collect_goal_literals(item, out, read_ground, check)?;
            }
            return Ok(());
        }
        if head == "not" {
            if items.len() != 2 {
                return Err(ParseError::Expected {
                    what: "(not ATOM)",
                    line: span.line,
                    col: span.col,
                });
            }
            let (atom, gspan) = read_ground(&items[1])?;
            check(&atom.predicate, &atom.args, gspan)?;
            out.push(GroundLiteralText {
                atom,
                negated: true,
            });
            return Ok(());
        }
    }
    let (atom, gspan) = read_ground(node)?;
    check(&atom.predicate, &atom.args, gspan)?;
    out.push(GroundLiteralText {
        atom,
        negated: false,
    });
    Ok(())
}
