//! Ground symbolic facts shared between the simulator, perception, and the
//! planner. A [`Fact`] is a predicate name applied to object names; sets of
//! facts are interpreted closed-world (absent means false).

use std::collections::BTreeSet;
use std::fmt;

/// A ground predicate instance such as `engaged(b01)` or `serves(r1, b03)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Fact {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        Fact {
            predicate: predicate.into(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn nullary(predicate: impl Into<String>) -> Self {
        Fact {
            predicate: predicate.into(),
            args: Vec::new(),
        }
    }

    pub fn unary(predicate: impl Into<String>, arg: impl Into<String>) -> Self {
        Fact {
            predicate: predicate.into(),
            args: vec![arg.into()],
        }
    }

    pub fn binary(
        predicate: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
    ) -> Self {
        Fact {
            predicate: predicate.into(),
            args: vec![a.into(), b.into()],
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// A closed-world set of ground facts, ordered for deterministic iteration.
pub type FactSet = BTreeSet<Fact>;

/// Renders a fact set one fact per line in sorted order. Used for prompt
/// rendering and logs, where a stable textual form matters.
pub fn render_sorted(facts: &FactSet) -> String {
    let mut out = String::new();
    for f in facts {
        out.push_str(&f.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_matches_sexpr_form() {
        assert_eq!(Fact::nullary("arm_home").to_string(), "(arm_home)");
        assert_eq!(Fact::unary("engaged", "b01").to_string(), "(engaged b01)");
        assert_eq!(
            Fact::binary("serves", "r1", "b02").to_string(),
            "(serves r1 b02)"
        );
    }

    #[test]
    fn render_is_sorted_and_stable() {
        let mut s = FactSet::new();
        s.insert(Fact::unary("removed", "b02"));
        s.insert(Fact::unary("engaged", "b01"));
        let r = render_sorted(&s);
        assert_eq!(r, "(engaged b01)\n(removed b02)\n");
    }
}
