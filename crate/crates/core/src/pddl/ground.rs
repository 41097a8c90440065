//! Grounding and transition semantics. A [`GroundModel`] fixes the atom
//! universe (every sort-respecting predicate instance) and the grounded
//! action set for one domain/problem pair; [`State`] is a bitset over that
//! universe, interpreted closed-world.

use std::collections::HashMap;

use thiserror::Error;

use super::ast::{Domain, Problem, Term};
use crate::facts::{Fact, FactSet};

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("action {action} is not applicable in the given state")]
    NotApplicable { action: String },
    #[error("fact {0} is outside the grounded universe")]
    UnknownFact(Fact),
}

/// A ground atom as indices into the model's predicate and object tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    pub predicate: u32,
    pub args: Vec<u32>,
}

/// A fully bound action instance with precomputed literal sets.
#[derive(Debug, Clone)]
pub struct GroundAction {
    pub id: u32,
    pub schema: u32,
    pub args: Vec<u32>,
    pub pre_pos: Vec<u32>,
    pub pre_neg: Vec<u32>,
    pub add: Vec<u32>,
    pub del: Vec<u32>,
}

/// A conjunctive goal over ground atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Goal {
    pub pos: Vec<u32>,
    pub neg: Vec<u32>,
}

/// Closed-world state: a bitset over the grounded atom universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    words: Box<[u64]>,
}

impl State {
    fn empty(words: usize) -> Self {
        State {
            words: vec![0u64; words].into_boxed_slice(),
        }
    }

    #[inline]
    pub fn contains(&self, atom: u32) -> bool {
        let (w, b) = (atom as usize / 64, atom as usize % 64);
        self.words[w] & (1u64 << b) != 0
    }

    #[inline]
    fn set(&mut self, atom: u32) {
        let (w, b) = (atom as usize / 64, atom as usize % 64);
        self.words[w] |= 1u64 << b;
    }

    #[inline]
    fn clear(&mut self, atom: u32) {
        let (w, b) = (atom as usize / 64, atom as usize % 64);
        self.words[w] &= !(1u64 << b);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// Atom ids present, ascending.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, w)| {
            (0..64)
                .filter(move |b| w & (1u64 << b) != 0)
                .map(move |b| (wi * 64 + b) as u32)
        })
    }
}

/// Grounded domain/problem pair: atom universe, action instances, and the
/// transition semantics over them.
pub struct GroundModel {
    pub domain: Domain,
    pub problem: Problem,
    pub atoms: Vec<GroundAtom>,
    pub actions: Vec<GroundAction>,
    atom_index: HashMap<GroundAtom, u32>,
    object_index: HashMap<String, u32>,
    words: usize,
}

impl GroundModel {
    /// Enumerates every sort-respecting predicate instance and action
    /// binding. Actions are ordered lexicographically by (schema name,
    /// argument names); atoms follow predicate declaration order with
    /// argument tuples in object-name order.
    pub fn ground(domain: &Domain, problem: &Problem) -> Self {
        let mut object_order: Vec<usize> = (0..problem.objects.len()).collect();
        object_order.sort_by(|&a, &b| problem.objects[a].name.cmp(&problem.objects[b].name));

        let mut object_index = HashMap::new();
        for (i, obj) in problem.objects.iter().enumerate() {
            object_index.insert(obj.name.clone(), i as u32);
        }

        let objects_of_sort = |sort: &str| -> Vec<u32> {
            object_order
                .iter()
                .filter(|&&i| domain.is_subtype(&problem.objects[i].sort, sort))
                .map(|&i| i as u32)
                .collect()
        };

        // Atom universe.
        let mut atoms = Vec::new();
        let mut atom_index = HashMap::new();
        for (pi, pred) in domain.predicates.iter().enumerate() {
            let domains: Vec<Vec<u32>> =
                pred.params.iter().map(|p| objects_of_sort(&p.sort)).collect();
            for combo in cartesian(&domains) {
                let atom = GroundAtom {
                    predicate: pi as u32,
                    args: combo,
                };
                atom_index.insert(atom.clone(), atoms.len() as u32);
                atoms.push(atom);
            }
        }

        // Grounded actions in lexicographic (schema name, argument names)
        // order.
        let mut schema_order: Vec<usize> = (0..domain.actions.len()).collect();
        schema_order.sort_by(|&a, &b| domain.actions[a].name.cmp(&domain.actions[b].name));

        let mut actions = Vec::new();
        for &si in &schema_order {
            let schema = &domain.actions[si];
            let domains: Vec<Vec<u32>> = schema
                .params
                .iter()
                .map(|p| objects_of_sort(&p.sort))
                .collect();
            for combo in cartesian(&domains) {
                let bind = |term: &Term| -> u32 {
                    match term {
                        Term::Var(v) => {
                            let idx = schema
                                .params
                                .iter()
                                .position(|p| &p.name == v)
                                .expect("validated at parse time");
                            combo[idx]
                        }
                        Term::Const(c) => *object_index
                            .get(c)
                            .expect("constants checked against objects"),
                    }
                };
                let atom_id = |pred: &str, args: Vec<u32>| -> u32 {
                    let pi = domain
                        .predicates
                        .iter()
                        .position(|p| p.name == pred)
                        .expect("validated at parse time") as u32;
                    atom_index[&GroundAtom {
                        predicate: pi,
                        args,
                    }]
                };
                let mut pre_pos = Vec::new();
                let mut pre_neg = Vec::new();
                for lit in &schema.precondition {
                    let id = atom_id(
                        &lit.atom.predicate,
                        lit.atom.args.iter().map(&bind).collect(),
                    );
                    if lit.negated {
                        pre_neg.push(id);
                    } else {
                        pre_pos.push(id);
                    }
                }
                let add: Vec<u32> = schema
                    .add
                    .iter()
                    .map(|a| atom_id(&a.predicate, a.args.iter().map(&bind).collect()))
                    .collect();
                let del: Vec<u32> = schema
                    .del
                    .iter()
                    .map(|a| atom_id(&a.predicate, a.args.iter().map(&bind).collect()))
                    .collect();
                actions.push(GroundAction {
                    id: actions.len() as u32,
                    schema: si as u32,
                    args: combo,
                    pre_pos,
                    pre_neg,
                    add,
                    del,
                });
            }
        }

        let words = atoms.len().div_ceil(64).max(1);
        GroundModel {
            domain: domain.clone(),
            problem: problem.clone(),
            atoms,
            actions,
            atom_index,
            object_index,
            words,
        }
    }

    pub fn empty_state(&self) -> State {
        State::empty(self.words)
    }

    pub fn object_name(&self, id: u32) -> &str {
        &self.problem.objects[id as usize].name
    }

    pub fn action_name(&self, action: &GroundAction) -> String {
        let schema = &self.domain.actions[action.schema as usize];
        let mut s = format!("({}", schema.name);
        for &a in &action.args {
            s.push(' ');
            s.push_str(self.object_name(a));
        }
        s.push(')');
        s
    }

    pub fn schema_name(&self, action: &GroundAction) -> &str {
        &self.domain.actions[action.schema as usize].name
    }

    pub fn fact_of(&self, atom_id: u32) -> Fact {
        let atom = &self.atoms[atom_id as usize];
        Fact {
            predicate: self.domain.predicates[atom.predicate as usize].name.clone(),
            args: atom
                .args
                .iter()
                .map(|&a| self.object_name(a).to_string())
                .collect(),
        }
    }

    pub fn atom_of_fact(&self, fact: &Fact) -> Option<u32> {
        let pi = self
            .domain
            .predicates
            .iter()
            .position(|p| p.name == fact.predicate)? as u32;
        let mut args = Vec::with_capacity(fact.args.len());
        for a in &fact.args {
            args.push(*self.object_index.get(a)?);
        }
        self.atom_index
            .get(&GroundAtom {
                predicate: pi,
                args,
            })
            .copied()
    }

    pub fn facts_of_state(&self, state: &State) -> FactSet {
        state.iter().map(|id| self.fact_of(id)).collect()
    }

    /// Builds a state from facts, ignoring facts outside the universe and
    /// returning how many were ignored.
    pub fn state_from_facts<'a>(
        &self,
        facts: impl IntoIterator<Item = &'a Fact>,
    ) -> (State, usize) {
        let mut s = self.empty_state();
        let mut unknown = 0;
        for f in facts {
            match self.atom_of_fact(f) {
                Some(id) => s.set(id),
                None => unknown += 1,
            }
        }
        (s, unknown)
    }

    /// The problem's initial state.
    pub fn initial_state(&self) -> State {
        let mut s = self.empty_state();
        for atom in &self.problem.init {
            let fact = Fact {
                predicate: atom.predicate.clone(),
                args: atom.args.clone(),
            };
            if let Some(id) = self.atom_of_fact(&fact) {
                s.set(id);
            }
        }
        s
    }

    /// The problem's goal as atom ids.
    pub fn goal(&self) -> Goal {
        let mut g = Goal::default();
        for lit in &self.problem.goal {
            let fact = Fact {
                predicate: lit.atom.predicate.clone(),
                args: lit.atom.args.clone(),
            };
            if let Some(id) = self.atom_of_fact(&fact) {
                if lit.negated {
                    g.neg.push(id);
                } else {
                    g.pos.push(id);
                }
            }
        }
        g
    }

    pub fn satisfies(&self, state: &State, goal: &Goal) -> bool {
        goal.pos.iter().all(|&a| state.contains(a))
            && goal.neg.iter().all(|&a| !state.contains(a))
    }

    /// STRIPS applicability: positive preconditions present, negative ones
    /// absent.
    pub fn applicable(&self, state: &State, action: &GroundAction) -> bool {
        action.pre_pos.iter().all(|&a| state.contains(a))
            && action.pre_neg.iter().all(|&a| !state.contains(a))
    }

    /// STRIPS transition: (state \ del) ∪ add. Applying an inapplicable
    /// action is an error.
    pub fn apply(&self, state: &State, action: &GroundAction) -> Result<State, SemanticsError> {
        if !self.applicable(state, action) {
            return Err(SemanticsError::NotApplicable {
                action: self.action_name(action),
            });
        }
        let mut next = state.clone();
        for &a in &action.del {
            next.clear(a);
        }
        for &a in &action.add {
            next.set(a);
        }
        Ok(next)
    }

    /// Applicable actions in grounding order.
    pub fn applicable_actions<'a>(
        &'a self,
        state: &'a State,
    ) -> impl Iterator<Item = &'a GroundAction> + 'a {
        self.actions.iter().filter(move |a| self.applicable(state, a))
    }
}

/// Cartesian product over per-slot candidate lists, lexicographic in slot
/// order. An empty slot list yields no combinations; zero slots yield one
/// empty combination.
fn cartesian(domains: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for d in domains {
        let mut next = Vec::with_capacity(out.len() * d.len());
        for prefix in &out {
            for &x in d {
                let mut c = prefix.clone();
                c.push(x);
                next.push(c);
            }
        }
        out = next;
    }
    out
}
