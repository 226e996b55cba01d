//! Nondeterministic tree-walking automata.
//!
//! A transition `(p, a, t1, q, b, t2, d)` moves from a node with label `a` and
//! type `t1` in state `p` to its neighbour in direction `d`, which must carry
//! label `b` and type `t2`, entering state `q`. Both endpoint observations are
//! part of the transition, which makes transitions reversible.

mod board;
mod format;
mod lang_l;
mod run;
mod symmetric;

use std::collections::BTreeSet;
use std::fmt;

pub use board::Board;
pub use format::{parse_automaton, print_automaton};
pub use lang_l::build_a_l;
pub use run::{accepting_paths, accepting_witness, accepts, multiplicity, replay_valid, Computation, Configuration};
pub use symmetric::{symmetrize, SymmetrizedAutomaton};

use crate::tree::{Direction, Label, NodeType};

pub type StateId = usize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub src: StateId,
    pub src_label: Label,
    pub src_type: NodeType,
    pub dst: StateId,
    pub dst_label: Label,
    pub dst_type: NodeType,
    pub dir: Direction,
}

/// Number of accepting computations on a tree, saturated at two.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplicity {
    Zero,
    One,
    /// Finitely many, at least two.
    Many,
    /// Some accepting computation passes through a cycle.
    Infinite,
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Multiplicity::Zero => "ZERO",
            Multiplicity::One => "ONE",
            Multiplicity::Many => "MANY",
            Multiplicity::Infinite => "INFINITE",
        };
        f.write_str(s)
    }
}

// (dst state, dst label, dst type)
type Move = (StateId, Label, NodeType);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    alphabet: BTreeSet<Label>,
    states: Vec<String>,
    initial: Vec<StateId>,
    accepting: Vec<StateId>,
    transitions: Vec<Transition>,
    index: Vec<Vec<Move>>,
}

fn key(state: StateId, label: Label, ty: NodeType, dir: Direction) -> usize {
    ((state * 2 + label.index()) * 6 + ty.index()) * 4 + dir.index()
}

impl Automaton {
    /// Builds an automaton. Transitions are sorted and deduplicated; those
    /// naming states out of range are kept for [`Automaton::validate`] but
    /// never fire.
    pub fn new(
        alphabet: impl IntoIterator<Item = Label>,
        states: Vec<String>,
        initial: impl IntoIterator<Item = StateId>,
        accepting: impl IntoIterator<Item = StateId>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Self {
        let mut initial: Vec<_> = initial.into_iter().collect();
        initial.sort_unstable();
        initial.dedup();
        let mut accepting: Vec<_> = accepting.into_iter().collect();
        accepting.sort_unstable();
        accepting.dedup();
        let mut transitions: Vec<_> = transitions.into_iter().collect();
        transitions.sort_unstable();
        transitions.dedup();
        let n = states.len();
        let mut index = vec![Vec::new(); n * 2 * 6 * 4];
        for t in &transitions {
            if t.src < n && t.dst < n {
                index[key(t.src, t.src_label, t.src_type, t.dir)].push((t.dst, t.dst_label, t.dst_type));
            }
        }
        Automaton { alphabet: alphabet.into_iter().collect(), states, initial, accepting, transitions, index }
    }

    /// Automaton over `{a, b}` with states named `q0, q1, ...`.
    pub fn with_states(
        nstates: usize,
        initial: impl IntoIterator<Item = StateId>,
        accepting: impl IntoIterator<Item = StateId>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Self {
        let names = (0..nstates).map(|i| format!("q{i}")).collect();
        Automaton::new(Label::ALL, names, initial, accepting, transitions)
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn accepting(&self) -> &[StateId] {
        &self.accepting
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.binary_search(&q).is_ok()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Moves available from state `p` on a node observed as `(label, ty)` in
    /// direction `dir`, as `(dst state, dst label, dst type)`.
    pub fn moves(&self, p: StateId, label: Label, ty: NodeType, dir: Direction) -> &[Move] {
        &self.index[key(p, label, ty, dir)]
    }

    /// Checks every structural invariant; an empty report means well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.states.len();
        let mut out = Vec::new();
        for &q in self.initial.iter().chain(&self.accepting) {
            if q >= n {
                out.push(Violation { transition: None, message: format!("state index {q} out of range") });
            }
        }
        for t in &self.transitions {
            let mut bad = |message: String| out.push(Violation { transition: Some(*t), message });
            if t.src >= n || t.dst >= n {
                bad("transition names an unknown state".into());
            }
            if !self.alphabet.contains(&t.src_label) || !self.alphabet.contains(&t.dst_label) {
                bad("transition label outside the alphabet".into());
            }
            if t.dir.is_down() && t.src_type.is_leaf() {
                bad(format!("direction {} from a leaf", t.dir));
            }
            if t.dir.is_down() && t.dst_type.pos != t.dir.child() {
                bad(format!("direction {} into a node of type {}", t.dir, t.dst_type));
            }
            if !t.dir.is_down() && t.src_type.pos != t.dir.child() {
                bad(format!("direction {} from a node of type {}", t.dir, t.src_type));
            }
            if !t.dir.is_down() && t.dst_type.is_leaf() {
                bad(format!("direction {} into a leaf", t.dir));
            }
        }
        out
    }

    /// Conservative determinism check: at most one initial state, at most one
    /// transition applicable in any configuration of any tree, and no moves
    /// out of an accepting state at the root (acceptance halts the run).
    pub fn is_deterministic(&self) -> bool {
        if self.initial.len() > 1 {
            return false;
        }
        for (i, a) in self.transitions.iter().enumerate() {
            if self.is_accepting(a.src) && a.src_type.pos == crate::tree::ChildPos::Root {
                return false;
            }
            for b in &self.transitions[i + 1..] {
                if (a.src, a.src_label, a.src_type) != (b.src, b.src_label, b.src_type) {
                    break;
                }
                if a.dir != b.dir || (a.dst_label, a.dst_type) == (b.dst_label, b.dst_type) {
                    return false;
                }
            }
        }
        true
    }
}

/// One invariant violation found by [`Automaton::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub transition: Option<Transition>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.transition {
            Some(t) => write!(
                f,
                "{}: ({}, {}, {}, {}, {}, {}, {})",
                self.message, t.src, t.src_label, t.src_type, t.dst, t.dst_label, t.dst_type, t.dir
            ),
            None => f.write_str(&self.message),
        }
    }
}

/// All geometrically consistent `(src type, dir, dst type)` combinations.
pub fn moves_geometry() -> impl Iterator<Item = (NodeType, Direction, NodeType)> {
    NodeType::ALL.into_iter().flat_map(|from| {
        Direction::ALL.into_iter().flat_map(move |d| {
            NodeType::ALL.into_iter().filter(move |&to| d.fits(from, to)).map(move |to| (from, d, to))
        })
    })
}

/// A random automaton over `{a, b}`; each geometrically valid transition is
/// present independently with probability `density`.
pub fn random_automaton<R: rand::Rng + ?Sized>(rng: &mut R, nstates: usize, density: f64) -> Automaton {
    let mut transitions = Vec::new();
    for (src_type, dir, dst_type) in moves_geometry() {
        for src in 0..nstates {
            for dst in 0..nstates {
                for src_label in Label::ALL {
                    for dst_label in Label::ALL {
                        if rng.gen_bool(density) {
                            transitions.push(Transition { src, src_label, src_type, dst, dst_label, dst_type, dir });
                        }
                    }
                }
            }
        }
    }
    let initial: Vec<_> = (0..nstates).filter(|_| rng.gen_bool(0.5)).collect();
    let accepting: Vec<_> = (0..nstates).filter(|_| rng.gen_bool(0.5)).collect();
    Automaton::with_states(nstates, initial, accepting, transitions)
}
