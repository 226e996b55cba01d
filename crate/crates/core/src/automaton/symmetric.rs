use super::{Automaton, StateId, Transition};

/// An automaton whose runs can be reversed through the involution `tau`.
#[derive(Clone, Debug)]
pub struct SymmetrizedAutomaton {
    pub automaton: Automaton,
    pub tau: Vec<StateId>,
}

impl SymmetrizedAutomaton {
    pub fn tau(&self, q: StateId) -> StateId {
        self.tau[q]
    }
}

/// Adds a primed copy `q'` of every state and, for each transition
/// `(p, a, t1, q, b, t2, d)`, the reversed `(q', b, t2, p', a, t1, -d)`.
/// Initial and accepting states stay unprimed, so the language is unchanged.
pub fn symmetrize(a: &Automaton) -> SymmetrizedAutomaton {
    let n = a.num_states();
    let mut names: Vec<String> = a.state_names().to_vec();
    names.extend(a.state_names().iter().map(|s| format!("{s}'")));
    let mut transitions = a.transitions().to_vec();
    transitions.extend(a.transitions().iter().map(|t| Transition {
        src: t.dst + n,
        src_label: t.dst_label,
        src_type: t.dst_type,
        dst: t.src + n,
        dst_label: t.src_label,
        dst_type: t.src_type,
        dir: t.dir.reverse(),
    }));
    let automaton = Automaton::new(
        a.alphabet().iter().copied(),
        names,
        a.initial().iter().copied(),
        a.accepting().iter().copied(),
        transitions,
    );
    let tau = (0..2 * n).map(|i| (i + n) % (2 * n)).collect();
    SymmetrizedAutomaton { automaton, tau }
}
