use crate::tree::{Direction, Label, LabeledTree, NodeType, PLabel, Tree};

use super::{Automaton, StateId};

/// What the automaton sees: per node an observation and up to four neighbours.
///
/// Boards are built from plain trees (real observations) or from patterns,
/// where every port is observed as a left internal `b`-node and moves out of
/// the pattern do not exist.
#[derive(Clone, Debug)]
pub struct Board {
    obs: Vec<(Label, NodeType)>,
    nbr: Vec<[Option<usize>; 4]>,
}

impl Board {
    pub fn from_tree(tree: &LabeledTree) -> Self {
        let n = tree.len();
        let obs = (0..n).map(|v| (tree.label(v), tree.node_type_at(v))).collect();
        let nbr = (0..n).map(|v| Direction::ALL.map(|d| tree.neighbor(v, d))).collect();
        Board { obs, nbr }
    }

    /// Board of a pattern tree. `ports` lists port nodes; they observe
    /// `(b, left internal)`, the root port has no parent and leaf ports have
    /// no children.
    pub fn from_pattern(tree: &Tree<PLabel>, ports: &[usize]) -> Self {
        let n = tree.len();
        let mut obs: Vec<(Label, NodeType)> = (0..n)
            .map(|v| {
                let label = match tree.label(v) {
                    PLabel::A => Label::A,
                    PLabel::B | PLabel::Star => Label::B,
                };
                (label, tree.node_type_at(v))
            })
            .collect();
        let nbr = (0..n).map(|v| Direction::ALL.map(|d| tree.neighbor(v, d))).collect();
        for &p in ports {
            obs[p] = (Label::B, NodeType::PORT);
        }
        Board { obs, nbr }
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    pub fn obs(&self, v: usize) -> (Label, NodeType) {
        self.obs[v]
    }

    /// Successor configurations of `(p, v)`, sorted and without duplicates.
    pub fn successors(&self, a: &Automaton, p: StateId, v: usize, out: &mut Vec<(StateId, usize)>) {
        out.clear();
        let (label, ty) = self.obs[v];
        for d in Direction::ALL {
            let Some(w) = self.nbr[v][d.index()] else { continue };
            let target = self.obs[w];
            for &(q, ql, qt) in a.moves(p, label, ty, d) {
                if (ql, qt) == target {
                    out.push((q, w));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}
