use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::tree::{Direction, LabeledTree, NodeAddr};

use super::{Automaton, Board, Multiplicity, StateId};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: StateId,
    pub node: NodeAddr,
}

/// A computation as its sequence of configurations.
pub type Computation = Vec<Configuration>;

fn check_alphabet(a: &Automaton, tree: &LabeledTree) -> Result<()> {
    match tree.labels().find(|l| !a.alphabet().contains(l)) {
        Some(l) => Err(Error::AlphabetMismatch(l.to_string())),
        None => Ok(()),
    }
}

/// The part of the configuration graph reachable from the initial
/// configurations. Vertices are numbered `state * nodes + node`.
struct Reach {
    nodes: usize,
    reached: Vec<bool>,
    order: Vec<usize>,
    succ: Vec<Vec<usize>>,
}

impl Reach {
    fn explore(a: &Automaton, board: &Board) -> Reach {
        let nodes = board.len();
        let total = a.num_states() * nodes;
        let mut reached = vec![false; total];
        let mut succ = vec![Vec::new(); total];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for &q in a.initial() {
            let id = q * nodes;
            if !reached[id] {
                reached[id] = true;
                queue.push_back(id);
            }
        }
        let mut buf = Vec::new();
        while let Some(id) = queue.pop_front() {
            order.push(id);
            board.successors(a, id / nodes, id % nodes, &mut buf);
            for &(q, w) in &buf {
                let nid = q * nodes + w;
                succ[id].push(nid);
                if !reached[nid] {
                    reached[nid] = true;
                    queue.push_back(nid);
                }
            }
        }
        Reach { nodes, reached, order, succ }
    }

    fn is_final(&self, a: &Automaton, id: usize) -> bool {
        id.is_multiple_of(self.nodes) && a.is_accepting(id / self.nodes)
    }

    /// Reached vertices that can also reach an accepting configuration.
    fn useful(&self, a: &Automaton) -> Vec<bool> {
        let total = self.reached.len();
        let mut pred = vec![Vec::new(); total];
        for &v in &self.order {
            for &w in &self.succ[v] {
                pred[w].push(v);
            }
        }
        let mut useful = vec![false; total];
        let mut stack: Vec<usize> = self.order.iter().copied().filter(|&v| self.is_final(a, v)).collect();
        for &v in &stack {
            useful[v] = true;
        }
        while let Some(v) = stack.pop() {
            for &u in &pred[v] {
                if !useful[u] {
                    useful[u] = true;
                    stack.push(u);
                }
            }
        }
        useful
    }

    fn config(&self, tree: &LabeledTree, id: usize) -> Configuration {
        Configuration { state: id / self.nodes, node: tree.addr(id % self.nodes) }
    }

    /// Shortest path inside `allowed` from any of `sources` to a vertex
    /// satisfying `goal`, breadth first in successor order.
    fn shortest(&self, sources: &[usize], allowed: &[bool], goal: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.reached.len()];
        let mut seen = vec![false; self.reached.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if allowed[s] && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            if goal(v) {
                let mut path = vec![v];
                let mut cur = v;
                while parent[cur] != usize::MAX {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.succ[v] {
                if allowed[w] && !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Whether some computation leads from an initial configuration at the root
/// to an accepting configuration at the root.
pub fn accepts(a: &Automaton, tree: &LabeledTree) -> Result<bool> {
    check_alphabet(a, tree)?;
    let reach = Reach::explore(a, &Board::from_tree(tree));
    Ok(reach.order.iter().any(|&v| reach.is_final(a, v)))
}

/// A shortest accepting computation. Ties are broken by (state, address).
pub fn accepting_witness(a: &Automaton, tree: &LabeledTree) -> Option<Computation> {
    let reach = Reach::explore(a, &Board::from_tree(tree));
    let sources: Vec<usize> = a.initial().iter().map(|&q| q * reach.nodes).collect();
    let path = reach.shortest(&sources, &reach.reached, |v| reach.is_final(a, v))?;
    Some(path.into_iter().map(|v| reach.config(tree, v)).collect())
}

/// Classifies the number of accepting computations.
pub fn multiplicity(a: &Automaton, tree: &LabeledTree) -> Multiplicity {
    let reach = Reach::explore(a, &Board::from_tree(tree));
    let useful = reach.useful(a);
    let Some(topo) = topological(&reach, &useful) else { return Multiplicity::Infinite };
    let mut count = vec![0u8; useful.len()];
    for &v in topo.iter().rev() {
        let mut c = u8::from(reach.is_final(a, v));
        for &w in &reach.succ[v] {
            if useful[w] {
                c = (c + count[w]).min(2);
            }
        }
        count[v] = c;
    }
    let total = a.initial().iter().map(|&q| q * reach.nodes).filter(|&v| useful[v]).fold(0u8, |s, v| (s + count[v]).min(2));
    match total {
        0 => Multiplicity::Zero,
        1 => Multiplicity::One,
        _ => Multiplicity::Many,
    }
}

// Topological order of the useful subgraph, or None if it has a cycle.
fn topological(reach: &Reach, useful: &[bool]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; useful.len()];
    let vertices: Vec<usize> = reach.order.iter().copied().filter(|&v| useful[v]).collect();
    for &v in &vertices {
        for &w in &reach.succ[v] {
            if useful[w] {
                indeg[w] += 1;
            }
        }
    }
    let mut stack: Vec<usize> = vertices.iter().copied().filter(|&v| indeg[v] == 0).collect();
    let mut topo = Vec::with_capacity(vertices.len());
    while let Some(v) = stack.pop() {
        topo.push(v);
        for &w in &reach.succ[v] {
            if useful[w] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
    }
    (topo.len() == vertices.len()).then_some(topo)
}

/// Two distinct accepting computations, if the tree has at least two.
///
/// When the count is infinite the second computation is the first one with a
/// cycle pumped in.
pub fn accepting_paths(a: &Automaton, tree: &LabeledTree) -> Option<(Computation, Computation)> {
    let reach = Reach::explore(a, &Board::from_tree(tree));
    let useful = reach.useful(a);
    let to_configs = |p: Vec<usize>| -> Computation { p.into_iter().map(|v| reach.config(tree, v)).collect() };
    let sources: Vec<usize> = a.initial().iter().map(|&q| q * reach.nodes).filter(|&v| useful[v]).collect();
    if topological(&reach, &useful).is_none() {
        let v = cycle_vertex(&reach, &useful);
        let head = reach.shortest(&sources, &useful, |x| x == v)?;
        let back = reach.succ[v].iter().copied().filter(|&w| useful[w]).find_map(|w| {
            let p = reach.shortest(&[w], &useful, |x| x == v)?;
            Some(p)
        })?;
        let tail = reach.shortest(&[v], &useful, |x| reach.is_final(a, x))?;
        let short: Vec<usize> = head.iter().chain(&tail[1..]).copied().collect();
        let long: Vec<usize> = head.iter().chain(&back).chain(&tail[1..]).copied().collect();
        return Some((to_configs(short), to_configs(long)));
    }
    // Depth-first enumeration; every useful vertex leads to some accepting end.
    let mut found = Vec::new();
    for &s in &sources {
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        let mut path = vec![s];
        if reach.is_final(a, s) {
            found.push(path.clone());
        }
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if found.len() >= 2 {
                break;
            }
            let succ = &reach.succ[v];
            while *next < succ.len() && !useful[succ[*next]] {
                *next += 1;
            }
            if *next == succ.len() {
                stack.pop();
                path.pop();
                continue;
            }
            let w = succ[*next];
            *next += 1;
            path.push(w);
            stack.push((w, 0));
            if reach.is_final(a, w) {
                found.push(path.clone());
            }
        }
        if found.len() >= 2 {
            break;
        }
    }
    let mut it = found.into_iter();
    let first = it.next()?;
    let second = it.next()?;
    Some((to_configs(first), to_configs(second)))
}

// Some useful vertex lying on a cycle; the useful subgraph must be cyclic.
fn cycle_vertex(reach: &Reach, useful: &[bool]) -> usize {
    let mut indeg = vec![0usize; useful.len()];
    let vertices: Vec<usize> = reach.order.iter().copied().filter(|&v| useful[v]).collect();
    let mut pred = vec![Vec::new(); useful.len()];
    for &v in &vertices {
        for &w in &reach.succ[v] {
            if useful[w] {
                indeg[w] += 1;
                pred[w].push(v);
            }
        }
    }
    let mut stack: Vec<usize> = vertices.iter().copied().filter(|&v| indeg[v] == 0).collect();
    let mut removed = vec![false; useful.len()];
    while let Some(v) = stack.pop() {
        removed[v] = true;
        for &w in &reach.succ[v] {
            if useful[w] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
    }
    // Every remaining vertex has a remaining predecessor; walking back long
    // enough lands on a cycle.
    let mut v = *vertices.iter().find(|&&v| !removed[v]).expect("cyclic subgraph");
    for _ in 0..vertices.len() {
        v = *pred[v].iter().find(|&&u| !removed[u]).expect("remaining predecessor");
    }
    v
}

/// Checks a computation step by step against the transition relation.
pub fn replay_valid(a: &Automaton, tree: &LabeledTree, comp: &[Configuration]) -> bool {
    let (Some(first), Some(last)) = (comp.first(), comp.last()) else { return false };
    if !first.node.is_root() || !a.initial().contains(&first.state) {
        return false;
    }
    if !last.node.is_root() || !a.is_accepting(last.state) {
        return false;
    }
    let mut nodes = Vec::with_capacity(comp.len());
    for c in comp {
        match tree.find(&c.node) {
            Some(v) if c.state < a.num_states() => nodes.push(v),
            _ => return false,
        }
    }
    comp.windows(2).zip(nodes.windows(2)).all(|(c, v)| {
        let (from, to) = (v[0], v[1]);
        let Some(d) = Direction::ALL.into_iter().find(|&d| tree.neighbor(from, d) == Some(to)) else {
            return false;
        };
        a.moves(c[0].state, tree.label(from), tree.node_type_at(from), d)
            .iter()
            .any(|&(q, l, t)| q == c[1].state && l == tree.label(to) && t == tree.node_type_at(to))
    })
}
