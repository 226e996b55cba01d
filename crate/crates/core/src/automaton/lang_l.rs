//! A nondeterministic walker for the language L.
//!
//! A tree is in L iff some internal node `v` has an a-leaf somewhere before
//! its right subtree and at least two a-leaves inside it. The walker runs a
//! left-to-right depth-first traversal counting a-leaves modulo 3 (with an
//! extra value for "none yet"). When it climbs out of a left child and is
//! about to enter the right sibling, it may instead guess: descend into the
//! right subtree to some a-leaf `u` and remember the count `c` seen so far.
//! From `u` it traverses right to left back to the root, counting the
//! a-leaves before `u`. It accepts iff that number is `c + 1` modulo 3, which
//! forces `u` to be the second, fifth, ... a-leaf of the subtree.
//!
//! 25 states: `Down`, `UpLeft`, `UpRight` with counter in {none, 0, 1, 2};
//! `Guess`, `RevDown`, `RevUpRight`, `RevUpLeft` with counter mod 3; `Accept`.

use crate::tree::{Arity, ChildPos, Direction, Label, NodeType};

use super::{moves_geometry, Automaton, Transition};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum S {
    // None = no a-leaf seen yet
    Down(Option<u8>),
    UpLeft(Option<u8>),
    UpRight(Option<u8>),
    Guess(u8),
    RevDown(u8),
    RevUpRight(u8),
    RevUpLeft(u8),
    Accept,
}

const COUNTS: [Option<u8>; 4] = [None, Some(0), Some(1), Some(2)];

fn all_states() -> Vec<S> {
    let mut v = Vec::new();
    for c in COUNTS {
        v.push(S::Down(c));
    }
    for c in COUNTS {
        v.push(S::UpLeft(c));
    }
    for c in COUNTS {
        v.push(S::UpRight(c));
    }
    for r in 0..3 {
        v.extend([S::Guess(r), S::RevDown(r), S::RevUpRight(r), S::RevUpLeft(r)]);
    }
    v.push(S::Accept);
    v
}

fn name(s: S) -> String {
    let c = |c: Option<u8>| c.map_or("n".to_string(), |k| k.to_string());
    match s {
        S::Down(k) => format!("down{}", c(k)),
        S::UpLeft(k) => format!("upl{}", c(k)),
        S::UpRight(k) => format!("upr{}", c(k)),
        S::Guess(r) => format!("guess{r}"),
        S::RevDown(r) => format!("rdown{r}"),
        S::RevUpRight(r) => format!("rupr{r}"),
        S::RevUpLeft(r) => format!("rupl{r}"),
        S::Accept => "acc".to_string(),
    }
}

fn bump(c: Option<u8>) -> Option<u8> {
    Some(c.map_or(1, |k| (k + 1) % 3))
}

// Next states for one move of the walker: from `s` at a node `(label, from)`
// in direction `d` to a node of type `to`.
fn next(s: S, label: Label, from: NodeType, d: Direction, to: NodeType) -> Vec<S> {
    use Direction::*;
    let leaf = from.arity == Arity::Leaf;
    let a_leaf = leaf && label == Label::A;
    // climbing one step up from the current node, after finishing it
    let up_fwd = |c: Option<u8>| match (from.pos, d) {
        (ChildPos::Left, Up1) => vec![S::UpLeft(c)],
        (ChildPos::Right, Up2) => vec![S::UpRight(c)],
        _ => vec![],
    };
    let up_rev = |r: u8| match (from.pos, d) {
        (ChildPos::Right, Up2) => vec![S::RevUpRight(r)],
        (ChildPos::Left, Up1) if to.pos == ChildPos::Root => {
            if r == 0 {
                vec![S::Accept]
            } else {
                vec![]
            }
        }
        (ChildPos::Left, Up1) => vec![S::RevUpLeft(r)],
        _ => vec![],
    };
    match s {
        S::Down(c) if !leaf => if d == Down1 { vec![S::Down(c)] } else { vec![] },
        S::Down(c) => up_fwd(if a_leaf { bump(c) } else { c }),
        S::UpLeft(c) => match (d, c) {
            (Down2, Some(k)) => vec![S::Down(c), S::Guess(k)],
            (Down2, None) => vec![S::Down(c)],
            _ => vec![],
        },
        S::UpRight(c) => up_fwd(c),
        S::Guess(k) if !leaf => if d.is_down() { vec![S::Guess(k)] } else { vec![] },
        S::Guess(k) if a_leaf => up_rev((k + 1) % 3),
        S::Guess(_) => vec![],
        S::RevDown(r) if !leaf => if d == Down2 { vec![S::RevDown(r)] } else { vec![] },
        S::RevDown(r) => up_rev(if a_leaf { (r + 2) % 3 } else { r }),
        S::RevUpRight(r) => if d == Down1 { vec![S::RevDown(r)] } else { vec![] },
        S::RevUpLeft(r) => up_rev(r),
        S::Accept => vec![],
    }
}

/// Builds the walker described in the module documentation.
pub fn build_a_l() -> Automaton {
    let states = all_states();
    let id = |s: S| states.iter().position(|&x| x == s).expect("state listed");
    let mut transitions = Vec::new();
    for (from, d, to) in moves_geometry() {
        for &s in &states {
            for label in Label::ALL {
                for t in next(s, label, from, d, to) {
                    for dst_label in Label::ALL {
                        transitions.push(Transition {
                            src: id(s),
                            src_label: label,
                            src_type: from,
                            dst: id(t),
                            dst_label,
                            dst_type: to,
                            dir: d,
                        });
                    }
                }
            }
        }
    }
    let names = states.iter().map(|&s| name(s)).collect();
    Automaton::new(Label::ALL, names, [id(S::Down(None))], [id(S::Accept)], transitions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{accepting_witness, accepts, multiplicity, replay_valid, Multiplicity};
    use crate::tree::{enumerate_trees, in_language_L, LabeledTree};

    #[test]
    fn shape() {
        let a = build_a_l();
        assert_eq!(a.num_states(), 25);
        assert!(a.validate().is_empty());
        assert!(!a.is_deterministic());
    }

    #[test]
    fn examples() {
        let a = build_a_l();
        let yes: LabeledTree = "(b (a) (b (a) (a)))".parse().unwrap();
        let no: LabeledTree = "(b (b (a) (b (a) (b))) (a))".parse().unwrap();
        assert!(accepts(&a, &yes).unwrap());
        assert!(!accepts(&a, &no).unwrap());
        assert!(!accepts(&a, &"(b (b) (b (a) (a)))".parse().unwrap()).unwrap());
        let w = accepting_witness(&a, &yes).unwrap();
        assert!(replay_valid(&a, &yes, &w));
    }

    #[test]
    fn agrees_with_oracle_up_to_nine_nodes() {
        let a = build_a_l();
        for t in enumerate_trees(9) {
            assert_eq!(accepts(&a, &t).unwrap(), in_language_L(&t), "{t}");
        }
    }

    #[test]
    fn ambiguous_on_seven_nodes() {
        let a = build_a_l();
        let t: LabeledTree = "(b (a) (b (a) (b (a) (a))))".parse().unwrap();
        assert_eq!(multiplicity(&a, &t), Multiplicity::Many);
    }
}
