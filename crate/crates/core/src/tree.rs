//! Finite binary trees addressed by strings over `{1, 2}`.
//!
//! Trees are stored as a preorder arena. Every node has either two children
//! or none. The same arena type carries plain `{a, b}` trees and pattern
//! trees whose leaves may also be `*` ports.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    A,
    B,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::A, Label::B];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> char {
        match self {
            Label::A => 'a',
            Label::B => 'b',
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "a" => Ok(Label::A),
            "b" => Ok(Label::B),
            _ => Err(format!("unknown label `{s}`")),
        }
    }
}

/// Label of a pattern node: `a`, `b`, or the port marker `*`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PLabel {
    A,
    B,
    Star,
}

impl From<Label> for PLabel {
    fn from(l: Label) -> Self {
        match l {
            Label::A => PLabel::A,
            Label::B => PLabel::B,
        }
    }
}

/// Labels that can be written in the parenthesised tree format.
pub trait TreeLabel: Copy + Eq + fmt::Debug {
    fn symbol(self) -> char;
    fn from_symbol(c: char) -> Option<Self>;
}

impl TreeLabel for Label {
    fn symbol(self) -> char {
        Label::symbol(self)
    }
    fn from_symbol(c: char) -> Option<Self> {
        match c {
            'a' => Some(Label::A),
            'b' => Some(Label::B),
            _ => None,
        }
    }
}

impl TreeLabel for PLabel {
    fn symbol(self) -> char {
        match self {
            PLabel::A => 'a',
            PLabel::B => 'b',
            PLabel::Star => '*',
        }
    }
    fn from_symbol(c: char) -> Option<Self> {
        match c {
            'a' => Some(PLabel::A),
            'b' => Some(PLabel::B),
            '*' => Some(PLabel::Star),
            _ => None,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChildPos {
    Root,
    Left,
    Right,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arity {
    Internal,
    Leaf,
}

/// The local position of a node: which child it is, and whether it is a leaf.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeType {
    pub pos: ChildPos,
    pub arity: Arity,
}

impl NodeType {
    pub const ALL: [NodeType; 6] = [
        NodeType::new(ChildPos::Root, Arity::Internal),
        NodeType::new(ChildPos::Root, Arity::Leaf),
        NodeType::new(ChildPos::Left, Arity::Internal),
        NodeType::new(ChildPos::Left, Arity::Leaf),
        NodeType::new(ChildPos::Right, Arity::Internal),
        NodeType::new(ChildPos::Right, Arity::Leaf),
    ];

    /// Observation used for ports of patterns: a left internal node.
    pub const PORT: NodeType = NodeType::new(ChildPos::Left, Arity::Internal);

    pub const fn new(pos: ChildPos, arity: Arity) -> Self {
        NodeType { pos, arity }
    }

    pub fn index(self) -> usize {
        (self.pos as usize) * 2 + self.arity as usize
    }

    pub fn is_leaf(self) -> bool {
        self.arity == Arity::Leaf
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos = match self.pos {
            ChildPos::Root => "root",
            ChildPos::Left => "1",
            ChildPos::Right => "2",
        };
        let arity = match self.arity {
            Arity::Internal => "int",
            Arity::Leaf => "leaf",
        };
        write!(f, "{pos}.{arity}")
    }
}

impl FromStr for NodeType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (pos, arity) = s.split_once('.').ok_or_else(|| format!("bad node type `{s}`"))?;
        let pos = match pos {
            "root" => ChildPos::Root,
            "1" => ChildPos::Left,
            "2" => ChildPos::Right,
            _ => return Err(format!("bad node type `{s}`")),
        };
        let arity = match arity {
            "int" => Arity::Internal,
            "leaf" => Arity::Leaf,
            _ => return Err(format!("bad node type `{s}`")),
        };
        Ok(NodeType { pos, arity })
    }
}

/// Edge direction: `+i` goes to the i-th child, `-i` goes up from the i-th child.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Down1,
    Up1,
    Down2,
    Up2,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Down1, Direction::Up1, Direction::Down2, Direction::Up2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn reverse(self) -> Direction {
        match self {
            Direction::Down1 => Direction::Up1,
            Direction::Up1 => Direction::Down1,
            Direction::Down2 => Direction::Up2,
            Direction::Up2 => Direction::Down2,
        }
    }

    pub fn is_down(self) -> bool {
        matches!(self, Direction::Down1 | Direction::Down2)
    }

    /// The child position involved in the edge: 1 or 2.
    pub fn child(self) -> ChildPos {
        match self {
            Direction::Down1 | Direction::Up1 => ChildPos::Left,
            Direction::Down2 | Direction::Up2 => ChildPos::Right,
        }
    }

    /// Whether a move in this direction is geometrically possible from a node
    /// of type `from` to a node of type `to`.
    pub fn fits(self, from: NodeType, to: NodeType) -> bool {
        if self.is_down() {
            from.arity == Arity::Internal && to.pos == self.child()
        } else {
            from.pos == self.child() && to.arity == Arity::Internal
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::Down1 => "+1",
            Direction::Up1 => "-1",
            Direction::Down2 => "+2",
            Direction::Up2 => "-2",
        };
        f.write_str(s)
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "+1" => Ok(Direction::Down1),
            "-1" => Ok(Direction::Up1),
            "+2" => Ok(Direction::Down2),
            "-2" => Ok(Direction::Up2),
            _ => Err(format!("bad direction `{s}`")),
        }
    }
}

/// Node address: a string over `{1, 2}`, the empty string being the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NodeAddr(Vec<u8>);

impl NodeAddr {
    pub fn root() -> Self {
        NodeAddr(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u8) -> Self {
        debug_assert!(i == 1 || i == 2);
        let mut v = self.0.clone();
        v.push(i);
        NodeAddr(v)
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// `self` is a proper ancestor of `other`.
    pub fn is_above(&self, other: &NodeAddr) -> bool {
        self.0.len() < other.0.len() && other.0.starts_with(&self.0)
    }

    /// Longest common prefix.
    pub fn common_prefix(&self, other: &NodeAddr) -> NodeAddr {
        let n = self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count();
        NodeAddr(self.0[..n].to_vec())
    }
}

impl PartialOrd for NodeAddr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NodeAddr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for NodeAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for NodeAddr {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "ε" || s == "e" {
            return Ok(NodeAddr::root());
        }
        s.chars()
            .map(|c| match c {
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(format!("bad address `{s}`")),
            })
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map(NodeAddr)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct TreeNode<L> {
    label: L,
    parent: Option<usize>,
    children: Option<[usize; 2]>,
    pos: ChildPos,
    depth: usize,
}

/// A finite binary tree stored in preorder; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree<L> {
    nodes: Vec<TreeNode<L>>,
}

/// A tree over `{a, b}`.
pub type LabeledTree = Tree<Label>;

/// One preorder entry: label and whether the node has children.
pub type PreorderItem<L> = (L, bool);

impl<L: Copy> Tree<L> {
    pub fn leaf(label: L) -> Self {
        Tree { nodes: vec![TreeNode { label, parent: None, children: None, pos: ChildPos::Root, depth: 0 }] }
    }

    pub fn node(label: L, left: &Tree<L>, right: &Tree<L>) -> Self {
        let mut items = Vec::with_capacity(1 + left.len() + right.len());
        items.push((label, true));
        items.extend(left.preorder());
        items.extend(right.preorder());
        Tree::from_preorder(&items).expect("well-formed subtrees")
    }

    /// Rebuilds a tree from its preorder sequence of `(label, internal)`.
    pub fn from_preorder(items: &[PreorderItem<L>]) -> Option<Self> {
        if items.is_empty() {
            return None;
        }
        let mut nodes: Vec<TreeNode<L>> = Vec::with_capacity(items.len());
        // open internal nodes awaiting children: (index, children seen so far)
        let mut stack: Vec<(usize, u8)> = Vec::new();
        for (k, &(label, internal)) in items.iter().enumerate() {
            let (parent, pos, depth) = if k == 0 {
                (None, ChildPos::Root, 0)
            } else {
                let (p, filled) = stack.last_mut()?;
                *filled += 1;
                let (p, which) = (*p, *filled);
                if which == 2 {
                    stack.pop();
                }
                let pos = if which == 1 { ChildPos::Left } else { ChildPos::Right };
                nodes[p].children.as_mut().expect("open node is internal")[which as usize - 1] = k;
                (Some(p), pos, nodes[p].depth + 1)
            };
            nodes.push(TreeNode { label, parent, children: internal.then_some([usize::MAX; 2]), pos, depth });
            if internal {
                stack.push((k, 0));
            }
        }
        if !stack.is_empty() {
            return None;
        }
        Some(Tree { nodes })
    }

    pub fn preorder(&self) -> impl Iterator<Item = PreorderItem<L>> + '_ {
        self.nodes.iter().map(|n| (n.label, n.children.is_some()))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self, v: usize) -> L {
        self.nodes[v].label
    }

    pub fn labels(&self) -> impl Iterator<Item = L> + '_ {
        self.nodes.iter().map(|n| n.label)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.nodes[v].parent
    }

    pub fn children(&self, v: usize) -> Option<[usize; 2]> {
        self.nodes[v].children
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.nodes[v].children.is_none()
    }

    pub fn addr(&self, v: usize) -> NodeAddr {
        let mut digits = Vec::with_capacity(self.nodes[v].depth);
        let mut u = v;
        while let Some(p) = self.nodes[u].parent {
            digits.push(if self.nodes[u].pos == ChildPos::Left { 1 } else { 2 });
            u = p;
        }
        digits.reverse();
        NodeAddr(digits)
    }

    pub fn depth(&self, v: usize) -> usize {
        self.nodes[v].depth
    }

    /// Lowest common ancestor of two nodes, by climbing from the deeper one.
    pub fn lca_of(&self, mut u: usize, mut w: usize) -> usize {
        while u != w {
            if self.nodes[u].depth >= self.nodes[w].depth {
                u = self.nodes[u].parent.expect("non-root node");
            } else {
                w = self.nodes[w].parent.expect("non-root node");
            }
        }
        u
    }

    pub fn find(&self, addr: &NodeAddr) -> Option<usize> {
        let mut v = 0;
        for &d in addr.digits() {
            v = self.nodes[v].children?[d as usize - 1];
        }
        Some(v)
    }

    pub fn node_type_at(&self, v: usize) -> NodeType {
        let pos = self.nodes[v].pos;
        let arity = if self.nodes[v].children.is_some() { Arity::Internal } else { Arity::Leaf };
        NodeType { pos, arity }
    }

    /// The node reached from `v` by moving in direction `d`, if it exists.
    pub fn neighbor(&self, v: usize, d: Direction) -> Option<usize> {
        match d {
            Direction::Down1 => self.nodes[v].children.map(|c| c[0]),
            Direction::Down2 => self.nodes[v].children.map(|c| c[1]),
            Direction::Up1 | Direction::Up2 => {
                let p = self.nodes[v].parent?;
                let pos = self.node_type_at(v).pos;
                (pos == d.child()).then_some(p)
            }
        }
    }

    /// Leaves in left-to-right order (preorder restricted to leaves).
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&v| self.is_leaf(v))
    }

    pub fn map_labels<M: Copy>(&self, f: impl Fn(L) -> M) -> Tree<M> {
        Tree {
            nodes: self
                .nodes
                .iter()
                .map(|n| TreeNode { label: f(n.label), parent: n.parent, children: n.children, pos: n.pos, depth: n.depth })
                .collect(),
        }
    }
}

impl<L: TreeLabel> Tree<L> {
    /// Canonical text form: `(b (a) (b (a) (a)))`.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::with_capacity(self.len() * 4);
        let mut pending_close: Vec<usize> = Vec::new();
        for (k, n) in self.nodes.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            out.push('(');
            out.push(n.label.symbol());
            if n.children.is_some() {
                pending_close.push(2);
            } else {
                out.push(')');
                // close finished ancestors
                while let Some(last) = pending_close.last_mut() {
                    *last -= 1;
                    if *last == 0 {
                        pending_close.pop();
                        out.push(')');
                    } else {
                        break;
                    }
                }
            }
        }
        out
    }

    /// Parses the parenthesised format. Errors carry line and column.
    pub fn parse_sexpr(text: &str) -> Result<Self> {
        let mut p = SexprParser::new(text);
        p.skip_ws();
        let mut items = Vec::new();
        p.tree(&mut items)?;
        p.skip_ws();
        if let Some(c) = p.peek() {
            return Err(p.error(format!("unexpected `{c}` after tree")));
        }
        Ok(Tree::from_preorder(&items).expect("parser produces well-formed preorder"))
    }
}

impl fmt::Display for Tree<Label> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

impl FromStr for Tree<Label> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tree::parse_sexpr(s)
    }
}

struct SexprParser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> SexprParser<'a> {
    fn new(text: &'a str) -> Self {
        SexprParser { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn error(&self, msg: String) -> Error {
        Error::syntax(self.line, self.col, msg)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of input"))),
        }
    }

    // Iterative to cope with deep chains.
    fn tree<L: TreeLabel>(&mut self, items: &mut Vec<PreorderItem<L>>) -> Result<()> {
        // per open node: (index in items, line, col, number of children parsed)
        let mut open: Vec<(usize, usize, usize, u8)> = Vec::new();
        loop {
            self.skip_ws();
            let (line, col) = (self.line, self.col);
            self.expect('(')?;
            self.skip_ws();
            let label = match self.peek() {
                Some(c) => match L::from_symbol(c) {
                    Some(l) => {
                        self.bump();
                        l
                    }
                    None => return Err(self.error(format!("unknown label `{c}`"))),
                },
                None => return Err(self.error("expected a label, found end of input".into())),
            };
            items.push((label, false));
            open.push((items.len() - 1, line, col, 0));
            self.skip_ws();
            if self.peek() == Some('(') {
                continue;
            }
            // close nodes
            loop {
                self.skip_ws();
                let (idx, line, col, nchild) = *open.last().unwrap();
                match self.peek() {
                    Some(')') => {
                        self.bump();
                        if nchild == 1 {
                            return Err(Error::syntax(line, col, "node with exactly one child"));
                        }
                        if nchild > 2 {
                            return Err(Error::syntax(line, col, "node with more than two children"));
                        }
                        items[idx].1 = nchild == 2;
                        open.pop();
                        match open.last_mut() {
                            None => return Ok(()),
                            Some(parent) => parent.3 += 1,
                        }
                    }
                    Some('(') => {
                        if nchild >= 2 {
                            return Err(self.error("node with more than two children".into()));
                        }
                        break;
                    }
                    Some(c) => return Err(self.error(format!("unexpected `{c}`"))),
                    None => return Err(self.error("unexpected end of input".into())),
                }
            }
        }
    }
}

/// `Type(v)` for the node at `addr`.
pub fn node_type(tree: &LabeledTree, addr: &NodeAddr) -> Result<NodeType> {
    let v = tree.find(addr).ok_or_else(|| Error::UnknownAddress(addr.to_string()))?;
    Ok(tree.node_type_at(v))
}

/// Leaves labelled `a`, left to right. Internal `a` labels are ignored.
pub fn a_leaves(tree: &LabeledTree) -> Vec<NodeAddr> {
    tree.leaves().filter(|&v| tree.label(v) == Label::A).map(|v| tree.addr(v)).collect()
}

/// Lowest common ancestor: the longest common prefix of the addresses.
pub fn lca(tree: &LabeledTree, addrs: &[NodeAddr]) -> Result<NodeAddr> {
    let (first, rest) = addrs.split_first().ok_or_else(|| Error::Usage("lca of an empty set".into()))?;
    for a in addrs {
        if tree.find(a).is_none() {
            return Err(Error::UnknownAddress(a.to_string()));
        }
    }
    Ok(rest.iter().fold(first.clone(), |acc, a| acc.common_prefix(a)))
}

/// Membership in L: some consecutive triple of `a`-leaves `u_i, u_{i+1}, u_{i+2}`
/// has `lca(u_i, u_{i+1}, u_{i+2}) = lca(u_i, u_{i+1})`.
#[allow(non_snake_case)]
pub fn in_language_L(tree: &LabeledTree) -> bool {
    let leaves: Vec<usize> = tree.leaves().filter(|&v| tree.label(v) == Label::A).collect();
    // both lcas lie above the middle leaf, so the triple's lca is the higher one
    let lcas: Vec<usize> = leaves.windows(2).map(|w| tree.depth(tree.lca_of(w[0], w[1]))).collect();
    lcas.windows(2).any(|d| d[0] <= d[1])
}

/// All tree shapes with `internal` internal nodes, as preorder bit strings
/// (`true` = internal), in lexicographic order with leaf < internal.
fn shapes(internal: usize) -> Vec<Vec<bool>> {
    let mut table: Vec<Vec<Vec<bool>>> = vec![vec![vec![false]]];
    for k in 1..=internal {
        let mut out = Vec::new();
        for left in 0..k {
            let right = k - 1 - left;
            for l in &table[left] {
                for r in &table[right] {
                    let mut s = Vec::with_capacity(2 * k + 1);
                    s.push(true);
                    s.extend_from_slice(l);
                    s.extend_from_slice(r);
                    out.push(s);
                }
            }
        }
        out.sort();
        table.push(out);
    }
    table.swap_remove(internal)
}

/// Deterministic stream of every `{a, b}` tree with at most `max_nodes` nodes.
///
/// Order: by node count, then by shape (preorder structure bits, leaf before
/// internal), then by the preorder label string with `a < b`.
pub fn enumerate_trees(max_nodes: usize) -> TreeEnumerator {
    TreeEnumerator { max_nodes, size: 1, shapes: shapes(0), shape: 0, labeling: 0 }
}

pub struct TreeEnumerator {
    max_nodes: usize,
    size: usize,
    shapes: Vec<Vec<bool>>,
    shape: usize,
    labeling: u64,
}

impl Iterator for TreeEnumerator {
    type Item = LabeledTree;

    fn next(&mut self) -> Option<LabeledTree> {
        loop {
            if self.size > self.max_nodes {
                return None;
            }
            if self.shape >= self.shapes.len() {
                self.size += 2;
                self.shapes = shapes(self.size / 2);
                self.shape = 0;
                self.labeling = 0;
                continue;
            }
            if self.labeling >= 1u64 << self.size {
                self.shape += 1;
                self.labeling = 0;
                continue;
            }
            let bits = &self.shapes[self.shape];
            let n = self.size;
            let items: Vec<PreorderItem<Label>> = bits
                .iter()
                .enumerate()
                .map(|(k, &internal)| {
                    let bit = (self.labeling >> (n - 1 - k)) & 1;
                    (if bit == 0 { Label::A } else { Label::B }, internal)
                })
                .collect();
            self.labeling += 1;
            return Tree::from_preorder(&items);
        }
    }
}

/// Number of trees `enumerate_trees(max_nodes)` yields: Σ Catalan(k)·2^(2k+1).
pub fn tree_count(max_nodes: usize) -> u128 {
    let mut total = 0u128;
    let mut catalan = 1u128;
    let mut k = 0u128;
    while 2 * k < max_nodes as u128 {
        total += catalan << (2 * k + 1);
        catalan = catalan * 2 * (2 * k + 1) / (k + 2);
        k += 1;
    }
    total
}

/// Random tree with exactly `nodes` nodes (rounded down to odd); each label is
/// `a` with probability `p_a`.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, nodes: usize, p_a: f64) -> LabeledTree {
    let nodes = if nodes.is_multiple_of(2) { nodes.saturating_sub(1).max(1) } else { nodes };
    let mut items = Vec::with_capacity(nodes);
    let mut pending = vec![nodes];
    while let Some(size) = pending.pop() {
        let label = if rng.gen_bool(p_a) { Label::A } else { Label::B };
        if size == 1 {
            items.push((label, false));
        } else {
            let inner = (size - 1) / 2;
            let left = 2 * rng.gen_range(0..inner) + 1;
            items.push((label, true));
            pending.push(size - 1 - left);
            pending.push(left);
        }
    }
    Tree::from_preorder(&items).expect("generated preorder is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> LabeledTree {
        s.parse().unwrap()
    }

    fn addr(s: &str) -> NodeAddr {
        if s.is_empty() {
            NodeAddr::root()
        } else {
            s.parse().unwrap()
        }
    }

    #[test]
    fn node_types() {
        let tree = t("(b (a) (b))");
        assert_eq!(node_type(&tree, &addr("")).unwrap(), NodeType::new(ChildPos::Root, Arity::Internal));
        assert_eq!(node_type(&tree, &addr("1")).unwrap(), NodeType::new(ChildPos::Left, Arity::Leaf));
        let single = t("(a)");
        assert_eq!(node_type(&single, &addr("")).unwrap(), NodeType::new(ChildPos::Root, Arity::Leaf));
        assert!(matches!(node_type(&tree, &addr("11")), Err(Error::UnknownAddress(_))));
    }

    #[test]
    fn a_leaves_examples() {
        assert_eq!(a_leaves(&t("(b (a) (b (a) (a)))")), vec![addr("1"), addr("21"), addr("22")]);
        assert!(a_leaves(&t("(b (b) (b (b) (b)))")).is_empty());
        assert_eq!(a_leaves(&t("(a (a) (b))")), vec![addr("1")]);
    }

    #[test]
    fn lca_examples() {
        let tree = t("(b (b (a) (a)) (b (b (a) (a)) (a)))");
        assert_eq!(lca(&tree, &[addr("11"), addr("12")]).unwrap(), addr("1"));
        assert_eq!(lca(&tree, &[addr("1")]).unwrap(), addr("1"));
        assert_eq!(lca(&tree, &[addr("211"), addr("2")]).unwrap(), addr("2"));
        assert!(matches!(lca(&tree, &[]), Err(Error::Usage(_))));
        assert!(lca(&tree, &[addr("121")]).is_err());
        let deep = t("(b (b (a) (b (a) (a))) (a))");
        assert_eq!(lca(&deep, &[addr("121"), addr("2")]).unwrap(), addr(""));
    }

    #[test]
    fn membership_examples() {
        assert!(in_language_L(&t("(b (a) (b (a) (a)))")));
        assert!(!in_language_L(&t("(b (a) (a))")));
        assert!(!in_language_L(&t("(b (b (a) (b (a) (b))) (a))")));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_trees(1).count(), 2);
        assert_eq!(enumerate_trees(3).count(), 10);
        assert_eq!(enumerate_trees(5).count(), 74);
        assert_eq!(enumerate_trees(9).count() as u128, tree_count(9));
        assert_eq!(tree_count(9), 7882);
    }

    #[test]
    fn enumeration_is_duplicate_free() {
        let all: Vec<_> = enumerate_trees(7).collect();
        let set: std::collections::HashSet<_> = all.iter().map(|t| t.to_sexpr()).collect();
        assert_eq!(set.len(), all.len());
        assert_eq!(all[0].to_sexpr(), "(a)");
        assert_eq!(all[1].to_sexpr(), "(b)");
        assert_eq!(all[2].to_sexpr(), "(a (a) (a))");
    }

    #[test]
    fn parse_examples() {
        let tree = t("(b (a) (b (a) (a)))");
        assert_eq!(tree.len(), 5);
        assert_eq!(tree.to_sexpr(), "(b (a) (b (a) (a)))");
        assert_eq!(t("(a)").len(), 1);
        let err = "(b (a))".parse::<LabeledTree>().unwrap_err();
        assert!(err.to_string().contains("exactly one child"), "{err}");
        let err = "(b (a)\n  (c))".parse::<LabeledTree>().unwrap_err();
        match err {
            Error::Syntax { pos, .. } => assert_eq!((pos.line, pos.column), (2, 4)),
            other => panic!("{other}"),
        }
        assert!("(b (a) (a) (a))".parse::<LabeledTree>().is_err());
        assert!("(b (a) (a)) x".parse::<LabeledTree>().is_err());
        assert_eq!(t("  ( b(a)(b) )\n").to_sexpr(), "(b (a) (b))");
    }

    #[test]
    fn neighbors_and_directions() {
        let tree = t("(b (a) (b (a) (a)))");
        let v21 = tree.find(&addr("21")).unwrap();
        let v2 = tree.find(&addr("2")).unwrap();
        assert_eq!(tree.neighbor(v21, Direction::Up1), Some(v2));
        assert_eq!(tree.neighbor(v21, Direction::Up2), None);
        assert_eq!(tree.neighbor(v2, Direction::Down2), tree.find(&addr("22")));
        assert_eq!(tree.neighbor(0, Direction::Up1), None);
    }

    #[test]
    fn random_trees_have_requested_size() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 3, 9, 201] {
            let tree = random_tree(&mut rng, n, 0.5);
            assert_eq!(tree.len(), n);
            assert_eq!(t(&tree.to_sexpr()), tree);
        }
    }
}
