//! Patterns: trees over `{a, b, *}` whose `*`-leaves are ports.
//!
//! Port 0 is the root; ports `1..=k` are the `*`-leaves from left to right.
//! Composition identifies a `*`-leaf with the root of the plugged pattern.
//! Explicit patterns are manipulated as preorder streams, which makes
//! substitution and chains plain concatenation.

mod expr;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

pub use expr::{chain_or_single, parse_pattern, print_pattern, Atom, PatternExpr};

use crate::error::{Error, Result};
use crate::tree::{ChildPos, Label, LabeledTree, PLabel, PreorderItem, Tree, TreeLabel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitPattern {
    tree: Tree<PLabel>,
    ports: Vec<usize>,
}

/// Structural problems of a pattern tree; empty means valid.
pub fn validate_pattern(tree: &Tree<PLabel>) -> Vec<String> {
    let mut out = Vec::new();
    if tree.len() < 2 {
        out.push("a pattern needs at least two nodes".to_string());
    }
    if tree.label(0) != PLabel::B {
        out.push("the root port must be labelled b".to_string());
    }
    for v in 0..tree.len() {
        let l = tree.label(v);
        if l != PLabel::B && !tree.is_leaf(v) {
            out.push(format!("internal node {} labelled {}", tree.addr(v), l.symbol()));
        }
        if l == PLabel::Star && tree.node_type_at(v).pos != ChildPos::Left {
            out.push(format!("port {} is not a left child", tree.addr(v)));
        }
    }
    out
}

impl ExplicitPattern {
    pub fn new(tree: Tree<PLabel>) -> Result<Self> {
        if let Some(problem) = validate_pattern(&tree).into_iter().next() {
            return Err(Error::InvalidPattern(problem));
        }
        let ports = std::iter::once(0).chain((1..tree.len()).filter(|&v| tree.label(v) == PLabel::Star)).collect();
        Ok(ExplicitPattern { tree, ports })
    }

    fn from_stream(items: &[PreorderItem<PLabel>]) -> Result<Self> {
        let tree = Tree::from_preorder(items).ok_or_else(|| Error::InvalidPattern("malformed preorder".into()))?;
        ExplicitPattern::new(tree)
    }

    pub fn parse(text: &str) -> Result<Self> {
        ExplicitPattern::new(Tree::parse_sexpr(text)?)
    }

    pub fn tree(&self) -> &Tree<PLabel> {
        &self.tree
    }

    /// Port nodes; index 0 is the root port.
    pub fn ports(&self) -> &[usize] {
        &self.ports
    }

    pub fn rank(&self) -> usize {
        self.ports.len() - 1
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn count_label(&self, l: PLabel) -> usize {
        self.tree.labels().filter(|&x| x == l).count()
    }

    /// Plugs `items[i]` into leaf port `i + 1`.
    pub fn plug(&self, items: &[Option<&ExplicitPattern>]) -> Result<ExplicitPattern> {
        if items.len() != self.rank() {
            return Err(Error::Rank(format!("pattern of rank {} given {} items", self.rank(), items.len())));
        }
        let mut out = Vec::new();
        let mut port = 0;
        for (l, leaf) in self.tree.preorder() {
            if l == PLabel::Star {
                match items[port] {
                    Some(inner) => out.extend(inner.tree.preorder()),
                    None => out.push((l, leaf)),
                }
                port += 1;
            } else {
                out.push((l, leaf));
            }
        }
        ExplicitPattern::from_stream(&out)
    }

    /// The tree with ports relabelled `b`, when there are no open ports.
    pub fn to_tree(&self) -> Result<LabeledTree> {
        if self.rank() > 0 {
            return Err(Error::Rank(format!("pattern still has {} open ports", self.rank())));
        }
        Ok(self.tree.map_labels(|l| if l == PLabel::A { Label::A } else { Label::B }))
    }
}

impl std::fmt::Display for ExplicitPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.tree.to_sexpr())
    }
}

fn explicit(text: &str) -> ExplicitPattern {
    ExplicitPattern::parse(text).expect("built-in pattern")
}

pub fn base0() -> ExplicitPattern {
    explicit("(b (b) (b))")
}

pub fn base1() -> ExplicitPattern {
    explicit("(b (*) (b))")
}

pub fn base2() -> ExplicitPattern {
    explicit("(b (*) (b (*) (b)))")
}

pub fn prime_a() -> ExplicitPattern {
    explicit("(b (a) (b))")
}

/// The four built-in atoms in the order `base0, base1, base2, primeA`.
pub fn base_elements() -> [ExplicitPattern; 4] {
    [base0(), base1(), base2(), prime_a()]
}

/// Definitions the atoms of an expression resolve against.
#[derive(Clone, Debug, Default)]
pub struct Env {
    /// Expressions for `D0`, `D1`, `D2`, free of element atoms.
    elements: Option<[PatternExpr; 3]>,
    named: BTreeMap<String, ExplicitPattern>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn with_elements(mut self, d: [PatternExpr; 3]) -> Result<Self> {
        if d.iter().any(PatternExpr::uses_elements) {
            return Err(Error::InvalidPattern("element definitions may not use D0, D1, D2 or Da".into()));
        }
        self.elements = Some(d);
        Ok(self)
    }

    pub fn add_named(&mut self, name: &str, p: ExplicitPattern) {
        self.named.insert(name.to_string(), p);
    }

    pub fn named(&self, name: &str) -> Result<&ExplicitPattern> {
        self.named.get(name).ok_or_else(|| Error::Usage(format!("unknown pattern @{name}")))
    }

    /// The defining expression of an element atom.
    pub fn element(&self, a: &Atom) -> Result<PatternExpr> {
        let d = self.elements.as_ref().ok_or_else(|| Error::Usage(format!("{a} needs an elements file")))?;
        Ok(match a {
            Atom::D0 => d[0].clone(),
            Atom::D1 => d[1].clone(),
            Atom::D2 => d[2].clone(),
            Atom::Da => d[1].clone().plug(Atom::PrimeA.into()),
            other => return Err(Error::Usage(format!("{other} is not an element"))),
        })
    }

    pub fn atom_rank(&self, a: &Atom) -> Result<usize> {
        Ok(match a {
            Atom::Base0 | Atom::PrimeA | Atom::D0 | Atom::Da => 0,
            Atom::Base1 | Atom::D1 => 1,
            Atom::Base2 | Atom::D2 => 2,
            Atom::Named(n) => self.named(n)?.rank(),
        })
    }

    pub fn rank(&self, e: &PatternExpr) -> Result<usize> {
        match e {
            PatternExpr::Atom(a) => self.atom_rank(a),
            PatternExpr::Compose(h, items) => {
                let hr = self.rank(h)?;
                if hr != items.len() {
                    return Err(Error::Rank(format!("{h} has rank {hr} but is given {} items", items.len())));
                }
                items.iter().map(|it| it.as_ref().map_or(Ok(1), |x| self.rank(x))).sum()
            }
            PatternExpr::Chain(_, body) => match self.rank(body)? {
                1 => Ok(1),
                r => Err(Error::Rank(format!("chain body {body} has rank {r}, expected 1"))),
            },
        }
    }

    /// Node count of the expansion, without expanding.
    pub fn node_count(&self, e: &PatternExpr) -> Result<BigUint> {
        Ok(match e {
            PatternExpr::Atom(a) if a.is_element() => self.node_count(&self.element(a)?)?,
            PatternExpr::Atom(a) => BigUint::from(self.atom_pattern(a)?.len()),
            PatternExpr::Compose(h, items) => {
                let mut n = self.node_count(h)?;
                for it in items.iter().flatten() {
                    n += self.node_count(it)? - 1u32;
                }
                n
            }
            PatternExpr::Chain(k, body) => k * (self.node_count(body)? - 1u32) + 1u32,
        })
    }

    fn atom_pattern(&self, a: &Atom) -> Result<ExplicitPattern> {
        Ok(match a {
            Atom::Base0 => base0(),
            Atom::Base1 => base1(),
            Atom::Base2 => base2(),
            Atom::PrimeA => prime_a(),
            Atom::Named(n) => self.named(n)?.clone(),
            element => self.expand(&self.element(element)?, usize::MAX)?,
        })
    }

    /// Materializes an expression, refusing results over `max_nodes` nodes.
    pub fn expand(&self, e: &PatternExpr, max_nodes: usize) -> Result<ExplicitPattern> {
        self.rank(e)?;
        let n = self.node_count(e)?;
        if n.to_usize().is_none_or(|n| n > max_nodes) {
            return Err(Error::Budget(format!("expansion of {e} has {n} nodes, budget is {max_nodes}")));
        }
        self.expand_unchecked(e)
    }

    fn expand_unchecked(&self, e: &PatternExpr) -> Result<ExplicitPattern> {
        match e {
            PatternExpr::Atom(a) => self.atom_pattern(a),
            PatternExpr::Compose(h, items) => {
                let head = self.expand_unchecked(h)?;
                let inner: Vec<Option<ExplicitPattern>> =
                    items.iter().map(|it| it.as_ref().map(|x| self.expand_unchecked(x)).transpose()).collect::<Result<_>>()?;
                let refs: Vec<Option<&ExplicitPattern>> = inner.iter().map(Option::as_ref).collect();
                head.plug(&refs)
            }
            PatternExpr::Chain(k, body) => {
                let body = self.expand_unchecked(body)?;
                let k = k.to_usize().ok_or_else(|| Error::Budget("chain count too large".into()))?;
                let stream: Vec<_> = body.tree.preorder().collect();
                let star = stream.iter().position(|&(l, _)| l == PLabel::Star).expect("rank-1 body");
                let mut out = Vec::with_capacity(k * (stream.len() - 1) + 1);
                for _ in 0..k {
                    out.extend_from_slice(&stream[..star]);
                }
                out.push(stream[star]);
                for _ in 0..k {
                    out.extend_from_slice(&stream[star + 1..]);
                }
                ExplicitPattern::from_stream(&out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bases() {
        let ranks: Vec<usize> = base_elements().iter().map(ExplicitPattern::rank).collect();
        assert_eq!(ranks, [0, 1, 2, 0]);
        let b2 = base2();
        assert!(b2.ports()[1..].iter().all(|&p| b2.tree().node_type_at(p).pos == ChildPos::Left));
        let a = prime_a();
        assert_eq!(a.to_string(), "(b (a) (b))");
    }

    #[test]
    fn validation() {
        let bad = |s: &str| validate_pattern(&Tree::parse_sexpr(s).unwrap());
        assert!(!bad("(b (b) (*))").is_empty());
        assert!(!bad("(b)").is_empty());
        assert!(!bad("(a (b) (b))").is_empty());
        assert!(bad("(b (*) (b (*) (b)))").is_empty());
    }

    #[test]
    fn expansion() {
        let env = Env::new();
        let e = parse_pattern("chain(5, base1)").unwrap();
        let p = env.expand(&e, 1000).unwrap();
        assert_eq!((p.rank(), p.len()), (1, 11));
        let p = env.expand(&parse_pattern("base1[base2]").unwrap(), 1000).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.to_string(), "(b (b (*) (b (*) (b))) (b))");
        let p = env.expand(&parse_pattern("base2[*, primeA]").unwrap(), 1000).unwrap();
        assert_eq!((p.rank(), p.count_label(PLabel::A)), (1, 1));
        assert!(matches!(env.expand(&parse_pattern("chain(1000, base1)").unwrap(), 100), Err(Error::Budget(_))));
        assert!(matches!(env.rank(&parse_pattern("base1[*, *]").unwrap()), Err(Error::Rank(_))));
        assert!(env.rank(&parse_pattern("D1").unwrap()).is_ok());
        assert!(env.expand(&parse_pattern("D1").unwrap(), 100).is_err());
    }

    #[test]
    fn chain_is_iterated_plug() {
        let env = Env::new();
        let body = parse_pattern("base2[*, primeA]").unwrap();
        let chained = env.expand(&PatternExpr::chain(3u32, body.clone()), 1000).unwrap();
        let nested = body.clone().plug(body.clone().plug(body));
        assert_eq!(env.expand(&nested, 1000).unwrap(), chained);
    }
}
