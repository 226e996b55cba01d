//! Run relations of automata over patterns, and their calculus.
//!
//! A run relation over a rank-k pattern is a subset of `(Q x {0..k})^2`,
//! stored as a bit matrix indexed by `port * |Q| + state`. Composition of
//! patterns is mirrored by [`relation_compose`], which never expands trees.

mod bitmatrix;

use std::collections::HashMap;
use std::fmt::Write;

use num_bigint::BigUint;
use num_traits::Zero;

pub use bitmatrix::BitMatrix;

use crate::automaton::{Automaton, Board, StateId};
use crate::error::{Error, Result};
use crate::pattern::{base0, base1, base2, prime_a, Atom, Env, ExplicitPattern, PatternExpr};

/// A relation over states, `n x n`.
pub type StateRelation = BitMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PortRelation {
    n: usize,
    rank: usize,
    m: BitMatrix,
}

impl PortRelation {
    /// The reflexive relation: only zero-length runs.
    pub fn identity(n: usize, rank: usize) -> Self {
        PortRelation { n, rank, m: BitMatrix::identity(n * (rank + 1)) }
    }

    pub fn from_matrix(n: usize, rank: usize, m: BitMatrix) -> Self {
        assert_eq!(m.rows(), n * (rank + 1));
        PortRelation { n, rank, m }
    }

    pub fn num_states(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.m
    }

    pub fn contains(&self, p: StateId, i: usize, q: StateId, j: usize) -> bool {
        self.m.get(i * self.n + p, j * self.n + q)
    }

    pub fn insert(&mut self, p: StateId, i: usize, q: StateId, j: usize) {
        self.m.set(i * self.n + p, j * self.n + q);
    }

    /// `{(p, q) : (p, i, q, j) in self}`.
    pub fn block(&self, i: usize, j: usize) -> StateRelation {
        let n = self.n;
        self.m.submatrix(i * n..(i + 1) * n, j * n..(j + 1) * n)
    }

    /// Entries `(p, i, q, j)` ordered by `(i, p, j, q)`.
    pub fn entries(&self) -> impl Iterator<Item = (StateId, usize, StateId, usize)> + '_ {
        let n = self.n;
        self.m.ones().map(move |(r, c)| (r % n, r / n, c % n, c / n))
    }

    pub fn is_subset(&self, other: &PortRelation) -> bool {
        self.n == other.n && self.rank == other.rank && self.m.is_subset(&other.m)
    }

    pub fn len(&self) -> usize {
        self.m.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// Text dump: `rank k` then sorted lines `p i -> q j`.
    pub fn dump(&self, names: &[String]) -> String {
        let mut lines: Vec<(StateId, usize, StateId, usize)> = self.entries().collect();
        lines.sort_unstable();
        let mut out = format!("rank {}\n", self.rank);
        for (p, i, q, j) in lines {
            let _ = writeln!(out, "{} {} -> {} {}", names[p], i, names[q], j);
        }
        out
    }
}

/// The run relation of `a` over an explicit pattern.
pub fn relation_direct(a: &Automaton, pat: &ExplicitPattern) -> PortRelation {
    let board = Board::from_pattern(pat.tree(), pat.ports());
    let n = a.num_states();
    let nodes = board.len();
    let mut port_of = vec![None; nodes];
    for (i, &v) in pat.ports().iter().enumerate() {
        port_of[v] = Some(i);
    }
    let mut rel = PortRelation::identity(n, pat.rank());
    let mut stamp = vec![usize::MAX; n * nodes];
    let mut buf = Vec::new();
    let mut stack = Vec::new();
    for (i, &start) in pat.ports().iter().enumerate() {
        for s in 0..n {
            let tag = i * n + s;
            stack.push((s, start));
            while let Some((q, v)) = stack.pop() {
                board.successors(a, q, v, &mut buf);
                for &(q2, w) in &buf {
                    if let Some(j) = port_of[w] {
                        rel.insert(s, i, q2, j);
                    } else if stamp[q2 * nodes + w] != tag {
                        stamp[q2 * nodes + w] = tag;
                        stack.push((q2, w));
                    }
                }
            }
        }
    }
    rel
}

/// The relation of `outer[inners...]`; `None` leaves a port open.
///
/// Landmarks are the composite ports followed by the junctions, the outer
/// leaf ports that receive a pattern. Composite runs are paths through the
/// landmark graph whose intermediate landmarks are junctions.
pub fn relation_compose(outer: &PortRelation, inners: &[Option<&PortRelation>]) -> Result<PortRelation> {
    if inners.len() != outer.rank {
        return Err(Error::Rank(format!("relation of rank {} given {} inner relations", outer.rank, inners.len())));
    }
    let n = outer.n;
    if inners.iter().flatten().any(|r| r.n != n) {
        return Err(Error::Rank("relations over different state sets".into()));
    }
    let mut next_port = 1;
    let mut outer_map = vec![0usize; outer.rank + 1];
    // (inner port -> landmark, pending junction slot)
    let mut inner_maps: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut junctions = 0;
    for (i, inner) in inners.iter().enumerate() {
        match inner {
            None => {
                outer_map[i + 1] = next_port;
                next_port += 1;
            }
            Some(r) => {
                let mut map = vec![usize::MAX; r.rank + 1];
                for slot in map.iter_mut().skip(1) {
                    *slot = next_port;
                    next_port += 1;
                }
                inner_maps.push((i, map));
                junctions += 1;
            }
        }
    }
    let ports = next_port;
    for (k, (i, map)) in inner_maps.iter_mut().enumerate() {
        outer_map[*i + 1] = ports + k;
        map[0] = ports + k;
    }
    let total = (ports + junctions) * n;
    let mut g = BitMatrix::new(total, total);
    let mut add = |r: &PortRelation, map: &[usize]| {
        for (p, i, q, j) in r.entries() {
            g.set(map[i] * n + p, map[j] * n + q);
        }
    };
    add(outer, &outer_map);
    for (inner, (_, map)) in inners.iter().flatten().zip(&inner_maps) {
        add(inner, map);
    }
    let pe = ports * n;
    let mut result = g.submatrix(0..pe, 0..pe);
    if junctions > 0 {
        let pj = g.submatrix(0..pe, pe..total);
        let jj = g.submatrix(pe..total, pe..total).star();
        let jp = g.submatrix(pe..total, 0..pe);
        result.union_with(&pj.mul(&jj).mul(&jp));
    }
    result.union_with(&BitMatrix::identity(pe));
    Ok(PortRelation { n, rank: ports - 1, m: result })
}

/// `r[s]` for rank-1 relations: `r` on top, `s` plugged into its port.
pub fn stack(r: &PortRelation, s: &PortRelation) -> PortRelation {
    relation_compose(r, &[Some(s)]).expect("rank-1 relations")
}

/// The relation of `chain(count, p)` where `r` is the relation of `p`.
pub fn chain_power(r: &PortRelation, count: &BigUint) -> Result<PortRelation> {
    if r.rank != 1 {
        return Err(Error::Rank(format!("chain of a rank-{} relation", r.rank)));
    }
    if count.is_zero() {
        return Err(Error::Usage("chain count must be positive".into()));
    }
    let mut acc: Option<PortRelation> = None;
    let mut base = r.clone();
    let bits = count.bits();
    for b in 0..bits {
        if count.bit(b) {
            acc = Some(match acc {
                None => base.clone(),
                Some(x) => stack(&x, &base),
            });
        }
        if b + 1 < bits {
            base = stack(&base, &base);
        }
    }
    Ok(acc.expect("positive count"))
}

/// Inner loops at the junction of `D1[D1[*]]`, from the relation of `D1`.
pub fn inner_loops(d1: &PortRelation) -> Result<StateRelation> {
    if d1.rank != 1 {
        return Err(Error::Rank(format!("inner loops need a rank-1 relation, got rank {}", d1.rank)));
    }
    Ok(d1.block(1, 1).union(&d1.block(0, 0)).star())
}

/// `loops . delta . loops`, applied at every port pair.
pub fn transfers(delta: &PortRelation, loops: &StateRelation) -> PortRelation {
    let n = delta.n;
    let ports = delta.rank + 1;
    let mut big = BitMatrix::new(ports * n, ports * n);
    for i in 0..ports {
        for (p, q) in loops.ones() {
            big.set(i * n + p, i * n + q);
        }
    }
    PortRelation { n, rank: delta.rank, m: big.mul(&delta.m).mul(&big) }
}

/// The arrow relations between states derived from transfers over the
/// elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferTable {
    pub loops: StateRelation,
    /// root loop over `D0`
    pub circle: StateRelation,
    /// root loop over `Da`
    pub circle_a: StateRelation,
    pub down: StateRelation,
    pub up: StateRelation,
    /// `D2`, leaf port 1 to root (↗)
    pub north_east: StateRelation,
    /// `D2`, leaf port 2 to root (↖)
    pub north_west: StateRelation,
    /// `D2`, root to leaf port 1 (↙)
    pub south_west: StateRelation,
    /// `D2`, root to leaf port 2 (↘)
    pub south_east: StateRelation,
    /// `D2`, leaf port 2 to leaf port 1 (↶)
    pub turn_left: StateRelation,
    /// `D2`, leaf port 1 to leaf port 2 (↷)
    pub turn_right: StateRelation,
}

impl TransferTable {
    /// Builds the table from the run relations of `D0`, `Da`, `D1`, `D2`.
    pub fn new(d0: &PortRelation, da: &PortRelation, d1: &PortRelation, d2: &PortRelation) -> Result<Self> {
        let loops = inner_loops(d1)?;
        let g0 = transfers(d0, &loops);
        let ga = transfers(da, &loops);
        let g1 = transfers(d1, &loops);
        let g2 = transfers(d2, &loops);
        Ok(TransferTable {
            circle: g0.block(0, 0),
            circle_a: ga.block(0, 0),
            down: g1.block(0, 1),
            up: g1.block(1, 0),
            north_east: g2.block(1, 0),
            north_west: g2.block(2, 0),
            south_west: g2.block(0, 1),
            south_east: g2.block(0, 2),
            turn_left: g2.block(2, 1),
            turn_right: g2.block(1, 2),
            loops,
        })
    }
}

/// Whether two expressions have equal rank and equal run relation.
pub fn equivalent(ctx: &mut RelationContext<'_>, e1: &PatternExpr, e2: &PatternExpr) -> Result<bool> {
    let (r1, r2) = (ctx.env().rank(e1)?, ctx.env().rank(e2)?);
    if r1 != r2 {
        return Ok(false);
    }
    Ok(ctx.eval(e1)? == ctx.eval(e2)?)
}

/// Evaluates run relations of pattern expressions compositionally, caching
/// results per expression.
pub struct RelationContext<'a> {
    a: &'a Automaton,
    env: &'a Env,
    memo: HashMap<PatternExpr, PortRelation>,
    bases: [PortRelation; 4],
}

impl<'a> RelationContext<'a> {
    pub fn new(a: &'a Automaton, env: &'a Env) -> Self {
        let bases = [base0(), base1(), base2(), prime_a()].map(|p| relation_direct(a, &p));
        RelationContext { a, env, memo: HashMap::new(), bases }
    }

    pub fn automaton(&self) -> &Automaton {
        self.a
    }

    pub fn env(&self) -> &Env {
        self.env
    }

    pub fn eval(&mut self, e: &PatternExpr) -> Result<PortRelation> {
        if let Some(r) = self.memo.get(e) {
            return Ok(r.clone());
        }
        let r = match e {
            PatternExpr::Atom(Atom::Base0) => self.bases[0].clone(),
            PatternExpr::Atom(Atom::Base1) => self.bases[1].clone(),
            PatternExpr::Atom(Atom::Base2) => self.bases[2].clone(),
            PatternExpr::Atom(Atom::PrimeA) => self.bases[3].clone(),
            PatternExpr::Atom(Atom::Named(name)) => relation_direct(self.a, self.env.named(name)?),
            PatternExpr::Atom(el) => {
                let def = self.env.element(el)?;
                self.eval(&def)?
            }
            PatternExpr::Compose(h, items) => {
                let outer = self.eval(h)?;
                let inner: Vec<Option<PortRelation>> =
                    items.iter().map(|it| it.as_ref().map(|x| self.eval(x)).transpose()).collect::<Result<_>>()?;
                let refs: Vec<Option<&PortRelation>> = inner.iter().map(Option::as_ref).collect();
                relation_compose(&outer, &refs)?
            }
            PatternExpr::Chain(k, body) => {
                let r = self.eval(body)?;
                chain_power(&r, k)?
            }
        };
        self.memo.insert(e.clone(), r.clone());
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{moves_geometry, random_automaton, Transition};
    use crate::pattern::parse_pattern;
    use crate::tree::Label;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// One state stepping between any two adjacent b-nodes.
    fn walker() -> Automaton {
        let ts = moves_geometry().map(|(from, dir, to)| Transition {
            src: 0,
            src_label: Label::B,
            src_type: from,
            dst: 0,
            dst_label: Label::B,
            dst_type: to,
            dir,
        });
        Automaton::with_states(1, [0], [0], ts)
    }

    #[test]
    fn empty_automaton_is_reflexive() {
        let a = Automaton::with_states(3, [0], [1], []);
        let r = relation_direct(&a, &base2());
        assert_eq!(r, PortRelation::identity(3, 2));
    }

    #[test]
    fn walker_on_base1() {
        let r = relation_direct(&walker(), &base1());
        assert!(r.contains(0, 0, 0, 1) && r.contains(0, 1, 0, 0));
        assert_eq!(r.dump(&["s".into()]), "rank 1\ns 0 -> s 0\ns 0 -> s 1\ns 1 -> s 0\ns 1 -> s 1\n");
    }

    #[test]
    fn compose_matches_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let env = Env::new();
        for _ in 0..30 {
            let a = random_automaton(&mut rng, 3, 0.15);
            let mut ctx = RelationContext::new(&a, &env);
            for s in ["chain(2, base1)", "base2[base1, *]", "base2[base0, base2[*, primeA]]", "chain(5, base2[*, primeA])"] {
                let e = parse_pattern(s).unwrap();
                let direct = relation_direct(&a, &env.expand(&e, 10_000).unwrap());
                assert_eq!(ctx.eval(&e).unwrap(), direct, "{s}");
            }
        }
    }

    #[test]
    fn chain_power_adds_exponents() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_automaton(&mut rng, 3, 0.2);
        let r = relation_direct(&a, &Env::new().expand(&parse_pattern("base2[*, primeA]").unwrap(), 100).unwrap());
        let p = |k: u32| chain_power(&r, &BigUint::from(k)).unwrap();
        assert_eq!(p(1), r);
        for (x, y) in [(1, 1), (3, 5), (17, 30), (64, 7)] {
            assert_eq!(stack(&p(x), &p(y)), p(x + y));
        }
        assert!(chain_power(&r, &BigUint::zero()).is_err());
    }

    #[test]
    fn transfers_with_identity_loops() {
        let r = relation_direct(&walker(), &base2());
        let id = BitMatrix::identity(1);
        assert_eq!(transfers(&r, &id), r);
        let loops = inner_loops(&relation_direct(&walker(), &base1())).unwrap();
        assert!(r.is_subset(&transfers(&r, &loops)));
    }
}
