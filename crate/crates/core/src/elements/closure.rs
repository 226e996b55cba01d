//! The algebra of run relations generated by the a-free base patterns.
//!
//! Every rooted subcomposition of a composition of rank at most 2 has rank
//! at most 2, so the values of all such compositions are generated by
//! plugging values of rank 0, 1, 2 (or an open port) into rank-1 and rank-2
//! values.

use std::collections::{HashMap, HashSet};

use crate::pattern::{Atom, PatternExpr};
use crate::relation::{relation_compose, PortRelation, RelationContext};

/// A relation value with the smallest expression found for it.
#[derive(Clone, Debug)]
pub struct Value {
    pub expr: PatternExpr,
    pub rel: PortRelation,
}

/// Generated values by rank, in discovery order.
#[derive(Clone, Debug, Default)]
pub struct Closure {
    pub values: [Vec<Value>; 3],
    index: HashMap<PortRelation, (usize, usize)>,
    /// whether the generation finished within budget
    pub complete: bool,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn find(&self, r: &PortRelation) -> Option<&Value> {
        self.index.get(r).map(|&(k, i)| &self.values[k][i])
    }

    fn add(&mut self, expr: PatternExpr, rel: PortRelation) -> bool {
        if self.index.contains_key(&rel) {
            return false;
        }
        let k = rel.rank();
        self.index.insert(rel.clone(), (k, self.values[k].len()));
        self.values[k].push(Value { expr, rel });
        true
    }
}

/// Saturates the algebra, giving up after `max_values` values or
/// `max_steps` compositions.
pub fn generate(ctx: &mut RelationContext<'_>, max_values: usize, max_steps: usize) -> Closure {
    generate_with(ctx, max_values, max_steps, &[])
}

/// Like [`generate`], with extra generators given as named atoms. The names
/// must resolve in the context's environment.
pub fn generate_with(ctx: &mut RelationContext<'_>, max_values: usize, max_steps: usize, extra: &[&str]) -> Closure {
    let mut g = Generator::new(ctx, extra);
    while g.step(max_values, max_steps) {}
    g.closure
}

/// Breadth-first generation, one generation per [`Generator::step`]. Each
/// generation combines every tuple that involves at least one value from
/// the previous generation.
pub struct Generator {
    pub closure: Closure,
    /// value counts per rank before the latest generation
    pub previous: [usize; 3],
    steps: usize,
}

impl Generator {
    pub fn new(ctx: &mut RelationContext<'_>, extra: &[&str]) -> Self {
        let mut c = Closure::default();
        let seeds = [Atom::Base0, Atom::Base1, Atom::Base2]
            .into_iter()
            .chain(extra.iter().map(|n| Atom::Named(n.to_string())));
        for atom in seeds {
            let e = PatternExpr::Atom(atom);
            let r = ctx.eval(&e).expect("generator pattern");
            c.add(e, r);
        }
        Generator { closure: c, previous: [0; 3], steps: 0 }
    }

    /// Runs one generation. Returns false once the algebra is closed or a
    /// limit was hit.
    pub fn step(&mut self, max_values: usize, max_steps: usize) -> bool {
        let c = &mut self.closure;
        let ends = [c.values[0].len(), c.values[1].len(), c.values[2].len()];
        if self.previous == ends {
            c.complete = true;
            return false;
        }
        if c.len() >= max_values || self.steps >= max_steps {
            return false;
        }
        let old = self.previous;
        self.previous = ends;
        let mut fresh: Vec<(PatternExpr, PortRelation)> = Vec::new();
        // operands: None = open port, Some((rank, index))
        let mut operands: Vec<Option<(usize, usize)>> = vec![None];
        for (k, &end) in ends.iter().enumerate() {
            operands.extend((0..end).map(|i| Some((k, i))));
        }
        let is_new = |o: &Option<(usize, usize)>| o.is_some_and(|(k, i)| i >= old[k]);
        let rank_of = |o: &Option<(usize, usize)>| o.map_or(1, |(k, _)| k);
        let mut seen: HashSet<PortRelation> = HashSet::new();
        for hi in 0..ends[1] {
            for op in &operands {
                let Some((k, i)) = *op else { continue };
                if !(hi >= old[1] || is_new(op)) {
                    continue;
                }
                self.steps += 1;
                let h = &c.values[1][hi];
                let inner = &c.values[k][i];
                let r = relation_compose(&h.rel, &[Some(&inner.rel)]).expect("ranks");
                if !c.index.contains_key(&r) && seen.insert(r.clone()) {
                    fresh.push((h.expr.clone().plug(inner.expr.clone()), r));
                }
            }
        }
        for hi in 0..ends[2] {
            for x in &operands {
                for y in &operands {
                    if rank_of(x) + rank_of(y) > 2 || (x.is_none() && y.is_none()) {
                        continue;
                    }
                    if !(hi >= old[2] || is_new(x) || is_new(y)) {
                        continue;
                    }
                    self.steps += 1;
                    let h = &c.values[2][hi];
                    let get = |o: &Option<(usize, usize)>| o.map(|(k, i)| &c.values[k][i]);
                    let (vx, vy) = (get(x), get(y));
                    let r = relation_compose(&h.rel, &[vx.map(|v| &v.rel), vy.map(|v| &v.rel)]).expect("ranks");
                    if !c.index.contains_key(&r) && seen.insert(r.clone()) {
                        let e = PatternExpr::compose(h.expr.clone(), vec![vx.map(|v| v.expr.clone()), vy.map(|v| v.expr.clone())]);
                        fresh.push((e, r));
                    }
                }
            }
        }
        for (e, r) in fresh {
            c.add(e, r);
            if c.len() >= max_values {
                break;
            }
        }
        true
    }
}
