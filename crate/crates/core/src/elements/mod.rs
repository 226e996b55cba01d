//! Idempotent elements `D0`, `D1`, `D2` for an automaton.
//!
//! A triple is accepted when these relation equalities hold:
//!
//! | | |
//! |---|---|
//! | E1 | `D1[D1] = D1` |
//! | E2 | `D1[D0] = D0` |
//! | E3 | `D1[D2] = D2` |
//! | E4 | `D2[D0, D0] = D0` |
//! | E5 | `D2[D0, *] = D1` |
//! | E6 | `D2[*, D0] = D1` |
//! | E7 | `D2[D1, *] = D2` |
//! | E8 | `D2[*, D1] = D2` |
//!
//! Every rooted subcomposition of a composition of rank at most 2 again has
//! rank at most 2, so by induction on the composition and congruence of
//! relations, E1 to E8 make every such composition equal to the element of
//! its rank. Random compositions are sampled on top as a cross-check.
//!
//! The search tries the bare base patterns, then an idempotent power of
//! `base1` with wrapped `base0`/`base2`, then every pair `(D0, D2)` of the
//! relation algebra generated by the bases, deriving `D1 = D2[D0, *]`.

pub mod closure;

use std::fmt::Write;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pattern::{chain_or_single, parse_pattern, Atom, Env, ExplicitPattern, PatternExpr};
use crate::relation::{relation_compose, stack, PortRelation, RelationContext, TransferTable};

use closure::{Closure, Generator, Value};

/// Expressions and run relations of the elements, plus `Da = D1[primeA]`.
#[derive(Clone, Debug)]
pub struct ElementTriple {
    pub d0: PatternExpr,
    pub d1: PatternExpr,
    pub d2: PatternExpr,
    /// named patterns the expressions refer to
    pub named: Vec<(String, ExplicitPattern)>,
    pub r0: PortRelation,
    pub r1: PortRelation,
    pub r2: PortRelation,
    pub ra: PortRelation,
}

impl ElementTriple {
    pub fn from_exprs(ctx: &mut RelationContext<'_>, d: [PatternExpr; 3]) -> Result<Self> {
        let [d0, d1, d2] = d;
        for (e, want) in [(&d0, 0), (&d1, 1), (&d2, 2)] {
            let r = ctx.env().rank(e)?;
            if r != want {
                return Err(Error::Rank(format!("element {e} has rank {r}, expected {want}")));
            }
            if e.uses_elements() {
                return Err(Error::InvalidPattern(format!("element {e} refers to other elements")));
            }
        }
        let r0 = ctx.eval(&d0)?;
        let r1 = ctx.eval(&d1)?;
        let r2 = ctx.eval(&d2)?;
        let ra = ctx.eval(&make_delta_a(&d1))?;
        Ok(ElementTriple { d0, d1, d2, named: Vec::new(), r0, r1, r2, ra })
    }

    pub fn exprs(&self) -> [PatternExpr; 3] {
        [self.d0.clone(), self.d1.clone(), self.d2.clone()]
    }

    /// An environment resolving `D0`, `D1`, `D2`, `Da` to this triple.
    pub fn env(&self) -> Env {
        let mut env = Env::new();
        for (n, p) in &self.named {
            env.add_named(n, p.clone());
        }
        env.with_elements(self.exprs()).expect("element expressions are element-free")
    }

    pub fn transfer_table(&self) -> TransferTable {
        TransferTable::new(&self.r0, &self.ra, &self.r1, &self.r2).expect("ranks")
    }
}

/// `Da = D1[primeA]`.
pub fn make_delta_a(d1: &PatternExpr) -> PatternExpr {
    d1.clone().plug(Atom::PrimeA.into())
}

/// Outcome of one equation.
#[derive(Clone, Debug)]
pub struct EquationResult {
    pub name: String,
    pub passed: bool,
    /// entries `(p, i, q, j)` present on the left but not on the right
    pub missing: Vec<(usize, usize, usize, usize)>,
    /// entries present on the right but not on the left
    pub extra: Vec<(usize, usize, usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct EquationReport {
    pub equations: Vec<EquationResult>,
    pub samples: usize,
    /// sampled compositions not equivalent to their element
    pub sample_failures: Vec<String>,
}

impl EquationReport {
    pub fn passed(&self) -> bool {
        self.equations.iter().all(|e| e.passed) && self.sample_failures.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for e in &self.equations {
            let _ = writeln!(out, "{} {}", e.name, if e.passed { "ok" } else { "FAILED" });
            for (p, i, q, j) in e.missing.iter().take(8) {
                let _ = writeln!(out, "  only left: ({p},{i},{q},{j})");
            }
            for (p, i, q, j) in e.extra.iter().take(8) {
                let _ = writeln!(out, "  only right: ({p},{i},{q},{j})");
            }
        }
        let _ = writeln!(out, "samples {} failures {}", self.samples, self.sample_failures.len());
        for f in self.sample_failures.iter().take(8) {
            let _ = writeln!(out, "  {f}");
        }
        out
    }
}

fn compare(name: &str, lhs: &PortRelation, rhs: &PortRelation) -> EquationResult {
    let diff = |x: &PortRelation, y: &PortRelation| -> Vec<_> {
        if x.rank() != y.rank() {
            return x.entries().collect();
        }
        x.entries().filter(|&(p, i, q, j)| !y.contains(p, i, q, j)).collect()
    };
    EquationResult { name: name.into(), passed: lhs == rhs, missing: diff(lhs, rhs), extra: diff(rhs, lhs) }
}

/// The eight equations on relation values.
pub fn equations(r0: &PortRelation, r1: &PortRelation, r2: &PortRelation) -> Vec<EquationResult> {
    let c = |outer: &PortRelation, inner: &[Option<&PortRelation>]| relation_compose(outer, inner).expect("ranks");
    vec![
        compare("E1", &stack(r1, r1), r1),
        compare("E2", &c(r1, &[Some(r0)]), r0),
        compare("E3", &c(r1, &[Some(r2)]), r2),
        compare("E4", &c(r2, &[Some(r0), Some(r0)]), r0),
        compare("E5", &c(r2, &[Some(r0), None]), r1),
        compare("E6", &c(r2, &[None, Some(r0)]), r1),
        compare("E7", &c(r2, &[Some(r1), None]), r2),
        compare("E8", &c(r2, &[None, Some(r1)]), r2),
    ]
}

fn equations_hold(r0: &PortRelation, r1: &PortRelation, r2: &PortRelation) -> bool {
    equations(r0, r1, r2).iter().all(|e| e.passed)
}

/// A random composition of `D0`, `D1`, `D2` with at most `size` atoms and
/// rank at most 2.
pub fn random_element_composition<R: Rng + ?Sized>(rng: &mut R, size: usize) -> PatternExpr {
    loop {
        let mut budget = size.max(1);
        let e = random_expr(rng, &mut budget);
        if rank_of(&e) <= 2 {
            return e;
        }
    }
}

fn random_expr<R: Rng + ?Sized>(rng: &mut R, budget: &mut usize) -> PatternExpr {
    *budget -= 1;
    let head = match rng.gen_range(0..3) {
        0 => Atom::D0,
        1 => Atom::D1,
        _ => Atom::D2,
    };
    let arity = match head {
        Atom::D0 => 0,
        Atom::D1 => 1,
        _ => 2,
    };
    if arity == 0 {
        return head.into();
    }
    let items: Vec<Option<PatternExpr>> = (0..arity)
        .map(|_| if *budget > 0 && rng.gen_bool(0.6) { Some(random_expr(rng, budget)) } else { None })
        .collect();
    if items.iter().all(Option::is_none) {
        head.into()
    } else {
        PatternExpr::compose(head.into(), items)
    }
}

fn rank_of(e: &PatternExpr) -> usize {
    Env::new().rank(e).expect("element atoms have fixed ranks")
}

/// Checks E1 to E8 and compares `samples` random compositions with the
/// element of the same rank.
pub fn check_equations<R: Rng + ?Sized>(
    ctx: &mut RelationContext<'_>,
    triple: &ElementTriple,
    samples: usize,
    rng: &mut R,
) -> EquationReport {
    let equations = equations(&triple.r0, &triple.r1, &triple.r2);
    let env = triple.env();
    let mut sctx = RelationContext::new(ctx.automaton(), &env);
    let mut sample_failures = Vec::new();
    for _ in 0..samples {
        let e = random_element_composition(rng, 8);
        let want = match rank_of(&e) {
            0 => &triple.r0,
            1 => &triple.r1,
            _ => &triple.r2,
        };
        match sctx.eval(&e) {
            Ok(r) if &r == want => {}
            Ok(_) => sample_failures.push(e.to_string()),
            Err(err) => sample_failures.push(format!("{e}: {err}")),
        }
    }
    EquationReport { equations, samples, sample_failures }
}

/// Limits for [`find_elements`].
#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// maximum number of generated relation values
    pub max_values: usize,
    /// maximum number of compositions while generating
    pub max_steps: usize,
    /// also generate from a few extra a-free shapes
    pub extended: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_values: 2_000, max_steps: 5_000_000, extended: true }
    }
}

impl SearchBudget {
    /// Reads `TWA_BUDGET` (maximum number of generated values) if set.
    pub fn from_env() -> Self {
        let mut b = SearchBudget::default();
        if let Some(v) = std::env::var("TWA_BUDGET").ok().and_then(|s| s.parse().ok()) {
            b.max_values = v;
        }
        b
    }
}

/// Extra a-free generators used by the extended search.
pub fn extended_bases() -> Vec<(&'static str, ExplicitPattern)> {
    [
        ("comb0", "(b (b) (b (b) (b)))"),
        ("comb1", "(b (*) (b (b) (b)))"),
        ("hook1", "(b (b) (b (*) (b)))"),
        ("comb2", "(b (*) (b (*) (b (b) (b))))"),
    ]
    .into_iter()
    .map(|(n, s)| (n, ExplicitPattern::parse(s).expect("built-in pattern")))
    .collect()
}

/// Statistics reported when the search fails.
#[derive(Clone, Debug)]
pub struct Exhausted {
    pub values: [usize; 3],
    pub complete: bool,
    pub idempotent_index: usize,
    pub idempotent_period: usize,
}

impl std::fmt::Display for Exhausted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "no element triple found; generated {}/{}/{} values of rank 0/1/2 ({}), base1 powers: index {} period {}",
            self.values[0],
            self.values[1],
            self.values[2],
            if self.complete { "closed" } else { "budget hit" },
            self.idempotent_index,
            self.idempotent_period
        )
    }
}

/// Index and period of the powers of a rank-1 relation.
pub fn index_and_period(r: &PortRelation) -> (usize, usize) {
    // Brent's cycle detection over x_{k+1} = x_k . r, x_1 = r
    let step = |x: &PortRelation| stack(x, r);
    let (mut power, mut lam) = (1usize, 1usize);
    let mut tortoise = r.clone();
    let mut hare = step(r);
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = step(&hare);
        lam += 1;
    }
    let mut mu = 1;
    let mut tortoise = r.clone();
    let mut hare = r.clone();
    for _ in 0..lam {
        hare = step(&hare);
    }
    while tortoise != hare {
        tortoise = step(&tortoise);
        hare = step(&hare);
        mu += 1;
    }
    (mu, lam)
}

/// Smallest `t` with `r^t` idempotent.
pub fn idempotent_exponent(r: &PortRelation) -> usize {
    let (index, period) = index_and_period(r);
    index.div_ceil(period) * period
}

/// Searches for a triple satisfying E1 to E8.
pub fn find_elements(ctx: &mut RelationContext<'_>, budget: &SearchBudget) -> std::result::Result<ElementTriple, Exhausted> {
    let b = |a: Atom| PatternExpr::Atom(a);
    // the bases themselves
    let bare = [b(Atom::Base0), b(Atom::Base1), b(Atom::Base2)];
    if let Some(t) = accept(ctx, bare) {
        return Ok(t);
    }
    // idempotent power of base1 wrapped around base0 and base2
    let r1 = ctx.eval(&b(Atom::Base1)).expect("base");
    let (index, period) = index_and_period(&r1);
    let t = index.div_ceil(period) * period;
    let d1 = chain_or_single(BigUint::from(t), b(Atom::Base1));
    let guided = [
        d1.clone().plug(b(Atom::Base0)),
        d1.clone(),
        d1.clone().plug(PatternExpr::compose(b(Atom::Base2), vec![Some(d1.clone()), Some(d1.clone())])),
    ];
    if let Some(t) = accept(ctx, guided) {
        return Ok(t);
    }
    // pairs of the generated algebra, generation by generation
    let (found, mut closure) = search_generated(ctx, budget, &[]);
    if let Some(t) = found {
        return Ok(t);
    }
    if budget.extended {
        let mut env = ctx.env().clone();
        for (name, p) in extended_bases() {
            env.add_named(name, p);
        }
        let names: Vec<&str> = extended_bases().iter().map(|(n, _)| *n).collect();
        let mut ectx = RelationContext::new(ctx.automaton(), &env);
        let (found, c) = search_generated(&mut ectx, budget, &names);
        closure = c;
        if let Some(mut t) = found {
            let used = t.exprs().iter().map(ToString::to_string).collect::<String>();
            t.named = extended_bases()
                .into_iter()
                .filter(|(n, _)| used.contains(&format!("@{n}")))
                .map(|(n, p)| (n.to_string(), p))
                .collect();
            return Ok(t);
        }
    }
    Err(Exhausted {
        values: [closure.values[0].len(), closure.values[1].len(), closure.values[2].len()],
        complete: closure.complete,
        idempotent_index: index,
        idempotent_period: period,
    })
}

fn accept(ctx: &mut RelationContext<'_>, d: [PatternExpr; 3]) -> Option<ElementTriple> {
    let t = ElementTriple::from_exprs(ctx, d).ok()?;
    equations_hold(&t.r0, &t.r1, &t.r2).then_some(t)
}

fn search_generated(ctx: &mut RelationContext<'_>, budget: &SearchBudget, extra: &[&str]) -> (Option<ElementTriple>, Closure) {
    let mut g = Generator::new(ctx, extra);
    let mut checked = [0usize; 3];
    loop {
        let c = &g.closure;
        // pairs with at least one value not yet checked, in discovery order
        for (a, v0) in c.values[0].iter().enumerate() {
            for (b, v2) in c.values[2].iter().enumerate() {
                if a < checked[0] && b < checked[2] {
                    continue;
                }
                if let Some(t) = try_pair(ctx, c, v0, v2) {
                    return (Some(t), g.closure);
                }
            }
        }
        checked = [c.values[0].len(), c.values[1].len(), c.values[2].len()];
        if !g.step(budget.max_values, budget.max_steps) {
            let c = &g.closure;
            if [c.values[0].len(), c.values[1].len(), c.values[2].len()] == checked {
                return (None, g.closure);
            }
        }
    }
}

fn try_pair(ctx: &mut RelationContext<'_>, c: &Closure, v0: &Value, v2: &Value) -> Option<ElementTriple> {
    let plug2 = |inner: &[Option<&PortRelation>]| relation_compose(&v2.rel, inner).expect("ranks");
    if plug2(&[Some(&v0.rel), Some(&v0.rel)]) != v0.rel {
        return None;
    }
    let r1 = plug2(&[Some(&v0.rel), None]);
    if plug2(&[None, Some(&v0.rel)]) != r1 || !equations_hold(&v0.rel, &r1, &v2.rel) {
        return None;
    }
    let d1 = match c.find(&r1) {
        Some(v1) => v1.expr.clone(),
        None => PatternExpr::compose(v2.expr.clone(), vec![Some(v0.expr.clone()), None]),
    };
    ElementTriple::from_exprs(ctx, [v0.expr.clone(), d1, v2.expr.clone()]).ok()
}

/// Persisted form: optional lines `@name = <s-expression>` followed by
/// `D0: <expr>`, `D1: <expr>`, `D2: <expr>`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementsFile {
    pub named: Vec<(String, ExplicitPattern)>,
    pub d: [PatternExpr; 3],
}

impl ElementsFile {
    pub fn env(&self) -> Result<Env> {
        let mut env = Env::new();
        for (n, p) in &self.named {
            env.add_named(n, p.clone());
        }
        env.with_elements(self.d.clone())
    }
}

impl From<&ElementTriple> for ElementsFile {
    fn from(t: &ElementTriple) -> Self {
        ElementsFile { named: t.named.clone(), d: t.exprs() }
    }
}

pub fn print_elements(f: &ElementsFile) -> String {
    let mut out = String::new();
    for (n, p) in &f.named {
        let _ = writeln!(out, "@{n} = {p}");
    }
    let _ = write!(out, "D0: {}\nD1: {}\nD2: {}\n", f.d[0], f.d[1], f.d[2]);
    out
}

pub fn parse_elements(text: &str) -> Result<ElementsFile> {
    let mut slots: [Option<PatternExpr>; 3] = [None, None, None];
    let mut named = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(def) = body.strip_prefix('@') {
            let (name, tree) = def.split_once('=').ok_or_else(|| Error::syntax(i + 1, 1, "expected `@name = <tree>`"))?;
            let p = ExplicitPattern::parse(tree.trim()).map_err(|e| match e {
                Error::Syntax { msg, .. } => Error::syntax(i + 1, 1, msg),
                other => other,
            })?;
            named.push((name.trim().to_string(), p));
            continue;
        }
        let (key, rest) = body.split_once(':').ok_or_else(|| Error::syntax(i + 1, 1, "expected `D0:`, `D1:` or `D2:`"))?;
        let k = match key.trim() {
            "D0" => 0,
            "D1" => 1,
            "D2" => 2,
            other => return Err(Error::syntax(i + 1, 1, format!("unknown section `{other}`"))),
        };
        let offset = line.find(':').map_or(0, |c| c + 1);
        let e = parse_pattern(rest).map_err(|e| match e {
            Error::Syntax { pos, msg } => Error::syntax(i + 1, pos.column + offset, msg),
            other => other,
        })?;
        if slots[k].replace(e).is_some() {
            return Err(Error::syntax(i + 1, 1, format!("duplicate section {key}")));
        }
    }
    match slots {
        [Some(a), Some(b), Some(c)] => Ok(ElementsFile { named, d: [a, b, c] }),
        _ => Err(Error::syntax(1, 1, "elements file needs D0, D1 and D2")),
    }
}
