//! The small correct pattern `Δn`, the faulty pattern `Δ'2M`, and checks
//! built on them.
//!
//! Both patterns are chains of units `D2[*, Da]` attached through the left
//! leaf port. The faulty one replaces two central units by the fault
//! `D2[*, D2[Da, Da]]`, which puts three consecutive a-leaves under a common
//! lowest ancestor once the pattern is completed to a tree.

mod landscape;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::json;

use crate::automaton::{accepting_paths, multiplicity, symmetrize, Automaton, Computation, Multiplicity, SymmetrizedAutomaton};
use crate::elements::{find_elements, ElementTriple, Exhausted, SearchBudget};
use crate::error::{Error, Result};
use crate::pattern::{Atom, Env, PatternExpr};
use crate::relation::{PortRelation, RelationContext, StateRelation, TransferTable};
use crate::tree::{enumerate_trees, Label, LabeledTree, Tree};

pub use landscape::{check_shrink, check_stretch, ChainLandscape, ClaimReport};

/// Smallest `M > n² + 10n` with `M ≡ n/2 (mod n!)`.
pub fn choose_m(n: usize) -> Result<BigUint> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::Usage(format!("n must be even and at least 4, got {n}")));
    }
    let modulus: BigUint = (1..=n).map(BigUint::from).product();
    let residue = BigUint::from(n / 2);
    let bound = BigUint::from(n * n + 10 * n);
    if residue > bound {
        return Ok(residue);
    }
    let k = (&bound - &residue) / &modulus + 1u32;
    Ok(residue + k * modulus)
}

/// Default chain half-length for checks that materialize the faulty
/// pattern: `max(40, n² + 10n + 1)`.
pub fn surrogate_m(n: usize) -> usize {
    (n * n + 10 * n + 1).max(40)
}

/// `D2[*, Da]`
pub fn unit() -> PatternExpr {
    PatternExpr::compose(Atom::D2.into(), vec![None, Some(Atom::Da.into())])
}

/// `D2[*, D2[Da, Da]]`
pub fn fault() -> PatternExpr {
    let pair = PatternExpr::compose(Atom::D2.into(), vec![Some(Atom::Da.into()), Some(Atom::Da.into())]);
    PatternExpr::compose(Atom::D2.into(), vec![None, Some(pair)])
}

fn units(count: &BigUint) -> Option<PatternExpr> {
    if count.is_zero() {
        None
    } else if count.is_one() {
        Some(unit())
    } else {
        Some(PatternExpr::chain(count.clone(), unit()))
    }
}

/// `Δn = chain(n, unit)`.
pub fn small_correct(n: usize) -> PatternExpr {
    units(&BigUint::from(n)).unwrap_or_else(|| PatternExpr::compose(Atom::D1.into(), vec![None]))
}

/// `Δ2M = chain(2M, unit)`.
pub fn correct_2m(m: &BigUint) -> PatternExpr {
    units(&(m * 2u32)).unwrap_or_else(|| PatternExpr::compose(Atom::D1.into(), vec![None]))
}

/// `Δ'2M`: the fault with a chain of `M - 1` units on either side.
pub fn faulty(m: &BigUint) -> PatternExpr {
    let side = if m.is_zero() { BigUint::zero() } else { m - 1u32 };
    let below = PatternExpr::compose(fault(), vec![units(&side)]);
    match units(&side) {
        Some(above) => PatternExpr::compose(above, vec![Some(below)]),
        None => below,
    }
}

/// Adds states without transitions until there are `min` of them.
pub fn pad_states(a: &Automaton, min: usize) -> Automaton {
    let mut names = a.state_names().to_vec();
    let mut k = 0;
    while names.len() < min {
        let name = format!("pad{k}");
        if !names.contains(&name) {
            names.push(name);
        }
        k += 1;
    }
    Automaton::new(
        a.alphabet().iter().copied(),
        names,
        a.initial().iter().copied(),
        a.accepting().iter().copied(),
        a.transitions().iter().copied(),
    )
}

/// A time-symmetric automaton with at least four states and its elements.
#[derive(Clone, Debug)]
pub struct SeparationInstance {
    pub sym: SymmetrizedAutomaton,
    /// states added to the input before symmetrizing
    pub padding: usize,
    pub triple: ElementTriple,
    env: Env,
}

impl SeparationInstance {
    /// Symmetrizes `a` (padding it to two states first) and searches for
    /// elements.
    pub fn new(a: &Automaton, budget: &SearchBudget) -> std::result::Result<Self, Exhausted> {
        let padded = pad_states(a, 2);
        let padding = padded.num_states() - a.num_states();
        let sym = symmetrize(&padded);
        let env = Env::new();
        let triple = {
            let mut ctx = RelationContext::new(&sym.automaton, &env);
            find_elements(&mut ctx, budget)?
        };
        let env = triple.env();
        Ok(SeparationInstance { sym, padding, triple, env })
    }

    /// Uses a given triple instead of searching.
    pub fn with_triple(sym: SymmetrizedAutomaton, triple: ElementTriple) -> Self {
        let env = triple.env();
        SeparationInstance { sym, padding: 0, triple, env }
    }

    pub fn automaton(&self) -> &Automaton {
        &self.sym.automaton
    }

    /// Number of states, `n`.
    pub fn n(&self) -> usize {
        self.sym.automaton.num_states()
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn context(&self) -> RelationContext<'_> {
        RelationContext::new(&self.sym.automaton, &self.env)
    }

    pub fn table(&self) -> TransferTable {
        self.triple.transfer_table()
    }

    pub fn relation(&self, e: &PatternExpr) -> Result<PortRelation> {
        self.context().eval(e)
    }

    /// Entries of `δ(Δn)` missing from `δ(Δ'2M)`, in order.
    pub fn missing(&self, m: &BigUint) -> Result<Vec<(usize, usize, usize, usize)>> {
        let mut ctx = self.context();
        let small = ctx.eval(&small_correct(self.n()))?;
        let big = ctx.eval(&faulty(m))?;
        Ok(small.entries().filter(|&(p, i, q, j)| !big.contains(p, i, q, j)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MainLemmaVerdict {
    Holds,
    /// first missing entry and the number of missing entries
    Fails { witness: (usize, usize, usize, usize), missing: usize },
    ElementsExhausted(String),
}

#[derive(Clone, Debug)]
pub struct MainLemmaReport {
    pub n: usize,
    pub m: BigUint,
    pub states: Vec<String>,
    pub padding: usize,
    pub elements: Option<[String; 3]>,
    pub small_entries: usize,
    pub faulty_entries: usize,
    pub verdict: MainLemmaVerdict,
}

impl MainLemmaReport {
    pub fn holds(&self) -> bool {
        self.verdict == MainLemmaVerdict::Holds
    }

    /// `MAIN-LEMMA HOLDS n=<n> M=<M>` or `MAIN-LEMMA FAILS (p,i,q,j)=(...)`.
    pub fn verdict_line(&self) -> String {
        match &self.verdict {
            MainLemmaVerdict::Holds => format!("MAIN-LEMMA HOLDS n={} M={}", self.n, self.m),
            MainLemmaVerdict::Fails { witness: (p, i, q, j), .. } => {
                let s = |k: usize| self.states.get(k).map_or("?", String::as_str);
                format!("MAIN-LEMMA FAILS (p,i,q,j)=({},{},{},{})", s(*p), i, s(*q), j)
            }
            MainLemmaVerdict::ElementsExhausted(why) => format!("MAIN-LEMMA UNDECIDED {why}"),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (status, witness, missing) = match &self.verdict {
            MainLemmaVerdict::Holds => ("holds", None, 0),
            MainLemmaVerdict::Fails { witness, missing } => ("fails", Some(witness), *missing),
            MainLemmaVerdict::ElementsExhausted(_) => ("elements_exhausted", None, 0),
        };
        json!({
            "status": status,
            "n": self.n,
            "M": self.m.to_string(),
            "states": self.states,
            "padding_states": self.padding,
            "elements": self.elements.as_ref().map(|e| json!({"D0": e[0], "D1": e[1], "D2": e[2]})),
            "small_entries": self.small_entries,
            "faulty_entries": self.faulty_entries,
            "missing": missing,
            "witness": witness.map(|&(p, i, q, j)| json!({
                "p": self.states[p], "i": i, "q": self.states[q], "j": j
            })),
        })
    }
}

/// Checks `δ(Δn) ⊆ δ(Δ'2M)` with `M = choose_m(n)` on the symmetrized
/// automaton, without expanding any chain.
pub fn verify_main_lemma(a: &Automaton, budget: &SearchBudget) -> Result<MainLemmaReport> {
    let inst = match SeparationInstance::new(a, budget) {
        Ok(inst) => inst,
        Err(e) => {
            let n = 2 * a.num_states().max(2);
            return Ok(MainLemmaReport {
                n,
                m: choose_m(n)?,
                states: Vec::new(),
                padding: 0,
                elements: None,
                small_entries: 0,
                faulty_entries: 0,
                verdict: MainLemmaVerdict::ElementsExhausted(e.to_string()),
            });
        }
    };
    let m = choose_m(inst.n())?;
    verify_instance(&inst, &m)
}

/// The inclusion check for a prepared instance and any `M`.
pub fn verify_instance(inst: &SeparationInstance, m: &BigUint) -> Result<MainLemmaReport> {
    let mut ctx = inst.context();
    let small = ctx.eval(&small_correct(inst.n()))?;
    let big = ctx.eval(&faulty(m))?;
    let missing: Vec<_> = small.entries().filter(|&(p, i, q, j)| !big.contains(p, i, q, j)).collect();
    let verdict = match missing.first() {
        None => MainLemmaVerdict::Holds,
        Some(&w) => MainLemmaVerdict::Fails { witness: w, missing: missing.len() },
    };
    Ok(MainLemmaReport {
        n: inst.n(),
        m: m.clone(),
        states: inst.automaton().state_names().to_vec(),
        padding: inst.padding,
        elements: Some(inst.triple.exprs().map(|e| e.to_string())),
        small_entries: small.len(),
        faulty_entries: big.len(),
        verdict,
    })
}

/// `root[D1[p[D0]]]` for a rank-1 expression `p`, where `root[x]` is a
/// b-node with `x` on the left and a b-leaf on the right.
pub fn complete_to_tree(p: &PatternExpr, env: &Env, max_nodes: usize) -> Result<LabeledTree> {
    let r = env.rank(p)?;
    if r != 1 {
        return Err(Error::Rank(format!("{p} has rank {r}, expected 1")));
    }
    let body = PatternExpr::compose(Atom::D1.into(), vec![Some(PatternExpr::compose(p.clone(), vec![Some(Atom::D0.into())]))]);
    let inner = env.expand(&body, max_nodes.saturating_sub(2))?.to_tree()?;
    Ok(Tree::node(Label::B, &inner, &Tree::leaf(Label::B)))
}

/// All `(p, q)` with a proper step of pace `i`:
/// `↖ ∘ ↗^(i-1) ∘ ↷` for `i > 0`, `↶ ∘ ↙^(|i|-1) ∘ ↘` for `i < 0`, and the
/// root loop over `Da` for `i = 0`.
pub fn proper_steps(table: &TransferTable, i: i64) -> StateRelation {
    let (first, middle, last) = match i {
        0 => return table.circle_a.clone(),
        i if i > 0 => (&table.north_west, &table.north_east, &table.turn_right),
        _ => (&table.turn_left, &table.south_west, &table.south_east),
    };
    let mut r = first.clone();
    for _ in 1..i.unsigned_abs() {
        r = r.mul(middle);
    }
    r.mul(last)
}

pub fn proper_step_exists(table: &TransferTable, i: i64, p: usize, q: usize) -> bool {
    proper_steps(table, i).get(p, q)
}

/// The chain of `|i| + 1` copies of `D2`, each attached to the left leaf
/// port of the one above. A proper step of pace `i` goes from port 2 to
/// port `2 + i` (or the reverse for negative `i`).
pub fn step_chain(i: i64) -> PatternExpr {
    let mut e: PatternExpr = Atom::D2.into();
    for _ in 0..i.unsigned_abs() {
        e = PatternExpr::compose(Atom::D2.into(), vec![Some(e), None]);
    }
    e
}

/// Four trees combining `Δn` and `Δ'2m`: `[T00, T01, T10, T11]`, where
/// `Tab = root[D1[Xa[Xb[D0]]]]` with `X0 = Δn` and `X1 = Δ'2m`.
pub fn build_t_trees(env: &Env, n: usize, m: usize, max_nodes: usize) -> Result<[LabeledTree; 4]> {
    let x = [small_correct(n), faulty(&BigUint::from(m))];
    let t = |a: usize, b: usize| complete_to_tree(&PatternExpr::compose(x[a].clone(), vec![Some(x[b].clone())]), env, max_nodes);
    Ok([t(0, 0)?, t(0, 1)?, t(1, 0)?, t(1, 1)?])
}

/// A tree with at least two accepting computations.
#[derive(Clone, Debug)]
pub struct AmbiguityWitness {
    pub tree: LabeledTree,
    pub multiplicity: Multiplicity,
    pub first: Computation,
    pub second: Computation,
}

impl AmbiguityWitness {
    /// Text form with state names taken from `a`.
    pub fn render(&self, a: &Automaton) -> String {
        let mut out = format!("tree {}\nmultiplicity {}\n", self.tree.to_sexpr(), self.multiplicity);
        for (name, c) in [("first", &self.first), ("second", &self.second)] {
            let steps: Vec<String> = c.iter().map(|cfg| format!("({},{})", a.state_name(cfg.state), cfg.node)).collect();
            out.push_str(&format!("{name} {}\n", steps.join(" ")));
        }
        out
    }
}

/// The first tree in enumeration order with multiplicity MANY or INFINITE.
pub fn ambiguity_witness(a: &Automaton, max_nodes: usize) -> Option<AmbiguityWitness> {
    if a.is_deterministic() {
        return None;
    }
    enumerate_trees(max_nodes).find_map(|tree| {
        let multiplicity = multiplicity(a, &tree);
        if multiplicity < Multiplicity::Many {
            return None;
        }
        let (first, second) = accepting_paths(a, &tree)?;
        Some(AmbiguityWitness { tree, multiplicity, first, second })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{build_a_l, random_automaton, replay_valid, Board};
    use crate::relation::{chain_power, inner_loops, relation_direct, transfers};
    use crate::tree::{in_language_L, PLabel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scan_m(n: u64) -> u64 {
        let modulus: u64 = (1..=n).product();
        (n * n + 10 * n + 1..).find(|m| m % modulus == n / 2).unwrap()
    }

    #[test]
    fn m_values() {
        for (n, m) in [(4, 74u32), (6, 723), (8, 40324)] {
            assert_eq!(choose_m(n).unwrap(), BigUint::from(m));
            assert_eq!(scan_m(n as u64), m as u64);
        }
        assert!(choose_m(5).is_err());
        assert!(choose_m(2).is_err());
        let big = choose_m(50).unwrap();
        let fact: BigUint = (1..=50u32).map(BigUint::from).product();
        assert_eq!(&big % &fact, BigUint::from(25u32));
        assert_eq!(big, fact + 25u32);
    }

    fn instance(seed: u64) -> SeparationInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_automaton(&mut rng, 2, 0.3);
        SeparationInstance::new(&a, &SearchBudget::default()).unwrap()
    }

    #[test]
    fn chains_expand_as_described() {
        let inst = instance(3);
        let env = inst.env();
        let small = env.expand(&small_correct(4), 1 << 20).unwrap();
        assert_eq!(small.rank(), 1);
        assert_eq!(small.count_label(PLabel::A), 4);
        let five = BigUint::from(5u32);
        let bad = env.expand(&faulty(&five), 1 << 20).unwrap();
        assert_eq!(bad.count_label(PLabel::A), 10);
        let mut ctx = inst.context();
        let unit_rel = ctx.eval(&unit()).unwrap();
        assert_eq!(ctx.eval(&small_correct(4)).unwrap(), chain_power(&unit_rel, &BigUint::from(4u32)).unwrap());
        assert_eq!(ctx.eval(&faulty(&five)).unwrap(), relation_direct(inst.automaton(), &bad));
        assert_eq!(ctx.eval(&correct_2m(&five)).unwrap(), chain_power(&unit_rel, &BigUint::from(10u32)).unwrap());
    }

    #[test]
    fn faulty_begins_and_ends_with_small() {
        for seed in 0..6 {
            let inst = instance(seed);
            let n = inst.n();
            let m = choose_m(n).unwrap();
            let mut ctx = inst.context();
            let shorter = faulty(&(&m - n));
            let wrapped = PatternExpr::compose(
                small_correct(n),
                vec![Some(PatternExpr::compose(shorter, vec![Some(small_correct(n))]))],
            );
            assert_eq!(ctx.eval(&faulty(&m)).unwrap(), ctx.eval(&wrapped).unwrap());
        }
    }

    #[test]
    fn completed_patterns_and_membership() {
        let inst = instance(1);
        let small = complete_to_tree(&small_correct(4), inst.env(), 1 << 20).unwrap();
        assert!(!in_language_L(&small));
        let bad = complete_to_tree(&faulty(&BigUint::from(5u32)), inst.env(), 1 << 20).unwrap();
        assert!(in_language_L(&bad));
        assert_eq!(LabeledTree::parse_sexpr(&bad.to_sexpr()).unwrap(), bad);
        let [t00, t01, t10, t11] = build_t_trees(inst.env(), 4, 12, 1 << 20).unwrap();
        assert!(!in_language_L(&t00));
        assert!(in_language_L(&t01) && in_language_L(&t10) && in_language_L(&t11));
    }

    #[test]
    fn main_lemma_on_small_instances() {
        let trivial = Automaton::with_states(2, [0], [1], []);
        let report = verify_main_lemma(&trivial, &SearchBudget::default()).unwrap();
        assert_eq!(report.verdict_line(), "MAIN-LEMMA HOLDS n=4 M=74");
        let single = Automaton::with_states(1, [0], [0], []);
        let report = verify_main_lemma(&single, &SearchBudget::default()).unwrap();
        assert!(report.holds());
        assert_eq!(report.padding, 1);
        for seed in 0..5 {
            assert!(instance(seed).missing(&choose_m(4).unwrap()).unwrap().is_empty());
        }
    }

    #[test]
    fn proper_steps_match_expanded_chains() {
        let empty = Automaton::with_states(2, [0], [1], []);
        let inst = SeparationInstance::new(&empty, &SearchBudget::default()).unwrap();
        let t = inst.table();
        assert!(proper_steps(&t, 1).is_empty());
        assert!((0..4).all(|p| proper_step_exists(&t, 0, p, p)));
        for seed in 0..8 {
            let inst = instance(seed);
            let t = inst.table();
            let loops = inner_loops(&inst.triple.r1).unwrap();
            for i in [-3i64, -2, -1, 1, 2, 3] {
                let chain = inst.env().expand(&step_chain(i), 1 << 20).unwrap();
                let g = transfers(&relation_direct(inst.automaton(), &chain), &loops);
                let (from, to) = if i > 0 { (2, 2 + i as usize) } else { (2 + i.unsigned_abs() as usize, 2) };
                let steps = proper_steps(&t, i);
                for p in 0..inst.n() {
                    for q in 0..inst.n() {
                        assert_eq!(steps.get(p, q), g.contains(p, from, q, to), "seed {seed} i {i} ({p},{q})");
                    }
                }
            }
        }
    }

    // BFS over explicit configurations of the expanded chain.
    fn explicit_moves(inst: &SeparationInstance, e: &PatternExpr, from: (usize, usize)) -> Vec<(usize, usize)> {
        let env = inst.env();
        let pat = env.expand(e, 1 << 20).unwrap();
        let da = env.expand(&Atom::Da.into(), 1 << 20).unwrap();
        let a_depth = (0..da.len()).find(|&v| da.tree().label(v) == PLabel::A).map(|v| da.tree().depth(v)).unwrap();
        let tree = pat.tree();
        let vs: Vec<usize> = (0..tree.len())
            .filter(|&v| tree.label(v) == PLabel::A)
            .map(|mut v| {
                for _ in 0..a_depth {
                    v = tree.parent(v).unwrap();
                }
                v
            })
            .collect();
        let board = Board::from_pattern(tree, pat.ports());
        let n = inst.n();
        let mut seen = vec![false; tree.len() * n];
        let start = (from.0, vs[from.1 - 1]);
        let mut stack = vec![start];
        seen[start.1 * n + start.0] = true;
        let mut out = Vec::new();
        while let Some((p, v)) = stack.pop() {
            board.successors(inst.automaton(), p, v, &mut out);
            for &(q, w) in &out {
                if !seen[w * n + q] {
                    seen[w * n + q] = true;
                    stack.push((q, w));
                }
            }
        }
        let mut hits = Vec::new();
        for (y, &v) in vs.iter().enumerate() {
            for q in 0..n {
                if seen[v * n + q] {
                    hits.push((q, y + 1));
                }
            }
        }
        hits
    }

    #[test]
    fn landmark_reachability_matches_configurations() {
        for seed in 0..4 {
            let inst = instance(seed);
            let n = inst.n();
            let (d2, da) = (&inst.triple.r2, &inst.triple.ra);
            let cases = [
                (ChainLandscape::correct(d2, da, 6), correct_2m(&BigUint::from(3u32))),
                (ChainLandscape::faulty(d2, da, 3), faulty(&BigUint::from(3u32))),
            ];
            for (land, expr) in &cases {
                let reach = land.reach_all();
                for p in 0..n {
                    for x in 1..=6 {
                        let want = explicit_moves(&inst, expr, (p, x));
                        let got: Vec<_> = (1..=6)
                            .flat_map(|y| (0..n).map(move |q| (q, y)))
                            .filter(|&(q, y)| reach.get(p, x, q, y))
                            .collect();
                        let mut want = want;
                        want.sort_by_key(|&(q, y)| (y, q));
                        assert_eq!(got, want, "seed {seed} from ({p},{x})");
                        assert!(land.can_move((p, x), (p, x)));
                    }
                }
            }
        }
    }

    #[test]
    fn claims_hold_on_random_instances() {
        for seed in 0..4 {
            let inst = instance(seed);
            let t = inst.table();
            let land = ChainLandscape::faulty(&inst.triple.r2, &inst.triple.ra, surrogate_m(inst.n()));
            let shrink = check_shrink(&t, &land);
            assert!(shrink.passed(), "{:?}", shrink.violations);
            let stretch = check_stretch(&t, &land);
            assert!(stretch.passed(), "{:?}", stretch.violations);
        }
    }

    #[test]
    fn a_l_is_ambiguous() {
        let a = build_a_l();
        let w = ambiguity_witness(&a, 9).expect("witness");
        assert!(w.first != w.second);
        assert!(replay_valid(&a, &w.tree, &w.first) && replay_valid(&a, &w.tree, &w.second));
        let det = Automaton::with_states(1, [0], [0], []);
        assert!(ambiguity_witness(&det, 7).is_none());
    }
}
