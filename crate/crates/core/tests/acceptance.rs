//! Acceptance criteria. Each test prints one PASS/FAIL line, written to the
//! process stdout directly so it shows up without `--nocapture`.

use std::io::Write;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use twa::automaton::{accepts, build_a_l, random_automaton, replay_valid, Automaton};
use twa::elements::{check_equations, find_elements, SearchBudget};
use twa::pattern::{Atom, Env, PatternExpr};
use twa::pebble::{build_pebble_l, default_fuel, pebble_run, Verdict};
use twa::relation::{relation_direct, transfers, BitMatrix, RelationContext};
use twa::separation::{
    ambiguity_witness, build_t_trees, check_shrink, check_stretch, choose_m, surrogate_m, verify_main_lemma,
    ChainLandscape, SeparationInstance,
};
use twa::tree::{enumerate_trees, in_language_L, random_tree, LabeledTree};

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let line = format!("{} criterion {id} ({name}): {detail}\n", if ok { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(ok, "criterion {id} failed: {detail}");
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const DENSITIES: [f64; 3] = [0.1, 0.3, 0.5];

/// The random 2-state automata shared by criteria 4 and 6.
fn two_state_automata() -> Vec<Automaton> {
    (0..24u64).map(|s| random_automaton(&mut rng(400 + s), 2, DENSITIES[s as usize % 3])).collect()
}

fn small_corpus() -> Vec<LabeledTree> {
    enumerate_trees(11).collect()
}

/// Trees with at most 11 nodes: `Catalan(k) * 2^(2k+1)` for `k` internal
/// nodes, summed over `k <= 5`.
fn small_corpus_size() -> usize {
    let catalan = [1, 1, 2, 5, 14, 42];
    (0..6).map(|k| catalan[k] << (2 * k + 1)).sum()
}

#[test]
fn criterion_1_a_l_matches_oracle() {
    let a = build_a_l();
    let corpus = small_corpus();
    let small_bad = corpus.par_iter().filter(|t| accepts(&a, t).unwrap() != in_language_L(t)).count();
    let random: Vec<(bool, bool)> = (0..100_000u64)
        .into_par_iter()
        .map(|k| {
            let mut r = rng(1_000_000 + k);
            let nodes = r.gen_range(1..=201);
            let p_a = [0.15, 0.3, 0.5, 0.7][k as usize % 4];
            let t = random_tree(&mut r, nodes, p_a);
            (accepts(&a, &t).unwrap(), in_language_L(&t))
        })
        .collect();
    let random_bad = random.iter().filter(|(got, want)| got != want).count();
    let members = random.iter().filter(|(_, want)| *want).count();
    report(
        1,
        "A_L vs oracle",
        corpus.len() == small_corpus_size() && small_bad == 0 && random_bad == 0,
        &format!(
            "{} small trees, {small_bad} mismatches; {} random trees ({members} in L), {random_bad} mismatches",
            corpus.len(),
            random.len()
        ),
    );
}

#[test]
fn criterion_2_pebble_matches_oracle() {
    let m = build_pebble_l();
    let corpus = small_corpus();
    let verdicts: Vec<(Verdict, bool)> = corpus.par_iter().map(|t| (pebble_run(&m, t, default_fuel(t)).0, in_language_L(t))).collect();
    let out_of_fuel = verdicts.iter().filter(|(v, _)| *v == Verdict::FuelExhausted).count();
    let bad = verdicts
        .iter()
        .filter(|(v, want)| *v != if *want { Verdict::Accept } else { Verdict::Reject })
        .count();
    report(
        2,
        "pebble vs oracle",
        corpus.len() == small_corpus_size() && bad == 0 && out_of_fuel == 0,
        &format!("{} trees, {bad} mismatches, {out_of_fuel} out of fuel", corpus.len()),
    );
}

/// Every composition with exactly `k` atoms from base0, primeA, base1, base2,
/// with atoms only in head position.
fn base_expressions(k: usize, memo: &mut Vec<Vec<PatternExpr>>) -> Vec<PatternExpr> {
    while memo.len() <= k {
        let j = memo.len();
        let mut out = Vec::new();
        if j == 1 {
            out.push(Atom::Base0.into());
            out.push(Atom::PrimeA.into());
        }
        if j >= 1 {
            for inner in slot(j - 1, memo) {
                out.push(compose(Atom::Base1, vec![inner]));
            }
            for left in 0..j {
                for x in slot(left, memo) {
                    for y in slot(j - 1 - left, memo) {
                        out.push(compose(Atom::Base2, vec![x.clone(), y]));
                    }
                }
            }
        }
        memo.push(out);
    }
    memo[k].clone()
}

fn slot(k: usize, memo: &[Vec<PatternExpr>]) -> Vec<Option<PatternExpr>> {
    if k == 0 {
        vec![None]
    } else {
        memo[k].iter().cloned().map(Some).collect()
    }
}

fn compose(head: Atom, items: Vec<Option<PatternExpr>>) -> PatternExpr {
    if items.iter().all(Option::is_none) {
        head.into()
    } else {
        PatternExpr::compose(head.into(), items)
    }
}

#[test]
fn criterion_3_compose_matches_direct() {
    let mut memo = vec![Vec::new()];
    let exprs: Vec<PatternExpr> = (1..=6).flat_map(|k| base_expressions(k, &mut memo)).collect();
    let automata: Vec<Automaton> = (0..50u64)
        .map(|s| random_automaton(&mut rng(300 + s), 1 + s as usize % 4, DENSITIES[s as usize % 3]))
        .collect();
    let env = Env::new();
    let failures: usize = automata
        .par_iter()
        .map(|a| {
            let mut ctx = RelationContext::new(a, &env);
            exprs
                .iter()
                .filter(|e| {
                    let composed = ctx.eval(e).unwrap();
                    let direct = relation_direct(a, &env.expand(e, 1 << 12).unwrap());
                    composed != direct
                })
                .count()
        })
        .sum();
    report(
        3,
        "compositional relations",
        exprs.len() == 8848 && failures == 0,
        &format!("{} automata x {} expressions, {failures} disagreements", automata.len(), exprs.len()),
    );
}

#[test]
fn criterion_4_element_synthesis() {
    let budget = SearchBudget::default();
    let mut automata = vec![Automaton::with_states(2, vec![0], vec![1], Vec::new())];
    automata.extend(two_state_automata());
    let results: Vec<Result<(), String>> = automata
        .par_iter()
        .enumerate()
        .map(|(k, a)| {
            let env = Env::new();
            let mut ctx = RelationContext::new(a, &env);
            let triple = find_elements(&mut ctx, &budget).map_err(|e| format!("automaton {k}: {e}"))?;
            let rep = check_equations(&mut ctx, &triple, 200, &mut rng(k as u64));
            if rep.passed() {
                Ok(())
            } else {
                Err(format!("automaton {k}: {}", rep.summary()))
            }
        })
        .collect();
    let errors: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    report(
        4,
        "element synthesis",
        errors.is_empty(),
        &format!("{} automata, {} failures {errors:?}", automata.len(), errors.len()),
    );
}

fn instances(seeds: std::ops::Range<u64>) -> Vec<SeparationInstance> {
    seeds
        .map(|s| {
            let a = random_automaton(&mut rng(s), 2 + s as usize % 2, DENSITIES[s as usize % 3]);
            SeparationInstance::new(&a, &SearchBudget::default()).expect("elements within default budget")
        })
        .collect()
}

/// A random composition of D0, D1, D2 whose rank is between 2 and 6.
fn random_wide_composition(r: &mut ChaCha8Rng) -> PatternExpr {
    let env = Env::new();
    loop {
        let mut budget = r.gen_range(2..=10);
        let e = random_d_expr(r, &mut budget);
        if (2..=6).contains(&env.rank(&e).unwrap()) {
            return e;
        }
    }
}

fn random_d_expr(r: &mut ChaCha8Rng, budget: &mut usize) -> PatternExpr {
    *budget = budget.saturating_sub(1);
    let (head, arity) = match r.gen_range(0..5) {
        0 => (Atom::D0, 0),
        1 => (Atom::D1, 1),
        _ => (Atom::D2, 2),
    };
    let items = (0..arity).map(|_| (*budget > 0 && r.gen_bool(0.6)).then(|| random_d_expr(r, budget))).collect();
    compose(head, items)
}

fn subset(a: &BitMatrix, b: &BitMatrix) -> bool {
    a.is_subset(b)
}

#[test]
fn criterion_5_lemma_suite() {
    let insts = instances(500..520);
    let mut violations: Vec<String> = Vec::new();
    let mut compositions = 0;
    for (k, inst) in insts.iter().enumerate() {
        let t = inst.table();
        let mut check = |ok: bool, what: &str| {
            if !ok {
                violations.push(format!("seed {k}: {what}"));
            }
        };
        check(t.up == t.north_east.union(&t.north_west), "up = ne | nw");
        check(t.down == t.south_west.union(&t.south_east), "down = sw | se");
        check(subset(&t.up.mul(&t.up), &t.up), "up.up <= up");
        check(subset(&t.north_east.mul(&t.up), &t.north_east), "ne.up <= ne");
        check(subset(&t.up.mul(&t.north_east), &t.north_east), "up.ne <= ne");
        check(subset(&t.north_west.mul(&t.up), &t.north_west), "nw.up <= nw");
        check(subset(&t.up.mul(&t.turn_right), &t.turn_right), "up.right <= right");
        check(subset(&t.north_east, &t.north_east.mul(&t.up)), "ne <= ne.up");
        check(subset(&t.north_west, &t.north_west.mul(&t.up)), "nw <= nw.up");
        check(subset(&t.turn_right, &t.turn_right.mul(&t.down)), "right <= right.down");

        let mut ctx = inst.context();
        let env = inst.env();
        let mut r = rng(5000 + k as u64);
        for _ in 0..5 {
            let e = random_wide_composition(&mut r);
            compositions += 1;
            let rank = env.rank(&e).unwrap();
            let gamma = transfers(&ctx.eval(&e).unwrap(), &t.loops);
            for (p, i, q, j) in gamma.entries() {
                if i >= 1 && j >= 1 && i != j {
                    let arrow = if i < j { &t.turn_right } else { &t.turn_left };
                    if !arrow.get(p, q) {
                        violations.push(format!("seed {k}: collapse ({p},{i},{q},{j}) in {e}"));
                    }
                }
            }
            for (p, q) in t.turn_right.ones() {
                let along = (1..rank).all(|i| gamma.contains(p, i, q, i + 1));
                if !(along || t.loops.get(p, q)) {
                    violations.push(format!("seed {k}: propagation ({p},{q}) in {e}"));
                }
            }
        }
    }
    report(
        5,
        "lemma suite",
        violations.is_empty() && compositions >= 100,
        &format!("{} automata, {compositions} compositions, {} violations {violations:?}", insts.len(), violations.len()),
    );
}

#[test]
fn criterion_6_main_lemma() {
    let budget = SearchBudget::default();
    let mut lines: Vec<String> = two_state_automata()
        .par_iter()
        .map(|a| verify_main_lemma(a, &budget).unwrap())
        .filter(|rep| !rep.holds())
        .map(|rep| rep.verdict_line())
        .collect();
    let started = std::time::Instant::now();
    let a_l = verify_main_lemma(&build_a_l(), &budget).unwrap();
    if !a_l.holds() {
        lines.push(format!("A_L: {}", a_l.verdict_line()));
    }
    let expected_m = choose_m(a_l.n).unwrap();
    report(
        6,
        "main lemma",
        lines.is_empty() && a_l.m == expected_m,
        &format!(
            "24 random automata and A_L (n={}, M has {} digits, {:.1}s), {} not holding {lines:?}",
            a_l.n,
            a_l.m.to_string().len(),
            started.elapsed().as_secs_f64(),
            lines.len()
        ),
    );
}

#[test]
fn criterion_7_shrink_and_stretch() {
    let insts = instances(700..722);
    let results: Vec<(usize, Vec<String>)> = insts
        .par_iter()
        .map(|inst| {
            let d2 = inst.relation(&Atom::D2.into()).unwrap();
            let da = inst.relation(&Atom::Da.into()).unwrap();
            let table = inst.table();
            let land = ChainLandscape::faulty(&d2, &da, surrogate_m(inst.n()));
            let shrink = check_shrink(&table, &land);
            let stretch = check_stretch(&table, &land);
            let mut v = shrink.violations;
            v.extend(stretch.violations);
            (shrink.checked + stretch.checked, v)
        })
        .collect();
    let checked: usize = results.iter().map(|r| r.0).sum();
    let violations: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    report(
        7,
        "shrink and stretch",
        violations.is_empty(),
        &format!("{} automata, {checked} proper steps, {} violations {violations:?}", insts.len(), violations.len()),
    );
}

#[test]
fn criterion_8_t_trees_and_ambiguity() {
    let a = build_a_l();
    let inst = SeparationInstance::new(&a, &SearchBudget::default()).unwrap();
    let m = surrogate_m(inst.n());
    let trees = build_t_trees(inst.env(), inst.n(), m, 1 << 24).unwrap();
    let member: Vec<bool> = trees.iter().map(in_language_L).collect();
    let t_ok = member == [false, true, true, true];
    let (w_ok, w_detail) = match ambiguity_witness(&a, 11) {
        Some(w) => {
            let valid = replay_valid(&a, &w.tree, &w.first) && replay_valid(&a, &w.tree, &w.second) && w.first != w.second;
            (valid, format!("witness {} ({}), replay valid: {valid}", w.tree.to_sexpr(), w.multiplicity))
        }
        None => (false, "no witness within 11 nodes".to_string()),
    };
    report(
        8,
        "T-trees and ambiguity",
        t_ok && w_ok,
        &format!("m={m}, membership T00,T01,T10,T11 = {member:?}; {w_detail}"),
    );
}

#[test]
fn criterion_9_choose_m_values() {
    let scan = |n: u128| {
        let fact: u128 = (1..=n).product();
        (n * n + 10 * n + 1..).find(|m| m % fact == n / 2).unwrap()
    };
    let got: Vec<(usize, BigUint, u128)> = [4usize, 6, 8].iter().map(|&n| (n, choose_m(n).unwrap(), scan(n as u128))).collect();
    let ok = got.iter().all(|(_, m, s)| *m == BigUint::from(*s)) && got.iter().map(|g| g.2).eq([74, 723, 40324]);
    let detail: Vec<String> = got.iter().map(|(n, m, s)| format!("n={n}: {m} (scan {s})")).collect();
    report(9, "choose_m", ok, &detail.join(", "));
}
