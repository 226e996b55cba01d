//! Reachability on long chains of units, assembled from element relations.
//!
//! Vertices are pairs (state, landmark), where the landmarks are the nodes
//! `w_0 .. w_L` (roots of the units, `w_0` being the leaf port) and
//! `v_1 .. v_L` (roots of the `Da` copies). Each copy of `D2` or `Da`
//! contributes one edge per entry of its run relation, so paths are exactly
//! the computations that stay inside the chain.

use rayon::prelude::*;

use crate::relation::{PortRelation, TransferTable};

use super::proper_steps;

#[derive(Clone, Debug)]
pub struct ChainLandscape {
    states: usize,
    len: usize,
    fault: Option<usize>,
    adj: Vec<Vec<u32>>,
}

impl ChainLandscape {
    /// `len` units `D2[*, Da]` in a chain.
    pub fn correct(d2: &PortRelation, da: &PortRelation, len: usize) -> Self {
        let mut l = ChainLandscape::empty(d2.num_states(), len, None);
        for k in 1..=len {
            l.add_d2(d2, [l.w(k), l.w(k - 1), l.v(k)]);
        }
        l.add_all_da(da);
        l
    }

    /// The faulty chain with `m - 1` units on either side of the fault, so
    /// `2m` copies of `Da`. Needs `m >= 1`.
    pub fn faulty(d2: &PortRelation, da: &PortRelation, m: usize) -> Self {
        assert!(m >= 1, "faulty chain needs m >= 1");
        let len = 2 * m;
        let mut l = ChainLandscape::empty(d2.num_states(), len, Some(m));
        for k in (1..=len).filter(|&k| k != m && k != m + 1) {
            l.add_d2(d2, [l.w(k), l.w(k - 1), l.v(k)]);
        }
        l.add_d2(d2, [l.w(m + 1), l.w(m - 1), l.w(m)]);
        l.add_d2(d2, [l.w(m), l.v(m), l.v(m + 1)]);
        l.add_all_da(da);
        l
    }

    fn empty(states: usize, len: usize, fault: Option<usize>) -> Self {
        ChainLandscape { states, len, fault, adj: vec![Vec::new(); (2 * len + 1) * states] }
    }

    fn w(&self, k: usize) -> usize {
        k
    }

    fn v(&self, k: usize) -> usize {
        self.len + k
    }

    fn vertex(&self, node: usize, state: usize) -> usize {
        node * self.states + state
    }

    fn add_d2(&mut self, d2: &PortRelation, ports: [usize; 3]) {
        for (p, i, q, j) in d2.entries() {
            let (a, b) = (self.vertex(ports[i], p), self.vertex(ports[j], q));
            self.adj[a].push(b as u32);
        }
    }

    fn add_all_da(&mut self, da: &PortRelation) {
        for k in 1..=self.len {
            let v = self.v(k);
            for (p, _, q, _) in da.entries() {
                let (a, b) = (self.vertex(v, p), self.vertex(v, q));
                self.adj[a].push(b as u32);
            }
        }
    }

    /// Number of `Da` copies.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn states(&self) -> usize {
        self.states
    }

    /// Position `m` of the fault, if any.
    pub fn fault(&self) -> Option<usize> {
        self.fault
    }

    fn reach_vertices(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w as usize);
                }
            }
        }
        seen
    }

    /// Whether a computation inside the chain leads from `(p, v_x)` to
    /// `(q, v_y)`. Positions are 1-based.
    pub fn can_move(&self, (p, x): (usize, usize), (q, y): (usize, usize)) -> bool {
        self.reach_vertices(self.vertex(self.v(x), p))[self.vertex(self.v(y), q)]
    }

    /// `can_move` for every pair of `v` configurations.
    pub fn reach_all(&self) -> Reach {
        let width = self.states * self.len;
        let sources: Vec<(usize, usize)> = (1..=self.len).flat_map(|x| (0..self.states).map(move |p| (p, x))).collect();
        let rows: Vec<Vec<u64>> = sources
            .par_iter()
            .map(|&(p, x)| {
                let seen = self.reach_vertices(self.vertex(self.v(x), p));
                let mut row = vec![0u64; width.div_ceil(64)];
                for y in 1..=self.len {
                    for q in 0..self.states {
                        if seen[self.vertex(self.v(y), q)] {
                            let b = (y - 1) * self.states + q;
                            row[b / 64] |= 1 << (b % 64);
                        }
                    }
                }
                row
            })
            .collect();
        Reach { states: self.states, rows }
    }
}

/// Precomputed `can_move` between `v` configurations.
pub struct Reach {
    states: usize,
    rows: Vec<Vec<u64>>,
}

impl Reach {
    pub fn get(&self, p: usize, x: usize, q: usize, y: usize) -> bool {
        let b = (y - 1) * self.states + q;
        self.rows[(x - 1) * self.states + p][b / 64] >> (b % 64) & 1 == 1
    }
}

/// Outcome of checking a claim over all paces and state pairs.
#[derive(Clone, Debug, Default)]
pub struct ClaimReport {
    /// `(i, p, q)` triples with a proper step
    pub checked: usize,
    pub violations: Vec<String>,
}

impl ClaimReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every proper step `(i, p, q)` with `0 < |i| < 2n`: either the faulty
/// chain allows the move `(p, v_x) -> (q, v_(x+i))` at every position `x`,
/// or there is a proper step one pace closer to zero.
pub fn check_shrink(table: &TransferTable, faulty: &ChainLandscape) -> ClaimReport {
    let n = faulty.states() as i64;
    let len = faulty.len() as i64;
    let reach = faulty.reach_all();
    let mut report = ClaimReport::default();
    for i in (1 - 2 * n)..(2 * n) {
        if i == 0 {
            continue;
        }
        let steps = proper_steps(table, i);
        let shorter = proper_steps(table, i - i.signum());
        for (p, q) in steps.ones() {
            report.checked += 1;
            if shorter.get(p, q) {
                continue;
            }
            let bad = (1..=len).find(|&x| (1..=len).contains(&(x + i)) && !reach.get(p, x as usize, q, (x + i) as usize));
            if let Some(x) = bad {
                report.violations.push(format!("shrink i={i} p={p} q={q}: no move from v{x} and no step of pace {}", i - i.signum()));
            }
        }
    }
    report
}

/// For every proper step `(i, p, q)` with `0 < i < 2n` and every position
/// `x`: the faulty chain allows `(p, v_x)` to reach `(q, v_(x+i))` or
/// `(q, v_(x+i+1))`, or it allows every move from `(p, v_y)` below the fault
/// to `(q, v_z)` above it.
pub fn check_stretch(table: &TransferTable, faulty: &ChainLandscape) -> ClaimReport {
    let m = faulty.fault().expect("stretch check needs the faulty chain");
    let n = faulty.states();
    let len = faulty.len();
    let reach = faulty.reach_all();
    let mut report = ClaimReport::default();
    for i in 1..2 * n {
        for (p, q) in proper_steps(table, i as i64).ones() {
            report.checked += 1;
            let across = (1..m).all(|y| (m + 2..=len).all(|z| reach.get(p, y, q, z)));
            for x in (1..=len).filter(|&x| x + i <= len) {
                let direct = reach.get(p, x, q, x + i);
                let further = x + i < len && reach.get(p, x, q, x + i + 1);
                if !(direct || further || across) {
                    report.violations.push(format!("stretch i={i} p={p} q={q} x={x}"));
                    break;
                }
            }
        }
    }
    report
}
