//! Deterministic tree-walking automata with one weak pebble.
//!
//! The pebble can be placed on the current node and lifted only where it lies;
//! the walker senses whether the pebble is on its current node. A missing
//! action, or an action that cannot be executed, rejects.
//!
//! File format, `#` comments:
//!
//! ```text
//! states s t
//! initial s
//! paction s b root.int 0 -> place goto t
//! paction t b root.int 1 -> move(+1)
//! paction t a 1.leaf 0 -> accept
//! ```
//!
//! `action := (move(<dir>) | place | lift | accept | reject) [goto <state>] | goto <state>`;
//! without `goto` the state is kept, a bare `goto` changes state in place.

use std::fmt::{self, Write};

use crate::error::{Error, Result};
use crate::text::tokenize;
use crate::tree::{ChildPos, Direction, Label, LabeledTree, NodeAddr, NodeType};

pub type PState = usize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Move(Direction),
    Place,
    Lift,
    Accept,
    Reject,
    Stay,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Action {
    pub kind: ActionKind,
    pub goto: Option<PState>,
}

impl Action {
    fn new(kind: ActionKind, goto: PState) -> Self {
        Action { kind, goto: Some(goto) }
    }

    fn halt(kind: ActionKind) -> Self {
        Action { kind, goto: None }
    }
}

/// Observation at the head: state, label, node type and pebble presence.
pub type PObs = (PState, Label, NodeType, bool);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PebbleMachine {
    states: Vec<String>,
    initial: PState,
    table: Vec<Option<Action>>,
}

fn slot(q: PState, label: Label, ty: NodeType, pebble: bool) -> usize {
    ((q * 2 + label.index()) * 6 + ty.index()) * 2 + usize::from(pebble)
}

impl PebbleMachine {
    pub fn new(states: Vec<String>, initial: PState) -> Self {
        let table = vec![None; states.len() * 24];
        PebbleMachine { states, initial, table }
    }

    /// Sets the action for one observation, returning the previous one.
    pub fn set(&mut self, obs: PObs, action: Action) -> Option<Action> {
        let (q, l, t, p) = obs;
        self.table[slot(q, l, t, p)].replace(action)
    }

    pub fn action(&self, obs: PObs) -> Option<Action> {
        let (q, l, t, p) = obs;
        self.table[slot(q, l, t, p)]
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> PState {
        self.initial
    }

    pub fn state_name(&self, q: PState) -> &str {
        &self.states[q]
    }

    /// Observations with an action, in table order.
    pub fn actions(&self) -> impl Iterator<Item = (PObs, Action)> + '_ {
        let obs = (0..self.states.len()).flat_map(|q| {
            Label::ALL.into_iter().flat_map(move |l| {
                NodeType::ALL.into_iter().flat_map(move |t| [false, true].map(|p| (q, l, t, p)))
            })
        });
        obs.filter_map(|o| self.action(o).map(|a| (o, a)))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
    FuelExhausted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
            Verdict::FuelExhausted => "fuel exhausted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PebbleConfiguration {
    pub state: PState,
    pub head: NodeAddr,
    pub pebble: Option<NodeAddr>,
}

#[derive(Clone, Debug)]
pub struct PebbleRun {
    pub verdict: Verdict,
    pub steps: u64,
    pub trace: Vec<PebbleConfiguration>,
}

/// The default step budget, `64 * |t|^3`.
pub fn default_fuel(tree: &LabeledTree) -> u64 {
    64 * (tree.len() as u64).pow(3)
}

pub fn pebble_run(m: &PebbleMachine, tree: &LabeledTree, fuel: u64) -> (Verdict, u64) {
    let run = execute(m, tree, fuel, false);
    (run.verdict, run.steps)
}

/// Like [`pebble_run`], recording every configuration.
pub fn pebble_trace(m: &PebbleMachine, tree: &LabeledTree, fuel: u64) -> PebbleRun {
    execute(m, tree, fuel, true)
}

fn execute(m: &PebbleMachine, tree: &LabeledTree, fuel: u64, record: bool) -> PebbleRun {
    let (mut q, mut v, mut pebble) = (m.initial, 0usize, None::<usize>);
    let mut trace = Vec::new();
    let mut steps = 0;
    let verdict = loop {
        if record {
            trace.push(PebbleConfiguration {
                state: q,
                head: tree.addr(v),
                pebble: pebble.map(|p| tree.addr(p)),
            });
        }
        if steps == fuel {
            break Verdict::FuelExhausted;
        }
        steps += 1;
        let here = pebble == Some(v);
        let Some(action) = m.action((q, tree.label(v), tree.node_type_at(v), here)) else { break Verdict::Reject };
        match action.kind {
            ActionKind::Accept => break Verdict::Accept,
            ActionKind::Reject => break Verdict::Reject,
            ActionKind::Move(d) => match tree.neighbor(v, d) {
                Some(w) => v = w,
                None => break Verdict::Reject,
            },
            ActionKind::Place if pebble.is_none() => pebble = Some(v),
            ActionKind::Lift if here => pebble = None,
            ActionKind::Place | ActionKind::Lift => break Verdict::Reject,
            ActionKind::Stay => {}
        }
        if let Some(g) = action.goto {
            q = g;
        }
    };
    PebbleRun { verdict, steps, trace }
}

/// Which subtree of the pebbled node is being scanned.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum P {
    Start,
    Check,
    // pebble lifted after a failed check at an internal node
    NextChild,
    // current subtree is exhausted in preorder
    Climb,
    EnterRight,
    Place,
    // k = a-leaves found so far in the scanned subtree
    ScanDown(Side, u8),
    FromLeft(Side, u8),
    FromRight(Side, u8),
    // left scan succeeded, returning to the pebble
    Return,
}

fn pebble_states() -> Vec<P> {
    let mut v = vec![P::Start, P::Check, P::NextChild, P::Climb, P::EnterRight, P::Place, P::Return];
    for (side, k) in [(Side::Left, 0), (Side::Right, 0), (Side::Right, 1)] {
        v.extend([P::ScanDown(side, k), P::FromLeft(side, k), P::FromRight(side, k)]);
    }
    v
}

fn pebble_name(s: P) -> String {
    let side = |s: Side| if s == Side::Left { "l" } else { "r" };
    match s {
        P::Start => "start".into(),
        P::Check => "check".into(),
        P::NextChild => "next_child".into(),
        P::Climb => "climb".into(),
        P::EnterRight => "enter_right".into(),
        P::Place => "place".into(),
        P::Return => "return".into(),
        P::ScanDown(s, k) => format!("{}scan{k}", side(s)),
        P::FromLeft(s, k) => format!("{}from1_{k}", side(s)),
        P::FromRight(s, k) => format!("{}from2_{k}", side(s)),
    }
}

fn up(ty: NodeType, goto_left: P, goto_right: P) -> Option<(ActionKind, P)> {
    match ty.pos {
        ChildPos::Left => Some((ActionKind::Move(Direction::Up1), goto_left)),
        ChildPos::Right => Some((ActionKind::Move(Direction::Up2), goto_right)),
        ChildPos::Root => None,
    }
}

fn pebble_action(s: P, label: Label, ty: NodeType, here: bool) -> Option<Action> {
    use ActionKind::*;
    let leaf = ty.is_leaf();
    let a_leaf = leaf && label == Label::A;
    let r = match s {
        P::Start => Some((Place, P::Check)),
        P::Check if !here => None,
        P::Check if leaf => Some((Lift, P::Climb)),
        P::Check => Some((Move(Direction::Down1), P::ScanDown(Side::Left, 0))),
        P::NextChild => Some((Move(Direction::Down1), P::Place)),
        P::Place => Some((Place, P::Check)),
        P::Climb => up(ty, P::EnterRight, P::Climb),
        P::EnterRight => Some((Move(Direction::Down2), P::Place)),
        P::Return if here => Some((Move(Direction::Down2), P::ScanDown(Side::Right, 0))),
        P::Return => up(ty, P::Return, P::Return),
        P::ScanDown(_, _) if !leaf => Some((Move(Direction::Down1), s)),
        P::ScanDown(Side::Left, _) if a_leaf => up(ty, P::Return, P::Return),
        P::ScanDown(Side::Right, 1) if a_leaf => return Some(Action::halt(Accept)),
        P::ScanDown(side, k) => {
            let k = if a_leaf { k + 1 } else { k };
            up(ty, P::FromLeft(side, k), P::FromRight(side, k))
        }
        // scanned subtree exhausted without success
        P::FromLeft(Side::Left, _) | P::FromRight(Side::Right, _) if here => Some((Lift, P::NextChild)),
        P::FromLeft(_, _) | P::FromRight(_, _) if here => None,
        P::FromLeft(side, k) => Some((Move(Direction::Down2), P::ScanDown(side, k))),
        P::FromRight(side, k) => up(ty, P::FromLeft(side, k), P::FromRight(side, k)),
    };
    match r {
        Some((kind, g)) => Some(Action::new(kind, idx(g))),
        // preorder tour finished
        None if s == P::Climb => Some(Action::halt(Reject)),
        None => None,
    }
}

fn idx(s: P) -> PState {
    pebble_states().iter().position(|&x| x == s).expect("state listed")
}

/// The machine that moves its pebble through the tree in preorder and, at
/// each pebbled node `v`, checks that the left subtree of `v` has an a-leaf
/// and the right subtree has two. It rejects after the last node.
pub fn build_pebble_l() -> PebbleMachine {
    let states = pebble_states();
    let mut m = PebbleMachine::new(states.iter().map(|&s| pebble_name(s)).collect(), idx(P::Start));
    for &s in &states {
        for label in Label::ALL {
            for ty in NodeType::ALL {
                for here in [false, true] {
                    if let Some(a) = pebble_action(s, label, ty, here) {
                        m.set((idx(s), label, ty, here), a);
                    }
                }
            }
        }
    }
    m
}

fn action_text(m: &PebbleMachine, a: Action) -> String {
    let kind = match a.kind {
        ActionKind::Move(d) => format!("move({d})"),
        ActionKind::Place => "place".into(),
        ActionKind::Lift => "lift".into(),
        ActionKind::Accept => "accept".into(),
        ActionKind::Reject => "reject".into(),
        ActionKind::Stay => String::new(),
    };
    match (kind.is_empty(), a.goto) {
        (true, Some(g)) => format!("goto {}", m.state_name(g)),
        (false, Some(g)) => format!("{kind} goto {}", m.state_name(g)),
        (_, None) => kind,
    }
}

pub fn print_pebble(m: &PebbleMachine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "states {}", m.states.join(" "));
    let _ = writeln!(out, "initial {}", m.state_name(m.initial));
    for ((q, l, t, p), a) in m.actions() {
        let _ = writeln!(out, "paction {} {} {} {} -> {}", m.state_name(q), l, t, u8::from(p), action_text(m, a));
    }
    out
}

pub fn parse_pebble(text: &str) -> Result<PebbleMachine> {
    let mut states: Option<Vec<String>> = None;
    let mut initial = None;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let toks = tokenize(i + 1, raw);
        let Some(&(_, head)) = toks.items.first() else { continue };
        let lookup = |idx: usize, states: &Option<Vec<String>>| -> Result<usize> {
            let names = states.as_ref().ok_or_else(|| toks.err(idx, "`states` line must come first"))?;
            let name = toks.items.get(idx).ok_or_else(|| toks.err(idx, "missing state name"))?.1;
            names.iter().position(|s| s == name).ok_or_else(|| toks.err(idx, format!("unknown state `{name}`")))
        };
        match head {
            "states" => states = Some(toks.items[1..].iter().map(|&(_, s)| s.to_string()).collect()),
            "initial" => initial = Some(lookup(1, &states)?),
            "paction" => {
                if toks.items.len() < 7 || toks.items[5].1 != "->" {
                    return Err(toks.err(0, "expected `paction <state> <label> <type> <0|1> -> <action>`"));
                }
                let q = lookup(1, &states)?;
                let label = toks.items[2].1.parse::<Label>().map_err(|e| toks.err(2, e))?;
                let ty = toks.items[3].1.parse::<NodeType>().map_err(|e| toks.err(3, e))?;
                let here = match toks.items[4].1 {
                    "0" => false,
                    "1" => true,
                    other => return Err(toks.err(4, format!("expected 0 or 1, found `{other}`"))),
                };
                let mut idx = 6;
                let word = toks.items[idx].1;
                let kind = if let Some(d) = word.strip_prefix("move(").and_then(|w| w.strip_suffix(')')) {
                    ActionKind::Move(d.parse().map_err(|e| toks.err(idx, e))?)
                } else {
                    match word {
                        "place" => ActionKind::Place,
                        "lift" => ActionKind::Lift,
                        "accept" => ActionKind::Accept,
                        "reject" => ActionKind::Reject,
                        "goto" => ActionKind::Stay,
                        other => return Err(toks.err(idx, format!("unknown action `{other}`"))),
                    }
                };
                if kind != ActionKind::Stay {
                    idx += 1;
                }
                let goto = match toks.items.get(idx) {
                    None if kind == ActionKind::Stay => return Err(toks.err(idx, "missing state after goto")),
                    None => None,
                    Some(&(_, "goto")) if kind != ActionKind::Stay => Some(lookup(idx + 1, &states)?),
                    Some(_) if kind == ActionKind::Stay => Some(lookup(idx + 1, &states)?),
                    Some(&(_, other)) => return Err(toks.err(idx, format!("unexpected `{other}`"))),
                };
                let consumed = match (kind, goto) {
                    (ActionKind::Stay, _) => 8,
                    (_, Some(_)) => 9,
                    (_, None) => 7,
                };
                if toks.items.len() > consumed {
                    return Err(toks.err(consumed, "trailing input"));
                }
                entries.push((toks.line, (q, label, ty, here), Action { kind, goto }));
            }
            other => return Err(toks.err(0, format!("unknown directive `{other}`"))),
        }
    }
    let states = states.ok_or_else(|| Error::syntax(1, 1, "missing `states` line"))?;
    let initial = initial.ok_or_else(|| Error::syntax(1, 1, "missing `initial` line"))?;
    let mut m = PebbleMachine::new(states, initial);
    for (line, obs, a) in entries {
        if m.set(obs, a).is_some() {
            return Err(Error::syntax(line, 1, "second action for the same observation"));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{enumerate_trees, in_language_L};

    fn tree(s: &str) -> LabeledTree {
        s.parse().unwrap()
    }

    #[test]
    fn trivial_machines() {
        let mut m = PebbleMachine::new(vec!["s".into()], 0);
        for l in Label::ALL {
            for t in NodeType::ALL {
                m.set((0, l, t, false), Action::halt(ActionKind::Accept));
            }
        }
        assert_eq!(pebble_run(&m, &tree("(b (a) (b))"), 100).0, Verdict::Accept);
        let mut down = PebbleMachine::new(vec!["s".into()], 0);
        down.set((0, Label::B, "root.leaf".parse().unwrap(), false), Action::halt(ActionKind::Move(Direction::Down1)));
        assert_eq!(pebble_run(&down, &tree("(b)"), 100).0, Verdict::Reject);
    }

    #[test]
    fn agrees_with_oracle_up_to_nine_nodes() {
        let m = build_pebble_l();
        for t in enumerate_trees(9) {
            let (v, _) = pebble_run(&m, &t, default_fuel(&t));
            assert_eq!(v == Verdict::Accept, in_language_L(&t), "{t}");
            assert_ne!(v, Verdict::FuelExhausted);
        }
    }

    #[test]
    fn format_round_trip() {
        let m = build_pebble_l();
        let text = print_pebble(&m);
        let back = parse_pebble(&text).unwrap();
        assert_eq!(back, m);
        assert!(parse_pebble("states s\ninitial s\npaction s b root.int 0 -> move(+3)\n").is_err());
        let stay = parse_pebble("states s t\ninitial s\npaction s b root.int 0 -> goto t\n").unwrap();
        assert_eq!(stay.action((0, Label::B, "root.int".parse().unwrap(), false)).unwrap().goto, Some(1));
    }

    #[test]
    fn replay_is_identical() {
        let m = build_pebble_l();
        let t = tree("(b (b (a) (b)) (b (a) (a)))");
        let x = pebble_trace(&m, &t, default_fuel(&t));
        let y = pebble_trace(&m, &t, default_fuel(&t));
        assert_eq!(x.trace, y.trace);
        assert_eq!(x.verdict, Verdict::Accept);
    }
}
