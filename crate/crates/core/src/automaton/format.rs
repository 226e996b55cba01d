//! Line-oriented automaton files.
//!
//! ```text
//! alphabet a b
//! states q0 q1
//! initial q0
//! accepting q1
//! trans q0 b root.int -> q1 a 1.leaf +1
//! ```
//!
//! `#` starts a comment. `states` must precede any line naming a state.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::text::tokenize;
use crate::tree::{Direction, Label, NodeType};

use super::{Automaton, Transition};

pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let mut alphabet: Option<Vec<Label>> = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial = Vec::new();
    let mut accepting = Vec::new();
    let mut transitions = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let toks = tokenize(i + 1, raw);
        let Some(&(_, head)) = toks.items.first() else { continue };
        let lookup = |idx: usize, states: &Option<Vec<String>>| -> Result<usize> {
            let names = states.as_ref().ok_or_else(|| toks.err(idx, "`states` line must come first"))?;
            let name = toks.items[idx].1;
            names.iter().position(|s| s == name).ok_or_else(|| toks.err(idx, format!("unknown state `{name}`")))
        };
        match head {
            "alphabet" => {
                let mut labels = Vec::new();
                for idx in 1..toks.items.len() {
                    labels.push(toks.items[idx].1.parse::<Label>().map_err(|e| toks.err(idx, e))?);
                }
                alphabet = Some(labels);
            }
            "states" => {
                if states.is_some() {
                    return Err(toks.err(0, "duplicate `states` line"));
                }
                let names: Vec<String> = toks.items[1..].iter().map(|&(_, s)| s.to_string()).collect();
                for (k, n) in names.iter().enumerate() {
                    if names[..k].contains(n) {
                        return Err(toks.err(k + 1, format!("duplicate state `{n}`")));
                    }
                }
                states = Some(names);
            }
            "initial" | "accepting" => {
                for idx in 1..toks.items.len() {
                    let q = lookup(idx, &states)?;
                    if head == "initial" { initial.push(q) } else { accepting.push(q) }
                }
            }
            "trans" => {
                if toks.items.len() != 9 || toks.items[4].1 != "->" {
                    return Err(toks.err(0, "expected `trans <p> <label> <type> -> <q> <label> <type> <dir>`"));
                }
                let label = |idx: usize| toks.items[idx].1.parse::<Label>().map_err(|e| toks.err(idx, e));
                let ty = |idx: usize| toks.items[idx].1.parse::<NodeType>().map_err(|e| toks.err(idx, e));
                let dir = toks.items[8].1.parse::<Direction>().map_err(|e| toks.err(8, e))?;
                let t = Transition {
                    src: lookup(1, &states)?,
                    src_label: label(2)?,
                    src_type: ty(3)?,
                    dst: lookup(5, &states)?,
                    dst_label: label(6)?,
                    dst_type: ty(7)?,
                    dir,
                };
                if !dir.fits(t.src_type, t.dst_type) {
                    return Err(toks.err(8, format!("direction {dir} does not fit {} -> {}", t.src_type, t.dst_type)));
                }
                transitions.push(t);
            }
            other => return Err(toks.err(0, format!("unknown directive `{other}`"))),
        }
    }
    let states = states.ok_or_else(|| Error::syntax(1, 1, "missing `states` line"))?;
    let alphabet = alphabet.unwrap_or_else(|| Label::ALL.to_vec());
    let a = Automaton::new(alphabet, states, initial, accepting, transitions);
    if let Some(v) = a.validate().first() {
        return Err(Error::Usage(format!("invalid automaton: {v}")));
    }
    Ok(a)
}

/// Canonical text form; `parse_automaton` reads it back unchanged.
pub fn print_automaton(a: &Automaton) -> String {
    let mut out = String::new();
    let labels: Vec<String> = a.alphabet().iter().map(|l| l.to_string()).collect();
    let _ = writeln!(out, "alphabet {}", labels.join(" "));
    let _ = writeln!(out, "states {}", a.state_names().join(" "));
    let names = |qs: &[usize]| qs.iter().map(|&q| a.state_name(q)).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "initial {}", names(a.initial()));
    let _ = writeln!(out, "accepting {}", names(a.accepting()));
    for t in a.transitions() {
        let _ = writeln!(
            out,
            "trans {} {} {} -> {} {} {} {}",
            a.state_name(t.src),
            t.src_label,
            t.src_type,
            a.state_name(t.dst),
            t.dst_label,
            t.dst_type,
            t.dir
        );
    }
    out.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
}
