//! Pattern expressions and their text syntax.
//!
//! ```text
//! expr := term ('[' item (',' item)* ']')*
//! term := atom | 'chain' '(' int ',' expr ')'
//! item := '*' | expr
//! atom := base0 | base1 | base2 | primeA | D0 | D1 | D2 | Da | '@' name
//! ```

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Base0,
    Base1,
    Base2,
    PrimeA,
    D0,
    D1,
    D2,
    Da,
    Named(String),
}

impl Atom {
    fn keyword(&self) -> Option<&'static str> {
        Some(match self {
            Atom::Base0 => "base0",
            Atom::Base1 => "base1",
            Atom::Base2 => "base2",
            Atom::PrimeA => "primeA",
            Atom::D0 => "D0",
            Atom::D1 => "D1",
            Atom::D2 => "D2",
            Atom::Da => "Da",
            Atom::Named(_) => return None,
        })
    }

    fn from_keyword(s: &str) -> Option<Atom> {
        Some(match s {
            "base0" => Atom::Base0,
            "base1" => Atom::Base1,
            "base2" => Atom::Base2,
            "primeA" => Atom::PrimeA,
            "D0" => Atom::D0,
            "D1" => Atom::D1,
            "D2" => Atom::D2,
            "Da" => Atom::Da,
            _ => return None,
        })
    }

    /// Whether the atom refers to an element triple.
    pub fn is_element(&self) -> bool {
        matches!(self, Atom::D0 | Atom::D1 | Atom::D2 | Atom::Da)
    }
}

/// A composition expression. `Compose(h, items)` plugs `items[i]` into the
/// i-th leaf port of `h`; `None` leaves the port open.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternExpr {
    Atom(Atom),
    Compose(Box<PatternExpr>, Vec<Option<PatternExpr>>),
    Chain(BigUint, Box<PatternExpr>),
}

impl PatternExpr {
    pub fn atom(a: Atom) -> Self {
        PatternExpr::Atom(a)
    }

    pub fn compose(head: PatternExpr, items: Vec<Option<PatternExpr>>) -> Self {
        PatternExpr::Compose(Box::new(head), items)
    }

    pub fn chain(count: impl Into<BigUint>, e: PatternExpr) -> Self {
        PatternExpr::Chain(count.into(), Box::new(e))
    }

    /// `self[inner]` for a rank-1 head.
    pub fn plug(self, inner: PatternExpr) -> Self {
        PatternExpr::compose(self, vec![Some(inner)])
    }

    /// Number of atoms, counting a chain body once.
    pub fn size(&self) -> usize {
        match self {
            PatternExpr::Atom(_) => 1,
            PatternExpr::Compose(h, items) => h.size() + items.iter().flatten().map(PatternExpr::size).sum::<usize>(),
            PatternExpr::Chain(_, e) => e.size(),
        }
    }

    /// Whether any element atom occurs.
    pub fn uses_elements(&self) -> bool {
        match self {
            PatternExpr::Atom(a) => a.is_element(),
            PatternExpr::Compose(h, items) => h.uses_elements() || items.iter().flatten().any(PatternExpr::uses_elements),
            PatternExpr::Chain(_, e) => e.uses_elements(),
        }
    }
}

impl From<Atom> for PatternExpr {
    fn from(a: Atom) -> Self {
        PatternExpr::Atom(a)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Named(n) => write!(f, "@{n}"),
            other => f.write_str(other.keyword().expect("keyword atom")),
        }
    }
}

impl fmt::Display for PatternExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternExpr::Atom(a) => write!(f, "{a}"),
            PatternExpr::Chain(k, e) => write!(f, "chain({k}, {e})"),
            PatternExpr::Compose(h, items) => {
                write!(f, "{h}[")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    match it {
                        Some(e) => write!(f, "{e}")?,
                        None => f.write_str("*")?,
                    }
                }
                f.write_str("]")
            }
        }
    }
}

pub fn print_pattern(e: &PatternExpr) -> String {
    e.to_string()
}

pub fn parse_pattern(text: &str) -> Result<PatternExpr> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl FromStr for PatternExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pattern(s)
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: impl Into<String>) -> Error {
        let before = &self.chars[..self.pos.min(self.chars.len())];
        let line = 1 + before.iter().filter(|&&c| c == '\n').count();
        let col = 1 + before.iter().rev().take_while(|&&c| c != '\n').count();
        Error::syntax(line, col, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos].is_alphanumeric() || "_-.".contains(self.chars[self.pos])) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn expr(&mut self) -> Result<PatternExpr> {
        let mut e = self.term()?;
        while self.peek() == Some('[') {
            self.pos += 1;
            let mut items = vec![self.item()?];
            while self.peek() == Some(',') {
                self.pos += 1;
                items.push(self.item()?);
            }
            self.expect(']')?;
            e = PatternExpr::Compose(Box::new(e), items);
        }
        Ok(e)
    }

    fn item(&mut self) -> Result<Option<PatternExpr>> {
        if self.peek() == Some('*') {
            self.pos += 1;
            return Ok(None);
        }
        self.expr().map(Some)
    }

    fn term(&mut self) -> Result<PatternExpr> {
        let save = self.pos;
        if self.peek() == Some('@') {
            self.pos += 1;
            let name = self.word();
            if name.is_empty() {
                return Err(self.err("expected a pattern name after `@`"));
            }
            return Ok(PatternExpr::Atom(Atom::Named(name)));
        }
        let w = self.word();
        if w == "chain" {
            self.expect('(')?;
            self.skip_ws();
            let digits = self.word();
            let count: BigUint = digits.parse().map_err(|_| self.err(format!("expected a decimal count, found `{digits}`")))?;
            if count.is_zero() {
                return Err(self.err("chain count must be positive"));
            }
            self.expect(',')?;
            let body = self.expr()?;
            self.expect(')')?;
            return Ok(PatternExpr::Chain(count, Box::new(body)));
        }
        match Atom::from_keyword(&w) {
            Some(a) => Ok(PatternExpr::Atom(a)),
            None => {
                self.pos = save;
                self.skip_ws();
                Err(self.err(if w.is_empty() { "expected a pattern".to_string() } else { format!("unknown atom `{w}`") }))
            }
        }
    }
}

/// `chain(1, e)` is `e`; used to keep printed chains minimal.
pub fn chain_or_single(count: BigUint, e: PatternExpr) -> PatternExpr {
    if count.is_one() {
        e
    } else {
        PatternExpr::Chain(count, Box::new(e))
    }
}
