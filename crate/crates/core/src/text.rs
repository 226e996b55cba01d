//! Whitespace tokenizer for the line-oriented file formats.

use crate::error::Error;

pub(crate) struct Tokens<'a> {
    pub line: usize,
    pub items: Vec<(usize, &'a str)>,
}

pub(crate) fn tokenize(line_no: usize, line: &str) -> Tokens<'_> {
    let body = line.split('#').next().unwrap_or("");
    let mut items = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                items.push((s, &body[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        items.push((s, &body[s..]));
    }
    Tokens { line: line_no, items }
}

impl<'a> Tokens<'a> {
    pub fn err(&self, idx: usize, msg: impl Into<String>) -> Error {
        let col = self.items.get(idx).map_or(1, |&(c, _)| c + 1);
        Error::syntax(self.line, col, msg)
    }
}
