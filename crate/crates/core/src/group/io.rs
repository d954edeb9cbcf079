//! Text format for multiplication tables:
//!
//! ```text
//! group <name> <order>      (or `loop <name> <order>`)
//! <order> lines of <order> space-separated indices
//! labels <l_0> ... <l_{n-1}> (optional)
//! ```
use super::FiniteGroup;
use crate::error::{Error, Result};

pub(crate) fn format_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format { line, col: 1, msg: msg.into() }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_indices(line_no: usize, line: &str, expected: usize) -> Result<Vec<usize>> {
    let row = line
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| format_err(line_no, format!("not an index: {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if row.len() != expected {
        return Err(format_err(line_no, format!("expected {expected} entries, found {}", row.len())));
    }
    Ok(row)
}

pub fn parse_group(text: &str) -> Result<FiniteGroup> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| format_err(1, "empty group file"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let loop_mode = match parts.first() {
        Some(&"group") => false,
        Some(&"loop") => true,
        _ => return Err(format_err(hl, "expected `group <name> <order>` or `loop <name> <order>`")),
    };
    if parts.len() != 3 {
        return Err(format_err(hl, "header needs a name and an order"));
    }
    let order: usize = parts[2].parse().map_err(|_| format_err(hl, "order is not a number"))?;
    if order == 0 {
        return Err(format_err(hl, "order must be positive"));
    }
    let mut table = Vec::with_capacity(order);
    for _ in 0..order {
        let (ln, line) = lines.next().ok_or_else(|| format_err(hl, "table truncated"))?;
        table.push(parse_indices(ln, line, order)?);
    }
    let mut labels = None;
    if let Some((ln, line)) = lines.next() {
        let mut toks = line.split_whitespace();
        if toks.next() != Some("labels") {
            return Err(format_err(ln, "unexpected trailing line (only `labels` may follow the table)"));
        }
        let l: Vec<String> = toks.map(String::from).collect();
        if l.len() != order {
            return Err(format_err(ln, format!("expected {order} labels, found {}", l.len())));
        }
        labels = Some(l);
        if let Some((ln, _)) = lines.next() {
            return Err(format_err(ln, "unexpected trailing line"));
        }
    }
    FiniteGroup::from_table(parts[1], &table, labels, loop_mode)
}

pub fn write_group(g: &FiniteGroup) -> String {
    let kind = if g.is_associative() { "group" } else { "loop" };
    let mut out = format!("{kind} {} {}\n", g.name().replace(' ', ""), g.order());
    for a in g.elements() {
        let row: Vec<String> = g.elements().map(|b| g.mul(a, b).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    if let Some(labels) = g.labels() {
        if labels.iter().all(|l| !l.chars().any(char::is_whitespace)) {
            out.push_str("labels ");
            out.push_str(&labels.join(" "));
            out.push('\n');
        }
    }
    out
}
