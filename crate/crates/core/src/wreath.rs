//! The wreath product `G wr H` over a finite H-set, and indexing of its base.
//!
//! A base vector `k = (g_0, ..., g_{m-1})` is stored as its mixed-radix
//! index with position 0 most significant, so the identity vector is 0.
//! `H` acts on the base by `(h . k)_w = k_{h^-1 w}` and wreath elements
//! multiply as `(k, h)(k', h') = (k (h . k'), h h')`.

use crate::action::{parse_action, GroupAction};
use crate::error::{Error, Result};
use crate::group::{io::parse_group, FiniteGroup};
use serde::Serialize;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path;

/// Largest representable base size.
pub const MAX_K_SIZE: usize = 1 << 62;

/// Identifies the algebra (switch table plus action) a context was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ContextId(pub u64);

#[derive(Clone, Debug)]
pub struct WreathContext {
    name: String,
    g: FiniteGroup,
    action: GroupAction,
    k_size: usize,
    weights: Vec<usize>,
    win: Vec<usize>,
    spin_period: usize,
    id: ContextId,
}

/// An element `(k, h)` of the wreath product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WreathElement {
    pub base: usize,
    pub spin: usize,
    context: ContextId,
}

impl WreathContext {
    pub fn new(g: FiniteGroup, action: GroupAction) -> Result<Self> {
        let n = g.order();
        let m = action.omega_size();
        let mut k_size: usize = 1;
        for _ in 0..m {
            k_size = k_size
                .checked_mul(n)
                .filter(|&k| k <= MAX_K_SIZE)
                .ok_or(Error::BaseTooLarge(n, m))?;
        }
        let mut weights = vec![1; m];
        for w in (0..m.saturating_sub(1)).rev() {
            weights[w] = weights[w + 1] * n;
        }
        let mut hasher = DefaultHasher::new();
        g.hash(&mut hasher);
        action.rows().hash(&mut hasher);
        let name = format!("{} wr {}", g.name(), action.group().name());
        Ok(WreathContext {
            name,
            g,
            action,
            k_size,
            weights,
            win: vec![0],
            spin_period: 1,
            id: ContextId(hasher.finish()),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Replaces the winning set (default: the identity vector).
    pub fn with_win_set(mut self, mut win: Vec<usize>) -> Result<Self> {
        win.sort_unstable();
        win.dedup();
        if win.is_empty() {
            return Err(Error::InvalidWinSet("winning set is empty".into()));
        }
        if let Some(&bad) = win.iter().find(|&&w| w >= self.k_size) {
            return Err(Error::InvalidWinSet(format!("index {bad} >= |K| = {}", self.k_size)));
        }
        self.win = win;
        Ok(self)
    }

    /// The adversary may only spin after moves whose 1-based index is a
    /// multiple of `period`.
    pub fn with_spin_period(mut self, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidParameter("spin period must be positive".into()));
        }
        self.spin_period = period;
        Ok(self)
    }

    /// The same puzzle with the switch table treated as a loop.
    pub fn as_loop(&self) -> Self {
        let mut c = self.clone();
        c.g = c.g.as_loop();
        c
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn id(&self) -> ContextId {
        self.id
    }

    pub fn switch_group(&self) -> &FiniteGroup {
        &self.g
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn spin_group(&self) -> &FiniteGroup {
        self.action.group()
    }

    pub fn positions(&self) -> usize {
        self.action.omega_size()
    }

    pub fn k_size(&self) -> usize {
        self.k_size
    }

    pub fn h_size(&self) -> usize {
        self.action.group().order()
    }

    pub fn win_set(&self) -> &[usize] {
        &self.win
    }

    pub fn has_default_win_set(&self) -> bool {
        self.win == [0]
    }

    pub fn spin_period(&self) -> usize {
        self.spin_period
    }

    /// True when the rules are the plain game (identity wins, spins every turn).
    pub fn has_default_rules(&self) -> bool {
        self.has_default_win_set() && self.spin_period == 1
    }

    #[inline]
    pub fn is_win(&self, x: usize) -> bool {
        if self.win.len() == 1 {
            self.win[0] == x
        } else {
            self.win.binary_search(&x).is_ok()
        }
    }

    /// Whether the adversary spins after the `move_number`-th move (1-based).
    #[inline]
    pub fn spins_after(&self, move_number: usize) -> bool {
        move_number.is_multiple_of(self.spin_period)
    }

    #[inline]
    pub fn coord(&self, x: usize, w: usize) -> usize {
        (x / self.weights[w]) % self.g.order()
    }

    pub fn decode(&self, x: usize) -> Vec<usize> {
        (0..self.positions()).map(|w| self.coord(x, w)).collect()
    }

    pub fn encode(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.positions() {
            return Err(Error::InvalidBaseVector(format!(
                "{} coordinates for {} positions",
                coords.len(),
                self.positions()
            )));
        }
        if let Some(&bad) = coords.iter().find(|&&c| c >= self.g.order()) {
            return Err(Error::InvalidBaseVector(format!("coordinate {bad} >= |G| = {}", self.g.order())));
        }
        Ok(coords.iter().zip(&self.weights).map(|(c, w)| c * w).sum())
    }

    /// Builds an index from per-position values without validation.
    pub(crate) fn encode_with(&self, f: impl Fn(usize) -> usize) -> usize {
        (0..self.positions()).map(|w| f(w) * self.weights[w]).sum()
    }

    /// Coordinatewise product in K.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        let n = self.g.order();
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut weight = 1;
        for _ in 0..self.positions() {
            out += self.g.mul(a % n, b % n) * weight;
            a /= n;
            b /= n;
            weight *= n;
        }
        out
    }

    pub fn inv(&self, a: usize) -> usize {
        self.encode_with(|w| self.g.inv(self.coord(a, w)))
    }

    /// The unique `x` with `a x = c` (coordinatewise left division).
    pub fn left_div(&self, a: usize, c: usize) -> usize {
        self.encode_with(|w| self.g.left_div(self.coord(a, w), self.coord(c, w)))
    }

    /// `h . k`: coordinate `w` of the result is coordinate `h^-1 w` of `k`.
    #[inline]
    pub fn act_on_base(&self, h: usize, k: usize) -> usize {
        let n = self.g.order();
        let perm = self.action.perm(h);
        let mut rest = k;
        let mut out = 0;
        for v in (0..self.positions()).rev() {
            out += (rest % n) * self.weights[perm[v]];
            rest /= n;
        }
        out
    }

    pub fn is_h_fixed(&self, k: usize) -> bool {
        (0..self.h_size()).all(|h| self.act_on_base(h, k) == k)
    }

    /// Number of H-orbits on K.
    pub fn base_orbit_count(&self) -> usize {
        let mut seen = vec![false; self.k_size];
        let mut count = 0;
        for k in 0..self.k_size {
            if !seen[k] {
                count += 1;
                for h in 0..self.h_size() {
                    seen[self.act_on_base(h, k)] = true;
                }
            }
        }
        count
    }

    pub fn element(&self, base: usize, spin: usize) -> Result<WreathElement> {
        if base >= self.k_size || spin >= self.h_size() {
            return Err(Error::InvalidBaseVector(format!("({base}, {spin}) out of range")));
        }
        Ok(WreathElement { base, spin, context: self.id })
    }

    pub fn wreath_identity(&self) -> WreathElement {
        WreathElement { base: 0, spin: 0, context: self.id }
    }

    fn check(&self, a: &WreathElement) -> Result<()> {
        if a.context != self.id {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn wreath_multiply(&self, a: &WreathElement, b: &WreathElement) -> Result<WreathElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(WreathElement {
            base: self.mul(a.base, self.act_on_base(a.spin, b.base)),
            spin: self.spin_group().mul(a.spin, b.spin),
            context: self.id,
        })
    }

    /// `(k, h)^-1 = (h^-1 . k^-1, h^-1)`.
    pub fn wreath_inverse(&self, a: &WreathElement) -> Result<WreathElement> {
        self.check(a)?;
        let hinv = self.spin_group().inv(a.spin);
        Ok(WreathElement {
            base: self.act_on_base(hinv, self.inv(a.base)),
            spin: hinv,
            context: self.id,
        })
    }

    /// The projection onto the base; a map of sets, not a homomorphism.
    pub fn projection(&self, a: &WreathElement) -> usize {
        a.base
    }

    pub fn wreath_order(&self) -> usize {
        self.k_size * self.h_size()
    }
}

impl WreathElement {
    pub fn context(&self) -> ContextId {
        self.context
    }
}

/// Loads a context file:
///
/// ```text
/// context <name>
/// group <path>
/// action <path>
/// win <index> ...          (optional)
/// spin-period <r>          (optional)
/// ```
///
/// Paths are relative to the context file.
pub fn load_context(path: &Path) -> Result<WreathContext> {
    let text = std::fs::read_to_string(path)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    parse_context(&text, dir)
}

pub fn parse_context(text: &str, dir: &Path) -> Result<WreathContext> {
    use crate::group::io::{content_lines, format_err};
    let mut name = None;
    let mut group = None;
    let mut action_text = None;
    let mut win = None;
    let mut period = None;
    for (ln, line) in content_lines(text) {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "context" => name = Some(rest.to_string()),
            "group" => group = Some(parse_group(&std::fs::read_to_string(dir.join(rest))?)?),
            "action" => action_text = Some((ln, std::fs::read_to_string(dir.join(rest))?)),
            "win" => {
                win = Some(
                    rest.split_whitespace()
                        .map(|t| t.parse::<usize>().map_err(|_| format_err(ln, format!("bad index {t:?}"))))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            "spin-period" => period = Some(rest.parse::<usize>().map_err(|_| format_err(ln, "bad spin period"))?),
            _ => return Err(format_err(ln, format!("unknown key {key:?}"))),
        }
    }
    let g = group.ok_or_else(|| format_err(1, "context file lacks a `group` line"))?;
    let (_, action_text) = action_text.ok_or_else(|| format_err(1, "context file lacks an `action` line"))?;
    let action = parse_action(&action_text, None)?;
    let mut ctx = WreathContext::new(g, action)?;
    if let Some(n) = name {
        ctx = ctx.with_name(n);
    }
    if let Some(w) = win {
        ctx = ctx.with_win_set(w)?;
    }
    if let Some(p) = period {
        ctx = ctx.with_spin_period(p)?;
    }
    Ok(ctx)
}
