//! Strategies and their verification by belief-state propagation.
//!
//! The belief after `i` moves is the set of configurations the switches may
//! be in given that the light has not come on. A strategy is surjective
//! exactly when the belief is empty after the last move.

use crate::error::{Error, Result};
use crate::group::io::{content_lines, format_err, parse_indices};
use crate::wreath::{ContextId, WreathContext, WreathElement};
use fixedbitset::FixedBitSet;

/// Largest base for which `verify` will allocate a belief bitset.
pub const VERIFY_CAP: usize = 1 << 26;
/// Largest base for which `verify` computes per-state solve times.
pub const SOLVED_AT_CAP: usize = 256;
/// Default number of adversary paths `verify_naive` may enumerate.
pub const DEFAULT_NAIVE_BUDGET: u128 = 10_000_000;

/// A finite sequence of moves, each a base-vector index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    moves: Vec<usize>,
    context: ContextId,
}

impl Strategy {
    pub fn new(ctx: &WreathContext, moves: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = moves.iter().find(|&&k| k >= ctx.k_size()) {
            return Err(Error::InvalidBaseVector(format!("move {bad} >= |K| = {}", ctx.k_size())));
        }
        Ok(Strategy { moves, context: ctx.id() })
    }

    pub fn empty(ctx: &WreathContext) -> Self {
        Strategy { moves: Vec::new(), context: ctx.id() }
    }

    pub fn from_coords(ctx: &WreathContext, moves: &[Vec<usize>]) -> Result<Self> {
        let moves = moves.iter().map(|c| ctx.encode(c)).collect::<Result<_>>()?;
        Ok(Strategy { moves, context: ctx.id() })
    }

    pub fn moves(&self) -> &[usize] {
        &self.moves
    }

    pub fn into_moves(self) -> Vec<usize> {
        self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn context(&self) -> ContextId {
        self.context
    }

    pub fn is_palindromic(&self) -> bool {
        self.moves.iter().eq(self.moves.iter().rev())
    }

    pub fn coords(&self, ctx: &WreathContext) -> Vec<Vec<usize>> {
        self.moves.iter().map(|&k| ctx.decode(k)).collect()
    }

    pub(crate) fn check(&self, ctx: &WreathContext) -> Result<()> {
        if self.context != ctx.id() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }
}

/// `A * B = (A, b_1, A, b_2, ..., b_M, A)`.
pub fn interleave(a: &Strategy, b: &Strategy) -> Result<Strategy> {
    if a.context != b.context {
        return Err(Error::ContextMismatch);
    }
    let mut moves = Vec::with_capacity((b.len() + 1) * a.len() + b.len());
    moves.extend_from_slice(&a.moves);
    for &x in &b.moves {
        moves.push(x);
        moves.extend_from_slice(&a.moves);
    }
    Ok(Strategy { moves, context: a.context })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeliefState {
    members: FixedBitSet,
    step: usize,
}

impl BeliefState {
    /// `K` minus the winning set.
    pub fn initial(ctx: &WreathContext) -> Self {
        let mut members = FixedBitSet::with_capacity(ctx.k_size());
        members.insert_range(..);
        for &w in ctx.win_set() {
            members.set(w, false);
        }
        BeliefState { members, step: 0 }
    }

    pub fn from_members(ctx: &WreathContext, members: impl IntoIterator<Item = usize>) -> Self {
        let mut set = FixedBitSet::with_capacity(ctx.k_size());
        set.extend(members);
        BeliefState { members: set, step: 0 }
    }

    pub(crate) fn with_step(members: FixedBitSet, step: usize) -> Self {
        BeliefState { members, step }
    }

    pub(crate) fn into_bits(self) -> FixedBitSet {
        self.members
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn members(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn is_h_closed(&self, ctx: &WreathContext) -> bool {
        self.members
            .ones()
            .all(|s| (0..ctx.h_size()).all(|h| self.members.contains(ctx.act_on_base(h, s))))
    }
}

/// Applies move `k`: states landing in the winning set drop out, and if the
/// adversary spins after this move the survivors are closed under `H`.
pub fn belief_step(ctx: &WreathContext, s: &BeliefState, k: usize) -> BeliefState {
    let step = s.step + 1;
    let spin = ctx.spins_after(step);
    let mut next = FixedBitSet::with_capacity(ctx.k_size());
    for x in s.members.ones() {
        let y = ctx.mul(x, k);
        if ctx.is_win(y) {
            continue;
        }
        if spin {
            if next.contains(y) {
                continue;
            }
            for h in 0..ctx.h_size() {
                next.insert(ctx.act_on_base(h, y));
            }
        } else {
            next.insert(y);
        }
    }
    BeliefState { members: next, step }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub valid: bool,
    pub length: usize,
    pub minimal: bool,
    /// Belief left after the final move.
    pub residual: Vec<usize>,
    /// Belief size after each move.
    pub belief_sizes: Vec<usize>,
    /// For each base vector, the worst-case move number by which it is
    /// solved when it is the initial state (`Some(0)` for winning states).
    /// Only computed for small bases.
    pub solved_at: Option<Vec<Option<usize>>>,
}

/// `|K| - |W|`: no shorter strategy can be surjective, since each move
/// eliminates at most `|W|` states.
pub fn minimal_length_bound(ctx: &WreathContext) -> usize {
    ctx.k_size() - ctx.win_set().len()
}

pub fn verify(ctx: &WreathContext, s: &Strategy) -> Result<VerificationReport> {
    s.check(ctx)?;
    if ctx.k_size() > VERIFY_CAP {
        return Err(Error::BeliefCapExceeded { k_size: ctx.k_size(), cap: VERIFY_CAP });
    }
    let mut belief = BeliefState::initial(ctx);
    let mut sizes = Vec::with_capacity(s.len());
    let win = ctx.win_set().len();
    for &k in &s.moves {
        let before = belief.len();
        belief = belief_step(ctx, &belief, k);
        let after = belief.len();
        assert!(after + win >= before, "a move eliminated more than |W| states");
        if ctx.spins_after(belief.step) {
            assert!(belief.is_h_closed(ctx), "belief not closed under spins");
        }
        sizes.push(after);
    }
    let valid = belief.is_empty();
    let solved_at = (ctx.k_size() <= SOLVED_AT_CAP).then(|| solve_times(ctx, s));
    Ok(VerificationReport {
        valid,
        length: s.len(),
        minimal: valid && s.len() == minimal_length_bound(ctx),
        residual: belief.members(),
        belief_sizes: sizes,
        solved_at,
    })
}

/// Just the verdict of [`verify`], without the diagnostics.
pub fn is_surjective(ctx: &WreathContext, s: &Strategy) -> Result<bool> {
    s.check(ctx)?;
    if ctx.k_size() > VERIFY_CAP {
        return Err(Error::BeliefCapExceeded { k_size: ctx.k_size(), cap: VERIFY_CAP });
    }
    let mut belief = BeliefState::initial(ctx);
    for &k in &s.moves {
        belief = belief_step(ctx, &belief, k);
        if belief.is_empty() {
            return Ok(true);
        }
    }
    Ok(belief.is_empty())
}

fn solve_times(ctx: &WreathContext, s: &Strategy) -> Vec<Option<usize>> {
    (0..ctx.k_size())
        .map(|x| {
            if ctx.is_win(x) {
                return Some(0);
            }
            let mut b = BeliefState::from_members(ctx, [x]);
            for (i, &k) in s.moves.iter().enumerate() {
                b = belief_step(ctx, &b, k);
                if b.is_empty() {
                    return Some(i + 1);
                }
            }
            None
        })
        .collect()
}

/// Number of adversary paths `verify_naive` would enumerate. The spin after
/// the final move never matters.
pub fn naive_path_count(ctx: &WreathContext, len: usize) -> u128 {
    let spins = (1..len).filter(|&i| ctx.spins_after(i)).count();
    (0..spins).fold(1u128, |acc, _| acc.saturating_mul(ctx.h_size() as u128))
}

/// Checks surjectivity straight from the wreath-product formulation: for
/// every spin sequence `h_i`, with `m_j = (k_1, h_1) ... (k_j, h_j)`, each
/// initial `x` outside `W` must satisfy `x p(m_j) in spin(m_{j-1}) . W` for
/// some `j`.
pub fn verify_naive(ctx: &WreathContext, s: &Strategy, budget: u128) -> Result<bool> {
    s.check(ctx)?;
    ctx.switch_group().require_group()?;
    let needed = naive_path_count(ctx, s.len());
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let unsolved: Vec<usize> = (0..ctx.k_size()).filter(|&x| !ctx.is_win(x)).collect();
    naive_rec(ctx, s, 0, ctx.wreath_identity(), &unsolved)
}

fn naive_rec(ctx: &WreathContext, s: &Strategy, j: usize, m: WreathElement, unsolved: &[usize]) -> Result<bool> {
    if unsolved.is_empty() {
        return Ok(true);
    }
    if j == s.len() {
        return Ok(false);
    }
    let targets: Vec<usize> = ctx.win_set().iter().map(|&w| ctx.act_on_base(m.spin, w)).collect();
    let step = j + 1;
    let spins: Vec<usize> = if step < s.len() && ctx.spins_after(step) {
        (0..ctx.h_size()).collect()
    } else {
        vec![0]
    };
    for h in spins {
        let next = ctx.wreath_multiply(&m, &ctx.element(s.moves[j], h)?)?;
        let left: Vec<usize> = unsolved
            .iter()
            .copied()
            .filter(|&x| !targets.contains(&ctx.mul(x, next.base)))
            .collect();
        if !naive_rec(ctx, s, step, next, &left)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Strategy file: `strategy <context-name> <N>` then one move per line.
pub fn write_strategy(ctx: &WreathContext, s: &Strategy) -> String {
    let mut out = format!("strategy {} {}\n", ctx.name(), s.len());
    for k in &s.moves {
        let c: Vec<String> = ctx.decode(*k).iter().map(usize::to_string).collect();
        out.push_str(&c.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a strategy file against `ctx`. The context name in the header is
/// informational and not compared.
pub fn parse_strategy(ctx: &WreathContext, text: &str) -> Result<Strategy> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| format_err(1, "empty strategy file"))?;
    let mut toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 2 || toks[0] != "strategy" {
        return Err(format_err(hl, "expected `strategy <context-name> <N>`"));
    }
    let n: usize = toks.pop().unwrap().parse().map_err(|_| format_err(hl, "N is not a number"))?;
    let mut moves = Vec::with_capacity(n);
    for (ln, line) in lines {
        let c = parse_indices(ln, line, ctx.positions())?;
        moves.push(ctx.encode(&c).map_err(|e| format_err(ln, e.to_string()))?);
    }
    if moves.len() != n {
        return Err(format_err(hl, format!("header promises {n} moves, found {}", moves.len())));
    }
    Strategy::new(ctx, moves)
}
