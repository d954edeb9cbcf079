//! Depth-first search over belief states, shared by the synthesizer and the
//! decision procedure.
//!
//! A node is a belief set together with the spin phase (moves made mod the
//! spin period). The goal is the empty belief. Moves that eliminate a
//! state are tried first, then the rest in index order.

use crate::error::{Error, Result};
use crate::strategy::{belief_step, minimal_length_bound, BeliefState};
use crate::wreath::WreathContext;
use dashmap::DashMap;
use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use std::collections::HashMap;

pub const DEFAULT_SEARCH_BUDGET: usize = 10_000_000;
pub const DEFAULT_BELIEF_CAP: usize = 1 << 22;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Longest strategy to look for; `None` explores the whole reachable graph.
    pub max_depth: Option<usize>,
    /// Maximum number of distinct belief states to visit.
    pub budget: usize,
    /// Skip beliefs containing an already failed belief (same phase).
    pub dominance: bool,
    /// Split the first level across threads; any witness may be returned.
    pub any_witness: bool,
    pub belief_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: None,
            budget: DEFAULT_SEARCH_BUDGET,
            dominance: false,
            any_witness: false,
            belief_cap: DEFAULT_BELIEF_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Vec<usize>),
    /// Every reachable belief was explored; no strategy exists.
    Exhausted,
    /// Nothing found, but some branches were cut by the depth limit.
    DepthLimited,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub states: usize,
}

type Key = (FixedBitSet, usize);

trait Visited {
    /// Records `key` as entered with `remaining` moves to spare; false if it
    /// was already entered with at least as many.
    fn enter(&mut self, key: &Key, remaining: usize) -> bool;
    fn count(&self) -> usize;
}

impl Visited for HashMap<Key, usize> {
    fn enter(&mut self, key: &Key, remaining: usize) -> bool {
        match self.get_mut(key) {
            Some(r) if *r >= remaining => false,
            Some(r) => {
                *r = remaining;
                true
            }
            None => {
                self.insert(key.clone(), remaining);
                true
            }
        }
    }

    fn count(&self) -> usize {
        self.len()
    }
}

impl Visited for &DashMap<Key, usize> {
    fn enter(&mut self, key: &Key, remaining: usize) -> bool {
        match self.entry(key.clone()) {
            dashmap::Entry::Occupied(mut o) if *o.get() < remaining => {
                o.insert(remaining);
                true
            }
            dashmap::Entry::Occupied(_) => false,
            dashmap::Entry::Vacant(v) => {
                v.insert(remaining);
                true
            }
        }
    }

    fn count(&self) -> usize {
        self.len()
    }
}

struct Frame {
    belief: FixedBitSet,
    size: usize,
    phase: usize,
    elim: Vec<usize>,
    elim_mask: FixedBitSet,
    elim_pos: usize,
    next_other: usize,
    /// Move taken to reach this frame from its parent.
    via: usize,
}

struct Dfs<'a, V> {
    ctx: &'a WreathContext,
    visited: V,
    limit: usize,
    budget: usize,
    dominance: bool,
    failed: Vec<Key>,
    cut: bool,
    orbit_bound: Option<usize>,
}

impl<'a, V: Visited> Dfs<'a, V> {
    fn frame(&self, belief: FixedBitSet, phase: usize, via: usize) -> Frame {
        let ctx = self.ctx;
        let mut elim_mask = FixedBitSet::with_capacity(ctx.k_size());
        let mut elim = Vec::new();
        for s in belief.ones() {
            for &w in ctx.win_set() {
                let k = ctx.left_div(s, w);
                if !elim_mask.put(k) {
                    elim.push(k);
                }
            }
        }
        let size = belief.count_ones(..);
        Frame { belief, size, phase, elim, elim_mask, elim_pos: 0, next_other: 0, via }
    }

    fn lower_bound(&self, size: usize) -> usize {
        size.div_ceil(self.ctx.win_set().len())
    }

    fn advance(&self, f: &Frame, k: usize) -> FixedBitSet {
        let b = BeliefState::with_step(f.belief.clone(), f.phase);
        belief_step(self.ctx, &b, k).into_bits()
    }

    fn dominated(&self, key: &Key) -> bool {
        self.failed.iter().any(|(f, p)| *p == key.1 && f.is_subset(&key.0))
    }

    /// Runs from `root`; returns the moves to the empty belief if found.
    fn run(&mut self, root: FixedBitSet, phase: usize, depth0: usize) -> Result<Option<Vec<usize>>> {
        let r = self.ctx.spin_period();
        if root.is_clear() {
            return Ok(Some(Vec::new()));
        }
        let remaining = self.limit.saturating_sub(depth0);
        if self.limit != usize::MAX && depth0 + self.lower_bound(root.count_ones(..)) > self.limit {
            self.cut = true;
            return Ok(None);
        }
        if !self.visited.enter(&(root.clone(), phase), remaining) {
            return Ok(None);
        }
        let mut stack = vec![self.frame(root, phase, usize::MAX)];
        while !stack.is_empty() {
            let depth = depth0 + stack.len() - 1;
            let top = stack.last_mut().unwrap();
            let k = if top.elim_pos < top.elim.len() {
                top.elim_pos += 1;
                Some(top.elim[top.elim_pos - 1])
            } else {
                while top.next_other < self.ctx.k_size() && top.elim_mask.contains(top.next_other) {
                    top.next_other += 1;
                }
                if top.next_other < self.ctx.k_size() {
                    top.next_other += 1;
                    Some(top.next_other - 1)
                } else {
                    None
                }
            };
            let Some(k) = k else {
                let done = stack.pop().unwrap();
                if self.dominance && self.limit == usize::MAX {
                    self.failed.push((done.belief, done.phase));
                }
                continue;
            };
            let top = stack.last().unwrap();
            let is_elim = top.elim_mask.contains(k);
            if self.limit != usize::MAX {
                if depth + 1 > self.limit {
                    self.cut = true;
                    continue;
                }
                if !is_elim && depth + 1 + self.lower_bound(top.size) > self.limit {
                    self.cut = true;
                    continue;
                }
            }
            let child = self.advance(top, k);
            let child_phase = (top.phase + 1) % r;
            if child.is_clear() {
                let mut path: Vec<usize> = stack.iter().skip(1).map(|f| f.via).collect();
                path.push(k);
                return Ok(Some(path));
            }
            let size = child.count_ones(..);
            if self.limit != usize::MAX && depth + 1 + self.lower_bound(size) > self.limit {
                self.cut = true;
                continue;
            }
            let key = (child, child_phase);
            if self.dominance && self.dominated(&key) {
                continue;
            }
            let rem = if self.limit == usize::MAX { usize::MAX } else { self.limit - depth - 1 };
            if !self.visited.enter(&key, rem) {
                continue;
            }
            let n = self.visited.count();
            if let Some(bound) = self.orbit_bound {
                assert!(n <= bound, "visited more beliefs than there are H-closed subsets");
            }
            if n > self.budget {
                return Err(Error::SearchBudgetExceeded { states: n });
            }
            let f = self.frame(key.0, child_phase, k);
            stack.push(f);
        }
        Ok(None)
    }
}

fn orbit_bound(ctx: &WreathContext) -> Option<usize> {
    if ctx.spin_period() != 1 {
        return None;
    }
    let orbits = ctx.base_orbit_count();
    (orbits < usize::BITS as usize - 1).then(|| (1usize << orbits) + 1)
}

fn new_dfs<V: Visited>(ctx: &WreathContext, visited: V, limit: usize, budget: usize, dominance: bool) -> Dfs<'_, V> {
    Dfs { ctx, visited, limit, budget, dominance, failed: Vec::new(), cut: false, orbit_bound: orbit_bound(ctx) }
}

/// Searches for a strategy. A first pass looks only for strategies of the
/// minimal possible length; the second explores up to `max_depth`.
pub fn search(ctx: &WreathContext, cfg: &SearchConfig) -> Result<SearchReport> {
    if ctx.k_size() > cfg.belief_cap {
        return Err(Error::BeliefCapExceeded { k_size: ctx.k_size(), cap: cfg.belief_cap });
    }
    let root = BeliefState::initial(ctx).into_bits();
    let bound = minimal_length_bound(ctx);
    let mut states = 0;
    if cfg.max_depth.is_none_or(|d| d >= bound) {
        let mut dfs = new_dfs(ctx, HashMap::new(), bound, cfg.budget / 4, false);
        match dfs.run(root.clone(), 0, 0) {
            Ok(Some(path)) => {
                return Ok(SearchReport { outcome: SearchOutcome::Found(path), states: dfs.visited.count() });
            }
            Ok(None) => states += dfs.visited.count(),
            Err(Error::SearchBudgetExceeded { states: n }) => states += n,
            Err(e) => return Err(e),
        }
    }
    let limit = cfg.max_depth.unwrap_or(usize::MAX);
    if cfg.any_witness {
        if let Some(path) = parallel_witness(ctx, &root, limit, cfg.budget) {
            return Ok(SearchReport { outcome: SearchOutcome::Found(path), states });
        }
    }
    let mut dfs = new_dfs(ctx, HashMap::new(), limit, cfg.budget, cfg.dominance);
    let outcome = match dfs.run(root, 0, 0) {
        Ok(Some(path)) => SearchOutcome::Found(path),
        Ok(None) if dfs.cut => SearchOutcome::DepthLimited,
        Ok(None) => SearchOutcome::Exhausted,
        Err(Error::SearchBudgetExceeded { .. }) => SearchOutcome::BudgetExceeded,
        Err(e) => return Err(e),
    };
    Ok(SearchReport { outcome, states: states + dfs.visited.count() })
}

/// Explores the root's children concurrently over a shared visited set.
/// A miss here proves nothing, since workers may skip each other's nodes.
fn parallel_witness(ctx: &WreathContext, root: &FixedBitSet, limit: usize, budget: usize) -> Option<Vec<usize>> {
    let shared: DashMap<Key, usize> = DashMap::new();
    let r = ctx.spin_period();
    (0..ctx.k_size()).into_par_iter().find_map_any(|k| {
        let b = BeliefState::with_step(root.clone(), 0);
        let child = belief_step(ctx, &b, k).into_bits();
        let mut dfs = new_dfs(ctx, &shared, limit, budget, false);
        dfs.orbit_bound = None;
        match dfs.run(child, 1 % r, 1) {
            Ok(Some(mut path)) => {
                path.insert(0, k);
                Some(path)
            }
            _ => None,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::GroupAction;
    use crate::group::FiniteGroup;
    use crate::strategy::{verify, Strategy};

    fn ctx(g: usize, n: usize) -> WreathContext {
        WreathContext::new(FiniteGroup::cyclic(g).unwrap(), GroupAction::rotation(n).unwrap()).unwrap()
    }

    fn found(ctx: &WreathContext, cfg: &SearchConfig) -> Vec<usize> {
        match search(ctx, cfg).unwrap().outcome {
            SearchOutcome::Found(p) => p,
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn two_switches_minimal() {
        let c = ctx(2, 2);
        let p = found(&c, &SearchConfig::default());
        assert_eq!(p.len(), 3);
        assert!(verify(&c, &Strategy::new(&c, p).unwrap()).unwrap().valid);
    }

    #[test]
    fn winkler_minimal() {
        let c = ctx(2, 4);
        let p = found(&c, &SearchConfig::default());
        assert_eq!(p.len(), 15);
        assert!(verify(&c, &Strategy::new(&c, p).unwrap()).unwrap().valid);
    }

    #[test]
    fn three_switches_exhausted() {
        let c = ctx(2, 3);
        let r = search(&c, &SearchConfig::default()).unwrap();
        assert_eq!(r.outcome, SearchOutcome::Exhausted);
        assert!(r.states <= 1 << 8);
        let d = search(&c, &SearchConfig { dominance: true, ..Default::default() }).unwrap();
        assert_eq!(d.outcome, SearchOutcome::Exhausted);
    }

    #[test]
    fn depth_limit_reported() {
        let c = ctx(2, 3);
        let r = search(&c, &SearchConfig { max_depth: Some(4), ..Default::default() }).unwrap();
        assert_eq!(r.outcome, SearchOutcome::DepthLimited);
    }

    #[test]
    fn budget() {
        let c = ctx(2, 3);
        let r = search(&c, &SearchConfig { budget: 1, ..Default::default() }).unwrap();
        assert_eq!(r.outcome, SearchOutcome::BudgetExceeded);
    }

    #[test]
    fn parallel_witness_verifies() {
        let c = ctx(2, 4);
        let root = BeliefState::initial(&c).into_bits();
        let p = parallel_witness(&c, &root, usize::MAX, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(verify(&c, &Strategy::new(&c, p).unwrap()).unwrap().valid);
    }

    #[test]
    fn restricted_spinning_solves_three_switches() {
        let c = ctx(2, 3).with_spin_period(9).unwrap();
        let p = found(&c, &SearchConfig::default());
        assert!(verify(&c, &Strategy::new(&c, p).unwrap()).unwrap().valid);
    }
}
