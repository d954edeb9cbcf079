//! Deciding existence of surjective strategies.
//!
//! A `Yes` comes with a verified strategy found by belief search. A `No`
//! comes with a [`Certificate`]: a tree of reductions (switch quotients,
//! spin subgroups, orbit restrictions) ending in leaves that are either the
//! abelian classification or an exhausted belief graph.

use crate::action::GroupAction;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Homomorphism, PGroupStatus, Subgroup, DEFAULT_SUBGROUP_BOUND};
use crate::search::{search, SearchConfig, SearchOutcome};
use crate::strategy::{verify, Strategy};
use crate::wreath::{ContextId, WreathContext};
use serde::Serialize;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

/// Largest base size for which certificate discovery runs belief search.
pub const EXHAUSTIVE_LEAF_LIMIT: usize = 1 << 12;
pub const DEFAULT_CERTIFICATE_BUDGET: usize = 10_000;
/// Per-leaf belief-state budget inside certificate discovery.
const LEAF_SEARCH_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub win_set: Option<Vec<usize>>,
    pub spin_period: Option<usize>,
    /// Treat the switch table as a loop; verdicts are then conjectural.
    pub loop_mode: bool,
    /// Look for a reduction certificate before searching. Only used for the
    /// plain game on groups.
    pub use_certificates: bool,
    pub certificate_budget: usize,
    pub search: SearchConfig,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            win_set: None,
            spin_period: None,
            loop_mode: false,
            use_certificates: true,
            certificate_budget: DEFAULT_CERTIFICATE_BUDGET,
            search: SearchConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    pub states: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Yes(Strategy),
    No(Certificate),
    Unknown(ResourceReport),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::No(_) => "no",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecisionResult {
    pub verdict: Verdict,
    /// Belief states visited by search (0 if a certificate settled it).
    pub states: usize,
    /// Set for loop switches, where belief reachability is not known to be
    /// equivalent to the game.
    pub conjectural: bool,
    /// The context actually decided, with the options applied.
    pub context: WreathContext,
}

/// A nonexistence proof for `switches wr action`.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub switches: FiniteGroup,
    pub action: GroupAction,
    pub step: Step,
}

#[derive(Clone, Debug)]
pub enum Step {
    /// `phi: switches -> child.switches` is onto; same action.
    SwitchQuotient { phi: Homomorphism, child: Box<Certificate> },
    /// `embedding: child H -> H`, and the child action is the restriction.
    SpinSubgroup { embedding: Homomorphism, child: Box<Certificate> },
    /// The child is the permutation group induced by `subgroup` (members of
    /// H) on the orbit of `point`.
    OrbitRestriction { subgroup: Vec<usize>, point: usize, orbit: Vec<usize>, child: Box<Certificate> },
    /// Abelian switches where G and H are not p-groups for a common prime.
    AbelianClassification { switch_primes: Vec<u64>, spin_primes: Vec<u64> },
    ExhaustiveBeliefSearch { context: ContextId, states: usize, win_set: Vec<usize>, spin_period: usize, loop_mode: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateSummary {
    pub kind: &'static str,
    pub instance: String,
    pub args: String,
    pub children: Vec<CertificateSummary>,
}

fn instance_name(g: &FiniteGroup, a: &GroupAction) -> String {
    format!("{} wr {} on {}", g.name(), a.group().name(), a.omega_size())
}

fn prime_list(n: usize) -> Vec<u64> {
    crate::group::prime_factors(n as u64)
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self.step {
            Step::SwitchQuotient { .. } => "SwitchQuotient",
            Step::SpinSubgroup { .. } => "SpinSubgroup",
            Step::OrbitRestriction { .. } => "OrbitRestriction",
            Step::AbelianClassification { .. } => "AbelianClassification",
            Step::ExhaustiveBeliefSearch { .. } => "ExhaustiveBeliefSearch",
        }
    }

    pub fn instance(&self) -> String {
        instance_name(&self.switches, &self.action)
    }

    pub fn child(&self) -> Option<&Certificate> {
        match &self.step {
            Step::SwitchQuotient { child, .. }
            | Step::SpinSubgroup { child, .. }
            | Step::OrbitRestriction { child, .. } => Some(child),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.child().is_none()
    }

    /// Nodes from the root down to the leaf.
    pub fn chain(&self) -> Vec<&Certificate> {
        let mut out = vec![self];
        while let Some(c) = out.last().unwrap().child() {
            out.push(c);
        }
        out
    }

    pub fn leaf(&self) -> &Certificate {
        self.chain().pop().unwrap()
    }

    pub fn args(&self) -> String {
        match &self.step {
            Step::SwitchQuotient { phi, child } => format!(
                "{} -> {}, kernel order {}",
                self.switches.name(),
                child.switches.name(),
                phi.kernel().len()
            ),
            Step::SpinSubgroup { embedding, child } => {
                format!("{} -> {}, image {:?}", child.action.group().name(), self.action.group().name(), embedding.map())
            }
            Step::OrbitRestriction { subgroup, point, orbit, .. } => {
                format!("subgroup {subgroup:?}, point {point}, orbit {orbit:?}")
            }
            Step::AbelianClassification { switch_primes, spin_primes } => {
                format!("G primes {switch_primes:?}, H primes {spin_primes:?}")
            }
            Step::ExhaustiveBeliefSearch { context, states, win_set, spin_period, loop_mode } => {
                let mut s = format!("context {:016x}, {states} states", context.0);
                if win_set.as_slice() != [0] {
                    let _ = write!(s, ", win {win_set:?}");
                }
                if *spin_period != 1 {
                    let _ = write!(s, ", spin period {spin_period}");
                }
                if *loop_mode {
                    s.push_str(", loop");
                }
                s
            }
        }
    }

    /// One node per line, children indented two spaces.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (depth, node) in self.chain().into_iter().enumerate() {
            let leaf = if node.is_leaf() { "  [leaf]" } else { "" };
            let _ = writeln!(
                out,
                "{}{}({})  # {}{}",
                "  ".repeat(depth),
                node.kind(),
                node.args(),
                node.instance(),
                leaf
            );
        }
        out
    }

    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            kind: self.kind(),
            instance: self.instance(),
            args: self.args(),
            children: self.child().map(|c| vec![c.summary()]).unwrap_or_default(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidCertificate(msg.into())
}

/// Re-checks every hypothesis from scratch; shares no state with discovery.
pub fn validate_certificate(cert: &Certificate) -> Result<()> {
    let here = cert.instance();
    if !cert.action.is_faithful() {
        return Err(invalid(format!("{here}: action is not faithful")));
    }
    match &cert.step {
        Step::SwitchQuotient { phi, child } => {
            let phi = Homomorphism::new(phi.source().clone(), phi.target().clone(), phi.map().to_vec())
                .map_err(|e| invalid(format!("{here}: {e}")))?;
            if phi.source() != &cert.switches || phi.target() != &child.switches {
                return Err(invalid(format!("{here}: quotient map has the wrong source or target")));
            }
            if !phi.is_surjective() {
                return Err(invalid(format!("{here}: quotient map is not onto")));
            }
            if child.action != cert.action {
                return Err(invalid(format!("{here}: switch quotient changed the action")));
            }
            validate_certificate(child)
        }
        Step::SpinSubgroup { embedding, child } => {
            let e = Homomorphism::new(embedding.source().clone(), embedding.target().clone(), embedding.map().to_vec())
                .map_err(|e| invalid(format!("{here}: {e}")))?;
            if e.source() != child.action.group() || e.target() != cert.action.group() {
                return Err(invalid(format!("{here}: embedding has the wrong source or target")));
            }
            if e.kernel().len() != 1 {
                return Err(invalid(format!("{here}: embedding is not injective")));
            }
            if child.switches != cert.switches || child.action.omega_size() != cert.action.omega_size() {
                return Err(invalid(format!("{here}: spin subgroup changed the switches or positions")));
            }
            for h in child.action.group().elements() {
                if child.action.perm(h) != cert.action.perm(e.apply(h)) {
                    return Err(invalid(format!("{here}: child action is not the restriction at {h}")));
                }
            }
            validate_certificate(child)
        }
        Step::OrbitRestriction { subgroup, point, orbit, child } => {
            let sub = cert
                .action
                .group()
                .subgroup_from_members(subgroup)
                .map_err(|e| invalid(format!("{here}: {e}")))?;
            if *point >= cert.action.omega_size() {
                return Err(invalid(format!("{here}: point out of range")));
            }
            let expected: BTreeSet<usize> = sub.members().iter().map(|&h| cert.action.image(h, *point)).collect();
            if orbit.iter().copied().collect::<BTreeSet<_>>() != expected || orbit.len() != expected.len() {
                return Err(invalid(format!("{here}: orbit of {point} is {expected:?}")));
            }
            if child.switches != cert.switches || child.action.omega_size() != orbit.len() {
                return Err(invalid(format!("{here}: orbit restriction changed the switches or size")));
            }
            let induced: BTreeSet<Vec<usize>> = sub
                .members()
                .iter()
                .map(|&h| {
                    orbit
                        .iter()
                        .map(|&x| orbit.iter().position(|&y| y == cert.action.image(h, x)).expect("invariant orbit"))
                        .collect()
                })
                .collect();
            let child_perms: BTreeSet<Vec<usize>> = child.action.rows().iter().cloned().collect();
            if induced != child_perms || child_perms.len() != child.action.group().order() {
                return Err(invalid(format!("{here}: child action is not the induced permutation group")));
            }
            validate_certificate(child)
        }
        Step::AbelianClassification { switch_primes, spin_primes } => {
            let g = &cert.switches;
            let h = cert.action.group();
            if !g.is_associative() || !g.is_abelian() {
                return Err(invalid(format!("{here}: switches are not an abelian group")));
            }
            if g.order() == 1 || h.order() == 1 {
                return Err(invalid(format!("{here}: trivial factor")));
            }
            if g.p_group_status().compatible(h.p_group_status()) {
                return Err(invalid(format!("{here}: G and H are p-groups for a common prime")));
            }
            if *switch_primes != prime_list(g.order()) || *spin_primes != prime_list(h.order()) {
                return Err(invalid(format!("{here}: recorded primes do not match")));
            }
            Ok(())
        }
        Step::ExhaustiveBeliefSearch { context, win_set, spin_period, loop_mode, .. } => {
            let mut ctx = WreathContext::new(cert.switches.clone(), cert.action.clone())?
                .with_win_set(win_set.clone())?
                .with_spin_period(*spin_period)?;
            if *loop_mode {
                ctx = ctx.as_loop();
            }
            if ctx.id() != *context {
                return Err(invalid(format!("{here}: context id mismatch")));
            }
            let cfg = SearchConfig { budget: usize::MAX, belief_cap: usize::MAX, ..SearchConfig::default() };
            match search(&ctx, &cfg)?.outcome {
                SearchOutcome::Exhausted => Ok(()),
                o => Err(invalid(format!("{here}: re-run search gave {o:?}"))),
            }
        }
    }
}

/// Verdict of the abelian classification alone.
#[derive(Clone, Debug)]
pub enum AbelianVerdict {
    Yes,
    No(Certificate),
}

/// Abelian switches: solvable iff G and H are p-groups for one prime, where
/// a trivial G or H is always solvable.
pub fn classify_abelian(g: &FiniteGroup, action: &GroupAction) -> Result<AbelianVerdict> {
    g.require_group()?;
    if !g.is_abelian() {
        return Err(Error::NotAbelian);
    }
    if let Some(&h) = action.kernel().iter().find(|&&h| h != 0) {
        return Err(Error::NonFaithfulAction(h));
    }
    let h = action.group();
    if g.order() == 1 || h.order() == 1 || g.p_group_status().compatible(h.p_group_status()) {
        return Ok(AbelianVerdict::Yes);
    }
    Ok(AbelianVerdict::No(abelian_leaf(g, action)))
}

fn abelian_leaf(g: &FiniteGroup, action: &GroupAction) -> Certificate {
    Certificate {
        switches: g.clone(),
        action: action.clone(),
        step: Step::AbelianClassification {
            switch_primes: prime_list(g.order()),
            spin_primes: prime_list(action.group().order()),
        },
    }
}

fn is_prime(n: usize) -> bool {
    prime_list(n) == [n as u64]
}

/// Names a cyclic group `Z<n>`; anything else keeps its name.
fn nice_name(q: FiniteGroup) -> FiniteGroup {
    let n = q.order();
    if q.elements().any(|x| q.element_order(x) == n) {
        q.with_name(format!("Z{n}"))
    } else {
        q
    }
}

struct Finder {
    budget: usize,
    nodes: usize,
    failed: HashSet<u64>,
}

impl Finder {
    fn key(g: &FiniteGroup, a: &GroupAction) -> u64 {
        let mut h = DefaultHasher::new();
        g.hash(&mut h);
        a.rows().hash(&mut h);
        h.finish()
    }

    fn find(&mut self, g: &FiniteGroup, a: &GroupAction, exhaustive_here: bool) -> Result<Option<Certificate>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::CertificateBudgetExceeded(self.budget));
        }
        let key = Self::key(g, a);
        if self.failed.contains(&key) {
            return Ok(None);
        }
        let found = self.find_uncached(g, a, exhaustive_here)?;
        if found.is_none() {
            self.failed.insert(key);
        }
        Ok(found)
    }

    fn find_uncached(&mut self, g: &FiniteGroup, a: &GroupAction, exhaustive_here: bool) -> Result<Option<Certificate>> {
        let h = a.group();
        let (gs, hs) = (g.p_group_status(), h.p_group_status());
        // solvable: trivial wreaths and common-prime p-groups
        if g.order() == 1 || h.order() == 1 || gs.compatible(hs) {
            return Ok(None);
        }
        if g.is_abelian() && is_prime(g.order()) && matches!(hs, PGroupStatus::Prime(_)) {
            return Ok(Some(abelian_leaf(g, a)));
        }

        if let Ok(normals) = g.normal_subgroups() {
            let mut normals: Vec<Subgroup> =
                normals.into_iter().filter(|n| n.order() > 1 && n.order() < g.order()).collect();
            normals.sort_by_key(|n| std::cmp::Reverse(n.order()));
            for n in normals {
                let (q, _, phi) = g.quotient(&n)?;
                let q = nice_name(q);
                if let Some(child) = self.find(&q, a, true)? {
                    let phi = Homomorphism::new(g.clone(), q.clone(), phi.map().to_vec())?;
                    return Ok(Some(Certificate {
                        switches: g.clone(),
                        action: a.clone(),
                        step: Step::SwitchQuotient { phi, child: Box::new(child) },
                    }));
                }
            }
        }

        let mut subs: Vec<Subgroup> = h
            .all_subgroups(DEFAULT_SUBGROUP_BOUND)
            .unwrap_or_default()
            .into_iter()
            .filter(|s| s.order() > 1)
            .collect();
        subs.sort_by_key(|s| (!is_prime(s.order()), s.order()));

        let m = a.omega_size();
        for sub in &subs {
            let mut seen: HashSet<Vec<usize>> = HashSet::new();
            for w in 0..m {
                let orbit = a.orbit(sub, w);
                if orbit.len() == m || !seen.insert(orbit.clone()) {
                    continue;
                }
                let (child_action, orbit) = a.restrict_to_orbit(sub, w)?;
                if let Some(child) = self.find(g, &child_action, true)? {
                    return Ok(Some(Certificate {
                        switches: g.clone(),
                        action: a.clone(),
                        step: Step::OrbitRestriction {
                            subgroup: sub.members().to_vec(),
                            point: w,
                            orbit,
                            child: Box::new(child),
                        },
                    }));
                }
            }
        }

        for sub in subs.iter().filter(|s| s.order() < h.order()) {
            let child_action = a.restrict_to_subgroup(sub)?;
            if let Some(child) = self.find(g, &child_action, true)? {
                let embedding = Homomorphism::new(child_action.group().clone(), h.clone(), sub.members().to_vec())?;
                return Ok(Some(Certificate {
                    switches: g.clone(),
                    action: a.clone(),
                    step: Step::SpinSubgroup { embedding, child: Box::new(child) },
                }));
            }
        }

        if g.is_abelian() {
            return Ok(Some(abelian_leaf(g, a)));
        }

        if exhaustive_here {
            if let Ok(ctx) = WreathContext::new(g.clone(), a.clone()) {
                if ctx.k_size() <= EXHAUSTIVE_LEAF_LIMIT {
                    let cfg = SearchConfig { budget: LEAF_SEARCH_BUDGET, ..SearchConfig::default() };
                    let report = search(&ctx, &cfg)?;
                    if report.outcome == SearchOutcome::Exhausted {
                        return Ok(Some(exhaustive_leaf(&ctx, report.states)));
                    }
                }
            }
        }
        Ok(None)
    }
}

fn exhaustive_leaf(ctx: &WreathContext, states: usize) -> Certificate {
    Certificate {
        switches: ctx.switch_group().clone(),
        action: ctx.action().clone(),
        step: Step::ExhaustiveBeliefSearch {
            context: ctx.id(),
            states,
            win_set: ctx.win_set().to_vec(),
            spin_period: ctx.spin_period(),
            loop_mode: !ctx.switch_group().is_associative(),
        },
    }
}

fn discover(ctx: &WreathContext, budget: usize, exhaustive_root: bool) -> Result<Option<Certificate>> {
    ctx.switch_group().require_group()?;
    if !ctx.has_default_rules() {
        return Ok(None);
    }
    let mut finder = Finder { budget, nodes: 0, failed: HashSet::new() };
    finder.find(ctx.switch_group(), ctx.action(), exhaustive_root)
}

/// Searches the reductions for a validated nonexistence certificate. Only
/// the plain game (identity wins, spins every turn) is covered.
pub fn find_nonexistence_certificate(ctx: &WreathContext, budget: usize) -> Result<Option<Certificate>> {
    let cert = discover(ctx, budget, true)?;
    if let Some(c) = &cert {
        validate_certificate(c)?;
    }
    Ok(cert)
}

/// Applies the options to a copy of `ctx`.
pub fn apply_options(ctx: &WreathContext, opts: &DecideOptions) -> Result<WreathContext> {
    let mut c = ctx.clone();
    if let Some(w) = &opts.win_set {
        c = c.with_win_set(w.clone())?;
    }
    if let Some(r) = opts.spin_period {
        c = c.with_spin_period(r)?;
    }
    if opts.loop_mode {
        c = c.as_loop();
    }
    Ok(c)
}

pub fn decide_existence(ctx: &WreathContext, opts: &DecideOptions) -> Result<DecisionResult> {
    let c = apply_options(ctx, opts)?;
    let conjectural = !c.switch_group().is_associative();
    let done = |verdict, states, context| Ok(DecisionResult { verdict, states, conjectural, context });

    if opts.use_certificates && !conjectural && c.has_default_rules() {
        match discover(&c, opts.certificate_budget, false) {
            // a bare leaf at the root of a small instance is left to search,
            // which decides it by exhaustion anyway
            Ok(Some(cert)) if !(cert.is_leaf() && c.k_size() <= EXHAUSTIVE_LEAF_LIMIT) => {
                validate_certificate(&cert)?;
                return done(Verdict::No(cert), 0, c);
            }
            Ok(_) | Err(Error::CertificateBudgetExceeded(_)) => {}
            Err(e) => return Err(e),
        }
    }

    if c.k_size() > opts.search.belief_cap {
        let reason = format!("|K| = {} exceeds the belief cap {}", c.k_size(), opts.search.belief_cap);
        return done(Verdict::Unknown(ResourceReport { states: 0, reason }), 0, c);
    }
    let report = search(&c, &opts.search)?;
    let states = report.states;
    match report.outcome {
        SearchOutcome::Found(path) => {
            let s = Strategy::new(&c, path)?;
            assert!(verify(&c, &s)?.valid, "search returned a non-surjective strategy");
            done(Verdict::Yes(s), states, c)
        }
        SearchOutcome::Exhausted => {
            let cert = exhaustive_leaf(&c, states);
            done(Verdict::No(cert), states, c)
        }
        SearchOutcome::DepthLimited => {
            let reason = format!("no strategy within depth {}", opts.search.max_depth.unwrap_or(0));
            done(Verdict::Unknown(ResourceReport { states, reason }), states, c)
        }
        SearchOutcome::BudgetExceeded => {
            let reason = format!("belief budget {} exhausted", opts.search.budget);
            done(Verdict::Unknown(ResourceReport { states, reason }), states, c)
        }
    }
}

/// Smallest spin period `r <= bound` for which a strategy exists.
pub fn min_spin_period(ctx: &WreathContext, bound: usize, opts: &DecideOptions) -> Result<Option<usize>> {
    for r in 1..=bound {
        let o = DecideOptions { spin_period: Some(r), ..opts.clone() };
        match decide_existence(ctx, &o)?.verdict {
            Verdict::Yes(_) => return Ok(Some(r)),
            Verdict::No(_) => {}
            Verdict::Unknown(rep) => return Err(Error::SearchBudgetExceeded { states: rep.states }),
        }
    }
    Ok(None)
}
