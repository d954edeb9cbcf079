//! Strategy constructors. Every constructor re-verifies what it returns.

use crate::action::GroupAction;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Homomorphism, PGroupStatus, Subgroup};
use crate::search::{search, SearchConfig, SearchOutcome};
use crate::strategy::{interleave, verify, Strategy};
use crate::wreath::WreathContext;
use std::collections::VecDeque;

pub const DEFAULT_HAMILTONIAN_BUDGET: usize = 1_000_000;

fn verified(ctx: &WreathContext, s: Strategy, err: Error) -> Result<Strategy> {
    if verify(ctx, &s)?.valid {
        Ok(s)
    } else {
        Err(err)
    }
}

fn require_valid(ctx: &WreathContext, s: &Strategy, what: &str) -> Result<()> {
    let report = verify(ctx, s).map_err(|e| Error::InputStrategyInvalid(format!("{what}: {e}")))?;
    if !report.valid {
        return Err(Error::InputStrategyInvalid(format!("{what} is not surjective")));
    }
    Ok(())
}

/// `G wr 1` with a single switch.
pub fn trivial_context(g: &FiniteGroup) -> Result<WreathContext> {
    WreathContext::new(g.clone(), GroupAction::trivial())
}

/// Visits the non-identity elements in the order `perm`: the moves are
/// `k_1` and then `k_{i-1}^-1 k_i`.
pub fn construct_trivial(g: &FiniteGroup, perm: &[usize]) -> Result<(WreathContext, Strategy)> {
    g.require_group()?;
    let mut seen = vec![false; g.order()];
    seen[0] = true;
    for &x in perm {
        if x >= g.order() || seen[x] {
            return Err(Error::NotAPermutation);
        }
        seen[x] = true;
    }
    if perm.len() + 1 != g.order() {
        return Err(Error::NotAPermutation);
    }
    let ctx = trivial_context(g)?;
    let mut prev = 0;
    let moves = perm
        .iter()
        .map(|&x| {
            let k = g.mul(g.inv(prev), x);
            prev = x;
            k
        })
        .collect();
    let s = verified(&ctx, Strategy::new(&ctx, moves)?, Error::BaseCaseVerificationFailed)?;
    Ok((ctx, s))
}

/// A walk on the right Cayley graph whose prefix products cover the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringWalk {
    pub gens: Vec<usize>,
    /// Indices into `gens`.
    pub steps: Vec<usize>,
    /// Prefix products, starting with the identity.
    pub elements: Vec<usize>,
}

impl CoveringWalk {
    pub fn moves(&self) -> Vec<usize> {
        self.steps.iter().map(|&i| self.gens[i]).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn from_steps(g: &FiniteGroup, gens: &[usize], steps: Vec<usize>) -> Self {
        let mut elements = vec![0];
        for &i in &steps {
            elements.push(g.mul(*elements.last().unwrap(), gens[i]));
        }
        CoveringWalk { gens: gens.to_vec(), steps, elements }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkMode {
    Greedy,
    /// Try for a Hamiltonian path within the node budget, else fall back.
    Hamiltonian { budget: usize },
}

fn check_gens(g: &FiniteGroup, gens: &[usize]) -> Result<()> {
    g.require_group()?;
    if gens.iter().any(|&t| t >= g.order()) || g.subgroup_generated(gens)?.order() != g.order() {
        return Err(Error::DoesNotGenerate);
    }
    Ok(())
}

pub fn covering_walk(g: &FiniteGroup, gens: &[usize], mode: WalkMode) -> Result<CoveringWalk> {
    check_gens(g, gens)?;
    if let WalkMode::Hamiltonian { budget } = mode {
        match hamiltonian_walk(g, gens, budget) {
            Ok(Some(w)) => return Ok(w),
            Ok(None) | Err(Error::HamiltonianBudgetExceeded(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(greedy_walk(g, gens))
}

/// Exhaustive search for a walk of length `|G| - 1`. `Ok(None)` means none exists.
pub fn hamiltonian_walk(g: &FiniteGroup, gens: &[usize], budget: usize) -> Result<Option<CoveringWalk>> {
    check_gens(g, gens)?;
    let n = g.order();
    let mut on_path = vec![false; n];
    on_path[0] = true;
    let mut path = vec![0usize];
    let mut next_gen = vec![0usize];
    let mut steps = Vec::new();
    let mut nodes = 0usize;
    while let Some(&cur) = path.last() {
        if path.len() == n {
            return Ok(Some(CoveringWalk::from_steps(g, gens, steps)));
        }
        let i = *next_gen.last().unwrap();
        if i == gens.len() {
            on_path[cur] = false;
            path.pop();
            next_gen.pop();
            steps.pop();
            continue;
        }
        *next_gen.last_mut().unwrap() += 1;
        let nxt = g.mul(cur, gens[i]);
        if on_path[nxt] {
            continue;
        }
        nodes += 1;
        if nodes > budget {
            return Err(Error::HamiltonianBudgetExceeded(budget));
        }
        on_path[nxt] = true;
        path.push(nxt);
        next_gen.push(0);
        steps.push(i);
    }
    Ok(None)
}

/// Repeatedly walks a shortest path to the nearest uncovered element.
fn greedy_walk(g: &FiniteGroup, gens: &[usize]) -> CoveringWalk {
    let n = g.order();
    let mut covered = vec![false; n];
    covered[0] = true;
    let mut left = n - 1;
    let mut cur = 0;
    let mut steps = Vec::new();
    while left > 0 {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[cur] = true;
        let mut queue = VecDeque::from([cur]);
        let mut target = None;
        while let Some(x) = queue.pop_front() {
            if !covered[x] {
                target = Some(x);
                break;
            }
            for (i, &t) in gens.iter().enumerate() {
                let y = g.mul(x, t);
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, i));
                    queue.push_back(y);
                }
            }
        }
        let target = target.expect("generators reach every element");
        let mut seg = Vec::new();
        let mut x = target;
        while let Some((p, i)) = prev[x] {
            seg.push(i);
            x = p;
        }
        seg.reverse();
        for i in seg {
            cur = g.mul(cur, gens[i]);
            if !covered[cur] {
                covered[cur] = true;
                left -= 1;
            }
            steps.push(i);
        }
    }
    CoveringWalk::from_steps(g, gens, steps)
}

/// `G wr C2` on two interchangeable switches.
pub fn two_switch_context(g: &FiniteGroup) -> Result<WreathContext> {
    WreathContext::new(g.clone(), GroupAction::rotation(2)?)
}

/// The two-switch sequence for an involution-generated `G`: doubled moves
/// `(t, t)` walk both switches without changing the difference
/// `g_1 g_2^-1`, and single-sided separators `(t, id)` step the difference.
/// Returns `interleave(doubled, single)` without verifying it. Uses a
/// smallest involution generating set unless `gens` is given.
pub fn involution_pair_sequence(g: &FiniteGroup, gens: Option<&[usize]>) -> Result<(WreathContext, Strategy)> {
    g.require_group()?;
    let gens = match gens {
        Some(gs) => {
            if gs.iter().any(|&t| t == 0 || t >= g.order() || g.mul(t, t) != 0) {
                return Err(Error::NotInvolutionGenerated);
            }
            gs.to_vec()
        }
        None if g.order() == 1 => Vec::new(),
        None => g.involution_generators()?.ok_or(Error::NotInvolutionGenerated)?,
    };
    let ctx = two_switch_context(g)?;
    let walk = if g.order() == 1 {
        CoveringWalk { gens: Vec::new(), steps: Vec::new(), elements: vec![0] }
    } else {
        covering_walk(g, &gens, WalkMode::Hamiltonian { budget: DEFAULT_HAMILTONIAN_BUDGET })?
    };
    let doubled = walk.moves().iter().map(|&t| ctx.encode(&[t, t])).collect::<Result<Vec<_>>>()?;
    let single = walk.moves().iter().map(|&t| ctx.encode(&[t, 0])).collect::<Result<Vec<_>>>()?;
    let s = interleave(&Strategy::new(&ctx, doubled)?, &Strategy::new(&ctx, single)?)?;
    Ok((ctx, s))
}

/// [`involution_pair_sequence`], accepted only if it verifies.
///
/// The sequence is surjective for `Z2` and for elementary abelian 2-groups,
/// but not for `S3`: there `S3 wr C2` has no surjective strategy at all.
pub fn construct_involution_pair(g: &FiniteGroup, gens: Option<&[usize]>) -> Result<(WreathContext, Strategy)> {
    let (ctx, s) = involution_pair_sequence(g, gens)?;
    let report = verify(&ctx, &s)?;
    if !report.valid {
        return Err(Error::ConstructionFailedVerification(format!(
            "{} of {} states can evade the two-switch sequence for {}",
            report.residual.len(),
            ctx.k_size(),
            g.name()
        )));
    }
    Ok((ctx, s))
}

/// Contexts `N wr H` and `(G/N) wr H` sharing `ctx`'s action, in the form
/// `construct_by_decomposition` expects.
pub fn decomposition_contexts(ctx: &WreathContext, n: &Subgroup) -> Result<(WreathContext, WreathContext)> {
    let g = ctx.switch_group();
    let (q, _, _) = g.quotient(n)?;
    let sub = g.subgroup_group(n, format!("{}<{}>", g.name(), n.order()));
    Ok((
        WreathContext::new(sub, ctx.action().clone())?,
        WreathContext::new(q, ctx.action().clone())?,
    ))
}

/// `S_N * r(S_Q)`: the subgroup strategy embedded coordinatewise, interleaved
/// with the quotient strategy lifted through the smallest coset members.
pub fn construct_by_decomposition(
    ctx: &WreathContext,
    n: &Subgroup,
    ctx_n: &WreathContext,
    s_n: &Strategy,
    ctx_q: &WreathContext,
    s_q: &Strategy,
) -> Result<Strategy> {
    let g = ctx.switch_group();
    let (q, reps, _) = g.quotient(n)?;
    let sub = g.subgroup_group(n, "N");
    if ctx_n.switch_group() != &sub || ctx_q.switch_group() != &q {
        return Err(Error::Precondition("sub-contexts do not match the subgroup and quotient".into()));
    }
    if ctx_n.action().rows() != ctx.action().rows() || ctx_q.action().rows() != ctx.action().rows() {
        return Err(Error::Precondition("sub-contexts use a different action".into()));
    }
    require_valid(ctx_n, s_n, "subgroup strategy")?;
    require_valid(ctx_q, s_q, "quotient strategy")?;
    let embed = |k: usize| ctx.encode_with(|w| n.members()[ctx_n.coord(k, w)]);
    let lift = |k: usize| ctx.encode_with(|w| reps[ctx_q.coord(k, w)]);
    let a = Strategy::new(ctx, s_n.moves().iter().map(|&k| embed(k)).collect())?;
    let b = Strategy::new(ctx, s_q.moves().iter().map(|&k| lift(k)).collect())?;
    verified(ctx, interleave(&a, &b)?, Error::LiftedStrategyFailedVerification)
}

/// Recursive construction for `G` and `H` p-groups for the same prime.
pub fn construct_pgroup(ctx: &WreathContext) -> Result<Strategy> {
    let g = ctx.switch_group();
    g.require_group()?;
    let gs = g.p_group_status();
    if gs == PGroupStatus::NotPGroup || !gs.compatible(ctx.spin_group().p_group_status()) {
        return Err(Error::NotSamePrime);
    }
    match gs {
        PGroupStatus::Trivial => Ok(Strategy::empty(ctx)),
        PGroupStatus::Prime(p) if g.order() as u64 == p => prime_base_case(ctx, p as usize),
        _ => {
            let n = g.composition_series_p()?.swap_remove(1);
            let (ctx_n, ctx_q) = decomposition_contexts(ctx, &n)?;
            let s_n = construct_pgroup(&ctx_n)?;
            let s_q = construct_pgroup(&ctx_q)?;
            construct_by_decomposition(ctx, &n, &ctx_n, &s_n, &ctx_q, &s_q)
        }
    }
}

/// `Z_p wr H`: identify `K` with `F_p^m` and take the flag
/// `0 = V_0 < V_1 < ... = K` where `V_{i+1}` is the preimage of the fixed
/// vectors of `K/V_i`. With `L_i` a basis of `V_{i+1}` modulo `V_i`, the
/// strategy is `walk(L_0) * (walk(L_1) * ...)`, where `walk(b_1..b_r)` is
/// `(b_1)^(p-1) * walk(b_2..b_r)`.
fn prime_base_case(ctx: &WreathContext, p: usize) -> Result<Strategy> {
    let g = ctx.switch_group();
    // element g^j <-> j for the generator g = 1
    let mut power = vec![0usize; p];
    for j in 1..p {
        power[j] = g.mul(power[j - 1], 1);
    }
    let layers = fixed_flag(ctx.action(), p);
    let to_move = |v: &[usize]| ctx.encode_with(|w| power[v[w]]);
    let walk = |basis: &[Vec<usize>]| -> Result<Strategy> {
        let mut s = Strategy::empty(ctx);
        for b in basis.iter().rev() {
            let block = Strategy::new(ctx, vec![to_move(b); p - 1])?;
            s = interleave(&block, &s)?;
        }
        Ok(s)
    };
    let mut s = Strategy::empty(ctx);
    for layer in layers.iter().rev() {
        s = interleave(&walk(layer)?, &s)?;
    }
    verified(ctx, s, Error::BaseCaseVerificationFailed)
}

/// Bases `L_0, L_1, ...` of the successive layers of the fixed-point flag.
pub(crate) fn fixed_flag(action: &GroupAction, p: usize) -> Vec<Vec<Vec<usize>>> {
    let m = action.omega_size();
    let h_size = action.group().order();
    let mut echelon = Echelon::new(m, p);
    let mut layers = Vec::new();
    while echelon.rank() < m {
        // rows of the map v -> (reduce(P_h v - v))_h, one column per basis vector
        let cols: Vec<Vec<usize>> = (0..m)
            .map(|j| {
                let mut col = Vec::with_capacity(m * h_size);
                for h in 0..h_size {
                    let mut d = vec![0; m];
                    d[action.image(h, j)] = 1;
                    d[j] = (d[j] + p - 1) % p;
                    col.extend(echelon.reduce(d));
                }
                col
            })
            .collect();
        let mut layer = Vec::new();
        for v in kernel(&cols, m, p) {
            let r = echelon.reduce(v.clone());
            if r.iter().any(|&x| x != 0) {
                echelon.insert(r.clone());
                layer.push(r);
            }
        }
        assert!(!layer.is_empty(), "a p-group fixes a nonzero vector of every nonzero F_p-module");
        layers.push(layer);
    }
    layers
}

fn inv_mod(a: usize, p: usize) -> usize {
    (1..p).find(|&x| a * x % p == 1).expect("p is prime")
}

/// Row-reduced basis used to reduce vectors modulo a subspace.
struct Echelon {
    p: usize,
    rows: Vec<(usize, Vec<usize>)>,
    m: usize,
}

impl Echelon {
    fn new(m: usize, p: usize) -> Self {
        Echelon { p, rows: Vec::new(), m }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: Vec<usize>) -> Vec<usize> {
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for i in 0..self.m {
                    v[i] = (v[i] + (self.p - c) * row[i]) % self.p;
                }
            }
        }
        v
    }

    /// Inserts a reduced nonzero vector.
    fn insert(&mut self, v: Vec<usize>) {
        let pivot = v.iter().position(|&x| x != 0).unwrap();
        let s = inv_mod(v[pivot], self.p);
        let v: Vec<usize> = v.iter().map(|&x| x * s % self.p).collect();
        for (_, row) in &mut self.rows {
            let c = row[pivot];
            if c != 0 {
                for i in 0..self.m {
                    row[i] = (row[i] + (self.p - c) * v[i]) % self.p;
                }
            }
        }
        self.rows.push((pivot, v));
    }
}

/// Kernel basis over F_p of the matrix with the given columns.
fn kernel(cols: &[Vec<usize>], m: usize, p: usize) -> Vec<Vec<usize>> {
    let rows = cols.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<usize>> = (0..rows).map(|r| (0..m).map(|c| cols[c][r]).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let s = inv_mod(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = *x * s % p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..m {
                    a[i][j] = (a[i][j] + (p - f) * a[r][j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..m)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; m];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[i][free]) % p;
            }
            v
        })
        .collect()
}

/// Applies a surjection `G' -> G` coordinatewise to a strategy for `G' wr H`.
pub fn transport_strategy(
    phi: &Homomorphism,
    src: &WreathContext,
    s: &Strategy,
    dst: &WreathContext,
) -> Result<Strategy> {
    if !phi.is_surjective() {
        return Err(Error::NotSurjective);
    }
    if phi.source() != src.switch_group() || phi.target() != dst.switch_group() {
        return Err(Error::Precondition("homomorphism does not match the contexts".into()));
    }
    if src.action().rows() != dst.action().rows() {
        return Err(Error::Precondition("contexts use different actions".into()));
    }
    require_valid(src, s, "source strategy")?;
    let moves = s.moves().iter().map(|&k| dst.encode_with(|w| phi.apply(src.coord(k, w)))).collect();
    verified(dst, Strategy::new(dst, moves)?, Error::LiftedStrategyFailedVerification)
}

/// Belief-graph search for a strategy of length at most `max_depth`.
pub fn synthesize_by_search(ctx: &WreathContext, max_depth: Option<usize>, budget: usize) -> Result<Strategy> {
    let cfg = SearchConfig { max_depth, budget, ..Default::default() };
    let report = search(ctx, &cfg)?;
    match report.outcome {
        SearchOutcome::Found(path) => verified(ctx, Strategy::new(ctx, path)?, Error::BaseCaseVerificationFailed),
        SearchOutcome::Exhausted => Err(Error::NoStrategyWithinDepth { max_depth: max_depth.unwrap_or(usize::MAX), exhausted: true }),
        SearchOutcome::DepthLimited => Err(Error::NoStrategyWithinDepth { max_depth: max_depth.unwrap_or(usize::MAX), exhausted: false }),
        SearchOutcome::BudgetExceeded => Err(Error::SearchBudgetExceeded { states: report.states }),
    }
}
