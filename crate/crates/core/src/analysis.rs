//! Expected numbers of moves and strategy enumeration.

use crate::error::{Error, Result};
use crate::strategy::{belief_step, is_surjective, minimal_length_bound, BeliefState, Strategy};
use crate::wreath::WreathContext;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Worker count used when callers do not choose one; results depend on it.
pub const DEFAULT_WORKERS: usize = 8;
pub const DEFAULT_ENUMERATION_BUDGET: usize = 100_000_000;

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectationReport {
    pub absorbed_probability: BigRational,
    /// Expected moves given that the light comes on; `None` if it never does.
    pub conditional_expected_moves: Option<BigRational>,
    /// `stop_distribution[i]` is the probability of winning on move `i + 1`.
    pub stop_distribution: Vec<BigRational>,
    pub adversary: String,
}

fn check_distribution(d: &[BigRational], len: usize, what: &str) -> Result<()> {
    if d.len() != len {
        return Err(Error::InvalidDistribution(format!("{what} has {} entries, expected {len}", d.len())));
    }
    if d.iter().any(|p| p < &BigRational::zero()) {
        return Err(Error::InvalidDistribution(format!("{what} has a negative entry")));
    }
    if d.iter().sum::<BigRational>() != BigRational::one() {
        return Err(Error::InvalidDistribution(format!("{what} does not sum to 1")));
    }
    Ok(())
}

/// Pushes the hidden-state distribution through the strategy. `adversary`
/// weights the spins (default uniform on H); `initial` defaults to uniform
/// on the non-winning states.
pub fn exact_expected_moves(
    ctx: &WreathContext,
    s: &Strategy,
    adversary: Option<&[BigRational]>,
    initial: Option<&[BigRational]>,
) -> Result<ExpectationReport> {
    let k = ctx.k_size();
    let nh = ctx.h_size();
    let uniform_h = vec![ratio(1, nh); nh];
    let adv = match adversary {
        Some(a) => {
            check_distribution(a, nh, "adversary distribution")?;
            a
        }
        None => &uniform_h[..],
    };
    let mut mass = match initial {
        Some(d) => {
            check_distribution(d, k, "initial distribution")?;
            if ctx.win_set().iter().any(|&w| !d[w].is_zero()) {
                return Err(Error::InvalidDistribution("initial distribution charges a winning state".into()));
            }
            d.to_vec()
        }
        None => {
            let p = ratio(1, k - ctx.win_set().len());
            (0..k).map(|x| if ctx.is_win(x) { BigRational::zero() } else { p.clone() }).collect()
        }
    };
    let mut stops = Vec::with_capacity(s.len());
    for (i, &mv) in s.moves().iter().enumerate() {
        let spin = ctx.spins_after(i + 1);
        let mut next = vec![BigRational::zero(); k];
        let mut stopped = BigRational::zero();
        for (x, m) in mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let y = ctx.mul(x, mv);
            if ctx.is_win(y) {
                stopped += m;
            } else if spin {
                for (h, p) in adv.iter().enumerate() {
                    if !p.is_zero() {
                        next[ctx.act_on_base(h, y)] += m * p;
                    }
                }
            } else {
                next[y] += m;
            }
        }
        stops.push(stopped);
        mass = next;
    }
    let absorbed: BigRational = stops.iter().sum();
    let conditional = (!absorbed.is_zero()).then(|| {
        let total: BigRational = stops.iter().enumerate().map(|(i, p)| p * BigInt::from(i + 1)).sum();
        total / &absorbed
    });
    let adversary = match adversary {
        Some(_) => "custom i.i.d.".to_string(),
        None => "uniform i.i.d.".to_string(),
    };
    Ok(ExpectationReport { absorbed_probability: absorbed, conditional_expected_moves: conditional, stop_distribution: stops, adversary })
}

/// Closed form for moves drawn uniformly from `K \ {id}`: each move wins
/// with probability `|W| / (|K| - 1)`, so the wait is geometric.
pub fn random_play_expectation(ctx: &WreathContext) -> Result<BigRational> {
    if ctx.k_size() < 2 {
        return Err(Error::ContextTooSmall(ctx.k_size()));
    }
    let invariant = ctx.win_set().iter().all(|&w| (0..ctx.h_size()).all(|h| ctx.is_win(ctx.act_on_base(h, w))));
    if !invariant {
        return Err(Error::InvalidWinSet("random-play closed form needs an H-invariant winning set".into()));
    }
    Ok(ratio(ctx.k_size() - 1, ctx.win_set().len()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloReport {
    pub mean: f64,
    pub std_err: f64,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Splits `trials` over `workers` ChaCha streams of one seed and combines
/// the per-trial move counts. Reproducible for a fixed `(seed, workers)`.
fn simulate<F>(ctx: &WreathContext, trials: u64, seed: u64, workers: usize, play: F) -> MonteCarloReport
where
    F: Fn(&WreathContext, &mut ChaCha8Rng) -> u64 + Sync,
{
    let workers = workers.max(1);
    let (sum, sum_sq) = (0..workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(w as u64);
            let n = trials / workers as u64 + u64::from((w as u64) < trials % workers as u64);
            let mut acc = (0f64, 0f64);
            for _ in 0..n {
                let t = play(ctx, &mut rng) as f64;
                acc.0 += t;
                acc.1 += t * t;
            }
            acc
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 { (sum_sq - n * mean * mean) / (n - 1.0) } else { 0.0 };
    MonteCarloReport { mean, std_err: (var.max(0.0) / n).sqrt(), trials, seed, workers }
}

fn random_start(ctx: &WreathContext, rng: &mut ChaCha8Rng) -> usize {
    loop {
        let x = rng.gen_range(0..ctx.k_size());
        if !ctx.is_win(x) {
            return x;
        }
    }
}

/// Plays one game with moves from `choose`, returning the winning move number.
fn play_game(ctx: &WreathContext, rng: &mut ChaCha8Rng, mut choose: impl FnMut(&mut ChaCha8Rng, Option<usize>) -> usize) -> u64 {
    let mut x = random_start(ctx, rng);
    let mut last = None;
    let mut n = 0u64;
    loop {
        let k = choose(rng, last);
        n += 1;
        let y = ctx.mul(x, k);
        if ctx.is_win(y) {
            return n;
        }
        x = if ctx.spins_after(n as usize) { ctx.act_on_base(rng.gen_range(0..ctx.h_size()), y) } else { y };
        last = Some(k);
    }
}

/// Uniform random play over `K \ {id}` against uniform spins.
pub fn monte_carlo_random_play(ctx: &WreathContext, trials: u64, seed: u64, workers: usize) -> Result<MonteCarloReport> {
    if ctx.k_size() < 2 {
        return Err(Error::ContextTooSmall(ctx.k_size()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    Ok(simulate(ctx, trials, seed, workers, |ctx, rng| {
        play_game(ctx, rng, |rng, _| rng.gen_range(1..ctx.k_size()))
    }))
}

/// Constant vectors `(g, ..., g)` indexed by `g`.
fn constants(ctx: &WreathContext) -> Vec<usize> {
    let m = ctx.positions();
    ctx.switch_group().elements().map(|g| ctx.encode(&vec![g; m]).expect("valid coordinates")).collect()
}

/// Random play that never follows a constant move `c` by `c^-1`.
pub fn non_backtracking_expectation(ctx: &WreathContext, trials: u64, seed: u64, workers: usize) -> Result<MonteCarloReport> {
    if ctx.k_size() <= 2 {
        return Err(Error::ContextTooSmall(ctx.k_size()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let consts = constants(ctx);
    let mut forbid_after = vec![None; ctx.k_size()];
    for (g, &c) in consts.iter().enumerate().skip(1) {
        forbid_after[c] = Some(consts[ctx.switch_group().inv(g)]);
    }
    Ok(simulate(ctx, trials, seed, workers, |ctx, rng| {
        play_game(ctx, rng, |rng, last| {
            let banned = last.and_then(|l| forbid_after[l]);
            loop {
                let k = rng.gen_range(1..ctx.k_size());
                if Some(k) != banned {
                    return k;
                }
            }
        })
    }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumFilters {
    pub palindromic: bool,
    /// Only emit anything when the length is `|K| - |W|`.
    pub minimal_only: bool,
    /// Keep one representative per orbit of H acting on whole sequences.
    pub up_to_h: bool,
}

impl EnumFilters {
    fn admits(&self, ctx: &WreathContext, moves: &[usize]) -> bool {
        (!self.palindromic || moves.iter().eq(moves.iter().rev())) && (!self.up_to_h || is_h_canonical(ctx, moves))
    }
}

/// True when no global spin `h` maps the sequence to a lexicographically
/// smaller one.
pub fn is_h_canonical(ctx: &WreathContext, moves: &[usize]) -> bool {
    (1..ctx.h_size()).all(|h| {
        let image = moves.iter().map(|&k| ctx.act_on_base(h, k));
        image.cmp(moves.iter().copied()) != std::cmp::Ordering::Less
    })
}

/// Backtracking over moves with belief pruning: a prefix is abandoned once
/// its belief has more states than the remaining moves can eliminate.
/// `sink` sees every accepted strategy in lexicographic order.
pub fn enumerate_strategies_with(
    ctx: &WreathContext,
    len: usize,
    filters: EnumFilters,
    budget: usize,
    mut sink: impl FnMut(&[usize]),
) -> Result<usize> {
    if filters.minimal_only && len != minimal_length_bound(ctx) {
        return Ok(0);
    }
    let w = ctx.win_set().len();
    let mut moves = Vec::with_capacity(len);
    let mut beliefs = vec![BeliefState::initial(ctx)];
    let mut next_move = vec![0usize];
    let mut count = 0;
    let mut nodes = 0usize;
    while let Some(&cand) = next_move.last() {
        let depth = moves.len();
        if depth == len {
            if beliefs[depth].is_empty() && filters.admits(ctx, &moves) {
                count += 1;
                sink(&moves);
            }
            next_move.pop();
            beliefs.pop();
            moves.pop();
            continue;
        }
        // second half of a palindrome is forced
        let forced = (filters.palindromic && 2 * depth >= len).then(|| moves[len - 1 - depth]);
        let k = match forced {
            Some(f) if cand <= f => f,
            Some(_) => ctx.k_size(),
            None => cand,
        };
        if k >= ctx.k_size() {
            next_move.pop();
            if depth > 0 {
                beliefs.pop();
                moves.pop();
            }
            continue;
        }
        *next_move.last_mut().unwrap() = k + 1;
        nodes += 1;
        if nodes > budget {
            return Err(Error::SearchBudgetExceeded { states: nodes });
        }
        let b = belief_step(ctx, &beliefs[depth], k);
        if b.len() > (len - depth - 1) * w {
            continue;
        }
        moves.push(k);
        beliefs.push(b);
        next_move.push(0);
    }
    Ok(count)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub strategies: Vec<Strategy>,
    pub count: usize,
}

pub fn enumerate_strategies(ctx: &WreathContext, len: usize, filters: EnumFilters, budget: usize) -> Result<Enumeration> {
    let mut strategies = Vec::new();
    let count = enumerate_strategies_with(ctx, len, filters, budget, |m| {
        strategies.push(Strategy::new(ctx, m.to_vec()).expect("moves are in range"));
    })?;
    Ok(Enumeration { strategies, count })
}

/// Counts by trying all `|K|^len` sequences; for cross-checking the
/// backtracking enumerator on small cases.
pub fn count_exhaustive(ctx: &WreathContext, len: usize, filters: EnumFilters, budget: usize) -> Result<usize> {
    if filters.minimal_only && len != minimal_length_bound(ctx) {
        return Ok(0);
    }
    let total = (ctx.k_size() as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { needed: total, budget: budget as u128 });
    }
    let mut moves = vec![0usize; len];
    let mut count = 0;
    loop {
        if filters.admits(ctx, &moves) && is_surjective(ctx, &Strategy::new(ctx, moves.clone())?)? {
            count += 1;
        }
        let mut i = len;
        loop {
            if i == 0 {
                return Ok(count);
            }
            i -= 1;
            moves[i] += 1;
            if moves[i] < ctx.k_size() {
                break;
            }
            moves[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::GroupAction;
    use crate::group::FiniteGroup;
    use crate::strategy::verify;
    use crate::synthesis::trivial_context;

    fn zc(g: usize, n: usize) -> WreathContext {
        WreathContext::new(FiniteGroup::cyclic(g).unwrap(), GroupAction::rotation(n).unwrap()).unwrap()
    }

    fn winkler(ctx: &WreathContext) -> Strategy {
        let a = [1, 1, 1, 1];
        let d = [1, 0, 1, 0];
        let s = [1, 0, 0, 1];
        let one = [1, 0, 0, 0];
        let seq: Vec<Vec<usize>> = [a, d, a, s, a, d, a, one, a, d, a, s, a, d, a].iter().map(|v| v.to_vec()).collect();
        Strategy::from_coords(ctx, &seq).unwrap()
    }

    #[test]
    fn minimal_strategy_expects_half_k() {
        let c = zc(2, 4);
        let r = exact_expected_moves(&c, &winkler(&c), None, None).unwrap();
        assert_eq!(r.absorbed_probability, BigRational::one());
        assert_eq!(r.conditional_expected_moves, Some(ratio(8, 1)));
        // the stop time is uniform on 1..=15 for a minimal strategy
        assert!(r.stop_distribution.iter().all(|p| *p == ratio(1, 15)));
        let skewed: Vec<BigRational> = vec![ratio(0, 1), ratio(1, 1), ratio(0, 1), ratio(0, 1)];
        let r = exact_expected_moves(&c, &winkler(&c), Some(&skewed), None).unwrap();
        assert_eq!(r.conditional_expected_moves, Some(ratio(8, 1)));
    }

    #[test]
    fn empty_strategy_absorbs_nothing() {
        let c = zc(2, 3);
        let r = exact_expected_moves(&c, &Strategy::empty(&c), None, None).unwrap();
        assert!(r.absorbed_probability.is_zero());
        assert_eq!(r.conditional_expected_moves, None);
    }

    #[test]
    fn bad_distributions() {
        let c = zc(2, 2);
        let s = Strategy::empty(&c);
        assert!(exact_expected_moves(&c, &s, Some(&[ratio(1, 3), ratio(1, 3)]), None).is_err());
        let mut init = vec![ratio(0, 1); 4];
        init[0] = ratio(1, 1);
        assert!(exact_expected_moves(&c, &s, None, Some(&init)).is_err());
    }

    #[test]
    fn random_play() {
        assert_eq!(random_play_expectation(&zc(2, 4)).unwrap(), ratio(15, 1));
        assert_eq!(random_play_expectation(&zc(2, 3)).unwrap(), ratio(7, 1));
        let a = monte_carlo_random_play(&zc(2, 3), 20_000, 7, 4).unwrap();
        let b = monte_carlo_random_play(&zc(2, 3), 20_000, 7, 4).unwrap();
        assert_eq!(a, b);
        assert!((a.mean - 7.0).abs() < 4.0 * a.std_err + 0.05);
    }

    #[test]
    fn non_backtracking_needs_room() {
        let c = trivial_context(&FiniteGroup::cyclic(2).unwrap()).unwrap();
        assert_eq!(non_backtracking_expectation(&c, 10, 1, 1).unwrap_err(), Error::ContextTooSmall(2));
        let r = non_backtracking_expectation(&zc(2, 2), 50_000, 3, 4).unwrap();
        assert!(r.mean + 3.0 * r.std_err < 3.0, "{r:?}");
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let cases = [(zc(2, 2), 3), (zc(2, 2), 4), (zc(3, 2), 5), (zc(2, 3), 6)];
        for (c, n) in cases {
            for filters in [
                EnumFilters::default(),
                EnumFilters { palindromic: true, ..Default::default() },
                EnumFilters { up_to_h: true, ..Default::default() },
            ] {
                let e = enumerate_strategies(&c, n, filters, usize::MAX).unwrap();
                assert_eq!(e.count, count_exhaustive(&c, n, filters, 1_000_000).unwrap(), "{} {n} {filters:?}", c.name());
                assert!(e.strategies.iter().all(|s| verify(&c, s).unwrap().valid));
            }
        }
    }

    #[test]
    fn trivial_wreath_counts() {
        let c = trivial_context(&FiniteGroup::cyclic(2).unwrap()).unwrap();
        assert_eq!(enumerate_strategies(&c, 1, EnumFilters::default(), usize::MAX).unwrap().count, 1);
        let c = trivial_context(&FiniteGroup::cyclic(4).unwrap()).unwrap();
        let f = EnumFilters { minimal_only: true, ..Default::default() };
        assert_eq!(enumerate_strategies(&c, 3, f, usize::MAX).unwrap().count, 6);
        assert_eq!(enumerate_strategies(&c, 4, f, usize::MAX).unwrap().count, 0);
    }
}
