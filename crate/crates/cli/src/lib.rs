//! The `spinsw` command-line tool.
//!
//! Exit codes: 0 yes/valid, 3 no/invalid, 4 unknown, 2 usage or input errors.

pub mod expr;

use anyhow::{anyhow, bail, Context as _};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use spinning_switches::analysis::{
    enumerate_strategies_with, exact_expected_moves, monte_carlo_random_play, non_backtracking_expectation,
    random_play_expectation, EnumFilters, MonteCarloReport, DEFAULT_ENUMERATION_BUDGET,
};
use spinning_switches::decision::{
    apply_options, classify_abelian, decide_existence, find_nonexistence_certificate, min_spin_period, AbelianVerdict,
    Certificate, DecideOptions, Verdict, DEFAULT_CERTIFICATE_BUDGET,
};
use spinning_switches::search::{SearchConfig, DEFAULT_SEARCH_BUDGET};
use spinning_switches::strategy::{parse_strategy, verify, verify_naive, write_strategy, Strategy};
use spinning_switches::synthesis::{
    construct_by_decomposition, construct_involution_pair, construct_pgroup, construct_trivial, decomposition_contexts,
    synthesize_by_search,
};
use spinning_switches::wreath::WreathContext;
use spinning_switches::Error;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const JSON_SCHEMA: &str = "spinsw/1";

pub const EXIT_YES: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO: i32 = 3;
pub const EXIT_UNKNOWN: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "spinsw", version, about = "Spinning-switches puzzles as wreath products G wr H")]
pub struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Belief-state budget for searches.
    #[arg(long, global = true, env = "SPINSW_BUDGET")]
    budget: Option<usize>,
    /// Winning base vectors, e.g. `0,0,0,0/1,1,1,1`.
    #[arg(long, global = true)]
    win_set: Option<String>,
    /// The adversary spins only after every r-th move.
    #[arg(long, global = true)]
    spin_period: Option<usize>,
    /// Treat the switch table as a loop.
    #[arg(long = "loop", global = true)]
    loop_mode: bool,
    /// No progress messages on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Trivial,
    Involution,
    Pgroup,
    Decompose,
    Search,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a surjective strategy exists.
    Decide {
        puzzle: String,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Skip reduction certificates and go straight to search.
        #[arg(long)]
        no_certificates: bool,
        /// Search the first move in parallel; the strategy may vary by run.
        #[arg(long)]
        any_witness: bool,
        #[arg(long)]
        dominance: bool,
        /// Write the strategy or certificate here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build a strategy and print it in the strategy file format.
    Construct {
        puzzle: String,
        #[arg(long, value_enum)]
        method: Method,
        /// Visiting order for `trivial`, comma-separated element indices.
        #[arg(long)]
        perm: Option<String>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check a strategy file.
    Verify {
        puzzle: String,
        strategy: PathBuf,
        /// Also check by enumerating spin sequences.
        #[arg(long)]
        naive: bool,
    },
    /// List surjective strategies of one length.
    Enumerate {
        puzzle: String,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        palindromic: bool,
        #[arg(long)]
        minimal_only: bool,
        /// One representative per global spin of the whole sequence.
        #[arg(long)]
        up_to_h: bool,
        /// Stream strategies to this file, one per line.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Expected number of moves.
    Expect {
        puzzle: String,
        /// Exact expectation for this strategy file.
        #[arg(long)]
        strategy: Option<PathBuf>,
        /// Spin distribution over H, comma-separated rationals.
        #[arg(long)]
        adversary: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = spinning_switches::analysis::DEFAULT_WORKERS)]
        workers: usize,
        /// Also simulate play that avoids undoing constant moves.
        #[arg(long)]
        non_backtracking: bool,
    },
    /// Abelian classification.
    Classify { puzzle: String },
    /// Search for a nonexistence certificate.
    Certify {
        puzzle: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Smallest spin period that admits a strategy.
    MinSpinPeriod {
        puzzle: String,
        #[arg(long)]
        bound: usize,
    },
}

struct Outcome {
    code: i32,
    text: String,
    json: Map<String, Value>,
}

impl Outcome {
    fn new(code: i32) -> Self {
        Outcome { code, text: String::new(), json: Map::new() }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn set(&mut self, key: &str, v: Value) {
        self.json.insert(key.into(), v);
    }
}

struct Env<'a> {
    cli: &'a Cli,
    err: &'a mut dyn Write,
}

impl Env<'_> {
    fn progress(&mut self, msg: impl AsRef<str>) {
        if !self.cli.quiet {
            let _ = writeln!(self.err, "{}", msg.as_ref());
        }
    }

    fn budget(&self) -> usize {
        self.cli.budget.unwrap_or(DEFAULT_SEARCH_BUDGET)
    }

    fn puzzle(&self, text: &str) -> anyhow::Result<WreathContext> {
        let ctx = expr::parse_puzzle(text)?;
        let win_set = match &self.cli.win_set {
            Some(w) => Some(parse_win_set(&ctx, w)?),
            None => None,
        };
        let opts = DecideOptions { win_set, spin_period: self.cli.spin_period, loop_mode: self.cli.loop_mode, ..DecideOptions::default() };
        Ok(apply_options(&ctx, &opts)?)
    }
}

fn parse_win_set(ctx: &WreathContext, text: &str) -> anyhow::Result<Vec<usize>> {
    text.split('/')
        .map(|v| {
            let coords = parse_list(v).with_context(|| format!("bad winning vector {v:?}"))?;
            Ok(ctx.encode(&coords)?)
        })
        .collect()
}

fn parse_list(text: &str) -> anyhow::Result<Vec<usize>> {
    text.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| anyhow!("not an index: {t:?}"))).collect()
}

fn strategy_json(ctx: &WreathContext, s: &Strategy) -> Value {
    json!(s.coords(ctx))
}

fn rational_json(r: &BigRational) -> Value {
    json!({ "exact": r.to_string(), "approx": r.to_f64() })
}

fn monte_carlo_json(r: &MonteCarloReport) -> Value {
    json!({ "mean": r.mean, "std_err": r.std_err, "trials": r.trials, "seed": r.seed, "workers": r.workers })
}

fn certificate_out(o: &mut Outcome, cert: &Certificate, out: Option<&PathBuf>) -> anyhow::Result<()> {
    o.set("certificate", serde_json::to_value(cert.summary())?);
    o.set("certificate_text", json!(cert.render()));
    match out {
        Some(p) => std::fs::write(p, cert.render()).with_context(|| format!("writing {}", p.display()))?,
        None => o.text.push_str(&cert.render()),
    }
    Ok(())
}

fn strategy_out(o: &mut Outcome, ctx: &WreathContext, s: &Strategy, out: Option<&PathBuf>) -> anyhow::Result<()> {
    o.set("length", json!(s.len()));
    o.set("strategy", strategy_json(ctx, s));
    let file = write_strategy(ctx, s);
    match out {
        Some(p) => std::fs::write(p, &file).with_context(|| format!("writing {}", p.display()))?,
        None => o.text.push_str(&file),
    }
    Ok(())
}

fn decide(env: &mut Env, ctx: &WreathContext, cmd: &Command) -> anyhow::Result<Outcome> {
    let Command::Decide { max_depth, no_certificates, any_witness, dominance, out, .. } = cmd else { unreachable!() };
    let opts = DecideOptions {
        use_certificates: !no_certificates,
        search: SearchConfig {
            max_depth: *max_depth,
            budget: env.budget(),
            dominance: *dominance,
            any_witness: *any_witness,
            ..SearchConfig::default()
        },
        ..DecideOptions::default()
    };
    env.progress(format!("deciding {} (|K| = {})", ctx.name(), ctx.k_size()));
    let r = decide_existence(ctx, &opts)?;
    let mut o = Outcome::new(match r.verdict {
        Verdict::Yes(_) => EXIT_YES,
        Verdict::No(_) => EXIT_NO,
        Verdict::Unknown(_) => EXIT_UNKNOWN,
    });
    o.line(format!("verdict: {}", r.verdict.name()));
    o.line(format!("states: {}", r.states));
    o.set("verdict", json!(r.verdict.name()));
    o.set("states", json!(r.states));
    o.set("conjectural", json!(r.conjectural));
    if r.conjectural {
        o.line("note: loop verdicts are conjectural");
    }
    match &r.verdict {
        Verdict::Yes(s) => strategy_out(&mut o, &r.context, s, out.as_ref())?,
        Verdict::No(c) => certificate_out(&mut o, c, out.as_ref())?,
        Verdict::Unknown(rep) => {
            o.line(format!("reason: {}", rep.reason));
            o.set("reason", json!(rep.reason));
        }
    }
    Ok(o)
}

fn decompose(ctx: &WreathContext, budget: usize) -> anyhow::Result<Strategy> {
    let g = ctx.switch_group();
    let mut normals = g.normal_subgroups()?;
    normals.retain(|n| n.order() > 1 && n.order() < g.order());
    for n in &normals {
        let (ctx_n, ctx_q) = decomposition_contexts(ctx, n)?;
        let (Ok(s_n), Ok(s_q)) =
            (synthesize_by_search(&ctx_n, None, budget), synthesize_by_search(&ctx_q, None, budget))
        else {
            continue;
        };
        match construct_by_decomposition(ctx, n, &ctx_n, &s_n, &ctx_q, &s_q) {
            Ok(s) => return Ok(s),
            Err(Error::LiftedStrategyFailedVerification) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    bail!("no normal subgroup N with solvable N wr H and (G/N) wr H gave a verified strategy")
}

fn construct(env: &mut Env, ctx: &WreathContext, cmd: &Command) -> anyhow::Result<Outcome> {
    let Command::Construct { method, perm, max_depth, out, .. } = cmd else { unreachable!() };
    env.progress(format!("constructing for {} with {:?}", ctx.name(), method));
    let g = ctx.switch_group();
    let built: Result<Strategy, Error> = match method {
        Method::Trivial => {
            if ctx.h_size() != 1 || ctx.positions() != 1 {
                bail!("--method trivial needs a puzzle of the form `G wr 1`");
            }
            let perm = match perm {
                Some(p) => parse_list(p)?,
                None => (1..g.order()).collect(),
            };
            construct_trivial(g, &perm).map(|(_, s)| s)
        }
        Method::Involution => {
            if ctx.h_size() != 2 || ctx.positions() != 2 {
                bail!("--method involution needs a puzzle of the form `G wr C2`");
            }
            construct_involution_pair(g, None).map(|(_, s)| s)
        }
        Method::Pgroup => construct_pgroup(ctx),
        Method::Decompose => return finish_construct(ctx, decompose(ctx, env.budget()).map_err(|e| e.to_string()), out),
        Method::Search => synthesize_by_search(ctx, *max_depth, env.budget()),
    };
    match built {
        Err(e @ (Error::NotSamePrime | Error::NotInvolutionGenerated | Error::NotAPermutation)) => Err(e.into()),
        other => finish_construct(ctx, other.map_err(|e| e.to_string()), out),
    }
}

fn finish_construct(ctx: &WreathContext, built: Result<Strategy, String>, out: &Option<PathBuf>) -> anyhow::Result<Outcome> {
    match built {
        Ok(s) => {
            let mut o = Outcome::new(EXIT_YES);
            o.set("verified", json!(true));
            strategy_out(&mut o, ctx, &s, out.as_ref())?;
            Ok(o)
        }
        Err(msg) => {
            let mut o = Outcome::new(EXIT_NO);
            o.line(format!("construction failed: {msg}"));
            o.set("verified", json!(false));
            o.set("error", json!(msg));
            Ok(o)
        }
    }
}

fn verify_cmd(env: &mut Env, ctx: &WreathContext, cmd: &Command) -> anyhow::Result<Outcome> {
    let Command::Verify { strategy, naive, .. } = cmd else { unreachable!() };
    let text = std::fs::read_to_string(strategy).with_context(|| format!("reading {}", strategy.display()))?;
    let s = parse_strategy(ctx, &text)?;
    env.progress(format!("verifying {} moves on {}", s.len(), ctx.name()));
    let r = verify(ctx, &s)?;
    let mut o = Outcome::new(if r.valid { EXIT_YES } else { EXIT_NO });
    o.line(if r.valid { "valid" } else { "invalid" });
    o.line(format!("length: {}", r.length));
    o.line(format!("minimal: {}", r.minimal));
    o.set("valid", json!(r.valid));
    o.set("length", json!(r.length));
    o.set("minimal", json!(r.minimal));
    o.set("belief_sizes", json!(r.belief_sizes));
    if !r.valid {
        o.line(format!("unsolved initial states: {}", r.residual.len()));
        o.set("residual", json!(r.residual.iter().map(|&x| ctx.decode(x)).collect::<Vec<_>>()));
    }
    if *naive {
        let budget = env.cli.budget.map_or(spinning_switches::strategy::DEFAULT_NAIVE_BUDGET, |b| b as u128);
        match verify_naive(ctx, &s, budget) {
            Ok(n) => {
                if n != r.valid {
                    bail!("belief verification and path enumeration disagree");
                }
                o.line(format!("naive: {}", if n { "valid" } else { "invalid" }));
                o.set("naive_valid", json!(n));
            }
            Err(Error::BudgetExceeded { needed, budget }) => {
                o.line(format!("naive: skipped ({needed} spin paths > budget {budget})"));
                o.set("naive_valid", Value::Null);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(o)
}

fn enumerate_cmd(env: &mut Env, ctx: &WreathContext, cmd: &Command) -> anyhow::Result<Outcome> {
    let Command::Enumerate { length, palindromic, minimal_only, up_to_h, out, .. } = cmd else { unreachable!() };
    let filters = EnumFilters { palindromic: *palindromic, minimal_only: *minimal_only, up_to_h: *up_to_h };
    env.progress(format!("enumerating length-{length} strategies on {}", ctx.name()));
    let mut sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::sink()),
    };
    let mut listed = Vec::new();
    let mut io_err = None;
    let budget = env.cli.budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET);
    let count = enumerate_strategies_with(ctx, *length, filters, budget, |m| {
        let line = m.iter().map(|&k| ctx.decode(k).iter().map(usize::to_string).collect::<Vec<_>>().join(",")).collect::<Vec<_>>().join(" ");
        if out.is_some() {
            if let Err(e) = writeln!(sink, "{line}") {
                io_err.get_or_insert(e);
            }
        } else {
            listed.push(line);
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    sink.flush()?;
    let mut o = Outcome::new(EXIT_YES);
    for l in &listed {
        o.line(l);
    }
    o.line(format!("count: {count}"));
    o.set("count", json!(count));
    o.set("length", json!(length));
    o.set("filters", json!({ "palindromic": palindromic, "minimal_only": minimal_only, "up_to_h": up_to_h }));
    if *up_to_h {
        o.set("up_to_h_reading", json!("one global spin applied to every move; lexicographically least representative"));
    }
    if out.is_none() {
        o.set("strategies", json!(listed));
    }
    Ok(o)
}

fn parse_distribution(text: &str) -> anyhow::Result<Vec<BigRational>> {
    text.split(',')
        .map(|t| t.trim().parse::<BigRational>().map_err(|_| anyhow!("not a rational: {t:?}")))
        .collect()
}

fn expect_cmd(env: &mut Env, ctx: &WreathContext, cmd: &Command) -> anyhow::Result<Outcome> {
    let Command::Expect { strategy, adversary, trials, workers, non_backtracking, .. } = cmd else { unreachable!() };
    let mut o = Outcome::new(EXIT_YES);
    let adv = adversary.as_deref().map(parse_distribution).transpose()?;
    if let Some(path) = strategy {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let s = parse_strategy(ctx, &text)?;
        let r = exact_expected_moves(ctx, &s, adv.as_deref(), None)?;
        o.line(format!("absorbed probability: {}", r.absorbed_probability));
        match &r.conditional_expected_moves {
            Some(e) => o.line(format!("expected moves: {e} (~{:.6})", e.to_f64().unwrap_or(f64::NAN))),
            None => o.line("expected moves: undefined (never absorbed)"),
        }
        o.set("absorbed_probability", rational_json(&r.absorbed_probability));
        o.set("expected_moves", r.conditional_expected_moves.as_ref().map_or(Value::Null, rational_json));
        o.set("stop_distribution", json!(r.stop_distribution.iter().map(|p| p.to_string()).collect::<Vec<_>>()));
        o.set("adversary", json!(r.adversary));
        return Ok(o);
    }
    if adv.is_some() {
        bail!("--adversary needs --strategy");
    }
    let closed = random_play_expectation(ctx)?;
    env.progress(format!("simulating {trials} games (seed {}, {workers} workers)", env.cli.seed));
    let mc = monte_carlo_random_play(ctx, *trials, env.cli.seed, *workers)?;
    o.line(format!("random play, closed form: {closed}"));
    o.line(format!("random play, Monte Carlo: {:.4} +- {:.4} (seed {}, {} workers)", mc.mean, mc.std_err, mc.seed, mc.workers));
    o.set("random_play", json!({ "closed_form": rational_json(&closed), "monte_carlo": monte_carlo_json(&mc) }));
    if *non_backtracking {
        let nb = non_backtracking_expectation(ctx, *trials, env.cli.seed, *workers)?;
        o.line(format!("non-backtracking play: {:.4} +- {:.4}", nb.mean, nb.std_err));
        o.set("non_backtracking", monte_carlo_json(&nb));
    }
    o.set("seed", json!(env.cli.seed));
    Ok(o)
}

fn classify_cmd(ctx: &WreathContext) -> anyhow::Result<Outcome> {
    match classify_abelian(ctx.switch_group(), ctx.action())? {
        AbelianVerdict::Yes => {
            let mut o = Outcome::new(EXIT_YES);
            o.line("verdict: yes");
            o.set("verdict", json!("yes"));
            Ok(o)
        }
        AbelianVerdict::No(c) => {
            let mut o = Outcome::new(EXIT_NO);
            o.line("verdict: no");
            o.set("verdict", json!("no"));
            certificate_out(&mut o, &c, None)?;
            Ok(o)
        }
    }
}

fn certify_cmd(env: &mut Env, ctx: &WreathContext, out: Option<&PathBuf>) -> anyhow::Result<Outcome> {
    env.progress(format!("searching reductions for {}", ctx.name()));
    let budget = env.cli.budget.unwrap_or(DEFAULT_CERTIFICATE_BUDGET);
    match find_nonexistence_certificate(ctx, budget) {
        Ok(Some(c)) => {
            let mut o = Outcome::new(EXIT_NO);
            o.set("verdict", json!("no"));
            o.set("validated", json!(true));
            certificate_out(&mut o, &c, out)?;
            Ok(o)
        }
        Ok(None) | Err(Error::CertificateBudgetExceeded(_)) => {
            let mut o = Outcome::new(EXIT_UNKNOWN);
            o.line("no certificate found");
            o.set("verdict", json!("unknown"));
            Ok(o)
        }
        Err(e) => Err(e.into()),
    }
}

fn min_spin_cmd(env: &mut Env, ctx: &WreathContext, bound: usize) -> anyhow::Result<Outcome> {
    let opts = DecideOptions { search: SearchConfig { budget: env.budget(), ..SearchConfig::default() }, ..DecideOptions::default() };
    match min_spin_period(ctx, bound, &opts) {
        Ok(Some(r)) => {
            let mut o = Outcome::new(EXIT_YES);
            o.line(format!("min spin period: {r}"));
            o.set("min_spin_period", json!(r));
            Ok(o)
        }
        Ok(None) => {
            let mut o = Outcome::new(EXIT_NO);
            o.line(format!("no spin period <= {bound} admits a strategy"));
            o.set("min_spin_period", Value::Null);
            Ok(o)
        }
        Err(Error::SearchBudgetExceeded { states }) => {
            let mut o = Outcome::new(EXIT_UNKNOWN);
            o.line(format!("budget exhausted after {states} states"));
            o.set("min_spin_period", Value::Null);
            o.set("reason", json!("budget exhausted"));
            Ok(o)
        }
        Err(e) => Err(e.into()),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Decide { .. } => "decide",
        Command::Construct { .. } => "construct",
        Command::Verify { .. } => "verify",
        Command::Enumerate { .. } => "enumerate",
        Command::Expect { .. } => "expect",
        Command::Classify { .. } => "classify",
        Command::Certify { .. } => "certify",
        Command::MinSpinPeriod { .. } => "min-spin-period",
    }
}

fn puzzle_text(c: &Command) -> &str {
    match c {
        Command::Decide { puzzle, .. }
        | Command::Construct { puzzle, .. }
        | Command::Verify { puzzle, .. }
        | Command::Enumerate { puzzle, .. }
        | Command::Expect { puzzle, .. }
        | Command::Classify { puzzle }
        | Command::Certify { puzzle, .. }
        | Command::MinSpinPeriod { puzzle, .. } => puzzle,
    }
}

fn dispatch(env: &mut Env) -> anyhow::Result<(WreathContext, Outcome)> {
    let cmd = &env.cli.command;
    let ctx = env.puzzle(puzzle_text(cmd))?;
    let o = match cmd {
        Command::Decide { .. } => decide(env, &ctx, cmd)?,
        Command::Construct { .. } => construct(env, &ctx, cmd)?,
        Command::Verify { .. } => verify_cmd(env, &ctx, cmd)?,
        Command::Enumerate { .. } => enumerate_cmd(env, &ctx, cmd)?,
        Command::Expect { .. } => expect_cmd(env, &ctx, cmd)?,
        Command::Classify { .. } => classify_cmd(&ctx)?,
        Command::Certify { out, .. } => certify_cmd(env, &ctx, out.as_ref())?,
        Command::MinSpinPeriod { bound, .. } => min_spin_cmd(env, &ctx, *bound)?,
    };
    Ok((ctx, o))
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let started = Instant::now();
    let mut env = Env { cli: &cli, err };
    let result = dispatch(&mut env);
    let elapsed = started.elapsed().as_secs_f64() * 1000.0;
    match result {
        Ok((ctx, o)) => {
            if cli.json {
                let mut doc = Map::new();
                doc.insert("schema".into(), json!(JSON_SCHEMA));
                doc.insert("command".into(), json!(command_name(&cli.command)));
                doc.insert("puzzle".into(), json!(ctx.name()));
                doc.insert("k_size".into(), json!(ctx.k_size()));
                doc.insert("exit_code".into(), json!(o.code));
                doc.insert("timing_ms".into(), json!(elapsed));
                doc.insert(
                    "budget".into(),
                    json!({
                        "search": cli.budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
                        "spin_period": ctx.spin_period(),
                        "win_set": ctx.win_set().iter().map(|&w| ctx.decode(w)).collect::<Vec<_>>(),
                        "loop": !ctx.switch_group().is_associative(),
                    }),
                );
                doc.extend(o.json);
                let _ = writeln!(out, "{}", Value::Object(doc));
            } else {
                let _ = write!(out, "{}", o.text);
            }
            o.code
        }
        Err(e) => {
            if cli.json {
                let doc = json!({ "schema": JSON_SCHEMA, "command": command_name(&cli.command), "error": format!("{e:#}"), "exit_code": EXIT_USAGE });
                let _ = writeln!(out, "{doc}");
            }
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}
