//! Command-line frontend: model checking, learning, strategy evaluation,
//! ζ-sweeps and the Rabin-reward comparison on files or embedded models.

pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use omegalearn::analysis::{
    evaluate_strategy, max_satisfaction_prob, AnalysisError, MixedStrategy, ReachOptions,
};
use omegalearn::automata::{nbw_to_ldbw, parse_hoa, Automaton, AutomatonClass, AutomatonError};
use omegalearn::corpus;
use omegalearn::learn::{
    extract_strategy, learn_product, rabin_q_learning, run_seed, LearnConfig, LearnError, QTable,
    RabinRewardConfig, RewardMode, BASELINE_STEP_SIZE,
};
use omegalearn::product::{build_product, Product, ProductError, ProductOptions};
use omegalearn::{parse_model, Mdp, ModelError, ModelFormat};
use rayon::prelude::*;
use thiserror::Error;

pub use output::{Cell, Format, Table};

/// ζ values of the reference sweep on `deferred`.
pub const DEFAULT_ZETA_GRID: [f64; 29] = [
    0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75, 0.76, 0.77, 0.78, 0.79, 0.8, 0.81, 0.85, 0.87, 0.88, 0.89, 0.9,
    0.95, 0.96, 0.97, 0.98, 0.99, 0.995, 0.999, 0.9995, 0.9999,
];

/// Tie band for strategies extracted from baseline Q-tables. Their values
/// are discounted sums of order `1 / (1 - λ)`; only exact ties are mixed.
pub const BASELINE_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid strategy file: {0}")]
    Strategy(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl CliError {
    /// 2 for numerical non-convergence, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Analysis(AnalysisError::NotConverged { .. }) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "omegalearn", version, about = "Learn and check strategies for ω-regular objectives on MDPs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximal satisfaction probability at the initial state
    Check(Opts),
    /// Learn on the ζ-augmented product and check the learned strategy
    Learn(Opts),
    /// Exact values of a stored (or the uniform) strategy
    Eval(Opts),
    /// Learn over a grid of ζ values; one CSV-style row per ζ
    Sweep(Opts),
    /// Rabin-reward baseline against ζ-augmented learning
    RabinDemo(Opts),
    /// List the embedded models
    Corpus(CorpusOpts),
}

#[derive(Debug, Clone, Args)]
pub struct CorpusOpts {
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Model file (`.prism`, `.pm`, `.nm`: PRISM subset; otherwise explicit)
    #[arg(long, conflicts_with = "corpus")]
    pub model: Option<PathBuf>,
    /// Embedded model name
    #[arg(long)]
    pub corpus: Option<String>,
    /// Automaton file in HOA format
    #[arg(long)]
    pub hoa: Option<PathBuf>,
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Comma-separated ζ values for `sweep`
    #[arg(long)]
    pub zeta_grid: Option<String>,
    #[arg(long)]
    pub episodes: Option<usize>,
    #[arg(long)]
    pub ep_length: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Discount of the learner; for `rabin-demo` the baseline's λ
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs (default 1 for `learn`, 5 otherwise)
    #[arg(long)]
    pub runs: Option<usize>,
    /// Value-iteration tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Tie band when extracting strategies from learned values
    #[arg(long)]
    pub tie_tol: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Send letters the automaton cannot read to a rejecting sink
    #[arg(long)]
    pub complete_rejecting: bool,
    /// Rabin pair for `rabin-demo` (default: all)
    #[arg(long)]
    pub pair: Option<usize>,
    #[arg(long)]
    pub rplus: Option<f64>,
    #[arg(long)]
    pub rminus: Option<f64>,
    /// Use the relative-value (average reward) baseline learner
    #[arg(long)]
    pub average: bool,
    /// Value of the model constant `p`
    #[arg(long)]
    pub p: Option<f64>,
    /// Strategy JSON for `eval`
    #[arg(long)]
    pub strategy: Option<PathBuf>,
    /// Where `learn` writes the strategy of its first run
    #[arg(long)]
    pub save_strategy: Option<PathBuf>,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a command and returns what it prints on stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Check(o) => Ok(check(o)?.render(o.format)),
        Command::Learn(o) => Ok(learn(o)?.render(o.format)),
        Command::Eval(o) => Ok(eval(o)?.render(o.format)),
        Command::Sweep(o) => Ok(sweep(o)?.render(o.format)),
        Command::RabinDemo(o) => Ok(rabin_demo(o)?.render(o.format)),
        Command::Corpus(o) => Ok(corpus_table().render(o.format)),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A model with its objective automaton and the automaton used for the
/// Rabin baseline.
pub struct Problem {
    pub mdp: Mdp,
    pub automaton: Automaton,
    pub rabin: Automaton,
}

pub fn load(o: &Opts) -> Result<Problem> {
    let hoa = o.hoa.as_deref().map(read).transpose()?.map(|t| parse_hoa(&t)).transpose()?;
    let (mdp, automaton, rabin) = match (&o.corpus, &o.model) {
        (Some(name), None) => {
            let e = corpus::entry(name)
                .ok_or_else(|| CliError::Usage(format!("unknown corpus model `{name}` (see `corpus`)")))?;
            let mdp = e.mdp(o.p)?;
            match hoa {
                Some(a) => (mdp, a.clone(), a),
                None => (mdp, e.automaton(), e.rabin_automaton()),
            }
        }
        (None, Some(path)) => {
            let text = read(path)?;
            let prism = matches!(path.extension().and_then(|x| x.to_str()), Some("prism" | "pm" | "nm"));
            let format = if prism {
                ModelFormat::PrismSubset
            } else {
                ModelFormat::Explicit
            };
            let mut overrides = BTreeMap::new();
            if let Some(p) = o.p {
                overrides.insert("p".to_string(), p);
            }
            let mdp = parse_model(&text, format, &overrides)?;
            let a = hoa.ok_or_else(|| CliError::Usage("--hoa is required with --model".into()))?;
            (mdp, a.clone(), a)
        }
        _ => return Err(CliError::Usage("give exactly one of --model or --corpus".into())),
    };
    let automaton = if automaton.is_buchi() && automaton.classify()? == AutomatonClass::Nondeterministic {
        nbw_to_ldbw(&automaton)?.into_automaton()
    } else {
        automaton
    };
    let rabin = if rabin.is_buchi() { rabin.to_rabin() } else { rabin };
    Ok(Problem { mdp, automaton, rabin })
}

fn product_options(o: &Opts) -> ProductOptions {
    ProductOptions {
        complete_rejecting: o.complete_rejecting,
        ..Default::default()
    }
}

fn reach_options(o: &Opts) -> ReachOptions {
    let mut r = ReachOptions::default();
    if let Some(t) = o.tol {
        r.tol = t;
    }
    r
}

pub fn learn_config(o: &Opts) -> Result<LearnConfig> {
    let d = LearnConfig::default();
    let cfg = LearnConfig {
        episodes: o.episodes.unwrap_or(d.episodes),
        episode_length: o.ep_length.unwrap_or(d.episode_length),
        alpha: o.alpha.unwrap_or(d.alpha),
        epsilon: o.epsilon.unwrap_or(d.epsilon),
        gamma: o.gamma.unwrap_or(d.gamma),
        zeta: o.zeta.unwrap_or(d.zeta),
        seed: o.seed,
        runs: o.runs.unwrap_or(d.runs),
        tie_tol: o.tie_tol.unwrap_or(d.tie_tol),
        ..d
    };
    cfg.validate()?;
    Ok(cfg)
}

fn initial_value(p: &Product, sigma: &MixedStrategy) -> Result<f64> {
    Ok(evaluate_strategy(p, sigma, None)?.a[p.mdp().initial()])
}

/// Learns with `cfg` and returns the Q-table with the exact satisfaction
/// probability of its extracted strategy.
fn learn_once(p: &Product, cfg: &LearnConfig) -> Result<(QTable, MixedStrategy, f64)> {
    let (q, _) = learn_product(p, cfg)?;
    let mut sigma = extract_strategy(&q, cfg.tie_tol);
    sigma.fill_uniform(p.mdp());
    let exact = initial_value(p, &sigma)?;
    Ok((q, sigma, exact))
}

pub fn check(o: &Opts) -> Result<Table> {
    let start = Instant::now();
    let pr = load(o)?;
    let p = build_product(&pr.mdp, &pr.automaton, product_options(o))?;
    let r = max_satisfaction_prob(&p, &reach_options(o))?;
    eprintln!("time {:.6} s", start.elapsed().as_secs_f64());
    let mut t = Table::new(&["probability"]);
    t.scalar = true;
    t.push(vec![r.values[p.mdp().initial()].into()]);
    Ok(t)
}

pub fn learn(o: &Opts) -> Result<Table> {
    let pr = load(o)?;
    let p = build_product(&pr.mdp, &pr.automaton, product_options(o))?;
    let cfg = learn_config(o)?;
    let runs = o.runs.unwrap_or(1);
    let results: Vec<(u64, Result<(QTable, MixedStrategy, f64)>)> = (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let seed = run_seed(cfg.seed, r);
            (seed, learn_once(&p, &LearnConfig { seed, ..cfg }))
        })
        .collect();
    let mut t = Table::new(&["run", "seed", "estimate", "exact"]);
    for (r, (seed, res)) in results.into_iter().enumerate() {
        let (q, sigma, exact) = res?;
        if r == 0 {
            if let Some(path) = &o.save_strategy {
                let json = serde_json::to_string(&sigma).expect("strategies serialize");
                std::fs::write(path, json).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
            }
        }
        t.push(vec![r.into(), seed.into(), q.max(p.mdp().initial()).into(), exact.into()]);
    }
    Ok(t)
}

pub fn eval(o: &Opts) -> Result<Table> {
    let pr = load(o)?;
    let p = build_product(&pr.mdp, &pr.automaton, product_options(o))?;
    let m = p.mdp();
    let mut sigma = match &o.strategy {
        Some(path) => {
            let s: MixedStrategy =
                serde_json::from_str(&read(path)?).map_err(|e| CliError::Strategy(e.to_string()))?;
            if s.num_states() != m.num_states() {
                return Err(CliError::Strategy(format!(
                    "{} states, product has {}",
                    s.num_states(),
                    m.num_states()
                )));
            }
            s
        }
        None => MixedStrategy::uniform(m),
    };
    sigma.fill_uniform(m);
    let zeta = o.zeta.unwrap_or(LearnConfig::default().zeta);
    let r = evaluate_strategy(&p, &sigma, p.is_buchi().then_some(zeta))?;
    let nan = f64::NAN;
    let mut t = Table::new(&["state", "a", "p", "f"]);
    for s in 0..m.num_states() {
        let pick = |v: &Option<Vec<f64>>| v.as_ref().map_or(nan, |v| v[s]);
        t.push(vec![
            m.state_name(s).into(),
            r.a[s].into(),
            pick(&r.p).into(),
            pick(&r.f).into(),
        ]);
    }
    Ok(t)
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad ζ value `{s}`")))
        })
        .collect()
}

pub fn sweep(o: &Opts) -> Result<Table> {
    let grid = match &o.zeta_grid {
        Some(g) => parse_grid(g)?,
        None => DEFAULT_ZETA_GRID.to_vec(),
    };
    let pr = load(o)?;
    let p = build_product(&pr.mdp, &pr.automaton, product_options(o))?;
    let cfg = learn_config(o)?;
    let m = p.mdp();
    let s0 = m.initial();
    let names: Vec<String> = (0..m.choices(s0).len()).map(|c| m.choice_name(s0, c).to_string()).collect();
    let mut columns = vec!["zeta".to_string()];
    columns.extend(names.iter().map(|n| format!("q_{n}")));
    columns.push("p_phi".into());
    let mut t = Table::with_columns(columns);

    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|i| (0..cfg.runs as u64).map(move |r| (i, r)))
        .collect();
    let results: Vec<Result<(Vec<f64>, f64)>> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let run = LearnConfig {
                zeta: grid[i],
                seed: run_seed(cfg.seed, r),
                ..cfg
            };
            let (q, _, exact) = learn_once(&p, &run)?;
            let row = (0..names.len()).map(|c| q.get(s0, c).unwrap_or(0.0)).collect();
            Ok((row, exact))
        })
        .collect();
    let results: Vec<(Vec<f64>, f64)> = results.into_iter().collect::<Result<_>>()?;
    for (i, &zeta) in grid.iter().enumerate() {
        let chunk = &results[i * cfg.runs..(i + 1) * cfg.runs];
        let n = cfg.runs as f64;
        let mut row: Vec<Cell> = vec![zeta.into()];
        for c in 0..names.len() {
            row.push((chunk.iter().map(|(q, _)| q[c]).sum::<f64>() / n).into());
        }
        row.push((chunk.iter().map(|(_, e)| e).sum::<f64>() / n).into());
        t.push(row);
    }
    Ok(t)
}

fn summary(t: &mut Table, learner: &str, pair: String, values: &[f64]) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    t.push(vec![
        learner.into(),
        pair.into(),
        values.len().into(),
        mean.into(),
        min.into(),
        max.into(),
    ]);
}

pub fn rabin_demo(o: &Opts) -> Result<Table> {
    let pr = load(o)?;
    let opts = product_options(o);
    let rp = build_product(&pr.mdp, &pr.rabin, opts)?;
    let num_pairs = rp.rabin().map_or(1, |pairs| pairs.len());
    let pairs: Vec<usize> = match o.pair {
        Some(i) if i < num_pairs => vec![i],
        Some(i) => return Err(LearnError::NoSuchPair(i).into()),
        None => (0..num_pairs).collect(),
    };
    let cfg = learn_config(o)?;
    let mode = if o.average {
        RewardMode::Average
    } else {
        match o.gamma {
            Some(g) if g < 1.0 => RewardMode::Discounted(g),
            _ => RabinRewardConfig::default().mode,
        }
    };
    let d = RabinRewardConfig::default();
    let mut t = Table::new(&["learner", "pair", "runs", "mean", "min", "max"]);
    for &pair in &pairs {
        let rcfg = RabinRewardConfig {
            pair,
            r_plus: o.rplus.unwrap_or(d.r_plus),
            r_minus: o.rminus.unwrap_or(d.r_minus),
            mode,
        };
        let values: Vec<f64> = (0..cfg.runs as u64)
            .into_par_iter()
            .map(|r| {
                let run = LearnConfig {
                    seed: run_seed(cfg.seed, r),
                    step_size: BASELINE_STEP_SIZE,
                    gamma: 1.0,
                    ..cfg
                };
                let q = rabin_q_learning(&rp, &run, &rcfg)?;
                let mut sigma = extract_strategy(&q, BASELINE_TIE_TOL);
                sigma.fill_uniform(rp.mdp());
                initial_value(&rp, &sigma)
            })
            .collect::<Result<_>>()?;
        summary(&mut t, "rabin", pair.to_string(), &values);
    }
    if pr.automaton.is_buchi() {
        let p = build_product(&pr.mdp, &pr.automaton, opts)?;
        let values: Vec<f64> = (0..cfg.runs as u64)
            .into_par_iter()
            .map(|r| {
                let run = LearnConfig {
                    seed: run_seed(cfg.seed, r),
                    ..cfg
                };
                learn_once(&p, &run).map(|(_, _, exact)| exact)
            })
            .collect::<Result<_>>()?;
        summary(&mut t, "augmented", "-".into(), &values);
    } else {
        eprintln!("note: objective has no Büchi automaton; skipping augmented learning");
    }
    let opt = max_satisfaction_prob(&rp, &reach_options(o))?.values[rp.mdp().initial()];
    summary(&mut t, "optimum", "-".into(), &[opt]);
    Ok(t)
}

pub fn corpus_table() -> Table {
    let mut t = Table::new(&["name", "mdp_states", "automaton_states"]);
    for e in &corpus::ENTRIES {
        let states = e.mdp(None).expect("embedded model is valid").num_states();
        t.push(vec![e.name.into(), states.into(), e.automaton().num_states().into()]);
    }
    t
}
