use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use synthrank::eval::{self, Corpus, CorpusParams, EvalReport, Family, Split};
use synthrank::features::{game_features, write_features_csv, FeatureSchema};
use synthrank::game::json::GameDocument;
use synthrank::game::pgsolver::{export_pgsolver, import_pgsolver};
use synthrank::game::{strategy_iteration, zielonka_solve, ParityGame, Player, Strategy};
use synthrank::ltl::{parse, Partition};
use synthrank::ranker::{build_pair_dataset, read_pairs_csv, write_pairs_csv, GameData, RankerBank, Ranker, TrainConfig};
use synthrank::rng;
use synthrank::translate::{build_game, complement_game, LabeledGame, TranslateOptions};
use synthrank::truth::{compute_ground_truth, compute_labeled, GroundTruthTable, GtParams};

type Result<T> = std::result::Result<T, Box<dyn std::error::Error + Send + Sync>>;

#[derive(Parser)]
#[command(name = "synthrank", version, about = "Edge ranking for parity games built from LTL")]
struct Cli {
    /// Seed for every stochastic step (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Builds the parity game of a formula.
    Translate {
        formula: String,
        /// Comma-separated system atoms; the rest belong to the environment.
        #[arg(long, default_value = "")]
        sys: String,
        /// Game of the negation with the roles swapped.
        #[arg(long)]
        complement: bool,
        /// Write PGSolver text instead of JSON.
        #[arg(long)]
        pgsolver: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solves a game (JSON or PGSolver).
    Solve {
        game: PathBuf,
        /// Use strategy iteration instead of Zielonka's algorithm.
        #[arg(long)]
        si: bool,
    },
    /// Ground-truth edge values as CSV plus a JSON sidecar.
    Gt {
        game: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Normalized edge features of a translated game.
    Features {
        game: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pair dataset from one split of a corpus.
    Dataset {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = "train")]
        split: SplitArg,
        /// Directory receiving one ground-truth CSV per game.
        #[arg(long)]
        gt_dir: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Trains the ranker bank from pair datasets.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        validation: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Ranked edges and the recommended strategy of a translated game.
    Recommend {
        game: PathBuf,
        #[arg(long)]
        models: Option<PathBuf>,
    },
    /// Immediately-solved fractions and relative distances on a corpus split.
    Eval {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long, default_value = "test")]
        split: SplitArg,
        /// Report CSV; the summary goes next to it with a .json suffix.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generates a seeded corpus of realizable formulae.
    GenCorpus {
        #[arg(long)]
        per_family: Option<usize>,
        /// Comma-separated families: cosafety, safety, near_cosafety, parity.
        #[arg(long)]
        families: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SplitArg {
    Train,
    Validation,
    Test,
    All,
}

impl SplitArg {
    fn admits(self, s: Split) -> bool {
        match self {
            SplitArg::Train => s == Split::Train,
            SplitArg::Validation => s == Split::Validation,
            SplitArg::Test => s == Split::Test,
            SplitArg::All => true,
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Paths {
    corpus: Option<PathBuf>,
    models: Option<PathBuf>,
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    seed: Option<u64>,
    jobs: Option<usize>,
    paths: Paths,
    translate: TranslateOptions,
    gt: GtParams,
    train: TrainConfig,
    corpus: CorpusParams,
}

impl RunConfig {
    fn load(cli: &Cli) -> Result<Self> {
        let mut cfg: RunConfig = match &cli.config {
            Some(p) => toml::from_str(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?,
            None => RunConfig::default(),
        };
        if cli.seed.is_some() {
            cfg.seed = cli.seed;
        }
        if cli.jobs.is_some() {
            cfg.jobs = cli.jobs;
        }
        let seed = cfg.seed.unwrap_or(0);
        cfg.gt.seed = seed;
        cfg.train.seed = seed;
        cfg.corpus.seed = seed;
        cfg.gt.validate()?;
        cfg.train.validate()?;
        Ok(cfg)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn path(&self, arg: &Option<PathBuf>, conf: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
        arg.clone()
            .or_else(|| conf.clone())
            .ok_or_else(|| format!("no {what} path given (flag or config)").into())
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()).into())
}

fn create(p: &Path) -> Result<io::BufWriter<fs::File>> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(io::BufWriter::new(fs::File::create(p).map_err(|e| format!("{}: {e}", p.display()))?))
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(p) => create(p)?.write_all(text.as_bytes())?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

enum Loaded {
    Labeled(Box<LabeledGame>),
    Plain(ParityGame),
}

impl Loaded {
    fn game(&self) -> &ParityGame {
        match self {
            Loaded::Labeled(lg) => &lg.game,
            Loaded::Plain(g) => g,
        }
    }

    fn labeled(self, p: &Path) -> Result<LabeledGame> {
        match self {
            Loaded::Labeled(lg) => Ok(*lg),
            Loaded::Plain(_) => Err(format!("{}: game carries no semantic labels", p.display()).into()),
        }
    }
}

fn load_game(p: &Path, opts: &TranslateOptions) -> Result<Loaded> {
    let text = read(p)?;
    if !text.trim_start().starts_with('{') {
        return Ok(Loaded::Plain(import_pgsolver(&text)?));
    }
    let doc: GameDocument = serde_json::from_str(&text)?;
    if doc.semantics.is_some() {
        Ok(Loaded::Labeled(Box::new(LabeledGame::from_document(&doc, opts)?)))
    } else {
        Ok(Loaded::Plain(doc.to_game()?))
    }
}

fn load_corpus(cfg: &RunConfig, arg: &Option<PathBuf>) -> Result<Corpus> {
    let p = cfg.path(arg, &cfg.paths.corpus, "corpus")?;
    let f = fs::File::open(&p).map_err(|e| format!("{}: {e}", p.display()))?;
    Ok(eval::read_corpus(BufReader::new(f), Split::Test)?)
}

fn load_bank(cfg: &RunConfig, arg: &Option<PathBuf>) -> Result<RankerBank> {
    match arg.as_ref().or(cfg.paths.models.as_ref()) {
        Some(p) => Ok(RankerBank::from_json(&read(p)?)?),
        None => {
            log::warn!("no models given, ranking by trueness");
            Ok(RankerBank::empty(FeatureSchema::standard(), cfg.train.clone()))
        }
    }
}

fn game_gt(lg: &LabeledGame, id: &str, cfg: &RunConfig) -> Result<GroundTruthTable> {
    let params = GtParams { seed: rng::derive(cfg.seed(), &[rng::hash_str(id)]), ..cfg.gt.clone() };
    Ok(compute_labeled(lg, &params)?)
}

fn strategy_lines(g: &ParityGame, s: &Strategy) -> String {
    s.iter().map(|(v, e)| format!("{v} -> {}\n", g.edge(e).target)).collect()
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::load(&cli)?;
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global()?;
    }
    match &cli.cmd {
        Cmd::Translate { formula, sys, complement, pgsolver, output } => {
            let f = parse(formula)?;
            let p = Partition::from_system(&f, sys.split(',').map(str::trim).filter(|s| !s.is_empty()));
            let lg = if *complement {
                complement_game(&f, &p, &cfg.translate)?
            } else {
                build_game(&f, &p, &cfg.translate)?
            };
            let text = if *pgsolver {
                export_pgsolver(&lg.game)
            } else {
                serde_json::to_string_pretty(&lg.to_document())? + "\n"
            };
            emit(output, &text)?;
            log::info!("{} vertices, {} edges", lg.game.vertex_count(), lg.game.edge_count());
        }
        Cmd::Solve { game, si } => {
            let loaded = load_game(game, &cfg.translate)?;
            let g = loaded.game();
            let (winner, strategy) = if *si {
                let init: Strategy = g.vertices_of(Player::System).map(|v| (v, g.out_edges(v)[0])).collect();
                let r = strategy_iteration(g, &init)?;
                let s = r.strategy.iter().filter(|&(v, _)| r.winner[v] == Player::System).collect();
                (r.winner, s)
            } else {
                let s = zielonka_solve(g);
                (s.winner, s.system)
            };
            if cli.json {
                let doc = serde_json::json!({
                    "initial_winner": winner[g.initial()],
                    "winner": winner,
                    "system_strategy": strategy.iter().map(|(v, e)| (v, g.edge(e).target)).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                let name = |p: Player| if p == Player::System { "system" } else { "environment" };
                println!("initial vertex won by {}", name(winner[g.initial()]));
                print!("{}", strategy_lines(g, &strategy));
            }
        }
        Cmd::Gt { game, output } => {
            let loaded = load_game(game, &cfg.translate)?;
            let (table, lg) = match loaded {
                Loaded::Labeled(lg) => (compute_labeled(&lg, &cfg.gt)?, Some(lg)),
                Loaded::Plain(g) => (compute_ground_truth(&g, &cfg.gt)?, None),
            };
            let mut buf = Vec::new();
            table.write_csv(&mut buf, lg.as_deref())?;
            emit(output, std::str::from_utf8(&buf)?)?;
            let sidecar = table.sidecar_json()? + "\n";
            match output {
                Some(p) => emit(&Some(with_suffix(p, ".json")), &sidecar)?,
                None => eprint!("{sidecar}"),
            }
        }
        Cmd::Features { game, output } => {
            let lg = load_game(game, &cfg.translate)?.labeled(game)?;
            let schema = FeatureSchema::standard();
            let rows = vec![(game.display().to_string(), &lg, game_features(&lg, &schema))];
            let mut buf = Vec::new();
            write_features_csv(&mut buf, &schema, &rows)?;
            emit(output, std::str::from_utf8(&buf)?)?;
        }
        Cmd::Dataset { corpus, split, gt_dir, output } => {
            let corpus = load_corpus(&cfg, corpus)?;
            let items: Vec<_> = corpus.items.iter().filter(|i| split.admits(i.split)).collect();
            let prepared: Vec<(String, LabeledGame, GroundTruthTable)> = items
                .par_iter()
                .map(|it| {
                    let lg = eval::prepare_game(it, &cfg.translate)?;
                    let id = it.id();
                    let gt = game_gt(&lg, &id, &cfg)?;
                    Ok((id, lg, gt))
                })
                .collect::<Result<_>>()?;
            if let Some(dir) = gt_dir {
                for (id, lg, gt) in &prepared {
                    let mut w = create(&dir.join(format!("{id}.csv")))?;
                    gt.write_csv(&mut w, Some(lg))?;
                }
            }
            let games: Vec<GameData> =
                prepared.iter().map(|(id, lg, gt)| GameData { id: id.clone(), lg, gt }).collect();
            let schema = FeatureSchema::standard();
            let data = build_pair_dataset(&games, &schema, &cfg.train);
            write_pairs_csv(create(output)?, &schema, &data)?;
            log::info!("{} games, {} pairs", games.len(), data.len());
        }
        Cmd::Train { train, validation, output } => {
            let schema = FeatureSchema::standard();
            let open = |p: &Path| -> Result<_> {
                let f = fs::File::open(p).map_err(|e| format!("{}: {e}", p.display()))?;
                Ok(read_pairs_csv(BufReader::new(f), &schema)?)
            };
            let tr = open(train)?;
            let va = validation.as_deref().map(open).transpose()?;
            let bank = RankerBank::train(&schema, &tr, va.as_ref(), &cfg.train)?;
            let out = output.clone().or_else(|| cfg.paths.models.clone());
            emit(&out, &(bank.to_json()? + "\n"))?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&bank.summary())?);
            } else {
                for m in &bank.models {
                    eprintln!(
                        "{}: {} features, train accuracy {:.3}",
                        m.key,
                        m.mask.len(),
                        m.stats.train_accuracy
                    );
                }
            }
        }
        Cmd::Recommend { game, models } => {
            let lg = load_game(game, &cfg.translate)?.labeled(game)?;
            let bank = load_bank(&cfg, models)?;
            let mut ranker = Ranker::new(&lg, &bank);
            let strategy = ranker.strategy();
            if cli.json {
                let states: Vec<_> = strategy
                    .iter()
                    .map(|(v, _)| {
                        let ranked: Vec<_> = ranker
                            .rank(v)
                            .into_iter()
                            .map(|r| {
                                serde_json::json!({
                                    "edge": r.edge,
                                    "target": r.target,
                                    "valuation": lg.valuations[r.edge],
                                    "score": r.score,
                                })
                            })
                            .collect();
                        serde_json::json!({ "state": v, "ranking": ranked })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&states)?);
            } else {
                for (v, e) in strategy.iter() {
                    let letter: Vec<&str> = lg.valuations[e].iter().map(String::as_str).collect();
                    println!("{v} -> {} [{}]", lg.game.edge(e).target, letter.join(" "));
                }
            }
        }
        Cmd::Eval { corpus, models, split, output } => {
            let corpus = load_corpus(&cfg, corpus)?;
            let bank = load_bank(&cfg, models)?;
            let items: Vec<_> = corpus.items.iter().filter(|i| split.admits(i.split)).collect();
            let rows = items
                .par_iter()
                .map(|it| {
                    let lg = eval::prepare_game(it, &cfg.translate)?;
                    Ok(eval::evaluate_game(&it.id(), &lg, &bank, cfg.seed())?)
                })
                .collect::<Result<Vec<_>>>()?;
            let report = EvalReport { rows };
            let summary = report.summary_json()? + "\n";
            let out = output.clone().or_else(|| cfg.paths.out.as_ref().map(|d| d.join("report.csv")));
            match &out {
                Some(p) => {
                    report.write_csv(create(p)?)?;
                    emit(&Some(with_suffix(p, ".json")), &summary)?;
                }
                None => report.write_csv(io::stdout())?,
            }
            if cli.json {
                print!("{summary}");
            } else {
                for s in report.summary() {
                    eprintln!(
                        "{:>8}: {:.1}% immediately solved over {} games",
                        s.method.name(),
                        100.0 * s.solved_fraction,
                        s.games
                    );
                }
            }
        }
        Cmd::GenCorpus { per_family, families, output } => {
            let mut params = cfg.corpus.clone();
            if let Some(n) = per_family {
                params.per_family = *n;
            }
            if let Some(list) = families {
                params.families = list
                    .split(',')
                    .map(|s| Family::from_name(s.trim()).ok_or_else(|| format!("unknown family {s}")))
                    .collect::<std::result::Result<_, _>>()?;
            }
            let corpus = eval::generate_corpus(&params);
            let mut buf = Vec::new();
            eval::write_corpus(&mut buf, &corpus.items.iter().collect::<Vec<_>>())?;
            let out = output.clone().or_else(|| cfg.paths.corpus.clone());
            emit(&out, std::str::from_utf8(&buf)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
