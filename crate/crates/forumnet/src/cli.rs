//! The `forumnet` command line: `analyze`, `stability`, `fingerprint` and
//! `generate`. Exit status is 0 on success, 1 for data errors and 2 for
//! usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use forumnet_core::experiments::{self, Baseline, Labels, RemovalStrategy, Selector};
use forumnet_core::ingest::{Action, Ingested};
use forumnet_core::roles::{self, SpamConfig, SpamReport};
use forumnet_core::synth::{self, SynthConfig};
use forumnet_core::{Corpus, Direction, MetricsConfig, Role, Roster};

use crate::error::{Error, Result};
use crate::format::{self, LogFormat};
use crate::report;
use crate::synthcfg;

#[derive(Debug, Parser)]
#[command(
    name = "forumnet",
    version,
    about = "Reply-graph analytics for forum message logs"
)]
pub struct Cli {
    /// Worker threads (default: one per core). Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-node metrics and the whole-network summary.
    Analyze(AnalyzeArgs),
    /// Node-removal strategies and metric stability.
    Stability(StabilityArgs),
    /// Moderator t-tests and candidate ranking.
    Fingerprint(FingerprintArgs),
    /// Synthetic corpus with planted moderators and spammers.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Directed,
    Undirected,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Directed => Direction::Directed,
            DirectionArg::Undirected => Direction::Undirected,
        }
    }
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long, value_enum, default_value = "directed")]
    pub direction: DirectionArg,
    /// Window for betweenness oscillations, e.g. 7d, 12h.
    #[arg(long, default_value = "7d", value_parser = format::parse_duration)]
    pub window: i64,
    /// Sentiment lexicon (`word,polarity`), used when events carry no sentiment.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpamArgs {
    /// Flag spammers from behavior and spam labels.
    #[arg(long)]
    pub detect_spammers: bool,
    /// Activity quantile for the high-activity condition.
    #[arg(long, default_value_t = 0.99, value_parser = parse_quantile)]
    pub spam_percentile: f64,
    /// Most answers from non-spammers a spammer may receive.
    #[arg(long, default_value_t = 1)]
    pub max_nonspam_answers: u32,
}

impl SpamArgs {
    fn config(&self) -> SpamConfig {
        SpamConfig {
            activity_percentile: self.spam_percentile,
            max_nonspam_answers: self.max_nonspam_answers,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Message log (`.csv`, or `.jsonl` for JSON lines).
    #[arg(long)]
    pub messages: PathBuf,
    /// Overrides the layout implied by the file extension.
    #[arg(long, value_enum)]
    pub format: Option<LogFormat>,
    /// Role roster (`author_id,role`).
    #[arg(long)]
    pub roster: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub metrics: MetricArgs,
    #[command(flatten)]
    pub spam: SpamArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub metrics: MetricArgs,
    #[command(flatten)]
    pub spam: SpamArgs,
    /// Comma-separated strategies, e.g. top1,bottom,moderators+spammers.
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_strategy)]
    pub strategies: Vec<RemovalStrategy>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FingerprintArgs {
    /// Message log; repeat to pool several networks.
    #[arg(long, required = true)]
    pub messages: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<LogFormat>,
    /// One roster for all networks, or one per `--messages` in the same order.
    #[arg(long, required = true)]
    pub roster: Vec<PathBuf>,
    #[command(flatten)]
    pub metrics: MetricArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `key = value` generator settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Single setting, `key=value`; applied after `--config`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub n_users: Option<usize>,
    #[arg(long)]
    pub n_messages: Option<usize>,
    #[arg(long)]
    pub n_moderators: Option<usize>,
    #[arg(long)]
    pub n_spammers: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: LogFormat,
}

fn parse_quantile(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(q) if q > 0.0 && q <= 1.0 => Ok(q),
        _ => Err(format!("expected a quantile in (0, 1], got `{s}`")),
    }
}

fn parse_strategy(s: &str) -> std::result::Result<RemovalStrategy, String> {
    s.parse().map_err(|e: forumnet_core::Error| e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n.into());
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker threads: {e}")))?;
    let threads = cli
        .threads
        .map_or_else(|| "auto".to_string(), |n| n.to_string());
    pool.install(|| match cli.command {
        Command::Analyze(a) => analyze(&a, &threads),
        Command::Stability(a) => stability(&a, &threads),
        Command::Fingerprint(a) => fingerprint(&a, &threads),
        Command::Generate(a) => generate(&a),
    })
}

/// Run manifest under construction.
struct Manifest(Vec<(String, String)>);

impl Manifest {
    fn new(command: &str) -> Self {
        let mut m = Manifest(Vec::new());
        m.push("tool", format!("forumnet {}", env!("CARGO_PKG_VERSION")));
        m.push("command", command);
        m
    }

    fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    fn input(&mut self, key: &str, path: Option<&Path>, sha256: Option<&str>) {
        match (path, sha256) {
            (Some(p), Some(d)) => {
                self.push(key, p.display());
                self.push(format!("{key}.sha256"), d);
            }
            _ => self.push(key, "none"),
        }
    }

    fn metrics(&mut self, a: &MetricArgs) {
        self.push("direction", Direction::from(a.direction).as_str());
        self.push("window", format::format_duration(a.window));
    }

    fn spam(&mut self, a: &SpamArgs) {
        self.push("detect_spammers", a.detect_spammers);
        self.push("spam_percentile", a.spam_percentile);
        self.push("max_nonspam_answers", a.max_nonspam_answers);
    }

    fn ingest(&mut self, prefix: &str, i: &Ingested) {
        let count = |a: Action| i.diagnostics.iter().filter(|d| d.action == a).count();
        self.push(format!("{prefix}records"), i.input_records);
        self.push(format!("{prefix}accepted"), i.events.len());
        self.push(format!("{prefix}rejected"), count(Action::Rejected));
        self.push(format!("{prefix}repaired"), count(Action::Repaired));
    }

    fn render(&self) -> String {
        report::key_values(&self.0)
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn load_messages(path: &Path, format: Option<LogFormat>) -> Result<(Ingested, String)> {
    let (ingested, digest) = format::read_messages(path, format)?;
    for d in &ingested.diagnostics {
        eprintln!("warning: {}: {d}", path.display());
    }
    Ok((ingested, digest))
}

fn load_roster(path: Option<&Path>) -> Result<Option<(Roster, String)>> {
    path.map(format::read_roster).transpose()
}

fn warn_absent(roster: &Roster, baseline: &Baseline) {
    for author in roster.absent_authors(|a| baseline.graph.index_of(a).is_some()) {
        eprintln!("warning: roster author `{author}` never posts; no node");
    }
}

fn metrics_config(a: &MetricArgs) -> Result<(MetricsConfig, Option<String>)> {
    let (lexicon, digest) = match &a.lexicon {
        Some(p) => {
            let (lex, d) = format::read_lexicon(p)?;
            (Some(lex), Some(d))
        }
        None => (None, None),
    };
    let config = MetricsConfig {
        direction: a.direction.into(),
        window_secs: a.window,
        lexicon,
    };
    Ok((config, digest))
}

struct Prepared {
    baseline: Baseline,
    roster: Option<Roster>,
    config: MetricsConfig,
    manifest: Manifest,
}

fn prepare(command: &str, input: &InputArgs, metrics: &MetricArgs) -> Result<Prepared> {
    let (ingested, digest) = load_messages(&input.messages, input.format)?;
    let roster = load_roster(input.roster.as_deref())?;
    let (config, lexicon_digest) = metrics_config(metrics)?;

    let mut manifest = Manifest::new(command);
    manifest.input("messages", Some(&input.messages), Some(&digest));
    manifest.push(
        "messages.format",
        input
            .format
            .unwrap_or_else(|| LogFormat::from_path(&input.messages))
            .as_str(),
    );
    manifest.input(
        "roster",
        input.roster.as_deref(),
        roster.as_ref().map(|r| r.1.as_str()),
    );
    manifest.input(
        "lexicon",
        metrics.lexicon.as_deref(),
        lexicon_digest.as_deref(),
    );
    manifest.metrics(metrics);
    manifest.ingest("", &ingested);

    let baseline = Baseline::new(Corpus::new(ingested.events), &config)
        .map_err(|e| Error::data(&input.messages, e))?;
    let roster = roster.map(|r| r.0);
    if let Some(r) = &roster {
        warn_absent(r, &baseline);
    }
    manifest.push("nodes", baseline.graph.node_count());
    manifest.push("arcs", baseline.summary.arc_count);
    Ok(Prepared {
        baseline,
        roster,
        config,
        manifest,
    })
}

fn detect(p: &Prepared, spam: &SpamArgs, out: &Path) -> Result<Option<SpamReport>> {
    if !spam.detect_spammers {
        return Ok(None);
    }
    let report = roles::detect_spammers(&p.baseline.metrics, &p.baseline.corpus, &spam.config())?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    write_file(out, "spam_verdicts.csv", &report::spam_verdicts(&report))?;
    Ok(Some(report))
}

fn analyze(a: &AnalyzeArgs, threads: &str) -> Result<()> {
    let mut p = prepare("analyze", &a.input, &a.metrics)?;
    p.manifest.spam(&a.spam);
    p.manifest.push("threads", threads);
    create_dir(&a.out)?;
    if let Some(report) = detect(&p, &a.spam, &a.out)? {
        p.manifest
            .push("spammers_detected", report.spammers().len());
    }
    write_file(
        &a.out,
        "node_metrics.csv",
        &report::node_metrics(&p.baseline.metrics),
    )?;
    write_file(
        &a.out,
        "network_summary.csv",
        &report::network_summary(&p.baseline.summary, &[]),
    )?;
    write_file(&a.out, "run_manifest.txt", &p.manifest.render())
}

fn stability(a: &StabilityArgs, threads: &str) -> Result<()> {
    let mut p = prepare("stability", &a.input, &a.metrics)?;
    p.manifest.spam(&a.spam);
    let tokens: Vec<String> = a.strategies.iter().map(|s| s.to_string()).collect();
    p.manifest.push("strategies", tokens.join(","));
    p.manifest.push("threads", threads);
    create_dir(&a.out)?;

    let mut labels = p
        .roster
        .as_ref()
        .map(Labels::from_roster)
        .unwrap_or_default();
    if let Some(report) = detect(&p, &a.spam, &a.out)? {
        labels.spammers = report.spammers().into_iter().map(String::from).collect();
        p.manifest.push("spammers_detected", labels.spammers.len());
    }
    for s in &a.strategies {
        for (kind, set, what) in [
            (
                Selector::Moderators,
                &labels.moderators,
                "moderator labels (supply --roster)",
            ),
            (
                Selector::Spammers,
                &labels.spammers,
                "spammer labels (supply --roster or --detect-spammers)",
            ),
        ] {
            if s.needs(kind) && set.iter().all(|id| p.baseline.graph.index_of(id).is_none()) {
                return Err(Error::Labels(format!(
                    "strategy `{s}` needs {what}, but none match a node"
                )));
            }
        }
    }

    let reports = experiments::stability_analysis(&p.baseline, &labels, &a.strategies, &p.config)?;
    write_file(
        &a.out,
        "network_summary.csv",
        &report::network_summary(&p.baseline.summary, &reports),
    )?;
    write_file(&a.out, "stability.csv", &report::stability(&reports))?;
    write_file(
        &a.out,
        "stability_detail.csv",
        &report::stability_detail(&reports),
    )?;
    write_file(&a.out, "run_manifest.txt", &p.manifest.render())
}

fn fingerprint(a: &FingerprintArgs, threads: &str) -> Result<()> {
    if a.roster.len() != 1 && a.roster.len() != a.messages.len() {
        return Err(Error::Usage(format!(
            "give one --roster, or one per --messages ({} messages, {} rosters)",
            a.messages.len(),
            a.roster.len()
        )));
    }
    let (config, lexicon_digest) = metrics_config(&a.metrics)?;
    let mut manifest = Manifest::new("fingerprint");
    let mut networks = Vec::new();
    for (i, path) in a.messages.iter().enumerate() {
        let roster_path = &a.roster[i.min(a.roster.len() - 1)];
        let (ingested, digest) = load_messages(path, a.format)?;
        let (roster, roster_digest) = format::read_roster(roster_path)?;
        let prefix = format!("network{}.", i + 1);
        manifest.input(&format!("{prefix}messages"), Some(path), Some(&digest));
        manifest.input(
            &format!("{prefix}roster"),
            Some(roster_path),
            Some(&roster_digest),
        );
        manifest.ingest(&prefix, &ingested);
        let baseline = Baseline::new(Corpus::new(ingested.events), &config)
            .map_err(|e| Error::data(path, e))?;
        warn_absent(&roster, &baseline);
        let moderators = roster
            .with_role(Role::Moderator)
            .into_iter()
            .filter(|m| baseline.graph.index_of(m).is_some())
            .count();
        if moderators < 2 {
            eprintln!(
                "warning: {}: {moderators} moderator node(s); t-tests need at least 2",
                path.display()
            );
        }
        networks.push((baseline, roster));
    }
    manifest.input(
        "lexicon",
        a.metrics.lexicon.as_deref(),
        lexicon_digest.as_deref(),
    );
    manifest.metrics(&a.metrics);
    manifest.push(
        "pooling",
        if networks.len() > 1 {
            "z-normalized per network"
        } else {
            "none"
        },
    );
    manifest.push("threads", threads);

    let fp = if networks.len() == 1 {
        roles::moderator_fingerprint(&networks[0].0.metrics, &networks[0].1)
    } else {
        let pairs: Vec<_> = networks.iter().map(|(b, r)| (&b.metrics, r)).collect();
        roles::moderator_fingerprint_pooled(&pairs)
    };
    let rankings: Vec<_> = networks
        .iter()
        .map(|(b, _)| roles::rank_moderator_candidates(&b.metrics))
        .collect();
    for (i, r) in rankings.iter().enumerate() {
        if !r.excluded.is_empty() {
            let names: Vec<&str> = r.excluded.iter().map(|m| m.name()).collect();
            eprintln!(
                "warning: network {}: constant metrics left out of the ranking: {}",
                i + 1,
                names.join(", ")
            );
        }
    }
    let labelled: Vec<_> = rankings
        .iter()
        .zip(&networks)
        .map(|(r, (_, roster))| (r, roster))
        .collect();

    create_dir(&a.out)?;
    write_file(&a.out, "fingerprint.csv", &report::fingerprint(&fp))?;
    write_file(&a.out, "candidates.csv", &report::candidates(&labelled))?;
    write_file(&a.out, "run_manifest.txt", &manifest.render())
}

fn synth_config(a: &GenerateArgs) -> Result<SynthConfig> {
    let mut config = SynthConfig::default();
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        synthcfg::apply_text(&mut config, &text).map_err(|reason| Error::format(path, reason))?;
    }
    for assignment in &a.set {
        synthcfg::assign(&mut config, assignment).map_err(Error::Usage)?;
    }
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    for (slot, value) in [
        (&mut config.n_users, a.n_users),
        (&mut config.n_messages, a.n_messages),
        (&mut config.n_moderators, a.n_moderators),
        (&mut config.n_spammers, a.n_spammers),
    ] {
        if let Some(v) = value {
            *slot = v;
        }
    }
    config.validate().map_err(|e| Error::Usage(e.to_string()))?;
    Ok(config)
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let config = synth_config(a)?;
    let (events, roster) = synth::generate_forum(&config)?;
    create_dir(&a.out)?;

    let name = format!("messages.{}", a.format.as_str());
    let mut log = Vec::new();
    format::write_messages(&mut log, &events, a.format)
        .map_err(|e| Error::io(&a.out.join(&name), e))?;
    let mut roster_csv = Vec::new();
    format::write_roster(&mut roster_csv, &roster)
        .map_err(|e| Error::io(&a.out.join("roster.csv"), e))?;
    let as_text = |b: Vec<u8>| String::from_utf8(b).expect("writers emit UTF-8");
    let (log, roster_csv) = (as_text(log), as_text(roster_csv));

    let settings = synthcfg::echo(&config);
    let mut manifest = Manifest::new("generate");
    manifest.0.extend(settings.iter().cloned());
    manifest.push("messages", &name);
    manifest.push("messages.sha256", format::sha256_hex(log.as_bytes()));
    manifest.push("roster", "roster.csv");
    manifest.push("roster.sha256", format::sha256_hex(roster_csv.as_bytes()));

    write_file(&a.out, &name, &log)?;
    write_file(&a.out, "roster.csv", &roster_csv)?;
    write_file(&a.out, "synth_config.txt", &report::key_values(&settings))?;
    write_file(&a.out, "run_manifest.txt", &manifest.render())?;
    println!("seed = {}", config.seed);
    Ok(())
}
