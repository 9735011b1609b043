//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check came back negative, 2 bad input or
//! usage, 3 the domain fails the richness check, 4 TTC is not unique, 5 a
//! search budget ran out.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::axioms::{check_mechanism, Axiom};
use crate::domains::{self, LinearOrderSpec, PartialOrderSpec};
use crate::error::{Error, Result};
use crate::mechanisms::{build_diff_mechanism, build_necessity_counterexample, Counterexample, Mechanism, TableMechanism};
use crate::model::{domain_from_json, domain_to_json, emit_domain, Domain, Preference, Profile, ProfileSpace};
use crate::richness::{check_top_k, check_top_two};
use crate::ttc::{ttc, ttc_trace};
use crate::verifier::{
    classify, classify_cached, verify_corollary, Classification, Efficiency, ResultsCache, SearchBudget, Status,
    DEFAULT_NODE_BUDGET, DEFAULT_PROFILE_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILS_RICHNESS: i32 = 3;
pub const EXIT_MULTIPLE: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;

pub const CACHE_ENV: &str = "TTC_LAB_CACHE";

#[derive(Parser, Debug)]
#[command(name = "ttc-lab", version, about = "Top trading cycles and TTC-domain verification")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate or check preference domains.
    #[command(subcommand)]
    Domain(DomainCmd),
    /// Run top trading cycles.
    #[command(subcommand)]
    Ttc(TtcCmd),
    /// Check a mechanism against the axioms.
    #[command(subcommand)]
    Axioms(AxiomsCmd),
    /// Build or evaluate mechanisms.
    #[command(subcommand)]
    Mech(MechCmd),
    /// Decide whether TTC is the unique mechanism.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DomainKind {
    Unrestricted,
    Sp,
    Sp2,
    Sd,
    Circular,
    Pa,
}

#[derive(Subcommand, Debug)]
pub enum DomainCmd {
    Gen(GenArgs),
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: DomainKind,
    #[arg(long)]
    pub n: usize,
    /// Axis or cycle as a preference string, e.g. 2134. Defaults to 12..n.
    #[arg(long)]
    pub axis: Option<String>,
    /// Peak position for sp2, in 1..n-1.
    #[arg(long)]
    pub peak: Option<usize>,
    /// Partial order edges for pa, e.g. "1>3,2>4".
    #[arg(long)]
    pub edges: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
}

#[derive(Subcommand, Debug)]
pub enum TtcCmd {
    Run(TtcRunArgs),
}

#[derive(Args, Debug)]
pub struct TtcRunArgs {
    /// JSON list like '["231","123","123"]' or a comma list.
    #[arg(long)]
    pub profile: String,
    #[arg(long)]
    pub trace: bool,
}

#[derive(Subcommand, Debug)]
pub enum AxiomsCmd {
    Check(AxiomsCheckArgs),
}

#[derive(Args, Debug)]
pub struct AxiomsCheckArgs {
    /// ttc, endowment, table:FILE or diff:DOMAIN_FILE.
    #[arg(long)]
    pub mech: String,
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long, default_value = "ir,pair,sp")]
    pub axioms: String,
}

#[derive(Subcommand, Debug)]
pub enum MechCmd {
    BuildCounterexample(BuildArgs),
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// A table file, or ttc, endowment, table:FILE, diff:DOMAIN_FILE.
    #[arg(long)]
    pub mech: String,
    #[arg(long)]
    pub profile: String,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    Classify(ClassifyArgs),
    Corollary(CorollaryArgs),
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Common domain of every agent.
    #[arg(long, required_unless_present = "hetero", conflicts_with = "hetero")]
    pub domain: Option<PathBuf>,
    /// One domain file per agent, in agent order.
    #[arg(long, num_args = 1..)]
    pub hetero: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = EfficiencyArg::Pair)]
    pub efficiency: EfficiencyArg,
    /// Node budget for the search.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = DEFAULT_PROFILE_CAP)]
    pub profile_cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Results cache; TTC_LAB_CACHE takes precedence.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EfficiencyArg {
    Pair,
    Pareto,
}

impl From<EfficiencyArg> for Efficiency {
    fn from(e: EfficiencyArg) -> Self {
        match e {
            EfficiencyArg::Pair => Efficiency::Pair,
            EfficiencyArg::Pareto => Efficiency::Pareto,
        }
    }
}

#[derive(Args, Debug)]
pub struct CorollaryArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let rendered = e.render().to_string();
            let _ = write!(err, "{rendered}");
            if !rendered.contains("Usage:") {
                let _ = writeln!(err, "\n{}", Cli::command().render_usage());
            }
            return EXIT_USAGE;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Budget(_) => EXIT_BUDGET,
                _ => EXIT_USAGE,
            }
        }
    }
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let fmt = cli.format;
    match &cli.command {
        Command::Domain(DomainCmd::Gen(a)) => domain_gen(a, fmt, out),
        Command::Domain(DomainCmd::Check(a)) => domain_check(a, fmt, out),
        Command::Ttc(TtcCmd::Run(a)) => ttc_run(a, fmt, out),
        Command::Axioms(AxiomsCmd::Check(a)) => axioms_check(a, fmt, out),
        Command::Mech(MechCmd::BuildCounterexample(a)) => build_counterexample(a, fmt, out),
        Command::Mech(MechCmd::Eval(a)) => mech_eval(a, fmt, out),
        Command::Verify(VerifyCmd::Classify(a)) => verify_classify(a, fmt, out),
        Command::Verify(VerifyCmd::Corollary(a)) => verify_corollary_cmd(a, fmt, out),
    }
}

fn emit(out: &mut dyn Write, s: &str) -> Result<()> {
    writeln!(out, "{s}")?;
    Ok(())
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut s = contents.to_string();
    if !s.ends_with('\n') {
        s.push('\n');
    }
    std::fs::write(path, s).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_domain(path: &Path) -> Result<Domain> {
    domain_from_json(&read_to_string(path)?)
}

/// A JSON list of preference strings, or a comma/space separated list.
pub fn parse_profile(s: &str) -> Result<Profile> {
    let t = s.trim();
    let prefs: Vec<Preference> = if t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| Error::Format(e.to_string()))?
    } else {
        t.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?
    };
    Profile::new(prefs)
}

fn order_spec(n: usize, axis: Option<&str>, cyclic: bool) -> Result<LinearOrderSpec> {
    match axis {
        None => Ok(LinearOrderSpec::identity(n, cyclic)),
        Some(s) => {
            let p: Preference = s.parse()?;
            if p.n() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: p.n(),
                });
            }
            Ok(LinearOrderSpec::new(&p, cyclic))
        }
    }
}

fn generate(a: &GenArgs) -> Result<Domain> {
    let n = a.n;
    let axis = a.axis.as_deref();
    match a.kind {
        DomainKind::Unrestricted => domains::unrestricted(n),
        DomainKind::Sp => domains::single_peaked(n, &order_spec(n, axis, false)?),
        DomainKind::Sp2 => {
            let p = a
                .peak
                .ok_or_else(|| Error::Format("--kind sp2 needs --peak".into()))?;
            domains::single_peaked_two_adjacent(n, &order_spec(n, axis, false)?, p)
        }
        DomainKind::Sd => domains::single_dipped(n, &order_spec(n, axis, false)?),
        DomainKind::Circular => domains::circular(n, &order_spec(n, axis, true)?),
        DomainKind::Pa => {
            let spec = PartialOrderSpec::parse(n, a.edges.as_deref().unwrap_or(""))?;
            domains::partial_agreement(n, &spec)
        }
    }
}

fn domain_gen(a: &GenArgs, fmt: OutputFormat, out: &mut dyn Write) -> Result<i32> {
    let d = generate(a)?;
    let text = match fmt {
        OutputFormat::Json => domain_to_json(&d),
        OutputFormat::Text => emit_domain(&d),
    };
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => emit(out, text.trim_end())?,
    }
    Ok(EXIT_OK)
}

fn domain_check(a: &CheckArgs, fmt: OutputFormat, out: &mut dyn Write) -> Result<i32> {
    let d = read_domain(&a.input)?;
    let (satisfied, json, text) = if a.k == 2 {
        let r = check_top_two(&d);
        let lines: Vec<String> = r
            .failures
            .iter()
            .map(|f| format!("  no preference ranks {} then {} within {}", f.a, f.b, f.subset))
            .collect();
        (r.satisfied, pretty(&r), lines)
    } else {
        let r = check_top_k(&d, a.k)?;
        let lines: Vec<String> = r
            .failures
            .iter()
            .map(|f| {
                let t: Vec<String> = f.tuple.iter().map(|o| o.to_string()).collect();
                format!("  no preference ranks {} first within {}", t.join(" "), f.subset)
            })
            .collect();
        (r.satisfied, pretty(&r), lines)
    };
    match fmt {
        OutputFormat::Json => emit(out, &json)?,
        OutputFormat::Text => {
            let verdict = if satisfied { "satisfied" } else { "fails" };
            emit(out, &format!("top-{} condition: {verdict}", a.k))?;
            for l in text {
                emit(out, &l)?;
            }
        }
    }
    Ok(if satisfied { EXIT_OK } else { EXIT_FAILS_RICHNESS })
}

fn ttc_run(a: &TtcRunArgs, fmt: OutputFormat, out: &mut dyn Write) -> Result<i32> {
    let p = parse_profile(&a.profile)?;
    let trace = ttc_trace(&p);
    match fmt {
        OutputFormat::Json => {
            let mut v = json!({ "allocation": trace.result.to_string() });
            if a.trace {
                v["trace"] = serde_json::to_value(&trace.rounds).expect("trace serializes");
            }
            emit(out, &pretty(&v))?;
        }
        OutputFormat::Text => {
            emit(out, &trace.result.to_string())?;
            if a.trace {
                for (k, round) in trace.rounds.iter().enumerate() {
                    let cycles: Vec<String> = round
                        .cycles
                        .iter()
                        .map(|c| {
                            let ids: Vec<String> = c.iter().map(|a| a.get().to_string()).collect();
                            format!("({})", ids.join(" "))
                        })
                        .collect();
                    emit(out, &format!("round {}: {}", k + 1, cycles.join(" ")))?;
                }
            }
        }
    }
    Ok(EXIT_OK)
}

/// Resolves `ttc`, `endowment`, `table:FILE`, `diff:DOMAIN_FILE`, or a bare
/// table file path.
pub fn load_mechanism(spec: &str) -> Result<Mechanism> {
    match spec {
        "ttc" => Ok(Mechanism::Ttc),
        "endowment" => Ok(Mechanism::Endowment),
        _ => {
            if let Some(path) = spec.strip_prefix("table:") {
                load_table(Path::new(path))
            } else if let Some(path) = spec.strip_prefix("diff:") {
                build_diff_mechanism(&read_domain(Path::new(path))?)
            } else {
                load_table(Path::new(spec))
            }
        }
    }
}

fn load_table(path: &Path) -> Result<Mechanism> {
    Ok(Mechanism::Table(TableMechanism::from_json(&read_to_string(path)?)?))
}

fn axioms_check(a: &AxiomsCheckArgs, fmt: OutputFormat, out: &mut dyn Write) -> Result<i32> {
    let mech = load_mechanism(&a.mech)?;
    let d = read_domain(&a.domain)?;
    let axioms = Axiom::parse_list(&a.axioms)?;
    let report = check_mechanism(&mech, &vec![d.clone(); d.n()], &axioms)?;
    match fmt {
        OutputFormat::Json => emit(out, &pretty(&report))?,
        OutputFormat::Text => {
            emit(out, &format!("{} over {} profiles", report.mechanism, report.profiles))?;
            for r in &report.results {
                let verdict = if r.holds { "holds" } else { "violated" };
                emit(out, &format!("  {:<6} {verdict}", r.axiom.to_string()))?;
                if let Some(v) = &r.violation {
                    emit(out, &format!("         {}", serde_json::to_string(v).expect("violation serializes")))?;
                }
            }
        }
    }
    Ok(if report.clean { EXIT_OK } else { EXIT_NEGATIVE })
}

fn build_counterexample(a: &BuildArgs, fmt: OutputFormat, out: &mut dyn Write) -> Result<i32> {
    let d = read_domain(&a.domain)?;
    let c = build_necessity_counterexample(&d);
    let (kind, detail) = match &c {
        Counterexample::SatisfiesTopTwo => ("satisfies_top_two", None),
        Counterexample::Diff(_) => ("diff", None),
        Counterexample::Lifted(_) => ("lifted", None),
        Counterexample::OutOfScope(why) => ("out_of_scope", Some(why.clone())),
    };
    let mut summary = json!({ "kind": kind });
    if let Some(why) = &detail {
        summary["reason"] = json!(why);
    }
    let code = match c.mechanism() {
        Some(m) => {
            let table = m.to_table(&ProfileSpace::homogeneous(&d))?;
            summary["profiles"] = json!(table.len());
            match &a.out {
                Some(path) => {
                    write_file(path, &table.to_json())?;
                    summary["out"] = json!(path.display().to_string());
                }
                None => summary["table"] = serde_json::to_value(&table).expect("table serializes"),
            }
            EXIT_OK
        }
        None => EXIT_NEGATIVE,
    };
    match fmt {
        OutputFormat::Json => emit(out, &pretty(&summary))?,
        OutputFormat::Text => {
            let mut line = format!("counterexample: {kind}");
            if let Some(n) = summary.get("profiles") {
                line.push_str(&format!(", {n} profiles"));
            }
            if let Some(why) = detail {
                line.push_str(&format!(" ({why})"));
            }
            emit(out, &line)?;
        }
    }
    Ok(code)
}

fn mech_eval(a: &EvalArgs, fmt: OutputFormat, out: &mut dyn Write) -> Result<i32> {
    let mech = load_mechanism(&a.mech)?;
    let p = parse_profile(&a.profile)?;
    let x = mech.evaluate(&p)?;
    match fmt {
        OutputFormat::Json => emit(
            out,
            &pretty(&json!({ "allocation": x.to_string(), "ttc": ttc(&p).to_string() })),
        )?,
        OutputFormat::Text => emit(out, &x.to_string())?,
    }
    Ok(EXIT_OK)
}

/// Where the witness table of a classify report goes: `report.json`
/// becomes `report.witness.json`.
pub fn witness_path(report: &Path) -> PathBuf {
    let stem = report
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    report.with_file_name(format!("{stem}.witness.json"))
}

fn cache_path(flag: Option<&Path>) -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| flag.map(Path::to_path_buf))
}

fn verify_classify(a: &ClassifyArgs, fmt: OutputFormat, out: &mut dyn Write) -> Result<i32> {
    let domains = match &a.domain {
        Some(path) => {
            let d = read_domain(path)?;
            vec![d.clone(); d.n()]
        }
        None => a.hetero.iter().map(|p| read_domain(p)).collect::<Result<Vec<_>>>()?,
    };
    let efficiency: Efficiency = a.efficiency.into();
    let budget = SearchBudget {
        profile_cap: a.profile_cap,
        nodes: a.budget,
    };
    let (c, cached) = match cache_path(a.cache.as_deref()) {
        Some(path) => {
            let mut cache = ResultsCache::open(&path)?;
            let (c, hit) = classify_cached(&mut cache, &domains, efficiency, budget)?;
            if !hit {
                cache.save()?;
            }
            (c, hit)
        }
        None => (classify(&domains, efficiency, budget)?, false),
    };
    let mut report = json!({
        "status": c.status_name(),
        "efficiency": efficiency,
        "stats": c.stats,
        "cached": cached,
    });
    if let Status::Budget { reason } = &c.status {
        report["reason"] = json!(reason);
    }
    let witness = c.witness();
    match (&a.out, witness) {
        (Some(path), Some(w)) => {
            let wp = witness_path(path);
            write_file(&wp, &w.to_json())?;
            report["witness"] = json!(wp.display().to_string());
        }
        (None, Some(w)) => report["witness"] = serde_json::to_value(w).expect("table serializes"),
        (_, None) => report["witness"] = Value::Null,
    }
    if let Some(path) = &a.out {
        write_file(path, &pretty(&report))?;
    }
    match fmt {
        OutputFormat::Json => emit(out, &pretty(&report))?,
        OutputFormat::Text => emit(out, &classification_line(&c))?,
    }
    Ok(match c.status {
        Status::UniqueTtc => EXIT_OK,
        Status::Multiple { .. } => EXIT_MULTIPLE,
        Status::Budget { .. } => EXIT_BUDGET,
    })
}

fn classification_line(c: &Classification) -> String {
    let what = match &c.status {
        Status::UniqueTtc => "TTC is the unique mechanism".to_string(),
        Status::Multiple { witness } => {
            let differing = witness
                .entries()
                .iter()
                .filter(|(p, x)| ttc(p) != *x)
                .count();
            format!("another mechanism exists; it differs from TTC at {differing} profiles")
        }
        Status::Budget { reason } => format!("inconclusive: {reason}"),
    };
    format!("{what} ({} profiles, {} nodes)", c.stats.profiles, c.stats.nodes)
}

fn verify_corollary_cmd(a: &CorollaryArgs, fmt: OutputFormat, out: &mut dyn Write) -> Result<i32> {
    let budget = SearchBudget {
        profile_cap: DEFAULT_PROFILE_CAP,
        nodes: a.budget,
    };
    let report = verify_corollary(a.n, a.jobs, budget)?;
    let json = pretty(&report);
    if let Some(path) = &a.out {
        write_file(path, &json)?;
    }
    match fmt {
        OutputFormat::Json => emit(out, &json)?,
        OutputFormat::Text => {
            for r in &report.rows {
                let mark = if r.consistent { "ok  " } else { "FAIL" };
                emit(
                    out,
                    &format!(
                        "{mark} {:<42} top-two={:<5} pair={:?} pareto={:?}",
                        r.label, r.top_two, r.pair, r.pareto
                    ),
                )?;
            }
            emit(
                out,
                &format!(
                    "{} domains, all consistent: {}, inconclusive: {}",
                    report.rows.len(),
                    report.all_consistent,
                    report.inconclusive
                ),
            )?;
        }
    }
    Ok(if !report.all_consistent {
        EXIT_NEGATIVE
    } else if report.inconclusive > 0 {
        EXIT_BUDGET
    } else {
        EXIT_OK
    })
}
