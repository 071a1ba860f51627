//! `npslab` command line: build schemes, audit them, apply transforms and run
//! the Monte Carlo experiments. All reports are written atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use npslab::access::{circuits_of_matrix, induced_by_matroid, AccessStructure};
use npslab::audit::{audit_with, AuditOptions, AuditReport};
use npslab::construct;
use npslab::dist::{set_atom_cap, JointDistribution, VarSet};
use npslab::experiments::{leak_distribution, splitting_concentration, Family, SplitLemmaParams};
use npslab::field::FieldSpec;
use npslab::json::{
    access_from_json, descriptor_to_json, dist_from_json, float_value, report_to_json,
    scheme_from_json, scheme_to_json,
};
use npslab::transform::{self, Splitting};
use npslab::{Error, Scheme};

#[derive(Parser, Debug)]
#[command(
    name = "npslab",
    version,
    about = "Perfect and non-perfect secret sharing laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a scheme and write its JSON form
    Build {
        #[command(subcommand)]
        kind: BuildKind,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Audit a scheme
    Audit {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Include every group in the report
        #[arg(long)]
        detail: bool,
    },
    /// Transform a scheme
    Transform {
        #[command(subcommand)]
        kind: TransformKind,
    },
    /// Run a Monte Carlo experiment
    Experiment {
        #[command(subcommand)]
        kind: ExperimentKind,
    },
    /// Dump the entropy profile of a distribution or scheme
    Profile {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Human,
}

#[derive(Subcommand, Debug)]
enum BuildKind {
    /// One-time pad for two participants
    Xor {
        #[arg(long, default_value_t = 1)]
        bits: u32,
    },
    /// Shamir threshold scheme
    Shamir {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        /// Field order: a prime or 2^m, m <= 8
        #[arg(long)]
        q: u32,
        /// Evaluation points, comma separated
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<u32>>,
    },
    /// Shamir scheme whose shares also carry the low bits of the secret
    LeakyShamir {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        leaked_bits: u32,
    },
    /// Linear scheme from column vectors
    Linear {
        /// Columns separated by `;`, entries by `,` (e.g. "1,0;1,1;1,2")
        #[arg(long)]
        columns: String,
        #[arg(long)]
        q: u32,
        /// 1-based index of the secret column
        #[arg(long, default_value_t = 1)]
        secret: usize,
        /// Access structure JSON; defaults to the structure induced through the secret column
        #[arg(long)]
        access: Option<PathBuf>,
    },
    /// Fano-matroid port scheme over GF(2^m)
    Fano {
        #[arg(long)]
        m: u32,
    },
    /// Non-Fano-matroid port scheme over GF(p)
    Nonfano {
        #[arg(long)]
        p: u32,
    },
    /// Replicated scheme for any access structure
    Replicated {
        #[command(flatten)]
        access: AccessArgs,
        #[arg(long, default_value_t = 1)]
        bits: u32,
    },
    /// Fano over GF(2^N) joined with a punctured non-Fano over GF(2^N + 1)
    NearlyIdeal {
        #[arg(long)]
        bits: u32,
    },
}

#[derive(Args, Debug)]
struct AccessArgs {
    /// Access structure JSON file
    #[arg(long, conflicts_with_all = ["n", "minimal"])]
    access: Option<PathBuf>,
    #[arg(long, requires = "minimal")]
    n: Option<usize>,
    /// Minimal sets separated by `;`, members by `,` (e.g. "1,2;2,3")
    #[arg(long, requires = "n")]
    minimal: Option<String>,
}

#[derive(Subcommand, Debug)]
enum TransformKind {
    /// Keep the 2^bits smallest secrets, made uniform
    Restrict {
        input: PathBuf,
        #[arg(long)]
        bits: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Parallel composition of independent copies
    ScaleUp {
        input: PathBuf,
        #[arg(long)]
        copies: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Hand every minimal authorized group its missing information
    Complete {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the descriptor codebooks
        #[arg(long)]
        descriptors: Option<PathBuf>,
    },
    /// Replace one share value of one participant
    Puncture {
        input: PathBuf,
        #[arg(long)]
        participant: usize,
        #[arg(long)]
        from: i64,
        #[arg(long)]
        to: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// One-bit reduction: with --k0 apply it, otherwise search random splittings
    Onebit {
        input: PathBuf,
        /// Secret values of K0, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k0: Option<Vec<i64>>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reduced scheme (with --k0) or best-splitting summary
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Per-trial CSV; printed to stdout when only --output is given
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Frequency table with M columns
    Table {
        input: PathBuf,
        #[arg(long)]
        columns: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ExperimentKind {
    /// Mass of a random half of a near-uniform distribution
    Splitting {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: f64,
        /// `auto` (k^(-3/4)) or a value in (0,1)
        #[arg(long, default_value = "auto")]
        gamma: String,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = DistFamily::NearUniform)]
        dist: DistFamily,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Leak statistics of random one-bit reductions
    LeakDist {
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistFamily {
    NearUniform,
    Uniform,
    Spike,
}

impl From<DistFamily> for Family {
    fn from(f: DistFamily) -> Family {
        match f {
            DistFamily::NearUniform => Family::NearUniform,
            DistFamily::Uniform => Family::Uniform,
            DistFamily::Spike => Family::Spike,
        }
    }
}

#[derive(Debug)]
enum Failure {
    /// Rejected input: exit code 2.
    Invalid(String),
    /// Invariant break or I/O failure: exit code 1.
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Internal(format!("{}: {e}", path.display()))
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, content: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_failure(path, e))?;
    tmp.write_all(content).map_err(|e| io_failure(path, e))?;
    tmp.persist(path).map_err(|e| io_failure(path, e.error))?;
    Ok(())
}

fn emit(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => write_atomic(p, content.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Internal(format!("stdout: {e}")))
        }
    }
}

fn emit_json(path: Option<&Path>, v: &Value) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    emit(path, &s)
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Invalid(format!("{}: invalid JSON: {e}", path.display())))
}

fn read_scheme(path: &Path) -> CliResult<Scheme> {
    Ok(scheme_from_json(&read_json(path)?)?)
}

fn read_dist(path: &Path) -> CliResult<JointDistribution> {
    Ok(dist_from_json(&read_json(path)?)?)
}

/// Parses "a,b;c,d" into nested integer lists.
fn parse_nested<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<Vec<T>>> {
    s.split(';')
        .map(|group| {
            group
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<T>()
                        .map_err(|_| Failure::Invalid(format!("bad {what} entry `{x}`")))
                })
                .collect()
        })
        .collect()
}

fn access_from_args(a: &AccessArgs) -> CliResult<AccessStructure> {
    match (&a.access, a.n, &a.minimal) {
        (Some(path), _, _) => Ok(access_from_json(&read_json(path)?)?),
        (None, Some(n), Some(m)) => {
            let sets: Vec<Vec<usize>> = parse_nested(m, "minimal set")?;
            Ok(AccessStructure::from_minimal(n, &sets)?)
        }
        _ => Err(Failure::Invalid(
            "give --access FILE or both --n and --minimal".into(),
        )),
    }
}

fn build(kind: &BuildKind) -> CliResult<Scheme> {
    Ok(match kind {
        BuildKind::Xor { bits } => construct::xor_scheme(*bits)?,
        BuildKind::Shamir { t, n, q, points } => {
            construct::shamir(*t, *n, &FieldSpec::from_order(*q)?, points.as_deref())?
        }
        BuildKind::LeakyShamir {
            t,
            n,
            q,
            leaked_bits,
        } => construct::leaky_shamir(*t, *n, &FieldSpec::from_order(*q)?, *leaked_bits)?,
        BuildKind::Linear {
            columns,
            q,
            secret,
            access,
        } => {
            let field = FieldSpec::from_order(*q)?;
            let cols: Vec<Vec<u32>> = parse_nested(columns, "column")?;
            let access = match access {
                Some(path) => access_from_json(&read_json(path)?)?,
                None => {
                    let circuits = circuits_of_matrix(&field, &cols)?;
                    induced_by_matroid(cols.len(), &circuits, *secret)?
                }
            };
            construct::linear_scheme(&field, &cols, *secret, access)?
        }
        BuildKind::Fano { m } => construct::fano_scheme(*m)?,
        BuildKind::Nonfano { p } => construct::nonfano_scheme(*p)?,
        BuildKind::Replicated { access, bits } => {
            construct::replicated_scheme(&access_from_args(access)?, *bits)?
        }
        BuildKind::NearlyIdeal { bits } => construct::nearly_ideal_scheme(*bits)?,
    })
}

fn human_report(r: &AuditReport) -> String {
    let f = |x: f64| float_value(x).to_string();
    let mut s = String::new();
    s.push_str(&format!(
        "N (secret entropy)      {}\n",
        f(r.secret_entropy)
    ));
    s.push_str(&format!(
        "S (max share entropy)   {}\n",
        f(r.max_share_entropy)
    ));
    s.push_str(&format!("rate                    {}\n", f(r.rate)));
    s.push_str(&format!(
        "epsilon1 (missing)      {}  worst {}\n",
        f(r.epsilon1),
        r.worst_authorized
    ));
    s.push_str(&format!(
        "epsilon2 (leak)         {}  worst {}\n",
        f(r.epsilon2),
        r.worst_forbidden
    ));
    s.push_str(&format!("perfect                 {}\n", r.perfect));
    s.push_str(&format!("ideal                   {}\n", r.ideal));
    for (p, (h, a)) in r.share_entropies.iter().zip(&r.share_alphabets).enumerate() {
        s.push_str(&format!(
            "share {:<3} H = {:<16} #values = {a}\n",
            p + 1,
            f(*h)
        ));
    }
    if let Some(detail) = &r.detail {
        for e in detail {
            s.push_str(&format!(
                "{:<20} {} missing {} leak {}\n",
                e.group.to_string(),
                if e.authorized {
                    "authorized"
                } else {
                    "forbidden "
                },
                f(e.missing),
                f(e.leak)
            ));
        }
    }
    s
}

fn csv_text(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| Failure::Internal(e.to_string()))?;
    for r in rows {
        w.write_record(&r)
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::Internal(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}

fn fmt_float(x: f64) -> String {
    float_value(x).to_string()
}

fn transform(kind: &TransformKind) -> CliResult<()> {
    match kind {
        TransformKind::Restrict {
            input,
            bits,
            output,
        } => {
            let s = transform::restrict_secret(&read_scheme(input)?, *bits)?;
            emit_json(output.as_deref(), &scheme_to_json(&s))
        }
        TransformKind::ScaleUp {
            input,
            copies,
            output,
        } => {
            let s = transform::parallel_compose(&read_scheme(input)?, *copies)?;
            emit_json(output.as_deref(), &scheme_to_json(&s))
        }
        TransformKind::Complete {
            input,
            output,
            descriptors,
        } => {
            let c = transform::complete_scheme(&read_scheme(input)?)?;
            if let Some(path) = descriptors {
                let list: Vec<Value> = c
                    .descriptors
                    .iter()
                    .map(|d| {
                        json!({
                            "group": d.group.members(),
                            "recipient": d.recipient,
                            "gamma_entropy": float_value(d.gamma_entropy),
                            "codebook": descriptor_to_json(&d.descriptor),
                        })
                    })
                    .collect();
                emit_json(Some(path), &Value::Array(list))?;
            }
            emit_json(output.as_deref(), &scheme_to_json(&c.scheme))
        }
        TransformKind::Puncture {
            input,
            participant,
            from,
            to,
            output,
        } => {
            let s =
                construct::puncture_share_value(&read_scheme(input)?, *participant, *from, *to)?;
            emit_json(output.as_deref(), &scheme_to_json(&s))
        }
        TransformKind::Onebit {
            input,
            k0,
            trials,
            seed,
            output,
            csv,
        } => {
            let s = read_scheme(input)?;
            if let Some(k0) = k0 {
                let reduced = transform::one_bit_reduction(&s, &Splitting::new(k0.clone()))?;
                return emit_json(output.as_deref(), &scheme_to_json(&reduced));
            }
            let search = transform::search_splitting(&s, *trials, *seed)?;
            let rows = search.trials.iter().map(|t| {
                vec![
                    t.index.to_string(),
                    fmt_float(t.eps_prime),
                    (t.eps_prime <= search.bound).to_string(),
                    t.data_processing_holds.to_string(),
                ]
            });
            let table = csv_text(
                &[
                    "trial",
                    "eps_prime",
                    "within_bound",
                    "data_processing_holds",
                ],
                rows,
            )?;
            let best = search.best_trial();
            let summary = json!({
                "trials": *trials,
                "seed": *seed,
                "epsilon": float_value(search.epsilon),
                "bound": float_value(search.bound),
                "fraction_within_bound": float_value(search.fraction_within_bound),
                "data_processing_holds": search.trials.iter().all(|t| t.data_processing_holds),
                "eps_primes": search.trials.iter().map(|t| float_value(t.eps_prime)).collect::<Vec<_>>(),
                "best": {
                    "trial": best.index,
                    "eps_prime": float_value(best.eps_prime),
                    "worst_forbidden": best.worst_forbidden.members(),
                    "k0": best.splitting.k0(),
                },
            });
            // Without --csv the table goes to stdout only when the summary has a file.
            match (csv, output) {
                (Some(path), _) => emit(Some(path), &table)?,
                (None, Some(_)) => emit(None, &table)?,
                (None, None) => {}
            }
            emit_json(output.as_deref(), &summary)
        }
        TransformKind::Table {
            input,
            columns,
            output,
        } => {
            let d = read_dist(input)?;
            let t = transform::materialize_table(&d, *columns)?;
            let v = json!({
                "vars": d.names(),
                "columns": *columns,
                "widths": t.widths,
                "counts": t.counts,
                "rows": t.rows,
            });
            emit_json(output.as_deref(), &v)
        }
    }
}

fn experiment(kind: &ExperimentKind) -> CliResult<()> {
    match kind {
        ExperimentKind::Splitting {
            k,
            delta,
            gamma,
            trials,
            seed,
            dist,
            output,
            csv,
        } => {
            let gamma = match gamma.as_str() {
                "auto" => None,
                g => Some(g.parse::<f64>().map_err(|_| {
                    Failure::Invalid(format!("--gamma must be `auto` or a number, got `{g}`"))
                })?),
            };
            let params = SplitLemmaParams::new(*k, *delta, gamma, *trials, *seed)?;
            let family: Family = (*dist).into();
            let r = splitting_concentration(&family.weights(*k), &params)?;
            let max_dev = r.deviations.iter().copied().fold(0.0, f64::max);
            let summary = json!({
                "k": *k,
                "delta": float_value(*delta),
                "gamma": float_value(params.gamma),
                "tau": float_value(r.tau),
                "bound": float_value(r.bound),
                "entropy": float_value(r.entropy),
                "p_gamma": float_value(r.p_gamma),
                "heavy_mass_bound": float_value(r.heavy_mass_bound),
                "trials": *trials,
                "seed": *seed,
                "empirical_success_rate": float_value(r.empirical_success_rate),
                "max_deviation": float_value(max_dev),
            });
            if let Some(path) = csv {
                let rows = r
                    .deviations
                    .iter()
                    .zip(&r.successes)
                    .enumerate()
                    .map(|(i, (d, ok))| vec![i.to_string(), fmt_float(*d), ok.to_string()]);
                emit(
                    Some(path),
                    &csv_text(&["trial", "deviation", "success"], rows)?,
                )?;
            }
            emit_json(output.as_deref(), &summary)
        }
        ExperimentKind::LeakDist {
            input,
            trials,
            seed,
            output,
            csv,
        } => {
            let stats = leak_distribution(&read_scheme(input)?, *trials, *seed)?;
            if let Some(path) = csv {
                let rows = stats
                    .eps_primes
                    .iter()
                    .enumerate()
                    .map(|(i, e)| vec![i.to_string(), fmt_float(*e)]);
                emit(Some(path), &csv_text(&["trial", "eps_prime"], rows)?)?;
            }
            let summary = json!({
                "trials": *trials,
                "seed": *seed,
                "epsilon": float_value(stats.epsilon),
                "bound": float_value(stats.bound),
                "min": float_value(stats.min),
                "median": float_value(stats.median),
                "max": float_value(stats.max),
                "fraction_within_bound": float_value(stats.fraction_within_bound),
                "data_processing_holds": stats.data_processing_holds,
                "eps_primes": stats.eps_primes.iter().map(|&e| float_value(e)).collect::<Vec<_>>(),
            });
            emit_json(output.as_deref(), &summary)
        }
    }
}

fn profile(input: &Path, output: Option<&Path>) -> CliResult<()> {
    let d = read_dist(input)?;
    let h = d.entropy_profile()?;
    let entries: Vec<Value> = h
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let vars = VarSet(i as u64 + 1);
            let names: Vec<&str> = vars
                .indices()
                .iter()
                .map(|&v| d.names()[v].as_str())
                .collect();
            json!({"vars": names, "H": float_value(x)})
        })
        .collect();
    emit_json(output, &json!({"vars": d.names(), "profile": entries}))
}

fn apply_env() -> CliResult<()> {
    if let Ok(v) = std::env::var("NPSLAB_ATOM_CAP") {
        let cap: usize = v
            .trim()
            .parse()
            .map_err(|_| Failure::Invalid(format!("NPSLAB_ATOM_CAP=`{v}` is not a count")))?;
        set_atom_cap(cap);
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    apply_env()?;
    match &cli.command {
        Command::Build { kind, output } => {
            emit_json(output.as_deref(), &scheme_to_json(&build(kind)?))
        }
        Command::Audit {
            input,
            output,
            format,
            detail,
        } => {
            let s = read_scheme(input)?;
            let r = audit_with(
                &s,
                AuditOptions {
                    detail: *detail,
                    ..Default::default()
                },
            )?;
            match format {
                Format::Json => emit_json(output.as_deref(), &report_to_json(&r)),
                Format::Human => emit(output.as_deref(), &human_report(&r)),
            }
        }
        Command::Transform { kind } => transform(kind),
        Command::Experiment { kind } => experiment(kind),
        Command::Profile { input, output } => profile(input, output.as_deref()),
    }
}

/// Runs the command line; returns the process exit code (0 success,
/// 2 rejected input, 1 internal or I/O failure).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            1
        }
    }
}
