use std::fmt;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mds_pir::analysis::{self, Figure};
use mds_pir::code::CodeDescriptor;
use mds_pir::field::FieldSpec;
use mds_pir::pir::{DownloadTally, QueryMatrix, SystemParams, DEFAULT_ENUMERATION_CAP};
use mds_pir::sim::Cluster;
use mds_pir::snapshot;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Private retrieval from MDS array-coded storage.
#[derive(Parser)]
#[command(name = "mds-pir", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode M files into a cluster snapshot directory.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        m: usize,
        /// Files to store; random files of full capacity when omitted.
        #[arg(long, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Snapshot directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Privately retrieve one file from a snapshot.
    Retrieve {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        theta: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed query matrix, rows separated by ';', e.g. "0,2,4;1,3,0".
        #[arg(long)]
        query: Option<String>,
        #[arg(long, default_value_t = 1)]
        sessions: u64,
        /// Where to write the retrieved bytes.
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure download cost and compare the rate with capacity.
    BenchRate {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        /// Sessions in monte-carlo mode.
        #[arg(long, default_value_t = 100_000)]
        sessions: u64,
        #[arg(long, default_value_t = 0)]
        theta: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest query space exhaustive mode will enumerate.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Protocol comparison table, ordering checks or figure sweeps as CSV.
    Compare {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = analysis::FIGURE_FILES)]
        m: u32,
        /// Grouping factor of the epsilon-MSR row.
        #[arg(long, default_value_t = 2)]
        s: u64,
        /// Figure 1-8, or "all" to write one CSV per figure into --out.
        #[arg(long)]
        figure: Option<String>,
        /// N range for figure sweeps, "start:end".
        #[arg(long)]
        sweep: Option<String>,
        /// Emit ordering checks instead of the table.
        #[arg(long)]
        checks: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild one shard of a snapshot from the others.
    Repair {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        failed: usize,
        /// Comma-separated helper servers; all other live servers by default.
        #[arg(long)]
        helpers: Option<String>,
    },
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long, value_enum, default_value_t = Family::StackedRs)]
    code: Family,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    alpha: Option<usize>,
    /// Field width in bits; smallest with 2^w > N by default.
    #[arg(long)]
    w: Option<u8>,
    /// EVENODD prime.
    #[arg(long)]
    p: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    StackedRs,
    Evenodd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    MonteCarlo,
}

/// Invalid invocation, reported with exit code 1.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

macro_rules! usage {
    ($($arg:tt)*) => { anyhow::Error::new(Usage(format!($($arg)*))) };
}

fn is_odd_prime(p: usize) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl CodeArgs {
    fn descriptor(&self) -> Result<CodeDescriptor> {
        let k = self.k;
        match self.code {
            Family::StackedRs => {
                let n = self.n.ok_or_else(|| usage!("--n is required for stacked-rs"))?;
                if self.p.is_some() {
                    return Err(usage!("--p applies only to evenodd"));
                }
                let w = match self.w {
                    Some(w) => w,
                    None => FieldSpec::exceeding(n).map_err(|e| usage!("{e}"))?.width(),
                };
                Ok(CodeDescriptor::StackedRs {
                    n,
                    k,
                    alpha: self.alpha.unwrap_or(1),
                    w,
                })
            }
            Family::Evenodd => {
                if let Some(n) = self.n.filter(|&n| n != k + 2) {
                    return Err(usage!("evenodd needs N = K + 2, got N = {n}, K = {k}"));
                }
                if let Some(w) = self.w.filter(|&w| w != 1) {
                    return Err(usage!("evenodd works over GF(2), got --w {w}"));
                }
                let p = match (self.p, self.alpha) {
                    (Some(p), Some(a)) if a + 1 != p => {
                        return Err(usage!("evenodd has alpha = p - 1, got alpha = {a}, p = {p}"))
                    }
                    (Some(p), _) => p,
                    (None, Some(a)) => a + 1,
                    (None, None) => (k.max(3)..).find(|&p| is_odd_prime(p)).expect("primes are unbounded"),
                };
                if !is_odd_prime(p) || p < k {
                    return Err(usage!("evenodd needs an odd prime p >= K, got p = {p}"));
                }
                Ok(CodeDescriptor::EvenOdd { k, p })
            }
        }
    }

    fn params(&self, m: usize) -> Result<(CodeDescriptor, SystemParams)> {
        let desc = self.descriptor()?;
        let code = desc.build().map_err(|e| usage!("{e}"))?;
        let params = SystemParams::for_code(code, m).map_err(|e| usage!("{e}"))?;
        Ok((desc, params))
    }
}

fn decimal<T: ToPrimitive>(x: &T) -> String {
    x.to_f64().unwrap_or(f64::NAN).to_string()
}

fn random_files(params: &SystemParams, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = Cluster::file_byte_capacity(params);
    (0..params.m()).map(|_| (0..len).map(|_| rng.random()).collect()).collect()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("part");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_list(text: &str, what: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| usage!("bad {what} entry {t:?}")))
        .collect()
}

fn encode(code: &CodeArgs, m: usize, inputs: &[PathBuf], seed: u64, out: &Path) -> Result<()> {
    let (desc, params) = code.params(m)?;
    let files = if inputs.is_empty() {
        random_files(&params, seed)
    } else {
        if inputs.len() != m {
            return Err(usage!("--m {m} but {} input files", inputs.len()));
        }
        inputs
            .iter()
            .map(|p| fs::read(p).with_context(|| format!("reading {}", p.display())))
            .collect::<Result<_>>()?
    };
    let lengths = files.iter().map(Vec::len).collect();
    let cluster = Cluster::ingest(params, &files)?;
    let manifest = snapshot::write_snapshot(out, &cluster, &desc, lengths)?;
    println!(
        "{}",
        serde_json::json!({
            "snapshot": out,
            "code": desc.to_string(),
            "m": manifest.m,
            "file_len": manifest.file_len,
            "file_byte_capacity": Cluster::file_byte_capacity(cluster.params()),
            "shards": manifest.shards.len(),
        })
    );
    Ok(())
}

fn retrieve(dir: &Path, theta: usize, seed: u64, query: Option<&str>, sessions: u64, out: &Path) -> Result<()> {
    let (manifest, cluster) = snapshot::load_cluster(dir)?;
    let params = cluster.params();
    if theta >= params.m() {
        return Err(usage!("--theta {theta} out of range, snapshot holds {} files", params.m()));
    }
    let forced = query
        .map(|q| {
            let rows = q.split(';').map(|r| parse_list(r, "query")).collect::<Result<Vec<_>>>()?;
            QueryMatrix::from_rows(params, &rows).map_err(|e| usage!("{e}"))
        })
        .transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut result: Option<Vec<u16>> = None;
    for _ in 0..sessions.max(1) {
        let (file, report) = match &forced {
            Some(q) => cluster.retrieve_with_query(theta, q)?,
            None => cluster.retrieve(theta, &mut rng)?,
        };
        println!("{}", report.to_json_line());
        if !report.ok {
            bail!("session {} download disagrees with its query", report.session_id);
        }
        if result.get_or_insert_with(|| file.as_symbols().to_vec()) != file.as_symbols() {
            bail!("sessions decoded different contents");
        }
    }
    let symbols = result.expect("at least one session");
    let mut bytes = mds_pir::bits::symbols_to_bytes(&symbols, params.field().width());
    bytes.truncate(manifest.file_bytes[theta]);
    write_atomic(out, &bytes)
}

#[allow(clippy::too_many_arguments)]
fn bench_rate(
    code: &CodeArgs,
    m: usize,
    mode: Mode,
    sessions: u64,
    theta: usize,
    seed: u64,
    cap: u128,
    out: Option<&Path>,
) -> Result<()> {
    let (desc, params) = code.params(m)?;
    if theta >= m {
        return Err(usage!("--theta {theta} out of range for M = {m}"));
    }
    let files = random_files(&params, seed);
    let cluster = Cluster::ingest(params.clone(), &files)?;
    let tally = match mode {
        Mode::Exhaustive => {
            let size = params.omega_size().unwrap_or(u128::MAX);
            if size > cap {
                return Err(usage!("query space has {size} matrices, above --cap {cap}"));
            }
            cluster.enumerate_sessions(theta, cap)?
        }
        Mode::MonteCarlo => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let mut tally = DownloadTally::default();
            for _ in 0..sessions {
                let (_, report) = cluster.retrieve(theta, &mut rng)?;
                if !report.ok {
                    bail!("session {} download disagrees with its query", report.session_id);
                }
                tally.record(report.total);
            }
            tally
        }
    };
    let mean = tally.mean().ok_or_else(|| usage!("--sessions must be positive"))?;
    let (n, k) = (params.n() as u64, params.k() as u64);
    let rate = analysis::empirical_rate(params.file_len() as u64, &mean)?;
    let capacity = analysis::capacity_mds(n, k, m as u32)?;
    let rel = (&rate - &capacity) / &capacity;
    let mut w = csv::Writer::from_writer(output(out)?);
    w.write_record([
        "N",
        "K",
        "M",
        "alpha",
        "code",
        "mode",
        "sessions",
        "mean_download",
        "empirical_rate",
        "empirical_rate_decimal",
        "capacity",
        "capacity_decimal",
        "relative_error",
    ])?;
    w.write_record([
        n.to_string(),
        k.to_string(),
        m.to_string(),
        params.alpha().to_string(),
        desc.to_string(),
        match mode {
            Mode::Exhaustive => "exhaustive",
            Mode::MonteCarlo => "monte-carlo",
        }
        .to_string(),
        tally.sessions.to_string(),
        mean.to_string(),
        rate.to_string(),
        decimal(&rate),
        capacity.to_string(),
        decimal(&capacity),
        decimal(&rel),
    ])?;
    w.flush()?;
    Ok(())
}

fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<u64>> {
    let (a, b) = text.split_once(':').ok_or_else(|| usage!("--sweep expects start:end"))?;
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| usage!("bad --sweep bound {t:?}"));
    Ok(parse(a)?..=parse(b)?)
}

#[allow(clippy::too_many_arguments)]
fn compare(
    n: Option<u64>,
    k: Option<u64>,
    m: u32,
    s: u64,
    figure: Option<&str>,
    sweep: Option<&str>,
    checks: bool,
    out: Option<&Path>,
) -> Result<()> {
    if let Some(fig) = figure {
        let range = sweep.map(parse_range).transpose()?;
        if fig == "all" {
            let dir = out.ok_or_else(|| usage!("--figure all needs --out DIR"))?;
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for f in Figure::all() {
                let path = dir.join(format!("figure-{}.csv", f.id));
                let r = range.clone().unwrap_or_else(|| f.default_range());
                analysis::write_figure_csv(f, r, File::create(&path)?)?;
            }
            return Ok(());
        }
        let id: u8 = fig.parse().map_err(|_| usage!("--figure expects 1-8 or all"))?;
        let f = Figure::new(id).map_err(|e| usage!("{e}"))?;
        let r = range.unwrap_or_else(|| f.default_range());
        return Ok(analysis::write_figure_csv(f, r, output(out)?)?);
    }
    let (n, k) = n.zip(k).ok_or_else(|| usage!("--n and --k are required without --figure"))?;
    let map = |e: analysis::AnalysisError| usage!("{e}");
    if checks {
        let links = analysis::ordering_checks(n, k, m, s).map_err(map)?;
        let mut w = csv::Writer::from_writer(output(out)?);
        w.write_record(["chain", "lhs", "relation", "rhs", "holds", "asserted"])?;
        for l in links {
            w.write_record([
                l.chain.to_string(),
                l.lhs,
                l.relation.to_string(),
                l.rhs,
                l.holds.to_string(),
                l.asserted.to_string(),
            ])?;
        }
        w.flush()?;
        return Ok(());
    }
    let rows = analysis::comparison_table(n, k, m, s).map_err(map)?;
    Ok(analysis::write_table_csv(&rows, output(out)?)?)
}

fn repair(dir: &Path, failed: usize, helpers: Option<&str>) -> Result<()> {
    let (manifest, mut cluster) = snapshot::load_cluster(dir)?;
    let n = cluster.params().n();
    if failed >= n {
        return Err(usage!("--failed {failed} out of range for N = {n}"));
    }
    if cluster.shard(failed).is_ok() {
        cluster.fail_server(failed)?;
    }
    let helpers = match helpers {
        Some(h) => parse_list(h, "helper")?,
        None => (0..n).filter(|&i| i != failed && cluster.shard(i).is_ok()).collect(),
    };
    let report = cluster.repair_server(failed, &helpers)?;
    let bytes = snapshot::shard_bytes(cluster.shard(failed)?, cluster.params());
    let entry = &manifest.shards[failed];
    if snapshot::digest(&bytes) != entry.sha256 {
        bail!("rebuilt shard {failed} does not match the manifest digest");
    }
    write_atomic(&dir.join(&entry.file), &bytes)?;
    let mut json: serde_json::Value = serde_json::from_str(&report.to_json_line())?;
    json["digest_ok"] = true.into();
    println!("{json}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Encode {
            code,
            m,
            inputs,
            seed,
            out,
        } => encode(&code, m, &inputs, seed, &out),
        Command::Retrieve {
            snapshot,
            theta,
            seed,
            query,
            sessions,
            out,
        } => retrieve(&snapshot, theta, seed, query.as_deref(), sessions, &out),
        Command::BenchRate {
            code,
            m,
            mode,
            sessions,
            theta,
            seed,
            cap,
            out,
        } => bench_rate(&code, m, mode, sessions, theta, seed, cap, out.as_deref()),
        Command::Compare {
            n,
            k,
            m,
            s,
            figure,
            sweep,
            checks,
            out,
        } => compare(n, k, m, s, figure.as_deref(), sweep.as_deref(), checks, out.as_deref()),
        Command::Repair {
            snapshot,
            failed,
            helpers,
        } => repair(&snapshot, failed, helpers.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
