//! Subcommands behind the `namefuzz` binary. Each one writes to the given
//! output stream and reports failures as a [`CliError`] carrying the exit
//! code.

use std::io::{self, BufRead, Write};
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use namefuzz_core::bench::run_bench;
use namefuzz_core::index::{read_corpus, LoadError};
use namefuzz_core::search::{ResultRecord, SearchParams, SearchResult, Typeahead};
use namefuzz_core::{search, BigramParams, SearchIndex};
use namefuzz_service::{ServeError, ServiceState, DEFAULT_PORT};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn load_index(path: &Path) -> Result<SearchIndex, CliError> {
    SearchIndex::load(path).map_err(|e| match e {
        LoadError::Io(e) => CliError::Io(format!("{}: {e}", path.display())),
        other => CliError::Data(format!("{}: {other}", path.display())),
    })
}

#[derive(Debug, Parser)]
#[command(
    name = "namefuzz",
    version,
    about = "Fuzzy name search with skip-bigram retrieval and local Levenshtein ranking"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index file from a corpus (one name per line).
    Build {
        #[arg(long)]
        corpus: PathBuf,
        /// Where to write the index.
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Run one query.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        q: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Interactive search; every input line replaces the query.
    Repl {
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Latency, stage-1 survivors and recall per query length.
    Bench {
        #[arg(long)]
        index: PathBuf,
        /// File with one query per line.
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Address to listen on.
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        bind: IpAddr,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Search parameter overrides. `k` and `lambda` default to the index's own
/// values; other fields default to [`SearchParams::default`].
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<usize>,
    #[arg(long)]
    pub min_fuzzy_len: Option<usize>,
    #[arg(long)]
    pub limit: Option<usize>,
}

impl ParamArgs {
    pub fn resolve(&self, index: BigramParams) -> Result<SearchParams, CliError> {
        let d = SearchParams::default();
        let params = SearchParams {
            k: self.k.unwrap_or(index.k),
            lambda: self.lambda.unwrap_or(index.lambda),
            t1: self.t1.unwrap_or(d.t1),
            t2: self.t2.unwrap_or(d.t2),
            min_fuzzy_len: self.min_fuzzy_len.unwrap_or(d.min_fuzzy_len),
            limit: self.limit.unwrap_or(d.limit),
        };
        params
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(params)
    }

    /// Loads the index and resolves parameters, re-profiling in memory when
    /// `k`/`lambda` were overridden.
    fn open(&self, path: &Path) -> Result<(SearchIndex, SearchParams), CliError> {
        let index = load_index(path)?;
        let params = self.resolve(index.params())?;
        let index = index
            .with_params(params.bigram_params())
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok((index, params))
    }
}

pub fn run(cli: Cli, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Build {
            corpus,
            index,
            k,
            lambda,
        } => cmd_build(&corpus, &index, k, lambda, out),
        Command::Query {
            index,
            q,
            params,
            format,
        } => cmd_query(&index, &q, &params, format, out),
        Command::Repl { index, params } => cmd_repl(&index, &params, input, out),
        Command::Bench {
            index,
            queries,
            reps,
            params,
            format,
        } => cmd_bench(&index, &queries, reps, &params, format, out),
        Command::Serve {
            index,
            port,
            bind,
            params,
        } => cmd_serve(&index, SocketAddr::new(bind, port), &params, out),
    }
}

pub fn cmd_build(
    corpus: &Path,
    dest: &Path,
    k: u32,
    lambda: f64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let params = BigramParams::new(k, lambda).map_err(|e| CliError::Usage(e.to_string()))?;
    let names =
        read_corpus(corpus).map_err(|e| CliError::Io(format!("{}: {e}", corpus.display())))?;
    let start = Instant::now();
    let (index, report) =
        SearchIndex::build(&names, params).map_err(|e| CliError::Usage(e.to_string()))?;
    let elapsed = start.elapsed();
    index
        .save(dest)
        .map_err(|e| CliError::Io(format!("{}: {e}", dest.display())))?;
    writeln!(
        out,
        "indexed {} entries ({} skipped) in {:.1} ms -> {}",
        report.kept,
        report.skipped.len(),
        elapsed.as_secs_f64() * 1e3,
        dest.display()
    )?;
    Ok(())
}

pub fn format_result(rank: usize, r: &SearchResult) -> String {
    let span = r
        .span
        .map_or_else(|| "-".to_owned(), |(s, e)| format!("{s}\u{2013}{e}"));
    format!(
        "{rank}. {} (lld={}, bd={}, span={span})",
        r.display_name, r.lld, r.bd
    )
}

pub fn results_json(results: &[SearchResult]) -> String {
    let records: Vec<ResultRecord> = results.iter().map(ResultRecord::from).collect();
    serde_json::to_string(&records).expect("results serialize")
}

pub fn cmd_query(
    index: &Path,
    q: &str,
    params: &ParamArgs,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (index, params) = params.open(index)?;
    let results = search(&index, q, &params).map_err(|e| CliError::Usage(e.to_string()))?;
    match format {
        Format::Text => {
            for (i, r) in results.iter().enumerate() {
                writeln!(out, "{}", format_result(i + 1, r))?;
            }
        }
        Format::Json => writeln!(out, "{}", results_json(&results))?,
    }
    Ok(())
}

/// Renders the folded name with the matched span in brackets. Matches that
/// fall in the initials suffix are flagged instead.
pub fn highlight(augmented: &str, span: Option<(usize, usize)>) -> String {
    let chars: Vec<char> = augmented.chars().collect();
    let Some((start, end)) = span else {
        return augmented.trim_start().to_owned();
    };
    let mut s = String::with_capacity(augmented.len() + 2);
    for (i, c) in chars.iter().enumerate().skip(1) {
        let pos = i + 1;
        if pos == start {
            s.push('[');
        }
        s.push(*c);
        if pos == end {
            s.push(']');
        }
    }
    s
}

pub fn cmd_repl(
    index: &Path,
    params: &ParamArgs,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (index, params) = params.open(index)?;
    let mut typeahead =
        Typeahead::new(&index, params).map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(
        out,
        "{} names loaded; type a query, empty line clears, Ctrl-D exits",
        index.len()
    )?;
    let mut line = String::new();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(());
        }
        let query = line.trim_end_matches(['\r', '\n']);
        let results = typeahead.set_query(query);
        for (i, r) in results.iter().enumerate() {
            let entry = index
                .get(r.entry_id)
                .expect("result ids come from the index");
            writeln!(
                out,
                "{:>3}. {}  {}  (lld={}, bd={})",
                i + 1,
                r.display_name,
                highlight(&entry.name.augmented, r.span),
                r.lld,
                r.bd
            )?;
        }
    }
}

pub fn cmd_bench(
    index: &Path,
    queries: &Path,
    reps: usize,
    params: &ParamArgs,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (index, params) = params.open(index)?;
    let queries =
        read_corpus(queries).map_err(|e| CliError::Io(format!("{}: {e}", queries.display())))?;
    let report =
        run_bench(&index, &queries, reps, &params).map_err(|e| CliError::Usage(e.to_string()))?;
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string(&report).expect("serialize")
        )?,
        Format::Text => {
            writeln!(
                out,
                "corpus {} entries, {} queries x {} reps",
                report.corpus_size,
                queries.len(),
                report.reps
            )?;
            writeln!(
                out,
                "{:>4} {:>7} {:>10} {:>10} {:>10} {:>9} {:>8} {:>7}",
                "len", "queries", "p50_us", "p95_us", "p99_us", "stage1", "results", "recall"
            )?;
            for r in &report.rows {
                writeln!(
                    out,
                    "{:>4} {:>7} {:>10.1} {:>10.1} {:>10.1} {:>9.1} {:>8.2} {:>7}",
                    r.query_len,
                    r.queries,
                    r.p50_us,
                    r.p95_us,
                    r.p99_us,
                    r.mean_stage1,
                    r.mean_results,
                    r.recall.map_or("n/a".to_owned(), |x| format!("{x:.3}"))
                )?;
            }
            writeln!(
                out,
                "overall recall: {}",
                report
                    .recall
                    .map_or("n/a".to_owned(), |x| format!("{x:.4}"))
            )?;
        }
    }
    Ok(())
}

pub fn cmd_serve(
    index: &Path,
    addr: SocketAddr,
    params: &ParamArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (index, params) = params.open(index)?;
    let size = index.len();
    let state =
        Arc::new(ServiceState::new(index, params).map_err(|e| CliError::Usage(e.to_string()))?);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = namefuzz_service::bind(addr)
            .await
            .map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(out, "serving {size} names on http://{addr}")?;
        out.flush()?;
        namefuzz_service::serve(listener, state)
            .await
            .map_err(|e: ServeError| CliError::Io(e.to_string()))
    })
}
