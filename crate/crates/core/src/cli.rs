//! Command-line front end.
//!
//! Structured results are JSON documents carrying `schema_version`; tables
//! (`rank`, `predict`, `impute`, `plotdata`, benchmark rows) are delimited
//! text with a header. Failures print a JSON error object on stderr and exit
//! with status 1, usage errors with status 2.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::data::{Dataset, Frame};
use crate::error::{NvsdError, Result};
use crate::io::{self, IngestReport, IngestSpec, ResponseColumn};
use crate::predictor::{fit_additive, AdditiveModel};
use crate::roughening::{RougheningConfig, RougheningMode};
use crate::selector::{
    choose_k_by_cv, cv_curve, iterative_group_selection, rank_variables, select_variables,
    SelectionConfig,
};
use crate::simulation::{self, SimulationSpec};
use crate::smoother::SmootherSpec;
use crate::stats;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "nvsd", version, about = "Nonlinear variable selection with DCOL")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RougheningArg {
    Dcol,
    Spline,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Roughening step size.
    #[arg(long, global = true, default_value_t = RougheningConfig::DEFAULT_THETA)]
    pub theta: f64,
    /// Stopping threshold on the smallest combined p-value.
    #[arg(long, global = true, default_value_t = 0.001)]
    pub alpha: f64,
    /// Permutations for the DCOL null distribution.
    #[arg(long, global = true, default_value_t = 2000)]
    pub perms: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = RougheningArg::Spline)]
    pub roughening: RougheningArg,
    /// Iteration cap (default ten times the number of predictors).
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    /// Response column, by header name or zero-based index.
    #[arg(long, global = true)]
    pub response: Option<String>,
    /// Field delimiter; `\t` or `tab` for tabs.
    #[arg(long, global = true, default_value = ",")]
    pub delimiter: String,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Drop predictor columns with a larger fraction of missing values.
    #[arg(long, global = true, default_value_t = 0.10)]
    pub na_threshold: f64,
    /// Neighbours used to impute missing cells.
    #[arg(long, global = true, default_value_t = 10)]
    pub knn_k: usize,
    /// Columns to ignore (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub exclude: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every predictor once against the response.
    Rank { data: PathBuf },
    /// Run forward stagewise selection.
    Select { data: PathBuf },
    /// Repeated selection with removal of each selected group.
    Groups {
        data: PathBuf,
        #[arg(long, default_value_t = 20)]
        min_group: usize,
    },
    /// Select, then choose the model size by cross-validation.
    Cv {
        data: PathBuf,
        #[arg(long, default_value_t = 5)]
        folds: usize,
    },
    /// Fit the additive predictor and save it.
    Fit {
        data: PathBuf,
        /// Model file to write.
        #[arg(long)]
        model: PathBuf,
        /// Use these variables instead of selecting.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        #[arg(long, default_value_t = 5)]
        folds: usize,
    },
    /// Predict with a saved model.
    Predict {
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Run simulation benchmark replicates.
    Simulate {
        /// TOML simulation spec; flags below override its fields.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = 10)]
        replicates: usize,
        /// Also write per-replicate rows as a delimited table.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Impute missing values and write the cleaned table.
    Impute { data: PathBuf },
    /// (x, y) pairs of the selected variables, long format.
    Plotdata {
        data: PathBuf,
        /// Use these variables instead of selecting.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
    },
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    settings: Settings,
    result: T,
}

#[derive(Serialize)]
struct Settings {
    theta: f64,
    alpha: f64,
    permutations: usize,
    seed: u64,
    roughening: RougheningMode,
    max_iters: Option<usize>,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    schema_version: u32,
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

fn error_json(kind: &str, message: String) -> String {
    serde_json::to_string(&ErrorDoc {
        schema_version: SCHEMA_VERSION,
        error: ErrorBody { kind, message },
    })
    .expect("error document serializes")
}

/// Parses `args` and runs the command; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            eprintln!("{}", error_json("usage", e.to_string().trim_end().to_string()));
            return 2;
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), e.to_string()));
            1
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("NVSD_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // fails only if a pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

impl GlobalOpts {
    fn delimiter(&self) -> Result<u8> {
        match self.delimiter.as_str() {
            "\\t" | "tab" | "\t" => Ok(b'\t'),
            d if d.len() == 1 => Ok(d.as_bytes()[0]),
            d => Err(NvsdError::Config(format!("delimiter must be one byte, got {d:?}"))),
        }
    }

    fn selection(&self) -> Result<SelectionConfig> {
        let mode = match self.roughening {
            RougheningArg::Dcol => RougheningMode::DcolGradient,
            RougheningArg::Spline => RougheningMode::Smoother,
        };
        let cfg = SelectionConfig {
            alpha_stop: self.alpha,
            permutations: self.perms,
            max_iters: self.max_iters,
            roughening: RougheningConfig::new(self.theta, mode, SmootherSpec::Gcv)?,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn settings(&self) -> Result<Settings> {
        let cfg = self.selection()?;
        Ok(Settings {
            theta: cfg.roughening.theta(),
            alpha: cfg.alpha_stop,
            permutations: cfg.permutations,
            seed: cfg.seed,
            roughening: cfg.roughening.mode(),
            max_iters: cfg.max_iters,
        })
    }

    fn ingest(&self, path: &Path) -> Result<(Dataset, IngestReport)> {
        let response = self
            .response
            .as_deref()
            .ok_or_else(|| NvsdError::Config("--response is required for this command".into()))?;
        let spec = IngestSpec {
            path: path.to_path_buf(),
            delimiter: self.delimiter()?,
            response: ResponseColumn::parse(response),
            column_na_threshold: self.na_threshold,
            knn_k: self.knn_k,
            exclude: self.exclude.clone(),
        };
        io::ingest(&spec)
    }

    fn emit_bytes(&self, bytes: &[u8]) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, bytes)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(bytes)?;
                stdout.flush()?;
            }
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&self, command: &str, result: T) -> Result<()> {
        let doc = Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            settings: self.settings()?,
            result,
        };
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| NvsdError::Parse(format!("serializing output: {e}")))?;
        text.push('\n');
        self.emit_bytes(text.as_bytes())
    }

    fn emit_table(&self, names: &[String], columns: &[Vec<String>]) -> Result<()> {
        let mut buf = Vec::new();
        {
            let mut w = csv::WriterBuilder::new()
                .delimiter(self.delimiter()?)
                .from_writer(&mut buf);
            let csv_err = |e: csv::Error| NvsdError::Io(std::io::Error::other(e));
            w.write_record(names).map_err(csv_err)?;
            for i in 0..columns.first().map_or(0, Vec::len) {
                w.write_record(columns.iter().map(|c| c[i].as_str())).map_err(csv_err)?;
            }
            w.flush()?;
        }
        self.emit_bytes(&buf)
    }
}

fn resolve_vars(d: &Dataset, names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| {
            d.predictors()
                .index_of(n)
                .ok_or_else(|| NvsdError::Schema(format!("unknown variable {n:?}")))
        })
        .collect()
}

fn fmt_all(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| format!("{v:?}")).collect()
}

#[derive(Serialize)]
struct CvResult {
    selected: Vec<String>,
    cv_nrmse: Vec<f64>,
    k: usize,
    chosen: Vec<String>,
}

#[derive(Serialize)]
struct FitResult {
    variables: Vec<String>,
    intercept: f64,
    sweeps: usize,
    training_nrmse: f64,
    model: PathBuf,
}

#[derive(Serialize)]
struct GroupsResult {
    min_group: usize,
    groups: Vec<Vec<String>>,
}

fn execute(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Rank { data } => {
            let (d, _) = g.ingest(data)?;
            let scores = rank_variables(&d, &g.selection()?)?;
            let pick = |f: fn(&crate::assoc::AssociationScore) -> f64| {
                fmt_all(&scores.iter().map(f).collect::<Vec<_>>())
            };
            let names = ["variable", "p_combined", "p_linear", "p_dcol", "s_delta", "explained_fraction"]
                .map(String::from);
            g.emit_table(
                &names,
                &[
                    d.names().to_vec(),
                    pick(|s| s.p_combined),
                    pick(|s| s.p_linear),
                    pick(|s| s.p_dcol),
                    pick(|s| s.s_delta),
                    pick(|s| s.explained_fraction),
                ],
            )
        }
        Command::Select { data } => {
            let (d, _) = g.ingest(data)?;
            let trace = select_variables(&d, &g.selection()?)?;
            g.emit_json("select", trace)
        }
        Command::Groups { data, min_group } => {
            let (d, _) = g.ingest(data)?;
            let groups = iterative_group_selection(&d, &g.selection()?, *min_group)?;
            let groups = groups
                .iter()
                .map(|grp| grp.iter().map(|&j| d.names()[j].clone()).collect())
                .collect();
            g.emit_json(
                "groups",
                GroupsResult {
                    min_group: *min_group,
                    groups,
                },
            )
        }
        Command::Cv { data, folds } => {
            let (d, _) = g.ingest(data)?;
            let cfg = g.selection()?;
            let trace = select_variables(&d, &cfg)?;
            if trace.selected.is_empty() {
                return Err(NvsdError::EmptySelection);
            }
            let cv_seed = stats::derive_seed(cfg.seed, 0xC5);
            let curve = cv_curve(&d, &trace.selected, *folds, cv_seed)?;
            let k = choose_k_by_cv(&d, &trace.selected, *folds, cv_seed)?;
            g.emit_json(
                "cv",
                CvResult {
                    chosen: trace.selected_names[..k].to_vec(),
                    selected: trace.selected_names,
                    cv_nrmse: curve,
                    k,
                },
            )
        }
        Command::Fit {
            data,
            model,
            vars,
            folds,
        } => {
            let (d, _) = g.ingest(data)?;
            let idx = if vars.is_empty() {
                let cfg = g.selection()?;
                let trace = select_variables(&d, &cfg)?;
                if trace.selected.is_empty() {
                    return Err(NvsdError::EmptySelection);
                }
                let k = choose_k_by_cv(&d, &trace.selected, *folds, stats::derive_seed(cfg.seed, 0xC5))?;
                trace.selected[..k].to_vec()
            } else {
                resolve_vars(&d, vars)?
            };
            let fitted = fit_additive(&d, &idx)?;
            fs::write(model, fitted.to_text())?;
            let training = fitted.predict(d.predictors())?;
            g.emit_json(
                "fit",
                FitResult {
                    variables: fitted.variables().iter().map(|s| s.to_string()).collect(),
                    intercept: fitted.intercept(),
                    sweeps: fitted.sweeps(),
                    training_nrmse: simulation::nrmse(d.response(), &training)?,
                    model: model.clone(),
                },
            )
        }
        Command::Predict { data, model } => {
            let fitted = AdditiveModel::from_text(&fs::read_to_string(model)?)?;
            let wanted: Vec<String> = fitted.variables().iter().map(|s| s.to_string()).collect();
            let raw = io::read_table_path(data, g.delimiter()?, &g.exclude)?;
            let mut columns = Vec::with_capacity(wanted.len());
            for name in &wanted {
                let j = raw
                    .names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| NvsdError::Schema(format!("column {name:?} missing from input")))?;
                let col: Option<Vec<f64>> = raw.columns[j].iter().copied().collect();
                columns.push(col.ok_or_else(|| {
                    NvsdError::Schema(format!("column {name:?} has missing values"))
                })?);
            }
            let mut frame = Frame::new(wanted, columns)?;
            if frame.n_cols() == 0 {
                // intercept-only model: row count comes from the file
                frame = Frame::new(vec!["_row".into()], vec![vec![0.0; raw.n_rows()]])?;
            }
            let pred = fitted.predict(&frame)?;
            let rows: Vec<String> = (0..pred.len()).map(|i| i.to_string()).collect();
            g.emit_table(&["row".into(), "prediction".into()], &[rows, fmt_all(&pred)])
        }
        Command::Simulate {
            spec,
            q,
            p,
            n,
            sigma,
            replicates,
            table,
        } => {
            let mut s = match spec {
                Some(path) => SimulationSpec::from_toml(&fs::read_to_string(path)?)?,
                None => SimulationSpec::new(3, 100, 400, 1.0, g.seed),
            };
            s.q = q.unwrap_or(s.q);
            s.p = p.unwrap_or(s.p);
            s.n = n.unwrap_or(s.n);
            s.sigma = sigma.unwrap_or(s.sigma);
            if spec.is_none() {
                s.seed = g.seed;
            }
            s.validate()?;
            let report = simulation::run_benchmark(&s, &g.selection()?, *replicates)?;
            if let Some(path) = table {
                write_replicate_table(path, g.delimiter()?, &report.rows)?;
            }
            #[derive(Serialize)]
            struct SimResult<'a> {
                spec: &'a SimulationSpec,
                report: simulation::BenchmarkReport,
            }
            g.emit_json("simulate", SimResult { spec: &s, report })
        }
        Command::Impute { data } => {
            let (d, report) = g.ingest(data)?;
            let mut buf = Vec::new();
            io::write_dataset(&mut buf, g.delimiter()?, &d)?;
            g.emit_bytes(&buf)?;
            eprintln!(
                "{}",
                serde_json::to_string(&report).map_err(|e| NvsdError::Parse(e.to_string()))?
            );
            Ok(())
        }
        Command::Plotdata { data, vars } => {
            let (d, _) = g.ingest(data)?;
            let idx = if vars.is_empty() {
                select_variables(&d, &g.selection()?)?.selected
            } else {
                resolve_vars(&d, vars)?
            };
            let (mut var, mut xs, mut ys) = (Vec::new(), Vec::new(), Vec::new());
            for &j in &idx {
                for (x, y) in d.column(j).iter().zip(d.response()) {
                    var.push(d.names()[j].clone());
                    xs.push(format!("{x:?}"));
                    ys.push(format!("{y:?}"));
                }
            }
            g.emit_table(&["variable".into(), "x".into(), "y".into()], &[var, xs, ys])
        }
    }
}

fn write_replicate_table(path: &Path, delimiter: u8, rows: &[simulation::ReplicateResult]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_path(path)
        .map_err(|e| NvsdError::Io(std::io::Error::other(e)))?;
    for r in rows {
        w.serialize(r).map_err(|e| NvsdError::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["nvsd", "frobnicate"]), 2);
        assert_eq!(run(["nvsd", "rank"]), 2);
        assert_eq!(run(["nvsd", "--bogus", "rank", "x.csv"]), 2);
    }

    #[test]
    fn runtime_errors_exit_1() {
        assert_eq!(run(["nvsd", "rank", "--response", "y", "/nonexistent/file.csv"]), 1);
        assert_eq!(run(["nvsd", "rank", "/nonexistent/file.csv"]), 1);
    }

    #[test]
    fn delimiter_parsing() {
        let cli = Cli::try_parse_from(["nvsd", "--delimiter", "tab", "rank", "f"]).unwrap();
        assert_eq!(cli.global.delimiter().unwrap(), b'\t');
        let cli = Cli::try_parse_from(["nvsd", "--delimiter", ";;", "rank", "f"]).unwrap();
        assert!(cli.global.delimiter().is_err());
    }
}
