//! Command-line front end.
//!
//! [`run`] parses arguments, executes one command and returns the exit code
//! together with the text for standard output and standard error. Exit code
//! 0 means success or a true verdict, 1 a false verdict, 2 an input error.
//! With `--json` the report is a [`RunReport`]; it carries no timings, so
//! identical inputs and seed give byte-identical output.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constructions::{bergman_demo, format_tuple, henkin_enumerate, henkin_eps};
use crate::derived::{derived_limit, limit_exactness_check, scd_finite, DEFAULT_FLAG_BUDGET};
use crate::format::{parse_document, Document, Item, ParseError};
use crate::poset::Poset;
use crate::sets::{MlVerdict, SetSystem, Tower, DEFAULT_BUDGET};

#[derive(Debug, Parser)]
#[command(
    name = "invlim",
    version,
    about = "Inverse limits, derived limits and Mittag-Leffler analysis"
)]
pub struct Cli {
    /// Emit the machine-readable JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Enumeration budget (threads) or flag budget (nerve complexes).
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Truncate towers to this horizon.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Declaration to use when a file holds several candidates.
    #[arg(long, global = true)]
    pub name: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate every declaration in a file.
    Validate { file: PathBuf },
    /// Enumerate the threads of a set system or tower.
    Limit { file: PathBuf },
    /// Check that all bonds are onto.
    Surjective { file: PathBuf },
    /// Mittag-Leffler report for a tower.
    Ml { file: PathBuf },
    /// Universal images and surjectivity of the restricted bonds.
    Images { file: PathBuf },
    /// Invariants of lim^n of a system of groups.
    Derived {
        #[arg(long)]
        n: usize,
        file: PathBuf,
    },
    /// Sampled lower bound for the surjective cohomological dimension.
    Scd {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Exactness of lim on a short exact sequence of systems.
    Exactness { file: PathBuf },
    #[command(subcommand)]
    Henkin(HenkinCommand),
    #[command(subcommand)]
    Bergman(BergmanCommand),
}

#[derive(Debug, Subcommand)]
pub enum HenkinCommand {
    /// List the tuples of one level up to a length bound.
    Enumerate {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        level: String,
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
    },
    /// Apply a bond to one tuple.
    Eps {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        /// Comma-separated labels, e.g. "b,c".
        #[arg(long)]
        tuple: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum BergmanCommand {
    /// Run the identity checks on the truncation {1..n} and print the ledger.
    Demo {
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Input(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Outcome of one command.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    pub verdict: Option<bool>,
    pub result: Value,
    #[serde(skip)]
    pub lines: Vec<String>,
    #[serde(skip)]
    pub elapsed_ms: f64,
}

impl RunReport {
    fn new(command: &str) -> RunReport {
        RunReport {
            command: command.into(),
            inputs: Vec::new(),
            seed: None,
            verdict: None,
            result: Value::Null,
            lines: Vec::new(),
            elapsed_ms: 0.0,
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Some(false) => 1,
            _ => 0,
        }
    }

    pub fn human(&self) -> String {
        let mut out: String = self.lines.iter().map(|l| format!("{l}\n")).collect();
        out.push_str(&format!("elapsed: {:.1} ms\n", self.elapsed_ms));
        out
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let start = Instant::now();
    match execute(&cli) {
        Ok(mut report) => {
            report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            let stdout = if cli.json {
                report.json()
            } else {
                report.human()
            };
            Outcome {
                code: report.exit_code(),
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn load(path: &PathBuf, report: &mut RunReport) -> Result<Document, CliError> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    report.inputs.push(InputDigest {
        path: shown.clone(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    });
    let text =
        String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{shown}: not UTF-8")))?;
    parse_document(&text).map_err(|source| CliError::Parse {
        path: shown,
        source,
    })
}

/// The declaration named by `--name`, or the first one of an accepted kind.
fn pick<'a>(doc: &'a Document, name: Option<&str>, kinds: &[&str]) -> Result<&'a Item, CliError> {
    let found = match name {
        Some(n) => doc.items.iter().find(|it| it.name() == n),
        None => doc.items.iter().find(|it| kinds.contains(&it.kind())),
    };
    match found {
        Some(it) if kinds.contains(&it.kind()) => Ok(it),
        Some(it) => Err(CliError::Input(format!(
            "`{}` is a {}, expected {}",
            it.name(),
            it.kind(),
            kinds.join(" or ")
        ))),
        None => Err(CliError::Input(format!(
            "no {} declaration found",
            kinds.join(" or ")
        ))),
    }
}

fn tower_of<'a>(cli: &Cli, tower: &'a Tower) -> Result<std::borrow::Cow<'a, Tower>, CliError> {
    match cli.horizon {
        Some(h) => tower
            .truncate(h)
            .map(std::borrow::Cow::Owned)
            .map_err(|e| CliError::Input(e.to_string())),
        None => Ok(std::borrow::Cow::Borrowed(tower)),
    }
}

/// The set system behind a `system` or `tower` declaration.
fn set_system(cli: &Cli, item: &Item) -> Result<SetSystem, CliError> {
    match item {
        Item::System { system, .. } => Ok(system.clone()),
        Item::Tower { tower, .. } => Ok(tower_of(cli, tower)?.system().clone()),
        _ => unreachable!("picked by kind"),
    }
}

fn element(p: &Poset, label: &str) -> Result<usize, CliError> {
    p.index_of(label)
        .ok_or_else(|| CliError::Input(format!("unknown element `{label}`")))
}

fn single_poset(cli: &Cli, path: &PathBuf, report: &mut RunReport) -> Result<Poset, CliError> {
    let doc = load(path, report)?;
    match pick(&doc, cli.name.as_deref(), &["poset"])? {
        Item::Poset { poset, .. } => Ok(poset.clone()),
        _ => unreachable!("picked by kind"),
    }
}

fn execute(cli: &Cli) -> Result<RunReport, CliError> {
    let name = cli.name.as_deref();
    match &cli.command {
        Command::Validate { file } => {
            let mut r = RunReport::new("validate");
            let doc = load(file, &mut r)?;
            let decls: Vec<Value> = doc
                .items
                .iter()
                .map(|it| json!({"kind": it.kind(), "name": it.name()}))
                .collect();
            r.line(format!("valid: {}", doc.summary()));
            r.result = json!({ "declarations": decls });
            Ok(r)
        }
        Command::Limit { file } => {
            let mut r = RunReport::new("limit");
            let doc = load(file, &mut r)?;
            let item = pick(&doc, name, &["system", "tower"])?;
            let s = set_system(cli, item)?;
            let threads = s
                .limit_threads(cli.budget.unwrap_or(DEFAULT_BUDGET))
                .map_err(|e| CliError::Input(e.to_string()))?;
            r.line(format!("system: {}", item.name()));
            r.line(format!("threads: {}", threads.len()));
            for t in &threads {
                r.line(format!("  {}", s.describe_thread(t)));
            }
            let elements: Vec<Vec<&str>> = threads
                .iter()
                .map(|t| {
                    t.0.iter()
                        .enumerate()
                        .map(|(i, &x)| s.carrier(i)[x].as_str())
                        .collect()
                })
                .collect();
            r.result = json!({ "name": item.name(), "elements": s.base().labels(), "threads": threads.len(), "values": elements });
            Ok(r)
        }
        Command::Surjective { file } => {
            let mut r = RunReport::new("surjective");
            let doc = load(file, &mut r)?;
            let item = pick(&doc, name, &["system", "tower", "absystem"])?;
            let (base, failure) = match item {
                Item::AbSystem { system, .. } => {
                    (system.base().clone(), system.first_non_surjective())
                }
                _ => {
                    let s = set_system(cli, item)?;
                    let rep = s.is_surjective();
                    (s.base().clone(), rep.first_failure)
                }
            };
            let verdict = failure.is_none();
            r.line(format!("surjective: {verdict}"));
            let failure =
                failure.map(|(lo, hi)| (base.label(lo).to_string(), base.label(hi).to_string()));
            if let Some((lo, hi)) = &failure {
                r.line(format!("first failure: {hi} -> {lo}"));
            }
            r.verdict = Some(verdict);
            r.result =
                json!({ "name": item.name(), "surjective": verdict, "first_failure": failure });
            Ok(r)
        }
        Command::Ml { file } => {
            let mut r = RunReport::new("ml");
            let doc = load(file, &mut r)?;
            let Item::Tower { name: tname, tower } = pick(&doc, name, &["tower"])? else {
                unreachable!()
            };
            let tower = tower_of(cli, tower)?;
            let rep = tower.ml_report();
            r.line(format!("tower: {tname} (horizon {})", rep.horizon));
            let mut levels = Vec::new();
            for l in &rep.levels {
                let (text, from) = match l.verdict {
                    MlVerdict::Stable { from } => (format!("stable from {from}"), Some(from)),
                    MlVerdict::UnstableAtHorizon => ("unstable at horizon".to_string(), None),
                };
                let flag = if l.horizon_sensitive {
                    " (horizon-sensitive)"
                } else {
                    ""
                };
                r.line(format!("level {}: {text}{flag}", l.level));
                levels.push(json!({
                    "level": l.level,
                    "stable_from": from,
                    "settles_at": l.settles_at,
                    "horizon_sensitive": l.horizon_sensitive,
                    "image_sizes": l.images.iter().map(Vec::len).collect::<Vec<_>>(),
                }));
            }
            let verdict = rep.stable_everywhere();
            r.line(format!(
                "ML: {}",
                if verdict {
                    "stable at every level"
                } else {
                    "not stable at every level"
                }
            ));
            r.verdict = Some(verdict);
            r.result = json!({ "name": tname, "horizon": rep.horizon, "levels": levels });
            Ok(r)
        }
        Command::Images { file } => {
            let mut r = RunReport::new("images");
            let doc = load(file, &mut r)?;
            let item = pick(&doc, name, &["system", "tower"])?;
            let s = set_system(cli, item)?;
            let ui = s.universal_images();
            let mut images = serde_json::Map::new();
            for i in 0..s.base().len() {
                let c = ui.system.carrier(i);
                r.line(format!(
                    "image {}: {{ {} }}",
                    s.base().label(i),
                    c.join(" ")
                ));
                images.insert(s.base().label(i).to_string(), json!(c));
            }
            let verdict = ui.all_restricted_surjective();
            r.line(format!("restricted bonds surjective: {verdict}"));
            r.verdict = Some(verdict);
            r.result = json!({ "name": item.name(), "images": images });
            Ok(r)
        }
        Command::Derived { n, file } => {
            let mut r = RunReport::new("derived");
            let doc = load(file, &mut r)?;
            let Item::AbSystem {
                name: sname,
                system,
                ..
            } = pick(&doc, name, &["absystem"])?
            else {
                unreachable!()
            };
            let g = derived_limit(system, *n, cli.budget.unwrap_or(DEFAULT_FLAG_BUDGET))
                .map_err(|e| CliError::Input(e.to_string()))?;
            let inv = g.invariants();
            r.line(format!("system: {sname}"));
            r.line(format!("lim^{n} invariants: {inv}"));
            r.result = json!({ "name": sname, "degree": n, "invariants": inv });
            Ok(r)
        }
        Command::Scd { file, trials } => {
            let mut r = RunReport::new("scd");
            let p = single_poset(cli, file, &mut r)?;
            let est = scd_finite(
                &p,
                *trials,
                cli.seed,
                cli.budget.unwrap_or(DEFAULT_FLAG_BUDGET),
            )
            .map_err(|e| CliError::Input(e.to_string()))?;
            r.seed = Some(cli.seed);
            r.line(format!("scd lower bound: {}", est.degree));
            if let Some(w) = est.witness_trial {
                r.line(format!("witness trial: {w} of {}", est.trials));
            }
            r.result = json!({ "degree": est.degree, "trials": est.trials, "witness_trial": est.witness_trial });
            Ok(r)
        }
        Command::Exactness { file } => {
            let mut r = RunReport::new("exactness");
            let doc = load(file, &mut r)?;
            let Item::Sequence {
                name: sname,
                sequence,
                ..
            } = pick(&doc, name, &["sequence"])?
            else {
                unreachable!()
            };
            let rep = limit_exactness_check(sequence, cli.budget.unwrap_or(DEFAULT_FLAG_BUDGET))
                .map_err(|e| CliError::Input(e.to_string()))?;
            r.line(format!("sequence: {sname}"));
            r.line(format!("lim A: {}", rep.lim_a));
            r.line(format!("lim B: {}", rep.lim_b));
            r.line(format!("lim C: {}", rep.lim_c));
            r.line(format!("lim^1 A: {}", rep.lim1_a));
            r.line(format!("lim u injective: {}", rep.lim_u_injective));
            r.line(format!("exact at lim B: {}", rep.exact_at_lim_b));
            r.line(format!("lim v surjective: {}", rep.lim_v_surjective));
            r.line(format!("coker lim v: {}", rep.coker_lim_v));
            r.line(format!("connecting map exact: {}", rep.connecting_exact));
            r.line(format!(
                "exactness: {}",
                if rep.passes() { "pass" } else { "fail" }
            ));
            r.verdict = Some(rep.passes());
            r.result = json!({ "name": sname, "report": rep });
            Ok(r)
        }
        Command::Henkin(HenkinCommand::Enumerate {
            poset,
            level,
            maxlen,
        }) => {
            let mut r = RunReport::new("henkin enumerate");
            let p = single_poset(cli, poset, &mut r)?;
            let a = element(&p, level)?;
            let tuples: Vec<String> = henkin_enumerate(&p, a, *maxlen)
                .iter()
                .map(|t| format_tuple(&p, t))
                .collect();
            r.line(format!(
                "level {level}, length <= {maxlen}: {} tuples",
                tuples.len()
            ));
            for t in &tuples {
                r.line(format!("  {t}"));
            }
            r.result = json!({ "level": level, "maxlen": maxlen, "tuples": tuples });
            Ok(r)
        }
        Command::Henkin(HenkinCommand::Eps {
            poset,
            alpha,
            beta,
            tuple,
        }) => {
            let mut r = RunReport::new("henkin eps");
            let p = single_poset(cli, poset, &mut r)?;
            let (a, b) = (element(&p, alpha)?, element(&p, beta)?);
            let t: Vec<usize> = tuple
                .split(',')
                .map(|s| element(&p, s.trim()))
                .collect::<Result<_, _>>()?;
            let out = henkin_eps(&p, a, b, &t).map_err(|e| CliError::Input(e.to_string()))?;
            let (from, to) = (format_tuple(&p, &t), format_tuple(&p, &out));
            r.line(format!("eps({alpha},{beta}) {from} = {to}"));
            r.result = json!({ "alpha": alpha, "beta": beta, "tuple": from, "image": to });
            Ok(r)
        }
        Command::Bergman(BergmanCommand::Demo { n }) => {
            let mut r = RunReport::new("bergman demo");
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let ledger = bergman_demo(&mut rng, *n).map_err(|e| CliError::Input(e.to_string()))?;
            r.seed = Some(cli.seed);
            r.line(format!("truncation 1..{}", ledger.n));
            r.line(format!("thread: {}", ledger.thread.join(" ; ")));
            for s in &ledger.steps {
                let mark = if s.holds == s.expected {
                    "ok"
                } else {
                    "UNEXPECTED"
                };
                r.line(format!(
                    "({}) {}: holds={} expected={} [{mark}]",
                    s.step, s.statement, s.holds, s.expected
                ));
                if !s.detail.is_empty() {
                    r.line(format!("    {}", s.detail));
                }
            }
            r.verdict = Some(ledger.as_expected());
            r.result = serde_json::to_value(&ledger).expect("ledger serializes");
            Ok(r)
        }
    }
}
