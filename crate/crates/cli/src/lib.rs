//! Command-line driver: reads poset, module and family files and reports
//! invariants as text and line-delimited JSON.

pub mod error;
pub mod files;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use spreadmod::approx::{resolve, Family, ResolutionStatus};
use spreadmod::invariants::{
    barcode, class_via_hom_matrix, compare, dim_hom_vector, generalized_rank_vector,
    rank_invariant, signed_diagram, Comparison, GrothClass, Invariant,
};
use spreadmod::{Error, Fp, PersistenceModule, Poset, Spread, DEFAULT_PRIME};

use crate::error::{CliError, EXIT_INVALID, EXIT_OK, EXIT_UNDECIDED};
use crate::files::{detect_kind, parse_spread_spec, FileKind, Loader};

/// Version of the JSON record layout.
pub const RECORD_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "spreadmod", version, about = "Homological invariants of persistence modules")]
pub struct Cli {
    /// Prime characteristic of the coefficient field.
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME)]
    pub prime: u32,
    /// Maximum number of resolution terms to compute.
    #[arg(long, global = true, default_value_t = 32)]
    pub max_depth: usize,
    /// Cap on the number of spreads a family enumeration may produce.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub cap: usize,
    /// Worker threads for Hom evaluations (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Jsonl,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and check poset, module and family files.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Compute one invariant of a module.
    Invariant {
        kind: InvariantKind,
        module: PathBuf,
        /// Builtin family name or family file; the spread collection for
        /// genrank and diagram.
        #[arg(long, default_value = "connected_spreads")]
        family: String,
    },
    /// Decide whether invariants agree on two modules.
    Compare {
        /// Comma-separated: dimvec, rank, class, dimhom, genrank, diagram,
        /// optionally with a family as in class(intervals).
        invariants: String,
        /// Two module files.
        #[arg(num_args = 0..=2)]
        modules: Vec<PathBuf>,
        /// Directory of pairs NAME.a.yaml / NAME.b.yaml.
        #[arg(long, conflicts_with = "modules")]
        batch: Option<PathBuf>,
        #[arg(long, default_value = "connected_spreads")]
        family: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InvariantKind {
    Dimvec,
    Rank,
    Class,
    Dimhom,
    Genrank,
    Diagram,
    Barcode,
    Resolve,
}

impl InvariantKind {
    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

/// Collected output of one command.
struct Report {
    format: OutputFormat,
    text: Vec<String>,
    records: Vec<Value>,
}

impl Report {
    fn new(format: OutputFormat, command: &str) -> Self {
        Report {
            format,
            text: Vec::new(),
            records: vec![json!({"format": "spreadmod", "version": RECORD_VERSION, "command": command})],
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn record(&mut self, v: Value) {
        self.records.push(v);
    }

    fn emit(&self, out: &mut dyn Write) -> std::io::Result<()> {
        if self.format != OutputFormat::Jsonl {
            for l in &self.text {
                writeln!(out, "{l}")?;
            }
        }
        if self.format != OutputFormat::Text {
            for r in &self.records {
                writeln!(out, "{r}")?;
            }
        }
        Ok(())
    }
}

/// Parses arguments, runs the command, writes output and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    if let Some(j) = cli.jobs {
        // Fails only if a pool was already installed, e.g. in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let field = match Fp::new(cli.prime) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let mut report = Report::new(cli.format, command_name(&cli.command));
    let result = execute(&cli, field, &mut report);
    let _ = report.emit(out);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Invariant { .. } => "invariant",
        Command::Compare { .. } => "compare",
    }
}

fn execute(cli: &Cli, field: Fp, report: &mut Report) -> Result<i32, CliError> {
    let mut loader = Loader::new(field);
    match &cli.command {
        Command::Validate { files } => validate(files, &mut loader, report),
        Command::Invariant { kind, module, family } => {
            let (m, _) = loader.module(module)?;
            invariant(cli, *kind, &m, family, report)
        }
        Command::Compare {
            invariants,
            modules,
            batch,
            family,
        } => {
            let pairs = match (batch, modules.as_slice()) {
                (Some(dir), _) => batch_pairs(dir)?,
                (None, [a, b]) => vec![(String::new(), a.clone(), b.clone())],
                _ => return Err(CliError::Usage("compare needs two module files or --batch DIR".into())),
            };
            compare_pairs(cli, &mut loader, invariants, family, &pairs, report)
        }
    }
}

fn validate(files: &[PathBuf], loader: &mut Loader, report: &mut Report) -> Result<i32, CliError> {
    for path in files {
        let kind = detect_kind(path)?;
        let what = match kind {
            FileKind::Poset => {
                let p = loader.poset(path)?;
                format!("poset with {} elements and {} covers", p.len(), p.covers().len())
            }
            FileKind::Module => {
                let (m, _) = loader.module(path)?;
                format!("module of total dimension {}", m.total_dim())
            }
            FileKind::Family => {
                return Err(CliError::Usage(format!(
                    "{}: family files are checked against a poset; pass them to invariant or compare",
                    path.display()
                )))
            }
        };
        report.line(format!("ok {}: {what}", path.display()));
        report.record(json!({"file": path.display().to_string(), "ok": true, "kind": format!("{kind:?}").to_lowercase()}));
    }
    Ok(EXIT_OK)
}

fn spread_names(p: &Poset, spreads: &[Spread]) -> Vec<String> {
    spreads.iter().map(|s| s.display(p)).collect()
}

fn signed_terms(p: &Poset, spreads: &[Spread], coeffs: &[i64]) -> Vec<String> {
    spreads
        .iter()
        .zip(coeffs)
        .filter(|(_, &c)| c != 0)
        .map(|(s, &c)| format!("{c:+} {}", s.display(p)))
        .collect()
}

fn term_line(p: &Poset, family: &Family, term: &[usize]) -> String {
    let parts: Vec<String> = family
        .members()
        .iter()
        .zip(term)
        .filter(|(_, &k)| k > 0)
        .map(|(s, &k)| if k == 1 { s.display(p) } else { format!("{k} x {}", s.display(p)) })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn invariant(
    cli: &Cli,
    kind: InvariantKind,
    m: &PersistenceModule,
    family_spec: &str,
    report: &mut Report,
) -> Result<i32, CliError> {
    let p = m.poset_arc();
    let f = m.field();
    let labels = p.labels().to_vec();
    let spec = || parse_spread_spec(family_spec, &p);
    match kind {
        InvariantKind::Dimvec => {
            let d = m.dimension_vector();
            for (l, v) in labels.iter().zip(&d) {
                report.line(format!("{l}: {v}"));
            }
            report.record(json!({"invariant": "dimvec", "elements": labels, "values": d}));
        }
        InvariantKind::Rank => {
            let r = rank_invariant(m);
            let mut entries = Vec::new();
            for (a, b, k) in r.pairs() {
                report.line(format!("{} <= {}: {k}", p.label(a), p.label(b)));
                entries.push(json!([p.label(a), p.label(b), k]));
            }
            report.record(json!({"invariant": "rank", "entries": entries}));
        }
        InvariantKind::Dimhom => {
            let fam = spec()?.family(p.clone(), f, cli.cap)?;
            let v = dim_hom_vector(&fam, m)?;
            let names = fam.member_names();
            for (n, k) in names.iter().zip(&v) {
                report.line(format!("{n}: {k}"));
            }
            report.record(json!({"invariant": "dimhom", "members": names, "values": v}));
        }
        InvariantKind::Genrank => {
            let r = spec()?.spreads(&p, cli.cap)?;
            let v = generalized_rank_vector(m, &r)?;
            let names = spread_names(&p, &r);
            for (n, k) in names.iter().zip(&v) {
                report.line(format!("{n}: {k}"));
            }
            report.record(json!({"invariant": "genrank", "spreads": names, "values": v}));
        }
        InvariantKind::Diagram => {
            let r = spec()?.spreads(&p, cli.cap)?;
            let d = signed_diagram(m, &r)?;
            let terms = signed_terms(&p, &r, &d.coeffs);
            if terms.is_empty() {
                report.line("0");
            }
            for t in &terms {
                report.line(t.clone());
            }
            report.record(json!({"invariant": "diagram", "spreads": spread_names(&p, &r), "coeffs": d.coeffs}));
        }
        InvariantKind::Barcode => {
            let b = barcode(m)?;
            let mut bars = Vec::new();
            for (s, c) in b.terms() {
                report.line(format!("{c} x {}", s.display(&p)));
                bars.push(json!([s.display(&p), c]));
            }
            if bars.is_empty() {
                report.line("0");
            }
            report.record(json!({"invariant": "barcode", "bars": bars}));
        }
        InvariantKind::Resolve | InvariantKind::Class => {
            let fam = spec()?.family(p.clone(), f, cli.cap)?;
            let res = resolve(&fam, m, cli.max_depth)?;
            for (k, t) in res.terms.iter().enumerate() {
                report.line(format!("term {k}: {}", term_line(&p, &fam, t)));
            }
            let (status, finite) = match res.status {
                ResolutionStatus::Finite => (format!("finite, length {}", res.length()), true),
                ResolutionStatus::Truncated(d) => (format!("truncated at depth {d}"), false),
            };
            report.line(format!("status: {status}"));
            if let Some(h) = res.periodicity_hint {
                report.line(format!("periodicity hint: {h}"));
            }
            let mut record = json!({
                "invariant": kind.name(),
                "members": fam.member_names(),
                "terms": res.terms,
                "status": if finite { "finite" } else { "truncated" },
                "periodicity_hint": res.periodicity_hint,
            });
            if kind == InvariantKind::Resolve {
                report.record(record);
                return Ok(if finite { EXIT_OK } else { EXIT_UNDECIDED });
            }
            let class = if finite {
                let mut coeffs = vec![0i64; fam.len()];
                for (k, t) in res.terms.iter().enumerate() {
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    for (c, &v) in coeffs.iter_mut().zip(t) {
                        *c += sign * v as i64;
                    }
                }
                coeffs
            } else {
                match class_via_hom_matrix(&fam, m) {
                    Ok(c) => c.coeffs,
                    Err(Error::HomMatrixSingular(cycle)) => {
                        report.line(format!("class undecided: resolution truncated and Hom relation has a cycle ({cycle})"));
                        record["class"] = Value::Null;
                        report.record(record);
                        return Ok(EXIT_UNDECIDED);
                    }
                    Err(e) => return Err(e.into()),
                }
            };
            let class = GrothClass {
                members: fam.members().to_vec(),
                coeffs: class,
            };
            let terms = signed_terms(&p, &class.members, &class.coeffs);
            report.line(format!("class: {}", if terms.is_empty() { "0".into() } else { terms.join(" ") }));
            record["class"] = json!(class.coeffs);
            report.record(record);
        }
    }
    Ok(EXIT_OK)
}

fn batch_pairs(dir: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            e.file_name()
                .to_str()
                .and_then(|n| n.strip_suffix(".a.yaml"))
                .map(String::from)
        })
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| {
            let b = dir.join(format!("{n}.b.yaml"));
            if !b.exists() {
                return Err(CliError::Usage(format!("{} has no partner {}", n, b.display())));
            }
            Ok((n.clone(), dir.join(format!("{n}.a.yaml")), b))
        })
        .collect()
}

/// Splits on commas outside parentheses.
fn split_names(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let (mut depth, mut cur) = (0i32, String::new());
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur.trim().to_string());
    out.into_iter().filter(|s| !s.is_empty()).collect()
}

fn build_invariant(name: &str, default_family: &str, p: &std::sync::Arc<Poset>, f: Fp, cap: usize) -> Result<Invariant, CliError> {
    let (head, arg) = match name.split_once('(') {
        Some((h, rest)) => (
            h.trim(),
            rest.strip_suffix(')')
                .ok_or_else(|| Error::UnknownInvariant(name.to_string()))?
                .trim(),
        ),
        None => (name.trim(), default_family),
    };
    let spec = || parse_spread_spec(arg, p);
    Ok(match head {
        "dimvec" => Invariant::DimVec,
        "rank" => Invariant::Rank,
        "class" => Invariant::Class(spec()?.family(p.clone(), f, cap)?),
        "dimhom" => Invariant::DimHom(spec()?.family(p.clone(), f, cap)?),
        "genrank" => Invariant::GenRank(spec()?.spreads(p, cap)?),
        "diagram" => Invariant::Diagram(spec()?.spreads(p, cap)?),
        _ => return Err(Error::UnknownInvariant(name.to_string()).into()),
    })
}

fn compare_pairs(
    cli: &Cli,
    loader: &mut Loader,
    names: &str,
    family: &str,
    pairs: &[(String, PathBuf, PathBuf)],
    report: &mut Report,
) -> Result<i32, CliError> {
    let names = split_names(names);
    if names.is_empty() {
        return Err(CliError::Usage("no invariant named".into()));
    }
    let mut loaded = Vec::new();
    for (tag, a, b) in pairs {
        let (m, _) = loader.module(a)?;
        let (n, _) = loader.module(b)?;
        if !m.same_base(&n) {
            return Err(CliError::Invalid {
                path: b.display().to_string(),
                line: None,
                msg: format!("module lives over a different poset than {}", a.display()),
            });
        }
        loaded.push((tag.clone(), m, n));
    }
    // One set of invariants per distinct poset.
    let mut built: Vec<(PersistenceModule, Vec<Invariant>)> = Vec::new();
    let mut which = Vec::new();
    for (_, m, _) in &loaded {
        let i = match built.iter().position(|(rep, _)| rep.same_base(m)) {
            Some(i) => i,
            None => {
                let invs = names
                    .iter()
                    .map(|name| build_invariant(name, family, &m.poset_arc(), m.field(), cli.cap))
                    .collect::<Result<Vec<_>, _>>()?;
                built.push((m.clone(), invs));
                built.len() - 1
            }
        };
        which.push(i);
    }
    let verdicts: Vec<Result<Vec<Comparison>, Error>> = loaded
        .par_iter()
        .zip(&which)
        .map(|((_, m, n), &i)| {
            built[i].1.iter().map(|inv| compare(inv, m, n, cli.max_depth)).collect()
        })
        .collect();
    for ((tag, _, _), v) in loaded.iter().zip(verdicts) {
        let v = v?;
        for (name, c) in names.iter().zip(&v) {
            let prefix = if tag.is_empty() { String::new() } else { format!("{tag}: ") };
            report.line(format!("{prefix}{name} {c:?}"));
            report.record(json!({"pair": tag, "invariant": name, "verdict": format!("{c:?}")}));
        }
    }
    Ok(EXIT_OK)
}
