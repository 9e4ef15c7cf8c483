//! YAML poset, module and family files, and their canonical serialization.
//!
//! ```yaml
//! # poset file
//! elements: ["00", "01", "10", "11"]
//! covers:
//!   - ["00", "01"]
//!   - ["00", "10"]
//!   - ["01", "11"]
//!   - ["10", "11"]
//! ```
//!
//! ```yaml
//! # module file; absent dimensions are 0, absent maps are zero
//! poset: "grid2x2.yaml"
//! dims:
//!   "00": 2
//!   "01": 1
//! maps:
//!   "00->01": [[1, 0]]
//! ```
//!
//! A family is a builtin name or a list of `{sources: [..], targets: [..]}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use spreadmod::{
    enumerate_spreads, Family, Fp, Mat, PersistenceModule, Poset, Spread, SpreadKind,
};

use crate::error::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PosetDoc {
    elements: Vec<String>,
    #[serde(default)]
    covers: Vec<(String, String)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MapValue {
    Matrix(Vec<Vec<i64>>),
    Named(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleDoc {
    poset: String,
    #[serde(default)]
    dims: BTreeMap<String, usize>,
    #[serde(default)]
    maps: BTreeMap<String, MapValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpreadDoc {
    sources: Vec<String>,
    targets: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FamilyDoc {
    Builtin(String),
    List(Vec<SpreadDoc>),
}

/// What a YAML file holds, judged by its top-level keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Poset,
    Module,
    Family,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn yaml<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_yaml::from_str(text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        line: e.location().map(|l| l.line()),
        msg: e.to_string(),
    })
}

/// First line (1-based) mentioning `needle` as a quoted or bare token.
fn locate(text: &str, needle: &str) -> Option<usize> {
    let quoted = format!("\"{needle}\"");
    let single = format!("'{needle}'");
    text.lines().position(|l| {
        l.contains(&quoted)
            || l.contains(&single)
            || l.split(|c: char| c.is_whitespace() || "[]{},:".contains(c))
                .any(|tok| tok == needle)
    })
    .map(|i| i + 1)
}

fn invalid(path: &Path, text: &str, needle: Option<&str>, msg: String) -> CliError {
    CliError::Invalid {
        path: path.display().to_string(),
        line: needle.and_then(|n| locate(text, n)),
        msg,
    }
}

pub fn detect_kind(path: &Path) -> Result<FileKind, CliError> {
    let text = read(path)?;
    let value: serde_yaml::Value = yaml(path, &text)?;
    Ok(match &value {
        serde_yaml::Value::Mapping(m) if m.contains_key("elements") => FileKind::Poset,
        serde_yaml::Value::Mapping(m) if m.contains_key("poset") => FileKind::Module,
        _ => FileKind::Family,
    })
}

pub fn parse_poset(path: &Path, text: &str) -> Result<Poset, CliError> {
    let doc: PosetDoc = yaml(path, text)?;
    if let Some(bad) = doc.elements.iter().find(|l| l.contains("->") || l.is_empty()) {
        return Err(invalid(path, text, Some(bad), format!("invalid element label {bad:?}")));
    }
    let index: HashMap<&str, usize> = doc
        .elements
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let mut covers = Vec::new();
    for (a, b) in &doc.covers {
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| invalid(path, text, Some(l), format!("unknown element {l:?} in covers")))
        };
        covers.push((lookup(a)?, lookup(b)?));
    }
    Poset::with_labels(doc.elements, &covers).map_err(|e| {
        let needle = match &e {
            spreadmod::Error::RedundantCover(a, _)
            | spreadmod::Error::DuplicateCover(a, _)
            | spreadmod::Error::CycleDetected(a) => Some(a.clone()),
            spreadmod::Error::DuplicateLabel(a) => Some(a.clone()),
            _ => None,
        };
        invalid(path, text, needle.as_deref(), e.to_string())
    })
}

pub fn load_poset(path: &Path) -> Result<Poset, CliError> {
    parse_poset(path, &read(path)?)
}

/// Loads modules, sharing one poset per poset file.
pub struct Loader {
    pub field: Fp,
    posets: HashMap<PathBuf, Arc<Poset>>,
}

impl Loader {
    pub fn new(field: Fp) -> Self {
        Loader {
            field,
            posets: HashMap::new(),
        }
    }

    pub fn poset(&mut self, path: &Path) -> Result<Arc<Poset>, CliError> {
        let key = fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf());
        if let Some(p) = self.posets.get(&key) {
            return Ok(p.clone());
        }
        let p = Arc::new(load_poset(path)?);
        self.posets.insert(key, p.clone());
        Ok(p)
    }

    /// The module and the path of its poset file.
    pub fn module(&mut self, path: &Path) -> Result<(PersistenceModule, PathBuf), CliError> {
        let text = read(path)?;
        let doc: ModuleDoc = yaml(path, &text)?;
        let poset_path = path.parent().unwrap_or(Path::new(".")).join(&doc.poset);
        let p = self.poset(&poset_path)?;
        let f = self.field;

        let mut dims = vec![0; p.len()];
        for (label, &d) in &doc.dims {
            let x = p
                .index_of(label)
                .map_err(|_| invalid(path, &text, Some(label), format!("unknown element {label:?} in dims")))?;
            dims[x] = d;
        }
        let mut maps = Vec::new();
        for (key, value) in &doc.maps {
            let (la, lb) = key
                .split_once("->")
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| invalid(path, &text, Some(key), format!("map key {key:?} is not of the form \"a->b\"")))?;
            let elem = |l: &str| {
                p.index_of(l)
                    .map_err(|_| invalid(path, &text, Some(key), format!("unknown element {l:?} in map {key:?}")))
            };
            let (a, b) = (elem(la)?, elem(lb)?);
            if p.cover_index(a, b).is_none() {
                return Err(invalid(path, &text, Some(key), format!("{la} -> {lb} is not a cover")));
            }
            let mat = match value {
                MapValue::Named(s) if s == "id" => {
                    if dims[a] != dims[b] {
                        return Err(invalid(
                            path,
                            &text,
                            Some(key),
                            format!("identity on {key:?} needs equal dimensions, got {} and {}", dims[a], dims[b]),
                        ));
                    }
                    Mat::identity(f, dims[a])
                }
                MapValue::Named(s) => {
                    return Err(invalid(path, &text, Some(key), format!("unknown map shorthand {s:?}")))
                }
                MapValue::Matrix(rows) => {
                    if rows.len() != dims[b] || rows.iter().any(|r| r.len() != dims[a]) {
                        return Err(invalid(
                            path,
                            &text,
                            Some(key),
                            format!("map {key:?} must be {}x{}", dims[b], dims[a]),
                        ));
                    }
                    Mat::from_rows(f, dims[a], rows)
                }
            };
            maps.push((a, b, mat));
        }
        let m = PersistenceModule::from_cover_list(p, f, dims, &maps).map_err(|e| {
            let needle = match &e {
                spreadmod::Error::NotCommutative(a, _) => Some(a.clone()),
                _ => None,
            };
            invalid(path, &text, needle.as_deref(), e.to_string())
        })?;
        Ok((m, poset_path))
    }
}

fn parse_spread_list(path: &Path, text: &str, p: &Poset, docs: &[SpreadDoc]) -> Result<Vec<Spread>, CliError> {
    docs.iter()
        .map(|d| {
            let s: Vec<&str> = d.sources.iter().map(String::as_str).collect();
            let t: Vec<&str> = d.targets.iter().map(String::as_str).collect();
            Spread::from_labels(p, &s, &t).map_err(|e| {
                let needle = d.sources.first().map(String::as_str);
                invalid(path, text, needle, e.to_string())
            })
        })
        .collect()
}

/// A family or spread collection: a builtin name or a YAML file.
pub enum SpreadSpec {
    Builtin(SpreadKind),
    List(Vec<Spread>),
}

pub fn parse_spread_spec(spec: &str, p: &Poset) -> Result<SpreadSpec, CliError> {
    if let Some(kind) = SpreadKind::from_name(spec) {
        return Ok(SpreadSpec::Builtin(kind));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "{spec:?} is neither a builtin family ({}) nor a file",
            builtin_names().join(", ")
        )));
    }
    let text = read(path)?;
    match yaml::<FamilyDoc>(path, &text)? {
        FamilyDoc::Builtin(name) => SpreadKind::from_name(&name)
            .map(SpreadSpec::Builtin)
            .ok_or_else(|| invalid(path, &text, Some(&name), format!("unknown builtin family {name:?}"))),
        FamilyDoc::List(docs) => Ok(SpreadSpec::List(parse_spread_list(path, &text, p, &docs)?)),
    }
}

pub fn builtin_names() -> Vec<&'static str> {
    [
        SpreadKind::Projective,
        SpreadKind::Hook,
        SpreadKind::Interval,
        SpreadKind::SingleSource,
        SpreadKind::ConnectedAll,
        SpreadKind::ConnectedUpset,
    ]
    .iter()
    .map(|k| k.name())
    .collect()
}

impl SpreadSpec {
    pub fn family(&self, p: Arc<Poset>, f: Fp, cap: usize) -> Result<Family, CliError> {
        Ok(match self {
            SpreadSpec::Builtin(kind) => Family::builtin(p, f, *kind, cap)?,
            SpreadSpec::List(list) => Family::new(p, f, list.clone(), false)?,
        })
    }

    pub fn spreads(&self, p: &Poset, cap: usize) -> Result<Vec<Spread>, CliError> {
        Ok(match self {
            SpreadSpec::Builtin(kind) => enumerate_spreads(p, *kind, cap)?,
            SpreadSpec::List(list) => list.clone(),
        })
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn matrix_literal(m: &Mat) -> String {
    let rows: Vec<String> = m
        .to_signed_rows()
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(i64::to_string).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Canonical poset file: elements in id order, covers in stored order.
pub fn serialize_poset(p: &Poset) -> String {
    let mut out = String::new();
    let labels: Vec<String> = p.labels().iter().map(|l| quote(l)).collect();
    writeln!(out, "elements: [{}]", labels.join(", ")).unwrap();
    if p.covers().is_empty() {
        out.push_str("covers: []\n");
    } else {
        out.push_str("covers:\n");
        for &(a, b) in p.covers() {
            writeln!(out, "  - [{}, {}]", quote(p.label(a)), quote(p.label(b))).unwrap();
        }
    }
    out
}

/// Canonical module file: nonzero dimensions and nonzero maps only, keys in
/// sorted order, entries as signed residues.
pub fn serialize_module(m: &PersistenceModule, poset_ref: &str) -> String {
    let p = m.poset();
    let mut out = String::new();
    writeln!(out, "poset: {}", quote(poset_ref)).unwrap();
    let mut dims: Vec<(&str, usize)> = (0..p.len())
        .filter(|&x| m.dim(x) > 0)
        .map(|x| (p.label(x), m.dim(x)))
        .collect();
    dims.sort();
    if dims.is_empty() {
        out.push_str("dims: {}\n");
    } else {
        out.push_str("dims:\n");
        for (l, d) in dims {
            writeln!(out, "  {}: {d}", quote(l)).unwrap();
        }
    }
    let mut maps: Vec<(String, String)> = p
        .covers()
        .iter()
        .enumerate()
        .filter(|(ci, _)| !m.cover_map(*ci).is_zero())
        .map(|(ci, &(a, b))| {
            (format!("{}->{}", p.label(a), p.label(b)), matrix_literal(m.cover_map(ci)))
        })
        .collect();
    maps.sort();
    if maps.is_empty() {
        out.push_str("maps: {}\n");
    } else {
        out.push_str("maps:\n");
        for (k, v) in maps {
            writeln!(out, "  {}: {v}", quote(&k)).unwrap();
        }
    }
    out
}

/// Canonical explicit family file.
pub fn serialize_spreads(p: &Poset, spreads: &[Spread]) -> String {
    let mut out = String::new();
    for s in spreads {
        let names = |set: spreadmod::ElemSet| {
            set.iter().map(|x| quote(p.label(x))).collect::<Vec<_>>().join(", ")
        };
        writeln!(out, "- {{sources: [{}], targets: [{}]}}", names(s.sources()), names(s.targets())).unwrap();
    }
    if spreads.is_empty() {
        out.push_str("[]\n");
    }
    out
}
