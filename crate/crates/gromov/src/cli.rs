//! The `gromov` command line. `run` returns the exit status and the text
//! for standard output and standard error, so tests can drive it directly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gromov_core::rational::format_rational;
use gromov_core::{
    canonical_form, chain_decomposition, check_allowable, closed_subsets, invariants_of, realize_metric,
    DistanceMatrix, EnumerationMode, GenericityError, GromovStructure, MetricError,
};
use serde_json::{json, Value};

use crate::catalog::{identify, Catalog, ClassRecord, Classifier, IdentifyError};
use crate::fixture::{self, Fixture};
use crate::store::{self, CATALOG_DIR_VAR};
use crate::verify::verify_fixtures;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEFECT: i32 = 70;

/// Class counts at 4, 5, 6 and 7 points as published.
pub const PUBLISHED_COUNTS: [(usize, usize); 4] = [(4, 1), (5, 3), (6, 26), (7, 431)];

#[derive(Debug, Parser)]
#[command(name = "gromov", version, about = "Classify finite metric spaces by their Gromov product structure")]
pub struct Cli {
    /// Machine-readable JSON on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Full,
    ChainSeeded,
}

impl From<Mode> for EnumerationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Full => EnumerationMode::Full,
            Mode::ChainSeeded => EnumerationMode::ChainSeeded,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the catalog of generic classes on N points.
    Classify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(4..=8))]
        n: u8,
        /// Write the catalog as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
    },
    /// Compare catalogs with the transcribed tables; exit 1 on any mismatch.
    Verify {
        /// Point counts to verify (default: 4 to 7).
        #[arg(long = "n", value_parser = clap::value_parser!(u8).range(4..=7))]
        n: Vec<u8>,
        /// Directory of catalog-n<N>.json files (default: the bundled catalogs).
        #[arg(long, env = CATALOG_DIR_VAR)]
        catalog_dir: Option<PathBuf>,
        /// Directory of fixture files (default: the bundled fixtures).
        #[arg(long)]
        fixture_dir: Option<PathBuf>,
        /// Re-check every stored witness metric exactly.
        #[arg(long)]
        verify_witnesses: bool,
    },
    /// Find the class of a metric given as a distance-matrix file.
    Identify {
        metric: PathBuf,
        #[arg(long, env = CATALOG_DIR_VAR)]
        catalog_dir: Option<PathBuf>,
    },
    /// Produce an integer metric realizing a structure.
    Realize {
        /// Comma-separated picks, e.g. "124,213,324,413".
        structure: String,
        /// Write the metric here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariants, chain diagram, allowability and genericity of a structure.
    Inspect { structure: String },
    /// Rebuild the catalogs from scratch and compare class counts with the published ones.
    CheckPaper {
        #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u8).range(4..=7))]
        max_n: u8,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn text(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }

    fn error(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome { code, stdout: String::new(), stderr: format!("error: {message}\n") }
    }

    fn json(code: i32, value: Value) -> Self {
        let mut text = serde_json::to_string_pretty(&value).expect("json value serializes");
        text.push('\n');
        Outcome::text(code, text)
    }
}

pub fn run(cli: Cli) -> Outcome {
    let json = cli.json;
    match cli.command {
        Command::Classify { n, out, workers, mode } => classify(n as usize, out.as_deref(), workers, mode, json),
        Command::Verify { n, catalog_dir, fixture_dir, verify_witnesses } => {
            let sizes: Vec<usize> = if n.is_empty() { (4..=7).collect() } else { n.into_iter().map(usize::from).collect() };
            verify(&sizes, catalog_dir.as_deref(), fixture_dir.as_deref(), verify_witnesses, json)
        }
        Command::Identify { metric, catalog_dir } => identify_file(&metric, catalog_dir.as_deref(), json),
        Command::Realize { structure, out } => realize(&structure, out.as_deref(), json),
        Command::Inspect { structure } => inspect(&structure, json),
        Command::CheckPaper { max_n, workers } => check_paper(max_n as usize, workers, json),
    }
}

fn parse_structure(text: &str) -> Result<GromovStructure, Outcome> {
    text.trim().parse::<GromovStructure>().map_err(|e| Outcome::error(EXIT_USAGE, format!("cannot parse {text:?}: {e}")))
}

fn stage_json(c: &Catalog) -> Value {
    serde_json::to_value(c.stages).expect("stage counts serialize")
}

fn classify(n: usize, out: Option<&Path>, workers: Option<usize>, mode: Mode, json: bool) -> Outcome {
    let mut classifier = Classifier::new().workers(workers).mode(mode.into());
    let catalog = match classifier.classify(n) {
        Ok(c) => c,
        Err(e) => return Outcome::error(EXIT_DEFECT, e),
    };
    if let Some(path) = out {
        if let Err(e) = store::save(catalog, path) {
            return Outcome::error(EXIT_USAGE, e);
        }
    }
    if json {
        return Outcome::json(EXIT_OK, json!({ "n": n, "stages": stage_json(catalog), "classes": catalog.len() }));
    }
    let s = catalog.stages;
    let mut text = String::new();
    let _ = writeln!(text, "n: {n}");
    let _ = writeln!(text, "raw candidates: {}", s.raw);
    let _ = writeln!(text, "allowable: {}", s.allowable);
    let _ = writeln!(text, "invariant buckets: {}", s.buckets);
    let _ = writeln!(text, "canonical classes: {}", s.canonical);
    let _ = writeln!(text, "generic classes: {}", s.generic);
    let _ = writeln!(text, "irreducible: {}", catalog.irreducible_count());
    let _ = writeln!(text, "classes: {}", catalog.len());
    Outcome::text(EXIT_OK, text)
}

fn verify(sizes: &[usize], catalog_dir: Option<&Path>, fixture_dir: Option<&Path>, verify_witnesses: bool, json: bool) -> Outcome {
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut passed = true;
    for &n in sizes {
        let catalog = match store::locate(catalog_dir, n, verify_witnesses) {
            Some(Ok(c)) => c,
            Some(Err(e)) => return Outcome::error(EXIT_DEFECT, format!("catalog for n = {n}: {e}")),
            None => return Outcome::error(EXIT_USAGE, format!("no catalog for n = {n}")),
        };
        let fixture: Fixture = match fixture_dir {
            Some(dir) => match fixture::load_from_dir(dir, n) {
                Ok(Some(f)) => f,
                Ok(None) => return Outcome::error(EXIT_USAGE, format!("no fixture for n = {n}")),
                Err(e) => return Outcome::error(EXIT_USAGE, format!("fixture for n = {n}: {e}")),
            },
            None => fixture::bundled(n).expect("fixtures are bundled for 4..=7"),
        };
        let report = verify_fixtures(&catalog, &fixture);
        passed &= report.passed();
        let _ = write!(text, "{report}");
        reports.push(report);
    }
    let code = if passed { EXIT_OK } else { EXIT_MISMATCH };
    if json {
        return Outcome::json(code, json!({ "passed": passed, "reports": reports }));
    }
    Outcome::text(code, text)
}

fn record_json(r: &ClassRecord) -> Value {
    serde_json::to_value(r).expect("records serialize")
}

fn record_text(r: &ClassRecord) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "class: {} ({})", r.id, r.label());
    let _ = writeln!(text, "canonical form: {}", r.canonical);
    let _ = writeln!(text, "type: {}", r.type_label);
    let _ = writeln!(text, "roles (isolated, end, interior): ({},{},{})", r.roles.isolated, r.roles.end, r.roles.interior);
    let _ = writeln!(text, "removed edges: {}", r.removed_edges);
    let _ = writeln!(text, "rank: {}", r.rank);
    let _ = writeln!(text, "trace powers: {:?}", r.trace_powers);
    let _ = writeln!(text, "irreducible: {}", if r.irreducible { "yes" } else { "no" });
    for c in &r.contains {
        let _ = writeln!(text, "contains {} on nodes {:?}", c.label, c.nodes);
    }
    text
}

fn identify_file(path: &Path, catalog_dir: Option<&Path>, json: bool) -> Outcome {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::error(EXIT_USAGE, format!("{}: {e}", path.display())),
    };
    let d = match DistanceMatrix::from_text(&text) {
        Ok(d) => d,
        Err(e) => return Outcome::error(EXIT_USAGE, format!("{}: {e}", path.display())),
    };
    let catalog = match store::locate(catalog_dir, d.n(), false) {
        Some(Ok(c)) => c,
        Some(Err(e)) => return Outcome::error(EXIT_DEFECT, e),
        None => return Outcome::error(EXIT_USAGE, format!("no catalog for {} points", d.n())),
    };
    match identify(&catalog, &d) {
        Ok(r) if json => Outcome::json(EXIT_OK, record_json(r)),
        Ok(r) => Outcome::text(EXIT_OK, record_text(r)),
        Err(IdentifyError::Metric(e @ (MetricError::NotDeltaGeneric { .. } | MetricError::NotAMetric(_)))) => {
            Outcome::error(EXIT_MISMATCH, e)
        }
        Err(e @ IdentifyError::NotFound(_)) => Outcome::error(EXIT_DEFECT, e),
        Err(e) => Outcome::error(EXIT_USAGE, e),
    }
}

fn realize(text: &str, out: Option<&Path>, json: bool) -> Outcome {
    let s = match parse_structure(text) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let d = match realize_metric(&s) {
        Ok(d) => d,
        Err(e) => return Outcome::error(EXIT_MISMATCH, e),
    };
    let metric = d.to_text();
    if let Some(path) = out {
        if let Err(e) = fs::write(path, &metric) {
            return Outcome::error(EXIT_USAGE, format!("{}: {e}", path.display()));
        }
    }
    if json {
        let rows: Vec<Vec<String>> = (0..d.n()).map(|i| (0..d.n()).map(|j| format_rational(d.get(i, j))).collect()).collect();
        return Outcome::json(EXIT_OK, json!({ "structure": s.serialize(), "metric": rows }));
    }
    Outcome::text(EXIT_OK, if out.is_some() { String::new() } else { metric })
}

fn inspect(text: &str, json: bool) -> Outcome {
    let s = match parse_structure(text) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let canonical = canonical_form(&s);
    let inv = invariants_of(&s);
    let diagram = chain_decomposition(&s).diagram(&s);
    let smaller: Vec<Catalog> = (4..s.n()).filter_map(store::bundled).collect();
    let subsets: Vec<(Vec<usize>, String, Option<String>)> = closed_subsets(&s)
        .into_iter()
        .map(|c| {
            let nodes: Vec<usize> = c.nodes.iter().map(|v| v.get()).collect();
            let restriction = c.restriction.as_ref().map(|r| r.serialize()).unwrap_or_default();
            let label = c.restriction.as_ref().and_then(|r| {
                smaller.iter().find(|cat| cat.n == r.n()).and_then(|cat| cat.find_structure(r)).map(ClassRecord::label)
            });
            (nodes, restriction, label)
        })
        .collect();
    let allowable = check_allowable(&s);
    let verdict = allowable.as_ref().ok().map(|_| realize_metric(&s));
    let name = crate::names::NameMap::bundled().get(s.n(), canonical.code).map(str::to_string);

    if json {
        let (generic, margin) = match &verdict {
            Some(Ok(_)) => (Some(true), None),
            Some(Err(GenericityError::NotGeneric { margin })) => (Some(false), Some(format_rational(margin))),
            _ => (None, None),
        };
        return Outcome::json(
            EXIT_OK,
            json!({
                "structure": s.serialize(),
                "canonical": canonical.text(),
                "name": name,
                "type_label": inv.type_label.to_string(),
                "roles": { "isolated": inv.roles.isolated, "end": inv.roles.end, "interior": inv.roles.interior },
                "removed_edges": inv.removed_edges,
                "rank": inv.rank,
                "trace_powers": inv.trace_powers,
                "irreducible": inv.irreducible,
                "closed_subsets": subsets.iter().map(|(nodes, r, l)| json!({ "nodes": nodes, "restriction": r, "label": l })).collect::<Vec<_>>(),
                "diagram": diagram.lines().collect::<Vec<_>>(),
                "allowable": allowable.is_ok(),
                "violation": allowable.as_ref().err().map(|v| v.to_string()),
                "generic": generic,
                "margin": margin,
            }),
        );
    }

    let mut out = String::new();
    let _ = writeln!(out, "structure: {}", s.serialize());
    let _ = writeln!(out, "canonical form: {}", canonical.text());
    if let Some(name) = &name {
        let _ = writeln!(out, "name: {name}");
    }
    let _ = writeln!(out, "type: {}", inv.type_label);
    let _ = writeln!(out, "roles (isolated, end, interior): {}", inv.roles);
    let _ = writeln!(out, "removed edges: {}", inv.removed_edges);
    let _ = writeln!(out, "rank: {}", inv.rank);
    let _ = writeln!(out, "trace powers: {:?}", inv.trace_powers);
    let _ = writeln!(out, "irreducible: {}", if inv.irreducible { "yes" } else { "no" });
    for (nodes, restriction, label) in &subsets {
        let _ = write!(out, "closed subset {nodes:?}");
        if !restriction.is_empty() {
            let _ = write!(out, ": {restriction}");
        }
        if let Some(label) = label {
            let _ = write!(out, " ({label})");
        }
        out.push('\n');
    }
    out.push_str("chain diagram:\n");
    for line in diagram.lines() {
        let _ = writeln!(out, "  {line}");
    }
    match (&allowable, &verdict) {
        (Err(v), _) => {
            let _ = writeln!(out, "not allowable: {v}");
        }
        (Ok(()), Some(Ok(d))) => {
            out.push_str("allowable: yes\ngeneric: yes\nwitness metric:\n");
            for line in d.to_text().lines().skip(1) {
                let _ = writeln!(out, "  {line}");
            }
        }
        (Ok(()), Some(Err(e))) => {
            let _ = writeln!(out, "allowable: yes\n{e}");
        }
        (Ok(()), None) => unreachable!("allowable structures get a verdict"),
    }
    Outcome::text(EXIT_OK, out)
}

fn check_paper(max_n: usize, workers: Option<usize>, json: bool) -> Outcome {
    let mut classifier = Classifier::new().workers(workers);
    let mut rows = Vec::new();
    for &(n, published) in PUBLISHED_COUNTS.iter().filter(|(n, _)| *n <= max_n) {
        let computed = match classifier.classify(n) {
            Ok(c) => c.len(),
            Err(e) => return Outcome::error(EXIT_DEFECT, e),
        };
        rows.push((n, published, computed));
    }
    let passed = rows.iter().all(|&(_, p, c)| p == c);
    let code = if passed { EXIT_OK } else { EXIT_MISMATCH };
    let computed: Vec<String> = rows.iter().map(|r| r.2.to_string()).collect();
    if json {
        let entries: Vec<Value> =
            rows.iter().map(|&(n, p, c)| json!({ "n": n, "published": p, "computed": c, "match": p == c })).collect();
        return Outcome::json(code, json!({ "passed": passed, "counts": entries }));
    }
    let mut text = String::from(" n  published  computed\n");
    for &(n, p, c) in &rows {
        let _ = writeln!(text, "{n:>2}  {p:>9}  {c:>8}  {}", if p == c { "ok" } else { "MISMATCH" });
    }
    let _ = writeln!(text, "scoreboard: {}", computed.join(" / "));
    let _ = writeln!(text, "result: {}", if passed { "match" } else { "MISMATCH" });
    Outcome::text(code, text)
}
