//! Plain-text transcriptions of published tables.
//!
//! Three layouts are read. The appendix layout is a stream of directives
//! (`n`, `table`, `type`, `heading`, `census`) and structure rows. The
//! tabulated layout has pipe-separated columns with blank cells continuing
//! the row above. The named layout lists `name structure` pairs under `n`
//! sections. A row that fails to parse is kept with its error so the
//! verifier can report it by line.

use std::fmt;

use gromov_core::GromovStructure;
use thiserror::Error;

pub const APPENDIX_SEVEN: &str = include_str!("../fixtures/n7-appendix.txt");
pub const TABLE_SIX: &str = include_str!("../fixtures/n6-table2.txt");
pub const NAMED_SMALL: &str = include_str!("../fixtures/small-named.txt");

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FixtureError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FixtureError {
    FixtureError { line, message: message.into() }
}

/// Role counts as printed: isolated, end, interior.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Roles {
    pub isolated: usize,
    pub end: usize,
    pub interior: usize,
}

impl Roles {
    pub fn total(&self) -> usize {
        self.isolated + self.end + self.interior
    }
}

impl fmt::Display for Roles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.isolated, self.end, self.interior)
    }
}

/// Columns printed next to a structure in the tabulated layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tabulated {
    pub reducible: bool,
    pub roles: Roles,
    pub removed_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub line: usize,
    pub text: String,
    pub structure: Result<GromovStructure, String>,
    pub type_label: Option<String>,
    pub heading: Option<String>,
    pub name: Option<String>,
    pub reducible: Option<bool>,
    pub tabulated: Option<Tabulated>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub id: String,
    pub caption: String,
    pub rows: Vec<Row>,
}

/// One line of the per-type summary. `number == None` merges the line into
/// the group opened by the previous numbered line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusLine {
    pub line: usize,
    pub label: String,
    pub reducible: bool,
    pub roles: Option<Roles>,
    pub number: Option<usize>,
}

impl CensusLine {
    /// Closed-core size for `Contains X<k>` lines.
    pub fn contains_size(&self) -> Option<usize> {
        let rest = self.label.strip_prefix("Contains X")?;
        rest.trim().parse().ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub n: usize,
    pub tables: Vec<Table>,
    pub census: Vec<CensusLine>,
}

impl Fixture {
    pub fn rows(&self) -> impl Iterator<Item = (&Table, &Row)> {
        self.tables.iter().flat_map(|t| t.rows.iter().map(move |r| (t, r)))
    }

    pub fn row_count(&self) -> usize {
        self.tables.iter().map(|t| t.rows.len()).sum()
    }

    /// Parses the appendix layout.
    pub fn parse_appendix(text: &str) -> Result<Self, FixtureError> {
        let mut n = None;
        let mut tables: Vec<Table> = Vec::new();
        let mut census = Vec::new();
        let mut type_label: Option<String> = None;
        let mut heading: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (word, rest) = content.split_once(' ').unwrap_or((content, ""));
            let rest = rest.trim();
            match word {
                "n" => n = Some(rest.parse().map_err(|_| err(line, format!("bad point count {rest:?}")))?),
                "table" => {
                    let (id, caption) = rest.split_once(' ').unwrap_or((rest, ""));
                    tables.push(Table { id: id.to_string(), caption: caption.trim().to_string(), rows: Vec::new() });
                    type_label = None;
                    heading = None;
                }
                "type" => type_label = Some(rest.to_string()),
                "heading" => heading = Some(rest.to_string()),
                "census" => census.push(parse_census(line, rest)?),
                _ if word.starts_with(|c: char| c.is_ascii_digit()) => {
                    let n = n.ok_or_else(|| err(line, "structure row before `n`"))?;
                    let table = tables.last_mut().ok_or_else(|| err(line, "structure row outside a table"))?;
                    let reducible = Some(table.caption.contains("Reducible"));
                    table.rows.push(Row {
                        line,
                        text: content.to_string(),
                        structure: GromovStructure::parse(content, n).map_err(|e| e.to_string()),
                        type_label: type_label.clone(),
                        heading: heading.clone(),
                        name: None,
                        reducible,
                        tabulated: None,
                    });
                }
                other => return Err(err(line, format!("unknown directive {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| err(0, "missing `n` line"))?;
        Ok(Fixture { n, tables, census })
    }

    /// Parses the tabulated layout: type | R/I | interior | end | isolated | removed | structure | name.
    pub fn parse_tabulated(text: &str) -> Result<Self, FixtureError> {
        let mut n = None;
        let mut rows = Vec::new();
        let mut previous: Vec<String> = vec![String::new(); 8];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            if let Some(rest) = content.strip_prefix("n ") {
                n = Some(rest.trim().parse().map_err(|_| err(line, "bad point count"))?);
                continue;
            }
            let n = n.ok_or_else(|| err(line, "row before `n`"))?;
            let cells: Vec<&str> = raw.split('|').map(str::trim).collect();
            if cells.len() != 8 {
                return Err(err(line, format!("expected 8 columns, found {}", cells.len())));
            }
            for (slot, cell) in previous.iter_mut().zip(&cells) {
                if !cell.is_empty() {
                    *slot = cell.to_string();
                }
            }
            let number = |k: usize, what: &str| -> Result<usize, FixtureError> {
                previous[k].parse().map_err(|_| err(line, format!("bad {what} count {:?}", previous[k])))
            };
            let reducible = match previous[1].as_str() {
                "R" => true,
                "I" => false,
                other => return Err(err(line, format!("bad R/I flag {other:?}"))),
            };
            let tabulated = Tabulated {
                reducible,
                roles: Roles { interior: number(2, "interior")?, end: number(3, "end")?, isolated: number(4, "isolated")? },
                removed_edges: number(5, "removed")?,
            };
            rows.push(Row {
                line,
                text: cells[6].to_string(),
                structure: GromovStructure::parse(cells[6], n).map_err(|e| e.to_string()),
                type_label: Some(previous[0].clone()),
                heading: None,
                name: Some(cells[7].trim_matches(|c| c == '(' || c == ')').to_string()),
                reducible: Some(reducible),
                tabulated: Some(tabulated),
            });
        }
        let n = n.ok_or_else(|| err(0, "missing `n` line"))?;
        Ok(Fixture { n, tables: vec![Table { id: "2".into(), caption: "Complete list".into(), rows }], census: Vec::new() })
    }

    /// The rows for `n` of the named layout, as a one-table fixture.
    pub fn parse_named(text: &str, n: usize) -> Result<Self, FixtureError> {
        let rows = named_entries(text)?
            .into_iter()
            .filter(|e| e.n == n)
            .map(|e| Row {
                line: e.line,
                text: e.text,
                structure: e.structure,
                type_label: None,
                heading: None,
                name: Some(e.name),
                reducible: None,
                tabulated: None,
            })
            .collect();
        Ok(Fixture { n, tables: vec![Table { id: "named".into(), caption: "Named classes".into(), rows }], census: Vec::new() })
    }
}

fn parse_census(line: usize, rest: &str) -> Result<CensusLine, FixtureError> {
    let cells: Vec<&str> = rest.split('|').map(str::trim).collect();
    if cells.len() != 6 {
        return Err(err(line, format!("census line needs 6 columns, found {}", cells.len())));
    }
    let opt = |s: &str| -> Result<Option<usize>, FixtureError> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| err(line, format!("bad number {s:?}")))
        }
    };
    let roles = match (opt(cells[2])?, opt(cells[3])?, opt(cells[4])?) {
        (Some(isolated), Some(end), Some(interior)) => Some(Roles { isolated, end, interior }),
        (None, None, None) => None,
        _ => return Err(err(line, "partial role columns")),
    };
    Ok(CensusLine { line, label: cells[0].to_string(), reducible: cells[1] == "R", roles, number: opt(cells[5])? })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedEntry {
    pub line: usize,
    pub n: usize,
    pub name: String,
    pub text: String,
    pub structure: Result<GromovStructure, String>,
}

/// Entries of the named layout, across all `n` sections.
pub fn named_entries(text: &str) -> Result<Vec<NamedEntry>, FixtureError> {
    let mut n = None;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (word, rest) = content.split_once(char::is_whitespace).ok_or_else(|| err(line, "expected two fields"))?;
        if word == "n" {
            n = Some(rest.trim().parse().map_err(|_| err(line, "bad point count"))?);
            continue;
        }
        let n = n.ok_or_else(|| err(line, "entry before `n`"))?;
        let text = rest.trim().to_string();
        out.push(NamedEntry { line, n, name: word.to_string(), structure: GromovStructure::parse(&text, n).map_err(|e| e.to_string()), text });
    }
    Ok(out)
}

/// Bundled fixture for `n`, if one ships with the crate.
pub fn bundled(n: usize) -> Option<Fixture> {
    let parsed = match n {
        4 | 5 => Fixture::parse_named(NAMED_SMALL, n),
        6 => Fixture::parse_tabulated(TABLE_SIX),
        7 => Fixture::parse_appendix(APPENDIX_SEVEN),
        _ => return None,
    };
    Some(parsed.expect("bundled fixtures parse"))
}

/// Loads `dir/<file>` for `n`, using the same file names as the bundle.
pub fn load_from_dir(dir: &std::path::Path, n: usize) -> std::io::Result<Option<Fixture>> {
    let (file, parse): (&str, fn(&str, usize) -> Result<Fixture, FixtureError>) = match n {
        4 | 5 => ("small-named.txt", |t, n| Fixture::parse_named(t, n)),
        6 => ("n6-table2.txt", |t, _| Fixture::parse_tabulated(t)),
        7 => ("n7-appendix.txt", |t, _| Fixture::parse_appendix(t)),
        _ => return Ok(None),
    };
    let text = std::fs::read_to_string(dir.join(file))?;
    parse(&text, n).map(Some).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))
}
