//! Structured text descriptions of models: parsing with positioned errors,
//! canonical display that round-trips, and construction of the described
//! objects (two-site map and Markov generator).
//!
//! Format: whitespace-separated `key=value` fields, `#` comments, newlines
//! insignificant. `N=` and `L=` are required, plus exactly one of
//! `twist=<perm>` (twisted exclusion process), `lyubashenko=<perm>`
//! (set-theoretical model of that solution), or both `g=<perm>;...` and
//! `f=<perm>;...` (solution family, one entry per letter). Permutations use
//! cycle notation `(0 1 2)`, image notation `[1 2 0]`, or `id`.

use std::fmt;

use thiserror::Error;

use crate::markov::{MarkovModel, ModelError};
use crate::matrix::RatMatrix;
use crate::perm::Permutation;
use crate::twosite::{SolutionFamily, TwoSiteMap};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{message}")]
    Semantic { message: String },
}

impl ParseError {
    fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn semantic(message: impl Into<String>) -> Self {
        ParseError::Semantic {
            message: message.into(),
        }
    }
}

/// Which model a file describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelKind {
    /// Set-theoretical model of the solution `(i,j) -> (g(j), g⁻¹(i))`.
    Lyubashenko { g: Permutation },
    /// Exclusion process with the twist `f` on the boundary bond.
    TwistedSsep { f: Permutation },
    /// Set-theoretical model of a general solution family.
    Family { family: SolutionFamily },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    n: usize,
    l: usize,
    kind: ModelKind,
}

impl ModelSpec {
    pub fn new(n: usize, l: usize, kind: ModelKind) -> Result<Self, ParseError> {
        let perm_alphabet = match &kind {
            ModelKind::Lyubashenko { g } => g.n(),
            ModelKind::TwistedSsep { f } => f.n(),
            ModelKind::Family { family } => family.n(),
        };
        if perm_alphabet != n {
            return Err(ParseError::semantic(format!(
                "model acts on {} letters but N={}",
                perm_alphabet, n
            )));
        }
        Ok(ModelSpec { n, l, kind })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// The two-site map every bond of the model applies: the solution map
    /// itself, or for the twisted exclusion process the boundary-bond map
    /// `(a,b) -> (f(b), f⁻¹(a))`, which coincides with the solution of `f`.
    pub fn two_site_map(&self) -> TwoSiteMap {
        match &self.kind {
            ModelKind::Lyubashenko { g } => TwoSiteMap::lyubashenko(g),
            ModelKind::TwistedSsep { f } => TwoSiteMap::lyubashenko(f),
            ModelKind::Family { family } => {
                family.map().expect("validated at construction")
            }
        }
    }

    /// The solution family of this model (constant for the single-map kinds).
    pub fn family(&self) -> SolutionFamily {
        match &self.kind {
            ModelKind::Lyubashenko { g } => SolutionFamily::lyubashenko(g),
            ModelKind::TwistedSsep { f } => SolutionFamily::lyubashenko(f),
            ModelKind::Family { family } => family.clone(),
        }
    }

    /// Builds the continuous-time generator on `N^L` configurations.
    pub fn markov_model(&self) -> Result<MarkovModel, ModelError> {
        match &self.kind {
            ModelKind::Lyubashenko { g } => {
                MarkovModel::set_theoretical(&TwoSiteMap::lyubashenko(g), self.l)
            }
            ModelKind::TwistedSsep { f } => MarkovModel::twisted_ssep(self.n, self.l, f),
            ModelKind::Family { family } => MarkovModel::from_family(family, self.l),
        }
    }

    /// The twist this model carries, if it is a twisted exclusion process.
    pub fn twist(&self) -> Option<&Permutation> {
        match &self.kind {
            ModelKind::TwistedSsep { f } => Some(f),
            _ => None,
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "N={} L={}", self.n, self.l)?;
        match &self.kind {
            ModelKind::Lyubashenko { g } => write!(out, " lyubashenko={}", g),
            ModelKind::TwistedSsep { f } => write!(out, " twist={}", f),
            ModelKind::Family { family } => {
                let list = |pick: &dyn Fn(usize) -> String| {
                    (0..self.n).map(pick).collect::<Vec<_>>().join("; ")
                };
                writeln!(out)?;
                writeln!(out, "g={}", list(&|i| family.g(i).to_string()))?;
                write!(out, "f={}", list(&|j| family.f(j).to_string()))
            }
        }
    }
}

/// One raw `key=value` field with its source position.
struct RawField {
    name: String,
    value: String,
    line: usize,
    column: usize,
}

fn scan_fields(text: &str) -> Result<Vec<RawField>, ParseError> {
    let mut fields: Vec<RawField> = Vec::new();
    for (line_idx, raw_line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let mut rest = line;
        let mut offset = 0usize;
        loop {
            let trimmed = rest.trim_start();
            offset += rest.len() - trimmed.len();
            if trimmed.is_empty() {
                break;
            }
            let column = offset + 1;
            let name_len = trimmed
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(trimmed.len());
            if name_len == 0 {
                return Err(ParseError::syntax(
                    line_no,
                    column,
                    format!("expected a field name, found {:?}", first_token(trimmed)),
                ));
            }
            let name = &trimmed[..name_len];
            let after_name = &trimmed[name_len..];
            if !after_name.starts_with('=') {
                return Err(ParseError::syntax(
                    line_no,
                    column,
                    format!("expected `=` after field name `{}`", name),
                ));
            }
            let value_area = &after_name[1..];
            let value_len = next_field_start(value_area).unwrap_or(value_area.len());
            let value = value_area[..value_len].trim();
            if value.is_empty() {
                return Err(ParseError::syntax(
                    line_no,
                    column,
                    format!("field `{}` has no value", name),
                ));
            }
            fields.push(RawField {
                name: name.to_string(),
                value: value.to_string(),
                line: line_no,
                column,
            });
            offset += name_len + 1 + value_len;
            rest = &value_area[value_len..];
        }
    }
    Ok(fields)
}

/// Byte offset where the next `name=` field begins, so values may contain
/// spaces (cycle notation) without quoting.
fn next_field_start(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            let start = i + 1;
            let mut j = start;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            if j > start && j < bytes.len() && bytes[j] == b'=' {
                return Some(i);
            }
        }
        i += 1;
    }
    None
}

fn first_token(text: &str) -> String {
    text.split_whitespace().next().unwrap_or("").to_string()
}

fn parse_usize_field(field: &RawField) -> Result<usize, ParseError> {
    field.value.parse::<usize>().map_err(|_| {
        ParseError::syntax(
            field.line,
            field.column,
            format!("field `{}` must be a nonnegative integer, got `{}`", field.name, field.value),
        )
    })
}

fn parse_perm_field(field: &RawField, n: usize) -> Result<Permutation, ParseError> {
    Permutation::parse(&field.value, n).map_err(|e| {
        ParseError::syntax(field.line, field.column, format!("field `{}`: {}", field.name, e))
    })
}

fn parse_perm_list_field(field: &RawField, n: usize) -> Result<Vec<Permutation>, ParseError> {
    let perms: Result<Vec<Permutation>, ParseError> = field
        .value
        .split(';')
        .map(|part| {
            Permutation::parse(part, n).map_err(|e| {
                ParseError::syntax(
                    field.line,
                    field.column,
                    format!("field `{}`: {}", field.name, e),
                )
            })
        })
        .collect();
    let perms = perms?;
    if perms.len() != n {
        return Err(ParseError::semantic(format!(
            "field `{}` lists {} permutations, expected one per letter ({})",
            field.name,
            perms.len(),
            n
        )));
    }
    Ok(perms)
}

/// Parses a model description. Syntax errors carry line and column; semantic
/// errors (wrong alphabet, non-bijective derived map) carry the offending
/// value.
pub fn parse_model(text: &str) -> Result<ModelSpec, ParseError> {
    let fields = scan_fields(text)?;
    let known = ["N", "L", "twist", "lyubashenko", "g", "f"];
    for field in &fields {
        if !known.contains(&field.name.as_str()) {
            return Err(ParseError::syntax(
                field.line,
                field.column,
                format!("unknown field `{}`", field.name),
            ));
        }
    }
    for (i, field) in fields.iter().enumerate() {
        if fields[..i].iter().any(|f| f.name == field.name) {
            return Err(ParseError::syntax(
                field.line,
                field.column,
                format!("duplicate field `{}`", field.name),
            ));
        }
    }
    let get = |name: &str| fields.iter().find(|f| f.name == name);
    let n_field = get("N").ok_or_else(|| ParseError::semantic("missing required field N"))?;
    let l_field = get("L").ok_or_else(|| ParseError::semantic("missing required field L"))?;
    let n = parse_usize_field(n_field)?;
    if n == 0 {
        return Err(ParseError::semantic("N must be at least 1"));
    }
    let l = parse_usize_field(l_field)?;

    let kind_fields: Vec<&str> = ["twist", "lyubashenko", "g", "f"]
        .into_iter()
        .filter(|name| get(name).is_some())
        .collect();
    let kind = match kind_fields.as_slice() {
        ["twist"] => ModelKind::TwistedSsep {
            f: parse_perm_field(get("twist").unwrap(), n)?,
        },
        ["lyubashenko"] => ModelKind::Lyubashenko {
            g: parse_perm_field(get("lyubashenko").unwrap(), n)?,
        },
        ["g", "f"] => {
            let g = parse_perm_list_field(get("g").unwrap(), n)?;
            let f = parse_perm_list_field(get("f").unwrap(), n)?;
            let family = SolutionFamily::new(g, f)
                .map_err(|e| ParseError::semantic(e.to_string()))?;
            // surface non-bijective derived maps at parse time
            family
                .map()
                .map_err(|e| ParseError::semantic(e.to_string()))?;
            ModelKind::Family { family }
        }
        [] => {
            return Err(ParseError::semantic(
                "missing model kind: need twist=, lyubashenko=, or g= and f=",
            ))
        }
        ["g"] | ["f"] => {
            return Err(ParseError::semantic(
                "a family model needs both g= and f= lists",
            ))
        }
        _ => {
            return Err(ParseError::semantic(format!(
                "conflicting model kinds: {}",
                kind_fields.join(", ")
            )))
        }
    };
    ModelSpec::new(n, l, kind)
}

/// Serializes a matrix as sparse triplet lines `row col num/den` in
/// row-major order.
pub fn matrix_triplets(m: &RatMatrix) -> String {
    let mut entries: Vec<(usize, usize, String)> = m
        .entries()
        .map(|(r, c, v)| (r, c, crate::rat::display(v)))
        .collect();
    entries.sort_by_key(|&(r, c, _)| (r, c));
    let mut out = String::new();
    for (r, c, v) in entries {
        out.push_str(&format!("{} {} {}\n", r, c, v));
    }
    out
}
