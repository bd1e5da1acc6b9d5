//! Text file formats: domains, matrices, transformations, sections and
//! integral registries. `#` starts a comment everywhere.
//!
//! ```text
//! # domain
//! n = 2
//! base = x
//! gen y : (1,1)
//! truncate = 6
//! box x = [0,1]
//!
//! # matrix (cols defaults to rows, degree to zero)
//! rows = 1 1 0 0
//! [x, xi]
//! [xi, y]
//!
//! # transformation
//! source = mu.z2n
//! target = nu.z2n
//! X = x
//!
//! # section
//! chart nu = nu.z2n
//! chart mu = mu.z2n
//! coef nu = alpha(X)*Y
//! laurent nu Y = alpha(X)*Y^-1*XI*H
//! transition mu -> nu = ct1.tr
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::berez::{BerSection, Coefficient, LaurentFunction};
use crate::error::{Error, Result};
use crate::gfun::{DomainSpec, GradedFunction};
use crate::gmat::GradedMatrix;
use crate::grading::Degree;
use crate::morph::CoordMorphism;
use crate::scalars::{IntegralRegistry, Interval};

/// Non-empty lines with comments stripped: (line number, column of the first
/// character, text).
fn lines(src: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    src.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap();
        let trimmed = body.trim_start();
        let col = body.len() - trimmed.len() + 1;
        let t = trimmed.trim_end();
        (!t.is_empty()).then_some((i + 1, col, t))
    })
}

/// Move a parse error of an embedded expression to its place in the file.
fn relocate(e: Error, line: usize, col: usize) -> Error {
    match e {
        Error::Parse { column, message, .. } => Error::Parse {
            line,
            column: column + col - 1,
            message,
        },
        other => other,
    }
}

/// `key = value` or `key rest = value`; returns (key, rest, value, value column).
fn key_value(line: &str, col: usize) -> Option<(&str, &str, &str, usize)> {
    let (lhs, rhs) = line.split_once('=')?;
    let lhs = lhs.trim();
    let (key, rest) = lhs.split_once(char::is_whitespace).unwrap_or((lhs, ""));
    let vcol = col + line.len() - rhs.trim_start().len();
    Some((key, rest.trim(), rhs.trim(), vcol))
}

pub fn parse_domain(src: &str) -> Result<DomainSpec> {
    let mut n = None;
    let mut name = None;
    let mut decls: Vec<(usize, Option<Degree>, String)> = Vec::new();
    let mut trunc = None;
    let mut boxes = Vec::new();
    for (ln, col, line) in lines(src) {
        let bad = |m: String| Error::parse(ln, col, m);
        if let Some(rest) = line.strip_prefix("gen ") {
            let (g, d) = rest
                .split_once(':')
                .ok_or_else(|| bad("expected `gen NAME : (bits)`".into()))?;
            let d: Degree = d.trim().parse().map_err(|e: Error| relocate(e, ln, col))?;
            decls.push((ln, Some(d), g.trim().to_string()));
            continue;
        }
        let (key, rest, value, vcol) =
            key_value(line, col).ok_or_else(|| bad(format!("cannot read `{line}`")))?;
        let number = || value.parse::<u32>().map_err(|_| Error::parse(ln, vcol, format!("`{value}` is not a number")));
        match (key, rest.is_empty()) {
            ("n", true) => n = Some(number()? as usize),
            ("name", true) => name = Some(value.to_string()),
            ("truncate", true) => trunc = Some(number()?),
            ("base", true) => {
                for v in value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
                    decls.push((ln, None, v.to_string()));
                }
            }
            ("box", false) => {
                let iv = Interval::parse(value).map_err(|e| relocate(e, ln, vcol))?;
                boxes.push((rest.to_string(), iv));
            }
            _ => return Err(bad(format!("unknown domain directive `{key}`"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(1, 1, "missing `n = ...`"))?;
    let mut b = DomainSpec::builder(n);
    if let Some(nm) = name {
        b = b.name(&nm);
    }
    for (_, d, s) in &decls {
        b = match d {
            None => b.base(s),
            Some(d) => b.generator(s, *d),
        };
    }
    if let Some(t) = trunc {
        b = b.truncation(t);
    }
    for (v, iv) in boxes {
        b = b.interval(&v, iv);
    }
    b.build()
}

/// Split at top-level commas, keeping brackets and parentheses intact.
/// Returns pieces with their byte offsets.
fn split_top(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

fn parse_shape(value: &str, ln: usize, col: usize) -> Result<Vec<usize>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::parse(ln, col, format!("`{s}` is not a block size"))))
        .collect()
}

pub fn parse_matrix(dom: &DomainSpec, src: &str) -> Result<GradedMatrix> {
    let mut rows = None;
    let mut cols = None;
    let mut degree = Degree::zero(dom.n())?;
    let mut data: Vec<Vec<GradedFunction>> = Vec::new();
    for (ln, col, line) in lines(src) {
        if let Some(inner) = line.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(ln, col + line.len(), "expected `]` at the end of the row"))?;
            let row = split_top(inner)
                .into_iter()
                .map(|(off, e)| {
                    let lead = e.len() - e.trim_start().len();
                    GradedFunction::parse(dom, e.trim()).map_err(|err| relocate(err, ln, col + 1 + off + lead))
                })
                .collect::<Result<Vec<_>>>()?;
            data.push(row);
            continue;
        }
        let (key, _, value, vcol) =
            key_value(line, col).ok_or_else(|| Error::parse(ln, col, format!("cannot read `{line}`")))?;
        match key {
            "rows" | "shape" => rows = Some(parse_shape(value, ln, vcol)?),
            "cols" => cols = Some(parse_shape(value, ln, vcol)?),
            "degree" => degree = value.parse().map_err(|e: Error| relocate(e, ln, vcol))?,
            _ => return Err(Error::parse(ln, col, format!("unknown matrix directive `{key}`"))),
        }
    }
    let rows = rows.ok_or_else(|| Error::parse(1, 1, "missing `rows = ...`"))?;
    let cols = cols.unwrap_or_else(|| rows.clone());
    GradedMatrix::from_rows(dom, rows, cols, degree, data)
}

/// The file form of a matrix, readable by `parse_matrix`.
pub fn format_matrix(m: &GradedMatrix) -> String {
    let join = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = format!("rows = {}\ncols = {}\n", join(m.row_shape()), join(m.col_shape()));
    if !m.degree().is_zero() {
        out += &format!("degree = {}\n", m.degree());
    }
    out + &m.to_string()
}

/// `name = value` lines; header lines `source = ...` and `target = ...` are
/// skipped here.
pub fn parse_transform(source: &DomainSpec, target: &DomainSpec, src: &str) -> Result<CoordMorphism> {
    let mut named = BTreeMap::new();
    for (ln, col, line) in lines(src) {
        let (key, rest, value, vcol) =
            key_value(line, col).ok_or_else(|| Error::parse(ln, col, format!("expected `coordinate = expression`")))?;
        if !rest.is_empty() {
            return Err(Error::parse(ln, col, format!("cannot read `{line}`")));
        }
        if key == "source" || key == "target" {
            continue;
        }
        let v = GradedFunction::parse(source, value).map_err(|e| relocate(e, ln, vcol))?;
        if named.insert(key.to_string(), v).is_some() {
            return Err(Error::parse(ln, col, format!("`{key}` given twice")));
        }
    }
    CoordMorphism::from_named(source, target, &named)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

/// Attach the file name to errors raised while reading it.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        Error::Config(m) if m.starts_with("cannot read") => Error::Config(m),
        other => other,
    })
}

fn relative(base: &Path, file: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(file)
}

pub fn load_domain(path: &Path) -> Result<DomainSpec> {
    in_file(path, parse_domain(&read(path)?))
}

pub fn load_matrix(dom: &DomainSpec, path: &Path) -> Result<GradedMatrix> {
    in_file(path, parse_matrix(dom, &read(path)?))
}

pub fn load_registry(path: &Path) -> Result<IntegralRegistry> {
    in_file(path, IntegralRegistry::parse(&read(path)?))
}

/// A transformation file whose header names the source and target domain
/// files, relative to the transformation file.
pub fn load_transform(path: &Path) -> Result<CoordMorphism> {
    let src = read(path)?;
    let mut header = BTreeMap::new();
    for (ln, col, line) in lines(&src) {
        if let Some((key @ ("source" | "target"), "", value, _)) = key_value(line, col) {
            header.insert(key, (ln, value.to_string()));
        }
    }
    let dom = |k: &str| -> Result<DomainSpec> {
        let (_, file) = header
            .get(k)
            .ok_or_else(|| Error::parse(1, 1, format!("{}: missing `{k} = <domain file>`", path.display())))?;
        load_domain(&relative(path, file))
    };
    let (s, t) = (dom("source")?, dom("target")?);
    in_file(path, parse_transform(&s, &t, &src))
}

/// A section file; chart and transition files are relative to it.
pub fn load_section(path: &Path) -> Result<BerSection> {
    let src = read(path)?;
    let mut sec = BerSection::new();
    let mut transforms: BTreeMap<PathBuf, CoordMorphism> = BTreeMap::new();
    for (ln, col, line) in lines(&src) {
        let bad = |m: String| Error::parse(ln, col, format!("{}: {m}", path.display()));
        let (key, rest, value, vcol) = key_value(line, col).ok_or_else(|| bad(format!("cannot read `{line}`")))?;
        let here = |e: Error| in_file(path, Err::<(), _>(relocate(e, ln, vcol))).unwrap_err();
        match key {
            "chart" => sec.add_chart(rest, &load_domain(&relative(path, value))?)?,
            "coef" => {
                let dom = sec.chart(rest).ok_or_else(|| bad(format!("unknown chart `{rest}`")))?.clone();
                let f = GradedFunction::parse(&dom, value).map_err(here)?;
                sec.set_coefficient(rest, Coefficient::Function(f))?;
            }
            "laurent" => {
                let (chart, pole) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| bad("expected `laurent CHART POLE = expression`".into()))?;
                let dom = sec.chart(chart).ok_or_else(|| bad(format!("unknown chart `{chart}`")))?.clone();
                let l = LaurentFunction::parse(&dom, pole.trim(), value).map_err(here)?;
                sec.set_coefficient(chart, Coefficient::Laurent(l))?;
            }
            "transition" => {
                let (from, to) = rest
                    .split_once("->")
                    .ok_or_else(|| bad("expected `transition FROM -> TO = file`".into()))?;
                let file = relative(path, value);
                let phi = match transforms.get(&file) {
                    Some(p) => p.clone(),
                    None => {
                        let p = load_transform(&file)?;
                        transforms.insert(file, p.clone());
                        p
                    }
                };
                sec.add_transition(from.trim(), to.trim(), phi)?;
            }
            _ => return Err(bad(format!("unknown section directive `{key}`"))),
        }
    }
    Ok(sec)
}
