//! Scene files: a line-oriented, sectioned text format holding one chart and
//! the geometric objects to analyze on it.
//!
//! ```text
//! [chart]
//! n = 3
//! vars = x0, x1, x2
//! signature = +1
//!
//! [metric]
//! diag(1, 1, 1)
//!
//! [connection]
//! 0 1 1 = x2
//! ```
//!
//! `[metric]` takes either a single `diag(...)` line or `i j = expr` entries
//! (mirrored). `[connection]` and `[connection2]` take sparse `i j k = expr`
//! entries for `Γ^i_{jk}`, mirrored in `j, k`. `[beta]` takes `i = expr`.
//! `[odes]` takes `F1 = expr` and `F2 = expr` in the base and fiber
//! variables. `#` starts a comment. Without a `[chart]` section the chart is
//! `x0, x1, x2`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use projconf::projective::OdePair;
use projconf::{Connection, Metric, Signature, Tensor, Variance, WeylStructure};
use sha2::{Digest, Sha256};
use symkernel::{Chart, Expr, SymError};

use crate::error::CliError;

/// Settings applied on top of what the file declares.
#[derive(Clone, Debug, Default)]
pub struct LoadOptions {
    pub signature: Option<Signature>,
    pub degree_bound: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct Scene {
    /// Base coordinates only; every base object lives here.
    pub chart: Arc<Chart>,
    /// The chart extended by the fiber variables, when dimension 3.
    pub fiber_chart: Option<Arc<Chart>>,
    pub signature: Signature,
    pub metric: Option<Metric>,
    pub connection: Option<Connection>,
    pub connection2: Option<Connection>,
    pub beta: Option<Vec<Expr>>,
    pub odes: Option<OdePair>,
    /// SHA-256 of the file bytes, hex encoded.
    pub digest: String,
}

impl Scene {
    /// The Weyl structure `(g, β)`, with `β = 0` when no `[beta]` is given.
    pub fn weyl_structure(&self) -> Option<Result<WeylStructure, projconf::GeomError>> {
        let g = self.metric.clone()?;
        Some(match &self.beta {
            Some(b) => WeylStructure::new(g, b.clone()),
            None => Ok(WeylStructure::metric_only(g)),
        })
    }
}

pub fn load_scene(path: &Path, options: &LoadOptions) -> Result<Scene, CliError> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let text = String::from_utf8(bytes).map_err(|_| CliError::Scene {
        line: 0,
        column: 0,
        message: "scene file is not valid UTF-8".into(),
    })?;
    parse_scene(&text, options)
}

/// One content line: its 1-based number and text with comments removed.
#[derive(Clone, Debug)]
struct Line {
    number: usize,
    text: String,
}

#[derive(Default)]
struct Sections {
    headers: BTreeMap<String, usize>,
    lines: BTreeMap<String, Vec<Line>>,
}

const SECTION_NAMES: [&str; 6] = ["chart", "metric", "connection", "connection2", "beta", "odes"];

fn err(line: usize, column: usize, message: impl Into<String>) -> CliError {
    CliError::Scene { line, column, message: message.into() }
}

fn split_sections(text: &str) -> Result<Sections, CliError> {
    let mut out = Sections::default();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let number = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let close = rest.find(']').ok_or_else(|| err(number, indent + 1, "unterminated section header"))?;
            let name = rest[..close].trim().to_string();
            if !SECTION_NAMES.contains(&name.as_str()) {
                return Err(err(number, indent + 2, format!("unknown section `{name}`")));
            }
            if out.headers.insert(name.clone(), number).is_some() {
                return Err(err(number, indent + 1, format!("section `{name}` appears twice")));
            }
            out.lines.entry(name.clone()).or_default();
            // Content may follow the header on the same line.
            let tail = &rest[close + 1..];
            if !tail.trim().is_empty() {
                let column = tail.trim_start().as_ptr() as usize - body.as_ptr() as usize;
                out.lines.get_mut(&name).unwrap().push(Line { number, text: pad(column, tail.trim_start()) });
            }
            current = Some(name);
            continue;
        }
        let Some(section) = &current else {
            return Err(err(number, indent + 1, "content before the first section header"));
        };
        out.lines.get_mut(section).unwrap().push(Line { number, text: body.trim_end().to_string() });
    }
    Ok(out)
}

/// Keeps columns meaningful for text lifted from the middle of a line.
fn pad(column: usize, s: &str) -> String {
    format!("{}{}", " ".repeat(column), s)
}

/// `lhs = rhs` split with the byte offset of `rhs` in the line.
fn assignment(line: &Line) -> Result<(&str, &str, usize), CliError> {
    let eq = line.text.find('=').ok_or_else(|| err(line.number, 1, "expected `lhs = value`"))?;
    let rhs = &line.text[eq + 1..];
    let offset = eq + 1 + (rhs.len() - rhs.trim_start().len());
    Ok((line.text[..eq].trim(), rhs.trim(), offset))
}

fn parse_expr(chart: &Chart, text: &str, line: usize, offset: usize) -> Result<Expr, CliError> {
    chart.parse(text).map_err(|e| {
        let (position, message) = match &e {
            SymError::Syntax { position, message } => (*position, message.clone()),
            SymError::UnknownVariable { name, position } => (*position, format!("undeclared variable `{name}`")),
            other => (0, other.to_string()),
        };
        err(line, offset + position + 1, message)
    })
}

fn indices(line: &Line, lhs: &str, count: usize, n: usize) -> Result<Vec<usize>, CliError> {
    let parts: Vec<&str> = lhs.split_whitespace().collect();
    if parts.len() != count {
        return Err(err(line.number, 1, format!("expected {count} indices before `=`")));
    }
    parts
        .iter()
        .map(|p| match p.parse::<usize>() {
            Ok(i) if i < n => Ok(i),
            _ => Err(err(line.number, line.text.find(p).map_or(1, |c| c + 1), format!("index `{p}` outside 0..{n}"))),
        })
        .collect()
}

/// Splits at commas that are not nested inside parentheses, with offsets.
fn split_top_level(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
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

struct ChartDecl {
    n: Option<(usize, usize)>,
    vars: Option<(Vec<String>, usize)>,
    fiber: Option<(Vec<String>, usize)>,
    signature: Option<i64>,
}

fn parse_chart_section(lines: &[Line]) -> Result<ChartDecl, CliError> {
    let mut decl = ChartDecl { n: None, vars: None, fiber: None, signature: None };
    for line in lines {
        // Either one `key = value` per line, or several `key=value` tokens.
        let pairs: Vec<(String, String)> = if line.text.matches('=').count() <= 1 {
            let (k, v, _) = assignment(line)?;
            vec![(k.to_string(), v.to_string())]
        } else {
            line.text
                .split_whitespace()
                .map(|tok| {
                    tok.split_once('=')
                        .map(|(k, v)| (k.to_string(), v.to_string()))
                        .ok_or_else(|| err(line.number, 1, format!("expected key=value, got `{tok}`")))
                })
                .collect::<Result<_, _>>()?
        };
        for (key, value) in pairs {
            let names = || -> Vec<String> {
                value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
            };
            match key.as_str() {
                "n" => {
                    let n = value
                        .parse::<usize>()
                        .map_err(|_| err(line.number, 1, format!("`{value}` is not a dimension")))?;
                    decl.n = Some((n, line.number));
                }
                "vars" => decl.vars = Some((names(), line.number)),
                "fiber" => decl.fiber = Some((names(), line.number)),
                "signature" => {
                    let eps = value.parse::<i64>().ok().filter(|e| *e == 1 || *e == -1);
                    decl.signature = Some(eps.ok_or_else(|| err(line.number, 1, "signature must be +1 or -1"))?);
                }
                other => return Err(err(line.number, 1, format!("unknown chart key `{other}`"))),
            }
        }
    }
    Ok(decl)
}

fn build_chart(
    decl: &ChartDecl,
    has_odes: bool,
    options: &LoadOptions,
) -> Result<(Arc<Chart>, Option<Arc<Chart>>), CliError> {
    let sym = |line: usize| move |e: SymError| err(line, 1, e.to_string());
    let base = match (&decl.n, &decl.vars) {
        (_, Some((names, line))) => {
            if let Some((n, nline)) = decl.n {
                if n != names.len() {
                    return Err(err(nline, 1, format!("n = {n} but {} variables are declared", names.len())));
                }
            }
            Chart::with_names(names.clone()).map_err(sym(*line))?
        }
        (Some((n, line)), None) => Chart::new(*n).map_err(sym(*line))?,
        (None, None) => Chart::new(3).expect("three coordinates form a valid chart"),
    };
    let base = match options.degree_bound {
        Some(d) => base.with_degree_bound(d),
        None => base,
    };
    let fiber = match &decl.fiber {
        Some((names, line)) => {
            if names.len() != 2 {
                return Err(err(*line, 1, "exactly two fiber variables are needed"));
            }
            Some(base.clone().with_fiber([&names[0], &names[1]]).map_err(sym(*line))?)
        }
        None if base.dim() == 3 => Some(base.fibered().expect("dimension 3 admits fiber variables")),
        None => None,
    };
    if has_odes && fiber.is_none() {
        return Err(err(decl.n.map_or(1, |x| x.1), 1, "an [odes] section needs a 3-dimensional chart"));
    }
    Ok((Arc::new(base), fiber.map(Arc::new)))
}

fn parse_metric(chart: &Arc<Chart>, header: usize, lines: &[Line], signature: Signature) -> Result<Metric, CliError> {
    let n = chart.dim();
    let mut g = Tensor::zeros(chart, &[Variance::Down, Variance::Down]);
    if let [line] = lines {
        if let Some(start) = line.text.find("diag(") {
            let inner_start = start + 5;
            let close = line
                .text
                .rfind(')')
                .filter(|c| *c >= inner_start)
                .ok_or_else(|| err(line.number, start + 1, "unclosed diag("))?;
            let parts = split_top_level(&line.text[inner_start..close]);
            if parts.len() != n {
                return Err(err(line.number, start + 1, format!("diag needs {n} entries, got {}", parts.len())));
            }
            for (i, (off, part)) in parts.iter().enumerate() {
                let lead = part.len() - part.trim_start().len();
                g.set(&[i, i], parse_expr(chart, part.trim(), line.number, inner_start + off + lead)?);
            }
            return Metric::new(g, signature).map_err(|e| err(header, 1, e.to_string()));
        }
    }
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for line in lines {
        let (lhs, rhs, offset) = assignment(line)?;
        let ix = indices(line, lhs, 2, n)?;
        let e = parse_expr(chart, rhs, line.number, offset)?;
        let key = (ix[0].min(ix[1]), ix[0].max(ix[1]));
        if let Some(prev) = seen.insert(key, line.number) {
            if g.get(&ix) != &e {
                return Err(err(line.number, 1, format!("conflicts with the entry on line {prev}")));
            }
        }
        g.set(&[ix[0], ix[1]], e.clone());
        g.set(&[ix[1], ix[0]], e);
    }
    Metric::new(g, signature).map_err(|e| err(header, 1, e.to_string()))
}

fn parse_connection(chart: &Arc<Chart>, lines: &[Line]) -> Result<Connection, CliError> {
    let n = chart.dim();
    let mut entries: BTreeMap<(usize, usize, usize), (Expr, usize)> = BTreeMap::new();
    for line in lines {
        let (lhs, rhs, offset) = assignment(line)?;
        let ix = indices(line, lhs, 3, n)?;
        let e = parse_expr(chart, rhs, line.number, offset)?;
        let key = (ix[0], ix[1].min(ix[2]), ix[1].max(ix[2]));
        if let Some((prev, prev_line)) = entries.get(&key) {
            if prev != &e {
                return Err(err(
                    line.number,
                    1,
                    format!("conflicts with the entry on line {prev_line}; connections are torsion-free"),
                ));
            }
        }
        entries.insert(key, (e, line.number));
    }
    let list: Vec<(usize, usize, usize, Expr)> = entries.into_iter().map(|((i, j, k), (e, _))| (i, j, k, e)).collect();
    Connection::from_entries(chart, &list).map_err(|e| err(lines.first().map_or(0, |l| l.number), 1, e.to_string()))
}

fn parse_beta(chart: &Arc<Chart>, lines: &[Line]) -> Result<Vec<Expr>, CliError> {
    let mut beta = vec![Expr::zero(); chart.dim()];
    for line in lines {
        let (lhs, rhs, offset) = assignment(line)?;
        let i = indices(line, lhs, 1, chart.dim())?[0];
        beta[i] = parse_expr(chart, rhs, line.number, offset)?;
    }
    Ok(beta)
}

fn parse_odes(chart: &Arc<Chart>, header: usize, lines: &[Line]) -> Result<OdePair, CliError> {
    let mut f: [Option<Expr>; 2] = [None, None];
    for line in lines {
        let (lhs, rhs, offset) = assignment(line)?;
        let slot = match lhs {
            "F1" => 0,
            "F2" => 1,
            other => return Err(err(line.number, 1, format!("expected F1 or F2, got `{other}`"))),
        };
        f[slot] = Some(parse_expr(chart, rhs, line.number, offset)?);
    }
    let [Some(f1), Some(f2)] = f else {
        return Err(err(header, 1, "[odes] needs both F1 and F2"));
    };
    OdePair::new(chart, f1, f2).map_err(|e| err(header, 1, e.to_string()))
}

pub fn parse_scene(text: &str, options: &LoadOptions) -> Result<Scene, CliError> {
    let sections = split_sections(text)?;
    let lines = |name: &str| sections.lines.get(name).map(Vec::as_slice);
    let header = |name: &str| sections.headers.get(name).copied().unwrap_or(0);
    let decl = parse_chart_section(lines("chart").unwrap_or(&[]))?;
    let (chart, fiber_chart) = build_chart(&decl, sections.lines.contains_key("odes"), options)?;
    let signature =
        options.signature.or_else(|| decl.signature.and_then(Signature::from_epsilon)).unwrap_or(Signature::Riemannian);

    let metric = lines("metric").map(|l| parse_metric(&chart, header("metric"), l, signature)).transpose()?;
    let connection = lines("connection").map(|l| parse_connection(&chart, l)).transpose()?;
    let connection2 = lines("connection2").map(|l| parse_connection(&chart, l)).transpose()?;
    let beta = lines("beta").map(|l| parse_beta(&chart, l)).transpose()?;
    let odes = match (lines("odes"), &fiber_chart) {
        (Some(l), Some(fc)) => Some(parse_odes(fc, header("odes"), l)?),
        _ => None,
    };
    if metric.is_none() && connection.is_none() && odes.is_none() {
        return Err(err(0, 0, "the scene declares no metric, connection or ODE pair"));
    }
    if beta.is_some() && metric.is_none() {
        return Err(err(header("beta"), 1, "[beta] needs a [metric]"));
    }
    let digest = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    Ok(Scene { chart, fiber_chart, signature, metric, connection, connection2, beta, odes, digest })
}
