//! Line-based text format for graphs and Dirichlet problems.
//!
//! ```text
//! # comment
//! graph <n_vertices> <root_id>
//! truncation <hop_radius>          (optional)
//! mu <vertex> <value>
//! edge <x> <y> <omega>
//! ```
//!
//! `tree <b> <R> <c>` may replace the `graph` header; it expands to the
//! homogeneous model tree. Problem files append
//!
//! ```text
//! omega <vertex> <vertex> ...
//! potential <vertex> <value>
//! dirichlet-f <vertex> <value>
//! dirichlet-g <vertex> <value>
//! ```
//!
//! Floats are written with 17 significant digits, so a write/read cycle
//! reproduces every weight and measure bit for bit.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generators::{build_model_tree, ModelTreeSpec, DEFAULT_MAX_VERTICES};
use crate::graph::{VertexField, WeightedGraph};

/// A graph plus the data of a Dirichlet problem on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub graph: WeightedGraph,
    pub interior: Vec<usize>,
    pub potential: VertexField,
    pub f: VertexField,
    pub g: VertexField,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

fn float(tok: Option<&str>, line: usize, what: &str) -> Result<f64> {
    let v: f64 = field(tok, line, what)?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite {what}")));
    }
    Ok(v)
}

enum Header {
    Graph { n: usize, root: usize },
    Tree(ModelTreeSpec),
}

#[derive(Default)]
struct Parsed {
    header: Option<(usize, Header)>,
    truncation: Option<usize>,
    measure: HashMap<usize, f64>,
    edges: Vec<(usize, usize, f64)>,
    edge_lines: HashMap<(usize, usize), (f64, usize)>,
    interior: BTreeSet<usize>,
    potential: Vec<(usize, f64, usize)>,
    f: Vec<(usize, f64, usize)>,
    g: Vec<(usize, f64, usize)>,
}

impl Parsed {
    fn check_vertex(&self, v: usize, line: usize) -> Result<()> {
        if let Some((_, Header::Graph { n, .. })) = &self.header {
            if v >= *n {
                return Err(parse_err(line, format!("vertex {v} out of range (n = {n})")));
            }
        }
        Ok(())
    }
}

fn parse_lines(text: &str, max_vertices: usize, allow_problem: bool) -> Result<Parsed> {
    let mut p = Parsed::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let keyword = toks.next().unwrap_or_default();
        match keyword {
            "graph" | "tree" => {
                if p.header.is_some() {
                    return Err(parse_err(line, "duplicate header"));
                }
                let header = if keyword == "graph" {
                    let n: usize = field(toks.next(), line, "vertex count")?;
                    let root: usize = field(toks.next(), line, "root id")?;
                    if n > max_vertices {
                        return Err(parse_err(line, format!("{n} vertices exceeds limit {max_vertices}")));
                    }
                    Header::Graph { n, root }
                } else {
                    let b: usize = field(toks.next(), line, "branching")?;
                    let depth: usize = field(toks.next(), line, "depth")?;
                    let c = float(toks.next(), line, "measure constant")?;
                    Header::Tree(ModelTreeSpec::new(b, depth, c).with_max_vertices(max_vertices))
                };
                p.header = Some((line, header));
            }
            "truncation" => {
                p.truncation = Some(field(toks.next(), line, "truncation radius")?);
            }
            "mu" => {
                let v: usize = field(toks.next(), line, "vertex")?;
                let value = float(toks.next(), line, "measure")?;
                p.check_vertex(v, line)?;
                if p.measure.insert(v, value).is_some() {
                    return Err(parse_err(line, format!("duplicate measure for vertex {v}")));
                }
            }
            "edge" => {
                let x: usize = field(toks.next(), line, "vertex")?;
                let y: usize = field(toks.next(), line, "vertex")?;
                let w = float(toks.next(), line, "weight")?;
                p.check_vertex(x, line)?;
                p.check_vertex(y, line)?;
                let key = (x.min(y), x.max(y));
                if let Some(&(prev, prev_line)) = p.edge_lines.get(&key) {
                    if prev != w {
                        return Err(parse_err(
                            line,
                            format!("edge ({x}, {y}) weight {w} conflicts with {prev} from line {prev_line}"),
                        ));
                    }
                }
                p.edge_lines.insert(key, (w, line));
                p.edges.push((x, y, w));
            }
            "omega" if allow_problem => {
                for tok in toks.by_ref() {
                    p.interior.insert(field(Some(tok), line, "vertex")?);
                }
            }
            "potential" | "dirichlet-f" | "dirichlet-g" if allow_problem => {
                let v: usize = field(toks.next(), line, "vertex")?;
                let value = float(toks.next(), line, "value")?;
                let entry = (v, value, line);
                match keyword {
                    "potential" => p.potential.push(entry),
                    "dirichlet-f" => p.f.push(entry),
                    _ => p.g.push(entry),
                }
            }
            other => return Err(parse_err(line, format!("unknown keyword `{other}`"))),
        }
        if let Some(extra) = toks.next() {
            return Err(parse_err(line, format!("unexpected token `{extra}`")));
        }
    }
    Ok(p)
}

fn graph_from(p: &Parsed) -> Result<WeightedGraph> {
    let (header_line, header) = p
        .header
        .as_ref()
        .ok_or_else(|| parse_err(1, "missing `graph` or `tree` header"))?;
    let graph = match header {
        Header::Tree(spec) => {
            if !p.edges.is_empty() || !p.measure.is_empty() {
                return Err(parse_err(
                    *header_line,
                    "`tree` header cannot be combined with edge or mu lines",
                ));
            }
            build_model_tree(spec).map_err(|e| parse_err(*header_line, e.to_string()))?
        }
        Header::Graph { n, root } => {
            let mut measure = vec![f64::NAN; *n];
            for (&v, &value) in &p.measure {
                if v >= *n {
                    return Err(parse_err(*header_line, format!("mu for vertex {v} out of range")));
                }
                measure[v] = value;
            }
            if let Some(v) = measure.iter().position(|m| m.is_nan()) {
                return Err(parse_err(*header_line, format!("missing mu for vertex {v}")));
            }
            let g =
                WeightedGraph::build(&p.edges, measure, *root).map_err(|e| parse_err(*header_line, e.to_string()))?;
            match p.truncation {
                Some(r) => g.with_truncation(r),
                None => g,
            }
        }
    };
    Ok(graph)
}

fn field_from(entries: &[(usize, f64, usize)], n: usize) -> Result<VertexField> {
    let mut values = vec![0.0; n];
    for &(v, value, line) in entries {
        if v >= n {
            return Err(parse_err(line, format!("vertex {v} out of range")));
        }
        values[v] = value;
    }
    Ok(VertexField::new(values))
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    parse_graph_with_limit(text, DEFAULT_MAX_VERTICES)
}

pub fn parse_graph_with_limit(text: &str, max_vertices: usize) -> Result<WeightedGraph> {
    graph_from(&parse_lines(text, max_vertices, false)?)
}

pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    parse_problem_with_limit(text, DEFAULT_MAX_VERTICES)
}

pub fn parse_problem_with_limit(text: &str, max_vertices: usize) -> Result<ProblemFile> {
    let p = parse_lines(text, max_vertices, true)?;
    let graph = graph_from(&p)?;
    let n = graph.len();
    if let Some(&v) = p.interior.iter().find(|&&v| v >= n) {
        return Err(parse_err(1, format!("omega vertex {v} out of range")));
    }
    Ok(ProblemFile {
        interior: p.interior.iter().copied().collect(),
        potential: field_from(&p.potential, n)?,
        f: field_from(&p.f, n)?,
        g: field_from(&p.g, n)?,
        graph,
    })
}

pub fn format_graph(graph: &WeightedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {} {}", graph.len(), graph.root());
    if let Some(r) = graph.truncation() {
        let _ = writeln!(out, "truncation {r}");
    }
    for (x, mu) in graph.measures().iter().enumerate() {
        let _ = writeln!(out, "mu {x} {mu:.16e}");
    }
    for (x, y, w) in graph.edges() {
        let _ = writeln!(out, "edge {x} {y} {w:.16e}");
    }
    out
}

pub fn format_problem(problem: &ProblemFile) -> String {
    let mut out = format_graph(&problem.graph);
    if !problem.interior.is_empty() {
        out.push_str("omega");
        for v in &problem.interior {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    for (key, field) in [
        ("potential", &problem.potential),
        ("dirichlet-f", &problem.f),
        ("dirichlet-g", &problem.g),
    ] {
        for (x, &v) in field.values().iter().enumerate() {
            if v != 0.0 {
                let _ = writeln!(out, "{key} {x} {v:.16e}");
            }
        }
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn write_graph(path: impl AsRef<Path>, graph: &WeightedGraph) -> Result<()> {
    fs::write(path, format_graph(graph))?;
    Ok(())
}

pub fn read_problem(path: impl AsRef<Path>) -> Result<ProblemFile> {
    parse_problem(&fs::read_to_string(path)?)
}

pub fn write_problem(path: impl AsRef<Path>, problem: &ProblemFile) -> Result<()> {
    fs::write(path, format_problem(problem))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn malformed_edge_line() {
        let text = "graph 2 0\nmu 0 1\nmu 1 1\nedge 0 x 1.0\n";
        assert_eq!(
            parse_graph(text),
            Err(Error::Parse {
                line: 4,
                message: "invalid vertex `x`".into()
            })
        );
    }

    #[test]
    fn conflicting_symmetric_weights() {
        let text = "graph 2 0\nmu 0 1\nmu 1 1\nedge 0 1 1.0\nedge 1 0 2.0\n";
        assert!(matches!(parse_graph(text), Err(Error::Parse { line: 5, .. })));
        // consistent duplicate is fine
        let ok = "graph 2 0\nmu 0 1\nmu 1 1\nedge 0 1 1.0\nedge 1 0 1.0\n";
        assert_eq!(parse_graph(ok).unwrap().weight(0, 1), 1.0);
    }

    #[test]
    fn tree_shorthand_and_comments() {
        let g = parse_graph("# binary tree\ntree 2 3 1.0  # trailing\n").unwrap();
        assert_eq!(g.len(), 15);
        assert_eq!(g.truncation(), Some(3));
    }

    #[test]
    fn missing_measure() {
        assert!(matches!(
            parse_graph("graph 2 0\nmu 0 1\nedge 0 1 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn problem_blocks() {
        let text = "graph 3 0\nmu 0 1\nmu 1 1\nmu 2 1\nedge 0 1 1\nedge 1 2 1\n\
                    omega 1\ndirichlet-g 2 2.0\npotential 1 3\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.interior, vec![1]);
        assert_eq!(p.g.values(), &[0.0, 0.0, 2.0]);
        assert_eq!(p.potential[1], 3.0);
        let again = parse_problem(&format_problem(&p)).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn problem_keywords_rejected_in_graph_files() {
        let text = "graph 1 0\nmu 0 1\nomega 0\n";
        assert!(matches!(parse_graph(text), Err(Error::Parse { line: 3, .. })));
    }
}
