//! Pajek `.net` reader and writer.
//!
//! Output layout is canonical: `*Vertices N`, optional `i "label"` lines in
//! id order, `*Arcs`, then one `s d` line per unique arc in lexicographic
//! order, all 1-based. Arc multiplicity is not written.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError, NodeId};

#[derive(Debug, Error)]
pub enum PajekError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{message}, line {line}")]
    Parse { line: usize, message: String },
    #[error("node {0} has no address to write as a label")]
    MissingLabel(usize),
    #[error("label {0:?} cannot be written (contains a quote or line break)")]
    UnencodableLabel(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> PajekError {
    PajekError::Parse {
        line,
        message: message.into(),
    }
}

pub fn write_pajek<W: Write>(graph: &DirectedGraph, include_labels: bool, out: W) -> Result<(), PajekError> {
    let mut out = io::BufWriter::new(out);
    writeln!(out, "*Vertices {}", graph.node_count())?;
    if include_labels {
        for v in graph.nodes() {
            let label = graph.address(v).ok_or(PajekError::MissingLabel(v.index() + 1))?;
            if label.contains(['"', '\n', '\r']) {
                return Err(PajekError::UnencodableLabel(label.to_owned()));
            }
            writeln!(out, "{} \"{}\"", v.index() + 1, label)?;
        }
    }
    writeln!(out, "*Arcs")?;
    for (s, d) in graph.sorted_arcs() {
        writeln!(out, "{} {}", s.index() + 1, d.index() + 1)?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_pajek_string(graph: &DirectedGraph, include_labels: bool) -> Result<String, PajekError> {
    let mut buf = Vec::new();
    write_pajek(graph, include_labels, &mut buf)?;
    Ok(String::from_utf8(buf).expect("pajek output is utf-8"))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Vertices,
    Arcs,
    Edges,
}

fn parse_index(token: &str, vertex_count: usize, line: usize) -> Result<usize, PajekError> {
    let idx: usize = token
        .parse()
        .map_err(|_| parse_err(line, format!("non-integer token {token:?}")))?;
    if idx == 0 || idx > vertex_count {
        return Err(parse_err(line, "index out of range"));
    }
    Ok(idx - 1)
}

/// Splits `i "label"` / `i label` / `i` into index and optional label.
fn split_vertex_line(text: &str) -> (&str, Option<&str>) {
    let (idx, rest) = match text.find(char::is_whitespace) {
        Some(p) => (&text[..p], text[p..].trim()),
        None => return (text, None),
    };
    if rest.is_empty() {
        return (idx, None);
    }
    if let Some(stripped) = rest.strip_prefix('"') {
        let label = match stripped.find('"') {
            Some(end) => &stripped[..end],
            None => stripped,
        };
        return (idx, Some(label));
    }
    let label = rest.split_whitespace().next();
    (idx, label)
}

pub fn read_pajek<R: BufRead>(input: R) -> Result<DirectedGraph, PajekError> {
    let mut graph: Option<DirectedGraph> = None;
    let mut vertex_count = 0usize;
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut labels_applied = false;
    let mut section = Section::Vertices;

    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }

        if let Some(header) = text.strip_prefix('*') {
            let mut parts = header.split_whitespace();
            let keyword = parts.next().unwrap_or("").to_ascii_lowercase();
            match keyword.as_str() {
                "vertices" if graph.is_none() => {
                    let count = parts.next().ok_or_else(|| parse_err(line_no, "missing vertex count"))?;
                    vertex_count = count
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("non-integer token {count:?}")))?;
                    graph = Some(DirectedGraph::with_nodes(vertex_count));
                    labels = vec![None; vertex_count];
                    section = Section::Vertices;
                }
                "vertices" => return Err(parse_err(line_no, "duplicate *Vertices header")),
                "arcs" | "edges" => {
                    let g = graph.as_mut().ok_or_else(|| parse_err(line_no, "missing *Vertices header"))?;
                    if !labels_applied {
                        apply_labels(g, &labels, line_no)?;
                        labels_applied = true;
                    }
                    section = if keyword == "arcs" { Section::Arcs } else { Section::Edges };
                }
                _ => return Err(parse_err(line_no, format!("unsupported section *{keyword}"))),
            }
            continue;
        }

        let Some(g) = graph.as_mut() else {
            return Err(parse_err(line_no, "missing *Vertices header"));
        };
        match section {
            Section::Vertices => {
                let (idx, label) = split_vertex_line(text);
                let idx = parse_index(idx, vertex_count, line_no)?;
                if let Some(label) = label {
                    if labels[idx].is_some() {
                        return Err(parse_err(line_no, format!("vertex {} labeled twice", idx + 1)));
                    }
                    labels[idx] = Some(label.to_owned());
                }
            }
            Section::Arcs | Section::Edges => {
                let mut tokens = text.split_whitespace();
                let (Some(s), Some(d)) = (tokens.next(), tokens.next()) else {
                    return Err(parse_err(line_no, "expected two vertex indices"));
                };
                if let Some(extra) = tokens.next() {
                    return Err(parse_err(line_no, format!("unexpected token {extra:?}")));
                }
                let s = NodeId(parse_index(s, vertex_count, line_no)? as u32);
                let d = NodeId(parse_index(d, vertex_count, line_no)? as u32);
                g.add_arc(s, d).map_err(|e| parse_err(line_no, e.to_string()))?;
                if section == Section::Edges {
                    g.add_arc(d, s).map_err(|e| parse_err(line_no, e.to_string()))?;
                }
            }
        }
    }

    let mut g = graph.ok_or_else(|| parse_err(0, "missing *Vertices header"))?;
    if !labels_applied {
        apply_labels(&mut g, &labels, 0)?;
    }
    Ok(g)
}

fn apply_labels(g: &mut DirectedGraph, labels: &[Option<String>], line_no: usize) -> Result<(), PajekError> {
    let present = labels.iter().filter(|l| l.is_some()).count();
    if present == 0 {
        return Ok(());
    }
    if present != labels.len() {
        return Err(parse_err(
            line_no,
            format!("labels cover {present} of {} vertices", labels.len()),
        ));
    }
    for (i, label) in labels.iter().enumerate() {
        let label = label.as_deref().expect("checked above");
        g.set_address(NodeId(i as u32), label).map_err(|e| match e {
            GraphError::DuplicateAddress(a) => parse_err(line_no, format!("duplicate label {a:?}")),
            other => parse_err(line_no, other.to_string()),
        })?;
    }
    Ok(())
}
