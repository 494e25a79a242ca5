use super::graph::Graph;
use super::hhd::{EdgeFlow, HhdResult};
use super::GraphError;
use crate::cli::format_number;
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

/// A parsed edge list, with flow values when every line carries one.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub graph: Graph,
    pub flow: Option<EdgeFlow>,
}

fn parse_id(tok: &str, line: usize) -> Result<usize, GraphError> {
    tok.parse().map_err(|_| GraphError::Parse {
        line,
        message: format!("vertex id {tok:?} is not a non-negative integer"),
    })
}

/// Parses whitespace-separated lines `i j [flow]` with 0-based ids.
///
/// Blank lines and lines starting with `#` are skipped. An edge written as
/// `j i` with `j > i` is stored as `(i, j)` with its flow negated. Either
/// every edge has a flow or none does. Errors cite 1-based line numbers.
pub fn parse_edge_list(text: &str) -> Result<EdgeList, GraphError> {
    let mut edges = Vec::new();
    let mut flows = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut with_flow: Option<bool> = None;
    let mut max_id = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if !(2..=3).contains(&toks.len()) {
            return Err(GraphError::Parse {
                line,
                message: format!("expected `i j [flow]`, found {} fields", toks.len()),
            });
        }
        let (i, j) = (parse_id(toks[0], line)?, parse_id(toks[1], line)?);
        if i == j {
            return Err(GraphError::Parse {
                line,
                message: format!("self-loop at vertex {i}"),
            });
        }
        let has = toks.len() == 3;
        match with_flow {
            None => with_flow = Some(has),
            Some(prev) if prev != has => {
                return Err(GraphError::Parse {
                    line,
                    message: "flow column must be present on every line or on none".into(),
                })
            }
            _ => {}
        }
        let mut value = 0.0;
        if has {
            value = toks[2]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| GraphError::Parse {
                    line,
                    message: format!("flow {:?} is not a finite number", toks[2]),
                })?;
        }
        let key = (i.min(j), i.max(j));
        if let Some(first) = seen.insert(key, line) {
            return Err(GraphError::Parse {
                line,
                message: format!(
                    "duplicate edge {{{}, {}}} first seen on line {first}",
                    key.0, key.1
                ),
            });
        }
        max_id = max_id.max(key.1);
        edges.push(key);
        flows.push(if i < j { value } else { -value });
    }
    if edges.is_empty() {
        return Err(GraphError::Parse {
            line: 0,
            message: "edge list is empty".into(),
        });
    }
    let graph = Graph::new(max_id + 1, edges)?;
    let flow = with_flow.unwrap_or(false).then(|| EdgeFlow::new(flows));
    Ok(EdgeList { graph, flow })
}

pub fn read_edge_list(path: &Path) -> Result<EdgeList, GraphError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| GraphError::Io(format!("{}: {e}", path.display())))?;
    parse_edge_list(&text)
}

/// Writes `edge_src,edge_dst,f,f_t,f_c`, one row per canonical edge.
pub fn write_hhd_csv<W: Write>(
    out: &mut W,
    g: &Graph,
    f: &EdgeFlow,
    h: &HhdResult,
) -> Result<(), GraphError> {
    let io = |e: std::io::Error| GraphError::Io(e.to_string());
    writeln!(out, "edge_src,edge_dst,f,f_t,f_c").map_err(io)?;
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        writeln!(
            out,
            "{i},{j},{},{},{}",
            format_number(f.values[k]),
            format_number(h.transitive.values[k]),
            format_number(h.cyclic.values[k])
        )
        .map_err(io)?;
    }
    Ok(())
}
