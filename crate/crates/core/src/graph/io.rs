//! Tabular flattening and the JSON / CSV / DOT renderings of a graph.

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::{CausalGraph, EdgeRecord, GraphError};
use crate::numfmt::g17;

pub const TABLE_HEADER: [&str; 5] = ["Source", "Sink", "Lag", "CMI", "P-value"];

/// Widest pen used for the strongest edge in DOT output.
const MAX_PENWIDTH: f64 = 5.0;
const MIN_PENWIDTH: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    EdgeListCsv,
    Dot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub source: String,
    pub sink: String,
    pub lag: usize,
    pub cmi: f64,
    pub p_value: f64,
}

/// One row per lag-resolved edge, ordered by `(source, sink, lag)`.
pub fn to_table(g: &CausalGraph) -> Vec<TableRow> {
    g.edges()
        .iter()
        .map(|e| TableRow {
            source: g.node_name(e.source).to_string(),
            sink: g.node_name(e.sink).to_string(),
            lag: e.lag,
            cmi: e.cmi,
            p_value: e.p_value,
        })
        .collect()
}

pub fn write_table<W: std::io::Write>(g: &CausalGraph, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_HEADER)?;
    for row in to_table(g) {
        w.write_record([
            row.source,
            row.sink,
            row.lag.to_string(),
            g17(row.cmi),
            g17(row.p_value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn raw_number(x: f64) -> Box<RawValue> {
    RawValue::from_string(g17(x)).expect("finite number renders as valid JSON")
}

#[derive(Serialize)]
struct JsonEdgeOut {
    source: usize,
    sink: usize,
    lag: usize,
    cmi: Box<RawValue>,
    p_value: Box<RawValue>,
}

#[derive(Serialize)]
struct JsonGraphOut<'a> {
    n_nodes: usize,
    node_names: &'a [String],
    edges: Vec<JsonEdgeOut>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraphIn {
    n_nodes: usize,
    node_names: Option<Vec<String>>,
    edges: Vec<EdgeRecord>,
}

fn to_json(g: &CausalGraph) -> Vec<u8> {
    let doc = JsonGraphOut {
        n_nodes: g.n_nodes(),
        node_names: g.node_names(),
        edges: g
            .edges()
            .iter()
            .map(|e| JsonEdgeOut {
                source: e.source,
                sink: e.sink,
                lag: e.lag,
                cmi: raw_number(e.cmi),
                p_value: raw_number(e.p_value),
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("graph serializes");
    out.push(b'\n');
    out
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn to_dot(g: &CausalGraph) -> Vec<u8> {
    use std::fmt::Write;
    let max_cmi = g.edges().iter().map(|e| e.cmi).fold(0.0, f64::max);
    let mut s = String::from("digraph causal_network {\n  rankdir=LR;\n  node [shape=circle];\n");
    for name in g.node_names() {
        let _ = writeln!(s, "  {};", dot_quote(name));
    }
    for e in g.edges() {
        let pen = if max_cmi > 0.0 {
            (MAX_PENWIDTH * e.cmi / max_cmi).max(MIN_PENWIDTH)
        } else {
            1.0
        };
        let _ = writeln!(
            s,
            "  {} -> {} [label=\"lag={}\", penwidth={}, tooltip=\"cmi={} p={}\"];",
            dot_quote(g.node_name(e.source)),
            dot_quote(g.node_name(e.sink)),
            e.lag,
            g17(pen),
            g17(e.cmi),
            g17(e.p_value),
        );
    }
    s.push_str("}\n");
    s.into_bytes()
}

pub fn serialize(g: &CausalGraph, format: Format) -> Vec<u8> {
    match format {
        Format::Json => to_json(g),
        Format::EdgeListCsv => {
            let mut buf = Vec::new();
            write_table(g, &mut buf).expect("in-memory CSV write");
            buf
        }
        Format::Dot => to_dot(g),
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> GraphError {
    GraphError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses the JSON rendering back into a graph, validating every edge.
pub fn deserialize_json(bytes: &[u8]) -> Result<CausalGraph, GraphError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: JsonGraphIn = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })?;

    let names = match doc.node_names {
        Some(names) if names.len() != doc.n_nodes => {
            return Err(schema(
                "node_names",
                format!("{} names for {} nodes", names.len(), doc.n_nodes),
            ))
        }
        Some(names) => names,
        None => crate::series::default_names(doc.n_nodes),
    };
    let mut g = CausalGraph::with_names(names);
    for (i, e) in doc.edges.into_iter().enumerate() {
        if e.source >= doc.n_nodes {
            return Err(schema(format!("edges[{i}].source"), "node index out of range"));
        }
        if e.sink >= doc.n_nodes {
            return Err(schema(format!("edges[{i}].sink"), "node index out of range"));
        }
        if e.lag == 0 {
            return Err(schema(format!("edges[{i}].lag"), "lag must be at least 1"));
        }
        if !(e.p_value > 0.0 && e.p_value <= 1.0) {
            return Err(schema(format!("edges[{i}].p_value"), "p-value must lie in (0, 1]"));
        }
        g.add_edge(e)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CausalGraph {
        CausalGraph::from_edges(
            crate::series::default_names(3),
            [
                EdgeRecord { source: 0, sink: 1, lag: 1, cmi: 0.34, p_value: 0.005 },
                EdgeRecord { source: 2, sink: 1, lag: 2, cmi: 0.17, p_value: 0.02 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_table_is_header_only() {
        let g = CausalGraph::new(4);
        assert!(to_table(&g).is_empty());
        let csv = String::from_utf8(serialize(&g, Format::EdgeListCsv)).unwrap();
        assert_eq!(csv, "Source,Sink,Lag,CMI,P-value\n");
    }

    #[test]
    fn single_edge_row() {
        let g = CausalGraph::from_edges(
            crate::series::default_names(2),
            [EdgeRecord { source: 0, sink: 1, lag: 1, cmi: 0.34, p_value: 0.005 }],
        )
        .unwrap();
        let rows = to_table(&g);
        assert_eq!(
            rows,
            vec![TableRow { source: "X0".into(), sink: "X1".into(), lag: 1, cmi: 0.34, p_value: 0.005 }]
        );
    }

    #[test]
    fn csv_has_header_plus_rows() {
        let csv = String::from_utf8(serialize(&sample(), Format::EdgeListCsv)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "X0,X1,1,0.34000000000000002,0.0050000000000000001");
    }

    #[test]
    fn csv_quotes_awkward_names() {
        let g = CausalGraph::from_edges(
            vec!["a,b".into(), "say \"hi\"".into()],
            [EdgeRecord { source: 0, sink: 1, lag: 1, cmi: 1.0, p_value: 1.0 }],
        )
        .unwrap();
        let csv = String::from_utf8(serialize(&g, Format::EdgeListCsv)).unwrap();
        assert_eq!(csv.lines().nth(1).unwrap(), "\"a,b\",\"say \"\"hi\"\"\",1,1,1");
    }

    #[test]
    fn json_round_trip() {
        let g = sample();
        let bytes = serialize(&g, Format::Json);
        assert_eq!(deserialize_json(&bytes).unwrap(), g);
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("\"cmi\": 0.34000000000000002"));
    }

    #[test]
    fn dot_lists_isolated_nodes() {
        let dot = String::from_utf8(serialize(&CausalGraph::new(3), Format::Dot)).unwrap();
        assert!(dot.starts_with("digraph"));
        for name in ["\"X0\";", "\"X1\";", "\"X2\";"] {
            assert!(dot.contains(name));
        }
        assert!(!dot.contains("->"));
    }

    #[test]
    fn dot_edges_carry_lag_and_width() {
        let dot = String::from_utf8(serialize(&sample(), Format::Dot)).unwrap();
        assert!(dot.contains("\"X0\" -> \"X1\" [label=\"lag=1\", penwidth=5,"));
        assert!(dot.contains("\"X2\" -> \"X1\" [label=\"lag=2\", penwidth=2.5"));
    }

    #[test]
    fn sink_out_of_range_is_a_schema_error() {
        let text = r#"{"n_nodes":2,"node_names":["a","b"],"edges":[{"source":0,"sink":2,"lag":1,"cmi":0.1,"p_value":0.01}]}"#;
        match deserialize_json(text.as_bytes()) {
            Err(GraphError::Schema { path, .. }) => assert_eq!(path, "edges[0].sink"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_triple_is_rejected() {
        let text = r#"{"n_nodes":2,"edges":[
            {"source":0,"sink":1,"lag":1,"cmi":0.1,"p_value":0.01},
            {"source":0,"sink":1,"lag":1,"cmi":0.2,"p_value":0.02}]}"#;
        assert_eq!(
            deserialize_json(text.as_bytes()),
            Err(GraphError::DuplicateEdgeTriple { source_node: 0, sink: 1, lag: 1 })
        );
    }

    #[test]
    fn type_errors_carry_a_path() {
        let text = r#"{"n_nodes":2,"edges":[{"source":0,"sink":1,"lag":"one","cmi":0.1,"p_value":0.01}]}"#;
        match deserialize_json(text.as_bytes()) {
            Err(GraphError::Schema { path, .. }) => assert_eq!(path, "edges[0].lag"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            deserialize_json(br#"{"n_nodes":2,"node_names":["a"],"edges":[]}"#),
            Err(GraphError::Schema { path, .. }) if path == "node_names"
        ));
    }
}
