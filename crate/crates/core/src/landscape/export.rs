use std::fmt::Write as _;
use std::path::Path;

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use super::{LandscapeError, LandscapeGraph, Positions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    GraphMl,
    Json,
    Dot,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::GraphMl => "graphml",
            Self::Json => "json",
            Self::Dot => "dot",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportNode {
    pub id: String,
    pub vector_bits: String,
    pub count: u64,
    pub cf_count: u64,
    pub cf_share: f64,
    pub first_year: i32,
    pub class: String,
    pub x: Option<f64>,
    pub y: Option<f64>,
}

/// Format-neutral view of an exported snapshot; what every writer emits and
/// every reader returns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportedGraph {
    pub year: i32,
    pub seed: Option<u64>,
    pub nodes: Vec<ExportNode>,
    pub edges: Vec<[String; 2]>,
}

impl ExportedGraph {
    /// With `positions`, only positioned nodes (and edges between them) are
    /// kept; otherwise every plotted node is exported without coordinates.
    pub fn from_graph(graph: &LandscapeGraph, positions: Option<&Positions>, seed: Option<u64>) -> Self {
        let keep: Vec<bool> = graph.nodes.iter().map(|n| positions.is_none_or(|p| p.contains_key(&n.vector))).collect();
        let nodes = graph
            .nodes
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(n, _)| {
                let p = positions.and_then(|p| p.get(&n.vector));
                ExportNode {
                    id: n.id(),
                    vector_bits: n.vector.to_bit_string(),
                    count: n.total_count,
                    cf_count: n.crowdfunded_count,
                    cf_share: n.cf_share(),
                    first_year: n.first_year,
                    class: n.class.as_str().to_string(),
                    x: p.map(|p| p.x),
                    y: p.map(|p| p.y),
                }
            })
            .collect();
        let edges = graph
            .edges
            .iter()
            .filter(|(a, b)| keep[*a] && keep[*b])
            .map(|&(a, b)| [graph.nodes[a].id(), graph.nodes[b].id()])
            .collect();
        Self { year: graph.snapshot_year, seed, nodes, edges }
    }

    pub fn render(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::GraphMl => self.to_graphml(),
            ExportFormat::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            ExportFormat::Dot => self.to_dot(),
        }
    }

    fn to_graphml(&self) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        s.push_str("  <key id=\"year\" for=\"graph\" attr.name=\"year\" attr.type=\"int\"/>\n");
        s.push_str("  <key id=\"seed\" for=\"graph\" attr.name=\"seed\" attr.type=\"long\"/>\n");
        for (id, ty) in NODE_KEYS {
            let _ = writeln!(s, "  <key id=\"{id}\" for=\"node\" attr.name=\"{id}\" attr.type=\"{ty}\"/>");
        }
        s.push_str("  <graph id=\"landscape\" edgedefault=\"undirected\">\n");
        let _ = writeln!(s, "    <data key=\"year\">{}</data>", self.year);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "    <data key=\"seed\">{seed}</data>");
        }
        for n in &self.nodes {
            let _ = writeln!(s, "    <node id=\"{}\">", xml_escape(&n.id));
            let _ = writeln!(s, "      <data key=\"vector_bits\">{}</data>", n.vector_bits);
            let _ = writeln!(s, "      <data key=\"count\">{}</data>", n.count);
            let _ = writeln!(s, "      <data key=\"cf_count\">{}</data>", n.cf_count);
            let _ = writeln!(s, "      <data key=\"cf_share\">{}</data>", n.cf_share);
            let _ = writeln!(s, "      <data key=\"first_year\">{}</data>", n.first_year);
            let _ = writeln!(s, "      <data key=\"class\">{}</data>", xml_escape(&n.class));
            if let (Some(x), Some(y)) = (n.x, n.y) {
                let _ = writeln!(s, "      <data key=\"x\">{x}</data>");
                let _ = writeln!(s, "      <data key=\"y\">{y}</data>");
            }
            s.push_str("    </node>\n");
        }
        for [a, b] in &self.edges {
            let _ = writeln!(s, "    <edge source=\"{}\" target=\"{}\"/>", xml_escape(a), xml_escape(b));
        }
        s.push_str("  </graph>\n</graphml>\n");
        s
    }

    fn to_dot(&self) -> String {
        let mut s = String::from("graph landscape {\n");
        let _ = write!(s, "  graph [year={}", self.year);
        if let Some(seed) = self.seed {
            let _ = write!(s, ", seed={seed}");
        }
        s.push_str("];\n");
        for n in &self.nodes {
            let _ = write!(
                s,
                "  \"{}\" [vector_bits=\"{}\", count={}, cf_count={}, cf_share={}, first_year={}, class=\"{}\"",
                n.id, n.vector_bits, n.count, n.cf_count, n.cf_share, n.first_year, n.class
            );
            if let (Some(x), Some(y)) = (n.x, n.y) {
                let _ = write!(s, ", x={x}, y={y}");
            }
            s.push_str("];\n");
        }
        for [a, b] in &self.edges {
            let _ = writeln!(s, "  \"{a}\" -- \"{b}\";");
        }
        s.push_str("}\n");
        s
    }
}

const NODE_KEYS: [(&str, &str); 8] = [
    ("vector_bits", "string"),
    ("count", "int"),
    ("cf_count", "int"),
    ("cf_share", "double"),
    ("first_year", "int"),
    ("class", "string"),
    ("x", "double"),
    ("y", "double"),
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Writes one snapshot to `path`.
pub fn export_graph(
    graph: &LandscapeGraph,
    positions: Option<&Positions>,
    seed: Option<u64>,
    format: ExportFormat,
    path: impl AsRef<Path>,
) -> Result<(), LandscapeError> {
    let path = path.as_ref();
    let text = ExportedGraph::from_graph(graph, positions, seed).render(format);
    std::fs::write(path, text).map_err(|source| LandscapeError::Io { path: path.display().to_string(), source })
}

/// Reads back any of the export formats.
pub fn parse_graph(text: &str, format: ExportFormat) -> Result<ExportedGraph, LandscapeError> {
    match format {
        ExportFormat::Json => serde_json::from_str(text).map_err(|e| LandscapeError::Parse(e.to_string())),
        ExportFormat::GraphMl => parse_graphml(text),
        ExportFormat::Dot => parse_dot(text),
    }
}

fn perr(msg: impl Into<String>) -> LandscapeError {
    LandscapeError::Parse(msg.into())
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, LandscapeError> {
    v.parse().map_err(|_| perr(format!("bad value {v:?} for {key}")))
}

fn blank_node(id: String) -> ExportNode {
    ExportNode {
        id,
        vector_bits: String::new(),
        count: 0,
        cf_count: 0,
        cf_share: 0.0,
        first_year: 0,
        class: String::new(),
        x: None,
        y: None,
    }
}

fn set_node_attr(node: &mut ExportNode, key: &str, value: &str) -> Result<(), LandscapeError> {
    match key {
        "vector_bits" => node.vector_bits = value.to_string(),
        "count" => node.count = num(key, value)?,
        "cf_count" => node.cf_count = num(key, value)?,
        "cf_share" => node.cf_share = num(key, value)?,
        "first_year" => node.first_year = num(key, value)?,
        "class" => node.class = value.to_string(),
        "x" => node.x = Some(num(key, value)?),
        "y" => node.y = Some(num(key, value)?),
        _ => {}
    }
    Ok(())
}

fn parse_graphml(text: &str) -> Result<ExportedGraph, LandscapeError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);
    let mut g = ExportedGraph { year: 0, seed: None, nodes: Vec::new(), edges: Vec::new() };
    let mut current: Option<ExportNode> = None;
    let mut data_key: Option<String> = None;
    let attr = |e: &quick_xml::events::BytesStart, name: &str| -> Result<Option<String>, LandscapeError> {
        for a in e.attributes() {
            let a = a.map_err(|e| perr(e.to_string()))?;
            if a.key.as_ref() == name.as_bytes() {
                let v = a.unescape_value().map_err(|e| perr(e.to_string()))?;
                return Ok(Some(v.into_owned()));
            }
        }
        Ok(None)
    };
    loop {
        match reader.read_event().map_err(|e| perr(e.to_string()))? {
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"node" => {
                let id = attr(&e, "id")?.ok_or_else(|| perr("node without id"))?;
                current = Some(blank_node(id));
            }
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"edge" => {
                let s = attr(&e, "source")?.ok_or_else(|| perr("edge without source"))?;
                let t = attr(&e, "target")?.ok_or_else(|| perr("edge without target"))?;
                g.edges.push([s, t]);
            }
            Event::Start(e) if e.name().as_ref() == b"data" => {
                data_key = attr(&e, "key")?;
            }
            Event::Text(t) => {
                let value = t.xml_content().map_err(|e| perr(e.to_string()))?;
                let value = value.trim();
                match (data_key.as_deref(), current.as_mut()) {
                    (Some(k), Some(node)) => set_node_attr(node, k, value)?,
                    (Some("year"), None) => g.year = num("year", value)?,
                    (Some("seed"), None) => g.seed = Some(num("seed", value)?),
                    _ => {}
                }
            }
            Event::End(e) if e.name().as_ref() == b"data" => data_key = None,
            Event::End(e) if e.name().as_ref() == b"node" => {
                g.nodes.extend(current.take());
            }
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(g)
}

/// Splits `k=v, k="v"` attribute lists as written by the DOT exporter.
fn dot_attrs(body: &str) -> Vec<(String, String)> {
    body.split(", ")
        .filter_map(|kv| {
            let (k, v) = kv.split_once('=')?;
            Some((k.trim().to_string(), v.trim().trim_matches('"').to_string()))
        })
        .collect()
}

fn parse_dot(text: &str) -> Result<ExportedGraph, LandscapeError> {
    let mut g = ExportedGraph { year: 0, seed: None, nodes: Vec::new(), edges: Vec::new() };
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with("graph landscape") || line == "}" {
            continue;
        }
        let line = line.strip_suffix(';').ok_or_else(|| perr(format!("unterminated line {line:?}")))?;
        if let Some(body) = line.strip_prefix("graph [").and_then(|l| l.strip_suffix(']')) {
            for (k, v) in dot_attrs(body) {
                match k.as_str() {
                    "year" => g.year = num("year", &v)?,
                    "seed" => g.seed = Some(num("seed", &v)?),
                    _ => {}
                }
            }
        } else if let Some((a, b)) = line.split_once(" -- ") {
            g.edges.push([a.trim_matches('"').to_string(), b.trim_matches('"').to_string()]);
        } else if let Some((id, rest)) = line.split_once(" [") {
            let body = rest.strip_suffix(']').ok_or_else(|| perr(format!("bad node line {line:?}")))?;
            let mut node = blank_node(id.trim_matches('"').to_string());
            for (k, v) in dot_attrs(body) {
                set_node_attr(&mut node, &k, &v)?;
            }
            g.nodes.push(node);
        } else {
            return Err(perr(format!("unrecognised line {line:?}")));
        }
    }
    Ok(g)
}
