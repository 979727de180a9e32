//! Graph and partition serialization.
//!
//! Every writer emits nodes in lexicographic order and edges sorted by
//! (source, target), so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::corpus::Topic;
use crate::graphops::{Backbone, CommunityPartition, TreeEdge};
use crate::topicnet::{DistanceNetwork, TopicNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Graphml,
    Json,
    Csv,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Dot => "dot",
            ExportFormat::Graphml => "graphml",
            ExportFormat::Json => "json",
            ExportFormat::Csv => "csv",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" | "gv" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::Graphml),
            "json" => Ok(ExportFormat::Json),
            "csv" => Ok(ExportFormat::Csv),
            _ => Err(ReportError::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// Anything that can be exported as a graph.
#[derive(Debug, Clone, Copy)]
pub enum GraphRef<'a> {
    Network(&'a TopicNetwork),
    Distance(&'a DistanceNetwork),
    Backbone(&'a Backbone),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Network,
    Distance,
    Backbone,
}

/// Integer weights for topic networks, real distances otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeValue {
    Count(u64),
    Distance(f64),
}

impl EdgeValue {
    fn as_f64(self) -> f64 {
        match self {
            EdgeValue::Count(c) => c as f64,
            EdgeValue::Distance(d) => d,
        }
    }
}

impl fmt::Display for EdgeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeValue::Count(c) => write!(f, "{c}"),
            EdgeValue::Distance(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub source: Topic,
    pub target: Topic,
    pub weight: EdgeValue,
}

/// JSON interchange format shared by every graph-producing command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub kind: GraphKind,
    pub nodes: Vec<Topic>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<Topic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_distance: Option<f64>,
}

impl GraphDocument {
    pub fn from_graph(graph: GraphRef<'_>) -> Self {
        match graph {
            GraphRef::Network(net) => GraphDocument {
                kind: GraphKind::Network,
                nodes: net.nodes().cloned().collect(),
                edges: net
                    .edges()
                    .map(|(s, t, &w)| EdgeRecord {
                        source: s.clone(),
                        target: t.clone(),
                        weight: EdgeValue::Count(w),
                    })
                    .collect(),
                root: None,
                total_distance: None,
            },
            GraphRef::Distance(net) => GraphDocument {
                kind: GraphKind::Distance,
                nodes: net.nodes().cloned().collect(),
                edges: net
                    .edges()
                    .map(|(s, t, &d)| EdgeRecord {
                        source: s.clone(),
                        target: t.clone(),
                        weight: EdgeValue::Distance(d),
                    })
                    .collect(),
                root: None,
                total_distance: None,
            },
            GraphRef::Backbone(tree) => GraphDocument {
                kind: GraphKind::Backbone,
                nodes: tree.nodes().into_iter().collect(),
                edges: tree
                    .edges
                    .iter()
                    .map(|e| EdgeRecord {
                        source: e.parent.clone(),
                        target: e.child.clone(),
                        weight: EdgeValue::Distance(e.distance),
                    })
                    .collect(),
                root: Some(tree.root.clone()),
                total_distance: Some(tree.total_distance),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("graph document serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    fn check_kind(&self, expected: GraphKind) -> Result<(), ReportError> {
        if self.kind != expected {
            return Err(ReportError::Parse(format!(
                "expected a {expected:?} graph, found {:?}",
                self.kind
            )));
        }
        Ok(())
    }

    fn check_edge(&self, e: &EdgeRecord) -> Result<(), ReportError> {
        if e.source == e.target {
            return Err(ReportError::Parse(format!(
                "self-loop on {:?}",
                e.source.as_str()
            )));
        }
        Ok(())
    }

    pub fn into_network(self) -> Result<TopicNetwork, ReportError> {
        self.check_kind(GraphKind::Network)?;
        let mut net = TopicNetwork::new();
        for e in &self.edges {
            self.check_edge(e)?;
            let EdgeValue::Count(w) = e.weight else {
                return Err(ReportError::Parse(format!(
                    "edge {} -> {} has non-integer weight {}",
                    e.source, e.target, e.weight
                )));
            };
            if w == 0 {
                return Err(ReportError::Parse(format!(
                    "edge {} -> {} has zero weight",
                    e.source, e.target
                )));
            }
            net.insert_edge(e.source.clone(), e.target.clone(), w);
        }
        for n in self.nodes {
            net.add_node(n);
        }
        Ok(net)
    }

    pub fn into_distance(self) -> Result<DistanceNetwork, ReportError> {
        self.check_kind(GraphKind::Distance)?;
        let mut net = DistanceNetwork::new();
        for e in &self.edges {
            self.check_edge(e)?;
            net.insert_edge(e.source.clone(), e.target.clone(), e.weight.as_f64());
        }
        for n in self.nodes {
            net.add_node(n);
        }
        Ok(net)
    }

    pub fn into_backbone(self) -> Result<Backbone, ReportError> {
        self.check_kind(GraphKind::Backbone)?;
        let root = self
            .root
            .ok_or_else(|| ReportError::Parse("backbone without root".into()))?;
        let edges: Vec<TreeEdge> = self
            .edges
            .into_iter()
            .map(|e| TreeEdge {
                parent: e.source,
                child: e.target,
                distance: e.weight.as_f64(),
            })
            .collect();
        let total_distance = self
            .total_distance
            .unwrap_or_else(|| edges.iter().map(|e| e.distance).sum());
        Ok(Backbone {
            root,
            edges,
            total_distance,
        })
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn render_dot(doc: &GraphDocument) -> String {
    let mut out = String::from("digraph topics {\n");
    for n in &doc.nodes {
        if doc.root.as_ref() == Some(n) {
            let _ = writeln!(out, "  {} [root=true, color=red];", dot_quote(n.as_str()));
        } else {
            let _ = writeln!(out, "  {};", dot_quote(n.as_str()));
        }
    }
    for e in &doc.edges {
        let _ = writeln!(
            out,
            "  {} -> {} [weight={}];",
            dot_quote(e.source.as_str()),
            dot_quote(e.target.as_str()),
            e.weight
        );
    }
    out.push_str("}\n");
    out
}

fn render_graphml(doc: &GraphDocument) -> String {
    let weight_type = match doc.kind {
        GraphKind::Network => "long",
        GraphKind::Distance | GraphKind::Backbone => "double",
    };
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
    );
    let _ = writeln!(
        out,
        "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"{weight_type}\"/>"
    );
    if doc.root.is_some() {
        out.push_str(
            "  <key id=\"root\" for=\"node\" attr.name=\"root\" attr.type=\"boolean\"/>\n",
        );
    }
    out.push_str("  <graph id=\"topics\" edgedefault=\"directed\">\n");
    for n in &doc.nodes {
        let id = xml_escape(n.as_str());
        if doc.root.as_ref() == Some(n) {
            let _ = writeln!(
                out,
                "    <node id=\"{id}\"><data key=\"root\">true</data></node>"
            );
        } else {
            let _ = writeln!(out, "    <node id=\"{id}\"/>");
        }
    }
    for e in &doc.edges {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data></edge>",
            xml_escape(e.source.as_str()),
            xml_escape(e.target.as_str()),
            e.weight
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn render_csv(doc: &GraphDocument) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["source", "target", "weight"])
        .expect("in-memory write");
    for e in &doc.edges {
        w.write_record([e.source.as_str(), e.target.as_str(), &e.weight.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Renders a graph in the given format.
pub fn render_graph(graph: GraphRef<'_>, format: ExportFormat) -> String {
    let doc = GraphDocument::from_graph(graph);
    match format {
        ExportFormat::Dot => render_dot(&doc),
        ExportFormat::Graphml => render_graphml(&doc),
        ExportFormat::Json => doc.to_json(),
        ExportFormat::Csv => render_csv(&doc),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    fs::write(path, contents).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn export_graph(
    graph: GraphRef<'_>,
    format: ExportFormat,
    out: &Path,
) -> Result<(), ReportError> {
    write_file(out, &render_graph(graph, format))
}

/// `topic,community_id` rows sorted by topic, then a `# modularity=` line.
pub fn render_partition(partition: &CommunityPartition) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["topic", "community_id"])
        .expect("in-memory write");
    for (topic, c) in &partition.assignment {
        w.write_record([topic.as_str(), &c.to_string()])
            .expect("in-memory write");
    }
    let mut out = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8");
    let _ = writeln!(out, "# modularity={}", partition.modularity);
    out
}

pub fn export_partition(partition: &CommunityPartition, out: &Path) -> Result<(), ReportError> {
    write_file(out, &render_partition(partition))
}

/// Reads the output of [`render_partition`].
pub fn parse_partition(text: &str) -> Result<CommunityPartition, ReportError> {
    let modularity = text
        .lines()
        .rev()
        .find_map(|l| l.trim().strip_prefix("# modularity="))
        .ok_or_else(|| ReportError::Parse("missing `# modularity=` line".into()))?
        .trim()
        .parse::<f64>()
        .map_err(|e| ReportError::Parse(format!("bad modularity value: {e}")))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut assignment = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| ReportError::Parse(e.to_string()))?;
        if record.len() != 2 {
            return Err(ReportError::Parse(format!(
                "expected 2 fields, found {}",
                record.len()
            )));
        }
        let id: usize = record[1]
            .parse()
            .map_err(|_| ReportError::Parse(format!("bad community id {:?}", &record[1])))?;
        if assignment.insert(Topic::from(&record[0]), id).is_some() {
            return Err(ReportError::Parse(format!(
                "topic {:?} assigned twice",
                &record[0]
            )));
        }
    }
    Ok(CommunityPartition {
        assignment,
        modularity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(edges: &[(&str, &str, u64)]) -> TopicNetwork {
        let mut g = TopicNetwork::new();
        for &(s, t, w) in edges {
            g.insert_edge(s.into(), t.into(), w);
        }
        g
    }

    #[test]
    fn dot_edge_line() {
        let dot = render_graph(GraphRef::Network(&net(&[("a", "b", 3)])), ExportFormat::Dot);
        assert_eq!(
            dot,
            "digraph topics {\n  \"a\";\n  \"b\";\n  \"a\" -> \"b\" [weight=3];\n}\n"
        );
    }

    #[test]
    fn dot_marks_backbone_root() {
        let tree = Backbone {
            root: "r".into(),
            edges: vec![TreeEdge {
                parent: "r".into(),
                child: "x".into(),
                distance: 0.5,
            }],
            total_distance: 0.5,
        };
        let dot = render_graph(GraphRef::Backbone(&tree), ExportFormat::Dot);
        assert!(dot.contains("\"r\" [root=true, color=red];"));
        assert!(dot.contains("\"r\" -> \"x\" [weight=0.5];"));
        let graphml = render_graph(GraphRef::Backbone(&tree), ExportFormat::Graphml);
        assert!(graphml.contains("<node id=\"r\"><data key=\"root\">true</data></node>"));
    }

    #[test]
    fn escaping() {
        let g = net(&[("say \"hi\"", "a<b & c", 1)]);
        let dot = render_graph(GraphRef::Network(&g), ExportFormat::Dot);
        assert!(dot.contains(r#""say \"hi\"" -> "a<b & c""#));
        let xml = render_graph(GraphRef::Network(&g), ExportFormat::Graphml);
        assert!(xml.contains("source=\"say &quot;hi&quot;\" target=\"a&lt;b &amp; c\""));
        let csv = render_graph(GraphRef::Network(&g), ExportFormat::Csv);
        assert_eq!(csv, "source,target,weight\n\"say \"\"hi\"\"\",a<b & c,1\n");
    }

    #[test]
    fn json_round_trips() {
        let mut g = net(&[("a", "b", 3), ("b", "c", 1)]);
        g.add_node("iso".into());
        let text = render_graph(GraphRef::Network(&g), ExportFormat::Json);
        let back = GraphDocument::from_json(&text)
            .unwrap()
            .into_network()
            .unwrap();
        assert_eq!(back, g);

        let d = crate::graphops::invert_weights(&g);
        let text = render_graph(GraphRef::Distance(&d), ExportFormat::Json);
        let back = GraphDocument::from_json(&text)
            .unwrap()
            .into_distance()
            .unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let d = crate::graphops::invert_weights(&net(&[("a", "b", 2)]));
        let text = render_graph(GraphRef::Distance(&d), ExportFormat::Json);
        assert!(GraphDocument::from_json(&text)
            .unwrap()
            .into_network()
            .is_err());
    }

    #[test]
    fn unknown_format() {
        assert!(matches!(
            "png".parse::<ExportFormat>(),
            Err(ReportError::UnknownFormat(_))
        ));
        assert_eq!(
            "GraphML".parse::<ExportFormat>().unwrap(),
            ExportFormat::Graphml
        );
    }

    #[test]
    fn partition_round_trip() {
        let p = CommunityPartition {
            assignment: [("b", 0), ("a", 0)]
                .into_iter()
                .map(|(t, c)| (Topic::from(t), c))
                .collect(),
            modularity: 0.123_456_789,
        };
        let text = render_partition(&p);
        assert_eq!(
            text,
            "topic,community_id\na,0\nb,0\n# modularity=0.123456789\n"
        );
        assert_eq!(parse_partition(&text).unwrap(), p);
    }
}
