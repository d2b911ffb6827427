//! Co-occurrence graph of the most frequent hashtags: construction,
//! edge-cut partitioning, force-directed layout and export.

pub mod layout;
pub mod partition;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cooccur::{CooccurError, CooccurrenceStore};
use crate::corpus::CorpusIndex;
use crate::par::Execution;

pub use layout::{ForceLayout, LayoutOptions};
pub use partition::{partition_graph, PartitionOptions, PassRecord, Partitioning, WeightedGraph};

pub const DEFAULT_NODES: usize = 1000;
pub const DEFAULT_EDGES: usize = 600;
pub const DEFAULT_PARTS: usize = 20;
pub const DEFAULT_BALANCE: f64 = 1.1;

/// Cluster colours; index = partition label modulo 20.
pub const PALETTE: [&str; 20] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#bcbd22",
    "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2",
    "#dbdb8d", "#9edae5", "#393b79", "#637939",
];
pub const INTER_CLUSTER_COLOR: &str = "#999999";

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("k = {k} exceeds the number of nodes ({nodes})")]
    KTooLarge { k: usize, nodes: usize },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("balance factor must be >= 1, got {0}")]
    InvalidBalance(f64),
    #[error("graph has no layout coordinates")]
    MissingLayout,
    #[error("graph has no partition labels")]
    MissingPartition,
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error(transparent)]
    Store(#[from] CooccurError),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub hashtag: String,
    pub frequency: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

/// Undirected edge with `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub weight: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HashtagGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Json,
    Dot,
    Svg,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "dot" | "gv" => Ok(Self::Dot),
            "svg" => Ok(Self::Svg),
            other => Err(format!("unknown graph format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GraphPartitionOptions {
    pub k: usize,
    pub seed: u64,
    pub balance: f64,
    pub trials: usize,
    pub max_passes: usize,
    pub exec: Execution,
}

impl Default for GraphPartitionOptions {
    fn default() -> Self {
        Self {
            k: DEFAULT_PARTS,
            seed: 42,
            balance: DEFAULT_BALANCE,
            trials: 8,
            max_passes: 16,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionReport {
    pub k: usize,
    pub cut: u64,
    pub max_part_size: u64,
    pub part_sizes: Vec<u64>,
    pub passes: Vec<(u64, u64)>,
}

/// Builds the graph of the `n_nodes` most frequent hashtags (ties by name)
/// joined by the `n_edges` heaviest pairs among them (ties by `(a, b)`).
pub fn build_graph(
    store: &CooccurrenceStore,
    index: &CorpusIndex,
    n_nodes: usize,
    n_edges: usize,
) -> Result<HashtagGraph> {
    let nodes: Vec<Node> = index
        .by_frequency()
        .into_iter()
        .take(n_nodes)
        .map(|(tag, freq)| Node {
            hashtag: tag.to_string(),
            frequency: freq,
            partition: None,
            x: None,
            y: None,
        })
        .collect();
    let members: std::collections::HashSet<&str> = nodes.iter().map(|n| n.hashtag.as_str()).collect();
    let mut edges: Vec<Edge> = Vec::new();
    if n_edges > 0 {
        for pair in store.pairs()? {
            let (a, b, count) = pair?;
            if members.contains(a) && members.contains(b) {
                edges.push(Edge {
                    a: a.to_string(),
                    b: b.to_string(),
                    weight: count as u64,
                });
            }
        }
    }
    edges.sort_by(|x, y| {
        y.weight
            .cmp(&x.weight)
            .then_with(|| x.a.cmp(&y.a))
            .then_with(|| x.b.cmp(&y.b))
    });
    edges.truncate(n_edges);
    Ok(HashtagGraph { nodes, edges })
}

impl HashtagGraph {
    pub fn node_index(&self) -> HashMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.hashtag.as_str(), i))
            .collect()
    }

    /// Edges as node-index triples.
    pub fn indexed_edges(&self) -> Result<Vec<(usize, usize, u64)>> {
        let idx = self.node_index();
        self.edges
            .iter()
            .map(|e| {
                let a = idx.get(e.a.as_str());
                let b = idx.get(e.b.as_str());
                match (a, b) {
                    (Some(&a), Some(&b)) if a != b => Ok((a, b, e.weight)),
                    _ => Err(GraphError::Invalid(format!("bad edge {} -- {}", e.a, e.b))),
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let idx = self.node_index();
        if idx.len() != self.nodes.len() {
            return Err(GraphError::Invalid("duplicate node".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.a >= e.b {
                return Err(GraphError::Invalid(format!("edge {} -- {} not ordered", e.a, e.b)));
            }
            if !seen.insert((e.a.as_str(), e.b.as_str())) {
                return Err(GraphError::Invalid(format!("duplicate edge {} -- {}", e.a, e.b)));
            }
        }
        self.indexed_edges().map(|_| ())
    }

    /// Sum of weights over edges whose endpoints carry different labels.
    pub fn edge_cut(&self) -> Option<u64> {
        let idx = self.node_index();
        let mut cut = 0;
        for e in &self.edges {
            let pa = self.nodes[*idx.get(e.a.as_str())?].partition?;
            let pb = self.nodes[*idx.get(e.b.as_str())?].partition?;
            if pa != pb {
                cut += e.weight;
            }
        }
        Some(cut)
    }

    /// Labels every node with a part in `[0, k)` minimizing the edge cut,
    /// each part holding at most `ceil(balance * |V| / k)` nodes. Nodes
    /// without edges are dealt to the lightest parts afterwards.
    pub fn partition(&mut self, opts: GraphPartitionOptions) -> Result<PartitionReport> {
        let n = self.nodes.len();
        if opts.k == 0 {
            return Err(GraphError::InvalidK);
        }
        if !(opts.balance >= 1.0) {
            return Err(GraphError::InvalidBalance(opts.balance));
        }
        if opts.k > n {
            return Err(GraphError::KTooLarge { k: opts.k, nodes: n });
        }
        let k = opts.k;
        let cap = (opts.balance * n as f64 / k as f64 - 1e-9).ceil().max(1.0) as u64;
        let edges = self.indexed_edges()?;

        let mut connected: Vec<usize> = Vec::new();
        let mut local = vec![usize::MAX; n];
        for &(a, b, _) in &edges {
            for v in [a, b] {
                if local[v] == usize::MAX {
                    local[v] = 0;
                }
            }
        }
        for v in 0..n {
            if local[v] == 0 {
                local[v] = connected.len();
                connected.push(v);
            }
        }
        let mut sub = WeightedGraph::new(connected.len());
        for &(a, b, w) in &edges {
            sub.add_edge(local[a], local[b], w);
        }
        let sub_k = k.min(connected.len()).max(1);
        let result = partition_graph(
            &sub,
            sub_k,
            PartitionOptions {
                seed: opts.seed,
                max_part_weight: cap,
                trials: opts.trials,
                max_passes: opts.max_passes,
                exec: opts.exec,
            },
        );

        let mut labels = vec![usize::MAX; n];
        let mut sizes = vec![0u64; k];
        for (i, &v) in connected.iter().enumerate() {
            labels[v] = result.labels[i];
            sizes[result.labels[i]] += 1;
        }
        for label in labels.iter_mut().filter(|l| **l == usize::MAX) {
            let p = (0..k).min_by_key(|&p| (sizes[p], p)).unwrap();
            *label = p;
            sizes[p] += 1;
        }
        for (node, &p) in self.nodes.iter_mut().zip(&labels) {
            node.partition = Some(p as u32);
        }
        Ok(PartitionReport {
            k,
            cut: result.cut,
            max_part_size: cap,
            part_sizes: sizes,
            passes: result.passes.iter().map(|r| (r.before, r.after)).collect(),
        })
    }

    /// Assigns force-directed coordinates in `[0, 1]^2`. Edge weights are
    /// scaled by the heaviest edge before acting as attraction multipliers.
    pub fn layout(&mut self, opts: LayoutOptions) -> Result<()> {
        let edges = self.indexed_edges()?;
        let max_w = edges.iter().map(|e| e.2).max().unwrap_or(1).max(1) as f64;
        let edges = edges.into_iter().map(|(a, b, w)| (a, b, w as f64 / max_w)).collect();
        let pos = ForceLayout::new(self.nodes.len(), edges, opts).finish();
        for (node, p) in self.nodes.iter_mut().zip(pos) {
            node.x = Some(p[0]);
            node.y = Some(p[1]);
        }
        Ok(())
    }

    pub fn has_layout(&self) -> bool {
        self.nodes.iter().all(|n| n.x.is_some() && n.y.is_some())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: HashtagGraph = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }

    pub fn export(&self, format: ExportFormat) -> Result<Vec<u8>> {
        let text = match format {
            ExportFormat::Json => self.to_json()? + "\n",
            ExportFormat::Dot => self.to_dot(),
            ExportFormat::Svg => self.to_svg()?,
        };
        Ok(text.into_bytes())
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph hashtags {\n  node [style=filled];\n");
        for n in &self.nodes {
            let _ = write!(out, "  \"{}\" [frequency={}", dot_escape(&n.hashtag), n.frequency);
            if let Some(p) = n.partition {
                let _ = write!(out, ", partition={p}, fillcolor=\"{}\"", color_of(p));
            }
            if let (Some(x), Some(y)) = (n.x, n.y) {
                let _ = write!(out, ", pos=\"{x},{y}\"");
            }
            out.push_str("];\n");
        }
        let labels = self.labels();
        for e in &self.edges {
            let _ = write!(
                out,
                "  \"{}\" -- \"{}\" [weight={}",
                dot_escape(&e.a),
                dot_escape(&e.b),
                e.weight
            );
            if let Some(c) = edge_color(&labels, e) {
                let _ = write!(out, ", color=\"{c}\"");
            }
            out.push_str("];\n");
        }
        out.push_str("}\n");
        out
    }

    fn labels(&self) -> HashMap<&str, Option<u32>> {
        self.nodes
            .iter()
            .map(|n| (n.hashtag.as_str(), n.partition))
            .collect()
    }

    pub fn to_svg(&self) -> Result<String> {
        const SIZE: f64 = 1000.0;
        const MARGIN: f64 = 40.0;
        if !self.has_layout() {
            return Err(GraphError::MissingLayout);
        }
        if self.nodes.iter().any(|n| n.partition.is_none()) {
            return Err(GraphError::MissingPartition);
        }
        let scale = |v: f64| MARGIN + v * (SIZE - 2.0 * MARGIN);
        let pos: HashMap<&str, (f64, f64)> = self
            .nodes
            .iter()
            .map(|n| (n.hashtag.as_str(), (scale(n.x.unwrap()), scale(n.y.unwrap()))))
            .collect();
        let labels = self.labels();
        let max_w = self.edges.iter().map(|e| e.weight).max().unwrap_or(1).max(1) as f64;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n<g class=\"edges\">\n"
        );
        for e in &self.edges {
            let (x1, y1) = pos[e.a.as_str()];
            let (x2, y2) = pos[e.b.as_str()];
            let intra = labels[e.a.as_str()] == labels[e.b.as_str()];
            let class = if intra { "edge intra" } else { "edge inter" };
            let color = edge_color(&labels, e).unwrap_or(INTER_CLUSTER_COLOR);
            let width = 0.5 + 2.5 * e.weight as f64 / max_w;
            let _ = writeln!(
                out,
                "<line class=\"{class}\" x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{color}\" stroke-width=\"{width:.2}\"><title>{} -- {} ({})</title></line>",
                xml_escape(&e.a),
                xml_escape(&e.b),
                e.weight
            );
        }
        out.push_str("</g>\n<g class=\"nodes\">\n");
        for n in &self.nodes {
            let (x, y) = pos[n.hashtag.as_str()];
            let p = n.partition.unwrap();
            let _ = writeln!(
                out,
                "<circle class=\"node\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{}\"><title>#{} ({})</title></circle>",
                color_of(p),
                xml_escape(&n.hashtag),
                n.frequency
            );
        }
        out.push_str("</g>\n</svg>\n");
        Ok(out)
    }
}

pub fn color_of(partition: u32) -> &'static str {
    PALETTE[partition as usize % PALETTE.len()]
}

fn edge_color(labels: &HashMap<&str, Option<u32>>, e: &Edge) -> Option<&'static str> {
    match (labels.get(e.a.as_str())?, labels.get(e.b.as_str())?) {
        (Some(pa), Some(pb)) if pa == pb => Some(color_of(*pa)),
        (Some(_), Some(_)) => Some(INTER_CLUSTER_COLOR),
        _ => None,
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
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
