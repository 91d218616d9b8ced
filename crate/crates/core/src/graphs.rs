//! Kontsevich graphs generated by the tree calculus.
//!
//! Every graph has two external sinks `A` and `B` and internal vertices of
//! outdegree two. The edge list is kept in construction order, which fixes
//! the orientation of the graph's volume form.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::rational::{ratio, Rational};
use crate::trees::{Tree, TreeSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    A,
    B,
    /// Internal vertex, numbered from 1 in construction order.
    V(u32),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::A => f.write_str("A"),
            NodeId::B => f.write_str("B"),
            NodeId::V(n) => write!(f, "v{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KGraph {
    internal: u32,
    edges: Vec<(NodeId, NodeId)>,
    provenance: Option<Tree>,
}

impl KGraph {
    pub fn internal_nodes(&self) -> Vec<NodeId> {
        (1..=self.internal).map(NodeId::V).collect()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn provenance(&self) -> Option<&Tree> {
        self.provenance.as_ref()
    }

    /// Number of internal vertices; the order in ħ at which the graph appears.
    pub fn weight(&self) -> usize {
        self.internal as usize
    }

    pub fn outdegree(&self, node: NodeId) -> usize {
        self.edges.iter().filter(|(src, _)| *src == node).count()
    }

    /// Internal outdegree two, external outdegree zero, no self-loops, no
    /// dangling vertex ids.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.edges.len() != 2 * self.internal as usize {
            return Err(format!("{} edges for {} internal vertices", self.edges.len(), self.internal));
        }
        for node in [NodeId::A, NodeId::B] {
            if self.outdegree(node) != 0 {
                return Err(format!("external vertex {node} has outgoing edges"));
            }
        }
        for node in self.internal_nodes() {
            if self.outdegree(node) != 2 {
                return Err(format!("internal vertex {node} has outdegree {}", self.outdegree(node)));
            }
        }
        for (src, dst) in &self.edges {
            if src == dst {
                return Err(format!("self-loop at {src}"));
            }
            if let NodeId::V(n) = dst {
                if *n == 0 || *n > self.internal {
                    return Err(format!("edge into unknown vertex {dst}"));
                }
            }
        }
        Ok(())
    }

    pub fn to_dot(&self) -> String {
        emit_graph(self, GraphFormat::Dot)
    }

    pub fn to_json(&self) -> String {
        emit_graph(self, GraphFormat::Json)
    }
}

/// The single ladder rung: `x ⇄ y`, `x → A`, `y → B`.
pub fn base_ladder() -> KGraph {
    let (x, y) = (NodeId::V(1), NodeId::V(2));
    KGraph { internal: 2, edges: vec![(x, y), (y, x), (x, NodeId::A), (y, NodeId::B)], provenance: Some(Tree::E) }
}

/// One internal vertex with edges to `A` then `B`.
pub fn wedge_graph() -> KGraph {
    let x = NodeId::V(1);
    KGraph { internal: 1, edges: vec![(x, NodeId::A), (x, NodeId::B)], provenance: None }
}

/// The known weight of [`wedge_graph`].
pub fn wedge_value() -> Rational {
    ratio(-1, 2)
}

/// Turns the old external `old` into a new internal wedge vertex pointing at
/// the (new) `A` and `B`, in that order.
fn attach_wedge(g: &KGraph, old: NodeId) -> KGraph {
    let fresh = NodeId::V(g.internal + 1);
    let mut edges: Vec<(NodeId, NodeId)> =
        g.edges.iter().map(|&(src, dst)| (src, if dst == old { fresh } else { dst })).collect();
    edges.push((fresh, NodeId::A));
    edges.push((fresh, NodeId::B));
    KGraph { internal: g.internal + 1, edges, provenance: None }
}

/// The old `B` becomes a wedge over `A` and a fresh `B`.
pub fn prepend_graph(g: &KGraph) -> KGraph {
    KGraph { provenance: g.provenance.clone().map(Tree::p), ..attach_wedge(g, NodeId::B) }
}

/// The old `A` becomes a wedge over a fresh `A` and `B`.
pub fn append_graph(g: &KGraph) -> KGraph {
    KGraph { provenance: g.provenance.clone().map(Tree::q), ..attach_wedge(g, NodeId::A) }
}

/// Identifies the externals of both graphs; `g2`'s vertices are renumbered
/// after `g1`'s and its edges follow `g1`'s.
pub fn join_graphs(g1: &KGraph, g2: &KGraph) -> KGraph {
    let shift = |n: NodeId| match n {
        NodeId::V(k) => NodeId::V(k + g1.internal),
        ext => ext,
    };
    let mut edges = g1.edges.clone();
    edges.extend(g2.edges.iter().map(|&(s, d)| (shift(s), shift(d))));
    let provenance = match (&g1.provenance, &g2.provenance) {
        (Some(a), Some(b)) => Some(Tree::join(a.clone(), b.clone())),
        _ => None,
    };
    KGraph { internal: g1.internal + g2.internal, edges, provenance }
}

/// `G` on a single canonical tree.
pub fn graph_of_tree(t: &Tree) -> KGraph {
    match t {
        Tree::E => base_ladder(),
        Tree::P(c) => prepend_graph(&graph_of_tree(c)),
        Tree::Q(c) => append_graph(&graph_of_tree(c)),
        Tree::Join(ts) => {
            let mut children = ts.iter().map(graph_of_tree);
            let first = children.next().expect("join has children");
            children.fold(first, |acc, g| join_graphs(&acc, &g))
        }
    }
}

/// A ℚ-combination of generated graphs keyed by their provenance trees.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphSum {
    terms: BTreeMap<Tree, (KGraph, Rational)>,
}

impl GraphSum {
    /// Terms, greatest provenance tree first.
    pub fn iter(&self) -> impl Iterator<Item = (&KGraph, &Rational)> {
        self.terms.values().rev().map(|(g, c)| (g, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, provenance: &Tree) -> Option<(&KGraph, &Rational)> {
        self.terms.get(provenance).map(|(g, c)| (g, c))
    }
}

/// `G` extended linearly.
pub fn graph_of_tree_sum(s: &TreeSum) -> GraphSum {
    let terms = s.iter().map(|(t, c)| (t.clone(), (graph_of_tree(t), c.clone()))).collect();
    GraphSum { terms }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Serialize)]
struct GraphJson {
    external: [&'static str; 2],
    internal: Vec<String>,
    edges: Vec<[String; 2]>,
    provenance: Option<String>,
}

pub(crate) fn graph_json_value(g: &KGraph) -> serde_json::Value {
    serde_json::to_value(GraphJson {
        external: ["A", "B"],
        internal: g.internal_nodes().iter().map(NodeId::to_string).collect(),
        edges: g.edges.iter().map(|(s, d)| [s.to_string(), d.to_string()]).collect(),
        provenance: g.provenance.as_ref().map(Tree::to_string),
    })
    .expect("graph serializes")
}

pub fn emit_graph(g: &KGraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Json => serde_json::to_string(&graph_json_value(g)).expect("graph serializes"),
        GraphFormat::Dot => {
            let mut out = String::from("digraph G {\n");
            if let Some(t) = &g.provenance {
                let _ = writeln!(out, "  // provenance: {t}");
            }
            out.push_str("  A [shape=box, label=\"A\"];\n");
            out.push_str("  B [shape=box, label=\"B\"];\n");
            for v in g.internal_nodes() {
                let _ = writeln!(out, "  {v} [shape=circle];");
            }
            for (i, (s, d)) in g.edges.iter().enumerate() {
                let _ = writeln!(out, "  {s} -> {d} [label=\"{}\"];", i + 1);
            }
            out.push_str("}\n");
            out
        }
    }
}
