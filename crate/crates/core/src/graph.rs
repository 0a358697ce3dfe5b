//! Topology graph: contact nodes joined by the yarn segments between them.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{EvalError, Result};
use crate::eval::{self, YarnPath};
use crate::grid::{Actualization, CnGrid, Loc, Resolution, StitchMark};
use crate::pattern::StitchPattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NodeKind {
    KnitACN,
    PurlACN,
    PCN,
    UACNMarker,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphNode {
    pub i: usize,
    pub j: usize,
    pub kind: NodeKind,
    /// Cells whose CN settles here.
    pub cns: Vec<Loc>,
}

impl GraphNode {
    pub fn loc(&self) -> Loc {
        (self.i, self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeDirection {
    LeftToRight,
    RightToLeft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    Segment,
    BorderLoop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphEdge {
    pub from: Loc,
    pub to: Loc,
    pub row: usize,
    pub dir: EdgeDirection,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dims {
    pub w: usize,
    pub h: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologyGraph {
    pub dims: Dims,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub digest: String,
}

impl TopologyGraph {
    /// Contact and PCN nodes, markers excluded.
    pub fn contacts(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.iter().filter(|n| n.kind != NodeKind::UACNMarker)
    }

    pub fn markers(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::UACNMarker)
    }

    pub fn nodes_at(&self, i: usize, j: usize) -> impl Iterator<Item = &GraphNode> {
        self.nodes.iter().filter(move |n| n.i == i && n.j == j)
    }

    /// (incoming, outgoing) edge counts at a location.
    pub fn degree(&self, loc: Loc) -> (usize, usize) {
        let inc = self.edges.iter().filter(|e| e.to == loc).count();
        let out = self.edges.iter().filter(|e| e.from == loc).count();
        (inc, out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }
}

pub fn pattern_digest(pattern: &StitchPattern) -> String {
    let hash = Sha256::digest(pattern.to_text().as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// Builds the graph from an evaluated grid and its yarn path.
pub fn build_graph(g: &CnGrid, path: &YarnPath) -> Result<TopologyGraph> {
    let at = |(i, j): Loc| j * g.width() + i;
    let mut nodes = Vec::new();
    let mut seen = vec![false; g.width() * g.height()];
    for e in path.iter() {
        let loc = e.loc();
        if seen[at(loc)] {
            continue;
        }
        let cns = residents(g, loc);
        let cell = g.cell(loc.0, loc.1);
        if cell.av == Actualization::E && cns.is_empty() {
            return Err(EvalError::InconsistentPath { i: loc.0, j: loc.1 }.into());
        }
        let kind = if cell.av == Actualization::Pcn {
            NodeKind::PCN
        } else if cell.st == StitchMark::P {
            NodeKind::PurlACN
        } else {
            NodeKind::KnitACN
        };
        seen[at(loc)] = true;
        nodes.push(GraphNode { i: loc.0, j: loc.1, kind, cns });
    }

    let mut marked = vec![false; g.width() * g.height()];
    for pair in path.entries.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.j != b.j {
            continue;
        }
        let (lo, hi) = (a.i.min(b.i), a.i.max(b.i));
        for i in lo..=hi {
            if marked[at((i, a.j))] {
                continue;
            }
            let cns = unanchored_at(g, (i, a.j));
            if !cns.is_empty() {
                marked[at((i, a.j))] = true;
                nodes.push(GraphNode { i, j: a.j, kind: NodeKind::UACNMarker, cns });
            }
        }
    }

    let edges = path
        .entries
        .windows(2)
        .map(|pair| {
            let (a, b) = (pair[0], pair[1]);
            GraphEdge {
                from: a.loc(),
                to: b.loc(),
                row: a.stitch_row,
                dir: if a.stitch_row % 2 == 0 {
                    EdgeDirection::LeftToRight
                } else {
                    EdgeDirection::RightToLeft
                },
                kind: if eval::border_cn(g.width(), a.i, a.j, a.is_leg()) && b.stitch_row == a.stitch_row + 1
                {
                    EdgeKind::BorderLoop
                } else {
                    EdgeKind::Segment
                },
            }
        })
        .collect();

    Ok(TopologyGraph {
        dims: Dims { w: g.width(), h: g.height() },
        nodes,
        edges,
        digest: pattern_digest(g.pattern()),
    })
}

fn settling_at(g: &CnGrid, loc: Loc, keep: impl Fn(Actualization) -> bool) -> Vec<Loc> {
    g.neighborhood(loc.0, loc.1)
        .filter(|&(x, y)| keep(g.cell(x, y).av))
        .filter(|&(x, y)| g.resolve(x, y) == Resolution::Settled(loc))
        .collect()
}

fn residents(g: &CnGrid, loc: Loc) -> Vec<Loc> {
    settling_at(g, loc, |av| matches!(av, Actualization::Acn | Actualization::Pcn))
}

fn unanchored_at(g: &CnGrid, loc: Loc) -> Vec<Loc> {
    settling_at(g, loc, |av| av == Actualization::Uacn)
}

/// Evaluates a pattern and builds its graph.
pub fn topology(pattern: &StitchPattern) -> Result<(CnGrid, YarnPath, TopologyGraph)> {
    let (grid, path) = eval::evaluate(pattern)?;
    let graph = build_graph(&grid, &path)?;
    Ok((grid, path, graph))
}

/// The fabric as it stands after each of the first `up_to` rows.
pub fn row_snapshots(pattern: &StitchPattern, up_to: usize) -> Result<Vec<TopologyGraph>> {
    (1..=up_to.min(pattern.rows()))
        .map(|r| topology(&pattern.truncated(r)).map(|(_, _, graph)| graph))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::Stitch;

    fn graph(text: &str) -> TopologyGraph {
        topology(&StitchPattern::parse(text).unwrap()).unwrap().2
    }

    #[test]
    fn all_knit_nodes() {
        let g = graph("K K K\nK K K\nK K K");
        assert_eq!(g.nodes.len(), 24);
        assert_eq!(g.nodes.iter().filter(|n| n.kind == NodeKind::PCN).count(), 6);
        assert_eq!(g.nodes.iter().filter(|n| n.kind == NodeKind::KnitACN).count(), 18);
        assert_eq!(g.markers().count(), 0);
        assert_eq!(g.edges.len(), 35);
        assert_eq!(g.dims, Dims { w: 6, h: 4 });
    }

    #[test]
    fn interior_contacts_have_two_yarns_each_way() {
        let g = graph("K K K\nK K K\nK K K");
        for n in g.contacts().filter(|n| n.kind == NodeKind::KnitACN) {
            let (inc, out) = g.degree(n.loc());
            let interior = n.i > 0 && n.i < 5 && n.j > 0;
            if interior {
                assert!(inc >= 2 && out >= 2, "{:?}", n.loc());
            }
        }
    }

    #[test]
    fn border_loops_and_directions() {
        let g = graph("K K\nK K\nK K");
        let borders: Vec<_> = g.edges.iter().filter(|e| e.kind == EdgeKind::BorderLoop).collect();
        assert_eq!(borders.len(), 2);
        assert_eq!(borders[0].from, (3, 0));
        assert_eq!(borders[0].to, (3, 1));
        assert_eq!(borders[1].from, (0, 1));
        for e in &g.edges {
            assert_eq!(e.dir == EdgeDirection::LeftToRight, e.row % 2 == 0);
        }
    }

    #[test]
    fn purl_nodes() {
        let g = graph("P P\nP P");
        assert!(g.nodes.iter().any(|n| n.kind == NodeKind::PurlACN));
        assert!(!g.nodes.iter().any(|n| n.kind == NodeKind::KnitACN));
    }

    #[test]
    fn twin_tuck_markers() {
        let g = graph("K K K K\nK T T K\nK K K K");
        let marks: Vec<Loc> = g.markers().map(GraphNode::loc).collect();
        assert_eq!(marks, vec![(3, 2), (4, 2)]);
    }

    #[test]
    fn digest_tracks_pattern() {
        let a = StitchPattern::filled(2, 2, Stitch::Knit).unwrap();
        let b = StitchPattern::filled(2, 2, Stitch::Purl).unwrap();
        assert_eq!(pattern_digest(&a).len(), 64);
        assert_ne!(pattern_digest(&a), pattern_digest(&b));
    }

    #[test]
    fn snapshots_match_prefix_evaluation() {
        let p = StitchPattern::parse("K K K\nK T K\nK K K").unwrap();
        let snaps = row_snapshots(&p, 3).unwrap();
        assert_eq!(snaps.len(), 3);
        let first = topology(&p.truncated(1)).unwrap().2;
        assert_eq!(snaps[0], first);
        assert_eq!(snaps[2], topology(&p).unwrap().2);
    }

    #[test]
    fn json_shape() {
        let g = graph("K");
        let v: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(v["dims"]["w"], 2);
        assert_eq!(v["nodes"][0]["kind"], "KnitACN");
        assert_eq!(v["edges"][0]["from"], serde_json::json!([0, 0]));
        assert_eq!(v["edges"][0]["dir"], "LeftToRight");
    }
}
