//! Metric graphs: the figure-eight (two circles of circumference 1 glued at
//! one point) and the 9-edge star tree.
//!
//! Every edge has length 1; the eight is stored as two unit self-loops at
//! the glue vertex, parametrized so that loop offset `s` corresponds to the
//! circle coordinate `(1/2 + s) mod 1`. Points are `(edge, offset)` pairs
//! and endpoint offsets identify with the incident vertex.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Builder tag for the two supported topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphTopology {
    /// Two circles of circumference 1 sharing exactly one point (the images
    /// of 1/2 in each circle).
    Eight,
    /// Center `p0`, branch vertices `p1,p2,p3` at distance 1, and leaves
    /// `p11..p32`; exactly 9 unit edges.
    StarTree,
}

/// Location on a metric graph: an edge index and an offset in `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPoint {
    pub edge: usize,
    pub offset: f64,
}

impl GraphPoint {
    pub fn new(edge: usize, offset: f64) -> Self {
        GraphPoint { edge, offset }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

/// Immutable metric-graph handle with precomputed vertex distances.
#[derive(Debug)]
pub struct MetricGraph {
    pub topology: GraphTopology,
    pub vertex_names: Vec<&'static str>,
    pub edges: Vec<Edge>,
    vdist: Vec<Vec<f64>>,
}

/// Star-tree vertex indices, in the order of `vertex_names`.
pub mod tree {
    pub const P0: usize = 0;
    pub const P1: usize = 1;
    pub const P2: usize = 2;
    pub const P3: usize = 3;
    pub const P11: usize = 4;
    pub const P12: usize = 5;
    pub const P21: usize = 6;
    pub const P22: usize = 7;
    pub const P31: usize = 8;
    pub const P32: usize = 9;
}

impl MetricGraph {
    pub fn build(topology: GraphTopology) -> MetricGraph {
        match topology {
            GraphTopology::Eight => {
                let edges = vec![Edge { u: 0, v: 0 }, Edge { u: 0, v: 0 }];
                MetricGraph {
                    topology,
                    vertex_names: vec!["glue"],
                    edges,
                    vdist: vec![vec![0.0]],
                }
            }
            GraphTopology::StarTree => {
                use tree::*;
                let pairs = [
                    (P0, P1),
                    (P0, P2),
                    (P0, P3),
                    (P1, P11),
                    (P1, P12),
                    (P2, P21),
                    (P2, P22),
                    (P3, P31),
                    (P3, P32),
                ];
                let edges: Vec<Edge> = pairs.iter().map(|&(u, v)| Edge { u, v }).collect();
                let n = 10;
                // Floyd-Warshall on unit edge lengths.
                let mut d = vec![vec![f64::INFINITY; n]; n];
                for (i, row) in d.iter_mut().enumerate() {
                    row[i] = 0.0;
                }
                for e in &edges {
                    d[e.u][e.v] = 1.0;
                    d[e.v][e.u] = 1.0;
                }
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let via = d[i][k] + d[k][j];
                            if via < d[i][j] {
                                d[i][j] = via;
                            }
                        }
                    }
                }
                MetricGraph {
                    topology,
                    vertex_names: vec![
                        "p0", "p1", "p2", "p3", "p11", "p12", "p21", "p22", "p31", "p32",
                    ],
                    edges,
                    vdist: d,
                }
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    /// Vertex index of a point sitting at an edge endpoint, if any.
    pub fn as_vertex(&self, p: &GraphPoint) -> Option<usize> {
        let e = self.edges[p.edge];
        if p.offset == 0.0 {
            Some(e.u)
        } else if p.offset == 1.0 {
            Some(e.v)
        } else {
            None
        }
    }

    pub fn vertex_point(&self, v: usize) -> GraphPoint {
        for (i, e) in self.edges.iter().enumerate() {
            if e.u == v {
                return GraphPoint::new(i, 0.0);
            }
            if e.v == v {
                return GraphPoint::new(i, 1.0);
            }
        }
        unreachable!("isolated vertex");
    }

    pub fn validate(&self, p: &GraphPoint) -> Result<()> {
        if p.edge >= self.edges.len() || !(0.0..=1.0).contains(&p.offset) {
            return Err(Error::Domain(format!(
                "graph point out of range: edge {} offset {}",
                p.edge, p.offset
            )));
        }
        Ok(())
    }

    /// Points identical as locations on the graph (offset-0/1 endpoints
    /// identify with the incident vertex, loops identify 0 with 1).
    pub fn same_point(&self, a: &GraphPoint, b: &GraphPoint) -> bool {
        if a.edge == b.edge && a.offset == b.offset {
            return true;
        }
        match (self.as_vertex(a), self.as_vertex(b)) {
            (Some(u), Some(v)) => u == v,
            _ => false,
        }
    }

    /// Shortest-path distance over edges.
    pub fn distance(&self, a: &GraphPoint, b: &GraphPoint) -> f64 {
        let ea = self.edges[a.edge];
        let eb = self.edges[b.edge];
        let mut best = f64::INFINITY;
        if a.edge == b.edge {
            let direct = (a.offset - b.offset).abs();
            best = if ea.u == ea.v {
                // Self-loop: two arcs.
                direct.min(1.0 - direct)
            } else {
                direct
            };
        }
        // Through endpoint vertices.
        let ends_a = [(ea.u, a.offset), (ea.v, 1.0 - a.offset)];
        let ends_b = [(eb.u, b.offset), (eb.v, 1.0 - b.offset)];
        for (va, ca) in ends_a {
            for (vb, cb) in ends_b {
                let d = ca + self.vdist[va][vb] + cb;
                if d < best {
                    best = d;
                }
            }
        }
        best
    }
}

/// Canonical points of the figure-eight.
pub mod eight {
    use super::GraphPoint;

    /// Circle coordinate `u` on circle `i` (0 or 1) as a loop point.
    /// Loop offset `s` corresponds to circle coordinate `(1/2 + s) mod 1`.
    pub fn circle_coord(circle: usize, u: f64) -> GraphPoint {
        let s = crate::spaces::wrap_unit(u - 0.5);
        GraphPoint::new(circle, s)
    }

    /// Circle coordinate of a loop point on either circle.
    pub fn coord_of(p: &GraphPoint) -> f64 {
        crate::spaces::wrap_unit(p.offset + 0.5)
    }

    pub fn x1() -> GraphPoint {
        circle_coord(0, 0.0)
    }

    pub fn x2() -> GraphPoint {
        circle_coord(1, 0.0)
    }

    pub fn glue() -> GraphPoint {
        GraphPoint::new(0, 0.0)
    }
}
