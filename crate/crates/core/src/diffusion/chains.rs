//! Exact finite Markov-chain models of the diffusions, built so that the
//! chain symmetry plays the role of the reflection structure.
//!
//! Each builder produces a row-stochastic nearest-neighbor chain together
//! with a symmetry permutation, the mask of its fixed states, and a side
//! classification of every state. A chain is separation-clean when no
//! transition jumps directly between the two sides; the mirror coupling on
//! such a chain is exactly maximal, which the analysis layer verifies to
//! 1e-12. The gasket chain without axis subdivision intentionally retains
//! its single side-crossing edge to exhibit the resulting maximality gap.

use crate::error::{Error, Result};
use crate::reflection::Side;
use crate::spaces::gasket::{gasket_vertices, GasketPoint};
use crate::spaces::graph::{eight, tree, GraphPoint, GraphTopology, MetricGraph};
use crate::spaces::{Point, Space};

/// Discretization request for `build_chain`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainSpec {
    /// Lazy nearest-neighbor walk on a cycle of `m` states; the designated
    /// pair sits at antipodal states, so `m` must be divisible by 4 for the
    /// fixed states to land on the grid.
    Cycle { m: usize, laziness: f64 },
    /// Nearest-neighbor walk on the figure-eight with `m` states per
    /// circle (`m` even so the glue point is a state).
    Eight { m: usize },
    /// Nearest-neighbor walk on the star tree with `m` segments per edge.
    Tree { m: usize },
    /// Nearest-neighbor walk on the level-`level` gasket vertices; with
    /// `axis_subdivision` every side-crossing edge is subdivided through an
    /// added axis vertex.
    Gasket { level: u32, axis_subdivision: bool },
}

/// Finite symmetric Markov chain with its reflection data.
#[derive(Debug, Clone)]
pub struct FiniteChain {
    pub label: String,
    pub space: Space,
    pub states: Vec<Point>,
    /// Row-stochastic transition matrix, row-major.
    pub p: Vec<Vec<f64>>,
    /// Symmetry permutation with `P[s(i)][s(j)] = P[i][j]` exactly.
    pub sym: Vec<usize>,
    /// Fixed states of the symmetry.
    pub h_mask: Vec<bool>,
    pub sides: Vec<Side>,
    pub x1: usize,
    pub x2: usize,
    /// Transitions from `X1` directly to `X2` (empty iff separation-clean).
    pub crossing_edges: Vec<(usize, usize)>,
    /// Nominal duration of one step; chains are self-consistent models, so
    /// this is a label rather than a calibration.
    pub dt: f64,
}

impl FiniteChain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Distribution of the chain after `t` steps from `init` (a row of the
    /// `t`-th matrix power).
    pub fn distribution(&self, init: usize, t: usize) -> Vec<f64> {
        let n = self.len();
        let mut cur = vec![0.0; n];
        cur[init] = 1.0;
        let mut next = vec![0.0; n];
        for _ in 0..t {
            next.iter_mut().for_each(|x| *x = 0.0);
            for i in 0..n {
                let w = cur[i];
                if w == 0.0 {
                    continue;
                }
                for j in 0..n {
                    next[j] += w * self.p[i][j];
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// Survival probabilities of the first hitting time of the fixed set:
    /// `out[t] = P[tau > t]` for the walk started at `x1`, computed from
    /// the sub-stochastic restriction to the non-fixed states.
    pub fn mirror_survival(&self, t_max: usize) -> Vec<f64> {
        let n = self.len();
        let mut cur = vec![0.0; n];
        cur[self.x1] = 1.0;
        let mut out = Vec::with_capacity(t_max + 1);
        out.push(1.0);
        let mut next = vec![0.0; n];
        for _ in 0..t_max {
            next.iter_mut().for_each(|x| *x = 0.0);
            for i in 0..n {
                if self.h_mask[i] || cur[i] == 0.0 {
                    continue;
                }
                let w = cur[i];
                for j in 0..n {
                    if !self.h_mask[j] {
                        next[j] += w * self.p[i][j];
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
            out.push(cur.iter().sum());
        }
        out
    }

    /// Survival of the first hitting time of an arbitrary absorbing state
    /// set, from `init`.
    pub fn hit_survival(&self, init: usize, absorbing: &[usize], t_max: usize) -> Vec<f64> {
        let n = self.len();
        let mut absorb = vec![false; n];
        for &a in absorbing {
            absorb[a] = true;
        }
        let mut cur = vec![0.0; n];
        cur[init] = 1.0;
        let mut out = Vec::with_capacity(t_max + 1);
        out.push(if absorb[init] { 0.0 } else { 1.0 });
        let mut next = vec![0.0; n];
        for _ in 0..t_max {
            next.iter_mut().for_each(|x| *x = 0.0);
            for i in 0..n {
                if absorb[i] || cur[i] == 0.0 {
                    continue;
                }
                let w = cur[i];
                for j in 0..n {
                    if !absorb[j] {
                        next[j] += w * self.p[i][j];
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
            out.push(cur.iter().sum());
        }
        out
    }

    /// Construction-time invariants: stochastic rows, exact equivariance,
    /// involutive symmetry mapping `x1` to `x2`, and side consistency.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        for (i, row) in self.p.iter().enumerate() {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-14 {
                return Err(Error::Consistency(format!("row {i} sums to {s}")));
            }
        }
        for i in 0..n {
            if self.sym[self.sym[i]] != i {
                return Err(Error::Consistency("symmetry is not an involution".into()));
            }
            if self.h_mask[i] != (self.sym[i] == i) {
                return Err(Error::Consistency("h_mask differs from fixed states".into()));
            }
            let want = match self.sides[i] {
                Side::X1 => Side::X2,
                Side::H => Side::H,
                Side::X2 => Side::X1,
            };
            if self.sides[self.sym[i]] != want {
                return Err(Error::Consistency("sides not swapped by symmetry".into()));
            }
            if self.h_mask[i] != (self.sides[i] == Side::H) {
                return Err(Error::Consistency("side H differs from h_mask".into()));
            }
            for j in 0..n {
                if self.p[self.sym[i]][self.sym[j]] != self.p[i][j] {
                    return Err(Error::Consistency(format!(
                        "equivariance broken at ({i},{j})"
                    )));
                }
            }
        }
        if self.sym[self.x1] != self.x2 {
            return Err(Error::Consistency("symmetry does not map x1 to x2".into()));
        }
        Ok(())
    }

    /// Error if any transition crosses between the sides without touching
    /// the fixed set.
    pub fn require_separation(&self) -> Result<()> {
        if self.crossing_edges.is_empty() {
            Ok(())
        } else {
            Err(Error::Consistency(format!(
                "{} has {} side-crossing transitions",
                self.label,
                self.crossing_edges.len()
            )))
        }
    }
}

fn finish(
    label: String,
    space: Space,
    states: Vec<Point>,
    p: Vec<Vec<f64>>,
    sym: Vec<usize>,
    sides: Vec<Side>,
    x1: usize,
    x2: usize,
) -> Result<FiniteChain> {
    let n = states.len();
    let h_mask: Vec<bool> = (0..n).map(|i| sym[i] == i).collect();
    let mut crossing = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if p[i][j] > 0.0
                && ((sides[i] == Side::X1 && sides[j] == Side::X2)
                    || (sides[i] == Side::X2 && sides[j] == Side::X1))
            {
                crossing.push((i, j));
            }
        }
    }
    let chain = FiniteChain {
        label,
        space,
        states,
        p,
        sym,
        h_mask,
        sides,
        x1,
        x2,
        crossing_edges: crossing,
        dt: 1.0,
    };
    chain.validate()?;
    Ok(chain)
}

/// Build the requested chain; every invariant is asserted at construction.
pub fn build_chain(spec: &ChainSpec) -> Result<FiniteChain> {
    match *spec {
        ChainSpec::Cycle { m, laziness } => {
            if m < 4 || m % 4 != 0 {
                return Err(Error::Parity(format!(
                    "cycle needs m divisible by 4 so the fixed states land on the grid, got {m}"
                )));
            }
            if !(0.0..1.0).contains(&laziness) {
                return Err(Error::Domain(format!("laziness {laziness} outside [0,1)")));
            }
            let states: Vec<Point> = (0..m)
                .map(|k| Point::circle(k as f64 / m as f64))
                .collect();
            let mut p = vec![vec![0.0; m]; m];
            let hop = (1.0 - laziness) / 2.0;
            for k in 0..m {
                p[k][k] += laziness;
                p[k][(k + 1) % m] += hop;
                p[k][(k + m - 1) % m] += hop;
            }
            let sym: Vec<usize> = (0..m).map(|k| (m / 2 + m - k) % m).collect();
            let q = m / 4;
            let sides: Vec<Side> = (0..m)
                .map(|k| {
                    if k == q || k == 3 * q {
                        Side::H
                    } else if k < q || k > 3 * q {
                        Side::X1
                    } else {
                        Side::X2
                    }
                })
                .collect();
            let chain = finish(
                format!("cycle({m},{laziness})"),
                Space::Circle,
                states,
                p,
                sym,
                sides,
                0,
                m / 2,
            )?;
            chain.require_separation()?;
            Ok(chain)
        }
        ChainSpec::Eight { m } => {
            if m < 2 || m % 2 != 0 {
                return Err(Error::Parity(format!(
                    "eight chain needs an even number of states per circle so the glue point is a state, got {m}"
                )));
            }
            let graph = std::sync::Arc::new(MetricGraph::build(GraphTopology::Eight));
            let n = 2 * m - 1;
            let id = |c: usize, k: usize| -> usize {
                let k = k % m;
                if c == 0 {
                    k
                } else if k == m / 2 {
                    m / 2
                } else if k < m / 2 {
                    m + k
                } else {
                    m + k - 1
                }
            };
            let mut states = vec![Point::Circle(0.0); n];
            for c in 0..2 {
                for k in 0..m {
                    states[id(c, k)] =
                        Point::MetricGraph(eight::circle_coord(c, k as f64 / m as f64));
                }
            }
            let mut p = vec![vec![0.0; n]; n];
            for c in 0..2 {
                for k in 0..m {
                    let i = id(c, k);
                    p[i][id(c, k + 1)] += 0.25;
                    p[i][id(c, k + m - 1)] += 0.25;
                }
            }
            // Rows were filled once per incident circle; the glue state got
            // all four quarter-steps, plain states need doubling.
            for (i, row) in p.iter_mut().enumerate() {
                let s: f64 = row.iter().sum();
                if i != id(0, m / 2) {
                    debug_assert!((s - 0.5).abs() < 1e-15);
                    row.iter_mut().for_each(|x| *x *= 2.0);
                }
            }
            let mut sym = vec![0usize; n];
            let mut sides = vec![Side::H; n];
            for c in 0..2 {
                for k in 0..m {
                    sym[id(c, k)] = id(1 - c, k);
                    sides[id(c, k)] = if k == m / 2 {
                        Side::H
                    } else if c == 0 {
                        Side::X1
                    } else {
                        Side::X2
                    };
                }
            }
            let chain = finish(
                format!("eight({m})"),
                Space::MetricGraph(graph),
                states,
                p,
                sym,
                sides,
                id(0, 0),
                id(1, 0),
            )?;
            chain.require_separation()?;
            Ok(chain)
        }
        ChainSpec::Tree { m } => {
            if m == 0 {
                return Err(Error::Domain("tree chain needs m >= 1".into()));
            }
            let graph = std::sync::Arc::new(MetricGraph::build(GraphTopology::StarTree));
            let nv = graph.vertex_count();
            let n = nv + 9 * (m - 1);
            let interior = |e: usize, j: usize| nv + e * (m - 1) + (j - 1);
            let mut states: Vec<Point> = (0..nv)
                .map(|v| Point::MetricGraph(graph.vertex_point(v)))
                .collect();
            for e in 0..9 {
                for j in 1..m {
                    states.push(Point::MetricGraph(GraphPoint::new(e, j as f64 / m as f64)));
                }
            }
            // Adjacency along each subdivided edge.
            let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
            for (e, edge) in graph.edges.iter().enumerate() {
                let chain_ids: Vec<usize> = std::iter::once(edge.u)
                    .chain((1..m).map(|j| interior(e, j)))
                    .chain(std::iter::once(edge.v))
                    .collect();
                for w in chain_ids.windows(2) {
                    adj[w[0]].push(w[1]);
                    adj[w[1]].push(w[0]);
                }
            }
            let mut p = vec![vec![0.0; n]; n];
            for i in 0..n {
                let deg = adj[i].len() as f64;
                for &j in &adj[i] {
                    p[i][j] += 1.0 / deg;
                }
            }
            const VERTEX_IMAGE: [usize; 10] = [
                tree::P0,
                tree::P2,
                tree::P1,
                tree::P3,
                tree::P22,
                tree::P21,
                tree::P12,
                tree::P11,
                tree::P31,
                tree::P32,
            ];
            const EDGE_IMAGE: [usize; 9] = [1, 0, 2, 6, 5, 4, 3, 7, 8];
            let mut sym = vec![0usize; n];
            for v in 0..nv {
                sym[v] = VERTEX_IMAGE[v];
            }
            for e in 0..9 {
                for j in 1..m {
                    sym[interior(e, j)] = interior(EDGE_IMAGE[e], j);
                }
            }
            let side_of_edge = |e: usize, at_start: bool| -> Side {
                match e {
                    2 | 7 | 8 => Side::H,
                    0 => {
                        if at_start {
                            Side::H
                        } else {
                            Side::X1
                        }
                    }
                    1 => {
                        if at_start {
                            Side::H
                        } else {
                            Side::X2
                        }
                    }
                    3 | 4 => Side::X1,
                    _ => Side::X2,
                }
            };
            let mut sides = vec![Side::H; n];
            for v in 0..nv {
                sides[v] = match v {
                    tree::P0 | tree::P3 | tree::P31 | tree::P32 => Side::H,
                    tree::P1 | tree::P11 | tree::P12 => Side::X1,
                    _ => Side::X2,
                };
            }
            for e in 0..9 {
                for j in 1..m {
                    sides[interior(e, j)] = side_of_edge(e, false);
                }
            }
            let chain = finish(
                format!("tree({m})"),
                Space::MetricGraph(graph),
                states,
                p,
                sym,
                sides,
                tree::P11,
                tree::P22,
            )?;
            chain.require_separation()?;
            Ok(chain)
        }
        ChainSpec::Gasket {
            level,
            axis_subdivision,
        } => {
            let g = gasket_vertices(level)?;
            let mut states_g: Vec<GasketPoint> = g.vertices.clone();
            let side_of = |p: &GasketPoint| -> Side {
                let c = p.coords();
                match c[0].cmp(&c[1]) {
                    std::cmp::Ordering::Greater => Side::X1,
                    std::cmp::Ordering::Equal => Side::H,
                    std::cmp::Ordering::Less => Side::X2,
                }
            };
            let mut edges: Vec<(usize, usize)> = g.edges.clone();
            if axis_subdivision {
                let crossing: Vec<(usize, usize)> = edges
                    .iter()
                    .copied()
                    .filter(|&(u, v)| {
                        let (su, sv) = (side_of(&states_g[u]), side_of(&states_g[v]));
                        matches!(
                            (su, sv),
                            (Side::X1, Side::X2) | (Side::X2, Side::X1)
                        )
                    })
                    .collect();
                edges.retain(|e| !crossing.contains(e));
                for (u, v) in crossing {
                    let cu = states_g[u].coords_at_level(level);
                    let cv = states_g[v].coords_at_level(level);
                    let mid = GasketPoint::from_unnormalized(
                        level + 1,
                        [cu[0] + cv[0], cu[1] + cv[1], cu[2] + cv[2]],
                    );
                    debug_assert_eq!(side_of(&mid), Side::H);
                    let mi = states_g.len();
                    states_g.push(mid);
                    edges.push((u, mi));
                    edges.push((mi, v));
                }
            }
            let n = states_g.len();
            let index: std::collections::BTreeMap<GasketPoint, usize> = states_g
                .iter()
                .enumerate()
                .map(|(i, &p)| (p, i))
                .collect();
            let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
            for &(u, v) in &edges {
                adj[u].push(v);
                adj[v].push(u);
            }
            let mut p = vec![vec![0.0; n]; n];
            for i in 0..n {
                let deg = adj[i].len() as f64;
                for &j in &adj[i] {
                    p[i][j] += 1.0 / deg;
                }
            }
            let sym: Vec<usize> = states_g
                .iter()
                .map(|s| index[&s.mirror()])
                .collect();
            let sides: Vec<Side> = states_g.iter().map(side_of).collect();
            let x1 = index[&GasketPoint::p1()];
            let x2 = index[&GasketPoint::p2()];
            let states = states_g.into_iter().map(Point::Gasket).collect();
            let chain = finish(
                format!("gasket({level},{axis_subdivision})"),
                Space::Gasket,
                states,
                p,
                sym,
                sides,
                x1,
                x2,
            )?;
            if axis_subdivision {
                chain.require_separation()?;
            }
            Ok(chain)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cycle_one_step_law() {
        let c = build_chain(&ChainSpec::Cycle { m: 4, laziness: 0.5 }).unwrap();
        assert_eq!(c.distribution(0, 1), vec![0.5, 0.25, 0.0, 0.25]);
    }

    #[test]
    fn cycle_two_step_law_matches_hand_square() {
        let c = build_chain(&ChainSpec::Cycle { m: 4, laziness: 0.5 }).unwrap();
        let d = c.distribution(0, 2);
        let want = [3.0 / 8.0, 0.25, 1.0 / 8.0, 0.25];
        for (a, b) in d.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn distribution_at_zero_steps_is_point_mass() {
        let c = build_chain(&ChainSpec::Eight { m: 4 }).unwrap();
        let d = c.distribution(c.x1, 0);
        assert_eq!(d[c.x1], 1.0);
        assert_eq!(d.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn equivariance_gives_permuted_distributions() {
        // The matrix identity P[s(i)][s(j)] = P[i][j] is bitwise (asserted
        // at construction); iterated products only differ in summation
        // order, so rows of powers match to the last couple of ulps.
        let c = build_chain(&ChainSpec::Tree { m: 2 }).unwrap();
        let t = 7;
        let from_x1 = c.distribution(c.x1, t);
        let from_x2 = c.distribution(c.x2, t);
        for i in 0..c.len() {
            assert_abs_diff_eq!(from_x1[i], from_x2[c.sym[i]], epsilon = 1e-15);
        }
    }

    #[test]
    fn tree_chain_state_count() {
        // 9 edges subdivided once plus 10 vertices, shared endpoints once.
        let c = build_chain(&ChainSpec::Tree { m: 2 }).unwrap();
        assert_eq!(c.len(), 19);
    }

    #[test]
    fn eight_chain_counts_and_parity() {
        let c = build_chain(&ChainSpec::Eight { m: 4 }).unwrap();
        assert_eq!(c.len(), 7);
        assert!(matches!(
            build_chain(&ChainSpec::Eight { m: 5 }),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn gasket_corner_steps_uniformly() {
        let c = build_chain(&ChainSpec::Gasket { level: 1, axis_subdivision: false }).unwrap();
        // p3 is a degree-2 corner.
        let p3 = c
            .states
            .iter()
            .position(|s| matches!(s, Point::Gasket(g) if *g == GasketPoint::p3()))
            .unwrap();
        let row = &c.p[p3];
        let nonzero: Vec<f64> = row.iter().copied().filter(|&x| x > 0.0).collect();
        assert_eq!(nonzero, vec![0.5, 0.5]);
    }

    #[test]
    fn gasket_crossing_edges() {
        let plain = build_chain(&ChainSpec::Gasket { level: 2, axis_subdivision: false }).unwrap();
        assert!(!plain.crossing_edges.is_empty());
        let fixed = build_chain(&ChainSpec::Gasket { level: 2, axis_subdivision: true }).unwrap();
        assert!(fixed.crossing_edges.is_empty());
        assert_eq!(fixed.len(), plain.len() + plain.crossing_edges.len() / 2);
    }

    #[test]
    fn cycle_survival_halves() {
        let c = build_chain(&ChainSpec::Cycle { m: 4, laziness: 0.5 }).unwrap();
        let s = c.mirror_survival(5);
        for (t, v) in s.iter().enumerate() {
            assert_abs_diff_eq!(*v, 0.5f64.powi(t as i32), epsilon = 1e-15);
        }
    }

    #[test]
    fn odd_cycle_rejected() {
        assert!(matches!(
            build_chain(&ChainSpec::Cycle { m: 6, laziness: 0.5 }),
            Err(Error::Parity(_))
        ));
    }
}
