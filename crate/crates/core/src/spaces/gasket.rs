//! The Sierpinski gasket restricted to its dyadic vertex sets.
//!
//! Corners `p1, p2, p3` span a unit triangle and the contraction toward
//! corner `i` halves distances to `p_i`. Level-`n` vertices are the images
//! of the corners under `n`-fold contractions; we store them as integer
//! barycentric coordinates `(a,b,c)` with `a+b+c = 2^n`, so every geometric
//! identity can be checked in exact integer arithmetic.
//!
//! The shortest-path metric is characterized by three conditions: it is
//! geodesic, corner pairs are at distance 1, and contraction halves
//! distances. `gasket_distance` evaluates it by a recursive descent over
//! cells; `GasketLevelGraph` provides the independent breadth-first oracle
//! on the level-`n` nearest-neighbor graph.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Maximum supported refinement level (memory guard).
pub const MAX_LEVEL: u32 = 12;

/// Exact dyadic rational `num / 2^exp`, kept normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dyadic {
    pub num: u64,
    pub exp: u32,
}

impl Dyadic {
    pub fn new(num: u64, exp: u32) -> Dyadic {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Dyadic {
        Dyadic { num: 0, exp: 0 }
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && self.num % 2 == 0 {
            self.num /= 2;
            self.exp -= 1;
        }
    }

    /// Exact halving (doubles the exponent scale).
    pub fn half(&self) -> Dyadic {
        Dyadic::new(self.num, self.exp + 1)
    }

    pub fn double(&self) -> Dyadic {
        if self.exp > 0 {
            Dyadic::new(self.num, self.exp - 1)
        } else {
            Dyadic::new(self.num * 2, 0)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (1u64 << self.exp) as f64
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Compare num_a / 2^ea with num_b / 2^eb via common scale (u128).
        let ea = self.exp;
        let eb = other.exp;
        let m = ea.max(eb);
        let lhs = (self.num as u128) << (m - ea);
        let rhs = (other.num as u128) << (m - eb);
        lhs.cmp(&rhs)
    }
}

/// Gasket vertex in integer barycentric coordinates at some level.
///
/// Invariant: `coords[0] + coords[1] + coords[2] == 2^level` and the
/// representation is canonical (not all coordinates even unless level 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct GasketPoint {
    level: u32,
    coords: [u64; 3],
}

impl GasketPoint {
    pub fn corner(i: usize) -> GasketPoint {
        let mut coords = [0u64; 3];
        coords[i] = 1;
        GasketPoint { level: 0, coords }
    }

    pub fn p1() -> GasketPoint {
        Self::corner(0)
    }
    pub fn p2() -> GasketPoint {
        Self::corner(1)
    }
    pub fn p3() -> GasketPoint {
        Self::corner(2)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coords(&self) -> [u64; 3] {
        self.coords
    }

    fn canonicalize(mut self) -> GasketPoint {
        while self.level > 0 && self.coords.iter().all(|c| c % 2 == 0) {
            for c in &mut self.coords {
                *c /= 2;
            }
            self.level -= 1;
        }
        self
    }

    /// Image under the contraction toward corner `i`.
    pub fn contract(&self, i: usize) -> GasketPoint {
        let mut coords = self.coords;
        let scale = 1u64 << self.level;
        coords[i] += scale;
        GasketPoint {
            level: self.level + 1,
            coords,
        }
        .canonicalize()
    }

    /// Build from unnormalized barycentric coordinates at the given level;
    /// the representation is reduced to canonical form.
    pub fn from_unnormalized(level: u32, coords: [u64; 3]) -> GasketPoint {
        debug_assert_eq!(coords[0] + coords[1] + coords[2], 1u64 << level);
        GasketPoint { level, coords }.canonicalize()
    }

    /// Unnormalized coordinates at a level at least as fine as the point's.
    pub fn coords_at_level(&self, level: u32) -> [u64; 3] {
        assert!(level >= self.level);
        let f = 1u64 << (level - self.level);
        [self.coords[0] * f, self.coords[1] * f, self.coords[2] * f]
    }

    /// Swap the roles of the first two corners (the gasket mirror map).
    pub fn mirror(&self) -> GasketPoint {
        GasketPoint {
            level: self.level,
            coords: [self.coords[1], self.coords[0], self.coords[2]],
        }
    }

    /// Lies on the symmetry axis between the first two corners.
    pub fn on_axis(&self) -> bool {
        self.coords[0] == self.coords[1]
    }

    /// Planar embedding with `p1=(0,0)`, `p2=(1,0)`, `p3=(1/2, sqrt(3)/2)`.
    pub fn to_xy(&self) -> [f64; 2] {
        let s = (1u64 << self.level) as f64;
        let b = self.coords[1] as f64 / s;
        let c = self.coords[2] as f64 / s;
        [b + 0.5 * c, c * 3f64.sqrt() / 2.0]
    }
}

fn cells_containing(coords: &[u64; 3], half: u64) -> Vec<usize> {
    (0..3).filter(|&i| coords[i] >= half).collect()
}

fn pull_back(coords: &[u64; 3], i: usize, half: u64) -> [u64; 3] {
    let mut c = *coords;
    c[i] -= half;
    c
}

/// Distances from a level-`m` vertex to the three global corners, in units
/// of `2^-m`.
fn corner_dist_units(coords: [u64; 3], m: u32) -> [u64; 3] {
    if m == 0 {
        let mut d = [1u64; 3];
        for i in 0..3 {
            if coords[i] == 1 {
                d[i] = 0;
            }
        }
        return d;
    }
    let half = 1u64 << (m - 1);
    let c = cells_containing(&coords, half)[0];
    let v = corner_dist_units(pull_back(&coords, c, half), m - 1);
    // v[k] is now the distance to the sub-cell corner toward p_k, in units
    // of 2^-m. h is half an edge of the enclosing triangle.
    let h = half;
    let mut out = [0u64; 3];
    for (j, o) in out.iter_mut().enumerate() {
        if j == c {
            *o = v
                .iter()
                .enumerate()
                .map(|(k, &vk)| if k == c { vk } else { vk + h })
                .min()
                .unwrap();
        } else {
            let third = 3 - c - j;
            *o = (v[j] + h).min(v[c] + 2 * h).min(v[third] + 2 * h);
        }
    }
    out
}

/// Corner label of `contract_i(p_k)`: the big corner itself or a midpoint.
#[derive(Clone, Copy, PartialEq, Eq)]
enum CellCorner {
    Vertex(usize),
    Midpoint(usize, usize), // unordered
}

fn cell_corner(i: usize, k: usize) -> CellCorner {
    if i == k {
        CellCorner::Vertex(i)
    } else {
        CellCorner::Midpoint(i.min(k), i.max(k))
    }
}

/// Distance between two level-1 corner labels, in units of 1/2.
fn level1_units(a: CellCorner, b: CellCorner) -> u64 {
    use CellCorner::*;
    match (a, b) {
        (Vertex(x), Vertex(y)) => {
            if x == y {
                0
            } else {
                2
            }
        }
        (Vertex(x), Midpoint(u, v)) | (Midpoint(u, v), Vertex(x)) => {
            if x == u || x == v {
                1
            } else {
                2
            }
        }
        (Midpoint(u, v), Midpoint(s, t)) => {
            if (u, v) == (s, t) {
                0
            } else {
                1
            }
        }
    }
}

fn dist_units(a: [u64; 3], b: [u64; 3], n: u32) -> u64 {
    if a == b {
        return 0;
    }
    if n == 0 {
        return 1; // distinct corners of the unit triangle
    }
    let half = 1u64 << (n - 1);
    let sa = cells_containing(&a, half);
    let sb = cells_containing(&b, half);
    for &i in &sa {
        if sb.contains(&i) {
            // Common cell: contraction halves distances, which keeps the
            // numerator fixed one level down.
            return dist_units(pull_back(&a, i, half), pull_back(&b, i, half), n - 1);
        }
    }
    let i = sa[0];
    let j = sb[0];
    let da = corner_dist_units(pull_back(&a, i, half), n - 1);
    let db = corner_dist_units(pull_back(&b, j, half), n - 1);
    let mut best = u64::MAX;
    for k in 0..3 {
        for l in 0..3 {
            let mid = level1_units(cell_corner(i, k), cell_corner(j, l)) * half;
            best = best.min(da[k] + mid + db[l]);
        }
    }
    best
}

/// Exact shortest-path distance between two gasket vertices.
pub fn gasket_distance(x: &GasketPoint, y: &GasketPoint) -> Result<Dyadic> {
    let n = x.level.max(y.level);
    if n > MAX_LEVEL {
        return Err(Error::LevelLimit {
            requested: n,
            max: MAX_LEVEL,
        });
    }
    let a = x.coords_at_level(n);
    let b = y.coords_at_level(n);
    Ok(Dyadic::new(dist_units(a, b, n), n))
}

/// Level-`n` vertex set with its nearest-neighbor edges of length `2^-n`.
#[derive(Debug)]
pub struct GasketLevelGraph {
    pub level: u32,
    pub vertices: Vec<GasketPoint>,
    pub edges: Vec<(usize, usize)>,
    index: BTreeMap<GasketPoint, usize>,
}

/// Enumerate the level-`n` vertices and edges by repeated contraction.
pub fn gasket_vertices(n: u32) -> Result<GasketLevelGraph> {
    if n > MAX_LEVEL {
        return Err(Error::LevelLimit {
            requested: n,
            max: MAX_LEVEL,
        });
    }
    let mut verts = vec![GasketPoint::p1(), GasketPoint::p2(), GasketPoint::p3()];
    let mut edges = vec![(0usize, 1usize), (0, 2), (1, 2)];
    for _ in 0..n {
        let mut index: BTreeMap<GasketPoint, usize> = BTreeMap::new();
        let mut nv: Vec<GasketPoint> = Vec::new();
        let mut ne: Vec<(usize, usize)> = Vec::new();
        let mut intern = |p: GasketPoint, nv: &mut Vec<GasketPoint>| -> usize {
            if let Some(&i) = index.get(&p) {
                return i;
            }
            let i = nv.len();
            nv.push(p);
            index.insert(p, i);
            i
        };
        for i in 0..3 {
            for &(u, v) in &edges {
                let a = intern(verts[u].contract(i), &mut nv);
                let b = intern(verts[v].contract(i), &mut nv);
                ne.push((a.min(b), a.max(b)));
            }
        }
        ne.sort_unstable();
        ne.dedup();
        verts = nv;
        edges = ne;
    }
    let index = verts
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect::<BTreeMap<_, _>>();
    Ok(GasketLevelGraph {
        level: n,
        vertices: verts,
        edges,
        index,
    })
}

impl GasketLevelGraph {
    pub fn vertex_index(&self, p: &GasketPoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Hop counts from a source vertex; all edges have equal length, so
    /// breadth-first search is the shortest-path oracle.
    pub fn bfs_hops(&self, source: usize) -> Vec<u64> {
        let adj = self.adjacency();
        let mut dist = vec![u64::MAX; self.vertices.len()];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == u64::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_hops(0).iter().all(|&d| d != u64::MAX)
    }
}

/// Membership test for the two right-hand cells by distance comparisons,
/// valid for vertices on the side of the second corner: a point belongs to
/// the cell at `p2` iff it is at least 1/2 from `p3` and at most 1/2 from
/// the midpoint of `p1 p2`, and symmetrically for the cell at `p3`.
pub fn membership_by_distance(w: &GasketPoint) -> Result<(bool, bool)> {
    let half = Dyadic::new(1, 1);
    let mid12 = GasketPoint::p1().contract(1);
    let d3 = gasket_distance(w, &GasketPoint::p3())?;
    let dm = gasket_distance(w, &mid12)?;
    let in_cell2 = d3 >= half && dm <= half;
    let in_cell3 = d3 <= half && dm >= half;
    Ok((in_cell2, in_cell3))
}
