//! Reflection structures: an involutive map `R` whose fixed set `H`
//! separates the space into two swapped open halves, with `R x1 = x2` for a
//! designated starting pair.
//!
//! Every model space gets its canonical structure: perpendicular-bisector
//! hyperplanes in Euclidean space, angle flips on the circle, linear and
//! Lorentz reflections for the sphere and the hyperboloid, an axis flip on
//! the flat torus when the starting pair is aligned with a lattice
//! direction, circle-swapping and branch-swapping isometries on the metric
//! graphs, and the coordinate mirror on the gasket.
//!
//! For a torus pair that is not axis-aligned the equidistant set is a union
//! of four segments with a corner, which rules out a reflection structure;
//! `build_structure` reports that verdict together with the explicit
//! bisector geometry as a witness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::graph::{eight, tree, GraphTopology};
use crate::spaces::{
    circle_distance, dot3, minkowski_dot, wrap_unit, GasketPoint, GraphPoint, Point, Space,
};

/// Band half-width for H membership on continuous spaces; membership is
/// exact on graphs and the gasket.
pub const H_BAND: f64 = 1e-12;

/// Region tag relative to a reflection structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    X1,
    H,
    X2,
}

impl Side {
    pub fn swap(self) -> Side {
        match self {
            Side::X1 => Side::X2,
            Side::H => Side::H,
            Side::X2 => Side::X1,
        }
    }
}

/// Involution descriptor, one variant per space family.
#[derive(Debug, Clone)]
enum ReflectionMap {
    /// `R(x) = x - 2 s(x) n` with `s(x) = (x - m) . n`; `s > 0` on `X1`.
    EuclideanHyperplane { normal: Vec<f64>, midpoint: Vec<f64> },
    /// `R(u) = (c - u) mod 1`; fixed angles `c/2` and `c/2 + 1/2`.
    CircleFlip { c: f64 },
    /// Axis-aligned torus flip `R(p,q) = ((c - p) mod 1, q)` (axis 0) or the
    /// transpose; fixed set is two vertical circles.
    TorusFlip { c: f64, axis: usize },
    /// Restriction of the ambient linear reflection `z - 2 (z.n) n`.
    SphereLinear { normal: [f64; 3] },
    /// Lorentz reflection `z - 2 (<z,n>_L / <n,n>_L) n`.
    HyperboloidLorentz { normal: [f64; 3] },
    /// Figure-eight: swap the two circles through the identity gluing.
    EightSwap,
    /// Star tree: swap branches 1 and 2, fixing the center and branch 3.
    TreeSwap,
    /// Gasket: swap the barycentric roles of the first two corners.
    GasketMirror,
}

/// Validated reflection structure for a space and a starting pair.
#[derive(Debug, Clone)]
pub struct ReflectionStructure {
    pub space: Space,
    pub x1: Point,
    pub x2: Point,
    map: ReflectionMap,
    /// Angular position of `x1` relative to the first fixed point, used to
    /// orient sides on circle-like fixed sets.
    x1_arc: bool,
}

impl ReflectionStructure {
    /// Canonical structure for the pair `(x1, x2)`.
    ///
    /// Supported: Euclidean space for any distinct pair, the circle, the
    /// sphere, the hyperboloid, the flat torus when the pair is aligned
    /// with a coordinate axis, and the canonical pairs of the eight, the
    /// star tree and the gasket. A torus pair with both wrapped
    /// displacement components nonzero has no reflection structure; the
    /// error carries the bisector geometry as a witness.
    pub fn build(space: Space, x1: Point, x2: Point) -> Result<ReflectionStructure> {
        if !space.contains(&x1) || !space.contains(&x2) {
            return Err(Error::SpaceMismatch(space.name(), x1.space_name()));
        }
        if space.distance(&x1, &x2)? == 0.0 {
            return Err(Error::Domain("starting points must be distinct".into()));
        }
        let map = match (&space, &x1, &x2) {
            (Space::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
                let diff: Vec<f64> = a.iter().zip(b).map(|(u, v)| u - v).collect();
                let n = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
                ReflectionMap::EuclideanHyperplane {
                    normal: diff.iter().map(|d| d / n).collect(),
                    midpoint: a.iter().zip(b).map(|(u, v)| (u + v) / 2.0).collect(),
                }
            }
            (Space::Circle, Point::Circle(a), Point::Circle(b)) => {
                ReflectionMap::CircleFlip { c: wrap_unit(a + b) }
            }
            (Space::FlatTorus, Point::FlatTorus(a), Point::FlatTorus(b)) => {
                let w = |d: f64| {
                    // wrap displacement to [-1/2, 1/2]
                    let r = wrap_unit(d);
                    if r > 0.5 {
                        r - 1.0
                    } else {
                        r
                    }
                };
                let dp = w(a[0] - b[0]);
                let dq = w(a[1] - b[1]);
                let aligned_axis = if dq.abs() <= H_BAND {
                    Some(0)
                } else if dp.abs() <= H_BAND {
                    Some(1)
                } else {
                    None
                };
                match aligned_axis {
                    Some(axis) => ReflectionMap::TorusFlip {
                        c: wrap_unit(a[axis] + b[axis]),
                        axis,
                    },
                    None => {
                        let pa = dp.abs().max(dq.abs());
                        let pb = dp.abs().min(dq.abs());
                        return Err(Error::NoReflection(Box::new(torus_bisector(pa, pb)?)));
                    }
                }
            }
            (Space::Sphere2, Point::Sphere2(a), Point::Sphere2(b)) => {
                let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
                let n = dot3(&d, &d).sqrt();
                ReflectionMap::SphereLinear {
                    normal: [d[0] / n, d[1] / n, d[2] / n],
                }
            }
            (Space::Hyperbolic2, Point::Hyperbolic2(a), Point::Hyperbolic2(b)) => {
                ReflectionMap::HyperboloidLorentz {
                    normal: [a[0] - b[0], a[1] - b[1], a[2] - b[2]],
                }
            }
            (Space::MetricGraph(g), Point::MetricGraph(a), Point::MetricGraph(b)) => {
                match g.topology {
                    GraphTopology::Eight => {
                        if !(g.same_point(a, &eight::x1()) && g.same_point(b, &eight::x2())) {
                            return Err(Error::Unsupported(
                                "eight reflection is built for the canonical pair (0 in each circle)".into(),
                            ));
                        }
                        ReflectionMap::EightSwap
                    }
                    GraphTopology::StarTree => {
                        let p11 = g.vertex_point(tree::P11);
                        let p22 = g.vertex_point(tree::P22);
                        if !(g.same_point(a, &p11) && g.same_point(b, &p22)) {
                            return Err(Error::Unsupported(
                                "star-tree reflection is built for the pair (p11, p22)".into(),
                            ));
                        }
                        ReflectionMap::TreeSwap
                    }
                }
            }
            (Space::Gasket, Point::Gasket(a), Point::Gasket(b)) => {
                if !(*a == GasketPoint::p1() && *b == GasketPoint::p2()) {
                    return Err(Error::Unsupported(
                        "gasket reflection is built for the pair (p1, p2)".into(),
                    ));
                }
                ReflectionMap::GasketMirror
            }
            _ => return Err(Error::Unsupported(format!("reflection on {}", space.name()))),
        };
        let mut s = ReflectionStructure {
            space,
            x1,
            x2,
            map,
            x1_arc: false,
        };
        s.x1_arc = s.first_arc(&s.x1);
        // Construction-time sanity: R x1 = x2 and the pair straddles H.
        // Tolerance 1e-7: near-coincident points on curved spaces amplify
        // coordinate rounding through acos/acosh by a square root.
        let rx1 = s.reflect(&s.x1);
        if s.space.distance(&rx1, &s.x2)? > 1e-7 {
            return Err(Error::Consistency("R(x1) != x2 after construction".into()));
        }
        if s.side(&s.x1) != Side::X1 || s.side(&s.x2) != Side::X2 {
            return Err(Error::Consistency("starting pair not separated by H".into()));
        }
        Ok(s)
    }

    /// The involution `R`.
    pub fn reflect(&self, x: &Point) -> Point {
        match (&self.map, x) {
            (ReflectionMap::EuclideanHyperplane { normal, midpoint }, Point::Euclidean(c)) => {
                let s: f64 = c
                    .iter()
                    .zip(midpoint)
                    .zip(normal)
                    .map(|((ci, mi), ni)| (ci - mi) * ni)
                    .sum();
                Point::Euclidean(
                    c.iter()
                        .zip(normal)
                        .map(|(ci, ni)| ci - 2.0 * s * ni)
                        .collect(),
                )
            }
            (ReflectionMap::CircleFlip { c }, Point::Circle(u)) => Point::circle(c - u),
            (ReflectionMap::TorusFlip { c, axis }, Point::FlatTorus(pq)) => {
                let mut out = *pq;
                out[*axis] = wrap_unit(c - pq[*axis]);
                Point::FlatTorus(out)
            }
            (ReflectionMap::SphereLinear { normal }, Point::Sphere2(z)) => {
                let s = dot3(z, normal);
                Point::Sphere2([
                    z[0] - 2.0 * s * normal[0],
                    z[1] - 2.0 * s * normal[1],
                    z[2] - 2.0 * s * normal[2],
                ])
            }
            (ReflectionMap::HyperboloidLorentz { normal }, Point::Hyperbolic2(z)) => {
                let q = minkowski_dot(normal, normal);
                let s = minkowski_dot(z, normal) / q;
                Point::Hyperbolic2([
                    z[0] - 2.0 * s * normal[0],
                    z[1] - 2.0 * s * normal[1],
                    z[2] - 2.0 * s * normal[2],
                ])
            }
            (ReflectionMap::EightSwap, Point::MetricGraph(p)) => {
                Point::MetricGraph(GraphPoint::new(1 - p.edge, p.offset))
            }
            (ReflectionMap::TreeSwap, Point::MetricGraph(p)) => {
                const EDGE_IMAGE: [usize; 9] = [1, 0, 2, 6, 5, 4, 3, 7, 8];
                Point::MetricGraph(GraphPoint::new(EDGE_IMAGE[p.edge], p.offset))
            }
            (ReflectionMap::GasketMirror, Point::Gasket(g)) => Point::Gasket(g.mirror()),
            _ => unreachable!("space tag checked at construction"),
        }
    }

    /// Signed coordinate transverse to `H`, positive on `X1`, where such a
    /// coordinate exists (continuous spaces). Graphs and the gasket use
    /// exact side logic instead.
    fn transverse(&self, x: &Point) -> Option<f64> {
        match (&self.map, x) {
            (ReflectionMap::EuclideanHyperplane { normal, midpoint }, Point::Euclidean(c)) => {
                Some(
                    c.iter()
                        .zip(midpoint)
                        .zip(normal)
                        .map(|((ci, mi), ni)| (ci - mi) * ni)
                        .sum(),
                )
            }
            (ReflectionMap::CircleFlip { c }, Point::Circle(u)) => {
                Some(arc_coordinate(*c, *u, self.x1_arc))
            }
            (ReflectionMap::TorusFlip { c, axis }, Point::FlatTorus(pq)) => {
                Some(arc_coordinate(*c, pq[*axis], self.x1_arc))
            }
            (ReflectionMap::SphereLinear { normal }, Point::Sphere2(z)) => {
                Some(dot3(z, normal).clamp(-1.0, 1.0).asin())
            }
            (ReflectionMap::HyperboloidLorentz { normal }, Point::Hyperbolic2(z)) => {
                let q = minkowski_dot(normal, normal).sqrt();
                Some((minkowski_dot(z, normal) / q).asinh())
            }
            _ => None,
        }
    }

    fn first_arc(&self, x: &Point) -> bool {
        match (&self.map, x) {
            (ReflectionMap::CircleFlip { c }, Point::Circle(u)) => {
                let pos = wrap_unit(u - c / 2.0);
                pos < 0.5
            }
            (ReflectionMap::TorusFlip { c, axis }, Point::FlatTorus(pq)) => {
                let pos = wrap_unit(pq[*axis] - c / 2.0);
                pos < 0.5
            }
            _ => true,
        }
    }

    /// Classify a point as `X1`, `H`, or `X2`.
    pub fn side(&self, x: &Point) -> Side {
        match (&self.map, x) {
            (ReflectionMap::EightSwap, Point::MetricGraph(p)) => {
                let Space::MetricGraph(g) = &self.space else {
                    unreachable!()
                };
                if g.same_point(p, &eight::glue()) {
                    Side::H
                } else if p.edge == 0 {
                    Side::X1
                } else {
                    Side::X2
                }
            }
            (ReflectionMap::TreeSwap, Point::MetricGraph(p)) => {
                // Edge 0 and the two leaf edges at p1 form branch 1; the
                // center belongs to H, branch 3 is fixed pointwise.
                match p.edge {
                    2 | 7 | 8 => Side::H,
                    0 => {
                        if p.offset == 0.0 {
                            Side::H
                        } else {
                            Side::X1
                        }
                    }
                    3 | 4 => Side::X1,
                    1 => {
                        if p.offset == 0.0 {
                            Side::H
                        } else {
                            Side::X2
                        }
                    }
                    _ => Side::X2,
                }
            }
            (ReflectionMap::GasketMirror, Point::Gasket(g)) => {
                let c = g.coords();
                match c[0].cmp(&c[1]) {
                    std::cmp::Ordering::Greater => Side::X1,
                    std::cmp::Ordering::Equal => Side::H,
                    std::cmp::Ordering::Less => Side::X2,
                }
            }
            _ => {
                let s = self.transverse(x).expect("continuous space");
                if s.abs() <= H_BAND {
                    Side::H
                } else if s > 0.0 {
                    Side::X1
                } else {
                    Side::X2
                }
            }
        }
    }

    /// Unsigned distances from `x` to each sheet of the fixed set, for the
    /// flat spaces where between-sample crossing corrections apply.
    pub fn barrier_distances(&self, x: &Point) -> Result<Vec<f64>> {
        match (&self.map, x) {
            (ReflectionMap::EuclideanHyperplane { .. }, _) => {
                Ok(vec![self.transverse(x).unwrap().abs()])
            }
            (ReflectionMap::CircleFlip { c }, Point::Circle(u)) => {
                let h0 = wrap_unit(c / 2.0);
                let h1 = wrap_unit(c / 2.0 + 0.5);
                Ok(vec![circle_distance(*u, h0), circle_distance(*u, h1)])
            }
            (ReflectionMap::TorusFlip { c, axis }, Point::FlatTorus(pq)) => {
                let h0 = wrap_unit(c / 2.0);
                let h1 = wrap_unit(c / 2.0 + 0.5);
                Ok(vec![
                    circle_distance(pq[*axis], h0),
                    circle_distance(pq[*axis], h1),
                ])
            }
            _ => Err(Error::Unsupported(format!(
                "barrier distances on {}",
                self.space.name()
            ))),
        }
    }

    /// Points of `H` sampled uniformly, for equidistance checks.
    pub fn sample_fixed_set(&self, n: usize) -> Result<Vec<Point>> {
        let ts = |k: usize| (k as f64 + 0.5) / n as f64;
        match &self.map {
            ReflectionMap::EuclideanHyperplane { normal, midpoint } => {
                // A line through the midpoint inside the hyperplane (or the
                // single fixed point in dimension 1).
                if normal.len() == 1 {
                    return Ok(vec![Point::Euclidean(midpoint.clone())]);
                }
                let mut tangent = vec![0.0; normal.len()];
                let (imin, _) = normal
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                    .unwrap();
                tangent[imin] = 1.0;
                let a: f64 = tangent.iter().zip(normal).map(|(t, n)| t * n).sum();
                for (t, nc) in tangent.iter_mut().zip(normal) {
                    *t -= a * nc;
                }
                let tn = tangent.iter().map(|t| t * t).sum::<f64>().sqrt();
                Ok((0..n)
                    .map(|k| {
                        let s = 4.0 * (ts(k) - 0.5);
                        Point::Euclidean(
                            midpoint
                                .iter()
                                .zip(&tangent)
                                .map(|(m, t)| m + s * t / tn)
                                .collect(),
                        )
                    })
                    .collect())
            }
            ReflectionMap::CircleFlip { c } => Ok(vec![
                Point::circle(c / 2.0),
                Point::circle(c / 2.0 + 0.5),
            ]),
            ReflectionMap::TorusFlip { c, axis } => Ok((0..n)
                .map(|k| {
                    let fixed = if k % 2 == 0 { c / 2.0 } else { c / 2.0 + 0.5 };
                    let mut coords = [0.0; 2];
                    coords[*axis] = wrap_unit(fixed);
                    coords[1 - *axis] = ts(k);
                    Point::FlatTorus(coords)
                })
                .collect()),
            ReflectionMap::SphereLinear { normal } => {
                // Great circle orthogonal to the normal.
                let e1 = orthonormal_complement(normal);
                let e2 = cross(normal, &e1);
                Ok((0..n)
                    .map(|k| {
                        let t = std::f64::consts::TAU * ts(k);
                        Point::Sphere2([
                            t.cos() * e1[0] + t.sin() * e2[0],
                            t.cos() * e1[1] + t.sin() * e2[1],
                            t.cos() * e1[2] + t.sin() * e2[2],
                        ])
                    })
                    .collect())
            }
            ReflectionMap::HyperboloidLorentz { normal } => {
                // The fixed geodesic through the pair midpoint.
                let m = hyperbolic_midpoint(&self.x1, &self.x2);
                let space = Space::Hyperbolic2;
                let frame = crate::spaces::manifold::orthonormal_frame(&space, &m)?;
                // Pick the frame vector tangent to H (orthogonal to normal).
                let q = minkowski_dot(normal, normal).sqrt();
                let nl = [normal[0] / q, normal[1] / q, normal[2] / q];
                let pick = frame
                    .into_iter()
                    .min_by(|a, b| {
                        let pa = minkowski_dot(&vec3(&a.components), &nl).abs();
                        let pb = minkowski_dot(&vec3(&b.components), &nl).abs();
                        pa.total_cmp(&pb)
                    })
                    .unwrap();
                Ok((0..n)
                    .map(|k| {
                        let s = 4.0 * (ts(k) - 0.5);
                        let v = crate::spaces::TangentVector::new(
                            m.clone(),
                            pick.components.iter().map(|c| c * s).collect(),
                        );
                        crate::spaces::manifold::exp_map(&space, &m, &v).unwrap()
                    })
                    .collect())
            }
            ReflectionMap::EightSwap => {
                let Space::MetricGraph(_) = &self.space else {
                    unreachable!()
                };
                Ok(vec![Point::MetricGraph(eight::glue())])
            }
            ReflectionMap::TreeSwap => {
                // Center plus the whole fixed branch.
                let mut pts = Vec::with_capacity(n);
                for k in 0..n {
                    let edge = [2usize, 7, 8][k % 3];
                    pts.push(Point::MetricGraph(GraphPoint::new(edge, ts(k))));
                }
                Ok(pts)
            }
            ReflectionMap::GasketMirror => {
                // Axis vertices: p3 and the nested midpoints toward it.
                let mut pts = vec![Point::Gasket(GasketPoint::p3())];
                let mut m = GasketPoint::p1().contract(1); // midpoint of p1 p2
                for _ in 0..n.min(10) {
                    pts.push(Point::Gasket(m));
                    m = m.contract(2);
                }
                Ok(pts)
            }
        }
    }
}

fn vec3(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn orthonormal_complement(n: &[f64; 3]) -> [f64; 3] {
    let mut e = [0.0; 3];
    let i = (0..3)
        .min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()))
        .unwrap();
    e[i] = 1.0;
    let a = dot3(&e, n);
    for k in 0..3 {
        e[k] -= a * n[k];
    }
    let s = dot3(&e, &e).sqrt();
    for t in e.iter_mut() {
        *t /= s;
    }
    e
}

fn hyperbolic_midpoint(x1: &Point, x2: &Point) -> Point {
    let (Point::Hyperbolic2(a), Point::Hyperbolic2(b)) = (x1, x2) else {
        unreachable!()
    };
    let mut m = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
    let q = -minkowski_dot(&m, &m);
    let s = q.sqrt();
    for t in m.iter_mut() {
        *t /= s;
    }
    Point::Hyperbolic2(m)
}

/// Signed arc coordinate relative to the two fixed angles of a circle flip:
/// positive on the arc designated as `X1`.
fn arc_coordinate(c: f64, u: f64, x1_first_arc: bool) -> f64 {
    let pos = wrap_unit(u - c / 2.0); // 0 and 1/2 are the fixed angles
    let in_first = pos < 0.5;
    let d = circle_distance(u, c / 2.0).min(circle_distance(u, c / 2.0 + 0.5));
    if in_first == x1_first_arc {
        d
    } else {
        -d
    }
}

/// Equidistant-set geometry for a torus pair in the chart where
/// `x1 = [(a, 0)]` and `x2 = [(0, b)]` with `0 <= b <= a <= 1/2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum BisectorGeometry {
    /// Aligned pair: the equidistant set is two parallel circles and a
    /// reflection structure exists.
    TwoCircles { p_values: [f64; 2], singular: bool },
    /// Generic pair: four segments meeting with a corner; no reflection
    /// structure exists.
    SingularNoReflection {
        points: [[f64; 2]; 6],
        segments: [[usize; 2]; 4],
        singular: bool,
    },
}

impl BisectorGeometry {
    pub fn singular(&self) -> bool {
        match self {
            BisectorGeometry::TwoCircles { singular, .. } => *singular,
            BisectorGeometry::SingularNoReflection { singular, .. } => *singular,
        }
    }
}

/// Closed-form equidistant set of `x1 = [(a,0)]`, `x2 = [(0,b)]` on the
/// unit torus.
pub fn torus_bisector(a: f64, b: f64) -> Result<BisectorGeometry> {
    if !(a > 0.0 && a <= 0.5 && (0.0..=a).contains(&b)) {
        return Err(Error::Domain(format!(
            "bisector parameters out of range: a={a}, b={b}"
        )));
    }
    if b == 0.0 {
        return Ok(BisectorGeometry::TwoCircles {
            p_values: [a / 2.0, (1.0 + a) / 2.0],
            singular: false,
        });
    }
    let z1 = [(a * a + b * b - b) / (2.0 * a), b - 0.5];
    let z2 = [(a * a - b * b + b) / (2.0 * a), 0.5];
    let z3 = [(a * a + b * b - b) / (2.0 * a), b + 0.5];
    let z4 = [(1.0 - a * a - b * b + b) / (2.0 * (1.0 - a)), b - 0.5];
    let z5 = [(1.0 - a * a + b * b - b) / (2.0 * (1.0 - a)), 0.5];
    let z6 = [(1.0 - a * a - b * b + b) / (2.0 * (1.0 - a)), b + 0.5];
    Ok(BisectorGeometry::SingularNoReflection {
        points: [z1, z2, z3, z4, z5, z6],
        segments: [[0, 1], [1, 2], [3, 4], [4, 5]],
        singular: true,
    })
}

/// Sample points uniformly along the bisector segments (chart coordinates).
pub fn bisector_samples(geom: &BisectorGeometry, per_segment: usize) -> Vec<[f64; 2]> {
    match geom {
        BisectorGeometry::TwoCircles { p_values, .. } => {
            let mut out = Vec::with_capacity(2 * per_segment);
            for &p in p_values {
                for k in 0..per_segment {
                    out.push([p, (k as f64 + 0.5) / per_segment as f64]);
                }
            }
            out
        }
        BisectorGeometry::SingularNoReflection {
            points, segments, ..
        } => {
            let mut out = Vec::with_capacity(4 * per_segment);
            for seg in segments {
                let (p, q) = (points[seg[0]], points[seg[1]]);
                for k in 0..per_segment {
                    let t = (k as f64 + 0.5) / per_segment as f64;
                    out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::torus_distance;
    use approx::assert_abs_diff_eq;

    #[test]
    fn euclidean_bisector_reflection() {
        let s = ReflectionStructure::build(
            Space::Euclidean { dim: 1 },
            Point::euclidean(&[-0.5]),
            Point::euclidean(&[0.5]),
        )
        .unwrap();
        let Point::Euclidean(r) = s.reflect(&Point::euclidean(&[0.3])) else {
            panic!()
        };
        assert_abs_diff_eq!(r[0], -0.3, epsilon = 1e-15);
        assert_eq!(s.side(&Point::euclidean(&[-0.2])), Side::X1);
        assert_eq!(s.side(&Point::euclidean(&[0.0])), Side::H);
        assert_eq!(s.side(&Point::euclidean(&[0.2])), Side::X2);
    }

    #[test]
    fn involution_on_samples() {
        let s = ReflectionStructure::build(
            Space::Sphere2,
            Point::sphere([1.0, 0.0, 0.0]).unwrap(),
            Point::sphere([0.0, 1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let x = Point::sphere([0.6, 0.0, 0.8]).unwrap();
        let rr = s.reflect(&s.reflect(&x));
        assert!(Space::Sphere2.distance(&x, &rr).unwrap() < 1e-14);
    }

    #[test]
    fn hyperboloid_axis_flip() {
        // Pair symmetric in the z1 coordinate: the reflection negates z1.
        let z0 = (2.0f64).sqrt();
        let x1 = Point::hyperboloid([z0, 1.0, 0.0]).unwrap();
        let x2 = Point::hyperboloid([z0, -1.0, 0.0]).unwrap();
        let s = ReflectionStructure::build(Space::Hyperbolic2, x1, x2).unwrap();
        let z = Point::hyperboloid([(1.25f64).sqrt(), 0.3, 0.4]).unwrap();
        let Point::Hyperbolic2(r) = s.reflect(&z) else { panic!() };
        assert_abs_diff_eq!(r[0], (1.25f64).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r[1], -0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(r[2], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn eight_reflection_swaps_circles() {
        let s = ReflectionStructure::build(
            Space::eight(),
            Point::MetricGraph(eight::x1()),
            Point::MetricGraph(eight::x2()),
        )
        .unwrap();
        // Offset 0.3 along circle 1 maps to the same offset on circle 2.
        let x = Point::MetricGraph(eight::circle_coord(0, 0.3));
        let Point::MetricGraph(r) = s.reflect(&x) else { panic!() };
        assert_eq!(r.edge, 1);
        assert_abs_diff_eq!(eight::coord_of(&r), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn tree_sides() {
        let g = Space::star_tree();
        let Space::MetricGraph(graph) = &g else { panic!() };
        let x1 = Point::MetricGraph(graph.vertex_point(tree::P11));
        let x2 = Point::MetricGraph(graph.vertex_point(tree::P22));
        let s = ReflectionStructure::build(g.clone(), x1, x2).unwrap();
        // Branch 3 and the center are fixed.
        assert_eq!(s.side(&Point::MetricGraph(GraphPoint::new(2, 0.7))), Side::H);
        assert_eq!(
            s.side(&Point::MetricGraph(graph.vertex_point(tree::P0))),
            Side::H
        );
        assert_eq!(s.side(&Point::MetricGraph(GraphPoint::new(3, 0.4))), Side::X1);
        assert_eq!(s.side(&Point::MetricGraph(GraphPoint::new(6, 0.4))), Side::X2);
    }

    #[test]
    fn gasket_p3_lies_on_axis() {
        let s = ReflectionStructure::build(
            Space::Gasket,
            Point::Gasket(GasketPoint::p1()),
            Point::Gasket(GasketPoint::p2()),
        )
        .unwrap();
        assert_eq!(s.side(&Point::Gasket(GasketPoint::p3())), Side::H);
        assert_eq!(s.side(&Point::Gasket(GasketPoint::p1())), Side::X1);
        assert_eq!(
            s.side(&Point::Gasket(GasketPoint::p2().contract(2))),
            Side::X2
        );
    }

    #[test]
    fn torus_aligned_pair_gets_two_circles() {
        let a = 1.0 / 3.0;
        let s = ReflectionStructure::build(
            Space::FlatTorus,
            Point::torus(a, 0.0),
            Point::torus(0.0, 0.0),
        )
        .unwrap();
        let d = s.barrier_distances(&Point::torus(a, 0.0)).unwrap();
        // Fixed circles at p = a/2 and p = (1+a)/2.
        assert_abs_diff_eq!(d[0], a / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[1], 0.5 - a / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn torus_generic_pair_has_no_reflection() {
        let err = ReflectionStructure::build(
            Space::FlatTorus,
            Point::torus(1.0 / 3.0, 0.0),
            Point::torus(0.0, 1.0 / 5.0),
        )
        .unwrap_err();
        match err {
            Error::NoReflection(geom) => assert!(geom.singular()),
            other => panic!("expected NoReflection, got {other:?}"),
        }
    }

    #[test]
    fn bisector_closed_form_z1() {
        let a = 1.0 / 3.0;
        let b = 1.0 / 5.0;
        let BisectorGeometry::SingularNoReflection { points, .. } = torus_bisector(a, b).unwrap()
        else {
            panic!()
        };
        assert_abs_diff_eq!(points[0][0], -11.0 / 150.0, epsilon = 1e-15);
        assert_abs_diff_eq!(points[0][1], -3.0 / 10.0, epsilon = 1e-15);
    }

    #[test]
    fn bisector_collapses_when_a_equals_b() {
        let BisectorGeometry::SingularNoReflection { points, .. } =
            torus_bisector(0.2, 0.2).unwrap()
        else {
            panic!()
        };
        assert_abs_diff_eq!(points[1][0], points[4][0], epsilon = 1e-15);
        assert_abs_diff_eq!(points[1][1], points[4][1], epsilon = 1e-15);
    }

    #[test]
    fn bisector_points_are_equidistant() {
        for (a, b) in [(1.0 / 3.0, 1.0 / 5.0), (0.2, 0.2), (0.5, 0.25)] {
            let geom = torus_bisector(a, b).unwrap();
            let x1 = [a, 0.0];
            let x2 = [0.0, b];
            for z in bisector_samples(&geom, 50) {
                let zw = [wrap_unit(z[0]), wrap_unit(z[1])];
                let d1 = torus_distance(&zw, &x1);
                let d2 = torus_distance(&zw, &x2);
                assert!(
                    (d1 - d2).abs() <= 1e-12,
                    "a={a} b={b} z={z:?}: {d1} vs {d2}"
                );
            }
        }
    }

    #[test]
    fn reflect_is_isometry_on_gasket() {
        let s = ReflectionStructure::build(
            Space::Gasket,
            Point::Gasket(GasketPoint::p1()),
            Point::Gasket(GasketPoint::p2()),
        )
        .unwrap();
        let g = crate::spaces::gasket::gasket_vertices(3).unwrap();
        for a in g.vertices.iter().step_by(2) {
            for b in g.vertices.iter().step_by(7) {
                let pa = Point::Gasket(*a);
                let pb = Point::Gasket(*b);
                let d1 = Space::Gasket.distance(&pa, &pb).unwrap();
                let d2 = Space::Gasket
                    .distance(&s.reflect(&pa), &s.reflect(&pb))
                    .unwrap();
                assert_eq!(d1, d2);
            }
        }
    }
}
