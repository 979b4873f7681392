//! Model spaces and their metric/differential structure.
//!
//! Seven concrete spaces are supported: Euclidean space of any dimension,
//! the circle of circumference 1, the flat unit torus, the unit 2-sphere,
//! the hyperbolic plane in the hyperboloid model, two metric graphs (the
//! figure-eight made of two glued circles and a 9-edge star tree), and the
//! Sierpinski gasket restricted to its dyadic vertex sets.
//!
//! All handles are immutable after construction and every operation here is
//! a pure function, so spaces can be shared freely across worker threads.

pub mod gasket;
pub mod graph;
pub mod manifold;

use std::sync::Arc;

use crate::error::{Error, Result};
pub use gasket::{Dyadic, GasketLevelGraph, GasketPoint};
pub use graph::{GraphPoint, GraphTopology, MetricGraph};

/// A location in one of the model spaces.
///
/// The payload is chart data appropriate to the space: coordinates, an angle
/// in `[0,1)`, a unit 3-vector, hyperboloid coordinates with
/// `-z0^2 + z1^2 + z2^2 = -1`, an `(edge, offset)` pair, or a dyadic gasket
/// vertex.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Euclidean(Vec<f64>),
    Circle(f64),
    FlatTorus([f64; 2]),
    Sphere2([f64; 3]),
    Hyperbolic2([f64; 3]),
    MetricGraph(GraphPoint),
    Gasket(GasketPoint),
}

impl Point {
    pub fn space_name(&self) -> &'static str {
        match self {
            Point::Euclidean(_) => "euclidean",
            Point::Circle(_) => "circle",
            Point::FlatTorus(_) => "flat-torus",
            Point::Sphere2(_) => "sphere2",
            Point::Hyperbolic2(_) => "hyperbolic2",
            Point::MetricGraph(_) => "metric-graph",
            Point::Gasket(_) => "gasket",
        }
    }

    pub fn euclidean(coords: &[f64]) -> Point {
        Point::Euclidean(coords.to_vec())
    }

    /// Circle point from any real angle, reduced to `[0,1)`.
    pub fn circle(angle: f64) -> Point {
        Point::Circle(wrap_unit(angle))
    }

    pub fn torus(p: f64, q: f64) -> Point {
        Point::FlatTorus([wrap_unit(p), wrap_unit(q)])
    }

    pub fn sphere(v: [f64; 3]) -> Result<Point> {
        let n = norm3(&v);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("sphere point has norm {n}, want 1")));
        }
        Ok(Point::Sphere2(v))
    }

    pub fn hyperboloid(v: [f64; 3]) -> Result<Point> {
        let q = -v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if (q + 1.0).abs() > 1e-12 || v[0] <= 0.0 {
            return Err(Error::Domain(format!(
                "hyperboloid constraint violated: q={q}, z0={}",
                v[0]
            )));
        }
        Ok(Point::Hyperbolic2(v))
    }
}

/// Tangent vector at a base point, stored in the chart or embedding of the
/// base: `R^d` for Euclidean space, ambient `R^3` for the sphere and the
/// hyperboloid (orthogonal to the base in the relevant bilinear form).
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: Point,
    pub components: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: Point, components: Vec<f64>) -> Self {
        TangentVector { base, components }
    }

    pub fn zero(base: &Point, dim: usize) -> Self {
        TangentVector {
            base: base.clone(),
            components: vec![0.0; dim],
        }
    }

    /// Riemannian norm; for sphere/hyperboloid the components live in the
    /// tangent hyperplane where the ambient bilinear form is positive.
    pub fn norm(&self) -> f64 {
        match &self.base {
            Point::Hyperbolic2(_) => {
                let c = &self.components;
                (-c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).max(0.0).sqrt()
            }
            _ => self.components.iter().map(|c| c * c).sum::<f64>().sqrt(),
        }
    }
}

/// Handle to one of the model spaces.
#[derive(Debug, Clone)]
pub enum Space {
    Euclidean { dim: usize },
    Circle,
    FlatTorus,
    Sphere2,
    Hyperbolic2,
    MetricGraph(Arc<MetricGraph>),
    Gasket,
}

impl Space {
    pub fn name(&self) -> &'static str {
        match self {
            Space::Euclidean { .. } => "euclidean",
            Space::Circle => "circle",
            Space::FlatTorus => "flat-torus",
            Space::Sphere2 => "sphere2",
            Space::Hyperbolic2 => "hyperbolic2",
            Space::MetricGraph(_) => "metric-graph",
            Space::Gasket => "gasket",
        }
    }

    pub fn eight() -> Space {
        Space::MetricGraph(Arc::new(MetricGraph::build(GraphTopology::Eight)))
    }

    pub fn star_tree() -> Space {
        Space::MetricGraph(Arc::new(MetricGraph::build(GraphTopology::StarTree)))
    }

    pub fn contains(&self, p: &Point) -> bool {
        matches!(
            (self, p),
            (Space::Euclidean { .. }, Point::Euclidean(_))
                | (Space::Circle, Point::Circle(_))
                | (Space::FlatTorus, Point::FlatTorus(_))
                | (Space::Sphere2, Point::Sphere2(_))
                | (Space::Hyperbolic2, Point::Hyperbolic2(_))
                | (Space::MetricGraph(_), Point::MetricGraph(_))
                | (Space::Gasket, Point::Gasket(_))
        )
    }

    fn check_pair<'a>(&self, x: &'a Point, y: &'a Point) -> Result<()> {
        if !self.contains(x) {
            return Err(Error::SpaceMismatch(self.name(), x.space_name()));
        }
        if !self.contains(y) {
            return Err(Error::SpaceMismatch(self.name(), y.space_name()));
        }
        Ok(())
    }

    /// Geodesic distance between two points of this space.
    ///
    /// The flat torus takes the minimum over the 3x3 block of lattice
    /// translates (sufficient because the fundamental domain is the unit
    /// square); metric graphs use shortest paths over edges; the gasket
    /// defers to the exact dyadic shortest-path metric.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_pair(x, y)?;
        Ok(match (self, x, y) {
            (Space::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
                if a.len() != b.len() {
                    return Err(Error::DimensionMismatch(a.len(), b.len()));
                }
                a.iter()
                    .zip(b)
                    .map(|(u, v)| (u - v) * (u - v))
                    .sum::<f64>()
                    .sqrt()
            }
            (Space::Circle, Point::Circle(a), Point::Circle(b)) => circle_distance(*a, *b),
            (Space::FlatTorus, Point::FlatTorus(a), Point::FlatTorus(b)) => torus_distance(a, b),
            (Space::Sphere2, Point::Sphere2(a), Point::Sphere2(b)) => {
                dot3(a, b).clamp(-1.0, 1.0).acos()
            }
            (Space::Hyperbolic2, Point::Hyperbolic2(a), Point::Hyperbolic2(b)) => {
                let c = -minkowski_dot(a, b);
                c.max(1.0).acosh()
            }
            (Space::MetricGraph(g), Point::MetricGraph(a), Point::MetricGraph(b)) => {
                g.distance(a, b)
            }
            (Space::Gasket, Point::Gasket(a), Point::Gasket(b)) => {
                gasket::gasket_distance(a, b)?.to_f64()
            }
            _ => unreachable!("space tags checked above"),
        })
    }

    /// Dimension of the chart used for tangent components.
    pub fn tangent_dim(&self) -> Option<usize> {
        match self {
            Space::Euclidean { dim } => Some(*dim),
            Space::Sphere2 | Space::Hyperbolic2 => Some(3),
            _ => None,
        }
    }

    /// Intrinsic manifold dimension, where defined.
    pub fn manifold_dim(&self) -> Option<usize> {
        match self {
            Space::Euclidean { dim } => Some(*dim),
            Space::Circle => Some(1),
            Space::FlatTorus => Some(2),
            Space::Sphere2 | Space::Hyperbolic2 => Some(2),
            _ => None,
        }
    }
}

/// Reduce a real number to the fundamental domain `[0,1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    let d = wrap_unit(d);
    d.min(1.0 - d)
}

/// Flat-torus distance by brute force over the nine nearest translates.
pub fn torus_distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let mut best = f64::INFINITY;
    for np in -1..=1 {
        for nq in -1..=1 {
            let dp = a[0] - b[0] + np as f64;
            let dq = a[1] - b[1] + nq as f64;
            best = best.min((dp * dp + dq * dq).sqrt());
        }
    }
    best
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Lorentz bilinear form with signature `(-,+,+)`.
pub(crate) fn minkowski_dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn torus_distance_matches_hand_value() {
        // Third of the way around the p-axis: wrap beats the direct segment.
        let d = torus_distance(&[0.0, 0.0], &[2.0 / 3.0, 0.0]);
        assert_abs_diff_eq!(d, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn sphere_distance_to_self_is_zero() {
        let s = Space::Sphere2;
        let x = Point::sphere([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.distance(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_tags_rejected() {
        let s = Space::Circle;
        let x = Point::circle(0.25);
        let y = Point::euclidean(&[0.25]);
        assert!(matches!(
            s.distance(&x, &y),
            Err(Error::SpaceMismatch(_, _))
        ));
    }

    #[test]
    fn circle_wraps() {
        assert_abs_diff_eq!(circle_distance(0.9, 0.1), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(circle_distance(0.0, 0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn hyperboloid_constraint_enforced() {
        assert!(Point::hyperboloid([1.0, 0.0, 0.0]).is_ok());
        assert!(Point::hyperboloid([1.0, 0.5, 0.0]).is_err());
        assert!(Point::hyperboloid([-1.0, 0.0, 0.0]).is_err());
    }
}
