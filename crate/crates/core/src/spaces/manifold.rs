//! Exponential/logarithm maps and parallel transport on the smooth model
//! spaces (Euclidean space, the unit 2-sphere, the hyperbolic plane).
//!
//! Geodesics are parametrized at constant speed on `[0,1]`, so
//! `exp(x, v)` travels a distance `|v|`. Pairs without a unique minimal
//! geodesic (antipodal points on the sphere) are rejected; the excluded set
//! has measure zero for every law we sample from.

use super::{dot3, minkowski_dot, norm3, Point, Space, TangentVector};
use crate::error::{Error, Result};

const ANTIPODAL_TOL: f64 = 1e-12;

/// Constant-speed geodesic through `x` with initial velocity `v`, evaluated
/// at time 1.
pub fn exp_map(space: &Space, x: &Point, v: &TangentVector) -> Result<Point> {
    if v.base != *x {
        return Err(Error::Domain(
            "tangent vector is not based at the given point".into(),
        ));
    }
    match (space, x) {
        (Space::Euclidean { .. }, Point::Euclidean(c)) => {
            if v.components.len() != c.len() {
                return Err(Error::DimensionMismatch(v.components.len(), c.len()));
            }
            Ok(Point::Euclidean(
                c.iter().zip(&v.components).map(|(a, b)| a + b).collect(),
            ))
        }
        (Space::Sphere2, Point::Sphere2(c)) => {
            let comp: [f64; 3] = vec3(&v.components)?;
            let n = norm3(&comp);
            if n < 1e-300 {
                return Ok(x.clone());
            }
            let (s, cs) = (n.sin(), n.cos());
            let mut out = [0.0; 3];
            for i in 0..3 {
                out[i] = cs * c[i] + s * comp[i] / n;
            }
            renormalize_sphere(&mut out);
            Ok(Point::Sphere2(out))
        }
        (Space::Hyperbolic2, Point::Hyperbolic2(c)) => {
            let comp: [f64; 3] = vec3(&v.components)?;
            let n2 = minkowski_dot(&comp, &comp);
            if n2 <= 0.0 {
                if n2.abs() < 1e-300 {
                    return Ok(x.clone());
                }
                return Err(Error::Domain("tangent vector is not spacelike".into()));
            }
            let n = n2.sqrt();
            let (s, cs) = (n.sinh(), n.cosh());
            let mut out = [0.0; 3];
            for i in 0..3 {
                out[i] = cs * c[i] + s * comp[i] / n;
            }
            renormalize_hyperboloid(&mut out);
            Ok(Point::Hyperbolic2(out))
        }
        _ => Err(Error::Unsupported(format!(
            "exp_map on {}",
            space.name()
        ))),
    }
}

/// Inverse of `exp_map` inside the unique-geodesic domain.
pub fn log_map(space: &Space, x: &Point, y: &Point) -> Result<TangentVector> {
    match (space, x, y) {
        (Space::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
            if a.len() != b.len() {
                return Err(Error::DimensionMismatch(a.len(), b.len()));
            }
            Ok(TangentVector::new(
                x.clone(),
                b.iter().zip(a).map(|(u, v)| u - v).collect(),
            ))
        }
        (Space::Sphere2, Point::Sphere2(a), Point::Sphere2(b)) => {
            let c = dot3(a, b).clamp(-1.0, 1.0);
            if c <= -1.0 + ANTIPODAL_TOL {
                return Err(Error::NonUniqueGeodesic);
            }
            let theta = c.acos();
            if theta == 0.0 {
                return Ok(TangentVector::zero(x, 3));
            }
            // w = component of y orthogonal to x; |w| = sin(theta).
            let mut w = [0.0; 3];
            for i in 0..3 {
                w[i] = b[i] - c * a[i];
            }
            let wn = norm3(&w);
            Ok(TangentVector::new(
                x.clone(),
                w.iter().map(|t| theta * t / wn).collect(),
            ))
        }
        (Space::Hyperbolic2, Point::Hyperbolic2(a), Point::Hyperbolic2(b)) => {
            let c = (-minkowski_dot(a, b)).max(1.0);
            let theta = c.acosh();
            if theta == 0.0 {
                return Ok(TangentVector::zero(x, 3));
            }
            let mut w = [0.0; 3];
            for i in 0..3 {
                w[i] = b[i] - c * a[i];
            }
            // Lorentz norm of w is sinh(theta).
            let wn = minkowski_dot(&w, &w).max(0.0).sqrt();
            Ok(TangentVector::new(
                x.clone(),
                w.iter().map(|t| theta * t / wn).collect(),
            ))
        }
        _ => Err(Error::Unsupported(format!("log_map on {}", space.name()))),
    }
}

/// Levi-Civita parallel transport of `v` along the minimal geodesic from
/// `x` to `y`. Norms and pairwise inner products are preserved.
pub fn parallel_transport(
    space: &Space,
    x: &Point,
    y: &Point,
    v: &TangentVector,
) -> Result<TangentVector> {
    if v.base != *x {
        return Err(Error::Domain(
            "tangent vector is not based at the given point".into(),
        ));
    }
    match space {
        Space::Euclidean { .. } => Ok(TangentVector::new(y.clone(), v.components.clone())),
        Space::Sphere2 | Space::Hyperbolic2 => {
            if x == y {
                return Ok(v.clone());
            }
            let u_xy = log_map(space, x, y)?;
            let theta = u_xy.norm();
            if theta == 0.0 {
                return Ok(TangentVector::new(y.clone(), v.components.clone()));
            }
            let e: Vec<f64> = u_xy.components.iter().map(|c| c / theta).collect();
            // Unit tangent at y pointing away from x: gamma'(1)/theta.
            let e1 = geodesic_endpoint_direction(space, x, &e, theta)?;
            let a = pseudo_dot(space, &v.components, &e);
            let transported: Vec<f64> = match space {
                Space::Sphere2 => {
                    // v = a e + w, w normal to the geodesic plane: w moves rigidly.
                    (0..3).map(|i| v.components[i] - a * e[i] + a * e1[i]).collect()
                }
                Space::Hyperbolic2 => (0..3)
                    .map(|i| v.components[i] - a * e[i] + a * e1[i])
                    .collect(),
                _ => unreachable!(),
            };
            Ok(TangentVector::new(y.clone(), transported))
        }
        _ => Err(Error::Unsupported(format!(
            "parallel_transport on {}",
            space.name()
        ))),
    }
}

/// gamma'(1)/|gamma'| for the unit-speed geodesic leaving `x` in direction
/// `e` and arriving after arclength `theta`.
fn geodesic_endpoint_direction(
    space: &Space,
    x: &Point,
    e: &[f64],
    theta: f64,
) -> Result<Vec<f64>> {
    match (space, x) {
        (Space::Sphere2, Point::Sphere2(c)) => {
            let (s, cs) = (theta.sin(), theta.cos());
            Ok((0..3).map(|i| -s * c[i] + cs * e[i]).collect())
        }
        (Space::Hyperbolic2, Point::Hyperbolic2(c)) => {
            let (s, cs) = (theta.sinh(), theta.cosh());
            Ok((0..3).map(|i| s * c[i] + cs * e[i]).collect())
        }
        _ => unreachable!(),
    }
}

fn pseudo_dot(space: &Space, a: &[f64], b: &[f64]) -> f64 {
    match space {
        Space::Hyperbolic2 => -a[0] * b[0] + a[1] * b[1] + a[2] * b[2],
        _ => a.iter().zip(b).map(|(u, v)| u * v).sum(),
    }
}

/// Riemannian inner product of two tangent vectors at a common base point.
pub fn tangent_inner(space: &Space, v: &TangentVector, w: &TangentVector) -> f64 {
    pseudo_dot(space, &v.components, &w.components)
}

/// Orthonormal tangent frame at `x`, produced by deterministic Gram-Schmidt
/// from the fixed chart basis. Columns are returned as tangent vectors.
pub fn orthonormal_frame(space: &Space, x: &Point) -> Result<Vec<TangentVector>> {
    match (space, x) {
        (Space::Euclidean { dim }, Point::Euclidean(_)) => Ok((0..*dim)
            .map(|i| {
                let mut c = vec![0.0; *dim];
                c[i] = 1.0;
                TangentVector::new(x.clone(), c)
            })
            .collect()),
        (Space::Sphere2, Point::Sphere2(_)) | (Space::Hyperbolic2, Point::Hyperbolic2(_)) => {
            let mut frame: Vec<Vec<f64>> = Vec::with_capacity(2);
            for i in 0..3 {
                if frame.len() == 2 {
                    break;
                }
                let mut cand = [0.0f64; 3];
                cand[i] = 1.0;
                let mut c = project_tangent(space, x, &cand);
                for f in &frame {
                    let a = pseudo_dot(space, &c, f);
                    for k in 0..3 {
                        c[k] -= a * f[k];
                    }
                }
                let n2 = pseudo_dot(space, &c, &c);
                if n2 > 1e-12 {
                    let n = n2.sqrt();
                    frame.push(c.iter().map(|t| t / n).collect());
                }
            }
            if frame.len() != 2 {
                return Err(Error::Domain("frame construction failed".into()));
            }
            Ok(frame
                .into_iter()
                .map(|c| TangentVector::new(x.clone(), c))
                .collect())
        }
        _ => Err(Error::Unsupported(format!(
            "orthonormal_frame on {}",
            space.name()
        ))),
    }
}

/// Project an ambient vector onto the tangent space at `x`.
fn project_tangent(space: &Space, x: &Point, v: &[f64; 3]) -> Vec<f64> {
    match (space, x) {
        (Space::Sphere2, Point::Sphere2(c)) => {
            let a = dot3(v, c);
            (0..3).map(|i| v[i] - a * c[i]).collect()
        }
        (Space::Hyperbolic2, Point::Hyperbolic2(c)) => {
            // <c,c>_L = -1, so the projector is v + <v,c>_L c.
            let a = minkowski_dot(v, c);
            (0..3).map(|i| v[i] + a * c[i]).collect()
        }
        _ => unreachable!(),
    }
}

fn vec3(v: &[f64]) -> Result<[f64; 3]> {
    if v.len() != 3 {
        return Err(Error::DimensionMismatch(v.len(), 3));
    }
    Ok([v[0], v[1], v[2]])
}

fn renormalize_sphere(v: &mut [f64; 3]) {
    let n = norm3(v);
    for t in v.iter_mut() {
        *t /= n;
    }
}

fn renormalize_hyperboloid(v: &mut [f64; 3]) {
    // Scale so that -z0^2 + z1^2 + z2^2 = -1 exactly again.
    let q = -minkowski_dot(v, v);
    if q > 0.0 {
        let s = q.sqrt();
        for t in v.iter_mut() {
            *t /= s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const PI_2: f64 = std::f64::consts::FRAC_PI_2;

    #[test]
    fn euclidean_exp_is_translation() {
        let s = Space::Euclidean { dim: 2 };
        let x = Point::euclidean(&[1.0, -2.0]);
        let v = TangentVector::new(x.clone(), vec![0.5, 3.0]);
        assert_eq!(exp_map(&s, &x, &v).unwrap(), Point::euclidean(&[1.5, 1.0]));
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let s = Space::Sphere2;
        let x = Point::sphere([0.0, 0.0, 1.0]).unwrap();
        let v = TangentVector::zero(&x, 3);
        assert_eq!(exp_map(&s, &x, &v).unwrap(), x);
    }

    #[test]
    fn sphere_quarter_turn() {
        // Rotation formula: cos|v| x + sin|v| v/|v| lands on (0,1,0).
        let s = Space::Sphere2;
        let x = Point::sphere([1.0, 0.0, 0.0]).unwrap();
        let v = TangentVector::new(x.clone(), vec![0.0, PI_2, 0.0]);
        let y = exp_map(&s, &x, &v).unwrap();
        let Point::Sphere2(c) = y else { panic!() };
        assert_abs_diff_eq!(c[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sphere_log_inverts_quarter_turn() {
        let s = Space::Sphere2;
        let x = Point::sphere([1.0, 0.0, 0.0]).unwrap();
        let y = Point::sphere([0.0, 1.0, 0.0]).unwrap();
        let v = log_map(&s, &x, &y).unwrap();
        assert_abs_diff_eq!(v.components[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.components[1], PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(v.components[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn log_at_same_point_is_zero() {
        let s = Space::Euclidean { dim: 1 };
        let x = Point::euclidean(&[0.7]);
        assert_eq!(log_map(&s, &x, &x).unwrap().components, vec![0.0]);
    }

    #[test]
    fn antipodal_rejected() {
        let s = Space::Sphere2;
        let x = Point::sphere([1.0, 0.0, 0.0]).unwrap();
        let y = Point::sphere([-1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(log_map(&s, &x, &y), Err(Error::NonUniqueGeodesic)));
    }

    #[test]
    fn transport_preserves_normal_along_equator() {
        let s = Space::Sphere2;
        let x = Point::sphere([1.0, 0.0, 0.0]).unwrap();
        let y = Point::sphere([0.0, 1.0, 0.0]).unwrap();
        let v = TangentVector::new(x.clone(), vec![0.0, 0.0, 1.0]);
        let w = parallel_transport(&s, &x, &y, &v).unwrap();
        assert_abs_diff_eq!(w.components[2], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w.components[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w.components[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn transport_to_same_point_is_identity() {
        let s = Space::Hyperbolic2;
        let x = Point::hyperboloid([1.0, 0.0, 0.0]).unwrap();
        let mut v = TangentVector::new(x.clone(), vec![0.0, 0.3, -0.4]);
        v.base = x.clone();
        let w = parallel_transport(&s, &x, &x, &v).unwrap();
        assert_eq!(w.components, v.components);
    }

    #[test]
    fn frames_are_orthonormal() {
        let s = Space::Hyperbolic2;
        let x = Point::hyperboloid([(2.0f64).sqrt(), 1.0, 0.0]).unwrap();
        let f = orthonormal_frame(&s, &x).unwrap();
        assert_eq!(f.len(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(tangent_inner(&s, &f[i], &f[j]), want, epsilon = 1e-12);
            }
        }
    }
}
