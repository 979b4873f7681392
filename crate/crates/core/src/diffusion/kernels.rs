//! Exact heat kernels for Brownian motion with generator `Delta/2`.
//!
//! * Euclidean space: the Gaussian kernel in closed form.
//! * Circle of circumference 1: wrapped Gaussian, equivalently the cosine
//!   eigenfunction series; the two routes agree to machine precision and
//!   are cross-checked in the tests.
//! * Flat torus: product of circle kernels.
//! * Unit 2-sphere: the Legendre eigenfunction series
//!   `sum_l (2l+1)/(4 pi) exp(-l(l+1)t/2) P_l(cos d)` truncated when the
//!   term bound drops below 1e-15. Below `t = 0.2` the series suffers
//!   catastrophic cancellation at large angles, so the kernel switches to
//!   an exact integral representation (obtained from the half-integer form
//!   of the eigenvalues and Poisson summation) which is evaluated in log
//!   domain and remains accurate down to arbitrarily short times. The two
//!   representations are cross-validated on their overlap.
//!
//! All kernels also come in a `log` flavor; short-time asymptotics need
//! log-densities far below the smallest positive `f64`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::spaces::{Point, Space};

/// Series/integral crossover for the sphere kernel.
const SPHERE_SERIES_MIN_T: f64 = 0.2;
/// Truncation bound for series terms.
const TERM_BOUND: f64 = 1e-15;

/// Transition density `p_t(x, y)` for the Brownian motion on the space.
///
/// Supported spaces: Euclidean, circle, flat torus, 2-sphere. The
/// hyperbolic plane is out of scope. Requires `t > 0`.
pub fn heat_kernel(space: &Space, t: f64, x: &Point, y: &Point) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("heat kernel needs t > 0, got {t}")));
    }
    match (space, x, y) {
        (Space::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
            if a.len() != b.len() {
                return Err(Error::DimensionMismatch(a.len(), b.len()));
            }
            let r2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
            Ok(euclid_kernel(a.len(), t, r2.sqrt()))
        }
        (Space::Circle, Point::Circle(a), Point::Circle(b)) => Ok(circle_kernel_wrapped(t, a - b)),
        (Space::FlatTorus, Point::FlatTorus(a), Point::FlatTorus(b)) => {
            Ok(circle_kernel_wrapped(t, a[0] - b[0]) * circle_kernel_wrapped(t, a[1] - b[1]))
        }
        (Space::Sphere2, Point::Sphere2(_), Point::Sphere2(_)) => {
            let d = space.distance(x, y)?;
            if t >= SPHERE_SERIES_MIN_T {
                Ok(sphere_kernel_series(t, d.cos()))
            } else {
                Ok(sphere_log_kernel(t, d).exp())
            }
        }
        (Space::Hyperbolic2, _, _) => Err(Error::Unsupported(
            "hyperbolic heat kernel is out of scope".into(),
        )),
        _ => Err(Error::Unsupported(format!(
            "heat kernel on {}",
            space.name()
        ))),
    }
}

/// `log p_t(x, y)`, exact in log domain even where the density underflows.
pub fn log_heat_kernel(space: &Space, t: f64, x: &Point, y: &Point) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("heat kernel needs t > 0, got {t}")));
    }
    match (space, x, y) {
        (Space::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
            let r2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
            Ok(-(a.len() as f64) / 2.0 * (TAU * t).ln() - r2 / (2.0 * t))
        }
        (Space::Circle, Point::Circle(a), Point::Circle(b)) => Ok(circle_log_kernel(t, a - b)),
        (Space::FlatTorus, Point::FlatTorus(a), Point::FlatTorus(b)) => {
            Ok(circle_log_kernel(t, a[0] - b[0]) + circle_log_kernel(t, a[1] - b[1]))
        }
        (Space::Sphere2, Point::Sphere2(_), Point::Sphere2(_)) => {
            let d = space.distance(x, y)?;
            if t >= SPHERE_SERIES_MIN_T {
                Ok(sphere_kernel_series(t, d.cos()).ln())
            } else {
                Ok(sphere_log_kernel(t, d))
            }
        }
        _ => Err(Error::Unsupported(format!(
            "log heat kernel on {}",
            space.name()
        ))),
    }
}

/// Gaussian kernel `(2 pi t)^(-d/2) exp(-r^2 / 2t)`.
pub fn euclid_kernel(dim: usize, t: f64, r: f64) -> f64 {
    (TAU * t).powf(-(dim as f64) / 2.0) * (-r * r / (2.0 * t)).exp()
}

fn wrap_terms(t: f64) -> i64 {
    // The tail term exp(-(n-1)^2 / 2t) falls below 1e-18 once
    // n > 1 + sqrt(2t * 18 ln 10); 10 is kept as a floor.
    let n = 1.0 + (2.0 * t * 18.0 * std::f64::consts::LN_10).sqrt();
    (n.ceil() as i64).max(10)
}

/// Wrapped Gaussian on the circle of circumference 1.
pub fn circle_kernel_wrapped(t: f64, delta: f64) -> f64 {
    let n = wrap_terms(t);
    let mut sum = 0.0;
    for k in -n..=n {
        let d = delta + k as f64;
        sum += (-d * d / (2.0 * t)).exp();
    }
    sum / (TAU * t).sqrt()
}

/// Eigenfunction series `1 + 2 sum_k exp(-2 pi^2 k^2 t) cos(2 pi k delta)`.
pub fn circle_kernel_eigen(t: f64, delta: f64) -> f64 {
    let mut sum = 1.0;
    let mut k = 1.0f64;
    loop {
        let coef = (-2.0 * PI * PI * k * k * t).exp();
        if coef < 1e-18 {
            break;
        }
        sum += 2.0 * coef * (TAU * k * delta).cos();
        k += 1.0;
    }
    sum
}

/// Log of the wrapped Gaussian via log-sum-exp; stable for all `t > 0`.
pub fn circle_log_kernel(t: f64, delta: f64) -> f64 {
    let n = wrap_terms(t);
    let exps: Vec<f64> = (-n..=n)
        .map(|k| {
            let d = delta + k as f64;
            -d * d / (2.0 * t)
        })
        .collect();
    let m = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = exps.iter().map(|e| (e - m).exp()).sum();
    m + s.ln() - 0.5 * (TAU * t).ln()
}

/// Legendre series for the 2-sphere kernel, truncated when the term bound
/// `(2l+1)/(4 pi) exp(-l(l+1)t/2)` falls below 1e-15.
pub fn sphere_kernel_series(t: f64, cos_d: f64) -> f64 {
    let x = cos_d.clamp(-1.0, 1.0);
    let mut sum = 0.0;
    let mut p_prev = 1.0; // P_0
    let mut p_curr = x; // P_1
    let mut l = 0u32;
    loop {
        let lf = l as f64;
        let coef = (2.0 * lf + 1.0) / (4.0 * PI) * (-lf * (lf + 1.0) * t / 2.0).exp();
        let p_l = match l {
            0 => 1.0,
            1 => x,
            _ => {
                let p_next = ((2.0 * lf - 1.0) * x * p_curr - (lf - 1.0) * p_prev) / lf;
                p_prev = p_curr;
                p_curr = p_next;
                p_next
            }
        };
        sum += coef * p_l;
        if coef < TERM_BOUND && l >= 2 {
            break;
        }
        l += 1;
    }
    sum
}

/// Log of the 2-sphere kernel via the exact integral representation
///
/// `p_t(theta) = C(tau) Integral_theta^pi G(phi) / sqrt(cos theta - cos phi) dphi`
///
/// with `tau = t/2`, `C = e^{tau/4} sqrt(2) / (4 pi^{3/2} sqrt(tau))` and
/// `G(phi) = sum_m (-1)^m (phi - 2 pi m)/(2 tau) e^{-(phi-2 pi m)^2/(4 tau)}`.
///
/// The dominant factor `e^{-theta^2/4 tau}` is pulled out analytically so
/// the remaining integral is well-scaled at any `t`; the substitution
/// `phi = theta + w^2` removes the inverse square-root endpoint
/// singularity.
pub fn sphere_log_kernel(t: f64, theta: f64) -> f64 {
    let tau = t / 2.0;
    let theta = theta.clamp(0.0, PI);
    if theta >= PI - 1e-14 {
        // Antipodal endpoint: integrate from a hair inside.
        return sphere_log_kernel_inner(tau, PI - 1e-9);
    }
    sphere_log_kernel_inner(tau, theta)
}

fn sphere_log_kernel_inner(tau: f64, theta: f64) -> f64 {
    let w_max = (PI - theta).sqrt();
    let integrand = |w: f64| {
        let u = w * w;
        let phi = theta + u;
        let mut g = 0.0;
        for m in -2i64..=2 {
            let v = phi - TAU * m as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            // exponent relative to the extracted e^{-theta^2/4tau} factor
            let e = (theta * theta - v * v) / (4.0 * tau);
            g += sign * v / (2.0 * tau) * e.exp();
        }
        // cos(theta) - cos(phi) = 2 sin(u/2) sin(theta + u/2) = u q sin(..)
        // with q -> 1 as w -> 0, so the w-substitution cancels exactly.
        let q = if u > 1e-8 {
            2.0 * (u / 2.0).sin() / u
        } else {
            1.0 - u * u / 24.0
        };
        let s = q * (theta + u / 2.0).sin();
        if s <= 0.0 {
            // Only reachable at theta = w = 0, where the limit is 0.
            return 0.0;
        }
        2.0 * g / s.sqrt()
    };
    // Pre-split at the exponential scale so the adaptive pass cannot
    // mistake the sharply-peaked integrand for zero.
    let scale = (2.0 * tau / theta.max(0.1)).sqrt().min(w_max / 2.0);
    let mut knots = vec![0.0];
    let mut s = scale;
    while s < w_max {
        knots.push(s);
        s *= 2.0;
    }
    knots.push(w_max);
    let mut j = 0.0;
    for pair in knots.windows(2) {
        j += adaptive_simpson(&integrand, pair[0], pair[1], 1e-13);
    }
    let log_c = tau / 4.0 + 0.5 * 2f64.ln() - (4.0 * PI.powf(1.5) * tau.sqrt()).ln();
    log_c - theta * theta / (4.0 * tau) + j.ln()
}

/// Adaptive Simpson quadrature with absolute-ish tolerance scaled by the
/// running estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    // Two passes: the first estimate sets the absolute tolerance scale.
    let rough = recurse(f, a, b, fa, fm, fb, whole, whole.abs().max(1e-300) * rel_tol, 24);
    recurse(f, a, b, fa, fm, fb, whole, rough.abs().max(1e-300) * rel_tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn euclid_kernel_at_origin() {
        // (2 pi)^(-1/2) at t = 1, r = 0.
        assert_abs_diff_eq!(euclid_kernel(1, 1.0, 0.0), 0.3989422804014327, epsilon = 1e-15);
    }

    #[test]
    fn circle_kernel_half_turn() {
        // Frozen from both the wrapped sum and the eigenfunction series,
        // which agree to 15 digits: 1 - 2 e^{-pi^2/2} + 2 e^{-2 pi^2} - ...
        let v = circle_kernel_wrapped(0.25, 0.5);
        assert_abs_diff_eq!(v, 0.9856162386389, epsilon = 1e-12);
        assert_abs_diff_eq!(circle_kernel_eigen(0.25, 0.5), v, epsilon = 1e-14);
    }

    #[test]
    fn theta_identity_across_time_scales() {
        for &t in &[1e-3, 1e-2, 0.1, 0.25, 1.0, 3.0, 10.0] {
            for &d in &[0.0, 0.1, 0.3, 0.5] {
                let w = circle_kernel_wrapped(t, d);
                let e = circle_kernel_eigen(t, d);
                assert_abs_diff_eq!(w, e, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn circle_log_kernel_matches_linear_domain() {
        for &t in &[0.05, 0.25, 1.0] {
            for &d in &[0.1, 0.4] {
                assert_relative_eq!(
                    circle_log_kernel(t, d).exp(),
                    circle_kernel_wrapped(t, d),
                    max_relative = 1e-13
                );
            }
        }
    }

    #[test]
    fn circle_log_kernel_far_below_underflow() {
        // At t = 1e-6 and distance 0.3 the density is e^{-45000}-ish.
        let lp = circle_log_kernel(1e-6, 0.3);
        let expected = -0.09 / 2e-6 - 0.5 * (TAU * 1e-6).ln();
        assert_relative_eq!(lp, expected, max_relative = 1e-12);
    }

    #[test]
    fn sphere_long_time_limit_is_uniform() {
        // Only the constant eigenfunction survives: 1/(4 pi).
        let v = sphere_kernel_series(50.0, 0.3);
        assert_abs_diff_eq!(v, 1.0 / (4.0 * PI), epsilon = 1e-12);
    }

    #[test]
    fn sphere_series_and_integral_agree_on_overlap() {
        for &t in &[0.25, 0.4, 0.7, 1.5] {
            for &theta in &[0.2, 0.8, std::f64::consts::FRAC_PI_2, 2.4] {
                let series = sphere_kernel_series(t, theta.cos());
                let logint = sphere_log_kernel(t, theta);
                assert_relative_eq!(series.ln(), logint, max_relative = 1e-9, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn sphere_kernel_normalizes() {
        // Integrate over the sphere: 2 pi Int_0^pi p_t(theta) sin(theta).
        for &t in &[0.05, 0.3, 1.0] {
            let space = Space::Sphere2;
            let x = Point::sphere([0.0, 0.0, 1.0]).unwrap();
            let f = |theta: f64| {
                let y = Point::sphere([theta.sin(), 0.0, theta.cos()]).unwrap();
                heat_kernel(&space, t, &x, &y).unwrap() * theta.sin()
            };
            let integral = TAU * adaptive_simpson(&f, 0.0, PI, 1e-11);
            assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn circle_kernel_normalizes() {
        for &t in &[1e-3, 0.25, 5.0] {
            let f = |u: f64| circle_kernel_wrapped(t, u);
            let integral = adaptive_simpson(&f, 0.0, 1.0, 1e-12);
            assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn kernel_symmetry() {
        let space = Space::Circle;
        let x = Point::circle(0.15);
        let y = Point::circle(0.83);
        let a = heat_kernel(&space, 0.2, &x, &y).unwrap();
        let b = heat_kernel(&space, 0.2, &y, &x).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);

        let s2 = Space::Sphere2;
        let u = Point::sphere([1.0, 0.0, 0.0]).unwrap();
        let v = Point::sphere([0.0, 0.6, 0.8]).unwrap();
        let a = heat_kernel(&s2, 0.7, &u, &v).unwrap();
        let b = heat_kernel(&s2, 0.7, &v, &u).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-13);
    }

    #[test]
    fn chapman_kolmogorov_circle() {
        // p_{s+t}(x,y) = Int p_s(x,z) p_t(z,y) dz with 1e3-node quadrature.
        let (s, t) = (0.1, 0.15);
        let (x, y) = (0.2, 0.55);
        let n = 1000;
        let mut acc = 0.0;
        for k in 0..n {
            let z = (k as f64 + 0.5) / n as f64;
            acc += circle_kernel_wrapped(s, x - z) * circle_kernel_wrapped(t, z - y);
        }
        acc /= n as f64;
        let direct = circle_kernel_wrapped(s + t, x - y);
        assert_abs_diff_eq!(acc, direct, epsilon = 1e-6);
    }

    #[test]
    fn chapman_kolmogorov_sphere() {
        let space = Space::Sphere2;
        let (s, t) = (0.4, 0.3);
        let x = Point::sphere([0.0, 0.0, 1.0]).unwrap();
        let y = Point::sphere([0.8, 0.0, 0.6]).unwrap();
        // Simpson in the polar angle, trapezoid in the periodic azimuth.
        let (n_th, n_ph) = (128usize, 64usize);
        let mut acc = 0.0;
        for i in 0..=n_th {
            let th = PI * i as f64 / n_th as f64;
            let w_th = if i == 0 || i == n_th {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let mut ring = 0.0;
            for j in 0..n_ph {
                let ph = TAU * j as f64 / n_ph as f64;
                let z =
                    Point::sphere([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]).unwrap();
                ring += heat_kernel(&space, s, &x, &z).unwrap()
                    * heat_kernel(&space, t, &z, &y).unwrap();
            }
            acc += w_th * ring * th.sin();
        }
        acc *= (PI / n_th as f64) / 3.0 * (TAU / n_ph as f64);
        let direct = heat_kernel(&space, s + t, &x, &y).unwrap();
        assert_abs_diff_eq!(acc, direct, epsilon = 1e-6);
    }

    #[test]
    fn torus_kernel_is_product() {
        let space = Space::FlatTorus;
        let x = Point::torus(0.1, 0.9);
        let y = Point::torus(0.6, 0.2);
        let v = heat_kernel(&space, 0.3, &x, &y).unwrap();
        let want = circle_kernel_wrapped(0.3, -0.5) * circle_kernel_wrapped(0.3, 0.7);
        assert_abs_diff_eq!(v, want, epsilon = 1e-14);
    }

    #[test]
    fn nonpositive_time_rejected() {
        let space = Space::Circle;
        let x = Point::circle(0.0);
        assert!(heat_kernel(&space, 0.0, &x, &x).is_err());
        assert!(heat_kernel(&space, -1.0, &x, &x).is_err());
    }

    #[test]
    fn hyperbolic_kernel_unsupported() {
        let space = Space::Hyperbolic2;
        let x = Point::hyperboloid([1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            heat_kernel(&space, 1.0, &x, &x),
            Err(Error::Unsupported(_))
        ));
    }
}
