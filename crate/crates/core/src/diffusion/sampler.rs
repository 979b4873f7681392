//! Trajectory samplers: exact Brownian increments on the flat spaces,
//! geodesic random-walk steps on the smooth manifolds, Poisson clocks, and
//! the Brownian-bridge barrier-crossing correction.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson, Uniform};

use crate::error::{Error, Result};
use crate::rng::SeedRecord;
use crate::spaces::manifold::exp_map;
use crate::spaces::{Point, Space, TangentVector};
use crate::diffusion::chains::FiniteChain;

/// One exact Brownian increment (generator `Delta/2`) on a flat space.
pub fn bm_increment<R: Rng + ?Sized>(
    space: &Space,
    x: &Point,
    dt: f64,
    rng: &mut R,
) -> Result<Point> {
    if dt <= 0.0 {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let normal = Normal::new(0.0, dt.sqrt()).expect("valid std dev");
    match (space, x) {
        (Space::Euclidean { .. }, Point::Euclidean(c)) => Ok(Point::Euclidean(
            c.iter().map(|v| v + normal.sample(rng)).collect(),
        )),
        (Space::Circle, Point::Circle(u)) => Ok(Point::circle(u + normal.sample(rng))),
        (Space::FlatTorus, Point::FlatTorus(pq)) => Ok(Point::torus(
            pq[0] + normal.sample(rng),
            pq[1] + normal.sample(rng),
        )),
        _ => Err(Error::Unsupported(format!(
            "exact Brownian increments on {}; curved spaces use geodesic random-walk steps",
            space.name()
        ))),
    }
}

/// Single geodesic random-walk step `exp_x(eps sqrt(d+2) (frame . xi))`
/// where `xi` lies in the unit disk of the walk dimension.
pub fn geodesic_rw_step(
    space: &Space,
    x: &Point,
    frame: &[TangentVector],
    eps: f64,
    xi: &[f64],
) -> Result<Point> {
    if xi.len() != frame.len() {
        return Err(Error::DimensionMismatch(xi.len(), frame.len()));
    }
    let norm2: f64 = xi.iter().map(|v| v * v).sum();
    if norm2 > 1.0 + 1e-12 {
        return Err(Error::Domain("xi must lie in the unit disk".into()));
    }
    let d = frame.len() as f64;
    let scale = eps * (d + 2.0).sqrt();
    let dim = frame[0].components.len();
    let mut comps = vec![0.0; dim];
    for (f, &c) in frame.iter().zip(xi) {
        for (out, fc) in comps.iter_mut().zip(&f.components) {
            *out += scale * c * fc;
        }
    }
    exp_map(space, x, &TangentVector::new(x.clone(), comps))
}

/// Poisson clock: number of events of rate `lambda` in `[0, t]`.
pub fn poisson_clock<R: Rng + ?Sized>(lambda: f64, t: f64, rng: &mut R) -> Result<u64> {
    if lambda <= 0.0 {
        return Err(Error::Domain(format!("rate must be positive, got {lambda}")));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0);
    }
    let pois = Poisson::new(lambda * t).expect("positive mean");
    Ok(pois.sample(rng) as u64)
}

/// Probability that a Brownian bridge over a step of length `dt`, with
/// endpoint distances `d1`, `d2` on the same side of a flat barrier,
/// touched the barrier inside the step: `exp(-2 d1 d2 / dt)` for standard
/// Brownian motion (reflection principle).
pub fn bridge_crossing_prob(d1: f64, d2: f64, dt: f64) -> f64 {
    if dt <= 0.0 {
        return 0.0;
    }
    (-2.0 * d1 * d2 / dt).exp()
}

/// Uniform sample from the closed unit ball in `R^d`.
pub fn unit_ball<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    match d {
        1 => {
            let u = Uniform::new_inclusive(-1.0f64, 1.0).unwrap();
            vec![u.sample(rng)]
        }
        2 => {
            let [x, y]: [f64; 2] = rand_distr::UnitDisc.sample(rng);
            vec![x, y]
        }
        _ => {
            // Gaussian direction with a radial law r ~ U^(1/d).
            let normal = Normal::new(0.0, 1.0).unwrap();
            let g: Vec<f64> = (0..d).map(|_| normal.sample(rng)).collect();
            let n: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let r: f64 = rng.random::<f64>().powf(1.0 / d as f64);
            g.into_iter().map(|v| r * v / n).collect()
        }
    }
}

/// Sampled path on a uniform time grid, with its seed record.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub space: Space,
    pub dt: f64,
    pub positions: Vec<Point>,
    pub seed: SeedRecord,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Steps must be single-step reachable; for Gaussian increments this is
    /// an 8-sigma sanity bound per step.
    pub fn validate_steps(&self) -> Result<()> {
        let dim = self.space.manifold_dim().unwrap_or(1) as f64;
        let bound = 8.0 * (self.dt * dim).sqrt();
        for w in self.positions.windows(2) {
            let d = self.space.distance(&w[0], &w[1])?;
            if d > bound {
                return Err(Error::Consistency(format!(
                    "step of size {d} exceeds the {bound} bound"
                )));
            }
        }
        Ok(())
    }
}

/// Sample a Brownian path from `x0` on a flat space.
pub fn sample_bm_trajectory(
    space: &Space,
    x0: &Point,
    dt: f64,
    steps: usize,
    seed: SeedRecord,
) -> Result<Trajectory> {
    let mut rng = seed.rng();
    let mut positions = Vec::with_capacity(steps + 1);
    positions.push(x0.clone());
    for _ in 0..steps {
        let next = bm_increment(space, positions.last().unwrap(), dt, &mut rng)?;
        positions.push(next);
    }
    Ok(Trajectory {
        space: space.clone(),
        dt,
        positions,
        seed,
    })
}

/// Sample a state-index path of a finite chain.
pub fn sample_chain_path<R: Rng + ?Sized>(
    chain: &FiniteChain,
    init: usize,
    steps: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut path = Vec::with_capacity(steps + 1);
    let mut cur = init;
    path.push(cur);
    for _ in 0..steps {
        let u: f64 = rng.random();
        let row = &chain.p[cur];
        let mut acc = 0.0;
        let mut next = cur;
        for (j, &pj) in row.iter().enumerate() {
            acc += pj;
            if u < acc {
                next = j;
                break;
            }
        }
        cur = next;
        path.push(cur);
    }
    path
}

/// Chain path as a trajectory of points (dt = one chain step).
pub fn chain_path_to_trajectory(chain: &FiniteChain, path: &[usize], seed: SeedRecord) -> Trajectory {
    Trajectory {
        space: chain.space.clone(),
        dt: chain.dt,
        positions: path.iter().map(|&i| chain.states[i].clone()).collect(),
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{chi_square_critical, chi_square_gof};
    use crate::diffusion::chains::{build_chain, ChainSpec};
    use crate::diffusion::kernels::circle_kernel_wrapped;
    use crate::rng::seed_stream;
    use crate::spaces::manifold::orthonormal_frame;
    use approx::assert_abs_diff_eq;
    use statrs::distribution::{ContinuousCDF, Normal as StatNormal};

    #[test]
    fn euclidean_mean_displacement_vanishes() {
        let space = Space::Euclidean { dim: 2 };
        let x = Point::euclidean(&[0.0, 0.0]);
        let mut rng = seed_stream(11, 0);
        let n = 100_000;
        let dt = 0.3;
        let mut sum = [0.0f64; 2];
        for _ in 0..n {
            let Point::Euclidean(c) = bm_increment(&space, &x, dt, &mut rng).unwrap() else {
                panic!()
            };
            sum[0] += c[0];
            sum[1] += c[1];
        }
        let se = (dt / n as f64).sqrt();
        assert!(sum[0].abs() / n as f64 <= 3.0 * se);
        assert!(sum[1].abs() / n as f64 <= 3.0 * se);
    }

    #[test]
    fn mean_square_displacement_matches_dt() {
        // E[d^2] = d * dt for the flat torus at small dt.
        let space = Space::FlatTorus;
        let x = Point::torus(0.5, 0.5);
        let mut rng = seed_stream(12, 0);
        let n = 100_000;
        let dt = 1e-4;
        let mut acc = 0.0;
        for _ in 0..n {
            let y = bm_increment(&space, &x, dt, &mut rng).unwrap();
            let d = space.distance(&x, &y).unwrap();
            acc += d * d;
        }
        let mean = acc / n as f64;
        // var of d^2 per sample is 2 d dt^2 = 2*2*dt^2; SE = sqrt(8) dt / sqrt(n).
        let se = (8.0f64).sqrt() * dt / (n as f64).sqrt();
        assert!((mean - 2.0 * dt).abs() <= 3.0 * se, "mean {mean}");
    }

    #[test]
    fn circle_increment_density_matches_kernel() {
        // Chi-square on 20 bins at level 0.01 against the wrapped kernel.
        let space = Space::Circle;
        let x = Point::circle(0.3);
        let t = 0.07;
        let mut rng = seed_stream(13, 0);
        let n = 100_000usize;
        let bins = 20usize;
        let mut counts = vec![0u64; bins];
        for _ in 0..n {
            let Point::Circle(u) = bm_increment(&space, &x, t, &mut rng).unwrap() else {
                panic!()
            };
            counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
        }
        // Expected bin probabilities by fine quadrature of the kernel.
        let sub = 200;
        let probs: Vec<f64> = (0..bins)
            .map(|b| {
                (0..sub)
                    .map(|k| {
                        let u = (b as f64 + (k as f64 + 0.5) / sub as f64) / bins as f64;
                        circle_kernel_wrapped(t, u - 0.3) / (bins * sub) as f64
                    })
                    .sum()
            })
            .collect();
        let r = chi_square_gof(&counts, &probs).unwrap();
        assert!(
            r.statistic < chi_square_critical(bins - 1, 0.99),
            "chi-square {} p={}",
            r.statistic,
            r.p_value
        );
    }

    #[test]
    fn rw_step_zero_noise_stays_put() {
        let space = Space::Sphere2;
        let x = Point::sphere([0.0, 1.0, 0.0]).unwrap();
        let frame = orthonormal_frame(&space, &x).unwrap();
        let y = geodesic_rw_step(&space, &x, &frame, 0.01, &[0.0, 0.0]).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn rw_step_length_is_geodesic_speed() {
        let space = Space::Sphere2;
        let x = Point::sphere([1.0, 0.0, 0.0]).unwrap();
        let frame = orthonormal_frame(&space, &x).unwrap();
        let xi = [0.3, -0.4];
        let eps = 0.05;
        let y = geodesic_rw_step(&space, &x, &frame, eps, &xi).unwrap();
        let want = eps * 2.0 * 0.5; // eps sqrt(d+2) |xi| with d = 2, |xi| = 1/2
        assert_abs_diff_eq!(space.distance(&x, &y).unwrap(), want, epsilon = 1e-10);
    }

    #[test]
    fn rw_single_step_covariance() {
        // Cov of eps sqrt(d+2) xi is eps^2 I for the uniform disk (d = 2).
        let mut rng = seed_stream(14, 0);
        let n = 1_000_000usize;
        let eps = 1.0;
        let mut cxx = 0.0;
        let mut cyy = 0.0;
        let mut cxy = 0.0;
        for _ in 0..n {
            let xi = unit_ball(2, &mut rng);
            let sx = eps * 2.0 * xi[0];
            let sy = eps * 2.0 * xi[1];
            cxx += sx * sx;
            cyy += sy * sy;
            cxy += sx * sy;
        }
        // Var of xi_x^2 is about 1/24; SE of mean of sx^2 about sqrt(4^2/24/n).
        let se = (16.0 / 24.0 / n as f64).sqrt();
        assert!((cxx / n as f64 - 1.0).abs() <= 3.0 * se);
        assert!((cyy / n as f64 - 1.0).abs() <= 3.0 * se);
        assert!((cxy / n as f64).abs() <= 3.0 * se);
    }

    #[test]
    fn poisson_clock_moments() {
        let mut rng = seed_stream(15, 0);
        assert_eq!(poisson_clock(2.0, 0.0, &mut rng).unwrap(), 0);
        let n = 100_000usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let k = poisson_clock(2.0, 2.0, &mut rng).unwrap() as f64;
            sum += k;
            sumsq += k * k;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        let se_mean = (4.0 / n as f64).sqrt();
        // SE of the variance estimate: sqrt((mu4 - var^2)/n), mu4 ~ 3 var^2 + mean.
        let se_var = ((3.0 * 16.0 + 4.0 - 16.0) / n as f64).sqrt();
        assert!((mean - 4.0).abs() <= 3.0 * se_mean, "mean {mean}");
        assert!((var - 4.0).abs() <= 3.0 * se_var, "var {var}");
    }

    #[test]
    fn bridge_probability_values() {
        assert_abs_diff_eq!(bridge_crossing_prob(1.0, 1.0, 1.0), (-2.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(bridge_crossing_prob(0.0, 0.7, 0.5), 1.0, epsilon = 1e-15);
        assert!(bridge_crossing_prob(1.0, 1.0, 1e-9) < 1e-300);
    }

    #[test]
    fn geodesic_walk_clt_on_the_line() {
        // n-step walk at eps = n^(-1/2) is Gaussian in the limit;
        // one-sample KS at level 0.01 with 1e5 trials.
        let space = Space::Euclidean { dim: 1 };
        let frame = vec![TangentVector::new(Point::euclidean(&[0.0]), vec![1.0])];
        let n_steps = 400usize;
        let eps = (n_steps as f64).powf(-0.5);
        let trials = 100_000usize;
        let mut rng = seed_stream(16, 0);
        let mut finals = Vec::with_capacity(trials);
        for _ in 0..trials {
            let mut x = 0.0f64;
            for _ in 0..n_steps {
                let xi = unit_ball(1, &mut rng);
                // flat space: the step is just the scaled coordinate
                x += eps * 3f64.sqrt() * xi[0];
            }
            finals.push(x);
        }
        let _ = (&space, &frame); // step arithmetic inlined above for speed
        let normal = StatNormal::new(0.0, 1.0).unwrap();
        let r = crate::analysis::ks_one_sample(&finals, |x| normal.cdf(x)).unwrap();
        assert!(r.p_value > 0.01, "KS p={} D={}", r.p_value, r.statistic);
    }

    #[test]
    fn chain_paths_follow_adjacency() {
        let chain = build_chain(&ChainSpec::Gasket { level: 2, axis_subdivision: true }).unwrap();
        let mut rng = seed_stream(17, 0);
        let path = sample_chain_path(&chain, chain.x1, 500, &mut rng);
        for w in path.windows(2) {
            assert!(chain.p[w[0]][w[1]] > 0.0, "impossible step {w:?}");
        }
    }

    #[test]
    fn trajectory_step_validation() {
        let space = Space::Euclidean { dim: 1 };
        let x0 = Point::euclidean(&[0.0]);
        let traj =
            sample_bm_trajectory(&space, &x0, 0.01, 1000, SeedRecord::new(5, 0)).unwrap();
        traj.validate_steps().unwrap();
        assert_eq!(traj.len(), 1001);
    }
}
