//! Discretized based loops and the uniform metric.
//!
//! A loop is a closed array of N+1 samples on a uniform time grid, read as
//! the piecewise-geodesic interpolant of its samples. The true uniform
//! distance mu between two interpolants is bracketed by a certified
//! interval: the grid maximum from below, and the grid values plus
//! per-segment travel bounds from above. Certificates stay exact on
//! complexes and limits (rational arithmetic) and are f64 on the analytic
//! models.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{Point, SpaceHandle};
use num::integer::lcm;
use serde_json::{json, Value};

#[derive(Clone, Debug)]
pub struct DiscreteLoop {
    space: SpaceHandle,
    samples: Vec<Point>,
    mesh: Scalar,
}

/// Certified bracket for the uniform distance of two interpolants: the true
/// sup lies in [grid_max, upper].
#[derive(Clone, Debug)]
pub struct MuInterval {
    pub grid_max: Scalar,
    pub upper: Scalar,
    pub grid: usize,
}

impl MuInterval {
    pub fn slack(&self) -> Scalar {
        &self.upper - &self.grid_max
    }
}

fn recompute_mesh(space: &SpaceHandle, samples: &[Point]) -> Result<Scalar> {
    let mut mesh = Scalar::zero();
    for w in samples.windows(2) {
        let d = space.distance(&w[0], &w[1])?;
        if d > mesh {
            mesh = d;
        }
    }
    Ok(mesh)
}

impl DiscreteLoop {
    pub fn new(space: SpaceHandle, samples: Vec<Point>) -> Result<DiscreteLoop> {
        if samples.len() < 2 {
            return Err(Error::InvalidPoint("a loop needs at least two samples".into()));
        }
        if samples.first() != samples.last() {
            return Err(Error::InvalidPoint("loop is not closed".into()));
        }
        for p in &samples {
            space.validate_point(p)?;
        }
        let mesh = recompute_mesh(&space, &samples)?;
        Ok(DiscreteLoop {
            space,
            samples,
            mesh,
        })
    }

    pub fn constant(space: SpaceHandle) -> DiscreteLoop {
        let base = space.basepoint();
        DiscreteLoop {
            space,
            samples: vec![base.clone(), base],
            mesh: Scalar::zero(),
        }
    }

    pub fn space(&self) -> &SpaceHandle {
        &self.space
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    pub fn grid(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn mesh(&self) -> &Scalar {
        &self.mesh
    }

    pub fn basepoint_sample(&self) -> &Point {
        &self.samples[0]
    }

    /// Refines to a grid of `n` intervals, `n` a multiple of the current
    /// grid. New samples interpolate along the canonical geodesic of each
    /// segment, so refinement is exact on the interpolant.
    pub fn refine_to(&self, n: usize) -> Result<DiscreteLoop> {
        let cur = self.grid();
        if n == cur {
            return Ok(self.clone());
        }
        assert!(n > 0 && n % cur == 0, "refinement must be a multiple of the grid");
        let m = n / cur;
        let mut samples = Vec::with_capacity(n + 1);
        for i in 0..cur {
            samples.push(self.samples[i].clone());
            for j in 1..m {
                samples.push(self.space.interpolate(
                    &self.samples[i],
                    &self.samples[i + 1],
                    j,
                    m,
                    false,
                )?);
            }
        }
        samples.push(self.samples[cur].clone());
        let mesh = recompute_mesh(&self.space, &samples)?;
        Ok(DiscreteLoop {
            space: self.space.clone(),
            samples,
            mesh,
        })
    }

    pub fn reverse(&self) -> DiscreteLoop {
        DiscreteLoop {
            space: self.space.clone(),
            samples: self.samples.iter().rev().cloned().collect(),
            mesh: self.mesh.clone(),
        }
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "grid": self.grid(),
            "mesh": self.mesh.to_string(),
            "samples": self.samples.iter().map(Point::to_json_value).collect::<Vec<_>>(),
        })
    }
}

/// Certified bracket of mu between the interpolants of two loops.
///
/// The grids are aligned by common refinement; on the shared grid the
/// pointwise distances d_i bound mu from below, and between grid times the
/// triangle inequality through the nearer grid point gives
/// mu <= max_i (d_i + d_{i+1} + s_i(alpha) + s_i(beta)) / 2 with s_i the
/// segment path lengths, additionally capped by grid_max + mesh(a) + mesh(b).
pub fn uniform_distance(a: &DiscreteLoop, b: &DiscreteLoop) -> Result<MuInterval> {
    if !a.space.same_space(&b.space) {
        return Err(Error::SpaceMismatch);
    }
    let n = lcm(a.grid(), b.grid());
    let ra = a.refine_to(n)?;
    let rb = b.refine_to(n)?;
    mu_on_aligned(&ra, &rb)
}

fn mu_on_aligned(a: &DiscreteLoop, b: &DiscreteLoop) -> Result<MuInterval> {
    let n = a.grid();
    debug_assert_eq!(n, b.grid());
    let space = &a.space;
    let mut d: Vec<Scalar> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        d.push(space.distance(&a.samples[i], &b.samples[i])?);
    }
    let grid_max = d.iter().cloned().fold(Scalar::zero(), Scalar::max);
    let two = Scalar::from_int(2);
    let mut seg_bound = Scalar::zero();
    for i in 0..n {
        let sa = space.step_length(&a.samples[i], &a.samples[i + 1])?;
        let sb = space.step_length(&b.samples[i], &b.samples[i + 1])?;
        let crossing = (&(&d[i] + &d[i + 1]) + &(&sa + &sb)) / two.clone();
        if crossing > seg_bound {
            seg_bound = crossing;
        }
    }
    let global = &grid_max + &(a.mesh.clone() + b.mesh.clone());
    let upper = seg_bound.min(global).max(grid_max.clone());
    Ok(MuInterval {
        grid_max,
        upper,
        grid: n,
    })
}

/// Grid-aligned uniform distance at a specific common refinement, for the
/// grid-exact lemma checks.
pub fn uniform_distance_at(a: &DiscreteLoop, b: &DiscreteLoop, grid: usize) -> Result<MuInterval> {
    if !a.space.same_space(&b.space) {
        return Err(Error::SpaceMismatch);
    }
    let n = lcm(lcm(a.grid(), b.grid()), grid);
    mu_on_aligned(&a.refine_to(n)?, &b.refine_to(n)?)
}

/// Concatenation: the first half traces `a` at double speed, the second
/// half `b`. Both loops must share their base sample.
pub fn concatenate(a: &DiscreteLoop, b: &DiscreteLoop) -> Result<DiscreteLoop> {
    if !a.space.same_space(&b.space) {
        return Err(Error::SpaceMismatch);
    }
    if a.basepoint_sample() != b.basepoint_sample() {
        return Err(Error::Incompatible("concatenation needs a common basepoint".into()));
    }
    let m = lcm(a.grid(), b.grid());
    let ra = a.refine_to(m)?;
    let rb = b.refine_to(m)?;
    let mut samples = ra.samples;
    samples.extend_from_slice(&rb.samples[1..]);
    let mesh = ra.mesh.max(rb.mesh);
    Ok(DiscreteLoop {
        space: a.space.clone(),
        samples,
        mesh,
    })
}

/// An open sampled path (same representation as a loop, ends free).
#[derive(Clone, Debug)]
pub struct DiscretePath {
    space: SpaceHandle,
    samples: Vec<Point>,
}

impl DiscretePath {
    pub fn new(space: SpaceHandle, samples: Vec<Point>) -> Result<DiscretePath> {
        if samples.is_empty() {
            return Err(Error::InvalidPoint("a path needs at least one sample".into()));
        }
        for p in &samples {
            space.validate_point(p)?;
        }
        Ok(DiscretePath { space, samples })
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    pub fn space(&self) -> &SpaceHandle {
        &self.space
    }

    pub fn start(&self) -> &Point {
        &self.samples[0]
    }

    pub fn end(&self) -> &Point {
        self.samples.last().unwrap()
    }

    pub fn grid(&self) -> usize {
        self.samples.len() - 1
    }

    fn refine_to(&self, n: usize) -> Result<DiscretePath> {
        let cur = self.grid().max(1);
        if self.samples.len() == 1 {
            return Ok(DiscretePath {
                space: self.space.clone(),
                samples: vec![self.samples[0].clone(); n + 1],
            });
        }
        assert!(n % cur == 0);
        let m = n / cur;
        let mut samples = Vec::with_capacity(n + 1);
        for i in 0..cur {
            samples.push(self.samples[i].clone());
            for j in 1..m {
                samples.push(self.space.interpolate(
                    &self.samples[i],
                    &self.samples[i + 1],
                    j,
                    m,
                    false,
                )?);
            }
        }
        samples.push(self.samples[cur].clone());
        Ok(DiscretePath {
            space: self.space.clone(),
            samples,
        })
    }
}

/// Path-conjugation gamma * alpha with the fixed (1/4, 1/2, 1/4) time
/// allocation: out along gamma, once around alpha, back along gamma. The
/// fixed allocation makes conjugation an exact grid-level isometry: the
/// gamma thirds contribute zero pointwise distance against another
/// conjugate by the same path.
pub fn path_conjugate(gamma: &DiscretePath, alpha: &DiscreteLoop) -> Result<DiscreteLoop> {
    if !gamma.space.same_space(&alpha.space) {
        return Err(Error::SpaceMismatch);
    }
    if gamma.end() != alpha.basepoint_sample() {
        return Err(Error::Incompatible(
            "path must end at the loop's basepoint".into(),
        ));
    }
    let quarter = gamma
        .grid()
        .max(1)
        .max((alpha.grid() + 1) / 2)
        .next_power_of_two();
    let g = gamma.refine_to(quarter)?;
    let mid = alpha.refine_to(2 * quarter)?;
    let mut samples = g.samples.clone();
    samples.extend_from_slice(&mid.samples[1..]);
    samples.extend(g.samples.iter().rev().skip(1).cloned());
    let mesh = recompute_mesh(&gamma.space, &samples)?;
    Ok(DiscreteLoop {
        space: gamma.space.clone(),
        samples,
        mesh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{word_to_loop, Word};
    use crate::space::shapes;
    use num::rational::BigRational;
    use num::One;
    use std::sync::Arc;

    fn unit_circle_space() -> SpaceHandle {
        SpaceHandle::complex(Arc::new(shapes::circle(BigRational::one(), 4)))
    }

    #[test]
    fn mu_of_identical_loops_is_zero_grid() {
        let h = unit_circle_space();
        let w = Word::from_letters(vec![1]).unwrap();
        let l = word_to_loop(&h, &w, 8).unwrap();
        let mu = uniform_distance(&l, &l).unwrap();
        assert_eq!(mu.grid_max, Scalar::zero());
        assert!(mu.upper <= l.mesh().clone() + l.mesh().clone());
    }

    #[test]
    fn mu_constant_vs_circle_loop() {
        // Farthest point of the circle from the basepoint is 1/2 away; the
        // certified interval must contain it.
        let h = unit_circle_space();
        let w = Word::from_letters(vec![1]).unwrap();
        let l = word_to_loop(&h, &w, 8).unwrap();
        let c = DiscreteLoop::constant(h);
        let mu = uniform_distance(&l, &c).unwrap();
        assert_eq!(mu.grid_max, Scalar::ratio(1, 2));
        assert!(mu.upper >= Scalar::ratio(1, 2));
        assert!(mu.upper <= Scalar::ratio(1, 2) + Scalar::ratio(1, 4));
    }

    #[test]
    fn concatenation_grid_sizes_add() {
        let h = unit_circle_space();
        let w = Word::from_letters(vec![1]).unwrap();
        let l = word_to_loop(&h, &w, 8).unwrap();
        let n = l.grid();
        let cat = concatenate(&l, &l).unwrap();
        assert_eq!(cat.grid(), 2 * n);
    }

    #[test]
    fn concatenation_max_law_exact_on_grid() {
        let h = unit_circle_space();
        let g = Word::from_letters(vec![1]).unwrap();
        let a = word_to_loop(&h, &g, 8).unwrap();
        let b = DiscreteLoop::constant(h.clone());
        let ab = concatenate(&a, &b).unwrap();
        let ba = concatenate(&b, &a).unwrap();
        let mu_pair = uniform_distance(&ab, &ba).unwrap();
        let mu_ab = uniform_distance(&a, &b).unwrap();
        let mu_ba = uniform_distance(&b, &a).unwrap();
        // mu(a.b, b.a) on the concatenated grid equals
        // max(mu(a,b), mu(b,a)) at the matching refinement.
        assert_eq!(
            mu_pair.grid_max,
            mu_ab.grid_max.clone().max(mu_ba.grid_max.clone())
        );
    }

    #[test]
    fn reverse_preserves_grid_distance_exactly() {
        let h = unit_circle_space();
        let a = word_to_loop(&h, &Word::from_letters(vec![1]).unwrap(), 8).unwrap();
        let b = word_to_loop(&h, &Word::from_letters(vec![-1]).unwrap(), 8).unwrap();
        let direct = uniform_distance(&a, &b).unwrap();
        let reversed = uniform_distance(&a.reverse(), &b.reverse()).unwrap();
        assert_eq!(direct.grid_max, reversed.grid_max);
        assert_eq!(direct.upper, reversed.upper);
        assert_eq!(a.reverse().reverse().samples(), a.samples());
    }

    #[test]
    fn refinement_never_widens_the_interval() {
        let h = unit_circle_space();
        let a = word_to_loop(&h, &Word::from_letters(vec![1]).unwrap(), 8).unwrap();
        let b = DiscreteLoop::constant(h);
        let coarse = uniform_distance(&a, &b).unwrap();
        let fine = uniform_distance_at(&a, &b, 4 * coarse.grid).unwrap();
        assert!(fine.grid_max >= coarse.grid_max);
        assert!(fine.upper <= coarse.upper);
    }

    #[test]
    fn conjugation_is_grid_isometry() {
        let h = unit_circle_space();
        let a = word_to_loop(&h, &Word::from_letters(vec![1]).unwrap(), 8).unwrap();
        let b = word_to_loop(&h, &Word::from_letters(vec![-1]).unwrap(), 8).unwrap();
        let gamma = DiscretePath::new(h.clone(), vec![h.basepoint()]).unwrap();
        let ca = path_conjugate(&gamma, &a).unwrap();
        let cb = path_conjugate(&gamma, &b).unwrap();
        let lhs = uniform_distance(&ca, &cb).unwrap();
        let rhs = uniform_distance_at(&a, &b, ca.grid() / 2).unwrap();
        assert_eq!(lhs.grid_max, rhs.grid_max);
    }
}
