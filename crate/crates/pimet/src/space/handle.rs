//! A shared handle to any of the supported space kinds, with unified point,
//! distance, and geodesic-interpolation queries. Loops store one of these.

use crate::error::{Error, Result};
use crate::limitsys::InverseSystem;
use crate::scalar::Scalar;
use crate::space::{AnalyticSpace, MetricComplex, PointLocation};
use num::rational::BigRational;
use num::BigInt;
use serde_json::{json, Value};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    OnComplex(PointLocation),
    /// Cartesian coordinates on the punctured plane.
    Plane([f64; 2]),
    /// (axial, arc) coordinates on the cylinder.
    Cylinder([f64; 2]),
}

impl Point {
    pub fn as_location(&self) -> Result<&PointLocation> {
        match self {
            Point::OnComplex(p) => Ok(p),
            _ => Err(Error::InvalidPoint("expected a complex point".into())),
        }
    }

    pub fn coords(&self) -> Result<[f64; 2]> {
        match self {
            Point::Plane(c) | Point::Cylinder(c) => Ok(*c),
            Point::OnComplex(_) => Err(Error::InvalidPoint("expected analytic coordinates".into())),
        }
    }

    pub fn to_json_value(&self) -> Value {
        match self {
            Point::OnComplex(PointLocation::Vertex(v)) => json!({ "vertex": v }),
            Point::OnComplex(PointLocation::EdgeInterior { edge, offset }) => json!({
                "edge": edge,
                "offset": Scalar::exact(offset.clone()).to_string(),
            }),
            Point::Plane(c) => json!({ "xy": c }),
            Point::Cylinder(c) => json!({ "axial_arc": c }),
        }
    }
}

#[derive(Clone)]
pub enum SpaceHandle {
    Complex(Arc<MetricComplex>),
    Analytic(AnalyticSpace),
    /// The truncated inverse limit: points live on the top level, distances
    /// in the weighted product metric.
    Limit(Arc<InverseSystem>),
}

impl std::fmt::Debug for SpaceHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpaceHandle::Complex(c) => write!(f, "SpaceHandle::Complex({c:?})"),
            SpaceHandle::Analytic(a) => write!(f, "SpaceHandle::Analytic({a:?})"),
            SpaceHandle::Limit(s) => write!(f, "SpaceHandle::Limit(depth {})", s.depth()),
        }
    }
}

impl SpaceHandle {
    pub fn complex(c: Arc<MetricComplex>) -> Self {
        SpaceHandle::Complex(c)
    }

    pub fn same_space(&self, other: &SpaceHandle) -> bool {
        match (self, other) {
            (SpaceHandle::Complex(a), SpaceHandle::Complex(b)) => Arc::ptr_eq(a, b),
            (SpaceHandle::Limit(a), SpaceHandle::Limit(b)) => Arc::ptr_eq(a, b),
            (SpaceHandle::Analytic(a), SpaceHandle::Analytic(b)) => a == b,
            _ => false,
        }
    }

    pub fn basepoint(&self) -> Point {
        match self {
            SpaceHandle::Complex(c) => {
                Point::OnComplex(PointLocation::Vertex(c.basepoint()))
            }
            SpaceHandle::Analytic(a) => match a {
                AnalyticSpace::PuncturedPlane { basepoint, .. } => Point::Plane(*basepoint),
                AnalyticSpace::Cylinder { basepoint, .. } => Point::Cylinder(*basepoint),
            },
            SpaceHandle::Limit(s) => {
                Point::OnComplex(PointLocation::Vertex(s.top_complex().basepoint()))
            }
        }
    }

    /// The complex that carries points: the complex itself, or the top level
    /// of a truncated limit.
    pub fn carrier_complex(&self) -> Result<&Arc<MetricComplex>> {
        match self {
            SpaceHandle::Complex(c) => Ok(c),
            SpaceHandle::Limit(s) => Ok(s.top_complex()),
            SpaceHandle::Analytic(_) => Err(Error::Incompatible(
                "analytic spaces have no carrier complex".into(),
            )),
        }
    }

    pub fn validate_point(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (SpaceHandle::Complex(c), Point::OnComplex(pl)) => c.validate_point(pl),
            (SpaceHandle::Limit(s), Point::OnComplex(pl)) => s.top_complex().validate_point(pl),
            (SpaceHandle::Analytic(a @ AnalyticSpace::PuncturedPlane { .. }), Point::Plane(c)) => {
                a.validate_coords(*c)
            }
            (SpaceHandle::Analytic(a @ AnalyticSpace::Cylinder { .. }), Point::Cylinder(c)) => {
                a.validate_coords(*c)
            }
            _ => Err(Error::InvalidPoint("point kind does not match the space".into())),
        }
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<Scalar> {
        match self {
            SpaceHandle::Complex(c) => Ok(Scalar::exact(
                c.distance(p.as_location()?, q.as_location()?),
            )),
            SpaceHandle::Limit(s) => Ok(Scalar::exact(
                s.limit_distance_points(p.as_location()?, q.as_location()?),
            )),
            SpaceHandle::Analytic(a) => Ok(Scalar::approx(a.distance(p.coords()?, q.coords()?))),
        }
    }

    /// Length of the canonical interpolation path from `p` to `q`; equals
    /// the distance except on limits, where the path runs along the top
    /// level and its weighted length can exceed the product-metric distance.
    pub fn step_length(&self, p: &Point, q: &Point) -> Result<Scalar> {
        match self {
            SpaceHandle::Complex(_) | SpaceHandle::Analytic(_) => self.distance(p, q),
            SpaceHandle::Limit(s) => {
                let (traj, _) = s.top_complex().geodesic(p.as_location()?, q.as_location()?);
                Ok(Scalar::exact(s.weighted_trajectory_length(&traj)))
            }
        }
    }

    /// Interpolation at rational parameter num/den along the canonical
    /// geodesic. In strict mode an ambiguous geodesic is an error; otherwise
    /// the lexicographically smallest minimizer is used (sound for
    /// homotopy-level work within the straightening margin, where distinct
    /// minimizers cobound short nullhomotopic cycles).
    pub fn interpolate(
        &self,
        p: &Point,
        q: &Point,
        num: usize,
        den: usize,
        strict: bool,
    ) -> Result<Point> {
        assert!(den > 0 && num <= den);
        if p == q {
            return Ok(p.clone());
        }
        match self {
            SpaceHandle::Complex(c) => {
                interpolate_on_complex(c, p.as_location()?, q.as_location()?, num, den, strict)
            }
            SpaceHandle::Limit(s) => interpolate_on_complex(
                s.top_complex(),
                p.as_location()?,
                q.as_location()?,
                num,
                den,
                strict,
            ),
            SpaceHandle::Analytic(a) => {
                let t = num as f64 / den as f64;
                let out = a.interpolate(p.coords()?, q.coords()?, t, strict)?;
                Ok(match a {
                    AnalyticSpace::PuncturedPlane { .. } => Point::Plane(out),
                    AnalyticSpace::Cylinder { .. } => Point::Cylinder(out),
                })
            }
        }
    }
}

fn interpolate_on_complex(
    c: &MetricComplex,
    p: &PointLocation,
    q: &PointLocation,
    num: usize,
    den: usize,
    strict: bool,
) -> Result<Point> {
    let traj = if strict {
        c.geodesic_strict(p, q)?
    } else {
        c.geodesic(p, q).0
    };
    if traj.segs.is_empty() {
        return Ok(Point::OnComplex(p.clone()));
    }
    let t = BigRational::new(BigInt::from(num), BigInt::from(den));
    Ok(Point::OnComplex(traj.point_at(c, &t)))
}

/// The spec-level geodesic query: point at parameter `t` along the unique
/// geodesic, erroring when the minimizer is not unique.
pub fn geodesic_point(
    space: &SpaceHandle,
    p: &Point,
    q: &Point,
    num: usize,
    den: usize,
) -> Result<Point> {
    space.validate_point(p)?;
    space.validate_point(q)?;
    space.interpolate(p, q, num, den, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::shapes;
    use num::rational::BigRational;
    use num::{BigInt, One};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn distance_examples() {
        // Triangle graph with unit edges: adjacent vertices at distance 1,
        // not 2 via the long way.
        let tri = Arc::new(
            MetricComplex::new(
                3,
                vec![
                    crate::space::Edge { u: 0, v: 1, length: BigRational::one() },
                    crate::space::Edge { u: 1, v: 2, length: BigRational::one() },
                    crate::space::Edge { u: 2, v: 0, length: BigRational::one() },
                ],
                Vec::new(),
                0,
            )
            .unwrap(),
        );
        let h = SpaceHandle::complex(tri);
        let a = Point::OnComplex(PointLocation::Vertex(0));
        let b = Point::OnComplex(PointLocation::Vertex(1));
        assert_eq!(h.distance(&a, &b).unwrap(), Scalar::from_int(1));
        assert_eq!(h.distance(&a, &a).unwrap(), Scalar::zero());
    }

    #[test]
    fn geodesic_endpoint_conditions() {
        let c = Arc::new(shapes::circle(BigRational::one(), 4));
        let h = SpaceHandle::complex(c.clone());
        let p = Point::OnComplex(PointLocation::Vertex(0));
        let q = Point::OnComplex(PointLocation::on_edge(&c, 0, rat(1, 2)));
        assert_eq!(geodesic_point(&h, &p, &q, 0, 1).unwrap(), p);
        assert_eq!(geodesic_point(&h, &p, &q, 1, 1).unwrap(), q);
        // Midpoint of [vertex 0, midpoint of edge 0] is offset 1/4.
        let m = geodesic_point(&h, &p, &q, 1, 2).unwrap();
        assert_eq!(
            m,
            Point::OnComplex(PointLocation::on_edge(&c, 0, rat(1, 4)))
        );
    }

    #[test]
    fn geodesic_on_wedge_interior_points() {
        // Points at arclength 0.1 and 0.3 around circle 0 of a wedge; the
        // halfway point sits at arclength 0.2.
        let w = Arc::new(shapes::wedge_of_circles(
            &[BigRational::one(), BigRational::one()],
            4,
        ));
        let h = SpaceHandle::complex(w.clone());
        // Edge 0 covers arclength [0, 1/4]; offsets are fractions of the
        // quarter-circle edge.
        let p = Point::OnComplex(PointLocation::on_edge(&w, 0, rat(2, 5))); // 0.1
        let q = Point::OnComplex(PointLocation::on_edge(&w, 1, rat(1, 5))); // 0.3
        let m = geodesic_point(&h, &p, &q, 1, 2).unwrap();
        assert_eq!(
            m,
            Point::OnComplex(PointLocation::on_edge(&w, 0, rat(4, 5))) // 0.2
        );
    }

    #[test]
    fn antipodal_geodesic_is_ambiguous() {
        let c = Arc::new(shapes::circle(BigRational::one(), 4));
        let h = SpaceHandle::complex(c);
        let p = Point::OnComplex(PointLocation::Vertex(0));
        let q = Point::OnComplex(PointLocation::Vertex(2));
        assert!(geodesic_point(&h, &p, &q, 1, 2).is_err());
    }

    #[test]
    fn two_sided_geodesic_searches_agree() {
        use rand::{Rng, SeedableRng};
        let w = Arc::new(shapes::wedge_of_circles(
            &[BigRational::one(), rat(3, 4)],
            4,
        ));
        let h = SpaceHandle::complex(w.clone());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let margin = w.straightening_margin().unwrap();
        let mut checked = 0;
        while checked < 40 {
            let e1 = rng.gen_range(0..w.edge_count());
            let e2 = rng.gen_range(0..w.edge_count());
            let o1 = rat(rng.gen_range(1..16), 16);
            let o2 = rat(rng.gen_range(1..16), 16);
            let p = Point::OnComplex(PointLocation::on_edge(&w, e1, o1));
            let q = Point::OnComplex(PointLocation::on_edge(&w, e2, o2));
            let d = w.distance(p.as_location().unwrap(), q.as_location().unwrap());
            if d >= margin || p == q {
                continue;
            }
            checked += 1;
            let from_p = geodesic_point(&h, &p, &q, 1, 4).unwrap();
            let from_q = geodesic_point(&h, &q, &p, 3, 4).unwrap();
            assert_eq!(from_p, from_q, "one-sided searches disagree");
        }
    }
}
