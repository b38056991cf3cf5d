//! Compact metric spaces: finite metric simplicial complexes with exact
//! rational path metrics, and two closed-form analytic models.

mod analytic;
mod complex;
mod handle;
mod map;
mod metric;
pub mod shapes;
mod systole;

pub use analytic::AnalyticSpace;
pub use complex::{Cell, Edge, MetricComplex, Step, SubdivisionMap};
pub use handle::{geodesic_point, Point, SpaceHandle};
pub use map::{EdgeImage, SimplicialMap};
pub use metric::Trajectory;

use num::rational::BigRational;

/// A point of a metric complex: a vertex, or an interior point of an edge at
/// a rational offset in (0, 1). Vertex points are the canonical form of
/// offsets 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointLocation {
    Vertex(usize),
    EdgeInterior { edge: usize, offset: BigRational },
}

impl PointLocation {
    pub fn on_edge(complex: &MetricComplex, edge: usize, offset: BigRational) -> Self {
        use num::{One, Zero};
        if offset.is_zero() {
            PointLocation::Vertex(complex.edge(edge).u)
        } else if offset.is_one() {
            PointLocation::Vertex(complex.edge(edge).v)
        } else {
            PointLocation::EdgeInterior { edge, offset }
        }
    }
}
