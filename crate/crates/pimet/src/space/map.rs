//! Simplicial maps between metric complexes, recorded on vertices and edges.
//! The explicit edge assignment disambiguates parallel edges in multigraph
//! 1-skeletons.

use crate::error::{Error, Result};
use crate::space::{MetricComplex, PointLocation};
use num::rational::BigRational;
use num::One;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeImage {
    /// The whole edge collapses to a vertex of the codomain.
    Collapsed(usize),
    Edge { id: usize, reversed: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    vertex_map: Vec<usize>,
    edge_map: Vec<EdgeImage>,
}

impl SimplicialMap {
    /// Resolves the edge assignment from a vertex assignment. Fails when an
    /// edge image is missing, or ambiguous because of parallel edges.
    pub fn from_vertex_map(
        dom: &MetricComplex,
        cod: &MetricComplex,
        vertex_map: Vec<usize>,
    ) -> Result<SimplicialMap> {
        if vertex_map.len() != dom.vertex_count() {
            return Err(Error::NonSimplicial("vertex map has the wrong arity".into()));
        }
        if vertex_map.iter().any(|&v| v >= cod.vertex_count()) {
            return Err(Error::NonSimplicial("vertex image out of range".into()));
        }
        let mut edge_map = Vec::with_capacity(dom.edge_count());
        for e in dom.edges() {
            let (a, b) = (vertex_map[e.u], vertex_map[e.v]);
            if a == b {
                edge_map.push(EdgeImage::Collapsed(a));
                continue;
            }
            let candidates = cod.edges_between(a, b);
            match candidates.as_slice() {
                [] => {
                    return Err(Error::NonSimplicial(format!(
                        "edge {}-{} has no image edge {}-{}",
                        e.u, e.v, a, b
                    )))
                }
                [id] => {
                    let img = cod.edge(*id);
                    edge_map.push(EdgeImage::Edge {
                        id: *id,
                        reversed: img.u != a,
                    });
                }
                _ => {
                    return Err(Error::NonSimplicial(format!(
                        "parallel edges between {a} and {b}; edge images must be explicit"
                    )))
                }
            }
        }
        Ok(SimplicialMap {
            vertex_map,
            edge_map,
        })
    }

    pub fn from_parts(
        dom: &MetricComplex,
        cod: &MetricComplex,
        vertex_map: Vec<usize>,
        edge_map: Vec<EdgeImage>,
    ) -> Result<SimplicialMap> {
        if vertex_map.len() != dom.vertex_count() || edge_map.len() != dom.edge_count() {
            return Err(Error::NonSimplicial("map has the wrong arity".into()));
        }
        for (i, e) in dom.edges().iter().enumerate() {
            let (a, b) = (vertex_map[e.u], vertex_map[e.v]);
            match edge_map[i] {
                EdgeImage::Collapsed(v) => {
                    if a != b || a != v {
                        return Err(Error::NonSimplicial(format!(
                            "edge {i} collapse is inconsistent with vertex images"
                        )));
                    }
                }
                EdgeImage::Edge { id, reversed } => {
                    let img = cod.edge(id);
                    let (iu, iv) = if reversed { (img.v, img.u) } else { (img.u, img.v) };
                    if iu != a || iv != b {
                        return Err(Error::NonSimplicial(format!(
                            "edge {i} image endpoints disagree with vertex images"
                        )));
                    }
                }
            }
        }
        Ok(SimplicialMap {
            vertex_map,
            edge_map,
        })
    }

    pub fn identity(complex: &MetricComplex) -> SimplicialMap {
        SimplicialMap {
            vertex_map: (0..complex.vertex_count()).collect(),
            edge_map: (0..complex.edge_count())
                .map(|id| EdgeImage::Edge { id, reversed: false })
                .collect(),
        }
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn edge_image(&self, e: usize) -> EdgeImage {
        self.edge_map[e]
    }

    pub fn map_vertex(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn map_point(&self, p: &PointLocation) -> PointLocation {
        match p {
            PointLocation::Vertex(v) => PointLocation::Vertex(self.vertex_map[*v]),
            PointLocation::EdgeInterior { edge, offset } => match self.edge_map[*edge] {
                EdgeImage::Collapsed(v) => PointLocation::Vertex(v),
                EdgeImage::Edge { id, reversed } => PointLocation::EdgeInterior {
                    edge: id,
                    offset: if reversed {
                        BigRational::one() - offset
                    } else {
                        offset.clone()
                    },
                },
            },
        }
    }

    /// Maps oriented steps, dropping collapsed edges.
    pub fn map_steps<'a>(
        &'a self,
        steps: impl Iterator<Item = (usize, bool)> + 'a,
    ) -> impl Iterator<Item = (usize, bool)> + 'a {
        steps.filter_map(move |(e, rev)| match self.edge_map[e] {
            EdgeImage::Collapsed(_) => None,
            EdgeImage::Edge { id, reversed } => Some((id, rev != reversed)),
        })
    }

    /// Composition: apply `first`, then `self`.
    pub fn compose_after(&self, first: &SimplicialMap) -> SimplicialMap {
        let vertex_map = first
            .vertex_map
            .iter()
            .map(|&v| self.vertex_map[v])
            .collect();
        let edge_map = first
            .edge_map
            .iter()
            .map(|img| match img {
                EdgeImage::Collapsed(v) => EdgeImage::Collapsed(self.vertex_map[*v]),
                EdgeImage::Edge { id, reversed } => match self.edge_map[*id] {
                    EdgeImage::Collapsed(v) => EdgeImage::Collapsed(v),
                    EdgeImage::Edge { id: id2, reversed: r2 } => EdgeImage::Edge {
                        id: id2,
                        reversed: *reversed != r2,
                    },
                },
            })
            .collect();
        SimplicialMap {
            vertex_map,
            edge_map,
        }
    }
}
