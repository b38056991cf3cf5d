//! Finite metric simplicial complexes (2-skeleton) with positive rational
//! edge lengths. Loops and homotopy witnesses live on the 1-skeleton; 2-cells
//! enter only as relators of the edge-path group, so subdivision keeps cells
//! as polygonal boundary chains rather than introducing interior points.

use crate::error::{Error, Result};
use crate::group::Presentation;
use crate::scalar::Scalar;
use crate::space::PointLocation;
use num::rational::BigRational;
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use once_cell::sync::OnceCell;
use serde_json::{json, Value};
use std::path::Path;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: BigRational,
}

/// One oriented traversal of an edge inside a cell boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub edge: usize,
    pub reversed: bool,
}

/// A 2-cell recorded by its boundary edge cycle. Input triangles become
/// 3-step cells; subdivision lengthens the chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub boundary: Vec<Step>,
}

pub struct MetricComplex {
    labels: Option<Vec<String>>,
    vertex_count: usize,
    edges: Vec<Edge>,
    cells: Vec<Cell>,
    basepoint: usize,
    /// Per-vertex incident edges, ascending edge id.
    incident: Vec<Vec<usize>>,
    pub(crate) apsp_cache: OnceCell<Vec<Vec<BigRational>>>,
    pub(crate) systole_cache: OnceCell<Option<BigRational>>,
    pub(crate) presentation_cache: OnceCell<Arc<Presentation>>,
}

impl std::fmt::Debug for MetricComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricComplex")
            .field("vertices", &self.vertex_count)
            .field("edges", &self.edges.len())
            .field("cells", &self.cells.len())
            .field("basepoint", &self.basepoint)
            .finish()
    }
}

impl MetricComplex {
    pub fn new(
        vertex_count: usize,
        edges: Vec<Edge>,
        triangles: Vec<[usize; 3]>,
        basepoint: usize,
    ) -> Result<Self> {
        let cells = triangles
            .iter()
            .map(|t| triangle_cell(&edges, *t))
            .collect::<Result<Vec<_>>>()?;
        Self::with_cells(vertex_count, edges, cells, basepoint, None)
    }

    pub(crate) fn with_cells(
        vertex_count: usize,
        edges: Vec<Edge>,
        cells: Vec<Cell>,
        basepoint: usize,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidComplex("no vertices".into()));
        }
        if basepoint >= vertex_count {
            return Err(Error::InvalidComplex(format!(
                "basepoint {basepoint} out of range"
            )));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(Error::InvalidComplex(format!(
                    "edge {i} references missing vertex"
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidComplex(format!(
                    "edge {i} is a self-loop; model circles with at least two edges"
                )));
            }
            if !e.length.is_positive() {
                return Err(Error::InvalidComplex(format!(
                    "edge {i} has non-positive length"
                )));
            }
        }
        for (i, c) in cells.iter().enumerate() {
            if !cell_is_closed(&edges, c) {
                return Err(Error::InvalidComplex(format!(
                    "cell {i} boundary is not a closed edge cycle"
                )));
            }
        }
        let mut incident = vec![Vec::new(); vertex_count];
        for (id, e) in edges.iter().enumerate() {
            incident[e.u].push(id);
            incident[e.v].push(id);
        }
        let complex = MetricComplex {
            labels,
            vertex_count,
            edges,
            cells,
            basepoint,
            incident,
            apsp_cache: OnceCell::new(),
            systole_cache: OnceCell::new(),
            presentation_cache: OnceCell::new(),
        };
        if !complex.is_connected() {
            return Err(Error::InvalidComplex("1-skeleton is disconnected".into()));
        }
        Ok(complex)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// The endpoint of `edge` other than `v`.
    pub fn opposite(&self, edge: usize, v: usize) -> usize {
        let e = &self.edges[edge];
        if e.u == v {
            e.v
        } else {
            e.u
        }
    }

    pub fn edges_between(&self, u: usize, v: usize) -> Vec<usize> {
        self.incident[u]
            .iter()
            .copied()
            .filter(|&id| self.opposite(id, u) == v)
            .collect()
    }

    pub fn max_edge_length(&self) -> BigRational {
        self.edges
            .iter()
            .map(|e| e.length.clone())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &e in &self.incident[v] {
                let w = self.opposite(e, v);
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    pub fn validate_point(&self, p: &PointLocation) -> Result<()> {
        match p {
            PointLocation::Vertex(v) if *v < self.vertex_count => Ok(()),
            PointLocation::EdgeInterior { edge, offset }
                if *edge < self.edges.len()
                    && offset.is_positive()
                    && *offset < BigRational::one() =>
            {
                Ok(())
            }
            _ => Err(Error::InvalidPoint(format!("{p:?} not on this complex"))),
        }
    }

    /// Rescales every edge length by `factor`.
    pub fn scaled(&self, factor: &BigRational) -> MetricComplex {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                u: e.u,
                v: e.v,
                length: &e.length * factor,
            })
            .collect();
        MetricComplex::with_cells(
            self.vertex_count,
            edges,
            self.cells.clone(),
            self.basepoint,
            self.labels.clone(),
        )
        .expect("rescaling preserves validity")
    }

    /// Splits every edge longer than `max_len` into equal parts. Original
    /// vertices keep their ids; the provenance map carries points both ways.
    pub fn subdivide(&self, max_len: &BigRational) -> (MetricComplex, SubdivisionMap) {
        assert!(max_len.is_positive(), "max edge length must be positive");
        let mut edges: Vec<Edge> = Vec::new();
        let mut new_vertex_on: Vec<PointLocation> =
            (0..self.vertex_count).map(PointLocation::Vertex).collect();
        let mut edge_chains: Vec<Vec<usize>> = Vec::with_capacity(self.edges.len());
        let mut sub_edge_parent: Vec<(usize, usize, usize)> = Vec::new();
        let mut next_vertex = self.vertex_count;
        for (id, e) in self.edges.iter().enumerate() {
            let parts = (&e.length / max_len).ceil().to_integer().max(BigInt::one());
            let parts = parts.to_usize().expect("subdivision count fits usize");
            let part_len = &e.length / BigRational::from_integer(BigInt::from(parts));
            let mut chain = Vec::with_capacity(parts);
            let mut prev = e.u;
            for i in 0..parts {
                let next = if i + 1 == parts {
                    e.v
                } else {
                    let v = next_vertex;
                    next_vertex += 1;
                    new_vertex_on.push(PointLocation::on_edge(
                        self,
                        id,
                        BigRational::new(BigInt::from(i + 1), BigInt::from(parts)),
                    ));
                    v
                };
                chain.push(edges.len());
                sub_edge_parent.push((id, i, parts));
                edges.push(Edge {
                    u: prev,
                    v: next,
                    length: part_len.clone(),
                });
                prev = next;
            }
            edge_chains.push(chain);
        }
        let cells = self
            .cells
            .iter()
            .map(|c| Cell {
                boundary: c
                    .boundary
                    .iter()
                    .flat_map(|s| {
                        let chain = &edge_chains[s.edge];
                        let iter: Vec<Step> = if s.reversed {
                            chain
                                .iter()
                                .rev()
                                .map(|&e| Step {
                                    edge: e,
                                    reversed: true,
                                })
                                .collect()
                        } else {
                            chain
                                .iter()
                                .map(|&e| Step {
                                    edge: e,
                                    reversed: false,
                                })
                                .collect()
                        };
                        iter
                    })
                    .collect(),
            })
            .collect();
        let sub = MetricComplex::with_cells(next_vertex, edges, cells, self.basepoint, None)
            .expect("subdivision preserves validity");
        let map = SubdivisionMap {
            edge_chains,
            new_vertex_on,
            sub_edge_parent,
        };
        (sub, map)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Malformed("complex must be a JSON object".into()))?;
        let (vertex_count, labels) = match obj.get("vertices") {
            Some(Value::Number(n)) => (
                n.as_u64()
                    .ok_or_else(|| Error::Malformed("vertices must be a count".into()))?
                    as usize,
                None,
            ),
            Some(Value::Array(a)) => {
                let labels = a
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .map(String::from)
                            .ok_or_else(|| Error::Malformed("vertex labels must be strings".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (labels.len(), Some(labels))
            }
            _ => return Err(Error::Malformed("missing vertices".into())),
        };
        let edges = obj
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("missing edges".into()))?
            .iter()
            .map(|e| {
                let t = e
                    .as_array()
                    .filter(|t| t.len() == 3)
                    .ok_or_else(|| Error::Malformed("edge must be [u, v, length]".into()))?;
                let u = t[0]
                    .as_u64()
                    .ok_or_else(|| Error::Malformed("edge endpoint must be an index".into()))?
                    as usize;
                let v = t[1]
                    .as_u64()
                    .ok_or_else(|| Error::Malformed("edge endpoint must be an index".into()))?
                    as usize;
                let length = parse_length(&t[2])?;
                Ok(Edge { u, v, length })
            })
            .collect::<Result<Vec<_>>>()?;
        let triangles = match obj.get("triangles") {
            None => Vec::new(),
            Some(Value::Array(a)) => a
                .iter()
                .map(|t| {
                    let t = t
                        .as_array()
                        .filter(|t| t.len() == 3)
                        .ok_or_else(|| Error::Malformed("triangle must be [a, b, c]".into()))?;
                    let mut out = [0usize; 3];
                    for (i, x) in t.iter().enumerate() {
                        out[i] = x
                            .as_u64()
                            .ok_or_else(|| Error::Malformed("triangle vertex index".into()))?
                            as usize;
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(Error::Malformed("triangles must be an array".into())),
        };
        let basepoint = obj
            .get("basepoint")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Malformed("missing basepoint".into()))? as usize;
        let cells = triangles
            .iter()
            .map(|t| triangle_cell(&edges, *t))
            .collect::<Result<Vec<_>>>()?;
        MetricComplex::with_cells(vertex_count, edges, cells, basepoint, labels)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)?;
        Self::from_json_value(&value)
    }

    pub fn to_json_value(&self) -> Value {
        let vertices = match &self.labels {
            Some(l) => json!(l),
            None => json!(self.vertex_count),
        };
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| json!([e.u, e.v, Scalar::exact(e.length.clone()).to_string()]))
            .collect();
        // Cells that are still triangles export in the triangle schema; longer
        // chains have no file representation and are dropped from exports.
        let triangles: Vec<Value> = self
            .cells
            .iter()
            .filter_map(|c| {
                if c.boundary.len() == 3 {
                    let verts = cell_vertices(self, c);
                    Some(json!(verts))
                } else {
                    None
                }
            })
            .collect();
        json!({
            "vertices": vertices,
            "edges": edges,
            "triangles": triangles,
            "basepoint": self.basepoint,
        })
    }
}

fn parse_length(v: &Value) -> Result<BigRational> {
    let s = match v {
        Value::String(s) => Scalar::parse(s)?,
        Value::Number(n) if n.is_i64() => Scalar::from_int(n.as_i64().unwrap()),
        _ => {
            return Err(Error::Malformed(
                "lengths must be decimal strings (or integers)".into(),
            ))
        }
    };
    match s {
        Scalar::Exact(r) => Ok(r),
        Scalar::Approx(_) => Err(Error::Malformed("length did not parse exactly".into())),
    }
}

fn triangle_cell(edges: &[Edge], t: [usize; 3]) -> Result<Cell> {
    let mut boundary = Vec::with_capacity(3);
    for i in 0..3 {
        let (a, b) = (t[i], t[(i + 1) % 3]);
        if a == b {
            return Err(Error::InvalidComplex(format!(
                "triangle {t:?} repeats a vertex"
            )));
        }
        let step = edges
            .iter()
            .enumerate()
            .find_map(|(id, e)| {
                if e.u == a && e.v == b {
                    Some(Step {
                        edge: id,
                        reversed: false,
                    })
                } else if e.u == b && e.v == a {
                    Some(Step {
                        edge: id,
                        reversed: true,
                    })
                } else {
                    None
                }
            })
            .ok_or_else(|| {
                Error::InvalidComplex(format!("triangle {t:?} is missing edge {a}-{b}"))
            })?;
        boundary.push(step);
    }
    Ok(Cell { boundary })
}

fn cell_is_closed(edges: &[Edge], c: &Cell) -> bool {
    if c.boundary.is_empty() {
        return false;
    }
    let start_of = |s: &Step| {
        let e = &edges[s.edge];
        if s.reversed {
            e.v
        } else {
            e.u
        }
    };
    let end_of = |s: &Step| {
        let e = &edges[s.edge];
        if s.reversed {
            e.u
        } else {
            e.v
        }
    };
    for w in c.boundary.windows(2) {
        if end_of(&w[0]) != start_of(&w[1]) {
            return false;
        }
    }
    end_of(c.boundary.last().unwrap()) == start_of(&c.boundary[0])
}

fn cell_vertices(complex: &MetricComplex, c: &Cell) -> Vec<usize> {
    c.boundary
        .iter()
        .map(|s| {
            let e = complex.edge(s.edge);
            if s.reversed {
                e.v
            } else {
                e.u
            }
        })
        .collect()
}

/// Provenance of a subdivision: where new vertices sit on the original
/// complex and how original edges decompose into chains.
pub struct SubdivisionMap {
    /// Original edge id -> ordered sub-edge ids running from u to v.
    pub edge_chains: Vec<Vec<usize>>,
    /// Sub vertex -> location on the original complex.
    pub new_vertex_on: Vec<PointLocation>,
    /// Sub edge -> (original edge, segment index, segment count).
    pub sub_edge_parent: Vec<(usize, usize, usize)>,
}

impl SubdivisionMap {
    pub fn point_to_sub(&self, sub: &MetricComplex, p: &PointLocation) -> PointLocation {
        match p {
            PointLocation::Vertex(v) => PointLocation::Vertex(*v),
            PointLocation::EdgeInterior { edge, offset } => {
                let chain = &self.edge_chains[*edge];
                let n = chain.len();
                let scaled = offset * BigRational::from_integer(BigInt::from(n));
                let idx = scaled.floor().to_integer().to_usize().unwrap().min(n - 1);
                let local = &scaled - BigRational::from_integer(BigInt::from(idx));
                PointLocation::on_edge(sub, chain[idx], local)
            }
        }
    }

    pub fn point_to_orig(&self, p: &PointLocation) -> PointLocation {
        match p {
            PointLocation::Vertex(v) => self.new_vertex_on[*v].clone(),
            PointLocation::EdgeInterior { edge, offset } => {
                let (orig, idx, n) = self.sub_edge_parent[*edge];
                let offset = (BigRational::from_integer(BigInt::from(idx)) + offset)
                    / BigRational::from_integer(BigInt::from(n));
                PointLocation::EdgeInterior { edge: orig, offset }
            }
        }
    }
}
