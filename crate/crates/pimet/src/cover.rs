//! Open covers of metric complexes, nerves, combinatorial canonical maps,
//! induced homomorphisms, and Spanier-generator sampling.
//!
//! Covers carry their own carrier complex (a subdivision of the space they
//! were built on, with provenance) and a metric context: the carrier path
//! metric, or the weighted product metric of a truncated inverse limit.
//! Intersection tests on the path metric are exact; product-metric tests
//! are conservative (sound for element containment, which is all the limit
//! workflows need).

use crate::error::{Error, Result};
use crate::group::{edge_crossings, Homomorphism, Triviality, Word};
use crate::limitsys::InverseSystem;
use crate::space::{MetricComplex, PointLocation, SimplicialMap, SubdivisionMap};
use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::sync::Arc;

#[derive(Clone)]
pub enum CoverMetric {
    Path,
    Limit(Arc<InverseSystem>),
}

#[derive(Clone, Debug)]
pub enum CoverElement {
    Ball {
        center: PointLocation,
        radius: BigRational,
    },
    /// Union of open vertex stars of the carrier.
    StarUnion { vertices: Vec<usize> },
}

pub struct Cover {
    carrier: Arc<MetricComplex>,
    /// Set when the carrier is a subdivision of the complex the cover was
    /// requested on; words and homomorphisms are reported over the original.
    provenance: Option<(Arc<MetricComplex>, Arc<SubdivisionMap>)>,
    metric: CoverMetric,
    elements: Vec<CoverElement>,
    distinguished: usize,
}

impl std::fmt::Debug for Cover {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cover")
            .field("elements", &self.elements.len())
            .field("distinguished", &self.distinguished)
            .finish()
    }
}

impl Cover {
    pub fn new(
        carrier: Arc<MetricComplex>,
        metric: CoverMetric,
        elements: Vec<CoverElement>,
        distinguished: usize,
    ) -> Result<Cover> {
        if elements.is_empty() || distinguished >= elements.len() {
            return Err(Error::InvalidCover("missing or bad distinguished element".into()));
        }
        let cover = Cover {
            carrier,
            provenance: None,
            metric,
            elements,
            distinguished,
        };
        let base = PointLocation::Vertex(cover.carrier.basepoint());
        if !cover.point_in_element(cover.distinguished, &base) {
            return Err(Error::InvalidCover(
                "distinguished element does not contain the basepoint".into(),
            ));
        }
        cover.certify_coverage()?;
        Ok(cover)
    }

    /// For covers whose construction already implies coverage (balls of
    /// radius r at every vertex of a mesh <= r/2 subdivision put every
    /// point within r/4 of a center). Skips the sampling certificate.
    fn new_covering_by_construction(
        carrier: Arc<MetricComplex>,
        metric: CoverMetric,
        elements: Vec<CoverElement>,
        distinguished: usize,
    ) -> Result<Cover> {
        let cover = Cover {
            carrier,
            provenance: None,
            metric,
            elements,
            distinguished,
        };
        let base = PointLocation::Vertex(cover.carrier.basepoint());
        if !cover.point_in_element(cover.distinguished, &base) {
            return Err(Error::InvalidCover(
                "distinguished element does not contain the basepoint".into(),
            ));
        }
        Ok(cover)
    }

    pub fn carrier(&self) -> &Arc<MetricComplex> {
        &self.carrier
    }

    /// The complex over which words and homomorphisms are reported.
    pub fn original(&self) -> &Arc<MetricComplex> {
        self.provenance.as_ref().map(|(o, _)| o).unwrap_or(&self.carrier)
    }

    pub fn elements(&self) -> &[CoverElement] {
        &self.elements
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn metric(&self) -> &CoverMetric {
        &self.metric
    }

    fn dist(&self, p: &PointLocation, q: &PointLocation) -> BigRational {
        match &self.metric {
            CoverMetric::Path => self.carrier.distance(p, q),
            CoverMetric::Limit(sys) => sys.limit_distance_points(p, q),
        }
    }

    /// Weighted length of one carrier edge in the cover metric.
    fn edge_metric_length(&self, e: usize) -> BigRational {
        match &self.metric {
            CoverMetric::Path => self.carrier.edge(e).length.clone(),
            CoverMetric::Limit(sys) => {
                let traj = crate::space::Trajectory {
                    segs: vec![(e, BigRational::zero(), BigRational::one())],
                };
                sys.weighted_trajectory_length(&traj)
            }
        }
    }

    pub fn point_in_element(&self, elem: usize, p: &PointLocation) -> bool {
        match &self.elements[elem] {
            CoverElement::Ball { center, radius } => &self.dist(center, p) < radius,
            CoverElement::StarUnion { vertices } => match p {
                PointLocation::Vertex(v) => vertices.contains(v),
                PointLocation::EdgeInterior { edge, .. } => {
                    let e = self.carrier.edge(*edge);
                    vertices.contains(&e.u) || vertices.contains(&e.v)
                }
            },
        }
    }

    /// Certified containment of a whole closed carrier edge in an element.
    /// Exact on the path metric; conservative on the product metric.
    pub fn edge_in_element(&self, elem: usize, e: usize) -> bool {
        match &self.elements[elem] {
            CoverElement::Ball { center, radius } => match &self.metric {
                CoverMetric::Path => &self.carrier.edge_max_distance(e, center) < radius,
                CoverMetric::Limit(_) => {
                    let edge = self.carrier.edge(e);
                    let du = self.dist(&PointLocation::Vertex(edge.u), center);
                    let dv = self.dist(&PointLocation::Vertex(edge.v), center);
                    let len = self.edge_metric_length(e);
                    let two = BigRational::from_integer(BigInt::from(2));
                    &((du + dv + len) / two) < radius
                }
            },
            CoverElement::StarUnion { vertices } => {
                let edge = self.carrier.edge(e);
                vertices.contains(&edge.u) && vertices.contains(&edge.v)
            }
        }
    }

    /// Coverage certificate: on a subdivision fine enough for the ball
    /// radii, every vertex is covered with slack at least half the local
    /// mesh, which covers all interior points by the triangle inequality.
    fn certify_coverage(&self) -> Result<()> {
        let min_radius = self
            .elements
            .iter()
            .filter_map(|e| match e {
                CoverElement::Ball { radius, .. } => Some(radius.clone()),
                CoverElement::StarUnion { .. } => None,
            })
            .min();
        let target = match min_radius {
            Some(r) => r / BigRational::from_integer(BigInt::from(2)),
            // Star-unions only: stars cover iff every vertex is in a set.
            None => {
                for v in 0..self.carrier.vertex_count() {
                    if !(0..self.elements.len())
                        .any(|i| self.point_in_element(i, &PointLocation::Vertex(v)))
                    {
                        return Err(Error::InvalidCover(format!("vertex {v} is uncovered")));
                    }
                }
                return Ok(());
            }
        };
        let (sub, prov) = self.carrier.subdivide(&target);
        let slack = sub.max_edge_length() / BigRational::from_integer(BigInt::from(2));
        for v in 0..sub.vertex_count() {
            let on_carrier = prov.point_to_orig(&PointLocation::Vertex(v));
            let covered = self.elements.iter().enumerate().any(|(i, elem)| match elem {
                CoverElement::Ball { center, radius } => {
                    self.dist(center, &on_carrier) + &slack < *radius
                }
                CoverElement::StarUnion { .. } => self.point_in_element(i, &on_carrier),
            });
            if !covered {
                return Err(Error::InvalidCover(format!(
                    "point {on_carrier:?} is not covered with certified slack"
                )));
            }
        }
        Ok(())
    }

    pub fn from_json_value(
        carrier: Arc<MetricComplex>,
        metric: CoverMetric,
        value: &Value,
    ) -> Result<Cover> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Malformed("cover must be a JSON object".into()))?;
        let mut elements = Vec::new();
        if let Some(balls) = obj.get("balls") {
            for b in balls
                .as_array()
                .ok_or_else(|| Error::Malformed("balls must be a list".into()))?
            {
                let center = parse_point(&carrier, b.get("center"))?;
                let radius = match b.get("radius") {
                    Some(Value::String(s)) => match crate::scalar::Scalar::parse(s)? {
                        crate::scalar::Scalar::Exact(r) => r,
                        _ => return Err(Error::Malformed("radius must be exact".into())),
                    },
                    _ => return Err(Error::Malformed("ball needs a radius string".into())),
                };
                if !radius.is_positive() {
                    return Err(Error::Malformed("radius must be positive".into()));
                }
                elements.push(CoverElement::Ball { center, radius });
            }
        }
        if let Some(stars) = obj.get("stars") {
            for s in stars
                .as_array()
                .ok_or_else(|| Error::Malformed("stars must be a list".into()))?
            {
                let vertices = s
                    .as_array()
                    .ok_or_else(|| Error::Malformed("star must list vertices".into()))?
                    .iter()
                    .map(|v| {
                        v.as_u64()
                            .map(|v| v as usize)
                            .ok_or_else(|| Error::Malformed("star vertex".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                elements.push(CoverElement::StarUnion { vertices });
            }
        }
        let distinguished = obj
            .get("distinguished")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Malformed("missing distinguished".into()))?
            as usize;
        Cover::new(carrier, metric, elements, distinguished)
    }

    pub fn to_json_value(&self) -> Value {
        let balls: Vec<Value> = self
            .elements
            .iter()
            .filter_map(|e| match e {
                CoverElement::Ball { center, radius } => Some(json!({
                    "center": point_json(center),
                    "radius": crate::scalar::Scalar::exact(radius.clone()).to_string(),
                })),
                CoverElement::StarUnion { .. } => None,
            })
            .collect();
        json!({ "balls": balls, "distinguished": self.distinguished })
    }
}

fn parse_point(carrier: &MetricComplex, v: Option<&Value>) -> Result<PointLocation> {
    let v = v.ok_or_else(|| Error::Malformed("missing center".into()))?;
    if let Some(vertex) = v.as_u64() {
        return Ok(PointLocation::Vertex(vertex as usize));
    }
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Malformed("point must be a vertex index or object".into()))?;
    if let Some(vertex) = obj.get("vertex").and_then(Value::as_u64) {
        return Ok(PointLocation::Vertex(vertex as usize));
    }
    let edge = obj
        .get("edge")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Malformed("point needs vertex or edge".into()))? as usize;
    let offset = match obj.get("offset") {
        Some(Value::String(s)) => match crate::scalar::Scalar::parse(s)? {
            crate::scalar::Scalar::Exact(r) => r,
            _ => return Err(Error::Malformed("offset must be exact".into())),
        },
        _ => return Err(Error::Malformed("point needs an offset string".into())),
    };
    Ok(PointLocation::on_edge(carrier, edge, offset))
}

fn point_json(p: &PointLocation) -> Value {
    match p {
        PointLocation::Vertex(v) => json!({ "vertex": v }),
        PointLocation::EdgeInterior { edge, offset } => json!({
            "edge": edge,
            "offset": crate::scalar::Scalar::exact(offset.clone()).to_string(),
        }),
    }
}

/// Cover by open balls of the given radius centered at every vertex of a
/// mesh <= radius/2 subdivision; the distinguished element is the ball at
/// the basepoint.
pub fn ball_cover(
    complex: &Arc<MetricComplex>,
    radius: &BigRational,
    metric: CoverMetric,
) -> Result<Cover> {
    if !radius.is_positive() {
        return Err(Error::InvalidCover("radius must be positive".into()));
    }
    let target = radius / BigRational::from_integer(BigInt::from(2));
    let (sub, prov) = complex.subdivide(&target);
    let sub = Arc::new(sub);
    let elements: Vec<CoverElement> = (0..sub.vertex_count())
        .map(|v| CoverElement::Ball {
            center: PointLocation::Vertex(v),
            radius: radius.clone(),
        })
        .collect();
    // Original vertices keep their ids under subdivision, so the ball at
    // the basepoint has the basepoint's index.
    let distinguished = sub.basepoint();
    let mut cover = Cover::new_covering_by_construction(sub, metric, elements, distinguished)?;
    cover.provenance = Some((complex.clone(), Arc::new(prov)));
    Ok(cover)
}

/// Exact open-interval representation of where an element meets one carrier
/// edge (interior only; vertices are tested separately). Path metric only.
fn element_intervals_on_edge(
    cover: &Cover,
    elem: usize,
    e: usize,
) -> Vec<(BigRational, BigRational)> {
    let edge = cover.carrier.edge(e);
    let len = edge.length.clone();
    match &cover.elements[elem] {
        CoverElement::StarUnion { vertices } => {
            if vertices.contains(&edge.u) || vertices.contains(&edge.v) {
                vec![(BigRational::zero(), len)]
            } else {
                Vec::new()
            }
        }
        CoverElement::Ball { center, radius } => {
            let mut out = Vec::new();
            let du = cover.carrier.distance(&PointLocation::Vertex(edge.u), center);
            let dv = cover.carrier.distance(&PointLocation::Vertex(edge.v), center);
            // Routes through u: d(s) = du + s < r on [0, r - du).
            if &du < radius {
                out.push((BigRational::zero(), (radius - &du).min(len.clone())));
            }
            // Routes through v: d(s) = dv + len - s < r on (len - (r - dv), len].
            if &dv < radius {
                out.push(((&len - (radius - &dv)).max(BigRational::zero()), len.clone()));
            }
            // Direct route when the center sits on this edge.
            if let PointLocation::EdgeInterior { edge: ec, offset } = center {
                if *ec == e {
                    let sc = offset * &len;
                    out.push(((&sc - radius).max(BigRational::zero()), (&sc + radius).min(len)));
                }
            }
            merge_intervals(out)
        }
    }
}

fn merge_intervals(mut intervals: Vec<(BigRational, BigRational)>) -> Vec<(BigRational, BigRational)> {
    intervals.retain(|(a, b)| a < b);
    intervals.sort();
    let mut out: Vec<(BigRational, BigRational)> = Vec::new();
    for (a, b) in intervals {
        if let Some(last) = out.last_mut() {
            if a <= last.1 {
                if b > last.1 {
                    last.1 = b;
                }
                continue;
            }
        }
        out.push((a, b));
    }
    out
}

fn intersect_interval_lists(
    a: &[(BigRational, BigRational)],
    b: &[(BigRational, BigRational)],
) -> Vec<(BigRational, BigRational)> {
    let mut out = Vec::new();
    for (a1, a2) in a {
        for (b1, b2) in b {
            let lo = a1.max(b1).clone();
            let hi = a2.min(b2).clone();
            if lo < hi {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// Do the given elements have a common point? Exact on the path metric:
/// vertices are tested directly and edge interiors through exact open
/// interval arithmetic.
pub fn elements_intersect(cover: &Cover, elems: &[usize]) -> Result<bool> {
    if matches!(cover.metric, CoverMetric::Limit(_)) {
        return Err(Error::InvalidCover(
            "nerve intersection tests need the path metric".into(),
        ));
    }
    for v in 0..cover.carrier.vertex_count() {
        let p = PointLocation::Vertex(v);
        if elems.iter().all(|&i| cover.point_in_element(i, &p)) {
            return Ok(true);
        }
    }
    for e in 0..cover.carrier.edge_count() {
        let mut common = vec![(
            BigRational::zero(),
            cover.carrier.edge(e).length.clone(),
        )];
        for &i in elems {
            let ints = element_intervals_on_edge(cover, i, e);
            common = intersect_interval_lists(&common, &ints);
            if common.is_empty() {
                break;
            }
        }
        if !common.is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The nerve with 2-skeleton: one vertex per element, an edge per
/// intersecting pair, a triangle per intersecting triple. Unit edge
/// lengths; the distinguished element is the basepoint.
pub fn nerve(cover: &Cover) -> Result<Arc<MetricComplex>> {
    let n = cover.elements.len();
    let mut edges = Vec::new();
    let mut pair_edge = std::collections::BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if elements_intersect(cover, &[i, j])? {
                pair_edge.insert((i, j), edges.len());
                edges.push(crate::space::Edge {
                    u: i,
                    v: j,
                    length: BigRational::one(),
                });
            }
        }
    }
    let mut triangles = Vec::new();
    let pairs: Vec<(usize, usize)> = pair_edge.keys().copied().collect();
    for &(i, j) in &pairs {
        for k in (j + 1)..n {
            if pair_edge.contains_key(&(i, k))
                && pair_edge.contains_key(&(j, k))
                && elements_intersect(cover, &[i, j, k])?
            {
                triangles.push([i, j, k]);
            }
        }
    }
    Ok(Arc::new(MetricComplex::new(
        n,
        edges,
        triangles,
        cover.distinguished,
    )?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    Lowest,
    Highest,
}

/// A combinatorial canonical map: a subdivision of the carrier fine enough
/// that every closed vertex star fits in an element, together with the
/// simplicial map to the nerve choosing a containing element per vertex.
pub struct CanonicalMap {
    pub sub: Arc<MetricComplex>,
    pub sub_provenance: SubdivisionMap,
    pub nerve: Arc<MetricComplex>,
    pub map: SimplicialMap,
}

const MAX_REFINEMENT_ROUNDS: usize = 12;

pub fn canonical_map(cover: &Cover, tie_break: TieBreak) -> Result<CanonicalMap> {
    if matches!(cover.metric, CoverMetric::Limit(_)) {
        return Err(Error::InvalidCover(
            "canonical maps need the path metric".into(),
        ));
    }
    let nerve_complex = nerve(cover)?;
    let mut target = cover
        .elements
        .iter()
        .filter_map(|e| match e {
            CoverElement::Ball { radius, .. } => Some(radius.clone()),
            CoverElement::StarUnion { .. } => None,
        })
        .min()
        .unwrap_or_else(|| cover.carrier.max_edge_length())
        / BigRational::from_integer(BigInt::from(2));
    for _round in 0..MAX_REFINEMENT_ROUNDS {
        let (sub, prov) = cover.carrier.subdivide(&target);
        let sub = Arc::new(sub);
        if let Some(vmap) = try_star_assignment(cover, &sub, &prov, tie_break) {
            let map = SimplicialMap::from_vertex_map(&sub, &nerve_complex, vmap)?;
            return Ok(CanonicalMap {
                sub: sub.clone(),
                sub_provenance: prov,
                nerve: nerve_complex,
                map,
            });
        }
        target = target / BigRational::from_integer(BigInt::from(2));
    }
    Err(Error::RefinementFailure(MAX_REFINEMENT_ROUNDS))
}

/// Assigns to each subdivision vertex an element containing its closed
/// star; the basepoint must take the distinguished element.
fn try_star_assignment(
    cover: &Cover,
    sub: &Arc<MetricComplex>,
    prov: &SubdivisionMap,
    tie_break: TieBreak,
) -> Option<Vec<usize>> {
    let n = cover.elements.len();
    let mut vmap = Vec::with_capacity(sub.vertex_count());
    for v in 0..sub.vertex_count() {
        let candidates: Vec<usize> = (0..n)
            .filter(|&i| {
                sub.incident_edges(v).iter().all(|&se| {
                    let (orig_edge, idx, parts) = prov.sub_edge_parent[se];
                    let lo = BigRational::new(BigInt::from(idx), BigInt::from(parts));
                    let hi = BigRational::new(BigInt::from(idx + 1), BigInt::from(parts));
                    segment_in_element(cover, i, orig_edge, &lo, &hi)
                })
            })
            .collect();
        let choice = if v == sub.basepoint() {
            if candidates.contains(&cover.distinguished) {
                Some(cover.distinguished)
            } else {
                None
            }
        } else {
            match tie_break {
                TieBreak::Lowest => candidates.first().copied(),
                TieBreak::Highest => candidates.last().copied(),
            }
        };
        match choice {
            Some(c) => vmap.push(c),
            None => return None,
        }
    }
    Some(vmap)
}

/// Certified containment of a closed along-edge segment (offsets of the
/// original carrier edge) in an element. Path metric, exact.
fn segment_in_element(
    cover: &Cover,
    elem: usize,
    edge: usize,
    lo: &BigRational,
    hi: &BigRational,
) -> bool {
    let e = cover.carrier.edge(edge);
    match &cover.elements[elem] {
        CoverElement::StarUnion { vertices } => {
            let u_ok = !lo.is_zero() || vertices.contains(&e.u);
            let v_ok = !hi.is_one() || vertices.contains(&e.v);
            let interior_ok = vertices.contains(&e.u) || vertices.contains(&e.v);
            u_ok && v_ok && interior_ok
        }
        CoverElement::Ball { center, radius } => {
            let len = &e.length;
            let (slo, shi) = (lo * len, hi * len);
            let du = cover.carrier.distance(&PointLocation::Vertex(e.u), center);
            let dv = cover.carrier.distance(&PointLocation::Vertex(e.v), center);
            // The distance function along the edge is a min of V-shaped
            // pieces, so its max over [slo, shi] is attained at an endpoint
            // or at a crossing of the pieces; sample all of them.
            let eval = |s: &BigRational| -> BigRational {
                let p = PointLocation::on_edge(cover.carrier(), edge, s / len);
                cover.carrier.distance(&p, center)
            };
            let mut candidates = vec![slo.clone(), shi.clone()];
            let mut lines: Vec<(BigRational, BigRational)> = vec![
                (du, BigRational::one()),
                (&dv + len, -BigRational::one()),
            ];
            if let PointLocation::EdgeInterior { edge: ec, offset } = center {
                if *ec == edge {
                    let sc = offset * len;
                    lines.push((-&sc, BigRational::one()));
                    lines.push((sc, -BigRational::one()));
                }
            }
            for i in 0..lines.len() {
                for j in (i + 1)..lines.len() {
                    let (a1, b1) = &lines[i];
                    let (a2, b2) = &lines[j];
                    if b1 != b2 {
                        let s = (a2 - a1) / (b1 - b2);
                        if s > slo && s < shi {
                            candidates.push(s);
                        }
                    }
                }
            }
            candidates.iter().map(eval).max().map_or(false, |m| &m < radius)
        }
    }
}

/// The induced homomorphism of the canonical map, reported from the
/// original complex's presentation to the nerve's.
pub fn p_sharp(cover: &Cover, canonical: &CanonicalMap) -> Result<Homomorphism> {
    let orig = cover.original();
    let orig_pres = orig.presentation();
    let nerve_pres = canonical.nerve.presentation();
    // Original generator loop -> carrier steps -> subdivision steps ->
    // nerve steps.
    let carrier_chains: Option<&Arc<SubdivisionMap>> =
        cover.provenance.as_ref().map(|(_, m)| m);
    let lift_to_sub = |steps: Vec<(usize, bool)>| -> Vec<(usize, bool)> {
        let carrier_steps: Vec<(usize, bool)> = match carrier_chains {
            None => steps,
            Some(m) => steps
                .into_iter()
                .flat_map(|(e, rev)| {
                    let chain = &m.edge_chains[e];
                    let out: Vec<(usize, bool)> = if rev {
                        chain.iter().rev().map(|&s| (s, true)).collect()
                    } else {
                        chain.iter().map(|&s| (s, false)).collect()
                    };
                    out
                })
                .collect(),
        };
        carrier_steps
            .into_iter()
            .flat_map(|(e, rev)| {
                let chain = &canonical.sub_provenance.edge_chains[e];
                let out: Vec<(usize, bool)> = if rev {
                    chain.iter().rev().map(|&s| (s, true)).collect()
                } else {
                    chain.iter().map(|&s| (s, false)).collect()
                };
                out
            })
            .collect()
    };
    let images: Vec<Word> = (0..orig_pres.generator_count())
        .map(|g| {
            let steps = orig_pres.generator_loop_steps(orig, g);
            let sub_steps = lift_to_sub(steps);
            nerve_pres.word_of_steps(canonical.map.map_steps(sub_steps.into_iter()))
        })
        .collect();
    let hom = Homomorphism::new(images);
    let mut obligations = Vec::new();
    for r in orig_pres.relators() {
        let img = hom.apply(r);
        match nerve_pres.is_trivial(&img) {
            Triviality::Trivial => {}
            _ => obligations.push(img),
        }
    }
    Ok(hom.with_obligations(obligations))
}

/// Pseudorandom generators of the Spanier group Span(U, x0): a loop inside
/// one element, conjugated back to the basepoint, reported as a reduced
/// word over the original complex. Deterministic per seed.
pub fn spanier_generators(
    cover: &Cover,
    seed: u64,
    count: usize,
    max_loop_edges: usize,
) -> Result<Vec<Word>> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let carrier = cover.carrier();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let elem = rng.gen_range(0..cover.elements.len());
        // Subcomplex of carrier edges certified inside the element.
        let inside: Vec<usize> = (0..carrier.edge_count())
            .filter(|&e| cover.edge_in_element(elem, e))
            .collect();
        if inside.is_empty() {
            out.push(Word::identity());
            continue;
        }
        let mut adjacency: std::collections::BTreeMap<usize, Vec<usize>> =
            std::collections::BTreeMap::new();
        for &e in &inside {
            let edge = carrier.edge(e);
            adjacency.entry(edge.u).or_default().push(e);
            adjacency.entry(edge.v).or_default().push(e);
        }
        let vertices: Vec<usize> = adjacency.keys().copied().collect();
        let y = vertices[rng.gen_range(0..vertices.len())];
        // Random walk inside the subcomplex, then close up by walking the
        // same tree of steps back.
        let walk_len = rng.gen_range(1..=max_loop_edges.max(1));
        let mut steps: Vec<(usize, bool)> = Vec::new();
        let mut cur = y;
        for _ in 0..walk_len {
            let options = &adjacency[&cur];
            let e = options[rng.gen_range(0..options.len())];
            let edge = carrier.edge(e);
            let rev = edge.u != cur;
            steps.push((e, rev));
            cur = carrier.opposite(e, cur);
        }
        // Close via the reversed walk prefix only when needed; a shortest
        // path inside the subcomplex keeps loops interesting when the walk
        // already returned to y.
        if cur != y {
            let back = subcomplex_path(carrier, &adjacency, cur, y);
            match back {
                Some(path) => steps.extend(path),
                None => {
                    // Disconnected fallback; retrace.
                    let retrace: Vec<(usize, bool)> =
                        steps.iter().rev().map(|&(e, r)| (e, !r)).collect();
                    steps.extend(retrace);
                }
            }
        }
        // Conjugate back to the basepoint through the carrier tree.
        let pres = carrier.presentation();
        let gamma = pres.tree_path(carrier, carrier.basepoint(), y);
        let mut loop_steps = gamma.clone();
        loop_steps.extend(steps);
        loop_steps.extend(gamma.into_iter().rev().map(|(e, r)| (e, !r)));
        out.push(self::carrier_word_on_original(cover, &loop_steps));
    }
    Ok(out)
}

/// BFS path between subcomplex vertices using only subcomplex edges.
fn subcomplex_path(
    carrier: &MetricComplex,
    adjacency: &std::collections::BTreeMap<usize, Vec<usize>>,
    from: usize,
    to: usize,
) -> Option<Vec<(usize, bool)>> {
    let mut prev: std::collections::BTreeMap<usize, (usize, usize)> =
        std::collections::BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &e in adjacency.get(&v).into_iter().flatten() {
            let w = carrier.opposite(e, v);
            if w != from && !prev.contains_key(&w) {
                prev.insert(w, (v, e));
                queue.push_back(w);
            }
        }
    }
    if to != from && !prev.contains_key(&to) {
        return None;
    }
    let mut steps = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, e) = prev[&cur];
        steps.push((e, carrier.edge(e).u != p));
        cur = p;
    }
    steps.reverse();
    Some(steps)
}

/// Word of a closed carrier edge path over the original complex (through
/// subdivision provenance when present).
fn carrier_word_on_original(cover: &Cover, steps: &[(usize, bool)]) -> Word {
    match &cover.provenance {
        None => cover
            .carrier
            .presentation()
            .word_of_steps(steps.iter().copied()),
        Some((orig, prov)) => {
            let segs = steps.iter().map(|&(e, rev)| {
                let (oe, idx, parts) = prov.sub_edge_parent[e];
                let lo = BigRational::new(BigInt::from(idx), BigInt::from(parts));
                let hi = BigRational::new(BigInt::from(idx + 1), BigInt::from(parts));
                if rev {
                    (oe, hi, lo)
                } else {
                    (oe, lo, hi)
                }
            });
            let crossings = edge_crossings(segs);
            orig.presentation().word_of_steps(crossings.into_iter())
        }
    }
}

/// A nerve-level projection between two covers of the same space: each fine
/// element is sent to a coarse element certified to contain it.
pub fn refinement_map(fine: &Cover, coarse: &Cover) -> Result<SimplicialMap> {
    let fine_nerve = nerve(fine)?;
    let coarse_nerve = nerve(coarse)?;
    let mut vmap = Vec::with_capacity(fine.elements.len());
    for (i, f) in fine.elements.iter().enumerate() {
        let container = (0..coarse.elements.len()).find(|&j| {
            let prefer = if i == fine.distinguished {
                j == coarse.distinguished
            } else {
                true
            };
            prefer && element_contains_element(coarse, j, fine, f)
        });
        match container {
            Some(j) => vmap.push(j),
            None => {
                return Err(Error::InvalidCover(format!(
                    "element {i} of the fine cover fits in no coarse element"
                )))
            }
        }
    }
    SimplicialMap::from_vertex_map(&fine_nerve, &coarse_nerve, vmap)
}

/// Certified containment of a fine element in a coarse element (sufficient
/// conditions only, which is what refinement witnesses need).
fn element_contains_element(
    coarse: &Cover,
    j: usize,
    fine: &Cover,
    f: &CoverElement,
) -> bool {
    match (&coarse.elements[j], f) {
        (
            CoverElement::Ball { center: c2, radius: r2 },
            CoverElement::Ball { center: c1, radius: r1 },
        ) => coarse.dist(c2, c1) + r1 <= *r2,
        (CoverElement::StarUnion { vertices: big }, CoverElement::StarUnion { vertices }) => {
            // Every star of the fine set must fit: its vertex and all
            // incident edges' far endpoints must lie in the big set.
            vertices.iter().all(|v| {
                big.contains(v)
                    && fine
                        .carrier()
                        .incident_edges(*v)
                        .iter()
                        .all(|&e| big.contains(&fine.carrier().opposite(e, *v)))
            })
        }
        _ => false,
    }
}

