//! Exact path-metric queries on metric complexes: all-pairs vertex
//! distances, point-to-point distances with edge-interior endpoints,
//! geodesic trajectories with ambiguity detection, and per-edge extremal
//! distance computations used by ball covers and diameter normalization.

use crate::error::{Error, Result};
use crate::space::{MetricComplex, PointLocation};
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// A geodesic realized as consecutive along-edge segments. Offsets are edge
/// fractions; `from != to` on every segment.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Trajectory {
    pub segs: Vec<(usize, BigRational, BigRational)>,
}

impl Trajectory {
    pub fn length(&self, complex: &MetricComplex) -> BigRational {
        self.segs
            .iter()
            .map(|(e, a, b)| {
                let d = if a <= b { b - a } else { a - b };
                d * &complex.edge(*e).length
            })
            .sum()
    }

    pub fn start(&self, complex: &MetricComplex) -> PointLocation {
        match self.segs.first() {
            Some((e, a, _)) => PointLocation::on_edge(complex, *e, a.clone()),
            None => unreachable!("empty trajectory has no start"),
        }
    }

    pub fn end(&self, complex: &MetricComplex) -> PointLocation {
        match self.segs.last() {
            Some((e, _, b)) => PointLocation::on_edge(complex, *e, b.clone()),
            None => unreachable!("empty trajectory has no end"),
        }
    }

    /// The point at `fraction` of the trajectory's arclength.
    pub fn point_at(&self, complex: &MetricComplex, fraction: &BigRational) -> PointLocation {
        let total = self.length(complex);
        let mut target = fraction * &total;
        for (e, a, b) in &self.segs {
            let len = &complex.edge(*e).length;
            let span = if a <= b { b - a } else { a - b };
            let seg_len = &span * len;
            if target <= seg_len && !seg_len.is_zero() {
                let frac = &target / len;
                let offset = if a <= b { a + &frac } else { a - &frac };
                return PointLocation::on_edge(complex, *e, offset);
            }
            target -= seg_len;
        }
        self.end(complex)
    }
}

impl MetricComplex {
    /// All-pairs shortest vertex distances, computed once.
    pub fn apsp(&self) -> &Vec<Vec<BigRational>> {
        self.apsp_cache.get_or_init(|| {
            (0..self.vertex_count())
                .map(|v| self.dijkstra(v))
                .collect()
        })
    }

    fn dijkstra(&self, source: usize) -> Vec<BigRational> {
        let inf = || -> Option<BigRational> { None };
        let mut dist: Vec<Option<BigRational>> = (0..self.vertex_count()).map(|_| inf()).collect();
        let mut heap: BinaryHeap<Reverse<(BigRational, usize)>> = BinaryHeap::new();
        dist[source] = Some(BigRational::zero());
        heap.push(Reverse((BigRational::zero(), source)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v].as_ref() != Some(&d) {
                continue;
            }
            for &e in self.incident_edges(v) {
                let w = self.opposite(e, v);
                let nd = &d + &self.edge(e).length;
                if dist[w].as_ref().map_or(true, |old| nd < *old) {
                    dist[w] = Some(nd.clone());
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist.into_iter()
            .map(|d| d.expect("complex is connected"))
            .collect()
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> BigRational {
        self.apsp()[u][v].clone()
    }

    /// Endpoints of the carrier of `p` with the along-edge leg to each.
    fn anchors(&self, p: &PointLocation) -> Vec<(usize, BigRational)> {
        match p {
            PointLocation::Vertex(v) => vec![(*v, BigRational::zero())],
            PointLocation::EdgeInterior { edge, offset } => {
                let e = self.edge(*edge);
                vec![
                    (e.u, offset * &e.length),
                    (e.v, (BigRational::one() - offset) * &e.length),
                ]
            }
        }
    }

    /// Exact path-metric distance, with edge-interior endpoints handled
    /// exactly (direct along-edge route plus all endpoint routes).
    pub fn distance(&self, p: &PointLocation, q: &PointLocation) -> BigRational {
        let mut best: Option<BigRational> = None;
        if let (
            PointLocation::EdgeInterior { edge: e1, offset: t1 },
            PointLocation::EdgeInterior { edge: e2, offset: t2 },
        ) = (p, q)
        {
            if e1 == e2 {
                let d = (t1 - t2).abs() * &self.edge(*e1).length;
                best = Some(d);
            }
        }
        for (a, leg_a) in self.anchors(p) {
            for (b, leg_b) in self.anchors(q) {
                let d = &leg_a + &self.apsp()[a][b] + &leg_b;
                if best.as_ref().map_or(true, |x| d < *x) {
                    best = Some(d);
                }
            }
        }
        best.expect("at least one route exists")
    }

    /// Canonical shortest vertex path from `a` to `b`: among tight edges at
    /// each hop, the lowest edge id wins. Returns edge ids in order.
    fn canonical_vertex_path(&self, a: usize, b: usize) -> Vec<usize> {
        let dist_to_b = &self.apsp()[b];
        let mut path = Vec::new();
        let mut cur = a;
        while cur != b {
            let chosen = self
                .incident_edges(cur)
                .iter()
                .copied()
                .find(|&e| {
                    let w = self.opposite(e, cur);
                    &self.edge(e).length + &dist_to_b[w] == dist_to_b[cur]
                })
                .expect("shortest path exists");
            path.push(chosen);
            cur = self.opposite(chosen, cur);
        }
        path
    }

    /// Number of distinct shortest vertex paths from `a` to `b`, saturating
    /// at 2 (all we need is "unique or not").
    fn shortest_path_multiplicity(&self, a: usize, b: usize) -> usize {
        let dist_to_b = &self.apsp()[b];
        // Tight edges form a DAG; process vertices by increasing
        // distance-to-b so predecessors are final.
        let mut order: Vec<usize> = (0..self.vertex_count()).collect();
        order.sort_by(|x, y| dist_to_b[*x].cmp(&dist_to_b[*y]));
        let mut count: Vec<usize> = vec![0; self.vertex_count()];
        count[b] = 1;
        for &v in &order {
            if v == b {
                continue;
            }
            let mut c = 0usize;
            for &e in self.incident_edges(v) {
                let w = self.opposite(e, v);
                if &self.edge(e).length + &dist_to_b[w] == dist_to_b[v] {
                    c = (c + count[w]).min(2);
                }
            }
            count[v] = c;
        }
        count[a]
    }

    /// All geodesic trajectories from `p` to `q` would be expensive to list;
    /// this returns the canonical minimal trajectory together with a flag
    /// telling whether it is the unique geodesic.
    pub fn geodesic(&self, p: &PointLocation, q: &PointLocation) -> (Trajectory, bool) {
        if p == q {
            // Degenerate: represent as an empty stay-put trajectory on a
            // carrier edge of p.
            return (Trajectory { segs: Vec::new() }, true);
        }
        let total = self.distance(p, q);
        let mut candidates: Vec<Trajectory> = Vec::new();
        let mut multiplicity_flag = false;
        if let (
            PointLocation::EdgeInterior { edge: e1, offset: t1 },
            PointLocation::EdgeInterior { edge: e2, offset: t2 },
        ) = (p, q)
        {
            if e1 == e2 && (t1 - t2).abs() * &self.edge(*e1).length == total {
                candidates.push(Trajectory {
                    segs: vec![(*e1, t1.clone(), t2.clone())],
                });
            }
        }
        for (a, leg_a) in self.anchors(p) {
            for (b, leg_b) in self.anchors(q) {
                let route = &leg_a + &self.apsp()[a][b] + &leg_b;
                if route != total {
                    continue;
                }
                if self.shortest_path_multiplicity(a, b) > 1 {
                    multiplicity_flag = true;
                }
                let mut segs: Vec<(usize, BigRational, BigRational)> = Vec::new();
                match p {
                    PointLocation::EdgeInterior { edge, offset } => {
                        let e = self.edge(*edge);
                        let target = if a == e.u {
                            BigRational::zero()
                        } else {
                            BigRational::one()
                        };
                        if *offset != target {
                            segs.push((*edge, offset.clone(), target));
                        }
                    }
                    PointLocation::Vertex(_) => {}
                }
                let mut cur = a;
                for e in self.canonical_vertex_path(a, b) {
                    let edge = self.edge(e);
                    if edge.u == cur {
                        segs.push((e, BigRational::zero(), BigRational::one()));
                        cur = edge.v;
                    } else {
                        segs.push((e, BigRational::one(), BigRational::zero()));
                        cur = edge.u;
                    }
                }
                match q {
                    PointLocation::EdgeInterior { edge, offset } => {
                        let e = self.edge(*edge);
                        let source = if b == e.u {
                            BigRational::zero()
                        } else {
                            BigRational::one()
                        };
                        if *offset != source {
                            segs.push((*edge, source, offset.clone()));
                        }
                    }
                    PointLocation::Vertex(_) => {}
                }
                if !segs.is_empty() {
                    candidates.push(Trajectory { segs });
                }
            }
        }
        candidates.sort();
        candidates.dedup();
        let unique = candidates.len() == 1 && !multiplicity_flag;
        let traj = candidates.into_iter().next().expect("route realizes min");
        (traj, unique)
    }

    /// The unique geodesic from `p` to `q`, or an ambiguity error when two
    /// distinct minimizers exist.
    pub fn geodesic_strict(&self, p: &PointLocation, q: &PointLocation) -> Result<Trajectory> {
        let (traj, unique) = self.geodesic(p, q);
        if unique {
            Ok(traj)
        } else {
            Err(Error::AmbiguousGeodesic(format!("{p:?}"), format!("{q:?}")))
        }
    }

    /// Max over the points of `edge` of the distance to `c`. Exact: the
    /// distance along the edge is the min of finitely many affine/absolute
    /// pieces, so the max sits at a breakpoint.
    pub fn edge_max_distance(&self, edge: usize, c: &PointLocation) -> BigRational {
        let e = self.edge(edge);
        let len = e.length.clone();
        // Lines y = a + b*s over s in [0, len]; distance = min over the
        // "V" pieces, where a V contributes max of its two lines.
        let du = self.distance(&PointLocation::Vertex(e.u), c);
        let dv = self.distance(&PointLocation::Vertex(e.v), c);
        // Routes: leave through u (du + s), leave through v (dv + len - s),
        // and when c sits on this same edge, direct |s - sc|.
        let mut vees: Vec<(BigRational, BigRational)> = vec![
            (du.clone(), BigRational::one()),
            (&dv + &len, -BigRational::one()),
        ];
        if let PointLocation::EdgeInterior { edge: ec, offset } = c {
            if *ec == edge {
                let sc = offset * &len;
                // |s - sc| is the max of (s - sc) and (sc - s); as a route
                // candidate it is itself a min candidate, so split into the
                // two half-lines by evaluating both and keeping their max
                // pointwise. Representing as a pair handled below.
                vees.push((-&sc, BigRational::one()));
                vees.push((sc, -BigRational::one()));
                // The two direct half-lines are only valid on their own
                // sides, where each equals |s - sc| and the other
                // underestimates; taking min with both would be wrong.
                // Handle by evaluating f(s) directly instead (see eval).
            }
        }
        let eval = |s: &BigRational| -> BigRational {
            let x = PointLocation::on_edge(self, edge, s / &len);
            self.distance(&x, c)
        };
        let mut breakpoints: Vec<BigRational> = vec![BigRational::zero(), len.clone()];
        for i in 0..vees.len() {
            for j in (i + 1)..vees.len() {
                let (a1, b1) = &vees[i];
                let (a2, b2) = &vees[j];
                if b1 != b2 {
                    let s = (a2 - a1) / (b1 - b2);
                    if s >= BigRational::zero() && s <= len {
                        breakpoints.push(s);
                    }
                }
            }
        }
        breakpoints
            .iter()
            .map(eval)
            .max()
            .expect("breakpoints nonempty")
    }

    /// Exact diameter of the path metric: max over all edge pairs of the
    /// two-point maximum, solved per pair as a small exact min-of-affine
    /// maximization.
    pub fn diameter(&self) -> BigRational {
        let mut best = BigRational::zero();
        for e in 0..self.edge_count() {
            for f in e..self.edge_count() {
                let d = self.edge_pair_max(e, f);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    /// Cheap upper bound for the diameter: vertex diameter plus the longest
    /// edge. Used to skip the exact computation when normalization is a
    /// no-op.
    pub fn diameter_upper_bound(&self) -> BigRational {
        let apsp = self.apsp();
        let mut vd = BigRational::zero();
        for row in apsp {
            for d in row {
                if *d > vd {
                    vd = d.clone();
                }
            }
        }
        vd + self.max_edge_length()
    }

    fn edge_pair_max(&self, e: usize, f: usize) -> BigRational {
        let le = self.edge(e).length.clone();
        let lf = self.edge(f).length.clone();
        let (eu, ev) = (self.edge(e).u, self.edge(e).v);
        let (fu, fv) = (self.edge(f).u, self.edge(f).v);
        let d = |a: usize, b: usize| self.apsp()[a][b].clone();
        // Affine routes c + bs*s + bt*t over the (s, t) box.
        let one = BigRational::one;
        let routes = |same_side: Option<bool>| -> Vec<(BigRational, BigRational, BigRational)> {
            let mut r = vec![
                (d(eu, fu), one(), one()),
                (&d(eu, fv) + &lf, one(), -one()),
                (&d(ev, fu) + &le, -one(), one()),
                (&d(ev, fv) + &le + &lf, -one(), -one()),
            ];
            if e == f {
                match same_side {
                    // t >= s region: |s - t| = t - s
                    Some(true) => r.push((BigRational::zero(), -one(), one())),
                    // s >= t region
                    Some(false) => r.push((BigRational::zero(), one(), -one())),
                    None => {}
                }
            }
            r
        };
        if e == f {
            let upper = max_min_affine(
                &routes(Some(true)),
                &[
                    (BigRational::zero(), one(), BigRational::zero()), // s >= 0
                    (le.clone(), -one(), BigRational::zero()),         // s <= le
                    (BigRational::zero(), -one(), one()),              // t >= s
                    (lf.clone(), BigRational::zero(), -one()),         // t <= lf
                ],
            );
            let lower = max_min_affine(
                &routes(Some(false)),
                &[
                    (BigRational::zero(), BigRational::zero(), one()), // t >= 0
                    (lf.clone(), BigRational::zero(), -one()),         // t <= lf
                    (BigRational::zero(), one(), -one()),              // s >= t
                    (le.clone(), -one(), BigRational::zero()),         // s <= le
                ],
            );
            upper.max(lower)
        } else {
            max_min_affine(
                &routes(None),
                &[
                    (BigRational::zero(), one(), BigRational::zero()),
                    (le.clone(), -one(), BigRational::zero()),
                    (BigRational::zero(), BigRational::zero(), one()),
                    (lf.clone(), BigRational::zero(), -one()),
                ],
            )
        }
    }
}

/// Maximize min_i (c_i + bs_i*s + bt_i*t) over the polygon
/// {(s,t) : c_j + bs_j*s + bt_j*t >= 0 for all constraints}. The objective
/// is concave piecewise linear, so the max is attained at an intersection of
/// two active lines (objective pieces or constraint boundaries) or at a
/// polygon vertex; we enumerate all pairwise intersections.
fn max_min_affine(
    objective: &[(BigRational, BigRational, BigRational)],
    constraints: &[(BigRational, BigRational, BigRational)],
) -> BigRational {
    let mut lines: Vec<(BigRational, BigRational, BigRational)> = Vec::new();
    // Objective equality lines f_i = f_j.
    for i in 0..objective.len() {
        for j in (i + 1)..objective.len() {
            lines.push((
                &objective[i].0 - &objective[j].0,
                &objective[i].1 - &objective[j].1,
                &objective[i].2 - &objective[j].2,
            ));
        }
    }
    for c in constraints {
        lines.push(c.clone());
    }
    let mut candidates: Vec<(BigRational, BigRational)> = Vec::new();
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            let (c1, a1, b1) = &lines[i];
            let (c2, a2, b2) = &lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.is_zero() {
                continue;
            }
            // Solve a1*s + b1*t = -c1 ; a2*s + b2*t = -c2
            let s = (b1 * c2 - b2 * c1) / &det;
            let t = (a2 * c1 - a1 * c2) / &det;
            candidates.push((s, t));
        }
    }
    let feasible = |s: &BigRational, t: &BigRational| {
        constraints
            .iter()
            .all(|(c, a, b)| c + a * s + b * t >= BigRational::zero())
    };
    let value = |s: &BigRational, t: &BigRational| {
        objective
            .iter()
            .map(|(c, a, b)| c + a * s + b * t)
            .min()
            .expect("objective nonempty")
    };
    candidates
        .into_iter()
        .filter(|(s, t)| feasible(s, t))
        .map(|(s, t)| value(&s, &t))
        .max()
        .unwrap_or_else(BigRational::zero)
}
