//! Builders for the stock test and demo spaces.

use crate::space::{Edge, MetricComplex, SimplicialMap};
use num::rational::BigRational;
use num::{BigInt, FromPrimitive};

/// A circle of given circumference as a cycle of `segments >= 2` equal
/// edges. Vertex 0 is the basepoint.
pub fn circle(circumference: BigRational, segments: usize) -> MetricComplex {
    assert!(segments >= 2, "a circle needs at least two edges");
    let len = &circumference / BigRational::from_integer(BigInt::from(segments));
    let edges = (0..segments)
        .map(|i| Edge {
            u: i,
            v: (i + 1) % segments,
            length: len.clone(),
        })
        .collect();
    MetricComplex::new(segments, edges, Vec::new(), 0).expect("valid circle")
}

/// A wedge of circles joined at vertex 0. Circle `j` occupies edges
/// `j*segments .. (j+1)*segments` and its interior vertices follow in order.
pub fn wedge_of_circles(circumferences: &[BigRational], segments: usize) -> MetricComplex {
    assert!(segments >= 2);
    let mut edges = Vec::new();
    let mut next_vertex = 1usize;
    for circ in circumferences {
        let len = circ / BigRational::from_integer(BigInt::from(segments));
        let mut prev = 0usize;
        for s in 0..segments {
            let next = if s + 1 == segments {
                0
            } else {
                let v = next_vertex;
                next_vertex += 1;
                v
            };
            edges.push(Edge {
                u: prev,
                v: next,
                length: len.clone(),
            });
            prev = next;
        }
    }
    MetricComplex::new(next_vertex, edges, Vec::new(), 0).expect("valid wedge")
}

/// The simplicial collapse of selected circles of a `wedge_of_circles`
/// complex onto the basepoint (a retraction).
pub fn collapse_circles(
    wedge: &MetricComplex,
    segments: usize,
    collapse: &[usize],
) -> SimplicialMap {
    let mut vmap: Vec<usize> = (0..wedge.vertex_count()).collect();
    for &j in collapse {
        for s in 0..segments.saturating_sub(1) {
            vmap[1 + j * (segments - 1) + s] = wedge.basepoint();
        }
    }
    SimplicialMap::from_vertex_map(wedge, wedge, vmap).expect("collapse is simplicial")
}

/// A star tree: basepoint 0 with `leaves` unit edges.
pub fn star_tree(leaves: usize) -> MetricComplex {
    let edges = (0..leaves)
        .map(|i| Edge {
            u: 0,
            v: i + 1,
            length: BigRational::from_integer(BigInt::from(1)),
        })
        .collect();
    MetricComplex::new(leaves + 1, edges, Vec::new(), 0).expect("valid tree")
}

/// A unit triangle with its 2-cell filled: trivial fundamental group.
pub fn filled_triangle() -> MetricComplex {
    let one = || BigRational::from_integer(BigInt::from(1));
    let edges = vec![
        Edge { u: 0, v: 1, length: one() },
        Edge { u: 1, v: 2, length: one() },
        Edge { u: 2, v: 0, length: one() },
    ];
    MetricComplex::new(3, edges, vec![[0, 1, 2]], 0).expect("valid triangle")
}

/// A triangulated tube: `axial_lengths.len()` bands over a circle of
/// `circle_segments` edges. Ring `i` occupies vertices
/// `i*circle_segments .. (i+1)*circle_segments`; the basepoint is vertex 0
/// on ring 0. Diagonal lengths are rational upper roundings of the flat
/// quad diagonal, which keeps every wrapping cycle at least one
/// circumference long.
pub fn tube(
    axial_lengths: &[BigRational],
    circumference: &BigRational,
    circle_segments: usize,
) -> MetricComplex {
    assert!(circle_segments >= 3, "tube rings need at least 3 edges");
    let rings = axial_lengths.len() + 1;
    let seg = circumference / BigRational::from_integer(BigInt::from(circle_segments));
    let v = |ring: usize, k: usize| ring * circle_segments + (k % circle_segments);
    let mut edges = Vec::new();
    let mut triangles = Vec::new();
    // Ring edges.
    for r in 0..rings {
        for k in 0..circle_segments {
            edges.push(Edge {
                u: v(r, k),
                v: v(r, k + 1),
                length: seg.clone(),
            });
        }
    }
    // Axial and diagonal edges band by band.
    for (b, axial) in axial_lengths.iter().enumerate() {
        let diag = rational_hypot_upper(axial, &seg);
        for k in 0..circle_segments {
            edges.push(Edge {
                u: v(b, k),
                v: v(b + 1, k),
                length: axial.clone(),
            });
            edges.push(Edge {
                u: v(b, k),
                v: v(b + 1, k + 1),
                length: diag.clone(),
            });
            triangles.push([v(b, k), v(b + 1, k + 1), v(b + 1, k)]);
            triangles.push([v(b, k), v(b, k + 1), v(b + 1, k + 1)]);
        }
    }
    MetricComplex::new(rings * circle_segments, edges, triangles, 0).expect("valid tube")
}

/// Rational upper bound for sqrt(a^2 + b^2), within 1/1024 of the true
/// value.
pub fn rational_hypot_upper(a: &BigRational, b: &BigRational) -> BigRational {
    let x = a.to_f64().unwrap();
    let y = b.to_f64().unwrap();
    let h = (x * x + y * y).sqrt();
    let scaled = (h * 1024.0).ceil() + 1.0;
    BigRational::new(
        BigInt::from_f64(scaled).expect("finite"),
        BigInt::from(1024),
    )
}

/// Disjoint union of complexes with fresh bridge edges between named
/// vertices. Returns the glued complex and the vertex offset of each part.
pub fn join(
    parts: &[&MetricComplex],
    bridges: &[(usize, usize, usize, usize, BigRational)],
    basepoint: (usize, usize),
) -> (MetricComplex, Vec<usize>) {
    let mut offsets = Vec::with_capacity(parts.len());
    let mut total_vertices = 0usize;
    for p in parts {
        offsets.push(total_vertices);
        total_vertices += p.vertex_count();
    }
    let mut edges = Vec::new();
    let mut cells = Vec::new();
    let mut edge_offsets = Vec::with_capacity(parts.len());
    for (i, p) in parts.iter().enumerate() {
        edge_offsets.push(edges.len());
        for e in p.edges() {
            edges.push(Edge {
                u: e.u + offsets[i],
                v: e.v + offsets[i],
                length: e.length.clone(),
            });
        }
        for c in p.cells() {
            let mut boundary = c.boundary.clone();
            for s in boundary.iter_mut() {
                s.edge += edge_offsets[i];
            }
            cells.push(crate::space::Cell { boundary });
        }
    }
    for (pa, va, pb, vb, len) in bridges {
        edges.push(Edge {
            u: offsets[*pa] + va,
            v: offsets[*pb] + vb,
            length: len.clone(),
        });
    }
    let complex = MetricComplex::with_cells(
        total_vertices,
        edges,
        cells,
        offsets[basepoint.0] + basepoint.1,
        None,
    )
    .expect("valid join");
    (complex, offsets)
}

use num::ToPrimitive;

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    #[test]
    fn circle_has_one_generator() {
        let c = circle(BigRational::one(), 4);
        assert_eq!(c.presentation().generator_count(), 1);
    }

    #[test]
    fn tube_fundamental_group_is_infinite_cyclic() {
        let t = tube(
            &[BigRational::one(), BigRational::one()],
            &BigRational::one(),
            4,
        );
        let p = t.presentation();
        // Tietze elimination should reduce the tube to a single surviving
        // generator with no relators.
        let g = crate::group::Word::from_letters(vec![1]).unwrap();
        let _ = p.is_trivial(&g);
        let nontrivial = (1..=p.generator_count() as i32)
            .filter(|&g| {
                p.is_trivial(&crate::group::Word::from_letters(vec![g]).unwrap())
                    == crate::group::Triviality::Nontrivial
            })
            .count();
        assert!(nontrivial >= 1, "some generator survives as the circle class");
    }
}
