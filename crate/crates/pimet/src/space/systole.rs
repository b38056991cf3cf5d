//! Essential systole of a metric complex: the length of the shortest cycle
//! in the 1-skeleton that is not nullhomotopic across the 2-cells. Half the
//! systole is the geodesic-uniqueness and loop-straightening margin.

use crate::group::Triviality;
use crate::space::MetricComplex;
use num::rational::BigRational;

impl MetricComplex {
    /// None means the fundamental group carries no essential cycle (the
    /// systole is infinite).
    pub fn systole(&self) -> Option<BigRational> {
        self.systole_cache.get_or_init(|| compute(self)).clone()
    }

    /// Canonical shortest path between vertices as oriented steps.
    pub fn canonical_path_steps(&self, a: usize, b: usize) -> Vec<(usize, bool)> {
        let mut steps = Vec::new();
        let mut cur = a;
        let dist_to_b = &self.apsp()[b];
        while cur != b {
            let e = self
                .incident_edges(cur)
                .iter()
                .copied()
                .find(|&e| {
                    let w = self.opposite(e, cur);
                    &self.edge(e).length + &dist_to_b[w] == dist_to_b[cur]
                })
                .expect("path exists");
            steps.push((e, self.edge(e).u != cur));
            cur = self.opposite(e, cur);
        }
        steps
    }
}

/// Sweep of shortest-path-tree fundamental cycles over every root. Every
/// candidate is an actual cycle, so the result is always the length of some
/// essential cycle; a cycle is kept unless it is proven nullhomotopic, which
/// keeps the derived margins sound.
fn compute(complex: &MetricComplex) -> Option<BigRational> {
    let pres = complex.presentation();
    if pres.generator_count() == 0 {
        return None;
    }
    let apsp = complex.apsp();
    let mut best: Option<BigRational> = None;
    for root in 0..complex.vertex_count() {
        for e in 0..complex.edge_count() {
            let edge = complex.edge(e);
            let length = &apsp[root][edge.u] + &edge.length + &apsp[root][edge.v];
            if best.as_ref().map_or(false, |b| length >= *b) {
                continue;
            }
            let mut steps = complex.canonical_path_steps(root, edge.u);
            steps.push((e, false));
            steps.extend(complex.canonical_path_steps(edge.v, root));
            let word = pres.word_of_steps(steps.into_iter());
            if word.is_empty() {
                continue;
            }
            if pres.is_trivial(&word) != Triviality::Trivial {
                best = Some(length);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::shapes;
    use num::rational::BigRational;
    use num::{BigInt, One, Zero};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn tree_has_infinite_systole() {
        assert_eq!(shapes::star_tree(3).systole(), None);
    }

    #[test]
    fn subdivided_circle_systole_is_circumference() {
        let c = shapes::circle(BigRational::one(), 4);
        assert_eq!(c.systole(), Some(BigRational::one()));
    }

    #[test]
    fn wedge_systole_is_shortest_circle() {
        let w = shapes::wedge_of_circles(&[BigRational::one(), rat(1, 2)], 4);
        assert_eq!(w.systole(), Some(rat(1, 2)));
    }

    #[test]
    fn filled_triangle_has_no_essential_cycle() {
        assert_eq!(shapes::filled_triangle().systole(), None);
    }

    #[test]
    fn tube_systole_is_circumference() {
        let t = shapes::tube(&[rat(1, 2), rat(1, 2)], &BigRational::one(), 4);
        assert_eq!(t.systole(), Some(BigRational::one()));
    }

    /// Oracle: exhaustive enumeration of simple cycles by DFS over edges.
    fn enumerate_simple_cycles(c: &MetricComplex) -> Vec<(Vec<(usize, bool)>, BigRational)> {
        let mut out = Vec::new();
        let n = c.vertex_count();
        for start in 0..n {
            let mut stack: Vec<(usize, Vec<(usize, bool)>, Vec<bool>, BigRational)> =
                vec![(start, Vec::new(), vec![false; n], BigRational::zero())];
            while let Some((cur, path, mut seen, len)) = stack.pop() {
                seen[cur] = true;
                for &e in c.incident_edges(cur) {
                    if path.iter().any(|&(pe, _)| pe == e) {
                        continue;
                    }
                    let w = c.opposite(e, cur);
                    let step = (e, c.edge(e).u != cur);
                    let new_len = &len + &c.edge(e).length;
                    if w == start && path.len() >= 1 {
                        let mut cycle = path.clone();
                        cycle.push(step);
                        out.push((cycle, new_len.clone()));
                    } else if !seen[w] && w > start {
                        let mut p = path.clone();
                        p.push(step);
                        stack.push((w, p, seen.clone(), new_len));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn systole_matches_enumeration_on_small_complexes() {
        let cases = vec![
            shapes::circle(BigRational::one(), 4),
            shapes::wedge_of_circles(&[BigRational::one(), rat(1, 2)], 4),
            shapes::wedge_of_circles(&[rat(3, 4), rat(1, 2), rat(5, 4)], 3),
            shapes::filled_triangle(),
        ];
        for c in cases {
            let pres = c.presentation();
            let oracle = enumerate_simple_cycles(&c)
                .into_iter()
                .filter(|(steps, _)| {
                    let w = pres.word_of_steps(steps.iter().copied());
                    !w.is_empty() && pres.is_trivial(&w) != Triviality::Trivial
                })
                .map(|(_, len)| len)
                .min();
            assert_eq!(c.systole(), oracle);
        }
    }

    /// Every essential edge-cycle of a small complex is at least one systole
    /// long.
    #[test]
    fn systole_lower_bounds_essential_cycles() {
        let c = shapes::wedge_of_circles(&[BigRational::one(), rat(1, 2)], 4);
        let pres = c.presentation();
        let sys = c.systole().unwrap();
        for (steps, len) in enumerate_simple_cycles(&c) {
            let w = pres.word_of_steps(steps.iter().copied());
            if !w.is_empty() && pres.is_trivial(&w) != Triviality::Trivial {
                assert!(len >= sys);
            }
        }
    }
}
