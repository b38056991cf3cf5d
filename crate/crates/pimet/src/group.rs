//! Edge-path presentations of the fundamental group, free-word arithmetic,
//! induced homomorphisms of simplicial maps, and the bridge between
//! discretized loops and words.
//!
//! Words are sequences of signed 1-based generator indices, so `[1, -2]` is
//! g1 * g2^-1. Generators correspond to the non-tree edges of a
//! deterministic breadth-first spanning tree (lowest edge index wins ties),
//! which keeps words reproducible across runs.

use crate::error::{Error, Result};
use crate::loops::DiscreteLoop;
use crate::space::{MetricComplex, Point, PointLocation, SimplicialMap, SpaceHandle};
use num::rational::BigRational;
use num::{BigInt, One, ToPrimitive, Zero};
use once_cell::sync::OnceCell;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<i32>) -> Result<Self> {
        if letters.iter().any(|&l| l == 0) {
            return Err(Error::InvalidWord("letter 0 is not a generator".into()));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Free reduction: cancels adjacent inverse pairs until none remain.
    /// Idempotent and never length-increasing.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<i32> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last().map_or(false, |&last| last == -l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Reduced product.
    pub fn mul(&self, other: &Word) -> Word {
        self.concat(other).reduce()
    }

    pub fn conjugate(&self, by: &Word) -> Word {
        by.concat(self).concat(&by.inverse()).reduce()
    }

    /// Removes trivial conjugation at the ends: u w u^-1 -> w. The result
    /// represents the same conjugacy class.
    pub fn cyclic_reduce(&self) -> Word {
        let mut w = self.reduce().0;
        while w.len() >= 2 && w.first().copied() == w.last().map(|l| -l) {
            w.pop();
            w.remove(0);
        }
        Word(w)
    }

    pub fn substitute(&self, image_of: impl Fn(usize) -> Word) -> Word {
        let mut out = Vec::new();
        for &l in &self.0 {
            let g = l.unsigned_abs() as usize - 1;
            let img = image_of(g);
            if l > 0 {
                out.extend_from_slice(&img.0);
            } else {
                out.extend(img.0.iter().rev().map(|x| -x));
            }
        }
        Word(out).reduce()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Triviality {
    Trivial,
    Nontrivial,
    Unknown,
}

/// Edge-path presentation of the fundamental group of a complex.
pub struct Presentation {
    /// Non-tree edges, generator i <-> generator_edges[i], oriented u -> v.
    generator_edges: Vec<usize>,
    /// Edge id -> letter for a forward traversal (None for tree edges).
    edge_letter: Vec<Option<i32>>,
    relators: Vec<Word>,
    /// BFS tree: parent[v] = (parent vertex, edge id), None at the basepoint.
    parent: Vec<Option<(usize, usize)>>,
    basepoint: usize,
    simplified: OnceCell<Simplified>,
}

impl std::fmt::Debug for Presentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Presentation")
            .field("generators", &self.generator_edges.len())
            .field("relators", &self.relators.len())
            .finish()
    }
}

impl MetricComplex {
    /// The cached edge-path presentation of this complex.
    pub fn presentation(&self) -> &Presentation {
        self.presentation_cache
            .get_or_init(|| Arc::new(Presentation::build(self)))
    }
}

impl Presentation {
    fn build(complex: &MetricComplex) -> Presentation {
        let n = complex.vertex_count();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut visited = vec![false; n];
        let mut tree_edge = vec![false; complex.edge_count()];
        let basepoint = complex.basepoint();
        visited[basepoint] = true;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(basepoint);
        while let Some(v) = queue.pop_front() {
            for &e in complex.incident_edges(v) {
                let w = complex.opposite(e, v);
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some((v, e));
                    tree_edge[e] = true;
                    queue.push_back(w);
                }
            }
        }
        let mut generator_edges = Vec::new();
        let mut edge_letter = vec![None; complex.edge_count()];
        for e in 0..complex.edge_count() {
            if !tree_edge[e] {
                generator_edges.push(e);
                edge_letter[e] = Some(generator_edges.len() as i32);
            }
        }
        let pres = Presentation {
            generator_edges,
            edge_letter,
            relators: Vec::new(),
            parent,
            basepoint,
            simplified: OnceCell::new(),
        };
        let relators = complex
            .cells()
            .iter()
            .map(|c| pres.word_of_steps(c.boundary.iter().map(|s| (s.edge, s.reversed))))
            .filter(|w| !w.is_empty())
            .collect();
        Presentation { relators, ..pres }
    }

    pub fn generator_count(&self) -> usize {
        self.generator_edges.len()
    }

    pub fn generator_edge(&self, g: usize) -> usize {
        self.generator_edges[g]
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn letter_of_step(&self, edge: usize, reversed: bool) -> Option<i32> {
        self.edge_letter[edge].map(|l| if reversed { -l } else { l })
    }

    pub fn word_of_steps(&self, steps: impl Iterator<Item = (usize, bool)>) -> Word {
        Word(
            steps
                .filter_map(|(e, rev)| self.letter_of_step(e, rev))
                .collect(),
        )
        .reduce()
    }

    pub fn validate_word(&self, w: &Word) -> Result<()> {
        if w.max_generator() > self.generator_count() {
            return Err(Error::InvalidWord(format!(
                "word references generator {} but the presentation has {}",
                w.max_generator(),
                self.generator_count()
            )));
        }
        Ok(())
    }

    /// Steps from `v` up the tree to the basepoint, each oriented from the
    /// child toward its parent.
    fn steps_to_base(&self, complex: &MetricComplex, mut v: usize) -> Vec<(usize, bool)> {
        let mut steps = Vec::new();
        while let Some((p, e)) = self.parent[v] {
            steps.push((e, complex.edge(e).u != v));
            v = p;
        }
        steps
    }

    /// Tree path between two vertices as oriented steps.
    pub fn tree_path(&self, complex: &MetricComplex, from: usize, to: usize) -> Vec<(usize, bool)> {
        let mut a = self.steps_to_base(complex, from);
        let mut b = self.steps_to_base(complex, to);
        // Strip the shared suffix (the part between the LCA and the base).
        while let (Some(x), Some(y)) = (a.last(), b.last()) {
            if x.0 == y.0 {
                a.pop();
                b.pop();
            } else {
                break;
            }
        }
        b.reverse();
        a.extend(b.into_iter().map(|(e, rev)| (e, !rev)));
        a
    }

    /// The canonical loop of generator `g`: tree path to the edge, across,
    /// and back through the tree.
    pub fn generator_loop_steps(&self, complex: &MetricComplex, g: usize) -> Vec<(usize, bool)> {
        let e = self.generator_edges[g];
        let edge = complex.edge(e);
        let mut steps = self.tree_path(complex, self.basepoint, edge.u);
        steps.push((e, false));
        steps.extend(self.tree_path(complex, edge.v, self.basepoint));
        steps
    }

    /// The canonical closed edge path of a word (tree closures between
    /// letters; no geometric cancellation).
    pub fn word_steps(&self, complex: &MetricComplex, w: &Word) -> Vec<(usize, bool)> {
        let mut steps = Vec::new();
        for &l in w.letters() {
            let g = l.unsigned_abs() as usize - 1;
            let loop_steps = self.generator_loop_steps(complex, g);
            if l > 0 {
                steps.extend(loop_steps);
            } else {
                steps.extend(loop_steps.into_iter().rev().map(|(e, rev)| (e, !rev)));
            }
        }
        steps
    }

    fn simplified(&self) -> &Simplified {
        self.simplified.get_or_init(|| Simplified::build(self))
    }

    /// Exact when the group is free or Tietze elimination empties the
    /// relator set; Unknown otherwise.
    pub fn is_trivial(&self, w: &Word) -> Triviality {
        let s = self.simplified();
        let rewritten = w.reduce().substitute(|g| s.rewrite[g].clone());
        if rewritten.is_empty() {
            Triviality::Trivial
        } else if s.relators.is_empty() {
            Triviality::Nontrivial
        } else {
            Triviality::Unknown
        }
    }

    /// Same-element test through the simplification.
    pub fn equal(&self, a: &Word, b: &Word) -> Triviality {
        self.is_trivial(&a.mul(&b.inverse()))
    }
}

/// Result of Tietze generator elimination: a free-ish quotient presentation
/// together with the rewriting of original generators.
struct Simplified {
    rewrite: Vec<Word>,
    relators: Vec<Word>,
}

const TIETZE_LETTER_BUDGET: usize = 200_000;

impl Simplified {
    fn build(pres: &Presentation) -> Simplified {
        let n = pres.generator_count();
        let mut rewrite: Vec<Word> = (1..=n).map(|g| Word(vec![g as i32])).collect();
        let mut relators: Vec<Word> = pres
            .relators
            .iter()
            .map(|r| r.cyclic_reduce())
            .filter(|r| !r.is_empty())
            .collect();
        loop {
            // A relator in which some generator occurs exactly once can be
            // solved for that generator.
            let mut pick: Option<(usize, usize)> = None;
            let mut order: Vec<usize> = (0..relators.len()).collect();
            order.sort_by_key(|&i| relators[i].len());
            'outer: for &ri in &order {
                let r = &relators[ri];
                let mut counts: std::collections::BTreeMap<usize, usize> =
                    std::collections::BTreeMap::new();
                for &l in r.letters() {
                    *counts.entry(l.unsigned_abs() as usize - 1).or_insert(0) += 1;
                }
                for (g, c) in counts {
                    if c == 1 {
                        pick = Some((ri, g));
                        break 'outer;
                    }
                }
            }
            let Some((ri, g)) = pick else { break };
            let relator = relators.remove(ri);
            // Rotate the relator to start with +-g.
            let pos = relator
                .letters()
                .iter()
                .position(|l| l.unsigned_abs() as usize - 1 == g)
                .unwrap();
            let mut rotated = relator.0.clone();
            rotated.rotate_left(pos);
            let sign = rotated[0] > 0;
            let rest = Word(rotated[1..].to_vec());
            // g * rest = 1 => g = rest^-1 ; g^-1 * rest = 1 => g = rest.
            let image = if sign { rest.inverse() } else { rest };
            let subst = |idx: usize| -> Word {
                if idx == g {
                    image.clone()
                } else {
                    Word(vec![(idx + 1) as i32])
                }
            };
            let mut total = 0usize;
            for r in relators.iter_mut() {
                *r = r.substitute(&subst).cyclic_reduce();
                total += r.len();
            }
            for w in rewrite.iter_mut() {
                *w = w.substitute(&subst);
                total += w.len();
            }
            relators.retain(|r| !r.is_empty());
            if total > TIETZE_LETTER_BUDGET {
                break;
            }
        }
        Simplified { rewrite, relators }
    }
}

/// A homomorphism recorded by generator images. Relators of the domain that
/// could not be certified trivial in the codomain are kept as obligations.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    images: Vec<Word>,
    obligations: Vec<Word>,
}

impl Homomorphism {
    pub fn new(images: Vec<Word>) -> Self {
        Homomorphism {
            images,
            obligations: Vec::new(),
        }
    }

    pub fn identity(generators: usize) -> Self {
        Homomorphism::new((1..=generators as i32).map(|g| Word(vec![g])).collect())
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn obligations(&self) -> &[Word] {
        &self.obligations
    }

    pub fn with_obligations(mut self, obligations: Vec<Word>) -> Homomorphism {
        self.obligations = obligations;
        self
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(|g| self.images[g].clone())
    }

    /// Composition h2 after h1 (apply h1, then h2).
    pub fn compose_after(&self, first: &Homomorphism) -> Homomorphism {
        Homomorphism {
            images: first.images.iter().map(|w| self.apply(w)).collect(),
            obligations: first.obligations.clone(),
        }
    }
}

/// The homomorphism induced by a simplicial map on edge-path presentations.
pub fn induced_hom(
    f: &SimplicialMap,
    dom: &MetricComplex,
    cod: &MetricComplex,
) -> Result<Homomorphism> {
    if f.vertex_map()[dom.basepoint()] != cod.basepoint() {
        return Err(Error::NonSimplicial(
            "map does not preserve the basepoint".into(),
        ));
    }
    let dp = dom.presentation();
    let cp = cod.presentation();
    let images = (0..dp.generator_count())
        .map(|g| {
            let steps = dp.generator_loop_steps(dom, g);
            cp.word_of_steps(f.map_steps(steps.into_iter()))
        })
        .collect::<Vec<_>>();
    let hom = Homomorphism::new(images);
    let mut obligations = Vec::new();
    for r in dp.relators() {
        let image = hom.apply(r);
        match cp.is_trivial(&image) {
            Triviality::Trivial => {}
            Triviality::Unknown => obligations.push(image),
            Triviality::Nontrivial => {
                return Err(Error::NonSimplicial(
                    "a relator maps to a nontrivial word; the vertex assignment is not a map of complexes".into(),
                ))
            }
        }
    }
    Ok(Homomorphism { obligations, ..hom })
}

/// Straightens a sampled loop on a complex to its edge-path word. Sound when
/// the mesh stays below half the systole: consecutive samples then have
/// homotopically unique geodesics and the interpolant's class is exactly the
/// crossing word.
pub fn straighten(complex: &MetricComplex, samples: &[PointLocation]) -> Result<Word> {
    if samples.len() < 2 {
        return Ok(Word::identity());
    }
    if samples[0] != PointLocation::Vertex(complex.basepoint())
        || samples[samples.len() - 1] != PointLocation::Vertex(complex.basepoint())
    {
        return Err(Error::InvalidPoint("loop is not based at the basepoint".into()));
    }
    let margin = complex.straightening_margin();
    if let Some(margin) = &margin {
        for w in samples.windows(2) {
            let step = complex.distance(&w[0], &w[1]);
            if step >= *margin {
                return Err(Error::MarginViolation {
                    mesh: step.to_string(),
                    margin: margin.to_string(),
                });
            }
        }
    }
    let segs = samples.windows(2).flat_map(|w| {
        if w[0] == w[1] {
            Vec::new()
        } else {
            complex.geodesic(&w[0], &w[1]).0.segs
        }
    });
    let crossings = edge_crossings(segs);
    Ok(complex.presentation().word_of_steps(crossings.into_iter()))
}

/// Full oriented edge crossings of a walk given as consecutive along-edge
/// segments (offsets are edge fractions). Partial excursions into an edge
/// that back out through the entry vertex contribute nothing, which is
/// exactly the homotopy class of the walk read off its vertex itinerary.
pub(crate) fn edge_crossings(
    segs: impl Iterator<Item = (usize, BigRational, BigRational)>,
) -> Vec<(usize, bool)> {
    let mut crossings: Vec<(usize, bool)> = Vec::new();
    // Walker state: inside an edge, remembering the entry endpoint.
    let mut state: Option<(usize, bool)> = None; // (edge, entered_at_u)
    for (e, a, b) in segs {
        if a == b {
            continue;
        }
        let b_end = if b.is_zero() {
            Some(false)
        } else if b.is_one() {
            Some(true)
        } else {
            None
        };
        match state {
            None => {
                debug_assert!(a.is_zero() || a.is_one(), "entered an edge away from a vertex");
                let entered_at_u = a.is_zero();
                match b_end {
                    Some(at_v) => {
                        if at_v == entered_at_u {
                            crossings.push((e, !entered_at_u));
                        }
                        // else: immediate backtrack, nothing emitted
                    }
                    None => state = Some((e, entered_at_u)),
                }
            }
            Some((e0, entered_at_u)) => {
                debug_assert_eq!(e, e0, "interior position left its edge");
                match b_end {
                    Some(at_v) => {
                        if at_v == entered_at_u {
                            crossings.push((e, !entered_at_u));
                        }
                        state = None;
                    }
                    None => state = Some((e0, entered_at_u)),
                }
            }
        }
    }
    debug_assert!(state.is_none(), "walk ended inside an edge");
    crossings
}

impl MetricComplex {
    /// Half the systole; None when the group is trivial (no margin needed).
    pub fn straightening_margin(&self) -> Option<BigRational> {
        self.systole()
            .map(|s| s / BigRational::from_integer(BigInt::from(2)))
    }
}

/// The edge-path word of a discrete loop.
pub fn loop_to_word(complex: &MetricComplex, l: &DiscreteLoop) -> Result<Word> {
    let samples = l
        .samples()
        .iter()
        .map(|p| match p {
            Point::OnComplex(pl) => Ok(pl.clone()),
            _ => Err(Error::SpaceMismatch),
        })
        .collect::<Result<Vec<_>>>()?;
    straighten(complex, &samples)
}

/// The canonical constant-speed representative of a word: the edge path of
/// `w` through spanning-tree closures, sampled on a power-of-two grid with
/// at least `samples_per_unit` samples per unit length.
pub fn word_to_loop(
    space: &SpaceHandle,
    w: &Word,
    samples_per_unit: u32,
) -> Result<DiscreteLoop> {
    let complex = space.carrier_complex()?;
    let pres = complex.presentation();
    pres.validate_word(w)?;
    let steps = pres.word_steps(complex, w);
    if steps.is_empty() {
        let base = Point::OnComplex(PointLocation::Vertex(complex.basepoint()));
        return DiscreteLoop::new(space.clone(), vec![base.clone(), base]);
    }
    let total: BigRational = steps
        .iter()
        .map(|(e, _)| complex.edge(*e).length.clone())
        .sum();
    let n = grid_size(&total, samples_per_unit);
    let mut samples = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let target = &total * BigRational::new(BigInt::from(i), BigInt::from(n));
        samples.push(Point::OnComplex(point_along_steps(complex, &steps, &target)));
    }
    DiscreteLoop::new(space.clone(), samples)
}

/// Smallest power of two >= samples_per_unit * length (and >= 4, so that
/// path-conjugation grids subdivide evenly).
pub fn grid_size(length: &BigRational, samples_per_unit: u32) -> usize {
    let want = (length * BigRational::from_integer(BigInt::from(samples_per_unit)))
        .ceil()
        .to_integer()
        .to_usize()
        .unwrap_or(4)
        .max(4);
    want.next_power_of_two()
}

fn point_along_steps(
    complex: &MetricComplex,
    steps: &[(usize, bool)],
    target: &BigRational,
) -> PointLocation {
    let mut remaining = target.clone();
    for &(e, rev) in steps {
        let len = &complex.edge(e).length;
        if remaining <= *len {
            let frac = &remaining / len;
            let offset = if rev { BigRational::one() - frac } else { frac };
            return PointLocation::on_edge(complex, e, offset);
        }
        remaining -= len;
    }
    let &(e, rev) = steps.last().expect("steps nonempty");
    let offset = if rev {
        BigRational::zero()
    } else {
        BigRational::one()
    };
    PointLocation::on_edge(complex, e, offset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::shapes;

    #[test]
    fn reduce_examples() {
        let w = Word::from_letters(vec![1, -1]).unwrap();
        assert_eq!(w.reduce(), Word::identity());
        let w = Word::from_letters(vec![2, 1, -1, 2]).unwrap();
        assert_eq!(w.reduce().letters(), &[2, 2]);
    }

    /// Oracle: repeated single-pass cancellation until fixed point.
    fn naive_reduce(mut letters: Vec<i32>) -> Vec<i32> {
        loop {
            let mut changed = false;
            let mut out = Vec::with_capacity(letters.len());
            let mut i = 0;
            while i < letters.len() {
                if i + 1 < letters.len() && letters[i] == -letters[i + 1] {
                    i += 2;
                    changed = true;
                } else {
                    out.push(letters[i]);
                    i += 1;
                }
            }
            letters = out;
            if !changed {
                return letters;
            }
        }
    }

    #[test]
    fn reduce_matches_naive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let letters: Vec<i32> = (0..50)
                .map(|_| {
                    let g = rng.gen_range(1..=3);
                    if rng.gen_bool(0.5) {
                        g
                    } else {
                        -g
                    }
                })
                .collect();
            let w = Word::from_letters(letters.clone()).unwrap();
            assert_eq!(w.reduce().letters(), naive_reduce(letters).as_slice());
            // Idempotence and length monotonicity.
            assert_eq!(w.reduce().reduce(), w.reduce());
            assert!(w.reduce().len() <= w.len());
            assert_eq!(w.mul(&w.inverse()), Word::identity());
        }
    }

    #[test]
    fn presentation_tree_has_no_generators() {
        let tree = shapes::star_tree(4);
        assert_eq!(tree.presentation().generator_count(), 0);
    }

    #[test]
    fn presentation_wedge_is_free_rank_two() {
        let wedge = shapes::wedge_of_circles(&[BigRational::one(), BigRational::one()], 4);
        let p = wedge.presentation();
        assert_eq!(p.generator_count(), 2);
        assert!(p.is_free());
    }

    #[test]
    fn filled_triangle_is_trivial_group() {
        let c = shapes::filled_triangle();
        let p = c.presentation();
        assert_eq!(p.generator_count(), 1);
        assert_eq!(p.relators().len(), 1);
        // Tietze elimination kills the generator.
        let g = Word::from_letters(vec![1]).unwrap();
        assert_eq!(p.is_trivial(&g), Triviality::Trivial);
    }

    #[test]
    fn is_trivial_examples() {
        let wedge = shapes::wedge_of_circles(&[BigRational::one(), BigRational::one()], 4);
        let p = wedge.presentation();
        assert_eq!(p.is_trivial(&Word::identity()), Triviality::Trivial);
        let comm = Word::from_letters(vec![1, 2, -1, -2]).unwrap();
        assert_eq!(p.is_trivial(&comm), Triviality::Nontrivial);
    }

    #[test]
    fn commutator_dies_when_one_generator_is_a_relator() {
        // <a, b | a> simplifies to a free group of rank 1 where the
        // commutator becomes trivial.
        let c = shapes::wedge_of_circles(&[BigRational::one(), BigRational::one()], 4);
        let p = c.presentation();
        let manual = Presentation {
            generator_edges: (0..p.generator_count()).map(|g| p.generator_edge(g)).collect(),
            edge_letter: (0..c.edge_count())
                .map(|e| {
                    (0..p.generator_count())
                        .find(|&g| p.generator_edge(g) == e)
                        .map(|g| g as i32 + 1)
                })
                .collect(),
            relators: vec![Word::from_letters(vec![1]).unwrap()],
            parent: vec![None; c.vertex_count()],
            basepoint: c.basepoint(),
            simplified: OnceCell::new(),
        };
        let comm = Word::from_letters(vec![1, 2, -1, -2]).unwrap();
        assert_eq!(manual.is_trivial(&comm), Triviality::Trivial);
    }

    #[test]
    fn induced_hom_identity_and_collapse() {
        let wedge = Arc::new(shapes::wedge_of_circles(
            &[BigRational::one(), BigRational::one()],
            4,
        ));
        let id = SimplicialMap::identity(&wedge);
        let h = induced_hom(&id, &wedge, &wedge).unwrap();
        for (g, img) in h.images().iter().enumerate() {
            assert_eq!(img.letters(), &[(g + 1) as i32]);
        }
        // Collapse circle 2 to the basepoint.
        let collapse = shapes::collapse_circles(&wedge, 4, &[1]);
        let h = induced_hom(&collapse, &wedge, &wedge).unwrap();
        assert_eq!(h.images()[0].letters(), &[1]);
        assert!(h.images()[1].is_empty());
    }

    #[test]
    fn induced_hom_double_wrap() {
        // An 8-edge circle wraps twice around a 4-edge circle.
        let big = shapes::circle(BigRational::from_integer(BigInt::from(2)), 8);
        let small = shapes::circle(BigRational::one(), 4);
        let vmap: Vec<usize> = (0..8).map(|i| i % 4).collect();
        let f = SimplicialMap::from_vertex_map(&big, &small, vmap).unwrap();
        let h = induced_hom(&f, &big, &small).unwrap();
        let img = &h.images()[0];
        assert!(img.letters() == [1, 1] || img.letters() == [-1, -1]);
    }

    #[test]
    fn hom_functoriality_on_random_words() {
        use rand::{Rng, SeedableRng};
        let wedge = Arc::new(shapes::wedge_of_circles(
            &[BigRational::one(), BigRational::one()],
            4,
        ));
        let collapse = shapes::collapse_circles(&wedge, 4, &[1]);
        let id = SimplicialMap::identity(&wedge);
        let h1 = induced_hom(&collapse, &wedge, &wedge).unwrap();
        let h2 = induced_hom(&id, &wedge, &wedge).unwrap();
        let composed_map = id.compose_after(&collapse);
        let h12 = induced_hom(&composed_map, &wedge, &wedge).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let letters: Vec<i32> = (0..8)
                .map(|_| {
                    let g = rng.gen_range(1..=2);
                    if rng.gen_bool(0.5) {
                        g
                    } else {
                        -g
                    }
                })
                .collect();
            let w = Word::from_letters(letters).unwrap();
            assert_eq!(
                h12.apply(&w),
                h2.compose_after(&h1).apply(&w),
                "functoriality failed"
            );
        }
    }
}
