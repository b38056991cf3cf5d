//! Truncated inverse systems of finite metric complexes with retraction
//! bonding maps and sections.
//!
//! A system of depth J is the finite truncation X_1 <- X_2 <- ... <- X_J;
//! its limit is carried by the top level with the weighted product metric
//! D(x, y) = sum_{j<=J} d_j(x_j, y_j) / 2^j, where x_j is the projection of
//! x and every level metric is rescaled to diameter <= 1. Every quantity
//! derived from the ideal untruncated limit carries the geometric tail
//! 2^-J as explicit uncertainty.

use crate::error::{Error, Result};
use crate::group::{induced_hom, Homomorphism, Triviality, Word};
use crate::scalar::Scalar;
use crate::space::{EdgeImage, MetricComplex, PointLocation, SimplicialMap};
use num::rational::BigRational;
use num::{BigInt, One, Zero};
use once_cell::sync::OnceCell;
use serde_json::Value;
use std::path::Path;
use std::sync::Arc;

pub struct InverseSystem {
    /// Levels X_1..X_J with diameter-normalized metrics.
    levels: Vec<Arc<MetricComplex>>,
    /// Normalization factor applied per level (normalized = scale * input).
    scales: Vec<BigRational>,
    /// bondings[j]: X_{j+2} -> X_{j+1} in 1-based level numbers
    /// (levels[j+1] -> levels[j]).
    bondings: Vec<SimplicialMap>,
    /// sections[j]: levels[j] -> levels[j+1], right inverse of bondings[j].
    sections: Vec<SimplicialMap>,
    /// For shrinking wedges: 1-based level at which each top edge appears.
    top_edge_level: Vec<usize>,
    proj_maps: OnceCell<Vec<SimplicialMap>>,
    embed_maps: OnceCell<Vec<SimplicialMap>>,
    proj_homs: OnceCell<Vec<Homomorphism>>,
    edge_weights: OnceCell<Vec<BigRational>>,
}

impl std::fmt::Debug for InverseSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InverseSystem")
            .field("depth", &self.levels.len())
            .finish()
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// 2^-k exactly.
fn pow2_inv(k: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2u8).pow(k as u32))
}

impl InverseSystem {
    pub fn new(
        levels: Vec<MetricComplex>,
        bondings: Vec<SimplicialMap>,
        sections: Vec<SimplicialMap>,
    ) -> Result<InverseSystem> {
        Self::with_edge_levels(levels, bondings, sections, None)
    }

    fn with_edge_levels(
        levels: Vec<MetricComplex>,
        bondings: Vec<SimplicialMap>,
        sections: Vec<SimplicialMap>,
        top_edge_level: Option<Vec<usize>>,
    ) -> Result<InverseSystem> {
        if levels.is_empty() {
            return Err(Error::InvalidSystem("a system needs at least one level".into()));
        }
        if bondings.len() + 1 != levels.len() || sections.len() + 1 != levels.len() {
            return Err(Error::InvalidSystem(
                "need one bonding and one section per consecutive level pair".into(),
            ));
        }
        // Normalize diameters to <= 1, recording the factor.
        let mut scales = Vec::with_capacity(levels.len());
        let mut normalized = Vec::with_capacity(levels.len());
        for l in levels {
            let quick = l.diameter_upper_bound();
            let scale = if quick <= BigRational::one() {
                BigRational::one()
            } else {
                let diam = l.diameter();
                if diam <= BigRational::one() {
                    BigRational::one()
                } else {
                    diam.recip()
                }
            };
            normalized.push(Arc::new(if scale.is_one() {
                l
            } else {
                l.scaled(&scale)
            }));
            scales.push(scale);
        }
        let levels = normalized;
        for (j, (r, s)) in bondings.iter().zip(&sections).enumerate() {
            let lower = &levels[j];
            let upper = &levels[j + 1];
            if r.vertex_map().len() != upper.vertex_count()
                || s.vertex_map().len() != lower.vertex_count()
            {
                return Err(Error::InvalidSystem(format!(
                    "bonding/section arity mismatch between levels {} and {}",
                    j + 1,
                    j + 2
                )));
            }
            if r.map_vertex(upper.basepoint()) != lower.basepoint()
                || s.map_vertex(lower.basepoint()) != upper.basepoint()
            {
                return Err(Error::InvalidSystem(format!(
                    "non-based bonding or section at level {}",
                    j + 1
                )));
            }
            let composite = r.compose_after(s);
            if composite != SimplicialMap::identity(lower) {
                return Err(Error::InvalidSystem(format!(
                    "bonding of level {} is not a retraction of its section",
                    j + 2
                )));
            }
        }
        let top_edges = levels.last().unwrap().edge_count();
        let top_edge_level = top_edge_level.unwrap_or_else(|| vec![1; top_edges]);
        Ok(InverseSystem {
            levels,
            scales,
            bondings,
            sections,
            top_edge_level,
            proj_maps: OnceCell::new(),
            embed_maps: OnceCell::new(),
            proj_homs: OnceCell::new(),
            edge_weights: OnceCell::new(),
        })
    }

    /// Levels are 1-based in queries, matching the X_1..X_J numbering.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> &Arc<MetricComplex> {
        &self.levels[k - 1]
    }

    pub fn scale(&self, k: usize) -> &BigRational {
        &self.scales[k - 1]
    }

    pub fn top_complex(&self) -> &Arc<MetricComplex> {
        self.levels.last().unwrap()
    }

    /// 1-based level at which a top edge first exists (shrinking wedges).
    pub fn edge_level(&self, edge: usize) -> usize {
        self.top_edge_level[edge]
    }

    /// Composite retraction maps r_{J,k}: top -> level k; entry k-1.
    fn projections(&self) -> &Vec<SimplicialMap> {
        self.proj_maps.get_or_init(|| {
            let depth = self.depth();
            let mut maps: Vec<Option<SimplicialMap>> = vec![None; depth];
            maps[depth - 1] = Some(SimplicialMap::identity(self.top_complex()));
            for k in (0..depth - 1).rev() {
                let above = maps[k + 1].clone().unwrap();
                maps[k] = Some(self.bondings[k].compose_after(&above));
            }
            maps.into_iter().map(Option::unwrap).collect()
        })
    }

    /// Composite section maps t_k: level k -> top; entry k-1.
    fn embeddings(&self) -> &Vec<SimplicialMap> {
        self.embed_maps.get_or_init(|| {
            let depth = self.depth();
            let mut maps: Vec<Option<SimplicialMap>> = vec![None; depth];
            maps[depth - 1] = Some(SimplicialMap::identity(self.top_complex()));
            for k in (0..depth - 1).rev() {
                let above = maps[k + 1].clone().unwrap();
                maps[k] = Some(above.compose_after(&self.sections[k]));
            }
            maps.into_iter().map(Option::unwrap).collect()
        })
    }

    pub fn projection(&self, k: usize) -> &SimplicialMap {
        &self.projections()[k - 1]
    }

    pub fn embedding(&self, k: usize) -> &SimplicialMap {
        &self.embeddings()[k - 1]
    }

    /// Induced homomorphism r_{J,k#} on edge-path presentations.
    pub fn projection_hom(&self, k: usize) -> &Homomorphism {
        &self.proj_homs.get_or_init(|| {
            (1..=self.depth())
                .map(|k| {
                    induced_hom(self.projection(k), self.top_complex(), self.level(k))
                        .expect("retractions induce homomorphisms")
                })
                .collect::<Vec<_>>()
        })[k - 1]
    }

    pub fn project_word(&self, w: &Word, k: usize) -> Word {
        self.projection_hom(k).apply(w)
    }

    /// Full-edge weighted length of a top edge: sum over levels of the
    /// image length divided by 2^level.
    fn edge_weights(&self) -> &Vec<BigRational> {
        self.edge_weights.get_or_init(|| {
            (0..self.top_complex().edge_count())
                .map(|e| {
                    let mut w = BigRational::zero();
                    let mut factor = BigRational::one();
                    for k in 1..=self.depth() {
                        factor *= half();
                        if let EdgeImage::Edge { id, .. } = self.projection(k).edge_image(e) {
                            w += &self.level(k).edge(id).length * &factor;
                        }
                    }
                    w
                })
                .collect()
        })
    }

    /// The weighted product metric between two points of the top level,
    /// truncated at depth J (the ideal limit adds at most tail_bound(J)).
    pub fn limit_distance_points(&self, p: &PointLocation, q: &PointLocation) -> BigRational {
        let mut total = BigRational::zero();
        let mut factor = BigRational::one();
        for k in 1..=self.depth() {
            factor *= half();
            let proj = self.projection(k);
            let (pp, qq) = (proj.map_point(p), proj.map_point(q));
            if pp != qq {
                total += self.level(k).distance(&pp, &qq) * &factor;
            }
        }
        total
    }

    /// Spec-level limit distance: truncated value plus the certified tail
    /// interval [0, 2^-J], which collapses for equal (stabilized) points.
    pub fn limit_distance(&self, p: &PointLocation, q: &PointLocation) -> (Scalar, Scalar) {
        if p == q {
            return (Scalar::zero(), Scalar::zero());
        }
        (
            Scalar::exact(self.limit_distance_points(p, q)),
            self.tail_bound(self.depth()),
        )
    }

    /// Weighted length of a trajectory on the top level; an upper bound for
    /// the product-metric distance of its endpoints.
    pub fn weighted_trajectory_length(&self, traj: &crate::space::Trajectory) -> BigRational {
        let weights = self.edge_weights();
        traj.segs
            .iter()
            .map(|(e, a, b)| {
                let span = if a <= b { b - a } else { a - b };
                span * &weights[*e]
            })
            .sum()
    }

    /// Exact geometric tail sum_{j>k} 2^-j = 2^-k of the ideal system
    /// (level metrics are bounded by 1).
    pub fn tail_bound(&self, k: usize) -> Scalar {
        Scalar::exact(pow2_inv(k))
    }

    /// Lipschitz constant of the level-k projection with respect to the
    /// product metric: d_k <= 2^k * D term by term.
    pub fn projection_lipschitz(&self, k: usize) -> Scalar {
        Scalar::exact(pow2_inv(k).recip())
    }
}

/// A compatible word sequence across the levels.
#[derive(Clone, Debug)]
pub struct Thread {
    words: Vec<Word>,
    stabilization: Option<usize>,
}

impl Thread {
    /// The thread of a top-level class: w_k = r_{J,k#}(w).
    pub fn from_top(system: &InverseSystem, w: &Word) -> Result<Thread> {
        system.top_complex().presentation().validate_word(w)?;
        let words: Vec<Word> = (1..=system.depth())
            .map(|k| system.project_word(w, k))
            .collect();
        Ok(Thread::assemble(system, words))
    }

    /// Validates compatibility r_{j+1,j#}(w_{j+1}) = w_j at every level.
    pub fn new(system: &InverseSystem, words: Vec<Word>) -> Result<Thread> {
        if words.len() != system.depth() {
            return Err(Error::IncompatibleThread(format!(
                "expected {} words, got {}",
                system.depth(),
                words.len()
            )));
        }
        for (k, w) in words.iter().enumerate() {
            system.level(k + 1).presentation().validate_word(w)?;
        }
        for j in 0..system.depth() - 1 {
            let stepdown = induced_hom(
                &system.bondings[j],
                system.level(j + 2),
                system.level(j + 1),
            )
            .expect("bondings induce homomorphisms");
            let image = stepdown.apply(&words[j + 1]);
            match system.level(j + 1).presentation().equal(&image, &words[j]) {
                Triviality::Trivial => {}
                _ => {
                    return Err(Error::IncompatibleThread(format!(
                        "levels {} and {} disagree",
                        j + 1,
                        j + 2
                    )))
                }
            }
        }
        Ok(Thread::assemble(system, words))
    }

    fn assemble(system: &InverseSystem, words: Vec<Word>) -> Thread {
        let stabilization = (1..=system.depth()).find(|&k| {
            let mut img = words[k - 1].clone();
            (k..system.depth()).all(|j| {
                let section = induced_hom(
                    &system.sections[j - 1],
                    system.level(j),
                    system.level(j + 1),
                )
                .expect("sections induce homomorphisms");
                img = section.apply(&img);
                img == words[j].reduce()
            })
        });
        Thread {
            words,
            stabilization,
        }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn top_word(&self) -> &Word {
        self.words.last().unwrap()
    }

    pub fn word_at(&self, k: usize) -> &Word {
        &self.words[k - 1]
    }

    /// Smallest level from which the thread is section-stable, if any.
    pub fn stabilization_index(&self) -> Option<usize> {
        self.stabilization
    }
}

/// Per-level triviality verdicts of a thread under the shape homomorphism.
#[derive(Clone, Debug)]
pub struct PsiReport {
    pub verdicts: Vec<Triviality>,
    pub trivial_to_depth: bool,
    pub first_nontrivial_level: Option<usize>,
}

/// The shape image of a thread: triviality of every level word. Levels with
/// free presentations are decided exactly.
pub fn psi(system: &InverseSystem, thread: &Thread) -> PsiReport {
    let verdicts: Vec<Triviality> = thread
        .words()
        .iter()
        .enumerate()
        .map(|(i, w)| system.level(i + 1).presentation().is_trivial(w))
        .collect();
    let first_nontrivial_level = verdicts
        .iter()
        .position(|v| *v == Triviality::Nontrivial)
        .map(|i| i + 1);
    PsiReport {
        trivial_to_depth: verdicts.iter().all(|v| *v == Triviality::Trivial),
        verdicts,
        first_nontrivial_level,
    }
}

/// Builds the truncated shrinking wedge of the given pieces: level k is the
/// wedge of the first k pieces (cycled when depth exceeds the list), the
/// bonding collapses the newest piece to the basepoint, and the section is
/// the inclusion of the partial wedge.
pub fn shrinking_wedge(pieces: &[Arc<MetricComplex>], depth: usize) -> Result<InverseSystem> {
    if pieces.is_empty() || depth == 0 {
        return Err(Error::InvalidSystem("need at least one piece and depth >= 1".into()));
    }
    let chosen: Vec<&Arc<MetricComplex>> =
        (0..depth).map(|j| &pieces[j % pieces.len()]).collect();
    let mut levels: Vec<MetricComplex> = Vec::with_capacity(depth);
    let mut bondings = Vec::new();
    let mut sections = Vec::new();
    let mut edge_levels: Vec<usize> = Vec::new();
    for k in 1..=depth {
        let (wedge, vertex_offsets, edge_offsets) = wedge_complex(&chosen[..k])?;
        if k > 1 {
            let prev = &levels[k - 2];
            // Section: the partial wedge includes as a prefix.
            let inclusion: Vec<usize> = (0..prev.vertex_count()).collect();
            let section = SimplicialMap::from_parts(
                prev,
                &wedge,
                inclusion,
                (0..prev.edge_count())
                    .map(|id| EdgeImage::Edge { id, reversed: false })
                    .collect(),
            )?;
            // Bonding: collapse the newest piece to the basepoint.
            let mut vmap: Vec<usize> = (0..wedge.vertex_count()).collect();
            for v in vertex_offsets[k - 1]..wedge.vertex_count() {
                vmap[v] = 0;
            }
            let emap: Vec<EdgeImage> = (0..wedge.edge_count())
                .map(|id| {
                    if id < edge_offsets[k - 1] {
                        EdgeImage::Edge { id, reversed: false }
                    } else {
                        EdgeImage::Collapsed(0)
                    }
                })
                .collect();
            let bonding = SimplicialMap::from_parts(&wedge, prev, vmap, emap)?;
            bondings.push(bonding);
            sections.push(section);
        }
        if k == depth {
            edge_levels = (0..wedge.edge_count())
                .map(|e| {
                    (1..=depth)
                        .find(|&piece| e < *edge_offsets.get(piece).unwrap_or(&usize::MAX))
                        .unwrap_or(depth)
                })
                .collect();
        }
        levels.push(wedge);
    }
    InverseSystem::with_edge_levels(levels, bondings, sections, Some(edge_levels))
}

/// Wedge of complexes at their basepoints. Returns the complex plus the
/// vertex and edge offsets where each piece starts (piece i occupies edges
/// edge_offsets[i]..edge_offsets[i+1]).
fn wedge_complex(pieces: &[&Arc<MetricComplex>]) -> Result<(MetricComplex, Vec<usize>, Vec<usize>)> {
    let mut edges = Vec::new();
    let mut cells = Vec::new();
    let mut vertex_offsets = Vec::new();
    let mut edge_offsets = Vec::new();
    let mut next_vertex = 1usize;
    for piece in pieces {
        vertex_offsets.push(next_vertex);
        edge_offsets.push(edges.len());
        // Map piece vertices: basepoint -> 0, others -> contiguous block.
        let mut vmap = vec![0usize; piece.vertex_count()];
        for v in 0..piece.vertex_count() {
            if v != piece.basepoint() {
                vmap[v] = next_vertex;
                next_vertex += 1;
            }
        }
        let edge_base = edges.len();
        for e in piece.edges() {
            edges.push(crate::space::Edge {
                u: vmap[e.u],
                v: vmap[e.v],
                length: e.length.clone(),
            });
        }
        for c in piece.cells() {
            let mut boundary = c.boundary.clone();
            for s in boundary.iter_mut() {
                s.edge += edge_base;
            }
            cells.push(crate::space::Cell { boundary });
        }
    }
    edge_offsets.push(edges.len());
    let complex = MetricComplex::with_cells(next_vertex, edges, cells, 0, None)?;
    Ok((complex, vertex_offsets, edge_offsets))
}

/// Loads a system description: either the builder shortcut
/// `{"shrinking_wedge": [...pieces...], "depth": J}` where pieces are file
/// names (resolved against `base_dir`) or inline complex objects, or the
/// explicit form `{"levels": [...], "bondings": [[vertex map]...],
/// "sections": [...]}`.
pub fn load_system(value: &Value, base_dir: &Path) -> Result<InverseSystem> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Malformed("system must be a JSON object".into()))?;
    let load_complex = |v: &Value| -> Result<MetricComplex> {
        match v {
            Value::String(name) => MetricComplex::load(&base_dir.join(name)),
            other => MetricComplex::from_json_value(other),
        }
    };
    if let Some(pieces) = obj.get("shrinking_wedge") {
        let pieces = pieces
            .as_array()
            .ok_or_else(|| Error::Malformed("shrinking_wedge must be a list".into()))?
            .iter()
            .map(|p| load_complex(p).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        let depth = obj
            .get("depth")
            .and_then(Value::as_u64)
            .unwrap_or(pieces.len() as u64) as usize;
        return shrinking_wedge(&pieces, depth);
    }
    let levels = obj
        .get("levels")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Malformed("missing levels".into()))?
        .iter()
        .map(load_complex)
        .collect::<Result<Vec<_>>>()?;
    let vertex_maps = |key: &str| -> Result<Vec<Vec<usize>>> {
        obj.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed(format!("missing {key}")))?
            .iter()
            .map(|m| {
                m.as_array()
                    .ok_or_else(|| Error::Malformed("vertex map must be an array".into()))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|v| v as usize)
                            .ok_or_else(|| Error::Malformed("vertex map entry".into()))
                    })
                    .collect()
            })
            .collect()
    };
    let bond_maps = vertex_maps("bondings")?;
    let sect_maps = vertex_maps("sections")?;
    if bond_maps.len() + 1 != levels.len() || sect_maps.len() + 1 != levels.len() {
        return Err(Error::Malformed("bonding/section count mismatch".into()));
    }
    let bondings = bond_maps
        .into_iter()
        .enumerate()
        .map(|(j, m)| SimplicialMap::from_vertex_map(&levels[j + 1], &levels[j], m))
        .collect::<Result<Vec<_>>>()?;
    let sections = sect_maps
        .into_iter()
        .enumerate()
        .map(|(j, m)| SimplicialMap::from_vertex_map(&levels[j], &levels[j + 1], m))
        .collect::<Result<Vec<_>>>()?;
    InverseSystem::new(levels, bondings, sections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::shapes;

    fn hawaiian(depth: usize) -> Arc<InverseSystem> {
        let circle = Arc::new(shapes::circle(BigRational::one(), 4));
        Arc::new(shrinking_wedge(&[circle], depth).unwrap())
    }

    #[test]
    fn shrinking_wedge_levels_are_free_of_increasing_rank() {
        let sys = hawaiian(4);
        for k in 1..=4 {
            let p = sys.level(k).presentation();
            assert_eq!(p.generator_count(), k);
            assert!(p.is_free());
        }
        // Normalization is a no-op: the wedge diameter is exactly 1.
        for k in 1..=4 {
            assert!(sys.scale(k).is_one());
        }
    }

    #[test]
    fn single_piece_is_constant_system() {
        let circle = Arc::new(shapes::circle(BigRational::one(), 4));
        let sys = shrinking_wedge(&[circle], 1).unwrap();
        assert_eq!(sys.depth(), 1);
        assert_eq!(sys.top_complex().presentation().generator_count(), 1);
    }

    #[test]
    fn wedge_with_filled_triangle_keeps_rank_one() {
        let circle = Arc::new(shapes::circle(BigRational::one(), 4));
        let tri = Arc::new(shapes::filled_triangle());
        let sys = shrinking_wedge(&[circle, tri], 2).unwrap();
        let p = sys.level(2).presentation();
        // One circle generator plus one triangle generator killed by its
        // relator.
        let free_rank = (1..=p.generator_count() as i32)
            .filter(|&g| {
                p.is_trivial(&Word::from_letters(vec![g]).unwrap()) == Triviality::Nontrivial
            })
            .count();
        assert_eq!(free_rank, 1);
    }

    #[test]
    fn tail_bound_examples() {
        let sys = hawaiian(6);
        assert_eq!(sys.tail_bound(1), Scalar::ratio(1, 2));
        assert_eq!(sys.tail_bound(4), Scalar::ratio(1, 16));
        for k in 1..6 {
            assert_eq!(
                &sys.tail_bound(k) * &Scalar::ratio(1, 2),
                sys.tail_bound(k + 1)
            );
        }
    }

    #[test]
    fn limit_distance_to_antipode_of_circle_one() {
        // Distance from the basepoint to the antipode of circle 1 in the
        // depth-6 product metric: sum_{j=1..6} (1/2) / 2^j = 1/2 (1 - 2^-6).
        let sys = hawaiian(6);
        let top = sys.top_complex();
        // Circle 1 has edges 0..4; its antipode is the vertex two quarter
        // edges in.
        let antipode = top.edge(1).v;
        let base = PointLocation::Vertex(top.basepoint());
        let p = PointLocation::Vertex(antipode);
        let expected = BigRational::new(BigInt::from(63), BigInt::from(2 * 64));
        assert_eq!(sys.limit_distance_points(&base, &p), expected);
        let (same, tail) = sys.limit_distance(&p, &p);
        assert_eq!(same, Scalar::zero());
        assert_eq!(tail, Scalar::zero());
    }

    #[test]
    fn projection_collapses_deep_generators() {
        let sys = hawaiian(4);
        let g3 = Word::from_letters(vec![3]).unwrap();
        assert!(sys.project_word(&g3, 2).is_empty());
        assert_eq!(sys.project_word(&g3, 3).letters(), &[3]);
        assert_eq!(sys.project_word(&g3, 4).letters(), &[3]);
    }

    #[test]
    fn embed_then_project_is_identity() {
        let sys = hawaiian(4);
        for k in 1..=4 {
            let composite = sys.projection(k).compose_after(sys.embedding(k));
            assert_eq!(composite, SimplicialMap::identity(sys.level(k)));
        }
    }

    #[test]
    fn point_close_to_its_projection_embedding() {
        // d(x, t_k(r_k(x))) < 2^-k for every sampled point.
        use rand::{Rng, SeedableRng};
        let sys = hawaiian(5);
        let top = sys.top_complex();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let e = rng.gen_range(0..top.edge_count());
            let off = BigRational::new(BigInt::from(rng.gen_range(1..8)), BigInt::from(8));
            let x = PointLocation::on_edge(top, e, off);
            for k in 1..=5 {
                let back = sys
                    .embedding(k)
                    .map_point(&sys.projection(k).map_point(&x));
                let d = sys.limit_distance_points(&x, &back);
                assert!(
                    Scalar::exact(d) < sys.tail_bound(k),
                    "tail estimate violated at level {k}"
                );
            }
        }
    }

    #[test]
    fn projection_lipschitz_certificate_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let sys = hawaiian(5);
        let top = sys.top_complex();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let e1 = rng.gen_range(0..top.edge_count());
            let e2 = rng.gen_range(0..top.edge_count());
            let x = PointLocation::on_edge(
                top,
                e1,
                BigRational::new(BigInt::from(rng.gen_range(0..8)), BigInt::from(8)),
            );
            let y = pick(&mut rng, top, e2);
            let dd = sys.limit_distance_points(&x, &y);
            for k in 1..=5 {
                let (px, py) = (
                    sys.projection(k).map_point(&x),
                    sys.projection(k).map_point(&y),
                );
                let dk = sys.level(k).distance(&px, &py);
                assert!(
                    Scalar::exact(dk)
                        <= &sys.projection_lipschitz(k) * &Scalar::exact(dd.clone()),
                    "projection to level {k} is not 2^k-Lipschitz on this pair"
                );
            }
        }
    }

    fn pick(
        rng: &mut rand_chacha::ChaCha8Rng,
        top: &MetricComplex,
        e: usize,
    ) -> PointLocation {
        use rand::Rng;
        PointLocation::on_edge(
            top,
            e,
            BigRational::new(BigInt::from(rng.gen_range(0..8)), BigInt::from(8)),
        )
    }

    #[test]
    fn thread_compatibility_and_psi() {
        let sys = hawaiian(4);
        let w = Word::from_letters(vec![2]).unwrap();
        let t = Thread::from_top(&sys, &w).unwrap();
        Thread::new(&sys, t.words().to_vec()).unwrap();
        let report = psi(&sys, &t);
        assert!(!report.trivial_to_depth);
        assert_eq!(report.first_nontrivial_level, Some(2));
        assert_eq!(report.verdicts[0], Triviality::Trivial);

        let identity = Thread::from_top(&sys, &Word::identity()).unwrap();
        assert!(psi(&sys, &identity).trivial_to_depth);
        assert_eq!(identity.stabilization_index(), Some(1));

        // Commutator threads stay nontrivial from their defining level on.
        let comm = Word::from_letters(vec![1, 3, -1, -3]).unwrap();
        let tc = Thread::from_top(&sys, &comm).unwrap();
        let rc = psi(&sys, &tc);
        assert_eq!(rc.first_nontrivial_level, Some(3));
        for lvl in 3..=4 {
            assert_eq!(rc.verdicts[lvl - 1], Triviality::Nontrivial);
        }
    }

    #[test]
    fn incompatible_thread_is_rejected() {
        let sys = hawaiian(3);
        let words = vec![
            Word::from_letters(vec![1]).unwrap(),
            Word::identity(),
            Word::identity(),
        ];
        assert!(Thread::new(&sys, words).is_err());
    }
}
