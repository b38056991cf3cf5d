//! Certified two-sided bounds for the pseudometric rho on the fundamental
//! group: rho(a, b) is the infimum of the uniform distance over all
//! representative pairs, reported as an interval, never a point estimate.
//!
//! Upper bounds come from a budgeted search over representative pairs:
//! the canonical representative of a b^-1 against the constant loop,
//! inverse pairs, simultaneous translations (all isometries of rho), and,
//! on inverse systems, pushforward pairs (alpha, t_k r_k alpha) for levels
//! k that kill the class. Lower bounds come from separation margins: two
//! loops of a metric complex that stay uniformly closer than half the
//! systole are homotopic, so a class pair separated by a presentation (or
//! by a level projection, with its 2^k Lipschitz constant) keeps every
//! representative pair at least that margin apart.

use crate::error::{Error, Result};
use crate::group::{word_to_loop, Triviality, Word};
use crate::limitsys::InverseSystem;
use crate::loops::{
    concatenate, path_conjugate, uniform_distance, uniform_distance_at, DiscreteLoop,
    DiscretePath,
};
use crate::scalar::Scalar;
use crate::space::{AnalyticSpace, MetricComplex, Point, SpaceHandle};
use num::integer::lcm;
use rand::Rng;
use serde_json::{json, Value};
use std::sync::Arc;

#[derive(Clone)]
pub enum SpaceClass {
    Complex(Arc<MetricComplex>),
    System(Arc<InverseSystem>),
    Analytic(AnalyticSpace),
}

impl SpaceClass {
    pub fn handle(&self) -> SpaceHandle {
        match self {
            SpaceClass::Complex(c) => SpaceHandle::Complex(c.clone()),
            SpaceClass::System(s) => SpaceHandle::Limit(s.clone()),
            SpaceClass::Analytic(a) => SpaceHandle::Analytic(a.clone()),
        }
    }

    pub fn validate_word(&self, w: &Word) -> Result<()> {
        match self {
            SpaceClass::Complex(c) => c.presentation().validate_word(w),
            SpaceClass::System(s) => s.top_complex().presentation().validate_word(w),
            SpaceClass::Analytic(_) => {
                if w.max_generator() <= 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidWord(
                        "analytic models have a single generator".into(),
                    ))
                }
            }
        }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            SpaceClass::Complex(c) => c.presentation().generator_count(),
            SpaceClass::System(s) => s.top_complex().presentation().generator_count(),
            SpaceClass::Analytic(_) => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Budget {
    /// Samples per unit length for loop grids.
    pub grid: u32,
    /// Translation classes may exceed the query length by this much.
    pub extra_len: usize,
    /// How many simultaneous-translation candidates to try.
    pub translations: usize,
    /// Radius-ladder depth for the punctured plane (representatives of
    /// shrinking size 1/n for n = 1..=ladder).
    pub ladder: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            grid: 64,
            extra_len: 4,
            translations: 16,
            ladder: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub enum LowerWitness {
    /// The classes are provably equal; rho = 0.
    IdenticalClasses,
    /// Single complex: the classes differ, so representatives stay at least
    /// systole/2 apart.
    SystoleMargin { systole: Scalar },
    /// System: level k separates the classes; the 2^k-Lipschitz projection
    /// turns the level margin into 2^-k * systole_k / 2.
    Projection { level: usize, level_systole: Scalar },
    /// Cylinder: the 1-Lipschitz circle projection gives half the
    /// circumference.
    CircleProjection { circumference: f64 },
    /// No projection separated the classes up to the truncation depth.
    NotSeparated { depth: Option<usize>, reason: String },
    /// The word problem instance was undecided; no positive bound claimed.
    Undecided { reason: String },
}

#[derive(Clone, Debug)]
pub struct UpperWitness {
    pub kind: String,
    /// Representative pair as words where applicable (for transport).
    pub pair: Option<(Word, Word)>,
    pub mu_grid_max: Scalar,
    pub mu_upper: Scalar,
    pub grid: usize,
}

#[derive(Clone, Debug)]
pub struct RhoInterval {
    pub lower: Scalar,
    pub upper: Scalar,
    pub lower_witness: LowerWitness,
    pub upper_witness: UpperWitness,
}

impl RhoInterval {
    pub fn to_json_value(&self) -> Value {
        json!({
            "lower": self.lower.to_string(),
            "upper": self.upper.to_string(),
            "lower_witness": lower_witness_json(&self.lower_witness),
            "upper_witness": upper_witness_json(&self.upper_witness),
            "verdict": if self.upper.is_zero() {
                "trivial"
            } else if self.lower > Scalar::zero() {
                "separated"
            } else {
                "unknown"
            },
        })
    }
}

fn lower_witness_json(w: &LowerWitness) -> Value {
    match w {
        LowerWitness::IdenticalClasses => json!({ "kind": "identical-classes" }),
        LowerWitness::SystoleMargin { systole } => json!({
            "kind": "systole-margin", "systole": systole.to_string(),
        }),
        LowerWitness::Projection { level, level_systole } => json!({
            "kind": "projection-margin", "level": level,
            "level_systole": level_systole.to_string(),
        }),
        LowerWitness::CircleProjection { circumference } => json!({
            "kind": "circle-projection", "circumference": circumference,
        }),
        LowerWitness::NotSeparated { depth, reason } => json!({
            "kind": "not-separated", "depth": depth, "reason": reason,
        }),
        LowerWitness::Undecided { reason } => json!({
            "kind": "undecided", "reason": reason,
        }),
    }
}

fn upper_witness_json(w: &UpperWitness) -> Value {
    json!({
        "kind": w.kind,
        "pair": w.pair.as_ref().map(|(a, b)| json!([a.letters(), b.letters()])),
        "mu_grid_max": w.mu_grid_max.to_string(),
        "mu_upper": w.mu_upper.to_string(),
        "grid": w.grid,
    })
}

/// Certified upper bound: the best representative pair found within the
/// budget. Always succeeds; with an empty search the canonical pair is
/// still a valid bound.
pub fn rho_upper(space: &SpaceClass, a: &Word, b: &Word, budget: &Budget) -> Result<UpperWitness> {
    space.validate_word(a)?;
    space.validate_word(b)?;
    let w = a.mul(&b.inverse());
    if w.is_empty() {
        return Ok(UpperWitness {
            kind: "identical-representatives".into(),
            pair: Some((a.reduce(), b.reduce())),
            mu_grid_max: Scalar::zero(),
            mu_upper: Scalar::zero(),
            grid: 1,
        });
    }
    match space {
        SpaceClass::Analytic(an) => analytic_upper(an, &w, budget),
        _ => {
            let handle = space.handle();
            let mut best: Option<UpperWitness> = None;
            let mut consider =
                |kind: &str, pair: Option<(Word, Word)>, mu: crate::loops::MuInterval| {
                    let cand = UpperWitness {
                        kind: kind.into(),
                        pair,
                        mu_grid_max: mu.grid_max,
                        mu_upper: mu.upper,
                        grid: mu.grid,
                    };
                    if best.as_ref().map_or(true, |b| cand.mu_upper < b.mu_upper) {
                        best = Some(cand);
                    }
                };
            let constant = DiscreteLoop::constant(handle.clone());
            // Canonical pair (w, e) after translating b away.
            let alpha = word_to_loop(&handle, &w, budget.grid)?;
            consider(
                "canonical-pair",
                Some((w.clone(), Word::identity())),
                uniform_distance(&alpha, &constant)?,
            );
            // Inversion is an isometry of rho.
            let winv = w.inverse();
            let alpha_inv = word_to_loop(&handle, &winv, budget.grid)?;
            consider(
                "inverse-pair",
                Some((winv.clone(), Word::identity())),
                uniform_distance(&alpha_inv, &constant)?,
            );
            // Direct pair (a, b) when both are nontrivial words.
            if !a.reduce().is_empty() && !b.reduce().is_empty() {
                let la = word_to_loop(&handle, &a.reduce(), budget.grid)?;
                let lb = word_to_loop(&handle, &b.reduce(), budget.grid)?;
                consider(
                    "direct-pair",
                    Some((a.reduce(), b.reduce())),
                    uniform_distance(&la, &lb)?,
                );
            }
            // Simultaneous right translations (w c, c).
            for c in translation_candidates(space, &w, budget) {
                let wc = w.mul(&c);
                if wc.len() > w.len() + budget.extra_len || c.len() > w.len() + budget.extra_len {
                    continue;
                }
                if wc.is_empty() || c.is_empty() {
                    continue;
                }
                let l1 = word_to_loop(&handle, &wc, budget.grid)?;
                let l2 = word_to_loop(&handle, &c, budget.grid)?;
                consider(
                    "translated-pair",
                    Some((wc.clone(), c.clone())),
                    uniform_distance(&l1, &l2)?,
                );
            }
            // Level pushforwards on systems.
            if let SpaceClass::System(sys) = space {
                for k in 1..sys.depth() {
                    let img = sys.project_word(&w, k);
                    if sys.level(k).presentation().is_trivial(&img) != Triviality::Trivial {
                        continue;
                    }
                    let proj = sys.projection(k);
                    let emb = sys.embedding(k);
                    let mapped: Vec<Point> = alpha
                        .samples()
                        .iter()
                        .map(|p| {
                            let pl = p.as_location().expect("limit samples are complex points");
                            Point::OnComplex(emb.map_point(&proj.map_point(pl)))
                        })
                        .collect();
                    let beta = DiscreteLoop::new(handle.clone(), mapped)?;
                    consider(
                        &format!("pushforward-level-{k}"),
                        Some((w.clone(), Word::identity())),
                        uniform_distance(&alpha, &beta)?,
                    );
                }
            }
            Ok(best.expect("canonical pair always considered"))
        }
    }
}

fn translation_candidates(space: &SpaceClass, w: &Word, budget: &Budget) -> Vec<Word> {
    let mut out = Vec::new();
    let gens = space.generator_count();
    for g in 1..=gens as i32 {
        out.push(Word::from_letters(vec![g]).unwrap());
        out.push(Word::from_letters(vec![-g]).unwrap());
    }
    // Inverse prefixes of w peel the word down toward the identity.
    for cut in 1..w.len() {
        let prefix = Word::from_letters(w.letters()[..cut].to_vec()).unwrap();
        out.push(prefix.inverse());
    }
    out.truncate(budget.translations);
    out
}

fn analytic_upper(space: &AnalyticSpace, w: &Word, budget: &Budget) -> Result<UpperWitness> {
    let winding: i64 = w.letters().iter().map(|&l| l.signum() as i64).sum();
    match space {
        AnalyticSpace::Cylinder { .. } => {
            let handle = SpaceHandle::Analytic(space.clone());
            let alpha = cylinder_fiber_loop(space, winding, budget.grid)?;
            let constant = DiscreteLoop::constant(handle);
            let mu = uniform_distance(&alpha, &constant)?;
            Ok(UpperWitness {
                kind: "canonical-pair".into(),
                pair: Some((w.reduce(), Word::identity())),
                mu_grid_max: mu.grid_max,
                mu_upper: mu.upper,
                grid: mu.grid,
            })
        }
        AnalyticSpace::PuncturedPlane { .. } => {
            let mut best: Option<UpperWitness> = None;
            for n in 1..=budget.ladder.max(1) {
                let (conj, conj_const) = plane_conjugate_pair(space, winding, n, budget.grid)?;
                let mu = uniform_distance(&conj, &conj_const)?;
                let cand = UpperWitness {
                    kind: format!("radius-ladder-{n}"),
                    pair: None,
                    mu_grid_max: mu.grid_max,
                    mu_upper: mu.upper,
                    grid: mu.grid,
                };
                if best.as_ref().map_or(true, |b| cand.mu_upper < b.mu_upper) {
                    best = Some(cand);
                }
            }
            Ok(best.expect("ladder nonempty"))
        }
    }
}

/// The fiber circle through the basepoint, winding `w` times.
pub fn cylinder_fiber_loop(space: &AnalyticSpace, winding: i64, grid: u32) -> Result<DiscreteLoop> {
    let AnalyticSpace::Cylinder { circumference, basepoint } = space else {
        return Err(Error::Incompatible("not a cylinder".into()));
    };
    let handle = SpaceHandle::Analytic(space.clone());
    if winding == 0 {
        return Ok(DiscreteLoop::constant(handle));
    }
    let length = circumference * winding.unsigned_abs() as f64;
    let n = ((grid as f64 * length).ceil() as usize)
        .max(4)
        .next_power_of_two();
    let samples: Vec<Point> = (0..=n)
        .map(|i| {
            let arc = basepoint[1] + winding as f64 * circumference * (i as f64 / n as f64);
            Point::Cylinder([basepoint[0], arc.rem_euclid(*circumference)])
        })
        .collect();
    DiscreteLoop::new(handle, samples)
}

/// The paper-style witness pair on the punctured plane: the path-conjugate
/// of the circle of radius R/n about the puncture against the conjugate of
/// the constant loop, R the basepoint's distance from the puncture.
pub fn plane_conjugate_pair(
    space: &AnalyticSpace,
    winding: i64,
    n: usize,
    grid: u32,
) -> Result<(DiscreteLoop, DiscreteLoop)> {
    let AnalyticSpace::PuncturedPlane { puncture, basepoint } = space else {
        return Err(Error::Incompatible("not a punctured plane".into()));
    };
    let handle = SpaceHandle::Analytic(space.clone());
    let (dx, dy) = (basepoint[0] - puncture[0], basepoint[1] - puncture[1]);
    let big_r = (dx * dx + dy * dy).sqrt();
    let r = big_r / n as f64;
    let unit = [dx / big_r, dy / big_r];
    let start = [puncture[0] + r * unit[0], puncture[1] + r * unit[1]];
    // gamma: straight path from the basepoint to the small circle.
    let seg_len = (big_r - r).max(f64::MIN_POSITIVE);
    let gn = ((grid as f64 * seg_len).ceil() as usize)
        .max(1)
        .next_power_of_two();
    let gamma_samples: Vec<Point> = (0..=gn)
        .map(|i| {
            let t = i as f64 / gn as f64;
            Point::Plane([
                basepoint[0] + t * (start[0] - basepoint[0]),
                basepoint[1] + t * (start[1] - basepoint[1]),
            ])
        })
        .collect();
    let gamma = DiscretePath::new(handle.clone(), gamma_samples)?;
    let constant = DiscreteLoop::new(handle.clone(), vec![Point::Plane(start); 2])?;
    let alpha = if winding == 0 {
        constant.clone()
    } else {
        // The circle of radius r about the puncture, based at start.
        let theta0 = unit[1].atan2(unit[0]);
        let loops = winding.unsigned_abs() as usize;
        let circle_len = std::f64::consts::TAU * r * loops as f64;
        let cn = ((grid as f64 * circle_len).ceil() as usize)
            .max(8)
            .next_power_of_two();
        let sign = if winding >= 0 { 1.0 } else { -1.0 };
        let samples: Vec<Point> = (0..=cn)
            .map(|i| {
                let theta =
                    theta0 + sign * std::f64::consts::TAU * loops as f64 * (i as f64 / cn as f64);
                Point::Plane([puncture[0] + r * theta.cos(), puncture[1] + r * theta.sin()])
            })
            .collect();
        DiscreteLoop::new(handle.clone(), samples)?
    };
    Ok((
        path_conjugate(&gamma, &alpha)?,
        path_conjugate(&gamma, &constant)?,
    ))
}

/// Certified lower bound from separation margins.
pub fn rho_lower(space: &SpaceClass, a: &Word, b: &Word) -> Result<(Scalar, LowerWitness)> {
    space.validate_word(a)?;
    space.validate_word(b)?;
    let w = a.mul(&b.inverse());
    if w.is_empty() {
        return Ok((Scalar::zero(), LowerWitness::IdenticalClasses));
    }
    match space {
        SpaceClass::Complex(c) => match c.presentation().is_trivial(&w) {
            Triviality::Trivial => Ok((Scalar::zero(), LowerWitness::IdenticalClasses)),
            Triviality::Unknown => Ok((
                Scalar::zero(),
                LowerWitness::Undecided {
                    reason: "word problem undecided on this presentation".into(),
                },
            )),
            Triviality::Nontrivial => match c.systole() {
                Some(sys) => {
                    let margin = Scalar::exact(sys.clone()) / Scalar::from_int(2);
                    Ok((
                        margin,
                        LowerWitness::SystoleMargin {
                            systole: Scalar::exact(sys),
                        },
                    ))
                }
                None => Ok((
                    Scalar::zero(),
                    LowerWitness::Undecided {
                        reason: "nontrivial class but no essential cycle found".into(),
                    },
                )),
            },
        },
        SpaceClass::System(sys) => {
            let mut best: Option<(Scalar, LowerWitness)> = None;
            for k in 1..=sys.depth() {
                let img = sys.project_word(&w, k);
                if sys.level(k).presentation().is_trivial(&img) != Triviality::Nontrivial {
                    continue;
                }
                if let Some(level_sys) = sys.level(k).systole() {
                    let margin = &(&Scalar::exact(level_sys.clone())
                        / &sys.projection_lipschitz(k))
                        / &Scalar::from_int(2);
                    if best.as_ref().map_or(true, |(m, _)| margin > *m) {
                        best = Some((
                            margin,
                            LowerWitness::Projection {
                                level: k,
                                level_systole: Scalar::exact(level_sys),
                            },
                        ));
                    }
                }
            }
            Ok(best.unwrap_or((
                Scalar::zero(),
                LowerWitness::NotSeparated {
                    depth: Some(sys.depth()),
                    reason: "no level projection separates the classes".into(),
                },
            )))
        }
        SpaceClass::Analytic(an) => {
            let winding: i64 = w.letters().iter().map(|&l| l.signum() as i64).sum();
            if winding == 0 {
                return Ok((Scalar::zero(), LowerWitness::IdenticalClasses));
            }
            match an {
                AnalyticSpace::Cylinder { circumference, .. } => Ok((
                    Scalar::approx(circumference / 2.0),
                    LowerWitness::CircleProjection {
                        circumference: *circumference,
                    },
                )),
                AnalyticSpace::PuncturedPlane { .. } => Ok((
                    Scalar::zero(),
                    LowerWitness::NotSeparated {
                        depth: None,
                        reason:
                            "the punctured plane is not compact; its pseudometric is indiscrete"
                                .into(),
                    },
                )),
            }
        }
    }
}

/// Full certified interval.
pub fn rho(space: &SpaceClass, a: &Word, b: &Word, budget: &Budget) -> Result<RhoInterval> {
    let upper = rho_upper(space, a, b, budget)?;
    let (lower, lower_witness) = rho_lower(space, a, b)?;
    debug_assert!(
        lower <= upper.mu_upper,
        "certified bounds crossed: {lower:?} vs {:?}",
        upper.mu_upper
    );
    Ok(RhoInterval {
        lower,
        upper: upper.mu_upper.clone(),
        lower_witness,
        upper_witness: upper,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallVerdict {
    In,
    Out,
    Unknown,
}

impl std::fmt::Display for BallVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BallVerdict::In => write!(f, "In"),
            BallVerdict::Out => write!(f, "Out"),
            BallVerdict::Unknown => write!(f, "Unknown"),
        }
    }
}

/// Membership of `a` in the open ball B_rho(e, r).
pub fn ball_membership(
    space: &SpaceClass,
    a: &Word,
    radius: &Scalar,
    budget: &Budget,
) -> Result<(BallVerdict, RhoInterval)> {
    let interval = rho(space, a, &Word::identity(), budget)?;
    let verdict = if interval.upper < *radius {
        BallVerdict::In
    } else if interval.lower >= *radius {
        BallVerdict::Out
    } else {
        BallVerdict::Unknown
    };
    Ok((verdict, interval))
}

/// A reduced pseudorandom word of length <= max_len (possibly empty).
pub fn random_reduced_word<R: Rng>(rng: &mut R, generators: usize, max_len: usize) -> Word {
    if generators == 0 {
        return Word::identity();
    }
    let len = rng.gen_range(0..=max_len);
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = rng.gen_range(1..=generators as i32);
        let l = if rng.gen_bool(0.5) { g } else { -g };
        if letters.last().map_or(false, |&last| last == -l) {
            continue;
        }
        letters.push(l);
    }
    Word::from_letters(letters).unwrap_or_else(|_| Word::identity())
}

/// Nonempty variant.
pub fn random_nontrivial_word<R: Rng>(rng: &mut R, generators: usize, max_len: usize) -> Word {
    loop {
        let w = random_reduced_word(rng, generators, max_len.max(1));
        if !w.is_empty() {
            return w;
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LemmaChainReport {
    pub triples: usize,
    pub reversal_exact: usize,
    pub translation_exact: usize,
    pub max_law_exact: usize,
    pub triangle_consistent: usize,
    pub violations: Vec<Value>,
}

impl LemmaChainReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Mechanical verification of the pseudometric lemma chain on sampled
/// triples: grid-exact reversal and translation isometries, the grid-exact
/// concatenation max-law, and interval-consistent triangle inequalities.
pub fn verify_lemma_chain(
    space: &SpaceClass,
    samples: usize,
    seed: u64,
    budget: &Budget,
) -> Result<LemmaChainReport> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let gens = space.generator_count();
    let handle = space.handle();
    let mut report = LemmaChainReport::default();
    for _ in 0..samples {
        let a = random_reduced_word(&mut rng, gens, 6);
        let b = random_reduced_word(&mut rng, gens, 6);
        let c = random_reduced_word(&mut rng, gens, 6);
        report.triples += 1;
        let la = word_to_loop(&handle, &a, budget.grid)?;
        let lb = word_to_loop(&handle, &b, budget.grid)?;
        let lc = word_to_loop(&handle, &c, budget.grid)?;
        let echo = json!([a.letters(), b.letters(), c.letters()]);

        // (i) Reversal is a grid-exact isometry of mu.
        let direct = uniform_distance(&la, &lb)?;
        let reversed = uniform_distance(&la.reverse(), &lb.reverse())?;
        if direct.grid_max == reversed.grid_max && direct.upper == reversed.upper {
            report.reversal_exact += 1;
        } else {
            report
                .violations
                .push(json!({ "check": "reversal", "triple": echo }));
        }

        // (ii) Right translation by a representative of c is grid-exact.
        let cat_a = concatenate(&la, &lc)?;
        let cat_b = concatenate(&lb, &lc)?;
        let translated = uniform_distance(&cat_a, &cat_b)?;
        let matched = lcm(lcm(la.grid(), lb.grid()), lc.grid());
        let base = uniform_distance_at(&la, &lb, matched)?;
        if translated.grid_max == base.grid_max {
            report.translation_exact += 1;
        } else {
            report
                .violations
                .push(json!({ "check": "translation", "triple": echo }));
        }

        // (iii) Concatenating near-identity witnesses realizes the max-law.
        let constant = DiscreteLoop::constant(handle.clone());
        let cat = concatenate(&la, &lb)?;
        let cat_const = concatenate(&constant, &constant)?;
        let mu_cat = uniform_distance(&cat, &cat_const)?;
        let m = lcm(la.grid(), lb.grid());
        let mu_a = uniform_distance_at(&la, &constant, m)?;
        let mu_b = uniform_distance_at(&lb, &constant, m)?;
        if mu_cat.grid_max == mu_a.grid_max.clone().max(mu_b.grid_max.clone()) {
            report.max_law_exact += 1;
        } else {
            report
                .violations
                .push(json!({ "check": "max-law", "triple": echo }));
        }

        // (iv) Triangle inequality at interval level:
        // lower(a, c) <= upper(a, b) + upper(b, c).
        let (lower_ac, _) = rho_lower(space, &a, &c)?;
        let up_ab = rho_upper(space, &a, &b, budget)?;
        let up_bc = rho_upper(space, &b, &c, budget)?;
        if lower_ac <= &up_ab.mu_upper + &up_bc.mu_upper {
            report.triangle_consistent += 1;
        } else {
            report
                .violations
                .push(json!({ "check": "triangle", "triple": echo }));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct MetricIndependenceReport {
    /// d2 <= l21 * d1 and d1 <= l12 * d2, edgewise extremes.
    pub l21: Scalar,
    pub l12: Scalar,
    pub samples: usize,
    pub transport_ok: usize,
    pub verdict_ok: usize,
    pub violations: Vec<Value>,
}

impl MetricIndependenceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares rho under two positive edge-length assignments of the same
/// complex: bi-Lipschitz constants from edgewise length ratios, witness
/// transport (a metric-1 witness pair re-measured in metric 2 obeys the
/// l21 scaling), and In/Out verdict agreement under matched radius scaling.
pub fn metric_independence_check(
    base: &Arc<MetricComplex>,
    other: &Arc<MetricComplex>,
    samples: usize,
    radii: &[Scalar],
    seed: u64,
    budget: &Budget,
) -> Result<MetricIndependenceReport> {
    use rand::SeedableRng;
    if base.edge_count() != other.edge_count()
        || base.vertex_count() != other.vertex_count()
        || base.basepoint() != other.basepoint()
    {
        return Err(Error::Incompatible(
            "metrics must share the underlying complex".into(),
        ));
    }
    for (e1, e2) in base.edges().iter().zip(other.edges()) {
        if e1.u != e2.u || e1.v != e2.v {
            return Err(Error::Incompatible("edge structure differs".into()));
        }
    }
    let mut l21 = Scalar::zero();
    let mut l12 = Scalar::zero();
    for (e1, e2) in base.edges().iter().zip(other.edges()) {
        let r21 = Scalar::exact(&e2.length / &e1.length);
        let r12 = Scalar::exact(&e1.length / &e2.length);
        l21 = l21.max(r21);
        l12 = l12.max(r12);
    }
    let s1 = SpaceClass::Complex(base.clone());
    let s2 = SpaceClass::Complex(other.clone());
    let h2 = s2.handle();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let gens = base.presentation().generator_count();
    let mut report = MetricIndependenceReport {
        l21: l21.clone(),
        l12: l12.clone(),
        samples,
        transport_ok: 0,
        verdict_ok: 0,
        violations: Vec::new(),
    };
    for _ in 0..samples {
        let w = random_reduced_word(&mut rng, gens, 6);
        let echo = json!(w.letters());
        let i1 = rho(&s1, &w, &Word::identity(), budget)?;
        // Transport the metric-1 witness pair into metric 2.
        let transported: Option<Scalar> = match &i1.upper_witness.pair {
            Some((wa, wb)) => {
                let la = if wa.is_empty() {
                    DiscreteLoop::constant(h2.clone())
                } else {
                    word_to_loop(&h2, wa, budget.grid)?
                };
                let lb = if wb.is_empty() {
                    DiscreteLoop::constant(h2.clone())
                } else {
                    word_to_loop(&h2, wb, budget.grid)?
                };
                Some(uniform_distance(&la, &lb)?.upper)
            }
            None => None,
        };
        let bound = &l21 * &i1.upper;
        match &transported {
            Some(t) if *t <= bound => report.transport_ok += 1,
            None => report.transport_ok += 1,
            Some(t) => report.violations.push(json!({
                "check": "witness-transport",
                "word": echo,
                "transported": t.to_string(),
                "allowed": bound.to_string(),
            })),
        }
        let upper2 = match transported {
            Some(t) => t,
            None => rho_upper(&s2, &w, &Word::identity(), budget)?.mu_upper,
        };
        let (lower2, _) = rho_lower(&s2, &w, &Word::identity())?;
        let mut ok = true;
        for r in radii {
            let v1 = classify(&i1.lower, &i1.upper, r);
            // In at radius r in metric 1 forces In at l21 * r in metric 2.
            if v1 == BallVerdict::In {
                let scaled = &l21 * r;
                if classify(&lower2, &upper2, &scaled) == BallVerdict::Out {
                    ok = false;
                }
            }
            // Out at radius r in metric 1 forces Out at r / l12 in metric 2.
            if v1 == BallVerdict::Out {
                let scaled = r / &l12;
                if classify(&lower2, &upper2, &scaled) == BallVerdict::In {
                    ok = false;
                }
            }
        }
        if ok {
            report.verdict_ok += 1;
        } else {
            report.violations.push(json!({
                "check": "verdict-agreement",
                "word": echo,
            }));
        }
    }
    Ok(report)
}

fn classify(lower: &Scalar, upper: &Scalar, radius: &Scalar) -> BallVerdict {
    if upper < radius {
        BallVerdict::In
    } else if lower >= radius {
        BallVerdict::Out
    } else {
        BallVerdict::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::shapes;
    use num::rational::BigRational;
    use num::One;

    fn wedge2() -> SpaceClass {
        SpaceClass::Complex(Arc::new(shapes::wedge_of_circles(
            &[BigRational::one(), BigRational::one()],
            4,
        )))
    }

    #[test]
    fn identical_classes_have_zero_interval() {
        let s = wedge2();
        let w = Word::from_letters(vec![1, 2, -2, -1]).unwrap();
        let i = rho(&s, &w, &Word::identity(), &Budget::default()).unwrap();
        assert_eq!(i.lower, Scalar::zero());
        assert_eq!(i.upper, Scalar::zero());
    }

    #[test]
    fn wedge_generator_interval() {
        let s = wedge2();
        let g = Word::from_letters(vec![1]).unwrap();
        let i = rho(&s, &g, &Word::identity(), &Budget::default()).unwrap();
        // Lower bound is exactly systole/2 = 1/2; the canonical upper is
        // 1/2 plus grid slack.
        assert_eq!(i.lower, Scalar::ratio(1, 2));
        assert!(i.upper >= Scalar::ratio(1, 2));
        assert!(i.upper <= Scalar::ratio(1, 2) + Scalar::ratio(1, 16));
    }

    #[test]
    fn ball_membership_verdicts() {
        let s = wedge2();
        let g = Word::from_letters(vec![1]).unwrap();
        let b = Budget::default();
        let (v, _) = ball_membership(&s, &Word::identity(), &Scalar::ratio(1, 100), &b).unwrap();
        assert_eq!(v, BallVerdict::In);
        let (v, _) = ball_membership(&s, &g, &Scalar::ratio(1, 4), &b).unwrap();
        assert_eq!(v, BallVerdict::Out);
        let (v, _) = ball_membership(&s, &g, &Scalar::from_int(10), &b).unwrap();
        assert_eq!(v, BallVerdict::In);
    }

    #[test]
    fn verdicts_respect_normality_on_conjugates() {
        let s = wedge2();
        let b = Budget::default();
        let g = Word::from_letters(vec![1]).unwrap();
        let conj = Word::from_letters(vec![2, 1, -2]).unwrap();
        let inv = g.inverse();
        let r = Scalar::ratio(1, 4);
        let (v1, _) = ball_membership(&s, &g, &r, &b).unwrap();
        let (v2, _) = ball_membership(&s, &conj, &r, &b).unwrap();
        let (v3, _) = ball_membership(&s, &inv, &r, &b).unwrap();
        assert_eq!(v1, v2);
        assert_eq!(v1, v3);
    }

    #[test]
    fn out_verdicts_are_sound_against_free_reduction() {
        use rand::SeedableRng;
        let s = wedge2();
        let b = Budget::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let w = random_reduced_word(&mut rng, 2, 8);
            let (v, _) = ball_membership(&s, &w, &Scalar::ratio(1, 4), &b).unwrap();
            if v == BallVerdict::Out {
                assert!(!w.reduce().is_empty(), "Out verdict on a trivial class");
            }
        }
    }

    #[test]
    fn hawaiian_generator_intervals() {
        let circle = Arc::new(shapes::circle(BigRational::one(), 4));
        let sys = Arc::new(crate::limitsys::shrinking_wedge(&[circle], 6).unwrap());
        let s = SpaceClass::System(sys);
        let budget = Budget::default();
        for k in 1..=6usize {
            let g = Word::from_letters(vec![k as i32]).unwrap();
            let i = rho(&s, &g, &Word::identity(), &budget).unwrap();
            let lo = Scalar::pow2_inv(k as u32 + 1);
            let hi = Scalar::pow2_inv(k as u32);
            assert_eq!(i.lower, lo, "lower bound at level {k}");
            assert!(
                i.upper <= &hi + &Scalar::ratio(1, 50),
                "upper bound at level {k}: {}",
                i.upper
            );
            assert!(i.lower <= i.upper);
        }
    }

    #[test]
    fn lemma_chain_on_wedge() {
        let s = wedge2();
        let report = verify_lemma_chain(&s, 25, 7, &Budget::default()).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
        assert_eq!(report.triples, 25);
        assert_eq!(report.reversal_exact, 25);
        assert_eq!(report.translation_exact, 25);
        assert_eq!(report.max_law_exact, 25);
        assert_eq!(report.triangle_consistent, 25);
    }

    #[test]
    fn punctured_plane_upper_shrinks() {
        let plane = AnalyticSpace::punctured_plane([0.0, 0.0], [1.0, 0.0]).unwrap();
        let s = SpaceClass::Analytic(plane);
        let g = Word::from_letters(vec![1]).unwrap();
        let mut budget = Budget {
            ladder: 1,
            grid: 256,
            ..Budget::default()
        };
        let i1 = rho(&s, &g, &Word::identity(), &budget).unwrap();
        budget.ladder = 16;
        let i16 = rho(&s, &g, &Word::identity(), &budget).unwrap();
        assert_eq!(i1.lower, Scalar::zero());
        assert!(i1.upper.to_f64() <= 2.0 + 0.05);
        assert!(i16.upper.to_f64() <= 2.0 / 16.0 + 0.05);
    }

    #[test]
    fn cylinder_is_separated() {
        let cyl = AnalyticSpace::cylinder(std::f64::consts::TAU, [0.0, 0.0]).unwrap();
        let s = SpaceClass::Analytic(cyl);
        let g = Word::from_letters(vec![1]).unwrap();
        let i = rho(&s, &g, &Word::identity(), &Budget::default()).unwrap();
        assert!(i.lower.to_f64() >= std::f64::consts::PI - 1e-9);
        assert!(i.upper.to_f64() >= i.lower.to_f64() - 1e-9);
    }

    #[test]
    fn metric_independence_on_stretched_wedge() {
        let c1 = Arc::new(shapes::wedge_of_circles(
            &[BigRational::one(), BigRational::one()],
            4,
        ));
        let c2 = Arc::new(shapes::wedge_of_circles(
            &[BigRational::from_integer(2.into()), BigRational::one()],
            4,
        ));
        let radii = vec![
            Scalar::ratio(1, 4),
            Scalar::ratio(1, 2),
            Scalar::from_int(1),
        ];
        let report =
            metric_independence_check(&c1, &c2, 20, &radii, 3, &Budget::default()).unwrap();
        assert_eq!(report.l21, Scalar::from_int(2));
        assert_eq!(report.l12, Scalar::from_int(1));
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn scaled_metric_scales_rho_exactly() {
        let c1 = Arc::new(shapes::wedge_of_circles(
            &[BigRational::one(), BigRational::one()],
            4,
        ));
        let three = BigRational::from_integer(3.into());
        let c2 = Arc::new(c1.scaled(&three));
        let s1 = SpaceClass::Complex(c1);
        let s2 = SpaceClass::Complex(c2);
        let g = Word::from_letters(vec![1, 2]).unwrap();
        let b = Budget::default();
        let i1 = rho(&s1, &g, &Word::identity(), &b).unwrap();
        let i2 = rho(&s2, &g, &Word::identity(), &b).unwrap();
        assert_eq!(i2.lower, &Scalar::from_int(3) * &i1.lower);
        assert_eq!(i2.upper, &Scalar::from_int(3) * &i1.upper);
    }
}
