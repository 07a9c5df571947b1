//! The approximate cone map F♯, orbit tracing, decomposition into simple
//! maps, and the refinement making every ray's forward orbit cyclic.
//!
//! For a fan Δ compatible with F, the partial map F♯: Δ → Δ sends each cone
//! to the smallest cone of Δ containing its image. Ray images are always
//! defined; a sector image is undefined exactly when it straddles a ray of Δ.
//! [`deterministic_refinement`] refines Δ until undefinedness can no longer
//! be reached from any ray, which is what makes rotation numbers computable
//! by pure cone bookkeeping.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{ConeRef, Fan, Ray, Sector};
use crate::plmap::{Mat2, PLAutomorphism};
use crate::refine::{common_refinement, regularize_fan, simple_merge, simple_split, split_sequence};

/// Kind of a simple map between regular fans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimpleStepKind {
    /// The image fan equals the target fan.
    Isomorphism,
    /// The target fan is the simple split of the image fan at one sector.
    Split,
    /// The target fan is the simple merge of the image fan at one ray.
    Merge,
}

impl fmt::Display for SimpleStepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleStepKind::Isomorphism => write!(f, "isomorphism"),
            SimpleStepKind::Split => write!(f, "split"),
            SimpleStepKind::Merge => write!(f, "merge"),
        }
    }
}

/// One step of a decomposition into simple maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleMapStep {
    pub kind: SimpleStepKind,
    /// The automorphism of this step, compatible with `source_fan`.
    pub map: PLAutomorphism,
    pub source_fan: Fan,
    pub target_fan: Fan,
    /// The ray added (split) or removed (merge) between the image of the
    /// source fan and the target fan; None for isomorphisms.
    pub changed_ray: Option<Ray>,
}

impl SimpleMapStep {
    /// Checks the structural contract of the step: the map is compatible with
    /// the source fan and its image fan relates to the target fan per `kind`.
    pub fn verify(&self) -> Result<()> {
        let on_source = self.map.restricted_to(&self.source_fan)?;
        let image = on_source.image_fan();
        match self.kind {
            SimpleStepKind::Isomorphism => {
                if image != self.target_fan {
                    return Err(Error::IncompatibleFan);
                }
            }
            SimpleStepKind::Split => {
                let r = self.changed_ray.as_ref().ok_or(Error::IncompatibleFan)?;
                let idx = self.target_fan.ray_index(r).ok_or(Error::IncompatibleFan)?;
                if simple_merge(&self.target_fan, idx)? != image {
                    return Err(Error::IncompatibleFan);
                }
            }
            SimpleStepKind::Merge => {
                let r = self.changed_ray.as_ref().ok_or(Error::IncompatibleFan)?;
                let idx = image.ray_index(r).ok_or(Error::IncompatibleFan)?;
                if simple_merge(&image, idx)? != self.target_fan {
                    return Err(Error::IncompatibleFan);
                }
            }
        }
        Ok(())
    }
}

/// Orbit of a cone under F♯ until it revisits a cone or hits undefinedness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitStatus {
    /// Distinct cones visited, starting with the traced ray.
    pub prefix: Vec<ConeRef>,
    pub outcome: OrbitOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitOutcome {
    /// `prefix[entry]` is revisited after `period` further steps.
    Cycle { entry: usize, period: usize },
    /// The `step`-th approximate image is undefined.
    UndefinedAt { step: usize },
}

impl OrbitStatus {
    pub fn is_cycle(&self) -> bool {
        matches!(self.outcome, OrbitOutcome::Cycle { .. })
    }

    /// The cyclically repeating cones, when the orbit closed up.
    pub fn cycle_cones(&self) -> Option<&[ConeRef]> {
        match self.outcome {
            OrbitOutcome::Cycle { entry, .. } => Some(&self.prefix[entry..]),
            OrbitOutcome::UndefinedAt { .. } => None,
        }
    }
}

fn image_sector(f: &PLAutomorphism, j: usize) -> Sector {
    let m = &f.matrices()[j];
    let s = f.fan().sector(j);
    let lo = Ray::from_vector(m.apply(s.facet_lo().generator())).expect("image of a ray is nonzero");
    let hi = Ray::from_vector(m.apply(s.facet_hi().generator())).expect("image of a ray is nonzero");
    Sector::new(lo, hi).expect("unimodular images of a sector span a sector")
}

/// F♯ with source and target fan both equal to `f.fan()`.
fn sharp_image_self(f: &PLAutomorphism, c: ConeRef) -> Option<ConeRef> {
    match c {
        ConeRef::Origin => Some(ConeRef::Origin),
        ConeRef::Ray(j) => Some(f.fan().locate_ray(&f.apply_ray(f.fan().ray(j)))),
        ConeRef::Sector(j) => f.fan().locate_sector(&image_sector(f, j)).map(ConeRef::Sector),
    }
}

/// Smallest cone of `fan` containing F of the cone `c` of `fan`; `fan` must
/// be compatible with `f`. Defined for every ray, possibly undefined for a
/// sector.
pub fn sharp_image(f: &PLAutomorphism, fan: &Fan, c: ConeRef) -> Result<Option<ConeRef>> {
    let g = if f.fan() == fan { f.clone() } else { f.restricted_to(fan)? };
    Ok(sharp_image_self(&g, c))
}

/// Traces the F♯ orbit of the `ray_index`-th ray of `fan`. Because images
/// live in the finite cone set, the orbit either revisits a cone or hits an
/// undefined sector image within `2·|fan|` steps.
pub fn ray_orbit_status(f: &PLAutomorphism, fan: &Fan, ray_index: usize) -> Result<OrbitStatus> {
    let g = if f.fan() == fan { f.clone() } else { f.restricted_to(fan)? };
    Ok(ray_orbit_status_self(&g, ray_index))
}

fn ray_orbit_status_self(f: &PLAutomorphism, ray_index: usize) -> OrbitStatus {
    let mut prefix = vec![ConeRef::Ray(ray_index)];
    loop {
        match sharp_image_self(f, *prefix.last().expect("prefix is nonempty")) {
            None => {
                let step = prefix.len();
                return OrbitStatus { prefix, outcome: OrbitOutcome::UndefinedAt { step } };
            }
            Some(next) => {
                if let Some(entry) = prefix.iter().position(|&c| c == next) {
                    let period = prefix.len() - entry;
                    return OrbitStatus { prefix, outcome: OrbitOutcome::Cycle { entry, period } };
                }
                debug_assert!(prefix.len() <= 2 * f.fan().len() + 1);
                prefix.push(next);
            }
        }
    }
}

fn identity_on(fan: &Fan) -> PLAutomorphism {
    PLAutomorphism::new(fan.clone(), vec![Mat2::identity(); fan.len()])
        .expect("identity is compatible with every fan")
}

/// Decomposes `f` into simple maps: one isomorphism onto the image fan,
/// identity splits up to the common refinement of fan and image fan, then
/// identity merges back down to the source fan. The source fan must be
/// regular; the fans of the steps begin and end at `f.fan()` and the
/// composition of the step maps is `f`.
pub fn decompose_simple(f: &PLAutomorphism) -> Result<Vec<SimpleMapStep>> {
    if !f.fan().is_regular() {
        return Err(Error::FanNotRegular);
    }
    let delta = f.fan().clone();
    let image = f.image_fan();
    let refined = common_refinement(&delta, &image);

    let mut steps = vec![SimpleMapStep {
        kind: SimpleStepKind::Isomorphism,
        map: f.clone(),
        source_fan: delta.clone(),
        target_fan: image.clone(),
        changed_ray: None,
    }];

    let mut cur = image.clone();
    for st in split_sequence(&image, &refined)? {
        let next = simple_split(&cur, st.sector_index);
        steps.push(SimpleMapStep {
            kind: SimpleStepKind::Split,
            map: identity_on(&cur),
            source_fan: cur.clone(),
            target_fan: next.clone(),
            changed_ray: Some(st.new_ray),
        });
        cur = next;
    }

    for r in merge_order(&delta, &refined) {
        let idx = cur.ray_index(&r).expect("merge ray is present by construction");
        let next = simple_merge(&cur, idx)?;
        steps.push(SimpleMapStep {
            kind: SimpleStepKind::Merge,
            map: identity_on(&cur),
            source_fan: cur.clone(),
            target_fan: next.clone(),
            changed_ray: Some(r),
        });
        cur = next;
    }
    debug_assert_eq!(cur, delta);
    Ok(steps)
}

/// Rays of `fine` interior to sectors of `coarse`, in an order that keeps
/// every removal a valid simple merge: children of each mediant before the
/// mediant itself, coarse sectors visited counterclockwise.
fn merge_order(coarse: &Fan, fine: &Fan) -> Vec<Ray> {
    fn postorder(s: &Sector, fine: &Fan, out: &mut Vec<Ray>) {
        if !fine.rays().iter().any(|r| s.contains_ray_strictly(r)) {
            return;
        }
        let m = s.mediant();
        postorder(&Sector::new(s.facet_lo().clone(), m.clone()).expect("half sector"), fine, out);
        postorder(&Sector::new(m.clone(), s.facet_hi().clone()).expect("half sector"), fine, out);
        out.push(m);
    }
    let mut out = Vec::new();
    for j in 0..coarse.len() {
        postorder(&coarse.sector(j), fine, &mut out);
    }
    out
}

/// Outcome of [`deterministic_refinement`] plus the data the invariants are
/// stated about: the number of refinement passes and the split-step count of
/// the maintained decomposition after each pass (a strictly decreasing
/// termination measure).
#[derive(Debug, Clone)]
pub struct DeterministicRefinement {
    pub fan: Fan,
    pub map: PLAutomorphism,
    pub passes: usize,
    pub split_counts: Vec<usize>,
}

/// Default safety cap for refinement passes, overridable through the
/// FANROT_MAX_PASSES environment variable. Exceeding the cap is a bug, not a
/// data condition, so it panics rather than returning an error.
fn safety_cap(initial_splits: usize) -> usize {
    if let Ok(v) = std::env::var("FANROT_MAX_PASSES") {
        if let Ok(n) = v.parse::<usize>() {
            return n;
        }
    }
    10 * (initial_splits + 1)
}

/// Refines `f`'s fan (regularized) until every ray's F♯ orbit is a cycle.
/// Returns the refined fan together with `f` re-expressed on it.
pub fn deterministic_refinement(f: &PLAutomorphism) -> (Fan, PLAutomorphism) {
    let r = deterministic_refinement_with_stats(f);
    (r.fan, r.map)
}

pub fn deterministic_refinement_with_stats(f: &PLAutomorphism) -> DeterministicRefinement {
    let base = regularize_fan(f.fan());
    let f0 = f.restricted_to(&base).expect("a refinement of a compatible fan is compatible");
    let steps = decompose_simple(&f0).expect("base fan is regular");
    let mut fans: Vec<Fan> = steps.iter().map(|s| s.source_fan.clone()).collect();


    let initial_splits = steps.iter().filter(|s| s.kind == SimpleStepKind::Split).count();
    let cap = safety_cap(initial_splits);
    let mut split_counts = Vec::new();
    let mut passes = 0usize;

    loop {
        let on_base = f.restricted_to(&fans[0]).expect("refined fan stays compatible");
        let deterministic =
            (0..fans[0].len()).all(|j| ray_orbit_status_self(&on_base, j).is_cycle());
        if deterministic {
            return DeterministicRefinement { fan: fans[0].clone(), map: on_base, passes, split_counts };
        }
        passes += 1;
        assert!(
            passes <= cap,
            "deterministic refinement exceeded {cap} passes; this is a bug (set FANROT_MAX_PASSES to raise the cap)"
        );

        let chain = find_minimal_chain(&fans, &on_base)
            .expect("a non-deterministic ray guarantees an undefined chain");
        apply_chain_refinement(&mut fans, &on_base, chain);
        // fans[0] may have been refined, so classify with a fresh restriction.
        let refreshed = f.restricted_to(&fans[0]).expect("refined fan stays compatible");
        split_counts.push(count_splits(&fans, &refreshed));
    }
}

/// A minimal undefined chain: starting ray `ray_index` of `fans[i]` whose
/// step image is a sector, with the k−i-th following step undefined and k−i
/// minimal (ties: smallest i, then smallest ray index).
#[derive(Debug, Clone, Copy)]
struct Chain {
    i: usize,
    ray_index: usize,
    k: usize,
}

/// The automorphism of step `slot` applied to a ray: the element itself on
/// the isomorphism step, the identity elsewhere.
fn step_ray_image(on_base: &PLAutomorphism, slot: usize, r: &Ray) -> Ray {
    if slot == 0 {
        on_base.apply_ray(r)
    } else {
        r.clone()
    }
}

/// Sharp image of the `idx`-th sector of `fans[slot]` inside `fans[slot+1]`.
fn step_sharp_sector(fans: &[Fan], on_base: &PLAutomorphism, slot: usize, idx: usize) -> Option<usize> {
    let n = fans.len();
    let target = &fans[(slot + 1) % n];
    let s = fans[slot].sector(idx);
    let image = if slot == 0 {
        let m = on_base.matrix_at(&s.interior_vector());
        Sector::new(
            Ray::from_vector(m.apply(s.facet_lo().generator())).expect("nonzero"),
            Ray::from_vector(m.apply(s.facet_hi().generator())).expect("nonzero"),
        )
        .expect("image of a sector is a sector")
    } else {
        s
    };
    target.locate_sector(&image)
}

fn find_minimal_chain(fans: &[Fan], on_base: &PLAutomorphism) -> Option<Chain> {
    let n = fans.len();
    // steps_to_undefined[state]: number of sharp steps from a sector state
    // (slot, sector index) until an undefined image, None when the walk
    // cycles. Resolved iteratively along each walk.
    use std::collections::HashMap;
    let mut memo: HashMap<(usize, usize), Option<usize>> = HashMap::new();

    let resolve = |slot: usize, idx: usize, memo: &mut HashMap<(usize, usize), Option<usize>>| {
        let mut path: Vec<(usize, usize)> = Vec::new();
        let mut cur = (slot, idx);
        let tail: Option<usize> = loop {
            if let Some(&v) = memo.get(&cur) {
                break v;
            }
            if let Some(pos) = path.iter().position(|&s| s == cur) {
                // Cycle: everything from `pos` on never reaches undefined.
                for &s in &path[pos..] {
                    memo.insert(s, None);
                }
                break None;
            }
            path.push(cur);
            match step_sharp_sector(fans, on_base, cur.0, cur.1) {
                None => {
                    memo.insert(cur, Some(1));
                    path.pop();
                    break Some(1);
                }
                Some(next_idx) => cur = ((cur.0 + 1) % n, next_idx),
            }
        };
        // Unwind the path, adding one step per frame.
        let mut value = tail;
        for &s in path.iter().rev() {
            value = value.map(|v| v + 1);
            memo.insert(s, value);
        }
        memo.get(&(slot, idx)).copied().flatten()
    };

    let mut best: Option<Chain> = None;
    let mut best_len = usize::MAX;
    for i in 0..n {
        for ray_index in 0..fans[i].len() {
            let image = step_ray_image(on_base, i, fans[i].ray(ray_index));
            let target = &fans[(i + 1) % n];
            let sector_idx = match target.locate_ray(&image) {
                ConeRef::Sector(s) => s,
                _ => continue,
            };
            if let Some(u) = resolve((i + 1) % n, sector_idx, &mut memo) {
                // k − i = u: the walk from slot i+1 hits undefined at f_{i+u}.
                if u < best_len {
                    best_len = u;
                    best = Some(Chain { i, ray_index, k: i + u });
                }
            }
        }
    }
    best
}

/// Splits the fans along the transported ray of the chain, positions
/// i+1 ..= k. Fans repeat modulo n, so a position may find its ray already
/// inserted by an earlier split of the same fan; that position is skipped.
fn apply_chain_refinement(fans: &mut [Fan], on_base: &PLAutomorphism, chain: Chain) {
    let n = fans.len();
    let mut ray = step_ray_image(on_base, chain.i, fans[chain.i].ray(chain.ray_index));
    for j in (chain.i + 1)..=chain.k {
        let slot = j % n;
        if fans[slot].ray_index(&ray).is_none() {
            let sector_idx = match fans[slot].locate_ray(&ray) {
                ConeRef::Sector(s) => s,
                ConeRef::Ray(_) | ConeRef::Origin => unreachable!("ray known absent from the fan"),
            };
            // The minimality of the chain forces the transported ray to be
            // the mediant, so the cut below is a simple split.
            assert_eq!(
                fans[slot].sector(sector_idx).mediant(),
                ray,
                "transported ray is not the mediant of its sector; this is a bug"
            );
            fans[slot] = simple_split(&fans[slot], sector_idx);
        }
        if j < chain.k {
            ray = step_ray_image(on_base, slot, &ray);
        }
    }
}

/// Classifies each maintained step against the current fans and counts the
/// split-kind steps (the termination measure of the refinement).
fn count_splits(fans: &[Fan], on_base: &PLAutomorphism) -> usize {
    let n = fans.len();
    let mut splits = 0;
    for j in 0..n {
        let image = if j == 0 { on_base.image_fan() } else { fans[j].clone() };
        let target = &fans[(j + 1) % n];
        if &image == target {
            continue;
        }
        if target.len() == image.len() + 1 && target.refines(&image) {
            splits += 1;
        } else if image.len() == target.len() + 1 && image.refines(target) {
            // merge
        } else {
            unreachable!("maintained decomposition step {j} is no longer simple");
        }
    }
    splits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntVector;

    fn fan(vs: &[(i64, i64)]) -> Fan {
        Fan::from_vectors(vs.iter().map(|&(x, y)| IntVector::new(x, y)).collect()).unwrap()
    }

    fn ray(x: i64, y: i64) -> Ray {
        Ray::new(x, y).unwrap()
    }

    fn rot90() -> PLAutomorphism {
        PLAutomorphism::linear(Mat2::new(0, -1, 1, 0)).unwrap()
    }

    fn shear() -> PLAutomorphism {
        PLAutomorphism::linear(Mat2::new(1, 1, 0, 1)).unwrap()
    }

    fn order_six() -> PLAutomorphism {
        PLAutomorphism::linear(Mat2::new(0, -1, 1, 1)).unwrap()
    }

    #[test]
    fn sharp_image_examples() {
        let q = Fan::quadrants();
        let id = PLAutomorphism::identity();
        assert_eq!(sharp_image(&id, &q, ConeRef::Sector(0)).unwrap(), Some(ConeRef::Sector(0)));

        // The sheared first quadrant lands inside itself.
        assert_eq!(sharp_image(&shear(), &q, ConeRef::Sector(0)).unwrap(), Some(ConeRef::Sector(0)));
        // The sheared second quadrant straddles the ray (0, 1).
        assert_eq!(sharp_image(&shear(), &q, ConeRef::Sector(1)).unwrap(), None);
        // Ray images are always defined.
        assert_eq!(sharp_image(&shear(), &q, ConeRef::Ray(1)).unwrap(), Some(ConeRef::Sector(0)));
    }

    #[test]
    fn sharp_image_rejects_incompatible_fans() {
        // The order-5 rotation breaks at (0, 1), which is interior to a
        // sector of the diagonal fan.
        let f = PLAutomorphism::rotation(1, 5).unwrap();
        let bad = fan(&[(1, 1), (-1, 1), (-1, -1), (1, -1)]);
        assert_eq!(sharp_image(&f, &bad, ConeRef::Ray(0)), Err(Error::IncompatibleFan));
    }

    #[test]
    fn ray_orbit_examples() {
        let q = Fan::quadrants();

        let st = ray_orbit_status(&rot90(), &q, 0).unwrap();
        assert_eq!(st.outcome, OrbitOutcome::Cycle { entry: 0, period: 4 });
        assert_eq!(
            st.prefix,
            vec![ConeRef::Ray(0), ConeRef::Ray(1), ConeRef::Ray(2), ConeRef::Ray(3)]
        );

        let st = ray_orbit_status(&shear(), &q, 1).unwrap();
        assert_eq!(st.outcome, OrbitOutcome::Cycle { entry: 1, period: 1 });
        assert_eq!(st.prefix, vec![ConeRef::Ray(1), ConeRef::Sector(0)]);

        let st = ray_orbit_status(&order_six(), &q, 1).unwrap();
        assert_eq!(st.outcome, OrbitOutcome::UndefinedAt { step: 2 });
        assert_eq!(st.prefix, vec![ConeRef::Ray(1), ConeRef::Sector(1)]);
    }

    #[test]
    fn decompose_rotation_is_single_isomorphism() {
        let steps = decompose_simple(&rot90()).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].kind, SimpleStepKind::Isomorphism);
        steps[0].verify().unwrap();

        let steps = decompose_simple(&PLAutomorphism::identity()).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].kind, SimpleStepKind::Isomorphism);
    }

    #[test]
    fn decompose_shear_matches_expected_trace() {
        let steps = decompose_simple(&shear()).unwrap();
        assert_eq!(steps.len(), 5);
        let kinds: Vec<SimpleStepKind> = steps.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            vec![
                SimpleStepKind::Isomorphism,
                SimpleStepKind::Split,
                SimpleStepKind::Split,
                SimpleStepKind::Merge,
                SimpleStepKind::Merge,
            ]
        );
        assert_eq!(steps[0].target_fan, fan(&[(1, 0), (1, 1), (-1, 0), (-1, -1)]));
        assert_eq!(steps[1].changed_ray, Some(ray(0, 1)));
        assert_eq!(steps[2].changed_ray, Some(ray(0, -1)));
        assert_eq!(steps[3].changed_ray, Some(ray(1, 1)));
        assert_eq!(steps[4].changed_ray, Some(ray(-1, -1)));
        for s in &steps {
            s.verify().unwrap();
        }
        // Fans chain up and close.
        for w in steps.windows(2) {
            assert_eq!(w[0].target_fan, w[1].source_fan);
        }
        assert_eq!(steps.last().unwrap().target_fan, *shear().fan());
        // Replay: the composition of the step maps is the element.
        let mut acc = PLAutomorphism::identity();
        for s in &steps {
            acc = PLAutomorphism::compose(&s.map, &acc);
        }
        assert_eq!(acc, shear());
    }

    #[test]
    fn decompose_requires_regular_fan() {
        let f = PLAutomorphism::new(fan(&[(1, 0), (1, 3), (-1, 0), (-1, -3)]), vec![Mat2::identity(); 4]).unwrap();
        assert_eq!(decompose_simple(&f), Err(Error::FanNotRegular));
    }

    #[test]
    fn deterministic_refinement_fixes_nothing_when_already_deterministic() {
        let (df, _) = deterministic_refinement(&rot90());
        assert_eq!(df, Fan::quadrants());

        let (df, _) = deterministic_refinement(&shear());
        assert_eq!(df, Fan::quadrants());

        let five = PLAutomorphism::rotation(1, 5).unwrap();
        let (df, _) = deterministic_refinement(&five);
        assert_eq!(df, *five.fan());
    }

    #[test]
    fn deterministic_refinement_of_order_six_element() {
        let f = order_six();
        let r = deterministic_refinement_with_stats(&f);
        assert!(r.fan.len() > 4, "quadrants are not deterministic for this element");
        assert!(r.fan.refines(&Fan::quadrants()));
        assert!(r.fan.is_regular());
        for j in 0..r.fan.len() {
            assert!(ray_orbit_status(&r.map, &r.fan, j).unwrap().is_cycle());
        }
        // Termination measure: non-increasing split counts.
        for w in r.split_counts.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn deterministic_refinement_on_random_elements() {
        for seed in 0..12u64 {
            let f = PLAutomorphism::random(seed, 3);
            let r = deterministic_refinement_with_stats(&f);
            assert!(r.fan.is_regular());
            assert!(r.fan.refines(&regularize_fan(f.fan())));
            for j in 0..r.fan.len() {
                assert!(
                    ray_orbit_status(&r.map, &r.fan, j).unwrap().is_cycle(),
                    "seed {seed}: ray {j} of {} not deterministic",
                    r.fan
                );
            }
            for w in r.split_counts.windows(2) {
                assert!(w[0] >= w[1], "seed {seed}: split counts increased: {:?}", r.split_counts);
            }
        }
    }

    #[test]
    fn sharp_functoriality_on_shared_fan() {
        // Where both sides are defined, G♯ ∘ F♯ agrees with (G∘F)♯.
        for (sf, sg) in [(3u64, 4u64), (8, 9), (21, 5)] {
            let f = PLAutomorphism::random(sf, 2);
            let g = PLAutomorphism::random(sg, 2);
            let gf = PLAutomorphism::compose(&g, &f);
            let shared = common_refinement(&f.shared_refinement(&g), gf.fan());
            for j in 0..2 * shared.len() {
                let c = if j < shared.len() { ConeRef::Ray(j) } else { ConeRef::Sector(j - shared.len()) };
                let via_f = sharp_image(&f, &shared, c).unwrap();
                let lhs = via_f.and_then(|c1| sharp_image(&g, &shared, c1).unwrap());
                if let Some(lhs) = lhs {
                    let rhs = sharp_image(&gf, &shared, c).unwrap();
                    assert_eq!(Some(lhs), rhs, "cone {c} under seeds {sf},{sg}");
                }
            }
        }
    }
}
