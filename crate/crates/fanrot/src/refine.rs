//! Fan refinement machinery: regularization, simple splits and merges,
//! split sequences between nested regular fans, and common refinements.
//!
//! Regularization follows the Hirzebruch–Jung recipe: a sector with facet
//! generators u1, u2 and determinant D = cross(u1, u2) ≥ 2 is cut at the
//! unique interior primitive point w with cross(u1, w) = 1 lying in the
//! parallelogram of u1 and u2; the left part ⟨u1, w⟩ is regular and the right
//! part has strictly smaller determinant, so the recursion terminates after
//! at most D − 1 cuts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::lattice::{cross, Fan, IntVector, Ray, Sector};

/// One simple split in a replayable sequence: the index of the sector split
/// (in the canonical indexing of the fan at that point) and the inserted
/// mediant ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitStep {
    pub sector_index: usize,
    pub new_ray: Ray,
}

/// A vector h with cross(v, h) = 1, from the extended Euclidean algorithm.
/// Exists because v is primitive.
fn unit_cross_partner(v: &IntVector) -> IntVector {
    // cross(v, h) = v.x * h.y - v.y * h.x = 1, so h = (-t, s) for any
    // Bézout pair with v.x * s + v.y * t = 1.
    let e = v.x.extended_gcd(&v.y);
    debug_assert!(e.gcd.is_one());
    IntVector { x: -e.y, y: e.x }
}

/// Interior rays (counterclockwise) whose insertion partitions `s` into
/// regular sectors. Empty iff `s` is already regular. Deterministic: the cut
/// point is invariant under the choice of Bézout partner.
pub fn regularize_sector(s: &Sector) -> Vec<Ray> {
    let mut out = Vec::new();
    let mut lo = s.facet_lo().generator().clone();
    let hi = s.facet_hi().generator();
    loop {
        let det = cross(&lo, hi);
        if det.is_one() {
            return out;
        }
        let h = unit_cross_partner(&lo);
        // hi = c·lo + det·h with c = cross(hi, h).
        let c = cross(hi, &h);
        let k = c.div_floor(&det) + 1;
        let w = lo.scale(&k).add(&h);
        debug_assert!(cross(&lo, &w).is_one());
        debug_assert!(cross(&w, hi) < det && cross(&w, hi) > BigInt::ZERO);
        out.push(Ray::from_vector(w.clone()).expect("cut point is nonzero"));
        lo = w;
    }
}

/// Regular refinement of a fan: every input ray is kept and every sector is
/// partitioned into regular sectors. Idempotent and deterministic.
pub fn regularize_fan(fan: &Fan) -> Fan {
    let mut rays = Vec::with_capacity(fan.len());
    for j in 0..fan.len() {
        rays.push(fan.ray(j).clone());
        rays.extend(regularize_sector(&fan.sector(j)));
    }
    Fan::from_ordered_rays(rays).expect("per-sector regularization preserves fan validity")
}

/// Inserts the mediant ray of the named sector.
///
/// The sector must be regular (so the mediant is primitive and both halves
/// are regular); panics otherwise, as does an out-of-range index.
pub fn simple_split(fan: &Fan, sector_index: usize) -> Fan {
    assert!(sector_index < fan.len(), "sector index {sector_index} out of range");
    let s = fan.sector(sector_index);
    assert!(s.is_regular(), "simple split requires a regular sector, got determinant {}", s.determinant());
    let mut rays = Vec::with_capacity(fan.len() + 1);
    for j in 0..fan.len() {
        rays.push(fan.ray(j).clone());
        if j == sector_index {
            rays.push(s.mediant());
        }
    }
    Fan::from_ordered_rays(rays).expect("splitting a regular sector preserves fan validity")
}

/// Removes the named ray; inverse of [`simple_split`] at the same location.
///
/// Fails unless the ray is exactly the sum of its two neighbours' generators
/// and the two adjacent sectors are regular.
pub fn simple_merge(fan: &Fan, ray_index: usize) -> Result<Fan> {
    let d = fan.len();
    let prev = fan.ray((ray_index + d - 1) % d);
    let mid = fan.ray(ray_index % d);
    let next = fan.ray((ray_index + 1) % d);
    if mid.generator() != &prev.generator().add(next.generator()) {
        let g = mid.generator();
        return Err(Error::NotMergeable(g.x.clone(), g.y.clone()));
    }
    if !cross(prev.generator(), mid.generator()).is_one() {
        return Err(Error::SectorNotRegular((ray_index + d - 1) % d));
    }
    let rays = (0..d).filter(|&j| j != ray_index % d).map(|j| fan.ray(j).clone()).collect();
    Fan::from_ordered_rays(rays)
}

/// The sequence of simple splits turning `coarse` into `fine`; both must be
/// regular and `fine` must refine `coarse`. Step order is depth-first within
/// each coarse sector, sectors visited counterclockwise; sector indices refer
/// to the canonical indexing of the intermediate fan at each step.
pub fn split_sequence(coarse: &Fan, fine: &Fan) -> Result<Vec<SplitStep>> {
    if !coarse.is_regular() || !fine.is_regular() {
        return Err(Error::FanNotRegular);
    }
    if !fine.refines(coarse) {
        return Err(Error::NotRefinement);
    }
    let mut steps = Vec::new();
    let mut current = coarse.clone();
    for j in 0..coarse.len() {
        let s = coarse.sector(j);
        descend_splits(&s, fine, &mut current, &mut steps)?;
    }
    Ok(steps)
}

fn descend_splits(s: &Sector, fine: &Fan, current: &mut Fan, steps: &mut Vec<SplitStep>) -> Result<()> {
    if !fine.rays().iter().any(|r| s.contains_ray_strictly(r)) {
        return Ok(());
    }
    // A regular sector of a regular refinement either survives intact or the
    // refinement contains its mediant ray.
    let m = s.mediant();
    if fine.ray_index(&m).is_none() {
        return Err(Error::NotRefinement);
    }
    let idx = current
        .ray_index(s.facet_lo())
        .expect("split recursion only visits sectors of the current fan");
    debug_assert_eq!(current.ray((idx + 1) % current.len()), s.facet_hi());
    steps.push(SplitStep { sector_index: idx, new_ray: m.clone() });
    *current = simple_split(current, idx);
    descend_splits(&Sector::new(s.facet_lo().clone(), m.clone())?, fine, current, steps)?;
    descend_splits(&Sector::new(m, s.facet_hi().clone())?, fine, current, steps)
}

/// Replays a split sequence from `start`; used by tests and the decomposition.
pub fn replay_splits(start: &Fan, steps: &[SplitStep]) -> Fan {
    let mut fan = start.clone();
    for step in steps {
        debug_assert_eq!(fan.sector(step.sector_index).mediant(), step.new_ray);
        fan = simple_split(&fan, step.sector_index);
    }
    fan
}

/// The regularized union of the two ray sets: a regular fan refining both
/// inputs. Commutative by construction.
pub fn common_refinement(a: &Fan, b: &Fan) -> Fan {
    let rays: Vec<Ray> = a.rays().iter().chain(b.rays()).cloned().collect();
    let union = Fan::from_ray_set(rays).expect("union of two complete fans is a complete fan");
    regularize_fan(&union)
}
