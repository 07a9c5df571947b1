//! Exact rational rotation numbers, finite-order detection, and a
//! floating-point Birkhoff estimator used as an independent cross-check.
//!
//! The exact computation never materializes an irrational periodic ray. On a
//! deterministic fan, the F♯ orbit of any ray closes up into either a cycle
//! of rays (a genuine periodic ray orbit) or a cycle of sectors (which traps
//! a periodic real ray). Either way the rotation number is the winding count
//! of the canonical lift over one period, extracted by pure counterclockwise
//! comparisons: `wrap_step` counts the revolution increment of a ray image,
//! and for sector cycles the lift of the entering facet is snapped to the
//! next sector's facet on the matching revolution branch.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::lattice::{ccw_compare, ConeRef, Ray};
use crate::plmap::PLAutomorphism;
use crate::sharp::{deterministic_refinement, OrbitOutcome};

/// A rotation number: a reduced rational in [0, 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RotationNumber {
    numerator: BigInt,
    denominator: BigInt,
}

impl RotationNumber {
    /// Reduces `num/den` modulo 1 into [0, 1). `den` must be nonzero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> RotationNumber {
        let mut num: BigInt = num.into();
        let mut den: BigInt = den.into();
        assert!(!den.is_zero(), "rotation number needs a nonzero denominator");
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        num = num.mod_floor(&den);
        let g = num.gcd(&den);
        RotationNumber { numerator: &num / &g, denominator: &den / &g }
    }

    pub fn zero() -> RotationNumber {
        RotationNumber::new(0, 1)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Sum modulo 1.
    pub fn plus(&self, other: &RotationNumber) -> RotationNumber {
        RotationNumber::new(
            &self.numerator * &other.denominator + &other.numerator * &self.denominator,
            &self.denominator * &other.denominator,
        )
    }

    /// Additive inverse modulo 1.
    pub fn negated(&self) -> RotationNumber {
        RotationNumber::new(-&self.numerator, self.denominator.clone())
    }

    /// k-fold sum modulo 1.
    pub fn times(&self, k: u32) -> RotationNumber {
        RotationNumber::new(&self.numerator * BigInt::from(k), self.denominator.clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator.to_f64().unwrap_or(f64::NAN) / self.denominator.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Revolution increment of the canonical lift of `f` at the ray `w`: 1 iff
/// the image of `w` falls strictly before the image of `ref_ray` in the
/// counterclockwise order cut at `ref_ray`, else 0. The canonical lift is
/// the one moving `ref_ray` forward by less than one full revolution.
pub fn wrap_step(f: &PLAutomorphism, w: &Ray, ref_ray: &Ray) -> u8 {
    let fw = f.apply_ray(w);
    let fref = f.apply_ray(ref_ray);
    u8::from(ccw_compare(&fw, &fref, ref_ray) == Ordering::Less)
}

/// Exact rotation number of `f`, using the default reference ray (1, 0).
pub fn rotation_number(f: &PLAutomorphism) -> RotationNumber {
    rotation_number_with_ref(f, &Ray::new(1, 0).expect("unit ray"))
}

/// Exact rotation number; the result does not depend on `ref_ray` or on the
/// ray whose orbit seeds the search (tested properties, not assumptions).
pub fn rotation_number_with_ref(f: &PLAutomorphism, ref_ray: &Ray) -> RotationNumber {
    let (fan, g) = deterministic_refinement(f);
    rotation_from_orbit(&g, 0, ref_ray).unwrap_or_else(|| {
        unreachable!("every ray of the fan {fan} is deterministic")
    })
}

/// Rotation number extracted from the orbit of one ray of `g.fan()`; None if
/// that orbit hits an undefined image (cannot happen on a deterministic fan).
pub(crate) fn rotation_from_orbit(
    g: &PLAutomorphism,
    ray_index: usize,
    ref_ray: &Ray,
) -> Option<RotationNumber> {
    let fan = g.fan();
    let orbit = crate::sharp::ray_orbit_status(g, fan, ray_index).expect("fan is g's own fan");
    let (entry, period) = match orbit.outcome {
        OrbitOutcome::Cycle { entry, period } => (entry, period),
        OrbitOutcome::UndefinedAt { .. } => return None,
    };
    let cycle = &orbit.prefix[entry..];
    match cycle[0] {
        ConeRef::Ray(_) => {
            // A cycle of rays is a true periodic ray orbit; sum the lift
            // increments over one period.
            let mut q = BigInt::ZERO;
            for c in cycle {
                let j = match c {
                    ConeRef::Ray(j) => *j,
                    _ => unreachable!("ray cycles consist of rays only"),
                };
                q += wrap_step(g, fan.ray(j), ref_ray);
            }
            Some(RotationNumber::new(q, period as i64))
        }
        ConeRef::Sector(_) => {
            // A cycle of sectors traps a periodic real ray. Track the lift of
            // the entering facet, snapping to the next sector's facet on the
            // same revolution branch; the net revolution count after one
            // period is exact.
            let sectors: Vec<usize> = cycle
                .iter()
                .map(|c| match c {
                    ConeRef::Sector(j) => *j,
                    _ => unreachable!("sector cycles consist of sectors only"),
                })
                .collect();
            let mut revolutions = BigInt::ZERO;
            for t in 0..sectors.len() {
                let lo = fan.sector(sectors[t]).facet_lo().clone();
                let next_lo = fan.sector(sectors[(t + 1) % sectors.len()]).facet_lo().clone();
                let image = g.apply_ray(&lo);
                debug_assert!(fan.sector(sectors[(t + 1) % sectors.len()]).contains_ray(&image));
                revolutions += wrap_step(g, &lo, ref_ray);
                if ccw_compare(&image, &next_lo, ref_ray) == Ordering::Less {
                    revolutions -= 1;
                }
            }
            Some(RotationNumber::new(revolutions, sectors.len() as i64))
        }
        ConeRef::Origin => unreachable!("ray orbits never reach the origin"),
    }
}

/// Smallest k ≤ cap with F^k the identity, or None. When the deterministic
/// fan's rays are permuted by F, the permutation order answers directly and
/// the cap is not consulted.
pub fn finite_order(f: &PLAutomorphism, cap: u32) -> Option<u64> {
    let (fan, g) = deterministic_refinement(f);
    let images: Vec<Option<usize>> = (0..fan.len()).map(|j| fan.ray_index(&g.apply_ray(fan.ray(j)))).collect();
    if images.iter().all(Option::is_some) {
        // F permutes the fan rays; F^k fixes every ray iff the permutation
        // order divides k, and fixing all rays of a fan forces the identity.
        let mut order: u64 = 1;
        let mut seen = vec![false; fan.len()];
        for start in 0..fan.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                len += 1;
                j = images[j].expect("all images are rays");
            }
            order = order.lcm(&len);
        }
        return Some(order);
    }
    let mut power = PLAutomorphism::identity();
    for k in 1..=cap {
        power = PLAutomorphism::compose(&g, &power);
        if power.is_identity() {
            return Some(k as u64);
        }
    }
    None
}

/// Floating-point Birkhoff average of the induced circle map in angle
/// coordinates, with the same canonical-lift normalization as [`wrap_step`].
/// For a degree-one circle homeomorphism the error is at most 2/iterations.
///
/// Revolution bookkeeping is anchored per sector: the lift value of a point
/// in sector j is the (exactly computed) lift of the sector's lower image
/// ray plus the angle swept from that ray, measured relatively so that no
/// float comparison ever straddles the 0/1 fold. Orbits that pass exactly
/// through a fan ray therefore cannot drop revolutions to rounding.
pub fn estimate_rotation(f: &PLAutomorphism, iterations: u32, x0: f64) -> f64 {
    assert!(iterations >= 1);
    let fan = f.fan();
    let d = fan.len();
    let to_f64 = |v: &BigInt| v.to_f64().unwrap_or(0.0);
    let angles: Vec<f64> = (0..d)
        .map(|j| {
            let g = fan.ray(j).generator();
            angle_fraction(to_f64(&g.x), to_f64(&g.y))
        })
        .collect();
    let mats: Vec<[f64; 4]> =
        f.matrices().iter().map(|m| [to_f64(&m.a), to_f64(&m.b), to_f64(&m.c), to_f64(&m.d)]).collect();
    let unit = Ray::new(1, 0).expect("unit ray");
    // Lift of the image of each fan ray under the canonical normalization:
    // float angle plus the integer wrap bit, which is decided exactly.
    let image_lifts: Vec<(f64, [f64; 2])> = (0..d)
        .map(|j| {
            let a = f.apply_ray(fan.ray(j));
            let g = a.generator();
            let av = [to_f64(&g.x), to_f64(&g.y)];
            let lift = angle_fraction(av[0], av[1]) + f64::from(wrap_step(f, fan.ray(j), &unit));
            let norm = av[0].hypot(av[1]);
            (lift, [av[0] / norm, av[1] / norm])
        })
        .collect();

    let step = |x: f64| -> f64 {
        // Largest sector index whose lower facet angle is ≤ x; x below the
        // first angle wraps into the last sector.
        let j = match angles.partition_point(|&a| a <= x) {
            0 => d - 1,
            p => p - 1,
        };
        let m = &mats[j];
        if *m == [1.0, 0.0, 0.0, 1.0] {
            return x; // exact on identity pieces
        }
        let (s, c) = (std::f64::consts::TAU * x).sin_cos();
        let img = [m[0] * c + m[1] * s, m[2] * c + m[3] * s];
        // Angle swept from the sector's lower image ray, in [0, 1/2); the
        // relative atan2 never crosses the fold.
        let (lift0, a) = &image_lifts[j];
        let swept =
            ((a[0] * img[1] - a[1] * img[0]).atan2(a[0] * img[0] + a[1] * img[1]) / std::f64::consts::TAU).max(0.0);
        lift0 + swept
    };

    let mut x = x0.rem_euclid(1.0);
    let mut total = 0.0;
    for _ in 0..iterations {
        let y_lift = step(x);
        total += y_lift - x;
        x = y_lift.rem_euclid(1.0);
    }
    total / f64::from(iterations)
}

fn angle_fraction(x: f64, y: f64) -> f64 {
    (y.atan2(x) / std::f64::consts::TAU).rem_euclid(1.0)
}
