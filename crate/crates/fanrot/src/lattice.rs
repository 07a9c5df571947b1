//! Exact integer primitives: rays, sectors, and complete fans in Z².
//!
//! Everything here is decided with arbitrary-precision cross products; no
//! floating point is involved anywhere. A [`Fan`] stores only its cyclic ray
//! sequence (counterclockwise, winding the circle exactly once); sectors are
//! derived views over consecutive ray pairs.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// An integer vector in Z².
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector {
    pub x: BigInt,
    pub y: BigInt,
}

impl IntVector {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Self { x: x.into(), y: y.into() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Sum of two vectors; the mediant when both are ray generators.
    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector { x: &self.x + &other.x, y: &self.y + &other.y }
    }

    pub fn neg(&self) -> IntVector {
        IntVector { x: -&self.x, y: -&self.y }
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector { x: &self.x * k, y: &self.y * k }
    }

    /// Counterclockwise quarter turn.
    pub fn rot90(&self) -> IntVector {
        IntVector { x: -&self.y, y: self.x.clone() }
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Signed area of the parallelogram spanned by `a` and `b`.
/// Positive iff `b` is counterclockwise of `a` by less than a half turn.
pub fn cross(a: &IntVector, b: &IntVector) -> BigInt {
    &a.x * &b.y - &a.y * &b.x
}

/// A rational ray R₊v, stored by its primitive generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ray {
    generator: IntVector,
}

impl Ray {
    /// Primitive generator of the ray through `v`: divides out gcd(|x|, |y|).
    pub fn from_vector(v: IntVector) -> Result<Ray> {
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        let g = v.x.gcd(&v.y);
        Ok(Ray { generator: IntVector { x: &v.x / &g, y: &v.y / &g } })
    }

    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Result<Ray> {
        Ray::from_vector(IntVector::new(x, y))
    }

    pub fn generator(&self) -> &IntVector {
        &self.generator
    }

    pub fn antipode(&self) -> Ray {
        Ray { generator: self.generator.neg() }
    }

    pub fn rot90(&self) -> Ray {
        Ray { generator: self.generator.rot90() }
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.generator.fmt(f)
    }
}

/// Angular class of `r` relative to `cut`:
/// 0 = same ray, 1 = strictly within the open half turn after `cut`,
/// 2 = opposite ray, 3 = strictly within the open half turn before `cut`.
fn angle_class(r: &Ray, cut: &Ray) -> u8 {
    let c = cross(cut.generator(), r.generator());
    if c.is_positive() {
        1
    } else if c.is_negative() {
        3
    } else if r == cut {
        0
    } else {
        2
    }
}

/// Total order on rays by counterclockwise angle starting at `cut`
/// (`cut` itself is minimal). Pure sign arithmetic, no floating point.
pub fn ccw_compare(a: &Ray, b: &Ray, cut: &Ray) -> Ordering {
    let ka = angle_class(a, cut);
    let kb = angle_class(b, cut);
    ka.cmp(&kb).then_with(|| {
        if ka == 1 || ka == 3 {
            // Same open half-plane: a precedes b iff b is counterclockwise of a.
            let c = cross(a.generator(), b.generator());
            if c.is_positive() {
                Ordering::Less
            } else if c.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        } else {
            Ordering::Equal
        }
    })
}

/// A two-dimensional rational cone spanned by two independent rays,
/// counterclockwise and less than a half turn apart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sector {
    facet_lo: Ray,
    facet_hi: Ray,
}

impl Sector {
    pub fn new(facet_lo: Ray, facet_hi: Ray) -> Result<Sector> {
        if !cross(facet_lo.generator(), facet_hi.generator()).is_positive() {
            return Err(Error::DegenerateSector);
        }
        Ok(Sector { facet_lo, facet_hi })
    }

    pub fn facet_lo(&self) -> &Ray {
        &self.facet_lo
    }

    pub fn facet_hi(&self) -> &Ray {
        &self.facet_hi
    }

    /// cross(facet_lo, facet_hi); the sector is regular iff this is 1.
    pub fn determinant(&self) -> BigInt {
        cross(self.facet_lo.generator(), self.facet_hi.generator())
    }

    pub fn is_regular(&self) -> bool {
        self.determinant() == BigInt::from(1)
    }

    /// Mediant ray: the sum of the two facet generators.
    pub fn mediant(&self) -> Ray {
        // Not normalized on purpose: callers that require primitivity pass
        // through Ray::from_vector anyway.
        Ray::from_vector(self.facet_lo.generator().add(self.facet_hi.generator()))
            .expect("facet sum of a sector is nonzero")
    }

    /// Closed containment of a ray, decided by two cross-product signs.
    pub fn contains_ray(&self, r: &Ray) -> bool {
        !cross(self.facet_lo.generator(), r.generator()).is_negative()
            && !cross(r.generator(), self.facet_hi.generator()).is_negative()
    }

    /// Strict (interior) containment of a ray.
    pub fn contains_ray_strictly(&self, r: &Ray) -> bool {
        cross(self.facet_lo.generator(), r.generator()).is_positive()
            && cross(r.generator(), self.facet_hi.generator()).is_positive()
    }

    /// Closed containment of another sector (convexity makes the facet test
    /// sufficient).
    pub fn contains_sector(&self, s: &Sector) -> bool {
        self.contains_ray(&s.facet_lo) && self.contains_ray(&s.facet_hi)
    }

    /// An integer vector strictly inside the sector.
    pub fn interior_vector(&self) -> IntVector {
        self.facet_lo.generator().add(self.facet_hi.generator())
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}⟩", self.facet_lo, self.facet_hi)
    }
}

/// Reference to a cone of a [`Fan`]: the origin, the j-th ray, or the j-th
/// sector (spanned by rays j and j+1 mod d).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeRef {
    Origin,
    Ray(usize),
    Sector(usize),
}

impl fmt::Display for ConeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeRef::Origin => write!(f, "origin"),
            ConeRef::Ray(j) => write!(f, "ray {j}"),
            ConeRef::Sector(j) => write!(f, "sector {j}"),
        }
    }
}

/// A complete fan: d ≥ 3 distinct primitive rays in counterclockwise order,
/// consecutive pairs less than a half turn apart, winding the circle exactly
/// once. Stored in canonical rotation: `rays[0]` is minimal in the
/// counterclockwise order cut at (1, 0), so equal fans compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fan {
    rays: Vec<Ray>,
}

impl Fan {
    /// Validates a ray sequence as given (order matters), normalizing
    /// generators to primitive form first.
    pub fn from_vectors(vectors: Vec<IntVector>) -> Result<Fan> {
        let rays = vectors.into_iter().map(Ray::from_vector).collect::<Result<Vec<_>>>()?;
        Fan::from_ordered_rays(rays)
    }

    /// Validates an already-primitive ray sequence in the given cyclic order.
    pub fn from_ordered_rays(rays: Vec<Ray>) -> Result<Fan> {
        let d = rays.len();
        if d < 3 {
            return Err(Error::TooFewRays(d));
        }
        for j in 0..d {
            let a = &rays[j];
            let b = &rays[(j + 1) % d];
            let c = cross(a.generator(), b.generator());
            if !c.is_positive() {
                if a == b {
                    let g = a.generator();
                    return Err(Error::DuplicateRay(g.x.clone(), g.y.clone()));
                }
                let (ga, gb) = (a.generator(), b.generator());
                return Err(Error::NotCounterclockwise {
                    ax: ga.x.clone(),
                    ay: ga.y.clone(),
                    bx: gb.x.clone(),
                    by: gb.y.clone(),
                    cross: c,
                });
            }
        }
        // Winding check: sorting by angle from rays[0] must reproduce the
        // stored order, otherwise the sequence loops the circle several times.
        let cut = rays[0].clone();
        for j in 1..d {
            if rays[j] == cut {
                let g = cut.generator();
                return Err(Error::DuplicateRay(g.x.clone(), g.y.clone()));
            }
            if j + 1 < d && ccw_compare(&rays[j], &rays[j + 1], &cut) != Ordering::Less {
                return Err(Error::NotSingleLoop);
            }
        }
        Ok(Fan { rays }.into_canonical())
    }

    /// Builds the fan on a set of rays, sorting counterclockwise and removing
    /// duplicates. Fails only if fewer than 3 distinct rays remain or some
    /// consecutive gap reaches a half turn.
    pub fn from_ray_set(mut rays: Vec<Ray>) -> Result<Fan> {
        let cut = Ray::new(1, 0).expect("unit ray");
        rays.sort_by(|a, b| ccw_compare(a, b, &cut));
        rays.dedup();
        let d = rays.len();
        if d < 3 {
            return Err(Error::TooFewRays(d));
        }
        for j in 0..d {
            let a = &rays[j];
            let b = &rays[(j + 1) % d];
            let c = cross(a.generator(), b.generator());
            if !c.is_positive() {
                let (ga, gb) = (a.generator(), b.generator());
                return Err(Error::NotCounterclockwise {
                    ax: ga.x.clone(),
                    ay: ga.y.clone(),
                    bx: gb.x.clone(),
                    by: gb.y.clone(),
                    cross: c,
                });
            }
        }
        Ok(Fan { rays })
    }

    fn into_canonical(mut self) -> Fan {
        let cut = Ray::new(1, 0).expect("unit ray");
        let min = (0..self.rays.len())
            .min_by(|&i, &j| ccw_compare(&self.rays[i], &self.rays[j], &cut))
            .expect("fan is nonempty");
        self.rays.rotate_left(min);
        self
    }

    /// The quadrant fan {(1,0), (0,1), (−1,0), (0,−1)}.
    pub fn quadrants() -> Fan {
        Fan::from_vectors(vec![
            IntVector::new(1, 0),
            IntVector::new(0, 1),
            IntVector::new(-1, 0),
            IntVector::new(0, -1),
        ])
        .expect("quadrant fan is valid")
    }

    /// Number of rays (= number of sectors).
    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ray(&self, j: usize) -> &Ray {
        &self.rays[j % self.rays.len()]
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    /// The j-th sector, spanned by rays j and j+1 (cyclically).
    pub fn sector(&self, j: usize) -> Sector {
        let d = self.rays.len();
        Sector::new(self.rays[j % d].clone(), self.rays[(j + 1) % d].clone())
            .expect("consecutive fan rays span a sector")
    }

    pub fn sectors(&self) -> impl Iterator<Item = Sector> + '_ {
        (0..self.len()).map(move |j| self.sector(j))
    }

    pub fn is_regular(&self) -> bool {
        self.sectors().all(|s| s.is_regular())
    }

    /// Index of `r` among the fan rays, if present. Binary search over the
    /// counterclockwise order.
    pub fn ray_index(&self, r: &Ray) -> Option<usize> {
        let j = self.lower_ray_index(r);
        (&self.rays[j] == r).then_some(j)
    }

    /// Largest j with rays[j] ≤ r in the order cut at rays[0].
    fn lower_ray_index(&self, r: &Ray) -> usize {
        let cut = &self.rays[0];
        let mut lo = 0usize; // rays[0] is minimal for its own cut
        let mut hi = self.rays.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            match ccw_compare(&self.rays[mid], r, cut) {
                Ordering::Greater => hi = mid,
                _ => lo = mid,
            }
        }
        lo
    }

    /// The unique cone containing the ray `r`: the equal fan ray if present,
    /// else the sector whose interior contains `r`. Always defined.
    pub fn locate_ray(&self, r: &Ray) -> ConeRef {
        let j = self.lower_ray_index(r);
        if &self.rays[j] == r {
            ConeRef::Ray(j)
        } else {
            ConeRef::Sector(j)
        }
    }

    /// The unique fan sector containing `s`, or None when `s` straddles a
    /// fan ray ("no single cone contains it").
    pub fn locate_sector(&self, s: &Sector) -> Option<usize> {
        // Candidate: the sector whose interior the arc enters right after
        // s.facet_lo; convexity reduces containment to the two facets.
        let j = match self.locate_ray(s.facet_lo()) {
            ConeRef::Ray(j) => j,
            ConeRef::Sector(j) => j,
            ConeRef::Origin => unreachable!("locate_ray never returns the origin"),
        };
        self.sector(j).contains_sector(s).then_some(j)
    }

    /// Smallest cone of the fan containing the given cone, per the reference
    /// kind: rays are always locatable, sectors may fail.
    pub fn smallest_containing_cone(&self, cone: &Cone) -> Option<ConeRef> {
        match cone {
            Cone::Origin => Some(ConeRef::Origin),
            Cone::Ray(r) => Some(self.locate_ray(r)),
            Cone::Sector(s) => self.locate_sector(s).map(ConeRef::Sector),
        }
    }

    /// Resolves a [`ConeRef`] of this fan into the cone value it names.
    pub fn cone(&self, c: ConeRef) -> Cone {
        match c {
            ConeRef::Origin => Cone::Origin,
            ConeRef::Ray(j) => Cone::Ray(self.ray(j).clone()),
            ConeRef::Sector(j) => Cone::Sector(self.sector(j)),
        }
    }

    /// True when every ray of `coarse` is a ray of `self`; for complete fans
    /// this is exactly the refinement relation.
    pub fn refines(&self, coarse: &Fan) -> bool {
        coarse.rays.iter().all(|r| self.ray_index(r).is_some())
    }
}

impl fmt::Display for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (j, r) in self.rays.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

/// A cone value (as opposed to a [`ConeRef`] index into a fan).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cone {
    Origin,
    Ray(Ray),
    Sector(Sector),
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cone::Origin => write!(f, "origin"),
            Cone::Ray(r) => write!(f, "{r}"),
            Cone::Sector(s) => write!(f, "{s}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ray(x: i64, y: i64) -> Ray {
        Ray::new(x, y).unwrap()
    }

    #[test]
    fn primitive_generator_divides_gcd() {
        assert_eq!(ray(4, -6), ray(2, -3));
        assert_eq!(ray(0, 5), ray(0, 1));
        assert_eq!(ray(7, 3).generator(), &IntVector::new(7, 3));
    }

    #[test]
    fn zero_vector_has_no_ray() {
        assert_eq!(Ray::new(0, 0), Err(Error::ZeroVector));
    }

    #[test]
    fn ccw_compare_examples() {
        let cut = ray(1, 0);
        assert_eq!(ccw_compare(&ray(1, 1), &ray(0, 1), &cut), Ordering::Less);
        assert_eq!(ccw_compare(&ray(0, -1), &ray(1, 1), &cut), Ordering::Greater);
        assert_eq!(ccw_compare(&ray(1, 0), &ray(-1, 0), &cut), Ordering::Less);
        assert_eq!(ccw_compare(&ray(2, 3), &ray(2, 3), &cut), Ordering::Equal);
    }

    #[test]
    fn ccw_compare_is_total_order_and_cut_rotates_it() {
        let rays: Vec<Ray> = vec![
            ray(1, 0),
            ray(3, 1),
            ray(1, 1),
            ray(0, 1),
            ray(-2, 1),
            ray(-1, 0),
            ray(-1, -3),
            ray(0, -1),
            ray(5, -1),
        ];
        let cuts = [ray(1, 0), ray(-1, -3), ray(0, 1)];
        let mut orders = Vec::new();
        for cut in &cuts {
            let mut sorted = rays.clone();
            sorted.sort_by(|a, b| ccw_compare(a, b, cut));
            // Strict order: no two distinct rays compare equal.
            for w in sorted.windows(2) {
                assert_eq!(ccw_compare(&w[0], &w[1], cut), Ordering::Less);
            }
            orders.push(sorted);
        }
        // Changing the cut permutes the circular order cyclically.
        for order in &orders[1..] {
            let start = orders[0].iter().position(|r| r == &order[0]).unwrap();
            let rotated: Vec<Ray> = orders[0][start..].iter().chain(&orders[0][..start]).cloned().collect();
            assert_eq!(order, &rotated);
        }
    }

    #[test]
    fn validate_fan_accepts_quadrants() {
        let f = Fan::quadrants();
        assert_eq!(f.len(), 4);
        assert!(f.is_regular());
        assert_eq!(f.ray(0), &ray(1, 0));
    }

    #[test]
    fn validate_fan_rejects_small_and_misordered() {
        assert!(matches!(
            Fan::from_vectors(vec![IntVector::new(1, 0), IntVector::new(-1, 0)]),
            Err(Error::TooFewRays(2))
        ));
        assert!(matches!(
            Fan::from_vectors(vec![IntVector::new(1, 0), IntVector::new(-1, 0), IntVector::new(0, 1)]),
            Err(Error::NotCounterclockwise { .. })
        ));
        let dup = Fan::from_vectors(vec![
            IntVector::new(1, 0),
            IntVector::new(0, 1),
            IntVector::new(0, 2),
            IntVector::new(-1, -1),
        ]);
        assert!(matches!(dup, Err(Error::DuplicateRay(..))));
    }

    #[test]
    fn validate_fan_rejects_double_winding() {
        // Five rays, consecutive crosses all positive, but winding twice.
        let double = Fan::from_vectors(vec![
            IntVector::new(1, 0),
            IntVector::new(-4, 3),
            IntVector::new(1, -3),
            IntVector::new(1, 3),
            IntVector::new(-3, -4),
        ]);
        assert_eq!(double, Err(Error::NotSingleLoop));
    }

    #[test]
    fn canonical_rotation_makes_equal_fans_equal() {
        let a = Fan::from_vectors(vec![
            IntVector::new(0, 1),
            IntVector::new(-1, 0),
            IntVector::new(0, -1),
            IntVector::new(1, 0),
        ])
        .unwrap();
        assert_eq!(a, Fan::quadrants());
    }

    #[test]
    fn locate_ray_examples() {
        let f = Fan::quadrants();
        assert_eq!(f.locate_ray(&ray(2, 3)), ConeRef::Sector(0));
        assert_eq!(f.locate_ray(&ray(0, 5)), ConeRef::Ray(1));
        assert_eq!(f.locate_ray(&ray(-7, -1)), ConeRef::Sector(2));
        assert_eq!(f.locate_ray(&ray(5, -2)), ConeRef::Sector(3));
    }

    #[test]
    fn locate_sector_examples() {
        let f = Fan::quadrants();
        let inside = Sector::new(ray(3, 1), ray(1, 2)).unwrap();
        assert_eq!(f.locate_sector(&inside), Some(0));
        // Contains (0,1) in its interior, so no single cone works.
        let straddling = Sector::new(ray(1, 1), ray(-1, 0)).unwrap();
        assert_eq!(f.locate_sector(&straddling), None);
        // A quadrant itself is contained in itself.
        assert_eq!(f.locate_sector(&f.sector(2)), Some(2));
    }

    /// Brute-force oracle: membership of a primitive vector in each cone of a
    /// fan, checked against locate_ray, for all heights ≤ 20.
    #[test]
    fn every_primitive_vector_lies_in_exactly_one_cone() {
        let fans = [
            Fan::quadrants(),
            Fan::from_vectors(vec![
                IntVector::new(1, 0),
                IntVector::new(1, 1),
                IntVector::new(0, 1),
                IntVector::new(-1, 0),
                IntVector::new(0, -1),
            ])
            .unwrap(),
            Fan::from_vectors(vec![IntVector::new(1, 2), IntVector::new(-3, 1), IntVector::new(0, -1)]).unwrap(),
        ];
        for fan in &fans {
            for x in -20i64..=20 {
                for y in -20i64..=20 {
                    if (x, y) == (0, 0) || BigInt::from(x).gcd(&BigInt::from(y)) != BigInt::from(1) {
                        continue;
                    }
                    let r = ray(x, y);
                    // Count memberships over all cones by brute force.
                    let mut hits = Vec::new();
                    for j in 0..fan.len() {
                        if fan.ray(j) == &r {
                            hits.push(ConeRef::Ray(j));
                        }
                        if fan.sector(j).contains_ray_strictly(&r) {
                            hits.push(ConeRef::Sector(j));
                        }
                    }
                    assert_eq!(hits.len(), 1, "{r} in {fan}");
                    assert_eq!(fan.locate_ray(&r), hits[0]);
                }
            }
        }
    }
}
