//! Piecewise linear automorphisms of Z²: a compatible fan plus one SL(2, Z)
//! matrix per sector. This is the crate's model of an element of Thompson's
//! group T.
//!
//! Validation enforces three facts that together make the data an
//! orientation-preserving homeomorphism of the plane restricting to a
//! bijection of Z²: every piece has determinant exactly 1, adjacent pieces
//! agree on their shared ray, and the image rays again form a complete fan
//! (winding the circle exactly once).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{cross, ConeRef, Fan, IntVector, Ray};
use crate::refine::{common_refinement, regularize_fan, simple_split};

/// A 2×2 integer matrix in row-major order.
///
/// Plain data: the unimodularity invariant (determinant 1) is enforced where
/// it matters, by [`PLAutomorphism::new`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Mat2 { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn identity() -> Self {
        Mat2::new(1, 0, 0, 1)
    }

    /// Matrix with the given columns.
    pub fn from_columns(u: &IntVector, v: &IntVector) -> Self {
        Mat2 { a: u.x.clone(), b: v.x.clone(), c: u.y.clone(), d: v.y.clone() }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, v: &IntVector) -> IntVector {
        IntVector { x: &self.a * &v.x + &self.b * &v.y, y: &self.c * &v.x + &self.d * &v.y }
    }

    /// self · rhs.
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    /// Inverse of a determinant-1 matrix.
    pub fn inverse_unimodular(&self) -> Mat2 {
        debug_assert!(self.det().is_one());
        Mat2 { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b == BigInt::ZERO && self.c == BigInt::ZERO && self.d.is_one()
    }

    /// The unique linear map sending a regular sector onto a regular sector
    /// facet-to-facet: src_lo ↦ dst_lo, src_hi ↦ dst_hi.
    pub fn sector_isomorphism(src_lo: &Ray, src_hi: &Ray, dst_lo: &Ray, dst_hi: &Ray) -> Mat2 {
        let src = Mat2::from_columns(src_lo.generator(), src_hi.generator());
        let dst = Mat2::from_columns(dst_lo.generator(), dst_hi.generator());
        dst.mul(&src.inverse_unimodular())
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// An element of Thompson's group T as a piecewise linear automorphism of Z².
///
/// Stores the presentation it was built with; function equality (`==`) is
/// decided on canonical forms, so refining the fan does not change the
/// element.
#[derive(Debug, Clone)]
pub struct PLAutomorphism {
    fan: Fan,
    matrices: Vec<Mat2>,
}

impl PLAutomorphism {
    /// Validates fan-plus-matrices data as a piecewise linear automorphism.
    ///
    /// Checks, in order: one matrix per sector, determinant 1 for every piece
    /// (this is what rejects lattice-endomorphisms that are not onto),
    /// continuity across every shared ray, and that the image rays form a
    /// valid fan (the homeomorphism condition).
    pub fn new(fan: Fan, matrices: Vec<Mat2>) -> Result<PLAutomorphism> {
        let d = fan.len();
        if matrices.len() != d {
            return Err(Error::MatrixCountMismatch { expected: d, got: matrices.len() });
        }
        for m in &matrices {
            let det = m.det();
            if !det.is_one() {
                return Err(Error::NotUnimodular(det));
            }
        }
        for j in 0..d {
            let v = fan.ray(j).generator();
            let before = &matrices[(j + d - 1) % d];
            let after = &matrices[j];
            if before.apply(v) != after.apply(v) {
                return Err(Error::Discontinuous(v.x.clone(), v.y.clone()));
            }
        }
        let image_rays = (0..d)
            .map(|j| Ray::from_vector(matrices[j].apply(fan.ray(j).generator())))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::ImageNotFan(Box::new(e)))?;
        Fan::from_ordered_rays(image_rays).map_err(|e| Error::ImageNotFan(Box::new(e)))?;
        Ok(PLAutomorphism { fan, matrices })
    }

    /// A globally linear element.
    pub fn linear(m: Mat2) -> Result<PLAutomorphism> {
        let fan = Fan::quadrants();
        let matrices = vec![m; fan.len()];
        PLAutomorphism::new(fan, matrices)
    }

    pub fn identity() -> PLAutomorphism {
        PLAutomorphism::linear(Mat2::identity()).expect("identity is valid")
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn matrices(&self) -> &[Mat2] {
        &self.matrices
    }

    /// The linear piece acting on direction `v` (any nonzero vector). On a
    /// shared ray the two neighbouring pieces agree as maps of that ray, and
    /// this returns the counterclockwise one.
    pub fn matrix_at(&self, v: &IntVector) -> &Mat2 {
        let r = Ray::from_vector(v.clone()).expect("direction must be nonzero");
        match self.fan.locate_ray(&r) {
            ConeRef::Ray(j) | ConeRef::Sector(j) => &self.matrices[j],
            ConeRef::Origin => unreachable!(),
        }
    }

    /// Evaluates the automorphism at a lattice point.
    pub fn apply_vector(&self, v: &IntVector) -> IntVector {
        if v.is_zero() {
            return v.clone();
        }
        self.matrix_at(v).apply(v)
    }

    /// Image of a ray, as a ray.
    pub fn apply_ray(&self, r: &Ray) -> Ray {
        Ray::from_vector(self.matrix_at(r.generator()).apply(r.generator()))
            .expect("automorphism image of a ray generator is nonzero")
    }

    /// The fan obtained by mapping every cone forward; regular whenever the
    /// source fan is regular.
    pub fn image_fan(&self) -> Fan {
        let d = self.fan.len();
        let rays = (0..d)
            .map(|j| {
                Ray::from_vector(self.matrices[j].apply(self.fan.ray(j).generator()))
                    .expect("image ray is nonzero")
            })
            .collect();
        Fan::from_ordered_rays(rays).expect("image rays were validated at construction")
    }

    /// Re-expresses the same function on a finer fan. Fails when the map is
    /// not linear on some sector of `fine`.
    pub fn restricted_to(&self, fine: &Fan) -> Result<PLAutomorphism> {
        let mut matrices = Vec::with_capacity(fine.len());
        for j in 0..fine.len() {
            let s = fine.sector(j);
            let m = self.matrix_at(&s.interior_vector()).clone();
            // Linear on the whole sector iff no break ray of self crosses it.
            for r in self.fan.rays() {
                if s.contains_ray_strictly(r) && self.matrix_at(r.generator()) != &m {
                    return Err(Error::IncompatibleFan);
                }
            }
            if m.apply(s.facet_lo().generator()) != self.apply_vector(s.facet_lo().generator())
                || m.apply(s.facet_hi().generator()) != self.apply_vector(s.facet_hi().generator())
            {
                return Err(Error::IncompatibleFan);
            }
            matrices.push(m);
        }
        PLAutomorphism::new(fine.clone(), matrices)
    }

    /// Group composition, `F` first: `compose(G, F) = G ∘ F`.
    /// The result is returned in canonical form.
    pub fn compose(g: &PLAutomorphism, f: &PLAutomorphism) -> PLAutomorphism {
        let f_inv = f.inverse_presentation();
        // A compatible fan for G∘F: refine F's fan by the F-preimages of G's
        // rays, so each sector maps into a single linearity domain of G.
        let mut rays: Vec<Ray> = f.fan.rays().to_vec();
        rays.extend(g.fan.rays().iter().map(|r| f_inv.apply_ray(r)));
        let fan = Fan::from_ray_set(rays).expect("refinement of a complete fan is complete");
        let fan = regularize_fan(&fan);
        let matrices = (0..fan.len())
            .map(|j| {
                let w = fan.sector(j).interior_vector();
                g.matrix_at(&f.apply_vector(&w)).mul(f.matrix_at(&w))
            })
            .collect();
        PLAutomorphism::new(fan, matrices)
            .expect("composition of valid automorphisms is valid")
            .canonical()
    }

    /// Inverse element, in canonical form.
    pub fn inverse(&self) -> PLAutomorphism {
        self.inverse_presentation().canonical()
    }

    fn inverse_presentation(&self) -> PLAutomorphism {
        let image = self.image_fan();
        let d = self.fan.len();
        let mut matrices = vec![Mat2::identity(); d];
        for j in 0..d {
            let w = Ray::from_vector(self.matrices[j].apply(self.fan.ray(j).generator()))
                .expect("image ray is nonzero");
            let idx = image.ray_index(&w).expect("image fan contains its own rays");
            matrices[idx] = self.matrices[j].inverse_unimodular();
        }
        PLAutomorphism::new(image, matrices).expect("inverse of a valid automorphism is valid")
    }

    /// k-th power under composition; `pow(0)` is the identity.
    pub fn pow(&self, k: u32) -> PLAutomorphism {
        let mut acc = PLAutomorphism::identity();
        for _ in 0..k {
            acc = PLAutomorphism::compose(self, &acc);
        }
        acc
    }

    /// Break rays: fan rays where the two adjacent pieces genuinely differ.
    /// Intrinsic to the function, independent of the presentation.
    fn break_rays(&self) -> Vec<Ray> {
        let d = self.fan.len();
        (0..d)
            .filter(|&j| self.matrices[(j + d - 1) % d] != self.matrices[j])
            .map(|j| self.fan.ray(j).clone())
            .collect()
    }

    /// Canonical form: the fan holds exactly the break rays, padded with
    /// quarter-turn filler rays wherever a gap would reach a half turn (and
    /// with the quadrant fan for linear elements). Two presentations of the
    /// same function have identical canonical forms, which makes `==`
    /// decidable function equality.
    pub fn canonical(&self) -> PLAutomorphism {
        let breaks = self.break_rays();
        let rays = if breaks.is_empty() {
            Fan::quadrants().rays().to_vec()
        } else {
            let mut rays = Vec::with_capacity(breaks.len() + 3);
            for (i, b) in breaks.iter().enumerate() {
                let next = &breaks[(i + 1) % breaks.len()];
                rays.push(b.clone());
                let mut last = b.clone();
                while !cross(last.generator(), next.generator()).is_positive() {
                    last = last.rot90();
                    rays.push(last.clone());
                }
            }
            rays
        };
        let fan = Fan::from_ordered_rays(rays).expect("break rays plus fillers form a fan");
        let matrices = (0..fan.len()).map(|j| self.matrix_at(&fan.sector(j).interior_vector()).clone()).collect();
        PLAutomorphism::new(fan, matrices).expect("canonical form is valid")
    }

    pub fn is_identity(&self) -> bool {
        let c = self.canonical();
        c.matrices.iter().all(Mat2::is_identity)
    }

    /// The finite-order element rotating a q-sector regular fan by p sectors;
    /// its rotation number is p/q and its order is q / gcd(p, q).
    ///
    /// The fan is fixed deterministically: the three-ray regular fan
    /// {(1,0), (0,1), (−1,−1)} for q = 3, and for q ≥ 4 the quadrant fan with
    /// the first sector repeatedly split. Each piece is the unique unimodular
    /// map taking its sector onto the target sector facet-to-facet.
    pub fn rotation(p: u64, q: u64) -> Result<PLAutomorphism> {
        if q < 3 {
            return Err(Error::OrderTooSmall(q as i64));
        }
        if p >= q {
            return Err(Error::BadRotationNumerator(p as i64));
        }
        let mut fan = if q == 3 {
            Fan::from_vectors(vec![IntVector::new(1, 0), IntVector::new(0, 1), IntVector::new(-1, -1)])
                .expect("three-ray base fan is valid")
        } else {
            Fan::quadrants()
        };
        while (fan.len() as u64) < q {
            fan = simple_split(&fan, 0);
        }
        let d = fan.len();
        let shift = p as usize;
        let matrices = (0..d)
            .map(|i| {
                Mat2::sector_isomorphism(
                    fan.ray(i),
                    fan.ray((i + 1) % d),
                    fan.ray((i + shift) % d),
                    fan.ray((i + shift + 1) % d),
                )
            })
            .collect();
        PLAutomorphism::new(fan, matrices)
    }

    /// Deterministic pseudo-random product of `length` factors drawn from the
    /// rotation generators of orders 3, 4, 5 and their inverses. Same seed,
    /// same element.
    pub fn random(seed: u64, length: usize) -> PLAutomorphism {
        assert!(length >= 1, "random elements need at least one factor");
        let gens: Vec<PLAutomorphism> = [3u64, 4, 5]
            .iter()
            .flat_map(|&q| {
                let g = PLAutomorphism::rotation(1, q).expect("generator is valid");
                let inv = g.inverse();
                [g, inv]
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut acc: Option<PLAutomorphism> = None;
        for _ in 0..length {
            let f = &gens[rng.gen_range(0..gens.len())];
            acc = Some(match acc {
                None => f.clone(),
                // Factors apply left to right: the new factor acts after the
                // accumulated word.
                Some(w) => PLAutomorphism::compose(f, &w),
            });
        }
        acc.expect("length ≥ 1")
    }

    /// Common deterministic fan on which `self`, `other`, and their
    /// composites in either order are all linear per sector.
    pub fn shared_refinement(&self, other: &PLAutomorphism) -> Fan {
        common_refinement(&self.fan, &other.fan)
    }
}

impl PartialEq for PLAutomorphism {
    fn eq(&self, other: &Self) -> bool {
        if self.fan == other.fan && self.matrices == other.matrices {
            return true;
        }
        let a = self.canonical();
        let b = other.canonical();
        a.fan == b.fan && a.matrices == b.matrices
    }
}

impl Eq for PLAutomorphism {}

impl fmt::Display for PLAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} with pieces ", self.fan)?;
        for (j, m) in self.matrices.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}
