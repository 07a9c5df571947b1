//! The exact bridge between piecewise linear automorphisms of Z² and the
//! classical presentation of Thompson's group T by dyadic circle
//! homeomorphisms.
//!
//! A regular sector corresponds to a standard dyadic interval through the
//! order isomorphism φ that sends facets to endpoints and mediants to
//! midpoints (Minkowski's question-mark map, sector-wise). Globally we fix
//! the quadrant fan against the four quarter intervals, with (1,0) ↦ 0,
//! (0,1) ↦ 1/4, (−1,0) ↦ 1/2 and (0,−1) ↦ 3/4. Conversions in both
//! directions are exact: every slope of a converted map is a power of two
//! and every breakpoint is dyadic.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{cross, ConeRef, Fan, Ray, Sector};
use crate::plmap::{Mat2, PLAutomorphism};
use crate::refine::regularize_fan;

/// A dyadic rational mantissa/2^exponent, normalized so the mantissa is odd
/// (or the value is 0 with exponent 0). Signed; the circle-map types enforce
/// their own range invariants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    mantissa: BigInt,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(mantissa: impl Into<BigInt>, exponent: u32) -> DyadicRational {
        let mut mantissa: BigInt = mantissa.into();
        let mut exponent = exponent;
        if mantissa.is_zero() {
            return DyadicRational { mantissa, exponent: 0 };
        }
        while exponent > 0 && mantissa.is_even() {
            mantissa /= 2;
            exponent -= 1;
        }
        DyadicRational { mantissa, exponent }
    }

    pub fn zero() -> DyadicRational {
        DyadicRational::new(0, 0)
    }

    pub fn one() -> DyadicRational {
        DyadicRational::new(1, 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// Numerator over the common denominator 2^exp (exp ≥ self.exponent).
    fn scaled(&self, exp: u32) -> BigInt {
        &self.mantissa << (exp - self.exponent)
    }

    pub fn add(&self, other: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(other.exponent);
        DyadicRational::new(self.scaled(e) + other.scaled(e), e)
    }

    pub fn sub(&self, other: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(other.exponent);
        DyadicRational::new(self.scaled(e) - other.scaled(e), e)
    }

    /// Midpoint of two values; always exact.
    pub fn average(&self, other: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(other.exponent);
        DyadicRational::new(self.scaled(e) + other.scaled(e), e + 1)
    }

    /// Multiplication by 2^k.
    pub fn times_pow2(&self, k: i64) -> DyadicRational {
        if self.mantissa.is_zero() {
            return DyadicRational::zero();
        }
        let e = i64::from(self.exponent) - k;
        if e <= 0 {
            DyadicRational::new(&self.mantissa << ((-e) as u32), 0)
        } else {
            DyadicRational::new(self.mantissa.clone(), e as u32)
        }
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Reduction modulo 1 into [0, 1).
    pub fn mod_one(&self) -> DyadicRational {
        let den = BigInt::one() << self.exponent;
        DyadicRational::new(self.mantissa.mod_floor(&den), self.exponent)
    }

    pub fn floor(&self) -> BigInt {
        self.mantissa.div_floor(&(BigInt::one() << self.exponent))
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.mantissa.to_f64().unwrap_or(f64::NAN) / (2f64).powi(self.exponent as i32)
    }

    /// Parses "0", "1", or "p/q" with q a power of two.
    pub fn parse(s: &str) -> Result<DyadicRational> {
        let bad = || Error::Parse(format!("`{s}` is not a dyadic rational p/2^k"));
        match s.split_once('/') {
            None => {
                let n: BigInt = s.trim().parse().map_err(|_| bad())?;
                Ok(DyadicRational::new(n, 0))
            }
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q <= BigInt::ZERO || !(&q & (&q - 1)).is_zero() {
                    return Err(bad());
                }
                let k = (q.bits() - 1) as u32;
                Ok(DyadicRational::new(p, k))
            }
        }
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        self.scaled(e).cmp(&other.scaled(e))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}/{}", self.mantissa, BigInt::one() << self.exponent)
        }
    }
}

/// A standard dyadic interval [a/2^k, (a+1)/2^k] ⊆ [0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardDyadicInterval {
    a: BigInt,
    k: u32,
}

impl StandardDyadicInterval {
    pub fn new(a: impl Into<BigInt>, k: u32) -> Result<StandardDyadicInterval> {
        let a: BigInt = a.into();
        if a.is_negative() || a >= (BigInt::one() << k) {
            return Err(Error::Parse(format!("standard interval needs 0 ≤ a < 2^k, got a = {a}, k = {k}")));
        }
        Ok(StandardDyadicInterval { a, k })
    }

    /// The whole interval [0, 1].
    pub fn unit() -> StandardDyadicInterval {
        StandardDyadicInterval { a: BigInt::ZERO, k: 0 }
    }

    /// The j-th quarter [j/4, (j+1)/4].
    pub fn quarter(j: usize) -> StandardDyadicInterval {
        StandardDyadicInterval::new(j as i64, 2).expect("quarter index in range")
    }

    pub fn lo(&self) -> DyadicRational {
        DyadicRational::new(self.a.clone(), self.k)
    }

    pub fn hi(&self) -> DyadicRational {
        DyadicRational::new(&self.a + 1, self.k)
    }

    pub fn midpoint(&self) -> DyadicRational {
        DyadicRational::new(2 * &self.a + 1, self.k + 1)
    }

    pub fn contains(&self, t: &DyadicRational) -> bool {
        *t >= self.lo() && *t <= self.hi()
    }

    /// Recognizes [lo, hi] as a standard interval.
    pub fn from_endpoints(lo: &DyadicRational, hi: &DyadicRational) -> Option<StandardDyadicInterval> {
        let width = hi.sub(lo);
        if !width.mantissa.is_one() {
            return None;
        }
        let k = width.exponent;
        if lo.exponent > k || lo.is_negative() {
            return None;
        }
        let a = lo.scaled(k);
        StandardDyadicInterval::new(a, k).ok()
    }
}

impl fmt::Display for StandardDyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo(), self.hi())
    }
}

/// Local order isomorphism of a regular sector onto a standard dyadic
/// interval: facets to endpoints, mediants to midpoints, by Stern–Brocot
/// descent. The sector must be regular.
pub fn phi_forward(sector: &Sector, interval: &StandardDyadicInterval, ray: &Ray) -> Result<DyadicRational> {
    assert!(sector.is_regular(), "phi is defined sector-wise on regular sectors");
    if !sector.contains_ray(ray) {
        let g = ray.generator();
        return Err(Error::RayOutsideSector(g.x.clone(), g.y.clone()));
    }
    let mut lo = sector.facet_lo().clone();
    let mut hi = sector.facet_hi().clone();
    let mut lo_t = interval.lo();
    let mut hi_t = interval.hi();
    loop {
        if ray == &lo {
            return Ok(lo_t);
        }
        if ray == &hi {
            return Ok(hi_t);
        }
        let m = Sector::new(lo.clone(), hi.clone()).expect("descent keeps a sector").mediant();
        let mid_t = lo_t.average(&hi_t);
        match cross(m.generator(), ray.generator()).sign() {
            num_bigint::Sign::NoSign => return Ok(mid_t),
            num_bigint::Sign::Plus => {
                lo = m;
                lo_t = mid_t;
            }
            num_bigint::Sign::Minus => {
                hi = m;
                hi_t = mid_t;
            }
        }
    }
}

/// Inverse of [`phi_forward`]: the unique ray of the sector mapping to `t`,
/// found by binary descent through mediants.
pub fn phi_inverse(sector: &Sector, interval: &StandardDyadicInterval, t: &DyadicRational) -> Result<Ray> {
    assert!(sector.is_regular(), "phi is defined sector-wise on regular sectors");
    if !interval.contains(t) {
        return Err(Error::ValueOutsideInterval(t.to_string()));
    }
    let mut lo = sector.facet_lo().clone();
    let mut hi = sector.facet_hi().clone();
    let mut lo_t = interval.lo();
    let mut hi_t = interval.hi();
    loop {
        if *t == lo_t {
            return Ok(lo);
        }
        if *t == hi_t {
            return Ok(hi);
        }
        let m = Sector::new(lo.clone(), hi.clone()).expect("descent keeps a sector").mediant();
        let mid_t = lo_t.average(&hi_t);
        match t.cmp(&mid_t) {
            Ordering::Equal => return Ok(m),
            Ordering::Greater => {
                lo = m;
                lo_t = mid_t;
            }
            Ordering::Less => {
                hi = m;
                hi_t = mid_t;
            }
        }
    }
}

/// The global conjugacy: quadrants against quarter intervals.
pub fn phi_global(ray: &Ray) -> DyadicRational {
    let q = Fan::quadrants();
    match q.locate_ray(ray) {
        ConeRef::Ray(j) => DyadicRational::new(j as i64, 2),
        ConeRef::Sector(j) => phi_forward(&q.sector(j), &StandardDyadicInterval::quarter(j), ray)
            .expect("ray lies in its own quadrant"),
        ConeRef::Origin => unreachable!(),
    }
}

/// Inverse of the global conjugacy on [0, 1).
pub fn phi_global_inverse(t: &DyadicRational) -> Result<Ray> {
    use num_traits::ToPrimitive;
    if t.is_negative() || *t >= DyadicRational::one() {
        return Err(Error::ValueOutsideInterval(t.to_string()));
    }
    let j = t.times_pow2(2).floor().to_usize().unwrap_or(0).min(3);
    phi_inverse(&Fan::quadrants().sector(j), &StandardDyadicInterval::quarter(j), t)
}

/// An orientation-preserving degree-one circle homeomorphism with dyadic
/// breakpoints, dyadic images, and power-of-two slopes: the classical model
/// of an element of Thompson's group T. Breakpoint 0 is always stored
/// (inserted as a trivial breakpoint if needed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicPLMap {
    breakpoints: Vec<DyadicRational>,
    images: Vec<DyadicRational>,
}

impl DyadicPLMap {
    /// Validates breakpoints and images as a dyadic circle homeomorphism.
    pub fn new(breakpoints: Vec<DyadicRational>, images: Vec<DyadicRational>) -> Result<DyadicPLMap> {
        if breakpoints.is_empty() || breakpoints.len() != images.len() {
            return Err(Error::InvalidDyadicMap(format!(
                "need equally many breakpoints and images, got {} and {}",
                breakpoints.len(),
                images.len()
            )));
        }
        let one = DyadicRational::one();
        for t in breakpoints.iter().chain(&images) {
            if t.is_negative() || *t >= one {
                return Err(Error::InvalidDyadicMap(format!("point {t} is outside [0, 1)")));
            }
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidDyadicMap(format!(
                    "breakpoints not strictly increasing at {} ≥ {}",
                    w[0], w[1]
                )));
            }
        }
        let mut map = DyadicPLMap { breakpoints, images };
        // Store breakpoint 0 always, splitting the wrap piece if needed (its
        // source length spans the fold, so it is handled before the generic
        // per-piece checks below apply).
        if !map.breakpoints[0].is_zero() {
            let m = map.len();
            let mut rise = map.images[0].sub(&map.images[m - 1]);
            if rise.is_negative() || rise.is_zero() {
                rise = rise.add(&one);
            }
            let len = one.sub(&map.breakpoints[m - 1]).add(&map.breakpoints[0]);
            let e = slope_as_power_of_two(&rise, &len)?;
            let value0 = map.images[m - 1].add(&one.sub(&map.breakpoints[m - 1]).times_pow2(e)).mod_one();
            map.breakpoints.insert(0, DyadicRational::zero());
            map.images.insert(0, value0);
        }
        // Degree one: every piece rises and the rises sum to one full turn.
        let mut total = DyadicRational::zero();
        for j in 0..map.len() {
            let rise = map.rise(j);
            if rise.is_zero() {
                return Err(Error::InvalidDyadicMap(format!(
                    "images not strictly increasing at breakpoint {}",
                    map.breakpoints[j]
                )));
            }
            total = total.add(&rise);
        }
        if total != one {
            return Err(Error::InvalidDyadicMap(format!("map winds {total} times, expected degree 1")));
        }
        for j in 0..map.len() {
            map.slope_exponent(j)?;
        }
        Ok(map)
    }

    /// The identity map.
    pub fn identity() -> DyadicPLMap {
        DyadicPLMap { breakpoints: vec![DyadicRational::zero()], images: vec![DyadicRational::zero()] }
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn breakpoints(&self) -> &[DyadicRational] {
        &self.breakpoints
    }

    pub fn images(&self) -> &[DyadicRational] {
        &self.images
    }

    /// Source length of piece j (the wrap piece ends at 1).
    fn piece_length(&self, j: usize) -> DyadicRational {
        if j + 1 < self.len() {
            self.breakpoints[j + 1].sub(&self.breakpoints[j])
        } else {
            DyadicRational::one().sub(&self.breakpoints[j])
        }
    }

    /// Image rise of piece j, taken modulo 1 into (0, 1].
    fn rise(&self, j: usize) -> DyadicRational {
        let next = &self.images[(j + 1) % self.len()];
        let d = next.sub(&self.images[j]);
        if d.is_negative() || (d.is_zero() && j + 1 == self.len()) {
            d.add(&DyadicRational::one())
        } else {
            d
        }
    }

    /// Slope of piece j as an exponent of 2.
    pub fn slope_exponent(&self, j: usize) -> Result<i64> {
        slope_as_power_of_two(&self.rise(j), &self.piece_length(j))
    }

    fn eval_on_piece(&self, j: usize, t: &DyadicRational) -> DyadicRational {
        let e = self.slope_exponent(j).expect("validated map has power-of-two slopes");
        self.images[j].add(&t.sub(&self.breakpoints[j]).times_pow2(e)).mod_one()
    }

    /// Exact evaluation at a point of [0, 1).
    pub fn eval(&self, t: &DyadicRational) -> Result<DyadicRational> {
        if t.is_negative() || *t >= DyadicRational::one() {
            return Err(Error::ValueOutsideInterval(t.to_string()));
        }
        let j = match self.breakpoints.partition_point(|b| b <= t) {
            0 => self.len() - 1,
            p => p - 1,
        };
        Ok(self.eval_on_piece(j, t))
    }

    /// Canonical form: interior breakpoints where the affine map continues
    /// with the same slope are removed; breakpoint 0 is always kept.
    pub fn canonical(&self) -> DyadicPLMap {
        let mut breakpoints = vec![self.breakpoints[0].clone()];
        let mut images = vec![self.images[0].clone()];
        for j in 1..self.len() {
            let prev = self.slope_exponent(j - 1).expect("validated");
            let here = self.slope_exponent(j).expect("validated");
            if prev != here {
                breakpoints.push(self.breakpoints[j].clone());
                images.push(self.images[j].clone());
            }
        }
        DyadicPLMap { breakpoints, images }
    }
}

/// rise/len as an exponent of 2, or the named slope diagnostic. Both inputs
/// are positive, so the slope is a power of 2 iff the odd parts agree.
fn slope_as_power_of_two(rise: &DyadicRational, len: &DyadicRational) -> Result<i64> {
    if rise.mantissa != len.mantissa {
        let num = &rise.mantissa << len.exponent;
        let den = &len.mantissa << rise.exponent;
        let g = num.gcd(&den);
        return Err(Error::InvalidDyadicMap(format!("slope {}/{} not a power of 2", num / &g, den / &g)));
    }
    Ok(i64::from(len.exponent) - i64::from(rise.exponent))
}

impl fmt::Display for DyadicPLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for j in 0..self.len() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} ↦ {}", self.breakpoints[j], self.images[j])?;
        }
        write!(f, "}}")
    }
}

/// Converts an automorphism to its dyadic circle presentation under the
/// global quadrant conjugacy, in canonical (coarsest) form.
pub fn to_dyadic(f: &PLAutomorphism) -> DyadicPLMap {
    // Refine until every sector lies in one quadrant and maps into one
    // quadrant: then each piece is affine between standard intervals.
    let quadrants = Fan::quadrants();
    let f_inv = f.inverse();
    let mut rays: Vec<Ray> = f.fan().rays().to_vec();
    rays.extend(quadrants.rays().iter().cloned());
    rays.extend(quadrants.rays().iter().map(|r| f_inv.apply_ray(r)));
    let fan = regularize_fan(&Fan::from_ray_set(rays).expect("refinement of a complete fan"));

    let breakpoints: Vec<DyadicRational> = fan.rays().iter().map(phi_global).collect();
    let images: Vec<DyadicRational> = fan.rays().iter().map(|r| phi_global(&f.apply_ray(r))).collect();
    DyadicPLMap::new(breakpoints, images)
        .expect("the quadrant conjugacy of an automorphism is a dyadic map")
        .canonical()
}

/// A piece of a dyadic map during subdivision: source [s_lo, s_hi] ⊆ [0, 1]
/// and lifted image [t_lo, t_lo + rise] ⊆ [0, 2), slope 2^exp.
struct LiftedPiece {
    s_lo: DyadicRational,
    s_hi: DyadicRational,
    t_lo: DyadicRational,
    t_hi: DyadicRational,
    exp: i64,
}

/// Converts a dyadic circle map back to a piecewise linear automorphism (the
/// inverse of [`to_dyadic`] up to canonical forms).
pub fn from_dyadic(map: &DyadicPLMap) -> Result<PLAutomorphism> {
    // Re-validate so raw struct literals cannot sneak past the invariants.
    let map = DyadicPLMap::new(map.breakpoints().to_vec(), map.images().to_vec())?;

    // Lifted pieces, then bisect until each is standard-to-standard at depth
    // ≥ 2 on both sides (so each side sits inside a single quarter).
    let mut work: Vec<LiftedPiece> = Vec::with_capacity(map.len());
    let mut t_lo = map.images()[0].clone();
    for j in 0..map.len() {
        let t_hi = t_lo.add(&map.rise(j));
        work.push(LiftedPiece {
            s_lo: map.breakpoints()[j].clone(),
            s_hi: if j + 1 < map.len() { map.breakpoints()[j + 1].clone() } else { DyadicRational::one() },
            t_lo: t_lo.clone(),
            t_hi: t_hi.clone(),
            exp: map.slope_exponent(j)?,
        });
        t_lo = t_hi;
    }
    work.reverse(); // process left to right by popping

    let one = DyadicRational::one();
    let two = one.add(&one);
    let mut rays: Vec<Ray> = Vec::new();
    let mut matrices: Vec<Mat2> = Vec::new();
    let mut guard = 0usize;
    while let Some(p) = work.pop() {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::InvalidDyadicMap("subdivision did not terminate".into()));
        }
        if let Some((src, dst)) = standard_pair(&p, &one, &two) {
            let (u_lo, u_hi) = quarter_sector_facets(&src)?;
            let (w_lo, w_hi) = quarter_sector_facets(&dst)?;
            rays.push(u_lo.clone());
            matrices.push(Mat2::sector_isomorphism(&u_lo, &u_hi, &w_lo, &w_hi));
        } else {
            let s_mid = p.s_lo.average(&p.s_hi);
            let t_mid = p.t_lo.average(&p.t_hi);
            // Right half pushed first so the left half pops next.
            work.push(LiftedPiece {
                s_lo: s_mid.clone(),
                s_hi: p.s_hi,
                t_lo: t_mid.clone(),
                t_hi: p.t_hi,
                exp: p.exp,
            });
            work.push(LiftedPiece { s_lo: p.s_lo, s_hi: s_mid, t_lo: p.t_lo, t_hi: t_mid, exp: p.exp });
        }
    }

    let fan = Fan::from_ordered_rays(rays).expect("piece facets walk the circle once");
    Ok(PLAutomorphism::new(fan, matrices)
        .expect("a valid dyadic map assembles into a valid automorphism")
        .canonical())
}

/// Both sides of the piece as standard intervals at depth ≥ 2, image shifted
/// back into [0, 1]; None when further bisection is needed.
fn standard_pair(
    p: &LiftedPiece,
    one: &DyadicRational,
    two: &DyadicRational,
) -> Option<(StandardDyadicInterval, StandardDyadicInterval)> {
    let src = StandardDyadicInterval::from_endpoints(&p.s_lo, &p.s_hi)?;
    if src.k < 2 {
        return None;
    }
    let (t_lo, t_hi) = if p.t_lo >= *one {
        (p.t_lo.sub(one), p.t_hi.sub(one))
    } else if p.t_hi > *one {
        return None; // image straddles the wrap point
    } else {
        (p.t_lo.clone(), p.t_hi.clone())
    };
    debug_assert!(t_hi <= *two);
    let dst = StandardDyadicInterval::from_endpoints(&t_lo, &t_hi)?;
    if dst.k < 2 {
        return None;
    }
    Some((src, dst))
}

/// Facets of the regular sector addressed by a standard interval of depth
/// ≥ 2 inside its quarter.
fn quarter_sector_facets(si: &StandardDyadicInterval) -> Result<(Ray, Ray)> {
    use num_traits::ToPrimitive;
    let j = (&si.a >> (si.k - 2)).to_usize().unwrap_or(0).min(3);
    let sector = Fan::quadrants().sector(j);
    let interval = StandardDyadicInterval::quarter(j);
    Ok((phi_inverse(&sector, &interval, &si.lo())?, phi_inverse(&sector, &interval, &si.hi())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntVector;

    fn ray(x: i64, y: i64) -> Ray {
        Ray::new(x, y).unwrap()
    }

    fn sector(lo: (i64, i64), hi: (i64, i64)) -> Sector {
        Sector::new(ray(lo.0, lo.1), ray(hi.0, hi.1)).unwrap()
    }

    fn dy(p: i64, q: i64) -> DyadicRational {
        assert!(q > 0 && q & (q - 1) == 0);
        DyadicRational::new(p, q.trailing_zeros())
    }

    #[test]
    fn dyadic_rational_basics() {
        assert_eq!(dy(2, 4), dy(1, 2));
        assert_eq!(dy(3, 8).to_string(), "3/8");
        assert_eq!(DyadicRational::zero().to_string(), "0");
        assert_eq!(DyadicRational::parse("3/8").unwrap(), dy(3, 8));
        assert_eq!(DyadicRational::parse("1").unwrap(), DyadicRational::one());
        assert!(DyadicRational::parse("1/3").is_err());
        assert!(dy(1, 4) < dy(3, 8));
        assert_eq!(dy(1, 4).average(&dy(1, 2)), dy(3, 8));
        assert_eq!(dy(1, 8).times_pow2(2), dy(1, 2));
        assert_eq!(dy(1, 2).times_pow2(-1), dy(1, 4));
        assert_eq!(dy(5, 4).mod_one(), dy(1, 4));
    }

    #[test]
    fn phi_forward_examples() {
        let s = sector((1, 0), (0, 1));
        let i = StandardDyadicInterval::unit();
        assert_eq!(phi_forward(&s, &i, &ray(1, 1)).unwrap(), dy(1, 2));
        assert_eq!(phi_forward(&s, &i, &ray(1, 0)).unwrap(), DyadicRational::zero());
        assert_eq!(phi_forward(&s, &i, &ray(0, 1)).unwrap(), DyadicRational::one());
        assert_eq!(phi_forward(&s, &i, &ray(2, 1)).unwrap(), dy(1, 4));
        assert_eq!(phi_forward(&s, &i, &ray(3, 2)).unwrap(), dy(3, 8));
        assert!(matches!(phi_forward(&s, &i, &ray(-1, 1)), Err(Error::RayOutsideSector(..))));
    }

    #[test]
    fn phi_inverse_examples() {
        let s = sector((1, 0), (0, 1));
        let i = StandardDyadicInterval::unit();
        assert_eq!(phi_inverse(&s, &i, &dy(1, 2)).unwrap(), ray(1, 1));
        assert_eq!(phi_inverse(&s, &i, &dy(3, 8)).unwrap(), ray(3, 2));
        assert_eq!(phi_inverse(&s, &i, &DyadicRational::zero()).unwrap(), ray(1, 0));
        assert!(matches!(
            phi_inverse(&s, &i, &DyadicRational::new(9, 3)),
            Err(Error::ValueOutsideInterval(_))
        ));
    }

    #[test]
    fn phi_round_trips_on_a_skew_sector() {
        let s = sector((2, 1), (1, 1));
        let i = StandardDyadicInterval::new(5, 3).unwrap();
        for (num, exp) in [(40i64, 6u32), (41, 6), (43, 6), (47, 6), (5, 3), (6, 3), (11, 4)] {
            let t = DyadicRational::new(num, exp);
            let r = phi_inverse(&s, &i, &t).unwrap();
            assert_eq!(phi_forward(&s, &i, &r).unwrap(), t);
        }
    }

    #[test]
    fn phi_is_order_preserving() {
        let s = sector((1, 0), (0, 1));
        let i = StandardDyadicInterval::unit();
        let mut rays: Vec<Ray> = Vec::new();
        for x in 1..=8i64 {
            for y in 1..=8i64 {
                if BigInt::from(x).gcd(&BigInt::from(y)).is_one() {
                    rays.push(ray(x, y));
                }
            }
        }
        rays.sort_by(|a, b| crate::lattice::ccw_compare(a, b, &ray(1, 0)));
        let values: Vec<DyadicRational> = rays.iter().map(|r| phi_forward(&s, &i, r).unwrap()).collect();
        for w in values.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    /// Independent question-mark oracle: ?(p/q) from the continued fraction
    /// expansion, ?([0; a1, a2, …]) = 2·Σ (−1)^{k+1} 2^{−(a1+⋯+ak)}.
    fn question_mark(p: i64, q: i64) -> DyadicRational {
        assert!(0 < p && p < q);
        let (mut num, mut den) = (q, p); // expand q/p = a1 + 1/(a2 + …)
        let mut depth_sum = 0u32;
        let mut sign = true;
        let mut acc = DyadicRational::zero();
        while den != 0 {
            let a = num / den;
            depth_sum += a as u32;
            let term = DyadicRational::new(1, depth_sum);
            acc = if sign { acc.add(&term) } else { acc.sub(&term) };
            sign = !sign;
            let r = num % den;
            num = den;
            den = r;
        }
        acc.times_pow2(1)
    }

    #[test]
    fn phi_matches_question_mark_on_the_slope_sector() {
        // ⟨(1,0),(1,1)⟩ parameterized by slope: the ray (q, p) has slope p/q.
        let s = sector((1, 0), (1, 1));
        let i = StandardDyadicInterval::unit();
        assert_eq!(phi_forward(&s, &i, &ray(2, 1)).unwrap(), question_mark(1, 2));
        assert_eq!(phi_forward(&s, &i, &ray(3, 1)).unwrap(), dy(1, 4));
        assert_eq!(phi_forward(&s, &i, &ray(3, 2)).unwrap(), dy(3, 4));

        // All Stern–Brocot nodes of depth ≤ 5 between 0/1 and 1/1.
        fn walk(lo: (i64, i64), hi: (i64, i64), depth: u32, out: &mut Vec<(i64, i64)>) {
            if depth == 0 {
                return;
            }
            let m = (lo.0 + hi.0, lo.1 + hi.1);
            out.push(m);
            walk(lo, m, depth - 1, out);
            walk(m, hi, depth - 1, out);
        }
        let mut slopes = Vec::new(); // (p, q) pairs
        walk((0, 1), (1, 1), 5, &mut slopes);
        assert_eq!(slopes.len(), 31);
        for (p, q) in slopes {
            let v = phi_forward(&s, &i, &ray(q, p)).unwrap();
            assert_eq!(v, question_mark(p, q), "?({p}/{q})");
        }
    }

    #[test]
    fn dyadic_map_validation() {
        let id = DyadicPLMap::identity();
        assert_eq!(id.eval(&dy(3, 8)).unwrap(), dy(3, 8));

        // Slope 3/2 on the second piece.
        let err = DyadicPLMap::new(
            vec![DyadicRational::zero(), dy(1, 2)],
            vec![DyadicRational::zero(), dy(1, 4)],
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "invalid dyadic map: slope 3/2 not a power of 2");

        // Orientation reversal is rejected.
        assert!(DyadicPLMap::new(
            vec![DyadicRational::zero(), dy(1, 4), dy(1, 2)],
            vec![DyadicRational::zero(), dy(1, 2), dy(1, 4)],
        )
        .is_err());

        // Breakpoint 0 is inserted when missing: x ↦ x + 1/2 given on {1/4}.
        let m = DyadicPLMap::new(vec![dy(1, 4)], vec![dy(3, 4)]).unwrap();
        assert_eq!(m.breakpoints()[0], DyadicRational::zero());
        assert_eq!(m.images()[0], dy(1, 2));
    }

    #[test]
    fn quarter_rotation_converts_to_quarter_translation() {
        let r = PLAutomorphism::rotation(1, 4).unwrap();
        let m = to_dyadic(&r);
        assert_eq!(m.breakpoints(), &[DyadicRational::zero()]);
        assert_eq!(m.images(), &[dy(1, 4)]);
        assert_eq!(m.eval(&dy(7, 8)).unwrap(), dy(1, 8));

        assert_eq!(to_dyadic(&PLAutomorphism::identity()), DyadicPLMap::identity());
    }

    #[test]
    fn order_three_rotation_dyadic_presentation() {
        // Frozen from the quadrant conjugacy of the sector rotation on
        // {(1,0), (0,1), (−1,−1)}; the slope multiset is {2, 1, 1/2} twice.
        let f = PLAutomorphism::rotation(1, 3).unwrap();
        let m = to_dyadic(&f);
        assert_eq!(
            m.breakpoints(),
            &[DyadicRational::zero(), dy(1, 8), dy(1, 4), dy(1, 2), dy(5, 8), dy(3, 4)]
        );
        assert_eq!(m.images(), &[dy(1, 4), dy(1, 2), dy(5, 8), dy(3, 4), DyadicRational::zero(), dy(1, 8)]);
        let exps: Vec<i64> = (0..m.len()).map(|j| m.slope_exponent(j).unwrap()).collect();
        assert_eq!(exps, vec![1, 0, -1, 1, 0, -1]);
        assert_eq!(from_dyadic(&m).unwrap(), f);
    }

    #[test]
    fn from_dyadic_examples() {
        let quarter = DyadicPLMap::new(vec![DyadicRational::zero()], vec![dy(1, 4)]).unwrap();
        assert_eq!(from_dyadic(&quarter).unwrap(), PLAutomorphism::rotation(1, 4).unwrap());

        assert!(from_dyadic(&DyadicPLMap::identity()).unwrap().is_identity());
    }

    #[test]
    fn round_trips_are_identities_in_canonical_form() {
        for seed in 0..8u64 {
            let f = PLAutomorphism::random(seed, 3);
            let m = to_dyadic(&f);
            assert_eq!(from_dyadic(&m).unwrap(), f, "seed {seed}");
            assert_eq!(to_dyadic(&from_dyadic(&m).unwrap()), m, "seed {seed}");
        }
    }

    #[test]
    fn conjugacy_identity_holds_exactly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for seed in 0..6u64 {
            let f = PLAutomorphism::random(seed, 3);
            let m = to_dyadic(&f);
            for _ in 0..100 {
                let exp = rng.gen_range(1..=12u32);
                let num = rng.gen_range(0..(1u64 << exp));
                let t = DyadicRational::new(num, exp);
                let via_rays = phi_global(&f.apply_ray(&phi_global_inverse(&t).unwrap()));
                assert_eq!(via_rays, m.eval(&t).unwrap(), "seed {seed}, t = {t}");
            }
        }
    }

    #[test]
    fn canonical_merges_equal_slopes() {
        // x ↦ x + 1/4 presented with redundant breakpoints.
        let m = DyadicPLMap::new(
            vec![DyadicRational::zero(), dy(1, 4), dy(1, 2), dy(3, 4)],
            vec![dy(1, 4), dy(1, 2), dy(3, 4), DyadicRational::zero()],
        )
        .unwrap();
        let c = m.canonical();
        assert_eq!(c.breakpoints(), &[DyadicRational::zero()]);
        assert_eq!(c.images(), &[dy(1, 4)]);
    }
}
