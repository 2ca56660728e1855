//! Exact arithmetic on the circle `R/Z`.
//!
//! Angles are reduced fractions `p/q` with `0 <= p < q`. Every cyclic-order
//! predicate is decided by integer cross-multiplication; lengths and distances
//! are returned as exact big rationals.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircleError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("angle {0} does not fit in 64-bit numerator/denominator")]
    Overflow(String),
    #[error("cannot parse angle `{0}` (expected \"p/q\")")]
    Parse(String),
}

/// A rational point of the circle, stored in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Angle {
    num: u64,
    den: u64,
}

impl Angle {
    pub const ZERO: Angle = Angle { num: 0, den: 1 };

    /// Builds `num/den` reduced modulo 1.
    pub fn new(num: u64, den: u64) -> Result<Angle, CircleError> {
        if den == 0 {
            return Err(CircleError::ZeroDenominator);
        }
        Ok(Self::reduce(num % den, den))
    }

    /// Builds an angle from a wide fraction, failing if the reduced form does
    /// not fit in 64 bits.
    pub fn from_wide(num: u128, den: u128) -> Result<Angle, CircleError> {
        if den == 0 {
            return Err(CircleError::ZeroDenominator);
        }
        let num = num % den;
        let g = num.gcd(&den);
        let (n, d) = if num == 0 { (0, 1) } else { (num / g, den / g) };
        match (u64::try_from(n), u64::try_from(d)) {
            (Ok(n), Ok(d)) => Ok(Angle { num: n, den: d }),
            _ => Err(CircleError::Overflow(format!("{num}/{den}"))),
        }
    }

    /// Converts an exact rational in any range to its residue mod 1.
    pub fn from_rational(r: &BigRational) -> Result<Angle, CircleError> {
        let frac = r - r.floor();
        let to_u64 = |x: &BigInt| {
            u64::try_from(x.clone()).map_err(|_| CircleError::Overflow(r.to_string()))
        };
        Ok(Angle {
            num: to_u64(frac.numer())?,
            den: to_u64(frac.denom())?,
        })
    }

    fn reduce(num: u64, den: u64) -> Angle {
        if num == 0 {
            return Angle::ZERO;
        }
        let g = num.gcd(&den);
        Angle {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self + other` mod 1.
    pub fn add(&self, other: &Angle) -> Result<Angle, CircleError> {
        let den = self.den as u128 * other.den as u128;
        let num = self.num as u128 * other.den as u128 + other.num as u128 * self.den as u128;
        Angle::from_wide(num, den)
    }

    /// Adds a signed exact rational offset, mod 1.
    pub fn shifted(&self, offset: &BigRational) -> Result<Angle, CircleError> {
        Angle::from_rational(&(self.to_rational() + offset))
    }

    /// The `d` preimages of `self` under `tau(d, .)`, in increasing order.
    pub fn preimages(&self, d: u64) -> Result<Vec<Angle>, CircleError> {
        (0..d)
            .map(|k| {
                Angle::from_wide(
                    self.num as u128 + k as u128 * self.den as u128,
                    d as u128 * self.den as u128,
                )
            })
            .collect()
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Angle {
    type Err = CircleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CircleError::Parse(s.to_string());
        let s = s.trim();
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: u64 = p.parse().map_err(|_| err())?;
        let q: u64 = q.parse().map_err(|_| err())?;
        Angle::new(p, q)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The multiplication map `t -> d t (mod 1)`.
pub fn tau(d: u64, a: Angle) -> Angle {
    assert!(d >= 2, "degree must be at least 2");
    let num = (d as u128 * a.num as u128) % a.den as u128;
    // num < den fits in u64
    Angle::reduce(num as u64, a.den)
}

/// Iterates `tau` `n` times.
pub fn tau_iter(d: u64, a: Angle, n: usize) -> Angle {
    (0..n).fold(a, |t, _| tau(d, t))
}

/// Counterclockwise length of the arc from `from` to `to`, in `[0, 1)`.
pub fn ccw_length(from: Angle, to: Angle) -> BigRational {
    let diff = to.to_rational() - from.to_rational();
    if diff < BigRational::zero() {
        diff + BigRational::one()
    } else {
        diff
    }
}

/// Circle metric `min(|s - t|, 1 - |s - t|)`.
pub fn circle_distance(s: Angle, t: Angle) -> BigRational {
    let a = ccw_length(s, t);
    let b = ccw_length(t, s);
    a.min(b)
}

/// True when `x` lies in the open counterclockwise arc `(start, end)`.
/// When `start == end` the arc is the whole circle minus that point.
pub fn in_open_arc(start: Angle, end: Angle, x: Angle) -> bool {
    match start.cmp(&end) {
        Ordering::Less => start < x && x < end,
        Ordering::Greater => x > start || x < end,
        Ordering::Equal => x != start,
    }
}

/// An open counterclockwise arc of the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub start: Angle,
    pub end: Angle,
}

impl Arc {
    pub fn length(&self) -> BigRational {
        if self.start == self.end {
            BigRational::one()
        } else {
            ccw_length(self.start, self.end)
        }
    }

    pub fn contains(&self, x: Angle) -> bool {
        in_open_arc(self.start, self.end, x)
    }
}

/// A finite set of angles, kept sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct AngleSet {
    elements: Vec<Angle>,
}

impl AngleSet {
    pub fn new(iter: impl IntoIterator<Item = Angle>) -> AngleSet {
        let mut elements: Vec<Angle> = iter.into_iter().collect();
        elements.sort();
        elements.dedup();
        AngleSet { elements }
    }

    pub fn as_slice(&self) -> &[Angle] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, a: &Angle) -> bool {
        self.elements.binary_search(a).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Angle> {
        self.elements.iter()
    }

    pub fn image(&self, d: u64) -> AngleSet {
        AngleSet::new(self.elements.iter().map(|&a| tau(d, a)))
    }

    pub fn intersection_len(&self, other: &AngleSet) -> usize {
        self.elements.iter().filter(|a| other.contains(a)).count()
    }

    /// Index of the open component of `T \ self` containing `x`, where
    /// component `i` is the arc `(a_i, a_{i+1})`. `None` when `x` is in the set.
    pub fn component_of(&self, x: Angle) -> Option<usize> {
        let k = self.elements.len();
        if k == 0 {
            return Some(0);
        }
        match self.elements.binary_search(&x) {
            Ok(_) => None,
            Err(below) => Some((below + k - 1) % k),
        }
    }

    /// The open arc of `T \ self` that contains `x` (for `x` not in the set).
    pub fn component_arc(&self, x: Angle) -> Option<Arc> {
        let i = self.component_of(x)?;
        let k = self.elements.len();
        if k == 0 {
            return None;
        }
        Some(Arc {
            start: self.elements[i],
            end: self.elements[(i + 1) % k],
        })
    }

    /// Component arcs of `T \ self`, in cyclic order starting after the smallest element.
    pub fn complement_arcs(&self) -> Vec<Arc> {
        let k = self.elements.len();
        (0..k)
            .map(|i| Arc {
                start: self.elements[i],
                end: self.elements[(i + 1) % k],
            })
            .collect()
    }
}

impl fmt::Debug for AngleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a AngleSet {
    type Item = &'a Angle;
    type IntoIter = std::slice::Iter<'a, Angle>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

impl FromIterator<Angle> for AngleSet {
    fn from_iter<T: IntoIterator<Item = Angle>>(iter: T) -> Self {
        AngleSet::new(iter)
    }
}

impl Serialize for AngleSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.elements.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AngleSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(AngleSet::new(Vec::<Angle>::deserialize(deserializer)?))
    }
}

/// Preperiod/period decomposition of a forward orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSummary {
    pub preperiod: usize,
    pub period: usize,
    pub points: Vec<Angle>,
}

impl OrbitSummary {
    pub fn is_periodic(&self) -> bool {
        self.preperiod == 0
    }

    /// The `n`-th forward image, for any `n`.
    pub fn point(&self, n: usize) -> Angle {
        if n < self.preperiod {
            self.points[n]
        } else {
            self.points[self.preperiod + (n - self.preperiod) % self.period]
        }
    }

    pub fn periodic_part(&self) -> &[Angle] {
        &self.points[self.preperiod..]
    }
}

pub fn orbit(d: u64, a: Angle) -> OrbitSummary {
    let mut seen: HashMap<Angle, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut t = a;
    loop {
        if let Some(&first) = seen.get(&t) {
            return OrbitSummary {
                preperiod: first,
                period: points.len() - first,
                points,
            };
        }
        seen.insert(t, points.len());
        points.push(t);
        t = tau(d, t);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeparationVerdict {
    Separated,
    SameSide,
    OnBoundary,
}

/// Decides whether the hull of `hull` separates `x` from `y`.
pub fn separation(hull: &AngleSet, x: Angle, y: Angle) -> SeparationVerdict {
    match (hull.component_of(x), hull.component_of(y)) {
        (Some(i), Some(j)) if i == j => SeparationVerdict::SameSide,
        (Some(_), Some(_)) => SeparationVerdict::Separated,
        _ => SeparationVerdict::OnBoundary,
    }
}

/// True when the convex hulls of `a` and `b` in the closed disk meet in at
/// most one point.
pub fn unlinked(a: &AngleSet, b: &AngleSet) -> bool {
    if a.intersection_len(b) > 1 {
        return false;
    }
    one_sided(a, b) && one_sided(b, a)
}

// Every point of `b` outside `a` sits in one component arc of `T \ a`, and a
// shared point (if any) is an endpoint of that arc.
fn one_sided(a: &AngleSet, b: &AngleSet) -> bool {
    if a.len() < 2 {
        return true;
    }
    let mut arc: Option<usize> = None;
    for x in b {
        if let Some(c) = a.component_of(*x) {
            match arc {
                None => arc = Some(c),
                Some(prev) if prev != c => return false,
                _ => {}
            }
        }
    }
    let Some(c) = arc else { return true };
    let k = a.len();
    let ends = [a.as_slice()[c], a.as_slice()[(c + 1) % k]];
    b.iter()
        .filter(|x| a.contains(x))
        .all(|shared| ends.contains(shared))
}

/// Hausdorff distance between two nonempty finite angle sets.
pub fn hausdorff_distance(a: &AngleSet, b: &AngleSet) -> BigRational {
    assert!(!a.is_empty() && !b.is_empty(), "hausdorff distance of an empty set");
    let directed = |from: &AngleSet, to: &AngleSet| {
        from.iter()
            .map(|&s| {
                to.iter()
                    .map(|&t| circle_distance(s, t))
                    .min()
                    .expect("nonempty")
            })
            .max()
            .expect("nonempty")
    };
    directed(a, b).max(directed(b, a))
}
