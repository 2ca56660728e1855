//! Critical portraits, critical markings, unlinked classes and itineraries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::{self, tau, unlinked, Angle, AngleSet, Arc, CircleError, OrbitSummary};

#[derive(Debug, Error)]
pub enum PortraitError {
    #[error("invalid critical portrait: {0}")]
    ValidationFailed(PortraitReport),
    #[error("invalid marking: {0}")]
    InvalidMarking(String),
    #[error("no valid block family for Julia critical point #{0}")]
    EmptyEnumeration(usize),
    #[error("Julia critical point #{0} carries {1} angles; at most 16 are enumerated")]
    TooManyAngles(usize, usize),
    #[error(transparent)]
    Circle(#[from] CircleError),
}

/// Per-clause violations found by [`validate_portrait`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PortraitReport {
    /// Clause (1): blocks whose image is not a single angle.
    pub non_singleton_image: Vec<usize>,
    /// Clause (2): pairs of blocks with linked hulls.
    pub linked_pairs: Vec<(usize, usize)>,
    /// Clause (3): blocks with fewer than two angles.
    pub small_blocks: Vec<usize>,
    /// Clause (3): `sum(|block| - 1)` when it differs from `d - 1`.
    pub degree_sum: Option<usize>,
    /// Blocks that close a loop of hulls. Such a loop encloses a gap that
    /// never meets the circle, leaving fewer than `d` unlinked classes.
    pub cyclic_blocks: Vec<usize>,
    pub degree_too_small: bool,
    pub no_blocks: bool,
}

impl PortraitReport {
    pub fn is_ok(&self) -> bool {
        self.non_singleton_image.is_empty()
            && self.linked_pairs.is_empty()
            && self.small_blocks.is_empty()
            && self.degree_sum.is_none()
            && self.cyclic_blocks.is_empty()
            && !self.degree_too_small
            && !self.no_blocks
    }
}

impl fmt::Display for PortraitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.degree_too_small {
            parts.push("degree must be at least 2".to_string());
        }
        if self.no_blocks {
            parts.push("no blocks".to_string());
        }
        if !self.non_singleton_image.is_empty() {
            parts.push(format!("clause 1 (singleton image) fails for blocks {:?}", self.non_singleton_image));
        }
        if !self.linked_pairs.is_empty() {
            parts.push(format!("clause 2 (unlinked hulls) fails for pairs {:?}", self.linked_pairs));
        }
        if !self.small_blocks.is_empty() {
            parts.push(format!("clause 3 fails: blocks {:?} have fewer than 2 angles", self.small_blocks));
        }
        if let Some(sum) = self.degree_sum {
            parts.push(format!("clause 3 fails: sum of (|block| - 1) is {sum}"));
        }
        if !self.cyclic_blocks.is_empty() {
            parts.push(format!("blocks {:?} close a loop of hulls", self.cyclic_blocks));
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// A validated critical portrait of degree `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CriticalPortrait {
    degree: u64,
    blocks: Vec<AngleSet>,
}

impl CriticalPortrait {
    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn blocks(&self) -> &[AngleSet] {
        &self.blocks
    }

    /// Images `tau(block)` (one angle per block).
    pub fn critical_values(&self) -> Vec<Angle> {
        self.blocks
            .iter()
            .map(|b| tau(self.degree, b.as_slice()[0]))
            .collect()
    }

    /// Rotates every angle by `offset`. Rotation preserves all three portrait
    /// clauses, so the result is valid whenever it is representable.
    pub fn rotated(&self, offset: &BigRational) -> Result<CriticalPortrait, CircleError> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|a| a.shifted(offset)).collect::<Result<AngleSet, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CriticalPortrait {
            degree: self.degree,
            blocks,
        })
    }
}

/// One block of the portrait/marking file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockData {
    pub angles: AngleSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preferred: Option<Angle>,
}

/// File format shared by portraits and markings; roles are optional for a
/// bare portrait.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortraitData {
    pub degree: u64,
    pub blocks: Vec<BlockData>,
}

impl PortraitData {
    pub fn report(&self) -> PortraitReport {
        let blocks: Vec<AngleSet> = self.blocks.iter().map(|b| b.angles.clone()).collect();
        check_portrait(self.degree, &blocks)
    }

    pub fn portrait(&self) -> Result<CriticalPortrait, PortraitError> {
        validate_portrait(self.degree, self.blocks.iter().map(|b| b.angles.clone()).collect())
    }

    pub fn marking(&self) -> Result<CriticalMarking, PortraitError> {
        let portrait = self.portrait()?;
        let roles = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| b.role.ok_or_else(|| PortraitError::InvalidMarking(format!("block {i} has no role"))))
            .collect::<Result<Vec<_>, _>>()?;
        let preferred = self.blocks.iter().map(|b| b.preferred).collect();
        CriticalMarking::new(portrait, roles, preferred)
    }
}

impl From<&CriticalPortrait> for PortraitData {
    fn from(p: &CriticalPortrait) -> Self {
        PortraitData {
            degree: p.degree,
            blocks: p
                .blocks
                .iter()
                .map(|b| BlockData { angles: b.clone(), role: None, preferred: None })
                .collect(),
        }
    }
}

impl From<&CriticalMarking> for PortraitData {
    fn from(m: &CriticalMarking) -> Self {
        let mut data = PortraitData::from(&m.portrait);
        for (i, b) in data.blocks.iter_mut().enumerate() {
            b.role = Some(m.roles[i]);
            b.preferred = m.preferred[i];
        }
        data
    }
}

impl Serialize for CriticalPortrait {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PortraitData::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CriticalPortrait {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        PortraitData::deserialize(d)?.portrait().map_err(serde::de::Error::custom)
    }
}

impl Serialize for CriticalMarking {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PortraitData::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CriticalMarking {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        PortraitData::deserialize(d)?.marking().map_err(serde::de::Error::custom)
    }
}

pub fn check_portrait(d: u64, blocks: &[AngleSet]) -> PortraitReport {
    let mut report = PortraitReport {
        degree_too_small: d < 2,
        no_blocks: blocks.is_empty(),
        ..Default::default()
    };
    if report.degree_too_small {
        return report;
    }
    for (i, b) in blocks.iter().enumerate() {
        if b.len() < 2 {
            report.small_blocks.push(i);
        }
        if b.image(d).len() != 1 {
            report.non_singleton_image.push(i);
        }
    }
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if !blocks[i].is_empty() && !blocks[j].is_empty() && !unlinked(&blocks[i], &blocks[j]) {
                report.linked_pairs.push((i, j));
            }
        }
    }
    let sum: usize = blocks.iter().map(|b| b.len().saturating_sub(1)).sum();
    if !blocks.is_empty() && sum as u64 != d - 1 {
        report.degree_sum = Some(sum);
    }
    report.cyclic_blocks = cyclic_blocks(blocks);
    report
}

// Union-find over the angles: a block closes a loop when two of its angles
// are already joined through earlier blocks.
fn cyclic_blocks(blocks: &[AngleSet]) -> Vec<usize> {
    fn root(parent: &mut BTreeMap<Angle, Angle>, a: Angle) -> Angle {
        let p = *parent.entry(a).or_insert(a);
        if p == a {
            return a;
        }
        let r = root(parent, p);
        parent.insert(a, r);
        r
    }
    let mut parent = BTreeMap::new();
    let mut out = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let roots: Vec<Angle> = b.iter().map(|&a| root(&mut parent, a)).collect();
        let distinct: BTreeSet<Angle> = roots.iter().copied().collect();
        if distinct.len() < roots.len() {
            out.push(i);
        }
        for r in distinct {
            parent.insert(r, roots[0]);
        }
    }
    out
}

pub fn validate_portrait(d: u64, blocks: Vec<AngleSet>) -> Result<CriticalPortrait, PortraitError> {
    let report = check_portrait(d, &blocks);
    if report.is_ok() {
        Ok(CriticalPortrait { degree: d, blocks })
    } else {
        Err(PortraitError::ValidationFailed(report))
    }
}

/// The degree-2 portrait `{theta/2, theta/2 + 1/2}`.
pub fn quadratic_portrait(theta: Angle) -> Result<CriticalPortrait, PortraitError> {
    let block: AngleSet = theta.preimages(2)?.into_iter().collect();
    validate_portrait(2, vec![block])
}

/// One of the `d` unlinked classes: a union of open arcs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnlinkedClass {
    pub arcs: Vec<Arc>,
}

impl UnlinkedClass {
    pub fn length(&self) -> BigRational {
        self.arcs.iter().map(Arc::length).fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn contains(&self, x: Angle) -> bool {
        self.arcs.iter().any(|a| a.contains(x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// The partition of the circle into unlinked classes, with lookup of the
/// class on either side of an angle.
#[derive(Clone, Debug)]
pub struct ClassPartition {
    breakpoints: Vec<Angle>,
    // class index (0-based) of the elementary arc (b_j, b_{j+1})
    arc_class: Vec<usize>,
    classes: Vec<UnlinkedClass>,
}

impl ClassPartition {
    pub fn new(portrait: &CriticalPortrait) -> ClassPartition {
        let breakpoints: Vec<Angle> =
            AngleSet::new(portrait.blocks.iter().flat_map(|b| b.iter().copied()))
                .as_slice()
                .to_vec();
        let n = breakpoints.len();
        let mut by_signature: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for j in 0..n {
            // points just to the right of b_j
            let sig: Vec<usize> = portrait
                .blocks
                .iter()
                .map(|b| {
                    let k = b.len();
                    let below_or_at = b.as_slice().partition_point(|a| *a <= breakpoints[j]);
                    (below_or_at + k - 1) % k
                })
                .collect();
            by_signature.entry(sig).or_default().push(j);
        }
        let mut groups: Vec<Vec<usize>> = by_signature.into_values().collect();
        groups.sort_by_key(|g| g[0]);
        let mut arc_class = vec![0; n];
        let classes = groups
            .iter()
            .enumerate()
            .map(|(c, arcs)| {
                for &j in arcs {
                    arc_class[j] = c;
                }
                UnlinkedClass {
                    arcs: arcs
                        .iter()
                        .map(|&j| Arc {
                            start: breakpoints[j],
                            end: breakpoints[(j + 1) % n],
                        })
                        .collect(),
                }
            })
            .collect();
        ClassPartition {
            breakpoints,
            arc_class,
            classes,
        }
    }

    pub fn classes(&self) -> &[UnlinkedClass] {
        &self.classes
    }

    /// 1-based index of the class containing `(t, t + eps)` or `(t - eps, t)`.
    pub fn class_index(&self, t: Angle, side: Side) -> usize {
        let n = self.breakpoints.len();
        let count = match side {
            Side::Right => self.breakpoints.partition_point(|b| *b <= t),
            Side::Left => self.breakpoints.partition_point(|b| *b < t),
        };
        self.arc_class[(count + n - 1) % n] + 1
    }
}

pub fn unlinked_classes(portrait: &CriticalPortrait) -> Vec<UnlinkedClass> {
    ClassPartition::new(portrait).classes
}

/// Eventually periodic symbol sequence in minimal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Itinerary {
    pub preperiod: usize,
    pub period: usize,
    pub digits: Vec<usize>,
}

impl Itinerary {
    /// Minimal representation of the sequence `digits[..pre]` followed by
    /// `digits[pre..]` repeated.
    pub fn minimal(preperiod: usize, mut digits: Vec<usize>) -> Itinerary {
        let period = digits.len() - preperiod;
        let block = &digits[preperiod..];
        let period = (1..=period)
            .find(|&p| period.is_multiple_of(p) && (p..period).all(|i| block[i] == block[i - p]))
            .unwrap_or(period);
        digits.truncate(preperiod + period);
        let mut pre = preperiod;
        while pre > 0 && digits[pre - 1] == digits[pre - 1 + period] {
            // rotate the period block one step to the left
            digits.pop();
            pre -= 1;
        }
        Itinerary {
            preperiod: pre,
            period,
            digits,
        }
    }

    pub fn digit(&self, n: usize) -> usize {
        if n < self.preperiod {
            self.digits[n]
        } else {
            self.digits[self.preperiod + (n - self.preperiod) % self.period]
        }
    }
}

pub fn itinerary_with(partition: &ClassPartition, orbit: &OrbitSummary, side: Side) -> Itinerary {
    let digits = orbit
        .points
        .iter()
        .map(|&p| partition.class_index(p, side))
        .collect();
    Itinerary::minimal(orbit.preperiod, digits)
}

pub fn itinerary(portrait: &CriticalPortrait, t: Angle, side: Side) -> Itinerary {
    let partition = ClassPartition::new(portrait);
    let orbit = circle::orbit(portrait.degree, t);
    itinerary_with(&partition, &orbit, side)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Fatou,
    Julia,
    Escape,
}

/// A critical portrait whose blocks are tagged with the kind of critical
/// point they mark.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalMarking {
    portrait: CriticalPortrait,
    roles: Vec<Role>,
    preferred: Vec<Option<Angle>>,
}

impl CriticalMarking {
    pub fn new(
        portrait: CriticalPortrait,
        roles: Vec<Role>,
        preferred: Vec<Option<Angle>>,
    ) -> Result<CriticalMarking, PortraitError> {
        let n = portrait.blocks.len();
        if roles.len() != n || preferred.len() != n {
            return Err(PortraitError::InvalidMarking(format!(
                "{n} blocks but {} roles and {} preferred entries",
                roles.len(),
                preferred.len()
            )));
        }
        for (i, p) in preferred.iter().enumerate() {
            if let Some(a) = p {
                if !portrait.blocks[i].contains(a) {
                    return Err(PortraitError::InvalidMarking(format!(
                        "preferred angle {a} is not in block {i}"
                    )));
                }
            }
        }
        Ok(CriticalMarking {
            portrait,
            roles,
            preferred,
        })
    }

    pub fn portrait(&self) -> &CriticalPortrait {
        &self.portrait
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn preferred(&self) -> &[Option<Angle>] {
        &self.preferred
    }

    fn family(&self, fatou: bool) -> Vec<&AngleSet> {
        self.portrait
            .blocks
            .iter()
            .zip(&self.roles)
            .filter(|(_, r)| (**r == Role::Fatou) == fatou)
            .map(|(b, _)| b)
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub pass: bool,
    pub details: Vec<String>,
}

impl PropertyCheck {
    fn from_details(details: Vec<String>) -> PropertyCheck {
        PropertyCheck {
            pass: details.is_empty(),
            details,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkingReport {
    pub c1: PropertyCheck,
    pub c2: PropertyCheck,
    pub c3: PropertyCheck,
    pub c4: PropertyCheck,
    pub c5: PropertyCheck,
    pub c6: PropertyCheck,
    pub c7: PropertyCheck,
}

impl MarkingReport {
    pub fn all_pass(&self) -> bool {
        [&self.c1, &self.c2, &self.c3, &self.c4, &self.c5, &self.c6, &self.c7]
            .iter()
            .all(|c| c.pass)
    }
}

// An angle, optionally displaced by an infinitesimal -eps.
type ShiftedAngle = (Angle, i8);

fn hull_components_disjoint(a: &[ShiftedAngle], b: &[ShiftedAngle]) -> bool {
    if a.iter().any(|x| b.contains(x)) {
        return false;
    }
    let one_sided = |a: &[ShiftedAngle], b: &[ShiftedAngle]| {
        let k = a.len();
        if k < 2 {
            return true;
        }
        let comp = |x: &ShiftedAngle| (a.partition_point(|y| y < x) + k - 1) % k;
        b.iter().all(|x| comp(x) == comp(&b[0]))
    };
    one_sided(a, b) && one_sided(b, a)
}

pub fn check_marking_properties(marking: &CriticalMarking) -> MarkingReport {
    let d = marking.portrait.degree;
    let fatou = marking.family(true);
    let lam = marking.family(false);
    let fatou_angles: BTreeSet<Angle> = fatou.iter().flat_map(|b| b.iter().copied()).collect();
    let lam_angles: BTreeSet<Angle> = lam.iter().flat_map(|b| b.iter().copied()).collect();
    let orbits: BTreeMap<Angle, OrbitSummary> = fatou_angles
        .iter()
        .chain(&lam_angles)
        .map(|&a| (a, circle::orbit(d, a)))
        .collect();

    // C1: every angle is a reduced fraction by construction.
    let c1 = PropertyCheck::from_details(Vec::new());

    // C2
    let mut shifted: Vec<(usize, Vec<ShiftedAngle>)> = Vec::new();
    for (i, (b, r)) in marking.portrait.blocks.iter().zip(&marking.roles).enumerate() {
        let shift = if *r == Role::Fatou { 0 } else { -1 };
        let mut v: Vec<ShiftedAngle> = b.iter().map(|&a| (a, shift)).collect();
        v.sort();
        shifted.push((i, v));
    }
    let mut c2 = Vec::new();
    for x in 0..shifted.len() {
        for y in x + 1..shifted.len() {
            if !hull_components_disjoint(&shifted[x].1, &shifted[y].1) {
                c2.push(format!("blocks {} and {} have intersecting hulls", shifted[x].0, shifted[y].0));
            }
        }
    }

    // C3
    let mut c3 = Vec::new();
    for (name, family, angles) in [("F", &fatou, &fatou_angles), ("L", &lam, &lam_angles)] {
        for (k, block) in family.iter().enumerate() {
            let mut hits = BTreeSet::new();
            for a in angles.iter() {
                let o = &orbits[a];
                for i in 1..=o.points.len() {
                    let p = o.point(i);
                    if block.contains(&p) {
                        hits.insert(p);
                    }
                }
            }
            if hits.len() > 1 {
                c3.push(format!("{name} block {k} is hit by distinct images {hits:?}"));
            }
        }
    }

    // C4
    let c4 = fatou_angles
        .iter()
        .filter(|a| {
            !orbits[*a]
                .periodic_part()
                .iter()
                .any(|p| fatou_angles.contains(p))
        })
        .map(|a| format!("Fatou angle {a} never reaches a periodic Fatou angle"))
        .collect();

    // C5
    let c5 = lam_angles
        .iter()
        .filter(|a| orbits[*a].is_periodic())
        .map(|a| format!("angle {a} is periodic"))
        .collect();

    // C6 and C7 range over the finite set of orbit points of participating angles.
    let partition = ClassPartition::new(&marking.portrait);
    let pool: BTreeSet<Angle> = orbits.values().flat_map(|o| o.points.iter().copied()).collect();
    let itin = |t: Angle, side: Side| itinerary_with(&partition, &circle::orbit(d, t), side);
    let right: BTreeMap<Angle, Itinerary> = pool.iter().map(|&t| (t, itin(t, Side::Right))).collect();
    let left: BTreeMap<Angle, Itinerary> = pool.iter().map(|&t| (t, itin(t, Side::Left))).collect();

    let mut c6 = Vec::new();
    for t in fatou_angles.iter().filter(|a| orbits[*a].is_periodic()) {
        for t2 in pool.iter().filter(|t2| *t2 != t) {
            if right[t] == right[t2] {
                c6.push(format!("{t} and {t2} share a right itinerary"));
            }
        }
    }

    let mut c7 = Vec::new();
    for t in lam_angles.iter().filter(|a| !orbits[*a].is_periodic()) {
        let o = &orbits[t];
        for t2 in lam_angles.iter().filter(|a| !orbits[*a].is_periodic()) {
            for &img in &o.points {
                if img != *t2 && left[&img] == left[t2] {
                    c7.push(format!("image {img} of {t} and {t2} share a left itinerary"));
                }
            }
        }
    }

    MarkingReport {
        c1,
        c2: PropertyCheck::from_details(c2),
        c3: PropertyCheck::from_details(c3),
        c4: PropertyCheck::from_details(c4),
        c5: PropertyCheck::from_details(c5),
        c6: PropertyCheck::from_details(c6),
        c7: PropertyCheck::from_details(c7),
    }
}

/// A block of a weak Julia marking, attached to the Julia critical point it
/// was drawn from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct JuliaBlock {
    pub point: usize,
    pub angles: AngleSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Default)]
pub struct WeakJuliaMarking {
    pub blocks: Vec<JuliaBlock>,
}

impl WeakJuliaMarking {
    /// Stable text form used for deterministic tie-breaks.
    pub fn key(&self) -> String {
        self.blocks
            .iter()
            .map(|b| {
                let angles: Vec<String> = b.angles.iter().map(|a| a.to_string()).collect();
                format!("{}:{{{}}}", b.point, angles.join(","))
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn block_families(
    d: u64,
    args: &AngleSet,
    local_degree: u64,
) -> Vec<Vec<AngleSet>> {
    let angles = args.as_slice();
    let n = angles.len();
    let mut candidates = Vec::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let block: AngleSet = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| angles[i]).collect();
        if block.image(d).len() == 1 {
            candidates.push(block);
        }
    }
    let target = local_degree.saturating_sub(1) as usize;
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn search(
        start: usize,
        remaining: usize,
        candidates: &[AngleSet],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<AngleSet>>,
    ) {
        if remaining == 0 {
            out.push(current.iter().map(|&i| candidates[i].clone()).collect());
            return;
        }
        for i in start..candidates.len() {
            let c = &candidates[i];
            if c.len() - 1 > remaining {
                continue;
            }
            if current.iter().all(|&j| unlinked(&candidates[j], c)) {
                current.push(i);
                search(i + 1, remaining - (c.len() - 1), candidates, current, out);
                current.pop();
            }
        }
    }
    if target > 0 {
        search(0, target, &candidates, &mut current, &mut out);
    }
    out
}

/// All weak Julia markings whose blocks are drawn from the given ray-angle
/// sets of Julia critical points `(arg(c), local degree)`.
pub fn enumerate_weak_julia_markings(
    d: u64,
    points: &[(AngleSet, u64)],
) -> Result<Vec<WeakJuliaMarking>, PortraitError> {
    let mut per_point = Vec::with_capacity(points.len());
    for (i, (args, delta)) in points.iter().enumerate() {
        if args.len() > 16 {
            return Err(PortraitError::TooManyAngles(i, args.len()));
        }
        let families = block_families(d, args, *delta);
        if families.is_empty() {
            return Err(PortraitError::EmptyEnumeration(i));
        }
        per_point.push(families);
    }
    let mut out = vec![WeakJuliaMarking::default()];
    for (i, families) in per_point.iter().enumerate() {
        let mut next = Vec::new();
        for partial in &out {
            for family in families {
                let compatible = family.iter().all(|b| {
                    partial.blocks.iter().all(|existing| unlinked(&existing.angles, b))
                });
                if compatible {
                    let mut m = partial.clone();
                    m.blocks.extend(family.iter().map(|b| JuliaBlock {
                        point: i,
                        angles: b.clone(),
                    }));
                    next.push(m);
                }
            }
        }
        out = next;
    }
    for m in &mut out {
        m.blocks.sort();
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Draws a random valid critical portrait of degree `d` with small
/// denominators, by rejection on the unlinked clause.
pub fn random_portrait<R: Rng + ?Sized>(d: u64, rng: &mut R) -> CriticalPortrait {
    assert!(d >= 2);
    loop {
        let mut blocks: Vec<AngleSet> = Vec::new();
        let mut remaining = d - 1;
        let mut attempts = 0;
        while remaining > 0 && attempts < 200 {
            attempts += 1;
            let den = rng.random_range(1..=24u64);
            let value = Angle::new(rng.random_range(0..den), den).expect("nonzero denominator");
            let fiber = value.preimages(d).expect("small denominators");
            let size = rng.random_range(2..=(remaining + 1).min(d)) as usize;
            let mut idx: Vec<usize> = (0..fiber.len()).collect();
            for i in 0..size {
                let j = rng.random_range(i..idx.len());
                idx.swap(i, j);
            }
            let block: AngleSet = idx[..size].iter().map(|&i| fiber[i]).collect();
            if blocks.iter().all(|b| unlinked(b, &block)) {
                remaining -= (size - 1) as u64;
                blocks.push(block);
            }
        }
        if remaining == 0 {
            if let Ok(p) = validate_portrait(d, blocks) {
                return p;
            }
        }
    }
}
