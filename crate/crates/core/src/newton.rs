//! Postcritically-finite Newton maps described combinatorially.
//!
//! A [`NewtonDescription`] carries the root multiplicities, optionally the
//! numeric roots and a tagged extended Newton graph, and the renormalization
//! components with their periods and polynomial models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exec::Mode;
use crate::hubbard::{self, ComponentSummary, HubbardError, Model, ModelData, Verdict, VertexKind};
use crate::markov::{invariant_split, EntropyValue, MarkovError, MarkovSystem, MarkovSystemData, ENTROPY_TOLERANCE};
use crate::thurston::thurston_entropy;

/// Finite-difference step for multiplier estimates.
pub const DIFF_STEP: f64 = 1e-6;
/// Largest accepted deviation of a numeric multiplier.
pub const MULTIPLIER_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum NewtonError {
    #[error("invalid Newton description: {}", .0.join("; "))]
    ValidationFailed(Vec<String>),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("the continuity criterion only covers generic Newton maps")]
    NotGeneric,
    #[error("a cubic Newton map has at most one renormalization component, got {0}")]
    TooManyComponents(usize),
    #[error("the description has no {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Hubbard(#[from] HubbardError),
}

/// A complex root written as `"re,im"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root(pub Complex64);

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0.re, self.0.im)
    }
}

impl FromStr for Root {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (re, im) = s.split_once(',').unwrap_or((s, "0"));
        let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad root `{s}`"));
        Ok(Root(Complex64::new(parse(re)?, parse(im)?)))
    }
}

impl Serialize for Root {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Root {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeTag {
    #[serde(alias = "Delta")]
    Delta,
    #[serde(alias = "Ray")]
    Ray,
    #[serde(alias = "Forest")]
    Forest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExtendedGraphData")]
pub struct ExtendedGraph {
    #[serde(flatten)]
    pub system: MarkovSystem,
    pub edge_tags: BTreeMap<String, EdgeTag>,
}

impl ExtendedGraph {
    pub fn part(&self, tag: EdgeTag) -> Vec<String> {
        self.system
            .edge_ids()
            .into_iter()
            .filter(|id| self.edge_tags.get(id) == Some(&tag))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RenormComponentData")]
pub struct RenormComponent {
    pub period: u64,
    #[serde(flatten)]
    pub model: Model,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NewtonData")]
pub struct NewtonDescription {
    pub degree: u64,
    pub multiplicities: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<Root>>,
    #[serde(default)]
    pub generic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extended_graph: Option<ExtendedGraph>,
    #[serde(default)]
    pub renorm_components: Vec<RenormComponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedGraphData {
    #[serde(flatten)]
    pub system: MarkovSystemData,
    pub edge_tags: BTreeMap<String, EdgeTag>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenormComponentData {
    pub period: u64,
    #[serde(flatten)]
    pub model: ModelData,
}

/// Unvalidated wire form of [`NewtonDescription`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonData {
    pub degree: u64,
    pub multiplicities: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<Root>>,
    #[serde(default)]
    pub generic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extended_graph: Option<ExtendedGraphData>,
    #[serde(default)]
    pub renorm_components: Vec<RenormComponentData>,
}

impl TryFrom<ExtendedGraphData> for ExtendedGraph {
    type Error = NewtonError;

    fn try_from(data: ExtendedGraphData) -> Result<Self, Self::Error> {
        Ok(ExtendedGraph {
            system: MarkovSystem::new(data.system)?,
            edge_tags: data.edge_tags,
        })
    }
}

impl TryFrom<RenormComponentData> for RenormComponent {
    type Error = NewtonError;

    fn try_from(data: RenormComponentData) -> Result<Self, Self::Error> {
        Ok(RenormComponent {
            period: data.period,
            model: Model::try_from(data.model)?,
        })
    }
}

impl TryFrom<NewtonData> for NewtonDescription {
    type Error = NewtonError;

    fn try_from(data: NewtonData) -> Result<Self, Self::Error> {
        Ok(NewtonDescription {
            degree: data.degree,
            multiplicities: data.multiplicities,
            roots: data.roots,
            generic: data.generic,
            extended_graph: data.extended_graph.map(ExtendedGraph::try_from).transpose()?,
            renorm_components: data
                .renorm_components
                .into_iter()
                .map(RenormComponent::try_from)
                .collect::<Result<_, _>>()?,
        })
    }
}

impl NewtonDescription {
    pub fn with_components(degree: u64, components: Vec<(u64, Model)>) -> NewtonDescription {
        NewtonDescription {
            degree,
            multiplicities: vec![1; degree as usize],
            roots: None,
            generic: true,
            extended_graph: None,
            renorm_components: components
                .into_iter()
                .map(|(period, model)| RenormComponent { period, model })
                .collect(),
        }
    }

    fn components(&self) -> Vec<(u64, Model)> {
        self.renorm_components.iter().map(|c| (c.period, c.model.clone())).collect()
    }
}

// Covers of edges tagged `tag` may only use edges whose tag is in `allowed`.
fn tag_violations(graph: &ExtendedGraph, tag: EdgeTag, allowed: &[EdgeTag], out: &mut Vec<String>) {
    for id in graph.part(tag) {
        for target in graph.system.cover_of(&id).unwrap_or_default() {
            let t = graph.edge_tags.get(target);
            if !t.is_some_and(|t| allowed.contains(t)) {
                out.push(format!("{tag:?} edge `{id}` covers {t:?} edge `{target}`"));
            }
        }
    }
}

pub fn validate_newton(spec: NewtonDescription) -> Result<NewtonDescription, NewtonError> {
    let mut problems = Vec::new();
    if spec.degree < 3 {
        problems.push(format!("degree {} is below 3", spec.degree));
    }
    if spec.multiplicities.len() as u64 != spec.degree {
        problems.push(format!(
            "{} multiplicities given for degree {}",
            spec.multiplicities.len(),
            spec.degree
        ));
    }
    if spec.multiplicities.contains(&0) {
        problems.push("multiplicities must be positive".to_string());
    }
    if let Some(roots) = &spec.roots {
        if roots.len() != spec.multiplicities.len() {
            problems.push(format!("{} roots for {} multiplicities", roots.len(), spec.multiplicities.len()));
        }
        for (i, a) in roots.iter().enumerate() {
            if !(a.0.re.is_finite() && a.0.im.is_finite()) {
                problems.push(format!("root {i} is not finite"));
            }
            for (j, b) in roots.iter().enumerate().skip(i + 1) {
                if a.0 == b.0 {
                    problems.push(format!("roots {i} and {j} coincide"));
                }
            }
        }
    }
    for (i, c) in spec.renorm_components.iter().enumerate() {
        if c.period == 0 {
            problems.push(format!("component {i} has period 0"));
        }
    }
    if let Some(graph) = &spec.extended_graph {
        let ids: BTreeSet<String> = graph.system.edge_ids().into_iter().collect();
        for id in &ids {
            if !graph.edge_tags.contains_key(id) {
                problems.push(format!("edge `{id}` has no tag"));
            }
        }
        for id in graph.edge_tags.keys() {
            if !ids.contains(id) {
                problems.push(format!("tag for unknown edge `{id}`"));
            }
        }
        tag_violations(graph, EdgeTag::Delta, &[EdgeTag::Delta], &mut problems);
        tag_violations(graph, EdgeTag::Ray, &[EdgeTag::Delta, EdgeTag::Ray], &mut problems);
        tag_violations(graph, EdgeTag::Forest, &[EdgeTag::Forest], &mut problems);
    }
    if problems.is_empty() {
        Ok(spec)
    } else {
        Err(NewtonError::ValidationFailed(problems))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierEntry {
    pub point: String,
    pub expected: f64,
    pub computed_re: f64,
    pub computed_im: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierReport {
    pub roots: Vec<MultiplierEntry>,
    pub infinity: MultiplierEntry,
    pub pass: bool,
}

/// Newton map of `prod (z - a_k)^{n_k}`: `z - 1 / sum n_k / (z - a_k)`.
pub fn newton_map(roots: &[Complex64], multiplicities: &[u64], z: Complex64) -> Complex64 {
    let s: Complex64 = roots
        .iter()
        .zip(multiplicities)
        .map(|(a, &n)| Complex64::new(n as f64, 0.0) / (z - a))
        .sum();
    z - s.inv()
}

fn central_difference(g: impl Fn(Complex64) -> Complex64, at: Complex64) -> Complex64 {
    let h = Complex64::new(DIFF_STEP, 0.0);
    (g(at + h) - g(at - h)) / (2.0 * DIFF_STEP)
}

fn entry(point: String, expected: f64, computed: Complex64) -> Result<MultiplierEntry, NewtonError> {
    if !(computed.re.is_finite() && computed.im.is_finite()) {
        return Err(NewtonError::NumericFailure(format!("non-finite multiplier at {point}")));
    }
    Ok(MultiplierEntry {
        deviation: (computed - expected).norm(),
        point,
        expected,
        computed_re: computed.re,
        computed_im: computed.im,
    })
}

/// Numeric multipliers at the roots and at infinity. The expected value at a
/// root of multiplicity `n` is `(n-1)/n`; at infinity it is `N/(N-1)` with
/// `N` the total multiplicity.
pub fn multiplier_check(roots: &[Complex64], multiplicities: &[u64]) -> Result<MultiplierReport, NewtonError> {
    if roots.is_empty() || roots.len() != multiplicities.len() || multiplicities.contains(&0) {
        return Err(NewtonError::ValidationFailed(vec![
            "need one positive multiplicity per root".to_string(),
        ]));
    }
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            if (a - b).norm() < 10.0 * DIFF_STEP {
                return Err(NewtonError::NumericFailure(format!(
                    "roots {a} and {b} are closer than the difference step allows"
                )));
            }
        }
    }
    let f = |z: Complex64| newton_map(roots, multiplicities, z);
    let mut entries = Vec::with_capacity(roots.len());
    for (a, &n) in roots.iter().zip(multiplicities) {
        let expected = (n as f64 - 1.0) / n as f64;
        entries.push(entry(Root(*a).to_string(), expected, central_difference(f, *a))?);
    }
    let total: u64 = multiplicities.iter().sum();
    if total < 2 {
        return Err(NewtonError::NumericFailure("infinity is not a fixed point for a linear polynomial".into()));
    }
    let g = |w: Complex64| f(w.inv()).inv();
    let infinity = entry(
        "infinity".to_string(),
        total as f64 / (total as f64 - 1.0),
        central_difference(g, Complex64::new(0.0, 0.0)),
    )?;
    let pass = entries.iter().chain([&infinity]).all(|e| e.deviation < MULTIPLIER_TOLERANCE);
    Ok(MultiplierReport {
        roots: entries,
        infinity,
        pass,
    })
}

pub fn description_multipliers(spec: &NewtonDescription) -> Result<MultiplierReport, NewtonError> {
    let roots = spec.roots.as_ref().ok_or(NewtonError::Missing("roots"))?;
    let roots: Vec<Complex64> = roots.iter().map(|r| r.0).collect();
    multiplier_check(&roots, &spec.multiplicities)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphEntropyReport {
    /// Entropy of the Forest part; equal to the whole graph's entropy.
    pub entropy: EntropyValue,
    pub full: EntropyValue,
    pub delta: EntropyValue,
    pub ray: EntropyValue,
    pub agrees: bool,
}

pub fn extended_graph_entropy(spec: &NewtonDescription) -> Result<GraphEntropyReport, NewtonError> {
    let graph = spec.extended_graph.as_ref().ok_or(NewtonError::Missing("extended graph"))?;
    let parts = [EdgeTag::Delta, EdgeTag::Ray, EdgeTag::Forest].map(|t| graph.part(t));
    let split = invariant_split(&graph.system, &parts)?;
    // Forest edges must stay in the forest, which the block order alone allows.
    for id in &parts[2] {
        for target in graph.system.cover_of(id).unwrap_or_default() {
            if graph.edge_tags.get(target) != Some(&EdgeTag::Forest) {
                return Err(MarkovError::NotInvariant { edge: id.clone(), target: target.to_string() }.into());
            }
        }
    }
    let forest = split.parts[2];
    Ok(GraphEntropyReport {
        entropy: forest,
        full: split.total,
        delta: split.parts[0],
        ray: split.parts[1],
        agrees: (split.total.value - forest.value).abs() <= ENTROPY_TOLERANCE,
    })
}

/// `max h(P)/p` over the renormalization components, 0 when there are none.
pub fn newton_core_entropy(spec: &NewtonDescription) -> EntropyValue {
    hubbard::renormalized_entropy(&spec.components(), Mode::default()).0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NewtonVerdict {
    pub h: EntropyValue,
    pub verdict: Verdict,
    pub maximal_components: Vec<usize>,
    pub per_component: Vec<ComponentSummary>,
}

pub fn newton_continuity_verdict(spec: &NewtonDescription) -> Result<NewtonVerdict, NewtonError> {
    newton_continuity_verdict_with(spec, Mode::default())
}

pub fn newton_continuity_verdict_with(spec: &NewtonDescription, mode: Mode) -> Result<NewtonVerdict, NewtonError> {
    if !spec.generic {
        return Err(NewtonError::NotGeneric);
    }
    let v = hubbard::ppf_continuity_verdict_with(&spec.components(), mode)?;
    Ok(NewtonVerdict {
        h: v.h,
        verdict: v.verdict,
        maximal_components: v.maximal,
        per_component: v.per_component,
    })
}

fn is_hyperbolic(model: &Model) -> bool {
    match model {
        Model::Forest(f) => !f
            .vertices()
            .iter()
            .any(|v| v.kind == VertexKind::Julia && v.critical),
        Model::Portrait(p) => p
            .critical_values()
            .into_iter()
            .all(|v| crate::circle::orbit(p.degree(), v).is_periodic()),
    }
}

pub fn cubic_verdict(spec: &NewtonDescription) -> Result<NewtonVerdict, NewtonError> {
    if spec.degree != 3 {
        return Err(NewtonError::ValidationFailed(vec![format!(
            "cubic verdict needs degree 3, got {}",
            spec.degree
        )]));
    }
    match spec.renorm_components.as_slice() {
        [] => Ok(NewtonVerdict {
            h: EntropyValue::ZERO,
            verdict: Verdict::Continuous,
            maximal_components: Vec::new(),
            per_component: Vec::new(),
        }),
        [c] => {
            let h_p = match &c.model {
                Model::Forest(f) => hubbard::forest_entropy(f),
                Model::Portrait(p) => thurston_entropy(p),
            };
            let verdict = if is_hyperbolic(&c.model) { Verdict::Continuous } else { Verdict::Discontinuous };
            Ok(NewtonVerdict {
                h: h_p.scaled(1.0 / c.period as f64),
                verdict,
                maximal_components: vec![0],
                per_component: vec![ComponentSummary { period: c.period, h: h_p, mu: None, verdict: Some(verdict) }],
            })
        }
        many => Err(NewtonError::TooManyComponents(many.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::hubbard::HubbardForest;

    const LOG_PHI: f64 = 0.481_211_825_059_603_4;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn validation_examples() {
        assert!(validate_newton(NewtonDescription::with_components(3, vec![])).is_ok());
        let mut bad = NewtonDescription::with_components(3, vec![]);
        bad.multiplicities = vec![2, 1];
        assert!(matches!(validate_newton(bad), Err(NewtonError::ValidationFailed(_))));
        let bad = NewtonDescription::with_components(3, vec![(0, Model::Forest(fixtures::airplane_forest()))]);
        assert!(validate_newton(bad).is_err());
        let mut dup = NewtonDescription::with_components(3, vec![]);
        dup.roots = Some(vec![Root(c(0.0)), Root(c(1.0)), Root(c(1.0))]);
        assert!(validate_newton(dup).is_err());
        assert!(validate_newton(fixtures::newton_cubic()).is_ok());
        assert!(validate_newton(fixtures::newton_ray_into_forest()).is_err());
    }

    #[test]
    fn multipliers() {
        let r = multiplier_check(&[c(0.0), c(1.0), c(-1.0)], &[1, 1, 1]).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.infinity.computed_re - 1.5).abs() < 1e-6);
        assert!(r.roots.iter().all(|e| e.computed_re.abs() < 1e-6));

        let r = multiplier_check(&[c(0.0), c(1.0)], &[2, 1]).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.roots[0].computed_re - 0.5).abs() < 1e-6);

        let roots = [c(1.0), c(-1.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        let r = multiplier_check(&roots, &[1, 1, 1, 1]).unwrap();
        assert!((r.infinity.computed_re - 4.0 / 3.0).abs() < 1e-6);

        assert!(matches!(
            multiplier_check(&[c(0.0), c(1e-9)], &[1, 1]),
            Err(NewtonError::NumericFailure(_))
        ));
    }

    #[test]
    fn graph_entropy() {
        let r = extended_graph_entropy(&fixtures::newton_cubic()).unwrap();
        assert!((r.entropy.value - LOG_PHI).abs() < 1e-9);
        assert!((r.full.value - LOG_PHI).abs() < 1e-9);
        assert!(r.agrees);
        assert_eq!(r.delta.value, 0.0);
        assert!(matches!(
            extended_graph_entropy(&fixtures::newton_ray_into_forest()),
            Err(NewtonError::Markov(MarkovError::NotInvariant { .. }))
        ));
    }

    #[test]
    fn empty_forest_graph() {
        let mut spec = fixtures::newton_cubic();
        let graph = spec.extended_graph.as_mut().unwrap();
        let keep: BTreeSet<String> = graph.part(EdgeTag::Delta).into_iter().chain(graph.part(EdgeTag::Ray)).collect();
        graph.system = graph.system.restrict(&keep).unwrap();
        graph.edge_tags.retain(|k, _| keep.contains(k));
        assert_eq!(extended_graph_entropy(&spec).unwrap().entropy.value, 0.0);
    }

    #[test]
    fn core_entropy_examples() {
        let s = NewtonDescription::with_components(3, vec![(2, Model::Forest(fixtures::airplane_forest()))]);
        assert!((newton_core_entropy(&s).value - LOG_PHI / 2.0).abs() < 1e-9);
        assert_eq!(newton_core_entropy(&NewtonDescription::with_components(3, vec![])), EntropyValue::ZERO);
        let s = NewtonDescription::with_components(
            3,
            vec![(1, Model::Forest(fixtures::airplane_forest())), (3, Model::Forest(fixtures::chebyshev_forest()))],
        );
        assert!((newton_core_entropy(&s).value - LOG_PHI).abs() < 1e-9);
    }

    #[test]
    fn continuity_examples() {
        let v = newton_continuity_verdict(&NewtonDescription::with_components(3, vec![])).unwrap();
        assert_eq!(v.verdict, Verdict::Continuous);
        let v = newton_continuity_verdict(&NewtonDescription::with_components(
            3,
            vec![(1, Model::Forest(fixtures::chebyshev_forest()))],
        ))
        .unwrap();
        assert_eq!(v.verdict, Verdict::Discontinuous);
        let mut cheb_plus = NewtonDescription::with_components(
            4,
            vec![
                (1, Model::Forest(fixtures::chebyshev_forest())),
                (1, Model::Forest(fixtures::cubic_hyperbolic_forest())),
            ],
        );
        let v = newton_continuity_verdict(&cheb_plus).unwrap();
        assert_eq!(v.verdict, Verdict::Continuous);
        assert_eq!(v.maximal_components, vec![0, 1]);
        cheb_plus.generic = false;
        assert!(matches!(newton_continuity_verdict(&cheb_plus), Err(NewtonError::NotGeneric)));
    }

    #[test]
    fn cubic_examples() {
        let v = cubic_verdict(&NewtonDescription::with_components(3, vec![])).unwrap();
        assert_eq!(v.verdict, Verdict::Continuous);
        let v = cubic_verdict(&fixtures::newton_cubic_basilica()).unwrap();
        assert_eq!(v.verdict, Verdict::Continuous);
        let cheb = NewtonDescription::with_components(3, vec![(2, Model::Forest(fixtures::chebyshev_forest()))]);
        assert_eq!(cubic_verdict(&cheb).unwrap().verdict, Verdict::Discontinuous);
        assert_eq!(newton_continuity_verdict(&cheb).unwrap().verdict, Verdict::Discontinuous);
        let two = NewtonDescription::with_components(
            3,
            vec![(1, Model::Forest(HubbardForest::empty(2))), (2, Model::Forest(fixtures::basilica_forest()))],
        );
        assert!(matches!(cubic_verdict(&two), Err(NewtonError::TooManyComponents(2))));
        let portrait = crate::portrait::quadratic_portrait("1/4".parse().unwrap()).unwrap();
        let s = NewtonDescription::with_components(3, vec![(1, Model::Portrait(portrait))]);
        assert_eq!(cubic_verdict(&s).unwrap().verdict, Verdict::Discontinuous);
    }

    #[test]
    fn json_round_trip() {
        let spec = fixtures::newton_cubic();
        let text = serde_json::to_string(&spec).unwrap();
        let back: NewtonDescription = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
