//! Combinatorial Hubbard forests with angle decorations.
//!
//! A forest is supplied as data (vertices with ray angles, tree edges and a
//! Markov self-map). From it we compute the core entropy, its cycle
//! decomposition, the partition of Fatou critical/postcritical vertices into
//! J-ends for a weak Julia marking, the invariant sub-forest spanned by the
//! periodic ends, and `mu`, the minimum of its entropy over all markings.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::{tau, AngleSet};
use crate::exec::{self, Mode};
use crate::markov::{
    power_system, system_entropy, Edge, EntropyValue, MarkovError, MarkovSystem, MarkovSystemData,
    ENTROPY_TOLERANCE,
};
use crate::portrait::{self, itinerary, validate_portrait, CriticalPortrait, PortraitData, PortraitError, Side};
use crate::thurston::thurston_entropy;

#[derive(Debug, Error)]
pub enum HubbardError {
    #[error("invalid Hubbard forest: {}", .0.join("; "))]
    ValidationFailed(Vec<String>),
    #[error("invalid marking: {0}")]
    InvalidMarking(String),
    #[error("vertex `{0}` has angles on or across the cut at `{1}`")]
    InconsistentAngles(String, String),
    #[error("entropy comparison unresolved: h in [{h_lower}, {h_upper}], mu in [{mu_lower}, {mu_upper}]")]
    Unresolved {
        h_lower: f64,
        h_upper: f64,
        mu_lower: f64,
        mu_upper: f64,
    },
    #[error("component {0} is given as a portrait; a Hubbard forest is needed to compute mu")]
    ModelNeedsForest(usize),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Portrait(#[from] PortraitError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    FatouCenter,
    Julia,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
    #[serde(default)]
    pub angles: AngleSet,
    #[serde(default = "one")]
    pub local_degree: u64,
    #[serde(default)]
    pub critical: bool,
    #[serde(default)]
    pub postcritical: bool,
}

fn one() -> u64 {
    1
}

/// Wire form of a Hubbard forest.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestData {
    pub degree: u64,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub vertex_map: BTreeMap<String, String>,
    pub edge_cover: BTreeMap<String, Vec<String>>,
    pub components: Vec<Vec<String>>,
}

/// A validated Hubbard forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HubbardForest {
    degree: u64,
    vertices: Vec<Vertex>,
    index: HashMap<String, usize>,
    components: Vec<Vec<String>>,
    component_of: HashMap<String, usize>,
    system: MarkovSystem,
}

impl Serialize for HubbardForest {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_data().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HubbardForest {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        validate_forest(ForestData::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl HubbardForest {
    pub fn empty(degree: u64) -> HubbardForest {
        validate_forest(ForestData {
            degree,
            ..Default::default()
        })
        .expect("empty forest is valid")
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.index.get(id).map(|&i| &self.vertices[i])
    }

    pub fn components(&self) -> &[Vec<String>] {
        &self.components
    }

    pub fn system(&self) -> &MarkovSystem {
        &self.system
    }

    pub fn image(&self, id: &str) -> &str {
        self.system.image_of(id).expect("validated vertex")
    }

    pub fn julia_critical(&self) -> Vec<&Vertex> {
        self.vertices
            .iter()
            .filter(|v| v.kind == VertexKind::Julia && v.critical)
            .collect()
    }

    pub fn has_fatou(&self) -> bool {
        self.vertices.iter().any(|v| v.kind == VertexKind::FatouCenter)
    }

    pub fn to_data(&self) -> ForestData {
        let sys = self.system.to_data();
        ForestData {
            degree: self.degree,
            vertices: self.vertices.clone(),
            edges: sys.edges,
            vertex_map: sys.vertex_map,
            edge_cover: sys.edge_cover,
            components: self.components.clone(),
        }
    }

    fn tree_edges(&self, component: usize) -> Vec<&Edge> {
        self.system
            .edges()
            .iter()
            .filter(|e| self.component_of[&e.from] == component)
            .collect()
    }
}

pub fn validate_forest(data: ForestData) -> Result<HubbardForest, HubbardError> {
    let mut problems = Vec::new();
    if data.degree < 2 {
        problems.push(format!("degree {} is below 2", data.degree));
    }
    let mut vertices = data.vertices;
    vertices.sort_by(|a, b| a.id.cmp(&b.id));
    let index: HashMap<String, usize> = vertices.iter().enumerate().map(|(i, v)| (v.id.clone(), i)).collect();
    if index.len() != vertices.len() {
        problems.push("duplicate vertex id".to_string());
    }
    let system = match MarkovSystem::new(MarkovSystemData {
        vertices: vertices.iter().map(|v| v.id.clone()).collect(),
        edges: data.edges,
        vertex_map: data.vertex_map,
        edge_cover: data.edge_cover,
    }) {
        Ok(s) => s,
        Err(e) => {
            problems.push(e.to_string());
            return Err(HubbardError::ValidationFailed(problems));
        }
    };

    // components partition the vertices and each is a tree
    let mut component_of = HashMap::new();
    for (c, comp) in data.components.iter().enumerate() {
        for v in comp {
            if !index.contains_key(v) {
                problems.push(format!("component {c} names unknown vertex `{v}`"));
            } else if component_of.insert(v.clone(), c).is_some() {
                problems.push(format!("vertex `{v}` is in two components"));
            }
        }
    }
    for v in &vertices {
        if !component_of.contains_key(&v.id) {
            problems.push(format!("vertex `{}` is in no component", v.id));
        }
    }
    if !problems.is_empty() {
        return Err(HubbardError::ValidationFailed(problems));
    }
    let mut adjacency: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut edge_count = vec![0usize; data.components.len()];
    for e in system.edges() {
        let (a, b) = (component_of[&e.from], component_of[&e.to]);
        if a != b {
            problems.push(format!("edge `{}` joins components {a} and {b}", e.id));
            continue;
        }
        if e.from == e.to {
            problems.push(format!("edge `{}` is a loop", e.id));
        }
        edge_count[a] += 1;
        adjacency.entry(&e.from).or_default().push(&e.to);
        adjacency.entry(&e.to).or_default().push(&e.from);
    }
    for (c, comp) in data.components.iter().enumerate() {
        if comp.is_empty() {
            problems.push(format!("component {c} is empty"));
            continue;
        }
        if edge_count[c] + 1 != comp.len() {
            problems.push(format!("component {c} has {} vertices and {} edges", comp.len(), edge_count[c]));
            continue;
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut stack = vec![comp[0].as_str()];
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                stack.extend(adjacency.get(v).into_iter().flatten().copied());
            }
        }
        if seen.len() != comp.len() {
            problems.push(format!("component {c} is not connected"));
        }
        let targets: BTreeSet<usize> = comp
            .iter()
            .map(|v| component_of[system.image_of(v).expect("validated")])
            .collect();
        if targets.len() > 1 {
            problems.push(format!("component {c} maps into several components {targets:?}"));
        }
    }

    if data.degree >= 2 {
        for v in &vertices {
            let image = &vertices[index[system.image_of(&v.id).expect("validated")]];
            for a in &v.angles {
                let t = tau(data.degree, *a);
                if !image.angles.contains(&t) {
                    problems.push(format!(
                        "vertex `{}`: image {t} of angle {a} is not an angle of `{}`",
                        v.id, image.id
                    ));
                }
            }
        }
    }
    let mut critical_sum = 0u64;
    for v in &vertices {
        if v.local_degree == 0 {
            problems.push(format!("vertex `{}` has local degree 0", v.id));
        }
        if v.critical {
            if v.local_degree < 2 {
                problems.push(format!("critical vertex `{}` has local degree {}", v.id, v.local_degree));
            }
            critical_sum += v.local_degree.saturating_sub(1);
        }
    }
    if critical_sum > data.degree.saturating_sub(1) {
        problems.push(format!("critical multiplicities sum to {critical_sum} > d - 1"));
    }
    let julia: Vec<&Vertex> = vertices.iter().filter(|v| v.kind == VertexKind::Julia).collect();
    for i in 0..julia.len() {
        for j in i + 1..julia.len() {
            if julia[i].angles.intersection_len(&julia[j].angles) > 0 {
                problems.push(format!(
                    "Julia vertices `{}` and `{}` share a ray angle",
                    julia[i].id, julia[j].id
                ));
            }
        }
    }

    if let Some(portrait) = own_portrait(data.degree, &vertices) {
        for c in julia_landing_conflicts(&vertices, &portrait) {
            problems.push(format!("rays land together but sit at distinct vertices: {c}"));
        }
    }

    if !problems.is_empty() {
        return Err(HubbardError::ValidationFailed(problems));
    }
    Ok(HubbardForest {
        degree: data.degree,
        vertices,
        index,
        components: data.components,
        component_of,
        system,
    })
}

/// Pairs of Julia vertices carrying angles whose left and right itineraries
/// both agree under `portrait`; such rays would land together.
pub fn landing_conflicts(forest: &HubbardForest, portrait: &CriticalPortrait) -> Vec<String> {
    julia_landing_conflicts(&forest.vertices, portrait)
}

fn julia_landing_conflicts(vertices: &[Vertex], portrait: &CriticalPortrait) -> Vec<String> {
    let julia: Vec<&Vertex> = vertices.iter().filter(|v| v.kind == VertexKind::Julia).collect();
    let mut out = Vec::new();
    for i in 0..julia.len() {
        for j in i + 1..julia.len() {
            for a in &julia[i].angles {
                for b in &julia[j].angles {
                    if itinerary(portrait, *a, Side::Left) == itinerary(portrait, *b, Side::Left)
                        && itinerary(portrait, *a, Side::Right) == itinerary(portrait, *b, Side::Right)
                    {
                        out.push(format!("{a} at `{}` and {b} at `{}`", julia[i].id, julia[j].id));
                    }
                }
            }
        }
    }
    out
}

/// The portrait spanned by the angle sets of the critical vertices, when
/// those sets form a valid portrait.
fn own_portrait(degree: u64, vertices: &[Vertex]) -> Option<CriticalPortrait> {
    let blocks: Vec<AngleSet> =
        vertices.iter().filter(|v| v.critical && v.angles.len() >= 2).map(|v| v.angles.clone()).collect();
    validate_portrait(degree, blocks).ok()
}

pub fn forest_entropy(forest: &HubbardForest) -> EntropyValue {
    system_entropy(&forest.system)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleEntropy {
    pub components: Vec<usize>,
    pub period: usize,
    /// `h(f^p | H) / p` for a representative component `H`.
    pub entropy: EntropyValue,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleDecomposition {
    pub cycles: Vec<CycleEntropy>,
    pub max: EntropyValue,
}

fn component_map(forest: &HubbardForest) -> Vec<usize> {
    forest
        .components
        .iter()
        .map(|comp| forest.component_of[forest.image(&comp[0])])
        .collect()
}

/// Cycles of a functional graph on `0..n`, each listed from its smallest element.
fn functional_cycles(next: &[usize]) -> Vec<Vec<usize>> {
    let n = next.len();
    let mut state = vec![0u8; n]; // 0 new, 1 on path, 2 done
    let mut cycles = Vec::new();
    for start in 0..n {
        let mut path = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = next[v];
        }
        if state[v] == 1 {
            let pos = path.iter().position(|&x| x == v).expect("on path");
            let mut cycle = path[pos..].to_vec();
            let min_pos = cycle.iter().enumerate().min_by_key(|(_, x)| **x).map(|(i, _)| i).unwrap_or(0);
            cycle.rotate_left(min_pos);
            cycles.push(cycle);
        }
        for x in path {
            state[x] = 2;
        }
    }
    cycles.sort();
    cycles
}

pub fn cycle_decomposition(forest: &HubbardForest) -> Result<CycleDecomposition, HubbardError> {
    let cycles = functional_cycles(&component_map(forest));
    let mut out = Vec::with_capacity(cycles.len());
    for cycle in cycles {
        let p = cycle.len();
        let rep = cycle[0];
        let edges: BTreeSet<String> = forest.tree_edges(rep).iter().map(|e| e.id.clone()).collect();
        let entropy = if edges.is_empty() {
            EntropyValue::ZERO
        } else {
            let sub = power_system(&forest.system, p).restrict(&edges)?;
            system_entropy(&sub).scaled(1.0 / p as f64)
        };
        out.push(CycleEntropy {
            components: cycle,
            period: p,
            entropy,
        });
    }
    let max = out
        .iter()
        .map(|c| c.entropy)
        .fold(EntropyValue::ZERO, |a, b| if b.value > a.value { b } else { a });
    Ok(CycleDecomposition { cycles: out, max })
}

/// One block of a weak Julia marking on a forest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JuliaCut {
    pub vertex: String,
    pub angles: AngleSet,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ForestMarking {
    pub cuts: Vec<JuliaCut>,
}

impl fmt::Display for ForestMarking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .cuts
            .iter()
            .map(|c| {
                let a: Vec<String> = c.angles.iter().map(|x| x.to_string()).collect();
                format!("{}:{{{}}}", c.vertex, a.join(","))
            })
            .collect();
        write!(f, "[{}]", parts.join(";"))
    }
}

/// All weak Julia markings drawn from the Julia critical vertices of `forest`.
pub fn weak_julia_markings(forest: &HubbardForest) -> Result<Vec<ForestMarking>, HubbardError> {
    let critical = forest.julia_critical();
    let points: Vec<(AngleSet, u64)> = critical.iter().map(|v| (v.angles.clone(), v.local_degree)).collect();
    let markings = portrait::enumerate_weak_julia_markings(forest.degree, &points)?;
    Ok(markings
        .into_iter()
        .map(|m| ForestMarking {
            cuts: m
                .blocks
                .into_iter()
                .map(|b| JuliaCut {
                    vertex: critical[b.point].id.clone(),
                    angles: b.angles,
                })
                .collect(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicEnd {
    pub class: usize,
    pub period: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JEndPartition {
    pub marking: ForestMarking,
    pub classes: Vec<Vec<String>>,
    /// Class containing the image of each class.
    pub image: Vec<usize>,
    pub periodic: Vec<PeriodicEnd>,
    pub notes: Vec<String>,
}

struct CutSides<'a> {
    forest: &'a HubbardForest,
    marking: &'a ForestMarking,
}

impl CutSides<'_> {
    // Component of T \ cut containing all angles of `v`; None for the cut vertex itself.
    fn side(&self, v: &str, cut: &JuliaCut) -> Result<Option<usize>, HubbardError> {
        if v == cut.vertex {
            return Ok(None);
        }
        let vertex = self.forest.vertex(v).expect("validated vertex");
        let inconsistent = || HubbardError::InconsistentAngles(v.to_string(), cut.vertex.clone());
        let mut side = None;
        for a in &vertex.angles {
            let c = cut.angles.component_of(*a).ok_or_else(inconsistent)?;
            match side {
                None => side = Some(c),
                Some(s) if s != c => return Err(inconsistent()),
                _ => {}
            }
        }
        side.map(Some).ok_or_else(inconsistent)
    }

    fn separated(&self, u: &str, v: &str) -> Result<bool, HubbardError> {
        if u == v {
            return Ok(false);
        }
        for cut in &self.marking.cuts {
            if let (Some(a), Some(b)) = (self.side(u, cut)?, self.side(v, cut)?) {
                if a != b {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    // Itineraries agree iff no pair on the orbit of (u, v) in V x V is separated.
    fn same_itinerary(&self, u: &str, v: &str) -> Result<bool, HubbardError> {
        let mut seen = BTreeSet::new();
        let (mut x, mut y) = (u, v);
        while seen.insert((x, y)) {
            if self.separated(x, y)? {
                return Ok(false);
            }
            x = self.forest.image(x);
            y = self.forest.image(y);
        }
        Ok(true)
    }
}

fn check_marking(forest: &HubbardForest, marking: &ForestMarking) -> Result<(), HubbardError> {
    for cut in &marking.cuts {
        let v = forest
            .vertex(&cut.vertex)
            .ok_or_else(|| HubbardError::InvalidMarking(format!("unknown vertex `{}`", cut.vertex)))?;
        if v.kind != VertexKind::Julia || !v.critical {
            return Err(HubbardError::InvalidMarking(format!("`{}` is not a Julia critical vertex", v.id)));
        }
        if cut.angles.len() < 2 || cut.angles.iter().any(|a| !v.angles.contains(a)) {
            return Err(HubbardError::InvalidMarking(format!(
                "block {:?} is not drawn from the angles of `{}`",
                cut.angles, v.id
            )));
        }
    }
    Ok(())
}

pub fn j_ends(forest: &HubbardForest, marking: &ForestMarking) -> Result<JEndPartition, HubbardError> {
    check_marking(forest, marking)?;
    let sides = CutSides { forest, marking };
    let marked: Vec<&str> = forest
        .vertices
        .iter()
        .filter(|v| v.kind == VertexKind::FatouCenter && (v.critical || v.postcritical))
        .map(|v| v.id.as_str())
        .collect();
    let mut classes: Vec<Vec<String>> = Vec::new();
    for &v in &marked {
        let mut placed = false;
        for class in classes.iter_mut() {
            if sides.same_itinerary(&class[0], v)? {
                class.push(v.to_string());
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![v.to_string()]);
        }
    }
    let class_of: HashMap<&str, usize> = classes
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |v| (v.as_str(), i)))
        .collect();
    let mut notes = Vec::new();
    let mut image = Vec::with_capacity(classes.len());
    for (i, class) in classes.iter().enumerate() {
        let targets: BTreeSet<usize> = class
            .iter()
            .filter_map(|v| class_of.get(forest.image(v)).copied())
            .collect();
        if targets.len() != 1 {
            notes.push(format!("class {i} does not map into a single class: {targets:?}"));
        }
        image.push(targets.into_iter().next().unwrap_or(i));
    }
    let periodic = functional_cycles(&image)
        .into_iter()
        .flat_map(|cycle| {
            let p = cycle.len();
            cycle.into_iter().map(move |class| PeriodicEnd { class, period: p })
        })
        .collect::<Vec<_>>();
    let mut periodic = periodic;
    periodic.sort_by_key(|e| e.class);
    Ok(JEndPartition {
        marking: marking.clone(),
        classes,
        image,
        periodic,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndHull {
    pub class: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JuliaSubforest {
    pub ends: Vec<EndHull>,
    pub system: MarkovSystem,
    pub entropy: EntropyValue,
    pub notes: Vec<String>,
}

// Edges of the smallest subtree of `component` containing `marked`.
fn hull_edges(forest: &HubbardForest, component: usize, marked: &BTreeSet<&str>) -> BTreeSet<String> {
    let mut edges: Vec<&Edge> = forest.tree_edges(component);
    loop {
        let mut degree: HashMap<&str, usize> = HashMap::new();
        for e in &edges {
            *degree.entry(&e.from).or_default() += 1;
            *degree.entry(&e.to).or_default() += 1;
        }
        let before = edges.len();
        edges.retain(|e| {
            let leaf = |v: &str| degree[v] == 1 && !marked.contains(v);
            !(leaf(&e.from) || leaf(&e.to))
        });
        if edges.len() == before {
            break;
        }
    }
    edges.into_iter().map(|e| e.id.clone()).collect()
}

/// The sub-forest spanned by the periodic J-ends, with its entropy.
pub fn h_j_forest(forest: &HubbardForest, marking: &ForestMarking) -> Result<JuliaSubforest, HubbardError> {
    let partition = j_ends(forest, marking)?;
    let mut notes = partition.notes.clone();
    let mut ends = Vec::new();
    let mut all_edges = BTreeSet::new();
    for end in &partition.periodic {
        let members = &partition.classes[end.class];
        let mut by_component: BTreeMap<usize, BTreeSet<&str>> = BTreeMap::new();
        for v in members {
            by_component.entry(forest.component_of[v]).or_default().insert(v);
        }
        let mut edges = BTreeSet::new();
        for (c, marked) in &by_component {
            edges.extend(hull_edges(forest, *c, marked));
        }
        let mut vertices: BTreeSet<String> = members.iter().cloned().collect();
        for e in forest.system.edges().iter().filter(|e| edges.contains(&e.id)) {
            vertices.insert(e.from.clone());
            vertices.insert(e.to.clone());
        }
        for cut in &marking.cuts {
            if vertices.contains(&cut.vertex) {
                notes.push(format!(
                    "hull of end {} passes through cut vertex `{}` (treated as unseparated)",
                    end.class, cut.vertex
                ));
            }
        }
        all_edges.extend(edges.iter().cloned());
        ends.push(EndHull {
            class: end.class,
            vertices: vertices.into_iter().collect(),
            edges: edges.into_iter().collect(),
        });
    }
    let system = forest.system.restrict(&all_edges)?;
    let entropy = system_entropy(&system);
    Ok(JuliaSubforest {
        ends,
        system,
        entropy,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuResult {
    pub mu: EntropyValue,
    pub witness: ForestMarking,
    pub markings: usize,
}

pub fn mu(forest: &HubbardForest) -> Result<MuResult, HubbardError> {
    mu_with(forest, Mode::default())
}

pub fn mu_with(forest: &HubbardForest, mode: Mode) -> Result<MuResult, HubbardError> {
    let markings = weak_julia_markings(forest)?;
    let values = exec::map(mode, &markings, |m| h_j_forest(forest, m).map(|s| s.entropy));
    let values = values.into_iter().collect::<Result<Vec<_>, _>>()?;
    let min = values.iter().map(|v| v.value).fold(f64::INFINITY, f64::min);
    let (best, value) = markings
        .iter()
        .zip(&values)
        .filter(|(_, v)| v.value <= min + ENTROPY_TOLERANCE)
        .min_by_key(|(m, _)| m.to_string())
        .expect("at least one marking");
    Ok(MuResult {
        mu: *value,
        witness: best.clone(),
        markings: markings.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Continuous,
    Discontinuous,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityVerdict {
    pub verdict: Verdict,
    pub h: EntropyValue,
    pub mu: EntropyValue,
    pub witness: ForestMarking,
}

/// Compares `h` and `mu` using their certified brackets.
pub fn compare_entropies(h: &EntropyValue, mu: &EntropyValue) -> Result<Verdict, HubbardError> {
    let widest = (h.upper - mu.lower).abs().max((h.lower - mu.upper).abs());
    let narrowest = if h.lower > mu.upper {
        h.lower - mu.upper
    } else if mu.lower > h.upper {
        mu.lower - h.upper
    } else {
        0.0
    };
    if widest <= ENTROPY_TOLERANCE {
        Ok(Verdict::Continuous)
    } else if narrowest > ENTROPY_TOLERANCE {
        Ok(Verdict::Discontinuous)
    } else {
        Err(HubbardError::Unresolved {
            h_lower: h.lower,
            h_upper: h.upper,
            mu_lower: mu.lower,
            mu_upper: mu.upper,
        })
    }
}

pub fn poly_continuity_verdict(forest: &HubbardForest) -> Result<ContinuityVerdict, HubbardError> {
    poly_continuity_verdict_with(forest, Mode::default())
}

pub fn poly_continuity_verdict_with(forest: &HubbardForest, mode: Mode) -> Result<ContinuityVerdict, HubbardError> {
    let h = forest_entropy(forest);
    let m = mu_with(forest, mode)?;
    Ok(ContinuityVerdict {
        verdict: compare_entropies(&h, &m.mu)?,
        h,
        mu: m.mu,
        witness: m.witness,
    })
}

/// A model of a renormalization: a Hubbard forest or a critical portrait of
/// the straightened polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model_kind", content = "model", rename_all = "lowercase", try_from = "ModelData")]
pub enum Model {
    Forest(HubbardForest),
    Portrait(CriticalPortrait),
}

/// Unvalidated wire form of [`Model`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model_kind", content = "model", rename_all = "lowercase")]
pub enum ModelData {
    Forest(ForestData),
    Portrait(PortraitData),
}

impl TryFrom<ModelData> for Model {
    type Error = HubbardError;

    fn try_from(data: ModelData) -> Result<Self, Self::Error> {
        Ok(match data {
            ModelData::Forest(f) => Model::Forest(validate_forest(f)?),
            ModelData::Portrait(p) => Model::Portrait(p.portrait()?),
        })
    }
}

impl Model {
    pub fn entropy(&self) -> EntropyValue {
        match self {
            Model::Forest(f) => forest_entropy(f),
            Model::Portrait(p) => thurston_entropy(p),
        }
    }

    pub fn degree(&self) -> u64 {
        match self {
            Model::Forest(f) => f.degree(),
            Model::Portrait(p) => p.degree(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub period: u64,
    pub h: EntropyValue,
    pub mu: Option<EntropyValue>,
    pub verdict: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenormVerdict {
    pub h: EntropyValue,
    pub verdict: Verdict,
    pub maximal: Vec<usize>,
    pub per_component: Vec<ComponentSummary>,
}

/// `max h(P_K)/p` over components, with the indices attaining it (lowest first).
pub fn renormalized_entropy(components: &[(u64, Model)], mode: Mode) -> (EntropyValue, Vec<usize>) {
    let values = exec::map(mode, components, |(p, model)| model.entropy().scaled(1.0 / *p as f64));
    let best = values.iter().map(|v| v.value).fold(f64::NEG_INFINITY, f64::max);
    let maximal: Vec<usize> = (0..values.len())
        .filter(|&i| values[i].value >= best - ENTROPY_TOLERANCE)
        .collect();
    let h = maximal.first().map(|&i| values[i]).unwrap_or(EntropyValue::ZERO);
    (h, maximal)
}

/// Continuity at a polynomial whose non-trivial periodic components are
/// given with their periods and models.
pub fn ppf_continuity_verdict(components: &[(u64, Model)]) -> Result<RenormVerdict, HubbardError> {
    ppf_continuity_verdict_with(components, Mode::default())
}

pub fn ppf_continuity_verdict_with(components: &[(u64, Model)], mode: Mode) -> Result<RenormVerdict, HubbardError> {
    let (h, maximal) = renormalized_entropy(components, mode);
    let summaries = exec::map(mode, components, |(p, model)| -> Result<ComponentSummary, HubbardError> {
        Ok(match model {
            Model::Forest(f) => {
                let v = poly_continuity_verdict_with(f, Mode::Sequential)?;
                ComponentSummary { period: *p, h: v.h, mu: Some(v.mu), verdict: Some(v.verdict) }
            }
            Model::Portrait(portrait) => ComponentSummary {
                period: *p,
                h: thurston_entropy(portrait),
                mu: None,
                verdict: None,
            },
        })
    });
    let per_component = summaries.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut verdict = if components.is_empty() { Verdict::Continuous } else { Verdict::Discontinuous };
    for &i in &maximal {
        match per_component[i].verdict {
            Some(Verdict::Continuous) => verdict = Verdict::Continuous,
            Some(Verdict::Discontinuous) => {}
            None => return Err(HubbardError::ModelNeedsForest(i)),
        }
    }
    Ok(RenormVerdict {
        h,
        verdict,
        maximal,
        per_component,
    })
}
