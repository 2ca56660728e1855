//! Finite graphs with Markov self-maps and their topological entropy.
//!
//! The entropy of a Markov graph map is `log` of the Perron root of its
//! incidence matrix, or zero when the matrix is nilpotent. Nilpotency is
//! decided exactly (acyclic edge digraph); the Perron root is bracketed by
//! Collatz–Wielandt bounds on each strongly connected component.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default width of a certified entropy bracket.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

const BRACKET_WIDTH: f64 = 1e-12;
const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MarkovError {
    #[error("invalid Markov system: {0}")]
    InvalidSystem(String),
    #[error("matrix is not square")]
    NotSquare,
    #[error("edge `{edge}` escapes its part (cover reaches `{target}`)")]
    NotInvariant { edge: String, target: String },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
}

/// Wire form of a Markov system.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovSystemData {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub vertex_map: BTreeMap<String, String>,
    pub edge_cover: BTreeMap<String, Vec<String>>,
}

// One traversal of an edge; `forward` means from `from` to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Step {
    edge: usize,
    forward: bool,
}

/// A validated finite graph with a Markov self-map. Edges are ordered by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovSystem {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    // endpoints per edge
    ends: Vec<(usize, usize)>,
    vertex_map: Vec<usize>,
    // covers oriented from f(from) to f(to)
    covers: Vec<Vec<Step>>,
}

impl Serialize for MarkovSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_data().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkovSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        MarkovSystem::new(MarkovSystemData::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl MarkovSystem {
    pub fn new(data: MarkovSystemData) -> Result<MarkovSystem, MarkovError> {
        let invalid = |m: String| MarkovError::InvalidSystem(m);
        let mut vertices = data.vertices;
        vertices.sort();
        let before = vertices.len();
        vertices.dedup();
        if vertices.len() != before {
            return Err(invalid("duplicate vertex id".into()));
        }
        let vertex_index: HashMap<String, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let mut edges = data.edges;
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        if edges.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(invalid("duplicate edge id".into()));
        }
        let edge_index: HashMap<&str, usize> =
            edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
        let vid = |v: &str| {
            vertex_index
                .get(v)
                .copied()
                .ok_or_else(|| invalid(format!("unknown vertex `{v}`")))
        };
        let ends = edges
            .iter()
            .map(|e| Ok((vid(&e.from)?, vid(&e.to)?)))
            .collect::<Result<Vec<_>, MarkovError>>()?;
        let mut vertex_map = Vec::with_capacity(vertices.len());
        for v in &vertices {
            let image = data
                .vertex_map
                .get(v)
                .ok_or_else(|| invalid(format!("vertex `{v}` has no image")))?;
            vertex_map.push(vid(image)?);
        }
        if let Some(extra) = data.vertex_map.keys().find(|k| !vertex_index.contains_key(*k)) {
            return Err(invalid(format!("vertex map names unknown vertex `{extra}`")));
        }
        if let Some(extra) = data.edge_cover.keys().find(|k| !edge_index.contains_key(k.as_str())) {
            return Err(invalid(format!("edge cover names unknown edge `{extra}`")));
        }
        let mut covers = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            let ids = data
                .edge_cover
                .get(&e.id)
                .ok_or_else(|| invalid(format!("edge `{}` has no cover", e.id)))?;
            if ids.is_empty() {
                return Err(invalid(format!("edge `{}` collapses (empty cover)", e.id)));
            }
            let path = ids
                .iter()
                .map(|id| {
                    edge_index
                        .get(id.as_str())
                        .copied()
                        .ok_or_else(|| invalid(format!("cover of `{}` names unknown edge `{id}`", e.id)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let (a, b) = ends[i];
            let (start, end) = (vertex_map[a], vertex_map[b]);
            let steps = walk(&ends, &path, start, end)
                .or_else(|| {
                    let reversed: Vec<usize> = path.iter().rev().copied().collect();
                    walk(&ends, &reversed, start, end)
                })
                .ok_or_else(|| {
                    invalid(format!(
                        "cover of `{}` is not a path from `{}` to `{}`",
                        e.id, vertices[start], vertices[end]
                    ))
                })?;
            covers.push(steps);
        }
        Ok(MarkovSystem {
            vertices,
            edges,
            vertex_index,
            ends,
            vertex_map,
            covers,
        })
    }

    pub fn empty() -> MarkovSystem {
        MarkovSystem::new(MarkovSystemData::default()).expect("empty system is valid")
    }

    pub fn to_data(&self) -> MarkovSystemData {
        MarkovSystemData {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            vertex_map: self
                .vertices
                .iter()
                .zip(&self.vertex_map)
                .map(|(v, &w)| (v.clone(), self.vertices[w].clone()))
                .collect(),
            edge_cover: self
                .edges
                .iter()
                .zip(&self.covers)
                .map(|(e, c)| (e.id.clone(), c.iter().map(|s| self.edges[s.edge].id.clone()).collect()))
                .collect(),
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<String> {
        self.edges.iter().map(|e| e.id.clone()).collect()
    }

    pub fn image_of(&self, vertex: &str) -> Option<&str> {
        let i = *self.vertex_index.get(vertex)?;
        Some(&self.vertices[self.vertex_map[i]])
    }

    /// Edge ids traversed by the image of `edge`, in order from `f(from)`.
    pub fn cover_of(&self, edge: &str) -> Option<Vec<&str>> {
        let i = self.edges.iter().position(|e| e.id == edge)?;
        Some(self.covers[i].iter().map(|s| self.edges[s.edge].id.as_str()).collect())
    }

    /// Restricts the system to a subset of its edges. The subset must be
    /// forward invariant; vertices are those incident to the kept edges.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> Result<MarkovSystem, MarkovError> {
        let mut data = MarkovSystemData::default();
        let mut verts = BTreeSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !keep.contains(&e.id) {
                continue;
            }
            for s in &self.covers[i] {
                let target = &self.edges[s.edge].id;
                if !keep.contains(target) {
                    return Err(MarkovError::NotInvariant {
                        edge: e.id.clone(),
                        target: target.clone(),
                    });
                }
            }
            verts.insert(e.from.clone());
            verts.insert(e.to.clone());
            data.edges.push(e.clone());
            data.edge_cover
                .insert(e.id.clone(), self.covers[i].iter().map(|s| self.edges[s.edge].id.clone()).collect());
        }
        for v in &verts {
            let image = self.image_of(v).expect("known vertex").to_string();
            data.vertex_map.insert(v.clone(), image.clone());
        }
        // close the vertex set under the vertex map
        loop {
            let missing: Vec<String> = data
                .vertex_map
                .values()
                .filter(|v| !data.vertex_map.contains_key(*v))
                .cloned()
                .collect();
            if missing.is_empty() {
                break;
            }
            for v in missing {
                let next = self.image_of(&v).expect("known vertex").to_string();
                data.vertex_map.insert(v, next);
            }
        }
        data.vertices = data.vertex_map.keys().cloned().collect();
        MarkovSystem::new(data)
    }

    /// Splits `edge` at a new vertex `mid` that maps to the vertex reached after
    /// the first `split` edges of its image path.
    pub fn subdivide_edge(&self, edge: &str, mid: &str, split: usize) -> Result<MarkovSystem, MarkovError> {
        let i = self
            .edges
            .iter()
            .position(|e| e.id == edge)
            .ok_or_else(|| MarkovError::InvalidSystem(format!("unknown edge `{edge}`")))?;
        let cover = &self.covers[i];
        if split == 0 || split >= cover.len() {
            return Err(MarkovError::InvalidSystem(format!(
                "cannot split the image of `{edge}` (length {}) after {split} edges",
                cover.len()
            )));
        }
        if self.vertex_index.contains_key(mid) {
            return Err(MarkovError::InvalidSystem(format!("vertex `{mid}` already exists")));
        }
        let first = format!("{edge}.0");
        let second = format!("{edge}.1");
        let s = cover[split - 1];
        let (a, b) = self.ends[s.edge];
        let mid_image = if s.forward { b } else { a };

        let mut data = self.to_data();
        data.vertices.push(mid.to_string());
        data.vertex_map.insert(mid.to_string(), self.vertices[mid_image].clone());
        let old = self.edges[i].clone();
        data.edges.retain(|e| e.id != edge);
        data.edges.push(Edge { id: first.clone(), from: old.from.clone(), to: mid.to_string() });
        data.edges.push(Edge { id: second.clone(), from: mid.to_string(), to: old.to.clone() });
        let ids = |steps: &[Step]| -> Vec<String> {
            steps
                .iter()
                .flat_map(|st| {
                    if st.edge == i {
                        if st.forward {
                            vec![first.clone(), second.clone()]
                        } else {
                            vec![second.clone(), first.clone()]
                        }
                    } else {
                        vec![self.edges[st.edge].id.clone()]
                    }
                })
                .collect()
        };
        data.edge_cover.remove(edge);
        for (j, c) in self.covers.iter().enumerate() {
            if j != i {
                data.edge_cover.insert(self.edges[j].id.clone(), ids(c));
            }
        }
        data.edge_cover.insert(first.clone(), ids(&cover[..split]));
        data.edge_cover.insert(second.clone(), ids(&cover[split..]));
        MarkovSystem::new(data)
    }
}

// Walks `path` from `start`, returning oriented steps if it ends at `end`.
fn walk(ends: &[(usize, usize)], path: &[usize], start: usize, end: usize) -> Option<Vec<Step>> {
    let mut cur = start;
    let mut steps = Vec::with_capacity(path.len());
    for &e in path {
        let (a, b) = ends[e];
        if cur == a {
            steps.push(Step { edge: e, forward: true });
            cur = b;
        } else if cur == b {
            steps.push(Step { edge: e, forward: false });
            cur = a;
        } else {
            return None;
        }
    }
    (cur == end).then_some(steps)
}

/// Square non-negative integer matrix indexed by edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IncidenceMatrix {
    pub labels: Vec<String>,
    rows: Vec<Vec<u64>>,
}

impl IncidenceMatrix {
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<IncidenceMatrix, MarkovError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MarkovError::NotSquare);
        }
        Ok(IncidenceMatrix {
            labels: (0..n).map(|i| i.to_string()).collect(),
            rows,
        })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.rows[i][j]
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> IncidenceMatrix {
        IncidenceMatrix {
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            rows: idx
                .iter()
                .map(|&i| idx.iter().map(|&j| self.rows[i][j]).collect())
                .collect(),
        }
    }
}

pub fn incidence_matrix(system: &MarkovSystem) -> IncidenceMatrix {
    let n = system.edges.len();
    let mut rows = vec![vec![0u64; n]; n];
    for (i, cover) in system.covers.iter().enumerate() {
        for s in cover {
            rows[i][s.edge] += 1;
        }
    }
    IncidenceMatrix {
        labels: system.edge_ids(),
        rows,
    }
}

/// Entropy with a certified bracket on the Perron root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyValue {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub nilpotent: bool,
}

impl EntropyValue {
    pub const ZERO: EntropyValue = EntropyValue {
        value: 0.0,
        lower: 0.0,
        upper: 0.0,
        nilpotent: true,
    };

    /// Multiplies value and bracket by a positive factor.
    pub fn scaled(&self, factor: f64) -> EntropyValue {
        EntropyValue {
            value: self.value * factor,
            lower: self.lower * factor,
            upper: self.upper * factor,
            nilpotent: self.nilpotent,
        }
    }

    fn max(self, other: EntropyValue) -> EntropyValue {
        if other.value > self.value {
            EntropyValue {
                nilpotent: self.nilpotent && other.nilpotent,
                ..other
            }
        } else {
            EntropyValue {
                nilpotent: self.nilpotent && other.nilpotent,
                ..self
            }
        }
    }
}

/// Strongly connected components of the digraph `i -> j` iff `m[i][j] > 0`
/// (iterative Tarjan), in reverse topological order.
pub fn strongly_connected_components(m: &IncidenceMatrix) -> Vec<Vec<usize>> {
    let n = m.size();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| m.rows[i][j] > 0).collect())
        .collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// True iff some power of the matrix vanishes, i.e. its digraph is acyclic.
pub fn is_nilpotent(m: &IncidenceMatrix) -> bool {
    strongly_connected_components(m)
        .iter()
        .all(|c| c.len() == 1 && m.rows[c[0]][c[0]] == 0)
}

/// Collatz–Wielandt bracket `[lo, hi]` on the Perron root of an irreducible
/// matrix, by power iteration on `M + I` from the all-ones vector.
pub fn perron_bracket(m: &IncidenceMatrix) -> (f64, f64) {
    let n = m.size();
    let rows: Vec<Vec<f64>> = m.rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let mut x = vec![1.0f64; n];
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for _ in 0..MAX_ITERATIONS {
        let y: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        let (l, h) = y
            .iter()
            .zip(&x)
            .map(|(yi, xi)| yi / xi)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r), h.max(r)));
        lo = lo.max(l);
        hi = hi.min(h);
        if hi - lo <= BRACKET_WIDTH * hi.max(1.0) {
            break;
        }
        let next: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a + b).collect();
        let scale = next.iter().cloned().fold(0.0, f64::max);
        x = next.into_iter().map(|v| v / scale).collect();
    }
    (lo, hi)
}

pub fn entropy(m: &IncidenceMatrix) -> EntropyValue {
    let mut best = EntropyValue::ZERO;
    for comp in strongly_connected_components(m) {
        if comp.len() == 1 && m.rows[comp[0]][comp[0]] == 0 {
            continue;
        }
        let (lo, hi) = perron_bracket(&m.submatrix(&comp));
        // a non-nilpotent integer matrix has Perron root >= 1
        let (lo, hi) = (lo.max(1.0), hi.max(1.0));
        let candidate = EntropyValue {
            value: ((lo + hi) / 2.0).ln(),
            lower: lo.ln(),
            upper: hi.ln(),
            nilpotent: false,
        };
        best = best.max(candidate);
        best.nilpotent = false;
    }
    best
}

pub fn system_entropy(system: &MarkovSystem) -> EntropyValue {
    entropy(&incidence_matrix(system))
}

/// The system of `f^k` on the same graph.
pub fn power_system(system: &MarkovSystem, k: usize) -> MarkovSystem {
    assert!(k >= 1, "power must be positive");
    let mut result = system.clone();
    for _ in 1..k {
        let covers = result
            .covers
            .iter()
            .map(|c| {
                c.iter()
                    .flat_map(|s| {
                        let inner = &system.covers[s.edge];
                        let steps: Vec<Step> = if s.forward {
                            inner.clone()
                        } else {
                            inner
                                .iter()
                                .rev()
                                .map(|t| Step { edge: t.edge, forward: !t.forward })
                                .collect()
                        };
                        steps
                    })
                    .collect()
            })
            .collect();
        let vertex_map = result.vertex_map.iter().map(|&v| system.vertex_map[v]).collect();
        result.covers = covers;
        result.vertex_map = vertex_map;
    }
    result
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitReport {
    pub parts: Vec<EntropyValue>,
    pub max: EntropyValue,
    pub total: EntropyValue,
    pub agrees: bool,
}

/// Entropy of a system whose edges are split into ordered parts such that
/// covers of part `i` only use edges of parts `0..=i` (so every prefix union
/// is forward invariant; disjoint invariant parts are the special case with
/// no cross edges). The entropy is the maximum over the diagonal blocks.
pub fn invariant_split(system: &MarkovSystem, parts: &[Vec<String>]) -> Result<SplitReport, MarkovError> {
    let mut part_of: HashMap<&str, usize> = HashMap::new();
    for (p, part) in parts.iter().enumerate() {
        for id in part {
            if !system.edges.iter().any(|e| &e.id == id) {
                return Err(MarkovError::InvalidPartition(format!("unknown edge `{id}`")));
            }
            if part_of.insert(id.as_str(), p).is_some() {
                return Err(MarkovError::InvalidPartition(format!("edge `{id}` listed twice")));
            }
        }
    }
    if let Some(e) = system.edges.iter().find(|e| !part_of.contains_key(e.id.as_str())) {
        return Err(MarkovError::InvalidPartition(format!("edge `{}` is in no part", e.id)));
    }
    for (i, e) in system.edges.iter().enumerate() {
        let p = part_of[e.id.as_str()];
        for s in &system.covers[i] {
            let target = &system.edges[s.edge].id;
            if part_of[target.as_str()] > p {
                return Err(MarkovError::NotInvariant {
                    edge: e.id.clone(),
                    target: target.clone(),
                });
            }
        }
    }
    let m = incidence_matrix(system);
    let part_values: Vec<EntropyValue> = parts
        .iter()
        .map(|part| {
            let idx: Vec<usize> = part
                .iter()
                .map(|id| system.edges.iter().position(|e| &e.id == id).expect("checked"))
                .collect();
            entropy(&m.submatrix(&idx))
        })
        .collect();
    let max = part_values.iter().copied().fold(EntropyValue::ZERO, EntropyValue::max);
    let total = entropy(&m);
    let agrees = (max.value - total.value).abs() <= ENTROPY_TOLERANCE;
    Ok(SplitReport {
        parts: part_values,
        max,
        total,
        agrees,
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn system(vertices: &[&str], edges: &[(&str, &str, &str)], vmap: &[(&str, &str)], covers: &[(&str, &[&str])]) -> MarkovSystem {
        MarkovSystem::new(MarkovSystemData {
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(id, a, b)| Edge { id: id.to_string(), from: a.to_string(), to: b.to_string() })
                .collect(),
            vertex_map: vmap.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            edge_cover: covers
                .iter()
                .map(|(e, c)| (e.to_string(), c.iter().map(|s| s.to_string()).collect()))
                .collect(),
        })
        .unwrap()
    }

    /// z^2 - 2 on [-2, 2]: A = [-2, 0], B = [0, 2].
    pub fn chebyshev() -> MarkovSystem {
        system(
            &["m2", "0", "2"],
            &[("A", "m2", "0"), ("B", "0", "2")],
            &[("m2", "2"), ("0", "m2"), ("2", "2")],
            &[("A", &["B", "A"]), ("B", &["A", "B"])],
        )
    }

    /// Airplane: A = [c, 0], B = [0, f(c)].
    pub fn airplane() -> MarkovSystem {
        system(
            &["c", "0", "fc"],
            &[("A", "c", "0"), ("B", "0", "fc")],
            &[("0", "c"), ("c", "fc"), ("fc", "0")],
            &[("A", &["B", "A"]), ("B", &["A"])],
        )
    }

    pub fn swap() -> MarkovSystem {
        system(
            &["x", "a", "y"],
            &[("A", "x", "a"), ("B", "a", "y")],
            &[("x", "y"), ("a", "a"), ("y", "x")],
            &[("A", &["B"]), ("B", &["A"])],
        )
    }
}
