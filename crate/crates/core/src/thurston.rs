//! Entropy of a critical portrait from the angle-pair transition graph.
//!
//! The postcritical pool `O` is the forward closure of the critical values.
//! Each unordered pair `{a, b}` of pool angles covers the pairs obtained by
//! cutting the chord `ab` along the portrait hulls that separate `a` from `b`
//! and mapping the pieces forward.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use serde::Serialize;

use crate::circle::{self, separation, tau, Angle, AngleSet, SeparationVerdict};
use crate::exec::{self, Mode};
use crate::markov::{entropy, EntropyValue, IncidenceMatrix};
use crate::portrait::CriticalPortrait;

pub fn postcritical_pool(portrait: &CriticalPortrait) -> AngleSet {
    let d = portrait.degree();
    let mut pool = BTreeSet::new();
    for v in portrait.critical_values() {
        pool.extend(circle::orbit(d, v).points);
    }
    pool.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairGraph {
    pub pool: AngleSet,
    pub pairs: Vec<(Angle, Angle)>,
    pub transition: IncidenceMatrix,
}

// Length of the component of `T \ block` containing `a`.
fn side_length(block: &AngleSet, a: Angle) -> BigRational {
    block.component_arc(a).expect("a is off the hull").length()
}

/// The pairs covered by `{a, b}`, with multiplicity.
pub fn pair_image(portrait: &CriticalPortrait, a: Angle, b: Angle) -> Vec<(Angle, Angle)> {
    let d = portrait.degree();
    let values = portrait.critical_values();
    let mut cuts: Vec<(BigRational, Angle)> = portrait
        .blocks()
        .iter()
        .zip(&values)
        .filter(|(block, _)| separation(block, a, b) == SeparationVerdict::Separated)
        .map(|(block, &v)| (side_length(block, a), v))
        .collect();
    cuts.sort();
    let mut chain = Vec::with_capacity(cuts.len() + 2);
    chain.push(tau(d, a));
    chain.extend(cuts.into_iter().map(|(_, v)| v));
    chain.push(tau(d, b));
    chain
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .collect()
}

pub fn transition_graph(portrait: &CriticalPortrait) -> PairGraph {
    transition_graph_with(portrait, Mode::default())
}

pub fn transition_graph_with(portrait: &CriticalPortrait, mode: Mode) -> PairGraph {
    let pool = postcritical_pool(portrait);
    let pts = pool.as_slice();
    let mut pairs = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            pairs.push((pts[i], pts[j]));
        }
    }
    let index: HashMap<(Angle, Angle), usize> = pairs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let rows = exec::map(mode, &pairs, |&(a, b)| {
        let mut row = vec![0u64; pairs.len()];
        for p in pair_image(portrait, a, b) {
            row[index[&p]] += 1;
        }
        row
    });
    let mut transition = IncidenceMatrix::from_rows(rows).expect("square by construction");
    transition.labels = pairs.iter().map(|(a, b)| format!("{{{a},{b}}}")).collect();
    PairGraph {
        pool,
        pairs,
        transition,
    }
}

pub fn thurston_entropy(portrait: &CriticalPortrait) -> EntropyValue {
    thurston_entropy_with(portrait, Mode::default())
}

pub fn thurston_entropy_with(portrait: &CriticalPortrait, mode: Mode) -> EntropyValue {
    let graph = transition_graph_with(portrait, mode);
    if graph.pairs.is_empty() {
        return EntropyValue::ZERO;
    }
    entropy(&graph.transition)
}
