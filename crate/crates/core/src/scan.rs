//! Continuity scans: entropy along a sequence of portraits converging to a
//! target portrait.
//!
//! The `n`-th portrait is the target rotated by `delta_n / d`, where
//! `delta_n = sign * offset * ratio^(-n)`. Rotating every angle by
//! `delta_n / d` moves each critical value by exactly `delta_n`, so for a
//! quadratic target `{theta/2, theta/2 + 1/2}` this is the portrait of the
//! angle `theta + delta_n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::{hausdorff_distance, Angle};
use crate::exec::{self, Mode};
use crate::markov::EntropyValue;
use crate::portrait::{validate_portrait, CriticalPortrait};
use crate::thurston::thurston_entropy_with;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("invalid scan: {0}")]
    InvalidSpec(String),
    #[error("portrait for n = {n} is invalid: {reason}")]
    InvalidGeneratedPortrait { n: u32, reason: String },
}

fn default_sign() -> i8 {
    1
}

fn default_tolerance() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub target: CriticalPortrait,
    /// Perturbation of the critical values at `n = 0`.
    pub offset: Angle,
    #[serde(default = "default_sign")]
    pub sign: i8,
    pub ratio: u64,
    pub n_start: u32,
    pub n_end: u32,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: u32,
    pub portrait: CriticalPortrait,
    pub distance: f64,
    pub entropy: EntropyValue,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanTable {
    pub target_entropy: EntropyValue,
    pub rows: Vec<ScanRow>,
    pub final_gap: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ScanSpec {
    fn check(&self) -> Result<(), ScanError> {
        if self.ratio == 0 {
            return Err(ScanError::InvalidSpec("ratio must be positive".into()));
        }
        if self.sign != 1 && self.sign != -1 {
            return Err(ScanError::InvalidSpec("sign must be 1 or -1".into()));
        }
        if self.n_start > self.n_end {
            return Err(ScanError::InvalidSpec(format!("empty range {}..={}", self.n_start, self.n_end)));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(ScanError::InvalidSpec("tolerance must be a non-negative number".into()));
        }
        Ok(())
    }

    /// Perturbation `delta_n` of the critical values.
    pub fn delta(&self, n: u32) -> BigRational {
        let scale = BigRational::new(BigInt::one(), BigInt::from(self.ratio).pow(n));
        let delta = self.offset.to_rational() * scale;
        if self.sign < 0 {
            -delta
        } else {
            delta
        }
    }

    pub fn portrait(&self, n: u32) -> Result<CriticalPortrait, ScanError> {
        let bad = |reason: String| ScanError::InvalidGeneratedPortrait { n, reason };
        let shift = self.delta(n) / BigRational::from_integer(BigInt::from(self.target.degree()));
        let rotated = self.target.rotated(&shift).map_err(|e| bad(e.to_string()))?;
        validate_portrait(rotated.degree(), rotated.blocks().to_vec()).map_err(|e| bad(e.to_string()))
    }
}

/// Hausdorff distance between two portraits: the best bottleneck matching of
/// their blocks. Portraits with different block counts are at distance 1.
pub fn portrait_distance(a: &CriticalPortrait, b: &CriticalPortrait) -> BigRational {
    let (x, y) = (a.blocks(), b.blocks());
    if x.len() != y.len() {
        return BigRational::one();
    }
    let cost: Vec<Vec<BigRational>> = x
        .iter()
        .map(|p| y.iter().map(|q| hausdorff_distance(p, q)).collect())
        .collect();
    fn best(cost: &[Vec<BigRational>], row: usize, used: &mut Vec<bool>) -> BigRational {
        if row == cost.len() {
            return BigRational::zero();
        }
        let mut out: Option<BigRational> = None;
        for j in 0..cost.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            let rest = best(cost, row + 1, used);
            used[j] = false;
            let v = if cost[row][j] > rest { cost[row][j].clone() } else { rest };
            if out.as_ref().is_none_or(|o| v < *o) {
                out = Some(v);
            }
        }
        out.expect("square cost matrix")
    }
    best(&cost, 0, &mut vec![false; y.len()])
}

pub fn scan_continuity(spec: &ScanSpec) -> Result<ScanTable, ScanError> {
    scan_continuity_with(spec, Mode::default())
}

pub fn scan_continuity_with(spec: &ScanSpec, mode: Mode) -> Result<ScanTable, ScanError> {
    spec.check()?;
    let target_entropy = thurston_entropy_with(&spec.target, mode);
    let count = (spec.n_end - spec.n_start) as usize + 1;
    let portraits = (0..count)
        .map(|i| spec.portrait(spec.n_start + i as u32))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = exec::map_range(mode, count, |i| {
        let portrait = &portraits[i];
        let entropy = thurston_entropy_with(portrait, Mode::Sequential);
        ScanRow {
            n: spec.n_start + i as u32,
            distance: portrait_distance(portrait, &spec.target).to_f64().unwrap_or(f64::NAN),
            gap: (entropy.value - target_entropy.value).abs(),
            entropy,
            portrait: portrait.clone(),
        }
    });
    let final_gap = rows.last().map(|r| r.gap).unwrap_or(0.0);
    let mut notes = Vec::new();
    if spec.target.blocks().len() > 1 {
        notes.push("distance matches blocks by the best bottleneck assignment, not by position".to_string());
    }
    Ok(ScanTable {
        notes,
        target_entropy,
        converged: final_gap < spec.tolerance,
        final_gap,
        rows,
    })
}
