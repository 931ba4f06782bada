//! Shannon entropy and mutual information, in bits.
//!
//! Probabilities stay exact until a marginal is taken; only the final
//! `-p log2 p` sums are evaluated in floating point. Results in
//! `(-1e-12, 0)` are reported as zero, anything more negative is an error.

use std::collections::HashSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dist::{rational_to_f64, JointDistribution, Rational};
use crate::error::{Error, Result};

/// Values down to this are treated as floating-point noise around zero.
pub const NEGATIVE_FLOOR: f64 = -1e-12;

/// Two groups of variables and an optional conditioning group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoQuery {
    pub x: Vec<String>,
    pub y: Vec<String>,
    #[serde(default)]
    pub given: Vec<String>,
}

impl InfoQuery {
    pub fn new<S: AsRef<str>>(x: &[S], y: &[S], given: &[S]) -> Self {
        let owned = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect();
        InfoQuery {
            x: owned(x),
            y: owned(y),
            given: owned(given),
        }
    }

    pub fn evaluate(&self, dist: &JointDistribution) -> Result<f64> {
        conditional_mutual_information(dist, &self.x, &self.y, &self.given)
    }
}

/// `-sum p log2 p` with `0 log 0 = 0`.
pub fn entropy_of_table(probs: &[Rational]) -> f64 {
    probs
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| {
            let p = rational_to_f64(p);
            -p * p.log2()
        })
        .sum()
}

/// Entropy of a float probability vector with `0 log 0 = 0`.
pub fn entropy_of_floats(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// H(vars) in bits.
pub fn entropy<S: AsRef<str>>(dist: &JointDistribution, vars: &[S]) -> Result<f64> {
    clamp(entropy_raw(dist, vars)?)
}

pub fn entropy_raw<S: AsRef<str>>(dist: &JointDistribution, vars: &[S]) -> Result<f64> {
    if vars.is_empty() {
        return Err(Error::EmptySelection);
    }
    let positions = dist.positions(vars)?;
    Ok(entropy_at(dist, &positions))
}

fn entropy_at(dist: &JointDistribution, positions: &[usize]) -> f64 {
    if positions.is_empty() {
        return 0.0;
    }
    entropy_of_table(dist.marginal_positions(positions).table())
}

/// I(x : y) = H(x) + H(y) - H(x, y).
pub fn mutual_information<S: AsRef<str>>(dist: &JointDistribution, x: &[S], y: &[S]) -> Result<f64> {
    conditional_mutual_information(dist, x, y, &[] as &[&str])
}

/// I(x : y | given) = H(x, given) + H(y, given) - H(x, y, given) - H(given).
pub fn conditional_mutual_information<S: AsRef<str>, T: AsRef<str>>(
    dist: &JointDistribution,
    x: &[S],
    y: &[S],
    given: &[T],
) -> Result<f64> {
    clamp(conditional_mutual_information_raw(dist, x, y, given)?)
}

/// Unclamped four-entropy value.
pub fn conditional_mutual_information_raw<S: AsRef<str>, T: AsRef<str>>(
    dist: &JointDistribution,
    x: &[S],
    y: &[S],
    given: &[T],
) -> Result<f64> {
    let (x, y, z) = resolve_groups(dist, x, y, given)?;
    let union = |a: &[usize], b: &[usize]| {
        let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
        u.sort_unstable();
        u
    };
    let xz = union(&x, &z);
    let yz = union(&y, &z);
    let xyz = union(&xz, &y);
    Ok(entropy_at(dist, &xz) + entropy_at(dist, &yz) - entropy_at(dist, &xyz) - entropy_at(dist, &z))
}

/// Resolves names to positions and checks that the groups are disjoint and
/// that `x` and `y` are non-empty.
pub(crate) fn resolve_groups<S: AsRef<str>, T: AsRef<str>>(
    dist: &JointDistribution,
    x: &[S],
    y: &[S],
    given: &[T],
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySelection);
    }
    let x = dist.positions(x)?;
    let y = dist.positions(y)?;
    let z = dist.positions(given)?;
    let mut seen = HashSet::new();
    for &i in x.iter().chain(&y).chain(&z) {
        if !seen.insert(i) {
            return Err(Error::OverlappingGroups(dist.variables()[i].name.clone()));
        }
    }
    Ok((x, y, z))
}

pub(crate) fn clamp(value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value > NEGATIVE_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::NegativeMeasure(value))
    }
}
