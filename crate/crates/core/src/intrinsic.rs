//! Intrinsic information `I(x : y ↓ E)`: the conditional mutual information
//! `I(x : y | Ẽ)` minimized over stochastic maps `E → Ẽ` applied by Eve.
//!
//! Two routes are provided. [`certify_zero_cmi`] decides exact conditional
//! independence in rational arithmetic, which together with an explicit
//! witness [`Channel`] proves that the intrinsic information is zero.
//! [`intrinsic_information_upper_bound`] searches channels numerically and
//! returns the best value found, which is an upper bound on the minimum.
//!
//! The search keeps `|Ẽ| = |E|`. It first evaluates every deterministic map
//! (one per set partition of Eve's alphabet, since relabeling outputs does
//! not change the objective), then runs projected coordinate descent from
//! the best of those and from seeded random interior channels.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{
    format_rational, parse_rational, rational_to_f64, sub_index, table_size, JointDistribution, Rational, Variable,
};
use crate::error::{Error, Result};
use crate::info::{self, resolve_groups};

/// Row-stochastic map from an input alphabet to an output alphabet.
///
/// `rows[i][j]` is the probability of output `j` given input `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel<T = Rational> {
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub rows: Vec<Vec<T>>,
}

/// Channel with floating-point entries, as produced by the optimizer.
pub type FloatChannel = Channel<f64>;

impl Channel<Rational> {
    pub fn new(input: Vec<String>, output: Vec<String>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let ch = Channel { input, output, rows };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        for (symbol, row) in self.input.iter().zip(&self.rows) {
            if row.iter().any(|p| p.is_negative()) {
                return Err(Error::InvalidChannel(format!("row {symbol} has a negative entry")));
            }
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(Error::InvalidChannel(format!(
                    "row {symbol} sums to {}",
                    format_rational(&sum)
                )));
            }
        }
        Ok(())
    }

    pub fn identity<S: AsRef<str>>(alphabet: &[S]) -> Self {
        let labels: Vec<usize> = (0..alphabet.len()).collect();
        Channel::deterministic(alphabet, &labels)
    }

    /// Every input goes to the first symbol of the alphabet.
    pub fn constant<S: AsRef<str>>(alphabet: &[S]) -> Self {
        Channel::deterministic(alphabet, &vec![0; alphabet.len()])
    }

    /// Deterministic map onto the same alphabet: input `i` goes to output `labels[i]`.
    pub fn deterministic<S: AsRef<str>>(alphabet: &[S], labels: &[usize]) -> Self {
        let symbols: Vec<String> = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        let n = symbols.len();
        let rows = labels
            .iter()
            .map(|&l| {
                let mut row = vec![Rational::zero(); n];
                row[l] = Rational::one();
                row
            })
            .collect();
        Channel {
            input: symbols.clone(),
            output: symbols,
            rows,
        }
    }

    /// Deterministic map on `alphabet` sending each `(from, to)` pair's
    /// `from` to `to` and every other symbol to itself.
    pub fn merging<S: AsRef<str>>(alphabet: &[S], merges: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<&str> = alphabet.iter().map(|s| s.as_ref()).collect();
        let find = |s: &str| {
            names
                .iter()
                .position(|n| *n == s)
                .ok_or_else(|| Error::InvalidChannel(format!("symbol {s:?} is not in the alphabet")))
        };
        let mut labels: Vec<usize> = (0..names.len()).collect();
        for (from, to) in merges {
            labels[find(from)?] = find(to)?;
        }
        Ok(Channel::deterministic(alphabet, &labels))
    }

    pub fn to_float(&self) -> FloatChannel {
        Channel {
            input: self.input.clone(),
            output: self.output.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(rational_to_f64).collect())
                .collect(),
        }
    }

    pub fn to_file(&self) -> WitnessFile {
        let rows = self
            .input
            .iter()
            .zip(&self.rows)
            .map(|(symbol, row)| {
                let cells = self
                    .output
                    .iter()
                    .zip(row)
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(o, p)| (o.clone(), format_rational(p)))
                    .collect();
                (symbol.clone(), cells)
            })
            .collect();
        WitnessFile {
            input: self.input.clone(),
            output: self.output.clone(),
            rows,
        }
    }

    pub fn from_file(file: &WitnessFile) -> Result<Self> {
        for key in file.rows.keys() {
            if !file.input.contains(key) {
                return Err(Error::InvalidChannel(format!("row for unknown input {key:?}")));
            }
        }
        let mut rows = Vec::with_capacity(file.input.len());
        for symbol in &file.input {
            let mut row = vec![Rational::zero(); file.output.len()];
            if let Some(cells) = file.rows.get(symbol) {
                for (out, p) in cells {
                    let j = file
                        .output
                        .iter()
                        .position(|o| o == out)
                        .ok_or_else(|| Error::InvalidChannel(format!("unknown output symbol {out:?}")))?;
                    row[j] = parse_rational(p)?;
                }
            }
            rows.push(row);
        }
        Channel::new(file.input.clone(), file.output.clone(), rows)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WitnessFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        Channel::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("channel serializes")
    }
}

impl FloatChannel {
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        for (symbol, row) in self.input.iter().zip(&self.rows) {
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidChannel(format!("row {symbol} has an invalid entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidChannel(format!("row {symbol} sums to {sum}")));
            }
        }
        Ok(())
    }

    /// Rounds entries within `1e-6` of 0 or 1 to exact values. Returns
    /// `None` unless every entry snaps and the rows stay stochastic.
    pub fn snap(&self) -> Option<Channel<Rational>> {
        const SNAP: f64 = 1e-6;
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&p| {
                        if p.abs() <= SNAP {
                            Some(Rational::zero())
                        } else if (p - 1.0).abs() <= SNAP {
                            Some(Rational::one())
                        } else {
                            None
                        }
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Channel::new(self.input.clone(), self.output.clone(), rows).ok()
    }

    /// Nearest channel with every entry a multiple of `1 / den`. Rounding
    /// error is absorbed by the largest entry of each row.
    pub fn round_to(&self, den: i128) -> Option<Channel<Rational>> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut nums: Vec<i128> = row.iter().map(|&p| (p * den as f64).round() as i128).collect();
                let largest = (0..nums.len()).max_by_key(|&i| nums[i])?;
                nums[largest] += den - nums.iter().sum::<i128>();
                if nums.iter().any(|&k| k < 0) {
                    return None;
                }
                Some(nums.into_iter().map(|k| Rational::new(k, den)).collect())
            })
            .collect::<Option<Vec<_>>>()?;
        Channel::new(self.input.clone(), self.output.clone(), rows).ok()
    }

    fn from_flat(alphabet: &[String], flat: &[f64]) -> Self {
        let n = alphabet.len();
        Channel {
            input: alphabet.to_vec(),
            output: alphabet.to_vec(),
            rows: flat.chunks(n).map(<[f64]>::to_vec).collect(),
        }
    }
}

impl<T> Channel<T> {
    fn check_shape(&self) -> Result<()> {
        let distinct = |v: &[String]| {
            let mut s = v.to_vec();
            s.sort();
            s.dedup();
            s.len() == v.len() && !v.is_empty()
        };
        if !distinct(&self.input) || !distinct(&self.output) {
            return Err(Error::InvalidChannel("alphabets must be non-empty and distinct".into()));
        }
        if self.rows.len() != self.input.len() || self.rows.iter().any(|r| r.len() != self.output.len()) {
            return Err(Error::InvalidChannel("row shape does not match the alphabets".into()));
        }
        Ok(())
    }
}

/// JSON layout of a witness channel. Omitted cells are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub rows: BTreeMap<String, BTreeMap<String, String>>,
}

/// Replaces `var` by its image under `channel`, exactly.
pub fn apply_channel(dist: &JointDistribution, var: &str, channel: &Channel<Rational>) -> Result<JointDistribution> {
    channel.validate()?;
    let position = dist.index_of(var)?;
    let original = &dist.variables()[position];
    if original.alphabet != channel.input {
        return Err(Error::AlphabetMismatch {
            channel: channel.input.clone(),
            variable: original.alphabet.clone(),
        });
    }
    let replacement = Variable {
        name: original.name.clone(),
        alphabet: channel.output.clone(),
        owner: original.owner,
    };
    let mut variables = dist.variables().to_vec();
    variables[position] = replacement.clone();
    let mut probs = vec![Rational::zero(); table_size(&variables)];
    for (index, p) in dist.table().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let mut digits = dist.digits(index);
        let input = digits[position];
        for (out, w) in channel.rows[input].iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            digits[position] = out;
            let target = variables
                .iter()
                .zip(&digits)
                .fold(0, |acc, (v, &d)| acc * v.alphabet.len() + d);
            probs[target] += p * w;
        }
    }
    Ok(dist.replace_variable(position, replacement, probs))
}

/// `I(x : y | Ẽ)` where `Ẽ` is `eve` after `channel`.
pub fn cmi_under_channel<S: AsRef<str>>(
    dist: &JointDistribution,
    x: &[S],
    y: &[S],
    eve: &str,
    channel: &Channel<Rational>,
) -> Result<f64> {
    check_eve_disjoint(x, y, eve)?;
    let processed = apply_channel(dist, eve, channel)?;
    info::conditional_mutual_information(&processed, x, y, &[eve])
}

/// Exact test of `P(u, v | g) = P(u | g) P(v | g)` for every `g` with
/// positive probability.
pub fn certify_zero_cmi<S: AsRef<str>, T: AsRef<str>>(
    dist: &JointDistribution,
    x: &[S],
    y: &[S],
    given: &[T],
) -> Result<bool> {
    let (xs, ys, zs) = resolve_groups(dist, x, y, given)?;
    let vars = dist.variables();
    let nx = group_size(vars, &xs);
    let ny = group_size(vars, &ys);
    let nz = group_size(vars, &zs);
    let mut joint = vec![Rational::zero(); nx * ny * nz];
    for (index, p) in dist.table().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let digits = dist.digits(index);
        let (u, v, g) = (
            sub_index(vars, &digits, &xs),
            sub_index(vars, &digits, &ys),
            sub_index(vars, &digits, &zs),
        );
        joint[(g * nx + u) * ny + v] += p;
    }
    for g in 0..nz {
        let block = &joint[g * nx * ny..(g + 1) * nx * ny];
        let pg: Rational = block.iter().sum();
        if pg.is_zero() {
            continue;
        }
        let pu: Vec<Rational> = (0..nx).map(|u| block[u * ny..(u + 1) * ny].iter().sum()).collect();
        let pv: Vec<Rational> = (0..ny).map(|v| (0..nx).map(|u| block[u * ny + v]).sum()).collect();
        for u in 0..nx {
            for v in 0..ny {
                // P(u,v,g) P(g) = P(u,g) P(v,g)
                if block[u * ny + v] * pg != pu[u] * pv[v] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn group_size(vars: &[Variable], positions: &[usize]) -> usize {
    positions.iter().map(|&i| vars[i].alphabet.len()).product()
}

fn check_eve_disjoint<S: AsRef<str>>(x: &[S], y: &[S], eve: &str) -> Result<()> {
    if x.iter().chain(y).any(|n| n.as_ref() == eve) {
        return Err(Error::OverlappingGroups(eve.to_string()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Random interior starting channels.
    pub restarts: usize,
    pub seed: u64,
    /// Upper limit on descent sweeps per start.
    pub max_sweeps: usize,
    /// A start has converged once a full sweep improves by less than this.
    pub tolerance: f64,
    /// Largest Eve alphabet accepted.
    pub max_alphabet: usize,
    /// Number of best deterministic maps used as descent starts.
    pub polish_candidates: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 64,
            seed: 0,
            max_sweeps: 500,
            tolerance: 1e-9,
            max_alphabet: 8,
            polish_candidates: 4,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be positive".into()));
        }
        if self.max_alphabet == 0 || self.max_alphabet > 8 {
            return Err(Error::InvalidConfig("max_alphabet must lie in 1..=8".into()));
        }
        Ok(())
    }
}

/// Outcome of the channel search.
#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicResult {
    /// Best `I(x : y | Ẽ)` found, in bits; exactly 0 when certified.
    pub value: f64,
    /// Channel achieving `value`.
    pub channel: FloatChannel,
    /// Exact form of `channel` when it certifies a zero.
    pub witness: Option<Channel<Rational>>,
    pub certified_zero: bool,
    pub restarts_used: usize,
    pub converged: bool,
    /// Deterministic maps evaluated (one per set partition of Eve's alphabet).
    pub deterministic_maps: usize,
    /// Objective at the identity channel, `I(x : y | E)`.
    pub identity_value: f64,
    /// Objective at a constant channel, `I(x : y)`.
    pub constant_value: f64,
}

/// Values below this are worth an exact zero certification attempt.
const ZERO_CANDIDATE: f64 = 1e-9;
/// Below this, rounded copies of the best channel are also tried.
const ROUNDING_CANDIDATE: f64 = 1e-6;
const MAX_ROUNDING_DENOMINATOR: i128 = 64;

/// Numerical upper bound on `I(x : y ↓ eve)`.
pub fn intrinsic_information_upper_bound<S: AsRef<str>>(
    dist: &JointDistribution,
    x: &[S],
    y: &[S],
    eve: &str,
    config: &OptimizerConfig,
) -> Result<IntrinsicResult> {
    config.validate()?;
    check_eve_disjoint(x, y, eve)?;
    let eve_var = dist.variable(eve)?.clone();
    let n = eve_var.alphabet.len();
    if n > config.max_alphabet {
        return Err(Error::AlphabetTooLarge {
            variable: eve.to_string(),
            size: n,
            limit: config.max_alphabet,
        });
    }
    let objective = Objective::new(dist, x, y, eve)?;
    let alphabet = &eve_var.alphabet;

    let mut deterministic: Vec<Run> = set_partitions(n)
        .into_iter()
        .map(|labels| {
            let w = one_hot(&labels, n);
            Run {
                value: objective.value(&w),
                w,
                converged: true,
            }
        })
        .collect();
    deterministic.sort_by(Run::order);
    let identity_value = objective.value(&one_hot(&(0..n).collect::<Vec<_>>(), n));
    let constant_value = objective.value(&one_hot(&vec![0; n], n));

    let polished: Vec<Run> = deterministic
        .iter()
        .take(config.polish_candidates)
        .map(|start| objective.descend(start.w.clone(), config))
        .collect();

    let random: Vec<Run> = (0..config.restarts)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(index as u64);
            objective.descend(random_channel(&mut rng, n), config)
        })
        .collect();

    let best = deterministic
        .iter()
        .chain(&polished)
        .chain(&random)
        .min_by(|a, b| Run::order(a, b))
        .expect("at least one deterministic map")
        .clone();

    let certify = |ch: &Channel<Rational>| -> Result<bool> {
        let processed = apply_channel(dist, eve, ch)?;
        certify_zero_cmi(&processed, x, y, &[eve])
    };

    let mut witness = None;
    let mut channel = FloatChannel::from_flat(alphabet, &best.w);
    if best.value < ZERO_CANDIDATE {
        if let Some(exact) = channel.snap() {
            if certify(&exact)? {
                witness = Some(exact);
            }
        }
        if witness.is_none() {
            for run in deterministic.iter().take_while(|r| r.value < ZERO_CANDIDATE) {
                let exact = FloatChannel::from_flat(alphabet, &run.w)
                    .snap()
                    .expect("one-hot rows snap");
                if certify(&exact)? {
                    channel = exact.to_float();
                    witness = Some(exact);
                    break;
                }
            }
        }
    }
    if witness.is_none() && best.value < ROUNDING_CANDIDATE {
        // zeros away from the vertices are often rational with a small denominator
        for den in 2..=MAX_ROUNDING_DENOMINATOR {
            if let Some(exact) = channel.round_to(den) {
                if certify(&exact)? {
                    channel = exact.to_float();
                    witness = Some(exact);
                    break;
                }
            }
        }
    }
    let certified_zero = witness.is_some();
    let value = if certified_zero { 0.0 } else { info::clamp(best.value)? };

    Ok(IntrinsicResult {
        value,
        channel,
        witness,
        certified_zero,
        restarts_used: config.restarts,
        converged: best.converged,
        deterministic_maps: deterministic.len(),
        identity_value: info::clamp(identity_value)?,
        constant_value: info::clamp(constant_value)?,
    })
}

/// One labeling per set partition of `0..n`: every element is labeled with
/// the smallest element of its block, so merged symbols keep the name of the
/// first one.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for label in 0..=limit {
            prefix.push(label);
            extend(prefix, max.max(label), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        extend(&mut Vec::with_capacity(n), 0, n, &mut out);
    }
    // restricted-growth labels number blocks by first appearance; swap each
    // for the position of that first appearance
    for labels in &mut out {
        let mut leaders = Vec::new();
        for i in 0..n {
            if labels[i] == leaders.len() {
                leaders.push(i);
            }
            labels[i] = leaders[labels[i]];
        }
    }
    out
}

fn one_hot(labels: &[usize], n: usize) -> Vec<f64> {
    let mut w = vec![0.0; labels.len() * n];
    for (row, &l) in labels.iter().enumerate() {
        w[row * n + l] = 1.0;
    }
    w
}

fn random_channel(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n * n);
    for _ in 0..n {
        // flat Dirichlet row
        let row: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = row.iter().sum();
        w.extend(row.iter().map(|v| v / total));
    }
    w
}

#[derive(Debug, Clone)]
struct Run {
    value: f64,
    w: Vec<f64>,
    converged: bool,
}

impl Run {
    /// By value, then lexicographically by row-major channel entries.
    fn order(a: &Run, b: &Run) -> Ordering {
        a.value.total_cmp(&b.value).then_with(|| {
            a.w.iter()
                .zip(&b.w)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

/// `I(x : y | Ẽ)` as a function of a row-major `|E| x |E|` channel.
struct Objective {
    nx: usize,
    ny: usize,
    ne: usize,
    /// `P(x, y, e)` at `(x * ny + y) * ne + e`.
    joint: Vec<f64>,
    row_mass: Vec<f64>,
}

impl Objective {
    fn new<S: AsRef<str>>(dist: &JointDistribution, x: &[S], y: &[S], eve: &str) -> Result<Self> {
        let (xs, ys, es) = resolve_groups(dist, x, y, &[eve])?;
        let vars = dist.variables();
        let (nx, ny, ne) = (group_size(vars, &xs), group_size(vars, &ys), group_size(vars, &es));
        let mut joint = vec![0.0; nx * ny * ne];
        let mut exact = vec![Rational::zero(); nx * ny * ne];
        for (index, p) in dist.table().iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let digits = dist.digits(index);
            let cell = (sub_index(vars, &digits, &xs) * ny + sub_index(vars, &digits, &ys)) * ne
                + sub_index(vars, &digits, &es);
            exact[cell] += p;
        }
        for (slot, p) in joint.iter_mut().zip(&exact) {
            *slot = rational_to_f64(p);
        }
        let row_mass = (0..ne)
            .map(|e| (0..nx * ny).map(|xy| joint[xy * ne + e]).sum())
            .collect();
        Ok(Objective {
            nx,
            ny,
            ne,
            joint,
            row_mass,
        })
    }

    /// `Q(x, y, k)` laid out as `(x * ny + y) * ne + k`.
    fn push_forward(&self, w: &[f64]) -> Vec<f64> {
        let ne = self.ne;
        let mut q = vec![0.0; self.nx * self.ny * ne];
        for xy in 0..self.nx * self.ny {
            for e in 0..ne {
                let p = self.joint[xy * ne + e];
                if p == 0.0 {
                    continue;
                }
                for k in 0..ne {
                    q[xy * ne + k] += p * w[e * ne + k];
                }
            }
        }
        q
    }

    fn marginals(&self, q: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (nx, ny, ne) = (self.nx, self.ny, self.ne);
        let mut qx = vec![0.0; nx * ne];
        let mut qy = vec![0.0; ny * ne];
        let mut qk = vec![0.0; ne];
        for x in 0..nx {
            for y in 0..ny {
                for k in 0..ne {
                    let v = q[(x * ny + y) * ne + k];
                    qx[x * ne + k] += v;
                    qy[y * ne + k] += v;
                    qk[k] += v;
                }
            }
        }
        (qx, qy, qk)
    }

    fn value(&self, w: &[f64]) -> f64 {
        let q = self.push_forward(w);
        let (qx, qy, qk) = self.marginals(&q);
        let (ny, ne) = (self.ny, self.ne);
        let mut total = 0.0;
        for x in 0..self.nx {
            for y in 0..ny {
                for k in 0..ne {
                    let v = q[(x * ny + y) * ne + k];
                    if v > 0.0 {
                        total += v * (v * qk[k] / (qx[x * ne + k] * qy[y * ne + k])).log2();
                    }
                }
            }
        }
        total
    }

    /// Partial derivatives with respect to row `e` of the channel.
    fn row_gradient(&self, w: &[f64], e: usize) -> Vec<f64> {
        const EPS: f64 = 1e-15;
        let q = self.push_forward(w);
        let (qx, qy, qk) = self.marginals(&q);
        let (ny, ne) = (self.ny, self.ne);
        let mut grad = vec![0.0; ne];
        for x in 0..self.nx {
            for y in 0..ny {
                let p = self.joint[(x * ny + y) * ne + e];
                if p == 0.0 {
                    continue;
                }
                for (k, g) in grad.iter_mut().enumerate() {
                    let v = q[(x * ny + y) * ne + k];
                    let ratio = ((v + EPS) * (qk[k] + EPS)) / ((qx[x * ne + k] + EPS) * (qy[y * ne + k] + EPS));
                    *g += p * ratio.log2();
                }
            }
        }
        grad
    }

    /// Projected coordinate descent, one channel row at a time.
    fn descend(&self, mut w: Vec<f64>, config: &OptimizerConfig) -> Run {
        let ne = self.ne;
        let mut value = self.value(&w);
        let mut converged = false;
        for _ in 0..config.max_sweeps {
            let before = value;
            for e in 0..ne {
                if self.row_mass[e] == 0.0 {
                    continue;
                }
                let grad = self.row_gradient(&w, e);
                let row: Vec<f64> = w[e * ne..(e + 1) * ne].to_vec();
                let mut step = 1.0;
                let mut accepted = false;
                for _ in 0..50 {
                    let trial: Vec<f64> = row.iter().zip(&grad).map(|(r, g)| r - step * g).collect();
                    w[e * ne..(e + 1) * ne].copy_from_slice(&project_to_simplex(&trial));
                    let candidate = self.value(&w);
                    if candidate < value {
                        value = candidate;
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted {
                    w[e * ne..(e + 1) * ne].copy_from_slice(&row);
                }
            }
            if before - value < config.tolerance {
                converged = true;
                break;
            }
        }
        Run { value, w, converged }
    }
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&u| (u - theta).max(0.0)).collect()
}
