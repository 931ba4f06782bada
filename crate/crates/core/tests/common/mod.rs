//! Shared helpers for the integration suites: a seeded generator of small
//! random distributions and a brute-force lattice oracle for the channel
//! search. Nothing here calls into the optimizer.

#![allow(dead_code)]

use lopc::{rational, JointDistribution, Party, Rational, Variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lattice resolution of the oracle: channel entries are multiples of 1/64.
pub const GRID: usize = 64;

pub fn symbols(n: usize, prefix: &str) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Random distribution over binary `A`, `B`, an optional `C` of size
/// `c_size` (0 leaves it out) and `E` of size `e_size`. Weights are small
/// integers, so some outcomes get probability zero.
pub fn random_distribution(rng: &mut ChaCha8Rng, c_size: usize, e_size: usize) -> JointDistribution {
    let mut vars = vec![Variable::binary("A", Party::Alice), Variable::binary("B", Party::Bob)];
    if c_size > 0 {
        vars.push(Variable::new("C", &symbols(c_size, "c"), Party::Alice));
    }
    vars.push(Variable::new("E", &symbols(e_size, "e"), Party::Eve));
    let outcomes = outcomes(&vars);
    let mut weights: Vec<i128> = outcomes.iter().map(|_| rng.gen_range(0..=6)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i128 = weights.iter().sum();
    let entries = outcomes.into_iter().zip(weights).map(|(o, w)| (o, rational(w, total)));
    JointDistribution::new(vars, entries).expect("generated distribution is valid")
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every outcome of `vars` in table order.
pub fn outcomes(vars: &[Variable]) -> Vec<Vec<String>> {
    let mut all = vec![Vec::new()];
    for v in vars {
        all = all
            .into_iter()
            .flat_map(|prefix: Vec<String>| {
                v.alphabet.iter().map(move |s| {
                    let mut o = prefix.clone();
                    o.push(s.clone());
                    o
                })
            })
            .collect();
    }
    all
}

/// `p(u, v, e)` as floats, with `u` ranging over the joint values of `x`,
/// `v` over those of `y` and `e` over Eve's alphabet. Indexed `[u][v][e]`.
pub struct Cells {
    pub nx: usize,
    pub ny: usize,
    pub ne: usize,
    pub p: Vec<f64>,
}

impl Cells {
    pub fn new(dist: &JointDistribution, x: &[&str], y: &[&str], eve: &str) -> Cells {
        let vars = dist.variables();
        let pos = |n: &str| vars.iter().position(|v| v.name == n).expect("variable exists");
        let size = |names: &[&str]| names.iter().map(|n| vars[pos(n)].alphabet.len()).product::<usize>();
        let (nx, ny) = (size(x), size(y));
        let ne = vars[pos(eve)].alphabet.len();
        let flat = |names: &[&str], outcome: &[&str]| {
            names.iter().fold(0, |acc, n| {
                let v = &vars[pos(n)];
                acc * v.alphabet.len() + v.alphabet.iter().position(|s| s == outcome[pos(n)]).unwrap()
            })
        };
        let mut p = vec![0.0; nx * ny * ne];
        for (outcome, prob) in dist.support() {
            let (u, v, e) = (flat(x, &outcome), flat(y, &outcome), flat(&[eve], &outcome));
            p[(u * ny + v) * ne + e] += *prob.numer() as f64 / *prob.denom() as f64;
        }
        Cells { nx, ny, ne, p }
    }

    /// Contribution `P(ẽ) I(x : y | ẽ)` of one output column, where
    /// `column[e]` is the lattice weight (out of `GRID`) sent from `e` to `ẽ`.
    pub fn column_value(&self, column: &[usize]) -> f64 {
        let weights: Vec<f64> = column.iter().map(|&w| w as f64 / GRID as f64).collect();
        self.weighted_column_value(&weights)
    }

    /// `I(x : y | Ẽ)` for an arbitrary channel given as rows over Eve's
    /// alphabet.
    pub fn channel_value(&self, rows: &[Vec<f64>]) -> f64 {
        let outputs = rows.first().map_or(0, Vec::len);
        (0..outputs)
            .map(|k| self.weighted_column_value(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
            .sum()
    }

    fn weighted_column_value(&self, column: &[f64]) -> f64 {
        let mut q = vec![0.0; self.nx * self.ny];
        for (cell, q) in q.iter_mut().enumerate() {
            for (e, &w) in column.iter().enumerate() {
                *q += self.p[cell * self.ne + e] * w;
            }
        }
        let total: f64 = q.iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        let qx: Vec<f64> = (0..self.nx)
            .map(|u| (0..self.ny).map(|v| q[u * self.ny + v]).sum())
            .collect();
        let qy: Vec<f64> = (0..self.ny)
            .map(|v| (0..self.nx).map(|u| q[u * self.ny + v]).sum())
            .collect();
        let mut value = 0.0;
        for u in 0..self.nx {
            for v in 0..self.ny {
                let j = q[u * self.ny + v];
                if j > 0.0 {
                    value += j * (j * total / (qx[u] * qy[v])).log2();
                }
            }
        }
        value.max(0.0)
    }
}

/// Minimum of `I(x : y | Ẽ)` over channels `E -> Ẽ` with `|Ẽ| = |E| <= 3`
/// whose entries lie on the 1/64 lattice, by exhaustive enumeration.
///
/// The objective is a sum of per-column terms and the output columns must
/// add up to the all-ones vector, so the search tabulates every lattice
/// column once and then walks all column triples. Columns are interchangeable,
/// so only triples ordered by their first coordinate are visited.
pub fn grid_oracle(cells: &Cells) -> f64 {
    match cells.ne {
        1 => cells.column_value(&[GRID]),
        2 => {
            let mut best = f64::INFINITY;
            for a in 0..=GRID {
                for b in 0..=GRID {
                    let v = cells.column_value(&[a, b]) + cells.column_value(&[GRID - a, GRID - b]);
                    best = best.min(v);
                }
            }
            best
        }
        3 => three_column_search(cells),
        _ => panic!("oracle supports at most three Eve symbols"),
    }
}

fn three_column_search(cells: &Cells) -> f64 {
    let side = GRID + 1;
    let at = |a: usize, b: usize| (a * side + b) * side;
    let mut g = vec![0.0; side * side * side];
    for a in 0..side {
        for b in 0..side {
            for c in 0..side {
                g[at(a, b) + c] = cells.column_value(&[a, b, c]);
            }
        }
    }
    let mut best = f64::INFINITY;
    for u0 in 0..=GRID / 3 {
        for v0 in u0..=(GRID - u0) / 2 {
            let w0 = GRID - u0 - v0;
            for u1 in 0..=GRID {
                for u2 in 0..=GRID {
                    let gu = g[at(u0, u1) + u2];
                    if gu >= best {
                        continue;
                    }
                    let m = GRID - u2;
                    for v1 in 0..=GRID - u1 {
                        let vs = &g[at(v0, v1)..at(v0, v1) + side];
                        let ws = &g[at(w0, GRID - u1 - v1)..at(w0, GRID - u1 - v1) + side];
                        let pair = (0..=m).map(|v2| vs[v2] + ws[m - v2]).fold(f64::INFINITY, f64::min);
                        best = best.min(gu + pair);
                    }
                }
            }
        }
    }
    best
}

/// `I(x : y | E)` from the cells, for cross-checking library measures.
pub fn cmi_identity(cells: &Cells) -> f64 {
    (0..cells.ne)
        .map(|e| {
            let mut column = vec![0; cells.ne];
            column[e] = GRID;
            cells.column_value(&column)
        })
        .sum()
}

pub fn exact(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
