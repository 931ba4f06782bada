//! Exact joint distributions over named discrete variables.
//!
//! A [`JointDistribution`] stores a dense table over the full product
//! alphabet of its variables. The first declared variable is the most
//! significant digit of the table index. Every variable carries the
//! [`Party`] that holds it, so local processing and private transfers can
//! be checked for legality.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact probability.
pub type Rational = Ratio<i128>;

pub fn rational(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| *r.numer() as f64 / *r.denom() as f64)
}

/// Parses `"num/den"` or an integer string.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("{text:?} is not a rational of the form num/den"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: i128 = num.parse().map_err(|_| bad())?;
    let den: i128 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Formats as `"num/den"`, or `"num"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
    Eve,
    Charlie,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
            Party::Eve => "eve",
            Party::Charlie => "charlie",
        })
    }
}

impl FromStr for Party {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alice" => Ok(Party::Alice),
            "bob" => Ok(Party::Bob),
            "eve" => Ok(Party::Eve),
            "charlie" => Ok(Party::Charlie),
            _ => Err(Error::Parse(format!("unknown party {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub alphabet: Vec<String>,
    pub owner: Party,
}

impl Variable {
    pub fn new<S: AsRef<str>>(name: &str, alphabet: &[S], owner: Party) -> Self {
        Variable {
            name: name.to_string(),
            alphabet: alphabet.iter().map(|s| s.as_ref().to_string()).collect(),
            owner,
        }
    }

    /// A variable over `{"0", "1"}`.
    pub fn binary(name: &str, owner: Party) -> Self {
        Variable::new(name, &["0", "1"], owner)
    }

    pub fn symbol_index(&self, symbol: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::UnknownSymbol {
                variable: self.name.clone(),
                symbol: symbol.to_string(),
            })
    }

    pub fn is_binary(&self) -> bool {
        self.alphabet == ["0", "1"]
    }

    fn validate(&self) -> Result<()> {
        let distinct: HashSet<&String> = self.alphabet.iter().collect();
        if self.alphabet.is_empty() || distinct.len() != self.alphabet.len() {
            return Err(Error::InvalidAlphabet(self.name.clone()));
        }
        Ok(())
    }
}

/// Joint probability table over named variables with exact rational entries.
///
/// Invariants: entries are non-negative and sum to exactly one; the table is
/// total over the product alphabet. A distribution with no variables is the
/// one-point distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    variables: Vec<Variable>,
    probs: Vec<Rational>,
}

impl JointDistribution {
    /// Builds and validates a distribution. Outcomes not listed get probability 0.
    pub fn new<I, O, S>(variables: Vec<Variable>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (O, Rational)>,
        O: AsRef<[S]>,
        S: AsRef<str>,
    {
        check_variables(&variables)?;
        let size = table_size(&variables);
        let mut probs = vec![Rational::zero(); size];
        let mut seen = vec![false; size];
        for (outcome, p) in entries {
            let outcome: Vec<&str> = outcome.as_ref().iter().map(|s| s.as_ref()).collect();
            let owned = || outcome.iter().map(|s| s.to_string()).collect::<Vec<_>>();
            if outcome.len() != variables.len() {
                return Err(Error::ArityMismatch {
                    expected: variables.len(),
                    got: outcome.len(),
                });
            }
            let index = encode(&variables, &outcome)?;
            if seen[index] {
                return Err(Error::DuplicateOutcome(owned()));
            }
            if p.is_negative() {
                return Err(Error::NegativeProbability {
                    outcome: owned(),
                    p: format_rational(&p),
                });
            }
            seen[index] = true;
            probs[index] = p;
        }
        let sum: Rational = probs.iter().sum();
        if !sum.is_one() {
            return Err(Error::NotNormalized {
                sum: format_rational(&sum),
            });
        }
        Ok(JointDistribution { variables, probs })
    }

    /// Builds from a dense table in index order. Used internally after
    /// operations that preserve normalization by construction.
    pub(crate) fn from_dense(variables: Vec<Variable>, probs: Vec<Rational>) -> Self {
        debug_assert_eq!(probs.len(), table_size(&variables));
        debug_assert!(probs.iter().sum::<Rational>().is_one());
        JointDistribution { variables, probs }
    }

    /// The distribution concentrated on a single outcome of one variable.
    pub fn point(variable: Variable, symbol: &str) -> Result<Self> {
        JointDistribution::new(vec![variable], [([symbol], Rational::one())])
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Result<&Variable> {
        Ok(&self.variables[self.index_of(name)?])
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.variables.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn owner(&self, name: &str) -> Result<Party> {
        Ok(self.variable(name)?.owner)
    }

    /// Dense table in index order (first variable most significant).
    pub fn table(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob<S: AsRef<str>>(&self, outcome: &[S]) -> Result<Rational> {
        if outcome.len() != self.variables.len() {
            return Err(Error::ArityMismatch {
                expected: self.variables.len(),
                got: outcome.len(),
            });
        }
        let outcome: Vec<&str> = outcome.iter().map(|s| s.as_ref()).collect();
        Ok(self.probs[encode(&self.variables, &outcome)?])
    }

    /// Outcomes with positive probability, in table order.
    pub fn support(&self) -> Vec<(Vec<&str>, Rational)> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| (self.decode(i), *p))
            .collect()
    }

    pub fn total(&self) -> Rational {
        self.probs.iter().sum()
    }

    /// Digits of a table index, one per variable.
    pub(crate) fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.variables.len()];
        for (slot, var) in digits.iter_mut().zip(&self.variables).rev() {
            let n = var.alphabet.len();
            *slot = index % n;
            index /= n;
        }
        digits
    }

    fn decode(&self, index: usize) -> Vec<&str> {
        self.digits(index)
            .iter()
            .zip(&self.variables)
            .map(|(&d, v)| v.alphabet[d].as_str())
            .collect()
    }

    /// Resolves a selection of names into sorted, deduplicated positions.
    pub(crate) fn positions<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut positions = names
            .iter()
            .map(|n| self.index_of(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        positions.sort_unstable();
        positions.dedup();
        Ok(positions)
    }

    /// Exact marginal over `keep`; variables keep their declaration order.
    pub fn marginal<S: AsRef<str>>(&self, keep: &[S]) -> Result<JointDistribution> {
        if keep.is_empty() {
            return Err(Error::EmptySelection);
        }
        let positions = self.positions(keep)?;
        Ok(self.marginal_positions(&positions))
    }

    pub(crate) fn marginal_positions(&self, positions: &[usize]) -> JointDistribution {
        let variables: Vec<Variable> = positions.iter().map(|&i| self.variables[i].clone()).collect();
        let mut probs = vec![Rational::zero(); table_size(&variables)];
        for (index, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let digits = self.digits(index);
            probs[sub_index(&self.variables, &digits, positions)] += p;
        }
        JointDistribution { variables, probs }
    }

    /// Conditions on `var = symbol`. Returns the renormalized distribution
    /// over the remaining variables and the probability of the event.
    pub fn condition(&self, var: &str, symbol: &str) -> Result<(JointDistribution, Rational)> {
        let position = self.index_of(var)?;
        let wanted = self.variables[position].symbol_index(symbol)?;
        let rest: Vec<usize> = (0..self.variables.len()).filter(|&i| i != position).collect();
        let variables: Vec<Variable> = rest.iter().map(|&i| self.variables[i].clone()).collect();
        let mut probs = vec![Rational::zero(); table_size(&variables)];
        let mut event = Rational::zero();
        for (index, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let digits = self.digits(index);
            if digits[position] != wanted {
                continue;
            }
            event += p;
            probs[sub_index(&self.variables, &digits, &rest)] += p;
        }
        if event.is_zero() {
            return Err(Error::ZeroProbabilityEvent {
                variable: var.to_string(),
                symbol: symbol.to_string(),
            });
        }
        for p in &mut probs {
            *p /= event;
        }
        Ok((JointDistribution { variables, probs }, event))
    }

    /// Deterministic local processing by `party`: the symbol of `target` is
    /// replaced by `f(inputs)`. Colliding outcomes have their mass summed.
    ///
    /// `f` receives the input symbols in the order given by `inputs` and
    /// returns `None` where it is undefined.
    pub fn apply_local_function<S, F>(
        &self,
        party: Party,
        target: &str,
        inputs: &[S],
        f: F,
    ) -> Result<JointDistribution>
    where
        S: AsRef<str>,
        F: Fn(&[&str]) -> Option<String>,
    {
        let target_pos = self.index_of(target)?;
        let input_pos = inputs
            .iter()
            .map(|n| self.index_of(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        for &i in input_pos.iter().chain(std::iter::once(&target_pos)) {
            let var = &self.variables[i];
            if var.owner != party {
                return Err(Error::OwnershipViolation {
                    variable: var.name.clone(),
                    owner: var.owner,
                    party,
                });
            }
        }

        // Tabulate f over the whole product of input alphabets first, so a
        // partial function is rejected even where the table has no mass.
        let input_vars: Vec<Variable> = input_pos.iter().map(|&i| self.variables[i].clone()).collect();
        let target_var = &self.variables[target_pos];
        let mut image = Vec::with_capacity(table_size(&input_vars));
        let mut digits = vec![0usize; input_vars.len()];
        for _ in 0..table_size(&input_vars) {
            let symbols: Vec<&str> = digits
                .iter()
                .zip(&input_vars)
                .map(|(&d, v)| v.alphabet[d].as_str())
                .collect();
            let out =
                f(&symbols).ok_or_else(|| Error::PartialFunction(symbols.iter().map(|s| s.to_string()).collect()))?;
            image.push(target_var.symbol_index(&out)?);
            increment(&mut digits, &input_vars);
        }

        let mut probs = vec![Rational::zero(); self.probs.len()];
        for (index, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let mut digits = self.digits(index);
            let key = sub_index(&self.variables, &digits, &input_pos);
            digits[target_pos] = image[key];
            probs[compose(&self.variables, &digits)] += p;
        }
        Ok(JointDistribution {
            variables: self.variables.clone(),
            probs,
        })
    }

    /// Hands `var` from one party to another. The table is untouched.
    pub fn transfer_ownership(&self, var: &str, from: Party, to: Party) -> Result<JointDistribution> {
        let position = self.index_of(var)?;
        let owner = self.variables[position].owner;
        if owner != from {
            return Err(Error::OwnershipViolation {
                variable: var.to_string(),
                owner,
                party: from,
            });
        }
        let mut out = self.clone();
        out.variables[position].owner = to;
        Ok(out)
    }

    /// Returns a copy with `var` replaced by `replacement` and a new table.
    pub(crate) fn replace_variable(
        &self,
        position: usize,
        replacement: Variable,
        probs: Vec<Rational>,
    ) -> JointDistribution {
        let mut variables = self.variables.clone();
        variables[position] = replacement;
        JointDistribution::from_dense(variables, probs)
    }

    /// Same probability table, ignoring ownership.
    pub fn same_table(&self, other: &JointDistribution) -> bool {
        self.probs == other.probs
            && self.variables.len() == other.variables.len()
            && self
                .variables
                .iter()
                .zip(&other.variables)
                .all(|(a, b)| a.name == b.name && a.alphabet == b.alphabet)
    }

    pub fn to_file(&self) -> DistributionFile {
        DistributionFile {
            variables: self
                .variables
                .iter()
                .map(|v| VariableSpec {
                    name: v.name.clone(),
                    alphabet: v.alphabet.clone(),
                    owner: v.owner,
                })
                .collect(),
            entries: self
                .support()
                .into_iter()
                .map(|(outcome, p)| EntrySpec {
                    outcome: outcome.into_iter().map(str::to_string).collect(),
                    p: format_rational(&p),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &DistributionFile) -> Result<JointDistribution> {
        let variables = file
            .variables
            .iter()
            .map(|v| Variable::new(&v.name, &v.alphabet, v.owner))
            .collect();
        let entries = file
            .entries
            .iter()
            .map(|e| Ok((e.outcome.clone(), parse_rational(&e.p)?)))
            .collect::<Result<Vec<_>>>()?;
        JointDistribution::new(variables, entries)
    }

    pub fn from_json(text: &str) -> Result<JointDistribution> {
        let file: DistributionFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        JointDistribution::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("distribution serializes")
    }
}

impl fmt::Display for JointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header: Vec<String> = self
            .variables
            .iter()
            .map(|v| format!("{}({})", v.name, v.owner))
            .collect();
        writeln!(f, "{} | P", header.join(" "))?;
        for (outcome, p) in self.support() {
            writeln!(f, "{} | {}", outcome.join(" "), format_rational(&p))?;
        }
        Ok(())
    }
}

/// JSON layout of a distribution file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    pub variables: Vec<VariableSpec>,
    pub entries: Vec<EntrySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub alphabet: Vec<String>,
    pub owner: Party,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntrySpec {
    pub outcome: Vec<String>,
    pub p: String,
}

/// Stages of the four-variable example protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Before any processing; Alice holds A and C.
    Initial,
    /// After Alice's CNOT with A as control and C as target.
    AfterAliceCnot,
    /// After C went to Bob and Bob's CNOT with B as control.
    Final,
}

/// Eve's alphabet in the example tables.
pub const EVE_SYMBOLS: [&str; 5] = ["e0", "e01", "e10", "f0", "f1"];

/// Exact table of the example protocol at `stage`, with columns A, B, C, E.
pub fn paper_distribution(stage: Stage) -> JointDistribution {
    let rows: [[&str; 4]; 6] = match stage {
        Stage::Initial => [
            ["0", "0", "0", "e0"],
            ["0", "1", "0", "e01"],
            ["1", "0", "0", "e10"],
            ["1", "1", "0", "e0"],
            ["0", "0", "1", "f0"],
            ["1", "1", "1", "f1"],
        ],
        Stage::AfterAliceCnot => [
            ["0", "0", "0", "e0"],
            ["0", "1", "0", "e01"],
            ["1", "0", "1", "e10"],
            ["1", "1", "1", "e0"],
            ["0", "0", "1", "f0"],
            ["1", "1", "0", "f1"],
        ],
        Stage::Final => [
            ["0", "0", "0", "e0"],
            ["0", "1", "1", "e01"],
            ["1", "0", "1", "e10"],
            ["1", "1", "0", "e0"],
            ["0", "0", "1", "f0"],
            ["1", "1", "1", "f1"],
        ],
    };
    let c_owner = match stage {
        Stage::Final => Party::Bob,
        _ => Party::Alice,
    };
    let variables = vec![
        Variable::binary("A", Party::Alice),
        Variable::binary("B", Party::Bob),
        Variable::binary("C", c_owner),
        Variable::new("E", &EVE_SYMBOLS, Party::Eve),
    ];
    JointDistribution::new(variables, rows.iter().map(|r| (r, rational(1, 6)))).expect("example tables are valid")
}

fn check_variables(variables: &[Variable]) -> Result<()> {
    let mut names = HashSet::new();
    for var in variables {
        var.validate()?;
        if !names.insert(var.name.as_str()) {
            return Err(Error::DuplicateVariable(var.name.clone()));
        }
    }
    Ok(())
}

pub(crate) fn table_size(variables: &[Variable]) -> usize {
    variables.iter().map(|v| v.alphabet.len()).product()
}

fn encode(variables: &[Variable], outcome: &[&str]) -> Result<usize> {
    let mut index = 0;
    for (var, symbol) in variables.iter().zip(outcome) {
        index = index * var.alphabet.len() + var.symbol_index(symbol)?;
    }
    Ok(index)
}

pub(crate) fn compose(variables: &[Variable], digits: &[usize]) -> usize {
    variables
        .iter()
        .zip(digits)
        .fold(0, |acc, (v, &d)| acc * v.alphabet.len() + d)
}

/// Index into the table of the sub-selection `positions`.
pub(crate) fn sub_index(variables: &[Variable], digits: &[usize], positions: &[usize]) -> usize {
    positions
        .iter()
        .fold(0, |acc, &i| acc * variables[i].alphabet.len() + digits[i])
}

/// Odometer increment, last digit fastest.
pub(crate) fn increment(digits: &mut [usize], variables: &[Variable]) {
    for (d, v) in digits.iter_mut().zip(variables).rev() {
        *d += 1;
        if *d < v.alphabet.len() {
            return;
        }
        *d = 0;
    }
}

/// Cardinality-indexed lookup of outcome tuples, handy for tests and reports.
pub fn support_map(dist: &JointDistribution) -> BTreeMap<Vec<String>, Rational> {
    dist.support()
        .into_iter()
        .map(|(o, p)| (o.into_iter().map(str::to_string).collect(), p))
        .collect()
}
