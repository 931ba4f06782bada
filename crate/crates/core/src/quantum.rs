//! Density matrices over labeled qubits.
//!
//! The first label is the most significant bit of the computational index,
//! so for labels `[A, B, C]` the basis state `|abc>` sits at `4a + 2b + c`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dist::{rational, JointDistribution, Party, Rational, Variable};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = -1e-10;
/// Outcomes less likely than this are dropped from measurement results.
pub const NEGLIGIBLE_OUTCOME: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<String>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new<S: AsRef<str>>(labels: &[S], matrix: ComplexMatrix) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::InvalidState("duplicate qubit labels".into()));
        }
        if matrix.dim() != 1 << labels.len() {
            return Err(Error::WrongDimension {
                expected: 1 << labels.len(),
                got: matrix.dim(),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = matrix.hermiticity_error();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm:e})")));
        }
        let trace = matrix.trace();
        if (trace - Complex64::one()).norm() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {trace}")));
        }
        let min = matrix.hermitian_eigenvalues()?[0];
        if min < PSD_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { labels, matrix })
    }

    pub fn from_pure<S: AsRef<str>>(labels: &[S], amplitudes: &[Complex64]) -> Result<Self> {
        DensityMatrix::new(labels, ComplexMatrix::outer(amplitudes))
    }

    /// `1/d` times the identity.
    pub fn maximally_mixed<S: AsRef<str>>(labels: &[S]) -> Self {
        let d = 1 << labels.len();
        DensityMatrix::new(labels, ComplexMatrix::identity(d).scale(1.0 / d as f64)).expect("valid state")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.matrix.hermitian_eigenvalues()
    }

    /// Bit position (from the least significant end) of a qubit.
    fn shift(&self, label: &str) -> Result<usize> {
        let i = self
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownQubit(label.to_string()))?;
        Ok(self.labels.len() - 1 - i)
    }
}

pub fn phi_plus() -> Vec<Complex64> {
    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    vec![a, Complex64::zero(), Complex64::zero(), a]
}

/// States of the three-qubit example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaperState {
    /// Fully separable starting state; Alice holds A and C.
    RhoInitial,
    /// After Alice's CNOT from A onto C.
    SigmaMid,
    /// After Bob's CNOT from B onto C.
    TauFinal,
}

pub const ABC: [&str; 3] = ["A", "B", "C"];

fn ket(bits: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::zero(); 8];
    v[bits] = Complex64::one();
    v
}

/// `(|0> + e^{i pi k / 2} |1>) / sqrt 2`.
fn psi(k: i32) -> [Complex64; 2] {
    let phase = Complex64::from_polar(1.0, PI * k as f64 / 2.0);
    [Complex64::new(FRAC_1_SQRT_2, 0.0), phase * FRAC_1_SQRT_2]
}

pub fn build_paper_state(which: PaperState) -> DensityMatrix {
    let sixth = 1.0 / 6.0;
    let mut m = ComplexMatrix::zeros(8);
    match which {
        PaperState::RhoInitial => {
            for k in 0..4 {
                let (a, b) = (psi(k), psi(-k));
                // |psi_k> (x) |psi_-k> (x) |0>
                let mut v = vec![Complex64::zero(); 8];
                for (i, ai) in a.iter().enumerate() {
                    for (j, bj) in b.iter().enumerate() {
                        v[4 * i + 2 * j] = ai * bj;
                    }
                }
                m = &m + &ComplexMatrix::outer(&v).scale(sixth);
            }
            for i in 0..2 {
                m = &m + &ComplexMatrix::outer(&ket(4 * i + 2 * i + 1)).scale(sixth);
            }
        }
        PaperState::SigmaMid => {
            let mut ghz = vec![Complex64::zero(); 8];
            ghz[0b000] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            ghz[0b111] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            m = ComplexMatrix::outer(&ghz).scale(1.0 / 3.0);
            for bits in [0b001, 0b010, 0b101, 0b110] {
                m = &m + &ComplexMatrix::outer(&ket(bits)).scale(sixth);
            }
        }
        PaperState::TauFinal => {
            let phi = phi_plus();
            let mut v = vec![Complex64::zero(); 8];
            for (ab, amp) in phi.iter().enumerate() {
                v[2 * ab] = *amp;
            }
            m = ComplexMatrix::outer(&v).scale(1.0 / 3.0);
            // (2/3) (1_AB / 4) (x) |1><1|
            for ab in 0..4 {
                m = &m + &ComplexMatrix::outer(&ket(2 * ab + 1)).scale(2.0 / 3.0 / 4.0);
            }
        }
    }
    DensityMatrix::new(&ABC, m).expect("example states are valid")
}

/// `U rho U^dagger` for the CNOT with the given control and target.
pub fn apply_cnot(state: &DensityMatrix, control: &str, target: &str) -> Result<DensityMatrix> {
    if control == target {
        return Err(Error::SameQubit(control.to_string()));
    }
    let c = state.shift(control)?;
    let t = state.shift(target)?;
    let flip = |i: usize| if (i >> c) & 1 == 1 { i ^ (1 << t) } else { i };
    let n = state.dim();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(flip(i), flip(j))] = state.matrix[(i, j)];
        }
    }
    Ok(DensityMatrix {
        labels: state.labels.clone(),
        matrix: out,
    })
}

/// Transposes the indices of the qubits in `subsystem`.
pub fn partial_transpose<S: AsRef<str>>(state: &DensityMatrix, subsystem: &[S]) -> Result<ComplexMatrix> {
    if subsystem.is_empty() || subsystem.len() >= state.labels.len() {
        return Err(Error::EmptyOrFullSubsystem);
    }
    let mut mask = 0usize;
    for label in subsystem {
        mask |= 1 << state.shift(label.as_ref())?;
    }
    if mask.count_ones() as usize == state.labels.len() {
        return Err(Error::EmptyOrFullSubsystem);
    }
    let n = state.dim();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            // swap the masked bits between row and column
            let ii = (i & !mask) | (j & mask);
            let jj = (j & !mask) | (i & mask);
            out[(ii, jj)] = state.matrix[(i, j)];
        }
    }
    Ok(out)
}

pub fn partial_transpose_min_eigenvalue<S: AsRef<str>>(state: &DensityMatrix, subsystem: &[S]) -> Result<f64> {
    Ok(partial_transpose(state, subsystem)?.hermitian_eigenvalues()?[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub outcome: u8,
    pub probability: f64,
    /// State of the remaining qubits.
    pub post_state: DensityMatrix,
}

/// Projective measurement of one qubit in the computational basis.
pub fn measure_computational(state: &DensityMatrix, qubit: &str) -> Result<Vec<MeasurementOutcome>> {
    let s = state.shift(qubit)?;
    let labels: Vec<String> = state.labels.iter().filter(|l| *l != qubit).cloned().collect();
    let n = state.dim();
    let reduce = |i: usize| ((i >> (s + 1)) << s) | (i & ((1 << s) - 1));
    let mut results = Vec::new();
    for outcome in 0..2u8 {
        let mut block = ComplexMatrix::zeros(n / 2);
        for i in (0..n).filter(|i| (i >> s) & 1 == outcome as usize) {
            for j in (0..n).filter(|j| (j >> s) & 1 == outcome as usize) {
                block[(reduce(i), reduce(j))] = state.matrix[(i, j)];
            }
        }
        let probability = block.trace().re;
        if probability < NEGLIGIBLE_OUTCOME {
            continue;
        }
        let post_state = DensityMatrix {
            labels: labels.clone(),
            matrix: block.scale(1.0 / probability),
        };
        results.push(MeasurementOutcome {
            outcome,
            probability,
            post_state,
        });
    }
    Ok(results)
}

/// `<Phi+| rho |Phi+>` for a two-qubit state.
pub fn fidelity_with_phi_plus(state: &DensityMatrix) -> Result<f64> {
    if state.dim() != 4 {
        return Err(Error::WrongDimension {
            expected: 4,
            got: state.dim(),
        });
    }
    Ok(state.matrix.expectation(&phi_plus()).re)
}

/// Computational-basis statistics of a state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputationalDistribution {
    /// Diagonal entries in index order.
    pub probabilities: Vec<f64>,
    /// Exact distribution when every entry rationalized within 1e-12.
    #[serde(skip)]
    pub distribution: Option<JointDistribution>,
    pub exact: bool,
}

/// One binary variable per qubit, with probabilities from the diagonal.
/// Qubit `B` is assigned to Bob, every other qubit to Alice.
pub fn computational_distribution(state: &DensityMatrix) -> ComputationalDistribution {
    let probabilities: Vec<f64> = state.matrix.diagonal().iter().map(|z| z.re).collect();
    let variables: Vec<Variable> = state
        .labels
        .iter()
        .map(|l| Variable::binary(l, if l == "B" { Party::Bob } else { Party::Alice }))
        .collect();
    let exact: Option<Vec<Rational>> = probabilities.iter().map(|&p| rationalize(p, 1e-12)).collect();
    let distribution = exact.and_then(|probs| {
        let n = state.labels.len();
        let entries = probs.into_iter().enumerate().map(|(index, p)| {
            let outcome: Vec<&str> = (0..n)
                .map(|k| if (index >> (n - 1 - k)) & 1 == 1 { "1" } else { "0" })
                .collect();
            (outcome, p)
        });
        JointDistribution::new(variables, entries).ok()
    });
    ComputationalDistribution {
        probabilities,
        exact: distribution.is_some(),
        distribution,
    }
}

/// Best rational approximation with denominator up to 10^6, accepted only
/// within `tolerance` of `x`.
pub fn rationalize(x: f64, tolerance: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    const MAX_DEN: i128 = 1_000_000;
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > MAX_DEN {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64 / k1 as f64) - x).abs() <= tolerance {
            return Some(rational(h1, k1));
        }
        let frac = rest - a as f64;
        if frac == 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    (k1 != 0 && ((h1 as f64 / k1 as f64) - x).abs() <= tolerance).then(|| rational(h1, k1))
}
