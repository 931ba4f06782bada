//! JSON reports produced by the `lopc` command line tool.
//!
//! Every command returns a [`ReportDocument`]. Apart from the `timings`
//! block, a report is a deterministic function of the command, its input
//! files and the optimizer seed.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::dist::{format_rational, paper_distribution, JointDistribution, Stage};
use crate::error::{Error, Result};
use crate::info;
use crate::intrinsic::{
    apply_channel, certify_zero_cmi, cmi_under_channel, intrinsic_information_upper_bound, Channel, IntrinsicResult,
    OptimizerConfig,
};
use crate::protocol::{self, Check, AC_B_WARNING};
use crate::quantum::{
    apply_cnot, build_paper_state, computational_distribution, fidelity_with_phi_plus, measure_computational,
    partial_transpose_min_eigenvalue, DensityMatrix, PaperState, ABC,
};

pub const TOOL: &str = "lopc";

pub const CARDINALITY_ASSUMPTION: &str =
    "intrinsic information search restricts Eve's processed variable to |Ẽ| = |E| outputs";

pub const PPT_EVIDENCE_NOTE: &str = "positive partial transpose is reported as evidence only: on the 2x4 C-AB cut \
it is necessary but not sufficient for separability, which rests on an external decomposition";

pub const QUBIT_ORDER: &str = "qubits ordered [A, B, C]; A is the most significant bit of the computational index";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    /// SHA-256 over the command echo and the contents of every input file.
    pub inputs_digest: String,
    pub results: Value,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub timings: Timings,
}

impl ReportDocument {
    fn new(command: Vec<String>, inputs: &[&str]) -> Self {
        let mut hasher = Sha256::new();
        for part in command.iter().map(String::as_str).chain(inputs.iter().copied()) {
            hasher.update((part.len() as u64).to_le_bytes());
            hasher.update(part.as_bytes());
        }
        ReportDocument {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            inputs_digest: hex::encode(hasher.finalize()),
            results: Value::Null,
            checks: Vec::new(),
            warnings: Vec::new(),
            timings: Timings { elapsed_ms: 0.0 },
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without its timing block, for reproducibility comparisons.
    pub fn deterministic_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value.as_object_mut().expect("object").remove("timings");
        serde_json::to_string_pretty(&value).expect("report serializes")
    }

    fn finish(mut self, started: Instant) -> Self {
        self.timings.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
        self
    }
}

impl fmt::Display for ReportDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.tool, self.command.join(" "))?;
        for check in &self.checks {
            writeln!(f, "  [{}] {}", if check.passed { "pass" } else { "FAIL" }, check.name)?;
        }
        for warning in &self.warnings {
            writeln!(f, "  warning: {warning}")?;
        }
        write!(f, "  {:.1} ms", self.timings.elapsed_ms)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load_distribution(path: &Path) -> Result<(JointDistribution, String)> {
    let text = read(path)?;
    let dist = JointDistribution::from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    Ok((dist, text))
}

/// Splits a comma-separated list of variable names.
pub fn parse_names(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Twelve digits after the decimal point.
pub fn format_bits(value: f64) -> String {
    format!("{value:.12}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Entropy,
    Mi,
    Cmi,
}

impl Measure {
    fn name(self) -> &'static str {
        match self {
            Measure::Entropy => "entropy",
            Measure::Mi => "mi",
            Measure::Cmi => "cmi",
        }
    }
}

/// Evaluates one information measure on a distribution file.
pub fn cmd_measure(
    dist_path: &Path,
    measure: Measure,
    x: &[String],
    y: &[String],
    given: &[String],
) -> Result<ReportDocument> {
    let started = Instant::now();
    let (dist, text) = load_distribution(dist_path)?;
    let mut command = vec![
        "measure".to_string(),
        format!("--measure={}", measure.name()),
        format!("--x={}", x.join(",")),
    ];
    if measure != Measure::Entropy {
        command.push(format!("--y={}", y.join(",")));
    }
    if measure == Measure::Cmi {
        command.push(format!("--given={}", given.join(",")));
    }
    let mut report = ReportDocument::new(command, &[&text]);
    let value = match measure {
        Measure::Entropy => info::entropy(&dist, x)?,
        Measure::Mi => info::mutual_information(&dist, x, y)?,
        Measure::Cmi => info::conditional_mutual_information(&dist, x, y, given)?,
    };
    report.results = json!({
        "measure": measure.name(),
        "x": x,
        "y": y,
        "given": given,
        "bits": value,
        "formatted": format_bits(value),
    });
    Ok(report.finish(started))
}

fn intrinsic_json(result: &IntrinsicResult) -> Value {
    json!({
        "value": result.value,
        "formatted": format_bits(result.value),
        "certified_zero": result.certified_zero,
        "channel": {
            "input": result.channel.input,
            "output": result.channel.output,
            "rows": result.channel.rows,
        },
        "witness": result.witness.as_ref().map(Channel::to_file),
        "restarts_used": result.restarts_used,
        "converged": result.converged,
        "deterministic_maps": result.deterministic_maps,
        "identity_value": result.identity_value,
        "constant_value": result.constant_value,
    })
}

fn bound_checks(result: &IntrinsicResult) -> Vec<Check> {
    vec![
        Check::new(
            "intrinsic value <= I(x:y|E) + 1e-9",
            result.value <= result.identity_value + 1e-9,
            json!({ "value": result.value, "identity": result.identity_value }),
        ),
        Check::new(
            "intrinsic value <= I(x:y) + 1e-9",
            result.value <= result.constant_value + 1e-9,
            json!({ "value": result.value, "constant": result.constant_value }),
        ),
    ]
}

/// Certifies a witness channel, or runs the channel search when none is given.
pub fn cmd_intrinsic(
    dist_path: &Path,
    x: &[String],
    y: &[String],
    eve: &str,
    witness_path: Option<&Path>,
    config: &OptimizerConfig,
) -> Result<ReportDocument> {
    let started = Instant::now();
    let (dist, text) = load_distribution(dist_path)?;
    let mut command = vec![
        "intrinsic".to_string(),
        format!("--x={}", x.join(",")),
        format!("--y={}", y.join(",")),
        format!("--eve={eve}"),
    ];
    let witness_text = witness_path.map(read).transpose()?;
    let mut inputs = vec![text.as_str()];
    match &witness_text {
        Some(w) => inputs.push(w),
        None => {
            command.push(format!("--restarts={}", config.restarts));
            command.push(format!("--seed={}", config.seed));
        }
    }
    let mut report = ReportDocument::new(command, &inputs);
    report.warnings.push(CARDINALITY_ASSUMPTION.to_string());

    match witness_text {
        Some(w) => {
            let channel = Channel::from_json(&w)?;
            let value = cmi_under_channel(&dist, x, y, eve, &channel)?;
            let processed = apply_channel(&dist, eve, &channel)?;
            let certified = certify_zero_cmi(&processed, x, y, &[eve])?;
            report.results = json!({
                "mode": "witness",
                "value": if certified { 0.0 } else { value },
                "cmi_under_channel": value,
                "formatted": format_bits(if certified { 0.0 } else { value }),
                "certified_zero": certified,
                "channel": channel.to_file(),
            });
            report.checks.push(Check::new(
                "witness channel certifies zero conditional mutual information",
                certified,
                json!({ "cmi_under_channel": value }),
            ));
        }
        None => {
            let result = intrinsic_information_upper_bound(&dist, x, y, eve, config)?;
            report.results = intrinsic_json(&result);
            report.results["mode"] = json!("search");
            report.checks.extend(bound_checks(&result));
        }
    }
    Ok(report.finish(started))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantumCheck {
    All,
    Ppt,
    CnotChain,
    Distill,
    Diag,
}

impl QuantumCheck {
    fn name(self) -> &'static str {
        match self {
            QuantumCheck::All => "all",
            QuantumCheck::Ppt => "ppt",
            QuantumCheck::CnotChain => "cnot-chain",
            QuantumCheck::Distill => "distill",
            QuantumCheck::Diag => "diag",
        }
    }

    fn includes(self, other: QuantumCheck) -> bool {
        self == QuantumCheck::All || self == other
    }
}

fn state_name(which: PaperState) -> &'static str {
    match which {
        PaperState::RhoInitial => "rho_initial",
        PaperState::SigmaMid => "sigma_mid",
        PaperState::TauFinal => "tau_final",
    }
}

fn state_diagnostics(state: &DensityMatrix) -> Result<Value> {
    let eigenvalues = state.eigenvalues()?;
    let mut cuts = serde_json::Map::new();
    for cut in ABC {
        cuts.insert(cut.to_string(), json!(partial_transpose_min_eigenvalue(state, &[cut])?));
    }
    Ok(json!({
        "trace": state.trace(),
        "min_eigenvalue": eigenvalues[0],
        "purity": state.purity(),
        "hermiticity_error": state.matrix().hermiticity_error(),
        "pt_min_eigenvalue": cuts,
    }))
}

/// Runs the selected quantum checks and returns their results and checks.
pub fn quantum_section(check: QuantumCheck) -> Result<(Value, Vec<Check>, Vec<String>)> {
    let mut results = serde_json::Map::new();
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let rho = build_paper_state(PaperState::RhoInitial);
    let sigma = build_paper_state(PaperState::SigmaMid);
    let tau = build_paper_state(PaperState::TauFinal);
    results.insert("qubit_order".into(), json!(QUBIT_ORDER));

    let mut states = serde_json::Map::new();
    for (which, state) in [
        (PaperState::RhoInitial, &rho),
        (PaperState::SigmaMid, &sigma),
        (PaperState::TauFinal, &tau),
    ] {
        states.insert(state_name(which).into(), state_diagnostics(state)?);
    }
    results.insert("states".into(), Value::Object(states));

    if check.includes(QuantumCheck::CnotChain) {
        let sigma_from_rho = apply_cnot(&rho, "A", "C")?;
        let tau_from_sigma = apply_cnot(&sigma, "B", "C")?;
        let first = sigma_from_rho.matrix().max_abs_diff(sigma.matrix());
        let second = tau_from_sigma.matrix().max_abs_diff(tau.matrix());
        results.insert(
            "cnot_chain".into(),
            json!({ "rho_to_sigma": first, "sigma_to_tau": second }),
        );
        checks.push(Check::new(
            "CNOT(A->C) maps rho to sigma within 1e-12",
            first <= 1e-12,
            json!(first),
        ));
        checks.push(Check::new(
            "CNOT(B->C) maps sigma to tau within 1e-12",
            second <= 1e-12,
            json!(second),
        ));
    }

    if check.includes(QuantumCheck::Ppt) {
        warnings.push(PPT_EVIDENCE_NOTE.to_string());
        for cut in ABC {
            let v = partial_transpose_min_eigenvalue(&rho, &[cut])?;
            checks.push(Check::new(
                &format!("rho is PPT on cut {{{cut}}}"),
                v >= -1e-12,
                json!(v),
            ));
        }
        let v = partial_transpose_min_eigenvalue(&sigma, &["C"])?;
        checks.push(Check::new("sigma is PPT on cut {C}", v >= -1e-12, json!(v)));
    }

    if check.includes(QuantumCheck::Distill) {
        let outcomes = measure_computational(&tau, "C")?;
        let mut table = Vec::new();
        for o in &outcomes {
            table.push(json!({
                "outcome": o.outcome,
                "probability": o.probability,
                "fidelity_phi_plus": fidelity_with_phi_plus(&o.post_state)?,
            }));
        }
        results.insert("measurement_C".into(), json!(table));
        let zero = outcomes.iter().find(|o| o.outcome == 0);
        let p0 = zero.map_or(0.0, |o| o.probability);
        let fidelity = zero
            .map(|o| fidelity_with_phi_plus(&o.post_state))
            .transpose()?
            .unwrap_or(0.0);
        checks.push(Check::new(
            "P(C=0) on tau is 1/3 within 1e-12",
            (p0 - 1.0 / 3.0).abs() <= 1e-12,
            json!(p0),
        ));
        checks.push(Check::new(
            "post-measurement state at C=0 has fidelity 1 with Phi+ within 1e-12",
            (fidelity - 1.0).abs() <= 1e-12,
            json!(fidelity),
        ));
    }

    if check.includes(QuantumCheck::Diag) {
        let cd = computational_distribution(&rho);
        let classical = paper_distribution(Stage::Initial).marginal(&ABC)?;
        let matches = cd.distribution.as_ref().is_some_and(|d| d.same_table(&classical));
        results.insert(
            "computational_distribution_rho".into(),
            json!({
                "probabilities": cd.probabilities,
                "exact": cd.exact,
                "rational": cd.distribution.as_ref().map(|d| d.to_file()),
            }),
        );
        checks.push(Check::new(
            "computational statistics of rho equal the A,B,C marginal of the initial table",
            matches,
            json!(null),
        ));
    }
    Ok((Value::Object(results), checks, warnings))
}

pub fn cmd_quantum(check: QuantumCheck) -> Result<ReportDocument> {
    let started = Instant::now();
    let mut report = ReportDocument::new(vec!["quantum".into(), format!("--check={}", check.name())], &[]);
    let (results, checks, warnings) = quantum_section(check)?;
    report.results = results;
    report.checks = checks;
    report.warnings = warnings;
    Ok(report.finish(started))
}

/// Full reproduction: the classical protocol trace, intrinsic information on
/// the three tables, the quantum chain and the untrusted courier.
pub fn cmd_reproduce(config: &OptimizerConfig) -> Result<ReportDocument> {
    let started = Instant::now();
    let mut report = ReportDocument::new(
        vec![
            "reproduce".into(),
            format!("--restarts={}", config.restarts),
            format!("--seed={}", config.seed),
        ],
        &[],
    );

    let trace = protocol::trace_paper_protocol()?;
    let verdict = {
        let last = trace.current();
        protocol::is_perfect_sbit(last, "A", "B", &["E"])?
    };
    report.checks.extend(trace.checks().cloned());
    report.warnings.extend(trace.warnings.iter().cloned());

    let initial = paper_distribution(Stage::Initial);
    let mid = paper_distribution(Stage::AfterAliceCnot);
    let fin = paper_distribution(Stage::Final);
    let ac_b = info::conditional_mutual_information(&initial, &["A", "C"], &["B"], &["E"])?;
    let ab_c = info::conditional_mutual_information(&mid, &["A", "B"], &["C"], &["E"])?;
    report.checks.push(Check::new(
        "raw I(AC:B|E) on the initial table is 1/3 within 1e-9",
        (ac_b - 1.0 / 3.0).abs() <= 1e-9,
        json!(ac_b),
    ));
    report.checks.push(Check::new(
        "raw I(AB:C|E) on the mid table is 1/3 within 1e-9",
        (ab_c - 1.0 / 3.0).abs() <= 1e-9,
        json!(ab_c),
    ));
    if !report.warnings.iter().any(|w| w == AC_B_WARNING) {
        report.warnings.push(AC_B_WARNING.to_string());
    }
    report.warnings.push(CARDINALITY_ASSUMPTION.to_string());

    let search_initial = intrinsic_information_upper_bound(&initial, &["A", "C"], &["B"], "E", config)?;
    let search_mid = intrinsic_information_upper_bound(&mid, &["A", "B"], &["C"], "E", config)?;
    let search_final = intrinsic_information_upper_bound(&fin, &["A"], &["B", "C"], "E", config)?;
    report.checks.push(Check::new(
        "search certifies I(AC:B↓E) = 0 on the initial table",
        search_initial.certified_zero,
        json!(search_initial.value),
    ));
    report.checks.push(Check::new(
        "search certifies I(AB:C↓E) = 0 on the mid table",
        search_mid.certified_zero,
        json!(search_mid.value),
    ));
    let rate = crate::dist::rational_to_f64(&trace.success_probability);
    report.checks.push(Check::new(
        "I(A:BC↓E) on the final table is 1/3 within 1e-6, matching the distilled rate",
        (search_final.value - 1.0 / 3.0).abs() <= 1e-6 && search_final.value + 1e-6 >= rate,
        json!({ "intrinsic": search_final.value, "protocol_rate": rate }),
    ));

    let (quantum, quantum_checks, quantum_warnings) = quantum_section(QuantumCheck::All)?;
    report.checks.extend(quantum_checks);
    report.warnings.extend(quantum_warnings);

    let courier = protocol::untrusted_courier_demo()?;
    report.checks.push(Check::new(
        "courier: uniform key, zero leakage to Eve and Charlie, 1 bit under collusion",
        courier.passed(),
        json!(null),
    ));

    report.results = json!({
        "protocol": trace.to_json(),
        "success_probability": format_rational(&trace.success_probability),
        "sbit": verdict,
        "information": {
            "I(AC:B|E) initial": ac_b,
            "I(AB:C|E) mid": ab_c,
            "I(AC:B↓E) initial": intrinsic_json(&search_initial),
            "I(AB:C↓E) mid": intrinsic_json(&search_mid),
            "I(A:BC↓E) final": intrinsic_json(&search_final),
        },
        "quantum": quantum,
        "courier": courier.to_json(),
    });
    Ok(report.finish(started))
}
