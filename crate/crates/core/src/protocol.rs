//! Protocols built from local operations, private sends and public
//! post-selection, recorded step by step in a [`ProtocolTrace`].

use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dist::{
    format_rational, paper_distribution, rational, JointDistribution, Party, Rational, Stage, Variable, EVE_SYMBOLS,
};
use crate::error::{Error, Result};
use crate::info;
use crate::intrinsic::{apply_channel, certify_zero_cmi, cmi_under_channel, Channel};

/// Logged whenever the example protocol post-selects.
pub const POSTSELECT_WARNING: &str = "post-selection keeps C = 0: the written protocol keeps runs with C = 1, \
but the kept table (C = 0, E = e0), the success probability 1/3 = P(C=0) and the quantum analog all correspond \
to C = 0";

/// Logged whenever the A C vs B cut of the initial table is evaluated.
pub const AC_B_WARNING: &str = "the initial table is claimed to satisfy \"I(AC:B|E)=0\"; direct computation gives \
I(AC:B|E) = 1/3, while I(AC:B↓E) = 0 holds via the channel merging e01, e10 into e0";

/// Logged with the witness channel on the mid table.
pub const WITNESS_CUT_WARNING: &str = "after the witness channel the mid table is claimed to have \"I(A:B|E)=0\"; \
direct computation gives I(A:B|Ẽ) = 2/3 while I(AB:C|Ẽ) = 0, so the zero is reported for the C-AB cut";

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum ProtocolStep {
    LocalFunction {
        party: Party,
        target: String,
        inputs: Vec<String>,
        function: String,
    },
    PrivateSend {
        var: String,
        from: Party,
        to: Party,
    },
    /// `kept` is announced publicly; the run is aborted otherwise.
    PostSelect {
        var: String,
        kept: String,
        probability: String,
        announcement: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: Value) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub step: ProtocolStep,
    pub distribution: JointDistribution,
    pub checks: Vec<Check>,
}

/// Ordered record of a protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTrace {
    pub initial: JointDistribution,
    /// Checks on the initial distribution, before any step.
    pub initial_checks: Vec<Check>,
    pub entries: Vec<TraceEntry>,
    /// Product of the post-selection probabilities.
    pub success_probability: Rational,
    pub witness: Option<Channel>,
    pub warnings: Vec<String>,
}

impl ProtocolTrace {
    pub fn new(initial: JointDistribution) -> Self {
        ProtocolTrace {
            initial,
            initial_checks: Vec::new(),
            entries: Vec::new(),
            success_probability: Rational::one(),
            witness: None,
            warnings: Vec::new(),
        }
    }

    pub fn current(&self) -> &JointDistribution {
        self.entries.last().map_or(&self.initial, |e| &e.distribution)
    }

    pub fn cnot(&mut self, party: Party, control: &str, target: &str) -> Result<&JointDistribution> {
        let next = cnot_step(self.current(), party, control, target)?;
        self.push(
            ProtocolStep::LocalFunction {
                party,
                target: target.to_string(),
                inputs: vec![control.to_string(), target.to_string()],
                function: format!("{target} := {control} XOR {target}"),
            },
            next,
        )
    }

    pub fn send(&mut self, var: &str, from: Party, to: Party) -> Result<&JointDistribution> {
        let next = private_send(self.current(), var, from, to)?;
        self.push(
            ProtocolStep::PrivateSend {
                var: var.to_string(),
                from,
                to,
            },
            next,
        )
    }

    pub fn postselect(&mut self, var: &str, keep: &str) -> Result<&JointDistribution> {
        let (next, p) = postselect(self.current(), var, keep)?;
        self.success_probability *= p;
        self.push(
            ProtocolStep::PostSelect {
                var: var.to_string(),
                kept: keep.to_string(),
                probability: format_rational(&p),
                announcement: "accept/reject".to_string(),
            },
            next,
        )
    }

    /// Attaches a check to the latest step, or to the initial distribution
    /// when no step has run yet.
    pub fn check(&mut self, check: Check) {
        match self.entries.last_mut() {
            Some(entry) => entry.checks.push(check),
            None => self.initial_checks.push(check),
        }
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.initial_checks
            .iter()
            .chain(self.entries.iter().flat_map(|e| &e.checks))
    }

    pub fn all_passed(&self) -> bool {
        self.checks().all(|c| c.passed)
    }

    fn push(&mut self, step: ProtocolStep, distribution: JointDistribution) -> Result<&JointDistribution> {
        self.entries.push(TraceEntry {
            step,
            distribution,
            checks: Vec::new(),
        });
        Ok(&self.entries.last().expect("just pushed").distribution)
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "step": e.step,
                    "distribution": e.distribution.to_file(),
                    "checks": e.checks,
                })
            })
            .collect();
        json!({
            "initial": self.initial.to_file(),
            "initial_checks": self.initial_checks,
            "steps": steps,
            "success_probability": format_rational(&self.success_probability),
            "witness_channel": self.witness.as_ref().map(Channel::to_file),
            "warnings": self.warnings,
        })
    }
}

fn require_binary(dist: &JointDistribution, name: &str) -> Result<()> {
    if dist.variable(name)?.is_binary() {
        Ok(())
    } else {
        Err(Error::NonBinaryAlphabet(name.to_string()))
    }
}

/// `target := control XOR target`, applied by `party`.
pub fn cnot_step(dist: &JointDistribution, party: Party, control: &str, target: &str) -> Result<JointDistribution> {
    require_binary(dist, control)?;
    require_binary(dist, target)?;
    dist.apply_local_function(party, target, &[control, target], |s| {
        Some(if s[0] == s[1] { "0" } else { "1" }.to_string())
    })
}

/// Moves `var` from `from` to `to` over the private channel.
pub fn private_send(dist: &JointDistribution, var: &str, from: Party, to: Party) -> Result<JointDistribution> {
    dist.transfer_ownership(var, from, to)
}

/// Keeps only runs with `var = keep`, returning the conditioned distribution
/// and the acceptance probability.
pub fn postselect(dist: &JointDistribution, var: &str, keep: &str) -> Result<(JointDistribution, Rational)> {
    dist.condition(var, keep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SbitVerdict {
    pub is_sbit: bool,
    pub correlation_ok: bool,
    pub uniformity_ok: bool,
    pub eve_independent: bool,
}

/// Exact test that `a` and `b` form one perfect secret bit against `eve_vars`.
pub fn is_perfect_sbit<S: AsRef<str>>(
    dist: &JointDistribution,
    a: &str,
    b: &str,
    eve_vars: &[S],
) -> Result<SbitVerdict> {
    require_binary(dist, a)?;
    require_binary(dist, b)?;
    let ab = dist.marginal(&[a, b])?;
    let a_first = ab.index_of(a)? == 0;
    let p = |x: &str, y: &str| {
        let outcome = if a_first { [x, y] } else { [y, x] };
        ab.prob(&outcome)
    };
    let correlation_ok = (p("0", "0")? + p("1", "1")?).is_one();
    let uniformity_ok = p("0", "0")? + p("0", "1")? == rational(1, 2);
    let eve_independent = if eve_vars.is_empty() {
        true
    } else {
        let eve: Vec<&str> = eve_vars.iter().map(AsRef::as_ref).collect();
        certify_zero_cmi(dist, &[a, b], &eve, &[] as &[&str])?
    };
    Ok(SbitVerdict {
        is_sbit: correlation_ok && uniformity_ok && eve_independent,
        correlation_ok,
        uniformity_ok,
        eve_independent,
    })
}

/// Runs the four-variable protocol: Alice's CNOT, the intrinsic check on the
/// C vs AB cut, the private send of C, Bob's CNOT, post-selection on C = 0
/// and the secret-bit check. Any failed embedded check is an error.
pub fn run_paper_protocol() -> Result<ProtocolTrace> {
    let trace = trace_paper_protocol()?;
    if let Some(failed) = trace.checks().find(|c| !c.passed) {
        return Err(Error::InternalCheckFailed(failed.name.clone()));
    }
    Ok(trace)
}

/// Same steps as [`run_paper_protocol`], but failed checks stay in the trace.
pub fn trace_paper_protocol() -> Result<ProtocolTrace> {
    let mut trace = ProtocolTrace::new(paper_distribution(Stage::Initial));
    trace.warnings.push(AC_B_WARNING.to_string());
    trace.warnings.push(WITNESS_CUT_WARNING.to_string());
    trace.warnings.push(POSTSELECT_WARNING.to_string());

    let initial = trace.initial.clone();
    let ac_b = info::conditional_mutual_information(&initial, &["A", "C"], &["B"], &["E"])?;
    let cross = Channel::merging(&EVE_SYMBOLS, &[("e01", "e0"), ("e10", "e0")])?;
    let ac_b_zero = certify_zero_cmi(&apply_channel(&initial, "E", &cross)?, &["A", "C"], &["B"], &["E"])?;
    trace.check(Check::new(
        "initial: I(AC:B|E) computed",
        true,
        json!({ "bits": ac_b, "claimed_zero": true }),
    ));
    trace.check(Check::new(
        "initial: I(AC:B↓E) = 0 certified via e01,e10 -> e0",
        ac_b_zero,
        json!({ "witness": cross.to_file() }),
    ));

    let mid = trace.cnot(Party::Alice, "A", "C")?.clone();
    let expected_mid = paper_distribution(Stage::AfterAliceCnot);
    trace.check(Check::new(
        "after Alice's CNOT: equals the mid table",
        mid == expected_mid,
        json!(null),
    ));
    let witness = Channel::merging(&EVE_SYMBOLS, &[("f0", "e0"), ("f1", "e0")])?;
    let processed = apply_channel(&mid, "E", &witness)?;
    let certified = certify_zero_cmi(&processed, &["A", "B"], &["C"], &["E"])?;
    let ab_c_raw = info::conditional_mutual_information(&mid, &["A", "B"], &["C"], &["E"])?;
    let ab_c_witness = cmi_under_channel(&mid, &["A", "B"], &["C"], "E", &witness)?;
    let a_b_witness = info::conditional_mutual_information(&processed, &["A"], &["B"], &["E"])?;
    trace.check(Check::new(
        "after Alice's CNOT: I(AB:C↓E) = 0 certified via f0,f1 -> e0",
        certified,
        json!({
            "I(AB:C|E)": ab_c_raw,
            "I(AB:C|E~)": ab_c_witness,
            "I(A:B|E~)": a_b_witness,
        }),
    ));
    trace.witness = Some(witness);

    trace.send("C", Party::Alice, Party::Bob)?;
    let fin = trace.cnot(Party::Bob, "B", "C")?.clone();
    trace.check(Check::new(
        "after Bob's CNOT: equals the final table",
        fin == paper_distribution(Stage::Final),
        json!(null),
    ));

    let kept = trace.postselect("C", "0")?.clone();
    let success = trace.success_probability;
    trace.check(Check::new(
        "post-selection succeeds with probability 1/3",
        success == rational(1, 3),
        json!({ "probability": format_rational(&success) }),
    ));
    let verdict = is_perfect_sbit(&kept, "A", "B", &["E"])?;
    trace.check(Check::new(
        "kept distribution is a perfect sbit",
        verdict.is_sbit,
        json!(verdict),
    ));
    let rate = success * Rational::from_integer(i128::from(verdict.is_sbit));
    trace.check(Check::new(
        "key rate: 1/3 sbit per run",
        rate == rational(1, 3),
        json!({ "sbits_per_run": format_rational(&rate) }),
    ));

    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CourierReport {
    pub key_uniform: bool,
    pub keys_agree: bool,
    /// `I(K_A : S)`, Eve's view.
    pub eve_cmi: f64,
    /// `I(K_A : R)`, the courier's view.
    pub charlie_cmi: f64,
    pub eve_certified_zero: bool,
    pub charlie_certified_zero: bool,
    /// `I(K_A : S, R)` if Eve and Charlie pool their views.
    pub collusion_mi: f64,
    pub distribution: JointDistribution,
}

impl CourierReport {
    pub fn passed(&self) -> bool {
        self.key_uniform
            && self.keys_agree
            && self.eve_certified_zero
            && self.charlie_certified_zero
            && (self.collusion_mi - 1.0).abs() < 1e-12
    }

    pub fn to_json(&self) -> Value {
        json!({
            "key_uniform": self.key_uniform,
            "keys_agree": self.keys_agree,
            "eve_cmi": self.eve_cmi,
            "charlie_cmi": self.charlie_cmi,
            "eve_certified_zero": self.eve_certified_zero,
            "charlie_certified_zero": self.charlie_certified_zero,
            "collusion_mi": self.collusion_mi,
            "distribution": self.distribution.to_file(),
        })
    }
}

/// Key distribution through an untrusted courier.
///
/// `S` is a public uniform bit known to Alice, Bob and Eve. Alice draws a
/// fresh uniform bit `R`, which Charlie carries to Bob. Both keys are
/// `S XOR R`. Eve sees only `S`, Charlie only `R`.
pub fn untrusted_courier_demo() -> Result<CourierReport> {
    let quarter = rational(1, 4);
    let start = JointDistribution::new(
        vec![
            Variable::binary("S", Party::Alice),
            Variable::binary("R", Party::Alice),
            Variable::binary("KA", Party::Alice),
            Variable::binary("KB", Party::Bob),
            Variable::binary("RB", Party::Bob),
            Variable::binary("SB", Party::Bob),
        ],
        [["0", "0"], ["0", "1"], ["1", "0"], ["1", "1"]]
            .iter()
            .map(|[s, r]| ([*s, *r, "0", "0", "0", *s], quarter)),
    )?;
    let xor = |s: &[&str]| Some(if s[0] == s[1] { "0" } else { "1" }.to_string());
    let with_key = start.apply_local_function(Party::Alice, "KA", &["S", "R"], xor)?;
    // Charlie carries R; Bob's copy RB is what arrives.
    let carried = with_key.transfer_ownership("R", Party::Alice, Party::Charlie)?;
    let delivered = carried
        .transfer_ownership("RB", Party::Bob, Party::Charlie)?
        .apply_local_function(Party::Charlie, "RB", &["R"], |s| Some(s[0].to_string()))?
        .transfer_ownership("RB", Party::Charlie, Party::Bob)?;
    let dist = delivered.apply_local_function(Party::Bob, "KB", &["SB", "RB"], xor)?;

    let key = dist.marginal(&["KA"])?;
    let key_uniform = key.prob(&["0"])? == rational(1, 2) && key.prob(&["1"])? == rational(1, 2);
    let ka_kb = dist.marginal(&["KA", "KB"])?;
    let keys_agree = (ka_kb.prob(&["0", "0"])? + ka_kb.prob(&["1", "1"])?).is_one();
    let none: &[&str] = &[];
    Ok(CourierReport {
        key_uniform,
        keys_agree,
        eve_cmi: info::mutual_information(&dist, &["KA"], &["S"])?,
        charlie_cmi: info::mutual_information(&dist, &["KA"], &["R"])?,
        eve_certified_zero: certify_zero_cmi(&dist, &["KA"], &["S"], none)?,
        charlie_certified_zero: certify_zero_cmi(&dist, &["KA"], &["R"], none)?,
        collusion_mi: info::mutual_information(&dist, &["KA"], &["S", "R"])?,
        distribution: dist,
    })
}
