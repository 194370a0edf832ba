//! Report documents for the command-line driver.
//!
//! Reports are emitted byte-identically across runs: object keys are
//! sorted, arrays keep construction order, and every float is printed with
//! 17 significant digits and a lowercase `e` exponent so report diffs are
//! exact.

use serde_json::{json, Map, Value};

use crate::anglesolve::{
    continuous_angle_search, enumerate_sign_solutions, solution_relationship, ConditionSet,
    SearchOutcome, SignAssignment,
};
use crate::bsnet::{
    block_decompose, staged_network, transfer_matrix, AngleVector, TransferMatrix,
    ORTHOGONALITY_TOL,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::occsim::{
    apply_occupation, block_matches_target, decode_occupation, encode_logical, GateKind,
    GateTarget, LogicalState, BLOCK_MATCH_TOL, BLOCK_SCALE,
};
use crate::postselect::{coincidence_stats, CoincidenceStats, PostselectionRule};

/// Render a JSON value with sorted keys and fixed float formatting.
pub fn render_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(value: &Value, indent: usize, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().expect("finite float")));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serializes"));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                push_indent(indent + 1, out);
                write_value(item, indent + 1, out);
            }
            out.push('\n');
            push_indent(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            // serde_json's map is BTree-backed, so iteration is key-sorted.
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                push_indent(indent + 1, out);
                out.push_str(&serde_json::to_string(key).expect("key serializes"));
                out.push_str(": ");
                write_value(item, indent + 1, out);
            }
            out.push('\n');
            push_indent(indent, out);
            out.push('}');
        }
    }
}

fn push_indent(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// 17 significant digits, lowercase `e` exponent.
fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn angles_json(angles: &AngleVector) -> Value {
    Value::Array(angles.as_array().iter().map(|t| json!(t)).collect())
}

fn signs_json(signs: &SignAssignment) -> Value {
    Value::Array(signs.signs().iter().map(|s| json!(*s as i64)).collect())
}

fn stats_json(stats: &CoincidenceStats) -> Value {
    let mut outcomes = Map::new();
    for (state, p) in &stats.outcomes {
        outcomes.insert(state.label(), json!(p));
    }
    json!({
        "retained_probability": stats.retained_probability,
        "outcomes": Value::Object(outcomes),
        "bunched_fraction": stats.bunched_fraction,
        "cross_pair_fraction": stats.cross_pair_fraction,
        "dominant_outcome": stats.dominant.map(|s| s.label()),
    })
}

fn build_network(config: &RunConfig) -> Result<(AngleVector, TransferMatrix, GateTarget)> {
    let angles = config.angle_vector()?;
    let g = transfer_matrix(&staged_network(&angles));
    let target = config.gate.target()?;
    Ok((angles, g, target))
}

/// The `verify` pipeline: orthogonality, block-unitarity conditions and
/// the block/target residual. The boolean is the overall pass flag.
pub fn verify_document(config: &RunConfig) -> Result<(Value, bool)> {
    let (angles, g, target) = build_network(config)?;
    let decomposition = block_decompose(&g)?;
    let orthogonality = g.orthogonality_residual();
    let block_residual = block_matches_target(&g.upper_left_block(), &target);
    let pass = orthogonality < ORTHOGONALITY_TOL
        && decomposition.residuals.max() < ORTHOGONALITY_TOL
        && block_residual < BLOCK_MATCH_TOL;
    let document = json!({
        "command": "verify",
        "gate": config.gate.name(),
        "angles": angles_json(&angles),
        "orthogonality_residual": orthogonality,
        "block_conditions": {
            "aat_plus_bbt_minus_identity": decomposition.residuals.aat_bbt,
            "cct_plus_eet_minus_identity": decomposition.residuals.cct_eet,
            "act_plus_bet": decomposition.residuals.act_bet,
            "cat_plus_ebt": decomposition.residuals.cat_ebt,
        },
        "block_residual": block_residual,
        "pass": pass,
    });
    Ok((document, pass))
}

struct InputOutcome {
    label: String,
    occupation: Option<Value>,
    bosonic: Option<Value>,
    occupation_row: Option<(Option<LogicalState>, Option<i8>)>,
    bosonic_stats: Option<CoincidenceStats>,
}

fn occupation_outcome(
    g: &TransferMatrix,
    input: LogicalState,
) -> Result<(Value, (Option<LogicalState>, Option<i8>))> {
    let effective = GateTarget::custom(g.upper_left_block() * BLOCK_SCALE)?;
    match apply_occupation(&effective, &encode_logical(input)) {
        Ok(v) => {
            let (state, sign) = decode_occupation(&v);
            let value = json!({
                "outcome": state.label(),
                "sign": i64::from(sign),
                "representable": true,
            });
            Ok((value, (Some(state), Some(sign))))
        }
        Err(Error::NotRepresentable(_)) => {
            let value = json!({
                "outcome": Value::Null,
                "sign": Value::Null,
                "representable": false,
            });
            Ok((value, (None, None)))
        }
        Err(e) => Err(e),
    }
}

fn simulate_outcomes(config: &RunConfig) -> Result<(Value, Vec<InputOutcome>)> {
    let (angles, g, target) = build_network(config)?;
    let rule: PostselectionRule = config.postselection.rule()?;
    let semantics = config.semantics;

    let mut outcomes = Vec::new();
    for input in &config.inputs {
        let label = input.label();
        let mut occupation = None;
        let mut occupation_row = None;
        if semantics.wants_occupation() {
            if let Some(basis) = input.basis()? {
                let (value, row) = occupation_outcome(&g, basis)?;
                occupation = Some(value);
                occupation_row = Some(row);
            }
        }
        let mut bosonic = None;
        let mut bosonic_stats = None;
        if semantics.wants_bosonic() {
            let stats = coincidence_stats(&g, &input.two_photon_input()?, &rule)?;
            bosonic = Some(stats_json(&stats));
            bosonic_stats = Some(stats);
        }
        outcomes.push(InputOutcome { label, occupation, bosonic, occupation_row, bosonic_stats });
    }

    let header = json!({
        "command": "simulate",
        "gate": config.gate.name(),
        "semantics": semantics.name(),
        "angles": angles_json(&angles),
        "block_residual": block_matches_target(&g.upper_left_block(), &target),
        "postselection": {
            "forbidden_modes": config.postselection.forbidden_modes.clone(),
            "require_one_per_pair": config.postselection.require_one_per_pair,
        },
    });
    Ok((header, outcomes))
}

/// The `simulate` pipeline rendered as a JSON document.
pub fn simulate_document(config: &RunConfig) -> Result<Value> {
    let (header, outcomes) = simulate_outcomes(config)?;
    let mut document = header;
    let rows: Vec<Value> = outcomes
        .into_iter()
        .map(|o| {
            let mut row = Map::new();
            row.insert("input".to_string(), json!(o.label));
            if let Some(occ) = o.occupation {
                row.insert("occupation".to_string(), occ);
            }
            if let Some(bos) = o.bosonic {
                row.insert("bosonic".to_string(), bos);
            }
            Value::Object(row)
        })
        .collect();
    document["inputs"] = Value::Array(rows);
    Ok(document)
}

/// The `simulate` pipeline flattened to CSV, one row per input.
pub fn simulate_csv(config: &RunConfig) -> Result<String> {
    let (_, outcomes) = simulate_outcomes(config)?;
    let mut out = String::from(
        "input,occupation_outcome,occupation_sign,retained_probability,\
         p00,p01,p10,p11,bunched_fraction,cross_pair_fraction\n",
    );
    for o in outcomes {
        let (occ_outcome, occ_sign) = match &o.occupation_row {
            Some((Some(state), Some(sign))) => (state.label(), sign.to_string()),
            Some(_) => ("unrepresentable".to_string(), String::new()),
            None => (String::new(), String::new()),
        };
        let mut fields = vec![o.label.clone(), occ_outcome, occ_sign];
        if let Some(stats) = &o.bosonic_stats {
            fields.push(format_float(stats.retained_probability));
            for label in ["00", "01", "10", "11"] {
                let state = LogicalState::from_label(label).expect("basis label");
                let p = stats.outcomes.get(&state).copied().unwrap_or(0.0);
                fields.push(format_float(p));
            }
            fields.push(format_float(stats.bunched_fraction));
            fields.push(format_float(stats.cross_pair_fraction));
        } else {
            fields.extend(std::iter::repeat_n(String::new(), 7));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// The `solve` pipeline for the enumerate mode: all matching sign
/// assignments, a re-verification pass, and the cross-check of both stated
/// condition systems against the enumeration.
pub fn solve_enumerate_document(target: &GateTarget, gate_name: &str) -> (Value, bool) {
    let solutions = enumerate_sign_solutions(target);
    let verified: Vec<Value> = solutions
        .iter()
        .map(|signs| {
            let g = transfer_matrix(&staged_network(&signs.angles()));
            let residual = block_matches_target(&g.upper_left_block(), target);
            json!({
                "signs": signs_json(signs),
                "residual": residual,
            })
        })
        .collect();

    let crosscheck = match target.kind() {
        GateKind::Cnot | GateKind::Swap => {
            let stated = solution_relationship(target, &ConditionSet::cnot());
            let other = solution_relationship(target, &ConditionSet::swap());
            json!({
                "cnot_conditions": stated.describe(),
                "swap_conditions": other.describe(),
                "note": "the two stated condition systems are crossed: each \
                         system's solutions realize the other gate's block",
            })
        }
        GateKind::Custom => Value::Null,
    };

    let pass = !solutions.is_empty();
    let document = json!({
        "command": "solve",
        "mode": "enumerate",
        "gate": gate_name,
        "solution_count": solutions.len() as i64,
        "solutions": verified,
        "condition_crosscheck": crosscheck,
        "pass": pass,
    });
    (document, pass)
}

/// The `solve` pipeline for the continuous mode.
pub fn solve_continuous_document(
    target: &GateTarget,
    gate_name: &str,
    tolerance: f64,
) -> Result<(Value, bool)> {
    let outcome: SearchOutcome = continuous_angle_search(target.matrix(), tolerance)?;
    let document = json!({
        "command": "solve",
        "mode": "continuous",
        "gate": gate_name,
        "tolerance": tolerance,
        "angles": angles_json(&outcome.angles),
        "residual": outcome.residual,
        "converged": outcome.converged,
        "restarts": outcome.restarts as i64,
    });
    Ok((document, outcome.converged))
}
