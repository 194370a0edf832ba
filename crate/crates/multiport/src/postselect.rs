//! Postselection and gate reports.
//!
//! The scheme keeps only the runs in which no photon leaves through the
//! four auxiliary output ports; surviving events are renormalized and, in
//! the coincidence basis, decoded back to logical outcomes. Reports cover
//! both the occupation-vector semantics (the scaled upper-left block acting
//! on signed occupation vectors) and full bosonic semantics, where bunched
//! and cross-pair events appear alongside the coincidence outcomes and are
//! quantified rather than hidden.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::bsnet::{block_decompose, TransferMatrix, MODE_COUNT};
use crate::error::{Error, Result};
use crate::focksim::{
    evolve_two_photon, EventDistribution, FockConfiguration, TwoPhotonInput,
};
use crate::occsim::{
    apply_occupation, block_matches_target, decode_occupation, encode_logical, reference_gate,
    GateTarget, LogicalState, BLOCK_SCALE,
};

/// Which output events survive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostselectionRule {
    /// Events with any photon in one of these modes are discarded.
    pub forbidden_modes: BTreeSet<usize>,
    /// Additionally require exactly one photon in modes {0,1} and one in
    /// modes {2,3} (the coincidence basis). Off by default: the scheme
    /// itself only excludes the auxiliary ports.
    pub require_one_per_pair: bool,
}

impl PostselectionRule {
    pub fn new(forbidden_modes: BTreeSet<usize>, require_one_per_pair: bool) -> Result<Self> {
        if let Some(&m) = forbidden_modes.iter().find(|&&m| m >= MODE_COUNT) {
            return Err(Error::InvalidArgument(format!(
                "forbidden mode {m} out of range"
            )));
        }
        Ok(Self { forbidden_modes, require_one_per_pair })
    }

    fn keeps(&self, config: &FockConfiguration) -> bool {
        if !config.confined_to(|mode| !self.forbidden_modes.contains(&mode)) {
            return false;
        }
        if self.require_one_per_pair {
            let occ = config.occupations();
            let first = occ[0] + occ[1];
            let second = occ[2] + occ[3];
            if first != 1 || second != 1 {
                return false;
            }
        }
        true
    }
}

impl Default for PostselectionRule {
    /// Exclude the auxiliary output ports 4..7 only.
    fn default() -> Self {
        Self {
            forbidden_modes: (4..8).collect(),
            require_one_per_pair: false,
        }
    }
}

/// Drop forbidden events and renormalize.
///
/// Returns the renormalized retained distribution together with the
/// retained probability mass before renormalization. An empty retained set
/// yields success 0 and an empty distribution.
pub fn apply_postselection(
    dist: &EventDistribution,
    rule: &PostselectionRule,
) -> (EventDistribution, f64) {
    let mut retained = EventDistribution::default();
    let mut mass = 0.0;
    for (config, amp) in dist.iter() {
        if rule.keeps(config) {
            mass += amp.norm_sqr();
        }
    }
    if mass > 0.0 {
        let scale = mass.sqrt();
        for (config, amp) in dist.iter() {
            if rule.keeps(config) {
                retained.insert(*config, amp / scale);
            }
        }
    }
    (retained, mass)
}

/// Requested simulation semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Occupation,
    Bosonic,
    Both,
}

impl Semantics {
    pub fn wants_occupation(&self) -> bool {
        matches!(self, Semantics::Occupation | Semantics::Both)
    }

    pub fn wants_bosonic(&self) -> bool {
        matches!(self, Semantics::Bosonic | Semantics::Both)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Semantics::Occupation => "occupation",
            Semantics::Bosonic => "bosonic",
            Semantics::Both => "both",
        }
    }
}

/// Occupation-semantics result for one basis input.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationRow {
    pub input: LogicalState,
    /// Decoded outcome and sign, or None when the scaled block does not map
    /// this occupation vector back into the occupation basis.
    pub outcome: Option<(LogicalState, i8)>,
}

/// Postselected coincidence statistics for one two-photon input.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceStats {
    /// Probability mass surviving postselection, before renormalization.
    pub retained_probability: f64,
    /// Conditional probability of each decoded coincidence outcome among
    /// retained events.
    pub outcomes: BTreeMap<LogicalState, f64>,
    /// Retained-conditional probability of a doubly occupied mode.
    pub bunched_fraction: f64,
    /// Retained-conditional probability of events that are neither bunched
    /// nor one-per-pair coincidences.
    pub cross_pair_fraction: f64,
    /// Unique most-likely coincidence outcome, if any (ties yield None).
    pub dominant: Option<LogicalState>,
}

/// Bosonic-semantics result for one basis input.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonicRow {
    pub input: LogicalState,
    pub stats: CoincidenceStats,
}

/// Full verification report for a network against a gate target.
#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub target: GateTarget,
    pub semantics: Semantics,
    /// ‖√2·A − target‖max for the network's upper-left block.
    pub block_residual: f64,
    pub occupation: Option<OccupationReport>,
    pub bosonic: Option<BosonicReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupationReport {
    pub rows: Vec<OccupationRow>,
    /// All four decoded outcomes equal the reference truth table; None when
    /// the target has no reference (custom gates).
    pub truth_table_match: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BosonicReport {
    pub rows: Vec<BosonicRow>,
    /// Every input has a unique dominant coincidence outcome equal to the
    /// reference; None for custom targets.
    pub truth_table_match: Option<bool>,
    pub mean_success_probability: f64,
}

fn decode_coincidence(config: &FockConfiguration) -> Option<LogicalState> {
    let occ = config.occupations();
    if occ[0] + occ[1] != 1 || occ[2] + occ[3] != 1 {
        return None;
    }
    LogicalState::new(occ[1], occ[3]).ok()
}

fn occupation_rows(g: &TransferMatrix) -> Result<Vec<OccupationRow>> {
    let block = g.upper_left_block() * BLOCK_SCALE;
    let effective = GateTarget::custom(block)?;
    Ok(LogicalState::all()
        .into_iter()
        .map(|input| {
            let outcome = apply_occupation(&effective, &encode_logical(input))
                .ok()
                .map(|v| decode_occupation(&v));
            OccupationRow { input, outcome }
        })
        .collect())
}

/// Evolve one two-photon input, postselect, and classify the retained mass
/// into decoded coincidences, bunched events and invalid events.
pub fn coincidence_stats(
    g: &TransferMatrix,
    input: &TwoPhotonInput,
    rule: &PostselectionRule,
) -> Result<CoincidenceStats> {
    let dist = evolve_two_photon(g, input)?;
    let (retained, retained_probability) = apply_postselection(&dist, rule);

    let mut outcomes: BTreeMap<LogicalState, f64> = BTreeMap::new();
    let mut bunched_fraction = 0.0;
    let mut cross_pair_fraction = 0.0;
    for (config, amp) in retained.iter() {
        let p = amp.norm_sqr();
        if config.has_bunching() {
            bunched_fraction += p;
        } else if let Some(outcome) = decode_coincidence(config) {
            *outcomes.entry(outcome).or_insert(0.0) += p;
        } else {
            cross_pair_fraction += p;
        }
    }

    let mut dominant = None;
    let mut best = 0.0;
    for (&outcome, &p) in &outcomes {
        if p > best + 1e-12 {
            best = p;
            dominant = Some(outcome);
        } else if (p - best).abs() <= 1e-12 {
            dominant = None;
            best = best.max(p);
        }
    }

    Ok(CoincidenceStats {
        retained_probability,
        outcomes,
        bunched_fraction,
        cross_pair_fraction,
        dominant,
    })
}

/// Run the requested semantics for all four basis inputs and assemble the
/// report. Block/target mismatches are recorded in the report rather than
/// raised as errors.
pub fn gate_report(
    g: &TransferMatrix,
    target: &GateTarget,
    rule: &PostselectionRule,
    semantics: Semantics,
) -> Result<GateReport> {
    block_decompose(g)?; // validates orthogonality
    let block_residual = block_matches_target(&g.upper_left_block(), target);

    let occupation = if semantics.wants_occupation() {
        let rows = occupation_rows(g)?;
        let truth_table_match = reference_gate(LogicalState::all()[0], target.kind())
            .is_some()
            .then(|| {
                rows.iter().all(|row| {
                    row.outcome.map(|(state, _)| state)
                        == reference_gate(row.input, target.kind())
                })
            });
        Some(OccupationReport { rows, truth_table_match })
    } else {
        None
    };

    let bosonic = if semantics.wants_bosonic() {
        let rows: Vec<BosonicRow> = LogicalState::all()
            .into_iter()
            .map(|input| {
                coincidence_stats(g, &TwoPhotonInput::logical(input), rule)
                    .map(|stats| BosonicRow { input, stats })
            })
            .collect::<Result<_>>()?;
        let truth_table_match = reference_gate(LogicalState::all()[0], target.kind())
            .is_some()
            .then(|| {
                rows.iter()
                    .all(|row| row.stats.dominant == reference_gate(row.input, target.kind()))
            });
        let mean_success_probability =
            rows.iter().map(|r| r.stats.retained_probability).sum::<f64>() / rows.len() as f64;
        Some(BosonicReport { rows, truth_table_match, mean_success_probability })
    } else {
        None
    };

    Ok(GateReport {
        target: target.clone(),
        semantics,
        block_residual,
        occupation,
        bosonic,
    })
}
