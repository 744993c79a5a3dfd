//! Coincidence post-selection and classically conditioned corrections.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::element::OpticalElement;
use super::mode::{Mode, ModeRegistry};
use super::network::Network;
use super::photons::JointPhotonState;
use crate::error::{Error, Result};

/// Probabilities below this are reported as exactly zero.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// One accepted coincidence pattern: slot `k` must be hit by exactly one
/// photon, somewhere in `slots[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRule {
    pub label: String,
    pub slots: Vec<BTreeSet<Mode>>,
}

impl BranchRule {
    pub fn new(label: impl Into<String>, slots: Vec<BTreeSet<Mode>>) -> Result<Self> {
        let rule = Self {
            label: label.into(),
            slots,
        };
        rule.check_disjoint()?;
        Ok(rule)
    }

    fn check_disjoint(&self) -> Result<()> {
        for (i, a) in self.slots.iter().enumerate() {
            for b in &self.slots[i + 1..] {
                if let Some(m) = a.intersection(b).next() {
                    return Err(Error::InvalidArgument(format!(
                        "branch {}: mode {m} accepted by two slots",
                        self.label
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rails carrying at least one accepted mode.
    pub fn rails(&self) -> BTreeSet<&str> {
        self.slots
            .iter()
            .flatten()
            .map(|m| m.spatial.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostSelection {
    pub branches: Vec<BranchRule>,
}

impl PostSelection {
    pub fn branch(&self, label: &str) -> Option<&BranchRule> {
        self.branches.iter().find(|b| b.label == label)
    }
}

/// Corrections to apply per branch label.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeedForwardRule {
    pub rules: BTreeMap<String, Vec<OpticalElement>>,
}

impl FeedForwardRule {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn on(mut self, label: impl Into<String>, elements: Vec<OpticalElement>) -> Self {
        self.rules.insert(label.into(), elements);
        self
    }
}

/// A projected, renormalized branch outcome.
///
/// Photon index `k` of `state` is the photon found in slot `k`. A branch
/// with probability below [`PROBABILITY_FLOOR`] carries probability 0 and a
/// zero state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalResult {
    pub label: String,
    pub probability: f64,
    pub state: JointPhotonState,
    pub accepted: Vec<BTreeSet<Mode>>,
}

impl ConditionalResult {
    pub fn is_populated(&self) -> bool {
        self.probability > 0.0
    }
}

/// Projects `state` onto every branch.
///
/// A detector pattern does not say which photon fired where, so each
/// accepted pattern collects the coefficients of every assignment of
/// photons to slots. Terms with two photons in one slot, or any photon
/// outside the slots, are rejected.
pub fn post_select(
    state: &JointPhotonState,
    registry: &ModeRegistry,
    rule: &PostSelection,
) -> Result<Vec<ConditionalResult>> {
    if registry.num_modes() != state.modes() {
        return Err(Error::DimensionMismatch {
            expected: registry.num_modes(),
            found: state.modes(),
        });
    }
    rule.branches
        .iter()
        .map(|branch| project(state, registry, branch))
        .collect()
}

fn project(
    state: &JointPhotonState,
    registry: &ModeRegistry,
    branch: &BranchRule,
) -> Result<ConditionalResult> {
    branch.check_disjoint()?;
    if branch.slots.len() != state.photons() {
        return Err(Error::DimensionMismatch {
            expected: state.photons(),
            found: branch.slots.len(),
        });
    }
    let mut slot_of = vec![None; registry.num_modes()];
    for (k, slot) in branch.slots.iter().enumerate() {
        for m in slot {
            slot_of[registry.mode_index(m)?] = Some(k);
        }
    }
    let mut out = JointPhotonState::zeros(state.photons(), state.modes())?;
    let mut canonical = vec![0; state.photons()];
    'terms: for (modes, amp) in state.terms() {
        let mut filled = vec![false; state.photons()];
        for &m in &modes {
            match slot_of[m] {
                Some(k) if !filled[k] => {
                    filled[k] = true;
                    canonical[k] = m;
                }
                _ => continue 'terms,
            }
        }
        out.add_term(&canonical, amp)?;
    }
    let p = out.norm().powi(2);
    let probability = if p < PROBABILITY_FLOOR {
        out.scale(Complex64::new(0.0, 0.0));
        0.0
    } else {
        out.scale(Complex64::new(1.0 / p.sqrt(), 0.0));
        p
    };
    Ok(ConditionalResult {
        label: branch.label.clone(),
        probability,
        state: out,
        accepted: branch.slots.clone(),
    })
}

/// Applies the branch's corrections, if any, to the projected state.
///
/// Corrections may only touch rails the branch accepted.
pub fn apply_feed_forward(
    result: &ConditionalResult,
    registry: &ModeRegistry,
    rules: &FeedForwardRule,
) -> Result<ConditionalResult> {
    let Some(elements) = rules.rules.get(&result.label) else {
        return Ok(result.clone());
    };
    let live: BTreeSet<&str> = result
        .accepted
        .iter()
        .flatten()
        .map(|m| m.spatial.as_str())
        .collect();
    let mut net = Network::new(registry.clone());
    for e in elements {
        if let Some(dead) = e.rails().into_iter().find(|r| !live.contains(r)) {
            return Err(Error::DeadMode(format!("{dead} in branch {}", result.label)));
        }
        net.push(e.clone())?;
    }
    let u = super::network::compile_network(&net)?;
    Ok(ConditionalResult {
        state: result.state.evolve(&u)?,
        ..result.clone()
    })
}
