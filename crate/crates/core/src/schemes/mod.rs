//! Linear-optical gate schemes built from post-selected partial swaps.
//!
//! A scheme is a cascade of stages. Each stage is a network on its own mode
//! registry followed by coincidence post-selection and feed-forward. An
//! accepted branch of one stage is relabeled rail by rail into the next
//! stage's registry, so every path through the cascade is one heralded
//! outcome whose probability is the product of its stage probabilities.
//! Accepted outcomes of the last stage are decoded back to logical qudits.

mod build;
mod table;

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{
    apply_feed_forward, compile_network, post_select, BranchRule, FeedForwardRule,
    JointPhotonState, Mode, ModeRegistry, Network, PostSelection,
};
use crate::qudit::{states_equal, CMatrix, PureState, SiteDims};
use crate::rational::Rational;
use crate::synthesis::{cnot_matrix, gate_pswap, toffoli_matrix};

pub use build::{scheme_cnot, scheme_pswap, scheme_toffoli, scheme_toffoli_n, PSWAP_EXITS};
pub use table::{coincidence_table, CoincidenceCell, CoincidenceColumn, CoincidenceRow, CoincidenceTable};

/// Which ideal gate a scheme realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Partial swap on a qutrit and a qubit.
    Pswap,
    Cnot,
    Toffoli,
}

impl SchemeKind {
    pub fn dims(&self) -> SiteDims {
        let d = match self {
            Self::Pswap => vec![3, 2],
            Self::Cnot => vec![2, 2],
            Self::Toffoli => vec![2, 2, 2],
        };
        SiteDims::new(d).expect("static dims")
    }

    pub fn ideal_matrix(&self) -> CMatrix {
        match self {
            Self::Pswap => gate_pswap(3, 2).expect("static gate").matrix().clone(),
            Self::Cnot => cnot_matrix(),
            Self::Toffoli => toffoli_matrix(2),
        }
    }
}

/// A mode paired with the logical level it carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeLevel {
    pub mode: Mode,
    pub level: usize,
}

/// Logical encode/decode tables.
///
/// Site `k` is carried by photon `k` on input and read from slot `k` of every
/// accepted last-stage branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalEncoding {
    /// `input[k][level]` is the first-stage mode holding `level` of site `k`.
    pub input: Vec<Vec<Mode>>,
    /// Last-stage modes that decode to a level of site `k`.
    pub output: Vec<Vec<ModeLevel>>,
}

impl LogicalEncoding {
    pub fn input_dims(&self) -> Result<SiteDims> {
        SiteDims::new(self.input.iter().map(Vec::len).collect())
    }

    pub fn output_dims(&self) -> Result<SiteDims> {
        SiteDims::new(
            self.output
                .iter()
                .map(|site| site.iter().map(|e| e.level + 1).max().unwrap_or(0))
                .collect(),
        )
    }

    fn decode_level(&self, site: usize, mode: &Mode) -> Option<usize> {
        self.output
            .get(site)?
            .iter()
            .find(|e| &e.mode == mode)
            .map(|e| e.level)
    }

    /// Input modes are distinct, and each decode table maps a mode once.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for m in self.input.iter().flatten() {
            if !seen.insert(m) {
                return Err(Error::SchemeIntegrity(format!("input mode {m} encodes twice")));
            }
        }
        if self.input.len() != self.output.len() {
            return Err(Error::SchemeIntegrity(format!(
                "{} encoded sites but {} decoded",
                self.input.len(),
                self.output.len()
            )));
        }
        for (k, site) in self.output.iter().enumerate() {
            let modes: BTreeSet<&Mode> = site.iter().map(|e| &e.mode).collect();
            if modes.len() != site.len() {
                return Err(Error::SchemeIntegrity(format!("site {k} decodes a mode twice")));
            }
        }
        Ok(())
    }
}

/// One network plus what happens to each of its accepted outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub network: Network,
    pub post_selection: PostSelection,
    #[serde(default)]
    pub feed_forward: FeedForwardRule,
    /// Per branch label, the next stage's rail for every accepted rail.
    /// Empty on the last stage.
    #[serde(default)]
    pub rewire: BTreeMap<String, BTreeMap<String, String>>,
    /// Coincidences that would mean a photon left through a discard port
    /// while the others were accepted. They must never fire.
    #[serde(default)]
    pub leak_patterns: Vec<BranchRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeDescriptor {
    pub name: String,
    pub kind: SchemeKind,
    pub encoding: LogicalEncoding,
    pub stages: Vec<Stage>,
    pub expected_success: Rational,
}

impl SchemeDescriptor {
    pub fn input_dims(&self) -> Result<SiteDims> {
        self.encoding.input_dims()
    }

    pub fn output_dims(&self) -> Result<SiteDims> {
        self.encoding.output_dims()
    }

    pub fn ideal_matrix(&self) -> CMatrix {
        self.kind.ideal_matrix()
    }

    /// Total number of accepted paths through the cascade.
    pub fn num_paths(&self) -> usize {
        self.stages
            .iter()
            .map(|s| s.post_selection.branches.len())
            .product()
    }

    /// The same scheme with every feed-forward correction removed.
    pub fn without_feed_forward(&self) -> Self {
        let mut out = self.clone();
        for s in &mut out.stages {
            s.feed_forward = FeedForwardRule::none();
        }
        out
    }

    /// Structural checks: the encoding fits the first registry, every
    /// accepted rail is routed onward, and the last stage decodes.
    pub fn validate(&self) -> Result<()> {
        self.encoding.validate()?;
        let sites = self.encoding.input.len();
        let Some(first) = self.stages.first() else {
            return Err(Error::SchemeIntegrity(format!("{} has no stages", self.name)));
        };
        for m in self.encoding.input.iter().flatten() {
            first.network.registry().mode_index(m)?;
        }
        if self.input_dims()? != self.kind.dims() || self.output_dims()? != self.kind.dims() {
            return Err(Error::SchemeIntegrity(format!(
                "{} encodes dims that differ from its ideal gate",
                self.name
            )));
        }
        for (s, stage) in self.stages.iter().enumerate() {
            let reg = stage.network.registry();
            let next = self.stages.get(s + 1).map(|n| n.network.registry());
            if stage.post_selection.branches.is_empty() {
                return Err(Error::SchemeIntegrity(format!("stage {} accepts nothing", stage.name)));
            }
            for rule in stage.post_selection.branches.iter().chain(&stage.leak_patterns) {
                if rule.slots.len() != sites {
                    return Err(Error::SchemeIntegrity(format!(
                        "branch {} has {} slots for {sites} photons",
                        rule.label,
                        rule.slots.len()
                    )));
                }
                for m in rule.slots.iter().flatten() {
                    reg.mode_index(m)?;
                }
            }
            for branch in &stage.post_selection.branches {
                match next {
                    Some(next) => {
                        let map = stage.rewire.get(&branch.label).ok_or_else(|| {
                            Error::SchemeIntegrity(format!("branch {} is not routed", branch.label))
                        })?;
                        for rail in branch.rails() {
                            let to = map.get(rail).ok_or_else(|| {
                                Error::SchemeIntegrity(format!(
                                    "rail {rail} of branch {} is not routed",
                                    branch.label
                                ))
                            })?;
                            next.rail_index(to)?;
                        }
                    }
                    None => {
                        for (k, slot) in branch.slots.iter().enumerate() {
                            let mut levels = BTreeSet::new();
                            for m in slot {
                                let level = self.encoding.decode_level(k, m).ok_or_else(|| {
                                    Error::SchemeIntegrity(format!(
                                        "{m} in branch {} does not decode",
                                        branch.label
                                    ))
                                })?;
                                if !levels.insert(level) {
                                    return Err(Error::SchemeIntegrity(format!(
                                        "branch {} decodes level {level} twice",
                                        branch.label
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The logical state as a photon tensor on the first stage's modes.
    pub fn encode(&self, input: &PureState) -> Result<JointPhotonState> {
        let dims = self.input_dims()?;
        if input.dims() != &dims {
            return Err(Error::InvalidDims(format!(
                "{} takes {dims}, got {}",
                self.name,
                input.dims()
            )));
        }
        let reg = self.stages[0].network.registry();
        let table: Vec<Vec<usize>> = self
            .encoding
            .input
            .iter()
            .map(|site| site.iter().map(|m| reg.mode_index(m)).collect())
            .collect::<Result<_>>()?;
        let mut out = JointPhotonState::zeros(dims.num_sites(), reg.num_modes())?;
        for (i, &a) in input.amplitudes().iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let modes: Vec<usize> = dims
                .levels_of(i)
                .iter()
                .enumerate()
                .map(|(k, &l)| table[k][l])
                .collect();
            out.add_term(&modes, a)?;
        }
        Ok(out)
    }

    fn decode(&self, state: &JointPhotonState, reg: &ModeRegistry) -> Result<PureState> {
        let dims = self.output_dims()?;
        let mut amps = vec![Complex64::new(0.0, 0.0); dims.total()];
        for (modes, a) in state.terms() {
            let levels: Vec<usize> = modes
                .iter()
                .enumerate()
                .map(|(k, &m)| {
                    let mode = reg.mode(m);
                    self.encoding.decode_level(k, &mode).ok_or_else(|| {
                        Error::SchemeIntegrity(format!("{mode} does not decode for site {k}"))
                    })
                })
                .collect::<Result<_>>()?;
            amps[dims.index_of(&levels)?] += a;
        }
        PureState::normalized(dims, amps)
    }
}

/// One heralded path through the cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    /// Accepted branch label at each stage.
    pub path: Vec<String>,
    pub probability: f64,
    pub output: PureState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateRunReport {
    pub scheme: String,
    pub input: PureState,
    /// Sum over every heralded path.
    pub success_probability: f64,
    /// The decoded output, shared by every path up to global phase.
    pub conditional_output: PureState,
    pub fidelity_vs_ideal: f64,
    /// Populated paths only.
    pub branches: Vec<BranchOutcome>,
    /// Largest probability of any leak pattern along any path.
    pub leakage: f64,
}

struct Path {
    labels: Vec<String>,
    probability: f64,
    state: JointPhotonState,
}

/// Encodes, evolves through every stage, post-selects, corrects, decodes,
/// and checks that all heralded paths agree.
pub fn run_gate(scheme: &SchemeDescriptor, input: &PureState) -> Result<GateRunReport> {
    scheme.validate()?;
    let mut paths = vec![Path {
        labels: Vec::new(),
        probability: 1.0,
        state: scheme.encode(input)?,
    }];
    let mut leakage: f64 = 0.0;
    let last = scheme.stages.len() - 1;
    for (s, stage) in scheme.stages.iter().enumerate() {
        let reg = stage.network.registry();
        let u = compile_network(&stage.network)?;
        let leaks = PostSelection {
            branches: stage.leak_patterns.clone(),
        };
        let mut next = Vec::new();
        for path in paths {
            let evolved = path.state.evolve(&u)?;
            for r in post_select(&evolved, reg, &leaks)? {
                leakage = leakage.max(path.probability * r.probability);
            }
            for r in post_select(&evolved, reg, &stage.post_selection)? {
                if !r.is_populated() {
                    continue;
                }
                let r = apply_feed_forward(&r, reg, &stage.feed_forward)?;
                let state = if s == last {
                    r.state
                } else {
                    let to = scheme.stages[s + 1].network.registry();
                    rewire(&r.state, reg, to, &stage.rewire[&r.label])?
                };
                let mut labels = path.labels.clone();
                labels.push(r.label);
                next.push(Path {
                    labels,
                    probability: path.probability * r.probability,
                    state,
                });
            }
        }
        paths = next;
    }

    let reg = scheme.stages[last].network.registry();
    let branches: Vec<BranchOutcome> = paths
        .into_iter()
        .map(|p| {
            Ok(BranchOutcome {
                output: scheme.decode(&p.state, reg)?,
                path: p.labels,
                probability: p.probability,
            })
        })
        .collect::<Result<_>>()?;
    let Some(first) = branches.first() else {
        return Err(Error::SchemeIntegrity(format!(
            "{}: no branch accepted the input",
            scheme.name
        )));
    };
    for b in &branches[1..] {
        if !states_equal(&b.output, &first.output, true)? {
            return Err(Error::SchemeIntegrity(format!(
                "{}: path {} disagrees with path {}",
                scheme.name,
                b.path.join(" > "),
                first.path.join(" > ")
            )));
        }
    }
    let conditional_output = first.output.clone();
    let ideal = ideal_output(scheme, input)?;
    Ok(GateRunReport {
        scheme: scheme.name.clone(),
        input: input.clone(),
        success_probability: branches.iter().map(|b| b.probability).sum(),
        fidelity_vs_ideal: ideal.fidelity(&conditional_output)?.min(1.0),
        conditional_output,
        branches,
        leakage,
    })
}

/// The ideal gate applied to `input`.
pub fn ideal_output(scheme: &SchemeDescriptor, input: &PureState) -> Result<PureState> {
    let u = scheme.ideal_matrix();
    let v = nalgebra::DVector::from_column_slice(input.amplitudes());
    if u.ncols() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.ncols(),
            found: v.len(),
        });
    }
    PureState::normalized(scheme.output_dims()?, (u * v).as_slice().to_vec())
}

/// Relabels photons from `from` onto `to` rail by rail.
fn rewire(
    state: &JointPhotonState,
    from: &ModeRegistry,
    to: &ModeRegistry,
    rails: &BTreeMap<String, String>,
) -> Result<JointPhotonState> {
    let mut out = JointPhotonState::zeros(state.photons(), to.num_modes())?;
    for (modes, a) in state.terms() {
        let mapped: Vec<usize> = modes
            .iter()
            .map(|&m| {
                let mode = from.mode(m);
                let rail = rails.get(&mode.spatial).ok_or_else(|| {
                    Error::SchemeIntegrity(format!("photon in unrouted mode {mode}"))
                })?;
                to.index_of(rail, mode.pol)
            })
            .collect::<Result<_>>()?;
        out.add_term(&mapped, a)?;
    }
    Ok(out)
}
