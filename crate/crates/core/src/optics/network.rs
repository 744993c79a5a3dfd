use serde::{Deserialize, Serialize};

use super::element::OpticalElement;
use super::mode::{Mode, ModeRegistry, Pol};
use super::photons::JointPhotonState;
use crate::error::{Error, Result};
use crate::qudit::{unitarity_deviation, CMatrix, UNITARY_TOL};

/// Named marker placed after the first `after` elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub name: String,
    pub after: usize,
}

/// An ordered list of elements over a fixed mode registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkSpec", into = "NetworkSpec")]
pub struct Network {
    registry: ModeRegistry,
    elements: Vec<OpticalElement>,
    checkpoints: Vec<Checkpoint>,
}

impl Network {
    pub fn new(registry: ModeRegistry) -> Self {
        Self {
            registry,
            elements: Vec::new(),
            checkpoints: Vec::new(),
        }
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn elements(&self) -> &[OpticalElement] {
        &self.elements
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    pub fn num_modes(&self) -> usize {
        self.registry.num_modes()
    }

    /// Appends an element, registering any rail it names for the first time.
    pub fn add(&mut self, element: OpticalElement) -> Result<&mut Self> {
        for r in element.rails() {
            self.registry.ensure_rail(r);
        }
        element.validate(&self.registry)?;
        self.elements.push(element);
        Ok(self)
    }

    /// Appends an element whose rails must already exist.
    pub fn push(&mut self, element: OpticalElement) -> Result<&mut Self> {
        element.validate(&self.registry)?;
        self.elements.push(element);
        Ok(self)
    }

    pub fn mark(&mut self, name: impl Into<String>) -> &mut Self {
        self.checkpoints.push(Checkpoint {
            name: name.into(),
            after: self.elements.len(),
        });
        self
    }

    pub fn ensure_rail(&mut self, label: &str) -> &mut Self {
        self.registry.ensure_rail(label);
        self
    }

    /// Unitary of `elements[from..to]`.
    fn segment_unitary(&self, from: usize, to: usize) -> Result<CMatrix> {
        let n = self.num_modes();
        self.elements[from..to]
            .iter()
            .try_fold(CMatrix::identity(n, n), |acc, e| Ok(e.unitary(&self.registry)? * acc))
    }
}

/// Single-particle unitary of the whole network, first element rightmost.
pub fn compile_network(net: &Network) -> Result<CMatrix> {
    let u = net.segment_unitary(0, net.elements.len())?;
    let dev = unitarity_deviation(&u);
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(u)
}

/// The joint state at every checkpoint, in marker order.
pub fn checkpoint_states(
    net: &Network,
    input: &JointPhotonState,
) -> Result<Vec<(String, JointPhotonState)>> {
    let mut out = Vec::with_capacity(net.checkpoints.len());
    let mut state = input.clone();
    let mut done = 0;
    for cp in &net.checkpoints {
        if cp.after < done || cp.after > net.elements.len() {
            return Err(Error::InvalidArgument(format!(
                "checkpoint {} out of order",
                cp.name
            )));
        }
        state = state.evolve(&net.segment_unitary(done, cp.after)?)?;
        done = cp.after;
        out.push((cp.name.clone(), state.clone()));
    }
    Ok(out)
}

/// Serialized network: `{modes, elements, checkpoints}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub modes: Vec<Mode>,
    pub elements: Vec<OpticalElement>,
    #[serde(default)]
    pub checkpoints: Vec<Checkpoint>,
}

impl From<Network> for NetworkSpec {
    fn from(net: Network) -> Self {
        Self {
            modes: net.registry.modes().collect(),
            elements: net.elements,
            checkpoints: net.checkpoints,
        }
    }
}

impl TryFrom<NetworkSpec> for Network {
    type Error = Error;

    fn try_from(spec: NetworkSpec) -> Result<Self> {
        let mut registry = ModeRegistry::new();
        let mut seen = std::collections::HashSet::new();
        for m in &spec.modes {
            if !seen.insert(m.clone()) {
                return Err(Error::InvalidArgument(format!("mode {m} listed twice")));
            }
            registry.ensure_rail(&m.spatial);
        }
        for rail in registry.rails() {
            for pol in Pol::BOTH {
                if !seen.contains(&Mode::new(rail.clone(), pol)) {
                    return Err(Error::InvalidArgument(format!(
                        "rail {rail} lacks its {pol:?} mode"
                    )));
                }
            }
        }
        let mut net = Network::new(registry);
        for e in spec.elements {
            net.push(e)?;
        }
        for cp in spec.checkpoints {
            if cp.after > net.elements.len() {
                return Err(Error::InvalidArgument(format!(
                    "checkpoint {} after element {} of {}",
                    cp.name,
                    cp.after,
                    net.elements.len()
                )));
            }
            net.checkpoints.push(cp);
        }
        Ok(net)
    }
}
