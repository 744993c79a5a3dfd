//! Linear-optical engine: modes, elements, network compilation, joint
//! multi-photon evolution, coincidence post-selection and feed-forward.

mod element;
mod mode;
mod network;
mod photons;
mod postselect;

pub use element::{hwp_matrix, OpticalElement};
pub use mode::{Mode, ModeRegistry, Pol};
pub use network::{checkpoint_states, compile_network, Checkpoint, Network, NetworkSpec};
pub use photons::JointPhotonState;
pub use postselect::{
    apply_feed_forward, post_select, BranchRule, ConditionalResult, FeedForwardRule,
    PostSelection, PROBABILITY_FLOOR,
};
