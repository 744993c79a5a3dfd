//! Passive linear-optical elements and their single-photon unitaries.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mode::{ModeRegistry, Pol};
use crate::error::{Error, Result};
use crate::qudit::CMatrix;

/// Jones matrix of a half-wave plate with its fast axis at `theta`, on the
/// (H, V) basis: `[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`.
pub fn hwp_matrix(theta: f64) -> Matrix2<Complex64> {
    let (s, c) = (2.0 * theta).sin_cos();
    Matrix2::new(
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-c, 0.0),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum OpticalElement {
    /// Polarizing beam splitter. H is transmitted (`inputs[i] → outputs[i]`),
    /// V is reflected (`inputs[0] → outputs[1]`, `inputs[1] → outputs[0]`),
    /// all with unit coefficients.
    Pbs {
        inputs: [String; 2],
        outputs: [String; 2],
    },
    /// Half-wave plate at `theta` radians on one rail.
    Hwp { spatial: String, theta: f64 },
    /// Balanced beam splitter, polarization independent:
    /// `inputs[0] → (p + q)/√2`, `inputs[1] → (p − q)/√2`.
    Bs {
        inputs: [String; 2],
        outputs: [String; 2],
    },
    /// Phase `e^{iφ}` on both polarizations of a rail.
    PhaseShift { spatial: String, phi: f64 },
}

impl OpticalElement {
    pub fn pbs(in0: &str, in1: &str, out0: &str, out1: &str) -> Self {
        Self::Pbs {
            inputs: [in0.into(), in1.into()],
            outputs: [out0.into(), out1.into()],
        }
    }

    pub fn bs(in0: &str, in1: &str, out0: &str, out1: &str) -> Self {
        Self::Bs {
            inputs: [in0.into(), in1.into()],
            outputs: [out0.into(), out1.into()],
        }
    }

    pub fn hwp_deg(spatial: &str, degrees: f64) -> Self {
        Self::Hwp {
            spatial: spatial.into(),
            theta: degrees.to_radians(),
        }
    }

    pub fn phase(spatial: &str, phi: f64) -> Self {
        Self::PhaseShift {
            spatial: spatial.into(),
            phi,
        }
    }

    /// Every rail label the element touches.
    pub fn rails(&self) -> Vec<&str> {
        match self {
            Self::Pbs { inputs, outputs } | Self::Bs { inputs, outputs } => inputs
                .iter()
                .chain(outputs.iter())
                .map(String::as_str)
                .collect(),
            Self::Hwp { spatial, .. } | Self::PhaseShift { spatial, .. } => vec![spatial],
        }
    }

    pub fn validate(&self, reg: &ModeRegistry) -> Result<()> {
        for r in self.rails() {
            reg.rail_index(r)?;
        }
        if let Self::Pbs { inputs, outputs } | Self::Bs { inputs, outputs } = self {
            if inputs[0] == inputs[1] || outputs[0] == outputs[1] {
                return Err(Error::InvalidArgument(format!(
                    "splitter ports must be distinct: {inputs:?} -> {outputs:?}"
                )));
            }
        }
        Ok(())
    }

    /// The element's action on the full single-photon mode space.
    pub fn unitary(&self, reg: &ModeRegistry) -> Result<CMatrix> {
        self.validate(reg)?;
        let n = reg.num_modes();
        let one = Complex64::new(1.0, 0.0);
        match self {
            Self::Hwp { spatial, theta } => {
                let jones = hwp_matrix(*theta);
                let h = reg.index_of(spatial, Pol::H)?;
                let v = reg.index_of(spatial, Pol::V)?;
                let mut u = CMatrix::identity(n, n);
                let idx = [h, v];
                for r in 0..2 {
                    for c in 0..2 {
                        u[(idx[r], idx[c])] = jones[(r, c)];
                    }
                }
                Ok(u)
            }
            Self::PhaseShift { spatial, phi } => {
                let mut u = CMatrix::identity(n, n);
                let p = Complex64::from_polar(1.0, *phi);
                for pol in Pol::BOTH {
                    let i = reg.index_of(spatial, pol)?;
                    u[(i, i)] = p;
                }
                Ok(u)
            }
            Self::Pbs { inputs, outputs } => {
                let (a, b) = (&inputs[0], &inputs[1]);
                let (c, d) = (&outputs[0], &outputs[1]);
                let images = vec![
                    (reg.index_of(a, Pol::H)?, vec![(reg.index_of(c, Pol::H)?, one)]),
                    (reg.index_of(a, Pol::V)?, vec![(reg.index_of(d, Pol::V)?, one)]),
                    (reg.index_of(b, Pol::H)?, vec![(reg.index_of(d, Pol::H)?, one)]),
                    (reg.index_of(b, Pol::V)?, vec![(reg.index_of(c, Pol::V)?, one)]),
                ];
                Ok(routed(n, images))
            }
            Self::Bs { inputs, outputs } => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                let mut images = Vec::with_capacity(4);
                for pol in Pol::BOTH {
                    let p = reg.index_of(&outputs[0], pol)?;
                    let q = reg.index_of(&outputs[1], pol)?;
                    images.push((reg.index_of(&inputs[0], pol)?, vec![(p, h), (q, h)]));
                    images.push((reg.index_of(&inputs[1], pol)?, vec![(p, h), (q, -h)]));
                }
                Ok(routed(n, images))
            }
        }
    }
}

/// Builds a unitary from the images of a set of source modes.
///
/// The images of the sources span the target modes; the remaining modes are
/// completed as a permutation that sends targets that are not sources onto
/// sources that are not targets (in index order) and fixes everything else.
fn routed(n: usize, images: Vec<(usize, Vec<(usize, Complex64)>)>) -> CMatrix {
    let mut u = CMatrix::zeros(n, n);
    let sources: BTreeSet<usize> = images.iter().map(|(s, _)| *s).collect();
    let targets: BTreeSet<usize> = images
        .iter()
        .flat_map(|(_, img)| img.iter().map(|(t, _)| *t))
        .collect();
    for (src, img) in &images {
        for &(t, amp) in img {
            u[(t, *src)] += amp;
        }
    }
    let freed = targets.difference(&sources);
    let vacated = sources.difference(&targets);
    for (&from, &to) in freed.zip(vacated) {
        u[(to, from)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        if !sources.contains(&i) && !targets.contains(&i) {
            u[(i, i)] = Complex64::new(1.0, 0.0);
        }
    }
    u
}
