use serde::{Deserialize, Serialize};

use super::{SchemeDescriptor, SchemeKind, PSWAP_EXITS};
use crate::error::{Error, Result};
use crate::optics::{apply_feed_forward, compile_network, post_select, Mode, PostSelection};
use crate::optics::PROBABILITY_FLOOR;
use crate::qudit::basis_state;

/// A detector pair within one accepted coincidence class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceColumn {
    pub branch: String,
    pub modes: [Mode; 2],
    /// Sign written in front of the column in the published header: the
    /// ancilla columns of the mode-11 classes carry a minus.
    pub header_sign: i8,
}

impl CoincidenceColumn {
    /// e.g. `n(V1')n(H12)`, prefixed with `-` when the header sign is negative.
    pub fn label(&self) -> String {
        let sign = if self.header_sign < 0 { "-" } else { "" };
        format!("{sign}n({})n({})", self.modes[0], self.modes[1])
    }
}

/// Three views of one coincidence expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceCell {
    /// Detection probability, carrying the sign of the pair amplitude before
    /// feed-forward.
    pub signed: f64,
    /// The same after the branch's feed-forward correction.
    pub corrected: f64,
    /// `header_sign × signed`: the value under the published header.
    pub published: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceRow {
    /// Logical input levels.
    pub input: Vec<usize>,
    /// Input written as occupied modes, e.g. `V1'in H2in`.
    pub modes: String,
    pub cells: Vec<CoincidenceCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceTable {
    pub columns: Vec<CoincidenceColumn>,
    pub rows: Vec<CoincidenceRow>,
}

fn signed_probability(a: num_complex::Complex64) -> f64 {
    let p = a.norm_sqr();
    if p < PROBABILITY_FLOOR {
        0.0
    } else {
        p.copysign(a.re)
    }
}

/// Coincidence expectations of the partial-swap scheme for its six basis
/// inputs over the 24 detector pairs of the four accepted classes.
pub fn coincidence_table(scheme: &SchemeDescriptor) -> Result<CoincidenceTable> {
    if scheme.kind != SchemeKind::Pswap || scheme.stages.len() != 1 {
        return Err(Error::Unsupported(format!(
            "coincidence table is defined for the partial-swap scheme, not {}",
            scheme.name
        )));
    }
    scheme.validate()?;
    let stage = &scheme.stages[0];
    let reg = stage.network.registry();
    let u = compile_network(&stage.network)?;

    let mut columns = Vec::new();
    for &(i, aux, j) in &PSWAP_EXITS {
        let branch = stage
            .post_selection
            .branches
            .iter()
            .find(|b| b.slots[0].contains(&Mode::h(i)) && b.slots[1].contains(&Mode::h(j)))
            .ok_or_else(|| Error::SchemeIntegrity(format!("no branch for exit {i}/{j}")))?;
        let pairs = [
            (Mode::h(i), Mode::h(j), 1),
            (Mode::v(i), Mode::h(j), 1),
            (Mode::h(i), Mode::v(j), 1),
            (Mode::v(i), Mode::v(j), 1),
            (Mode::v(aux), Mode::h(j), if j == "11" { -1 } else { 1 }),
            (Mode::v(aux), Mode::v(j), if j == "11" { -1 } else { 1 }),
        ];
        columns.extend(pairs.into_iter().map(|(a, b, s)| CoincidenceColumn {
            branch: branch.label.clone(),
            modes: [a, b],
            header_sign: s,
        }));
    }

    let dims = scheme.input_dims()?;
    let mut rows = Vec::new();
    for index in 0..dims.total() {
        let levels = dims.levels_of(index);
        let input = basis_state(&dims, &levels)?;
        let evolved = scheme.encode(&input)?.evolve(&u)?;
        let mut cells = Vec::with_capacity(columns.len());
        for col in &columns {
            let m = [reg.mode_index(&col.modes[0])?, reg.mode_index(&col.modes[1])?];
            let signed = signed_probability(evolved.occupation_amplitude(&m)?);
            let rule = PostSelection {
                branches: vec![stage.post_selection.branch(&col.branch).cloned().ok_or_else(
                    || Error::SchemeIntegrity(format!("missing branch {}", col.branch)),
                )?],
            };
            let projected = post_select(&evolved, reg, &rule)?.remove(0);
            let corrected = if projected.is_populated() {
                let fixed = apply_feed_forward(&projected, reg, &stage.feed_forward)?;
                signed_probability(fixed.state.amplitude(&m)? * fixed.probability.sqrt())
            } else {
                0.0
            };
            cells.push(CoincidenceCell {
                signed,
                corrected,
                published: f64::from(col.header_sign) * signed,
            });
        }
        let modes = levels
            .iter()
            .enumerate()
            .map(|(k, &l)| scheme.encoding.input[k][l].to_string())
            .collect::<Vec<_>>()
            .join(" ");
        rows.push(CoincidenceRow {
            input: levels,
            modes,
            cells,
        });
    }
    Ok(CoincidenceTable { columns, rows })
}
