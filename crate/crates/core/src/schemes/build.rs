use std::collections::{BTreeMap, BTreeSet};

use super::{LogicalEncoding, ModeLevel, SchemeDescriptor, SchemeKind, Stage};
use crate::error::{Error, Result};
use crate::optics::{
    BranchRule, FeedForwardRule, Mode, ModeRegistry, Network, OpticalElement, PostSelection,
};
use crate::rational::Rational;

/// Accepted exits of the partial-swap network: (first-site rail, its
/// ancillary rail, second-site rail).
///
/// The ancilla reaches both `1'` and `1''` through the balanced splitter.
/// Pairing `9` with `1'` and `10` with `1''` keeps the four coincidence
/// classes mutually exclusive.
pub const PSWAP_EXITS: [(&str, &str, &str); 4] = [
    ("9", "1'", "12"),
    ("10", "1''", "12"),
    ("9", "1'", "11"),
    ("10", "1''", "11"),
];

const DUMP: [(&str, &str, &str); 2] = [("9", "1'", "x9"), ("10", "1''", "x10")];

fn exit_label(exit: (&str, &str, &str)) -> String {
    format!("{}+{}|{}", exit.0, exit.1, exit.2)
}

fn set<I: IntoIterator<Item = Mode>>(modes: I) -> BTreeSet<Mode> {
    modes.into_iter().collect()
}

fn qubit(rail: &str) -> BTreeSet<Mode> {
    set([Mode::h(rail), Mode::v(rail)])
}

fn qutrit(rail: &str, aux: &str) -> BTreeSet<Mode> {
    set([Mode::h(rail), Mode::v(rail), Mode::v(aux)])
}

fn qubit_levels(rail: &str) -> Vec<ModeLevel> {
    vec![
        ModeLevel { mode: Mode::h(rail), level: 0 },
        ModeLevel { mode: Mode::v(rail), level: 1 },
    ]
}

fn add_all(net: &mut Network, elements: Vec<OpticalElement>) -> Result<()> {
    for e in elements {
        net.add(e)?;
    }
    Ok(())
}

/// Appends the partial-swap network. The first site enters on `a` (levels
/// 0, 1 as H, V) and `a_aux` (level 2 as V), the second on `b`. The first
/// site leaves on 9 or 10 with its ancilla on `1'` or `1''`, the second on
/// 11 or 12.
fn append_pswap(net: &mut Network, a: &str, a_aux: &str, b: &str) -> Result<()> {
    let hwp = OpticalElement::hwp_deg;
    add_all(
        net,
        vec![
            OpticalElement::pbs(a, "v1", "1", "2"),
            hwp("1", 45.0),
            hwp("2", 45.0),
            OpticalElement::pbs(b, "v2", "3", "4"),
            hwp("3", 22.5),
            hwp("4", 67.5),
        ],
    )?;
    net.mark("first-plates");
    add_all(
        net,
        vec![
            OpticalElement::bs(a_aux, "v3", "1'", "1''"),
            OpticalElement::pbs("4", "2", "5", "6"),
            hwp("5", 22.5),
            hwp("6", 22.5),
            OpticalElement::pbs("3", "1", "7", "8"),
            hwp("7", 67.5),
            hwp("8", 67.5),
        ],
    )?;
    net.mark("second-plates");
    add_all(
        net,
        vec![
            OpticalElement::pbs("8", "5", "9", "10"),
            OpticalElement::pbs("7", "6", "11", "12"),
            hwp("10", 45.0),
            hwp("12", 45.0),
        ],
    )?;
    net.mark("exits");
    Ok(())
}

/// Folds the ancillary rail back onto the first-site rail: V on `1'` (or
/// `1''`) becomes V on 9 (or 10). V already on 9/10 would leave through the
/// dump port.
fn append_merge(net: &mut Network) -> Result<()> {
    for (rail, aux, dump) in DUMP {
        net.add(OpticalElement::pbs(rail, aux, rail, dump))?;
    }
    Ok(())
}

fn network(rails: &[&str]) -> Network {
    Network::new(ModeRegistry::with_rails(rails.iter().copied()).expect("distinct rails"))
}

fn rail_map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

/// A branch per accepted exit; `slots` builds the slot list for each.
fn branches<F>(exits: &[(&str, &str, &str)], slots: F) -> PostSelection
where
    F: Fn((&str, &str, &str)) -> Vec<BTreeSet<Mode>>,
{
    PostSelection {
        branches: exits
            .iter()
            .map(|&e| BranchRule::new(exit_label(e), slots(e)).expect("disjoint slots"))
            .collect(),
    }
}

/// The phase flip on the ancilla that the mode-11 exits need.
fn ancilla_phase_flips() -> FeedForwardRule {
    PSWAP_EXITS
        .iter()
        .filter(|e| e.2 == "11")
        .fold(FeedForwardRule::none(), |ff, &e| {
            ff.on(
                exit_label(e),
                vec![OpticalElement::phase(e.1, std::f64::consts::PI)],
            )
        })
}

/// After merging, the same sign sits on V of the first-site rail.
fn merged_sign_flips() -> FeedForwardRule {
    PSWAP_EXITS
        .iter()
        .filter(|e| e.2 == "11")
        .fold(FeedForwardRule::none(), |ff, &e| {
            ff.on(exit_label(e), vec![OpticalElement::hwp_deg(e.0, 0.0)])
        })
}

fn leak_pattern(slots: Vec<BTreeSet<Mode>>) -> BranchRule {
    let dump = set(DUMP.iter().flat_map(|d| [Mode::h(d.2), Mode::v(d.2)]));
    let slots = slots
        .into_iter()
        .map(|s| if s.is_empty() { dump.clone() } else { s })
        .collect();
    BranchRule::new("dump", slots).expect("disjoint slots")
}

/// Qutrit ⊗ qubit partial swap, success 1/2.
pub fn scheme_pswap() -> SchemeDescriptor {
    let mut net = network(&["1in", "1'in", "2in"]);
    append_pswap(&mut net, "1in", "1'in", "2in").expect("static network");
    let first_site: Vec<ModeLevel> = PSWAP_EXITS[..2]
        .iter()
        .flat_map(|e| {
            [
                ModeLevel { mode: Mode::h(e.0), level: 0 },
                ModeLevel { mode: Mode::v(e.0), level: 1 },
                ModeLevel { mode: Mode::v(e.1), level: 2 },
            ]
        })
        .collect();
    let second_site = [qubit_levels("11"), qubit_levels("12")].concat();
    SchemeDescriptor {
        name: "pswap".into(),
        kind: SchemeKind::Pswap,
        encoding: LogicalEncoding {
            input: vec![
                vec![Mode::h("1in"), Mode::v("1in"), Mode::v("1'in")],
                vec![Mode::h("2in"), Mode::v("2in")],
            ],
            output: vec![first_site, second_site],
        },
        stages: vec![Stage {
            name: "pswap".into(),
            network: net,
            post_selection: branches(&PSWAP_EXITS, |e| vec![qutrit(e.0, e.1), qubit(e.2)]),
            feed_forward: ancilla_phase_flips(),
            rewire: BTreeMap::new(),
            leak_patterns: Vec::new(),
        }],
        expected_success: Rational::new(1, 2),
    }
}

/// First half of the CNOT: borrow the control's level 2, rotate the target,
/// partial swap, phase-flip the target's V. Only the mode-12 exits continue.
/// `carried` rails pass through untouched and are accepted as `carried_slot`.
fn cnot_first_half(
    control: &str,
    target: &str,
    carried: &[&str],
    carried_slot: Option<BTreeSet<Mode>>,
) -> Result<Stage> {
    let rails: Vec<&str> = [control, target].iter().chain(carried).copied().collect();
    let mut net = network(&rails);
    net.add(OpticalElement::pbs(control, "v0", "1in", "1'in"))?;
    net.add(OpticalElement::hwp_deg(target, 22.5))?;
    append_pswap(&mut net, "1in", "1'in", target)?;
    net.add(OpticalElement::hwp_deg("12", 0.0))?;
    let exits = &PSWAP_EXITS[..2];
    let rewire = exits
        .iter()
        .map(|&e| {
            let mut pairs = vec![(e.0, "1in"), (e.1, "1'in"), (e.2, "2in")];
            pairs.extend(carried.iter().map(|r| (*r, *r)));
            (exit_label(e), rail_map(&pairs))
        })
        .collect();
    Ok(Stage {
        name: "cnot-first".into(),
        network: net,
        post_selection: branches(exits, |e| {
            let mut slots = vec![qutrit(e.0, e.1), qubit(e.2)];
            slots.extend(carried_slot.clone());
            slots
        }),
        feed_forward: FeedForwardRule::none(),
        rewire,
        leak_patterns: Vec::new(),
    })
}

/// Second half of the CNOT: partial swap, fold the control back to a qubit,
/// rotate the target. All four exits are kept.
fn cnot_second_half(carried: &[&str], carried_slot: Option<BTreeSet<Mode>>) -> Result<Stage> {
    let rails: Vec<&str> = ["1in", "1'in", "2in"].iter().chain(carried).copied().collect();
    let mut net = network(&rails);
    append_pswap(&mut net, "1in", "1'in", "2in")?;
    append_merge(&mut net)?;
    net.add(OpticalElement::hwp_deg("11", 22.5))?;
    net.add(OpticalElement::hwp_deg("12", 22.5))?;
    let mut leak = vec![BTreeSet::new(), set(qubit("11").into_iter().chain(qubit("12")))];
    leak.extend(carried_slot.clone());
    Ok(Stage {
        name: "cnot-second".into(),
        network: net,
        post_selection: branches(&PSWAP_EXITS, |e| {
            let mut slots = vec![qubit(e.0), qubit(e.2)];
            slots.extend(carried_slot.clone());
            slots
        }),
        feed_forward: merged_sign_flips(),
        rewire: BTreeMap::new(),
        leak_patterns: vec![leak_pattern(leak)],
    })
}

/// Two-photon CNOT, control on photon 1, success 1/8 = 1/4 × 1/2.
pub fn scheme_cnot() -> SchemeDescriptor {
    let first = cnot_first_half("c", "t", &[], None).expect("static network");
    let last = cnot_second_half(&[], None).expect("static network");
    SchemeDescriptor {
        name: "cnot".into(),
        kind: SchemeKind::Cnot,
        encoding: LogicalEncoding {
            input: vec![
                vec![Mode::h("c"), Mode::v("c")],
                vec![Mode::h("t"), Mode::v("t")],
            ],
            output: vec![
                [qubit_levels("9"), qubit_levels("10")].concat(),
                [qubit_levels("11"), qubit_levels("12")].concat(),
            ],
        },
        stages: vec![first, last],
        expected_success: Rational::new(1, 8),
    }
}

/// Three-photon Toffoli without ancilla photons, success
/// 1/64 = 1/2 × 1/8 × 1/4.
///
/// The second control is widened to a qutrit and partially swapped with the
/// first control, which leaves their conjunction on the 11/12 photon. That
/// photon controls a CNOT on the target, and a second partial swap restores
/// both controls.
pub fn scheme_toffoli() -> SchemeDescriptor {
    build_toffoli().expect("static network")
}

fn build_toffoli() -> Result<SchemeDescriptor> {
    let q = qutrit("q", "q'");

    let mut net = network(&["c1", "c2", "t"]);
    net.add(OpticalElement::pbs("c2", "v0", "1in", "1'in"))?;
    append_pswap(&mut net, "1in", "1'in", "c1")?;
    let swap_in = Stage {
        name: "pswap-in".into(),
        network: net,
        post_selection: branches(&PSWAP_EXITS, |e| {
            vec![qubit(e.2), qutrit(e.0, e.1), qubit("t")]
        }),
        feed_forward: ancilla_phase_flips(),
        rewire: PSWAP_EXITS
            .iter()
            .map(|&e| {
                let pairs = [(e.2, "c"), (e.0, "q"), (e.1, "q'"), ("t", "t")];
                (exit_label(e), rail_map(&pairs))
            })
            .collect(),
        leak_patterns: Vec::new(),
    };

    let cnot_first = cnot_first_half("c", "t", &["q", "q'"], Some(q.clone()))?;
    let mut cnot_second = cnot_second_half(&["q", "q'"], Some(q.clone()))?;
    cnot_second.rewire = PSWAP_EXITS
        .iter()
        .map(|&e| {
            let pairs = [(e.0, "c"), (e.2, "t"), ("q", "q"), ("q'", "q'")];
            (exit_label(e), rail_map(&pairs))
        })
        .collect();

    let mut net = network(&["q", "q'", "c", "t"]);
    append_pswap(&mut net, "q", "q'", "c")?;
    append_merge(&mut net)?;
    let exits = &PSWAP_EXITS[..2];
    let swap_out = Stage {
        name: "pswap-out".into(),
        network: net,
        post_selection: branches(exits, |e| vec![qubit(e.2), qubit(e.0), qubit("t")]),
        feed_forward: FeedForwardRule::none(),
        rewire: BTreeMap::new(),
        leak_patterns: vec![leak_pattern(vec![qubit("12"), BTreeSet::new(), qubit("t")])],
    };

    Ok(SchemeDescriptor {
        name: "toffoli".into(),
        kind: SchemeKind::Toffoli,
        encoding: LogicalEncoding {
            input: ["c1", "c2", "t"]
                .iter()
                .map(|r| vec![Mode::h(*r), Mode::v(*r)])
                .collect(),
            output: vec![
                qubit_levels("12"),
                [qubit_levels("9"), qubit_levels("10")].concat(),
                qubit_levels("t"),
            ],
        },
        stages: vec![swap_in, cnot_first, cnot_second, swap_out],
        expected_success: Rational::new(1, 64),
    })
}

/// Optical Toffoli with `controls` control photons. Only the three-photon
/// network is specified; larger ones are not available.
pub fn scheme_toffoli_n(controls: usize) -> Result<SchemeDescriptor> {
    match controls {
        0 | 1 => Err(Error::InvalidArgument(format!(
            "a Toffoli needs at least 2 controls, got {controls}"
        ))),
        2 => Ok(scheme_toffoli()),
        n => Err(Error::Unsupported(format!(
            "no optical network is defined for a {n}-control Toffoli"
        ))),
    }
}
