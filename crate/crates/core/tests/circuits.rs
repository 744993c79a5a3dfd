//! Stepwise checks of the circuit-model constructions against hand-written
//! intermediate states.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use qudit_gates::qudit::{states_equal, PureState, SiteDims};
use qudit_gates::synthesis::{build_cnot_circuit, build_toffoli3_circuit, CnotRealization};

fn generic_alphas(n: usize) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(0.3 + 0.11 * k as f64, 0.07 * (k as f64) - 0.2))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|a| a / norm).collect()
}

fn state(dims: &[usize], terms: &[(&[usize], Complex64)]) -> PureState {
    let dims = SiteDims::new(dims.to_vec()).unwrap();
    let mut amps = vec![Complex64::new(0.0, 0.0); dims.total()];
    for (levels, a) in terms {
        amps[dims.index_of(levels).unwrap()] += a;
    }
    PureState::new(dims, amps).unwrap()
}

#[test]
fn cnot_intermediate_states() {
    let circ = build_cnot_circuit();
    let a = generic_alphas(4);
    let h = FRAC_1_SQRT_2;
    let input = state(
        &[3, 2],
        &[(&[0, 0], a[0]), (&[0, 1], a[1]), (&[1, 0], a[2]), (&[1, 1], a[3])],
    );
    let trace = circ.trace(&input).unwrap();
    assert_eq!(trace.len(), 7);

    // after X_A and H
    let phi1 = state(
        &[3, 2],
        &[
            (&[0, 0], (a[0] + a[1]) * h),
            (&[0, 1], (a[0] - a[1]) * h),
            (&[2, 0], (a[2] + a[3]) * h),
            (&[2, 1], (a[2] - a[3]) * h),
        ],
    );
    // after the first partial swap
    let phi2 = state(
        &[3, 2],
        &[
            (&[0, 0], (a[0] + a[1]) * h),
            (&[1, 0], (a[0] - a[1]) * h),
            (&[2, 0], (a[2] + a[3]) * h),
            (&[2, 1], (a[2] - a[3]) * h),
        ],
    );
    // after σ_z on the target
    let phi3 = state(
        &[3, 2],
        &[
            (&[0, 0], (a[0] + a[1]) * h),
            (&[1, 0], (a[0] - a[1]) * h),
            (&[2, 0], (a[2] + a[3]) * h),
            (&[2, 1], (a[3] - a[2]) * h),
        ],
    );
    let out = state(
        &[3, 2],
        &[(&[0, 0], a[0]), (&[0, 1], a[1]), (&[1, 1], a[2]), (&[1, 0], a[3])],
    );
    for (k, expect) in [(1, &phi1), (2, &phi2), (3, &phi3), (6, &out)] {
        assert!(states_equal(&trace[k], expect, false).unwrap(), "after gate {k}");
    }
}

#[test]
fn toffoli_intermediate_states() {
    let circ = build_toffoli3_circuit(CnotRealization::Primitive);
    assert_eq!(circ.dims().as_slice(), &[2, 3, 2]);
    let a = generic_alphas(8);
    let basis: Vec<[usize; 3]> = (0..8).map(|i| [i >> 2, (i >> 1) & 1, i & 1]).collect();
    let terms = |levels: &[[usize; 3]]| -> PureState {
        let t: Vec<(&[usize], Complex64)> = levels
            .iter()
            .zip(&a)
            .map(|(l, &amp)| (l.as_slice(), amp))
            .collect();
        state(&[2, 3, 2], &t)
    };
    let input = terms(&basis);
    let trace = circ.trace(&input).unwrap();
    assert_eq!(trace.len(), 5);

    let psi1 = terms(&[
        [0, 0, 0],
        [0, 0, 1],
        [0, 2, 0],
        [0, 2, 1],
        [0, 1, 0],
        [0, 1, 1],
        [1, 2, 0],
        [1, 2, 1],
    ]);
    let psi2 = terms(&[
        [0, 0, 0],
        [0, 0, 1],
        [0, 2, 0],
        [0, 2, 1],
        [0, 1, 0],
        [0, 1, 1],
        [1, 2, 1],
        [1, 2, 0],
    ]);
    let mut flipped = basis.clone();
    flipped.swap(6, 7);
    let psi3 = terms(&flipped);
    for (k, expect) in [(1, &psi1), (2, &psi2), (4, &psi3)] {
        assert!(states_equal(&trace[k], expect, false).unwrap(), "after gate {k}");
    }
    assert!(trace[4].ancilla_population() < 1e-12);
}

#[test]
fn inlined_toffoli_matches_primitive() {
    use qudit_gates::qudit::{compose_unitary, max_abs_diff, restrict_to_computational};
    let p = build_toffoli3_circuit(CnotRealization::Primitive);
    let i = build_toffoli3_circuit(CnotRealization::Inlined);
    let up = restrict_to_computational(&compose_unitary(&p).unwrap(), p.dims()).unwrap();
    let ui = restrict_to_computational(&compose_unitary(&i).unwrap(), i.dims()).unwrap();
    assert!(max_abs_diff(&up, &ui) < 1e-12);
    assert_eq!(i.count_arity(2), 4);
}
