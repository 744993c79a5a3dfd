//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Random inputs come from ChaCha8 with fixed seeds.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qudit_gates::optics::{
    compile_network, hwp_matrix, post_select, JointPhotonState,
};
use qudit_gates::qudit::{
    apply_gate, basis_state, compose_unitary, is_unitary, max_abs_diff, restrict_to_computational,
    states_equal, unitarity_deviation, Circuit, PureState, SiteDims,
};
use qudit_gates::schemes::{
    coincidence_table, run_gate, scheme_cnot, scheme_pswap, scheme_toffoli, SchemeDescriptor,
};
use qudit_gates::synthesis::{
    build_cnot_circuit, build_toffoli3_circuit, build_toffoli_n, cnot_matrix, cost_report,
    toffoli_matrix, CnotRealization,
};
use qudit_gates::Error;

const ORACLE_TOL: f64 = 1e-9;
const EXACT_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;
const RANDOM_INPUTS: usize = 100;
const PROPERTY_SAMPLES: usize = 1000;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn state(dims: &[usize], terms: &[(&[usize], Complex64)]) -> PureState {
    let dims = SiteDims::new(dims.to_vec()).unwrap();
    let mut amps = vec![c(0.0); dims.total()];
    for (levels, a) in terms {
        amps[dims.index_of(levels).unwrap()] += a;
    }
    PureState::new(dims, amps).unwrap()
}

fn criterion_1() -> Check {
    let circ = build_cnot_circuit();
    let u = restrict_to_computational(&compose_unitary(&circ).map_err(err)?, circ.dims())
        .map_err(err)?;
    let dev = max_abs_diff(&u, &cnot_matrix());
    ensure(dev <= ORACLE_TOL, format!("restricted unitary off by {dev:e}"))?;

    let a = [c(0.5), Complex64::new(0.1, 0.5), c(-0.3), Complex64::new(0.0, 0.0)];
    let norm = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let a: Vec<Complex64> = a.iter().map(|x| x / norm).collect();
    let h = FRAC_1_SQRT_2;
    let input = state(
        &[3, 2],
        &[(&[0, 0], a[0]), (&[0, 1], a[1]), (&[1, 0], a[2]), (&[1, 1], a[3])],
    );
    let trace = circ.trace(&input).map_err(err)?;
    let checkpoints = [
        (
            1,
            state(
                &[3, 2],
                &[
                    (&[0, 0], (a[0] + a[1]) * h),
                    (&[0, 1], (a[0] - a[1]) * h),
                    (&[2, 0], (a[2] + a[3]) * h),
                    (&[2, 1], (a[2] - a[3]) * h),
                ],
            ),
        ),
        (
            2,
            state(
                &[3, 2],
                &[
                    (&[0, 0], (a[0] + a[1]) * h),
                    (&[1, 0], (a[0] - a[1]) * h),
                    (&[2, 0], (a[2] + a[3]) * h),
                    (&[2, 1], (a[2] - a[3]) * h),
                ],
            ),
        ),
        (
            3,
            state(
                &[3, 2],
                &[
                    (&[0, 0], (a[0] + a[1]) * h),
                    (&[1, 0], (a[0] - a[1]) * h),
                    (&[2, 0], (a[2] + a[3]) * h),
                    (&[2, 1], (a[3] - a[2]) * h),
                ],
            ),
        ),
    ];
    for (k, expect) in &checkpoints {
        ensure(
            states_equal(&trace[*k], expect, false).map_err(err)?,
            format!("checkpoint after gate {k} differs"),
        )?;
    }
    Ok(format!("max |U - CNOT| = {dev:.1e}, 3 checkpoints match"))
}

fn criterion_2() -> Check {
    let circ = build_toffoli3_circuit(CnotRealization::Primitive);
    let u = restrict_to_computational(&compose_unitary(&circ).map_err(err)?, circ.dims())
        .map_err(err)?;
    let dev = max_abs_diff(&u, &toffoli_matrix(2));
    ensure(dev <= ORACLE_TOL, format!("restricted unitary off by {dev:e}"))?;
    let mut worst: f64 = 0.0;
    for i in 0..8 {
        let input = basis_state(circ.dims(), &[i >> 2, (i >> 1) & 1, i & 1]).map_err(err)?;
        worst = worst.max(circ.run(&input).map_err(err)?.ancilla_population());
    }
    ensure(worst <= EXACT_TOL, format!("level-2 population {worst:e}"))?;
    let tally = (circ.count_arity(2), circ.count_arity(1));
    ensure(tally == (3, 2), format!("tally {tally:?}"))?;
    Ok(format!("max dev {dev:.1e}, leakage {worst:.1e}, tally {tally:?}"))
}

fn criterion_3() -> Check {
    let mut parts = Vec::new();
    for n in 2..=5 {
        let plan = build_toffoli_n(n).map_err(err)?;
        let u = restrict_to_computational(
            &compose_unitary(&plan.circuit).map_err(err)?,
            plan.circuit.dims(),
        )
        .map_err(err)?;
        let dev = max_abs_diff(&u, &toffoli_matrix(n));
        ensure(dev <= ORACLE_TOL, format!("n={n}: off by {dev:e}"))?;
        let tally = (plan.two_site_count, plan.single_qudit_count);
        ensure(tally == (2 * n - 1, 2 * n - 2), format!("n={n}: tally {tally:?}"))?;
        parts.push(format!("n={n} {tally:?}"));
    }
    Ok(parts.join(", "))
}

fn random_inputs(scheme: &SchemeDescriptor, seed: u64) -> Vec<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = scheme.input_dims().unwrap();
    (0..RANDOM_INPUTS)
        .map(|_| PureState::random(dims.clone(), &mut rng))
        .collect()
}

fn basis_inputs(scheme: &SchemeDescriptor) -> Vec<PureState> {
    let dims = scheme.input_dims().unwrap();
    (0..dims.total())
        .map(|i| basis_state(&dims, &dims.levels_of(i)).unwrap())
        .collect()
}

/// Worst success deviation and worst infidelity over `inputs`.
fn sweep(scheme: &SchemeDescriptor, inputs: &[PureState]) -> std::result::Result<(f64, f64), String> {
    let expected = scheme.expected_success.value();
    let mut dp: f64 = 0.0;
    let mut df: f64 = 0.0;
    for input in inputs {
        let r = run_gate(scheme, input).map_err(err)?;
        dp = dp.max((r.success_probability - expected).abs());
        df = df.max(1.0 - r.fidelity_vs_ideal);
        ensure(r.leakage <= EXACT_TOL, format!("leakage {:e}", r.leakage))?;
    }
    Ok((dp, df))
}

fn criterion_4() -> Check {
    let scheme = scheme_pswap();
    let table = coincidence_table(&scheme).map_err(err)?;
    for (r, row) in table.rows.iter().enumerate() {
        for (k, cell) in row.cells.iter().enumerate() {
            let expect = if k % 6 == r { 0.125 } else { 0.0 };
            ensure(
                (cell.published - expect).abs() <= EXACT_TOL,
                format!("table row {} column {}: {}", row.modes, table.columns[k].label(), cell.published),
            )?;
        }
    }
    for input in basis_inputs(&scheme) {
        let r = run_gate(&scheme, &input).map_err(err)?;
        ensure(r.branches.len() == 4, format!("{} branches", r.branches.len()))?;
        for b in &r.branches {
            ensure(
                (b.probability - 0.125).abs() <= EXACT_TOL,
                format!("branch {:?} has {}", b.path, b.probability),
            )?;
        }
    }
    let (dp, df) = sweep(&scheme, &random_inputs(&scheme, 4))?;
    ensure(dp <= ORACLE_TOL, format!("random success off by {dp:e}"))?;
    ensure(df <= ORACLE_TOL, format!("random infidelity {df:e}"))?;
    Ok(format!(
        "table 6x24 exact, 4 x 1/8 per basis input, {RANDOM_INPUTS} random: |p - 1/2| <= {dp:.1e}"
    ))
}

fn criterion_5() -> Check {
    let scheme = scheme_cnot();
    let (bp, bf) = sweep(&scheme, &basis_inputs(&scheme))?;
    let (rp, rf) = sweep(&scheme, &random_inputs(&scheme, 5))?;
    let worst_p = bp.max(rp);
    let worst_f = bf.max(rf);
    ensure(worst_p <= ORACLE_TOL, format!("success off by {worst_p:e}"))?;
    ensure(worst_f <= ORACLE_TOL, format!("infidelity {worst_f:e}"))?;

    let dims = scheme.input_dims().map_err(err)?;
    let h = FRAC_1_SQRT_2;
    let plus = PureState::new(dims.clone(), vec![c(h), c(0.0), c(h), c(0.0)]).map_err(err)?;
    let bell = PureState::new(dims, vec![c(h), c(0.0), c(0.0), c(h)]).map_err(err)?;
    let r = run_gate(&scheme, &plus).map_err(err)?;
    let fb = r.conditional_output.fidelity(&bell).map_err(err)?;
    ensure(1.0 - fb <= ORACLE_TOL, format!("Bell fidelity {fb}"))?;

    let stripped = scheme.without_feed_forward();
    let broken = std::iter::once(plus)
        .chain(random_inputs(&scheme, 55))
        .any(|s| matches!(run_gate(&stripped, &s), Err(Error::SchemeIntegrity(_))));
    ensure(broken, "removing feed-forward left every input unanimous")?;
    Ok(format!(
        "|p - 1/8| <= {worst_p:.1e}, 1 - F <= {worst_f:.1e}, Bell F = {fb:.12}, negative control breaks"
    ))
}

fn criterion_6() -> Check {
    let scheme = scheme_toffoli();
    let (bp, bf) = sweep(&scheme, &basis_inputs(&scheme))?;
    let (rp, rf) = sweep(&scheme, &random_inputs(&scheme, 6))?;
    let worst_p = bp.max(rp);
    let worst_f = bf.max(rf);
    ensure(worst_p <= ORACLE_TOL, format!("success off by {worst_p:e}"))?;
    ensure(worst_f <= ORACLE_TOL, format!("infidelity {worst_f:e}"))?;
    Ok(format!("|p - 1/64| <= {worst_p:.1e}, 1 - F <= {worst_f:.1e}"))
}

fn criterion_7() -> Check {
    for m in 3..=10 {
        let r = cost_report(m).map_err(err)?;
        ensure(
            (r.two_site, r.single_qudit) == (2 * m - 3, 2 * m - 4),
            format!("m={m}: {r:?}"),
        )?;
        if m <= 6 {
            let plan = build_toffoli_n(m - 1).map_err(err)?;
            ensure(
                (plan.two_site_count, plan.single_qudit_count) == (r.two_site, r.single_qudit),
                format!("m={m}: builder tallies differ"),
            )?;
        }
    }
    Ok("m = 3..10 match (2m-3, 2m-4); builder agrees for m <= 6".into())
}

fn random_joint_state(photons: usize, modes: usize, rng: &mut ChaCha8Rng) -> JointPhotonState {
    let mut s = JointPhotonState::zeros(photons, modes).unwrap();
    for _ in 0..6 {
        let m: Vec<usize> = (0..photons).map(|_| rng.gen_range(0..modes)).collect();
        s.add_term(&m, Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .unwrap();
    }
    let n = s.norm();
    s.scale(c(1.0 / n));
    s
}

fn criterion_8() -> Check {
    let schemes = [scheme_pswap(), scheme_cnot(), scheme_toffoli()];
    let mut worst: f64 = 0.0;
    let mut networks = 0;
    for scheme in &schemes {
        for stage in &scheme.stages {
            worst = worst.max(unitarity_deviation(&compile_network(&stage.network).map_err(err)?));
            networks += 1;
        }
    }
    let mut circuits: Vec<Circuit> = vec![
        build_cnot_circuit(),
        build_toffoli3_circuit(CnotRealization::Primitive),
        build_toffoli3_circuit(CnotRealization::Inlined),
    ];
    for n in 3..=5 {
        circuits.push(build_toffoli_n(n).map_err(err)?.circuit);
    }
    for circ in &circuits {
        for op in circ.ops() {
            worst = worst.max(unitarity_deviation(op.matrix()));
        }
    }
    ensure(worst <= UNITARY_TOL, format!("unitarity deviation {worst:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut norm_dev: f64 = 0.0;
    for i in 0..PROPERTY_SAMPLES {
        let circ = &circuits[i % circuits.len()];
        let op = &circ.ops()[rng.gen_range(0..circ.len())];
        let psi = PureState::random(circ.dims().clone(), &mut rng);
        norm_dev = norm_dev.max((apply_gate(&psi, op).map_err(err)?.norm() - 1.0).abs());
    }
    let stage = &schemes[0].stages[0];
    let u = compile_network(&stage.network).map_err(err)?;
    let reg = stage.network.registry();
    let mut prob_max: f64 = 0.0;
    for _ in 0..PROPERTY_SAMPLES {
        let s = random_joint_state(2, reg.num_modes(), &mut rng);
        let out = s.evolve(&u).map_err(err)?;
        norm_dev = norm_dev.max((out.norm() - 1.0).abs());
        let total: f64 = post_select(&out, reg, &stage.post_selection)
            .map_err(err)?
            .iter()
            .map(|r| r.probability)
            .sum();
        prob_max = prob_max.max(total);
    }
    ensure(norm_dev <= UNITARY_TOL, format!("norm drift {norm_dev:e}"))?;
    ensure(prob_max <= 1.0 + EXACT_TOL, format!("post-selection total {prob_max}"))?;

    let mut hwp_dev: f64 = 0.0;
    for _ in 0..PROPERTY_SAMPLES {
        let m = hwp_matrix(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let sq = m * m;
        hwp_dev = hwp_dev
            .max((sq[(0, 0)] - c(1.0)).norm())
            .max((sq[(1, 1)] - c(1.0)).norm())
            .max(sq[(0, 1)].norm())
            .max(sq[(1, 0)].norm());
    }
    ensure(hwp_dev <= EXACT_TOL, format!("HWP^2 off identity by {hwp_dev:e}"))?;
    ensure(
        circuits.iter().all(|c| is_unitary(&compose_unitary(c).unwrap(), UNITARY_TOL)),
        "composed circuit not unitary",
    )?;
    Ok(format!(
        "{networks} networks + gates unitary ({worst:.1e}), norm drift {norm_dev:.1e} over {} states, \
         HWP^2 = I ({hwp_dev:.1e}), max post-selected total {prob_max:.3}",
        2 * PROPERTY_SAMPLES
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("circuit CNOT", criterion_1),
        ("three-qubit Toffoli", criterion_2),
        ("n-control Toffoli", criterion_3),
        ("optical P-SWAP", criterion_4),
        ("optical CNOT", criterion_5),
        ("optical Toffoli", criterion_6),
        ("cost report", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
