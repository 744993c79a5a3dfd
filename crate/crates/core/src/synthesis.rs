//! Named qudit gates and the CNOT / Toffoli constructions built from them.
//!
//! Every construction borrows one or more temporary levels (≥ 2) on a single
//! control carrier, runs a short sequence of partial swaps between the
//! computational levels, and returns the carrier to its original subspace.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{CMatrix, Circuit, GateOp, SiteDims};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn permutation(dim: usize, image: impl Fn(usize) -> usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(image(col), col)] = one();
    }
    m
}

/// Exchanges levels `a` and `b` of a `d`-level site.
pub fn gate_level_swap(d: usize, a: usize, b: usize) -> Result<GateOp> {
    if a == b || a >= d || b >= d || d < 2 {
        return Err(Error::InvalidArgument(format!(
            "level swap {a}<->{b} on a {d}-level site"
        )));
    }
    let m = permutation(d, |l| {
        if l == a {
            b
        } else if l == b {
            a
        } else {
            l
        }
    });
    GateOp::new(format!("X[{a}<->{b}]"), m, vec![0])
}

fn qubit_block(d: usize, block: [[Complex64; 2]; 2], name: &str) -> Result<GateOp> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("{name} on a {d}-level site")));
    }
    let mut m = CMatrix::identity(d, d);
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = block[r][c];
        }
    }
    GateOp::new(name, m, vec![0])
}

/// Hadamard on levels {0,1}, identity above.
pub fn gate_h(d: usize) -> Result<GateOp> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    qubit_block(d, [[h, h], [h, -h]], "H")
}

/// `σ_z` on levels {0,1}, identity above.
pub fn gate_sz(d: usize) -> Result<GateOp> {
    let z = Complex64::new(0.0, 0.0);
    qubit_block(d, [[one(), z], [z, -one()]], "Z")
}

/// Partial swap: `|a,b⟩ → |b,a⟩` when both sites are computational,
/// identity whenever either site holds a level ≥ 2.
pub fn gate_pswap(d1: usize, d2: usize) -> Result<GateOp> {
    if d1 < 2 || d2 < 2 {
        return Err(Error::InvalidArgument(format!("P-SWAP on dims ({d1},{d2})")));
    }
    let m = permutation(d1 * d2, |i| {
        let (a, b) = (i / d2, i % d2);
        if a < 2 && b < 2 {
            b * d2 + a
        } else {
            i
        }
    });
    GateOp::new("PSWAP", m, vec![0, 1])
}

/// Flips target levels 0↔1 iff the control sits at level 1.
pub fn gate_cnot(dc: usize, dt: usize) -> Result<GateOp> {
    if dc < 2 || dt < 2 {
        return Err(Error::InvalidArgument(format!("CNOT on dims ({dc},{dt})")));
    }
    let m = permutation(dc * dt, |i| {
        let (c, t) = (i / dt, i % dt);
        if c == 1 && t < 2 {
            c * dt + (1 - t)
        } else {
            i
        }
    });
    GateOp::new("CNOT", m, vec![0, 1])
}

/// The qubit CNOT permutation with control on site 0.
pub fn cnot_matrix() -> CMatrix {
    gate_cnot(2, 2).expect("qubit CNOT").matrix().clone()
}

/// The `(n+1)`-qubit Toffoli permutation, target on the last (least
/// significant) qubit.
pub fn toffoli_matrix(controls: usize) -> CMatrix {
    let dim = 1usize << (controls + 1);
    let all_controls = dim - 2;
    permutation(dim, |i| if i & !1 == all_controls { i ^ 1 } else { i })
}

/// How the CNOT inside the three-qubit Toffoli is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CnotRealization {
    /// One two-site gate on qubits.
    #[default]
    Primitive,
    /// The seven-gate qutrit sequence, which widens the first control to a
    /// qutrit.
    Inlined,
}

fn push(circ: &mut Circuit, gate: Result<GateOp>, sites: Vec<usize>) -> Result<()> {
    circ.push(gate?.on(sites)?)?;
    Ok(())
}

fn append_cnot_sequence(circ: &mut Circuit, control: usize, target: usize) -> Result<()> {
    let dc = circ.dims().dim(control);
    let dt = circ.dims().dim(target);
    push(circ, gate_level_swap(dc, 1, 2), vec![control])?;
    push(circ, gate_h(dt), vec![target])?;
    push(circ, gate_pswap(dc, dt), vec![control, target])?;
    push(circ, gate_sz(dt), vec![target])?;
    push(circ, gate_pswap(dc, dt), vec![control, target])?;
    push(circ, gate_level_swap(dc, 1, 2), vec![control])?;
    push(circ, gate_h(dt), vec![target])?;
    Ok(())
}

/// CNOT on `[3, 2]` from two partial swaps and a borrowed control level.
pub fn build_cnot_circuit() -> Circuit {
    let mut circ = Circuit::new(SiteDims::new(vec![3, 2]).expect("static dims"));
    append_cnot_sequence(&mut circ, 0, 1).expect("static construction is valid");
    circ
}

/// Three-qubit Toffoli from two partial swaps, one CNOT and two qutrit level
/// swaps on the middle control.
///
/// With [`CnotRealization::Inlined`] the first control is a qutrit too
/// (dims `[3, 3, 2]`) so the CNOT can be expanded.
pub fn build_toffoli3_circuit(cnot: CnotRealization) -> Circuit {
    let d1 = match cnot {
        CnotRealization::Primitive => 2,
        CnotRealization::Inlined => 3,
    };
    let mut circ = Circuit::new(SiteDims::new(vec![d1, 3, 2]).expect("static dims"));
    let build = |circ: &mut Circuit| -> Result<()> {
        push(circ, gate_level_swap(3, 1, 2), vec![1])?;
        push(circ, gate_pswap(d1, 3), vec![0, 1])?;
        match cnot {
            CnotRealization::Primitive => push(circ, gate_cnot(2, 2), vec![0, 2])?,
            CnotRealization::Inlined => append_cnot_sequence(circ, 0, 2)?,
        }
        push(circ, gate_pswap(d1, 3), vec![0, 1])?;
        push(circ, gate_level_swap(3, 1, 2), vec![1])?;
        Ok(())
    };
    build(&mut circ).expect("static construction is valid");
    circ
}

/// An n-control Toffoli circuit with its gate tallies.
#[derive(Debug, Clone, PartialEq)]
pub struct ToffoliPlan {
    pub circuit: Circuit,
    pub two_site_count: usize,
    pub single_qudit_count: usize,
    pub controls: usize,
}

impl ToffoliPlan {
    fn from_circuit(circuit: Circuit, controls: usize) -> Self {
        Self {
            two_site_count: circuit.count_arity(2),
            single_qudit_count: circuit.count_arity(1),
            circuit,
            controls,
        }
    }
}

/// n-control Toffoli on `[2, …, 2, n+1, 2]`; the last control is the qudit.
///
/// For `n = 2` this is the three-qubit construction above. For larger `n`
/// the qudit accumulates the conjunction: each round shelves its level 0
/// into a fresh level `k+1` and then partially swaps with the next qubit
/// control, so level 1 survives only while every control seen so far was 1.
/// A CNOT controlled on level 1 of the qudit flips the target, and the
/// rounds are undone in reverse.
pub fn build_toffoli_n(n: usize) -> Result<ToffoliPlan> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Toffoli needs at least 2 controls, got {n}"
        )));
    }
    if n == 2 {
        return Ok(ToffoliPlan::from_circuit(
            build_toffoli3_circuit(CnotRealization::Primitive),
            2,
        ));
    }
    let qudit = n - 1;
    let target = n;
    let mut dims = vec![2; n + 1];
    dims[qudit] = n + 1;
    let mut circ = Circuit::new(SiteDims::new(dims)?);

    let mut rounds: Vec<(GateOp, GateOp)> = Vec::with_capacity(n - 1);
    for k in 1..n {
        let shelve = gate_level_swap(n + 1, 0, k + 1)?.on(vec![qudit])?;
        let swap = gate_pswap(2, n + 1)?.on(vec![qudit - k, qudit])?;
        rounds.push((shelve, swap));
    }
    for (shelve, swap) in &rounds {
        circ.push(shelve.clone())?;
        circ.push(swap.clone())?;
    }
    circ.push(gate_cnot(n + 1, 2)?.on(vec![qudit, target])?)?;
    for (shelve, swap) in rounds.into_iter().rev() {
        circ.push(swap)?;
        circ.push(shelve)?;
    }
    Ok(ToffoliPlan::from_circuit(circ, n))
}

/// Gate cost of an m-qubit Toffoli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub qubits: usize,
    pub two_site: usize,
    pub single_qudit: usize,
}

pub fn cost_report(m: usize) -> Result<CostReport> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!(
            "Toffoli cost needs at least 3 qubits, got {m}"
        )));
    }
    Ok(CostReport {
        qubits: m,
        two_site: 2 * m - 3,
        single_qudit: 2 * m - 4,
    })
}
