//! Mixed-radix state vectors and dense gate application.
//!
//! Site 0 is the leftmost ket factor and the most significant digit of the
//! flat amplitude index, so `|c⟩|t⟩` on dims `[3, 2]` stores `|1,0⟩` at
//! index 2.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for state comparisons and normalization.
pub const STATE_TOL: f64 = 1e-9;
/// Tolerance for unitarity checks.
pub const UNITARY_TOL: f64 = 1e-10;

/// Per-site level counts of a register.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SiteDims(Vec<usize>);

impl SiteDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("register has no sites".into()));
        }
        if let Some((site, d)) = dims.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(Error::InvalidDims(format!(
                "site {site} has {d} levels, need at least 2"
            )));
        }
        Ok(Self(dims))
    }

    /// `n` qubit sites.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn num_sites(&self) -> usize {
        self.0.len()
    }

    pub fn dim(&self, site: usize) -> usize {
        self.0[site]
    }

    /// Total Hilbert-space dimension.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Place value of each site's digit in the flat index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for i in (0..self.0.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.0[i + 1];
        }
        strides
    }

    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.0.len(),
                found: levels.len(),
            });
        }
        let mut index = 0;
        for (site, (&level, &dim)) in levels.iter().zip(&self.0).enumerate() {
            if level >= dim {
                return Err(Error::LevelOutOfRange { site, level, dim });
            }
            index = index * dim + level;
        }
        Ok(index)
    }

    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.0.len()];
        for (slot, &dim) in levels.iter_mut().zip(&self.0).rev() {
            *slot = index % dim;
            index /= dim;
        }
        levels
    }
}

impl TryFrom<Vec<usize>> for SiteDims {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<SiteDims> for Vec<usize> {
    fn from(dims: SiteDims) -> Self {
        dims.0
    }
}

impl fmt::Display for SiteDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A normalized pure state on a mixed-radix register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: SiteDims,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(dims: SiteDims, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                found: amps.len(),
            });
        }
        let norm = norm(&amps);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { dims, amps })
    }

    /// Rescales `amps` to unit norm. Fails on the zero vector.
    pub fn normalized(dims: SiteDims, mut amps: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amps);
        if n < 1e-300 {
            return Err(Error::NotNormalized(n));
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &SiteDims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, levels: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.dims.index_of(levels)?])
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// Total probability on basis states where any site holds a level ≥ 2.
    pub fn ancilla_population(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.dims.levels_of(*i).iter().any(|&l| l >= 2))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Haar-distributed random state: i.i.d. complex Gaussians, normalized.
    pub fn random<R: Rng + ?Sized>(dims: SiteDims, rng: &mut R) -> Self {
        let amps = random_amplitudes(dims.total(), rng);
        Self { dims, amps }
    }

    /// Random state supported only on the levels {0,1} of every site.
    pub fn random_computational<R: Rng + ?Sized>(dims: SiteDims, rng: &mut R) -> Self {
        let k = dims.num_sites();
        let sub = random_amplitudes(1 << k, rng);
        let mut amps = vec![Complex64::new(0.0, 0.0); dims.total()];
        for (bits, a) in sub.into_iter().enumerate() {
            let levels: Vec<usize> = (0..k).map(|s| (bits >> (k - 1 - s)) & 1).collect();
            amps[dims.index_of(&levels).expect("binary levels fit every site")] = a;
        }
        Self { dims, amps }
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        check_same_dims(&self.dims, &other.dims)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

fn random_amplitudes<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let amps: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let n = norm(&amps);
        if n > 1e-6 {
            return amps.into_iter().map(|a| a / n).collect();
        }
    }
}

pub(crate) fn norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn check_same_dims(a: &SiteDims, b: &SiteDims) -> Result<()> {
    if a != b {
        return Err(Error::InvalidDims(format!("{a} vs {b}")));
    }
    Ok(())
}

/// Largest elementwise deviation of `U†U` from the identity.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let prod = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for r in 0..prod.nrows() {
        for c in 0..prod.ncols() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((prod[(r, c)] - target).norm());
        }
    }
    worst
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    unitarity_deviation(m) <= tol
}

/// Largest elementwise `|a - b|`; infinite on shape mismatch.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// A unitary acting on an ordered list of target sites.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    name: String,
    matrix: CMatrix,
    sites: Vec<usize>,
}

impl GateOp {
    pub fn new(name: impl Into<String>, matrix: CMatrix, sites: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if sites.is_empty() {
            return Err(Error::InvalidSites("gate has no target sites".into()));
        }
        let dev = unitarity_deviation(&matrix);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self {
            name: name.into(),
            matrix,
            sites,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn arity(&self) -> usize {
        self.sites.len()
    }

    /// Same gate retargeted onto other sites.
    pub fn on(mut self, sites: Vec<usize>) -> Result<Self> {
        if sites.len() != self.sites.len() {
            return Err(Error::InvalidSites(format!(
                "{} expects {} sites, got {}",
                self.name,
                self.sites.len(),
                sites.len()
            )));
        }
        self.sites = sites;
        Ok(self)
    }

    /// Checks the targets exist, are distinct, and match the matrix size.
    pub fn validate_for(&self, dims: &SiteDims) -> Result<()> {
        for (i, &s) in self.sites.iter().enumerate() {
            if s >= dims.num_sites() {
                return Err(Error::InvalidSites(format!(
                    "{}: site {s} outside {}-site register",
                    self.name,
                    dims.num_sites()
                )));
            }
            if self.sites[..i].contains(&s) {
                return Err(Error::InvalidSites(format!("{}: site {s} repeated", self.name)));
            }
        }
        let local: usize = self.sites.iter().map(|&s| dims.dim(s)).product();
        if local != self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: local,
                found: self.matrix.nrows(),
            });
        }
        Ok(())
    }

    /// Offsets of the local basis states relative to a base index, and the
    /// base indices (all target digits zero).
    fn layout(&self, dims: &SiteDims) -> (Vec<usize>, Vec<usize>) {
        let strides = dims.strides();
        let local_dims: Vec<usize> = self.sites.iter().map(|&s| dims.dim(s)).collect();
        let local_total: usize = local_dims.iter().product();
        let offsets = (0..local_total)
            .map(|mut t| {
                let mut off = 0;
                for (k, &d) in local_dims.iter().enumerate().rev() {
                    off += (t % d) * strides[self.sites[k]];
                    t /= d;
                }
                off
            })
            .collect();
        let bases = (0..dims.total())
            .filter(|&i| {
                self.sites
                    .iter()
                    .all(|&s| (i / strides[s]).is_multiple_of(dims.dim(s)))
            })
            .collect();
        (offsets, bases)
    }

    /// The gate embedded as a full-register matrix.
    pub fn embed(&self, dims: &SiteDims) -> Result<CMatrix> {
        self.validate_for(dims)?;
        let (offsets, bases) = self.layout(dims);
        let mut full = CMatrix::zeros(dims.total(), dims.total());
        for &b in &bases {
            for (r, &ro) in offsets.iter().enumerate() {
                for (c, &co) in offsets.iter().enumerate() {
                    full[(b + ro, b + co)] = self.matrix[(r, c)];
                }
            }
        }
        Ok(full)
    }
}

/// An ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    dims: SiteDims,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(dims: SiteDims) -> Self {
        Self {
            dims,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.validate_for(&self.dims)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn dims(&self) -> &SiteDims {
        &self.dims
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn count_arity(&self, arity: usize) -> usize {
        self.ops.iter().filter(|op| op.arity() == arity).count()
    }

    /// Runs the circuit gate by gate, returning the state after every gate.
    pub fn trace(&self, input: &PureState) -> Result<Vec<PureState>> {
        let mut out = Vec::with_capacity(self.ops.len());
        let mut state = input.clone();
        for op in &self.ops {
            state = apply_gate(&state, op)?;
            out.push(state.clone());
        }
        Ok(out)
    }

    pub fn run(&self, input: &PureState) -> Result<PureState> {
        self.ops
            .iter()
            .try_fold(input.clone(), |state, op| apply_gate(&state, op))
    }
}

/// `|levels⟩` on `dims`.
pub fn basis_state(dims: &SiteDims, levels: &[usize]) -> Result<PureState> {
    let index = dims.index_of(levels)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); dims.total()];
    amps[index] = Complex64::new(1.0, 0.0);
    PureState::new(dims.clone(), amps)
}

/// `U|ψ⟩` with `U` acting on the gate's sites only.
pub fn apply_gate(state: &PureState, gate: &GateOp) -> Result<PureState> {
    gate.validate_for(&state.dims)?;
    let (offsets, bases) = gate.layout(&state.dims);
    let m = gate.matrix();
    let mut out = state.amps.clone();
    let mut local = vec![Complex64::new(0.0, 0.0); offsets.len()];
    for &b in &bases {
        for (slot, &o) in local.iter_mut().zip(&offsets) {
            *slot = state.amps[b + o];
        }
        for (r, &ro) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, v) in local.iter().enumerate() {
                acc += m[(r, c)] * v;
            }
            out[b + ro] = acc;
        }
    }
    Ok(PureState {
        dims: state.dims.clone(),
        amps: out,
    })
}

/// Product of the embedded gate unitaries, first gate rightmost.
pub fn compose_unitary(circuit: &Circuit) -> Result<CMatrix> {
    let n = circuit.dims.total();
    circuit
        .ops
        .iter()
        .try_fold(CMatrix::identity(n, n), |acc, op| Ok(op.embed(&circuit.dims)? * acc))
}

/// Indices of the basis states with every site in {0,1}, ordered as a
/// binary number with site 0 most significant.
pub fn computational_indices(dims: &SiteDims) -> Vec<usize> {
    let k = dims.num_sites();
    (0..1usize << k)
        .map(|bits| {
            let levels: Vec<usize> = (0..k).map(|s| (bits >> (k - 1 - s)) & 1).collect();
            dims.index_of(&levels).expect("binary levels fit every site")
        })
        .collect()
}

/// The `2^k × 2^k` block of `u` on the all-sites-computational subspace.
pub fn restrict_to_computational(u: &CMatrix, dims: &SiteDims) -> Result<CMatrix> {
    if u.nrows() != dims.total() || u.ncols() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: u.nrows(),
        });
    }
    let idx = computational_indices(dims);
    Ok(CMatrix::from_fn(idx.len(), idx.len(), |r, c| u[(idx[r], idx[c])]))
}

/// Amplitude-wise equality within [`STATE_TOL`], optionally after removing
/// the best-fit global phase.
pub fn states_equal(a: &PureState, b: &PureState, up_to_global_phase: bool) -> Result<bool> {
    check_same_dims(&a.dims, &b.dims)?;
    let phase = if up_to_global_phase {
        let overlap: Complex64 = b.amps.iter().zip(&a.amps).map(|(x, y)| x.conj() * y).sum();
        if overlap.norm() > 1e-300 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(a
        .amps
        .iter()
        .zip(&b.amps)
        .all(|(x, y)| (x - phase * y).norm() <= STATE_TOL))
}
