//! Multi-photon states as coefficient tensors over the mode basis.
//!
//! Entry `(m_0, …, m_{N-1})` is the coefficient of `a†_{m_0} ⋯ a†_{m_{N-1}}`
//! acting on vacuum, with photon 0 the most significant tensor index. Linear
//! optics acts on every index independently, so evolution is `U ⊗ ⋯ ⊗ U`.
//! Detection statistics only depend on the symmetrized coefficients, see
//! [`JointPhotonState::occupation_amplitude`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qudit::{norm, CMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct JointPhotonState {
    photons: usize,
    modes: usize,
    amps: Vec<Complex64>,
}

impl JointPhotonState {
    pub fn zeros(photons: usize, modes: usize) -> Result<Self> {
        if photons == 0 || modes == 0 {
            return Err(Error::InvalidArgument(format!(
                "{photons} photons over {modes} modes"
            )));
        }
        let len = modes
            .checked_pow(photons as u32)
            .filter(|&l| l <= 1 << 26)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("{photons} photons over {modes} modes is too large"))
            })?;
        Ok(Self {
            photons,
            modes,
            amps: vec![ZERO; len],
        })
    }

    /// One photon per listed mode, amplitude 1.
    pub fn basis(modes: usize, occupied: &[usize]) -> Result<Self> {
        let mut s = Self::zeros(occupied.len(), modes)?;
        s.add_term(occupied, Complex64::new(1.0, 0.0))?;
        Ok(s)
    }

    /// Tensor product of single-photon superpositions.
    pub fn product(modes: usize, factors: &[Vec<(usize, Complex64)>]) -> Result<Self> {
        let mut s = Self::zeros(factors.len(), modes)?;
        let mut idx = vec![0; factors.len()];
        s.product_rec(factors, 0, Complex64::new(1.0, 0.0), &mut idx)?;
        Ok(s)
    }

    fn product_rec(
        &mut self,
        factors: &[Vec<(usize, Complex64)>],
        depth: usize,
        coef: Complex64,
        idx: &mut Vec<usize>,
    ) -> Result<()> {
        if depth == factors.len() {
            return self.add_term(idx, coef);
        }
        for &(m, a) in &factors[depth] {
            idx[depth] = m;
            self.product_rec(factors, depth + 1, coef * a, idx)?;
        }
        Ok(())
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn flat(&self, modes: &[usize]) -> Result<usize> {
        if modes.len() != self.photons {
            return Err(Error::DimensionMismatch {
                expected: self.photons,
                found: modes.len(),
            });
        }
        let mut i = 0;
        for &m in modes {
            if m >= self.modes {
                return Err(Error::DimensionMismatch {
                    expected: self.modes,
                    found: m,
                });
            }
            i = i * self.modes + m;
        }
        Ok(i)
    }

    pub fn unflat(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.photons];
        for slot in out.iter_mut().rev() {
            *slot = i % self.modes;
            i /= self.modes;
        }
        out
    }

    pub fn amplitude(&self, modes: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.flat(modes)?])
    }

    pub fn add_term(&mut self, modes: &[usize], amp: Complex64) -> Result<()> {
        let i = self.flat(modes)?;
        self.amps[i] += amp;
        Ok(())
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= factor);
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// Nonzero entries as `(per-photon modes, amplitude)`.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, &a)| (self.unflat(i), a))
    }

    /// Applies `u` to every photon index.
    pub fn evolve(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.modes || u.ncols() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: u.nrows(),
            });
        }
        let columns: Vec<Vec<(usize, Complex64)>> = (0..self.modes)
            .map(|c| {
                (0..self.modes)
                    .filter_map(|r| {
                        let v = u[(r, c)];
                        (v.norm_sqr() > 0.0).then_some((r, v))
                    })
                    .collect()
            })
            .collect();
        let mut cur = self.amps.clone();
        let mut next = vec![ZERO; cur.len()];
        let mut stride = cur.len();
        for _ in 0..self.photons {
            stride /= self.modes;
            next.iter_mut().for_each(|a| *a = ZERO);
            for (i, &a) in cur.iter().enumerate() {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let m = (i / stride) % self.modes;
                let base = i - m * stride;
                for &(r, v) in &columns[m] {
                    next[base + r * stride] += v * a;
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(Self {
            photons: self.photons,
            modes: self.modes,
            amps: cur,
        })
    }

    /// Amplitude of the occupation state with one photon in each of the
    /// (distinct) listed modes: the sum of the coefficients over every
    /// assignment of photons to those modes.
    pub fn occupation_amplitude(&self, modes: &[usize]) -> Result<Complex64> {
        if modes.len() != self.photons {
            return Err(Error::DimensionMismatch {
                expected: self.photons,
                found: modes.len(),
            });
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::InvalidArgument(format!("mode {m} listed twice")));
            }
        }
        let mut total = ZERO;
        for perm in permutations(self.photons) {
            let assigned: Vec<usize> = perm.iter().map(|&k| modes[k]).collect();
            total += self.amplitude(&assigned)?;
        }
        Ok(total)
    }
}

/// All permutations of `0..n` (n is at most a handful of photons).
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn swap01(n: usize) -> CMatrix {
        let mut u = CMatrix::identity(n, n);
        u[(0, 0)] = ZERO;
        u[(1, 1)] = ZERO;
        u[(0, 1)] = c(1.0);
        u[(1, 0)] = c(1.0);
        u
    }

    #[test]
    fn single_photon_is_matrix_vector() {
        let v = vec![(0, c(0.6)), (2, Complex64::new(0.0, 0.8))];
        let s = JointPhotonState::product(3, &[v]).unwrap();
        let u = swap01(3);
        let out = s.evolve(&u).unwrap();
        let expect = &u * DVector::from_vec(s.amplitudes().to_vec());
        assert_eq!(out.amplitudes(), expect.as_slice());
    }

    #[test]
    fn product_stays_product() {
        let a = vec![(0, c(0.6)), (1, c(0.8))];
        let b = vec![(2, c(1.0))];
        let s = JointPhotonState::product(3, &[a.clone(), b.clone()]).unwrap();
        let u = swap01(3);
        let out = s.evolve(&u).unwrap();
        let ua: Vec<(usize, Complex64)> = vec![(1, c(0.6)), (0, c(0.8))];
        let expect = JointPhotonState::product(3, &[ua, b]).unwrap();
        assert_eq!(out, expect);
    }

    #[test]
    fn shape_mismatch() {
        let s = JointPhotonState::basis(4, &[0, 1]).unwrap();
        assert!(s.evolve(&CMatrix::identity(3, 3)).is_err());
        assert!(s.amplitude(&[0]).is_err());
    }

    #[test]
    fn occupation_sums_orderings() {
        let mut s = JointPhotonState::zeros(2, 3).unwrap();
        s.add_term(&[0, 2], c(0.25)).unwrap();
        s.add_term(&[2, 0], c(0.5)).unwrap();
        assert_eq!(s.occupation_amplitude(&[2, 0]).unwrap(), c(0.75));
        assert!(s.occupation_amplitude(&[1, 1]).is_err());
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}
