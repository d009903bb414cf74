//! Dense statevector kernel.
//!
//! Basis index `i` is read big-endian: qubit `q` of an `n`-qubit register is
//! bit `n - 1 - q` of `i`, so qubit 0 is the most significant bit. Every
//! "prefix" in this crate is a run of leading qubits starting at qubit 0.

use num_complex::Complex64;
use thiserror::Error;

pub mod matrices;

pub use matrices::{Matrix2, Matrix4};

/// A single complex amplitude.
pub type Amplitude = Complex64;

/// Largest register width `StateVector` will allocate (2^26 amplitudes, 1 GiB).
pub const MAX_QUBITS: usize = 26;

/// End-to-end normalization tolerance.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Per-gate tolerance used for unitarity checks.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("unsupported register width {0} (must be 1..={MAX_QUBITS})")]
    UnsupportedWidth(usize),
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} used more than once in a single operation")]
    DuplicateQubit(usize),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NonUnitary(f64),
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("suffix length {m} exceeds register width {n}")]
    SuffixTooLong { m: usize, n: usize },
    #[error("amplitude count {0} is not a power of two >= 2")]
    BadLength(usize),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Amplitude>,
}

fn check_width(n: usize) -> Result<(), StateError> {
    if n == 0 || n > MAX_QUBITS {
        Err(StateError::UnsupportedWidth(n))
    } else {
        Ok(())
    }
}

impl StateVector {
    /// Equal superposition: every amplitude is `1/sqrt(2^n)`.
    pub fn uniform(n: usize) -> Result<Self, StateError> {
        check_width(n)?;
        let dim = 1usize << n;
        let a = Amplitude::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            num_qubits: n,
            amps: vec![a; dim],
        })
    }

    /// Computational basis state `|i>`.
    pub fn basis(n: usize, index: usize) -> Result<Self, StateError> {
        check_width(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(StateError::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![Amplitude::new(0.0, 0.0); dim];
        amps[index] = Amplitude::new(1.0, 0.0);
        Ok(Self {
            num_qubits: n,
            amps,
        })
    }

    /// Wraps raw amplitudes. The length must be a power of two; no
    /// normalization is performed or required.
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self, StateError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(StateError::BadLength(len));
        }
        let n = len.trailing_zeros() as usize;
        check_width(n)?;
        if let Some(i) = amps
            .iter()
            .position(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(StateError::NonFinite(i));
        }
        Ok(Self {
            num_qubits: n,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude> {
        self.amps
    }

    pub fn amplitude(&self, index: usize) -> Result<Amplitude, StateError> {
        self.amps
            .get(index)
            .copied()
            .ok_or(StateError::IndexOutOfRange {
                index,
                dim: self.dim(),
            })
    }

    /// Bit mask selecting `qubit` inside a basis index.
    #[inline]
    pub fn qubit_mask(&self, qubit: usize) -> usize {
        1usize << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), StateError> {
        if qubit >= self.num_qubits {
            Err(StateError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn check_pair(&self, q1: usize, q2: usize) -> Result<(), StateError> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(StateError::DuplicateQubit(q1));
        }
        Ok(())
    }

    /// Applies a 2x2 unitary to `qubit`.
    pub fn apply_one_qubit(&mut self, qubit: usize, u: &Matrix2) -> Result<(), StateError> {
        self.check_qubit(qubit)?;
        let dev = matrices::unitarity_deviation2(u);
        if dev > UNITARY_TOLERANCE {
            return Err(StateError::NonUnitary(dev));
        }
        self.apply_one_qubit_unchecked(qubit, u);
        Ok(())
    }

    pub(crate) fn apply_one_qubit_unchecked(&mut self, qubit: usize, u: &Matrix2) {
        let mask = self.qubit_mask(qubit);
        for i in 0..self.amps.len() {
            if i & mask != 0 {
                continue;
            }
            let j = i | mask;
            let a0 = self.amps[i];
            let a1 = self.amps[j];
            self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[j] = u[1][0] * a0 + u[1][1] * a1;
        }
    }

    /// Applies a 4x4 unitary to the ordered pair `(q1, q2)`; `q1` is the
    /// high bit of the matrix's row/column index.
    pub fn apply_two_qubit(&mut self, q1: usize, q2: usize, u: &Matrix4) -> Result<(), StateError> {
        self.check_pair(q1, q2)?;
        let dev = matrices::unitarity_deviation4(u);
        if dev > UNITARY_TOLERANCE {
            return Err(StateError::NonUnitary(dev));
        }
        self.apply_two_qubit_unchecked(q1, q2, u);
        Ok(())
    }

    pub(crate) fn apply_two_qubit_unchecked(&mut self, q1: usize, q2: usize, u: &Matrix4) {
        let m1 = self.qubit_mask(q1);
        let m2 = self.qubit_mask(q2);
        for i in 0..self.amps.len() {
            if i & (m1 | m2) != 0 {
                continue;
            }
            let idx = [i, i | m2, i | m1, i | m1 | m2];
            let v = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amps[k] = u[r][0] * v[0] + u[r][1] * v[1] + u[r][2] * v[2] + u[r][3] * v[3];
            }
        }
    }

    /// Negates every amplitude whose first `n - m` bits agree with `target`.
    ///
    /// Because the prefix occupies the most significant bits, the affected
    /// indices form the contiguous block `[(x >> m) << m, ((x >> m) + 1) << m)`.
    pub fn apply_prefix_phase_flip(&mut self, target: usize, m: usize) -> Result<(), StateError> {
        let n = self.num_qubits;
        if m > n {
            return Err(StateError::SuffixTooLong { m, n });
        }
        if target >= self.dim() {
            return Err(StateError::IndexOutOfRange {
                index: target,
                dim: self.dim(),
            });
        }
        let start = (target >> m) << m;
        let end = start + (1usize << m);
        for a in &mut self.amps[start..end] {
            *a = -*a;
        }
        Ok(())
    }

    /// Two-qubit reflection `I - 2|s2><s2|` on `(qa, qb)`, where `|s2>` is the
    /// uniform two-qubit state. Inside each 4-amplitude group this is
    /// `v_j <- v_j - (v_0 + v_1 + v_2 + v_3) / 2`.
    pub fn apply_diffuser2(&mut self, qa: usize, qb: usize) -> Result<(), StateError> {
        self.check_pair(qa, qb)?;
        let ma = self.qubit_mask(qa);
        let mb = self.qubit_mask(qb);
        let both = ma | mb;
        for i in 0..self.amps.len() {
            if i & both != 0 {
                continue;
            }
            let (i1, i2, i3) = (i | mb, i | ma, i | both);
            let half = (self.amps[i] + self.amps[i1] + self.amps[i2] + self.amps[i3]) * 0.5;
            self.amps[i] -= half;
            self.amps[i1] -= half;
            self.amps[i2] -= half;
            self.amps[i3] -= half;
        }
        Ok(())
    }

    /// Multi-controlled Z: negates basis states whose `controls` and `target`
    /// bits are all 1. With no controls this is a plain Z.
    pub fn apply_mcz(&mut self, controls: &[usize], target: usize) -> Result<(), StateError> {
        self.check_qubit(target)?;
        let mut mask = self.qubit_mask(target);
        for &c in controls {
            self.check_qubit(c)?;
            let cm = self.qubit_mask(c);
            if mask & cm != 0 {
                return Err(StateError::DuplicateQubit(c));
            }
            mask |= cm;
        }
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a = -*a;
            }
        }
        Ok(())
    }

    pub fn apply_swap(&mut self, q1: usize, q2: usize) -> Result<(), StateError> {
        self.check_pair(q1, q2)?;
        let m1 = self.qubit_mask(q1);
        let m2 = self.qubit_mask(q2);
        for i in 0..self.amps.len() {
            // visit each (…1…0…) / (…0…1…) pair once
            if i & m1 != 0 && i & m2 == 0 {
                self.amps.swap(i, i ^ m1 ^ m2);
            }
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> Result<Amplitude, StateError> {
        if self.num_qubits != other.num_qubits {
            return Err(StateError::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn probability(&self, index: usize) -> Result<f64, StateError> {
        Ok(self.amplitude(index)?.norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Passes iff the L2 norm is within [`NORM_TOLERANCE`] of 1.
    pub fn assert_normalized(&self) -> Result<(), StateError> {
        let norm = self.norm();
        if (norm - 1.0).abs() <= NORM_TOLERANCE {
            Ok(())
        } else {
            Err(StateError::NotNormalized(norm))
        }
    }

    /// Most probable basis index and its probability. Ties resolve to the
    /// smallest index.
    pub fn most_probable(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > best.1 {
                best = (i, p);
            }
        }
        best
    }

    /// Total probability that the first `k` qubits read `prefix`.
    pub fn prefix_probability(&self, prefix: usize, k: usize) -> Result<f64, StateError> {
        let n = self.num_qubits;
        if k > n {
            return Err(StateError::SuffixTooLong { m: k, n });
        }
        if prefix >= 1usize << k {
            return Err(StateError::IndexOutOfRange {
                index: prefix,
                dim: 1 << k,
            });
        }
        let span = 1usize << (n - k);
        let start = prefix * span;
        Ok(self.amps[start..start + span]
            .iter()
            .map(|a| a.norm_sqr())
            .sum())
    }

    /// Probabilities of the `2^(n-k)` basis states whose first `k` qubits read `prefix`.
    pub fn block_probabilities(&self, prefix: usize, k: usize) -> Result<Vec<f64>, StateError> {
        let n = self.num_qubits;
        if k > n {
            return Err(StateError::SuffixTooLong { m: k, n });
        }
        if prefix >= 1usize << k {
            return Err(StateError::IndexOutOfRange {
                index: prefix,
                dim: 1 << k,
            });
        }
        let span = 1usize << (n - k);
        let start = prefix * span;
        Ok(self.amps[start..start + span]
            .iter()
            .map(|a| a.norm_sqr())
            .collect())
    }

    /// Tensor product `self ⊗ other`; `self` supplies the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, StateError> {
        let n = self.num_qubits + other.num_qubits;
        check_width(n)?;
        let mut amps = Vec::with_capacity(1usize << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector {
            num_qubits: n,
            amps,
        })
    }

    /// Relabels qubits: qubit `q` of `self` becomes qubit `placement[q]` of a
    /// register of width `width`. Qubits of the new register that receive no
    /// source qubit are `|0>`.
    pub fn embed(&self, placement: &[usize], width: usize) -> Result<StateVector, StateError> {
        check_width(width)?;
        if placement.len() != self.num_qubits {
            return Err(StateError::DimensionMismatch {
                left: placement.len(),
                right: self.num_qubits,
            });
        }
        let mut seen = vec![false; width];
        for &p in placement {
            if p >= width {
                return Err(StateError::QubitOutOfRange {
                    qubit: p,
                    num_qubits: width,
                });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(StateError::DuplicateQubit(p));
            }
        }
        let masks: Vec<usize> = placement
            .iter()
            .map(|&p| 1usize << (width - 1 - p))
            .collect();
        let mut out = vec![Amplitude::new(0.0, 0.0); 1usize << width];
        for (i, a) in self.amps.iter().enumerate() {
            let mut j = 0;
            for (q, m) in masks.iter().enumerate() {
                if i & self.qubit_mask(q) != 0 {
                    j |= m;
                }
            }
            out[j] = *a;
        }
        Ok(StateVector {
            num_qubits: width,
            amps: out,
        })
    }

    /// Inverse of [`StateVector::embed`]: reads qubit `placement[q]` of `self`
    /// as qubit `q` of the result, requiring every other qubit to be `|0>`.
    /// Returns the extracted state and the probability mass that was found
    /// outside the all-zero subspace of the dropped qubits.
    pub fn extract(&self, placement: &[usize]) -> Result<(StateVector, f64), StateError> {
        let k = placement.len();
        check_width(k)?;
        let mut seen = vec![false; self.num_qubits];
        for &p in placement {
            self.check_qubit(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(StateError::DuplicateQubit(p));
            }
        }
        let kept: usize = placement.iter().map(|&p| self.qubit_mask(p)).sum();
        let mut out = vec![Amplitude::new(0.0, 0.0); 1usize << k];
        let mut leaked = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if i & !kept != 0 {
                leaked += a.norm_sqr();
                continue;
            }
            let mut j = 0;
            for (q, &p) in placement.iter().enumerate() {
                if i & self.qubit_mask(p) != 0 {
                    j |= 1usize << (k - 1 - q);
                }
            }
            out[j] = *a;
        }
        Ok((
            StateVector {
                num_qubits: k,
                amps: out,
            },
            leaked,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use matrices::*;

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    #[test]
    fn uniform_values() {
        let s = StateVector::uniform(2).unwrap();
        assert!(s.amplitudes().iter().all(|a| *a == c(0.5)));
        let s = StateVector::uniform(1).unwrap();
        assert_abs_diff_eq!(
            s.amplitudes()[0].re,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        let s = StateVector::uniform(10).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert_eq!(
            StateVector::uniform(0),
            Err(StateError::UnsupportedWidth(0))
        );
        assert!(StateVector::uniform(MAX_QUBITS + 1).is_err());
    }

    #[test]
    fn basis_is_big_endian() {
        let s = StateVector::basis(4, 13).unwrap();
        assert_eq!(s.amplitudes()[13], c(1.0));
        // 13 = 1101: qubits 0, 1, 3 are set
        let set: Vec<usize> = (0..4).filter(|&q| 13 & s.qubit_mask(q) != 0).collect();
        assert_eq!(set, vec![0, 1, 3]);
        assert_eq!(StateVector::basis(2, 3).unwrap().amplitudes()[3], c(1.0));
        assert_eq!(StateVector::basis(3, 0).unwrap().amplitudes()[0], c(1.0));
        assert!(matches!(
            StateVector::basis(2, 4),
            Err(StateError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn hadamard_and_identity() {
        let mut s = StateVector::basis(1, 0).unwrap();
        s.apply_one_qubit(0, &hadamard()).unwrap();
        for a in s.amplitudes() {
            assert_abs_diff_eq!(a.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        }
        let u = StateVector::uniform(3).unwrap();
        let mut s = u.clone();
        s.apply_one_qubit(1, &identity2()).unwrap();
        assert_eq!(s, u);
        for q in 0..3 {
            s.apply_one_qubit(q, &hadamard()).unwrap();
            s.apply_one_qubit(q, &hadamard()).unwrap();
        }
        for (a, b) in s.amplitudes().iter().zip(u.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_unitary_and_bad_indices() {
        let mut s = StateVector::uniform(2).unwrap();
        let bad = [[c(1.0), c(1.0)], [c(0.0), c(1.0)]];
        assert!(matches!(
            s.apply_one_qubit(0, &bad),
            Err(StateError::NonUnitary(_))
        ));
        assert!(matches!(
            s.apply_one_qubit(2, &hadamard()),
            Err(StateError::QubitOutOfRange { .. })
        ));
        assert_eq!(
            s.apply_two_qubit(1, 1, &cz()),
            Err(StateError::DuplicateQubit(1))
        );
        let mut bad4 = cz();
        bad4[0][0] = c(2.0);
        assert!(matches!(
            s.apply_two_qubit(0, 1, &bad4),
            Err(StateError::NonUnitary(_))
        ));
    }

    #[test]
    fn swap_and_cz() {
        let mut s = StateVector::basis(2, 0b01).unwrap();
        s.apply_two_qubit(0, 1, &swap()).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b10).unwrap());
        let mut s = StateVector::basis(2, 0b01).unwrap();
        s.apply_swap(0, 1).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b10).unwrap());
        let mut s = StateVector::basis(2, 3).unwrap();
        s.apply_two_qubit(0, 1, &cz()).unwrap();
        assert_eq!(s.amplitudes()[3], c(-1.0));
    }

    #[test]
    fn diffuser_kernel_matches_matrix() {
        // D2 on a 3-qubit state over a non-adjacent, reversed pair
        let amps: Vec<Amplitude> = (0..8)
            .map(|i| Amplitude::new(i as f64 * 0.1 - 0.3, (i % 3) as f64 * 0.05))
            .collect();
        let base = StateVector::from_amplitudes(amps).unwrap();
        let mut fast = base.clone();
        fast.apply_diffuser2(2, 0).unwrap();
        let mut slow = base;
        slow.apply_two_qubit(2, 0, &diffuser2()).unwrap();
        for (a, b) in fast.amplitudes().iter().zip(slow.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn prefix_flip_examples() {
        let mut s = StateVector::uniform(2).unwrap();
        s.apply_prefix_phase_flip(3, 0).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.5), c(0.5), c(0.5), c(-0.5)]);

        let mut s = StateVector::uniform(2).unwrap();
        s.apply_prefix_phase_flip(1, 2).unwrap();
        assert!(s.amplitudes().iter().all(|a| *a == c(-0.5)));

        // brute-force prefix comparison over all 16 indices
        let mut s = StateVector::uniform(4).unwrap();
        s.apply_prefix_phase_flip(13, 2).unwrap();
        for i in 0..16usize {
            let expect = if (i >> 2) == (13 >> 2) { -0.25 } else { 0.25 };
            assert_eq!(s.amplitudes()[i], c(expect), "index {i}");
        }
        assert_eq!(
            s.apply_prefix_phase_flip(0, 5),
            Err(StateError::SuffixTooLong { m: 5, n: 4 })
        );
    }

    #[test]
    fn mcz_negates_all_ones() {
        let mut s = StateVector::uniform(3).unwrap();
        s.apply_mcz(&[0, 2], 1).unwrap();
        for i in 0..8 {
            let expect = if i == 7 { -1.0 } else { 1.0 } / 8f64.sqrt();
            assert_abs_diff_eq!(s.amplitudes()[i].re, expect, epsilon = 1e-15);
        }
        assert_eq!(s.apply_mcz(&[1], 1), Err(StateError::DuplicateQubit(1)));
    }

    #[test]
    fn overlap_probability_normalization() {
        let s = StateVector::uniform(3).unwrap();
        assert!((s.overlap(&s).unwrap() - c(1.0)).norm() < 1e-15);
        assert_eq!(
            StateVector::uniform(2).unwrap().probability(0).unwrap(),
            0.25
        );
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert_eq!(zero.overlap(&one).unwrap(), c(0.0));
        assert!(matches!(
            zero.overlap(&s),
            Err(StateError::DimensionMismatch { .. })
        ));
        assert!(s.assert_normalized().is_ok());
        let unnorm = StateVector::from_amplitudes(vec![c(1.0), c(1.0)]).unwrap();
        assert!(matches!(
            unnorm.assert_normalized(),
            Err(StateError::NotNormalized(_))
        ));
    }

    #[test]
    fn embed_extract_roundtrip() {
        let amps: Vec<Amplitude> = (0..8).map(|i| c(i as f64 + 1.0)).collect();
        let s = StateVector::from_amplitudes(amps).unwrap();
        let wide = s.embed(&[3, 0, 2], 4).unwrap();
        let (back, leaked) = wide.extract(&[3, 0, 2]).unwrap();
        assert_eq!(back, s);
        assert_eq!(leaked, 0.0);
        // index 0b110 (qubits 0,1 set) -> physical qubits 3 and 0 set -> 0b1001
        assert_eq!(wide.amplitudes()[0b1001], c(7.0));
    }

    #[test]
    fn prefix_probability_sums_block() {
        let s = StateVector::basis(4, 13).unwrap();
        assert_eq!(s.prefix_probability(0b11, 2).unwrap(), 1.0);
        assert_eq!(s.prefix_probability(0b10, 2).unwrap(), 0.0);
        assert_eq!(
            s.block_probabilities(0b11, 2).unwrap(),
            vec![0.0, 1.0, 0.0, 0.0]
        );
    }
}
