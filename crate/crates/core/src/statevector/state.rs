use num_complex::Complex;

use super::fused::{self, cast4, FusionConfig};
use super::kernels::{apply_1q, apply_2q, apply_rzz};
use super::Real;
use crate::circuits::{Circuit, GateKind, GateMatrix, GateOp, Label, Pauli, PauliString};
use crate::{Error, MemoryBudget, Result};

/// Dense amplitudes over `n` qubits. Qubit labels are ranked in ascending
/// order and rank `k` is bit `k` of the amplitude index (little-endian).
#[derive(Clone, Debug)]
pub struct StateVector<T: Real = f64> {
    labels: Vec<Label>,
    amps: Vec<Complex<T>>,
    fusion: FusionConfig,
}

impl<T: Real> StateVector<T> {
    /// Bytes needed for `n` qubits at this precision.
    pub fn required_bytes(n: usize) -> u128 {
        (std::mem::size_of::<Complex<T>>() as u128) << n
    }

    /// `|0…0⟩` (all spins up) over `labels`.
    pub fn zero_state(labels: &[Label], budget: MemoryBudget) -> Result<Self> {
        Self::init_basis(labels, "", budget)
    }

    /// Computational basis state. Character `k` of `bits` is the value of the
    /// k-th smallest label; an empty string means all zeros.
    pub fn init_basis(labels: &[Label], bits: &str, budget: MemoryBudget) -> Result<Self> {
        let mut sorted = labels.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::validation("duplicate qubit label"));
        }
        let n = sorted.len();
        if n >= usize::BITS as usize - 1 {
            return Err(Error::Resource { what: format!("{n}-qubit state vector"), needed: u128::MAX, budget: budget.0 });
        }
        budget.check(format!("{n}-qubit state vector"), Self::required_bytes(n))?;
        let index = if bits.is_empty() {
            0
        } else {
            if bits.chars().count() != n {
                return Err(Error::validation(format!("bitstring '{bits}' has length {}, expected {n}", bits.len())));
            }
            bits.chars().enumerate().try_fold(0usize, |acc, (k, c)| match c {
                '0' => Ok(acc),
                '1' => Ok(acc | 1 << k),
                other => Err(Error::validation(format!("bitstring character '{other}'"))),
            })?
        };
        let zero = Complex::new(T::zero(), T::zero());
        let mut amps = vec![zero; 1usize << n];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(StateVector { labels: sorted, amps, fusion: FusionConfig::default() })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    /// Bit position of `label`.
    pub fn bit_of(&self, label: Label) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    fn bit(&self, label: Label) -> Result<usize> {
        self.bit_of(label).ok_or_else(|| Error::validation(format!("qubit {label} not in state")))
    }

    #[cfg(test)]
    pub(crate) fn set_fusion(&mut self, cfg: FusionConfig) {
        self.fusion = cfg;
    }

    pub(crate) fn copy_from(&mut self, other: &StateVector<T>) {
        self.amps.copy_from_slice(&other.amps);
    }

    pub fn norm_sqr(&self) -> f64 {
        chunked_sum(&self.amps, |_, a| a.norm_sqr().to_f64())
    }

    /// Applies one gate with the plain per-gate kernels.
    pub fn apply_op(&mut self, op: &GateOp) -> Result<()> {
        let bits: Vec<usize> = op.qubits.iter().map(|&q| self.bit(q)).collect::<Result<_>>()?;
        match (&op.kind, op.kind.matrix()) {
            (GateKind::Rzz(phi), _) => apply_rzz(&mut self.amps, bits[0], bits[1], *phi),
            (_, GateMatrix::One(m)) => {
                let m = m.map(|r| r.map(|c| Complex::new(T::from_f64(c.re), T::from_f64(c.im))));
                apply_1q(&mut self.amps, bits[0], &m)
            }
            (_, GateMatrix::Two(m)) => apply_2q(&mut self.amps, bits[0], bits[1], &cast4(&m)),
        }
        Ok(())
    }

    /// Applies `ops` one gate at a time.
    pub fn apply_ops(&mut self, ops: &[GateOp]) -> Result<()> {
        ops.iter().try_for_each(|op| self.apply_op(op))
    }

    /// Applies the whole circuit with fused, cache-blocked passes.
    pub fn apply(&mut self, circuit: &Circuit) -> Result<()> {
        self.apply_fused(circuit.ops())
    }

    pub fn apply_fused(&mut self, ops: &[GateOp]) -> Result<()> {
        for op in ops {
            for &q in &op.qubits {
                self.bit(q)?;
            }
        }
        let labels = &self.labels;
        let bit_of = |q: Label| labels.binary_search(&q).expect("checked above");
        fused::run(&mut self.amps, labels.len(), ops, &bit_of, self.fusion);
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` evaluated without copying the state.
    pub fn expectation(&self, obs: &PauliString) -> Result<f64> {
        let (mut mx, mut mz, mut ny) = (0usize, 0usize, 0u32);
        for (q, p) in obs.iter() {
            let b = self.bit(q)?;
            let (x, z) = p.bits();
            mx |= (x as usize) << b;
            mz |= (z as usize) << b;
            ny += (p == Pauli::Y) as u32;
        }
        let amps = &self.amps;
        // Σ_j conj(ψ_{j⊕mx}) (-1)^{|j∧mz|} ψ_j, times i^{ny}.
        let re = chunked_sum(amps, |j, a| {
            let v = amps[j ^ mx].conj() * *a;
            let v = if (j & mz).count_ones() & 1 == 1 { -v } else { v };
            match ny % 4 {
                0 => v.re.to_f64(),
                1 => -v.im.to_f64(),
                2 => -v.re.to_f64(),
                _ => v.im.to_f64(),
            }
        });
        let im = chunked_sum(amps, |j, a| {
            let v = amps[j ^ mx].conj() * *a;
            let v = if (j & mz).count_ones() & 1 == 1 { -v } else { v };
            match ny % 4 {
                0 => v.im.to_f64(),
                1 => v.re.to_f64(),
                2 => -v.im.to_f64(),
                _ => -v.re.to_f64(),
            }
        });
        if im.abs() > T::IMAG_TOL {
            return Err(Error::Numerical(format!("expectation of {obs} has imaginary part {im:e}")));
        }
        Ok(obs.sign() as f64 * re)
    }
}

/// Deterministic blocked sum: per-block sums in index order, then summed in
/// block order, independent of thread count.
fn chunked_sum<T: Real, F>(amps: &[Complex<T>], f: F) -> f64
where
    F: Fn(usize, &Complex<T>) -> f64 + Send + Sync,
{
    const BLOCK: usize = 1 << 12;
    let block_sum = |(bi, chunk): (usize, &[Complex<T>])| -> f64 {
        chunk.iter().enumerate().map(|(k, a)| f(bi * BLOCK + k, a)).sum()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if amps.len() > BLOCK {
            let parts: Vec<f64> = amps.par_chunks(BLOCK).enumerate().map(block_sum).collect();
            return parts.iter().sum();
        }
    }
    let parts: Vec<f64> = amps.chunks(BLOCK).enumerate().map(block_sum).collect();
    parts.iter().sum()
}
