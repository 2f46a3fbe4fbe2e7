use std::collections::HashMap;

use super::table::{code, from_code, table_for, ConjTable};
use crate::circuits::{Circuit, GateOp, Label, PauliString};
use crate::{Error, Result};

/// Stabilizer state in Aaronson–Gottesman form: `n` destabilizer rows
/// followed by `n` stabilizer rows. Each row is a Hermitian Pauli string with
/// a sign bit, packed as x/z bit vectors over qubit indices (ascending label
/// order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    neg: Vec<bool>,
}

impl StabilizerTableau {
    /// `|0…0⟩` over the given labels.
    pub fn zero_state(labels: &[Label]) -> Self {
        Self::basis_state(labels, &vec![false; labels.len()]).expect("lengths agree")
    }

    /// Computational basis state; `bits[i]` belongs to the i-th smallest label.
    pub fn basis_state(labels: &[Label], bits: &[bool]) -> Result<Self> {
        if labels.len() != bits.len() {
            return Err(Error::validation(format!(
                "bitstring length {} does not match {} qubits",
                bits.len(),
                labels.len()
            )));
        }
        let mut sorted = labels.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::validation("duplicate qubit label"));
        }
        let n = sorted.len();
        let words = n.div_ceil(64).max(1);
        let mut t = StabilizerTableau {
            index: sorted.iter().enumerate().map(|(i, &l)| (l, i)).collect(),
            labels: sorted,
            words,
            x: vec![0; 2 * n * words],
            z: vec![0; 2 * n * words],
            neg: vec![false; 2 * n],
        };
        for i in 0..n {
            t.set(i, i, 1);
            t.set(n + i, i, 2);
            t.neg[n + i] = bits[i];
        }
        Ok(t)
    }

    /// Runs `circuit` on `|0…0⟩` over the circuit's device nodes.
    pub fn from_circuit(circuit: &Circuit) -> Result<Self> {
        let mut t = Self::zero_state(circuit.graph().nodes());
        t.apply_circuit(circuit)?;
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    fn get(&self, row: usize, q: usize) -> u8 {
        let (w, b) = (row * self.words + q / 64, q % 64);
        ((self.x[w] >> b) & 1) as u8 | (((self.z[w] >> b) & 1) as u8) << 1
    }

    #[inline]
    fn set(&mut self, row: usize, q: usize, c: u8) {
        let (w, b) = (row * self.words + q / 64, q % 64);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | (((c & 1) as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((((c >> 1) & 1) as u64) << b);
    }

    fn qubit(&self, label: Label) -> Result<usize> {
        self.index
            .get(&label)
            .copied()
            .ok_or_else(|| Error::validation(format!("qubit {label} not in tableau")))
    }

    /// Applies `op` (op number `index` in its circuit, for error reporting).
    pub fn apply_op(&mut self, op: &GateOp, index: usize) -> Result<()> {
        let table = table_for(op, index, false)?;
        let qs: Vec<usize> = op.qubits.iter().map(|&l| self.qubit(l)).collect::<Result<_>>()?;
        self.apply_table(&table, &qs);
        Ok(())
    }

    pub(crate) fn apply_table(&mut self, table: &ConjTable, qs: &[usize]) {
        for row in 0..2 * self.n() {
            match table {
                ConjTable::One(t) => {
                    let (c, s) = t[self.get(row, qs[0]) as usize];
                    self.set(row, qs[0], c);
                    self.neg[row] ^= s;
                }
                ConjTable::Two(t) => {
                    let idx = self.get(row, qs[0]) + 4 * self.get(row, qs[1]);
                    let (c, s) = t[idx as usize];
                    self.set(row, qs[0], c & 3);
                    self.set(row, qs[1], c >> 2);
                    self.neg[row] ^= s;
                }
            }
        }
        debug_assert!(self.check_invariants());
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        for (i, op) in circuit.ops().iter().enumerate() {
            self.apply_op(op, i)?;
        }
        Ok(())
    }

    fn row_string(&self, row: usize) -> PauliString {
        let mut p = PauliString::from_pairs((0..self.n()).map(|q| (self.labels[q], from_code(self.get(row, q)))));
        p.set_negative(self.neg[row]);
        p
    }

    /// The `n` stabilizer generators.
    pub fn stabilizers(&self) -> Vec<PauliString> {
        (self.n()..2 * self.n()).map(|r| self.row_string(r)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        (0..self.n()).map(|r| self.row_string(r)).collect()
    }

    fn row_anticommutes(&self, a: usize, b: usize) -> bool {
        let (ra, rb) = (a * self.words, b * self.words);
        let mut parity = 0u32;
        for w in 0..self.words {
            parity ^= (self.x[ra + w] & self.z[rb + w]).count_ones() ^ (self.z[ra + w] & self.x[rb + w]).count_ones();
        }
        parity & 1 == 1
    }

    /// Stabilizers commute pairwise; each destabilizer anticommutes with
    /// exactly its paired stabilizer.
    pub fn check_invariants(&self) -> bool {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if self.row_anticommutes(n + i, n + j) || self.row_anticommutes(i, n + j) != (i == j) {
                    return false;
                }
            }
        }
        true
    }

    /// Expectation of `obs`: `±1` when `±obs` is in the stabilizer group,
    /// `0` otherwise.
    pub fn expectation(&self, obs: &PauliString) -> Result<i8> {
        let n = self.n();
        let mut target = vec![0u8; n];
        for (l, p) in obs.iter() {
            target[self.qubit(l)?] = code(p);
        }
        let anti = |row: usize| {
            target
                .iter()
                .enumerate()
                .filter(|(q, &c)| {
                    let r = self.get(row, *q);
                    ((c & 1) & (r >> 1)) ^ ((c >> 1) & (r & 1)) == 1
                })
                .count()
                % 2
                == 1
        };
        if (n..2 * n).any(anti) {
            return Ok(0);
        }
        // obs = ± product of the stabilizers whose destabilizer it anticommutes with.
        let mut acc = vec![0u8; n];
        let mut phase = 0i32; // power of i
        for i in 0..n {
            if anti(i) {
                let row = n + i;
                phase += 2 * self.neg[row] as i32;
                for (q, a) in acc.iter_mut().enumerate() {
                    let c = self.get(row, q);
                    phase += g(*a, c);
                    *a ^= c;
                }
            }
        }
        debug_assert_eq!(acc, target);
        let phase = phase.rem_euclid(4);
        debug_assert!(phase == 0 || phase == 2);
        let product_negative = phase == 2;
        Ok(if product_negative == obs.is_negative() { 1 } else { -1 })
    }

    /// Purity `Tr ρ_A² = 2^{-S_A}` of the region, with
    /// `S_A = rank(stabilizers restricted to A) - |A|`.
    pub fn reduced_purity(&self, region: &[Label]) -> Result<f64> {
        Ok((-(self.entropy_bits(region)? as f64)).exp2())
    }

    /// Entanglement entropy of the region in bits (an integer for stabilizer states).
    pub fn entropy_bits(&self, region: &[Label]) -> Result<usize> {
        let mut cols: Vec<usize> = region.iter().map(|&l| self.qubit(l)).collect::<Result<_>>()?;
        cols.sort_unstable();
        cols.dedup();
        let n = self.n();
        let width = 2 * cols.len();
        let row_words = width.div_ceil(64).max(1);
        let mut rows: Vec<Vec<u64>> = (n..2 * n)
            .map(|r| {
                let mut v = vec![0u64; row_words];
                for (k, &q) in cols.iter().enumerate() {
                    let c = self.get(r, q);
                    if c & 1 != 0 {
                        v[(2 * k) / 64] |= 1 << ((2 * k) % 64);
                    }
                    if c & 2 != 0 {
                        v[(2 * k + 1) / 64] |= 1 << ((2 * k + 1) % 64);
                    }
                }
                v
            })
            .collect();
        Ok(gf2_rank(&mut rows, width) - cols.len())
    }
}

/// Exponent of `i` picked up when multiplying single-qubit Paulis with codes
/// `a` then `b` (Hermitian representatives).
fn g(a: u8, b: u8) -> i32 {
    let (x1, z1, x2, z2) = ((a & 1) as i32, (a >> 1) as i32, (b & 1) as i32, (b >> 1) as i32);
    match (x1, z1) {
        (0, 0) => 0,
        (1, 1) => z2 - x2,
        (1, 0) => z2 * (2 * x2 - 1),
        _ => x2 * (1 - 2 * z2),
    }
}

pub(crate) fn gf2_rank(rows: &mut [Vec<u64>], width: usize) -> usize {
    let mut rank = 0;
    for col in 0..width {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & bit != 0 {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}
