//! Cache-blocked execution of whole circuits.
//!
//! A circuit is split into stages: runs of single-qubit gates, runs of RZZ
//! gates (diagonal, applied as one phase table) and everything else. Low
//! qubits are processed inside contiguous blocks that fit in cache; high
//! qubits are processed in groups over tiles of short contiguous runs. A
//! diagonal stage is folded into the block pass of the single-qubit stage
//! that follows it.

use num_complex::Complex;

use super::kernels::{apply_1q_seq, apply_2q, apply_rzz, butterfly_runs, for_chunks, insert_zero, rx_form, M2, M4};
use super::Real;
use crate::circuits::{GateMatrix, GateOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct FusionConfig {
    /// log2 of the contiguous block size for low-qubit passes.
    pub low_bits: usize,
    /// Maximum high qubits handled per tiled pass.
    pub group_bits: usize,
    /// log2 of the contiguous run inside a high-qubit tile.
    pub run_bits: usize,
    /// Cross edges beyond this fall back to per-gate diagonal kernels.
    pub max_cross: usize,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig { low_bits: 14, group_bits: 8, run_bits: 5, max_cross: 12 }
    }
}

enum Stage<T> {
    Local(Vec<(usize, M2<T>)>),
    Diagonal(Vec<(usize, usize, f64)>),
    Gate { bits: Vec<usize>, matrix: GateMatrix },
}

fn cast2<T: Real>(m: &crate::circuits::Mat2) -> M2<T> {
    m.map(|row| row.map(|c| Complex::new(T::from_f64(c.re), T::from_f64(c.im))))
}

pub(crate) fn cast4<T: Real>(m: &crate::circuits::Mat4) -> M4<T> {
    m.map(|row| row.map(|c| Complex::new(T::from_f64(c.re), T::from_f64(c.im))))
}

fn matmul<T: Real>(a: &M2<T>, b: &M2<T>) -> M2<T> {
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn compile<T: Real>(ops: &[GateOp], bit_of: &dyn Fn(u32) -> usize) -> Vec<Stage<T>> {
    let mut stages: Vec<Stage<T>> = Vec::new();
    for op in ops {
        let bits: Vec<usize> = op.qubits.iter().map(|&q| bit_of(q)).collect();
        match (&op.kind, op.kind.matrix()) {
            (crate::circuits::GateKind::Rzz(phi), _) => {
                if let Some(Stage::Diagonal(d)) = stages.last_mut() {
                    d.push((bits[0], bits[1], *phi));
                } else {
                    stages.push(Stage::Diagonal(vec![(bits[0], bits[1], *phi)]));
                }
            }
            (_, GateMatrix::One(m)) => {
                let m = cast2::<T>(&m);
                if !matches!(stages.last(), Some(Stage::Local(_))) {
                    stages.push(Stage::Local(Vec::new()));
                }
                let Some(Stage::Local(gates)) = stages.last_mut() else { unreachable!() };
                match gates.iter_mut().find(|(b, _)| *b == bits[0]) {
                    Some((_, prev)) => *prev = matmul(&m, prev),
                    None => gates.push((bits[0], m)),
                }
            }
            (_, matrix) => stages.push(Stage::Gate { bits, matrix }),
        }
    }
    stages
}

/// Phase tables for one diagonal stage under a low/high bit split.
struct DiagTables<T> {
    lo_phase: Vec<Complex<T>>,
    lo_mask: Vec<u32>,
    cross: Vec<(usize, usize, f64)>,
    hi_edges: Vec<(usize, usize, f64)>,
    low_bits: usize,
}

impl<T: Real> DiagTables<T> {
    fn new(edges: &[(usize, usize, f64)], low_bits: usize) -> Self {
        let mut lo_edges = Vec::new();
        let mut hi_edges = Vec::new();
        let mut cross = Vec::new();
        for &(a, b, phi) in edges {
            match (a < low_bits, b < low_bits) {
                (true, true) => lo_edges.push((a, b, phi)),
                (false, false) => hi_edges.push((a, b, phi)),
                (true, false) => cross.push((a, b, phi)),
                (false, true) => cross.push((b, a, phi)),
            }
        }
        let size = 1usize << low_bits;
        let mut lo_phase = Vec::with_capacity(size);
        let mut lo_mask = Vec::with_capacity(size);
        for j in 0..size {
            let angle: f64 = lo_edges
                .iter()
                .map(|&(a, b, phi)| if ((j >> a) ^ (j >> b)) & 1 == 0 { phi } else { -phi })
                .sum();
            lo_phase.push(Complex::new(T::from_f64(angle.cos()), T::from_f64(angle.sin())));
            let mask = cross.iter().enumerate().fold(0u32, |m, (k, &(a, _, _))| m | ((((j >> a) & 1) as u32) << k));
            lo_mask.push(mask);
        }
        DiagTables { lo_phase, lo_mask, cross, hi_edges, low_bits }
    }

    /// Multiplies the block with high index `hi` by its diagonal phases.
    #[inline(always)]
    fn apply_block(&self, block: &mut [Complex<T>], hi: usize) {
        let full_hi = hi << self.low_bits;
        let hi_angle: f64 = self
            .hi_edges
            .iter()
            .map(|&(a, b, phi)| if ((full_hi >> a) ^ (full_hi >> b)) & 1 == 0 { phi } else { -phi })
            .sum();
        let hi_mask = self
            .cross
            .iter()
            .enumerate()
            .fold(0u32, |m, (k, &(_, b, _))| m | ((((full_hi >> b) & 1) as u32) << k));
        let table: Vec<Complex<T>> = (0..1u32 << self.cross.len())
            .map(|m| {
                let diff = m ^ hi_mask;
                let angle = hi_angle
                    + self
                        .cross
                        .iter()
                        .enumerate()
                        .map(|(k, &(_, _, phi))| if (diff >> k) & 1 == 0 { phi } else { -phi })
                        .sum::<f64>();
                Complex::new(T::from_f64(angle.cos()), T::from_f64(angle.sin()))
            })
            .collect();
        for ((amp, p), &m) in block.iter_mut().zip(&self.lo_phase).zip(&self.lo_mask) {
            *amp = *amp * (*p * table[m as usize]);
        }
    }
}

/// Applies `ops` to `amps` (length `2^n`).
pub(crate) fn run<T: Real>(
    amps: &mut [Complex<T>],
    n: usize,
    ops: &[GateOp],
    bit_of: &dyn Fn(u32) -> usize,
    cfg: FusionConfig,
) {
    let low_bits = cfg.low_bits.min(n);
    let stages = compile::<T>(ops, bit_of);
    let mut pending: Option<&[(usize, usize, f64)]> = None;
    for stage in &stages {
        match stage {
            Stage::Diagonal(edges) => {
                if let Some(prev) = pending.take() {
                    diag_pass(amps, n, prev, low_bits, cfg);
                }
                pending = Some(edges);
            }
            Stage::Local(gates) => {
                local_pass(amps, n, gates, pending.take(), low_bits, cfg);
            }
            Stage::Gate { bits, matrix } => {
                if let Some(prev) = pending.take() {
                    diag_pass(amps, n, prev, low_bits, cfg);
                }
                match matrix {
                    GateMatrix::One(m) => super::kernels::apply_1q(amps, bits[0], &cast2(m)),
                    GateMatrix::Two(m) => apply_2q(amps, bits[0], bits[1], &cast4(m)),
                }
            }
        }
    }
    if let Some(prev) = pending {
        diag_pass(amps, n, prev, low_bits, cfg);
    }
}

fn diag_pass<T: Real>(amps: &mut [Complex<T>], n: usize, edges: &[(usize, usize, f64)], low_bits: usize, cfg: FusionConfig) {
    if cross_count(edges, low_bits) > cfg.max_cross {
        for &(a, b, phi) in edges {
            apply_rzz(amps, a, b, phi);
        }
        return;
    }
    let tables = DiagTables::<T>::new(edges, low_bits);
    let _ = n;
    for_chunks(amps, 1 << low_bits, |hi, block| tables.apply_block(block, hi));
}

fn cross_count(edges: &[(usize, usize, f64)], low_bits: usize) -> usize {
    edges.iter().filter(|&&(a, b, _)| (a < low_bits) != (b < low_bits)).count()
}

fn local_pass<T: Real>(
    amps: &mut [Complex<T>],
    n: usize,
    gates: &[(usize, M2<T>)],
    diag: Option<&[(usize, usize, f64)]>,
    low_bits: usize,
    cfg: FusionConfig,
) {
    let (low, mut high): (Vec<&(usize, M2<T>)>, Vec<&(usize, M2<T>)>) = gates.iter().partition(|(b, _)| *b < low_bits);
    let tables = match diag {
        Some(edges) if cross_count(edges, low_bits) <= cfg.max_cross => Some(DiagTables::<T>::new(edges, low_bits)),
        Some(edges) => {
            for &(a, b, phi) in edges {
                apply_rzz(amps, a, b, phi);
            }
            None
        }
        None => None,
    };
    if tables.is_some() || !low.is_empty() {
        for_chunks(amps, 1 << low_bits, |hi, block| low_block(block, hi, tables.as_ref(), &low));
    }
    high.sort_by_key(|(b, _)| *b);
    let mut i = 0;
    while i < high.len() {
        let h = high[i].0;
        let k = cfg.group_bits.min(n - h);
        let j = i + high[i..].iter().take_while(|(b, _)| *b < h + k).count();
        high_pass(amps, n, &high[i..j], h, k, cfg.run_bits);
        i = j;
    }
}

/// Applies gates on bits in `[h, h + k)` tile by tile.
fn high_pass<T: Real>(amps: &mut [Complex<T>], n: usize, gates: &[&(usize, M2<T>)], h: usize, k: usize, run_bits: usize) {
    let r = h.min(run_bits);
    let mid_count = 1usize << (h - r);
    let run = 1usize << r;
    let _ = n;
    for_chunks(amps, 1 << (h + k), |_, sb| high_superblock(sb, gates, h, k, r, mid_count, run));
}

#[inline(always)]
fn low_block<T: Real>(block: &mut [Complex<T>], hi: usize, tables: Option<&DiagTables<T>>, low: &[&(usize, M2<T>)]) {
    if let Some(t) = tables {
        t.apply_block(block, hi);
    }
    for (bit, m) in low {
        apply_1q_seq(block, *bit, m);
    }
}

#[inline(always)]
fn high_superblock<T: Real>(
    sb: &mut [Complex<T>],
    gates: &[&(usize, M2<T>)],
    h: usize,
    k: usize,
    r: usize,
    mid_count: usize,
    run: usize,
) {
    for mid in 0..mid_count {
        let base = mid << r;
        for &&(bit, ref m) in gates {
            let rx = rx_form(m);
            let b = bit - h;
            let stride = 1usize << bit;
            for g in 0..1usize << (k - 1) {
                let i0 = base | (insert_zero(g, b) << h);
                let (lo, hi) = sb[i0..i0 + stride + run].split_at_mut(stride);
                butterfly_runs(&mut lo[..run], hi, m, rx);
            }
        }
    }
}
