//! Gate kernels over little-endian amplitude arrays.

use num_complex::Complex;

use super::Real;

pub(crate) type M2<T> = [[Complex<T>; 2]; 2];
pub(crate) type M4<T> = [[Complex<T>; 4]; 4];

/// Amplitudes per parallel work item.
#[cfg(feature = "parallel")]
const PAR_CHUNK: usize = 1 << 14;

/// Inserts a zero bit at position `pos`.
#[inline(always)]
pub(crate) fn insert_zero(x: usize, pos: usize) -> usize {
    let low = x & ((1 << pos) - 1);
    ((x >> pos) << (pos + 1)) | low
}

#[inline(always)]
pub(crate) fn butterfly<T: Real>(a: &mut Complex<T>, b: &mut Complex<T>, m: &M2<T>) {
    let (x, y) = (*a, *b);
    *a = m[0][0] * x + m[0][1] * y;
    *b = m[1][0] * x + m[1][1] * y;
}

/// Runs `f` over consecutive chunks of `len`, in parallel when enabled.
pub(crate) fn for_chunks<T: Real, F>(amps: &mut [Complex<T>], len: usize, f: F)
where
    F: Fn(usize, &mut [Complex<T>]) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if amps.len() > len {
            amps.par_chunks_mut(len).enumerate().for_each(|(i, c)| f(i, c));
            return;
        }
    }
    amps.chunks_mut(len).enumerate().for_each(|(i, c)| f(i, c));
}

fn work_chunk(total: usize, minimum: usize) -> usize {
    #[cfg(feature = "parallel")]
    {
        minimum.max(PAR_CHUNK).min(total)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = minimum;
        total
    }
}

/// `Some((c, s))` when `m = [[c, -is], [-is, c]]`, the form of `RX`.
#[inline(always)]
pub(crate) fn rx_form<T: Real>(m: &M2<T>) -> Option<(T, T)> {
    let z = T::zero();
    let rx = m[0][0] == m[1][1] && m[0][1] == m[1][0] && m[0][0].im == z && m[0][1].re == z;
    rx.then(|| (m[0][0].re, -m[0][1].im))
}

/// Butterflies over paired runs, specialised for `RX`-shaped matrices.
#[inline(always)]
pub(crate) fn butterfly_runs<T: Real>(lo: &mut [Complex<T>], hi: &mut [Complex<T>], m: &M2<T>, rx: Option<(T, T)>) {
    match rx {
        Some((c, s)) => {
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (ar, ai, br, bi) = (a.re, a.im, b.re, b.im);
                a.re = c * ar + s * bi;
                a.im = c * ai - s * br;
                b.re = c * br + s * ai;
                b.im = c * bi - s * ar;
            }
        }
        None => {
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                butterfly(a, b, m);
            }
        }
    }
}

/// Sequential single-qubit kernel on a slice whose length is a multiple of
/// `2 << bit`.
#[inline(always)]
pub(crate) fn apply_1q_seq<T: Real>(amps: &mut [Complex<T>], bit: usize, m: &M2<T>) {
    let half = 1usize << bit;
    let rx = rx_form(m);
    for block in amps.chunks_exact_mut(half << 1) {
        let (lo, hi) = block.split_at_mut(half);
        butterfly_runs(lo, hi, m, rx);
    }
}

pub(crate) fn apply_1q<T: Real>(amps: &mut [Complex<T>], bit: usize, m: &M2<T>) {
    let chunk = work_chunk(amps.len(), 2 << bit);
    for_chunks(amps, chunk, |_, c| apply_1q_seq(c, bit, m));
}

/// Two-qubit kernel; `m` uses basis index `2 * bit(a) + bit(b)`.
pub(crate) fn apply_2q<T: Real>(amps: &mut [Complex<T>], a: usize, b: usize, m: &M4<T>) {
    let (lo, hi) = (a.min(b), a.max(b));
    let chunk = work_chunk(amps.len(), 2 << hi);
    let (ma, mb) = (1usize << a, 1usize << b);
    for_chunks(amps, chunk, |_, c| {
        for k in 0..c.len() / 4 {
            let i00 = insert_zero(insert_zero(k, lo), hi);
            let idx = [i00, i00 | mb, i00 | ma, i00 | ma | mb];
            let v = idx.map(|i| c[i]);
            for (r, &i) in idx.iter().enumerate() {
                c[i] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        }
    });
}

/// `exp(+i φ Z_a Z_b)`: phase `e^{iφ}` on even parity, `e^{-iφ}` on odd.
pub(crate) fn apply_rzz<T: Real>(amps: &mut [Complex<T>], a: usize, b: usize, phi: f64) {
    let even = Complex::new(T::from_f64(phi.cos()), T::from_f64(phi.sin()));
    let odd = even.conj();
    let chunk = work_chunk(amps.len(), 1);
    for_chunks(amps, chunk, |ci, c| {
        let base = ci * chunk;
        for (j, amp) in c.iter_mut().enumerate() {
            let i = base + j;
            let parity = ((i >> a) ^ (i >> b)) & 1;
            *amp = *amp * if parity == 0 { even } else { odd };
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_zero_spreads_bits() {
        assert_eq!(insert_zero(0b111, 1), 0b1101);
        assert_eq!(insert_zero(0b1, 0), 0b10);
        assert_eq!(insert_zero(insert_zero(0, 0), 2), 0);
    }
}
