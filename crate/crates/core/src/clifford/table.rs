//! Pauli conjugation tables for Clifford gates.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::circuits::{dagger2, dagger4, kron, matmul2, matmul4, rx, rzz, GateKind, GateOp, Mat2, Mat4, Pauli, C64};
use crate::{Error, Result};

/// Angle snapping tolerance for recognizing Clifford rotations.
pub const ANGLE_TOL: f64 = 1e-12;
const MATRIX_TOL: f64 = 1e-9;

/// Two-bit code `x + 2z`: I=0, X=1, Z=2, Y=3.
#[inline]
pub(crate) fn code(p: Pauli) -> u8 {
    let (x, z) = p.bits();
    x as u8 | (z as u8) << 1
}

#[inline]
pub(crate) fn from_code(c: u8) -> Pauli {
    Pauli::from_bits(c & 1 != 0, c & 2 != 0)
}

/// Image of every Pauli under `P -> U P U†`, as `(code, negative)`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum ConjTable {
    One([(u8, bool); 4]),
    /// Indexed by `code(a) + 4 * code(b)`.
    Two([(u8, bool); 16]),
}

/// Whether `op` is applied as `U` (Schrödinger) or as `U†` (Heisenberg).
pub(crate) fn table_for(op: &GateOp, index: usize, inverse: bool) -> Result<ConjTable> {
    let non_clifford = |detail: String| Error::NonClifford { index, detail };
    match &op.kind {
        GateKind::Rx(t) => {
            let k = snap(*t, FRAC_PI_2).ok_or_else(|| non_clifford(format!("rx({t}) on {:?}", op.qubits)))?;
            let m = rx(k as f64 * FRAC_PI_2);
            one_table(&if inverse { dagger2(&m) } else { m }).ok_or_else(|| non_clifford("rx".into()))
        }
        GateKind::Rzz(p) => {
            let k = snap(*p, FRAC_PI_4).ok_or_else(|| non_clifford(format!("rzz({p}) on {:?}", op.qubits)))?;
            let m = rzz(k as f64 * FRAC_PI_4);
            two_table(&if inverse { dagger4(&m) } else { m }).ok_or_else(|| non_clifford("rzz".into()))
        }
        GateKind::Unitary1(m) => one_table(&if inverse { dagger2(m) } else { *m })
            .ok_or_else(|| non_clifford(format!("u1 on {:?} is not Clifford", op.qubits))),
        GateKind::Unitary2(m) => two_table(&if inverse { dagger4(m) } else { *m })
            .ok_or_else(|| non_clifford(format!("u2 on {:?} is not Clifford", op.qubits))),
        GateKind::Pauli(ps) => {
            // Conjugation by a Pauli only flips signs of anticommuting factors.
            let flip = |g: Pauli, p: Pauli| anticommutes(g, p);
            Ok(match ps.as_slice() {
                [g] => ConjTable::One(std::array::from_fn(|c| (c as u8, flip(*g, from_code(c as u8))))),
                [g, h] => ConjTable::Two(std::array::from_fn(|c| {
                    let (a, b) = (from_code(c as u8 & 3), from_code(c as u8 >> 2));
                    (c as u8, flip(*g, a) ^ flip(*h, b))
                })),
                _ => unreachable!("validated arity"),
            })
        }
    }
}

fn anticommutes(a: Pauli, b: Pauli) -> bool {
    a != Pauli::I && b != Pauli::I && a != b
}

/// `Some(k)` when `angle` is within tolerance of `k * unit`.
fn snap(angle: f64, unit: f64) -> Option<i64> {
    let k = (angle / unit).round();
    ((angle - k * unit).abs() <= ANGLE_TOL).then_some(k as i64)
}

/// Decomposes `m` as `±P` for a Pauli `P` of the given dimension.
fn as_signed_pauli<const D: usize>(m: &[[C64; D]; D], basis: &[[[C64; D]; D]]) -> Option<(u8, bool)> {
    for (c, p) in basis.iter().enumerate() {
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..D {
            for j in 0..D {
                tr += p[j][i].conj() * m[j][i];
            }
        }
        let s = tr / D as f64;
        if (s.norm() - 1.0).abs() < MATRIX_TOL {
            if s.im.abs() > MATRIX_TOL {
                return None;
            }
            return Some((c as u8, s.re < 0.0));
        }
    }
    None
}

fn paulis_by_code() -> [Mat2; 4] {
    std::array::from_fn(|c| from_code(c as u8).matrix())
}

pub(crate) fn one_table(u: &Mat2) -> Option<ConjTable> {
    let basis = paulis_by_code();
    let ud = dagger2(u);
    let mut out = [(0u8, false); 4];
    for (c, p) in basis.iter().enumerate() {
        out[c] = as_signed_pauli(&matmul2(&matmul2(u, p), &ud), &basis)?;
    }
    Some(ConjTable::One(out))
}

pub(crate) fn two_table(u: &Mat4) -> Option<ConjTable> {
    let singles = paulis_by_code();
    // Two-qubit basis in the same `a + 4b` code order; `kron(a, b)` puts `a`
    // on the high bit of the 4x4 index.
    let basis: Vec<Mat4> = (0..16).map(|c| kron(&singles[c & 3], &singles[c >> 2])).collect();
    let ud = dagger4(u);
    let mut out = [(0u8, false); 16];
    for (c, p) in basis.iter().enumerate() {
        out[c] = as_signed_pauli(&matmul4(&matmul4(u, p), &ud), &basis)?;
    }
    Some(ConjTable::Two(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{cz, hadamard, iswap, phase_s};

    #[test]
    fn codes_round_trip() {
        for p in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
            assert_eq!(from_code(code(p)), p);
        }
    }

    #[test]
    fn hadamard_and_phase() {
        let ConjTable::One(h) = one_table(&hadamard()).unwrap() else { panic!() };
        assert_eq!(h[code(Pauli::X) as usize], (code(Pauli::Z), false));
        assert_eq!(h[code(Pauli::Y) as usize], (code(Pauli::Y), true));
        let ConjTable::One(s) = one_table(&phase_s()).unwrap() else { panic!() };
        assert_eq!(s[code(Pauli::X) as usize], (code(Pauli::Y), false));
    }

    #[test]
    fn rejects_non_clifford() {
        assert!(one_table(&rx(0.3)).is_none());
        assert!(two_table(&rzz(0.1)).is_none());
        assert!(two_table(&iswap()).is_some());
        assert!(two_table(&cz()).is_some());
        let op = GateOp::rx(0, 0.7, 0);
        assert!(matches!(table_for(&op, 4, false), Err(Error::NonClifford { index: 4, .. })));
        assert!(table_for(&GateOp::rx(0, FRAC_PI_2 + 1e-13, 0), 0, false).is_ok());
    }
}
