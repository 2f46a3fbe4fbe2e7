use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::device::Label;
use crate::{Error, Result};

pub type C64 = Complex64;
/// Row-major 2x2 matrix.
pub type Mat2 = [[C64; 2]; 2];
/// Row-major 4x4 matrix. For a gate on qubits `[a, b]` the basis index is
/// `2 * bit(a) + bit(b)`.
pub type Mat4 = [[C64; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for the unitarity check on user-supplied matrices.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// `(x, z)` symplectic bits, with `Y = (1, 1)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Gate kinds of the circuit IR.
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    /// `exp(-i θ/2 X)`.
    Rx(f64),
    /// `exp(+i φ Z⊗Z)`.
    Rzz(f64),
    Unitary1(Mat2),
    Unitary2(Mat4),
    /// A Pauli product, one factor per qubit of the op. Used for injected
    /// errors and for butterfly operators.
    Pauli(Vec<Pauli>),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Rx(_) | GateKind::Unitary1(_) => 1,
            GateKind::Rzz(_) | GateKind::Unitary2(_) => 2,
            GateKind::Pauli(p) => p.len(),
        }
    }

    /// Two-qubit gates that count toward circuit volume (Pauli products excluded).
    pub fn is_entangling(&self) -> bool {
        matches!(self, GateKind::Rzz(_) | GateKind::Unitary2(_))
    }

    pub fn is_diagonal(&self) -> bool {
        match self {
            GateKind::Rzz(_) => true,
            GateKind::Pauli(p) => p.iter().all(|q| matches!(q, Pauli::I | Pauli::Z)),
            GateKind::Unitary1(m) => m[0][1] == ZERO && m[1][0] == ZERO,
            GateKind::Unitary2(m) => (0..4).all(|r| (0..4).all(|c| r == c || m[r][c] == ZERO)),
            GateKind::Rx(t) => *t == 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Rx(_) => "rx",
            GateKind::Rzz(_) => "rzz",
            GateKind::Unitary1(_) => "u1",
            GateKind::Unitary2(_) => "u2",
            GateKind::Pauli(_) => "pauli",
        }
    }

    pub fn matrix(&self) -> GateMatrix {
        match self {
            GateKind::Rx(t) => GateMatrix::One(rx(*t)),
            GateKind::Rzz(p) => GateMatrix::Two(rzz(*p)),
            GateKind::Unitary1(m) => GateMatrix::One(*m),
            GateKind::Unitary2(m) => GateMatrix::Two(*m),
            GateKind::Pauli(p) => match p.as_slice() {
                [a] => GateMatrix::One(a.matrix()),
                [a, b] => GateMatrix::Two(kron(&a.matrix(), &b.matrix())),
                _ => unreachable!("validated arity"),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
}

/// One gate application in a circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<Label>,
    /// Moment index; non-decreasing along a circuit.
    pub layer: usize,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: Vec<Label>, layer: usize) -> Result<Self> {
        if kind.arity() != qubits.len() || !(1..=2).contains(&qubits.len()) {
            return Err(Error::validation(format!(
                "{} gate needs {} qubit(s), got {:?}",
                kind.name(),
                kind.arity(),
                qubits
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::validation(format!("two-qubit gate on repeated qubit {}", qubits[0])));
        }
        match &kind {
            GateKind::Rx(t) | GateKind::Rzz(t) if !t.is_finite() => {
                return Err(Error::validation(format!("non-finite angle {t}")));
            }
            GateKind::Unitary1(m) if !is_unitary2(m, UNITARY_TOL) => {
                return Err(Error::validation("u1 matrix is not unitary"));
            }
            GateKind::Unitary2(m) if !is_unitary4(m, UNITARY_TOL) => {
                return Err(Error::validation("u2 matrix is not unitary"));
            }
            _ => {}
        }
        Ok(GateOp { kind, qubits, layer })
    }

    pub fn rx(q: Label, theta: f64, layer: usize) -> Self {
        GateOp { kind: GateKind::Rx(theta), qubits: vec![q], layer }
    }

    pub fn rzz(a: Label, b: Label, phi: f64, layer: usize) -> Self {
        GateOp { kind: GateKind::Rzz(phi), qubits: vec![a, b], layer }
    }
}

pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]]
}

pub fn rzz(phi: f64) -> Mat4 {
    let p = C64::from_polar(1.0, phi);
    let m = p.conj();
    diag4([p, m, m, p])
}

pub fn iswap() -> Mat4 {
    [
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, ZERO, I, ZERO],
        [ZERO, I, ZERO, ZERO],
        [ZERO, ZERO, ZERO, ONE],
    ]
}

pub fn cz() -> Mat4 {
    diag4([ONE, ONE, ONE, -ONE])
}

pub fn hadamard() -> Mat2 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn phase_s() -> Mat2 {
    [[ONE, ZERO], [ZERO, I]]
}

fn diag4(d: [C64; 4]) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, v) in d.into_iter().enumerate() {
        m[i][i] = v;
    }
    m
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = a[r >> 1][c >> 1] * b[r & 1][c & 1];
        }
    }
    m
}

pub fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            m[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    m
}

pub fn matmul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    m
}

pub fn dagger2(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn dagger4(a: &Mat4) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = a[c][r].conj();
        }
    }
    m
}

pub fn is_unitary2(m: &Mat2, tol: f64) -> bool {
    let p = matmul2(&dagger2(m), m);
    (0..2).all(|r| (0..2).all(|c| (p[r][c] - if r == c { ONE } else { ZERO }).norm() <= tol))
}

pub fn is_unitary4(m: &Mat4, tol: f64) -> bool {
    let p = matmul4(&dagger4(m), m);
    (0..4).all(|r| (0..4).all(|c| (p[r][c] - if r == c { ONE } else { ZERO }).norm() <= tol))
}

/// The 24 single-qubit Clifford unitaries modulo global phase, generated from
/// `H` and `S` in breadth-first order (index 0 is the identity).
pub fn single_qubit_cliffords() -> &'static [Mat2] {
    static CACHE: OnceLock<Vec<Mat2>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let identity = Pauli::I.matrix();
        let gens = [hadamard(), phase_s()];
        let mut found = vec![identity];
        let mut frontier = vec![identity];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for m in &frontier {
                for g in &gens {
                    let p = matmul2(g, m);
                    if !found.iter().any(|f| equal_up_to_phase(f, &p)) {
                        found.push(p);
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(found.len(), 24);
        found
    })
}

fn equal_up_to_phase(a: &Mat2, b: &Mat2) -> bool {
    // <a, b> / |<a, b>| has modulus one exactly when a = e^{iφ} b for unitaries.
    let inner: C64 = (0..2).flat_map(|r| (0..2).map(move |c| (r, c))).map(|(r, c)| a[r][c].conj() * b[r][c]).sum();
    (inner.norm() - 2.0).abs() < 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close2(a: &Mat2, b: &Mat2) -> bool {
        (0..2).all(|r| (0..2).all(|c| (a[r][c] - b[r][c]).norm() < 1e-12))
    }

    #[test]
    fn rx_pi_flips_with_phase() {
        let m = rx(PI);
        // RX(π) = -iX
        assert!((m[1][0] - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(m[0][0].norm() < 1e-12);
    }

    #[test]
    fn rzz_is_exp_plus_i_phi_zz() {
        let phi = 0.3;
        let m = rzz(phi);
        let zz = [1.0, -1.0, -1.0, 1.0];
        for (k, z) in zz.iter().enumerate() {
            assert!((m[k][k] - C64::from_polar(1.0, phi * z)).norm() < 1e-15);
        }
        assert!(is_unitary4(&m, 1e-12));
    }

    #[test]
    fn clifford_group_has_24_unitaries() {
        let cl = single_qubit_cliffords();
        assert_eq!(cl.len(), 24);
        assert!(cl.iter().all(|m| is_unitary2(m, 1e-12)));
        assert!(close2(&cl[0], &Pauli::I.matrix()));
    }

    #[test]
    fn gate_op_rejects_bad_input() {
        assert!(GateOp::new(GateKind::Rx(0.1), vec![0, 1], 0).is_err());
        assert!(GateOp::new(GateKind::Rzz(0.1), vec![2, 2], 0).is_err());
        let mut m = Pauli::X.matrix();
        m[0][1] = C64::new(2.0, 0.0);
        assert!(GateOp::new(GateKind::Unitary1(m), vec![0], 0).is_err());
        assert!(GateOp::new(GateKind::Unitary2(iswap()), vec![0, 1], 0).is_ok());
    }
}
