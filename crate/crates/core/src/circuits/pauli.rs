use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::device::Label;
use super::gate::Pauli;
use crate::{Error, Result};

/// Signed tensor product of single-qubit Paulis. Identity factors are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliString {
    paulis: BTreeMap<Label, Pauli>,
    negative: bool,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(q: Label, p: Pauli) -> Self {
        let mut s = Self::default();
        s.set(q, p);
        s
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Label, Pauli)>) -> Self {
        let mut s = Self::default();
        for (q, p) in pairs {
            s.set(q, p);
        }
        s
    }

    /// Sets the factor on `q`; `Pauli::I` removes it.
    pub fn set(&mut self, q: Label, p: Pauli) {
        if p == Pauli::I {
            self.paulis.remove(&q);
        } else {
            self.paulis.insert(q, p);
        }
    }

    pub fn get(&self, q: Label) -> Pauli {
        self.paulis.get(&q).copied().unwrap_or(Pauli::I)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, Pauli)> + '_ {
        self.paulis.iter().map(|(&q, &p)| (q, p))
    }

    pub fn support(&self) -> Vec<Label> {
        self.paulis.keys().copied().collect()
    }

    pub fn weight(&self) -> usize {
        self.paulis.len()
    }

    pub fn is_identity(&self) -> bool {
        self.paulis.is_empty()
    }

    /// True when every factor is `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.paulis.values().all(|&p| p == Pauli::Z)
    }

    /// Overall sign, `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    /// The same operator with a `+` sign.
    pub fn unsigned(mut self) -> Self {
        self.negative = false;
        self
    }

    /// Rejects the identity, which carries no observable information.
    pub fn require_nonempty(&self) -> Result<()> {
        if self.is_identity() {
            Err(Error::validation("observable has empty support"))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.negative { '-' } else { '+' })?;
        if self.paulis.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self.paulis.iter().map(|(q, p)| format!("{p}{q}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `Z62`, `-X1 Y2 Z3`, `+X1*Z4` or `X1,Z4`.
    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let (negative, body) = match text.chars().next() {
            Some('-') => (true, &text[1..]),
            Some('+') => (false, &text[1..]),
            _ => (false, text),
        };
        let mut out = PauliString { negative, ..Default::default() };
        let mut chars = body.chars().peekable();
        let mut pos = 0usize;
        while let Some(c) = chars.next() {
            pos += 1;
            if c.is_whitespace() || c == ',' || c == '*' {
                continue;
            }
            let p = Pauli::from_char(c)
                .ok_or_else(|| Error::parse(format!("observable '{s}' char {pos}"), format!("unexpected '{c}'")))?;
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
                pos += 1;
            }
            let q: Label = digits
                .parse()
                .map_err(|_| Error::parse(format!("observable '{s}' char {pos}"), "missing qubit label"))?;
            if out.paulis.contains_key(&q) {
                return Err(Error::parse(format!("observable '{s}'"), format!("qubit {q} repeated")));
            }
            out.set(q, p);
        }
        Ok(out)
    }
}
