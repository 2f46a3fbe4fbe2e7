use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Upper bound on bytes a single simulation or contraction may allocate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MemoryBudget(pub u128);

impl MemoryBudget {
    pub const DEFAULT: MemoryBudget = MemoryBudget(8 << 30);
    pub const UNLIMITED: MemoryBudget = MemoryBudget(u128::MAX);

    pub fn bytes(self) -> u128 {
        self.0
    }

    /// Fails with a resource error when `needed` exceeds the budget.
    pub fn check(self, what: impl Into<String>, needed: u128) -> Result<()> {
        if needed > self.0 {
            Err(Error::Resource { what: what.into(), needed, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for MemoryBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for MemoryBudget {
    type Err = Error;

    /// Accepts plain bytes or a `K`/`M`/`G`/`T` suffix (binary multiples),
    /// optionally followed by `B` or `iB`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let t = t.strip_suffix("IB").or_else(|| t.strip_suffix('B')).unwrap_or(&t);
        let (digits, shift) = match t.chars().last() {
            Some('K') => (&t[..t.len() - 1], 10),
            Some('M') => (&t[..t.len() - 1], 20),
            Some('G') => (&t[..t.len() - 1], 30),
            Some('T') => (&t[..t.len() - 1], 40),
            _ => (t, 0),
        };
        let v: f64 = digits
            .trim()
            .parse()
            .map_err(|_| Error::validation(format!("invalid memory budget '{s}'")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::validation(format!("memory budget must be positive, got '{s}'")));
        }
        Ok(MemoryBudget((v * (1u64 << shift) as f64) as u128))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_suffixes() {
        assert_eq!("8G".parse::<MemoryBudget>().unwrap(), MemoryBudget::DEFAULT);
        assert_eq!("512MiB".parse::<MemoryBudget>().unwrap().bytes(), 512 << 20);
        assert_eq!("1000".parse::<MemoryBudget>().unwrap().bytes(), 1000);
        assert!("-1G".parse::<MemoryBudget>().is_err());
        assert!("lots".parse::<MemoryBudget>().is_err());
    }

    #[test]
    fn check_reports_resource() {
        let b = MemoryBudget(100);
        assert!(b.check("x", 100).is_ok());
        assert!(matches!(b.check("x", 101), Err(Error::Resource { needed: 101, .. })));
    }
}
