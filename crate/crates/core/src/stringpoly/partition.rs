use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Integer partition used as a multi-index for derivative jets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid partition {0:?}")]
pub struct PartitionParseError(String);

impl Partition {
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Sorts the parts into weakly decreasing order; zero parts are rejected.
    pub fn new(mut parts: Vec<u32>) -> Option<Self> {
        if parts.contains(&0) {
            return None;
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Some(Partition { parts })
    }

    /// Accepts `1+1+2`, `φ`, `phi` or the empty string.
    pub fn parse(s: &str) -> Result<Self, PartitionParseError> {
        let t = s.trim();
        if t.is_empty() || t == "φ" || t == "phi" {
            return Ok(Self::empty());
        }
        let parts = t
            .split('+')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PartitionParseError(s.to_string()))?;
        Self::new(parts).ok_or_else(|| PartitionParseError(s.to_string()))
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> u32 {
        self.parts.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Multiplicity of each part size, as `(part, count)` pairs.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// All partitions of `n`, largest parts first.
    pub fn all_of(n: u32) -> Vec<Partition> {
        fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition { parts: prefix.clone() });
                return;
            }
            for p in (1..=n.min(max)).rev() {
                prefix.push(p);
                rec(n - p, p, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// All pairs `(lambda, eta)` with `|lambda| + |eta| <= max_weight`,
    /// ordered by total weight, then by `|eta|`, then lexicographically.
    pub fn pairs_up_to(max_weight: u32) -> Vec<(Partition, Partition)> {
        let mut out = Vec::new();
        for w in 0..=max_weight {
            for we in 0..=w {
                for eta in Self::all_of(we) {
                    for lambda in Self::all_of(w - we) {
                        out.push((lambda, eta.clone()));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("φ");
        }
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        f.write_str(&s.join("+"))
    }
}

impl FromStr for Partition {
    type Err = PartitionParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing_and_display() {
        let p = Partition::parse("1+2+1").unwrap();
        assert_eq!(p.parts(), &[2, 1, 1]);
        assert_eq!(p.to_string(), "2+1+1");
        assert_eq!(p.multiplicities(), vec![(2, 1), (1, 2)]);
        assert_eq!(Partition::parse("phi").unwrap(), Partition::empty());
        assert!(Partition::parse("1+0").is_err());
    }

    #[test]
    fn counts() {
        let sizes: Vec<usize> = (0..7).map(|n| Partition::all_of(n).len()).collect();
        assert_eq!(sizes, [1, 1, 2, 3, 5, 7, 11]);
        assert_eq!(Partition::pairs_up_to(3).len(), 1 + 2 + 5 + 10);
    }
}
