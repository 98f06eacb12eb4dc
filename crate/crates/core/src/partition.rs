//! Dominant partitions `n = n_1 + ... + n_tau` with `n_k >= m_k`, where
//! `m_k = n_{k+1} + ... + n_tau` is the size of everything after cluster `k`.
//!
//! Parts are kept in the order given (largest cluster first for base-`p`
//! partitions). Dominance is order sensitive, so nothing is re-sorted.

use std::fmt;
use std::str::FromStr;

use crate::error::PartitionError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    parts: Vec<usize>,
    /// `m_1..m_{tau-1}`.
    suffix_sums: Vec<usize>,
}

impl Partition {
    /// Splits `n` along the nonzero digits of its base-`p` representation.
    ///
    /// A digit `i` at position `e` becomes the part `i * p^e`; zero digits are
    /// dropped. Every remaining part satisfies `m_k < p^e <= n_k`.
    pub fn from_base(n: usize, p: usize) -> Result<Self, PartitionError> {
        if n < 2 || p < 2 {
            return Err(PartitionError::InvalidBase { n, p });
        }
        let mut parts = Vec::new();
        let mut rest = n;
        let mut scale = 1usize;
        while rest > 0 {
            let digit = rest % p;
            if digit != 0 {
                parts.push(digit * scale);
            }
            rest /= p;
            if rest > 0 {
                scale *= p;
            }
        }
        parts.reverse();
        Self::from_parts(&parts)
    }

    pub fn from_parts(parts: &[usize]) -> Result<Self, PartitionError> {
        if parts.is_empty() {
            return Err(PartitionError::Empty);
        }
        if let Some(index) = parts.iter().position(|&v| v == 0) {
            return Err(PartitionError::NonPositivePart { index, value: 0 });
        }
        let tau = parts.len();
        let mut suffix_sums = vec![0usize; tau.saturating_sub(1)];
        let mut acc = 0usize;
        for k in (0..tau - 1).rev() {
            acc += parts[k + 1];
            suffix_sums[k] = acc;
        }
        for (k, (&part, &suffix)) in parts.iter().zip(&suffix_sums).enumerate() {
            if part < suffix {
                return Err(PartitionError::DominanceViolation {
                    k: k + 1,
                    part,
                    suffix,
                });
            }
        }
        let n = parts.iter().sum();
        Ok(Partition {
            n,
            parts: parts.to_vec(),
            suffix_sums,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Cluster size `n_k` for the zero-based cluster index `k`.
    pub fn part(&self, k: usize) -> usize {
        self.parts[k]
    }

    pub fn suffix_sums(&self) -> &[usize] {
        &self.suffix_sums
    }

    /// `m_k` for `k` in `0..=tau`, with `m_0 = n` and `m_tau = 0`.
    ///
    /// With zero-based cluster index `L`, `m(L)` is the order of the trailing
    /// matrix that starts at cluster `L` and `m(L + 1)` its coupling width.
    pub fn m(&self, k: usize) -> usize {
        assert!(k <= self.tau(), "m({k}) with tau = {}", self.tau());
        match k {
            0 => self.n,
            k if k == self.tau() => 0,
            k => self.suffix_sums[k - 1],
        }
    }

    /// Global row index of the first member of cluster `k` (zero-based).
    pub fn offset(&self, k: usize) -> usize {
        self.n - self.m(k)
    }

    /// The partition formed by clusters `k..tau` (zero-based `k`).
    ///
    /// Any suffix of a dominant partition is dominant.
    pub fn tail(&self, k: usize) -> Partition {
        assert!(k < self.tau(), "tail({k}) with tau = {}", self.tau());
        Partition {
            n: self.m(k),
            parts: self.parts[k..].to_vec(),
            suffix_sums: self.suffix_sums[k..].to_vec(),
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};parts={}", self.n, join(&self.parts))
    }
}

pub(crate) fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses a comma separated list such as `8,4,2,1`.
pub fn parse_parts(text: &str) -> Result<Vec<usize>, PartitionError> {
    text.split(',')
        .enumerate()
        .map(|(index, tok)| {
            let tok = tok.trim();
            let value: i64 = tok
                .parse()
                .map_err(|_| PartitionError::Parse(format!("bad part {tok:?}")))?;
            if value <= 0 {
                return Err(PartitionError::NonPositivePart { index, value });
            }
            Ok(value as usize)
        })
        .collect()
}

impl FromStr for Partition {
    type Err = PartitionError;

    /// Accepts `n=15;parts=8,4,2,1` or a bare `8,4,2,1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if !s.contains('=') {
            return Partition::from_parts(&parse_parts(s)?);
        }
        let mut n = None;
        let mut parts = None;
        for field in s.split(';') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| PartitionError::Parse(format!("bad field {field:?}")))?;
            match key.trim() {
                "n" => {
                    n = Some(
                        value
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| PartitionError::Parse(format!("bad n {value:?}")))?,
                    )
                }
                "parts" => parts = Some(parse_parts(value)?),
                other => return Err(PartitionError::Parse(format!("unknown key {other:?}"))),
            }
        }
        let parts = parts.ok_or_else(|| PartitionError::Parse("missing parts".into()))?;
        let partition = Partition::from_parts(&parts)?;
        if let Some(n) = n {
            if n != partition.n() {
                return Err(PartitionError::Parse(format!(
                    "n={n} but parts sum to {}",
                    partition.n()
                )));
            }
        }
        Ok(partition)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_two_of_fifteen() {
        let p = Partition::from_base(15, 2).unwrap();
        assert_eq!(p.parts(), &[8, 4, 2, 1]);
        assert_eq!(p.suffix_sums(), &[7, 3, 1]);
        assert_eq!(p.tau(), 4);
    }

    #[test]
    fn zero_digits_are_dropped() {
        assert_eq!(Partition::from_base(10, 2).unwrap().parts(), &[8, 2]);
        let p = Partition::from_base(9, 3).unwrap();
        assert_eq!(p.parts(), &[9]);
        assert_eq!(p.tau(), 1);
        assert!(p.suffix_sums().is_empty());
    }

    #[test]
    fn base_rejects_small_inputs() {
        assert!(matches!(
            Partition::from_base(1, 2),
            Err(PartitionError::InvalidBase { .. })
        ));
        assert!(matches!(
            Partition::from_base(5, 1),
            Err(PartitionError::InvalidBase { .. })
        ));
    }

    #[test]
    fn explicit_parts() {
        let p = Partition::from_parts(&[3, 2, 1]).unwrap();
        assert_eq!(p.n(), 6);
        assert_eq!(p.suffix_sums(), &[3, 1]);
        assert_eq!(Partition::from_parts(&[8, 4, 2, 1]).unwrap().n(), 15);
    }

    #[test]
    fn dominance_violation_reports_level() {
        assert_eq!(
            Partition::from_parts(&[2, 3]),
            Err(PartitionError::DominanceViolation {
                k: 1,
                part: 2,
                suffix: 3
            })
        );
        assert_eq!(
            Partition::from_parts(&[5, 1, 2]),
            Err(PartitionError::DominanceViolation {
                k: 2,
                part: 1,
                suffix: 2
            })
        );
    }

    #[test]
    fn zero_and_empty_parts() {
        assert_eq!(Partition::from_parts(&[]), Err(PartitionError::Empty));
        assert!(matches!(
            Partition::from_parts(&[3, 0]),
            Err(PartitionError::NonPositivePart { index: 1, .. })
        ));
        assert!(matches!(
            "4,-1".parse::<Partition>(),
            Err(PartitionError::NonPositivePart {
                index: 1,
                value: -1
            })
        ));
    }

    #[test]
    fn m_accessor_and_offsets() {
        let p = Partition::from_parts(&[8, 4, 2, 1]).unwrap();
        let ms: Vec<_> = (0..=4).map(|k| p.m(k)).collect();
        assert_eq!(ms, vec![15, 7, 3, 1, 0]);
        let offs: Vec<_> = (0..4).map(|k| p.offset(k)).collect();
        assert_eq!(offs, vec![0, 8, 12, 14]);
        let t = p.tail(1);
        assert_eq!(t.parts(), &[4, 2, 1]);
        assert_eq!(t.n(), 7);
    }

    #[test]
    fn text_form_round_trips() {
        let p = Partition::from_parts(&[8, 4, 2, 1]).unwrap();
        assert_eq!(p.to_string(), "n=15;parts=8,4,2,1");
        assert_eq!("n=15;parts=8,4,2,1".parse::<Partition>().unwrap(), p);
        assert_eq!("8, 4, 2, 1".parse::<Partition>().unwrap(), p);
        assert!("n=14;parts=8,4,2,1".parse::<Partition>().is_err());
    }

    #[test]
    fn every_base_partition_is_valid() {
        for p in [2, 3, 5, 10] {
            for n in 2..=10_000 {
                let part = Partition::from_base(n, p).unwrap();
                assert_eq!(part.n(), n);
                let again = Partition::from_parts(part.parts()).unwrap();
                assert_eq!(again, part);
                for (k, (&nk, &mk)) in part.parts().iter().zip(part.suffix_sums()).enumerate() {
                    assert!(nk >= mk, "n={n} p={p} k={k}");
                    let mut scale = 1;
                    while scale * p <= nk {
                        scale *= p;
                    }
                    assert_eq!(nk % scale, 0);
                    assert!(mk < scale && scale <= nk);
                }
            }
        }
    }
}
