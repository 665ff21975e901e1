//! ADE root systems with the pinning used throughout: Bourbaki node numbering,
//! roots as integer vectors in the simple-root basis.

mod exponents;
mod grading;

pub use exponents::{
    casecheck, cusp_exponents, default_casecheck_types, stated_exponents, verify_exponent_identity, CuspExponents,
    ExponentReport, StatedExponents,
};
pub use grading::{
    graded_decomposition, v_weights, w0_coordinates, weight_frame, GradedData, RestrictedRoot, RootCase, W0Coordinates,
    WeightFrame, WeightVector,
};

use crate::error::{AdeError, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    A,
    D,
    E,
}

/// A simply laced Dynkin type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DynkinType {
    pub kind: Kind,
    pub rank: usize,
}

impl DynkinType {
    pub fn new(kind: Kind, rank: usize) -> Result<Self> {
        let ok = match kind {
            Kind::A => rank >= 2,
            Kind::D => rank >= 4,
            Kind::E => (6..=8).contains(&rank),
        };
        if !ok {
            let k = match kind {
                Kind::A => 'A',
                Kind::D => 'D',
                Kind::E => 'E',
            };
            return Err(AdeError::InvalidRank { kind: k, rank });
        }
        Ok(DynkinType { kind, rank })
    }

    /// Shorthand for `A(rank)`; panics on an invalid rank.
    pub fn a(rank: usize) -> Self {
        Self::new(Kind::A, rank).expect("valid A rank")
    }

    pub fn d(rank: usize) -> Self {
        Self::new(Kind::D, rank).expect("valid D rank")
    }

    pub fn e(rank: usize) -> Self {
        Self::new(Kind::E, rank).expect("valid E rank")
    }

    /// `#Phi_H`, the number of roots.
    pub fn root_count(&self) -> usize {
        let r = self.rank;
        match (self.kind, r) {
            (Kind::A, _) => r * (r + 1),
            (Kind::D, _) => 2 * r * (r - 1),
            (Kind::E, 6) => 72,
            (Kind::E, 7) => 126,
            (Kind::E, _) => 240,
        }
    }

    /// `dim h = rank + #Phi_H`.
    pub fn lie_dim(&self) -> usize {
        self.rank + self.root_count()
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            Kind::A => 'A',
            Kind::D => 'D',
            Kind::E => 'E',
        };
        write!(f, "{k}{}", self.rank)
    }
}

impl FromStr for DynkinType {
    type Err = AdeError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || AdeError::InvalidInput(format!("unknown Dynkin type {s:?}"));
        let mut chars = s.chars();
        let kind = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Kind::A,
            Some('D') => Kind::D,
            Some('E') => Kind::E,
            _ => return Err(bad()),
        };
        let rest = chars.as_str().trim_start_matches('(').trim_end_matches(')').trim_start_matches('_');
        let rank: usize = rest.parse().map_err(|_| bad())?;
        DynkinType::new(kind, rank)
    }
}

/// Cartan matrix in Bourbaki numbering (0-based indices).
pub fn cartan_matrix(t: DynkinType) -> Vec<Vec<i64>> {
    let r = t.rank;
    let mut c = vec![vec![0i64; r]; r];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut edge = |i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    match t.kind {
        Kind::A => (0..r - 1).for_each(|i| edge(i, i + 1)),
        Kind::D => {
            (0..r - 2).for_each(|i| edge(i, i + 1));
            edge(r - 3, r - 1);
        }
        Kind::E => {
            edge(0, 2);
            edge(1, 3);
            edge(2, 3);
            (3..r - 1).for_each(|i| edge(i, i + 1));
        }
    }
    c
}

/// Root data: simple roots are the unit vectors, positive roots are sorted by
/// height and then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootSystem {
    pub dtype: DynkinType,
    pub cartan: Vec<Vec<i64>>,
    pub simple_roots: Vec<Vec<i64>>,
    pub positive_roots: Vec<Vec<i64>>,
}

pub fn height(root: &[i64]) -> i64 {
    root.iter().sum()
}

impl RootSystem {
    /// Positive roots followed by their negatives.
    pub fn all_roots(&self) -> Vec<Vec<i64>> {
        let mut v = self.positive_roots.clone();
        v.extend(self.positive_roots.iter().map(|a| a.iter().map(|x| -x).collect::<Vec<_>>()));
        v
    }

    pub fn height(&self, root: &[i64]) -> i64 {
        height(root)
    }

    /// `<a, alpha_i^vee>` for a vector in the simple-root basis.
    pub fn pairing(&self, a: &[i64], i: usize) -> i64 {
        a.iter().zip(&self.cartan).map(|(x, row)| x * row[i]).sum()
    }

    /// Highest root.
    pub fn highest_root(&self) -> &[i64] {
        self.positive_roots.last().expect("root systems are nonempty")
    }
}

/// Positive-root closure from the Cartan matrix.
///
/// In a simply laced system a positive root `a` and a simple root `alpha_i`
/// with `<a, alpha_i^vee> = -1` give the root `a + alpha_i`, and every positive
/// root arises this way from a simple root.
pub fn build_root_system(t: DynkinType) -> RootSystem {
    let r = t.rank;
    let cartan = cartan_matrix(t);
    let simple: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
    let mut seen: HashSet<Vec<i64>> = simple.iter().cloned().collect();
    let mut frontier = simple.clone();
    let mut pos = simple.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for i in 0..r {
                let p: i64 = a.iter().zip(&cartan).map(|(x, row)| x * row[i]).sum();
                if p < 0 {
                    let mut b = a.clone();
                    b[i] += 1;
                    if seen.insert(b.clone()) {
                        next.push(b.clone());
                        pos.push(b);
                    }
                }
            }
        }
        frontier = next;
    }
    pos.sort_by(|a, b| height(a).cmp(&height(b)).then_with(|| a.cmp(b)));
    RootSystem { dtype: t, cartan, simple_roots: simple, positive_roots: pos }
}

/// The pinned involution as a permutation of the simple roots (0-based).
///
/// It realises `-w0`: node reversal for `A_n`, the swap of the two short
/// legs for `D_odd`, the diagram flip for `E6`, and the identity otherwise.
pub fn pinned_automorphism(t: DynkinType) -> Vec<usize> {
    let r = t.rank;
    match t.kind {
        Kind::A => (0..r).rev().collect(),
        Kind::D => {
            let mut p: Vec<usize> = (0..r).collect();
            if r % 2 == 1 {
                p.swap(r - 2, r - 1);
            }
            p
        }
        Kind::E if r == 6 => vec![5, 1, 4, 3, 2, 0],
        Kind::E => (0..r).collect(),
    }
}

/// `theta(a)` for a root in the simple-root basis.
pub fn apply_automorphism(perm: &[usize], a: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[perm[i]] = x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let t: DynkinType = "E7".parse().unwrap();
        assert_eq!(t, DynkinType::e(7));
        assert_eq!(t.to_string(), "E7");
        assert_eq!("D(5)".parse::<DynkinType>().unwrap(), DynkinType::d(5));
        assert!("E9".parse::<DynkinType>().is_err());
        assert!("A1".parse::<DynkinType>().is_err());
    }

    #[test]
    fn highest_roots() {
        assert_eq!(build_root_system(DynkinType::e(8)).highest_root(), &[2, 3, 4, 6, 5, 4, 3, 2]);
        assert_eq!(build_root_system(DynkinType::d(5)).highest_root(), &[1, 2, 2, 1, 1]);
    }
}
