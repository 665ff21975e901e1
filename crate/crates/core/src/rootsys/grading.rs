//! The stable grading `h = h(0) + h(1)`, restricted roots and weights of `V`.

use super::{apply_automorphism, build_root_system, height, pinned_automorphism, DynkinType, Kind, RootSystem};
use crate::arith::linalg::{rank, solve_in_basis};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootCase {
    /// Singleton orbit whose root space lies in `g`.
    GOnly,
    /// Singleton orbit whose root space lies in `V`.
    VOnly,
    /// Orbit of two roots, contributing one line to `g` and one to `V`.
    Mixed,
}

/// A `theta`-orbit of roots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictedRoot {
    pub orbit: Vec<Vec<i64>>,
    pub height: i64,
    pub case: RootCase,
    pub v_multiplicity: u8,
    /// Coordinates in the basis of restricted simple roots, one per node orbit.
    pub restricted: Vec<i64>,
}

impl RestrictedRoot {
    pub fn g_multiplicity(&self) -> u8 {
        match self.case {
            RootCase::VOnly => 0,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedData {
    pub dtype: DynkinType,
    pub theta_fixed_dim: usize,
    pub v_dim: usize,
    /// `dim V_0`, the part of `V` inside the Cartan subalgebra.
    pub v0_dim: usize,
    /// Orbits of the pinned involution on the nodes, ordered by least node.
    pub node_orbits: Vec<Vec<usize>>,
    pub restricted_roots: Vec<RestrictedRoot>,
    /// Simple roots `S_G` of `Phi_G` in restricted coordinates, sorted.
    pub g_root_basis: Vec<Vec<i64>>,
}

impl GradedData {
    /// Positive restricted roots of `G`, with multiplicity.
    pub fn g_positive(&self) -> impl Iterator<Item = &RestrictedRoot> {
        self.restricted_roots.iter().filter(|r| r.g_multiplicity() > 0 && r.height > 0)
    }

    /// `Phi_V^-`: weights of `V` of negative height, with multiplicity.
    pub fn v_negative(&self) -> impl Iterator<Item = &RestrictedRoot> {
        self.restricted_roots.iter().filter(|r| r.v_multiplicity > 0 && r.height < 0)
    }
}

fn node_orbits(perm: &[usize]) -> Vec<Vec<usize>> {
    let set: BTreeSet<Vec<usize>> = (0..perm.len())
        .map(|i| {
            let mut o = vec![i, perm[i]];
            o.sort_unstable();
            o.dedup();
            o
        })
        .collect();
    let mut v: Vec<Vec<usize>> = set.into_iter().collect();
    v.sort_by_key(|o| o[0]);
    v
}

fn restrict(orbits: &[Vec<usize>], a: &[i64]) -> Vec<i64> {
    orbits.iter().map(|o| o.iter().map(|&i| a[i]).sum()).collect()
}

/// Sign of the involution on the root line of a fixed root.
///
/// `theta` acts on `X_alpha` by `eps_alpha * (-1)^ht(alpha)`, where
/// `eps_alpha = -1` exactly when `alpha = beta + theta(beta)` for a root
/// `beta` not fixed by the pinning (this only happens in type `A_2n`).
fn fixed_root_sign(all: &[Vec<i64>], perm: &[usize], a: &[i64]) -> i64 {
    let folded = all.iter().any(|b| {
        let tb = apply_automorphism(perm, b);
        tb != *b && b.iter().zip(&tb).map(|(x, y)| x + y).eq(a.iter().copied())
    });
    let parity = if height(a).rem_euclid(2) == 0 { 1 } else { -1 };
    if folded {
        -parity
    } else {
        parity
    }
}

fn decompose(rs: &RootSystem) -> GradedData {
    let t = rs.dtype;
    let perm = pinned_automorphism(t);
    let orbits = node_orbits(&perm);
    let all = rs.all_roots();
    let mut seen = BTreeSet::new();
    let mut restricted_roots = Vec::new();
    for a in &all {
        if seen.contains(a) {
            continue;
        }
        let ta = apply_automorphism(&perm, a);
        seen.insert(a.clone());
        seen.insert(ta.clone());
        let h = height(a);
        let (orbit, case) = if ta == *a {
            let case = if fixed_root_sign(&all, &perm, a) == -1 { RootCase::VOnly } else { RootCase::GOnly };
            (vec![a.clone()], case)
        } else {
            let mut o = vec![a.clone(), ta];
            o.sort();
            (o, RootCase::Mixed)
        };
        let v_multiplicity = u8::from(case != RootCase::GOnly);
        restricted_roots.push(RestrictedRoot {
            restricted: restrict(&orbits, a),
            orbit,
            height: h,
            case,
            v_multiplicity,
        });
    }
    restricted_roots.sort_by(|x, y| x.height.cmp(&y.height).then_with(|| x.orbit.cmp(&y.orbit)));
    let v0_dim = orbits.iter().filter(|o| o.len() == 2).count();
    let v_dim = v0_dim + restricted_roots.iter().map(|r| r.v_multiplicity as usize).sum::<usize>();
    let g_pos: BTreeSet<Vec<i64>> = restricted_roots
        .iter()
        .filter(|r| r.g_multiplicity() > 0 && r.height > 0)
        .map(|r| r.restricted.clone())
        .collect();
    let g_root_basis: Vec<Vec<i64>> = g_pos
        .iter()
        .filter(|g| {
            !g_pos.iter().any(|h| {
                let diff: Vec<i64> = g.iter().zip(h).map(|(x, y)| x - y).collect();
                g_pos.contains(&diff)
            })
        })
        .cloned()
        .collect();
    GradedData {
        dtype: t,
        theta_fixed_dim: t.lie_dim() - v_dim,
        v_dim,
        v0_dim,
        node_orbits: orbits,
        restricted_roots,
        g_root_basis,
    }
}

pub fn graded_decomposition(t: DynkinType) -> GradedData {
    decompose(&build_root_system(t))
}

/// Coordinates for weights: a linear map from restricted coordinates to an
/// ambient lattice, together with a basis of `S_G` written in that lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightFrame {
    /// `ambient[j][k]`: coordinate `k` of the image of the `j`-th restricted simple root.
    pub ambient: Vec<Vec<i64>>,
    pub basis: Vec<Vec<i64>>,
    pub names: Vec<String>,
}

impl WeightFrame {
    pub fn to_ambient(&self, restricted: &[i64]) -> Vec<i64> {
        let dim = self.ambient[0].len();
        let mut out = vec![0; dim];
        for (c, img) in restricted.iter().zip(&self.ambient) {
            for (o, x) in out.iter_mut().zip(img) {
                *o += c * x;
            }
        }
        out
    }

    /// Coordinates of a restricted vector in the frame basis.
    pub fn coordinates(&self, restricted: &[i64]) -> Vec<Rational64> {
        solve_in_basis(&self.basis, &self.to_ambient(restricted)).expect("weights lie in the span of S_G")
    }
}

/// `gamma_i` bases of `S_G` for the exceptional types, as node sets (0-based).
pub(crate) fn e_gamma_nodes(rank: usize) -> Vec<Vec<usize>> {
    match rank {
        6 => vec![vec![2, 3], vec![0], vec![2], vec![1, 3]],
        7 => vec![vec![2, 3], vec![4, 5], vec![1, 3], vec![0, 2], vec![3, 4], vec![5, 6], vec![1, 2, 3, 4]],
        _ => vec![vec![1, 2, 3, 4], vec![5, 6], vec![3, 4], vec![0, 2], vec![1, 3], vec![4, 5], vec![6, 7], vec![2, 3]],
    }
}

/// The frame used to report exponents.
///
/// * `E`: the `gamma_i` bases, in restricted coordinates.
/// * `D_m`: orthogonal coordinates `e_1..e_m` (dropping `e_m` for odd `m`),
///   with `t_i = e_{2i-1}`, `s_i = e_{2i}` and basis `alpha_1..alpha_n`,
///   `gamma_1..gamma_n` built from `t` and `s` respectively.
/// * `A`: the computed `S_G`, in restricted coordinates.
pub fn weight_frame(g: &GradedData) -> WeightFrame {
    let k = g.node_orbits.len();
    let identity: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
    match g.dtype.kind {
        Kind::A => WeightFrame {
            ambient: identity,
            basis: g.g_root_basis.clone(),
            names: (1..=g.g_root_basis.len()).map(|i| format!("sigma{i}")).collect(),
        },
        Kind::E => {
            let basis = e_gamma_nodes(g.dtype.rank)
                .iter()
                .map(|nodes| {
                    let mut a = vec![0i64; g.dtype.rank];
                    nodes.iter().for_each(|&i| a[i] = 1);
                    restrict(&g.node_orbits, &a)
                })
                .collect();
            WeightFrame { ambient: identity, basis, names: (1..=k).map(|i| format!("gamma{i}")).collect() }
        }
        Kind::D => {
            let m = g.dtype.rank;
            let n = m / 2;
            let dim = 2 * n;
            // image of each simple root in e-coordinates, keeping e_1..e_{2n}
            let image = |j: usize| -> Vec<i64> {
                let mut e = vec![0i64; m];
                if j + 1 < m {
                    e[j] = 1;
                    e[j + 1] = -1;
                } else {
                    e[m - 2] = 1;
                    e[m - 1] = 1;
                }
                e.truncate(dim);
                e
            };
            let ambient = g.node_orbits.iter().map(|o| image(o[0])).collect();
            let t = |i: usize| 2 * (i - 1);
            let s = |i: usize| 2 * (i - 1) + 1;
            let mut basis = Vec::new();
            for coord in [t as fn(usize) -> usize, s as fn(usize) -> usize] {
                for i in 1..=n {
                    let mut v = vec![0i64; dim];
                    if i < n {
                        v[coord(i)] = 1;
                        v[coord(i + 1)] = -1;
                    } else if m % 2 == 1 {
                        v[coord(n)] = 1;
                    } else {
                        v[coord(n - 1)] = 1;
                        v[coord(n)] = 1;
                    }
                    basis.push(v);
                }
            }
            let names = (1..=n).map(|i| format!("alpha{i}")).chain((1..=n).map(|i| format!("gamma{i}"))).collect();
            WeightFrame { ambient, basis, names }
        }
    }
}

/// A weight of `V` in the frame basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightVector {
    #[serde(serialize_with = "crate::report::ser_rationals")]
    pub coords: Vec<Rational64>,
    pub height: i64,
}

/// One weight per coordinate of `V` (zero weights for `V_0`), in the frame basis.
pub fn v_weights(t: DynkinType) -> Vec<WeightVector> {
    let g = graded_decomposition(t);
    let frame = weight_frame(&g);
    let zero = vec![Rational64::from_integer(0); frame.basis.len()];
    let mut out: Vec<WeightVector> = (0..g.v0_dim).map(|_| WeightVector { coords: zero.clone(), height: 0 }).collect();
    for r in g.restricted_roots.iter().filter(|r| r.v_multiplicity > 0) {
        out.push(WeightVector { coords: frame.coordinates(&r.restricted), height: r.height });
    }
    out
}

/// The coordinates of `W_0`: restricted roots of height at most one carrying a
/// `V`-line, plus `V_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct W0Coordinates {
    pub coords: Vec<RestrictedRoot>,
    /// Indices into `coords` of the height-one coordinates.
    pub height_one: Vec<usize>,
    pub torus_dim: usize,
}

impl W0Coordinates {
    pub fn dim(&self) -> usize {
        self.coords.len() + self.torus_dim
    }
}

pub fn w0_coordinates(t: DynkinType) -> W0Coordinates {
    let g = graded_decomposition(t);
    let coords: Vec<RestrictedRoot> =
        g.restricted_roots.into_iter().filter(|r| r.v_multiplicity > 0 && r.height <= 1).collect();
    let height_one = coords.iter().enumerate().filter(|(_, r)| r.height == 1).map(|(i, _)| i).collect();
    W0Coordinates { coords, height_one, torus_dim: g.v0_dim }
}

/// Whether the frame basis is linearly independent and equal to `S_G`.
pub(crate) fn frame_matches_sg(g: &GradedData, frame: &WeightFrame) -> bool {
    if rank(&frame.basis) != frame.basis.len() {
        return false;
    }
    let sg: BTreeSet<Vec<i64>> = g.g_root_basis.iter().map(|r| frame.to_ambient(r)).collect();
    let fb: BTreeSet<Vec<i64>> = frame.basis.iter().cloned().collect();
    sg == fb
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_grading() {
        let g = graded_decomposition(DynkinType::a(2));
        assert_eq!(g.v_dim, 5);
        assert_eq!(g.theta_fixed_dim, 3);
        assert_eq!(g.g_root_basis.len(), 1);
    }

    #[test]
    fn frames_are_sg() {
        for t in
            [DynkinType::d(4), DynkinType::d(5), DynkinType::d(8), DynkinType::e(6), DynkinType::e(7), DynkinType::e(8)]
        {
            let g = graded_decomposition(t);
            assert!(frame_matches_sg(&g, &weight_frame(&g)), "{t}");
        }
    }
}
