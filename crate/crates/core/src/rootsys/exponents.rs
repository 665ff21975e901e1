//! Cusp exponents: the volume and `delta` characters, the monomial `Z(beta)`
//! and the power of `X` in the change of variables to height-one coordinates.

use super::grading::{frame_matches_sg, graded_decomposition, weight_frame, GradedData, WeightFrame};
use super::{DynkinType, Kind};
use crate::error::{AdeError, Result};
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

/// Exponent data computed from root data alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspExponents {
    #[serde(rename = "type")]
    pub dtype: DynkinType,
    /// Frame coordinates of the sum of the weights in `Phi_V^-`.
    #[serde(serialize_with = "crate::report::ser_rationals")]
    pub volume: Vec<Rational64>,
    /// Frame coordinates of the sum of the positive roots of `G`.
    #[serde(serialize_with = "crate::report::ser_rationals")]
    pub delta: Vec<Rational64>,
    /// Exponent of `beta_i`, indexed by node orbit.
    pub z: Vec<i64>,
    pub x_power: usize,
    pub basis_names: Vec<String>,
    /// Node orbit (1-based Bourbaki labels) of each `beta_i`.
    pub beta_nodes: Vec<Vec<usize>>,
    /// Height-one weights in frame coordinates, in `beta` order.
    #[serde(skip)]
    pub height_one: Vec<Vec<Rational64>>,
    /// `#Phi_V^-` and `dim V_0`.
    pub v_negative: usize,
    pub v0_dim: usize,
    pub v_dim: usize,
}

fn sum_coords(frame: &WeightFrame, vs: impl Iterator<Item = Vec<i64>>) -> Vec<Rational64> {
    let mut acc = vec![Rational64::zero(); frame.basis.len()];
    for v in vs {
        for (a, c) in acc.iter_mut().zip(frame.coordinates(&v)) {
            *a += c;
        }
    }
    acc
}

fn compute(g: &GradedData) -> CuspExponents {
    let frame = weight_frame(g);
    let k = g.node_orbits.len();
    let vneg: Vec<Vec<i64>> = g.v_negative().map(|r| r.restricted.clone()).collect();
    let gpos: Vec<Vec<i64>> = g.g_positive().map(|r| r.restricted.clone()).collect();
    let volume = sum_coords(&frame, vneg.iter().cloned());
    let delta = sum_coords(&frame, gpos.iter().cloned());
    // the height-one weights are the restricted simple roots, so e is read off
    // directly in restricted coordinates
    let mut total = vec![0i64; k];
    for v in vneg.iter().chain(&gpos) {
        for (t, x) in total.iter_mut().zip(v) {
            *t += x;
        }
    }
    let z = total.iter().map(|t| -t).collect();
    let height_one =
        (0..k).map(|i| frame.coordinates(&(0..k).map(|j| i64::from(i == j)).collect::<Vec<_>>())).collect();
    CuspExponents {
        dtype: g.dtype,
        volume,
        delta,
        z,
        x_power: g.v_dim,
        basis_names: frame.names.clone(),
        beta_nodes: g.node_orbits.iter().map(|o| o.iter().map(|i| i + 1).collect()).collect(),
        height_one,
        v_negative: vneg.len(),
        v0_dim: g.v0_dim,
        v_dim: g.v_dim,
    }
}

pub fn cusp_exponents(t: DynkinType) -> CuspExponents {
    compute(&graded_decomposition(t))
}

/// Exponents as printed in closed form or as literal tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatedExponents {
    pub volume: Option<Vec<Rational64>>,
    pub delta: Option<Vec<Rational64>>,
    pub z: Vec<i64>,
    pub x_power: usize,
}

fn ints(v: &[i64]) -> Vec<Rational64> {
    v.iter().map(|&x| Rational64::from_integer(x)).collect()
}

fn halves(v: &[i64]) -> Vec<Rational64> {
    v.iter().map(|&x| Rational64::new(x, 2)).collect()
}

pub fn stated_exponents(t: DynkinType) -> StatedExponents {
    let r = t.rank as i64;
    match (t.kind, t.rank) {
        (Kind::E, 6) => StatedExponents {
            volume: Some(ints(&[-12, -18, -22, -12])),
            delta: Some(ints(&[8, 14, 18, 10])),
            z: vec![4, 2, 8, 6],
            x_power: 42,
        },
        (Kind::E, 7) => StatedExponents {
            volume: Some(halves(&[-15, -26, -33, -36, -35, -30, -21])),
            delta: Some(ints(&[7, 12, 15, 16, 15, 12, 7])),
            z: vec![2, 5, 6, 8, 7, 4, 3],
            x_power: 70,
        },
        (Kind::E, _) => StatedExponents {
            volume: Some(ints(&[-18, -30, -40, -48, -54, -58, -30, -30])),
            delta: Some(ints(&[14, 26, 36, 44, 50, 54, 28, 28])),
            z: vec![4, 8, 10, 14, 12, 8, 6, 2],
            x_power: 128,
        },
        (Kind::D, _) if r % 2 == 1 => {
            let n = (r - 1) / 2;
            let alpha: Vec<i64> = (1..=n).map(|i| -2 * i * n + i * i - 2 * i).collect();
            let gamma: Vec<i64> = (1..=n).map(|i| -2 * i * n + i * i).collect();
            let d: Vec<i64> = (1..=n).map(|i| 2 * i * n - i * i).collect();
            StatedExponents {
                volume: Some(ints(&[alpha, gamma].concat())),
                delta: Some(ints(&[d.clone(), d].concat())),
                z: (1..=n).flat_map(|i| [2 * i, 2 * i]).collect(),
                x_power: ((2 * n + 1) * (2 * n + 1)) as usize,
            }
        }
        (Kind::D, _) => {
            let n = r / 2;
            let mut alpha: Vec<Rational64> =
                (1..=n - 2).map(|i| Rational64::from_integer(-2 * i * n + i * i - i)).collect();
            alpha.push(Rational64::new(-n * n - n + 4, 2));
            alpha.push(Rational64::new(-n * n - n, 2));
            let mut gamma: Vec<Rational64> =
                (1..=n - 2).map(|i| Rational64::from_integer(-2 * i * n + i * i + i)).collect();
            gamma.extend([Rational64::new(-n * n + n, 2); 2]);
            let mut d: Vec<Rational64> = (1..=n - 2).map(|i| Rational64::from_integer(2 * i * n - i * i - i)).collect();
            d.extend([Rational64::new((n - 1) * n, 2); 2]);
            let mut z: Vec<i64> = (1..n).flat_map(|i| [2 * i, 2 * i]).collect();
            z.extend([n, n]);
            StatedExponents {
                volume: Some([alpha, gamma].concat()),
                delta: Some([d.clone(), d].concat()),
                z,
                x_power: (4 * n * n) as usize,
            }
        }
        (Kind::A, _) => {
            let n = r / 2;
            let mut z: Vec<i64> = (1..=n).map(|i| 2 * i).collect();
            if r % 2 == 1 {
                z.push(n + 1);
            }
            StatedExponents { volume: None, delta: None, z, x_power: ((r + 1) * (r + 2) / 2 - 1) as usize }
        }
    }
}

/// JSON form of a verified type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentReport {
    #[serde(rename = "type")]
    pub dtype: String,
    pub volume_exponents: Vec<String>,
    pub delta_exponents: Vec<String>,
    pub z_exponents: Vec<i64>,
    pub x_power: usize,
    pub basis: Vec<String>,
    pub beta_nodes: Vec<Vec<usize>>,
}

fn fail(t: DynkinType, coordinate: usize, detail: String) -> AdeError {
    AdeError::IdentityFailure { kind: t.to_string(), coordinate, detail }
}

fn compare<T: PartialEq + std::fmt::Display>(t: DynkinType, what: &str, got: &[T], want: &[T]) -> Result<()> {
    if got.len() != want.len() {
        return Err(fail(t, got.len().min(want.len()), format!("{what}: length {} vs {}", got.len(), want.len())));
    }
    match got.iter().zip(want).position(|(a, b)| a != b) {
        Some(i) => Err(fail(t, i, format!("{what}: computed {} but expected {}", got[i], want[i]))),
        None => Ok(()),
    }
}

/// Checks, coordinate by coordinate:
///
/// * `volume + delta + sum_i z_i w_i = 0` where `w_i` are the height-one weights;
/// * `sum z_i + #Phi_V^- + dim V_0 = dim V`, the power of `X`;
/// * `z_i >= 2`;
/// * agreement with the stated tables and closed forms.
pub fn verify_exponent_identity(t: DynkinType) -> Result<ExponentReport> {
    let g = graded_decomposition(t);
    if !frame_matches_sg(&g, &weight_frame(&g)) {
        return Err(fail(t, 0, "reporting basis is not a basis of S_G".into()));
    }
    let c = compute(&g);
    let dim = c.volume.len();
    for j in 0..dim {
        let s = c.volume[j] + c.delta[j] + c.z.iter().zip(&c.height_one).map(|(&e, w)| w[j] * e).sum::<Rational64>();
        if !s.is_zero() {
            return Err(fail(t, j, format!("weight identity off by {s} in {}", c.basis_names[j])));
        }
    }
    let power = c.z.iter().sum::<i64>() as usize + c.v_negative + c.v0_dim;
    if power != c.v_dim {
        return Err(fail(t, 0, format!("X-power {power} differs from dim V = {}", c.v_dim)));
    }
    if let Some(i) = c.z.iter().position(|&e| e < 2) {
        return Err(fail(t, i, format!("exponent {} is below 2", c.z[i])));
    }
    let s = stated_exponents(t);
    compare(t, "z", &c.z, &s.z)?;
    if let Some(v) = &s.volume {
        compare(t, "volume", &c.volume, v)?;
    }
    if let Some(d) = &s.delta {
        compare(t, "delta", &c.delta, d)?;
    }
    if c.x_power != s.x_power {
        return Err(fail(t, 0, format!("X-power {} but expected {}", c.x_power, s.x_power)));
    }
    Ok(ExponentReport {
        dtype: t.to_string(),
        volume_exponents: c.volume.iter().map(|x| x.to_string()).collect(),
        delta_exponents: c.delta.iter().map(|x| x.to_string()).collect(),
        z_exponents: c.z,
        x_power: c.x_power,
        basis: c.basis_names,
        beta_nodes: c.beta_nodes,
    })
}

/// `A2..A6`, `D4..D12`, `E6`, `E7`, `E8`.
pub fn default_casecheck_types() -> Vec<DynkinType> {
    let mut v: Vec<DynkinType> = (2..=6).map(DynkinType::a).collect();
    v.extend((4..=12).map(DynkinType::d));
    v.extend((6..=8).map(DynkinType::e));
    v
}

pub fn casecheck(types: &[DynkinType]) -> Vec<(DynkinType, Result<ExponentReport>)> {
    types.iter().map(|&t| (t, verify_exponent_identity(t))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_default_types_pass() {
        for (t, r) in casecheck(&default_casecheck_types()) {
            assert!(r.is_ok(), "{t}: {r:?}");
        }
    }

    #[test]
    fn d5_values() {
        let c = cusp_exponents(DynkinType::d(5));
        assert_eq!(c.z, vec![2, 2, 4, 4]);
        assert_eq!(c.x_power, 25);
        assert_eq!(c.volume, ints(&[-5, -8, -3, -4]));
    }

    #[test]
    fn e6_height_one_weights() {
        let c = cusp_exponents(DynkinType::e(6));
        let w: Vec<Vec<i64>> = c.height_one.iter().map(|v| v.iter().map(|x| x.to_integer()).collect()).collect();
        assert_eq!(w, vec![vec![0, 1, 0, 0], vec![-1, 0, 1, 1], vec![0, 0, 1, 0], vec![1, 0, -1, 0]]);
    }
}
