//! Simplex volume via Cayley-Menger determinants, the strength of a simplex,
//! and the Lipschitz constants that normalize it.
//!
//! The strength of an `(n+1)`-point simplex `A` in `R^n` is
//! `sigma(A) = V^2(A) / p(A)^(2n-1)` where `V` is the simplex volume and
//! `p(A)` is half of the sum of all pairwise distances. It vanishes exactly
//! on degenerate simplices and is Lipschitz in the vertex positions, which
//! is what lets a discrete orientation sign enter a continuous metric.

use crate::error::{Error, Result};
use crate::geometry::{det_in_place, DistanceMatrix};

/// Pairwise distances of a simplex vertex tuple.
///
/// Same storage as a distance matrix of an ordered tuple; `h` vertices give
/// `h(h-1)/2` stored entries.
pub type SimplexDistances = DistanceMatrix;

/// Number of fixed-point-free permutations of `k` elements.
///
/// Computed exactly by the recurrence `r_k = k r_(k-1) + (-1)^k`.
pub fn rencontre(k: u32) -> Result<u64> {
    let mut r: u64 = 1; // r_0
    for i in 1..=u64::from(k) {
        let term = r
            .checked_mul(i)
            .ok_or_else(|| Error::Overflow(format!("rencontre number r_{k} exceeds u64")))?;
        r = if i % 2 == 0 {
            term.checked_add(1)
                .ok_or_else(|| Error::Overflow(format!("rencontre number r_{k} exceeds u64")))?
        } else {
            term - 1
        };
    }
    Ok(r)
}

/// Half of the sum of all pairwise distances, `p(A)`.
///
/// For a triangle this is the half-perimeter that appears in Heron's formula.
pub fn half_sum_distances(s: &SimplexDistances) -> Result<f64> {
    if s.h() < 2 {
        return Err(Error::InvalidInput(
            "a simplex needs at least two vertices".into(),
        ));
    }
    Ok(s.upper().iter().sum::<f64>() / 2.0)
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Squared volume of the `n`-simplex on `n+1` vertices with the given
/// pairwise distances.
///
/// `V^2 = (-1)^(n-1) / (2^n (n!)^2) * det B_hat`, where `B_hat` borders the
/// squared-distance matrix with a `(0,1,..,1)` row and column. Float results
/// that come out slightly negative near degeneracy are clamped to zero;
/// significantly negative results mean the distances are not realizable in
/// `R^n` at all.
pub fn cayley_menger_volume_sq(s: &SimplexDistances) -> Result<f64> {
    let h = s.h();
    if h < 2 {
        return Err(Error::InvalidInput(
            "a simplex needs at least two vertices".into(),
        ));
    }
    let n = h - 1;
    let size = n + 2;
    let mut b = vec![0.0; size * size];
    for j in 1..size {
        b[j] = 1.0;
        b[j * size] = 1.0;
    }
    for i in 0..h {
        for j in 0..h {
            let d = s.get(i, j);
            b[(i + 1) * size + (j + 1)] = d * d;
        }
    }
    let det = det_in_place(size, &mut b);
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let v2 = sign * det / (2f64.powi(n as i32) * factorial_f64(n).powi(2));
    if v2 >= 0.0 {
        return Ok(v2);
    }
    let p = half_sum_distances(s)?;
    if v2.abs() <= 1e-9 * p.powi(2 * n as i32) {
        Ok(0.0)
    } else {
        Err(Error::NonEmbeddable(format!(
            "squared volume {v2:e} is significantly negative; distances are not realizable in R^{n}"
        )))
    }
}

/// Strength `sigma(A) = V^2(A) / p(A)^(2n-1)` of an `(n+1)`-vertex simplex.
///
/// For `n = 1` the strength of a segment is `2 |p_0 - p_1|`.
pub fn strength(s: &SimplexDistances, n: usize) -> Result<f64> {
    if s.h() != n + 1 {
        return Err(Error::DimensionMismatch(format!(
            "strength in dimension {n} needs {} vertices, got {}",
            n + 1,
            s.h()
        )));
    }
    if n == 1 {
        return Ok(2.0 * s.get(0, 1));
    }
    let p = half_sum_distances(s)?;
    if p == 0.0 {
        return Err(Error::Degenerate(
            "all simplex vertices coincide; strength undefined".into(),
        ));
    }
    let v2 = cayley_menger_volume_sq(s)?;
    Ok(v2 / p.powi(2 * n as i32 - 1))
}

/// Upper bound for the Lipschitz constant of the strength in dimension `n`.
///
/// `n = 2` uses the tight planar constant `2 sqrt(3)`; higher dimensions use
/// the rencontre-number bound
/// `(4 r_n + 2 r_(n+1) + n(2n-1)/4 r_(n+2)) * 2^(n-0.5) sqrt(n+1) / ((n!)^2 n^(2n-1.5))`.
/// `n = 1` uses 2, matching the segment strength `2|p_0 - p_1|`.
pub fn lipschitz_constant(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    match n {
        1 => 2.0,
        2 => 2.0 * 3f64.sqrt(),
        _ => {
            // f64 recurrence; exact for the small n used in practice
            let mut r = vec![1.0f64; n + 3];
            for k in 1..=n + 2 {
                r[k] = k as f64 * r[k - 1] + if k % 2 == 0 { 1.0 } else { -1.0 };
            }
            let nf = n as f64;
            let combo = 4.0 * r[n] + 2.0 * r[n + 1] + nf * (2.0 * nf - 1.0) / 4.0 * r[n + 2];
            combo * 2f64.powf(nf - 0.5) * (nf + 1.0).sqrt()
                / (factorial_f64(n).powi(2) * nf.powf(2.0 * nf - 1.5))
        }
    }
}

/// Signed strength scaled to unit Lipschitz constant: `sign * sigma / c_n`.
pub fn normalized_signed_strength(s: &SimplexDistances, sign: i8, n: usize) -> Result<f64> {
    if sign == 0 {
        return Ok(0.0);
    }
    Ok(f64::from(sign) * strength(s, n)? / lipschitz_constant(n))
}

/// Dimension-indexed constants: `c_n` plus the rencontre numbers feeding it.
#[derive(Clone, Debug)]
pub struct StrengthConstants {
    pub n: usize,
    pub c_n: f64,
    /// `r_2 .. r_(n+2)`.
    pub rencontre_table: Vec<u64>,
}

impl StrengthConstants {
    pub fn for_dimension(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let rencontre_table = (2..=n as u32 + 2).map(rencontre).collect::<Result<_>>()?;
        Ok(Self {
            n,
            c_n: lipschitz_constant(n),
            rencontre_table,
        })
    }
}
