//! Flattened per-subset vectors (AOV/ACV) and their coordinate-wise moments
//! (ODM/CDM).
//!
//! Averaging each relative column and sorting the pieces turns an ORD/OCD
//! into a plain vector; the coordinate-wise moments over all subsets give a
//! fast invariant whose `L_inf` distance lower-bounds the EMD between the
//! full distributions.

use crate::error::{Error, Result};
use crate::geometry::{distance, PointCloud, Tolerance};
use crate::invariants::{anchor_cloud, build_ocd, build_ord, Anchor, CentredDist, RelativeDist};
use itertools::Itertools;
use rayon::prelude::*;

/// Which distribution a moment vector summarizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentKind {
    Odm,
    Cdm,
}

impl MomentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MomentKind::Odm => "odm",
            MomentKind::Cdm => "cdm",
        }
    }

    /// Coordinate count of an AOV (`Odm`) or ACV (`Cdm`) for an
    /// `m`-point cloud in `R^n`.
    pub fn vector_len(self, m: usize, n: usize) -> usize {
        match self {
            MomentKind::Odm => n * (n - 1) / 2 + 2 * (m - n),
            MomentKind::Cdm => n * (n - 1) / 2 + 3 * (m - n + 1),
        }
    }
}

/// Coordinate-wise moment of a flattened invariant distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector {
    pub kind: MomentKind,
    pub order: u32,
    pub m: usize,
    pub n: usize,
    pub coords: Vec<f64>,
}

/// All pairwise distances of the tuple sorted increasingly; with
/// `with_origin`, followed by the sorted distances to the origin.
pub fn sorted_distance_vector(points: &[&[f64]], with_origin: bool) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty tuple".into()));
    }
    let mut out = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            out.push(distance(points[i], points[j])?);
        }
    }
    out.sort_by(f64::total_cmp);
    if with_origin {
        let origin = vec![0.0; points[0].len()];
        let mut to_origin: Vec<f64> = points
            .iter()
            .map(|p| distance(p, &origin))
            .collect::<Result<_>>()?;
        to_origin.sort_by(f64::total_cmp);
        out.extend(to_origin);
    }
    Ok(out)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Flattens a canonical ORD: sorted basis distances, sorted column
/// averages, sorted normalized signed strengths.
pub fn aov(ord: &RelativeDist) -> Vec<f64> {
    let n = ord.n();
    let mut out = sorted(ord.basis().upper().to_vec());
    out.extend(sorted(
        ord.columns()
            .iter()
            .map(|c| c.dists.iter().sum::<f64>() / n as f64)
            .collect(),
    ));
    out.extend(sorted(
        ord.columns().iter().map(|c| c.norm_strength).collect(),
    ));
    out
}

/// Flattens a canonical OCD: sorted basis distances (pairwise within `A`,
/// then to the origin), sorted averages of the first `n-1` rows, sorted
/// origin-distance row, sorted strengths.
pub fn acv(ocd: &CentredDist) -> Vec<f64> {
    let n = ocd.n();
    let basis = ocd.basis();
    let mut pairwise = Vec::new();
    for i in 0..n - 1 {
        for j in i + 1..n - 1 {
            pairwise.push(basis.get(i, j));
        }
    }
    let mut out = sorted(pairwise);
    out.extend(sorted((0..n - 1).map(|i| basis.get(i, n - 1)).collect()));
    if n > 1 {
        out.extend(sorted(
            ocd.columns()
                .iter()
                .map(|c| c.dists[..n - 1].iter().sum::<f64>() / (n - 1) as f64)
                .collect(),
        ));
    } else {
        // no basis points besides the origin: the averages segment is empty
        // only in name; keep the per-column slot so lengths stay uniform
        out.extend(vec![0.0; ocd.columns().len()]);
    }
    out.extend(sorted(ocd.columns().iter().map(|c| c.dists[n - 1]).collect()));
    out.extend(sorted(
        ocd.columns().iter().map(|c| c.norm_strength).collect(),
    ));
    out
}

/// AOV for one `n`-subset of the cloud.
pub fn average_oriented_vector(
    cloud: &PointCloud,
    basis: &[usize],
    tol: Tolerance,
) -> Result<Vec<f64>> {
    Ok(aov(&build_ord(cloud, basis, tol)?))
}

/// ACV for one `(n-1)`-subset of an anchored cloud.
pub fn average_centred_vector(
    anchored: &PointCloud,
    basis: &[usize],
    tol: Tolerance,
) -> Result<Vec<f64>> {
    Ok(acv(&build_ocd(anchored, basis, tol)?))
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Coordinate-wise `l`-th moment of equal-length vectors.
///
/// `l = 1` is the mean, `l = 2` the standard deviation, `l >= 3` the
/// standardized moment with 0 substituted where the deviation vanishes.
pub fn moment(vectors: &[Vec<f64>], l: u32) -> Result<Vec<f64>> {
    if vectors.is_empty() {
        return Err(Error::InvalidInput("no vectors to aggregate".into()));
    }
    if l == 0 {
        return Err(Error::InvalidInput("moment order must be >= 1".into()));
    }
    let len = vectors[0].len();
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::DimensionMismatch(
            "moment needs equal-length vectors".into(),
        ));
    }
    let k = vectors.len() as f64;
    let mut out = Vec::with_capacity(len);
    let mut column = vec![0.0; vectors.len()];
    for c in 0..len {
        for (slot, v) in column.iter_mut().zip(vectors) {
            *slot = v[c];
        }
        let mean = pairwise_sum(&column) / k;
        if l == 1 {
            out.push(mean);
            continue;
        }
        let centred: Vec<f64> = column.iter().map(|x| (x - mean) * (x - mean)).collect();
        let sd = (pairwise_sum(&centred) / k).sqrt();
        if l == 2 {
            out.push(sd);
            continue;
        }
        if sd <= 1e-12 * mean.abs().max(1.0) {
            out.push(0.0);
            continue;
        }
        let standardized: Vec<f64> = column
            .iter()
            .map(|x| ((x - mean) / sd).powi(l as i32))
            .collect();
        out.push(pairwise_sum(&standardized) / k);
    }
    Ok(out)
}

/// Oriented distance moment: the `l`-th moment over the AOVs of all
/// `binom(m, n)` subsets.
pub fn odm(cloud: &PointCloud, l: u32, tol: Tolerance) -> Result<MomentVector> {
    let n = cloud.dim();
    let m = cloud.len();
    if m <= n {
        return Err(Error::InvalidInput(format!(
            "ODM needs more points than the dimension (m = {m}, n = {n})"
        )));
    }
    let subsets: Vec<Vec<usize>> = (0..m).combinations(n).collect();
    let vectors: Vec<Vec<f64>> = subsets
        .par_iter()
        .map(|basis| average_oriented_vector(cloud, basis, tol))
        .collect::<Result<_>>()?;
    let coords = moment(&vectors, l)?;
    debug_assert_eq!(coords.len(), MomentKind::Odm.vector_len(m, n));
    Ok(MomentVector {
        kind: MomentKind::Odm,
        order: l,
        m,
        n,
        coords,
    })
}

/// Centred distance moment: the `l`-th moment over the ACVs of all
/// eligible `(n-1)`-subsets of the anchored cloud.
pub fn cdm(cloud: &PointCloud, l: u32, anchor: Anchor, tol: Tolerance) -> Result<MomentVector> {
    let n = cloud.dim();
    let m = cloud.len();
    if m < n {
        return Err(Error::InvalidInput(format!(
            "CDM needs at least as many points as the dimension (m = {m}, n = {n})"
        )));
    }
    let (anchored, eligible) = anchor_cloud(cloud, anchor)?;
    let subsets: Vec<Vec<usize>> = eligible.into_iter().combinations(n - 1).collect();
    let vectors: Vec<Vec<f64>> = subsets
        .par_iter()
        .map(|basis| average_centred_vector(&anchored, basis, tol))
        .collect::<Result<_>>()?;
    let coords = moment(&vectors, l)?;
    debug_assert_eq!(coords.len(), MomentKind::Cdm.vector_len(m, n));
    Ok(MomentVector {
        kind: MomentKind::Cdm,
        order: l,
        m,
        n,
        coords,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strength::lipschitz_constant;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn cloud_t() -> PointCloud {
        PointCloud::new(
            2,
            &[
                vec![1.0, 1.0],
                vec![-1.0, 1.0],
                vec![-2.0, 0.0],
                vec![2.0, 0.0],
            ],
        )
        .unwrap()
    }

    fn cloud_k() -> PointCloud {
        PointCloud::new(
            2,
            &[
                vec![0.0, 1.0],
                vec![-1.0, 0.0],
                vec![0.0, -1.0],
                vec![3.0, 0.0],
            ],
        )
        .unwrap()
    }

    fn triangle_r() -> PointCloud {
        PointCloud::new(2, &[vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 3.0]]).unwrap()
    }

    #[test]
    fn sorted_distance_vector_examples() {
        let r = triangle_r();
        let pts: Vec<&[f64]> = r.points().collect();
        assert_eq!(
            sorted_distance_vector(&pts, false).unwrap(),
            vec![3.0, 4.0, 5.0]
        );
        // single anchor point at the origin
        assert_eq!(
            sorted_distance_vector(&[r.point(0)], true).unwrap(),
            vec![0.0]
        );
        // repeated distances preserved
        let iso = PointCloud::new(
            2,
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3.75f64.sqrt()]],
        )
        .unwrap();
        let pts: Vec<&[f64]> = iso.points().collect();
        let sdv = sorted_distance_vector(&pts, false).unwrap();
        assert_abs_diff_eq!(sdv[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sdv[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sdv[2], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn aov_examples_from_t_and_k() {
        // T, basis the sqrt(2)-edge ((1,1),(2,0))
        let v = average_oriented_vector(&cloud_t(), &[0, 3], tol()).unwrap();
        let expect = [1.414, 2.581, 3.581, -0.015, -0.008];
        assert_eq!(v.len(), 5);
        for (a, e) in v.iter().zip(expect) {
            assert_abs_diff_eq!(a, &e, epsilon = 1e-3);
        }
        // K, basis the 4-edge ((-1,0),(3,0))
        let v = average_oriented_vector(&cloud_k(), &[1, 3], tol()).unwrap();
        let expect = [4.0, 2.288, 2.288, -0.015, 0.015];
        for (a, e) in v.iter().zip(expect) {
            assert_abs_diff_eq!(a, &e, epsilon = 1e-3);
        }
    }

    #[test]
    fn aov_degenerate_strengths_are_zero() {
        let c = PointCloud::new(
            2,
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let v = average_oriented_vector(&c, &[0, 1], tol()).unwrap();
        // strengths are the last two coordinates; the collinear q gives 0
        assert_eq!(v[3], 0.0);
        assert!(v[4] > 0.0);
    }

    #[test]
    fn acv_examples() {
        // ACV(R; p1) anchored at p1 = [0; 3,4; 3,4; 0,0]
        let r = triangle_r();
        let v = average_centred_vector(&r, &[0], tol()).unwrap();
        assert_eq!(v, vec![0.0, 3.0, 4.0, 3.0, 4.0, 0.0, 0.0]);

        // square, any vertex: [1; sqrt2, sqrt2, 2; 1,1,1; -s, 0, s]
        let s = PointCloud::new(
            2,
            &[
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
        )
        .unwrap();
        let v = average_centred_vector(&s, &[0], tol()).unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!(v[0], 1.0);
        let s2 = 2f64.sqrt();
        assert_abs_diff_eq!(v[1], s2, epsilon = 1e-12);
        assert_abs_diff_eq!(v[2], s2, epsilon = 1e-12);
        assert_eq!(v[3], 2.0);
        assert_eq!(&v[4..7], &[1.0, 1.0, 1.0]);
        // strength of the right isoceles triangle (1, 1, sqrt2)
        let p = 1.0 + s2 / 2.0;
        let sigma = 0.25 / p.powi(3) / lipschitz_constant(2);
        assert_abs_diff_eq!(v[7], -sigma, epsilon = 1e-12);
        assert_eq!(v[8], 0.0);
        assert_abs_diff_eq!(v[9], sigma, epsilon = 1e-12);

        // collinear clouds have all-zero strengths
        let line = PointCloud::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]]).unwrap();
        let v = average_centred_vector(&line, &[1], tol()).unwrap();
        assert_eq!(&v[5..], &[0.0, 0.0]);
    }

    #[test]
    fn moment_examples() {
        // identical vectors have zero deviation
        let vs = vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]];
        assert_eq!(moment(&vs, 2).unwrap(), vec![0.0, 0.0]);
        // and standardized moments substitute 0 there
        assert_eq!(moment(&vs, 3).unwrap(), vec![0.0, 0.0]);

        let vs = vec![vec![0.0], vec![2.0]];
        assert_eq!(moment(&vs, 1).unwrap(), vec![1.0]);
        assert_eq!(moment(&vs, 2).unwrap(), vec![1.0]);

        assert!(moment(&[], 1).is_err());
    }

    #[test]
    fn odm_first_moment_for_t_and_k() {
        let t = odm(&cloud_t(), 1, tol()).unwrap();
        let k = odm(&cloud_k(), 1, tol()).unwrap();
        assert_eq!(t.coords.len(), 5);
        // shared first coordinate (3 + sqrt2 + sqrt10) / 3
        let expect = (3.0 + 2f64.sqrt() + 10f64.sqrt()) / 3.0;
        assert_abs_diff_eq!(t.coords[0], expect, epsilon = 1e-12);
        assert_abs_diff_eq!(k.coords[0], expect, epsilon = 1e-12);
        // means of the per-subset AOV coordinates (T column sums from the
        // six flattened vectors)
        let s2 = 2f64.sqrt();
        let s10 = 10f64.sqrt();
        assert_abs_diff_eq!(t.coords[1], (2.0 + s2 + s10) / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            k.coords[1],
            (8.0 + 5.0 * s2 + 3.0 * s10) / 12.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            t.coords[2],
            (16.0 + 4.0 * s2 + 4.0 * s10) / 12.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            k.coords[2],
            (16.0 + 3.0 * s2 + 5.0 * s10) / 12.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(k.coords[4], 0.013, epsilon = 1e-3);
    }

    #[test]
    fn cdm_for_r_anchored_at_p1() {
        let v = cdm(&triangle_r(), 1, Anchor::Point(0), tol()).unwrap();
        assert_eq!(v.coords.len(), 7);
        let sigma = (1.0 / 6.0) / lipschitz_constant(2); // strength of (3,4,5)
        let expect = [
            7.0 / 3.0,
            10.0 / 3.0,
            14.0 / 3.0,
            1.0,
            11.0 / 3.0,
            -sigma / 3.0,
            sigma / 3.0,
        ];
        for (a, e) in v.coords.iter().zip(expect) {
            assert_abs_diff_eq!(a, &e, epsilon = 1e-12);
        }
    }

    #[test]
    fn vector_length_formulas() {
        assert_eq!(MomentKind::Odm.vector_len(4, 2), 5);
        assert_eq!(MomentKind::Cdm.vector_len(4, 2), 10);
        assert_eq!(MomentKind::Cdm.vector_len(3, 2), 7);
        let t = odm(&cloud_t(), 2, tol()).unwrap();
        assert_eq!(t.coords.len(), MomentKind::Odm.vector_len(4, 2));
        let c = cdm(&cloud_t(), 2, Anchor::Centroid, tol()).unwrap();
        assert_eq!(c.coords.len(), MomentKind::Cdm.vector_len(4, 2));
    }
}
