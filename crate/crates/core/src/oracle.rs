//! Ground-truth isometry testing and reconstruction for small clouds.
//!
//! The brute-force test searches point bijections (pruned by sorted
//! per-point distance profiles), solves the optimal orthogonal alignment
//! for each candidate and accepts when the worst residual is within
//! tolerance. It is the reference the invariant metrics are validated
//! against, so it must stay independent of them.

use crate::error::{Error, Result};
use crate::geometry::{
    affine_dimension, distance, orientation_sign, DistanceMatrix, Isometry, PointCloud, Tolerance,
};
use crate::invariants::RelativeDist;
use crate::metrics::Mode;
use nalgebra::DMatrix;

/// Size cap for the factorial bijection search.
const MAX_BRUTE_FORCE_POINTS: usize = 8;

/// Outcome of a brute-force alignment.
#[derive(Clone, Debug)]
pub struct AlignmentResult {
    pub matched: bool,
    /// Root-mean-square residual of the best alignment found.
    pub rms: f64,
    /// Worst single-point residual of the best alignment found.
    pub max_residual: f64,
    /// `permutation[i]` is the target index point `i` maps to.
    pub permutation: Vec<usize>,
    pub transform: Isometry,
}

/// Exhaustively decides whether two clouds are related by a rigid motion
/// or isometry, up to a residual tolerance `tol` per point.
pub fn brute_force_isometric(
    a: &PointCloud,
    b: &PointCloud,
    mode: Mode,
    tol: f64,
) -> Result<AlignmentResult> {
    if a.dim() != b.dim() || a.len() != b.len() {
        return Err(Error::Incomparable(format!(
            "clouds with (m, n) = ({}, {}) vs ({}, {})",
            a.len(),
            a.dim(),
            b.len(),
            b.dim()
        )));
    }
    let m = a.len();
    if m > MAX_BRUTE_FORCE_POINTS {
        return Err(Error::TooLarge(format!(
            "brute-force isometry search is capped at {MAX_BRUTE_FORCE_POINTS} points, got {m}"
        )));
    }
    let da = DistanceMatrix::from_points(&a.points().collect::<Vec<_>>())?;
    let db = DistanceMatrix::from_points(&b.points().collect::<Vec<_>>())?;
    let slack = 2.0 * tol + 1e-9;

    // sorted distance profiles prune the candidate images of each point
    let profile = |d: &DistanceMatrix, i: usize| -> Vec<f64> {
        let mut p: Vec<f64> = (0..m).filter(|&j| j != i).map(|j| d.get(i, j)).collect();
        p.sort_by(f64::total_cmp);
        p
    };
    let pa: Vec<Vec<f64>> = (0..m).map(|i| profile(&da, i)).collect();
    let pb: Vec<Vec<f64>> = (0..m).map(|i| profile(&db, i)).collect();
    let candidates: Vec<Vec<usize>> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| {
                    pa[i]
                        .iter()
                        .zip(&pb[j])
                        .all(|(x, y)| (x - y).abs() <= slack)
                })
                .collect()
        })
        .collect();

    let mut search = Search {
        a,
        b,
        da: &da,
        db: &db,
        mode,
        tol,
        slack,
        candidates: &candidates,
        used: vec![false; m],
        perm: Vec::with_capacity(m),
        best: None,
    };
    search.run(0);
    let best = search.best.unwrap_or_else(|| AlignmentResult {
        matched: false,
        rms: f64::INFINITY,
        max_residual: f64::INFINITY,
        permutation: (0..m).collect(),
        transform: Isometry::identity(a.dim()),
    });
    Ok(best)
}

struct Search<'a> {
    a: &'a PointCloud,
    b: &'a PointCloud,
    da: &'a DistanceMatrix,
    db: &'a DistanceMatrix,
    mode: Mode,
    tol: f64,
    slack: f64,
    candidates: &'a [Vec<usize>],
    used: Vec<bool>,
    perm: Vec<usize>,
    best: Option<AlignmentResult>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) {
        if self.best.as_ref().is_some_and(|r| r.matched) {
            return;
        }
        let m = self.a.len();
        if depth == m {
            let result = align(self.a, self.b, &self.perm, self.mode, self.tol);
            let better = match &self.best {
                None => true,
                Some(cur) => result.max_residual < cur.max_residual,
            };
            if better {
                self.best = Some(result);
            }
            return;
        }
        for idx in 0..self.candidates[depth].len() {
            let j = self.candidates[depth][idx];
            if self.used[j] {
                continue;
            }
            let consistent = (0..depth).all(|k| {
                (self.da.get(depth, k) - self.db.get(j, self.perm[k])).abs() <= self.slack
            });
            if !consistent {
                continue;
            }
            self.used[j] = true;
            self.perm.push(j);
            self.run(depth + 1);
            self.perm.pop();
            self.used[j] = false;
        }
    }
}

/// Optimal orthogonal alignment for a fixed correspondence: SVD-based
/// least-squares Procrustes, with determinant correction in rigid mode.
fn align(a: &PointCloud, b: &PointCloud, perm: &[usize], mode: Mode, tol: f64) -> AlignmentResult {
    let n = a.dim();
    let m = a.len();
    let mf = m as f64;
    let mut ca = vec![0.0; n];
    let mut cb = vec![0.0; n];
    for i in 0..m {
        for (k, (x, y)) in a.point(i).iter().zip(b.point(perm[i])).enumerate() {
            ca[k] += x / mf;
            cb[k] += y / mf;
        }
    }
    // covariance H = sum (a_i - ca)(b_(perm i) - cb)^T
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..m {
        let p = a.point(i);
        let q = b.point(perm[i]);
        for r in 0..n {
            for c in 0..n {
                h[(r, c)] += (p[r] - ca[r]) * (q[c] - cb[c]);
            }
        }
    }
    let svd = h.svd(true, true);
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    // maximizing tr(R H): R = V U^T, det-corrected for rigid mode
    let mut rotation = v_t.transpose() * u.transpose();
    if mode == Mode::Rigid && rotation.determinant() < 0.0 {
        let mut d = DMatrix::<f64>::identity(n, n);
        d[(n - 1, n - 1)] = -1.0;
        rotation = v_t.transpose() * d * u.transpose();
    }
    let linear: Vec<f64> = (0..n * n).map(|i| rotation[(i / n, i % n)]).collect();
    let mut translation = cb.clone();
    for r in 0..n {
        for c in 0..n {
            translation[r] -= rotation[(r, c)] * ca[c];
        }
    }
    let transform = Isometry::new(n, linear, translation).expect("consistent dimensions");
    let mut max_residual = 0.0f64;
    let mut sq_sum = 0.0;
    for i in 0..m {
        let moved = transform.apply_point(a.point(i));
        let r = distance(&moved, b.point(perm[i])).expect("same dimension");
        max_residual = max_residual.max(r);
        sq_sum += r * r;
    }
    AlignmentResult {
        matched: max_residual <= tol,
        rms: (sq_sum / mf).sqrt(),
        max_residual,
        permutation: perm.to_vec(),
        transform,
    }
}

/// Rebuilds an ordered tuple from its distance matrix, placing the first
/// point at the origin and opening one coordinate axis per independent
/// direction.
pub fn reconstruct_from_distances(
    d: &DistanceMatrix,
    n: usize,
    tol: Tolerance,
) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let h = d.h();
    let scale = d.upper().iter().fold(0.0f64, |acc, x| acc.max(*x));
    let span_thresh = tol.eps_zero.max(1e-12) * scale * scale;
    let check_tol = 1e-6 * scale.max(1.0);

    let mut points: Vec<Vec<f64>> = vec![vec![0.0; n]];
    let mut axis_openers: Vec<usize> = Vec::new(); // point that introduced axis r
    for k in 1..h {
        let d0 = d.get(0, k);
        let mut x = vec![0.0; n];
        for (r, &b_idx) in axis_openers.iter().enumerate() {
            let b = &points[b_idx];
            let dbk = d.get(b_idx, k);
            let b_norm_sq: f64 = b.iter().map(|c| c * c).sum();
            let rhs = (d0 * d0 + b_norm_sq - dbk * dbk) / 2.0;
            let partial: f64 = (0..r).map(|j| b[j] * x[j]).sum();
            x[r] = (rhs - partial) / b[r];
        }
        let placed_sq: f64 = x.iter().map(|c| c * c).sum();
        let residual_sq = d0 * d0 - placed_sq;
        if residual_sq > span_thresh {
            let rank = axis_openers.len();
            if rank >= n {
                return Err(Error::NonEmbeddable(format!(
                    "distances need more than {n} dimensions"
                )));
            }
            x[rank] = residual_sq.sqrt();
            axis_openers.push(k);
        } else if residual_sq < -span_thresh {
            return Err(Error::NonEmbeddable(
                "negative squared residual; distances violate the triangle inequality".into(),
            ));
        }
        // the linear solve used only axis openers; confirm the rest
        for (j, p) in points.iter().enumerate() {
            let have = distance(p, &x)?;
            if (have - d.get(j, k)).abs() > check_tol {
                return Err(Error::NonEmbeddable(format!(
                    "distance ({j}, {k}) irreproducible: {have} vs {}",
                    d.get(j, k)
                )));
            }
        }
        points.push(x);
    }
    PointCloud::new(n, &points)
}

/// Rebuilds a cloud from one ORD with a basis of affine dimension `n - 1`:
/// the basis is placed by [`reconstruct_from_distances`], every remaining
/// point is located from its column distances and disambiguated by the
/// stored orientation sign.
pub fn reconstruct_from_ord(ord: &RelativeDist, n: usize, tol: Tolerance) -> Result<PointCloud> {
    if ord.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "ORD with basis size {} cannot live in R^{n}",
            ord.n()
        )));
    }
    let basis_cloud = reconstruct_from_distances(ord.basis(), n, tol)?;
    if affine_dimension(&basis_cloud, tol) != n.saturating_sub(1) {
        return Err(Error::Ambiguous(format!(
            "basis of affine dimension {} cannot pin points in R^{n}",
            affine_dimension(&basis_cloud, tol)
        )));
    }
    let basis_pts: Vec<Vec<f64>> = basis_cloud.points().map(|p| p.to_vec()).collect();
    let scale = ord
        .basis()
        .upper()
        .iter()
        .chain(ord.columns().iter().flat_map(|c| c.dists.iter()))
        .fold(0.0f64, |acc, x| acc.max(*x));
    let span_thresh = tol.eps_zero.max(1e-12) * scale * scale;
    let check_tol = 1e-6 * scale.max(1.0);

    let mut points = basis_pts.clone();
    for col in ord.columns() {
        // basis spans axes 0..n-1; the first basis point is the origin
        let d0 = col.dists[0];
        let mut q = vec![0.0; n];
        // the reconstruction introduced one axis per basis point after the
        // first; recover that order to run the same forward substitution
        let mut axis_openers: Vec<usize> = Vec::new();
        for (i, b) in basis_pts.iter().enumerate().skip(1) {
            let r = axis_openers.len();
            if b[r] != 0.0 {
                axis_openers.push(i);
            }
        }
        for (r, &b_idx) in axis_openers.iter().enumerate() {
            let b = &basis_pts[b_idx];
            let dbq = col.dists[b_idx];
            let b_norm_sq: f64 = b.iter().map(|c| c * c).sum();
            let rhs = (d0 * d0 + b_norm_sq - dbq * dbq) / 2.0;
            let partial: f64 = (0..r).map(|j| b[j] * q[j]).sum();
            q[r] = (rhs - partial) / b[r];
        }
        let placed_sq: f64 = q.iter().map(|c| c * c).sum();
        let residual_sq = d0 * d0 - placed_sq;
        if residual_sq < -span_thresh {
            return Err(Error::NonEmbeddable(
                "column distances are not realizable over this basis".into(),
            ));
        }
        let height = residual_sq.max(0.0).sqrt();
        if col.sign == 0 {
            // both sphere-intersection options coincide on the basis span
            q[n - 1] = 0.0;
        } else {
            q[n - 1] = height;
            let diffs: Vec<Vec<f64>> = basis_pts
                .iter()
                .map(|b| q.iter().zip(b).map(|(a, x)| a - x).collect())
                .collect();
            if orientation_sign(&diffs, tol)? != col.sign {
                q[n - 1] = -height;
            }
        }
        for (i, b) in basis_pts.iter().enumerate() {
            let have = distance(b, &q)?;
            if (have - col.dists[i]).abs() > check_tol {
                return Err(Error::NonEmbeddable(format!(
                    "column distance {i} irreproducible: {have} vs {}",
                    col.dists[i]
                )));
            }
        }
        points.push(q);
    }
    PointCloud::new(n, &points)
}
