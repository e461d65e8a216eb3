//! Point-cloud primitives: distances, centring, orientation signs, affine
//! dimension and isometry generation.
//!
//! A cloud is a finite unordered set of `m` points in `R^n`. Everything in
//! this module is a pure function of its inputs; values are immutable after
//! construction and safe to share across threads.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Numeric tolerance used to classify determinants and ranks as zero.
///
/// The classification is relative: a determinant counts as zero when
/// `|det| <= eps_zero * prod(column norms)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub eps_zero: f64,
}

impl Tolerance {
    pub fn new(eps_zero: f64) -> Result<Self> {
        if !eps_zero.is_finite() || eps_zero < 0.0 {
            return Err(Error::InvalidInput(format!(
                "eps_zero must be a non-negative finite real, got {eps_zero}"
            )));
        }
        Ok(Self { eps_zero })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eps_zero: 1e-9 }
    }
}

/// `m` unlabelled points in `R^n`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    data: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from one coordinate vector per point.
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput(
                "a cloud must contain at least one point".into(),
            ));
        }
        let mut data = Vec::with_capacity(dim * points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
            data.extend_from_slice(p);
        }
        Ok(Self { dim, data })
    }

    /// Builds a cloud from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if data.is_empty() || data.len() % dim != 0 {
            return Err(Error::DimensionMismatch(format!(
                "flat buffer of length {} is not a positive multiple of dim {dim}",
                data.len()
            )));
        }
        if data.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points `m`.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: m >= 1
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Translates every point by `-shift`.
    pub fn translated_by_neg(&self, shift: &[f64]) -> PointCloud {
        let mut data = self.data.clone();
        for p in data.chunks_exact_mut(self.dim) {
            for (c, s) in p.iter_mut().zip(shift) {
                *c -= s;
            }
        }
        PointCloud {
            dim: self.dim,
            data,
        }
    }

    /// Mirror image: first coordinate negated.
    pub fn reflected(&self) -> PointCloud {
        let mut data = self.data.clone();
        for p in data.chunks_exact_mut(self.dim) {
            p[0] = -p[0];
        }
        PointCloud {
            dim: self.dim,
            data,
        }
    }
}

/// Strict upper-triangular matrix of pairwise distances of an ordered tuple.
///
/// Only entries `i < j` are stored; the accessor treats the matrix as
/// symmetric with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    h: usize,
    upper: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from explicit upper-triangle entries in row-major order
    /// (`d_01, d_02, .., d_0(h-1), d_12, ..`).
    pub fn new(h: usize, upper: Vec<f64>) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidInput("empty tuple".into()));
        }
        if upper.len() != h * (h - 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} upper-triangle entries for h={h}, got {}",
                h * (h - 1) / 2,
                upper.len()
            )));
        }
        if upper.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidInput(
                "distances must be non-negative finite reals".into(),
            ));
        }
        Ok(Self { h, upper })
    }

    ///: entry `(i, j)`, `i < j`, is `|p_i - p_j|`.
    pub fn from_points(points: &[&[f64]]) -> Result<Self> {
        let h = points.len();
        if h == 0 {
            return Err(Error::InvalidInput("empty tuple".into()));
        }
        let mut upper = Vec::with_capacity(h * (h - 1) / 2);
        for i in 0..h {
            for j in i + 1..h {
                upper.push(distance(points[i], points[j])?);
            }
        }
        Ok(Self { h, upper })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Symmetric accessor with zero diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        // row a starts after a*(h-1) - a*(a-1)/2 entries
        let row_start = a * (self.h - 1) - a * (a - 1) / 2;
        self.upper[row_start + (b - a - 1)]
    }

    /// Relabels the tuple: entry `(i, j)` of the result is `d(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> DistanceMatrix {
        debug_assert_eq!(perm.len(), self.h);
        let mut upper = Vec::with_capacity(self.upper.len());
        for i in 0..self.h {
            for j in i + 1..self.h {
                upper.push(self.get(perm[i], perm[j]));
            }
        }
        DistanceMatrix { h: self.h, upper }
    }
}

/// Coordinate-wise mean of the points.
pub fn centre_of_mass(cloud: &PointCloud) -> Vec<f64> {
    let m = cloud.len() as f64;
    let mut centre = vec![0.0; cloud.dim()];
    for p in cloud.points() {
        for (c, x) in centre.iter_mut().zip(p) {
            *c += x;
        }
    }
    for c in centre.iter_mut() {
        *c /= m;
    }
    centre
}

/// Translates the centre of mass to the origin.
pub fn centre_cloud(cloud: &PointCloud) -> PointCloud {
    let centre = centre_of_mass(cloud);
    cloud.translated_by_neg(&centre)
}

/// Euclidean distance between two coordinate vectors.
pub fn distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "points of dimension {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Determinant by Gaussian elimination with partial pivoting.
///
/// `a` is an `n x n` matrix in row-major order and is consumed.
pub(crate) fn det_in_place(n: usize, a: &mut [f64]) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = 1.0;
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].abs();
        for r in k + 1..n {
            let v = a[r * n + k].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for r in k + 1..n {
            let factor = a[r * n + k] / pivot;
            a[r * n + k] = 0.0;
            for c in k + 1..n {
                a[r * n + c] -= factor * a[k * n + c];
            }
        }
    }
    det
}

/// Sign of the determinant of the matrix whose columns are `diffs`.
///
/// Returns 0 when `|det| <= eps_zero * prod(column norms)`, so the
/// classification is invariant under rescaling the input.
pub fn orientation_sign(diffs: &[Vec<f64>], tol: Tolerance) -> Result<i8> {
    let n = diffs.len();
    if n == 0 {
        return Err(Error::InvalidInput("no difference vectors given".into()));
    }
    let mut norm_prod = 1.0;
    let mut a = vec![0.0; n * n];
    for (j, v) in diffs.iter().enumerate() {
        if v.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} vectors of dimension {n}, vector {j} has dimension {}",
                v.len()
            )));
        }
        norm_prod *= v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (i, x) in v.iter().enumerate() {
            a[i * n + j] = *x;
        }
    }
    let det = det_in_place(n, &mut a);
    if det.abs() <= tol.eps_zero * norm_prod {
        Ok(0)
    } else if det > 0.0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// Numerical rank of `{p_i - p_1}` under the relative tolerance.
///
/// Column-pivoted elimination so that "rank deficient" agrees with the
/// zero-determinant convention of [`orientation_sign`].
pub fn affine_dimension(cloud: &PointCloud, tol: Tolerance) -> usize {
    let n = cloud.dim();
    let m = cloud.len();
    if m < 2 {
        return 0;
    }
    let base = cloud.point(0);
    let mut cols: Vec<Vec<f64>> = (1..m)
        .map(|i| {
            cloud
                .point(i)
                .iter()
                .zip(base)
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = cols.iter().map(|c| norm(c)).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    while rank < n && !cols.is_empty() {
        let (best_idx, best_norm) = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (i, norm(c)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if best_norm <= tol.eps_zero * scale {
            break;
        }
        let pivot = cols.swap_remove(best_idx);
        let pivot_sq = pivot.iter().map(|x| x * x).sum::<f64>();
        for c in cols.iter_mut() {
            let proj = c.iter().zip(&pivot).map(|(a, b)| a * b).sum::<f64>() / pivot_sq;
            for (x, p) in c.iter_mut().zip(&pivot) {
                *x -= proj * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Whether the linear part preserves or reverses orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrientationKind {
    Preserve,
    Reverse,
}

/// An orthogonal map plus a translation: `p -> Q p + t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    dim: usize,
    /// Row-major `n x n` orthogonal matrix.
    linear: Vec<f64>,
    translation: Vec<f64>,
}

impl Isometry {
    pub fn new(dim: usize, linear: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        if linear.len() != dim * dim || translation.len() != dim {
            return Err(Error::DimensionMismatch(
                "isometry parts do not match the dimension".into(),
            ));
        }
        Ok(Self {
            dim,
            linear,
            translation,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut linear = vec![0.0; dim * dim];
        for i in 0..dim {
            linear[i * dim + i] = 1.0;
        }
        Self {
            dim,
            linear,
            translation: vec![0.0; dim],
        }
    }

    /// Reflection in the hyperplane of the first coordinate.
    pub fn reflection(dim: usize) -> Self {
        let mut iso = Self::identity(dim);
        iso.linear[0] = -1.0;
        iso
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn apply_point(&self, p: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = self.translation.clone();
        for i in 0..n {
            let row = &self.linear[i * n..(i + 1) * n];
            out[i] += row.iter().zip(p).map(|(a, b)| a * b).sum::<f64>();
        }
        out
    }

    pub fn det(&self) -> f64 {
        let mut a = self.linear.clone();
        det_in_place(self.dim, &mut a)
    }
}

/// Draws a uniform-ish random orthogonal map with the requested orientation
/// plus a random translation. Deterministic in the seed.
pub fn random_isometry(dim: usize, orientation: OrientationKind, seed: u64) -> Isometry {
    assert!(dim >= 1, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = move || {
        // Box-Muller
        let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.random_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    // Gaussian matrix, columns orthonormalized by modified Gram-Schmidt with
    // one re-orthogonalization pass.
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| normal()).collect();
        for _ in 0..2 {
            for c in &cols {
                let proj: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue; // essentially dependent draw, resample
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        cols.push(v);
    }
    let mut linear = vec![0.0; dim * dim];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..dim {
            linear[i * dim + j] = c[i];
        }
    }
    let mut det = {
        let mut a = linear.clone();
        det_in_place(dim, &mut a)
    };
    let want_positive = orientation == OrientationKind::Preserve;
    if (det > 0.0) != want_positive {
        for i in 0..dim {
            linear[i * dim] = -linear[i * dim];
        }
        det = -det;
    }
    debug_assert!((det.abs() - 1.0).abs() < 1e-9);
    let translation = (0..dim).map(|_| 2.0 * normal()).collect();
    Isometry {
        dim,
        linear,
        translation,
    }
}

/// Applies `p -> Q p + t` to every point.
pub fn apply_isometry(cloud: &PointCloud, iso: &Isometry) -> Result<PointCloud> {
    if cloud.dim() != iso.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cloud dimension {} vs isometry dimension {}",
            cloud.dim(),
            iso.dim()
        )));
    }
    let points: Vec<Vec<f64>> = cloud.points().map(|p| iso.apply_point(p)).collect();
    PointCloud::new(cloud.dim(), &points)
}
