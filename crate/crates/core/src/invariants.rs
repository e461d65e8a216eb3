//! Oriented relative and centred distributions of a point cloud.
//!
//! For an ordered basis tuple `A` of a cloud `C`, the pair `[D(A); M(C;A)]`
//! collects the pairwise basis distances and, per remaining point `q`, the
//! distances from `q` to the basis together with the sign of
//! `det(q-p_1, .., q-p_n)`. The invariant is the equivalence class of that
//! pair under basis permutations; we store the representative that
//! minimizes the serialized pair lexicographically. Collections over all
//! bases (`OSD` over n-subsets, `SCD` over (n-1)-subsets plus an anchor at
//! the origin) collapse repeated classes into exact rational weights.
//!
//! Each column also carries the normalized signed strength
//! `sign * sigma(A u {q}) / c_n`, the continuous stand-in for the bare sign
//! that the metrics consume.

use crate::error::{Error, Result};
use crate::geometry::{
    centre_cloud, distance, orientation_sign, DistanceMatrix, PointCloud, Tolerance,
};
use crate::strength::{lipschitz_constant, strength, SimplexDistances};
use itertools::Itertools;
use rayon::prelude::*;
use std::cmp::Ordering;

/// Component-wise tolerance for collapsing equal invariants into weights.
pub const COLLAPSE_TOL: f64 = 1e-9;

/// One column of the relative matrix: distances from a point `q` to the
/// basis tuple, the orientation sign, and the normalized signed strength.
#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub dists: Vec<f64>,
    pub sign: i8,
    pub norm_strength: f64,
}

fn column_cmp(a: &Column, b: &Column) -> Ordering {
    for (x, y) in a.dists.iter().zip(&b.dists) {
        match x.total_cmp(y) {
            Ordering::Equal => {}
            ord => return ord,
        }
    }
    a.sign.cmp(&b.sign)
}

/// Shared representation of ORD and OCD pairs.
///
/// `free` is the permutable prefix of the basis: all `h` points for an ORD,
/// the first `h - 1` for an OCD whose last basis slot is the pinned origin.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct OrientedPair {
    pub basis: DistanceMatrix,
    pub cols: Vec<Column>,
    pub free: usize,
}

fn perm_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

impl OrientedPair {
    pub(crate) fn h(&self) -> usize {
        self.basis.h()
    }

    /// Relabels basis slots by `perm` (new slot `i` holds old point
    /// `perm[i]`), flips signs by the permutation parity and re-sorts the
    /// columns.
    pub(crate) fn relabelled(&self, perm: &[usize]) -> OrientedPair {
        let sgn = perm_sign(perm);
        let basis = self.basis.permuted(perm);
        let mut cols: Vec<Column> = self
            .cols
            .iter()
            .map(|c| Column {
                dists: perm.iter().map(|&i| c.dists[i]).collect(),
                sign: c.sign * sgn,
                norm_strength: c.norm_strength * f64::from(sgn),
            })
            .collect();
        cols.sort_by(column_cmp);
        OrientedPair {
            basis,
            cols,
            free: self.free,
        }
    }

    pub(crate) fn cmp_serialized(&self, other: &OrientedPair) -> Ordering {
        for (x, y) in self.basis.upper().iter().zip(other.basis.upper()) {
            match x.total_cmp(y) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        for (a, b) in self.cols.iter().zip(&other.cols) {
            match column_cmp(a, b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// Lexicographically minimal relabelling over all permutations of the
    /// free basis prefix.
    fn canonicalized(&self) -> OrientedPair {
        let h = self.h();
        let mut sorted = self.clone();
        sorted.cols.sort_by(column_cmp);
        if self.free < 2 {
            return sorted;
        }
        let mut best = None::<OrientedPair>;
        for prefix in (0..self.free).permutations(self.free) {
            let mut perm = prefix;
            perm.extend(self.free..h);
            let candidate = self.relabelled(&perm);
            match &best {
                None => best = Some(candidate),
                Some(b) => {
                    if candidate.cmp_serialized(b) == Ordering::Less {
                        best = Some(candidate);
                    }
                }
            }
        }
        best.unwrap_or(sorted)
    }

    fn mirrored(&self) -> OrientedPair {
        let flipped = OrientedPair {
            basis: self.basis.clone(),
            cols: self
                .cols
                .iter()
                .map(|c| Column {
                    dists: c.dists.clone(),
                    sign: -c.sign,
                    norm_strength: -c.norm_strength,
                })
                .collect(),
            free: self.free,
        };
        flipped.canonicalized()
    }

    pub(crate) fn same_shape(&self, other: &OrientedPair) -> bool {
        self.h() == other.h() && self.free == other.free && self.cols.len() == other.cols.len()
    }

    fn approx_eq(&self, other: &OrientedPair, tol: f64) -> bool {
        if !self.same_shape(other) {
            return false;
        }
        let basis_close = self
            .basis
            .upper()
            .iter()
            .zip(other.basis.upper())
            .all(|(x, y)| (x - y).abs() <= tol);
        basis_close
            && self.cols.iter().zip(&other.cols).all(|(a, b)| {
                a.sign == b.sign && a.dists.iter().zip(&b.dists).all(|(x, y)| (x - y).abs() <= tol)
            })
    }
}

/// Canonical Oriented Relative Distribution `[D(A); M(C;A)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeDist(pub(crate) OrientedPair);

/// Canonical Oriented Centred Distribution `[D(A u {0}); M(C; A u {0})]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CentredDist(pub(crate) OrientedPair);

/// Behaviour shared by the two invariant kinds.
pub trait Invariant: Clone + Send + Sync {
    /// Mirror image: all signs and strengths negated, then re-canonicalized.
    fn mirrored(&self) -> Self;
    /// Total order on canonical serializations.
    fn canonical_cmp(&self, other: &Self) -> Ordering;
    /// Component-wise closeness with exact sign agreement.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
    fn same_shape(&self, other: &Self) -> bool;
}

macro_rules! invariant_impl {
    ($ty:ident) => {
        impl Invariant for $ty {
            fn mirrored(&self) -> Self {
                $ty(self.0.mirrored())
            }
            fn canonical_cmp(&self, other: &Self) -> Ordering {
                self.0.cmp_serialized(&other.0)
            }
            fn approx_eq(&self, other: &Self, tol: f64) -> bool {
                self.0.approx_eq(&other.0, tol)
            }
            fn same_shape(&self, other: &Self) -> bool {
                self.0.same_shape(&other.0)
            }
        }

        impl $ty {
            /// Pairwise distances of the basis tuple.
            pub fn basis(&self) -> &DistanceMatrix {
                &self.0.basis
            }
            /// Lexicographically sorted relative columns.
            pub fn columns(&self) -> &[Column] {
                &self.0.cols
            }
            /// Ambient dimension `n`.
            pub fn n(&self) -> usize {
                self.0.h()
            }
            /// Re-canonicalizes; the identity on values built by this module.
            pub fn canonicalized(&self) -> Self {
                $ty(self.0.canonicalized())
            }
        }
    };
}

invariant_impl!(RelativeDist);
invariant_impl!(CentredDist);

impl RelativeDist {
    /// Number of points of the originating cloud.
    pub fn m(&self) -> usize {
        self.n() + self.columns().len()
    }

    /// Rebuilds from raw parts (used by deserialization); canonicalizes.
    pub fn from_parts(basis: DistanceMatrix, cols: Vec<Column>) -> Result<Self> {
        let pair = pair_from_parts(basis, cols, None)?;
        Ok(RelativeDist(pair.canonicalized()))
    }
}

impl CentredDist {
    /// Number of points of the originating cloud.
    pub fn m(&self) -> usize {
        self.n() - 1 + self.columns().len()
    }

    /// Rebuilds from raw parts (used by deserialization); canonicalizes.
    pub fn from_parts(basis: DistanceMatrix, cols: Vec<Column>) -> Result<Self> {
        let free = basis.h() - 1;
        let pair = pair_from_parts(basis, cols, Some(free))?;
        Ok(CentredDist(pair.canonicalized()))
    }
}

fn pair_from_parts(
    basis: DistanceMatrix,
    cols: Vec<Column>,
    free: Option<usize>,
) -> Result<OrientedPair> {
    let h = basis.h();
    if cols.is_empty() {
        return Err(Error::InvalidInput("no relative columns".into()));
    }
    for c in &cols {
        if c.dists.len() != h {
            return Err(Error::DimensionMismatch(format!(
                "column with {} distances for basis of {} points",
                c.dists.len(),
                h
            )));
        }
        if !(-1..=1).contains(&c.sign) {
            return Err(Error::InvalidInput(format!("sign {} not in -1..=1", c.sign)));
        }
    }
    Ok(OrientedPair {
        basis,
        cols,
        free: free.unwrap_or(h),
    })
}

/// Weighted multiset of invariants; weights are exact rationals
/// `count / total` and sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedDist<T> {
    entries: Vec<(T, u64)>,
    total: u64,
}

impl<T: Invariant> WeightedDist<T> {
    /// Collapses a list of canonical invariants into weighted entries.
    pub fn from_items(items: Vec<T>) -> Self {
        let total = items.len() as u64;
        let mut items = items;
        items.sort_by(|a, b| a.canonical_cmp(b));
        let mut entries: Vec<(T, u64)> = Vec::new();
        for item in items {
            match entries.last_mut() {
                Some((rep, count)) if rep.approx_eq(&item, COLLAPSE_TOL) => *count += 1,
                _ => entries.push((item, 1)),
            }
        }
        WeightedDist { entries, total }
    }

    /// Rebuilds from already-collapsed parts (used by deserialization).
    pub fn from_weighted_parts(entries: Vec<(T, u64)>, total: u64) -> Result<Self> {
        if entries.is_empty() || total == 0 {
            return Err(Error::InvalidInput("empty distribution".into()));
        }
        let sum: u64 = entries.iter().map(|(_, c)| *c).sum();
        if sum != total {
            return Err(Error::InvalidInput(format!(
                "entry counts sum to {sum}, expected {total}"
            )));
        }
        let mut entries = entries;
        entries.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        Ok(WeightedDist { entries, total })
    }

    pub fn entries(&self) -> &[(T, u64)] {
        &self.entries
    }

    /// Number of distinct collapsed entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Denominator shared by all weights.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Exact weight of entry `i` as `(count, total)`.
    pub fn weight(&self, i: usize) -> (u64, u64) {
        (self.entries[i].1, self.total)
    }

    /// Uncollapsed view: each entry repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<&T> {
        let mut out = Vec::with_capacity(self.total as usize);
        for (e, c) in &self.entries {
            for _ in 0..*c {
                out.push(e);
            }
        }
        out
    }

    pub fn mirrored(&self) -> Self {
        let mut entries: Vec<(T, u64)> = self
            .entries
            .iter()
            .map(|(e, c)| (e.mirrored(), *c))
            .collect();
        entries.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        WeightedDist {
            entries,
            total: self.total,
        }
    }
}

/// Mirror image of a distribution: every sign reversed.
pub fn mirror<T: Invariant>(dist: &WeightedDist<T>) -> WeightedDist<T> {
    dist.mirrored()
}

/// Strict upper-triangular distance matrix of an ordered point tuple.
pub fn build_distance_matrix(points: &[&[f64]]) -> Result<DistanceMatrix> {
    DistanceMatrix::from_points(points)
}

/// Where the SCD anchors its origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    /// Translate the centre of mass to the origin.
    Centroid,
    /// Translate the given cloud point to the origin; the point stays
    /// available for basis subsets.
    Point(usize),
    /// Translate the given cloud point to the origin and keep it out of
    /// basis subsets (it still appears as a relative column).
    PointExcluded(usize),
}

fn simplex_with_apex(basis: &DistanceMatrix, apex_dists: &[f64]) -> Result<SimplexDistances> {
    let h = basis.h();
    let mut upper = Vec::with_capacity((h + 1) * h / 2);
    for i in 0..h {
        for j in i + 1..h {
            upper.push(basis.get(i, j));
        }
        upper.push(apex_dists[i]);
    }
    SimplexDistances::new(h + 1, upper)
}

fn build_pair(
    basis_pts: &[Vec<f64>],
    qs: &[&[f64]],
    free: usize,
    tol: Tolerance,
    c_n: f64,
) -> Result<OrientedPair> {
    let n = basis_pts.len();
    let basis_refs: Vec<&[f64]> = basis_pts.iter().map(|p| p.as_slice()).collect();
    let basis = DistanceMatrix::from_points(&basis_refs)?;
    let mut cols = Vec::with_capacity(qs.len());
    for q in qs {
        let mut dists = Vec::with_capacity(n);
        let mut diffs = Vec::with_capacity(n);
        for b in basis_pts {
            dists.push(distance(q, b)?);
            diffs.push(q.iter().zip(b).map(|(a, x)| a - x).collect::<Vec<f64>>());
        }
        let sign = orientation_sign(&diffs, tol)?;
        let norm_strength = if sign == 0 {
            0.0
        } else {
            let simplex = simplex_with_apex(&basis, &dists)?;
            f64::from(sign) * strength(&simplex, n)? / c_n
        };
        cols.push(Column {
            dists,
            sign,
            norm_strength,
        });
    }
    cols.sort_by(column_cmp);
    Ok(OrientedPair { basis, cols, free }.canonicalized())
}

fn check_basis_indices(m: usize, basis: &[usize]) -> Result<()> {
    for (k, &i) in basis.iter().enumerate() {
        if i >= m {
            return Err(Error::InvalidInput(format!(
                "basis point {i} is not part of the cloud (m = {m})"
            )));
        }
        if basis[..k].contains(&i) {
            return Err(Error::InvalidInput(format!("repeated basis point {i}")));
        }
    }
    Ok(())
}

/// Oriented relative distribution for one ordered `n`-point basis.
pub fn build_ord(cloud: &PointCloud, basis: &[usize], tol: Tolerance) -> Result<RelativeDist> {
    let n = cloud.dim();
    let m = cloud.len();
    if basis.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "ORD basis needs {n} points, got {}",
            basis.len()
        )));
    }
    if m <= n {
        return Err(Error::InvalidInput(format!(
            "ORD needs more points than the dimension (m = {m}, n = {n})"
        )));
    }
    check_basis_indices(m, basis)?;
    let basis_pts: Vec<Vec<f64>> = basis.iter().map(|&i| cloud.point(i).to_vec()).collect();
    let qs: Vec<&[f64]> = (0..m)
        .filter(|i| !basis.contains(i))
        .map(|i| cloud.point(i))
        .collect();
    let pair = build_pair(&basis_pts, &qs, n, tol, lipschitz_constant(n))?;
    Ok(RelativeDist(pair))
}

/// Oriented simplexwise distribution: one canonical ORD per `n`-subset,
/// collapsed with rational weights.
pub fn build_osd(cloud: &PointCloud, tol: Tolerance) -> Result<WeightedDist<RelativeDist>> {
    let n = cloud.dim();
    let m = cloud.len();
    if m <= n {
        return Err(Error::InvalidInput(format!(
            "OSD needs more points than the dimension (m = {m}, n = {n})"
        )));
    }
    let subsets: Vec<Vec<usize>> = (0..m).combinations(n).collect();
    let items: Vec<RelativeDist> = subsets
        .par_iter()
        .map(|basis| build_ord(cloud, basis, tol))
        .collect::<Result<_>>()?;
    Ok(WeightedDist::from_items(items))
}

/// Oriented centred distribution for one ordered `(n-1)`-point basis of an
/// anchored cloud; the origin joins the basis as its last point.
pub fn build_ocd(cloud: &PointCloud, basis: &[usize], tol: Tolerance) -> Result<CentredDist> {
    let n = cloud.dim();
    let m = cloud.len();
    if basis.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!(
            "OCD basis needs {} points, got {}",
            n - 1,
            basis.len()
        )));
    }
    if m < n {
        return Err(Error::InvalidInput(format!(
            "OCD needs at least as many points as the dimension (m = {m}, n = {n})"
        )));
    }
    check_basis_indices(m, basis)?;
    let mut basis_pts: Vec<Vec<f64>> = basis.iter().map(|&i| cloud.point(i).to_vec()).collect();
    basis_pts.push(vec![0.0; n]);
    let qs: Vec<&[f64]> = (0..m)
        .filter(|i| !basis.contains(i))
        .map(|i| cloud.point(i))
        .collect();
    let pair = build_pair(&basis_pts, &qs, n - 1, tol, lipschitz_constant(n))?;
    Ok(CentredDist(pair))
}

/// Anchors the cloud at the requested origin and lists the indices
/// eligible for basis subsets.
pub(crate) fn anchor_cloud(cloud: &PointCloud, anchor: Anchor) -> Result<(PointCloud, Vec<usize>)> {
    let m = cloud.len();
    let n = cloud.dim();
    match anchor {
        Anchor::Centroid => Ok((centre_cloud(cloud), (0..m).collect())),
        Anchor::Point(k) => {
            check_basis_indices(m, &[k])?;
            Ok((cloud.translated_by_neg(cloud.point(k)), (0..m).collect()))
        }
        Anchor::PointExcluded(k) => {
            check_basis_indices(m, &[k])?;
            if m == n {
                // excluding the anchor leaves too few basis candidates
                return Err(Error::InvalidInput(format!(
                    "cannot exclude the anchor from bases with m = n = {n}"
                )));
            }
            Ok((
                cloud.translated_by_neg(cloud.point(k)),
                (0..m).filter(|&i| i != k).collect(),
            ))
        }
    }
}

/// Simplexwise centred distribution over all `(n-1)`-subsets of the
/// anchored cloud.
pub fn build_scd(
    cloud: &PointCloud,
    anchor: Anchor,
    tol: Tolerance,
) -> Result<WeightedDist<CentredDist>> {
    let n = cloud.dim();
    let m = cloud.len();
    if m < n {
        return Err(Error::InvalidInput(format!(
            "SCD needs at least as many points as the dimension (m = {m}, n = {n})"
        )));
    }
    let (anchored, eligible) = anchor_cloud(cloud, anchor)?;
    let subsets: Vec<Vec<usize>> = eligible.into_iter().combinations(n - 1).collect();
    let items: Vec<CentredDist> = subsets
        .par_iter()
        .map(|basis| build_ocd(&anchored, basis, tol))
        .collect::<Result<_>>()?;
    Ok(WeightedDist::from_items(items))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn triangle_r() -> PointCloud {
        PointCloud::new(2, &[vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 3.0]]).unwrap()
    }

    fn square_s() -> PointCloud {
        PointCloud::new(
            2,
            &[
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
        )
        .unwrap()
    }

    fn c2() -> f64 {
        lipschitz_constant(2)
    }

    #[test]
    fn distance_matrix_examples() {
        let r = triangle_r();
        let d = build_distance_matrix(&[r.point(0), r.point(1)]).unwrap();
        assert_eq!(d.upper(), &[4.0]);
        let single = build_distance_matrix(&[r.point(0)]).unwrap();
        assert!(single.upper().is_empty());
        let with_origin = build_distance_matrix(&[r.point(1), &[0.0, 0.0]]).unwrap();
        assert_eq!(with_origin.upper(), &[4.0]);
    }

    #[test]
    fn build_ord_r_examples() {
        let r = triangle_r();
        // basis (p1, p2): [4; (3, 5, +)]
        let ord = build_ord(&r, &[0, 1], tol()).unwrap();
        assert_eq!(ord.basis().upper(), &[4.0]);
        assert_eq!(ord.columns().len(), 1);
        let col = &ord.columns()[0];
        assert_eq!(col.dists, vec![3.0, 5.0]);
        assert_eq!(col.sign, 1);
        assert_abs_diff_eq!(col.norm_strength, (1.0 / 6.0) / c2(), epsilon = 1e-12);

        // basis (p1, p3): canonical form of [3; (4, 5, -)]
        let ord = build_ord(&r, &[0, 2], tol()).unwrap();
        assert_eq!(ord.basis().upper(), &[3.0]);
        let col = &ord.columns()[0];
        assert_eq!(col.dists, vec![4.0, 5.0]);
        assert_eq!(col.sign, -1);

        // same class regardless of the basis order handed in
        let swapped = build_ord(&r, &[2, 0], tol()).unwrap();
        assert_eq!(ord, swapped);
    }

    #[test]
    fn build_ord_t_first_table_row() {
        // T, basis the sqrt(2)-edge ((1,1),(2,0)):
        // [sqrt2; (2, sqrt10, -), (sqrt10, 4, -)]
        let t = PointCloud::new(
            2,
            &[
                vec![1.0, 1.0],
                vec![-1.0, 1.0],
                vec![-2.0, 0.0],
                vec![2.0, 0.0],
            ],
        )
        .unwrap();
        let ord = build_ord(&t, &[0, 3], tol()).unwrap();
        assert_abs_diff_eq!(ord.basis().upper()[0], 2f64.sqrt(), epsilon = 1e-12);
        let cols = ord.columns();
        assert_eq!(cols.len(), 2);
        assert_abs_diff_eq!(cols[0].dists[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cols[0].dists[1], 10f64.sqrt(), epsilon = 1e-12);
        assert_eq!(cols[0].sign, -1);
        assert_abs_diff_eq!(cols[1].dists[0], 10f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(cols[1].dists[1], 4.0, epsilon = 1e-12);
        assert_eq!(cols[1].sign, -1);
    }

    #[test]
    fn build_ord_rejects_bad_bases() {
        let r = triangle_r();
        assert!(build_ord(&r, &[0, 0], tol()).is_err());
        assert!(build_ord(&r, &[0, 7], tol()).is_err());
        assert!(build_ord(&r, &[0], tol()).is_err());
    }

    #[test]
    fn build_osd_r_and_weights() {
        let r = triangle_r();
        let osd = build_osd(&r, tol()).unwrap();
        assert_eq!(osd.total(), 3);
        assert_eq!(osd.len(), 3);
        for i in 0..3 {
            assert_eq!(osd.weight(i), (1, 3));
        }
        // a permuted copy of the input yields the identical distribution
        let permuted =
            PointCloud::new(2, &[vec![0.0, 3.0], vec![0.0, 0.0], vec![4.0, 0.0]]).unwrap();
        let osd2 = build_osd(&permuted, tol()).unwrap();
        assert_eq!(osd, osd2);
    }

    #[test]
    fn build_ocd_examples() {
        // OCD(R; p2) = [4; (4,0,0), (5,3,-)]
        let r = triangle_r();
        let ocd = build_ocd(&r, &[1], tol()).unwrap();
        assert_eq!(ocd.basis().upper(), &[4.0]);
        let cols = ocd.columns();
        assert_eq!(cols[0].dists, vec![4.0, 0.0]);
        assert_eq!(cols[0].sign, 0);
        assert_eq!(cols[0].norm_strength, 0.0);
        assert_eq!(cols[1].dists, vec![5.0, 3.0]);
        assert_eq!(cols[1].sign, -1);
        assert_abs_diff_eq!(
            cols[1].norm_strength,
            -(1.0 / 6.0) / c2(),
            epsilon = 1e-12
        );

        // OCD(R; p1): anchor point itself in the basis -> [0; (3,3,0),(4,4,0)]
        let ocd = build_ocd(&r, &[0], tol()).unwrap();
        assert_eq!(ocd.basis().upper(), &[0.0]);
        assert_eq!(ocd.columns()[0].dists, vec![3.0, 3.0]);
        assert_eq!(ocd.columns()[1].dists, vec![4.0, 4.0]);
        assert_eq!(ocd.columns()[0].sign, 0);
        assert_eq!(ocd.columns()[1].sign, 0);

        // OCD(S; p1) = [1; (sqrt2,1,-), (sqrt2,1,+), (2,1,0)]
        let s = square_s();
        let ocd = build_ocd(&s, &[0], tol()).unwrap();
        assert_eq!(ocd.basis().upper(), &[1.0]);
        let cols = ocd.columns();
        assert_eq!(cols.len(), 3);
        assert_abs_diff_eq!(cols[0].dists[0], 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(cols[0].dists[1], 1.0);
        assert_eq!(cols[0].sign, -1);
        assert_eq!(cols[1].sign, 1);
        assert_eq!(cols[2].dists, vec![2.0, 1.0]);
        assert_eq!(cols[2].sign, 0);
    }

    #[test]
    fn build_scd_examples() {
        // square: rotational symmetry collapses everything to one OCD
        let s = square_s();
        let scd = build_scd(&s, Anchor::Centroid, tol()).unwrap();
        assert_eq!(scd.len(), 1);
        assert_eq!(scd.weight(0), (4, 4));

        // R anchored at p1: the three OCDs of weight 1/3
        let r = triangle_r();
        let scd = build_scd(&r, Anchor::Point(0), tol()).unwrap();
        assert_eq!(scd.len(), 3);
        assert_eq!(scd.total(), 3);

        // excluding the anchor point from bases drops one subset
        let scd = build_scd(&r, Anchor::PointExcluded(0), tol()).unwrap();
        assert_eq!(scd.total(), 2);
        // every OCD still has m - n + 1 = 2 columns
        for (e, _) in scd.entries() {
            assert_eq!(e.columns().len(), 2);
        }
    }

    #[test]
    fn mirror_examples() {
        let r = triangle_r();
        let scd = build_scd(&r, Anchor::Point(0), tol()).unwrap();
        // mirror is an involution
        assert_eq!(mirror(&mirror(&scd)), scd);

        // SCD of the reflected cloud equals the mirrored SCD
        let rbar =
            PointCloud::new(2, &[vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, -3.0]]).unwrap();
        let scd_bar = build_scd(&rbar, Anchor::Point(0), tol()).unwrap();
        assert_eq!(scd_bar, mirror(&scd));
        assert_ne!(scd_bar, scd);

        // all-zero-sign distribution is a fixed point
        let line = PointCloud::new(
            2,
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0], vec![4.0, 0.0]],
        )
        .unwrap();
        let osd = build_osd(&line, tol()).unwrap();
        assert_eq!(mirror(&osd), osd);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let r = triangle_r();
        let osd = build_osd(&r, tol()).unwrap();
        for (e, _) in osd.entries() {
            assert_eq!(&e.canonicalized(), e);
        }
        let scd = build_scd(&r, Anchor::Centroid, tol()).unwrap();
        for (e, _) in scd.entries() {
            assert_eq!(&e.canonicalized(), e);
        }
    }

    #[test]
    fn column_counts() {
        let s = square_s();
        let osd = build_osd(&s, tol()).unwrap();
        for (e, _) in osd.entries() {
            assert_eq!(e.columns().len(), 2); // m - n
            assert_eq!(e.m(), 4);
        }
        let scd = build_scd(&s, Anchor::Centroid, tol()).unwrap();
        for (e, _) in scd.entries() {
            assert_eq!(e.columns().len(), 3); // m - n + 1
            assert_eq!(e.m(), 4);
        }
    }

    #[test]
    fn perm_sign_parity() {
        assert_eq!(perm_sign(&[0, 1, 2]), 1);
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[1, 2, 0]), 1);
        assert_eq!(perm_sign(&[2, 1, 0]), -1);
    }
}
