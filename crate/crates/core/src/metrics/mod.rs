//! Metrics on invariants: `L_inf` on matrices, bottleneck `W_inf` on
//! unlabelled tuples, `M_inf` on ORDs/OCDs, and LAC/EMD aggregations on
//! whole distributions.
//!
//! The bottleneck distance is computed exactly by binary search over the
//! `k^2` candidate pairwise costs with a maximum bipartite matching at each
//! threshold. LAC runs on the uncollapsed invariant lists (square cost
//! matrices), EMD on the collapsed weighted form as min-cost flow over an
//! exact integer grid.

mod assignment;
mod flow;
mod matching;

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, Tolerance};
use crate::invariants::{
    build_osd, build_scd, Anchor, CentredDist, Invariant, OrientedPair, RelativeDist,
    WeightedDist,
};
use assignment::min_assignment_cost;
use flow::min_cost_transport;
use itertools::Itertools;
use matching::max_matching;
use rayon::prelude::*;

/// How a distribution-level distance aggregates the pairwise `M_inf` costs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Normalized minimum-cost perfect assignment on the uncollapsed lists.
    Lac,
    /// Earth Mover's Distance on the collapsed weighted distributions.
    Emd,
}

/// Equivalence being tested: rigid motion or full isometry (reflections
/// allowed, realized by also comparing against the mirror image).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Rigid,
    Isometry,
}

/// Dense matrix of non-negative pairwise costs.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "cost matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidInput(
                "costs must be non-negative finite reals".into(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

/// Feasible mass coupling produced by [`emd_with_flow`]; entries lie in
/// `[0, 1]`, rows sum to the source weights and columns to the sink weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Flow {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Flow {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }
}

/// `max |a_i - b_i|` over equally-shaped vectors or flattened matrices.
pub fn linf(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "L_inf over shapes {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(linf_unchecked(a, b))
}

fn linf_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Bottleneck distance `W_inf` between equal-size clouds of unlabelled
/// points under the Minkowski norm.
///
/// Exact: the optimum is one of the `k^2` pairwise costs, found by binary
/// search with a maximum-matching feasibility test; ties resolve to the
/// smallest feasible candidate.
pub fn bottleneck(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Incomparable(format!(
            "bottleneck needs equal cardinalities, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let k = a.len();
    if k == 0 {
        return Ok(0.0);
    }
    let d = a[0].len();
    if a.iter().chain(b.iter()).any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch(
            "bottleneck points must share one dimension".into(),
        ));
    }
    let mut costs = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            costs[i * k + j] = linf_unchecked(&a[i], &b[j]);
        }
    }
    let mut candidates: Vec<f64> = costs.clone();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let feasible = |t: f64| -> bool {
        let adj: Vec<Vec<usize>> = (0..k)
            .map(|i| (0..k).filter(|&j| costs[i * k + j] <= t).collect())
            .collect();
        max_matching(k, k, &adj) == k
    };
    let mut lo = 0;
    let mut hi = candidates.len() - 1;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

fn cols_as_points(pair: &OrientedPair) -> Vec<Vec<f64>> {
    pair.cols
        .iter()
        .map(|c| {
            let mut v = c.dists.clone();
            v.push(c.norm_strength);
            v
        })
        .collect()
}

fn m_inf_pair(x: &OrientedPair, y: &OrientedPair) -> Result<f64> {
    if !x.same_shape(y) {
        return Err(Error::Incomparable("invariants of different shape".into()));
    }
    let h = x.h();
    let y_points = cols_as_points(y);
    let mut best = f64::INFINITY;
    for prefix in (0..x.free).permutations(x.free) {
        let mut perm = prefix;
        perm.extend(x.free..h);
        let xp = x.relabelled(&perm);
        let l = linf_unchecked(xp.basis.upper(), y.basis.upper());
        if l >= best {
            continue;
        }
        let w = bottleneck(&cols_as_points(&xp), &y_points)?;
        best = best.min(l.max(w));
    }
    Ok(best)
}

/// `M_inf` metric on oriented relative distributions: minimum over basis
/// permutations of the larger of the `L_inf` basis gap and the bottleneck
/// gap over columns viewed as points `(v, s sigma / c_n)` in `R^(n+1)`.
pub fn m_inf_ord(x: &RelativeDist, y: &RelativeDist) -> Result<f64> {
    m_inf_pair(&x.0, &y.0)
}

/// `M_inf` metric on oriented centred distributions; permutations fix the
/// origin slot of the basis.
pub fn m_inf_ocd(x: &CentredDist, y: &CentredDist) -> Result<f64> {
    m_inf_pair(&x.0, &y.0)
}

/// Linear Assignment Cost: `1/k` times the minimum-cost perfect assignment.
pub fn lac(costs: &CostMatrix) -> Result<f64> {
    if costs.rows() != costs.cols() {
        return Err(Error::InvalidInput(format!(
            "LAC needs a square cost matrix, got {}x{}",
            costs.rows(),
            costs.cols()
        )));
    }
    let k = costs.rows();
    if k == 0 {
        return Ok(0.0);
    }
    Ok(min_assignment_cost(k, |i, j| costs.get(i, j)) / k as f64)
}

const EMD_SCALE: u64 = 1 << 40;

/// Rounds weights to integer units summing exactly to `scale`
/// (largest-remainder apportionment).
fn apportion(w: &[f64], scale: u64) -> Vec<u64> {
    let mut units: Vec<u64> = Vec::with_capacity(w.len());
    let mut fracs: Vec<(f64, usize)> = Vec::with_capacity(w.len());
    let mut sum: u64 = 0;
    for (i, &x) in w.iter().enumerate() {
        let raw = x * scale as f64;
        let base = raw.floor().max(0.0) as u64;
        units.push(base);
        sum += base;
        fracs.push((raw - base as f64, i));
    }
    use std::cmp::Ordering;
    match sum.cmp(&scale) {
        Ordering::Less => {
            let mut missing = scale - sum;
            fracs.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut it = fracs.iter().cycle();
            while missing > 0 {
                let &(_, i) = it.next().unwrap();
                units[i] += 1;
                missing -= 1;
            }
        }
        Ordering::Greater => {
            let mut excess = sum - scale;
            fracs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut it = fracs.iter().cycle();
            while excess > 0 {
                let &(_, i) = it.next().unwrap();
                if units[i] > 0 {
                    units[i] -= 1;
                    excess -= 1;
                }
            }
        }
        Ordering::Equal => {}
    }
    units
}

/// Earth Mover's Distance between weighted sets with the given cost matrix.
///
/// Weights must each sum to one (within `1e-12`); the flow itself is
/// computed exactly on an integer grid.
pub fn emd(wx: &[f64], wy: &[f64], costs: &CostMatrix) -> Result<f64> {
    emd_with_flow(wx, wy, costs).map(|(d, _)| d)
}

/// As [`emd`], also returning the optimal flow.
pub fn emd_with_flow(wx: &[f64], wy: &[f64], costs: &CostMatrix) -> Result<(f64, Flow)> {
    if wx.len() != costs.rows() || wy.len() != costs.cols() {
        return Err(Error::DimensionMismatch(format!(
            "weights of lengths {} and {} for a {}x{} cost matrix",
            wx.len(),
            wy.len(),
            costs.rows(),
            costs.cols()
        )));
    }
    if wx.iter().chain(wy).any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidInput("weights must be non-negative".into()));
    }
    for (name, w) in [("source", wx), ("sink", wy)] {
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "{name} weights sum to {sum}, expected 1"
            )));
        }
    }
    let sx = apportion(wx, EMD_SCALE);
    let sy = apportion(wy, EMD_SCALE);
    let (total_cost, units) = min_cost_transport(&sx, &sy, |i, j| costs.get(i, j))?;
    let scale = EMD_SCALE as f64;
    let data: Vec<f64> = units.iter().map(|&u| u as f64 / scale).collect();
    Ok((
        total_cost / scale,
        Flow {
            rows: wx.len(),
            cols: wy.len(),
            data,
        },
    ))
}

fn aggregate<T: Invariant>(
    x: &WeightedDist<T>,
    y: &WeightedDist<T>,
    method: Method,
    d: &(impl Fn(&T, &T) -> Result<f64> + Sync),
) -> Result<f64> {
    let ux = x.entries();
    let uy = y.entries();
    let cols = uy.len();
    let costs: Vec<f64> = (0..ux.len() * cols)
        .into_par_iter()
        .map(|idx| d(&ux[idx / cols].0, &uy[idx % cols].0))
        .collect::<Result<_>>()?;
    match method {
        Method::Lac => {
            let expand = |dist: &WeightedDist<T>| -> Vec<usize> {
                dist.entries()
                    .iter()
                    .enumerate()
                    .flat_map(|(i, (_, c))| std::iter::repeat(i).take(*c as usize))
                    .collect()
            };
            let map_x = expand(x);
            let map_y = expand(y);
            let k = map_x.len();
            Ok(min_assignment_cost(k, |i, j| costs[map_x[i] * cols + map_y[j]]) / k as f64)
        }
        Method::Emd => {
            let cx: Vec<u64> = ux.iter().map(|(_, c)| *c).collect();
            let cy: Vec<u64> = uy.iter().map(|(_, c)| *c).collect();
            let (total_cost, _) = min_cost_transport(&cx, &cy, |i, j| costs[i * cols + j])?;
            Ok(total_cost / x.total() as f64)
        }
    }
}

fn distribution_distance<T: Invariant>(
    x: &WeightedDist<T>,
    y: &WeightedDist<T>,
    method: Method,
    mode: Mode,
    d: impl Fn(&T, &T) -> Result<f64> + Sync,
) -> Result<f64> {
    if x.total() != y.total() {
        return Err(Error::Incomparable(format!(
            "distributions over {} vs {} subsets",
            x.total(),
            y.total()
        )));
    }
    let direct = aggregate(x, y, method, &d)?;
    match mode {
        Mode::Rigid => Ok(direct),
        Mode::Isometry => {
            let ym = y.mirrored();
            Ok(direct.min(aggregate(x, &ym, method, &d)?))
        }
    }
}

fn check_comparable(a: &PointCloud, b: &PointCloud) -> Result<()> {
    if a.dim() != b.dim() || a.len() != b.len() {
        return Err(Error::Incomparable(format!(
            "clouds with (m, n) = ({}, {}) vs ({}, {})",
            a.len(),
            a.dim(),
            b.len(),
            b.dim()
        )));
    }
    Ok(())
}

/// Distance between clouds through their OSD invariants.
pub fn osd_distance(
    a: &PointCloud,
    b: &PointCloud,
    method: Method,
    mode: Mode,
    tol: Tolerance,
) -> Result<f64> {
    check_comparable(a, b)?;
    let x = build_osd(a, tol)?;
    let y = build_osd(b, tol)?;
    osd_distribution_distance(&x, &y, method, mode)
}

/// Distance between prebuilt OSD distributions.
pub fn osd_distribution_distance(
    x: &WeightedDist<RelativeDist>,
    y: &WeightedDist<RelativeDist>,
    method: Method,
    mode: Mode,
) -> Result<f64> {
    distribution_distance(x, y, method, mode, |a, b| m_inf_ord(a, b))
}

/// Distance between clouds through their SCD invariants; both clouds are
/// anchored the same way first.
pub fn scd_distance(
    a: &PointCloud,
    b: &PointCloud,
    method: Method,
    mode: Mode,
    anchor: Anchor,
    tol: Tolerance,
) -> Result<f64> {
    check_comparable(a, b)?;
    let x = build_scd(a, anchor, tol)?;
    let y = build_scd(b, anchor, tol)?;
    scd_distribution_distance(&x, &y, method, mode)
}

/// Distance between prebuilt SCD distributions.
pub fn scd_distribution_distance(
    x: &WeightedDist<CentredDist>,
    y: &WeightedDist<CentredDist>,
    method: Method,
    mode: Mode,
) -> Result<f64> {
    distribution_distance(x, y, method, mode, |a, b| m_inf_ocd(a, b))
}
