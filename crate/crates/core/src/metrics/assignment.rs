//! Exact linear assignment on float costs.
//!
//! Dense O(k^3) shortest-augmenting-path formulation with row/column
//! potentials (the Jonker-Volgenant scheme).

/// Minimum total cost of a perfect assignment in a square cost matrix.
///
/// `cost(i, j)` is read through the closure; `k` is the matrix order.
pub(crate) fn min_assignment_cost(k: usize, cost: impl Fn(usize, usize) -> f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0f64; k + 1];
    let mut v = vec![0.0f64; k + 1];
    let mut p = vec![0usize; k + 1]; // p[j]: row matched to column j (1-based, 0 = free)
    let mut way = vec![0usize; k + 1];

    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    (1..=k)
        .map(|j| if p[j] > 0 { cost(p[j] - 1, j - 1) } else { 0.0 })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_assignments() {
        let costs = [[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]];
        assert_eq!(min_assignment_cost(3, |i, j| costs[i][j]), 5.0);
        assert_eq!(min_assignment_cost(0, |_, _| 0.0), 0.0);
        assert_eq!(min_assignment_cost(1, |_, _| 7.5), 7.5);
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let k = rng.random_range(1..=6);
            let m: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..k).map(|_| rng.random_range(0.0..10.0)).collect())
                .collect();
            let got = min_assignment_cost(k, |i, j| m[i][j]);
            let best = brute_force(&m);
            assert!((got - best).abs() < 1e-9, "JV {got} vs brute {best}");
        }
    }

    fn brute_force(m: &[Vec<f64>]) -> f64 {
        use itertools::Itertools;
        let k = m.len();
        (0..k)
            .permutations(k)
            .map(|p| (0..k).map(|i| m[i][p[i]]).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }
}
