//! Maximum bipartite matching by augmenting paths.

/// Returns the size of a maximum matching in the bipartite graph with
/// `left` and `right` vertices and adjacency `adj[l] = right neighbours`.
pub(crate) fn max_matching(left: usize, right: usize, adj: &[Vec<usize>]) -> usize {
    debug_assert_eq!(adj.len(), left);
    let mut match_right = vec![usize::MAX; right];
    let mut matched = 0;
    // greedy seed
    let mut match_left = vec![usize::MAX; left];
    for l in 0..left {
        for &r in &adj[l] {
            if match_right[r] == usize::MAX {
                match_right[r] = l;
                match_left[l] = r;
                matched += 1;
                break;
            }
        }
    }
    let mut visited = vec![0u32; right];
    let mut stamp = 0;
    for l in 0..left {
        if match_left[l] != usize::MAX {
            continue;
        }
        stamp += 1;
        if augment(l, adj, &mut match_left, &mut match_right, &mut visited, stamp) {
            matched += 1;
        }
    }
    matched
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    visited: &mut [u32],
    stamp: u32,
) -> bool {
    for &r in &adj[l] {
        if visited[r] == stamp {
            continue;
        }
        visited[r] = stamp;
        if match_right[r] == usize::MAX
            || augment(match_right[r], adj, match_left, match_right, visited, stamp)
        {
            match_right[r] = l;
            match_left[l] = r;
            return true;
        }
    }
    false
}
