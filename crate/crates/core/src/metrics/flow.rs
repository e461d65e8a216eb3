//! Exact min-cost transportation on an integer grid.
//!
//! Supplies and demands are integer units (scaled rational weights), costs
//! are floats. Successive shortest paths with Dijkstra and node potentials;
//! every augmentation saturates a supply or demand arc, so at most
//! `k + l` rounds run.

use crate::error::{Error, Result};

struct Arc {
    to: usize,
    cap: u64,
    cost: f64,
    rev: usize,
}

struct Network {
    adj: Vec<Vec<Arc>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Self {
            adj: (0..nodes).map(|_| Vec::new()).collect(),
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: u64, cost: f64) {
        let rev_from = self.adj[to].len();
        let rev_to = self.adj[from].len();
        self.adj[from].push(Arc {
            to,
            cap,
            cost,
            rev: rev_from,
        });
        self.adj[to].push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
            rev: rev_to,
        });
    }
}

/// Minimum-cost complete transport of `supply` into `demand`.
///
/// Requires `sum(supply) == sum(demand)`. Returns the total cost in units
/// (`sum flow_ij * cost_ij`) and the unit flow matrix.
pub(crate) fn min_cost_transport(
    supply: &[u64],
    demand: &[u64],
    cost: impl Fn(usize, usize) -> f64,
) -> Result<(f64, Vec<u64>)> {
    let k = supply.len();
    let l = demand.len();
    let total: u64 = supply.iter().sum();
    if total != demand.iter().sum::<u64>() {
        return Err(Error::InvalidInput(
            "supply and demand totals differ".into(),
        ));
    }
    let nodes = k + l + 2;
    let source = k + l;
    let sink = k + l + 1;
    let mut net = Network::new(nodes);
    for (i, &s) in supply.iter().enumerate() {
        net.add_edge(source, i, s, 0.0);
    }
    for (j, &d) in demand.iter().enumerate() {
        net.add_edge(k + j, sink, d, 0.0);
    }
    for i in 0..k {
        for j in 0..l {
            net.add_edge(i, k + j, u64::MAX, cost(i, j));
        }
    }

    let mut potential = vec![0.0f64; nodes];
    let mut pushed = 0u64;
    while pushed < total {
        // Dijkstra on reduced costs
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); nodes];
        dist[source] = 0.0;
        let mut heap = std::collections::BinaryHeap::new();
        heap.push(HeapItem {
            dist: 0.0,
            node: source,
        });
        while let Some(HeapItem { dist: d, node: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for (idx, arc) in net.adj[u].iter().enumerate() {
                if arc.cap == 0 {
                    continue;
                }
                let reduced = (arc.cost + potential[u] - potential[arc.to]).max(0.0);
                let nd = d + reduced;
                if nd < dist[arc.to] {
                    dist[arc.to] = nd;
                    prev[arc.to] = (u, idx);
                    heap.push(HeapItem {
                        dist: nd,
                        node: arc.to,
                    });
                }
            }
        }
        if !dist[sink].is_finite() {
            return Err(Error::InvalidInput(
                "transportation network became infeasible".into(),
            ));
        }
        for v in 0..nodes {
            if dist[v].is_finite() {
                potential[v] += dist[v];
            }
        }
        // bottleneck along the path
        let mut bottleneck = total - pushed;
        let mut v = sink;
        while v != source {
            let (u, idx) = prev[v];
            bottleneck = bottleneck.min(net.adj[u][idx].cap);
            v = u;
        }
        let mut v = sink;
        while v != source {
            let (u, idx) = prev[v];
            let rev = net.adj[u][idx].rev;
            net.adj[u][idx].cap -= bottleneck;
            net.adj[v][rev].cap += bottleneck;
            v = u;
        }
        pushed += bottleneck;
    }

    // read the flow off the reverse arcs j -> i
    let mut flow = vec![0u64; k * l];
    let mut total_cost = 0.0;
    for i in 0..k {
        for arc in &net.adj[i] {
            if arc.to >= k && arc.to < k + l {
                let j = arc.to - k;
                // arc.cap is the remaining capacity of i->j; the paired
                // reverse arc accumulated the pushed units
                let rev = &net.adj[arc.to][arc.rev];
                debug_assert_eq!(rev.to, i);
                let units = rev.cap;
                if units > 0 {
                    flow[i * l + j] = units;
                    total_cost += units as f64 * cost(i, j);
                }
            }
        }
    }
    Ok((total_cost, flow))
}

struct HeapItem {
    dist: f64,
    node: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // min-heap on dist
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}
