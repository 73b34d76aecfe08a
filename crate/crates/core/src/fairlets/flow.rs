//! Minimum-cost flow by successive shortest augmenting paths with node
//! potentials.
//!
//! Node supplies are routed from a virtual source to a virtual sink, so any
//! feasible network with integral supplies and capacities gets an integral
//! optimal flow. Arc costs may be negative as long as the network has no
//! negative-cost cycle; initial potentials come from Bellman-Ford.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub capacity: i64,
    pub cost: f64,
}

#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    supplies: Vec<i64>,
    arcs: Vec<FlowArc>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            supplies: vec![0; nodes],
            arcs: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.supplies.len()
    }

    /// Adds an arc and returns its index into the solution's flow vector.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: i64, cost: f64) -> usize {
        self.arcs.push(FlowArc {
            from,
            to,
            capacity,
            cost,
        });
        self.arcs.len() - 1
    }

    /// Positive supply is a source of flow, negative a demand.
    pub fn set_supply(&mut self, node: usize, supply: i64) {
        self.supplies[node] = supply;
    }

    pub fn supplies(&self) -> &[i64] {
        &self.supplies
    }

    pub fn arcs(&self) -> &[FlowArc] {
        &self.arcs
    }

    fn check(&self) -> Result<()> {
        let n = self.node_count();
        if self.supplies.iter().sum::<i64>() != 0 {
            return Err(Error::FlowInfeasible("supplies do not sum to zero".into()));
        }
        for (i, a) in self.arcs.iter().enumerate() {
            if a.from >= n || a.to >= n {
                return Err(Error::InvalidParameter(format!(
                    "arc {i} references a node outside 0..{n}"
                )));
            }
            if a.capacity < 0 {
                return Err(Error::InvalidParameter(format!(
                    "arc {i} has negative capacity"
                )));
            }
            if !a.cost.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "arc {i} has non-finite cost"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    /// Flow on each arc, in insertion order.
    pub flows: Vec<i64>,
    pub cost: f64,
}

struct Edge {
    to: usize,
    rev: usize,
    residual: i64,
    cost: f64,
}

struct Residual {
    adj: Vec<Vec<Edge>>,
}

impl Residual {
    fn add(&mut self, from: usize, to: usize, capacity: i64, cost: f64) -> (usize, usize) {
        let fwd = self.adj[from].len();
        let bwd = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Edge {
            to,
            rev: bwd,
            residual: capacity,
            cost,
        });
        self.adj[to].push(Edge {
            to: from,
            rev: fwd,
            residual: 0,
            cost: -cost,
        });
        (from, fwd)
    }
}

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Integral minimum-cost flow meeting every node supply.
pub fn solve_min_cost_flow(net: &FlowNetwork) -> Result<FlowSolution> {
    net.check()?;
    let n = net.node_count();
    let (source, sink) = (n, n + 1);
    let mut g = Residual {
        adj: (0..n + 2).map(|_| Vec::new()).collect(),
    };
    let handles: Vec<(usize, usize)> = net
        .arcs
        .iter()
        .map(|a| g.add(a.from, a.to, a.capacity, a.cost))
        .collect();
    let mut required = 0i64;
    for (v, &s) in net.supplies.iter().enumerate() {
        match s.cmp(&0) {
            Ordering::Greater => {
                g.add(source, v, s, 0.0);
                required += s;
            }
            Ordering::Less => {
                g.add(v, sink, -s, 0.0);
            }
            Ordering::Equal => {}
        }
    }

    let mut potential = initial_potentials(&g, source)?;
    let mut sent = 0i64;
    let mut dist = vec![f64::INFINITY; n + 2];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n + 2];
    while sent < required {
        dist.fill(f64::INFINITY);
        parent.fill(None);
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem {
            dist: 0.0,
            node: source,
        });
        while let Some(HeapItem { dist: d, node: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for (ei, e) in g.adj[u].iter().enumerate() {
                if e.residual <= 0 {
                    continue;
                }
                // reduced costs are >= 0 up to rounding
                let reduced = (e.cost + potential[u] - potential[e.to]).max(0.0);
                let nd = d + reduced;
                if nd < dist[e.to] {
                    dist[e.to] = nd;
                    parent[e.to] = Some((u, ei));
                    heap.push(HeapItem {
                        dist: nd,
                        node: e.to,
                    });
                }
            }
        }
        if !dist[sink].is_finite() {
            return Err(Error::FlowInfeasible(format!(
                "only {sent} of {required} supply units can be routed"
            )));
        }
        for v in 0..n + 2 {
            if dist[v].is_finite() {
                potential[v] += dist[v];
            }
        }
        let mut push = required - sent;
        let mut v = sink;
        while let Some((u, ei)) = parent[v] {
            push = push.min(g.adj[u][ei].residual);
            v = u;
        }
        let mut v = sink;
        while let Some((u, ei)) = parent[v] {
            let rev = g.adj[u][ei].rev;
            g.adj[u][ei].residual -= push;
            g.adj[v][rev].residual += push;
            v = u;
        }
        sent += push;
    }

    let flows: Vec<i64> = net
        .arcs
        .iter()
        .zip(&handles)
        .map(|(a, &(u, ei))| a.capacity - g.adj[u][ei].residual)
        .collect();
    let cost = net
        .arcs
        .iter()
        .zip(&flows)
        .map(|(a, &f)| a.cost * f as f64)
        .sum();
    Ok(FlowSolution { flows, cost })
}

// Bellman-Ford shortest distances from `source` over arcs with residual
// capacity; a relaxation in round |V| means a negative cycle.
fn initial_potentials(g: &Residual, source: usize) -> Result<Vec<f64>> {
    let n = g.adj.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    for round in 0..n {
        let mut changed = false;
        for u in 0..n {
            if !dist[u].is_finite() {
                continue;
            }
            for e in &g.adj[u] {
                if e.residual > 0 && dist[u] + e.cost < dist[e.to] - 1e-12 {
                    dist[e.to] = dist[u] + e.cost;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        if round == n - 1 {
            return Err(Error::InvalidParameter(
                "network contains a negative-cost cycle".into(),
            ));
        }
    }
    Ok(dist
        .into_iter()
        .map(|d| if d.is_finite() { d } else { 0.0 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_arc() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, 3, 2.5);
        net.set_supply(0, 1);
        net.set_supply(1, -1);
        let sol = solve_min_cost_flow(&net).unwrap();
        assert_eq!(sol.flows, vec![1]);
        assert_eq!(sol.cost, 2.5);
    }

    #[test]
    fn prefers_cheaper_parallel_arc() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, 1, 2.0);
        net.add_arc(0, 1, 1, 1.0);
        net.set_supply(0, 1);
        net.set_supply(1, -1);
        let sol = solve_min_cost_flow(&net).unwrap();
        assert_eq!(sol.flows, vec![0, 1]);
        assert_eq!(sol.cost, 1.0);
    }

    #[test]
    fn infeasible_networks_error() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, 1, 1.0);
        net.set_supply(0, 2);
        net.set_supply(1, -2);
        assert!(matches!(solve_min_cost_flow(&net), Err(Error::FlowInfeasible(_))));

        let mut unbalanced = FlowNetwork::new(2);
        unbalanced.set_supply(0, 1);
        assert!(matches!(
            solve_min_cost_flow(&unbalanced),
            Err(Error::FlowInfeasible(_))
        ));
    }

    #[test]
    fn negative_costs_without_cycles() {
        // 0 -> 1 -> 3 costs -1 + 4, 0 -> 2 -> 3 costs 2 + 2
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 1, -1.0);
        net.add_arc(1, 3, 1, 4.0);
        net.add_arc(0, 2, 2, 2.0);
        net.add_arc(2, 3, 2, 2.0);
        net.set_supply(0, 2);
        net.set_supply(3, -2);
        let sol = solve_min_cost_flow(&net).unwrap();
        assert_eq!(sol.cost, 7.0);
    }

    /// Exhaustive minimum over all integral flows within capacity that
    /// conserve flow; `None` if none exists.
    fn brute_force(net: &FlowNetwork) -> Option<f64> {
        let arcs = net.arcs();
        let mut flows = vec![0i64; arcs.len()];
        let mut best: Option<f64> = None;
        loop {
            let mut balance = vec![0i64; net.node_count()];
            for (a, &f) in arcs.iter().zip(&flows) {
                balance[a.from] += f;
                balance[a.to] -= f;
            }
            if balance == net.supplies() {
                let cost: f64 = arcs.iter().zip(&flows).map(|(a, &f)| a.cost * f as f64).sum();
                if best.is_none_or(|b| cost < b) {
                    best = Some(cost);
                }
            }
            // odometer increment
            let mut i = 0;
            loop {
                if i == flows.len() {
                    return best;
                }
                if flows[i] < arcs[i].capacity {
                    flows[i] += 1;
                    break;
                }
                flows[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn random_networks_match_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut feasible = 0;
        for _ in 0..150 {
            let nodes = rng.random_range(3..=10);
            let arcs = rng.random_range(nodes..=11);
            let mut net = FlowNetwork::new(nodes);
            for _ in 0..arcs {
                let from = rng.random_range(0..nodes);
                let mut to = rng.random_range(0..nodes);
                if to == from {
                    to = (to + 1) % nodes;
                }
                // arcs point "forward" so the network has no cycles
                let (a, b) = (from.min(to), from.max(to));
                net.add_arc(a, b, rng.random_range(0..=2), rng.random_range(0..10) as f64);
            }
            let s = rng.random_range(1..=2);
            net.set_supply(0, s);
            let sink = rng.random_range(1..nodes);
            net.set_supply(sink, -s);

            let oracle = brute_force(&net);
            match solve_min_cost_flow(&net) {
                Ok(sol) => {
                    feasible += 1;
                    assert_eq!(Some(sol.cost), oracle);
                    let mut balance = vec![0i64; nodes];
                    for (a, &f) in net.arcs().iter().zip(&sol.flows) {
                        assert!((0..=a.capacity).contains(&f));
                        balance[a.from] += f;
                        balance[a.to] -= f;
                    }
                    assert_eq!(balance, net.supplies());
                }
                Err(Error::FlowInfeasible(_)) => assert_eq!(oracle, None),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(feasible > 30, "too few feasible instances: {feasible}");
    }
}
