//! Multilevel k-way graph partitioning that minimizes edge-cut weight.
//!
//! The graph is coarsened by heavy-edge matching, the coarsest graph is
//! split by greedy region growing, and the labels are projected back level
//! by level with boundary refinement at every level. Refinement passes move
//! one vertex at a time to the neighbouring part with the best gain, lock it,
//! and keep the best prefix of moves, so a pass never increases the cut.
//! Part weights are capped; the cap is enforced exactly on the finest level.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::par::{self, Execution};
use crate::seeding::item_rng;

/// Undirected graph with vertex and edge weights, adjacency-list form. Each
/// edge appears in both endpoint lists.
#[derive(Debug, Clone, Default)]
pub struct WeightedGraph {
    pub vwgt: Vec<u64>,
    pub adj: Vec<Vec<(usize, u64)>>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        Self {
            vwgt: vec![1; n],
            adj: vec![Vec::new(); n],
        }
    }

    /// Adds `w` to edge `{u, v}`; self-loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize, w: u64) {
        if u == v {
            return;
        }
        match self.adj[u].iter_mut().find(|(x, _)| *x == v) {
            Some(e) => {
                e.1 += w;
                self.adj[v].iter_mut().find(|(x, _)| *x == u).unwrap().1 += w;
            }
            None => {
                self.adj[u].push((v, w));
                self.adj[v].push((u, w));
            }
        }
    }

    pub fn len(&self) -> usize {
        self.vwgt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vwgt.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.vwgt.iter().sum()
    }

    pub fn edge_cut(&self, labels: &[usize]) -> u64 {
        let mut cut = 0;
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &(v, w) in nbrs {
                if u < v && labels[u] != labels[v] {
                    cut += w;
                }
            }
        }
        cut
    }

    fn part_weights(&self, labels: &[usize], k: usize) -> Vec<u64> {
        let mut pw = vec![0; k];
        for (v, &p) in labels.iter().enumerate() {
            pw[p] += self.vwgt[v];
        }
        pw
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PartitionOptions {
    pub seed: u64,
    /// Maximum part weight.
    pub max_part_weight: u64,
    /// Independent multilevel runs; the lowest cut wins.
    pub trials: usize,
    pub max_passes: usize,
    pub exec: Execution,
}

/// Cut weight before and after one refinement pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassRecord {
    pub level: usize,
    pub before: u64,
    pub after: u64,
}

#[derive(Debug, Clone)]
pub struct Partitioning {
    pub labels: Vec<usize>,
    pub cut: u64,
    pub passes: Vec<PassRecord>,
}

struct Level {
    graph: WeightedGraph,
    /// fine vertex -> coarse vertex in the next level
    map: Vec<usize>,
}

fn coarsen<R: Rng>(g: &WeightedGraph, max_vwgt: u64, rng: &mut R) -> (WeightedGraph, Vec<usize>) {
    let n = g.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut mate = vec![usize::MAX; n];
    for &u in &order {
        if mate[u] != usize::MAX {
            continue;
        }
        let best = g.adj[u]
            .iter()
            .filter(|&&(v, _)| mate[v] == usize::MAX && g.vwgt[u] + g.vwgt[v] <= max_vwgt)
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        match best {
            Some(&(v, _)) => {
                mate[u] = v;
                mate[v] = u;
            }
            None => mate[u] = u,
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut next = 0;
    for u in 0..n {
        if map[u] == usize::MAX {
            map[u] = next;
            map[mate[u]] = next;
            next += 1;
        }
    }
    let mut coarse = WeightedGraph {
        vwgt: vec![0; next],
        adj: vec![Vec::new(); next],
    };
    for u in 0..n {
        coarse.vwgt[map[u]] += g.vwgt[u];
        for &(v, w) in &g.adj[u] {
            if u < v {
                coarse.add_edge(map[u], map[v], w);
            }
        }
    }
    (coarse, map)
}

/// Greedy region growing: each part absorbs the unassigned vertex most
/// strongly connected to it until it reaches its share of the weight.
fn grow_initial<R: Rng>(g: &WeightedGraph, k: usize, cap: u64, rng: &mut R) -> Vec<usize> {
    let n = g.len();
    let total = g.total_weight();
    let mut labels = vec![usize::MAX; n];
    let mut pw = vec![0u64; k];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut assigned = 0;
    for p in 0..k {
        let remaining_parts = (k - p) as u64;
        let remaining: u64 = total - pw.iter().sum::<u64>();
        let target = remaining.div_ceil(remaining_parts).min(cap);
        let Some(&start) = order.iter().find(|&&v| labels[v] == usize::MAX) else {
            break;
        };
        labels[start] = p;
        pw[p] += g.vwgt[start];
        assigned += 1;
        let mut conn = vec![0u64; n];
        let mut touched: Vec<usize> = Vec::new();
        let bump = |v: usize, conn: &mut Vec<u64>, touched: &mut Vec<usize>, labels: &[usize]| {
            for &(u, w) in &g.adj[v] {
                if labels[u] == usize::MAX {
                    if conn[u] == 0 {
                        touched.push(u);
                    }
                    conn[u] += w;
                }
            }
        };
        bump(start, &mut conn, &mut touched, &labels);
        while pw[p] < target {
            let cand = touched
                .iter()
                .copied()
                .filter(|&u| labels[u] == usize::MAX && pw[p] + g.vwgt[u] <= cap)
                .max_by(|&a, &b| conn[a].cmp(&conn[b]).then(b.cmp(&a)));
            let Some(u) = cand else { break };
            labels[u] = p;
            pw[p] += g.vwgt[u];
            assigned += 1;
            bump(u, &mut conn, &mut touched, &labels);
        }
        if assigned == n {
            break;
        }
    }
    // leftovers: best-connected part with room, else the lightest part
    for &v in &order {
        if labels[v] != usize::MAX {
            continue;
        }
        let mut conn = vec![0u64; k];
        for &(u, w) in &g.adj[v] {
            if labels[u] != usize::MAX {
                conn[labels[u]] += w;
            }
        }
        let p = (0..k)
            .filter(|&p| pw[p] + g.vwgt[v] <= cap)
            .max_by(|&a, &b| conn[a].cmp(&conn[b]).then(pw[b].cmp(&pw[a])).then(b.cmp(&a)))
            .unwrap_or_else(|| (0..k).min_by_key(|&p| (pw[p], p)).unwrap());
        labels[v] = p;
        pw[p] += g.vwgt[v];
    }
    labels
}

fn connectivity(g: &WeightedGraph, labels: &[usize], v: usize, k: usize, buf: &mut Vec<i64>) {
    buf.clear();
    buf.resize(k, 0);
    for &(u, w) in &g.adj[v] {
        buf[labels[u]] += w as i64;
    }
}

/// One locked-move refinement pass. Returns the cut reduction (>= 0).
fn refine_pass(g: &WeightedGraph, labels: &mut [usize], k: usize, cap: u64) -> u64 {
    let n = g.len();
    let mut pw = g.part_weights(labels, k);
    let mut locked = vec![false; n];
    let mut moves: Vec<(usize, usize)> = Vec::new(); // (vertex, from)
    let mut cum = 0i64;
    let mut best = 0i64;
    let mut best_len = 0;
    let mut since_best = 0;
    let patience = n.clamp(16, 200);
    let mut conn = Vec::with_capacity(k);
    loop {
        let mut pick: Option<(i64, usize, usize)> = None;
        for v in 0..n {
            if locked[v] {
                continue;
            }
            let from = labels[v];
            if g.adj[v].iter().all(|&(u, _)| labels[u] == from) {
                continue;
            }
            connectivity(g, labels, v, k, &mut conn);
            for to in 0..k {
                if to == from || conn[to] == 0 || pw[to] + g.vwgt[v] > cap {
                    continue;
                }
                let gain = conn[to] - conn[from];
                if pick.is_none_or(|(bg, _, _)| gain > bg) {
                    pick = Some((gain, v, to));
                }
            }
        }
        let Some((gain, v, to)) = pick else { break };
        let from = labels[v];
        labels[v] = to;
        pw[from] -= g.vwgt[v];
        pw[to] += g.vwgt[v];
        locked[v] = true;
        moves.push((v, from));
        cum += gain;
        if cum > best {
            best = cum;
            best_len = moves.len();
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= patience {
                break;
            }
        }
    }
    for &(v, from) in moves[best_len..].iter().rev() {
        labels[v] = from;
    }
    best as u64
}

/// Moves vertices out of overweight parts, cheapest first.
fn rebalance(g: &WeightedGraph, labels: &mut [usize], k: usize, cap: u64) {
    let mut pw = g.part_weights(labels, k);
    let mut conn = Vec::with_capacity(k);
    while let Some(over) = (0..k).find(|&p| pw[p] > cap) {
        let mut pick: Option<(i64, usize, usize)> = None;
        for v in (0..labels.len()).filter(|&v| labels[v] == over) {
            connectivity(g, labels, v, k, &mut conn);
            for to in (0..k).filter(|&p| p != over && pw[p] + g.vwgt[v] <= cap) {
                let gain = conn[to] - conn[over];
                if pick.is_none_or(|(bg, _, _)| gain > bg) {
                    pick = Some((gain, v, to));
                }
            }
        }
        let Some((_, v, to)) = pick else { break };
        labels[v] = to;
        pw[over] -= g.vwgt[v];
        pw[to] += g.vwgt[v];
    }
}

fn refine(
    g: &WeightedGraph,
    labels: &mut [usize],
    k: usize,
    cap: u64,
    level: usize,
    max_passes: usize,
    passes: &mut Vec<PassRecord>,
) {
    let mut cut = g.edge_cut(labels);
    for _ in 0..max_passes {
        let gain = refine_pass(g, labels, k, cap);
        let after = g.edge_cut(labels);
        debug_assert_eq!(after + gain, cut);
        passes.push(PassRecord {
            level,
            before: cut,
            after,
        });
        cut = after;
        if gain == 0 {
            break;
        }
    }
}

fn multilevel(g: &WeightedGraph, k: usize, opts: &PartitionOptions, trial: usize) -> Partitioning {
    let mut rng = item_rng(opts.seed, 0x7061_7274, trial as u64);
    let cap = opts.max_part_weight;
    let coarsen_to = (k * 8).max(32);
    let max_vwgt = cap.div_ceil(2).max(1);

    let mut levels: Vec<Level> = Vec::new();
    let mut current = g.clone();
    while current.len() > coarsen_to {
        let (coarse, map) = coarsen(&current, max_vwgt, &mut rng);
        if coarse.len() as f64 > 0.95 * current.len() as f64 {
            break;
        }
        levels.push(Level {
            graph: std::mem::replace(&mut current, coarse),
            map,
        });
    }

    let mut passes = Vec::new();
    let mut labels = grow_initial(&current, k, cap, &mut rng);
    refine(&current, &mut labels, k, cap, levels.len(), opts.max_passes, &mut passes);
    while let Some(level) = levels.pop() {
        labels = level.map.iter().map(|&c| labels[c]).collect();
        current = level.graph;
        refine(&current, &mut labels, k, cap, levels.len(), opts.max_passes, &mut passes);
    }
    // coarse levels only approximate the cap; enforce it on unit weights
    let before = labels.clone();
    rebalance(&current, &mut labels, k, cap);
    if labels != before {
        refine(&current, &mut labels, k, cap, 0, opts.max_passes, &mut passes);
    }
    let cut = g.edge_cut(&labels);
    Partitioning { labels, cut, passes }
}

/// Partitions `g` into `k` parts. Requires `1 <= k <= |V|`.
pub fn partition_graph(g: &WeightedGraph, k: usize, opts: PartitionOptions) -> Partitioning {
    assert!(k >= 1 && k <= g.len().max(1));
    if k == 1 || g.is_empty() {
        return Partitioning {
            labels: vec![0; g.len()],
            cut: 0,
            passes: Vec::new(),
        };
    }
    let runs = par::map_range(opts.exec, opts.trials.max(1), |t| multilevel(g, k, &opts, t));
    runs.into_iter()
        .min_by_key(|p| p.cut)
        .expect("at least one trial")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(cap: u64) -> PartitionOptions {
        PartitionOptions {
            seed: 1,
            max_part_weight: cap,
            trials: 4,
            max_passes: 10,
            exec: Execution::Sequential,
        }
    }

    fn cliques(sizes: &[usize]) -> WeightedGraph {
        let n = sizes.iter().sum();
        let mut g = WeightedGraph::new(n);
        let mut base = 0;
        for &s in sizes {
            for i in 0..s {
                for j in i + 1..s {
                    g.add_edge(base + i, base + j, 1);
                }
            }
            base += s;
        }
        g
    }

    #[test]
    fn disjoint_triangles_split_cleanly() {
        let g = cliques(&[3, 3]);
        let p = partition_graph(&g, 2, opts(4));
        assert_eq!(p.cut, 0);
        assert_eq!(p.labels[0], p.labels[1]);
        assert_eq!(p.labels[1], p.labels[2]);
        assert_ne!(p.labels[0], p.labels[3]);
    }

    #[test]
    fn single_part() {
        let g = cliques(&[4, 2]);
        let p = partition_graph(&g, 1, opts(6));
        assert_eq!(p.cut, 0);
        assert!(p.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn respects_cap_and_refinement_is_monotone() {
        let g = cliques(&[10, 10, 10, 10]);
        let cap = (1.1f64 * 40.0 / 4.0).ceil() as u64;
        let p = partition_graph(&g, 4, opts(cap));
        let pw = g.part_weights(&p.labels, 4);
        assert!(pw.iter().all(|&w| w <= cap), "{pw:?}");
        assert_eq!(p.cut, 0);
        assert!(p.passes.iter().all(|r| r.after <= r.before));
    }

    #[test]
    fn path_graph_bisection() {
        let mut g = WeightedGraph::new(20);
        for i in 0..19 {
            g.add_edge(i, i + 1, 1);
        }
        let p = partition_graph(&g, 2, opts(11));
        assert_eq!(p.cut, 1);
    }
}
