use htx_core::hashgraph::{
    partition_graph, ExportFormat, GraphPartitionOptions, HashtagGraph, LayoutOptions, Node, Edge,
    PartitionOptions, WeightedGraph, INTER_CLUSTER_COLOR,
};
use htx_core::Execution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    let m = n * rng.gen_range(2..5);
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        g.add_edge(u, v, rng.gen_range(1..20));
    }
    g
}

fn independent_cut(g: &WeightedGraph, labels: &[usize]) -> u64 {
    let mut cut = 0;
    for u in 0..g.len() {
        for &(v, w) in &g.adj[u] {
            if labels[u] != labels[v] {
                cut += w;
            }
        }
    }
    cut / 2
}

#[test]
fn beats_random_balanced_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..20 {
        let n = rng.gen_range(50..=200);
        let k = [2, 3, 4, 5, 8][round % 5];
        let g = random_graph(&mut rng, n);
        let cap = (1.1 * n as f64 / k as f64).ceil() as u64;
        let p = partition_graph(
            &g,
            k,
            PartitionOptions {
                seed: round as u64,
                max_part_weight: cap,
                trials: 8,
                max_passes: 16,
                exec: Execution::Parallel,
            },
        );
        assert_eq!(p.cut, independent_cut(&g, &p.labels));
        let mut sizes = vec![0u64; k];
        for &l in &p.labels {
            sizes[l] += 1;
        }
        assert!(sizes.iter().all(|&s| s <= cap), "{sizes:?} cap {cap}");
        assert!(p.passes.iter().all(|r| r.after <= r.before));

        let mut best_random = u64::MAX;
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..100 {
            order.shuffle(&mut rng);
            let mut labels = vec![0; n];
            for (i, &v) in order.iter().enumerate() {
                labels[v] = i % k;
            }
            best_random = best_random.min(independent_cut(&g, &labels));
        }
        assert!(p.cut <= best_random, "round {round}: {} > {best_random}", p.cut);
    }
}

#[test]
fn sequential_matches_parallel() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = random_graph(&mut rng, 120);
    let run = |exec| {
        partition_graph(
            &g,
            6,
            PartitionOptions {
                seed: 3,
                max_part_weight: 22,
                trials: 4,
                max_passes: 16,
                exec,
            },
        )
        .labels
    };
    assert_eq!(run(Execution::Parallel), run(Execution::Sequential));
}

fn fixture_graph() -> HashtagGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let names: Vec<String> = (0..40).map(|i| format!("tag{i:02}")).collect();
    let mut edges = std::collections::BTreeMap::new();
    for _ in 0..90 {
        let a = rng.gen_range(0..40);
        let b = rng.gen_range(0..40);
        if a != b {
            let (a, b) = (a.min(b), a.max(b));
            *edges.entry((a, b)).or_insert(0) += rng.gen_range(1..9);
        }
    }
    HashtagGraph {
        nodes: names
            .iter()
            .enumerate()
            .map(|(i, h)| Node {
                hashtag: h.clone(),
                frequency: 100 - i as u64,
                partition: None,
                x: None,
                y: None,
            })
            .collect(),
        edges: edges
            .into_iter()
            .map(|((a, b), w)| Edge {
                a: names[a].clone(),
                b: names[b].clone(),
                weight: w,
            })
            .collect(),
    }
}

#[test]
fn svg_gray_edges_equal_cut_edges() {
    let mut g = fixture_graph();
    let report = g
        .partition(GraphPartitionOptions {
            k: 5,
            ..Default::default()
        })
        .unwrap();
    g.layout(LayoutOptions::default()).unwrap();
    let svg = String::from_utf8(g.export(ExportFormat::Svg).unwrap()).unwrap();
    let label: std::collections::HashMap<_, _> =
        g.nodes.iter().map(|n| (n.hashtag.clone(), n.partition.unwrap())).collect();
    let cut_edges = g.edges.iter().filter(|e| label[&e.a] != label[&e.b]).count();
    let cut_weight: u64 = g
        .edges
        .iter()
        .filter(|e| label[&e.a] != label[&e.b])
        .map(|e| e.weight)
        .sum();
    let gray = svg
        .lines()
        .filter(|l| l.starts_with("<line") && l.contains(&format!("stroke=\"{INTER_CLUSTER_COLOR}\"")))
        .count();
    assert_eq!(gray, cut_edges);
    assert_eq!(report.cut, cut_weight);
    assert!(g
        .nodes
        .iter()
        .all(|n| (0.0..=1.0).contains(&n.x.unwrap()) && (0.0..=1.0).contains(&n.y.unwrap())));
}

#[test]
fn json_round_trip_is_identity() {
    let mut g = fixture_graph();
    g.partition(GraphPartitionOptions {
        k: 4,
        ..Default::default()
    })
    .unwrap();
    g.layout(LayoutOptions::default()).unwrap();
    let bytes = g.export(ExportFormat::Json).unwrap();
    let back = HashtagGraph::from_json(std::str::from_utf8(&bytes).unwrap()).unwrap();
    assert_eq!(back, g);
    assert_eq!(back.export(ExportFormat::Json).unwrap(), bytes);
}

#[test]
fn layout_is_deterministic() {
    let mut a = fixture_graph();
    let mut b = fixture_graph();
    a.layout(LayoutOptions::default()).unwrap();
    b.layout(LayoutOptions {
        exec: Execution::Sequential,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(a, b);
}
