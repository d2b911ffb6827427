//! Fruchterman–Reingold force-directed layout.

use rand::Rng;

use crate::par::{self, Execution};
use crate::seeding::item_rng;

#[derive(Debug, Clone, Copy)]
pub struct LayoutOptions {
    pub iterations: usize,
    pub seed: u64,
    /// Scale of the optimal distance `k = c * sqrt(area / |V|)`.
    pub c: f64,
    /// Maximum displacement in the first iteration; decays linearly to 0.
    pub initial_temperature: f64,
    pub exec: Execution,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        Self {
            iterations: 200,
            seed: 42,
            c: 1.0,
            initial_temperature: 0.1,
            exec: Execution::default(),
        }
    }
}

/// Simulation state over the unit square.
#[derive(Debug, Clone)]
pub struct ForceLayout {
    pos: Vec<[f64; 2]>,
    edges: Vec<(usize, usize, f64)>,
    k: f64,
    iteration: usize,
    opts: LayoutOptions,
}

impl ForceLayout {
    /// Starts from seeded uniform positions in `[0, 1]^2`. Edge weights act
    /// as attraction multipliers.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>, opts: LayoutOptions) -> Self {
        let mut rng = item_rng(opts.seed, 0x6c61_796f, 0);
        let pos = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        Self::with_positions(pos, edges, opts)
    }

    pub fn with_positions(pos: Vec<[f64; 2]>, edges: Vec<(usize, usize, f64)>, opts: LayoutOptions) -> Self {
        let n = pos.len().max(1) as f64;
        Self {
            k: opts.c * (1.0 / n).sqrt(),
            pos,
            edges,
            iteration: 0,
            opts,
        }
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.pos
    }

    pub fn temperature(&self) -> f64 {
        let total = self.opts.iterations.max(1) as f64;
        self.opts.initial_temperature * (1.0 - self.iteration as f64 / total).max(0.0)
    }

    /// Runs one iteration; returns false once the schedule is exhausted.
    pub fn step(&mut self) -> bool {
        if self.iteration >= self.opts.iterations {
            return false;
        }
        let k = self.k;
        let k2 = k * k;
        let pos = &self.pos;
        let mut disp = par::map_range(self.opts.exec, pos.len(), |i| {
            let mut d = [0.0, 0.0];
            for (j, q) in pos.iter().enumerate() {
                if i == j {
                    continue;
                }
                let dx = pos[i][0] - q[0];
                let dy = pos[i][1] - q[1];
                let dist = (dx * dx + dy * dy).sqrt().max(1e-9);
                let f = k2 / dist;
                d[0] += dx / dist * f;
                d[1] += dy / dist * f;
            }
            d
        });
        for &(u, v, w) in &self.edges {
            let dx = pos[u][0] - pos[v][0];
            let dy = pos[u][1] - pos[v][1];
            let dist = (dx * dx + dy * dy).sqrt().max(1e-9);
            let f = w * dist * dist / k;
            disp[u][0] -= dx / dist * f;
            disp[u][1] -= dy / dist * f;
            disp[v][0] += dx / dist * f;
            disp[v][1] += dy / dist * f;
        }
        let t = self.temperature();
        for (p, d) in self.pos.iter_mut().zip(&disp) {
            let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
            if len > 0.0 {
                let s = len.min(t) / len;
                p[0] += d[0] * s;
                p[1] += d[1] * s;
            }
        }
        self.iteration += 1;
        true
    }

    /// Runs the remaining iterations and returns coordinates scaled
    /// uniformly into `[0, 1]^2`, centred on the shorter axis.
    pub fn finish(mut self) -> Vec<[f64; 2]> {
        while self.step() {}
        normalize(&self.pos)
    }
}

pub fn normalize(pos: &[[f64; 2]]) -> Vec<[f64; 2]> {
    if pos.is_empty() {
        return Vec::new();
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pos {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    pos.iter()
        .map(|p| {
            let mut out = [0.5; 2];
            if span > 0.0 {
                for a in 0..2 {
                    let offset = (span - (hi[a] - lo[a])) / 2.0;
                    out[a] = ((p[a] - lo[a] + offset) / span).clamp(0.0, 1.0);
                }
            }
            out
        })
        .collect()
}
