//! Random rooted labelled graphs and a brute-force isomorphism test, shared
//! by the signature property tests and the acceptance run.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Rooted {
    pub adj: Vec<Vec<usize>>,
    pub root: usize,
    pub labels: Vec<i64>,
}

pub fn add_edge(adj: &mut [Vec<usize>], a: usize, b: usize) -> bool {
    if a == b || adj[a].contains(&b) {
        return false;
    }
    adj[a].push(b);
    adj[b].push(a);
    true
}

pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: usize, colours: i64) -> Rooted {
    let mut adj = vec![Vec::new(); n];
    for v in 1..n {
        let p = rng.gen_range(0..v);
        add_edge(&mut adj, v, p);
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        add_edge(&mut adj, a, b);
    }
    let labels = (0..n).map(|_| rng.gen_range(0..colours)).collect();
    Rooted {
        adj,
        root: rng.gen_range(0..n),
        labels,
    }
}

pub fn relabel(rng: &mut ChaCha8Rng, g: &Rooted) -> Rooted {
    let n = g.adj.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut adj = vec![Vec::new(); n];
    let mut labels = vec![0; n];
    for v in 0..n {
        labels[perm[v]] = g.labels[v];
        for &u in &g.adj[v] {
            adj[perm[v]].push(perm[u]);
        }
        adj[perm[v]].shuffle(rng);
    }
    Rooted {
        adj,
        root: perm[g.root],
        labels,
    }
}

/// Moves one edge, keeping the graph connected when possible.
pub fn perturb(rng: &mut ChaCha8Rng, g: &Rooted) -> Rooted {
    let mut h = g.clone();
    let n = h.adj.len();
    if n < 3 {
        h.labels[0] += 1;
        return h;
    }
    for _ in 0..50 {
        let a = rng.gen_range(0..n);
        if h.adj[a].is_empty() {
            continue;
        }
        let b = h.adj[a][rng.gen_range(0..h.adj[a].len())];
        let c = rng.gen_range(0..n);
        if c == a || h.adj[a].contains(&c) {
            continue;
        }
        h.adj[a].retain(|&x| x != b);
        h.adj[b].retain(|&x| x != a);
        add_edge(&mut h.adj, a, c);
        if connected(&h.adj) {
            return h;
        }
        h = g.clone();
    }
    let v = rng.gen_range(0..n);
    h.labels[v] += 1;
    h
}

pub fn connected(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.iter().all(|&s| s)
}

pub fn bfs(adj: &[Vec<usize>], root: usize) -> (Vec<usize>, Vec<usize>) {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut order = vec![root];
    dist[root] = 0;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &u in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                order.push(u);
            }
        }
        i += 1;
    }
    (dist, order)
}

/// Backtracking search for a label- and root-preserving isomorphism.
pub fn isomorphic(g: &Rooted, h: &Rooted) -> bool {
    let n = g.adj.len();
    if n != h.adj.len() {
        return false;
    }
    let eg: usize = g.adj.iter().map(Vec::len).sum();
    let eh: usize = h.adj.iter().map(Vec::len).sum();
    if eg != eh {
        return false;
    }
    let (dg, order) = bfs(&g.adj, g.root);
    let (dh, _) = bfs(&h.adj, h.root);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        k: usize,
        order: &[usize],
        g: &Rooted,
        h: &Rooted,
        dg: &[usize],
        dh: &[usize],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k];
        let candidates: Vec<usize> = if k == 0 {
            vec![h.root]
        } else {
            let p = g.adj[v].iter().copied().find(|&u| map[u] != usize::MAX).unwrap();
            h.adj[map[p]].clone()
        };
        for w in candidates {
            if used[w]
                || dh[w] != dg[v]
                || h.labels[w] != g.labels[v]
                || h.adj[w].len() != g.adj[v].len()
            {
                continue;
            }
            let consistent = order[..k].iter().all(|&u| {
                g.adj[v].contains(&u) == h.adj[w].contains(&map[u])
            });
            if !consistent {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if extend(k + 1, order, g, h, dg, dh, map, used) {
                return true;
            }
            map[v] = usize::MAX;
            used[w] = false;
        }
        false
    }

    extend(0, &order, g, h, &dg, &dh, &mut map, &mut used)
}
