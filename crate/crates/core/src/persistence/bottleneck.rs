//! Exact bottleneck distance by binary search over candidate values with a
//! Hopcroft–Karp perfect-matching test.

use std::collections::VecDeque;

use super::diagram::PersistenceDiagram;

/// Bottleneck distance between two diagrams, degree by degree.
///
/// Finite bars may be matched to each other at cost `max(|b − b'|, |d − d'|)` or sent to
/// the diagonal at cost `(d − b)/2`. Essential bars match only essential bars of the
/// same degree, at cost `|b − b'|`; unequal numbers of them give `+∞`.
pub fn bottleneck_distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> f64 {
    let top = d1.max_degree().max(d2.max_degree());
    let Some(top) = top else { return 0.0 };
    let mut worst: f64 = 0.0;
    for j in 0..=top {
        let split = |d: &PersistenceDiagram| {
            let mut finite = Vec::new();
            let mut essential = Vec::new();
            for b in d.degree(j) {
                if b.death.is_infinite() {
                    essential.push(b.birth);
                } else {
                    finite.push((b.birth, b.death.value()));
                }
            }
            (finite, essential)
        };
        let (f1, mut e1) = split(d1);
        let (f2, mut e2) = split(d2);
        if e1.len() != e2.len() {
            return f64::INFINITY;
        }
        e1.sort_by(f64::total_cmp);
        e2.sort_by(f64::total_cmp);
        for (a, b) in e1.iter().zip(&e2) {
            worst = worst.max((a - b).abs());
        }
        worst = worst.max(finite_bottleneck(&f1, &f2));
    }
    worst
}

fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

fn half_persistence(p: (f64, f64)) -> f64 {
    (p.1 - p.0) / 2.0
}

fn finite_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let mut candidates: Vec<f64> = a.iter().chain(b).map(|&p| half_persistence(p)).collect();
    for &p in a {
        for &q in b {
            candidates.push(linf(p, q));
        }
    }
    candidates.push(0.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    // The largest candidate is always feasible: every point can go to the diagonal.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_exists(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Left side: points of `a`, then diagonal copies of `b`. Right side: points of `b`,
/// then diagonal copies of `a`.
fn perfect_matching_exists(a: &[(f64, f64)], b: &[(f64, f64)], delta: f64) -> bool {
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..na {
        for j in 0..nb {
            if linf(a[i], b[j]) <= delta {
                adj[i].push(j);
            }
        }
        if half_persistence(a[i]) <= delta {
            adj[i].push(nb + i);
        }
    }
    for j in 0..nb {
        if half_persistence(b[j]) <= delta {
            adj[na + j].push(j);
        }
        // Diagonal to diagonal is free.
        for i in 0..na {
            adj[na + j].push(nb + i);
        }
    }
    hopcroft_karp(&adj, n) == n
}

fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![FREE; n_left];
    let mut match_r = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut matched = 0;
    loop {
        // Layered BFS from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return matched;
        }
        let mut next_edge = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == FREE
                && augment(
                    u,
                    adj,
                    &mut match_l,
                    &mut match_r,
                    &mut dist,
                    &mut next_edge,
                )
            {
                matched += 1;
            }
        }
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    // Iterative DFS along the BFS layers.
    let mut stack = vec![u];
    while let Some(&x) = stack.last() {
        if next_edge[x] == adj[x].len() {
            dist[x] = usize::MAX;
            stack.pop();
            continue;
        }
        let v = adj[x][next_edge[x]];
        next_edge[x] += 1;
        let w = match_r[v];
        if w == usize::MAX {
            // Flip the alternating path recorded on the stack.
            let mut v = v;
            while let Some(x) = stack.pop() {
                let prev = match_l[x];
                match_l[x] = v;
                match_r[v] = x;
                v = prev;
            }
            return true;
        }
        if dist[w] == dist[x] + 1 {
            stack.push(w);
        }
    }
    false
}
