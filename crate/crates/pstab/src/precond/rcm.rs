//! Reverse Cuthill–McKee ordering of a sparse matrix's adjacency pattern.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::perm::Permutation;
use crate::sparse::CsrMatrix;

/// Undirected adjacency lists of the pattern of `A + Aᵀ`, self-loops removed,
/// neighbors sorted by index.
fn adjacency(a: &CsrMatrix) -> Vec<Vec<usize>> {
    let d = a.dim();
    let mut adj = vec![Vec::new(); d];
    for (r, c, _) in a.triplets() {
        if r != c {
            adj[r].push(c);
            adj[c].push(r);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Breadth-first levels from `start`, restricted to `start`'s component.
/// Returns (levels, eccentricity = number of levels − 1).
fn bfs_levels(adj: &[Vec<usize>], start: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut levels = Vec::new();
    let mut frontier = vec![start];
    seen[start] = true;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        levels.push(frontier);
        frontier = next;
    }
    levels
}

/// Double-sweep heuristic for a pseudo-peripheral vertex: repeatedly jump to
/// a minimum-degree vertex of the farthest level while the eccentricity keeps
/// growing. Ties break toward the lowest index so orderings are reproducible.
fn pseudo_peripheral(adj: &[Vec<usize>], start: usize) -> usize {
    let mut v = start;
    let mut levels = bfs_levels(adj, v);
    loop {
        let last = levels.last().expect("bfs visits at least the start");
        let mut candidate = last[0];
        for &u in last {
            let better = adj[u].len() < adj[candidate].len()
                || (adj[u].len() == adj[candidate].len() && u < candidate);
            if better {
                candidate = u;
            }
        }
        let cand_levels = bfs_levels(adj, candidate);
        if cand_levels.len() > levels.len() {
            v = candidate;
            levels = cand_levels;
        } else {
            return v;
        }
    }
}

/// Reverse Cuthill–McKee ordering of the symmetrized pattern of `a`.
///
/// Each connected component is traversed breadth-first from a
/// pseudo-peripheral vertex, neighbors visited in increasing-degree order
/// (ties by index), components taken in order of their lowest-index vertex;
/// the concatenated order is then reversed.
pub fn rcm_ordering(a: &CsrMatrix) -> Permutation {
    let d = a.dim();
    let adj = adjacency(a);
    let mut visited = vec![false; d];
    let mut order = Vec::with_capacity(d);
    for root in 0..d {
        if visited[root] {
            continue;
        }
        let start = pseudo_peripheral(&adj, root);
        let mut queue = VecDeque::new();
        queue.push_back(start);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (adj[w].len(), w));
            for w in nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    Permutation::from_vec(order).expect("bfs covers every vertex exactly once")
}
