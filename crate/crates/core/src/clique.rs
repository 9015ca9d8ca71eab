//! Maximal clique enumeration (Bron–Kerbosch with Tomita pivoting).
//!
//! Linked subfamilies of a family are the cliques of its intersection
//! graph, so both the binary-subbase check and the independent count of
//! maximal linked systems run on this.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

/// Calls `visit` with every maximal clique of the graph, vertices sorted
/// ascending. The visiting order is deterministic. `adj[v]` must not
/// contain `v`.
pub fn maximal_cliques<F>(adj: &[FixedBitSet], mut visit: F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let n = adj.len();
    let mut candidates = FixedBitSet::with_capacity(n);
    candidates.insert_range(..);
    let excluded = FixedBitSet::with_capacity(n);
    let mut clique = Vec::new();
    let mut sorted = Vec::new();
    expand(adj, &mut clique, candidates, excluded, &mut sorted, &mut visit)
}

fn expand<F>(
    adj: &[FixedBitSet],
    clique: &mut Vec<usize>,
    mut candidates: FixedBitSet,
    mut excluded: FixedBitSet,
    sorted: &mut Vec<usize>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if candidates.is_clear() {
        if excluded.is_clear() {
            sorted.clear();
            sorted.extend_from_slice(clique);
            sorted.sort_unstable();
            return visit(sorted);
        }
        return ControlFlow::Continue(());
    }
    let pivot = candidates
        .ones()
        .chain(excluded.ones())
        .max_by_key(|&u| (candidates.intersection_count(&adj[u]), std::cmp::Reverse(u)))
        .expect("candidates is nonempty");
    let mut branch = candidates.clone();
    branch.difference_with(&adj[pivot]);
    for v in branch.ones() {
        let mut next_candidates = candidates.clone();
        next_candidates.intersect_with(&adj[v]);
        let mut next_excluded = excluded.clone();
        next_excluded.intersect_with(&adj[v]);
        clique.push(v);
        expand(adj, clique, next_candidates, next_excluded, sorted, visit)?;
        clique.pop();
        candidates.remove(v);
        excluded.insert(v);
    }
    ControlFlow::Continue(())
}

/// Adjacency table from a symmetric predicate.
pub fn adjacency(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Vec<FixedBitSet> {
    let mut adj = vec![FixedBitSet::with_capacity(n); n];
    for i in 0..n {
        for j in i + 1..n {
            if edge(i, j) {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    adj
}
