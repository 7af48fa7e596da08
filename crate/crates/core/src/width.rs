//! Exact width parameters: minimum balanced-separation order, separation
//! number, treewidth; plus the min-fill upper-bound heuristic.
//!
//! Everything here is exhaustive search or subset dynamic programming, so
//! the exact routines carry hard vertex caps with capability errors.

use crate::error::{Error, Result};
use crate::graph::{components, induced_subgraph, Graph, Separation, VertexSet};
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Vertex caps for the exact routines. Both are configurable; the defaults
/// keep a full test sweep in the minutes range.
#[derive(Debug, Clone, Copy)]
pub struct ExactLimits {
    pub sn_max_n: u32,
    pub tw_max_n: u32,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            sn_max_n: 14,
            tw_max_n: 18,
        }
    }
}

impl ExactLimits {
    /// Same cap for both parameters, e.g. from an environment override.
    pub fn uniform(cap: u32) -> Self {
        ExactLimits {
            sn_max_n: cap,
            tw_max_n: cap,
        }
    }
}

/// Certificate attached to a width value.
#[derive(Debug, Clone)]
pub enum WidthWitness {
    /// Worst induced subgraph and a minimum balanced separation of it,
    /// both in parent-graph vertex ids.
    WorstSubset {
        subset: VertexSet,
        separation: Separation,
    },
    /// Elimination order; the width is the maximum degree at elimination.
    Elimination(Vec<u32>),
}

/// A width value, its certificate, and whether it is exact.
#[derive(Debug, Clone)]
pub struct WidthResult {
    pub value: usize,
    pub witness: WidthWitness,
    pub exact: bool,
}

/// Iterator over k-element index combinations of `0..n` in lexicographic
/// order. Drives every "separators of increasing size" search.
struct Combinations {
    n: usize,
    k: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            k,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        // Advance to the next combination.
        let mut i = self.k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] + 1 <= self.n - (self.k - i) {
                self.idx[i] += 1;
                for j in i + 1..self.k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Splits component sizes into two groups, each with `3·sum ≤ 2n`.
/// Returns the indices of the group assigned to the A side (the smallest
/// feasible A-side sum, for determinism), or None.
fn balanced_assignment(sizes: &[usize], n: usize) -> Option<Vec<usize>> {
    let total: usize = sizes.iter().sum();
    let cap2 = 2 * n;
    // reach[s] = Some(component index that last extended a partial sum to s).
    let mut reach: Vec<Option<usize>> = vec![None; total + 1];
    let mut reachable = vec![false; total + 1];
    reachable[0] = true;
    for (i, &c) in sizes.iter().enumerate() {
        for s in (0..=total.saturating_sub(c)).rev() {
            if reachable[s] && !reachable[s + c] {
                reachable[s + c] = true;
                reach[s + c] = Some(i);
            }
        }
    }
    let target = (0..=total).find(|&s| reachable[s] && 3 * s <= cap2 && 3 * (total - s) <= cap2)?;
    // Reconstruct which components make up the target sum.
    let mut group = Vec::new();
    let mut s = target;
    while s > 0 {
        let i = reach[s].expect("reachable sum has a generator");
        group.push(i);
        s -= sizes[i];
    }
    group.sort_unstable();
    Some(group)
}

/// Minimum-order balanced separation of `g`.
///
/// Enumerates candidate separator sets by increasing size; for each, the
/// components of `G − S` are assigned to the two sides by subset-sum
/// feasibility against the `2n/3` caps. The first feasible separator in
/// (size, lexicographic) order gives the witness, so results are
/// deterministic. `n = 0` returns `(0, (∅,∅))` by convention.
pub fn min_balanced_separation(g: &Graph) -> (usize, Separation) {
    let n = g.n() as usize;
    if n == 0 {
        return (0, Separation::new(VertexSet::new(), VertexSet::new()));
    }
    for k in 0..=n {
        for idx in Combinations::new(n, k) {
            let sep_set: VertexSet = idx.iter().map(|&i| i as u32).collect();
            let rest: VertexSet = g.vertices().filter(|v| !sep_set.contains(v)).collect();
            let sub = induced_subgraph(g, &rest).expect("rest is a subset of V");
            let comps = components(&sub.graph);
            let sizes: Vec<usize> = comps.iter().map(|c| c.len()).collect();
            if let Some(group_a) = balanced_assignment(&sizes, n) {
                let mut a = sep_set.clone();
                let mut b = sep_set;
                for (i, comp) in comps.iter().enumerate() {
                    let lifted = sub.lift(comp);
                    if group_a.binary_search(&i).is_ok() {
                        a.extend(lifted);
                    } else {
                        b.extend(lifted);
                    }
                }
                return (k, Separation::new(a, b));
            }
        }
    }
    unreachable!("S = V is always a balanced separator")
}

/// Mask-set components of `rem` under bitmask adjacency.
fn mask_components(adj: &[u64], mut rem: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while rem != 0 {
        let v = rem.trailing_zeros();
        let mut comp = 1u64 << v;
        loop {
            let mut grow = 0u64;
            let mut bits = comp;
            while bits != 0 {
                let w = bits.trailing_zeros();
                bits &= bits - 1;
                grow |= adj[w as usize];
            }
            grow &= rem & !comp;
            if grow == 0 {
                break;
            }
            comp |= grow;
        }
        out.push(comp);
        rem &= !comp;
    }
    out
}

/// True when the component sizes admit a two-sided assignment within the
/// balance caps (bitset subset-sum; sums stay <= 64 at desk scale).
fn balanced_feasible(sizes: &[u32], n: u32) -> bool {
    let total: u32 = sizes.iter().sum();
    let mut dp: u128 = 1;
    for &c in sizes {
        dp |= dp << c;
    }
    (0..=total).any(|s| dp >> s & 1 == 1 && 3 * s <= 2 * n && 3 * (total - s) <= 2 * n)
}

/// Minimum balanced-separation order of the induced subgraph on `verts`,
/// working entirely in parent-graph bitmasks.
fn min_balanced_order_mask(adj: &[u64], verts: u64) -> u32 {
    let sub_n = verts.count_ones();
    if sub_n == 0 {
        return 0;
    }
    let vertex_ids: Vec<u32> = (0..64).filter(|&v| verts >> v & 1 == 1).collect();
    for k in 0..=sub_n {
        for idx in Combinations::new(sub_n as usize, k as usize) {
            let mut sep_mask = 0u64;
            for &i in &idx {
                sep_mask |= 1 << vertex_ids[i];
            }
            let rem = verts & !sep_mask;
            let comps = mask_components(adj, rem);
            let sizes: Vec<u32> = comps.iter().map(|c| c.count_ones()).collect();
            if balanced_feasible(&sizes, sub_n) {
                return k;
            }
        }
    }
    unreachable!("separator = whole subset always works")
}

/// Exact separation number: the maximum over all induced subgraphs of the
/// minimum balanced-separation order.
///
/// Induced subgraphs suffice because deleting edges from `G[S]` can only
/// make separations easier: a balanced separation of `G[S]` stays valid and
/// balanced in every spanning subgraph. The all-subgraphs brute force in the
/// test suite pins this down.
pub fn separation_number_exact(g: &Graph, limits: &ExactLimits) -> Result<WidthResult> {
    if g.n() > limits.sn_max_n {
        return Err(Error::capability(format!(
            "separation number is exact only up to n = {} (got {}); use the heuristics",
            limits.sn_max_n,
            g.n()
        )));
    }
    let n = g.n();
    if n == 0 {
        return Ok(WidthResult {
            value: 0,
            witness: WidthWitness::WorstSubset {
                subset: VertexSet::new(),
                separation: Separation::new(VertexSet::new(), VertexSet::new()),
            },
            exact: true,
        });
    }
    let adj = g.adjacency_masks()?;
    let mut best = 0u32;
    let mut best_mask = 0u64;
    for mask in 0..1u64 << n {
        let order = min_balanced_order_mask(&adj, mask);
        if order > best {
            best = order;
            best_mask = mask;
        }
    }
    let subset: VertexSet = (0..n).filter(|&v| best_mask >> v & 1 == 1).collect();
    let sub = induced_subgraph(g, &subset)?;
    let (order, local_sep) = min_balanced_separation(&sub.graph);
    debug_assert_eq!(order as u32, best);
    let separation = Separation::new(sub.lift(&local_sep.a), sub.lift(&local_sep.b));
    Ok(WidthResult {
        value: best as usize,
        witness: WidthWitness::WorstSubset { subset, separation },
        exact: true,
    })
}

/// Number of vertices outside `x ∪ {v}` reachable from `v` by paths whose
/// internal vertices all lie in `x`: the degree of `v` when eliminated
/// after the set `x`.
fn fill_degree(adj: &[u64], x: u64, v: u32) -> u32 {
    let mut r = adj[v as usize];
    let mut processed = 0u64;
    loop {
        let pending = r & x & !processed;
        if pending == 0 {
            break;
        }
        processed |= pending;
        let mut bits = pending;
        while bits != 0 {
            let w = bits.trailing_zeros();
            bits &= bits - 1;
            r |= adj[w as usize];
        }
    }
    (r & !x & !(1 << v)).count_ones()
}

/// Exact treewidth via subset dynamic programming over elimination
/// orderings. Ties between orderings break toward the smallest vertex id,
/// so the witness is reproducible.
pub fn treewidth_exact(g: &Graph, limits: &ExactLimits) -> Result<WidthResult> {
    if g.n() > limits.tw_max_n {
        return Err(Error::capability(format!(
            "treewidth is exact only up to n = {} (got {}); use treewidth_upper_minfill",
            limits.tw_max_n,
            g.n()
        )));
    }
    let n = g.n() as usize;
    if n == 0 {
        return Ok(WidthResult {
            value: 0,
            witness: WidthWitness::Elimination(Vec::new()),
            exact: true,
        });
    }
    let adj = g.adjacency_masks()?;
    let full: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    let mut dp = vec![u8::MAX; 1 << n];
    let mut choice = vec![0u8; 1 << n];
    dp[0] = 0;
    for mask in 1..=full {
        let mut best = u8::MAX;
        let mut best_v = 0u8;
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros();
            bits &= bits - 1;
            let prev = mask & !(1 << v);
            let cand = dp[prev as usize].max(fill_degree(&adj, prev, v) as u8);
            if cand < best {
                best = cand;
                best_v = v as u8;
            }
        }
        dp[mask as usize] = best;
        choice[mask as usize] = best_v;
    }
    let value = dp[full as usize] as usize;
    // Unwind: choice[mask] is eliminated last within mask.
    let mut order = vec![0u32; n];
    let mut mask = full;
    for slot in (0..n).rev() {
        let v = choice[mask as usize] as u32;
        order[slot] = v;
        mask &= !(1 << v);
    }
    Ok(WidthResult {
        value,
        witness: WidthWitness::Elimination(order),
        exact: true,
    })
}

/// Width of an explicit elimination order: the maximum degree at
/// elimination while neighbors of each eliminated vertex are turned into a
/// clique. Used to certify elimination witnesses.
pub fn elimination_width(g: &Graph, order: &[u32]) -> Result<usize> {
    let n = g.n() as usize;
    if order.len() != n {
        return Err(Error::domain("elimination order must list every vertex once"));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v as usize >= n || seen[v as usize] {
            return Err(Error::domain("elimination order must list every vertex once"));
        }
        seen[v as usize] = true;
    }
    let mut nb: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for (u, v) in g.edges() {
        nb[u as usize].insert(v);
        nb[v as usize].insert(u);
    }
    let mut width = 0;
    for &v in order {
        let neighbors: Vec<u32> = nb[v as usize].iter().copied().collect();
        width = width.max(neighbors.len());
        for (i, &x) in neighbors.iter().enumerate() {
            nb[x as usize].remove(&v);
            for &y in &neighbors[i + 1..] {
                nb[x as usize].insert(y);
                nb[y as usize].insert(x);
            }
        }
        nb[v as usize].clear();
    }
    Ok(width)
}

/// Greedy min-fill elimination: an upper bound on treewidth with a
/// deterministic witness (ties break toward the smallest vertex id).
/// Exact on chordal graphs.
pub fn treewidth_upper_minfill(g: &Graph) -> WidthResult {
    let n = g.n() as usize;
    let mut nb: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for (u, v) in g.edges() {
        nb[u as usize].insert(v);
        nb[v as usize].insert(u);
    }
    let mut alive: BTreeSet<u32> = g.vertex_set();
    let mut order = Vec::with_capacity(n);
    let mut width = 0usize;
    while let Some(&pick) = {
        let mut best: Option<(usize, u32)> = None;
        for &v in &alive {
            let neighbors: Vec<u32> = nb[v as usize].iter().copied().collect();
            let mut fill = 0usize;
            for (i, &x) in neighbors.iter().enumerate() {
                for &y in &neighbors[i + 1..] {
                    if !nb[x as usize].contains(&y) {
                        fill += 1;
                    }
                }
            }
            if best.map_or(true, |(bf, bv)| fill < bf || (fill == bf && v < bv)) {
                best = Some((fill, v));
            }
        }
        best.map(|(_, v)| v).as_ref()
    } {
        alive.remove(&pick);
        let neighbors: Vec<u32> = nb[pick as usize].iter().copied().collect();
        width = width.max(neighbors.len());
        for (i, &x) in neighbors.iter().enumerate() {
            nb[x as usize].remove(&pick);
            for &y in &neighbors[i + 1..] {
                nb[x as usize].insert(y);
                nb[y as usize].insert(x);
            }
        }
        nb[pick as usize].clear();
        order.push(pick);
    }
    WidthResult {
        value: width,
        witness: WidthWitness::Elimination(order),
        exact: false,
    }
}
