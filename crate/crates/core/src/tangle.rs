//! g-separation enumeration, tangle axiom verification, and exact tangle
//! number on tiny graphs.
//!
//! The number of g-separations grows doubly exponentially, so everything
//! here sits behind hard size caps that fail with capability errors rather
//! than truncating silently.

use crate::error::{Error, Result};
use crate::graph::{Graph, GSeparation, Subgraph, VertexSet};
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Size caps for g-separation enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumLimits {
    pub max_n: u32,
    pub max_m: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_n: 7, max_m: 9 }
    }
}

impl EnumLimits {
    /// Caps wide enough for any graph on at most 7 vertices, including
    /// complete ones. Dense graphs have few valid vertex splits, so raising
    /// the edge cap is harmless there.
    pub fn tiny_dense() -> Self {
        EnumLimits {
            max_n: 7,
            max_m: 21,
        }
    }
}

/// One side of a g-separation in packed form: a vertex mask and a mask over
/// the host graph's edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SideMask {
    v: u32,
    e: u32,
}

/// Unordered g-separation pair in packed form.
#[derive(Debug, Clone, Copy)]
struct PairMask {
    a: SideMask,
    b: SideMask,
}

fn side_to_subgraph(side: SideMask, n: u32, edges: &[(u32, u32)]) -> Subgraph {
    let verts: VertexSet = (0..n).filter(|&v| side.v >> v & 1 == 1).collect();
    let es = edges
        .iter()
        .enumerate()
        .filter(|&(i, _)| side.e >> i & 1 == 1)
        .map(|(_, &e)| e);
    Subgraph::new(verts, es)
}

fn check_limits(g: &Graph, limits: &EnumLimits) -> Result<()> {
    if g.n() > limits.max_n || g.m() > limits.max_m {
        return Err(Error::capability(format!(
            "g-separation enumeration capped at n <= {}, m <= {} (got n = {}, m = {})",
            limits.max_n,
            limits.max_m,
            g.n(),
            g.m()
        )));
    }
    Ok(())
}

/// Enumerates every unordered g-separation pair of order at most
/// `max_order`, in packed form. Each unordered pair appears exactly once.
fn enumerate_masked(g: &Graph, max_order: usize) -> Vec<PairMask> {
    let n = g.n();
    let edges: Vec<(u32, u32)> = g.edges().collect();
    let adj: Vec<u32> = {
        let mut a = vec![0u32; n as usize];
        for &(u, v) in &edges {
            a[u as usize] |= 1 << v;
            a[v as usize] |= 1 << u;
        }
        a
    };
    let vfull: u32 = if n == 0 { 0 } else { (1 << n) - 1 };
    let mut out = Vec::new();
    // T = V(A) ∩ V(B); the rest splits into A-only / B-only with no edge
    // between the two private parts.
    for t_mask in 0..=vfull {
        if (t_mask.count_ones() as usize) > max_order {
            continue;
        }
        let rest = vfull & !t_mask;
        // Iterate PA over all submasks of rest (including 0 and rest).
        let mut pa = rest;
        loop {
            let pb = rest & !pa;
            let crossing = (0..n).any(|v| pa >> v & 1 == 1 && adj[v as usize] & pb != 0);
            if !crossing {
                // Classify edges: free edges live inside T, the others are
                // forced onto the side owning a private endpoint.
                let mut forced_a = 0u32;
                let mut forced_b = 0u32;
                let mut free = Vec::new();
                for (i, &(u, v)) in edges.iter().enumerate() {
                    let in_t = |w: u32| t_mask >> w & 1 == 1;
                    let in_pa = |w: u32| pa >> w & 1 == 1;
                    if in_t(u) && in_t(v) {
                        free.push(i);
                    } else if in_pa(u) || in_pa(v) {
                        forced_a |= 1 << i;
                    } else {
                        forced_b |= 1 << i;
                    }
                }
                let va = t_mask | pa;
                let vb = t_mask | pb;
                for assign in 0..1u32 << free.len() {
                    let mut ea = forced_a;
                    let mut eb = forced_b;
                    for (j, &i) in free.iter().enumerate() {
                        if assign >> j & 1 == 1 {
                            ea |= 1 << i;
                        } else {
                            eb |= 1 << i;
                        }
                    }
                    let a = SideMask { v: va, e: ea };
                    let b = SideMask { v: vb, e: eb };
                    // Emit each unordered pair once.
                    if (a.v, a.e) <= (b.v, b.e) {
                        out.push(PairMask { a, b });
                    }
                }
            }
            if pa == 0 {
                break;
            }
            pa = (pa - 1) & rest;
        }
    }
    out
}

/// All g-separations of order at most `max_order`, one canonical
/// representative per unordered pair, sorted by (order, A, B).
pub fn enumerate_g_separations(
    g: &Graph,
    max_order: usize,
    limits: &EnumLimits,
) -> Result<Vec<GSeparation>> {
    check_limits(g, limits)?;
    let edges: Vec<(u32, u32)> = g.edges().collect();
    let mut out: Vec<GSeparation> = enumerate_masked(g, max_order)
        .into_iter()
        .map(|p| {
            GSeparation::new(
                side_to_subgraph(p.a, g.n(), &edges),
                side_to_subgraph(p.b, g.n(), &edges),
            )
            .canonical()
        })
        .collect();
    out.sort_by(|x, y| (x.order(), &x.a, &x.b).cmp(&(y.order(), &y.a, &y.b)));
    Ok(out)
}

/// An orientation of every g-separation of order below `theta`.
#[derive(Debug, Clone)]
pub struct TangleCandidate {
    pub theta: usize,
    pub oriented: Vec<GSeparation>,
}

/// A concrete witness against one of the tangle axioms.
#[derive(Debug, Clone)]
pub enum TangleViolation {
    /// A g-separation of order < θ not covered by the candidate.
    Missing(GSeparation),
    /// An unordered pair oriented more than once.
    Duplicate(GSeparation),
    /// An oriented element that is not a g-separation of order < θ.
    Foreign(GSeparation),
    /// Indices into `oriented` whose A-sides union to the whole graph.
    TripleCover(usize, usize, usize),
    /// Index into `oriented` whose A-side spans all vertices.
    FullSide(usize),
}

/// Axiom-by-axiom verification report.
#[derive(Debug, Clone)]
pub struct TangleReport {
    pub axiom_i: bool,
    pub axiom_ii: bool,
    pub axiom_iii: bool,
    pub violations: Vec<TangleViolation>,
}

impl TangleReport {
    pub fn is_tangle(&self) -> bool {
        self.axiom_i && self.axiom_ii && self.axiom_iii
    }
}

fn subgraph_to_side(sub: &Subgraph, edges: &[(u32, u32)]) -> SideMask {
    let mut v = 0u32;
    for &w in &sub.verts {
        v |= 1 << w;
    }
    let mut e = 0u32;
    for (i, ed) in edges.iter().enumerate() {
        if sub.edges.contains(ed) {
            e |= 1 << i;
        }
    }
    SideMask { v, e }
}

/// Verifies the three tangle axioms for `t` against `g`.
///
/// Coverage problems (missing, duplicate or foreign pairs) are reported as
/// an axiom (i) failure, not an error. Axiom (ii) is checked over ordered
/// triples with repetition, the conservative reading.
pub fn verify_tangle(g: &Graph, t: &TangleCandidate, limits: &EnumLimits) -> Result<TangleReport> {
    check_limits(g, limits)?;
    if t.theta == 0 {
        return Err(Error::domain("tangle order must be at least 1"));
    }
    let edges: Vec<(u32, u32)> = g.edges().collect();
    let expected: BTreeSet<GSeparation> = enumerate_g_separations(g, t.theta - 1, limits)?
        .into_iter()
        .collect();
    let mut violations = Vec::new();

    // Axiom (i): exactly one orientation per expected pair.
    let mut seen: BTreeSet<GSeparation> = BTreeSet::new();
    for gs in &t.oriented {
        let canon = gs.canonical();
        if !expected.contains(&canon) {
            violations.push(TangleViolation::Foreign(gs.clone()));
        } else if !seen.insert(canon) {
            violations.push(TangleViolation::Duplicate(gs.clone()));
        }
    }
    for gs in &expected {
        if !seen.contains(gs) {
            violations.push(TangleViolation::Missing(gs.clone()));
        }
    }
    let axiom_i = seen.len() == expected.len()
        && !violations
            .iter()
            .any(|v| matches!(v, TangleViolation::Foreign(_) | TangleViolation::Duplicate(_)));

    // Axiom (iii): no A-side spans all vertices.
    let vfull: u32 = if g.n() == 0 { 0 } else { (1 << g.n()) - 1 };
    let efull: u32 = if edges.is_empty() {
        0
    } else {
        (1 << edges.len()) - 1
    };
    let sides: Vec<SideMask> = t
        .oriented
        .iter()
        .map(|gs| subgraph_to_side(&gs.a, &edges))
        .collect();
    let mut axiom_iii = true;
    for (i, s) in sides.iter().enumerate() {
        if s.v == vfull {
            axiom_iii = false;
            violations.push(TangleViolation::FullSide(i));
        }
    }

    // Axiom (ii): no three A-sides (repetition allowed) union to G. Checking
    // i <= j <= k covers repeated elements.
    let mut axiom_ii = true;
    'outer: for i in 0..sides.len() {
        for j in i..sides.len() {
            let v2 = sides[i].v | sides[j].v;
            let e2 = sides[i].e | sides[j].e;
            for k in j..sides.len() {
                if v2 | sides[k].v == vfull && e2 | sides[k].e == efull {
                    axiom_ii = false;
                    violations.push(TangleViolation::TripleCover(i, j, k));
                    break 'outer;
                }
            }
        }
    }

    Ok(TangleReport {
        axiom_i,
        axiom_ii,
        axiom_iii,
        violations,
    })
}

/// Backtracking orientation search; chosen A-sides accumulate in `chosen`.
fn orient_search(
    pairs: &[PairMask],
    vfull: u32,
    efull: u32,
    idx: usize,
    chosen: &mut Vec<SideMask>,
    flips: &mut Vec<bool>,
) -> bool {
    if idx == pairs.len() {
        return true;
    }
    'orient: for flip in [false, true] {
        let cand = if flip { pairs[idx].b } else { pairs[idx].a };
        // Axiom (iii).
        if cand.v == vfull {
            continue;
        }
        // Axiom (ii) incrementally: triples containing the new side.
        for (i, x) in chosen.iter().enumerate() {
            let v2 = cand.v | x.v;
            let e2 = cand.e | x.e;
            if v2 == vfull && e2 == efull {
                continue 'orient;
            }
            for y in &chosen[i..] {
                if v2 | y.v == vfull && e2 | y.e == efull {
                    continue 'orient;
                }
            }
        }
        chosen.push(cand);
        flips.push(flip);
        if orient_search(pairs, vfull, efull, idx + 1, chosen, flips) {
            return true;
        }
        chosen.pop();
        flips.pop();
    }
    false
}

/// Searches for a tangle of order exactly `theta`; returns its orientation
/// when one exists.
pub fn find_tangle(
    g: &Graph,
    theta: usize,
    limits: &EnumLimits,
) -> Result<Option<TangleCandidate>> {
    check_limits(g, limits)?;
    if theta == 0 {
        return Err(Error::domain("tangle order must be at least 1"));
    }
    let n = g.n();
    if n == 0 {
        // The empty graph's only g-separation has V(A) = V(G) = ∅ on both
        // sides, so axiom (iii) can never hold.
        return Ok(None);
    }
    let vfull: u32 = (1 << n) - 1;
    let m = g.m();
    let efull: u32 = if m == 0 { 0 } else { (1 << m) - 1 };
    let mut pairs = enumerate_masked(g, theta - 1);
    // Most constrained pairs first: both sides large conflicts earliest.
    pairs.sort_by_key(|p| {
        let small = p.a.v.count_ones().min(p.b.v.count_ones());
        let large = p.a.v.count_ones().max(p.b.v.count_ones());
        (core::cmp::Reverse(small), core::cmp::Reverse(large))
    });
    let mut chosen = Vec::with_capacity(pairs.len());
    let mut flips = Vec::with_capacity(pairs.len());
    if !orient_search(&pairs, vfull, efull, 0, &mut chosen, &mut flips) {
        return Ok(None);
    }
    let edges: Vec<(u32, u32)> = g.edges().collect();
    let oriented = pairs
        .iter()
        .zip(&flips)
        .map(|(p, &flip)| {
            let (a, b) = if flip { (p.b, p.a) } else { (p.a, p.b) };
            GSeparation::new(
                side_to_subgraph(a, n, &edges),
                side_to_subgraph(b, n, &edges),
            )
        })
        .collect();
    Ok(Some(TangleCandidate { theta, oriented }))
}

/// The largest θ for which `g` has a tangle of order θ; 0 when even order 1
/// is impossible. Tiny graphs only (n ≤ 7).
pub fn tangle_number_exact(g: &Graph) -> Result<usize> {
    if g.n() > 7 {
        return Err(Error::capability(format!(
            "tangle number is exact only up to n = 7 (got {})",
            g.n()
        )));
    }
    let limits = EnumLimits::tiny_dense();
    let mut tn = 0;
    // The pair (G, (V, ∅)) has order n and no orientation satisfying axiom
    // (iii), so no tangle of order > n exists and the loop terminates.
    for theta in 1..=(g.n() as usize + 1) {
        if find_tangle(g, theta, &limits)?.is_some() {
            tn = theta;
        } else {
            break;
        }
    }
    Ok(tn)
}
