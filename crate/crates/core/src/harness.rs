//! Graph family generators, exhaustive small-graph corpora, the
//! width-ratio experiment, and the step-wise proof auditors.
//!
//! The auditors certify the numeric skeleton of the treewidth-vs-separation
//! argument on concrete instances: constant arithmetic universally, and each
//! inequality as an implication evaluated with the instance's actual
//! numbers. They do not re-prove the theorem.

use crate::cloud::{check_cloud, CheckMode, CloudParams, WCloud};
use crate::error::{Error, Result};
use crate::graph::{
    check_separation, components, induced_subgraph, Graph, Separation, VertexSet,
};
use crate::rational::{format_rat, parse_rat, rat_int, Rat};
use crate::tangle::tangle_number_exact;
use crate::width::{separation_number_exact, treewidth_exact, ExactLimits, WidthResult};
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

/// SplitMix64: the 64-bit mixer used for every seeded construction, fixed
/// here so other implementations can reproduce instances bit-exactly.
/// state += 0x9E3779B97F4A7C15; z ^= z>>30; z *= 0xBF58476D1CE4E5B9;
/// z ^= z>>27; z *= 0x94D049BB133111EB; z ^= z>>31.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-enough draw in `0..n` by modulo; the tiny bias is irrelevant
    /// at desk scale and the exact semantics are part of the format.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// A deterministic graph family instance. The same (family, parameters,
/// seed) triple always generates the same graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Path { n: u32 },
    Cycle { n: u32 },
    Grid { rows: u32, cols: u32 },
    Complete { n: u32 },
    Tree { n: u32, seed: u64 },
    Gnp { n: u32, p: Rat, seed: u64 },
}

impl FamilySpec {
    /// Parses `path:N`, `cycle:N`, `grid:RxC`, `complete:N`, `tree:N`,
    /// `gnp:N:p/q`; the seed applies to the seeded families.
    pub fn parse(text: &str, seed: u64) -> Result<Self> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let bad = || Error::parse(format!("bad family spec {text:?}"));
        let int = |s: &str| s.parse::<u32>().map_err(|_| bad());
        match parts.as_slice() {
            ["path", n] => Ok(FamilySpec::Path { n: int(n)? }),
            ["cycle", n] => Ok(FamilySpec::Cycle { n: int(n)? }),
            ["grid", dims] => {
                let (r, c) = dims.split_once('x').ok_or_else(bad)?;
                Ok(FamilySpec::Grid {
                    rows: int(r)?,
                    cols: int(c)?,
                })
            }
            ["complete", n] => Ok(FamilySpec::Complete { n: int(n)? }),
            ["tree", n] => Ok(FamilySpec::Tree { n: int(n)?, seed }),
            ["gnp", n, p] => {
                let p = parse_rat(p)?;
                if p < Rat::zero() || p > rat_int(1) {
                    return Err(Error::domain("edge probability must lie in [0, 1]"));
                }
                Ok(FamilySpec::Gnp { n: int(n)?, p, seed })
            }
            _ => Err(bad()),
        }
    }

    /// Stable label used in report rows; seeded families carry their seed.
    pub fn label(&self) -> String {
        match self {
            FamilySpec::Path { n } => format!("path:{n}"),
            FamilySpec::Cycle { n } => format!("cycle:{n}"),
            FamilySpec::Grid { rows, cols } => format!("grid:{rows}x{cols}"),
            FamilySpec::Complete { n } => format!("complete:{n}"),
            FamilySpec::Tree { n, seed } => format!("tree:{n}#{seed}"),
            FamilySpec::Gnp { n, p, seed } => format!("gnp:{n}:{}#{seed}", format_rat(*p)),
        }
    }
}

/// Vertex cap for the generators. Exact analyses carry their own caps.
pub const GENERATOR_CAP: u32 = 512;

/// Generates the instance. Deterministic in the spec, including seeds:
/// trees attach vertex i to parent `below(i)`, and gnp includes edge (u,v)
/// (lexicographic order) iff `draw·q < p·2^64`.
pub fn generate(spec: &FamilySpec) -> Result<Graph> {
    let check = |n: u32| -> Result<u32> {
        if n > GENERATOR_CAP {
            Err(Error::capability(format!(
                "generator capped at {GENERATOR_CAP} vertices, got {n}"
            )))
        } else {
            Ok(n)
        }
    };
    match spec {
        FamilySpec::Path { n } => {
            let n = check(*n)?;
            Graph::new(n, (1..n).map(|v| (v - 1, v)))
        }
        FamilySpec::Cycle { n } => {
            let n = check(*n)?;
            if n < 3 {
                return Err(Error::domain("a cycle needs at least 3 vertices"));
            }
            Graph::new(n, (0..n).map(|v| (v, (v + 1) % n)))
        }
        FamilySpec::Grid { rows, cols } => {
            let n = check(rows.checked_mul(*cols).ok_or_else(|| Error::domain("grid too large"))?)?;
            let (rows, cols) = (*rows, *cols);
            let id = |r: u32, c: u32| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            Graph::new(n, edges)
        }
        FamilySpec::Complete { n } => {
            let n = check(*n)?;
            Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
        }
        FamilySpec::Tree { n, seed } => {
            let n = check(*n)?;
            let mut rng = SplitMix64::new(*seed);
            Graph::new(n, (1..n).map(|v| (rng.below(v as u64) as u32, v)))
        }
        FamilySpec::Gnp { n, p, seed } => {
            let n = check(*n)?;
            let mut rng = SplitMix64::new(*seed);
            let p_num = *p.numer() as u128;
            let p_den = *p.denom() as u128;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let draw = rng.next_u64() as u128;
                    if draw * p_den < p_num << 64 {
                        edges.push((u, v));
                    }
                }
            }
            Graph::new(n, edges)
        }
    }
}

/// Index of the pair (i, j), i < j, in the upper-triangle edge encoding.
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, arr: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(arr.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, arr, out);
            if k % 2 == 0 {
                arr.swap(i, k - 1);
            } else {
                arr.swap(0, k - 1);
            }
        }
    }
    let mut arr: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        heap(n, &mut arr, &mut out);
    }
    out
}

/// Minimum edge-code over all vertex relabelings: a canonical form for
/// isomorphism classes of graphs on up to 8 vertices.
fn canonical_code(n: usize, code: u32, perms: &[Vec<usize>]) -> u32 {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| code >> pair_index(n, i, j) & 1 == 1)
        .collect();
    let mut best = u32::MAX;
    for p in perms {
        let mut c = 0u32;
        for &(i, j) in &edges {
            let (a, b) = (p[i].min(p[j]), p[i].max(p[j]));
            c |= 1 << pair_index(n, a, b);
        }
        best = best.min(c);
    }
    best
}

fn graph_from_code(n: usize, code: u32) -> Graph {
    let edges = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| code >> pair_index(n, i, j) & 1 == 1)
        .map(|(i, j)| (i as u32, j as u32));
    Graph::new(n as u32, edges).expect("codes encode simple graphs")
}

/// Every isomorphism class of simple graphs on exactly `n ≤ 8` vertices,
/// one canonical representative each, built by extending the classes on
/// `n − 1` vertices with every possible neighborhood for the new vertex.
pub fn all_graphs_up_to_iso(n: u32) -> Result<Vec<Graph>> {
    if n > 8 {
        return Err(Error::capability(format!(
            "isomorphism-free enumeration capped at 8 vertices, got {n}"
        )));
    }
    let mut level: Vec<u32> = vec![0]; // the 1-vertex graph, n >= 1
    if n == 0 {
        return Ok(vec![Graph::edgeless(0)]);
    }
    for size in 2..=n as usize {
        let perms = all_permutations(size);
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        for &code in &level {
            // Re-embed the (size-1)-vertex code into size vertices: pair
            // indices change with n, so remap explicitly.
            for nb in 0..1u32 << (size - 1) {
                let mut new_code = 0u32;
                for i in 0..size - 1 {
                    for j in i + 1..size - 1 {
                        if code >> pair_index(size - 1, i, j) & 1 == 1 {
                            new_code |= 1 << pair_index(size, i, j);
                        }
                    }
                }
                for i in 0..size - 1 {
                    if nb >> i & 1 == 1 {
                        new_code |= 1 << pair_index(size, i, size - 1);
                    }
                }
                seen.insert(canonical_code(size, new_code, &perms));
            }
        }
        level = seen.into_iter().collect();
    }
    Ok(level.into_iter().map(|c| graph_from_code(n as usize, c)).collect())
}

/// Connected isomorphism classes on exactly `n` vertices.
pub fn connected_graphs_up_to_iso(n: u32) -> Result<Vec<Graph>> {
    Ok(all_graphs_up_to_iso(n)?
        .into_iter()
        .filter(|g| components(g).len() <= 1)
        .collect())
}

/// One row of the width-ratio experiment.
#[derive(Debug, Clone)]
pub struct ExperimentRow {
    pub spec: String,
    pub n: u32,
    pub m: usize,
    pub sn: Option<usize>,
    pub tw: Option<usize>,
    pub tn: Option<usize>,
    /// tw/sn as an exact rational, when both are known and sn ≥ 1.
    pub ratio: Option<Rat>,
    /// Capability errors are recorded here instead of being thrown.
    pub note: Option<String>,
}

/// The experiment table with the aggregate ratio and any inequality
/// breaches (a nonempty list is the headline finding).
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub max_ratio: Option<Rat>,
    pub violations: Vec<String>,
}

/// Runs the two width inequalities over the instance list: `sn ≤ tw + 1`
/// and `tw ≤ 105·sn`, in integers. Rows keep their input order; the tangle
/// number is included on tiny instances (n ≤ 6).
pub fn ratio_experiment(specs: &[FamilySpec], limits: &ExactLimits) -> ExperimentReport {
    let mut rows = Vec::new();
    let mut max_ratio: Option<Rat> = None;
    let mut violations = Vec::new();
    for spec in specs {
        let label = spec.label();
        let g = match generate(spec) {
            Ok(g) => g,
            Err(e) => {
                rows.push(ExperimentRow {
                    spec: label,
                    n: 0,
                    m: 0,
                    sn: None,
                    tw: None,
                    tn: None,
                    ratio: None,
                    note: Some(e.to_string()),
                });
                continue;
            }
        };
        let mut note = None;
        let sn = match separation_number_exact(&g, limits) {
            Ok(WidthResult { value, .. }) => Some(value),
            Err(e) => {
                note = Some(e.to_string());
                None
            }
        };
        let tw = match treewidth_exact(&g, limits) {
            Ok(WidthResult { value, .. }) => Some(value),
            Err(e) => {
                note = Some(e.to_string());
                None
            }
        };
        let tn = if g.n() <= 6 {
            tangle_number_exact(&g).ok()
        } else {
            None
        };
        let ratio = match (sn, tw) {
            (Some(sn), Some(tw)) if sn >= 1 => Some(Rat::new(tw as i64, sn as i64)),
            _ => None,
        };
        if let (Some(sn), Some(tw)) = (sn, tw) {
            if sn > tw + 1 {
                violations.push(format!("{label}: sn = {sn} exceeds tw + 1 = {}", tw + 1));
            }
            if tw > 105 * sn {
                violations.push(format!("{label}: tw = {tw} exceeds 105·sn = {}", 105 * sn));
            }
        }
        if let Some(r) = ratio {
            max_ratio = Some(match max_ratio {
                None => r,
                Some(m) => m.max(r),
            });
        }
        rows.push(ExperimentRow {
            spec: label,
            n: g.n(),
            m: g.m(),
            sn,
            tw,
            tn,
            ratio,
            note,
        });
    }
    ExperimentReport {
        rows,
        max_ratio,
        violations,
    }
}

/// One verified inequality of an audit.
#[derive(Debug, Clone)]
pub struct AuditStep {
    pub name: String,
    pub claim: String,
    /// Labeled quantities, every one an exact rational string.
    pub values: Vec<(String, String)>,
    pub pass: bool,
}

/// A sequence of audit steps; `overall` iff every step passes.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub steps: Vec<AuditStep>,
    pub overall: bool,
}

impl AuditReport {
    fn new() -> Self {
        AuditReport {
            steps: Vec::new(),
            overall: true,
        }
    }

    fn push(
        &mut self,
        name: &str,
        claim: &str,
        values: Vec<(String, String)>,
        pass: bool,
    ) {
        self.steps.push(AuditStep {
            name: name.to_string(),
            claim: claim.to_string(),
            values,
            pass,
        });
        self.overall &= pass;
    }
}

fn val(label: &str, r: Rat) -> (String, String) {
    (label.to_string(), format_rat(r))
}

/// Verifies the constant arithmetic of the final contradiction in exact
/// rationals: the (2/3)^8·19 ≤ 3/4 step, the geometric-sum bound, the
/// shrinking-step implication for |Y| ≥ 70a, and the terminal ratio
/// algebra whose bound is exactly 3/4 > 2/3.
pub fn audit_constants() -> AuditReport {
    let mut report = AuditReport::new();

    // Step (i): 19·(2/3)^8 ≤ 3/4, i.e. 19·256·4 ≤ 3·6561.
    let pow = Rat::new(2, 3).pow(8);
    let lhs = rat_int(19) * pow;
    let rhs = Rat::new(3, 4);
    report.push(
        "decay-beats-19",
        "19·(2/3)^8 ≤ 3/4",
        vec![
            val("(2/3)^8", pow),
            val("19·(2/3)^8", lhs),
            val("3/4", rhs),
            val("19·256·4", rat_int(19 * 256 * 4)),
            val("3·6561", rat_int(3 * 6561)),
        ],
        lhs <= rhs && 19 * 256 * 4 <= 3 * 6561,
    );

    // Step (ii): the additive terms sum below 3a: Σ_{i<8} (2/3)^i < 3.
    let partial: Rat = (0..8).map(|i| Rat::new(2, 3).pow(i)).sum();
    report.push(
        "geometric-sum",
        "Σ_{i<8} (2/3)^i · a < 3a for a ≥ 1",
        vec![val("partial sum", partial), val("bound", rat_int(3))],
        partial < rat_int(3),
    );

    // Step (iii): (3/4)|Y| + 3a < |Y| whenever |Y| ≥ 70a ≥ 70. Symbolically
    // 3a < |Y|/4 follows from |Y| ≥ 12a, and 70a ≥ 12a since 70 > 12;
    // checked on a sweep plus the boundary.
    let mut step_iii = rat_int(70) > rat_int(12);
    let mut values = vec![val("70", rat_int(70)), val("12", rat_int(12))];
    for a in 1..=5i64 {
        for extra in [0i64, 1, 13, 30] {
            let y = rat_int(70 * a + extra);
            let lhs = Rat::new(3, 4) * y + rat_int(3 * a);
            step_iii &= lhs < y;
            if a == 1 && extra == 0 {
                values.push(val("(3/4)·70 + 3  [a=1, |Y|=70]", lhs));
                values.push(val("|Y|", y));
            }
        }
    }
    report.push(
        "shrinking-step",
        "(3/4)|Y| + 3a < |Y| for all |Y| ≥ 70a, a ≥ 1",
        values,
        step_iii,
    );

    // Step (iv): |A| ≤ s/3 + h and |B∖A| ≥ s + 3h force
    // |B∖A|/(|A| + |B∖A|) ≥ 3/4 > 2/3; the bound is exactly 3/4.
    let mut step_iv = Rat::new(3, 4) > Rat::new(2, 3);
    let mut values = vec![val("3/4", Rat::new(3, 4)), val("2/3", Rat::new(2, 3))];
    for s in [Rat::new(1, 2), rat_int(1), rat_int(3), rat_int(7), Rat::new(19, 3)] {
        for h in [Rat::zero(), Rat::new(1, 2), rat_int(1), rat_int(4), rat_int(22)] {
            let ratio = final_ratio_bound(s, h);
            step_iv &= ratio >= Rat::new(3, 4);
            if s == rat_int(3) && h == Rat::zero() {
                values.push(val("ratio at s=3, h=0", ratio));
            }
        }
    }
    report.push(
        "terminal-ratio",
        "|A| ≤ s/3 + h ∧ |B∖A| ≥ s + 3h ⟹ |B∖A|/(|A|+|B∖A|) ≥ 3/4 > 2/3",
        values,
        step_iv,
    );

    report
}

/// The worst-case ratio (s + 3h) / ((s/3 + h) + (s + 3h)); identically 3/4.
pub fn final_ratio_bound(s: Rat, h: Rat) -> Rat {
    let big = s + rat_int(3) * h;
    big / (s / rat_int(3) + h + big)
}

/// Audits the separation refinement loop: starting from the separation
/// (X, Y), each round takes a minimum balanced separation (U1, U2) of
/// G[Yᵢ], requires its order to stay within `a` (a failure certifies that
/// the subgraph needs order > a, recorded rather than thrown), checks both
/// successor orders against |Xᵢ∩Yᵢ| + a, and asserts the shrink bound
/// 3|Yᵢ₊₁| ≤ 3a + 2|Yᵢ| in integers. The successor with the smaller new Y
/// is taken.
pub fn audit_refinement(
    g: &Graph,
    x: &VertexSet,
    y: &VertexSet,
    a: usize,
    rounds: usize,
) -> Result<AuditReport> {
    let rep = check_separation(g, &Separation::new(x.clone(), y.clone()))?;
    if !rep.valid {
        return Err(Error::domain("(X, Y) is not a separation of G"));
    }
    let mut report = AuditReport::new();
    let mut xi = x.clone();
    let mut yi = y.clone();
    for i in 0..rounds {
        let sub = induced_subgraph(g, &yi)?;
        let (order, local) = crate::width::min_balanced_separation(&sub.graph);
        let u1 = sub.lift(&local.a);
        let u2 = sub.lift(&local.b);
        let name = format!("round-{i}");
        if order > a {
            report.push(
                &name,
                "balanced separation of G[Yᵢ] has order ≤ a",
                vec![
                    val("|Yᵢ|", rat_int(yi.len() as i64)),
                    val("order", rat_int(order as i64)),
                    val("a", rat_int(a as i64)),
                ],
                false,
            );
            break;
        }
        let overlap = xi.intersection(&yi).count();
        let cand1: VertexSet = xi.union(&u1).copied().collect();
        let cand2: VertexSet = xi.union(&u2).copied().collect();
        let order1 = cand1.intersection(&u2).count();
        let order2 = cand2.intersection(&u1).count();
        let order_bound = overlap + a;
        // Both successors really are separations of G.
        let valid1 = check_separation(g, &Separation::new(cand1.clone(), u2.clone()))?.valid;
        let valid2 = check_separation(g, &Separation::new(cand2.clone(), u1.clone()))?.valid;
        // Successor with the smaller new Y; ties take U2.
        let (xn, yn, order_n) = if u1.len() < u2.len() {
            (cand2, u1.clone(), order2)
        } else {
            (cand1, u2.clone(), order1)
        };
        let shrink_ok = 3 * yn.len() <= 3 * a + 2 * yi.len();
        report.push(
            &name,
            "successors valid, orders ≤ |Xᵢ∩Yᵢ| + a, and 3|Yᵢ₊₁| ≤ 3a + 2|Yᵢ|",
            vec![
                val("|Yᵢ|", rat_int(yi.len() as i64)),
                val("|Yᵢ₊₁|", rat_int(yn.len() as i64)),
                val("separator order", rat_int(order as i64)),
                val("order(Xᵢ∪U1, U2)", rat_int(order1 as i64)),
                val("order(Xᵢ∪U2, U1)", rat_int(order2 as i64)),
                val("order bound", rat_int(order_bound as i64)),
                val("chosen successor order", rat_int(order_n as i64)),
            ],
            valid1
                && valid2
                && order1 <= order_bound
                && order2 <= order_bound
                && shrink_ok,
        );
        xi = xn;
        yi = yn;
    }
    Ok(report)
}

/// F = G[Y] ∪ H as a graph in the host's vertex ids.
fn union_graph(g: &Graph, y: &VertexSet, cloud: &WCloud) -> (Graph, Vec<u32>) {
    let mut verts: VertexSet = y.clone();
    verts.extend(cloud.cloud_vertices());
    let ids: Vec<u32> = verts.iter().copied().collect();
    let index = |v: u32| ids.binary_search(&v).expect("vertex present") as u32;
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (u, v) in g.edges() {
        if y.contains(&u) && y.contains(&v) {
            edges.insert((index(u), index(v)));
        }
    }
    for &(u, v) in cloud.forest_edges() {
        edges.insert((index(u), index(v)));
    }
    (
        Graph::new(ids.len() as u32, edges).expect("union of subgraphs is simple"),
        ids,
    )
}

/// Audits the terminal step of the argument on a concrete instance.
///
/// Requires the cloud on G[X] with terminals W = X∩Y to be strongly
/// (3|Y|, 1/35)-tame (contract error naming the violated U otherwise),
/// then takes a minimum-order balanced separation (A, B) of F = G[Y] ∪ H
/// and checks, with the instance's numbers: the structural containments
/// bounding the touched components H₀ and |A|, the strong-tameness
/// instantiation at U = W ∖ V(H₀) when |U| qualifies, the ratio bound
/// which is exactly 3/4 > 2/3, and finally the contradiction certificate:
/// no balanced separation of order ≤ a leaves any side with at most
/// a = |W|/70 terminals (verified exhaustively over small separators).
pub fn audit_final_step(
    g: &Graph,
    x: &VertexSet,
    y: &VertexSet,
    cloud: &WCloud,
) -> Result<AuditReport> {
    let rep = check_separation(g, &Separation::new(x.clone(), y.clone()))?;
    if !rep.valid {
        return Err(Error::domain("(X, Y) is not a separation of G"));
    }
    let w: VertexSet = x.intersection(y).copied().collect();
    if cloud.terminals() != &w {
        return Err(Error::domain("cloud terminals must equal X ∩ Y"));
    }
    if !cloud.cloud_vertices().is_subset(x) {
        return Err(Error::domain("cloud must live inside G[X]"));
    }
    let s = rat_int(3 * y.len() as i64);
    let a = Rat::new(w.len() as i64, 70);
    let eps5 = parse_rat("1/35").expect("constant");
    let params = CloudParams::new(s, eps5, w.len())?;
    let tame = check_cloud(cloud, &params, CheckMode::StronglyTame)?;
    if tame.holds != Some(true) {
        return Err(Error::contract(format!(
            "cloud is not strongly ({}, 1/35)-tame: violated at U = {:?}",
            format_rat(s),
            tame.worst_u
        )));
    }
    let mut report = AuditReport::new();
    report.push(
        "strong-tameness",
        "H is strongly (3|Y|, 1/35)-tame",
        vec![
            val("s = 3|Y|", s),
            val("margin", tame.margin.expect("valid cloud")),
        ],
        true,
    );

    let (f, ids) = union_graph(g, y, cloud);
    let (order, local) = crate::width::min_balanced_separation(&f);
    let lift = |set: &VertexSet| -> VertexSet {
        set.iter().map(|&v| ids[v as usize]).collect()
    };
    let a_side = lift(&local.a);
    let b_side = lift(&local.b);
    let f_rep = check_separation(&f, &local)?;
    report.push(
        "min-balanced-of-F",
        "a minimum-order balanced separation of F = G[Y] ∪ H exists",
        vec![
            val("|V(F)|", rat_int(f.n() as i64)),
            val("order", rat_int(order as i64)),
            val("|A|", rat_int(a_side.len() as i64)),
            val("|B∖A|", rat_int(b_side.difference(&a_side).count() as i64)),
        ],
        f_rep.balanced,
    );

    // H₀: components of H intersected by A.
    let overlap: VertexSet = a_side.intersection(&b_side).copied().collect();
    let touched: Vec<u32> = cloud
        .components()
        .iter()
        .filter(|(_, comp)| comp.iter().any(|v| a_side.contains(v)))
        .map(|(&t, _)| t)
        .collect();
    let touched_by_cut = touched
        .iter()
        .filter(|&&t| {
            cloud.component(t).expect("terminal").iter().any(|v| overlap.contains(v))
        })
        .count();
    report.push(
        "components-meeting-the-cut",
        "at most |A∩B| components of H meet A∩B",
        vec![
            val("count", rat_int(touched_by_cut as i64)),
            val("|A∩B|", rat_int(overlap.len() as i64)),
        ],
        touched_by_cut <= overlap.len(),
    );
    let private_terminals_in_a = touched
        .iter()
        .filter(|&&t| {
            let comp = cloud.component(t).expect("terminal");
            !comp.iter().any(|v| overlap.contains(v))
        })
        .all(|&t| a_side.contains(&t) && w.contains(&t));
    report.push(
        "components-swallowed-by-A",
        "components of H meeting A but not A∩B carry their terminal inside A∩X∩Y",
        vec![val("H₀ components", rat_int(touched.len() as i64))],
        private_terminals_in_a,
    );

    let h0_mass: usize = touched
        .iter()
        .map(|&t| cloud.component(t).expect("terminal").len())
        .sum();
    let h = rat_int(h0_mass as i64);
    let u: VertexSet = w
        .iter()
        .filter(|&&t| !touched.contains(&t))
        .copied()
        .collect();
    let qualifies =
        rat_int(u.len() as i64) >= (rat_int(1) - Rat::new(1, 35)) * rat_int(w.len() as i64);
    let mass_u = rat_int(cloud.mass(&u) as i64);
    report.push(
        "tameness-at-U",
        "|U| ≥ (1 − 1/35)|W| ⟹ n(H,U) ≥ s + 3|V(H₀)|",
        vec![
            val("|U|", rat_int(u.len() as i64)),
            val("(1 − 1/35)|W|", (rat_int(1) - Rat::new(1, 35)) * rat_int(w.len() as i64)),
            val("n(H,U)", mass_u),
            val("s + 3h", s + rat_int(3) * h),
        ],
        !qualifies || mass_u >= s + rat_int(3) * h,
    );
    report.push(
        "untouched-mass-in-B",
        "|B∖A| ≥ n(H,U)",
        vec![
            val("|B∖A|", rat_int(b_side.difference(&a_side).count() as i64)),
            val("n(H,U)", mass_u),
        ],
        rat_int(b_side.difference(&a_side).count() as i64) >= mass_u,
    );
    report.push(
        "A-stays-small",
        "|A| ≤ s/3 + |V(H₀)|",
        vec![
            val("|A|", rat_int(a_side.len() as i64)),
            val("s/3 + h", s / rat_int(3) + h),
        ],
        rat_int(a_side.len() as i64) <= s / rat_int(3) + h,
    );
    let bound = final_ratio_bound(s, h);
    report.push(
        "ratio-bound",
        "(s + 3h)/((s/3 + h) + (s + 3h)) ≥ 3/4 > 2/3",
        vec![val("bound", bound), val("h", h)],
        bound >= Rat::new(3, 4) && Rat::new(3, 4) > Rat::new(2, 3),
    );

    // Contradiction certificate: no balanced separation of order ≤ ⌊a⌋
    // leaves a side with at most `a` terminals. If one existed, the chain
    // above would force it to be unbalanced.
    let a_floor = (a.numer() / a.denom()) as usize;
    let w_local: VertexSet = w.iter().map(|&t| ids.binary_search(&t).expect("terminal in F") as u32).collect();
    let (none_found, examined) = no_small_balanced_separation_with_few_terminals(&f, &w_local, a_floor, a);
    report.push(
        "contradiction-certificate",
        "no balanced separation of F with order ≤ ⌊a⌋ keeps ≤ a terminals on a side",
        vec![
            val("a", a),
            val("separators examined", rat_int(examined as i64)),
        ],
        none_found,
    );
    Ok(report)
}

/// Exhaustively decides whether F has a balanced separation of order at
/// most `max_order` in which one side contains at most `a` terminals.
/// Returns (no such separation exists, separators examined).
fn no_small_balanced_separation_with_few_terminals(
    f: &Graph,
    w: &VertexSet,
    max_order: usize,
    a: Rat,
) -> (bool, usize) {
    let n = f.n() as usize;
    let verts: Vec<u32> = f.vertices().collect();
    let mut examined = 0;
    let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
    // Enumerate separator sets of size 0..=max_order.
    let mut separators: Vec<VertexSet> = Vec::new();
    while let Some(prefix) = stack.pop() {
        separators.push(prefix.iter().copied().collect());
        if prefix.len() < max_order {
            let start = prefix.last().map_or(0, |&v| v + 1);
            for &v in verts.iter().filter(|&&v| v >= start) {
                let mut nxt = prefix.clone();
                nxt.push(v);
                stack.push(nxt);
            }
        }
    }
    for sep_set in separators {
        examined += 1;
        let rest: VertexSet = f.vertices().filter(|v| !sep_set.contains(v)).collect();
        let sub = induced_subgraph(f, &rest).expect("subset of V");
        let comps = components(&sub.graph);
        let total: usize = rest.len();
        let w_in_sep = sep_set.intersection(w).count();
        let w_total = w.len();
        // For each component: (vertex count, terminal count).
        let pieces: Vec<(usize, usize)> = comps
            .iter()
            .map(|c| {
                let lifted = sub.lift(c);
                (lifted.len(), lifted.intersection(w).count())
            })
            .collect();
        // Reachable (side size, side terminal count) pairs.
        let mut dp = vec![false; (total + 1) * (w_total + 1)];
        dp[0] = true;
        for &(sz, wc) in &pieces {
            for size in (0..=total.saturating_sub(sz)).rev() {
                for wcount in (0..=w_total.saturating_sub(wc)).rev() {
                    if dp[size * (w_total + 1) + wcount] {
                        dp[(size + sz) * (w_total + 1) + (wcount + wc)] = true;
                    }
                }
            }
        }
        let cap2 = 2 * n;
        for size in 0..=total {
            for wcount in 0..=w_total.saturating_sub(w_in_sep) {
                if !dp[size * (w_total + 1) + wcount] {
                    continue;
                }
                if 3 * size > cap2 || 3 * (total - size) > cap2 {
                    continue;
                }
                // Separator terminals belong to both sides.
                let side1_terms = rat_int((wcount + w_in_sep) as i64);
                let side2_terms = rat_int((w_total - wcount) as i64);
                if side1_terms <= a || side2_terms <= a {
                    return (false, examined);
                }
            }
        }
    }
    (true, examined)
}
