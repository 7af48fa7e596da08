//! The node-split auxiliary flow network, exact max-flow/min-cut, the
//! conversion to a demand flow on the doubled digraph, confluent rounding,
//! and the tame-cloud-or-skewed-separation pipeline.
//!
//! All capacities are rationals scaled to integers by `p·k·den(s)` (with
//! ε = p/q in lowest terms), so augmenting-path max flow terminates with an
//! integral flow and every comparison is exact. Unscaled quantities are
//! exposed as rationals.

use crate::cloud::{check_cloud, check_skewed, CheckMode, CloudParams, WCloud};
use crate::error::{Error, Result};
use crate::graph::{check_separation, Digraph, Graph, Separation, VertexSet};
use crate::rational::{format_rat, rat_int, Rat};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

/// Role of an arc in the auxiliary network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    /// b → v_in, capacity 1 (scaled).
    Source,
    /// v_in → v_out, capacity s/(εk) (scaled).
    Internal,
    /// u_out → v_in for an edge uv, unbounded.
    EdgeHop,
    /// w_out → a for a terminal w, unbounded.
    Terminal,
}

/// A capacitated arc; `cap` is in scaled units, and "infinite" capacities
/// carry the finite surrogate value stored in the network.
#[derive(Debug, Clone, Copy)]
pub struct Arc {
    pub from: u32,
    pub to: u32,
    pub cap: i64,
    pub kind: ArcKind,
}

/// The auxiliary network over a host graph and terminal set.
///
/// Node ids: 0 is the source `b`, 1 the super-sink `a`, and vertex `v`
/// splits into `v_in = 2 + 2v` and `v_out = 3 + 2v` joined by one internal
/// arc.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    g0: Graph,
    terminals: VertexSet,
    params: CloudParams,
    arcs: Vec<Arc>,
    node_count: u32,
    scale: i64,
    inf: i64,
}

impl FlowNetwork {
    pub const SOURCE: u32 = 0;
    pub const SINK: u32 = 1;

    pub fn v_in(v: u32) -> u32 {
        2 + 2 * v
    }

    pub fn v_out(v: u32) -> u32 {
        3 + 2 * v
    }

    /// The original vertex behind a split node, and whether it is the
    /// out-copy.
    pub fn vertex_of(node: u32) -> Option<(u32, bool)> {
        (node >= 2).then(|| ((node - 2) / 2, node % 2 == 1))
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    /// The integer factor by which all capacities were multiplied.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// The finite stand-in for infinity: one more than the sum of all
    /// finite capacities, so it can never sit in a minimum cut.
    pub fn inf(&self) -> i64 {
        self.inf
    }

    pub fn graph(&self) -> &Graph {
        &self.g0
    }

    pub fn terminals(&self) -> &VertexSet {
        &self.terminals
    }

    pub fn params(&self) -> &CloudParams {
        &self.params
    }

    /// The scaled flow value at which the pipeline switches from the skewed
    /// branch to the cloud branch: 6s·scale = 6·num(s)·p·k.
    pub fn threshold_scaled(&self) -> i64 {
        6 * self.params.s().numer() * self.params.eps_p() * self.params.k() as i64
    }
}

/// Builds the node-split network: source arcs `b → v_in` of capacity 1 for
/// every vertex, internal arcs of capacity `s/(εk)`, unbounded hop arcs
/// both ways per host edge, and unbounded arcs `w_out → a` per terminal.
pub fn build_auxiliary_network(
    g0: &Graph,
    w: &VertexSet,
    params: &CloudParams,
) -> Result<FlowNetwork> {
    if w.is_empty() {
        return Err(Error::domain("terminal set must be nonempty"));
    }
    if params.k() != w.len() {
        return Err(Error::domain(format!(
            "params.k = {} does not match |W| = {}",
            params.k(),
            w.len()
        )));
    }
    for &t in w {
        if t >= g0.n() {
            return Err(Error::domain(format!("terminal {t} outside graph")));
        }
    }
    let n = g0.n() as i64;
    let s_num = *params.s().numer();
    let s_den = *params.s().denom();
    let scale = params.eps_p() * params.k() as i64 * s_den;
    let source_cap = scale; // capacity 1, scaled
    let internal_cap = s_num * params.eps_q(); // s/(εk), scaled
    let inf = n * source_cap + n * internal_cap + 1;
    let mut arcs = Vec::new();
    for v in g0.vertices() {
        arcs.push(Arc {
            from: FlowNetwork::SOURCE,
            to: FlowNetwork::v_in(v),
            cap: source_cap,
            kind: ArcKind::Source,
        });
    }
    for v in g0.vertices() {
        arcs.push(Arc {
            from: FlowNetwork::v_in(v),
            to: FlowNetwork::v_out(v),
            cap: internal_cap,
            kind: ArcKind::Internal,
        });
    }
    for (u, v) in g0.edges() {
        arcs.push(Arc {
            from: FlowNetwork::v_out(u),
            to: FlowNetwork::v_in(v),
            cap: inf,
            kind: ArcKind::EdgeHop,
        });
        arcs.push(Arc {
            from: FlowNetwork::v_out(v),
            to: FlowNetwork::v_in(u),
            cap: inf,
            kind: ArcKind::EdgeHop,
        });
    }
    for &t in w {
        arcs.push(Arc {
            from: FlowNetwork::v_out(t),
            to: FlowNetwork::SINK,
            cap: inf,
            kind: ArcKind::Terminal,
        });
    }
    Ok(FlowNetwork {
        g0: g0.clone(),
        terminals: w.clone(),
        params: *params,
        arcs,
        node_count: 2 + 2 * g0.n(),
        scale,
        inf,
    })
}

/// Flow values, per-vertex demands and the sink set, per the conservation
/// convention: `out(v) − in(v) = d(v)` at every vertex outside `sinks`.
#[derive(Debug, Clone)]
pub struct FlowAssignment {
    pub flow: BTreeMap<(u32, u32), Rat>,
    pub demand: BTreeMap<u32, Rat>,
    pub sinks: VertexSet,
}

impl FlowAssignment {
    pub fn total_demand(&self) -> Rat {
        self.demand.values().copied().sum()
    }

    pub fn flow_on(&self, u: u32, v: u32) -> Rat {
        self.flow.get(&(u, v)).copied().unwrap_or_else(Rat::zero)
    }

    pub fn demand_at(&self, v: u32) -> Rat {
        self.demand.get(&v).copied().unwrap_or_else(Rat::zero)
    }

    pub fn in_flow(&self, v: u32) -> Rat {
        self.flow
            .iter()
            .filter(|(&(_, to), _)| to == v)
            .map(|(_, &x)| x)
            .sum()
    }

    pub fn out_flow(&self, v: u32) -> Rat {
        self.flow
            .iter()
            .filter(|(&(from, _), _)| from == v)
            .map(|(_, &x)| x)
            .sum()
    }
}

/// First vertex where `out(v) − in(v) ≠ d(v)` outside the sink set, if any.
pub fn conservation_violation(d: &Digraph, f: &FlowAssignment) -> Option<u32> {
    (0..d.n())
        .filter(|v| !f.sinks.contains(v))
        .find(|&v| f.out_flow(v) - f.in_flow(v) != f.demand_at(v))
}

/// Maximum congestion `in(v) + d(v)` and a vertex attaining it.
pub fn congestion(d: &Digraph, f: &FlowAssignment) -> (Rat, Option<u32>) {
    let mut worst = Rat::zero();
    let mut at = None;
    for v in 0..d.n() {
        let c = f.in_flow(v) + f.demand_at(v);
        if at.is_none() || c > worst {
            worst = c;
            at = Some(v);
        }
    }
    (worst, at)
}

/// Confluence: at most one positive out-arc per vertex and no directed
/// cycle in the positive support.
pub fn is_confluent(d: &Digraph, f: &FlowAssignment) -> bool {
    let mut out_count = vec![0usize; d.n() as usize];
    for (&(u, _), &val) in &f.flow {
        if val > Rat::zero() {
            out_count[u as usize] += 1;
        }
    }
    if out_count.iter().any(|&c| c > 1) {
        return false;
    }
    // Cycle check on the positive support by repeated sink removal.
    let mut outdeg = vec![0usize; d.n() as usize];
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); d.n() as usize];
    for (&(u, v), &val) in &f.flow {
        if val > Rat::zero() {
            outdeg[u as usize] += 1;
            preds[v as usize].push(u);
        }
    }
    let mut stack: Vec<u32> = (0..d.n()).filter(|&v| outdeg[v as usize] == 0).collect();
    let mut removed = 0;
    while let Some(v) = stack.pop() {
        removed += 1;
        for &p in &preds[v as usize] {
            outdeg[p as usize] -= 1;
            if outdeg[p as usize] == 0 {
                stack.push(p);
            }
        }
    }
    removed == d.n()
}

/// Max-flow result on a network: per-arc scaled flows, a minimum cut, and
/// the shared value. The assignment view uses unscaled rationals with the
/// endpoints `b` and `a` exempt from conservation.
#[derive(Debug, Clone)]
pub struct NetworkFlowCut {
    pub arc_flows_scaled: Vec<i64>,
    pub cut: Vec<usize>,
    pub value_scaled: i64,
    pub value: Rat,
    pub assignment: FlowAssignment,
}

/// Edmonds–Karp max flow with the min cut read off residual reachability.
/// Exact integer arithmetic throughout; flow value equals cut capacity.
pub fn max_flow_min_cut(net: &FlowNetwork) -> NetworkFlowCut {
    let n = net.node_count as usize;
    let m = net.arcs.len();
    let mut flow = vec![0i64; m];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, a) in net.arcs.iter().enumerate() {
        adj[a.from as usize].push(i);
        adj[a.to as usize].push(i);
    }
    loop {
        // BFS in the residual graph.
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; n]; // (arc, forward)
        let mut seen = vec![false; n];
        seen[FlowNetwork::SOURCE as usize] = true;
        let mut queue = vec![FlowNetwork::SOURCE];
        let mut head = 0;
        'bfs: while head < queue.len() {
            let v = queue[head] as usize;
            head += 1;
            for &i in &adj[v] {
                let a = &net.arcs[i];
                let (next, forward) = if a.from as usize == v {
                    (a.to as usize, true)
                } else {
                    (a.from as usize, false)
                };
                let residual = if forward { a.cap - flow[i] } else { flow[i] };
                if residual > 0 && !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((i, forward));
                    if next == FlowNetwork::SINK as usize {
                        break 'bfs;
                    }
                    queue.push(next as u32);
                }
            }
        }
        if !seen[FlowNetwork::SINK as usize] {
            break;
        }
        // Bottleneck along the path, then augment.
        let mut bottleneck = i64::MAX;
        let mut v = FlowNetwork::SINK as usize;
        while v != FlowNetwork::SOURCE as usize {
            let (i, forward) = parent[v].expect("path exists");
            let a = &net.arcs[i];
            let residual = if forward { a.cap - flow[i] } else { flow[i] };
            bottleneck = bottleneck.min(residual);
            v = if forward { a.from as usize } else { a.to as usize };
        }
        let mut v = FlowNetwork::SINK as usize;
        while v != FlowNetwork::SOURCE as usize {
            let (i, forward) = parent[v].expect("path exists");
            if forward {
                flow[i] += bottleneck;
                v = net.arcs[i].from as usize;
            } else {
                flow[i] -= bottleneck;
                v = net.arcs[i].to as usize;
            }
        }
    }
    // Residual reachability gives the cut.
    let mut reach = vec![false; n];
    reach[FlowNetwork::SOURCE as usize] = true;
    let mut queue = vec![FlowNetwork::SOURCE];
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head] as usize;
        head += 1;
        for &i in &adj[v] {
            let a = &net.arcs[i];
            let (next, residual) = if a.from as usize == v {
                (a.to as usize, a.cap - flow[i])
            } else {
                (a.from as usize, flow[i])
            };
            if residual > 0 && !reach[next] {
                reach[next] = true;
                queue.push(next as u32);
            }
        }
    }
    let cut: Vec<usize> = net
        .arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| reach[a.from as usize] && !reach[a.to as usize])
        .map(|(i, _)| i)
        .collect();
    let value_scaled: i64 = net
        .arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| a.from == FlowNetwork::SOURCE)
        .map(|(i, _)| flow[i])
        .sum();
    debug_assert_eq!(
        value_scaled,
        cut.iter().map(|&i| net.arcs[i].cap).sum::<i64>(),
        "max-flow value must equal min-cut capacity"
    );
    let assignment = FlowAssignment {
        flow: net
            .arcs
            .iter()
            .enumerate()
            .filter(|&(i, _)| flow[i] > 0)
            .map(|(i, a)| ((a.from, a.to), Rat::new(flow[i], net.scale)))
            .collect(),
        demand: BTreeMap::new(),
        sinks: [FlowNetwork::SOURCE, FlowNetwork::SINK]
            .into_iter()
            .collect(),
    };
    NetworkFlowCut {
        arc_flows_scaled: flow,
        cut,
        value_scaled,
        value: Rat::new(value_scaled, net.scale),
        assignment,
    }
}

/// Reads the separation off a finite cut: `B` is everything whose in-copy
/// stays reachable from `b`, `A` everything whose out-copy does not.
/// Validity and `W ⊆ A` are replayed before returning.
pub fn cut_to_separation(net: &FlowNetwork, cut: &[usize]) -> Result<Separation> {
    for &i in cut {
        let arc = net
            .arcs
            .get(i)
            .ok_or_else(|| Error::domain(format!("cut refers to missing arc {i}")))?;
        if arc.cap >= net.inf {
            return Err(Error::contract("cut contains an unbounded arc"));
        }
    }
    let cut_set: BTreeSet<usize> = cut.iter().copied().collect();
    let n = net.node_count as usize;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, a) in net.arcs.iter().enumerate() {
        if !cut_set.contains(&i) {
            adj[a.from as usize].push(a.to);
        }
    }
    let mut reach = vec![false; n];
    reach[FlowNetwork::SOURCE as usize] = true;
    let mut stack = vec![FlowNetwork::SOURCE];
    while let Some(v) = stack.pop() {
        for &w in &adj[v as usize] {
            if !reach[w as usize] {
                reach[w as usize] = true;
                stack.push(w);
            }
        }
    }
    if reach[FlowNetwork::SINK as usize] {
        return Err(Error::contract(
            "cut does not separate the source from the sink",
        ));
    }
    let b_side: VertexSet = net
        .g0
        .vertices()
        .filter(|&v| reach[FlowNetwork::v_in(v) as usize])
        .collect();
    let a_side: VertexSet = net
        .g0
        .vertices()
        .filter(|&v| !reach[FlowNetwork::v_out(v) as usize])
        .collect();
    let sep = Separation::new(a_side, b_side);
    let rep = check_separation(&net.g0, &sep)?;
    if !rep.valid {
        return Err(Error::contract("cut-derived pair is not a separation"));
    }
    if !net.terminals.is_subset(&sep.a) {
        return Err(Error::contract(
            "cut-derived separation does not keep W inside A",
        ));
    }
    Ok(sep)
}

/// Converts a network flow into a demand flow on the doubled digraph.
///
/// The doubled digraph replaces each host edge by two opposite arcs and
/// drops arcs leaving terminals, making W the sink set. The network flow is
/// decomposed into source-to-sink paths (cycles are canceled and dropped);
/// each path contributes demand at its first vertex and is truncated at the
/// first terminal it meets, which zeroes all flow out of terminals while
/// preserving total demand and conservation at non-terminals.
pub fn flow_to_demand_flow(
    net: &FlowNetwork,
    nf: &NetworkFlowCut,
) -> Result<(Digraph, FlowAssignment)> {
    let g0 = &net.g0;
    let w = &net.terminals;
    let g2 = Digraph::new(
        g0.n(),
        g0.edges()
            .flat_map(|(u, v)| [(u, v), (v, u)])
            .filter(|&(u, _)| !w.contains(&u)),
    )?;
    let mut residual: Vec<i64> = nf.arc_flows_scaled.clone();
    if residual.len() != net.arcs.len() {
        return Err(Error::domain("flow does not match the network"));
    }
    let n = net.node_count as usize;
    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, a) in net.arcs.iter().enumerate() {
        out_arcs[a.from as usize].push(i);
    }
    let mut demand_scaled: BTreeMap<u32, i64> = BTreeMap::new();
    let mut flow_scaled: BTreeMap<(u32, u32), i64> = BTreeMap::new();
    // Extract b→a paths one at a time, canceling any cycle encountered.
    loop {
        let Some(&first) = out_arcs[FlowNetwork::SOURCE as usize]
            .iter()
            .find(|&&i| residual[i] > 0)
        else {
            break;
        };
        let mut path_arcs: Vec<usize> = vec![first];
        let mut nodes: Vec<u32> = vec![FlowNetwork::SOURCE, net.arcs[first].to];
        loop {
            let cur = *nodes.last().expect("path nonempty");
            if cur == FlowNetwork::SINK {
                break;
            }
            let next_arc = *out_arcs[cur as usize]
                .iter()
                .find(|&&i| residual[i] > 0)
                .expect("conservation guarantees an onward arc");
            let next = net.arcs[next_arc].to;
            if let Some(pos) = nodes.iter().position(|&x| x == next) {
                // Cancel the cycle nodes[pos..] + next_arc and rewind.
                let cycle: Vec<usize> = path_arcs[pos..].iter().copied().chain([next_arc]).collect();
                let slack = cycle
                    .iter()
                    .map(|&i| residual[i])
                    .min()
                    .expect("cycle nonempty");
                for i in cycle {
                    residual[i] -= slack;
                }
                nodes.truncate(pos + 1);
                path_arcs.truncate(pos);
                if nodes.len() == 1 {
                    // The whole path collapsed; restart from b.
                    break;
                }
                continue;
            }
            path_arcs.push(next_arc);
            nodes.push(next);
        }
        if nodes.len() == 1 {
            continue;
        }
        let slack = path_arcs
            .iter()
            .map(|&i| residual[i])
            .min()
            .expect("path nonempty");
        for &i in &path_arcs {
            residual[i] -= slack;
        }
        // Node sequence is b, v1_in, v1_out, v2_in, ..., a. Record demand at
        // v1 and hop arcs up to the first terminal.
        let verts: Vec<u32> = nodes[1..nodes.len() - 1]
            .iter()
            .step_by(2)
            .map(|&node| FlowNetwork::vertex_of(node).expect("split node").0)
            .collect();
        *demand_scaled.entry(verts[0]).or_insert(0) += slack;
        for pair in verts.windows(2) {
            if w.contains(&pair[0]) {
                break;
            }
            *flow_scaled.entry((pair[0], pair[1])).or_insert(0) += slack;
        }
    }
    let assignment = FlowAssignment {
        flow: flow_scaled
            .into_iter()
            .filter(|&(_, v)| v > 0)
            .map(|(k, v)| (k, Rat::new(v, net.scale)))
            .collect(),
        demand: demand_scaled
            .into_iter()
            .filter(|&(_, v)| v > 0)
            .map(|(k, v)| (k, Rat::new(v, net.scale)))
            .collect(),
        sinks: w.clone(),
    };
    if let Some(v) = conservation_violation(&g2, &assignment) {
        return Err(Error::contract(format!(
            "converted flow violates conservation at vertex {v}"
        )));
    }
    Ok((g2, assignment))
}

/// Forest routing state used by the rounding passes: each routed vertex has
/// one chosen out-arc, and `through` tracks committed flow.
struct Forest {
    next: BTreeMap<u32, u32>,
    children: BTreeMap<u32, Vec<u32>>,
    roots: VertexSet,
}

impl Forest {
    fn path_to_root(&self, mut v: u32) -> Vec<u32> {
        let mut path = vec![v];
        while let Some(&u) = self.next.get(&v) {
            path.push(u);
            v = u;
        }
        path
    }
}

/// Greedy forest construction. Frontier vertices (those with an arc into
/// the routed region) are merged one at a time: by default the vertex whose
/// best attachment has the least remaining path slack goes first, with
/// demand beyond the slack sacrificed.
fn grow_forest(
    g2: &Digraph,
    f: &FlowAssignment,
    c: Rat,
    prefer_high_demand: bool,
) -> (Forest, BTreeMap<u32, Rat>) {
    let mut forest = Forest {
        next: BTreeMap::new(),
        children: BTreeMap::new(),
        roots: f.sinks.clone(),
    };
    let mut through: BTreeMap<u32, Rat> = BTreeMap::new();
    let mut d2: BTreeMap<u32, Rat> = BTreeMap::new();
    let mut routed: VertexSet = f.sinks.clone();
    for &t in &f.sinks {
        let dt = f.demand_at(t);
        through.insert(t, dt);
        if dt > Rat::zero() {
            d2.insert(t, dt);
        }
    }
    let slack_via = |through: &BTreeMap<u32, Rat>, forest: &Forest, u: u32| -> Rat {
        forest
            .path_to_root(u)
            .into_iter()
            .map(|z| c - through.get(&z).copied().unwrap_or_else(Rat::zero))
            .min()
            .expect("path nonempty")
    };
    loop {
        // Gather frontier candidates: (vertex, best arc target, best slack).
        let mut frontier: Vec<(u32, u32, Rat)> = Vec::new();
        for v in 0..g2.n() {
            if routed.contains(&v) {
                continue;
            }
            let mut best: Option<(u32, Rat)> = None;
            for u in g2.out_neighbors(v) {
                if !routed.contains(&u) {
                    continue;
                }
                let s = slack_via(&through, &forest, u);
                if best.map_or(true, |(_, bs)| s > bs) {
                    best = Some((u, s));
                }
            }
            if let Some((u, s)) = best {
                frontier.push((v, u, s));
            }
        }
        if frontier.is_empty() {
            break;
        }
        let &(v, u, slack) = if prefer_high_demand {
            frontier
                .iter()
                .max_by(|a, b| {
                    let da = f.demand_at(a.0).min(a.2.max(Rat::zero()));
                    let db = f.demand_at(b.0).min(b.2.max(Rat::zero()));
                    da.cmp(&db).then(b.0.cmp(&a.0))
                })
                .expect("frontier nonempty")
        } else {
            frontier
                .iter()
                .min_by(|a, b| a.2.cmp(&b.2).then(a.0.cmp(&b.0)))
                .expect("frontier nonempty")
        };
        let take = f.demand_at(v).min(slack.max(Rat::zero()));
        forest.next.insert(v, u);
        forest.children.entry(u).or_default().push(v);
        routed.insert(v);
        if take > Rat::zero() {
            d2.insert(v, take);
        }
        through.insert(v, take);
        if take > Rat::zero() {
            for z in forest.path_to_root(u) {
                *through.entry(z).or_insert_with(Rat::zero) += take;
            }
        }
    }
    (forest, d2)
}

/// Leaf-to-root demand maximization on a fixed forest: every vertex takes
/// its full demand, and subtrees whose committed flow would exceed `c` shed
/// the excess (own demand first, then descendants). This greedy is optimal
/// for the fixed forest because the subtree constraints are laminar.
fn maximize_on_forest(
    f: &FlowAssignment,
    forest: &Forest,
    c: Rat,
) -> (BTreeMap<u32, Rat>, BTreeMap<u32, Rat>) {
    fn reduce(d2: &mut BTreeMap<u32, Rat>, forest: &Forest, v: u32, mut excess: Rat) -> Rat {
        if let Some(own) = d2.get_mut(&v) {
            let cut = (*own).min(excess);
            *own -= cut;
            excess -= cut;
        }
        if excess > Rat::zero() {
            if let Some(kids) = forest.children.get(&v) {
                for &k in kids {
                    if excess == Rat::zero() {
                        break;
                    }
                    excess = reduce(d2, forest, k, excess);
                }
            }
        }
        excess
    }
    fn fill(
        f: &FlowAssignment,
        forest: &Forest,
        c: Rat,
        v: u32,
        d2: &mut BTreeMap<u32, Rat>,
        through: &mut BTreeMap<u32, Rat>,
    ) -> Rat {
        let own = f.demand_at(v);
        if own > Rat::zero() {
            d2.insert(v, own);
        }
        let mut total = own;
        if let Some(kids) = forest.children.get(&v).cloned() {
            for k in kids {
                total += fill(f, forest, c, k, d2, through);
            }
        }
        if total > c {
            let left = reduce(d2, forest, v, total - c);
            debug_assert!(left == Rat::zero(), "subtree demand covers the excess");
            total = c;
        }
        through.insert(v, total);
        total
    }
    let mut d2 = BTreeMap::new();
    let mut through = BTreeMap::new();
    for &root in &forest.roots {
        fill(f, forest, c, root, &mut d2, &mut through);
    }
    d2.retain(|_, v| *v > Rat::zero());
    (d2, through)
}

/// Assembles the confluent assignment from a forest and its demands: the
/// flow on the chosen arc of `v` is the total demand of v's subtree.
fn forest_to_assignment(
    f: &FlowAssignment,
    forest: &Forest,
    d2: &BTreeMap<u32, Rat>,
) -> FlowAssignment {
    fn subtree_total(forest: &Forest, d2: &BTreeMap<u32, Rat>, v: u32) -> Rat {
        let own = d2.get(&v).copied().unwrap_or_else(Rat::zero);
        let kids = forest
            .children
            .get(&v)
            .map(|ks| {
                ks.iter()
                    .map(|&k| subtree_total(forest, d2, k))
                    .sum::<Rat>()
            })
            .unwrap_or_else(Rat::zero);
        own + kids
    }
    let mut flow = BTreeMap::new();
    for (&v, &u) in &forest.next {
        let t = subtree_total(forest, d2, v);
        if t > Rat::zero() {
            flow.insert((v, u), t);
        }
    }
    FlowAssignment {
        flow,
        demand: d2.clone(),
        sinks: f.sinks.clone(),
    }
}

/// Exhaustive search over out-arc choice functions, used as a fallback on
/// small supports. Stops as soon as some choice routes at least `target`.
fn exhaustive_confluent(
    g2: &Digraph,
    f: &FlowAssignment,
    c: Rat,
    target: Rat,
    budget: u64,
) -> Option<FlowAssignment> {
    let vertices: Vec<u32> = (0..g2.n()).filter(|v| !f.sinks.contains(v)).collect();
    let choices: Vec<Vec<Option<u32>>> = vertices
        .iter()
        .map(|&v| {
            let mut c: Vec<Option<u32>> = g2.out_neighbors(v).map(Some).collect();
            c.push(None);
            c
        })
        .collect();
    let mut size: u64 = 1;
    for c in &choices {
        size = size.saturating_mul(c.len() as u64);
        if size > budget {
            return None;
        }
    }
    let mut pick = vec![0usize; vertices.len()];
    loop {
        // Build the candidate forest, rejecting cyclic choices.
        let mut next: BTreeMap<u32, u32> = BTreeMap::new();
        for (i, &v) in vertices.iter().enumerate() {
            if let Some(u) = choices[i][pick[i]] {
                next.insert(v, u);
            }
        }
        let mut acyclic = true;
        for &v in &vertices {
            let mut seen = BTreeSet::new();
            let mut cur = v;
            while let Some(&nxt) = next.get(&cur) {
                if !seen.insert(cur) {
                    acyclic = false;
                    break;
                }
                cur = nxt;
            }
            if !acyclic {
                break;
            }
        }
        if acyclic {
            // Drop chains that never reach a sink; they cannot route demand.
            let mut pruned = next.clone();
            pruned.retain(|&v, _| {
                let mut cur = v;
                while let Some(&nxt) = next.get(&cur) {
                    cur = nxt;
                }
                f.sinks.contains(&cur)
            });
            let mut children: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
            for (&v, &u) in &pruned {
                children.entry(u).or_default().push(v);
            }
            let forest = Forest {
                next: pruned,
                children,
                roots: f.sinks.clone(),
            };
            let (d2, _) = maximize_on_forest(f, &forest, c);
            let total: Rat = d2.values().copied().sum();
            if total >= target {
                return Some(forest_to_assignment(f, &forest, &d2));
            }
        }
        // Odometer.
        let mut i = 0;
        loop {
            if i == pick.len() {
                return None;
            }
            pick[i] += 1;
            if pick[i] == choices[i].len() {
                pick[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// Rounds a flow to a confluent one with no congestion increase, keeping at
/// least a third of the total demand.
///
/// The input must have congestion at most `c` (checked, with a witness
/// vertex on failure). Already-confluent flows pass through unchanged.
/// Otherwise sink trees are grown greedily over all arcs of `g2`, demands
/// are re-maximized leaf-to-root on the chosen forest, and the demand
/// contract is verified before returning; small instances fall back to an
/// exhaustive search over out-arc choices when the greedy passes miss it.
pub fn confluent_round(g2: &Digraph, f: &FlowAssignment, c: Rat) -> Result<FlowAssignment> {
    if let Some(v) = conservation_violation(g2, f) {
        return Err(Error::domain(format!(
            "input flow violates conservation at vertex {v}"
        )));
    }
    if f.flow.values().any(|&x| x < Rat::zero()) || f.demand.values().any(|&x| x < Rat::zero()) {
        return Err(Error::domain("flows and demands must be nonnegative"));
    }
    let (worst, at) = congestion(g2, f);
    if worst > c {
        return Err(Error::contract(format!(
            "congestion {} exceeds the bound {} at vertex {:?}",
            format_rat(worst),
            format_rat(c),
            at
        )));
    }
    if is_confluent(g2, f) {
        return Ok(f.clone());
    }
    let target = f.total_demand() / rat_int(3);
    let mut best: Option<FlowAssignment> = None;
    for prefer_high_demand in [false, true] {
        let (forest, _) = grow_forest(g2, f, c, prefer_high_demand);
        let (d2, _) = maximize_on_forest(f, &forest, c);
        let cand = forest_to_assignment(f, &forest, &d2);
        if best
            .as_ref()
            .map_or(true, |b| cand.total_demand() > b.total_demand())
        {
            best = Some(cand);
        }
    }
    let mut best = best.expect("at least one greedy pass ran");
    if best.total_demand() < target {
        match exhaustive_confluent(g2, f, c, target, 4_000_000) {
            Some(found) => best = found,
            None => {
                return Err(Error::contract(format!(
                    "confluent rounding kept {} of demand {}, below the one-third contract",
                    format_rat(best.total_demand()),
                    format_rat(f.total_demand()),
                )))
            }
        }
    }
    // Replay the whole contract.
    let (w2, _) = congestion(g2, &best);
    if w2 > c
        || !is_confluent(g2, &best)
        || conservation_violation(g2, &best).is_some()
        || best.total_demand() < target
        || best.demand.iter().any(|(v, &x)| x > f.demand_at(*v))
    {
        return Err(Error::contract("rounded flow failed contract replay"));
    }
    Ok(best)
}

/// Reads the W-cloud off a confluent flow: the undirected support plus an
/// isolated vertex for every terminal with no incoming flow.
pub fn support_to_cloud(g0: &Graph, w: &VertexSet, f2: &FlowAssignment) -> Result<WCloud> {
    let edges = f2
        .flow
        .iter()
        .filter(|(_, &v)| v > Rat::zero())
        .map(|(&(u, v), _)| (u, v));
    WCloud::from_forest(g0.clone(), w.clone(), edges)
        .map_err(|e| Error::contract(format!("confluent support is not a W-cloud: {e}")))
}

/// Pipeline outcome: a verified tame cloud or a verified skewed separation.
#[derive(Debug, Clone)]
pub enum CloudOrSeparation {
    Tame(WCloud),
    Skewed(Separation),
}

/// Intermediate quantities of one pipeline run, for audits.
#[derive(Debug, Clone, Default)]
pub struct PipelineTrace {
    pub used_shortcut: bool,
    pub scale: Option<i64>,
    pub flow_value_scaled: Option<i64>,
    pub threshold_scaled: Option<i64>,
    pub congestion_bound: Option<Rat>,
    pub demand_flow: Option<(Digraph, FlowAssignment)>,
    pub rounded: Option<FlowAssignment>,
}

/// The cloud-or-skewed-separation dichotomy.
///
/// When `s ≤ (1−ε)k` the isolated terminals already form a tame cloud.
/// Otherwise the minimum cut of the auxiliary network yields a separation;
/// if it is skewed it is returned (this branch is preferred when both
/// outcomes are available). A non-skewed separation forces the scaled flow
/// value to at least `6s·scale`, and the flow is converted, rounded
/// confluently (total demand at least `2s`), and read back as a cloud.
/// Both outcomes replay their checker before returning.
pub fn tame_cloud_or_skewed(
    g0: &Graph,
    w: &VertexSet,
    s: Rat,
    eps: Rat,
) -> Result<CloudOrSeparation> {
    tame_cloud_or_skewed_traced(g0, w, s, eps).map(|(out, _)| out)
}

/// As [`tame_cloud_or_skewed`], returning the intermediate flows.
pub fn tame_cloud_or_skewed_traced(
    g0: &Graph,
    w: &VertexSet,
    s: Rat,
    eps: Rat,
) -> Result<(CloudOrSeparation, PipelineTrace)> {
    if eps >= Rat::new(1, 2) {
        return Err(Error::domain(format!(
            "the dichotomy needs 0 < eps < 1/2, got {}",
            format_rat(eps)
        )));
    }
    let params = CloudParams::new(s, eps, w.len())?;
    let mut trace = PipelineTrace::default();
    let k = rat_int(w.len() as i64);
    if s <= (rat_int(1) - eps) * k {
        // Isolated terminals: n(H,U) = |U| ≥ (1−ε)k ≥ s for every
        // qualifying U.
        let cloud = WCloud::from_forest(g0.clone(), w.clone(), [])?;
        let rep = check_cloud(&cloud, &params, CheckMode::Tame)?;
        if rep.holds != Some(true) {
            return Err(Error::contract(
                "isolated-terminal cloud failed the tame check",
            ));
        }
        trace.used_shortcut = true;
        return Ok((CloudOrSeparation::Tame(cloud), trace));
    }
    let net = build_auxiliary_network(g0, w, &params)?;
    let nf = max_flow_min_cut(&net);
    trace.scale = Some(net.scale());
    trace.flow_value_scaled = Some(nf.value_scaled);
    trace.threshold_scaled = Some(net.threshold_scaled());
    let sep = cut_to_separation(&net, &nf.cut)?;
    if check_skewed(g0, &sep, w, s, eps)? {
        return Ok((CloudOrSeparation::Skewed(sep), trace));
    }
    if nf.value_scaled < net.threshold_scaled() {
        // A cut below 6s·scale costs at least |A∖B| + (s/εk)|A∩B|, which
        // forces the separation to be skewed; reaching this line is a bug.
        return Err(Error::contract(format!(
            "min cut {} is below the threshold {} yet the separation is not skewed",
            nf.value_scaled,
            net.threshold_scaled()
        )));
    }
    let (g2, f) = flow_to_demand_flow(&net, &nf)?;
    // c = s/(εk), the internal arc capacity in unscaled units.
    let c = s / (eps * k);
    trace.congestion_bound = Some(c);
    let f2 = confluent_round(&g2, &f, c)?;
    let cloud = support_to_cloud(g0, w, &f2)?;
    trace.demand_flow = Some((g2, f));
    trace.rounded = Some(f2);
    let rep = check_cloud(&cloud, &params, CheckMode::Tame)?;
    if rep.holds != Some(true) {
        return Err(Error::contract(format!(
            "pipeline cloud failed the tame check at U = {:?} (margin {})",
            rep.worst_u,
            rep.margin.map(format_rat).unwrap_or_default()
        )));
    }
    Ok((CloudOrSeparation::Tame(cloud), trace))
}
