//! W-clouds: forests with exactly one terminal per component, tameness in
//! both flavors, trimming to strong tameness, and skewed separations.

use crate::error::{Error, Result};
use crate::graph::{components, edge, Edge, Graph, Separation, VertexSet};
use crate::rational::{format_rat, is_proper_fraction, rat_int, Rat};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use num_traits::Zero;

/// Parameters shared by the tameness definitions and the flow pipeline:
/// a mass threshold `s > 0`, a terminal fraction `0 < ε < 1` kept as a
/// reduced rational, and the terminal count `k = |W| ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CloudParams {
    s: Rat,
    eps: Rat,
    k: usize,
}

impl CloudParams {
    pub fn new(s: Rat, eps: Rat, k: usize) -> Result<Self> {
        if s <= Rat::zero() {
            return Err(Error::domain(format!(
                "s must be positive, got {}",
                format_rat(s)
            )));
        }
        if !is_proper_fraction(eps) {
            return Err(Error::domain(format!(
                "eps must lie strictly between 0 and 1, got {}",
                format_rat(eps)
            )));
        }
        if k == 0 {
            return Err(Error::domain("terminal set must be nonempty"));
        }
        Ok(CloudParams { s, eps, k })
    }

    pub fn s(&self) -> Rat {
        self.s
    }

    pub fn eps(&self) -> Rat {
        self.eps
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Numerator p of ε = p/q in lowest terms.
    pub fn eps_p(&self) -> i64 {
        *self.eps.numer()
    }

    /// Denominator q of ε = p/q in lowest terms.
    pub fn eps_q(&self) -> i64 {
        *self.eps.denom()
    }

    /// ⌊ε·k⌋: the number of terminals a qualifying U may omit.
    pub fn max_dropped(&self) -> usize {
        let scaled = self.eps * rat_int(self.k as i64);
        (scaled.numer() / scaled.denom()) as usize
    }
}

/// A W-cloud: a forest inside a host graph in which every component
/// contains exactly one terminal of W.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WCloud {
    host: Graph,
    terminals: VertexSet,
    forest_edges: BTreeSet<Edge>,
    comp: BTreeMap<u32, VertexSet>,
}

impl WCloud {
    /// Builds a cloud from explicit forest edges. Terminals without any
    /// incident forest edge become isolated one-vertex components.
    pub fn from_forest(
        host: Graph,
        terminals: VertexSet,
        forest_edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        let forest_edges: BTreeSet<Edge> =
            forest_edges.into_iter().map(|(u, v)| edge(u, v)).collect();
        let mut verts: VertexSet = terminals.clone();
        for &(u, v) in &forest_edges {
            verts.insert(u);
            verts.insert(v);
        }
        let comp = split_into_components(&host, &terminals, &verts, &forest_edges)?;
        let cloud = WCloud {
            host,
            terminals,
            forest_edges,
            comp,
        };
        cloud.validate()?;
        Ok(cloud)
    }

    /// Builds a cloud from per-terminal vertex sets; each set must induce a
    /// connected subgraph of the host, and a breadth-first spanning tree
    /// from the terminal supplies the forest edges.
    pub fn from_components(host: Graph, comp: BTreeMap<u32, VertexSet>) -> Result<Self> {
        let mut forest_edges = BTreeSet::new();
        let adjacency = host.adjacency();
        for (&w, verts) in &comp {
            if !verts.contains(&w) {
                return Err(Error::domain(format!(
                    "terminal {w} missing from its component"
                )));
            }
            for &v in verts {
                if v >= host.n() {
                    return Err(Error::domain(format!("cloud vertex {v} outside host graph")));
                }
            }
            let mut seen: VertexSet = [w].into_iter().collect();
            let mut queue: Vec<u32> = alloc::vec![w];
            let mut head = 0;
            while head < queue.len() {
                let v = queue[head];
                head += 1;
                for &x in &adjacency[v as usize] {
                    if verts.contains(&x) && seen.insert(x) {
                        forest_edges.insert(edge(v, x));
                        queue.push(x);
                    }
                }
            }
            if seen != *verts {
                return Err(Error::domain(format!(
                    "component of terminal {w} is not connected in the host graph"
                )));
            }
        }
        let terminals: VertexSet = comp.keys().copied().collect();
        let cloud = WCloud {
            host,
            terminals,
            forest_edges,
            comp,
        };
        cloud.validate()?;
        Ok(cloud)
    }

    /// Replays every invariant: forest edges live in the host, H is acyclic,
    /// components are pairwise disjoint, each contains exactly one terminal,
    /// and the component map covers W and all of V(H).
    pub fn validate(&self) -> Result<()> {
        if self.terminals.is_empty() {
            return Err(Error::domain("cloud needs at least one terminal"));
        }
        for &(u, v) in &self.forest_edges {
            if !self.host.has_edge(u, v) {
                return Err(Error::domain(format!(
                    "forest edge ({u},{v}) not in host graph"
                )));
            }
        }
        let mut verts: VertexSet = self.terminals.clone();
        for &(u, v) in &self.forest_edges {
            verts.insert(u);
            verts.insert(v);
        }
        let recomputed =
            split_into_components(&self.host, &self.terminals, &verts, &self.forest_edges)?;
        if recomputed != self.comp {
            return Err(Error::domain("component map does not match the forest"));
        }
        Ok(())
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn terminals(&self) -> &VertexSet {
        &self.terminals
    }

    pub fn forest_edges(&self) -> &BTreeSet<Edge> {
        &self.forest_edges
    }

    pub fn component(&self, w: u32) -> Option<&VertexSet> {
        self.comp.get(&w)
    }

    pub fn components(&self) -> &BTreeMap<u32, VertexSet> {
        &self.comp
    }

    /// Total vertex count of H.
    pub fn size(&self) -> usize {
        self.comp.values().map(|c| c.len()).sum()
    }

    /// n(H, U): total vertex count of the components at terminals in `u`.
    pub fn mass(&self, u: &VertexSet) -> usize {
        u.iter()
            .filter_map(|w| self.comp.get(w))
            .map(|c| c.len())
            .sum()
    }

    /// All vertices of H.
    pub fn cloud_vertices(&self) -> VertexSet {
        self.comp.values().flatten().copied().collect()
    }
}

/// Splits the forest into components and assigns each to its unique
/// terminal. Fails when a component has no terminal or more than one, or
/// when the edge set has a cycle.
fn split_into_components(
    host: &Graph,
    terminals: &VertexSet,
    verts: &VertexSet,
    forest_edges: &BTreeSet<Edge>,
) -> Result<BTreeMap<u32, VertexSet>> {
    for &v in verts {
        if v >= host.n() {
            return Err(Error::domain(format!("cloud vertex {v} outside host graph")));
        }
    }
    let ids: Vec<u32> = verts.iter().copied().collect();
    let index: BTreeMap<u32, u32> = ids
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let local = Graph::new(
        ids.len() as u32,
        forest_edges.iter().map(|&(u, v)| (index[&u], index[&v])),
    )?;
    let mut comp = BTreeMap::new();
    for c in components(&local) {
        let lifted: VertexSet = c.iter().map(|&i| ids[i as usize]).collect();
        let edges_inside = forest_edges
            .iter()
            .filter(|&&(u, v)| lifted.contains(&u) && lifted.contains(&v))
            .count();
        if edges_inside != lifted.len() - 1 {
            return Err(Error::domain("cloud forest contains a cycle"));
        }
        let terms: Vec<u32> = lifted.intersection(terminals).copied().collect();
        match terms.as_slice() {
            [w] => {
                comp.insert(*w, lifted);
            }
            [] => {
                return Err(Error::domain(format!(
                    "cloud component {lifted:?} contains no terminal"
                )))
            }
            _ => {
                return Err(Error::domain(format!(
                    "cloud component {lifted:?} contains {} terminals",
                    terms.len()
                )))
            }
        }
    }
    Ok(comp)
}

/// Which tameness inequality to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// n(H,U) ≥ s for every qualifying U.
    Tame,
    /// n(H,U) ≥ s + 3·n(H, W∖U) for every qualifying U.
    StronglyTame,
}

/// Result of a tameness check.
#[derive(Debug, Clone)]
pub struct CloudCheckReport {
    pub valid_cloud: bool,
    /// None when the cloud itself is invalid.
    pub holds: Option<bool>,
    /// The minimizing U (qualifying subset with the least slack).
    pub worst_u: Option<VertexSet>,
    /// Slack of the defining inequality at `worst_u`; negative when violated.
    pub margin: Option<Rat>,
}

/// Checks the tameness inequality for every `U ⊆ W` with `|U| ≥ (1−ε)|W|`.
///
/// Both `n(H,U)` and `n(H,U) − 3·n(H,W∖U)` are minimized by removing the
/// ⌊ε·k⌋ largest components (component sizes are positive, so dropping more
/// mass only helps), which gives the closed form evaluated here. Size ties
/// break toward the smaller terminal id so `worst_u` is deterministic.
pub fn check_cloud(c: &WCloud, params: &CloudParams, mode: CheckMode) -> Result<CloudCheckReport> {
    if params.k != c.terminals.len() {
        return Err(Error::domain(format!(
            "params.k = {} but the cloud has {} terminals",
            params.k,
            c.terminals.len()
        )));
    }
    if c.validate().is_err() {
        return Ok(CloudCheckReport {
            valid_cloud: false,
            holds: None,
            worst_u: None,
            margin: None,
        });
    }
    // Sort by (size desc, terminal asc); drop the first ⌊εk⌋.
    let mut sized: Vec<(usize, u32)> = c.comp.iter().map(|(&w, cs)| (cs.len(), w)).collect();
    sized.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let drop = params.max_dropped().min(sized.len());
    let worst_u: VertexSet = sized[drop..].iter().map(|&(_, w)| w).collect();
    let kept_mass = c.mass(&worst_u) as i64;
    let dropped_mass = c.size() as i64 - kept_mass;
    let margin = match mode {
        CheckMode::Tame => rat_int(kept_mass) - params.s,
        CheckMode::StronglyTame => rat_int(kept_mass) - params.s - rat_int(3 * dropped_mass),
    };
    Ok(CloudCheckReport {
        valid_cloud: true,
        holds: Some(margin >= Rat::zero()),
        worst_u: Some(worst_u),
        margin: Some(margin),
    })
}

/// Tameness of a hypothetical cloud given only its component sizes; used to
/// test a leaf removal before performing it.
fn sizes_tame(sizes: &mut Vec<usize>, s: Rat, drop: usize) -> bool {
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let kept: usize = sizes.iter().skip(drop).sum();
    rat_int(kept as i64) >= s
}

/// Trims an (s, 5ε)-tame cloud down to a strongly (s, ε)-tame one by leaf
/// removals.
///
/// Leaves are removed (largest component first, then smallest terminal id,
/// then smallest leaf id) while (s, 5ε)-tameness survives; the fixed point
/// is (s,5ε)-tame-minimal, and minimality forces the large components to
/// share one size, which yields strong (s, ε)-tameness. The result is
/// re-verified before returning.
pub fn trim_to_strongly_tame(c: &WCloud, s: Rat, eps: Rat) -> Result<WCloud> {
    let k = c.terminals.len();
    let five_eps = rat_int(5) * eps;
    let loose = CloudParams::new(s, five_eps, k)?;
    let pre = check_cloud(c, &loose, CheckMode::Tame)?;
    if !pre.valid_cloud {
        return Err(Error::domain("trim input is not a valid cloud"));
    }
    if pre.holds != Some(true) {
        return Err(Error::contract(format!(
            "input cloud is not ({}, {})-tame: U = {:?} has mass {} < s",
            format_rat(s),
            format_rat(five_eps),
            pre.worst_u.as_ref().expect("valid cloud has a worst U"),
            pre.worst_u.as_ref().map(|u| c.mass(u)).unwrap_or(0),
        )));
    }
    let drop = loose.max_dropped();
    let mut cur = c.clone();
    loop {
        // Candidate components ordered largest first, terminal id ascending.
        let mut order: Vec<(usize, u32)> = cur.comp.iter().map(|(&w, cs)| (cs.len(), w)).collect();
        order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut removed = false;
        for (pos, &(size, w)) in order.iter().enumerate() {
            if size < 2 {
                continue;
            }
            let mut hypothetical: Vec<usize> = order.iter().map(|&(sz, _)| sz).collect();
            hypothetical[pos] -= 1;
            if !sizes_tame(&mut hypothetical, s, drop) {
                continue;
            }
            // Remove the smallest-id non-terminal leaf of this component.
            let comp = cur.comp.get(&w).expect("terminal has a component");
            let mut degree: BTreeMap<u32, usize> = comp.iter().map(|&v| (v, 0)).collect();
            for &(a, b) in &cur.forest_edges {
                if comp.contains(&a) {
                    *degree.get_mut(&a).unwrap() += 1;
                    *degree.get_mut(&b).unwrap() += 1;
                }
            }
            let leaf = *degree
                .iter()
                .find(|&(&v, &d)| d <= 1 && v != w)
                .map(|(v, _)| v)
                .expect("a component of size >= 2 has a non-terminal leaf");
            let incident: Vec<Edge> = cur
                .forest_edges
                .iter()
                .filter(|&&(a, b)| a == leaf || b == leaf)
                .copied()
                .collect();
            for e in incident {
                cur.forest_edges.remove(&e);
            }
            cur.comp.get_mut(&w).unwrap().remove(&leaf);
            removed = true;
            break;
        }
        if !removed {
            break;
        }
    }
    cur.validate()?;
    let tight = CloudParams::new(s, eps, k)?;
    let post = check_cloud(&cur, &tight, CheckMode::StronglyTame)?;
    if post.holds != Some(true) {
        return Err(Error::contract(format!(
            "trimmed cloud failed the strong tameness check at U = {:?}",
            post.worst_u
        )));
    }
    Ok(cur)
}

/// Is `sep` an (s, ε)-skewed separation of `g0` with respect to `w`?
/// Requires `W ⊆ A`, `|A| ≤ 6s` and `|A∩B| ≤ 6ε|W|`, all compared exactly.
pub fn check_skewed(g0: &Graph, sep: &Separation, w: &VertexSet, s: Rat, eps: Rat) -> Result<bool> {
    let rep = crate::graph::check_separation(g0, sep)?;
    if !rep.valid {
        return Err(Error::domain("separation is not valid for the graph"));
    }
    for &t in w {
        if t >= g0.n() {
            return Err(Error::domain(format!("terminal {t} outside graph")));
        }
    }
    let w_in_a = w.is_subset(&sep.a);
    let a_small = rat_int(sep.a.len() as i64) <= rat_int(6) * s;
    let overlap = sep.a.intersection(&sep.b).count() as i64;
    let overlap_small = rat_int(overlap) <= rat_int(6) * eps * rat_int(w.len() as i64);
    Ok(w_in_a && a_small && overlap_small)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rat;
    use alloc::vec::Vec;

    /// Host graph of disjoint paths, one per requested component size, each
    /// with its terminal at the path's head.
    pub(crate) fn path_cloud(sizes: &[usize]) -> WCloud {
        let total: usize = sizes.iter().sum();
        let mut edges = Vec::new();
        let mut comp = BTreeMap::new();
        let mut next = 0u32;
        for &size in sizes {
            let verts: VertexSet = (next..next + size as u32).collect();
            for v in next..next + size as u32 - 1 {
                edges.push((v, v + 1));
            }
            comp.insert(next, verts);
            next += size as u32;
        }
        let host = Graph::new(total as u32, edges).unwrap();
        WCloud::from_components(host, comp).unwrap()
    }

    /// Full enumeration of qualifying U, for cross-checking the closed form.
    pub(crate) fn enumerate_worst_margin(c: &WCloud, params: &CloudParams, mode: CheckMode) -> Rat {
        let terms: Vec<u32> = c.terminals().iter().copied().collect();
        let k = terms.len();
        let mut worst: Option<Rat> = None;
        for mask in 0..1u64 << k {
            let u: VertexSet = terms
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &w)| w)
                .collect();
            if rat_int(u.len() as i64) < (rat_int(1) - params.eps()) * rat_int(k as i64) {
                continue;
            }
            let kept = c.mass(&u) as i64;
            let dropped = c.size() as i64 - kept;
            let margin = match mode {
                CheckMode::Tame => rat_int(kept) - params.s(),
                CheckMode::StronglyTame => rat_int(kept) - params.s() - rat_int(3 * dropped),
            };
            worst = Some(match worst {
                None => margin,
                Some(m) => m.min(margin),
            });
        }
        worst.expect("U = W always qualifies")
    }

    #[test]
    fn tame_equal_components_tight() {
        let c = path_cloud(&[4, 4, 4]);
        let params = CloudParams::new(rat_int(8), parse_rat("1/3").unwrap(), 3).unwrap();
        let rep = check_cloud(&c, &params, CheckMode::Tame).unwrap();
        assert_eq!(rep.holds, Some(true));
        assert_eq!(rep.margin, Some(rat_int(0)));
        assert_eq!(rep.worst_u.as_ref().unwrap().len(), 2);
        assert_eq!(
            rep.margin.unwrap(),
            enumerate_worst_margin(&c, &params, CheckMode::Tame)
        );
    }

    #[test]
    fn tame_fails_with_small_component() {
        let c = path_cloud(&[4, 4, 1]);
        let params = CloudParams::new(rat_int(8), parse_rat("1/3").unwrap(), 3).unwrap();
        let rep = check_cloud(&c, &params, CheckMode::Tame).unwrap();
        assert_eq!(rep.holds, Some(false));
        // Worst U keeps one 4 and the 1: mass 5, margin -3.
        assert_eq!(rep.margin, Some(rat_int(-3)));
        assert_eq!(
            rep.margin.unwrap(),
            enumerate_worst_margin(&c, &params, CheckMode::Tame)
        );
    }

    #[test]
    fn strongly_tame_fails_on_dropped_mass() {
        let c = path_cloud(&[4, 4, 4]);
        let params = CloudParams::new(rat_int(2), parse_rat("1/3").unwrap(), 3).unwrap();
        let rep = check_cloud(&c, &params, CheckMode::StronglyTame).unwrap();
        // 8 >= 2 + 3*4 is false.
        assert_eq!(rep.holds, Some(false));
        assert_eq!(rep.margin, Some(rat_int(8 - 2 - 12)));
        assert_eq!(
            rep.margin.unwrap(),
            enumerate_worst_margin(&c, &params, CheckMode::StronglyTame)
        );
    }

    #[test]
    fn small_eps_reduces_to_full_terminal_set() {
        let c = path_cloud(&[2, 3, 5, 1]);
        let params = CloudParams::new(rat_int(11), parse_rat("1/5").unwrap(), 4).unwrap();
        // eps < 1/k: only U = W qualifies, in both modes.
        for mode in [CheckMode::Tame, CheckMode::StronglyTame] {
            let rep = check_cloud(&c, &params, mode).unwrap();
            assert_eq!(rep.worst_u.as_ref().unwrap().len(), 4);
            assert_eq!(rep.holds, Some(true));
            assert_eq!(rep.margin, Some(rat_int(0)));
        }
    }

    #[test]
    fn closed_form_matches_enumeration_on_varied_shapes() {
        let shapes: &[&[usize]] = &[
            &[1, 1, 1, 1, 1],
            &[9, 3, 3, 3, 3],
            &[7, 1, 2, 2, 5, 5],
            &[4],
            &[2, 2, 2, 2, 2, 2, 2],
        ];
        let eps_list = ["1/3", "1/5", "1/7", "2/5"];
        for sizes in shapes {
            let c = path_cloud(sizes);
            let k = sizes.len();
            for eps in eps_list {
                for s in [1i64, 3, 6, 10] {
                    let params = CloudParams::new(rat_int(s), parse_rat(eps).unwrap(), k).unwrap();
                    for mode in [CheckMode::Tame, CheckMode::StronglyTame] {
                        let rep = check_cloud(&c, &params, mode).unwrap();
                        assert_eq!(
                            rep.margin.unwrap(),
                            enumerate_worst_margin(&c, &params, mode),
                            "sizes {sizes:?} eps {eps} s {s} {mode:?}"
                        );
                        assert_eq!(rep.holds.unwrap(), rep.margin.unwrap() >= Rat::zero());
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_cloud_reported_not_raised() {
        // Two terminals in one component.
        let host = Graph::new(2, [(0, 1)]).unwrap();
        let bad = WCloud {
            host,
            terminals: [0u32, 1].into_iter().collect(),
            forest_edges: [(0u32, 1u32)].into_iter().collect(),
            comp: [(0u32, [0u32, 1].into_iter().collect())]
                .into_iter()
                .collect(),
        };
        let params = CloudParams::new(rat_int(1), parse_rat("1/3").unwrap(), 2).unwrap();
        let rep = check_cloud(&bad, &params, CheckMode::Tame).unwrap();
        assert!(!rep.valid_cloud);
        assert!(rep.holds.is_none());
    }

    pub(crate) fn assert_minimal(c: &WCloud, loose: &CloudParams) {
        let drop = loose.max_dropped();
        let sizes: Vec<usize> = c.components().values().map(|v| v.len()).collect();
        for (i, &sz) in sizes.iter().enumerate() {
            if sz < 2 {
                continue;
            }
            let mut hyp = sizes.clone();
            hyp[i] -= 1;
            assert!(
                !sizes_tame(&mut hyp, loose.s(), drop),
                "removing a leaf from component {i} keeps tameness; not minimal"
            );
        }
    }

    #[test]
    fn trim_spec_example() {
        // (9,3,3,3,3), s = 6, eps = 1/25, so 5eps = 1/5 and k = 5.
        let c = path_cloud(&[9, 3, 3, 3, 3]);
        let s = rat_int(6);
        let eps = parse_rat("1/25").unwrap();
        let trimmed = trim_to_strongly_tame(&c, s, eps).unwrap();
        // Sub-cloud: leaf removals only.
        assert!(trimmed.forest_edges().is_subset(c.forest_edges()));
        for (w, comp) in trimmed.components() {
            assert!(comp.is_subset(c.component(*w).unwrap()));
        }
        // Strongly tame, confirmed by full enumeration.
        let tight = CloudParams::new(s, eps, 5).unwrap();
        assert!(enumerate_worst_margin(&trimmed, &tight, CheckMode::StronglyTame) >= Rat::zero());
        // Minimal: no further leaf removal keeps (s, 5eps)-tameness.
        let loose = CloudParams::new(s, rat_int(5) * eps, 5).unwrap();
        assert_minimal(&trimmed, &loose);
    }

    #[test]
    fn trim_leaves_minimal_equal_cloud_unchanged() {
        // All singleton components: nothing removable.
        let c = path_cloud(&[1, 1, 1, 1, 1]);
        let trimmed = trim_to_strongly_tame(&c, rat_int(4), parse_rat("1/25").unwrap()).unwrap();
        assert_eq!(&trimmed, &c);
    }

    #[test]
    fn trim_single_terminal_stops_at_threshold() {
        let c = path_cloud(&[7]);
        let trimmed = trim_to_strongly_tame(&c, rat_int(3), parse_rat("1/10").unwrap()).unwrap();
        assert_eq!(trimmed.size(), 3);
        let half =
            trim_to_strongly_tame(&c, parse_rat("5/2").unwrap(), parse_rat("1/10").unwrap())
                .unwrap();
        assert_eq!(half.size(), 3);
    }

    #[test]
    fn trim_rejects_untame_input_naming_witness() {
        let c = path_cloud(&[4, 4, 1]);
        let err = trim_to_strongly_tame(&c, rat_int(8), parse_rat("1/15").unwrap()).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Contract);
        assert!(err.message().contains("U ="), "{err}");
    }

    #[test]
    fn skewed_examples() {
        // A = W of size 3, B = everything; s = 1, eps = 1/2.
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let w: VertexSet = [0u32, 1, 2].into_iter().collect();
        let sep = Separation::new(w.clone(), g.vertex_set());
        assert!(check_skewed(&g, &sep, &w, rat_int(1), parse_rat("1/2").unwrap()).unwrap());
        // W not inside A: false regardless of sizes.
        let sep2 = Separation::new([0u32, 1].into_iter().collect(), g.vertex_set());
        assert!(!check_skewed(&g, &sep2, &w, rat_int(100), parse_rat("1/2").unwrap()).unwrap());
    }

    #[test]
    fn skewed_boundary_is_strict_at_six_s_plus_one() {
        // |A| = 6s + 1 must fail, |A| = 6s must pass.
        let g = Graph::edgeless(13);
        let w: VertexSet = [0u32].into_iter().collect();
        let a12: VertexSet = (0..12).collect();
        let b12: VertexSet = (11..13).collect();
        assert!(check_skewed(
            &g,
            &Separation::new(a12, b12),
            &w,
            rat_int(2),
            parse_rat("1/2").unwrap()
        )
        .unwrap());
        let a13: VertexSet = (0..13).collect();
        let b13: VertexSet = (12..13).collect();
        assert!(!check_skewed(
            &g,
            &Separation::new(a13, b13),
            &w,
            rat_int(2),
            parse_rat("1/2").unwrap()
        )
        .unwrap());
    }

    #[test]
    fn skewed_invalid_separation_is_domain_error() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let w: VertexSet = [0u32].into_iter().collect();
        let sep = Separation::new([0u32].into_iter().collect(), [1u32].into_iter().collect());
        let err = check_skewed(&g, &sep, &w, rat_int(1), parse_rat("1/2").unwrap()).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Domain);
    }

    #[test]
    fn params_reject_unit_eps() {
        assert!(CloudParams::new(rat_int(1), rat_int(1), 1).is_err());
        assert!(CloudParams::new(rat_int(1), parse_rat("7/5").unwrap(), 1).is_err());
        assert!(CloudParams::new(rat_int(0), parse_rat("1/7").unwrap(), 1).is_err());
    }

    #[test]
    fn a_skewed_separation_excludes_tame_clouds() {
        // Terminals in a 4-vertex pocket cut off by vertex 3; the pocket
        // separation is (s, eps)-skewed, so no (6s+1, 6eps)-tame W-cloud
        // can exist. Search seeded random clouds and check each fails.
        let mut edges = alloc::vec![(0, 1), (1, 2), (2, 3)];
        for v in 4..24u32 {
            edges.push((3, v));
        }
        let g = Graph::new(24, edges).unwrap();
        let w: VertexSet = [0u32, 1, 2].into_iter().collect();
        let s = rat_int(1);
        let eps = parse_rat("1/7").unwrap();
        let skewed = Separation::new(
            [0u32, 1, 2, 3].into_iter().collect(),
            (3..24).collect(),
        );
        assert!(check_skewed(&g, &skewed, &w, s, eps).unwrap());
        let loose = CloudParams::new(
            rat_int(6) * s + rat_int(1),
            rat_int(6) * eps,
            w.len(),
        )
        .unwrap();
        // Random clouds: grow each terminal's component along host edges.
        let mut state = 0x5EEDu64;
        let mut next = || {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        let adjacency = g.adjacency();
        for _ in 0..50 {
            let mut used: VertexSet = VertexSet::new();
            let mut comp: BTreeMap<u32, VertexSet> = BTreeMap::new();
            for &t in &w {
                let mut c: VertexSet = [t].into_iter().collect();
                used.insert(t);
                for _ in 0..next() % 12 {
                    // Extend by a random host neighbor of the component.
                    let frontier: Vec<u32> = c
                        .iter()
                        .flat_map(|&v| adjacency[v as usize].iter().copied())
                        .filter(|x| !used.contains(x))
                        .collect();
                    if frontier.is_empty() {
                        break;
                    }
                    let pick = frontier[(next() % frontier.len() as u64) as usize];
                    c.insert(pick);
                    used.insert(pick);
                }
                comp.insert(t, c);
            }
            let cloud = WCloud::from_components(g.clone(), comp).unwrap();
            let rep = check_cloud(&cloud, &loose, CheckMode::Tame).unwrap();
            assert_eq!(rep.holds, Some(false), "{:?}", cloud.components());
        }
    }
}
