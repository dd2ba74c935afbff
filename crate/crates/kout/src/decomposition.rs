//! The six-step splitting procedure: sample a colored random subgraph and
//! simultaneously carve it into edge-disjoint rainbow parts, each carrying
//! the k-out law induced by a uniform orientation.
//!
//! The sampled graph `h` is emitted on every run, success or not, and its
//! marginal is exactly the colored binomial model: edges survive
//! independently with probability `p` and colors are i.i.d. uniform on the
//! palette. Failure only means the rainbow parts could not be carved.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::bounds::{expected_m_r, r0_with_case_split};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, ColoredGraph, Graph, Orientation};
use crate::matching::k_matchings_from_left_kout;
use crate::models::random_orientation;
use crate::seed::Seed;

/// The colors drawn for one vertex: `s` i.i.d. uniform picks from the
/// palette, kept in draw order. Entries are 1-based colors.
#[derive(Debug, Clone)]
pub struct ColorMultiset {
    pub owner: usize,
    pub entries: Vec<u32>,
}

impl ColorMultiset {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Color -> number of occurrences.
    pub fn counts(&self) -> BTreeMap<u32, usize> {
        let mut counts = BTreeMap::new();
        for &c in &self.entries {
            *counts.entry(c).or_insert(0) += 1;
        }
        counts
    }

    /// Multiplicity -> sorted list of colors occurring exactly that often.
    pub fn classes(&self) -> BTreeMap<usize, Vec<u32>> {
        let mut classes: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (c, r) in self.counts() {
            classes.entry(r).or_default().push(c);
        }
        classes
    }

    /// The count m_r: how many colors appear with multiplicity exactly `r`.
    pub fn multiplicity_count(&self, r: usize) -> usize {
        self.classes().get(&r).map_or(0, Vec::len)
    }
}

/// Why the ordering plan could not be completed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanFailure {
    /// Some vertex has fewer multiplicity-r colors than the d_r the plan
    /// wants to subsample.
    Multiplicity {
        r: usize,
        vertex: usize,
        have: usize,
        need: usize,
    },
    /// The multiplicity-r layer yielded fewer edge-disjoint perfect
    /// k-matchings than s_r.
    Matchings { r: usize, achieved: usize, need: usize },
}

impl fmt::Display for PlanFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanFailure::Multiplicity { r, vertex, have, need } => write!(
                f,
                "vertex {vertex} has {have} multiplicity-{r} colors, needs {need}"
            ),
            PlanFailure::Matchings { r, achieved, need } => write!(
                f,
                "layer {r} yielded {achieved} perfect k-matchings, needs {need}"
            ),
        }
    }
}

/// Why a run of [`decompose`] produced no parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureReason {
    /// Some vertex kept fewer than `s` of its out-edges.
    ShortSample {
        vertex: usize,
        have: usize,
        need: usize,
    },
    Plan(PlanFailure),
}

impl FailureReason {
    /// Coarse bucket for aggregation, without the per-run details.
    pub fn label(&self) -> &'static str {
        match self {
            FailureReason::ShortSample { .. } => "short-sample",
            FailureReason::Plan(PlanFailure::Multiplicity { .. }) => "plan-multiplicity",
            FailureReason::Plan(PlanFailure::Matchings { .. }) => "plan-matchings",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::ShortSample { vertex, have, need } => write!(
                f,
                "vertex {vertex} kept {have} out-edges, needs {need}"
            ),
            FailureReason::Plan(p) => write!(f, "ordering plan failed: {p}"),
        }
    }
}

/// Per-vertex color orderings arranged so that every k-block of the common
/// prefix is a full palette.
#[derive(Debug, Clone)]
pub struct OrderingPlan {
    /// Ordering of each vertex's multiset; all have the same length s.
    pub order: Vec<Vec<u32>>,
    pub k: usize,
    /// Number of k-blocks in the prefix; the prefix spans k·blocks positions.
    pub blocks: usize,
    pub r0: usize,
    /// d_r for r = 1..=r0.
    pub d: Vec<usize>,
    /// s_r for r = 1..=r0; the layer is skipped when this is 0.
    pub s_r: Vec<usize>,
}

impl OrderingPlan {
    pub fn prefix_len(&self) -> usize {
        self.k * self.blocks
    }
}

/// Parameters and per-run counts reported alongside the result.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub s: usize,
    pub k: usize,
    pub r0: usize,
    /// m_r^x for r = 1..=r0, indexed `[r - 1][vertex]`.
    pub m: Vec<Vec<usize>>,
    /// d_r for r = 1..=r0; empty when the sample failed before planning.
    pub d: Vec<usize>,
    /// s_r for r = 1..=r0; empty when the sample failed before planning.
    pub s_r: Vec<usize>,
}

/// Output of [`decompose`]: the full colored sample, the rainbow parts, and
/// the uncarved remainder.
#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub h: ColoredGraph,
    pub parts: Vec<Graph>,
    pub remainder: Graph,
    pub orientation: Orientation,
    pub t_achieved: usize,
    pub failure_reason: Option<FailureReason>,
    pub diagnostics: Diagnostics,
}

impl DecompositionResult {
    pub fn succeeded(&self) -> bool {
        self.failure_reason.is_none()
    }
}

/// The auxiliary bipartite incidence graphs, one per multiplicity class:
/// vertex x is joined to color c in the r-th graph iff c appears in x's
/// multiset with multiplicity exactly r. `palette` is the right part size.
pub fn build_multiplicity_graphs(
    multisets: &[ColorMultiset],
    r0: usize,
    palette: usize,
) -> Vec<BipartiteGraph> {
    let n = multisets.len();
    let classes: Vec<_> = multisets.iter().map(ColorMultiset::classes).collect();
    (1..=r0)
        .map(|r| {
            let mut b = BipartiteGraph::empty(n, palette);
            for (x, class) in classes.iter().enumerate() {
                for &c in class.get(&r).map_or(&[][..], Vec::as_slice) {
                    b.add_edge(x, c as usize - 1)
                        .expect("multiset colors are distinct within a class");
                }
            }
            b
        })
        .collect()
}

/// Order each multiset so that the first k·blocks positions tile into full
/// palettes. Per multiplicity class r, subsample d_r colors per vertex,
/// extract s_r edge-disjoint perfect k-matchings from the resulting
/// incidence graph, and lay each matching's stars down r times; every
/// vertex's leftover colors follow in ascending order.
pub fn plan_ordering(
    multisets: &[ColorMultiset],
    k: usize,
    eps: f64,
    seed: Seed,
) -> std::result::Result<OrderingPlan, PlanFailure> {
    assert!(k >= 2, "k must be at least 2");
    assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    let n = multisets.len();
    assert!(n > 0, "need at least one multiset");
    let s = multisets[0].size();
    assert!(
        multisets.iter().all(|m| m.size() == s),
        "multisets must share one size"
    );
    let palette = k * n;
    let eps4 = eps / 4.0;
    let alpha = s as f64 / n as f64;
    let r0 = r0_with_case_split(eps4, k, alpha);

    let classes: Vec<_> = multisets.iter().map(ColorMultiset::classes).collect();
    let mut d = vec![0usize; r0];
    let mut s_r = vec![0usize; r0];
    let mut prefix: Vec<Vec<u32>> = vec![Vec::new(); n];
    for r in 1..=r0 {
        let d_r = ((1.0 - eps4) * expected_m_r(k, n, s, r)).floor() as usize;
        d[r - 1] = d_r;
        let want = ((1.0 - eps4) * d_r as f64 / k as f64).floor() as usize;
        if want == 0 {
            // The layer contributes no blocks, so its colors are never
            // consumed and no subsample is taken.
            continue;
        }
        let layer_seed = seed.child("sub").child_idx(r);
        let mut picked = BipartiteGraph::empty(n, palette);
        for (x, class) in classes.iter().enumerate() {
            let colors = class.get(&r).map_or(&[][..], Vec::as_slice);
            if colors.len() < d_r {
                return Err(PlanFailure::Multiplicity {
                    r,
                    vertex: x,
                    have: colors.len(),
                    need: d_r,
                });
            }
            let mut rng = layer_seed.child_idx(x).rng();
            for i in rand::seq::index::sample(&mut rng, colors.len(), d_r) {
                picked
                    .add_edge(x, colors[i] as usize - 1)
                    .expect("class colors are distinct");
            }
        }
        let family = k_matchings_from_left_kout(&picked, k, d_r, eps4)
            .expect("subsample has left degree d_r and right part k·n");
        if family.k_matchings.len() < want {
            return Err(PlanFailure::Matchings {
                r,
                achieved: family.k_matchings.len(),
                need: want,
            });
        }
        s_r[r - 1] = want;
        let mut layer: Vec<Vec<u32>> = vec![Vec::new(); n];
        for m in &family.k_matchings[..want] {
            for (x, star) in m.stars.iter().enumerate() {
                layer[x].extend(star.iter().map(|&c| c as u32 + 1));
            }
        }
        for x in 0..n {
            for _ in 0..r {
                prefix[x].extend_from_slice(&layer[x]);
            }
        }
    }

    let blocks: usize = (1..=r0).map(|r| r * s_r[r - 1]).sum();
    assert!(k * blocks <= s, "prefix cannot exceed the multiset size");
    let mut order = Vec::with_capacity(n);
    for (x, multiset) in multisets.iter().enumerate() {
        assert_eq!(prefix[x].len(), k * blocks);
        let mut counts = multiset.counts();
        for &c in &prefix[x] {
            let left = counts
                .get_mut(&c)
                .expect("prefix colors come from the multiset");
            *left = left.checked_sub(1).expect("prefix respects multiplicities");
        }
        let mut full = prefix[x].clone();
        for (c, count) in counts {
            full.extend(std::iter::repeat(c).take(count));
        }
        assert_eq!(full.len(), s);
        order.push(full);
    }
    for b in 0..blocks {
        let mut seen = vec![false; palette];
        for row in &order {
            for &c in &row[k * b..k * (b + 1)] {
                assert!(!seen[c as usize - 1], "block {b} repeats color {c}");
                seen[c as usize - 1] = true;
            }
        }
        // n rows of k distinct colors fill the palette exactly.
    }

    Ok(OrderingPlan { order, k, blocks, r0, d, s_r })
}

/// Run the six-step procedure on `g`: orient uniformly, keep each out-edge
/// with probability `p`, color the kept edges from a palette of k·v(G)
/// colors, and carve the first k·blocks positions of every vertex into
/// rainbow parts. The colored sample `h` is always returned; `parts` is
/// empty when `failure_reason` is set.
pub fn decompose(
    g: &Graph,
    p: f64,
    k: usize,
    eps: f64,
    seed: Seed,
) -> Result<DecompositionResult> {
    if k < 2 {
        return Err(Error::invalid("k", format!("must be at least 2, got {k}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid("p", format!("must lie in (0, 1], got {p}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps", format!("must lie in (0, 1), got {eps}")));
    }
    if g.min_degree() == 0 {
        return Err(Error::invalid("g", "graph has an isolated vertex"));
    }
    let n = g.n();
    let palette = (k * n) as u32;

    let orientation = random_orientation(g, seed.child("orient"));

    let kept: Vec<usize> = (0..n)
        .map(|x| {
            let mut rng = seed.child("keep").child_idx(x).rng();
            let d_plus = orientation.out_degree(x) as u64;
            Binomial::new(d_plus, p).expect("p lies in (0, 1]").sample(&mut rng) as usize
        })
        .collect();

    let s = ((1.0 - eps / 4.0) * g.min_degree() as f64 * p / 2.0).floor() as usize;
    let multisets: Vec<ColorMultiset> = (0..n)
        .map(|x| {
            let mut rng = seed.child("colors").child_idx(x).rng();
            let entries = (0..s).map(|_| rng.gen_range(1..=palette)).collect();
            ColorMultiset { owner: x, entries }
        })
        .collect();

    let targets: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let mut rng = seed.child("inject").child_idx(x).rng();
            let out = orientation.out_neighbors(x);
            rand::seq::index::sample(&mut rng, out.len(), kept[x])
                .iter()
                .map(|i| out[i])
                .collect()
        })
        .collect();

    let short = (0..n).find(|&x| s > kept[x]);
    let planned = match short {
        Some(_) => None,
        None => Some(plan_ordering(&multisets, k, eps, seed.child("plan"))),
    };
    let failure_reason = match (short, &planned) {
        (Some(x), _) => Some(FailureReason::ShortSample {
            vertex: x,
            have: kept[x],
            need: s,
        }),
        (None, Some(Err(f))) => Some(FailureReason::Plan(f.clone())),
        _ => None,
    };
    let plan = match &planned {
        Some(Ok(plan)) => Some(plan),
        _ => None,
    };

    // On failure the multisets are consumed in draw order. Any fixed rule
    // that ignores the values would do for vertices holding all s planned
    // positions, but a vertex with fewer kept edges only uses a prefix, and
    // a value-dependent rule (say ascending) would bias that prefix.
    let mut edges = Vec::new();
    let mut edge_colors = Vec::new();
    for x in 0..n {
        let row: &[u32] = match plan {
            Some(plan) => &plan.order[x],
            None => &multisets[x].entries,
        };
        let mut extra = seed.child("extra").child_idx(x).rng();
        for (i, &y) in targets[x].iter().enumerate() {
            let color = if i < s { row[i] } else { extra.gen_range(1..=palette) };
            edges.push((x, y));
            edge_colors.push(color);
        }
    }
    let graph = Graph::from_edges(n, edges.iter().copied())?;
    let by_pair: std::collections::HashMap<(usize, usize), u32> = edges
        .iter()
        .zip(&edge_colors)
        .map(|(&(a, b), &c)| ((a.min(b), a.max(b)), c))
        .collect();
    let colors: Vec<u32> = graph.edges().iter().map(|e| by_pair[e]).collect();
    let h = ColoredGraph::new(graph, colors, palette)?;

    let blocks = plan.map_or(0, |plan| plan.blocks);
    let mut claimed = vec![false; h.graph().edge_count()];
    let mut parts = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let mut part_edges = Vec::with_capacity(k * n);
        for (x, row) in targets.iter().enumerate() {
            for &y in &row[k * b..k * (b + 1)] {
                let e = h.graph().edge_index(x, y).expect("sampled edge is in h");
                assert!(!claimed[e], "parts must not share edges");
                claimed[e] = true;
                part_edges.push((x, y));
            }
        }
        parts.push(Graph::from_edges(n, part_edges)?);
    }
    let remainder = Graph::from_edges(
        n,
        h.graph()
            .edges()
            .iter()
            .enumerate()
            .filter(|&(e, _)| !claimed[e])
            .map(|(_, &e)| e),
    )?;

    let r0 = plan.map_or_else(
        || r0_with_case_split(eps / 4.0, k, s as f64 / n as f64),
        |plan| plan.r0,
    );
    let diagnostics = Diagnostics {
        s,
        k,
        r0,
        m: (1..=r0)
            .map(|r| multisets.iter().map(|m| m.multiplicity_count(r)).collect())
            .collect(),
        d: plan.map_or_else(Vec::new, |plan| plan.d.clone()),
        s_r: plan.map_or_else(Vec::new, |plan| plan.s_r.clone()),
    };

    Ok(DecompositionResult {
        h,
        parts,
        remainder,
        orientation,
        t_achieved: blocks,
        failure_reason,
        diagnostics,
    })
}

/// One line of a [`DecompositionReport`].
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of [`verify_decomposition`], one line per invariant.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub checks: Vec<CheckLine>,
}

impl DecompositionReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for DecompositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            if check.pass {
                writeln!(f, "ok   {}", check.name)?;
            } else {
                writeln!(f, "FAIL {}: {}", check.name, check.detail)?;
            }
        }
        Ok(())
    }
}

/// Re-check every structural invariant of a [`DecompositionResult`] from
/// its public fields: the parts and remainder partition h, the parts are
/// rainbow with a full palette each, and each part gives every vertex its
/// k-out out-degree under the run's orientation.
pub fn verify_decomposition(res: &DecompositionResult) -> DecompositionReport {
    let h = &res.h;
    let k = res.diagnostics.k;
    let mut checks = Vec::new();

    let mut usage = vec![0usize; h.graph().edge_count()];
    let mut stray = None;
    for (i, part) in res.parts.iter().enumerate() {
        for &(u, v) in part.edges() {
            match h.graph().edge_index(u, v) {
                Some(e) => usage[e] += 1,
                None => stray = stray.or(Some((i, u, v))),
            }
        }
    }
    for &(u, v) in res.remainder.edges() {
        match h.graph().edge_index(u, v) {
            Some(e) => usage[e] += 1,
            None => stray = stray.or(Some((usize::MAX, u, v))),
        }
    }
    let overlap = usage.iter().position(|&c| c != 1);
    let partition_detail = match (stray, overlap) {
        (Some((i, u, v)), _) if i == usize::MAX => {
            format!("remainder edge ({u}, {v}) is not in h")
        }
        (Some((i, u, v)), _) => format!("part {i} edge ({u}, {v}) is not in h"),
        (None, Some(e)) => {
            let (u, v) = h.graph().edges()[e];
            format!("edge ({u}, {v}) is covered {} times", usage[e])
        }
        (None, None) => String::new(),
    };
    checks.push(CheckLine {
        name: "edge-partition",
        pass: partition_detail.is_empty(),
        detail: partition_detail,
    });

    let carved: usize = res.parts.iter().map(Graph::edge_count).sum();
    let conserved = h.graph().edge_count() == res.remainder.edge_count() + carved;
    checks.push(CheckLine {
        name: "conservation",
        pass: conserved,
        detail: if conserved {
            String::new()
        } else {
            format!(
                "h has {} edges, remainder {} + parts {}",
                h.graph().edge_count(),
                res.remainder.edge_count(),
                carved
            )
        },
    });

    let mut rainbow_detail = String::new();
    'rainbow: for (i, part) in res.parts.iter().enumerate() {
        let mut seen = BTreeMap::new();
        for &(u, v) in part.edges() {
            let Some(c) = h.color_of(u, v) else { continue };
            if let Some(&(a, b)) = seen.get(&c) {
                rainbow_detail =
                    format!("part {i} repeats color {c} on ({a}, {b}) and ({u}, {v})");
                break 'rainbow;
            }
            seen.insert(c, (u, v));
        }
    }
    checks.push(CheckLine {
        name: "rainbow-parts",
        pass: rainbow_detail.is_empty(),
        detail: rainbow_detail,
    });

    let palette_detail = res
        .parts
        .iter()
        .enumerate()
        .find_map(|(i, part)| {
            let colors: std::collections::BTreeSet<_> = part
                .edges()
                .iter()
                .filter_map(|&(u, v)| h.color_of(u, v))
                .collect();
            (colors.len() != h.palette() as usize).then(|| {
                format!("part {i} carries {} of {} colors", colors.len(), h.palette())
            })
        })
        .unwrap_or_default();
    checks.push(CheckLine {
        name: "full-palette-parts",
        pass: palette_detail.is_empty(),
        detail: palette_detail,
    });

    let mut degree_detail = String::new();
    'degrees: for (i, part) in res.parts.iter().enumerate() {
        let mut out = vec![0usize; part.n()];
        for &(u, v) in part.edges() {
            if res.orientation.points(u, v) {
                out[u] += 1;
            } else {
                out[v] += 1;
            }
        }
        for (x, &d) in out.iter().enumerate() {
            let want = k.min(res.orientation.out_degree(x));
            if d != want {
                degree_detail =
                    format!("part {i} gives vertex {x} out-degree {d}, wants {want}");
                break 'degrees;
            }
        }
    }
    checks.push(CheckLine {
        name: "out-degree-signature",
        pass: degree_detail.is_empty(),
        detail: degree_detail,
    });

    DecompositionReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn multiset(owner: usize, entries: &[u32]) -> ColorMultiset {
        ColorMultiset { owner, entries: entries.to_vec() }
    }

    #[test]
    fn multiplicity_classes_partition_the_multiset() {
        let m = multiset(0, &[5, 2, 5, 9, 2, 5]);
        let classes = m.classes();
        assert_eq!(classes[&1], vec![9]);
        assert_eq!(classes[&2], vec![2]);
        assert_eq!(classes[&3], vec![5]);
        assert_eq!(m.multiplicity_count(1), 1);
        assert_eq!(m.multiplicity_count(4), 0);
        let total: usize = classes.iter().map(|(r, cs)| r * cs.len()).sum();
        assert_eq!(total, m.size());
    }

    #[test]
    fn incidence_graphs_sort_colors_by_multiplicity() {
        // Duplicate-free multisets put every incidence in the first graph.
        let multisets = vec![multiset(0, &[1, 2, 3]), multiset(1, &[2, 4, 6])];
        let graphs = build_multiplicity_graphs(&multisets, 2, 6);
        assert_eq!(graphs[0].edge_count(), 6);
        assert_eq!(graphs[1].edge_count(), 0);
        assert!(graphs[0].has_edge(1, 5));

        // A repeated pair lands in the second graph alone.
        let multisets = vec![multiset(0, &[5, 5])];
        let graphs = build_multiplicity_graphs(&multisets, 2, 6);
        assert_eq!(graphs[0].edge_count(), 0);
        assert_eq!(graphs[1].edge_count(), 1);
        assert!(graphs[1].has_edge(0, 4));

        // Degrees weighted by multiplicity recover the multiset size.
        let multisets = vec![multiset(0, &[1, 1, 2, 3, 3, 3]), multiset(1, &[4, 4, 4, 4, 2, 6])];
        let graphs = build_multiplicity_graphs(&multisets, 4, 6);
        for x in 0..2 {
            let weighted: usize = (1..=4).map(|r| r * graphs[r - 1].degree(x)).sum();
            assert_eq!(weighted, 6);
        }
    }

    #[test]
    fn plan_fails_on_a_constant_multiset() {
        // Nine vertices draw rich multisets; vertex 9 repeats one color, so
        // it has no multiplicity-1 colors at all while d_1 >= 1.
        let n = 10;
        let s = 4;
        let mut multisets: Vec<ColorMultiset> = (0..n - 1)
            .map(|x| {
                let base = (x * 4) as u32;
                multiset(x, &[base % 20 + 1, (base + 5) % 20 + 1, (base + 11) % 20 + 1, (base + 17) % 20 + 1])
            })
            .collect();
        multisets.push(multiset(n - 1, &[7; 4]));
        assert_eq!(multisets[n - 1].size(), s);
        let err = plan_ordering(&multisets, 2, 0.1, Seed(1)).unwrap_err();
        match err {
            PlanFailure::Multiplicity { r: 1, vertex, have: 0, .. } => assert_eq!(vertex, n - 1),
            other => panic!("expected a multiplicity failure, got {other:?}"),
        }
    }

    #[test]
    fn empty_multisets_give_an_empty_plan() {
        let multisets: Vec<ColorMultiset> = (0..4).map(|x| multiset(x, &[])).collect();
        let plan = plan_ordering(&multisets, 2, 0.3, Seed(3)).unwrap();
        assert_eq!(plan.blocks, 0);
        assert_eq!(plan.prefix_len(), 0);
        assert!(plan.order.iter().all(Vec::is_empty));
    }

    #[test]
    fn trivial_decomposition_when_s_is_zero() {
        // deg·p/2 < 1 forces s = 0: no planned positions, one empty plan,
        // every sampled edge stays in the remainder.
        let g = Graph::complete(6);
        let res = decompose(&g, 0.3, 2, 0.5, Seed(7)).unwrap();
        assert_eq!(res.diagnostics.s, 0);
        assert!(res.succeeded());
        assert_eq!(res.t_achieved, 0);
        assert!(res.parts.is_empty());
        assert_eq!(res.remainder.edge_count(), res.h.graph().edge_count());
        assert!(verify_decomposition(&res).all_pass());
    }

    #[test]
    fn parameter_validation() {
        let g = Graph::complete(4);
        assert!(decompose(&g, 0.5, 1, 0.5, Seed(0)).is_err());
        assert!(decompose(&g, 0.0, 2, 0.5, Seed(0)).is_err());
        assert!(decompose(&g, 1.1, 2, 0.5, Seed(0)).is_err());
        assert!(decompose(&g, 0.5, 2, 1.0, Seed(0)).is_err());
        let lonely = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(decompose(&lonely, 0.5, 2, 0.5, Seed(0)).is_err());
    }

    #[test]
    fn decompose_is_deterministic() {
        let g = Graph::complete(12);
        let a = decompose(&g, 0.8, 2, 0.4, Seed(42)).unwrap();
        let b = decompose(&g, 0.8, 2, 0.4, Seed(42)).unwrap();
        assert_eq!(a.h.graph().edges(), b.h.graph().edges());
        assert_eq!(a.h.colors(), b.h.colors());
        assert_eq!(a.t_achieved, b.t_achieved);
        assert_eq!(a.failure_reason, b.failure_reason);
    }

    /// A decomposition assembled by hand: the rotational tournament on K_5
    /// is 2-regular, so the whole host is one valid part under k = 2 with
    /// all ten palette colors.
    fn handmade() -> DecompositionResult {
        let g = Graph::complete(5);
        let outward = g
            .edges()
            .iter()
            .map(|&(u, v)| matches!((v + 5 - u) % 5, 1 | 2))
            .collect();
        let orientation = crate::graph::Orientation::new(g.clone(), outward).unwrap();
        let colors = (1..=10).collect();
        let h = ColoredGraph::new(g.clone(), colors, 10).unwrap();
        DecompositionResult {
            h,
            parts: vec![g],
            remainder: Graph::empty(5),
            orientation,
            t_achieved: 1,
            failure_reason: None,
            diagnostics: Diagnostics {
                s: 2,
                k: 2,
                r0: 1,
                m: vec![vec![2; 5]],
                d: vec![1],
                s_r: vec![1],
            },
        }
    }

    #[test]
    fn verifier_flags_corrupted_results() {
        let res = handmade();
        assert!(verify_decomposition(&res).all_pass());

        // Duplicate color inside a part: recolor one of its edges to match
        // another.
        let mut corrupt = res.clone();
        let part = corrupt.parts[0].clone();
        let (u0, v0) = part.edges()[0];
        let (u1, v1) = part.edges()[1];
        let target = corrupt.h.graph().edge_index(u1, v1).unwrap();
        let mut colors = corrupt.h.colors().to_vec();
        colors[target] = corrupt.h.color_of(u0, v0).unwrap();
        corrupt.h = ColoredGraph::new(corrupt.h.graph().clone(), colors, corrupt.h.palette()).unwrap();
        let report = verify_decomposition(&corrupt);
        let rainbow = report.checks.iter().find(|c| c.name == "rainbow-parts").unwrap();
        assert!(!rainbow.pass);
        assert!(rainbow.detail.contains(&format!("color {}", corrupt.h.color_of(u0, v0).unwrap())));

        // Shared edge between a part and the remainder.
        let mut corrupt = res.clone();
        let (u, v) = corrupt.parts[0].edges()[0];
        let mut edges = corrupt.remainder.edges().to_vec();
        edges.push((u, v));
        corrupt.remainder = Graph::from_edges(corrupt.remainder.n(), edges).unwrap();
        let report = verify_decomposition(&corrupt);
        let partition = report.checks.iter().find(|c| c.name == "edge-partition").unwrap();
        assert!(!partition.pass);
        assert!(partition.detail.contains("covered 2 times"));
        assert!(!report.all_pass());
    }
}
