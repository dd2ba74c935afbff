//! Graph containers shared by every sampler and checker in the crate.
//!
//! All graphs are simple and undirected with 0-based vertices. Adjacency
//! lists are the source of truth and are kept sorted, so iteration order
//! is deterministic everywhere; the edge index map is derived from them.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Simple undirected graph. Neighbor lists are sorted ascending and the
/// canonical edge list stores each edge once as `(u, v)` with `u < v`,
/// sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl Graph {
    /// Empty graph on `n` vertices.
    pub fn empty(n: usize) -> Graph {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints. Edge order in the input does not matter.
    pub fn from_edges(n: usize, list: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut g = Graph::empty(n);
        for (u, v) in list {
            g.add_edge(u, v)?;
        }
        g.normalize();
        Ok(g)
    }

    fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n {
            return Err(Error::VertexOutOfRange { vertex: u, n: self.n });
        }
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let key = (u.min(v), u.max(v));
        if self.index.contains_key(&key) {
            return Err(Error::DuplicateEdge(key.0, key.1));
        }
        self.index.insert(key, 0);
        self.adj[u].push(v);
        self.adj[v].push(u);
        Ok(())
    }

    /// Restores sortedness and rebuilds the canonical edge list.
    fn normalize(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
        }
        self.edges.clear();
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    self.edges.push((u, v));
                }
            }
        }
        self.index = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges).expect("complete graph is always valid")
    }

    /// The complete bipartite graph `K_{a,b}` flattened onto `a + b`
    /// vertices: the left class is `0..a`, the right class `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut edges = Vec::with_capacity(a * b);
        for u in 0..a {
            for v in 0..b {
                edges.push((u, a + v));
            }
        }
        Graph::from_edges(a + b, edges).expect("complete bipartite graph is always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.index.contains_key(&(u.min(v), u.max(v)))
    }

    /// Position of `{u, v}` in the canonical edge list.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    /// True when every edge of `self` is an edge of `other` (vertex counts
    /// must agree).
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges.iter().all(|&(u, v)| other.has_edge(u, v))
    }

    /// Splits a graph whose edges all cross the cut `0..left | left..n`
    /// into a [`BipartiteGraph`]. Fails if any edge stays inside a class.
    pub fn split_bipartite(&self, left: usize) -> Result<BipartiteGraph> {
        if left > self.n {
            return Err(Error::invalid("left", "left class larger than the graph"));
        }
        let right = self.n - left;
        let mut edges = Vec::with_capacity(self.edges.len());
        for &(u, v) in &self.edges {
            // u < v, so a crossing edge always has u on the left.
            if u >= left || v < left {
                return Err(Error::invalid(
                    "left",
                    format!("edge ({u}, {v}) does not cross the ({left}, {right}) split"),
                ));
            }
            edges.push((u, v - left));
        }
        BipartiteGraph::from_edges(left, right, edges)
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), &self.render())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Graph> {
        let path = path.as_ref();
        let body = read_file(path)?;
        parse_graph(&body, path, false).map(|(g, _)| g)
    }
}

/// Bipartite graph with classes `A = 0..a` and `B = 0..b` indexed
/// independently. Adjacency is stored from the left side; right-side
/// lists are derived on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    a: usize,
    b: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn empty(a: usize, b: usize) -> BipartiteGraph {
        BipartiteGraph {
            a,
            b,
            adj: vec![Vec::new(); a],
        }
    }

    pub fn from_edges(
        a: usize,
        b: usize,
        list: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<BipartiteGraph> {
        let mut g = BipartiteGraph::empty(a, b);
        for (l, r) in list {
            g.add_edge(l, r)?;
        }
        Ok(g)
    }

    /// Inserts an edge, keeping the neighbor list sorted (`has_edge`
    /// relies on that).
    pub fn add_edge(&mut self, l: usize, r: usize) -> Result<()> {
        if l >= self.a {
            return Err(Error::VertexOutOfRange { vertex: l, n: self.a });
        }
        if r >= self.b {
            return Err(Error::VertexOutOfRange { vertex: r, n: self.b });
        }
        match self.adj[l].binary_search(&r) {
            Ok(_) => Err(Error::DuplicateEdge(l, r)),
            Err(pos) => {
                self.adj[l].insert(pos, r);
                Ok(())
            }
        }
    }

    pub fn complete(a: usize, b: usize) -> BipartiteGraph {
        BipartiteGraph {
            a,
            b,
            adj: vec![(0..b).collect(); a],
        }
    }

    pub fn left(&self) -> usize {
        self.a
    }

    pub fn right(&self) -> usize {
        self.b
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Edges as `(left, right)` pairs, left-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(l, rs)| rs.iter().map(move |&r| (l, r)))
    }

    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.adj[l]
    }

    pub fn degree(&self, l: usize) -> usize {
        self.adj[l].len()
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.b];
        for rs in &self.adj {
            for &r in rs {
                deg[r] += 1;
            }
        }
        deg
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.adj[l].binary_search(&r).is_ok()
    }

    pub fn min_left_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Number of edges between a left subset `xs` and a right subset `ys`.
    pub fn edges_between(&self, xs: &[usize], ys: &[usize]) -> Result<usize> {
        let mut in_y = vec![false; self.b];
        for &y in ys {
            if y >= self.b {
                return Err(Error::VertexOutOfRange { vertex: y, n: self.b });
            }
            in_y[y] = true;
        }
        let mut count = 0;
        for &x in xs {
            if x >= self.a {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.a });
            }
            count += self.adj[x].iter().filter(|&&r| in_y[r]).count();
        }
        Ok(count)
    }

    /// Restriction to a contiguous block `[lo, hi)` of right vertices,
    /// with right indices rebased to `0..hi-lo`.
    pub fn restrict_right(&self, lo: usize, hi: usize) -> BipartiteGraph {
        assert!(lo <= hi && hi <= self.b);
        let adj = self
            .adj
            .iter()
            .map(|rs| {
                rs.iter()
                    .filter(|&&r| lo <= r && r < hi)
                    .map(|&r| r - lo)
                    .collect()
            })
            .collect();
        BipartiteGraph {
            a: self.a,
            b: hi - lo,
            adj,
        }
    }
}

/// A graph together with a color per edge. Colors are 1-based and live
/// in `[1, palette]`; the vector is parallel to the canonical edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    graph: Graph,
    colors: Vec<u32>,
    palette: u32,
}

impl ColoredGraph {
    pub fn new(graph: Graph, colors: Vec<u32>, palette: u32) -> Result<ColoredGraph> {
        if colors.len() != graph.edge_count() {
            return Err(Error::invalid(
                "colors",
                format!(
                    "expected {} colors, got {}",
                    graph.edge_count(),
                    colors.len()
                ),
            ));
        }
        if let Some(&c) = colors.iter().find(|&&c| c == 0 || c > palette) {
            return Err(Error::invalid(
                "colors",
                format!("color {c} outside the palette [1, {palette}]"),
            ));
        }
        Ok(ColoredGraph {
            graph,
            colors,
            palette,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn palette(&self) -> u32 {
        self.palette
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color_of(&self, u: usize, v: usize) -> Option<u32> {
        self.graph.edge_index(u, v).map(|i| self.colors[i])
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.graph.n(), self.graph.edge_count());
        for (i, &(u, v)) in self.graph.edges().iter().enumerate() {
            let _ = writeln!(out, "{u} {v} {}", self.colors[i]);
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), &self.render())
    }

    /// Loads a colored graph. The palette is not stored in the file, so
    /// the caller supplies it; pass 0 to use the largest color seen.
    pub fn load(path: impl AsRef<Path>, palette: u32) -> Result<ColoredGraph> {
        let path = path.as_ref();
        let body = read_file(path)?;
        let (graph, colors) = parse_graph(&body, path, true)?;
        let palette = if palette == 0 {
            colors.iter().copied().max().unwrap_or(1)
        } else {
            palette
        };
        ColoredGraph::new(graph, colors, palette)
    }
}

/// An orientation of a host graph: one direction per canonical edge.
/// `outward[i]` is true when edge `(u, v)` with `u < v` points `u -> v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    graph: Graph,
    outward: Vec<bool>,
    out_adj: Vec<Vec<usize>>,
}

impl Orientation {
    pub fn new(graph: Graph, outward: Vec<bool>) -> Result<Orientation> {
        if outward.len() != graph.edge_count() {
            return Err(Error::invalid(
                "outward",
                format!(
                    "expected {} directions, got {}",
                    graph.edge_count(),
                    outward.len()
                ),
            ));
        }
        let mut out_adj = vec![Vec::new(); graph.n()];
        for (i, &(u, v)) in graph.edges().iter().enumerate() {
            if outward[i] {
                out_adj[u].push(v);
            } else {
                out_adj[v].push(u);
            }
        }
        for list in &mut out_adj {
            list.sort_unstable();
        }
        // Each edge contributes exactly one arc, so the out-degrees sum to
        // e(G) and no pair can be doubly directed.
        debug_assert_eq!(
            out_adj.iter().map(Vec::len).sum::<usize>(),
            graph.edge_count()
        );
        Ok(Orientation {
            graph,
            outward,
            out_adj,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn min_out_degree(&self) -> usize {
        (0..self.graph.n())
            .map(|v| self.out_degree(v))
            .min()
            .unwrap_or(0)
    }

    /// True when the edge `{u, v}` is directed `u -> v`.
    pub fn points(&self, u: usize, v: usize) -> bool {
        let i = self
            .graph
            .edge_index(u, v)
            .expect("points() queried on a non-edge");
        self.outward[i] == (u < v)
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Shared parser for the plain and colored text formats: a `n m` header,
/// then `m` lines of `u v` (plus a color when `colored`). Lines starting
/// with `#` and blank lines are skipped.
fn parse_graph(body: &str, path: &Path, colored: bool) -> Result<(Graph, Vec<u32>)> {
    let err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut rows = body
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line_no, header) = rows
        .next()
        .ok_or_else(|| err(1, "missing `n m` header".into()))?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(line_no, "header must be `n m`".into()))?;
    let m: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(line_no, "header must be `n m`".into()))?;
    if parts.next().is_some() {
        return Err(err(line_no, "header must be exactly `n m`".into()));
    }

    let want = if colored { 3 } else { 2 };
    let mut edges = Vec::with_capacity(m);
    let mut colors = Vec::new();
    for (line_no, row) in rows {
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != want {
            return Err(err(
                line_no,
                format!("expected {want} fields, got {}", fields.len()),
            ));
        }
        let parse_usize = |t: &str| -> Result<usize> {
            t.parse()
                .map_err(|_| err(line_no, format!("bad integer `{t}`")))
        };
        let u = parse_usize(fields[0])?;
        let v = parse_usize(fields[1])?;
        edges.push((u, v));
        if colored {
            let c: u32 = fields[2]
                .parse()
                .map_err(|_| err(line_no, format!("bad color `{}`", fields[2])))?;
            if c == 0 {
                return Err(err(line_no, "colors are 1-based; got 0".into()));
            }
            colors.push(c);
        }
    }
    if edges.len() != m {
        return Err(err(
            body.lines().count(),
            format!("header promised {m} edges, file has {}", edges.len()),
        ));
    }

    // Rebuild through from_edges so ordering in the file cannot matter,
    // then remap colors onto the canonical edge order.
    let graph = Graph::from_edges(n, edges.iter().copied()).map_err(|e| err(1, e.to_string()))?;
    let colors = if colored {
        let mut out = vec![0u32; graph.edge_count()];
        for (&(u, v), &c) in edges.iter().zip(&colors) {
            out[graph.edge_index(u, v).expect("edge just inserted")] = c;
        }
        out
    } else {
        colors
    };
    Ok((graph, colors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_edge_order_is_sorted() {
        let g = Graph::from_edges(4, [(3, 1), (0, 2), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 3)]);
        assert_eq!(g.neighbors(1), &[0, 3]);
        assert_eq!(g.min_degree(), 1);
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(matches!(
            Graph::from_edges(3, [(0, 0)]),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 7)]),
            Err(Error::VertexOutOfRange { vertex: 7, n: 3 })
        ));
    }

    #[test]
    fn complete_graph_counts() {
        let g = Graph::complete(6);
        assert_eq!(g.edge_count(), 15);
        assert_eq!(g.min_degree(), 5);
        let b = Graph::complete_bipartite(3, 4);
        assert_eq!(b.edge_count(), 12);
        assert!(b.has_edge(0, 3));
        assert!(!b.has_edge(0, 1));
    }

    #[test]
    fn split_bipartite_roundtrip() {
        let g = Graph::complete_bipartite(3, 4);
        let b = g.split_bipartite(3).unwrap();
        assert_eq!((b.left(), b.right(), b.edge_count()), (3, 4, 12));
        // K_3 has internal edges on both sides of any split.
        assert!(Graph::complete(3).split_bipartite(1).is_err());
    }

    #[test]
    fn edges_between_matches_direct_count() {
        let b = BipartiteGraph::from_edges(3, 3, [(0, 0), (0, 1), (1, 1), (2, 2)]).unwrap();
        assert_eq!(b.edges_between(&[0, 1], &[1]).unwrap(), 2);
        assert_eq!(b.edges_between(&[0, 1, 2], &[0, 1, 2]).unwrap(), 4);
        assert_eq!(b.edges_between(&[], &[0, 1, 2]).unwrap(), 0);
        assert!(b.edges_between(&[5], &[0]).is_err());
    }

    #[test]
    fn restrict_right_rebases_indices() {
        let b = BipartiteGraph::from_edges(2, 4, [(0, 0), (0, 2), (1, 3)]).unwrap();
        let r = b.restrict_right(2, 4);
        assert_eq!(r.right(), 2);
        assert_eq!(r.neighbors(0), &[0]);
        assert_eq!(r.neighbors(1), &[1]);
    }

    #[test]
    fn orientation_arcs_partition_edges() {
        let g = Graph::complete(4);
        let outward = vec![true; 6];
        let o = Orientation::new(g, outward).unwrap();
        let total: usize = (0..4).map(|v| o.out_degree(v)).sum();
        assert_eq!(total, 6);
        assert!(o.points(0, 3));
        assert!(!o.points(3, 0));
    }

    #[test]
    fn graph_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        let g = Graph::from_edges(5, [(0, 4), (1, 2), (2, 3)]).unwrap();
        g.save(&path).unwrap();
        assert_eq!(Graph::load(&path).unwrap(), g);
    }

    #[test]
    fn colored_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let c = ColoredGraph::new(g, vec![2, 5], 6).unwrap();
        c.save(&path).unwrap();
        assert_eq!(ColoredGraph::load(&path, 6).unwrap(), c);
        // Palette autodetection picks the max color.
        assert_eq!(ColoredGraph::load(&path, 0).unwrap().palette(), 5);
    }

    #[test]
    fn parser_reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "# comment\n3 2\n0 1\n0 1 9\n").unwrap();
        let msg = Graph::load(&path).unwrap_err().to_string();
        assert!(msg.contains(":4:"), "unexpected error: {msg}");

        std::fs::write(&path, "3 5\n0 1\n").unwrap();
        let msg = Graph::load(&path).unwrap_err().to_string();
        assert!(msg.contains("promised 5"), "unexpected error: {msg}");
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ok.txt");
        std::fs::write(&path, "# header\n\n4 2\n# edge block\n0 1\n\n2 3\n").unwrap();
        let g = Graph::load(&path).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
    }
}
