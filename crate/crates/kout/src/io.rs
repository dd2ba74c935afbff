//! Plain-text graph files: a `n m` header line, then one `u v` line per
//! edge (0-based), with a trailing color column for colored graphs. Lines
//! starting with `#` are comments.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Graph};

pub fn write_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let wrap = |source| Error::Io { path: path.into(), source };
    let mut w = BufWriter::new(File::create(path).map_err(wrap)?);
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "{} {}", g.n(), g.edge_count())?;
        for &(u, v) in g.edges() {
            writeln!(w, "{u} {v}")?;
        }
        w.flush()
    };
    emit().map_err(wrap)
}

pub fn write_colored(cg: &ColoredGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let wrap = |source| Error::Io { path: path.into(), source };
    let g = cg.graph();
    let mut w = BufWriter::new(File::create(path).map_err(wrap)?);
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "{} {}", g.n(), g.edge_count())?;
        for &(u, v) in g.edges() {
            let c = cg.color_of(u, v).expect("iterating own edges");
            writeln!(w, "{u} {v} {c}")?;
        }
        w.flush()
    };
    emit().map_err(wrap)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let (n, rows) = read_rows(path.as_ref(), false)?;
    Graph::from_edges(n, rows.into_iter().map(|(u, v, _)| (u, v)))
}

/// Reads a colored graph; the palette is taken as the largest color seen.
pub fn read_colored(path: impl AsRef<Path>) -> Result<ColoredGraph> {
    let (n, rows) = read_rows(path.as_ref(), true)?;
    let palette = rows.iter().map(|&(_, _, c)| c).max().unwrap_or(1);
    // from_edges sorts edges canonically, so colors are re-attached by
    // pair rather than input order.
    let g = Graph::from_edges(n, rows.iter().map(|&(u, v, _)| (u, v)))?;
    let by_pair: std::collections::HashMap<(usize, usize), u32> = rows
        .into_iter()
        .map(|(u, v, c)| ((u.min(v), u.max(v)), c))
        .collect();
    let colors = g.edges().iter().map(|e| by_pair[e]).collect();
    ColoredGraph::new(g, colors, palette)
}

fn read_rows(path: &Path, colored: bool) -> Result<(usize, Vec<(usize, usize, u32)>)> {
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.into(),
        line,
        reason,
    };
    let file = File::open(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let mut header: Option<(usize, usize)> = None;
    let mut rows = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| Error::Io { path: path.into(), source })?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        match header {
            None => {
                let [n, m] = fields[..] else {
                    return Err(parse_err(lineno, format!("expected `n m`, got `{text}`")));
                };
                let n = n.parse().map_err(|e| parse_err(lineno, format!("bad n: {e}")))?;
                let m = m.parse().map_err(|e| parse_err(lineno, format!("bad m: {e}")))?;
                header = Some((n, m));
            }
            Some(_) => {
                let expect = if colored { "u v color" } else { "u v" };
                let (pair, color) = match (colored, &fields[..]) {
                    (false, [u, v]) => ((u, v), "1"),
                    (true, [u, v, c]) => ((u, v), *c),
                    _ => {
                        return Err(parse_err(
                            lineno,
                            format!("expected `{expect}`, got `{text}`"),
                        ))
                    }
                };
                let u = pair.0.parse().map_err(|e| parse_err(lineno, format!("bad u: {e}")))?;
                let v = pair.1.parse().map_err(|e| parse_err(lineno, format!("bad v: {e}")))?;
                let c = color.parse().map_err(|e| parse_err(lineno, format!("bad color: {e}")))?;
                rows.push((u, v, c));
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(parse_err(0, "empty file".into()));
    };
    if rows.len() != m {
        return Err(parse_err(
            0,
            format!("header promises {m} edges, file has {}", rows.len()),
        ));
    }
    Ok((n, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sample_colored;
    use crate::seed::Seed;

    #[test]
    fn graph_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4), (0, 4)]).unwrap();
        write_graph(&g, &path).unwrap();
        let back = read_graph(&path).unwrap();
        assert_eq!(back.n(), 5);
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn colored_roundtrip_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let cg = sample_colored(&Graph::complete(6), 0.7, 9, Seed(4));
        write_colored(&cg, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, format!("# colored sample\n{text}")).unwrap();
        let back = read_colored(&path).unwrap();
        assert_eq!(back.graph().edges(), cg.graph().edges());
        for &(u, v) in cg.graph().edges() {
            assert_eq!(back.color_of(u, v), cg.color_of(u, v));
        }
    }

    #[test]
    fn malformed_files_are_rejected_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "3 2\n0 1\n").unwrap();
        assert!(matches!(read_graph(&path), Err(Error::Parse { .. })));
        std::fs::write(&path, "3 1\n0 1 extra junk\n").unwrap();
        let err = read_graph(&path).unwrap_err();
        assert!(err.to_string().contains(":2:"), "got {err}");
    }
}
