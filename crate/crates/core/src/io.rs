//! Plain-text edge lists and label files.
//!
//! Edge list: an optional header `# rsbm n=<n> d1=<d1> d2=<d2> seed=<seed>
//! sampler=<name>`, then one `u v` pair per line, 0-indexed, `u < v`, sorted.
//! Labels: one `1` or `-1` per line, line `i` holding vertex `i`.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Labeling};
use crate::graphgen::{PlantedInstance, SamplerKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeListHeader {
    pub n: usize,
    pub d1: usize,
    pub d2: usize,
    pub seed: u64,
    pub sampler: SamplerKind,
}

impl EdgeListHeader {
    pub fn of(inst: &PlantedInstance) -> Self {
        EdgeListHeader {
            n: inst.params.n,
            d1: inst.params.d1,
            d2: inst.params.d2,
            seed: inst.seed,
            sampler: inst.sampler,
        }
    }

    fn line(&self) -> String {
        format!(
            "# rsbm n={} d1={} d2={} seed={} sampler={}",
            self.n,
            self.d1,
            self.d2,
            self.seed,
            self.sampler.name()
        )
    }

    fn parse(line: &str, lineno: usize) -> Result<Self> {
        let perr = |m: String| Error::Parse {
            line: lineno,
            message: m,
        };
        let mut n = None;
        let mut d1 = None;
        let mut d2 = None;
        let mut seed = None;
        let mut sampler = None;
        for tok in line.trim_start_matches('#').split_whitespace().skip(1) {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| perr(format!("expected key=value, got `{tok}`")))?;
            let num = || v.parse::<u64>().map_err(|_| perr(format!("bad value for {k}: `{v}`")));
            match k {
                "n" => n = Some(num()? as usize),
                "d1" => d1 = Some(num()? as usize),
                "d2" => d2 = Some(num()? as usize),
                "seed" => seed = Some(num()?),
                "sampler" => {
                    sampler = Some(
                        SamplerKind::parse(v).ok_or_else(|| perr(format!("unknown sampler `{v}`")))?,
                    )
                }
                _ => return Err(perr(format!("unknown header key `{k}`"))),
            }
        }
        let missing = |k: &str| perr(format!("header is missing {k}"));
        Ok(EdgeListHeader {
            n: n.ok_or_else(|| missing("n"))?,
            d1: d1.ok_or_else(|| missing("d1"))?,
            d2: d2.ok_or_else(|| missing("d2"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            sampler: sampler.ok_or_else(|| missing("sampler"))?,
        })
    }
}

pub fn write_edge_list<W: Write>(w: W, graph: &Graph, header: Option<&EdgeListHeader>) -> Result<()> {
    let mut w = BufWriter::new(w);
    if let Some(h) = header {
        writeln!(w, "{}", h.line())?;
    }
    for (u, v) in graph.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an edge list. With a header the graph has `2n` vertices; without
/// one it has `max index + 1`.
pub fn read_edge_list<R: BufRead>(r: R) -> Result<(Graph, Option<EdgeListHeader>)> {
    let mut header = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut max_index = None;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            if t.trim_start_matches('#').trim_start().starts_with("rsbm") {
                if header.is_some() || !edges.is_empty() {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "header must be the first line".into(),
                    });
                }
                header = Some(EdgeListHeader::parse(t, lineno)?);
            }
            continue;
        }
        let perr = |m: String| Error::Parse {
            line: lineno,
            message: m,
        };
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(perr(format!("expected `u v`, got `{t}`")));
        }
        let parse = |s: &str| s.parse::<usize>().map_err(|_| perr(format!("not a vertex index: `{s}`")));
        let (u, v) = (parse(fields[0])?, parse(fields[1])?);
        if u == v {
            return Err(perr(format!("self-loop at {u}")));
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(perr(format!("repeated edge ({}, {})", key.0, key.1)));
        }
        max_index = Some(max_index.unwrap_or(0).max(key.1));
        edges.push(key);
    }
    let num_vertices = match &header {
        Some(h) => {
            let nv = 2 * h.n;
            if let Some(m) = max_index.filter(|&m| m >= nv) {
                return Err(Error::InvalidGraph(format!(
                    "vertex {m} out of range for header n={} ({nv} vertices)",
                    h.n
                )));
            }
            nv
        }
        None => max_index.map_or(0, |m| m + 1),
    };
    Ok((Graph::from_edges(num_vertices, &edges)?, header))
}

pub fn write_labels<W: Write>(w: W, labels: &Labeling) -> Result<()> {
    let mut w = BufWriter::new(w);
    for &s in labels.as_slice() {
        writeln!(w, "{s}")?;
    }
    w.flush()?;
    Ok(())
}

/// Accepts `1`, `+1` and `-1`; blank lines are skipped.
pub fn read_labels<R: BufRead>(r: R) -> Result<Labeling> {
    let mut out = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        out.push(match t {
            "1" | "+1" => 1,
            "-1" => -1,
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected 1 or -1, got `{t}`"),
                })
            }
        });
    }
    Labeling::new(out)
}

pub fn save_edge_list(path: &Path, graph: &Graph, header: Option<&EdgeListHeader>) -> Result<()> {
    write_edge_list(File::create(path)?, graph, header)
}

pub fn load_edge_list(path: &Path) -> Result<(Graph, Option<EdgeListHeader>)> {
    read_edge_list(BufReader::new(File::open(path)?))
}

pub fn save_labels(path: &Path, labels: &Labeling) -> Result<()> {
    write_labels(File::create(path)?, labels)
}

pub fn load_labels(path: &Path) -> Result<Labeling> {
    read_labels(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(graph: &Graph, h: Option<&EdgeListHeader>) -> String {
        let mut buf = Vec::new();
        write_edge_list(&mut buf, graph, h).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn header_round_trip() {
        let h = EdgeListHeader {
            n: 3,
            d1: 2,
            d2: 1,
            seed: 7,
            sampler: SamplerKind::Configuration,
        };
        let g = Graph::cycle(6);
        let s = text(&g, Some(&h));
        assert!(s.starts_with("# rsbm n=3 d1=2 d2=1 seed=7 sampler=configuration\n0 1\n0 5\n"));
        let (back, bh) = read_edge_list(s.as_bytes()).unwrap();
        assert_eq!(back, g);
        assert_eq!(bh, Some(h.clone()));
        assert_eq!(text(&back, bh.as_ref()), s);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = read_edge_list("0 1\n1 2\n2 x\n".as_bytes()).unwrap_err();
        assert_eq!(e, Error::Parse { line: 3, message: "not a vertex index: `x`".into() });
        let e = read_edge_list("0 1\n1 0\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = read_edge_list("0 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = read_edge_list("# rsbm n=2 d1=1 d2=1\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("seed"));
    }

    #[test]
    fn labels_round_trip() {
        let l = Labeling::new(vec![1, -1, -1, 1]).unwrap();
        let mut buf = Vec::new();
        write_labels(&mut buf, &l).unwrap();
        assert_eq!(buf, b"1\n-1\n-1\n1\n");
        assert_eq!(read_labels(&buf[..]).unwrap(), l);
        assert_eq!(read_labels("+1\n-1\n".as_bytes()).unwrap().as_slice(), &[1, -1]);
        assert!(matches!(read_labels("1\n0\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
    }
}
