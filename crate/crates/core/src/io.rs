//! Text formats for graphs and JSON helpers.
//!
//! Edge lists: a header `n m`, then `m` lines `u v` (0-indexed; a repeated
//! pair raises the multiplicity), then optional `L v c` lines giving `c`
//! self-loops at `v`. Bandwidth graphs: a header `n m`, then `m` lines
//! `u v b` and a line `source s`. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hardness::BandwidthGraph;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn number<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a non-negative integer, found {tok:?}"),
    })
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>) -> Result<(usize, usize)> {
    match lines.next() {
        Some((line, toks)) if toks.len() == 2 => {
            Ok((number(toks[0], line)?, number(toks[1], line)?))
        }
        Some((line, _)) => Err(Error::Parse {
            line,
            msg: "header must be `n m`".into(),
        }),
        None => Err(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        }),
    }
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (n, m) = header(&mut lines)?;
    let mut edges = Vec::with_capacity(m);
    let mut loops = vec![0u32; n];
    for (line, toks) in lines {
        match toks.as_slice() {
            ["L", v, c] => {
                let v: usize = number(v, line)?;
                if v >= n {
                    return Err(Error::Parse {
                        line,
                        msg: format!("node {v} out of range"),
                    });
                }
                loops[v] += number::<u32>(c, line)?;
            }
            [u, v] => {
                let (u, v): (usize, usize) = (number(u, line)?, number(v, line)?);
                if u >= n || v >= n {
                    return Err(Error::Parse {
                        line,
                        msg: format!("edge ({u}, {v}) out of range"),
                    });
                }
                edges.push((u, v));
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: "expected `u v` or `L v c`".into(),
                })
            }
        }
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header promises {m} edges, found {}", edges.len()),
        });
    }
    let g = Graph::from_edges(n, edges)?;
    if loops.iter().any(|&c| c > 0) {
        let loops = (0..n).map(|v| loops[v] + g.self_loops(v) as u32).collect();
        g.with_self_loops(loops)
    } else {
        Ok(g)
    }
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let real: usize = g
        .edges()
        .filter(|&(u, v, _)| u != v)
        .map(|(_, _, m)| m as usize)
        .sum();
    writeln!(out, "{} {}", g.node_count(), real).unwrap();
    for (u, v, m) in g.edges() {
        if u != v {
            for _ in 0..m {
                writeln!(out, "{u} {v}").unwrap();
            }
        }
    }
    for v in 0..g.node_count() {
        if g.self_loops(v) > 0 {
            writeln!(out, "L {v} {}", g.self_loops(v)).unwrap();
        }
    }
    out
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&fs::read_to_string(path)?)
}

pub fn write_edge_list(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    Ok(fs::write(path, format_edge_list(g))?)
}

pub fn parse_bandwidth_graph(text: &str) -> Result<BandwidthGraph> {
    let mut lines = content_lines(text);
    let (n, m) = header(&mut lines)?;
    let mut edges = Vec::with_capacity(m);
    let mut source = None;
    for (line, toks) in lines {
        match toks.as_slice() {
            ["source", s] => source = Some(number(s, line)?),
            [u, v, b] => edges.push((number(u, line)?, number(v, line)?, number(b, line)?)),
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: "expected `u v b` or `source s`".into(),
                })
            }
        }
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header promises {m} edges, found {}", edges.len()),
        });
    }
    let source = source.ok_or_else(|| Error::Parse {
        line: 1,
        msg: "missing `source s` line".into(),
    })?;
    BandwidthGraph::new(n, edges, source)
}

pub fn format_bandwidth_graph(bg: &BandwidthGraph) -> String {
    let mut out = format!("{} {}\n", bg.node_count, bg.edges.len());
    for &(u, v, b) in &bg.edges {
        writeln!(out, "{u} {v} {b}").unwrap();
    }
    writeln!(out, "source {}", bg.source).unwrap();
    out
}

pub fn read_bandwidth_graph(path: impl AsRef<Path>) -> Result<BandwidthGraph> {
    parse_bandwidth_graph(&fs::read_to_string(path)?)
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(fs::write(path, text)?)
}
