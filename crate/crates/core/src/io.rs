//! Text formats and the random instance generator.
//!
//! Hypergraphs: one edge per line, optional `label:` prefix, `#` comments.
//! Decompositions:
//!
//! ```text
//! s ghtd <bags> <num>/<den> <n> <m>
//! b <id> <vertex>...
//! t <id> <id>
//! c <id> <edge>...          (or <edge>=<num>/<den> for fractional weights)
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use num_traits::Zero;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::{Certificate, CoverCertificate, FractionalWeights};
use crate::decomposition::{validate, TreeDecomposition};
use crate::error::{domain, Error, Result};
use crate::hypergraph::Hypergraph;
use crate::ratlp::Rational;
use crate::vertex_set::VertexSet;

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, message: message.into() })
}

/// A parsed `.hg` file together with where each edge came from.
#[derive(Debug, Clone)]
pub struct HgDocument {
    pub lines: Vec<String>,
    pub hypergraph: Hypergraph,
    /// 1-based source line of each edge, by label.
    pub edge_lines: BTreeMap<String, usize>,
}

pub fn parse_document(text: &str) -> Result<HgDocument> {
    let mut edges: Vec<(String, Vec<String>)> = Vec::new();
    let mut edge_lines = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (label, rest) = match body.split_once(':') {
            Some((l, r)) => {
                let l = l.trim();
                if l.is_empty() || l.contains(char::is_whitespace) {
                    return parse_err(line, format!("malformed edge label {l:?}"));
                }
                (l.to_string(), r)
            }
            None => (format!("e{}", edges.len() + 1), body),
        };
        let mut seen = HashSet::new();
        let tokens: Vec<String> = rest.split_whitespace().filter(|t| seen.insert(*t)).map(String::from).collect();
        if tokens.is_empty() {
            return parse_err(line, format!("edge {label} has no vertices"));
        }
        if edge_lines.insert(label.clone(), line).is_some() {
            return parse_err(line, format!("duplicate edge label {label}"));
        }
        edges.push((label, tokens));
    }
    if edges.is_empty() {
        return parse_err(0, "no edges in input");
    }
    let hypergraph = Hypergraph::new(edges).map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
    Ok(HgDocument { lines: text.lines().map(String::from).collect(), hypergraph, edge_lines })
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    Ok(parse_document(text)?.hypergraph)
}

/// One `label: v...` line per edge, in edge order.
pub fn serialize_hypergraph(h: &Hypergraph) -> String {
    let mut out = String::new();
    for e in h.edges() {
        writeln!(out, "{}: {}", e.label, h.labels_of(&e.vertices).join(" ")).expect("write to string");
    }
    out
}

fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `p/q` or an integer literal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((p, q)) => p.trim().parse().ok().zip(q.trim().parse().ok()).and_then(|(p, q): (num_bigint::BigInt, num_bigint::BigInt)| {
            (!q.is_zero()).then(|| Rational::new(p, q))
        }),
        None => t.parse().ok().map(Rational::from_integer),
    };
    match parsed {
        Some(r) => Ok(r),
        None => domain(format!("not a rational number: {s:?}")),
    }
}

/// Serializes a valid decomposition. Node ids are renumbered `1..=N` in
/// ascending order of the original ids.
pub fn serialize_decomposition(
    h: &Hypergraph,
    td: &TreeDecomposition,
    width: &Rational,
    certificates: Option<&BTreeMap<usize, Certificate>>,
) -> Result<String> {
    let report = validate(h, td);
    if !report.is_valid() {
        return domain(format!("refusing to serialize an invalid decomposition: {}", report.describe(h).trim_end()));
    }
    let ids: BTreeMap<usize, usize> = td.nodes().enumerate().map(|(i, n)| (n, i + 1)).collect();
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "s ghtd {} {} {} {}", td.num_nodes(), fmt_rational(width), h.num_vertices(), h.num_edges()).expect("write");
    for (node, bag) in td.bags() {
        let mut line = format!("b {}", ids[node]);
        for v in h.labels_of(bag) {
            line.push(' ');
            line.push_str(v);
        }
        writeln!(w, "{line}").expect("write");
    }
    let mut edges: Vec<(usize, usize)> = td.edges().iter().map(|(a, b)| (ids[a].min(ids[b]), ids[a].max(ids[b]))).collect();
    edges.sort_unstable();
    for (a, b) in edges {
        writeln!(w, "t {a} {b}").expect("write");
    }
    if let Some(certs) = certificates {
        for (node, cert) in certs {
            let Some(id) = ids.get(node) else {
                return domain(format!("certificate for unknown node {node}"));
            };
            let mut line = format!("c {id}");
            match cert {
                Certificate::Integral(c) => {
                    for l in &c.edges {
                        line.push(' ');
                        line.push_str(l);
                    }
                }
                Certificate::Fractional(f) => {
                    let mut entries: Vec<(&String, &Rational)> = f.weights.iter().collect();
                    entries.sort_by_key(|(l, _)| h.edge_index(l));
                    for (l, wt) in entries {
                        write!(line, " {l}={}", fmt_rational(wt)).expect("write");
                    }
                }
            }
            writeln!(w, "{line}").expect("write");
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionFile {
    pub td: TreeDecomposition,
    pub width: Rational,
    pub certificates: BTreeMap<usize, Certificate>,
}

/// Parses the decomposition format against `h`; node ids become `id - 1`.
pub fn parse_decomposition(h: &Hypergraph, text: &str) -> Result<DecompositionFile> {
    let mut header: Option<(usize, Rational)> = None;
    let mut bags: BTreeMap<usize, VertexSet> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut certificates = BTreeMap::new();
    let node_id = |line: usize, tok: &str| -> Result<usize> {
        match tok.parse::<usize>() {
            Ok(id) if id >= 1 => Ok(id - 1),
            _ => parse_err(line, format!("bad node id {tok:?}")),
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if header.is_none() {
            if toks.len() != 6 || toks[0] != "s" || toks[1] != "ghtd" {
                return parse_err(line, "expected header `s ghtd <bags> <width> <n> <m>`");
            }
            let count: usize = toks[2].parse().or_else(|_| parse_err(line, "bad bag count"))?;
            let width = parse_rational(toks[3]).or_else(|_| parse_err(line, "bad width"))?;
            let n: usize = toks[4].parse().or_else(|_| parse_err(line, "bad vertex count"))?;
            let m: usize = toks[5].parse().or_else(|_| parse_err(line, "bad edge count"))?;
            if n != h.num_vertices() || m != h.num_edges() {
                return parse_err(line, format!("header names {n} vertices and {m} edges, hypergraph has {} and {}", h.num_vertices(), h.num_edges()));
            }
            header = Some((count, width));
            continue;
        }
        match toks[0] {
            "b" if toks.len() >= 2 => {
                let id = node_id(line, toks[1])?;
                let mut bag = VertexSet::new();
                for v in &toks[2..] {
                    match h.index_of(v) {
                        Some(x) => {
                            bag.insert(x);
                        }
                        None => return parse_err(line, format!("unknown vertex {v}")),
                    }
                }
                if bags.insert(id, bag).is_some() {
                    return parse_err(line, format!("bag {} defined twice", id + 1));
                }
            }
            "t" if toks.len() == 3 => edges.push((line, node_id(line, toks[1])?, node_id(line, toks[2])?)),
            "c" if toks.len() >= 2 => {
                let id = node_id(line, toks[1])?;
                let weighted = toks[2..].iter().any(|t| t.contains('='));
                let cert = if weighted {
                    let mut weights = BTreeMap::new();
                    for t in &toks[2..] {
                        let Some((l, w)) = t.split_once('=') else {
                            return parse_err(line, "mixed weighted and plain certificate entries");
                        };
                        let w = parse_rational(w).or_else(|_| parse_err(line, format!("bad weight {w:?}")))?;
                        weights.insert(l.to_string(), w);
                    }
                    let total = weights.values().fold(Rational::zero(), |a, w| a + w);
                    Certificate::Fractional(FractionalWeights { weights, total })
                } else {
                    Certificate::Integral(CoverCertificate { edges: toks[2..].iter().map(|s| s.to_string()).collect() })
                };
                for l in match &cert {
                    Certificate::Integral(c) => c.edges.clone(),
                    Certificate::Fractional(f) => f.weights.keys().cloned().collect(),
                } {
                    if h.edge(&l).is_none() {
                        return parse_err(line, format!("unknown edge {l}"));
                    }
                }
                certificates.insert(id, cert);
            }
            _ => return parse_err(line, format!("unrecognized line {body:?}")),
        }
    }
    let Some((count, width)) = header else {
        return parse_err(0, "missing header");
    };
    if bags.len() != count {
        return parse_err(0, format!("header announces {count} bags, found {}", bags.len()));
    }
    for &(line, a, b) in &edges {
        if !bags.contains_key(&a) || !bags.contains_key(&b) {
            return parse_err(line, "tree edge names a missing bag");
        }
    }
    for id in certificates.keys() {
        if !bags.contains_key(id) {
            return parse_err(0, format!("certificate for missing bag {}", id + 1));
        }
    }
    let td = TreeDecomposition::new(bags, edges.into_iter().map(|(_, a, b)| (a, b)));
    Ok(DecompositionFile { td, width, certificates })
}

/// Seeded random hypergraph on `v1..vn` with `m` edges of size in
/// `[2, rank]`, plus bridging edges that make it connected.
pub fn generate_random(n: usize, m: usize, rank: usize, seed: u64) -> Result<Hypergraph> {
    if n < 2 || m < 1 || rank < 2 {
        return domain(format!("need n >= 2, m >= 1, rank >= 2; got n={n}, m={m}, rank={rank}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = rank.min(n);
    let mut edges: Vec<Vec<usize>> = Vec::with_capacity(m);
    for _ in 0..m {
        let size = rng.gen_range(2..=top);
        let mut e = sample(&mut rng, n, size).into_vec();
        e.sort_unstable();
        edges.push(e);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for e in &edges {
        for &v in &e[1..] {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, v));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    for pair in groups.windows(2) {
        let a = pair[0][rng.gen_range(0..pair[0].len())];
        let b = pair[1][rng.gen_range(0..pair[1].len())];
        edges.push(vec![a.min(b), a.max(b)]);
    }
    Hypergraph::new(
        edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| (format!("e{}", i + 1), e.into_iter().map(|v| format!("v{}", v + 1)).collect::<Vec<_>>())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::fixtures::*;
    use crate::ratlp::{integer, rational};

    #[test]
    fn parses_plain_and_labelled_edges() {
        let h = parse_hypergraph("a b\nb c\na c").unwrap();
        assert_eq!(h, tri_with_default_labels());
        let h = parse_hypergraph("ab: a b # comment").unwrap();
        assert_eq!(h.num_edges(), 1);
        assert_eq!(h.edges()[0].label, "ab");
        let h = parse_hypergraph("a a b").unwrap();
        assert_eq!(h.edges()[0].vertices.len(), 2);
    }

    fn tri_with_default_labels() -> Hypergraph {
        Hypergraph::new([("e1", ["a", "b"]), ("e2", ["b", "c"]), ("e3", ["a", "c"])]).unwrap()
    }

    #[test]
    fn parse_errors_carry_lines() {
        let line = |t: &str| match parse_hypergraph(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line(""), 0);
        assert_eq!(line("# only a comment\n\n"), 0);
        assert_eq!(line("a b\nx:\n"), 2);
        assert_eq!(line("x: a\n\nx: b"), 3);
        assert_eq!(line("e2: a b\nc d"), 2);
        assert_eq!(line(": a b"), 1);
    }

    #[test]
    fn hypergraph_round_trip() {
        for h in [tri(), path(7), k44(), one()] {
            assert_eq!(parse_hypergraph(&serialize_hypergraph(&h)).unwrap(), h);
        }
    }

    fn edge_path(h: &Hypergraph) -> TreeDecomposition {
        let n = h.num_edges();
        TreeDecomposition::new(h.edges().iter().enumerate().map(|(i, e)| (i, e.vertices.clone())), (1..n).map(|i| (i - 1, i)))
    }

    #[test]
    fn decomposition_format() {
        let p = path(5);
        let td = edge_path(&p);
        let text = serialize_decomposition(&p, &td, &integer(1), None).unwrap();
        assert_eq!(text, "s ghtd 4 1/1 5 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\nb 4 4 5\nt 1 2\nt 2 3\nt 3 4\n");
        let back = parse_decomposition(&p, &text).unwrap();
        assert_eq!(back.td, td);
        assert_eq!(back.width, integer(1));

        let t = tri();
        let single = TreeDecomposition::single(t.vertices().clone());
        let certs = BTreeMap::from([(0, Certificate::Integral(CoverCertificate { edges: vec!["ab".into(), "bc".into()] }))]);
        let text = serialize_decomposition(&t, &single, &integer(2), Some(&certs)).unwrap();
        assert_eq!(text, "s ghtd 1 2/1 3 3\nb 1 a b c\nc 1 ab bc\n");
        assert_eq!(parse_decomposition(&t, &text).unwrap().certificates, certs);

        let (_, w) = crate::cover::fractional_cover_number(&t, t.vertices()).unwrap();
        let certs = BTreeMap::from([(0, Certificate::Fractional(w))]);
        let text = serialize_decomposition(&t, &single, &rational(3, 2), Some(&certs)).unwrap();
        assert_eq!(text, "s ghtd 1 3/2 3 3\nb 1 a b c\nc 1 ab=1/2 bc=1/2 ca=1/2\n");
        let back = parse_decomposition(&t, &text).unwrap();
        assert_eq!(back.certificates, certs);
        assert_eq!(back.width, rational(3, 2));
    }

    #[test]
    fn decomposition_errors() {
        let p = path(3);
        let mut td = edge_path(&p);
        td.remove_edge(0, 1);
        assert!(serialize_decomposition(&p, &td, &integer(1), None).is_err());
        let bad = [
            "b 1 1 2",
            "s ghtd 1 1/1 3 2\nb 1 1 9",
            "s ghtd 2 1/1 3 2\nb 1 1 2 3",
            "s ghtd 1 1/1 4 2\nb 1 1 2 3",
            "s ghtd 1 1/1 3 2\nb 1 1 2 3\nt 1 2",
            "s ghtd 1 1/1 3 2\nb 0 1 2 3",
            "s ghtd 1 1/1 3 2\nb 1 1 2 3\nc 1 zz",
            "s ghtd 1 x 3 2\nb 1 1 2 3",
        ];
        for text in bad {
            assert!(matches!(parse_decomposition(&p, text), Err(Error::Parse { .. })), "{text}");
        }
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/2").unwrap(), rational(3, 2));
        assert_eq!(parse_rational("4").unwrap(), integer(4));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), rational(3, 2));
        for bad in ["", "1/0", "a", "1/2/3", "1.5"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn generator_contract() {
        let h = generate_random(6, 5, 3, 7).unwrap();
        assert!(h.is_connected());
        assert!(h.rank() <= 3);
        assert_eq!(h.num_vertices(), 6);
        assert_eq!(h, generate_random(6, 5, 3, 7).unwrap());
        let g = generate_random(8, 3, 2, 1).unwrap();
        assert!(g.edges().iter().all(|e| e.vertices.len() == 2));
        assert!(g.is_connected());
        assert!(generate_random(1, 3, 2, 0).is_err());
        assert!(generate_random(3, 0, 2, 0).is_err());
        assert!(generate_random(3, 3, 1, 0).is_err());
    }
}
