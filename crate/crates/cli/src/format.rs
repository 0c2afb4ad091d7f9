//! The instance and routing text formats. 1-indexed in files, 0-indexed in
//! memory; the conversion happens here and nowhere else.

use std::collections::BTreeSet;
use std::fmt;

use mse_core::graph::{Graph, GraphBuilder, Instance, Routing, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// Parses an instance document:
///
/// ```text
/// c comment
/// p mse <n> <m> <s> <t> <p> <k>
/// e <u> <v> [<w>]      (m lines, 1-indexed, weight defaults to 1)
/// ```
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    struct Header {
        n: usize,
        m: usize,
        s: usize,
        t: usize,
        p: usize,
        k: u64,
        line: usize,
    }
    let mut header: Option<Header> = None;
    let mut edges: Vec<(VertexId, VertexId, u64)> = Vec::new();
    let mut seen_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return err(lineno, "duplicate header");
                }
                if toks.len() != 8 || toks[1] != "mse" {
                    return err(lineno, "expected `p mse <n> <m> <s> <t> <p> <k>`");
                }
                let nums: Result<Vec<u64>, _> = toks[2..].iter().map(|t| t.parse()).collect();
                let Ok(nums) = nums else {
                    return err(lineno, "header fields must be integers");
                };
                let (n, m, s, t, p, k) = (nums[0], nums[1], nums[2], nums[3], nums[4], nums[5]);
                if n == 0 {
                    return err(lineno, "need at least one vertex");
                }
                if s == 0 || s > n || t == 0 || t > n {
                    return err(lineno, "source/sink out of range");
                }
                if s == t {
                    return err(lineno, "source equals sink");
                }
                if p == 0 {
                    return err(lineno, "need at least one route");
                }
                header = Some(Header {
                    n: n as usize,
                    m: m as usize,
                    s: s as usize - 1,
                    t: t as usize - 1,
                    p: p as usize,
                    k,
                    line: lineno,
                });
            }
            "e" => {
                let Some(h) = header.as_ref() else {
                    return err(lineno, "edge before header");
                };
                if toks.len() != 3 && toks.len() != 4 {
                    return err(lineno, "expected `e <u> <v> [<w>]`");
                }
                let u: usize = match toks[1].parse() {
                    Ok(v) => v,
                    Err(_) => return err(lineno, "bad vertex id"),
                };
                let v: usize = match toks[2].parse() {
                    Ok(v) => v,
                    Err(_) => return err(lineno, "bad vertex id"),
                };
                if u == 0 || u > h.n || v == 0 || v > h.n {
                    return err(lineno, format!("vertex id out of range 1..={}", h.n));
                }
                if u == v {
                    return err(lineno, "self-loop");
                }
                let w: u64 = match toks.get(3) {
                    None => 1,
                    Some(tok) => match tok.parse() {
                        Ok(w) if w >= 1 => w,
                        _ => return err(lineno, "weight must be a positive integer"),
                    },
                };
                let key = (u.min(v), u.max(v));
                if !seen_pairs.insert(key) {
                    return err(lineno, format!("duplicate edge {u} {v}"));
                }
                edges.push((u - 1, v - 1, w));
            }
            other => return err(lineno, format!("unknown line type `{other}`")),
        }
    }
    let Some(h) = header else {
        return err(0, "missing header");
    };
    if edges.len() != h.m {
        return err(
            h.line,
            format!("header says {} edges, found {}", h.m, edges.len()),
        );
    }
    let mut b = GraphBuilder::new(h.n);
    for (u, v, w) in edges {
        b.add_weighted_edge(u, v, w);
    }
    Instance::new(b.build(), h.s, h.t, h.p, h.k).map_err(|e| ParseError {
        line: h.line,
        message: e.to_string(),
    })
}

/// Serializes an instance in the format read by [`parse_instance`].
pub fn write_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    out.push_str(&format!(
        "p mse {} {} {} {} {} {}\n",
        g.num_vertices(),
        g.num_edges(),
        inst.source + 1,
        inst.sink + 1,
        inst.num_routes,
        inst.budget
    ));
    for (_, u, v, w) in g.edges() {
        if w == 1 {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        } else {
            out.push_str(&format!("e {} {} {}\n", u + 1, v + 1, w));
        }
    }
    out
}

/// Serializes a routing: route count, one vertex list per route, then the
/// shared-edge ids (1-indexed into the instance's edge list).
pub fn write_routing(routing: &Routing) -> String {
    let mut out = String::new();
    out.push_str(&format!("routing {}\n", routing.routes.len()));
    for route in &routing.routes {
        let words: Vec<String> = route.iter().map(|v| (v + 1).to_string()).collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    }
    let words: Vec<String> = routing
        .shared_edges
        .iter()
        .map(|e| (e + 1).to_string())
        .collect();
    out.push_str("shared");
    if !words.is_empty() {
        out.push(' ');
        out.push_str(&words.join(" "));
    }
    out.push('\n');
    out
}

/// Parses the document produced by [`write_routing`] against a graph.
pub fn parse_routing(text: &str, g: &Graph) -> Result<Routing, ParseError> {
    let mut expected: Option<usize> = None;
    let mut routes: Vec<Vec<VertexId>> = Vec::new();
    let mut shared: Option<BTreeSet<usize>> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "routing" => {
                if expected.is_some() {
                    return err(lineno, "duplicate routing header");
                }
                let count: usize = match toks.get(1).and_then(|t| t.parse().ok()) {
                    Some(c) => c,
                    None => return err(lineno, "expected `routing <count>`"),
                };
                expected = Some(count);
            }
            "shared" => {
                if shared.is_some() {
                    return err(lineno, "duplicate shared line");
                }
                let mut ids = BTreeSet::new();
                for tok in &toks[1..] {
                    let e: usize = match tok.parse() {
                        Ok(e) => e,
                        Err(_) => return err(lineno, "bad edge id"),
                    };
                    if e == 0 || e > g.num_edges() {
                        return err(lineno, "edge id out of range");
                    }
                    ids.insert(e - 1);
                }
                shared = Some(ids);
            }
            _ => {
                if expected.is_none() {
                    return err(lineno, "route before header");
                }
                let mut route = Vec::with_capacity(toks.len());
                for tok in &toks {
                    let v: usize = match tok.parse() {
                        Ok(v) => v,
                        Err(_) => return err(lineno, "bad vertex id"),
                    };
                    if v == 0 || v > g.num_vertices() {
                        return err(lineno, "vertex id out of range");
                    }
                    route.push(v - 1);
                }
                routes.push(route);
            }
        }
    }
    let Some(expected) = expected else {
        return err(0, "missing routing header");
    };
    if routes.len() != expected {
        return err(
            0,
            format!("header says {expected} routes, found {}", routes.len()),
        );
    }
    let Some(shared) = shared else {
        return err(0, "missing shared line");
    };
    Ok(Routing {
        routes,
        shared_edges: shared,
    })
}
