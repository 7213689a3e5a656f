//! Graphviz rendering of a typed diagram.
//!
//! Atoms become nodes named `n0`, `n1`, ... in depth-first order; identities,
//! braids and counits only join wires. Every wire becomes one edge from its
//! producer to its consumer, with `class` set to `down`, `up` or `bend`
//! (a wire turned around by a counit). Boundary strands of an open diagram
//! appear as `top*` and `bottom*` port nodes; each `let` occurrence is a
//! cluster.

use std::fmt::Write;

use crate::interface::{Dir, Interface};
use crate::types::FiniteType;

use super::check::{Typed, TypedKind};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flow {
    Down,
    Up,
    Bend,
}

struct Slot {
    parent: usize,
    ty: FiniteType,
    flow: Flow,
    producers: Vec<String>,
    consumers: Vec<String>,
}

struct Node {
    name: String,
    label: String,
    shape: &'static str,
    cluster: Option<usize>,
}

struct Cluster {
    name: String,
    parent: Option<usize>,
}

#[derive(Default)]
struct Ports {
    fwd_in: Vec<usize>,
    bwd_out: Vec<usize>,
    fwd_out: Vec<usize>,
    bwd_in: Vec<usize>,
}

#[derive(Default)]
struct Graph {
    slots: Vec<Slot>,
    nodes: Vec<Node>,
    clusters: Vec<Cluster>,
}

impl Graph {
    fn slot(&mut self, ty: &FiniteType, flow: Flow) -> usize {
        let id = self.slots.len();
        self.slots.push(Slot { parent: id, ty: ty.clone(), flow, producers: vec![], consumers: vec![] });
        id
    }

    fn find(&mut self, mut s: usize) -> usize {
        while self.slots[s].parent != s {
            let gp = self.slots[self.slots[s].parent].parent;
            self.slots[s].parent = gp;
            s = gp;
        }
        s
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.slots[hi].parent = lo;
        }
    }

    fn node(&mut self, label: String, iface: &Interface, cluster: Option<usize>, point: bool) -> Ports {
        let name = format!("n{}", self.nodes.len());
        let shape = if point {
            "point"
        } else if iface.fwd_in.is_empty() && iface.bwd_out.is_empty() {
            "triangle"
        } else if iface.fwd_out.is_empty() && iface.bwd_in.is_empty() {
            "invtriangle"
        } else {
            "circle"
        };
        self.nodes.push(Node { name: name.clone(), label, shape, cluster });
        let mut ports = Ports::default();
        for t in &iface.fwd_in {
            let s = self.slot(t, Flow::Down);
            self.slots[s].consumers.push(name.clone());
            ports.fwd_in.push(s);
        }
        for t in &iface.bwd_out {
            let s = self.slot(t, Flow::Up);
            self.slots[s].producers.push(name.clone());
            ports.bwd_out.push(s);
        }
        for t in &iface.fwd_out {
            let s = self.slot(t, Flow::Down);
            self.slots[s].producers.push(name.clone());
            ports.fwd_out.push(s);
        }
        for t in &iface.bwd_in {
            let s = self.slot(t, Flow::Up);
            self.slots[s].consumers.push(name.clone());
            ports.bwd_in.push(s);
        }
        ports
    }

    fn walk(&mut self, t: &Typed, cluster: Option<usize>) -> Ports {
        match &t.kind {
            TypedKind::Seq(items) => {
                let parts: Vec<Ports> = items.iter().map(|i| self.walk(i, cluster)).collect();
                for w in parts.windows(2) {
                    for (&a, &b) in w[0].fwd_out.iter().zip(&w[1].fwd_in) {
                        self.union(a, b);
                    }
                    for (&a, &b) in w[0].bwd_in.iter().zip(&w[1].bwd_out) {
                        self.union(a, b);
                    }
                }
                let mut parts = parts.into_iter();
                let first = parts.next().unwrap_or_default();
                let last = parts.last();
                match last {
                    Some(last) => Ports {
                        fwd_in: first.fwd_in,
                        bwd_out: first.bwd_out,
                        fwd_out: last.fwd_out,
                        bwd_in: last.bwd_in,
                    },
                    None => first,
                }
            }
            TypedKind::Tensor(items) => {
                let mut out = Ports::default();
                for i in items {
                    let p = self.walk(i, cluster);
                    out.fwd_in.extend(p.fwd_in);
                    out.bwd_out.extend(p.bwd_out);
                    out.fwd_out.extend(p.fwd_out);
                    out.bwd_in.extend(p.bwd_in);
                }
                out
            }
            TypedKind::Player(n) => self.node(n.clone(), &t.iface, cluster, false),
            TypedKind::Fun { name, .. } => self.node(name.clone(), &t.iface, cluster, false),
            TypedKind::Const { value, .. } => self.node(value.to_string(), &t.iface, cluster, false),
            TypedKind::Copy { .. } => self.node("copy".into(), &t.iface, cluster, true),
            TypedKind::Delete { .. } => self.node("delete".into(), &t.iface, cluster, true),
            TypedKind::Id(strands) => {
                let mut p = Ports::default();
                for s in strands.iter().filter(|s| s.ty != FiniteType::Unit) {
                    match s.dir {
                        Dir::Down => {
                            let id = self.slot(&s.ty, Flow::Down);
                            p.fwd_in.push(id);
                            p.fwd_out.push(id);
                        }
                        Dir::Up => {
                            let id = self.slot(&s.ty, Flow::Up);
                            p.bwd_out.push(id);
                            p.bwd_in.push(id);
                        }
                    }
                }
                p
            }
            TypedKind::Braid { perm, strands } => {
                let up = strands.first().is_some_and(|s| s.dir == Dir::Up);
                let flow = if up { Flow::Up } else { Flow::Down };
                let listed: Vec<usize> = strands.iter().map(|s| self.slot(&s.ty, flow)).collect();
                let permuted: Vec<usize> = perm.iter().map(|&i| listed[i]).collect();
                let keep = |g: &Graph, v: Vec<usize>| -> Vec<usize> {
                    v.into_iter().filter(|&s| g.slots[s].ty != FiniteType::Unit).collect()
                };
                let (listed, permuted) = (keep(self, listed), keep(self, permuted));
                if up {
                    Ports { bwd_in: listed, bwd_out: permuted, ..Ports::default() }
                } else {
                    Ports { fwd_in: listed, fwd_out: permuted, ..Ports::default() }
                }
            }
            TypedKind::Counit(ty) => {
                if *ty == FiniteType::Unit {
                    return Ports::default();
                }
                let s = self.slot(ty, Flow::Bend);
                Ports { fwd_in: vec![s], bwd_out: vec![s], ..Ports::default() }
            }
            TypedKind::Let(name, body) => {
                let id = self.clusters.len();
                self.clusters.push(Cluster { name: name.clone(), parent: cluster });
                self.walk(body, Some(id))
            }
        }
    }

    fn boundary(&mut self, prefix: &str, slots: &[usize], produce: &[bool]) {
        for (i, (&s, &p)) in slots.iter().zip(produce).enumerate() {
            let name = format!("{prefix}{i}");
            let label = self.slots[s].ty.to_string();
            self.nodes.push(Node { name: name.clone(), label, shape: "plaintext", cluster: None });
            if p {
                self.slots[s].producers.push(name);
            } else {
                self.slots[s].consumers.push(name);
            }
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders the diagram as a DOT digraph named `name`.
pub fn export_dot(name: &str, diagram: &Typed) -> String {
    let mut g = Graph::default();
    let ports = g.walk(diagram, None);
    let top: Vec<usize> = ports.fwd_in.iter().chain(&ports.bwd_out).copied().collect();
    let top_produces: Vec<bool> =
        ports.fwd_in.iter().map(|_| true).chain(ports.bwd_out.iter().map(|_| false)).collect();
    let bottom: Vec<usize> = ports.fwd_out.iter().chain(&ports.bwd_in).copied().collect();
    let bottom_produces: Vec<bool> =
        ports.fwd_out.iter().map(|_| false).chain(ports.bwd_in.iter().map(|_| true)).collect();
    g.boundary("top", &top, &top_produces);
    g.boundary("bottom", &bottom, &bottom_produces);

    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    let _ = writeln!(out, "  rankdir=TB;");
    write_nodes(&g, None, 1, &mut out);

    let n = g.slots.len();
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        let r = g.find(s);
        classes[r].push(s);
    }
    for members in classes.iter().filter(|m| !m.is_empty()) {
        let first = &g.slots[members[0]];
        if first.ty == FiniteType::Unit {
            continue;
        }
        let flow = if members.iter().any(|&s| g.slots[s].flow == Flow::Bend) {
            Flow::Bend
        } else {
            first.flow
        };
        let (class, style) = match flow {
            Flow::Down => ("down", ""),
            Flow::Up => ("up", ", style=dashed"),
            Flow::Bend => ("bend", ", style=dotted"),
        };
        let producers: Vec<&String> = members.iter().flat_map(|&s| &g.slots[s].producers).collect();
        let consumers: Vec<&String> = members.iter().flat_map(|&s| &g.slots[s].consumers).collect();
        for p in &producers {
            for c in &consumers {
                let _ = writeln!(
                    out,
                    "  {p} -> {c} [label={}, class={}{style}];",
                    quote(&first.ty.to_string()),
                    quote(class)
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

fn write_nodes(g: &Graph, cluster: Option<usize>, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for n in g.nodes.iter().filter(|n| n.cluster == cluster) {
        let _ = writeln!(out, "{pad}{} [label={}, shape={}];", n.name, quote(&n.label), n.shape);
    }
    for (i, c) in g.clusters.iter().enumerate().filter(|(_, c)| c.parent == cluster) {
        let _ = writeln!(out, "{pad}subgraph cluster_{i} {{");
        let _ = writeln!(out, "{pad}  label={};", quote(&c.name));
        write_nodes(g, Some(i), depth + 1, out);
        let _ = writeln!(out, "{pad}}}");
    }
}
