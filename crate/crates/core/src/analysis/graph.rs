//! The labelled call graphs: the one followed within a cycle, used by the
//! read-once condition, and the one followed within an instant, used by
//! the ≥_F order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write};

use serde::{Serialize, Serializer};

use crate::syntax::*;

/// A node of a call graph: a thread identifier or the sink `O`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Node {
    Thread(ThreadId),
    Sink,
}

impl Node {
    pub fn thread(s: &str) -> Node {
        Node::Thread(ThreadId::new(s))
    }

    pub fn as_thread(&self) -> Option<&ThreadId> {
        match self {
            Node::Thread(id) => Some(id),
            Node::Sink => None,
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Thread(id) => write!(f, "{id}"),
            Node::Sink => f.write_str("O"),
        }
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: Node,
    pub labels: BTreeSet<Label>,
    pub to: Node,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "({}, {{{}}}, {})", self.from, labels.join(", "), self.to)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CallGraph {
    pub nodes: BTreeSet<Node>,
    edges: BTreeMap<(Node, Node), BTreeSet<Label>>,
}

impl CallGraph {
    fn with_nodes(sys: &EquationSystem) -> Self {
        let mut nodes: BTreeSet<Node> = sys.equations.iter().map(|e| Node::Thread(e.name.clone())).collect();
        nodes.insert(Node::Sink);
        CallGraph { nodes, edges: BTreeMap::new() }
    }

    pub fn add_edge(&mut self, from: Node, to: Node, labels: impl IntoIterator<Item = Label>) {
        self.nodes.insert(from.clone());
        self.nodes.insert(to.clone());
        self.edges.entry((from, to)).or_default().extend(labels);
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(|((from, to), labels)| Edge {
            from: from.clone(),
            labels: labels.clone(),
            to: to.clone(),
        })
    }

    pub fn edge(&self, from: &Node, to: &Node) -> Option<&BTreeSet<Label>> {
        self.edges.get(&(from.clone(), to.clone()))
    }

    pub fn successors<'a>(&'a self, n: &'a Node) -> impl Iterator<Item = &'a Node> + 'a {
        self.edges.keys().filter(move |(f, _)| f == n).map(|(_, t)| t)
    }

    /// Nodes reachable from `start` in zero or more steps.
    pub fn reachable(&self, start: &Node) -> BTreeSet<Node> {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(n) = queue.pop_front() {
            for m in self.successors(&n) {
                if seen.insert(m.clone()) {
                    queue.push_back(m.clone());
                }
            }
        }
        seen
    }

    /// A shortest path of edges from `from` to `to`, empty when equal.
    pub fn path(&self, from: &Node, to: &Node) -> Option<Vec<Edge>> {
        let mut prev: BTreeMap<Node, Node> = BTreeMap::new();
        let mut queue = VecDeque::from([from.clone()]);
        let mut seen = BTreeSet::from([from.clone()]);
        while let Some(n) = queue.pop_front() {
            if &n == to {
                let mut out = Vec::new();
                let mut cur = n;
                while &cur != from {
                    let p = prev[&cur].clone();
                    out.push(Edge { labels: self.edges[&(p.clone(), cur.clone())].clone(), from: p.clone(), to: cur });
                    cur = p;
                }
                out.reverse();
                return Some(out);
            }
            for m in self.successors(&n) {
                if seen.insert(m.clone()) {
                    prev.insert(m.clone(), n.clone());
                    queue.push_back(m.clone());
                }
            }
        }
        None
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n");
        for n in &self.nodes {
            let shape = if *n == Node::Sink { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  \"{n}\" [shape={shape}];");
        }
        for e in self.edges() {
            let labels: Vec<String> = e.labels.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{{{}}}\"];", e.from, e.to, labels.join(","));
        }
        out.push_str("}\n");
        out
    }
}

impl Serialize for CallGraph {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let edges: Vec<Edge> = self.edges().collect();
        edges.serialize(s)
    }
}

impl fmt::Display for CallGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().map(|e| e.to_string()).collect();
        f.write_str(&edges.join(" "))
    }
}

fn deref_labels(args: &[Expr]) -> BTreeSet<Label> {
    let mut out = BTreeSet::new();
    for a in args {
        a.labels(&mut out);
    }
    out
}

type Calls = Vec<(Node, BTreeSet<Label>)>;

/// The pairs (target, labels read so far) reachable in a body before the
/// cycle ends. A terminated branch reaches the sink; it is recorded only
/// when it carries labels, since an unlabelled edge into the sink affects
/// neither the read-once condition nor the auxiliary parameters.
fn cycle_calls(sys: &EquationSystem, p: &Process, l: &BTreeSet<Label>, out: &mut Calls) {
    let target = |id: &ThreadId| if sys.is_reset(id) { Node::Sink } else { Node::Thread(id.clone()) };
    match p {
        Process::Nil | Process::Emit(..) => {
            if !l.is_empty() {
                out.push((Node::Sink, l.clone()));
            }
        }
        Process::Call(id, _) => out.push((target(id), l.clone())),
        Process::Present(pr) => {
            let mut inner = l.clone();
            inner.extend(pr.label);
            cycle_calls(sys, &pr.body, &inner, out);
            let mut k = l.clone();
            k.extend(deref_labels(&pr.cont.args));
            out.push((target(&pr.cont.target), k));
        }
        Process::NameMatch { then, otherwise, .. } | Process::Match { then, otherwise, .. } => {
            cycle_calls(sys, then, l, out);
            cycle_calls(sys, otherwise, l, out);
        }
        Process::New { body, .. } => cycle_calls(sys, body, l, out),
        Process::Par(a, b) => {
            cycle_calls(sys, a, l, out);
            cycle_calls(sys, b, l, out);
        }
    }
}

/// Calls reachable within the instant: every call is followed, present
/// bodies are explored and continuations, which run at the next instant,
/// are not.
fn instant_calls(p: &Process, out: &mut Vec<ThreadId>) {
    match p {
        Process::Nil | Process::Emit(..) => {}
        Process::Call(id, _) => out.push(id.clone()),
        Process::Present(pr) => instant_calls(&pr.body, out),
        Process::NameMatch { then, otherwise, .. } | Process::Match { then, otherwise, .. } => {
            instant_calls(then, out);
            instant_calls(otherwise, out);
        }
        Process::New { body, .. } => instant_calls(body, out),
        Process::Par(a, b) => {
            instant_calls(a, out);
            instant_calls(b, out);
        }
    }
}

pub fn build_cycle_graph(sys: &EquationSystem) -> CallGraph {
    let mut g = CallGraph::with_nodes(sys);
    for eq in &sys.equations {
        let mut calls = Vec::new();
        cycle_calls(sys, &eq.body, &BTreeSet::new(), &mut calls);
        for (to, labels) in calls {
            g.add_edge(Node::Thread(eq.name.clone()), to, labels);
        }
    }
    g
}

pub fn build_instant_graph(sys: &EquationSystem) -> CallGraph {
    let mut g = CallGraph::with_nodes(sys);
    g.nodes.remove(&Node::Sink);
    for eq in &sys.equations {
        let mut calls = Vec::new();
        instant_calls(&eq.body, &mut calls);
        for to in calls {
            g.add_edge(Node::Thread(eq.name.clone()), Node::Thread(to), []);
        }
    }
    g
}

/// The read-once condition: no cycle goes through an edge with a
/// non-empty label. On failure, returns such a cycle.
pub fn check_read_once(g: &CallGraph) -> Result<(), Vec<Edge>> {
    for e in g.edges() {
        if e.labels.is_empty() {
            continue;
        }
        if let Some(back) = g.path(&e.to, &e.from) {
            let mut cycle = vec![e];
            cycle.extend(back);
            return Err(cycle);
        }
    }
    Ok(())
}

/// R(A) in label order: the labels of every edge reachable from `id`.
pub fn auxiliary_params(g: &CallGraph, id: &ThreadId) -> Vec<Label> {
    let reach = g.reachable(&Node::Thread(id.clone()));
    let mut out = BTreeSet::new();
    for e in g.edges() {
        if reach.contains(&e.from) {
            out.extend(e.labels);
        }
    }
    out.into_iter().collect()
}
