//! Graphs, list defective coloring instances, colorings and their validator.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub type Color = u64;

/// Simple undirected graph with an initial proper coloring and an optional
/// orientation of every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    adj: Vec<Vec<usize>>,
    out: Option<Vec<Vec<usize>>>,
    init_colors: Vec<u64>,
    m: u64,
}

impl ColoredGraph {
    /// Builds the graph with node ids as the initial `n`-coloring.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("multi-edge at node {v}")));
            }
        }
        Ok(ColoredGraph { adj, out: None, init_colors: (0..n as u64).collect(), m: n.max(1) as u64 })
    }

    /// Replaces the initial coloring; it must be proper and use colors in `[m]`.
    pub fn with_init_colors(mut self, colors: Vec<u64>, m: u64) -> Result<Self> {
        if colors.len() != self.n() {
            return Err(Error::InvalidGraph("init_colors length differs from n".into()));
        }
        if let Some(v) = colors.iter().position(|&c| c >= m) {
            return Err(Error::InvalidGraph(format!("init color of node {v} not in [m]")));
        }
        for (u, v) in self.edges() {
            if colors[u] == colors[v] {
                return Err(Error::InvalidGraph(format!("init coloring not proper on edge ({u},{v})")));
            }
        }
        self.init_colors = colors;
        self.m = m.max(1);
        Ok(self)
    }

    /// Orients the graph by a list of arcs `(tail, head)`, one per edge.
    pub fn with_orientation(mut self, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut out = vec![Vec::new(); self.n()];
        for &(u, v) in arcs {
            if u >= self.n() || !self.has_edge(u, v) {
                return Err(Error::InvalidGraph(format!("arc ({u},{v}) is not an edge")));
            }
            out[u].push(v);
        }
        for list in &mut out {
            list.sort_unstable();
        }
        for (u, v) in self.edges() {
            let fwd = out[u].binary_search(&v).is_ok();
            let bwd = out[v].binary_search(&u).is_ok();
            if fwd == bwd {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) needs exactly one direction")));
            }
        }
        self.out = Some(out);
        Ok(self)
    }

    /// Orients every edge `{u, v}` from `u` to `v` iff `toward(u, v)`.
    pub fn oriented_by(self, toward: impl Fn(usize, usize) -> bool) -> Self {
        let arcs: Vec<_> =
            self.edges().map(|(u, v)| if toward(u, v) { (u, v) } else { (v, u) }).collect();
        self.with_orientation(&arcs).expect("total orientation")
    }

    pub fn without_orientation(mut self) -> Self {
        self.out = None;
        self
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn init_color(&self, v: usize) -> u64 {
        self.init_colors[v]
    }

    pub fn init_colors(&self) -> &[u64] {
        &self.init_colors
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|l| l.binary_search(&v).is_ok())
    }

    pub fn is_oriented(&self) -> bool {
        self.out.is_some()
    }

    pub fn out_neighbors(&self, v: usize) -> Option<&[usize]> {
        self.out.as_ref().map(|o| o[v].as_slice())
    }

    /// `β_v = max(1, outdeg(v))`; the undirected degree when unoriented.
    pub fn beta(&self, v: usize) -> usize {
        self.out_neighbors(v).map_or(self.degree(v), <[usize]>::len).max(1)
    }

    pub fn max_beta(&self) -> usize {
        (0..self.n()).map(|v| self.beta(v)).max().unwrap_or(1)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Arcs `(tail, head)` sorted by tail then head; empty when unoriented.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        match &self.out {
            Some(out) => out
                .iter()
                .enumerate()
                .flat_map(|(u, l)| l.iter().map(move |&v| (u, v)))
                .collect(),
            None => Vec::new(),
        }
    }

    /// Subgraph induced by `nodes` (in the given order, which becomes the
    /// new id order) keeping only edges for which `keep(u, v)` holds.
    /// Initial colors, `m` and the orientation carry over.
    pub fn subgraph(&self, nodes: &[usize], keep: impl Fn(usize, usize) -> bool) -> ColoredGraph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in nodes.iter().enumerate() {
            index[v] = i;
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        let mut out = self.out.as_ref().map(|_| vec![Vec::new(); nodes.len()]);
        for (i, &v) in nodes.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j == usize::MAX || !keep(v, w) || !keep(w, v) {
                    continue;
                }
                adj[i].push(j);
                if let (Some(o), Some(src)) = (out.as_mut(), self.out.as_ref()) {
                    if src[v].binary_search(&w).is_ok() {
                        o[i].push(j);
                    }
                }
            }
        }
        for l in adj.iter_mut().chain(out.iter_mut().flatten()) {
            l.sort_unstable();
        }
        ColoredGraph {
            adj,
            out,
            init_colors: nodes.iter().map(|&v| self.init_colors[v]).collect(),
            m: self.m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Defective,
    Oriented,
    Arbdefective,
}

/// Lists and defect functions over a color space.
///
/// Each list is stored sorted by color as `(color, defect)` pairs, so the
/// defect function's domain is exactly the list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdcInstance {
    color_space: Vec<Color>,
    lists: Vec<Vec<(Color, u64)>>,
    flavor: Flavor,
    g: u64,
    max_list: usize,
}

impl LdcInstance {
    pub fn new(
        color_space: Vec<Color>,
        lists: Vec<Vec<(Color, u64)>>,
        flavor: Flavor,
        g: u64,
    ) -> Result<Self> {
        let mut color_space = color_space;
        color_space.sort_unstable();
        color_space.dedup();
        let mut lists = lists;
        for (v, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidInstance(format!("duplicate color in list of node {v}")));
            }
            if let Some(&(x, _)) = list.iter().find(|(x, _)| color_space.binary_search(x).is_err()) {
                return Err(Error::InvalidInstance(format!(
                    "color {x} of node {v} outside the color space"
                )));
            }
        }
        let max_list = lists.iter().map(Vec::len).max().unwrap_or(0);
        Ok(LdcInstance { color_space, lists, flavor, g, max_list })
    }

    /// Every node gets the same list of colors, all with defect `d`.
    pub fn uniform(n: usize, colors: &[Color], d: u64, flavor: Flavor) -> Result<Self> {
        let list: Vec<_> = colors.iter().map(|&x| (x, d)).collect();
        Self::new(colors.to_vec(), vec![list; n], flavor, 0)
    }

    pub fn n(&self) -> usize {
        self.lists.len()
    }

    pub fn color_space(&self) -> &[Color] {
        &self.color_space
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn g(&self) -> u64 {
        self.g
    }

    /// `Λ`, the maximum list size.
    pub fn max_list_len(&self) -> usize {
        self.max_list
    }

    pub fn list(&self, v: usize) -> &[(Color, u64)] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<(Color, u64)>] {
        &self.lists
    }

    pub fn defect(&self, v: usize, x: Color) -> Option<u64> {
        let l = &self.lists[v];
        l.binary_search_by_key(&x, |e| e.0).ok().map(|i| l[i].1)
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }

    pub fn with_g(mut self, g: u64) -> Self {
        self.g = g;
        self
    }

    /// Same color space, new lists.
    pub fn with_lists(&self, lists: Vec<Vec<(Color, u64)>>) -> Result<Self> {
        Self::new(self.color_space.clone(), lists, self.flavor, self.g)
    }

    pub(crate) fn check_graph(&self, graph: &ColoredGraph) -> Result<()> {
        if graph.n() != self.n() {
            return Err(Error::InvalidInstance(format!(
                "instance has {} lists for {} nodes",
                self.n(),
                graph.n()
            )));
        }
        Ok(())
    }
}

/// A (possibly partial) coloring plus, for arbdefective outputs, the
/// orientation chosen for every edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringOutput {
    pub colors: Vec<Option<Color>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation_out: Option<Vec<(usize, usize)>>,
}

impl ColoringOutput {
    pub fn from_colors(colors: Vec<Color>) -> Self {
        ColoringOutput { colors: colors.into_iter().map(Some).collect(), orientation_out: None }
    }

    pub fn color(&self, v: usize) -> Option<Color> {
        self.colors[v]
    }

    /// Colors of a total coloring; `None` if some node is uncolored.
    pub fn total(&self) -> Option<Vec<Color>> {
        self.colors.iter().copied().collect()
    }

    pub fn palette_size(&self) -> usize {
        let mut c: Vec<_> = self.colors.iter().flatten().collect();
        c.sort_unstable();
        c.dedup();
        c.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    /// Per node, the number of relevant neighbors within distance `g` of its color.
    pub conflicts: Vec<usize>,
    /// Nodes whose conflict count exceeds their defect.
    pub violations: Vec<usize>,
}

fn out_sets(n: usize, arcs: &[(usize, usize)], graph: &ColoredGraph) -> Result<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new(); n];
    for &(u, v) in arcs {
        if u >= n || !graph.has_edge(u, v) {
            return Err(Error::MissingOrientation(format!("arc ({u},{v}) is not an edge")));
        }
        out[u].push(v);
    }
    for l in &mut out {
        l.sort_unstable();
    }
    for (u, v) in graph.edges() {
        let fwd = out[u].binary_search(&v).is_ok();
        let bwd = out[v].binary_search(&u).is_ok();
        if fwd == bwd {
            return Err(Error::MissingOrientation(format!("edge ({u},{v}) not oriented exactly once")));
        }
    }
    Ok(out)
}

/// Checks a coloring against the instance's defects for its flavor.
pub fn validate_ldc(
    graph: &ColoredGraph,
    inst: &LdcInstance,
    out: &ColoringOutput,
) -> Result<ValidityReport> {
    inst.check_graph(graph)?;
    let n = graph.n();
    let mut colors = Vec::with_capacity(n);
    for v in 0..n {
        let x = out.colors.get(v).copied().flatten().ok_or(Error::MissingColor { node: v })?;
        if inst.defect(v, x).is_none() {
            return Err(Error::ColorNotInList { node: v, color: x });
        }
        colors.push(x);
    }
    let owned;
    let relevant: Vec<&[usize]> = match inst.flavor() {
        Flavor::Defective => (0..n).map(|v| graph.neighbors(v)).collect(),
        Flavor::Oriented => {
            if !graph.is_oriented() {
                return Err(Error::MissingOrientation("oriented instance on unoriented graph".into()));
            }
            (0..n).map(|v| graph.out_neighbors(v).expect("oriented")).collect()
        }
        Flavor::Arbdefective => {
            let arcs = out
                .orientation_out
                .as_ref()
                .ok_or_else(|| Error::MissingOrientation("arbdefective output without orientation".into()))?;
            owned = out_sets(n, arcs, graph)?;
            owned.iter().map(Vec::as_slice).collect()
        }
    };
    let g = inst.g();
    let mut conflicts = vec![0; n];
    let mut violations = Vec::new();
    for v in 0..n {
        let x = colors[v];
        conflicts[v] = relevant[v].iter().filter(|&&u| colors[u].abs_diff(x) <= g).count();
        if conflicts[v] as u64 > inst.defect(v, x).expect("checked") {
            violations.push(v);
        }
    }
    Ok(ValidityReport { valid: violations.is_empty(), conflicts, violations })
}

/// Per node, whether `Σ(d+1) > deg` holds (`Σ(2d+1) > deg` for arbdefective).
pub fn check_existence_condition(graph: &ColoredGraph, inst: &LdcInstance) -> Vec<bool> {
    (0..graph.n())
        .map(|v| {
            let weight: u64 = inst
                .list(v)
                .iter()
                .map(|&(_, d)| if inst.flavor() == Flavor::Arbdefective { 2 * d + 1 } else { d + 1 })
                .sum();
            weight > graph.degree(v) as u64
        })
        .collect()
}
