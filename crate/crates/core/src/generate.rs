//! Seeded instance generators and the enumeration of small connected graphs.

use crate::error::{Error, Result};
use crate::graph::{Color, ColoredGraph, Flavor, LdcInstance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Ring,
    Clique,
    RandomGnp,
    RandomDag,
    PowerLaw,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InfeasibleParams(format!("unknown family {s}")))
    }
}

/// Per-node condition a defect-budget list must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// `Σ(d+1) > deg`.
    Eq1,
    /// `Σ(2d+1) > deg`.
    Eq2,
    /// `Σ(d+1)^exponent ≥ factor · β^exponent`.
    Energy { exponent: u32, factor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ListModel {
    /// `deg+1` colors, all with defect 0.
    DegreePlusOne,
    /// `k` colors, all with defect `defect`.
    UniformK { k: usize, defect: u64 },
    /// Random list sizes with defects drawn until `target` holds.
    DefectBudget { target: Target },
}

/// A graph drawn from `family`. Random families keep the maximum degree
/// (out-degree for DAGs) at most `delta`; rings and cliques ignore it. The initial coloring is greedy in id order; DAGs are
/// oriented along a random ranking, other families carry no orientation.
pub fn generate_graph(family: Family, n: usize, delta: usize, seed: u64) -> Result<ColoredGraph> {
    let mut rng = rng(seed);
    let edges = match family {
        Family::Ring => match n {
            0 | 1 => vec![],
            2 => vec![(0, 1)],
            _ => (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect(),
        },
        Family::Clique => (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
        Family::RandomGnp => capped_gnp(n, delta, &mut rng),
        Family::RandomDag => {
            let mut rank: Vec<usize> = (0..n).collect();
            rank.shuffle(&mut rng);
            let p = if n > 1 { (2.0 * delta as f64 / (n - 1) as f64).min(1.0) } else { 0.0 };
            let mut out = vec![0usize; n];
            let mut arcs = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < p {
                        let (t, h) = if rank[u] > rank[v] { (u, v) } else { (v, u) };
                        if out[t] < delta {
                            out[t] += 1;
                            arcs.push((t, h));
                        }
                    }
                }
            }
            let edges: Vec<_> = arcs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
            let g = ColoredGraph::new(n, &edges)?;
            let g = greedy_init(g);
            return g.with_orientation(&arcs);
        }
        Family::PowerLaw => preferential(n, delta, &mut rng),
    };
    Ok(greedy_init(ColoredGraph::new(n, &edges)?))
}

fn capped_gnp(n: usize, delta: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let p = if n > 1 { (delta as f64 / (n - 1) as f64).min(1.0) } else { 0.0 };
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    pairs.shuffle(rng);
    let mut deg = vec![0; n];
    let mut edges: Vec<_> = pairs
        .into_iter()
        .filter(|&(u, v)| {
            let ok = deg[u] < delta && deg[v] < delta;
            if ok {
                deg[u] += 1;
                deg[v] += 1;
            }
            ok
        })
        .collect();
    edges.sort_unstable();
    edges
}

fn preferential(n: usize, delta: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut deg = vec![0usize; n];
    let mut edges = HashSet::new();
    let mut ends: Vec<usize> = Vec::new();
    for v in 1..n {
        for _ in 0..2 {
            let u = if ends.is_empty() { rng.gen_range(0..v) } else { ends[rng.gen_range(0..ends.len())] };
            if u != v && deg[u] < delta && deg[v] < delta && edges.insert((u.min(v), u.max(v))) {
                deg[u] += 1;
                deg[v] += 1;
                ends.push(u);
                ends.push(v);
            }
        }
    }
    let mut e: Vec<_> = edges.into_iter().collect();
    e.sort_unstable();
    e
}

/// Replaces the id coloring by a greedy proper coloring in id order.
pub fn greedy_init(g: ColoredGraph) -> ColoredGraph {
    let n = g.n();
    let mut colors: Vec<u64> = vec![u64::MAX; n];
    for v in 0..n {
        let used: HashSet<u64> = g.neighbors(v).iter().map(|&u| colors[u]).collect();
        colors[v] = (0..).find(|c| !used.contains(c)).expect("free color");
    }
    let m = colors.iter().max().map_or(1, |&c| c + 1);
    g.with_init_colors(colors, m).expect("greedy coloring is proper")
}

/// Draws lists over the color space `0..space` according to `model`.
pub fn generate_lists(
    graph: &ColoredGraph,
    model: ListModel,
    space: u64,
    flavor: Flavor,
    seed: u64,
) -> Result<LdcInstance> {
    let mut rng = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let all: Vec<Color> = (0..space).collect();
    let mut lists = Vec::with_capacity(graph.n());
    for v in 0..graph.n() {
        let deg = graph.degree(v);
        let list = match model {
            ListModel::DegreePlusOne => {
                if deg as u64 + 1 > space {
                    return Err(Error::InfeasibleParams(format!("node {v} needs {} colors of {space}", deg + 1)));
                }
                sample(&all, deg + 1, &mut rng).into_iter().map(|x| (x, 0)).collect()
            }
            ListModel::UniformK { k, defect } => {
                if k as u64 > space || k == 0 {
                    return Err(Error::InfeasibleParams(format!("cannot draw {k} of {space} colors")));
                }
                sample(&all, k, &mut rng).into_iter().map(|x| (x, defect)).collect()
            }
            ListModel::DefectBudget { target } => {
                budget_list(&all, deg, graph.beta(v), target, &mut rng)?
            }
        };
        lists.push(list);
    }
    LdcInstance::new(all, lists, flavor, 0)
}

fn sample(all: &[Color], k: usize, rng: &mut ChaCha8Rng) -> Vec<Color> {
    let mut s: Vec<Color> = all.choose_multiple(rng, k).copied().collect();
    s.sort_unstable();
    s
}

fn budget_list(
    all: &[Color],
    deg: usize,
    beta: usize,
    target: Target,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(Color, u64)>> {
    let space = all.len();
    if space == 0 {
        return Err(Error::InfeasibleParams("empty color space".into()));
    }
    let size = rng.gen_range(1..=space.min(deg + 1));
    let colors = sample(all, size, rng);
    let mut d = vec![0u64; size];
    let holds = |d: &[u64]| -> bool {
        match target {
            Target::Eq1 => d.iter().map(|x| x + 1).sum::<u64>() > deg as u64,
            Target::Eq2 => d.iter().map(|x| 2 * x + 1).sum::<u64>() > deg as u64,
            Target::Energy { exponent, factor } => {
                let lhs: f64 = d.iter().map(|&x| ((x + 1) as f64).powi(exponent as i32)).sum();
                lhs >= factor * (beta as f64).powi(exponent as i32)
            }
        }
    };
    if let Target::Energy { exponent, factor } = target {
        let need = factor * (beta as f64).powi(exponent as i32);
        if !need.is_finite() || need > 1e12 {
            return Err(Error::InfeasibleParams(format!("energy target {need} out of range")));
        }
    }
    while !holds(&d) {
        let i = rng.gen_range(0..size);
        d[i] += 1;
    }
    if rng.gen_bool(0.5) {
        let i = rng.gen_range(0..size);
        d[i] += 1;
    }
    Ok(colors.into_iter().zip(d).collect())
}

/// All connected graphs on `n` nodes up to isomorphism, each in a canonical
/// labeling. Counts are 1, 1, 2, 6, 21, 112, 853 for n = 1..7.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    assert!(n <= 8, "enumeration is meant for tiny graphs");
    if n == 0 {
        return vec![];
    }
    let mut level: Vec<u64> = vec![0];
    for k in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for &mask in &level {
            // A connected graph minus a non-cut vertex stays connected, so
            // attaching a new vertex to every nonempty subset reaches all.
            for subset in 1u64..(1 << (k - 1)) {
                let mut m = mask;
                for u in 0..k - 1 {
                    if subset >> u & 1 == 1 {
                        m |= 1 << pair_index(u, k - 1);
                    }
                }
                let c = canonical(k, m);
                if seen.insert(c) {
                    next.push(c);
                }
            }
        }
        next.sort_unstable();
        level = next;
    }
    level.into_iter().map(|m| mask_edges(n, m)).collect()
}

fn pair_index(u: usize, v: usize) -> usize {
    let (a, b) = (u.min(v), u.max(v));
    b * (b - 1) / 2 + a
}

fn mask_edges(n: usize, mask: u64) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for b in 1..n {
        for a in 0..b {
            if mask >> pair_index(a, b) & 1 == 1 {
                e.push((a, b));
            }
        }
    }
    e
}

/// Minimum relabeled edge mask over all relabelings that sort nodes by degree.
fn canonical(n: usize, mask: u64) -> u64 {
    let edges = mask_edges(n, mask);
    let mut deg = vec![0usize; n];
    for &(a, b) in &edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| deg[v]);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if deg[c[0]] == deg[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best = u64::MAX;
    let mut label = vec![0usize; n];
    relabel(&classes, 0, 0, &mut label, &edges, &mut best);
    best
}

fn relabel(
    classes: &[Vec<usize>],
    ci: usize,
    offset: usize,
    label: &mut [usize],
    edges: &[(usize, usize)],
    best: &mut u64,
) {
    if ci == classes.len() {
        let m = edges.iter().fold(0u64, |m, &(a, b)| m | 1 << pair_index(label[a], label[b]));
        *best = (*best).min(m);
        return;
    }
    let mut members = classes[ci].clone();
    permute(&mut members, 0, &mut |perm| {
        for (i, &v) in perm.iter().enumerate() {
            label[v] = offset + i;
        }
        relabel(classes, ci + 1, offset + perm.len(), label, edges, best);
    });
}

fn permute(items: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}
