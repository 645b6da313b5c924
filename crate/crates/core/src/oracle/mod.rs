//! Centralized reference algorithms: the potential-function recoloring
//! algorithm for list defective coloring, its arbdefective variant via Euler
//! orientations, and an exhaustive solver for tiny instances.

mod euler;
mod exhaustive;
mod flow;

pub use euler::eulerian_orientation;
pub use exhaustive::{exhaustive_solve, DEFAULT_CAP};
pub use flow::orient_with_caps;

use crate::error::{Error, Result};
use crate::graph::{check_existence_condition, Color, ColoredGraph, ColoringOutput, Flavor, LdcInstance};
use std::collections::BTreeSet;

/// Result of the sequential recoloring algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqLdcRun {
    pub output: ColoringOutput,
    pub recolorings: usize,
    /// Potential before the first recoloring and after each one.
    pub potential: Vec<u64>,
}

/// Potential of a coloring: monochromatic edges plus the total slack
/// `deg(v) − min(d_v(x_v), deg(v))`.
pub fn potential(graph: &ColoredGraph, lists: &[Vec<(Color, u64)>], colors: &[Color]) -> u64 {
    let mono = graph.edges().filter(|&(u, v)| colors[u] == colors[v]).count() as u64;
    let slack: u64 = (0..graph.n())
        .map(|v| {
            let deg = graph.degree(v) as u64;
            let d = lists[v].iter().find(|e| e.0 == colors[v]).map_or(0, |e| e.1);
            deg - d.min(deg)
        })
        .sum();
    mono + slack
}

/// Recoloring algorithm for list defective coloring. Starts from each list's
/// first color and repeatedly moves the lowest-id unhappy node to its lowest
/// color with room. Requires `Σ(d+1) > deg` at every node.
pub fn sequential_ldc(graph: &ColoredGraph, inst: &LdcInstance) -> Result<SeqLdcRun> {
    check_plain(graph, inst)?;
    let cond = check_existence_condition(graph, &inst.clone().with_flavor(Flavor::Defective));
    if let Some(v) = cond.iter().position(|ok| !ok) {
        return Err(Error::ConditionViolated { node: v, detail: "sum of (d+1) does not exceed degree".into() });
    }
    recolor(graph, inst.lists(), false)
}

/// Same as [`sequential_ldc`] but recomputes the potential from scratch
/// after every step and checks it against the incremental value.
pub fn sequential_ldc_checked(graph: &ColoredGraph, inst: &LdcInstance) -> Result<SeqLdcRun> {
    check_plain(graph, inst)?;
    let cond = check_existence_condition(graph, &inst.clone().with_flavor(Flavor::Defective));
    if let Some(v) = cond.iter().position(|ok| !ok) {
        return Err(Error::ConditionViolated { node: v, detail: "sum of (d+1) does not exceed degree".into() });
    }
    recolor(graph, inst.lists(), true)
}

fn check_plain(graph: &ColoredGraph, inst: &LdcInstance) -> Result<()> {
    if inst.n() != graph.n() {
        return Err(Error::InvalidInstance("instance and graph sizes differ".into()));
    }
    if inst.g() != 0 {
        return Err(Error::InvalidInstance("sequential oracles need g = 0".into()));
    }
    if let Some(v) = inst.lists().iter().position(Vec::is_empty) {
        return Err(Error::EmptyList { node: v });
    }
    Ok(())
}

fn recolor(graph: &ColoredGraph, lists: &[Vec<(Color, u64)>], from_scratch: bool) -> Result<SeqLdcRun> {
    let n = graph.n();
    let index_of = |v: usize, x: Color| lists[v].binary_search_by_key(&x, |e| e.0).ok();
    let mut colors: Vec<Color> = lists.iter().map(|l| l[0].0).collect();
    // counts[v][i]: neighbors of v colored with the i-th color of v's list.
    let mut counts: Vec<Vec<u64>> = lists.iter().map(|l| vec![0; l.len()]).collect();
    for v in 0..n {
        for &u in graph.neighbors(v) {
            if let Some(i) = index_of(v, colors[u]) {
                counts[v][i] += 1;
            }
        }
    }
    let unhappy_at = |v: usize, colors: &[Color], counts: &[Vec<u64>]| {
        let i = index_of(v, colors[v]).expect("own color listed");
        counts[v][i] > lists[v][i].1
    };
    let mut unhappy: BTreeSet<usize> = (0..n).filter(|&v| unhappy_at(v, &colors, &counts)).collect();
    let mut phi = potential(graph, lists, &colors);
    let mut trail = vec![phi];
    let budget = 3 * graph.edge_count();
    while let Some(&v) = unhappy.iter().next() {
        let (yi, &(y, _)) = lists[v]
            .iter()
            .enumerate()
            .find(|&(i, e)| counts[v][i] <= e.1)
            .ok_or_else(|| Error::InvariantViolated(format!("node {v} has no color with room")))?;
        let old = colors[v];
        let oi = index_of(v, old).expect("own color listed");
        let deg = graph.degree(v) as u64;
        let delta_mono = counts[v][yi] as i64 - counts[v][oi] as i64;
        let delta_slack = lists[v][oi].1.min(deg) as i64 - lists[v][yi].1.min(deg) as i64;
        let next = phi as i64 + delta_mono + delta_slack;
        if next < 0 || next >= phi as i64 {
            return Err(Error::InvariantViolated(format!("potential did not drop: {phi} -> {next}")));
        }
        colors[v] = y;
        for &u in graph.neighbors(v) {
            if let Some(i) = index_of(u, old) {
                counts[u][i] -= 1;
            }
            if let Some(i) = index_of(u, y) {
                counts[u][i] += 1;
            }
        }
        for w in std::iter::once(v).chain(graph.neighbors(v).iter().copied()) {
            if unhappy_at(w, &colors, &counts) {
                unhappy.insert(w);
            } else {
                unhappy.remove(&w);
            }
        }
        phi = next as u64;
        if from_scratch && potential(graph, lists, &colors) != phi {
            return Err(Error::InvariantViolated("incremental potential drifted".into()));
        }
        trail.push(phi);
        if trail.len() - 1 > budget {
            return Err(Error::InvariantViolated("more than 3|E| recolorings".into()));
        }
    }
    Ok(SeqLdcRun { output: ColoringOutput::from_colors(colors), recolorings: trail.len() - 1, potential: trail })
}

/// List arbdefective coloring: recolor with doubled defects, then orient
/// each color class along Euler tours so every node keeps at most half of
/// its same-colored neighbors (rounded up) as out-neighbors.
/// Requires `Σ(2d+1) > deg` at every node.
pub fn sequential_arbdefective(graph: &ColoredGraph, inst: &LdcInstance) -> Result<ColoringOutput> {
    check_plain(graph, inst)?;
    let cond = check_existence_condition(graph, &inst.clone().with_flavor(Flavor::Arbdefective));
    if let Some(v) = cond.iter().position(|ok| !ok) {
        return Err(Error::ConditionViolated { node: v, detail: "sum of (2d+1) does not exceed degree".into() });
    }
    let doubled: Vec<Vec<(Color, u64)>> =
        inst.lists().iter().map(|l| l.iter().map(|&(x, d)| (x, 2 * d)).collect()).collect();
    let run = recolor(graph, &doubled, false)?;
    let colors = run.output.total().expect("total coloring");
    let arcs = orient_color_classes(graph, &colors);
    Ok(ColoringOutput { orientation_out: Some(arcs), ..run.output })
}

/// Euler orientation inside every color class; other edges point from the
/// lower id to the higher id.
fn orient_color_classes(graph: &ColoredGraph, colors: &[Color]) -> Vec<(usize, usize)> {
    let mono: Vec<(usize, usize)> = graph.edges().filter(|&(u, v)| colors[u] == colors[v]).collect();
    let mut arcs: Vec<(usize, usize)> = graph.edges().filter(|&(u, v)| colors[u] != colors[v]).collect();
    arcs.extend(eulerian_orientation(graph.n(), &mono));
    arcs.sort_unstable();
    arcs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_ldc;

    fn clique(n: usize) -> ColoredGraph {
        let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        ColoredGraph::new(n, &e).unwrap()
    }

    #[test]
    fn defect_absorbs_single_edge() {
        let g = clique(2);
        let inst = LdcInstance::uniform(2, &[4], 1, Flavor::Defective).unwrap();
        let run = sequential_ldc(&g, &inst).unwrap();
        assert_eq!(run.recolorings, 0);
        assert_eq!(run.output.total().unwrap(), vec![4, 4]);
    }

    #[test]
    fn triangle_with_two_colors_of_defect_one() {
        let g = clique(3);
        let inst = LdcInstance::uniform(3, &[0, 1], 1, Flavor::Defective).unwrap();
        let run = sequential_ldc_checked(&g, &inst).unwrap();
        assert!(validate_ldc(&g, &inst, &run.output).unwrap().valid);
        assert!(run.potential.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn star_with_tight_leaves_is_refused() {
        let g = ColoredGraph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let center = vec![(0, 0), (1, 0), (2, 0), (3, 0)];
        let lists = vec![center, vec![(0, 0)], vec![(0, 0)], vec![(0, 0)]];
        let inst = LdcInstance::new(vec![0, 1, 2, 3], lists, Flavor::Defective, 0).unwrap();
        assert!(matches!(sequential_ldc(&g, &inst), Err(Error::ConditionViolated { node: 1, .. })));
    }

    #[test]
    fn monochromatic_triangle_is_oriented_cyclically() {
        let g = clique(3);
        let inst = LdcInstance::uniform(3, &[0], 1, Flavor::Arbdefective).unwrap();
        let out = sequential_arbdefective(&g, &inst).unwrap();
        let mut outdeg = [0; 3];
        for &(t, _) in out.orientation_out.as_ref().unwrap() {
            outdeg[t] += 1;
        }
        assert_eq!(outdeg, [1, 1, 1]);
        assert!(validate_ldc(&g, &inst, &out).unwrap().valid);
    }

    #[test]
    fn monochromatic_path_gets_outdegree_at_most_one() {
        let g = ColoredGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = LdcInstance::uniform(3, &[0], 1, Flavor::Arbdefective).unwrap();
        let out = sequential_arbdefective(&g, &inst).unwrap();
        let r = validate_ldc(&g, &inst, &out).unwrap();
        assert!(r.valid);
        assert!(r.conflicts.iter().all(|&c| c <= 1));
    }

    #[test]
    fn large_defects_keep_potential_nonnegative() {
        let g = clique(4);
        let inst = LdcInstance::uniform(4, &[0, 1], 9, Flavor::Defective).unwrap();
        let run = sequential_ldc_checked(&g, &inst).unwrap();
        assert_eq!(run.recolorings, 0);
        assert_eq!(run.potential, vec![6]);
    }
}
