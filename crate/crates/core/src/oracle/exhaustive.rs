use super::flow::orient_with_caps;
use crate::error::{Error, Result};
use crate::graph::{Color, ColoredGraph, ColoringOutput, Flavor, LdcInstance};

pub const DEFAULT_CAP: u64 = 10_000_000;

/// Backtracking search over all list assignments. Returns `None` when the
/// instance has no valid coloring. For arbdefective instances each partial
/// assignment is kept only if its conflict edges admit an orientation within
/// the defects.
pub fn exhaustive_solve(graph: &ColoredGraph, inst: &LdcInstance, cap: u64) -> Result<Option<ColoringOutput>> {
    if inst.n() != graph.n() {
        return Err(Error::InvalidInstance("instance and graph sizes differ".into()));
    }
    if inst.flavor() == Flavor::Oriented && !graph.is_oriented() {
        return Err(Error::MissingOrientation("oriented instance on unoriented graph".into()));
    }
    let space = inst.lists().iter().try_fold(1u64, |acc, l| acc.checked_mul(l.len() as u64));
    match space {
        Some(s) if s <= cap => {}
        _ => return Err(Error::CapExceeded { what: "search space".into(), cap }),
    }
    if inst.lists().iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut search = Search { graph, inst, colors: vec![None; graph.n()], conflicts: vec![0; graph.n()] };
    if !search.extend(0) {
        return Ok(None);
    }
    let colors: Vec<Color> = search.colors.iter().map(|c| c.expect("complete")).collect();
    let orientation_out = (inst.flavor() == Flavor::Arbdefective).then(|| {
        let (edges, caps) = search.conflict_edges(graph.n());
        let mut arcs = orient_with_caps(graph.n(), &edges, &caps).expect("feasible at the leaf");
        arcs.extend(graph.edges().filter(|&(u, v)| colors[u].abs_diff(colors[v]) > inst.g()));
        arcs.sort_unstable();
        arcs
    });
    Ok(Some(ColoringOutput { colors: colors.into_iter().map(Some).collect(), orientation_out }))
}

struct Search<'a> {
    graph: &'a ColoredGraph,
    inst: &'a LdcInstance,
    colors: Vec<Option<Color>>,
    conflicts: Vec<u64>,
}

impl Search<'_> {
    fn extend(&mut self, v: usize) -> bool {
        if v == self.graph.n() {
            return true;
        }
        for &(x, d) in self.inst.list(v) {
            self.colors[v] = Some(x);
            if self.place(v, x, d) && self.extend(v + 1) {
                return true;
            }
            self.unplace(v, x);
            self.colors[v] = None;
        }
        false
    }

    /// Counts conflicts of `v` with earlier nodes; false if some defect breaks.
    fn place(&mut self, v: usize, x: Color, d: u64) -> bool {
        let g = self.inst.g();
        match self.inst.flavor() {
            Flavor::Arbdefective => {
                let (edges, caps) = self.conflict_edges(v + 1);
                orient_with_caps(v + 1, &edges, &caps).is_some()
            }
            flavor => {
                let mut ok = true;
                for &u in self.graph.neighbors(v).iter().take_while(|&&u| u < v) {
                    let xu = self.colors[u].expect("earlier node colored");
                    if xu.abs_diff(x) > g {
                        continue;
                    }
                    let (to_u, to_v) = match flavor {
                        Flavor::Defective => (true, true),
                        _ => (self.is_arc(v, u), self.is_arc(u, v)),
                    };
                    if to_u {
                        self.conflicts[v] += 1;
                    }
                    if to_v {
                        self.conflicts[u] += 1;
                        ok &= self.conflicts[u] <= self.inst.defect(u, xu).expect("listed");
                    }
                }
                ok && self.conflicts[v] <= d
            }
        }
    }

    fn unplace(&mut self, v: usize, x: Color) {
        let g = self.inst.g();
        if self.inst.flavor() == Flavor::Arbdefective {
            return;
        }
        for &u in self.graph.neighbors(v).iter().take_while(|&&u| u < v) {
            let xu = self.colors[u].expect("earlier node colored");
            if xu.abs_diff(x) > g {
                continue;
            }
            let to_v = match self.inst.flavor() {
                Flavor::Defective => true,
                _ => self.is_arc(u, v),
            };
            if to_v {
                self.conflicts[u] -= 1;
            }
        }
        self.conflicts[v] = 0;
    }

    fn is_arc(&self, from: usize, to: usize) -> bool {
        self.graph.out_neighbors(from).is_some_and(|o| o.binary_search(&to).is_ok())
    }

    /// Conflict edges among nodes `0..upto` and each node's defect as cap.
    fn conflict_edges(&self, upto: usize) -> (Vec<(usize, usize)>, Vec<u64>) {
        let g = self.inst.g();
        let color = |v: usize| self.colors[v].expect("colored");
        let edges = self
            .graph
            .edges()
            .filter(|&(u, v)| v < upto && color(u).abs_diff(color(v)) <= g)
            .collect();
        let caps = (0..upto).map(|v| self.inst.defect(v, color(v)).expect("listed")).collect();
        (edges, caps)
    }
}
