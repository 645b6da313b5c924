//! Color reduction with polynomial cover-free families.
//!
//! A color `c < P` is read as the polynomial whose coefficients are the
//! base-`q` digits of `c`. Two distinct polynomials with `k` coefficients
//! agree on at most `k − 1` points, so a node with at most `D` relevant
//! neighbors finds an evaluation point `x < X` where at most `d` of them
//! agree with it as soon as `X·(d+1) > D·(k−1)`. The new color is the pair
//! `(x, p(x))`, a palette of `X·q` colors.

use crate::error::Result;
use crate::graph::{ColoredGraph, ColoringOutput};
use crate::sim::{cost, run, Budget, Inbox, NodeProgram, NodeView, Payload, RoundTrace, Step};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionStep {
    pub palette_in: u64,
    pub q: u64,
    /// Number of polynomial coefficients.
    pub k: u32,
    /// Evaluation points tried, `⌊D(k−1)/(d+1)⌋ + 1`.
    pub points: u64,
    pub defect: u64,
}

impl ReductionStep {
    pub fn palette_out(&self) -> u64 {
        self.points * self.q
    }

    fn eval(&self, color: u64, x: u64) -> u64 {
        let mut digits = Vec::with_capacity(self.k as usize);
        let mut c = color;
        for _ in 0..self.k {
            digits.push(c % self.q);
            c /= self.q;
        }
        digits.iter().rev().fold(0u64, |acc, &a| (acc * x + a) % self.q)
    }
}

fn primes_below(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut sieve = vec![true; limit.max(2)];
    let mut out = Vec::new();
    for i in 2..limit {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < limit {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

/// Smallest `k` with `q^k ≥ p`.
fn digits_needed(q: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut reach = 1u128;
    while reach < p as u128 {
        reach *= q as u128;
        k += 1;
    }
    k.max(1)
}

/// The best single step from palette `p` for `degree` relevant neighbors
/// and defect `d`, or `None` if no step shrinks the palette.
pub fn best_step(p: u64, degree: u64, d: u64) -> Option<ReductionStep> {
    let mut best: Option<ReductionStep> = None;
    for q in primes_below(p.max(3)) {
        let k = digits_needed(q, p);
        let points = degree * (k as u64 - 1) / (d + 1) + 1;
        if points > q {
            continue;
        }
        let s = ReductionStep { palette_in: p, q, k, points, defect: d };
        if s.palette_out() < p && best.is_none_or(|b| s.palette_out() < b.palette_out()) {
            best = Some(s);
        }
    }
    best
}

/// Proper reduction steps from palette `p` until no step shrinks it,
/// optionally followed by one defective step.
pub fn schedule(p: u64, degree: u64, final_defect: u64) -> Vec<ReductionStep> {
    let mut steps = Vec::new();
    let mut p = p;
    while let Some(s) = best_step(p, degree, 0) {
        p = s.palette_out();
        steps.push(s);
    }
    if final_defect > 0 {
        if let Some(s) = best_step(p, degree, final_defect) {
            steps.push(s);
        }
    }
    steps
}

#[derive(Debug, Clone, Copy)]
struct ColorMsg {
    color: u64,
    palette: u64,
}

impl Payload for ColorMsg {
    fn bits(&self) -> u64 {
        debug_assert!(self.color < self.palette);
        cost::color(self.palette)
    }
}

struct Reduction<'a> {
    steps: &'a [ReductionStep],
    oriented: bool,
}

impl Reduction<'_> {
    fn relevant<'v>(&self, view: &NodeView<'v>) -> &'v [usize] {
        if self.oriented {
            view.out_neighbors.expect("oriented graph")
        } else {
            view.neighbors
        }
    }
}

impl NodeProgram for Reduction<'_> {
    type State = u64;
    type Msg = ColorMsg;
    type Output = u64;

    fn label(&self) -> &str {
        "linial"
    }

    fn init(&self, view: &NodeView<'_>) -> Result<Step<u64, ColorMsg, u64>> {
        let c = view.id as u64;
        Ok(match self.steps.first() {
            None => Step::quiet(c).with_output(c),
            Some(s) => Step::send(c, ColorMsg { color: c, palette: s.palette_in }),
        })
    }

    fn step(&self, view: &NodeView<'_>, color: u64, inbox: &Inbox<ColorMsg>, round: usize) -> Result<Step<u64, ColorMsg, u64>> {
        let s = &self.steps[round - 1];
        let relevant = self.relevant(view);
        let others: Vec<u64> =
            inbox.iter().filter(|(u, _)| relevant.binary_search(u).is_ok()).map(|(_, m)| m.color).collect();
        if others.contains(&color) {
            return Err(view.fail(round, "input coloring is not proper"));
        }
        let x = (0..s.points)
            .find(|&x| {
                let mine = s.eval(color, x);
                others.iter().filter(|&&c| s.eval(c, x) == mine).count() as u64 <= s.defect
            })
            .ok_or_else(|| view.fail(round, "no evaluation point within the defect"))?;
        let next = x * s.q + s.eval(color, x);
        Ok(match self.steps.get(round) {
            None => Step::quiet(next).with_output(next),
            Some(t) => Step::send(next, ColorMsg { color: next, palette: t.palette_in }),
        })
    }
}

#[derive(Debug, Clone)]
pub struct LinialRun {
    pub output: ColoringOutput,
    pub trace: RoundTrace,
    /// Colors lie in `0..palette`.
    pub palette: u64,
    pub steps: Vec<ReductionStep>,
}

/// Proper coloring with `O(Δ²)` colors starting from node ids.
pub fn linial_coloring(graph: &ColoredGraph, budget: Budget) -> Result<LinialRun> {
    let delta = graph.max_degree() as u64;
    if delta == 0 {
        let trace = run(graph, &Reduction { steps: &[], oriented: false }, budget)?.trace;
        return Ok(LinialRun {
            output: ColoringOutput::from_colors(vec![0; graph.n()]),
            trace,
            palette: 1,
            steps: vec![],
        });
    }
    let steps = schedule(graph.n() as u64, delta, 0);
    finish(graph, steps, false, budget)
}

/// Coloring in which every node has at most `d` out-neighbors of its own
/// color: proper reduction over out-neighbors, then one defective step.
pub fn defective_linial(graph: &ColoredGraph, d: u64, budget: Budget) -> Result<LinialRun> {
    let beta = (0..graph.n()).map(|v| graph.out_neighbors(v).map_or(0, <[usize]>::len)).max().unwrap_or(0) as u64;
    if !graph.is_oriented() {
        return Err(crate::Error::MissingOrientation("defective_linial needs an orientation".into()));
    }
    if d >= beta {
        let trace = run(graph, &Reduction { steps: &[], oriented: true }, budget)?.trace;
        return Ok(LinialRun {
            output: ColoringOutput::from_colors(vec![0; graph.n()]),
            trace,
            palette: 1,
            steps: vec![],
        });
    }
    let steps = schedule(graph.n() as u64, beta, d);
    finish(graph, steps, true, budget)
}

fn finish(graph: &ColoredGraph, steps: Vec<ReductionStep>, oriented: bool, budget: Budget) -> Result<LinialRun> {
    let r = run(graph, &Reduction { steps: &steps, oriented }, budget)?;
    let palette = steps.last().map_or(graph.n() as u64, ReductionStep::palette_out);
    Ok(LinialRun { output: ColoringOutput::from_colors(r.outputs), trace: r.trace, palette, steps })
}
