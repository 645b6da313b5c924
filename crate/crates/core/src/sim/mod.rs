//! Synchronous round engine with per-message bit accounting.
//!
//! Messages produced by `init` travel in round 1; messages produced by the
//! step of round `r` travel in round `r + 1`. A run ends after the first
//! round in which every node has produced its output.

pub mod cost;
mod trace;

pub use trace::{PhaseRecord, RoundRecord, RoundTrace};

use crate::error::{Error, Result};
use crate::graph::ColoredGraph;
use rayon::prelude::*;

/// A message whose size is given by the canonical cost functions in [`cost`].
pub trait Payload: Clone + Send + Sync {
    fn bits(&self) -> u64;
}

/// What a node knows about itself before the first round.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'a> {
    pub id: usize,
    pub neighbors: &'a [usize],
    pub out_neighbors: Option<&'a [usize]>,
    pub init_color: u64,
}

impl NodeView<'_> {
    pub fn fail(&self, round: usize, reason: impl Into<String>) -> Error {
        Error::NodeFailure { node: self.id, round, reason: reason.into() }
    }
}

#[derive(Debug, Clone)]
pub enum Outbox<M> {
    Silent,
    Broadcast(M),
    /// Messages to individual neighbors.
    Direct(Vec<(usize, M)>),
}

#[derive(Debug, Clone)]
pub struct Step<S, M, O> {
    pub state: S,
    pub outbox: Outbox<M>,
    pub output: Option<O>,
}

impl<S, M, O> Step<S, M, O> {
    pub fn quiet(state: S) -> Self {
        Step { state, outbox: Outbox::Silent, output: None }
    }

    pub fn send(state: S, msg: M) -> Self {
        Step { state, outbox: Outbox::Broadcast(msg), output: None }
    }

    pub fn with_output(mut self, out: O) -> Self {
        self.output = Some(out);
        self
    }
}

/// Received messages, sorted by sender id.
pub type Inbox<M> = [(usize, M)];

/// A distributed algorithm as a per-node state machine. The program value
/// holds only read-only data every node may access.
pub trait NodeProgram: Sync {
    type State: Send;
    type Msg: Payload;
    type Output: Clone + Send;

    fn label(&self) -> &str {
        "run"
    }

    fn init(&self, view: &NodeView<'_>) -> Result<Step<Self::State, Self::Msg, Self::Output>>;

    fn step(
        &self,
        view: &NodeView<'_>,
        state: Self::State,
        inbox: &Inbox<Self::Msg>,
        round: usize,
    ) -> Result<Step<Self::State, Self::Msg, Self::Output>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_rounds: usize,
    /// `None` is the LOCAL model.
    pub bits_per_message: Option<u64>,
}

impl Budget {
    pub fn local(max_rounds: usize) -> Self {
        Budget { max_rounds, bits_per_message: None }
    }

    pub fn congest(max_rounds: usize, bits: u64) -> Self {
        Budget { max_rounds, bits_per_message: Some(bits) }
    }

    /// The tighter of two per-message bounds.
    pub fn tightened(self, bits: Option<u64>) -> Self {
        let bits_per_message = match (self.bits_per_message, bits) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Budget { bits_per_message, ..self }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::local(10_000)
    }
}

#[derive(Debug, Clone)]
pub struct RunResult<O> {
    pub trace: RoundTrace,
    pub outputs: Vec<O>,
}

const PARALLEL_THRESHOLD: usize = 256;

/// How node steps within a round are scheduled. Results never depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Auto,
    Sequential,
    Parallel,
}

type StepResult<P> = Result<
    Step<<P as NodeProgram>::State, <P as NodeProgram>::Msg, <P as NodeProgram>::Output>,
>;

/// Executes `program` on `graph` until every node has output.
pub fn run<P: NodeProgram>(graph: &ColoredGraph, program: &P, budget: Budget) -> Result<RunResult<P::Output>> {
    run_with(graph, program, budget, Execution::Auto)
}

pub fn run_with<P: NodeProgram>(
    graph: &ColoredGraph,
    program: &P,
    budget: Budget,
    exec: Execution,
) -> Result<RunResult<P::Output>> {
    let n = graph.n();
    let views: Vec<NodeView<'_>> = (0..n)
        .map(|v| NodeView {
            id: v,
            neighbors: graph.neighbors(v),
            out_neighbors: graph.out_neighbors(v),
            init_color: graph.init_color(v),
        })
        .collect();
    let parallel = match exec {
        Execution::Auto => n >= PARALLEL_THRESHOLD,
        Execution::Sequential => false,
        Execution::Parallel => true,
    };

    let first: Vec<StepResult<P>> = if parallel {
        views.par_iter().map(|view| program.init(view)).collect()
    } else {
        views.iter().map(|view| program.init(view)).collect()
    };
    let mut states = Vec::with_capacity(n);
    let mut outboxes = Vec::with_capacity(n);
    let mut outputs: Vec<Option<P::Output>> = vec![None; n];
    for (v, step) in first.into_iter().enumerate() {
        let step = step?;
        states.push(Some(step.state));
        outboxes.push(step.outbox);
        outputs[v] = step.output;
    }

    let mut trace = RoundTrace::default();
    let mut round = 0;
    while outputs.iter().any(Option::is_none) {
        round += 1;
        if round > budget.max_rounds {
            return Err(Error::RoundLimitExceeded { max_rounds: budget.max_rounds });
        }
        let (inboxes, record) = deliver(graph, &outboxes, round, budget)?;
        let steps: Vec<StepResult<P>> = if parallel {
            states
                .par_iter_mut()
                .zip(inboxes.par_iter())
                .enumerate()
                .map(|(v, (s, inbox))| program.step(&views[v], s.take().expect("state"), inbox, round))
                .collect()
        } else {
            states
                .iter_mut()
                .zip(inboxes.iter())
                .enumerate()
                .map(|(v, (s, inbox))| program.step(&views[v], s.take().expect("state"), inbox, round))
                .collect()
        };
        for (v, step) in steps.into_iter().enumerate() {
            let step = step?;
            states[v] = Some(step.state);
            outboxes[v] = step.outbox;
            if let Some(o) = step.output {
                if outputs[v].is_some() {
                    return Err(views[v].fail(round, "produced a second output"));
                }
                outputs[v] = Some(o);
            }
        }
        let nodes_output = outputs.iter().filter(|o| o.is_some()).count();
        trace.records.push(RoundRecord { nodes_output, ..record });
    }
    trace.rounds_elapsed = round;
    trace.phases.push(PhaseRecord {
        label: program.label().to_string(),
        first_round: 0,
        rounds: round,
        nodes: n,
        max_bits: trace.overall_max_bits(),
        bound: budget.bits_per_message,
        centralized: false,
    });
    Ok(RunResult { trace, outputs: outputs.into_iter().map(|o| o.expect("all output")).collect() })
}

fn deliver<M: Payload>(
    graph: &ColoredGraph,
    outboxes: &[Outbox<M>],
    round: usize,
    budget: Budget,
) -> Result<(Vec<Vec<(usize, M)>>, RoundRecord)> {
    let mut inboxes: Vec<Vec<(usize, M)>> = vec![Vec::new(); graph.n()];
    let mut rec = RoundRecord { round, max_bits: 0, messages: 0, total_bits: 0, nodes_output: 0 };
    let mut account = |from: usize, to: usize, bits: u64| -> Result<()> {
        if let Some(b) = budget.bits_per_message {
            if bits > b {
                return Err(Error::BudgetViolation { from, to, round, bits, budget: b });
            }
        }
        rec.max_bits = rec.max_bits.max(bits);
        rec.messages += 1;
        rec.total_bits += bits;
        Ok(())
    };
    for (u, ob) in outboxes.iter().enumerate() {
        match ob {
            Outbox::Silent => {}
            Outbox::Broadcast(msg) => {
                let bits = msg.bits();
                for &w in graph.neighbors(u) {
                    account(u, w, bits)?;
                    inboxes[w].push((u, msg.clone()));
                }
            }
            Outbox::Direct(list) => {
                for (w, msg) in list {
                    if !graph.has_edge(u, *w) {
                        return Err(Error::InvariantViolated(format!(
                            "node {u} addressed non-neighbor {w} in round {round}"
                        )));
                    }
                    account(u, *w, msg.bits())?;
                    inboxes[*w].push((u, msg.clone()));
                }
            }
        }
    }
    for inbox in &mut inboxes {
        inbox.sort_by_key(|e| e.0);
    }
    Ok((inboxes, rec))
}
