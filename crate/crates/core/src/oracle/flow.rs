//! Bounded-outdegree orientations via bipartite max-flow.

/// Orients every edge so node `v` has out-degree at most `cap[v]`, or
/// returns `None` if no such orientation exists.
pub fn orient_with_caps(n: usize, edges: &[(usize, usize)], cap: &[u64]) -> Option<Vec<(usize, usize)>> {
    // Each edge is assigned to the endpoint that becomes its tail.
    let mut tail: Vec<Option<usize>> = vec![None; edges.len()];
    let mut load = vec![0u64; n];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        incident[u].push(e);
        incident[v].push(e);
    }
    for e in 0..edges.len() {
        if !augment(e, edges, cap, &incident, &mut tail, &mut load) {
            return None;
        }
    }
    Some(
        edges
            .iter()
            .zip(&tail)
            .map(|(&(u, v), t)| if *t == Some(u) { (u, v) } else { (v, u) })
            .collect(),
    )
}

/// Finds an alternating path that gives edge `start` a tail with spare capacity.
fn augment(
    start: usize,
    edges: &[(usize, usize)],
    cap: &[u64],
    incident: &[Vec<usize>],
    tail: &mut [Option<usize>],
    load: &mut [u64],
) -> bool {
    let n = cap.len();
    let mut prev_edge: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    let (a, b) = edges[start];
    for x in [a, b] {
        if !seen[x] {
            seen[x] = true;
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        if load[x] < cap[x] {
            // Shift tails back along the path to `start`.
            let mut node = x;
            while let Some(e) = prev_edge[node] {
                let prev = tail[e].expect("edge on path has a tail");
                tail[e] = Some(node);
                node = prev;
            }
            tail[start] = Some(node);
            load[x] += 1;
            return true;
        }
        for &e in &incident[x] {
            if tail[e] != Some(x) {
                continue;
            }
            let (u, v) = edges[e];
            let other = if u == x { v } else { u };
            if !seen[other] {
                seen[other] = true;
                prev_edge[other] = Some(e);
                queue.push_back(other);
            }
        }
    }
    false
}
