//! Small min-cost flow (successive shortest paths, queue-based Bellman-Ford)
//! for the room-level transportation subproblem.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
    cost: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct MinCostFlow {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    original_caps: Vec<i64>,
}

impl MinCostFlow {
    pub fn new(n: usize) -> Self {
        MinCostFlow {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            original_caps: Vec::new(),
        }
    }

    /// Adds `from -> to` and returns its id for later capacity updates and
    /// flow queries.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
        });
        self.original_caps.push(cap);
        self.original_caps.push(0);
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub fn set_capacity(&mut self, edge: usize, cap: i64) {
        self.original_caps[edge] = cap;
    }

    /// Flow currently on `edge` after the last [`run`](Self::run).
    pub fn flow(&self, edge: usize) -> i64 {
        self.edges[edge + 1].cap
    }

    fn reset(&mut self) {
        for (e, &c) in self.edges.iter_mut().zip(&self.original_caps) {
            e.cap = c;
        }
    }

    /// Sends as much flow as possible from `s` to `t` at minimum cost.
    /// Returns `(flow, cost)`. Costs on forward edges must be non-negative.
    pub fn run(&mut self, s: usize, t: usize) -> (i64, i64) {
        self.reset();
        let mut flow = 0;
        let mut cost = 0;
        let mut dist = vec![i64::MAX; self.n];
        let mut in_queue = vec![false; self.n];
        let mut via = vec![usize::MAX; self.n];
        loop {
            dist.fill(i64::MAX);
            via.fill(usize::MAX);
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            in_queue[s] = true;
            while let Some(u) = queue.pop_front() {
                in_queue[u] = false;
                for &e in &self.adj[u] {
                    let edge = &self.edges[e];
                    if edge.cap > 0 && dist[u] + edge.cost < dist[edge.to] {
                        dist[edge.to] = dist[u] + edge.cost;
                        via[edge.to] = e;
                        if !in_queue[edge.to] {
                            in_queue[edge.to] = true;
                            queue.push_back(edge.to);
                        }
                    }
                }
            }
            if dist[t] == i64::MAX {
                break;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while v != s {
                let e = via[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            flow += push;
            cost += push * dist[t];
        }
        (flow, cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefers_cheap_path() {
        // s=0, a=1, b=2, t=3
        let mut f = MinCostFlow::new(4);
        f.add_edge(0, 1, 3, 0);
        let cheap = f.add_edge(1, 2, 2, 1);
        let dear = f.add_edge(1, 3, 5, 10);
        f.add_edge(2, 3, 5, 0);
        assert_eq!(f.run(0, 3), (3, 2 + 10));
        assert_eq!((f.flow(cheap), f.flow(dear)), (2, 1));
        f.set_capacity(cheap, 0);
        assert_eq!(f.run(0, 3), (3, 30));
    }

    #[test]
    fn reroutes_through_residual() {
        // two sources of demand competing for a cheap sink
        let mut f = MinCostFlow::new(6);
        let (s, a, b, x, y, t) = (0, 1, 2, 3, 4, 5);
        f.add_edge(s, a, 1, 0);
        f.add_edge(s, b, 1, 0);
        f.add_edge(a, x, 1, 0);
        f.add_edge(a, y, 1, 5);
        f.add_edge(b, x, 1, 0);
        f.add_edge(b, y, 1, 100);
        f.add_edge(x, t, 1, 0);
        f.add_edge(y, t, 1, 0);
        assert_eq!(f.run(s, t), (2, 5));
    }
}
